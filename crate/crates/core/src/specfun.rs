//! Cylindrical Bessel and Hankel functions of orders 0 and 1 for real arguments.
//!
//! Three evaluation regimes are used:
//!
//! * `x < 8`: ascending power series (the log-series form for `Y0`, `Y1`).
//! * `8 <= x < 25`: Miller backward recurrence for `J_n`, normalized by
//!   `J0 + 2 sum J_2k = 1`, with `Y0`, `Y1` from the Neumann series.
//! * `x >= 25`: Hankel asymptotic expansion in amplitude/phase form.
//!
//! Absolute error is below `1e-13` for `J` and `1e-12` for `Y` on `[0, 1e3]`
//! (see the unit tests against high-precision reference values).

use num_complex::Complex64;
use std::f64::consts::FRAC_2_PI;

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_MAX: f64 = 8.0;
const ASYMPTOTIC_MIN: f64 = 25.0;

fn check_nonneg(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("Bessel argument must be finite and >= 0, got {x}")));
    }
    Ok(())
}

fn check_pos(x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("Hankel argument must be finite and > 0, got {x}")));
    }
    Ok(())
}

/// `J0(x)` for `x >= 0`.
pub fn bessel_j0(x: f64) -> Result<f64> {
    check_nonneg(x)?;
    Ok(j0_unchecked(x))
}

/// `J1(x)` for `x >= 0`.
pub fn bessel_j1(x: f64) -> Result<f64> {
    check_nonneg(x)?;
    Ok(j1_unchecked(x))
}

/// `Y0(x)` for `x > 0`.
pub fn bessel_y0(x: f64) -> Result<f64> {
    check_pos(x)?;
    Ok(jy_unchecked(x).2)
}

/// `Y1(x)` for `x > 0`.
pub fn bessel_y1(x: f64) -> Result<f64> {
    check_pos(x)?;
    Ok(jy_unchecked(x).3)
}

/// `H0^(1)(x) = J0(x) + i Y0(x)` for `x > 0`.
pub fn hankel1_0(x: f64) -> Result<Complex64> {
    check_pos(x)?;
    let (j0, _, y0, _) = jy_unchecked(x);
    Ok(Complex64::new(j0, y0))
}

/// `H1^(1)(x) = J1(x) + i Y1(x)` for `x > 0`.
pub fn hankel1_1(x: f64) -> Result<Complex64> {
    check_pos(x)?;
    let (_, j1, _, y1) = jy_unchecked(x);
    Ok(Complex64::new(j1, y1))
}

/// Both Hankel functions at once; cheaper than two separate calls.
pub fn hankel1_01(x: f64) -> Result<(Complex64, Complex64)> {
    check_pos(x)?;
    let (j0, j1, y0, y1) = jy_unchecked(x);
    Ok((Complex64::new(j0, y0), Complex64::new(j1, y1)))
}

/// `(J0, J1)` without argument checks. Caller guarantees `x >= 0`, finite.
pub(crate) fn j01_unchecked(x: f64) -> (f64, f64) {
    if x < SERIES_MAX {
        (j0_series(x), j1_series(x))
    } else if x < ASYMPTOTIC_MIN {
        let m = MillerTable::new(x);
        (m.j(0), m.j(1))
    } else {
        let (j0, j1, _, _) = asymptotic(x);
        (j0, j1)
    }
}

pub(crate) fn j0_unchecked(x: f64) -> f64 {
    if x < SERIES_MAX {
        j0_series(x)
    } else if x < ASYMPTOTIC_MIN {
        MillerTable::new(x).j(0)
    } else {
        asymptotic(x).0
    }
}

pub(crate) fn j1_unchecked(x: f64) -> f64 {
    if x < SERIES_MAX {
        j1_series(x)
    } else if x < ASYMPTOTIC_MIN {
        MillerTable::new(x).j(1)
    } else {
        asymptotic(x).1
    }
}

/// `(J0, J1, Y0, Y1)` for `x > 0`.
pub(crate) fn jy_unchecked(x: f64) -> (f64, f64, f64, f64) {
    if x < SERIES_MAX {
        series_all(x)
    } else if x < ASYMPTOTIC_MIN {
        neumann_all(x)
    } else {
        asymptotic(x)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn j1_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn series_all(x: f64) -> (f64, f64, f64, f64) {
    let q = -0.25 * x * x;
    let lg = (0.5 * x).ln() + EULER_GAMMA;

    // J0 and the harmonic-weighted tail of Y0.
    let mut t0 = 1.0;
    let mut j0 = 1.0;
    let mut y0_tail = 0.0;
    // J1 and the digamma-weighted tail of Y1.
    let mut t1 = 0.5 * x;
    let mut j1 = t1;
    // psi(k+1) + psi(k+2) + 2 gamma = H_k + H_{k+1}
    let mut y1_tail = t1 * 1.0;
    let mut h = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        h += 1.0 / kf;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        j0 += t0;
        j1 += t1;
        y0_tail += h * t0;
        y1_tail += (2.0 * h + 1.0 / (kf + 1.0)) * t1;
        if t0.abs().max(t1.abs()) * (h + 1.0) < 1e-18 {
            break;
        }
    }
    let y0 = FRAC_2_PI * (lg * j0 - y0_tail);
    let y1 = FRAC_2_PI * (lg * j1 - 1.0 / x) - 0.5 * FRAC_2_PI * y1_tail;
    (j0, j1, y0, y1)
}

/// Normalized `J_0 .. J_N` from backward recurrence.
struct MillerTable {
    j: Vec<f64>,
}

impl MillerTable {
    fn new(x: f64) -> Self {
        // Start well above x so J_start is negligible at double precision.
        let mut start = (x + 12.0 * x.cbrt() + 30.0).ceil() as usize;
        if start % 2 == 1 {
            start += 1;
        }
        let mut j = vec![0.0; start + 2];
        j[start + 1] = 0.0;
        j[start] = 1e-300;
        let mut norm = 0.0;
        for n in (1..=start).rev() {
            let v = 2.0 * n as f64 / x * j[n] - j[n + 1];
            j[n - 1] = v;
            if v.abs() > 1e250 {
                for jj in j.iter_mut().skip(n - 1) {
                    *jj *= 1e-250;
                }
                norm *= 1e-250;
            }
            if (n - 1) % 2 == 0 && n - 1 > 0 {
                norm += 2.0 * j[n - 1];
            }
        }
        norm += j[0];
        for v in j.iter_mut() {
            *v /= norm;
        }
        Self { j }
    }

    fn j(&self, n: usize) -> f64 {
        self.j.get(n).copied().unwrap_or(0.0)
    }

    fn len(&self) -> usize {
        self.j.len()
    }
}

fn neumann_all(x: f64) -> (f64, f64, f64, f64) {
    let m = MillerTable::new(x);
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let j0 = m.j(0);
    let j1 = m.j(1);

    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut sign = -1.0;
    let mut k = 1;
    while 2 * k + 1 < m.len() {
        let kf = k as f64;
        s0 += sign * m.j(2 * k) / kf;
        s1 += sign * (m.j(2 * k - 1) - m.j(2 * k + 1)) / kf;
        sign = -sign;
        k += 1;
    }
    let y0 = FRAC_2_PI * lg * j0 - 2.0 * FRAC_2_PI * s0;
    let y1 = FRAC_2_PI * (lg * j1 - j0 / x) + FRAC_2_PI * s1;
    (j0, j1, y0, y1)
}

/// Hankel expansion `P_n`, `Q_n` for order `n` in {0, 1}.
fn pq(order: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (order * order) as f64;
    let eightx = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eightx);
        let mag = term.abs();
        if mag > prev || mag < 1e-18 {
            break;
        }
        prev = mag;
        // Terms alternate between Q (odd k) and P (even k) with sign (-1)^floor(k/2).
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
    }
    (p, q)
}

fn asymptotic(x: f64) -> (f64, f64, f64, f64) {
    let amp = (FRAC_2_PI / x).sqrt();
    let (p0, q0) = pq(0, x);
    let (p1, q1) = pq(1, x);
    let (s, c) = x.sin_cos();
    // phases x - pi/4 and x - 3pi/4
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (s0, c0) = (r * (s - c), r * (c + s));
    let (s1, c1) = (-r * (s + c), r * (s - c));
    let j0 = amp * (p0 * c0 - q0 * s0);
    let y0 = amp * (p0 * s0 + q0 * c0);
    let j1 = amp * (p1 * c1 - q1 * s1);
    let y1 = amp * (p1 * s1 + q1 * c1);
    (j0, j1, y0, y1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Reference values computed with 30-digit arithmetic (mpmath).
    // Columns: x, J0, J1, Y0, Y1.
    const REFERENCE: &[(f64, f64, f64, f64, f64)] = &[
        (0.1, 0.997_501_562_066_040_03, 0.049_937_526_036_241_998, -1.534_238_651_350_366_8, -6.458_951_094_702_027_0),
        (1.0, 0.765_197_686_557_966_55, 0.440_050_585_744_933_52, 0.088_256_964_215_676_958, -0.781_212_821_300_288_72),
        (2.5, -0.048_383_776_468_197_996, 0.497_094_102_464_274_04, 0.498_070_359_615_231_89, 0.145_918_137_966_785_80),
        (5.0, -0.177_596_771_314_338_30, -0.327_579_137_591_465_22, -0.308_517_625_249_033_78, 0.147_863_143_391_226_84),
        (7.9, 0.194_361_844_841_278_32, 0.219_179_399_921_754_14, 0.206_520_948_144_375_70, -0.181_721_077_280_573_21),
        (8.1, 0.147_517_454_044_377_58, 0.247_607_766_981_592_92, 0.238_091_328_702_234_86, -0.133_148_795_952_495_84),
        (12.0, 0.047_689_310_796_833_537, -0.223_447_104_490_627_61, -0.225_237_312_634_361_43, -0.057_099_218_260_896_521),
        (17.3, -0.133_700_647_075_764_29, -0.141_423_335_492_013_90, -0.137_505_213_443_524_87, 0.129_785_346_739_083_99),
        (24.9, 0.083_245_968_353_015_682, -0.134_855_699_531_408_74, -0.136_499_183_996_765_11, -0.086_002_557_595_554_442),
        (25.1, 0.108_275_671_499_949_29, -0.114_634_784_134_422_73, -0.116_767_707_638_037_10, -0.110_622_233_227_830_83),
        (40.0, 0.007_366_890_584_237_289_6, 0.126_038_318_037_584_99, 0.125_936_417_058_260_93, -0.005_793_505_821_549_632_9),
        (100.0, 0.019_985_850_304_223_122, -0.077_145_352_014_112_158, -0.077_244_313_365_083_152, -0.020_372_312_002_759_793),
        (1000.0, 0.024_786_686_152_420_175, 0.004_728_311_907_089_523_9, 0.004_715_917_977_622_813_4, -0.024_784_331_292_351_779),
    ];

    /// Plain 40-term Taylor series, independent of the production code path.
    fn j0_taylor40(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 0..40 {
            if k > 0 {
                term *= -(x * x / 4.0) / ((k * k) as f64);
            }
            sum += term;
        }
        sum
    }

    fn j1_taylor40(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = x / 2.0;
        for k in 0..40 {
            if k > 0 {
                term *= -(x * x / 4.0) / ((k * (k + 1)) as f64);
            }
            sum += term;
        }
        sum
    }

    #[test]
    fn matches_reference_table() {
        for &(x, j0, j1, y0, y1) in REFERENCE {
            let (a, b, c, d) = jy_unchecked(x);
            assert!((a - j0).abs() < 1e-13, "J0({x}) = {a}, want {j0}");
            assert!((b - j1).abs() < 1e-13, "J1({x}) = {b}, want {j1}");
            assert!((c - y0).abs() < 1e-12, "Y0({x}) = {c}, want {y0}");
            assert!((d - y1).abs() < 1e-12, "Y1({x}) = {d}, want {y1}");
            assert_eq!(j0_unchecked(x), a);
            assert_eq!(j1_unchecked(x), b);
        }
    }

    #[test]
    fn j0_at_zero_and_first_root() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        // Bisection on the Taylor oracle.
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if j0_taylor40(lo) * j0_taylor40(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((lo - 2.404_825_557_695_773).abs() < 1e-12);
        assert!(bessel_j0(2.404_825_557_695_773).unwrap().abs() < 1e-10);
    }

    #[test]
    fn taylor_oracle_agreement() {
        assert!((bessel_j0(5.0).unwrap() - j0_taylor40(5.0)).abs() < 1e-12);
        assert!((bessel_j1(1.0).unwrap() - j1_taylor40(1.0)).abs() < 1e-12);
    }

    #[test]
    fn j1_is_minus_j0_derivative() {
        let h = 1e-5;
        for &x in &[0.5, 3.0, 7.99, 8.01, 15.0, 24.99, 25.01, 60.0, 500.0] {
            let fd = (bessel_j0(x - h).unwrap() - bessel_j0(x + h).unwrap()) / (2.0 * h);
            assert!((fd - bessel_j1(x).unwrap()).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j0(-1.0).is_err());
        assert!(bessel_j1(f64::NAN).is_err());
        assert!(hankel1_0(0.0).is_err());
        assert!(hankel1_1(-2.0).is_err());
        assert!(hankel1_0(f64::INFINITY).is_err());
    }

    #[test]
    fn hankel_real_part_is_j() {
        for &x in &[1e-8, 0.3, 9.0, 30.0, 999.0] {
            assert_eq!(hankel1_0(x).unwrap().re, bessel_j0(x).unwrap());
            assert!((hankel1_1(x).unwrap().re - bessel_j1(x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn small_argument_limits() {
        let x = 1e-6;
        let y0 = hankel1_0(x).unwrap().im;
        let approx = FRAC_2_PI * ((x / 2.0).ln() + EULER_GAMMA);
        assert!(((y0 - approx) / approx).abs() < 1e-6);
        let scaled = hankel1_1(x).unwrap() * x;
        let want = Complex64::new(0.0, -FRAC_2_PI);
        assert!(((scaled - want).norm() / want.norm()) < 1e-4);
    }

    #[test]
    fn large_argument_modulus() {
        let x = 50.0;
        let m = hankel1_0(x).unwrap().norm();
        let lead = (2.0 / (PI * x)).sqrt();
        assert!(((m - lead) / lead).abs() < 0.01);
    }

    #[test]
    fn hankel1_is_minus_hankel0_derivative() {
        let h = 1e-5;
        for &x in &[0.05, 1.0, 7.9, 8.1, 12.0, 24.95, 25.05, 80.0] {
            let fd = -(hankel1_0(x + h).unwrap() - hankel1_0(x - h).unwrap()) / (2.0 * h);
            let tol = 1e-8 * (1.0 + 1.0 / (x * x));
            assert!((fd - hankel1_1(x).unwrap()).norm() < tol, "x = {x}");
        }
    }

    #[test]
    fn wronskian() {
        let mut x = 0.1;
        while x <= 100.0 {
            let (j0, j1, y0, y1) = jy_unchecked(x);
            // J0 Y0' - J0' Y0 with J0' = -J1, Y0' = -Y1
            let w = -j0 * y1 + j1 * y0;
            let want = 2.0 / (PI * x);
            assert!(((w - want) / want).abs() < 1e-8, "x = {x}");
            x *= 1.07;
        }
    }

    #[test]
    fn y1_is_minus_y0_derivative() {
        let h = 1e-5;
        for &x in &[0.7, 4.0, 8.0, 19.0, 25.0, 300.0] {
            let fd = (bessel_y0(x + h).unwrap() - bessel_y0(x - h).unwrap()) / (2.0 * h);
            assert!((fd + bessel_y1(x).unwrap()).abs() < 1e-8, "x = {x}");
        }
    }

    proptest::proptest! {
        #[test]
        fn finite_on_log_spaced_domain(e in -8.0f64..3.0) {
            let x = 10f64.powf(e);
            let (h0, h1) = hankel1_01(x).unwrap();
            proptest::prop_assert!(h0.re.is_finite() && h0.im.is_finite());
            proptest::prop_assert!(h1.re.is_finite() && h1.im.is_finite());
        }
    }
}
