//! Separation-of-variables solution for plane-wave scattering by a
//! homogeneous penetrable disk centered at the origin.
//!
//! Independent of the volume solver: the field is expanded in cylindrical
//! modes, `u_in = sum i^n J_n(kr) e^{in(theta - theta_d)}`, and continuity of
//! `u` and `du/dr` at `r = a` fixes the outgoing Hankel coefficients per mode.

use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_4, PI};

use crate::geometry::{Direction2, Point2};
use crate::specfun;

/// Largest tail term allowed relative to the partial sum before warning.
pub const TRUNCATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DiskSeries {
    k: f64,
    radius: f64,
    /// `a_n` for `n = 0..=order`; `a_{-n} = a_n`.
    coeffs: Vec<C64>,
}

impl DiskSeries {
    /// Default truncation order for wavenumber `k`, radius `a` and contrast `eta`.
    pub fn default_order(eta: C64, radius: f64, k: f64) -> usize {
        let ki = k * (C64::new(1.0, 0.0) + eta).sqrt().norm();
        (k.max(ki) * radius + 20.0).ceil() as usize
    }

    pub fn new(eta: C64, radius: f64, k: f64) -> Self {
        Self::with_order(eta, radius, k, Self::default_order(eta, radius, k))
    }

    pub fn with_order(eta: C64, radius: f64, k: f64, order: usize) -> Self {
        let ki = k * (C64::new(1.0, 0.0) + eta).sqrt();
        let ka = k * radius;
        // Orders 0..=order+1 so derivatives can use the recurrence.
        let jr = bessel_j_real(order + 1, ka);
        let yr = bessel_y_real(order + 1, ka);
        let jc = bessel_j_complex(order + 1, ki * radius);
        let coeffs = (0..=order)
            .map(|n| {
                let (j, jp) = with_derivative(&jr, n, ka);
                let (y, yp) = with_derivative(&yr, n, ka);
                let (h, hp) = (C64::new(j, y), C64::new(jp, yp));
                let (jin, jinp) = with_derivative_c(&jc, n, ki * radius);
                let num = ki * jinp * j - k * jp * jin;
                let den = k * hp * jin - ki * jinp * h;
                num / den
            })
            .collect();
        Self { k, radius, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    /// Whether the last retained mode is negligible against the sum.
    pub fn truncation_ok(&self) -> bool {
        let last = self.coeffs.last().map(|c| c.norm()).unwrap_or(0.0);
        let total: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
        total == 0.0 || last <= TRUNCATION_TOL * total
    }

    /// Scattered field at `x` (requires `|x| > radius`).
    pub fn scattered(&self, x: Point2, d: Direction2) -> C64 {
        let r = x.norm();
        assert!(r > self.radius, "disk series evaluated inside the disk");
        let phi = x.x2.atan2(x.x1) - d.angle();
        let kr = self.k * r;
        let jr = bessel_j_real(self.order(), kr);
        let yr = bessel_y_real(self.order(), kr);
        let mut sum = self.coeffs[0] * C64::new(jr[0], yr[0]);
        let mut ipow = C64::new(1.0, 0.0);
        for n in 1..=self.order() {
            ipow *= C64::i();
            let h = C64::new(jr[n], yr[n]);
            sum += 2.0 * ipow * self.coeffs[n] * h * (n as f64 * phi).cos();
        }
        sum
    }

    /// Far-field pattern with the `e^{ikr} / sqrt(r)` normalization.
    pub fn far_field(&self, xhat: Direction2, d: Direction2) -> C64 {
        let phi = xhat.angle() - d.angle();
        let mut sum = self.coeffs[0];
        for n in 1..=self.order() {
            sum += 2.0 * self.coeffs[n] * (n as f64 * phi).cos();
        }
        let pre = (2.0 / (PI * self.k)).sqrt() * C64::from_polar(1.0, -FRAC_PI_4);
        pre * sum
    }
}

/// One-shot form of [`DiskSeries::scattered`].
pub fn disk_series_oracle(eta: C64, radius: f64, k: f64, x: Point2, d: Direction2) -> C64 {
    let s = DiskSeries::new(eta, radius, k);
    if !s.truncation_ok() {
        log::warn!("disk series truncated at order {} with a non-negligible tail", s.order());
    }
    s.scattered(x, d)
}

fn with_derivative(z: &[f64], n: usize, x: f64) -> (f64, f64) {
    // Z_n' = Z_{n-1} - (n/x) Z_n, with Z_{-1} = -Z_1 for n = 0.
    let prev = if n == 0 { -z[1] } else { z[n - 1] };
    (z[n], prev - n as f64 / x * z[n])
}

fn with_derivative_c(z: &[C64], n: usize, x: C64) -> (C64, C64) {
    let prev = if n == 0 { -z[1] } else { z[n - 1] };
    (z[n], prev - n as f64 / x * z[n])
}

/// `J_0..=J_order` at real `x` by normalized backward recurrence.
fn bessel_j_real(order: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut v = vec![0.0; order + 1];
        v[0] = 1.0;
        return v;
    }
    let mut start = order.max(x as usize) + 40 + (4.0 * x.sqrt()) as usize;
    start += start % 2;
    let mut j = vec![0.0f64; start + 2];
    j[start] = 1e-280;
    for n in (1..=start).rev() {
        j[n - 1] = 2.0 * n as f64 / x * j[n] - j[n + 1];
        if j[n - 1].abs() > 1e200 {
            for v in j.iter_mut() {
                *v *= 1e-200;
            }
        }
    }
    let norm = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
    j.truncate(order + 1);
    j.iter().map(|v| v / norm).collect()
}

/// `Y_0..=Y_order` at real `x > 0` by forward recurrence (stable for `Y`).
fn bessel_y_real(order: usize, x: f64) -> Vec<f64> {
    let mut y = Vec::with_capacity(order + 2);
    y.push(specfun::bessel_y0(x).expect("positive argument"));
    y.push(specfun::bessel_y1(x).expect("positive argument"));
    for n in 1..order {
        let next = 2.0 * n as f64 / x * y[n] - y[n - 1];
        y.push(next);
    }
    y.truncate(order + 1);
    y
}

/// `J_0..=J_order` at complex `z` by the ascending series (fine for `|z| <~ 15`).
fn bessel_j_complex(order: usize, z: C64) -> Vec<C64> {
    let half = z / 2.0;
    let q = -half * half;
    let mut out = Vec::with_capacity(order + 1);
    let mut lead = C64::new(1.0, 0.0); // (z/2)^n / n!
    for n in 0..=order {
        if n > 0 {
            lead *= half / n as f64;
        }
        let mut term = lead;
        let mut sum = term;
        for m in 1..200 {
            term *= q / (m as f64 * (m + n) as f64);
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        out.push(sum);
    }
    out
}
