//! Orthogonality-sampling indicators computed from Cauchy data.
//!
//! Two families: `I` pairs the far field recovered from the Cauchy data with
//! the test function `e^{-ik z.d}`, `I2` integrates the data directly against
//! `Im Phi(., z) = J0(k|. - z|) / 4`. The `_far` variants replace the normal
//! derivative with `ik u_sc`, which is accurate when the receivers are far away.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{CMatrix, CauchyDataset};
use crate::error::{Error, Result};
use crate::forward::far_field_prefactor;
use crate::geometry::{incident_directions, Aperture, Direction2, Point2, SamplingGrid};
use crate::specfun;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Functional {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "I_far")]
    IFar,
    #[serde(rename = "I2")]
    I2,
    #[serde(rename = "I2_far")]
    I2Far,
}

impl Functional {
    pub const ALL: [Functional; 4] = [Functional::I, Functional::IFar, Functional::I2, Functional::I2Far];

    pub fn name(self) -> &'static str {
        match self {
            Functional::I => "I",
            Functional::IFar => "I_far",
            Functional::I2 => "I2",
            Functional::I2Far => "I2_far",
        }
    }

    pub fn needs_normal_derivative(self) -> bool {
        matches!(self, Functional::I | Functional::I2)
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Functional::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::config("functionals", format!("unknown functional `{s}`")))
    }
}

/// Test function `e^{-ik z.d}`.
pub fn phi_test(z: Point2, d: Direction2, k: f64) -> C64 {
    C64::from_polar(1.0, -k * d.dot(z))
}

/// Far-field pattern of the Green's function and its normal derivative in `y`:
/// `(Phi_inf(xhat, y), -ik (xhat.nu) Phi_inf(xhat, y))`.
pub fn far_field_green2(xhat: Direction2, y: Point2, nu: Direction2, k: f64) -> (C64, C64) {
    let phi = far_field_prefactor(k) * C64::from_polar(1.0, -k * xhat.dot(y));
    let dphi = C64::new(0.0, -k * xhat.dot(nu.as_point())) * phi;
    (phi, dphi)
}

/// `Im Phi(x, z)` and its normal derivative in `x` along `nu`.
pub fn imag_green_pair(x: Point2, nu: Direction2, z: Point2, k: f64) -> (f64, f64) {
    let diff = x - z;
    let r = diff.norm();
    let (j0, j1) = specfun::j01_unchecked(k * r);
    let d = if r == 0.0 { 0.0 } else { -0.25 * k * j1 * nu.dot(diff) / r };
    (0.25 * j0, d)
}

/// Normal derivative used by a functional: measured, or `ik u_sc`.
fn normal_data(ds: &CauchyDataset, exact: bool) -> Result<CMatrix> {
    if exact {
        ds.du.clone().ok_or(Error::MissingDerivative)
    } else {
        Ok(ds.u.scale(C64::new(0.0, ds.k)))
    }
}

/// `u_inf(xhat, d)` on a set of observation directions.
#[derive(Debug, Clone)]
pub struct FarFieldMatrix {
    pub k: f64,
    pub xhats: Vec<Direction2>,
    /// Quadrature weight per observation direction.
    pub xhat_weight: f64,
    pub directions: Vec<Direction2>,
    pub direction_weight: f64,
    /// `[n_xhat x n_directions]`.
    pub values: CMatrix,
}

impl FarFieldMatrix {
    /// `I(z) = sum_xhat w |sum_d w u_inf(xhat, d) phi_z(d)|^2`.
    pub fn indicator(&self, z: Point2) -> f64 {
        let phi: Vec<C64> = self.directions.iter().map(|d| phi_test(z, *d, self.k) * self.direction_weight).collect();
        let sum: f64 = (0..self.values.rows())
            .map(|i| {
                let f: C64 = self.values.row(i).iter().zip(&phi).map(|(u, p)| u * p).sum();
                f.norm_sqr()
            })
            .sum();
        sum * self.xhat_weight
    }
}

/// Observation directions for the outer integral of `I`: `n` points on the full circle.
pub fn default_xhats(n: usize) -> Vec<Direction2> {
    incident_directions(n, Aperture::FULL)
}

fn far_field_from(ds: &CauchyDataset, du: &CMatrix, xhats: &[Direction2]) -> Result<FarFieldMatrix> {
    if xhats.is_empty() {
        return Err(Error::config("xhat_count", "need at least one observation direction"));
    }
    let rx = ds.circle.receivers();
    let w = ds.circle.weight();
    let nd = ds.n_directions();
    let rows: Vec<C64> = xhats
        .par_iter()
        .flat_map_iter(|xh| {
            let kern: Vec<(C64, C64)> = rx.iter().map(|(y, nu)| far_field_green2(*xh, *y, *nu, ds.k)).collect();
            (0..nd)
                .map(|l| {
                    let s: C64 = kern
                        .iter()
                        .enumerate()
                        .map(|(j, (phi, dphi))| ds.u.get(j, l) * dphi - du.get(j, l) * phi)
                        .sum();
                    s * w
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(FarFieldMatrix {
        k: ds.k,
        xhats: xhats.to_vec(),
        xhat_weight: std::f64::consts::TAU / xhats.len() as f64,
        directions: ds.directions(),
        direction_weight: ds.direction_weight(),
        values: CMatrix::from_vec(xhats.len(), nd, rows)?,
    })
}

/// Far field from Cauchy data by the Helmholtz representation on the measurement circle.
pub fn extract_far_field(ds: &CauchyDataset, xhats: &[Direction2]) -> Result<FarFieldMatrix> {
    far_field_from(ds, &normal_data(ds, true)?, xhats)
}

/// As [`extract_far_field`] with `du_sc/dnu` replaced by `ik u_sc`.
pub fn extract_far_field_impedance(ds: &CauchyDataset, xhats: &[Direction2]) -> Result<FarFieldMatrix> {
    far_field_from(ds, &normal_data(ds, false)?, xhats)
}

/// Indicator values on a sampling grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorImage {
    pub grid: SamplingGrid,
    pub values: Vec<f64>,
    pub normalized: bool,
    pub functional: Functional,
    pub k: f64,
    /// Noise level of the data the image was computed from.
    pub delta: f64,
}

impl IndicatorImage {
    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    pub fn argmax(&self) -> Point2 {
        let (i, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        self.grid.point(i)
    }

    pub fn value_at(&self, i1: usize, i2: usize) -> f64 {
        self.values[i2 * self.grid.n1 + i1]
    }
}

/// Divides by the maximum value.
pub fn normalize(img: &IndicatorImage) -> Result<IndicatorImage> {
    let m = img.max();
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Degenerate(format!("{} image has no positive finite maximum", img.functional)));
    }
    Ok(IndicatorImage {
        values: img.values.iter().map(|v| v / m).collect(),
        normalized: true,
        ..img.clone()
    })
}

fn image_from<F>(grid: &SamplingGrid, functional: Functional, k: f64, f: F) -> IndicatorImage
where
    F: Fn(Point2) -> f64 + Sync,
{
    let values = grid.points().par_iter().map(|z| f(*z)).collect();
    IndicatorImage { grid: *grid, values, normalized: false, functional, k, delta: 0.0 }
}

/// `I` on the grid using `xhat_count` observation directions on the full circle.
pub fn imaging_i(ds: &CauchyDataset, grid: &SamplingGrid, xhat_count: usize) -> Result<IndicatorImage> {
    let ff = extract_far_field(ds, &default_xhats(xhat_count))?;
    Ok(image_from(grid, Functional::I, ds.k, |z| ff.indicator(z)))
}

/// `I_far`: needs only `u_sc`.
pub fn imaging_i_far(ds: &CauchyDataset, grid: &SamplingGrid, xhat_count: usize) -> Result<IndicatorImage> {
    let ff = extract_far_field_impedance(ds, &default_xhats(xhat_count))?;
    Ok(image_from(grid, Functional::IFar, ds.k, |z| ff.indicator(z)))
}

/// `I(z)` summed in the opposite order: data contracted with `phi_z` over `d`
/// first, then the boundary integral, then the `xhat` sum.
pub fn indicator_i_direct(ds: &CauchyDataset, xhats: &[Direction2], z: Point2) -> Result<f64> {
    let du = normal_data(ds, true)?;
    let wd = ds.direction_weight();
    let phi: Vec<C64> = ds.directions().iter().map(|d| phi_test(z, *d, ds.k) * wd).collect();
    let contract = |m: &CMatrix, j: usize| -> C64 { m.row(j).iter().zip(&phi).map(|(a, b)| a * b).sum() };
    let rx = ds.circle.receivers();
    let g: Vec<(C64, C64)> = (0..rx.len()).map(|j| (contract(&ds.u, j), contract(&du, j))).collect();
    let w = ds.circle.weight();
    let total: f64 = xhats
        .iter()
        .map(|xh| {
            let s: C64 = rx
                .iter()
                .zip(&g)
                .map(|((y, nu), (gu, gdu))| {
                    let (phi, dphi) = far_field_green2(*xh, *y, *nu, ds.k);
                    gu * dphi - gdu * phi
                })
                .sum();
            (s * w).norm_sqr()
        })
        .sum();
    Ok(total * std::f64::consts::TAU / xhats.len() as f64)
}

/// Pointwise evaluator for `I2` and `I2_far`.
#[derive(Debug, Clone)]
pub struct I2Evaluator<'a> {
    ds: &'a CauchyDataset,
    du: CMatrix,
    receivers: Vec<(Point2, Direction2)>,
}

impl<'a> I2Evaluator<'a> {
    /// `exact = false` selects the `ik u_sc` substitution.
    pub fn new(ds: &'a CauchyDataset, exact: bool) -> Result<Self> {
        Ok(Self { ds, du: normal_data(ds, exact)?, receivers: ds.circle.receivers() })
    }

    /// Boundary integral `int dImPhi/dnu u_sc - ImPhi du_sc/dnu` for every direction.
    pub fn boundary_terms(&self, z: Point2) -> Vec<C64> {
        let k = self.ds.k;
        let kern: Vec<(f64, f64)> = self.receivers.iter().map(|(x, nu)| imag_green_pair(*x, *nu, z, k)).collect();
        let w = self.ds.circle.weight();
        (0..self.ds.n_directions())
            .map(|l| {
                let s: C64 = kern
                    .iter()
                    .enumerate()
                    .map(|(j, (g, dg))| self.ds.u.get(j, l) * dg - self.du.get(j, l) * g)
                    .sum();
                s * w
            })
            .collect()
    }

    pub fn value(&self, z: Point2) -> f64 {
        self.boundary_terms(z).iter().map(|t| t.norm_sqr()).sum::<f64>() * self.ds.direction_weight()
    }
}

pub fn imaging_i2(ds: &CauchyDataset, grid: &SamplingGrid) -> Result<IndicatorImage> {
    let ev = I2Evaluator::new(ds, true)?;
    Ok(image_from(grid, Functional::I2, ds.k, |z| ev.value(z)))
}

/// `I2_far`: needs only `u_sc`.
pub fn imaging_i2_far(ds: &CauchyDataset, grid: &SamplingGrid) -> Result<IndicatorImage> {
    let ev = I2Evaluator::new(ds, false)?;
    Ok(image_from(grid, Functional::I2Far, ds.k, |z| ev.value(z)))
}

/// Dispatches on the functional; `xhat_count` is ignored by the `I2` family.
pub fn compute(ds: &CauchyDataset, grid: &SamplingGrid, functional: Functional, xhat_count: usize) -> Result<IndicatorImage> {
    match functional {
        Functional::I => imaging_i(ds, grid, xhat_count),
        Functional::IFar => imaging_i_far(ds, grid, xhat_count),
        Functional::I2 => imaging_i2(ds, grid),
        Functional::I2Far => imaging_i2_far(ds, grid),
    }
}

/// `||u_sc||^2 + ||du_sc/dnu||^2` over receivers x directions.
fn data_energy(ds: &CauchyDataset) -> Result<f64> {
    let du = ds.du.as_ref().ok_or(Error::MissingDerivative)?;
    let w = ds.circle.weight() * ds.direction_weight();
    Ok(w * (ds.u.frobenius().powi(2) + du.frobenius().powi(2)))
}

/// Constant `C` of the noise bound `I - I^delta <= C (2 delta + delta^2)`:
/// `|S|^2 (||Phi_inf||^2 + ||dPhi_inf/dnu||^2) (||u_sc||^2 + ||du_sc/dnu||^2)`,
/// all norms over receivers x observation directions with the imaging quadratures.
pub fn stability_constant_i(ds: &CauchyDataset, xhats: &[Direction2]) -> Result<f64> {
    let rx = ds.circle.receivers();
    let green: f64 = xhats
        .iter()
        .flat_map(|xh| {
            rx.iter().map(|(y, nu)| {
                let (p, dp) = far_field_green2(*xh, *y, *nu, ds.k);
                p.norm_sqr() + dp.norm_sqr()
            })
        })
        .sum::<f64>()
        * ds.circle.weight()
        * std::f64::consts::TAU
        / xhats.len() as f64;
    let s = ds.direction_aperture.length();
    Ok(s * s * green * data_energy(ds)?)
}

/// Pointwise constant of the same bound for `I2` at `z`:
/// `|S| (||ImPhi(., z)||^2 + ||dImPhi(., z)/dnu||^2) (||u_sc||^2 + ||du_sc/dnu||^2)`.
pub fn stability_constant_i2(ds: &CauchyDataset, z: Point2) -> Result<f64> {
    let green: f64 = ds
        .circle
        .receivers()
        .iter()
        .map(|(x, nu)| {
            let (g, dg) = imag_green_pair(*x, *nu, z, ds.k);
            g * g + dg * dg
        })
        .sum::<f64>()
        * ds.circle.weight();
    Ok(ds.direction_aperture.length() * green * data_energy(ds)?)
}

/// `2 delta + delta^2`, the noise factor of both stability bounds.
pub fn noise_factor(delta: f64) -> f64 {
    2.0 * delta + delta * delta
}
