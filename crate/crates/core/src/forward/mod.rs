//! Direct scattering by a penetrable medium through the Lippmann-Schwinger
//! equation `u - k^2 int Phi(., y) eta(y) u(y) dy = u_in`.
//!
//! The volume integral is discretized by a Nystrom rule on the cell centers of
//! a uniform `m x m` grid. The self-cell uses the exact integral of `Phi` over
//! the equal-area disk of radius `h / sqrt(pi)`. Because the kernel only
//! depends on `x - y`, the operator is applied as a zero-padded FFT
//! convolution, and the system is solved with restarted GMRES.

pub mod disk_series;
pub mod gmres;

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, ContrastMap, Direction2, Point2, DEFAULT_BOX};
use crate::specfun;

pub use disk_series::{disk_series_oracle, DiskSeries};
pub use gmres::{GmresConfig, GmresOutcome};

/// Default number of cells per side of the solver grid.
pub const DEFAULT_CELLS: usize = 96;

/// 2D free-space Green's function `(i/4) H0(k|x - y|)`.
pub fn green(x: Point2, y: Point2, k: f64) -> Result<C64> {
    let r = x.dist(y);
    if r == 0.0 {
        return Err(Error::Singularity);
    }
    Ok(C64::new(0.0, 0.25) * specfun::hankel1_0(k * r)?)
}

/// Normal derivative of [`green`] in the first argument along `nu`.
pub fn green_normal_derivative(x: Point2, nu: Direction2, y: Point2, k: f64) -> Result<C64> {
    let diff = x - y;
    let r = diff.norm();
    if r == 0.0 {
        return Err(Error::Singularity);
    }
    let h1 = specfun::hankel1_1(k * r)?;
    Ok(C64::new(0.0, -0.25 * k) * h1 * (nu.dot(diff) / r))
}

/// `(Phi, dPhi/dnu)` sharing one Hankel evaluation; no singularity check.
fn green_pair(x: Point2, nu: Direction2, y: Point2, k: f64) -> (C64, C64) {
    let diff = x - y;
    let r = diff.norm();
    let (j0, j1, y0, y1) = specfun::jy_unchecked(k * r);
    let g = C64::new(-0.25 * y0, 0.25 * j0);
    let dg = C64::new(0.25 * k * y1, -0.25 * k * j1) * (nu.dot(diff) / r);
    (g, dg)
}

/// Integral of `Phi(x, .)` over the disk of radius `rho` centered at `x`.
pub fn self_cell_integral(rho: f64, k: f64) -> C64 {
    let h1 = specfun::hankel1_1(k * rho).expect("positive radius");
    C64::new(0.0, std::f64::consts::FRAC_PI_2)
        * (h1 * (rho / k) + C64::new(0.0, 2.0 / (std::f64::consts::PI * k * k)))
}

/// Uniform square grid of cells covering a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeGrid {
    lo: Point2,
    m: usize,
    h: f64,
}

impl VolumeGrid {
    pub fn new(bbox: BoundingBox, m: usize) -> Result<Self> {
        let w1 = bbox.x1.1 - bbox.x1.0;
        let w2 = bbox.x2.1 - bbox.x2.0;
        if m < 2 {
            return Err(Error::config("solver_cells", "need at least 2 cells per side"));
        }
        if !(w1 > 0.0) || (w1 - w2).abs() > 1e-12 * w1 {
            return Err(Error::config("solver_box", "solver box must be a non-empty square"));
        }
        Ok(Self { lo: Point2::new(bbox.x1.0, bbox.x2.0), m, h: w1 / m as f64 })
    }

    /// `m x m` cells over the default box `(-1.2, 1.2)^2`.
    pub fn default_with(m: usize) -> Self {
        Self::new(DEFAULT_BOX, m).expect("default box is square")
    }

    pub fn cells_per_side(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m * self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn bbox(&self) -> BoundingBox {
        let w = self.h * self.m as f64;
        BoundingBox { x1: (self.lo.x1, self.lo.x1 + w), x2: (self.lo.x2, self.lo.x2 + w) }
    }

    /// Center of cell `i1 + m * i2`.
    pub fn center(&self, index: usize) -> Point2 {
        let (i1, i2) = (index % self.m, index / self.m);
        Point2::new(
            self.lo.x1 + (i1 as f64 + 0.5) * self.h,
            self.lo.x2 + (i2 as f64 + 0.5) * self.h,
        )
    }

    pub fn centers(&self) -> Vec<Point2> {
        (0..self.len()).map(|i| self.center(i)).collect()
    }
}

/// Discretized `I - K` with `(K u)(x) = k^2 int Phi(x, y) eta(y) u(y) dy`.
pub struct LsOperator {
    grid: VolumeGrid,
    k: f64,
    eta: Vec<C64>,
    support: Vec<usize>,
    padded: usize,
    kernel_hat: Vec<C64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for LsOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LsOperator")
            .field("grid", &self.grid)
            .field("k", &self.k)
            .field("support_cells", &self.support.len())
            .finish()
    }
}

/// Builds the discrete Lippmann-Schwinger operator.
pub fn assemble_ls_system(map: &ContrastMap, grid: VolumeGrid, k: f64) -> Result<LsOperator> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::config("k", "wavenumber must be positive"));
    }
    let gb = grid.bbox();
    let mb = map.bbox();
    let covered = gb.x1.0 <= mb.x1.0 + 1e-12
        && gb.x1.1 >= mb.x1.1 - 1e-12
        && gb.x2.0 <= mb.x2.0 + 1e-12
        && gb.x2.1 >= mb.x2.1 - 1e-12;
    if !covered && !map.is_empty() {
        return Err(Error::config("solver_box", "solver grid does not cover the contrast support"));
    }
    let wavelength = 2.0 * std::f64::consts::PI / k;
    if grid.spacing() > wavelength / 10.0 {
        log::warn!(
            "solver grid spacing {:.4} exceeds a tenth of the wavelength {:.4}",
            grid.spacing(),
            wavelength
        );
    }

    let eta = cell_averaged_contrast(map, grid);
    let support = eta
        .iter()
        .enumerate()
        .filter(|(_, e)| **e != C64::new(0.0, 0.0))
        .map(|(i, _)| i)
        .collect();
    LsOperator::from_samples(grid, k, eta, support)
}

/// Sub-samples per axis in cells cut by a material interface.
pub const INTERFACE_SUBSAMPLES: usize = 16;

/// Cell-averaged contrast. Cells whose corners and center agree take that
/// value; cells cut by an interface are averaged over a sub-grid.
pub fn cell_averaged_contrast(map: &ContrastMap, grid: VolumeGrid) -> Vec<C64> {
    let m = grid.m;
    let h = grid.h;
    let corners: Vec<C64> = (0..(m + 1) * (m + 1))
        .into_par_iter()
        .map(|i| map.eval(Point2::new(grid.lo.x1 + (i % (m + 1)) as f64 * h, grid.lo.x2 + (i / (m + 1)) as f64 * h)))
        .collect();
    (0..m * m)
        .into_par_iter()
        .map(|i| {
            let (i1, i2) = (i % m, i / m);
            let c = map.eval(grid.center(i));
            let corner = |a: usize, b: usize| corners[(i2 + b) * (m + 1) + i1 + a];
            if [corner(0, 0), corner(1, 0), corner(0, 1), corner(1, 1)].iter().all(|v| *v == c) {
                return c;
            }
            let s = INTERFACE_SUBSAMPLES;
            let lo = grid.center(i) - Point2::new(0.5 * h, 0.5 * h);
            let mut sum = C64::new(0.0, 0.0);
            for b in 0..s {
                for a in 0..s {
                    let p = lo + Point2::new((a as f64 + 0.5) * h / s as f64, (b as f64 + 0.5) * h / s as f64);
                    sum += map.eval(p);
                }
            }
            sum / (s * s) as f64
        })
        .collect()
}

impl LsOperator {
    fn from_samples(grid: VolumeGrid, k: f64, eta: Vec<C64>, support: Vec<usize>) -> Result<Self> {
        let m = grid.m;
        let n = 2 * m;
        let h = grid.h;
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);

        let k2h2 = k * k * h * h;
        let self_term = k * k * self_cell_integral(h / std::f64::consts::PI.sqrt(), k);
        let mut kernel = vec![C64::new(0.0, 0.0); n * n];
        kernel.par_chunks_mut(n).enumerate().for_each(|(row, chunk)| {
            // Wrap-around offsets: index i <-> offset i for i < m, i - n otherwise.
            let off2 = if row < m { row as f64 } else if row > m { row as f64 - n as f64 } else { return };
            for (col, v) in chunk.iter_mut().enumerate() {
                let off1 = if col < m { col as f64 } else if col > m { col as f64 - n as f64 } else { continue };
                if row == 0 && col == 0 {
                    *v = self_term;
                } else {
                    let r = h * off1.hypot(off2);
                    let (j0, _, y0, _) = specfun::jy_unchecked(k * r);
                    *v = C64::new(-0.25 * y0, 0.25 * j0) * k2h2;
                }
            }
        });
        let mut op = Self { grid, k, eta, support, padded: n, kernel_hat: Vec::new(), fft, ifft };
        op.fft2(&mut kernel, true);
        op.kernel_hat = kernel;
        Ok(op)
    }

    pub fn grid(&self) -> VolumeGrid {
        self.grid
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    pub fn contrast_samples(&self) -> &[C64] {
        &self.eta
    }

    /// Indices of cells with non-zero contrast.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    fn fft2(&self, data: &mut [C64], forward: bool) {
        let n = self.padded;
        let plan = if forward { &self.fft } else { &self.ifft };
        plan.process(data);
        transpose_in_place(data, n);
        plan.process(data);
        transpose_in_place(data, n);
    }

    /// `K v` (the volume potential of `eta v`).
    pub fn apply_volume(&self, v: &[C64]) -> Vec<C64> {
        let m = self.grid.m;
        let n = self.padded;
        let mut buf = vec![C64::new(0.0, 0.0); n * n];
        for &i in &self.support {
            let (i1, i2) = (i % m, i / m);
            buf[i2 * n + i1] = self.eta[i] * v[i];
        }
        self.fft2(&mut buf, true);
        for (b, kh) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= kh;
        }
        self.fft2(&mut buf, false);
        let scale = 1.0 / (n * n) as f64;
        let mut out = vec![C64::new(0.0, 0.0); m * m];
        for i2 in 0..m {
            for i1 in 0..m {
                out[i2 * m + i1] = buf[i2 * n + i1] * scale;
            }
        }
        out
    }

    /// `(I - K) u`.
    pub fn apply(&self, u: &[C64]) -> Vec<C64> {
        if self.support.is_empty() {
            return u.to_vec();
        }
        let ku = self.apply_volume(u);
        u.iter().zip(&ku).map(|(a, b)| a - b).collect()
    }

    /// Incident plane wave `e^{ik x.d}` sampled at the cell centers.
    pub fn incident(&self, d: Direction2) -> Vec<C64> {
        self.grid
            .centers()
            .into_iter()
            .map(|p| C64::from_polar(1.0, self.k * d.dot(p)))
            .collect()
    }

    pub fn solve(&self, d: Direction2, cfg: &GmresConfig) -> Result<ForwardSolution> {
        let rhs = self.incident(d);
        let (u, iterations, residual) = if self.support.is_empty() {
            (rhs, 0, 0.0)
        } else {
            let out = gmres::gmres(|x| self.apply(x), &rhs, Some(rhs.clone()), cfg);
            if !out.converged {
                return Err(Error::NoConvergence { iterations: out.iterations, residual: out.residual });
            }
            (out.x, out.iterations, out.residual)
        };
        let h2 = self.grid.h * self.grid.h;
        let sources = self
            .support
            .iter()
            .map(|&i| Source { position: self.grid.center(i), weight: self.eta[i] * u[i] * h2 })
            .collect();
        Ok(ForwardSolution { k: self.k, direction: d, grid: self.grid, u, eta: self.eta.clone(), sources, iterations, residual })
    }
}

fn transpose_in_place(data: &mut [C64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Quadrature node of the volume potential: `eta(y_c) u(y_c) h^2` at `y_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub position: Point2,
    pub weight: C64,
}

/// Total field on the solver grid for one incident direction.
#[derive(Debug, Clone)]
pub struct ForwardSolution {
    pub k: f64,
    pub direction: Direction2,
    pub grid: VolumeGrid,
    /// Total field at the cell centers.
    pub u: Vec<C64>,
    /// Contrast at the cell centers.
    pub eta: Vec<C64>,
    sources: Vec<Source>,
    pub iterations: usize,
    /// Relative residual of the linear solve.
    pub residual: f64,
}

impl ForwardSolution {
    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    fn check_clearance(&self, x: Point2) -> Result<()> {
        let h = self.grid.h;
        if self.sources.iter().any(|s| s.position.dist(x) < h) {
            return Err(Error::Proximity([x.x1, x.x2]));
        }
        Ok(())
    }

    /// Scattered field `k^2 sum Phi(x, y_c) eta_c u_c h^2` at an exterior point.
    pub fn scattered_at(&self, x: Point2) -> Result<C64> {
        self.check_clearance(x)?;
        let k = self.k;
        let sum: C64 = self
            .sources
            .iter()
            .map(|s| {
                let (j0, _, y0, _) = specfun::jy_unchecked(k * x.dist(s.position));
                C64::new(-0.25 * y0, 0.25 * j0) * s.weight
            })
            .sum();
        Ok(sum * k * k)
    }

    /// Normal derivative of the scattered field along `nu` at `x`.
    pub fn scattered_normal_at(&self, x: Point2, nu: Direction2) -> Result<C64> {
        self.check_clearance(x)?;
        let k = self.k;
        let sum: C64 = self.sources.iter().map(|s| green_pair(x, nu, s.position, k).1 * s.weight).sum();
        Ok(sum * k * k)
    }

    /// `(u_sc, du_sc/dnu)` at `x` with one Bessel evaluation per source.
    pub fn cauchy_at(&self, x: Point2, nu: Direction2) -> Result<(C64, C64)> {
        self.check_clearance(x)?;
        let k2 = self.k * self.k;
        let (mut u, mut du) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for s in &self.sources {
            let (g, dg) = green_pair(x, nu, s.position, self.k);
            u += g * s.weight;
            du += dg * s.weight;
        }
        Ok((u * k2, du * k2))
    }

    /// Far-field pattern `k^2 gamma sum e^{-ik xhat.y_c} eta_c u_c h^2`.
    pub fn farfield_at(&self, xhat: Direction2) -> C64 {
        let k = self.k;
        let sum: C64 = self
            .sources
            .iter()
            .map(|s| C64::from_polar(1.0, -k * xhat.dot(s.position)) * s.weight)
            .sum();
        far_field_prefactor(k) * k * k * sum
    }

    /// Volume route of the imaging kernel: `k^2 sum (1/4) J0(k|y_c - z|) eta_c u_c h^2`.
    pub fn imag_green_potential(&self, z: Point2) -> C64 {
        let k = self.k;
        let sum: C64 = self
            .sources
            .iter()
            .map(|s| s.weight * (0.25 * specfun::j0_unchecked(k * s.position.dist(z))))
            .sum();
        sum * k * k
    }
}

/// `e^{i pi/4} / sqrt(8 pi k)`, the far-field amplitude of the Green's function.
pub fn far_field_prefactor(k: f64) -> C64 {
    C64::from_polar(1.0 / (8.0 * std::f64::consts::PI * k).sqrt(), std::f64::consts::FRAC_PI_4)
}

/// Solves for a single incident direction.
pub fn solve_forward(map: &ContrastMap, d: Direction2, k: f64, grid: VolumeGrid) -> Result<ForwardSolution> {
    assemble_ls_system(map, grid, k)?.solve(d, &GmresConfig::default())
}

/// Solves for many directions in parallel, sharing one operator.
pub fn solve_many(
    map: &ContrastMap,
    directions: &[Direction2],
    k: f64,
    grid: VolumeGrid,
    cfg: &GmresConfig,
) -> Result<Vec<ForwardSolution>> {
    let op = assemble_ls_system(map, grid, k)?;
    directions.par_iter().map(|d| op.solve(*d, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn green_values() {
        let x = Point2::new(0.3, -0.2);
        let y = Point2::new(1.1, 0.4);
        let g = green(x, y, 8.0).unwrap();
        assert!((g.im - 0.25 * specfun::bessel_j0(8.0).unwrap()).abs() < 1e-15);
        assert_eq!(g, green(y, x, 8.0).unwrap());
        // k = 1, |x-y| = 1: J0(1), Y0(1) from 30-digit references.
        let g = green(Point2::ORIGIN, Point2::new(1.0, 0.0), 1.0).unwrap();
        let (j0, y0) = (0.765_197_686_557_966_55, 0.088_256_964_215_676_958);
        assert!((g - c(0.0, 0.25) * c(j0, y0)).norm() < 1e-14);
        assert!(matches!(green(x, x, 1.0), Err(Error::Singularity)));
    }

    #[test]
    fn green_normal_derivative_checks() {
        let y = Point2::ORIGIN;
        let x = Point2::new(1.0, 0.0);
        let perp = Direction2::from_angle(std::f64::consts::FRAC_PI_2);
        assert!(green_normal_derivative(x, perp, y, 8.0).unwrap().norm() < 1e-15);

        let nu = Direction2::from_angle(0.4);
        let step = 1e-5;
        let xp = x + nu.as_point().scale(step);
        let xm = x - nu.as_point().scale(step);
        let fd = (green(xp, y, 8.0).unwrap() - green(xm, y, 8.0).unwrap()) / (2.0 * step);
        let an = green_normal_derivative(x, nu, y, 8.0).unwrap();
        assert!((fd - an).norm() < 1e-9, "{fd} vs {an}");

        // |Phi| decreases moving away from the source near the singularity.
        let out = Direction2::from_angle(0.0);
        let mut prev = f64::INFINITY;
        for i in 1..20 {
            let p = Point2::new(0.001 * i as f64, 0.0);
            let mag = green(p, y, 8.0).unwrap().norm();
            assert!(mag < prev);
            prev = mag;
            let dmag = (green(p, y, 8.0).unwrap().conj() * green_normal_derivative(p, out, y, 8.0).unwrap()).re;
            assert!(dmag < 0.0);
        }
    }

    #[test]
    fn self_cell_integral_matches_radial_quadrature() {
        let (rho, k) = (0.02, 8.0);
        // int_0^rho (i/4) H0(kr) 2 pi r dr by composite Gauss-Legendre on a graded mesh.
        let nodes = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
        let weights = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
        let mut sum = c(0.0, 0.0);
        let mut a = 0.0f64;
        let mut b: f64 = rho * 1e-12;
        while a < rho {
            let b2 = b.min(rho);
            for (t, w) in nodes.iter().zip(weights) {
                let r = 0.5 * (a + b2) + 0.5 * (b2 - a) * t;
                sum += c(0.0, 0.25) * specfun::hankel1_0(k * r).unwrap() * (2.0 * std::f64::consts::PI * r) * (0.5 * (b2 - a) * w);
            }
            a = b2;
            b = b2 * 2.0;
        }
        let exact = self_cell_integral(rho, k);
        assert!((sum - exact).norm() / exact.norm() < 1e-8, "{sum} vs {exact}");
    }

    #[test]
    fn empty_medium_is_identity() {
        let grid = VolumeGrid::default_with(24);
        let op = assemble_ls_system(&ContrastMap::empty(), grid, 4.0).unwrap();
        let d = Direction2::from_angle(0.7);
        let sol = op.solve(d, &GmresConfig::default()).unwrap();
        for (i, u) in sol.u.iter().enumerate() {
            let p = grid.center(i);
            assert_eq!(*u, C64::from_polar(1.0, 4.0 * d.dot(p)));
        }
        assert_eq!(sol.scattered_at(Point2::new(3.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(sol.scattered_normal_at(Point2::new(3.0, 0.0), d).unwrap(), c(0.0, 0.0));
        assert_eq!(sol.farfield_at(d), c(0.0, 0.0));
    }

    fn dense_reference(op: &LsOperator, v: &[C64]) -> Vec<C64> {
        let g = op.grid();
        let k = op.wavenumber();
        let h = g.spacing();
        let s = k * k * self_cell_integral(h / std::f64::consts::PI.sqrt(), k);
        (0..g.len())
            .map(|i| {
                op.support()
                    .iter()
                    .map(|&j| {
                        let q = op.contrast_samples()[j] * v[j];
                        if i == j {
                            s * q
                        } else {
                            k * k * h * h * green(g.center(i), g.center(j), k).unwrap() * q
                        }
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn fft_convolution_matches_dense_sum() {
        let grid = VolumeGrid::default_with(16);
        let map = ContrastMap::disk(Point2::new(0.1, -0.2), 0.7, c(0.5, 0.2)).unwrap();
        let op = assemble_ls_system(&map, grid, 5.0).unwrap();
        let v: Vec<C64> = (0..grid.len()).map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let fast = op.apply_volume(&v);
        let slow = dense_reference(&op, &v);
        let scale = slow.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn operator_is_linear_and_scales_with_contrast() {
        let grid = VolumeGrid::default_with(20);
        let map = ContrastMap::kite();
        let op = assemble_ls_system(&map, grid, 6.0).unwrap();
        let op2 = assemble_ls_system(&map.scaled_contrast(2.0), grid, 6.0).unwrap();
        let u: Vec<C64> = (0..grid.len()).map(|i| c((i as f64).sin(), 0.3)).collect();
        let v: Vec<C64> = (0..grid.len()).map(|i| c(0.1, (i as f64 * 0.5).cos())).collect();
        let (al, be) = (c(0.3, -1.2), c(2.0, 0.5));
        let comb: Vec<C64> = u.iter().zip(&v).map(|(a, b)| al * a + be * b).collect();
        let lhs = op.apply(&comb);
        let (au, av) = (op.apply(&u), op.apply(&v));
        for i in 0..grid.len() {
            assert!((lhs[i] - (al * au[i] + be * av[i])).norm() < 1e-13 * 10.0);
        }
        let (k1, k2) = (op.apply_volume(&u), op2.apply_volume(&u));
        for i in 0..grid.len() {
            assert!((k2[i] - 2.0 * k1[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn uncovered_support_is_rejected() {
        let small = VolumeGrid::new(BoundingBox::square(0.5), 16).unwrap();
        assert!(matches!(assemble_ls_system(&ContrastMap::kite(), small, 4.0), Err(Error::Config { .. })));
    }

    #[test]
    fn central_symmetry() {
        // Disk at the origin: u(x; -d) = u(-x; d) on the symmetric cell lattice.
        let grid = VolumeGrid::default_with(32);
        let map = ContrastMap::homogeneous(Shape::disk(Point2::ORIGIN, 0.5), c(0.8, 0.1)).unwrap();
        let op = assemble_ls_system(&map, grid, 6.0).unwrap();
        let cfg = GmresConfig { tol: 1e-11, ..GmresConfig::default() };
        let d = Direction2::from_angle(0.3);
        let a = op.solve(d, &cfg).unwrap();
        let b = op.solve(-d, &cfg).unwrap();
        let n = grid.len();
        let scale = a.u.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..n {
            assert!((a.u[i] - b.u[n - 1 - i]).norm() < 1e-8 * scale);
        }
    }

    #[test]
    fn residual_within_tolerance() {
        let grid = VolumeGrid::default_with(48);
        let sol = solve_forward(&ContrastMap::square_cavity(), Direction2::from_angle(1.0), 8.0, grid).unwrap();
        assert!(sol.residual <= 1e-8);
        let op = assemble_ls_system(&ContrastMap::square_cavity(), grid, 8.0).unwrap();
        let r = op.apply(&sol.u);
        let inc = op.incident(sol.direction);
        let num: f64 = r.iter().zip(&inc).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let den: f64 = inc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(num / den <= 1.0001e-8);
    }

    #[test]
    fn proximity_is_rejected() {
        let grid = VolumeGrid::default_with(32);
        let map = ContrastMap::disk(Point2::ORIGIN, 0.4, c(0.5, 0.0)).unwrap();
        let sol = solve_forward(&map, Direction2::from_angle(0.0), 4.0, grid).unwrap();
        assert!(matches!(sol.scattered_at(Point2::new(0.1, 0.0)), Err(Error::Proximity(_))));
        assert!(sol.scattered_at(Point2::new(1.0, 0.0)).is_ok());
    }
}
