//! Quick oracle checks run by `osm validate`.

use std::f64::consts::{FRAC_2_PI, TAU};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::data::{self, sample_cauchy, CauchyDataset, NoiseSpec};
use crate::error::Result;
use crate::forward::{solve_many, DiskSeries, GmresConfig, VolumeGrid};
use crate::geometry::{incident_directions, Aperture, ContrastMap, MeasurementCircle, Point2};
use crate::imaging::{default_xhats, extract_far_field, I2Evaluator};
use crate::specfun;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self { name, value, tolerance, passed: value < tolerance }
    }
}

fn rel_l2(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Special functions, forward solver, far-field extraction, the `I2` identity and noise scaling.
pub fn oracle_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();

    out.push(Check::new("J0 vanishes at its first root", specfun::bessel_j0(2.404825557695773)?.abs(), 1e-10));
    let x = 3.7;
    let wronskian = specfun::bessel_j1(x)? * specfun::bessel_y0(x)? - specfun::bessel_j0(x)? * specfun::bessel_y1(x)?;
    out.push(Check::new("Bessel Wronskian", (wronskian - FRAC_2_PI / x).abs(), 1e-12));

    let eta = C64::new(0.5, 0.0);
    let radius = 0.4;
    let k = 4.0;
    let map = ContrastMap::disk(Point2::ORIGIN, radius, eta)?;
    let series = DiskSeries::new(eta, radius, k);
    let dirs = incident_directions(8, Aperture::FULL);
    let sols = solve_many(&map, &dirs, k, VolumeGrid::default_with(96), &GmresConfig::default())?;

    let rx = MeasurementCircle::full(3.0, 16)?;
    let (mut num, mut exact) = (Vec::new(), Vec::new());
    for (x, _) in rx.receivers() {
        num.push(sols[0].scattered_at(x)?);
        exact.push(series.scattered(x, dirs[0]));
    }
    out.push(Check::new("disk scattered field vs series", rel_l2(&num, &exact), 1e-2));

    let circle = MeasurementCircle::full(3.0, 64)?;
    let (u, du) = sample_cauchy(&sols, &circle)?;
    let ds = CauchyDataset::new(k, circle, Aperture::FULL, u, Some(du))?;
    let xh = default_xhats(16);
    let ff = extract_far_field(&ds, &xh)?;
    let (mut num, mut exact) = (Vec::new(), Vec::new());
    for (i, x) in xh.iter().enumerate() {
        for (l, d) in dirs.iter().enumerate() {
            num.push(ff.values.get(i, l));
            exact.push(series.far_field(*x, *d));
        }
    }
    out.push(Check::new("far field from Cauchy data vs series", rel_l2(&num, &exact), 1.5e-2));

    let ev = I2Evaluator::new(&ds, true)?;
    let worst = (0..5)
        .map(|i| {
            let (r, t) = (1.5 * i as f64 / 4.0, TAU * i as f64 / 5.0);
            let z = Point2::new(r * t.cos(), r * t.sin());
            let boundary = ev.value(z);
            let volume: f64 = sols.iter().map(|s| s.imag_green_potential(z).norm_sqr()).sum::<f64>() * ds.direction_weight();
            (boundary - volume).abs() / volume
        })
        .fold(0.0, f64::max);
    out.push(Check::new("I2 boundary vs volume form", worst, 1e-2));

    let noisy = data::add_noise(&ds, NoiseSpec::new(0.6, 1)?)?;
    out.push(Check::new("noise level exactness", (data::achieved_noise(&ds, &noisy) - 0.6).abs(), 1e-13));
    Ok(out)
}
