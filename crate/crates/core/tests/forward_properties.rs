//! Forward-solver and data-synthesis properties checked against the disk
//! series and against the solver's own asymptotics.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use osm::data::{add_noise, achieved_noise, synthesize, NoiseSpec};
use osm::forward::{solve_forward, solve_many, DiskSeries, GmresConfig, VolumeGrid};
use osm::geometry::{incident_directions, Aperture, ContrastMap, Direction2, MeasurementCircle, Point2};
use osm::imaging::{default_xhats, extract_far_field};

const ETA: f64 = 0.5;
const RADIUS: f64 = 0.4;

fn disk() -> ContrastMap {
    ContrastMap::disk(Point2::ORIGIN, RADIUS, C64::new(ETA, 0.0)).unwrap()
}

fn rel_l2(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

#[test]
fn grid_refinement_reduces_error_monotonically() {
    let k = 4.0;
    let d = Direction2::from_angle(0.0);
    let series = DiskSeries::new(C64::new(ETA, 0.0), RADIUS, k);
    let probes: Vec<Point2> = MeasurementCircle::full(3.0, 16).unwrap().receivers().into_iter().map(|(x, _)| x).collect();
    let exact: Vec<C64> = probes.iter().map(|x| series.scattered(*x, d)).collect();
    let errors: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&m| {
            let sol = solve_forward(&disk(), d, k, VolumeGrid::default_with(m)).unwrap();
            let num: Vec<C64> = probes.iter().map(|x| sol.scattered_at(*x).unwrap()).collect();
            rel_l2(&num, &exact)
        })
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn exterior_field_asymptotics() {
    let k = 4.0;
    let sol = solve_forward(&disk(), Direction2::from_angle(0.3), k, VolumeGrid::default_with(64)).unwrap();
    let xh = Direction2::from_angle(1.1);

    let (a, b) = (sol.scattered_at(xh.as_point().scale(100.0)).unwrap(), sol.scattered_at(xh.as_point().scale(200.0)).unwrap());
    let ratio = a.norm() / b.norm();
    assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.05, "decay ratio {ratio}");

    let x = xh.as_point().scale(100.0);
    let du = sol.scattered_normal_at(x, xh).unwrap();
    let imp = C64::i() * k * sol.scattered_at(x).unwrap();
    assert!((du - imp).norm() / du.norm() < 0.02);

    let r = 1000.0;
    let near = sol.scattered_at(xh.as_point().scale(r)).unwrap();
    let far = sol.farfield_at(xh) * C64::from_polar(1.0, k * r) / r.sqrt();
    assert!((near - far).norm() / far.norm() < 0.01);
}

#[test]
fn normal_derivative_matches_finite_difference() {
    let k = 8.0;
    let sol = solve_forward(&ContrastMap::kite(), Direction2::from_angle(2.0), k, VolumeGrid::default_with(48)).unwrap();
    let step = 1e-4 * TAU / k;
    for (x, nu) in MeasurementCircle::full(3.0, 7).unwrap().receivers() {
        let fd = (sol.scattered_at(x + nu.as_point().scale(step)).unwrap() - sol.scattered_at(x - nu.as_point().scale(step)).unwrap())
            / (2.0 * step);
        let du = sol.scattered_normal_at(x, nu).unwrap();
        assert!((fd - du).norm() / du.norm() < 1e-4);
    }
}

#[test]
fn solver_far_field_matches_series_and_is_reciprocal() {
    let k = 4.0;
    let dirs = incident_directions(8, Aperture::FULL);
    let sols = solve_many(&disk(), &dirs, k, VolumeGrid::default_with(96), &GmresConfig::default()).unwrap();
    let series = DiskSeries::new(C64::new(ETA, 0.0), RADIUS, k);
    let (mut num, mut exact) = (Vec::new(), Vec::new());
    let mut table = vec![vec![C64::new(0.0, 0.0); dirs.len()]; dirs.len()];
    for (l, sol) in sols.iter().enumerate() {
        for (i, xh) in dirs.iter().enumerate() {
            table[i][l] = sol.farfield_at(*xh);
            num.push(table[i][l]);
            exact.push(series.far_field(*xh, dirs[l]));
        }
    }
    assert!(rel_l2(&num, &exact) < 0.01);

    // u(xh, d) = u(-d, -xh); with 8 equispaced directions, -dirs[j] = dirs[(j + 4) % 8].
    let scale = num.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let n = dirs.len();
    for i in 0..n {
        for l in 0..n {
            let gap = (table[i][l] - table[(l + n / 2) % n][(i + n / 2) % n]).norm();
            assert!(gap <= 10.0 * GmresConfig::default().tol * scale, "({i},{l}) gap {gap:e}");
        }
    }

    // Lossless medium: no negative extinction.
    for (l, sol) in sols.iter().enumerate() {
        assert!(sol.farfield_at(dirs[l]).im / scale >= -1e-6);
    }
}

#[test]
fn synthesized_disk_data_matches_series() {
    let k = 4.0;
    let circle = MeasurementCircle::full(3.0, 32).unwrap();
    let ds = synthesize(&disk(), k, circle, 8, Aperture::FULL, VolumeGrid::default_with(96)).unwrap();
    let series = DiskSeries::new(C64::new(ETA, 0.0), RADIUS, k);
    for (l, d) in ds.directions().iter().enumerate() {
        let col: Vec<C64> = (0..ds.n_receivers()).map(|j| ds.u.get(j, l)).collect();
        let exact: Vec<C64> = circle.receivers().iter().map(|(x, _)| series.scattered(*x, *d)).collect();
        assert!(rel_l2(&col, &exact) < 0.01);
    }
}

#[test]
fn kite_dataset_shape_and_extracted_reciprocity() {
    let k = 8.0;
    let ds = synthesize(&ContrastMap::kite(), k, MeasurementCircle::full(3.0, 64).unwrap(), 64, Aperture::FULL, VolumeGrid::default_with(96))
        .unwrap();
    assert_eq!((ds.u.rows(), ds.u.cols()), (64, 64));
    assert!(ds.du.as_ref().is_some_and(|du| du.rows() == 64 && du.cols() == 64));

    let ff = extract_far_field(&ds, &default_xhats(64)).unwrap();
    let n = 64;
    let scale = ff.values.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in (0..n).step_by(8) {
        for l in (0..n).step_by(8) {
            let gap = (ff.values.get(i, l) - ff.values.get((l + n / 2) % n, (i + n / 2) % n)).norm();
            assert!(gap <= 10.0 * GmresConfig::default().tol * scale, "({i},{l}) gap {gap:e}");
        }
    }
}

#[test]
fn noise_level_is_exact_for_every_seed() {
    let ds = synthesize(&disk(), 4.0, MeasurementCircle::full(3.0, 16).unwrap(), 8, Aperture::FULL, VolumeGrid::default_with(32)).unwrap();
    let levels: Vec<f64> = (0..100).map(|s| achieved_noise(&ds, &add_noise(&ds, NoiseSpec::new(0.3, s).unwrap()).unwrap())).collect();
    let mean = levels.iter().sum::<f64>() / levels.len() as f64;
    assert!((mean - 0.3).abs() < 1e-13);
    assert!(levels.iter().all(|v| (v - 0.3).abs() < 1e-13));
}
