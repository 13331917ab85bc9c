//! Solve the Lippmann-Schwinger equation for a homogeneous disk and compare
//! the scattered and far fields with the closed-form series solution.

use std::time::Instant;

use num_complex::Complex64 as C64;
use osm::forward::{solve_forward, DiskSeries, VolumeGrid};
use osm::geometry::{ContrastMap, Direction2, MeasurementCircle, Point2};

fn main() -> osm::Result<()> {
    let (eta, radius, k) = (C64::new(0.5, 0.0), 0.4, 4.0);
    let map = ContrastMap::disk(Point2::ORIGIN, radius, eta)?;
    let series = DiskSeries::new(eta, radius, k);
    let d = Direction2::from_angle(0.0);

    for m in [32, 64, 96, 128] {
        let start = Instant::now();
        let sol = solve_forward(&map, d, k, VolumeGrid::default_with(m))?;
        let secs = start.elapsed().as_secs_f64();
        let (mut num, mut den, mut ff_num, mut ff_den) = (0.0, 0.0, 0.0, 0.0);
        for (x, nu) in MeasurementCircle::full(3.0, 16)?.receivers() {
            num += (sol.scattered_at(x)? - series.scattered(x, d)).norm_sqr();
            den += series.scattered(x, d).norm_sqr();
            ff_num += (sol.farfield_at(nu) - series.far_field(nu, d)).norm_sqr();
            ff_den += series.far_field(nu, d).norm_sqr();
        }
        println!(
            "m = {m:>3}: {:>3} GMRES iterations, residual {:.1e}, near field error {:.2e}, far field error {:.2e} ({secs:.2}s)",
            sol.iterations,
            sol.residual,
            (num / den).sqrt(),
            (ff_num / ff_den).sqrt()
        );
    }
    Ok(())
}
