//! Imaging with incident directions and receivers restricted to the lower half circle.

use std::f64::consts::{PI, TAU};

use osm::data::{add_noise, synthesize, NoiseSpec};
use osm::forward::VolumeGrid;
use osm::geometry::{Aperture, ContrastMap, MeasurementCircle, SamplingGrid};
use osm::imaging::{compute, normalize, Functional};

fn main() -> osm::Result<()> {
    let lower = Aperture::new(PI, TAU)?;
    let grid = SamplingGrid::square(2.0, 64)?;
    for name in ["kite", "disk_rectangle", "square_cavity"] {
        let map = ContrastMap::by_name(name)?;
        let clean = synthesize(&map, 8.0, MeasurementCircle::new(3.0, 32, lower)?, 32, lower, VolumeGrid::default_with(96))?;
        let noisy = add_noise(&clean, NoiseSpec::new(0.3, 0)?)?;
        for f in [Functional::I, Functional::I2] {
            let img = normalize(&compute(&noisy, &grid, f, 64)?)?;
            let (mut inside, mut ni, mut upper, mut nu) = (0.0, 0, 0.0, 0);
            for (i, z) in grid.points().iter().enumerate() {
                if map.support_contains(*z) {
                    inside += img.values[i];
                    ni += 1;
                } else if z.x2 > 1.5 {
                    upper += img.values[i];
                    nu += 1;
                }
            }
            println!(
                "{name:>15} {f:>3}: mean inside {:.3}, mean near the unilluminated top edge {:.3}, peak at {:?}",
                inside / ni as f64,
                upper / nu as f64,
                img.argmax()
            );
        }
    }
    Ok(())
}
