//! With receivers far away, the variants that only use the scattered field
//! reproduce the images computed from full Cauchy data.

use osm::data::{synthesize, CauchyDataset};
use osm::forward::VolumeGrid;
use osm::geometry::{Aperture, ContrastMap, MeasurementCircle, SamplingGrid};
use osm::imaging::{compute, normalize, Functional};

fn max_gap(ds: &CauchyDataset, grid: &SamplingGrid, a: Functional, b: Functional) -> osm::Result<f64> {
    let ia = normalize(&compute(ds, grid, a, 64)?)?;
    let ib = normalize(&compute(ds, grid, b, 64)?)?;
    Ok(ia.values.iter().zip(&ib.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

fn main() -> osm::Result<()> {
    let map = ContrastMap::disk_rectangle();
    let grid = SamplingGrid::square(2.0, 64)?;
    for radius in [3.0, 10.0, 100.0] {
        let ds = synthesize(&map, 8.0, MeasurementCircle::full(radius, 64)?, 64, Aperture::FULL, VolumeGrid::default_with(96))?;
        // Only U is needed by the far variants.
        let scattered = ds.scattered_only();
        let gap_i = max_gap(&ds, &grid, Functional::I, Functional::IFar)?;
        let gap_i2 = max_gap(&ds, &grid, Functional::I2, Functional::I2Far)?;
        let far_only = compute(&scattered, &grid, Functional::IFar, 64).is_ok();
        println!("R = {radius:>5}: max |I - I_far| = {gap_i:.4}, max |I2 - I2_far| = {gap_i2:.4}, I_far from U alone: {far_only}");
    }
    Ok(())
}
