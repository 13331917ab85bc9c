//! The gap between clean and noisy images against the explicit stability bound.

use osm::data::{add_noise, synthesize, NoiseSpec};
use osm::forward::VolumeGrid;
use osm::geometry::{Aperture, ContrastMap, MeasurementCircle, Point2};
use osm::imaging::{default_xhats, extract_far_field, noise_factor, stability_constant_i};

fn main() -> osm::Result<()> {
    let clean = synthesize(&ContrastMap::kite(), 8.0, MeasurementCircle::full(3.0, 64)?, 64, Aperture::FULL, VolumeGrid::default_with(96))?;
    let xh = default_xhats(64);
    let c = stability_constant_i(&clean, &xh)?;
    let ff = extract_far_field(&clean, &xh)?;
    let probes = [Point2::new(0.0, 0.0), Point2::new(-0.3, 0.2), Point2::new(1.5, 1.5)];
    for delta in [0.1, 0.3, 0.6, 0.9] {
        let mut worst: f64 = 0.0;
        for seed in 0..10 {
            let noisy = extract_far_field(&add_noise(&clean, NoiseSpec::new(delta, seed)?)?, &xh)?;
            for z in probes {
                worst = worst.max((ff.indicator(z) - noisy.indicator(z)).abs());
            }
        }
        println!("delta = {delta}: worst |I - I_delta| = {worst:.4}, bound = {:.4e}", c * noise_factor(delta));
    }
    Ok(())
}
