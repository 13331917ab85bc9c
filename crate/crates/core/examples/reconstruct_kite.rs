//! Reconstruct the kite from noisy near-field data with `I` and `I2`, write
//! CSV and PGM images and print a coarse text rendering.

use osm::cli::export::{write_csv, write_pgm};
use osm::data::{add_noise, synthesize, NoiseSpec};
use osm::forward::VolumeGrid;
use osm::geometry::{Aperture, ContrastMap, MeasurementCircle, SamplingGrid};
use osm::imaging::{compute, normalize, Functional, IndicatorImage};

fn render(img: &IndicatorImage) {
    const SHADES: &[u8] = b" .:-=+*#%@";
    let g = &img.grid;
    for i2 in (0..g.n2).rev().step_by(3) {
        let row: String = (0..g.n1)
            .step_by(2)
            .map(|i1| SHADES[((img.value_at(i1, i2) * 9.0).round() as usize).min(9)] as char)
            .collect();
        println!("{row}");
    }
}

fn main() -> osm::Result<()> {
    let map = ContrastMap::kite();
    let clean = synthesize(&map, 8.0, MeasurementCircle::full(3.0, 64)?, 64, Aperture::FULL, VolumeGrid::default_with(96))?;
    let noisy = add_noise(&clean, NoiseSpec::new(0.3, 0)?)?;
    let grid = SamplingGrid::square(2.0, 96)?;
    let dir = std::env::temp_dir().join("osm-kite-example");
    std::fs::create_dir_all(&dir)?;
    for f in [Functional::I, Functional::I2] {
        let mut img = normalize(&compute(&noisy, &grid, f, 64)?)?;
        img.delta = 0.3;
        write_csv(&img, dir.join(format!("{f}.csv")))?;
        write_pgm(&img, dir.join(format!("{f}.pgm")))?;
        println!("\n{f}: peak at {:?}", img.argmax());
        render(&img);
    }
    println!("\nimages written to {}", dir.display());
    Ok(())
}
