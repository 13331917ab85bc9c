//! Synthesize a noisy Cauchy dataset for the kite and write it in both file formats.

use osm::data::{achieved_noise, add_noise, load, load_csv, save, save_csv, synthesize_with, NoiseSpec};
use osm::forward::{GmresConfig, VolumeGrid};
use osm::geometry::{Aperture, ContrastMap, MeasurementCircle};

fn main() -> osm::Result<()> {
    let circle = MeasurementCircle::full(3.0, 64)?;
    let (clean, stats) =
        synthesize_with(&ContrastMap::kite(), 8.0, circle, 64, Aperture::FULL, VolumeGrid::default_with(96), &GmresConfig::default())?;
    let worst = stats.iter().map(|s| s.iterations).max().unwrap_or(0);
    println!("{} x {} dataset, at most {worst} GMRES iterations per direction", clean.n_receivers(), clean.n_directions());
    println!("|U|_F = {:.4}, |dU|_F = {:.4}", clean.u.frobenius(), clean.du.as_ref().map_or(0.0, |m| m.frobenius()));

    let noisy = add_noise(&clean, NoiseSpec::new(0.3, 7)?)?;
    println!("relative noise on U: {:.15}", achieved_noise(&clean, &noisy));

    let dir = std::env::temp_dir().join("osm-synthesize-example");
    std::fs::create_dir_all(&dir)?;
    let (bin, csv) = (dir.join("kite.osmd"), dir.join("kite.csv"));
    save(&noisy, &bin)?;
    save_csv(&noisy, &csv)?;
    println!("binary round trip exact: {}", load(&bin)? == noisy);
    let back = load_csv(&csv)?;
    let err = back.u.sub(&noisy.u).frobenius() / noisy.u.frobenius();
    println!("csv round trip relative error: {err:.1e}");
    println!("wrote {} and {}", bin.display(), csv.display());
    Ok(())
}
