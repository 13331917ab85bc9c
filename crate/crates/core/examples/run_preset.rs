//! Drive the batch runner from a preset, as `osm preset` does, on a reduced grid.

use osm::cli::{preset, preset_names, run};

fn main() -> osm::Result<()> {
    println!("available presets: {}", preset_names().join(", "));
    let out = std::env::temp_dir().join("osm-preset-example");
    let cfg = preset("fig2-square_cavity-d60")?.with_overrides(&[
        "grid_n1=48".to_string(),
        "grid_n2=48".to_string(),
        "formats=csv, pgm".to_string(),
        format!("output_dir={}", out.display()),
        format!("cache_dir={}", out.join("cache").display()),
    ])?;
    print!("{}", cfg.to_text());
    for pass in 1..=2 {
        let report = run(&cfg)?;
        println!(
            "pass {pass}: dataset from cache: {}, {} images, {:.1}s total",
            report.dataset.cache_hit,
            report.images.len(),
            report.total_seconds
        );
    }
    println!("report written to {}", out.join("report.json").display());
    Ok(())
}
