//! Batch runner behind the `osm` binary: config in, images and a JSON report out.

pub mod config;
pub mod export;
pub mod validate;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::data::{self, CauchyDataset, NoiseSpec};
use crate::error::{Error, Result};
use crate::forward::{GmresConfig, VolumeGrid};
use crate::geometry::DEFAULT_BOX;
use crate::imaging::{self, IndicatorImage};

pub use config::{preset, preset_names, ExperimentConfig, Medium, OutputFormat};

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::Parse { .. } | Error::Schema { .. } => 2,
        Error::Io(_) => 1,
        _ => 3,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetReport {
    pub path: Option<PathBuf>,
    pub cache_hit: bool,
    pub seconds: f64,
    pub n_receivers: usize,
    pub n_directions: usize,
    /// Absent when the dataset came from the cache or a file.
    pub max_iterations: Option<usize>,
    pub max_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseReport {
    pub delta: f64,
    pub seed: u64,
    /// `|U_noisy - U|_F / |U|_F`.
    pub achieved: f64,
    pub achieved_normal_derivative: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImageReport {
    pub functional: String,
    pub seconds: f64,
    /// Maximum before normalization.
    pub max_value: f64,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub medium: String,
    pub k: f64,
    pub dataset: DatasetReport,
    pub noise: Option<NoiseReport>,
    pub images: Vec<ImageReport>,
    pub report_path: PathBuf,
    pub total_seconds: f64,
}

fn cache_path(cfg: &ExperimentConfig) -> Option<PathBuf> {
    let digest = Sha256::digest(cfg.dataset_key().as_bytes());
    let hex: String = digest.iter().take(12).map(|b| format!("{b:02x}")).collect();
    cfg.cache_dir.as_ref().map(|d| d.join(format!("{hex}.osmd")))
}

fn solver_grid(cfg: &ExperimentConfig) -> Result<VolumeGrid> {
    VolumeGrid::new(DEFAULT_BOX, cfg.solver_cells)
}

/// Clean dataset for `cfg`, from the cache when possible.
pub fn obtain_dataset(cfg: &ExperimentConfig) -> Result<(CauchyDataset, DatasetReport)> {
    let map = cfg.validate()?;
    let grid = solver_grid(cfg)?;
    let start = Instant::now();
    let cached = cache_path(cfg);
    if let Some(path) = cached.as_ref().filter(|p| p.exists()) {
        match data::load(path) {
            Ok(ds) => {
                log::info!("using cached dataset {}", path.display());
                let report = DatasetReport {
                    path: Some(path.clone()),
                    cache_hit: true,
                    seconds: start.elapsed().as_secs_f64(),
                    n_receivers: ds.n_receivers(),
                    n_directions: ds.n_directions(),
                    max_iterations: None,
                    max_residual: None,
                };
                return Ok((ds, report));
            }
            Err(e) => log::warn!("ignoring unreadable cache entry {}: {e}", path.display()),
        }
    }
    let (ds, stats) =
        data::synthesize_with(&map, cfg.k, cfg.circle, cfg.n_directions, cfg.direction_aperture, grid, &GmresConfig::default())?;
    if let Some(path) = &cached {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        data::save(&ds, path)?;
    }
    let report = DatasetReport {
        path: cached,
        cache_hit: false,
        seconds: start.elapsed().as_secs_f64(),
        n_receivers: ds.n_receivers(),
        n_directions: ds.n_directions(),
        max_iterations: stats.iter().map(|s| s.iterations).max(),
        max_residual: stats.iter().map(|s| s.residual).reduce(f64::max),
    };
    Ok((ds, report))
}

fn write_image(img: &IndicatorImage, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for fmt in &cfg.formats {
        let path = match fmt {
            OutputFormat::Csv => cfg.output_dir.join(format!("{}.csv", img.functional)),
            OutputFormat::Pgm => cfg.output_dir.join(format!("{}.pgm", img.functional)),
        };
        match fmt {
            OutputFormat::Csv => export::write_csv(img, &path)?,
            OutputFormat::Pgm => export::write_pgm(img, &path)?,
        }
        files.push(path);
    }
    Ok(files)
}

fn image_all(ds: &CauchyDataset, cfg: &ExperimentConfig) -> Result<(NoiseReport, Vec<ImageReport>)> {
    let spec = NoiseSpec::new(cfg.delta, cfg.seed)?;
    let noisy = data::add_noise(ds, spec)?;
    let noise = NoiseReport {
        delta: cfg.delta,
        seed: cfg.seed,
        achieved: data::achieved_noise(ds, &noisy),
        achieved_normal_derivative: match (&ds.du, &noisy.du) {
            (Some(a), Some(b)) if a.frobenius() > 0.0 => Some(b.sub(a).frobenius() / a.frobenius()),
            _ => None,
        },
    };
    let mut images = Vec::new();
    for &f in &cfg.functionals {
        let start = Instant::now();
        let mut img = imaging::compute(&noisy, &cfg.grid, f, cfg.xhat_count)?;
        img.delta = cfg.delta;
        let max_value = img.max();
        let img = imaging::normalize(&img)?;
        let files = write_image(&img, cfg)?;
        images.push(ImageReport { functional: f.name().into(), seconds: start.elapsed().as_secs_f64(), max_value, files });
    }
    Ok((noise, images))
}

fn finish(mut report: RunReport, cfg: &ExperimentConfig, start: Instant) -> Result<RunReport> {
    report.report_path = cfg.output_dir.join("report.json");
    report.total_seconds = start.elapsed().as_secs_f64();
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.into()))?;
    fs::write(&report.report_path, text + "\n")?;
    Ok(report)
}

fn empty_report(command: &str, cfg: &ExperimentConfig, dataset: DatasetReport) -> RunReport {
    RunReport {
        command: command.into(),
        medium: format!("{:?}", cfg.medium),
        k: cfg.k,
        dataset,
        noise: None,
        images: Vec::new(),
        report_path: PathBuf::new(),
        total_seconds: 0.0,
    }
}

/// Synthesis, noise and every requested functional.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir)?;
    let (ds, dataset) = obtain_dataset(cfg)?;
    let (noise, images) = image_all(&ds, cfg)?;
    let mut report = empty_report("run", cfg, dataset);
    report.noise = Some(noise);
    report.images = images;
    finish(report, cfg, start)
}

/// Writes the clean dataset as `dataset.osmd` and `dataset.csv` in the output directory.
pub fn synthesize(cfg: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir)?;
    let (ds, mut dataset) = obtain_dataset(cfg)?;
    let path = cfg.output_dir.join("dataset.osmd");
    data::save(&ds, &path)?;
    data::save_csv(&ds, cfg.output_dir.join("dataset.csv"))?;
    dataset.path = Some(path);
    finish(empty_report("synthesize", cfg, dataset), cfg, start)
}

/// Images a stored clean dataset; the config supplies grid, noise, functionals and outputs.
pub fn image(dataset_path: &Path, cfg: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    fs::create_dir_all(&cfg.output_dir)?;
    let ds = data::load(dataset_path)?;
    if ds.k != cfg.k {
        log::warn!("dataset wavenumber {} differs from config k = {}; using the dataset's", ds.k, cfg.k);
    }
    if !ds.has_normal_derivative() {
        if let Some(f) = cfg.functionals.iter().find(|f| f.needs_normal_derivative()) {
            return Err(Error::config("functionals", format!("{f} needs normal-derivative data, which the dataset lacks")));
        }
    }
    let dataset = DatasetReport {
        path: Some(dataset_path.to_path_buf()),
        cache_hit: false,
        seconds: start.elapsed().as_secs_f64(),
        n_receivers: ds.n_receivers(),
        n_directions: ds.n_directions(),
        max_iterations: None,
        max_residual: None,
    };
    let (noise, images) = image_all(&ds, cfg)?;
    let mut report = empty_report("image", cfg, dataset);
    report.k = ds.k;
    report.noise = Some(noise);
    report.images = images;
    finish(report, cfg, start)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(dir: &Path) -> ExperimentConfig {
        ExperimentConfig::parse(&format!(
            "medium = disk\nk = 4\ngrid_n1 = 12\ngrid_n2 = 10\nn_receivers = 16\nn_directions = 8\nsolver_cells = 24\n\
             functionals = I, I_far, I2, I2_far\noutput_dir = {}\n",
            dir.display()
        ))
        .unwrap()
    }

    #[test]
    fn run_writes_one_image_per_functional_and_reuses_cache() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small(dir.path());
        let r1 = run(&cfg).unwrap();
        assert_eq!(r1.images.len(), 4);
        assert!(!r1.dataset.cache_hit);
        for img in &r1.images {
            assert_eq!(img.files.len(), 2);
            assert!(img.files.iter().all(|p| p.exists()));
        }
        let csv1 = fs::read(dir.path().join("I2.csv")).unwrap();
        let r2 = run(&cfg).unwrap();
        assert!(r2.dataset.cache_hit);
        assert_eq!(fs::read(dir.path().join("I2.csv")).unwrap(), csv1);
        let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&r2.report_path).unwrap()).unwrap();
        assert_eq!(report["images"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn zero_noise_reports_zero() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.delta = 0.0;
        cfg.functionals = vec![imaging::Functional::I];
        assert_eq!(run(&cfg).unwrap().noise.unwrap().achieved, 0.0);
    }

    #[test]
    fn synthesize_then_image() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.cache_dir = None;
        let r = synthesize(&cfg).unwrap();
        let path = r.dataset.path.unwrap();
        let out = image(&path, &cfg).unwrap();
        assert_eq!(out.images.len(), 4);
    }

    #[test]
    fn invalid_config_fails_before_solving() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.circle.radius = 0.1;
        let err = run(&cfg).unwrap_err();
        assert_eq!(exit_code(&err), 2);
        assert!(!cfg.cache_dir.unwrap().exists());
    }
}
