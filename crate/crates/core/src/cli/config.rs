//! Flat `key = value` experiment descriptions and the figure presets.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Aperture, ContrastMap, MeasurementCircle, Point2, SamplingGrid};
use crate::imaging::Functional;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Medium {
    /// One of `kite`, `disk_rectangle`, `square_cavity`.
    Named(String),
    Disk { center: Point2, radius: f64, eta: C64 },
}

impl Medium {
    pub fn build(&self) -> Result<ContrastMap> {
        match self {
            Medium::Named(name) => ContrastMap::by_name(name),
            Medium::Disk { center, radius, eta } => ContrastMap::disk(*center, *radius, *eta),
        }
    }

    fn describe(&self) -> String {
        match self {
            Medium::Named(n) => n.clone(),
            Medium::Disk { .. } => "disk".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OutputFormat {
    Csv,
    Pgm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub medium: Medium,
    pub k: f64,
    pub grid: SamplingGrid,
    pub circle: MeasurementCircle,
    pub n_directions: usize,
    pub direction_aperture: Aperture,
    pub delta: f64,
    pub seed: u64,
    pub functionals: Vec<Functional>,
    /// Observation directions for the outer integral of `I`; defaults to `n_directions`.
    pub xhat_count: usize,
    /// Solver cells per side of the volume grid.
    pub solver_cells: usize,
    pub output_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
    /// Directory for cached clean datasets; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "medium",
    "disk_center",
    "disk_radius",
    "eta",
    "k",
    "grid_x1",
    "grid_x2",
    "grid_n1",
    "grid_n2",
    "radius",
    "n_receivers",
    "receiver_aperture",
    "n_directions",
    "direction_aperture",
    "delta",
    "seed",
    "functionals",
    "xhat_count",
    "solver_cells",
    "output_dir",
    "formats",
    "cache_dir",
];

impl Default for ExperimentConfig {
    /// Near-field kite at `k = 8` with 30% noise.
    fn default() -> Self {
        Self {
            medium: Medium::Named("kite".into()),
            k: 8.0,
            grid: SamplingGrid::square(2.0, 96).expect("valid grid"),
            circle: MeasurementCircle::full(3.0, 64).expect("valid circle"),
            n_directions: 64,
            direction_aperture: Aperture::FULL,
            delta: 0.3,
            seed: 0,
            functionals: vec![Functional::I],
            xhat_count: 64,
            solver_cells: crate::forward::DEFAULT_CELLS,
            output_dir: PathBuf::from("out"),
            formats: vec![OutputFormat::Csv, OutputFormat::Pgm],
            cache_dir: Some(PathBuf::from("out/cache")),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.trim().parse().map_err(|_| Error::config(key, format!("expected a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(Error::config(key, "must be finite"));
    }
    Ok(x)
}

fn parse_count(key: &str, v: &str) -> Result<usize> {
    let n: usize = v.trim().parse().map_err(|_| Error::config(key, format!("expected a count, got `{v}`")))?;
    if n == 0 {
        return Err(Error::config(key, "must be at least 1"));
    }
    Ok(n)
}

fn parse_pair(key: &str, v: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::config(key, format!("expected `a, b`, got `{v}`")));
    }
    Ok((parse_f64(key, parts[0])?, parse_f64(key, parts[1])?))
}

fn parse_range(key: &str, v: &str) -> Result<(f64, f64)> {
    let (a, b) = parse_pair(key, v)?;
    if b <= a {
        return Err(Error::config(key, "upper bound must exceed lower bound"));
    }
    Ok((a, b))
}

fn parse_aperture(key: &str, v: &str) -> Result<Aperture> {
    match v.trim() {
        "full" => Ok(Aperture::FULL),
        "lower_half" => Ok(Aperture::LOWER_HALF),
        other => {
            let (lo, hi) = parse_pair(key, other)?;
            Aperture::new(lo, hi).map_err(|_| Error::config(key, format!("invalid angular interval `{other}`")))
        }
    }
}

fn format_aperture(a: Aperture) -> String {
    if a == Aperture::FULL {
        "full".into()
    } else if a == Aperture::LOWER_HALF {
        "lower_half".into()
    } else {
        format!("{}, {}", a.lo, a.hi)
    }
}

fn parse_list(v: &str) -> Vec<&str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(Error::Parse { line: i + 1, message: format!("expected `key = value`, got `{line}`") })?;
        let key = k.trim().to_string();
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::config(key, "unknown key"));
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::config(key, "given more than once"));
        }
    }
    Ok(out)
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses a config; unset keys keep their [`Default`] values.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply(&parse_pairs(text)?)?;
        Ok(cfg)
    }

    /// Applies `key=value` overrides such as `delta=0.9`.
    pub fn with_overrides(mut self, overrides: &[String]) -> Result<Self> {
        let text = overrides.join("\n");
        self.apply(&parse_pairs(&text)?)?;
        Ok(self)
    }

    fn apply(&mut self, kv: &BTreeMap<String, String>) -> Result<()> {
        let get = |k: &str| kv.get(k).map(String::as_str);

        let disk_keys = ["disk_center", "disk_radius", "eta"];
        match get("medium") {
            Some("disk") => {
                let (c1, c2) = get("disk_center").map(|v| parse_pair("disk_center", v)).transpose()?.unwrap_or((0.0, 0.0));
                let radius = get("disk_radius").map(|v| parse_f64("disk_radius", v)).transpose()?.unwrap_or(0.4);
                let (re, im) = get("eta").map(|v| parse_pair("eta", v)).transpose()?.unwrap_or((0.5, 0.0));
                self.medium = Medium::Disk { center: Point2::new(c1, c2), radius, eta: C64::new(re, im) };
            }
            Some(name @ ("kite" | "disk_rectangle" | "square_cavity")) => {
                self.medium = Medium::Named(name.into());
            }
            Some(other) => return Err(Error::config("medium", format!("unknown medium `{other}`"))),
            None => {}
        }
        if !matches!(self.medium, Medium::Disk { .. }) {
            if let Some(k) = disk_keys.iter().find(|k| kv.contains_key(**k)) {
                return Err(Error::config(*k, "only valid with `medium = disk`"));
            }
        }
        if let Some(v) = get("k") {
            self.k = parse_f64("k", v)?;
            if self.k <= 0.0 {
                return Err(Error::config("k", "wavenumber must be positive"));
            }
        }

        let x1 = get("grid_x1").map(|v| parse_range("grid_x1", v)).transpose()?.unwrap_or(self.grid.x1);
        let x2 = get("grid_x2").map(|v| parse_range("grid_x2", v)).transpose()?.unwrap_or(self.grid.x2);
        let n1 = get("grid_n1").map(|v| parse_count("grid_n1", v)).transpose()?.unwrap_or(self.grid.n1);
        let n2 = get("grid_n2").map(|v| parse_count("grid_n2", v)).transpose()?.unwrap_or(self.grid.n2);
        self.grid = SamplingGrid::new(x1, x2, n1, n2).map_err(|_| Error::config("grid_n1", "grid needs at least 2 points per axis"))?;

        let radius = get("radius").map(|v| parse_f64("radius", v)).transpose()?.unwrap_or(self.circle.radius);
        let n_rx = get("n_receivers").map(|v| parse_count("n_receivers", v)).transpose()?.unwrap_or(self.circle.n_receivers);
        let rx_ap = get("receiver_aperture").map(|v| parse_aperture("receiver_aperture", v)).transpose()?.unwrap_or(self.circle.aperture);
        self.circle = MeasurementCircle::new(radius, n_rx, rx_ap)?;

        let old_nd = self.n_directions;
        if let Some(v) = get("n_directions") {
            self.n_directions = parse_count("n_directions", v)?;
        }
        if let Some(v) = get("direction_aperture") {
            self.direction_aperture = parse_aperture("direction_aperture", v)?;
        }
        if let Some(v) = get("delta") {
            self.delta = parse_f64("delta", v)?;
        }
        crate::data::NoiseSpec::new(self.delta, 0)?;
        if let Some(v) = get("seed") {
            self.seed = v.trim().parse().map_err(|_| Error::config("seed", format!("expected an unsigned integer, got `{v}`")))?;
        }
        if let Some(v) = get("functionals") {
            let list = parse_list(v).into_iter().map(str::parse).collect::<Result<Vec<Functional>>>()?;
            if list.is_empty() {
                return Err(Error::config("functionals", "need at least one functional"));
            }
            let mut seen = Vec::new();
            for f in list {
                if !seen.contains(&f) {
                    seen.push(f);
                }
            }
            self.functionals = seen;
        }
        match get("xhat_count") {
            Some(v) => self.xhat_count = parse_count("xhat_count", v)?,
            // Follow the direction count unless set explicitly.
            None if self.xhat_count == old_nd => self.xhat_count = self.n_directions,
            None => {}
        }
        if let Some(v) = get("solver_cells") {
            self.solver_cells = parse_count("solver_cells", v)?;
            if self.solver_cells < 8 {
                return Err(Error::config("solver_cells", "need at least 8 cells per side"));
            }
        }
        if let Some(v) = get("output_dir") {
            let old = self.output_dir.join("cache");
            self.output_dir = PathBuf::from(v);
            if self.cache_dir.as_deref() == Some(old.as_path()) && get("cache_dir").is_none() {
                self.cache_dir = Some(self.output_dir.join("cache"));
            }
        }
        if let Some(v) = get("formats") {
            let mut fmts = Vec::new();
            for f in parse_list(v) {
                let fmt = match f {
                    "csv" => OutputFormat::Csv,
                    "pgm" => OutputFormat::Pgm,
                    other => return Err(Error::config("formats", format!("unknown format `{other}`"))),
                };
                if !fmts.contains(&fmt) {
                    fmts.push(fmt);
                }
            }
            if fmts.is_empty() {
                return Err(Error::config("formats", "need at least one format"));
            }
            self.formats = fmts;
        }
        if let Some(v) = get("cache_dir") {
            self.cache_dir = if v == "none" { None } else { Some(PathBuf::from(v)) };
        }
        Ok(())
    }

    /// Checks that need the medium geometry; run before any solve.
    pub fn validate(&self) -> Result<ContrastMap> {
        let map = self.medium.build()?;
        if self.circle.radius <= map.support_radius() {
            return Err(Error::config("radius", "measurement circle must enclose the scatterer"));
        }
        Ok(map)
    }

    /// Serializes back to the text format; `parse(to_text(c)) == c`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("medium", self.medium.describe());
        if let Medium::Disk { center, radius, eta } = &self.medium {
            put("disk_center", format!("{}, {}", center.x1, center.x2));
            put("disk_radius", radius.to_string());
            put("eta", format!("{}, {}", eta.re, eta.im));
        }
        put("k", self.k.to_string());
        put("grid_x1", format!("{}, {}", self.grid.x1.0, self.grid.x1.1));
        put("grid_x2", format!("{}, {}", self.grid.x2.0, self.grid.x2.1));
        put("grid_n1", self.grid.n1.to_string());
        put("grid_n2", self.grid.n2.to_string());
        put("radius", self.circle.radius.to_string());
        put("n_receivers", self.circle.n_receivers.to_string());
        put("receiver_aperture", format_aperture(self.circle.aperture));
        put("n_directions", self.n_directions.to_string());
        put("direction_aperture", format_aperture(self.direction_aperture));
        put("delta", self.delta.to_string());
        put("seed", self.seed.to_string());
        put("functionals", self.functionals.iter().map(|f| f.name()).collect::<Vec<_>>().join(", "));
        put("xhat_count", self.xhat_count.to_string());
        put("solver_cells", self.solver_cells.to_string());
        put("output_dir", self.output_dir.display().to_string());
        let fmts: Vec<&str> = self
            .formats
            .iter()
            .map(|f| match f {
                OutputFormat::Csv => "csv",
                OutputFormat::Pgm => "pgm",
            })
            .collect();
        put("formats", fmts.join(", "));
        put("cache_dir", self.cache_dir.as_ref().map_or("none".into(), |p| p.display().to_string()));
        s
    }

    /// Canonical text of the fields that determine the clean dataset.
    pub fn dataset_key(&self) -> String {
        format!(
            "v1;medium={:?};k={};radius={};n_rx={};rx_ap={},{};n_d={};d_ap={},{};cells={}",
            self.medium,
            self.k,
            self.circle.radius,
            self.circle.n_receivers,
            self.circle.aperture.lo,
            self.circle.aperture.hi,
            self.n_directions,
            self.direction_aperture.lo,
            self.direction_aperture.hi,
            self.solver_cells
        )
    }
}

/// Names accepted by [`preset`].
pub fn preset_names() -> Vec<String> {
    let objects = ["kite", "disk_rectangle", "square_cavity"];
    let mut out = Vec::new();
    for o in objects {
        for v in ["k4", "k8"] {
            out.push(format!("fig1-{o}-{v}"));
        }
        for v in ["d60", "d90"] {
            out.push(format!("fig2-{o}-{v}"));
        }
        out.push(format!("fig3-{o}"));
        out.push(format!("fig4-{o}"));
    }
    out
}

/// Figure configurations, named `fig<N>-<object>[-<variant>]`.
///
/// * `fig1`: near field, 30% noise; variant `k4` images `I` at `k = 4`,
///   `k8` (default) images `I` and `I2` at `k = 8`.
/// * `fig2`: `k = 8`; variant `d60` images `I` with 60% noise, `d90`
///   (default) images `I` and `I2` with 90% noise.
/// * `fig3`: far field (`R = 100`), 30% noise, `I`, `I_far`, `I2_far`.
/// * `fig4`: bottom half aperture with half the data, 30% noise, `I` and `I2`.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let unknown = || Error::config("preset", format!("unknown preset `{name}`"));
    let mut parts = name.split('-');
    let fig = parts.next().ok_or_else(unknown)?;
    let object = parts.next().ok_or_else(unknown)?;
    let variant = parts.next();
    if parts.next().is_some() {
        return Err(unknown());
    }
    let n = match object {
        "kite" | "disk_rectangle" => 64,
        "square_cavity" => 96,
        _ => return Err(unknown()),
    };
    let mut cfg = ExperimentConfig {
        medium: Medium::Named(object.into()),
        circle: MeasurementCircle::full(3.0, n)?,
        n_directions: n,
        xhat_count: n,
        output_dir: PathBuf::from(format!("out/{name}")),
        cache_dir: Some(PathBuf::from("out/cache")),
        ..ExperimentConfig::default()
    };
    match (fig, variant) {
        ("fig1", Some("k4")) => {
            cfg.k = 4.0;
            cfg.functionals = vec![Functional::I];
        }
        ("fig1", None | Some("k8")) => cfg.functionals = vec![Functional::I, Functional::I2],
        ("fig2", Some("d60")) => {
            cfg.delta = 0.6;
            cfg.functionals = vec![Functional::I];
        }
        ("fig2", None | Some("d90")) => {
            cfg.delta = 0.9;
            cfg.functionals = vec![Functional::I, Functional::I2];
        }
        ("fig3", None) => {
            cfg.circle = MeasurementCircle::full(100.0, n)?;
            cfg.functionals = vec![Functional::I, Functional::IFar, Functional::I2Far];
        }
        ("fig4", None) => {
            let half = n / 2;
            cfg.circle = MeasurementCircle::new(3.0, half, Aperture::LOWER_HALF)?;
            cfg.n_directions = half;
            cfg.xhat_count = half;
            cfg.direction_aperture = Aperture::LOWER_HALF;
            cfg.functionals = vec![Functional::I, Functional::I2];
        }
        _ => return Err(unknown()),
    }
    Ok(cfg)
}
