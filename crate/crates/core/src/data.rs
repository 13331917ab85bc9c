//! Multi-static Cauchy data: synthesis, noise and persistence.
//!
//! Matrices are stored receiver-major: entry `(j, l)` is receiver `j` under
//! incident direction `l`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forward::{self, ForwardSolution, GmresConfig, VolumeGrid};
use crate::geometry::{incident_directions, Aperture, ContrastMap, Direction2, MeasurementCircle};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::schema("matrix", format!("expected {} entries, got {}", rows * cols, data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn axpy(&self, alpha: f64, other: &CMatrix) -> CMatrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b * alpha).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }
}

/// Scattered field and its normal derivative on the measurement circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyDataset {
    pub k: f64,
    pub circle: MeasurementCircle,
    pub direction_aperture: Aperture,
    /// `u_sc`, `[n_receivers x n_directions]`.
    pub u: CMatrix,
    /// `du_sc/dnu`, same shape; absent for scattered-field-only data.
    pub du: Option<CMatrix>,
}

impl CauchyDataset {
    pub fn new(
        k: f64,
        circle: MeasurementCircle,
        direction_aperture: Aperture,
        u: CMatrix,
        du: Option<CMatrix>,
    ) -> Result<Self> {
        if u.rows() != circle.n_receivers {
            return Err(Error::schema("n_receivers", format!("matrix has {} rows, circle has {}", u.rows(), circle.n_receivers)));
        }
        if u.cols() == 0 {
            return Err(Error::schema("n_directions", "need at least one direction"));
        }
        if let Some(du) = &du {
            if du.rows() != u.rows() || du.cols() != u.cols() {
                return Err(Error::schema("du", "normal-derivative matrix shape differs from u"));
            }
        }
        if !u.is_finite() || du.as_ref().is_some_and(|m| !m.is_finite()) {
            return Err(Error::schema("u", "non-finite entries"));
        }
        Ok(Self { k, circle, direction_aperture, u, du })
    }

    pub fn n_receivers(&self) -> usize {
        self.u.rows()
    }

    pub fn n_directions(&self) -> usize {
        self.u.cols()
    }

    pub fn has_normal_derivative(&self) -> bool {
        self.du.is_some()
    }

    pub fn directions(&self) -> Vec<Direction2> {
        incident_directions(self.n_directions(), self.direction_aperture)
    }

    /// Quadrature weight per incident direction.
    pub fn direction_weight(&self) -> f64 {
        self.direction_aperture.weight(self.n_directions())
    }

    /// Drops the normal derivative.
    pub fn scattered_only(&self) -> Self {
        Self { du: None, ..self.clone() }
    }
}

/// Per-direction solver diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Solves the forward problem for every direction and samples the Cauchy
/// data at the receivers.
pub fn synthesize(
    map: &ContrastMap,
    k: f64,
    circle: MeasurementCircle,
    n_directions: usize,
    direction_aperture: Aperture,
    grid: VolumeGrid,
) -> Result<CauchyDataset> {
    synthesize_with(map, k, circle, n_directions, direction_aperture, grid, &GmresConfig::default()).map(|(d, _)| d)
}

pub fn synthesize_with(
    map: &ContrastMap,
    k: f64,
    circle: MeasurementCircle,
    n_directions: usize,
    direction_aperture: Aperture,
    grid: VolumeGrid,
    cfg: &GmresConfig,
) -> Result<(CauchyDataset, Vec<SolveStats>)> {
    if n_directions == 0 {
        return Err(Error::config("n_directions", "need at least one incident direction"));
    }
    if circle.radius <= map.support_radius() {
        return Err(Error::config("radius", "measurement circle must enclose the scatterer"));
    }
    let dirs = incident_directions(n_directions, direction_aperture);
    let sols = forward::solve_many(map, &dirs, k, grid, cfg)?;
    let (u, du) = sample_cauchy(&sols, &circle)?;
    let stats = sols.iter().map(|s| SolveStats { iterations: s.iterations, residual: s.residual }).collect();
    Ok((CauchyDataset::new(k, circle, direction_aperture, u, Some(du))?, stats))
}

/// `(U, dU)` at the receivers of `circle` for a set of solutions sharing one medium.
pub fn sample_cauchy(sols: &[ForwardSolution], circle: &MeasurementCircle) -> Result<(CMatrix, CMatrix)> {
    let rx = circle.receivers();
    let nd = sols.len();
    let rows: Vec<Result<(Vec<C64>, Vec<C64>)>> = rx
        .par_iter()
        .map(|(x, nu)| {
            let mut u = Vec::with_capacity(nd);
            let mut du = Vec::with_capacity(nd);
            for s in sols {
                let (a, b) = s.cauchy_at(*x, *nu)?;
                u.push(a);
                du.push(b);
            }
            Ok((u, du))
        })
        .collect();
    let mut u = CMatrix::zeros(rx.len(), nd);
    let mut du = CMatrix::zeros(rx.len(), nd);
    for (j, row) in rows.into_iter().enumerate() {
        let (a, b) = row?;
        for l in 0..nd {
            u.set(j, l, a[l]);
            du.set(j, l, b[l]);
        }
    }
    Ok((u, du))
}

/// Relative noise level and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSpec {
    pub delta: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub const MAX_DELTA: f64 = 1.5;

    pub fn new(delta: f64, seed: u64) -> Result<Self> {
        if !(0.0..=Self::MAX_DELTA).contains(&delta) {
            return Err(Error::config("delta", format!("noise level must lie in [0, {}], got {delta}", Self::MAX_DELTA)));
        }
        Ok(Self { delta, seed })
    }
}

/// ChaCha20 stream ids for the two noise matrices drawn from one seed.
const STREAM_U: u64 = 1;
const STREAM_DU: u64 = 2;

/// Matrix with entries uniform on the complex square `|re|, |im| <= 1`.
///
/// Generator: ChaCha20 seeded with `seed_from_u64(seed)`, stream `stream`,
/// entries row-major, real part drawn before imaginary part.
pub fn uniform_noise(rows: usize, cols: usize, seed: u64, stream: u64) -> CMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let data = (0..rows * cols)
        .map(|_| {
            let re = rng.gen_range(-1.0..=1.0);
            let im = rng.gen_range(-1.0..=1.0);
            C64::new(re, im)
        })
        .collect();
    CMatrix { rows, cols, data }
}

fn perturb(m: &CMatrix, delta: f64, noise: &CMatrix, field: &str) -> Result<CMatrix> {
    let norm = m.frobenius();
    if norm == 0.0 {
        return Err(Error::Degenerate(format!("{field} has zero Frobenius norm; cannot scale noise")));
    }
    Ok(m.axpy(delta * norm / noise.frobenius(), noise))
}

/// `U + delta * N1 / |N1|_F * |U|_F` and likewise for `dU` with an independent `N2`.
pub fn add_noise(ds: &CauchyDataset, spec: NoiseSpec) -> Result<CauchyDataset> {
    if spec.delta == 0.0 {
        return Ok(ds.clone());
    }
    let (r, c) = (ds.u.rows(), ds.u.cols());
    let u = perturb(&ds.u, spec.delta, &uniform_noise(r, c, spec.seed, STREAM_U), "u")?;
    let du = match &ds.du {
        Some(du) => Some(perturb(du, spec.delta, &uniform_noise(r, c, spec.seed, STREAM_DU), "du")?),
        None => None,
    };
    Ok(CauchyDataset { u, du, ..ds.clone() })
}

/// `|U_noisy - U|_F / |U|_F`.
pub fn achieved_noise(clean: &CauchyDataset, noisy: &CauchyDataset) -> f64 {
    let n = clean.u.frobenius();
    if n == 0.0 {
        0.0
    } else {
        noisy.u.sub(&clean.u).frobenius() / n
    }
}

const MAGIC: &[u8; 4] = b"OSMD";
const VERSION: u16 = 1;

/// Writes the binary dataset format (little-endian).
///
/// Layout: `"OSMD"`, `u16` version, `f64` k, circle `(f64 R, u64 n, f64 lo,
/// f64 hi)`, `u64` n_directions, direction aperture `(f64 lo, f64 hi)`, `u8`
/// has-derivative flag, then `U` and (if present) `dU` as row-major
/// interleaved `(re, im)` `f64` pairs.
pub fn save(ds: &CauchyDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&ds.k.to_le_bytes())?;
    w.write_all(&ds.circle.radius.to_le_bytes())?;
    w.write_all(&(ds.circle.n_receivers as u64).to_le_bytes())?;
    w.write_all(&ds.circle.aperture.lo.to_le_bytes())?;
    w.write_all(&ds.circle.aperture.hi.to_le_bytes())?;
    w.write_all(&(ds.n_directions() as u64).to_le_bytes())?;
    w.write_all(&ds.direction_aperture.lo.to_le_bytes())?;
    w.write_all(&ds.direction_aperture.hi.to_le_bytes())?;
    w.write_all(&[ds.du.is_some() as u8])?;
    for m in std::iter::once(&ds.u).chain(ds.du.as_ref()) {
        for z in m.as_slice() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, field: &str) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::schema(field, "file truncated"));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn f64(&mut self, field: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, field)?.try_into().expect("8 bytes")))
    }

    fn u64(&mut self, field: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, field)?.try_into().expect("8 bytes")))
    }

    fn matrix(&mut self, rows: usize, cols: usize, field: &str) -> Result<CMatrix> {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let re = self.f64(field)?;
            let im = self.f64(field)?;
            data.push(C64::new(re, im));
        }
        CMatrix::from_vec(rows, cols, data)
    }
}

/// Reads a dataset written by [`save`].
pub fn load(path: impl AsRef<Path>) -> Result<CauchyDataset> {
    let mut buf = Vec::new();
    File::open(path)?.read_to_end(&mut buf)?;
    let mut c = Cursor { buf: &buf, pos: 0 };
    if c.take(4, "magic")? != MAGIC {
        return Err(Error::schema("magic", "not an OSMD dataset"));
    }
    let version = u16::from_le_bytes(c.take(2, "version")?.try_into().expect("2 bytes"));
    if version != VERSION {
        return Err(Error::schema("version", format!("unsupported version {version}")));
    }
    let k = c.f64("k")?;
    let radius = c.f64("radius")?;
    let n_rx = c.u64("n_receivers")? as usize;
    let rx_ap = Aperture::new(c.f64("aperture_lo")?, c.f64("aperture_hi")?)?;
    let n_d = c.u64("n_directions")? as usize;
    let dir_ap = Aperture::new(c.f64("direction_lo")?, c.f64("direction_hi")?)?;
    let has_du = c.take(1, "has_normal_derivative")?[0] != 0;
    let expected = c.pos + n_rx * n_d * 16 * (1 + has_du as usize);
    if buf.len() != expected {
        return Err(Error::schema(
            "n_receivers",
            format!("header implies {} bytes, file has {}", expected, buf.len()),
        ));
    }
    let u = c.matrix(n_rx, n_d, "u")?;
    let du = if has_du { Some(c.matrix(n_rx, n_d, "du")?) } else { None };
    CauchyDataset::new(k, MeasurementCircle::new(radius, n_rx, rx_ap)?, dir_ap, u, du)
}

/// Writes the inspection CSV: a `# key=value ...` header line, then one row
/// `rx_index,dir_index,u_re,u_im,du_re,du_im` per matrix entry.
pub fn save_csv(ds: &CauchyDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "# k={} R={} n_x={} n_d={} aperture_lo={} aperture_hi={} dir_lo={} dir_hi={}",
        ds.k,
        ds.circle.radius,
        ds.n_receivers(),
        ds.n_directions(),
        ds.circle.aperture.lo,
        ds.circle.aperture.hi,
        ds.direction_aperture.lo,
        ds.direction_aperture.hi
    )?;
    for j in 0..ds.n_receivers() {
        for l in 0..ds.n_directions() {
            let u = ds.u.get(j, l);
            match &ds.du {
                Some(du) => {
                    let d = du.get(j, l);
                    writeln!(w, "{j},{l},{},{},{},{}", u.re, u.im, d.re, d.im)?
                }
                None => writeln!(w, "{j},{l},{},{},,", u.re, u.im)?,
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn header_value(fields: &[(String, String)], key: &str) -> Result<f64> {
    let v = fields
        .iter()
        .find(|(k, _)| k == key)
        .ok_or_else(|| Error::schema(key, "missing from header"))?;
    v.1.parse().map_err(|_| Error::schema(key, format!("cannot parse `{}`", v.1)))
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<CauchyDataset> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines.next().ok_or(Error::Parse { line: 1, message: "empty file".into() })??;
    let body = header
        .strip_prefix('#')
        .ok_or(Error::Parse { line: 1, message: "header must start with `#`".into() })?;
    let fields: Vec<(String, String)> = body
        .split_whitespace()
        .filter_map(|kv| kv.split_once('=').map(|(a, b)| (a.to_string(), b.to_string())))
        .collect();
    let k = header_value(&fields, "k")?;
    let radius = header_value(&fields, "R")?;
    let n_rx = header_value(&fields, "n_x")? as usize;
    let n_d = header_value(&fields, "n_d")? as usize;
    let rx_ap = Aperture::new(header_value(&fields, "aperture_lo")?, header_value(&fields, "aperture_hi")?)?;
    let dir_ap = Aperture::new(header_value(&fields, "dir_lo")?, header_value(&fields, "dir_hi")?)?;

    let mut u = CMatrix::zeros(n_rx, n_d);
    let mut du = CMatrix::zeros(n_rx, n_d);
    let mut has_du = None;
    let mut count = 0;
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 6 {
            return Err(Error::Parse { line: lineno, message: format!("expected 6 fields, got {}", cols.len()) });
        }
        let idx = |s: &str, name: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse { line: lineno, message: format!("bad {name} `{s}`") })
        };
        let num = |s: &str, name: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse { line: lineno, message: format!("bad {name} `{s}`") })
        };
        let (j, l) = (idx(cols[0], "rx_index")?, idx(cols[1], "dir_index")?);
        if j >= n_rx {
            return Err(Error::schema("n_x", format!("line {lineno}: receiver index {j} out of range")));
        }
        if l >= n_d {
            return Err(Error::schema("n_d", format!("line {lineno}: direction index {l} out of range")));
        }
        u.set(j, l, C64::new(num(cols[2], "u_re")?, num(cols[3], "u_im")?));
        let row_has_du = !cols[4].is_empty();
        if *has_du.get_or_insert(row_has_du) != row_has_du {
            return Err(Error::Parse { line: lineno, message: "inconsistent du columns".into() });
        }
        if row_has_du {
            du.set(j, l, C64::new(num(cols[4], "du_re")?, num(cols[5], "du_im")?));
        }
        count += 1;
    }
    if count != n_rx * n_d {
        return Err(Error::schema("n_x", format!("header implies {} rows, found {count}", n_rx * n_d)));
    }
    let du = if has_du.unwrap_or(false) { Some(du) } else { None };
    CauchyDataset::new(k, MeasurementCircle::new(radius, n_rx, rx_ap)?, dir_ap, u, du)
}
