//! Image files: CSV for numbers, binary PGM for a quick look.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::SamplingGrid;
use crate::imaging::{Functional, IndicatorImage};

/// Header `# functional=.. k=.. delta=.. n1=.. n2=.. x1lo=.. x1hi=.. x2lo=.. x2hi=..`,
/// then `x1,x2,value` with `x1` varying fastest.
pub fn write_csv(img: &IndicatorImage, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let g = &img.grid;
    writeln!(
        w,
        "# functional={} k={} delta={} n1={} n2={} x1lo={} x1hi={} x2lo={} x2hi={}",
        img.functional, img.k, img.delta, g.n1, g.n2, g.x1.0, g.x1.1, g.x2.0, g.x2.1
    )?;
    for (i, v) in img.values.iter().enumerate() {
        let z = g.point(i);
        writeln!(w, "{},{},{}", z.x1, z.x2, v)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_csv`]; the image is marked normalized
/// when its maximum is exactly 1.
pub fn read_csv(path: impl AsRef<Path>) -> Result<IndicatorImage> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines.next().ok_or(Error::Parse { line: 1, message: "empty file".into() })??;
    let fields: Vec<(&str, &str)> = header
        .trim_start_matches('#')
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .collect();
    let get = |key: &str| -> Result<&str> {
        fields
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::schema(key, "missing from header"))
    };
    let num = |key: &str| -> Result<f64> { get(key)?.parse().map_err(|_| Error::schema(key, "not a number")) };
    let count = |key: &str| -> Result<usize> { get(key)?.parse().map_err(|_| Error::schema(key, "not a count")) };
    let grid = SamplingGrid::new((num("x1lo")?, num("x1hi")?), (num("x2lo")?, num("x2hi")?), count("n1")?, count("n2")?)?;
    let functional: Functional = get("functional")?.parse()?;
    let mut values = Vec::with_capacity(grid.len());
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v = line
            .rsplit(',')
            .next()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .ok_or(Error::Parse { line: i + 2, message: format!("bad row `{line}`") })?;
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(Error::schema("n1", format!("header implies {} rows, found {}", grid.len(), values.len())));
    }
    let normalized = values.iter().cloned().fold(0.0, f64::max) == 1.0;
    Ok(IndicatorImage { grid, values, normalized, functional, k: num("k")?, delta: num("delta")? })
}

/// 8-bit binary PGM, 255 at indicator value 1, first row at the largest `x2`.
pub fn write_pgm(img: &IndicatorImage, path: impl AsRef<Path>) -> Result<()> {
    let g = &img.grid;
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{} {}\n255\n", g.n1, g.n2)?;
    let mut row = Vec::with_capacity(g.n1);
    for i2 in (0..g.n2).rev() {
        row.clear();
        row.extend((0..g.n1).map(|i1| (img.value_at(i1, i2).clamp(0.0, 1.0) * 255.0).round() as u8));
        w.write_all(&row)?;
    }
    w.flush()?;
    Ok(())
}
