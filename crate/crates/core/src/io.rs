//! File formats.
//!
//! Images and sinograms are raw little-endian `f64` with a JSON sidecar at
//! `<file>.json`. Tables are CSV with a header row and 17 significant digits,
//! so every float survives a write/read cycle bit for bit. All writes go
//! through a temporary file and a rename.

use crate::error::{Error, Result};
use crate::grid::Image;
use crate::raytrace::Sinogram;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

/// Pixel order tag written into image sidecars.
pub const ROW_MAJOR: &str = "row-major-top-left";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageSidecar {
    pub m: usize,
    pub dx: f64,
    pub order: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinogramSidecar {
    pub angles: Vec<f64>,
    pub offsets: Vec<f64>,
    pub rows: String,
}

/// Path of the JSON sidecar belonging to a raw file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Format(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

fn f64s_to_bytes(v: &[f64]) -> Vec<u8> {
    v.iter().flat_map(|x| x.to_le_bytes()).collect()
}

fn bytes_to_f64s(b: &[u8], path: &Path) -> Result<Vec<f64>> {
    if !b.len().is_multiple_of(8) {
        return Err(Error::Format(format!("{}: length {} is not a multiple of 8", path.display(), b.len())));
    }
    Ok(b.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let s = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&s)?)
}

pub fn write_image(path: &Path, img: &Image) -> Result<()> {
    write_atomic(path, &f64s_to_bytes(img.values()))?;
    write_json(&sidecar_path(path), &ImageSidecar { m: img.m(), dx: img.dx(), order: ROW_MAJOR.into() })
}

pub fn read_image(path: &Path) -> Result<Image> {
    let meta: ImageSidecar = read_json(&sidecar_path(path))?;
    if meta.order != ROW_MAJOR {
        return Err(Error::Format(format!("unsupported pixel order {:?}", meta.order)));
    }
    let values = bytes_to_f64s(&fs::read(path)?, path)?;
    Image::from_values(meta.m, meta.dx, values)
}

pub fn write_sinogram(path: &Path, sino: &Sinogram) -> Result<()> {
    write_atomic(path, &f64s_to_bytes(sino.data()))?;
    let meta = SinogramSidecar {
        angles: sino.angles().to_vec(),
        offsets: sino.offsets().to_vec(),
        rows: "angles".into(),
    };
    write_json(&sidecar_path(path), &meta)
}

pub fn read_sinogram(path: &Path) -> Result<Sinogram> {
    let meta: SinogramSidecar = read_json(&sidecar_path(path))?;
    if meta.rows != "angles" {
        return Err(Error::Format(format!("unsupported sinogram layout {:?}", meta.rows)));
    }
    let data = bytes_to_f64s(&fs::read(path)?, path)?;
    Sinogram::new(meta.angles, meta.offsets, data)
}

/// A float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialises a table with a header row.
pub fn csv_string(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    write_atomic(path, csv_string(header, rows).as_bytes())
}

/// Reads a numeric table written by [`write_csv`]; returns the header and rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    parse_csv(&fs::read_to_string(path)?)
}

pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Format("empty csv".into()))?
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Format(format!("csv line {}: {e}", k + 2))))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != header.len() {
            return Err(Error::Format(format!("csv line {}: {} cells, header has {}", k + 2, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// One CSV row per image row, columns `c0..c{m-1}`.
pub fn write_image_csv(path: &Path, img: &Image) -> Result<()> {
    let m = img.m();
    let names: Vec<String> = (0..m).map(|c| format!("c{c}")).collect();
    let header: Vec<&str> = names.iter().map(String::as_str).collect();
    let rows: Vec<Vec<f64>> = img.values().chunks(m).map(<[f64]>::to_vec).collect();
    write_csv(path, &header, &rows)
}

/// 8-bit binary PGM. Values are mapped linearly from `window` (default the
/// image min/max) onto 0..=255; the window used is returned.
pub fn pgm_bytes(img: &Image, window: Option<(f64, f64)>) -> (Vec<u8>, (f64, f64)) {
    let (lo, hi) = window.unwrap_or_else(|| img.min_max());
    let span = hi - lo;
    let mut out = format!("P5\n{} {}\n255\n", img.m(), img.m()).into_bytes();
    out.extend(img.values().iter().map(|&v| {
        if span > 0.0 {
            (((v - lo) / span).clamp(0.0, 1.0) * 255.0).round() as u8
        } else {
            0
        }
    }));
    (out, (lo, hi))
}

pub fn write_pgm(path: &Path, img: &Image, window: Option<(f64, f64)>) -> Result<(f64, f64)> {
    let (bytes, w) = pgm_bytes(img, window);
    write_atomic(path, &bytes)?;
    Ok(w)
}

/// Record of one command run, enough to repeat it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub wall_clock_s: f64,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Self {
        RunManifest {
            command: command.into(),
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            wall_clock_s: 0.0,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}
