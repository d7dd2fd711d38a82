//! Field dump: a JSON header plus a sibling `.bin` payload of little-endian
//! `(re, im)` float64 pairs, component-major with ξ₁ fastest.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::field::GridField;
use super::grid::SpectralGrid;
use super::C64;
use crate::error::{Error, Result};

pub const LAYOUT: &str = "component-major, x-fastest";
pub const SCALAR: &str = "complex128 as (re,im) float64 little-endian";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpHeader {
    pub components: usize,
    pub grid: DumpGrid,
    pub layout: String,
    pub scalar: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpGrid {
    pub half_width: f64,
    pub points_per_axis: usize,
}

/// Write `bytes` to a temporary file next to `path`, then rename over it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let dir = dir.unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Dump(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn payload_path(header: &Path) -> PathBuf {
    header.with_extension("bin")
}

pub fn write_dump(header_path: &Path, field: &GridField) -> Result<()> {
    let header = DumpHeader {
        components: field.components,
        grid: DumpGrid {
            half_width: field.grid.half_width,
            points_per_axis: field.grid.points_per_axis,
        },
        layout: LAYOUT.into(),
        scalar: SCALAR.into(),
    };
    let mut bytes = Vec::with_capacity(field.values.len() * 16);
    for v in &field.values {
        bytes.extend_from_slice(&v.re.to_le_bytes());
        bytes.extend_from_slice(&v.im.to_le_bytes());
    }
    write_atomic(&payload_path(header_path), &bytes)?;
    write_atomic(header_path, serde_json::to_string_pretty(&header)?.as_bytes())
}

pub fn read_dump(header_path: &Path) -> Result<GridField> {
    let header: DumpHeader = serde_json::from_slice(&std::fs::read(header_path)?)?;
    if header.layout != LAYOUT || header.scalar != SCALAR {
        return Err(Error::Dump(format!(
            "unsupported layout `{}` / scalar `{}`",
            header.layout, header.scalar
        )));
    }
    let grid = SpectralGrid::new(header.grid.half_width, header.grid.points_per_axis)?;
    let bytes = std::fs::read(payload_path(header_path))?;
    let expected = header.components * grid.len() * 16;
    if bytes.len() != expected {
        return Err(Error::Dump(format!(
            "payload has {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            C64::new(re, im)
        })
        .collect();
    GridField::from_values(grid, header.components, values)
}
