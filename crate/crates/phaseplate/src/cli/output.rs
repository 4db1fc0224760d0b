//! File emission: CSV patterns and JSON summaries, written atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fringes::FringePattern;
use crate::schrodinger::GridSpec;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: PathBuf::from(path),
        source,
    }
}

/// Write bytes to a temporary file in the target directory, then rename it
/// over the destination, so readers never observe a half-written file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let stem = path
        .file_name()
        .ok_or_else(|| Error::RejectedInput(format!("{} has no file name", path.display())))?;
    let mut tmp = dir.map(PathBuf::from).unwrap_or_default();
    tmp.push(format!(".{}.tmp-{}", stem.to_string_lossy(), std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io_err(path)(e)
    })
}

/// Screen pattern as two-column CSV. Positions are written in meters when
/// `to_meters` rescales solver units, or verbatim for patterns already in
/// SI. 17 significant digits, so a re-parse reproduces every f64 bit.
pub fn emit_csv(pattern: &FringePattern, to_meters: f64, path: &Path) -> Result<()> {
    if pattern.screen_positions.is_empty()
        || pattern.screen_positions.len() != pattern.intensity.len()
    {
        return Err(Error::RejectedInput(format!(
            "refusing to write a pattern with {} positions and {} intensities",
            pattern.screen_positions.len(),
            pattern.intensity.len()
        )));
    }
    let mut text = String::with_capacity(pattern.screen_positions.len() * 48 + 16);
    text.push_str("y_m,intensity\n");
    for (y, i) in pattern
        .screen_positions
        .iter()
        .zip(pattern.intensity.iter())
    {
        text.push_str(&format!("{:.16e},{:.16e}\n", y * to_meters, i));
    }
    atomic_write(path, text.as_bytes())
}

/// Re-read a pattern CSV into (positions, intensity).
pub fn parse_pattern_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("y_m,intensity") => {}
        other => {
            return Err(Error::RejectedInput(format!(
                "{}: expected header 'y_m,intensity', found {:?}",
                path.display(),
                other
            )))
        }
    }
    let mut ys = Vec::new();
    let mut is = Vec::new();
    for (n, line) in lines.enumerate() {
        let (a, b) = line.split_once(',').ok_or_else(|| {
            Error::RejectedInput(format!("{}: line {}: missing comma", path.display(), n + 2))
        })?;
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| {
                Error::RejectedInput(format!(
                    "{}: line {}: bad number {s:?}",
                    path.display(),
                    n + 2
                ))
            })
        };
        ys.push(parse(a)?);
        is.push(parse(b)?);
    }
    Ok((ys, is))
}

/// Pretty-printed JSON summary with a trailing newline.
pub fn emit_summary(summary: &serde_json::Value, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary)
        .map_err(|e| Error::RejectedInput(format!("summary serialization failed: {e}")))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

/// Probability density |psi|^2 as a grid CSV: one metadata comment line,
/// then ny rows of nx comma-separated values.
pub fn emit_density_grid(grid: &GridSpec, psi: &[Complex64], path: &Path) -> Result<()> {
    let mut text = String::with_capacity(grid.len() * 17 + 128);
    text.push_str(&format!(
        "# nx={} ny={} x_min={:e} y_min={:e} dx={:e} dy={:e}\n",
        grid.nx,
        grid.ny,
        grid.x_min,
        grid.y_min,
        grid.dx(),
        grid.dy()
    ));
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            if ix > 0 {
                text.push(',');
            }
            text.push_str(&format!("{:.9e}", psi[iy * grid.nx + ix].norm_sqr()));
        }
        text.push('\n');
    }
    atomic_write(path, text.as_bytes())
}
