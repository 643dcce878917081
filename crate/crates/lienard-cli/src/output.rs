//! File output helpers: atomic writes and full-precision CSV formatting.

use std::fs;
use std::io;
use std::path::Path;

/// Write via a temp file in the same directory, then rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

/// 17 significant digits, enough to round-trip an f64.
pub fn full(v: f64) -> String {
    format!("{v:.16e}")
}
