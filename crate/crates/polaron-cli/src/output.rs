//! Deterministic artifact writers: CSV with fixed 17-significant-digit
//! formatting, ',' separators, LF line endings; JSON through serde_json
//! (sorted object keys), so identical runs produce byte-identical files.

use crate::Failure;
use std::io::Write;
use std::path::Path;

/// 17 significant digits, locale-independent.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = String::new();
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Write to the file, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::File::create(p)?.write_all(text.as_bytes())?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    emit(Some(path), text)
}
