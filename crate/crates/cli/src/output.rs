use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use tempfile::NamedTempFile;

/// Writes `contents` to a sibling temporary file and renames it over `path`,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// One `key=value` result line.
#[derive(Default)]
pub struct Line {
    text: String,
}

impl Line {
    pub fn field(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        if !self.text.is_empty() {
            self.text.push(' ');
        }
        let _ = write!(self.text, "{key}={value}");
        self
    }

    pub fn num(self, key: &str, x: f64, precision: u8) -> Self {
        self.field(key, fixed(x, precision))
    }

    pub fn print(mut self) {
        self.text.push('\n');
        stdout(&self.text);
    }
}

pub fn fixed(x: f64, precision: u8) -> String {
    let p = precision as usize;
    format!("{x:.p$}")
}

/// Comma-separated fixed-point list, `-` when empty.
pub fn list(xs: &[f64], precision: u8) -> String {
    if xs.is_empty() {
        "-".into()
    } else {
        xs.iter().map(|&x| fixed(x, precision)).collect::<Vec<_>>().join(",")
    }
}

/// Prints to stdout; a closed pipe downstream is not an error.
pub fn stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: writing to stdout: {e}");
        }
    }
}
