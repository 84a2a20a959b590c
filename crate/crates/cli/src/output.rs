//! Where results go: files next to a stem path, or stdout.

use std::env;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;

/// Default output directory for relative `--out` paths and for runs without
/// `--out`.
pub const OUT_DIR_VAR: &str = "WHITHAM_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Debug, Clone)]
pub struct Sink {
    stem: Option<PathBuf>,
    format: Format,
}

fn strip_extension(p: &Path) -> PathBuf {
    match p.extension().and_then(|e| e.to_str()) {
        Some("json" | "csv") => p.with_extension(""),
        _ => p.to_path_buf(),
    }
}

impl Sink {
    pub fn new(out: Option<&Path>, default_stem: &str, format: Format) -> Self {
        let dir = env::var_os(OUT_DIR_VAR).filter(|d| !d.is_empty()).map(PathBuf::from);
        let stem = match (out, dir) {
            (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
            (Some(p), _) => Some(p.to_path_buf()),
            (None, Some(d)) => Some(d.join(default_stem)),
            (None, None) => None,
        };
        Self {
            stem: stem.map(|s| strip_extension(&s)),
            format,
        }
    }

    pub fn to_files(&self) -> bool {
        self.stem.is_some()
    }

    /// Write the outputs selected by the format. If the command has no output
    /// of the selected kind, whatever it has is written instead.
    pub fn emit(&self, json: Option<&str>, csv: Option<&str>) -> io::Result<()> {
        let (json, csv) = match (json.filter(|_| self.format.json()), csv.filter(|_| self.format.csv())) {
            (None, None) => (json, csv),
            selected => selected,
        };
        match &self.stem {
            Some(stem) => {
                if let Some(parent) = stem.parent().filter(|p| !p.as_os_str().is_empty()) {
                    fs::create_dir_all(parent)?;
                }
                for (ext, body) in [("json", json), ("csv", csv)] {
                    if let Some(body) = body {
                        let path = stem.with_extension(ext);
                        fs::write(&path, body)?;
                        eprintln!("wrote {}", path.display());
                    }
                }
            }
            None => {
                let mut out = io::stdout().lock();
                if let Some(j) = json {
                    out.write_all(j.as_bytes())?;
                }
                if let Some(c) = csv {
                    out.write_all(c.as_bytes())?;
                }
            }
        }
        Ok(())
    }
}
