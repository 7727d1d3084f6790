use std::fs;
use std::path::{Path, PathBuf};

use changepoint_core::format::sig6;

use crate::Result;

/// Files of one command run, all written under one directory.
pub struct OutputDir {
    dir: PathBuf,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        Ok(path)
    }
}

/// Comma-separated rows with a header line.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// `key: value` report lines.
#[derive(Default)]
pub struct Report {
    text: String,
}

impl Report {
    pub fn line(&mut self, key: &str, value: impl AsRef<str>) {
        self.text.push_str(key);
        self.text.push_str(": ");
        self.text.push_str(value.as_ref());
        self.text.push('\n');
    }

    pub fn num(&mut self, key: &str, value: f64) {
        self.line(key, sig6(value));
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Confidence level of `alpha` as a percentage, e.g. `95`.
pub fn confidence(alpha: f64) -> String {
    let pct = ((1.0 - alpha) * 100.0 * 1e6).round() / 1e6;
    format!("{pct}%")
}
