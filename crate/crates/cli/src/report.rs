use std::fmt::Display;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

pub const EXIT_OK: u8 = 0;
pub const EXIT_DIAGNOSTIC: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_UNSAT: u8 = 10;

/// Line-oriented `key: value` report, optionally followed by a document.
/// Without an output file the document goes to stdout and the report lines
/// become `;` comments so that stdout stays a valid input file.
#[derive(Debug, Default)]
pub struct Report {
    pub code: u8,
    lines: Vec<(String, String)>,
    document: Option<String>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn set_document(&mut self, text: String) {
        self.document = Some(text);
    }

    pub fn emit(&self) {
        print!("{}", self.render());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let prefix = if self.document.is_some() { "; " } else { "" };
        for (k, v) in &self.lines {
            out.push_str(&format!("{prefix}{k}: {v}\n"));
        }
        if let Some(doc) = &self.document {
            out.push_str(doc);
        }
        out
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    /// Report lines printed to stdout before the error.
    pub context: Vec<String>,
}

impl Failure {
    pub fn new(code: u8, message: impl Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
            context: Vec::new(),
        }
    }

    pub fn with_context(mut self, line: impl Display) -> Self {
        self.context.push(line.to_string());
        self
    }
}

pub fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))
}

pub fn write_output(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::new(EXIT_IO, format!("cannot write {}: {e}", path.display())))
}

pub fn digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    let hex: String = hash.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}
