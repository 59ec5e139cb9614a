//! Rendering of command results as text, JSON or CSV.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::UsageError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// A command result in every format it supports.
pub struct Output {
    pub text: String,
    pub json: Option<Value>,
    pub csv: Option<String>,
}

impl Output {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            json: None,
            csv: None,
        }
    }

    pub fn json(mut self, value: impl Serialize) -> Self {
        self.json = Some(serde_json::to_value(value).expect("output serializes"));
        self
    }

    pub fn csv<R: Serialize>(mut self, rows: impl IntoIterator<Item = R>) -> Self {
        self.csv = Some(to_csv(rows));
        self
    }

    /// CSV for every format; for data meant to be plotted.
    pub fn csv_only<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Self {
        let csv = to_csv(rows);
        Self {
            text: csv.clone(),
            json: None,
            csv: Some(csv),
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let unsupported = |name: &str| UsageError(format!("this command does not produce {name} output"));
        Ok(match format {
            Format::Text => {
                let mut t = self.text.clone();
                if !t.ends_with('\n') {
                    t.push('\n');
                }
                t
            }
            Format::Json => {
                let v = self.json.as_ref().ok_or_else(|| unsupported("JSON"))?;
                serde_json::to_string_pretty(v).expect("JSON values print") + "\n"
            }
            Format::Csv => self.csv.clone().ok_or_else(|| unsupported("CSV"))?,
        })
    }
}

pub fn to_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("CSV is UTF-8")
}

pub fn write(body: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}
