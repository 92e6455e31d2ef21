use serde_json::Value;
use symval_core::verify::Status;

use crate::config::OutputFormat;

/// One command's result in all three renderings.
pub struct Output {
    pub json: Value,
    pub text: String,
    /// header row first
    pub csv: Vec<Vec<String>>,
    pub status: Option<Status>,
}

impl Output {
    pub fn new(json: Value, text: String, csv: Vec<Vec<String>>) -> Output {
        Output { json, text, csv, status: None }
    }

    pub fn with_status(mut self, status: Status) -> Output {
        self.status = Some(status);
        self
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => {
                let mut t = self.text.clone();
                if !t.ends_with('\n') {
                    t.push('\n');
                }
                t
            }
            OutputFormat::Json => {
                let mut t = serde_json::to_string_pretty(&self.json).expect("serializable");
                t.push('\n');
                t
            }
            OutputFormat::Csv => csv_string(&self.csv),
        }
    }
}

pub fn csv_string(rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
