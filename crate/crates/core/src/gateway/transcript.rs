//! Append-only transcript of raw judge responses: newline-delimited JSON,
//! one record per attempt-final response. The transcript is what makes a run
//! exactly replayable.

use serde::{Deserialize, Serialize};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranscriptRecord {
    pub request_id: String,
    pub tool_id: String,
    /// Indicator id (or subdimension id at subdimension granularity).
    pub indicator_id: String,
    pub persona_domain: String,
    pub provider_name: String,
    pub model_id: String,
    /// Null for reasoning providers.
    pub temperature: Option<f64>,
    pub top_p: f64,
    pub content_hash: String,
    pub template_version: String,
    /// Verbatim judge output, never trimmed.
    pub raw_text: String,
    pub attempts: u32,
    /// Seconds since run start on the run's clock.
    pub timestamp: f64,
}

/// Canonical formatting for a nullable temperature used in replay keys.
pub fn temperature_key(temperature: Option<f64>) -> String {
    match temperature {
        Some(t) => format!("{t}"),
        None => "none".to_string(),
    }
}

impl TranscriptRecord {
    /// Key a replay backend serves responses by.
    pub fn replay_key(&self) -> String {
        replay_key(
            &self.tool_id,
            &self.indicator_id,
            &self.model_id,
            self.temperature,
            &self.content_hash,
        )
    }
}

pub fn replay_key(
    tool_id: &str,
    indicator_id: &str,
    model_id: &str,
    temperature: Option<f64>,
    content_hash: &str,
) -> String {
    format!(
        "{tool_id}|{indicator_id}|{model_id}|{}|{content_hash}",
        temperature_key(temperature)
    )
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("transcript I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("transcript line {line_no} is malformed: {source}")]
    MalformedLine {
        line_no: usize,
        source: serde_json::Error,
    },
}

/// Serialized appender; safe to share across worker threads.
pub struct TranscriptWriter {
    inner: Mutex<BufWriter<File>>,
}

impl TranscriptWriter {
    /// Open for appending, creating the file if needed.
    pub fn append_to(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(TranscriptWriter {
            inner: Mutex::new(BufWriter::new(file)),
        })
    }

    /// Append one record and flush, so an interrupted run loses at most the
    /// record being written.
    pub fn append(&self, record: &TranscriptRecord) -> std::io::Result<()> {
        let line = serde_json::to_string(record).expect("transcript record serializes");
        let mut writer = self.inner.lock().unwrap();
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()
    }
}

/// Read every record; empty and missing-file cases are not errors for an
/// empty path check, but a missing file is an I/O error.
pub fn read_transcript(path: &Path) -> Result<Vec<TranscriptRecord>, TranscriptError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TranscriptRecord =
            serde_json::from_str(&line).map_err(|source| TranscriptError::MalformedLine {
                line_no: idx + 1,
                source,
            })?;
        records.push(record);
    }
    Ok(records)
}
