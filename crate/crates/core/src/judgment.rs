//! Extracts the integer score and justification from raw judge output under
//! a strict grammar. No post-hoc correction: scores are returned exactly as
//! parsed or rejected, never rounded, clamped, or inferred.

use crate::gateway::transcript::{read_transcript, TranscriptError};
use regex::Regex;
use serde::Serialize;
use std::path::Path;
use std::sync::OnceLock;
use thiserror::Error;

/// One parsed judge output with full provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JudgmentRecord {
    pub tool_id: String,
    /// Indicator id, or subdimension id for subdimension-granularity runs.
    pub indicator_id: String,
    pub persona_domain: String,
    pub provider_name: String,
    pub model_id: String,
    pub temperature: Option<f64>,
    /// Integer in 0..=5.
    pub score: u8,
    /// Non-empty after trimming.
    pub justification: String,
    /// Transcript key (the request id of the record this was parsed from).
    pub raw_ref: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedJudgment {
    pub score: u8,
    pub justification: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseJudgmentError {
    #[error("no score found")]
    NoScoreFound,
    #[error("score {0} outside 0-5")]
    ScoreOutOfRange(i64),
    #[error("non-integer score {0:?}")]
    NonIntegerScore(String),
    #[error("justification empty after trimming")]
    EmptyJustification,
}

fn score_line_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^\s*score\s*:\s*(.*?)\s*$").unwrap())
}

/// Classify a line: `None` if it is not a score line; otherwise the parsed
/// score or the grammar error it carries.
fn score_line(line: &str) -> Option<Result<u8, ParseJudgmentError>> {
    let caps = score_line_re().captures(line)?;
    let token = caps.get(1).unwrap().as_str();
    let token = token.strip_suffix('.').unwrap_or(token);
    if let Ok(value) = token.parse::<i64>() {
        return Some(if (0..=5).contains(&value) {
            Ok(value as u8)
        } else {
            Err(ParseJudgmentError::ScoreOutOfRange(value))
        });
    }
    if token.parse::<f64>().is_ok() {
        return Some(Err(ParseJudgmentError::NonIntegerScore(token.to_string())));
    }
    None
}

/// Find the first standalone integer token in 0-5 within `line`. A digit
/// run counts only when it is not glued to letters, `_`, a sign, or a
/// decimal point on either side (so "WP_T03" and "4.5" never match).
fn first_standalone_score(line: &str) -> Option<(u8, usize)> {
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_ascii_digit() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let prev_ok = if start == 0 {
            true
        } else {
            let p = chars[start - 1];
            !(p.is_alphanumeric() || p == '_' || p == '.' || p == '-')
        };
        let next_ok = if i >= chars.len() {
            true
        } else {
            let n = chars[i];
            let fractional = n == '.' && i + 1 < chars.len() && chars[i + 1].is_ascii_digit();
            !(n.is_alphanumeric() || n == '_' || fractional)
        };
        if prev_ok && next_ok {
            let token: String = chars[start..i].iter().collect();
            if let Ok(value) = token.parse::<u8>() {
                if value <= 5 {
                    let byte_end = line
                        .char_indices()
                        .nth(i)
                        .map(|(b, _)| b)
                        .unwrap_or(line.len());
                    return Some((value, byte_end));
                }
            }
        }
    }
    None
}

fn trim_justification(text: &str) -> String {
    text.trim()
        .trim_start_matches(|c: char| c.is_whitespace() || matches!(c, '.' | ',' | ':' | ';' | ')' | '-' | '!'))
        .trim()
        .to_string()
}

/// Apply the output grammar, in priority order:
///
/// 1. the first line of the form `Score: <integer 0-5>` (case-insensitive,
///    optional whitespace) — the justification is all remaining non-score
///    text, trimmed;
/// 2. otherwise, the first standalone integer token in 0-5 within the first
///    line — the remainder is the justification.
pub fn parse_judgment(raw_text: &str) -> Result<ParsedJudgment, ParseJudgmentError> {
    let lines: Vec<&str> = raw_text.lines().collect();

    let mut score: Option<u8> = None;
    let mut warnings = Vec::new();
    let mut non_score_lines: Vec<&str> = Vec::new();
    for line in &lines {
        match score_line(line) {
            Some(result) => {
                if score.is_none() {
                    score = Some(result?);
                } else {
                    warnings.push("multiple score lines; first used".to_string());
                }
            }
            None => non_score_lines.push(line),
        }
    }
    if let Some(score) = score {
        let justification = trim_justification(&non_score_lines.join("\n"));
        if justification.is_empty() {
            return Err(ParseJudgmentError::EmptyJustification);
        }
        return Ok(ParsedJudgment {
            score,
            justification,
            warnings,
        });
    }

    let first_line = lines.first().copied().unwrap_or("");
    let (score, after) =
        first_standalone_score(first_line).ok_or(ParseJudgmentError::NoScoreFound)?;
    let mut remainder = first_line[after..].to_string();
    for line in &lines[1..] {
        remainder.push('\n');
        remainder.push_str(line);
    }
    let justification = trim_justification(&remainder);
    if justification.is_empty() {
        return Err(ParseJudgmentError::EmptyJustification);
    }
    Ok(ParsedJudgment {
        score,
        justification,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseFailure {
    pub raw_ref: String,
    pub reason: String,
}

/// Outcome of parsing a whole transcript: every record yields exactly one
/// judgment or one failure.
#[derive(Debug, Clone, Default)]
pub struct TranscriptParse {
    /// Canonical order: (tool_id, indicator_id, model_id, temperature).
    pub judgments: Vec<JudgmentRecord>,
    pub failures: Vec<ParseFailure>,
    pub record_count: usize,
}

/// Parse every record of a transcript file. Parse failures are data, not
/// errors; only I/O failures abort.
pub fn parse_transcript(path: &Path) -> Result<TranscriptParse, std::io::Error> {
    let records = match read_transcript(path) {
        Ok(records) => records,
        Err(TranscriptError::Io(e)) => return Err(e),
        Err(TranscriptError::MalformedLine { line_no, source }) => {
            // a malformed line is unrecoverable for the records after it;
            // surface it as an I/O-level corruption
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("transcript line {line_no}: {source}"),
            ));
        }
    };
    let mut out = TranscriptParse {
        record_count: records.len(),
        ..Default::default()
    };
    for record in records {
        match parse_judgment(&record.raw_text) {
            Ok(parsed) => out.judgments.push(JudgmentRecord {
                tool_id: record.tool_id,
                indicator_id: record.indicator_id,
                persona_domain: record.persona_domain,
                provider_name: record.provider_name,
                model_id: record.model_id,
                temperature: record.temperature,
                score: parsed.score,
                justification: parsed.justification,
                raw_ref: record.request_id,
                warnings: parsed.warnings,
            }),
            Err(e) => out.failures.push(ParseFailure {
                raw_ref: record.request_id,
                reason: e.to_string(),
            }),
        }
    }
    out.judgments.sort_by(|a, b| {
        (
            &a.tool_id,
            &a.indicator_id,
            &a.model_id,
            a.temperature.is_some(),
        )
            .cmp(&(&b.tool_id, &b.indicator_id, &b.model_id, b.temperature.is_some()))
            .then_with(|| {
                a.temperature
                    .unwrap_or(0.0)
                    .total_cmp(&b.temperature.unwrap_or(0.0))
            })
    });
    Ok(out)
}
