//! Per-tool evidence: innovator responses, human baseline scores, and
//! completeness diagnostics.

use crate::schema::IndexSchema;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollectionMode {
    GuidedInterview,
    StandaloneForm,
    Unknown,
}

/// One tool's full evidence base. Response text is never normalized or
/// truncated at load time; an absent key means the indicator was unanswered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolDossier {
    pub tool_id: String,
    pub purpose: String,
    pub tool_summary: String,
    /// Metadata only; reports may stratify by modality but behavior never
    /// depends on it.
    pub collection_mode: CollectionMode,
    pub responses: BTreeMap<String, String>,
}

impl ToolDossier {
    /// A response counts as answered only if present and non-blank after trim.
    pub fn answered(&self, indicator_id: &str) -> Option<&str> {
        self.responses
            .get(indicator_id)
            .map(|s| s.as_str())
            .filter(|s| !s.trim().is_empty())
    }
}

/// Per-tool overall human scores, as percentages in [0, 100].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HumanBaseline(pub BTreeMap<String, f64>);

impl HumanBaseline {
    pub fn score(&self, tool_id: &str) -> Option<f64> {
        self.0.get(tool_id).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub tool_id: String,
    pub unanswered_count: usize,
    /// Unanswered indicator ids in schema declaration order.
    pub unanswered_ids: Vec<String>,
    pub answered_fraction: f64,
}

#[derive(Debug, Error)]
pub enum DossierError {
    #[error("cannot read dossier file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed dossier file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("dossier {tool_id} keys response by unknown indicator {indicator_id}")]
    UnknownIndicator { tool_id: String, indicator_id: String },
    #[error("dossier has empty tool_id")]
    EmptyToolId,
}

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("cannot read baseline file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed baseline file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("baseline score for {tool_id} is {value}, outside [0, 100]")]
    Range { tool_id: String, value: f64 },
}

/// Load a dossier and check every response key against the schema.
pub fn load_dossier(path: &Path, schema: &IndexSchema) -> Result<ToolDossier, DossierError> {
    let text = std::fs::read_to_string(path)?;
    let dossier: ToolDossier = serde_json::from_str(&text)?;
    if dossier.tool_id.is_empty() {
        return Err(DossierError::EmptyToolId);
    }
    for key in dossier.responses.keys() {
        if schema.indicator(key).is_none() {
            return Err(DossierError::UnknownIndicator {
                tool_id: dossier.tool_id.clone(),
                indicator_id: key.clone(),
            });
        }
    }
    Ok(dossier)
}

/// Count unanswered indicators: key absent or value whitespace-only.
pub fn completeness(dossier: &ToolDossier, schema: &IndexSchema) -> CompletenessReport {
    let unanswered_ids: Vec<String> = schema
        .indicators
        .iter()
        .filter(|ind| dossier.answered(&ind.indicator_id).is_none())
        .map(|ind| ind.indicator_id.clone())
        .collect();
    let total = schema.indicators.len();
    let unanswered_count = unanswered_ids.len();
    let answered_fraction = if total == 0 {
        1.0
    } else {
        1.0 - unanswered_count as f64 / total as f64
    };
    CompletenessReport {
        tool_id: dossier.tool_id.clone(),
        unanswered_count,
        unanswered_ids,
        answered_fraction,
    }
}

/// Load the tool_id -> human percentage map, rejecting out-of-range values.
pub fn load_baseline(path: &Path) -> Result<HumanBaseline, BaselineError> {
    let text = std::fs::read_to_string(path)?;
    let map: BTreeMap<String, f64> = serde_json::from_str(&text)?;
    for (tool_id, value) in &map {
        if !value.is_finite() || *value < 0.0 || *value > 100.0 {
            return Err(BaselineError::Range {
                tool_id: tool_id.clone(),
                value: *value,
            });
        }
    }
    Ok(HumanBaseline(map))
}
