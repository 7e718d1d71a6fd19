//! Rolls indicator scores up the hierarchy: subdimension, dimension,
//! mega-group, and two overall variants.
//!
//! The roll-up is an unweighted mean of means respecting the hierarchy
//! (`overall_hierarchical`), reported alongside a flat mean of all scored
//! indicators (`overall_flat`); 0-5 maps linearly onto 0-100 %. Unscored
//! indicators are excluded from every mean, never imputed — a level is
//! UNDEFINED (`None`) iff all of its children are.

use crate::judgment::JudgmentRecord;
use crate::schema::IndexSchema;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Identity of one (tool, provider, model, temperature) assessment cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellKey {
    pub tool_id: String,
    pub provider_name: String,
    pub model_id: String,
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolScorecard {
    pub tool_id: String,
    pub provider_name: String,
    pub model_id: String,
    pub temperature: Option<f64>,
    pub per_subdimension: BTreeMap<String, Option<f64>>,
    pub per_dimension: BTreeMap<String, Option<f64>>,
    pub per_mega_group: BTreeMap<String, Option<f64>>,
    pub overall_hierarchical: Option<f64>,
    pub overall_flat: Option<f64>,
    pub scored_indicator_count: usize,
    pub unscored_indicator_count: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregateError {
    #[error("duplicate judgment for unit {0}")]
    DuplicateJudgment(String),
    #[error("judgment references unknown unit {0}")]
    UnknownIndicator(String),
    #[error("judgment for {got} does not belong to cell {expected}")]
    MixedCell { expected: String, got: String },
}

fn check_cell(key: &CellKey, judgment: &JudgmentRecord) -> Result<(), AggregateError> {
    let matches = judgment.tool_id == key.tool_id
        && judgment.provider_name == key.provider_name
        && judgment.model_id == key.model_id
        && judgment.temperature == key.temperature;
    if matches {
        Ok(())
    } else {
        Err(AggregateError::MixedCell {
            expected: format!(
                "{}/{}/{:?}",
                key.tool_id, key.model_id, key.temperature
            ),
            got: format!(
                "{}/{}/{:?}",
                judgment.tool_id, judgment.model_id, judgment.temperature
            ),
        })
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

fn mean_of_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.flatten().collect();
    mean(&defined)
}

/// Aggregate indicator-level judgments for one assessment cell.
pub fn aggregate(
    key: &CellKey,
    judgments: &[JudgmentRecord],
    schema: &IndexSchema,
) -> Result<ToolScorecard, AggregateError> {
    let mut scores: BTreeMap<&str, u8> = BTreeMap::new();
    for judgment in judgments {
        check_cell(key, judgment)?;
        if schema.indicator(&judgment.indicator_id).is_none() {
            return Err(AggregateError::UnknownIndicator(judgment.indicator_id.clone()));
        }
        if scores.insert(&judgment.indicator_id, judgment.score).is_some() {
            return Err(AggregateError::DuplicateJudgment(judgment.indicator_id.clone()));
        }
    }

    let mut per_subdimension = BTreeMap::new();
    for sub in &schema.subdimensions {
        let sub_scores: Vec<f64> = schema
            .indicators
            .iter()
            .filter(|i| i.subdimension_id == sub.subdimension_id)
            .filter_map(|i| scores.get(i.indicator_id.as_str()))
            .map(|&s| s as f64)
            .collect();
        let percent = mean(&sub_scores).map(|m| m / 5.0 * 100.0);
        per_subdimension.insert(sub.subdimension_id.clone(), percent);
    }

    let flat = {
        let all: Vec<f64> = scores.values().map(|&s| s as f64).collect();
        mean(&all).map(|m| m / 5.0 * 100.0)
    };
    Ok(finish_scorecard(
        key,
        schema,
        per_subdimension,
        scores.len(),
        schema.indicators.len(),
        flat,
    ))
}

/// Aggregate subdimension-level judgments (subdimension granularity runs):
/// each judgment's unit id is a subdimension id and its score maps directly
/// to that subdimension's percent. Counts are in units of subdimensions.
pub fn aggregate_subdimensions(
    key: &CellKey,
    judgments: &[JudgmentRecord],
    schema: &IndexSchema,
) -> Result<ToolScorecard, AggregateError> {
    let mut scores: BTreeMap<&str, u8> = BTreeMap::new();
    for judgment in judgments {
        check_cell(key, judgment)?;
        if schema.subdimension(&judgment.indicator_id).is_none() {
            return Err(AggregateError::UnknownIndicator(judgment.indicator_id.clone()));
        }
        if scores.insert(&judgment.indicator_id, judgment.score).is_some() {
            return Err(AggregateError::DuplicateJudgment(judgment.indicator_id.clone()));
        }
    }

    let mut per_subdimension = BTreeMap::new();
    for sub in &schema.subdimensions {
        let percent = scores
            .get(sub.subdimension_id.as_str())
            .map(|&s| s as f64 / 5.0 * 100.0);
        per_subdimension.insert(sub.subdimension_id.clone(), percent);
    }

    let flat = {
        let all: Vec<f64> = scores.values().map(|&s| s as f64).collect();
        mean(&all).map(|m| m / 5.0 * 100.0)
    };
    Ok(finish_scorecard(
        key,
        schema,
        per_subdimension,
        scores.len(),
        schema.subdimensions.len(),
        flat,
    ))
}

fn finish_scorecard(
    key: &CellKey,
    schema: &IndexSchema,
    per_subdimension: BTreeMap<String, Option<f64>>,
    scored_count: usize,
    total_units: usize,
    overall_flat: Option<f64>,
) -> ToolScorecard {
    let mut per_dimension = BTreeMap::new();
    for dim in &schema.dimensions {
        let percent = mean_of_defined(
            schema
                .subdimensions
                .iter()
                .filter(|s| s.dimension_id == dim.dimension_id)
                .map(|s| per_subdimension[&s.subdimension_id]),
        );
        per_dimension.insert(dim.dimension_id.clone(), percent);
    }

    let mut per_mega_group = BTreeMap::new();
    for mg in &schema.mega_groups {
        let percent = mean_of_defined(
            schema
                .dimensions
                .iter()
                .filter(|d| d.mega_group_id == mg.mega_group_id)
                .map(|d| per_dimension[&d.dimension_id]),
        );
        per_mega_group.insert(mg.mega_group_id.clone(), percent);
    }

    let overall_hierarchical =
        mean_of_defined(schema.mega_groups.iter().map(|m| per_mega_group[&m.mega_group_id]));

    ToolScorecard {
        tool_id: key.tool_id.clone(),
        provider_name: key.provider_name.clone(),
        model_id: key.model_id.clone(),
        temperature: key.temperature,
        per_subdimension,
        per_dimension,
        per_mega_group,
        overall_hierarchical,
        overall_flat,
        scored_indicator_count: scored_count,
        unscored_indicator_count: total_units.saturating_sub(scored_count),
    }
}

/// Componentwise signed differences (a - b) in percentage points; UNDEFINED
/// propagates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScorecardDelta {
    pub tool_id: String,
    pub per_subdimension: BTreeMap<String, Option<f64>>,
    pub per_dimension: BTreeMap<String, Option<f64>>,
    pub per_mega_group: BTreeMap<String, Option<f64>>,
    pub overall_hierarchical: Option<f64>,
    pub overall_flat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("scorecards disagree on tool or schema: {0}")]
pub struct SchemaMismatch(pub String);

pub fn scorecard_delta(a: &ToolScorecard, b: &ToolScorecard) -> Result<ScorecardDelta, SchemaMismatch> {
    if a.tool_id != b.tool_id {
        return Err(SchemaMismatch(format!(
            "tool {} vs {}",
            a.tool_id, b.tool_id
        )));
    }
    let same_keys = |x: &BTreeMap<String, Option<f64>>, y: &BTreeMap<String, Option<f64>>| {
        x.len() == y.len() && x.keys().zip(y.keys()).all(|(a, b)| a == b)
    };
    if !same_keys(&a.per_subdimension, &b.per_subdimension)
        || !same_keys(&a.per_dimension, &b.per_dimension)
        || !same_keys(&a.per_mega_group, &b.per_mega_group)
    {
        return Err(SchemaMismatch("level keys differ".into()));
    }
    let diff_map = |x: &BTreeMap<String, Option<f64>>, y: &BTreeMap<String, Option<f64>>| {
        x.iter()
            .map(|(k, &va)| {
                let vb = y[k];
                (k.clone(), match (va, vb) {
                    (Some(va), Some(vb)) => Some(va - vb),
                    _ => None,
                })
            })
            .collect()
    };
    let diff = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => Some(x - y),
        _ => None,
    };
    Ok(ScorecardDelta {
        tool_id: a.tool_id.clone(),
        per_subdimension: diff_map(&a.per_subdimension, &b.per_subdimension),
        per_dimension: diff_map(&a.per_dimension, &b.per_dimension),
        per_mega_group: diff_map(&a.per_mega_group, &b.per_mega_group),
        overall_hierarchical: diff(a.overall_hierarchical, b.overall_hierarchical),
        overall_flat: diff(a.overall_flat, b.overall_flat),
    })
}
