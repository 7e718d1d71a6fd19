//! Human-vs-AI alignment statistics: signed deviations, MAE and signed
//! means, Pearson correlations with per-model summaries, and the
//! completeness-divergence rank correlation.
//!
//! Everything is computed in full precision; rounding happens only at render
//! time (see [`crate::report`]).

use crate::aggregate::ToolScorecard;
use crate::dossier::{CompletenessReport, HumanBaseline};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverallVariant {
    #[default]
    Hierarchical,
    Flat,
}

/// One (provider, model, temperature) column of the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRef {
    pub provider_name: String,
    pub model_id: String,
    pub temperature: Option<f64>,
}

impl CellRef {
    /// Column label: `model@temperature`, or bare `model` for reasoning
    /// providers.
    pub fn label(&self) -> String {
        match self.temperature {
            Some(t) => format!("{}@{}", self.model_id, t),
            None => self.model_id.clone(),
        }
    }

    fn sort_key(&self) -> (String, u8, f64) {
        // temperature ascending, temperature-less cells last
        match self.temperature {
            Some(t) => (self.model_id.clone(), 0, t),
            None => (self.model_id.clone(), 1, 0.0),
        }
    }
}

/// Signed AI-minus-human grid: rows are tools (lexicographic), columns are
/// cells (model then temperature). An entry is defined iff both sides exist.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationMatrix {
    pub tools: Vec<String>,
    pub cells: Vec<CellRef>,
    /// entries[tool_index][cell_index], percentage points, full precision.
    pub entries: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessJoin {
    pub tool_id: String,
    pub unanswered_count: Option<usize>,
    pub answered_fraction: Option<f64>,
    /// Mean |deviation| for the tool across all defined cells.
    pub mean_abs_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentReport {
    pub deviation_matrix: DeviationMatrix,
    /// Human score per included tool.
    pub human: BTreeMap<String, f64>,
    /// AI overall percents, same shape as the deviation entries.
    pub ai_overall: Vec<Vec<Option<f64>>>,
    pub mae_by_cell: Vec<Option<f64>>,
    pub signed_mean_by_cell: Vec<Option<f64>>,
    pub pearson_by_cell: Vec<Option<f64>>,
    /// model_id -> (mean, sample std over its temperature cells); present
    /// only for models with at least two correlated cells.
    pub pearson_summary_by_model: BTreeMap<String, (f64, f64)>,
    pub completeness: Vec<CompletenessJoin>,
    /// Spearman rank correlation between unanswered counts and per-tool
    /// mean |deviation|.
    pub completeness_rank_corr: Option<f64>,
    /// Tools dropped because they were missing from scorecards or baseline.
    pub excluded_tools: Vec<String>,
    pub coverage_notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("zero variance in input")]
    ZeroVariance,
    #[error("insufficient overlap: only {0} tool(s) present in both scorecards and baseline")]
    InsufficientOverlap(usize),
    #[error("duplicate scorecard for tool {tool}, cell {cell}")]
    DuplicateCell { tool: String, cell: String },
}

/// AI minus human, in percentage points, exact arithmetic.
pub fn deviation(ai_percent: f64, human_percent: f64) -> f64 {
    ai_percent - human_percent
}

/// (mean of |deviation|, mean of signed deviation) over one cell's column.
pub fn cell_means(deviations: &[f64]) -> Result<(f64, f64), AnalyticsError> {
    if deviations.is_empty() {
        return Err(AnalyticsError::EmptyInput);
    }
    let n = deviations.len() as f64;
    let mae = deviations.iter().map(|d| d.abs()).sum::<f64>() / n;
    let signed = deviations.iter().sum::<f64>() / n;
    Ok((mae, signed))
}

/// Standard product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, AnalyticsError> {
    if x.len() != y.len() {
        return Err(AnalyticsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(AnalyticsError::TooFewPoints {
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalyticsError::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// (arithmetic mean, sample standard deviation with the n-1 convention).
pub fn summarize_correlations(values: &[f64]) -> Result<(f64, f64), AnalyticsError> {
    if values.len() < 2 {
        return Err(AnalyticsError::TooFewPoints {
            needed: 2,
            got: values.len(),
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, var.sqrt()))
}

/// Average ranks for ties, ascending.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg_rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, AnalyticsError> {
    if x.len() != y.len() {
        return Err(AnalyticsError::LengthMismatch(x.len(), y.len()));
    }
    pearson(&ranks(x), &ranks(y))
}

/// Assemble the full alignment report from per-cell scorecards, the human
/// baseline, and completeness diagnostics. Tools missing from either side
/// are excluded and listed in `excluded_tools` with a coverage note.
pub fn build_report(
    scorecards: &[ToolScorecard],
    baseline: &HumanBaseline,
    completeness: &[CompletenessReport],
    variant: OverallVariant,
) -> Result<AlignmentReport, AnalyticsError> {
    let overall = |card: &ToolScorecard| match variant {
        OverallVariant::Hierarchical => card.overall_hierarchical,
        OverallVariant::Flat => card.overall_flat,
    };

    let scored_tools: BTreeSet<&str> = scorecards.iter().map(|c| c.tool_id.as_str()).collect();
    let baseline_tools: BTreeSet<&str> = baseline.0.keys().map(|s| s.as_str()).collect();

    let included: Vec<String> = scored_tools
        .intersection(&baseline_tools)
        .map(|s| s.to_string())
        .collect();
    if included.len() < 2 {
        return Err(AnalyticsError::InsufficientOverlap(included.len()));
    }
    let mut excluded_tools: Vec<String> = scored_tools
        .symmetric_difference(&baseline_tools)
        .map(|s| s.to_string())
        .collect();
    excluded_tools.sort();
    let mut coverage_notes = Vec::new();
    for tool in &excluded_tools {
        let side = if baseline_tools.contains(tool.as_str()) {
            "missing from scorecards"
        } else {
            "missing from baseline"
        };
        coverage_notes.push(format!("tool {tool} excluded: {side}"));
    }

    let mut cells: Vec<CellRef> = Vec::new();
    for card in scorecards {
        let cell = CellRef {
            provider_name: card.provider_name.clone(),
            model_id: card.model_id.clone(),
            temperature: card.temperature,
        };
        if !cells.contains(&cell) {
            cells.push(cell);
        }
    }
    cells.sort_by(|a, b| a.sort_key().partial_cmp(&b.sort_key()).unwrap());

    let mut ai_overall = vec![vec![None; cells.len()]; included.len()];
    for card in scorecards {
        let Some(tool_idx) = included.iter().position(|t| *t == card.tool_id) else {
            continue;
        };
        let cell = CellRef {
            provider_name: card.provider_name.clone(),
            model_id: card.model_id.clone(),
            temperature: card.temperature,
        };
        let cell_idx = cells.iter().position(|c| *c == cell).unwrap();
        if ai_overall[tool_idx][cell_idx].is_some() {
            return Err(AnalyticsError::DuplicateCell {
                tool: card.tool_id.clone(),
                cell: cell.label(),
            });
        }
        ai_overall[tool_idx][cell_idx] = overall(card);
    }

    let human: BTreeMap<String, f64> = included
        .iter()
        .map(|t| (t.clone(), baseline.score(t).expect("included tool has baseline")))
        .collect();

    let entries: Vec<Vec<Option<f64>>> = included
        .iter()
        .enumerate()
        .map(|(ti, tool)| {
            let h = human[tool];
            ai_overall[ti]
                .iter()
                .map(|ai| ai.map(|ai| deviation(ai, h)))
                .collect()
        })
        .collect();

    let mut mae_by_cell = Vec::with_capacity(cells.len());
    let mut signed_mean_by_cell = Vec::with_capacity(cells.len());
    let mut pearson_by_cell = Vec::with_capacity(cells.len());
    for ci in 0..cells.len() {
        let column: Vec<f64> = entries.iter().filter_map(|row| row[ci]).collect();
        match cell_means(&column) {
            Ok((mae, signed)) => {
                mae_by_cell.push(Some(mae));
                signed_mean_by_cell.push(Some(signed));
            }
            Err(_) => {
                mae_by_cell.push(None);
                signed_mean_by_cell.push(None);
            }
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (ti, tool) in included.iter().enumerate() {
            if let Some(ai) = ai_overall[ti][ci] {
                xs.push(human[tool]);
                ys.push(ai);
            }
        }
        pearson_by_cell.push(pearson(&xs, &ys).ok());
    }

    let mut by_model: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (cell, r) in cells.iter().zip(&pearson_by_cell) {
        if let Some(r) = r {
            by_model.entry(cell.model_id.clone()).or_default().push(*r);
        }
    }
    let pearson_summary_by_model: BTreeMap<String, (f64, f64)> = by_model
        .into_iter()
        .filter_map(|(model, rs)| summarize_correlations(&rs).ok().map(|s| (model, s)))
        .collect();

    let completeness_by_tool: BTreeMap<&str, &CompletenessReport> = completeness
        .iter()
        .map(|c| (c.tool_id.as_str(), c))
        .collect();
    let completeness_join: Vec<CompletenessJoin> = included
        .iter()
        .enumerate()
        .map(|(ti, tool)| {
            let devs: Vec<f64> = entries[ti].iter().flatten().copied().collect();
            let mean_abs = if devs.is_empty() {
                None
            } else {
                Some(devs.iter().map(|d| d.abs()).sum::<f64>() / devs.len() as f64)
            };
            let report = completeness_by_tool.get(tool.as_str());
            CompletenessJoin {
                tool_id: tool.clone(),
                unanswered_count: report.map(|r| r.unanswered_count),
                answered_fraction: report.map(|r| r.answered_fraction),
                mean_abs_deviation: mean_abs,
            }
        })
        .collect();

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for join in &completeness_join {
        if let (Some(unanswered), Some(mean_abs)) = (join.unanswered_count, join.mean_abs_deviation)
        {
            xs.push(unanswered as f64);
            ys.push(mean_abs);
        }
    }
    let completeness_rank_corr = spearman(&xs, &ys).ok();

    Ok(AlignmentReport {
        deviation_matrix: DeviationMatrix {
            tools: included,
            cells,
            entries,
        },
        human,
        ai_overall,
        mae_by_cell,
        signed_mean_by_cell,
        pearson_by_cell,
        pearson_summary_by_model,
        completeness: completeness_join,
        completeness_rank_corr,
        excluded_tools,
        coverage_notes,
    })
}
