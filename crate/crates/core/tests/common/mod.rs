//! Shared reference data and helpers for the integration suites.
//!
//! The deviation grid below is the resolved reference dataset: the published
//! deviation table with four cells corrected using the published six-decimal
//! correlations as a checksum (the two printed tables disagree on five
//! cells; the correlations identify which value actually produced the
//! published statistics in each case). `RAW_PRINTED_DEV` keeps the table
//! exactly as printed for the tests that document the discrepancy.

#![allow(dead_code)]

use mdii_core::analytics::OverallVariant;
use mdii_core::dossier::{load_baseline, load_dossier, HumanBaseline, ToolDossier};
use mdii_core::gateway::transcript::{TranscriptRecord, TranscriptWriter};
use mdii_core::gateway::{DispatchPolicy, ProviderConfig, ProviderKind};
use mdii_core::prompt::{build_prompt, TemplateSet, TokenBudget};
use mdii_core::run::{request_id, BackendMode, Granularity, RunConfig, UnansweredMode};
use mdii_core::schema::{load_schema, IndexSchema};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const TOOLS: [&str; 9] = [
    "WP_T01", "INT_T02", "WP_T02", "WP_T03", "WP_T04", "WP_T05", "WP_T06", "WP_T07", "WP_T09",
];

pub const HUMAN: [f64; 9] = [39.0, 63.0, 43.0, 49.0, 42.0, 52.0, 56.0, 47.0, 60.0];

/// (provider_name, model_id), in the reference column order of the grids.
pub const MODELS: [(&str, &str); 3] = [("xai", "grok"), ("google", "gemini"), ("openai", "gpt-4o")];

pub const TEMPERATURES: [f64; 3] = [0.3, 0.7, 0.9];

/// Resolved signed deviations, indexed [model][temperature][tool].
pub const RESOLVED_DEV: [[[f64; 9]; 3]; 3] = [
    // grok
    [
        [-4.0, -14.0, -2.0, -2.0, -1.0, -7.0, -7.0, -11.0, -5.0],
        [-6.0, -16.0, -2.0, -10.0, -2.0, -7.0, -6.0, -6.0, -6.0],
        [-1.0, -7.0, -1.0, -5.0, 2.0, -2.0, -6.0, -6.0, -5.0],
    ],
    // gemini
    [
        [-4.0, -18.0, -4.0, -6.0, -1.0, -6.0, -13.0, -13.0, -10.0],
        [-6.0, -17.0, -4.0, -8.0, -3.0, -7.0, -13.0, -13.0, -10.0],
        [-4.0, -20.0, -5.0, -6.0, -2.0, -7.0, -14.0, -11.0, -10.0],
    ],
    // gpt-4o
    [
        [-6.0, -13.0, -11.0, -18.0, 0.0, -14.0, -12.0, -12.0, -8.0],
        [-10.0, -16.0, -15.0, -13.0, -3.0, -13.0, -13.0, -13.0, -11.0],
        [-6.0, -15.0, -10.0, -19.0, -4.0, -13.0, -12.0, -11.0, -12.0],
    ],
];

/// The deviation heat-map exactly as printed, where it differs from the
/// resolved grid: grok@0.3 WP_T04 = 0, grok@0.7 INT_T02 = -17,
/// gemini@0.7 INT_T02 = -16 and WP_T04 = -2, gpt-4o@0.7 INT_T02 = -17.
pub const RAW_PRINTED_DEV: [[[f64; 9]; 3]; 3] = [
    [
        [-4.0, -14.0, -2.0, -2.0, 0.0, -7.0, -7.0, -11.0, -5.0],
        [-6.0, -17.0, -2.0, -10.0, -2.0, -7.0, -6.0, -6.0, -6.0],
        [-1.0, -7.0, -1.0, -5.0, 2.0, -2.0, -6.0, -6.0, -5.0],
    ],
    [
        [-4.0, -18.0, -4.0, -6.0, -1.0, -6.0, -13.0, -13.0, -10.0],
        [-6.0, -16.0, -4.0, -8.0, -2.0, -7.0, -13.0, -13.0, -10.0],
        [-4.0, -20.0, -5.0, -6.0, -2.0, -7.0, -14.0, -11.0, -10.0],
    ],
    [
        [-6.0, -13.0, -11.0, -18.0, 0.0, -14.0, -12.0, -12.0, -8.0],
        [-10.0, -17.0, -15.0, -13.0, -3.0, -13.0, -13.0, -13.0, -11.0],
        [-6.0, -15.0, -10.0, -19.0, -4.0, -13.0, -12.0, -11.0, -12.0],
    ],
];

/// Published Pearson correlations, indexed [model][temperature].
pub const PUBLISHED_PEARSON: [[f64; 3]; 3] = [
    [0.853033, 0.86664, 0.9488],
    [0.763124, 0.849584, 0.761891],
    [0.793518, 0.8901, 0.844417],
];

/// Published per-cell averages, as positive integer percents.
pub const PUBLISHED_AVG_PCT: [[i64; 3]; 3] = [[6, 7, 3], [8, 9, 9], [10, 12, 11]];

/// Published (average, sample std) per model row.
pub const PUBLISHED_SUMMARY: [(f64, f64); 3] = [
    (0.889491, 0.051812),
    (0.791533, 0.050277),
    (0.842678, 0.048314),
];

/// Published unanswered-question counts, same tool order as `TOOLS`.
pub const UNANSWERED: [usize; 9] = [8, 25, 16, 28, 14, 29, 23, 22, 12];

pub fn repo_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(name)
}

pub fn fixture_schema() -> IndexSchema {
    load_schema(&repo_path("fixtures/schema.json")).unwrap()
}

pub fn fixture_templates() -> TemplateSet {
    TemplateSet::load(&repo_path("templates")).unwrap()
}

pub fn fixture_baseline() -> HumanBaseline {
    load_baseline(&repo_path("fixtures/baseline.json")).unwrap()
}

pub fn fixture_dossier(schema: &IndexSchema, tool: &str) -> ToolDossier {
    load_dossier(
        &repo_path(&format!("fixtures/dossiers/{tool}.json")),
        schema,
    )
    .unwrap()
}

pub fn stochastic_provider(name: &str, model: &str) -> ProviderConfig {
    ProviderConfig {
        provider_name: name.into(),
        model_id: model.into(),
        kind: ProviderKind::Stochastic,
        temperature: None,
        top_p: 0.9,
        max_output_tokens: 512,
        endpoint: None,
        credentials_ref: None,
    }
}

pub fn reasoning_provider(name: &str, model: &str) -> ProviderConfig {
    ProviderConfig {
        kind: ProviderKind::Reasoning,
        ..stochastic_provider(name, model)
    }
}

// ------------------------------------------------------- score synthesis

fn stable_hash(parts: &[&str]) -> u64 {
    let hex = mdii_core::util::sha256_parts(parts);
    let bytes = hex::decode(&hex).unwrap();
    u64::from_be_bytes(bytes[..8].try_into().unwrap())
}

/// Per-indicator weight of a +1 score step on the hierarchical overall, in
/// percentage points. The roll-up is linear in the scores once every
/// indicator is scored.
fn indicator_weights(schema: &IndexSchema) -> Vec<f64> {
    let mut subs_per_dim: BTreeMap<&str, usize> = BTreeMap::new();
    for sub in &schema.subdimensions {
        *subs_per_dim.entry(sub.dimension_id.as_str()).or_default() += 1;
    }
    let mut dims_per_mg: BTreeMap<&str, usize> = BTreeMap::new();
    for dim in &schema.dimensions {
        *dims_per_mg.entry(dim.mega_group_id.as_str()).or_default() += 1;
    }
    let mut inds_per_sub: BTreeMap<&str, usize> = BTreeMap::new();
    for ind in &schema.indicators {
        *inds_per_sub.entry(ind.subdimension_id.as_str()).or_default() += 1;
    }
    let mg_count = schema.mega_groups.len();
    schema
        .indicators
        .iter()
        .map(|ind| {
            let sub = schema.subdimension(&ind.subdimension_id).unwrap();
            let dim = schema.dimension(&sub.dimension_id).unwrap();
            let n_ind = inds_per_sub[ind.subdimension_id.as_str()];
            let n_sub = subs_per_dim[sub.dimension_id.as_str()];
            let n_dim = dims_per_mg[dim.mega_group_id.as_str()];
            20.0 / (n_ind as f64 * n_sub as f64 * n_dim as f64 * mg_count as f64)
        })
        .collect()
}

/// Integer 0-5 scores for every indicator whose hierarchical overall lands
/// within 0.40 pp of `target`. Deterministic in `seed`.
pub fn synth_scores(schema: &IndexSchema, target: f64, seed: u64) -> Vec<u8> {
    let weights = indicator_weights(schema);
    let base = (target / 20.0).round().clamp(0.0, 5.0) as i64;
    let mut scores: Vec<i64> = schema
        .indicators
        .iter()
        .map(|ind| {
            let jitter = (stable_hash(&[&seed.to_string(), &ind.indicator_id]) % 3) as i64 - 1;
            (base + jitter).clamp(0, 5)
        })
        .collect();

    let mut overall: f64 = scores
        .iter()
        .zip(&weights)
        .map(|(&s, &w)| s as f64 * w)
        .sum();
    for _ in 0..10_000 {
        let err = target - overall;
        if err.abs() <= 0.40 {
            break;
        }
        let direction: i64 = if err > 0.0 { 1 } else { -1 };
        // largest movable weight not exceeding |err|
        let mut best: Option<(usize, f64)> = None;
        let mut smallest_movable: Option<(usize, f64)> = None;
        for (i, &w) in weights.iter().enumerate() {
            let next = scores[i] + direction;
            if !(0..=5).contains(&next) {
                continue;
            }
            if smallest_movable.is_none_or(|(_, sw)| w < sw) {
                smallest_movable = Some((i, w));
            }
            if w <= err.abs() && best.is_none_or(|(_, bw)| w > bw) {
                best = Some((i, w));
            }
        }
        let (idx, w) = best.or(smallest_movable).expect("some score is movable");
        scores[idx] += direction;
        overall += direction as f64 * w;
    }
    assert!(
        (target - overall).abs() <= 0.45,
        "score synthesis failed to converge: target {target}, got {overall}"
    );
    scores.iter().map(|&s| s as u8).collect()
}

const REFERENCE_JUSTIFICATIONS: [&str; 5] = [
    "The submitted evidence addresses the criterion with verifiable specifics.",
    "Evidence is present but leaves implementation detail unverified.",
    "The response covers the question partially; key aspects remain undocumented.",
    "Little of the required evidence is available in the submission.",
    "The answer is adjacent to the criterion without demonstrating it.",
];

/// Write a transcript whose judgments replay into exactly the resolved
/// deviation grid (after integer rendering) for the nine reference tools.
pub fn write_reference_transcript(path: &Path) {
    let schema = fixture_schema();
    let templates = fixture_templates();
    let budget = TokenBudget::default();
    let writer = TranscriptWriter::append_to(path).unwrap();
    for (ti, tool) in TOOLS.iter().enumerate() {
        let dossier = fixture_dossier(&schema, tool);
        for (mi, (provider_name, model_id)) in MODELS.iter().enumerate() {
            for (tempi, &temp) in TEMPERATURES.iter().enumerate() {
                let target = HUMAN[ti] + RESOLVED_DEV[mi][tempi][ti];
                let seed = stable_hash(&[tool, model_id, &temp.to_string()]);
                let scores = synth_scores(&schema, target, seed);
                for (ii, indicator) in schema.indicators.iter().enumerate() {
                    let bundle =
                        build_prompt(&dossier, indicator, &schema, &templates, &budget).unwrap();
                    let score = scores[ii];
                    let j = REFERENCE_JUSTIFICATIONS[(stable_hash(&[
                        &bundle.content_hash,
                        model_id,
                    ]) % 5) as usize];
                    let record = TranscriptRecord {
                        request_id: request_id(
                            tool,
                            &indicator.indicator_id,
                            model_id,
                            Some(temp),
                        ),
                        tool_id: tool.to_string(),
                        indicator_id: indicator.indicator_id.clone(),
                        persona_domain: bundle.persona_domain.tag().to_string(),
                        provider_name: provider_name.to_string(),
                        model_id: model_id.to_string(),
                        temperature: Some(temp),
                        top_p: 0.9,
                        content_hash: bundle.content_hash.clone(),
                        template_version: templates.version().to_string(),
                        raw_text: format!("Score: {score}\n{j}"),
                        attempts: 1,
                        timestamp: 0.0,
                    };
                    writer.append(&record).unwrap();
                }
            }
        }
    }
}

/// Replay config over the nine reference dossiers and three stochastic
/// models.
pub fn reference_replay_config(transcript: &Path, out_dir: &Path) -> RunConfig {
    RunConfig {
        schema_path: repo_path("fixtures/schema.json"),
        dossier_paths: TOOLS
            .iter()
            .map(|t| repo_path(&format!("fixtures/dossiers/{t}.json")))
            .collect(),
        baseline_path: repo_path("fixtures/baseline.json"),
        providers: MODELS
            .iter()
            .map(|(name, model)| stochastic_provider(name, model))
            .collect(),
        temperatures: TEMPERATURES.to_vec(),
        policy: DispatchPolicy::default(),
        budget: TokenBudget::default(),
        backend_mode: BackendMode::Replay {
            path: transcript.to_path_buf(),
        },
        output_dir: out_dir.to_path_buf(),
        granularity: Granularity::Indicator,
        unanswered_mode: UnansweredMode::SendMarker,
        templates_dir: repo_path("templates"),
        seed: 0,
        overall_variant: OverallVariant::Hierarchical,
    }
}
