//! Experiment orchestration: the (model x temperature x tool x unit) request
//! matrix, a resumable manifest, transcript persistence, and report
//! rendering.
//!
//! A run directory holds `config.json` (the config snapshot), `manifest.json`
//! (run header plus the full request matrix), `status.jsonl` (append-only
//! per-request state events), `transcript.jsonl`, and `reports/`. Everything
//! needed to resume or replay a run lives in that directory; digests pin the
//! schema file, template set, and config snapshot so a resume against edited
//! inputs fails instead of silently mixing data.

use crate::aggregate::{aggregate, aggregate_subdimensions, CellKey, ToolScorecard};
use crate::analytics::{build_report, AlignmentReport, AnalyticsError, OverallVariant};
use crate::dossier::{
    completeness, load_baseline, load_dossier, BaselineError, CompletenessReport, DossierError,
    HumanBaseline, ToolDossier,
};
use crate::gateway::backend::{live_backend, mock_backend, replay_backend, JudgeBackend};
use crate::gateway::clock::{Clock, SimulatedClock, SystemClock};
use crate::gateway::transcript::{
    temperature_key, TranscriptError, TranscriptRecord, TranscriptWriter,
};
use crate::gateway::{DispatchPolicy, Gateway, ProviderConfig, ProviderKind, RequestEnvelope};
use crate::judgment::{parse_transcript, JudgmentRecord};
use crate::prompt::{
    build_prompt, build_subdimension_prompt, PromptError, TemplateError, TemplateSet, TokenBudget,
};
use crate::report::{write_reports, DataQuality};
use crate::schema::{load_schema, IndexSchema, SchemaError};
use crate::util::{file_digest, sha256_parts};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fs::OpenOptions;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendMode {
    Live,
    Mock { seed: u64 },
    Replay { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    #[default]
    Indicator,
    Subdimension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnansweredMode {
    /// Send unanswered indicators to the judge with the NOT ANSWERED marker
    /// (the default: judges must see the gaps).
    #[default]
    SendMarker,
    /// Skip unanswered units entirely (sensitivity studies).
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_path: PathBuf,
    pub dossier_paths: Vec<PathBuf>,
    pub baseline_path: PathBuf,
    pub providers: Vec<ProviderConfig>,
    /// Applied to stochastic providers only.
    #[serde(default = "default_temperatures")]
    pub temperatures: Vec<f64>,
    #[serde(default)]
    pub policy: DispatchPolicy,
    #[serde(default)]
    pub budget: TokenBudget,
    pub backend_mode: BackendMode,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub granularity: Granularity,
    #[serde(default)]
    pub unanswered_mode: UnansweredMode,
    /// Directory holding the persona and instruction templates.
    #[serde(default = "default_templates_dir")]
    pub templates_dir: PathBuf,
    /// Root seed for jitter; mock runs use the mock seed instead.
    #[serde(default)]
    pub seed: u64,
    /// Which overall percentage feeds the alignment analytics.
    #[serde(default)]
    pub overall_variant: OverallVariant,
}

fn default_temperatures() -> Vec<f64> {
    vec![0.3, 0.7, 0.9]
}

fn default_templates_dir() -> PathBuf {
    PathBuf::from("templates")
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Dossier(#[from] DossierError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Transcript(#[from] TranscriptError),
    #[error("digest mismatch: {0}")]
    DigestMismatch(String),
    #[error("insufficient data for reports: {0}")]
    InsufficientData(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestState {
    Pending,
    Done,
    Failed,
}

/// One cell of the request matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestSpec {
    pub request_id: String,
    pub tool_id: String,
    /// Indicator id, or subdimension id at subdimension granularity.
    pub unit_id: String,
    pub provider_name: String,
    pub model_id: String,
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub config_digest: String,
    pub schema_digest: String,
    pub template_version: String,
    pub seed: u64,
    pub created_at: f64,
    pub requests: Vec<RequestSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StatusEvent {
    request_id: String,
    state: RequestState,
    timestamp: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

/// Execution knobs that are not part of the run's identity (they do not
/// affect the request matrix or the reports).
#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Stop after processing this many requests (interrupt/incremental runs).
    pub max_requests: Option<usize>,
    /// Worker pool width.
    pub workers: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            max_requests: None,
            workers: 1,
        }
    }
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub run_dir: PathBuf,
    pub manifest: RunManifest,
    /// Requests processed by this invocation.
    pub dispatched: usize,
    pub done: usize,
    pub failed: usize,
    pub report: Option<AlignmentReport>,
    pub report_paths: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

// ---------------------------------------------------------------- loading

struct LoadedInputs {
    schema: IndexSchema,
    dossiers: Vec<ToolDossier>,
    baseline: HumanBaseline,
    templates: TemplateSet,
    schema_digest: String,
}

fn load_inputs(config: &RunConfig) -> Result<LoadedInputs, RunError> {
    let schema = load_schema(&config.schema_path)?;
    let schema_digest = file_digest(&config.schema_path)?;
    let mut dossiers = Vec::new();
    let mut seen = HashSet::new();
    for path in &config.dossier_paths {
        let dossier = load_dossier(path, &schema)?;
        if !seen.insert(dossier.tool_id.clone()) {
            return Err(RunError::Config(format!(
                "dossier tool_id {} appears more than once",
                dossier.tool_id
            )));
        }
        dossiers.push(dossier);
    }
    let baseline = load_baseline(&config.baseline_path)?;
    let templates = TemplateSet::load(&config.templates_dir)?;
    Ok(LoadedInputs {
        schema,
        dossiers,
        baseline,
        templates,
        schema_digest,
    })
}

fn validate_config(config: &RunConfig) -> Result<Vec<String>, RunError> {
    config.policy.validate().map_err(RunError::Config)?;
    let mut warnings = Vec::new();
    let mut any_stochastic = false;
    for provider in &config.providers {
        provider.validate_base().map_err(RunError::Config)?;
        match provider.kind {
            ProviderKind::Stochastic => any_stochastic = true,
            ProviderKind::Reasoning => {
                if !config.temperatures.is_empty() {
                    warnings.push(format!(
                        "provider {} is a reasoning model; temperatures ignored, single run",
                        provider.model_id
                    ));
                }
            }
        }
    }
    if any_stochastic && config.temperatures.is_empty() {
        return Err(RunError::Config(
            "temperatures must be non-empty when a stochastic provider is present".into(),
        ));
    }
    for t in &config.temperatures {
        if !(0.0..=2.0).contains(t) {
            return Err(RunError::Config(format!("temperature {t} outside [0, 2]")));
        }
    }
    Ok(warnings)
}

// ---------------------------------------------------------------- matrix

pub fn request_id(tool_id: &str, unit_id: &str, model_id: &str, temperature: Option<f64>) -> String {
    format!(
        "{tool_id}|{unit_id}|{model_id}|{}",
        temperature_key(temperature)
    )
}

/// Effective (provider, temperature) cells: stochastic providers cross the
/// temperature list, reasoning providers run exactly once.
fn provider_cells(config: &RunConfig) -> Vec<ProviderConfig> {
    let mut cells = Vec::new();
    for provider in &config.providers {
        match provider.kind {
            ProviderKind::Stochastic => {
                for &t in &config.temperatures {
                    cells.push(provider.with_temperature(t));
                }
            }
            ProviderKind::Reasoning => cells.push(provider.clone()),
        }
    }
    cells
}

/// Scored units per tool in canonical (declaration) order, honoring the
/// unanswered mode and granularity.
fn units_for_tool(
    config: &RunConfig,
    schema: &IndexSchema,
    dossier: &ToolDossier,
) -> Vec<String> {
    match config.granularity {
        Granularity::Indicator => schema
            .indicators
            .iter()
            .filter(|ind| {
                config.unanswered_mode == UnansweredMode::SendMarker
                    || dossier.answered(&ind.indicator_id).is_some()
            })
            .map(|ind| ind.indicator_id.clone())
            .collect(),
        Granularity::Subdimension => schema
            .subdimensions
            .iter()
            .filter(|sub| {
                // a subdimension with zero indicators has nothing to prompt over
                schema
                    .indicators
                    .iter()
                    .any(|i| i.subdimension_id == sub.subdimension_id)
            })
            .map(|sub| sub.subdimension_id.clone())
            .collect(),
    }
}

/// The full request matrix in canonical order: dossiers in config order,
/// provider cells in config order, units in declaration order.
pub fn enumerate_requests(
    config: &RunConfig,
    schema: &IndexSchema,
    dossiers: &[ToolDossier],
) -> Vec<RequestSpec> {
    let cells = provider_cells(config);
    let mut requests = Vec::new();
    for dossier in dossiers {
        let units = units_for_tool(config, schema, dossier);
        for cell in &cells {
            for unit in &units {
                requests.push(RequestSpec {
                    request_id: request_id(&dossier.tool_id, unit, &cell.model_id, cell.temperature),
                    tool_id: dossier.tool_id.clone(),
                    unit_id: unit.clone(),
                    provider_name: cell.provider_name.clone(),
                    model_id: cell.model_id.clone(),
                    temperature: cell.temperature,
                });
            }
        }
    }
    requests
}

// ---------------------------------------------------------------- run dir

pub fn manifest_path(run_dir: &Path) -> PathBuf {
    run_dir.join("manifest.json")
}

pub fn transcript_path(run_dir: &Path) -> PathBuf {
    run_dir.join("transcript.jsonl")
}

pub fn reports_dir(run_dir: &Path) -> PathBuf {
    run_dir.join("reports")
}

fn config_path(run_dir: &Path) -> PathBuf {
    run_dir.join("config.json")
}

fn status_path(run_dir: &Path) -> PathBuf {
    run_dir.join("status.jsonl")
}

fn read_status(run_dir: &Path) -> Result<BTreeMap<String, RequestState>, RunError> {
    let path = status_path(run_dir);
    let mut states = BTreeMap::new();
    if !path.exists() {
        return Ok(states);
    }
    let text = std::fs::read_to_string(&path)?;
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let event: StatusEvent = serde_json::from_str(line)
            .map_err(|e| RunError::Config(format!("malformed status event: {e}")))?;
        states.insert(event.request_id, event.state);
    }
    Ok(states)
}

struct StatusWriter {
    inner: Mutex<BufWriter<std::fs::File>>,
}

impl StatusWriter {
    fn append_to(path: &Path) -> std::io::Result<StatusWriter> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(StatusWriter {
            inner: Mutex::new(BufWriter::new(file)),
        })
    }

    fn record(&self, event: &StatusEvent) -> std::io::Result<()> {
        let line = serde_json::to_string(event).expect("status event serializes");
        let mut writer = self.inner.lock().unwrap();
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()
    }
}

type BackendSetup = (Box<dyn JudgeBackend>, Arc<dyn Clock>, u64);

fn build_backend(config: &RunConfig) -> Result<BackendSetup, RunError> {
    match &config.backend_mode {
        BackendMode::Live => Ok((
            Box::new(live_backend()),
            Arc::new(SystemClock::new()),
            config.seed,
        )),
        BackendMode::Mock { seed } => Ok((
            Box::new(mock_backend(*seed)),
            Arc::new(SimulatedClock::new()),
            *seed,
        )),
        BackendMode::Replay { path } => Ok((
            Box::new(replay_backend(path)?),
            Arc::new(SimulatedClock::new()),
            config.seed,
        )),
    }
}

// ---------------------------------------------------------------- sweep

/// Start a fresh run: write the run directory, dispatch the whole matrix,
/// and render reports. Fails if the directory already holds a manifest
/// (resume instead).
pub fn run_sweep(config: &RunConfig, options: &SweepOptions) -> Result<SweepOutcome, RunError> {
    let warnings = validate_config(config)?;
    let inputs = load_inputs(config)?;
    let run_dir = config.output_dir.clone();
    if manifest_path(&run_dir).exists() {
        return Err(RunError::Config(format!(
            "{} already holds a run; resume it or use a fresh output_dir",
            run_dir.display()
        )));
    }
    std::fs::create_dir_all(&run_dir)?;

    let config_json = serde_json::to_string_pretty(config).expect("config serializes");
    std::fs::write(config_path(&run_dir), &config_json)?;
    let config_digest = file_digest(&config_path(&run_dir))?;

    let seed = match &config.backend_mode {
        BackendMode::Mock { seed } => *seed,
        _ => config.seed,
    };
    let requests = enumerate_requests(config, &inputs.schema, &inputs.dossiers);
    let manifest = RunManifest {
        run_id: sha256_parts(&[
            &config_digest,
            &inputs.schema_digest,
            inputs.templates.version(),
            &seed.to_string(),
        ])[..12]
            .to_string(),
        config_digest,
        schema_digest: inputs.schema_digest.clone(),
        template_version: inputs.templates.version().to_string(),
        seed,
        created_at: 0.0,
        requests,
    };
    std::fs::write(
        manifest_path(&run_dir),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;

    let to_run: Vec<RequestSpec> = manifest.requests.clone();
    execute_and_report(config, &inputs, &run_dir, manifest, to_run, options, warnings)
}

/// Continue a partial run: only pending or failed requests are re-dispatched;
/// completed responses are untouched. Reports are re-rendered either way.
pub fn resume(run_dir: &Path, options: &SweepOptions) -> Result<SweepOutcome, RunError> {
    let config_text = std::fs::read_to_string(config_path(run_dir))?;
    let config: RunConfig = serde_json::from_str(&config_text)
        .map_err(|e| RunError::Config(format!("malformed config snapshot: {e}")))?;
    let manifest_text = std::fs::read_to_string(manifest_path(run_dir))?;
    let manifest: RunManifest = serde_json::from_str(&manifest_text)
        .map_err(|e| RunError::Config(format!("malformed manifest: {e}")))?;

    let warnings = validate_config(&config)?;
    let inputs = load_inputs(&config)?;

    let config_digest = file_digest(&config_path(run_dir))?;
    if config_digest != manifest.config_digest {
        return Err(RunError::DigestMismatch("config snapshot changed".into()));
    }
    if inputs.schema_digest != manifest.schema_digest {
        return Err(RunError::DigestMismatch(format!(
            "schema file changed since the run started ({} != {})",
            inputs.schema_digest, manifest.schema_digest
        )));
    }
    if inputs.templates.version() != manifest.template_version {
        return Err(RunError::DigestMismatch(
            "template set changed since the run started".into(),
        ));
    }

    let states = read_status(run_dir)?;
    let to_run: Vec<RequestSpec> = manifest
        .requests
        .iter()
        .filter(|r| {
            !matches!(states.get(&r.request_id), Some(RequestState::Done))
        })
        .cloned()
        .collect();
    execute_and_report(&config, &inputs, run_dir, manifest, to_run, options, warnings)
}

struct ExecContext<'a> {
    config: &'a RunConfig,
    inputs: &'a LoadedInputs,
    gateway: Gateway,
    transcript: TranscriptWriter,
    status: StatusWriter,
    dossiers_by_tool: HashMap<String, &'a ToolDossier>,
    providers_by_model: HashMap<String, ProviderConfig>,
    done: AtomicUsize,
    failed: AtomicUsize,
}

#[allow(clippy::too_many_arguments)]
fn execute_and_report(
    config: &RunConfig,
    inputs: &LoadedInputs,
    run_dir: &Path,
    manifest: RunManifest,
    to_run: Vec<RequestSpec>,
    options: &SweepOptions,
    warnings: Vec<String>,
) -> Result<SweepOutcome, RunError> {
    let (backend, clock, seed) = build_backend(config)?;
    let gateway = Gateway::new(backend, clock, config.policy.clone(), seed)
        .map_err(|e| RunError::Config(e.to_string()))?;

    let mut providers_by_model = HashMap::new();
    for cell in provider_cells(config) {
        providers_by_model.insert(
            format!("{}|{}", cell.model_id, temperature_key(cell.temperature)),
            cell,
        );
    }

    let ctx = ExecContext {
        config,
        inputs,
        gateway,
        transcript: TranscriptWriter::append_to(&transcript_path(run_dir))?,
        status: StatusWriter::append_to(&status_path(run_dir))?,
        dossiers_by_tool: inputs
            .dossiers
            .iter()
            .map(|d| (d.tool_id.clone(), d))
            .collect(),
        providers_by_model,
        done: AtomicUsize::new(0),
        failed: AtomicUsize::new(0),
    };

    let limit = options.max_requests.unwrap_or(to_run.len());
    let queue: Mutex<VecDeque<RequestSpec>> =
        Mutex::new(to_run.into_iter().take(limit).collect());
    let dispatched = queue.lock().unwrap().len();

    let workers = options.workers.max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let next = queue.lock().unwrap().pop_front();
                let Some(spec) = next else { break };
                process_request(&ctx, &spec);
            });
        }
    });

    let done = ctx.done.load(Ordering::SeqCst);
    let failed = ctx.failed.load(Ordering::SeqCst);

    // failed count for data quality covers the whole run, not just this pass
    let states = read_status(run_dir)?;
    let failed_total = states
        .values()
        .filter(|s| matches!(s, RequestState::Failed))
        .count();

    let completeness_reports: Vec<CompletenessReport> = inputs
        .dossiers
        .iter()
        .map(|d| completeness(d, &inputs.schema))
        .collect();
    let (report, report_paths) = render_reports_inner(
        &transcript_path(run_dir),
        &inputs.baseline,
        &inputs.schema,
        &completeness_reports,
        config.overall_variant,
        config.granularity,
        failed_total,
        &reports_dir(run_dir),
    )?;

    Ok(SweepOutcome {
        run_dir: run_dir.to_path_buf(),
        manifest,
        dispatched,
        done,
        failed,
        report,
        report_paths,
        warnings,
    })
}

fn process_request(ctx: &ExecContext<'_>, spec: &RequestSpec) {
    let now = || ctx.gateway.clock().now().as_secs_f64();
    let fail = |detail: String| {
        ctx.failed.fetch_add(1, Ordering::SeqCst);
        let _ = ctx.status.record(&StatusEvent {
            request_id: spec.request_id.clone(),
            state: RequestState::Failed,
            timestamp: now(),
            detail: Some(detail),
        });
    };

    let Some(dossier) = ctx.dossiers_by_tool.get(&spec.tool_id) else {
        fail(format!("no dossier loaded for tool {}", spec.tool_id));
        return;
    };
    let provider_key = format!("{}|{}", spec.model_id, temperature_key(spec.temperature));
    let Some(provider) = ctx.providers_by_model.get(&provider_key) else {
        fail(format!("no provider cell {provider_key}"));
        return;
    };

    let bundle = match ctx.config.granularity {
        Granularity::Indicator => {
            let Some(indicator) = ctx.inputs.schema.indicator(&spec.unit_id) else {
                fail(format!("unit {} not in schema", spec.unit_id));
                return;
            };
            build_prompt(
                dossier,
                indicator,
                &ctx.inputs.schema,
                &ctx.inputs.templates,
                &ctx.config.budget,
            )
        }
        Granularity::Subdimension => {
            let Some(subdimension) = ctx.inputs.schema.subdimension(&spec.unit_id) else {
                fail(format!("unit {} not in schema", spec.unit_id));
                return;
            };
            build_subdimension_prompt(
                dossier,
                subdimension,
                &ctx.inputs.schema,
                &ctx.inputs.templates,
                &ctx.config.budget,
            )
        }
    };
    let bundle = match bundle {
        Ok(bundle) => bundle,
        Err(e @ (PromptError::BudgetExceeded { .. }
        | PromptError::UnknownDomain(_)
        | PromptError::UnknownSubdimension(_)
        | PromptError::EmptySubdimension(_))) => {
            fail(format!("prompt build failed: {e}"));
            return;
        }
    };

    let envelope = RequestEnvelope {
        request_id: spec.request_id.clone(),
        bundle,
        provider: provider.clone(),
    };
    match ctx.gateway.dispatch(&envelope) {
        Ok(response) => {
            let record = TranscriptRecord {
                request_id: spec.request_id.clone(),
                tool_id: spec.tool_id.clone(),
                indicator_id: spec.unit_id.clone(),
                persona_domain: envelope.bundle.persona_domain.tag().to_string(),
                provider_name: provider.provider_name.clone(),
                model_id: provider.model_id.clone(),
                temperature: provider.temperature,
                top_p: provider.top_p,
                content_hash: envelope.bundle.content_hash.clone(),
                template_version: ctx.inputs.templates.version().to_string(),
                raw_text: response.raw_text,
                attempts: response.attempts,
                timestamp: now(),
            };
            // transcript before status: a Done event implies the record is on disk
            if let Err(e) = ctx.transcript.append(&record) {
                fail(format!("transcript write failed: {e}"));
                return;
            }
            ctx.done.fetch_add(1, Ordering::SeqCst);
            let _ = ctx.status.record(&StatusEvent {
                request_id: spec.request_id.clone(),
                state: RequestState::Done,
                timestamp: now(),
                detail: None,
            });
        }
        Err(e) => fail(format!("dispatch failed: {e}")),
    }
}

// ---------------------------------------------------------------- reports

/// Render the full report set from a transcript. Duplicate records for the
/// same (tool, unit, model, temperature) are superseded by the last
/// occurrence; parse failures are counted, not fatal.
#[allow(clippy::too_many_arguments)]
pub fn render_reports(
    transcript: &Path,
    baseline: &HumanBaseline,
    schema: &IndexSchema,
    completeness_reports: &[CompletenessReport],
    variant: OverallVariant,
    granularity: Granularity,
    out_dir: &Path,
) -> Result<(Option<AlignmentReport>, Vec<PathBuf>), RunError> {
    render_reports_inner(
        transcript,
        baseline,
        schema,
        completeness_reports,
        variant,
        granularity,
        0,
        out_dir,
    )
}

#[allow(clippy::too_many_arguments)]
fn render_reports_inner(
    transcript: &Path,
    baseline: &HumanBaseline,
    schema: &IndexSchema,
    completeness_reports: &[CompletenessReport],
    variant: OverallVariant,
    granularity: Granularity,
    failed_requests: usize,
    out_dir: &Path,
) -> Result<(Option<AlignmentReport>, Vec<PathBuf>), RunError> {
    let parse = if transcript.exists() {
        parse_transcript(transcript)?
    } else {
        Default::default()
    };

    // last record wins per assessment key
    let mut by_key: BTreeMap<String, JudgmentRecord> = BTreeMap::new();
    let mut superseded = 0usize;
    for judgment in parse.judgments.iter().cloned() {
        let key = format!(
            "{}|{}|{}|{}",
            judgment.tool_id,
            judgment.indicator_id,
            judgment.model_id,
            temperature_key(judgment.temperature)
        );
        if by_key.insert(key, judgment).is_some() {
            superseded += 1;
        }
    }

    let mut by_cell: BTreeMap<String, (CellKey, Vec<JudgmentRecord>)> = BTreeMap::new();
    for judgment in by_key.into_values() {
        let cell_id = format!(
            "{}|{}|{}|{}",
            judgment.tool_id,
            judgment.provider_name,
            judgment.model_id,
            temperature_key(judgment.temperature)
        );
        by_cell
            .entry(cell_id)
            .or_insert_with(|| {
                (
                    CellKey {
                        tool_id: judgment.tool_id.clone(),
                        provider_name: judgment.provider_name.clone(),
                        model_id: judgment.model_id.clone(),
                        temperature: judgment.temperature,
                    },
                    Vec::new(),
                )
            })
            .1
            .push(judgment);
    }

    let mut scorecards: Vec<ToolScorecard> = Vec::new();
    for (key, judgments) in by_cell.values() {
        let card = match granularity {
            Granularity::Indicator => aggregate(key, judgments, schema),
            Granularity::Subdimension => aggregate_subdimensions(key, judgments, schema),
        }
        .map_err(|e| RunError::InsufficientData(format!("aggregation failed: {e}")))?;
        scorecards.push(card);
    }

    let quality = DataQuality {
        transcript_records: parse.record_count,
        parsed_judgments: parse.judgments.len(),
        parse_failures: parse.failures.clone(),
        failed_requests,
        superseded_records: superseded,
    };

    let report = match build_report(&scorecards, baseline, completeness_reports, variant) {
        Ok(report) => Some(report),
        Err(AnalyticsError::InsufficientOverlap(_)) => None,
        Err(e) => return Err(RunError::InsufficientData(e.to_string())),
    };
    let paths = write_reports(report.as_ref(), &quality, out_dir)?;
    Ok((report, paths))
}
