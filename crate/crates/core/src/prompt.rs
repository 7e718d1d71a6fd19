//! Persona system messages and layered-context user messages for scoring
//! requests, with a token budget gate.
//!
//! Templates are data, not code: one text file per persona plus one
//! instruction file live in a `templates/` directory, and every transcript
//! record carries the content hash of the set that produced it. Prompt
//! building is a pure function of its inputs — identical inputs give
//! byte-identical messages and an equal `content_hash`.

use crate::dossier::ToolDossier;
use crate::schema::{ExpertDomain, IndexSchema, IndicatorDef, SubdimensionDef};
use crate::util::sha256_parts;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// Literal marker inserted in the response block when the innovator left the
/// indicator unanswered.
pub const NOT_ANSWERED_MARKER: &str = "NOT ANSWERED";

/// A judge persona: the system-message body for one expert domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PersonaSpec {
    pub domain: ExpertDomain,
    pub persona_text: String,
    /// One-line evaluation priority, from the template file header.
    pub emphasis: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenEstimator {
    CharsDiv4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenBudget {
    pub cap: u32,
    pub estimator: TokenEstimator,
}

impl Default for TokenBudget {
    fn default() -> Self {
        TokenBudget {
            cap: 20_000,
            estimator: TokenEstimator::CharsDiv4,
        }
    }
}

/// ceil(character_count / 4). Provider-independent and monotone in text
/// length; an estimate, not a tokenizer.
pub fn estimate_tokens(text: &str, budget: &TokenBudget) -> u32 {
    match budget.estimator {
        TokenEstimator::CharsDiv4 => {
            let chars = text.chars().count() as u64;
            chars.div_ceil(4) as u32
        }
    }
}

/// A fully rendered message set for one scoring request.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptBundle {
    pub system_message: String,
    pub user_message: String,
    /// The scored unit: an indicator id, or a subdimension id when built at
    /// subdimension granularity.
    pub indicator_id: String,
    pub tool_id: String,
    pub persona_domain: ExpertDomain,
    pub estimated_tokens: u32,
    /// Stable digest of (system_message, user_message).
    pub content_hash: String,
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("cannot read template: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing persona template for domain {0}")]
    MissingPersona(ExpertDomain),
    #[error("persona template {file}: {reason}")]
    MalformedPersona { file: String, reason: String },
    #[error("missing instruction template ({0})")]
    MissingInstruction(String),
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("unknown expert domain tag {0:?}")]
    UnknownDomain(String),
    #[error("prompt estimated at {estimated} tokens, over the {cap}-token cap")]
    BudgetExceeded { estimated: u32, cap: u32 },
    #[error("indicator {0} references subdimension missing from schema")]
    UnknownSubdimension(String),
    #[error("subdimension {0} has no indicators to prompt over")]
    EmptySubdimension(String),
}

/// The six persona templates plus the evaluative instruction, versioned by
/// content hash.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    personas: BTreeMap<ExpertDomain, PersonaSpec>,
    instruction: String,
    version: String,
}

fn persona_file_name(domain: ExpertDomain) -> &'static str {
    match domain {
        ExpertDomain::Ict => "persona_ict.txt",
        ExpertDomain::Data => "persona_data.txt",
        ExpertDomain::Gesi => "persona_gesi.txt",
        ExpertDomain::Economics => "persona_economics.txt",
        ExpertDomain::Hcd => "persona_hcd.txt",
        ExpertDomain::CountryExpertise => "persona_country_expertise.txt",
    }
}

impl TemplateSet {
    /// Load all six personas and the instruction from a directory.
    ///
    /// Persona file format: an `emphasis: ...` header line, a blank line,
    /// then the system-message body. The body must read as a senior expert
    /// brief (it is checked for seniority wording) so downstream runs can't
    /// silently ship an empty persona.
    pub fn load(dir: &Path) -> Result<TemplateSet, TemplateError> {
        let mut personas = BTreeMap::new();
        let mut hash_parts: Vec<String> = Vec::new();
        for domain in ExpertDomain::ALL {
            let file = persona_file_name(domain);
            let path = dir.join(file);
            if !path.exists() {
                return Err(TemplateError::MissingPersona(domain));
            }
            let raw = std::fs::read_to_string(&path)?;
            let spec = parse_persona(domain, file, &raw)?;
            hash_parts.push(file.to_string());
            hash_parts.push(raw);
            personas.insert(domain, spec);
        }
        let instruction_path = dir.join("instruction.txt");
        if !instruction_path.exists() {
            return Err(TemplateError::MissingInstruction(
                instruction_path.display().to_string(),
            ));
        }
        let instruction_raw = std::fs::read_to_string(&instruction_path)?;
        let instruction = instruction_raw.trim().to_string();
        if instruction.is_empty() {
            return Err(TemplateError::MissingInstruction(
                "instruction.txt is empty".into(),
            ));
        }
        hash_parts.push("instruction.txt".to_string());
        hash_parts.push(instruction_raw);

        let refs: Vec<&str> = hash_parts.iter().map(|s| s.as_str()).collect();
        let version = sha256_parts(&refs);
        Ok(TemplateSet {
            personas,
            instruction,
            version,
        })
    }

    /// Digest of the template files that produced this set; recorded into
    /// every transcript record.
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn instruction(&self) -> &str {
        &self.instruction
    }

    /// Deterministic: the same domain always yields identical text.
    pub fn persona_for(&self, domain: ExpertDomain) -> &PersonaSpec {
        &self.personas[&domain]
    }

    /// Resolve a raw schema tag to its persona.
    pub fn persona_for_tag(&self, tag: &str) -> Result<&PersonaSpec, PromptError> {
        let domain =
            ExpertDomain::parse_tag(tag).ok_or_else(|| PromptError::UnknownDomain(tag.into()))?;
        Ok(self.persona_for(domain))
    }
}

fn parse_persona(
    domain: ExpertDomain,
    file: &str,
    raw: &str,
) -> Result<PersonaSpec, TemplateError> {
    let malformed = |reason: &str| TemplateError::MalformedPersona {
        file: file.to_string(),
        reason: reason.to_string(),
    };
    let mut lines = raw.lines();
    let header = lines.next().ok_or_else(|| malformed("file is empty"))?;
    let emphasis = header
        .strip_prefix("emphasis:")
        .ok_or_else(|| malformed("first line must be `emphasis: ...`"))?
        .trim()
        .to_string();
    if emphasis.is_empty() {
        return Err(malformed("emphasis line is empty"));
    }
    let body = lines.collect::<Vec<_>>().join("\n").trim().to_string();
    if body.is_empty() {
        return Err(malformed("persona body is empty"));
    }
    let lower = body.to_lowercase();
    if !lower.contains("senior") || !lower.contains("experience") {
        return Err(malformed(
            "persona body must describe a senior professional and their evaluation scope",
        ));
    }
    Ok(PersonaSpec {
        domain,
        persona_text: body,
        emphasis,
    })
}

/// Render the message set for one indicator of one tool.
///
/// Block order in the user message is fixed: tool summary, subdimension
/// context (when present), indicator context (when present), innovator
/// response (or the `NOT ANSWERED` marker), evaluation task. Zero-shot: no
/// worked examples anywhere.
pub fn build_prompt(
    dossier: &ToolDossier,
    indicator: &IndicatorDef,
    schema: &IndexSchema,
    templates: &TemplateSet,
    budget: &TokenBudget,
) -> Result<PromptBundle, PromptError> {
    let persona = templates.persona_for_tag(&indicator.expert_domain)?;
    let subdimension = schema
        .subdimension(&indicator.subdimension_id)
        .ok_or_else(|| PromptError::UnknownSubdimension(indicator.indicator_id.clone()))?;

    let mut user = String::new();
    push_summary_block(&mut user, dossier);
    push_subdimension_context_block(&mut user, subdimension);
    if let Some(context) = &indicator.indicator_context {
        user.push_str("== INDICATOR CONTEXT ==\n");
        user.push_str(context.trim());
        user.push_str("\n\n");
    }
    user.push_str("== INNOVATOR RESPONSE ==\n");
    match dossier.answered(&indicator.indicator_id) {
        Some(response) => user.push_str(response.trim()),
        None => user.push_str(NOT_ANSWERED_MARKER),
    }
    user.push_str("\n\n== EVALUATION TASK ==\nQuestion: ");
    user.push_str(&indicator.question_text);
    user.push_str("\n\n");
    user.push_str(templates.instruction());

    finish_bundle(
        persona,
        user,
        indicator.indicator_id.clone(),
        dossier.tool_id.clone(),
        budget,
    )
}

/// Render one message set covering all indicators of a subdimension, asking
/// for a single 0-5 score for the subdimension as a whole. The persona is
/// the tagged domain of the subdimension's first indicator in declaration
/// order.
pub fn build_subdimension_prompt(
    dossier: &ToolDossier,
    subdimension: &SubdimensionDef,
    schema: &IndexSchema,
    templates: &TemplateSet,
    budget: &TokenBudget,
) -> Result<PromptBundle, PromptError> {
    let indicators = schema
        .indicators_for(&subdimension.subdimension_id)
        .map_err(|e| PromptError::UnknownSubdimension(e.0))?;
    let first = indicators
        .first()
        .ok_or_else(|| PromptError::EmptySubdimension(subdimension.subdimension_id.clone()))?;
    let persona = templates.persona_for_tag(&first.expert_domain)?;

    let mut user = String::new();
    push_summary_block(&mut user, dossier);
    push_subdimension_context_block(&mut user, subdimension);
    user.push_str("== INNOVATOR RESPONSE ==\n");
    for (idx, indicator) in indicators.iter().enumerate() {
        user.push_str(&format!("{}. Question: {}\n", idx + 1, indicator.question_text));
        match dossier.answered(&indicator.indicator_id) {
            Some(response) => user.push_str(&format!("   Response: {}\n", response.trim())),
            None => user.push_str(&format!("   Response: {NOT_ANSWERED_MARKER}\n")),
        }
    }
    user.push_str(&format!(
        "\n== EVALUATION TASK ==\nQuestion: Considering all the evidence above, how inclusive is \
         the tool on the subdimension \"{}\" as a whole?\n\n",
        subdimension.name
    ));
    user.push_str(templates.instruction());

    finish_bundle(
        persona,
        user,
        subdimension.subdimension_id.clone(),
        dossier.tool_id.clone(),
        budget,
    )
}

fn push_summary_block(user: &mut String, dossier: &ToolDossier) {
    user.push_str("== TOOL SUMMARY ==\n");
    user.push_str(&format!("Tool {}: {}\n", dossier.tool_id, dossier.purpose));
    user.push_str(dossier.tool_summary.trim());
    user.push_str("\n\n");
}

fn push_subdimension_context_block(user: &mut String, subdimension: &SubdimensionDef) {
    if let Some(context) = &subdimension.subdimension_context {
        user.push_str("== SUBDIMENSION CONTEXT ==\n");
        user.push_str(&format!("{}: {}\n\n", subdimension.name, context.trim()));
    }
}

fn finish_bundle(
    persona: &PersonaSpec,
    user_message: String,
    unit_id: String,
    tool_id: String,
    budget: &TokenBudget,
) -> Result<PromptBundle, PromptError> {
    let system_message = persona.persona_text.clone();
    // estimate over the full message set, never truncate
    let chars = system_message.chars().count() as u64 + user_message.chars().count() as u64;
    let estimated_tokens = chars.div_ceil(4) as u32;
    if estimated_tokens > budget.cap {
        return Err(PromptError::BudgetExceeded {
            estimated: estimated_tokens,
            cap: budget.cap,
        });
    }
    let content_hash = sha256_parts(&[&system_message, &user_message]);
    Ok(PromptBundle {
        system_message,
        user_message,
        indicator_id: unit_id,
        tool_id,
        persona_domain: persona.domain,
        estimated_tokens,
        content_hash,
    })
}
