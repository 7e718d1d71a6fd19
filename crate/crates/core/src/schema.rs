//! The hierarchical index schema every other module keys against:
//! mega-groups > dimensions > subdimensions > indicators.
//!
//! The schema is loaded from a single JSON document and is immutable after
//! load; declaration order in the file is the canonical ordering everywhere
//! (prompts, reports). Counts are data, not code — the bundled sample uses
//! 3 mega-groups, 7 dimensions, 24 subdimensions and 90 indicators, but the
//! format does not constrain them.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// The six expert domains a leaf indicator can be tagged with. Each domain
/// maps to one judge persona.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExpertDomain {
    #[serde(rename = "ICT")]
    Ict,
    Data,
    #[serde(rename = "GESI")]
    Gesi,
    Economics,
    #[serde(rename = "HCD")]
    Hcd,
    CountryExpertise,
}

impl ExpertDomain {
    pub const ALL: [ExpertDomain; 6] = [
        ExpertDomain::Ict,
        ExpertDomain::Data,
        ExpertDomain::Gesi,
        ExpertDomain::Economics,
        ExpertDomain::Hcd,
        ExpertDomain::CountryExpertise,
    ];

    /// The tag as written in schema files and transcripts.
    pub fn tag(&self) -> &'static str {
        match self {
            ExpertDomain::Ict => "ICT",
            ExpertDomain::Data => "Data",
            ExpertDomain::Gesi => "GESI",
            ExpertDomain::Economics => "Economics",
            ExpertDomain::Hcd => "HCD",
            ExpertDomain::CountryExpertise => "CountryExpertise",
        }
    }

    pub fn parse_tag(tag: &str) -> Option<ExpertDomain> {
        ExpertDomain::ALL.iter().copied().find(|d| d.tag() == tag)
    }
}

impl fmt::Display for ExpertDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A leaf evaluation question, judged once by its tagged domain's persona.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicatorDef {
    pub indicator_id: String,
    pub question_text: String,
    pub subdimension_id: String,
    /// One of the six domain tags; kept as written so validation can report
    /// unknown tags instead of failing at deserialization.
    pub expert_domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indicator_context: Option<String>,
}

impl IndicatorDef {
    pub fn domain(&self) -> Option<ExpertDomain> {
        ExpertDomain::parse_tag(&self.expert_domain)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubdimensionDef {
    pub subdimension_id: String,
    pub name: String,
    pub dimension_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subdimension_context: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionDef {
    pub dimension_id: String,
    pub name: String,
    pub mega_group_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MegaGroupDef {
    pub mega_group_id: String,
    pub name: String,
}

/// The full hierarchy. Safe to share read-only across workers after load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSchema {
    pub schema_version: String,
    pub mega_groups: Vec<MegaGroupDef>,
    pub dimensions: Vec<DimensionDef>,
    pub subdimensions: Vec<SubdimensionDef>,
    pub indicators: Vec<IndicatorDef>,
}

impl IndexSchema {
    pub fn indicator(&self, indicator_id: &str) -> Option<&IndicatorDef> {
        self.indicators.iter().find(|i| i.indicator_id == indicator_id)
    }

    pub fn subdimension(&self, subdimension_id: &str) -> Option<&SubdimensionDef> {
        self.subdimensions
            .iter()
            .find(|s| s.subdimension_id == subdimension_id)
    }

    pub fn dimension(&self, dimension_id: &str) -> Option<&DimensionDef> {
        self.dimensions.iter().find(|d| d.dimension_id == dimension_id)
    }

    /// Indicators of one subdimension, in declaration order.
    pub fn indicators_for(&self, subdimension_id: &str) -> Result<Vec<&IndicatorDef>, UnknownId> {
        if self.subdimension(subdimension_id).is_none() {
            return Err(UnknownId(subdimension_id.to_string()));
        }
        Ok(self
            .indicators
            .iter()
            .filter(|i| i.subdimension_id == subdimension_id)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown id: {0}")]
pub struct UnknownId(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationCode {
    DuplicateId,
    DanglingReference,
    UnknownExpertDomain,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationCode::DuplicateId => "duplicate_id",
            ViolationCode::DanglingReference => "dangling_reference",
            ViolationCode::UnknownExpertDomain => "unknown_expert_domain",
        };
        f.write_str(s)
    }
}

/// One invariant violation, with a machine-readable code and the offending id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub offending_id: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.code, self.offending_id, self.detail)
    }
}

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("cannot read schema file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed schema file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema validation failed: {}", violation_summary(.0))]
    Validation(Vec<Violation>),
}

fn violation_summary(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Load and validate a schema file. Side-effect free; any invariant
/// violation rejects the whole file.
pub fn load_schema(path: &Path) -> Result<IndexSchema, SchemaError> {
    let text = std::fs::read_to_string(path)?;
    let schema: IndexSchema = serde_json::from_str(&text)?;
    let violations = validate_schema(&schema);
    if violations.is_empty() {
        Ok(schema)
    } else {
        Err(SchemaError::Validation(violations))
    }
}

/// Check every schema invariant. Empty result iff the schema is valid; pure.
pub fn validate_schema(schema: &IndexSchema) -> Vec<Violation> {
    let mut violations = Vec::new();

    let check_unique = |ids: Vec<&str>, level: &str, out: &mut Vec<Violation>| {
        let mut seen = HashSet::new();
        for id in ids {
            if !seen.insert(id) {
                out.push(Violation {
                    code: ViolationCode::DuplicateId,
                    offending_id: id.to_string(),
                    detail: format!("{level} id declared more than once"),
                });
            }
        }
    };
    check_unique(
        schema.mega_groups.iter().map(|m| m.mega_group_id.as_str()).collect(),
        "mega-group",
        &mut violations,
    );
    check_unique(
        schema.dimensions.iter().map(|d| d.dimension_id.as_str()).collect(),
        "dimension",
        &mut violations,
    );
    check_unique(
        schema
            .subdimensions
            .iter()
            .map(|s| s.subdimension_id.as_str())
            .collect(),
        "subdimension",
        &mut violations,
    );
    check_unique(
        schema.indicators.iter().map(|i| i.indicator_id.as_str()).collect(),
        "indicator",
        &mut violations,
    );

    let mega_ids: HashSet<&str> = schema
        .mega_groups
        .iter()
        .map(|m| m.mega_group_id.as_str())
        .collect();
    let dim_ids: HashSet<&str> = schema
        .dimensions
        .iter()
        .map(|d| d.dimension_id.as_str())
        .collect();
    let sub_ids: HashSet<&str> = schema
        .subdimensions
        .iter()
        .map(|s| s.subdimension_id.as_str())
        .collect();

    for dim in &schema.dimensions {
        if !mega_ids.contains(dim.mega_group_id.as_str()) {
            violations.push(Violation {
                code: ViolationCode::DanglingReference,
                offending_id: dim.dimension_id.clone(),
                detail: format!("references unknown mega-group {}", dim.mega_group_id),
            });
        }
    }
    for sub in &schema.subdimensions {
        if !dim_ids.contains(sub.dimension_id.as_str()) {
            violations.push(Violation {
                code: ViolationCode::DanglingReference,
                offending_id: sub.subdimension_id.clone(),
                detail: format!("references unknown dimension {}", sub.dimension_id),
            });
        }
    }
    for ind in &schema.indicators {
        if !sub_ids.contains(ind.subdimension_id.as_str()) {
            violations.push(Violation {
                code: ViolationCode::DanglingReference,
                offending_id: ind.indicator_id.clone(),
                detail: format!("references unknown subdimension {}", ind.subdimension_id),
            });
        }
        if ind.domain().is_none() {
            violations.push(Violation {
                code: ViolationCode::UnknownExpertDomain,
                offending_id: ind.indicator_id.clone(),
                detail: format!("unknown expert domain tag {:?}", ind.expert_domain),
            });
        }
    }

    violations
}
