//! Rapid assessment of digital agri-food tools against a hierarchical
//! inclusiveness index using LLM judges, plus human-AI alignment analytics.
//!
//! The pipeline: load an index schema ([`schema`]) and per-tool evidence
//! dossiers ([`dossier`]), render a persona prompt per indicator
//! ([`prompt`]), dispatch prompts to a judge backend under rate/retry
//! constraints ([`gateway`]), parse scores out of the raw judge output
//! ([`judgment`]), roll indicator scores up the hierarchy ([`aggregate`]),
//! and compare tool-level percentages against human baselines
//! ([`analytics`]). [`run`] orchestrates full sweeps with a resumable
//! manifest and [`report`] renders the CSV outputs.

pub mod aggregate;
pub mod analytics;
pub mod dossier;
pub mod gateway;
pub mod judgment;
pub mod prompt;
pub mod report;
pub mod run;
pub mod schema;
pub mod util;

pub use schema::{load_schema, validate_schema, ExpertDomain, IndexSchema};
