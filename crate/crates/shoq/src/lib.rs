//! Text formats, a reference oracle and the checking pipeline for SHOQ
//! knowledge bases, on top of `shoq-core`.

pub mod dot;
pub mod ilp_text;
pub mod model_text;
pub mod oracle;
pub mod parser;
pub mod printer;

use shoq_core::extract::{ExtractError, Extraction, extract_model};
use shoq_core::model::ModelViolation;
use shoq_core::{EngineConfig, EngineError, KnowledgeBase, RunOutcome, Verdict, run};

pub use parser::{ParseError, parse_kb};

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("model extraction failed: {0}")]
    Extract(#[from] ExtractError),
    #[error("extracted model graph is not saturated: {0}")]
    ModelGraph(String),
    #[error("extracted interpretation is not a model: {0}")]
    Model(#[from] ModelViolation),
}

/// A finished run, with a verified model when the answer is satisfiable.
#[derive(Debug)]
pub struct Checked {
    pub outcome: RunOutcome,
    pub extraction: Option<Extraction>,
}

impl Checked {
    pub fn verdict(&self) -> Verdict {
        self.outcome.verdict
    }
}

/// Runs the tableau and, on a satisfiable answer, extracts a model and
/// verifies both the model graph and the model against `kb`.
pub fn check(kb: &KnowledgeBase, config: &EngineConfig) -> Result<Checked, CheckError> {
    verify(kb, run(kb, config)?)
}

/// The verification half of [`check`], for callers that need the raw
/// outcome first.
pub fn verify(kb: &KnowledgeBase, outcome: RunOutcome) -> Result<Checked, CheckError> {
    if outcome.verdict == Verdict::Unsatisfiable {
        return Ok(Checked { outcome, extraction: None });
    }
    let extraction = extract_model(kb, &outcome)?;
    extraction.model_graph.check(kb).map_err(|e| CheckError::ModelGraph(e.to_string()))?;
    extraction.model.check_model(kb)?;
    Ok(Checked { outcome, extraction: Some(extraction) })
}
