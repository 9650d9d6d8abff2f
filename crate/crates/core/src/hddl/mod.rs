//! Reader for the supported HDDL subset and grounding into a
//! [`GroundProblem`](crate::model::GroundProblem).
//!
//! The accepted grammar is described in `docs/hddl-subset.md`.

mod ast;
mod ground;
mod parse;
pub mod sexpr;

use std::path::Path;

use thiserror::Error;

pub use ast::*;
pub use ground::{ground, GroundOptions};
pub use parse::{parse_domain, parse_problem};
pub use sexpr::Pos;

use crate::model::{GroundProblem, ModelError};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum HddlError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: {msg}")]
    Invalid { pos: Pos, msg: String },
    #[error("{pos}: not supported: {msg}")]
    Unsupported { pos: Pos, msg: String },
    #[error("grounding exceeds the limit of {0} instances")]
    TooLarge(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl HddlError {
    pub(crate) fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        HddlError::Syntax { pos, msg: msg.into() }
    }

    pub(crate) fn invalid(pos: Pos, msg: impl Into<String>) -> Self {
        HddlError::Invalid { pos, msg: msg.into() }
    }

    pub(crate) fn unsupported(pos: Pos, msg: impl Into<String>) -> Self {
        HddlError::Unsupported { pos, msg: msg.into() }
    }
}

/// Parses and grounds a domain and a problem given as text.
pub fn load<T: Scalar>(domain: &str, problem: &str, options: &GroundOptions) -> Result<GroundProblem<T>, HddlError> {
    let d = parse_domain(domain)?;
    let p = parse_problem(problem, &d)?;
    ground(&d, &p, options)
}

fn read_file(path: &Path) -> Result<String, HddlError> {
    std::fs::read_to_string(path).map_err(|source| HddlError::Io { path: path.display().to_string(), source })
}

/// Like [`load`], reading both files. Parse errors are prefixed with the
/// offending file.
pub fn load_files<T: Scalar>(
    domain: &Path,
    problem: &Path,
    options: &GroundOptions,
) -> Result<GroundProblem<T>, HddlError> {
    let in_file = |path: &Path, e: HddlError| match e {
        HddlError::Syntax { pos, msg } => HddlError::syntax(pos, format!("{msg} (in {})", path.display())),
        HddlError::Invalid { pos, msg } => HddlError::invalid(pos, format!("{msg} (in {})", path.display())),
        HddlError::Unsupported { pos, msg } => HddlError::unsupported(pos, format!("{msg} (in {})", path.display())),
        other => other,
    };
    let d = parse_domain(&read_file(domain)?).map_err(|e| in_file(domain, e))?;
    let p = parse_problem(&read_file(problem)?, &d).map_err(|e| in_file(problem, e))?;
    ground(&d, &p, options)
}
