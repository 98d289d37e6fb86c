use thiserror::Error;

use crate::formula::Formula;
use crate::proof::NodeId;

/// Which side of a global-local judgment an assumption leaf must come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssumptionSide {
    /// Boxed leaves, checked against Sigma.
    Sigma,
    /// Local leaves, checked against Gamma.
    Gamma,
}

impl std::fmt::Display for AssumptionSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AssumptionSide::Sigma => "sigma",
            AssumptionSide::Gamma => "gamma",
        })
    }
}

/// Reasons a derivation is rejected by one of the checkers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("node {node}: {formula} is not an axiom of GLP")]
    NotAnAxiom { node: NodeId, formula: Formula },
    #[error("node {node}: malformed {rule} step, expected {expected}, found {actual}")]
    MalformedInference {
        node: NodeId,
        rule: &'static str,
        expected: Formula,
        actual: Formula,
    },
    #[error("node {node}: rule {rule} is not allowed in a {kind} derivation")]
    UnexpectedRule {
        node: NodeId,
        rule: &'static str,
        kind: &'static str,
    },
    #[error("leaf {node}: assumption {formula} is not in {side}")]
    AssumptionOutside {
        node: NodeId,
        formula: Formula,
        side: AssumptionSide,
    },
    #[error("node {node}: {reason}")]
    TreeShape { node: NodeId, reason: String },
    #[error("leaf {leaf}: back-link target {target} is not a strict ancestor")]
    BacklinkNotAncestor { leaf: NodeId, target: NodeId },
    #[error("leaf {leaf}: no nec application between back-link target {target} and the leaf")]
    BacklinkWithoutNec { leaf: NodeId, target: NodeId },
    #[error("leaf {leaf}: formula {leaf_formula} differs from back-link target {target} formula {target_formula}")]
    BacklinkFormulaMismatch {
        leaf: NodeId,
        target: NodeId,
        leaf_formula: Formula,
        target_formula: Formula,
    },
    #[error("node {node}: lies on a cycle that crosses no nec application")]
    NecFreeCycle { node: NodeId },
    #[error("node {node}: omega premise {position} concludes {actual}, expected {expected}")]
    OmegaPattern {
        node: NodeId,
        position: usize,
        expected: Formula,
        actual: Formula,
    },
    #[error("node {node}: malformed omega lasso: {reason}")]
    MalformedLasso { node: NodeId, reason: String },
}

impl CheckError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            CheckError::NotAnAxiom { .. } => "E_NOT_AXIOM",
            CheckError::MalformedInference { .. } => "E_MALFORMED_INFERENCE",
            CheckError::UnexpectedRule { .. } => "E_UNEXPECTED_RULE",
            CheckError::AssumptionOutside { .. } => "E_ASSUMPTION_OUTSIDE",
            CheckError::TreeShape { .. } => "E_TREE_SHAPE",
            CheckError::BacklinkNotAncestor { .. } => "E_BACKLINK_NOT_ANCESTOR",
            CheckError::BacklinkWithoutNec { .. } => "E_BACKLINK_NO_NEC",
            CheckError::BacklinkFormulaMismatch { .. } => "E_BACKLINK_FORMULA_MISMATCH",
            CheckError::NecFreeCycle { .. } => "E_NEC_FREE_CYCLE",
            CheckError::OmegaPattern { .. } => "E_OMEGA_PATTERN",
            CheckError::MalformedLasso { .. } => "E_MALFORMED_LASSO",
        }
    }
}

/// Failures of the proof-building combinators and translators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("{0} is not a tautological consequence of the premises")]
    NotTautological(Formula),
    #[error("tautology check gave up: {0}")]
    AtomLimit(#[from] crate::hilbert::AtomLimitExceeded),
    #[error("derivation has assumption leaves")]
    HasAssumptions,
    #[error("{0} is not an implication")]
    NotImplication(Formula),
    #[error("modus ponens: minor premise {minor} does not match {major}")]
    MismatchedMinor { minor: Formula, major: Formula },
    #[error("invalid input derivation: {0}")]
    Invalid(#[from] CheckError),
}
