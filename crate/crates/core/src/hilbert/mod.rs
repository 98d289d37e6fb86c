//! The Frege-Hilbert calculus for GLP.
//!
//! Axiom schemes:
//!
//! 1. propositional tautologies over modal atoms
//! 2. `[i](a -> b) -> ([i]a -> [i]b)`
//! 3. `[i]([i]a -> a) -> [i]a`
//! 4. `<i>a -> [i+1]<i>a`
//! 5. `[i]a -> [i+1]a`
//!
//! Rules are modus ponens and necessitation for `[0]`.

mod build;
mod taut;

pub use build::{
    box_conj_intro, box_nec, build_box_mono, build_by_taut, build_transitivity, taut_leaf,
};
pub use taut::{is_tautology, is_tautology_with_limit, AtomLimitExceeded, DEFAULT_ATOM_LIMIT};

use std::fmt;

use crate::error::CheckError;
use crate::formula::{Formula, FormulaSet};
use crate::proof::{ClassificationMode, Derivation, Judgment, LeafClassification, ProofKind, TreeChecker};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxiomKind {
    Tautology,
    Distribution,
    Lob,
    DiamondUp,
    BoxUp,
}

impl AxiomKind {
    pub fn numeral(self) -> &'static str {
        match self {
            AxiomKind::Tautology => "i",
            AxiomKind::Distribution => "ii",
            AxiomKind::Lob => "iii",
            AxiomKind::DiamondUp => "iv",
            AxiomKind::BoxUp => "v",
        }
    }
}

impl fmt::Display for AxiomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.numeral())
    }
}

/// The first scheme, in the order above, that `f` instantiates.
///
/// A formula with more modal atoms than [`DEFAULT_ATOM_LIMIT`] is never
/// recognised as a tautology.
pub fn is_axiom(f: &Formula) -> Option<AxiomKind> {
    if is_tautology(f) == Ok(true) {
        return Some(AxiomKind::Tautology);
    }
    let (lhs, rhs) = f.as_imp()?;
    if let (Some((i, body)), Some((a1, b1))) = (lhs.as_box(), rhs.as_imp()) {
        if let (Some((j, a)), Some((k, b))) = (a1.as_box(), b1.as_box()) {
            if i == j && i == k && body.as_imp() == Some((a, b)) {
                return Some(AxiomKind::Distribution);
            }
        }
    }
    if let (Some((i, body)), Some((j, a))) = (lhs.as_box(), rhs.as_box()) {
        if i == j {
            if let Some((ba, a2)) = body.as_imp() {
                if a2 == a && ba.as_box() == Some((i, a)) {
                    return Some(AxiomKind::Lob);
                }
            }
        }
    }
    if let (Some((i, _)), Some((j, body))) = (lhs.as_diamond(), rhs.as_box()) {
        if j == i + 1 && body == lhs {
            return Some(AxiomKind::DiamondUp);
        }
    }
    if let (Some((i, a)), Some((j, b))) = (lhs.as_box(), rhs.as_box()) {
        if j == i + 1 && a == b {
            return Some(AxiomKind::BoxUp);
        }
    }
    None
}

/// Validates every step of `d` and splits its assumption leaves: a leaf is
/// boxed iff its path to the root crosses `nec`, local otherwise.
pub fn classify(d: &Derivation) -> Result<LeafClassification, CheckError> {
    TreeChecker::new(false).run(d, ClassificationMode::Hilbert)
}

/// Checks `sigma; gamma |- phi` where `phi` is the root formula of `d`.
pub fn check_hilbert(d: &Derivation, sigma: &FormulaSet, gamma: &FormulaSet) -> Result<Judgment, CheckError> {
    let leaves = classify(d)?;
    leaves.check_cover(sigma, gamma)?;
    Ok(Judgment {
        kind: ProofKind::Hilbert,
        sigma: sigma.clone(),
        gamma: gamma.clone(),
        conclusion: d.formula().clone(),
        leaves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fml;

    fn set(items: &[&str]) -> FormulaSet {
        items.iter().map(|s| fml(s)).collect()
    }

    #[test]
    fn recognises_schemes() {
        assert_eq!(is_axiom(&fml("[3]([3]p -> p) -> [3]p")), Some(AxiomKind::Lob));
        assert_eq!(is_axiom(&fml("[0]p -> [1]p")), Some(AxiomKind::BoxUp));
        assert_eq!(is_axiom(&fml("p -> q")), None);
        assert_eq!(is_axiom(&fml("[0](p -> q) -> ([0]p -> [0]q)")), Some(AxiomKind::Distribution));
        assert_eq!(is_axiom(&fml("<2>(p & q) -> [3]<2>(p & q)")), Some(AxiomKind::DiamondUp));
        assert_eq!(is_axiom(&fml("[0]p -> [0]p")), Some(AxiomKind::Tautology));
        assert_eq!(is_axiom(&fml("[1]p -> [0]p")), None);
        assert_eq!(is_axiom(&fml("<0>p -> [2]<0>p")), None);
        assert_eq!(is_axiom(&fml("[0]([0]p -> q) -> [0]p")), None);
    }

    #[test]
    fn nec_leaf_is_boxed() {
        let d = Derivation::nec(Derivation::assume(fml("p")));
        let j = check_hilbert(&d, &set(&["p"]), &FormulaSet::new()).unwrap();
        assert_eq!(j.boxed_leaves(), set(&["p"]));
        assert!(j.local_leaves().is_empty());
        assert!(check_hilbert(&d, &FormulaSet::new(), &set(&["p"])).is_err());
    }

    #[test]
    fn mp_leaves_are_local() {
        let d = Derivation::mp(Derivation::assume(fml("p")), Derivation::assume(fml("p -> q"))).unwrap();
        let j = check_hilbert(&d, &FormulaSet::new(), &set(&["p", "p -> q"])).unwrap();
        assert_eq!(j.local_leaves(), set(&["p", "p -> q"]));
        let err = check_hilbert(&d, &FormulaSet::new(), &set(&["p"])).unwrap_err();
        match err {
            CheckError::AssumptionOutside { formula, .. } => assert_eq!(formula, fml("p -> q")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_steps_rejected() {
        let bad_ax = Derivation::axiom(fml("p -> q"));
        assert_eq!(classify(&bad_ax).unwrap_err().code(), "E_NOT_AXIOM");
        let bad_nec = Derivation::new(fml("[1](p -> p)"), crate::proof::Rule::Nec(Derivation::axiom(fml("p -> p"))));
        assert_eq!(classify(&bad_nec).unwrap_err().code(), "E_MALFORMED_INFERENCE");
    }
}
