//! Well-founded proof trees shared by the Hilbert calculus and the omega-rule,
//! plus the judgment and leaf-classification records every checker returns.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{AssumptionSide, BuildError, CheckError};
use crate::formula::{Formula, FormulaSet};
use crate::hilbert::{is_axiom, AxiomKind};

/// Index of a node. For recursive trees this is the preorder position; for
/// arena-backed derivations it is the arena slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A rooted finite tree of formulas built by axioms, assumptions, `mp`, `nec`
/// and the omega-rule. Without omega nodes this is an ordinary Hilbert
/// derivation. Subtrees are reference counted, so reusing a subproof is cheap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Derivation(Arc<Step>);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub formula: Formula,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    Axiom,
    Assumption,
    /// Children are `[minor, major]`: from `a` and `a -> b` infer `b`.
    Mp(Derivation, Derivation),
    /// From `a` infer `[0]a`.
    Nec(Derivation),
    Omega(OmegaLasso),
}

/// Eventually periodic presentation of an omega-rule application concluding
/// `phi_0` (the node formula). The sequence `phi_1, phi_2, ...` is
/// `phi_prefix` followed by `phi_cycle` repeated forever, and premise `n`
/// (for `n >= 0`) is `prem_prefix[n]` or, past the prefix, the matching entry
/// of `prem_cycle`. Premise `n` must conclude `[0]phi_{n+1} -> phi_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OmegaLasso {
    pub phi_prefix: Vec<Formula>,
    pub phi_cycle: Vec<Formula>,
    pub prem_prefix: Vec<Derivation>,
    pub prem_cycle: Vec<Derivation>,
}

pub type HilbertDerivation = Derivation;
pub type OmegaLassoDerivation = Derivation;

impl Derivation {
    pub fn new(formula: Formula, rule: Rule) -> Derivation {
        Derivation(Arc::new(Step { formula, rule }))
    }

    pub fn axiom(formula: Formula) -> Derivation {
        Derivation::new(formula, Rule::Axiom)
    }

    pub fn assume(formula: Formula) -> Derivation {
        Derivation::new(formula, Rule::Assumption)
    }

    /// Modus ponens; the conclusion is read off the major premise.
    pub fn mp(minor: Derivation, major: Derivation) -> Result<Derivation, BuildError> {
        let (ante, cons) = major
            .formula()
            .as_imp()
            .ok_or_else(|| BuildError::NotImplication(major.formula().clone()))?;
        if ante != minor.formula() {
            return Err(BuildError::MismatchedMinor {
                minor: minor.formula().clone(),
                major: major.formula().clone(),
            });
        }
        let conclusion = cons.clone();
        Ok(Derivation::new(conclusion, Rule::Mp(minor, major)))
    }

    pub fn nec(premise: Derivation) -> Derivation {
        let conclusion = Formula::boxed(0, premise.formula().clone());
        Derivation::new(conclusion, Rule::Nec(premise))
    }

    pub fn omega(conclusion: Formula, lasso: OmegaLasso) -> Derivation {
        Derivation::new(conclusion, Rule::Omega(lasso))
    }

    pub fn formula(&self) -> &Formula {
        &self.0.formula
    }

    pub fn rule(&self) -> &Rule {
        &self.0.rule
    }

    /// Identity of the shared node, for sharing-aware traversals.
    pub(crate) fn ptr(&self) -> *const Step {
        Arc::as_ptr(&self.0)
    }

    /// Immediate subderivations in preorder order.
    pub fn children(&self) -> Vec<&Derivation> {
        match self.rule() {
            Rule::Axiom | Rule::Assumption => Vec::new(),
            Rule::Mp(a, b) => vec![a, b],
            Rule::Nec(a) => vec![a],
            Rule::Omega(l) => l.prem_prefix.iter().chain(l.prem_cycle.iter()).collect(),
        }
    }

    /// Number of node occurrences in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Derivation::size).sum::<usize>()
    }

    pub fn has_omega(&self) -> bool {
        matches!(self.rule(), Rule::Omega(_)) || self.children().into_iter().any(Derivation::has_omega)
    }

    /// Formulas of all assumption leaves, in preorder.
    pub fn assumptions(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.collect_assumptions(&mut out);
        out
    }

    fn collect_assumptions(&self, out: &mut Vec<Formula>) {
        if let Rule::Assumption = self.rule() {
            out.push(self.formula().clone());
        }
        for c in self.children() {
            c.collect_assumptions(out);
        }
    }

    /// Length of the longest branch of the main fragment: branches are cut at
    /// the premise of every `nec` and at every boxed omega premise.
    pub fn local_height(&self) -> usize {
        match self.rule() {
            Rule::Axiom | Rule::Assumption => 0,
            Rule::Nec(_) => 0,
            Rule::Mp(a, b) => 1 + a.local_height().max(b.local_height()),
            Rule::Omega(l) => 1 + l.premise(0).local_height(),
        }
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.rule() {
            Rule::Axiom => "ax",
            Rule::Assumption => "asm",
            Rule::Mp(..) => "mp",
            Rule::Nec(_) => "nec",
            Rule::Omega(_) => "omega",
        };
        let mut t = f.debug_tuple(name);
        t.field(self.formula());
        for c in self.children() {
            t.field(c);
        }
        t.finish()
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl OmegaLasso {
    /// `phi_n` for `n >= 1`.
    pub fn phi(&self, n: usize) -> &Formula {
        assert!(n >= 1, "phi_0 is the conclusion of the omega node");
        let k = n - 1;
        if k < self.phi_prefix.len() {
            &self.phi_prefix[k]
        } else {
            &self.phi_cycle[(k - self.phi_prefix.len()) % self.phi_cycle.len()]
        }
    }

    /// Position of premise `n` in `prem_prefix ++ prem_cycle`.
    pub fn premise_slot(&self, n: usize) -> usize {
        if n < self.prem_prefix.len() {
            n
        } else {
            self.prem_prefix.len() + (n - self.prem_prefix.len()) % self.prem_cycle.len()
        }
    }

    pub fn premise(&self, n: usize) -> &Derivation {
        let slot = self.premise_slot(n);
        if slot < self.prem_prefix.len() {
            &self.prem_prefix[slot]
        } else {
            &self.prem_cycle[slot - self.prem_prefix.len()]
        }
    }

    /// Number of premise positions that must be checked. Past
    /// `max(|prem_prefix|, |phi_prefix| + 1)` the triple
    /// `(premise n, phi_n, phi_{n+1})` is periodic with period
    /// `lcm(|prem_cycle|, |phi_cycle|)`, so one full period beyond that
    /// point covers every position.
    pub fn horizon(&self) -> usize {
        let (a, b) = (self.prem_cycle.len(), self.phi_cycle.len());
        let lcm = a / gcd(a, b) * b;
        self.prem_prefix.len().max(self.phi_prefix.len() + 1) + lcm
    }
}

/// An assumption leaf occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Leaf {
    pub node: NodeId,
    pub formula: Formula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassificationMode {
    Hilbert,
    Cyclic,
    Inf,
    Omega,
}

/// Assumption leaves split into those needed at the current world (local)
/// and those needed under a box (boxed). For cyclic, infinite and omega
/// derivations a leaf may sit in both lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafClassification {
    pub mode: ClassificationMode,
    pub local: Vec<Leaf>,
    pub boxed: Vec<Leaf>,
}

impl LeafClassification {
    pub fn local_formulas(&self) -> FormulaSet {
        self.local.iter().map(|l| l.formula.clone()).collect()
    }

    pub fn boxed_formulas(&self) -> FormulaSet {
        self.boxed.iter().map(|l| l.formula.clone()).collect()
    }

    /// Local formulas in leaf order, first occurrence kept.
    pub fn local_list(&self) -> Vec<Formula> {
        dedup_in_order(self.local.iter().map(|l| &l.formula))
    }

    pub fn boxed_list(&self) -> Vec<Formula> {
        dedup_in_order(self.boxed.iter().map(|l| &l.formula))
    }

    /// Fails on the first leaf (by node id) that its side does not cover.
    pub fn check_cover(&self, sigma: &FormulaSet, gamma: &FormulaSet) -> Result<(), CheckError> {
        let mut pending: Vec<(&Leaf, AssumptionSide)> = self
            .local
            .iter()
            .filter(|l| !gamma.contains(&l.formula))
            .map(|l| (l, AssumptionSide::Gamma))
            .chain(
                self.boxed
                    .iter()
                    .filter(|l| !sigma.contains(&l.formula))
                    .map(|l| (l, AssumptionSide::Sigma)),
            )
            .collect();
        pending.sort_by_key(|(l, side)| (l.node, *side == AssumptionSide::Sigma));
        match pending.first() {
            None => Ok(()),
            Some((leaf, side)) => Err(CheckError::AssumptionOutside {
                node: leaf.node,
                formula: leaf.formula.clone(),
                side: *side,
            }),
        }
    }

    pub fn is_covered_by(&self, sigma: &FormulaSet, gamma: &FormulaSet) -> bool {
        self.check_cover(sigma, gamma).is_ok()
    }
}

pub(crate) fn dedup_in_order<'a>(items: impl Iterator<Item = &'a Formula>) -> Vec<Formula> {
    let mut seen = FormulaSet::new();
    items.filter(|f| seen.insert((*f).clone())).cloned().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofKind {
    Hilbert,
    Cyclic,
    Inf,
    Omega,
}

/// A checked claim `Sigma; Gamma |- conclusion` in one of the derivation
/// families, together with the leaf classification that justifies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub kind: ProofKind,
    pub sigma: FormulaSet,
    pub gamma: FormulaSet,
    pub conclusion: Formula,
    pub leaves: LeafClassification,
}

impl Judgment {
    pub fn boxed_leaves(&self) -> FormulaSet {
        self.leaves.boxed_formulas()
    }

    pub fn local_leaves(&self) -> FormulaSet {
        self.leaves.local_formulas()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Context {
    Local,
    Boxed,
    Both,
}

impl Context {
    fn with_boxed(self) -> Context {
        match self {
            Context::Local | Context::Both => Context::Both,
            Context::Boxed => Context::Boxed,
        }
    }
}

/// Validates every step of a well-founded tree and classifies its assumption
/// leaves. Node ids are preorder positions.
pub(crate) struct TreeChecker {
    allow_omega: bool,
    kind: &'static str,
    next: usize,
    axioms: HashMap<Formula, Option<AxiomKind>>,
    local: Vec<Leaf>,
    boxed: Vec<Leaf>,
}

impl TreeChecker {
    pub(crate) fn new(allow_omega: bool) -> Self {
        TreeChecker {
            allow_omega,
            kind: if allow_omega { "omega" } else { "Hilbert" },
            next: 0,
            axioms: HashMap::new(),
            local: Vec::new(),
            boxed: Vec::new(),
        }
    }

    pub(crate) fn run(mut self, d: &Derivation, mode: ClassificationMode) -> Result<LeafClassification, CheckError> {
        self.visit(d, Context::Local)?;
        Ok(LeafClassification {
            mode,
            local: self.local,
            boxed: self.boxed,
        })
    }

    fn visit(&mut self, d: &Derivation, ctx: Context) -> Result<(), CheckError> {
        let node = NodeId(self.next);
        self.next += 1;
        let formula = d.formula();
        match d.rule() {
            Rule::Axiom => {
                let known = match self.axioms.get(formula) {
                    Some(k) => *k,
                    None => {
                        let k = is_axiom(formula);
                        self.axioms.insert(formula.clone(), k);
                        k
                    }
                };
                if known.is_none() {
                    return Err(CheckError::NotAnAxiom {
                        node,
                        formula: formula.clone(),
                    });
                }
            }
            Rule::Assumption => {
                let leaf = Leaf {
                    node,
                    formula: formula.clone(),
                };
                match ctx {
                    Context::Local => self.local.push(leaf),
                    Context::Boxed => self.boxed.push(leaf),
                    Context::Both => {
                        self.local.push(leaf.clone());
                        self.boxed.push(leaf);
                    }
                }
            }
            Rule::Mp(minor, major) => {
                let expected = Formula::imp(minor.formula().clone(), formula.clone());
                if major.formula() != &expected {
                    return Err(CheckError::MalformedInference {
                        node,
                        rule: "mp",
                        expected,
                        actual: major.formula().clone(),
                    });
                }
                self.visit(minor, ctx)?;
                self.visit(major, ctx)?;
            }
            Rule::Nec(premise) => {
                let expected = Formula::boxed(0, premise.formula().clone());
                if formula != &expected {
                    return Err(CheckError::MalformedInference {
                        node,
                        rule: "nec",
                        expected,
                        actual: formula.clone(),
                    });
                }
                self.visit(premise, Context::Boxed)?;
            }
            Rule::Omega(lasso) => {
                if !self.allow_omega {
                    return Err(CheckError::UnexpectedRule {
                        node,
                        rule: "omega",
                        kind: self.kind,
                    });
                }
                check_lasso_pattern(node, formula, lasso)?;
                let prefix = lasso.prem_prefix.len();
                for (i, p) in lasso.prem_prefix.iter().enumerate() {
                    let c = if i == 0 { ctx } else { Context::Boxed };
                    self.visit(p, c)?;
                }
                for (j, p) in lasso.prem_cycle.iter().enumerate() {
                    // The first cycle entry doubles as premise 0 when there is no prefix.
                    let c = if prefix == 0 && j == 0 {
                        ctx.with_boxed()
                    } else {
                        Context::Boxed
                    };
                    self.visit(p, c)?;
                }
            }
        }
        Ok(())
    }
}

fn check_lasso_pattern(node: NodeId, phi0: &Formula, lasso: &OmegaLasso) -> Result<(), CheckError> {
    if lasso.phi_cycle.is_empty() {
        return Err(CheckError::MalformedLasso {
            node,
            reason: "phi_cycle is empty".into(),
        });
    }
    if lasso.prem_cycle.is_empty() {
        return Err(CheckError::MalformedLasso {
            node,
            reason: "prem_cycle is empty".into(),
        });
    }
    for n in 0..lasso.horizon() {
        let phi_n = if n == 0 { phi0 } else { lasso.phi(n) };
        let expected = Formula::imp(Formula::boxed(0, lasso.phi(n + 1).clone()), phi_n.clone());
        let actual = lasso.premise(n).formula();
        if actual != &expected {
            return Err(CheckError::OmegaPattern {
                node,
                position: n,
                expected,
                actual: actual.clone(),
            });
        }
    }
    Ok(())
}
