//! Elimination of back-links. For a cyclic derivation of `phi` with local
//! leaves `LA` and boxed leaves `BA` this produces an assumption-free Hilbert
//! derivation of
//!
//! ```text
//! (/\LA & /\{[0]a : a in BA}) -> phi
//! ```
//!
//! by induction on nodes plus back-links: a back-link into the current root
//! is erased first and discharged with Löb's axiom, otherwise the root rule
//! is peeled off.

use std::collections::BTreeSet;

use crate::error::{BuildError, CheckError};
use crate::formula::{Formula, FormulaSet};
use crate::hilbert::{box_conj_intro, build_box_mono, build_by_taut, build_transitivity, taut_leaf};
use crate::proof::{dedup_in_order, ClassificationMode, Derivation, LeafClassification, NodeId};

use super::{check_cyclic, classify_view, judge_cyclic, CyclicDerivation, CyclicRule};

/// Output of [`cyclic_to_hilbert`].
#[derive(Debug, Clone)]
pub struct HilbertTranslation {
    /// Concludes `(/\LA & /\[0]BA) -> phi` with empty conjunctions written `T`.
    pub raw: Derivation,
    /// Same implication with `T` conjuncts dropped; just `phi` when both
    /// leaf sets are empty.
    pub normalized: Derivation,
    pub leaves: LeafClassification,
}

fn boxed_all(items: &[Formula]) -> Vec<Formula> {
    items.iter().map(|f| Formula::boxed(0, f.clone())).collect()
}

fn lemma_formula(local: &[Formula], boxed: &[Formula], phi: &Formula) -> Formula {
    Formula::imp(
        Formula::and(Formula::conj(local.iter().cloned()), Formula::conj(boxed_all(boxed))),
        phi.clone(),
    )
}

fn normalized_formula(local: &[Formula], boxed: &[Formula], phi: &Formula) -> Formula {
    match (local.is_empty(), boxed.is_empty()) {
        (true, true) => phi.clone(),
        (true, false) => Formula::imp(Formula::conj(boxed_all(boxed)), phi.clone()),
        (false, true) => Formula::imp(Formula::conj(local.iter().cloned()), phi.clone()),
        (false, false) => lemma_formula(local, boxed, phi),
    }
}

/// `/\[0]xs -> /\[0][0]xs` from one transitivity proof per item.
fn boxed_to_double(items: &[Formula]) -> Result<Derivation, BuildError> {
    let trans = items
        .iter()
        .map(|s| build_transitivity(s, 0))
        .collect::<Result<Vec<_>, _>>()?;
    let single = boxed_all(items);
    let double = boxed_all(&single);
    build_by_taut(Formula::imp(Formula::conj(single), Formula::conj(double)), trans)
}

/// `lhs -> [0](/\r & /\[0]s)`, where `lhs` is any conjunction listing
/// `[0]a` for every `a` in `r` and in `s`.
fn box_lemma_antecedent(r: &[Formula], s: &[Formula], lhs: Formula) -> Result<Derivation, BuildError> {
    let a = Formula::conj(r.iter().cloned());
    let bs = Formula::conj(boxed_all(s));
    let ci = box_conj_intro(&[a.clone(), bs.clone()], 0)?;
    let cr = box_conj_intro(r, 0)?;
    let cs = box_conj_intro(&boxed_all(s), 0)?;
    let t = boxed_to_double(s)?;
    build_by_taut(Formula::imp(lhs, Formula::boxed(0, Formula::and(a, bs))), vec![ci, cr, cs, t])
}

struct Translator<'a> {
    c: &'a CyclicDerivation,
}

impl Translator<'_> {
    fn view(&self, root: NodeId, erased: &BTreeSet<NodeId>) -> LeafClassification {
        classify_view(self.c, root, erased, ClassificationMode::Cyclic)
    }

    fn subtree(&self, root: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.c.children(id));
        }
        out.sort();
        out
    }

    fn lemma(&self, root: NodeId, erased: &BTreeSet<NodeId>) -> Result<Derivation, BuildError> {
        let c = self.c;
        let phi = c.formula(root).clone();
        let cls = self.view(root, erased);
        let (la, ba) = (cls.local_list(), cls.boxed_list());
        let goal = lemma_formula(&la, &ba, &phi);

        let into_root = self
            .subtree(root)
            .into_iter()
            .find(|&id| !erased.contains(&id) && c.node(id).rule == CyclicRule::Backlink(root));
        if let Some(b) = into_root {
            let mut erased2 = erased.clone();
            erased2.insert(b);
            let inner = self.lemma(root, &erased2)?;
            let cls2 = self.view(root, &erased2);
            let r = cls2.local_list();
            let s = dedup_in_order(cls2.boxed.iter().filter(|l| l.node != b).map(|l| &l.formula));
            let bphi = Formula::boxed(0, phi.clone());
            let step = Formula::imp(bphi.clone(), phi.clone());
            let antecedent = Formula::and(Formula::conj(r.iter().cloned()), Formula::conj(boxed_all(&s)));
            // (/\r & /\[0]s) -> ([0]phi -> phi)
            let form2 = build_by_taut(Formula::imp(antecedent, step.clone()), vec![inner])?;
            let mono = build_box_mono(form2.clone(), 0)?;
            let lhs = Formula::conj(boxed_all(&r).into_iter().chain(boxed_all(&s)).collect::<Vec<_>>());
            let x = box_lemma_antecedent(&r, &s, lhs.clone())?;
            let lob = Derivation::axiom(Formula::imp(Formula::boxed(0, step), bphi.clone()));
            let q1 = build_by_taut(Formula::imp(lhs, bphi), vec![x, mono, lob])?;
            return build_by_taut(goal, vec![form2, q1]);
        }

        match c.node(root).rule {
            CyclicRule::Axiom => build_by_taut(goal, vec![Derivation::axiom(phi)]),
            CyclicRule::Assumption => taut_leaf(goal),
            CyclicRule::Backlink(_) if erased.contains(&root) => taut_leaf(goal),
            CyclicRule::Backlink(t) => Err(BuildError::Invalid(CheckError::BacklinkNotAncestor { leaf: root, target: t })),
            CyclicRule::Mp(minor, major) => {
                let p1 = self.lemma(minor, erased)?;
                let p2 = self.lemma(major, erased)?;
                build_by_taut(goal, vec![p1, p2])
            }
            CyclicRule::Nec(p) => {
                let inner = self.lemma(p, erased)?;
                let cls1 = self.view(p, erased);
                let (la1, ba1) = (cls1.local_list(), cls1.boxed_list());
                let mono = build_box_mono(inner, 0)?;
                // ba is la1 ++ ba1 up to order and repetition.
                let lhs = Formula::conj(boxed_all(&ba));
                let x = box_lemma_antecedent(&la1, &ba1, lhs)?;
                build_by_taut(goal, vec![x, mono])
            }
        }
    }
}

/// Translates a valid cyclic derivation into an assumption-free Hilbert
/// derivation of its characteristic implication.
pub fn cyclic_to_hilbert(c: &CyclicDerivation) -> Result<HilbertTranslation, BuildError> {
    check_cyclic(c)?;
    let t = Translator { c };
    let raw = t.lemma(c.root(), &BTreeSet::new())?;
    let leaves = classify_view(c, c.root(), &BTreeSet::new(), ClassificationMode::Cyclic);
    let (la, ba) = (leaves.local_list(), leaves.boxed_list());
    let norm = normalized_formula(&la, &ba, c.conclusion());
    let normalized = if &norm == raw.formula() {
        raw.clone()
    } else {
        build_by_taut(norm, vec![raw.clone()])?
    };
    Ok(HilbertTranslation { raw, normalized, leaves })
}

/// A Hilbert derivation witnessing `sigma; gamma |- phi` for a cyclic
/// derivation witnessing `sigma; gamma |-cycl phi`: the translated
/// implication, its local antecedents as assumption leaves, and its boxed
/// antecedents as assumption leaves under `nec`.
pub fn theorem_witness(c: &CyclicDerivation, sigma: &FormulaSet, gamma: &FormulaSet) -> Result<Derivation, BuildError> {
    judge_cyclic(c, sigma, gamma)?;
    let tr = cyclic_to_hilbert(c)?;
    let (la, ba) = (tr.leaves.local_list(), tr.leaves.boxed_list());
    let locals = build_by_taut(
        Formula::conj(la.iter().cloned()),
        la.iter().cloned().map(Derivation::assume).collect(),
    )?;
    let boxed = build_by_taut(
        Formula::conj(boxed_all(&ba)),
        ba.iter().cloned().map(|f| Derivation::nec(Derivation::assume(f))).collect(),
    )?;
    build_by_taut(c.conclusion().clone(), vec![tr.raw, locals, boxed])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fml;
    use crate::hilbert::check_hilbert;
    use crate::proof::NodeId;

    fn closed(d: &Derivation) -> Formula {
        check_hilbert(d, &FormulaSet::new(), &FormulaSet::new()).unwrap().conclusion
    }

    #[test]
    fn lob_example() {
        let c = CyclicDerivation::lob_example(fml("p"));
        let tr = cyclic_to_hilbert(&c).unwrap();
        assert_eq!(closed(&tr.raw), fml("(([0]p -> p) & [0]([0]p -> p)) -> p"));
        assert_eq!(closed(&tr.normalized), fml("(([0]p -> p) & [0]([0]p -> p)) -> p"));
        let s: FormulaSet = [fml("[0]p -> p")].into_iter().collect();
        let w = theorem_witness(&c, &s, &s).unwrap();
        assert_eq!(check_hilbert(&w, &s, &s).unwrap().conclusion, fml("p"));
    }

    #[test]
    fn single_leaf() {
        let c = CyclicDerivation::from_parts(vec![(fml("p"), CyclicRule::Assumption)], 0);
        let tr = cyclic_to_hilbert(&c).unwrap();
        assert_eq!(closed(&tr.raw), fml("(p & T) -> p"));
        assert_eq!(closed(&tr.normalized), fml("p -> p"));
    }

    #[test]
    fn leaf_under_nec() {
        let c = CyclicDerivation::from_parts(
            vec![(fml("[0]p"), CyclicRule::Nec(NodeId(1))), (fml("p"), CyclicRule::Assumption)],
            0,
        );
        let tr = cyclic_to_hilbert(&c).unwrap();
        assert_eq!(closed(&tr.raw), fml("(T & [0]p) -> [0]p"));
        assert_eq!(closed(&tr.normalized), fml("[0]p -> [0]p"));
    }

    #[test]
    fn axiom_only() {
        let c = CyclicDerivation::from_parts(vec![(fml("p -> p"), CyclicRule::Axiom)], 0);
        let tr = cyclic_to_hilbert(&c).unwrap();
        assert_eq!(closed(&tr.raw), fml("(T & T) -> (p -> p)"));
        assert_eq!(closed(&tr.normalized), fml("p -> p"));
    }

    #[test]
    fn nested_links() {
        // [0]q -> q and [0]p -> p feeding two loops, the inner one through a
        // second nec.
        let c = CyclicDerivation::from_parts(
            vec![
                (fml("p"), CyclicRule::Mp(NodeId(1), NodeId(6))),
                (fml("[0]p"), CyclicRule::Nec(NodeId(2))),
                (fml("p"), CyclicRule::Mp(NodeId(3), NodeId(5))),
                (fml("[0]p"), CyclicRule::Nec(NodeId(4))),
                (fml("p"), CyclicRule::Backlink(NodeId(2))),
                (fml("[0]p -> p"), CyclicRule::Assumption),
                (fml("[0]p -> p"), CyclicRule::Assumption),
            ],
            0,
        );
        check_cyclic(&c).unwrap();
        let tr = cyclic_to_hilbert(&c).unwrap();
        assert_eq!(closed(&tr.raw), fml("(([0]p -> p) & [0]([0]p -> p)) -> p"));
    }
}
