//! Translations between regular infinite derivations and omega-derivations.

use std::collections::HashMap;

use crate::cyclic::{check_cyclic, CyclicDerivation, CyclicNode, CyclicRule};
use crate::error::{BuildError, CheckError};
use crate::formula::{Formula, FormulaSet};
use crate::hilbert::{build_box_mono, build_by_taut, taut_leaf};
use crate::proof::{ClassificationMode, Derivation, NodeId, OmegaLasso, Rule, TreeChecker};

use super::{check_omega, graph_slices, judge_inf, unravel, GraphRule, ProofGraph, RegularInfDerivation, SliceSequence};

/// Premises `D_n : [0]xi_{n+1} -> xi_n` for one omega application, built
/// node by node along the mp structure of each slice.
struct SliceProver<'a> {
    g: &'a ProofGraph,
    slices: &'a SliceSequence,
    memo: HashMap<(usize, usize), Derivation>,
}

impl SliceProver<'_> {
    /// `[0]xi_{n+1} -> psi_v` for a node `v` of slice `n` (as a slice index).
    fn node(&mut self, n: usize, v: usize) -> Result<Derivation, BuildError> {
        if let Some(d) = self.memo.get(&(n, v)) {
            return Ok(d.clone());
        }
        let next = self.slices.index(n + 1);
        let bxi = Formula::boxed(0, self.slices.slice_formulas[next].clone());
        let node = &self.g.nodes[v];
        let goal = Formula::imp(bxi.clone(), node.formula.clone());
        let d = match node.rule {
            GraphRule::Axiom => build_by_taut(goal, vec![Derivation::axiom(node.formula.clone())])?,
            GraphRule::Assumption => build_by_taut(goal, vec![Derivation::assume(node.formula.clone())])?,
            GraphRule::Nec(b) => {
                let pick = taut_leaf(Formula::imp(
                    self.slices.slice_formulas[next].clone(),
                    self.g.nodes[b].formula.clone(),
                ))?;
                build_box_mono(pick, 0)?
            }
            GraphRule::Mp(a, b) => {
                let da = self.node(n, a)?;
                let db = self.node(n, b)?;
                build_by_taut(goal, vec![da, db])?
            }
        };
        self.memo.insert((n, v), d.clone());
        Ok(d)
    }

    fn premise(&mut self, n: usize) -> Result<Derivation, BuildError> {
        let next = self.slices.index(n + 1);
        let bxi = Formula::boxed(0, self.slices.slice_formulas[next].clone());
        let mut members: Vec<usize> = self.slices.slice_sets[n].iter().copied().collect();
        let rank: HashMap<usize, usize> = self.g.bfs_order().into_iter().enumerate().map(|(i, v)| (v, i)).collect();
        members.sort_by_key(|v| rank.get(v).copied().unwrap_or(usize::MAX));
        let mut seen = FormulaSet::new();
        let mut parts = Vec::new();
        for v in members {
            if seen.insert(self.g.nodes[v].formula.clone()) {
                parts.push(self.node(n, v)?);
            }
        }
        build_by_taut(
            Formula::imp(bxi, self.slices.slice_formulas[n].clone()),
            parts,
        )
    }
}

/// An omega-derivation of `xi_0` for the unfolding of `g` from `start`.
fn omega_for(g: &ProofGraph, start: usize) -> Result<Derivation, BuildError> {
    let sub = ProofGraph {
        nodes: g.nodes.clone(),
        root: start,
    };
    let slices = graph_slices(&sub, start);
    let (pre, per) = (slices.preperiod, slices.period);
    let mut prover = SliceProver {
        g: &sub,
        slices: &slices,
        memo: HashMap::new(),
    };
    let premises = (0..pre + per).map(|n| prover.premise(n)).collect::<Result<Vec<_>, _>>()?;
    let phi = |n: usize| slices.xi(n).clone();
    let lasso = OmegaLasso {
        phi_prefix: (1..=pre).map(phi).collect(),
        phi_cycle: (pre + 1..=pre + per).map(phi).collect(),
        prem_prefix: premises[..pre].to_vec(),
        prem_cycle: premises[pre..].to_vec(),
    };
    Ok(Derivation::omega(phi(0), lasso))
}

/// Turns a regular infinite derivation into an omega-derivation with the
/// same conclusion and the same `sigma; gamma` bound.
///
/// The main fragment is copied. At each `nec` whose premise has an infinite
/// unfolding, the premise is replaced by an omega application concluding
/// the slice conjunction `xi_0`, followed by the tautology `xi_0 -> psi`.
/// A `nec` over a finite unfolding keeps its subtree as it is.
pub fn inf_to_omega(r: &RegularInfDerivation, sigma: &FormulaSet, gamma: &FormulaSet) -> Result<Derivation, BuildError> {
    judge_inf(r, sigma, gamma)?;
    let c = r.presentation();
    let g = r.graph();
    let graph_index = graph_index(c);

    fn has_link(c: &CyclicDerivation, id: NodeId) -> bool {
        match c.node(id).rule {
            CyclicRule::Backlink(_) => true,
            _ => c.children(id).into_iter().any(|k| has_link(c, k)),
        }
    }

    fn copy(c: &CyclicDerivation, id: NodeId) -> Result<Derivation, BuildError> {
        let n = c.node(id);
        Ok(match n.rule {
            CyclicRule::Axiom => Derivation::axiom(n.formula.clone()),
            CyclicRule::Assumption => Derivation::assume(n.formula.clone()),
            CyclicRule::Mp(a, b) => Derivation::mp(copy(c, a)?, copy(c, b)?)?,
            CyclicRule::Nec(a) => Derivation::nec(copy(c, a)?),
            CyclicRule::Backlink(t) => {
                return Err(BuildError::Invalid(CheckError::BacklinkNotAncestor { leaf: id, target: t }))
            }
        })
    }

    fn main(c: &CyclicDerivation, g: &ProofGraph, index: &[usize], id: NodeId) -> Result<Derivation, BuildError> {
        let n = c.node(id);
        match n.rule {
            CyclicRule::Mp(a, b) => Ok(Derivation::mp(main(c, g, index, a)?, main(c, g, index, b)?)?),
            CyclicRule::Nec(p) if has_link(c, p) => {
                let target = match c.node(p).rule {
                    CyclicRule::Backlink(t) => t,
                    _ => p,
                };
                let omega = omega_for(g, index[target.0])?;
                let psi = build_by_taut(c.formula(p).clone(), vec![omega])?;
                Ok(Derivation::nec(psi))
            }
            _ => copy(c, id),
        }
    }

    let w = main(c, &g, &graph_index, c.root())?;
    check_omega(&w, sigma, gamma)?;
    Ok(w)
}

/// Position of each presentation node in `ProofGraph::from_cyclic`.
fn graph_index(c: &CyclicDerivation) -> Vec<usize> {
    let mut index = vec![usize::MAX; c.len()];
    let mut k = 0;
    for (i, n) in c.nodes().iter().enumerate() {
        if !matches!(n.rule, CyclicRule::Backlink(_)) {
            index[i] = k;
            k += 1;
        }
    }
    index
}

/// Replaces every omega application by the ladder
///
/// ```text
/// phi_n  by mp from  [0]phi_{n+1} (by nec from rung n+1)  and  premise n
/// ```
///
/// folded into a back-link as soon as a rung repeats an earlier one's
/// formula and premise position.
pub fn omega_to_inf(w: &Derivation) -> Result<RegularInfDerivation, BuildError> {
    TreeChecker::new(true).run(w, ClassificationMode::Omega)?;
    let mut nodes: Vec<CyclicNode> = Vec::new();
    emit(w, &mut nodes);
    let c = CyclicDerivation::new(nodes, NodeId(0));
    check_cyclic(&c)?;
    Ok(unravel(&c)?)
}

fn push(nodes: &mut Vec<CyclicNode>, formula: Formula) -> NodeId {
    nodes.push(CyclicNode {
        formula,
        rule: CyclicRule::Assumption,
    });
    NodeId(nodes.len() - 1)
}

fn emit(d: &Derivation, nodes: &mut Vec<CyclicNode>) -> NodeId {
    let id = push(nodes, d.formula().clone());
    let rule = match d.rule() {
        Rule::Axiom => CyclicRule::Axiom,
        Rule::Assumption => CyclicRule::Assumption,
        Rule::Mp(a, b) => {
            let a = emit(a, nodes);
            let b = emit(b, nodes);
            CyclicRule::Mp(a, b)
        }
        Rule::Nec(a) => CyclicRule::Nec(emit(a, nodes)),
        Rule::Omega(lasso) => {
            nodes.pop();
            return ladder(d.formula(), lasso, nodes);
        }
    };
    nodes[id.0].rule = rule;
    id
}

fn ladder(phi0: &Formula, lasso: &OmegaLasso, nodes: &mut Vec<CyclicNode>) -> NodeId {
    let mut rungs: HashMap<(Formula, usize), NodeId> = HashMap::new();
    let root = NodeId(nodes.len());
    // Rungs are emitted top-down along the spine; premise subtrees are
    // emitted once the spine is closed so every rung keeps preorder ids.
    let mut pending: Vec<(NodeId, usize)> = Vec::new();
    let mut n = 0;
    loop {
        let phi_n = if n == 0 { phi0.clone() } else { lasso.phi(n).clone() };
        let key = (phi_n.clone(), lasso.premise_slot(n));
        if let Some(&target) = rungs.get(&key) {
            nodes.push(CyclicNode {
                formula: phi_n,
                rule: CyclicRule::Backlink(target),
            });
            break;
        }
        let rung = push(nodes, phi_n);
        rungs.insert(key, rung);
        let nec = push(nodes, Formula::boxed(0, lasso.phi(n + 1).clone()));
        nodes[nec.0].rule = CyclicRule::Nec(NodeId(nodes.len()));
        pending.push((rung, n));
        n += 1;
    }
    while let Some((rung, n)) = pending.pop() {
        let premise = emit(lasso.premise(n), nodes);
        nodes[rung.0].rule = CyclicRule::Mp(NodeId(rung.0 + 1), premise);
    }
    root
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fml;
    use crate::infinitary::{local_height_inf, slices};

    fn lob_set() -> FormulaSet {
        [fml("[0]p -> p")].into_iter().collect()
    }

    fn lob_lasso() -> Derivation {
        Derivation::omega(
            fml("p"),
            OmegaLasso {
                phi_prefix: vec![],
                phi_cycle: vec![fml("p")],
                prem_prefix: vec![],
                prem_cycle: vec![Derivation::assume(fml("[0]p -> p"))],
            },
        )
    }

    #[test]
    fn lob_to_omega() {
        let r = unravel(&CyclicDerivation::lob_example(fml("p"))).unwrap();
        let w = inf_to_omega(&r, &lob_set(), &lob_set()).unwrap();
        let j = check_omega(&w, &lob_set(), &lob_set()).unwrap();
        assert_eq!(j.conclusion, fml("p"));
        assert!(inf_to_omega(&r, &FormulaSet::new(), &lob_set()).is_err());
        let back = omega_to_inf(&w).unwrap();
        judge_inf(&back, &lob_set(), &lob_set()).unwrap();
    }

    #[test]
    fn lasso_ladder_is_lob_example() {
        check_omega(&lob_lasso(), &lob_set(), &lob_set()).unwrap();
        assert!(check_omega(&lob_lasso(), &FormulaSet::new(), &lob_set()).is_err());
        let r = omega_to_inf(&lob_lasso()).unwrap();
        assert_eq!(r.presentation(), &CyclicDerivation::lob_example(fml("p")));
        assert_eq!(local_height_inf(&r), 1);
        assert_eq!(lob_lasso().local_height(), 1);
    }

    #[test]
    fn prefix_ladder() {
        let asm = |t: &str| Derivation::assume(fml(t));
        let w = Derivation::omega(
            fml("a"),
            OmegaLasso {
                phi_prefix: vec![fml("b")],
                phi_cycle: vec![fml("c")],
                prem_prefix: vec![asm("[0]b -> a"), asm("[0]c -> b")],
                prem_cycle: vec![asm("[0]c -> c")],
            },
        );
        let s: FormulaSet = ["[0]b -> a", "[0]c -> b", "[0]c -> c"].iter().map(|t| fml(t)).collect();
        check_omega(&w, &s, &s).unwrap();
        let r = omega_to_inf(&w).unwrap();
        let c = r.presentation();
        assert_eq!(c.backlinks().len(), 1);
        judge_inf(&r, &s, &s).unwrap();
        let sl = slices(&r);
        assert_eq!((sl.preperiod, sl.period), (2, 1));
    }

    #[test]
    fn finite_input_has_no_omega() {
        let c = CyclicDerivation::from_parts(
            vec![
                (fml("[0]p"), CyclicRule::Nec(NodeId(1))),
                (fml("p"), CyclicRule::Assumption),
            ],
            0,
        );
        let r = unravel(&c).unwrap();
        let s: FormulaSet = [fml("p")].into_iter().collect();
        let w = inf_to_omega(&r, &s, &FormulaSet::new()).unwrap();
        assert!(!w.has_omega());
        assert_eq!(w.size(), 2);
    }
}
