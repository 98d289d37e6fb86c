//! Regular non-well-founded derivations, presented either as cyclic
//! derivations or as finite rooted graphs, and omega-derivations whose
//! omega-rule premises form an eventually periodic list.

mod translate;

pub use translate::{inf_to_omega, omega_to_inf};

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::cyclic::{check_cyclic, classify_view, CyclicDerivation, CyclicNode, CyclicRule};
use crate::error::CheckError;
use crate::formula::{Formula, FormulaSet};
use crate::hilbert::is_axiom;
use crate::proof::{ClassificationMode, Derivation, Judgment, LeafClassification, NodeId, ProofKind, TreeChecker};

/// A cyclic derivation read as the finite presentation of its unravelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularInfDerivation {
    presentation: CyclicDerivation,
}

impl RegularInfDerivation {
    pub fn presentation(&self) -> &CyclicDerivation {
        &self.presentation
    }

    pub fn into_presentation(self) -> CyclicDerivation {
        self.presentation
    }

    pub fn conclusion(&self) -> &Formula {
        self.presentation.conclusion()
    }

    pub fn graph(&self) -> ProofGraph {
        ProofGraph::from_cyclic(&self.presentation)
    }
}

/// Accepts a cyclic derivation as a regular infinite one. Back-link side
/// conditions already force every cycle of the presentation through `nec`.
pub fn unravel(c: &CyclicDerivation) -> Result<RegularInfDerivation, CheckError> {
    check_cyclic(c)?;
    let r = RegularInfDerivation {
        presentation: c.clone(),
    };
    validate_graph(&r.graph())?;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphRule {
    Axiom,
    Assumption,
    Mp(usize, usize),
    Nec(usize),
}

impl GraphRule {
    pub fn children(&self) -> Vec<usize> {
        match *self {
            GraphRule::Mp(a, b) => vec![a, b],
            GraphRule::Nec(a) => vec![a],
            _ => Vec::new(),
        }
    }

    fn tag(&self) -> u8 {
        match self {
            GraphRule::Axiom => 0,
            GraphRule::Assumption => 1,
            GraphRule::Mp(..) => 2,
            GraphRule::Nec(_) => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphNode {
    pub formula: Formula,
    pub rule: GraphRule,
}

/// A finite rooted graph whose unfolding from the root is an infinite (or
/// finite) derivation. Subtrees may be shared and edges may close cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofGraph {
    pub nodes: Vec<GraphNode>,
    pub root: usize,
}

impl ProofGraph {
    /// Redirects every back-linked leaf to its target. Remaining nodes keep
    /// their relative order.
    pub fn from_cyclic(c: &CyclicDerivation) -> ProofGraph {
        let mut index = vec![usize::MAX; c.len()];
        let mut k = 0;
        for (i, n) in c.nodes().iter().enumerate() {
            if !matches!(n.rule, CyclicRule::Backlink(_)) {
                index[i] = k;
                k += 1;
            }
        }
        let resolve = |id: NodeId| match c.node(id).rule {
            CyclicRule::Backlink(t) => index[t.0],
            _ => index[id.0],
        };
        let nodes = c
            .nodes()
            .iter()
            .filter(|n| !matches!(n.rule, CyclicRule::Backlink(_)))
            .map(|n| GraphNode {
                formula: n.formula.clone(),
                rule: match n.rule {
                    CyclicRule::Axiom => GraphRule::Axiom,
                    CyclicRule::Assumption => GraphRule::Assumption,
                    CyclicRule::Mp(a, b) => GraphRule::Mp(resolve(a), resolve(b)),
                    CyclicRule::Nec(a) => GraphRule::Nec(resolve(a)),
                    CyclicRule::Backlink(_) => unreachable!(),
                },
            })
            .collect();
        ProofGraph {
            nodes,
            root: resolve(c.root()),
        }
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        self.nodes[v].rule.children()
    }

    /// Nodes in breadth-first order from the root.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.root]);
        seen[self.root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for c in self.children(v) {
                if !seen[c] {
                    seen[c] = true;
                    queue.push_back(c);
                }
            }
        }
        order
    }
}

/// Checks that `g` presents an infinite derivation: every node is reachable,
/// every step is locally correct, and every cycle passes through `nec`.
pub fn validate_graph(g: &ProofGraph) -> Result<(), CheckError> {
    let n = g.nodes.len();
    if g.root >= n {
        return Err(CheckError::TreeShape {
            node: NodeId(g.root),
            reason: "root id out of range".into(),
        });
    }
    for (v, node) in g.nodes.iter().enumerate() {
        let id = NodeId(v);
        for c in node.rule.children() {
            if c >= n {
                return Err(CheckError::TreeShape {
                    node: id,
                    reason: format!("reference to missing node #{c}"),
                });
            }
        }
        match node.rule {
            GraphRule::Axiom => {
                if is_axiom(&node.formula).is_none() {
                    return Err(CheckError::NotAnAxiom {
                        node: id,
                        formula: node.formula.clone(),
                    });
                }
            }
            GraphRule::Assumption => {}
            GraphRule::Mp(a, b) => {
                let expected = Formula::imp(g.nodes[a].formula.clone(), node.formula.clone());
                if g.nodes[b].formula != expected {
                    return Err(CheckError::MalformedInference {
                        node: id,
                        rule: "mp",
                        expected,
                        actual: g.nodes[b].formula.clone(),
                    });
                }
            }
            GraphRule::Nec(a) => {
                let expected = Formula::boxed(0, g.nodes[a].formula.clone());
                if node.formula != expected {
                    return Err(CheckError::MalformedInference {
                        node: id,
                        rule: "nec",
                        expected,
                        actual: node.formula.clone(),
                    });
                }
            }
        }
    }
    let reached = g.bfs_order();
    if reached.len() != n {
        let mut seen = vec![false; n];
        for v in reached {
            seen[v] = true;
        }
        let v = seen.iter().position(|s| !s).unwrap_or(0);
        return Err(CheckError::TreeShape {
            node: NodeId(v),
            reason: "graph is disconnected: node is not reachable from the root".into(),
        });
    }
    // Cycles over mp edges only.
    let mut state = vec![0u8; n];
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state[start] = 1;
        while let Some(&mut (v, ref mut k)) = stack.last_mut() {
            let kids = match g.nodes[v].rule {
                GraphRule::Mp(a, b) => vec![a, b],
                _ => Vec::new(),
            };
            if *k < kids.len() {
                let c = kids[*k];
                *k += 1;
                match state[c] {
                    0 => {
                        state[c] = 1;
                        stack.push((c, 0));
                    }
                    1 => return Err(CheckError::NecFreeCycle { node: NodeId(c) }),
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    Ok(())
}

/// Coarsest partition of the nodes of `g` such that related nodes carry the
/// same formula and rule and have related children position by position.
/// Class ids are dense and assigned in order of first appearance.
fn bisimulation_classes(g: &ProofGraph) -> Vec<usize> {
    let n = g.nodes.len();
    let mut class = vec![0usize; n];
    let mut initial: HashMap<(&Formula, u8), usize> = HashMap::new();
    for (v, node) in g.nodes.iter().enumerate() {
        let next = initial.len();
        class[v] = *initial.entry((&node.formula, node.rule.tag())).or_insert(next);
    }
    let mut count = initial.len();
    loop {
        let mut sigs: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut refined = vec![0usize; n];
        for v in 0..n {
            let sig = (class[v], g.children(v).into_iter().map(|c| class[c]).collect());
            let next = sigs.len();
            refined[v] = *sigs.entry(sig).or_insert(next);
        }
        let new_count = sigs.len();
        class = refined;
        if new_count == count {
            return class;
        }
        count = new_count;
    }
}

/// Do the unfoldings of the two graphs from their roots coincide?
pub fn bisimilar(g1: &ProofGraph, g2: &ProofGraph) -> bool {
    let offset = g1.nodes.len();
    let mut nodes = g1.nodes.clone();
    nodes.extend(g2.nodes.iter().map(|n| GraphNode {
        formula: n.formula.clone(),
        rule: match n.rule {
            GraphRule::Mp(a, b) => GraphRule::Mp(a + offset, b + offset),
            GraphRule::Nec(a) => GraphRule::Nec(a + offset),
            r => r,
        },
    }));
    let union = ProofGraph { nodes, root: g1.root };
    let class = bisimulation_classes(&union);
    class[g1.root] == class[g2.root + offset]
}

/// Folds a graph presentation into a cyclic derivation: unfold from the root
/// and, whenever a node is bisimilar to one already on the current path,
/// replace it by a back-link to that ancestor.
pub fn ravel(g: &ProofGraph) -> Result<CyclicDerivation, CheckError> {
    validate_graph(g)?;
    let class = bisimulation_classes(g);
    let mut nodes: Vec<CyclicNode> = Vec::new();
    let mut on_path: HashMap<usize, NodeId> = HashMap::new();

    fn go(
        g: &ProofGraph,
        class: &[usize],
        v: usize,
        nodes: &mut Vec<CyclicNode>,
        on_path: &mut HashMap<usize, NodeId>,
    ) -> NodeId {
        let id = NodeId(nodes.len());
        let formula = g.nodes[v].formula.clone();
        if let Some(&anc) = on_path.get(&class[v]) {
            nodes.push(CyclicNode {
                formula,
                rule: CyclicRule::Backlink(anc),
            });
            return id;
        }
        nodes.push(CyclicNode {
            formula,
            rule: CyclicRule::Assumption,
        });
        on_path.insert(class[v], id);
        let rule = match g.nodes[v].rule {
            GraphRule::Axiom => CyclicRule::Axiom,
            GraphRule::Assumption => CyclicRule::Assumption,
            GraphRule::Mp(a, b) => {
                let a = go(g, class, a, nodes, on_path);
                let b = go(g, class, b, nodes, on_path);
                CyclicRule::Mp(a, b)
            }
            GraphRule::Nec(a) => CyclicRule::Nec(go(g, class, a, nodes, on_path)),
        };
        on_path.remove(&class[v]);
        nodes[id.0].rule = rule;
        id
    }

    go(g, &class, g.root, &mut nodes, &mut on_path);
    let c = CyclicDerivation::new(nodes, NodeId(0));
    check_cyclic(&c)?;
    Ok(c)
}

/// Leaf classification of the unravelling, read off the presentation. An
/// occurrence of a presentation leaf in the unravelling is non-boxed only
/// along the nec-free tree path; any back-link target on the path means
/// later occurrences sit above a `nec`.
pub fn classify_inf(r: &RegularInfDerivation) -> LeafClassification {
    let c = &r.presentation;
    classify_view(c, c.root(), &BTreeSet::new(), ClassificationMode::Inf)
}

/// Checks `sigma; gamma ||-inf phi`.
pub fn judge_inf(r: &RegularInfDerivation, sigma: &FormulaSet, gamma: &FormulaSet) -> Result<Judgment, CheckError> {
    let leaves = classify_inf(r);
    leaves.check_cover(sigma, gamma)?;
    Ok(Judgment {
        kind: ProofKind::Inf,
        sigma: sigma.clone(),
        gamma: gamma.clone(),
        conclusion: r.conclusion().clone(),
        leaves,
    })
}

/// Nodes grouped by the number of `nec` steps above them, for a graph
/// presentation. Slice `n` is `slice_sets[n]` for `n < preperiod + period`
/// and repeats with the given period afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceSequence {
    pub preperiod: usize,
    pub period: usize,
    pub slice_formulas: Vec<Formula>,
    pub slice_sets: Vec<BTreeSet<usize>>,
}

impl SliceSequence {
    pub fn index(&self, n: usize) -> usize {
        if n < self.slice_sets.len() {
            n
        } else {
            self.preperiod + (n - self.preperiod) % self.period
        }
    }

    /// `xi_n`
    pub fn xi(&self, n: usize) -> &Formula {
        &self.slice_formulas[self.index(n)]
    }

    pub fn set(&self, n: usize) -> &BTreeSet<usize> {
        &self.slice_sets[self.index(n)]
    }
}

fn nec_free_closure(g: &ProofGraph, seeds: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<usize> = seeds.into_iter().collect();
    while let Some(v) = stack.pop() {
        if out.insert(v) {
            if let GraphRule::Mp(a, b) = g.nodes[v].rule {
                stack.push(a);
                stack.push(b);
            }
        }
    }
    out
}

/// Slices of the unfolding of `g` from node `start`. Formulas in `xi_n` are
/// ordered by breadth-first rank in `g` and listed once each.
pub fn graph_slices(g: &ProofGraph, start: usize) -> SliceSequence {
    let rank: HashMap<usize, usize> = {
        let sub = ProofGraph {
            nodes: g.nodes.clone(),
            root: start,
        };
        sub.bfs_order().into_iter().enumerate().map(|(i, v)| (v, i)).collect()
    };
    let mut sets: Vec<BTreeSet<usize>> = Vec::new();
    let mut first_seen: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut cur = nec_free_closure(g, [start]);
    let (preperiod, period) = loop {
        if let Some(&k) = first_seen.get(&cur) {
            break (k, sets.len() - k);
        }
        first_seen.insert(cur.clone(), sets.len());
        let next = nec_free_closure(
            g,
            cur.iter().filter_map(|&v| match g.nodes[v].rule {
                GraphRule::Nec(a) => Some(a),
                _ => None,
            }),
        );
        sets.push(std::mem::replace(&mut cur, next));
    };
    let slice_formulas = sets
        .iter()
        .map(|s| {
            let mut members: Vec<usize> = s.iter().copied().collect();
            members.sort_by_key(|v| rank[v]);
            let mut seen = FormulaSet::new();
            let fs: Vec<Formula> = members
                .into_iter()
                .map(|v| g.nodes[v].formula.clone())
                .filter(|f| seen.insert(f.clone()))
                .collect();
            Formula::conj(fs)
        })
        .collect();
    SliceSequence {
        preperiod,
        period,
        slice_formulas,
        slice_sets: sets,
    }
}

/// Slices of a regular infinite derivation, over the nodes of its graph
/// presentation.
pub fn slices(r: &RegularInfDerivation) -> SliceSequence {
    let g = r.graph();
    graph_slices(&g, g.root)
}

/// Checks `sigma; gamma ||-omega phi`. Premise 0 of an omega node inherits
/// the node's context; every later premise is boxed. A cycle premise that
/// also serves as premise 0 therefore counts in both contexts.
pub fn check_omega(w: &Derivation, sigma: &FormulaSet, gamma: &FormulaSet) -> Result<Judgment, CheckError> {
    let leaves = TreeChecker::new(true).run(w, ClassificationMode::Omega)?;
    leaves.check_cover(sigma, gamma)?;
    Ok(Judgment {
        kind: ProofKind::Omega,
        sigma: sigma.clone(),
        gamma: gamma.clone(),
        conclusion: w.formula().clone(),
        leaves,
    })
}

/// Local height of a regular infinite derivation: the longest branch of the
/// finite tree left after cutting every branch at its first `nec` premise.
pub fn local_height_inf(r: &RegularInfDerivation) -> usize {
    fn go(c: &CyclicDerivation, id: NodeId) -> usize {
        match c.node(id).rule {
            CyclicRule::Mp(a, b) => 1 + go(c, a).max(go(c, b)),
            _ => 0,
        }
    }
    go(&r.presentation, r.presentation.root())
}

/// Local height of an omega-derivation: branches are also cut at every
/// boxed omega premise.
pub fn local_height_omega(w: &Derivation) -> usize {
    w.local_height()
}
