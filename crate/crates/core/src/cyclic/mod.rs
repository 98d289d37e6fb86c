//! Cyclic derivations: finite trees whose leaves may be back-linked to an
//! ancestor carrying the same formula, provided the path between them
//! passes through `nec`.

mod translate;

pub use translate::{cyclic_to_hilbert, theorem_witness, HilbertTranslation};

use std::collections::BTreeSet;

use crate::error::CheckError;
use crate::formula::{Formula, FormulaSet};
use crate::hilbert::is_axiom;
use crate::proof::{ClassificationMode, Derivation, Judgment, Leaf, LeafClassification, NodeId, ProofKind, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CyclicRule {
    Axiom,
    Assumption,
    /// `[minor, major]`
    Mp(NodeId, NodeId),
    Nec(NodeId),
    /// A leaf connected to the given ancestor.
    Backlink(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicNode {
    pub formula: Formula,
    pub rule: CyclicRule,
}

/// An arena-backed tree plus back-links. Construction does not validate;
/// run [`check_cyclic`] before relying on the shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicDerivation {
    nodes: Vec<CyclicNode>,
    root: NodeId,
}

impl CyclicRule {
    pub fn children(&self) -> Vec<NodeId> {
        match *self {
            CyclicRule::Mp(a, b) => vec![a, b],
            CyclicRule::Nec(a) => vec![a],
            _ => Vec::new(),
        }
    }
}

impl CyclicDerivation {
    pub fn new(nodes: Vec<CyclicNode>, root: NodeId) -> Self {
        CyclicDerivation { nodes, root }
    }

    /// Convenience constructor from `(formula, rule)` pairs.
    pub fn from_parts(parts: Vec<(Formula, CyclicRule)>, root: usize) -> Self {
        let nodes = parts
            .into_iter()
            .map(|(formula, rule)| CyclicNode { formula, rule })
            .collect();
        CyclicDerivation::new(nodes, NodeId(root))
    }

    /// The back-link-free tree with the same shape as `d`, numbered in preorder.
    pub fn from_derivation(d: &Derivation) -> Self {
        fn go(d: &Derivation, nodes: &mut Vec<CyclicNode>) -> NodeId {
            let id = NodeId(nodes.len());
            nodes.push(CyclicNode {
                formula: d.formula().clone(),
                rule: CyclicRule::Assumption,
            });
            let rule = match d.rule() {
                Rule::Axiom => CyclicRule::Axiom,
                Rule::Assumption => CyclicRule::Assumption,
                Rule::Mp(a, b) => {
                    let a = go(a, nodes);
                    let b = go(b, nodes);
                    CyclicRule::Mp(a, b)
                }
                Rule::Nec(a) => CyclicRule::Nec(go(a, nodes)),
                Rule::Omega(_) => panic!("omega node in a finite derivation"),
            };
            nodes[id.0].rule = rule;
            id
        }
        let mut nodes = Vec::new();
        let root = go(d, &mut nodes);
        CyclicDerivation { nodes, root }
    }

    /// The tree as a plain derivation, if it has no back-links.
    pub fn to_derivation(&self) -> Option<Derivation> {
        fn go(c: &CyclicDerivation, id: NodeId) -> Option<Derivation> {
            let n = c.node(id);
            let rule = match n.rule {
                CyclicRule::Axiom => Rule::Axiom,
                CyclicRule::Assumption => Rule::Assumption,
                CyclicRule::Mp(a, b) => Rule::Mp(go(c, a)?, go(c, b)?),
                CyclicRule::Nec(a) => Rule::Nec(go(c, a)?),
                CyclicRule::Backlink(_) => return None,
            };
            Some(Derivation::new(n.formula.clone(), rule))
        }
        go(self, self.root)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[CyclicNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &CyclicNode {
        &self.nodes[id.0]
    }

    pub fn formula(&self, id: NodeId) -> &Formula {
        &self.nodes[id.0].formula
    }

    pub fn conclusion(&self) -> &Formula {
        self.formula(self.root)
    }

    pub fn children(&self, id: NodeId) -> Vec<NodeId> {
        self.nodes[id.0].rule.children()
    }

    /// `(leaf, target)` for every back-link, by leaf id.
    pub fn backlinks(&self) -> Vec<(NodeId, NodeId)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| match n.rule {
                CyclicRule::Backlink(t) => Some((NodeId(i), t)),
                _ => None,
            })
            .collect()
    }

    /// Parent of every node; `None` for the root. Assumes a valid tree shape.
    pub fn parents(&self) -> Vec<Option<NodeId>> {
        let mut parent = vec![None; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for c in n.rule.children() {
                parent[c.0] = Some(NodeId(i));
            }
        }
        parent
    }

    /// Nodes from the root down to `id`, inclusive.
    pub fn path_to(&self, id: NodeId) -> Vec<NodeId> {
        let parent = self.parents();
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = parent[cur.0] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Renumbers nodes in preorder, dropping unreachable ones.
    pub fn canonical(&self) -> CyclicDerivation {
        let mut order = Vec::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            order.push(id);
            for c in self.children(id).into_iter().rev() {
                stack.push(c);
            }
        }
        let mut new_id = vec![usize::MAX; self.nodes.len()];
        for (k, id) in order.iter().enumerate() {
            new_id[id.0] = k;
        }
        let m = |id: NodeId| NodeId(new_id[id.0]);
        let nodes = order
            .iter()
            .map(|&id| {
                let n = self.node(id);
                let rule = match n.rule {
                    CyclicRule::Axiom => CyclicRule::Axiom,
                    CyclicRule::Assumption => CyclicRule::Assumption,
                    CyclicRule::Mp(a, b) => CyclicRule::Mp(m(a), m(b)),
                    CyclicRule::Nec(a) => CyclicRule::Nec(m(a)),
                    CyclicRule::Backlink(t) => CyclicRule::Backlink(m(t)),
                };
                CyclicNode {
                    formula: n.formula.clone(),
                    rule,
                }
            })
            .collect();
        CyclicDerivation {
            nodes,
            root: NodeId(0),
        }
    }

    /// The cyclic proof of `phi` from the assumption `[0]phi -> phi`:
    /// `phi` by `mp` from `[0]phi` (by `nec` from a leaf linked back to the
    /// root) and the assumption.
    pub fn lob_example(phi: Formula) -> CyclicDerivation {
        let bphi = Formula::boxed(0, phi.clone());
        CyclicDerivation::from_parts(
            vec![
                (phi.clone(), CyclicRule::Mp(NodeId(1), NodeId(3))),
                (bphi.clone(), CyclicRule::Nec(NodeId(2))),
                (phi.clone(), CyclicRule::Backlink(NodeId(0))),
                (Formula::imp(bphi, phi), CyclicRule::Assumption),
            ],
            0,
        )
    }
}

fn tree_shape(c: &CyclicDerivation) -> Result<(), CheckError> {
    let n = c.nodes.len();
    if c.root.0 >= n {
        return Err(CheckError::TreeShape {
            node: c.root,
            reason: "root id out of range".into(),
        });
    }
    let mut parents = vec![0usize; n];
    for (i, node) in c.nodes.iter().enumerate() {
        let mut refs = node.rule.children();
        if let CyclicRule::Backlink(t) = node.rule {
            refs.push(t);
        }
        for r in refs {
            if r.0 >= n {
                return Err(CheckError::TreeShape {
                    node: NodeId(i),
                    reason: format!("reference to missing node {r}"),
                });
            }
        }
        for ch in node.rule.children() {
            parents[ch.0] += 1;
        }
    }
    for (i, &p) in parents.iter().enumerate() {
        let id = NodeId(i);
        if id == c.root && p != 0 {
            return Err(CheckError::TreeShape {
                node: id,
                reason: "root has a parent".into(),
            });
        }
        if id != c.root && p != 1 {
            return Err(CheckError::TreeShape {
                node: id,
                reason: format!("node has {p} parents"),
            });
        }
    }
    // With one parent per non-root node, every node is reachable from the
    // root unless some component is a cycle of child edges.
    let mut seen = vec![false; n];
    let mut stack = vec![c.root];
    while let Some(id) = stack.pop() {
        seen[id.0] = true;
        stack.extend(c.children(id));
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(CheckError::TreeShape {
            node: NodeId(i),
            reason: "node is not reachable from the root".into(),
        });
    }
    Ok(())
}

fn check_backlinks(c: &CyclicDerivation) -> Result<(), CheckError> {
    for (leaf, target) in c.backlinks() {
        let path = c.path_to(leaf);
        let Some(pos) = path[..path.len() - 1].iter().position(|&p| p == target) else {
            return Err(CheckError::BacklinkNotAncestor { leaf, target });
        };
        let crosses_nec = path[pos..path.len() - 1]
            .iter()
            .any(|&p| matches!(c.node(p).rule, CyclicRule::Nec(_)));
        if !crosses_nec {
            return Err(CheckError::BacklinkWithoutNec { leaf, target });
        }
        if c.formula(leaf) != c.formula(target) {
            return Err(CheckError::BacklinkFormulaMismatch {
                leaf,
                target,
                leaf_formula: c.formula(leaf).clone(),
                target_formula: c.formula(target).clone(),
            });
        }
    }
    Ok(())
}

fn check_steps(c: &CyclicDerivation) -> Result<(), CheckError> {
    for (i, n) in c.nodes.iter().enumerate() {
        let node = NodeId(i);
        match n.rule {
            CyclicRule::Axiom => {
                if is_axiom(&n.formula).is_none() {
                    return Err(CheckError::NotAnAxiom {
                        node,
                        formula: n.formula.clone(),
                    });
                }
            }
            CyclicRule::Mp(minor, major) => {
                let expected = Formula::imp(c.formula(minor).clone(), n.formula.clone());
                if c.formula(major) != &expected {
                    return Err(CheckError::MalformedInference {
                        node,
                        rule: "mp",
                        expected,
                        actual: c.formula(major).clone(),
                    });
                }
            }
            CyclicRule::Nec(p) => {
                let expected = Formula::boxed(0, c.formula(p).clone());
                if n.formula != expected {
                    return Err(CheckError::MalformedInference {
                        node,
                        rule: "nec",
                        expected,
                        actual: n.formula.clone(),
                    });
                }
            }
            CyclicRule::Assumption | CyclicRule::Backlink(_) => {}
        }
    }
    Ok(())
}

/// Validates tree shape, the back-link side conditions (target is a strict
/// ancestor, the path crosses `nec`, formulas agree) and every inference.
pub fn check_cyclic(c: &CyclicDerivation) -> Result<(), CheckError> {
    tree_shape(c)?;
    check_backlinks(c)?;
    check_steps(c)
}

/// Assumption leaves of the subtree at `root`, treating the back-links in
/// `erased` as plain assumption leaves. A leaf is boxed if its path from
/// `root` crosses `nec` or meets the target of a live back-link; it is local
/// if the path does not cross `nec`.
pub(crate) fn classify_view(
    c: &CyclicDerivation,
    root: NodeId,
    erased: &BTreeSet<NodeId>,
    mode: ClassificationMode,
) -> LeafClassification {
    let mut targets = BTreeSet::new();
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if let CyclicRule::Backlink(t) = c.node(id).rule {
            if !erased.contains(&id) {
                targets.insert(t);
            }
        }
        stack.extend(c.children(id));
    }
    let mut local = Vec::new();
    let mut boxed = Vec::new();
    let mut stack = vec![(root, false, false)];
    while let Some((id, nec, target)) = stack.pop() {
        let n = c.node(id);
        let target = target || targets.contains(&id);
        let is_assumption = match n.rule {
            CyclicRule::Assumption => true,
            CyclicRule::Backlink(_) => erased.contains(&id),
            _ => false,
        };
        if is_assumption {
            let leaf = Leaf {
                node: id,
                formula: n.formula.clone(),
            };
            if !nec {
                local.push(leaf.clone());
            }
            if nec || target {
                boxed.push(leaf);
            }
        }
        let child_nec = nec || matches!(n.rule, CyclicRule::Nec(_));
        for ch in n.rule.children() {
            stack.push((ch, child_nec, target));
        }
    }
    local.sort();
    boxed.sort();
    LeafClassification { mode, local, boxed }
}

/// Boxed and local assumption leaves of a valid cyclic derivation. A leaf
/// may be both: one that is reached without `nec` but below a back-link
/// target is needed at the root world and again at every later pass
/// around the cycle.
pub fn classify_cyclic(c: &CyclicDerivation) -> Result<LeafClassification, CheckError> {
    check_cyclic(c)?;
    Ok(classify_view(c, c.root, &BTreeSet::new(), ClassificationMode::Cyclic))
}

/// Checks `sigma; gamma |-cycl phi`.
pub fn judge_cyclic(c: &CyclicDerivation, sigma: &FormulaSet, gamma: &FormulaSet) -> Result<Judgment, CheckError> {
    let leaves = classify_cyclic(c)?;
    leaves.check_cover(sigma, gamma)?;
    Ok(Judgment {
        kind: ProofKind::Cyclic,
        sigma: sigma.clone(),
        gamma: gamma.clone(),
        conclusion: c.conclusion().clone(),
        leaves,
    })
}
