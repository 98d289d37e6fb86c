//! JSON file formats for proofs, proof graphs, algebras and models, each
//! with a canonical writer: writing what was read back from a canonical
//! file reproduces it byte for byte.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Elem, FiniteGLPAlgebra, Valuation};
use crate::cyclic::{CyclicDerivation, CyclicRule};
use crate::formula::{parse, Formula, FormulaSet, ParseError};
use crate::infinitary::{GraphNode, GraphRule, ProofGraph};
use crate::neighbourhood::{FiniteGLPSpace, FiniteTopology, Model, NeighbourhoodError};
use crate::proof::{Derivation, NodeId, OmegaLasso, Rule};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("node {id}: {err}")]
    Formula { id: usize, err: ParseError },
    #[error("{list}: {err}")]
    FormulaList { list: &'static str, err: ParseError },
    #[error("node id {0} appears twice")]
    DuplicateId(usize),
    #[error("reference to unknown node {0}")]
    UnknownId(usize),
    #[error("node {id}: rule {rule} expects {expected} children, found {found}")]
    Arity {
        id: usize,
        rule: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("node {id}: {reason}")]
    BadNode { id: usize, reason: String },
    #[error("node references form a cycle through node {0}")]
    Cycle(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Space(#[from] NeighbourhoodError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleTag {
    Ax,
    Asm,
    Mp,
    Nec,
    Backlink,
    Omega,
}

impl RuleTag {
    fn name(self) -> &'static str {
        match self {
            RuleTag::Ax => "ax",
            RuleTag::Asm => "asm",
            RuleTag::Mp => "mp",
            RuleTag::Nec => "nec",
            RuleTag::Backlink => "backlink",
            RuleTag::Omega => "omega",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaEntry {
    pub phi_prefix: Vec<String>,
    pub phi_cycle: Vec<String>,
    pub prem_prefix: Vec<usize>,
    pub prem_cycle: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub id: usize,
    pub formula: String,
    pub rule: RuleTag,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backlink: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaEntry>,
}

/// Node table shared by Hilbert, cyclic, omega and graph proofs. Hilbert
/// and omega tables may share nodes; cyclic tables are trees whose leaves
/// may carry `backlink`; graph tables may contain cycles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofFile {
    pub nodes: Vec<NodeEntry>,
    pub root: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<String>>,
}

/// What a proof file contains, decided by its rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofFileKind {
    Hilbert,
    Cyclic,
    Omega,
}

fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn parse_list(list: &'static str, items: &Option<Vec<String>>) -> Result<FormulaSet, FormatError> {
    let mut out = FormulaSet::new();
    for s in items.iter().flatten() {
        out.insert(parse(s).map_err(|err| FormatError::FormulaList { list, err })?);
    }
    Ok(out)
}

fn render_list(s: &FormulaSet) -> Option<Vec<String>> {
    if s.is_empty() {
        None
    } else {
        Some(s.iter().map(Formula::render).collect())
    }
}

impl ProofFile {
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        to_pretty(self)
    }

    pub fn sigma(&self) -> Result<FormulaSet, FormatError> {
        parse_list("sigma", &self.sigma)
    }

    pub fn gamma(&self) -> Result<FormulaSet, FormatError> {
        parse_list("gamma", &self.gamma)
    }

    pub fn with_context(mut self, sigma: &FormulaSet, gamma: &FormulaSet) -> Self {
        self.sigma = render_list(sigma);
        self.gamma = render_list(gamma);
        self
    }

    pub fn kind(&self) -> ProofFileKind {
        if self.nodes.iter().any(|n| n.rule == RuleTag::Backlink) {
            ProofFileKind::Cyclic
        } else if self.nodes.iter().any(|n| n.rule == RuleTag::Omega) {
            ProofFileKind::Omega
        } else {
            ProofFileKind::Hilbert
        }
    }

    fn index(&self) -> Result<HashMap<usize, usize>, FormatError> {
        let mut index = HashMap::new();
        for (pos, n) in self.nodes.iter().enumerate() {
            if index.insert(n.id, pos).is_some() {
                return Err(FormatError::DuplicateId(n.id));
            }
        }
        if !index.contains_key(&self.root) {
            return Err(FormatError::UnknownId(self.root));
        }
        for n in &self.nodes {
            let omega_ids = n.omega.iter().flat_map(|o| o.prem_prefix.iter().chain(&o.prem_cycle));
            for &c in n.children.iter().chain(n.backlink.iter()).chain(omega_ids) {
                if !index.contains_key(&c) {
                    return Err(FormatError::UnknownId(c));
                }
            }
        }
        Ok(index)
    }

    fn formulas(&self) -> Result<Vec<Formula>, FormatError> {
        self.nodes
            .iter()
            .map(|n| parse(&n.formula).map_err(|err| FormatError::Formula { id: n.id, err }))
            .collect()
    }

    fn arity(n: &NodeEntry) -> Result<(), FormatError> {
        let expected = match n.rule {
            RuleTag::Ax | RuleTag::Asm | RuleTag::Backlink => 0,
            RuleTag::Mp => 2,
            RuleTag::Nec => 1,
            RuleTag::Omega => {
                let o = n.omega.as_ref().ok_or_else(|| FormatError::BadNode {
                    id: n.id,
                    reason: "omega node without an omega record".into(),
                })?;
                let prems: Vec<usize> = o.prem_prefix.iter().chain(&o.prem_cycle).copied().collect();
                if n.children != prems {
                    return Err(FormatError::BadNode {
                        id: n.id,
                        reason: "children differ from prem_prefix followed by prem_cycle".into(),
                    });
                }
                prems.len()
            }
        };
        if n.children.len() != expected {
            return Err(FormatError::Arity {
                id: n.id,
                rule: n.rule.name(),
                expected,
                found: n.children.len(),
            });
        }
        if (n.rule == RuleTag::Backlink) != n.backlink.is_some() {
            return Err(FormatError::BadNode {
                id: n.id,
                reason: "backlink field must appear exactly on backlink nodes".into(),
            });
        }
        if n.rule != RuleTag::Omega && n.omega.is_some() {
            return Err(FormatError::BadNode {
                id: n.id,
                reason: "omega record on a non-omega node".into(),
            });
        }
        Ok(())
    }

    /// A well-founded derivation (Hilbert or omega). Shared ids become
    /// shared subtrees.
    pub fn to_derivation(&self) -> Result<Derivation, FormatError> {
        let index = self.index()?;
        let formulas = self.formulas()?;
        for n in &self.nodes {
            Self::arity(n)?;
            if n.rule == RuleTag::Backlink {
                return Err(FormatError::BadNode {
                    id: n.id,
                    reason: "backlink in a well-founded proof".into(),
                });
            }
        }
        let mut built: Vec<Option<Derivation>> = vec![None; self.nodes.len()];
        let mut on_stack = vec![false; self.nodes.len()];
        let root = index[&self.root];
        self.build(root, &index, &formulas, &mut built, &mut on_stack)
    }

    fn build(
        &self,
        pos: usize,
        index: &HashMap<usize, usize>,
        formulas: &[Formula],
        built: &mut Vec<Option<Derivation>>,
        on_stack: &mut Vec<bool>,
    ) -> Result<Derivation, FormatError> {
        if let Some(d) = &built[pos] {
            return Ok(d.clone());
        }
        let n = &self.nodes[pos];
        if on_stack[pos] {
            return Err(FormatError::Cycle(n.id));
        }
        on_stack[pos] = true;
        let mut kids = Vec::new();
        for c in &n.children {
            kids.push(self.build(index[c], index, formulas, built, on_stack)?);
        }
        on_stack[pos] = false;
        let rule = match n.rule {
            RuleTag::Ax => Rule::Axiom,
            RuleTag::Asm => Rule::Assumption,
            RuleTag::Mp => Rule::Mp(kids[0].clone(), kids[1].clone()),
            RuleTag::Nec => Rule::Nec(kids[0].clone()),
            RuleTag::Omega => {
                let o = n.omega.as_ref().expect("checked by arity");
                let phis = |list: &[String]| {
                    list.iter()
                        .map(|s| parse(s).map_err(|err| FormatError::Formula { id: n.id, err }))
                        .collect::<Result<Vec<_>, _>>()
                };
                let k = o.prem_prefix.len();
                Rule::Omega(OmegaLasso {
                    phi_prefix: phis(&o.phi_prefix)?,
                    phi_cycle: phis(&o.phi_cycle)?,
                    prem_prefix: kids[..k].to_vec(),
                    prem_cycle: kids[k..].to_vec(),
                })
            }
            RuleTag::Backlink => unreachable!("rejected before building"),
        };
        let d = Derivation::new(formulas[pos].clone(), rule);
        built[pos] = Some(d.clone());
        Ok(d)
    }

    /// Canonical table of a derivation: ids in preorder of first visit,
    /// one entry per shared node.
    pub fn from_derivation(d: &Derivation) -> Self {
        let mut ids: HashMap<*const crate::proof::Step, usize> = HashMap::new();
        let mut nodes: Vec<NodeEntry> = Vec::new();
        fn go(d: &Derivation, ids: &mut HashMap<*const crate::proof::Step, usize>, nodes: &mut Vec<NodeEntry>) -> usize {
            if let Some(&id) = ids.get(&d.ptr()) {
                return id;
            }
            let id = nodes.len();
            ids.insert(d.ptr(), id);
            nodes.push(NodeEntry {
                id,
                formula: d.formula().render(),
                rule: RuleTag::Ax,
                children: Vec::new(),
                backlink: None,
                omega: None,
            });
            let (rule, children, omega) = match d.rule() {
                Rule::Axiom => (RuleTag::Ax, Vec::new(), None),
                Rule::Assumption => (RuleTag::Asm, Vec::new(), None),
                Rule::Mp(a, b) => {
                    let a = go(a, ids, nodes);
                    let b = go(b, ids, nodes);
                    (RuleTag::Mp, vec![a, b], None)
                }
                Rule::Nec(a) => (RuleTag::Nec, vec![go(a, ids, nodes)], None),
                Rule::Omega(l) => {
                    let prem_prefix: Vec<usize> = l.prem_prefix.iter().map(|p| go(p, ids, nodes)).collect();
                    let prem_cycle: Vec<usize> = l.prem_cycle.iter().map(|p| go(p, ids, nodes)).collect();
                    let children = prem_prefix.iter().chain(&prem_cycle).copied().collect();
                    let entry = OmegaEntry {
                        phi_prefix: l.phi_prefix.iter().map(Formula::render).collect(),
                        phi_cycle: l.phi_cycle.iter().map(Formula::render).collect(),
                        prem_prefix,
                        prem_cycle,
                    };
                    (RuleTag::Omega, children, Some(entry))
                }
            };
            let n = &mut nodes[id];
            n.rule = rule;
            n.children = children;
            n.omega = omega;
            id
        }
        let root = go(d, &mut ids, &mut nodes);
        ProofFile {
            nodes,
            root,
            sigma: None,
            gamma: None,
        }
    }

    /// A cyclic derivation; ids are mapped to table positions. Shape is not
    /// validated here, see `check_cyclic`.
    pub fn to_cyclic(&self) -> Result<CyclicDerivation, FormatError> {
        let index = self.index()?;
        let formulas = self.formulas()?;
        let mut parts = Vec::new();
        for (n, f) in self.nodes.iter().zip(formulas) {
            Self::arity(n)?;
            let at = |id: &usize| NodeId(index[id]);
            let rule = match n.rule {
                RuleTag::Ax => CyclicRule::Axiom,
                RuleTag::Asm => CyclicRule::Assumption,
                RuleTag::Mp => CyclicRule::Mp(at(&n.children[0]), at(&n.children[1])),
                RuleTag::Nec => CyclicRule::Nec(at(&n.children[0])),
                RuleTag::Backlink => CyclicRule::Backlink(at(n.backlink.as_ref().expect("checked by arity"))),
                RuleTag::Omega => {
                    return Err(FormatError::BadNode {
                        id: n.id,
                        reason: "omega rule in a cyclic proof".into(),
                    })
                }
            };
            parts.push((f, rule));
        }
        Ok(CyclicDerivation::from_parts(parts, index[&self.root]))
    }

    /// Writes a cyclic derivation with ids in preorder.
    pub fn from_cyclic(c: &CyclicDerivation) -> Self {
        let c = c.canonical();
        let nodes = c
            .nodes()
            .iter()
            .enumerate()
            .map(|(id, n)| {
                let (rule, children, backlink) = match n.rule {
                    CyclicRule::Axiom => (RuleTag::Ax, Vec::new(), None),
                    CyclicRule::Assumption => (RuleTag::Asm, Vec::new(), None),
                    CyclicRule::Mp(a, b) => (RuleTag::Mp, vec![a.0, b.0], None),
                    CyclicRule::Nec(a) => (RuleTag::Nec, vec![a.0], None),
                    CyclicRule::Backlink(t) => (RuleTag::Backlink, Vec::new(), Some(t.0)),
                };
                NodeEntry {
                    id,
                    formula: n.formula.render(),
                    rule,
                    children,
                    backlink,
                    omega: None,
                }
            })
            .collect();
        ProofFile {
            nodes,
            root: c.root().0,
            sigma: None,
            gamma: None,
        }
    }

    /// A proof graph; children may point anywhere, including back up.
    pub fn to_graph(&self) -> Result<ProofGraph, FormatError> {
        let index = self.index()?;
        let formulas = self.formulas()?;
        let mut nodes = Vec::new();
        for (n, formula) in self.nodes.iter().zip(formulas) {
            Self::arity(n)?;
            let rule = match n.rule {
                RuleTag::Ax => GraphRule::Axiom,
                RuleTag::Asm => GraphRule::Assumption,
                RuleTag::Mp => GraphRule::Mp(index[&n.children[0]], index[&n.children[1]]),
                RuleTag::Nec => GraphRule::Nec(index[&n.children[0]]),
                RuleTag::Backlink | RuleTag::Omega => {
                    return Err(FormatError::BadNode {
                        id: n.id,
                        reason: format!("rule {} in a proof graph", n.rule.name()),
                    })
                }
            };
            nodes.push(GraphNode { formula, rule });
        }
        Ok(ProofGraph {
            nodes,
            root: index[&self.root],
        })
    }

    pub fn from_graph(g: &ProofGraph) -> Self {
        let nodes = g
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| {
                let (rule, children) = match n.rule {
                    GraphRule::Axiom => (RuleTag::Ax, Vec::new()),
                    GraphRule::Assumption => (RuleTag::Asm, Vec::new()),
                    GraphRule::Mp(a, b) => (RuleTag::Mp, vec![a, b]),
                    GraphRule::Nec(a) => (RuleTag::Nec, vec![a]),
                };
                NodeEntry {
                    id,
                    formula: n.formula.render(),
                    rule,
                    children,
                    backlink: None,
                    omega: None,
                }
            })
            .collect();
        ProofFile {
            nodes,
            root: g.root,
            sigma: None,
            gamma: None,
        }
    }
}

/// `{atoms, boxes}` where each box maps a subset bitmask to its image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub atoms: Vec<String>,
    pub boxes: Vec<BTreeMap<Elem, Elem>>,
}

impl AlgebraFile {
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        to_pretty(self)
    }

    /// Every subset must have exactly one entry per box.
    pub fn to_algebra(&self) -> Result<FiniteGLPAlgebra, FormatError> {
        let size = 1usize.checked_shl(self.atoms.len() as u32).unwrap_or(0);
        let mut tables = Vec::new();
        for (level, b) in self.boxes.iter().enumerate() {
            let complete = b.len() == size && b.keys().enumerate().all(|(i, &k)| i == k as usize);
            if !complete {
                return Err(AlgebraError::TableSize {
                    level,
                    len: b.len(),
                    expected: size,
                }
                .into());
            }
            tables.push(b.values().copied().collect());
        }
        Ok(FiniteGLPAlgebra::new(self.atoms.clone(), tables)?)
    }

    pub fn from_algebra(a: &FiniteGLPAlgebra) -> Self {
        AlgebraFile {
            atoms: a.atoms().to_vec(),
            boxes: a
                .boxes()
                .iter()
                .map(|t| t.iter().enumerate().map(|(k, &v)| (k as Elem, v)).collect())
                .collect(),
        }
    }
}

/// `{points, topologies, valuation}`; each topology is its list of opens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub points: Vec<String>,
    pub topologies: Vec<Vec<Elem>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Elem>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        to_pretty(self)
    }

    pub fn to_space(&self) -> Result<FiniteGLPSpace, FormatError> {
        let n = self.points.len();
        let tops = self
            .topologies
            .iter()
            .map(|t| FiniteTopology::new(n, t.iter().copied()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FiniteGLPSpace::new(self.points.clone(), tops)?)
    }

    pub fn to_model(&self) -> Result<Model, FormatError> {
        let valuation: Valuation = self.valuation.clone();
        Ok(Model::new(self.to_space()?, valuation)?)
    }

    pub fn from_model(m: &Model) -> Self {
        let mut f = Self::from_space(m.space());
        f.valuation = m.valuation().clone();
        f
    }

    pub fn from_space(s: &FiniteGLPSpace) -> Self {
        ModelFile {
            points: s.points().to_vec(),
            topologies: s.topologies().iter().map(|t| t.opens().to_vec()).collect(),
            valuation: BTreeMap::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::check_cyclic;
    use crate::formula::fml;
    use crate::hilbert::{box_conj_intro, check_hilbert};
    use crate::neighbourhood::space_to_frame;

    #[test]
    fn cyclic_round_trip() {
        let c = CyclicDerivation::lob_example(fml("p"));
        let f = ProofFile::from_cyclic(&c);
        assert_eq!(f.kind(), ProofFileKind::Cyclic);
        let text = f.to_json();
        let back = ProofFile::from_json(&text).unwrap().to_cyclic().unwrap();
        check_cyclic(&back).unwrap();
        assert_eq!(ProofFile::from_cyclic(&back).to_json(), text);
    }

    #[test]
    fn shared_derivation_round_trip() {
        let d = box_conj_intro(&[fml("p"), fml("q"), fml("r")], 0).unwrap();
        let f = ProofFile::from_derivation(&d);
        assert!(f.nodes.len() <= d.size());
        let text = f.to_json();
        let back = ProofFile::from_json(&text).unwrap().to_derivation().unwrap();
        assert_eq!(back, d);
        check_hilbert(&back, &FormulaSet::new(), &FormulaSet::new()).unwrap();
        assert_eq!(ProofFile::from_derivation(&back).to_json(), text);
    }

    #[test]
    fn rejects_bad_tables() {
        let cyc = ProofFile::from_cyclic(&CyclicDerivation::lob_example(fml("p")));
        assert!(cyc.to_derivation().is_err());
        let mut dup = cyc.clone();
        dup.nodes[1].id = 0;
        assert!(matches!(dup.to_cyclic(), Err(FormatError::DuplicateId(0))));
        let mut arity = cyc.clone();
        arity.nodes[0].children.pop();
        assert!(matches!(arity.to_cyclic(), Err(FormatError::Arity { .. })));
        let mut loopy = ProofFile::from_graph(&crate::infinitary::unravel(&CyclicDerivation::lob_example(fml("p"))).unwrap().graph());
        assert!(loopy.to_graph().is_ok());
        loopy.root = 99;
        assert!(matches!(loopy.to_graph(), Err(FormatError::UnknownId(99))));
        assert!(ProofFile::from_json("{").is_err());
    }

    #[test]
    fn context_lists() {
        let s: FormulaSet = [fml("[0]p -> p")].into_iter().collect();
        let f = ProofFile::from_cyclic(&CyclicDerivation::lob_example(fml("p"))).with_context(&s, &s);
        let back = ProofFile::from_json(&f.to_json()).unwrap();
        assert_eq!(back.sigma().unwrap(), s);
        assert_eq!(back.gamma().unwrap(), s);
    }

    #[test]
    fn algebra_and_model_files() {
        let a = crate::algebra::kripke_algebra(&[0b10, 0]);
        let f = AlgebraFile::from_algebra(&a);
        let text = f.to_json();
        assert!(text.contains("\"2\": 3"));
        assert_eq!(AlgebraFile::from_json(&text).unwrap().to_algebra().unwrap(), a);
        let mut gap = f.clone();
        gap.boxes[0].remove(&1);
        assert!(gap.to_algebra().is_err());

        let s = FiniteGLPSpace::numbered(vec![FiniteTopology::lower_chain(2)]).unwrap();
        let m = Model::new(s, [("p".to_string(), 1)].into_iter().collect()).unwrap();
        let mf = ModelFile::from_model(&m);
        let text = mf.to_json();
        let back = ModelFile::from_json(&text).unwrap().to_model().unwrap();
        assert_eq!(back, m);
        assert_eq!(space_to_frame(back.space()).boxes()[0], vec![1, 3, 1, 3]);
        let bad = ModelFile {
            points: vec!["a".into(), "b".into()],
            topologies: vec![vec![0, 1, 2]],
            valuation: BTreeMap::new(),
        };
        assert!(bad.to_model().is_err());
    }
}
