//! Deterministic test corpora: finite Magari and GLP algebras, GLP-spaces,
//! random valid cyclic derivations, and checked judgments built from them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{kripke_algebra, strict_orders, FiniteGLPAlgebra};
use crate::cyclic::{check_cyclic, classify_cyclic, theorem_witness, CyclicDerivation, CyclicRule};
use crate::formula::{fml, Formula, FormulaSet};
use crate::hilbert::{build_transitivity, check_hilbert, is_axiom};
use crate::infinitary::{check_omega, inf_to_omega, unravel};
use crate::neighbourhood::{glp_spaces, space_to_frame, FiniteGLPSpace};
use crate::proof::{Derivation, Judgment};

/// Single-level algebras of all strict partial orders on `0..=max_points`
/// labelled points.
pub fn kripke_magari_corpus(max_points: usize) -> Vec<FiniteGLPAlgebra> {
    (0..=max_points)
        .flat_map(strict_orders)
        .map(|succ| kripke_algebra(&succ))
        .collect()
}

/// GLP-spaces on `0..=max_points` points with `1..=max_levels` explicit
/// topologies.
pub fn glp_space_corpus(max_points: usize, max_levels: usize) -> Vec<FiniteGLPSpace> {
    let mut out = Vec::new();
    for n in 0..=max_points {
        for k in 1..=max_levels {
            out.extend(glp_spaces(n, k));
        }
    }
    out
}

pub fn glp_algebra_corpus(max_points: usize, max_levels: usize) -> Vec<FiniteGLPAlgebra> {
    glp_space_corpus(max_points, max_levels).iter().map(space_to_frame).collect()
}

/// Random formula of depth at most `depth` over `vars`, with box indices
/// below `levels`.
pub fn random_formula(rng: &mut ChaCha8Rng, depth: usize, vars: &[&str], levels: u32) -> Formula {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return match rng.gen_range(0..=vars.len()) {
            0 => Formula::bot(),
            k => Formula::var(vars[k - 1]),
        };
    }
    if rng.gen_bool(0.5) {
        let a = random_formula(rng, depth - 1, vars, levels);
        let b = random_formula(rng, depth - 1, vars, levels);
        Formula::imp(a, b)
    } else {
        let i = rng.gen_range(0..levels.max(1));
        Formula::boxed(i, random_formula(rng, depth - 1, vars, levels))
    }
}

/// Bounds for [`random_cyclic`].
#[derive(Debug, Clone, Copy)]
pub struct CyclicShape {
    pub max_nodes: usize,
    pub max_links: usize,
}

impl Default for CyclicShape {
    fn default() -> Self {
        CyclicShape {
            max_nodes: 12,
            max_links: 3,
        }
    }
}

fn pool() -> Vec<Formula> {
    ["p", "q", "[0]p", "p -> q", "[0]q -> q", "[1]p", "~p"]
        .iter()
        .map(|s| fml(s))
        .collect()
}

struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    shape: CyclicShape,
    nodes: Vec<(Formula, CyclicRule)>,
    links: usize,
    pool: Vec<Formula>,
}

impl Gen<'_> {
    /// `path` holds the ancestors of the new node with, for each, whether a
    /// `nec` node lies at or below it on the path.
    fn node(&mut self, goal: Formula, path: &mut Vec<(usize, bool)>) -> usize {
        let id = self.nodes.len();
        self.nodes.push((goal.clone(), CyclicRule::Assumption));
        let room = self.shape.max_nodes.saturating_sub(self.nodes.len());

        let link = path
            .iter()
            .filter(|&&(a, nec)| nec && self.nodes[a].0 == goal)
            .map(|&(a, _)| a)
            .next();
        if let Some(target) = link {
            if self.links < self.shape.max_links && self.rng.gen_bool(0.8) {
                self.links += 1;
                self.nodes[id].1 = CyclicRule::Backlink(crate::proof::NodeId(target));
                return id;
            }
        }
        if room < 2 || self.rng.gen_bool(0.25) {
            if is_axiom(&goal).is_some() {
                self.nodes[id].1 = CyclicRule::Axiom;
            }
            return id;
        }
        let is_nec = matches!(goal.as_box(), Some((0, _)));
        let rule = if is_nec && self.rng.gen_bool(0.7) {
            let body = goal.as_box().expect("boxed goal").1.clone();
            let saved: Vec<bool> = path.iter().map(|p| p.1).collect();
            path.push((id, false));
            for p in path.iter_mut() {
                p.1 = true;
            }
            let c = self.node(body, path);
            path.pop();
            for (p, s) in path.iter_mut().zip(&saved) {
                p.1 = *s;
            }
            CyclicRule::Nec(crate::proof::NodeId(c))
        } else {
            let minor = if self.rng.gen_bool(0.6) {
                let mut ancestors: Vec<Formula> = path.iter().map(|&(a, _)| self.nodes[a].0.clone()).collect();
                ancestors.push(goal.clone());
                Formula::boxed(0, ancestors.choose(self.rng).expect("nonempty").clone())
            } else {
                self.pool.choose(self.rng).expect("nonempty pool").clone()
            };
            let major = Formula::imp(minor.clone(), goal.clone());
            let saved: Vec<bool> = path.iter().map(|p| p.1).collect();
            path.push((id, false));
            let a = self.node(minor, path);
            for (p, s) in path.iter_mut().zip(&saved) {
                p.1 = *s;
            }
            path.last_mut().expect("pushed").1 = false;
            let b = self.node(major, path);
            path.pop();
            for (p, s) in path.iter_mut().zip(&saved) {
                p.1 = *s;
            }
            CyclicRule::Mp(crate::proof::NodeId(a), crate::proof::NodeId(b))
        };
        self.nodes[id].1 = rule;
        id
    }
}

/// One random valid cyclic derivation within `shape`, by rejection
/// sampling over top-down generation.
pub fn random_cyclic(rng: &mut ChaCha8Rng, shape: CyclicShape) -> CyclicDerivation {
    let pool = pool();
    loop {
        let goal = pool.choose(rng).expect("nonempty pool").clone();
        let mut g = Gen {
            rng,
            shape,
            nodes: Vec::new(),
            links: 0,
            pool: pool.clone(),
        };
        g.node(goal, &mut Vec::new());
        if g.nodes.len() <= shape.max_nodes {
            let c = CyclicDerivation::from_parts(g.nodes, 0);
            if check_cyclic(&c).is_ok() {
                return c;
            }
        }
    }
}

/// `count` derivations from a fixed seed; the first is the Löb cycle for `p`.
/// Each later one is kept only if it has at least one back-link, except for
/// a few link-free ones mixed in at fixed positions.
pub fn cyclic_corpus(seed: u64, count: usize) -> Vec<CyclicDerivation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![CyclicDerivation::lob_example(fml("p"))];
    while out.len() < count {
        let c = random_cyclic(&mut rng, CyclicShape::default());
        let want_links = out.len() % 5 != 0;
        if want_links == !c.backlinks().is_empty() && !out.contains(&c) {
            out.push(c);
        }
    }
    out.truncate(count);
    out
}

/// Checked judgments `sigma; gamma |- phi`, one per proof.
#[derive(Debug, Clone)]
pub struct JudgmentCase {
    pub label: String,
    pub judgment: Judgment,
}

fn leaves_context(c: &CyclicDerivation) -> (FormulaSet, FormulaSet) {
    let cls = classify_cyclic(c).expect("corpus derivations are valid");
    (cls.boxed_formulas(), cls.local_formulas())
}

/// Hilbert, cyclic and omega judgments: hand-written Hilbert proofs, then
/// for every corpus cyclic derivation its cyclic judgment, its Hilbert
/// witness and its omega translation, all with the classification as
/// context.
pub fn judgment_corpus(cyclic: &[CyclicDerivation]) -> Vec<JudgmentCase> {
    let empty = FormulaSet::new();
    let set = |xs: &[&str]| xs.iter().map(|s| fml(s)).collect::<FormulaSet>();
    let mut out = Vec::new();

    let p = Derivation::assume(fml("p"));
    let pq = Derivation::assume(fml("p -> q"));
    let hilbert: Vec<(&str, Derivation, FormulaSet, FormulaSet)> = vec![
        (
            "nec leaf",
            Derivation::nec(p.clone()),
            set(&["p"]),
            empty.clone(),
        ),
        (
            "mp leaves",
            Derivation::mp(p.clone(), pq.clone()).expect("matching minor"),
            empty.clone(),
            set(&["p", "p -> q"]),
        ),
        (
            "boxed mp",
            Derivation::nec(Derivation::mp(p, pq).expect("matching minor")),
            set(&["p", "p -> q"]),
            empty.clone(),
        ),
        (
            "transitivity 0",
            build_transitivity(&fml("p"), 0).expect("builder"),
            empty.clone(),
            empty.clone(),
        ),
        (
            "transitivity 1",
            build_transitivity(&fml("q"), 1).expect("builder"),
            empty.clone(),
            empty.clone(),
        ),
        (
            "axiom iv",
            Derivation::axiom(fml("<0>p -> [1]<0>p")),
            empty.clone(),
            empty.clone(),
        ),
    ];
    for (label, d, sigma, gamma) in hilbert {
        let judgment = check_hilbert(&d, &sigma, &gamma).expect("hand-written proof is valid");
        out.push(JudgmentCase {
            label: format!("hilbert {label}"),
            judgment,
        });
    }

    for (i, c) in cyclic.iter().enumerate() {
        let (sigma, gamma) = leaves_context(c);
        let j = crate::cyclic::judge_cyclic(c, &sigma, &gamma).expect("covered by its own leaves");
        out.push(JudgmentCase {
            label: format!("cyclic {i}"),
            judgment: j,
        });
        let w = theorem_witness(c, &sigma, &gamma).expect("translation succeeds");
        out.push(JudgmentCase {
            label: format!("hilbert witness {i}"),
            judgment: check_hilbert(&w, &sigma, &gamma).expect("witness is valid"),
        });
        let r = unravel(c).expect("valid cyclic");
        let o = inf_to_omega(&r, &sigma, &gamma).expect("translation succeeds");
        out.push(JudgmentCase {
            label: format!("omega {i}"),
            judgment: check_omega(&o, &sigma, &gamma).expect("omega output is valid"),
        });
    }
    out
}
