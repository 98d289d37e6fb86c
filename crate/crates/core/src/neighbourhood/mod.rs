//! Finite topologies, GLP-spaces and their models. Subsets of the carrier
//! are bitmasks, as in [`crate::algebra`].

mod search;

pub use search::{
    budget_from_env, glp_spaces, search_countermodel, Countermodel, SearchBounds, DEFAULT_BUDGET,
};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::algebra::{Elem, FiniteGLPAlgebra, Valuation, HARD_MAX_ATOMS};
use crate::formula::{Formula, FormulaSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NeighbourhoodError {
    #[error("{points} points exceed the limit of {limit}")]
    TooManyPoints { points: usize, limit: usize },
    #[error("{set:#b} is not a subset of a {points}-point carrier")]
    NotSubset { set: Elem, points: usize },
    #[error("opens must contain the empty set and the carrier")]
    MissingTrivialOpens,
    #[error("opens are not closed under union or intersection at {a:#b}, {b:#b}")]
    NotClosed { a: Elem, b: Elem },
    #[error("topology {level} has a different carrier")]
    CarrierMismatch { level: usize },
    #[error("box table {level} does not come from a topology")]
    FrameNotTopology { level: usize },
    #[error("co-derived set of topology {level} differs from box {level} at {set:#b}")]
    FrameMismatch { level: usize, set: Elem },
    #[error("{set:#b} is not 0-open")]
    NotZeroOpen { set: Elem },
    #[error("world {0} is not in the carrier")]
    NoSuchWorld(usize),
    #[error("{u:#b} is not a 0-neighbourhood of world {x}")]
    NotANeighbourhood { x: usize, u: Elem },
    #[error("valuation of {var} is not a subset of the carrier")]
    ValuationRange { var: String },
    #[error("search needs up to {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("search bounds must be at least 1")]
    BoundTooSmall,
    #[error("no enumeration of spaces beyond {limit} points")]
    BoundTooLarge { limit: usize },
}

fn full(n: usize) -> Elem {
    if n == 0 {
        0
    } else {
        (((1u64) << n) - 1) as Elem
    }
}

fn check_points(n: usize) -> Result<(), NeighbourhoodError> {
    if n > HARD_MAX_ATOMS {
        Err(NeighbourhoodError::TooManyPoints {
            points: n,
            limit: HARD_MAX_ATOMS,
        })
    } else {
        Ok(())
    }
}

/// A topology on `{0, .., n-1}` given by its open sets. Every finite
/// topology is determined by the minimal neighbourhood `N(x)` of each point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteTopology {
    n: usize,
    opens: Vec<Elem>,
    nbhd: Vec<Elem>,
}

impl FiniteTopology {
    pub fn new(n: usize, opens: impl IntoIterator<Item = Elem>) -> Result<Self, NeighbourhoodError> {
        check_points(n)?;
        let top = full(n);
        let set: BTreeSet<Elem> = opens.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&u| u & !top != 0) {
            return Err(NeighbourhoodError::NotSubset { set: bad, points: n });
        }
        if !set.contains(&0) || !set.contains(&top) {
            return Err(NeighbourhoodError::MissingTrivialOpens);
        }
        for &a in &set {
            for &b in &set {
                if !set.contains(&(a | b)) || !set.contains(&(a & b)) {
                    return Err(NeighbourhoodError::NotClosed { a, b });
                }
            }
        }
        let opens: Vec<Elem> = set.into_iter().collect();
        let nbhd = (0..n)
            .map(|x| {
                opens
                    .iter()
                    .filter(|&&u| u >> x & 1 == 1)
                    .fold(top, |acc, &u| acc & u)
            })
            .collect();
        Ok(FiniteTopology { n, opens, nbhd })
    }

    pub fn discrete(n: usize) -> Self {
        Self::new(n, 0..=full(n)).expect("powerset is a topology")
    }

    pub fn indiscrete(n: usize) -> Self {
        Self::new(n, [0, full(n)]).expect("trivial topology")
    }

    /// Opens are the sets closed under `below`: `below[x]` lists the points
    /// in every neighbourhood of `x` (including `x`).
    pub fn from_preorder(below: &[Elem]) -> Result<Self, NeighbourhoodError> {
        let n = below.len();
        check_points(n)?;
        let opens = (0..=full(n)).filter(|&u| (0..n).all(|x| u >> x & 1 == 0 || below[x] & !u == 0));
        Self::new(n, opens)
    }

    /// Down-sets of the chain `0 < 1 < .. < n-1`.
    pub fn lower_chain(n: usize) -> Self {
        Self::new(n, (0..=n).map(full)).expect("chain of down-sets")
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn carrier(&self) -> Elem {
        full(self.n)
    }

    pub fn opens(&self) -> &[Elem] {
        &self.opens
    }

    pub fn is_open(&self, u: Elem) -> bool {
        self.opens.binary_search(&u).is_ok()
    }

    /// Minimal open neighbourhood of `x`.
    pub fn min_nbhd(&self, x: usize) -> Elem {
        self.nbhd[x]
    }

    pub fn is_discrete(&self) -> bool {
        self.opens.len() == 1 << self.n
    }

    pub fn is_subtopology_of(&self, other: &FiniteTopology) -> bool {
        self.n == other.n && self.opens.iter().all(|&u| other.is_open(u))
    }

    fn subset(&self, v: Elem) -> Result<(), NeighbourhoodError> {
        if v & !self.carrier() != 0 {
            Err(NeighbourhoodError::NotSubset { set: v, points: self.n })
        } else {
            Ok(())
        }
    }

    /// Limit points of `v`: every neighbourhood of `x` meets `v \ {x}`.
    pub fn d(&self, v: Elem) -> Result<Elem, NeighbourhoodError> {
        self.subset(v)?;
        Ok(self.d_unchecked(v))
    }

    fn d_unchecked(&self, v: Elem) -> Elem {
        (0..self.n)
            .filter(|&x| self.nbhd[x] & v & !(1 << x) != 0)
            .fold(0, |acc, x| acc | 1 << x)
    }

    /// Points with a punctured neighbourhood inside `v`.
    pub fn cd(&self, v: Elem) -> Result<Elem, NeighbourhoodError> {
        self.subset(v)?;
        Ok(self.cd_unchecked(v))
    }

    fn cd_unchecked(&self, v: Elem) -> Elem {
        self.carrier() & !self.d_unchecked(self.carrier() & !v)
    }

    /// Cantor-Bendixson ranks: points removed at round `r` of isolated-point
    /// removal get rank `r`; points of the perfect residue get `None`.
    pub fn cb_ranks(&self) -> Vec<Option<u32>> {
        let mut rank = vec![None; self.n];
        let mut rest = self.carrier();
        let mut r = 0;
        while rest != 0 {
            let isolated = (0..self.n)
                .filter(|&x| rest >> x & 1 == 1 && self.nbhd[x] & rest == 1 << x)
                .fold(0, |acc, x| acc | 1 << x);
            if isolated == 0 {
                break;
            }
            for (x, slot) in rank.iter_mut().enumerate() {
                if isolated >> x & 1 == 1 {
                    *slot = Some(r);
                }
            }
            rest &= !isolated;
            r += 1;
        }
        rank
    }

    pub fn is_scattered(&self) -> bool {
        self.cb_ranks().iter().all(Option::is_some)
    }

    /// Every point is closed in some of its open neighbourhoods: some open
    /// `U` containing `x` has `U \ {x}` open.
    pub fn is_td(&self) -> bool {
        (0..self.n).all(|x| {
            self.opens
                .iter()
                .any(|&u| u >> x & 1 == 1 && self.is_open(u & !(1 << x)))
        })
    }

    /// Subspace topology on an arbitrary subset, with its points renumbered
    /// in increasing order.
    pub fn subspace(&self, sub: Elem) -> Result<FiniteTopology, NeighbourhoodError> {
        self.subset(sub)?;
        let opens: BTreeSet<Elem> = self.opens.iter().map(|&u| compress(u & sub, sub)).collect();
        FiniteTopology::new(sub.count_ones() as usize, opens)
    }
}

impl fmt::Display for FiniteTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opens: Vec<String> = self.opens.iter().map(|u| format!("{u:#b}")).collect();
        write!(f, "{{{}}}", opens.join(", "))
    }
}

pub(crate) fn compress(x: Elem, mask: Elem) -> Elem {
    let mut out = 0;
    let mut k = 0;
    for bit in 0..32 {
        if mask >> bit & 1 == 1 {
            out |= (x >> bit & 1) << k;
            k += 1;
        }
    }
    out
}

/// All topologies on `n` points, one per preorder, sorted by open-set list.
pub fn all_topologies(n: usize) -> Vec<FiniteTopology> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut below: Vec<Elem> = (0..n).map(|x| 1 << x).collect();
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                below[i] |= 1 << j;
            }
        }
        let transitive = (0..n).all(|i| (0..n).filter(|&j| below[i] >> j & 1 == 1).all(|j| below[j] & !below[i] == 0));
        if transitive {
            out.push(FiniteTopology::from_preorder(&below).expect("preorder topology"));
        }
    }
    out.sort();
    out
}

pub fn scattered_topologies(n: usize) -> Vec<FiniteTopology> {
    all_topologies(n).into_iter().filter(FiniteTopology::is_scattered).collect()
}

/// First failed GLP-space condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpaceViolation {
    NotScattered { level: usize },
    NotIncreasing { level: usize },
    DerivedNotOpen { level: usize, set: Elem },
}

impl fmt::Display for SpaceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SpaceViolation::NotScattered { level } => write!(f, "topology {level} is not scattered"),
            SpaceViolation::NotIncreasing { level } => {
                write!(f, "topology {level} is not contained in topology {}", level + 1)
            }
            SpaceViolation::DerivedNotOpen { level, set } => write!(
                f,
                "derived set of {set:#b} in topology {level} is not open in topology {}",
                level + 1
            ),
        }
    }
}

/// A carrier with explicit topologies `t_0 .. t_{k-1}`; `t_i` for `i >= k`
/// is discrete.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteGLPSpace {
    points: Vec<String>,
    topologies: Vec<FiniteTopology>,
}

impl FiniteGLPSpace {
    pub fn new(points: Vec<String>, topologies: Vec<FiniteTopology>) -> Result<Self, NeighbourhoodError> {
        check_points(points.len())?;
        if let Some(level) = topologies.iter().position(|t| t.points() != points.len()) {
            return Err(NeighbourhoodError::CarrierMismatch { level });
        }
        Ok(FiniteGLPSpace { points, topologies })
    }

    /// Points named `0, 1, ...`.
    pub fn numbered(topologies: Vec<FiniteTopology>) -> Result<Self, NeighbourhoodError> {
        let n = topologies.first().map_or(0, FiniteTopology::points);
        Self::new((0..n).map(|i| i.to_string()).collect(), topologies)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn carrier(&self) -> Elem {
        full(self.points.len())
    }

    pub fn topologies(&self) -> &[FiniteTopology] {
        &self.topologies
    }

    pub fn levels(&self) -> usize {
        self.topologies.len()
    }

    /// `t_i`, discrete beyond the explicit levels.
    pub fn topology(&self, i: usize) -> FiniteTopology {
        self.topologies
            .get(i)
            .cloned()
            .unwrap_or_else(|| FiniteTopology::discrete(self.n_points()))
    }

    pub fn check(&self) -> Result<(), SpaceViolation> {
        check_glp_space(self)
    }
}

/// Scatteredness of every level, `t_i` inside `t_{i+1}`, and
/// `d_{t_i}(V)` open in `t_{i+1}` for every `V`, the last explicit level
/// compared with the discrete one.
pub fn check_glp_space(s: &FiniteGLPSpace) -> Result<(), SpaceViolation> {
    for (level, t) in s.topologies.iter().enumerate() {
        if !t.is_scattered() {
            return Err(SpaceViolation::NotScattered { level });
        }
    }
    for level in 0..s.levels() {
        let (lo, hi) = (s.topology(level), s.topology(level + 1));
        if !lo.is_subtopology_of(&hi) {
            return Err(SpaceViolation::NotIncreasing { level });
        }
        for v in 0..=s.carrier() {
            if !hi.is_open(lo.d_unchecked(v)) {
                return Err(SpaceViolation::DerivedNotOpen { level, set: v });
            }
        }
    }
    Ok(())
}

/// Box tables `[i] = cd_{t_i}` over the powerset of the carrier.
pub fn space_to_frame(s: &FiniteGLPSpace) -> FiniteGLPAlgebra {
    let boxes = s
        .topologies
        .iter()
        .map(|t| (0..=s.carrier()).map(|v| t.cd_unchecked(v)).collect())
        .collect();
    FiniteGLPAlgebra::with_limit(s.points.clone(), boxes, HARD_MAX_ATOMS).expect("carrier within limit")
}

/// `t_i = { U : U <= [i]U }`, verified to reproduce `[i]` as `cd_{t_i}`.
pub fn frame_to_space(a: &FiniteGLPAlgebra) -> Result<FiniteGLPSpace, NeighbourhoodError> {
    let n = a.n_atoms();
    let mut tops = Vec::new();
    for level in 0..a.levels() {
        let opens = a.elements().filter(|&u| FiniteGLPAlgebra::leq(u, a.box_op(level, u)));
        let t = FiniteTopology::new(n, opens).map_err(|_| NeighbourhoodError::FrameNotTopology { level })?;
        if let Some(set) = a.elements().find(|&v| t.cd_unchecked(v) != a.box_op(level, v)) {
            return Err(NeighbourhoodError::FrameMismatch { level, set });
        }
        tops.push(t);
    }
    FiniteGLPSpace::new(a.atoms().to_vec(), tops)
}

/// `[i]'V = X' & [i]V` on the powerset of `X'`, with points of `X'`
/// renumbered in increasing order.
pub fn open_subframe(a: &FiniteGLPAlgebra, sub: Elem) -> Result<FiniteGLPAlgebra, NeighbourhoodError> {
    if sub & !a.top() != 0 {
        return Err(NeighbourhoodError::NotSubset {
            set: sub,
            points: a.n_atoms(),
        });
    }
    if !FiniteGLPAlgebra::leq(sub, a.box_op(0, sub)) {
        return Err(NeighbourhoodError::NotZeroOpen { set: sub });
    }
    let atoms: Vec<String> = (0..a.n_atoms())
        .filter(|&k| sub >> k & 1 == 1)
        .map(|k| a.atoms()[k].clone())
        .collect();
    let size = 1usize << atoms.len();
    let boxes = (0..a.levels())
        .map(|i| {
            (0..size as Elem)
                .map(|y| compress(a.box_op(i, expand(y, sub)) & sub, sub))
                .collect()
        })
        .collect();
    Ok(FiniteGLPAlgebra::with_limit(atoms, boxes, HARD_MAX_ATOMS).expect("sub-carrier within limit"))
}

pub(crate) fn expand(x: Elem, mask: Elem) -> Elem {
    let mut out = 0;
    let mut k = 0;
    for bit in 0..32 {
        if mask >> bit & 1 == 1 {
            out |= (x >> k & 1) << bit;
            k += 1;
        }
    }
    out
}

/// A GLP-space with a valuation. Variables without an entry denote the
/// empty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    space: FiniteGLPSpace,
    valuation: Valuation,
    frame: FiniteGLPAlgebra,
}

impl Model {
    pub fn new(space: FiniteGLPSpace, valuation: Valuation) -> Result<Self, NeighbourhoodError> {
        if let Some((var, _)) = valuation.iter().find(|(_, &v)| v & !space.carrier() != 0) {
            return Err(NeighbourhoodError::ValuationRange { var: var.clone() });
        }
        let frame = space_to_frame(&space);
        Ok(Model {
            space,
            valuation,
            frame,
        })
    }

    pub fn space(&self) -> &FiniteGLPSpace {
        &self.space
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn frame(&self) -> &FiniteGLPAlgebra {
        &self.frame
    }

    pub fn carrier(&self) -> Elem {
        self.space.carrier()
    }

    /// Truth set of `f`.
    pub fn eval(&self, f: &Formula) -> Elem {
        eval_in(&self.frame, &self.valuation, f)
    }

    pub fn holds_at(&self, x: usize, f: &Formula) -> bool {
        self.eval(f) >> x & 1 == 1
    }

    pub fn holds(&self, f: &Formula) -> bool {
        self.eval(f) == self.carrier()
    }
}

pub(crate) fn eval_in(a: &FiniteGLPAlgebra, v: &Valuation, f: &Formula) -> Elem {
    match f {
        Formula::Var(name) => v.get(&**name).copied().unwrap_or(0),
        Formula::Bot => 0,
        Formula::Imp(p, q) => a.imp(eval_in(a, v, p), eval_in(a, v, q)),
        Formula::Box(i, p) => a.box_op(*i as usize, eval_in(a, v, p)),
    }
}

/// Truth set of `f` in `m`.
pub fn eval_model(m: &Model, f: &Formula) -> Elem {
    m.eval(f)
}

/// The submodel on a 0-open `X'`: subspace topologies and `v'(p) = X' & v(p)`,
/// with points renumbered in increasing order.
pub fn restrict_model(m: &Model, sub: Elem) -> Result<Model, NeighbourhoodError> {
    let t0 = m.space.topology(0);
    t0.subset(sub)?;
    if !t0.is_open(sub) {
        return Err(NeighbourhoodError::NotZeroOpen { set: sub });
    }
    let points = (0..m.space.n_points())
        .filter(|&k| sub >> k & 1 == 1)
        .map(|k| m.space.points[k].clone())
        .collect();
    let tops = m
        .space
        .topologies
        .iter()
        .map(|t| t.subspace(sub))
        .collect::<Result<Vec<_>, _>>()?;
    let valuation = m
        .valuation
        .iter()
        .map(|(k, &v)| (k.clone(), compress(v & sub, sub)))
        .collect();
    Model::new(FiniteGLPSpace::new(points, tops)?, valuation)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemMode {
    /// `gamma` at `x` implies `phi` at `x`.
    Local,
    /// `gamma` everywhere implies `phi` everywhere; the world is ignored.
    Global,
    /// `gamma` at `x` and `sigma` at every other world implies `phi` at `x`.
    Glocal,
    /// As `Glocal` with `sigma` required only on `U \ {x}` for the given
    /// 0-neighbourhood `U` of `x`.
    GlocalStar(Elem),
}

/// Truth value of the consequence implication at one world of one model.
/// A 0-neighbourhood of `x` is a 0-open set containing `x`.
pub fn sem_consequence_check(
    m: &Model,
    x: usize,
    sigma: &FormulaSet,
    gamma: &FormulaSet,
    phi: &Formula,
    mode: SemMode,
) -> Result<bool, NeighbourhoodError> {
    if mode != SemMode::Global && x >= m.space.n_points() {
        return Err(NeighbourhoodError::NoSuchWorld(x));
    }
    let top = m.carrier();
    let gammas = || gamma.iter().fold(top, |acc, g| acc & m.eval(g));
    let sigmas = || sigma.iter().fold(top, |acc, s| acc & m.eval(s));
    Ok(match mode {
        SemMode::Local => gammas() >> x & 1 == 0 || m.holds_at(x, phi),
        SemMode::Global => gammas() != top || m.holds(phi),
        SemMode::Glocal | SemMode::GlocalStar(_) => {
            let others = match mode {
                SemMode::GlocalStar(u) => {
                    if u >> x & 1 == 0 || !m.space.topology(0).is_open(u) || u & !top != 0 {
                        return Err(NeighbourhoodError::NotANeighbourhood { x, u });
                    }
                    u & !(1 << x)
                }
                _ => top & !(1 << x),
            };
            let premise = gammas() >> x & 1 == 1 && others & !sigmas() == 0;
            !premise || m.holds_at(x, phi)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::check_glp;
    use crate::formula::fml;

    fn chain_space(n: usize) -> FiniteGLPSpace {
        FiniteGLPSpace::numbered(vec![FiniteTopology::lower_chain(n)]).unwrap()
    }

    #[test]
    fn derived_sets() {
        let t = FiniteTopology::lower_chain(3);
        assert_eq!(t.d(0b001).unwrap(), 0b110);
        assert_eq!(t.cd(0b110).unwrap(), 0b001);
        assert_eq!(t.cd(0b111).unwrap(), 0b111);
        let disc = FiniteTopology::discrete(3);
        for v in 0..8 {
            assert_eq!(disc.d(v).unwrap(), 0);
            assert_eq!(disc.cd(v).unwrap(), 0b111);
        }
        assert!(t.d(0b1000).is_err());
        for v in 0..8 {
            assert_eq!(t.is_open(v), v & !t.cd(v).unwrap() == 0);
        }
    }

    #[test]
    fn ranks() {
        let t = FiniteTopology::lower_chain(3);
        assert_eq!(t.cb_ranks(), vec![Some(0), Some(1), Some(2)]);
        assert!(t.is_scattered());
        assert!(!FiniteTopology::indiscrete(2).is_scattered());
        assert_eq!(FiniteTopology::discrete(3).cb_ranks(), vec![Some(0); 3]);
        assert!(!FiniteTopology::indiscrete(2).is_td());
    }

    #[test]
    fn topology_counts() {
        let counts: Vec<usize> = (0..=4).map(|n| all_topologies(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 29, 355]);
        let scattered: Vec<usize> = (0..=4).map(|n| scattered_topologies(n).len()).collect();
        assert_eq!(scattered, vec![1, 1, 3, 19, 219]);
        assert!(FiniteTopology::new(2, [0, 1, 2]).is_err());
        assert!(FiniteTopology::new(2, [1, 3]).is_err());
    }

    #[test]
    fn glp_space_checks() {
        let disc = FiniteTopology::discrete(3);
        let s = FiniteGLPSpace::numbered(vec![FiniteTopology::lower_chain(3), disc.clone()]).unwrap();
        assert!(s.check().is_ok());
        assert!(FiniteGLPSpace::numbered(vec![disc.clone(), disc]).unwrap().check().is_ok());
        assert!(chain_space(3).check().is_ok());
        let bad = FiniteGLPSpace::numbered(vec![FiniteTopology::indiscrete(2), FiniteTopology::discrete(2)]).unwrap();
        assert_eq!(bad.check(), Err(SpaceViolation::NotScattered { level: 0 }));
        let down = FiniteGLPSpace::numbered(vec![FiniteTopology::discrete(2), FiniteTopology::lower_chain(2)]).unwrap();
        assert!(matches!(down.check(), Err(SpaceViolation::NotScattered { .. } | SpaceViolation::NotIncreasing { .. })));
        let same = FiniteGLPSpace::numbered(vec![FiniteTopology::lower_chain(2), FiniteTopology::lower_chain(2)]).unwrap();
        assert!(matches!(same.check(), Err(SpaceViolation::DerivedNotOpen { level: 0, .. })));
    }

    #[test]
    fn frames() {
        let s = chain_space(3);
        let a = space_to_frame(&s);
        assert!(check_glp(&a).is_ok());
        assert_eq!(frame_to_space(&a).unwrap(), s);
        let one = FiniteGLPAlgebra::numbered(2, vec![vec![3; 4]]).unwrap();
        assert!(frame_to_space(&one).unwrap().topologies()[0].is_discrete());
        let corrupt = FiniteGLPAlgebra::numbered(2, vec![vec![3, 0, 3, 3]]).unwrap();
        assert!(frame_to_space(&corrupt).is_err());
    }

    #[test]
    fn subframes() {
        let a = space_to_frame(&chain_space(3));
        assert_eq!(open_subframe(&a, 0b111).unwrap(), a);
        let sub = open_subframe(&a, 0b001).unwrap();
        assert_eq!(sub.n_atoms(), 1);
        assert_eq!(sub.boxes()[0], vec![1, 1]);
        assert_eq!(open_subframe(&a, 0b100), Err(NeighbourhoodError::NotZeroOpen { set: 0b100 }));
    }

    #[test]
    fn evaluation() {
        let v: Valuation = [("p".to_string(), 0b001)].into_iter().collect();
        let m = Model::new(chain_space(3), v).unwrap();
        assert_eq!(m.eval(&fml("[0]p")), 0b011);
        assert_eq!(m.eval(&fml("T")), 0b111);
        for p in 0..8 {
            let v: Valuation = [("p".to_string(), p)].into_iter().collect();
            let m = Model::new(chain_space(3), v).unwrap();
            assert!(m.holds(&fml("[0]([0]p -> p) -> [0]p")));
        }
    }

    #[test]
    fn submodel_matches_subframe() {
        let v: Valuation = [("p".to_string(), 0b010)].into_iter().collect();
        let m = Model::new(chain_space(3), v).unwrap();
        let r = restrict_model(&m, 0b011).unwrap();
        assert_eq!(r.frame().boxes(), open_subframe(m.frame(), 0b011).unwrap().boxes());
        for f in ["p", "[0]p", "[0]~p", "[0]([0]p -> p)"] {
            assert_eq!(expand(r.eval(&fml(f)), 0b011), 0b011 & m.eval(&fml(f)));
        }
        assert!(restrict_model(&m, 0b010).is_err());
    }

    #[test]
    fn consequence() {
        let set = |t: &[&str]| t.iter().map(|s| fml(s)).collect::<FormulaSet>();
        let none = FormulaSet::new();
        for p in 0..8 {
            let v: Valuation = [("p".to_string(), p)].into_iter().collect();
            let m = Model::new(chain_space(3), v).unwrap();
            for x in 0..3 {
                assert!(sem_consequence_check(&m, x, &none, &set(&["p"]), &fml("p"), SemMode::Local).unwrap());
                assert!(sem_consequence_check(&m, x, &set(&["p"]), &none, &fml("[0]p"), SemMode::Glocal).unwrap());
                let g = sem_consequence_check(&m, x, &set(&["p"]), &none, &fml("[0]p"), SemMode::GlocalStar(0b111));
                assert!(g.unwrap());
            }
        }
        let m = Model::new(chain_space(3), Valuation::new()).unwrap();
        assert_eq!(
            sem_consequence_check(&m, 1, &none, &none, &fml("p"), SemMode::GlocalStar(0b010)),
            Err(NeighbourhoodError::NotANeighbourhood { x: 1, u: 0b010 })
        );
        assert!(sem_consequence_check(&m, 3, &none, &none, &fml("p"), SemMode::Local).is_err());
    }

    #[test]
    fn empty_carrier() {
        let s = FiniteGLPSpace::numbered(vec![FiniteTopology::discrete(0)]).unwrap();
        assert_eq!(s.n_points(), 0);
        assert!(s.check().is_ok());
        let m = Model::new(s, Valuation::new()).unwrap();
        assert!(m.holds(&fml("F")));
        assert!(sem_consequence_check(&m, 0, &FormulaSet::new(), &FormulaSet::new(), &fml("F"), SemMode::Global).unwrap());
    }
}
