//! Finite GLP-algebras over powerset Boolean algebras. Elements are bitmasks
//! over the atoms (bit `k` is atom `k`); each box is a lookup table. Boxes
//! with index at least the number of tables are the constant-1 operator.

mod height;

pub use height::{product_wf, wf_height, CyclicRelation, Digraph, Height};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{Formula, FormulaSet};

pub type Elem = u32;

/// Variable assignment into a powerset algebra or a model.
pub type Valuation = BTreeMap<String, Elem>;

/// Default cap on the number of atoms; the meet identity check is quadratic
/// in the carrier size.
pub const DEFAULT_MAX_ATOMS: usize = 10;

/// Hard cap imposed by the `u32` element encoding and table sizes.
pub const HARD_MAX_ATOMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("{atoms} atoms exceed the limit of {limit}")]
    TooManyAtoms { atoms: usize, limit: usize },
    #[error("box table {level} has {len} entries, expected {expected}")]
    TableSize { level: usize, len: usize, expected: usize },
    #[error("box table {level} maps {x:#b} outside the carrier")]
    TableRange { level: usize, x: Elem },
    #[error("variable {0} has no value")]
    UnboundVariable(String),
    #[error("level {level} is not box-founded")]
    NotBoxFounded { level: usize },
    #[error("set is not a filter")]
    NotAFilter,
    #[error("filter is not open: box {level} maps member {x:#b} outside it")]
    NotOpen { level: usize, x: Elem },
    #[error("U = {u:#b} is not a 0-neighbourhood of world {x}")]
    NotANeighbourhood { x: usize, u: Elem },
    #[error("world {0} is not in the carrier")]
    NoSuchWorld(usize),
}

/// First failure found by [`check_magari`] or [`check_glp`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraViolation {
    BoxOfTop { level: usize },
    Meet { level: usize, x: Elem, y: Elem },
    Lob { level: usize, x: Elem },
    DiamondUp { level: usize, x: Elem },
    BoxUp { level: usize, x: Elem },
}

impl fmt::Display for AlgebraViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AlgebraViolation::BoxOfTop { level } => write!(f, "level {level}: [i]1 != 1"),
            AlgebraViolation::Meet { level, x, y } => {
                write!(f, "level {level}: [i](x & y) != [i]x & [i]y at x={x:#b}, y={y:#b}")
            }
            AlgebraViolation::Lob { level, x } => write!(f, "level {level}: [i]([i]x -> x) != [i]x at x={x:#b}"),
            AlgebraViolation::DiamondUp { level, x } => {
                write!(f, "level {level}: <i>x is not below [i+1]<i>x at x={x:#b}")
            }
            AlgebraViolation::BoxUp { level, x } => write!(f, "level {level}: [i]x is not below [i+1]x at x={x:#b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteGLPAlgebra {
    atoms: Vec<String>,
    boxes: Vec<Vec<Elem>>,
}

fn full(n: usize) -> Elem {
    if n == 0 {
        0
    } else {
        (((1u64) << n) - 1) as Elem
    }
}

impl FiniteGLPAlgebra {
    pub fn new(atoms: Vec<String>, boxes: Vec<Vec<Elem>>) -> Result<Self, AlgebraError> {
        Self::with_limit(atoms, boxes, DEFAULT_MAX_ATOMS)
    }

    pub fn with_limit(atoms: Vec<String>, boxes: Vec<Vec<Elem>>, limit: usize) -> Result<Self, AlgebraError> {
        let limit = limit.min(HARD_MAX_ATOMS);
        if atoms.len() > limit {
            return Err(AlgebraError::TooManyAtoms {
                atoms: atoms.len(),
                limit,
            });
        }
        let size = 1usize << atoms.len();
        let top = full(atoms.len());
        for (level, t) in boxes.iter().enumerate() {
            if t.len() != size {
                return Err(AlgebraError::TableSize {
                    level,
                    len: t.len(),
                    expected: size,
                });
            }
            if let Some(x) = t.iter().position(|&y| y & !top != 0) {
                return Err(AlgebraError::TableRange { level, x: x as Elem });
            }
        }
        Ok(FiniteGLPAlgebra { atoms, boxes })
    }

    /// Atoms named `0, 1, ...`.
    pub fn numbered(n: usize, boxes: Vec<Vec<Elem>>) -> Result<Self, AlgebraError> {
        Self::new((0..n).map(|i| i.to_string()).collect(), boxes)
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn boxes(&self) -> &[Vec<Elem>] {
        &self.boxes
    }

    pub fn levels(&self) -> usize {
        self.boxes.len()
    }

    pub fn size(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn top(&self) -> Elem {
        full(self.atoms.len())
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.size() as Elem
    }

    pub fn imp(&self, x: Elem, y: Elem) -> Elem {
        (!x | y) & self.top()
    }

    pub fn not(&self, x: Elem) -> Elem {
        !x & self.top()
    }

    pub fn leq(x: Elem, y: Elem) -> bool {
        x & !y == 0
    }

    /// `[i]x`, constant 1 above the explicit levels.
    pub fn box_op(&self, i: usize, x: Elem) -> Elem {
        match self.boxes.get(i) {
            Some(t) => t[x as usize],
            None => self.top(),
        }
    }

    pub fn diamond(&self, i: usize, x: Elem) -> Elem {
        self.not(self.box_op(i, self.not(x)))
    }

    /// Homomorphic extension of `v` to `f`.
    pub fn evaluate(&self, v: &Valuation, f: &Formula) -> Result<Elem, AlgebraError> {
        Ok(match f {
            Formula::Var(name) => *v
                .get(&**name)
                .ok_or_else(|| AlgebraError::UnboundVariable(name.to_string()))?,
            Formula::Bot => 0,
            Formula::Imp(a, b) => self.imp(self.evaluate(v, a)?, self.evaluate(v, b)?),
            Formula::Box(i, a) => self.box_op(*i as usize, self.evaluate(v, a)?),
        })
    }

    pub fn check(&self) -> Result<(), AlgebraViolation> {
        check_glp(self)
    }
}

/// The three Magari identities for one box table over `n` atoms:
/// `[]1 = 1`, `[](x & y) = []x & []y`, `[]([]x -> x) = []x`.
pub fn check_magari(n: usize, table: &[Elem]) -> Result<(), AlgebraViolation> {
    check_magari_level(n, table, 0)
}

fn check_magari_level(n: usize, t: &[Elem], level: usize) -> Result<(), AlgebraViolation> {
    let top = full(n);
    let size = 1usize << n;
    if t[top as usize] != top {
        return Err(AlgebraViolation::BoxOfTop { level });
    }
    for x in 0..size {
        for y in x..size {
            if t[x & y] != t[x] & t[y] {
                return Err(AlgebraViolation::Meet {
                    level,
                    x: x as Elem,
                    y: y as Elem,
                });
            }
        }
    }
    for x in 0..size {
        let bx = t[x];
        let step = ((!bx | x as Elem) & top) as usize;
        if t[step] != bx {
            return Err(AlgebraViolation::Lob { level, x: x as Elem });
        }
    }
    Ok(())
}

/// Magari identities at every explicit level, plus `<i>x <= [i+1]<i>x` and
/// `[i]x <= [i+1]x` for consecutive levels.
pub fn check_glp(a: &FiniteGLPAlgebra) -> Result<(), AlgebraViolation> {
    for (level, t) in a.boxes.iter().enumerate() {
        check_magari_level(a.n_atoms(), t, level)?;
    }
    for i in 0..a.levels() {
        for x in a.elements() {
            let d = a.diamond(i, x);
            if !FiniteGLPAlgebra::leq(d, a.box_op(i + 1, d)) {
                return Err(AlgebraViolation::DiamondUp { level: i, x });
            }
            if !FiniteGLPAlgebra::leq(a.box_op(i, x), a.box_op(i + 1, x)) {
                return Err(AlgebraViolation::BoxUp { level: i, x });
            }
        }
    }
    Ok(())
}

/// `b < a` iff `[i]b <= a`, on all elements other than 1. Node `k` of the
/// digraph is element `k` (the top element is left isolated).
pub fn box_order(a: &FiniteGLPAlgebra, i: usize) -> Digraph {
    let top = a.top();
    let mut g = Digraph::new(a.size());
    for x in a.elements().filter(|&x| x != top) {
        let bx = a.box_op(i, x);
        for y in a.elements().filter(|&y| y != top) {
            if FiniteGLPAlgebra::leq(bx, y) {
                g.add(x as usize, y as usize);
            }
        }
    }
    g
}

pub fn is_box_founded(a: &FiniteGLPAlgebra, i: usize) -> bool {
    box_order(a, i).is_acyclic()
}

/// `ht(1) = inf`, and for `a != 1`, `ht(a) = sup { ht(b) + 1 : b < a }`.
pub fn heights(a: &FiniteGLPAlgebra, i: usize) -> Result<Vec<Height>, AlgebraError> {
    let h = wf_height(&box_order(a, i)).map_err(|_| AlgebraError::NotBoxFounded { level: i })?;
    let top = a.top() as usize;
    Ok(h
        .into_iter()
        .enumerate()
        .map(|(x, n)| if x == top { Height::Infinity } else { Height::Finite(n) })
        .collect())
}

/// A filter of the Boolean reduct, as its member set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Filter {
    pub members: BTreeSet<Elem>,
}

impl Filter {
    pub fn contains(&self, x: Elem) -> bool {
        self.members.contains(&x)
    }

    /// Meet of all members; every finite filter is the up-set of it.
    pub fn generator(&self) -> Elem {
        self.members.iter().fold(Elem::MAX, |acc, &x| acc & x)
    }
}

fn up_set(a: &FiniteGLPAlgebra, g: Elem) -> Filter {
    Filter {
        members: a.elements().filter(|&x| FiniteGLPAlgebra::leq(g, x)).collect(),
    }
}

/// Nonempty, upward closed and closed under meets.
pub fn is_filter(a: &FiniteGLPAlgebra, s: &BTreeSet<Elem>) -> bool {
    if s.is_empty() || s.iter().any(|&x| x > a.top()) {
        return false;
    }
    let g = s.iter().fold(a.top(), |acc, &x| acc & x);
    s.contains(&g) && a.elements().all(|x| s.contains(&x) == FiniteGLPAlgebra::leq(g, x))
}

/// `<S>`: the up-set of the meet of `S`; `<{}> = {1}`.
pub fn generated_filter(a: &FiniteGLPAlgebra, s: &[Elem]) -> Filter {
    up_set(a, s.iter().fold(a.top(), |acc, &x| acc & x))
}

/// `{ x : gamma <= ht(x) }` for the heights at level `i`.
pub fn m_gamma(a: &FiniteGLPAlgebra, i: usize, gamma: u32) -> Result<Filter, AlgebraError> {
    let h = heights(a, i)?;
    Ok(Filter {
        members: a
            .elements()
            .filter(|&x| Height::Finite(gamma) <= h[x as usize])
            .collect(),
    })
}

/// A filter closed under every box.
pub fn is_open_filter(a: &FiniteGLPAlgebra, f: &Filter) -> bool {
    is_filter(a, &f.members)
        && (0..a.levels()).all(|i| f.members.iter().all(|&x| f.contains(a.box_op(i, x))))
}

/// `{ x : [i]x = 1 }`
pub fn box_preimage_of_top(a: &FiniteGLPAlgebra, i: usize) -> BTreeSet<Elem> {
    a.elements().filter(|&x| a.box_op(i, x) == a.top()).collect()
}

/// Packs the bits of `x` selected by `mask` into the low bits.
fn compress(x: Elem, mask: Elem) -> Elem {
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

fn expand(x: Elem, mask: Elem) -> Elem {
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

/// Quotient by an open filter `F`. With `g` the generator of `F`, `x ~ y`
/// iff `x & g = y & g`, so the quotient is the powerset of the atoms in
/// `g`. Returns the quotient and the canonical map, indexed by element.
pub fn quotient(a: &FiniteGLPAlgebra, f: &Filter) -> Result<(FiniteGLPAlgebra, Vec<Elem>), AlgebraError> {
    if !is_filter(a, &f.members) {
        return Err(AlgebraError::NotAFilter);
    }
    for i in 0..a.levels() {
        if let Some(&x) = f.members.iter().find(|&&x| !f.contains(a.box_op(i, x))) {
            return Err(AlgebraError::NotOpen { level: i, x });
        }
    }
    let g = f.generator() & a.top();
    let atoms: Vec<String> = (0..a.n_atoms())
        .filter(|&k| g >> k & 1 == 1)
        .map(|k| a.atoms[k].clone())
        .collect();
    let map: Vec<Elem> = a.elements().map(|x| compress(x & g, g)).collect();
    let size = 1usize << atoms.len();
    let boxes = (0..a.levels())
        .map(|i| (0..size as Elem).map(|y| map[a.box_op(i, expand(y, g)) as usize]).collect())
        .collect();
    let q = FiniteGLPAlgebra::with_limit(atoms, boxes, HARD_MAX_ATOMS)?;
    Ok((q, map))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsequenceMode {
    Local,
    Global,
    Glocal,
}

/// Algebraic consequence at one valuation.
///
/// * glocal: if `[0]v(s) = 1` for every `s` in `sigma`, then
///   `v(phi)` is in the filter generated by `v(gamma)`;
/// * local: glocal with empty `sigma`;
/// * global: if `v(g) = 1` for every `g` in `gamma`, then `v(phi) = 1`.
pub fn alg_consequence_check(
    a: &FiniteGLPAlgebra,
    v: &Valuation,
    sigma: &FormulaSet,
    gamma: &FormulaSet,
    phi: &Formula,
    mode: ConsequenceMode,
) -> Result<bool, AlgebraError> {
    if !is_box_founded(a, 0) {
        return Err(AlgebraError::NotBoxFounded { level: 0 });
    }
    let top = a.top();
    let val = a.evaluate(v, phi)?;
    let gammas = gamma.iter().map(|g| a.evaluate(v, g)).collect::<Result<Vec<_>, _>>()?;
    match mode {
        ConsequenceMode::Global => Ok(gammas.iter().any(|&g| g != top) || val == top),
        ConsequenceMode::Local | ConsequenceMode::Glocal => {
            if mode == ConsequenceMode::Glocal {
                for s in sigma.iter() {
                    if a.box_op(0, a.evaluate(v, s)?) != top {
                        return Ok(true);
                    }
                }
            }
            Ok(generated_filter(a, &gammas).contains(val))
        }
    }
}

/// The single-level algebra of a finite strict order: `[]V` is the set of
/// points all of whose successors lie in `V`. `succ[w]` is a bitmask.
pub fn kripke_algebra(succ: &[Elem]) -> FiniteGLPAlgebra {
    let n = succ.len();
    let table = (0..1usize << n)
        .map(|v| {
            (0..n)
                .filter(|&w| succ[w] & !(v as Elem) == 0)
                .fold(0, |acc, w| acc | 1 << w)
        })
        .collect();
    FiniteGLPAlgebra::with_limit((0..n).map(|i| i.to_string()).collect(), vec![table], HARD_MAX_ATOMS)
        .expect("table has the carrier size")
}

/// Every strict partial order on `n` labelled points, as successor masks.
pub fn strict_orders(n: usize) -> Vec<Vec<Elem>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut succ = vec![0 as Elem; n];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                succ[i] |= 1 << j;
            }
        }
        let transitive = (0..n).all(|i| {
            (0..n)
                .filter(|&j| succ[i] >> j & 1 == 1)
                .all(|j| succ[j] & !succ[i] == 0)
        });
        let irreflexive = (0..n).all(|i| succ[i] >> i & 1 == 0);
        if transitive && irreflexive {
            out.push(succ);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fml;

    /// x = atom 0 sees y = atom 1.
    fn chain() -> FiniteGLPAlgebra {
        kripke_algebra(&[0b10, 0b00])
    }

    #[test]
    fn chain_table() {
        assert_eq!(chain().boxes()[0], vec![0b10, 0b10, 0b11, 0b11]);
        assert!(check_magari(2, &chain().boxes()[0]).is_ok());
    }

    #[test]
    fn magari_identities() {
        assert!(check_magari(2, &[3, 3, 3, 3]).is_ok());
        assert!(matches!(
            check_magari(2, &[0, 1, 2, 3]),
            Err(AlgebraViolation::Lob { .. })
        ));
    }

    #[test]
    fn glp_conditions() {
        let k = chain().boxes()[0].clone();
        let good = FiniteGLPAlgebra::numbered(2, vec![k.clone(), vec![3; 4]]).unwrap();
        assert!(check_glp(&good).is_ok());
        let bad = FiniteGLPAlgebra::numbered(2, vec![vec![3; 4], k.clone()]).unwrap();
        assert!(matches!(check_glp(&bad), Err(AlgebraViolation::BoxUp { level: 0, .. })));
        let single = FiniteGLPAlgebra::numbered(2, vec![k]).unwrap();
        assert!(check_glp(&single).is_ok());
    }

    #[test]
    fn founded_and_heights() {
        let a = chain();
        assert!(is_box_founded(&a, 0));
        let h = heights(&a, 0).unwrap();
        assert_eq!(
            h,
            vec![Height::Finite(0), Height::Finite(0), Height::Finite(1), Height::Infinity]
        );
        let constant = FiniteGLPAlgebra::numbered(2, vec![vec![3; 4]]).unwrap();
        let h = heights(&constant, 0).unwrap();
        assert_eq!(&h[..3], &[Height::Finite(0); 3]);
        let corrupt = FiniteGLPAlgebra::numbered(1, vec![vec![0, 1]]).unwrap();
        assert!(!is_box_founded(&corrupt, 0));
        assert!(check_magari(1, &corrupt.boxes()[0]).is_err());
        let trivial = FiniteGLPAlgebra::numbered(0, vec![vec![0]]).unwrap();
        assert!(is_box_founded(&trivial, 0));
        assert_eq!(heights(&trivial, 0).unwrap(), vec![Height::Infinity]);
    }

    #[test]
    fn filters_and_quotient() {
        let a = chain();
        assert_eq!(generated_filter(&a, &[0b01]).members, [0b01, 0b11].into_iter().collect());
        let m1 = m_gamma(&a, 0, 1).unwrap();
        assert_eq!(m1.members, [0b10, 0b11].into_iter().collect());
        assert!(is_open_filter(&a, &m1));
        let (q, map) = quotient(&a, &m1).unwrap();
        assert_eq!(q.n_atoms(), 1);
        assert_eq!(q.box_op(0, 0), q.top());
        assert_eq!(map, vec![0, 0, 1, 1]);
        let (same, _) = quotient(&a, &generated_filter(&a, &[])).unwrap();
        assert_eq!(same.boxes(), a.boxes());
        let all = Filter {
            members: a.elements().collect(),
        };
        let (one, _) = quotient(&a, &all).unwrap();
        assert_eq!(one.size(), 1);
        let not_open = generated_filter(&a, &[0b01]);
        assert!(matches!(quotient(&a, &not_open), Err(AlgebraError::NotOpen { .. })));
    }

    #[test]
    fn evaluation() {
        let a = chain();
        let v: Valuation = [("p".to_string(), 0b01)].into_iter().collect();
        assert_eq!(a.evaluate(&v, &fml("[0]p")).unwrap(), 0b10);
        assert_eq!(a.evaluate(&v, &fml("F")).unwrap(), 0);
        for p in a.elements() {
            let v: Valuation = [("p".to_string(), p)].into_iter().collect();
            assert_eq!(a.evaluate(&v, &fml("[0]([0]p -> p) -> [0]p")).unwrap(), a.top());
        }
        assert!(a.evaluate(&v, &fml("q")).is_err());
    }

    #[test]
    fn consequence() {
        let a = chain();
        let set = |t: &[&str]| t.iter().map(|s| fml(s)).collect::<FormulaSet>();
        let v: Valuation = [("p".to_string(), 0b10)].into_iter().collect();
        let none = FormulaSet::new();
        assert!(alg_consequence_check(&a, &v, &none, &set(&["p"]), &fml("p"), ConsequenceMode::Local).unwrap());
        assert!(alg_consequence_check(&a, &v, &set(&["p"]), &none, &fml("[0]p"), ConsequenceMode::Glocal).unwrap());
        assert!(!alg_consequence_check(&a, &v, &none, &none, &fml("p"), ConsequenceMode::Local).unwrap());
        let v1: Valuation = [("p".to_string(), 0b11)].into_iter().collect();
        assert!(alg_consequence_check(&a, &v1, &none, &set(&["p"]), &fml("[0]p"), ConsequenceMode::Global).unwrap());
    }

    #[test]
    fn order_counts() {
        let counts: Vec<usize> = (0..=4).map(|n| strict_orders(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 19, 219]);
    }
}
