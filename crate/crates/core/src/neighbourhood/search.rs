use std::collections::BTreeSet;

use crate::algebra::{Elem, Valuation};
use crate::formula::{Formula, FormulaSet};

use super::{eval_in, full, scattered_topologies, space_to_frame, FiniteGLPSpace, FiniteTopology, Model, NeighbourhoodError, SemMode};

/// Default cap on the estimated number of (space, valuation, world)
/// evaluations of one search.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

/// Labelled partial orders on `n` points, i.e. scattered topologies.
const SCATTERED_COUNTS: [u128; 6] = [1, 1, 3, 19, 219, 4231];

/// `GLPK_BUDGET` if set to a number, else [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> u128 {
    std::env::var("GLPK_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_points: usize,
    /// Explicit topologies per space; higher ones are discrete.
    pub max_levels: usize,
    pub budget: u128,
}

impl SearchBounds {
    pub fn new(max_points: usize, max_levels: usize) -> Self {
        SearchBounds {
            max_points,
            max_levels,
            budget: budget_from_env(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Countermodel {
    pub model: Model,
    pub world: usize,
    /// The 0-neighbourhood, for the starred glocal relation.
    pub nbhd: Option<Elem>,
}

/// GLP-spaces on `n` points with exactly `levels` explicit topologies, in
/// increasing order of their lists of open sets.
pub fn glp_spaces(n: usize, levels: usize) -> Vec<FiniteGLPSpace> {
    let cands = scattered_topologies(n);
    let mut out = Vec::new();
    let mut stack: Vec<FiniteTopology> = Vec::new();
    extend(&cands, levels, &mut stack, &mut out);
    out
}

fn extend(cands: &[FiniteTopology], levels: usize, stack: &mut Vec<FiniteTopology>, out: &mut Vec<FiniteGLPSpace>) {
    if stack.len() == levels {
        let n = cands.first().map_or(0, FiniteTopology::points);
        let s = FiniteGLPSpace::new((0..n).map(|i| i.to_string()).collect(), stack.clone()).expect("same carrier");
        out.push(s);
        return;
    }
    for t in cands {
        let fits = match stack.last() {
            None => true,
            Some(lo) => lo.is_subtopology_of(t) && (0..=lo.carrier()).all(|v| t.is_open(lo.d_unchecked(v))),
        };
        if fits {
            stack.push(t.clone());
            extend(cands, levels, stack, out);
            stack.pop();
        }
    }
}

fn estimate(bounds: &SearchBounds, vars: usize, mode: SemMode) -> u128 {
    let mut total: u128 = 0;
    for n in 1..=bounds.max_points {
        let spaces = SCATTERED_COUNTS[n].saturating_pow(bounds.max_levels as u32);
        let vals = 1u128.checked_shl((n * vars) as u32).unwrap_or(u128::MAX);
        let worlds = match mode {
            SemMode::GlocalStar(_) => (n as u128) << n,
            _ => n as u128,
        };
        total = total.saturating_add(spaces.saturating_mul(vals).saturating_mul(worlds));
    }
    total
}

/// Searches spaces with `1..=max_points` points in increasing size, then in
/// [`glp_spaces`] order, valuations over the variables of the instance
/// (the `k`-th variable in sorted order occupying bits `k*n ..`), worlds in
/// increasing order and, for `GlocalStar`, 0-open neighbourhoods in
/// increasing order. The set carried by `GlocalStar` is ignored. Returns the
/// first world falsifying the consequence; for `Global` this is the first
/// world where `phi` fails in a model of `gamma`.
pub fn search_countermodel(
    sigma: &FormulaSet,
    gamma: &FormulaSet,
    phi: &Formula,
    mode: SemMode,
    bounds: &SearchBounds,
) -> Result<Option<Countermodel>, NeighbourhoodError> {
    if bounds.max_points == 0 || bounds.max_levels == 0 {
        return Err(NeighbourhoodError::BoundTooSmall);
    }
    let limit = SCATTERED_COUNTS.len() - 1;
    if bounds.max_points > limit {
        return Err(NeighbourhoodError::BoundTooLarge { limit });
    }
    let mut vars: BTreeSet<String> = phi.vars().iter().map(|v| v.to_string()).collect();
    for f in sigma.iter().chain(gamma.iter()) {
        vars.extend(f.vars().iter().map(|v| v.to_string()));
    }
    let vars: Vec<String> = vars.into_iter().collect();
    let needed = estimate(bounds, vars.len(), mode);
    if needed > bounds.budget {
        return Err(NeighbourhoodError::BudgetExceeded {
            needed,
            budget: bounds.budget,
        });
    }
    for n in 1..=bounds.max_points {
        let top = full(n);
        for space in glp_spaces(n, bounds.max_levels) {
            let frame = space_to_frame(&space);
            let t0 = space.topology(0);
            for code in 0u64..1 << (n * vars.len()) {
                let val: Valuation = vars
                    .iter()
                    .enumerate()
                    .map(|(k, v)| (v.clone(), (code >> (k * n)) as Elem & top))
                    .collect();
                let ev = |f: &Formula| eval_in(&frame, &val, f);
                let gam = gamma.iter().fold(top, |acc, g| acc & ev(g));
                let sig = sigma.iter().fold(top, |acc, s| acc & ev(s));
                let ph = ev(phi);
                let hit = |world: usize, nbhd: Option<Elem>| {
                    let model = Model::new(space.clone(), val.clone()).expect("valuation in range");
                    Some(Countermodel { model, world, nbhd })
                };
                match mode {
                    SemMode::Global => {
                        if gam == top && ph != top {
                            return Ok(hit((ph ^ top).trailing_zeros() as usize, None));
                        }
                    }
                    SemMode::Local => {
                        if let Some(x) = (0..n).find(|&x| gam >> x & 1 == 1 && ph >> x & 1 == 0) {
                            return Ok(hit(x, None));
                        }
                    }
                    SemMode::Glocal => {
                        for x in (0..n).filter(|&x| gam >> x & 1 == 1 && ph >> x & 1 == 0) {
                            if top & !(1 << x) & !sig == 0 {
                                return Ok(hit(x, None));
                            }
                        }
                    }
                    SemMode::GlocalStar(_) => {
                        for x in (0..n).filter(|&x| gam >> x & 1 == 1 && ph >> x & 1 == 0) {
                            for &u in t0.opens().iter().filter(|&&u| u >> x & 1 == 1) {
                                if u & !(1 << x) & !sig == 0 {
                                    return Ok(hit(x, Some(u)));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fml;
    use crate::neighbourhood::sem_consequence_check;

    fn set(t: &[&str]) -> FormulaSet {
        t.iter().map(|s| fml(s)).collect()
    }

    fn bounds(p: usize) -> SearchBounds {
        SearchBounds {
            max_points: p,
            max_levels: 2,
            budget: DEFAULT_BUDGET,
        }
    }

    #[test]
    fn space_counts() {
        assert_eq!(glp_spaces(1, 1).len(), 1);
        assert_eq!(glp_spaces(3, 1).len(), 19);
        for s in glp_spaces(3, 2) {
            assert!(s.check().is_ok());
        }
        let spaces = glp_spaces(3, 2);
        assert!(spaces.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn finds_and_refutes() {
        let none = FormulaSet::new();
        let c = search_countermodel(&none, &none, &fml("p"), SemMode::Local, &bounds(1)).unwrap().unwrap();
        assert_eq!(c.model.valuation()["p"], 0);
        assert!(search_countermodel(&none, &none, &fml("[0]([0]p -> p) -> [0]p"), SemMode::Local, &bounds(3))
            .unwrap()
            .is_none());
        let c = search_countermodel(&none, &set(&["[0]p"]), &fml("p"), SemMode::Local, &bounds(3)).unwrap().unwrap();
        assert!(!sem_consequence_check(&c.model, c.world, &none, &set(&["[0]p"]), &fml("p"), SemMode::Local).unwrap());
        assert!(search_countermodel(&set(&["p"]), &none, &fml("[0]p"), SemMode::Glocal, &bounds(3))
            .unwrap()
            .is_none());
        let c = search_countermodel(&set(&["p"]), &none, &fml("p"), SemMode::GlocalStar(0), &bounds(2)).unwrap().unwrap();
        let u = c.nbhd.unwrap();
        assert!(!sem_consequence_check(&c.model, c.world, &set(&["p"]), &none, &fml("p"), SemMode::GlocalStar(u)).unwrap());
    }

    #[test]
    fn budget() {
        let tight = SearchBounds {
            max_points: 3,
            max_levels: 2,
            budget: 10,
        };
        assert!(matches!(
            search_countermodel(&FormulaSet::new(), &FormulaSet::new(), &fml("p"), SemMode::Local, &tight),
            Err(NeighbourhoodError::BudgetExceeded { .. })
        ));
        assert!(matches!(
            search_countermodel(&FormulaSet::new(), &FormulaSet::new(), &fml("p"), SemMode::Local, &bounds(9)),
            Err(NeighbourhoodError::BoundTooLarge { .. })
        ));
    }
}
