//! Proof-building combinators. Every function returns a derivation that
//! `check_hilbert` accepts with exactly the stated conclusion.

use crate::error::BuildError;
use crate::formula::Formula;
use crate::proof::Derivation;

use super::is_tautology;

/// A single axiom-(i) leaf; fails if `goal` is not a tautology.
pub fn taut_leaf(goal: Formula) -> Result<Derivation, BuildError> {
    if is_tautology(&goal)? {
        Ok(Derivation::axiom(goal))
    } else {
        Err(BuildError::NotTautological(goal))
    }
}

/// Derives `goal` from the conclusions `c1, ..., cn` of `premises` through
/// the tautology `c1 -> (c2 -> ... -> (cn -> goal))` and `n` modus ponens steps.
pub fn build_by_taut(goal: Formula, premises: Vec<Derivation>) -> Result<Derivation, BuildError> {
    let curried = premises
        .iter()
        .rev()
        .fold(goal.clone(), |acc, p| Formula::imp(p.formula().clone(), acc));
    let mut d = taut_leaf(curried).map_err(|e| match e {
        BuildError::NotTautological(_) => BuildError::NotTautological(goal),
        other => other,
    })?;
    for p in premises {
        d = Derivation::mp(p, d)?;
    }
    Ok(d)
}

/// From a derivation of `a`, a derivation of `[i]a`: `nec`, then the
/// axiom-(v) chain `[0]a -> [1]a -> ... -> [i]a`.
pub fn box_nec(d: Derivation, i: u32) -> Result<Derivation, BuildError> {
    let body = d.formula().clone();
    let mut out = Derivation::nec(d);
    for j in 0..i {
        let up = Derivation::axiom(Formula::imp(
            Formula::boxed(j, body.clone()),
            Formula::boxed(j + 1, body.clone()),
        ));
        out = Derivation::mp(out, up)?;
    }
    Ok(out)
}

/// From an assumption-free derivation of `a -> b`, a derivation of
/// `[i]a -> [i]b`. For `i > 0` the boxed implication is reached through
/// [`box_nec`] before distributing.
pub fn build_box_mono(d: Derivation, i: u32) -> Result<Derivation, BuildError> {
    if !d.assumptions().is_empty() {
        return Err(BuildError::HasAssumptions);
    }
    let (a, b) = d
        .formula()
        .as_imp()
        .map(|(a, b)| (a.clone(), b.clone()))
        .ok_or_else(|| BuildError::NotImplication(d.formula().clone()))?;
    let boxed_imp = box_nec(d, i)?;
    let k = Derivation::axiom(Formula::imp(
        boxed_imp.formula().clone(),
        Formula::imp(Formula::boxed(i, a), Formula::boxed(i, b)),
    ));
    Derivation::mp(boxed_imp, k)
}

/// Assumption-free derivation of `[i]a1 & ... & [i]an -> [i](a1 & ... & an)`
/// with both conjunctions right-nested in the given order.
pub fn box_conj_intro(items: &[Formula], i: u32) -> Result<Derivation, BuildError> {
    let boxed = |f: &Formula| Formula::boxed(i, f.clone());
    match items {
        [] => {
            let top = box_nec(taut_leaf(Formula::top())?, i)?;
            build_by_taut(Formula::imp(Formula::top(), Formula::boxed(i, Formula::top())), vec![top])
        }
        [a] => taut_leaf(Formula::imp(boxed(a), boxed(a))),
        [a, rest @ ..] => {
            let tail = box_conj_intro(rest, i)?;
            let c = Formula::conj(rest.iter().cloned());
            let both = Formula::and(a.clone(), c.clone());
            let pair = taut_leaf(Formula::imp(a.clone(), Formula::imp(c.clone(), both.clone())))?;
            let mono = build_box_mono(pair, i)?;
            let k = Derivation::axiom(Formula::imp(
                Formula::boxed(i, Formula::imp(c.clone(), both.clone())),
                Formula::imp(boxed(&c), boxed(&both)),
            ));
            let lhs = Formula::conj(items.iter().map(boxed).collect::<Vec<_>>());
            build_by_taut(Formula::imp(lhs, boxed(&both)), vec![tail, mono, k])
        }
    }
}

/// Assumption-free derivation of `[i]f -> [i][i]f`, via Löb's axiom applied
/// to `f & [i]f`.
pub fn build_transitivity(f: &Formula, i: u32) -> Result<Derivation, BuildError> {
    let bf = Formula::boxed(i, f.clone());
    let a = Formula::and(f.clone(), bf.clone());
    let ba = Formula::boxed(i, a.clone());
    // [i]a -> [i]f
    let p1 = build_box_mono(taut_leaf(Formula::imp(a.clone(), f.clone()))?, i)?;
    // f -> ([i]a -> a)
    let step = Formula::imp(ba.clone(), a.clone());
    let p2 = build_by_taut(Formula::imp(f.clone(), step.clone()), vec![p1])?;
    // [i]f -> [i]([i]a -> a)
    let p3 = build_box_mono(p2, i)?;
    let p4 = Derivation::axiom(Formula::imp(Formula::boxed(i, step), ba.clone()));
    // [i]a -> [i][i]f
    let p5 = build_box_mono(taut_leaf(Formula::imp(a, bf.clone()))?, i)?;
    build_by_taut(Formula::imp(bf.clone(), Formula::boxed(i, bf)), vec![p3, p4, p5])
}
