//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use glp_core::algebra::{
    alg_consequence_check, box_preimage_of_top, check_glp, heights, is_box_founded, is_filter, m_gamma, quotient,
    ConsequenceMode, Filter, FiniteGLPAlgebra, Height, Valuation,
};
use glp_core::corpus::{
    cyclic_corpus, glp_algebra_corpus, glp_space_corpus, judgment_corpus, kripke_magari_corpus, random_formula,
};
use glp_core::cyclic::{check_cyclic, classify_cyclic, cyclic_to_hilbert, CyclicDerivation, CyclicRule};
use glp_core::hilbert::check_hilbert;
use glp_core::infinitary::{
    bisimilar, check_omega, inf_to_omega, judge_inf, local_height_inf, local_height_omega, omega_to_inf, ravel,
    slices, unravel, ProofGraph,
};
use glp_core::neighbourhood::{
    all_topologies, frame_to_space, restrict_model, search_countermodel, sem_consequence_check, space_to_frame,
    Model, SearchBounds, SemMode, DEFAULT_BUDGET,
};
use glp_core::proof::{Derivation, NodeId, OmegaLasso, Rule};
use glp_core::{fml, Formula, FormulaSet};

const SEED: u64 = 7;

type Outcome = Result<String, String>;

fn set(items: &[&str]) -> FormulaSet {
    items.iter().map(|s| fml(s)).collect()
}

fn lemma_formula(c: &CyclicDerivation) -> Formula {
    let cls = classify_cyclic(c).expect("valid");
    let boxed: Vec<Formula> = cls.boxed_list().into_iter().map(|f| Formula::boxed(0, f)).collect();
    Formula::imp(
        Formula::and(Formula::conj(cls.local_list()), Formula::conj(boxed)),
        c.conclusion().clone(),
    )
}

fn criterion_1() -> Outcome {
    let c = CyclicDerivation::lob_example(fml("p"));
    check_cyclic(&c).map_err(|e| format!("check_cyclic: {e}"))?;
    let tr = cyclic_to_hilbert(&c).map_err(|e| format!("translation: {e}"))?;
    let j = check_hilbert(&tr.normalized, &FormulaSet::new(), &FormulaSet::new())
        .map_err(|e| format!("check_hilbert: {e}"))?;
    if !tr.normalized.assumptions().is_empty() {
        return Err("translated proof has assumption leaves".into());
    }
    let expected = fml("[0]([0]p -> p) -> p");
    if j.conclusion == expected {
        Ok(format!("conclusion {}", j.conclusion.sugared()))
    } else {
        let refuted = search_countermodel(
            &FormulaSet::new(),
            &FormulaSet::new(),
            &expected,
            SemMode::Local,
            &SearchBounds {
                max_points: 1,
                max_levels: 1,
                budget: DEFAULT_BUDGET,
            },
        )
        .ok()
        .flatten()
        .is_some();
        Err(format!(
            "valid proof concludes {} instead of {}; the expected formula has a one-point countermodel: {}",
            j.conclusion.sugared(),
            expected.sugared(),
            refuted
        ))
    }
}

fn criterion_2() -> Outcome {
    let corpus = cyclic_corpus(SEED, 24);
    for (i, c) in corpus.iter().enumerate() {
        if c.len() > 12 || c.backlinks().len() > 3 {
            return Err(format!("corpus entry {i} exceeds the size bounds"));
        }
        let tr = cyclic_to_hilbert(c).map_err(|e| format!("entry {i}: {e}"))?;
        let j = check_hilbert(&tr.raw, &FormulaSet::new(), &FormulaSet::new())
            .map_err(|e| format!("entry {i}: {e}"))?;
        let expected = lemma_formula(c);
        if j.conclusion != expected {
            return Err(format!(
                "entry {i}: conclusion {} differs from {}",
                j.conclusion.sugared(),
                expected.sugared()
            ));
        }
    }
    let linked = corpus.iter().filter(|c| !c.backlinks().is_empty()).count();
    Ok(format!("{} derivations, {linked} with back-links", corpus.len()))
}

fn criterion_3() -> Outcome {
    let corpus = cyclic_corpus(SEED, 24);
    for (i, c) in corpus.iter().enumerate() {
        let g = unravel(c).map_err(|e| format!("entry {i}: {e}"))?.graph();
        let r = ravel(&g).map_err(|e| format!("entry {i}: ravel: {e}"))?;
        check_cyclic(&r).map_err(|e| format!("entry {i}: raveled proof invalid: {e}"))?;
        if !bisimilar(&ProofGraph::from_cyclic(&r), &ProofGraph::from_cyclic(c)) {
            return Err(format!("entry {i}: ravel is not bisimilar to the original"));
        }
    }
    Ok(format!("{} round trips", corpus.len()))
}

fn find_omega(d: &Derivation) -> Option<&Derivation> {
    if let Rule::Omega(_) = d.rule() {
        return Some(d);
    }
    d.children().into_iter().find_map(find_omega)
}

fn criterion_4() -> Outcome {
    let s = set(&["[0]p -> p"]);
    let r = unravel(&CyclicDerivation::lob_example(fml("p"))).map_err(|e| e.to_string())?;
    let w = inf_to_omega(&r, &s, &s).map_err(|e| e.to_string())?;
    check_omega(&w, &s, &s).map_err(|e| format!("check_omega: {e}"))?;
    let node = find_omega(&w).ok_or("no omega application in the output")?;
    let Rule::Omega(l) = node.rule() else { unreachable!() };
    if l.phi_cycle.len() != 1 || !l.phi_prefix.is_empty() {
        return Err(format!(
            "lasso has prefix {} and period {}",
            l.phi_prefix.len(),
            l.phi_cycle.len()
        ));
    }
    let xi0 = Formula::conj([fml("p"), fml("[0]p"), fml("[0]p -> p")]);
    if node.formula() != &xi0 || slices(&r).xi(0) != &xi0 {
        return Err(format!("xi_0 is {}, expected {}", node.formula().sugared(), xi0.sugared()));
    }
    let back = omega_to_inf(&w).map_err(|e| format!("omega_to_inf: {e}"))?;
    judge_inf(&back, &s, &s).map_err(|e| format!("round trip not covered: {e}"))?;
    Ok(format!("period 1, xi_0 = {}", xi0.sugared()))
}

fn criterion_5() -> Outcome {
    let asm = |t: &str| Derivation::assume(fml(t));
    let ladder = Derivation::omega(
        fml("a"),
        OmegaLasso {
            phi_prefix: vec![fml("b")],
            phi_cycle: vec![fml("c")],
            prem_prefix: vec![asm("[0]b -> a"), asm("[0]c -> b")],
            prem_cycle: vec![asm("[0]c -> c")],
        },
    );
    let inf = omega_to_inf(&ladder).map_err(|e| e.to_string())?;
    let single = Derivation::omega(
        fml("p"),
        OmegaLasso {
            phi_prefix: vec![],
            phi_cycle: vec![fml("p")],
            prem_prefix: vec![],
            prem_cycle: vec![asm("[0]p -> p")],
        },
    );
    let one = CyclicDerivation::from_parts(vec![(fml("p"), CyclicRule::Assumption)], 0);
    let got = (
        local_height_inf(&inf),
        local_height_omega(&single),
        local_height_inf(&unravel(&one).map_err(|e| e.to_string())?),
        local_height_omega(&asm("p")),
    );
    if got == (1, 1, 0, 0) {
        Ok("ladder 1, omega 1, single node 0".into())
    } else {
        Err(format!("heights {got:?}"))
    }
}

/// Heights by value iteration, independent of the library's graph search.
fn oracle_heights(a: &FiniteGLPAlgebra, i: usize) -> Option<Vec<Height>> {
    let top = a.top();
    let mut h = vec![0u32; a.size()];
    for _ in 0..=a.size() {
        let mut changed = false;
        for x in a.elements().filter(|&x| x != top) {
            let best = a
                .elements()
                .filter(|&y| y != top && FiniteGLPAlgebra::leq(a.box_op(i, y), x))
                .map(|y| h[y as usize] + 1)
                .max()
                .unwrap_or(0);
            if best != h[x as usize] {
                h[x as usize] = best;
                changed = true;
            }
        }
        if !changed {
            return Some(
                h.iter()
                    .enumerate()
                    .map(|(x, &n)| if x as u32 == top { Height::Infinity } else { Height::Finite(n) })
                    .collect(),
            );
        }
    }
    None
}

fn algebra_laws(a: &FiniteGLPAlgebra) -> Result<(), String> {
    check_glp(a).map_err(|v| v.to_string())?;
    for i in 0..a.levels() {
        if !is_box_founded(a, i) {
            return Err(format!("level {i} not box-founded"));
        }
        let h = heights(a, i).map_err(|e| e.to_string())?;
        if Some(&h) != oracle_heights(a, i).as_ref() {
            return Err(format!("level {i}: heights differ from the value-iteration oracle"));
        }
        for x in a.elements() {
            for y in a.elements() {
                if h[(x & y) as usize] != h[x as usize].min(h[y as usize]) {
                    return Err(format!("ht(a & b) != min at {x:#b}, {y:#b}"));
                }
            }
            if h[x as usize].succ() > h[a.box_op(i, x) as usize] {
                return Err(format!("ht(a) + 1 > ht([]a) at {x:#b}"));
            }
        }
        let max = h.iter().filter_map(|&v| match v {
            Height::Finite(n) => Some(n),
            Height::Infinity => None,
        });
        for gamma in 0..=max.max().unwrap_or(0) + 1 {
            let m = m_gamma(a, i, gamma).map_err(|e| e.to_string())?;
            if !is_filter(a, &m.members) {
                return Err(format!("M({gamma}) at level {i} is not a filter"));
            }
        }
    }
    let under = box_preimage_of_top(a, 0);
    for g in a.elements() {
        let f = Filter {
            members: a.elements().filter(|&x| FiniteGLPAlgebra::leq(g, x)).collect(),
        };
        let open = (0..a.levels()).all(|i| f.members.iter().all(|&x| f.contains(a.box_op(i, x))));
        if !open || !f.members.is_subset(&under) {
            continue;
        }
        let (q, _) = quotient(a, &f).map_err(|e| e.to_string())?;
        check_glp(&q).map_err(|v| format!("quotient by {g:#b}: {v}"))?;
        if !(0..q.levels()).all(|i| is_box_founded(&q, i)) {
            return Err(format!("quotient by {g:#b} not box-founded"));
        }
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let kripke = kripke_magari_corpus(4);
    let glp = glp_algebra_corpus(3, 2);
    for (k, a) in kripke.iter().chain(&glp).enumerate() {
        algebra_laws(a).map_err(|e| format!("algebra {k}: {e}"))?;
    }
    Ok(format!("{} Kripke levels, {} GLP-algebras", kripke.len(), glp.len()))
}

fn criterion_7() -> Outcome {
    let mut tops = 0;
    for n in 0..=4 {
        for t in all_topologies(n) {
            tops += 1;
            if t.is_scattered() && !t.is_td() {
                return Err(format!("scattered but not T_d: {t}"));
            }
        }
    }
    let spaces = glp_space_corpus(3, 2);
    for s in &spaces {
        let back = frame_to_space(&space_to_frame(s)).map_err(|e| e.to_string())?;
        if &back != s || space_to_frame(&back) != space_to_frame(s) {
            return Err("space/frame round trip changed a space".into());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let nonempty: Vec<_> = spaces.iter().filter(|s| s.n_points() > 0).collect();
    for k in 0..200 {
        let s = nonempty[rng.gen_range(0..nonempty.len())];
        let top = s.carrier();
        let val: Valuation = ["p", "q"].iter().map(|v| (v.to_string(), rng.gen_range(0..=top))).collect();
        let m = Model::new(s.clone(), val).map_err(|e| e.to_string())?;
        let opens = s.topology(0).opens().to_vec();
        let sub = opens[rng.gen_range(0..opens.len())];
        let phi = random_formula(&mut rng, 3, &["p", "q"], 2);
        let r = restrict_model(&m, sub).map_err(|e| e.to_string())?;
        let got = expand(r.eval(&phi), sub);
        if got != sub & m.eval(&phi) {
            return Err(format!("pair {k}: submodel differs on {} at X' = {sub:#b}", phi.sugared()));
        }
    }
    Ok(format!("{tops} topologies, {} spaces, 200 submodel pairs", spaces.len()))
}

fn expand(x: u32, mask: u32) -> u32 {
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

fn valuations(vars: &BTreeSet<String>, size: u32) -> Vec<Valuation> {
    let mut out = vec![Valuation::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|base| {
                (0..size).map(move |x| {
                    let mut b = base.clone();
                    b.insert(v.clone(), x);
                    b
                })
            })
            .collect();
    }
    out
}

fn criterion_8() -> Outcome {
    let judgments = judgment_corpus(&cyclic_corpus(SEED, 24));
    let bounds = SearchBounds {
        max_points: 3,
        max_levels: 2,
        budget: DEFAULT_BUDGET,
    };
    let algebras: Vec<FiniteGLPAlgebra> = kripke_magari_corpus(4).into_iter().chain(glp_algebra_corpus(3, 2)).collect();
    let mut pairs = 0usize;
    for case in &judgments {
        let j = &case.judgment;
        if let Some(cm) = search_countermodel(&j.sigma, &j.gamma, &j.conclusion, SemMode::Glocal, &bounds)
            .map_err(|e| format!("{}: {e}", case.label))?
        {
            return Err(format!("{}: countermodel at world {}", case.label, cm.world));
        }
        let mut vars: BTreeSet<String> = j.conclusion.vars().iter().map(|v| v.to_string()).collect();
        for f in j.sigma.iter().chain(j.gamma.iter()) {
            vars.extend(f.vars().iter().map(|v| v.to_string()));
        }
        for a in &algebras {
            for v in valuations(&vars, a.size() as u32) {
                let boxed_ok = j
                    .sigma
                    .iter()
                    .all(|s| a.box_op(0, a.evaluate(&v, s).expect("bound")) == a.top());
                if !boxed_ok {
                    continue;
                }
                pairs += 1;
                let ok = alg_consequence_check(a, &v, &j.sigma, &j.gamma, &j.conclusion, ConsequenceMode::Glocal)
                    .map_err(|e| e.to_string())?;
                if !ok {
                    return Err(format!("{}: algebraic consequence fails", case.label));
                }
            }
        }
    }
    Ok(format!("{} judgments, {pairs} algebra/valuation pairs", judgments.len()))
}

fn criterion_9() -> Outcome {
    let models: Vec<Model> = glp_space_corpus(3, 2)
        .into_iter()
        .filter(|s| s.n_points() > 0)
        .flat_map(|s| {
            (0..=s.carrier()).map(move |p| {
                let val: Valuation = [("p".to_string(), p)].into_iter().collect();
                Model::new(s.clone(), val).expect("in range")
            })
        })
        .collect();
    let subsets = |items: &[&str]| -> Vec<FormulaSet> {
        (0..1u32 << items.len())
            .map(|m| {
                items
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| m >> k & 1 == 1)
                    .map(|(_, s)| fml(s))
                    .collect()
            })
            .collect()
    };
    let base = ["p", "[0]p -> p"];
    let phis = ["p", "[0]p", "[0]([0]p -> p) -> [0]p"];
    let mut instances = 0;
    let mut disagreements = Vec::new();
    for sigma in subsets(&base) {
        for gamma in subsets(&base) {
            for phi in phis.iter().map(|s| fml(s)) {
                instances += 1;
                let mut plain = true;
                let mut star = true;
                for m in &models {
                    for x in 0..m.space().n_points() {
                        plain &= sem_consequence_check(m, x, &sigma, &gamma, &phi, SemMode::Glocal)
                            .map_err(|e| e.to_string())?;
                        for &u in m.space().topology(0).opens().iter().filter(|&&u| u >> x & 1 == 1) {
                            star &= sem_consequence_check(m, x, &sigma, &gamma, &phi, SemMode::GlocalStar(u))
                                .map_err(|e| e.to_string())?;
                        }
                    }
                }
                if plain != star {
                    disagreements.push(phi.sugared());
                }
            }
        }
    }
    if disagreements.is_empty() {
        Ok(format!("{instances} instances over {} models, 0 disagreements", models.len()))
    } else {
        Err(format!("{} disagreements: {:?}", disagreements.len(), disagreements))
    }
}

fn criterion_10() -> Outcome {
    let p = fml("p");
    let imp = fml("[0]p -> p");
    let no_nec = CyclicDerivation::from_parts(
        vec![
            (p.clone(), CyclicRule::Mp(NodeId(1), NodeId(2))),
            (p.clone(), CyclicRule::Backlink(NodeId(0))),
            (imp.clone(), CyclicRule::Assumption),
        ],
        0,
    );
    let not_ancestor = CyclicDerivation::from_parts(
        vec![
            (p.clone(), CyclicRule::Mp(NodeId(1), NodeId(3))),
            (fml("[0]p"), CyclicRule::Nec(NodeId(2))),
            (p.clone(), CyclicRule::Backlink(NodeId(3))),
            (imp.clone(), CyclicRule::Assumption),
        ],
        0,
    );
    let mismatch = CyclicDerivation::from_parts(
        vec![
            (p.clone(), CyclicRule::Mp(NodeId(1), NodeId(3))),
            (fml("[0]q"), CyclicRule::Nec(NodeId(2))),
            (fml("q"), CyclicRule::Backlink(NodeId(0))),
            (fml("[0]q -> p"), CyclicRule::Assumption),
        ],
        0,
    );
    let asm = |t: &str| Derivation::assume(fml(t));
    let shifted = Derivation::omega(
        fml("a"),
        OmegaLasso {
            phi_prefix: vec![fml("b")],
            phi_cycle: vec![fml("c")],
            prem_prefix: vec![asm("[0]c -> b"), asm("[0]c -> b")],
            prem_cycle: vec![asm("[0]c -> c")],
        },
    );
    let all = set(&["[0]b -> a", "[0]c -> b", "[0]c -> c"]);
    let got = [
        check_cyclic(&no_nec).err().map(|e| e.code()),
        check_cyclic(&not_ancestor).err().map(|e| e.code()),
        check_cyclic(&mismatch).err().map(|e| e.code()),
        check_omega(&shifted, &all, &all).err().map(|e| e.code()),
    ];
    let want = [
        Some("E_BACKLINK_NO_NEC"),
        Some("E_BACKLINK_NOT_ANCESTOR"),
        Some("E_BACKLINK_FORMULA_MISMATCH"),
        Some("E_OMEGA_PATTERN"),
    ];
    if got == want {
        Ok(want.iter().flatten().copied().collect::<Vec<_>>().join(", "))
    } else {
        Err(format!("codes {got:?}, expected {want:?}"))
    }
}

fn main() -> ExitCode {
    let criteria: [(fn() -> Outcome, u64); 10] = [
        (criterion_1, 1),
        (criterion_2, 10),
        (criterion_3, 10),
        (criterion_4, 1),
        (criterion_5, 1),
        (criterion_6, 60),
        (criterion_7, 60),
        (criterion_8, 120),
        (criterion_9, 60),
        (criterion_10, 1),
    ];
    let mut failed = 0;
    for (k, (run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > Duration::from_secs(*limit) => Err(format!("{msg}; took {took:.2?}, limit {limit} s")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {}: PASS ({msg}; {took:.2?})", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL ({msg}; {took:.2?})", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
