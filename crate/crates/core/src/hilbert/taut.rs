//! Propositional validity over modal atoms, by bit-parallel truth table.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::Formula;

/// Default cap on the number of distinct modal atoms a truth table may range over.
pub const DEFAULT_ATOM_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("formula has {atoms} modal atoms, above the limit of {limit}")]
pub struct AtomLimitExceeded {
    pub atoms: usize,
    pub limit: usize,
}

enum Op {
    Bot,
    Atom(usize),
    Imp(usize, usize),
}

/// A formula flattened into a straight-line program over its modal atoms,
/// with shared subformulas evaluated once.
struct Program {
    ops: Vec<Op>,
    atoms: usize,
}

impl Program {
    fn compile(f: &Formula) -> Program {
        let mut slots: HashMap<&Formula, usize> = HashMap::new();
        let mut atoms: HashMap<&Formula, usize> = HashMap::new();
        let mut ops = Vec::new();
        Self::emit(f, &mut slots, &mut atoms, &mut ops);
        Program {
            ops,
            atoms: atoms.len(),
        }
    }

    fn emit<'f>(
        f: &'f Formula,
        slots: &mut HashMap<&'f Formula, usize>,
        atoms: &mut HashMap<&'f Formula, usize>,
        ops: &mut Vec<Op>,
    ) -> usize {
        if let Some(&slot) = slots.get(f) {
            return slot;
        }
        let op = match f {
            Formula::Bot => Op::Bot,
            Formula::Var(_) | Formula::Box(..) => {
                let next = atoms.len();
                Op::Atom(*atoms.entry(f).or_insert(next))
            }
            Formula::Imp(a, b) => {
                let a = Self::emit(a, slots, atoms, ops);
                let b = Self::emit(b, slots, atoms, ops);
                Op::Imp(a, b)
            }
        };
        ops.push(op);
        let slot = ops.len() - 1;
        slots.insert(f, slot);
        slot
    }

    fn valid(&self) -> bool {
        // Atoms 0..6 vary inside a 64-bit word; the rest select the word.
        const LANES: [u64; 6] = [
            0xAAAA_AAAA_AAAA_AAAA,
            0xCCCC_CCCC_CCCC_CCCC,
            0xF0F0_F0F0_F0F0_F0F0,
            0xFF00_FF00_FF00_FF00,
            0xFFFF_0000_FFFF_0000,
            0xFFFF_FFFF_0000_0000,
        ];
        let inner = self.atoms.min(6);
        let live: u64 = if inner == 6 { !0 } else { (1u64 << (1 << inner)) - 1 };
        let words = 1u64 << self.atoms.saturating_sub(6);
        let mut vals = vec![0u64; self.ops.len()];
        for w in 0..words {
            for (k, op) in self.ops.iter().enumerate() {
                vals[k] = match *op {
                    Op::Bot => 0,
                    Op::Atom(a) if a < 6 => LANES[a],
                    Op::Atom(a) => {
                        if (w >> (a - 6)) & 1 == 1 {
                            !0
                        } else {
                            0
                        }
                    }
                    Op::Imp(x, y) => !vals[x] | vals[y],
                };
            }
            if vals.last().copied().unwrap_or(0) & live != live {
                return false;
            }
        }
        true
    }
}

/// Is `f` true under every assignment to its modal atoms?
pub fn is_tautology(f: &Formula) -> Result<bool, AtomLimitExceeded> {
    is_tautology_with_limit(f, DEFAULT_ATOM_LIMIT)
}

pub fn is_tautology_with_limit(f: &Formula, limit: usize) -> Result<bool, AtomLimitExceeded> {
    let program = Program::compile(f);
    if program.atoms > limit {
        return Err(AtomLimitExceeded {
            atoms: program.atoms,
            limit,
        });
    }
    Ok(program.valid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::fml;

    /// Naive oracle: enumerate assignments one at a time.
    fn brute(f: &Formula) -> bool {
        let atoms: Vec<Formula> = f.modal_atoms().into_iter().collect();
        fn eval(f: &Formula, atoms: &[Formula], bits: u64) -> bool {
            match f {
                Formula::Bot => false,
                Formula::Imp(a, b) => !eval(a, atoms, bits) || eval(b, atoms, bits),
                _ => {
                    let k = atoms.iter().position(|x| x == f).unwrap();
                    bits >> k & 1 == 1
                }
            }
        }
        (0..1u64 << atoms.len()).all(|bits| eval(f, &atoms, bits))
    }

    #[test]
    fn known_verdicts() {
        assert!(is_tautology(&fml("[0]p -> [0]p")).unwrap());
        assert!(!is_tautology(&fml("p -> q")).unwrap());
        assert!(is_tautology(&fml("([0]p & ([0]p -> q)) -> q")).unwrap());
    }

    #[test]
    fn constants() {
        assert!(is_tautology(&fml("T")).unwrap());
        assert!(!is_tautology(&fml("F")).unwrap());
        assert!(is_tautology(&fml("F -> p")).unwrap());
    }

    #[test]
    fn many_atoms_cross_word_boundary() {
        // (a1 & ... & a8) -> a8 is valid, (a1 | ... ) -> a8 is not.
        let names: Vec<String> = (1..=8).map(|i| format!("a{i}")).collect();
        let vars: Vec<Formula> = names.iter().map(|n| Formula::var(n)).collect();
        let all = Formula::conj(vars.clone());
        assert!(is_tautology(&Formula::imp(all, vars[7].clone())).unwrap());
        let any = vars[..7]
            .iter()
            .cloned()
            .reduce(Formula::or)
            .unwrap();
        assert!(!is_tautology(&Formula::imp(any, vars[7].clone())).unwrap());
    }

    #[test]
    fn limit_is_enforced() {
        let f = fml("(p -> q) -> (r -> s)");
        assert_eq!(
            is_tautology_with_limit(&f, 3),
            Err(AtomLimitExceeded { atoms: 4, limit: 3 })
        );
        assert!(is_tautology_with_limit(&f, 4).is_ok());
    }

    #[test]
    fn agrees_with_brute_force() {
        for text in [
            "((p -> q) -> p) -> p",
            "(p -> q) -> (~q -> ~p)",
            "[0]p | ~[0]p",
            "(p & [1]q) -> ([1]q & p)",
            "(p -> (q -> r)) -> ((p -> q) -> (p -> r))",
            "(a -> b) -> ((b -> c) -> (a -> c))",
            "(a | (b | c)) -> ((a & b) -> c)",
        ] {
            let f = fml(text);
            assert_eq!(is_tautology(&f).unwrap(), brute(&f), "{text}");
        }
    }
}
