//! Well-founded heights on finite digraphs, and the box order of an algebra.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// A height: a natural number or the top marker `inf`, with `inf + 1 = inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Height {
    Finite(u32),
    Infinity,
}

impl Height {
    pub fn succ(self) -> Height {
        match self {
            Height::Finite(n) => Height::Finite(n + 1),
            Height::Infinity => Height::Infinity,
        }
    }
}

impl PartialOrd for Height {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Height {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Height::Finite(a), Height::Finite(b)) => a.cmp(b),
            (Height::Finite(_), Height::Infinity) => Ordering::Less,
            (Height::Infinity, Height::Finite(_)) => Ordering::Greater,
            (Height::Infinity, Height::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(n) => write!(f, "{n}"),
            Height::Infinity => f.write_str("inf"),
        }
    }
}

/// `below[a]` lists every `b` with `b < a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    pub below: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("relation has a cycle through node {0}")]
pub struct CyclicRelation(pub usize);

impl Digraph {
    pub fn new(n: usize) -> Digraph {
        Digraph {
            below: vec![Vec::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.below.len()
    }

    pub fn is_empty(&self) -> bool {
        self.below.is_empty()
    }

    pub fn add(&mut self, lower: usize, upper: usize) {
        self.below[upper].push(lower);
    }

    pub fn chain(n: usize) -> Digraph {
        let mut g = Digraph::new(n);
        for a in 0..n {
            for b in 0..a {
                g.add(b, a);
            }
        }
        g
    }

    pub fn is_acyclic(&self) -> bool {
        wf_height(self).is_ok()
    }
}

/// `ht(a) = sup { ht(b) + 1 : b < a }`, with `sup {} = 0`.
pub fn wf_height(g: &Digraph) -> Result<Vec<u32>, CyclicRelation> {
    let n = g.len();
    let mut height = vec![0u32; n];
    // 0 unvisited, 1 on stack, 2 done
    let mut state = vec![0u8; n];
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state[start] = 1;
        while let Some(&mut (v, ref mut k)) = stack.last_mut() {
            if let Some(&b) = g.below[v].get(*k) {
                *k += 1;
                match state[b] {
                    0 => {
                        state[b] = 1;
                        stack.push((b, 0));
                    }
                    1 => return Err(CyclicRelation(b)),
                    _ => {}
                }
            } else {
                height[v] = g.below[v].iter().map(|&b| height[b] + 1).max().unwrap_or(0);
                state[v] = 2;
                stack.pop();
            }
        }
    }
    Ok(height)
}

/// Componentwise order on pairs; node `(x, y)` is `x * g2.len() + y`.
pub fn product_wf(g1: &Digraph, g2: &Digraph) -> Digraph {
    let n2 = g2.len();
    let mut g = Digraph::new(g1.len() * n2);
    for c1 in 0..g1.len() {
        for c2 in 0..n2 {
            for &b1 in &g1.below[c1] {
                for &b2 in &g2.below[c2] {
                    g.add(b1 * n2 + b2, c1 * n2 + c2);
                }
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heights() {
        assert_eq!(wf_height(&Digraph::new(3)).unwrap(), vec![0, 0, 0]);
        assert_eq!(wf_height(&Digraph::chain(3)).unwrap(), vec![0, 1, 2]);
        let p = product_wf(&Digraph::chain(3), &Digraph::chain(2));
        let h = wf_height(&p).unwrap();
        assert_eq!(h[2 * 2 + 1], 1);
        let mut cyc = Digraph::new(2);
        cyc.add(0, 1);
        cyc.add(1, 0);
        assert!(wf_height(&cyc).is_err());
    }

    #[test]
    fn infinity_absorbs() {
        assert_eq!(Height::Infinity.succ(), Height::Infinity);
        assert!(Height::Finite(7) < Height::Infinity);
        assert_eq!(Height::Finite(2).min(Height::Infinity), Height::Finite(2));
    }
}
