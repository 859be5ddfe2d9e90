use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Monomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Lex,
    Grevlex,
    /// Grevlex on the first `split` (permuted) positions, ties broken by
    /// grevlex on the rest. Any monomial involving the first block beats
    /// every monomial in the second block alone.
    Block { split: usize },
}

/// A monomial order, optionally acting on a permutation of the variables.
///
/// `perm[k]` is the variable occupying position `k`; position 0 is the most
/// significant for lex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TermOrder {
    pub kind: OrderKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perm: Option<Vec<usize>>,
}

impl Default for TermOrder {
    fn default() -> Self {
        TermOrder::grevlex()
    }
}

impl fmt::Display for TermOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            OrderKind::Lex => write!(f, "lex")?,
            OrderKind::Grevlex => write!(f, "grevlex")?,
            OrderKind::Block { split } => write!(f, "block({split})")?,
        }
        if let Some(p) = &self.perm {
            write!(f, "{p:?}")?;
        }
        Ok(())
    }
}

impl TermOrder {
    pub fn lex() -> Self {
        TermOrder { kind: OrderKind::Lex, perm: None }
    }

    pub fn grevlex() -> Self {
        TermOrder { kind: OrderKind::Grevlex, perm: None }
    }

    pub fn with_perm(mut self, perm: Vec<usize>) -> Self {
        self.perm = Some(perm);
        self
    }

    /// Block order in which the variables of `eliminate` form the first block.
    pub fn elimination(num_vars: usize, eliminate: &[usize]) -> Self {
        let mut perm: Vec<usize> = eliminate.to_vec();
        perm.sort_unstable();
        perm.dedup();
        let split = perm.len();
        perm.extend((0..num_vars).filter(|v| !eliminate.contains(v)));
        TermOrder {
            kind: OrderKind::Block { split },
            perm: Some(perm),
        }
    }

    fn exp_at(&self, m: &Monomial, pos: usize) -> u32 {
        match &self.perm {
            Some(p) => m.exps()[p[pos]],
            None => m.exps()[pos],
        }
    }

    fn grevlex_range(&self, a: &Monomial, b: &Monomial, lo: usize, hi: usize) -> Ordering {
        let da: u32 = (lo..hi).map(|k| self.exp_at(a, k)).sum();
        let db: u32 = (lo..hi).map(|k| self.exp_at(b, k)).sum();
        if da != db {
            return da.cmp(&db);
        }
        for k in (lo..hi).rev() {
            let (x, y) = (self.exp_at(a, k), self.exp_at(b, k));
            if x != y {
                return y.cmp(&x);
            }
        }
        Ordering::Equal
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let n = a.exps().len();
        debug_assert_eq!(n, b.exps().len());
        match self.kind {
            OrderKind::Lex => {
                for k in 0..n {
                    let (x, y) = (self.exp_at(a, k), self.exp_at(b, k));
                    if x != y {
                        return x.cmp(&y);
                    }
                }
                Ordering::Equal
            }
            OrderKind::Grevlex => self.grevlex_range(a, b, 0, n),
            OrderKind::Block { split } => {
                let split = split.min(n);
                self.grevlex_range(a, b, 0, split)
                    .then_with(|| self.grevlex_range(a, b, split, n))
            }
        }
    }
}
