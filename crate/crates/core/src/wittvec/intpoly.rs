//! Integer-coefficient polynomials with bit-packed exponent vectors, used to
//! build the universal Witt polynomials.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// How exponent vectors are packed into a `u128`: `bits` bits per variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Layout {
    pub nvars: usize,
    pub bits: u32,
}

impl Layout {
    /// Layout able to hold exponents up to `max_exp` in `nvars` variables.
    pub fn fitting(nvars: usize, max_exp: u64) -> Option<Layout> {
        let bits = (64 - max_exp.leading_zeros()).max(1);
        (bits as usize * nvars <= 128).then_some(Layout { nvars, bits })
    }

    pub fn var(&self, i: usize, e: u64) -> u128 {
        (e as u128) << (self.bits as usize * i)
    }

    pub fn unpack(&self, key: u128) -> Vec<u32> {
        let mask = (1u128 << self.bits) - 1;
        (0..self.nvars)
            .map(|i| ((key >> (self.bits as usize * i)) & mask) as u32)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IntPoly {
    pub terms: HashMap<u128, BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { terms: HashMap::new() }
    }

    pub fn monomial(key: u128, c: BigInt) -> Self {
        let mut terms = HashMap::new();
        if !c.is_zero() {
            terms.insert(key, c);
        }
        IntPoly { terms }
    }

    pub fn one() -> Self {
        Self::monomial(0, BigInt::one())
    }

    pub fn add_assign_scaled(&mut self, other: &IntPoly, c: &BigInt) {
        for (k, v) in &other.terms {
            let e = self.terms.entry(*k).or_insert_with(BigInt::zero);
            *e += v * c;
            if e.is_zero() {
                self.terms.remove(k);
            }
        }
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out: HashMap<u128, BigInt> = HashMap::with_capacity(large.terms.len() * 2);
        for (k1, c1) in &small.terms {
            for (k2, c2) in &large.terms {
                let e = out.entry(k1 + k2).or_insert_with(BigInt::zero);
                *e += c1 * c2;
            }
        }
        out.retain(|_, c| !c.is_zero());
        IntPoly { terms: out }
    }

    pub fn pow(&self, mut e: u64) -> IntPoly {
        let mut acc = IntPoly::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact division by `d`; `None` if some coefficient is not divisible.
    pub fn div_exact(&self, d: &BigInt) -> Option<IntPoly> {
        let mut out = HashMap::with_capacity(self.terms.len());
        for (k, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            out.insert(*k, q);
        }
        Some(IntPoly { terms: out })
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    /// Terms as `(exponents, coefficient)`, sorted by exponent vector.
    pub fn to_sorted(&self, layout: &Layout) -> Vec<(Vec<u32>, BigInt)> {
        let mut v: Vec<(Vec<u32>, BigInt)> = self
            .terms
            .iter()
            .map(|(k, c)| (layout.unpack(*k), c.clone()))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_expansion() {
        let l = Layout::fitting(2, 8).unwrap();
        let mut s = IntPoly::monomial(l.var(0, 1), BigInt::one());
        s.add_assign_scaled(&IntPoly::monomial(l.var(1, 1), BigInt::one()), &BigInt::one());
        let cube = s.pow(3);
        assert_eq!(cube.terms.len(), 4);
        assert_eq!(cube.terms[&(l.var(0, 1) + l.var(1, 2))], BigInt::from(3));
        assert!(cube.div_exact(&BigInt::from(3)).is_none());
    }
}
