//! Truncated p-typical Witt vectors `W_r(A)` over presented `F_p`-algebras,
//! plus an integer-coefficient mode whose ghost map serves as an oracle.

mod intpoly;
mod table;

use std::collections::HashMap;
use std::fmt::Debug;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyring::{PolyError, Polynomial, PolynomialJson, PresentedRing};

pub use table::{
    build_witt_table, build_witt_table_with_limits, TableLimits, TablePoly, TableTerm,
    WittPolynomialTable,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WittError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("Witt vectors need level at least 1")]
    ZeroLevel,
    #[error("table for p = {p}, r = {r} exceeds the configured limits")]
    TableTooLarge { p: u64, r: usize },
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("level {level} exceeds the table level {max}")]
    LevelExceedsTable { level: usize, max: usize },
    #[error("Frobenius lowers the level; level 1 has no image")]
    FrobeniusAtLevelOne,
    #[error("operation needs an F_p-algebra")]
    NotCharacteristicP,
    #[error("coordinate does not belong to the coefficient ring")]
    ForeignCoordinate,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Coefficient rings for Witt vectors.
pub trait CoefficientRing {
    type Elem: Clone + PartialEq + Debug;

    /// The prime `p` of the Witt vectors built over this ring.
    fn prime(&self) -> u64;
    /// True for `F_p`-algebras, where the table reduced mod p is used.
    fn is_char_p(&self) -> bool;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_integer(&self, c: &BigInt) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Normal form; `None` if `a` is not an element of this ring.
    fn normalize(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn scale(&self, a: &Self::Elem, c: &BigInt) -> Self::Elem {
        self.mul(a, &self.from_integer(c))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// The integers, for the ghost-component oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Integers {
    pub p: u64,
}

impl CoefficientRing for Integers {
    type Elem = BigInt;

    fn prime(&self) -> u64 {
        self.p
    }
    fn is_char_p(&self) -> bool {
        false
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn from_integer(&self, c: &BigInt) -> BigInt {
        c.clone()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn normalize(&self, a: &BigInt) -> Option<BigInt> {
        Some(a.clone())
    }
    fn pow(&self, a: &BigInt, e: u64) -> BigInt {
        num_traits::pow(a.clone(), e as usize)
    }
}

impl CoefficientRing for PresentedRing {
    type Elem = Polynomial;

    fn prime(&self) -> u64 {
        self.p()
    }
    fn is_char_p(&self) -> bool {
        true
    }
    fn zero(&self) -> Polynomial {
        PresentedRing::zero(self)
    }
    fn one(&self) -> Polynomial {
        PresentedRing::one(self)
    }
    fn add(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        // normal forms are closed under linear combinations
        a.try_add(b).expect("coordinates share the ring")
    }
    fn mul(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        PresentedRing::mul(self, a, b).expect("coordinates share the ring")
    }
    fn from_integer(&self, c: &BigInt) -> Polynomial {
        let r = c.mod_floor(&BigInt::from(self.p())).to_i128().expect("below p");
        self.reduce(&Polynomial::constant(self.ring(), r))
    }
    fn is_zero(&self, a: &Polynomial) -> bool {
        a.is_zero()
    }
    fn normalize(&self, a: &Polynomial) -> Option<Polynomial> {
        (a.ring() == self.ring()).then(|| self.reduce(a))
    }
    fn scale(&self, a: &Polynomial, c: &BigInt) -> Polynomial {
        let r = c.mod_floor(&BigInt::from(self.p())).to_u64().expect("below p");
        a.scale(r)
    }
    fn pow(&self, a: &Polynomial, e: u64) -> Polynomial {
        PresentedRing::pow(self, a, e)
    }
}

/// A length-`r` coordinate tuple; the ring structure lives in [`WittRing`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittVector<E> {
    coords: Vec<E>,
}

impl<E> WittVector<E> {
    pub fn level(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[E] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<E> {
        self.coords
    }
}

/// `{"p": 3, "r": 2, "coords": [polynomial JSON, ...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WittVectorJson {
    pub p: u64,
    pub r: usize,
    pub coords: Vec<PolynomialJson>,
}

/// `W_r(A)` for all `r` up to the level of the underlying table.
#[derive(Debug, Clone)]
pub struct WittRing<R: CoefficientRing> {
    base: R,
    table: Arc<WittPolynomialTable>,
}

type PowerCache<E> = HashMap<(usize, u64), E>;

impl<R: CoefficientRing> WittRing<R> {
    pub fn new(base: R, max_level: usize) -> Result<Self, WittError> {
        let table = build_witt_table(base.prime(), max_level)?;
        Ok(WittRing { base, table })
    }

    pub fn with_limits(base: R, max_level: usize, limits: TableLimits) -> Result<Self, WittError> {
        let table = build_witt_table_with_limits(base.prime(), max_level, limits)?;
        Ok(WittRing { base, table })
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn p(&self) -> u64 {
        self.table.p
    }

    pub fn max_level(&self) -> usize {
        self.table.level
    }

    pub fn table(&self) -> &WittPolynomialTable {
        &self.table
    }

    fn check_level(&self, level: usize) -> Result<(), WittError> {
        if level == 0 {
            Err(WittError::ZeroLevel)
        } else if level > self.table.level {
            Err(WittError::LevelExceedsTable { level, max: self.table.level })
        } else {
            Ok(())
        }
    }

    fn same_level(&self, x: &WittVector<R::Elem>, y: &WittVector<R::Elem>) -> Result<usize, WittError> {
        if x.level() != y.level() {
            return Err(WittError::LevelMismatch(x.level(), y.level()));
        }
        self.check_level(x.level())?;
        Ok(x.level())
    }

    /// Builds a vector, putting every coordinate in normal form.
    pub fn vector(&self, coords: Vec<R::Elem>) -> Result<WittVector<R::Elem>, WittError> {
        self.check_level(coords.len())?;
        let coords = coords
            .iter()
            .map(|c| self.base.normalize(c).ok_or(WittError::ForeignCoordinate))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WittVector { coords })
    }

    pub fn zero(&self, level: usize) -> WittVector<R::Elem> {
        WittVector { coords: vec![self.base.zero(); level] }
    }

    pub fn one(&self, level: usize) -> WittVector<R::Elem> {
        self.teichmuller(&self.base.one(), level)
    }

    /// `[g] = (g, 0, ..., 0)`.
    pub fn teichmuller(&self, g: &R::Elem, level: usize) -> WittVector<R::Elem> {
        let mut coords = vec![self.base.zero(); level];
        if level > 0 {
            coords[0] = self.base.normalize(g).unwrap_or_else(|| g.clone());
        }
        WittVector { coords }
    }

    /// Image of the integer `n` under `Z -> W_r(A)`, via its integer Witt
    /// coordinates (solved from the constant ghost vector `(n, n, ...)`).
    pub fn from_integer(&self, n: &BigInt, level: usize) -> WittVector<R::Elem> {
        let p = BigInt::from(self.p());
        let mut ints: Vec<BigInt> = Vec::with_capacity(level);
        for i in 0..level {
            let mut rest = n.clone();
            let mut pj = BigInt::one();
            for (j, a) in ints.iter().enumerate() {
                rest -= &pj * num_traits::pow(a.clone(), self.p().pow((i - j) as u32) as usize);
                pj *= &p;
            }
            let (q, r) = rest.div_rem(&pj);
            assert!(r.is_zero(), "integer Witt coordinates are integral");
            ints.push(q);
        }
        WittVector {
            coords: ints.iter().map(|c| self.base.from_integer(c)).collect(),
        }
    }

    fn eval(
        &self,
        poly: &TablePoly,
        vars: &[&R::Elem],
        cache: &mut PowerCache<R::Elem>,
    ) -> R::Elem {
        let char_p = self.base.is_char_p();
        self.fill_powers(poly, vars, cache);
        let mut acc = self.base.zero();
        'terms: for t in &poly.terms {
            if char_p && t.coef_mod_p == 0 {
                continue;
            }
            let mut prod: Option<R::Elem> = None;
            for &(v, e) in &t.factors {
                if self.base.is_zero(vars[v]) {
                    continue 'terms;
                }
                let pw = cache[&(v, e)].clone();
                if self.base.is_zero(&pw) {
                    continue 'terms;
                }
                prod = Some(match prod {
                    None => pw,
                    Some(q) => self.base.mul(&q, &pw),
                });
                if self.base.is_zero(prod.as_ref().expect("just set")) {
                    continue 'terms;
                }
            }
            let prod = prod.unwrap_or_else(|| self.base.one());
            let term = if char_p {
                self.base.scale(&prod, &BigInt::from(t.coef_mod_p))
            } else {
                self.base.scale(&prod, &t.coef)
            };
            acc = self.base.add(&acc, &term);
        }
        acc
    }

    /// Caches every power needed by `poly`, each from the next lower one.
    fn fill_powers(&self, poly: &TablePoly, vars: &[&R::Elem], cache: &mut PowerCache<R::Elem>) {
        let mut needed: Vec<(usize, u64)> = poly
            .terms
            .iter()
            .flat_map(|t| t.factors.iter().copied())
            .filter(|k| !cache.contains_key(k))
            .collect();
        needed.sort_unstable();
        needed.dedup();
        for (v, e) in needed {
            let below = cache
                .keys()
                .filter(|(w, f)| *w == v && *f < e)
                .map(|(_, f)| *f)
                .max();
            let pw = match below {
                Some(f) => self.base.mul(&cache[&(v, f)], &self.base.pow(vars[v], e - f)),
                None => self.base.pow(vars[v], e),
            };
            cache.insert((v, e), pw);
        }
    }

    fn binary(
        &self,
        polys: &[TablePoly],
        x: &WittVector<R::Elem>,
        y: &WittVector<R::Elem>,
    ) -> Result<WittVector<R::Elem>, WittError> {
        let r = self.same_level(x, y)?;
        let zero = self.base.zero();
        let mut vars: Vec<&R::Elem> = vec![&zero; 2 * self.table.level];
        for i in 0..r {
            vars[self.table.a(i)] = &x.coords[i];
            vars[self.table.b(i)] = &y.coords[i];
        }
        let mut cache = HashMap::new();
        let coords = polys[..r].iter().map(|f| self.eval(f, &vars, &mut cache)).collect();
        Ok(WittVector { coords })
    }

    /// Sum. Over `F_p`-algebras this uses `x = [x_0] + V(x')` and only the
    /// two-variable polynomials `[a] + [b]`; otherwise the full sum table.
    pub fn add(&self, x: &WittVector<R::Elem>, y: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>, WittError> {
        if self.base.is_char_p() {
            self.same_level(x, y)?;
            Ok(WittVector { coords: self.add_fp(&x.coords, &y.coords) })
        } else {
            self.add_by_table(x, y)
        }
    }

    /// Product. Over `F_p`-algebras this expands
    /// `x y = sum_{i+j<r} V^{i+j}[x_i^{p^j} y_j^{p^i}]`; otherwise the product table.
    pub fn mul(&self, x: &WittVector<R::Elem>, y: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>, WittError> {
        if !self.base.is_char_p() {
            return self.mul_by_table(x, y);
        }
        let r = self.same_level(x, y)?;
        let p = self.p();
        let mut acc = vec![self.base.zero(); r];
        for i in 0..r {
            if self.base.is_zero(&x.coords[i]) {
                continue;
            }
            for j in 0..r - i {
                if self.base.is_zero(&y.coords[j]) {
                    continue;
                }
                let c = self.base.mul(
                    &self.base.pow(&x.coords[i], p.pow(j as u32)),
                    &self.base.pow(&y.coords[j], p.pow(i as u32)),
                );
                if self.base.is_zero(&c) {
                    continue;
                }
                let mut term = vec![self.base.zero(); r];
                term[i + j] = c;
                acc = self.add_fp(&acc, &term);
            }
        }
        Ok(WittVector { coords: acc })
    }

    /// Sum by direct evaluation of the universal sum polynomials.
    pub fn add_by_table(&self, x: &WittVector<R::Elem>, y: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>, WittError> {
        self.binary(&self.table.sum, x, y)
    }

    /// Product by direct evaluation of the universal product polynomials.
    pub fn mul_by_table(&self, x: &WittVector<R::Elem>, y: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>, WittError> {
        self.binary(&self.table.prod, x, y)
    }

    /// Coordinates of `[a] + [b]` at level `r`.
    fn teich_sum(&self, a: &R::Elem, b: &R::Elem, r: usize) -> Vec<R::Elem> {
        let zero = self.base.zero();
        if self.base.is_zero(b) || self.base.is_zero(a) {
            let mut out = vec![zero; r];
            out[0] = if self.base.is_zero(b) { a.clone() } else { b.clone() };
            return out;
        }
        let mut vars: Vec<&R::Elem> = vec![&zero; 2 * self.table.level];
        vars[self.table.a(0)] = a;
        vars[self.table.b(0)] = b;
        let mut cache = HashMap::new();
        self.table.teich_sum[..r].iter().map(|f| self.eval(f, &vars, &mut cache)).collect()
    }

    // x + y = [x_0] + [y_0] + V(x' + y') = [t_0] + V(t' + x' + y') with t = [x_0] + [y_0]
    fn add_fp(&self, x: &[R::Elem], y: &[R::Elem]) -> Vec<R::Elem> {
        let r = x.len();
        if r == 0 {
            return Vec::new();
        }
        if y.iter().all(|c| self.base.is_zero(c)) {
            return x.to_vec();
        }
        if x.iter().all(|c| self.base.is_zero(c)) {
            return y.to_vec();
        }
        let t = self.teich_sum(&x[0], &y[0], r);
        let tail = self.add_fp(&self.add_fp(&t[1..], &x[1..]), &y[1..]);
        let mut out = Vec::with_capacity(r);
        out.push(t[0].clone());
        out.extend(tail);
        out
    }

    pub fn neg(&self, x: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>, WittError> {
        self.unary(&self.table.neg, x, x.level())
    }

    pub fn sub(&self, x: &WittVector<R::Elem>, y: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>, WittError> {
        self.add(x, &self.neg(y)?)
    }

    fn unary(
        &self,
        polys: &[TablePoly],
        x: &WittVector<R::Elem>,
        out_len: usize,
    ) -> Result<WittVector<R::Elem>, WittError> {
        self.check_level(x.level())?;
        let zero = self.base.zero();
        let mut vars: Vec<&R::Elem> = vec![&zero; 2 * self.table.level];
        for (i, c) in x.coords.iter().enumerate() {
            vars[self.table.a(i)] = c;
        }
        let mut cache = HashMap::new();
        let coords = polys[..out_len].iter().map(|f| self.eval(f, &vars, &mut cache)).collect();
        Ok(WittVector { coords })
    }

    /// Witt Frobenius `W_r(A) -> W_{r-1}(A)`, from the universal polynomials.
    pub fn frobenius(&self, x: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>, WittError> {
        if x.level() == 1 {
            return Err(WittError::FrobeniusAtLevelOne);
        }
        self.unary(&self.table.frob, x, x.level() - 1)
    }

    /// Level-preserving Frobenius of an `F_p`-algebra: coordinate-wise p-th power.
    pub fn frobenius_fp(&self, x: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>, WittError> {
        if !self.base.is_char_p() {
            return Err(WittError::NotCharacteristicP);
        }
        Ok(WittVector {
            coords: x.coords.iter().map(|c| self.base.pow(c, self.p())).collect(),
        })
    }

    /// `V(x_0, ..., x_{r-1}) = (0, x_0, ..., x_{r-1})`.
    pub fn verschiebung(&self, x: &WittVector<R::Elem>) -> WittVector<R::Elem> {
        let mut coords = Vec::with_capacity(x.level() + 1);
        coords.push(self.base.zero());
        coords.extend(x.coords.iter().cloned());
        WittVector { coords }
    }

    /// Drops coordinates beyond `level`.
    pub fn truncate(&self, x: &WittVector<R::Elem>, level: usize) -> WittVector<R::Elem> {
        WittVector { coords: x.coords[..level.min(x.level())].to_vec() }
    }

    /// Multiplication by the integer `n`.
    pub fn scalar(&self, n: &BigInt, x: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>, WittError> {
        self.mul(&self.from_integer(n, x.level()), x)
    }

    /// Ghost components `w_i = sum_{j<=i} p^j x_j^{p^{i-j}}`.
    pub fn ghost(&self, x: &WittVector<R::Elem>) -> Vec<R::Elem> {
        let p = self.p();
        (0..x.level())
            .map(|i| {
                let mut acc = self.base.zero();
                let mut pj = BigInt::one();
                for j in 0..=i {
                    let pw = self.base.pow(&x.coords[j], p.pow((i - j) as u32));
                    acc = self.base.add(&acc, &self.base.scale(&pw, &pj));
                    pj *= p;
                }
                acc
            })
            .collect()
    }
}

impl WittRing<PresentedRing> {
    pub fn to_json(&self, x: &WittVector<Polynomial>) -> WittVectorJson {
        WittVectorJson {
            p: self.p(),
            r: x.level(),
            coords: x.coords.iter().map(Polynomial::to_json).collect(),
        }
    }

    pub fn from_json(&self, j: &WittVectorJson) -> Result<WittVector<Polynomial>, WittError> {
        if j.p != self.p() {
            return Err(WittError::Poly(PolyError::RingMismatch));
        }
        if j.coords.len() != j.r {
            return Err(WittError::LevelMismatch(j.r, j.coords.len()));
        }
        let coords = j
            .coords
            .iter()
            .map(|c| Polynomial::from_json_in(self.base.ring(), c))
            .collect::<Result<Vec<_>, _>>()?;
        self.vector(coords)
    }
}
