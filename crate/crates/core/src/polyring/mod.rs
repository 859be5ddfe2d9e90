//! Sparse multivariate polynomials over `F_p` (and `Z/p^N`), term orders,
//! Buchberger Gröbner bases, elimination, derivatives and p-th roots.

mod groebner;
mod ideal;
mod order;
mod parse;
mod quotient;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modarith::{ArithError, Modulus};

pub use groebner::{buchberger_basis, normal_form_by, GroebnerBasis};
pub use ideal::{
    buchberger, eliminate, krull_dim, normal_form, pth_root_ideal, Ideal,
};
pub use order::{OrderKind, TermOrder};
pub use parse::parse_polynomial;
pub use quotient::{PresentationJson, PresentedRing};

/// Largest admissible characteristic (exclusive).
pub const MAX_PRIME: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("characteristic {0} out of range (need 2 <= p < 65536)")]
    PrimeOutOfRange(u64),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("variable index {index} out of range for {num_vars} variables")]
    VariableOutOfRange { index: usize, num_vars: usize },
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("Gröbner computations need a field (coefficient exponent 1, found {0})")]
    NotAField(u32),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid polynomial JSON: {0}")]
    Json(String),
    #[error("ideal has no Gröbner basis; compute one first")]
    MissingGroebner,
}

/// `k[x_1..x_n]` with `k = Z/p^N` (`N = 1` is the field case).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyRing {
    modulus: Modulus,
    names: Vec<String>,
}

impl PolyRing {
    pub fn new(p: u64, names: Vec<String>) -> Result<Arc<Self>, PolyError> {
        Self::with_coeff_exp(p, 1, names)
    }

    pub fn with_coeff_exp(p: u64, coeff_exp: u32, names: Vec<String>) -> Result<Arc<Self>, PolyError> {
        if !(2..MAX_PRIME).contains(&p) {
            return Err(PolyError::PrimeOutOfRange(p));
        }
        let modulus = Modulus::new(p, coeff_exp)?;
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(PolyError::DuplicateVariable(n.clone()));
            }
        }
        Ok(Arc::new(PolyRing { modulus, names }))
    }

    /// Ring with variables `x0..x{n-1}`.
    pub fn with_vars(p: u64, n: usize) -> Result<Arc<Self>, PolyError> {
        Self::new(p, (0..n).map(|i| format!("x{i}")).collect())
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    pub fn coeff_exp(&self) -> u32 {
        self.modulus.exp()
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_field(&self) -> bool {
        self.modulus.exp() == 1
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Some(i);
        }
        let idx: usize = name.strip_prefix('x')?.parse().ok()?;
        (idx < self.num_vars()).then_some(idx)
    }

    pub(crate) fn require_field(&self) -> Result<(), PolyError> {
        if self.is_field() {
            Ok(())
        } else {
            Err(PolyError::NotAField(self.coeff_exp()))
        }
    }
}

/// Exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Exps);

type Exps = smallvec::SmallVec<[u32; 8]>;

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(Exps::from_vec(exps))
    }

    pub fn one(n: usize) -> Self {
        Monomial(smallvec::smallvec![0; n])
    }

    pub fn var(n: usize, i: usize, e: u32) -> Self {
        let mut v: Exps = smallvec::smallvec![0; n];
        v[i] = e;
        Monomial(v)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self | other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Indices of variables with positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, _)| i)
    }
}

/// A polynomial with coefficients in `Z/p^N`, stored sparsely without zeros.
#[derive(Clone)]
pub struct Polynomial {
    ring: Arc<PolyRing>,
    terms: BTreeMap<Monomial, u64>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl std::hash::Hash for Polynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl Polynomial {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: i128) -> Self {
        let c = ring.modulus.reduce_i128(c);
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(Monomial::one(ring.num_vars()), c);
        }
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Self::constant(ring, 1)
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Result<Self, PolyError> {
        if i >= ring.num_vars() {
            return Err(PolyError::VariableOutOfRange {
                index: i,
                num_vars: ring.num_vars(),
            });
        }
        Ok(Self::monomial(ring, Monomial::var(ring.num_vars(), i, 1), 1))
    }

    pub fn monomial(ring: &Arc<PolyRing>, m: Monomial, c: u64) -> Self {
        let c = ring.modulus.reduce(c);
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        Polynomial { ring: ring.clone(), terms }
    }

    /// Builds from `(exponents, coefficient)` pairs, summing duplicates.
    pub fn from_terms<I>(ring: &Arc<PolyRing>, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, i128)>,
    {
        let md = ring.modulus;
        let mut out = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != ring.num_vars() {
                return Err(PolyError::Json(format!(
                    "exponent vector of length {} in a ring with {} variables",
                    e.len(),
                    ring.num_vars()
                )));
            }
            let c = md.reduce_i128(c);
            add_term(&mut out, Monomial(Exps::from_vec(e)), c, md);
        }
        Ok(Polynomial { ring: ring.clone(), terms: out })
    }

    pub(crate) fn from_map(ring: &Arc<PolyRing>, terms: BTreeMap<Monomial, u64>) -> Self {
        debug_assert!(terms.values().all(|&c| c != 0));
        Polynomial { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, u64> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the zero polynomial and for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Constant coefficient of a constant polynomial.
    pub fn constant_value(&self) -> Option<u64> {
        if self.is_constant() {
            Some(self.terms.values().next().copied().unwrap_or(0))
        } else {
            None
        }
    }

    /// Total degree; `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn uses_only(&self, vars: &[usize]) -> bool {
        self.terms.keys().all(|m| m.support().all(|v| vars.contains(&v)))
    }

    pub fn coefficient(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Leading `(monomial, coefficient)` under `order`.
    pub fn leading_term(&self, order: &TermOrder) -> Option<(&Monomial, u64)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(a.0, b.0))
            .map(|(m, c)| (m, *c))
    }

    /// Terms sorted by `order`, largest first.
    pub fn sorted_terms(&self, order: &TermOrder) -> Vec<(&Monomial, u64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (m, *c)).collect();
        v.sort_by(|a, b| order.cmp(b.0, a.0));
        v
    }

    fn check_ring(&self, other: &Polynomial) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(PolyError::RingMismatch)
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        let md = self.ring.modulus;
        let mut out = self.terms.clone();
        for (m, &c) in &other.terms {
            add_term(&mut out, m.clone(), c, md);
        }
        Ok(Polynomial { ring: self.ring.clone(), terms: out })
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        let md = self.ring.modulus;
        let mut out = BTreeMap::new();
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                add_term(&mut out, m1.mul(m2), md.mul(c1, c2), md);
            }
        }
        Ok(Polynomial { ring: self.ring.clone(), terms: out })
    }

    pub fn neg(&self) -> Polynomial {
        let md = self.ring.modulus;
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), md.neg(c))).collect(),
        }
    }

    pub fn scale(&self, c: u64) -> Polynomial {
        let md = self.ring.modulus;
        let c = md.reduce(c);
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, &a)| (m.clone(), md.mul(a, c)))
                .filter(|(_, a)| *a != 0)
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: u64) -> Polynomial {
        let md = self.ring.modulus;
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(t, &a)| (t.mul(m), md.mul(a, c)))
                .filter(|(_, a)| *a != 0)
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Polynomial {
        let mut acc = Polynomial::one(&self.ring);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base).expect("same ring");
            }
        }
        acc
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial_derivative(&self, i: usize) -> Result<Polynomial, PolyError> {
        let n = self.ring.num_vars();
        if i >= n {
            return Err(PolyError::VariableOutOfRange { index: i, num_vars: n });
        }
        let md = self.ring.modulus;
        let mut out = BTreeMap::new();
        for (m, &c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let c = md.mul(c, md.reduce(e as u64));
            if c == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            add_term(&mut out, Monomial(exps), c, md);
        }
        Ok(Polynomial { ring: self.ring.clone(), terms: out })
    }

    /// `h` with `h^p = self` when every exponent is divisible by `p`.
    ///
    /// Over `F_p` every coefficient is its own p-th root, so only exponents
    /// need dividing.
    pub fn pth_root(&self) -> Result<Option<Polynomial>, PolyError> {
        self.ring.require_field()?;
        let p = self.ring.p();
        let mut out = BTreeMap::new();
        for (m, &c) in &self.terms {
            if m.0.iter().any(|&e| (e as u64) % p != 0) {
                return Ok(None);
            }
            out.insert(Monomial(m.0.iter().map(|&e| e / p as u32).collect()), c);
        }
        Ok(Some(Polynomial { ring: self.ring.clone(), terms: out }))
    }

    /// Substitutes `images[i]` for variable `i`; all images share one ring.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial, PolyError> {
        let n = self.ring.num_vars();
        if images.len() != n {
            return Err(PolyError::VariableOutOfRange {
                index: images.len(),
                num_vars: n,
            });
        }
        if n == 0 {
            return Ok(self.clone());
        }
        let target = images[0].ring.clone();
        for img in images {
            if img.ring != target {
                return Err(PolyError::RingMismatch);
            }
        }
        let mut cache: Vec<Vec<Polynomial>> = vec![vec![Polynomial::one(&target)]; n];
        let mut acc = Polynomial::zero(&target);
        for (m, &c) in &self.terms {
            let mut term = Polynomial::constant(&target, c as i128);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().try_mul(&images[i])?;
                    cache[i].push(next);
                }
                term = term.try_mul(&cache[i][e as usize])?;
            }
            acc = acc.try_add(&term)?;
        }
        Ok(acc)
    }

    /// Re-homes the polynomial in `target`, sending variable `i` to
    /// variable `var_map[i]`.
    pub fn map_vars(&self, target: &Arc<PolyRing>, var_map: &[usize]) -> Result<Polynomial, PolyError> {
        if target.modulus != self.ring.modulus {
            return Err(PolyError::RingMismatch);
        }
        if var_map.len() != self.ring.num_vars() {
            return Err(PolyError::RingMismatch);
        }
        let tn = target.num_vars();
        let mut out = BTreeMap::new();
        for (m, &c) in &self.terms {
            let mut e = vec![0u32; tn];
            for (i, &x) in m.0.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let j = var_map[i];
                if j >= tn {
                    return Err(PolyError::VariableOutOfRange { index: j, num_vars: tn });
                }
                e[j] += x;
            }
            add_term(&mut out, Monomial(Exps::from_vec(e)), c, target.modulus);
        }
        Ok(Polynomial { ring: target.clone(), terms: out })
    }

    /// Makes the leading coefficient (under `order`) equal to 1. Field mode only.
    pub fn monic(&self, order: &TermOrder) -> Polynomial {
        match self.leading_term(order) {
            Some((_, c)) => self.scale(self.ring.modulus.inv(c)),
            None => self.clone(),
        }
    }

    pub fn display_with(&self, order: &TermOrder) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let md = self.ring.modulus;
        let half = md.value() / 2;
        let mut out = String::new();
        for (k, (m, c)) in self.sorted_terms(order).into_iter().enumerate() {
            let (negative, mag) = if c > half { (true, md.value() - c) } else { (false, c) };
            match (k, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let mono = format_monomial(m, &self.ring.names);
            match (mono.is_empty(), mag) {
                (true, _) => out.push_str(&mag.to_string()),
                (false, 1) => out.push_str(&mono),
                (false, _) => {
                    out.push_str(&mag.to_string());
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> PolynomialJson {
        let order = TermOrder::grevlex();
        PolynomialJson {
            vars: self.ring.names.clone(),
            p: self.ring.p(),
            coeff_exp: (self.ring.coeff_exp() != 1).then_some(self.ring.coeff_exp()),
            terms: self
                .sorted_terms(&order)
                .into_iter()
                .map(|(m, c)| TermJson { exp: m.0.to_vec(), coef: c })
                .collect(),
        }
    }

    /// Parses the JSON form into `ring`, which must match its variables and prime.
    pub fn from_json_in(ring: &Arc<PolyRing>, j: &PolynomialJson) -> Result<Polynomial, PolyError> {
        if j.p != ring.p() || j.vars != ring.names || j.coeff_exp.unwrap_or(1) != ring.coeff_exp() {
            return Err(PolyError::Json(format!(
                "polynomial over p={} vars {:?} does not belong to p={} vars {:?}",
                j.p,
                j.vars,
                ring.p(),
                ring.names
            )));
        }
        Polynomial::from_terms(ring, j.terms.iter().map(|t| (t.exp.clone(), t.coef as i128)))
    }

    pub fn from_json(j: &PolynomialJson) -> Result<Polynomial, PolyError> {
        let ring = PolyRing::with_coeff_exp(j.p, j.coeff_exp.unwrap_or(1), j.vars.clone())?;
        Self::from_json_in(&ring, j)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&TermOrder::grevlex()))
    }
}

fn format_monomial(m: &Monomial, names: &[String]) -> String {
    let parts: Vec<String> = m
        .0
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                names[i].clone()
            } else {
                format!("{}^{}", names[i], e)
            }
        })
        .collect();
    parts.join("*")
}

pub(crate) fn add_term(map: &mut BTreeMap<Monomial, u64>, m: Monomial, c: u64, md: Modulus) {
    if c == 0 {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = md.add(*o.get(), c);
            if s == 0 {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

/// `{"vars": [...], "p": int, "terms": [{"exp": [...], "coef": int}]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub vars: Vec<String>,
    pub p: u64,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub coeff_exp: Option<u32>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coef: u64,
}

/// Formal partial derivative; see [`Polynomial::partial_derivative`].
pub fn partial_derivative(f: &Polynomial, i: usize) -> Result<Polynomial, PolyError> {
    f.partial_derivative(i)
}

/// See [`Polynomial::pth_root`].
pub fn pth_root_poly(f: &Polynomial) -> Result<Option<Polynomial>, PolyError> {
    f.pth_root()
}
