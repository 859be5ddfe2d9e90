//! Exact arithmetic and linear algebra over `Z/p^N`.
//!
//! Every object carries a [`Modulus`]; mixing moduli is a construction error.
//! Products are formed in `u128`, and moduli are capped below `2^63`, so no
//! intermediate can overflow.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("modulus exponent must be at least 1")]
    ZeroExponent,
    #[error("modulus {p}^{exp} does not fit in 63 bits")]
    ModulusTooLarge { p: u64, exp: u32 },
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(Modulus, Modulus),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The ring `Z/p^exp` for a prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ModulusRepr", into = "ModulusRepr")]
pub struct Modulus {
    p: u64,
    exp: u32,
    value: u64,
}

#[derive(Serialize, Deserialize)]
struct ModulusRepr {
    p: u64,
    exp: u32,
}

impl TryFrom<ModulusRepr> for Modulus {
    type Error = ArithError;
    fn try_from(r: ModulusRepr) -> Result<Self, ArithError> {
        Modulus::new(r.p, r.exp)
    }
}

impl From<Modulus> for ModulusRepr {
    fn from(m: Modulus) -> Self {
        ModulusRepr { p: m.p, exp: m.exp }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.exp)
    }
}

impl Modulus {
    pub fn new(p: u64, exp: u32) -> Result<Self, ArithError> {
        if !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        if exp == 0 {
            return Err(ArithError::ZeroExponent);
        }
        let mut value: u64 = 1;
        for _ in 0..exp {
            value = value
                .checked_mul(p)
                .filter(|v| *v < (1u64 << 63))
                .ok_or(ArithError::ModulusTooLarge { p, exp })?;
        }
        Ok(Modulus { p, exp, value })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    /// `p^exp`.
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Same prime, exponent `exp` (which must be at least 1).
    pub fn with_exp(&self, exp: u32) -> Result<Self, ArithError> {
        Modulus::new(self.p, exp)
    }

    pub fn reduce_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.value as i128) as u64
    }

    pub fn reduce(&self, x: u64) -> u64 {
        x % self.value
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.value as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.value - (b - a)
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.value - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.value as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.value;
        base %= self.value;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `p^k`, saturating to 0 once `k >= exp`.
    pub fn p_pow(&self, k: u32) -> u64 {
        if k >= self.exp {
            0
        } else {
            self.p.pow(k)
        }
    }

    /// p-adic valuation; `exp` for zero.
    pub fn valuation(&self, a: u64) -> u32 {
        let mut a = a % self.value;
        if a == 0 {
            return self.exp;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    /// Inverse of a unit. Panics on non-units.
    pub fn inv(&self, a: u64) -> u64 {
        let (mut old_r, mut r) = ((a % self.value) as i128, self.value as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        assert_eq!(old_r, 1, "{a} is not a unit in {self}");
        self.reduce_i128(old_s)
    }

    /// Splits `a = p^v * u` with `u` a unit, returning `(v, u)`. Zero gives `(exp, 0)`.
    pub fn split(&self, a: u64) -> (u32, u64) {
        let v = self.valuation(a);
        if v == self.exp {
            (v, 0)
        } else {
            (v, a / self.p.pow(v))
        }
    }
}

/// An element of `Z/p^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: Modulus,
}

impl Residue {
    pub fn new(value: i128, modulus: Modulus) -> Self {
        Residue {
            value: modulus.reduce_i128(value),
            modulus,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn valuation(&self) -> u32 {
        self.modulus.valuation(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Residue) -> Result<(), ArithError> {
        if self.modulus != other.modulus {
            return Err(ArithError::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Residue) -> Result<Residue, ArithError> {
        self.check(other)?;
        Ok(Residue {
            value: self.modulus.add(self.value, other.value),
            modulus: self.modulus,
        })
    }

    pub fn try_mul(&self, other: &Residue) -> Result<Residue, ArithError> {
        self.check(other)?;
        Ok(Residue {
            value: self.modulus.mul(self.value, other.value),
            modulus: self.modulus,
        })
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Dense matrix over `Z/p^N`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularMatrix {
    modulus: Modulus,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ModularMatrix {
    pub fn zeros(modulus: Modulus, rows: usize, cols: usize) -> Self {
        ModularMatrix {
            modulus,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: Modulus, n: usize) -> Self {
        let mut m = Self::zeros(modulus, n, n);
        for i in 0..n {
            m.set(i, i, 1 % modulus.value());
        }
        m
    }

    pub fn from_rows<T: Copy + Into<i128>>(
        modulus: Modulus,
        rows: &[Vec<T>],
    ) -> Result<Self, ArithError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(modulus, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(ArithError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, modulus.reduce_i128(x.into()));
            }
        }
        Ok(m)
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(modulus: Modulus, rows: usize, columns: &[Vec<u64>]) -> Result<Self, ArithError> {
        let mut m = Self::zeros(modulus, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(ArithError::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, modulus.reduce(x));
            }
        }
        Ok(m)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn entry(&self, i: usize, j: usize) -> Residue {
        Residue {
            value: self.get(i, j),
            modulus: self.modulus,
        }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &ModularMatrix) -> Result<ModularMatrix, ArithError> {
        if self.modulus != other.modulus {
            return Err(ArithError::ModulusMismatch(self.modulus, other.modulus));
        }
        if self.cols != other.rows {
            return Err(ArithError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let m = self.modulus;
        let mut out = Self::zeros(m, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, m.add(cur, m.mul(a, other.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>, ArithError> {
        if v.len() != self.cols {
            return Err(ArithError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let m = self.modulus;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| m.add(acc, m.mul(a, b)))
            })
            .collect())
    }

    /// Reduces every entry into `Z/p^exp` for a smaller (or equal) exponent.
    pub fn reduce_to(&self, modulus: Modulus) -> Result<ModularMatrix, ArithError> {
        if modulus.p() != self.modulus.p() || modulus.exp() > self.modulus.exp() {
            return Err(ArithError::ModulusMismatch(self.modulus, modulus));
        }
        Ok(ModularMatrix {
            modulus,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| modulus.reduce(x)).collect(),
        })
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &ModularMatrix) -> Result<ModularMatrix, ArithError> {
        if self.modulus != other.modulus {
            return Err(ArithError::ModulusMismatch(self.modulus, other.modulus));
        }
        if self.rows != other.rows {
            return Err(ArithError::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.modulus, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j));
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, c: u64) -> ModularMatrix {
        let m = self.modulus;
        ModularMatrix {
            modulus: m,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| m.mul(x, c)).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    fn scale_row(&mut self, i: usize, s: u64) {
        let m = self.modulus;
        for j in 0..self.cols {
            let x = self.get(i, j);
            self.set(i, j, m.mul(x, s));
        }
    }

    fn scale_col(&mut self, j: usize, s: u64) {
        let m = self.modulus;
        for i in 0..self.rows {
            let x = self.get(i, j);
            self.set(i, j, m.mul(x, s));
        }
    }

    /// row[dst] += c * row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: u64) {
        let m = self.modulus;
        for j in 0..self.cols {
            let x = m.add(self.get(dst, j), m.mul(c, self.get(src, j)));
            self.set(dst, j, x);
        }
    }

    /// col[dst] += c * col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: u64) {
        let m = self.modulus;
        for i in 0..self.rows {
            let x = m.add(self.get(i, dst), m.mul(c, self.get(i, src)));
            self.set(i, dst, x);
        }
    }
}

impl fmt::Display for ModularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(u64::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `left * m * right == diag(diag)` with `left`, `right` invertible.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub diag: Vec<Residue>,
    pub left: ModularMatrix,
    pub right: ModularMatrix,
    pub left_inv: ModularMatrix,
    pub right_inv: ModularMatrix,
}

impl SmithForm {
    /// Valuations of the diagonal entries (`N` for zero entries).
    pub fn valuations(&self) -> Vec<u32> {
        self.diag.iter().map(Residue::valuation).collect()
    }

    /// The diagonal as a `rows x cols` matrix.
    pub fn diagonal_matrix(&self) -> ModularMatrix {
        let mut d = ModularMatrix::zeros(self.left.modulus(), self.left.rows(), self.right.rows());
        for (i, r) in self.diag.iter().enumerate() {
            d.set(i, i, r.value());
        }
        d
    }
}

/// Smith normal form over `Z/p^N`.
///
/// Pivots are the entries of least valuation in the remaining block, ties
/// broken row-major; each pivot is normalized to an exact power of `p`.
pub fn smith_normal_form(m: &ModularMatrix) -> SmithForm {
    let md = m.modulus;
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut left = ModularMatrix::identity(md, rows);
    let mut left_inv = ModularMatrix::identity(md, rows);
    let mut right = ModularMatrix::identity(md, cols);
    let mut right_inv = ModularMatrix::identity(md, cols);
    let steps = rows.min(cols);
    let mut diag = Vec::with_capacity(steps);

    for k in 0..steps {
        let mut best: Option<(u32, usize, usize)> = None;
        'search: for i in k..rows {
            for j in k..cols {
                let x = a.get(i, j);
                if x == 0 {
                    continue;
                }
                let v = md.valuation(x);
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                    if v == 0 {
                        break 'search;
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            diag.extend((k..steps).map(|_| Residue { value: 0, modulus: md }));
            break;
        };

        a.swap_rows(k, pi);
        left.swap_rows(k, pi);
        left_inv.swap_cols(k, pi);
        a.swap_cols(k, pj);
        right.swap_cols(k, pj);
        right_inv.swap_rows(k, pj);

        let (_, unit) = md.split(a.get(k, k));
        let unit_inv = md.inv(unit);
        a.scale_row(k, unit_inv);
        left.scale_row(k, unit_inv);
        left_inv.scale_col(k, unit);

        let pv = md.p.pow(v);
        for i in k + 1..rows {
            let x = a.get(i, k);
            if x == 0 {
                continue;
            }
            let c = md.neg(x / pv);
            a.add_row(i, k, c);
            left.add_row(i, k, c);
            left_inv.add_col(k, i, md.neg(c));
        }
        for j in k + 1..cols {
            let x = a.get(k, j);
            if x == 0 {
                continue;
            }
            let c = md.neg(x / pv);
            a.add_col(j, k, c);
            right.add_col(j, k, c);
            right_inv.add_row(k, j, md.neg(c));
        }
        diag.push(Residue { value: pv, modulus: md });
    }

    SmithForm {
        diag,
        left,
        right,
        left_inv,
        right_inv,
    }
}

/// Returns some `x` with `m x = b`, or `None` when no solution exists.
pub fn solve_linear(m: &ModularMatrix, b: &[u64]) -> Result<Option<Vec<u64>>, ArithError> {
    if b.len() != m.rows {
        return Err(ArithError::DimensionMismatch {
            expected: m.rows,
            found: b.len(),
        });
    }
    let md = m.modulus;
    let snf = smith_normal_form(m);
    let c = snf.left.mul_vec(b)?;
    let mut y = vec![0u64; m.cols];
    for (i, &ci) in c.iter().enumerate() {
        let ci = md.reduce(ci);
        if i < snf.diag.len() {
            let dv = snf.diag[i].valuation();
            let cv = md.valuation(ci);
            if cv < dv {
                return Ok(None);
            }
            if dv < md.exp() {
                y[i] = ci / md.p.pow(dv);
            }
        } else if ci != 0 {
            return Ok(None);
        }
    }
    Ok(Some(snf.right.mul_vec(&y)?))
}

/// Generators of `{x : m x = 0}`.
pub fn kernel(m: &ModularMatrix) -> Vec<Vec<u64>> {
    let md = m.modulus;
    let snf = smith_normal_form(m);
    let mut gens = Vec::new();
    for j in 0..m.cols {
        let v = snf.diag.get(j).map_or(md.exp(), Residue::valuation);
        if v == 0 {
            continue;
        }
        let scale = md.p_pow(md.exp() - v.min(md.exp()));
        let col: Vec<u64> = snf.right.column(j).into_iter().map(|x| md.mul(x, scale)).collect();
        if col.iter().any(|&x| x != 0) {
            gens.push(col);
        }
    }
    gens
}

/// Exponents `e` of the nonzero cyclic summands `Z/p^e` of `(Z/p^N)^rows / im(m)`,
/// sorted ascending.
pub fn cokernel_invariants(m: &ModularMatrix) -> Vec<u32> {
    let md = m.modulus;
    let snf = smith_normal_form(m);
    let mut out: Vec<u32> = snf
        .valuations()
        .into_iter()
        .filter(|&v| v > 0)
        .collect();
    out.extend(std::iter::repeat_n(md.exp(), m.rows - snf.diag.len()));
    out.sort_unstable();
    out
}

/// A submodule of `(Z/p^N)^rank` given by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmoduleBasis {
    modulus: Modulus,
    rank: usize,
    generators: Vec<Vec<u64>>,
    echelonized: bool,
}

impl SubmoduleBasis {
    pub fn new(modulus: Modulus, rank: usize, generators: Vec<Vec<u64>>) -> Result<Self, ArithError> {
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if g.len() != rank {
                return Err(ArithError::DimensionMismatch {
                    expected: rank,
                    found: g.len(),
                });
            }
            gens.push(g.into_iter().map(|x| modulus.reduce(x)).collect());
        }
        Ok(SubmoduleBasis {
            modulus,
            rank,
            generators: gens,
            echelonized: false,
        })
    }

    pub fn zero(modulus: Modulus, rank: usize) -> Self {
        SubmoduleBasis {
            modulus,
            rank,
            generators: Vec::new(),
            echelonized: true,
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    pub fn is_echelonized(&self) -> bool {
        self.echelonized
    }

    /// Generators as the columns of a `rank x len` matrix.
    pub fn matrix(&self) -> ModularMatrix {
        ModularMatrix::from_columns(self.modulus, self.rank, &self.generators)
            .expect("generators have ambient rank")
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool, ArithError> {
        submodule_membership(v, self)
    }

    /// Sum of two submodules of the same ambient module.
    pub fn sum(&self, other: &SubmoduleBasis) -> Result<SubmoduleBasis, ArithError> {
        self.check_compatible(other)?;
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        SubmoduleBasis::new(self.modulus, self.rank, gens)
    }

    pub fn intersection(&self, other: &SubmoduleBasis) -> Result<SubmoduleBasis, ArithError> {
        self.check_compatible(other)?;
        let a = self.matrix();
        let b = other.matrix().scaled(self.modulus.neg(1 % self.modulus.value()));
        let joint = a.hcat(&b)?;
        let gens = kernel(&joint)
            .into_iter()
            .map(|k| a.mul_vec(&k[..a.cols()]))
            .collect::<Result<Vec<_>, _>>()?;
        SubmoduleBasis::new(self.modulus, self.rank, gens)
    }

    /// True iff every generator of `self` lies in `other`.
    pub fn is_contained_in(&self, other: &SubmoduleBasis) -> Result<bool, ArithError> {
        self.check_compatible(other)?;
        for g in &self.generators {
            if !submodule_membership(g, other)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_compatible(&self, other: &SubmoduleBasis) -> Result<(), ArithError> {
        if self.modulus != other.modulus {
            return Err(ArithError::ModulusMismatch(self.modulus, other.modulus));
        }
        if self.rank != other.rank {
            return Err(ArithError::DimensionMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        Ok(())
    }

    /// Invariant exponents of `ambient / self`.
    pub fn quotient_invariants(&self) -> Vec<u32> {
        cokernel_invariants(&self.matrix())
    }

    /// Canonical (Howell) echelon form: pivots are exact powers of `p`,
    /// entries above a pivot `p^v` lie in `[0, p^v)`. Two generating sets of
    /// the same submodule echelonize to identical generator lists.
    pub fn echelonize(&self) -> SubmoduleBasis {
        let md = self.modulus;
        let mut pool: Vec<Vec<u64>> = self
            .generators
            .iter()
            .filter(|g| g.iter().any(|&x| x != 0))
            .cloned()
            .collect();
        let mut pivots: Vec<(usize, u32, Vec<u64>)> = Vec::new();
        for col in 0..self.rank {
            let best = pool
                .iter()
                .enumerate()
                .filter(|(_, g)| g[col] != 0)
                .min_by_key(|(i, g)| (md.valuation(g[col]), *i))
                .map(|(i, _)| i);
            let Some(bi) = best else { continue };
            let mut piv = pool.remove(bi);
            let (v, u) = md.split(piv[col]);
            let ui = md.inv(u);
            for x in piv.iter_mut() {
                *x = md.mul(*x, ui);
            }
            let pv = md.p.pow(v);
            for g in pool.iter_mut() {
                if g[col] != 0 {
                    let c = md.neg(g[col] / pv);
                    for (x, &y) in g.iter_mut().zip(&piv) {
                        *x = md.add(*x, md.mul(c, y));
                    }
                }
            }
            let annihilated: Vec<u64> = piv.iter().map(|&x| md.mul(x, md.p_pow(md.exp() - v))).collect();
            if annihilated.iter().any(|&x| x != 0) {
                pool.push(annihilated);
            }
            pool.retain(|g| g.iter().any(|&x| x != 0));
            pivots.push((col, v, piv));
        }
        for j in 0..pivots.len() {
            let (col, v, ref row_j) = pivots[j];
            let row_j = row_j.clone();
            let pv = md.p.pow(v);
            for (_, _, row_i) in pivots.iter_mut().take(j) {
                let q = row_i[col] / pv;
                if q != 0 {
                    let c = md.neg(q);
                    for (x, &y) in row_i.iter_mut().zip(&row_j) {
                        *x = md.add(*x, md.mul(c, y));
                    }
                }
            }
        }
        SubmoduleBasis {
            modulus: md,
            rank: self.rank,
            generators: pivots.into_iter().map(|(_, _, r)| r).collect(),
            echelonized: true,
        }
    }
}

/// True iff `v` lies in the span of `s` over `Z/p^N`.
pub fn submodule_membership(v: &[u64], s: &SubmoduleBasis) -> Result<bool, ArithError> {
    if v.len() != s.rank {
        return Err(ArithError::DimensionMismatch {
            expected: s.rank,
            found: v.len(),
        });
    }
    if v.iter().all(|&x| s.modulus.reduce(x) == 0) {
        return Ok(true);
    }
    if s.generators.is_empty() {
        return Ok(false);
    }
    Ok(solve_linear(&s.matrix(), v)?.is_some())
}

/// Invariant exponents of `sub / rel`, where `rel` is a submodule of `sub`
/// (both given by generators in the same ambient module).
pub fn subquotient_invariants(sub: &SubmoduleBasis, rel: &SubmoduleBasis) -> Result<Vec<u32>, ArithError> {
    sub.check_compatible(rel)?;
    let md = sub.modulus;
    let m = sub.generators.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let a = sub.matrix();
    let b = rel.matrix().scaled(md.neg(1 % md.value()));
    let joint = a.hcat(&b)?;
    let relations: Vec<Vec<u64>> = kernel(&joint).into_iter().map(|k| k[..m].to_vec()).collect();
    let rel_matrix = ModularMatrix::from_columns(md, m, &relations)?;
    Ok(cokernel_invariants(&rel_matrix))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, n: u32) -> Modulus {
        Modulus::new(p, n).unwrap()
    }

    fn check_snf(m: &ModularMatrix) -> SmithForm {
        let snf = smith_normal_form(m);
        let prod = snf.left.mul(m).unwrap().mul(&snf.right).unwrap();
        assert_eq!(prod, snf.diagonal_matrix());
        let md = m.modulus();
        assert_eq!(snf.left.mul(&snf.left_inv).unwrap(), ModularMatrix::identity(md, m.rows()));
        assert_eq!(snf.right.mul(&snf.right_inv).unwrap(), ModularMatrix::identity(md, m.cols()));
        let vals = snf.valuations();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        snf
    }

    #[test]
    fn rejects_composite_and_huge_moduli() {
        assert_eq!(Modulus::new(6, 1), Err(ArithError::NotPrime(6)));
        assert!(matches!(Modulus::new(2, 63), Err(ArithError::ModulusTooLarge { .. })));
        assert_eq!(Modulus::new(3, 0), Err(ArithError::ZeroExponent));
    }

    #[test]
    fn mixed_moduli_rejected() {
        let a = Residue::new(1, z(3, 2));
        let b = Residue::new(1, z(3, 3));
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn snf_already_diagonal() {
        let m = ModularMatrix::from_rows(z(2, 3), &[vec![2i64, 0], vec![0, 4]]).unwrap();
        let snf = check_snf(&m);
        assert_eq!(snf.diag.iter().map(Residue::value).collect::<Vec<_>>(), vec![2, 4]);
        assert_eq!(snf.left, ModularMatrix::identity(z(2, 3), 2));
        assert_eq!(snf.right, ModularMatrix::identity(z(2, 3), 2));
    }

    #[test]
    fn snf_zero() {
        let m = ModularMatrix::zeros(z(5, 2), 2, 2);
        let snf = check_snf(&m);
        assert!(snf.diag.iter().all(Residue::is_zero));
    }

    #[test]
    fn snf_rank_one_over_z9() {
        let m = ModularMatrix::from_rows(z(3, 2), &[vec![1i64, 1], vec![1, 1]]).unwrap();
        let snf = check_snf(&m);
        assert_eq!(snf.diag.iter().map(Residue::value).collect::<Vec<_>>(), vec![1, 0]);
    }

    #[test]
    fn snf_rectangular_and_non_unit() {
        let m = ModularMatrix::from_rows(z(2, 4), &[vec![6i64, 4, 2], vec![12, 8, 10]]).unwrap();
        let snf = check_snf(&m);
        assert_eq!(snf.valuations(), vec![1, 1]);
        assert_eq!(cokernel_invariants(&m), vec![1, 1]);
    }

    #[test]
    fn membership_examples() {
        let md = z(3, 2);
        let s = SubmoduleBasis::new(md, 2, vec![vec![3, 0]]).unwrap();
        assert!(submodule_membership(&[0, 0], &s).unwrap());
        assert!(submodule_membership(&[3, 0], &s).unwrap());
        assert!(!submodule_membership(&[1, 0], &s).unwrap());
        assert!(submodule_membership(&[1, 0, 0], &s).is_err());
    }

    #[test]
    fn solve_examples() {
        let md = z(5, 2);
        let id = ModularMatrix::identity(md, 3);
        assert_eq!(solve_linear(&id, &[7, 0, 24]).unwrap(), Some(vec![7, 0, 24]));
        let pm = ModularMatrix::from_rows(md, &[vec![5i64]]).unwrap();
        assert_eq!(solve_linear(&pm, &[1]).unwrap(), None);
        let x = solve_linear(&pm, &[5]).unwrap().unwrap();
        assert_eq!(md.mul(5, x[0]), 5);
        assert!(solve_linear(&pm, &[1, 2]).is_err());
    }

    #[test]
    fn kernel_and_subquotient() {
        let md = z(2, 3);
        // d = multiplication by 4 on Z/8: kernel generated by 2.
        let d = ModularMatrix::from_rows(md, &[vec![4i64]]).unwrap();
        let k = kernel(&d);
        let ks = SubmoduleBasis::new(md, 1, k).unwrap();
        assert!(ks.contains(&[2]).unwrap());
        assert!(!ks.contains(&[1]).unwrap());
        // ker / (4) = (2)/(4) = Z/2
        let b = SubmoduleBasis::new(md, 1, vec![vec![4]]).unwrap();
        assert_eq!(subquotient_invariants(&ks, &b).unwrap(), vec![1]);
    }

    #[test]
    fn echelon_form_is_canonical_on_small_cases() {
        let md = z(2, 2);
        let a = SubmoduleBasis::new(md, 2, vec![vec![1, 2], vec![2, 0]]).unwrap().echelonize();
        let b = SubmoduleBasis::new(md, 2, vec![vec![3, 2], vec![0, 2], vec![1, 0]]).unwrap().echelonize();
        // both span {(1,2),(2,0)} = {(x,y): ...}; check equal canonical forms iff equal spans
        let same_span = a.is_contained_in(&b).unwrap() && b.is_contained_in(&a).unwrap();
        assert_eq!(same_span, a == b);
    }
}
