//! Universal p-typical Witt polynomials, built by ghost recursion over the
//! integers and memoized per `(p, r)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::intpoly::{IntPoly, Layout};
use super::WittError;
use crate::modarith::is_prime;

/// One term: integer coefficient, its residue mod p, and the sparse
/// exponent vector `(variable, exponent)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableTerm {
    pub coef: BigInt,
    pub coef_mod_p: u64,
    pub factors: Vec<(usize, u64)>,
}

/// Integer polynomial in the table variables. Terms are sorted by dense
/// exponent vector so evaluation order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TablePoly {
    pub terms: Vec<TableTerm>,
}

impl TablePoly {
    fn from_int(f: &IntPoly, layout: &Layout, p: u64) -> Self {
        let pb = BigInt::from(p);
        let terms = f
            .to_sorted(layout)
            .into_iter()
            .map(|(exps, coef)| {
                let mut m = &coef % &pb;
                if m < BigInt::zero() {
                    m += &pb;
                }
                TableTerm {
                    coef_mod_p: m.to_u64().expect("residue below p"),
                    coef,
                    factors: exps
                        .iter()
                        .enumerate()
                        .filter(|(_, e)| **e > 0)
                        .map(|(i, e)| (i, *e as u64))
                        .collect(),
                }
            })
            .collect();
        TablePoly { terms }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the monomial with the given dense exponents.
    pub fn coefficient(&self, exps: &[(usize, u64)]) -> BigInt {
        let mut key: Vec<(usize, u64)> = exps.iter().copied().filter(|(_, e)| *e > 0).collect();
        key.sort_unstable();
        self.terms
            .iter()
            .find(|t| t.factors == key)
            .map(|t| t.coef.clone())
            .unwrap_or_default()
    }
}

/// Caps on table generation; tables grow quickly with `p` and `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableLimits {
    pub max_level: usize,
    pub max_prime: u64,
}

impl Default for TableLimits {
    fn default() -> Self {
        TableLimits { max_level: 6, max_prime: 13 }
    }
}

/// Sum, product, negation and Frobenius polynomials for `W_r`.
///
/// Variables: `a_i` is index `i`, `b_i` is index `r + i`.
/// `S_n`, `P_n`, `N_n` involve only coordinates `<= n`; `F_n` involves `a_0..a_{n+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittPolynomialTable {
    pub p: u64,
    pub level: usize,
    pub sum: Vec<TablePoly>,
    pub prod: Vec<TablePoly>,
    pub neg: Vec<TablePoly>,
    pub frob: Vec<TablePoly>,
    /// `S_n` restricted to `a_i = b_i = 0` for `i >= 1`: the coordinates of
    /// `[a_0] + [b_0]`. Variables keep the table numbering.
    pub teich_sum: Vec<TablePoly>,
}

impl WittPolynomialTable {
    pub fn a(&self, i: usize) -> usize {
        i
    }

    pub fn b(&self, i: usize) -> usize {
        self.level + i
    }
}

fn ghost_polys(layout: &Layout, p: &BigInt, offset: usize, r: usize) -> Vec<IntPoly> {
    let pu = p.to_u64().expect("small prime");
    (0..r)
        .map(|n| {
            let mut w = IntPoly::zero();
            let mut pj = BigInt::from(1);
            for j in 0..=n {
                let e = pu.pow((n - j) as u32);
                w.add_assign_scaled(&IntPoly::monomial(layout.var(offset + j, e), pj.clone()), &BigInt::from(1));
                pj *= p;
            }
            w
        })
        .collect()
}

/// Solves `w_n(X) = target_n` for `n < len`, given the ghost targets.
fn ghost_solve(targets: &[IntPoly], p: u64, what: &str) -> Vec<IntPoly> {
    let pb = BigInt::from(p);
    let mut out: Vec<IntPoly> = Vec::with_capacity(targets.len());
    // powers[j] = out[j]^(p^(n-j)) for the current n
    let mut powers: Vec<IntPoly> = Vec::new();
    for (n, target) in targets.iter().enumerate() {
        for pw in powers.iter_mut() {
            *pw = pw.pow(p);
        }
        let mut rest = target.clone();
        let mut pj = BigInt::from(1);
        for pw in &powers {
            rest.add_assign_scaled(pw, &-pj.clone());
            pj *= &pb;
        }
        let next = rest
            .div_exact(&pj)
            .unwrap_or_else(|| panic!("inexact division building {what}_{n} for p = {p}"));
        powers.push(next.clone());
        out.push(next);
    }
    out
}

fn build(p: u64, r: usize) -> WittPolynomialTable {
    let max_exp = p.pow((r - 1) as u32);
    let layout = Layout::fitting(2 * r, max_exp).expect("checked by limits");
    let pb = BigInt::from(p);
    let wa = ghost_polys(&layout, &pb, 0, r);
    let wb = ghost_polys(&layout, &pb, r, r);

    let sums: Vec<IntPoly> = wa
        .iter()
        .zip(&wb)
        .map(|(x, y)| {
            let mut s = x.clone();
            s.add_assign_scaled(y, &BigInt::from(1));
            s
        })
        .collect();
    let prods: Vec<IntPoly> = wa.iter().zip(&wb).map(|(x, y)| x.mul(y)).collect();
    let negs: Vec<IntPoly> = wa.iter().map(IntPoly::neg).collect();
    let shifted: Vec<IntPoly> = wa[1..].to_vec();

    let conv = |v: Vec<IntPoly>| -> Vec<TablePoly> {
        v.iter().map(|f| TablePoly::from_int(f, &layout, p)).collect()
    };
    let sum = conv(ghost_solve(&sums, p, "S"));
    let teich_sum = sum
        .iter()
        .map(|f| TablePoly {
            terms: f
                .terms
                .iter()
                .filter(|t| t.factors.iter().all(|&(v, _)| v == 0 || v == r))
                .cloned()
                .collect(),
        })
        .collect();
    WittPolynomialTable {
        p,
        level: r,
        sum,
        teich_sum,
        prod: conv(ghost_solve(&prods, p, "P")),
        neg: conv(ghost_solve(&negs, p, "N")),
        frob: conv(ghost_solve(&shifted, p, "F")),
    }
}

type Slot = Arc<OnceLock<Arc<WittPolynomialTable>>>;

fn registry() -> &'static Mutex<HashMap<(u64, usize), Slot>> {
    static TABLES: OnceLock<Mutex<HashMap<(u64, usize), Slot>>> = OnceLock::new();
    TABLES.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoized table for `W_r` with the default limits.
pub fn build_witt_table(p: u64, r: usize) -> Result<Arc<WittPolynomialTable>, WittError> {
    build_witt_table_with_limits(p, r, TableLimits::default())
}

pub fn build_witt_table_with_limits(
    p: u64,
    r: usize,
    limits: TableLimits,
) -> Result<Arc<WittPolynomialTable>, WittError> {
    if !is_prime(p) {
        return Err(WittError::NotPrime(p));
    }
    if r == 0 {
        return Err(WittError::ZeroLevel);
    }
    if p > limits.max_prime || r > limits.max_level {
        return Err(WittError::TableTooLarge { p, r });
    }
    let fits = p
        .checked_pow(r as u32 - 1)
        .and_then(|m| Layout::fitting(2 * r, m))
        .is_some();
    if !fits {
        return Err(WittError::TableTooLarge { p, r });
    }
    let slot = {
        let mut map = registry().lock().unwrap_or_else(|e| e.into_inner());
        map.entry((p, r)).or_default().clone()
    };
    Ok(slot.get_or_init(|| Arc::new(build(p, r))).clone())
}
