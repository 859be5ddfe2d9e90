//! Buchberger's algorithm over `F_p` with the sugar selection strategy and
//! the Gebauer-Möller pair criteria.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Monomial, PolyError, PolyRing, Polynomial, TermOrder};
use crate::modarith::Modulus;

/// A reduced Gröbner basis together with the order it was computed for.
///
/// Elements are monic and sorted by leading monomial, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    pub order: TermOrder,
    pub basis: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant() && !self.basis[0].is_zero()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        normal_form_by(f, &self.basis, &self.order)
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.basis
            .iter()
            .filter_map(|g| g.leading_term(&self.order).map(|(m, _)| m.clone()))
            .collect()
    }
}

/// Terms sorted descending under an order; coefficients nonzero.
#[derive(Clone, Debug)]
struct SortedPoly {
    terms: Vec<(Monomial, u64)>,
}

impl SortedPoly {
    fn from_poly(f: &Polynomial, order: &TermOrder) -> Self {
        SortedPoly {
            terms: f.sorted_terms(order).into_iter().map(|(m, c)| (m.clone(), c)).collect(),
        }
    }

    fn to_poly(&self, ring: &Arc<PolyRing>) -> Polynomial {
        Polynomial::from_map(ring, self.terms.iter().cloned().collect::<BTreeMap<_, _>>())
    }

    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    fn make_monic(&mut self, md: Modulus) {
        if let Some(&(_, c)) = self.terms.first() {
            if c != 1 {
                let inv = md.inv(c);
                for t in self.terms.iter_mut() {
                    t.1 = md.mul(t.1, inv);
                }
            }
        }
    }
}

/// `a - c * m * b`, where `a`, `b` are sorted descending.
fn sub_scaled(
    a: &[(Monomial, u64)],
    b: &[(Monomial, u64)],
    c: u64,
    m: &Monomial,
    order: &TermOrder,
    md: Modulus,
) -> Vec<(Monomial, u64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let neg_c = md.neg(c);
    let mut pending: Option<(Monomial, u64)> = None;
    loop {
        if pending.is_none() && j < b.len() {
            let (bm, bc) = &b[j];
            pending = Some((bm.mul(m), md.mul(*bc, neg_c)));
        }
        match (i < a.len(), pending.take()) {
            (false, None) => break,
            (true, None) => {
                out.extend_from_slice(&a[i..]);
                break;
            }
            (false, Some(t)) => {
                out.push(t);
                j += 1;
            }
            (true, Some(t)) => match order.cmp(&a[i].0, &t.0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                    pending = Some(t);
                }
                Ordering::Less => {
                    out.push(t);
                    j += 1;
                }
                Ordering::Equal => {
                    let s = md.add(a[i].1, t.1);
                    if s != 0 {
                        out.push((t.0, s));
                    }
                    i += 1;
                    j += 1;
                }
            },
        }
    }
    out
}

/// Full reduction of `f` by `basis` (each element monic).
fn reduce(f: &SortedPoly, basis: &[SortedPoly], order: &TermOrder, md: Modulus) -> SortedPoly {
    let mut rem: Vec<(Monomial, u64)> = Vec::new();
    let mut cur = f.terms.clone();
    let mut start = 0;
    while start < cur.len() {
        let (lm, lc) = (&cur[start].0, cur[start].1);
        let divisor = basis.iter().find(|g| !g.is_zero() && g.lm().divides(lm));
        match divisor {
            Some(g) => {
                let q = g.lm().quotient_of(lm);
                let gc = g.terms[0].1;
                let c = if gc == 1 { lc } else { md.mul(lc, md.inv(gc)) };
                cur = sub_scaled(&cur[start + 1..], &g.terms[1..], c, &q, order, md);
                start = 0;
            }
            None => {
                rem.push(cur[start].clone());
                start += 1;
            }
        }
    }
    SortedPoly { terms: rem }
}

fn s_polynomial(f: &SortedPoly, g: &SortedPoly, order: &TermOrder, md: Modulus) -> SortedPoly {
    let l = f.lm().lcm(g.lm());
    let mf = f.lm().quotient_of(&l);
    let mg = g.lm().quotient_of(&l);
    let a: Vec<(Monomial, u64)> = f.terms[1..]
        .iter()
        .map(|(m, c)| (m.mul(&mf), *c))
        .collect();
    SortedPoly {
        terms: sub_scaled(&a, &g.terms[1..], 1, &mg, order, md),
    }
}

/// Remainder of `f` on division by `basis` (full reduction, basis need not be monic).
pub fn normal_form_by(f: &Polynomial, basis: &[Polynomial], order: &TermOrder) -> Polynomial {
    let md = f.ring().modulus();
    let sorted: Vec<SortedPoly> = basis.iter().map(|g| SortedPoly::from_poly(g, order)).collect();
    reduce(&SortedPoly::from_poly(f, order), &sorted, order, md).to_poly(f.ring())
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn buchberger_basis(
    ring: &Arc<PolyRing>,
    gens: &[Polynomial],
    order: &TermOrder,
) -> Result<GroebnerBasis, PolyError> {
    ring.require_field()?;
    let md = ring.modulus();
    let mut basis: Vec<SortedPoly> = Vec::new();
    for g in gens {
        if g.ring() != ring {
            return Err(PolyError::RingMismatch);
        }
        let mut s = SortedPoly::from_poly(g, order);
        if s.is_zero() {
            continue;
        }
        s.make_monic(md);
        basis.push(s);
    }
    if basis.iter().any(|b| b.lm().is_one()) {
        return Ok(unit_basis(ring, order));
    }

    // sugar strategy with the Gebauer-Möller criteria
    let mut sugar: Vec<u32> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let inputs = std::mem::take(&mut basis);
    for s in inputs {
        if basis.iter().any(|b| b.terms == s.terms) {
            continue;
        }
        sugar.push(s.degree());
        add_element(&mut basis, &mut active, &sugar, &mut pairs, s);
    }
    while !pairs.is_empty() {
        let (best, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                a.sugar
                    .cmp(&b.sugar)
                    .then_with(|| order.cmp(&a.lcm, &b.lcm))
                    .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
            })
            .expect("nonempty");
        let pair = pairs.swap_remove(best);
        let s = s_polynomial(&basis[pair.i], &basis[pair.j], order, md);
        let mut r = reduce(&s, &basis, order, md);
        if r.is_zero() {
            continue;
        }
        r.make_monic(md);
        if r.lm().is_one() {
            return Ok(unit_basis(ring, order));
        }
        sugar.push(pair.sugar.max(r.degree()));
        add_element(&mut basis, &mut active, &sugar, &mut pairs, r);
    }

    Ok(GroebnerBasis {
        order: order.clone(),
        basis: auto_reduce(basis, order, md)
            .into_iter()
            .map(|s| s.to_poly(ring))
            .collect(),
    })
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

/// Appends `h` to the basis and updates the pair set (Gebauer-Möller).
/// `sugar[k]` must already hold the sugar of `h`, with `k = basis.len()`.
fn add_element(
    basis: &mut Vec<SortedPoly>,
    active: &mut Vec<bool>,
    sugar: &[u32],
    pairs: &mut Vec<Pair>,
    h: SortedPoly,
) {
    let k = basis.len();
    let hl = h.lm().clone();
    let sh = sugar[k];
    let pair_sugar = |i: usize, l: &Monomial| {
        let si = sugar[i] + l.degree() - basis[i].lm().degree();
        let sk = sh + l.degree() - hl.degree();
        si.max(sk)
    };
    // candidate pairs (i, k)
    let mut cands: Vec<(usize, Monomial, bool)> = (0..k)
        .filter(|&i| active[i])
        .map(|i| (i, basis[i].lm().lcm(&hl), basis[i].lm().is_coprime(&hl)))
        .collect();
    // M: drop pairs whose lcm is a proper multiple of another candidate's
    let snapshot = cands.clone();
    cands.retain(|(_, l, _)| !snapshot.iter().any(|(_, l2, _)| l2 != l && l2.divides(l)));
    // F: one pair per lcm, none at all if some pair with that lcm is coprime
    let mut kept: Vec<(usize, Monomial, bool)> = Vec::new();
    for c in cands {
        if let Some(e) = kept.iter_mut().find(|e| e.1 == c.1) {
            e.2 |= c.2;
        } else {
            kept.push(c);
        }
    }
    // B: old pairs made redundant by h
    pairs.retain(|p| {
        !(hl.divides(&p.lcm)
            && basis[p.i].lm().lcm(&hl) != p.lcm
            && basis[p.j].lm().lcm(&hl) != p.lcm)
    });
    for (i, l, coprime) in kept {
        if !coprime {
            let s = pair_sugar(i, &l);
            pairs.push(Pair { i, j: k, lcm: l, sugar: s });
        }
    }
    for (i, a) in active.iter_mut().enumerate() {
        if *a && hl.divides(basis[i].lm()) {
            *a = false;
        }
    }
    basis.push(h);
    active.push(true);
}

fn unit_basis(ring: &Arc<PolyRing>, order: &TermOrder) -> GroebnerBasis {
    GroebnerBasis {
        order: order.clone(),
        basis: vec![Polynomial::one(ring)],
    }
}

/// Minimalizes and inter-reduces a Gröbner basis, returning it sorted by
/// leading monomial, ascending.
fn auto_reduce(basis: Vec<SortedPoly>, order: &TermOrder, md: Modulus) -> Vec<SortedPoly> {
    let mut minimal: Vec<SortedPoly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            j != i && h.lm().divides(g.lm()) && (h.lm() != g.lm() || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    minimal.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<SortedPoly> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let head = minimal[i].terms[0].clone();
        let tail = SortedPoly {
            terms: minimal[i].terms[1..].to_vec(),
        };
        let mut reduced = reduce(&tail, &others, order, md);
        reduced.terms.insert(0, head);
        reduced.make_monic(md);
        out.push(reduced);
    }
    out
}
