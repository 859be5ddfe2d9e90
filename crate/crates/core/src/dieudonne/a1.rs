//! The weight-truncated de Rham–Witt complex of `F_p[T]`.
//!
//! Realized inside `Z_p[T^{1/p^∞}]`: the degree-0 basis vector of weight
//! `k` is `e_k = p^{u(k)} T^k` with `u(k) = max(0, -v_p(k))`, so
//! `[T]^k = e_k` and `V^j[T]^m = e_{m/p^j}`. In degree 1, with
//! `θ_k = T^k dlog T`, the basis is `[T]^{k-1}d[T] = θ_k` for integral `k`
//! and `dV^j[T]^m = m θ_{m/p^j}` otherwise. Then `F` is `T ↦ T^p`,
//! `V = p F^{-1}` and `d T^k = k θ_k`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{BasisElement, DieudonneModel, ModelError, Op, SparseVec, Truncation, Weight};
use crate::modarith::Modulus;

fn teich(m: u64) -> String {
    if m == 1 {
        "[T]".to_string()
    } else {
        format!("[T]^{m}")
    }
}

fn v_pow(j: u32) -> String {
    if j == 1 {
        "V".to_string()
    } else {
        format!("V^{j}")
    }
}

fn label(degree: i32, w: &Weight) -> String {
    match (degree, w.depth()) {
        (0, _) if w.is_zero() => "1".to_string(),
        (0, 0) => teich(w.num()),
        (0, j) => format!("{}{}", v_pow(j), teich(w.num())),
        (_, 0) if w.num() == 1 => "d[T]".to_string(),
        (_, 0) => format!("{}d[T]", teich(w.num() - 1)),
        (_, j) => format!("d{}{}", v_pow(j), teich(w.num())),
    }
}

/// `u(k)`: the power of `p` in front of `T^k` in `e_k`.
fn u(w: &Weight) -> u32 {
    w.depth()
}

/// The A¹ model together with its parameters and on-demand products.
#[derive(Debug, Clone)]
pub struct A1Model {
    model: DieudonneModel,
    wmax: u64,
    max_depth: u32,
}

/// Outcome of the multiplicative identities checked on the A¹ model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductReport {
    pub checked: BTreeMap<String, usize>,
    pub violations: Vec<String>,
}

impl ProductReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Model with depth bound `N`.
pub fn a1_model(p: u64, wmax: u64, n_exp: u32) -> Result<A1Model, ModelError> {
    a1_model_with_depth(p, wmax, n_exp, n_exp)
}

pub fn a1_model_with_depth(p: u64, wmax: u64, n_exp: u32, max_depth: u32) -> Result<A1Model, ModelError> {
    if wmax < 1 {
        return Err(ModelError::InvalidParameters("wmax must be at least 1".into()));
    }
    if n_exp < 2 {
        return Err(ModelError::InvalidParameters("N must be at least 2".into()));
    }
    let md = Modulus::new(p, n_exp)?;
    let den_max = p
        .checked_pow(max_depth)
        .and_then(|d| d.checked_mul(wmax))
        .filter(|&x| x <= 1 << 20)
        .ok_or_else(|| ModelError::InvalidParameters("truncation too large".into()))?;
    let _ = den_max;

    let mut weights = vec![Weight::zero()];
    for j in 0..=max_depth {
        let den = p.pow(j);
        for m in 1..=wmax * den {
            if j > 0 && m % p == 0 {
                continue;
            }
            weights.push(Weight::new(m, j, p)?);
        }
    }
    weights.sort();

    let mut basis = Vec::new();
    for w in &weights {
        basis.push(BasisElement { label: label(0, w), degree: 0, weight: *w });
    }
    for w in weights.iter().filter(|w| !w.is_zero()) {
        basis.push(BasisElement { label: label(1, w), degree: 1, weight: *w });
    }

    let trunc = Truncation { wmax: Weight::integer(wmax), max_depth };
    let inside = |w: &Weight| *w <= trunc.wmax && w.depth() <= max_depth;
    // c_k: degree-1 basis vector is c_k θ_k
    let c = |w: &Weight| if w.is_integral() { 1 } else { md.reduce(w.num()) };
    let int = |x: u64| md.reduce(x) as i64;

    let (mut d, mut f, mut v) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
    for w in &weights {
        let l0 = label(0, w);
        // d e_k = p^{u(k)} k θ_k
        let dv = if w.is_zero() {
            vec![]
        } else if w.is_integral() {
            vec![(label(1, w), int(w.num()))]
        } else {
            vec![(label(1, w), 1)]
        };
        d.insert(l0.clone(), dv);
        let pw = w.times_p(p);
        if inside(&pw) {
            // F e_k = p^{u(k) - u(pk)} e_{pk}
            let coef = md.p_pow(u(w) - u(&pw));
            f.insert(l0.clone(), vec![(label(0, &pw), coef as i64)]);
        }
        let qw = w.div_p(p);
        if inside(&qw) {
            // V e_k = p^{1 + u(k) - u(k/p)} e_{k/p}
            let coef = md.p_pow(1 + u(w) - u(&qw));
            v.insert(l0, vec![(label(0, &qw), coef as i64)]);
        }
        if w.is_zero() {
            continue;
        }
        let l1 = label(1, w);
        d.insert(l1.clone(), vec![]);
        if inside(&pw) {
            // F θ_k = θ_{pk}
            let coef = md.mul(c(w), md.inv(c(&pw)));
            f.insert(l1.clone(), vec![(label(1, &pw), coef as i64)]);
        }
        if inside(&qw) {
            // V θ_k = p θ_{k/p}
            let coef = md.mul(md.p_pow(1), md.mul(c(w), md.inv(c(&qw))));
            v.insert(l1, vec![(label(1, &qw), coef as i64)]);
        }
    }
    let model = DieudonneModel::new(p, n_exp, basis, [d, f, v], Some(trunc))?;
    Ok(A1Model { model, wmax, max_depth })
}

impl A1Model {
    pub fn model(&self) -> &DieudonneModel {
        &self.model
    }

    pub fn into_model(self) -> DieudonneModel {
        self.model
    }

    pub fn wmax(&self) -> u64 {
        self.wmax
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    fn md(&self) -> Modulus {
        self.model.modulus()
    }

    fn c(&self, w: &Weight) -> u64 {
        if w.is_integral() {
            1
        } else {
            self.md().reduce(w.num())
        }
    }

    /// Basis index of the element of the given degree and weight.
    pub fn index(&self, degree: i32, w: &Weight) -> Option<usize> {
        self.model.index_of(&label(degree, w))
    }

    /// `[T]^k` as a vector.
    pub fn teichmuller_power(&self, k: u64) -> Option<SparseVec> {
        self.index(0, &Weight::integer(k)).map(|i| self.model.basis_vec(i))
    }

    fn basis_product(&self, i: usize, j: usize) -> Option<SparseVec> {
        let md = self.md();
        let p = self.model.p();
        let (a, b) = (&self.model.basis()[i], &self.model.basis()[j]);
        let (a, b) = if a.degree <= b.degree { (a, b) } else { (b, a) };
        let w = a.weight.add(&b.weight, p);
        match (a.degree, b.degree) {
            (0, 0) => {
                // e_a e_b = p^{u(a) + u(b) - u(a+b)} e_{a+b}
                let target = self.index(0, &w)?;
                let coef = md.p_pow(u(&a.weight) + u(&b.weight) - u(&w));
                Some(self.model.scale(&self.model.basis_vec(target), coef))
            }
            (0, 1) => {
                // e_a · c_b θ_b = p^{u(a)} c_b / c_{a+b} · (c_{a+b} θ_{a+b})
                let target = self.index(1, &w)?;
                let coef = md.mul(md.p_pow(u(&a.weight)), md.mul(self.c(&b.weight), md.inv(self.c(&w))));
                Some(self.model.scale(&self.model.basis_vec(target), coef))
            }
            _ => Some(SparseVec::new()),
        }
    }

    /// Product of two elements; `None` if it leaves the truncation.
    pub fn mul(&self, x: &SparseVec, y: &SparseVec) -> Option<SparseVec> {
        let md = self.md();
        let mut out = SparseVec::new();
        for (&i, &a) in x {
            for (&j, &b) in y {
                for (k, c) in self.basis_product(i, j)? {
                    let e = out.entry(k).or_insert(0);
                    *e = md.add(*e, md.mul(c, md.mul(a, b)));
                }
            }
        }
        out.retain(|_, c| *c != 0);
        Some(out)
    }

    fn add(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let md = self.md();
        let mut out = x.clone();
        for (&i, &c) in y {
            let e = out.entry(i).or_insert(0);
            *e = md.add(*e, c);
        }
        out.retain(|_, c| *c != 0);
        out
    }

    /// Checks `F[T] = [T]^p`, `F(d[T]) = [T]^{p-1} d[T]`, the Leibniz rule
    /// and the projection formula `V(x F y) = V(x) y` wherever defined.
    pub fn check_products(&self) -> ProductReport {
        let m = &self.model;
        let p = m.p();
        let mut checked: BTreeMap<String, usize> = BTreeMap::new();
        let mut violations = Vec::new();
        let mut record = |name: &str, ok: bool, what: String| {
            *checked.entry(name.to_string()).or_default() += 1;
            if !ok {
                violations.push(format!("{name}: {what}"));
            }
        };

        if let (Some(t), Some(dt)) = (self.teichmuller_power(1), self.index(1, &Weight::integer(1))) {
            let dt = m.basis_vec(dt);
            if let Some(ft) = m.apply(Op::F, &t) {
                let pow = (1..p).try_fold(t.clone(), |acc, _| self.mul(&acc, &t));
                if let Some(pow) = pow {
                    record("F[T] = [T]^p", ft == pow, format!("{:?} vs {:?}", m.labelled(&ft), m.labelled(&pow)));
                }
            }
            if let Some(fdt) = m.apply(Op::F, &dt) {
                let rhs = self.teichmuller_power(p - 1).and_then(|tp| self.mul(&tp, &dt));
                if let Some(rhs) = rhs {
                    record(
                        "F(d[T]) = [T]^(p-1) d[T]",
                        fdt == rhs,
                        format!("{:?} vs {:?}", m.labelled(&fdt), m.labelled(&rhs)),
                    );
                }
            }
        }

        let deg0: Vec<usize> = (0..m.dim()).filter(|&i| m.basis()[i].degree == 0).collect();
        for &i in &deg0 {
            for &j in &deg0 {
                let (x, y) = (m.basis_vec(i), m.basis_vec(j));
                if j >= i {
                    if let Some(xy) = self.mul(&x, &y) {
                        let lhs = m.apply(Op::D, &xy);
                        let rhs = (|| {
                            let a = self.mul(&m.apply(Op::D, &x)?, &y)?;
                            let b = self.mul(&x, &m.apply(Op::D, &y)?)?;
                            Some(self.add(&a, &b))
                        })();
                        if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
                            record("Leibniz", lhs == rhs, format!("{} * {}", m.label(i), m.label(j)));
                        }
                    }
                }
                let proj = (|| {
                    let lhs = m.apply(Op::V, &self.mul(&x, &m.apply(Op::F, &y)?)?)?;
                    let rhs = self.mul(&m.apply(Op::V, &x)?, &y)?;
                    Some((lhs, rhs))
                })();
                if let Some((lhs, rhs)) = proj {
                    record("V(x Fy) = V(x) y", lhs == rhs, format!("x = {}, y = {}", m.label(i), m.label(j)));
                }
            }
        }
        ProductReport { checked, violations }
    }
}
