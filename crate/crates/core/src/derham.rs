//! Kähler differential forms over presented `F_p`-algebras and the exact
//! presentation of the top exterior power.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use crate::polyring::PresentedRing;
use crate::polyring::{Ideal, PolyError, Polynomial, PolynomialJson};

/// `sum_S c_S dx_S` with `S` a strictly increasing list of variable indices.
///
/// Coefficients are normal forms mod `I`. Outside top degree a form is only a
/// representative: a zero representative proves the form vanishes, a nonzero
/// one proves nothing.
#[derive(Debug, Clone)]
pub struct DifferentialForm {
    ring: Arc<PresentedRing>,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Polynomial>,
}

impl PartialEq for DifferentialForm {
    fn eq(&self, other: &Self) -> bool {
        self.ring.ring() == other.ring.ring() && self.degree == other.degree && self.terms == other.terms
    }
}

/// Sign of the permutation sorting `s ++ t`, or `None` if they overlap.
fn merge_sign(s: &[usize], t: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut inversions = 0usize;
    for &a in s {
        for &b in t {
            if a == b {
                return None;
            }
            if a > b {
                inversions += 1;
            }
        }
    }
    let mut merged: Vec<usize> = s.iter().chain(t).copied().collect();
    merged.sort_unstable();
    Some((merged, inversions % 2 == 1))
}

impl DifferentialForm {
    pub fn zero(ring: &Arc<PresentedRing>, degree: usize) -> Self {
        DifferentialForm {
            ring: ring.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The 0-form `c`.
    pub fn function(ring: &Arc<PresentedRing>, c: &Polynomial) -> Self {
        Self::term(ring, Vec::new(), c).expect("empty subset is valid")
    }

    /// `dx_i`.
    pub fn dx(ring: &Arc<PresentedRing>, i: usize) -> Result<Self, PolyError> {
        Self::term(ring, vec![i], &ring.one())
    }

    /// `c dx_{s_1} ∧ ... ∧ dx_{s_q}` for an arbitrary index sequence.
    pub fn term(ring: &Arc<PresentedRing>, subset: Vec<usize>, c: &Polynomial) -> Result<Self, PolyError> {
        let n = ring.num_vars();
        if let Some(&bad) = subset.iter().find(|&&i| i >= n) {
            return Err(PolyError::VariableOutOfRange { index: bad, num_vars: n });
        }
        if c.ring() != ring.ring() {
            return Err(PolyError::RingMismatch);
        }
        let mut out = Self::zero(ring, subset.len());
        // sort by insertion, tracking the sign
        let mut sorted: Vec<usize> = Vec::with_capacity(subset.len());
        let mut negative = false;
        for i in subset {
            match merge_sign(&sorted, &[i]) {
                None => return Ok(out),
                Some((m, s)) => {
                    sorted = m;
                    negative ^= s;
                }
            }
        }
        let c = ring.reduce(c);
        out.accumulate(sorted, if negative { c.neg() } else { c });
        Ok(out)
    }

    fn accumulate(&mut self, subset: Vec<usize>, c: Polynomial) {
        if c.is_zero() {
            return;
        }
        let next = match self.terms.get(&subset) {
            Some(old) => old.try_add(&c).expect("same ring"),
            None => c,
        };
        if next.is_zero() {
            self.terms.remove(&subset);
        } else {
            self.terms.insert(subset, next);
        }
    }

    pub fn ring(&self) -> &Arc<PresentedRing> {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Polynomial> {
        &self.terms
    }

    /// True when the representative is zero (sound, not complete, below top degree).
    pub fn is_zero_representative(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, subset: &[usize]) -> Polynomial {
        self.terms.get(subset).cloned().unwrap_or_else(|| self.ring.zero())
    }

    fn check_compatible(&self, other: &Self) -> Result<(), PolyError> {
        if self.ring.ring() != other.ring.ring() {
            Err(PolyError::RingMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(PolyError::RingMismatch);
        }
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.accumulate(s.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        DifferentialForm {
            ring: self.ring.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    /// Multiplication by a function.
    pub fn scale(&self, f: &Polynomial) -> Result<Self, PolyError> {
        let mut out = Self::zero(&self.ring, self.degree);
        for (s, c) in &self.terms {
            out.accumulate(s.clone(), self.ring.mul(c, f)?);
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compatible(other)?;
        let mut out = Self::zero(&self.ring, self.degree + other.degree);
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                if let Some((m, negative)) = merge_sign(s, t) {
                    let c = self.ring.mul(a, b)?;
                    out.accumulate(m, if negative { c.neg() } else { c });
                }
            }
        }
        Ok(out)
    }

    /// `d(c dx_S) = sum_i (∂c/∂x_i) dx_i ∧ dx_S`, computed on representatives.
    pub fn exterior_d(&self) -> Self {
        let mut out = Self::zero(&self.ring, self.degree + 1);
        for (s, c) in &self.terms {
            for i in 0..self.ring.num_vars() {
                let di = c.partial_derivative(i).expect("index in range");
                if di.is_zero() {
                    continue;
                }
                if let Some((m, negative)) = merge_sign(&[i], s) {
                    let di = self.ring.reduce(&di);
                    out.accumulate(m, if negative { di.neg() } else { di });
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(s, c)| FormTermJson { subset: s.clone(), coef: c.to_json() })
                .collect(),
        }
    }

    pub fn from_json(ring: &Arc<PresentedRing>, j: &FormJson) -> Result<Self, PolyError> {
        let mut out = Self::zero(ring, j.degree);
        for t in &j.terms {
            if t.subset.len() != j.degree {
                return Err(PolyError::Json(format!(
                    "subset {:?} does not have {} elements",
                    t.subset, j.degree
                )));
            }
            let c = Polynomial::from_json_in(ring.ring(), &t.coef)?;
            out = out.add(&Self::term(ring, t.subset.clone(), &c)?)?;
        }
        Ok(out)
    }
}

/// `{"degree": q, "terms": [{"subset": [indices], "coef": polynomial}]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub degree: usize,
    pub terms: Vec<FormTermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormTermJson {
    pub subset: Vec<usize>,
    pub coef: PolynomialJson,
}

/// `Ω^n_{k[x]/I} ≅ k[x]/J_top` via `c ω ↦ c`, where `ω = dx_1 ∧ ... ∧ dx_n` and
/// `J_top = I + (∂f/∂x_i : f a generator of I)`.
///
/// Partials of every element of `I` land in `J_top` since
/// `∂(q f) = q ∂f + f ∂q ≡ q ∂f mod I`.
#[derive(Debug, Clone)]
pub struct TopFormPresentation {
    ring: Arc<PresentedRing>,
    j_top: Ideal,
}

impl TopFormPresentation {
    pub fn ring(&self) -> &Arc<PresentedRing> {
        &self.ring
    }

    pub fn ideal(&self) -> &Ideal {
        &self.j_top
    }

    /// Whether `c ω = 0` in `Ω^n_R`.
    pub fn is_zero(&self, c: &Polynomial) -> Result<bool, PolyError> {
        self.j_top.contains(c)
    }

    /// Exact zero test for a top-degree form.
    pub fn form_is_zero(&self, f: &DifferentialForm) -> Result<bool, PolyError> {
        let n = self.ring.num_vars();
        if f.degree() > n {
            return Ok(true);
        }
        if f.degree() != n {
            return Err(PolyError::Json(format!("expected a form of degree {n}, got {}", f.degree())));
        }
        let full: Vec<usize> = (0..n).collect();
        self.is_zero(&f.coefficient(&full))
    }

    /// Whether `Ω^n_R` itself is zero.
    pub fn omega_vanishes(&self) -> bool {
        self.j_top.is_unit()
    }
}

pub fn top_form_presentation(ring: &Arc<PresentedRing>) -> Result<TopFormPresentation, PolyError> {
    let ideal = ring.ideal();
    let mut extra = Vec::new();
    for f in ideal.generators() {
        for i in 0..ring.num_vars() {
            let d = f.partial_derivative(i)?;
            if !d.is_zero() {
                extra.push(d);
            }
        }
    }
    let j_top = ideal.extended(extra)?.computed()?;
    Ok(TopFormPresentation { ring: ring.clone(), j_top })
}

pub fn top_form_is_zero_in_omega(c: &Polynomial, t: &TopFormPresentation) -> Result<bool, PolyError> {
    t.is_zero(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{parse_polynomial, PolyRing};

    fn presented(p: u64, vars: &[&str], gens: &[&str]) -> Arc<PresentedRing> {
        let r = PolyRing::new(p, vars.iter().map(|s| s.to_string()).collect()).unwrap();
        Arc::new(PresentedRing::from_text(&r, gens).unwrap())
    }

    #[test]
    fn leibniz_on_xy() {
        let a = presented(5, &["x", "y"], &[]);
        let xy = DifferentialForm::function(&a, &a.parse("x*y").unwrap());
        let expect = DifferentialForm::dx(&a, 1)
            .unwrap()
            .scale(&a.parse("x").unwrap())
            .unwrap()
            .add(&DifferentialForm::dx(&a, 0).unwrap().scale(&a.parse("y").unwrap()).unwrap())
            .unwrap();
        assert_eq!(xy.exterior_d(), expect);
        assert!(xy.exterior_d().exterior_d().is_zero_representative());
    }

    #[test]
    fn top_degree_derivative_vanishes() {
        let a = presented(3, &["x"], &[]);
        let f = DifferentialForm::term(&a, vec![0], &a.parse("x^2").unwrap()).unwrap();
        assert!(f.exterior_d().is_zero_representative());
    }

    #[test]
    fn wedge_signs() {
        let a = presented(7, &["x", "y"], &[]);
        let dx = DifferentialForm::dx(&a, 0).unwrap();
        let dy = DifferentialForm::dx(&a, 1).unwrap();
        assert!(dx.wedge(&dx).unwrap().is_zero_representative());
        assert_eq!(dx.wedge(&dy).unwrap(), dy.wedge(&dx).unwrap().neg());
        let lhs = dy.scale(&a.parse("x").unwrap()).unwrap().wedge(&dx.scale(&a.parse("y").unwrap()).unwrap()).unwrap();
        let rhs = dx.wedge(&dy).unwrap().scale(&a.parse("-x*y").unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(DifferentialForm::term(&a, vec![1, 0], &a.one()).unwrap(), dx.wedge(&dy).unwrap().neg());
    }

    #[test]
    fn cusp_top_presentation() {
        let a = presented(5, &["x", "y"], &["y^2 - x^3"]);
        let t = top_form_presentation(&a).unwrap();
        let r = a.ring();
        let expect = Ideal::new(r, vec![parse_polynomial(r, "y").unwrap(), parse_polynomial(r, "x^2").unwrap()]).unwrap();
        assert!(t.ideal().same_ideal(&expect).unwrap());
        assert!(!t.is_zero(&a.one()).unwrap());
        assert!(t.is_zero(&a.parse("y").unwrap()).unwrap());
        assert!(t.is_zero(&parse_polynomial(r, "y^2 - x^3").unwrap()).unwrap());
    }

    #[test]
    fn free_and_unit_cases() {
        let free = presented(3, &["x", "y"], &[]);
        let t = top_form_presentation(&free).unwrap();
        assert!(t.ideal().is_zero());
        assert!(!t.is_zero(&free.parse("x").unwrap()).unwrap());
        assert!(t.is_zero(&free.zero()).unwrap());
        let unit = presented(3, &["x"], &["1"]);
        assert!(top_form_presentation(&unit).unwrap().omega_vanishes());
    }

    #[test]
    fn json_round_trip() {
        let a = presented(5, &["x", "y", "z"], &[]);
        let f = DifferentialForm::term(&a, vec![2, 0], &a.parse("x + 3y").unwrap()).unwrap();
        let j = serde_json::to_string(&f.to_json()).unwrap();
        assert_eq!(DifferentialForm::from_json(&a, &serde_json::from_str(&j).unwrap()).unwrap(), f);
    }
}
