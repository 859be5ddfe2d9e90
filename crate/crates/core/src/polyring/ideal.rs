use std::sync::Arc;

use super::groebner::{buchberger_basis, normal_form_by, GroebnerBasis};
use super::{Monomial, PolyError, PolyRing, Polynomial, TermOrder};

/// An ideal given by generators, with an optional reduced Gröbner basis.
///
/// The basis is only ever computed by an explicit call ([`buchberger`] or
/// [`Ideal::with_groebner`]); nothing is cached lazily.
#[derive(Debug, Clone)]
pub struct Ideal {
    ring: Arc<PolyRing>,
    generators: Vec<Polynomial>,
    gb: Option<GroebnerBasis>,
}

impl Ideal {
    pub fn new(ring: &Arc<PolyRing>, generators: Vec<Polynomial>) -> Result<Self, PolyError> {
        for g in &generators {
            if g.ring() != ring {
                return Err(PolyError::RingMismatch);
            }
        }
        Ok(Ideal {
            ring: ring.clone(),
            generators,
            gb: None,
        })
    }

    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Ideal {
            ring: ring.clone(),
            generators: Vec::new(),
            gb: None,
        }
    }

    pub fn unit(ring: &Arc<PolyRing>) -> Self {
        Ideal {
            ring: ring.clone(),
            generators: vec![Polynomial::one(ring)],
            gb: None,
        }
    }

    /// Copy with a reduced Gröbner basis for `order`.
    pub fn with_groebner(&self, order: &TermOrder) -> Result<Self, PolyError> {
        if let Some(gb) = &self.gb {
            if &gb.order == order {
                return Ok(self.clone());
            }
        }
        let gb = buchberger_basis(&self.ring, &self.generators, order)?;
        debug_assert!(self.generators.iter().all(|g| gb.normal_form(g).is_zero()));
        Ok(Ideal {
            ring: self.ring.clone(),
            generators: self.generators.clone(),
            gb: Some(gb),
        })
    }

    /// Default (grevlex) Gröbner basis.
    pub fn computed(&self) -> Result<Self, PolyError> {
        match &self.gb {
            Some(_) => Ok(self.clone()),
            None => self.with_groebner(&TermOrder::grevlex()),
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn groebner(&self) -> Option<&GroebnerBasis> {
        self.gb.as_ref()
    }

    fn require_gb(&self) -> Result<&GroebnerBasis, PolyError> {
        match &self.gb {
            Some(gb) => Ok(gb),
            None => Err(PolyError::MissingGroebner),
        }
    }

    /// Reduced basis (the cached one); generators are returned when absent.
    pub fn basis(&self) -> &[Polynomial] {
        match &self.gb {
            Some(gb) => &gb.basis,
            None => &self.generators,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.gb {
            Some(gb) => gb.is_zero_ideal(),
            None => self.generators.iter().all(Polynomial::is_zero),
        }
    }

    /// Needs a Gröbner basis to decide; without one, only detects explicit units.
    pub fn is_unit(&self) -> bool {
        match &self.gb {
            Some(gb) => gb.is_unit(),
            None => self
                .generators
                .iter()
                .any(|g| g.is_constant() && !g.is_zero()),
        }
    }

    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ring.require_field()?;
        if f.ring() != &self.ring {
            return Err(PolyError::RingMismatch);
        }
        let gb = self.require_gb()?;
        Ok(gb.normal_form(f))
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool, PolyError> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// `self ⊆ other`; `other` must carry a Gröbner basis.
    pub fn is_subset_of(&self, other: &Ideal) -> Result<bool, PolyError> {
        for g in self.basis() {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equality of ideals, decided by comparing reduced bases in grevlex.
    pub fn same_ideal(&self, other: &Ideal) -> Result<bool, PolyError> {
        let o = TermOrder::grevlex();
        let a = self.with_groebner(&o)?;
        let b = other.with_groebner(&o)?;
        Ok(a.gb == b.gb)
    }

    /// Ideal generated by `self` and `extra`.
    pub fn extended(&self, extra: impl IntoIterator<Item = Polynomial>) -> Result<Ideal, PolyError> {
        let mut gens = self.basis().to_vec();
        gens.extend(extra);
        Ideal::new(&self.ring, gens)
    }
}

/// Computes the reduced Gröbner basis cache of `ideal` under `order`.
pub fn buchberger(ideal: &Ideal, order: &TermOrder) -> Result<Ideal, PolyError> {
    ideal.with_groebner(order)
}

/// Remainder of `f` modulo the cached reduced basis of `ideal`, which must
/// have been computed under `order`.
pub fn normal_form(f: &Polynomial, ideal: &Ideal, order: &TermOrder) -> Result<Polynomial, PolyError> {
    f.ring().require_field()?;
    let gb = ideal.require_gb()?;
    if &gb.order != order {
        return Ok(normal_form_by(f, &ideal.with_groebner(order)?.require_gb()?.basis, order));
    }
    Ok(gb.normal_form(f))
}

/// `I ∩ k[keep]`, via a block order eliminating the other variables.
/// The result lives in the same ring and carries a grevlex basis.
pub fn eliminate(ideal: &Ideal, keep: &[usize]) -> Result<Ideal, PolyError> {
    let ring = ideal.ring();
    ring.require_field()?;
    let n = ring.num_vars();
    if let Some(&bad) = keep.iter().find(|&&v| v >= n) {
        return Err(PolyError::VariableOutOfRange { index: bad, num_vars: n });
    }
    let elim: Vec<usize> = (0..n).filter(|v| !keep.contains(v)).collect();
    let order = TermOrder::elimination(n, &elim);
    let gb = buchberger_basis(ring, ideal.basis(), &order)?;
    let kept: Vec<Polynomial> = gb.basis.into_iter().filter(|g| g.uses_only(keep)).collect();
    Ideal::new(ring, kept)?.with_groebner(&TermOrder::grevlex())
}

/// `{g : g^p ∈ I}`, computed as the preimage of `I` under `x_i ↦ x_i^p`.
///
/// Over `F_p`, `g(x)^p = g(x_1^p, ..., x_n^p)`, so the preimage is
/// `(I + (u_i - x_i^p)) ∩ k[u]` with the `u_i` renamed back to `x_i`.
pub fn pth_root_ideal(ideal: &Ideal) -> Result<Ideal, PolyError> {
    let ring = ideal.ring();
    ring.require_field()?;
    let n = ring.num_vars();
    let p = ring.p() as u32;
    let mut names: Vec<String> = ring.names().to_vec();
    let mut fresh = 0usize;
    for i in 0..n {
        let mut name = format!("u{}_{}", i, fresh);
        while names.contains(&name) {
            fresh += 1;
            name = format!("u{}_{}", i, fresh);
        }
        names.push(name);
    }
    let big = PolyRing::new(ring.p(), names)?;
    let x_map: Vec<usize> = (0..n).collect();
    let mut gens = Vec::new();
    for g in ideal.basis() {
        gens.push(g.map_vars(&big, &x_map)?);
    }
    for i in 0..n {
        let u = Polynomial::monomial(&big, Monomial::var(2 * n, n + i, 1), 1);
        let xp = Polynomial::monomial(&big, Monomial::var(2 * n, i, p), 1);
        gens.push(u.try_sub(&xp)?);
    }
    let order = TermOrder::elimination(2 * n, &x_map);
    let gb = buchberger_basis(&big, &gens, &order)?;
    let u_vars: Vec<usize> = (n..2 * n).collect();
    let back: Vec<usize> = (0..2 * n).map(|v| if v >= n { v - n } else { usize::MAX }).collect();
    let mut out = Vec::new();
    for g in gb.basis.into_iter().filter(|g| g.uses_only(&u_vars)) {
        out.push(g.map_vars(ring, &back)?);
    }
    Ideal::new(ring, out)?.with_groebner(&TermOrder::grevlex())
}

/// Krull dimension of `k[x]/I`: the largest set of variables containing no
/// leading monomial of a Gröbner basis. `-1` for the unit ideal.
pub fn krull_dim(ideal: &Ideal) -> Result<i64, PolyError> {
    let with = ideal.computed()?;
    let gb = with.groebner().expect("computed");
    if gb.is_unit() {
        return Ok(-1);
    }
    let n = ideal.ring().num_vars();
    let lms: Vec<Monomial> = gb.leading_monomials();
    let masks: Vec<u64> = lms
        .iter()
        .map(|m| m.support().fold(0u64, |acc, v| acc | (1 << v)))
        .collect();
    assert!(n < 64, "krull_dim supports fewer than 64 variables");
    let mut best = 0i64;
    for subset in 0u64..(1u64 << n) {
        let size = subset.count_ones() as i64;
        if size <= best {
            continue;
        }
        if masks.iter().all(|&m| m & !subset != 0) {
            best = size;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_polynomial;

    fn ring(p: u64, names: &[&str]) -> Arc<PolyRing> {
        PolyRing::new(p, names.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn ideal(r: &Arc<PolyRing>, gens: &[&str]) -> Ideal {
        Ideal::new(r, gens.iter().map(|g| parse_polynomial(r, g).unwrap()).collect()).unwrap()
    }

    #[test]
    fn normal_form_examples() {
        let r = ring(5, &["x", "y"]);
        let o = TermOrder::grevlex();
        let i = buchberger(&ideal(&r, &["x"]), &o).unwrap();
        assert!(normal_form(&parse_polynomial(&r, "x").unwrap(), &i, &o).unwrap().is_zero());
        let i = buchberger(&ideal(&r, &["x", "y"]), &o).unwrap();
        assert_eq!(normal_form(&Polynomial::one(&r), &i, &o).unwrap(), Polynomial::one(&r));
        let lex = TermOrder::lex().with_perm(vec![1, 0]);
        let i = buchberger(&ideal(&r, &["y^2 - x^3"]), &lex).unwrap();
        let nf = normal_form(&parse_polynomial(&r, "y^2").unwrap(), &i, &lex).unwrap();
        assert_eq!(nf, parse_polynomial(&r, "x^3").unwrap());
    }

    #[test]
    fn normal_form_rejects_non_field() {
        let r = PolyRing::with_coeff_exp(3, 2, vec!["x".into()]).unwrap();
        let i = Ideal::zero(&r);
        assert_eq!(
            normal_form(&Polynomial::one(&r), &i, &TermOrder::grevlex()).unwrap_err(),
            PolyError::NotAField(2)
        );
        assert_eq!(i.with_groebner(&TermOrder::grevlex()).unwrap_err(), PolyError::NotAField(2));
    }

    #[test]
    fn buchberger_trivial_cases() {
        let r = ring(3, &["x", "y"]);
        let o = TermOrder::grevlex();
        let i = buchberger(&ideal(&r, &["x"]), &o).unwrap();
        assert_eq!(i.groebner().unwrap().basis, vec![parse_polynomial(&r, "x").unwrap()]);
        let z = buchberger(&Ideal::zero(&r), &o).unwrap();
        assert!(z.groebner().unwrap().basis.is_empty());
        let u = buchberger(&ideal(&r, &["x", "x + 1"]), &o).unwrap();
        assert_eq!(u.groebner().unwrap().basis, vec![Polynomial::one(&r)]);
    }

    #[test]
    fn eliminate_cusp_parametrization() {
        let r = ring(7, &["x", "t1", "t2"]);
        let i = ideal(&r, &["t1 - x^2", "t2 - x^3"]);
        let e = eliminate(&i, &[1, 2]).unwrap();
        let expect = ideal(&r, &["t1^3 - t2^2"]);
        assert!(e.same_ideal(&expect).unwrap());
        assert!(e.basis().iter().all(|g| g.uses_only(&[1, 2])));
    }

    #[test]
    fn eliminate_trivial_cases() {
        let r = ring(5, &["x", "y"]);
        let e = eliminate(&ideal(&r, &["x"]), &[0]).unwrap();
        assert!(e.same_ideal(&ideal(&r, &["x"])).unwrap());
        let e = eliminate(&ideal(&r, &["x - y"]), &[1]).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn pth_root_ideal_examples() {
        let r = ring(3, &["x", "y"]);
        let root = pth_root_ideal(&ideal(&r, &["x"])).unwrap();
        assert!(root.same_ideal(&ideal(&r, &["x"])).unwrap());
        let root = pth_root_ideal(&ideal(&r, &["x^3", "y"])).unwrap();
        assert!(root.same_ideal(&ideal(&r, &["x", "y"])).unwrap());
        let root = pth_root_ideal(&ideal(&r, &["1"])).unwrap();
        assert!(root.is_unit());
    }

    #[test]
    fn krull_dim_examples() {
        let r = ring(5, &["x", "y"]);
        assert_eq!(krull_dim(&Ideal::zero(&r)).unwrap(), 2);
        assert_eq!(krull_dim(&ideal(&r, &["y^2 - x^3"])).unwrap(), 1);
        assert_eq!(krull_dim(&ideal(&r, &["1"])).unwrap(), -1);
        assert_eq!(krull_dim(&ideal(&r, &["x", "y"])).unwrap(), 0);
        assert_eq!(krull_dim(&ideal(&r, &["x*y"])).unwrap(), 1);
    }
}
