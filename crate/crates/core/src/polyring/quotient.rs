use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{parse_polynomial, Ideal, PolyError, PolyRing, Polynomial, TermOrder};

/// `k[x_1..x_n]/I` with a cached reduced Gröbner basis of `I`.
/// Elements are represented by their normal forms.
#[derive(Debug, Clone)]
pub struct PresentedRing {
    ideal: Ideal,
    order: TermOrder,
}

impl PresentedRing {
    pub fn new(ideal: &Ideal) -> Result<Self, PolyError> {
        Self::with_order(ideal, &TermOrder::grevlex())
    }

    pub fn with_order(ideal: &Ideal, order: &TermOrder) -> Result<Self, PolyError> {
        Ok(PresentedRing {
            ideal: ideal.with_groebner(order)?,
            order: order.clone(),
        })
    }

    /// The polynomial ring itself (`I = 0`).
    pub fn free(ring: &Arc<PolyRing>) -> Result<Self, PolyError> {
        Self::new(&Ideal::zero(ring))
    }

    /// Parses `gens` in `ring` and presents the quotient.
    pub fn from_text(ring: &Arc<PolyRing>, gens: &[&str]) -> Result<Self, PolyError> {
        let polys = gens
            .iter()
            .map(|g| parse_polynomial(ring, g))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&Ideal::new(ring, polys)?)
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.ideal.ring()
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn order(&self) -> &TermOrder {
        &self.order
    }

    pub fn p(&self) -> u64 {
        self.ring().p()
    }

    pub fn num_vars(&self) -> usize {
        self.ring().num_vars()
    }

    pub fn reduce(&self, f: &Polynomial) -> Polynomial {
        self.ideal
            .groebner()
            .expect("presented rings always carry a basis")
            .normal_form(f)
    }

    pub fn parse(&self, text: &str) -> Result<Polynomial, PolyError> {
        Ok(self.reduce(&parse_polynomial(self.ring(), text)?))
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self.ring())
    }

    pub fn one(&self) -> Polynomial {
        self.reduce(&Polynomial::one(self.ring()))
    }

    pub fn add(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
        Ok(self.reduce(&a.try_add(b)?))
    }

    pub fn sub(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
        Ok(self.reduce(&a.try_sub(b)?))
    }

    pub fn mul(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
        Ok(self.reduce(&a.try_mul(b)?))
    }

    pub fn pow(&self, a: &Polynomial, mut e: u64) -> Polynomial {
        let mut acc = self.one();
        let mut base = self.reduce(a);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.reduce(&acc.try_mul(&base).expect("same ring"));
            }
            e >>= 1;
            if e > 0 {
                base = self.reduce(&base.try_mul(&base).expect("same ring"));
            }
        }
        acc
    }

    pub fn is_zero(&self, a: &Polynomial) -> bool {
        self.reduce(a).is_zero()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.ideal.is_unit()
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            p: self.p(),
            vars: self.ring().names().to_vec(),
            ideal: self.ideal.generators().iter().map(|g| g.display_with(&self.order)).collect(),
            order: Some(self.order.clone()),
        }
    }

    pub fn from_json(j: &PresentationJson) -> Result<Self, PolyError> {
        let ring = PolyRing::new(j.p, j.vars.clone())?;
        let gens = j
            .ideal
            .iter()
            .map(|g| parse_polynomial(&ring, g))
            .collect::<Result<Vec<_>, _>>()?;
        let order = j.order.clone().unwrap_or_default();
        Self::with_order(&Ideal::new(&ring, gens)?, &order)
    }
}

/// `{"p": 5, "vars": ["x", "y"], "ideal": ["y^2 - x^3"]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationJson {
    pub p: u64,
    pub vars: Vec<String>,
    pub ideal: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<TermOrder>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_arithmetic() {
        let r = PolyRing::new(5, vec!["x".into(), "y".into()]).unwrap();
        let a = PresentedRing::from_text(&r, &["y^2 - x^3"]).unwrap();
        let y = a.parse("y").unwrap();
        assert_eq!(a.mul(&y, &y).unwrap(), a.parse("x^3").unwrap());
        assert!(a.is_zero(&a.parse("y^2 - x^3").unwrap()));
        let j = serde_json::to_string(&a.to_json()).unwrap();
        let back = PresentedRing::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert!(back.ideal().same_ideal(a.ideal()).unwrap());
    }
}
