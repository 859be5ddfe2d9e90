//! Finite, weight-truncated Dieudonné complexes over `Z/p^N` with partial
//! operators `d`, `F`, `V`, and checkers for their saturation properties.

mod a1;
mod checks;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modarith::{ArithError, ModularMatrix, Modulus};

pub use a1::{a1_model, a1_model_with_depth, A1Model, ProductReport};
pub use checks::{
    check_axioms, compare_wr_hn, f_cancellation_check, frobenius_injectivity_degree0_check, hn_mod_pr,
    saturation_witness, w1_vanishing_propagation_check, wr_quotient, AxiomReport, AxiomViolation,
    CancellationReport, Comparison, Counterexample, Inconclusive, InjectivityReport, PropagationReport,
    QuotientBlock, QuotientKind, QuotientPresentation, SaturationFailure, SaturationReport, SolvedWitness,
    WeightPropagation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
    #[error("invalid weight {0}/p^{1}")]
    InvalidWeight(u64, u32),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("model has basis elements in negative degree ({0})")]
    NegativeDegree(String),
    #[error("model JSON: {0}")]
    Json(String),
}

/// A weight `num / p^depth` in `Z[1/p]_{>=0}`, normalized so that `p ∤ num`
/// whenever `depth > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Weight {
    num: u64,
    depth: u32,
    den: u64,
}

impl Weight {
    pub fn new(num: u64, depth: u32, p: u64) -> Result<Self, ModelError> {
        let (mut num, mut depth) = (num, depth);
        if num == 0 {
            depth = 0;
        }
        while depth > 0 && num % p == 0 {
            num /= p;
            depth -= 1;
        }
        let den = p.checked_pow(depth).ok_or(ModelError::InvalidWeight(num, depth))?;
        Ok(Weight { num, depth, den })
    }

    pub fn integer(k: u64) -> Self {
        Weight { num: k, depth: 0, den: 1 }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn is_integral(&self) -> bool {
        self.depth == 0
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn times_p(&self, p: u64) -> Self {
        if self.depth > 0 {
            Weight::new(self.num, self.depth - 1, p).expect("smaller denominator")
        } else {
            Weight::integer(self.num * p)
        }
    }

    pub fn times_p_pow(&self, p: u64, r: u32) -> Self {
        (0..r).fold(*self, |w, _| w.times_p(p))
    }

    pub fn div_p(&self, p: u64) -> Self {
        if self.depth == 0 && self.num % p == 0 {
            Weight::integer(self.num / p)
        } else if self.num == 0 {
            *self
        } else {
            Weight {
                num: self.num,
                depth: self.depth + 1,
                den: self.den * p,
            }
        }
    }

    pub fn add(&self, other: &Weight, p: u64) -> Self {
        let (hi, lo) = if self.depth >= other.depth { (self, other) } else { (other, self) };
        let scale = p.pow(hi.depth - lo.depth);
        Weight::new(hi.num + lo.num * scale, hi.depth, p).expect("same denominator")
    }

    fn as_json(&self) -> [u64; 2] {
        [self.num, self.depth as u64]
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.depth == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_json().serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisElement {
    pub label: String,
    pub degree: i32,
    pub weight: Weight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = "d")]
    D,
    F,
    V,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::D => "d",
            Op::F => "F",
            Op::V => "V",
        })
    }
}

/// Sparse vector: basis index to nonzero coefficient.
pub type SparseVec = BTreeMap<usize, u64>;

/// Truncation bounds: a piece of weight `w` is complete iff `w <= wmax`
/// and `depth(w) <= max_depth`. Models without bounds are complete.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub wmax: Weight,
    pub max_depth: u32,
}

/// A finite Dieudonné-complex model: graded basis and partial operators.
/// A basis element missing from an operator's map is outside its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DieudonneModel {
    modulus: Modulus,
    basis: Vec<BasisElement>,
    index: HashMap<String, usize>,
    ops: [Vec<Option<SparseVec>>; 3],
    truncation: Option<Truncation>,
}

fn op_slot(op: Op) -> usize {
    match op {
        Op::D => 0,
        Op::F => 1,
        Op::V => 2,
    }
}

impl DieudonneModel {
    /// Builds a model; operator images are `(label, coefficient)` lists.
    pub fn new(
        p: u64,
        n_exp: u32,
        basis: Vec<BasisElement>,
        maps: [BTreeMap<String, Vec<(String, i64)>>; 3],
        truncation: Option<Truncation>,
    ) -> Result<Self, ModelError> {
        let modulus = Modulus::new(p, n_exp)?;
        let mut index = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            if index.insert(b.label.clone(), i).is_some() {
                return Err(ModelError::DuplicateLabel(b.label.clone()));
            }
        }
        let mut ops: [Vec<Option<SparseVec>>; 3] = [vec![None; basis.len()], vec![None; basis.len()], vec![None; basis.len()]];
        for (slot, map) in maps.iter().enumerate() {
            for (src, image) in map {
                let i = *index.get(src).ok_or_else(|| ModelError::UnknownLabel(src.clone()))?;
                let mut v = SparseVec::new();
                for (dst, c) in image {
                    let j = *index.get(dst).ok_or_else(|| ModelError::UnknownLabel(dst.clone()))?;
                    let entry = v.entry(j).or_insert(0);
                    *entry = modulus.add(*entry, modulus.reduce_i128(*c as i128));
                }
                v.retain(|_, c| *c != 0);
                ops[slot][i] = Some(v);
            }
        }
        Ok(DieudonneModel { modulus, basis, index, ops, truncation })
    }

    /// `Z/p^N` in degree 0, weight 0: `d = 0`, `F = id`, `V = p`.
    pub fn trivial(p: u64, n_exp: u32) -> Result<Self, ModelError> {
        let one = || "1".to_string();
        let basis = vec![BasisElement { label: one(), degree: 0, weight: Weight::zero() }];
        let maps = [
            BTreeMap::from([(one(), vec![])]),
            BTreeMap::from([(one(), vec![(one(), 1)])]),
            BTreeMap::from([(one(), vec![(one(), p as i64)])]),
        ];
        Self::new(p, n_exp, basis, maps, None)
    }

    pub fn zero(p: u64, n_exp: u32) -> Result<Self, ModelError> {
        Self::new(p, n_exp, Vec::new(), Default::default(), None)
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    pub fn n_exp(&self) -> u32 {
        self.modulus.exp()
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn truncation(&self) -> Option<Truncation> {
        self.truncation
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    /// Whether the piece of weight `w` is fully present in the truncation.
    pub fn is_complete(&self, w: &Weight) -> bool {
        match &self.truncation {
            None => true,
            Some(t) => *w <= t.wmax && w.depth() <= t.max_depth,
        }
    }

    pub fn degrees(&self) -> BTreeSet<i32> {
        self.basis.iter().map(|b| b.degree).collect()
    }

    /// Weights occurring in degree `n`, ascending.
    pub fn weights_in_degree(&self, n: i32) -> Vec<Weight> {
        let set: BTreeSet<Weight> = self.basis.iter().filter(|b| b.degree == n).map(|b| b.weight).collect();
        set.into_iter().collect()
    }

    pub fn weights(&self) -> Vec<Weight> {
        let set: BTreeSet<Weight> = self.basis.iter().map(|b| b.weight).collect();
        set.into_iter().collect()
    }

    /// Basis indices of the graded piece `(n, w)`, ascending.
    pub fn piece(&self, n: i32, w: &Weight) -> Vec<usize> {
        (0..self.basis.len())
            .filter(|&i| self.basis[i].degree == n && self.basis[i].weight == *w)
            .collect()
    }

    pub fn image(&self, op: Op, i: usize) -> Option<&SparseVec> {
        self.ops[op_slot(op)][i].as_ref()
    }

    /// `op(x)`, or `None` if `op` is undefined somewhere on the support of `x`.
    pub fn apply(&self, op: Op, x: &SparseVec) -> Option<SparseVec> {
        let md = self.modulus;
        let mut out = SparseVec::new();
        for (&i, &c) in x {
            for (&j, &a) in self.image(op, i)? {
                let e = out.entry(j).or_insert(0);
                *e = md.add(*e, md.mul(a, c));
            }
        }
        out.retain(|_, c| *c != 0);
        Some(out)
    }

    pub fn apply_all(&self, ops: &[Op], x: &SparseVec) -> Option<SparseVec> {
        ops.iter().try_fold(x.clone(), |v, &op| self.apply(op, &v))
    }

    pub fn scale(&self, x: &SparseVec, c: u64) -> SparseVec {
        let mut out: SparseVec = x.iter().map(|(&i, &a)| (i, self.modulus.mul(a, c))).collect();
        out.retain(|_, c| *c != 0);
        out
    }

    pub fn basis_vec(&self, i: usize) -> SparseVec {
        SparseVec::from([(i, 1 % self.modulus.value())])
    }

    pub fn labelled(&self, x: &SparseVec) -> Vec<(String, u64)> {
        x.iter().map(|(&i, &c)| (self.basis[i].label.clone(), c)).collect()
    }

    /// Dense coordinates of `x` on `piece`; `None` if `x` has support elsewhere.
    pub fn coords_on(&self, x: &SparseVec, piece: &[usize]) -> Option<Vec<u64>> {
        let mut out = vec![0; piece.len()];
        for (&i, &c) in x {
            let pos = piece.binary_search(&i).ok()?;
            out[pos] = c;
        }
        Some(out)
    }

    pub fn from_coords(&self, coords: &[u64], piece: &[usize]) -> SparseVec {
        piece
            .iter()
            .zip(coords)
            .filter(|(_, &c)| c % self.modulus.value() != 0)
            .map(|(&i, &c)| (i, self.modulus.reduce(c)))
            .collect()
    }

    /// Columns are the images of the given vectors, written on `target`.
    /// `None` if an image is undefined or leaves `target`.
    pub fn image_matrix(&self, ops: &[Op], sources: &[SparseVec], target: &[usize]) -> Option<ModularMatrix> {
        let cols = sources
            .iter()
            .map(|x| self.coords_on(&self.apply_all(ops, x)?, target))
            .collect::<Option<Vec<_>>>()?;
        Some(ModularMatrix::from_columns(self.modulus, target.len(), &cols).expect("lengths match"))
    }

    pub fn piece_vectors(&self, piece: &[usize]) -> Vec<SparseVec> {
        piece.iter().map(|&i| self.basis_vec(i)).collect()
    }

    pub fn to_json(&self) -> ModelJson {
        let maps: Vec<BTreeMap<String, Vec<(String, i64)>>> = (0..3)
            .map(|slot| {
                self.ops[slot]
                    .iter()
                    .enumerate()
                    .filter_map(|(i, v)| {
                        v.as_ref().map(|v| {
                            (
                                self.basis[i].label.clone(),
                                v.iter().map(|(&j, &c)| (self.basis[j].label.clone(), c as i64)).collect(),
                            )
                        })
                    })
                    .collect()
            })
            .collect();
        let [d, f, v]: [BTreeMap<String, Vec<(String, i64)>>; 3] = maps.try_into().expect("three maps");
        ModelJson {
            p: self.p(),
            n: self.n_exp(),
            basis: self
                .basis
                .iter()
                .map(|b| BasisJson { label: b.label.clone(), degree: b.degree, weight: b.weight.as_json() })
                .collect(),
            d,
            f,
            v,
            wmax: self.truncation.map(|t| t.wmax.as_json()),
            max_depth: self.truncation.map(|t| t.max_depth),
        }
    }

    pub fn from_json(j: &ModelJson) -> Result<Self, ModelError> {
        let p = j.p;
        let weight = |w: [u64; 2]| -> Result<Weight, ModelError> {
            let depth = u32::try_from(w[1]).map_err(|_| ModelError::InvalidWeight(w[0], u32::MAX))?;
            Weight::new(w[0], depth, p)
        };
        if !crate::modarith::is_prime(p) {
            return Err(ArithError::NotPrime(p).into());
        }
        let basis = j
            .basis
            .iter()
            .map(|b| Ok(BasisElement { label: b.label.clone(), degree: b.degree, weight: weight(b.weight)? }))
            .collect::<Result<Vec<_>, ModelError>>()?;
        let truncation = match (j.wmax, j.max_depth) {
            (None, None) => None,
            (Some(w), d) => Some(Truncation { wmax: weight(w)?, max_depth: d.unwrap_or(j.n) }),
            (None, Some(_)) => return Err(ModelError::Json("max_depth given without wmax".into())),
        };
        Self::new(p, j.n, basis, [j.d.clone(), j.f.clone(), j.v.clone()], truncation)
    }
}

/// `{"p", "N", "basis": [{"label", "degree", "weight": [num, depth]}], "d", "F", "V"}`
/// with sparse maps `{label: [[label, coef], ...]}`; optional `wmax`, `max_depth`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u32,
    pub basis: Vec<BasisJson>,
    #[serde(default)]
    pub d: BTreeMap<String, Vec<(String, i64)>>,
    #[serde(rename = "F", default)]
    pub f: BTreeMap<String, Vec<(String, i64)>>,
    #[serde(rename = "V", default)]
    pub v: BTreeMap<String, Vec<(String, i64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wmax: Option<[u64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisJson {
    pub label: String,
    pub degree: i32,
    pub weight: [u64; 2],
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_arithmetic() {
        let w = Weight::new(6, 1, 3).unwrap();
        assert_eq!(w, Weight::integer(2));
        let third = Weight::new(1, 1, 3).unwrap();
        assert_eq!(third.times_p(3), Weight::integer(1));
        assert_eq!(Weight::integer(1).div_p(3), third);
        assert_eq!(Weight::integer(3).div_p(3), Weight::integer(1));
        assert!(third < Weight::integer(1));
        assert_eq!(third.add(&Weight::new(2, 1, 3).unwrap(), 3), Weight::integer(1));
        assert_eq!(Weight::zero().div_p(3), Weight::zero());
        assert_eq!(third.to_string(), "1/3");
    }

    #[test]
    fn trivial_model_round_trips() {
        let m = DieudonneModel::trivial(3, 2).unwrap();
        let j = serde_json::to_string(&m.to_json()).unwrap();
        let back = DieudonneModel::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, m);
        let x = m.basis_vec(0);
        assert_eq!(m.apply_all(&[Op::V, Op::F], &x), Some(m.scale(&x, 3)));
    }

    #[test]
    fn rejects_unknown_labels() {
        let mut j = DieudonneModel::trivial(2, 2).unwrap().to_json();
        j.f.insert("ghost".into(), vec![]);
        assert_eq!(DieudonneModel::from_json(&j), Err(ModelError::UnknownLabel("ghost".into())));
    }
}
