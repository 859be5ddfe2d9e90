//! Certified vanishing of `dx_1 ∧ ⋯ ∧ dx_n` in `W_1Ω^n` of `k[x]/I`.
//!
//! The annihilator of the top form is closed under partial derivatives and
//! `p`-th roots, so any nonzero `g ∈ I` can be walked down to a nonzero
//! constant. A certificate records that walk and is checked by replay.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyring::{
    buchberger_basis, eliminate, krull_dim, parse_polynomial, pth_root_ideal, Ideal, PolyError, PolyRing,
    Polynomial, PresentationJson, PresentedRing, TermOrder,
};

pub const DEFAULT_CLOSURE_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VanishError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("cannot descend from the zero polynomial")]
    ZeroPolynomial,
    #[error("I = 0: the top form generates a free module of rank one and does not vanish")]
    ZeroIdeal,
    #[error("tuple length {n} does not exceed the vanishing degree bound {bound}")]
    BelowBound { n: usize, bound: i64 },
    #[error("kernel of the tuple map is zero although the tuple is longer than dim R")]
    KernelZero,
    #[error("differential p-closure did not stabilize within {0} generations")]
    ClosureCap(usize),
    #[error("invalid certificate: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOp {
    PthRoot,
    Partial(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentStep {
    pub op: StepOp,
    pub input: Polynomial,
    pub output: Polynomial,
}

#[derive(Debug, Clone)]
pub struct VanishingCertificate {
    pub ring: PresentedRing,
    pub seed: Polynomial,
    pub steps: Vec<DescentStep>,
    pub terminal: u64,
    pub provenance: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var: Option<usize>,
    #[serde(rename = "in")]
    pub input: String,
    #[serde(rename = "out")]
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub ring: PresentationJson,
    pub seed: String,
    pub steps: Vec<StepJson>,
    pub terminal: u64,
    pub provenance: Vec<String>,
}

const PROVENANCE: [&str; 4] = [
    "For a nonzero ideal I of k[x_1,...,x_n], the form dx_1 ^ ... ^ dx_n vanishes in W_1 Omega^n of k[x]/I.",
    "The annihilator of that form is a radical ideal containing I and closed under partial derivatives.",
    "Each step replaces g by a p-th root or by a nonzero partial derivative of g, so stays in the annihilator.",
    "A nonzero constant in the annihilator kills the form.",
];

fn show(f: &Polynomial) -> String {
    f.display_with(&TermOrder::grevlex())
}

impl VanishingCertificate {
    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            ring: self.ring.to_json(),
            seed: show(&self.seed),
            steps: self
                .steps
                .iter()
                .map(|s| StepJson {
                    op: match s.op {
                        StepOp::PthRoot => "pthRoot".into(),
                        StepOp::Partial(_) => "partial".into(),
                    },
                    var: match s.op {
                        StepOp::PthRoot => None,
                        StepOp::Partial(i) => Some(i),
                    },
                    input: show(&s.input),
                    output: show(&s.output),
                })
                .collect(),
            terminal: self.terminal,
            provenance: self.provenance.clone(),
        }
    }

    pub fn from_json(j: &CertificateJson) -> Result<Self, VanishError> {
        let ring = PresentedRing::from_json(&j.ring)?;
        let parse = |s: &str| parse_polynomial(ring.ring(), s);
        let steps = j
            .steps
            .iter()
            .map(|s| {
                let op = match (s.op.as_str(), s.var) {
                    ("pthRoot", None) => StepOp::PthRoot,
                    ("partial", Some(i)) => StepOp::Partial(i),
                    (op, _) => return Err(VanishError::Json(format!("bad step op `{op}`"))),
                };
                Ok(DescentStep { op, input: parse(&s.input)?, output: parse(&s.output)? })
            })
            .collect::<Result<Vec<_>, VanishError>>()?;
        Ok(VanishingCertificate {
            seed: parse(&j.seed)?,
            ring,
            steps,
            terminal: j.terminal,
            provenance: j.provenance.clone(),
        })
    }
}

/// Walks a nonzero `f` down to a nonzero constant: the least-index nonzero
/// partial derivative when one exists, otherwise the `p`-th root.
pub fn descend_to_unit(f: &Polynomial) -> Result<Vec<DescentStep>, VanishError> {
    if f.is_zero() {
        return Err(VanishError::ZeroPolynomial);
    }
    if !f.ring().is_field() {
        return Err(PolyError::NotAField(f.ring().coeff_exp()).into());
    }
    let mut steps = Vec::new();
    let mut cur = f.clone();
    while !cur.is_constant() {
        let mut next = None;
        for i in 0..cur.ring().num_vars() {
            let d = cur.partial_derivative(i)?;
            if !d.is_zero() {
                next = Some((StepOp::Partial(i), d));
                break;
            }
        }
        let (op, out) = match next {
            Some(n) => n,
            None => (StepOp::PthRoot, cur.pth_root()?.expect("all partials vanish")),
        };
        steps.push(DescentStep { op, input: cur, output: out.clone() });
        cur = out;
    }
    Ok(steps)
}

fn seed_of(basis: &[Polynomial], order: &TermOrder) -> Option<Polynomial> {
    basis
        .iter()
        .filter(|g| !g.is_zero())
        .min_by(|a, b| {
            a.total_degree().cmp(&b.total_degree()).then_with(|| {
                let la = a.leading_term(order).map(|t| t.0.clone());
                let lb = b.leading_term(order).map(|t| t.0.clone());
                match (la, lb) {
                    (Some(x), Some(y)) => order.cmp(&x, &y),
                    _ => Ordering::Equal,
                }
            })
        })
        .cloned()
}

fn certificate(ring: PresentedRing, seed: Polynomial) -> Result<VanishingCertificate, VanishError> {
    let steps = descend_to_unit(&seed)?;
    let last = steps.last().map_or(&seed, |s| &s.output);
    let terminal = last.constant_value().expect("descent ends in a constant");
    Ok(VanishingCertificate {
        ring,
        seed,
        steps,
        terminal,
        provenance: PROVENANCE.iter().map(|s| s.to_string()).collect(),
    })
}

/// Certificate that the top form of `R = k[x]/I` dies in `W_1Ω^n`.
/// The seed is a reduced Gröbner generator of least total degree, ties
/// broken by the ring's term order.
pub fn certify_top_vanishing(r: &PresentedRing) -> Result<VanishingCertificate, VanishError> {
    let basis = r.ideal().basis();
    let seed = seed_of(basis, r.order()).ok_or(VanishError::ZeroIdeal)?;
    certificate(r.clone(), seed)
}

/// `deg · (1 + ⌊log_p deg⌋)`.
pub fn chain_length_bound(deg: u32, p: u64) -> usize {
    if deg == 0 {
        return 0;
    }
    let mut log = 0;
    let mut x = deg as u64;
    while x >= p {
        x /= p;
        log += 1;
    }
    deg as usize * (1 + log)
}

/// Replays a certificate: seed in `I`, each step's defining equation,
/// strict degree descent, and a nonzero constant at the end.
pub fn verify_certificate(c: &VanishingCertificate) -> bool {
    let ring = c.ring.ring();
    if !ring.is_field() || c.seed.is_zero() || c.seed.ring() != ring {
        return false;
    }
    // membership against a basis recomputed from the raw generators
    let Ok(gb) = buchberger_basis(ring, c.ring.ideal().generators(), &TermOrder::grevlex()) else {
        return false;
    };
    if !gb.normal_form(&c.seed).is_zero() {
        return false;
    }
    let deg0 = c.seed.total_degree().unwrap_or(0);
    if c.steps.len() > chain_length_bound(deg0, ring.p()) {
        return false;
    }
    let mut cur = &c.seed;
    for s in &c.steps {
        if &s.input != cur || s.output.is_zero() || s.output.ring() != ring {
            return false;
        }
        let ok = match s.op {
            StepOp::PthRoot => s.output.pow(ring.p()) == s.input,
            StepOp::Partial(i) => i < ring.num_vars() && s.input.partial_derivative(i).ok().as_ref() == Some(&s.output),
        };
        if !ok || s.output.total_degree() >= s.input.total_degree() {
            return false;
        }
        cur = &s.output;
    }
    cur.is_constant() && cur.constant_value() == Some(c.terminal) && c.terminal % ring.p() != 0
}

/// Ascending chain of ideals approaching the differential `p`-closure.
#[derive(Debug, Clone)]
pub struct ClosureState {
    pub ideal: Ideal,
    pub fixpoint: bool,
    pub generations: usize,
}

impl ClosureState {
    pub fn new(i: &Ideal) -> Result<Self, VanishError> {
        Ok(ClosureState { ideal: i.computed()?, fixpoint: false, generations: 0 })
    }

    /// One generation: adjoin the partials of the reduced basis; when they
    /// are all in `J` already, adjoin `{h : h^p ∈ J}` instead.
    pub fn step(&mut self) -> Result<(), VanishError> {
        if self.fixpoint {
            return Ok(());
        }
        let j = &self.ideal;
        let mut extra = Vec::new();
        if !j.is_unit() {
            for g in j.basis() {
                for i in 0..j.ring().num_vars() {
                    let d = g.partial_derivative(i)?;
                    if !j.contains(&d)? {
                        extra.push(d);
                    }
                }
            }
            if extra.is_empty() {
                for h in pth_root_ideal(j)?.basis() {
                    if !j.contains(h)? {
                        extra.push(h.clone());
                    }
                }
            }
        }
        self.generations += 1;
        if extra.is_empty() {
            self.fixpoint = true;
            return Ok(());
        }
        self.ideal = j.extended(extra)?.computed()?;
        Ok(())
    }
}

/// Least ideal containing `i` closed under partials and `p`-th roots.
pub fn differential_p_closure(i: &Ideal) -> Result<ClosureState, VanishError> {
    differential_p_closure_with_cap(i, DEFAULT_CLOSURE_CAP)
}

pub fn differential_p_closure_with_cap(i: &Ideal, cap: usize) -> Result<ClosureState, VanishError> {
    let mut st = ClosureState::new(i)?;
    while !st.fixpoint {
        if st.generations >= cap {
            return Err(VanishError::ClosureCap(cap));
        }
        st.step()?;
    }
    Ok(st)
}

fn fresh_names(taken: &[String], n: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 1;
    while out.len() < n {
        let base = format!("t{i}");
        let mut name = base.clone();
        while taken.contains(&name) {
            name.push('_');
        }
        out.push(name);
        i += 1;
    }
    out
}

/// `ker(k[t_1..t_n] → R, t_i ↦ g_i)` as an ideal of `k[t]` with a grevlex basis.
pub fn kernel_of_tuple(r: &PresentedRing, gs: &[Polynomial]) -> Result<Ideal, VanishError> {
    let ring = r.ring();
    let (m, n) = (ring.num_vars(), gs.len());
    let tnames = fresh_names(&[], n);
    let t_ring = PolyRing::new(ring.p(), tnames.clone())?;
    let mut names = ring.names().to_vec();
    names.extend(fresh_names(ring.names(), n));
    let big = PolyRing::new(ring.p(), names)?;
    let xs: Vec<usize> = (0..m).collect();
    let mut gens = Vec::new();
    for f in r.ideal().generators() {
        gens.push(f.map_vars(&big, &xs)?);
    }
    for (i, g) in gs.iter().enumerate() {
        if g.ring() != ring {
            return Err(PolyError::RingMismatch.into());
        }
        let t = Polynomial::var(&big, m + i)?;
        gens.push(t.try_sub(&g.map_vars(&big, &xs)?)?);
    }
    let keep: Vec<usize> = (m..m + n).collect();
    let elim = eliminate(&Ideal::new(&big, gens)?, &keep)?;
    let back: Vec<usize> = (0..m + n).map(|v| if v >= m { v - m } else { usize::MAX }).collect();
    let kept = elim.basis().iter().map(|g| g.map_vars(&t_ring, &back)).collect::<Result<Vec<_>, _>>()?;
    Ok(Ideal::new(&t_ring, kept)?.with_groebner(&TermOrder::grevlex())?)
}

/// Degrees above this bound carry no `W_1Ω`: the Krull dimension of `R`,
/// or `-1` for the zero ring.
pub fn vanishing_degree_bound(r: &PresentedRing) -> Result<i64, VanishError> {
    Ok(krull_dim(r.ideal())?)
}

/// A kernel element of `t ↦ g` together with a certificate in `k[t]/ker`.
#[derive(Debug, Clone)]
pub struct TupleCertificate {
    pub source: PresentedRing,
    pub tuple: Vec<Polynomial>,
    pub kernel_element: Polynomial,
    pub certificate: VanishingCertificate,
}

/// Certifies `dg_1 ∧ ⋯ ∧ dg_n = 0` in `W_1Ω^n_R` for `n > dim R`.
pub fn certify_tuple_vanishing(r: &PresentedRing, gs: &[Polynomial]) -> Result<TupleCertificate, VanishError> {
    let bound = vanishing_degree_bound(r)?;
    if gs.len() as i64 <= bound {
        return Err(VanishError::BelowBound { n: gs.len(), bound });
    }
    let ker = kernel_of_tuple(r, gs)?;
    let order = TermOrder::grevlex();
    let g = seed_of(ker.basis(), &order).ok_or(VanishError::KernelZero)?;
    let image = PresentedRing::with_order(&ker, &order)?;
    let certificate = certificate(image, g.clone())?;
    Ok(TupleCertificate { source: r.clone(), tuple: gs.to_vec(), kernel_element: g, certificate })
}

/// Replays the inner certificate and checks `g(g_1, ..., g_n) ∈ I`.
pub fn verify_tuple_certificate(c: &TupleCertificate) -> bool {
    if !verify_certificate(&c.certificate) || c.kernel_element != c.certificate.seed {
        return false;
    }
    if c.tuple.len() != c.kernel_element.ring().num_vars() {
        return false;
    }
    let ring = c.source.ring();
    let Ok(img) = c.kernel_element.substitute(&c.tuple) else { return false };
    if img.ring() != ring {
        return false;
    }
    match buchberger_basis(ring, c.source.ideal().generators(), &TermOrder::grevlex()) {
        Ok(gb) => gb.normal_form(&img).is_zero(),
        Err(_) => false,
    }
}

/// Convenience for tests and the CLI: `F_p[names]/(gens)`.
pub fn presented(p: u64, names: &[&str], gens: &[&str], order: &TermOrder) -> Result<PresentedRing, VanishError> {
    let ring: Arc<PolyRing> = PolyRing::new(p, names.iter().map(|s| s.to_string()).collect())?;
    let polys = gens.iter().map(|g| parse_polynomial(&ring, g)).collect::<Result<Vec<_>, _>>()?;
    Ok(PresentedRing::with_order(&Ideal::new(&ring, polys)?, order)?)
}
