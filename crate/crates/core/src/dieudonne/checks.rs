use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{DieudonneModel, ModelError, Op, SparseVec, Weight};
use crate::modarith::{kernel, solve_linear, subquotient_invariants, ModularMatrix, Modulus, SubmoduleBasis};

type Labelled = Vec<(String, u64)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: String,
    pub element: String,
    pub lhs: Labelled,
    pub rhs: Labelled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    /// Number of basis elements on which each identity could be evaluated.
    pub checked: BTreeMap<String, usize>,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A piece where a check could not be carried out faithfully.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inconclusive {
    pub degree: i32,
    pub weight: Weight,
    pub reason: String,
    /// Set when the check would have failed had the piece been interior.
    pub witness: Option<Labelled>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolvedWitness {
    pub degree: i32,
    pub weight: Weight,
    pub x: Labelled,
    pub w: Labelled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaturationFailure {
    pub degree: i32,
    pub weight: Weight,
    pub x: Labelled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaturationReport {
    pub solved: Vec<SolvedWitness>,
    pub failures: Vec<SaturationFailure>,
    pub inconclusive: Vec<Inconclusive>,
}

impl SaturationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuotientKind {
    /// `M^n / (im V^r + im dV^r)`
    WittQuotient,
    /// `ker d / im d` on `M / p^r`
    Cohomology,
}

/// One weight of a presentation: `sub / relations` inside the ambient piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientBlock {
    pub weight: Weight,
    pub piece: Vec<usize>,
    #[serde(skip)]
    pub sub: Option<SubmoduleBasis>,
    #[serde(skip)]
    pub relations: Option<SubmoduleBasis>,
    /// Exponents of the cyclic summands; `None` where an operator is undefined.
    pub invariants: Option<Vec<u32>>,
    pub interior: bool,
}

impl QuotientBlock {
    pub fn rank(&self) -> Option<usize> {
        self.invariants.as_ref().map(Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientPresentation {
    pub kind: QuotientKind,
    pub degree: i32,
    pub r: u32,
    pub blocks: Vec<QuotientBlock>,
}

impl QuotientPresentation {
    pub fn block(&self, w: &Weight) -> Option<&QuotientBlock> {
        self.blocks.iter().find(|b| b.weight == *w)
    }

    /// Minimal number of generators over the computable blocks.
    pub fn rank(&self) -> usize {
        self.blocks.iter().filter_map(QuotientBlock::rank).sum()
    }

    /// True when every computable block vanishes.
    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    /// Per-weight coordinates of `x`; `None` if `x` has support outside the blocks.
    pub fn components(&self, x: &SparseVec) -> Option<Vec<(Weight, Vec<u64>)>> {
        let mut seen = 0;
        let mut out = Vec::new();
        for b in &self.blocks {
            let c: Vec<u64> = b.piece.iter().map(|i| x.get(i).copied().unwrap_or(0)).collect();
            seen += c.iter().filter(|&&v| v != 0).count();
            out.push((b.weight, c));
        }
        (seen == x.len()).then_some(out)
    }

    /// Whether `x` maps to zero; `None` if undecidable (support outside
    /// the presentation, an uncomputable block, or `x` not in `sub`).
    pub fn is_zero_element(&self, x: &SparseVec) -> Option<bool> {
        let comps = self.components(x)?;
        let mut zero = true;
        for (b, (_, c)) in self.blocks.iter().zip(comps) {
            if c.iter().all(|&v| v == 0) {
                continue;
            }
            let (sub, rel) = (b.sub.as_ref()?, b.relations.as_ref()?);
            let md = rel.modulus();
            let c: Vec<u64> = c.iter().map(|&v| md.reduce(v)).collect();
            if !sub.contains(&c).ok()? {
                return None;
            }
            zero &= rel.contains(&c).ok()?;
        }
        Some(zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub degree: i32,
    pub r: u32,
    /// `(k, invariants)` where both sides agree.
    pub matched: Vec<(Weight, Vec<u32>)>,
    /// `(k, W_r side, H side)`.
    pub mismatched: Vec<(Weight, Vec<u32>, Vec<u32>)>,
    pub skipped: Vec<Weight>,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.mismatched.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub degree: i32,
    pub weight: Weight,
    pub x: Labelled,
    pub fx: Labelled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CancellationReport {
    pub r: u32,
    pub pieces_checked: usize,
    pub counterexamples: Vec<Counterexample>,
    pub inconclusive: Vec<Inconclusive>,
}

impl CancellationReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InjectivityReport {
    pub pieces_checked: usize,
    pub counterexamples: Vec<Counterexample>,
    pub inconclusive: Vec<Inconclusive>,
}

impl InjectivityReport {
    pub fn injective(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightPropagation {
    pub weight: Weight,
    /// Invariants of `H^n(M/p^r)` for `r = 1, 2, ...`.
    pub cohomology: Vec<Vec<u32>>,
    /// Exactness of `H(M/p) -> H(M/p^{r+1}) -> H(M/p^r)` for `r = 1, 2, ...`.
    pub exact: Vec<bool>,
    /// `r` such that `H_1 = H_r = 0` was seen to force `H_{r+1} = 0`.
    pub induction_confirmed: Vec<u32>,
    pub induction_failed: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropagationReport {
    pub degree: i32,
    pub rmax: u32,
    pub weights: Vec<WeightPropagation>,
    pub inconclusive: Vec<Inconclusive>,
}

impl PropagationReport {
    pub fn passed(&self) -> bool {
        self.weights
            .iter()
            .all(|w| w.exact.iter().all(|&e| e) && w.induction_failed.is_empty())
    }

    pub fn induction_confirmations(&self) -> usize {
        self.weights.iter().map(|w| w.induction_confirmed.len()).sum()
    }
}

fn sparse_eq(md: Modulus, a: &SparseVec, b: &SparseVec) -> bool {
    let norm = |x: &SparseVec| -> SparseVec {
        x.iter().map(|(&i, &c)| (i, md.reduce(c))).filter(|&(_, c)| c != 0).collect()
    };
    norm(a) == norm(b)
}

/// Checks grading, `d² = 0`, `dF = pFd`, `FV = p` and `FdV = d` on every
/// basis element where both sides are defined.
pub fn check_axioms(m: &DieudonneModel) -> AxiomReport {
    let md = m.modulus();
    let p = m.p();
    let mut checked: BTreeMap<String, usize> = BTreeMap::new();
    let mut violations = Vec::new();
    for i in 0..m.dim() {
        let b = &m.basis()[i];
        let x = m.basis_vec(i);
        let mut record = |axiom: &str, lhs: Option<SparseVec>, rhs: Option<SparseVec>| {
            if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
                *checked.entry(axiom.to_string()).or_default() += 1;
                if !sparse_eq(md, &lhs, &rhs) {
                    violations.push(AxiomViolation {
                        axiom: axiom.to_string(),
                        element: b.label.clone(),
                        lhs: m.labelled(&lhs),
                        rhs: m.labelled(&rhs),
                    });
                }
            }
        };
        for (op, dd, w) in [
            (Op::D, 1, b.weight),
            (Op::F, 0, b.weight.times_p(p)),
            (Op::V, 0, b.weight.div_p(p)),
        ] {
            if let Some(img) = m.image(op, i) {
                let off: SparseVec = img
                    .iter()
                    .filter(|(&j, _)| m.basis()[j].degree != b.degree + dd || m.basis()[j].weight != w)
                    .map(|(&j, &c)| (j, c))
                    .collect();
                record(&format!("grading of {op}"), Some(off), Some(SparseVec::new()));
            }
        }
        record("d^2 = 0", m.apply_all(&[Op::D, Op::D], &x), Some(SparseVec::new()));
        record(
            "dF = pFd",
            m.apply_all(&[Op::F, Op::D], &x),
            m.apply_all(&[Op::D, Op::F], &x).map(|v| m.scale(&v, p)),
        );
        record("FV = p", m.apply_all(&[Op::V, Op::F], &x), Some(m.scale(&x, p)));
        record("FdV = d", m.apply_all(&[Op::V, Op::D, Op::F], &x), m.apply(Op::D, &x));
    }
    AxiomReport { checked, violations }
}

/// Generators, as vectors on `source`, of `{x : A x ∈ span(gens)}`.
fn preimage(md: Modulus, a: &ModularMatrix, gens: &[Vec<u64>], source_len: usize) -> Vec<Vec<u64>> {
    let rows = a.rows();
    let g = ModularMatrix::from_columns(md, rows, gens)
        .expect("generators match target")
        .scaled(md.neg(1 % md.value()));
    let joint = a.hcat(&g).expect("same row count");
    kernel(&joint).into_iter().map(|k| k[..source_len].to_vec()).filter(|v| v.iter().any(|&c| c != 0)).collect()
}

/// For every `x` with `dx ≡ 0 mod p`, solves `x = F(w)`.
pub fn saturation_witness(m: &DieudonneModel) -> SaturationReport {
    let md = m.modulus();
    let p = m.p();
    let mut report = SaturationReport { solved: Vec::new(), failures: Vec::new(), inconclusive: Vec::new() };
    for n in m.degrees() {
        for k in m.weights_in_degree(n) {
            let piece = m.piece(n, &k);
            let inconclusive = |reason: &str, witness| Inconclusive { degree: n, weight: k, reason: reason.into(), witness };
            let target = m.piece(n + 1, &k);
            let Some(dmat) = m.image_matrix(&[Op::D], &m.piece_vectors(&piece), &target) else {
                report.inconclusive.push(inconclusive("d undefined on the piece", None));
                continue;
            };
            // x with d x = p y
            let p_id = ModularMatrix::identity(md, target.len()).scaled(p);
            let p_cols: Vec<Vec<u64>> = (0..target.len()).map(|j| p_id.column(j)).collect();
            let xs = preimage(md, &dmat, &p_cols, piece.len());
            if xs.is_empty() {
                continue;
            }
            let kp = k.div_p(p);
            let src = m.piece(n, &kp);
            let fmat = m.image_matrix(&[Op::F], &m.piece_vectors(&src), &piece);
            let complete = m.is_complete(&k) && m.is_complete(&kp);
            for x in xs {
                let xl = m.labelled(&m.from_coords(&x, &piece));
                let sol = match &fmat {
                    Some(f) => solve_linear(f, &x).expect("dimensions match"),
                    None => None,
                };
                match (sol, complete && fmat.is_some()) {
                    (Some(w), _) => report.solved.push(SolvedWitness {
                        degree: n,
                        weight: k,
                        x: xl,
                        w: m.labelled(&m.from_coords(&w, &src)),
                    }),
                    (None, true) => report.failures.push(SaturationFailure { degree: n, weight: k, x: xl }),
                    (None, false) => report
                        .inconclusive
                        .push(inconclusive("F source piece truncated", Some(xl))),
                }
            }
        }
    }
    report
}

fn check_level(m: &DieudonneModel, r: u32, max: u32) -> Result<(), ModelError> {
    if r == 0 || r > max {
        return Err(ModelError::InvalidParameters(format!(
            "level r = {r} must lie in 1..={max} for N = {}",
            m.n_exp()
        )));
    }
    Ok(())
}

fn vpow(r: u32) -> Vec<Op> {
    vec![Op::V; r as usize]
}

fn wr_block(m: &DieudonneModel, n: i32, r: u32, k: &Weight) -> QuotientBlock {
    let md = m.modulus();
    let p = m.p();
    let piece = m.piece(n, k);
    let big = k.times_p_pow(p, r);
    let mut ops = vpow(r);
    let vr = m.image_matrix(&ops, &m.piece_vectors(&m.piece(n, &big)), &piece);
    ops.push(Op::D);
    let dvr = m.image_matrix(&ops, &m.piece_vectors(&m.piece(n - 1, &big)), &piece);
    let interior = m.is_complete(k) && m.is_complete(&big) && vr.is_some() && dvr.is_some();
    let (sub, relations, invariants) = match (vr, dvr) {
        (Some(a), Some(b)) => {
            let mat = a.hcat(&b).expect("same row count");
            let gens = (0..mat.cols()).map(|j| mat.column(j)).collect();
            let rel = SubmoduleBasis::new(md, piece.len(), gens).expect("ranks match");
            let all = (0..piece.len()).map(|j| ModularMatrix::identity(md, piece.len()).column(j)).collect();
            let sub = SubmoduleBasis::new(md, piece.len(), all).expect("ranks match");
            let inv = rel.quotient_invariants();
            (Some(sub), Some(rel), Some(inv))
        }
        _ => (None, None, None),
    };
    QuotientBlock { weight: *k, piece, sub, relations, invariants, interior }
}

fn hn_block(m: &DieudonneModel, n: i32, r: u32, k: &Weight) -> QuotientBlock {
    let mr = m.modulus().with_exp(r).expect("r <= N");
    let piece = m.piece(n, k);
    let dn = m.image_matrix(&[Op::D], &m.piece_vectors(&piece), &m.piece(n + 1, k));
    let dprev = m.image_matrix(&[Op::D], &m.piece_vectors(&m.piece(n - 1, k)), &piece);
    let interior = m.is_complete(k) && dn.is_some() && dprev.is_some();
    let (sub, relations, invariants) = match (dn, dprev) {
        (Some(a), Some(b)) => {
            let a = a.reduce_to(mr).expect("r <= N");
            let b = b.reduce_to(mr).expect("r <= N");
            let sub = SubmoduleBasis::new(mr, piece.len(), kernel(&a)).expect("ranks match");
            let bgens = (0..b.cols()).map(|j| b.column(j)).collect();
            let rel = SubmoduleBasis::new(mr, piece.len(), bgens).expect("ranks match");
            let inv = subquotient_invariants(&sub, &rel).expect("compatible");
            (Some(sub), Some(rel), Some(inv))
        }
        _ => (None, None, None),
    };
    QuotientBlock { weight: *k, piece, sub, relations, invariants, interior }
}

/// `M^n / (im V^r + im dV^r)`, one block per weight of degree `n`.
pub fn wr_quotient(m: &DieudonneModel, n: i32, r: u32) -> Result<QuotientPresentation, ModelError> {
    check_level(m, r, m.n_exp())?;
    let blocks = m.weights_in_degree(n).iter().map(|k| wr_block(m, n, r, k)).collect();
    Ok(QuotientPresentation { kind: QuotientKind::WittQuotient, degree: n, r, blocks })
}

/// `H^n(M / p^r M)`, one block per weight of degree `n`.
pub fn hn_mod_pr(m: &DieudonneModel, n: i32, r: u32) -> Result<QuotientPresentation, ModelError> {
    check_level(m, r, m.n_exp())?;
    let blocks = m.weights_in_degree(n).iter().map(|k| hn_block(m, n, r, k)).collect();
    Ok(QuotientPresentation { kind: QuotientKind::Cohomology, degree: n, r, blocks })
}

/// Compares weight `k` of `W_r M^n` with weight `p^r k` of `H^n(M/p^r)`,
/// the two being matched by `F^r`. Non-interior weights are skipped.
pub fn compare_wr_hn(m: &DieudonneModel, n: i32, r: u32) -> Result<Comparison, ModelError> {
    check_level(m, r, m.n_exp())?;
    let p = m.p();
    let mut ks: BTreeSet<Weight> = m.weights_in_degree(n).into_iter().collect();
    for big in m.weights_in_degree(n) {
        let mut k = big;
        for _ in 0..r {
            k = k.div_p(p);
        }
        ks.insert(k);
    }
    let mut out = Comparison { degree: n, r, matched: Vec::new(), mismatched: Vec::new(), skipped: Vec::new() };
    for k in ks {
        let w = wr_block(m, n, r, &k);
        let h = hn_block(m, n, r, &k.times_p_pow(p, r));
        match (w.interior && h.interior, w.invariants, h.invariants) {
            (true, Some(a), Some(b)) if a == b => out.matched.push((k, a)),
            (true, Some(a), Some(b)) => out.mismatched.push((k, a, b)),
            _ => out.skipped.push(k),
        }
    }
    Ok(out)
}

/// Pieces `(n, k)` where `Fx ∈ R_{pk}` does not force `x ∈ R_k`,
/// `R = im V^r + im dV^r`.
fn cancellation(m: &DieudonneModel, r: u32, degrees: &[i32]) -> (usize, Vec<Counterexample>, Vec<Inconclusive>) {
    let md = m.modulus();
    let p = m.p();
    let mut checked = 0;
    let mut counter = Vec::new();
    let mut inconclusive = Vec::new();
    for &n in degrees {
        for k in m.weights_in_degree(n) {
            let inc = |reason: &str, witness| Inconclusive { degree: n, weight: k, reason: reason.into(), witness };
            let piece = m.piece(n, &k);
            let kp = k.times_p(p);
            let target = m.piece(n, &kp);
            let Some(fmat) = m.image_matrix(&[Op::F], &m.piece_vectors(&piece), &target) else {
                inconclusive.push(inc("F undefined on the piece", None));
                continue;
            };
            let (rk, rkp) = (wr_block(m, n, r, &k), wr_block(m, n, r, &kp));
            let (Some(rel_k), Some(rel_kp)) = (rk.relations, rkp.relations) else {
                inconclusive.push(inc("V^r or dV^r undefined", None));
                continue;
            };
            let interior = rk.interior && rkp.interior;
            checked += 1;
            for x in preimage(md, &fmat, rel_kp.generators(), piece.len()) {
                if rel_k.contains(&x).expect("ranks match") {
                    continue;
                }
                let xv = m.from_coords(&x, &piece);
                let fx = m.apply(Op::F, &xv).unwrap_or_default();
                if interior {
                    counter.push(Counterexample { degree: n, weight: k, x: m.labelled(&xv), fx: m.labelled(&fx) });
                } else {
                    inconclusive.push(inc("relations truncated at the boundary", Some(m.labelled(&xv))));
                }
                break;
            }
        }
    }
    (checked, counter, inconclusive)
}

/// If `Fx ∈ im V^r + im dV^r` then `x ∈ im V^r + im dV^r`, piece by piece.
pub fn f_cancellation_check(m: &DieudonneModel, r: u32) -> Result<CancellationReport, ModelError> {
    check_level(m, r, m.n_exp())?;
    let degrees: Vec<i32> = m.degrees().into_iter().collect();
    let (pieces_checked, counterexamples, inconclusive) = cancellation(m, r, &degrees);
    Ok(CancellationReport { r, pieces_checked, counterexamples, inconclusive })
}

/// Injectivity of the Frobenius induced on `W_1 M^0`.
pub fn frobenius_injectivity_degree0_check(m: &DieudonneModel) -> Result<InjectivityReport, ModelError> {
    if let Some(b) = m.basis().iter().find(|b| b.degree < 0) {
        return Err(ModelError::NegativeDegree(b.label.clone()));
    }
    let (pieces_checked, counterexamples, inconclusive) = cancellation(m, 1, &[0]);
    Ok(InjectivityReport { pieces_checked, counterexamples, inconclusive })
}

/// Submodule of `(Z/p^e)^len` spanned by the columns of `mat`.
fn colspan(mat: &ModularMatrix) -> SubmoduleBasis {
    let gens = (0..mat.cols()).map(|j| mat.column(j)).collect();
    SubmoduleBasis::new(mat.modulus(), mat.rows(), gens).expect("ranks match")
}

fn same(a: &SubmoduleBasis, b: &SubmoduleBasis) -> bool {
    a.is_contained_in(b).expect("compatible") && b.is_contained_in(a).expect("compatible")
}

/// Computes `H^n(M/p^r)` for `r = 1..=rmax`, checks exactness of
/// `H(M/p) --p^r--> H(M/p^{r+1}) --> H(M/p^r)` and the inductive step
/// `H_1 = 0, H_r = 0 ⇒ H_{r+1} = 0`.
pub fn w1_vanishing_propagation_check(m: &DieudonneModel, n: i32, rmax: u32) -> Result<PropagationReport, ModelError> {
    check_level(m, rmax, m.n_exp())?;
    let md = m.modulus();
    let p = m.p();
    let mut report = PropagationReport { degree: n, rmax, weights: Vec::new(), inconclusive: Vec::new() };
    for k in m.weights_in_degree(n) {
        let piece = m.piece(n, &k);
        let target = m.piece(n + 1, &k);
        let dn = m.image_matrix(&[Op::D], &m.piece_vectors(&piece), &target);
        let dprev = m.image_matrix(&[Op::D], &m.piece_vectors(&m.piece(n - 1, &k)), &piece);
        let (Some(dn), Some(dprev)) = (dn, dprev) else {
            report.inconclusive.push(Inconclusive {
                degree: n,
                weight: k,
                reason: "d undefined near the piece".into(),
                witness: None,
            });
            continue;
        };
        let mut wp = WeightPropagation {
            weight: k,
            cohomology: Vec::new(),
            exact: Vec::new(),
            induction_confirmed: Vec::new(),
            induction_failed: Vec::new(),
        };
        for r in 1..=rmax {
            wp.cohomology.push(hn_block(m, n, r, &k).invariants.expect("d defined"));
        }
        // x with d x ≡ 0 mod p, as vectors over Z/p^N
        let p_id = ModularMatrix::identity(md, target.len()).scaled(p);
        let p_cols: Vec<Vec<u64>> = (0..target.len()).map(|j| p_id.column(j)).collect();
        let z1 = preimage(md, &dn, &p_cols, piece.len());
        for r in 1..rmax {
            let mr1 = md.with_exp(r + 1).expect("r < N");
            let dn1 = dn.reduce_to(mr1).expect("r < N");
            let z = SubmoduleBasis::new(mr1, piece.len(), kernel(&dn1)).expect("ranks match");
            let b = colspan(&dprev.reduce_to(mr1).expect("r < N"));
            let pr = mr1.p_pow(r);
            let lifted: Vec<Vec<u64>> = z1.iter().map(|x| x.iter().map(|&c| mr1.mul(mr1.reduce(c), pr)).collect()).collect();
            let image = SubmoduleBasis::new(mr1, piece.len(), lifted).expect("ranks match").sum(&b).expect("compatible");
            let pm: Vec<Vec<u64>> = (0..piece.len())
                .map(|j| ModularMatrix::identity(mr1, piece.len()).scaled(pr).column(j))
                .collect();
            let pm = SubmoduleBasis::new(mr1, piece.len(), pm).expect("ranks match");
            let ker = z.intersection(&b.sum(&pm).expect("compatible")).expect("compatible");
            wp.exact.push(same(&image, &ker));
            let h = |s: u32| wp.cohomology[(s - 1) as usize].is_empty();
            if h(1) && h(r) {
                if h(r + 1) {
                    wp.induction_confirmed.push(r);
                } else {
                    wp.induction_failed.push(r);
                }
            }
        }
        report.weights.push(wp);
    }
    Ok(report)
}
