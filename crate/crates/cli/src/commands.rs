use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use satdrw::derham::top_form_presentation;
use satdrw::dieudonne::{
    a1_model, check_axioms, compare_wr_hn, f_cancellation_check, frobenius_injectivity_degree0_check,
    saturation_witness, w1_vanishing_propagation_check, AxiomReport, CancellationReport, Comparison,
    DieudonneModel, InjectivityReport, ModelJson, ProductReport, PropagationReport, SaturationReport,
};
use satdrw::polyring::{Ideal, Monomial, PolyRing, Polynomial, PresentationJson, PresentedRing, TermOrder};
use satdrw::vanish::{
    certify_top_vanishing, certify_tuple_vanishing, differential_p_closure, kernel_of_tuple, vanishing_degree_bound,
    verify_certificate, verify_tuple_certificate, CertificateJson, StepOp, VanishingCertificate,
};
use satdrw::wittvec::{Integers, WittRing, WittVector, WittVectorJson};

use crate::session::{CliError, Session};
use crate::WittOp;

pub type Out = Result<String, CliError>;

fn pretty<T: Serialize>(v: &T) -> Out {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Internal(e.to_string()))
}

fn show_ideal(polys: &[Polynomial], order: &TermOrder) -> String {
    if polys.is_empty() {
        return "(0)".into();
    }
    let parts: Vec<String> = polys.iter().map(|g| g.display_with(order)).collect();
    format!("({})", parts.join(", "))
}

fn ideal_strings(polys: &[Polynomial], order: &TermOrder) -> Vec<String> {
    polys.iter().map(|g| g.display_with(order)).collect()
}

fn describe(r: &PresentedRing) -> String {
    format!(
        "F_{}[{}]/{}  ({})",
        r.p(),
        r.ring().names().join(", "),
        show_ideal(r.ideal().generators(), r.order()),
        r.order()
    )
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

// `g=x^2` and `x^2` both name the polynomial x^2
fn strip_name(s: &str) -> &str {
    match s.split_once('=') {
        Some((_, rhs)) => rhs.trim(),
        None => s.trim(),
    }
}

// ---------------------------------------------------------------- witt

enum Vector {
    Poly(WittVector<Polynomial>),
    Int(WittVector<BigInt>),
}

struct Witt {
    ring: PresentedRing,
    integers: bool,
    p: u64,
}

impl Witt {
    fn fp(&self, level: usize) -> Result<WittRing<PresentedRing>, CliError> {
        Ok(WittRing::new(self.ring.clone(), level.max(1))?)
    }

    fn z(&self, level: usize) -> Result<WittRing<Integers>, CliError> {
        Ok(WittRing::new(Integers { p: self.p }, level.max(1))?)
    }

    fn parse(&self, text: &str) -> Result<Vector, CliError> {
        let text = strip_name(text);
        if text.starts_with('{') {
            if self.integers {
                return Err(CliError::Parse("JSON vectors are only read over F_p-algebras".into()));
            }
            let j: WittVectorJson = serde_json::from_str(text)?;
            return Ok(Vector::Poly(self.fp(j.r)?.from_json(&j)?));
        }
        let coords: Vec<&str> = text.trim_matches(|c| c == '(' || c == ')').split(',').map(str::trim).collect();
        if self.integers {
            let c = coords
                .iter()
                .map(|s| s.parse::<BigInt>().map_err(|e| CliError::Parse(format!("integer `{s}`: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Vector::Int(self.z(c.len())?.vector(c)?))
        } else {
            let c = coords.iter().map(|s| self.ring.parse(s)).collect::<Result<Vec<_>, _>>()?;
            Ok(Vector::Poly(self.fp(c.len())?.vector(c)?))
        }
    }

    fn element(&self, text: &str) -> Result<Polynomial, CliError> {
        Ok(self.ring.parse(strip_name(text))?)
    }

    fn show_poly_vector(&self, v: &WittVector<Polynomial>, json: bool) -> Out {
        if json {
            return pretty(&self.fp(v.level())?.to_json(v));
        }
        Ok(self.show_polys(v.coords()))
    }

    fn show_polys(&self, cs: &[Polynomial]) -> String {
        let parts: Vec<String> = cs.iter().map(|c| c.display_with(self.ring.order())).collect();
        format!("({})", parts.join(", "))
    }

    fn show_ints(&self, cs: &[BigInt], json: bool) -> Out {
        let parts: Vec<String> = cs.iter().map(BigInt::to_string).collect();
        if json {
            return pretty(&json!({"p": self.p, "r": cs.len(), "coords": parts}));
        }
        Ok(format!("({})", parts.join(", ")))
    }

    fn show(&self, v: &Vector, json: bool) -> Out {
        match v {
            Vector::Poly(v) => self.show_poly_vector(v, json),
            Vector::Int(v) => self.show_ints(v.coords(), json),
        }
    }
}

fn same_level(a: &Vector, b: &Vector) -> Result<usize, CliError> {
    let (la, lb) = match (a, b) {
        (Vector::Poly(a), Vector::Poly(b)) => (a.level(), b.level()),
        (Vector::Int(a), Vector::Int(b)) => (a.level(), b.level()),
        _ => return Err(CliError::Internal("mixed coefficient rings".into())),
    };
    if la != lb {
        return Err(CliError::Parse(format!("operands have lengths {la} and {lb}")));
    }
    Ok(la)
}

fn binary(w: &Witt, x: &str, y: &str, json: bool, op: &str) -> Out {
    let (a, b) = (w.parse(x)?, w.parse(y)?);
    let r = same_level(&a, &b)?;
    let v = match (a, b) {
        (Vector::Poly(a), Vector::Poly(b)) => {
            let wr = w.fp(r)?;
            Vector::Poly(match op {
                "add" => wr.add(&a, &b)?,
                "sub" => wr.sub(&a, &b)?,
                _ => wr.mul(&a, &b)?,
            })
        }
        (Vector::Int(a), Vector::Int(b)) => {
            let wr = w.z(r)?;
            Vector::Int(match op {
                "add" => wr.add(&a, &b)?,
                "sub" => wr.sub(&a, &b)?,
                _ => wr.mul(&a, &b)?,
            })
        }
        _ => unreachable!("checked by same_level"),
    };
    w.show(&v, json)
}

pub fn witt(s: &Session, integers: bool, op: &WittOp) -> Out {
    let ring = s.ring_or_prime_field()?;
    let w = Witt { p: ring.p(), ring, integers };
    let json = s.json();
    match op {
        WittOp::Add { x, y } => binary(&w, x, y, json, "add"),
        WittOp::Sub { x, y } => binary(&w, x, y, json, "sub"),
        WittOp::Mul { x, y } => binary(&w, x, y, json, "mul"),
        WittOp::Neg { x } => match w.parse(x)? {
            Vector::Poly(v) => w.show(&Vector::Poly(w.fp(v.level())?.neg(&v)?), json),
            Vector::Int(v) => w.show(&Vector::Int(w.z(v.level())?.neg(&v)?), json),
        },
        WittOp::Teich { g, level } => {
            if integers {
                let n: BigInt = strip_name(g).parse().map_err(|e| CliError::Parse(format!("integer `{g}`: {e}")))?;
                let wr = w.z(*level)?;
                return w.show(&Vector::Int(wr.teichmuller(&n, *level)), json);
            }
            let g = w.element(g)?;
            w.show(&Vector::Poly(w.fp(*level)?.teichmuller(&g, *level)), json)
        }
        WittOp::Frobenius { x } => match w.parse(x)? {
            Vector::Poly(v) => w.show(&Vector::Poly(w.fp(v.level())?.frobenius(&v)?), json),
            Vector::Int(v) => w.show(&Vector::Int(w.z(v.level())?.frobenius(&v)?), json),
        },
        WittOp::Verschiebung { x } => match w.parse(x)? {
            Vector::Poly(v) => w.show(&Vector::Poly(w.fp(v.level())?.verschiebung(&v)), json),
            Vector::Int(v) => w.show(&Vector::Int(w.z(v.level())?.verschiebung(&v)), json),
        },
        WittOp::Ghost { x } => match w.parse(x)? {
            Vector::Poly(v) => {
                let g = w.fp(v.level())?.ghost(&v);
                if json {
                    let terms: Vec<String> = g.iter().map(|c| c.display_with(w.ring.order())).collect();
                    return pretty(&json!({"p": w.p, "ghost": terms}));
                }
                Ok(w.show_polys(&g))
            }
            Vector::Int(v) => {
                let g = w.z(v.level())?.ghost(&v);
                if json {
                    let terms: Vec<String> = g.iter().map(BigInt::to_string).collect();
                    return pretty(&json!({"p": w.p, "ghost": terms}));
                }
                w.show_ints(&g, false)
            }
        },
        WittOp::CheckFrobenius { g, level } => {
            if integers {
                return Err(CliError::Inapplicable("check-frobenius needs an F_p-algebra".into()));
            }
            if *level < 2 {
                return Err(CliError::Inapplicable("Frobenius W_r -> W_{r-1} needs r >= 2".into()));
            }
            let g = w.element(g)?;
            let wr = w.fp(*level)?;
            let lhs = wr.frobenius(&wr.teichmuller(&g, *level))?;
            let t = wr.teichmuller(&g, level - 1);
            let mut pow = wr.one(level - 1);
            for _ in 0..w.p {
                pow = wr.mul(&pow, &t)?;
            }
            let gp = wr.teichmuller(&w.ring.pow(&g, w.p), level - 1);
            let holds = lhs == pow && lhs == gp;
            let text = if json {
                pretty(&json!({
                    "g": g.display_with(w.ring.order()),
                    "r": level,
                    "F[g]": wr.to_json(&lhs),
                    "[g]^p": wr.to_json(&pow),
                    "[g^p]": wr.to_json(&gp),
                    "holds": holds,
                }))?
            } else {
                format!(
                    "F[g]  = {}\n[g]^p = {}\n[g^p] = {}\nholds: {}",
                    w.show_polys(lhs.coords()),
                    w.show_polys(pow.coords()),
                    w.show_polys(gp.coords()),
                    if holds { "yes" } else { "no" }
                )
            };
            if holds {
                Ok(text)
            } else {
                println!("{text}");
                Err(CliError::Verification("F([g]) = [g]^p = [g^p] fails".into()))
            }
        }
    }
}

// ---------------------------------------------------------------- certify

fn step_text(c: &VanishingCertificate, i: usize) -> String {
    let s = &c.steps[i];
    let names = c.ring.ring().names();
    let op = match s.op {
        StepOp::PthRoot => "p-th root".to_string(),
        StepOp::Partial(v) => format!("d/d{}", names.get(v).map_or("?", String::as_str)),
    };
    let o = c.ring.order();
    format!("  {:>2}. {op:<10} {}  ->  {}", i + 1, s.input.display_with(o), s.output.display_with(o))
}

fn certificate_text(c: &VanishingCertificate, verified: bool) -> String {
    let mut out = vec![
        format!("ring: {}", describe(&c.ring)),
        format!("seed: {}", c.seed.display_with(c.ring.order())),
        "descent:".to_string(),
    ];
    out.extend((0..c.steps.len()).map(|i| step_text(c, i)));
    out.push(format!("terminal constant: {}", c.terminal));
    out.push(format!("verified: {}", if verified { "yes" } else { "no" }));
    out.join("\n")
}

fn read_certificate(path: &Path) -> Result<CertificateJson, CliError> {
    let v: Value = serde_json::from_str(&read_file(path)?)?;
    let inner = v.get("certificate").cloned().unwrap_or(v);
    Ok(serde_json::from_value(inner)?)
}

pub fn certify(s: &Session, verify: Option<&PathBuf>) -> Out {
    if let Some(path) = verify {
        let j = read_certificate(path)?;
        let c = VanishingCertificate::from_json(&j)?;
        if !verify_certificate(&c) {
            return Err(CliError::Verification(format!("{}: certificate replay failed", path.display())));
        }
        return if s.json() {
            pretty(&json!({"file": path.display().to_string(), "verified": true}))
        } else {
            Ok(format!("{}: verified", path.display()))
        };
    }
    let r = s.ring()?;
    let c = certify_top_vanishing(&r)?;
    let ok = verify_certificate(&c);
    let text = if s.json() {
        pretty(&json!({"certificate": c.to_json(), "verified": ok}))?
    } else {
        certificate_text(&c, ok)
    };
    if !ok {
        println!("{text}");
        return Err(CliError::Internal("freshly built certificate failed replay".into()));
    }
    Ok(text)
}

// ---------------------------------------------------------------- closure, kernel, dim, omega-top

pub fn closure(s: &Session) -> Out {
    let r = s.ring()?;
    let st = differential_p_closure(r.ideal())?;
    let order = TermOrder::grevlex();
    let basis = st.ideal.basis();
    if s.json() {
        return pretty(&json!({
            "input": ideal_strings(r.ideal().generators(), r.order()),
            "closure": ideal_strings(basis, &order),
            "unit": st.ideal.is_unit(),
            "generations": st.generations,
        }));
    }
    Ok(format!(
        "input:       {}\nclosure:     {}\ngenerations: {}",
        show_ideal(r.ideal().generators(), r.order()),
        show_ideal(basis, &order),
        st.generations
    ))
}

pub fn kernel(s: &Session, tuple: &[String], certify: bool) -> Out {
    let r = s.ring()?;
    if tuple.is_empty() {
        return Err(CliError::Parse("kernel needs at least one polynomial".into()));
    }
    let gs = tuple.iter().map(|t| Ok(r.parse(strip_name(t))?)).collect::<Result<Vec<_>, CliError>>()?;
    let bound = vanishing_degree_bound(&r)?;
    let order = TermOrder::grevlex();
    let (kernel, cert) = if certify {
        let c = certify_tuple_vanishing(&r, &gs)?;
        let ok = verify_tuple_certificate(&c);
        if !ok {
            return Err(CliError::Internal("freshly built tuple certificate failed replay".into()));
        }
        let ker = kernel_of_tuple(&r, &gs)?;
        (ker, Some(c))
    } else {
        (kernel_of_tuple(&r, &gs)?, None)
    };
    let shown: Vec<String> = gs.iter().map(|g| g.display_with(r.order())).collect();
    if s.json() {
        return pretty(&json!({
            "tuple": shown,
            "kernel": ideal_strings(kernel.basis(), &order),
            "dim_bound": bound,
            "kernel_element": cert.as_ref().map(|c| c.kernel_element.display_with(&order)),
            "certificate": cert.as_ref().map(|c| c.certificate.to_json()),
            "verified": cert.as_ref().map(|_| true),
        }));
    }
    let mut out = vec![
        format!("tuple:  t_i -> ({})", shown.join(", ")),
        format!("kernel: {}", show_ideal(kernel.basis(), &order)),
        format!("dim bound: {bound}"),
    ];
    if let Some(c) = cert {
        out.push(format!("kernel element: {}", c.kernel_element.display_with(&order)));
        out.push(certificate_text(&c.certificate, true));
    }
    Ok(out.join("\n"))
}

pub fn dim(s: &Session) -> Out {
    let r = s.ring()?;
    let d = vanishing_degree_bound(&r)?;
    if s.json() {
        return pretty(&json!({"dim": d}));
    }
    Ok(d.to_string())
}

pub fn omega_top(s: &Session) -> Out {
    let r = s.ring()?;
    let n = r.num_vars();
    let t = top_form_presentation(&std::sync::Arc::new(r.clone()))?;
    let order = TermOrder::grevlex();
    let w1 = if r.ideal().is_zero() {
        false
    } else {
        verify_certificate(&certify_top_vanishing(&r)?)
    };
    if s.json() {
        return pretty(&json!({
            "n": n,
            "annihilator": ideal_strings(t.ideal().basis(), &order),
            "kahler_vanishes": t.omega_vanishes(),
            "w1_vanishes": w1,
        }));
    }
    let yn = |b: bool| if b { "yes" } else { "no" };
    Ok(format!(
        "n: {n}\nannihilator of dx_1^...^dx_n in Omega^n: {}\nvanishes in Omega^n:    {}\nvanishes in W_1Omega^n: {}",
        show_ideal(t.ideal().basis(), &order),
        yn(t.omega_vanishes()),
        yn(w1)
    ))
}

// ---------------------------------------------------------------- dieudonne-check

#[derive(Serialize)]
struct DieudonneReport {
    model: String,
    p: u64,
    n_exp: u32,
    rmax: u32,
    dim: usize,
    axioms: AxiomReport,
    saturation: SaturationReport,
    products: Option<ProductReport>,
    comparisons: Vec<Comparison>,
    cancellation: Vec<CancellationReport>,
    propagation: Vec<PropagationReport>,
    injectivity: Option<InjectivityReport>,
    passed: bool,
}

const DEFAULT_A1_N: u32 = 4;

pub fn dieudonne_check(s: &Session, model: &str, wmax: u64, rmax: Option<u32>) -> Out {
    let (m, products, name) = if model == "a1" {
        let a = a1_model(s.prime(), wmax, s.coeff_exp.unwrap_or(DEFAULT_A1_N))?;
        let prod = a.check_products();
        (a.model().clone(), Some(prod), format!("a1 (wmax {wmax})"))
    } else {
        let j: ModelJson = serde_json::from_str(&read_file(Path::new(model))?)?;
        (DieudonneModel::from_json(&j)?, None, model.to_string())
    };
    let n_exp = m.n_exp();
    let rmax = rmax.unwrap_or(3).min(n_exp.saturating_sub(1).max(1));
    if rmax == 0 {
        return Err(CliError::Parse("--rmax must be at least 1".into()));
    }
    let axioms = check_axioms(&m);
    let saturation = saturation_witness(&m);
    let degrees: Vec<i32> = m.degrees().into_iter().collect();
    let mut comparisons = Vec::new();
    let mut cancellation = Vec::new();
    for r in 1..=rmax {
        for &n in &degrees {
            comparisons.push(compare_wr_hn(&m, n, r)?);
        }
        cancellation.push(f_cancellation_check(&m, r)?);
    }
    let propagation = degrees
        .iter()
        .map(|&n| w1_vanishing_propagation_check(&m, n, n_exp))
        .collect::<Result<Vec<_>, _>>()?;
    let injectivity = frobenius_injectivity_degree0_check(&m).ok();
    let passed = axioms.passed()
        && saturation.passed()
        && products.as_ref().is_none_or(ProductReport::passed)
        && comparisons.iter().all(Comparison::passed)
        && cancellation.iter().all(CancellationReport::passed)
        && propagation.iter().all(PropagationReport::passed)
        && injectivity.as_ref().is_none_or(InjectivityReport::injective);
    let report = DieudonneReport {
        model: name,
        p: m.p(),
        n_exp,
        rmax,
        dim: m.dim(),
        axioms,
        saturation,
        products,
        comparisons,
        cancellation,
        propagation,
        injectivity,
        passed,
    };
    let text = if s.json() { pretty(&report)? } else { dieudonne_text(&report) };
    if passed {
        Ok(text)
    } else {
        println!("{text}");
        Err(CliError::Verification("Dieudonné checks found failures".into()))
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn dieudonne_text(r: &DieudonneReport) -> String {
    let mut out = vec![format!("model {}: p = {}, N = {}, {} basis elements", r.model, r.p, r.n_exp, r.dim)];
    let checked: usize = r.axioms.checked.values().sum();
    out.push(format!("axioms:       {} ({checked} evaluations)", mark(r.axioms.passed())));
    for v in &r.axioms.violations {
        out.push(format!("  {} fails on {}: {:?} vs {:?}", v.axiom, v.element, v.lhs, v.rhs));
    }
    out.push(format!(
        "saturation:   {} ({} solved, {} inconclusive)",
        mark(r.saturation.passed()),
        r.saturation.solved.len(),
        r.saturation.inconclusive.len()
    ));
    for f in &r.saturation.failures {
        out.push(format!("  degree {} weight {}: dx = 0 mod p but x = {:?} is not in im F", f.degree, f.weight, f.x));
    }
    if let Some(p) = &r.products {
        let checked: usize = p.checked.values().sum();
        out.push(format!("products:     {} ({checked} evaluations)", mark(p.passed())));
        for v in &p.violations {
            out.push(format!("  {v}"));
        }
    }
    for c in &r.comparisons {
        out.push(format!(
            "W_{r} vs H^{n}:  {} ({} matched, {} skipped)",
            mark(c.passed()),
            c.matched.len(),
            c.skipped.len(),
            r = c.r,
            n = c.degree
        ));
        for (w, a, b) in &c.mismatched {
            out.push(format!("  weight {w}: {a:?} vs {b:?}"));
        }
    }
    for c in &r.cancellation {
        out.push(format!(
            "F-cancellation r={}: {} ({} pieces, {} inconclusive)",
            c.r,
            mark(c.passed()),
            c.pieces_checked,
            c.inconclusive.len()
        ));
        for x in &c.counterexamples {
            out.push(format!("  degree {} weight {}: x = {:?}, Fx = {:?}", x.degree, x.weight, x.x, x.fx));
        }
    }
    for p in &r.propagation {
        out.push(format!(
            "W_1 propagation n={}: {} ({} weights, {} induction steps confirmed)",
            p.degree,
            mark(p.passed()),
            p.weights.len(),
            p.induction_confirmations()
        ));
    }
    match &r.injectivity {
        Some(i) => out.push(format!("F injective in degree 0: {} ({} pieces)", mark(i.injective()), i.pieces_checked)),
        None => out.push("F injective in degree 0: skipped".into()),
    }
    out.push(format!("overall: {}", mark(r.passed)));
    out.join("\n")
}

// ---------------------------------------------------------------- sample

fn random_poly(ring: &std::sync::Arc<PolyRing>, rng: &mut ChaCha8Rng, max_deg: u32, max_terms: usize) -> Polynomial {
    let n = ring.num_vars();
    let mut f = Polynomial::zero(ring);
    for _ in 0..rng.gen_range(1..=max_terms) {
        let mut exps = vec![0u32; n];
        for _ in 0..rng.gen_range(0..=max_deg) {
            exps[rng.gen_range(0..n)] += 1;
        }
        let c = rng.gen_range(1..ring.p());
        f = f.try_add(&Polynomial::monomial(ring, Monomial::new(exps), c)).unwrap_or(f);
    }
    f
}

/// A random nonzero ideal, reproducible from `seed`.
pub fn sample_presentation(p: Option<u64>, seed: u64, max_vars: usize, max_degree: u32) -> Result<PresentationJson, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = p.unwrap_or_else(|| [2, 3, 5][rng.gen_range(0..3)]);
    let nv = rng.gen_range(1..=max_vars.max(1));
    let names: Vec<String> = ["x", "y", "z", "w", "u", "v"]
        .iter()
        .map(|s| s.to_string())
        .chain((6..nv).map(|i| format!("x{i}")))
        .take(nv)
        .collect();
    let ring = PolyRing::new(p, names)?;
    loop {
        let gens: Vec<Polynomial> =
            (0..rng.gen_range(1..=2)).map(|_| random_poly(&ring, &mut rng, max_degree, 3)).collect();
        if gens.iter().any(|g| !g.is_zero()) {
            let r = PresentedRing::new(&Ideal::new(&ring, gens)?)?;
            return Ok(r.to_json());
        }
    }
}

pub fn sample(s: &Session, count: usize, max_vars: usize, max_degree: u32) -> Out {
    let mut lines = Vec::new();
    for i in 0..count {
        let seed = s.seed.wrapping_add(i as u64);
        let j = sample_presentation(s.p, seed, max_vars, max_degree)?;
        lines.push(if s.json() {
            serde_json::to_string(&j)?
        } else {
            format!("F_{}[{}]/({})", j.p, j.vars.join(", "), j.ideal.join(", "))
        });
    }
    Ok(lines.join("\n"))
}
