use std::time::Instant;

use proptest::prelude::*;

use satdrw::dieudonne::{
    a1_model, check_axioms, compare_wr_hn, f_cancellation_check, frobenius_injectivity_degree0_check, hn_mod_pr,
    saturation_witness, w1_vanishing_propagation_check, wr_quotient, DieudonneModel, ModelJson, Weight,
};

fn fixture(name: &str) -> DieudonneModel {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let j: ModelJson = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    DieudonneModel::from_json(&j).unwrap()
}

#[test]
fn a1_sweep() {
    let start = Instant::now();
    for p in [2, 3] {
        for wmax in 1..=6 {
            let a = a1_model(p, wmax, 4).unwrap();
            let m = a.model();
            let ax = check_axioms(m);
            assert!(ax.passed(), "p={p} wmax={wmax}: {:?}", ax.violations);
            assert!(saturation_witness(m).passed());
            assert!(a.check_products().passed());
            for r in 1..=3 {
                for n in 0..=1 {
                    let c = compare_wr_hn(m, n, r).unwrap();
                    assert!(c.passed(), "p={p} wmax={wmax} n={n} r={r}: {:?}", c.mismatched);
                    assert!(!c.matched.is_empty());
                }
                let fc = f_cancellation_check(m, r).unwrap();
                assert!(fc.passed(), "p={p} wmax={wmax} r={r}: {:?}", fc.counterexamples);
            }
            for n in 0..=2 {
                assert!(w1_vanishing_propagation_check(m, n, 4).unwrap().passed());
            }
            assert!(frobenius_injectivity_degree0_check(m).unwrap().injective());
        }
    }
    assert!(start.elapsed().as_secs() < 120);
}

#[test]
fn a1_known_groups() {
    // W_r of F_p[T] in weight m/p^j (j < r) is Z/p^{r-j}; integral weights give Z/p^r
    let a = a1_model(2, 6, 4).unwrap();
    let w = wr_quotient(a.model(), 0, 3).unwrap();
    for b in w.blocks.iter().filter(|b| b.interior) {
        let j = b.weight.depth();
        let expect = if j < 3 { vec![3 - j] } else { vec![] };
        assert_eq!(b.invariants.as_ref().unwrap(), &expect, "weight {}", b.weight);
    }
    // H^1(M/p) in integral weight K is Z/p iff p | K
    let h = hn_mod_pr(a.model(), 1, 1).unwrap();
    for b in h.blocks.iter().filter(|b| b.interior && b.weight.is_integral()) {
        let expect = if b.weight.num() % 2 == 0 { vec![1] } else { vec![] };
        assert_eq!(b.invariants.as_ref().unwrap(), &expect, "weight {}", b.weight);
    }
    // nothing in degree 2
    let p2 = w1_vanishing_propagation_check(a.model(), 2, 3).unwrap();
    assert!(p2.passed() && p2.weights.is_empty());
}

#[test]
fn propagation_induction_fires() {
    // H^0(M/p) vanishes in non-integral weights of the A1 model
    let a = a1_model(3, 3, 4).unwrap();
    let rep = w1_vanishing_propagation_check(a.model(), 0, 4).unwrap();
    assert!(rep.passed());
    assert!(rep.induction_confirmations() > 0);
    let half = rep.weights.iter().find(|w| w.weight == Weight::new(1, 1, 3).unwrap()).unwrap();
    assert!(half.cohomology.iter().all(Vec::is_empty));
}

#[test]
fn swap_model_is_caught() {
    let m = fixture("non_saturated_swap.json");
    assert!(check_axioms(&m).passed());
    let fc = f_cancellation_check(&m, 1).unwrap();
    assert!(!fc.passed());
    assert_eq!(fc.counterexamples[0].weight, Weight::zero());
    assert!(!saturation_witness(&m).passed());
    assert!(!frobenius_injectivity_degree0_check(&m).unwrap().injective());
}

#[test]
fn scaled_model_fails_saturation_only() {
    let m = fixture("non_saturated_scaled.json");
    assert!(check_axioms(&m).passed());
    let sat = saturation_witness(&m);
    assert!(!sat.passed());
    assert!(sat.inconclusive.is_empty());
    assert!(f_cancellation_check(&m, 1).unwrap().passed());
}

#[test]
fn broken_axiom_is_reported_with_witness() {
    let mut j = DieudonneModel::trivial(2, 3).unwrap().to_json();
    j.v.insert("1".into(), vec![("1".into(), 1)]);
    let m = DieudonneModel::from_json(&j).unwrap();
    let rep = check_axioms(&m);
    assert_eq!(rep.violations.len(), 1);
    assert_eq!(rep.violations[0].axiom, "FV = p");
    assert_eq!(rep.violations[0].element, "1");
}

#[test]
fn model_json_round_trip() {
    let a = a1_model(3, 2, 3).unwrap();
    let j = serde_json::to_string(&a.model().to_json()).unwrap();
    let back = DieudonneModel::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
    assert_eq!(&back, a.model());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn a1_invariants(p in prop::sample::select(vec![2u64, 3, 5]), wmax in 1u64..=5, n_exp in 2u32..=4) {
        let a = a1_model(p, wmax, n_exp).unwrap();
        let m = a.model();
        prop_assert!(check_axioms(m).passed());
        for r in 1..n_exp {
            for n in 0..=1 {
                prop_assert!(compare_wr_hn(m, n, r).unwrap().passed());
            }
            prop_assert!(f_cancellation_check(m, r).unwrap().passed());
        }
        for n in 0..=1 {
            prop_assert!(w1_vanishing_propagation_check(m, n, n_exp).unwrap().passed());
        }
    }
}
