use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use satdrw::derham::{top_form_is_zero_in_omega, top_form_presentation, DifferentialForm, PresentedRing};
use satdrw::polyring::{Monomial, PolyRing, Polynomial};

fn free(p: u64) -> Arc<PresentedRing> {
    let r = PolyRing::new(p, vec!["x".into(), "y".into(), "z".into()]).unwrap();
    Arc::new(PresentedRing::free(&r).unwrap())
}

fn random_poly(a: &PresentedRing, rng: &mut ChaCha8Rng, terms: usize) -> Polynomial {
    let mut f = a.zero();
    for _ in 0..terms {
        let exps: Vec<u32> = (0..a.num_vars()).map(|_| rng.gen_range(0..=3)).collect();
        let c = rng.gen_range(0..a.p());
        f = f.try_add(&Polynomial::monomial(a.ring(), Monomial::new(exps), c)).unwrap();
    }
    f
}

fn random_form(a: &Arc<PresentedRing>, q: usize, rng: &mut ChaCha8Rng) -> DifferentialForm {
    let mut out = DifferentialForm::zero(a, q);
    for _ in 0..rng.gen_range(0..=3) {
        let mut s: Vec<usize> = (0..3).collect();
        while s.len() > q {
            s.remove(rng.gen_range(0..s.len()));
        }
        let c = random_poly(a, rng, 3);
        out = out.add(&DifferentialForm::term(a, s, &c).unwrap()).unwrap();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn d_squared_and_leibniz(
        p in prop::sample::select(vec![2u64, 3, 5]),
        qa in 0usize..=3,
        qb in 0usize..=3,
        seed in any::<u64>(),
    ) {
        let a = free(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_form(&a, qa, &mut rng);
        let g = random_form(&a, qb, &mut rng);
        prop_assert!(f.exterior_d().exterior_d().is_zero_representative());
        let lhs = f.wedge(&g).unwrap().exterior_d();
        let mut rhs2 = f.wedge(&g.exterior_d()).unwrap();
        if qa % 2 == 1 {
            rhs2 = rhs2.neg();
        }
        let rhs = f.exterior_d().wedge(&g).unwrap().add(&rhs2).unwrap();
        prop_assert_eq!(lhs, rhs);
        // graded commutativity
        let mut gf = g.wedge(&f).unwrap();
        if (qa * qb) % 2 == 1 {
            gf = gf.neg();
        }
        prop_assert_eq!(f.wedge(&g).unwrap(), gf);
    }

    #[test]
    fn free_top_form_is_rank_one(p in prop::sample::select(vec![2u64, 3, 5]), seed in any::<u64>()) {
        let a = free(p);
        let t = top_form_presentation(&a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_poly(&a, &mut rng, 2);
        prop_assert_eq!(top_form_is_zero_in_omega(&c, &t).unwrap(), c.is_zero());
    }

    #[test]
    fn partials_of_generators_kill_the_top_form(
        p in prop::sample::select(vec![2u64, 3, 5]),
        seed in any::<u64>(),
    ) {
        let ring = PolyRing::new(p, vec!["x".into(), "y".into(), "z".into()]).unwrap();
        let base = PresentedRing::free(&ring).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<Polynomial> = (0..rng.gen_range(1..=2)).map(|_| random_poly(&base, &mut rng, 3)).collect();
        let ideal = satdrw::polyring::Ideal::new(&ring, gens.clone()).unwrap();
        let a = Arc::new(PresentedRing::new(&ideal).unwrap());
        let t = top_form_presentation(&a).unwrap();
        for f in &gens {
            prop_assert!(t.is_zero(f).unwrap());
            for i in 0..3 {
                prop_assert!(t.is_zero(&f.partial_derivative(i).unwrap()).unwrap());
            }
        }
    }
}
