use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use satdrw::polyring::{Monomial, PolyRing, Polynomial, PresentedRing};
use satdrw::wittvec::{Integers, WittRing, WittVector};

// ghost components straight from the definition
fn ghost_oracle(p: u64, x: &[BigInt]) -> Vec<BigInt> {
    (0..x.len())
        .map(|i| {
            (0..=i)
                .map(|j| num_traits::pow(BigInt::from(p), j) * num_traits::pow(x[j].clone(), p.pow((i - j) as u32) as usize))
                .sum()
        })
        .collect()
}

fn random_int_vector(w: &WittRing<Integers>, r: usize, rng: &mut ChaCha8Rng) -> WittVector<BigInt> {
    w.vector((0..r).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect()).unwrap()
}

fn base(p: u64, which: usize) -> PresentedRing {
    match which {
        0 => PresentedRing::free(&PolyRing::new(p, vec![]).unwrap()).unwrap(),
        1 => PresentedRing::from_text(&PolyRing::new(p, vec!["x".into()]).unwrap(), &["x^3"]).unwrap(),
        _ => PresentedRing::from_text(&PolyRing::new(p, vec!["x".into(), "y".into()]).unwrap(), &["y^2 - x^3"]).unwrap(),
    }
}

fn random_elem(a: &PresentedRing, rng: &mut ChaCha8Rng) -> Polynomial {
    let mut f = a.zero();
    for _ in 0..rng.gen_range(0..=3) {
        let exps: Vec<u32> = (0..a.num_vars()).map(|_| rng.gen_range(0..=2)).collect();
        let c = rng.gen_range(0..a.p());
        f = f.try_add(&Polynomial::monomial(a.ring(), Monomial::new(exps), c)).unwrap();
    }
    a.reduce(&f)
}

fn random_vector(w: &WittRing<PresentedRing>, r: usize, rng: &mut ChaCha8Rng) -> WittVector<Polynomial> {
    w.vector((0..r).map(|_| random_elem(w.base(), rng)).collect()).unwrap()
}

fn primes() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ghost_is_a_ring_homomorphism(p in primes(), r in 1usize..=4, seed in any::<u64>()) {
        let w = WittRing::new(Integers { p }, r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_int_vector(&w, r, &mut rng);
        let y = random_int_vector(&w, r, &mut rng);
        let (gx, gy) = (ghost_oracle(p, x.coords()), ghost_oracle(p, y.coords()));
        let sum: Vec<BigInt> = gx.iter().zip(&gy).map(|(a, b)| a + b).collect();
        let prod: Vec<BigInt> = gx.iter().zip(&gy).map(|(a, b)| a * b).collect();
        let neg: Vec<BigInt> = gx.iter().map(|a| -a).collect();
        prop_assert_eq!(ghost_oracle(p, w.add(&x, &y).unwrap().coords()), sum);
        prop_assert_eq!(ghost_oracle(p, w.mul(&x, &y).unwrap().coords()), prod);
        prop_assert_eq!(ghost_oracle(p, w.neg(&x).unwrap().coords()), neg);
        prop_assert_eq!(w.ghost(&x), gx);
    }

    #[test]
    fn ring_axioms(p in primes(), which in 0usize..3, r in 1usize..=4, seed in any::<u64>()) {
        let w = WittRing::new(base(p, which), r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_vector(&w, r, &mut rng);
        let y = random_vector(&w, r, &mut rng);
        let z = random_vector(&w, r, &mut rng);
        prop_assert_eq!(w.add(&x, &y).unwrap(), w.add(&y, &x).unwrap());
        prop_assert_eq!(w.mul(&x, &y).unwrap(), w.mul(&y, &x).unwrap());
        prop_assert_eq!(
            w.add(&w.add(&x, &y).unwrap(), &z).unwrap(),
            w.add(&x, &w.add(&y, &z).unwrap()).unwrap()
        );
        prop_assert_eq!(
            w.mul(&w.mul(&x, &y).unwrap(), &z).unwrap(),
            w.mul(&x, &w.mul(&y, &z).unwrap()).unwrap()
        );
        prop_assert_eq!(
            w.mul(&x, &w.add(&y, &z).unwrap()).unwrap(),
            w.add(&w.mul(&x, &y).unwrap(), &w.mul(&x, &z).unwrap()).unwrap()
        );
        prop_assert_eq!(w.add(&x, &w.neg(&x).unwrap()).unwrap(), w.zero(r));
        prop_assert_eq!(w.mul(&x, &w.one(r)).unwrap(), x);
    }

    #[test]
    fn frobenius_and_verschiebung(p in primes(), which in 0usize..3, r in 2usize..=4, seed in any::<u64>()) {
        let w = WittRing::new(base(p, which), r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_elem(w.base(), &mut rng);
        // F[g] = [g]^p = [g^p]
        let fg = w.frobenius(&w.teichmuller(&g, r)).unwrap();
        let mut tp = w.one(r - 1);
        for _ in 0..p {
            tp = w.mul(&tp, &w.teichmuller(&g, r - 1)).unwrap();
        }
        prop_assert_eq!(&fg, &tp);
        prop_assert_eq!(&fg, &w.teichmuller(&w.base().pow(&g, p), r - 1));

        let x = random_vector(&w, r - 1, &mut rng);
        let y = random_vector(&w, r, &mut rng);
        // FV = p
        let p_int = BigInt::from(p);
        prop_assert_eq!(w.frobenius(&w.verschiebung(&x)).unwrap(), w.scalar(&p_int, &x).unwrap());
        // V(x) y = V(x F(y))
        prop_assert_eq!(
            w.mul(&w.verschiebung(&x), &y).unwrap(),
            w.verschiebung(&w.mul(&x, &w.frobenius(&y).unwrap()).unwrap())
        );
        // over F_p-algebras F is the coordinate-wise p-th power
        prop_assert_eq!(w.frobenius(&y).unwrap(), w.truncate(&w.frobenius_fp(&y).unwrap(), r - 1));
    }
}
