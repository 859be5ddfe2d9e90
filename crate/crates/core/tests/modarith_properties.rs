use std::collections::BTreeSet;

use proptest::prelude::*;

use satdrw::modarith::{
    kernel, smith_normal_form, solve_linear, submodule_membership, ModularMatrix, Modulus, SubmoduleBasis,
};

fn moduli() -> impl Strategy<Value = Modulus> {
    prop::sample::select(vec![(2u64, 1u32), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2)])
        .prop_map(|(p, e)| Modulus::new(p, e).unwrap())
}

fn matrix(md: Modulus, rows: usize, cols: usize) -> impl Strategy<Value = ModularMatrix> {
    prop::collection::vec(prop::collection::vec(0..md.value(), cols), rows)
        .prop_map(move |r| ModularMatrix::from_rows(md, &r).unwrap())
}

fn sized_matrix(max: usize) -> impl Strategy<Value = ModularMatrix> {
    (moduli(), 1..=max, 1..=max).prop_flat_map(|(md, r, c)| matrix(md, r, c))
}

// every tuple in (Z/q)^n
fn all_vectors(q: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| (0..q).map(move |c| [v.clone(), vec![c]].concat()))
            .collect();
    }
    out
}

fn span(md: Modulus, rank: usize, gens: &[Vec<u64>]) -> BTreeSet<Vec<u64>> {
    all_vectors(md.value(), gens.len())
        .into_iter()
        .map(|cs| {
            (0..rank)
                .map(|i| gens.iter().zip(&cs).fold(0, |acc, (g, &c)| md.add(acc, md.mul(g[i], c))))
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_form_diagonalizes(m in sized_matrix(5)) {
        let s = smith_normal_form(&m);
        let lhs = s.left.mul(&m).unwrap().mul(&s.right).unwrap();
        prop_assert_eq!(lhs, s.diagonal_matrix());
        let n = m.rows();
        prop_assert_eq!(s.left.mul(&s.left_inv).unwrap(), ModularMatrix::identity(m.modulus(), n));
        prop_assert_eq!(s.right.mul(&s.right_inv).unwrap(), ModularMatrix::identity(m.modulus(), m.cols()));
        // each diagonal entry divides the next
        let v = s.valuations();
        prop_assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn membership_matches_enumeration(
        (md, rank, gens, v) in (moduli(), 1usize..=3, 0usize..=3).prop_flat_map(|(md, rank, k)| {
            let q = md.value();
            (
                Just(md),
                Just(rank),
                prop::collection::vec(prop::collection::vec(0..q, rank), k),
                prop::collection::vec(0..q, rank),
            )
        })
    ) {
        let s = SubmoduleBasis::new(md, rank, gens.clone()).unwrap();
        let brute = span(md, rank, &gens).contains(&v);
        prop_assert_eq!(submodule_membership(&v, &s).unwrap(), brute);
    }

    #[test]
    fn solve_matches_enumeration(
        (m, b) in sized_matrix(3).prop_flat_map(|m| {
            let q = m.modulus().value();
            let rows = m.rows();
            (Just(m), prop::collection::vec(0..q, rows))
        })
    ) {
        let md = m.modulus();
        let brute = all_vectors(md.value(), m.cols()).into_iter().any(|x| m.mul_vec(&x).unwrap() == b);
        match solve_linear(&m, &b).unwrap() {
            Some(x) => {
                prop_assert!(brute);
                prop_assert_eq!(m.mul_vec(&x).unwrap(), b);
            }
            None => prop_assert!(!brute),
        }
        for k in kernel(&m) {
            prop_assert!(m.mul_vec(&k).unwrap().iter().all(|&c| c == 0));
        }
    }
}
