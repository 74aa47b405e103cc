use proptest::prelude::*;

use hitrun::group::{CyclicPower, CyclicVector, FiniteGroup, GeneratingTuple, Permutation};
use hitrun::markov::{distances, kernel_from_measure};
use hitrun::measure::hit_and_run_measure;
use hitrun::spectral::{positivity_certificate, symmetric_eigenvalues};
use hitrun::SymmetricGroup;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    let size: usize = (1..=n).product();
    (0..size).prop_map(move |r| Permutation::from_lex_rank(n, r))
}

fn tuple_s4() -> impl Strategy<Value = Vec<Permutation>> {
    prop::collection::vec(perm(4), 1..5)
}

fn tuple_cyclic() -> impl Strategy<Value = (usize, usize, Vec<Vec<usize>>)> {
    (2usize..6, 1usize..3).prop_flat_map(|(m, d)| {
        (
            Just(m),
            Just(d),
            prop::collection::vec(prop::collection::vec(0..m, d), 1..4),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn any_hit_and_run_walk_on_s4_is_non_negative(elements in tuple_s4()) {
        let tuple = GeneratingTuple::new(SymmetricGroup::new(4).unwrap(), elements).unwrap();
        let q = hit_and_run_measure(&tuple).unwrap();
        prop_assert!(q.max_asymmetry() <= 1e-15);
        let spectrum = symmetric_eigenvalues(&kernel_from_measure(&q, 24).unwrap()).unwrap();
        prop_assert!(spectrum.min() >= -1e-10, "min {}", spectrum.min());
        prop_assert!((spectrum.top() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn any_hit_and_run_walk_on_cyclic_powers_factorizes((m, d, coords) in tuple_cyclic()) {
        let group = CyclicPower::new(m, d).unwrap();
        let elements = coords
            .into_iter()
            .map(|c| CyclicVector::new(c, m).unwrap())
            .collect();
        let tuple = GeneratingTuple::new(group, elements).unwrap();
        let cert = positivity_certificate(&tuple, 5, 7, 1000).unwrap();
        prop_assert!(cert.passed, "{cert:?}");
    }

    #[test]
    fn convolution_is_associative_on_s4(
        a in tuple_s4(),
        b in tuple_s4(),
        c in tuple_s4(),
    ) {
        let g = SymmetricGroup::new(4).unwrap();
        let m = |e: Vec<Permutation>| {
            hit_and_run_measure(&GeneratingTuple::new(g, e).unwrap()).unwrap()
        };
        let (a, b, c) = (m(a), m(b), m(c));
        let left = a.convolve(&b).unwrap().convolve(&c).unwrap().to_dense(24).unwrap();
        let right = a.convolve(&b.convolve(&c).unwrap()).unwrap().to_dense(24).unwrap();
        for (x, y) in left.iter().zip(&right) {
            prop_assert!((x - y).abs() <= 1e-14);
        }
    }

    #[test]
    fn distances_are_ordered(weights in prop::collection::vec(0.0f64..1.0, 24)) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 0.0);
        let nu: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let d = distances(&nu);
        prop_assert!(2.0 * d.tv <= d.d2 + 1e-12);
        prop_assert!(d.d2 <= d.dinf + 1e-12);
        prop_assert!((0.0..=1.0).contains(&d.tv));
    }

    #[test]
    fn group_axioms_hold_in_s5(a in perm(5), b in perm(5), c in perm(5)) {
        let g = SymmetricGroup::new(5).unwrap();
        let ab_c = g.multiply(&g.multiply(&a, &b), &c);
        let a_bc = g.multiply(&a, &g.multiply(&b, &c));
        prop_assert_eq!(ab_c, a_bc);
        prop_assert_eq!(g.multiply(&a, &g.inverse(&a)), g.identity());
        prop_assert_eq!(g.element(g.index_of(&a)), a.clone());
        prop_assert_eq!(a.sign() * b.sign(), g.multiply(&a, &b).sign());
    }
}
