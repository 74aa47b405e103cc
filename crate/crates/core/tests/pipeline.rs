use hitrun::group::Permutation;
use hitrun::lumping::{
    k_card_kernel, k_card_projection, lifted_eigencheck, lump, sign_projection, spectrum_contained,
    tv_projection_bound_check,
};
use hitrun::markov::{distance_curve, kernel_distance_curve, kernel_from_measure};
use hitrun::measure::{hnr_top_to_random, GroupMeasure};
use hitrun::single_card::{build_k, cutoff_experiment, single_card_table, Regime};
use hitrun::spectral::{comparison_constant, symmetric_eigenvalues};
use hitrun::verify::run_suite;
use hitrun::SymmetricGroup;

#[test]
fn starting_distances_match_hand_values() {
    let q = hnr_top_to_random(3).unwrap();
    let curve = distance_curve(&q, 0, &Permutation::identity(3), 6).unwrap();
    let r = &curve.records()[0];
    assert!((r.tv - 5.0 / 6.0).abs() < 1e-15);
    assert!((r.d2 - 5f64.sqrt()).abs() < 1e-15);
    assert!((r.dinf - 5.0).abs() < 1e-15);
}

#[test]
fn two_card_chain_agrees_with_lumped_full_chain() {
    for n in 4..=5 {
        let q = hnr_top_to_random(n).unwrap();
        let full = kernel_from_measure(&q, 120).unwrap();
        let projection = k_card_projection(n, 2, 120).unwrap();
        let lumped = lump(&full, &projection).unwrap();
        let direct = k_card_kernel(&q, 2, 1000).unwrap();
        assert!(lumped.residual <= 1e-12);
        assert!(lumped.kernel.max_abs_diff(&direct.kernel) <= 1e-13);

        let part = symmetric_eigenvalues(&direct.kernel).unwrap();
        let whole = symmetric_eigenvalues(&full).unwrap();
        assert!(spectrum_contained(&part, &whole, 1e-9));
        assert!(
            lifted_eigencheck(&direct.kernel, &projection, &full, 1e-10)
                .unwrap()
                .passed
        );

        let full_curve = kernel_distance_curve(&full, 0, 30).unwrap();
        let lumped_curve = kernel_distance_curve(&direct.kernel, 0, 30).unwrap();
        assert!(tv_projection_bound_check(&full_curve, &lumped_curve).unwrap());
    }
}

#[test]
fn sign_chain_lumps_to_two_states() {
    let n = 5;
    let full = kernel_from_measure(&hnr_top_to_random(n).unwrap(), 120).unwrap();
    let lumped = lump(&full, &sign_projection(n, 120).unwrap()).unwrap();
    let stay = lumped.kernel.get(0, 0);
    assert!((2.0 * stay - 1.0 - 3.0 / 5.0).abs() < 1e-13);
}

#[test]
fn measure_round_trips_through_json() {
    let q = hnr_top_to_random(5).unwrap();
    let back: GroupMeasure<SymmetricGroup> =
        GroupMeasure::from_json(&q.to_json().unwrap()).unwrap();
    for (g, w) in q.support() {
        assert!((back.mass(g) - w).abs() < 1e-15);
    }
    assert_eq!(back.support_len(), q.support_len());
}

#[test]
fn single_card_table_uses_matrix_column() {
    let csv = single_card_table(6, &[1, 6], &[0, 3, 10]).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("n,start,t,tv_exact,tv_closed,d2_closed,d2_matrix")
    );
    assert_eq!(lines.count(), 6);
    let k = build_k(6).unwrap();
    assert_eq!(k.dim(), 6);
}

#[test]
fn bottom_regime_crosses_every_level() {
    let exp = cutoff_experiment(40, Regime::Bottom { i_prime: 1 }, 400).unwrap();
    assert!(exp.crossings.iter().all(|c| c.t.is_some()));
}

#[test]
fn comparison_constant_is_largest_weight() {
    let plan = comparison_constant(12).unwrap();
    assert!((plan.a_f64() - 8.0 * 11.0 / 12.0).abs() < 1e-15);
    assert!(plan
        .to_csv()
        .starts_with("k,l,occurrences,weight_exact,weight\n"));
}

#[test]
fn invariant_suite_passes() {
    let report = run_suite(false);
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
    assert!(failed.is_empty(), "{failed:?}");
}
