//! The invariant suite behind `hitrun verify`.
//!
//! Each check is independent and reports a pass flag with a short detail
//! string. Errors raised inside a check count as failures.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::group::{
    random_transposition_tuple, top_to_random_tuple, FiniteGroup, GeneratingTuple, Permutation,
};
use crate::lumping::{k_card_kernel, k_card_projection, lump};
use crate::markov::{
    d2_distance, dinf_distance, distance_curve, kernel_from_measure, Kernel, DEFAULT_MAX_STATES,
};
use crate::measure::{
    borel_measure, crude_overhand_measure, hnr_cyclic, hnr_random_transposition, hnr_top_to_random,
    packet_description_measure, random_to_random_measure, top_to_random_measure, GroupMeasure,
};
use crate::single_card::{
    build_k, d2_single_card, kt_entry, tv_closed_forms, tv_single_card, verify_eigenpairs_exact,
};
use crate::spectral::{
    build_factorization, comparison_constant, dirichlet_comparison_check, positivity_certificate,
    spectral_comparison_check, symmetric_eigenvalues, DcompContext,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub module: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

type CheckFn = fn(bool) -> Result<(bool, String)>;

const CHECKS: &[(&str, &str, CheckFn)] = &[
    ("group_core", "top_to_random_generates", group_generates),
    (
        "group_core",
        "element_orders_divide_group_order",
        group_orders,
    ),
    ("measures", "support_size", measures_support),
    (
        "measures",
        "packet_description_equals_hit_and_run",
        measures_packet,
    ),
    ("measures", "example_masses", measures_examples),
    ("markov", "stochastic_under_powers", markov_powers),
    ("markov", "convolution_matches_kernel_rows", markov_rows),
    ("markov", "d2_spectral_identity", markov_d2_identity),
    ("markov", "dinf_double_time", markov_dinf),
    ("spectral", "positivity", spectral_positivity),
    (
        "spectral",
        "auxiliary_projection_exact",
        spectral_projection,
    ),
    (
        "spectral",
        "multiplicity_of_one_minus_inv_n",
        spectral_multiplicity,
    ),
    ("spectral", "comparison_words", spectral_words),
    ("spectral", "dirichlet_comparison", spectral_dirichlet),
    ("spectral", "d_comp_inequality", spectral_dcomp),
    ("single_card", "k_equals_one_card_lumping", single_lumping),
    ("single_card", "exact_spectrum", single_spectrum),
    ("single_card", "d2_non_increasing", single_monotone),
    ("single_card", "kt_entry_matches_powers", single_powers),
    ("single_card", "tv_closed_forms", single_tv),
    ("lumping", "k_card_lumpability", lumping_residuals),
    ("lumping", "k_card_spectra_non_negative", lumping_spectra),
];

/// Runs every check. `heavy` enlarges a few of them (full groups up to
/// `S_7`, the three-card chain on 21 cards).
pub fn run_suite(heavy: bool) -> VerifyReport {
    let checks: Vec<CheckResult> = CHECKS
        .par_iter()
        .map(|&(module, name, check)| {
            let (passed, detail) = match check(heavy) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult {
                module: module.to_string(),
                name: name.to_string(),
                passed,
                detail,
            }
        })
        .collect();
    VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn full_degrees(heavy: bool) -> std::ops::RangeInclusive<usize> {
    if heavy {
        3..=7
    } else {
        3..=6
    }
}

fn full_kernel<G: FiniteGroup>(mu: &GroupMeasure<G>) -> Result<Kernel> {
    kernel_from_measure(mu, 5040)
}

fn group_generates(heavy: bool) -> Result<(bool, String)> {
    let top = if heavy { 8 } else { 7 };
    for n in 2..=top {
        if !top_to_random_tuple(n)?.generates(40_320)? {
            return Ok((false, format!("n={n}")));
        }
    }
    Ok((true, format!("n=2..{top}")))
}

fn group_orders(_: bool) -> Result<(bool, String)> {
    let g = crate::group::SymmetricGroup::new(5)?;
    for x in g.elements(120)? {
        if 120 % g.order_of(&x) != 0 {
            return Ok((false, format!("{x:?}")));
        }
    }
    Ok((true, "S_5".into()))
}

fn measures_support(_: bool) -> Result<(bool, String)> {
    for n in 3..=10 {
        let q = hnr_top_to_random(n)?;
        if q.support_len() != 1 + n * (n - 1) / 2 || !q.is_symmetric() {
            return Ok((false, format!("n={n}: {}", q.support_len())));
        }
    }
    Ok((true, "1 + n(n-1)/2 for n=3..10".into()))
}

fn measures_packet(_: bool) -> Result<(bool, String)> {
    for n in 2..=8 {
        if packet_description_measure(n)?.exact_weights() != hnr_top_to_random(n)?.exact_weights() {
            return Ok((false, format!("n={n}")));
        }
    }
    Ok((true, "exact for n=2..8".into()))
}

fn rat(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn measures_examples(_: bool) -> Result<(bool, String)> {
    for n in 3..=8 {
        let e = Permutation::identity(n);
        let rt = hnr_random_transposition(n)?.exact_mass(&e);
        let oh = crude_overhand_measure(n)?.exact_mass(&e);
        let bo = borel_measure(n)?.exact_mass(&e);
        if rt != Some(rat(n + 1, 2 * n)) || oh != Some(rat(1, n)) || bo != Some(rat(2, n + 1)) {
            return Ok((false, format!("n={n}")));
        }
    }
    for (n, d) in [(5usize, 2usize), (7, 3)] {
        let q = hnr_cyclic(n, d)?;
        let zero = q.group().identity();
        if q.exact_mass(&zero) != Some(rat(n + 2 * d, n * (1 + 2 * d))) {
            return Ok((false, format!("cyclic ({n},{d})")));
        }
    }
    Ok((true, "identity masses and cyclic values exact".into()))
}

fn markov_powers(_: bool) -> Result<(bool, String)> {
    let k = full_kernel(&hnr_top_to_random(4)?)?;
    let mut acc = Kernel::identity(k.dim());
    for _ in 0..500 {
        acc = acc.matmul(&k);
    }
    let err = acc.max_row_sum_error();
    Ok((
        err <= 1e-9,
        format!("row-sum error {err:e} after 500 steps"),
    ))
}

fn markov_rows(_: bool) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 3..=5 {
        let m = hnr_top_to_random(n)?;
        let k = full_kernel(&m)?;
        let e = m.group().index_of(&Permutation::identity(n));
        let mut kt = Kernel::identity(k.dim());
        for t in 1..=6 {
            kt = kt.matmul(&k);
            let conv = m.t_fold(t)?.to_dense(120)?;
            for (a, b) in kt.row(e).iter().zip(&conv) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok((worst <= 1e-10, format!("max deviation {worst:e}")))
}

fn markov_d2_identity(_: bool) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 3..=5 {
        for m in [hnr_top_to_random(n)?, random_to_random_measure(n)?] {
            let spectrum = symmetric_eigenvalues(&full_kernel(&m)?)?;
            let curve = distance_curve(&m, 12, &Permutation::identity(n), DEFAULT_MAX_STATES)?;
            for r in curve.records() {
                worst = worst.max((r.d2 * r.d2 - spectrum.d2_squared(r.t as u32)).abs());
            }
        }
    }
    Ok((worst <= 1e-8, format!("max deviation {worst:e}")))
}

fn markov_dinf(_: bool) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 3..=5 {
        let m = hnr_top_to_random(n)?;
        for t in 1..=5 {
            let d2 = d2_distance(&m.t_fold(t)?.to_dense(120)?);
            let dinf = dinf_distance(&m.t_fold(2 * t)?.to_dense(120)?);
            worst = worst.max((dinf - d2 * d2).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max deviation {worst:e}")))
}

fn spectral_positivity(heavy: bool) -> Result<(bool, String)> {
    let mut worst = f64::INFINITY;
    let mut factor = 0.0f64;
    let mut record = |c: crate::spectral::PositivityCertificate| {
        worst = worst.min(c.min_eig);
        factor = factor.max(c.factorization_error);
        c.passed
    };
    let mut ok = true;
    for n in full_degrees(heavy) {
        ok &= record(positivity_certificate(
            &top_to_random_tuple(n)?,
            10,
            0,
            5040,
        )?);
    }
    for n in 3..=5 {
        ok &= record(positivity_certificate(
            &random_transposition_tuple(n)?,
            10,
            0,
            5040,
        )?);
    }
    for (m, d) in [(5usize, 2usize), (6, 1), (4, 3)] {
        ok &= record(positivity_certificate(
            &crate::group::cyclic_tuple(m, d)?,
            10,
            0,
            5040,
        )?);
    }
    Ok((
        ok,
        format!("min eigenvalue {worst:e}, factorization error {factor:e}"),
    ))
}

fn spectral_projection(_: bool) -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in 3..=5 {
        let f = build_factorization(&top_to_random_tuple(n)?, 5040)?;
        ok &= f.orbits_partition_exactly();
        worst = worst
            .max(f.idempotence_error().unwrap_or(f64::NAN))
            .max(f.symmetry_error().unwrap_or(f64::NAN));
    }
    let t: GeneratingTuple<_> = random_transposition_tuple(4)?;
    ok &= build_factorization(&t, 100)?.orbits_partition_exactly();
    Ok((ok && worst <= 1e-13, format!("float error {worst:e}")))
}

fn spectral_multiplicity(_: bool) -> Result<(bool, String)> {
    let mut detail = Vec::new();
    let mut ok = true;
    for n in 4..=5 {
        let r = spectral_comparison_check(n)?;
        ok &= r.multiplicity_of_one_minus_inv_n >= n - 1;
        detail.push(format!("n={n}: {}", r.multiplicity_of_one_minus_inv_n));
    }
    Ok((ok, detail.join(", ")))
}

fn spectral_words(_: bool) -> Result<(bool, String)> {
    for n in 3..=100 {
        let plan = comparison_constant(n)?;
        if plan.a > rat(8, 1) {
            return Ok((false, format!("n={n}: A={}", plan.a)));
        }
    }
    Ok((true, "n=3..100, A <= 8".into()))
}

fn spectral_dirichlet(_: bool) -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in 4..=5 {
        let d = dirichlet_comparison_check(n, 100, 0)?;
        let s = spectral_comparison_check(n)?;
        ok &= d.passed && s.passed;
        detail.push(format!(
            "n={n}: ratio {:.4}, spectral slack {:e}",
            d.max_ratio, s.min_slack
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn spectral_dcomp(_: bool) -> Result<(bool, String)> {
    for n in 4..=5 {
        let ctx = DcompContext::new(n)?;
        for t in (0..=120).step_by(12) {
            if !ctx.evaluate(t).holds {
                return Ok((false, format!("n={n} t={t}")));
            }
        }
    }
    Ok((true, "n=4,5 on t=0,12,..,120".into()))
}

fn single_lumping(_: bool) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 4..=6 {
        let full = full_kernel(&hnr_top_to_random(n)?)?;
        let l = lump(&full, &k_card_projection(n, 1, 720)?)?;
        worst = worst.max(l.kernel.max_abs_diff(&build_k(n)?));
    }
    Ok((worst <= 1e-13, format!("max deviation {worst:e}")))
}

fn single_spectrum(_: bool) -> Result<(bool, String)> {
    for n in 2..=8 {
        if !verify_eigenpairs_exact(n)? {
            return Ok((false, format!("n={n}")));
        }
    }
    let r = symmetric_eigenvalues(&build_k(25)?)?;
    let worst = r
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(i, b)| (b - (1.0 - i as f64 / 25.0)).abs())
        .fold(0.0, f64::max);
    Ok((
        worst <= 1e-10,
        format!("exact n=2..8; n=25 deviation {worst:e}"),
    ))
}

fn single_monotone(_: bool) -> Result<(bool, String)> {
    for n in 2..=20 {
        for i in 1..=n {
            let mut prev = f64::INFINITY;
            for t in 0..=100 {
                let d = d2_single_card(n, t, i)?;
                if d > prev * (1.0 + 1e-12) {
                    return Ok((false, format!("n={n} i={i} t={t}")));
                }
                prev = d;
            }
        }
    }
    Ok((true, "n<=20, t<=100".into()))
}

fn single_powers(_: bool) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 2..=10 {
        let k = build_k(n)?;
        let mut kt = k.clone();
        for t in 1..=40 {
            for i in 1..=n {
                for j in 1..=n {
                    worst = worst.max((kt_entry(n, t, i, j)? - kt.get(i - 1, j - 1)).abs());
                }
            }
            kt = kt.matmul(&k);
        }
    }
    Ok((worst <= 1e-11, format!("max deviation {worst:e}")))
}

fn single_tv(_: bool) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 3..=10 {
        for t in 1..=200 {
            for i in 1..=n {
                if let Some(v) = tv_closed_forms(n, t, i)?.value() {
                    worst = worst.max((v - tv_single_card(n, t, i)?).abs());
                }
            }
        }
    }
    Ok((worst <= 1e-13, format!("max deviation {worst:e}")))
}

fn lumping_residuals(_: bool) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 4..=5 {
        let measures = [
            hnr_top_to_random(n)?,
            top_to_random_measure(n)?,
            random_to_random_measure(n)?,
            hnr_random_transposition(n)?,
            packet_description_measure(n)?,
            crude_overhand_measure(n)?,
            borel_measure(n)?,
        ];
        for m in &measures {
            let full = full_kernel(m)?;
            for k in 1..=3 {
                let l = lump(&full, &k_card_projection(n, k, 120)?)?;
                worst = worst.max(l.residual);
                let direct = k_card_kernel(m, k, 120)?;
                worst = worst.max(direct.kernel.max_abs_diff(&l.kernel));
            }
        }
    }
    Ok((worst <= 1e-12, format!("max residual {worst:e}")))
}

fn lumping_spectra(heavy: bool) -> Result<(bool, String)> {
    let mut cases = vec![(2usize, 21usize), (3, 10)];
    if heavy {
        cases.push((3, 21));
    }
    let mut detail = Vec::new();
    let mut ok = true;
    for (k, n) in cases {
        let c = k_card_kernel(&hnr_top_to_random(n)?, k, 10_000)?;
        let r = symmetric_eigenvalues(&c.kernel)?;
        ok &= r.min() >= -1e-9;
        detail.push(format!("({k},{n}) min {:e}", r.min()));
    }
    Ok((ok, detail.join(", ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_names_are_unique() {
        let mut names: Vec<_> = CHECKS.iter().map(|c| (c.0, c.1)).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CHECKS.len());
    }

    #[test]
    fn cheap_checks_pass() {
        for f in [
            group_orders,
            measures_packet,
            measures_examples,
            single_monotone,
        ] {
            let (ok, detail) = f(false).unwrap();
            assert!(ok, "{detail}");
        }
    }
}
