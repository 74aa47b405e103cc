//! Acceptance criteria for `hitrun`.
//!
//! Every criterion recomputes its reference values without going through
//! the code path under test where that is practical: exact rational matrix
//! powers for the single-card identities, deck rotations for comparison
//! words, and Dirichlet forms summed straight from their definition.

use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use hitrun::group::{
    cyclic_tuple, random_transposition_tuple, top_to_random_tuple, CyclicVector, FiniteGroup,
    GeneratingTuple,
};
use hitrun::lumping::{k_card_kernel, k_card_projection, lump};
use hitrun::markov::{distance_curve, kernel_from_measure};
use hitrun::measure::{
    borel_measure, crude_overhand_measure, hit_and_run_measure, hnr_cyclic,
    hnr_random_transposition, hnr_top_to_random, packet_description_measure,
    random_to_random_measure, GroupMeasure,
};
use hitrun::single_card::{
    build_k, d2_single_card, d2_spectral_sum, d2_squared_of_row, eigenvalue_exact,
    eigenvector_exact, kt_entry, tv_closed_forms, tv_single_card, tv_threshold,
};
use hitrun::spectral::{
    comparison_constant, positivity_certificate, printed_sign_eigenvalue,
    spectral_comparison_check, symmetric_eigenvalues, DcompContext, PositivityCertificate,
};
use hitrun::{Permutation, Result, SymmetricGroup};

/// Environment variable that enables the optional three-card chain on 21
/// cards.
pub const HEAVY_ENV: &str = "HITRUN_HEAVY";

/// Seed for every random test function batch.
pub const SEED: u64 = 0;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub criterion: usize,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Criterion = fn(bool) -> Result<(bool, String)>;

const CRITERIA: [Criterion; 10] = [
    positivity,
    factorization,
    single_card_exactness,
    single_card_identities,
    d2_consistency,
    comparison_machinery,
    lower_bound_and_gap,
    example_values,
    k_card_spectra,
    sign_representation,
];

/// Runs all criteria in parallel and returns them in order.
pub fn run_all(heavy: bool) -> Vec<Outcome> {
    (1..=CRITERIA.len())
        .into_par_iter()
        .map(|c| run(c, heavy))
        .collect()
}

/// Runs criterion `c` (1-based).
pub fn run(c: usize, heavy: bool) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = match CRITERIA.get(c.wrapping_sub(1)) {
        Some(f) => f(heavy).unwrap_or_else(|e| (false, format!("error: {e}"))),
        None => (false, format!("no criterion {c}")),
    };
    Outcome {
        criterion: c,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn rat(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn normals(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

struct Case {
    label: String,
    certificate: std::result::Result<PositivityCertificate, String>,
    quadratic_gap: std::result::Result<f64, String>,
}

/// `max |⟨Qf,f⟩ − (1/k) Σ_i ‖Π_i f‖²|` over seeded `f`, where `Π_i` averages
/// over the cosets `x⟨s_i⟩`. Both sides are summed from their definitions.
fn quadratic_oracle<G: FiniteGroup>(tuple: &GeneratingTuple<G>, trials: usize) -> Result<f64> {
    let group = tuple.group();
    let size = group.enumerable_size(5040)?;
    let elements = group.elements(size)?;
    let q = hit_and_run_measure(tuple)?;
    let support: Vec<(G::Element, f64)> = q.support().map(|(g, w)| (g.clone(), w)).collect();
    let right: Vec<Vec<usize>> = elements
        .iter()
        .map(|x| {
            support
                .iter()
                .map(|(g, _)| group.index_of(&group.multiply(x, g)))
                .collect()
        })
        .collect();
    let orbits: Vec<Vec<Vec<usize>>> = tuple
        .elements()
        .iter()
        .map(|s| {
            let m = group.order_of(s);
            elements
                .iter()
                .map(|x| {
                    (0..m)
                        .map(|j| group.index_of(&group.multiply(x, &group.power(s, j))))
                        .collect()
                })
                .collect()
        })
        .collect();
    let k = orbits.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let f = normals(size, &mut rng);
        let lhs: f64 = (0..size)
            .map(|x| {
                let qf: f64 = right[x]
                    .iter()
                    .zip(&support)
                    .map(|(&y, (_, w))| w * f[y])
                    .sum();
                qf * f[x]
            })
            .sum::<f64>()
            / size as f64;
        let rhs: f64 = orbits
            .iter()
            .map(|per_x| {
                per_x
                    .iter()
                    .map(|orbit| {
                        let avg = orbit.iter().map(|&y| f[y]).sum::<f64>() / orbit.len() as f64;
                        avg * avg
                    })
                    .sum::<f64>()
            })
            .sum::<f64>()
            / (k * size as f64);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

fn case<G: FiniteGroup>(label: String, tuple: Result<GeneratingTuple<G>>) -> Case {
    let tuple = match tuple {
        Ok(t) => t,
        Err(e) => {
            return Case {
                label,
                certificate: Err(e.to_string()),
                quadratic_gap: Err(e.to_string()),
            }
        }
    };
    Case {
        label,
        certificate: positivity_certificate(&tuple, 100, SEED, 5040).map_err(|e| e.to_string()),
        quadratic_gap: quadratic_oracle(&tuple, 100).map_err(|e| e.to_string()),
    }
}

const CYCLIC_CASES: [(usize, usize); 4] = [(5, 2), (7, 3), (6, 1), (4, 3)];

enum Job {
    TopToRandom(usize),
    Transposition(usize),
    Cyclic(usize, usize),
}

/// Certificates shared by the positivity and factorization criteria.
fn cases() -> &'static [Case] {
    static CASES: OnceLock<Vec<Case>> = OnceLock::new();
    CASES.get_or_init(|| {
        let mut jobs = Vec::new();
        for n in 3..=6 {
            jobs.push(Job::TopToRandom(n));
        }
        for n in 3..=5 {
            jobs.push(Job::Transposition(n));
        }
        for (m, d) in CYCLIC_CASES {
            jobs.push(Job::Cyclic(m, d));
        }
        jobs.into_par_iter()
            .map(|job| match job {
                Job::TopToRandom(n) => case(format!("hnr-ttr S_{n}"), top_to_random_tuple(n)),
                Job::Transposition(n) => {
                    case(format!("hnr-rt S_{n}"), random_transposition_tuple(n))
                }
                Job::Cyclic(m, d) => case(format!("cyclic Z_{m}^{d}"), cyclic_tuple(m, d)),
            })
            .collect()
    })
}

fn positivity(_: bool) -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for c in cases() {
        match &c.certificate {
            Ok(cert) => {
                worst = worst.min(cert.min_eig);
                if cert.min_eig < -1e-10 {
                    ok = false;
                    failures.push(format!("{} min {:e}", c.label, cert.min_eig));
                }
            }
            Err(e) => {
                ok = false;
                failures.push(format!("{}: {e}", c.label));
            }
        }
    }
    Ok((
        ok,
        format!(
            "{} cases, smallest eigenvalue {worst:e} (bound -1e-10){}",
            cases().len(),
            fail_suffix(&failures)
        ),
    ))
}

fn factorization(_: bool) -> Result<(bool, String)> {
    let mut ok = true;
    let (mut fact, mut mismatch, mut oracle) = (0.0f64, 0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for c in cases() {
        match (&c.certificate, &c.quadratic_gap) {
            (Ok(cert), Ok(gap)) => {
                fact = fact.max(cert.factorization_error);
                mismatch = mismatch.max(cert.max_quadratic_mismatch);
                oracle = oracle.max(*gap);
                if cert.factorization_error > 1e-12
                    || cert.max_quadratic_mismatch > 1e-10
                    || *gap > 1e-10
                    || cert.trials != 100
                {
                    ok = false;
                    failures.push(c.label.clone());
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                ok = false;
                failures.push(format!("{}: {e}", c.label));
            }
        }
    }
    Ok((
        ok,
        format!(
            "max |P*RP - Q| {fact:e} (bound 1e-12), quadratic identity {mismatch:e}, \
             coset-average oracle {oracle:e} (bound 1e-10){}",
            fail_suffix(&failures)
        ),
    ))
}

fn fail_suffix(failures: &[String]) -> String {
    if failures.is_empty() {
        String::new()
    } else {
        format!("; failing: {}", failures.join(", "))
    }
}

/// `K(i,j) = Σ_{g(i)=j} q(g)` in exact arithmetic, 0-based.
fn exact_one_card(n: usize) -> Result<Vec<Vec<BigRational>>> {
    let q = hnr_top_to_random(n)?;
    let mut k = vec![vec![BigRational::zero(); n]; n];
    let weights = q.exact_weights().expect("hit-and-run weights are exact");
    for (g, w) in weights {
        for (i, &j) in g.images().iter().enumerate() {
            k[i][j] += w;
        }
    }
    Ok(k)
}

/// `K^t` for `t = 0..=t_max`, exact.
fn exact_powers(n: usize, t_max: usize) -> Result<Vec<Vec<Vec<BigRational>>>> {
    let k = exact_one_card(n)?;
    let mut current: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { rat(1, 1) } else { rat(0, 1) })
                .collect()
        })
        .collect();
    let mut out = vec![current.clone()];
    for _ in 0..t_max {
        current = current
            .iter()
            .map(|row| {
                (0..n)
                    .map(|j| {
                        row.iter()
                            .zip(&k)
                            .fold(BigRational::zero(), |acc, (a, kr)| acc + a * &kr[j])
                    })
                    .collect()
            })
            .collect();
        out.push(current.clone());
    }
    Ok(out)
}

fn exact_tv(row: &[BigRational]) -> BigRational {
    let u = rat(1, row.len());
    row.iter()
        .fold(BigRational::zero(), |acc, x| acc + (x - &u).abs())
        / rat(2, 1)
}

fn single_card_exactness(_: bool) -> Result<(bool, String)> {
    let mut spectrum_dev = 0.0f64;
    for n in [5usize, 10, 25, 50] {
        let r = symmetric_eigenvalues(&build_k(n)?)?;
        for (i, b) in r.eigenvalues().iter().enumerate() {
            spectrum_dev = spectrum_dev.max((b - (1.0 - i as f64 / n as f64)).abs());
        }
    }
    let mut exact_ok = true;
    for n in 4..=8 {
        let k = exact_one_card(n)?;
        for i in 0..n {
            let beta = eigenvalue_exact(n, i);
            let psi = eigenvector_exact(n, i)?;
            exact_ok &= psi.iter().any(|x| !x.is_zero());
            for (row, p) in k.iter().zip(&psi) {
                let lhs = row
                    .iter()
                    .zip(&psi)
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b);
                exact_ok &= lhs == &beta * p;
            }
        }
    }
    let mut lump_dev = 0.0f64;
    for n in 4..=6 {
        let full = kernel_from_measure(&hnr_top_to_random(n)?, 720)?;
        let lumped = lump(&full, &k_card_projection(n, 1, 720)?)?;
        lump_dev = lump_dev.max(lumped.kernel.max_abs_diff(&build_k(n)?));
    }
    let ok = spectrum_dev <= 1e-10 && exact_ok && lump_dev <= 1e-13;
    Ok((
        ok,
        format!(
            "spectrum deviation {spectrum_dev:e} (bound 1e-10), exact eigenpairs n=4..8 {}, \
             lumping deviation {lump_dev:e} (bound 1e-13)",
            if exact_ok { "hold" } else { "FAIL" }
        ),
    ))
}

fn single_card_identities(_: bool) -> Result<(bool, String)> {
    let mut bottom = 0.0f64;
    let mut entries = 0.0f64;
    for n in 2..=10 {
        let powers = exact_powers(n, 40)?;
        for (t, kt) in powers.iter().enumerate() {
            let t32 = t as u32;
            let oracle = to_f64(&exact_tv(&kt[n - 1]));
            let formula = (1.0 - 1.0 / n as f64).powi(t as i32 + 1);
            let closed = tv_closed_forms(n, t32, n)?.value().unwrap_or(f64::NAN);
            bottom = bottom
                .max((oracle - formula).abs())
                .max((oracle - closed).abs())
                .max((oracle - tv_single_card(n, t32, n)?).abs());
            if t >= 1 {
                for i in 1..=n {
                    for j in 1..=n {
                        let e = (kt_entry(n, t32, i, j)? - to_f64(&kt[i - 1][j - 1])).abs();
                        entries = entries.max(e);
                    }
                }
            }
        }
    }
    let mut upper = 0.0f64;
    let mut grid = Vec::new();
    for n in 5..=8 {
        let first = tv_threshold(n)?.ceil() as usize;
        let powers = exact_powers(n, first + 40)?;
        grid.push(format!("n={n} t>={first}"));
        for (t, kt) in powers.iter().enumerate().skip(first) {
            let formula = (1.0 - 1.0 / n as f64).powi(t as i32) / n as f64;
            for i in 1..n {
                let oracle = to_f64(&exact_tv(&kt[i - 1]));
                let closed = tv_closed_forms(n, t as u32, i)?.value().unwrap_or(f64::NAN);
                upper = upper
                    .max((oracle - formula).abs())
                    .max((oracle - closed).abs());
            }
        }
    }
    let ok = bottom <= 1e-13 && upper <= 1e-12 && entries <= 1e-11;
    Ok((
        ok,
        format!(
            "bottom start {bottom:e} (bound 1e-13), other starts {upper:e} on {} (bound 1e-12), \
             K^t entries {entries:e} (bound 1e-11)",
            grid.join(", ")
        ),
    ))
}

fn d2_consistency(_: bool) -> Result<(bool, String)> {
    let mut spectral = 0.0f64;
    let mut matrix = 0.0f64;
    let mut start_one = 0.0f64;
    for n in 2..=8 {
        let k = build_k(n)?;
        let mut kt = hitrun::Kernel::identity(n);
        for t in 0..=50u32 {
            for i in 1..=n {
                let closed = d2_single_card(n, t, i)?;
                let s = (closed - d2_spectral_sum(n, t, i)?).abs();
                let m = (closed - d2_squared_of_row(kt.row(i - 1))).abs();
                spectral = spectral.max(s);
                matrix = matrix.max(m);
                if i == 1 {
                    start_one = start_one.max(s).max(m);
                }
            }
            kt = kt.matmul(&k);
        }
    }
    Ok((
        spectral <= 1e-10 && matrix <= 1e-10,
        format!(
            "closed form vs spectral sum {spectral:e}, vs matrix powers {matrix:e}, \
             start 1 alone {start_one:e} (bound 1e-10)"
        ),
    ))
}

/// Deck after moving the top card to position `k`, `l` times, for each
/// factor in turn. `deck[p]` is the card at position `p`.
fn deck_after_word(n: usize, factors: &[(usize, usize)]) -> Vec<usize> {
    let mut deck: Vec<usize> = (0..n).collect();
    for &(k, l) in factors {
        deck[..k].rotate_left(l % k);
    }
    deck
}

/// Deck after moving the card at position `i` to position `j`.
fn deck_after_insertion(n: usize, i: usize, j: usize) -> Vec<usize> {
    let mut deck: Vec<usize> = (0..n).collect();
    let card = deck.remove(i - 1);
    deck.insert(j - 1, card);
    deck
}

/// `E(f,f) = (1/2|G|) Σ_x Σ_y (f(xy) − f(x))² ν(y)`.
fn dirichlet_oracle(
    group: &SymmetricGroup,
    elements: &[Permutation],
    nu: &GroupMeasure<SymmetricGroup>,
    f: &[f64],
) -> f64 {
    let mut total = 0.0;
    for (x, fx) in elements.iter().zip(f) {
        for (y, w) in nu.support() {
            let d = f[group.index_of(&group.multiply(x, y))] - fx;
            total += d * d * w;
        }
    }
    total / (2.0 * elements.len() as f64)
}

fn comparison_machinery(_: bool) -> Result<(bool, String)> {
    let plans: Vec<_> = (3..=100usize)
        .into_par_iter()
        .map(|n| {
            let plan = comparison_constant(n)?;
            let mut words_ok = plan.words.len() == n * (n - 1);
            for w in &plan.words {
                words_ok &= w.len() == 2
                    && deck_after_word(n, &w.factors) == deck_after_insertion(n, w.i, w.j);
            }
            let mut weights_ok = plan.weights.len() == n * (n - 1) / 2;
            for w in &plan.weights {
                let expected = if w.k == n { rat(4, 1) } else { rat(8 * w.k, n) };
                weights_ok &= w.weight == expected && w.l >= 1 && w.l < w.k;
            }
            Ok((n, words_ok, weights_ok))
        })
        .collect::<Result<Vec<_>>>()?;
    let bad_words: Vec<usize> = plans.iter().filter(|p| !p.1).map(|p| p.0).collect();
    let bad_weights: Vec<usize> = plans.iter().filter(|p| !p.2).map(|p| p.0).collect();

    let mut max_ratio = 0.0f64;
    let mut forms_ok = true;
    let mut slack = f64::INFINITY;
    for n in 4..=5 {
        let group = SymmetricGroup::new(n)?;
        let elements = group.elements(120)?;
        let q = hnr_top_to_random(n)?;
        let mu = random_to_random_measure(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..100 {
            let f = normals(elements.len(), &mut rng);
            let eq = dirichlet_oracle(&group, &elements, &q, &f);
            let em = dirichlet_oracle(&group, &elements, &mu, &f);
            forms_ok &= em <= 8.0 * eq + 1e-12;
            max_ratio = max_ratio.max(em / eq);
        }
        slack = slack.min(spectral_comparison_check(n)?.min_slack);
    }
    let ok = bad_words.is_empty() && bad_weights.is_empty() && forms_ok && slack >= -1e-9;
    Ok((
        ok,
        format!(
            "words n=3..100 {}, weights 8k/n and 4 {}, max E_mu/E_q {max_ratio:.6} (bound 8), \
             sorted-spectrum slack {slack:e} (bound -1e-9)",
            if bad_words.is_empty() {
                "exact".to_string()
            } else {
                format!("FAIL at {bad_words:?}")
            },
            if bad_weights.is_empty() {
                "exact".to_string()
            } else {
                format!("FAIL at {bad_weights:?}")
            },
        ),
    ))
}

fn lower_bound_and_gap(_: bool) -> Result<(bool, String)> {
    let mut lower_ok = true;
    let mut lower_slack = f64::INFINITY;
    let mut mult = Vec::new();
    let mut dcomp_ok = true;
    let mut dcomp_q_ok = true;
    for n in 4..=5usize {
        let q = hnr_top_to_random(n)?;
        let curve = distance_curve(&q, 200, &Permutation::identity(n), 120)?;
        for r in curve.records() {
            let bound = ((n - 1) as f64).sqrt() * (1.0 - 1.0 / n as f64).powi(r.t as i32);
            lower_slack = lower_slack.min(r.d2 - bound);
            lower_ok &= r.d2 >= bound - 1e-9;
        }
        let ctx = DcompContext::new(n)?;
        for t in (0..=200).step_by(10) {
            let rep = ctx.evaluate(t);
            dcomp_ok &= rep.holds;
            dcomp_q_ok &= rep.holds_q_variant;
        }
        let r = spectral_comparison_check(n)?;
        mult.push((n, r.multiplicity_of_one_minus_inv_n));
    }
    let mut gaps = Vec::new();
    let mut gap_ok = true;
    for n in 4..=6usize {
        let r = spectral_comparison_check(n)?;
        gap_ok &= r.beta1 <= r.beta1_bound;
        gaps.push(format!(
            "n={n} beta1 {:.6} <= {:.6}",
            r.beta1, r.beta1_bound
        ));
    }
    let mult_ok = mult.iter().all(|&(n, m)| m >= n - 1);
    let ok = lower_ok && gap_ok && mult_ok && dcomp_ok;
    Ok((
        ok,
        format!(
            "d2 lower bound slack {lower_slack:e} (bound -1e-9); {}; multiplicity of 1-1/n {}; \
             d-comp with random-to-random {} on t=0,10,..,200 (with q: {})",
            gaps.join(", "),
            mult.iter()
                .map(|(n, m)| format!("n={n}: {m}"))
                .collect::<Vec<_>>()
                .join(", "),
            if dcomp_ok { "holds" } else { "FAILS" },
            if dcomp_q_ok { "holds" } else { "fails" },
        ),
    ))
}

fn example_values(_: bool) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    for (n, d) in [(5usize, 2usize), (7, 3)] {
        let q = hnr_cyclic(n, d)?;
        let zero = CyclicVector::zero(n, d);
        if q.exact_mass(&zero) != Some(rat(n + 2 * d, n * (1 + 2 * d))) {
            failures.push(format!("q(0) for ({n},{d})"));
        }
        for j in 0..d {
            for m in 1..n {
                let mut coords = vec![0; d];
                coords[j] = m;
                let v = CyclicVector::new(coords, n)?;
                if q.exact_mass(&v) != Some(rat(2, (1 + 2 * d) * n)) {
                    failures.push(format!("q({m}e_{}) for ({n},{d})", j + 1));
                }
            }
        }
    }
    for n in 3..=8 {
        let e = Permutation::identity(n);
        if hnr_random_transposition(n)?.exact_mass(&e) != Some(rat(n + 1, 2 * n)) {
            failures.push(format!("random transposition n={n}"));
        }
        if crude_overhand_measure(n)?.exact_mass(&e) != Some(rat(1, n)) {
            failures.push(format!("overhand n={n}"));
        }
        if borel_measure(n)?.exact_mass(&e) != Some(rat(2, n + 1)) {
            failures.push(format!("Borel n={n}"));
        }
    }
    for n in 2..=8 {
        let packet = packet_description_measure(n)?;
        let q = hnr_top_to_random(n)?;
        if packet.exact_weights().is_none() || packet.exact_weights() != q.exact_weights() {
            failures.push(format!("packet n={n}"));
        }
    }
    Ok((
        failures.is_empty(),
        format!(
            "cyclic (5,2),(7,3); identity masses n=3..8; packet description n=2..8{}",
            fail_suffix(&failures)
        ),
    ))
}

fn k_card_spectra(heavy: bool) -> Result<(bool, String)> {
    let mut cases = vec![(2usize, 21usize), (3, 10)];
    if heavy {
        cases.push((3, 21));
    }
    let results: Vec<(usize, usize, usize, f64)> = cases
        .into_par_iter()
        .map(|(k, n)| {
            let chain = k_card_kernel(&hnr_top_to_random(n)?, k, 10_000)?;
            let r = symmetric_eigenvalues(&chain.kernel)?;
            Ok((k, n, r.len(), r.min()))
        })
        .collect::<Result<Vec<_>>>()?;
    let ok = results.iter().all(|r| r.3 >= -1e-9);
    let mut detail: Vec<String> = results
        .iter()
        .map(|(k, n, s, m)| format!("k={k} n={n} ({s} states) min {m:e}"))
        .collect();
    if !heavy {
        detail.push(format!("k=3 n=21 skipped (set {HEAVY_ENV}=1)"));
    }
    Ok((ok, format!("{} (bound -1e-9)", detail.join(", "))))
}

fn inversion_sign(images: &[usize]) -> i32 {
    let mut s = 1;
    for a in 0..images.len() {
        for b in a + 1..images.len() {
            if images[a] > images[b] {
                s = -s;
            }
        }
    }
    s
}

fn sign_representation(_: bool) -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 4..=10 {
        let q = hnr_top_to_random(n)?;
        let exact = q
            .exact_weights()
            .expect("hit-and-run weights are exact")
            .iter()
            .fold(BigRational::zero(), |acc, (g, w)| {
                if inversion_sign(g.images()) > 0 {
                    acc + w
                } else {
                    acc - w
                }
            });
        let printed = printed_sign_eigenvalue(n);
        let diff = (to_f64(&exact) - to_f64(&printed)).abs();
        let hold = diff <= 1e-14;
        ok &= hold;
        parts.push(format!(
            "n={n} {exact} vs {printed} {}",
            if hold { "ok" } else { "MISMATCH" }
        ));
    }
    Ok((ok, format!("sum q(s)sign(s): {}", parts.join(", "))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deck_oracle_matches_permutation_convention() {
        for (i, j) in [(1usize, 4usize), (4, 1), (2, 3), (5, 2)] {
            let p = hitrun::group::random_insertion_generator(5, i, j).unwrap();
            let deck = deck_after_insertion(5, i, j);
            for (pos, &card) in deck.iter().enumerate() {
                assert_eq!(p.images()[card], pos);
            }
        }
        let sigma = hitrun::group::top_to_random_generator(6, 4).unwrap();
        let deck = deck_after_word(6, &[(4, 1), (1, 0)]);
        for (pos, &card) in deck.iter().enumerate() {
            assert_eq!(sigma.images()[card], pos);
        }
    }

    #[test]
    fn inversion_sign_matches_library() {
        let g = SymmetricGroup::new(5).unwrap();
        for x in g.elements(120).unwrap() {
            assert_eq!(inversion_sign(x.images()), x.sign());
        }
    }

    #[test]
    fn exact_powers_are_stochastic() {
        for kt in exact_powers(5, 6).unwrap() {
            for row in kt {
                assert_eq!(
                    row.iter().fold(BigRational::zero(), |a, b| a + b),
                    rat(1, 1)
                );
            }
        }
    }

    #[test]
    fn dirichlet_oracle_vanishes_on_constants() {
        let g = SymmetricGroup::new(4).unwrap();
        let el = g.elements(24).unwrap();
        let q = hnr_top_to_random(4).unwrap();
        assert_eq!(dirichlet_oracle(&g, &el, &q, &[3.0; 24]), 0.0);
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run(11, false).passed);
    }
}
