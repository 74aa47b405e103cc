//! Comparison of random-to-random against hit-and-run top-to-random.
//!
//! Every insertion `σ_ij` is written as a product of two powers of the
//! top-to-random generators, which bounds the random-to-random Dirichlet
//! form by a constant multiple of the hit-and-run one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{
    random_insertion_generator, top_to_random_generator, Permutation, SymmetricGroup,
};
use crate::markov::{dirichlet_form_with, kernel_from_measure, ConvolutionOperator};
use crate::measure::{hnr_top_to_random, random_to_random_measure, GroupMeasure};
use crate::numeric::KahanSum;
use crate::spectral::{symmetric_eigenvalues, SpectralReport};

/// Largest degree for which the comparison checks build both full kernels.
const FULL_GROUP_DEGREE: usize = 6;

/// `σ_ij` as `σ_{k₁}^{ℓ₁} σ_{k₂}^{ℓ₂}`, applied left to right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    pub i: usize,
    pub j: usize,
    /// Both factors as `(k, ℓ)`, including trivial ones.
    pub factors: [(usize, usize); 2],
}

impl Word {
    fn new(i: usize, j: usize) -> Self {
        let factors = if i < j {
            [(j, i), (j - 1, j - i)]
        } else {
            [(i - 1, j - 1), (i, i - j)]
        };
        Word { i, j, factors }
    }

    /// Factors that are not the identity.
    pub fn nontrivial(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.factors.iter().copied().filter(|&(k, l)| l % k != 0)
    }

    /// Word length used in the comparison constant.
    pub fn len(&self) -> usize {
        2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn evaluate(&self, n: usize) -> Result<Permutation> {
        let mut out = Permutation::identity(n);
        for &(k, l) in &self.factors {
            out = out.compose(&top_to_random_generator(n, k)?.pow(l as u64))?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorWeight {
    pub k: usize,
    pub l: usize,
    /// Number of words containing `σ_k^ℓ`.
    pub occurrences: usize,
    pub weight: BigRational,
}

#[derive(Clone, Debug)]
pub struct ComparisonPlan {
    pub n: usize,
    pub words: Vec<Word>,
    /// One entry per `σ_k^ℓ ≠ e` in the support of `q`, ordered by `(k, ℓ)`.
    pub weights: Vec<GeneratorWeight>,
    pub a: BigRational,
}

impl ComparisonPlan {
    pub fn a_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN)
    }

    pub fn weight(&self, k: usize, l: usize) -> Option<&BigRational> {
        self.weights
            .iter()
            .find(|w| w.k == k && w.l == l)
            .map(|w| &w.weight)
    }

    /// CSV with header `k,l,occurrences,weight_exact,weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,l,occurrences,weight_exact,weight\n");
        for w in &self.weights {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                w.k,
                w.l,
                w.occurrences,
                w.weight,
                crate::numeric::fmt17(w.weight.to_f64().unwrap_or(f64::NAN))
            ));
        }
        out
    }
}

/// Builds and validates all words for `S_n` and the per-generator weights
/// `(1/q(σ)) Σ_ij |σ_ij| N(σ,σ_ij) μ(σ_ij)` with `μ(σ_ij) = 1/n²` per
/// ordered pair.
pub fn comparison_constant(n: usize) -> Result<ComparisonPlan> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "comparison needs n >= 3, got {n}"
        )));
    }
    let mut words = Vec::with_capacity(n * (n - 1));
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let w = Word::new(i, j);
            if w.evaluate(n)? != random_insertion_generator(n, i, j)? {
                return Err(Error::WordMismatch { i, j });
            }
            words.push(w);
        }
    }

    let q = hnr_top_to_random(n)?;
    let pair_mass = BigRational::new(BigInt::from(1), BigInt::from(n * n));
    let mut counts = vec![vec![0usize; n + 1]; n + 1];
    for w in &words {
        for (k, l) in w.nontrivial() {
            counts[k][l] += 1;
        }
    }
    let mut weights = Vec::new();
    let mut a = BigRational::zero();
    for (k, row) in counts.iter().enumerate().skip(2) {
        for (l, &occurrences) in row.iter().enumerate().take(k).skip(1) {
            let g = top_to_random_generator(n, k)?.pow(l as u64);
            let qg = q
                .exact_mass(&g)
                .ok_or_else(|| Error::InvalidParameter("measure lost exact weights".into()))?;
            if qg.is_zero() {
                return Err(Error::InvalidParameter(format!(
                    "sigma_{k}^{l} outside the support"
                )));
            }
            let numer = BigRational::from_integer(BigInt::from(2 * occurrences)) * &pair_mass;
            let weight = numer / qg;
            if weight > a {
                a = weight.clone();
            }
            weights.push(GeneratorWeight {
                k,
                l,
                occurrences,
                weight,
            });
        }
    }
    Ok(ComparisonPlan {
        n,
        words,
        weights,
        a,
    })
}

fn full_group_guard(n: usize) -> Result<()> {
    if n > FULL_GROUP_DEGREE {
        return Err(Error::GuardExceeded {
            what: "comparison degree",
            size: n,
            limit: FULL_GROUP_DEGREE,
        });
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n={n} < 3")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirichletComparison {
    pub n: usize,
    pub trials: usize,
    /// Largest `E_μ(f,f) / E_q(f,f)` over the batch.
    pub max_ratio: f64,
    /// Smallest `8 E_q(f,f) − E_μ(f,f)`.
    pub min_slack: f64,
    pub passed: bool,
}

/// `E_μ(f,f) ≤ 8 E_q(f,f) + 1e−12` on seeded random functions.
pub fn dirichlet_comparison_check(
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<DirichletComparison> {
    full_group_guard(n)?;
    let size = (1..=n).product();
    let q = ConvolutionOperator::new(&hnr_top_to_random(n)?, size)?;
    let mu = ConvolutionOperator::new(&random_to_random_measure(n)?, size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    let mut min_slack = f64::INFINITY;
    for _ in 0..trials {
        let f: Vec<f64> = (0..size).map(|_| StandardNormal.sample(&mut rng)).collect();
        let eq = dirichlet_form_with(&q, &f, &f)?;
        let em = dirichlet_form_with(&mu, &f, &f)?;
        if eq > 0.0 {
            max_ratio = max_ratio.max(em / eq);
        }
        min_slack = min_slack.min(8.0 * eq - em);
    }
    Ok(DirichletComparison {
        n,
        trials,
        max_ratio,
        min_slack,
        passed: trials == 0 || min_slack >= -1e-12,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralComparison {
    pub n: usize,
    /// `min_i [(1 − β_i) − (1 − α_i)/8]` over the sorted spectra.
    pub min_slack: f64,
    pub beta1: f64,
    /// `1 − 1/(8n)`.
    pub beta1_bound: f64,
    pub multiplicity_of_one_minus_inv_n: usize,
    pub passed: bool,
}

fn spectra(n: usize) -> Result<(SpectralReport, SpectralReport)> {
    full_group_guard(n)?;
    let size = (1..=n).product();
    let q = symmetric_eigenvalues(&kernel_from_measure(&hnr_top_to_random(n)?, size)?)?;
    let mu = symmetric_eigenvalues(&kernel_from_measure(&random_to_random_measure(n)?, size)?)?;
    Ok((q, mu))
}

/// Sorted-spectrum consequence of the form comparison, with the gap bound.
pub fn spectral_comparison_check(n: usize) -> Result<SpectralComparison> {
    let (q, mu) = spectra(n)?;
    let min_slack = q
        .eigenvalues()
        .iter()
        .zip(mu.eigenvalues())
        .map(|(b, a)| (1.0 - b) - (1.0 - a) / 8.0)
        .fold(f64::INFINITY, f64::min);
    let beta1 = q.second().unwrap_or(0.0);
    let beta1_bound = 1.0 - 1.0 / (8.0 * n as f64);
    Ok(SpectralComparison {
        n,
        min_slack,
        beta1,
        beta1_bound,
        multiplicity_of_one_minus_inv_n: q
            .count_near(1.0 - 1.0 / n as f64, super::MULTIPLICITY_TOLERANCE),
        passed: min_slack >= -1e-9 && beta1 <= beta1_bound,
    })
}

/// `Σ_σ μ(σ) sign(σ)`.
pub fn sign_representation_eigenvalue(mu: &GroupMeasure<SymmetricGroup>) -> f64 {
    let s: KahanSum = mu.support().map(|(g, w)| w * g.sign() as f64).collect();
    s.value()
}

/// Exact version, when the measure carries rational weights.
pub fn exact_sign_representation_eigenvalue(
    mu: &GroupMeasure<SymmetricGroup>,
) -> Option<BigRational> {
    let exact = mu.exact_weights()?;
    Some(exact.iter().fold(BigRational::zero(), |acc, (g, w)| {
        if g.sign() > 0 {
            acc + w
        } else {
            acc - w
        }
    }))
}

/// The closed form asserted for hit-and-run top-to-random: `1/2` for even
/// `n` and `(n−1)/(2n)` for odd `n`.
pub fn printed_sign_eigenvalue(n: usize) -> BigRational {
    if n.is_multiple_of(2) {
        BigRational::new(1.into(), 2.into())
    } else {
        BigRational::new(BigInt::from(n - 1), BigInt::from(2 * n))
    }
}

/// Both spectra needed by the `d₂` comparison inequality.
#[derive(Clone, Debug)]
pub struct DcompContext {
    pub n: usize,
    pub q: SpectralReport,
    pub mu: SpectralReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DcompReport {
    pub n: usize,
    pub t: u32,
    /// `d₂(q^{(t)},u)²`.
    pub lhs: f64,
    /// `n!·e^{−t/8} + d₂(μ^{(⌊t/12⌋)},u)²` with `μ` random-to-random.
    pub rhs: f64,
    /// Same with `q` in the last term.
    pub rhs_q_variant: f64,
    pub holds: bool,
    pub holds_q_variant: bool,
}

impl DcompContext {
    pub fn new(n: usize) -> Result<Self> {
        if n > 5 {
            return Err(Error::GuardExceeded {
                what: "d-comp degree",
                size: n,
                limit: 5,
            });
        }
        let (q, mu) = spectra(n)?;
        Ok(DcompContext { n, q, mu })
    }

    pub fn evaluate(&self, t: u32) -> DcompReport {
        let factorial: f64 = (1..=self.n).map(|k| k as f64).product();
        let head = factorial * (-(t as f64) / 8.0).exp();
        let lhs = self.q.d2_squared(t);
        let rhs = head + self.mu.d2_squared(t / 12);
        let rhs_q_variant = head + self.q.d2_squared(t / 12);
        DcompReport {
            n: self.n,
            t,
            lhs,
            rhs,
            rhs_q_variant,
            holds: lhs <= rhs,
            holds_q_variant: lhs <= rhs_q_variant,
        }
    }
}

pub fn dcomp_inequality_check(n: usize, t: u32) -> Result<DcompReport> {
    Ok(DcompContext::new(n)?.evaluate(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::GroupMeasure;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn words_multiply_out() {
        for n in 3..=30 {
            let plan = comparison_constant(n).unwrap();
            assert_eq!(plan.words.len(), n * (n - 1));
        }
    }

    #[test]
    fn trivial_factors_only_at_first_positions() {
        let plan = comparison_constant(6).unwrap();
        for w in &plan.words {
            let trivial = 2 - w.nontrivial().count();
            if trivial > 0 {
                assert!(w.i == 1 || w.j == 1 || (w.i, w.j) == (1, 2), "{w:?}");
            }
        }
    }

    #[test]
    fn weights_are_exact() {
        for n in [3usize, 4, 7, 12, 50] {
            let plan = comparison_constant(n).unwrap();
            for w in &plan.weights {
                let expected = if w.k < n {
                    rat(8 * w.k as i64, n as i64)
                } else {
                    rat(4, 1)
                };
                assert_eq!(w.weight, expected, "n={n} k={} l={}", w.k, w.l);
            }
            assert!(plan.a <= rat(8, 1));
        }
    }

    #[test]
    fn csv_rows() {
        let csv = comparison_constant(50).unwrap().to_csv();
        assert!(csv.contains("\n3,1,4,12/25,"));
        assert!(csv.contains("\n50,7,2,4,"));
    }

    #[test]
    fn rejects_small_n() {
        assert!(comparison_constant(2).is_err());
    }

    #[test]
    fn dirichlet_comparison_n4() {
        let r = dirichlet_comparison_check(4, 100, 0).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.max_ratio <= 8.0);
    }

    #[test]
    fn constant_function_has_zero_forms() {
        let q = ConvolutionOperator::new(&hnr_top_to_random(4).unwrap(), 24).unwrap();
        let ones = vec![1.0; 24];
        assert_eq!(dirichlet_form_with(&q, &ones, &ones).unwrap(), 0.0);
    }

    #[test]
    fn spectral_comparison_n4() {
        let r = spectral_comparison_check(4).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.beta1 - 0.75).abs() < 1e-10);
        assert_eq!(r.multiplicity_of_one_minus_inv_n, 3);
    }

    #[test]
    fn guard() {
        assert!(matches!(
            dirichlet_comparison_check(7, 1, 0),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn sign_eigenvalues() {
        let q4 = hnr_top_to_random(4).unwrap();
        assert_eq!(
            exact_sign_representation_eigenvalue(&q4).unwrap(),
            rat(1, 2)
        );
        assert!((sign_representation_eigenvalue(&q4) - 0.5).abs() < 1e-15);
        let g = SymmetricGroup::new(4).unwrap();
        let u = GroupMeasure::uniform(g, 100).unwrap();
        assert!(sign_representation_eigenvalue(&u).abs() < 1e-15);
        assert_eq!(printed_sign_eigenvalue(5), rat(2, 5));
    }

    #[test]
    fn odd_sign_eigenvalue_differs_from_closed_form() {
        for n in [3usize, 5, 7, 9] {
            let exact =
                exact_sign_representation_eigenvalue(&hnr_top_to_random(n).unwrap()).unwrap();
            assert_eq!(exact, rat(n as i64 + 1, 2 * n as i64));
            assert_ne!(exact, printed_sign_eigenvalue(n));
        }
    }

    #[test]
    fn sign_eigenvalue_is_in_spectrum() {
        let q = hnr_top_to_random(4).unwrap();
        let spec = symmetric_eigenvalues(&kernel_from_measure(&q, 100).unwrap()).unwrap();
        assert!(spec.count_near(sign_representation_eigenvalue(&q), 1e-9) >= 1);
    }

    #[test]
    fn dcomp_at_zero_and_grid() {
        let ctx = DcompContext::new(4).unwrap();
        let r0 = ctx.evaluate(0);
        assert!((r0.lhs - 23.0).abs() < 1e-9);
        assert!((r0.rhs - 47.0).abs() < 1e-9);
        assert!(ctx.evaluate(48).holds);
        assert!(DcompContext::new(6).is_err());
    }
}
