//! Symmetric spectra, the auxiliary-space positivity certificate, and the
//! Dirichlet-form comparison between random-to-random and hit-and-run
//! top-to-random.

mod comparison;
mod factorization;
pub mod jacobi;

pub use comparison::{
    comparison_constant, dcomp_inequality_check, dirichlet_comparison_check,
    exact_sign_representation_eigenvalue, printed_sign_eigenvalue, sign_representation_eigenvalue,
    spectral_comparison_check, ComparisonPlan, DcompContext, DcompReport, DirichletComparison,
    GeneratorWeight, SpectralComparison, Word,
};
pub use factorization::{
    build_factorization, positivity_certificate, verify_factorization, AuxiliaryFactorization,
    PositivityCertificate, SparseMatrix, MATERIALIZE_LIMIT,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::Kernel;
use crate::numeric::fmt17;

/// Kernels must be symmetric to this tolerance before an eigensolve.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Tolerance used when counting eigenvalue multiplicities.
pub const MULTIPLICITY_TOLERANCE: f64 = 1e-8;

/// Real spectrum sorted in descending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    eigenvalues: Vec<f64>,
}

impl SpectralReport {
    pub fn from_values(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        SpectralReport { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn top(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `β₁`, or `None` for a one-point space.
    pub fn second(&self) -> Option<f64> {
        self.eigenvalues.get(1).copied()
    }

    pub fn gap(&self) -> f64 {
        1.0 - self.second().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    pub fn count_near(&self, value: f64, tol: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&b| (b - value).abs() <= tol)
            .count()
    }

    pub fn multiplicity_of_one(&self) -> usize {
        self.count_near(1.0, MULTIPLICITY_TOLERANCE)
    }

    /// Number of eigenvalues with `|β| < bound`.
    pub fn count_abs_below(&self, bound: f64) -> usize {
        self.eigenvalues.iter().filter(|b| b.abs() < bound).count()
    }

    /// `Σ_{i≥1} β_i^{2t}`, the squared `d₂` distance after `t` steps of a
    /// symmetric walk started anywhere.
    pub fn d2_squared(&self, t: u32) -> f64 {
        let mut terms: Vec<f64> = self.eigenvalues[1..]
            .iter()
            .map(|b| b.powi(2 * t as i32))
            .collect();
        terms.sort_by(|a, b| a.total_cmp(b));
        terms
            .into_iter()
            .collect::<crate::numeric::KahanSum>()
            .value()
    }

    /// CSV with header `index,eigenvalue`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (i, b) in self.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{i},{}\n", fmt17(*b)));
        }
        out
    }
}

/// Full spectrum of a symmetric kernel.
pub fn symmetric_eigenvalues(kernel: &Kernel) -> Result<SpectralReport> {
    let max_asymmetry = kernel.max_asymmetry();
    if max_asymmetry > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { max_asymmetry });
    }
    let eigen = jacobi::jacobi_eigen(kernel.data().to_vec(), kernel.dim(), false)?;
    Ok(SpectralReport::from_values(eigen.values))
}

/// Eigenvalues and unit eigenvectors (rows of the returned matrix, aligned
/// with the descending order of the values).
pub fn symmetric_eigen(data: &[f64], dim: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let eigen = jacobi::jacobi_eigen(data.to_vec(), dim, true)?;
    let vectors = eigen.vectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eigen.values[b].total_cmp(&eigen.values[a]));
    Ok((
        order.iter().map(|&i| eigen.values[i]).collect(),
        order
            .iter()
            .map(|&i| vectors[i * dim..(i + 1) * dim].to_vec())
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_tuple, random_transposition_tuple, CyclicPower, GeneratingTuple};
    use crate::markov::{kernel_from_measure, DEFAULT_MAX_STATES};
    use crate::measure::{hit_and_run_measure, hnr_cyclic, hnr_top_to_random};

    #[test]
    fn identity_kernel_spectrum() {
        let r = symmetric_eigenvalues(&Kernel::identity(7)).unwrap();
        assert!(r.eigenvalues().iter().all(|&b| (b - 1.0).abs() < 1e-15));
        assert_eq!(r.multiplicity_of_one(), 7);
    }

    #[test]
    fn asymmetric_kernel_rejected() {
        let k = Kernel::new(2, vec![0.5, 0.5, 0.2, 0.8]).unwrap();
        assert!(matches!(
            symmetric_eigenvalues(&k),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn hnr_s4_spectrum() {
        let k = kernel_from_measure(&hnr_top_to_random(4).unwrap(), DEFAULT_MAX_STATES).unwrap();
        let r = symmetric_eigenvalues(&k).unwrap();
        assert_eq!(r.len(), 24);
        assert!((r.top() - 1.0).abs() < 1e-12);
        assert_eq!(r.multiplicity_of_one(), 1);
        assert!(r.min() >= -1e-10);
        assert!(r.count_near(0.75, MULTIPLICITY_TOLERANCE) >= 3);
    }

    #[test]
    fn d2_squared_matches_evolution() {
        for n in 3..=5 {
            let m = hnr_top_to_random(n).unwrap();
            let k = kernel_from_measure(&m, DEFAULT_MAX_STATES).unwrap();
            let r = symmetric_eigenvalues(&k).unwrap();
            for t in [0u32, 1, 2, 5, 9] {
                let nu = m.t_fold(t as usize).unwrap().to_dense(1000).unwrap();
                let d2 = crate::markov::d2_distance(&nu);
                assert!((d2 * d2 - r.d2_squared(t)).abs() < 1e-8, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn dinf_at_double_time_equals_d2_squared() {
        for n in 3..=5 {
            let m = hnr_top_to_random(n).unwrap();
            for t in 1..6 {
                let d2 = crate::markov::d2_distance(&m.t_fold(t).unwrap().to_dense(1000).unwrap());
                let dinf =
                    crate::markov::dinf_distance(&m.t_fold(2 * t).unwrap().to_dense(1000).unwrap());
                assert!((dinf - d2 * d2).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn single_generator_cyclic_is_uniform() {
        let g = CyclicPower::new(6, 1).unwrap();
        let one = crate::group::CyclicVector::unit(6, 1, 1, false).unwrap();
        let tuple = GeneratingTuple::new(g, vec![one]).unwrap();
        let q = hit_and_run_measure(&tuple).unwrap();
        let r = symmetric_eigenvalues(&kernel_from_measure(&q, 100).unwrap()).unwrap();
        assert!((r.top() - 1.0).abs() < 1e-14);
        assert!(r.eigenvalues()[1..].iter().all(|b| b.abs() < 1e-14));
    }

    #[test]
    fn other_hit_and_run_walks_are_positive() {
        for n in 3..=5 {
            let q = hit_and_run_measure(&random_transposition_tuple(n).unwrap()).unwrap();
            let r = symmetric_eigenvalues(&kernel_from_measure(&q, 1000).unwrap()).unwrap();
            assert!(r.min() >= -1e-10);
        }
        let q = hit_and_run_measure(&cyclic_tuple(5, 2).unwrap()).unwrap();
        assert!(q.max_asymmetry() == 0.0 && hnr_cyclic(5, 2).unwrap().support_len() == 9);
        let r = symmetric_eigenvalues(&kernel_from_measure(&q, 100).unwrap()).unwrap();
        assert!(r.min() >= -1e-10);
    }

    #[test]
    fn csv_is_descending() {
        let r = SpectralReport::from_values(vec![0.25, 1.0, 0.5]);
        assert_eq!(
            r.to_csv(),
            "index,eigenvalue\n0,1.0000000000000000e0\n1,5.0000000000000000e-1\n2,2.5000000000000000e-1\n"
        );
        assert_eq!(r.gap(), 0.5);
    }
}
