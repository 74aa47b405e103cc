//! Projections of Markov chains and the chains that follow `k` cards.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, SymmetricGroup};
use crate::markov::{DistanceCurve, Kernel};
use crate::measure::GroupMeasure;
use crate::numeric::fmt17;
use crate::spectral::{symmetric_eigen, SpectralReport};

/// Maximum lumpability residual accepted by [`lump`].
pub const LUMP_TOLERANCE: f64 = 1e-12;

/// Default cap on the number of `k`-card states.
pub const DEFAULT_K_CARD_STATES: usize = 10_000;

/// Default histogram bin width.
pub const HISTOGRAM_WIDTH: f64 = 0.01;

/// Surjection from `0..source` onto `0..target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    target: usize,
    map: Vec<usize>,
}

impl Projection {
    pub fn new(target: usize, map: Vec<usize>) -> Result<Self> {
        let mut hit = vec![false; target];
        for &y in &map {
            if y >= target {
                return Err(Error::IndexOutOfRange {
                    index: y,
                    n: target,
                });
            }
            hit[y] = true;
        }
        if hit.iter().any(|h| !h) {
            return Err(Error::InvalidParameter(
                "projection is not surjective".into(),
            ));
        }
        Ok(Projection { target, map })
    }

    pub fn identity(n: usize) -> Self {
        Projection {
            target: n,
            map: (0..n).collect(),
        }
    }

    pub fn source(&self) -> usize {
        self.map.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.target];
        for &y in &self.map {
            sizes[y] += 1;
        }
        sizes
    }

    /// `φ̄ ∘ p`.
    pub fn lift(&self, phi: &[f64]) -> Vec<f64> {
        self.map.iter().map(|&y| phi[y]).collect()
    }
}

#[derive(Clone, Debug)]
pub struct LumpedChain {
    pub projection: Projection,
    pub kernel: Kernel,
    /// Push-forward of the uniform distribution.
    pub stationary: Vec<f64>,
    /// `max_x |Σ_{y ∈ ȳ} Q(x,y) − Q̄(p(x), ȳ)|`.
    pub residual: f64,
}

/// Lumps `kernel` through `projection`; fails when the row sums over fibers
/// depend on more than the fiber of the starting state.
pub fn lump(kernel: &Kernel, projection: &Projection) -> Result<LumpedChain> {
    let n = kernel.dim();
    if projection.source() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: projection.source(),
        });
    }
    let m = projection.target();
    let collapse = |x: usize| {
        let mut row = vec![0.0; m];
        for (y, &v) in kernel.row(x).iter().enumerate() {
            row[projection.apply(y)] += v;
        }
        row
    };
    let mut reps = vec![usize::MAX; m];
    for x in 0..n {
        let y = projection.apply(x);
        if reps[y] == usize::MAX {
            reps[y] = x;
        }
    }
    let data: Vec<f64> = reps.iter().flat_map(|&x| collapse(x)).collect();
    let residual = (0..n)
        .into_par_iter()
        .map(|x| {
            let row = collapse(x);
            let base = projection.apply(x) * m;
            row.iter()
                .zip(&data[base..base + m])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    if residual > LUMP_TOLERANCE {
        return Err(Error::NotLumpable { residual });
    }
    let stationary = projection
        .fiber_sizes()
        .iter()
        .map(|&s| s as f64 / n as f64)
        .collect();
    Ok(LumpedChain {
        projection: projection.clone(),
        kernel: Kernel::new(m, data)?,
        stationary,
        residual,
    })
}

/// Ordered `k`-tuples of distinct positions (0-based), lexicographic.
pub fn k_card_states(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for p in 0..n {
            if !prefix.contains(&p) {
                prefix.push(p);
                extend(n, k, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// `n!/(n−k)!`.
pub fn k_card_state_count(n: usize, k: usize) -> Option<usize> {
    (n + 1 - k.min(n)..=n).try_fold(1usize, |acc, x| acc.checked_mul(x))
}

/// Positions of `k` tracked cards.
#[derive(Clone, Debug)]
pub struct KCardChain {
    pub n: usize,
    pub k: usize,
    pub states: Vec<Vec<usize>>,
    pub kernel: Kernel,
}

struct StateIndex {
    n: usize,
    table: Vec<u32>,
}

impl StateIndex {
    fn new(n: usize, states: &[Vec<usize>]) -> Self {
        let k = states.first().map_or(0, Vec::len);
        let mut table = vec![u32::MAX; n.pow(k as u32)];
        for (i, s) in states.iter().enumerate() {
            table[Self::code(n, s)] = i as u32;
        }
        StateIndex { n, table }
    }

    fn code(n: usize, s: &[usize]) -> usize {
        s.iter().fold(0, |acc, &p| acc * n + p)
    }

    fn get(&self, s: &[usize]) -> usize {
        self.table[Self::code(self.n, s)] as usize
    }
}

/// The chain followed by `k` cards, built from the support of `mu`: state
/// `(p₁..p_k)` moves to `(g(p₁)..g(p_k))` with probability `mu(g)`.
pub fn k_card_kernel(
    mu: &GroupMeasure<SymmetricGroup>,
    k: usize,
    max_states: usize,
) -> Result<KCardChain> {
    let n = mu.group().degree();
    if !(1..=3).contains(&k) || k > n {
        return Err(Error::InvalidParameter(format!(
            "k must be 1, 2 or 3 and at most n, got k={k}, n={n}"
        )));
    }
    let count = k_card_state_count(n, k).unwrap_or(usize::MAX);
    if count > max_states {
        return Err(Error::GuardExceeded {
            what: "k-card states",
            size: count,
            limit: max_states,
        });
    }
    let states = k_card_states(n, k);
    let index = StateIndex::new(n, &states);
    let support: Vec<(&[usize], f64)> = mu.support().map(|(g, w)| (g.images(), w)).collect();
    let dim = states.len();
    let mut data = vec![0.0; dim * dim];
    data.par_chunks_mut(dim)
        .zip(states.par_iter())
        .for_each(|(row, s)| {
            let mut image = vec![0; k];
            for &(g, w) in &support {
                for (dst, &p) in image.iter_mut().zip(s) {
                    *dst = g[p];
                }
                row[index.get(&image)] += w;
            }
        });
    Ok(KCardChain {
        n,
        k,
        states,
        kernel: Kernel::new(dim, data)?,
    })
}

/// `x ↦ (x(1), …, x(k))` from `S_n` (lexicographic order) onto `k`-card
/// states.
pub fn k_card_projection(n: usize, k: usize, max_states: usize) -> Result<Projection> {
    let group = SymmetricGroup::new(n)?;
    let elements = group.elements(max_states)?;
    let states = k_card_states(n, k);
    let index = StateIndex::new(n, &states);
    let map = elements
        .iter()
        .map(|x| index.get(&x.images()[..k]))
        .collect();
    Projection::new(states.len(), map)
}

/// Parity: even permutations to 0, odd to 1.
pub fn sign_projection(n: usize, max_states: usize) -> Result<Projection> {
    let group = SymmetricGroup::new(n)?;
    let map = group
        .elements(max_states)?
        .iter()
        .map(|x| usize::from(x.sign() < 0))
        .collect();
    Projection::new(2, map)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub eigenpairs: usize,
    /// `max |Q(φ̄∘p) − β(φ̄∘p)|` over all lumped eigenpairs.
    pub max_residual: f64,
    pub passed: bool,
}

/// Lifts every eigenvector of the (symmetric) lumped kernel through the
/// projection and checks it against the full kernel.
pub fn lifted_eigencheck(
    lumped: &Kernel,
    projection: &Projection,
    full: &Kernel,
    tol: f64,
) -> Result<LiftReport> {
    if projection.target() != lumped.dim() || projection.source() != full.dim() {
        return Err(Error::SizeMismatch {
            left: projection.source(),
            right: full.dim(),
        });
    }
    let (values, vectors) = symmetric_eigen(lumped.data(), lumped.dim())?;
    let mut max_residual = 0.0f64;
    for (beta, phi) in values.iter().zip(&vectors) {
        let lifted = projection.lift(phi);
        let image = full.apply(&lifted);
        for (a, b) in image.iter().zip(&lifted) {
            max_residual = max_residual.max((a - beta * b).abs());
        }
    }
    Ok(LiftReport {
        eigenpairs: values.len(),
        max_residual,
        passed: max_residual <= tol,
    })
}

/// Whether every eigenvalue of `part` lies within `tol` of one of `whole`.
pub fn spectrum_contained(part: &SpectralReport, whole: &SpectralReport, tol: f64) -> bool {
    part.eigenvalues()
        .iter()
        .all(|b| whole.eigenvalues().iter().any(|a| (a - b).abs() <= tol))
}

/// `tv(full, t) ≥ tv(lumped, t) − 1e−12` at every shared time.
pub fn tv_projection_bound_check(full: &DistanceCurve, lumped: &DistanceCurve) -> Result<bool> {
    let (a, b) = (full.records(), lumped.records());
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.t != y.t) {
        return Err(Error::CurveMismatch("time grids differ".into()));
    }
    Ok(a.iter().zip(b).all(|(x, y)| x.tv >= y.tv - 1e-12))
}

/// Eigenvalue histogram with bins `[k·w, (k+1)·w)`, starting at `0` (or
/// lower when the spectrum goes negative) and ending with the bin that
/// contains `1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub width: f64,
    pub first_bin: i64,
    pub counts: Vec<usize>,
}

pub fn eigenvalue_histogram(spectrum: &SpectralReport, width: f64) -> Result<Histogram> {
    if !(width > 0.0 && width <= 1.0) {
        return Err(Error::InvalidParameter(format!("bin width {width}")));
    }
    // Nudge values sitting on a bin edge up to that edge despite rounding.
    let bin = |x: f64| (x / width + 1e-9).floor() as i64;
    let top = bin(1.0) - 1;
    let lowest = spectrum
        .eigenvalues()
        .iter()
        .map(|&x| bin(x))
        .min()
        .unwrap_or(0);
    let first_bin = lowest.min(0);
    let mut counts = vec![0usize; (top - first_bin + 1) as usize];
    for &x in spectrum.eigenvalues() {
        let b = bin(x).min(top);
        counts[(b - first_bin) as usize] += 1;
    }
    Ok(Histogram {
        width,
        first_bin,
        counts,
    })
}

impl Histogram {
    /// CSV with header `bin_left,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            let left = (self.first_bin + i as i64) as f64 * self.width;
            out.push_str(&format!("{},{c}\n", fmt17(left)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Permutation;
    use crate::markov::{distance_curve, kernel_distance_curve, kernel_from_measure};
    use crate::measure::{hnr_top_to_random, random_to_random_measure};
    use crate::single_card::build_k;
    use crate::spectral::{sign_representation_eigenvalue, symmetric_eigenvalues};

    #[test]
    fn projection_must_be_surjective() {
        assert!(Projection::new(3, vec![0, 1, 1]).is_err());
        assert!(Projection::new(2, vec![0, 2]).is_err());
        assert_eq!(
            Projection::new(2, vec![1, 0, 1]).unwrap().fiber_sizes(),
            vec![1, 2]
        );
    }

    #[test]
    fn identity_projection_is_a_no_op() {
        let k = kernel_from_measure(&hnr_top_to_random(3).unwrap(), 100).unwrap();
        let l = lump(&k, &Projection::identity(6)).unwrap();
        assert_eq!(l.kernel, k);
        assert_eq!(l.residual, 0.0);
    }

    #[test]
    fn one_card_lumping_is_k() {
        for n in 4..=5 {
            let m = hnr_top_to_random(n).unwrap();
            let full = kernel_from_measure(&m, 1000).unwrap();
            let l = lump(&full, &k_card_projection(n, 1, 1000).unwrap()).unwrap();
            assert!(l.kernel.max_abs_diff(&build_k(n).unwrap()) < 1e-13);
            assert!(l
                .stationary
                .iter()
                .all(|&p| (p - 1.0 / n as f64).abs() < 1e-15));
        }
    }

    #[test]
    fn k_card_kernel_reproduces_k() {
        for n in [2usize, 5, 17, 40] {
            let c = k_card_kernel(&hnr_top_to_random(n).unwrap(), 1, 10_000).unwrap();
            assert!(c.kernel.max_abs_diff(&build_k(n).unwrap()) < 1e-13);
        }
    }

    #[test]
    fn two_card_kernel_matches_lumping() {
        let m = hnr_top_to_random(5).unwrap();
        let direct = k_card_kernel(&m, 2, 1000).unwrap();
        let full = kernel_from_measure(&m, 1000).unwrap();
        let l = lump(&full, &k_card_projection(5, 2, 1000).unwrap()).unwrap();
        assert_eq!(direct.states.len(), 20);
        assert!(direct.kernel.max_abs_diff(&l.kernel) < 1e-14);
        assert!(l.stationary.iter().all(|&p| (p - 0.05).abs() < 1e-15));
    }

    #[test]
    fn three_card_rows_and_guard() {
        let m = hnr_top_to_random(10).unwrap();
        let c = k_card_kernel(&m, 3, 10_000).unwrap();
        assert_eq!(c.states.len(), 720);
        assert!(c.kernel.max_row_sum_error() < 1e-12);
        assert!(matches!(
            k_card_kernel(&m, 3, 500),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(k_card_kernel(&m, 4, 10_000).is_err());
    }

    #[test]
    fn non_lumpable_projection_is_rejected() {
        let k = Kernel::new(3, vec![0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5]).unwrap();
        let p = Projection::new(2, vec![0, 0, 1]).unwrap();
        assert!(matches!(lump(&k, &p), Err(Error::NotLumpable { .. })));
    }

    #[test]
    fn sign_lumping_s3() {
        let m = hnr_top_to_random(3).unwrap();
        let full = kernel_from_measure(&m, 100).unwrap();
        let l = lump(&full, &sign_projection(3, 100).unwrap()).unwrap();
        let r = symmetric_eigenvalues(&l.kernel).unwrap();
        assert!((r.top() - 1.0).abs() < 1e-14);
        assert!((r.eigenvalues()[1] - sign_representation_eigenvalue(&m)).abs() < 1e-14);
    }

    #[test]
    fn lifted_single_card_eigenvectors() {
        let m = hnr_top_to_random(4).unwrap();
        let full = kernel_from_measure(&m, 100).unwrap();
        let p = k_card_projection(4, 1, 100).unwrap();
        let k = build_k(4).unwrap();
        let r = lifted_eigencheck(&k, &p, &full, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
        for i in 0..4 {
            let psi = crate::single_card::eigenvector(4, i).unwrap();
            let lifted = p.lift(&psi);
            let image = full.apply(&lifted);
            let beta = crate::single_card::eigenvalue(4, i);
            for (a, b) in image.iter().zip(&lifted) {
                assert!((a - beta * b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_card_spectrum_inside_full_spectrum() {
        let m = hnr_top_to_random(4).unwrap();
        let full = kernel_from_measure(&m, 100).unwrap();
        let two = k_card_kernel(&m, 2, 100).unwrap();
        let r = lifted_eigencheck(
            &two.kernel,
            &k_card_projection(4, 2, 100).unwrap(),
            &full,
            1e-9,
        )
        .unwrap();
        assert!(r.passed);
        assert!(spectrum_contained(
            &symmetric_eigenvalues(&two.kernel).unwrap(),
            &symmetric_eigenvalues(&full).unwrap(),
            1e-8
        ));
    }

    #[test]
    fn projection_decreases_tv() {
        let m = hnr_top_to_random(4).unwrap();
        let full = distance_curve(&m, 60, &Permutation::identity(4), 100).unwrap();
        let lumped = kernel_distance_curve(&build_k(4).unwrap(), 0, 60).unwrap();
        assert!(tv_projection_bound_check(&full, &lumped).unwrap());
        assert!((full.records()[0].tv - (1.0 - 1.0 / 24.0)).abs() < 1e-15);
        assert!((lumped.records()[0].tv - 0.75).abs() < 1e-15);
        let short = kernel_distance_curve(&build_k(4).unwrap(), 0, 10).unwrap();
        assert!(tv_projection_bound_check(&full, &short).is_err());
    }

    #[test]
    fn two_card_dominates_one_card() {
        let m = hnr_top_to_random(5).unwrap();
        let two = k_card_kernel(&m, 2, 1000).unwrap();
        let one = k_card_kernel(&m, 1, 1000).unwrap();
        let start = two.states.iter().position(|s| s == &vec![0, 1]).unwrap();
        let a = kernel_distance_curve(&two.kernel, start, 40).unwrap();
        let b = kernel_distance_curve(&one.kernel, 0, 40).unwrap();
        assert!(tv_projection_bound_check(&a, &b).unwrap());
    }

    #[test]
    fn histogram_bins() {
        let s = SpectralReport::from_values(vec![1.0, 0.5, 0.5, 0.0, 0.005, 0.07]);
        let h = eigenvalue_histogram(&s, 0.01).unwrap();
        assert_eq!(h.counts.len(), 100);
        assert_eq!(h.counts[0], 2);
        assert_eq!(h.counts[7], 1);
        assert_eq!(h.counts[50], 2);
        assert_eq!(h.counts[99], 1);
        assert_eq!(h.counts.iter().sum::<usize>(), 6);
        let csv = h.to_csv();
        assert!(csv.starts_with("bin_left,count\n0.0000000000000000e0,2\n"));
        let neg =
            eigenvalue_histogram(&SpectralReport::from_values(vec![1.0, -0.015]), 0.01).unwrap();
        assert_eq!(neg.first_bin, -2);
    }

    #[test]
    fn random_to_random_lumps_too() {
        let m = random_to_random_measure(4).unwrap();
        let full = kernel_from_measure(&m, 100).unwrap();
        assert!(lump(&full, &k_card_projection(4, 2, 100).unwrap()).is_ok());
    }
}
