//! The auxiliary space `G × {1..k}` and the factorization `Q = P* R P`.
//!
//! `P` copies a function on `G` into every layer, `R` averages each layer
//! over the orbits of the corresponding generator, and `P*` averages the
//! layers back down. Since `R` is an orthogonal projection,
//! `⟨Qf, f⟩ = ‖RPf‖²_aux ≥ 0`.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GeneratingTuple, GroupDescriptor};
use crate::markov::{kernel_from_measure, ConvolutionOperator};
use crate::measure::hit_and_run_measure;
use crate::numeric::{uniform_inner, KahanSum};
use crate::spectral::{symmetric_eigenvalues, MULTIPLICITY_TOLERANCE};

/// The auxiliary operators are stored explicitly only up to this dimension.
pub const MATERIALIZE_LIMIT: usize = 200_000;

/// Compressed sparse rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from per-row `(column, value)` lists; repeated columns are summed.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        let n_rows = rows.len();
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                debug_assert!(c < cols);
                if indices.len() > *indptr.last().unwrap() && *indices.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        SparseMatrix {
            rows: n_rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (idx, val) = self.row(r);
        idx.binary_search(&c).map(|k| val[k]).unwrap_or(0.0)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .into_par_iter()
            .map(|r| {
                let (idx, val) = self.row(r);
                idx.iter().zip(val).map(|(&c, v)| v * x[c]).sum()
            })
            .collect()
    }

    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::SizeMismatch {
                left: self.cols,
                right: other.rows,
            });
        }
        let rows = (0..self.rows)
            .into_par_iter()
            .map(|r| {
                let (idx, val) = self.row(r);
                let mut acc: Vec<(usize, f64)> = Vec::new();
                for (&k, &a) in idx.iter().zip(val) {
                    let (idx2, val2) = other.row(k);
                    acc.extend(idx2.iter().zip(val2).map(|(&c, &b)| (c, a * b)));
                }
                acc
            })
            .collect();
        Ok(SparseMatrix::from_rows(other.cols, rows))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.cols];
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                rows[c].push((r, v));
            }
        }
        SparseMatrix::from_rows(self.rows, rows)
    }

    /// Largest entrywise difference, treating missing entries as zero.
    pub fn max_abs_diff(&self, other: &SparseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        (0..self.rows)
            .map(|r| {
                let cols: BTreeSet<usize> = self
                    .row(r)
                    .0
                    .iter()
                    .chain(other.row(r).0)
                    .copied()
                    .collect();
                cols.into_iter()
                    .map(|c| (self.get(r, c) - other.get(r, c)).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.max_abs_diff(&self.transpose())
    }

    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.rows)
            .map(|r| {
                let s: KahanSum = self.row(r).1.iter().copied().collect();
                (s.value() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Orbit table and the auxiliary operators for one generating tuple.
#[derive(Clone, Debug)]
pub struct AuxiliaryFactorization<G: FiniteGroup> {
    tuple: GeneratingTuple<G>,
    size: usize,
    orders: Vec<usize>,
    // orbits[i][x * m_i + j] = index of x · s_i^j
    orbits: Vec<Vec<u32>>,
    operators: Option<Operators>,
}

#[derive(Clone, Debug)]
struct Operators {
    p: SparseMatrix,
    p_star: SparseMatrix,
    r: SparseMatrix,
}

pub fn build_factorization<G: FiniteGroup>(
    tuple: &GeneratingTuple<G>,
    limit: usize,
) -> Result<AuxiliaryFactorization<G>> {
    let group = tuple.group();
    let elements = group.elements(limit)?;
    let size = elements.len();
    let mut orders = Vec::new();
    let mut orbits = Vec::new();
    for s in tuple.elements() {
        let m = group.order_of(s);
        let powers: Vec<G::Element> = (0..m).map(|j| group.power(s, j)).collect();
        let table = elements
            .par_iter()
            .flat_map_iter(|x| {
                powers
                    .iter()
                    .map(move |p| group.index_of(&group.multiply(x, p)) as u32)
            })
            .collect();
        orders.push(m);
        orbits.push(table);
    }
    let mut fact = AuxiliaryFactorization {
        tuple: tuple.clone(),
        size,
        orders,
        orbits,
        operators: None,
    };
    if fact.aux_dim() <= MATERIALIZE_LIMIT {
        fact.operators = Some(fact.materialize());
    }
    Ok(fact)
}

impl<G: FiniteGroup> AuxiliaryFactorization<G> {
    pub fn k(&self) -> usize {
        self.orders.len()
    }

    pub fn group_size(&self) -> usize {
        self.size
    }

    pub fn aux_dim(&self) -> usize {
        self.size * self.k()
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn tuple(&self) -> &GeneratingTuple<G> {
        &self.tuple
    }

    /// Position of `(x, i)` in the auxiliary space (`i` is 0-based).
    pub fn aux_index(&self, x: usize, i: usize) -> usize {
        i * self.size + x
    }

    /// `Z(x, i)` as group indices.
    pub fn orbit(&self, x: usize, i: usize) -> &[u32] {
        let m = self.orders[i];
        &self.orbits[i][x * m..(x + 1) * m]
    }

    pub fn is_materialized(&self) -> bool {
        self.operators.is_some()
    }

    pub fn p(&self) -> Option<&SparseMatrix> {
        self.operators.as_ref().map(|o| &o.p)
    }

    pub fn p_star(&self) -> Option<&SparseMatrix> {
        self.operators.as_ref().map(|o| &o.p_star)
    }

    pub fn r(&self) -> Option<&SparseMatrix> {
        self.operators.as_ref().map(|o| &o.r)
    }

    fn materialize(&self) -> Operators {
        let (n, k) = (self.size, self.k());
        let p = SparseMatrix::from_rows(
            n,
            (0..k)
                .flat_map(|_| (0..n).map(|x| vec![(x, 1.0)]))
                .collect(),
        );
        let p_star = SparseMatrix::from_rows(
            n * k,
            (0..n)
                .map(|x| {
                    (0..k)
                        .map(|i| (self.aux_index(x, i), 1.0 / k as f64))
                        .collect()
                })
                .collect(),
        );
        let r = SparseMatrix::from_rows(
            n * k,
            (0..k)
                .flat_map(|i| {
                    let w = 1.0 / self.orders[i] as f64;
                    (0..n).map(move |x| {
                        self.orbit(x, i)
                            .iter()
                            .map(|&y| (self.aux_index(y as usize, i), w))
                            .collect()
                    })
                })
                .collect(),
        );
        Operators { p, p_star, r }
    }

    /// `(Pf)(x,i) = f(x)`.
    pub fn apply_p(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.size);
        (0..self.k()).flat_map(|_| f.iter().copied()).collect()
    }

    /// `(P*g)(x) = (1/k) Σ_i g(x,i)`.
    pub fn apply_p_star(&self, g: &[f64]) -> Vec<f64> {
        assert_eq!(g.len(), self.aux_dim());
        let k = self.k() as f64;
        (0..self.size)
            .map(|x| (0..self.k()).map(|i| g[self.aux_index(x, i)]).sum::<f64>() / k)
            .collect()
    }

    /// Averages layer `i` of `g` over the orbits of `s_i`.
    pub fn apply_r(&self, g: &[f64]) -> Vec<f64> {
        assert_eq!(g.len(), self.aux_dim());
        let mut out = vec![0.0; self.aux_dim()];
        for i in 0..self.k() {
            let m = self.orders[i] as f64;
            for x in 0..self.size {
                let s: f64 = self
                    .orbit(x, i)
                    .iter()
                    .map(|&y| g[self.aux_index(y as usize, i)])
                    .sum();
                out[self.aux_index(x, i)] = s / m;
            }
        }
        out
    }

    /// Uniform inner product on `G × {1..k}`.
    pub fn aux_inner(&self, g: &[f64], h: &[f64]) -> f64 {
        uniform_inner(g, h)
    }

    /// Checks that the orbits partition every layer into blocks of size
    /// `m_i`. This is the combinatorial content of `R = Rᵀ = R²` with
    /// entries exactly `1/m_i`.
    pub fn orbits_partition_exactly(&self) -> bool {
        (0..self.k()).all(|i| {
            (0..self.size).all(|x| {
                let orbit: BTreeSet<u32> = self.orbit(x, i).iter().copied().collect();
                orbit.len() == self.orders[i]
                    && orbit.contains(&(x as u32))
                    && orbit
                        .iter()
                        .all(|&y| self.orbit(y as usize, i).iter().all(|z| orbit.contains(z)))
            })
        })
    }

    /// `max |R² − R|` over entries, if the operators are materialized.
    pub fn idempotence_error(&self) -> Option<f64> {
        let r = self.r()?;
        Some(r.matmul(r).ok()?.max_abs_diff(r))
    }

    pub fn symmetry_error(&self) -> Option<f64> {
        self.r().map(SparseMatrix::max_asymmetry)
    }

    /// Row `x` of `P*RP` as `(y, value)` pairs.
    fn composite_row(&self, x: usize) -> Vec<(usize, f64)> {
        let k = self.k() as f64;
        let mut out = Vec::new();
        for i in 0..self.k() {
            let w = 1.0 / (k * self.orders[i] as f64);
            out.extend(self.orbit(x, i).iter().map(|&y| (y as usize, w)));
        }
        out
    }

    /// `P*RP` as a sparse `|G| × |G|` matrix. Uses the materialized
    /// operators when available and the orbit sums otherwise.
    pub fn composite(&self) -> Result<SparseMatrix> {
        match &self.operators {
            Some(ops) => ops.p_star.matmul(&ops.r)?.matmul(&ops.p),
            None => Ok(SparseMatrix::from_rows(
                self.size,
                (0..self.size).map(|x| self.composite_row(x)).collect(),
            )),
        }
    }

    /// `max_{x,y} |(P*RP)(x,y) − q_S(x⁻¹y)|`.
    pub fn factorization_error(&self) -> Result<f64> {
        let q = hit_and_run_measure(&self.tuple)?;
        let op = ConvolutionOperator::new(&q, self.size)?;
        let tables: Vec<(f64, &[u32])> = op.tables().collect();
        let composite = self.composite()?;
        let n = self.size;
        let err = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut row = vec![0.0; n];
                for (w, t) in &tables {
                    row[t[x] as usize] += w;
                }
                let (idx, val) = composite.row(x);
                for (&y, &v) in idx.iter().zip(val) {
                    row[y] -= v;
                }
                row.iter().map(|d| d.abs()).fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        Ok(err)
    }
}

/// Builds the factorization for `tuple` and returns its entrywise error.
pub fn verify_factorization<G: FiniteGroup>(
    tuple: &GeneratingTuple<G>,
    limit: usize,
) -> Result<f64> {
    build_factorization(tuple, limit)?.factorization_error()
}

/// Non-negativity evidence for a hit-and-run operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub group: GroupDescriptor,
    pub k: usize,
    pub states: usize,
    pub min_eig: f64,
    pub gap: f64,
    /// Eigenvalues within the multiplicity tolerance of `1 − 1/n` (symmetric
    /// groups only).
    #[serde(rename = "mult_of(1-1/n)")]
    pub mult_of_one_minus_inv_n: Option<usize>,
    pub factorization_error: f64,
    pub trials: usize,
    /// Smallest `⟨Qf,f⟩` over the random batch.
    pub min_quadratic_form: f64,
    /// Largest `|⟨Qf,f⟩ − ‖RPf‖²_aux|` over the batch.
    pub max_quadratic_mismatch: f64,
    pub passed: bool,
}

/// Eigensolve of `Q` plus the quadratic-form identity on `trials` seeded
/// standard-normal test functions.
pub fn positivity_certificate<G: FiniteGroup>(
    tuple: &GeneratingTuple<G>,
    trials: usize,
    seed: u64,
    limit: usize,
) -> Result<PositivityCertificate> {
    let q = hit_and_run_measure(tuple)?;
    let kernel = kernel_from_measure(&q, limit)?;
    let spectrum = symmetric_eigenvalues(&kernel)?;
    let fact = build_factorization(tuple, limit)?;
    let factorization_error = fact.factorization_error()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_quadratic_form = f64::INFINITY;
    let mut max_quadratic_mismatch = 0.0f64;
    for _ in 0..trials {
        let f: Vec<f64> = (0..fact.group_size())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let qf = kernel.apply(&f);
        let form = uniform_inner(&qf, &f);
        let rpf = fact.apply_r(&fact.apply_p(&f));
        let norm = fact.aux_inner(&rpf, &rpf);
        min_quadratic_form = min_quadratic_form.min(form);
        max_quadratic_mismatch = max_quadratic_mismatch.max((form - norm).abs());
    }
    if trials == 0 {
        min_quadratic_form = 0.0;
    }

    let descriptor = tuple.group().descriptor();
    let mult = match descriptor {
        GroupDescriptor::Symmetric { n } => {
            Some(spectrum.count_near(1.0 - 1.0 / n as f64, MULTIPLICITY_TOLERANCE))
        }
        GroupDescriptor::CyclicPower { .. } => None,
    };
    let min_eig = spectrum.min();
    let passed = min_eig >= -1e-10
        && min_quadratic_form >= -1e-12
        && max_quadratic_mismatch <= 1e-10
        && factorization_error <= 1e-12;
    Ok(PositivityCertificate {
        group: descriptor,
        k: fact.k(),
        states: fact.group_size(),
        min_eig,
        gap: spectrum.gap(),
        mult_of_one_minus_inv_n: mult,
        factorization_error,
        trials,
        min_quadratic_form,
        max_quadratic_mismatch,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{
        random_transposition_tuple, top_to_random_tuple, CyclicPower, CyclicVector, SymmetricGroup,
    };
    use crate::markov::DEFAULT_MAX_STATES;

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn r_is_an_orthogonal_projection_s3() {
        let f = build_factorization(&top_to_random_tuple(3).unwrap(), 100).unwrap();
        assert!(f.is_materialized());
        assert!(f.orbits_partition_exactly());
        assert!(f.idempotence_error().unwrap() <= 1e-12);
        assert!(f.symmetry_error().unwrap() <= 1e-13);
        assert!(f.r().unwrap().max_row_sum_error() < 1e-14);
    }

    #[test]
    fn p_star_p_is_identity() {
        let f = build_factorization(&top_to_random_tuple(4).unwrap(), 100).unwrap();
        let id = f.p_star().unwrap().matmul(f.p().unwrap()).unwrap();
        let expected = SparseMatrix::from_rows(24, (0..24).map(|x| vec![(x, 1.0)]).collect());
        assert!(id.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn adjointness() {
        let f = build_factorization(&top_to_random_tuple(3).unwrap(), 100).unwrap();
        for seed in 0..10 {
            let x = normals(6, seed);
            let g = normals(18, seed + 100);
            let lhs = uniform_inner(&f.apply_p_star(&g), &x);
            let rhs = f.aux_inner(&g, &f.apply_p(&x));
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn operator_application_matches_matrices() {
        let f = build_factorization(&top_to_random_tuple(4).unwrap(), 100).unwrap();
        let g = normals(f.aux_dim(), 5);
        let a = f.apply_r(&g);
        let b = f.r().unwrap().mul_vec(&g);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn composite_matches_q() {
        for n in 3..=4 {
            let err = verify_factorization(&top_to_random_tuple(n).unwrap(), 100).unwrap();
            assert!(err <= 1e-13, "n={n}: {err}");
        }
    }

    #[test]
    fn orbit_sum_path_agrees_with_materialized() {
        let mut f = build_factorization(&top_to_random_tuple(4).unwrap(), 100).unwrap();
        let a = f.composite().unwrap();
        f.operators = None;
        let b = f.composite().unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
        assert!(f.factorization_error().unwrap() < 1e-13);
    }

    #[test]
    fn single_generator_gives_subgroup_average() {
        let g = SymmetricGroup::new(4).unwrap();
        let s = crate::group::top_to_random_generator(4, 4).unwrap();
        let tuple = GeneratingTuple::new(g, vec![s]).unwrap();
        let f = build_factorization(&tuple, 100).unwrap();
        assert_eq!(f.orders(), &[4]);
        assert!(f.factorization_error().unwrap() < 1e-15);
    }

    #[test]
    fn certificates() {
        let c = positivity_certificate(&top_to_random_tuple(4).unwrap(), 20, 0, DEFAULT_MAX_STATES)
            .unwrap();
        assert!(c.passed, "{c:?}");
        assert!(c.mult_of_one_minus_inv_n.unwrap() >= 3);
        let json = serde_json::to_value(&c).unwrap();
        assert!(json.get("mult_of(1-1/n)").is_some());
        assert!(json.get("min_eig").is_some());

        let c =
            positivity_certificate(&random_transposition_tuple(4).unwrap(), 20, 0, 100).unwrap();
        assert!(c.passed);

        let z6 = CyclicPower::new(6, 1).unwrap();
        let tuple =
            GeneratingTuple::new(z6, vec![CyclicVector::unit(6, 1, 1, false).unwrap()]).unwrap();
        let c = positivity_certificate(&tuple, 5, 0, 100).unwrap();
        assert!(c.passed);
        assert!(c.min_eig.abs() < 1e-14);
        assert_eq!(c.mult_of_one_minus_inv_n, None);
    }

    #[test]
    fn sparse_matrix_basics() {
        let a = SparseMatrix::from_rows(3, vec![vec![(2, 1.0), (0, 2.0), (2, 1.0)], vec![]]);
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 2), 2.0);
        assert_eq!(a.get(1, 1), 0.0);
        let t = a.transpose();
        assert_eq!((t.rows(), t.cols()), (3, 2));
        assert_eq!(t.get(2, 0), 2.0);
        assert!(a.matmul(&a).is_err());
    }
}
