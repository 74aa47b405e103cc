//! Markov kernels driven by group measures, exact evolution of distributions,
//! and distances to the uniform distribution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::measure::GroupMeasure;
use crate::numeric::{fmt17, KahanSum};

/// Default cap on the number of states a dense kernel may have.
pub const DEFAULT_MAX_STATES: usize = 10_000;

/// Row sums must be within this of 1.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-10;

/// Dense row-stochastic matrix over an enumerated state space.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    dim: usize,
    data: Vec<f64>,
}

impl Kernel {
    /// Row-major `dim × dim` entries; rejects negative entries and rows that
    /// do not sum to 1.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::SizeMismatch {
                left: dim * dim,
                right: data.len(),
            });
        }
        if let Some(&x) = data.iter().find(|&&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("kernel entry {x}")));
        }
        let k = Kernel { dim, data };
        for row in 0..dim {
            let sum: KahanSum = k.row(row).iter().copied().collect();
            if (sum.value() - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(Error::NotStochastic {
                    row,
                    sum: sum.value(),
                });
            }
        }
        Ok(k)
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Kernel { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.dim + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.dim..(x + 1) * self.dim]
    }

    /// Row-major entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.dim)
            .map(|x| {
                let s: KahanSum = self.row(x).iter().copied().collect();
                (s.value() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for x in 0..self.dim {
            for y in x + 1..self.dim {
                worst = worst.max((self.get(x, y) - self.get(y, x)).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol
    }

    /// `(Mf)(x) = Σ_y M(x,y) f(y)`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.dim);
        (0..self.dim)
            .into_par_iter()
            .map(|x| self.row(x).iter().zip(f).map(|(m, v)| m * v).sum())
            .collect()
    }

    /// `(νM)(y) = Σ_x ν(x) M(x,y)`.
    pub fn evolve(&self, nu: &[f64]) -> Vec<f64> {
        assert_eq!(nu.len(), self.dim);
        let mut out = vec![0.0; self.dim];
        for (x, &w) in nu.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, m) in out.iter_mut().zip(self.row(x)) {
                *o += w * m;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Kernel) -> Kernel {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut data = vec![0.0; n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(x, out)| {
            for (k, &a) in self.row(x).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        });
        Kernel { dim: n, data }
    }

    /// `M^t` by repeated squaring.
    pub fn power(&self, mut t: u32) -> Kernel {
        let mut acc = Kernel::identity(self.dim);
        let mut base = self.clone();
        while t > 0 {
            if t & 1 == 1 {
                acc = acc.matmul(&base);
            }
            t >>= 1;
            if t > 0 {
                base = base.matmul(&base);
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Kernel) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Right-multiplication tables for the support of a measure: the sparse
/// form of `M(x,y) = μ(x⁻¹y)`.
#[derive(Clone, Debug)]
pub struct ConvolutionOperator {
    size: usize,
    weights: Vec<f64>,
    // targets[s][x] = index of x·g_s
    targets: Vec<Vec<u32>>,
}

impl ConvolutionOperator {
    pub fn new<G: FiniteGroup>(mu: &GroupMeasure<G>, limit: usize) -> Result<Self> {
        let group = mu.group();
        let elements = group.elements(limit)?;
        let size = elements.len();
        let (weights, targets) = mu
            .support()
            .map(|(g, w)| {
                let table = elements
                    .par_iter()
                    .map(|x| group.index_of(&group.multiply(x, g)) as u32)
                    .collect();
                (w, table)
            })
            .unzip();
        Ok(ConvolutionOperator {
            size,
            weights,
            targets,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `ν ∗ μ` for a dense `ν`.
    pub fn step(&self, nu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        for (w, table) in self.weights.iter().zip(&self.targets) {
            for (x, &v) in nu.iter().enumerate() {
                out[table[x] as usize] += v * w;
            }
        }
        out
    }

    /// `(Mf)(x) = Σ_g μ(g) f(x·g)`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        for (w, table) in self.weights.iter().zip(&self.targets) {
            for (o, &y) in out.iter_mut().zip(table) {
                *o += w * f[y as usize];
            }
        }
        out
    }

    pub(crate) fn tables(&self) -> impl Iterator<Item = (f64, &[u32])> {
        self.weights
            .iter()
            .zip(&self.targets)
            .map(|(&w, t)| (w, t.as_slice()))
    }
}

/// Dense kernel `M(x,y) = μ(x⁻¹y)`, with at most `max_states` rows.
pub fn kernel_from_measure<G: FiniteGroup>(
    mu: &GroupMeasure<G>,
    max_states: usize,
) -> Result<Kernel> {
    let op = ConvolutionOperator::new(mu, max_states)?;
    let n = op.size();
    let mut data = vec![0.0; n * n];
    for (w, table) in op.tables() {
        for (x, &y) in table.iter().enumerate() {
            data[x * n + y as usize] += w;
        }
    }
    Kernel::new(n, data)
}

/// The three distances to the uniform distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distances {
    pub tv: f64,
    pub d2: f64,
    pub dinf: f64,
}

/// `½ Σ |ν(g) − 1/N|`.
pub fn tv_distance(nu: &[f64]) -> f64 {
    let u = 1.0 / nu.len() as f64;
    let s: KahanSum = nu.iter().map(|&p| (p - u).abs()).collect();
    0.5 * s.value()
}

/// `sqrt(N Σ (ν(g) − 1/N)²)`.
pub fn d2_distance(nu: &[f64]) -> f64 {
    let n = nu.len() as f64;
    let s: KahanSum = nu.iter().map(|&p| (p - 1.0 / n).powi(2)).collect();
    (n * s.value()).sqrt()
}

/// `max |N ν(g) − 1|`.
pub fn dinf_distance(nu: &[f64]) -> f64 {
    let n = nu.len() as f64;
    nu.iter().map(|&p| (n * p - 1.0).abs()).fold(0.0, f64::max)
}

pub fn distances(nu: &[f64]) -> Distances {
    Distances {
        tv: tv_distance(nu),
        d2: d2_distance(nu),
        dinf: dinf_distance(nu),
    }
}

/// Distances of a sparse measure, using `|G|` without enumerating the group.
pub fn measure_distances<G: FiniteGroup>(mu: &GroupMeasure<G>) -> Result<Distances> {
    let size = mu.group().size().ok_or(Error::GuardExceeded {
        what: "group size",
        size: usize::MAX,
        limit: usize::MAX,
    })?;
    let n = size as f64;
    let u = 1.0 / n;
    let missing = (size - mu.support_len()) as f64;
    let mut tv: KahanSum = mu.support().map(|(_, p)| (p - u).abs()).collect();
    tv.add(missing * u);
    let mut sq: KahanSum = mu.support().map(|(_, p)| (p - u).powi(2)).collect();
    sq.add(missing * u * u);
    let mut dinf = mu
        .support()
        .map(|(_, p)| (n * p - 1.0).abs())
        .fold(0.0, f64::max);
    if missing > 0.0 {
        dinf = dinf.max(1.0);
    }
    Ok(Distances {
        tv: 0.5 * tv.value(),
        d2: (n * sq.value()).sqrt(),
        dinf,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceRecord {
    pub t: usize,
    pub tv: f64,
    pub d2: f64,
    pub dinf: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Tv,
    D2,
    Dinf,
}

/// Threshold levels reported for every curve (the third is `1/e`).
pub const CROSSING_LEVELS: [f64; 4] = [0.5, 0.25, 0.367_879_441_171_442_3, 0.01];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub metric: Metric,
    pub level: f64,
    /// First `t` with distance `<= level`, if reached within the curve.
    pub t: Option<usize>,
}

/// Time-indexed distances from one start state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceCurve {
    pub label: String,
    pub n: usize,
    pub start: String,
    records: Vec<DistanceRecord>,
}

impl DistanceCurve {
    pub fn new(label: impl Into<String>, n: usize, start: impl Into<String>) -> Self {
        DistanceCurve {
            label: label.into(),
            n,
            start: start.into(),
            records: Vec::new(),
        }
    }

    /// Appends a record; `t` must increase strictly.
    pub fn push(&mut self, t: usize, d: Distances) -> Result<()> {
        if let Some(last) = self.records.last() {
            if t <= last.t {
                return Err(Error::CurveMismatch(format!(
                    "t={t} does not follow t={}",
                    last.t
                )));
            }
        }
        self.records.push(DistanceRecord {
            t,
            tv: d.tv,
            d2: d.d2,
            dinf: d.dinf,
        });
        Ok(())
    }

    pub fn records(&self) -> &[DistanceRecord] {
        &self.records
    }

    pub fn value(&self, metric: Metric, index: usize) -> f64 {
        let r = &self.records[index];
        match metric {
            Metric::Tv => r.tv,
            Metric::D2 => r.d2,
            Metric::Dinf => r.dinf,
        }
    }

    pub fn first_below(&self, metric: Metric, level: f64) -> Option<usize> {
        (0..self.records.len())
            .find(|&i| self.value(metric, i) <= level)
            .map(|i| self.records[i].t)
    }

    /// Crossing times of TV and d₂ at [`CROSSING_LEVELS`].
    pub fn crossings(&self) -> Vec<Crossing> {
        [Metric::Tv, Metric::D2]
            .into_iter()
            .flat_map(|metric| {
                CROSSING_LEVELS.iter().map(move |&level| Crossing {
                    metric,
                    level,
                    t: self.first_below(metric, level),
                })
            })
            .collect()
    }

    /// CSV with header `t,tv,d2,dinf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,tv,d2,dinf\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.t,
                fmt17(r.tv),
                fmt17(r.d2),
                fmt17(r.dinf)
            ));
        }
        out
    }
}

/// Evolves `ν_{t+1} = ν_t ∗ μ` from `δ_start` and records distances for
/// `t = 0..=t_max`.
pub fn distance_curve<G: FiniteGroup>(
    mu: &GroupMeasure<G>,
    t_max: usize,
    start: &G::Element,
    max_states: usize,
) -> Result<DistanceCurve> {
    let group = mu.group();
    if !group.contains(start) {
        return Err(Error::GroupMismatch);
    }
    let op = ConvolutionOperator::new(mu, max_states)?;
    let mut nu = vec![0.0; op.size()];
    nu[group.index_of(start)] = 1.0;
    let degree = match group.descriptor() {
        crate::group::GroupDescriptor::Symmetric { n } => n,
        crate::group::GroupDescriptor::CyclicPower { modulus, .. } => modulus,
    };
    let mut curve = DistanceCurve::new("measure", degree, format!("{start:?}"));
    for t in 0..=t_max {
        if t > 0 {
            nu = op.step(&nu);
        }
        curve.push(t, distances(&nu))?;
    }
    Ok(curve)
}

/// Distances of `K^t(start, ·)` to the uniform distribution on the kernel's
/// state space, `t = 0..=t_max`.
pub fn kernel_distance_curve(kernel: &Kernel, start: usize, t_max: usize) -> Result<DistanceCurve> {
    if start >= kernel.dim() {
        return Err(Error::IndexOutOfRange {
            index: start,
            n: kernel.dim(),
        });
    }
    let mut nu = vec![0.0; kernel.dim()];
    nu[start] = 1.0;
    let mut curve = DistanceCurve::new("kernel", kernel.dim(), start.to_string());
    for t in 0..=t_max {
        if t > 0 {
            nu = kernel.evolve(&nu);
        }
        curve.push(t, distances(&nu))?;
    }
    Ok(curve)
}

/// `E_ν(f,g) = (1/2|G|) Σ_{x,y} (f(xy)−f(x))(g(xy)−g(x)) ν(y)` for symmetric `ν`.
pub fn dirichlet_form<G: FiniteGroup>(
    nu: &GroupMeasure<G>,
    f: &[f64],
    g: &[f64],
    max_states: usize,
) -> Result<f64> {
    if !nu.is_symmetric() {
        return Err(Error::NotSymmetric {
            max_asymmetry: nu.max_asymmetry(),
        });
    }
    let op = ConvolutionOperator::new(nu, max_states)?;
    dirichlet_form_with(&op, f, g)
}

/// [`dirichlet_form`] with prebuilt multiplication tables.
pub fn dirichlet_form_with(op: &ConvolutionOperator, f: &[f64], g: &[f64]) -> Result<f64> {
    let n = op.size();
    if f.len() != n || g.len() != n {
        return Err(Error::SizeMismatch {
            left: n,
            right: f.len().min(g.len()),
        });
    }
    let mut acc = KahanSum::new();
    for (w, table) in op.tables() {
        for (x, &xy) in table.iter().enumerate() {
            let xy = xy as usize;
            acc.add((f[xy] - f[x]) * (g[xy] - g[x]) * w);
        }
    }
    Ok(acc.value() / (2.0 * n as f64))
}
