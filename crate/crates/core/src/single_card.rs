//! The position of one card under hit-and-run top-to-random.
//!
//! Positions are 1-based throughout this module. The chain has
//! `K(i,j) = H(max(i,j))/n`, plus `(i−1)/n` on the diagonal, where
//! `H(j) = Σ_{k=j}^{n} 1/k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::{DistanceCurve, Distances, Kernel};
use crate::numeric::{fmt17, KahanSum};

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "single card needs n >= 2, got {n}"
        )));
    }
    Ok(())
}

fn check_pos(n: usize, i: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    Ok(())
}

/// Exact entries, row-major.
pub fn build_k_exact(n: usize) -> Result<Vec<BigRational>> {
    check_n(n)?;
    // tail[j] = H(j) / n for j = 1..=n
    let mut tail = vec![BigRational::zero(); n + 2];
    for j in (1..=n).rev() {
        tail[j] = &tail[j + 1] + rat(1, (n * j) as i64);
    }
    let mut out = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            let mut v = tail[i.max(j)].clone();
            if i == j {
                v += rat(i as i64 - 1, n as i64);
            }
            out.push(v);
        }
    }
    Ok(out)
}

pub fn build_k(n: usize) -> Result<Kernel> {
    check_n(n)?;
    let mut tail = vec![0.0; n + 2];
    for j in (1..=n).rev() {
        tail[j] = tail[j + 1] + 1.0 / (n * j) as f64;
    }
    let mut data = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            let diag = if i == j {
                (i - 1) as f64 / n as f64
            } else {
                0.0
            };
            data.push(tail[i.max(j)] + diag);
        }
    }
    Kernel::new(n, data)
}

/// `β_i = 1 − i/n`.
pub fn eigenvalue(n: usize, i: usize) -> f64 {
    1.0 - i as f64 / n as f64
}

pub fn eigenvalue_exact(n: usize, i: usize) -> BigRational {
    rat((n - i) as i64, n as i64)
}

/// `Ψ₀ = 1`; for `i ≥ 1`, `−1/(n−i)` in the first `n−i` slots, `1` in slot
/// `n−i+1`, zeros after.
pub fn eigenvector_exact(n: usize, i: usize) -> Result<Vec<BigRational>> {
    check_n(n)?;
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n: n - 1 });
    }
    if i == 0 {
        return Ok(vec![BigRational::one(); n]);
    }
    let m = n - i;
    Ok((1..=n)
        .map(|p| match p.cmp(&(m + 1)) {
            std::cmp::Ordering::Less => rat(-1, m as i64),
            std::cmp::Ordering::Equal => BigRational::one(),
            std::cmp::Ordering::Greater => BigRational::zero(),
        })
        .collect())
}

pub fn eigenvector(n: usize, i: usize) -> Result<Vec<f64>> {
    Ok(eigenvector_exact(n, i)?
        .iter()
        .map(|x| x.to_f64().unwrap())
        .collect())
}

/// `‖Ψ_i‖² = (n−i+1)/(n(n−i))` under `(1/n)Σ`, and `1` for `i = 0`.
pub fn eigenvector_norm_sq(n: usize, i: usize) -> f64 {
    if i == 0 {
        1.0
    } else {
        (n - i + 1) as f64 / (n * (n - i)) as f64
    }
}

/// All `n` eigenpairs, `β` descending.
pub fn k_eigenpairs(n: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    (0..n)
        .map(|i| Ok((eigenvalue(n, i), eigenvector(n, i)?)))
        .collect()
}

/// Checks `KΨ_i = β_iΨ_i` in rational arithmetic for every `i`.
pub fn verify_eigenpairs_exact(n: usize) -> Result<bool> {
    let k = build_k_exact(n)?;
    for i in 0..n {
        let psi = eigenvector_exact(n, i)?;
        let beta = eigenvalue_exact(n, i);
        for r in 0..n {
            let lhs = (0..n).fold(BigRational::zero(), |acc, c| acc + &k[r * n + c] * &psi[c]);
            if lhs != &beta * &psi[r] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `d₂(K^t(i,·),u)²` by the closed form, evaluated case by case as printed.
pub fn d2_single_card(n: usize, t: u32, i: usize) -> Result<f64> {
    check_n(n)?;
    check_pos(n, i)?;
    let nf = n as f64;
    let term =
        |k: usize| (1.0 - k as f64 / nf).powi(2 * t as i32) * nf / (((n - k) * (n - k + 1)) as f64);
    let value = if i == n {
        (1.0 - 1.0 / nf).powi(2 * t as i32) * (nf - 1.0)
    } else if i == 1 {
        let s: KahanSum = (1..=n.saturating_sub(2)).map(term).collect();
        s.value() + (1.0 / nf).powi(2 * t as i32) * nf / 2.0
    } else {
        let s: KahanSum = (1..=n - i).map(term).collect();
        let i1 = (i - 1) as f64;
        s.value() + (i1 / nf).powi(2 * t as i32) * nf * i1 / i as f64
    };
    Ok(value)
}

/// `Σ_{k≥1} β_k^{2t} Ψ_k(i)² / ‖Ψ_k‖²`.
pub fn d2_spectral_sum(n: usize, t: u32, i: usize) -> Result<f64> {
    check_n(n)?;
    check_pos(n, i)?;
    let mut s = KahanSum::new();
    for k in 1..n {
        let psi = eigenvector(n, k)?[i - 1];
        s.add(eigenvalue(n, k).powi(2 * t as i32) * psi * psi / eigenvector_norm_sq(n, k));
    }
    Ok(s.value())
}

/// `n Σ_j (row(j) − 1/n)²` for a probability row over `n` states.
pub fn d2_squared_of_row(row: &[f64]) -> f64 {
    let d = crate::markov::d2_distance(row);
    d * d
}

/// `S(a) / n^t` with `S(a) = Σ_{ℓ=a}^{n−1} ℓ^{t−1}/(ℓ+1)`.
fn tail_sum(n: usize, t: u32, a: usize) -> f64 {
    let nf = n as f64;
    let s: KahanSum = (a.max(1)..n)
        .map(|l| (l as f64 / nf).powi(t as i32 - 1) / (nf * (l + 1) as f64))
        .collect();
    s.value()
}

/// `((m−1)/n)^t / m`.
fn lead(n: usize, t: u32, m: usize) -> f64 {
    ((m - 1) as f64 / n as f64).powi(t as i32) / m as f64
}

/// `K^t(i,j) − 1/n` from the closed-form rows.
pub fn kt_deviation(n: usize, t: u32, i: usize, j: usize) -> Result<f64> {
    check_n(n)?;
    check_pos(n, i)?;
    check_pos(n, j)?;
    if t == 0 {
        return Ok(f64::from(u8::from(i == j)) - 1.0 / n as f64);
    }
    let v = if i == n {
        if j < n {
            -lead(n, t, n)
        } else {
            lead(n, t, n) * (n - 1) as f64
        }
    } else if j < i {
        -lead(n, t, i) + tail_sum(n, t, i)
    } else if j == i {
        lead(n, t, i) * (i - 1) as f64 + tail_sum(n, t, i)
    } else if j < n {
        -lead(n, t, j) + tail_sum(n, t, j)
    } else {
        -lead(n, t, n)
    };
    Ok(v)
}

/// `K^t(i,j)` from the closed-form rows (`t ≥ 1`; `t = 0` gives `δ_ij`).
pub fn kt_entry(n: usize, t: u32, i: usize, j: usize) -> Result<f64> {
    Ok(kt_deviation(n, t, i, j)? + 1.0 / n as f64)
}

/// Exact `K^t(i,j)` from the closed-form rows.
pub fn kt_entry_exact(n: usize, t: u32, i: usize, j: usize) -> Result<BigRational> {
    check_n(n)?;
    check_pos(n, i)?;
    check_pos(n, j)?;
    let u = rat(1, n as i64);
    if t == 0 {
        return Ok(if i == j {
            BigRational::one()
        } else {
            BigRational::zero()
        });
    }
    let pow = |b: usize, e: u32| BigInt::from(b).pow(e);
    let frac = |num: BigInt, den: usize| BigRational::new(num, BigInt::from(den));
    let s = |a: usize| {
        (a..n).fold(BigRational::zero(), |acc, l| {
            acc + frac(pow(l, t - 1), l + 1)
        })
    };
    let nt = BigRational::from_integer(pow(n, t));
    let inner = if i == n {
        if j < n {
            -frac(pow(n - 1, t), n)
        } else {
            frac(pow(n - 1, t + 1), n)
        }
    } else if j < i {
        -frac(pow(i - 1, t), i) + s(i)
    } else if j == i {
        frac(pow(i - 1, t + 1), i) + s(i)
    } else if j < n {
        -frac(pow(j - 1, t), j) + s(j)
    } else {
        -frac(pow(n - 1, t), n)
    };
    Ok(inner / nt + u)
}

/// `‖K^t(i,·) − u‖_TV` summed from the closed-form entries.
pub fn tv_single_card(n: usize, t: u32, i: usize) -> Result<f64> {
    let mut s = KahanSum::new();
    for j in 1..=n {
        s.add(kt_deviation(n, t, i, j)?.abs());
    }
    Ok(0.5 * s.value())
}

/// Exact total variation from the rational entries.
pub fn tv_single_card_exact(n: usize, t: u32, i: usize) -> Result<BigRational> {
    let u = rat(1, n as i64);
    let mut s = BigRational::zero();
    for j in 1..=n {
        s += (kt_entry_exact(n, t, i, j)? - &u).abs();
    }
    Ok(s / BigRational::from_integer(2.into()))
}

/// `(n−1) log n + (n−1)/(n−2)`: from here on every start above the bottom
/// has the same total variation.
pub fn tv_threshold(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "threshold needs n >= 3, got {n}"
        )));
    }
    let nf = n as f64;
    Ok((nf - 1.0) * nf.ln() + (nf - 1.0) / (nf - 2.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TvClosedForm {
    Value {
        tv: f64,
    },
    /// No closed form before this time for this start.
    Unavailable {
        threshold: f64,
    },
}

impl TvClosedForm {
    pub fn value(&self) -> Option<f64> {
        match self {
            TvClosedForm::Value { tv } => Some(*tv),
            TvClosedForm::Unavailable { .. } => None,
        }
    }
}

/// `(1−1/n)^{t+1}` for the bottom card; `(1/n)(1−1/n)^t` for other starts
/// once `t` reaches [`tv_threshold`].
pub fn tv_closed_forms(n: usize, t: u32, i: usize) -> Result<TvClosedForm> {
    check_n(n)?;
    check_pos(n, i)?;
    let r = 1.0 - 1.0 / n as f64;
    if i == n {
        return Ok(TvClosedForm::Value {
            tv: r.powi(t as i32 + 1),
        });
    }
    if n < 3 {
        return Ok(TvClosedForm::Unavailable {
            threshold: f64::INFINITY,
        });
    }
    let threshold = tv_threshold(n)?;
    if (t as f64) >= threshold {
        Ok(TvClosedForm::Value {
            tv: r.powi(t as i32) / n as f64,
        })
    } else {
        Ok(TvClosedForm::Unavailable { threshold })
    }
}

/// Lower bound on the total variation from start `n − i′`:
/// `½[(1/n)(1−1/n)^t + (1−(i′+1)/n)^{t+1}]`.
pub fn bottom_tv_lower_bound(n: usize, t: u32, i_prime: usize) -> Result<f64> {
    check_n(n)?;
    if i_prime == 0 || i_prime >= n {
        return Err(Error::IndexOutOfRange {
            index: i_prime,
            n: n - 1,
        });
    }
    let nf = n as f64;
    Ok(0.5
        * ((1.0 - 1.0 / nf).powi(t as i32) / nf
            + (1.0 - (i_prime + 1) as f64 / nf).powi(t as i32 + 1)))
}

/// `B(n,t,i)` with `B·(1−1/n)^{2t−1} = (1/n) Σ_{k=1}^{n−i} (1−k/n)^{2t−2}`.
pub fn b_quantity(n: usize, t: u32, i: usize) -> Result<f64> {
    check_n(n)?;
    check_pos(n, i)?;
    if t == 0 {
        return Err(Error::InvalidParameter("B needs t >= 1".into()));
    }
    let nf = n as f64;
    let r = 1.0 - 1.0 / nf;
    // Divide termwise so that large t does not underflow.
    let s: KahanSum = (1..=n - i)
        .map(|k| ((1.0 - k as f64 / nf) / r).powi(2 * t as i32 - 2))
        .collect();
    Ok(s.value() / (nf * r))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum BoundCase {
    /// `2 ≤ i ≤ n/2`.
    UpperHalf,
    /// `i ≤ n−2` outside the other cases; only the upper bound is explicit.
    Fraction,
    /// `n − i₀ ≤ i ≤ n − 2`.
    NearBottom { i0: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBounds {
    pub n: usize,
    pub t: u32,
    pub i: usize,
    pub case: BoundCase,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl BBounds {
    pub fn holds(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Evaluates `B(n,t,i)` against the bracket of the first applicable case.
/// The near-bottom case is considered only when `i0` is given.
pub fn b_bounds(n: usize, t: u32, i: usize, i0: Option<usize>) -> Result<BBounds> {
    if n < 4 || t < 1 {
        return Err(Error::InvalidParameter(format!(
            "bounds need n >= 4 and t >= 1, got n={n} t={t}"
        )));
    }
    let value = b_quantity(n, t, i)?;
    let inv = 1.0 / (n - 1) as f64;
    let odd = (2 * t - 1) as f64;
    let (case, lower, upper) = if (2..=n / 2).contains(&i) {
        (
            BoundCase::UpperHalf,
            Some(inv + 1.0 / (4.0 * odd)),
            inv + 1.0 / odd,
        )
    } else if let Some(i0) = i0.filter(|&i0| i + i0 >= n && i + 2 <= n) {
        (BoundCase::NearBottom { i0 }, Some(inv), i0 as f64 * inv)
    } else if (2..=n - 2).contains(&i) {
        (BoundCase::Fraction, None, inv + 1.0 / odd)
    } else {
        return Err(Error::CaseSelection { n, i });
    };
    Ok(BBounds {
        n,
        t,
        i,
        case,
        value,
        lower,
        upper,
        lower_ok: lower.is_none_or(|l| value >= l),
        upper_ok: value <= upper,
    })
}

pub fn b_bounds_check(n: usize, t: u32, i: usize, i0: Option<usize>) -> Result<bool> {
    Ok(b_bounds(n, t, i, i0)?.holds())
}

/// The middle sum `Σ_{k=1}^{n−i} (1−k/n)^{2t} n/((n−k)(n−k+1))` and its
/// bracket `[upper/2, upper]` with `upper = (1/n) Σ (1−k/n)^{2t−2}`.
pub fn sandwich(n: usize, t: u32, i: usize) -> Result<(f64, f64, f64)> {
    check_n(n)?;
    check_pos(n, i)?;
    let nf = n as f64;
    let mid: KahanSum = (1..=n - i)
        .map(|k| (1.0 - k as f64 / nf).powi(2 * t as i32) * nf / ((n - k) * (n - k + 1)) as f64)
        .collect();
    let up: KahanSum = (1..=n - i)
        .map(|k| (1.0 - k as f64 / nf).powi(2 * t as i32 - 2) / nf)
        .collect();
    Ok((0.5 * up.value(), mid.value(), up.value()))
}

/// Start regimes for the cutoff curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    /// Start at `n − i′`; predicted time `(n/(2i′))(log n + c)`.
    Bottom { i_prime: usize },
    /// Start at a fixed top position `i`.
    Top { i: usize },
    /// Start at `⌊an⌋`; predicted time `(log n + c)/(2 log(1/a))`.
    Middle { a: f64 },
}

impl Regime {
    pub fn start(&self, n: usize) -> Result<usize> {
        let s = match *self {
            Regime::Bottom { i_prime } if i_prime >= 1 && i_prime < n => n - i_prime,
            Regime::Top { i } if i >= 1 && i <= n => i,
            Regime::Middle { a } if a > 0.0 && a < 1.0 => ((a * n as f64).floor() as usize).max(1),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "regime {self:?} is invalid for n={n}"
                )))
            }
        };
        Ok(s)
    }

    /// Predicted time for offset `c`, if the regime has one.
    pub fn predicted_time(&self, n: usize, c: f64) -> Option<f64> {
        let ln = (n as f64).ln();
        match *self {
            Regime::Bottom { i_prime } => Some(n as f64 / (2.0 * i_prime as f64) * (ln + c)),
            Regime::Top { .. } => None,
            Regime::Middle { a } => Some((ln + c) / (2.0 * (1.0 / a).ln())),
        }
    }

    /// Inverse of [`Regime::predicted_time`].
    pub fn offset(&self, n: usize, t: f64) -> Option<f64> {
        let ln = (n as f64).ln();
        match *self {
            Regime::Bottom { i_prime } => Some(2.0 * i_prime as f64 * t / n as f64 - ln),
            Regime::Top { .. } => None,
            Regime::Middle { a } => Some(2.0 * t * (1.0 / a).ln() - ln),
        }
    }
}

/// `d₂` levels reported by the cutoff experiment.
pub const CUTOFF_LEVELS: [f64; 3] = [10.0, 1.0, 0.1];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffCrossing {
    pub level: f64,
    /// First `t` with `d₂ ≤ level`.
    pub t: Option<usize>,
    /// Offset `c` with predicted time equal to `t`.
    pub c: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffExperiment {
    pub n: usize,
    pub regime: Regime,
    pub start: usize,
    pub curve: DistanceCurve,
    pub crossings: Vec<CutoffCrossing>,
}

/// `d₂` of the single-card chain from the closed form.
pub fn d2_distance_single_card(n: usize, t: u32, i: usize) -> Result<f64> {
    Ok(d2_single_card(n, t, i)?.sqrt())
}

/// Distances of `K^t(start,·)` to uniform for `t = 0..=t_max`, all from the
/// closed forms, plus the `d₂` crossing times.
pub fn cutoff_experiment(n: usize, regime: Regime, t_max: u32) -> Result<CutoffExperiment> {
    check_n(n)?;
    let start = regime.start(n)?;
    let mut curve = DistanceCurve::new("single-card", n, start.to_string());
    for t in 0..=t_max {
        let mut tv = KahanSum::new();
        let mut dinf = 0.0f64;
        for j in 1..=n {
            let d = kt_deviation(n, t, start, j)?;
            tv.add(d.abs());
            dinf = dinf.max((n as f64 * d).abs());
        }
        curve.push(
            t as usize,
            Distances {
                tv: 0.5 * tv.value(),
                d2: d2_distance_single_card(n, t, start)?,
                dinf,
            },
        )?;
    }
    let crossings = CUTOFF_LEVELS
        .iter()
        .map(|&level| {
            let t = curve.first_below(crate::markov::Metric::D2, level);
            CutoffCrossing {
                level,
                t,
                c: t.and_then(|t| regime.offset(n, t as f64)),
            }
        })
        .collect();
    Ok(CutoffExperiment {
        n,
        regime,
        start,
        curve,
        crossings,
    })
}

/// Largest degree for which `tv_exact` uses rational arithmetic.
pub const EXACT_DEGREE: usize = 8;
/// Largest time for which `tv_exact` uses rational arithmetic.
pub const EXACT_TIME: u32 = 30;

/// One row of the single-card table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleCardRow {
    pub n: usize,
    pub start: usize,
    pub t: u32,
    /// Rational sum when `n ≤ 8, t ≤ 30`, float sum of closed-form entries
    /// otherwise.
    pub tv_exact: f64,
    /// `None` outside the region of validity.
    pub tv_closed: Option<f64>,
    pub d2_closed: f64,
    /// From explicit powers of `K`.
    pub d2_matrix: f64,
}

/// Single-card distances over a grid of starts and times.
pub fn single_card_rows(n: usize, starts: &[usize], times: &[u32]) -> Result<Vec<SingleCardRow>> {
    let k = build_k(n)?;
    for &s in starts {
        check_pos(n, s)?;
    }
    let t_max = times.iter().copied().max().unwrap_or(0) as usize;
    // d₂ of K^t(s,·) for every t up to t_max, by evolving one row per start.
    let matrix_d2: Vec<Vec<f64>> = starts
        .iter()
        .map(|&s| {
            let mut row = vec![0.0; n];
            row[s - 1] = 1.0;
            let mut out = Vec::with_capacity(t_max + 1);
            for _ in 0..t_max {
                out.push(d2_squared_of_row(&row).sqrt());
                row = k.evolve(&row);
            }
            out.push(d2_squared_of_row(&row).sqrt());
            out
        })
        .collect();
    let mut rows = Vec::with_capacity(starts.len() * times.len());
    for (&s, d2_rows) in starts.iter().zip(&matrix_d2) {
        for &t in times {
            let tv_exact = if n <= EXACT_DEGREE && t <= EXACT_TIME {
                tv_single_card_exact(n, t, s)?.to_f64().unwrap_or(f64::NAN)
            } else {
                tv_single_card(n, t, s)?
            };
            rows.push(SingleCardRow {
                n,
                start: s,
                t,
                tv_exact,
                tv_closed: tv_closed_forms(n, t, s)?.value(),
                d2_closed: d2_distance_single_card(n, t, s)?,
                d2_matrix: d2_rows[t as usize],
            });
        }
    }
    Ok(rows)
}

/// CSV `n,start,t,tv_exact,tv_closed,d2_closed,d2_matrix`; `tv_closed` is
/// empty where no closed form applies.
pub fn single_card_table(n: usize, starts: &[usize], times: &[u32]) -> Result<String> {
    let mut out = String::from("n,start,t,tv_exact,tv_closed,d2_closed,d2_matrix\n");
    for r in single_card_rows(n, starts, times)? {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            r.start,
            r.t,
            fmt17(r.tv_exact),
            r.tv_closed.map(fmt17).unwrap_or_default(),
            fmt17(r.d2_closed),
            fmt17(r.d2_matrix)
        ));
    }
    Ok(out)
}
