//! One function per subcommand. Each returns its artifacts and whether the
//! invariants it checks held.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use hitrun::group::{cyclic_tuple, random_transposition_tuple, top_to_random_tuple, FiniteGroup};
use hitrun::lumping::{eigenvalue_histogram, k_card_kernel, k_card_state_count, HISTOGRAM_WIDTH};
use hitrun::markov::{distance_curve, kernel_from_measure};
use hitrun::measure::{
    borel_measure, crude_overhand_measure, hnr_cyclic, hnr_random_transposition, hnr_top_to_random,
    packet_description_measure, random_to_random_measure, random_transposition_measure,
    rational_to_f64, top_to_random_measure,
};
use hitrun::numeric::fmt17;
use hitrun::single_card::{cutoff_experiment, single_card_rows, single_card_table, Regime};
use hitrun::spectral::{
    comparison_constant, positivity_certificate, symmetric_eigenvalues, DcompContext,
    PositivityCertificate,
};
use hitrun::verify::run_suite;
use hitrun::{CyclicPower, GroupMeasure, SpectralReport, SymmetricGroup};

use crate::config::{
    self, guard, Format, MeasureName, COMPARE_DEGREE, FULL_GROUP_STATES, LUMPED_STATES, MAX_TIME,
    SINGLE_CARD_DEGREE,
};
use crate::output::Artifact;
use crate::CliError;

/// Smallest eigenvalue tolerated for hit-and-run walks.
const POSITIVITY_TOLERANCE: f64 = 1e-9;

pub struct Report {
    pub artifacts: Vec<Artifact>,
    pub passed: bool,
    /// Shown on standard error when `passed` is false.
    pub failure: String,
}

impl Report {
    fn ok(artifacts: Vec<Artifact>) -> Self {
        Report {
            artifacts,
            passed: true,
            failure: String::new(),
        }
    }

    fn checked(artifacts: Vec<Artifact>, passed: bool, failure: impl Into<String>) -> Self {
        Report {
            artifacts,
            passed,
            failure: failure.into(),
        }
    }
}

/// Flags every subcommand accepts.
pub struct Common {
    pub out: Option<PathBuf>,
    pub format: Format,
    pub heavy: bool,
    pub seed: u64,
}

impl Common {
    fn primary(&self, contents: String) -> Artifact {
        Artifact {
            path: self.out.clone(),
            contents,
        }
    }

    fn render<T: Serialize>(
        &self,
        csv: impl FnOnce() -> String,
        json: &T,
    ) -> Result<Artifact, CliError> {
        Ok(self.primary(match self.format {
            Format::Csv => csv(),
            Format::Json => to_json(json)?,
        }))
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

enum AnyMeasure {
    Symmetric(GroupMeasure<SymmetricGroup>),
    Cyclic(GroupMeasure<CyclicPower>),
}

fn factorial_saturating(n: usize) -> usize {
    (1..=n).fold(1usize, |acc, k| acc.saturating_mul(k))
}

fn group_size(name: MeasureName, n: usize) -> usize {
    match name {
        MeasureName::Cyclic { modulus, dimension } => {
            (0..dimension).fold(1usize, |acc, _| acc.saturating_mul(modulus))
        }
        _ => factorial_saturating(n),
    }
}

fn build_measure(name: MeasureName, n: usize) -> Result<AnyMeasure, CliError> {
    use AnyMeasure::Symmetric as S;
    Ok(match name {
        MeasureName::HnrTopToRandom => S(hnr_top_to_random(n)?),
        MeasureName::TopToRandom => S(top_to_random_measure(n)?),
        MeasureName::RandomToRandom => S(random_to_random_measure(n)?),
        MeasureName::RandomTransposition => S(random_transposition_measure(n)?),
        MeasureName::HnrRandomTransposition => S(hnr_random_transposition(n)?),
        MeasureName::Packet => S(packet_description_measure(n)?),
        MeasureName::Overhand => S(crude_overhand_measure(n)?),
        MeasureName::Borel => S(borel_measure(n)?),
        MeasureName::Cyclic { modulus, dimension } => {
            AnyMeasure::Cyclic(hnr_cyclic(modulus, dimension)?)
        }
    })
}

/// Whether the measure is a hit-and-run measure, whose spectrum is
/// non-negative.
fn is_hit_and_run(name: MeasureName) -> bool {
    matches!(
        name,
        MeasureName::HnrTopToRandom
            | MeasureName::HnrRandomTransposition
            | MeasureName::Packet
            | MeasureName::Cyclic { .. }
    )
}

fn require_symmetric<G: FiniteGroup>(
    mu: &GroupMeasure<G>,
    name: MeasureName,
) -> Result<(), CliError> {
    if mu.is_symmetric() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "measure {name} is not symmetric; spectra need a symmetric walk"
        )))
    }
}

fn spectrum_json(name: MeasureName, n: usize, k: Option<usize>, r: &SpectralReport) -> Value {
    json!({
        "measure": name.to_string(),
        "n": n,
        "k": k,
        "states": r.len(),
        "min": r.min(),
        "second": r.second(),
        "gap": r.gap(),
        "eigenvalues": r.eigenvalues(),
    })
}

fn positivity_verdict(name: MeasureName, r: &SpectralReport) -> (bool, String) {
    let passed = !is_hit_and_run(name) || r.min() >= -POSITIVITY_TOLERANCE;
    (
        passed,
        format!("smallest eigenvalue {:e} of a hit-and-run walk", r.min()),
    )
}

fn k_card_spectrum(
    name: MeasureName,
    n: usize,
    k: usize,
    heavy: bool,
) -> Result<SpectralReport, CliError> {
    if !(1..=3).contains(&k) || k > n {
        return Err(CliError::Config(format!(
            "--k must be 1, 2 or 3 and at most n, got {k}"
        )));
    }
    let states = k_card_state_count(n, k).unwrap_or(usize::MAX);
    guard("k-card states", states, LUMPED_STATES, heavy)?;
    let AnyMeasure::Symmetric(mu) = build_measure(name, n)? else {
        return Err(CliError::Config(
            "k-card chains need a measure on S_n".into(),
        ));
    };
    require_symmetric(&mu, name)?;
    let chain = k_card_kernel(&mu, k, states)?;
    Ok(symmetric_eigenvalues(&chain.kernel)?)
}

pub fn spectrum(
    c: &Common,
    name: MeasureName,
    n: Option<usize>,
    k: Option<usize>,
) -> Result<Report, CliError> {
    let n = config::degree(n, name)?;
    let r = match k {
        Some(k) => k_card_spectrum(name, n, k, c.heavy)?,
        None => {
            let size = group_size(name, n);
            guard("full-group states", size, FULL_GROUP_STATES, c.heavy)?;
            match build_measure(name, n)? {
                AnyMeasure::Symmetric(mu) => {
                    require_symmetric(&mu, name)?;
                    symmetric_eigenvalues(&kernel_from_measure(&mu, size)?)?
                }
                AnyMeasure::Cyclic(mu) => {
                    require_symmetric(&mu, name)?;
                    symmetric_eigenvalues(&kernel_from_measure(&mu, size)?)?
                }
            }
        }
    };
    let (passed, failure) = positivity_verdict(name, &r);
    let artifact = c.render(|| r.to_csv(), &spectrum_json(name, n, k, &r))?;
    Ok(Report::checked(vec![artifact], passed, failure))
}

pub fn mix(
    c: &Common,
    name: MeasureName,
    n: Option<usize>,
    t_max: usize,
    start: &str,
) -> Result<Report, CliError> {
    let n = config::degree(n, name)?;
    if t_max > MAX_TIME {
        return Err(CliError::Config(format!(
            "--tmax {t_max} exceeds {MAX_TIME}"
        )));
    }
    let size = group_size(name, n);
    guard("full-group states", size, FULL_GROUP_STATES, c.heavy)?;
    let mut curve = match build_measure(name, n)? {
        AnyMeasure::Symmetric(mu) => {
            let s = config::permutation_start(start, n)?;
            distance_curve(&mu, t_max, &s, size)?
        }
        AnyMeasure::Cyclic(mu) => {
            let s = config::cyclic_start(start, mu.group())?;
            distance_curve(&mu, t_max, &s, size)?
        }
    };
    curve.label = name.to_string();
    let json = json!({ "curve": &curve, "crossings": curve.crossings() });
    Ok(Report::ok(vec![c.render(|| curve.to_csv(), &json)?]))
}

pub fn single_card(
    c: &Common,
    n: usize,
    starts: Option<&str>,
    t_max: usize,
    regime: Option<&str>,
) -> Result<Report, CliError> {
    guard("single-card degree", n, SINGLE_CARD_DEGREE, c.heavy)?;
    if t_max > MAX_TIME {
        return Err(CliError::Config(format!(
            "--tmax {t_max} exceeds {MAX_TIME}"
        )));
    }
    if let Some(spec) = regime {
        if starts.is_some() {
            return Err(CliError::Config(
                "--start and --regime are exclusive".into(),
            ));
        }
        let regime: Regime = config::regime(spec)?;
        let exp = cutoff_experiment(n, regime, t_max as u32)?;
        return Ok(Report::ok(vec![c.render(|| exp.curve.to_csv(), &exp)?]));
    }
    let starts = config::positions(starts, n)?;
    let times: Vec<u32> = (0..=t_max as u32).collect();
    let artifact = match c.format {
        Format::Csv => c.primary(single_card_table(n, &starts, &times)?),
        Format::Json => c.primary(to_json(&single_card_rows(n, &starts, &times)?)?),
    };
    Ok(Report::ok(vec![artifact]))
}

pub fn lumped(
    c: &Common,
    name: MeasureName,
    n: Option<usize>,
    k: usize,
    hist: Option<PathBuf>,
) -> Result<Report, CliError> {
    let n = config::degree(n, name)?;
    if name.is_cyclic() {
        return Err(CliError::Config(
            "k-card chains need a measure on S_n".into(),
        ));
    }
    let r = k_card_spectrum(name, n, k, c.heavy)?;
    let histogram = eigenvalue_histogram(&r, HISTOGRAM_WIDTH)?;
    let (passed, failure) = positivity_verdict(name, &r);
    let mut artifacts = Vec::new();
    match c.format {
        Format::Csv => {
            artifacts.push(c.primary(r.to_csv()));
            if let Some(path) = hist {
                artifacts.push(Artifact {
                    path: Some(path),
                    contents: histogram.to_csv(),
                });
            }
        }
        Format::Json => {
            if hist.is_some() {
                return Err(CliError::Config(
                    "--hist applies to csv output; json includes the histogram".into(),
                ));
            }
            let mut doc = spectrum_json(name, n, Some(k), &r);
            doc["histogram"] = serde_json::to_value(&histogram)?;
            artifacts.push(c.primary(to_json(&doc)?));
        }
    }
    Ok(Report::checked(artifacts, passed, failure))
}

fn certificate(
    name: MeasureName,
    n: usize,
    trials: usize,
    seed: u64,
    limit: usize,
) -> Result<PositivityCertificate, CliError> {
    Ok(match name {
        MeasureName::HnrTopToRandom => {
            positivity_certificate(&top_to_random_tuple(n)?, trials, seed, limit)?
        }
        MeasureName::HnrRandomTransposition => {
            positivity_certificate(&random_transposition_tuple(n)?, trials, seed, limit)?
        }
        MeasureName::Cyclic { modulus, dimension } => {
            positivity_certificate(&cyclic_tuple(modulus, dimension)?, trials, seed, limit)?
        }
        other => {
            return Err(CliError::Config(format!(
                "positivity needs a hit-and-run tuple (hnr-ttr, hnr-rt or cyclic(m,d)), got {other}"
            )))
        }
    })
}

fn json_scalar(v: &Value) -> String {
    match v {
        Value::Number(x) => match x.as_f64() {
            Some(f) if x.is_f64() => fmt17(f),
            _ => x.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string().replace(',', ";"),
    }
}

pub fn positivity(
    c: &Common,
    name: MeasureName,
    n: Option<usize>,
    trials: usize,
) -> Result<Report, CliError> {
    let n = config::degree(n, name)?;
    let size = group_size(name, n);
    guard("full-group states", size, FULL_GROUP_STATES, c.heavy)?;
    let cert = certificate(name, n, trials, c.seed, size)?;
    let mut doc = serde_json::to_value(&cert)?;
    doc["measure"] = json!(name.to_string());
    doc["seed"] = json!(c.seed);
    let artifact = match c.format {
        Format::Json => c.primary(to_json(&doc)?),
        Format::Csv => {
            let mut out = String::from("field,value\n");
            if let Value::Object(map) = &doc {
                for (key, v) in map {
                    out.push_str(&format!("{key},{}\n", json_scalar(v)));
                }
            }
            c.primary(out)
        }
    };
    let failure = format!(
        "certificate failed: min_eig {:e}, factorization error {:e}, quadratic mismatch {:e}",
        cert.min_eig, cert.factorization_error, cert.max_quadratic_mismatch
    );
    Ok(Report::checked(vec![artifact], cert.passed, failure))
}

pub fn compare(c: &Common, n: usize) -> Result<Report, CliError> {
    guard("comparison degree", n, COMPARE_DEGREE, c.heavy)?;
    let plan = comparison_constant(n)?;
    let weights: Vec<Value> = plan
        .weights
        .iter()
        .map(|w| {
            json!({
                "k": w.k,
                "l": w.l,
                "occurrences": w.occurrences,
                "weight_exact": w.weight.to_string(),
                "weight": rational_to_f64(&w.weight),
            })
        })
        .collect();
    let doc = json!({
        "n": n,
        "words": plan.words.len(),
        "a_exact": plan.a.to_string(),
        "a": plan.a_f64(),
        "weights": weights,
    });
    Ok(Report::ok(vec![c.render(|| plan.to_csv(), &doc)?]))
}

pub fn dcomp(c: &Common, n: usize, grid: &str) -> Result<Report, CliError> {
    let times = config::grid(grid)?;
    let ctx = DcompContext::new(n)?;
    let reports: Vec<_> = times.iter().map(|&t| ctx.evaluate(t)).collect();
    let failing: Vec<u32> = reports.iter().filter(|r| !r.holds).map(|r| r.t).collect();
    let csv = || {
        let mut out = String::from("t,lhs,rhs,rhs_q_variant,holds,holds_q_variant\n");
        for r in &reports {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.t,
                fmt17(r.lhs),
                fmt17(r.rhs),
                fmt17(r.rhs_q_variant),
                r.holds,
                r.holds_q_variant
            ));
        }
        out
    };
    let artifact = c.render(csv, &reports)?;
    Ok(Report::checked(
        vec![artifact],
        failing.is_empty(),
        format!("inequality fails at t={failing:?}"),
    ))
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn verify(c: &Common) -> Result<Report, CliError> {
    let report = run_suite(c.heavy);
    let csv = || {
        let mut out = String::from("module,name,passed,detail\n");
        for check in &report.checks {
            out.push_str(&format!(
                "{},{},{},{}\n",
                check.module,
                check.name,
                check.passed,
                csv_quote(&check.detail)
            ));
        }
        out
    };
    let failing: Vec<String> = report
        .checks
        .iter()
        .filter(|x| !x.passed)
        .map(|x| format!("{}::{}", x.module, x.name))
        .collect();
    let artifact = c.render(csv, &report)?;
    Ok(Report::checked(
        vec![artifact],
        report.passed,
        format!("failing checks: {}", failing.join(", ")),
    ))
}
