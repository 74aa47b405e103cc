//! Parsing of measure names, start states and time grids, plus the size
//! guards shared by the subcommands.

use std::str::FromStr;

use hitrun::group::{CyclicVector, FiniteGroup};
use hitrun::single_card::Regime;
use hitrun::{CyclicPower, Permutation};

use crate::CliError;

/// Full-group state limits without and with `--heavy`.
pub const FULL_GROUP_STATES: [usize; 2] = [720, 5040];
/// k-card state limits: three cards on 12 by default, on 21 with `--heavy`.
pub const LUMPED_STATES: [usize; 2] = [1320, 7980];
/// Degree limits for comparison tables.
pub const COMPARE_DEGREE: [usize; 2] = [200, 400];
/// Degree limits for the single-card suite.
pub const SINGLE_CARD_DEGREE: [usize; 2] = [500, 2000];
/// Longest time grid.
pub const MAX_TIME: usize = 100_000;

pub fn limit(pair: [usize; 2], heavy: bool) -> usize {
    pair[usize::from(heavy)]
}

/// Fails with a guard error when `size > limit`.
pub fn guard(
    what: &'static str,
    size: usize,
    pair: [usize; 2],
    heavy: bool,
) -> Result<(), CliError> {
    let lim = limit(pair, heavy);
    if size > lim {
        return Err(CliError::Guard {
            what,
            size,
            limit: lim,
            hint: if heavy {
                ""
            } else {
                " (--heavy raises the limit)"
            },
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureName {
    HnrTopToRandom,
    TopToRandom,
    RandomToRandom,
    RandomTransposition,
    HnrRandomTransposition,
    Packet,
    Overhand,
    Borel,
    Cyclic { modulus: usize, dimension: usize },
}

impl FromStr for MeasureName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        Ok(match s {
            "hnr-ttr" => MeasureName::HnrTopToRandom,
            "ttr" => MeasureName::TopToRandom,
            "r2r" => MeasureName::RandomToRandom,
            "rt" => MeasureName::RandomTransposition,
            "hnr-rt" => MeasureName::HnrRandomTransposition,
            "packet" => MeasureName::Packet,
            "overhand" => MeasureName::Overhand,
            "borel" => MeasureName::Borel,
            _ => {
                let inner = s
                    .strip_prefix("cyclic(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| {
                        format!(
                            "unknown measure `{s}`; expected hnr-ttr, ttr, r2r, rt, hnr-rt, \
                             packet, overhand, borel or cyclic(m,d)"
                        )
                    })?;
                let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
                let [m, d] = parts[..] else {
                    return Err(format!("cyclic measure needs two arguments, got `{s}`"));
                };
                let parse = |x: &str| {
                    x.parse::<usize>()
                        .map_err(|_| format!("bad cyclic argument `{x}`"))
                };
                MeasureName::Cyclic {
                    modulus: parse(m)?,
                    dimension: parse(d)?,
                }
            }
        })
    }
}

impl std::fmt::Display for MeasureName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasureName::HnrTopToRandom => f.write_str("hnr-ttr"),
            MeasureName::TopToRandom => f.write_str("ttr"),
            MeasureName::RandomToRandom => f.write_str("r2r"),
            MeasureName::RandomTransposition => f.write_str("rt"),
            MeasureName::HnrRandomTransposition => f.write_str("hnr-rt"),
            MeasureName::Packet => f.write_str("packet"),
            MeasureName::Overhand => f.write_str("overhand"),
            MeasureName::Borel => f.write_str("borel"),
            MeasureName::Cyclic { modulus, dimension } => {
                write!(f, "cyclic({modulus},{dimension})")
            }
        }
    }
}

impl MeasureName {
    pub fn is_cyclic(&self) -> bool {
        matches!(self, MeasureName::Cyclic { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `n` for symmetric-group measures; cyclic measures carry their own size.
pub fn degree(n: Option<usize>, measure: MeasureName) -> Result<usize, CliError> {
    match (measure, n) {
        (MeasureName::Cyclic { .. }, _) => Ok(0),
        (_, Some(n)) if n >= 2 => Ok(n),
        (_, Some(n)) => Err(CliError::Config(format!("--n must be at least 2, got {n}"))),
        (_, None) => Err(CliError::Config(format!(
            "--n is required for measure {measure}"
        ))),
    }
}

fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("bad entry `{x}` in `{s}`")))
        })
        .collect()
}

/// `id` or 1-based one-line notation such as `2,1,3`.
pub fn permutation_start(spec: &str, n: usize) -> Result<Permutation, CliError> {
    if spec == "id" {
        return Ok(Permutation::identity(n));
    }
    let line = parse_list(spec)?;
    if line.len() != n {
        return Err(CliError::Config(format!(
            "start `{spec}` has {} entries, expected {n}",
            line.len()
        )));
    }
    Ok(Permutation::from_one_line(&line)?)
}

/// `id` or coordinates such as `0,1`.
pub fn cyclic_start(spec: &str, group: &CyclicPower) -> Result<CyclicVector, CliError> {
    if spec == "id" {
        return Ok(group.identity());
    }
    let v = CyclicVector::new(parse_list(spec)?, group.modulus())?;
    if !group.contains(&v) {
        return Err(CliError::Config(format!(
            "start `{spec}` is not in the group"
        )));
    }
    Ok(v)
}

/// Comma-separated 1-based positions, or every position when absent.
pub fn positions(spec: Option<&str>, n: usize) -> Result<Vec<usize>, CliError> {
    match spec {
        None => Ok((1..=n).collect()),
        Some(s) => {
            let list = parse_list(s)?;
            if let Some(&bad) = list.iter().find(|&&p| p == 0 || p > n) {
                return Err(CliError::Config(format!("position {bad} outside 1..={n}")));
            }
            Ok(list)
        }
    }
}

/// `start:stop:step`, inclusive of `stop` when it lies on the grid.
pub fn grid(spec: &str) -> Result<Vec<u32>, CliError> {
    let parts = parse_list(&spec.replace(':', ","))?;
    let [start, stop, step] = parts[..] else {
        return Err(CliError::Config(format!(
            "grid `{spec}` is not start:stop:step"
        )));
    };
    if step == 0 || stop < start || stop > MAX_TIME {
        return Err(CliError::Config(format!("invalid grid `{spec}`")));
    }
    Ok((start..=stop).step_by(step).map(|t| t as u32).collect())
}

/// `bottom:i'`, `top:i` or `middle:a`.
pub fn regime(spec: &str) -> Result<Regime, CliError> {
    let bad = || {
        CliError::Config(format!(
            "regime `{spec}` is not bottom:i, top:i or middle:a"
        ))
    };
    let (kind, value) = spec.split_once(':').ok_or_else(bad)?;
    match kind {
        "bottom" => Ok(Regime::Bottom {
            i_prime: value.parse().map_err(|_| bad())?,
        }),
        "top" => Ok(Regime::Top {
            i: value.parse().map_err(|_| bad())?,
        }),
        "middle" => Ok(Regime::Middle {
            a: value.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}
