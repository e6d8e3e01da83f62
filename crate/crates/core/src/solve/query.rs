use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use super::{solve_qual, solve_quant, Mode, QualMode, SolveConfig};
use crate::error::{Error, Result};
use crate::imc::reduce_to_imc;
use crate::imdp::{boundary_set, build_imdp, region_targets, state_counts};
use crate::model::{validate, Cdpta};
use crate::rational::{parse_rational, to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Ge,
    Gt,
    Le,
    Lt,
}

impl Comparison {
    pub fn is_strict(self) -> bool {
        matches!(self, Comparison::Gt | Comparison::Lt)
    }

    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Comparison::Ge => value >= bound,
            Comparison::Gt => value > bound,
            Comparison::Le => value <= bound,
            Comparison::Lt => value < bound,
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Ge => ">=",
            Comparison::Gt => ">",
            Comparison::Le => "<=",
            Comparison::Lt => "<",
        })
    }
}

/// `⊵ λ` or `⊴ λ` with a rational bound in `[0,1]`, e.g. `>= 4/5`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threshold {
    pub comparison: Comparison,
    pub bound: Rational,
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let ops = [
            (">=", Comparison::Ge),
            ("≥", Comparison::Ge),
            ("<=", Comparison::Le),
            ("≤", Comparison::Le),
            (">", Comparison::Gt),
            ("<", Comparison::Lt),
        ];
        let (rest, comparison) = ops
            .iter()
            .find_map(|(op, c)| s.strip_prefix(op).map(|r| (r, *c)))
            .ok_or_else(|| Error::Format(format!("threshold `{s}` must start with >=, >, <= or <")))?;
        let bound = parse_rational(rest.trim())
            .ok_or_else(|| Error::Format(format!("threshold bound `{}` is not a rational", rest.trim())))?;
        if bound < Rational::from_integer(0.into()) || bound > Rational::from_integer(1.into()) {
            return Err(Error::Format(format!("threshold bound `{}` is outside [0,1]", rest.trim())));
        }
        Ok(Threshold { comparison, bound })
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.comparison, crate::rational::fmt_rational(&self.bound))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Query {
    Quant { mode: Mode, threshold: Option<Threshold> },
    Qual(QualMode),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct QueryStats {
    pub locations: usize,
    pub edges: usize,
    pub constants: usize,
    pub regions: usize,
    pub endpoint_indicators: usize,
    pub imdp_choices: usize,
    pub imdp_transitions: usize,
    pub imc_states: usize,
    pub imc_transitions: usize,
    pub iterations: usize,
    pub converged: bool,
    pub build_time: Duration,
    pub solve_time: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryAnswer {
    /// Probability at the initial state, for quantitative queries.
    pub value: Option<f64>,
    /// Threshold verdict or qualitative answer.
    pub holds: Option<bool>,
    /// The value is within ten epsilons of the threshold.
    pub undecided: bool,
    pub stats: QueryStats,
}

/// Runs validation, construction, reduction and solving, and reports the
/// answer at the initial state.
pub fn solve_query(model: &Cdpta, targets: &[String], query: &Query, epsilon: f64) -> Result<QueryAnswer> {
    let report = validate(model);
    if !report.ok() {
        return Err(Error::Invalid(report.to_string().trim_end().replace('\n', "; ")));
    }
    if let Some(t) = targets.iter().find(|t| model.invariant(t).is_none()) {
        return Err(Error::TargetUnknownState(format!("location `{t}`")));
    }
    let start = Instant::now();
    let imdp = build_imdp(model)?;
    let imc = reduce_to_imc(&imdp);
    let lifted = imc.lift_targets(&region_targets(&imdp, targets.iter().map(String::as_str)))?;
    let build_time = start.elapsed();
    let (regions, endpoint_indicators) = state_counts(&imdp);
    let mut stats = QueryStats {
        locations: model.locations().len(),
        edges: model.edges().len(),
        constants: boundary_set(model).values().len(),
        regions,
        endpoint_indicators,
        imdp_choices: imdp.num_choices(),
        imdp_transitions: imdp.num_transitions(),
        imc_states: imc.num_states(),
        imc_transitions: imc.num_transitions(),
        build_time,
        converged: true,
        ..QueryStats::default()
    };
    let initial = imc.initial();
    let start = Instant::now();
    let answer = match query {
        Query::Quant { mode, threshold } => {
            let cfg = SolveConfig::new(*mode).with_epsilon(epsilon);
            let result = solve_quant(&imc, &lifted, &cfg)?;
            stats.iterations = result.iterations;
            stats.converged = result.converged;
            let value = result.values[initial];
            let (holds, undecided) = match threshold {
                Some(t) => {
                    let (holds, undecided) = decide_threshold(value, t, epsilon);
                    (Some(holds), undecided)
                }
                None => (None, false),
            };
            QueryAnswer {
                value: Some(value),
                holds,
                undecided,
                stats,
            }
        }
        Query::Qual(mode) => {
            let result = solve_qual(&imc, &lifted, *mode)?;
            QueryAnswer {
                value: None,
                holds: Some(result.holds_at(initial)),
                undecided: false,
                stats,
            }
        }
    };
    let mut answer = answer;
    answer.stats.solve_time = start.elapsed();
    Ok(answer)
}

/// `(verdict, undecided)`. Inside the band `|value - bound| < 10·epsilon` the
/// value is treated as equal to the bound: non-strict comparisons hold and
/// strict ones fail.
pub fn decide_threshold(value: f64, threshold: &Threshold, epsilon: f64) -> (bool, bool) {
    let bound = to_f64(&threshold.bound);
    if (value - bound).abs() < 10.0 * epsilon {
        (!threshold.comparison.is_strict(), true)
    } else {
        (threshold.comparison.holds(value, bound), false)
    }
}
