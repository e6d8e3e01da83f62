//! The `cdpta` command line.
//!
//! Exit codes: 0 success or true verdict, 1 false verdict, 2 invalid input,
//! 3 internal error. With `--format structured` results are printed as
//! `key value` lines headed by `format cdpta-result 1`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::dsl::{format_errors, parse};
use crate::error::Error;
use crate::imc::{imc_from_text, imc_to_dot, imc_to_text, label_targets, reduce_to_imc};
use crate::imdp::{build_imdp, imdp_to_dot, imdp_to_text, region_targets};
use crate::model::{validate, Cdpta};
use crate::oracle::{
    bounded_reach_cdpta, bounded_reach_imdp, discretize, mdp_reach, DiscretizationLevel, SchedulerKind,
    TableScheduler,
};
use crate::rational::{best_rational_approx, fmt_rational, snap_rational, Rational};
use crate::solve::{decide_threshold, solve_qual, solve_quant, solve_query, Mode, QualMode, Query, QueryAnswer, SolveConfig, Threshold};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cdpta", version, about = "Reachability for one-clock clock-dependent probabilistic timed automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output style.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Imdp,
    Imc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum QuantArg {
    Max,
    Min,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum QualArg {
    Forall0,
    Exists0,
    Exists1,
    Forall1,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the structural assumptions and initialisation.
    Validate { input: PathBuf },
    /// Build the interval MDP (or its interval chain) and print it.
    Compile {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::Imdp)]
        emit: Emit,
        /// Also write a Graphviz rendering here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Maximal or minimal reachability probability from the initial state.
    Solve {
        /// A model, or a chain written by `compile --emit imc`.
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<String>,
        #[arg(long, value_enum)]
        mode: QuantArg,
        /// For example ">= 4/5".
        #[arg(long)]
        threshold: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        epsilon: f64,
    },
    /// Qualitative reachability from the initial state.
    Qual {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<String>,
        #[arg(long, value_enum)]
        mode: QualArg,
    },
    /// Grid-discretized reachability, or exact bounded reachability under a scheduler table.
    Oracle {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        target: Vec<String>,
        #[arg(long, value_enum, default_value_t = QuantArg::Max)]
        mode: QuantArg,
        /// Grid step 2^-k.
        #[arg(short = 'k', default_value_t = 6)]
        k: u32,
        #[arg(long, default_value_t = 1e-9)]
        epsilon: f64,
        /// Scheduler table; switches to bounded reachability.
        #[arg(long)]
        scheduler: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        horizon: usize,
    },
}

impl From<QuantArg> for Mode {
    fn from(m: QuantArg) -> Self {
        match m {
            QuantArg::Max => Mode::Max,
            QuantArg::Min => Mode::Min,
        }
    }
}

impl From<QualArg> for QualMode {
    fn from(m: QualArg) -> Self {
        match m {
            QualArg::Forall0 => QualMode::Forall0,
            QualArg::Exists0 => QualMode::Exists0,
            QualArg::Exists1 => QualMode::Exists1,
            QualArg::Forall1 => QualMode::Forall1,
        }
    }
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invalid(_) | Error::TargetUnknownState(_) | Error::Format(_) | Error::Model(_) => EXIT_INVALID,
            Error::MissingTableEntry(_) | Error::NotBMinimal(_) | Error::PreViolation(_) => EXIT_INVALID,
            _ => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Key/value report builder shared by the text and structured styles.
struct Report {
    format: Format,
    lines: Vec<(String, String)>,
    raw: Option<String>,
}

impl Report {
    fn new(format: Format, command: &str) -> Self {
        Report {
            format,
            lines: vec![("command".into(), command.into())],
            raw: None,
        }
    }

    /// Output printed verbatim.
    fn raw(text: String) -> Self {
        Report {
            format: Format::Text,
            lines: Vec::new(),
            raw: Some(text),
        }
    }

    fn put(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.into(), value.to_string()));
    }

    fn render(&self) -> String {
        if let Some(raw) = &self.raw {
            return raw.clone();
        }
        let mut out = String::new();
        if self.format == Format::Structured {
            out.push_str("format cdpta-result 1\n");
        }
        let width = self.lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.lines {
            match self.format {
                Format::Structured => {
                    let _ = writeln!(out, "{k} {v}");
                }
                Format::Text => {
                    let _ = writeln!(out, "{k:width$}  {v}");
                }
            }
        }
        out
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<Cdpta, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|errors| {
        Failure::invalid(format!("{}: parse errors\n{}", path.display(), format_errors(&text, &errors).trim_end()))
    })
}

fn load_valid_model(path: &Path) -> Result<Cdpta, Failure> {
    let model = load_model(path)?;
    let report = validate(&model);
    if !report.ok() {
        return Err(Failure::invalid(format!("{}: invalid model\n{}", path.display(), report.to_string().trim_end())));
    }
    Ok(model)
}

fn rational_of(value: f64) -> String {
    snap_rational(value, 1e-6, 10_000)
        .or_else(|| best_rational_approx(value, 1_000_000))
        .map(|r| fmt_rational(&r))
        .unwrap_or_else(|| "?".into())
}

fn put_answer_stats(report: &mut Report, answer: &QueryAnswer) {
    let s = &answer.stats;
    report.put("locations", s.locations);
    report.put("edges", s.edges);
    report.put("constants", s.constants);
    report.put("regions", s.regions);
    report.put("endpoint_indicators", s.endpoint_indicators);
    report.put("imdp_choices", s.imdp_choices);
    report.put("imdp_transitions", s.imdp_transitions);
    report.put("imc_states", s.imc_states);
    report.put("imc_transitions", s.imc_transitions);
}

fn wall(report: &mut Report, start: Instant) {
    report.put("wall_time_ms", format!("{:.3}", start.elapsed().as_secs_f64() * 1e3));
}

/// Runs the command line with `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_TRUE };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, err) {
        Ok((report, code)) => {
            let _ = write!(out, "{}", report.render());
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli, err: &mut dyn Write) -> Result<(Report, i32), Failure> {
    let start = Instant::now();
    match &cli.command {
        Command::Validate { input } => {
            let model = load_model(input)?;
            let result = validate(&model);
            let mut report = Report::new(cli.format, "validate");
            report.put("valid", result.ok());
            for v in &result.violations {
                report.put("violation", v);
            }
            Ok((report, if result.ok() { EXIT_TRUE } else { EXIT_INVALID }))
        }
        Command::Compile { input, emit, dot } => {
            let model = load_valid_model(input)?;
            let imdp = build_imdp(&model)?;
            let (text, graph) = match emit {
                Emit::Imdp => (imdp_to_text(&imdp), imdp_to_dot(&imdp, &model)),
                Emit::Imc => {
                    let imc = reduce_to_imc(&imdp);
                    (imc_to_text(&imc), imc_to_dot(&imc))
                }
            };
            if let Some(path) = dot {
                std::fs::write(path, graph)
                    .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok((Report::raw(text), EXIT_TRUE))
        }
        Command::Solve {
            input,
            target,
            mode,
            threshold,
            epsilon,
        } => {
            if !(*epsilon > 0.0) {
                return Err(Failure::invalid("epsilon must be positive"));
            }
            let threshold: Option<Threshold> = threshold.as_deref().map(str::parse).transpose()?;
            let mode: Mode = (*mode).into();
            let text = read(input)?;
            let mut report = Report::new(cli.format, "solve");
            report.put("mode", mode);
            report.put("targets", target.join(","));
            let (value, holds, undecided) = if text.trim_start().starts_with("format cdpta-imc") {
                let imc = imc_from_text(&text)?;
                let targets = label_targets(&imc, target);
                let result = solve_quant(&imc, &targets, &SolveConfig::new(mode).with_epsilon(*epsilon))?;
                let value = result.values[imc.initial()];
                report.put("imc_states", imc.num_states());
                report.put("imc_transitions", imc.num_transitions());
                report.put("iterations", result.iterations);
                report.put("converged", result.converged);
                let verdict = threshold.as_ref().map(|t| decide_threshold(value, t, *epsilon));
                (value, verdict.map(|v| v.0), verdict.map(|v| v.1).unwrap_or(false))
            } else {
                let model = parse(&text).map_err(|errors| {
                    Failure::invalid(format!("{}: parse errors\n{}", input.display(), format_errors(&text, &errors).trim_end()))
                })?;
                let query = Query::Quant {
                    mode,
                    threshold: threshold.clone(),
                };
                let answer = solve_query(&model, target, &query, *epsilon)?;
                put_answer_stats(&mut report, &answer);
                report.put("iterations", answer.stats.iterations);
                report.put("converged", answer.stats.converged);
                (answer.value.expect("quantitative"), answer.holds, answer.undecided)
            };
            report.put("value", format!("{value:.9}"));
            report.put("value_rational", rational_of(value));
            let mut code = EXIT_TRUE;
            if let (Some(t), Some(h)) = (&threshold, holds) {
                report.put("threshold", t);
                report.put("verdict", h);
                report.put("undecided", undecided);
                if undecided {
                    let _ = writeln!(
                        err,
                        "UNDECIDED: value {value:.12} is within {} of the threshold {t}",
                        10.0 * epsilon
                    );
                }
                code = if h { EXIT_TRUE } else { EXIT_FALSE };
            }
            wall(&mut report, start);
            Ok((report, code))
        }
        Command::Qual { input, target, mode } => {
            let mode: QualMode = (*mode).into();
            let text = read(input)?;
            let mut report = Report::new(cli.format, "qual");
            report.put("mode", mode);
            report.put("targets", target.join(","));
            let holds = if text.trim_start().starts_with("format cdpta-imc") {
                let imc = imc_from_text(&text)?;
                let targets = label_targets(&imc, target);
                solve_qual(&imc, &targets, mode)?.holds_at(imc.initial())
            } else {
                let model = parse(&text).map_err(|errors| {
                    Failure::invalid(format!("{}: parse errors\n{}", input.display(), format_errors(&text, &errors).trim_end()))
                })?;
                let answer = solve_query(&model, target, &Query::Qual(mode), 1e-9)?;
                put_answer_stats(&mut report, &answer);
                answer.holds.expect("qualitative")
            };
            report.put("verdict", holds);
            wall(&mut report, start);
            Ok((report, if holds { EXIT_TRUE } else { EXIT_FALSE }))
        }
        Command::Oracle {
            input,
            target,
            mode,
            k,
            epsilon,
            scheduler,
            horizon,
        } => {
            let model = load_valid_model(input)?;
            if let Some(t) = target.iter().find(|t| model.invariant(t).is_none()) {
                return Err(Failure::invalid(format!("unknown target location `{t}`")));
            }
            let mut report = Report::new(cli.format, "oracle");
            report.put("targets", target.join(","));
            if let Some(path) = scheduler {
                let sched = TableScheduler::from_text(&read(path)?)?;
                let value: Rational = match sched.kind() {
                    SchedulerKind::Cdpta => bounded_reach_cdpta(&model, &sched, *horizon, target)?,
                    SchedulerKind::Imdp => {
                        let imdp = build_imdp(&model)?;
                        let targets = region_targets(&imdp, target.iter().map(String::as_str));
                        bounded_reach_imdp(&imdp, &sched, *horizon, &targets)?
                    }
                };
                report.put("horizon", horizon);
                report.put("value", format!("{:.9}", crate::rational::to_f64(&value)));
                report.put("value_rational", fmt_rational(&value));
            } else {
                let mode: Mode = (*mode).into();
                let level = DiscretizationLevel::new(*k)?;
                let mdp = discretize(&model, level)?;
                let targets: Vec<usize> = (0..mdp.num_states())
                    .filter(|&i| target.contains(&mdp.states()[i].location))
                    .collect();
                let cfg = SolveConfig::new(mode).with_epsilon(*epsilon);
                let result = mdp_reach(&mdp, &targets, &cfg)?;
                let value = result.values[mdp.initial()];
                report.put("mode", mode);
                report.put("k", k);
                report.put("states", mdp.num_states());
                report.put("rows", mdp.num_rows());
                report.put("iterations", result.iterations);
                report.put("converged", result.converged);
                report.put("value", format!("{value:.9}"));
                report.put("value_rational", rational_of(value));
            }
            wall(&mut report, start);
            Ok((report, EXIT_TRUE))
        }
    }
}
