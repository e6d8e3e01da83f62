//! Reachability on interval chains and interval MDPs under the cooperative
//! semantics, and the end-to-end query pipeline for models.
//!
//! Quantitative values are computed on the closed system: closing the rows
//! does not change the supremum or infimum, and on closed rows the optimum is
//! attained, so the qualitative "almost surely" fixpoint of the closed system
//! identifies exactly the states of value one. Qualitative questions are
//! answered on the original rows, where openness matters.

mod inner;
mod qual;
mod quant;
mod query;

use std::collections::BTreeSet;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

pub use inner::extremal_value;
pub use query::{decide_threshold, solve_query, Comparison, Query, QueryAnswer, QueryStats, Threshold};

use crate::error::{Error, Result};
use crate::imc::Imc;
use crate::imdp::Imdp;
use qual::System;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Max,
    Min,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Mode::Max),
            "min" => Ok(Mode::Min),
            _ => Err(Error::Format(format!("unknown mode `{s}` (expected max or min)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Max => "max",
            Mode::Min => "min",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig {
    pub epsilon: f64,
    pub max_iterations: usize,
    pub mode: Mode,
}

impl SolveConfig {
    pub fn new(mode: Mode) -> Self {
        SolveConfig {
            epsilon: 1e-9,
            max_iterations: 1_000_000,
            mode,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        assert!(epsilon > 0.0, "epsilon must be positive");
        self.epsilon = epsilon;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantResult {
    /// Indexed by state.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub exact_zero: BTreeSet<usize>,
    pub exact_one: BTreeSet<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QualMode {
    Forall0,
    Exists0,
    Exists1,
    Forall1,
}

impl QualMode {
    pub const ALL: [QualMode; 4] = [QualMode::Forall0, QualMode::Exists0, QualMode::Exists1, QualMode::Forall1];
}

impl FromStr for QualMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "forall0" => Ok(QualMode::Forall0),
            "exists0" => Ok(QualMode::Exists0),
            "exists1" => Ok(QualMode::Exists1),
            "forall1" => Ok(QualMode::Forall1),
            _ => Err(Error::Format(format!(
                "unknown qualitative mode `{s}` (expected forall0, exists0, exists1 or forall1)"
            ))),
        }
    }
}

impl fmt::Display for QualMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QualMode::Forall0 => "forall0",
            QualMode::Exists0 => "exists0",
            QualMode::Exists1 => "exists1",
            QualMode::Forall1 => "forall1",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QualResult {
    pub mode: QualMode,
    pub holds: BTreeSet<usize>,
}

impl QualResult {
    pub fn holds_at(&self, state: usize) -> bool {
        self.holds.contains(&state)
    }
}

fn target_flags(n: usize, targets: &[usize]) -> Result<Vec<bool>> {
    let mut flags = vec![false; n];
    for &t in targets {
        if t >= n {
            return Err(Error::TargetUnknownState(t.to_string()));
        }
        flags[t] = true;
    }
    Ok(flags)
}

fn imc_system<S, A>(imc: &Imc<S, A>) -> System
where
    S: Clone + Eq + Hash,
    A: Clone,
{
    System {
        choices: imc.rows().iter().map(|r| vec![r.clone()]).collect(),
    }
}

fn imdp_system<S, A>(imdp: &Imdp<S, A>) -> System
where
    S: Clone + Eq + Hash,
    A: Clone,
{
    System {
        choices: (0..imdp.num_states()).map(|s| imdp.rows(s).to_vec()).collect(),
    }
}

fn qual_on(system: &System, target: &[bool], mode: QualMode) -> QualResult {
    let flags = match mode {
        QualMode::Forall0 => system.forall0(target),
        QualMode::Exists0 => system.exists0(target),
        QualMode::Exists1 => system.exists1(target),
        QualMode::Forall1 => system.forall1(target),
    };
    QualResult {
        mode,
        holds: (0..flags.len()).filter(|&s| flags[s]).collect(),
    }
}

/// Extremal reachability probabilities of `targets` on an interval chain.
pub fn solve_quant<S, A>(imc: &Imc<S, A>, targets: &[usize], cfg: &SolveConfig) -> Result<QuantResult>
where
    S: Clone + Eq + Hash,
    A: Clone,
{
    solve_quant_observed(imc, targets, cfg, |_, _| {})
}

/// As [`solve_quant`], calling `observe(iteration, values)` on every iterate.
pub fn solve_quant_observed<S, A>(
    imc: &Imc<S, A>,
    targets: &[usize],
    cfg: &SolveConfig,
    observe: impl FnMut(usize, &[f64]),
) -> Result<QuantResult>
where
    S: Clone + Eq + Hash,
    A: Clone,
{
    let target = target_flags(imc.num_states(), targets)?;
    Ok(quant::value_iteration(&imc_system(imc), &target, cfg, observe))
}

/// Qualitative reachability of `targets` on an interval chain.
pub fn solve_qual<S, A>(imc: &Imc<S, A>, targets: &[usize], mode: QualMode) -> Result<QualResult>
where
    S: Clone + Eq + Hash,
    A: Clone,
{
    let target = target_flags(imc.num_states(), targets)?;
    Ok(qual_on(&imc_system(imc), &target, mode))
}

/// Extremal reachability directly on an interval MDP, optimising over the
/// action and the assignment together.
pub fn solve_quant_imdp<S, A>(imdp: &Imdp<S, A>, targets: &[usize], cfg: &SolveConfig) -> Result<QuantResult>
where
    S: Clone + Eq + Hash,
    A: Clone,
{
    let target = target_flags(imdp.num_states(), targets)?;
    Ok(quant::value_iteration(&imdp_system(imdp), &target, cfg, |_, _| {}))
}

/// Qualitative reachability directly on an interval MDP.
pub fn solve_qual_imdp<S, A>(imdp: &Imdp<S, A>, targets: &[usize], mode: QualMode) -> Result<QualResult>
where
    S: Clone + Eq + Hash,
    A: Clone,
{
    let target = target_flags(imdp.num_states(), targets)?;
    Ok(qual_on(&imdp_system(imdp), &target, mode))
}
