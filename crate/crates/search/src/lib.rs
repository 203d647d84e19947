//! Computes `f_n(r, k, b)`: the largest number of `r`-subsets of `[n]` that
//! each contain at least `k` members of a family `B` of `b` sets of size
//! `r−1`, also drawn from `[n]`.
//!
//! Search strategies implement [`SearchStrategy`] and are looked up by name
//! in a [`StrategyRegistry`]. Two are registered by default:
//!
//! * `exhaustive`: branch and bound with isomorph rejection. Its certificate
//!   is marked `exhausted` when the whole space was covered within budget.
//! * `heuristic`: local search from the shifted-colex construction.
//!
//! Every result is a [`SearchCertificate`] that [`verify_certificate`] can
//! re-check from the witness family alone.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub mod certificate;
pub mod checkpoint;
pub mod error;
pub mod exhaustive;
pub mod heuristic;
pub mod problem;

pub use certificate::{count_covered, verify_certificate, SearchCertificate, Verification};
pub use error::SearchError;
pub use problem::SearchProblem;

/// Node budget used when none is given.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Search nodes (exhaustive) or swap evaluations (heuristic).
    pub budget: u64,
    /// Worker threads; 0 uses all cores. With 1 thread, node counts are
    /// reproducible.
    pub threads: usize,
    pub seed: u64,
    pub checkpoint: Option<PathBuf>,
    pub resume: bool,
    /// Report every optimal family up to isomorphism (exhaustive only).
    pub collect_optima: bool,
    /// Record wall time in the certificate.
    pub timing: bool,
    /// Levels expanded before work is split into independent subtrees.
    pub frontier_depth: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            budget: DEFAULT_BUDGET,
            threads: 1,
            seed: 0,
            checkpoint: None,
            resume: false,
            collect_optima: false,
            timing: false,
            frontier_depth: 3,
        }
    }
}

pub trait SearchStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn solve(&self, problem: &SearchProblem, opts: &SolveOptions) -> Result<SearchCertificate, SearchError>;
}

#[derive(Default)]
pub struct StrategyRegistry {
    strategies: BTreeMap<&'static str, Box<dyn SearchStrategy>>,
}

impl StrategyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_defaults() -> Self {
        let mut reg = Self::new();
        reg.register(Box::new(exhaustive::ExhaustiveStrategy));
        reg.register(Box::new(heuristic::HeuristicStrategy));
        reg
    }

    /// Adds a strategy, replacing any previous one with the same name.
    pub fn register(&mut self, strategy: Box<dyn SearchStrategy>) {
        self.strategies.insert(strategy.name(), strategy);
    }

    pub fn get(&self, name: &str) -> Result<&dyn SearchStrategy, SearchError> {
        self.strategies.get(name).map(|s| s.as_ref()).ok_or_else(|| SearchError::UnknownStrategy {
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.keys().copied().collect()
    }

    pub fn solve(
        &self,
        mode: &str,
        problem: &SearchProblem,
        opts: &SolveOptions,
    ) -> Result<SearchCertificate, SearchError> {
        problem.validate()?;
        self.get(mode)?.solve(problem, opts)
    }
}

/// Validates the parameters and runs the named strategy from the default
/// registry.
pub fn solve_max_a(
    r: usize,
    k: usize,
    b: usize,
    n: usize,
    mode: &str,
    opts: &SolveOptions,
) -> Result<SearchCertificate, SearchError> {
    let problem = SearchProblem::new(r, k, b, n)?;
    StrategyRegistry::with_defaults().solve(mode, &problem, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SearchCertificate>,
    /// Why no search ran for this `n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub r: usize,
    pub k: usize,
    pub b: usize,
    pub rows: Vec<SweepRow>,
    /// The value at the largest feasible `n`.
    pub stable_value: Option<u64>,
    /// Smallest `n` from which every feasible row reports `stable_value`.
    pub stable_from: Option<usize>,
    /// All rows from `stable_from` on were searched to exhaustion.
    pub stabilized: bool,
    /// `achieved_a` never decreases as `n` grows.
    pub monotone: bool,
}

/// Runs one search per ground-set size and reports where the value settles.
/// Sizes for which the problem is infeasible (`b > binom(n, r−1)` or
/// `n < r`) are listed as skipped.
pub fn sweep_n(
    r: usize,
    k: usize,
    b: usize,
    ns: RangeInclusive<usize>,
    mode: &str,
    opts: &SolveOptions,
    registry: &StrategyRegistry,
) -> Result<SweepReport, SearchError> {
    let strategy = registry.get(mode)?;
    let mut rows = Vec::new();
    for n in ns {
        let problem = SearchProblem { r, k, b, n };
        match problem.validate() {
            Err(SearchError::InvalidProblem(why)) if k >= 1 && k <= r && r >= 2 => {
                rows.push(SweepRow { n, certificate: None, skipped: Some(why) })
            }
            Err(e) => return Err(e),
            Ok(()) => {
                let opts = SolveOptions { checkpoint: None, resume: false, ..opts.clone() };
                rows.push(SweepRow { n, certificate: Some(strategy.solve(&problem, &opts)?), skipped: None });
            }
        }
    }
    let feasible: Vec<&SearchCertificate> = rows.iter().filter_map(|r| r.certificate.as_ref()).collect();
    let stable_value = feasible.last().map(|c| c.achieved_a);
    let stable_from = stable_value.map(|v| {
        let tail = feasible.iter().rev().take_while(|c| c.achieved_a == v).count();
        feasible[feasible.len() - tail].n
    });
    let stabilized = stable_from.is_some_and(|from| feasible.iter().filter(|c| c.n >= from).all(|c| c.exhausted));
    let monotone = feasible.windows(2).all(|w| w[0].achieved_a <= w[1].achieved_a);
    Ok(SweepReport { r, k, b, rows, stable_value, stable_from, stabilized, monotone })
}
