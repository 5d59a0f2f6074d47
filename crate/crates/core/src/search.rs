//! Graph families, scans over them, and an edge-flip hill climb that hunts
//! for small margins.
//!
//! Random graphs come from ChaCha8 (`rand_chacha`), seeded through
//! `SeedableRng::seed_from_u64`. Pairs are visited in lexicographic order
//! and pair `{r, s}` is included iff the next 64-bit output `u` satisfies
//! `(u >> 11) * 2^-53 < p`. Member `i` of a random family uses ChaCha
//! stream `i` of the family seed, so members can be generated in any order.
//!
//! Scans and restarts run on a rayon pool whose size is read from the
//! `SQLAP_WORKERS` environment variable, defaulting to the available
//! parallelism.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::format::serialize_sig12;
use crate::graph::{vertex_pairs, Graph, GraphError};
use crate::io::write_graph6;
use crate::theorem::{Check, CheckReport, TheoremError, EPSILON};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "SQLAP_WORKERS";

/// Largest order accepted for exhaustive labeled enumeration.
pub const MAX_EXHAUSTIVE_ORDER: usize = 8;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error(
        "exhaustive enumeration needs 2 <= n <= {MAX_EXHAUSTIVE_ORDER}; n = {n} would mean 2^{pairs} labeled graphs"
    )]
    OrderOutOfRange { n: usize, pairs: usize },
    #[error("edge probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("nothing to scan: the graph source is empty")]
    EmptySource,
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Theorem(#[from] TheoremError),
}

/// The shared worker pool.
pub fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let workers = std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&w| w > 0)
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("failed to start the worker pool")
    })
}

/// Every labeled graph on `n` vertices. Bit `k` of the edge mask stands
/// for the `k`-th pair in lexicographic order; masks ascend from 0.
#[derive(Debug, Clone)]
pub struct AllGraphs {
    n: usize,
    pairs: Vec<(usize, usize)>,
    next: u64,
    end: u64,
}

pub fn all_graphs(n: usize) -> Result<AllGraphs, SearchError> {
    let pairs: Vec<_> = vertex_pairs(n).collect();
    if !(2..=MAX_EXHAUSTIVE_ORDER).contains(&n) {
        return Err(SearchError::OrderOutOfRange {
            n,
            pairs: pairs.len(),
        });
    }
    let end = 1u64 << pairs.len();
    Ok(AllGraphs {
        n,
        pairs,
        next: 0,
        end,
    })
}

impl AllGraphs {
    /// `2^(n(n-1)/2)`.
    pub fn total(&self) -> u64 {
        self.end
    }

    pub fn graph(&self, mask: u64) -> Graph {
        let mut g = Graph::empty(self.n).expect("order checked");
        for (k, &(r, s)) in self.pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                g.insert_edge(r, s).expect("pairs are distinct");
            }
        }
        g
    }
}

impl Iterator for AllGraphs {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        if self.next == self.end {
            return None;
        }
        let g = self.graph(self.next);
        self.next += 1;
        Some(g)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for AllGraphs {}

fn unit_interval(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn gnp_from(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<Graph, SearchError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SearchError::InvalidProbability(p));
    }
    let mut g = Graph::empty(n)?;
    for (r, s) in vertex_pairs(n) {
        if unit_interval(rng) < p {
            g.insert_edge(r, s).expect("pairs are distinct");
        }
    }
    Ok(g)
}

/// An Erdős–Rényi graph `G(n, p)`; identical arguments give identical graphs.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph, SearchError> {
    gnp_from(n, p, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A seeded family of random graphs. Member `i` has order
/// `n_min + i mod (n_max − n_min + 1)` and edge probability
/// `p_values[(i / span) mod len]`, so consecutive members cycle through
/// every order before moving to the next probability.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomFamily {
    pub n_min: usize,
    pub n_max: usize,
    pub p_values: Vec<f64>,
    pub count: u64,
    pub seed: u64,
}

impl RandomFamily {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.n_min < 1 || self.n_max < self.n_min {
            return Err(SearchError::InvalidConfig(format!(
                "order range {}..={} is empty",
                self.n_min, self.n_max
            )));
        }
        Graph::empty(self.n_max)?;
        if self.p_values.is_empty() {
            return Err(SearchError::InvalidConfig("no edge probabilities given".into()));
        }
        if let Some(&p) = self.p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(SearchError::InvalidProbability(p));
        }
        Ok(())
    }

    pub fn member(&self, index: u64) -> Result<Graph, SearchError> {
        let span = (self.n_max - self.n_min + 1) as u64;
        let n = self.n_min + (index % span) as usize;
        let p = self.p_values[((index / span) % self.p_values.len() as u64) as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        gnp_from(n, p, &mut rng)
    }

    pub fn iter(&self) -> Result<impl Iterator<Item = Graph> + '_, SearchError> {
        self.validate()?;
        Ok((0..self.count).map(|i| self.member(i).expect("family validated")))
    }

    pub fn descriptor(&self) -> String {
        let ps: Vec<String> = self.p_values.iter().map(|p| p.to_string()).collect();
        format!(
            "gnp n={}..={} p={} count={} seed={}",
            self.n_min,
            self.n_max,
            ps.join(","),
            self.count,
            self.seed
        )
    }
}

/// Running minimum of one check over a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckStats {
    #[serde(serialize_with = "serialize_sig12")]
    pub min_margin: f64,
    pub argmin_graph6: String,
    pub equality_count: u64,
}

impl CheckStats {
    fn merge(&mut self, other: &CheckStats) {
        if other.beats(self) {
            self.min_margin = other.min_margin;
            self.argmin_graph6.clone_from(&other.argmin_graph6);
        }
        self.equality_count += other.equality_count;
    }

    /// Smaller margin wins; ties go to the smaller graph6 string.
    fn beats(&self, other: &CheckStats) -> bool {
        match self.min_margin.total_cmp(&other.min_margin) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self.argmin_graph6 < other.argmin_graph6,
        }
    }
}

/// A margin below `-tolerance`: a counterexample candidate.
#[derive(Debug, Clone, PartialEq, PartialOrd, Serialize)]
pub struct Violation {
    pub graph6: String,
    pub check: Check,
    #[serde(serialize_with = "serialize_sig12")]
    pub margin: f64,
}

/// Mergeable aggregate of check reports.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanAccumulator {
    pub graphs: u64,
    pub checks: BTreeMap<Check, CheckStats>,
    pub violations: Vec<Violation>,
}

impl ScanAccumulator {
    pub fn add(&mut self, report: &CheckReport, tolerance: f64) {
        self.graphs += 1;
        for check in Check::ALL {
            let Some(margin) = report.margin(check) else {
                continue;
            };
            let single = CheckStats {
                min_margin: margin,
                argmin_graph6: report.graph6.clone(),
                equality_count: (margin.abs() <= tolerance) as u64,
            };
            self.checks
                .entry(check)
                .and_modify(|s| s.merge(&single))
                .or_insert(single);
            if margin.is_nan() || margin < -tolerance {
                self.violations.push(Violation {
                    graph6: report.graph6.clone(),
                    check,
                    margin,
                });
            }
        }
    }

    /// Combines two partial aggregates. The result does not depend on how
    /// the graphs were split between them or in which order they merge.
    pub fn merge(mut self, other: ScanAccumulator) -> ScanAccumulator {
        self.graphs += other.graphs;
        for (check, stats) in other.checks {
            self.checks
                .entry(check)
                .and_modify(|s| s.merge(&stats))
                .or_insert(stats);
        }
        self.violations.extend(other.violations);
        self.violations.sort_by(|a, b| {
            (&a.graph6, a.check)
                .cmp(&(&b.graph6, b.check))
                .then(a.margin.total_cmp(&b.margin))
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub family_descriptor: String,
    pub graphs_scanned: u64,
    pub checks: BTreeMap<Check, CheckStats>,
    pub violations: Vec<Violation>,
    /// Seconds.
    #[serde(serialize_with = "serialize_sig12")]
    pub wall_time: f64,
}

impl ScanSummary {
    pub fn stats(&self, check: Check) -> Option<&CheckStats> {
        self.checks.get(&check)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub checks: Vec<Check>,
    pub tolerance: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            checks: Check::ALL.to_vec(),
            tolerance: EPSILON,
        }
    }
}

/// Evaluates every graph of `source` and aggregates the margins.
///
/// Graphs are pulled in chunks and evaluated on the worker pool; `sink`
/// sees every report in source order.
pub fn scan<I>(
    descriptor: &str,
    source: I,
    options: &ScanOptions,
    mut sink: Option<&mut dyn FnMut(&CheckReport)>,
) -> Result<ScanSummary, SearchError>
where
    I: IntoIterator<Item = Graph>,
{
    let start = Instant::now();
    let mut source = source.into_iter();
    let mut acc = ScanAccumulator::default();
    let mut chunk = Vec::with_capacity(CHUNK);
    loop {
        chunk.clear();
        chunk.extend(source.by_ref().take(CHUNK));
        if chunk.is_empty() {
            break;
        }
        let reports: Vec<CheckReport> = pool().install(|| {
            chunk
                .par_iter()
                .map(|g| CheckReport::evaluate_checks(g, &options.checks, options.tolerance))
                .collect::<Result<_, _>>()
        })?;
        let mut part = ScanAccumulator::default();
        for report in &reports {
            part.add(report, options.tolerance);
            if let Some(sink) = sink.as_mut() {
                sink(report);
            }
        }
        acc = acc.merge(part);
    }
    if acc.graphs == 0 {
        return Err(SearchError::EmptySource);
    }
    Ok(ScanSummary {
        family_descriptor: descriptor.to_string(),
        graphs_scanned: acc.graphs,
        checks: acc.checks,
        violations: acc.violations,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    pub objective: Check,
    pub n: usize,
    pub steps: usize,
    pub seed: u64,
    pub restarts: usize,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.n < 2 {
            return Err(SearchError::InvalidConfig(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        Graph::empty(self.n)?;
        if self.restarts < 1 {
            return Err(SearchError::InvalidConfig("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub config: SearchConfig,
    #[serde(serialize_with = "serialize_sig12")]
    pub best_margin: f64,
    pub witness: String,
    /// Accepted flips on the restart that produced the witness.
    pub trajectory_length: usize,
    pub best_restart: usize,
    pub violations: Vec<Violation>,
}

struct Climb {
    margin: f64,
    graph6: String,
    accepted: usize,
    violations: Vec<Violation>,
}

/// Starting graph for restart `r`: `G(n, 1/2)` seeded with `seed + r`.
pub fn restart_start(config: &SearchConfig, restart: usize) -> Result<Graph, SearchError> {
    gnp(config.n, 0.5, config.seed.wrapping_add(restart as u64))
}

fn climb(config: &SearchConfig, restart: usize) -> Result<Climb, SearchError> {
    let mut violations = Vec::new();
    let mut evaluate = |g: &Graph| -> Result<f64, SearchError> {
        let m = config.objective.margin(g)?;
        if m.is_nan() || m < -EPSILON {
            violations.push(Violation {
                graph6: write_graph6(g).expect("order is small"),
                check: config.objective,
                margin: m,
            });
        }
        Ok(m)
    };

    let mut current = restart_start(config, restart)?;
    let mut margin = evaluate(&current)?;
    let pairs: Vec<_> = vertex_pairs(config.n).collect();
    let mut accepted = 0;
    'steps: while accepted < config.steps {
        for &(r, s) in &pairs {
            let candidate = current.flipped(r, s);
            let m = evaluate(&candidate)?;
            if m < margin {
                current = candidate;
                margin = m;
                accepted += 1;
                continue 'steps;
            }
        }
        break;
    }
    Ok(Climb {
        margin,
        graph6: write_graph6(&current).expect("order is small"),
        accepted,
        violations,
    })
}

/// First-improvement hill climb over single-edge flips, minimizing the
/// objective margin, from `config.restarts` random starts.
pub fn extremal_search(config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    config.validate()?;
    let climbs: Vec<Climb> = pool().install(|| {
        (0..config.restarts)
            .into_par_iter()
            .map(|r| climb(config, r))
            .collect::<Result<_, _>>()
    })?;

    let (best_restart, best) = climbs
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            a.margin
                .total_cmp(&b.margin)
                .then_with(|| a.graph6.cmp(&b.graph6))
        })
        .expect("at least one restart");
    let mut violations: Vec<Violation> = climbs.iter().flat_map(|c| c.violations.iter().cloned()).collect();
    violations.sort_by(|a, b| a.graph6.cmp(&b.graph6).then(a.margin.total_cmp(&b.margin)));
    violations.dedup();
    Ok(SearchOutcome {
        config: config.clone(),
        best_margin: best.margin,
        witness: best.graph6.clone(),
        trajectory_length: best.accepted,
        best_restart,
        violations,
    })
}
