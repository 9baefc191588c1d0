//! Counting pipeline: per-run choice accounting, an assembled
//! lower bound on the number of labeled k-regular graphs of girth >= g,
//! and an exact backtracking enumerator for tiny instances.
//!
//! A saturated run makes `sum_t ln |A_t|` worth of choices after the
//! `n!/(2n)` Hamilton cycles; dividing out at most `((k-2)n/2)!` chord
//! orderings and at most `k^n` Hamilton cycles per output turns the
//! product into a lower bound on the number of distinct outputs, hence
//! on the census itself.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{BfsScratch, Graph};
use crate::process::{count_available, ProcessState, RunRecord};

#[derive(Debug, Error, PartialEq)]
pub enum CensusError {
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("kn must be even, got n={n}, k={k}")]
    OddDegreeSum { n: usize, k: usize },
    #[error("no successful runs to assemble a bound from")]
    NoSuccesses,
    #[error("success rate must lie in (0, 1], got {0}")]
    BadSuccessRate(f64),
}

/// `ln(x!)` by direct log summation; exact enough for bound assembly.
pub fn ln_factorial(x: u64) -> f64 {
    (2..=x).map(|i| (i as f64).ln()).sum()
}

/// Choice accounting of one run, assembled into a log-scale bound.
#[derive(Debug, Clone)]
pub struct CountEstimate {
    pub n: usize,
    pub k: usize,
    /// `ln(n!/(2n))` ways to pick the start cycle.
    pub log_hamilton: f64,
    /// Per-level `sum_t ln |A_t|`, in run order.
    pub level_log_choices: Vec<f64>,
    /// `ln(((k-2)n/2)!)`: over-counting from chord insertion orders.
    pub correction_orderings: f64,
    /// `n ln k`: an output has fewer than `k^n` Hamilton cycles (zero
    /// for k = 2, where the output is its own unique cycle).
    pub correction_hamilton_multiplicity: f64,
    /// `log_hamilton + sum(levels) - corrections`.
    pub total: f64,
}

impl CountEstimate {
    pub fn new(n: usize, k: usize, level_log_choices: Vec<f64>) -> Self {
        let log_hamilton = ln_factorial(n as u64) - (2.0 * n as f64).ln();
        let chords = (k.saturating_sub(2) * n / 2) as u64;
        let correction_orderings = ln_factorial(chords);
        let correction_hamilton_multiplicity = if k == 2 {
            0.0
        } else {
            n as f64 * (k as f64).ln()
        };
        let total = log_hamilton + level_log_choices.iter().sum::<f64>()
            - correction_orderings
            - correction_hamilton_multiplicity;
        CountEstimate {
            n,
            k,
            log_hamilton,
            level_log_choices,
            correction_orderings,
            correction_hamilton_multiplicity,
            total,
        }
    }

    pub fn from_record(record: &RunRecord) -> Self {
        Self::new(
            record.n,
            record.k,
            record.levels.iter().map(|l| l.log_choice_sum).collect(),
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AssembledBound {
    pub log_lower_bound: f64,
    pub log10_lower_bound: f64,
    pub success_rate: f64,
    pub sample_count: usize,
    /// `(kn/2) ln n`, the growth scale the bound is compared against.
    pub reference_scale: f64,
}

/// Combines per-seed estimates: mean log-choice total plus
/// `ln(success_rate)`.
pub fn assemble_lower_bound(
    estimates: &[CountEstimate],
    success_rate: f64,
) -> Result<AssembledBound, CensusError> {
    if estimates.is_empty() {
        return Err(CensusError::NoSuccesses);
    }
    if !(success_rate > 0.0 && success_rate <= 1.0) {
        return Err(CensusError::BadSuccessRate(success_rate));
    }
    let mean = estimates.iter().map(|e| e.total).sum::<f64>() / estimates.len() as f64;
    let log_lower_bound = mean + success_rate.ln();
    let n = estimates[0].n as f64;
    let k = estimates[0].k as f64;
    Ok(AssembledBound {
        log_lower_bound,
        log10_lower_bound: log_lower_bound / std::f64::consts::LN_10,
        success_rate,
        sample_count: estimates.len(),
        reference_scale: k * n / 2.0 * n.ln(),
    })
}

/// Recomputes exact per-level `sum_t ln |A_t|` from a logged chord
/// sequence, replaying the insertions on a fresh start cycle.
pub fn replay_log_choices(
    n: usize,
    k: usize,
    g: u32,
    chords: &[(u32, u32)],
) -> Result<Vec<f64>, crate::process::ProcessError> {
    let graph = Graph::hamilton_cycle(n, k)?;
    let mut state = ProcessState::from_graph(graph, k, g);
    let mut scratch = BfsScratch::new();
    let mut sums: Vec<f64> = Vec::new();
    for &(u, v) in chords {
        let level = state.completed_levels().len();
        if sums.len() <= level {
            sums.resize(level + 1, 0.0);
        }
        sums[level] += (count_available(&state, &mut scratch) as f64).ln();
        state.apply_pair(u as usize, v as usize);
    }
    Ok(sums)
}

/// Exact number of labeled k-regular graphs on n vertices with girth at
/// least g, by lexicographic backtracking: each partial edge set adds
/// its next edge at the smallest unsaturated vertex, pruning on degree
/// feasibility and on any pair closer than g-1 (which would close a
/// short cycle). Top-level branches run in parallel.
pub fn brute_force_census(n: usize, k: usize, g: u32, budget: u64) -> Result<u64, CensusError> {
    if n * k % 2 != 0 {
        return Err(CensusError::OddDegreeSum { n, k });
    }
    if n == 0 {
        return Ok(1);
    }
    if k == 0 {
        return Ok(1);
    }
    if k >= n {
        return Ok(0);
    }
    let visited = AtomicU64::new(0);
    // Vertex 0 is the smallest unsaturated vertex of the empty graph, so
    // its first edge (0, v) splits the search.
    let results: Result<Vec<u64>, CensusError> = (1..n)
        .into_par_iter()
        .map(|v| {
            let mut graph = Graph::empty(n, k);
            graph.add_edge(0, v).expect("first edge");
            let mut scratch = BfsScratch::new();
            let mut count = 0u64;
            search(
                &mut graph,
                (0, v),
                k,
                g,
                &mut scratch,
                &visited,
                budget,
                &mut |_| count += 1,
            )?;
            Ok(count)
        })
        .collect();
    Ok(results?.iter().sum())
}

/// Same search, sequentially, collecting each census member's sorted
/// edge list. Only sensible at sizes where the census fits in memory.
pub fn enumerate_labeled(
    n: usize,
    k: usize,
    g: u32,
    budget: u64,
) -> Result<Vec<Vec<(u32, u32)>>, CensusError> {
    if n * k % 2 != 0 {
        return Err(CensusError::OddDegreeSum { n, k });
    }
    let mut out = Vec::new();
    if n == 0 || k == 0 {
        out.push(Vec::new());
        return Ok(out);
    }
    if k >= n {
        return Ok(out);
    }
    let visited = AtomicU64::new(0);
    let mut scratch = BfsScratch::new();
    for v in 1..n {
        let mut graph = Graph::empty(n, k);
        graph.add_edge(0, v).expect("first edge");
        search(
            &mut graph,
            (0, v),
            k,
            g,
            &mut scratch,
            &visited,
            budget,
            &mut |g: &Graph| out.push(g.edges_sorted()),
        )?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    graph: &mut Graph,
    last: (usize, usize),
    k: usize,
    g: u32,
    scratch: &mut BfsScratch,
    visited: &AtomicU64,
    budget: u64,
    emit: &mut dyn FnMut(&Graph),
) -> Result<(), CensusError> {
    if visited.fetch_add(1, Ordering::Relaxed) >= budget {
        return Err(CensusError::BudgetExceeded(budget));
    }
    let n = graph.n();
    // Smallest unsaturated vertex must receive the next edge; a smaller
    // one than the last edge's head can never be completed.
    let mut u_star = None;
    for v in 0..n {
        if graph.degree(v) < k {
            u_star = Some(v);
            break;
        }
    }
    let u = match u_star {
        None => {
            emit(graph);
            return Ok(());
        }
        Some(u) => u,
    };
    if u < last.0 {
        return Ok(());
    }
    let from = if u == last.0 { last.1 + 1 } else { u + 1 };
    for v in from..n {
        if graph.degree(v) >= k || graph.has_edge(u, v) {
            continue;
        }
        if g > 3 {
            let far = graph
                .truncated_distance(scratch, u, v, g - 1)
                .expect("vertices in range")
                .is_at_least(g - 1);
            if !far {
                continue;
            }
        }
        graph.add_edge(u, v).expect("candidate admissible");
        search(graph, (u, v), k, g, scratch, visited, budget, emit)?;
        graph.pop_edge(u, v);
    }
    Ok(())
}
