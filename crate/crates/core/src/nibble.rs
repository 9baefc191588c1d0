//! Two-stage matching harness over a process snapshot.
//!
//! Stage one draws a binomial subgraph `H` of the admissible pairs:
//! every available pair enters independently with probability `p`.
//! Stage two reruns the greedy process from the snapshot but restricted
//! to `H`'s edges, tracking for chosen sample vertices the count
//! `N(v, s)` of their `H`-neighbors still unsaturated after `s` steps,
//! against the band `n(s) ± eps(s)` with `n(s) = n^beta p(s)`,
//! `eps(s) = n^(0.6 beta) / p(s)^8`, `p(s) = 1 - 2s/|W|`.
//!
//! This module is instrumentation: the production generator never
//! stages its run. Budgeted witness enumeration for threatened pairs
//! lives here too.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::graph::BfsScratch;
use crate::process::{count_available, enumerate_available, ProcessState};
use crate::rng::Rng;
use crate::schedule::Schedule;

#[derive(Debug, Error, PartialEq)]
pub enum NibbleError {
    #[error("witness enumeration budget of {0} states exceeded")]
    BudgetExceeded(u64),
    #[error("edge probability must lie in [0, 1], got {0}")]
    BadProbability(f64),
    #[error("admissible pair list too large to materialize ({0} pairs)")]
    TooManyPairs(u64),
}

/// Binomial subgraph of the admissible pairs of a snapshot.
#[derive(Debug, Clone)]
pub struct AvailabilitySample {
    pub p: f64,
    /// Normalized (min, max) pairs, sorted.
    pub edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
}

impl AvailabilitySample {
    fn from_edges(n: usize, p: f64, mut edges: Vec<(u32, u32)>) -> Self {
        edges.sort_unstable();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        AvailabilitySample { p, edges, adj }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }
}

const MATERIALIZE_LIMIT: u64 = 4_000_000;

/// Draws `H`: each admissible pair kept independently with probability
/// `p`. Small instances materialize the pair list and thin it by
/// geometric skips; large ones (where `p` is necessarily small) draw a
/// binomial edge count and then distinct uniform members by rejection,
/// never materializing the full list.
pub fn sample_h(
    state: &ProcessState,
    p: f64,
    rng: &mut Rng,
) -> Result<AvailabilitySample, NibbleError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(NibbleError::BadProbability(p));
    }
    let n = state.graph().n();
    let w = state.unsaturated_len() as u64;
    let mut scratch = BfsScratch::new();
    if p == 0.0 || w < 2 {
        return Ok(AvailabilitySample::from_edges(n, p, Vec::new()));
    }
    let pair_bound = w * (w - 1) / 2;
    if pair_bound <= MATERIALIZE_LIMIT {
        let all = enumerate_available(state, &mut scratch, MATERIALIZE_LIMIT)
            .map_err(|_| NibbleError::TooManyPairs(pair_bound))?;
        let kept = if p >= 1.0 {
            all
        } else {
            // Geometric skips through the list: equivalent to an
            // independent Bernoulli(p) per entry.
            let mut kept = Vec::new();
            let log_q = (1.0 - p).ln();
            let mut idx = 0usize;
            loop {
                let skip = (rng.f64_open().ln() / log_q).floor() as usize;
                idx = match idx.checked_add(skip) {
                    Some(i) => i,
                    None => break,
                };
                if idx >= all.len() {
                    break;
                }
                kept.push(all[idx]);
                idx += 1;
            }
            kept
        };
        return Ok(AvailabilitySample::from_edges(n, p, kept));
    }
    // Large-|W| path: p = n^beta / |W| is small here, so collisions are
    // rare. Draw the count, then distinct members.
    let total = count_available(state, &mut scratch);
    let m = rng.binomial(total, p);
    let mut chosen: HashSet<(u32, u32)> = HashSet::with_capacity(m as usize);
    let g = state.girth_target();
    let w_items = state.unsaturated();
    let mut attempts: u64 = 0;
    let attempt_limit = 1000 * m + 1_000_000;
    while (chosen.len() as u64) < m {
        attempts += 1;
        if attempts > attempt_limit {
            // Astronomically unlikely with a sane p; fail loudly rather
            // than loop.
            return Err(NibbleError::TooManyPairs(total));
        }
        let (i, j) = rng.index_pair(w_items.len());
        let (a, b) = (w_items[i], w_items[j]);
        let far = state
            .graph()
            .truncated_distance(&mut scratch, a as usize, b as usize, g - 1)
            .expect("vertices in range")
            .is_at_least(g - 1);
        if far {
            chosen.insert((a.min(b), a.max(b)));
        }
    }
    Ok(AvailabilitySample::from_edges(
        n,
        p,
        chosen.into_iter().collect(),
    ))
}

/// One observation of a tracked vertex.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryPoint {
    pub vertex: u32,
    pub s: usize,
    pub observed: u32,
    pub center: f64,
    pub radius: f64,
    pub violated: bool,
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub w_size: usize,
    pub beta: f64,
    pub n_beta: f64,
    pub target_steps: usize,
    pub steps_taken: usize,
    /// Step at which no admissible `H`-edge remained, if the inner
    /// process froze before reaching the target.
    pub inner_freeze: Option<usize>,
    /// First step at which any tracked vertex left its band.
    pub tau: Option<usize>,
    pub points: Vec<TrajectoryPoint>,
    pub max_abs_deviation: f64,
    /// Whether `|U_s| = |W| - 2s` held at every step (it must).
    pub unsat_identity_ok: bool,
}

/// Runs the greedy process from the snapshot using only `H`-edges:
/// each step joins a uniformly random `H`-edge whose endpoints are both
/// unsaturated and at distance >= g-1 in the evolving graph.
pub fn run_constrained_matching(
    state: &ProcessState,
    h: &AvailabilitySample,
    target_steps: usize,
    rng: &mut Rng,
    sample_vertices: &[u32],
    schedule: &Schedule,
) -> TrajectoryRecord {
    let w_size = state.unsaturated_len();
    debug_assert!(target_steps <= w_size / 2);
    let g = state.girth_target();
    let mut graph = state.graph().clone();
    let mut scratch = BfsScratch::new();
    let mut unsat = vec![false; graph.n()];
    for &v in state.unsaturated() {
        unsat[v as usize] = true;
    }
    // Candidate edges, lazily pruned: an entry dies permanently once an
    // endpoint saturates or the endpoints come closer than g-1
    // (distances only shrink).
    let mut alive: Vec<(u32, u32)> = h.edges.clone();
    // N(v, s) per tracked vertex, updated through a reverse index.
    let mut counts: Vec<u32> = sample_vertices
        .iter()
        .map(|&v| h.degree(v as usize) as u32)
        .collect();
    let mut touching: HashMap<u32, Vec<usize>> = HashMap::new();
    for (si, &v) in sample_vertices.iter().enumerate() {
        for &u in h.neighbors(v as usize) {
            touching.entry(u).or_default().push(si);
        }
    }
    let n_beta = schedule.n_beta();
    let band = |s: usize| -> (f64, f64) {
        let p_s = 1.0 - 2.0 * s as f64 / w_size as f64;
        let center = n_beta * p_s;
        let radius = (schedule.n as f64).powf(0.6 * schedule.beta) / p_s.powi(8);
        (center, radius)
    };
    let mut points = Vec::new();
    let mut tau = None;
    let mut max_dev: f64 = 0.0;
    let record = |points: &mut Vec<TrajectoryPoint>,
                      tau: &mut Option<usize>,
                      max_dev: &mut f64,
                      counts: &[u32],
                      s: usize| {
        let (center, radius) = band(s);
        for (si, &v) in sample_vertices.iter().enumerate() {
            let observed = counts[si];
            let dev = (observed as f64 - center).abs();
            let violated = dev > radius;
            if violated && tau.is_none() {
                *tau = Some(s);
            }
            if dev > *max_dev {
                *max_dev = dev;
            }
            points.push(TrajectoryPoint {
                vertex: v,
                s,
                observed,
                center,
                radius,
                violated,
            });
        }
    };
    record(&mut points, &mut tau, &mut max_dev, &counts, 0);

    let mut u_count = w_size;
    let mut steps = 0usize;
    let mut inner_freeze = None;
    let mut identity_ok = true;
    'outer: while steps < target_steps {
        let (a, b) = loop {
            if alive.is_empty() {
                inner_freeze = Some(steps);
                break 'outer;
            }
            let idx = rng.index(alive.len());
            let (a, b) = alive[idx];
            if !unsat[a as usize] || !unsat[b as usize] {
                alive.swap_remove(idx);
                continue;
            }
            let far = graph
                .truncated_distance(&mut scratch, a as usize, b as usize, g - 1)
                .expect("vertices in range")
                .is_at_least(g - 1);
            if !far {
                alive.swap_remove(idx);
                continue;
            }
            break (a, b);
        };
        graph.add_edge(a as usize, b as usize).expect("edge admissible");
        unsat[a as usize] = false;
        unsat[b as usize] = false;
        u_count -= 2;
        for &x in &[a, b] {
            if let Some(indices) = touching.get(&x) {
                for &si in indices {
                    counts[si] -= 1;
                }
            }
        }
        steps += 1;
        identity_ok &= u_count == w_size - 2 * steps;
        record(&mut points, &mut tau, &mut max_dev, &counts, steps);
    }
    TrajectoryRecord {
        w_size,
        beta: schedule.beta,
        n_beta,
        target_steps,
        steps_taken: steps,
        inner_freeze,
        tau,
        points,
        max_abs_deviation: max_dev,
        unsat_identity_ok: identity_ok,
    }
}

/// Exact threatened-pair counts for a snapshot and a fixed `H`.
///
/// A pair `u, v` of unsaturated vertices is counted for length `ell`
/// when some alternating witness exists: graph segments of positive
/// length between unsaturated vertices, glued by `H`-edges, with
/// (segments' total length) + (number of `H`-edges) equal to `ell`.
#[derive(Debug, Clone)]
pub struct ThreatenedPairs {
    pub ell: u32,
    pub total: u64,
    /// `(vertex, pairs containing it)`, ascending vertex order.
    pub per_vertex: Vec<(u32, u64)>,
}

pub fn threatened_pairs(
    state: &ProcessState,
    h: &AvailabilitySample,
    ell: u32,
    budget: u64,
) -> Result<ThreatenedPairs, NibbleError> {
    let mut w_sorted: Vec<u32> = state.unsaturated().to_vec();
    w_sorted.sort_unstable();
    let mut scratch = BfsScratch::new();
    let mut states = 0u64;
    let mut per_vertex = Vec::with_capacity(w_sorted.len());
    let mut reach = vec![false; state.graph().n()];
    let mut marked: Vec<u32> = Vec::new();
    for &u in &w_sorted {
        explore_witnesses(
            state,
            h,
            u as usize,
            0,
            ell,
            &mut scratch,
            &mut reach,
            &mut marked,
            &mut states,
            budget,
        )?;
        reach[u as usize] = false; // a pair needs two distinct vertices
        let count = marked.iter().filter(|&&v| reach[v as usize]).count() as u64;
        per_vertex.push((u, count));
        for &v in &marked {
            reach[v as usize] = false;
        }
        marked.clear();
    }
    let sum: u64 = per_vertex.iter().map(|&(_, c)| c).sum();
    debug_assert_eq!(sum % 2, 0, "witness reachability must be symmetric");
    Ok(ThreatenedPairs {
        ell,
        total: sum / 2,
        per_vertex,
    })
}

#[allow(clippy::too_many_arguments)]
fn explore_witnesses(
    state: &ProcessState,
    h: &AvailabilitySample,
    at: usize,
    used: u32,
    ell: u32,
    scratch: &mut BfsScratch,
    reach: &mut [bool],
    marked: &mut Vec<u32>,
    states: &mut u64,
    budget: u64,
) -> Result<(), NibbleError> {
    *states += 1;
    if *states > budget {
        return Err(NibbleError::BudgetExceeded(budget));
    }
    let remaining = ell - used;
    debug_assert!(remaining >= 1);
    // One graph segment of length 1..=remaining ending at an
    // unsaturated vertex. (mark_ball borrows the scratch, so collect.)
    let segment_ends: Vec<(u32, u32)> = {
        state.graph().mark_ball(scratch, at, remaining);
        scratch.visited()[1..]
            .iter()
            .filter(|&&y| state.is_unsaturated(y as usize))
            .map(|&y| (y, scratch.dist_of(y as usize)))
            .collect()
    };
    for (y, d) in segment_ends {
        let now_used = used + d;
        if !reach[y as usize] {
            if now_used == ell {
                reach[y as usize] = true;
                marked.push(y);
            }
        }
        if now_used == ell && reach[y as usize] {
            // endpoint recorded above (or earlier); nothing to extend
        }
        // Continue with an H-edge (+1) and at least one more unit.
        if now_used + 2 <= ell {
            for &z in h.neighbors(y as usize) {
                explore_witnesses(
                    state,
                    h,
                    z as usize,
                    now_used + 1,
                    ell,
                    scratch,
                    reach,
                    marked,
                    states,
                    budget,
                )?;
            }
        }
    }
    Ok(())
}
