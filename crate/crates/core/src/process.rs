//! The random greedy high-girth process.
//!
//! Starting from a Hamilton cycle (or a supplied bounded-degree graph),
//! each step picks a uniformly random pair of minimum-degree vertices at
//! distance at least `g - 1` and joins them. The run ends when the graph
//! is `k`-regular (*saturated*) or no admissible pair exists (*frozen*).
//!
//! Pair selection is rejection sampling over the unsaturated set, which
//! is exactly uniform over admissible pairs; after a bounded streak of
//! rejections it falls back to exact enumeration, which also decides
//! freezing exactly rather than probabilistically.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{BfsScratch, Girth, Graph, GraphError};
use crate::rng::Rng;

#[derive(Debug, Error, PartialEq)]
pub enum ProcessError {
    #[error("vertex count must be even and at least 4, got {0}")]
    BadVertexCount(usize),
    #[error("target degree must satisfy 3 <= k <= n-1, got k={k}, n={n}")]
    BadDegree { k: usize, n: usize },
    #[error("girth rate must lie strictly inside (0, 1), got {0}")]
    BadGirthRate(f64),
    #[error("girth target must satisfy 3 <= g <= n, got g={g}, n={n}")]
    BadGirthTarget { g: u32, n: usize },
    #[error("cycle start needs n > 2(g-1) so an admissible pair exists: n={n}, g={g}")]
    CycleTooSmallForGirth { n: usize, g: u32 },
    #[error("start graph has {got} vertices, config says {want}")]
    StartSizeMismatch { got: usize, want: usize },
    #[error("start graph has max degree {got}, above target degree {k}")]
    StartDegreeTooHigh { got: usize, k: usize },
    #[error("duplicate seed {0} in batch")]
    DuplicateSeed(u64),
    #[error("available-pair enumeration would exceed limit {limit}")]
    EnumerationTooLarge { limit: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How the girth target is supplied.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum GirthSpec {
    /// Explicit target, clamped nowhere: must satisfy `3 <= g <= n`.
    Target(u32),
    /// Derive `g = max(3, floor(c * ln n / ln(k-1)))` from a rate `c` in (0, 1).
    FromRate(f64),
}

/// Start graph for a run.
#[derive(Debug, Clone)]
pub enum StartSpec {
    HamiltonCycle,
    External(Graph),
}

#[derive(Debug, Clone)]
pub struct ProcessConfig {
    pub n: usize,
    pub k: usize,
    pub girth: GirthSpec,
    pub seed: u64,
    /// Override for the rejection streak before the exact fallback;
    /// `None` picks an adaptive default.
    pub rejection_cap: Option<u64>,
    /// Exact `|A_t|` is logged whenever `|W_t|` is at or below this;
    /// above it the per-step log-choice term uses the rejection-rate
    /// estimator. `usize::MAX` forces exact logging everywhere.
    pub exact_count_threshold: usize,
    pub keep_graph: bool,
    pub keep_chords: bool,
    pub start: StartSpec,
}

impl ProcessConfig {
    pub fn new(n: usize, k: usize, girth: GirthSpec, seed: u64) -> Self {
        ProcessConfig {
            n,
            k,
            girth,
            seed,
            rejection_cap: None,
            exact_count_threshold: 64,
            keep_graph: false,
            keep_chords: false,
            start: StartSpec::HamiltonCycle,
        }
    }

    /// Resolved girth target after validation.
    pub fn girth_target(&self) -> Result<u32, ProcessError> {
        let g = match self.girth {
            GirthSpec::Target(g) => g,
            GirthSpec::FromRate(c) => derive_girth_target(self.n, self.k, c)?,
        };
        if g < 3 || g as usize > self.n {
            return Err(ProcessError::BadGirthTarget { g, n: self.n });
        }
        Ok(g)
    }

    fn validate(&self) -> Result<u32, ProcessError> {
        if self.n < 4 || self.n % 2 != 0 {
            return Err(ProcessError::BadVertexCount(self.n));
        }
        if self.k < 3 || self.k >= self.n {
            return Err(ProcessError::BadDegree { k: self.k, n: self.n });
        }
        let g = self.girth_target()?;
        match &self.start {
            StartSpec::HamiltonCycle => {
                // Antipodal cycle vertices sit at distance n/2, so an
                // admissible pair exists at t = 0 iff n/2 >= g - 1.
                if self.n < 2 * (g as usize - 1) {
                    return Err(ProcessError::CycleTooSmallForGirth { n: self.n, g });
                }
            }
            StartSpec::External(graph) => {
                if graph.n() != self.n {
                    return Err(ProcessError::StartSizeMismatch {
                        got: graph.n(),
                        want: self.n,
                    });
                }
                if graph.max_degree() > self.k {
                    return Err(ProcessError::StartDegreeTooHigh {
                        got: graph.max_degree(),
                        k: self.k,
                    });
                }
            }
        }
        Ok(g)
    }
}

/// `max(3, floor(c * ln(n) / ln(k-1)))` for a rate `c` strictly inside (0, 1).
pub fn derive_girth_target(n: usize, k: usize, c: f64) -> Result<u32, ProcessError> {
    if !(c > 0.0 && c < 1.0) {
        return Err(ProcessError::BadGirthRate(c));
    }
    let raw = c * (n as f64).ln() / ((k - 1) as f64).ln();
    // Guard against last-ulp undershoot of exact integers like log2(1024).
    let g = (raw + 1e-9).floor() as u32;
    Ok(g.max(3))
}

/// Set with O(1) membership, uniform sampling, and removal.
#[derive(Clone, Debug)]
struct IndexedSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl IndexedSet {
    fn from_members(n: usize, members: impl Iterator<Item = usize>) -> Self {
        let mut set = IndexedSet {
            items: Vec::new(),
            pos: vec![ABSENT; n],
        };
        for v in members {
            set.pos[v] = set.items.len() as u32;
            set.items.push(v as u32);
        }
        set
    }

    #[inline]
    fn len(&self) -> usize {
        self.items.len()
    }

    #[inline]
    fn contains(&self, v: usize) -> bool {
        self.pos[v] != ABSENT
    }

    #[inline]
    fn index_of(&self, v: usize) -> Option<usize> {
        (self.pos[v] != ABSENT).then(|| self.pos[v] as usize)
    }

    fn remove(&mut self, v: usize) {
        let i = self.pos[v];
        debug_assert_ne!(i, ABSENT);
        let last = *self.items.last().expect("non-empty");
        self.items[i as usize] = last;
        self.pos[last as usize] = i;
        self.items.pop();
        self.pos[v] = ABSENT;
    }
}

/// Summary of one completed (or in-progress) degree level.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LevelStats {
    /// Minimum degree while this level ran.
    pub degree: usize,
    /// Unsaturated count when the level began.
    pub start_size: usize,
    pub steps: usize,
    /// Accumulated `sum_t ln |A_t|` over the level's steps.
    pub log_choice_sum: f64,
    /// How many of those terms used an exact count rather than the
    /// rejection-rate estimator.
    pub exact_terms: usize,
}

/// Mutable state of a single run.
#[derive(Clone, Debug)]
pub struct ProcessState {
    graph: Graph,
    k: usize,
    g: u32,
    t: usize,
    degree_floor: usize,
    w: IndexedSet,
    frozen: bool,
    level_start_size: usize,
    level_steps: usize,
    level_log_sum: f64,
    level_exact_terms: usize,
    levels: Vec<LevelStats>,
}

impl ProcessState {
    /// Wraps an arbitrary graph as a process snapshot: the unsaturated
    /// set is the exact minimum-degree set (when below `k`).
    pub fn from_graph(graph: Graph, k: usize, g: u32) -> Self {
        let n = graph.n();
        let floor = graph.min_degree();
        let w = if floor < k {
            IndexedSet::from_members(n, (0..n).filter(|&v| graph.degree(v) == floor))
        } else {
            IndexedSet::from_members(n, std::iter::empty())
        };
        let start = w.len();
        ProcessState {
            graph,
            k,
            g,
            t: 0,
            degree_floor: floor,
            w,
            frozen: false,
            level_start_size: start,
            level_steps: 0,
            level_log_sum: 0.0,
            level_exact_terms: 0,
            levels: Vec::new(),
        }
    }

    #[inline]
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    pub fn t(&self) -> usize {
        self.t
    }

    #[inline]
    pub fn girth_target(&self) -> u32 {
        self.g
    }

    #[inline]
    pub fn target_degree(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn degree_floor(&self) -> usize {
        self.degree_floor
    }

    #[inline]
    pub fn frozen(&self) -> bool {
        self.frozen
    }

    #[inline]
    pub fn is_saturated(&self) -> bool {
        self.degree_floor >= self.k
    }

    #[inline]
    pub fn unsaturated_len(&self) -> usize {
        self.w.len()
    }

    /// Unsaturated vertices in the set's internal order.
    #[inline]
    pub fn unsaturated(&self) -> &[u32] {
        &self.w.items
    }

    #[inline]
    pub fn is_unsaturated(&self, v: usize) -> bool {
        self.w.contains(v)
    }

    #[inline]
    pub fn level_steps(&self) -> usize {
        self.level_steps
    }

    #[inline]
    pub fn level_start_size(&self) -> usize {
        self.level_start_size
    }

    pub fn completed_levels(&self) -> &[LevelStats] {
        &self.levels
    }

    fn close_level(&mut self) {
        self.levels.push(LevelStats {
            degree: self.degree_floor,
            start_size: self.level_start_size,
            steps: self.level_steps,
            log_choice_sum: self.level_log_sum,
            exact_terms: self.level_exact_terms,
        });
        self.level_steps = 0;
        self.level_log_sum = 0.0;
        self.level_exact_terms = 0;
    }

    /// Inserts the edge `uv` as the next process step and updates the
    /// unsaturated set and level bookkeeping. The pair must be
    /// admissible; availability itself is the caller's concern (the
    /// runner samples, harnesses and exhaustive searches choose).
    pub fn apply_pair(&mut self, u: usize, v: usize) {
        debug_assert!(self.w.contains(u) && self.w.contains(v));
        self.graph.add_edge(u, v).expect("pair must be insertable");
        self.w.remove(u);
        self.w.remove(v);
        self.t += 1;
        self.level_steps += 1;
        // Exact step invariant: two vertices leave per step.
        assert_eq!(
            self.w.len(),
            self.level_start_size - 2 * self.level_steps,
            "unsaturated count must drop by exactly 2 per step"
        );
        if self.w.len() == 0 {
            self.advance_level();
        }
    }

    fn advance_level(&mut self) {
        self.close_level();
        let floor = self.graph.min_degree();
        self.degree_floor = floor;
        if floor < self.k {
            self.w = IndexedSet::from_members(
                self.graph.n(),
                (0..self.graph.n()).filter(|&v| self.graph.degree(v) == floor),
            );
            self.level_start_size = self.w.len();
        } else {
            self.level_start_size = 0;
        }
    }

    fn add_log_choice(&mut self, term: f64, exact: bool) {
        self.level_log_sum += term;
        if exact {
            self.level_exact_terms += 1;
        }
    }
}

/// Admissibility test: both endpoints unsaturated and at distance >= g-1.
pub fn is_available(state: &ProcessState, scratch: &mut BfsScratch, u: usize, v: usize) -> bool {
    debug_assert_ne!(u, v);
    if !state.w.contains(u) || !state.w.contains(v) {
        return false;
    }
    state
        .graph
        .truncated_distance(scratch, u, v, state.g - 1)
        .map(|d| d.is_at_least(state.g - 1))
        .unwrap_or(false)
}

/// Exact number of admissible pairs, by a depth-(g-2) ball scan from
/// every unsaturated vertex.
pub fn count_available(state: &ProcessState, scratch: &mut BfsScratch) -> u64 {
    let w_len = state.w.len() as u64;
    if w_len < 2 {
        return 0;
    }
    let mut near_ordered = 0u64;
    for &wi in &state.w.items {
        state.graph.mark_ball(scratch, wi as usize, state.g - 2);
        for &u in &scratch.visited()[1..] {
            if state.w.contains(u as usize) {
                near_ordered += 1;
            }
        }
    }
    debug_assert_eq!(near_ordered % 2, 0);
    w_len * (w_len - 1) / 2 - near_ordered / 2
}

/// Materializes the admissible pair list (internal-order `(i < j)` by
/// unsaturated-set position). Guarded by `limit` on the result size.
pub fn enumerate_available(
    state: &ProcessState,
    scratch: &mut BfsScratch,
    limit: u64,
) -> Result<Vec<(u32, u32)>, ProcessError> {
    let w = &state.w.items;
    let mut pairs = Vec::new();
    for (i, &wi) in w.iter().enumerate() {
        state.graph.mark_ball(scratch, wi as usize, state.g - 2);
        for &wj in &w[i + 1..] {
            if !scratch.seen(wj as usize) {
                if pairs.len() as u64 >= limit {
                    return Err(ProcessError::EnumerationTooLarge { limit });
                }
                pairs.push((wi.min(wj), wi.max(wj)));
            }
        }
    }
    Ok(pairs)
}

/// Outcome of one pair selection.
pub enum SampleOutcome {
    /// Uniform admissible pair, the number of rejection draws spent
    /// (accepted draw included), and the exact `|A_t|` when the exact
    /// fallback had to compute it anyway.
    Pair {
        u: usize,
        v: usize,
        draws: u64,
        exact_count: Option<u64>,
    },
    /// No admissible pair exists (decided exactly).
    Frozen,
}

fn default_rejection_cap(w_len: usize, k: usize, g: u32) -> u64 {
    // Expected draws per acceptance is roughly w^2 / (w^2 - 2 w n_c)
    // with n_c ~ (k-1)^g; allow a 200x streak, floored at 1000. The
    // formula blows up when the admissible set could be empty, so it is
    // also ceiled at 4w: past that, exact enumeration (O(w) ball scans)
    // is cheaper than continuing to reject.
    let w = w_len as f64;
    let nc = ((k - 1) as f64).powi(g as i32);
    let denom = (w * w - 2.0 * w * nc).max(1.0);
    let formula = (200.0 * (w * w / denom).ceil()).min(u64::MAX as f64) as u64;
    formula.clamp(1000, (4 * w_len as u64).max(1000))
}

/// Uniform sample from the admissible pairs: rejection over unsaturated
/// pairs, then an exact count-and-select fallback after `cap` misses.
pub fn sample_available_pair(
    state: &ProcessState,
    scratch: &mut BfsScratch,
    rng: &mut Rng,
    cap_override: Option<u64>,
) -> SampleOutcome {
    let w = &state.w.items;
    if w.len() < 2 {
        return SampleOutcome::Frozen;
    }
    let cap = cap_override.unwrap_or_else(|| default_rejection_cap(w.len(), state.k, state.g));
    let mut draws = 0u64;
    while draws < cap {
        draws += 1;
        let (i, j) = rng.index_pair(w.len());
        let (u, v) = (w[i] as usize, w[j] as usize);
        let far = state
            .graph
            .truncated_distance(scratch, u, v, state.g - 1)
            .expect("vertices in range")
            .is_at_least(state.g - 1);
        if far {
            return SampleOutcome::Pair {
                u,
                v,
                draws,
                exact_count: None,
            };
        }
    }
    exact_sample(state, scratch, rng, draws)
}

/// Count-and-select: one ball scan per unsaturated vertex to count the
/// admissible pairs, a uniform index draw, then a second scan to locate
/// the selected pair. O(|W|) memory, exact freeze decision.
fn exact_sample(
    state: &ProcessState,
    scratch: &mut BfsScratch,
    rng: &mut Rng,
    draws: u64,
) -> SampleOutcome {
    let w = &state.w.items;
    let mut per_i = Vec::with_capacity(w.len());
    let mut total = 0u64;
    for (i, &wi) in w.iter().enumerate() {
        state.graph.mark_ball(scratch, wi as usize, state.g - 2);
        let mut near_after = 0u64;
        for &u in &scratch.visited()[1..] {
            if let Some(p) = state.w.index_of(u as usize) {
                if p > i {
                    near_after += 1;
                }
            }
        }
        let after = (w.len() - 1 - i) as u64;
        per_i.push(after - near_after);
        total += after - near_after;
    }
    if total == 0 {
        return SampleOutcome::Frozen;
    }
    let mut pick = uniform_u64(rng, total);
    for (i, &cnt) in per_i.iter().enumerate() {
        if pick >= cnt {
            pick -= cnt;
            continue;
        }
        let wi = w[i] as usize;
        state.graph.mark_ball(scratch, wi, state.g - 2);
        for &wj in &w[i + 1..] {
            if !scratch.seen(wj as usize) {
                if pick == 0 {
                    return SampleOutcome::Pair {
                        u: wi,
                        v: wj as usize,
                        draws,
                        exact_count: Some(total),
                    };
                }
                pick -= 1;
            }
        }
        unreachable!("per-vertex count and rescan disagree");
    }
    unreachable!("selection index exceeded total");
}

/// Uniform draw in [0, bound) for u64 bounds, by masked rejection.
fn uniform_u64(rng: &mut Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let mask = bound.next_power_of_two() - 1;
    loop {
        let r = rng.next_u64() & mask;
        if r < bound {
            return r;
        }
    }
}

/// Result of advancing the process by one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Stepped,
    Frozen,
    Saturated,
}

/// Owns everything a single run needs: state, RNG, BFS scratch.
pub struct ProcessRunner {
    state: ProcessState,
    scratch: BfsScratch,
    rng: Rng,
    rejection_cap: Option<u64>,
    exact_count_threshold: usize,
    chords: Option<Vec<(u32, u32)>>,
    start_girth: Girth,
}

impl ProcessRunner {
    pub fn new(config: &ProcessConfig) -> Result<Self, ProcessError> {
        let g = config.validate()?;
        let graph = match &config.start {
            StartSpec::HamiltonCycle => Graph::hamilton_cycle(config.n, config.k)?,
            // Rebuild with capacity k so the process can add chords.
            StartSpec::External(start) => Graph::from_edges(
                config.n,
                config.k,
                &start
                    .edges_sorted()
                    .iter()
                    .map(|&(u, v)| (u as usize, v as usize))
                    .collect::<Vec<_>>(),
            )?,
        };
        let start_girth = match &config.start {
            StartSpec::HamiltonCycle => Girth::Finite(config.n as u32),
            StartSpec::External(_) => graph.girth(),
        };
        Ok(ProcessRunner {
            state: ProcessState::from_graph(graph, config.k, g),
            scratch: BfsScratch::new(),
            rng: Rng::from_seed(config.seed),
            rejection_cap: config.rejection_cap,
            exact_count_threshold: config.exact_count_threshold,
            chords: config.keep_chords.then(Vec::new),
            start_girth,
        })
    }

    pub fn state(&self) -> &ProcessState {
        &self.state
    }

    pub fn start_girth(&self) -> Girth {
        self.start_girth
    }

    /// Advances the process by one edge. Freezing is sticky; a regular
    /// graph reports `Saturated` and never changes again.
    pub fn step(&mut self) -> StepOutcome {
        if self.state.is_saturated() {
            return StepOutcome::Saturated;
        }
        if self.state.frozen {
            return StepOutcome::Frozen;
        }
        match sample_available_pair(
            &self.state,
            &mut self.scratch,
            &mut self.rng,
            self.rejection_cap,
        ) {
            SampleOutcome::Frozen => {
                debug_assert_eq!(count_available(&self.state, &mut self.scratch), 0);
                self.state.frozen = true;
                StepOutcome::Frozen
            }
            SampleOutcome::Pair {
                u,
                v,
                draws,
                exact_count,
            } => {
                let w_len = self.state.w.len() as u64;
                let (log_term, exact) = match exact_count {
                    Some(a) => ((a as f64).ln(), true),
                    None if self.state.w.len() <= self.exact_count_threshold => (
                        (count_available(&self.state, &mut self.scratch) as f64).ln(),
                        true,
                    ),
                    None => {
                        // ln(C(w,2) * acceptance rate) with the step's
                        // observed acceptance rate 1/draws.
                        (
                            ((w_len * (w_len - 1) / 2) as f64).ln() - (draws as f64).ln(),
                            false,
                        )
                    }
                };
                self.state.add_log_choice(log_term, exact);
                self.record_chord(u, v);
                self.state.apply_pair(u, v);
                #[cfg(debug_assertions)]
                self.moore_spot_check(u);
                StepOutcome::Stepped
            }
        }
    }

    /// Debug-build sampling of the degree-capped ball growth around a
    /// recently touched vertex.
    #[cfg(debug_assertions)]
    fn moore_spot_check(&mut self, hint: usize) {
        let st = &self.state;
        if st.t % 64 != 0 {
            return;
        }
        let v = (hint + st.t.wrapping_mul(0x9E37)) % st.graph.n();
        let k = st.k as f64;
        let profile = self
            .state
            .graph
            .ball_profile(&mut self.scratch, v, st.g)
            .expect("vertex in range");
        let mut cum = 0.0;
        for (i, &c) in profile.iter().enumerate() {
            let ell = (i + 1) as i32;
            debug_assert!((c as f64) <= k * (k - 1.0).powi(ell - 1));
            cum += c as f64;
            debug_assert!(cum <= 2.0 * k * (k - 1.0).powi(ell));
        }
    }

    fn into_record(self, seed: u64, wall: Duration, keep_graph: bool) -> RunRecord {
        let mut state = self.state;
        let saturated = state.degree_floor >= state.k;
        // A frozen run still has its level open; close it so the level
        // log covers every step taken.
        if !saturated {
            state.close_level();
        }
        let girth_achieved = state.graph.girth();
        if saturated {
            assert!(state.graph.is_regular(state.k));
            let floor = match (self.start_girth, state.g) {
                (Girth::Finite(s), g) => Girth::Finite(s.min(g)),
                (Girth::Infinite, g) => Girth::Finite(g),
            };
            if let (Girth::Finite(req), Girth::Finite(got)) = (floor, girth_achieved) {
                assert!(
                    got >= req,
                    "saturated output girth {got} below guaranteed {req}"
                );
            }
        }
        let log_choices = state.levels.iter().map(|l| l.log_choice_sum).sum();
        RunRecord {
            seed,
            n: state.graph.n(),
            k: state.k,
            g: state.g,
            saturated,
            t_freeze: state.t,
            girth_achieved,
            log_choices,
            levels: state.levels.clone(),
            wall,
            chords: self.chords,
            final_graph: keep_graph.then_some(state.graph),
        }
    }

    fn record_chord(&mut self, u: usize, v: usize) {
        if let Some(chords) = &mut self.chords {
            chords.push((u.min(v) as u32, u.max(v) as u32));
        }
    }
}

/// Everything a finished run reports. All fields except `wall` are a
/// deterministic function of the config (seed included).
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub g: u32,
    pub saturated: bool,
    /// Steps taken when the run froze, or the total step count on
    /// saturation.
    pub t_freeze: usize,
    pub girth_achieved: Girth,
    /// Total `sum_t ln |A_t|` across all levels.
    pub log_choices: f64,
    pub levels: Vec<LevelStats>,
    pub wall: Duration,
    pub final_graph: Option<Graph>,
    pub chords: Option<Vec<(u32, u32)>>,
}

/// Per-step hook for instrumented runs.
pub trait RunObserver {
    fn on_start(&mut self, _state: &ProcessState) {}
    fn after_step(&mut self, _state: &ProcessState) {}
}

/// Observer that does nothing.
pub struct NoopObserver;
impl RunObserver for NoopObserver {}

pub fn run(config: &ProcessConfig) -> Result<RunRecord, ProcessError> {
    run_with_observer(config, &mut NoopObserver)
}

pub fn run_with_observer(
    config: &ProcessConfig,
    observer: &mut dyn RunObserver,
) -> Result<RunRecord, ProcessError> {
    let start = Instant::now();
    let mut runner = ProcessRunner::new(config)?;
    observer.on_start(runner.state());
    loop {
        match runner.step() {
            StepOutcome::Stepped => observer.after_step(runner.state()),
            StepOutcome::Frozen | StepOutcome::Saturated => break,
        }
    }
    Ok(runner.into_record(config.seed, start.elapsed(), config.keep_graph))
}

/// Runs the same configuration across `seeds`, in order. Records are
/// independent of `workers`, which only bounds parallelism.
pub fn batch_run(
    template: &ProcessConfig,
    seeds: &[u64],
    workers: usize,
) -> Result<Vec<RunRecord>, ProcessError> {
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        let dup = sorted.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
        return Err(ProcessError::DuplicateSeed(dup));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let mut config = template.clone();
                config.seed = seed;
                run(&config)
            })
            .collect()
    })
}
