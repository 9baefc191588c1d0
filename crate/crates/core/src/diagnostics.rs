//! Structural diagnostics over process snapshots.
//!
//! Everything here is read-only over a [`ProcessState`]: pair-distance
//! statistics among unsaturated vertices, the safety certificate that
//! guarantees the final matching completes, path-boundedness ceilings,
//! and exact counts of threatening paths in the complete graph over a
//! given start graph.

use thiserror::Error;

use crate::graph::{BfsScratch, Graph};
use crate::process::ProcessState;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagnosticsError {
    #[error("enumeration budget of {0} states exceeded")]
    BudgetExceeded(u64),
}

/// Distance-ℓ pair counts among unsaturated vertices, for ℓ = 1..=g-2.
#[derive(Debug, Clone)]
pub struct PathStats {
    pub girth_target: u32,
    pub w_size: usize,
    /// Unsaturated vertices in ascending id order; rows of `per_vertex`
    /// align with this.
    pub w_vertices: Vec<u32>,
    /// Global counts: `per_ell[ℓ-1]` pairs at distance exactly ℓ.
    pub per_ell: Vec<u64>,
    /// `per_vertex[i][ℓ-1]` = number of unsaturated `u` at distance ℓ
    /// from `w_vertices[i]`.
    pub per_vertex: Vec<Vec<u32>>,
    /// Unsaturated pairs at distance <= g-2.
    pub forbidden_count: u64,
    /// Unsaturated pairs at distance >= g-1.
    pub available_count: u64,
}

/// Exact pair statistics by a depth-(g-2) BFS from every unsaturated
/// vertex.
pub fn path_stats(state: &ProcessState) -> PathStats {
    let g = state.girth_target();
    let radius = g - 2;
    let mut w_vertices: Vec<u32> = state.unsaturated().to_vec();
    w_vertices.sort_unstable();
    let w_size = w_vertices.len();
    let ells = radius as usize;
    let mut per_ell_ordered = vec![0u64; ells];
    let mut per_vertex = vec![vec![0u32; ells]; w_size];
    let mut scratch = BfsScratch::new();
    for (i, &w) in w_vertices.iter().enumerate() {
        state.graph().mark_ball(&mut scratch, w as usize, radius);
        for &u in &scratch.visited()[1..] {
            if state.is_unsaturated(u as usize) {
                let ell = scratch.dist_of(u as usize) as usize;
                per_vertex[i][ell - 1] += 1;
                per_ell_ordered[ell - 1] += 1;
            }
        }
    }
    // Each unordered pair was seen from both endpoints.
    debug_assert!(per_ell_ordered.iter().all(|c| c % 2 == 0));
    let per_ell: Vec<u64> = per_ell_ordered.iter().map(|c| c / 2).collect();
    let forbidden_count: u64 = per_ell.iter().sum();
    let total_pairs = (w_size as u64) * (w_size as u64).saturating_sub(1) / 2;
    PathStats {
        girth_target: g,
        w_size,
        w_vertices,
        per_ell,
        per_vertex,
        forbidden_count,
        available_count: total_pairs - forbidden_count,
    }
}

/// Outcome of the safety check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyReport {
    /// True when the completion certificate applies: every degree is
    /// k-1 or k, and every pair of degree-(k-1) vertices is at distance
    /// at least g-1. From such a state the process saturates with
    /// certainty.
    pub safe: bool,
    /// Whether the degree profile is within {k-1, k}; the certificate
    /// is meaningless at earlier degree levels.
    pub final_level: bool,
    /// A witness pair at distance <= g-2, when one exists.
    pub violating_pair: Option<(u32, u32)>,
    /// Smallest unsaturated pair distance observed (only distances
    /// <= g-2 are measured; `None` means all pairs are at >= g-1).
    pub min_observed_distance: Option<u32>,
}

/// Tests the saturation certificate on a snapshot.
pub fn is_safe(state: &ProcessState) -> SafetyReport {
    let g = state.girth_target();
    let k = state.target_degree();
    let graph = state.graph();
    let final_level = (0..graph.n()).all(|v| graph.degree(v) + 1 >= k && graph.degree(v) <= k);
    let mut violating_pair = None;
    let mut min_dist: Option<u32> = None;
    let mut scratch = BfsScratch::new();
    for &w in state.unsaturated() {
        graph.mark_ball(&mut scratch, w as usize, g - 2);
        for &u in &scratch.visited()[1..] {
            if state.is_unsaturated(u as usize) {
                let d = scratch.dist_of(u as usize);
                if min_dist.map_or(true, |m| d < m) {
                    min_dist = Some(d);
                    violating_pair = Some((w.min(u), w.max(u)));
                }
            }
        }
    }
    SafetyReport {
        safe: final_level && violating_pair.is_none(),
        final_level,
        violating_pair,
        min_observed_distance: min_dist,
    }
}

/// Inputs for the path-boundedness ceilings. `c_plus_eps` is the
/// exponent from the schedule; `n_reference` the vertex count the
/// ceilings normalize by (normally the graph's own n).
#[derive(Debug, Clone, Copy)]
pub struct PathBoundedParams {
    pub big_c: f64,
    pub c_plus_eps: f64,
    pub n_reference: f64,
    pub k: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct EllMargins {
    pub ell: u32,
    /// max_v Pv(v, ell) divided by the per-vertex ceiling.
    pub vertex_margin: f64,
    /// P(ell) divided by the global ceiling.
    pub global_margin: f64,
}

#[derive(Debug, Clone)]
pub struct PathBoundedReport {
    pub bounded: bool,
    pub worst_margin: f64,
    pub per_ell: Vec<EllMargins>,
}

/// Checks both path-boundedness ceilings against measured statistics:
/// per-vertex counts against `L(ell) * ln^C(n)` with
/// `L(ell) = max(1, (k-1)^ell * |W| / n^(c+eps))`, and global counts
/// against `|W|^2 (k-1)^ell / n * ln^C(n)`.
pub fn path_bounded(stats: &PathStats, params: &PathBoundedParams) -> PathBoundedReport {
    let n = params.n_reference;
    let log_c = n.ln().powf(params.big_c);
    let km1 = (params.k - 1) as f64;
    let w = stats.w_size as f64;
    let mut per_ell = Vec::with_capacity(stats.per_ell.len());
    let mut worst: f64 = 0.0;
    for (i, &global_count) in stats.per_ell.iter().enumerate() {
        let ell = (i + 1) as u32;
        let pow = km1.powi(ell as i32);
        let l_ell = (pow * w / n.powf(params.c_plus_eps)).max(1.0);
        let vertex_ceiling = l_ell * log_c;
        let global_ceiling = w * w * pow / n * log_c;
        let max_pv = stats
            .per_vertex
            .iter()
            .map(|row| row[i])
            .max()
            .unwrap_or(0) as f64;
        let margins = EllMargins {
            ell,
            vertex_margin: max_pv / vertex_ceiling,
            global_margin: global_count as f64 / global_ceiling,
        };
        worst = worst.max(margins.vertex_margin).max(margins.global_margin);
        per_ell.push(margins);
    }
    PathBoundedReport {
        bounded: worst <= 1.0,
        worst_margin: worst,
        per_ell,
    }
}

/// Counts directed length-`ell` paths in the complete graph over
/// `base`'s vertex set whose first and last edges are base edges, with
/// no two consecutive non-base ("chord") edges and exactly `chords`
/// chord edges. Directed: each undirected path is counted from both
/// ends, matching the vertex-then-edge counting that bounds these
/// objects by `n^(a+1) (k-1)^ell`.
pub fn count_threatening_paths(
    base: &Graph,
    ell: usize,
    chords: usize,
    budget: u64,
) -> Result<u64, DiagnosticsError> {
    // With non-chord first/last edges and no two consecutive chords,
    // a length-ell path fits at most (ell-1)/2 chords.
    if ell == 0 || 2 * chords + 1 > ell {
        return Ok(0);
    }
    let n = base.n();
    let mut visited = vec![false; n];
    let mut states = 0u64;
    let mut total = 0u64;
    for start in 0..n {
        visited[start] = true;
        extend(
            base,
            start,
            0,
            ell,
            chords,
            0,
            false,
            &mut visited,
            &mut states,
            budget,
            &mut total,
        )?;
        visited[start] = false;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    base: &Graph,
    at: usize,
    edges_used: usize,
    ell: usize,
    chords_wanted: usize,
    chords_used: usize,
    last_was_chord: bool,
    visited: &mut Vec<bool>,
    states: &mut u64,
    budget: u64,
    total: &mut u64,
) -> Result<(), DiagnosticsError> {
    if edges_used == ell {
        if chords_used == chords_wanted {
            *total += 1;
        }
        return Ok(());
    }
    *states += 1;
    if *states > budget {
        return Err(DiagnosticsError::BudgetExceeded(budget));
    }
    let last_edge = edges_used + 1 == ell;
    // Base-edge extensions are always permitted.
    for &y in base.neighbors(at) {
        let y = y as usize;
        if !visited[y] {
            visited[y] = true;
            extend(
                base,
                y,
                edges_used + 1,
                ell,
                chords_wanted,
                chords_used,
                false,
                visited,
                states,
                budget,
                total,
            )?;
            visited[y] = false;
        }
    }
    // Chords: not first, not last, not after a chord, and only while
    // the chord budget lasts.
    if edges_used > 0 && !last_edge && !last_was_chord && chords_used < chords_wanted {
        for y in 0..base.n() {
            if !visited[y] && !base.has_edge(at, y) {
                visited[y] = true;
                extend(
                    base,
                    y,
                    edges_used + 1,
                    ell,
                    chords_wanted,
                    chords_used + 1,
                    true,
                    visited,
                    states,
                    budget,
                    total,
                )?;
                visited[y] = false;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::process::{run, GirthSpec, ProcessConfig, ProcessState};

    fn cycle_state(n: usize, k: usize, g: u32) -> ProcessState {
        ProcessState::from_graph(Graph::hamilton_cycle(n, k).unwrap(), k, g)
    }

    #[test]
    fn path_stats_on_c12() {
        let stats = path_stats(&cycle_state(12, 3, 5));
        assert_eq!(stats.per_ell, vec![12, 12, 12]);
        assert_eq!(stats.forbidden_count, 36);
        assert_eq!(stats.available_count, 30);
        assert_eq!(stats.w_size, 12);
        // Every cycle vertex sees two unsaturated vertices per distance.
        for row in &stats.per_vertex {
            assert_eq!(row, &vec![2, 2, 2]);
        }
    }

    #[test]
    fn path_stats_saturated_is_empty() {
        let k4 = Graph::from_edges(4, 3, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
            .unwrap();
        let stats = path_stats(&ProcessState::from_graph(k4, 3, 3));
        assert_eq!(stats.w_size, 0);
        assert_eq!(stats.forbidden_count, 0);
        assert_eq!(stats.available_count, 0);
    }

    #[test]
    fn path_stats_partitions_unsaturated_pairs() {
        // Mid-run snapshots at several girths.
        for (n, g, seed) in [(60, 4, 1u64), (80, 5, 2), (100, 6, 3)] {
            let mut config = ProcessConfig::new(n, 3, GirthSpec::Target(g), seed);
            config.keep_graph = true;
            let record = run(&config).unwrap();
            let graph = record.final_graph.unwrap();
            let state = ProcessState::from_graph(graph, 4, g); // degree-3 set unsaturated vs k=4
            let stats = path_stats(&state);
            let w = stats.w_size as u64;
            assert_eq!(stats.available_count + stats.forbidden_count, w * (w - 1) / 2);
            // Moore: per-vertex distance-ℓ counts capped by k(k-1)^(ℓ-1).
            for row in &stats.per_vertex {
                for (i, &c) in row.iter().enumerate() {
                    assert!((c as f64) <= 4.0 * 3.0f64.powi(i as i32));
                }
            }
        }
    }

    #[test]
    fn safety_examples() {
        // Fresh C12 at g=5: adjacent unsaturated pairs, unsafe.
        let report = is_safe(&cycle_state(12, 3, 5));
        assert!(!report.safe);
        assert_eq!(report.min_observed_distance, Some(1));
        assert!(report.violating_pair.is_some());

        // C12 plus chords saturating everyone except 0 and 6, which sit
        // at distance 5 >= g-1 = 4: safe.
        let mut g = Graph::hamilton_cycle(12, 3).unwrap();
        for (u, v) in [(1, 3), (2, 4), (5, 7), (8, 10), (9, 11)] {
            g.add_edge(u, v).unwrap();
        }
        let state = ProcessState::from_graph(g, 3, 5);
        assert_eq!(state.unsaturated(), &[0, 6]);
        let report = is_safe(&state);
        assert!(report.final_level);
        assert!(report.safe);
        assert_eq!(report.violating_pair, None);

        // Saturated state: vacuously safe.
        let k4 = Graph::from_edges(4, 3, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
            .unwrap();
        assert!(is_safe(&ProcessState::from_graph(k4, 3, 3)).safe);
    }

    #[test]
    fn safety_requires_final_level() {
        // All degrees 2 with k = 4: pairwise-far unsaturated vertices do
        // not certify anything, since the next level starts from scratch.
        let state = cycle_state(12, 4, 3);
        let report = is_safe(&state);
        assert!(!report.final_level);
        assert!(!report.safe);
    }

    #[test]
    fn path_bounded_on_c12() {
        let stats = path_stats(&cycle_state(12, 3, 5));
        let params = PathBoundedParams {
            big_c: 10.0,
            c_plus_eps: 0.5 + 1.0 / 12.0,
            n_reference: 12.0,
            k: 3,
        };
        let report = path_bounded(&stats, &params);
        assert!(report.bounded, "worst margin {}", report.worst_margin);
        assert_eq!(report.per_ell.len(), 3);
    }

    #[test]
    fn path_bounded_fails_on_clustered_unsaturated_set() {
        // C50 with chords saturating all but six consecutive vertices:
        // the remaining pairs are tightly clustered, so the global
        // ceiling at C = 0.1 is violated.
        let mut g = Graph::hamilton_cycle(50, 3).unwrap();
        let mut spare: Vec<usize> = (6..50).collect();
        // Pair up distant spare vertices (i, i+22): far enough apart to
        // be insertable under the cap.
        while spare.len() >= 2 {
            let u = spare.remove(0);
            let pos = spare.iter().position(|&v| v >= u + 22).unwrap_or(0);
            let v = spare.remove(pos);
            g.add_edge(u, v).unwrap();
        }
        let state = ProcessState::from_graph(g, 3, 4);
        assert_eq!(state.unsaturated_len(), 6);
        let stats = path_stats(&state);
        assert!(stats.per_ell[0] >= 5); // five adjacent pairs among 0..5
        let params = PathBoundedParams {
            big_c: 0.1,
            c_plus_eps: 0.55,
            n_reference: 50.0,
            k: 3,
        };
        let report = path_bounded(&stats, &params);
        assert!(!report.bounded);
        assert!(report.worst_margin > 1.0);
    }

    #[test]
    fn threatening_path_counts_on_c6() {
        let c6 = Graph::hamilton_cycle(6, 3).unwrap();
        // Each base edge traversed in both directions.
        assert_eq!(count_threatening_paths(&c6, 1, 0, 1 << 20).unwrap(), 12);
        // Chord budget infeasible under the no-consecutive rule.
        assert_eq!(count_threatening_paths(&c6, 3, 2, 1 << 20).unwrap(), 0);
        assert_eq!(count_threatening_paths(&c6, 1, 1, 1 << 20).unwrap(), 0);
        // Directed length-2 base-only paths: middle vertex times ordered
        // neighbor pairs.
        assert_eq!(count_threatening_paths(&c6, 2, 0, 1 << 20).unwrap(), 12);
        // Bound: fewer than n^(a+1) (k-1)^ell.
        let count = count_threatening_paths(&c6, 3, 1, 1 << 20).unwrap();
        assert!(count > 0);
        assert!((count as f64) < 36.0 * 8.0);
    }

    #[test]
    fn threatening_path_budget() {
        let c6 = Graph::hamilton_cycle(6, 3).unwrap();
        assert_eq!(
            count_threatening_paths(&c6, 5, 2, 3).unwrap_err(),
            DiagnosticsError::BudgetExceeded(3)
        );
    }

    #[test]
    fn threatening_bound_holds_on_small_bases() {
        // Cycles C4..C8 (max degree 2, so k = 3). The ceiling is tight
        // at a = 0, ell = 1 (every base edge in both directions), so the
        // comparison is non-strict.
        for n in [4usize, 6, 8] {
            let base = Graph::hamilton_cycle(n, 3).unwrap();
            for ell in 1..=5usize {
                for a in 0..=2usize {
                    let count = count_threatening_paths(&base, ell, a, 1 << 26).unwrap();
                    let bound = (n as f64).powi(a as i32 + 1) * 2f64.powi(ell as i32);
                    assert!(
                        (count as f64) <= bound,
                        "n={n} ell={ell} a={a}: {count} > {bound}"
                    );
                }
            }
        }
    }
}
