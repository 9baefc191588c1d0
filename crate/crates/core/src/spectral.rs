//! Large-scale geometry instrumentation: shortest-cycle counts,
//! diameter, and the second adjacency eigenvalue of regular graphs.
//!
//! The eigenvalue estimator is two power iterations with the all-ones
//! eigenvector deflated by projection: `A + kI` (all eigenvalues
//! nonnegative) yields `k + lambda_2`, and `kI - A` yields
//! `k - lambda_min`. For bipartite graphs (detected exactly by
//! 2-coloring) the `-k` eigenvalue is part of the trivial spectrum and
//! is excluded, leaving `|lambda_2|` by spectrum symmetry.

use thiserror::Error;

use crate::graph::{Girth, Graph};

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("graph has no cycle")]
    Acyclic,
    #[error("graph is not regular (degrees {min}..{max})")]
    NotRegular { min: usize, max: usize },
    #[error("graph is disconnected ({components} components)")]
    NotConnected { components: usize },
    #[error("power iteration did not converge in {iters} iterations (estimate {estimate})")]
    NonConvergence { estimate: f64, iters: usize },
    #[error("cycle-count budget of {0} vertex visits exceeded")]
    BudgetExceeded(u64),
}

/// Diameter of a graph, or the component count when disconnected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diameter {
    Finite(u32),
    Infinite { components: usize },
}

impl Diameter {
    pub fn finite(self) -> Option<u32> {
        match self {
            Diameter::Finite(d) => Some(d),
            Diameter::Infinite { .. } => None,
        }
    }
}

/// Max BFS eccentricity; disconnected graphs report their component
/// count instead.
pub fn diameter(graph: &Graph) -> Diameter {
    let n = graph.n();
    if n == 0 {
        return Diameter::Finite(0);
    }
    let mut dist = vec![u32::MAX; n];
    let mut queue = Vec::with_capacity(n);
    let bfs = |root: usize, dist: &mut Vec<u32>, queue: &mut Vec<u32>| -> u32 {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        queue.clear();
        dist[root] = 0;
        queue.push(root as u32);
        let mut head = 0;
        let mut ecc = 0;
        while head < queue.len() {
            let x = queue[head] as usize;
            head += 1;
            for &y in graph.neighbors(x) {
                let y = y as usize;
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    ecc = ecc.max(dist[y]);
                    queue.push(y as u32);
                }
            }
        }
        ecc
    };
    let first_ecc = bfs(0, &mut dist, &mut queue);
    if queue.len() < n {
        // Count components by sweeping unreached roots.
        let mut seen = vec![false; n];
        for &v in &queue {
            seen[v as usize] = true;
        }
        let mut components = 1;
        for root in 0..n {
            if !seen[root] {
                components += 1;
                bfs(root, &mut dist, &mut queue);
                for &v in &queue {
                    seen[v as usize] = true;
                }
            }
        }
        return Diameter::Infinite { components };
    }
    let mut best = first_ecc;
    for root in 1..n {
        best = best.max(bfs(root, &mut dist, &mut queue));
    }
    Diameter::Finite(best)
}

/// Exact number of shortest cycles: for each edge `uv`, count the
/// shortest `u`-`v` paths of length `girth - 1` avoiding that edge
/// (each girth cycle through `uv` is one such path), then divide the
/// total by the girth since every cycle is seen once per edge.
pub fn count_girth_cycles(graph: &Graph, budget: u64) -> Result<u64, SpectralError> {
    let girth = match graph.girth() {
        Girth::Finite(g) => g,
        Girth::Infinite => return Err(SpectralError::Acyclic),
    };
    let n = graph.n();
    let mut dist = vec![u32::MAX; n];
    let mut count = vec![0u64; n];
    let mut queue: Vec<u32> = Vec::with_capacity(n);
    let mut visits = 0u64;
    let mut total: u128 = 0;
    for (u, v) in graph.edges_sorted() {
        let (u, v) = (u as usize, v as usize);
        for &x in &queue {
            dist[x as usize] = u32::MAX;
            count[x as usize] = 0;
        }
        queue.clear();
        dist[u] = 0;
        count[u] = 1;
        queue.push(u as u32);
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head] as usize;
            head += 1;
            visits += 1;
            if visits > budget {
                return Err(SpectralError::BudgetExceeded(budget));
            }
            if dist[x] + 1 > girth - 1 {
                break;
            }
            for &y in graph.neighbors(x) {
                let y = y as usize;
                if (x == u && y == v) || (x == v && y == u) {
                    continue; // the counted paths must avoid uv itself
                }
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push(y as u32);
                }
                if dist[y] == dist[x] + 1 {
                    count[y] += count[x];
                }
            }
        }
        if dist[v] == girth - 1 {
            total += count[v] as u128;
        }
    }
    debug_assert_eq!(total % girth as u128, 0);
    Ok((total / girth as u128) as u64)
}

/// Exact bipartiteness by BFS 2-coloring.
fn is_bipartite(graph: &Graph) -> bool {
    let n = graph.n();
    let mut color = vec![u8::MAX; n];
    let mut queue = Vec::new();
    for root in 0..n {
        if color[root] != u8::MAX {
            continue;
        }
        color[root] = 0;
        queue.clear();
        queue.push(root as u32);
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head] as usize;
            head += 1;
            for &y in graph.neighbors(x) {
                let y = y as usize;
                if color[y] == u8::MAX {
                    color[y] = 1 - color[x];
                    queue.push(y as u32);
                } else if color[y] == color[x] {
                    return false;
                }
            }
        }
    }
    true
}

enum Shifted {
    /// `A + kI`: top non-principal eigenvalue is `k + lambda_2`.
    Plus,
    /// `kI - A`: top non-principal eigenvalue is `k - lambda_min`.
    Minus,
}

fn power_iterate(
    graph: &Graph,
    k: f64,
    shift: Shifted,
    tol: f64,
    max_iters: usize,
) -> Result<f64, SpectralError> {
    let n = graph.n();
    // Deterministic pseudorandom start, projected off the all-ones
    // eigenvector each iteration.
    let mut rng = crate::rng::Rng::from_seed(0x5EED_0F_9E3779B9);
    let mut x: Vec<f64> = (0..n).map(|_| rng.f64() - 0.5).collect();
    let mut y = vec![0.0f64; n];
    project_and_normalize(&mut x);
    let mut rayleigh_prev = f64::NAN;
    let mut rayleigh = 0.0;
    for iters in 0..max_iters {
        for (v, slot) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &u in graph.neighbors(v) {
                acc += x[u as usize];
            }
            *slot = match shift {
                Shifted::Plus => acc + k * x[v],
                Shifted::Minus => k * x[v] - acc,
            };
        }
        rayleigh = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        std::mem::swap(&mut x, &mut y);
        if !project_and_normalize(&mut x) {
            // The iterate collapsed: the operator annihilates the
            // complement of the all-ones vector.
            return Ok(0.0);
        }
        if (rayleigh - rayleigh_prev).abs() <= tol * rayleigh.abs().max(1.0) {
            return Ok(rayleigh);
        }
        let _ = iters;
        rayleigh_prev = rayleigh;
    }
    Err(SpectralError::NonConvergence {
        estimate: rayleigh,
        iters: max_iters,
    })
}

fn project_and_normalize(x: &mut [f64]) -> bool {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= norm);
    true
}

/// Largest nontrivial adjacency eigenvalue magnitude of a connected
/// regular graph: the principal eigenvalue `k` is always excluded, and
/// for bipartite graphs so is its mirror `-k`.
pub fn second_eigenvalue(
    graph: &Graph,
    tol: f64,
    max_iters: usize,
) -> Result<f64, SpectralError> {
    let n = graph.n();
    let (min_deg, max_deg) = (graph.min_degree(), graph.max_degree());
    if min_deg != max_deg {
        return Err(SpectralError::NotRegular {
            min: min_deg,
            max: max_deg,
        });
    }
    if let Diameter::Infinite { components } = diameter(graph) {
        return Err(SpectralError::NotConnected { components });
    }
    let k = max_deg as f64;
    if n < 2 {
        return Ok(0.0);
    }
    let lambda_2 = power_iterate(graph, k, Shifted::Plus, tol, max_iters)? - k;
    if is_bipartite(graph) {
        // Spectrum is symmetric; the most negative nontrivial value is
        // -lambda_2.
        return Ok(lambda_2.abs());
    }
    let lambda_min = k - power_iterate(graph, k, Shifted::Minus, tol, max_iters)?;
    Ok(lambda_2.abs().max(lambda_min.abs()))
}

#[derive(Debug, Clone, Copy)]
pub struct GeometryOptions {
    pub compute_lambda: bool,
    pub tol: f64,
    pub max_iters: usize,
    /// Additive slack on the near-Ramanujan comparison.
    pub slack: f64,
    pub cycle_budget: u64,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        GeometryOptions {
            compute_lambda: false,
            tol: 1e-9,
            max_iters: 200_000,
            slack: 0.0,
            cycle_budget: 1 << 34,
        }
    }
}

/// One-stop structural report. Every field stays well-defined on
/// degenerate inputs: acyclic graphs have no cycle statistics,
/// disconnected ones no diameter or eigenvalue.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GeometryReport {
    pub n: usize,
    pub edge_count: usize,
    pub max_degree: usize,
    pub regular: bool,
    pub girth: Option<u32>,
    pub diameter: Option<u32>,
    pub components: usize,
    pub girth_cycle_count: Option<u64>,
    /// `(n k / g) (k-1)^(g/2)` with k the max degree.
    pub cycle_bound: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_error: Option<String>,
    /// `2 sqrt(k - 1)`.
    pub ramanujan_threshold: f64,
    pub near_ramanujan: Option<bool>,
    pub slack: f64,
}

pub fn geometry_report(graph: &Graph, opts: &GeometryOptions) -> GeometryReport {
    let n = graph.n();
    let k = graph.max_degree();
    let girth = graph.girth().finite();
    let diam = diameter(graph);
    let components = match diam {
        Diameter::Finite(_) => 1,
        Diameter::Infinite { components } => components,
    };
    let girth_cycle_count = girth.and_then(|_| count_girth_cycles(graph, opts.cycle_budget).ok());
    let cycle_bound = girth.map(|g| {
        (n as f64) * (k as f64) / (g as f64) * ((k as f64) - 1.0).powf(g as f64 / 2.0)
    });
    let ramanujan_threshold = 2.0 * ((k as f64) - 1.0).max(0.0).sqrt();
    let (lambda, lambda_error) = if opts.compute_lambda {
        match second_eigenvalue(graph, opts.tol, opts.max_iters) {
            Ok(l) => (Some(l), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    GeometryReport {
        n,
        edge_count: graph.edge_count(),
        max_degree: k,
        regular: graph.min_degree() == k,
        girth,
        diameter: diam.finite(),
        components,
        girth_cycle_count,
        cycle_bound,
        lambda,
        lambda_error,
        near_ramanujan: lambda.map(|l| l <= ramanujan_threshold + opts.slack),
        ramanujan_threshold,
        slack: opts.slack,
    }
}
