//! Constants and stage times for the two-stage matching analysis.
//!
//! For a rate `c` in (0, 1) the derived constants are
//! `eps = c(1-c)/3`, `beta = eps/10`, `alpha = beta/100`; the window of
//! interest runs from `T = (n - n^(c+eps))/2` to
//! `T_safe = (n - n^eps)/2`, split into stages by the recursion
//! `t_{i+1} = (n - (n - 2 t_i) n^(-alpha)) / 2`, i.e. each stage shrinks
//! the unsaturated count by the factor `n^(-alpha)`.
//!
//! At bench scale `n^beta` is barely above 1 for realistic `c`, which
//! makes every trajectory band vacuous; [`Schedule::with_beta`] installs
//! a larger surrogate `beta` (with `alpha = beta/100` kept in lockstep)
//! while remembering the derived value for reporting.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("rate must lie strictly inside (0, 1), got {0}")]
    BadRate(f64),
    #[error("need k >= 3, got {0}")]
    BadDegree(usize),
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Schedule {
    pub n: usize,
    pub k: usize,
    pub c: f64,
    pub eps: f64,
    /// Active beta (possibly a surrogate override).
    pub beta: f64,
    /// Beta as derived from c, before any override.
    pub beta_derived: f64,
    pub alpha: f64,
    /// End of the first phase: `(n - n^(c+eps)) / 2`.
    pub t_main: f64,
    /// `(n - n^eps) / 2`; past this point the graph is expected safe.
    pub t_safe: f64,
    /// `t_0 = t_main`, then the stage recursion, `stages + 1` entries.
    pub stage_times: Vec<f64>,
    pub stages: usize,
}

impl Schedule {
    pub fn new(n: usize, k: usize, c: f64) -> Result<Self, ScheduleError> {
        if !(c > 0.0 && c < 1.0) {
            return Err(ScheduleError::BadRate(c));
        }
        if k < 3 {
            return Err(ScheduleError::BadDegree(k));
        }
        let eps = c * (1.0 - c) / 3.0;
        let beta = eps / 10.0;
        Ok(Self::assemble(n, k, c, eps, beta, beta))
    }

    /// Same schedule with a surrogate `beta` (and `alpha = beta / 100`).
    pub fn with_beta(&self, beta: f64) -> Self {
        Self::assemble(self.n, self.k, self.c, self.eps, beta, self.beta_derived)
    }

    fn assemble(n: usize, k: usize, c: f64, eps: f64, beta: f64, beta_derived: f64) -> Self {
        let alpha = beta / 100.0;
        let nf = n as f64;
        let t_main = (nf - nf.powf(c + eps)) / 2.0;
        let t_safe = (nf - nf.powf(eps)) / 2.0;
        let stages = ((c + eps) / alpha).ceil() as usize;
        // Track the unsaturated count w_i = n - 2 t_i multiplicatively,
        // so the shrink identity holds to rounding error.
        let shrink = nf.powf(-alpha);
        let mut stage_times = Vec::with_capacity(stages + 1);
        let mut w = nf - 2.0 * t_main;
        stage_times.push(t_main);
        for _ in 0..stages {
            w *= shrink;
            stage_times.push((nf - w) / 2.0);
        }
        Schedule {
            n,
            k,
            c,
            eps,
            beta,
            beta_derived,
            alpha,
            t_main,
            t_safe,
            stage_times,
            stages,
        }
    }

    /// `n^beta`, the target degree of the binomial subgraph.
    pub fn n_beta(&self) -> f64 {
        (self.n as f64).powf(self.beta)
    }

    /// Edge probability `n^beta / w` for a current unsaturated count.
    pub fn edge_probability(&self, w_size: usize) -> f64 {
        (self.n_beta() / w_size as f64).min(1.0)
    }

    /// Unsaturated count `n - 2 t_i` expected at the start of stage `i`.
    pub fn stage_w(&self, i: usize) -> f64 {
        self.n as f64 - 2.0 * self.stage_times[i]
    }
}
