//! Multi-restart search for extrema of `f_H`, optionally inside a subspace.
//!
//! The optimizer works on the unit sphere of the subspace coordinates `x`
//! (all of `C^N` when no subspace is given). Each step is a limited-memory
//! quasi-Newton direction in the real `2d`-dimensional embedding, an Armijo
//! backtracking line search, and renormalization. Steps are accepted only if
//! they do not increase the objective.

use std::collections::VecDeque;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::framepot::{f_h_direct, f_h_gradient_raw, tangent_projection};
use crate::heisenberg::HWGroup;
use crate::numcore::{inner_unchecked, sample_fs, CVector, RngStream};
use crate::subspace::{Space, SubspaceEmbedding};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Minimize,
    Maximize,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Minimize => "min",
            Mode::Maximize => "max",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub dim: usize,
    pub space: Space,
    pub mode: Mode,
    pub restarts: usize,
    pub max_iters: usize,
    /// Minimize: converged when the best value is at most this.
    pub tol_value: f64,
    /// Stop a restart once the tangential gradient norm drops below this.
    pub tol_grad: f64,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(dim: usize, space: Space, mode: Mode) -> Self {
        Self {
            dim,
            space,
            mode,
            restarts: 50,
            max_iters: 2000,
            tol_value: 1e-8,
            tol_grad: 1e-9,
            seed: 0,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidArgument(
                "restarts and max_iters must be >= 1".into(),
            ));
        }
        if !(self.tol_value > 0.0 && self.tol_grad > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    /// `f_H` of the best vector, evaluated from its orbit overlaps.
    pub best_value: f64,
    pub best_vector: CVector,
    pub converged: bool,
    pub restarts_used: usize,
    /// Iterations spent by the restart that produced the best value.
    pub iterations: usize,
    /// Final tangential gradient norm at the best vector.
    pub grad_norm: f64,
    /// `(restart, final value)` for every restart that ran.
    pub history: Vec<(usize, f64)>,
}

/// Objective `sign * f_H(E x)` on the unit sphere of `C^d`.
struct Objective<'a> {
    group: HWGroup,
    embedding: Option<&'a SubspaceEmbedding>,
    sign: f64,
}

impl Objective<'_> {
    fn ambient(&self, x: &CVector) -> CVector {
        match self.embedding {
            Some(e) => e.embed(x).expect("dimension fixed by construction"),
            None => x.clone(),
        }
    }

    /// Uses the orbit-overlap form, which stays accurate near zero.
    fn value(&self, x: &CVector) -> f64 {
        self.sign * f_h_direct(&self.group, &self.ambient(x)).expect("unit by construction")
    }

    /// Tangential real gradient, encoded as a complex vector.
    fn gradient(&self, x: &CVector) -> CVector {
        let z = self.ambient(x);
        let wirtinger = f_h_gradient_raw(z.entries());
        let pulled = match self.embedding {
            Some(e) => e.pull_back(&wirtinger),
            None => wirtinger,
        };
        let real = pulled.scale(Complex64::new(2.0 * self.sign, 0.0));
        tangent_projection(x, &real)
    }
}

struct RunOutcome {
    x: CVector,
    value: f64,
    grad_norm: f64,
    iterations: usize,
}

const MEMORY: usize = 8;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

fn run_one(obj: &Objective<'_>, start: CVector, cfg: &SearchConfig) -> RunOutcome {
    let mut x = start.normalized();
    let mut fx = obj.value(&x);
    let mut g = obj.gradient(&x);
    let mut memory: VecDeque<(CVector, CVector, f64)> = VecDeque::with_capacity(MEMORY);
    let mut iterations = 0;
    let floor = match cfg.mode {
        // f_H >= 0, and the direct form resolves it to well below this
        Mode::Minimize => 1e-28,
        Mode::Maximize => f64::NEG_INFINITY,
    };

    while iterations < cfg.max_iters {
        let gnorm = g.norm();
        if gnorm <= cfg.tol_grad || fx <= floor {
            break;
        }
        iterations += 1;

        let mut dir = lbfgs_direction(&g, &memory);
        let mut slope = dir.real_dot(&g);
        if slope.is_nan() || slope >= 0.0 {
            memory.clear();
            dir = g.scale(Complex64::new(-1.0, 0.0));
            slope = -gnorm * gnorm;
        }
        let mut step = if memory.is_empty() {
            (0.1 / gnorm).min(1.0)
        } else {
            1.0
        };

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = x.axpy(step, &dir).normalized();
            let ft = obj.value(&trial);
            if ft <= fx + ARMIJO * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if memory.is_empty() {
                break;
            }
            memory.clear();
            continue;
        };

        let g_new = obj.gradient(&x_new);
        let s = x_new.axpy(-1.0, &x);
        let y = g_new.axpy(-1.0, &g);
        let sy = s.real_dot(&y);
        if sy > 1e-16 * s.norm() * y.norm() {
            if memory.len() == MEMORY {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }
        x = x_new;
        fx = f_new;
        g = g_new;
    }
    RunOutcome {
        grad_norm: g.norm(),
        x,
        value: fx,
        iterations,
    }
}

/// Two-loop recursion for the L-BFGS direction `-H g`.
fn lbfgs_direction(g: &CVector, memory: &VecDeque<(CVector, CVector, f64)>) -> CVector {
    let mut q = g.clone();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * s.real_dot(&q);
        q = q.axpy(-a, y);
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = s.real_dot(y) / y.real_dot(y);
        q = q.scale(Complex64::new(gamma, 0.0));
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = rho * y.real_dot(&q);
        q = q.axpy(a - b, s);
    }
    q.scale(Complex64::new(-1.0, 0.0))
}

/// Restarts run in parallel batches of this size; the minimizer stops after
/// the first batch that converges.
const BATCH: usize = 8;

/// Runs the configured search. Failing to converge is reported in the
/// result, not raised.
pub fn search(config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let group = HWGroup::new(config.dim)?;
    let embedding = config.space.build(config.dim)?;
    let sub_dim = embedding
        .as_ref()
        .map_or(config.dim, SubspaceEmbedding::sub_dim);
    let obj = Objective {
        group,
        embedding: embedding.as_ref(),
        sign: match config.mode {
            Mode::Minimize => 1.0,
            Mode::Maximize => -1.0,
        },
    };

    let mut history = Vec::new();
    let mut best: Option<(usize, RunOutcome)> = None;
    let mut restart = 0;
    while restart < config.restarts {
        let end = (restart + BATCH).min(config.restarts);
        let outcomes: Vec<RunOutcome> = (restart..end)
            .into_par_iter()
            .map(|r| {
                let mut rng = RngStream::new(config.seed, r as u64);
                run_one(&obj, sample_fs(sub_dim, &mut rng), config)
            })
            .collect();
        for (r, out) in (restart..end).zip(outcomes) {
            history.push((r, out.value * obj.sign));
            // strict comparison keeps the lowest restart index on ties
            if best.as_ref().is_none_or(|(_, b)| out.value < b.value) {
                best = Some((r, out));
            }
        }
        restart = end;
        let (_, b) = best.as_ref().expect("at least one restart ran");
        if config.mode == Mode::Minimize && b.value * obj.sign <= config.tol_value {
            break;
        }
    }

    let (_, out) = best.expect("at least one restart ran");
    let best_vector = obj.ambient(&out.x).normalized();
    // the orbit form is a sum of squares, so it never dips below zero
    let best_value = f_h_direct(&obj.group, &best_vector)?;
    let converged = match config.mode {
        Mode::Minimize => best_value <= config.tol_value,
        Mode::Maximize => out.grad_norm <= config.tol_grad.max(1e-6),
    };
    Ok(SearchResult {
        best_value,
        best_vector,
        converged,
        restarts_used: restart,
        iterations: out.iterations,
        grad_norm: out.grad_norm,
        history,
    })
}

/// Largest `| |<psi_I|psi_J>|^2 - 1/(N+1) |` over distinct orbit members.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SicCheck {
    pub is_sic: bool,
    pub max_deviation: f64,
}

/// Checks the equiangularity of the orbit of `fiducial` directly. By
/// covariance it is enough to compare `psi_0` against the rest of the orbit.
pub fn verify_sic(fiducial: &CVector, tol: f64) -> Result<SicCheck> {
    let n = fiducial.dim();
    let g = HWGroup::new(n)?;
    let orbit = g.orbit(fiducial)?;
    let target = 1.0 / (n as f64 + 1.0);
    let max_deviation = orbit[1..]
        .iter()
        .map(|v| (inner_unchecked(fiducial.entries(), v.entries()).norm_sqr() - target).abs())
        .fold(0.0, f64::max);
    Ok(SicCheck {
        is_sic: max_deviation <= tol,
        max_deviation,
    })
}
