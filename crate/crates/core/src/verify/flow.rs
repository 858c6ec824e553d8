use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::distance;
use super::BoxSpec;
use crate::poly::{FloatMap, FloatPoly, Scratch};

/// How a trajectory ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Classification {
    /// Reached the target with this index.
    ConvergedTo(usize),
    MaxTimeReached,
    Diverged,
}

/// Step-to-step behavior of a potential sampled along a trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovRecord {
    pub samples: usize,
    /// Largest single-step increase (negative if the potential always fell).
    pub max_increase: f64,
    /// Steps whose increase exceeded the tolerance.
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub start: Vec<f64>,
    pub steps: usize,
    pub end: Vec<f64>,
    pub classified: Classification,
    pub final_grad_norm: f64,
    pub dt_used: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lyapunov: Option<LyapunovRecord>,
}

impl FlowTrace {
    pub fn converged(&self) -> bool {
        matches!(self.classified, Classification::ConvergedTo(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub dt: f64,
    pub t_max: f64,
    /// Converged once `‖g(x)‖ < grad_tol` ...
    pub grad_tol: f64,
    /// ... and `x` is within `point_tol` of a target.
    pub point_tol: f64,
    /// Leaving the region box inflated by this factor counts as divergence.
    pub escape_factor: f64,
    /// Allowed per-step increase of the monitored potential.
    pub lyapunov_tol: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            dt: 1e-3,
            t_max: 200.0,
            grad_tol: 1e-6,
            point_tol: 1e-3,
            escape_factor: 10.0,
            lyapunov_tol: 1e-9,
        }
    }
}

/// A vector field with its attracting targets and region of interest.
pub struct FlowProblem<'a> {
    pub field: &'a FloatMap,
    pub targets: &'a [Vec<f64>],
    pub bounds: &'a BoxSpec,
    /// Optional potential expected to decrease along trajectories.
    pub potential: Option<&'a FloatPoly>,
}

enum Attempt {
    Done(FlowTrace),
    Escaped,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl FlowProblem<'_> {
    fn classify_here(&self, x: &[f64], gnorm: f64, opts: &FlowOptions) -> Option<usize> {
        if gnorm >= opts.grad_tol {
            return None;
        }
        self.targets
            .iter()
            .enumerate()
            .map(|(i, t)| (i, distance(x, t)))
            .filter(|&(_, d)| d < opts.point_tol)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }

    fn attempt(&self, start: &[f64], dt: f64, opts: &FlowOptions, escape: &BoxSpec) -> Attempt {
        let n = start.len();
        let mut s = Scratch::default();
        let mut x = start.to_vec();
        let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut tmp = vec![0.0; n];
        let max_steps = (opts.t_max / dt).ceil() as usize;
        let mut lyap = self.potential.map(|p| {
            (
                p.eval_with(&x, &mut s),
                LyapunovRecord {
                    samples: 1,
                    max_increase: f64::NEG_INFINITY,
                    violations: 0,
                },
            )
        });
        let mut steps = 0;
        loop {
            self.field.eval_into(&x, &mut k1, &mut s);
            let gnorm = norm(&k1);
            if !gnorm.is_finite() {
                return Attempt::Escaped;
            }
            let hit = self.classify_here(&x, gnorm, opts);
            if hit.is_some() || steps >= max_steps {
                return Attempt::Done(FlowTrace {
                    start: start.to_vec(),
                    steps,
                    end: x,
                    classified: hit.map_or(Classification::MaxTimeReached, Classification::ConvergedTo),
                    final_grad_norm: gnorm,
                    dt_used: dt,
                    lyapunov: lyap.map(|(_, r)| r),
                });
            }
            for i in 0..n {
                tmp[i] = x[i] + 0.5 * dt * k1[i];
            }
            self.field.eval_into(&tmp, &mut k2, &mut s);
            for i in 0..n {
                tmp[i] = x[i] + 0.5 * dt * k2[i];
            }
            self.field.eval_into(&tmp, &mut k3, &mut s);
            for i in 0..n {
                tmp[i] = x[i] + dt * k3[i];
            }
            self.field.eval_into(&tmp, &mut k4, &mut s);
            for i in 0..n {
                x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            steps += 1;
            if x.iter().any(|v| !v.is_finite()) || !escape.contains(&x) {
                return Attempt::Escaped;
            }
            if let (Some((prev, rec)), Some(p)) = (lyap.as_mut(), self.potential) {
                let v = p.eval_with(&x, &mut s);
                let inc = v - *prev;
                rec.samples += 1;
                rec.max_increase = rec.max_increase.max(inc);
                if inc > opts.lyapunov_tol {
                    rec.violations += 1;
                }
                *prev = v;
            }
        }
    }
}

/// Fixed-step classical RK4 from `start`.
///
/// A trajectory leaving the escape box (region inflated by
/// `escape_factor`) or turning non-finite is retried once from the start at
/// half the step; if that also escapes it is classified as diverged.
pub fn integrate_flow(problem: &FlowProblem<'_>, start: &[f64], opts: &FlowOptions) -> FlowTrace {
    let escape = problem.bounds.inflate(opts.escape_factor);
    let mut dt = opts.dt;
    for _ in 0..2 {
        match problem.attempt(start, dt, opts, &escape) {
            Attempt::Done(t) => return t,
            Attempt::Escaped => dt *= 0.5,
        }
    }
    FlowTrace {
        start: start.to_vec(),
        steps: 0,
        end: start.to_vec(),
        classified: Classification::Diverged,
        final_grad_norm: f64::INFINITY,
        dt_used: dt * 2.0,
        lyapunov: None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinSample {
    pub fraction_converged: f64,
    /// Per-target counts, indexed like the targets.
    pub converged_counts: Vec<usize>,
    pub max_time_reached: usize,
    pub diverged: usize,
    pub traces: Vec<FlowTrace>,
}

/// Integrates from `num_seeds` points drawn uniformly from the problem's box
/// with a ChaCha stream seeded by `seed`; the draw happens up front so the
/// parallel run is identical to a sequential one.
pub fn basin_sample(
    problem: &FlowProblem<'_>,
    num_seeds: usize,
    seed: u64,
    opts: &FlowOptions,
) -> BasinSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = problem.bounds.dim();
    let starts: Vec<Vec<f64>> = (0..num_seeds)
        .map(|_| {
            let t: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            problem.bounds.lerp(&t)
        })
        .collect();
    let traces: Vec<FlowTrace> = starts
        .par_iter()
        .map(|s| integrate_flow(problem, s, opts))
        .collect();
    let mut converged_counts = vec![0; problem.targets.len()];
    let mut max_time_reached = 0;
    let mut diverged = 0;
    for t in &traces {
        match t.classified {
            Classification::ConvergedTo(i) => converged_counts[i] += 1,
            Classification::MaxTimeReached => max_time_reached += 1,
            Classification::Diverged => diverged += 1,
        }
    }
    let total: usize = converged_counts.iter().sum();
    BasinSample {
        fraction_converged: if num_seeds == 0 {
            0.0
        } else {
            total as f64 / num_seeds as f64
        },
        converged_counts,
        max_time_reached,
        diverged,
        traces,
    }
}
