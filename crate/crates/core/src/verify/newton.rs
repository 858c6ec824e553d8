use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::report::distance;
use super::{BoxSpec, VerifyConfig};
use crate::poly::{rational_from_f64, FloatMap, FloatPoly, MultiPoly, PolyMap, Rational, Scratch};

/// A Newton step no longer than `STEP_TOL · (1 + ‖x‖∞)` counts as collapsed.
const STEP_TOL: f64 = 1e-10;
/// The float gradient is noise once `‖g‖∞ ≤ NOISE · max_i Σ|terms of gᵢ|`.
const NOISE: f64 = 64.0 * f64::EPSILON;
const POLISH_ITERS: usize = 8;

/// Newton iteration on `∇P = 0`, compiled once and reused for every seed.
///
/// Iterates in double precision until the float residual drops below
/// `residual_tol`, the step collapses, or the residual sinks into the
/// rounding noise of the evaluator. From there, provided the iterate lies in
/// the search box, at most a few polishing steps use the gradient and Hessian
/// evaluated *exactly* at the double iterate (converted without rounding) and
/// rounded once. The seed converges when such a step collapses. For
/// polynomials with large coefficients the float gradient can cancel to
/// exactly zero far from any critical point; the exact residual does not.
pub struct NewtonSearch {
    grad: FloatMap,
    jac: Vec<FloatPoly>,
    exact_grad: PolyMap,
    exact_jac: Vec<MultiPoly>,
    n: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum SeedResult {
    Converged(Vec<f64>),
    Singular,
    Escaped,
    Exhausted,
    Unconfirmed,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NewtonOutcome {
    /// Deduplicated converged points, in order of the first seed reaching each.
    pub converged: Vec<Vec<f64>>,
    pub seeds_used: usize,
    pub singular: usize,
    /// Left the search box (inflated 10³ while iterating) or went non-finite.
    pub escaped: usize,
    pub exhausted: usize,
    /// Float residual vanished but exact polishing did not settle.
    pub unconfirmed: usize,
}

impl NewtonOutcome {
    pub fn abandoned(&self) -> usize {
        self.singular + self.escaped + self.exhausted + self.unconfirmed
    }
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn solve(h: DMatrix<f64>, g: &[f64]) -> Option<DVector<f64>> {
    let rhs = DVector::from_iterator(g.len(), g.iter().map(|v| -v));
    let step = h.lu().solve(&rhs)?;
    step.iter().all(|v| v.is_finite()).then_some(step)
}

fn collapsed(step: &DVector<f64>, x: &[f64]) -> bool {
    step.amax() <= STEP_TOL * (1.0 + max_abs(x.iter().copied()))
}

impl NewtonSearch {
    /// `grad` must be the gradient map of a scalar polynomial; its Jacobian
    /// (the Hessian) is derived symbolically.
    pub fn new(grad: &PolyMap) -> Self {
        let n = grad.domain_dim();
        let exact_jac: Vec<MultiPoly> = grad.jacobian().into_iter().flatten().collect();
        NewtonSearch {
            grad: FloatMap::new(grad),
            jac: exact_jac.iter().map(FloatPoly::new).collect(),
            exact_grad: grad.clone(),
            exact_jac,
            n,
        }
    }

    fn float_hessian(&self, x: &[f64], scratch: &mut Scratch) -> DMatrix<f64> {
        DMatrix::from_row_iterator(self.n, self.n, self.jac.iter().map(|p| p.eval_with(x, scratch)))
    }

    fn in_noise(&self, x: &[f64], g: &[f64], scratch: &mut Scratch) -> bool {
        self.grad
            .components()
            .iter()
            .zip(g)
            .all(|(c, v)| v.abs() <= NOISE * c.eval_abs_with(x, scratch))
    }

    /// One Newton step with exact values at `x`, rounded once. `None` when
    /// undefined; a zero vector when the exact gradient vanishes.
    fn exact_step(&self, x: &[f64]) -> Option<DVector<f64>> {
        let q: Vec<Rational> = x.iter().map(|&v| rational_from_f64(v)).collect::<Option<_>>()?;
        let to_f = |v: Rational| v.to_f64().filter(|f| f.is_finite());
        let g: Vec<f64> = self
            .exact_grad
            .eval_rational(&q)
            .ok()?
            .into_iter()
            .map(to_f)
            .collect::<Option<_>>()?;
        if g.iter().all(|v| *v == 0.0) {
            return Some(DVector::zeros(self.n));
        }
        let h: Vec<f64> = self
            .exact_jac
            .iter()
            .map(|p| p.eval_rational(&q).ok().and_then(to_f))
            .collect::<Option<_>>()?;
        solve(DMatrix::from_row_slice(self.n, self.n, &h), &g)
    }

    fn polish(&self, mut x: Vec<f64>, escape: &BoxSpec) -> SeedResult {
        for _ in 0..POLISH_ITERS {
            let Some(step) = self.exact_step(&x) else {
                return SeedResult::Unconfirmed;
            };
            let done = collapsed(&step, &x);
            for (xi, di) in x.iter_mut().zip(step.iter()) {
                *xi += di;
            }
            if done {
                return SeedResult::Converged(x);
            }
            if !escape.contains(&x) {
                return SeedResult::Escaped;
            }
        }
        SeedResult::Unconfirmed
    }

    fn run(&self, seed: &[f64], bounds: &BoxSpec, escape: &BoxSpec, cfg: &VerifyConfig) -> SeedResult {
        let mut scratch = Scratch::default();
        let mut x = seed.to_vec();
        let mut g = vec![0.0; self.n];
        for _ in 0..=cfg.max_newton_iter {
            self.grad.eval_into(&x, &mut g, &mut scratch);
            if g.iter().any(|v| !v.is_finite()) {
                return SeedResult::Escaped;
            }
            let step = solve(self.float_hessian(&x, &mut scratch), &g);
            let settled = max_abs(g.iter().copied()) < cfg.residual_tol
                || step.as_ref().is_some_and(|s| collapsed(s, &x))
                || self.in_noise(&x, &g, &mut scratch);
            if settled {
                if !bounds.contains(&x) {
                    return SeedResult::Escaped;
                }
                return match self.polish(x, escape) {
                    SeedResult::Converged(c) if !bounds.contains(&c) => SeedResult::Escaped,
                    other => other,
                };
            }
            let Some(step) = step else {
                return SeedResult::Singular;
            };
            for (xi, di) in x.iter_mut().zip(step.iter()) {
                *xi += di;
            }
            if !escape.contains(&x) {
                return SeedResult::Escaped;
            }
        }
        SeedResult::Exhausted
    }

    /// Runs from every node of a `seeds_per_axis`ⁿ grid spanning `bounds`
    /// (endpoints included).
    pub fn search(&self, bounds: &BoxSpec, seeds_per_axis: usize, cfg: &VerifyConfig) -> NewtonOutcome {
        let s = seeds_per_axis.max(2);
        let total = s.pow(self.n as u32);
        let escape = bounds.inflate(1e3);
        let results: Vec<SeedResult> = (0..total)
            .into_par_iter()
            .map(|idx| {
                let mut rem = idx;
                let t: Vec<f64> = (0..self.n)
                    .map(|_| {
                        let i = rem % s;
                        rem /= s;
                        i as f64 / (s - 1) as f64
                    })
                    .collect();
                self.run(&bounds.lerp(&t), bounds, &escape, cfg)
            })
            .collect();

        let mut out = NewtonOutcome {
            seeds_used: total,
            ..Default::default()
        };
        for r in results {
            match r {
                SeedResult::Converged(x) => {
                    if !out.converged.iter().any(|c| distance(c, &x) < cfg.dedup_tol) {
                        out.converged.push(x);
                    }
                }
                SeedResult::Singular => out.singular += 1,
                SeedResult::Escaped => out.escaped += 1,
                SeedResult::Exhausted => out.exhausted += 1,
                SeedResult::Unconfirmed => out.unconfirmed += 1,
            }
        }
        out
    }
}

/// Newton search for zeros of `grad` from a uniform seed grid over `bounds`.
pub fn newton_search(
    grad: &PolyMap,
    bounds: &BoxSpec,
    seeds_per_axis: usize,
    cfg: &VerifyConfig,
) -> NewtonOutcome {
    NewtonSearch::new(grad).search(bounds, seeds_per_axis, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, MultiPoly};

    #[test]
    fn quadratic_bowl_has_only_the_origin() {
        let n = 3;
        let half_sq = (0..n).fold(MultiPoly::zero(n), |acc, i| {
            &acc + &MultiPoly::var(n, i).unwrap().pow(2).scale(&rat(1, 2))
        });
        let grad = half_sq.gradient();
        let b = BoxSpec::around(&[vec![0.0; n]]);
        let out = newton_search(&grad, &b, 4, &VerifyConfig::default());
        assert_eq!(out.seeds_used, 64);
        assert_eq!(out.abandoned(), 0);
        assert_eq!(out.converged.len(), 1);
        assert!(out.converged[0].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn singular_seeds_are_counted() {
        // ∇(x⁴/4 + y²/2) = (x³, y): Hessian singular along x = 0.
        let x = MultiPoly::var(2, 0).unwrap();
        let y = MultiPoly::var(2, 1).unwrap();
        let p = &x.pow(4).scale(&rat(1, 4)) + &y.pow(2).scale(&rat(1, 2));
        let b = BoxSpec::new(vec![-1.0, -1.0], vec![1.0, 1.0], "test").unwrap();
        let out = newton_search(&p.gradient(), &b, 3, &VerifyConfig::default());
        assert_eq!(out.seeds_used, 9);
        // seeds (0, ±1): nonzero residual, singular Hessian
        assert_eq!(out.singular, 2);
    }
}
