//! Independent checks of a synthesized polynomial and of its flows.
//!
//! The exact side recomputes gradient residues and Hessian minors in rational
//! arithmetic. The numeric side compares symbolic partials against central
//! differences, hunts for stray critical points with Newton's method from a
//! seed grid, counts eigenvalue signs, and integrates gradient-type flows with
//! fixed-step RK4. Seeds and flows run in parallel; results are merged in seed
//! order so they match a sequential run bit for bit.

mod bounds;
mod eigen;
mod fd;
mod flow;
mod newton;
mod report;

use num_traits::Zero;

use crate::poly::{det_rational, MultiPoly, Rational};

pub use bounds::BoxSpec;
pub use eigen::{eigen_signs, EigenSigns};
pub use fd::{fd_gradient_check, GradientChecker};
pub use flow::{
    basin_sample, integrate_flow, BasinSample, Classification, FlowOptions, FlowProblem,
    FlowTrace, LyapunovRecord,
};
pub use newton::{newton_search, NewtonOutcome, NewtonSearch};
pub use report::{certify_polynomial, CertReport, PointCert, SpuriousSearch};

/// Tolerances for Newton search and certification.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VerifyConfig {
    /// A float residual `‖∇P‖∞` below this nominates a Newton iterate for the
    /// exact confirmation described on [`NewtonSearch`].
    pub residual_tol: f64,
    /// Converged points closer than this are merged.
    pub dedup_tol: f64,
    pub max_newton_iter: usize,
    pub seeds_per_axis: usize,
    /// A converged point counts as a point of `X` within this distance.
    pub match_tol: f64,
    /// Search region; the standard box around `X` when `None`.
    pub bounds: Option<BoxSpec>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            residual_tol: 1e-12,
            dedup_tol: 1e-8,
            max_newton_iter: 100,
            seeds_per_axis: 10,
            match_tol: 1e-6,
            bounds: None,
        }
    }
}

/// Exact Hessian of `p` at `x`.
pub fn hessian_exact(p: &MultiPoly, x: &[Rational]) -> crate::Result<Vec<Vec<Rational>>> {
    p.hessian()
        .iter()
        .map(|row| row.iter().map(|h| h.eval_rational(x)).collect())
        .collect()
}

/// Leading principal minors `det(H[..1,..1]), …, det(H)`.
pub fn leading_minors(h: &[Vec<Rational>]) -> Vec<Rational> {
    (1..=h.len())
        .map(|k| {
            let sub: Vec<Vec<Rational>> = h[..k].iter().map(|r| r[..k].to_vec()).collect();
            det_rational(&sub)
        })
        .collect()
}

/// Sylvester's criterion on exact minors.
pub fn is_positive_definite(h: &[Vec<Rational>]) -> bool {
    leading_minors(h).iter().all(|m| m > &Rational::zero())
}

pub fn to_f64_matrix(m: &[Vec<Rational>]) -> Vec<Vec<f64>> {
    use num_traits::ToPrimitive;
    m.iter()
        .map(|r| r.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect())
        .collect()
}
