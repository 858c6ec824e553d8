use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{leading_minors, newton_search, BoxSpec, VerifyConfig};
use crate::poly::{serial, MultiPoly, Rational};

/// Exact certificate for one claimed critical point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCert {
    #[serde(with = "serial::rational_vec")]
    pub point: Vec<Rational>,
    #[serde(with = "serial::rational_vec")]
    pub gradient_residual: Vec<Rational>,
    pub gradient_zero: bool,
    #[serde(with = "serial::rational_vec")]
    pub minors: Vec<Rational>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpuriousSearch {
    pub bounds: BoxSpec,
    pub seeds_used: usize,
    pub abandoned_seeds: usize,
    pub converged_points: Vec<Vec<f64>>,
    pub all_within_tol_of_x: bool,
    /// Every point of `X` was reached by some seed.
    pub covers_x: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub per_point: Vec<PointCert>,
    pub spurious_search: SpuriousSearch,
    pub overall_pass: bool,
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Certifies that `p` has nondegenerate minima at `points` (exactly) and no
/// other critical points in the search box (numerically).
pub fn certify_polynomial(p: &MultiPoly, points: &[Vec<Rational>], cfg: &VerifyConfig) -> CertReport {
    let grad = p.gradient();
    let hess = p.hessian();
    let per_point: Vec<PointCert> = points
        .iter()
        .map(|x| {
            let gradient_residual: Vec<Rational> = grad
                .eval_rational(x)
                .unwrap_or_else(|_| vec![Rational::from_integer(1.into())]);
            let gradient_zero = gradient_residual.iter().all(Zero::is_zero);
            let h: Vec<Vec<Rational>> = hess
                .iter()
                .map(|row| row.iter().map(|e| e.eval_rational(x).unwrap_or_default()).collect())
                .collect();
            let minors = leading_minors(&h);
            let pass = gradient_zero && minors.iter().all(|m| m > &Rational::zero());
            PointCert {
                point: x.clone(),
                gradient_residual,
                gradient_zero,
                minors,
                pass,
            }
        })
        .collect();

    use num_traits::ToPrimitive;
    let xs_f: Vec<Vec<f64>> = points
        .iter()
        .map(|x| x.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect())
        .collect();
    let bounds = match (&cfg.bounds, xs_f.is_empty()) {
        (Some(b), _) => b.clone(),
        (None, false) => BoxSpec::around(&xs_f),
        (None, true) => BoxSpec::around(&[vec![0.0; p.dimension()]]),
    };
    let outcome = newton_search(&grad, &bounds, cfg.seeds_per_axis, cfg);
    let near_x = |c: &Vec<f64>| xs_f.iter().any(|x| distance(c, x) <= cfg.match_tol);
    let all_within_tol_of_x = outcome.converged.iter().all(near_x);
    let covers_x = xs_f.iter().all(|x| {
        outcome
            .converged
            .iter()
            .any(|c| distance(c, x) <= cfg.match_tol)
    });
    let spurious_search = SpuriousSearch {
        bounds,
        seeds_used: outcome.seeds_used,
        abandoned_seeds: outcome.abandoned(),
        converged_points: outcome.converged,
        all_within_tol_of_x,
        covers_x,
    };
    let overall_pass =
        !per_point.is_empty() && per_point.iter().all(|c| c.pass) && all_within_tol_of_x;
    CertReport {
        per_point,
        spurious_search,
        overall_pass,
    }
}
