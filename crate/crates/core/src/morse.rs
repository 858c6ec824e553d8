//! The planar building block: from a polynomial `α` with simple real zeros
//! `a₁ < … < a_k`, the function
//!
//! ```text
//! f(x, y) = (α(x) − β(x)² y)² − ∫ α(x) β(x) dx,    β = α − α′,
//! ```
//!
//! has critical points exactly at `(aᵢ, 0)`, each a nondegenerate minimum.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{serial, univariate, MultiPoly, Rational};
use crate::verify::{self, CertReport, VerifyConfig};

/// The root set `𝒳 = {a₁ < … < a_k}` of `α(x) = ∏ (x − aᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaSpec {
    #[serde(with = "serial::rational_vec")]
    roots: Vec<Rational>,
}

impl AlphaSpec {
    /// Sorts the roots; rejects an empty list or repeated values.
    pub fn new(mut roots: Vec<Rational>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::EmptyRoots);
        }
        roots.sort();
        if let Some(w) = roots.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Hypothesis(format!(
                "root {} repeated; zeros of alpha must be simple",
                w[0]
            )));
        }
        Ok(AlphaSpec { roots })
    }

    pub fn roots(&self) -> &[Rational] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// `α`, `β = α − α′` and the bivariate `f` (variables `x = x0`, `y = x1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorsePair {
    pub alpha: MultiPoly,
    pub beta: MultiPoly,
    pub f: MultiPoly,
    /// The zeros of `α` when they are known to be rational (always the case
    /// when built from an [`AlphaSpec`]).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<AlphaSpec>,
}

/// Monic `∏ (x − aᵢ)`.
pub fn build_alpha(spec: &AlphaSpec) -> MultiPoly {
    univariate::from_roots(spec.roots())
}

/// Builds `β` and `f` from a univariate `α`.
///
/// `α` must be nonconstant with only simple zeros, checked as
/// `deg gcd(α, α′) = 0`. The anti-derivative is taken with zero constant.
pub fn build_f(alpha: &MultiPoly) -> Result<MorsePair> {
    if alpha.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            left: 1,
            right: alpha.dimension(),
        });
    }
    if alpha.is_constant() {
        return Err(Error::ConstantAlpha);
    }
    let d_alpha = alpha.partial(0)?;
    let g = univariate::gcd(alpha, &d_alpha)?;
    let gcd_degree = g.total_degree().unwrap_or(0) as usize;
    if gcd_degree > 0 {
        return Err(Error::RepeatedRoots { gcd_degree });
    }
    let beta = alpha - &d_alpha;

    let a2 = alpha.extend_dimension(2)?;
    let b2 = beta.extend_dimension(2)?;
    let y = MultiPoly::var(2, 1)?;
    let inner = &a2 - &(&(&b2 * &b2) * &y);
    let integral = (alpha * &beta).antiderivative(0)?.extend_dimension(2)?;
    let f = &(&inner * &inner) - &integral;
    Ok(MorsePair {
        alpha: alpha.clone(),
        beta,
        f,
        roots: None,
    })
}

impl MorsePair {
    /// `build_f(build_alpha(spec))`, remembering the roots.
    pub fn from_spec(spec: &AlphaSpec) -> Result<Self> {
        let mut pair = build_f(&build_alpha(spec))?;
        pair.roots = Some(spec.clone());
        Ok(pair)
    }

    /// The critical points `(aᵢ, 0)` when the roots are known.
    pub fn critical_points(&self) -> Option<Vec<Vec<Rational>>> {
        self.roots.as_ref().map(|s| {
            s.roots()
                .iter()
                .map(|a| vec![a.clone(), Rational::zero()])
                .collect()
        })
    }
}

/// Exact Hessian of `f` at `(x, y)` from its symbolic second partials.
pub fn hessian_f(pair: &MorsePair, point: (&Rational, &Rational)) -> [[Rational; 2]; 2] {
    let at = [point.0.clone(), point.1.clone()];
    let h = pair.f.hessian();
    let e = |i: usize, j: usize| h[i][j].eval_rational(&at).expect("point has length 2");
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Certifies every `(aᵢ, 0)` exactly and runs the numeric spurious-point
/// search over the default box around them.
///
/// A pair without known roots yields a failing report with no points.
pub fn certify_critical_set(pair: &MorsePair, cfg: &VerifyConfig) -> CertReport {
    let points = pair.critical_points().unwrap_or_default();
    verify::certify_polynomial(&pair.f, &points, cfg)
}
