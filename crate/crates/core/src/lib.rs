//! Exact synthesis of polynomials with a prescribed finite set of critical
//! points, all of them nondegenerate local minima.
//!
//! Given distinct rational points `X ⊂ Rⁿ` (`n ≥ 2`), [`synth::synthesize`]
//! builds a polynomial `P` with `∇P = 0` exactly on `X`, positive definite
//! Hessians there, and no other critical points. The pipeline is:
//!
//! 1. [`coord`]: a polynomial automorphism `F` (linear map then triangular
//!    shear) sending `X` onto the first coordinate axis;
//! 2. [`morse`]: a bivariate `f(x, y)` whose critical set is exactly
//!    `{(a, 0) : α(a) = 0}`;
//! 3. [`synth`]: `Q = f(x₁, x₂) + ½ Σ_{i>2} xᵢ²` and `P = Q ∘ F`.
//!
//! [`verify`] checks all of this independently: exact residues and minors,
//! finite differences, Newton search for spurious critical points, and RK4
//! integration of the resulting flows.

pub mod cli;
pub mod coord;
pub mod error;
pub mod morse;
pub mod poly;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
