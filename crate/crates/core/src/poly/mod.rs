//! Exact sparse multivariate polynomials over the rationals.
//!
//! Everything downstream (the bivariate Morse function, the coordinate
//! change, the synthesized polynomial and its vector fields) is carried by
//! [`MultiPoly`] and [`PolyMap`]. Coefficients are arbitrary-precision
//! rationals; nothing in this module rounds except [`MultiPoly::eval_float`]
//! and the compiled [`FloatPoly`] evaluators.

mod float;
mod monomial;
mod multipoly;
mod polymap;
mod rational;
pub mod serial;
pub mod univariate;

pub use float::{FloatMap, FloatPoly, Scratch};
pub use monomial::Monomial;
pub use multipoly::MultiPoly;
pub use polymap::{det_rational, inverse_rational, PolyMap};
pub use rational::{format_rational, parse_rational, rat, rat_int, rational_from_f64, Rational};
