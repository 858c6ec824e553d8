//! Dense univariate helpers over the rationals.

use num_traits::{One, Zero};

use super::{MultiPoly, Rational};
use crate::error::{Error, Result};

/// Ascending coefficient vector of a one-variable polynomial, no trailing zeros.
pub fn to_dense(p: &MultiPoly) -> Result<Vec<Rational>> {
    if p.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            left: 1,
            right: p.dimension(),
        });
    }
    let deg = p.total_degree().map_or(0, |d| d as usize + 1);
    let mut v = vec![Rational::zero(); deg];
    for (m, c) in p.terms() {
        v[m.exponents()[0] as usize] = c.clone();
    }
    Ok(v)
}

fn trim(v: &mut Vec<Rational>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db {
        let top = r.len() - 1;
        let q = &r[top] / lead;
        let shift = top - db;
        for (i, bc) in b.iter().enumerate() {
            let sub = &q * bc;
            r[shift + i] -= sub;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Monic gcd by the Euclidean algorithm; the zero polynomial if both are zero.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
    let mut x = to_dense(a)?;
    let mut y = to_dense(b)?;
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in &mut x {
            *c /= &lead;
        }
    }
    Ok(MultiPoly::from_coeffs(&x))
}

/// `∏ (x - r)` over the given roots, as a one-variable polynomial.
pub fn from_roots(roots: &[Rational]) -> MultiPoly {
    let x = MultiPoly::var(1, 0).expect("index in range");
    roots.iter().fold(MultiPoly::one(1), |acc, r| {
        &acc * &(&x - &MultiPoly::constant(1, r.clone()))
    })
}

/// Lagrange interpolant through `(xs[i], ys[i])`, built from the classical basis
/// `∏_{m≠i} (z - x_m) / (x_i - x_m)`.
pub fn lagrange(xs: &[Rational], ys: &[Rational]) -> Result<MultiPoly> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            actual: ys.len(),
        });
    }
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            if xs[i] == xs[j] {
                return Err(Error::DuplicateNodes(xs[i].to_string()));
            }
        }
    }
    let mut out = MultiPoly::zero(1);
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let others: Vec<Rational> = xs
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != i)
            .map(|(_, v)| v.clone())
            .collect();
        let denom: Rational = others.iter().fold(Rational::one(), |acc, xm| acc * (xi - xm));
        let basis = from_roots(&others).scale(&(yi / denom));
        out = &out + &basis;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_int};

    #[test]
    fn gcd_detects_repeated_roots() {
        let sq = from_roots(&[rat_int(1), rat_int(1), rat_int(2)]);
        let d = sq.partial(0).unwrap();
        let g = gcd(&sq, &d).unwrap();
        assert_eq!(g, from_roots(&[rat_int(1)]));
        let simple = from_roots(&[rat(1, 3), rat(1, 2), rat_int(2)]);
        let g = gcd(&simple, &simple.partial(0).unwrap()).unwrap();
        assert_eq!(g, MultiPoly::one(1));
    }

    #[test]
    fn lagrange_examples() {
        let p = lagrange(&[rat_int(0), rat_int(1)], &[rat_int(0), rat_int(1)]).unwrap();
        assert_eq!(p, MultiPoly::var(1, 0).unwrap());
        let c = lagrange(&[rat_int(3)], &[rat_int(5)]).unwrap();
        assert_eq!(c, MultiPoly::constant(1, rat_int(5)));
        assert!(matches!(
            lagrange(&[rat_int(1), rat_int(1)], &[rat_int(0), rat_int(2)]),
            Err(Error::DuplicateNodes(_))
        ));
    }
}
