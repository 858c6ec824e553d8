use num_traits::ToPrimitive;

use super::multipoly::MultiPoly;
use super::polymap::PolyMap;
use crate::error::{Error, Result};

/// A [`MultiPoly`] with coefficients rounded to `f64`, laid out for fast
/// repeated evaluation.
///
/// Terms are kept in canonical order (highest graded-lex first) and summed
/// pairwise, so a given polynomial and point always produce the same bits.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    dim: usize,
    max_exp: usize,
    coeffs: Vec<f64>,
    /// Nonzero `(variable, exponent)` factors of every term, back to back.
    factors: Vec<(u32, u32)>,
    /// Term `t` owns `factors[ends[t - 1]..ends[t]]`.
    ends: Vec<usize>,
}

/// Reusable buffers for evaluation in hot loops.
#[derive(Default, Clone, Debug)]
pub struct Scratch {
    powers: Vec<f64>,
    values: Vec<f64>,
}

const PAIRWISE_BLOCK: usize = 8;

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= PAIRWISE_BLOCK {
        let mut s = 0.0;
        for &x in v {
            s += x;
        }
        s
    } else {
        let mid = v.len() / 2;
        pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
    }
}

fn check_point(x: &[f64], dim: usize) -> Result<()> {
    if x.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            actual: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn fill_powers(x: &[f64], max_exp: usize, powers: &mut Vec<f64>) {
    let stride = max_exp + 1;
    powers.clear();
    powers.resize(x.len() * stride, 1.0);
    for (v, &xv) in x.iter().enumerate() {
        let row = &mut powers[v * stride..(v + 1) * stride];
        for e in 1..stride {
            row[e] = row[e - 1] * xv;
        }
    }
}

impl FloatPoly {
    pub fn new(p: &MultiPoly) -> Self {
        let dim = p.dimension();
        let mut coeffs = Vec::with_capacity(p.num_terms());
        let mut factors = Vec::new();
        let mut ends = Vec::with_capacity(p.num_terms());
        let mut max_exp = 0usize;
        for (m, c) in p.terms().rev() {
            coeffs.push(c.to_f64().unwrap_or(f64::NAN));
            for (v, &e) in m.exponents().iter().enumerate() {
                if e != 0 {
                    max_exp = max_exp.max(e as usize);
                    factors.push((v as u32, e));
                }
            }
            ends.push(factors.len());
        }
        FloatPoly {
            dim,
            max_exp,
            coeffs,
            factors,
            ends,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_point(x, self.dim)?;
        Ok(self.eval_with(x, &mut Scratch::default()))
    }

    /// Evaluation without input validation; `x.len()` must equal the dimension.
    pub fn eval_with(&self, x: &[f64], scratch: &mut Scratch) -> f64 {
        fill_powers(x, self.max_exp, &mut scratch.powers);
        self.eval_terms(&scratch.powers, self.max_exp + 1, &mut scratch.values, false)
    }

    /// `Σ |c_m x^m|`, the magnitude scale against which rounding error in
    /// [`FloatPoly::eval_with`] is measured.
    pub fn eval_abs_with(&self, x: &[f64], scratch: &mut Scratch) -> f64 {
        fill_powers(x, self.max_exp, &mut scratch.powers);
        self.eval_terms(&scratch.powers, self.max_exp + 1, &mut scratch.values, true)
    }

    /// `powers[v * stride + k]` must hold `x_v^k` for every `k ≤ max_exp`.
    fn eval_terms(&self, powers: &[f64], stride: usize, values: &mut Vec<f64>, abs: bool) -> f64 {
        values.clear();
        let mut start = 0;
        for (&c, &end) in self.coeffs.iter().zip(&self.ends) {
            let mut v = c;
            for &(var, k) in &self.factors[start..end] {
                v *= powers[var as usize * stride + k as usize];
            }
            start = end;
            values.push(if abs { v.abs() } else { v });
        }
        pairwise_sum(values)
    }
}

/// Float evaluator for every component of a [`PolyMap`].
#[derive(Clone, Debug)]
pub struct FloatMap {
    domain_dim: usize,
    max_exp: usize,
    components: Vec<FloatPoly>,
}

impl FloatMap {
    pub fn new(m: &PolyMap) -> Self {
        let components: Vec<FloatPoly> = m.components().iter().map(FloatPoly::new).collect();
        FloatMap {
            domain_dim: m.domain_dim(),
            max_exp: components.iter().map(|c| c.max_exp).max().unwrap_or(0),
            components,
        }
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[FloatPoly] {
        &self.components
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_point(x, self.domain_dim)?;
        let mut out = vec![0.0; self.components.len()];
        self.eval_into(x, &mut out, &mut Scratch::default());
        Ok(out)
    }

    /// One shared power table for all components; `x.len()` must equal the
    /// domain dimension.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64], scratch: &mut Scratch) {
        fill_powers(x, self.max_exp, &mut scratch.powers);
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval_terms(&scratch.powers, self.max_exp + 1, &mut scratch.values, false);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_int};

    #[test]
    fn pairwise_sum_matches_small_cases() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 5050.0);
    }

    #[test]
    fn evaluates_in_canonical_order() {
        let p = MultiPoly::from_terms(
            2,
            vec![
                (vec![2, 0], rat_int(1)),
                (vec![0, 1], rat(1, 2)),
                (vec![0, 0], rat_int(-3)),
            ],
        )
        .unwrap();
        let fp = FloatPoly::new(&p);
        assert_eq!(fp.eval(&[2.0, 4.0]).unwrap(), 3.0);
        let mut s = Scratch::default();
        assert_eq!(fp.eval_abs_with(&[2.0, -4.0], &mut s), 9.0);
    }

    #[test]
    fn map_eval() {
        let m = PolyMap::identity(3);
        let fm = FloatMap::new(&m);
        assert_eq!(fm.eval(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(fm.eval(&[1.0, f64::INFINITY, 3.0]).is_err());
    }
}
