use num_traits::ToPrimitive;

use crate::poly::{rational_from_f64, FloatMap, FloatPoly, MultiPoly, PolyMap, Rational, Scratch};

/// Compares symbolic partials of a polynomial against central differences.
pub struct GradientChecker {
    p: MultiPoly,
    grad: PolyMap,
    value_f: FloatPoly,
    grad_f: FloatMap,
}

fn relative(dev: f64, sym: &[f64]) -> f64 {
    let scale = sym.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale > 0.0 {
        dev / scale
    } else {
        dev
    }
}

impl GradientChecker {
    pub fn new(p: &MultiPoly) -> Self {
        let grad = p.gradient();
        GradientChecker {
            p: p.clone(),
            value_f: FloatPoly::new(p),
            grad_f: FloatMap::new(&grad),
            grad,
        }
    }

    /// Largest deviation `|∂ᵢp(x) − (p(x⁺) − p(x⁻))/(x⁺ᵢ − x⁻ᵢ)|` over
    /// components, relative to `‖∇p(x)‖∞` (absolute when the gradient
    /// vanishes), where `x^± = x ± h eᵢ` rounded to doubles.
    ///
    /// Values and partials are computed exactly at those double nodes and
    /// rounded once, so what is measured is the truncation error of the
    /// difference quotient. Plain double evaluation of high-degree `p` can
    /// lose every digit to cancellation; [`GradientChecker::check_float`]
    /// shows how much.
    ///
    /// Non-finite values give `f64::INFINITY`.
    pub fn check(&self, x: &[f64], h: f64) -> f64 {
        let exact = |v: &[f64]| -> Option<Vec<Rational>> { v.iter().map(|&c| rational_from_f64(c)).collect() };
        let Some(xq) = exact(x) else {
            return f64::INFINITY;
        };
        let Ok(sym) = self.grad.eval_rational(&xq) else {
            return f64::INFINITY;
        };
        let sym: Vec<f64> = sym.iter().map(|v| v.to_f64().unwrap_or(f64::INFINITY)).collect();
        let mut max_dev = 0.0f64;
        for i in 0..x.len() {
            let (up, down) = (x[i] + h, x[i] - h);
            if up <= down || !up.is_finite() || !down.is_finite() {
                return f64::INFINITY;
            }
            let mut xp = xq.clone();
            let mut xm = xq.clone();
            let (Some(u), Some(d)) = (rational_from_f64(up), rational_from_f64(down)) else {
                return f64::INFINITY;
            };
            xp[i] = u.clone();
            xm[i] = d.clone();
            let (Ok(fp), Ok(fm)) = (self.p.eval_rational(&xp), self.p.eval_rational(&xm)) else {
                return f64::INFINITY;
            };
            let fd = ((fp - fm) / (u - d)).to_f64().unwrap_or(f64::INFINITY);
            let dev = (sym[i] - fd).abs();
            if !dev.is_finite() {
                return f64::INFINITY;
            }
            max_dev = max_dev.max(dev);
        }
        relative(max_dev, &sym)
    }

    /// The same comparison with every evaluation in double precision.
    pub fn check_float(&self, x: &[f64], h: f64) -> f64 {
        let n = x.len();
        let mut scratch = Scratch::default();
        let mut sym = vec![0.0; n];
        self.grad_f.eval_into(x, &mut sym, &mut scratch);
        let mut xp = x.to_vec();
        let mut max_dev = 0.0f64;
        for i in 0..n {
            xp[i] = x[i] + h;
            let fwd = self.value_f.eval_with(&xp, &mut scratch);
            xp[i] = x[i] - h;
            let bwd = self.value_f.eval_with(&xp, &mut scratch);
            xp[i] = x[i];
            let dev = (sym[i] - (fwd - bwd) / (2.0 * h)).abs();
            if !dev.is_finite() {
                return f64::INFINITY;
            }
            max_dev = max_dev.max(dev);
        }
        relative(max_dev, &sym)
    }
}

/// One-shot form of [`GradientChecker::check`].
pub fn fd_gradient_check(p: &MultiPoly, x: &[f64], h: f64) -> f64 {
    if x.len() != p.dimension() || x.iter().any(|v| !v.is_finite()) || h.is_nan() || h <= 0.0 {
        return f64::INFINITY;
    }
    GradientChecker::new(p).check(x, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_int;

    #[test]
    fn quadratic_is_nearly_exact() {
        let p = MultiPoly::var(1, 0).unwrap().pow(2);
        assert!(fd_gradient_check(&p, &[1.0], 1e-6) <= 1e-9);
        assert!(GradientChecker::new(&p).check_float(&[1.0], 1e-6) <= 1e-9);
    }

    #[test]
    fn exact_nodes_survive_cancellation() {
        // (x − 1)²⁰ expanded: huge alternating coefficients, tiny values near 1
        let x = MultiPoly::var(1, 0).unwrap();
        let p = (&x - &MultiPoly::one(1)).pow(20);
        let c = GradientChecker::new(&p);
        assert!(c.check(&[1.5], 1e-6) <= 1e-9);
        assert!(c.check_float(&[1.5], 1e-6) > 1e-3);
    }

    #[test]
    fn constant_has_zero_error() {
        let p = MultiPoly::constant(2, rat_int(7));
        assert_eq!(fd_gradient_check(&p, &[0.3, -2.0], 1e-6), 0.0);
    }

    #[test]
    fn bad_inputs_report_infinity() {
        let p = MultiPoly::var(2, 0).unwrap();
        assert_eq!(fd_gradient_check(&p, &[f64::NAN, 0.0], 1e-6), f64::INFINITY);
        assert_eq!(fd_gradient_check(&p, &[0.0, 0.0], 0.0), f64::INFINITY);
        assert_eq!(fd_gradient_check(&p, &[0.0], 1e-6), f64::INFINITY);
        let big = MultiPoly::var(1, 0).unwrap().pow(400);
        assert_eq!(fd_gradient_check(&big, &[1e3], 1e-6), f64::INFINITY);
    }
}
