use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::polymap::PolyMap;
use super::rational::{rat_int, Rational};
use super::FloatPoly;
use crate::error::{Error, Result};

/// Sparse polynomial in `dimension` variables with exact rational coefficients.
///
/// No stored term has a zero coefficient; the zero polynomial is the empty map.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        MultiPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(dim), c);
        }
        p
    }

    /// The coordinate polynomial `x_index`.
    pub fn var(dim: usize, index: usize) -> Result<Self> {
        check_index(index, dim)?;
        let mut p = Self::zero(dim);
        p.terms.insert(Monomial::var(dim, index), Rational::one());
        Ok(p)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs. Repeated
    /// monomials are summed and zero coefficients dropped.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    actual: e.len(),
                });
            }
            p.add_term(Monomial::new(e), c);
        }
        Ok(p)
    }

    /// Univariate polynomial from ascending coefficients `c0 + c1 x + ...`.
    pub fn from_coeffs(coeffs: &[Rational]) -> Self {
        let mut p = Self::zero(1);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::new(vec![i as u32]), c.clone());
        }
        p
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, exponents: &[u32]) -> Rational {
        self.terms
            .get(&Monomial::new(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Highest exponent of `var` over all terms (0 for the zero polynomial).
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms
            .keys()
            .map(|m| m.exponents()[var])
            .max()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_constant)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.dim));
        }
        // Accumulate over integer numerators on a common denominator; reducing
        // a BigRational on every partial sum dominates the cost otherwise.
        let (a_den, a_num) = self.integer_form();
        let (b_den, b_num) = other.integer_form();
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &a_num {
            for (mb, cb) in &b_num {
                let m = ma.mul(mb);
                let prod = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(m, prod);
                    }
                }
            }
        }
        let den = a_den * b_den;
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, Rational::new(c, den.clone())))
            .collect();
        Ok(MultiPoly { dim: self.dim, terms })
    }

    /// `(L, [(m, L * c_m)])` with `L` the lcm of coefficient denominators.
    fn integer_form(&self) -> (BigInt, Vec<(Monomial, BigInt)>) {
        use num_integer::Integer;
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.numer() * (&lcm / c.denom())))
            .collect();
        (lcm, terms)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        MultiPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.dim);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Exact partial derivative with respect to `var`.
    pub fn partial(&self, var: usize) -> Result<Self> {
        check_index(var, self.dim)?;
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.exponents()[var];
            if e == 0 {
                continue;
            }
            out.terms
                .insert(m.with_exponent(var, e - 1), c * rat_int(e as i64));
        }
        Ok(out)
    }

    /// Anti-derivative in `var` with zero constant of integration, so that
    /// `partial(antiderivative(p, v), v) == p`.
    pub fn antiderivative(&self, var: usize) -> Result<Self> {
        check_index(var, self.dim)?;
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.exponents()[var] + 1;
            out.terms
                .insert(m.with_exponent(var, e), c / rat_int(e as i64));
        }
        Ok(out)
    }

    /// The gradient `(∂p/∂x_0, ..., ∂p/∂x_{n-1})` as a polynomial map.
    pub fn gradient(&self) -> PolyMap {
        let comps = (0..self.dim)
            .map(|i| self.partial(i).expect("index in range"))
            .collect();
        PolyMap::new(self.dim, comps).expect("components share dimension")
    }

    /// Symbolic Hessian, `h[i][j] = ∂²p/∂x_i∂x_j`.
    pub fn hessian(&self) -> Vec<Vec<MultiPoly>> {
        let grad = self.gradient();
        grad.components()
            .iter()
            .map(|gi| {
                (0..self.dim)
                    .map(|j| gi.partial(j).expect("index in range"))
                    .collect()
            })
            .collect()
    }

    /// Substitutes `m.components()[i]` for `x_i`.
    ///
    /// Evaluated as a nested Horner scheme, outermost in `x_0`, so large
    /// intermediate products are only ever multiplied by a single component.
    pub fn compose(&self, m: &PolyMap) -> Result<Self> {
        if m.components().len() != self.dim {
            return Err(Error::ArityMismatch {
                expected: self.dim,
                actual: m.components().len(),
            });
        }
        let terms: Vec<(&[u32], &Rational)> = self
            .terms
            .iter()
            .map(|(k, c)| (k.exponents(), c))
            .collect();
        Ok(horner(&terms, 0, m))
    }

    /// Exact evaluation at a rational point.
    ///
    /// With `xᵢ = aᵢ/bᵢ`, `Kᵢ` the degree in `xᵢ` and `L` the lcm of the
    /// coefficient denominators, the sum runs over integers
    /// `L c_m ∏ aᵢ^{mᵢ} bᵢ^{Kᵢ−mᵢ}` and is reduced once over `L ∏ bᵢ^{Kᵢ}`.
    pub fn eval_rational(&self, x: &[Rational]) -> Result<Rational> {
        use num_integer::Integer;
        if x.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        let powers = |base: &BigInt, k: u32| {
            let mut v = Vec::with_capacity(k as usize + 1);
            v.push(BigInt::one());
            for _ in 0..k {
                let next = v.last().unwrap() * base;
                v.push(next);
            }
            v
        };
        let degrees: Vec<u32> = (0..self.dim).map(|i| self.degree_in(i)).collect();
        let num_pows: Vec<Vec<BigInt>> = x.iter().zip(&degrees).map(|(v, &k)| powers(v.numer(), k)).collect();
        let den_pows: Vec<Vec<BigInt>> = x.iter().zip(&degrees).map(|(v, &k)| powers(v.denom(), k)).collect();
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let mut sum = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.numer() * (&lcm / c.denom());
            for (i, &e) in m.exponents().iter().enumerate() {
                let k = degrees[i];
                if e != 0 {
                    t *= &num_pows[i][e as usize];
                }
                if e != k {
                    t *= &den_pows[i][(k - e) as usize];
                }
            }
            sum += t;
        }
        let den = den_pows
            .iter()
            .zip(&degrees)
            .fold(lcm, |d, (p, &k)| d * &p[k as usize]);
        Ok(Rational::new(sum, den))
    }

    /// Double-precision evaluation; terms are visited in canonical order and
    /// combined by pairwise summation, so results are reproducible.
    pub fn eval_float(&self, x: &[f64]) -> Result<f64> {
        FloatPoly::new(self).eval(x)
    }

    /// Reinterprets the polynomial in `new_dim >= dimension` variables; the
    /// extra variables do not occur.
    pub fn extend_dimension(&self, new_dim: usize) -> Result<Self> {
        if new_dim < self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: new_dim,
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.exponents().to_vec();
                e.resize(new_dim, 0);
                (Monomial::new(e), c.clone())
            })
            .collect();
        Ok(MultiPoly { dim: new_dim, terms })
    }

    /// Largest absolute coefficient, `None` for zero.
    pub fn max_abs_coeff(&self) -> Option<Rational> {
        self.terms.values().map(|c| c.abs()).max()
    }
}

fn check_index(index: usize, dim: usize) -> Result<()> {
    if index >= dim {
        return Err(Error::IndexOutOfRange {
            index,
            dimension: dim,
        });
    }
    Ok(())
}

fn horner(terms: &[(&[u32], &Rational)], var: usize, m: &PolyMap) -> MultiPoly {
    let target = m.domain_dim();
    if terms.is_empty() {
        return MultiPoly::zero(target);
    }
    if var == m.components().len() {
        let c: Rational = terms.iter().map(|(_, c)| (*c).clone()).sum();
        return MultiPoly::constant(target, c);
    }
    let mut groups: BTreeMap<u32, Vec<(&[u32], &Rational)>> = BTreeMap::new();
    for &(e, c) in terms {
        groups.entry(e[var]).or_default().push((e, c));
    }
    let comp = &m.components()[var];
    let mut acc = MultiPoly::zero(target);
    let mut prev: Option<u32> = None;
    for (&e, group) in groups.iter().rev() {
        if let Some(p) = prev {
            acc = &acc * &comp.pow(p - e);
        }
        acc = &acc + &horner(group, var + 1, m);
        prev = Some(e);
    }
    if let Some(p) = prev {
        if p > 0 {
            acc = &acc * &comp.pow(p);
        }
    }
    acc
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    /// Panics on dimension mismatch; use [`MultiPoly::try_add`] to handle it.
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_add(rhs).expect("polynomial dimensions agree")
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_sub(rhs).expect("polynomial dimensions agree")
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_mul(rhs).expect("polynomial dimensions agree")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// Human-readable form, highest term first: `x0^2*x1 - 1/2*x1 + 3`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        format!("x{v}")
                    } else {
                        format!("x{v}^{e}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{abs}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.dim, self)
    }
}
