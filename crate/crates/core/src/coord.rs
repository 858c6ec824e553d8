//! Polynomial automorphisms flattening a finite point set onto the first axis.
//!
//! `F = Π ∘ T`, where `T` is linear with first row `p` (a direction separating
//! every pair of points) and `Π(z) = (z₁, z₂ − p₂(z₁), …, zₙ − pₙ(z₁))` is a
//! triangular shear built from Lagrange interpolants. Both factors have
//! polynomial inverses, so `F⁻¹ = T⁻¹ ∘ Π⁻¹` is polynomial too.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{inverse_rational, rat_int, serial, univariate, MultiPoly, PolyMap, Rational};

/// Distinct points with exact rational coordinates in `Rⁿ`, `n ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PointSetJson")]
pub struct PointSet {
    dimension: usize,
    #[serde(with = "serial::rational_matrix")]
    points: Vec<Vec<Rational>>,
}

#[derive(Deserialize)]
struct PointSetJson {
    dimension: usize,
    #[serde(with = "serial::rational_matrix")]
    points: Vec<Vec<Rational>>,
}

impl TryFrom<PointSetJson> for PointSet {
    type Error = Error;
    fn try_from(j: PointSetJson) -> Result<Self> {
        PointSet::new(j.dimension, j.points)
    }
}

impl PointSet {
    pub fn new(dimension: usize, points: Vec<Vec<Rational>>) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::Hypothesis(format!(
                "the point set must live in R^n with n >= 2, got n = {dimension}"
            )));
        }
        if points.is_empty() {
            return Err(Error::Hypothesis("the point set must be nonempty".into()));
        }
        for p in &points {
            if p.len() != dimension {
                return Err(Error::LengthMismatch {
                    expected: dimension,
                    actual: p.len(),
                });
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(Error::Hypothesis(format!(
                        "points {i} and {j} coincide; the points must be distinct"
                    )));
                }
            }
        }
        Ok(PointSet { dimension, points })
    }

    /// Parses the JSON form. Malformed documents give [`Error::Parse`]; well
    /// formed ones that break `n ≥ 2` or distinctness give [`Error::Hypothesis`].
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: PointSetJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        match PointSet::new(raw.dimension, raw.points) {
            Err(Error::LengthMismatch { expected, actual }) => Err(Error::Parse(format!(
                "point of length {actual} in a set of dimension {expected}"
            ))),
            other => other,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        use num_traits::ToPrimitive;
        self.points
            .iter()
            .map(|p| p.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }
}

/// The automorphism `F` together with everything it was assembled from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordChange {
    pub forward: PolyMap,
    pub inverse: PolyMap,
    #[serde(with = "serial::rational_vec")]
    pub direction: Vec<Rational>,
    #[serde(with = "serial::rational_matrix")]
    pub linear_part: Vec<Vec<Rational>>,
    /// `p₂, …, pₙ` as one-variable polynomials.
    pub interpolants: Vec<MultiPoly>,
    /// First coordinates of `F(x⁽ⁱ⁾)`, in input order.
    #[serde(with = "serial::rational_vec")]
    pub axis_images: Vec<Rational>,
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// First `p(t) = (1, t, t², …, tⁿ⁻¹)`, `t = 0, 1, 2, …`, with `p·(ξ − η) ≠ 0`
/// for every pair of distinct points.
///
/// Each pair rules out at most `n − 1` values of `t`, so the sweep stops by
/// `t = (n − 1)·k(k − 1)/2`.
pub fn choose_direction(xs: &PointSet) -> Vec<Rational> {
    let n = xs.dimension();
    let diffs: Vec<Vec<Rational>> = xs
        .points()
        .iter()
        .enumerate()
        .flat_map(|(i, a)| {
            xs.points()[i + 1..]
                .iter()
                .map(move |b| a.iter().zip(b).map(|(u, v)| u - v).collect())
        })
        .collect();
    let mut t: i64 = 0;
    loop {
        let tq = rat_int(t);
        let mut p = Vec::with_capacity(n);
        let mut pow = Rational::one();
        for _ in 0..n {
            p.push(pow.clone());
            pow *= &tq;
        }
        if diffs.iter().all(|d| !dot(&p, d).is_zero()) {
            return p;
        }
        t += 1;
    }
}

/// `T` with rows `pᵀ, e₂ᵀ, …, eₙᵀ`; `det T = p₁`.
pub fn build_linear(p: &[Rational], n: usize) -> Result<Vec<Vec<Rational>>> {
    if p.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: p.len(),
        });
    }
    if p[0].is_zero() {
        return Err(Error::Singular);
    }
    let mut rows = vec![p.to_vec()];
    for i in 1..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = Rational::one();
        rows.push(e);
    }
    Ok(rows)
}

/// For each `j ≥ 2`, the Lagrange polynomial `p_j` with `p_j(z₁⁽ⁱ⁾) = z_j⁽ⁱ⁾`.
pub fn build_interpolants(z_points: &[Vec<Rational>]) -> Result<Vec<MultiPoly>> {
    let n = z_points.first().map_or(0, Vec::len);
    let firsts: Vec<Rational> = z_points.iter().map(|z| z[0].clone()).collect();
    (1..n)
        .map(|j| {
            let ys: Vec<Rational> = z_points.iter().map(|z| z[j].clone()).collect();
            univariate::lagrange(&firsts, &ys)
        })
        .collect()
}

/// `(z₁, z₂ ∓ p₂(z₁), …)`: the shear for `sign = -1`, its inverse for `+1`.
fn shear(interpolants: &[MultiPoly], n: usize, sign: i64) -> Result<PolyMap> {
    let z1 = PolyMap::new(n, vec![MultiPoly::var(n, 0)?])?;
    let mut comps = vec![MultiPoly::var(n, 0)?];
    for (j, pj) in interpolants.iter().enumerate() {
        let lifted = pj.compose(&z1)?.scale(&rat_int(sign));
        comps.push(&MultiPoly::var(n, j + 1)? + &lifted);
    }
    PolyMap::new(n, comps)
}

pub fn build_coord_change(xs: &PointSet) -> Result<CoordChange> {
    let n = xs.dimension();
    let direction = choose_direction(xs);
    let linear_part = build_linear(&direction, n)?;
    let linear_inv = inverse_rational(&linear_part)?;
    let t_map = PolyMap::linear(&linear_part)?;
    let z_points: Vec<Vec<Rational>> = xs
        .points()
        .iter()
        .map(|x| t_map.eval_rational(x))
        .collect::<Result<_>>()?;
    let interpolants = build_interpolants(&z_points)?;
    let pi = shear(&interpolants, n, -1)?;
    let pi_inv = shear(&interpolants, n, 1)?;
    let forward = pi.compose_map(&t_map)?;
    let inverse = PolyMap::linear(&linear_inv)?.compose_map(&pi_inv)?;
    let axis_images = z_points.iter().map(|z| z[0].clone()).collect();
    Ok(CoordChange {
        forward,
        inverse,
        direction,
        linear_part,
        interpolants,
        axis_images,
    })
}
