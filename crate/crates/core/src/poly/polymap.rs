use num_traits::{One, Zero};

use super::multipoly::MultiPoly;
use super::rational::Rational;
use crate::error::{Error, Result};

/// A polynomial map `R^domain_dim -> R^m`, one [`MultiPoly`] per output coordinate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMap {
    domain_dim: usize,
    components: Vec<MultiPoly>,
}

impl PolyMap {
    pub fn new(domain_dim: usize, components: Vec<MultiPoly>) -> Result<Self> {
        for c in &components {
            if c.dimension() != domain_dim {
                return Err(Error::DimensionMismatch {
                    left: domain_dim,
                    right: c.dimension(),
                });
            }
        }
        Ok(PolyMap {
            domain_dim,
            components,
        })
    }

    pub fn identity(n: usize) -> Self {
        let components = (0..n)
            .map(|i| MultiPoly::var(n, i).expect("index in range"))
            .collect();
        PolyMap {
            domain_dim: n,
            components,
        }
    }

    /// The linear map `x -> A x` for a row-major matrix `A`.
    pub fn linear(matrix: &[Vec<Rational>]) -> Result<Self> {
        let n = matrix.first().map_or(0, Vec::len);
        let mut components = Vec::with_capacity(matrix.len());
        for row in matrix {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            let terms = row.iter().enumerate().map(|(j, c)| {
                let mut e = vec![0; n];
                e[j] = 1;
                (e, c.clone())
            });
            components.push(MultiPoly::from_terms(n, terms)?);
        }
        Ok(PolyMap {
            domain_dim: n,
            components,
        })
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn into_components(self) -> Vec<MultiPoly> {
        self.components
    }

    /// `self ∘ inner`: apply `inner` first, then `self`.
    pub fn compose_map(&self, inner: &PolyMap) -> Result<PolyMap> {
        if inner.codomain_dim() != self.domain_dim {
            return Err(Error::ArityMismatch {
                expected: self.domain_dim,
                actual: inner.codomain_dim(),
            });
        }
        let components = self
            .components
            .iter()
            .map(|c| c.compose(inner))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMap {
            domain_dim: inner.domain_dim,
            components,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.domain_dim == self.codomain_dim() && *self == PolyMap::identity(self.domain_dim)
    }

    pub fn eval_rational(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        self.components.iter().map(|c| c.eval_rational(x)).collect()
    }

    pub fn eval_float(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.eval_float(x)).collect()
    }

    /// Symbolic Jacobian, `j[i][k] = ∂F_i/∂x_k`.
    pub fn jacobian(&self) -> Vec<Vec<MultiPoly>> {
        self.components
            .iter()
            .map(|c| {
                (0..self.domain_dim)
                    .map(|k| c.partial(k).expect("index in range"))
                    .collect()
            })
            .collect()
    }

    pub fn neg(&self) -> PolyMap {
        PolyMap {
            domain_dim: self.domain_dim,
            components: self.components.iter().map(|c| -c).collect(),
        }
    }

    /// Exact Jacobian matrix at a rational point.
    pub fn jacobian_at(&self, x: &[Rational]) -> Result<Vec<Vec<Rational>>> {
        self.jacobian()
            .iter()
            .map(|row| row.iter().map(|p| p.eval_rational(x)).collect())
            .collect()
    }

    /// Determinant of the symbolic Jacobian, by cofactor expansion.
    pub fn jacobian_determinant(&self) -> Result<MultiPoly> {
        if self.codomain_dim() != self.domain_dim {
            return Err(Error::ArityMismatch {
                expected: self.domain_dim,
                actual: self.codomain_dim(),
            });
        }
        Ok(det_poly(&self.jacobian(), self.domain_dim))
    }

    /// Highest total degree among the components (0 when all are zero).
    pub fn max_degree(&self) -> u32 {
        self.components
            .iter()
            .filter_map(MultiPoly::total_degree)
            .max()
            .unwrap_or(0)
    }
}

fn det_poly(m: &[Vec<MultiPoly>], dim: usize) -> MultiPoly {
    match m.len() {
        0 => MultiPoly::one(dim),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = MultiPoly::zero(dim);
            for (col, entry) in m[0].iter().enumerate() {
                if entry.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<MultiPoly>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != col)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = entry * &det_poly(&minor, dim);
                acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// Exact inverse by Gauss-Jordan elimination.
pub fn inverse_rational(m: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::Singular)?;
        a.swap(piv, col);
        inv.swap(piv, col);
        let p = a[col][col].clone();
        for c in 0..n {
            a[col][c] /= &p;
            inv[col][c] /= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                let da = &factor * &a[col][c];
                a[r][c] -= da;
                let di = &factor * &inv[col][c];
                inv[r][c] -= di;
            }
        }
    }
    Ok(inv)
}

/// Exact determinant by fraction-based Gaussian elimination.
pub fn det_rational(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            let (pivot_rows, rest) = a.split_at_mut(r);
            for (dst, src) in rest[0][col..].iter_mut().zip(&pivot_rows[col][col..]) {
                *dst -= &factor * src;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_int};

    #[test]
    fn identity_composes_trivially() {
        let t = PolyMap::linear(&[
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(0), rat(1, 3)],
        ])
        .unwrap();
        let id = PolyMap::identity(2);
        assert_eq!(id.compose_map(&t).unwrap(), t);
        assert_eq!(t.compose_map(&id).unwrap(), t);
        assert!(id.is_identity());
        assert!(!t.is_identity());
    }

    #[test]
    fn arity_is_checked() {
        let a = PolyMap::identity(2);
        let b = PolyMap::identity(3);
        assert_eq!(
            a.compose_map(&b),
            Err(Error::ArityMismatch {
                expected: 2,
                actual: 3
            })
        );
        assert!(PolyMap::new(2, vec![MultiPoly::one(3)]).is_err());
    }

    #[test]
    fn inverse_of_shear() {
        let t = vec![vec![rat_int(1), rat_int(1)], vec![rat_int(0), rat_int(1)]];
        let inv = inverse_rational(&t).unwrap();
        assert_eq!(inv, vec![vec![rat_int(1), rat_int(-1)], vec![rat_int(0), rat_int(1)]]);
        let sing = vec![vec![rat_int(1), rat_int(2)], vec![rat(1, 2), rat_int(1)]];
        assert_eq!(inverse_rational(&sing), Err(Error::Singular));
    }

    #[test]
    fn jacobian_determinant_of_shear_is_constant() {
        let z0 = MultiPoly::var(2, 0).unwrap();
        let z1 = MultiPoly::var(2, 1).unwrap();
        let shear = PolyMap::new(2, vec![z0.clone(), &z1 - &z0.pow(3)]).unwrap();
        assert_eq!(shear.jacobian_determinant().unwrap(), MultiPoly::one(2));
        let sq = PolyMap::new(2, vec![z0.pow(2), z1.clone()]).unwrap();
        assert_eq!(sq.jacobian_determinant().unwrap(), z0.scale(&rat_int(2)));
    }

    #[test]
    fn determinant() {
        let m = vec![
            vec![rat_int(1), rat_int(2), rat_int(4)],
            vec![rat_int(0), rat_int(1), rat_int(0)],
            vec![rat_int(0), rat_int(0), rat_int(1)],
        ];
        assert_eq!(det_rational(&m), rat_int(1));
        let s = vec![vec![rat_int(0), rat_int(1)], vec![rat_int(1), rat_int(0)]];
        assert_eq!(det_rational(&s), rat_int(-1));
        let z = vec![vec![rat_int(1), rat_int(2)], vec![rat_int(2), rat_int(4)]];
        assert_eq!(det_rational(&z), rat_int(0));
    }
}
