use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Eigenvalue counts by sign; `|λ| ≤ tol` (real part, for non-symmetric
/// input) counts as ambiguous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenSigns {
    pub positive: usize,
    pub negative: usize,
    pub ambiguous: usize,
}

impl EigenSigns {
    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.positive, self.negative, self.ambiguous)
    }
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= 1e-12 * scale))
}

/// Symmetric input goes through the symmetric eigensolver; anything else
/// through the real Schur form, classifying by real part.
pub fn eigen_signs(matrix: &[Vec<f64>], tol: f64) -> EigenSigns {
    let n = matrix.len();
    let m = DMatrix::from_fn(n, n, |i, j| matrix[i][j]);
    let reals: Vec<f64> = if is_symmetric(&m) {
        m.symmetric_eigen().eigenvalues.iter().copied().collect()
    } else {
        m.complex_eigenvalues().iter().map(|c| c.re).collect()
    };
    let mut out = EigenSigns {
        positive: 0,
        negative: 0,
        ambiguous: 0,
    };
    for l in reals {
        if !l.is_finite() || l.abs() <= tol {
            out.ambiguous += 1;
        } else if l > 0.0 {
            out.positive += 1;
        } else {
            out.negative += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let h = vec![vec![3.0, -2.0], vec![-2.0, 2.0]];
        assert_eq!(eigen_signs(&h, 1e-9).as_tuple(), (2, 0, 0));
        let saddle = vec![vec![1.0, 0.0], vec![0.0, -1.0]];
        assert_eq!(eigen_signs(&saddle, 1e-9).as_tuple(), (1, 1, 0));
        let neg_id: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { -1.0 } else { 0.0 }).collect())
            .collect();
        assert_eq!(eigen_signs(&neg_id, 1e-9).as_tuple(), (0, 4, 0));
    }

    #[test]
    fn nonsymmetric_uses_real_parts() {
        // rotation-plus-decay: eigenvalues −1 ± 2i
        let m = vec![vec![-1.0, 2.0], vec![-2.0, -1.0]];
        assert_eq!(eigen_signs(&m, 1e-9).as_tuple(), (0, 2, 0));
        let z = vec![vec![0.0, 1.0], vec![0.0, 0.0]];
        assert_eq!(eigen_signs(&z, 1e-9).as_tuple(), (0, 0, 2));
    }
}
