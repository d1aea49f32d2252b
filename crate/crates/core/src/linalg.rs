//! Dense linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Systems whose equilibrated 1-norm condition number exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e14;

/// LU factorisation (partial pivoting) of a diagonally equilibrated matrix.
#[derive(Debug, Clone)]
pub struct DenseSolver {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    scale: Vector,
    condition: f64,
}

impl DenseSolver {
    /// Factorises `a`. The system is scaled as `D A D` with
    /// `D = diag(|a_ii|)^{-1/2}` before pivoting and the condition estimate is
    /// taken on the scaled matrix.
    pub fn new(a: &Matrix) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::invalid(format!("expected a square matrix (got {}x{})", a.nrows(), a.ncols())));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("system matrix".into()));
        }
        let scale = Vector::from_iterator(
            n,
            (0..n).map(|i| {
                let d = a[(i, i)].abs();
                if d > 0.0 {
                    1.0 / d.sqrt()
                } else {
                    1.0
                }
            }),
        );
        let scaled = Matrix::from_fn(n, n, |i, j| scale[i] * a[(i, j)] * scale[j]);
        let norm = one_norm(&scaled);
        let lu = scaled.lu();
        let inv = lu.try_inverse().ok_or(Error::IllConditioned {
            condition: f64::INFINITY,
        })?;
        let condition = norm * one_norm(&inv);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::IllConditioned { condition });
        }
        Ok(Self { lu, scale, condition })
    }

    /// 1-norm condition estimate of the equilibrated matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn solve(&self, rhs: &Vector) -> Result<Vector> {
        if rhs.len() != self.scale.len() {
            return Err(Error::invalid("right-hand side length does not match the matrix"));
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("right-hand side".into()));
        }
        let scaled = rhs.component_mul(&self.scale);
        let y = self
            .lu
            .solve(&scaled)
            .ok_or(Error::Numerical("LU back-substitution failed".into()))?;
        Ok(y.component_mul(&self.scale))
    }
}

/// Maximum absolute column sum.
pub fn one_norm(a: &Matrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &Matrix) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Symmetric eigendecomposition `a = E diag(λ) Eᵀ` with ascending eigenvalues
/// and each eigenvector's largest component made positive.
pub fn symmetric_eigen(a: &Matrix) -> Result<(Vector, Matrix)> {
    let n = a.nrows();
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or(Error::Numerical("symmetric eigenvalue iteration did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = Vector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let pivot = col.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(dst, &(col * sign));
    }
    Ok((values, vectors))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    Matrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_a_small_system() {
        let a = Matrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, -1.0, 0.5, 0.0, 2.0]);
        let x = Vector::from_vec(vec![1.0, -2.0, 0.5]);
        let b = &a * &x;
        let solver = DenseSolver::new(&a).unwrap();
        let got = solver.solve(&b).unwrap();
        for i in 0..3 {
            assert_relative_eq!(got[i], x[i], epsilon = 1e-14);
        }
        assert!(solver.condition() >= 1.0);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(DenseSolver::new(&a), Err(Error::IllConditioned { .. })));
        let nan = Matrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(DenseSolver::new(&nan).is_err());
    }

    #[test]
    fn eigen_sorted_and_orthonormal() {
        let a = Matrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        assert!(vals[0] < vals[1] && vals[1] < vals[2]);
        let eye = vecs.transpose() * &vecs;
        assert!(max_abs(&(eye - Matrix::identity(3, 3))) < 1e-14);
        let rebuilt = &vecs * Matrix::from_diagonal(&vals) * vecs.transpose();
        assert!(max_abs(&(rebuilt - a)) < 1e-14);
    }

    #[test]
    fn kronecker_layout() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = Matrix::identity(2, 2);
        let k = kron(&a, &b);
        assert_eq!(k[(0, 2)], 2.0);
        assert_eq!(k[(3, 1)], 3.0);
        assert_eq!(k[(1, 0)], 0.0);
    }
}
