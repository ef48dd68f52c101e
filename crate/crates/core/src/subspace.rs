//! Linear subspaces of a matrix space, stored as orthonormal bases of
//! vectorized matrices (Frobenius inner product).

use crate::error::{Error, Result};
use crate::matrix::{column_space, unvec, vec_of, ComplexMatrix, ComplexVector};
use crate::tol::Tolerances;

#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    /// Orthonormal columns, `ambient_dim x dim`.
    basis: ComplexMatrix,
    rank_tol: f64,
}

impl Subspace {
    pub fn zero(ambient_dim: usize, tol: &Tolerances) -> Self {
        Self { ambient_dim, basis: ComplexMatrix::zeros(ambient_dim, 0), rank_tol: tol.rank_tol }
    }

    /// Span of arbitrary vectors, rank revealed by SVD at `rank_tol`.
    pub fn span_vectors(ambient_dim: usize, vectors: &[ComplexVector], tol: &Tolerances) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, found: v.len() });
            }
        }
        if vectors.is_empty() {
            return Ok(Self::zero(ambient_dim, tol));
        }
        let stacked = ComplexMatrix::from_columns(vectors);
        Ok(Self { ambient_dim, basis: column_space(&stacked, tol)?, rank_tol: tol.rank_tol })
    }

    /// Span of `n x n` matrices inside `M_n`.
    pub fn span_matrices(n: usize, generators: &[ComplexMatrix], tol: &Tolerances) -> Result<Self> {
        let mut vs = Vec::with_capacity(generators.len());
        for g in generators {
            if g.nrows() != n || g.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.nrows() });
            }
            vs.push(vec_of(g));
        }
        Self::span_vectors(n * n, &vs, tol)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<ComplexVector> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    /// Basis reshaped into `n x n` matrices; panics if the ambient space is not `M_n`.
    pub fn basis_matrices(&self) -> Vec<ComplexMatrix> {
        let n = self.side();
        self.basis.column_iter().map(|c| unvec(c.as_slice(), n)).collect()
    }

    pub(crate) fn side(&self) -> usize {
        let n = (self.ambient_dim as f64).sqrt().round() as usize;
        assert_eq!(n * n, self.ambient_dim, "ambient space is not a square matrix space");
        n
    }

    pub fn project(&self, v: &ComplexVector) -> ComplexVector {
        &self.basis * (self.basis.adjoint() * v)
    }

    pub fn project_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        unvec(self.project(&vec_of(x)).as_slice(), x.nrows())
    }

    /// Euclidean distance from `v` to the subspace.
    pub fn residual(&self, v: &ComplexVector) -> f64 {
        (v - self.project(v)).norm()
    }

    /// Distance relative to `max(‖v‖, 1)`.
    pub fn relative_residual(&self, v: &ComplexVector) -> f64 {
        self.residual(v) / v.norm().max(1.0)
    }

    pub fn contains(&self, v: &ComplexVector) -> bool {
        self.relative_residual(v) <= self.rank_tol
    }

    pub fn contains_matrix(&self, x: &ComplexMatrix) -> bool {
        self.contains(&vec_of(x))
    }

    pub fn matrix_residual(&self, x: &ComplexMatrix) -> f64 {
        self.relative_residual(&vec_of(x))
    }

    /// Every basis vector of `other` lies in `self`.
    pub fn includes(&self, other: &Subspace) -> bool {
        other.basis.column_iter().all(|c| self.residual(&c.into_owned()) <= self.rank_tol)
    }

    pub fn equals(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim && self.dim() == other.dim() && self.includes(other) && other.includes(self)
    }

    /// Span of the union.
    pub fn join(&self, other: &Subspace, tol: &Tolerances) -> Result<Subspace> {
        let mut vs = self.basis_vectors();
        vs.extend(other.basis_vectors());
        Subspace::span_vectors(self.ambient_dim, &vs, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::unit;

    #[test]
    fn examples() {
        let tol = Tolerances::default();
        let e11 = unit(2, 0, 0);
        let s = Subspace::span_matrices(2, &[e11.clone(), e11.clone()], &tol).unwrap();
        assert_eq!(s.dim(), 1);
        let all: Vec<_> = (0..4).map(|k| unit(2, k / 2, k % 2)).collect();
        let full = Subspace::span_matrices(2, &all, &tol).unwrap();
        assert_eq!(full.dim(), 4);
        assert!(!s.contains_matrix(&unit(2, 0, 1)));
        assert!(full.contains_matrix(&unit(2, 0, 1)));
        assert!(full.includes(&s) && !s.includes(&full));
        assert!(full.equals(&s.join(&Subspace::span_matrices(2, &all[1..], &tol).unwrap(), &tol).unwrap()));
    }

    #[test]
    fn dimension_mismatch() {
        let tol = Tolerances::default();
        assert!(Subspace::span_matrices(2, &[unit(3, 0, 0)], &tol).is_err());
    }
}
