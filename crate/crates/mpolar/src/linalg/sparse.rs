//! Sparse complex LU behind the 2D solves: thin wrapper over faer keeping
//! factor/solve/adjoint-solve in one place.

use super::C64;
use crate::error::{Error, Result};
use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};

pub struct SparseLu {
    n: usize,
    matrix: SparseColMat<usize, c64>,
    lu: faer::sparse::linalg::solvers::Lu<usize, c64>,
}

impl SparseLu {
    pub fn factor(n: usize, triplets: &[(usize, usize, C64)]) -> Result<Self> {
        let trips: Vec<Triplet<usize, usize, c64>> = triplets
            .iter()
            .map(|&(r, c, v)| Triplet::new(r, c, v))
            .collect();
        let matrix = SparseColMat::<usize, c64>::try_new_from_triplets(n, n, &trips)
            .map_err(|e| Error::SingularOperator(format!("sparse assembly failed: {e:?}")))?;
        let lu = matrix
            .as_ref()
            .sp_lu()
            .map_err(|e| Error::SingularOperator(format!("sparse LU failed: {e:?}")))?;
        Ok(SparseLu { n, matrix, lu })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        assert_eq!(b.len(), self.n);
        let rhs = Mat::<c64>::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    /// Solve A^H x = b via the transpose factorization and conjugation.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        assert_eq!(b.len(), self.n);
        let rhs = Mat::<c64>::from_fn(self.n, 1, |i, _| b[i].conj());
        let x = self.lu.solve_transpose(&rhs);
        (0..self.n).map(|i| x[(i, 0)].conj()).collect()
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let xm = Mat::<c64>::from_fn(self.n, 1, |i, _| x[i]);
        let y = self.matrix.as_ref() * &xm;
        (0..self.n).map(|i| y[(i, 0)]).collect()
    }

    /// Relative residual ||A x - b|| / ||b||.
    pub fn residual(&self, x: &[C64], b: &[C64]) -> f64 {
        let ax = self.matvec(x);
        let num: f64 = ax.iter().zip(b).map(|(a, bb)| (a - bb).norm_sqr()).sum();
        let den: f64 = b.iter().map(|z| z.norm_sqr()).sum();
        (num / den.max(1e-300)).sqrt()
    }
}
