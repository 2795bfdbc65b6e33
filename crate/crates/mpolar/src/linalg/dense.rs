//! Dense complex matrices: pivoted LU, explicit inverse, and a one-sided
//! Jacobi SVD. These back the independent oracles that cross-check the
//! sparse solve + power iteration path, so they deliberately share no code
//! with it.

use super::C64;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct DenseC {
    pub nrows: usize,
    pub ncols: usize,
    /// Row-major storage.
    pub a: Vec<C64>,
}

impl DenseC {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseC { nrows, ncols, a: vec![C64::ZERO; nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::ONE;
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![C64::ZERO; self.nrows];
        for i in 0..self.nrows {
            let row = &self.a[i * self.ncols..(i + 1) * self.ncols];
            let mut acc = C64::ZERO;
            for (aij, xj) in row.iter().zip(x) {
                acc += aij * xj;
            }
            y[i] = acc;
        }
        y
    }

    pub fn adjoint(&self) -> DenseC {
        DenseC::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &DenseC) -> DenseC {
        assert_eq!(self.ncols, other.nrows);
        let mut out = DenseC::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let aik = self[(i, k)];
                if aik == C64::ZERO {
                    continue;
                }
                for j in 0..other.ncols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// Explicit inverse by pivoted Gaussian elimination on [A | I].
    pub fn inverse(&self) -> Result<DenseC> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut a = self.clone();
        let mut inv = DenseC::identity(n);
        for col in 0..n {
            let (mut pr, mut pv) = (col, a[(col, col)].norm());
            for r in col + 1..n {
                let v = a[(r, col)].norm();
                if v > pv {
                    pr = r;
                    pv = v;
                }
            }
            if pv == 0.0 {
                return Err(Error::SingularOperator(format!("dense inverse: zero column {col}")));
            }
            if pr != col {
                for j in 0..n {
                    a.a.swap(col * n + j, pr * n + j);
                    inv.a.swap(col * n + j, pr * n + j);
                }
            }
            let piv = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= piv;
                inv[(col, j)] /= piv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == C64::ZERO {
                    continue;
                }
                for j in 0..n {
                    let t = f * a[(col, j)];
                    a[(r, j)] -= t;
                    let t = f * inv[(col, j)];
                    inv[(r, j)] -= t;
                }
            }
        }
        Ok(inv)
    }

    /// All singular values, descending, by one-sided Jacobi on the columns.
    pub fn singular_values(&self) -> Vec<f64> {
        let m = self.nrows;
        let n = self.ncols;
        // column-major copy for cache-friendly column rotations
        let mut col: Vec<Vec<C64>> = (0..n)
            .map(|j| (0..m).map(|i| self[(i, j)]).collect())
            .collect();
        let eps = 1e-14;
        let max_sweeps = 40;
        for _ in 0..max_sweeps {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in p + 1..n {
                    let (mut app, mut aqq) = (0.0f64, 0.0f64);
                    let mut apq = C64::ZERO;
                    for i in 0..m {
                        app += col[p][i].norm_sqr();
                        aqq += col[q][i].norm_sqr();
                        apq += col[p][i].conj() * col[q][i];
                    }
                    let mag = apq.norm();
                    if mag <= eps * (app * aqq).sqrt() || mag == 0.0 {
                        continue;
                    }
                    off = off.max(mag / (app * aqq).sqrt().max(f64::MIN_POSITIVE));
                    let phase = apq / mag;
                    let tau = (app - aqq) / (2.0 * mag);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let cth = 1.0 / (1.0 + t * t).sqrt();
                    let sth = t * cth;
                    for i in 0..m {
                        let up = col[p][i];
                        let uq = col[q][i];
                        // zeroes <u_p', u_q'> for the 2x2 Gram block
                        col[p][i] = cth * up + sth * phase.conj() * uq;
                        col[q][i] = -sth * phase * up + cth * uq;
                    }
                }
            }
            if off < eps {
                break;
            }
        }
        let mut sv: Vec<f64> = col
            .iter()
            .map(|u| u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }
}

impl std::ops::Index<(usize, usize)> for DenseC {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.a[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseC {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.a[i * self.ncols + j]
    }
}
