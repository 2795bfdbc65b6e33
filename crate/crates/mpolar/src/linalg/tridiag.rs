//! Pivoted LU factorization of complex tridiagonal systems.
//!
//! Partial pivoting matters here: the shifted 1D Helmholtz operators are
//! indefinite in the propagating region and the plain Thomas recurrence can
//! lose digits near resonances.

use super::C64;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Tridiag {
    /// Subdiagonal, `sub[i] = A[i+1][i]`, length n-1.
    pub sub: Vec<C64>,
    /// Diagonal, length n.
    pub diag: Vec<C64>,
    /// Superdiagonal, `sup[i] = A[i][i+1]`, length n-1.
    pub sup: Vec<C64>,
}

impl Tridiag {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut y = vec![C64::ZERO; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// Conjugate transpose (also tridiagonal).
    pub fn adjoint(&self) -> Tridiag {
        Tridiag {
            sub: self.sup.iter().map(|z| z.conj()).collect(),
            diag: self.diag.iter().map(|z| z.conj()).collect(),
            sup: self.sub.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn factor(&self) -> Result<TridiagLu> {
        let n = self.n();
        let mut dl = self.sub.clone();
        let mut d = self.diag.clone();
        let mut du = self.sup.clone();
        let mut du2 = vec![C64::ZERO; n.saturating_sub(2)];
        let mut swap = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i] == C64::ZERO {
                    return Err(Error::SingularOperator(format!("zero pivot at row {i}")));
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                let dui = du[i];
                d[i + 1] -= fact * dui;
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swap[i] = true;
            }
        }
        if d[n - 1] == C64::ZERO {
            return Err(Error::SingularOperator(format!("zero pivot at row {}", n - 1)));
        }
        Ok(TridiagLu { dl, d, du, du2, swap })
    }
}

#[derive(Debug, Clone)]
pub struct TridiagLu {
    dl: Vec<C64>,
    d: Vec<C64>,
    du: Vec<C64>,
    du2: Vec<C64>,
    swap: Vec<bool>,
}

impl TridiagLu {
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if !self.swap[i] {
                let t = self.dl[i] * b[i];
                b[i + 1] -= t;
            } else {
                let tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Factorizations of A and A^H bundled, for the forward/adjoint solve pairs
/// of the power iteration.
#[derive(Debug, Clone)]
pub struct TridiagPair {
    pub fwd: TridiagLu,
    pub adj: TridiagLu,
}

impl TridiagPair {
    pub fn new(a: &Tridiag) -> Result<Self> {
        Ok(TridiagPair { fwd: a.factor()?, adj: a.adjoint().factor()? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, norm2};
    use crate::rng::CounterRng;

    fn random_tridiag(n: usize, rng: &mut CounterRng) -> Tridiag {
        let z = |r: &mut CounterRng| c(r.range(-1.0, 1.0), r.range(-1.0, 1.0));
        Tridiag {
            sub: (0..n - 1).map(|_| z(rng)).collect(),
            diag: (0..n).map(|_| z(rng) + c(0.0, 2.0)).collect(),
            sup: (0..n - 1).map(|_| z(rng)).collect(),
        }
    }

    #[test]
    fn solve_recovers_known_solution() {
        let mut rng = CounterRng::new(42, 0);
        for n in [2usize, 3, 17, 256] {
            let a = random_tridiag(n, &mut rng);
            let x_true: Vec<_> = (0..n).map(|i| c(i as f64, -(i as f64) / 3.0)).collect();
            let b = a.matvec(&x_true);
            let lu = a.factor().unwrap();
            let x = lu.solve(&b);
            let err: f64 = x
                .iter()
                .zip(&x_true)
                .map(|(u, v)| (u - v).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err / norm2(&x_true).max(1.0) < 1e-10, "n={n} err={err:e}");
        }
    }

    #[test]
    fn adjoint_solve_matches_conjugate_identity() {
        let mut rng = CounterRng::new(5, 1);
        let n = 64;
        let a = random_tridiag(n, &mut rng);
        let pair = TridiagPair::new(&a).unwrap();
        let b: Vec<_> = (0..n).map(|i| c((i % 5) as f64, 1.0)).collect();
        let x = pair.adj.solve(&b);
        // check A^H x = b
        let r = a.adjoint().matvec(&x);
        let err: f64 = r.iter().zip(&b).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-10 * norm2(&b));
    }

    #[test]
    fn pivoting_handles_tiny_diagonal() {
        // leading diagonal entry far smaller than the subdiagonal
        let a = Tridiag {
            sub: vec![c(1.0, 0.0), c(1.0, 0.0)],
            diag: vec![c(1e-300, 0.0), c(1.0, 0.0), c(2.0, 0.0)],
            sup: vec![c(1.0, 0.0), c(1.0, 0.0)],
        };
        let x_true = vec![c(1.0, 0.0), c(-2.0, 0.5), c(3.0, 0.0)];
        let b = a.matvec(&x_true);
        let x = a.factor().unwrap().solve(&b);
        let err: f64 = x.iter().zip(&x_true).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-12);
    }
}
