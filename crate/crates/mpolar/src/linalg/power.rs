//! Subspace (block power) iteration on T*T for the largest singular value
//! of T.
//!
//! T is only available through its action (one sparse solve per apply), so
//! the factorization is reused across all iterations. A two-column block
//! with a deterministic start keeps convergence geometric even when the top
//! singular pair is nearly degenerate, which single-vector iteration cannot
//! resolve inside any reasonable budget. The Rayleigh-Ritz value from the
//! block never exceeds sigma_max^2, so the reported value is a certified
//! lower bound.

use super::{dot, norm2, scale, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PowerOutcome {
    pub sigma: f64,
    pub iters: usize,
    pub ritz_history: Vec<f64>,
}

pub fn power_iteration_sigma<F, G>(
    n: usize,
    mut apply: F,
    mut apply_adjoint: G,
    tol: f64,
    max_iter: usize,
) -> Result<PowerOutcome>
where
    F: FnMut(&[C64]) -> Vec<C64>,
    G: FnMut(&[C64]) -> Vec<C64>,
{
    // deterministic block start: all-ones and alternating signs
    let s = 1.0 / (n as f64).sqrt();
    let mut v1 = vec![C64::new(s, 0.0); n];
    let mut v2: Vec<C64> = (0..n)
        .map(|i| C64::new(if i % 2 == 0 { s } else { -s }, 0.0))
        .collect();
    if n == 1 {
        v2[0] = C64::ZERO;
    }
    orthonormalize(&mut v1, &mut v2);
    let mut history: Vec<f64> = Vec::new();
    let mut rho_prev = f64::NAN;
    let mut delta_prev = f64::NAN;
    for it in 1..=max_iter {
        let w1 = apply(&v1);
        let w2 = apply(&v2);
        // 2x2 Gram of T V: G_ij = <T v_i, T v_j> = <v_i, (T*T) v_j>
        let g11 = w1.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let g22 = w2.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let g12 = dot(&w1, &w2);
        // largest eigenvalue of the Hermitian 2x2 [[g11, g12], [g12*, g22]]
        let tr = g11 + g22;
        let det = g11 * g22 - g12.norm_sqr();
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        let rho = 0.5 * tr + disc;
        history.push(rho.sqrt());
        if rho == 0.0 {
            return Ok(PowerOutcome { sigma: 0.0, iters: it, ritz_history: history });
        }
        if !rho.is_finite() {
            return Err(Error::SingularOperator(
                "power iteration produced non-finite Ritz value".into(),
            ));
        }
        // geometric error estimate from the Ritz increments: with
        // rho_k -> rho geometrically at ratio q, the remaining error is
        // about delta * q / (1 - q)
        if it >= 3 {
            let delta = rho - rho_prev;
            if delta <= 0.0 {
                // monotone stalls at roundoff level: converged
                return Ok(PowerOutcome { sigma: rho.sqrt(), iters: it, ritz_history: history });
            }
            let q = (delta / delta_prev).clamp(0.0, 0.9999);
            let err_est = delta * q / (1.0 - q);
            if err_est <= tol * rho || delta <= f64::EPSILON * rho {
                return Ok(PowerOutcome { sigma: rho.sqrt(), iters: it, ritz_history: history });
            }
        }
        if it >= 2 {
            delta_prev = rho - rho_prev;
        }
        rho_prev = rho;
        let mut u1 = apply_adjoint(&w1);
        let mut u2 = apply_adjoint(&w2);
        let nu = norm2(&u1);
        if nu == 0.0 {
            return Ok(PowerOutcome { sigma: rho.sqrt(), iters: it, ritz_history: history });
        }
        scale(&mut u1, 1.0 / nu);
        orthonormalize(&mut u1, &mut u2);
        v1 = u1;
        v2 = u2;
    }
    let tail: Vec<f64> = history.iter().rev().take(8).rev().copied().collect();
    Err(Error::NonConvergence { iters: max_iter, tail })
}

/// Normalize v1, project it out of v2, normalize v2; a vanishing v2 is
/// replaced by a deterministic unit vector orthogonal to v1.
fn orthonormalize(v1: &mut [C64], v2: &mut Vec<C64>) {
    let n1 = norm2(v1);
    if n1 > 0.0 {
        scale(v1, 1.0 / n1);
    }
    let proj = dot(v1, v2);
    for (b, a) in v2.iter_mut().zip(v1.iter()) {
        *b -= proj * a;
    }
    let n2 = norm2(v2);
    if n2 > 1e-14 {
        scale(v2, 1.0 / n2);
        return;
    }
    // rebuild an orthogonal companion deterministically
    let n = v1.len();
    for k in 0..n {
        let mut cand = vec![C64::ZERO; n];
        cand[k] = C64::ONE;
        let p = dot(v1, &cand);
        for (b, a) in cand.iter_mut().zip(v1.iter()) {
            *b -= p * a;
        }
        let nc = norm2(&cand);
        if nc > 1e-8 {
            scale(&mut cand, 1.0 / nc);
            *v2 = cand;
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::linalg::dense::DenseC;
    use crate::rng::CounterRng;

    #[test]
    fn diagonal_operator() {
        let d = [c(0.5, 0.0), c(-3.0, 4.0), c(0.0, 2.0)];
        let apply = |v: &[C64]| v.iter().zip(&d).map(|(x, di)| di * x).collect::<Vec<_>>();
        let apply_adj = |v: &[C64]| v.iter().zip(&d).map(|(x, di)| di.conj() * x).collect::<Vec<_>>();
        let out = power_iteration_sigma(3, apply, apply_adj, 1e-12, 500).unwrap();
        assert!((out.sigma - 5.0).abs() < 1e-8);
    }

    #[test]
    fn degenerate_top_pair_converges_fast() {
        // two exactly equal top singular values
        let d = [c(2.0, 0.0), c(0.0, 2.0), c(0.5, 0.0), c(0.1, 0.0)];
        let apply = |v: &[C64]| v.iter().zip(&d).map(|(x, di)| di * x).collect::<Vec<_>>();
        let apply_adj = |v: &[C64]| v.iter().zip(&d).map(|(x, di)| di.conj() * x).collect::<Vec<_>>();
        let out = power_iteration_sigma(4, apply, apply_adj, 1e-10, 200).unwrap();
        assert!((out.sigma - 2.0).abs() < 1e-9, "sigma {}", out.sigma);
        assert!(out.iters < 50, "took {} iterations", out.iters);
    }

    #[test]
    fn near_degenerate_pair() {
        let d = [c(1.0, 0.0), c(0.999999, 0.0), c(0.3, 0.0)];
        let apply = |v: &[C64]| v.iter().zip(&d).map(|(x, di)| di * x).collect::<Vec<_>>();
        let apply_adj = |v: &[C64]| v.iter().zip(&d).map(|(x, di)| di.conj() * x).collect::<Vec<_>>();
        let out = power_iteration_sigma(3, apply, apply_adj, 1e-8, 500).unwrap();
        assert!((out.sigma - 1.0).abs() < 1e-6, "sigma {}", out.sigma);
    }

    #[test]
    fn lower_bound_property_vs_dense_svd() {
        let mut rng = CounterRng::new(77, 0);
        for trial in 0..10 {
            let n = 20 + 5 * trial;
            let m = DenseC::from_fn(n, n, |_, _| c(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)));
            let oracle = m.sigma_max();
            let m2 = m.clone();
            let madj = m.adjoint();
            let out = power_iteration_sigma(
                n,
                move |v| m2.matvec(v),
                move |v| madj.matvec(v),
                1e-10,
                2000,
            )
            .unwrap();
            assert!(out.sigma <= oracle * (1.0 + 1e-10), "not a lower bound");
            assert!(
                (out.sigma - oracle).abs() < 1e-6 * oracle,
                "sigma {} oracle {}",
                out.sigma,
                oracle
            );
        }
    }

    #[test]
    fn zero_operator_returns_zero() {
        let out = power_iteration_sigma(
            4,
            |v| vec![C64::ZERO; v.len()],
            |v| vec![C64::ZERO; v.len()],
            1e-10,
            10,
        )
        .unwrap();
        assert_eq!(out.sigma, 0.0);
    }
}
