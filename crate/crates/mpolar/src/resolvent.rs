//! Truncated-resolvent norms ||chi R chi||, frequency sweeps, power-law fits
//! and the trapping negative control.

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::linalg::tridiag::TridiagPair;
use crate::linalg::{power_iteration_sigma, C64};
use crate::operator::{
    assemble_radial_mode, AbsorbingLayer, CutoffBump, RadialModeOperator, ResolventSign,
    SemiclassicalParams,
};
use crate::potential::{effective_radial, PotentialSpec};
use serde::{Deserialize, Serialize};

#[cfg(not(target_arch = "wasm32"))]
fn now_ms() -> f64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64() * 1e3)
        .unwrap_or(0.0)
}

#[cfg(target_arch = "wasm32")]
fn now_ms() -> f64 {
    0.0
}

/// Outcome of one operator-norm evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct NormOutcome {
    /// ||chi (P - lambda ∓ i eps)^{-1} chi|| = h^2 sigma_max(chi A^{-1} chi)
    pub norm: f64,
    pub sigma: f64,
    pub iters: usize,
    /// relative residual of the last linear solve
    pub residual: f64,
    pub wall_ms: f64,
}

/// Power-iteration tolerance and budget; fixed defaults shared by every probe.
pub const POWER_TOL: f64 = 1e-8;
pub const POWER_MAX_ITER: usize = 500;

/// Norm of one 1D mode block.
pub fn mode_norm(op: &RadialModeOperator, tol: f64, max_iter: usize) -> Result<NormOutcome> {
    let t0 = now_ms();
    let n = op.r.len();
    let pair = TridiagPair::new(&op.matrix)?;
    let chi = &op.chi;
    let mut last_rhs: Vec<C64> = Vec::new();
    let mut last_sol: Vec<C64> = Vec::new();
    let outcome = {
        let mut apply = |v: &[C64]| -> Vec<C64> {
            let b: Vec<C64> = v.iter().zip(chi).map(|(x, c)| x * *c).collect();
            let mut y = pair.fwd.solve(&b);
            last_rhs = b;
            last_sol = y.clone();
            for (yi, c) in y.iter_mut().zip(chi) {
                *yi *= *c;
            }
            y
        };
        let mut apply_adj = |v: &[C64]| -> Vec<C64> {
            let b: Vec<C64> = v.iter().zip(chi).map(|(x, c)| x * *c).collect();
            let mut y = pair.adj.solve(&b);
            for (yi, c) in y.iter_mut().zip(chi) {
                *yi *= *c;
            }
            y
        };
        power_iteration_sigma(n, &mut apply, &mut apply_adj, tol, max_iter)?
    };
    // residual certificate on the final forward solve
    let residual = if last_rhs.is_empty() {
        0.0
    } else {
        let ax = op.matrix.matvec(&last_sol);
        let num: f64 = ax.iter().zip(&last_rhs).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = last_rhs.iter().map(|z| z.norm_sqr()).sum();
        (num / den.max(1e-300)).sqrt()
    };
    let h2 = op.params.h * op.params.h;
    Ok(NormOutcome {
        norm: h2 * outcome.sigma,
        sigma: outcome.sigma,
        iters: outcome.iters,
        residual,
        wall_ms: now_ms() - t0,
    })
}

/// Geometry policy shared across a sweep: fixed points per wavelength, fixed
/// physical region, absorbing layer scaled with the wavelength.
#[derive(Debug, Clone, Serialize)]
pub struct GeometryPolicy {
    pub points_per_wavelength: f64,
    /// radius where the absorbing layer starts (physical region boundary)
    pub domain_radius: f64,
    /// layer width in wavelengths (2 pi h)
    pub layer_wavelengths: f64,
    pub layer_amplitude: f64,
    pub chi: CutoffBump,
}

impl GeometryPolicy {
    pub fn new(domain_radius: f64, chi: CutoffBump) -> Self {
        GeometryPolicy {
            points_per_wavelength: 10.0,
            domain_radius,
            layer_wavelengths: 2.0,
            layer_amplitude: 2.0,
            chi,
        }
    }

    pub fn layer(&self, h: f64) -> AbsorbingLayer {
        AbsorbingLayer {
            start: self.domain_radius,
            width: self.layer_wavelengths * 2.0 * std::f64::consts::PI * h,
            amplitude: self.layer_amplitude,
        }
    }

    pub fn r_max(&self, h: f64) -> f64 {
        self.domain_radius + self.layer(h).width
    }

    pub fn dr(&self, h: f64) -> f64 {
        h / self.points_per_wavelength
    }
}

/// Epsilon policy: eps = factor * lambda keeps alpha h = factor constant.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EpsPolicy {
    pub relative: f64,
}

impl EpsPolicy {
    pub fn eps(&self, lambda: f64) -> f64 {
        self.relative * lambda
    }
}

impl Default for EpsPolicy {
    fn default() -> Self {
        EpsPolicy { relative: 1e-6 }
    }
}

/// Mode-decomposed norm for radial unipolar configurations.
#[derive(Debug, Clone, Serialize)]
pub struct ModeNormOutcome {
    pub norm: f64,
    /// (nu, mode norm) pairs, ascending nu
    pub per_mode: Vec<(f64, f64)>,
    pub attained_nu: f64,
    /// bound on every mode beyond the computed range
    pub tail_bound: f64,
    pub iters_total: usize,
    pub worst_residual: f64,
    pub wall_ms: f64,
}

fn require_radial_unipolar(spec: &PotentialSpec) -> Result<()> {
    if spec.poles.len() > 1 {
        return Err(Error::Unsupported(
            "mode decomposition requires at most one pole".into(),
        ));
    }
    if let Some(p) = spec.poles.first() {
        if p.position.iter().any(|&x| x != 0.0) {
            return Err(Error::Unsupported("the pole must sit at the origin".into()));
        }
        if p.angular.is_some() {
            return Err(Error::Unsupported(
                "angular poles need the perturbed angular eigenbasis".into(),
            ));
        }
    }
    Ok(())
}

/// Distinct angular eigenvalues nu for the analytic sphere basis.
fn mode_ladder(d: usize, nu_max: f64) -> Vec<f64> {
    match d {
        2 => (0..=(nu_max.ceil() as usize)).map(|k| k as f64).collect(),
        3 => {
            let mut v = Vec::new();
            let mut l = 0f64;
            loop {
                let nu2 = l * (l + 1.0);
                if nu2.sqrt() > nu_max {
                    break;
                }
                v.push(nu2.sqrt());
                l += 1.0;
            }
            v
        }
        _ => Vec::new(),
    }
}

/// sup over angular modes of the 1D block norms, with a barrier-positivity
/// bound on everything beyond the computed range.
pub fn unipolar_mode_norm(
    spec: &PotentialSpec,
    params: &SemiclassicalParams,
    geom: &GeometryPolicy,
    nu_max_override: Option<f64>,
) -> Result<ModeNormOutcome> {
    require_radial_unipolar(spec)?;
    let t0 = now_ms();
    let h = params.h;
    let r_max = geom.r_max(h);
    let layer = geom.layer(h);
    let grid = RadialGrid::uniform(r_max, geom.dr(h))?;
    let d = spec.dimension as f64;
    let a_neg = spec.hardy_constant.min(0.0);
    let mut bg_min = 0.0f64;
    for i in 0..=512 {
        let r = r_max * i as f64 / 512.0;
        bg_min = bg_min.min(spec.background.eval_radial(r));
    }
    // smallest nu with gamma = h^2((b_k + a^-)/R^2 + bg^-) - 1 >= 1
    let gamma = |nu: f64| -> f64 {
        let b_k = nu * nu + (d * d - 4.0 * d + 3.0) / 4.0;
        h * h * ((b_k + a_neg) / (r_max * r_max) + bg_min) - 1.0
    };
    let mut nu_cut = 1.0f64;
    while gamma(nu_cut) < 1.0 && nu_cut < 1e6 {
        nu_cut *= 1.125;
    }
    let nu_cut = nu_max_override.unwrap_or(nu_cut);
    let ladder = mode_ladder(spec.dimension, nu_cut);
    if ladder.is_empty() {
        return Err(Error::Unsupported(format!(
            "no analytic mode ladder for d = {}",
            spec.dimension
        )));
    }
    let mut per_mode = Vec::with_capacity(ladder.len());
    let mut best = (0.0f64, 0.0f64);
    let mut iters_total = 0usize;
    let mut worst_residual = 0.0f64;
    for &nu in &ladder {
        let eff = effective_radial(spec, 0, nu)?;
        let op = assemble_radial_mode(&eff, params, &grid, &geom.chi, &layer)?;
        let out = mode_norm(&op, POWER_TOL, POWER_MAX_ITER)?;
        iters_total += out.iters;
        worst_residual = worst_residual.max(out.residual);
        per_mode.push((nu, out.norm));
        if out.norm > best.1 {
            best = (nu, out.norm);
        }
    }
    let g = gamma(*ladder.last().unwrap()).max(1e-9);
    let tail_bound = h * h / g;
    Ok(ModeNormOutcome {
        norm: best.1,
        per_mode,
        attained_nu: best.0,
        tail_bound,
        iters_total,
        worst_residual,
        wall_ms: now_ms() - t0,
    })
}

/// One row of a frequency sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRecord {
    pub lambda: f64,
    pub epsilon: f64,
    pub norm: f64,
    pub norm_sqrt_lambda: f64,
    pub iters: usize,
    pub residual: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitOutcome {
    /// N ≈ c * lambda^p
    pub c: f64,
    pub p: f64,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
    /// indices with |residual| > 3 sigma
    pub outliers: Vec<usize>,
    pub window: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<(f64, String)>,
    pub fit: Option<FitOutcome>,
    /// max over records of norm * sqrt(lambda)
    pub c_emp: f64,
}

/// Least squares of log N against log lambda inside the window.
pub fn fit_power_law(points: &[(f64, f64)], window: (f64, f64)) -> Result<FitOutcome> {
    let sel: Vec<(f64, f64)> = points
        .iter()
        .filter(|(l, n)| *l >= window.0 && *l <= window.1 && *n > 0.0)
        .map(|&(l, n)| (l.ln(), n.ln()))
        .collect();
    if sel.len() < 4 {
        return Err(Error::Fit { needed: 4, got: sel.len() });
    }
    let nn = sel.len() as f64;
    let sx: f64 = sel.iter().map(|p| p.0).sum();
    let sy: f64 = sel.iter().map(|p| p.1).sum();
    let sxx: f64 = sel.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = sel.iter().map(|p| p.0 * p.1).sum();
    let p = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    let b = (sy - p * sx) / nn;
    let residuals: Vec<f64> = sel.iter().map(|&(x, y)| y - (p * x + b)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ybar = sy / nn;
    let ss_tot: f64 = sel.iter().map(|&(_, y)| (y - ybar) * (y - ybar)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    // robust spread (median absolute deviation) so a single outlier cannot
    // mask itself
    let median = |xs: &mut Vec<f64>| -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs[xs.len() / 2]
    };
    let med = median(&mut residuals.clone());
    let mad = median(&mut residuals.iter().map(|r| (r - med).abs()).collect());
    let sigma = (1.4826 * mad).max(1e-9);
    let outliers = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| (*r - med).abs() > 3.0 * sigma)
        .map(|(i, _)| i)
        .collect();
    Ok(FitOutcome { c: b.exp(), p, r_squared, residuals, outliers, window })
}

/// Which solver backs each frequency point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepMethod {
    /// spherical-harmonic block diagonalization (radial configurations)
    RadialModes,
    /// 2D Cartesian solve, optionally split into reflection-parity sectors
    #[cfg(feature = "cartesian")]
    Cartesian { sectors: bool },
}

pub fn frequency_sweep(
    spec: &PotentialSpec,
    lambdas: &[f64],
    eps: EpsPolicy,
    geom: &GeometryPolicy,
    method: SweepMethod,
    sign: ResolventSign,
) -> Result<SweepResult> {
    if let Some(bad) = lambdas.iter().find(|&&l| l < 4.0) {
        return Err(Error::Parameter(format!("sweep frequencies must be >= 4, got {bad}")));
    }
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for &lambda in lambdas {
        let t0 = now_ms();
        let run = || -> Result<(f64, usize, f64)> {
            let params = SemiclassicalParams::new(lambda, eps.eps(lambda), sign)?;
            match method {
                SweepMethod::RadialModes => {
                    let out = unipolar_mode_norm(spec, &params, geom, None)?;
                    Ok((out.norm, out.iters_total, out.worst_residual))
                }
                #[cfg(feature = "cartesian")]
                SweepMethod::Cartesian { sectors } => {
                    let out = cartesian_norm(spec, &params, geom, sectors)?;
                    Ok((out.norm, out.iters, out.residual))
                }
            }
        };
        match run() {
            Ok((norm, iters, residual)) => records.push(SweepRecord {
                lambda,
                epsilon: eps.eps(lambda),
                norm,
                norm_sqrt_lambda: norm * lambda.sqrt(),
                iters,
                residual,
                wall_ms: now_ms() - t0,
            }),
            Err(e) => failures.push((lambda, e.to_string())),
        }
    }
    if 4 * failures.len() > lambdas.len() {
        return Err(Error::Sweep { failed: failures.len(), total: lambdas.len() });
    }
    let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.lambda, r.norm)).collect();
    // fit over the upper half of the window in log-lambda; fall back to the
    // whole window when that leaves fewer than 4 points
    let fit = if pts.len() >= 4 {
        let lmin = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let lmax = pts.iter().map(|p| p.0).fold(0.0, f64::max);
        let mid = (lmin * lmax).sqrt();
        let upper = fit_power_law(&pts, (mid * (1.0 - 1e-12), lmax * (1.0 + 1e-12)));
        match upper {
            Ok(f) => Some(f),
            Err(_) => fit_power_law(&pts, (lmin * (1.0 - 1e-12), lmax * (1.0 + 1e-12))).ok(),
        }
    } else {
        None
    };
    let c_emp = records.iter().map(|r| r.norm_sqrt_lambda).fold(0.0, f64::max);
    Ok(SweepResult { records, failures, fit, c_emp })
}

/// Norm through the 2D Cartesian operator; uses the four reflection-parity
/// sectors when the configuration is symmetric and `sectors` is set.
#[cfg(feature = "cartesian")]
pub fn cartesian_norm(
    spec: &PotentialSpec,
    params: &SemiclassicalParams,
    geom: &GeometryPolicy,
    sectors: bool,
) -> Result<NormOutcome> {
    use crate::linalg::sparse::SparseLu;
    use crate::operator::{assemble_cartesian, assemble_sector, ALL_PARITIES};
    let t0 = now_ms();
    let h = params.h;
    let half_width = geom.r_max(h);
    let dx = geom.dr(h);
    let layer = geom.layer(h);
    let h2 = h * h;
    if sectors {
        let mut best_sigma = 0.0f64;
        let mut iters = 0usize;
        let mut worst_res = 0.0f64;
        for parity in ALL_PARITIES {
            let sec = assemble_sector(spec, params, half_width, dx, &geom.chi, &layer, parity)?;
            let m = sec.side * sec.side;
            let lu = SparseLu::factor(m, &sec.triplets)?;
            let chi = sec.chi.clone();
            let mut last: Option<(Vec<C64>, Vec<C64>)> = None;
            let out = {
                let chi_a = chi.clone();
                let chi_b = chi.clone();
                let lu_ref = &lu;
                let last_ref = &mut last;
                power_iteration_sigma(
                    m,
                    move |v| {
                        let b: Vec<C64> = v.iter().zip(&chi_a).map(|(x, c)| x * *c).collect();
                        let y = lu_ref.solve(&b);
                        *last_ref = Some((b.clone(), y.clone()));
                        y.iter().zip(&chi_a).map(|(x, c)| x * *c).collect()
                    },
                    |v| {
                        let b: Vec<C64> = v.iter().zip(&chi_b).map(|(x, c)| x * *c).collect();
                        let y = lu.solve_adjoint(&b);
                        y.iter().zip(&chi_b).map(|(x, c)| x * *c).collect()
                    },
                    POWER_TOL,
                    POWER_MAX_ITER,
                )?
            };
            if let Some((b, y)) = last {
                worst_res = worst_res.max(lu.residual(&y, &b));
            }
            iters += out.iters;
            best_sigma = best_sigma.max(out.sigma);
        }
        Ok(NormOutcome {
            norm: h2 * best_sigma,
            sigma: best_sigma,
            iters,
            residual: worst_res,
            wall_ms: now_ms() - t0,
        })
    } else {
        let op = assemble_cartesian(spec, params, half_width, dx, &geom.chi, &layer)?;
        let n2 = op.grid.n * op.grid.n;
        let lu = SparseLu::factor(n2, &op.triplets)?;
        let chi = op.chi.clone();
        let mut last: Option<(Vec<C64>, Vec<C64>)> = None;
        let out = {
            let chi_a = chi.clone();
            let chi_b = chi.clone();
            let lu_ref = &lu;
            let last_ref = &mut last;
            power_iteration_sigma(
                n2,
                move |v| {
                    let b: Vec<C64> = v.iter().zip(&chi_a).map(|(x, c)| x * *c).collect();
                    let y = lu_ref.solve(&b);
                    *last_ref = Some((b.clone(), y.clone()));
                    y.iter().zip(&chi_a).map(|(x, c)| x * *c).collect()
                },
                |v| {
                    let b: Vec<C64> = v.iter().zip(&chi_b).map(|(x, c)| x * *c).collect();
                    let y = lu.solve_adjoint(&b);
                    y.iter().zip(&chi_b).map(|(x, c)| x * *c).collect()
                },
                POWER_TOL,
                POWER_MAX_ITER,
            )?
        };
        let residual = if let Some((b, y)) = last { lu.residual(&y, &b) } else { 0.0 };
        Ok(NormOutcome {
            norm: h2 * out.sigma,
            sigma: out.sigma,
            iters: out.iters,
            residual,
            wall_ms: now_ms() - t0,
        })
    }
}

/// Result of the trapping negative-control scan.
#[derive(Debug, Clone, Serialize)]
pub struct TrappingScan {
    pub peak_lambda: f64,
    pub peak_value: f64,
    pub coarse: Vec<(f64, f64)>,
}

/// Scan N(lambda) sqrt(lambda) over [lam_lo, lam_hi] on a fine grid and refine
/// the best local maximum by golden-section search. Resonances of the
/// barrier-well control are narrow, so the coarse step must undercut their
/// width.
pub fn trapping_peak_scan(
    spec: &PotentialSpec,
    lam_lo: f64,
    lam_hi: f64,
    coarse_step: f64,
    eps: EpsPolicy,
    geom: &GeometryPolicy,
) -> Result<TrappingScan> {
    let value = |lambda: f64| -> Result<f64> {
        let params = SemiclassicalParams::new(lambda, eps.eps(lambda), ResolventSign::Minus)?;
        let out = unipolar_mode_norm(spec, &params, geom, None)?;
        Ok(out.norm * lambda.sqrt())
    };
    let mut coarse = Vec::new();
    let mut lam = lam_lo;
    let mut best = (lam_lo, f64::NEG_INFINITY);
    while lam <= lam_hi {
        let v = value(lam)?;
        coarse.push((lam, v));
        if v > best.1 {
            best = (lam, v);
        }
        lam += coarse_step;
    }
    // golden-section refinement around the best coarse point
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = (best.0 - coarse_step).max(lam_lo);
    let mut b = (best.0 + coarse_step).min(lam_hi);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = value(x1)?;
    let mut f2 = value(x2)?;
    for _ in 0..40 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = value(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = value(x1)?;
        }
        if (b - a) < 1e-4 {
            break;
        }
    }
    let refined = f1.max(f2).max(best.1);
    Ok(TrappingScan {
        peak_lambda: 0.5 * (a + b),
        peak_value: refined,
        coarse,
    })
}
