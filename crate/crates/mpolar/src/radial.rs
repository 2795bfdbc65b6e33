//! Singular radial ODE machinery: the asymptotic solution pair of
//! y'' = (q1 + i q2) y near r = 0, form-domain membership probes for the
//! critical powers, the mode energy inequality, and weighted norms.

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::linalg::{c, C64};
use crate::potential::PotentialSpec;
use crate::sphere::PolarField;
use std::sync::Arc;

pub type CoeffFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coefficients of y'' = (q1 + i q2) y on (0, l], with the centrifugal floor
/// q1 >= b/r^2 (b > -1/4) and the size bound |q_j| <= C/r^2.
#[derive(Clone)]
pub struct OdeCoefficients {
    pub q1: CoeffFn,
    pub q2: CoeffFn,
    pub floor_b: f64,
    pub bound_c: f64,
}

impl std::fmt::Debug for OdeCoefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OdeCoefficients")
            .field("floor_b", &self.floor_b)
            .field("bound_c", &self.bound_c)
            .finish()
    }
}

impl OdeCoefficients {
    pub fn new(q1: CoeffFn, q2: CoeffFn, floor_b: f64, bound_c: f64) -> Result<Self> {
        if floor_b <= -0.25 {
            return Err(Error::Parameter(format!(
                "floor b = {floor_b} must exceed -1/4"
            )));
        }
        if bound_c <= 0.0 {
            return Err(Error::Parameter("bound C must be positive".into()));
        }
        Ok(OdeCoefficients { q1, q2, floor_b, bound_c })
    }

    pub fn pure_inverse_square(b: f64) -> Result<Self> {
        Self::new(
            Arc::new(move |r: f64| b / (r * r)),
            Arc::new(|_| 0.0),
            b,
            b.abs().max(0.5),
        )
    }

    /// b + 1/4, the squared exponent offset.
    pub fn big_b(&self) -> f64 {
        self.floor_b + 0.25
    }

    fn check_on(&self, grid: &RadialGrid) -> Result<()> {
        for &r in &grid.r {
            let r2 = r * r;
            let q1 = (self.q1)(r);
            let q2 = (self.q2)(r);
            if q1 * r2 < self.floor_b - 1e-9 {
                return Err(Error::Hypothesis(format!(
                    "q1(r) r^2 = {:.6} < floor b = {} at r = {r:.3e}",
                    q1 * r2,
                    self.floor_b
                )));
            }
            if q1.abs() * r2 > self.bound_c + 1e-9 || q2.abs() * r2 > self.bound_c + 1e-9 {
                return Err(Error::Hypothesis(format!(
                    "|q(r)| r^2 exceeds C = {} at r = {r:.3e}",
                    self.bound_c
                )));
            }
        }
        Ok(())
    }
}

/// Sampled solution pair with derivatives. The dominant branch y- is built by
/// integrating inward (outward in s = -ln r, the stable direction); y+ comes
/// from the reduction-of-order quadrature, which pins the Wronskian
/// y+' y- - y+ y-' at exactly 1.
#[derive(Debug, Clone)]
pub struct AsymptoticBasis {
    /// Ascending radii, the log-region subset of the input grid (clamped when
    /// the dominant branch would overflow).
    pub r: Vec<f64>,
    pub y_plus: Vec<C64>,
    pub dy_plus: Vec<C64>,
    pub y_minus: Vec<C64>,
    pub dy_minus: Vec<C64>,
    pub sqrt_b: f64,
    pub wronskian: C64,
    /// max |W(r) - W_med| / |W_med| divided by the decade span.
    pub wronskian_drift_per_decade: f64,
    pub fitted_exponent_plus: f64,
    pub fitted_exponent_minus: f64,
}

pub fn build_basis(coeffs: &OdeCoefficients, grid: &RadialGrid) -> Result<AsymptoticBasis> {
    let l = grid.r_max();
    // operate on the portion r <= l of the grid (caller passes a grid ending at l)
    let r_all: Vec<f64> = grid.r.clone();
    if grid.r_min() > l * 1e-4 {
        return Err(Error::Parameter(
            "grid must reach at least 4 decades below l".into(),
        ));
    }
    coeffs.check_on(grid)?;
    let big_b = coeffs.big_b();
    let sqrt_b = big_b.sqrt();

    // clamp depth so |z-| stays representable
    let growth = (0.25 + coeffs.bound_c).sqrt();
    let span_max = 600.0 / growth.max(0.5);
    let s_top = -(r_all[0].max(l * (-span_max).exp())).ln();

    // s-nodes: descending r = ascending s
    let s_of = |r: f64| -> f64 { -r.ln() };
    let s_l = s_of(l);
    let nodes: Vec<f64> = r_all
        .iter()
        .rev()
        .filter(|&&r| s_of(r) <= s_top + 1e-12)
        .map(|&r| s_of(r))
        .collect();
    let n = nodes.len();
    if n < 8 {
        return Err(Error::Parameter("grid too shallow for the basis construction".into()));
    }

    let qq = |s: f64| -> C64 {
        let r = (-s).exp();
        let r2 = r * r;
        c(0.25 + r2 * (coeffs.q1)(r), r2 * (coeffs.q2)(r))
    };

    // RK4 on (z, z') from s_l with z(L) = z'(L) = 1, storing substep samples
    // for the reduction-of-order quadrature
    let sub_target = 0.004 / (1.0 + growth / 4.0);
    let mut s_samples: Vec<f64> = Vec::new();
    let mut z_samples: Vec<(C64, C64)> = Vec::new();
    let mut node_at: Vec<usize> = Vec::with_capacity(n);
    let mut z = c(1.0, 0.0);
    let mut zp = c(1.0, 0.0);
    let mut s = s_l;
    s_samples.push(s);
    z_samples.push((z, zp));
    node_at.push(0);
    debug_assert!((nodes[0] - s_l).abs() < 1e-9);
    for k in 1..n {
        let ds_total = nodes[k] - nodes[k - 1];
        let mut m = (ds_total / sub_target).ceil() as usize;
        if m % 2 == 1 {
            m += 1;
        }
        m = m.max(2);
        let hstep = ds_total / m as f64;
        for _ in 0..m {
            // RK4 for z'' = q(s) z
            let f = |s: f64, z: C64, zp: C64| -> (C64, C64) { (zp, qq(s) * z) };
            let (k1z, k1p) = f(s, z, zp);
            let (k2z, k2p) = f(s + 0.5 * hstep, z + 0.5 * hstep * k1z, zp + 0.5 * hstep * k1p);
            let (k3z, k3p) = f(s + 0.5 * hstep, z + 0.5 * hstep * k2z, zp + 0.5 * hstep * k2p);
            let (k4z, k4p) = f(s + hstep, z + hstep * k3z, zp + hstep * k3p);
            z += hstep / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
            zp += hstep / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            s += hstep;
            s_samples.push(s);
            z_samples.push((z, zp));
        }
        if z.norm() < 1e-2 {
            return Err(Error::DegenerateBasis { value: z.norm() });
        }
        node_at.push(s_samples.len() - 1);
    }

    // tail growth rate from the last decade: d(log z)/ds
    let s_end = *s_samples.last().unwrap();
    let lookback = (s_end - s_l).min(2.302585);
    let idx0 = s_samples.partition_point(|&x| x < s_end - lookback).min(s_samples.len() - 2);
    let dlog = {
        let (z0, _) = z_samples[idx0];
        let (z1, _) = z_samples[s_samples.len() - 1];
        let dmag = (z1.norm() / z0.norm()).ln();
        let dphase = (z1 / z0).arg();
        let ds = s_end - s_samples[idx0];
        c(dmag / ds, dphase / ds)
    };
    let z_last = z_samples.last().unwrap().0;
    let tail = 1.0 / (z_last * z_last) / (2.0 * dlog);

    // backward accumulation of I(s) = int_s^inf z^{-2}, one substep at a
    // time with a 3-point quadratic rule (O(h^4) local)
    let ns = s_samples.len();
    let mut integral = vec![C64::ZERO; ns];
    integral[ns - 1] = tail;
    let f_of = |i: usize| -> C64 {
        let (zi, _) = z_samples[i];
        1.0 / (zi * zi)
    };
    let uniform = |a: usize, b: usize, cc: usize| -> bool {
        let h1 = s_samples[b] - s_samples[a];
        let h2 = s_samples[cc] - s_samples[b];
        (h1 - h2).abs() < 1e-10 * h1
    };
    for j in (0..ns - 1).rev() {
        let h1 = s_samples[j + 1] - s_samples[j];
        let seg = if j >= 1 && uniform(j - 1, j, j + 1) {
            h1 / 12.0 * (-f_of(j - 1) + 8.0 * f_of(j) + 5.0 * f_of(j + 1))
        } else if j + 2 < ns && uniform(j, j + 1, j + 2) {
            h1 / 12.0 * (5.0 * f_of(j) + 8.0 * f_of(j + 1) - f_of(j + 2))
        } else {
            h1 * 0.5 * (f_of(j) + f_of(j + 1))
        };
        integral[j] = integral[j + 1] + seg;
    }

    // assemble y+/- on the node radii (back to ascending r)
    let mut r_out = Vec::with_capacity(n);
    let mut y_plus = Vec::with_capacity(n);
    let mut dy_plus = Vec::with_capacity(n);
    let mut y_minus = Vec::with_capacity(n);
    let mut dy_minus = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let si = nodes[k];
        let ri = (-si).exp();
        let (zm, zmp) = z_samples[node_at[k]];
        let ii = integral[node_at[k]];
        let zpl = zm * ii;
        let zplp = zmp * ii - 1.0 / zm;
        let sqr = ri.sqrt();
        r_out.push(ri);
        y_minus.push(sqr * zm);
        dy_minus.push((0.5 * zm - zmp) / sqr);
        y_plus.push(sqr * zpl);
        dy_plus.push((0.5 * zpl - zplp) / sqr);
    }

    // wronskian samples and drift
    let mut w: Vec<C64> = (0..n)
        .map(|k| dy_plus[k] * y_minus[k] - y_plus[k] * dy_minus[k])
        .collect();
    let w_med = w[n / 2];
    let decades = (r_out.last().unwrap() / r_out[0]).log10().max(1e-9);
    let drift = w
        .iter()
        .map(|wi| (wi - w_med).norm() / w_med.norm())
        .fold(0.0f64, f64::max)
        / decades;
    let w_final = w.remove(n / 2);

    // asymptotic exponents from the lowest decade of the sampled branch
    let fit_slope = |ys: &[C64]| -> f64 {
        let hi = r_out[0] * 10.0;
        let pts: Vec<(f64, f64)> = r_out
            .iter()
            .zip(ys)
            .filter(|(&r, y)| r <= hi && y.norm() > 0.0)
            .map(|(&r, y)| (r.ln(), y.norm().ln()))
            .collect();
        linear_slope(&pts)
    };
    let fitted_plus = fit_slope(&y_plus);
    let fitted_minus = fit_slope(&y_minus);

    Ok(AsymptoticBasis {
        r: r_out,
        y_plus,
        dy_plus,
        y_minus,
        dy_minus,
        sqrt_b,
        wronskian: w_final,
        wronskian_drift_per_decade: drift,
        fitted_exponent_plus: fitted_plus,
        fitted_exponent_minus: fitted_minus,
    })
}

fn linear_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Quadrature traces of the form integrals of u_s = r^s phi across a ladder
/// of inner radii, for both critical exponents.
#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub s_plus: f64,
    pub s_minus: f64,
    pub deltas: Vec<f64>,
    /// (grad-form, Hardy-weight) traces for the Friedrichs branch r^{s+}.
    pub traces_plus: Vec<(f64, f64)>,
    /// same for the excluded branch r^{s-}.
    pub traces_minus: Vec<(f64, f64)>,
    /// fitted log-log divergence rate of the excluded branch's grad form
    pub fitted_rate_minus: f64,
    /// power-counting prediction 2 s- + d - 2
    pub expected_rate_minus: f64,
}

pub fn verify_u_s_membership(spec: &PotentialSpec, pole_index: usize) -> Result<MembershipReport> {
    let pole = spec
        .poles
        .get(pole_index)
        .ok_or_else(|| Error::Parameter(format!("no pole {pole_index}")))?;
    let a = match pole.radial {
        crate::potential::RadialProfile::InverseSquare { a } => a,
        _ => {
            return Err(Error::Unsupported(
                "membership probe requires an exactly inverse-square pole".into(),
            ))
        }
    };
    let d = spec.dimension as f64;
    let half = d / 2.0 - 1.0;
    let disc = half * half + a;
    if disc <= 0.0 {
        return Err(Error::Hypothesis("positivity floor fails; exponents are complex".into()));
    }
    let s_plus = -half + disc.sqrt();
    let s_minus = -half - disc.sqrt();
    let l = pole.cutoff_radius;

    let phi = |r: f64| -> (f64, f64) {
        // smooth cutoff: 1 on r <= l/2, 0 at l; returns (phi, phi')
        if r <= 0.5 * l {
            (1.0, 0.0)
        } else if r >= l {
            (0.0, 0.0)
        } else {
            let t = (r - 0.5 * l) / (0.5 * l);
            let s = 1.0 - t * t * (3.0 - 2.0 * t);
            let ds = -(6.0 * t - 6.0 * t * t) / (0.5 * l);
            (s, ds)
        }
    };
    let trace = |s_exp: f64, delta: f64| -> (f64, f64) {
        // log-spaced quadrature of |u'|^2 r^{d-1} and u^2 r^{d-3} over (delta, l)
        let n = 6000usize;
        let ratio = (l / delta).powf(1.0 / n as f64);
        let mut grad = 0.0;
        let mut hardy = 0.0;
        let mut r = delta;
        for _ in 0..n {
            let r1 = r * ratio;
            let rm = (r * r1).sqrt();
            let dr = r1 - r;
            let (p, dp) = phi(rm);
            let u = rm.powf(s_exp) * p;
            let du = s_exp * rm.powf(s_exp - 1.0) * p + rm.powf(s_exp) * dp;
            grad += du * du * rm.powf(d - 1.0) * dr;
            hardy += u * u * rm.powf(d - 3.0) * dr;
            r = r1;
        }
        (grad, hardy)
    };

    let deltas: Vec<f64> = (1..=8).map(|j| l * 10f64.powi(-j)).collect();
    let traces_plus: Vec<(f64, f64)> = deltas.iter().map(|&dlt| trace(s_plus, dlt)).collect();
    let traces_minus: Vec<(f64, f64)> = deltas.iter().map(|&dlt| trace(s_minus, dlt)).collect();

    // divergence rate of the excluded branch from the last few ladder steps
    let pts: Vec<(f64, f64)> = deltas
        .iter()
        .zip(&traces_minus)
        .skip(3)
        .map(|(&dlt, &(g, _))| (dlt.ln(), g.ln()))
        .collect();
    let fitted = linear_slope(&pts);
    Ok(MembershipReport {
        s_plus,
        s_minus,
        deltas,
        traces_plus,
        traces_minus,
        fitted_rate_minus: fitted,
        expected_rate_minus: 2.0 * s_minus + d - 2.0,
    })
}

/// Pointwise and integrated energy-inequality report for one radial mode.
#[derive(Debug, Clone)]
pub struct ModeEnergy {
    pub energy: Vec<f64>,
    pub c1: f64,
    pub m: f64,
    pub rho: f64,
    /// worst (lhs - rhs) / scale over r in [m h, r1]
    pub worst_pointwise_excess: f64,
    pub integrated_lhs: f64,
    pub integrated_rhs: f64,
    pub residual: f64,
}

impl ModeEnergy {
    pub fn pointwise_holds(&self, tol: f64) -> bool {
        self.worst_pointwise_excess <= tol
    }

    pub fn integrated_holds(&self) -> bool {
        self.integrated_lhs <= self.integrated_rhs * (1.0 + 1e-9) + 1e-12
    }
}

/// Check -E' <= (C1 h / r^2 + 1) E + |g|^2 for E = |v|^2 + |h v'|^2 on a
/// uniform grid, plus the Gronwall-integrated consequence on [m h, r1].
///
/// `w_values` holds the (possibly complex, absorbing-layer included)
/// effective potential used by the solve; the residual of
/// -h^2 v'' + h^2 W v - (1 - i h alpha) v = h g is verified first.
#[allow(clippy::too_many_arguments)]
pub fn gronwall_energy_bound(
    r: &[f64],
    v: &[C64],
    g: &[C64],
    w_values: &[C64],
    h: f64,
    alpha: f64,
    c1: f64,
    m: f64,
    rho: f64,
    r1: f64,
) -> Result<ModeEnergy> {
    let n = r.len();
    assert!(n >= 8 && v.len() == n && g.len() == n && w_values.len() == n);
    if alpha > 1.0 {
        return Err(Error::Parameter(format!("alpha = {alpha} must be <= 1")));
    }
    let dr = r[1] - r[0];

    // residual of the discrete equation (Dirichlet ghosts at both ends)
    let mut res2 = 0.0;
    let mut rhs2 = 0.0;
    let zero = C64::ZERO;
    for i in 0..n {
        let vm = if i == 0 { zero } else { v[i - 1] };
        let vp = if i + 1 == n { zero } else { v[i + 1] };
        let lap = (vm - 2.0 * v[i] + vp) / (dr * dr);
        let lhs = -h * h * lap + h * h * w_values[i] * v[i] - (c(1.0, -h * alpha)) * v[i];
        let rhs = h * g[i];
        res2 += (lhs - rhs).norm_sqr();
        rhs2 += rhs.norm_sqr();
    }
    let residual = (res2 / rhs2.max(1e-300)).sqrt();
    let trivial = v.iter().all(|z| *z == zero) && g.iter().all(|z| *z == zero);
    if residual > 1e-8 && !trivial {
        return Err(Error::NotASolution { residual, limit: 1e-8 });
    }

    // E and its centered derivative
    let mut energy = vec![0.0f64; n];
    for i in 0..n {
        let vm = if i == 0 { zero } else { v[i - 1] };
        let vp = if i + 1 == n { zero } else { v[i + 1] };
        let dv = (vp - vm) / (2.0 * dr);
        energy[i] = v[i].norm_sqr() + (h * dv).norm_sqr();
    }

    let mut worst = f64::NEG_INFINITY;
    for i in 1..n - 1 {
        if r[i] < m * h || r[i] > r1 {
            continue;
        }
        let de = (energy[i + 1] - energy[i - 1]) / (2.0 * dr);
        let lhs = -de;
        let rhs = (c1 * h / (r[i] * r[i]) + 1.0) * energy[i] + g[i].norm_sqr();
        let scale = rhs.abs().max(energy[i]).max(1e-300);
        worst = worst.max((lhs - rhs) / scale);
    }
    if worst == f64::NEG_INFINITY {
        worst = 0.0;
    }

    // integrated form: int_{mh}^{r1} E <= e^{C1/m + rho} (r1 kappa^2 + int E(t + rho) dt)
    let kappa2: f64 = g
        .iter()
        .zip(r)
        .filter(|(_, &ri)| ri <= r1 + rho)
        .map(|(gi, _)| gi.norm_sqr() * dr)
        .sum();
    let interp = |x: f64| -> f64 {
        if x <= r[0] {
            return energy[0];
        }
        if x >= r[n - 1] {
            return energy[n - 1];
        }
        let j = ((x - r[0]) / dr).floor() as usize;
        let t = (x - r[j]) / dr;
        energy[j] * (1.0 - t) + energy[(j + 1).min(n - 1)] * t
    };
    let mut lhs_int = 0.0;
    let mut shifted_int = 0.0;
    let steps = 4000usize;
    let a0 = m * h;
    let dt = (r1 - a0) / steps as f64;
    if dt > 0.0 {
        for k in 0..=steps {
            let t = a0 + k as f64 * dt;
            let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
            lhs_int += w * interp(t) * dt;
            shifted_int += w * interp(t + rho) * dt;
        }
    }
    let rhs_int = (c1 / m + rho).exp() * (r1 * kappa2 + shifted_int);

    Ok(ModeEnergy {
        energy,
        c1,
        m,
        rho,
        worst_pointwise_excess: worst,
        integrated_lhs: lhs_int,
        integrated_rhs: rhs_int,
        residual,
    })
}

/// Weight selector for near-pole weighted norms.
#[derive(Debug, Clone, Copy)]
pub enum RadialWeight {
    /// int_{r <= 1} r^{-t} |u|^2 dx, t in (0, 1]
    Power { t: f64 },
    /// int h^2 / r^3 |u|^2 dx
    SemiclassicalCube { h: f64 },
}

pub fn weighted_norm(field: &PolarField, weight: RadialWeight) -> Result<f64> {
    match weight {
        RadialWeight::Power { t } => {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::Parameter(format!("t = {t} outside (0, 1]")));
            }
            Ok(field.weighted_norm_sq(|r| if r <= 1.0 { r.powf(-t) } else { 0.0 }))
        }
        RadialWeight::SemiclassicalCube { h } => {
            Ok(field.weighted_norm_sq(|r| h * h / (r * r * r)))
        }
    }
}

/// Same weights evaluated from per-mode radial coefficients of an orthonormal
/// angular expansion (d = 2, planar measure r dr).
pub fn weighted_norm_modes(r: &[f64], coeffs: &[Vec<C64>], weight: RadialWeight) -> Result<f64> {
    let wfun: Box<dyn Fn(f64) -> f64> = match weight {
        RadialWeight::Power { t } => {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::Parameter(format!("t = {t} outside (0, 1]")));
            }
            Box::new(move |x: f64| if x <= 1.0 { x.powf(-t) } else { 0.0 })
        }
        RadialWeight::SemiclassicalCube { h } => Box::new(move |x: f64| h * h / (x * x * x)),
    };
    let mut wq = vec![0.0; r.len()];
    for i in 0..r.len().saturating_sub(1) {
        let dh = r[i + 1] - r[i];
        wq[i] += 0.5 * dh;
        wq[i + 1] += 0.5 * dh;
    }
    let mut acc = 0.0;
    for ck in coeffs {
        for (i, v) in ck.iter().enumerate() {
            acc += v.norm_sqr() * wfun(r[i]) * r[i] * wq[i];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_equation_exponents() {
        // q1 = B/r^2 - 1/(4 r^2) with B = 1: y+ ~ r^{3/2}, y- ~ r^{-1/2}
        let coeffs = OdeCoefficients::pure_inverse_square(1.0 - 0.25).unwrap();
        let grid = RadialGrid::log_uniform(1e-6, 1.0, 1.0, 96, 1.0).unwrap();
        let basis = build_basis(&coeffs, &grid).unwrap();
        assert!((basis.sqrt_b - 1.0).abs() < 1e-12);
        assert!(
            (basis.fitted_exponent_plus - 1.5).abs() < 1e-3,
            "y+ slope {}",
            basis.fitted_exponent_plus
        );
        assert!(
            (basis.fitted_exponent_minus + 0.5).abs() < 1e-3,
            "y- slope {}",
            basis.fitted_exponent_minus
        );
    }

    #[test]
    fn zero_coefficient_gives_linear_and_constant() {
        // q1 = 0/r^2: sqrt(B) = 1/2, y+ ~ r, y- ~ const
        let coeffs = OdeCoefficients::new(
            Arc::new(|_| 0.0),
            Arc::new(|_| 0.0),
            0.0,
            0.5,
        )
        .unwrap();
        let grid = RadialGrid::log_uniform(1e-6, 1.0, 1.0, 96, 1.0).unwrap();
        let basis = build_basis(&coeffs, &grid).unwrap();
        assert!((basis.sqrt_b - 0.5).abs() < 1e-12);
        assert!((basis.fitted_exponent_plus - 1.0).abs() < 1e-3);
        assert!(basis.fitted_exponent_minus.abs() < 1e-3);
    }

    #[test]
    fn wronskian_constancy_and_unity() {
        let coeffs = OdeCoefficients::new(
            Arc::new(|r: f64| 2.0 / (r * r) + 1.0),
            Arc::new(|r: f64| 0.3 / (r * r)),
            2.0,
            4.0,
        )
        .unwrap();
        let grid = RadialGrid::log_uniform(1e-6, 0.8, 0.8, 96, 1.0).unwrap();
        let basis = build_basis(&coeffs, &grid).unwrap();
        assert!(
            (basis.wronskian - c(1.0, 0.0)).norm() < 1e-6,
            "wronskian {}",
            basis.wronskian
        );
        assert!(
            basis.wronskian_drift_per_decade < 1e-6,
            "drift {:.3e}",
            basis.wronskian_drift_per_decade
        );
    }

    #[test]
    fn perturbed_inverse_square_recovers_exponent() {
        // q1 = (a + nu^2 + (d^2-4d+3)/4)/r^2 + bounded, q2 small
        let a = 0.6;
        let nu: f64 = 2.0;
        let d = 2.0f64;
        let b = a + nu * nu + (d * d - 4.0 * d + 3.0) / 4.0;
        let coeffs = OdeCoefficients::new(
            Arc::new(move |r: f64| b / (r * r) - 3.0),
            Arc::new(|_| 0.05),
            b - 0.76,
            b + 4.0,
        )
        .unwrap();
        let grid = RadialGrid::log_uniform(1e-7, 0.5, 0.5, 128, 1.0).unwrap();
        let basis = build_basis(&coeffs, &grid).unwrap();
        let sigma = (b + 0.25).sqrt();
        assert!(
            (basis.fitted_exponent_plus - (0.5 + sigma)).abs() < 0.01,
            "slope {} vs {}",
            basis.fitted_exponent_plus,
            0.5 + sigma
        );
    }

    #[test]
    fn monotone_z_second_difference() {
        // discrete check of Z'' >= 2 sqrt(B) Z' for Z = |z-|^2, via y- samples
        let coeffs = OdeCoefficients::pure_inverse_square(0.75).unwrap();
        let grid = RadialGrid::log_uniform(1e-5, 1.0, 1.0, 128, 1.0).unwrap();
        let basis = build_basis(&coeffs, &grid).unwrap();
        let sqrt_b = basis.sqrt_b;
        // reconstruct Z(s) = |z|^2 = |y|^2 / r on the log grid (descending s)
        let m = basis.r.len();
        let zs: Vec<f64> = (0..m)
            .map(|i| basis.y_minus[m - 1 - i].norm_sqr() / basis.r[m - 1 - i])
            .collect();
        let ss: Vec<f64> = (0..m).map(|i| -(basis.r[m - 1 - i]).ln()).collect();
        let ds = ss[1] - ss[0];
        for i in 1..m - 1 {
            if (ss[i + 1] - ss[i] - ds).abs() > 1e-9 {
                continue; // skip the seam into the uniform region
            }
            let zpp = (zs[i + 1] - 2.0 * zs[i] + zs[i - 1]) / (ds * ds);
            let zp = (zs[i + 1] - zs[i - 1]) / (2.0 * ds);
            assert!(
                zpp >= 2.0 * sqrt_b * zp - 1e-6 * zs[i].max(1.0) - 1e2 * ds * ds * zs[i],
                "at s = {}: Z'' = {zpp}, 2 sqrt(B) Z' = {}",
                ss[i],
                2.0 * sqrt_b * zp
            );
        }
    }

    #[test]
    fn sigma_consistency_with_effective_potential() {
        // sqrt(B) from the mode coefficient equals sigma_k
        let spec = PotentialSpec::single_inverse_square(2, 0.8, 0.5);
        for nu in [0.0, 1.0, 3.0] {
            let eff = crate::potential::effective_radial(&spec, 0, nu).unwrap();
            let b = 0.8 + nu * nu + (4.0 - 8.0 + 3.0) / 4.0;
            let coeffs = OdeCoefficients::new(
                {
                    let e = eff.clone();
                    Arc::new(move |r: f64| e.w(r))
                },
                Arc::new(|_| 0.0),
                b,
                b.abs() + 1.0,
            )
            .unwrap();
            let grid = RadialGrid::log_uniform(1e-6, 0.5, 0.5, 96, 1.0).unwrap();
            let basis = build_basis(&coeffs, &grid).unwrap();
            assert!(
                (basis.sqrt_b - eff.sigma_k).abs() < 1e-12,
                "sqrt(B) = {} vs sigma_k = {}",
                basis.sqrt_b,
                eff.sigma_k
            );
            assert!((basis.fitted_exponent_plus - (0.5 + eff.sigma_k)).abs() < 0.01);
        }
    }

    #[test]
    fn membership_free_three_d() {
        // d = 3, a = 0: s+ = 0 (bounded), s- = -1, grad form diverges like 1/delta
        let spec = PotentialSpec::single_inverse_square(3, 0.0, 1.0);
        let report = verify_u_s_membership(&spec, 0).unwrap();
        assert!((report.s_plus - 0.0).abs() < 1e-14);
        assert!((report.s_minus + 1.0).abs() < 1e-14);
        assert!(
            (report.fitted_rate_minus - report.expected_rate_minus).abs() < 0.05,
            "fitted {} expected {}",
            report.fitted_rate_minus,
            report.expected_rate_minus
        );
        // expected rate is delta^{-1}
        assert!((report.expected_rate_minus + 1.0).abs() < 1e-14);
        // Friedrichs branch trace stabilizes
        let t = &report.traces_plus;
        let last = t[t.len() - 1].0;
        let prev = t[t.len() - 2].0;
        assert!((last - prev).abs() < 1e-4 * last.abs().max(1e-12));
    }

    #[test]
    fn membership_d2_a1_both_finite() {
        let spec = PotentialSpec::single_inverse_square(2, 1.0, 1.0);
        let report = verify_u_s_membership(&spec, 0).unwrap();
        assert!((report.s_plus - 1.0).abs() < 1e-14);
        // s- = -1: grad integrand r^{-4} r^{d-1} = r^{-3}: diverges
        let t = &report.traces_plus;
        let last = t[t.len() - 1];
        let prev = t[t.len() - 2];
        assert!((last.0 - prev.0).abs() < 1e-4 * last.0);
        assert!((last.1 - prev.1).abs() < 1e-4 * last.1);
    }

    #[test]
    fn membership_d3_negative_a() {
        let spec = PotentialSpec::single_inverse_square(3, -0.2, 1.0);
        let report = verify_u_s_membership(&spec, 0).unwrap();
        assert!((report.s_plus - (-0.5 + (0.25f64 - 0.2).sqrt())).abs() < 1e-14);
        assert!(
            (report.fitted_rate_minus - report.expected_rate_minus).abs() < 0.05,
            "fitted {} vs {}",
            report.fitted_rate_minus,
            report.expected_rate_minus
        );
    }

    #[test]
    fn gronwall_zero_mode_is_tight() {
        let n = 512;
        let dr = 0.002;
        let r: Vec<f64> = (1..=n).map(|i| i as f64 * dr).collect();
        let v = vec![C64::ZERO; n];
        let g = vec![C64::ZERO; n];
        let w = vec![C64::ZERO; n];
        let report =
            gronwall_energy_bound(&r, &v, &g, &w, 0.05, 0.0, 1.0, 1.0, 0.25, 0.8).unwrap();
        assert!(report.worst_pointwise_excess <= 0.0);
        assert!(report.integrated_holds());
        assert_eq!(report.integrated_lhs, 0.0);
    }

    #[test]
    fn weighted_norm_power_law_closed_form() {
        // u = r^sigma, angular constant, d = 2, t = 1/2: 2 pi / (2 sigma + 2 - t)
        let sigma = 0.8;
        let t = 0.5;
        let r: Vec<f64> = (1..=4000).map(|i| i as f64 * 2.5e-4).collect();
        let field = PolarField::from_fn(&r, 64, |ri, _| c(ri.powf(sigma), 0.0));
        let got = weighted_norm(&field, RadialWeight::Power { t }).unwrap();
        let want = 2.0 * std::f64::consts::PI / (2.0 * sigma + 2.0 - t);
        assert!((got - want).abs() < 1e-4 * want, "{got} vs {want}");
    }

    #[test]
    fn weighted_norm_zero_field() {
        let r: Vec<f64> = (1..=100).map(|i| i as f64 * 0.01).collect();
        let field = PolarField::from_fn(&r, 16, |_, _| C64::ZERO);
        assert_eq!(weighted_norm(&field, RadialWeight::Power { t: 0.5 }).unwrap(), 0.0);
    }

    #[test]
    fn weighted_norm_bad_exponent_rejected() {
        let r: Vec<f64> = (1..=10).map(|i| i as f64 * 0.1).collect();
        let field = PolarField::from_fn(&r, 8, |_, _| C64::ZERO);
        assert!(weighted_norm(&field, RadialWeight::Power { t: 1.5 }).is_err());
        assert!(weighted_norm(&field, RadialWeight::Power { t: 0.0 }).is_err());
    }

    #[test]
    fn mode_and_field_weighted_norms_agree() {
        let r: Vec<f64> = (1..=800).map(|i| i as f64 * 1e-3).collect();
        let field = PolarField::from_fn(&r, 128, |ri, ti| {
            c(ri * (3.0 * ti).cos(), ri.sqrt() * (ti).sin())
        });
        let basis = crate::sphere::analytic_basis_on_grid(2, 6.0, 128).unwrap();
        let split = crate::sphere::split_modes(&field, &basis, 2.0).unwrap();
        let w_field = weighted_norm(&field, RadialWeight::Power { t: 0.5 }).unwrap();
        let w_modes =
            weighted_norm_modes(&r, &split.coefficients, RadialWeight::Power { t: 0.5 }).unwrap();
        assert!((w_field - w_modes).abs() < 1e-8 * w_field, "{w_field} vs {w_modes}");
    }
}
