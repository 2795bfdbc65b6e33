//! Multipolar potentials: inverse-square poles with optional angular
//! structure on top of a bounded compactly supported background, plus the
//! structural-hypothesis validator and the Hardy-quotient probe.

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use serde::{Deserialize, Serialize};

/// Radial profile of a single pole on (0, l].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum RadialProfile {
    /// a / r^2
    InverseSquare { a: f64 },
    /// a * ln^2(r) / r^2 — just above the critical homogeneity; violates the
    /// upper bound at small r and serves as the negative control.
    LogSquaredCounterexample { a: f64 },
    /// Piecewise-linear interpolant of (r, v) pairs, constant beyond the table.
    CustomTable { r: Vec<f64>, v: Vec<f64> },
}

impl RadialProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialProfile::InverseSquare { a } => a / (r * r),
            RadialProfile::LogSquaredCounterexample { a } => {
                let ln = r.ln();
                a * ln * ln / (r * r)
            }
            RadialProfile::CustomTable { r: rs, v } => {
                if rs.is_empty() {
                    return 0.0;
                }
                if r <= rs[0] {
                    return v[0];
                }
                if r >= *rs.last().unwrap() {
                    return *v.last().unwrap();
                }
                let idx = rs.partition_point(|&x| x < r);
                let (r0, r1) = (rs[idx - 1], rs[idx]);
                let t = (r - r0) / (r1 - r0);
                v[idx - 1] * (1.0 - t) + v[idx] * t
            }
        }
    }
}

/// One pole: position, radial profile, optional angular coefficient table
/// b(theta) >= 0 sampled uniformly on [0, 2*pi) (d = 2 only), cutoff radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pole {
    pub position: Vec<f64>,
    #[serde(flatten)]
    pub radial: RadialProfile,
    #[serde(default)]
    pub angular: Option<Vec<f64>>,
    pub cutoff_radius: f64,
}

impl Pole {
    pub fn angular_value(&self, theta: f64) -> f64 {
        match &self.angular {
            None => 0.0,
            Some(b) => {
                let n = b.len();
                let t = theta.rem_euclid(2.0 * std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
                let x = t * n as f64;
                let i = (x.floor() as usize) % n;
                let frac = x - x.floor();
                b[i] * (1.0 - frac) + b[(i + 1) % n] * frac
            }
        }
    }

    /// Local contribution at offset `dx` from the pole (|dx| <= cutoff).
    fn local_value(&self, dx: &[f64]) -> f64 {
        let r = dx.iter().map(|c| c * c).sum::<f64>().sqrt();
        let mut v = self.radial.eval(r);
        if self.angular.is_some() {
            let theta = dx[1].atan2(dx[0]);
            v += self.angular_value(theta) / (r * r);
        }
        v
    }
}

/// Bounded background with declared compact support.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Background {
    Zero,
    /// Radial step profile: value `levels[i]` on [radii[i], radii[i+1]).
    RadialSteps { radii: Vec<f64>, levels: Vec<f64> },
    /// Smooth radial bump amp * s(r) supported in r < support.
    Bump { amplitude: f64, support: f64 },
}

impl Background {
    pub fn support_radius(&self) -> f64 {
        match self {
            Background::Zero => 0.0,
            Background::RadialSteps { radii, .. } => radii.last().copied().unwrap_or(0.0),
            Background::Bump { support, .. } => *support,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        self.eval_radial(r)
    }

    pub fn eval_radial(&self, r: f64) -> f64 {
        match self {
            Background::Zero => 0.0,
            Background::RadialSteps { radii, levels } => {
                if radii.is_empty() || r >= *radii.last().unwrap() {
                    return 0.0;
                }
                let idx = radii.partition_point(|&x| x <= r);
                if idx == 0 {
                    levels[0]
                } else {
                    levels.get(idx).copied().unwrap_or(0.0)
                }
            }
            Background::Bump { amplitude, support } => {
                if r >= *support {
                    0.0
                } else {
                    let t = r / support;
                    amplitude * (1.0 - t * t).powi(3)
                }
            }
        }
    }
}

/// Full description of V together with its hypothesis constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub dimension: usize,
    #[serde(default)]
    pub poles: Vec<Pole>,
    pub background: Background,
    /// Lower-bound coefficient in V >= a/|x-p|^2 near each pole.
    pub hardy_constant: f64,
    /// Upper-bound coefficient in |V| <= C_V/|x-p|^2.
    pub bound_constant: f64,
    /// Gradient-bound coefficient in |grad V| <= C_V'/|x-p|^3, when asserted.
    #[serde(default)]
    pub gradient_constant: Option<f64>,
}

impl PotentialSpec {
    pub fn free(dimension: usize) -> Self {
        PotentialSpec {
            dimension,
            poles: Vec::new(),
            background: Background::Zero,
            hardy_constant: 0.0,
            bound_constant: 1.0,
            gradient_constant: Some(1.0),
        }
    }

    pub fn single_inverse_square(dimension: usize, a: f64, cutoff: f64) -> Self {
        PotentialSpec {
            dimension,
            poles: vec![Pole {
                position: vec![0.0; dimension],
                radial: RadialProfile::InverseSquare { a },
                angular: None,
                cutoff_radius: cutoff,
            }],
            background: Background::Zero,
            hardy_constant: a,
            bound_constant: a.abs().max(1e-12),
            gradient_constant: Some(2.0 * a.abs().max(1e-12)),
        }
    }

    /// Positivity floor a + (d/2 - 1)^2.
    pub fn positivity_floor(&self) -> f64 {
        let half = self.dimension as f64 / 2.0 - 1.0;
        self.hardy_constant + half * half
    }

    pub fn check_geometry(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::Parameter("dimension must be >= 2".into()));
        }
        for (i, p) in self.poles.iter().enumerate() {
            if p.cutoff_radius <= 0.0 {
                return Err(Error::Parameter(format!("pole {i}: cutoff radius must be positive")));
            }
            if p.position.len() != self.dimension {
                return Err(Error::Parameter(format!("pole {i}: position has wrong dimension")));
            }
            if p.angular.is_some() && self.dimension != 2 {
                return Err(Error::Unsupported("angular pole profiles are implemented for d = 2 only".into()));
            }
        }
        for i in 0..self.poles.len() {
            for j in i + 1..self.poles.len() {
                let dist = euclid(&self.poles[i].position, &self.poles[j].position);
                let min_sep = 2.0 * self.poles[i].cutoff_radius.max(self.poles[j].cutoff_radius);
                if dist <= min_sep {
                    return Err(Error::Geometry(format!(
                        "poles {i} and {j} are {dist:.3} apart; need > {min_sep:.3} (twice the cutoff radius)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Pointwise value of V. Errors exactly at a pole position.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let mut v = self.background.eval(x);
        for (j, pole) in self.poles.iter().enumerate() {
            let dx: Vec<f64> = x.iter().zip(&pole.position).map(|(a, b)| a - b).collect();
            let r2: f64 = dx.iter().map(|c| c * c).sum();
            if r2 == 0.0 {
                return Err(Error::AtPole { pole_index: j, position: pole.position.clone() });
            }
            if r2.sqrt() <= pole.cutoff_radius {
                v += pole.local_value(&dx);
            }
        }
        Ok(v)
    }

    /// Radial slice of the total potential about pole `j`, valid when the
    /// configuration is radial there (no other pole support, radial
    /// background centered at the pole).
    pub fn radial_about_pole(&self, pole_index: usize) -> Result<impl Fn(f64) -> f64 + '_> {
        let pole = self
            .poles
            .get(pole_index)
            .ok_or_else(|| Error::Parameter(format!("no pole {pole_index}")))?;
        if pole.angular.is_some() {
            return Err(Error::Unsupported(
                "pole has an angular profile; use the angular eigenbasis for its modes".into(),
            ));
        }
        let centered = pole.position.iter().all(|&c| c == 0.0);
        if !centered && !matches!(self.background, Background::Zero) {
            return Err(Error::Unsupported(
                "radial slice requires the pole at the origin or a zero background".into(),
            ));
        }
        let l = pole.cutoff_radius;
        Ok(move |r: f64| {
            let mut v = self.background.eval_radial(r);
            if r <= l {
                v += pole.radial.eval(r);
            }
            v
        })
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Effective 1D coefficient data for one angular mode near one pole.
#[derive(Debug, Clone)]
pub struct EffectiveRadialPotential {
    pub pole_index: usize,
    pub nu: f64,
    /// nu^2 + (d^2 - 4d + 3)/4
    pub b_k: f64,
    /// sqrt((d/2-1)^2 + a + nu^2)
    pub sigma_k: f64,
    /// recorded sup of r^2 |W_k| over (0, l]
    pub c1: f64,
    pub dimension: usize,
    radial: RadialProfile,
    background: Background,
    cutoff: f64,
}

impl EffectiveRadialPotential {
    /// W_k(r) = V(r) + nu^2/r^2 + (d^2-4d+3)/(4 r^2).
    pub fn w(&self, r: f64) -> f64 {
        let mut v = self.background.eval_radial(r);
        if r <= self.cutoff {
            v += self.radial.eval(r);
        }
        v + self.b_k / (r * r)
    }

    /// The bare radial potential without the centrifugal terms.
    pub fn v_radial(&self, r: f64) -> f64 {
        let mut v = self.background.eval_radial(r);
        if r <= self.cutoff {
            v += self.radial.eval(r);
        }
        v
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }
}

/// Mode-k effective radial data near pole `pole_index`. `nu` is the sphere
/// eigenvalue for radial poles, or an eigenvalue of -d^2/dtheta^2 + b(theta)
/// for angular ones.
pub fn effective_radial(spec: &PotentialSpec, pole_index: usize, nu: f64) -> Result<EffectiveRadialPotential> {
    let pole = spec
        .poles
        .get(pole_index)
        .cloned()
        .unwrap_or_else(|| Pole {
            position: vec![0.0; spec.dimension],
            radial: RadialProfile::CustomTable { r: vec![], v: vec![] },
            angular: None,
            cutoff_radius: 1.0,
        });
    if pole.angular.is_some() {
        return Err(Error::Unsupported(
            "angular pole: pass eigenvalues of the angular operator instead of sphere harmonics".into(),
        ));
    }
    let d = spec.dimension as f64;
    let b_k = nu * nu + (d * d - 4.0 * d + 3.0) / 4.0;
    let half = d / 2.0 - 1.0;
    let floor = half * half + spec.hardy_constant + nu * nu;
    if floor < 0.0 {
        return Err(Error::Hypothesis(format!(
            "positivity floor (d/2-1)^2 + a + nu^2 = {floor} is negative"
        )));
    }
    let sigma_k = floor.sqrt();
    let cutoff = pole.cutoff_radius;
    let eff = EffectiveRadialPotential {
        pole_index,
        nu,
        b_k,
        sigma_k,
        c1: 0.0,
        dimension: spec.dimension,
        radial: pole.radial,
        background: spec.background.clone(),
        cutoff,
    };
    // record sup r^2 |W_k| on a log lattice over (0, l]
    let mut c1 = 0.0f64;
    let mut r = cutoff;
    while r > cutoff * 1e-6 {
        c1 = c1.max(r * r * eff.w(r).abs());
        r *= 0.9;
    }
    Ok(EffectiveRadialPotential { c1, ..eff })
}

/// One line of a hypothesis-validation report.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationEntry {
    pub hypothesis: String,
    pub pass: bool,
    pub worst_point: Option<Vec<f64>>,
    pub worst_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
    pub cutoff_radii: Vec<f64>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> Vec<&ValidationEntry> {
        self.entries.iter().filter(|e| !e.pass).collect()
    }
}

/// Check the structural hypotheses on a validation lattice: log radial
/// sampling from l down to l*1e-6 around each pole, `per_decade` points per
/// decade (at least 8), 64 angular samples in d = 2.
pub fn validate_hypotheses(spec: &PotentialSpec, per_decade: usize) -> ValidationReport {
    let per_decade = per_decade.max(8);
    let mut entries = Vec::new();

    // geometry / separation
    let geom = spec.check_geometry();
    entries.push(ValidationEntry {
        hypothesis: "pole separation and dimensions".into(),
        pass: geom.is_ok(),
        worst_point: None,
        worst_margin: 0.0,
    });

    // positivity floor a + (d/2-1)^2 > 0; vacuous without poles
    let floor = spec.positivity_floor();
    entries.push(ValidationEntry {
        hypothesis: "positivity floor a + (d/2-1)^2 > 0".into(),
        pass: spec.poles.is_empty() || floor > 0.0,
        worst_point: None,
        worst_margin: floor,
    });

    let n_theta = if spec.dimension == 2 { 64 } else { 16 };
    for (j, pole) in spec.poles.iter().enumerate() {
        // sample strictly inside (0, l): the bounds are open-ball statements
        // and the cutoff edge itself is a support boundary
        let l = pole.cutoff_radius * (1.0 - 1e-9);
        let decades = 6.0;
        let n_r = (decades * per_decade as f64).ceil() as usize;
        // margins normalized by the local bound scale C_V/r^2 (or C_V'/r^3)
        let mut worst_lower = f64::INFINITY;
        let mut worst_lower_pt = None;
        let mut worst_upper = f64::NEG_INFINITY;
        let mut worst_upper_pt = None;
        let mut worst_grad = f64::NEG_INFINITY;
        let mut worst_grad_pt = None;
        let cv = spec.bound_constant.max(1e-300);
        for ir in 0..=n_r {
            let r = l * 10f64.powf(-decades * ir as f64 / n_r as f64);
            for it in 0..n_theta {
                let theta = 2.0 * std::f64::consts::PI * it as f64 / n_theta as f64;
                let mut x = pole.position.clone();
                x[0] += r * theta.cos();
                if spec.dimension >= 2 {
                    x[1] += r * theta.sin();
                }
                let v = match spec.evaluate(&x) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                let lower_margin = (v - spec.hardy_constant / (r * r)) * r * r / cv;
                if lower_margin < worst_lower {
                    worst_lower = lower_margin;
                    worst_lower_pt = Some(x.clone());
                }
                let upper_margin = (v.abs() - spec.bound_constant / (r * r)) * r * r / cv;
                if upper_margin > worst_upper {
                    worst_upper = upper_margin;
                    worst_upper_pt = Some(x.clone());
                }
                if let Some(cg) = spec.gradient_constant {
                    // the bound concerns the open pole ball; keep the stencil
                    // clear of the support edge at l where profiles may jump
                    if r * 1.001 >= pole.cutoff_radius {
                        continue;
                    }
                    let step = r * 1e-4;
                    let mut grad2 = 0.0;
                    for axis in 0..spec.dimension {
                        let mut xp = x.clone();
                        let mut xm = x.clone();
                        xp[axis] += step;
                        xm[axis] -= step;
                        if let (Ok(vp), Ok(vm)) = (spec.evaluate(&xp), spec.evaluate(&xm)) {
                            let g = (vp - vm) / (2.0 * step);
                            grad2 += g * g;
                        }
                    }
                    let grad_margin = (grad2.sqrt() - cg / (r * r * r)) * r * r * r / cg.max(1e-300);
                    if grad_margin > worst_grad {
                        worst_grad = grad_margin;
                        worst_grad_pt = Some(x.clone());
                    }
                }
            }
        }
        entries.push(ValidationEntry {
            hypothesis: format!("pole {j}: lower bound V >= a/r^2"),
            pass: worst_lower >= -1e-9,
            worst_point: worst_lower_pt,
            worst_margin: worst_lower,
        });
        entries.push(ValidationEntry {
            hypothesis: format!("pole {j}: upper bound |V| <= C_V/r^2"),
            pass: worst_upper <= 1e-9,
            worst_point: worst_upper_pt,
            worst_margin: worst_upper,
        });
        if spec.gradient_constant.is_some() {
            entries.push(ValidationEntry {
                hypothesis: format!("pole {j}: gradient bound |grad V| <= C_V'/r^3"),
                pass: worst_grad <= 1e-6,
                worst_point: worst_grad_pt,
                worst_margin: worst_grad,
            });
        }
        if let Some(b) = &pole.angular {
            let neg = b.iter().cloned().fold(f64::INFINITY, f64::min);
            entries.push(ValidationEntry {
                hypothesis: format!("pole {j}: angular coefficient b >= 0"),
                pass: neg >= 0.0,
                worst_point: None,
                worst_margin: neg,
            });
        }
    }

    // background bounded on its declared support
    let rs = spec.background.support_radius();
    if rs > 0.0 {
        let mut worst = 0.0f64;
        for i in 0..=256 {
            let r = rs * i as f64 / 256.0;
            worst = worst.max(spec.background.eval_radial(r).abs());
        }
        entries.push(ValidationEntry {
            hypothesis: "background bounded with compact support".into(),
            pass: worst.is_finite(),
            worst_point: None,
            worst_margin: worst,
        });
    }

    ValidationReport {
        entries,
        cutoff_radii: spec.poles.iter().map(|p| p.cutoff_radius).collect(),
    }
}

/// Rayleigh quotient of the Hardy form for a radial trial field:
/// (int |u'|^2 r^{d-1} dr) / (int u^2 r^{d-3} dr).
///
/// The derivative term uses midpoint differencing so the discrete quotient
/// is the Rayleigh quotient of the discrete form.
pub fn hardy_quotient(d: usize, grid: &RadialGrid, u: &[f64]) -> Result<f64> {
    if d < 3 {
        return Err(Error::Parameter("hardy_quotient needs d >= 3".into()));
    }
    assert_eq!(grid.len(), u.len());
    if u.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroField);
    }
    let dm1 = (d - 1) as i32;
    let dm3 = d as i32 - 3;
    let mut num = 0.0;
    for i in 0..u.len() - 1 {
        let dr = grid.r[i + 1] - grid.r[i];
        let rm = 0.5 * (grid.r[i + 1] + grid.r[i]);
        let du = (u[i + 1] - u[i]) / dr;
        num += du * du * rm.powi(dm1) * dr;
    }
    let w = grid.trapezoid_weights();
    let mut den = 0.0;
    for i in 0..u.len() {
        den += u[i] * u[i] * grid.r[i].powi(dm3) * w[i];
    }
    if den == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn zero_potential_evaluates_to_zero() {
        let spec = PotentialSpec::free(2);
        assert_eq!(spec.evaluate(&[0.3, -0.7]).unwrap(), 0.0);
    }

    #[test]
    fn single_pole_inverse_square_value() {
        // a = 1, |x| = 0.5 <= l -> 4.0
        let spec = PotentialSpec::single_inverse_square(2, 1.0, 1.0);
        let v = spec.evaluate(&[0.5, 0.0]).unwrap();
        assert!(close(v, 4.0, 1e-14));
    }

    #[test]
    fn evaluation_at_pole_is_a_domain_error() {
        let spec = PotentialSpec::single_inverse_square(2, 1.0, 1.0);
        match spec.evaluate(&[0.0, 0.0]) {
            Err(Error::AtPole { pole_index: 0, .. }) => {}
            other => panic!("expected AtPole, got {other:?}"),
        }
    }

    #[test]
    fn two_pole_sum_matches_independent_summation() {
        let mut spec = PotentialSpec::single_inverse_square(2, 1.0, 0.4);
        spec.poles[0].position = vec![-1.5, 0.0];
        spec.poles.push(Pole {
            position: vec![1.5, 0.0],
            radial: RadialProfile::InverseSquare { a: 2.0 },
            angular: None,
            cutoff_radius: 0.4,
        });
        spec.background = Background::Bump { amplitude: 0.3, support: 3.0 };
        spec.check_geometry().unwrap();
        let mut rng = crate::rng::CounterRng::new(4, 0);
        for _ in 0..20 {
            let x = [rng.range(-2.5, 2.5), rng.range(-2.5, 2.5)];
            let v = match spec.evaluate(&x) {
                Ok(v) => v,
                Err(_) => continue,
            };
            // independent summation of all terms
            let mut want = spec.background.eval(&x);
            for p in &spec.poles {
                let dx = [x[0] - p.position[0], x[1] - p.position[1]];
                let r = (dx[0] * dx[0] + dx[1] * dx[1]).sqrt();
                if r <= p.cutoff_radius {
                    want += p.radial.eval(r);
                }
            }
            assert!(close(v, want, 1e-13));
        }
    }

    #[test]
    fn pole_relabeling_is_order_invariant() {
        let mut spec = PotentialSpec::single_inverse_square(2, 1.0, 0.4);
        spec.poles[0].position = vec![-1.5, 0.0];
        spec.poles.push(Pole {
            position: vec![1.5, 0.0],
            radial: RadialProfile::InverseSquare { a: 3.0 },
            angular: None,
            cutoff_radius: 0.4,
        });
        let mut swapped = spec.clone();
        swapped.poles.reverse();
        let x = [-1.3, 0.05];
        let v1 = spec.evaluate(&x).unwrap();
        let v2 = swapped.evaluate(&x).unwrap();
        assert!((v1 - v2).abs() <= 1e-15 * v1.abs().max(1.0));
    }

    #[test]
    fn validate_free_potential_passes() {
        let spec = PotentialSpec::free(3);
        let report = validate_hypotheses(&spec, 16);
        assert!(report.all_pass(), "{:?}", report.failures());
    }

    #[test]
    fn floor_violation_is_flagged() {
        // a = -(d/2-1)^2 sits exactly on the floor
        let d = 3;
        let mut spec = PotentialSpec::single_inverse_square(d, -0.25, 0.5);
        spec.hardy_constant = -0.25;
        let report = validate_hypotheses(&spec, 8);
        let floor_entry = report
            .entries
            .iter()
            .find(|e| e.hypothesis.contains("positivity floor"))
            .unwrap();
        assert!(!floor_entry.pass);
    }

    #[test]
    fn log_squared_profile_fails_upper_bound() {
        let mut spec = PotentialSpec::single_inverse_square(2, 0.5, 0.5);
        spec.poles[0].radial = RadialProfile::LogSquaredCounterexample { a: 0.5 };
        spec.bound_constant = 10.0;
        spec.gradient_constant = None;
        let report = validate_hypotheses(&spec, 16);
        let upper = report
            .entries
            .iter()
            .find(|e| e.hypothesis.contains("upper bound"))
            .unwrap();
        assert!(!upper.pass);
        // locate the crossing radius by bisection: a ln^2 r = C_V
        let a = 0.5;
        let cv = 10.0;
        let mut lo = 1e-12f64;
        let mut hi = 0.5f64;
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if a * mid.ln().powi(2) > cv {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r_cross = (lo * hi).sqrt();
        // the worst sampled point must lie at or below the crossing radius
        let pt = upper.worst_point.as_ref().unwrap();
        let r_worst = (pt[0] * pt[0] + pt[1] * pt[1]).sqrt();
        assert!(
            r_worst <= r_cross * 1.1,
            "worst radius {r_worst:.3e} vs crossing {r_cross:.3e}"
        );
    }

    #[test]
    fn effective_radial_paper_constants() {
        // d = 2, a = 0, nu = 3 -> sigma = 3, b = 8.75
        let spec = PotentialSpec::single_inverse_square(2, 0.0, 1.0);
        let eff = effective_radial(&spec, 0, 3.0).unwrap();
        assert!(close(eff.sigma_k, 3.0, 1e-14));
        assert!(close(eff.b_k, 8.75, 1e-14));
        // d = 3, a = 0, nu = 0 -> sigma = 1/2, b = 0
        let spec = PotentialSpec::single_inverse_square(3, 0.0, 1.0);
        let eff = effective_radial(&spec, 0, 0.0).unwrap();
        assert!(close(eff.sigma_k, 0.5, 1e-14));
        assert!(eff.b_k.abs() < 1e-14);
    }

    #[test]
    fn effective_radial_w_value() {
        // d = 2, profile 1/r^2, nu = 0: W_0(2) = 1/4 + 0 - 1/16 = 0.1875
        // (pole cutoff extended past r = 2 so the profile is active there)
        let spec = PotentialSpec::single_inverse_square(2, 1.0, 3.0);
        let eff = effective_radial(&spec, 0, 0.0).unwrap();
        let direct = 1.0 / 4.0 + 0.0 + (4.0 - 8.0 + 3.0) / (4.0 * 4.0);
        assert!(close(eff.w(2.0), direct, 1e-14));
        assert!(close(eff.w(2.0), 0.1875, 1e-14));
    }

    #[test]
    fn sigma_b_identity_and_monotonicity() {
        let spec = PotentialSpec::single_inverse_square(2, 0.7, 1.0);
        let half = 0.0f64; // (d/2 - 1)^2 at d = 2
        let mut prev_b = f64::NEG_INFINITY;
        for nu in [0.0, 1.0, 2.0, 3.5, 10.0] {
            let eff = effective_radial(&spec, 0, nu).unwrap();
            // sigma^2 - nu^2 = (d/2-1)^2 + a exactly
            assert!(close(eff.sigma_k * eff.sigma_k - nu * nu, half + 0.7, 1e-12));
            assert!(eff.b_k > prev_b);
            prev_b = eff.b_k;
        }
    }

    #[test]
    fn hardy_quotient_reference_and_trial() {
        // d = 3: the sharp constant is (3/2 - 1)^2 = 1/4
        let d = 3usize;
        let half = d as f64 / 2.0 - 1.0;
        assert!(close(half * half, 0.25, 1e-15));

        let grid = RadialGrid::log_uniform(1e-8, 1.0, 8.0, 256, 1e-3).unwrap();
        let u: Vec<f64> = grid.r.iter().map(|&r| r * (-r * r).exp()).collect();
        let q = hardy_quotient(d, &grid, &u).unwrap();
        assert!(q >= 0.25 - 1e-6, "quotient {q}");
    }

    #[test]
    fn hardy_minimizing_sequence_descends_to_quarter() {
        // u = r^{delta - 1/2} capped by phi = min(1, r^{-2 delta}): the exact
        // quotient of the continuum family is 1/4 + delta^2
        let d = 3usize;
        let grid = RadialGrid::log_uniform(1e-10, 1e10, 1e10, 200, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for delta in [0.3, 0.2, 0.1] {
            let u: Vec<f64> = grid
                .r
                .iter()
                .map(|&r| {
                    if r <= 1.0 {
                        r.powf(delta - 0.5)
                    } else {
                        r.powf(-delta - 0.5)
                    }
                })
                .collect();
            let q = hardy_quotient(d, &grid, &u).unwrap();
            assert!(q >= 0.25 - 1e-4, "delta={delta}: {q}");
            assert!(
                (q - (0.25 + delta * delta)).abs() < 0.02,
                "delta={delta}: {q} vs {}",
                0.25 + delta * delta
            );
            assert!(q < prev, "not descending at delta={delta}: {q} vs {prev}");
            prev = q;
        }
        assert!(prev <= 0.25 * 1.05, "finest quotient {prev} not within 5% of 1/4");
    }

    #[test]
    fn hardy_zero_field_is_an_error() {
        let grid = RadialGrid::uniform(1.0, 0.01).unwrap();
        let u = vec![0.0; grid.len()];
        assert!(matches!(hardy_quotient(3, &grid, &u), Err(Error::ZeroField)));
    }
}
