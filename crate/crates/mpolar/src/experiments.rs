//! Canonical experiment setups: the free/unipolar/two-pole scaling runs, the
//! trapping control, and the phase-space diagnostics evaluated on quasimode
//! families. Both the CLI driver and the acceptance suite go through these.

use crate::error::Result;
use crate::husimi::{husimi, lattice_centers, CartesianField, HusimiOptions, PhaseSpaceDensity};
use crate::operator::{CutoffBump, ResolventSign, SemiclassicalParams};
use crate::potential::{Background, PotentialSpec};
use crate::quasimode::{radial_quasimode, ForcingSpec, Quasimode};
use crate::resolvent::GeometryPolicy;
use serde::Serialize;

/// Geometry used by the single-pole (and free) desk-scale experiments.
pub fn unipolar_geometry() -> GeometryPolicy {
    GeometryPolicy::new(1.4, CutoffBump::new(1.0, 1.3).unwrap())
}

/// Geometry for the free-resolvent benchmark: radial box of half-width 6.
pub fn free_geometry() -> GeometryPolicy {
    GeometryPolicy::new(6.0, CutoffBump::new(0.8, 1.2).unwrap())
}

/// Single inverse-square pole at the origin, cutoff 0.3.
pub fn unipolar_spec(a: f64) -> PotentialSpec {
    PotentialSpec::single_inverse_square(2, a, 0.3)
}

/// The pinned two-pole configuration: poles at (±1.5, 0), a = 1.
pub fn two_pole_spec() -> PotentialSpec {
    use crate::potential::{Pole, RadialProfile};
    PotentialSpec {
        dimension: 2,
        poles: vec![
            Pole {
                position: vec![-1.5, 0.0],
                radial: RadialProfile::InverseSquare { a: 1.0 },
                angular: None,
                cutoff_radius: 0.25,
            },
            Pole {
                position: vec![1.5, 0.0],
                radial: RadialProfile::InverseSquare { a: 1.0 },
                angular: None,
                cutoff_radius: 0.25,
            },
        ],
        background: Background::Zero,
        hardy_constant: 1.0,
        bound_constant: 1.0,
        gradient_constant: Some(2.0),
    }
}

pub fn two_pole_geometry() -> GeometryPolicy {
    GeometryPolicy::new(2.05, CutoffBump::new(1.85, 2.0).unwrap())
}

/// Two-pole variant with fat pole balls (l = 1.0) for the near-pole
/// phase-space diagnostics: ray cones on a ring r0 in (l/2, l) need the ring
/// to sit several packet widths clear of the pole core. The cutoff is a
/// small bump around the midpoint source; the domain still contains both
/// pole balls.
pub fn two_pole_diag_spec() -> PotentialSpec {
    let mut spec = two_pole_spec();
    for p in &mut spec.poles {
        p.cutoff_radius = 1.6;
        let s = p.position[0].signum();
        p.position = vec![s * 2.3, 0.0];
    }
    spec
}

pub fn two_pole_diag_geometry() -> GeometryPolicy {
    let mut g = GeometryPolicy::new(4.25, CutoffBump::new(1.0, 1.2).unwrap());
    g.layer_wavelengths = 1.5;
    g
}

/// Per-ring angular mode coefficients of a 2D quasimode around `pole`:
/// c_k(r) for k = -kmax..=kmax in the e^{i k theta}/sqrt(2 pi) convention,
/// plus the energy fraction beyond the band (interpolation noise and true
/// high-frequency content).
#[cfg(feature = "cartesian")]
pub fn ring_mode_coefficients(
    qm: &crate::quasimode::CartesianQuasimode,
    pole: (f64, f64),
    r: &[f64],
    kmax: usize,
) -> (Vec<Vec<crate::linalg::C64>>, f64) {
    use crate::linalg::C64;
    let n_theta = (8 * kmax).next_power_of_two().max(256);
    let two_pi = 2.0 * std::f64::consts::PI;
    let norm = 1.0 / two_pi.sqrt();
    let mut coeffs = vec![vec![C64::ZERO; r.len()]; 2 * kmax + 1];
    let mut total = 0.0f64;
    let mut captured = 0.0f64;
    let mut ring = vec![C64::ZERO; n_theta];
    for (ir, &rad) in r.iter().enumerate() {
        for (it, slot) in ring.iter_mut().enumerate() {
            let th = two_pi * it as f64 / n_theta as f64;
            *slot = qm.eval(pole.0 + rad * th.cos(), pole.1 + rad * th.sin());
        }
        let ring_energy: f64 = ring.iter().map(|z| z.norm_sqr()).sum::<f64>() / n_theta as f64;
        total += ring_energy * rad;
        let mut spectrum = ring.clone();
        crate::linalg::fft::fft(&mut spectrum);
        for k in -(kmax as i64)..=(kmax as i64) {
            let bin = ((k + n_theta as i64) % n_theta as i64) as usize;
            // c_k = (1/ntheta) sum u e^{-i k theta} * sqrt(2 pi)
            let ck = spectrum[bin] / n_theta as f64 * two_pi.sqrt();
            coeffs[(k + kmax as i64) as usize][ir] = ck;
            captured += (ck * norm).norm_sqr() * rad;
        }
    }
    let tail = if total > 0.0 { (total - captured).max(0.0) / total } else { 0.0 };
    (coeffs, tail)
}

/// Radial barrier-well control: V = -50 on [1, 2], +50 on (2, 2.5].
pub fn trapping_spec() -> PotentialSpec {
    PotentialSpec {
        dimension: 2,
        poles: vec![],
        background: Background::RadialSteps {
            radii: vec![1.0, 2.0, 2.5],
            levels: vec![0.0, -50.0, 50.0],
        },
        hardy_constant: 0.0,
        bound_constant: 50.0,
        gradient_constant: None,
    }
}

pub fn trapping_geometry() -> GeometryPolicy {
    GeometryPolicy::new(3.5, CutoffBump::new(2.8, 3.2).unwrap())
}

/// Roomier geometry for the phase-space diagnostics: at h = 1/20 the
/// coherent packets are ~0.22 wide, so the source ring, the diagnostic
/// annulus and the pole region each need several packet widths of
/// separation.
pub fn diagnostic_geometry() -> GeometryPolicy {
    GeometryPolicy::new(2.8, CutoffBump::new(2.0, 2.6).unwrap())
}

/// Forcing used by the quasimode diagnostics: an incoming ring source well
/// outside the diagnostic annulus. The angular band scales like 1/h so the
/// family carries a fixed aperture of impact parameters (|b| <= 0.55).
pub fn diagnostic_forcing(h: f64, seed: u64) -> ForcingSpec {
    ForcingSpec {
        r_center: 1.7,
        r_width: 0.25,
        theta0: 0.0,
        band: (0.55 / h).round() as usize,
        incoming: true,
        seed,
    }
}

/// Annulus between the pole region and the source ring where the
/// phase-space diagnostics are evaluated.
pub const DIAGNOSTIC_ANNULUS: (f64, f64) = (0.6, 1.24);

/// Quasimode of the canonical unipolar configuration at the given frequency.
pub fn diagnostic_quasimode(a: f64, lambda: f64, seed: u64) -> Result<Quasimode> {
    let spec = unipolar_spec(a);
    let params = SemiclassicalParams::new(lambda, 1e-6 * lambda, ResolventSign::Minus)?;
    let geom = diagnostic_geometry();
    radial_quasimode(&spec, &params, &geom, &diagnostic_forcing(params.h, seed))
}

/// Evaluate a mode-sum quasimode on a Cartesian patch covering the annulus
/// [r_lo - margin, r_hi + margin].
pub fn quasimode_patch(qm: &Quasimode, r_hi: f64, margin: f64, dx: f64) -> CartesianField {
    let half = r_hi + margin;
    let n = (2.0 * half / dx).ceil() as usize;
    let mut pts = Vec::with_capacity(n * n);
    for i in 0..n {
        let x = -half + i as f64 * dx;
        for j in 0..n {
            let y = -half + j as f64 * dx;
            pts.push((x, y));
        }
    }
    let values = qm.eval_points(&pts);
    CartesianField { x0: -half, y0: -half, dx, nx: n, ny: n, values }
}

#[derive(Debug, Clone, Serialize)]
pub struct ShellReport {
    pub lambda: f64,
    pub fraction: f64,
    pub delta: f64,
    pub mass: f64,
    pub annulus: (f64, f64),
}

/// Husimi shell-localization of a quasimode over an annulus away from the
/// pole.
pub fn shell_diagnostic(qm: &Quasimode, annulus: (f64, f64), delta_factor: f64) -> Result<ShellReport> {
    let h = qm.params.h;
    let dx = qm.r[1] - qm.r[0];
    let field = quasimode_patch(qm, annulus.1, 5.0 * h.sqrt(), dx);
    let (centers, area) = lattice_centers(
        h,
        0.75,
        (-annulus.1, annulus.1),
        (-annulus.1, annulus.1),
        |x, y| {
            let r = (x * x + y * y).sqrt();
            (annulus.0..=annulus.1).contains(&r)
        },
    );
    let density = husimi(&field, h, &centers, area, HusimiOptions::default())?;
    let delta = delta_factor * h.sqrt();
    let fraction = crate::husimi::shell_fraction(&density, delta);
    Ok(ShellReport {
        lambda: qm.params.lambda,
        fraction,
        delta,
        mass: density.mass,
        annulus,
    })
}

/// Mass-consistency check: windowed field, centers covering all of phase
/// space that carries mass.
pub fn mass_consistency(qm: &Quasimode, annulus: (f64, f64)) -> Result<(f64, f64)> {
    let h = qm.params.h;
    let dx = qm.r[1] - qm.r[0];
    let ramp = 0.1;
    let window = move |r: f64| -> f64 {
        if r < annulus.0 || r > annulus.1 {
            0.0
        } else if r < annulus.0 + ramp {
            let t = (r - annulus.0) / ramp;
            t * t * (3.0 - 2.0 * t)
        } else if r > annulus.1 - ramp {
            let t = (annulus.1 - r) / ramp;
            t * t * (3.0 - 2.0 * t)
        } else {
            1.0
        }
    };
    let mut field = quasimode_patch(qm, annulus.1, 6.0 * h.sqrt(), dx);
    let half = annulus.1 + 6.0 * h.sqrt();
    for i in 0..field.nx {
        let x = field.x0 + i as f64 * dx;
        for j in 0..field.ny {
            let y = field.y0 + j as f64 * dx;
            let r = (x * x + y * y).sqrt();
            let w = window(r);
            field.values[i * field.ny + j] *= w;
        }
    }
    let (centers, area) = lattice_centers(h, 0.7, (-half, half), (-half, half), |_, _| true);
    let density = husimi(&field, h, &centers, area, HusimiOptions::default())?;
    Ok((density.mass, density.field_norm_sq))
}

/// Transport residual of a quasimode for the canonical annulus symbol.
pub fn transport_diagnostic(qm: &Quasimode, annulus: (f64, f64)) -> Result<f64> {
    let h = qm.params.h;
    let dx = qm.r[1] - qm.r[0];
    let field = quasimode_patch(qm, annulus.1, 5.0 * h.sqrt(), dx);
    let (centers, area) = lattice_centers(
        h,
        0.75,
        (-annulus.1, annulus.1),
        (-annulus.1, annulus.1),
        |x, y| {
            let r = (x * x + y * y).sqrt();
            (annulus.0..=annulus.1).contains(&r)
        },
    );
    let density = husimi(&field, h, &centers, area, HusimiOptions::default())?;
    let (lo, hi) = annulus;
    let width = hi - lo;
    let bump = move |r: f64| -> (f64, f64) {
        if !(lo..=hi).contains(&r) {
            return (0.0, 0.0);
        }
        let t = (r - lo) / width;
        let s = (std::f64::consts::PI * t).sin();
        let ds = std::f64::consts::PI / width * (std::f64::consts::PI * t).cos();
        (s * s, 2.0 * s * ds)
    };
    crate::husimi::transport_residual(
        &density,
        move |x, y, xa, xb| {
            let r = (x * x + y * y).sqrt().max(1e-12);
            let (_, dbump) = bump(r);
            let taper = (-2.0 * (xa * xa + xb * xb - 1.0).powi(2)).exp();
            (dbump * x / r * taper, dbump * y / r * taper)
        },
        &[(0.0, 0.0)],
        lo * 0.9,
    )
}

/// Husimi density of a two-pole quasimode on a ring around one pole.
#[cfg(feature = "cartesian")]
pub fn two_pole_ring_density(
    qm: &crate::quasimode::CartesianQuasimode,
    pole: (f64, f64),
    r0: f64,
    band: f64,
) -> Result<PhaseSpaceDensity> {
    let h = qm.params.h;
    let reach = band + 5.0 * h.sqrt();
    let dx = qm.grid.dx;
    let half = r0 + reach;
    let n = (2.0 * half / dx).ceil() as usize;
    let field = CartesianField::from_fn(pole.0 - half, pole.1 - half, dx, n, n, |x, y| {
        qm.eval(x, y)
    });
    // pole-centered symmetric lattice keeps the y-mirror symmetry of the
    // configuration exact in the sampled masses
    let a = 0.75 * h.sqrt();
    let m = ((r0 + band) / a).ceil() as i64;
    let mut centers = Vec::new();
    for i in -m..=m {
        for j in -m..=m {
            let (x, y) = (pole.0 + i as f64 * a, pole.1 + j as f64 * a);
            let r = ((x - pole.0).powi(2) + (y - pole.1).powi(2)).sqrt();
            if (r0 - band..=r0 + band).contains(&r) {
                centers.push((x, y));
            }
        }
    }
    husimi(&field, h, &centers, a * a, HusimiOptions::default())
}
