//! Interactive browser frontend: three operations exposed to a static page.
//!
//! Everything here routes through the spherical-harmonic mode path, which is
//! cheap enough for live sliders (tridiagonal solves only).

use mpolar::experiments::diagnostic_forcing;
use mpolar::operator::{CutoffBump, ResolventSign, SemiclassicalParams};
use mpolar::potential::PotentialSpec;
use mpolar::quasimode::radial_quasimode;
use mpolar::resolvent::{frequency_sweep, EpsPolicy, GeometryPolicy, SweepMethod};
use wasm_bindgen::prelude::wasm_bindgen;

fn demo_geometry() -> GeometryPolicy {
    GeometryPolicy::new(1.4, CutoffBump::new(1.0, 1.3).unwrap())
}

fn demo_spec(a: f64) -> PotentialSpec {
    if a == 0.0 {
        PotentialSpec::free(2)
    } else {
        PotentialSpec::single_inverse_square(2, a, 0.3)
    }
}

/// Frequency sweep of ||chi R chi|| for a single inverse-square pole of
/// strength `a` (a = 0 gives the free Laplacian). Returns JSON:
/// `{"records":[[lambda, norm, norm_sqrt_lambda], ...], "fit_c":..,
///   "fit_p":.., "c_emp":..}`.
#[wasm_bindgen]
pub fn sweep_json(a: f64, lambda_min: f64, lambda_max: f64, count: usize) -> String {
    let run = || -> mpolar::Result<String> {
        let spec = demo_spec(a);
        let n = count.clamp(4, 12);
        let ratio = (lambda_max / lambda_min).powf(1.0 / (n - 1) as f64);
        let lambdas: Vec<f64> = (0..n).map(|i| lambda_min * ratio.powi(i as i32)).collect();
        let sweep = frequency_sweep(
            &spec,
            &lambdas,
            EpsPolicy::default(),
            &demo_geometry(),
            SweepMethod::RadialModes,
            ResolventSign::Minus,
        )?;
        let records: Vec<[f64; 3]> = sweep
            .records
            .iter()
            .map(|r| [r.lambda, r.norm, r.norm_sqrt_lambda])
            .collect();
        let (fit_c, fit_p, r2) = sweep
            .fit
            .as_ref()
            .map(|f| (f.c, f.p, f.r_squared))
            .unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        Ok(serde_json::json!({
            "records": records,
            "fit_c": fit_c,
            "fit_p": fit_p,
            "r_squared": r2,
            "c_emp": sweep.c_emp,
        })
        .to_string())
    };
    run().unwrap_or_else(|e| serde_json::json!({ "error": e.to_string() }).to_string())
}

/// Quasimode intensity |u|^2 of the pole configuration on an n x n grid over
/// [-extent, extent]^2, plus per-mode norms. Returns JSON with a flat
/// row-major `field` array scaled to [0, 1].
#[wasm_bindgen]
pub fn quasimode_json(a: f64, lambda: f64, seed: u32, n: usize) -> String {
    let run = || -> mpolar::Result<String> {
        let spec = demo_spec(a);
        let params = SemiclassicalParams::new(lambda, 1e-6 * lambda, ResolventSign::Minus)?;
        let geom = demo_geometry();
        let forcing = diagnostic_forcing(params.h, seed as u64);
        let qm = radial_quasimode(&spec, &params, &geom, &forcing)?;
        let n = n.clamp(64, 512);
        let extent = 1.3;
        let mut pts = Vec::with_capacity(n * n);
        for i in 0..n {
            let y = extent - 2.0 * extent * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let x = -extent + 2.0 * extent * j as f64 / (n - 1) as f64;
                pts.push((x, y));
            }
        }
        let values = qm.eval_points(&pts);
        let mut field: Vec<f64> = values.iter().map(|z| z.norm_sqr()).collect();
        let peak = field.iter().cloned().fold(0.0, f64::max).max(1e-300);
        for v in &mut field {
            *v = (*v / peak).sqrt(); // sqrt for visual dynamic range
        }
        let mode_norms: Vec<f64> = qm
            .coefficients
            .iter()
            .map(|ck| {
                let dr = qm.r[1] - qm.r[0];
                ck.iter()
                    .zip(&qm.r)
                    .map(|(v, &rv)| v.norm_sqr() * rv * dr)
                    .sum::<f64>()
            })
            .collect();
        Ok(serde_json::json!({
            "n": n,
            "extent": extent,
            "h": params.h,
            "field": field,
            "band": qm.band,
            "mode_norms": mode_norms,
            "forcing_norm": qm.forcing_norm,
            "residual": qm.residual,
        })
        .to_string())
    };
    run().unwrap_or_else(|e| serde_json::json!({ "error": e.to_string() }).to_string())
}

/// Asymptotic solution pair of y'' = (q1 + i q2) y with q1 = b/r^2,
/// q2 = c2/r^2. Returns log-log samples and the fitted exponents against
/// the predicted 1/2 +- sqrt(b + 1/4).
#[wasm_bindgen]
pub fn radial_basis_json(b: f64, c2: f64) -> String {
    use mpolar::grid::RadialGrid;
    use mpolar::radial::{build_basis, OdeCoefficients};
    use std::sync::Arc;
    let run = || -> mpolar::Result<String> {
        let b = b.max(-0.2499);
        let coeffs = OdeCoefficients::new(
            Arc::new(move |r: f64| b / (r * r)),
            Arc::new(move |r: f64| c2 / (r * r)),
            b,
            b.abs().max(c2.abs()).max(0.5),
        )?;
        let grid = RadialGrid::log_uniform(1e-6, 1.0, 1.0, 96, 1.0)?;
        let basis = build_basis(&coeffs, &grid)?;
        let pts: Vec<[f64; 3]> = basis
            .r
            .iter()
            .enumerate()
            .step_by(4)
            .map(|(i, &r)| [r, basis.y_plus[i].norm(), basis.y_minus[i].norm()])
            .collect();
        let sqrt_big_b = (b + 0.25).max(0.0).sqrt();
        Ok(serde_json::json!({
            "points": pts,
            "fitted_plus": basis.fitted_exponent_plus,
            "fitted_minus": basis.fitted_exponent_minus,
            "predicted_plus": 0.5 + sqrt_big_b,
            "predicted_minus": 0.5 - sqrt_big_b,
            "wronskian_drift": basis.wronskian_drift_per_decade,
        })
        .to_string())
    };
    run().unwrap_or_else(|e| serde_json::json!({ "error": e.to_string() }).to_string())
}
