// scratch calibration runs; not part of the deliverable surface
use mpolar::experiments::*;
use mpolar::operator::{ResolventSign, SemiclassicalParams};
use mpolar::resolvent::*;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();
    match which.as_str() {
        "cross" => cross_check(),
        "trap" => trapping(),
        "polemass" => pole_mass_trend(),
        "transport" => transport_trend(),
        "twopole" => two_pole_sweep(),
        "flux" => two_pole_flux(),
        "shell" => shell_1600(),
        "weighted" => weighted_trend(),
        "raydir" => ray_direction_probe(),
        _ => println!("subcommands: cross trap polemass transport twopole flux shell"),
    }
}

fn cross_check() {
    let spec = unipolar_spec(1.0);
    let geom = unipolar_geometry();
    let params = SemiclassicalParams::new(400.0, 400.0 * 1e-6, ResolventSign::Minus).unwrap();
    let t0 = std::time::Instant::now();
    let modes = unipolar_mode_norm(&spec, &params, &geom, None).unwrap();
    println!("mode-sup norm {} (attained nu {}, tail bound {:.3e}) in {:?}",
        modes.norm, modes.attained_nu, modes.tail_bound, t0.elapsed());
    let t0 = std::time::Instant::now();
    let cart = cartesian_norm(&spec, &params, &geom, true).unwrap();
    println!("cartesian sector norm {} ({} iters, residual {:.2e}) in {:?}",
        cart.norm, cart.iters, cart.residual, t0.elapsed());
    println!("relative difference {:.4}", (modes.norm - cart.norm).abs() / cart.norm);
}

fn trapping() {
    let spec = trapping_spec();
    let geom = trapping_geometry();
    let t0 = std::time::Instant::now();
    let scan = trapping_peak_scan(&spec, 6.0, 45.0, 0.05, EpsPolicy::default(), &geom).unwrap();
    println!("peak at lambda {} value {} in {:?}", scan.peak_lambda, scan.peak_value, t0.elapsed());
    let top: Vec<_> = scan
        .coarse
        .iter()
        .filter(|(_, v)| *v > scan.peak_value / 20.0)
        .collect();
    println!("coarse points above 5% of peak: {:?}", &top[..top.len().min(12)]);
}

fn pole_mass_trend() {
    for (h_inv, lambda) in [(20.0, 400.0), (40.0, 1600.0), (80.0, 6400.0)] {
        let t0 = std::time::Instant::now();
        let qm = diagnostic_quasimode(1.0, lambda, 33).unwrap();
        let (small, large, total) = qm.pole_ball_mass(0.15, 4.0);
        println!(
            "h=1/{h_inv}: pole ball rho=0.15: small {small:.5e} large {large:.5e} total {total:.5e}  f_norm {:.3} ({:?})",
            qm.forcing_norm,
            t0.elapsed()
        );
        for rho_div in [4.0, 8.0, 16.0] {
            let (s, _, t) = qm.pole_ball_mass(0.3 / rho_div, 4.0);
            println!("   rho=l/{rho_div}: small {s:.4e} total {t:.4e}");
        }
    }
}

fn transport_trend() {
    for lambda in [400.0, 1600.0, 6400.0] {
        let t0 = std::time::Instant::now();
        let qm = diagnostic_quasimode(1.0, lambda, 33).unwrap();
        let resid = transport_diagnostic(&qm, DIAGNOSTIC_ANNULUS).unwrap();
        println!("lambda {lambda}: transport residual {resid:.5e} ({:?})", t0.elapsed());
    }
}

fn two_pole_sweep() {
    let spec = two_pole_spec();
    let geom = two_pole_geometry();
    for lambda in [32.0, 64.0, 128.0, 256.0] {
        let t0 = std::time::Instant::now();
        let params = SemiclassicalParams::new(lambda, lambda * 1e-6, ResolventSign::Minus).unwrap();
        let out = cartesian_norm(&spec, &params, &geom, true).unwrap();
        println!(
            "lambda {lambda}: N {:.6e} N*sqrt {:.6e} iters {} residual {:.2e} ({:?})",
            out.norm,
            out.norm * lambda.sqrt(),
            out.iters,
            out.residual,
            t0.elapsed()
        );
    }
}

fn two_pole_flux() {
    use mpolar::husimi::flux_ledger;
    use mpolar::quasimode::symmetric_cartesian_quasimode;
    let spec = two_pole_diag_spec();
    let geom = two_pole_diag_geometry();
    let lambda = 256.0;
    let params = SemiclassicalParams::new(lambda, lambda * 1e-6, ResolventSign::Minus).unwrap();
    let t0 = std::time::Instant::now();
    let qm = symmetric_cartesian_quasimode(&spec, &params, &geom, 0.45, 6, true, 19).unwrap();
    println!("two-pole quasimode built in {:?}, residual {:.2e}, f_norm {:.4}", t0.elapsed(), qm.residual, qm.forcing_norm);
    let t0 = std::time::Instant::now();
    let density = two_pole_ring_density(&qm, (2.3, 0.0), 1.0, 0.15).unwrap();
    println!("ring density: {} centers, mass {:.4e} ({:?})", density.centers.len(), density.mass, t0.elapsed());
    let dirs: Vec<(f64, f64)> = (0..8)
        .map(|k| {
            let th = std::f64::consts::PI / 4.0 * k as f64;
            (th.cos(), th.sin())
        })
        .collect();
    let ledger = flux_ledger(&density, (2.3, 0.0), 1.0, 0.15, 22.4f64.to_radians(), &dirs).unwrap();
    println!(
        "ledger: out {:?} in {:?} Lambda {:.4e} defect {:.4} |Z| {:.4}",
        ledger.outgoing,
        ledger.incoming,
        ledger.lambda_total,
        ledger.balance_defect,
        (ledger.z_vector.0.powi(2) + ledger.z_vector.1.powi(2)).sqrt()
    );
    // weighted bound pieces from ring-mode coefficients around pole 1
    let t0 = std::time::Instant::now();
    let r: Vec<f64> = (1..=320).map(|i| 1.6 * i as f64 / 320.0).collect();
    let kmax = (1.4 * 1.6 / params.h) as usize;
    let (coeffs, tail) = ring_mode_coefficients(&qm, (2.3, 0.0), &r, kmax);
    let nu_tilde: f64 = 4.0;
    let mut large_coeffs = Vec::new();
    for (i, cvec) in coeffs.iter().enumerate() {
        let k = i as i64 - kmax as i64;
        if (k.unsigned_abs() as f64) > nu_tilde {
            large_coeffs.push(cvec.clone());
        }
    }
    let w_cube = mpolar::radial::weighted_norm_modes(
        &r,
        &large_coeffs,
        mpolar::radial::RadialWeight::SemiclassicalCube { h: params.h },
    )
    .unwrap();
    let c_d = -0.25;
    let cvp = 2.0;
    let lhs = (c_d + nu_tilde * nu_tilde - cvp / 2.0) * w_cube;
    println!(
        "kmax {kmax} tail {tail:.2e}; weighted cube {w_cube:.5e}; lemma LHS {lhs:.5e} vs 2 Lambda {:.5e} ({:?})",
        2.0 * ledger.lambda_total,
        t0.elapsed()
    );
}

fn shell_1600() {
    let t0 = std::time::Instant::now();
    let qm = diagnostic_quasimode(1.0, 1600.0, 33).unwrap();
    let report = shell_diagnostic(&qm, DIAGNOSTIC_ANNULUS, 4.0).unwrap();
    println!("lambda 1600 shell fraction {:.4} mass {:.4e} ({:?})", report.fraction, report.mass, t0.elapsed());
    let (m, f) = mass_consistency(&qm, (0.35, 0.6)).unwrap();
    println!("mass consistency: {m:.5e} vs {f:.5e} ({:.3}%)", 100.0 * (m - f).abs() / f);
}

fn weighted_trend() {
    for nu_tilde in [4.0, 8.0] {
        for seed in [5u64, 11, 33] {
            let mut vals = Vec::new();
            for lambda in [400.0, 1600.0] {
                let qm = diagnostic_quasimode(1.0, lambda, seed).unwrap();
                let large = qm.large_part_coefficients(nu_tilde);
                let w = mpolar::radial::weighted_norm_modes(
                    &qm.r,
                    &large,
                    mpolar::radial::RadialWeight::Power { t: 0.5 },
                )
                .unwrap();
                vals.push(w);
            }
            println!(
                "nu_tilde {nu_tilde} seed {seed}: w400 {:.4e} w1600 {:.4e} ratio {:.3}",
                vals[0],
                vals[1],
                vals[0].max(vals[1]) / vals[0].min(vals[1])
            );
        }
    }
}

fn ray_direction_probe() {
    use mpolar::quasimode::{radial_quasimode, ForcingSpec};
    use mpolar::potential::PotentialSpec;
    let spec = PotentialSpec::single_inverse_square(2, 1.0, 0.3);
    let params = SemiclassicalParams::new(400.0, 400.0e-6, mpolar::operator::ResolventSign::Minus).unwrap();
    let geom = diagnostic_geometry();
    for incoming in [true, false] {
        let forcing = ForcingSpec {
            r_center: 1.7,
            r_width: 0.25,
            theta0: 0.0,
            band: 11,
            incoming,
            seed: 33,
        };
        let qm = radial_quasimode(&spec, &params, &geom, &forcing).unwrap();
        let polar = qm.to_polar(128);
        let inner = polar.weighted_norm_sq(|r| if (0.6..=1.24).contains(&r) { 1.0 } else { 0.0 });
        let outer = polar.weighted_norm_sq(|r| if (2.0..=2.6).contains(&r) { 1.0 } else { 0.0 });
        println!("phase {}: inner mass {inner:.4e} outer mass {outer:.4e} ratio {:.3}",
            if incoming { "e^{-ir/h}" } else { "none" }, inner / outer);
    }
}
