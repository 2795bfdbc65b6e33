//! Experiment orchestration: staged runs with per-frequency caching,
//! deterministic parallel sweeps, CSV/JSON artifacts and summary emission.

use crate::config::{fnv1a, ExperimentConfig};
use crate::error::{Error, Result};
use crate::potential::validate_hypotheses;
use crate::resolvent::{
    fit_power_law, SweepMethod, SweepRecord, SweepResult,
};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub wall_ms: f64,
    pub cached: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub path: String,
    /// content digest; timing columns are masked before hashing so the
    /// digest certifies the numeric payload only
    pub digest: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct SummaryRecord {
    pub validation_pass: bool,
    pub c_emp: f64,
    pub fitted_exponent: Option<f64>,
    pub fit_r_squared: Option<f64>,
    pub shell_fraction: Option<f64>,
    pub flux_balance: Option<f64>,
    pub weighted_half: Option<f64>,
    pub pole_masses: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_digest: String,
    pub code_version: String,
    pub cutoff_radii: Vec<f64>,
    pub stages: Vec<StageRecord>,
    pub artifacts: Vec<ArtifactRecord>,
    pub summary: SummaryRecord,
}

fn wall() -> std::time::Instant {
    std::time::Instant::now()
}

/// RFC 4180 field quoting.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_row(fields: &[String]) -> String {
    fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",")
}

/// Digest of a CSV file with the named column masked (timings stay out of
/// the determinism contract).
pub fn csv_digest_masked(path: &Path, masked: &str) -> Result<String> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let cols: Vec<&str> = header.split(',').collect();
    let skip = cols.iter().position(|c| *c == masked);
    let mut hasher_input = String::new();
    hasher_input.push_str(header);
    hasher_input.push('\n');
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        for (i, f) in fields.iter().enumerate() {
            if Some(i) == skip {
                hasher_input.push('-');
            } else {
                hasher_input.push_str(f);
            }
            hasher_input.push(',');
        }
        hasher_input.push('\n');
    }
    Ok(format!("{:016x}", fnv1a(hasher_input.as_bytes())))
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(format!("{:016x}", fnv1a(&bytes)))
}

fn sweep_method(cfg: &ExperimentConfig) -> Result<SweepMethod> {
    match cfg.sweep.method.as_str() {
        "radial_modes" => Ok(SweepMethod::RadialModes),
        #[cfg(feature = "cartesian")]
        "cartesian" => Ok(SweepMethod::Cartesian { sectors: false }),
        #[cfg(feature = "cartesian")]
        "cartesian_sectors" => Ok(SweepMethod::Cartesian { sectors: true }),
        #[cfg(not(feature = "cartesian"))]
        "cartesian" | "cartesian_sectors" => Err(Error::Unsupported(
            "built without the `cartesian` feature".into(),
        )),
        m => Err(Error::Config(format!("unknown sweep method `{m}`"))),
    }
}

/// One frequency point, through whichever backend the config names.
pub fn sweep_point(cfg: &ExperimentConfig, lambda: f64) -> Result<SweepRecord> {
    use crate::operator::SemiclassicalParams;
    let geom = cfg.geometry_policy()?;
    let eps = cfg.eps_policy();
    let method = sweep_method(cfg)?;
    let t0 = wall();
    let (norm, iters, residual) = match method {
        SweepMethod::RadialModes => {
            let params = SemiclassicalParams::new(lambda, eps.eps(lambda), cfg.sign())?;
            let out = crate::resolvent::unipolar_mode_norm(&cfg.potential, &params, &geom, None)?;
            (out.norm, out.iters_total, out.worst_residual)
        }
        #[cfg(feature = "cartesian")]
        SweepMethod::Cartesian { sectors } => {
            let params = SemiclassicalParams::new(lambda, eps.eps(lambda), cfg.sign())?;
            let out = crate::resolvent::cartesian_norm(&cfg.potential, &params, &geom, sectors)?;
            (out.norm, out.iters, out.residual)
        }
    };
    Ok(SweepRecord {
        lambda,
        epsilon: eps.eps(lambda),
        norm,
        norm_sqrt_lambda: norm * lambda.sqrt(),
        iters,
        residual,
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
    })
}

/// Deterministic parallel sweep: point i is computed by worker i mod T and
/// results are merged in frequency order. Per-point caching keyed by
/// (config digest, lambda) lets interrupted sweeps resume.
pub fn sweep_parallel(
    cfg: &ExperimentConfig,
    lambdas: &[f64],
    cache_dir: Option<&Path>,
) -> Result<SweepResult> {
    // the Cartesian backend is memory-bound; keep it serial
    let threads = match sweep_method(cfg)? {
        SweepMethod::RadialModes => cfg.threads.max(1),
        #[cfg(feature = "cartesian")]
        SweepMethod::Cartesian { .. } => 1,
    };
    let digest = cfg.digest();
    let cache_file = |lambda: f64| -> Option<PathBuf> {
        cache_dir.map(|d| d.join(format!("sweep-{digest}-{lambda:.6e}.json")))
    };
    let mut slots: Vec<Option<std::result::Result<SweepRecord, String>>> = vec![None; lambdas.len()];
    // cached points first
    let mut pending: Vec<usize> = Vec::new();
    for (i, &lambda) in lambdas.iter().enumerate() {
        if let Some(path) = cache_file(lambda) {
            if let Ok(text) = std::fs::read_to_string(&path) {
                if let Ok(rec) = serde_json::from_str::<SweepRecord>(&text) {
                    slots[i] = Some(Ok(rec));
                    continue;
                }
            }
        }
        pending.push(i);
    }
    if threads <= 1 {
        for &i in &pending {
            slots[i] = Some(sweep_point(cfg, lambdas[i]).map_err(|e| e.to_string()));
        }
    } else {
        let results: Vec<(usize, std::result::Result<SweepRecord, String>)> =
            std::thread::scope(|scope| {
                let mut handles = Vec::new();
                for t in 0..threads {
                    let my: Vec<usize> = pending
                        .iter()
                        .copied()
                        .filter(|i| i % threads == t)
                        .collect();
                    let cfg_ref = &*cfg;
                    handles.push(scope.spawn(move || {
                        my.into_iter()
                            .map(|i| (i, sweep_point(cfg_ref, lambdas[i]).map_err(|e| e.to_string())))
                            .collect::<Vec<_>>()
                    }));
                }
                handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
            });
        for (i, r) in results {
            slots[i] = Some(r);
        }
    }
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (i, slot) in slots.into_iter().enumerate() {
        match slot.expect("every point scheduled") {
            Ok(rec) => {
                if let Some(path) = cache_file(lambdas[i]) {
                    if !path.exists() {
                        if let Some(parent) = path.parent() {
                            let _ = std::fs::create_dir_all(parent);
                        }
                        let _ = std::fs::write(&path, serde_json::to_string(&rec).unwrap());
                    }
                }
                records.push(rec);
            }
            Err(e) => failures.push((lambdas[i], e)),
        }
    }
    if 4 * failures.len() > lambdas.len() {
        return Err(Error::Sweep { failed: failures.len(), total: lambdas.len() });
    }
    let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.lambda, r.norm)).collect();
    let fit = if pts.len() >= 4 {
        let lmin = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let lmax = pts.iter().map(|p| p.0).fold(0.0, f64::max);
        let mid = (lmin * lmax).sqrt();
        fit_power_law(&pts, (mid * (1.0 - 1e-12), lmax * (1.0 + 1e-12)))
            .or_else(|_| fit_power_law(&pts, (lmin * (1.0 - 1e-12), lmax * (1.0 + 1e-12))))
            .ok()
    } else {
        None
    };
    let c_emp = records.iter().map(|r| r.norm_sqrt_lambda).fold(0.0, f64::max);
    Ok(SweepResult { records, failures, fit, c_emp })
}

pub fn write_sweep_csv(path: &Path, result: &SweepResult) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(
        f,
        "lambda,epsilon,norm,norm_times_sqrt_lambda,iters,residual,wall_ms"
    )?;
    for r in &result.records {
        writeln!(
            f,
            "{}",
            csv_row(&[
                format!("{:.17e}", r.lambda),
                format!("{:.17e}", r.epsilon),
                format!("{:.17e}", r.norm),
                format!("{:.17e}", r.norm_sqrt_lambda),
                format!("{}", r.iters),
                format!("{:.17e}", r.residual),
                format!("{:.3}", r.wall_ms),
            ])
        )?;
    }
    Ok(())
}

/// Plot data: log-lambda against log-norm with the fit overlay.
pub fn write_plot_csv(path: &Path, result: &SweepResult) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "lambda,norm,fit_value")?;
    for r in &result.records {
        let fit_val = result
            .fit
            .as_ref()
            .map(|fit| fit.c * r.lambda.powf(fit.p))
            .unwrap_or(f64::NAN);
        writeln!(
            f,
            "{}",
            csv_row(&[
                format!("{:.17e}", r.lambda),
                format!("{:.17e}", r.norm),
                format!("{:.17e}", fit_val),
            ])
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct DiagnosticsSummary {
    pub quasimode_lambda: Option<f64>,
    pub forcing_norm: Option<f64>,
    pub shell_fraction: Option<f64>,
    pub mass_consistency: Option<(f64, f64)>,
    pub flux_balance: Option<f64>,
    pub lambda_flux: Option<f64>,
    pub z_vector_len: Option<f64>,
    pub weighted_half: Option<f64>,
    pub weighted_cube: Option<f64>,
    pub pole_masses: Option<Vec<f64>>,
    pub nu_tilde: f64,
}

fn run_diagnostics(cfg: &ExperimentConfig) -> Result<DiagnosticsSummary> {
    use crate::quasimode::{radial_quasimode, ForcingSpec};
    let d = &cfg.diagnostics;
    let mut out = DiagnosticsSummary { nu_tilde: d.nu_tilde, ..Default::default() };
    if !(d.husimi || d.flux || d.weighted_norms || d.mode_split) {
        return Ok(out);
    }
    let geom = cfg.geometry_policy()?;
    let params = crate::operator::SemiclassicalParams::new(
        d.quasimode_lambda,
        cfg.sweep.eps_relative * d.quasimode_lambda,
        cfg.sign(),
    )?;
    let scale = cfg.geometry.domain_radius / 1.4;
    let forcing = ForcingSpec {
        r_center: 0.85 * scale,
        r_width: 0.18 * scale,
        theta0: 0.0,
        band: d.forcing_band,
        incoming: true,
        seed: cfg.seed,
    };
    let qm = radial_quasimode(&cfg.potential, &params, &geom, &forcing)?;
    out.quasimode_lambda = Some(d.quasimode_lambda);
    out.forcing_norm = Some(qm.forcing_norm);
    let annulus = (0.3 * scale, 0.62 * scale);
    if d.husimi {
        let report = crate::experiments::shell_diagnostic(&qm, annulus, 4.0)?;
        out.shell_fraction = Some(report.fraction);
        let (m, f) = crate::experiments::mass_consistency(&qm, annulus)?;
        out.mass_consistency = Some((m, f));
    }
    if d.flux {
        let h = qm.params.h;
        let dx = qm.r[1] - qm.r[0];
        let r0 = 0.6 * scale;
        let band = 0.12 * scale;
        let field = crate::experiments::quasimode_patch(&qm, r0 + band, 5.0 * h.sqrt(), dx);
        let (centers, area) = crate::husimi::lattice_centers(
            h,
            0.75,
            (-(r0 + band), r0 + band),
            (-(r0 + band), r0 + band),
            |x, y| {
                let r = (x * x + y * y).sqrt();
                (r0 - band..=r0 + band).contains(&r)
            },
        );
        let density =
            crate::husimi::husimi(&field, h, &centers, area, crate::husimi::HusimiOptions::default())?;
        let dir = (forcing.theta0.cos(), forcing.theta0.sin());
        let ledger = crate::husimi::flux_ledger(
            &density,
            (0.0, 0.0),
            r0,
            band,
            15f64.to_radians(),
            &[dir, (-dir.0, -dir.1)],
        )?;
        out.flux_balance = Some(ledger.balance_defect);
        out.lambda_flux = Some(ledger.lambda_total);
        out.z_vector_len = Some((ledger.z_vector.0.powi(2) + ledger.z_vector.1.powi(2)).sqrt());
    }
    if d.weighted_norms {
        let large = qm.large_part_coefficients(d.nu_tilde);
        out.weighted_half = Some(crate::radial::weighted_norm_modes(
            &qm.r,
            &large,
            crate::radial::RadialWeight::Power { t: 0.5 },
        )?);
        out.weighted_cube = Some(crate::radial::weighted_norm_modes(
            &qm.r,
            &large,
            crate::radial::RadialWeight::SemiclassicalCube { h: qm.params.h },
        )?);
    }
    if d.mode_split {
        let l = cfg
            .potential
            .poles
            .first()
            .map(|p| p.cutoff_radius)
            .unwrap_or(0.3);
        let masses: Vec<f64> = [4.0, 8.0, 16.0]
            .iter()
            .map(|&div| qm.pole_ball_mass(l / div * 4.0, d.nu_tilde).0)
            .collect();
        out.pole_masses = Some(masses);
    }
    Ok(out)
}

/// Execute the staged experiment and persist artifacts under `out_dir`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    allow_violations: bool,
) -> Result<RunRecord> {
    std::fs::create_dir_all(out_dir)?;
    let digest = cfg.digest();
    let mut stages = Vec::new();
    let mut artifacts = Vec::new();
    let mut summary = SummaryRecord::default();

    // validate
    let t0 = wall();
    let report = validate_hypotheses(&cfg.potential, 16);
    summary.validation_pass = report.all_pass();
    let vpath = out_dir.join("validation.json");
    std::fs::write(&vpath, serde_json::to_string_pretty(&report).unwrap())?;
    artifacts.push(ArtifactRecord {
        path: "validation.json".into(),
        digest: file_digest(&vpath)?,
    });
    stages.push(StageRecord {
        name: "validate".into(),
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
        cached: false,
    });
    if !summary.validation_pass && !allow_violations {
        let failing: Vec<String> = report
            .failures()
            .iter()
            .map(|e| e.hypothesis.clone())
            .collect();
        return Err(Error::Hypothesis(format!(
            "potential fails validation: {}",
            failing.join("; ")
        )));
    }

    // sweep (cached per frequency)
    let t0 = wall();
    let cache = out_dir.join("cache");
    let lambdas = cfg.lambdas();
    let sweep = sweep_parallel(cfg, &lambdas, Some(&cache))?;
    stages.push(StageRecord {
        name: "sweep".into(),
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
        cached: false,
    });
    summary.c_emp = sweep.c_emp;
    if let Some(fit) = &sweep.fit {
        summary.fitted_exponent = Some(fit.p);
        summary.fit_r_squared = Some(fit.r_squared);
    }
    let spath = out_dir.join("sweep.csv");
    write_sweep_csv(&spath, &sweep)?;
    artifacts.push(ArtifactRecord {
        path: "sweep.csv".into(),
        digest: csv_digest_masked(&spath, "wall_ms")?,
    });
    let ppath = out_dir.join("plot.csv");
    write_plot_csv(&ppath, &sweep)?;
    artifacts.push(ArtifactRecord {
        path: "plot.csv".into(),
        digest: file_digest(&ppath)?,
    });
    if let Some(fit) = &sweep.fit {
        let fpath = out_dir.join("fit.json");
        std::fs::write(&fpath, serde_json::to_string_pretty(fit).unwrap())?;
        artifacts.push(ArtifactRecord {
            path: "fit.json".into(),
            digest: file_digest(&fpath)?,
        });
    }

    // diagnostics
    let t0 = wall();
    let diag = run_diagnostics(cfg).map_err(|e| Error::Stage {
        stage: "diagnostics".into(),
        source: Box::new(e),
    })?;
    stages.push(StageRecord {
        name: "diagnostics".into(),
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
        cached: false,
    });
    summary.shell_fraction = diag.shell_fraction;
    summary.flux_balance = diag.flux_balance;
    summary.weighted_half = diag.weighted_half;
    summary.pole_masses = diag.pole_masses.clone();
    let dpath = out_dir.join("diagnostics.json");
    std::fs::write(&dpath, serde_json::to_string_pretty(&diag).unwrap())?;
    artifacts.push(ArtifactRecord {
        path: "diagnostics.json".into(),
        digest: file_digest(&dpath)?,
    });

    let record = RunRecord {
        config_digest: digest,
        code_version: env!("CARGO_PKG_VERSION").into(),
        cutoff_radii: cfg.potential.poles.iter().map(|p| p.cutoff_radius).collect(),
        stages,
        artifacts,
        summary,
    };
    std::fs::write(
        out_dir.join("record.json"),
        serde_json::to_string_pretty(&record).unwrap(),
    )?;
    Ok(record)
}

/// Cross-run summary table plus per-run plot data; rejects artifacts whose
/// digests no longer match their manifests.
pub fn emit_report(run_dirs: &[PathBuf], out_path: &Path) -> Result<Vec<RunRecord>> {
    let mut records = Vec::new();
    for dir in run_dirs {
        let text = std::fs::read_to_string(dir.join("record.json"))?;
        let record: RunRecord = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("bad record.json in {}: {e}", dir.display())))?;
        for art in &record.artifacts {
            let path = dir.join(&art.path);
            let digest = if art.path.ends_with(".csv") && art.path.starts_with("sweep") {
                csv_digest_masked(&path, "wall_ms")?
            } else {
                file_digest(&path)?
            };
            if digest != art.digest {
                return Err(Error::Config(format!(
                    "orphan artifact {} in {}: digest {} does not match manifest {}",
                    art.path,
                    dir.display(),
                    digest,
                    art.digest
                )));
            }
        }
        records.push(record);
    }
    let mut f = std::fs::File::create(out_path)?;
    writeln!(
        f,
        "config_digest,validation_pass,c_emp,fitted_exponent,r_squared,shell_fraction,flux_balance,weighted_half"
    )?;
    for r in &records {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_default();
        writeln!(
            f,
            "{}",
            csv_row(&[
                r.config_digest.clone(),
                r.summary.validation_pass.to_string(),
                format!("{:.6e}", r.summary.c_emp),
                opt(r.summary.fitted_exponent),
                opt(r.summary.fit_r_squared),
                opt(r.summary.shell_fraction),
                opt(r.summary.flux_balance),
                opt(r.summary.weighted_half),
            ])
        )?;
    }
    Ok(records)
}

/// Mode-basis table (index, eigenvalue, multiplicity) for reports.
pub fn write_mode_table(path: &Path, basis: &crate::sphere::ModeBasis) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "k,nu_squared,multiplicity")?;
    for e in &basis.entries {
        writeln!(f, "{},{:.17e},{}", e.index, e.eigenvalue, e.multiplicity)?;
    }
    Ok(())
}

/// Radial trace export (r, Re y, Im y, |y|) plus the fitted exponent in the
/// header comment field of the first row.
pub fn write_basis_csv(path: &Path, basis: &crate::radial::AsymptoticBasis) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "r,re_y_plus,im_y_plus,abs_y_plus,re_y_minus,im_y_minus,abs_y_minus,fitted_exponent_plus,fitted_exponent_minus")?;
    for (i, &r) in basis.r.iter().enumerate() {
        writeln!(
            f,
            "{}",
            csv_row(&[
                format!("{r:.12e}"),
                format!("{:.12e}", basis.y_plus[i].re),
                format!("{:.12e}", basis.y_plus[i].im),
                format!("{:.12e}", basis.y_plus[i].norm()),
                format!("{:.12e}", basis.y_minus[i].re),
                format!("{:.12e}", basis.y_minus[i].im),
                format!("{:.12e}", basis.y_minus[i].norm()),
                format!("{:.6}", basis.fitted_exponent_plus),
                format!("{:.6}", basis.fitted_exponent_minus),
            ])
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
seed = 5
threads = 1

[potential]
dimension = 2
hardy_constant = 0.0
bound_constant = 1.0
background = { kind = "zero" }

[sweep]
lambda_min = 50.0
lambda_max = 400.0
count = 4

[geometry]
domain_radius = 1.4
chi_one = 0.8
chi_zero = 1.1
"#,
        )
        .unwrap()
    }

    #[test]
    fn run_experiment_free_config() {
        let dir = std::env::temp_dir().join(format!("mpolar-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let cfg = tiny_config();
        let record = run_experiment(&cfg, &dir, false).unwrap();
        assert!(record.summary.validation_pass);
        let p = record.summary.fitted_exponent.unwrap();
        assert!((-0.65..=-0.35).contains(&p), "fitted exponent {p}");
        assert!(dir.join("sweep.csv").exists());
        // determinism: rerun into a fresh dir and compare masked digests
        let dir2 = dir.with_extension("again");
        let _ = std::fs::remove_dir_all(&dir2);
        let record2 = run_experiment(&cfg, &dir2, false).unwrap();
        let d1 = record.artifacts.iter().find(|a| a.path == "sweep.csv").unwrap();
        let d2 = record2.artifacts.iter().find(|a| a.path == "sweep.csv").unwrap();
        assert_eq!(d1.digest, d2.digest);
        let _ = std::fs::remove_dir_all(&dir);
        let _ = std::fs::remove_dir_all(&dir2);
    }

    #[test]
    fn floor_violation_exits_with_hypothesis_error() {
        let mut cfg = tiny_config();
        cfg.potential = crate::potential::PotentialSpec::single_inverse_square(2, -0.1, 0.3);
        cfg.potential.hardy_constant = -0.1; // floor = -0.1 <= 0 at d = 2
        let dir = std::env::temp_dir().join(format!("mpolar-floor-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        match run_experiment(&cfg, &dir, false) {
            Err(Error::Hypothesis(msg)) => assert!(msg.contains("validation")),
            other => panic!("expected hypothesis failure, got {other:?}"),
        }
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn thread_count_does_not_change_numbers() {
        let cfg1 = tiny_config();
        let mut cfg2 = tiny_config();
        cfg2.threads = 3;
        let lam = cfg1.lambdas();
        let a = sweep_parallel(&cfg1, &lam, None).unwrap();
        let b = sweep_parallel(&cfg2, &lam, None).unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.norm, y.norm);
            assert_eq!(x.iters, y.iters);
        }
    }

    #[test]
    fn emit_report_rejects_tampered_artifacts() {
        let dir = std::env::temp_dir().join(format!("mpolar-orphan-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let cfg = tiny_config();
        run_experiment(&cfg, &dir, false).unwrap();
        // tamper with a numeric value on the first data row
        let spath = dir.join("sweep.csv");
        let text = std::fs::read_to_string(&spath).unwrap();
        let mut lines: Vec<String> = text.lines().map(|s| s.to_string()).collect();
        lines[1] = lines[1].replacen(',', ",9", 1);
        std::fs::write(&spath, lines.join("\n")).unwrap();
        let out = dir.join("summary.csv");
        assert!(emit_report(&[dir.clone()], &out).is_err());
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_row(&["a".into(), "b,c".into()]), "a,\"b,c\"");
        assert_eq!(csv_row(&["say \"hi\"".into()]), "\"say \"\"hi\"\"\"");
    }
}
