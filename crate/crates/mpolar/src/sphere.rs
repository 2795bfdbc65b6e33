//! Eigenbases of the sphere Laplacian and of the perturbed angular operator
//! -d^2/dtheta^2 + b(theta), and the small/large harmonic split of fields
//! sampled on polar grids.

use crate::error::{Error, Result};
use crate::linalg::symeig::eigh;
use crate::linalg::{gauss::gauss_legendre, C64};

/// One eigenpair. Degenerate eigenvalues appear as separate entries sharing
/// a multiplicity tag.
#[derive(Debug, Clone)]
pub struct ModeEntry {
    pub index: usize,
    /// nu_k >= 0, so the eigenvalue is nu_k^2.
    pub nu: f64,
    pub eigenvalue: f64,
    /// Samples on the basis grid; unit norm under the basis quadrature.
    pub samples: Vec<f64>,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct ModeBasis {
    pub dimension: usize,
    pub entries: Vec<ModeEntry>,
    /// d = 2: uniform theta in [0, 2pi). d = 3: flattened (colatitude, azimuth)
    /// product grid, colatitudes from Gauss-Legendre nodes in cos(theta).
    pub grid: Vec<f64>,
    pub quad_weights: Vec<f64>,
    pub angular_potential: Option<Vec<f64>>,
    /// Split threshold nu-tilde.
    pub threshold: f64,
}

impl ModeBasis {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.eigenvalue).collect()
    }

    /// Quadrature inner product of two sampled functions on the basis grid.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter().zip(g).zip(&self.quad_weights).map(|((a, b), w)| a * b * w).sum()
    }

    /// Gram matrix max deviation from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, ei) in self.entries.iter().enumerate() {
            for (j, ej) in self.entries.iter().enumerate().skip(i) {
                let g = self.inner(&ei.samples, &ej.samples);
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - want).abs());
            }
        }
        worst
    }
}

/// Analytic eigenbasis of the sphere Laplacian with all nu_k <= max_nu.
///
/// d = 2: Fourier modes, nu = k, cos/sin pairs. d = 3: real spherical
/// harmonics, nu^2 = l(l+1), multiplicity 2l+1.
pub fn analytic_basis(d: usize, max_nu: f64) -> Result<ModeBasis> {
    let n_theta = ((8.0 * max_nu.ceil()).max(256.0) as usize).next_power_of_two();
    analytic_basis_on_grid(d, max_nu, n_theta)
}

pub fn analytic_basis_on_grid(d: usize, max_nu: f64, grid_size: usize) -> Result<ModeBasis> {
    match d {
        2 => Ok(fourier_basis(max_nu, grid_size)),
        3 => Ok(sphere3_basis(max_nu, grid_size)),
        _ => Err(Error::Unsupported(format!(
            "analytic sphere bases are implemented for d in {{2, 3}}, got d = {d}"
        ))),
    }
}

fn fourier_basis(max_nu: f64, n_theta: usize) -> ModeBasis {
    let two_pi = 2.0 * std::f64::consts::PI;
    let grid: Vec<f64> = (0..n_theta).map(|i| two_pi * i as f64 / n_theta as f64).collect();
    let w = two_pi / n_theta as f64;
    let quad_weights = vec![w; n_theta];
    let mut entries = Vec::new();
    let norm0 = 1.0 / two_pi.sqrt();
    entries.push(ModeEntry {
        index: 0,
        nu: 0.0,
        eigenvalue: 0.0,
        samples: vec![norm0; n_theta],
        multiplicity: 1,
    });
    let kmax = max_nu.floor() as usize;
    let normk = 1.0 / std::f64::consts::PI.sqrt();
    for k in 1..=kmax {
        let kk = k as f64;
        entries.push(ModeEntry {
            index: entries.len(),
            nu: kk,
            eigenvalue: kk * kk,
            samples: grid.iter().map(|&t| normk * (kk * t).cos()).collect(),
            multiplicity: 2,
        });
        entries.push(ModeEntry {
            index: entries.len(),
            nu: kk,
            eigenvalue: kk * kk,
            samples: grid.iter().map(|&t| normk * (kk * t).sin()).collect(),
            multiplicity: 2,
        });
    }
    ModeBasis {
        dimension: 2,
        entries,
        grid,
        quad_weights,
        angular_potential: None,
        threshold: 0.0,
    }
}

fn sphere3_basis(max_nu: f64, grid_size: usize) -> ModeBasis {
    // nu^2 = l(l+1); include l while sqrt(l(l+1)) <= max_nu
    let mut lmax = 0usize;
    while ((lmax + 1) as f64 * (lmax + 2) as f64).sqrt() <= max_nu {
        lmax += 1;
    }
    let n_col = (grid_size / 2).max(lmax + 1);
    let n_az = 2 * n_col;
    let (xs, ws) = gauss_legendre(n_col);
    let two_pi = 2.0 * std::f64::consts::PI;
    // flattened (colatitude, azimuth) nodes; `grid` records the colatitude
    let mut grid = Vec::with_capacity(n_col * n_az);
    let mut quad = Vec::with_capacity(n_col * n_az);
    for (ic, &x) in xs.iter().enumerate() {
        let colat = x.clamp(-1.0, 1.0).acos();
        for _ia in 0..n_az {
            grid.push(colat);
            quad.push(ws[ic] * two_pi / n_az as f64);
        }
    }
    let mut entries = Vec::new();
    for l in 0..=lmax {
        let mult = 2 * l + 1;
        for m in -(l as i64)..=(l as i64) {
            let mut samples = Vec::with_capacity(n_col * n_az);
            for (ic, &x) in xs.iter().enumerate() {
                let p = normalized_assoc_legendre(l, m.unsigned_abs() as usize, x);
                let _ = ic;
                for ia in 0..n_az {
                    let phi = two_pi * ia as f64 / n_az as f64;
                    let v = match m.cmp(&0) {
                        std::cmp::Ordering::Equal => p,
                        std::cmp::Ordering::Greater => {
                            2f64.sqrt() * p * (m as f64 * phi).cos()
                        }
                        std::cmp::Ordering::Less => {
                            2f64.sqrt() * p * (m.unsigned_abs() as f64 * phi).sin()
                        }
                    };
                    samples.push(v);
                }
            }
            entries.push(ModeEntry {
                index: entries.len(),
                nu: (l as f64 * (l as f64 + 1.0)).sqrt(),
                eigenvalue: l as f64 * (l as f64 + 1.0),
                samples,
                multiplicity: mult,
            });
        }
    }
    ModeBasis {
        dimension: 3,
        entries,
        grid,
        quad_weights: quad,
        angular_potential: None,
        threshold: 0.0,
    }
}

/// L2(S^2)-normalized associated Legendre P~_l^m(x), stable upward recurrence.
fn normalized_assoc_legendre(l: usize, m: usize, x: f64) -> f64 {
    let fourpi = 4.0 * std::f64::consts::PI;
    let mut pmm = (1.0 / fourpi).sqrt();
    if m > 0 {
        let s = (1.0 - x * x).max(0.0).sqrt();
        for k in 1..=m {
            pmm *= -(((2 * k + 1) as f64) / (2 * k) as f64).sqrt() * s;
        }
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = ((2 * m + 3) as f64).sqrt() * x * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut pm2 = pmm;
    for ll in (m + 2)..=l {
        let llf = ll as f64;
        let mf = m as f64;
        let a = ((4.0 * llf * llf - 1.0) / (llf * llf - mf * mf)).sqrt();
        let b = (((llf - 1.0).powi(2) - mf * mf) / (4.0 * (llf - 1.0).powi(2) - 1.0)).sqrt();
        let p = a * (x * pm1 - b * pm2);
        pm2 = pm1;
        pm1 = p;
    }
    pm1
}

/// Lowest `count` eigenpairs of the periodic problem -e'' + b(theta) e = nu^2 e
/// on the uniform grid carrying `b_samples` (second-order centered wrap).
pub fn angular_eigenproblem(b_samples: &[f64], count: usize) -> Result<ModeBasis> {
    let n = b_samples.len();
    if n < 256 {
        return Err(Error::Parameter(format!(
            "angular grid needs >= 256 points, got {n}"
        )));
    }
    if let Some(bad) = b_samples.iter().find(|&&b| b < 0.0) {
        return Err(Error::Hypothesis(format!(
            "angular coefficient must be nonnegative, found b = {bad}"
        )));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let dt = two_pi / n as f64;
    let inv = 1.0 / (dt * dt);
    let mut h = vec![0.0f64; n * n];
    for i in 0..n {
        h[i * n + i] = 2.0 * inv + b_samples[i];
        h[i * n + (i + 1) % n] = -inv;
        h[i * n + (i + n - 1) % n] = -inv;
    }
    let (d, z) = eigh(&h, n)?;
    let count = count.min(n);
    let grid: Vec<f64> = (0..n).map(|i| dt * i as f64).collect();
    let mut entries = Vec::with_capacity(count);
    for k in 0..count {
        let lam = d[k.min(n - 1)].max(0.0);
        // quadrature-normalize: sum e_i^2 dt = 1
        let scale = 1.0 / dt.sqrt();
        let mut samples: Vec<f64> = (0..n).map(|i| z[i * n + k] * scale).collect();
        // fix sign so the first substantial component is positive
        if let Some(v) = samples.iter().find(|v| v.abs() > 1e-8) {
            if *v < 0.0 {
                for s in &mut samples {
                    *s = -*s;
                }
            }
        }
        entries.push(ModeEntry {
            index: k,
            nu: lam.sqrt(),
            eigenvalue: lam,
            samples,
            multiplicity: 1,
        });
    }
    // tag near-degenerate clusters
    let mut k = 0;
    while k < entries.len() {
        let mut j = k + 1;
        while j < entries.len()
            && (entries[j].eigenvalue - entries[k].eigenvalue).abs()
                <= 1e-6 * (1.0 + entries[k].eigenvalue.abs())
        {
            j += 1;
        }
        for e in &mut entries[k..j] {
            e.multiplicity = j - k;
        }
        k = j;
    }
    Ok(ModeBasis {
        dimension: 2,
        entries,
        grid,
        quad_weights: vec![dt; n],
        angular_potential: Some(b_samples.to_vec()),
        threshold: 0.0,
    })
}

/// Complex field on a polar annulus: values[ir * n_theta + it].
#[derive(Debug, Clone)]
pub struct PolarField {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub values: Vec<C64>,
}

impl PolarField {
    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn from_fn(r: &[f64], n_theta: usize, mut f: impl FnMut(f64, f64) -> C64) -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        let theta: Vec<f64> = (0..n_theta).map(|i| two_pi * i as f64 / n_theta as f64).collect();
        let mut values = Vec::with_capacity(r.len() * n_theta);
        for &ri in r {
            for &ti in &theta {
                values.push(f(ri, ti));
            }
        }
        PolarField { r: r.to_vec(), theta, values }
    }

    /// L2 norm squared with the planar measure r dr dtheta.
    pub fn norm_sq(&self) -> f64 {
        self.weighted_norm_sq(|_| 1.0)
    }

    /// Integral of w(r) |u|^2 r dr dtheta.
    pub fn weighted_norm_sq(&self, w: impl Fn(f64) -> f64) -> f64 {
        let nt = self.n_theta();
        let dtheta = 2.0 * std::f64::consts::PI / nt as f64;
        let rw = trapezoid(&self.r);
        let mut acc = 0.0;
        for (ir, &ri) in self.r.iter().enumerate() {
            let mut ring = 0.0;
            for it in 0..nt {
                ring += self.values[ir * nt + it].norm_sqr();
            }
            acc += ring * dtheta * w(ri) * ri * rw[ir];
        }
        acc
    }
}

fn trapezoid(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let dh = x[i + 1] - x[i];
        w[i] += 0.5 * dh;
        w[i + 1] += 0.5 * dh;
    }
    w
}

/// Result of splitting a polar field at angular threshold nu-tilde.
#[derive(Debug, Clone)]
pub struct ModeSplit {
    pub small: PolarField,
    pub large: PolarField,
    pub threshold: f64,
    /// Radial coefficient functions, one per basis entry.
    pub coefficients: Vec<Vec<C64>>,
    /// Residual energy fraction outside the basis span.
    pub tail_fraction: f64,
}

/// Project a polar field on the basis and split into small (nu <= nu_tilde)
/// and large (nu > nu_tilde) parts. The angular grids must match.
pub fn split_modes(field: &PolarField, basis: &ModeBasis, nu_tilde: f64) -> Result<ModeSplit> {
    if basis.dimension != 2 {
        return Err(Error::Unsupported("mode splits operate on d = 2 polar grids".into()));
    }
    let nt = field.n_theta();
    if basis.grid.len() != nt {
        return Err(Error::Parameter(format!(
            "basis sampled on {} angular points, field on {nt}",
            basis.grid.len()
        )));
    }
    let nr = field.r.len();
    let dtheta = 2.0 * std::f64::consts::PI / nt as f64;
    let mut coefficients = vec![vec![C64::ZERO; nr]; basis.entries.len()];
    for (ke, entry) in basis.entries.iter().enumerate() {
        for ir in 0..nr {
            let mut acc = C64::ZERO;
            for it in 0..nt {
                acc += field.values[ir * nt + it] * entry.samples[it];
            }
            coefficients[ke][ir] = acc * dtheta;
        }
    }
    let mut small = PolarField {
        r: field.r.clone(),
        theta: field.theta.clone(),
        values: vec![C64::ZERO; nr * nt],
    };
    let mut large = small.clone();
    for (ke, entry) in basis.entries.iter().enumerate() {
        let target = if entry.nu <= nu_tilde { &mut small } else { &mut large };
        for ir in 0..nr {
            let c = coefficients[ke][ir];
            if c == C64::ZERO {
                continue;
            }
            for it in 0..nt {
                target.values[ir * nt + it] += c * entry.samples[it];
            }
        }
    }
    // residual outside the span
    let total = field.norm_sq();
    let mut resid = 0.0;
    {
        let nt_f = nt;
        let rw = trapezoid(&field.r);
        let dth = dtheta;
        for ir in 0..nr {
            let mut ring = 0.0;
            for it in 0..nt_f {
                let diff = field.values[ir * nt_f + it]
                    - small.values[ir * nt_f + it]
                    - large.values[ir * nt_f + it];
                ring += diff.norm_sqr();
            }
            resid += ring * dth * field.r[ir] * rw[ir];
        }
    }
    let tail_fraction = if total > 0.0 { resid / total } else { 0.0 };
    if tail_fraction > 1e-8 {
        return Err(Error::BasisTooSmall { residual: tail_fraction, limit: 1e-8 });
    }
    Ok(ModeSplit {
        small,
        large,
        threshold: nu_tilde,
        coefficients,
        tail_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn fourier_eigenvalues_up_to_two() {
        let basis = analytic_basis(2, 2.0).unwrap();
        let got = basis.eigenvalues();
        assert_eq!(got.len(), 5);
        let want = [0.0, 1.0, 1.0, 4.0, 4.0];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-14);
        }
    }

    #[test]
    fn sphere3_eigenvalue_ladder() {
        // eigenvalues {0, 2, 2, 2, 6, ...} counted with multiplicity
        let basis = analytic_basis(3, 6f64.sqrt()).unwrap();
        let got = basis.eigenvalues();
        assert!(got.len() >= 9);
        let want = [0.0, 2.0, 2.0, 2.0, 6.0, 6.0, 6.0, 6.0, 6.0];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
        // multiplicity tags
        assert_eq!(basis.entries[0].multiplicity, 1);
        assert_eq!(basis.entries[1].multiplicity, 3);
        assert_eq!(basis.entries[4].multiplicity, 5);
    }

    #[test]
    fn fourier_orthonormality_first_nine() {
        let basis = analytic_basis_on_grid(2, 4.0, 512).unwrap();
        assert!(basis.entries.len() >= 9);
        assert!(basis.orthonormality_defect() < 1e-10);
    }

    #[test]
    fn sphere3_orthonormality() {
        let basis = analytic_basis_on_grid(3, 3.5, 64).unwrap();
        assert!(basis.orthonormality_defect() < 1e-10);
    }

    #[test]
    fn nu_growth_lower_bound() {
        let basis = analytic_basis(2, 12.0).unwrap();
        // nu_K >= nu_0 + K * c with c = 1/2 for the Fourier ladder
        for (k, e) in basis.entries.iter().enumerate() {
            assert!(e.nu + 1e-12 >= 0.5 * (k as f64 / 2.0).floor());
        }
        let evs = basis.eigenvalues();
        assert!(evs.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn angular_free_case_matches_fourier() {
        let b = vec![0.0; 1024];
        let basis = angular_eigenproblem(&b, 5).unwrap();
        let want = [0.0f64, 1.0, 1.0, 4.0, 4.0];
        for (entry, w) in basis.entries.iter().zip(want) {
            // sharp second-order dispersion bound: |lam_fd - k^2| <= k^4 dt^2 / 12
            let dt = 2.0 * std::f64::consts::PI / 1024.0;
            let bound = 1.2 * w * w * dt * dt / 12.0 + 1e-9;
            assert!(
                (entry.eigenvalue - w).abs() <= bound,
                "eigenvalue {} vs {w}, bound {bound:e}",
                entry.eigenvalue
            );
        }
        // Richardson extrapolation of the 512/1024 pair recovers the continuum
        // eigenvalues to 1e-6
        let basis512 = angular_eigenproblem(&vec![0.0; 512], 5).unwrap();
        for k in 0..5 {
            let extrap =
                (4.0 * basis.entries[k].eigenvalue - basis512.entries[k].eigenvalue) / 3.0;
            assert!((extrap - want[k]).abs() < 1e-6, "extrap {extrap} vs {}", want[k]);
        }
    }

    #[test]
    fn angular_constant_shift() {
        let c0 = 0.7;
        let basis = angular_eigenproblem(&vec![c0; 512], 5).unwrap();
        let free = angular_eigenproblem(&vec![0.0; 512], 5).unwrap();
        for (a, b) in basis.entries.iter().zip(&free.entries) {
            assert!((a.eigenvalue - b.eigenvalue - c0).abs() < 1e-10);
        }
    }

    #[test]
    fn angular_negative_sample_rejected() {
        let mut b = vec![0.1; 512];
        b[100] = -0.2;
        assert!(matches!(angular_eigenproblem(&b, 3), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn angular_one_plus_cos_ground_state() {
        let n1 = 1024;
        let mk = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|i| 1.0 + (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
                .collect()
        };
        let e256 = angular_eigenproblem(&mk(256), 1).unwrap().entries[0].eigenvalue;
        let e512 = angular_eigenproblem(&mk(512), 1).unwrap().entries[0].eigenvalue;
        let e1024 = angular_eigenproblem(&mk(n1), 1).unwrap().entries[0].eigenvalue;
        assert!(e1024 > 0.0 && e1024 < 2.0, "ground state {e1024}");
        // Richardson extrapolants of successive pairs agree to 1e-6
        let x_a = (4.0 * e512 - e256) / 3.0;
        let x_b = (4.0 * e1024 - e512) / 3.0;
        assert!((x_a - x_b).abs() < 1e-6, "{x_a} vs {x_b}");
    }

    #[test]
    fn angular_convergence_is_second_order() {
        // three-resolution Richardson fit on a smooth coefficient
        let mk = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    0.5 + 0.3 * t.sin() + 0.2 * (2.0 * t).cos()
                })
                .collect()
        };
        let e = |n: usize| angular_eigenproblem(&mk(n), 3).unwrap().entries[2].eigenvalue;
        let (e1, e2, e3) = (e(256), e(512), e(1024));
        let order = ((e1 - e2) / (e2 - e3)).abs().log2();
        assert!((1.8..=2.2).contains(&order), "observed order {order}");
    }

    #[test]
    fn split_single_high_mode_goes_large() {
        let basis = analytic_basis_on_grid(2, 8.0, 256).unwrap();
        let r: Vec<f64> = (1..=40).map(|i| 0.05 * i as f64).collect();
        // field = g(r) * e_5(theta) where entry for nu = 5 (cos branch)
        let e5 = basis.entries.iter().find(|e| e.nu == 5.0).unwrap().clone();
        let field = PolarField::from_fn(&r, 256, |ri, ti| {
            let it = (ti / (2.0 * std::f64::consts::PI) * 256.0).round() as usize % 256;
            c((-ri).exp() * e5.samples[it], 0.0)
        });
        let split = split_modes(&field, &basis, 3.0).unwrap();
        assert!(split.small.norm_sq() < 1e-20 * field.norm_sq().max(1e-300));
        assert!((split.large.norm_sq() - field.norm_sq()).abs() < 1e-10 * field.norm_sq());
    }

    #[test]
    fn split_constant_angular_goes_small() {
        let basis = analytic_basis_on_grid(2, 4.0, 256).unwrap();
        let r: Vec<f64> = (1..=40).map(|i| 0.05 * i as f64).collect();
        let field = PolarField::from_fn(&r, 256, |ri, _| c((-ri * ri).exp(), 0.3));
        let split = split_modes(&field, &basis, 0.0).unwrap();
        assert!(split.large.norm_sq() < 1e-20 * field.norm_sq());
        let diff: f64 = field
            .values
            .iter()
            .zip(&split.small.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        assert!(diff < 1e-20 * field.norm_sq());
    }

    #[test]
    fn split_energy_identity_random_band_limited() {
        let basis = analytic_basis_on_grid(2, 10.0, 256).unwrap();
        let mut rng = crate::rng::CounterRng::new(17, 0);
        let r: Vec<f64> = (1..=60).map(|i| 0.03 * i as f64).collect();
        // random band-limited field
        let mut amps = Vec::new();
        for _ in &basis.entries {
            amps.push((rng.range(-1.0, 1.0), rng.range(-1.0, 1.0), rng.range(0.5, 2.0)));
        }
        let entries = basis.entries.clone();
        let field = PolarField::from_fn(&r, 256, |ri, ti| {
            let it = (ti / (2.0 * std::f64::consts::PI) * 256.0).round() as usize % 256;
            let mut acc = C64::ZERO;
            for (e, (are, aim, decay)) in entries.iter().zip(&amps) {
                acc += c(*are, *aim) * e.samples[it] * (-ri * decay).exp();
            }
            acc
        });
        for nu_tilde in [0.0, 2.0, 5.0, 9.0] {
            let split = split_modes(&field, &basis, nu_tilde).unwrap();
            let total = field.norm_sq();
            let sum = split.small.norm_sq() + split.large.norm_sq();
            assert!(
                (sum - total).abs() < 1e-10 * total,
                "nu_tilde={nu_tilde}: {sum} vs {total}"
            );
            // orthogonality of the two parts
            let nt = 256;
            let rw = super::trapezoid(&field.r);
            let dth = 2.0 * std::f64::consts::PI / nt as f64;
            let mut ip = C64::ZERO;
            for ir in 0..field.r.len() {
                for it in 0..nt {
                    ip += split.small.values[ir * nt + it].conj()
                        * split.large.values[ir * nt + it]
                        * c(field.r[ir] * rw[ir] * dth, 0.0);
                }
            }
            assert!(ip.norm() < 1e-10 * total);
        }
    }

    #[test]
    fn split_detects_out_of_band_field() {
        let basis = analytic_basis_on_grid(2, 3.0, 256).unwrap();
        let r: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
        let field = PolarField::from_fn(&r, 256, |ri, ti| c((-ri).exp() * (9.0 * ti).cos(), 0.0));
        assert!(matches!(
            split_modes(&field, &basis, 1.0),
            Err(Error::BasisTooSmall { .. })
        ));
    }

    #[test]
    fn parseval_between_coefficients_and_field() {
        let basis = analytic_basis_on_grid(2, 6.0, 256).unwrap();
        let r: Vec<f64> = (1..=50).map(|i| 0.04 * i as f64).collect();
        let field = PolarField::from_fn(&r, 256, |ri, ti| {
            c((-ri).exp() * (3.0 * ti).cos(), 0.5 * (ti).sin() * (-2.0 * ri).exp())
        });
        let split = split_modes(&field, &basis, 2.0).unwrap();
        // sum_k int |u_k|^2 r dr == ||u||^2
        let rw = super::trapezoid(&r);
        let mut sum = 0.0;
        for ck in &split.coefficients {
            for (ir, v) in ck.iter().enumerate() {
                sum += v.norm_sqr() * r[ir] * rw[ir];
            }
        }
        let total = field.norm_sq();
        assert!((sum - total).abs() < 1e-10 * total, "{sum} vs {total}");
    }
}
