//! Husimi phase-space densities at scale h and the defect-measure
//! diagnostics: shell localization, transport residuals, pole masses and
//! flux ledgers.

use crate::error::{Error, Result};
use crate::linalg::fft::{fft2, freq_index};
use crate::linalg::C64;
#[cfg(test)]
use crate::linalg::c;
use serde::Serialize;

/// Complex field on a uniform Cartesian patch; node (i, j) sits at
/// (x0 + i dx, y0 + j dx).
#[derive(Debug, Clone)]
pub struct CartesianField {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<C64>,
}

impl CartesianField {
    pub fn from_fn(
        x0: f64,
        y0: f64,
        dx: f64,
        nx: usize,
        ny: usize,
        mut f: impl FnMut(f64, f64) -> C64,
    ) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                values.push(f(x0 + i as f64 * dx, y0 + j as f64 * dx));
            }
        }
        CartesianField { x0, y0, dx, nx, ny, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.ny + j]
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dx * self.dx
    }

    /// Mass inside a disc.
    pub fn mass_in_disc(&self, cx: f64, cy: f64, rho: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.nx {
            let x = self.x0 + i as f64 * self.dx;
            for j in 0..self.ny {
                let y = self.y0 + j as f64 * self.dx;
                if (x - cx).powi(2) + (y - cy).powi(2) <= rho * rho {
                    acc += self.at(i, j).norm_sqr();
                }
            }
        }
        acc * self.dx * self.dx
    }
}

/// Husimi density sampled at a list of window centers and a shared square
/// xi-bin grid.
#[derive(Debug, Clone)]
pub struct PhaseSpaceDensity {
    pub h: f64,
    /// spatial packet width sqrt(h)
    pub sigma: f64,
    pub centers: Vec<(f64, f64)>,
    /// xi values per axis, symmetric around 0
    pub xi_axis: Vec<f64>,
    /// density[ic][ia * n_xi + ib] = |<u, g_{x_c, (xi_a, xi_b)}>|^2
    pub density: Vec<Vec<f64>>,
    /// phase-space measure weight dx0^2 dxi^2 / (2 pi h)^2 per sample
    pub sample_weight: f64,
    pub mass: f64,
    /// ||u||^2 over the sampled patch, for the mass-consistency contract
    pub field_norm_sq: f64,
}

impl PhaseSpaceDensity {
    pub fn n_xi(&self) -> usize {
        self.xi_axis.len()
    }

    /// Sum of weights*density over samples selected by (x, xi).
    pub fn integrate(&self, mut f: impl FnMut(f64, f64, f64, f64) -> f64) -> f64 {
        let nxi = self.n_xi();
        let mut acc = 0.0;
        for (ic, &(x, y)) in self.centers.iter().enumerate() {
            let d = &self.density[ic];
            for ia in 0..nxi {
                for ib in 0..nxi {
                    let w = f(x, y, self.xi_axis[ia], self.xi_axis[ib]);
                    if w != 0.0 {
                        acc += d[ia * nxi + ib] * w;
                    }
                }
            }
        }
        acc * self.sample_weight
    }

    /// Synthetic density from a closure, for functional-level tests.
    pub fn synthetic(
        h: f64,
        centers: Vec<(f64, f64)>,
        xi_axis: Vec<f64>,
        weight: f64,
        mut f: impl FnMut(f64, f64, f64, f64) -> f64,
    ) -> Self {
        let nxi = xi_axis.len();
        let mut density = Vec::with_capacity(centers.len());
        for &(x, y) in &centers {
            let mut d = Vec::with_capacity(nxi * nxi);
            for &xa in &xi_axis {
                for &xb in &xi_axis {
                    d.push(f(x, y, xa, xb).max(0.0));
                }
            }
            density.push(d);
        }
        let mass = density.iter().flatten().sum::<f64>() * weight;
        PhaseSpaceDensity {
            h,
            sigma: h.sqrt(),
            centers,
            xi_axis,
            density,
            sample_weight: weight,
            mass,
            field_norm_sq: mass,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HusimiOptions {
    /// keep |xi| components up to this value
    pub xi_keep: f64,
}

impl Default for HusimiOptions {
    fn default() -> Self {
        HusimiOptions { xi_keep: 2.5 }
    }
}

/// Centers on a square lattice of spacing `step*sqrt(h)` restricted by a
/// predicate.
pub fn lattice_centers(
    h: f64,
    step: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    mut keep: impl FnMut(f64, f64) -> bool,
) -> (Vec<(f64, f64)>, f64) {
    let a = step * h.sqrt();
    let mut out = Vec::new();
    let nx = ((x_range.1 - x_range.0) / a).ceil() as usize;
    let ny = ((y_range.1 - y_range.0) / a).ceil() as usize;
    for i in 0..=nx {
        let x = x_range.0 + i as f64 * a;
        for j in 0..=ny {
            let y = y_range.0 + j as f64 * a;
            if keep(x, y) {
                out.push((x, y));
            }
        }
    }
    (out, a * a)
}

/// Coherent-state transform of a sampled field: for each center x0 the
/// overlaps |<u, g_{x0, xi}>|^2 over the FFT xi-bins with |xi| <= xi_keep.
///
/// g is the L2-normalized Gaussian packet of spatial width sqrt(h). The
/// field must cover every window: a window of side ~max(8 sqrt(h), needed
/// for the xi resolution) around each center.
pub fn husimi(
    field: &CartesianField,
    h: f64,
    centers: &[(f64, f64)],
    center_area: f64,
    opts: HusimiOptions,
) -> Result<PhaseSpaceDensity> {
    if centers.is_empty() {
        return Err(Error::Parameter("no window centers".into()));
    }
    let dx = field.dx;
    let sigma = h.sqrt();
    if dx > 0.35 * sigma {
        return Err(Error::Resolution {
            h,
            spacing: dx,
            needed: (8.0 * sigma / (0.35 * sigma)) as usize,
        });
    }
    // window size: cover the Gaussian and give xi bins finer than 0.8 sqrt(h)
    let w_needed = (8.0 * sigma).max(2.0 * std::f64::consts::PI * h / (0.8 * sigma));
    let mut n_w = ((w_needed / dx).ceil() as usize).next_power_of_two();
    n_w = n_w.max(16);
    let w_len = n_w as f64 * dx;
    let dxi = 2.0 * std::f64::consts::PI * h / w_len;
    let m_keep = (opts.xi_keep / dxi).floor() as i64;
    let nxi = (2 * m_keep + 1) as usize;
    let xi_axis: Vec<f64> = (-m_keep..=m_keep).map(|m| m as f64 * dxi).collect();

    // packet normalization (pi h)^{-1/2} in d = 2, overall weight per sample
    let norm = 1.0 / (std::f64::consts::PI * h).sqrt();
    let sample_weight = center_area * dxi * dxi / (2.0 * std::f64::consts::PI * h).powi(2);

    let mut density = Vec::with_capacity(centers.len());
    let mut buf = vec![C64::ZERO; n_w * n_w];
    for &(cx, cy) in centers {
        // snap the center onto the field lattice
        let ic = ((cx - field.x0) / dx).round() as i64;
        let jc = ((cy - field.y0) / dx).round() as i64;
        let i0 = ic - (n_w as i64) / 2;
        let j0 = jc - (n_w as i64) / 2;
        // windowed field times Gaussian
        for a in 0..n_w {
            let gi = i0 + a as i64;
            let xa = field.x0 + gi as f64 * dx;
            let del_x = xa - (field.x0 + ic as f64 * dx);
            for b in 0..n_w {
                let gj = j0 + b as i64;
                let idx = a * n_w + b;
                if gi < 0 || gj < 0 || gi >= field.nx as i64 || gj >= field.ny as i64 {
                    buf[idx] = C64::ZERO;
                    continue;
                }
                let ya = field.y0 + gj as f64 * dx;
                let del_y = ya - (field.y0 + jc as f64 * dx);
                let g = (-0.25 * (del_x * del_x + del_y * del_y) / h).exp();
                // |g|^2 has width sqrt(h): e^{-|x|^2/(2h)} amplitude
                let g = g * g;
                buf[idx] = field.at(gi as usize, gj as usize) * g;
            }
        }
        fft2(&mut buf, n_w);
        // extract kept bins; overlap = dx^2 * norm * (-1)^{m_a+m_b} * FFT bin
        let mut d = vec![0.0f64; nxi * nxi];
        for a in 0..n_w {
            let ma = freq_index(a, n_w);
            if ma.abs() > m_keep {
                continue;
            }
            for b in 0..n_w {
                let mb = freq_index(b, n_w);
                if mb.abs() > m_keep {
                    continue;
                }
                let val = buf[a * n_w + b];
                let o = dx * dx * norm * val.norm();
                let ia = (ma + m_keep) as usize;
                let ib = (mb + m_keep) as usize;
                d[ia * nxi + ib] = o * o;
            }
        }
        density.push(d);
    }
    let mass: f64 = density.iter().flatten().sum::<f64>() * sample_weight;
    Ok(PhaseSpaceDensity {
        h,
        sigma,
        centers: centers.to_vec(),
        xi_axis,
        density,
        sample_weight,
        mass,
        field_norm_sq: field.norm_sq(),
    })
}

/// Fraction of phase-space mass with | |xi| - 1 | <= delta.
pub fn shell_fraction(density: &PhaseSpaceDensity, delta: f64) -> f64 {
    let total = density.integrate(|_, _, _, _| 1.0);
    if total == 0.0 {
        return 0.0;
    }
    let on_shell = density.integrate(|_, _, xa, xb| {
        let m = (xa * xa + xb * xb).sqrt();
        if (m - 1.0).abs() <= delta {
            1.0
        } else {
            0.0
        }
    });
    on_shell / total
}

/// |<H, xi . grad_x a>| normalized by total mass and sup |xi . grad_x a|.
///
/// `grad_a` returns the spatial gradient of the test symbol at (x, y, xi).
pub fn transport_residual(
    density: &PhaseSpaceDensity,
    grad_a: impl Fn(f64, f64, f64, f64) -> (f64, f64),
    pole_exclusion: &[(f64, f64)],
    min_pole_distance: f64,
) -> Result<f64> {
    for &(px, py) in pole_exclusion {
        for &(x, y) in &density.centers {
            let d = ((x - px).powi(2) + (y - py).powi(2)).sqrt();
            if d < min_pole_distance {
                return Err(Error::Parameter(format!(
                    "symbol support touches a pole: center ({x:.3},{y:.3}) is {d:.3} away"
                )));
            }
        }
    }
    let mut sup = 0.0f64;
    let pairing = density.integrate(|x, y, xa, xb| {
        let (gx, gy) = grad_a(x, y, xa, xb);
        let v = xa * gx + xb * gy;
        sup = sup.max(v.abs());
        v
    });
    let total = density.integrate(|_, _, _, _| 1.0);
    if total == 0.0 || sup == 0.0 {
        return Ok(0.0);
    }
    Ok(pairing.abs() / (total * sup))
}

/// Ray weights around a pole: mass in outgoing/incoming cones on the ring
/// |x - p| ~ r0 for each listed direction.
#[derive(Debug, Clone, Serialize)]
pub struct FluxLedger {
    pub directions: Vec<(f64, f64)>,
    pub outgoing: Vec<f64>,
    pub incoming: Vec<f64>,
    /// (sum out + sum in) / 2
    pub lambda_total: f64,
    /// |sum out - sum in| / lambda_total
    pub balance_defect: f64,
    /// barycenter of directions weighted by (out_j + in_j) / (2 Lambda)
    pub z_vector: (f64, f64),
}

/// Integrate density mass over the ring r0 +- band around `pole`, split into
/// cones of half-angle `theta_c` around each direction, outgoing (xi
/// parallel) vs incoming (xi antiparallel). Weights are per unit ray length.
pub fn flux_ledger(
    density: &PhaseSpaceDensity,
    pole: (f64, f64),
    r0: f64,
    band: f64,
    theta_c: f64,
    directions: &[(f64, f64)],
) -> Result<FluxLedger> {
    // cones must not overlap
    for (i, da) in directions.iter().enumerate() {
        for db in directions.iter().skip(i + 1) {
            let dot = da.0 * db.0 + da.1 * db.1;
            let ang = dot.clamp(-1.0, 1.0).acos();
            if ang < 2.0 * theta_c {
                return Err(Error::Geometry(format!(
                    "direction cones of half-angle {theta_c:.3} overlap (separation {ang:.3})"
                )));
            }
        }
    }
    let cos_c = theta_c.cos();
    let mut outgoing = vec![0.0f64; directions.len()];
    let mut incoming = vec![0.0f64; directions.len()];
    for (jd, &(zx, zy)) in directions.iter().enumerate() {
        let mass_out = density.integrate(|x, y, xa, xb| {
            let rx = x - pole.0;
            let ry = y - pole.1;
            let rr = (rx * rx + ry * ry).sqrt();
            if (rr - r0).abs() > band || rr == 0.0 {
                return 0.0;
            }
            if (rx * zx + ry * zy) / rr < cos_c {
                return 0.0;
            }
            let xm = (xa * xa + xb * xb).sqrt();
            if xm < 0.2 {
                return 0.0;
            }
            if (xa * zx + xb * zy) / xm >= cos_c {
                1.0
            } else {
                0.0
            }
        });
        let mass_in = density.integrate(|x, y, xa, xb| {
            let rx = x - pole.0;
            let ry = y - pole.1;
            let rr = (rx * rx + ry * ry).sqrt();
            if (rr - r0).abs() > band || rr == 0.0 {
                return 0.0;
            }
            if (rx * zx + ry * zy) / rr < cos_c {
                return 0.0;
            }
            let xm = (xa * xa + xb * xb).sqrt();
            if xm < 0.2 {
                return 0.0;
            }
            if (-(xa * zx + xb * zy)) / xm >= cos_c {
                1.0
            } else {
                0.0
            }
        });
        outgoing[jd] = mass_out / (2.0 * band);
        incoming[jd] = mass_in / (2.0 * band);
    }
    let s_out: f64 = outgoing.iter().sum();
    let s_in: f64 = incoming.iter().sum();
    let lambda_total = 0.5 * (s_out + s_in);
    let balance_defect = if lambda_total > 0.0 {
        (s_out - s_in).abs() / lambda_total
    } else {
        0.0
    };
    let mut z = (0.0, 0.0);
    if lambda_total > 0.0 {
        for (jd, &(zx, zy)) in directions.iter().enumerate() {
            let t = (outgoing[jd] + incoming[jd]) / (2.0 * lambda_total);
            z.0 += t * zx;
            z.1 += t * zy;
        }
    }
    Ok(FluxLedger {
        directions: directions.to_vec(),
        outgoing,
        incoming,
        lambda_total,
        balance_defect,
        z_vector: z,
    })
}
