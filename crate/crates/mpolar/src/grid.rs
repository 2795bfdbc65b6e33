//! Radial and Cartesian grid descriptors.

use crate::error::{Error, Result};

/// Spacing policy of a [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    /// Logarithmic near zero, switching to uniform beyond the matching radius.
    LogThenUniform,
    /// Uniform throughout.
    Uniform,
}

/// Strictly increasing radii on (r_min, r_max].
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub r: Vec<f64>,
    pub spacing: Spacing,
}

impl RadialGrid {
    /// Logarithmic grid from `r_min` up to `l`, continued uniformly to `r_max`
    /// (skipped when `r_max <= l`). `per_decade` must be at least 64.
    pub fn log_uniform(r_min: f64, l: f64, r_max: f64, per_decade: usize, dr_uniform: f64) -> Result<Self> {
        if r_min <= 0.0 || l <= r_min || r_max < l {
            return Err(Error::Parameter(format!(
                "need 0 < r_min < l <= r_max, got r_min={r_min}, l={l}, r_max={r_max}"
            )));
        }
        if per_decade < 64 {
            return Err(Error::Parameter(format!(
                "log region needs >= 64 points per decade, got {per_decade}"
            )));
        }
        let decades = (l / r_min).log10();
        let n_log = (decades * per_decade as f64).ceil() as usize;
        let ratio = (l / r_min).powf(1.0 / n_log as f64);
        let mut r = Vec::with_capacity(n_log + 16);
        let mut x = r_min;
        for _ in 0..=n_log {
            r.push(x);
            x *= ratio;
        }
        // snap the seam exactly onto l
        *r.last_mut().unwrap() = l;
        if r_max > l {
            let n_u = ((r_max - l) / dr_uniform).ceil().max(1.0) as usize;
            let du = (r_max - l) / n_u as f64;
            for i in 1..=n_u {
                r.push(l + i as f64 * du);
            }
        }
        Ok(RadialGrid { r, spacing: Spacing::LogThenUniform })
    }

    /// Uniform grid r_j = j*dr, j = 1..=n (Dirichlet row at r=0 excluded).
    pub fn uniform(r_max: f64, dr: f64) -> Result<Self> {
        if r_max <= 0.0 || dr <= 0.0 || dr >= r_max {
            return Err(Error::Parameter(format!("bad uniform grid: r_max={r_max}, dr={dr}")));
        }
        // never coarser than requested
        let n = (r_max / dr).ceil() as usize;
        let dr = r_max / n as f64;
        Ok(RadialGrid {
            r: (1..=n).map(|j| j as f64 * dr).collect(),
            spacing: Spacing::Uniform,
        })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.r[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// Trapezoid weights matching the node vector.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.r.len();
        let mut w = vec![0.0; n];
        for i in 0..n.saturating_sub(1) {
            let dh = self.r[i + 1] - self.r[i];
            w[i] += 0.5 * dh;
            w[i + 1] += 0.5 * dh;
        }
        w
    }
}

/// Uniform 2D grid with nodes at cell centers, symmetric about the origin:
/// x_i = (i + 1/2 - n/2) * dx for i = 0..n. No node sits on either axis when
/// `n` is even, which keeps reflection symmetry exact and poles off-node.
#[derive(Debug, Clone)]
pub struct CartesianGrid {
    pub n: usize,
    pub dx: f64,
    pub half_width: f64,
}

impl CartesianGrid {
    pub fn symmetric(half_width: f64, dx_target: f64) -> Result<Self> {
        if half_width <= 0.0 || dx_target <= 0.0 {
            return Err(Error::Parameter("half_width and dx must be positive".into()));
        }
        let mut half_n = (half_width / dx_target).ceil() as usize;
        if half_n == 0 {
            half_n = 1;
        }
        let dx = half_width / half_n as f64;
        Ok(CartesianGrid { n: 2 * half_n, dx, half_width })
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx - self.half_width
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }
}
