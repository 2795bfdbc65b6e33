//! Declarative experiment configuration (TOML) and its content digest.

use crate::error::{Error, Result};
use crate::operator::{CutoffBump, ResolventSign};
use crate::potential::PotentialSpec;
use crate::resolvent::{EpsPolicy, GeometryPolicy};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
    pub potential: PotentialSpec,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
}

fn default_seed() -> u64 {
    1
}

fn default_threads() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub count: usize,
    #[serde(default = "default_eps")]
    pub eps_relative: f64,
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default = "default_sign")]
    pub sign: String,
}

fn default_eps() -> f64 {
    1e-6
}

fn default_method() -> String {
    "radial_modes".into()
}

fn default_sign() -> String {
    "minus".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryConfig {
    #[serde(default = "default_ppw")]
    pub points_per_wavelength: f64,
    #[serde(default = "default_domain")]
    pub domain_radius: f64,
    #[serde(default = "default_lw")]
    pub layer_wavelengths: f64,
    #[serde(default = "default_la")]
    pub layer_amplitude: f64,
    #[serde(default = "default_chi1")]
    pub chi_one: f64,
    #[serde(default = "default_chi0")]
    pub chi_zero: f64,
}

fn default_ppw() -> f64 {
    10.0
}
fn default_domain() -> f64 {
    2.0
}
fn default_lw() -> f64 {
    2.0
}
fn default_la() -> f64 {
    2.0
}
fn default_chi1() -> f64 {
    0.8
}
fn default_chi0() -> f64 {
    1.2
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            points_per_wavelength: default_ppw(),
            domain_radius: default_domain(),
            layer_wavelengths: default_lw(),
            layer_amplitude: default_la(),
            chi_one: default_chi1(),
            chi_zero: default_chi0(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct DiagnosticsConfig {
    #[serde(default)]
    pub husimi: bool,
    #[serde(default)]
    pub flux: bool,
    #[serde(default)]
    pub weighted_norms: bool,
    #[serde(default)]
    pub mode_split: bool,
    #[serde(default = "default_nu_tilde")]
    pub nu_tilde: f64,
    #[serde(default = "default_qlambda")]
    pub quasimode_lambda: f64,
    #[serde(default = "default_band")]
    pub forcing_band: usize,
}

fn default_nu_tilde() -> f64 {
    4.0
}
fn default_qlambda() -> f64 {
    400.0
}
fn default_band() -> usize {
    24
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("schema violation: {e}")))?;
        cfg.validate_schema()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn validate_schema(&self) -> Result<()> {
        if self.sweep.count == 0 {
            return Err(Error::Config("sweep.count must be positive".into()));
        }
        if self.sweep.lambda_min < 4.0 || self.sweep.lambda_max < self.sweep.lambda_min {
            return Err(Error::Config(
                "need 4 <= lambda_min <= lambda_max in [sweep]".into(),
            ));
        }
        if !(self.geometry.chi_one < self.geometry.chi_zero
            && self.geometry.chi_zero <= self.geometry.domain_radius)
        {
            return Err(Error::Config(
                "need chi_one < chi_zero <= domain_radius in [geometry]".into(),
            ));
        }
        match self.sweep.method.as_str() {
            "radial_modes" | "cartesian" | "cartesian_sectors" => {}
            m => return Err(Error::Config(format!("unknown sweep method `{m}`"))),
        }
        match self.sweep.sign.as_str() {
            "plus" | "minus" => {}
            s => return Err(Error::Config(format!("unknown resolvent sign `{s}`"))),
        }
        self.potential.check_geometry()?;
        Ok(())
    }

    /// Geometric ladder of sweep frequencies.
    pub fn lambdas(&self) -> Vec<f64> {
        let n = self.sweep.count;
        if n == 1 {
            return vec![self.sweep.lambda_min];
        }
        let ratio = (self.sweep.lambda_max / self.sweep.lambda_min).powf(1.0 / (n - 1) as f64);
        (0..n)
            .map(|i| self.sweep.lambda_min * ratio.powi(i as i32))
            .collect()
    }

    pub fn geometry_policy(&self) -> Result<GeometryPolicy> {
        Ok(GeometryPolicy {
            points_per_wavelength: self.geometry.points_per_wavelength,
            domain_radius: self.geometry.domain_radius,
            layer_wavelengths: self.geometry.layer_wavelengths,
            layer_amplitude: self.geometry.layer_amplitude,
            chi: CutoffBump::new(self.geometry.chi_one, self.geometry.chi_zero)?,
        })
    }

    pub fn eps_policy(&self) -> EpsPolicy {
        EpsPolicy { relative: self.sweep.eps_relative }
    }

    pub fn sign(&self) -> ResolventSign {
        if self.sweep.sign == "plus" {
            ResolventSign::Plus
        } else {
            ResolventSign::Minus
        }
    }

    /// FNV-1a content hash of the canonical serialized form.
    pub fn digest(&self) -> String {
        let canon = serde_json::to_string(self).unwrap_or_default();
        format!("{:016x}", fnv1a(canon.as_bytes()))
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 42
threads = 1

[potential]
dimension = 2
hardy_constant = 1.0
bound_constant = 1.0
gradient_constant = 2.0
background = { kind = "zero" }

[[potential.poles]]
position = [0.0, 0.0]
profile = "inverse_square"
a = 1.0
cutoff_radius = 0.3

[sweep]
lambda_min = 100.0
lambda_max = 1600.0
count = 5

[geometry]
domain_radius = 1.4
chi_one = 1.0
chi_zero = 1.3
"#;

    #[test]
    fn parses_and_digests() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.potential.poles.len(), 1);
        assert_eq!(cfg.lambdas().len(), 5);
        assert!((cfg.lambdas()[4] - 1600.0).abs() < 1e-9);
        let d1 = cfg.digest();
        let d2 = ExperimentConfig::from_toml(SAMPLE).unwrap().digest();
        assert_eq!(d1, d2);
        // digest is sensitive to content
        let mut cfg2 = cfg.clone();
        cfg2.seed = 43;
        assert_ne!(cfg2.digest(), d1);
    }

    #[test]
    fn schema_violations_are_reported() {
        let bad = SAMPLE.replace("lambda_min = 100.0", "lambda_min = 1.0");
        assert!(matches!(
            ExperimentConfig::from_toml(&bad),
            Err(Error::Config(_))
        ));
        let bad = SAMPLE.replace("count = 5", "count = 0");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = SAMPLE.replace("profile = \"inverse_square\"", "profile = \"no_such\"");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn angular_table_roundtrip() {
        let with_angular = SAMPLE.replace(
            "cutoff_radius = 0.3",
            "cutoff_radius = 0.3\nangular = [0.5, 0.6, 0.7, 0.6]",
        );
        let cfg = ExperimentConfig::from_toml(&with_angular).unwrap();
        assert_eq!(cfg.potential.poles[0].angular.as_ref().unwrap().len(), 4);
    }
}
