use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::currents::{CurrentQuadrature, BATTERY_LABELS};
use crate::disc::{ArcUnion, OuterMethod, DEFAULT_ORDER};
use crate::hull::{ExampleSet, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    K1,
    K,
    K2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleParams {
    pub eps: f64,
    /// Defaults to the largest entry of `nus`.
    pub nu_max: Option<usize>,
    pub grid: usize,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self { eps: 0.1, nu_max: None, grid: 8192 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoletskyParams {
    pub rho_u: f64,
    pub boundary_grid: usize,
    pub interior_grid: usize,
}

impl Default for PoletskyParams {
    fn default() -> Self {
        Self { rho_u: 0.05, boundary_grid: 8192, interior_grid: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertificateParams {
    pub max_degree: usize,
    pub verify_samples: usize,
}

impl Default for CertificateParams {
    fn default() -> Self {
        Self { max_degree: 64, verify_samples: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObstructionParams {
    pub trials: usize,
    pub delta: f64,
    pub z0: Complex64,
}

impl Default for ObstructionParams {
    fn default() -> Self {
        Self { trials: 500, delta: 0.2, z0: Complex64::new(0.0, 0.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Uniform,
    Poisson { z0: Complex64 },
    /// a_0, a_1, … of a real trigonometric polynomial density.
    Trig { coefficients: Vec<Complex64> },
    /// Pushforward of ω_𝔻(z0, ·)|_arc under the boundary values of g.
    GPushforward { z0: Complex64, arc: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AveragingParams {
    pub measure: MeasureSpec,
    pub nus: Vec<usize>,
    pub k_max: usize,
    pub order: usize,
    pub grid: usize,
}

impl Default for AveragingParams {
    fn default() -> Self {
        Self {
            measure: MeasureSpec::Poisson { z0: Complex64::new(0.4, 0.0) },
            nus: (1..=16).collect(),
            k_max: 8,
            order: 4096,
            grid: 16384,
        }
    }
}

/// One experiment description, read from a JSON file. Every field has a
/// default, so `{}` is the default experiment: z0 = 0, I = I₊ and
/// ν = 1, 2, 4, …, 256.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub arcs: ArcUnion,
    pub point: Point2,
    pub nus: Vec<usize>,
    pub schedule: ScheduleParams,
    pub g_method: OuterMethod,
    pub truncation_order: usize,
    pub quadrature: CurrentQuadrature,
    pub poletsky: PoletskyParams,
    pub battery: Vec<String>,
    pub seed: u64,
    pub grid_scale: f64,
    pub certificate: CertificateParams,
    pub obstruction: ObstructionParams,
    pub averaging: AveragingParams,
    pub out_dir: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            variant: Variant::K,
            arcs: ArcUnion::upper_half(),
            point: Point2::origin(),
            nus: (0..=8).map(|k| 1 << k).collect(),
            schedule: ScheduleParams::default(),
            g_method: OuterMethod::ClosedFormIplus,
            truncation_order: DEFAULT_ORDER,
            quadrature: CurrentQuadrature::default(),
            poletsky: PoletskyParams::default(),
            battery: BATTERY_LABELS.iter().map(|s| s.to_string()).collect(),
            seed: 42,
            grid_scale: 1.0,
            certificate: CertificateParams::default(),
            obstruction: ObstructionParams::default(),
            averaging: AveragingParams::default(),
            out_dir: None,
        }
    }
}

/// How the target point is reached by discs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscRoute {
    /// p = (z0, 0) with |z0| < 1.
    Composite,
    /// p = (z0, w0) with z0 ∈ Ī and |w0| < 1.
    Vertical,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn example_set(&self) -> ExampleSet {
        match self.variant {
            Variant::K1 => ExampleSet::K1,
            Variant::K => ExampleSet::k(self.arcs.clone()),
            Variant::K2 => ExampleSet::K2,
        }
    }

    /// The arc union I of the set (I₊ for K2).
    pub fn effective_arcs(&self) -> ArcUnion {
        match self.variant {
            Variant::K2 => ArcUnion::upper_half(),
            _ => self.arcs.clone(),
        }
    }

    fn scale(&self, n: usize) -> usize {
        ((n as f64 * self.grid_scale).round() as usize).max(16)
    }

    pub fn scaled_quadrature(&self) -> CurrentQuadrature {
        self.quadrature.scaled(self.grid_scale)
    }

    pub fn schedule_grid(&self) -> usize {
        self.scale(self.schedule.grid)
    }

    pub fn poletsky_grids(&self) -> (usize, usize) {
        (self.scale(self.poletsky.boundary_grid), self.scale(self.poletsky.interior_grid))
    }

    pub fn verify_samples(&self) -> usize {
        self.scale(self.certificate.verify_samples)
    }

    pub fn averaging_grid(&self) -> usize {
        self.scale(self.averaging.grid)
    }

    pub fn nu_max(&self) -> usize {
        self.schedule.nu_max.unwrap_or_else(|| self.nus.iter().copied().max().unwrap_or(1))
    }

    /// Checks shared by all subcommands.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !(self.grid_scale > 0.0 && self.grid_scale.is_finite()) {
            return bad(format!("grid_scale {} must be positive", self.grid_scale));
        }
        if !self.point.is_finite() {
            return bad("target point is not finite".into());
        }
        if self.g_method == OuterMethod::ClosedFormIplus && self.effective_arcs() != ArcUnion::upper_half() {
            return bad("g_method closed_form_iplus needs arcs = I+ = [[0, pi]]".into());
        }
        if self.g_method == OuterMethod::Fourier && self.truncation_order < 64 {
            return bad(format!("truncation_order {} < 64", self.truncation_order));
        }
        Ok(())
    }

    /// Checks for the convergence experiment, and the disc route they imply.
    pub fn validate_converge(&self) -> Result<DiscRoute, HarnessError> {
        self.validate()?;
        if self.variant == Variant::K1 {
            return Err(HarnessError::Config("Poletsky disc families are built for K(I) and K2 only".into()));
        }
        if self.nus.is_empty() {
            return Err(HarnessError::Config("the nu list is empty".into()));
        }
        if self.nus.contains(&0) || self.nus.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config("the nu list must be strictly increasing positive integers".into()));
        }
        if self.nu_max() < *self.nus.last().unwrap() {
            return Err(HarnessError::Config("schedule.nu_max is below the largest nu".into()));
        }
        if !(self.schedule.eps > 0.0) {
            return Err(HarnessError::Config("schedule.eps must be positive".into()));
        }
        let p = self.point;
        if p.w.norm() == 0.0 && p.z.norm() < 1.0 {
            Ok(DiscRoute::Composite)
        } else if self.effective_arcs().closure_contains_point(p.z, 1e-12) && p.w.norm() < 1.0 {
            Ok(DiscRoute::Vertical)
        } else {
            Err(HarnessError::Config(format!(
                "target {:?} is neither in 𝔻×{{0}} nor in Ī×𝔻 for this set",
                p
            )))
        }
    }

    /// Hex SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
