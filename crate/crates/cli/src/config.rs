//! Scenario files, TOML or JSON. Unknown keys are rejected.

use std::path::Path;

use ehom_core::counting::{CountingParams, PhotonProfile, SeriesSettings};
use ehom_core::states::DEFAULT_CUTOFF_CEILING;
use ehom_core::{
    make_coherent, make_custom_mixed, make_custom_pure, make_fock, make_thermal, BipartiteInput, CwMode, DetectorModel,
    GaussianMode, PhotonState, ScatteringMatrix, Truncation,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModeSpec {
    Fock {
        n: u32,
    },
    Coherent {
        mean: f64,
        #[serde(default)]
        phase: f64,
    },
    Thermal {
        mean: f64,
    },
    /// Amplitudes as `[re, im]` pairs.
    CustomPure {
        amplitudes: Vec<[f64; 2]>,
    },
    CustomMixed {
        probabilities: Vec<f64>,
    },
}

impl ModeSpec {
    pub fn build(&self, trunc: &Truncation) -> ehom_core::Result<PhotonState> {
        match self {
            Self::Fock { n } => Ok(make_fock(*n)),
            Self::Coherent { mean, phase } => {
                if !(*mean >= 0.0) {
                    return Err(ehom_core::Error::InvalidParameter(format!(
                        "mean must be non-negative, got {mean}"
                    )));
                }
                make_coherent(Complex64::from_polar(mean.sqrt(), *phase), trunc)
            }
            Self::Thermal { mean } => make_thermal(*mean, trunc),
            Self::CustomPure { amplitudes } => make_custom_pure(
                amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
                trunc,
            ),
            Self::CustomMixed { probabilities } => make_custom_mixed(probabilities.clone(), trunc),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    #[serde(default = "one")]
    pub eta1: f64,
    #[serde(default = "one")]
    pub eta2: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeModel {
    /// One photon per port, coincidence density against `τ`.
    Hom,
    /// One photon per port with Gaussian detuning spread.
    HomBroadened,
    /// One photon and a laser.
    FsCs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    Tau,
    Delay,
    Detuning,
    Broadening,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::Tau => "tau",
            Self::Delay => "delay",
            Self::Detuning => "detuning",
            Self::Broadening => "broadening",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    /// `steps + 1` evenly spaced points from `start` to `stop`.
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 0 {
            return vec![self.start];
        }
        (0..=self.steps)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / self.steps as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeScanSpec {
    pub model: TimeModel,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub delay: f64,
    #[serde(default)]
    pub detuning: f64,
    #[serde(default)]
    pub broadening: f64,
    /// Photon coherence time, single-photon/laser model only.
    #[serde(default = "one")]
    pub coherence_time: f64,
    #[serde(default = "one")]
    pub flux: f64,
    #[serde(default = "one")]
    pub mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Gaussian,
    Monochromatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountingSpec {
    pub eta: f64,
    pub mean: f64,
    #[serde(default = "one")]
    pub flux: f64,
    #[serde(default = "one")]
    pub coherence_time: f64,
    #[serde(default)]
    pub detuning: f64,
    #[serde(default)]
    pub t0: f64,
    #[serde(default)]
    pub tau: f64,
    pub max_count: u32,
    #[serde(default = "gaussian")]
    pub profile: ProfileKind,
}

fn gaussian() -> ProfileKind {
    ProfileKind::Gaussian
}

impl CountingSpec {
    pub fn params(&self, rel_tol: Option<f64>) -> ehom_core::Result<CountingParams> {
        let mode1 = match self.profile {
            ProfileKind::Gaussian => {
                PhotonProfile::Gaussian(GaussianMode::new(self.detuning, 0.0, self.coherence_time)?)
            }
            ProfileKind::Monochromatic => PhotonProfile::Monochromatic,
        };
        let mut series = SeriesSettings::default();
        if let Some(tol) = rel_tol {
            series.rel_tol = tol;
        }
        let params = CountingParams {
            eta: self.eta,
            n1: 0,
            n2: 0,
            t0: self.t0,
            tau: self.tau,
            mode1,
            mode2: CwMode::new(self.flux, 0.0, 0.0)?,
            mean: self.mean,
            series,
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode1: Option<ModeSpec>,
    pub mode2: Option<ModeSpec>,
    /// Beamsplitter transmission `t`; balanced when absent.
    pub transmission: Option<f64>,
    pub detector: Option<DetectorSpec>,
    /// Largest output photon number kept in matrix outputs.
    pub cutoff: Option<usize>,
    /// Tail-mass tolerance for state truncation, or relative tolerance of the
    /// counting series.
    pub tolerance: Option<f64>,
    pub time_scan: Option<TimeScanSpec>,
    pub counting: Option<CountingSpec>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        let de = toml::Deserializer::parse(text).map_err(|e| e.to_string())?;
        serde_path_to_error::deserialize(de).map_err(|e| describe(e.path().to_string(), e.inner()))
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| describe(e.path().to_string(), e.inner()))
    }

    pub fn truncation(&self) -> Result<Truncation, CliError> {
        match self.tolerance {
            None => Ok(Truncation::default()),
            Some(t) if t > 0.0 && t < 1.0 => Ok(Truncation {
                tolerance: t,
                ceiling: DEFAULT_CUTOFF_CEILING,
            }),
            Some(t) => Err(CliError::Config(format!("tolerance must lie in (0, 1), got {t}"))),
        }
    }

    pub fn splitter(&self) -> Result<ScatteringMatrix, CliError> {
        match self.transmission {
            None => Ok(ScatteringMatrix::balanced()),
            Some(t) => Ok(ScatteringMatrix::from_transmission(t)?),
        }
    }

    pub fn detector_model(&self) -> Result<Option<DetectorModel>, CliError> {
        self.detector
            .map(|d| DetectorModel::new(d.eta1, d.eta2).map_err(CliError::from))
            .transpose()
    }

    pub fn input(&self) -> Result<BipartiteInput, CliError> {
        let trunc = self.truncation()?;
        let mode1 = self
            .mode1
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [mode1]".into()))?;
        let mode2 = self
            .mode2
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [mode2]".into()))?;
        Ok(BipartiteInput::new(mode1.build(&trunc)?, mode2.build(&trunc)?))
    }
}

fn describe(path: String, inner: &impl std::fmt::Display) -> String {
    if path == "." {
        inner.to_string()
    } else {
        format!("at `{path}`: {inner}")
    }
}
