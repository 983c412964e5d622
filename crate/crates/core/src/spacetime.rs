//! Time-resolved two-detector coincidences for Gaussian wavepackets and
//! continuous-wave light.
//!
//! Two parameterizations are in use. The photon-pair functions
//! (`hom_*`) work in units where the Gaussian width is one, so `τ`, `δτ` and
//! `1/Δω` are all measured in wavepacket widths. The single-photon plus laser
//! functions (`fs_cs_*`) carry the coherence time `τ_c` of the photon
//! explicitly through [`GaussianMode::width`]. A unit-width result is
//! recovered from the explicit form by setting `τ_c = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Estimate, QuadratureSettings, TAIL_WIDTHS};

/// Anything that can be sampled as a complex mode function `ζ(t)`.
pub trait ModeProfile {
    fn value(&self, t: f64) -> Complex64;

    /// Detection probability density `|ζ(t)|²`.
    fn intensity(&self, t: f64) -> f64 {
        self.value(t).norm_sqr()
    }
}

/// Normalized Gaussian wavepacket
/// `(2/(π w²))^{1/4} exp(-(t-c)²/w² - iωt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMode {
    pub frequency: f64,
    pub center: f64,
    pub width: f64,
}

impl GaussianMode {
    pub fn new(frequency: f64, center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "wavepacket width must be positive, got {width}"
            )));
        }
        if !(frequency.is_finite() && center.is_finite()) {
            return Err(Error::InvalidParameter("wavepacket parameters must be finite".into()));
        }
        Ok(Self {
            frequency,
            center,
            width,
        })
    }

    /// Pair of unit-width wavepackets separated by `delay` and detuned by
    /// `detuning = ω1 - ω2` around the mean frequency `frequency`.
    pub fn unit_pair(delay: f64, detuning: f64, frequency: f64) -> (Self, Self) {
        (
            Self {
                frequency: frequency - detuning / 2.0,
                center: delay / 2.0,
                width: 1.0,
            },
            Self {
                frequency: frequency + detuning / 2.0,
                center: -delay / 2.0,
                width: 1.0,
            },
        )
    }

    fn amplitude(&self) -> f64 {
        (2.0 / (PI * self.width * self.width)).powf(0.25)
    }
}

impl ModeProfile for GaussianMode {
    fn value(&self, t: f64) -> Complex64 {
        let x = (t - self.center) / self.width;
        Complex64::from_polar(self.amplitude() * (-x * x).exp(), -self.frequency * t)
    }
}

/// Monochromatic laser mode `√F e^{-iω t + iθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CwMode {
    pub flux: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl CwMode {
    pub fn new(flux: f64, frequency: f64, phase: f64) -> Result<Self> {
        if !(flux > 0.0 && flux.is_finite()) {
            return Err(Error::InvalidParameter(format!("flux must be positive, got {flux}")));
        }
        if !(frequency.is_finite() && phase.is_finite()) {
            return Err(Error::InvalidParameter("laser parameters must be finite".into()));
        }
        Ok(Self { flux, frequency, phase })
    }
}

impl ModeProfile for CwMode {
    fn value(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.flux.sqrt(), self.phase - self.frequency * t)
    }

    fn intensity(&self, _t: f64) -> f64 {
        self.flux
    }
}

/// Laser pulse with peak flux `F`: `√F exp(-(t-c)²/w²) e^{-iωt + iθ}`.
/// It tends to [`CwMode`] as `w → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulsedMode {
    pub peak_flux: f64,
    pub frequency: f64,
    pub phase: f64,
    pub center: f64,
    pub width: f64,
}

impl PulsedMode {
    pub fn new(peak_flux: f64, frequency: f64, phase: f64, center: f64, width: f64) -> Result<Self> {
        CwMode::new(peak_flux, frequency, phase)?;
        GaussianMode::new(frequency, center, width)?;
        Ok(Self {
            peak_flux,
            frequency,
            phase,
            center,
            width,
        })
    }
}

impl ModeProfile for PulsedMode {
    fn value(&self, t: f64) -> Complex64 {
        let x = (t - self.center) / self.width;
        Complex64::from_polar(self.peak_flux.sqrt() * (-x * x).exp(), self.phase - self.frequency * t)
    }
}

/// Any of the supported mode shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum ModeFunction {
    Gaussian(GaussianMode),
    Cw(CwMode),
    Pulsed(PulsedMode),
}

impl ModeProfile for ModeFunction {
    fn value(&self, t: f64) -> Complex64 {
        match self {
            Self::Gaussian(m) => m.value(t),
            Self::Cw(m) => m.value(t),
            Self::Pulsed(m) => m.value(t),
        }
    }

    fn intensity(&self, t: f64) -> f64 {
        match self {
            Self::Gaussian(m) => m.intensity(t),
            Self::Cw(m) => m.intensity(t),
            Self::Pulsed(m) => m.intensity(t),
        }
    }
}

/// Detection and source timing: first click at `t0`, second at `t0 + τ`,
/// wavepacket delay `δτ`, detuning `Δω` and its inhomogeneous spread `δω`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TimingParams {
    pub t0: f64,
    pub tau: f64,
    pub delay: f64,
    pub detuning: f64,
    pub broadening: f64,
}

impl TimingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.broadening >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "broadening must be non-negative, got {}",
                self.broadening
            )));
        }
        let finite = [self.t0, self.tau, self.delay, self.detuning, self.broadening]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("timing parameters must be finite".into()));
        }
        Ok(())
    }
}

/// `ζ1(t0+τ) ζ2(t0) - ζ2(t0+τ) ζ1(t0)`, the amplitude for one photon from
/// each input to be registered at the two detection times.
pub fn pair_amplitude(t0: f64, tau: f64, z1: &impl ModeProfile, z2: &impl ModeProfile) -> Complex64 {
    z1.value(t0 + tau) * z2.value(t0) - z2.value(t0 + tau) * z1.value(t0)
}

/// Joint detection density for one photon in each input port,
/// `¼ |ζ1(t0+τ) ζ2(t0) - ζ2(t0+τ) ζ1(t0)|²`.
pub fn hom_joint_density(t0: f64, tau: f64, z1: &impl ModeProfile, z2: &impl ModeProfile) -> f64 {
    0.25 * pair_amplitude(t0, tau, z1, z2).norm_sqr()
}

/// Distinguishable-photon limit of [`hom_joint_density`],
/// `¼ (P1(t0+τ) P2(t0) + P2(t0+τ) P1(t0))`.
pub fn hom_incoherent_density(t0: f64, tau: f64, z1: &impl ModeProfile, z2: &impl ModeProfile) -> f64 {
    0.25 * (z1.intensity(t0 + tau) * z2.intensity(t0) + z2.intensity(t0 + tau) * z1.intensity(t0))
}

/// Coincidence density in `τ` after integrating over `t0` (unit widths):
/// `(cosh(2τδτ) - cos(Δωτ)) e^{-(τ²+δτ²)} / (2√π)`.
pub fn hom_total_vs_tau(tau: f64, delay: f64, detuning: f64) -> f64 {
    // cosh(2τδτ) e^{-δτ²-τ²} written as a sum of two Gaussians to avoid overflow
    let cosh_part = 0.5 * ((-(tau - delay).powi(2)).exp() + (-(tau + delay).powi(2)).exp());
    let cos_part = (detuning * tau).cos() * (-(tau * tau + delay * delay)).exp();
    (cosh_part - cos_part) / (2.0 * PI.sqrt())
}

/// [`hom_total_vs_tau`] by adaptive quadrature of [`hom_joint_density`] over `t0`.
pub fn hom_total_vs_tau_quadrature(
    tau: f64,
    delay: f64,
    detuning: f64,
    settings: &QuadratureSettings,
) -> Result<Estimate> {
    let (z1, z2) = GaussianMode::unit_pair(delay, detuning, 0.0);
    let center = -tau / 2.0;
    let half = TAIL_WIDTHS + delay.abs() / 2.0;
    integrate(
        |t0| hom_joint_density(t0, tau, &z1, &z2),
        center - half,
        center + half,
        settings,
    )
}

/// Total coincidence probability with delay `δτ` and a Gaussian spread `δω`
/// of detunings: `1/2 - e^{-δτ²} / √(4 + δω²)`.
pub fn hom_total_broadened(delay: f64, broadening: f64) -> Result<f64> {
    check_broadening(broadening)?;
    Ok(0.5 - (-delay * delay).exp() / (4.0 + broadening * broadening).sqrt())
}

fn check_broadening(broadening: f64) -> Result<()> {
    if !(broadening >= 0.0 && broadening.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "broadening must be finite and non-negative, got {broadening}"
        )));
    }
    Ok(())
}

/// Normalized detuning weight `e^{-(Δω/δω)²} / (δω √π)`.
pub fn detuning_weight(detuning: f64, broadening: f64) -> f64 {
    let x = detuning / broadening;
    (-x * x).exp() / (broadening * PI.sqrt())
}

/// [`hom_total_broadened`] by nested quadrature over `τ` and `Δω`. At
/// `δω = 0` the weight is a delta function and only the `τ` integral remains.
pub fn hom_total_broadened_quadrature(delay: f64, broadening: f64, settings: &QuadratureSettings) -> Result<Estimate> {
    check_broadening(broadening)?;
    let tau_half = TAIL_WIDTHS + delay.abs();
    let inner_settings = QuadratureSettings {
        abs_tol: settings.abs_tol * 1e-2,
        ..*settings
    };
    let over_tau = |detuning: f64| {
        integrate(
            |tau| hom_total_vs_tau(tau, delay, detuning),
            -tau_half,
            tau_half,
            &inner_settings,
        )
    };
    if broadening == 0.0 {
        return over_tau(0.0);
    }
    let inner_error = std::cell::Cell::new(0.0f64);
    let failure = std::cell::RefCell::new(None);
    let outer = integrate(
        |detuning| match over_tau(detuning) {
            Ok(est) => {
                inner_error.set(inner_error.get().max(est.error));
                detuning_weight(detuning, broadening) * est.value
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        -TAIL_WIDTHS * broadening,
        TAIL_WIDTHS * broadening,
        settings,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    Ok(Estimate {
        value: outer.value,
        // the weight integrates to one, so inner errors add at most their max
        error: outer.error + inner_error.get(),
    })
}

/// Coincidence density for a single photon in port 1 and coherent light in
/// port 2, split into the part where both clicks come from the laser and the
/// one-photon-from-each interference part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsCsDensity {
    pub dc_term: f64,
    pub interference_term: f64,
    pub total: f64,
}

fn check_mean(mean: f64) -> Result<()> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mean photon number must be non-negative, got {mean}"
        )));
    }
    Ok(())
}

/// `¼ (P2(t0) P2(t0+τ) n̄² + |ζ1(t0+τ) ζ2(t0) - ζ2(t0+τ) ζ1(t0)|² n̄)`.
pub fn fs_cs_joint_density(
    t0: f64,
    tau: f64,
    mode1: &impl ModeProfile,
    mode2: &impl ModeProfile,
    mean: f64,
) -> Result<FsCsDensity> {
    check_mean(mean)?;
    let dc_term = 0.25 * mode2.intensity(t0) * mode2.intensity(t0 + tau) * mean * mean;
    let interference_term = 0.25 * mean * pair_amplitude(t0, tau, mode1, mode2).norm_sqr();
    Ok(FsCsDensity {
        dc_term,
        interference_term,
        total: dc_term + interference_term,
    })
}

/// Explicit form of the interference part of [`fs_cs_joint_density`] for a
/// Gaussian photon and a CW laser:
/// `½ F n̄ √(2/(π τ_c²)) e^{-τ²/(2τ_c²)} e^{-2u²/τ_c²} (cosh(2τu/τ_c²) - cos(Δωτ))`
/// with `u = t0 + τ/2 - c` and `Δω = ω1 - ω2`.
pub fn fs_cs_interference_density(t0: f64, tau: f64, mode1: &GaussianMode, mode2: &CwMode, mean: f64) -> Result<f64> {
    check_mean(mean)?;
    let tc2 = mode1.width * mode1.width;
    let u = t0 + tau / 2.0 - mode1.center;
    let detuning = mode1.frequency - mode2.frequency;
    // e^{-2u²/τc²} cosh(2τu/τc²) as a sum of two exponentials
    let envelope_cosh =
        0.5 * ((-2.0 * u * u + 2.0 * tau * u) / tc2).exp() + 0.5 * ((-2.0 * u * u - 2.0 * tau * u) / tc2).exp();
    let envelope_cos = (-2.0 * u * u / tc2).exp() * (detuning * tau).cos();
    let pref = 0.5 * mode2.flux * mean * (2.0 / (PI * tc2)).sqrt() * (-tau * tau / (2.0 * tc2)).exp();
    Ok(pref * (envelope_cosh - envelope_cos))
}

/// Closed form of the `t0`-integrated coincidence rate for a Gaussian photon
/// and a CW laser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsCsTotal {
    /// Laser-only background `¼ F n̄²`.
    pub dc_term: f64,
    /// `½ F n̄ (1 - e^{-τ²/(2τ_c²)} cos(Δωτ))`.
    pub interference_term: f64,
    pub total: f64,
}

pub fn fs_cs_total_vs_tau(tau: f64, mode1: &GaussianMode, mode2: &CwMode, mean: f64) -> Result<FsCsTotal> {
    check_mean(mean)?;
    let f = mode2.flux;
    let tc = mode1.width;
    let detuning = mode1.frequency - mode2.frequency;
    let dc_term = 0.25 * f * mean * mean;
    let interference_term = 0.5 * f * mean * (1.0 - (-tau * tau / (2.0 * tc * tc)).exp() * (detuning * tau).cos());
    Ok(FsCsTotal {
        dc_term,
        interference_term,
        total: dc_term + interference_term,
    })
}

/// `t0`-integral of the interference part of [`fs_cs_joint_density`] by
/// adaptive quadrature. The laser-only part is not integrable for CW light
/// and is left out.
pub fn fs_cs_interference_quadrature(
    tau: f64,
    mode1: &GaussianMode,
    mode2: &impl ModeProfile,
    mean: f64,
    settings: &QuadratureSettings,
) -> Result<Estimate> {
    check_mean(mean)?;
    let center = mode1.center - tau / 2.0;
    let half = TAIL_WIDTHS * mode1.width + tau.abs() / 2.0;
    integrate(
        |t0| 0.25 * mean * pair_amplitude(t0, tau, mode1, mode2).norm_sqr(),
        center - half,
        center + half,
        settings,
    )
}
