//! Single-mode photon-number states and their product composition.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ln_factorial;

/// Default bound on the probability discarded above the cutoff.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;
/// Default hard ceiling on the number-basis cutoff.
pub const DEFAULT_CUTOFF_CEILING: usize = 4096;
/// Slack allowed on the normalization of stored states.
pub const NORMALIZATION_SLACK: f64 = 1e-12;

/// Cutoff policy applied when truncating a state with unbounded support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub tolerance: f64,
    pub ceiling: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TAIL_TOLERANCE,
            ceiling: DEFAULT_CUTOFF_CEILING,
        }
    }
}

impl Truncation {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail tolerance must lie in (0, 1), got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StateKind {
    Fock { n: u32 },
    Coherent { beta: Complex64 },
    Thermal { mean: f64 },
    CustomPure,
    CustomMixed,
}

/// Number-basis representation up to the cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NumberBasis {
    /// Amplitudes `c_k`.
    Pure(Vec<Complex64>),
    /// Diagonal density matrix `p_k`.
    Mixed(Vec<f64>),
}

/// A truncated single-mode photon state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonState {
    kind: StateKind,
    basis: NumberBasis,
    tail_mass: f64,
}

impl PhotonState {
    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    pub fn basis(&self) -> &NumberBasis {
        &self.basis
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.basis, NumberBasis::Pure(_))
    }

    /// Largest stored photon number.
    pub fn cutoff(&self) -> usize {
        self.len() - 1
    }

    fn len(&self) -> usize {
        match &self.basis {
            NumberBasis::Pure(c) => c.len(),
            NumberBasis::Mixed(p) => p.len(),
        }
    }

    /// Probability discarded above the cutoff.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Photon-number distribution `P(k)` for `k ≤ cutoff`.
    pub fn probabilities(&self) -> Vec<f64> {
        match &self.basis {
            NumberBasis::Pure(c) => c.iter().map(|x| x.norm_sqr()).collect(),
            NumberBasis::Mixed(p) => p.clone(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.probabilities().iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let probs = self.probabilities();
        let mean = self.mean();
        probs
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - mean).powi(2) * p)
            .sum()
    }

    /// True if every populated number state has an odd photon number.
    pub fn has_odd_parity(&self) -> bool {
        self.probabilities()
            .iter()
            .enumerate()
            .all(|(k, &p)| p == 0.0 || k % 2 == 1)
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match &self.kind {
            StateKind::Fock { n } => format!("fock(n={n})"),
            StateKind::Coherent { beta } => {
                format!("coherent(beta={}{:+}i, mean={})", beta.re, beta.im, beta.norm_sqr())
            }
            StateKind::Thermal { mean } => format!("thermal(mean={mean})"),
            StateKind::CustomPure => format!("custom-pure(cutoff={})", self.cutoff()),
            StateKind::CustomMixed => format!("custom-mixed(cutoff={})", self.cutoff()),
        }
    }
}

/// The Fock state `|n⟩`.
pub fn make_fock(n: u32) -> PhotonState {
    let mut amps = vec![Complex64::new(0.0, 0.0); n as usize + 1];
    amps[n as usize] = Complex64::new(1.0, 0.0);
    PhotonState {
        kind: StateKind::Fock { n },
        basis: NumberBasis::Pure(amps),
        tail_mass: 0.0,
    }
}

/// Chooses the smallest cutoff `M` whose tail `Σ_{k>M} p_k` is below the
/// tolerance. `probs` must extend far enough that its own tail is negligible.
fn choose_cutoff(probs: &[f64], trunc: &Truncation) -> Result<(usize, f64)> {
    // suffix[i] = Σ_{k ≥ i} p_k, accumulated from the small end
    let mut suffix = vec![0.0; probs.len() + 1];
    for i in (0..probs.len()).rev() {
        suffix[i] = suffix[i + 1] + probs[i];
    }
    let cutoff = (0..probs.len())
        .find(|&m| suffix[m + 1] < trunc.tolerance)
        .ok_or(Error::CutoffExceeded {
            required: probs.len(),
            ceiling: trunc.ceiling,
        })?;
    if cutoff > trunc.ceiling {
        return Err(Error::CutoffExceeded {
            required: cutoff,
            ceiling: trunc.ceiling,
        });
    }
    Ok((cutoff, suffix[cutoff + 1]))
}

/// The coherent state `|β⟩ = e^{-|β|²/2} Σ β^m/√m! |m⟩`, truncated so that
/// the discarded Poisson tail is below the tolerance.
pub fn make_coherent(beta: Complex64, trunc: &Truncation) -> Result<PhotonState> {
    trunc.validate()?;
    if !beta.re.is_finite() || !beta.im.is_finite() {
        return Err(Error::InvalidParameter("β must be finite".into()));
    }
    let mean = beta.norm_sqr();
    if mean == 0.0 {
        return Ok(PhotonState {
            kind: StateKind::Coherent { beta },
            basis: NumberBasis::Pure(vec![Complex64::new(1.0, 0.0)]),
            tail_mass: 0.0,
        });
    }
    let ln_abs = beta.norm().ln();
    let phase = beta.arg();
    let ln_prob = |k: usize| -mean + 2.0 * k as f64 * ln_abs - ln_factorial(k as u64);

    // Extend past the mode until terms are far below anything that matters.
    let limit = trunc.ceiling + 1;
    let mut probs = Vec::new();
    for k in 0.. {
        let p = ln_prob(k).exp();
        probs.push(p);
        if (k as f64 > mean && p < trunc.tolerance * 1e-20) || k > 2 * limit + 64 {
            break;
        }
    }
    let (cutoff, tail) = choose_cutoff(&probs, trunc)?;
    let amps = (0..=cutoff)
        .map(|k| Complex64::from_polar((0.5 * ln_prob(k)).exp(), k as f64 * phase))
        .collect();
    Ok(PhotonState {
        kind: StateKind::Coherent { beta },
        basis: NumberBasis::Pure(amps),
        tail_mass: tail,
    })
}

/// The thermal state with geometric distribution `n̄^k / (1+n̄)^(k+1)`.
pub fn make_thermal(mean: f64, trunc: &Truncation) -> Result<PhotonState> {
    trunc.validate()?;
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "thermal mean must be finite and non-negative, got {mean}"
        )));
    }
    if mean == 0.0 {
        return Ok(PhotonState {
            kind: StateKind::Thermal { mean },
            basis: NumberBasis::Mixed(vec![1.0]),
            tail_mass: 0.0,
        });
    }
    // Tail beyond M is x^(M+1) with x = n̄/(1+n̄).
    let ln_x = mean.ln() - mean.ln_1p();
    let needed = (trunc.tolerance.ln() / ln_x).ceil();
    let cutoff = (needed as usize).saturating_sub(1);
    if cutoff > trunc.ceiling {
        return Err(Error::CutoffExceeded {
            required: cutoff,
            ceiling: trunc.ceiling,
        });
    }
    let mut cutoff = cutoff;
    while ((cutoff + 1) as f64 * ln_x).exp() >= trunc.tolerance {
        cutoff += 1;
    }
    let probs = (0..=cutoff).map(|k| (k as f64 * ln_x - mean.ln_1p()).exp()).collect();
    Ok(PhotonState {
        kind: StateKind::Thermal { mean },
        basis: NumberBasis::Mixed(probs),
        tail_mass: ((cutoff + 1) as f64 * ln_x).exp(),
    })
}

/// A user-supplied pure state; the missing norm is booked as tail mass.
pub fn make_custom_pure(amplitudes: Vec<Complex64>, trunc: &Truncation) -> Result<PhotonState> {
    trunc.validate()?;
    if amplitudes.is_empty() {
        return Err(Error::InvalidParameter(
            "custom state needs at least one amplitude".into(),
        ));
    }
    let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let tail = check_norm(norm, trunc)?;
    Ok(PhotonState {
        kind: StateKind::CustomPure,
        basis: NumberBasis::Pure(amplitudes),
        tail_mass: tail,
    })
}

/// A user-supplied diagonal mixed state.
pub fn make_custom_mixed(probabilities: Vec<f64>, trunc: &Truncation) -> Result<PhotonState> {
    trunc.validate()?;
    if probabilities.is_empty() {
        return Err(Error::InvalidParameter(
            "custom state needs at least one probability".into(),
        ));
    }
    if let Some(p) = probabilities.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
        return Err(Error::InvalidParameter(format!("invalid probability {p}")));
    }
    let norm: f64 = probabilities.iter().sum();
    let tail = check_norm(norm, trunc)?;
    Ok(PhotonState {
        kind: StateKind::CustomMixed,
        basis: NumberBasis::Mixed(probabilities),
        tail_mass: tail,
    })
}

fn check_norm(norm: f64, trunc: &Truncation) -> Result<f64> {
    if !norm.is_finite() || norm > 1.0 + NORMALIZATION_SLACK {
        return Err(Error::InvalidParameter(format!("state norm {norm} exceeds 1")));
    }
    let tail = (1.0 - norm).max(0.0);
    if tail > trunc.tolerance {
        return Err(Error::TailTooLarge {
            tail,
            tolerance: trunc.tolerance,
        });
    }
    Ok(tail)
}

/// Product input `ρ1 ⊗ ρ2` to the two beamsplitter ports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteInput {
    pub mode1: PhotonState,
    pub mode2: PhotonState,
}

impl BipartiteInput {
    pub fn new(mode1: PhotonState, mode2: PhotonState) -> Self {
        Self { mode1, mode2 }
    }

    /// Upper bound on the probability lost to truncating either mode.
    pub fn truncation_bound(&self) -> f64 {
        let kept = (1.0 - self.mode1.tail_mass) * (1.0 - self.mode2.tail_mass);
        1.0 - kept
    }

    pub fn describe(&self) -> String {
        format!("{} ⊗ {}", self.mode1.describe(), self.mode2.describe())
    }
}
