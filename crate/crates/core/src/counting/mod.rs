//! Multi-photon counting with finite detector efficiency: normal-ordered
//! counting probabilities for a single photon in port 1 and a laser in port 2,
//! resolved in detection time.
//!
//! The two detectors see `c = (ζ1(t0) a1 - ζ2(t0) a2)/√2` at time `t0` and
//! `d = (ζ1(t0+τ) a1 + ζ2(t0+τ) a2)/√2` at time `t0 + τ`. With
//! `X = ζ1(t0) ζ2(t0+τ)`, `Y = ζ1(t0+τ) ζ2(t0)` and `p = η n̄ F / 2` the
//! counting probability is
//!
//! ```text
//! P(N1, N2) = p^{N1+N2}/(N1! N2!) Σ_{k,l} (-p)^{k+l}/(k! l!)
//!             [1 + |(N1+k) X - (N2+l) Y|² / (F² n̄)]
//! ```
//!
//! which is evaluated both as a truncated series with a certified remainder
//! and through the Poisson moments `Σ k^j (-p)^k/k!`.
//!
//! Detector timing jitter is not modelled. Resolving the `τ` dependence needs
//! jitter well below `τ_c`; current detectors reach roughly 15-25 ps.

mod oracle;

pub use oracle::operator_oracle;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bernoulli_weight, ln_factorial, CompensatedSum};
use crate::spacetime::{CwMode, GaussianMode, ModeProfile};

/// Mode-function values at the two detection times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSamples {
    pub z1_t0: Complex64,
    pub z1_t0tau: Complex64,
    pub z2_t0: Complex64,
    pub z2_t0tau: Complex64,
}

impl ModeSamples {
    pub fn at(mode1: &impl ModeProfile, mode2: &impl ModeProfile, t0: f64, tau: f64) -> Self {
        Self {
            z1_t0: mode1.value(t0),
            z1_t0tau: mode1.value(t0 + tau),
            z2_t0: mode2.value(t0),
            z2_t0tau: mode2.value(t0 + tau),
        }
    }

    /// `ζ ≡ 1`: the detectors see the plain beamsplitter output modes.
    pub fn monochromatic() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            z1_t0: one,
            z1_t0tau: one,
            z2_t0: one,
            z2_t0tau: one,
        }
    }

    /// Detector 1 sees mode 1 alone (`c = a1`) and detector 2 sees nothing.
    pub fn single_port() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            z1_t0: Complex64::new(std::f64::consts::SQRT_2, 0.0),
            z1_t0tau: zero,
            z2_t0: zero,
            z2_t0tau: zero,
        }
    }

    /// `X = ζ1(t0) ζ2(t0+τ)`.
    pub fn x(&self) -> Complex64 {
        self.z1_t0 * self.z2_t0tau
    }

    /// `Y = ζ1(t0+τ) ζ2(t0)`.
    pub fn y(&self) -> Complex64 {
        self.z1_t0tau * self.z2_t0
    }

    /// The two-photon amplitude `ζ1(t0+τ) ζ2(t0) - ζ1(t0) ζ2(t0+τ)`.
    pub fn hom_amplitude(&self) -> Complex64 {
        self.y() - self.x()
    }
}

/// Temporal profile of the single photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum PhotonProfile {
    Gaussian(GaussianMode),
    /// `ζ1 ≡ 1`, so that `P1(t) = 1`.
    Monochromatic,
}

impl ModeProfile for PhotonProfile {
    fn value(&self, t: f64) -> Complex64 {
        match self {
            Self::Gaussian(m) => m.value(t),
            Self::Monochromatic => Complex64::new(1.0, 0.0),
        }
    }
}

/// Stopping rule for the `(k, l)` double series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSettings {
    /// Stop once the remainder bound is below this fraction of the sum.
    pub rel_tol: f64,
    /// Largest total order `k + l` attempted.
    pub max_order: usize,
}

impl Default for SeriesSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_order: 5000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingParams {
    pub eta: f64,
    pub n1: u32,
    pub n2: u32,
    pub t0: f64,
    pub tau: f64,
    pub mode1: PhotonProfile,
    pub mode2: CwMode,
    /// Mean photon number `n̄` of the coherent state.
    pub mean: f64,
    pub series: SeriesSettings,
}

impl CountingParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidParameter(format!(
                "efficiency {} outside [0, 1]",
                self.eta
            )));
        }
        if !(self.mean >= 0.0 && self.mean.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mean must be non-negative, got {}",
                self.mean
            )));
        }
        if !(self.t0.is_finite() && self.tau.is_finite()) {
            return Err(Error::InvalidParameter("detection times must be finite".into()));
        }
        if !(self.mode2.flux > 0.0 && self.mode2.flux.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "flux must be positive, got {}",
                self.mode2.flux
            )));
        }
        if !(self.series.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("series tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn samples(&self) -> ModeSamples {
        ModeSamples::at(&self.mode1, &self.mode2, self.t0, self.tau)
    }

    /// `p = η n̄ P2(t0) / 2`.
    pub fn p(&self) -> f64 {
        0.5 * self.eta * self.mean * self.mode2.intensity(self.t0)
    }

    /// `P1(t0) = |ζ1(t0)|²`.
    pub fn p1(&self) -> f64 {
        self.mode1.intensity(self.t0)
    }

    pub fn with_counts(&self, n1: u32, n2: u32) -> Self {
        Self { n1, n2, ..*self }
    }
}

fn check_distribution(dist: &[f64]) -> Result<()> {
    if let Some(p) = dist.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
        return Err(Error::InvalidParameter(format!("invalid probability {p}")));
    }
    let total: f64 = dist.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!("distribution sums to {total} > 1")));
    }
    Ok(())
}

/// Probability of registering `n` photons from a mode with number
/// distribution `dist` behind a detector of efficiency `eta`.
pub fn single_mode_counting(dist: &[f64], eta: f64, n: usize) -> Result<f64> {
    check_distribution(dist)?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!("efficiency {eta} outside [0, 1]")));
    }
    Ok(dist
        .iter()
        .enumerate()
        .skip(n)
        .map(|(big, p)| p * bernoulli_weight(big as u64, n as u64, eta))
        .sum())
}

/// The full registered-count distribution `P_η(n)` for `n ≤ dist.len() - 1`.
pub fn registered_distribution(dist: &[f64], eta: f64) -> Result<Vec<f64>> {
    (0..dist.len()).map(|n| single_mode_counting(dist, eta, n)).collect()
}

/// Mean registered count `Σ n P_η(n)`.
pub fn registered_mean(dist: &[f64], eta: f64) -> Result<f64> {
    Ok(registered_distribution(dist, eta)?
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum())
}

fn poisson(k: u32, p: f64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * p.ln() - p - ln_factorial(k as u64)).exp()
}

/// Contribution in which every registered photon comes from the laser:
/// a product of two Poisson distributions of mean `p = η n̄ P2(t0)/2`.
pub fn fs_cs_dc_term(n1: u32, n2: u32, eta: f64, t0: f64, mean: f64, mode2: &CwMode) -> f64 {
    let p = 0.5 * eta * mean * mode2.intensity(t0);
    poisson(n1, p) * poisson(n2, p)
}

/// Laser-only and interference parts of a counting probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingTerms {
    pub dc_term: f64,
    pub interference_term: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingResult {
    /// Truncated-series value.
    pub series: CountingTerms,
    /// Certified bound on `|series.total - exact|`, remainder plus rounding.
    pub series_error_bound: f64,
    /// Highest total order `k + l` summed.
    pub orders: usize,
    /// Poisson-moment evaluation of the same sums.
    pub closed_form: CountingTerms,
}

impl CountingResult {
    pub fn total(&self) -> f64 {
        self.series.total
    }
}

struct Prefactors {
    /// `ln(p^{N1+N2} / (N1! N2!))`, or `None` when `p = 0`.
    ln_p: Option<f64>,
    p: f64,
    /// `p / n̄ = η F / 2`, kept separate so `n̄ = 0` stays finite.
    q: f64,
    flux: f64,
    lnf: f64,
}

impl Prefactors {
    fn new(params: &CountingParams) -> Self {
        let p = params.p();
        let flux = params.mode2.intensity(params.t0);
        Self {
            ln_p: (p > 0.0).then(|| p.ln()),
            p,
            q: 0.5 * params.eta * flux,
            flux,
            lnf: ln_factorial(params.n1 as u64) + ln_factorial(params.n2 as u64),
        }
    }

    /// `p^j / (N1! N2! k! l!)`.
    fn dc(&self, j: u32, ln_kl: f64) -> f64 {
        match self.ln_p {
            Some(lp) => (j as f64 * lp - self.lnf - ln_kl).exp(),
            None if j == 0 => (-self.lnf - ln_kl).exp(),
            None => 0.0,
        }
    }

    /// `p^j / (n̄ F² N1! N2! k! l!)` for `j ≥ 1`, written as `q p^{j-1} / F²`.
    fn interference(&self, j: u32, ln_kl: f64) -> f64 {
        if j == 0 {
            return 0.0;
        }
        let base = self.q / (self.flux * self.flux);
        match self.ln_p {
            Some(lp) => base * ((j - 1) as f64 * lp - self.lnf - ln_kl).exp(),
            None if j == 1 => base * (-self.lnf - ln_kl).exp(),
            None => 0.0,
        }
    }
}

/// Series and closed-form evaluation of the counting probability
/// `P_η(N1, N2)` for a single photon plus coherent light.
///
/// The series is summed over triangles `k + l ≤ J`. The remainder past order
/// `J` is bounded by `v(J+1)/(1-ρ)` where `v(s)` majorizes the absolute sum
/// of order `s` and `ρ` bounds the ratio of successive `v`. Summation stops
/// once that bound falls below `rel_tol · max(|sum|, Σ|terms|)`. The two
/// evaluation routes must agree within the combined error budget.
pub fn fs_cs_counting_joint(params: &CountingParams) -> Result<CountingResult> {
    params.validate()?;
    let s = params.samples();
    let (x, y) = (s.x(), s.y());
    let pre = Prefactors::new(params);
    let (n1, n2) = (params.n1, params.n2);
    let big_a = n1 + n2;
    let max_xy = x.norm().max(y.norm());

    let mut dc = CompensatedSum::default();
    let mut inter = CompensatedSum::default();
    let mut order = 0usize;
    let mut remainder;
    loop {
        let s_ord = order as u32;
        let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
        let j = big_a + s_ord;
        for k in 0..=s_ord {
            let l = s_ord - k;
            let ln_kl = ln_factorial(k as u64) + ln_factorial(l as u64);
            let a = (n1 + k) as f64;
            let b = (n2 + l) as f64;
            dc.add(sign * pre.dc(j, ln_kl));
            let bracket = (x * a - y * b).norm_sqr();
            if bracket != 0.0 {
                inter.add(sign * pre.interference(j, ln_kl) * bracket);
            }
        }
        // majorant for the next order and the ratio bound beyond it
        let next = s_ord + 1;
        let jn = big_a + next;
        let ln_shell = next as f64 * std::f64::consts::LN_2 - ln_factorial(next as u64);
        let shell = pre.dc(jn, -ln_shell) + pre.interference(jn, -ln_shell) * (jn as f64 * max_xy).powi(2);
        let jn_f = jn as f64;
        let rho = 2.0 * pre.p / (next + 1) as f64 * ((jn_f + 1.0) / jn_f).powi(2);
        remainder = if shell == 0.0 {
            0.0
        } else if rho < 1.0 {
            shell / (1.0 - rho)
        } else {
            f64::INFINITY
        };
        let magnitude = dc.magnitude() + inter.magnitude();
        let scale = (dc.value() + inter.value()).abs().max(magnitude);
        if remainder <= params.series.rel_tol * scale {
            break;
        }
        if order >= params.series.max_order {
            return Err(Error::SeriesNotConverged {
                terms: order,
                bound: remainder,
            });
        }
        order += 1;
    }
    let rounding = 16.0 * f64::EPSILON * (dc.magnitude() + inter.magnitude());
    let series = CountingTerms {
        dc_term: dc.value(),
        interference_term: inter.value(),
        total: dc.value() + inter.value(),
    };
    let series_error_bound = remainder + rounding;

    let (closed_form, closed_scale) = closed_form_terms(params, &pre, x, y);
    let allowed = series_error_bound + 64.0 * f64::EPSILON * closed_scale;
    if (series.total - closed_form.total).abs() > allowed {
        return Err(Error::RoutesDisagree {
            first: series.total,
            second: closed_form.total,
            allowed,
        });
    }
    Ok(CountingResult {
        series,
        series_error_bound,
        orders: order,
        closed_form,
    })
}

/// Poisson-moment route: with `S_j(N) = Σ_k (N+k)^j (-p)^k/k!`,
/// `S_0 = e^{-p}`, `S_1 = (N-p) e^{-p}`, `S_2 = ((N-p)² - p) e^{-p}`, the
/// bracket sums to `e^{-2p} [ |(N1-p) X - (N2-p) Y|² - p (|X|² + |Y|²) ]`.
/// Also returns a magnitude scale for rounding estimates.
fn closed_form_terms(params: &CountingParams, pre: &Prefactors, x: Complex64, y: Complex64) -> (CountingTerms, f64) {
    let (n1, n2) = (params.n1, params.n2);
    let p = pre.p;
    let dc_term = poisson(n1, p) * poisson(n2, p);
    let e2p = (-2.0 * p).exp();
    let base = pre.q / (pre.flux * pre.flux);
    let big_a = n1 + n2;
    let (interference_term, scale) = if big_a == 0 {
        // p^{-1} · p (p|X-Y|² - |X|² - |Y|²)
        let inner = p * (x - y).norm_sqr() - x.norm_sqr() - y.norm_sqr();
        let scale = p * (x.norm() + y.norm()).powi(2) + x.norm_sqr() + y.norm_sqr();
        (base * e2p * inner, base * e2p * scale)
    } else {
        let ln_part = match pre.ln_p {
            Some(lp) => ((big_a - 1) as f64 * lp - pre.lnf).exp(),
            None if big_a == 1 => (-pre.lnf).exp(),
            None => 0.0,
        };
        let (a, b) = (n1 as f64 - p, n2 as f64 - p);
        let inner = (x * a - y * b).norm_sqr() - p * (x.norm_sqr() + y.norm_sqr());
        let scale = (x.norm() * a.abs() + y.norm() * b.abs()).powi(2) + p * (x.norm_sqr() + y.norm_sqr());
        (base * ln_part * e2p * inner, base * ln_part * e2p * scale)
    };
    (
        CountingTerms {
            dc_term,
            interference_term,
            total: dc_term + interference_term,
        },
        dc_term + scale,
    )
}

/// Counting probabilities for `0 ≤ N1, N2 ≤ max_count`, row-major in `N1`.
pub fn fs_cs_counting_matrix(params: &CountingParams, max_count: u32) -> Result<Vec<Vec<CountingResult>>> {
    (0..=max_count)
        .map(|n1| {
            (0..=max_count)
                .map(|n2| fs_cs_counting_joint(&params.with_counts(n1, n2)))
                .collect()
        })
        .collect()
}

/// Diagonal counting probability at zero detection delay,
/// `η² n̄/(4N²) (p^{N-1}/(N-1)!)² e^{-2p} P2² n̄ [1 - η P1(t0)]`.
pub fn diagonal_tau0(n: u32, eta: f64, t0: f64, params: &CountingParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("diagonal counts start at N = 1".into()));
    }
    let params = CountingParams {
        eta,
        t0,
        tau: 0.0,
        n1: n,
        n2: n,
        ..*params
    };
    params.validate()?;
    let p = params.p();
    let p2 = params.mode2.intensity(t0);
    let mean = params.mean;
    let nf = n as f64;
    let ln_pow = if p > 0.0 {
        (n - 1) as f64 * p.ln() - ln_factorial((n - 1) as u64)
    } else if n == 1 {
        0.0
    } else {
        return Ok(0.0);
    };
    Ok(
        eta * eta * mean / (4.0 * nf * nf)
            * (2.0 * ln_pow - 2.0 * p).exp()
            * p2
            * p2
            * mean
            * (1.0 - eta * params.p1()),
    )
}

/// `|(N2+l) ζ1(t0+τ) ζ2(t0) - (N1+k) ζ1(t0) ζ2(t0+τ)|²`.
pub fn interference_bracket(n1: u32, n2: u32, k: u32, l: u32, s: &ModeSamples) -> f64 {
    (s.y() * (n2 + l) as f64 - s.x() * (n1 + k) as f64).norm_sqr()
}

/// The same bracket at `N1 = N2 = N` written around the two-photon amplitude
/// `A`: `|N A + l ζ1(t0+τ) ζ2(t0) - k ζ1(t0) ζ2(t0+τ)|²`.
pub fn diagonal_bracket(n: u32, k: u32, l: u32, s: &ModeSamples) -> f64 {
    (s.hom_amplitude() * n as f64 + s.y() * l as f64 - s.x() * k as f64).norm_sqr()
}
