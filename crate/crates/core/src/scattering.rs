//! Scattering amplitudes of Fock states at a lossless two-port beamsplitter.
//!
//! Input creation operators scatter as
//!
//! ```text
//! a1† → S11 b1† + S21 b2†      (S11 = t, S21 = r)
//! a2† → S12 b1† + S22 b2†      (S12 = -r, S22 = t)
//! ```
//!
//! so `S_ij` is the amplitude for an input photon in mode `j` to leave in
//! output mode `i`. A scattering diagram is labelled by `k`, the number of
//! mode-1 photons that stay in mode 1; the amplitude `⟨Na,Nb|U|n,m⟩` is the
//! sum of the diagram amplitudes `A_k`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rational_from_ratio, ExactAmplitude, ScaledAmplitude};
use crate::numeric::{binomial_big, factorial_big, ln_binomial, ln_factorial};

/// Tolerance on `t² + r² = 1` for floating-point matrices.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// The real antisymmetric 2×2 beamsplitter matrix
/// `[[t, -r], [r, t]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringMatrix {
    t: f64,
    r: f64,
    #[serde(skip)]
    exact: Option<(ExactAmplitude, ExactAmplitude)>,
}

impl ScatteringMatrix {
    /// The 50:50 beamsplitter, `t = r = 1/√2`, carried exactly.
    pub fn balanced() -> Self {
        let s = ExactAmplitude::inv_sqrt2();
        Self {
            t: std::f64::consts::FRAC_1_SQRT_2,
            r: std::f64::consts::FRAC_1_SQRT_2,
            exact: Some((s.clone(), s)),
        }
    }

    /// A floating-point beamsplitter. Fails unless `t² + r² = 1` to 1e-12.
    pub fn new(t: f64, r: f64) -> Result<Self> {
        if !t.is_finite() || !r.is_finite() {
            return Err(Error::InvalidParameter("t and r must be finite".into()));
        }
        let defect = (t * t + r * r - 1.0).abs();
        if defect > UNITARITY_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "t² + r² = {} is not 1 (defect {defect:e})",
                t * t + r * r
            )));
        }
        Ok(Self { t, r, exact: None })
    }

    /// Transmission amplitude `t ∈ [-1, 1]`, reflection `r = √(1 - t²)`.
    pub fn from_transmission(t: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("transmission {t} outside [-1, 1]")));
        }
        Self::new(t, (1.0 - t * t).sqrt())
    }

    /// An exactly representable beamsplitter, e.g. `t = 3/5, r = 4/5`.
    pub fn exact(t: ExactAmplitude, r: ExactAmplitude) -> Result<Self> {
        if &t.square() + &r.square() != ExactAmplitude::one() {
            return Err(Error::InvalidParameter(format!("t² + r² ≠ 1 for t = {t}, r = {r}")));
        }
        Ok(Self {
            t: t.to_f64(),
            r: r.to_f64(),
            exact: Some((t, r)),
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_balanced(&self) -> bool {
        match &self.exact {
            Some((t, r)) => *t == ExactAmplitude::inv_sqrt2() && *r == ExactAmplitude::inv_sqrt2(),
            None => false,
        }
    }

    /// `[[S11, S12], [S21, S22]]`.
    pub fn entries(&self) -> [[f64; 2]; 2] {
        [[self.t, -self.r], [self.r, self.t]]
    }

    /// Largest violation of the three unitarity relations of `S`.
    pub fn unitarity_defect(&self) -> f64 {
        let [[s11, s12], [s21, s22]] = self.entries();
        let rows = (s11 * s11 + s12 * s12 - 1.0).abs();
        let cols = (s21 * s21 + s22 * s22 - 1.0).abs();
        let cross = (s11 * s12 + s21 * s22).abs();
        rows.max(cols).max(cross)
    }

    pub(crate) fn exact_entries(&self) -> Option<&(ExactAmplitude, ExactAmplitude)> {
        self.exact.as_ref()
    }
}

impl Default for ScatteringMatrix {
    fn default() -> Self {
        Self::balanced()
    }
}

/// Powers of the four matrix elements appearing in one diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exponents {
    pub s11: u32,
    pub s21: u32,
    pub s12: u32,
    pub s22: u32,
}

/// One scattering diagram: `k` of the `n` mode-1 photons transmit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScatteringDiagram {
    pub k: u32,
    pub n: u32,
    pub m: u32,
    pub na: u32,
    pub nb: u32,
    pub exponents: Exponents,
    /// `C(n, k) · C(m, Na - k)`.
    pub multiplicity: BigUint,
    /// `Na! Nb! / (n! m!)`, shared by every diagram of the same transition.
    pub normalization_sq: BigRational,
}

impl ScatteringDiagram {
    /// `C_k²`, the squared combinatorial factor.
    pub fn combinatorial_factor_sq(&self) -> BigRational {
        let mult = BigRational::from_integer(BigInt::from(self.multiplicity.clone()));
        &mult * &mult * &self.normalization_sq
    }

    pub fn combinatorial_factor(&self) -> f64 {
        self.multiplicity.to_f64().unwrap_or(f64::INFINITY) * self.normalization_sq.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// `(-1)^(exponent of S12)`.
    pub fn sign(&self) -> i8 {
        if self.exponents.s12.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Exact amplitude `C_k S11^a S21^b S12^c S22^d`; `None` if the matrix
    /// is only known in floating point.
    pub fn amplitude_exact(&self, s: &ScatteringMatrix) -> Option<ScaledAmplitude> {
        let (t, r) = s.exact_entries()?;
        let e = self.exponents;
        let mut coeff = ExactAmplitude::from_integer(BigInt::from(self.multiplicity.clone()));
        coeff = &coeff * &t.pow(e.s11 + e.s22);
        coeff = &coeff * &r.pow(e.s21 + e.s12);
        if self.sign() < 0 {
            coeff = -coeff;
        }
        Some(ScaledAmplitude::new(coeff, self.normalization_sq.clone()))
    }

    pub fn amplitude_f64(&self, s: &ScatteringMatrix) -> f64 {
        if let Some(a) = self.amplitude_exact(s) {
            return a.to_f64();
        }
        let e = self.exponents;
        let ln_mag = ln_binomial(self.n as u64, self.k as u64)
            + ln_binomial(self.m as u64, e.s12 as u64)
            + 0.5 * ln_normalization(self.n, self.m, self.na, self.nb);
        let pow = s.t().powi((e.s11 + e.s22) as i32) * s.r().powi((e.s21 + e.s12) as i32);
        self.sign() as f64 * ln_mag.exp() * pow
    }
}

impl fmt::Display for ScatteringDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.exponents;
        write!(
            f,
            "k={}: S11^{} S21^{} S12^{} S22^{}, C_k² = {}",
            self.k,
            e.s11,
            e.s21,
            e.s12,
            e.s22,
            self.combinatorial_factor_sq()
        )
    }
}

fn ln_normalization(n: u32, m: u32, na: u32, nb: u32) -> f64 {
    ln_factorial(na as u64) + ln_factorial(nb as u64) - ln_factorial(n as u64) - ln_factorial(m as u64)
}

fn check_conservation(n: u32, m: u32, na: u32, nb: u32) -> Result<()> {
    let input = n as u64 + m as u64;
    let output = na as u64 + nb as u64;
    if input != output {
        return Err(Error::NotConserved { input, output });
    }
    Ok(())
}

/// Range of admissible `k` (inclusive) for a conserving transition.
fn k_range(n: u32, m: u32, na: u32) -> (u32, u32) {
    (na.saturating_sub(m), n.min(na))
}

/// All scattering diagrams for `|n,m⟩ → |Na,Nb⟩`, in ascending `k`.
pub fn enumerate_diagrams(n: u32, m: u32, na: u32, nb: u32) -> Result<Vec<ScatteringDiagram>> {
    check_conservation(n, m, na, nb)?;
    let normalization_sq = rational_from_ratio(
        factorial_big(na as u64) * factorial_big(nb as u64),
        factorial_big(n as u64) * factorial_big(m as u64),
    );
    let (lo, hi) = k_range(n, m, na);
    let diagrams = (lo..=hi)
        .map(|k| {
            let j = na - k;
            ScatteringDiagram {
                k,
                n,
                m,
                na,
                nb,
                exponents: Exponents {
                    s11: k,
                    s21: n - k,
                    s12: j,
                    s22: m - j,
                },
                multiplicity: binomial_big(n as u64, k as u64) * binomial_big(m as u64, j as u64),
                normalization_sq: normalization_sq.clone(),
            }
        })
        .collect();
    Ok(diagrams)
}

/// `⟨Na,Nb|U|n,m⟩`, exact when the matrix is exactly representable.
#[derive(Debug, Clone, PartialEq)]
pub enum Amplitude {
    Exact(ScaledAmplitude),
    Real(f64),
}

impl Amplitude {
    pub fn to_f64(&self) -> f64 {
        match self {
            Amplitude::Exact(a) => a.to_f64(),
            Amplitude::Real(x) => *x,
        }
    }

    /// Exact zero test; `None` for floating-point amplitudes.
    pub fn is_exact_zero(&self) -> Option<bool> {
        match self {
            Amplitude::Exact(a) => Some(a.is_zero()),
            Amplitude::Real(_) => None,
        }
    }

    pub fn as_exact(&self) -> Option<&ScaledAmplitude> {
        match self {
            Amplitude::Exact(a) => Some(a),
            Amplitude::Real(_) => None,
        }
    }
}

/// Transition amplitude `⟨Na,Nb|U|n,m⟩` at the beamsplitter `s`.
///
/// Returns an exact zero when photon number is not conserved.
pub fn bs_amplitude(n: u32, m: u32, na: u32, nb: u32, s: &ScatteringMatrix) -> Amplitude {
    if check_conservation(n, m, na, nb).is_err() {
        return match s.is_exact() {
            true => Amplitude::Exact(ScaledAmplitude::zero()),
            false => Amplitude::Real(0.0),
        };
    }
    let diagrams = enumerate_diagrams(n, m, na, nb).expect("conservation checked");
    if s.is_exact() {
        let mut coeff = ExactAmplitude::zero();
        for d in &diagrams {
            let a = d.amplitude_exact(s).expect("exact matrix");
            coeff = &coeff + &a.coefficient;
        }
        let scale = diagrams
            .first()
            .map(|d| d.normalization_sq.clone())
            .unwrap_or_else(BigRational::one);
        Amplitude::Exact(ScaledAmplitude::new(coeff, scale))
    } else {
        Amplitude::Real(AmplitudeKernel::new(s).amplitude(n, m, na, nb))
    }
}

/// Floating-point transition amplitudes, evaluated in log space so that
/// photon numbers in the hundreds do not overflow.
///
/// Terms are accumulated in mirror order `(lo, hi), (lo+1, hi-1), …`: at a
/// balanced beamsplitter the two members of a mirror pair are bitwise
/// negatives of each other for odd-odd coincidences, so those amplitudes come
/// out as exact floating-point zeros.
#[derive(Debug, Clone)]
pub struct AmplitudeKernel {
    t: f64,
    r: f64,
    ln_t: f64,
    ln_r: f64,
    balanced: bool,
}

impl AmplitudeKernel {
    pub fn new(s: &ScatteringMatrix) -> Self {
        Self {
            t: s.t(),
            r: s.r(),
            ln_t: s.t().abs().ln(),
            ln_r: s.r().abs().ln(),
            balanced: s.is_balanced(),
        }
    }

    pub fn amplitude(&self, n: u32, m: u32, na: u32, nb: u32) -> f64 {
        if n as u64 + m as u64 != na as u64 + nb as u64 {
            return 0.0;
        }
        let (lo, hi) = k_range(n, m, na);
        if lo > hi {
            return 0.0;
        }
        let half_norm = 0.5 * ln_normalization(n, m, na, nb);
        let term = |k: u32| -> f64 {
            let j = na - k;
            let t_pow = k + (m - j);
            let r_pow = (n - k) + j;
            let ln_mag = if self.balanced {
                // every diagram carries (1/√2)^(n+m)
                ln_binomial(n as u64, k as u64) + ln_binomial(m as u64, j as u64) + half_norm
                    - 0.5 * (n + m) as f64 * std::f64::consts::LN_2
            } else {
                if (self.t == 0.0 && t_pow > 0) || (self.r == 0.0 && r_pow > 0) {
                    return 0.0;
                }
                ln_binomial(n as u64, k as u64)
                    + ln_binomial(m as u64, j as u64)
                    + half_norm
                    + if t_pow > 0 { t_pow as f64 * self.ln_t } else { 0.0 }
                    + if r_pow > 0 { r_pow as f64 * self.ln_r } else { 0.0 }
            };
            let mut sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
            if self.t < 0.0 && t_pow % 2 == 1 {
                sign = -sign;
            }
            if self.r < 0.0 && r_pow % 2 == 1 {
                sign = -sign;
            }
            sign * ln_mag.exp()
        };
        let mut total = 0.0;
        let (mut a, mut b) = (lo, hi);
        while a < b {
            total += term(a) + term(b);
            a += 1;
            b -= 1;
        }
        if a == b {
            total += term(a);
        }
        total
    }
}

/// One mirror-image pair `(k, n-k)` of diagrams for the coincident output.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorPair {
    pub k: u32,
    pub partner: u32,
    pub amplitude_k: ScaledAmplitude,
    pub amplitude_partner: ScaledAmplitude,
    pub sum: ScaledAmplitude,
}

impl MirrorPair {
    /// Equal magnitude and opposite sign.
    pub fn cancels(&self) -> bool {
        self.sum.is_zero()
    }

    /// Equal magnitude and equal sign.
    pub fn reinforces(&self) -> bool {
        self.amplitude_k.signum() == self.amplitude_partner.signum()
            && self.amplitude_k.same_magnitude(&self.amplitude_partner)
    }
}

/// Pairing of the diagrams contributing to `|n,m⟩ → |(n+m)/2, (n+m)/2⟩` at
/// the balanced beamsplitter.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorReport {
    pub n: u32,
    pub m: u32,
    pub output: u32,
    pub diagrams: Vec<ScatteringDiagram>,
    pub pairs: Vec<MirrorPair>,
    pub unpaired_middle: Option<(u32, ScaledAmplitude)>,
    pub total: ScaledAmplitude,
}

impl MirrorReport {
    pub fn all_pairs_cancel(&self) -> bool {
        self.pairs.iter().all(MirrorPair::cancels)
    }
}

/// Groups the coincidence diagrams of `|n,m⟩` (`n ≤ m`, `n + m` even) into
/// mirror pairs `(k, n-k)` and evaluates each pair sum exactly.
pub fn mirror_pair_check(n: u32, m: u32) -> Result<MirrorReport> {
    let total_photons = n as u64 + m as u64;
    if total_photons % 2 == 1 {
        return Err(Error::NoCoincidentOutput(total_photons));
    }
    if n > m {
        return Err(Error::InvalidParameter(format!(
            "mirror pairing expects n ≤ m, got n = {n}, m = {m}"
        )));
    }
    let s = ScatteringMatrix::balanced();
    let output = (n + m) / 2;
    let diagrams = enumerate_diagrams(n, m, output, output)?;
    let amps: Vec<ScaledAmplitude> = diagrams
        .iter()
        .map(|d| d.amplitude_exact(&s).expect("balanced matrix is exact"))
        .collect();
    // With n ≤ m every k in 0..=n is admissible, so index == k.
    debug_assert_eq!(amps.len(), n as usize + 1);

    let pairs = (0..n.div_ceil(2))
        .map(|k| {
            let partner = n - k;
            let a = amps[k as usize].clone();
            let b = amps[partner as usize].clone();
            let sum = a.checked_add(&b).expect("common normalization");
            MirrorPair {
                k,
                partner,
                amplitude_k: a,
                amplitude_partner: b,
                sum,
            }
        })
        .collect();
    let unpaired_middle = n.is_multiple_of(2).then(|| (n / 2, amps[(n / 2) as usize].clone()));
    let total = amps
        .iter()
        .try_fold(ScaledAmplitude::zero(), |acc, a| acc.checked_add(a))
        .expect("common normalization");

    Ok(MirrorReport {
        n,
        m,
        output,
        diagrams,
        pairs,
        unpaired_middle,
        total,
    })
}

/// Total probability carried by the output states of one transition.
#[derive(Debug, Clone, PartialEq)]
pub enum Probability {
    Exact(ExactAmplitude),
    Real(f64),
}

impl Probability {
    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(p) => p.to_f64(),
            Probability::Real(p) => *p,
        }
    }
}

/// Σ |⟨Na,Nb|U|n,m⟩|² over the output states with `Na + Nb = n + m`,
/// exact at an exactly representable beamsplitter.
pub fn total_output_probability(n: u32, m: u32, s: &ScatteringMatrix) -> Probability {
    let total = n + m;
    if s.is_exact() {
        let mut acc = ExactAmplitude::zero();
        for na in 0..=total {
            if let Amplitude::Exact(a) = bs_amplitude(n, m, na, total - na, s) {
                acc = &acc + &a.probability();
            }
        }
        Probability::Exact(acc)
    } else {
        let kernel = AmplitudeKernel::new(s);
        Probability::Real(
            (0..=total)
                .map(|na| kernel.amplitude(n, m, na, total - na).powi(2))
                .sum(),
        )
    }
}
