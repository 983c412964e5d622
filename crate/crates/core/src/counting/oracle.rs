//! Brute-force counting probabilities from explicit operator matrices on the
//! truncated two-mode Fock space.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::ModeSamples;
use crate::distributions::DetectorModel;
use crate::error::{Error, Result};
use crate::numeric::ln_factorial;
use crate::states::{BipartiteInput, NumberBasis, PhotonState, DEFAULT_TAIL_TOLERANCE};

fn annihilation(dim: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Weighted pure vectors whose mixture is the state.
fn pure_parts(state: &PhotonState) -> Vec<(f64, DVector<Complex64>)> {
    let dim = state.cutoff() + 1;
    match state.basis() {
        NumberBasis::Pure(amps) => {
            let mut v = DVector::zeros(dim);
            for (n, c) in amps.iter().enumerate() {
                v[n] = *c;
            }
            vec![(1.0, v)]
        }
        NumberBasis::Mixed(probs) => probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(n, p)| {
                let mut v = DVector::zeros(dim);
                v[n] = Complex64::new(1.0, 0.0);
                (*p, v)
            })
            .collect(),
    }
}

/// `P(N1, N2)` from the normal-ordered counting formula
///
/// ```text
/// η1^N1 η2^N2 / (N1! N2!) Σ_{k,l} (-η1)^k (-η2)^l / (k! l!) <c†^{N1+k} d†^{N2+l} d^{N2+l} c^{N1+k}>
/// ```
///
/// with `c`, `d` built as dense matrices. The sum is finite on the truncated
/// space. Inputs whose truncation tail exceeds `1e-10` are rejected.
pub fn operator_oracle(
    input: &BipartiteInput,
    samples: &ModeSamples,
    detector: &DetectorModel,
    n1: u32,
    n2: u32,
) -> Result<f64> {
    let tail = input.truncation_bound();
    if tail > DEFAULT_TAIL_TOLERANCE {
        return Err(Error::TailTooLarge {
            tail,
            tolerance: DEFAULT_TAIL_TOLERANCE,
        });
    }
    let d1 = input.mode1.cutoff() + 1;
    let d2 = input.mode2.cutoff() + 1;
    let a = annihilation(d1);
    let b = annihilation(d2);
    let a1 = a.kronecker(&DMatrix::identity(d2, d2));
    let a2 = DMatrix::<Complex64>::identity(d1, d1).kronecker(&b);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = (&a1 * samples.z1_t0 - &a2 * samples.z2_t0) * Complex64::new(s, 0.0);
    let d = (&a1 * samples.z1_t0tau + &a2 * samples.z2_t0tau) * Complex64::new(s, 0.0);

    let max_photons = (d1 - 1) + (d2 - 1);
    let (eta1, eta2) = (detector.eta1(), detector.eta2());
    let mut total = 0.0;
    for (w1, v1) in pure_parts(&input.mode1) {
        for (w2, v2) in pure_parts(&input.mode2) {
            let psi = v1.kronecker(&v2);
            // moments M(a, b) = ‖c^a d^b ψ‖² for a ≥ N1, b ≥ N2
            let mut sum = 0.0;
            let mut db = psi.clone();
            for bb in 0..=max_photons {
                if bb as u32 >= n2 {
                    let l = bb as u32 - n2;
                    let mut ca = db.clone();
                    for aa in 0..=max_photons - bb {
                        if aa as u32 >= n1 {
                            let k = aa as u32 - n1;
                            let m = ca.norm_squared();
                            if m == 0.0 {
                                break;
                            }
                            sum += weight(eta1, n1, k) * weight(eta2, n2, l) * m;
                        }
                        ca = &c * ca;
                    }
                }
                db = &d * db;
            }
            total += w1 * w2 * sum;
        }
    }
    Ok(total)
}

/// `η^N (-η)^k / (N! k!)`.
fn weight(eta: f64, n: u32, k: u32) -> f64 {
    let j = n + k;
    if eta == 0.0 {
        return if j == 0 { 1.0 } else { 0.0 };
    }
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (j as f64 * eta.ln() - ln_factorial(n as u64) - ln_factorial(k as u64)).exp()
}
