//! Joint output photon-number distributions, detector efficiency and
//! central-nodal-line detection.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bernoulli_weight, ln_factorial};
use crate::scattering::{AmplitudeKernel, ScatteringMatrix};
use crate::states::{BipartiteInput, NumberBasis, PhotonState};

/// Slack added to the truncation bound when deciding whether a diagonal entry
/// is a genuine zero.
pub const DEFAULT_CNL_SLACK: f64 = 1e-12;

/// Matrix `P(m_a, m_b)` of output photon numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    probabilities: Vec<Vec<f64>>,
    truncation_bound: f64,
    provenance: String,
}

impl JointDistribution {
    /// Builds a distribution from rows indexed by `m_a`, each indexed by `m_b`.
    pub fn new(probabilities: Vec<Vec<f64>>, truncation_bound: f64, provenance: String) -> Result<Self> {
        let cols = probabilities.first().map_or(0, Vec::len);
        if cols == 0 || probabilities.iter().any(|row| row.len() != cols) {
            return Err(Error::InvalidParameter(
                "distribution rows must be non-empty and of equal length".into(),
            ));
        }
        if let Some(p) = probabilities.iter().flatten().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidParameter(format!("invalid probability {p}")));
        }
        if !(0.0..=1.0).contains(&truncation_bound) {
            return Err(Error::InvalidParameter(format!(
                "invalid truncation bound {truncation_bound}"
            )));
        }
        Ok(Self {
            probabilities,
            truncation_bound,
            provenance,
        })
    }

    pub fn rows(&self) -> usize {
        self.probabilities.len()
    }

    pub fn cols(&self) -> usize {
        self.probabilities[0].len()
    }

    /// `P(m_a, m_b)`, zero outside the stored grid.
    pub fn get(&self, ma: usize, mb: usize) -> f64 {
        self.probabilities
            .get(ma)
            .and_then(|row| row.get(mb))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.probabilities
    }

    /// Upper bound on the probability missing from the matrix.
    pub fn truncation_bound(&self) -> f64 {
        self.truncation_bound
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().flatten().sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows().min(self.cols()))
            .map(|i| self.probabilities[i][i])
            .collect()
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        self.probabilities.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        (0..self.cols())
            .map(|j| self.probabilities.iter().map(|row| row[j]).sum())
            .collect()
    }

    pub fn mean_a(&self) -> f64 {
        weighted_mean(&self.marginal_a())
    }

    pub fn mean_b(&self) -> f64 {
        weighted_mean(&self.marginal_b())
    }

    /// Restricts the grid to `m_a, m_b ≤ max`, booking the dropped mass into
    /// the truncation bound.
    pub fn truncated(&self, max: usize) -> Self {
        let rows = self.rows().min(max + 1);
        let cols = self.cols().min(max + 1);
        let probabilities: Vec<Vec<f64>> = self.probabilities[..rows]
            .iter()
            .map(|row| row[..cols].to_vec())
            .collect();
        let kept: f64 = probabilities.iter().flatten().sum();
        let dropped = (self.total() - kept).max(0.0);
        Self {
            probabilities,
            truncation_bound: (self.truncation_bound + dropped).min(1.0),
            provenance: self.provenance.clone(),
        }
    }
}

fn weighted_mean(p: &[f64]) -> f64 {
    p.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
}

/// Per-port detector efficiencies for the Bernoulli loss model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    eta1: f64,
    eta2: f64,
}

impl DetectorModel {
    pub fn new(eta1: f64, eta2: f64) -> Result<Self> {
        for eta in [eta1, eta2] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::InvalidParameter(format!("efficiency {eta} outside [0, 1]")));
            }
        }
        Ok(Self { eta1, eta2 })
    }

    pub fn equal(eta: f64) -> Result<Self> {
        Self::new(eta, eta)
    }

    pub fn perfect() -> Self {
        Self { eta1: 1.0, eta2: 1.0 }
    }

    pub fn eta1(&self) -> f64 {
        self.eta1
    }

    pub fn eta2(&self) -> f64 {
        self.eta2
    }
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self::perfect()
    }
}

/// A number-basis component of a state: either the full pure superposition
/// or one Fock term of a diagonal mixture.
struct Component {
    weight: f64,
    terms: Vec<(u32, Complex64)>,
}

fn components(state: &PhotonState) -> Vec<Component> {
    match state.basis() {
        NumberBasis::Pure(amps) => vec![Component {
            weight: 1.0,
            terms: amps
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm_sqr() > 0.0)
                .map(|(n, c)| (n as u32, *c))
                .collect(),
        }],
        NumberBasis::Mixed(probs) => probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(n, p)| Component {
                weight: *p,
                terms: vec![(n as u32, Complex64::new(1.0, 0.0))],
            })
            .collect(),
    }
}

fn describe_matrix(s: &ScatteringMatrix) -> String {
    if s.is_balanced() {
        "balanced".to_string()
    } else {
        format!("t={}, r={}", s.t(), s.r())
    }
}

/// Output distribution `P(m_a, m_b)` for a product input.
///
/// Pure components are superposed coherently, diagonal mixtures are averaged
/// incoherently. The grid is square with side `cutoff1 + cutoff2 + 1`.
pub fn joint_distribution(input: &BipartiteInput, s: &ScatteringMatrix) -> JointDistribution {
    let kernel = AmplitudeKernel::new(s);
    let dim = input.mode1.cutoff() + input.mode2.cutoff() + 1;
    let mut probs = vec![vec![0.0; dim]; dim];
    let comps1 = components(&input.mode1);
    let comps2 = components(&input.mode2);
    let mut psi = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for c1 in &comps1 {
        for c2 in &comps2 {
            for row in psi.iter_mut() {
                row.fill(Complex64::new(0.0, 0.0));
            }
            for &(n, a1) in &c1.terms {
                for &(m, a2) in &c2.terms {
                    let coeff = a1 * a2;
                    let total = n + m;
                    for na in 0..=total {
                        let nb = total - na;
                        let amp = kernel.amplitude(n, m, na, nb);
                        if amp != 0.0 {
                            psi[na as usize][nb as usize] += coeff * amp;
                        }
                    }
                }
            }
            let weight = c1.weight * c2.weight;
            for (prow, arow) in probs.iter_mut().zip(&psi) {
                for (p, a) in prow.iter_mut().zip(arow) {
                    *p += weight * a.norm_sqr();
                }
            }
        }
    }
    JointDistribution {
        probabilities: probs,
        truncation_bound: input.truncation_bound(),
        provenance: format!("input {}; beamsplitter {}", input.describe(), describe_matrix(s)),
    }
}

/// Closed form of `P(N1, N2)` for a single photon in port 1 and the coherent
/// state `β` in port 2 at a balanced beamsplitter:
/// `e^{-n̄} n̄^{N1+N2-1} (N1-N2)² / (N1! N2! 2^{N1+N2})` with `n̄ = |β|²`.
pub fn analytic_fs_cs(n1: u32, n2: u32, beta: Complex64) -> f64 {
    if n1 == n2 {
        return 0.0;
    }
    let mean = beta.norm_sqr();
    let total = n1 + n2;
    let diff = (n1 as f64 - n2 as f64).abs();
    let ln_rest =
        -ln_factorial(n1 as u64) - ln_factorial(n2 as u64) - total as f64 * std::f64::consts::LN_2 + 2.0 * diff.ln();
    if mean == 0.0 {
        // only N1 + N2 = 1 survives
        return if total == 1 { ln_rest.exp() } else { 0.0 };
    }
    (-mean + (total - 1) as f64 * mean.ln() + ln_rest).exp()
}

fn thinning_matrix(dim: usize, eta: f64) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|n| {
            (0..dim)
                .map(|big| bernoulli_weight(big as u64, n as u64, eta))
                .collect()
        })
        .collect()
}

/// Bernoulli loss applied independently to both ports:
/// `P_η(n1, n2) = Σ_{N1≥n1, N2≥n2} B(N1→n1; η1) B(N2→n2; η2) P(N1, N2)`.
pub fn apply_efficiency(j: &JointDistribution, d: &DetectorModel) -> JointDistribution {
    let (rows, cols) = (j.rows(), j.cols());
    let b1 = thinning_matrix(rows, d.eta1);
    let b2 = thinning_matrix(cols, d.eta2);
    // half[n1][N2] = Σ_{N1} B1[n1][N1] P[N1][N2]
    let mut half = vec![vec![0.0; cols]; rows];
    for (n1, hrow) in half.iter_mut().enumerate() {
        for big1 in n1..rows {
            let w = b1[n1][big1];
            if w == 0.0 {
                continue;
            }
            for (h, p) in hrow.iter_mut().zip(&j.probabilities[big1]) {
                *h += w * p;
            }
        }
    }
    let probabilities = half
        .iter()
        .map(|hrow| {
            (0..cols)
                .map(|n2| (n2..cols).map(|big2| b2[n2][big2] * hrow[big2]).sum())
                .collect()
        })
        .collect();
    JointDistribution {
        probabilities,
        truncation_bound: j.truncation_bound,
        provenance: format!("{}; detector eta1={}, eta2={}", j.provenance, d.eta1, d.eta2),
    }
}

/// Outcome of scanning the diagonal `m_a = m_b` for zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnlReport {
    pub diagonal: Vec<f64>,
    pub max_diagonal: f64,
    /// Largest diagonal value still counted as zero.
    pub threshold: f64,
    pub present: bool,
}

/// Reports a central nodal line when every diagonal entry is at most
/// `truncation_bound + slack`.
pub fn cnl_scan(j: &JointDistribution, slack: f64) -> CnlReport {
    let diagonal = j.diagonal();
    let max_diagonal = diagonal.iter().copied().fold(0.0, f64::max);
    let threshold = j.truncation_bound + slack;
    CnlReport {
        present: diagonal.iter().all(|&p| p <= threshold),
        diagonal,
        max_diagonal,
        threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_coherent, make_fock, make_thermal, Truncation};
    use proptest::prelude::*;

    fn fock_pair(n: u32, m: u32) -> BipartiteInput {
        BipartiteInput::new(make_fock(n), make_fock(m))
    }

    #[test]
    fn hom_output() {
        let j = joint_distribution(&fock_pair(1, 1), &ScatteringMatrix::balanced());
        assert_eq!(j.get(1, 1), 0.0);
        assert!((j.get(2, 0) - 0.5).abs() < 1e-15);
        assert!((j.get(0, 2) - 0.5).abs() < 1e-15);
        assert_eq!(j.truncation_bound(), 0.0);
    }

    #[test]
    fn vacuum_input() {
        let j = joint_distribution(&fock_pair(0, 0), &ScatteringMatrix::balanced());
        assert_eq!(j.rows(), 1);
        assert_eq!(j.get(0, 0), 1.0);
    }

    #[test]
    fn coherent_splits_into_poissons() {
        let beta = Complex64::new(2.0, 0.5);
        let cs = make_coherent(beta, &Truncation::default()).unwrap();
        let j = joint_distribution(&BipartiteInput::new(make_fock(0), cs), &ScatteringMatrix::balanced());
        let half = beta.norm_sqr() / 2.0;
        let poisson = |k: usize| (-half + k as f64 * half.ln() - ln_factorial(k as u64)).exp();
        for a in 0..15 {
            for b in 0..15 {
                let allowed = j.truncation_bound() + 1e-14;
                assert!((j.get(a, b) - poisson(a) * poisson(b)).abs() <= allowed, "({a},{b})");
                assert!((j.get(a, b) - j.get(b, a)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn single_photon_with_coherent_state_has_exact_zero_diagonal() {
        let cs = make_coherent(Complex64::new(3.0, 0.0), &Truncation::default()).unwrap();
        let j = joint_distribution(&BipartiteInput::new(make_fock(1), cs), &ScatteringMatrix::balanced());
        assert!(j.diagonal().iter().all(|&p| p == 0.0));
        assert!(cnl_scan(&j, DEFAULT_CNL_SLACK).present);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(analytic_fs_cs(5, 5, Complex64::new(1.3, 0.2)), 0.0);
        assert!((analytic_fs_cs(1, 0, Complex64::new(0.0, 0.0)) - 0.5).abs() < 1e-15);
        let expected = 81.0 * (-9.0f64).exp() / 16.0;
        assert!((analytic_fs_cs(2, 1, Complex64::new(3.0, 0.0)) - expected).abs() < 1e-16);
    }

    #[test]
    fn cnl_verdicts() {
        let trunc = Truncation::default();
        let verdict = |n: u32, mode2: PhotonState| {
            let j = joint_distribution(&BipartiteInput::new(make_fock(n), mode2), &ScatteringMatrix::balanced());
            cnl_scan(&j, DEFAULT_CNL_SLACK).present
        };
        assert!(verdict(1, make_thermal(9.0, &trunc).unwrap()));
        assert!(!verdict(2, make_coherent(Complex64::new(3.0, 0.0), &trunc).unwrap()));
        assert!(verdict(3, make_coherent(Complex64::new(3.0, 0.0), &trunc).unwrap()));
    }

    #[test]
    fn efficiency_end_points() {
        let cs = make_coherent(Complex64::new(1.5, 0.0), &Truncation::default()).unwrap();
        let j = joint_distribution(&BipartiteInput::new(make_fock(1), cs), &ScatteringMatrix::balanced());
        let same = apply_efficiency(&j, &DetectorModel::perfect());
        for a in 0..j.rows() {
            for b in 0..j.cols() {
                assert_eq!(same.get(a, b), j.get(a, b));
            }
        }
        let blind = apply_efficiency(&j, &DetectorModel::equal(0.0).unwrap());
        assert!((blind.get(0, 0) - j.total()).abs() < 1e-15);
        assert_eq!(blind.total(), blind.get(0, 0));

        let lossy = apply_efficiency(&j, &DetectorModel::equal(0.7).unwrap());
        assert!(lossy.diagonal().iter().take(4).all(|&p| p > 0.0));
        assert!((lossy.total() - j.total()).abs() < 1e-13);
        assert!((lossy.mean_a() - 0.7 * j.mean_a()).abs() < 1e-12);
    }

    #[test]
    fn detector_validation() {
        assert!(DetectorModel::new(1.1, 0.5).is_err());
        assert!(DetectorModel::new(0.5, -0.1).is_err());
        assert!(DetectorModel::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn truncation_books_dropped_mass() {
        let cs = make_coherent(Complex64::new(2.0, 0.0), &Truncation::default()).unwrap();
        let j = joint_distribution(&BipartiteInput::new(make_fock(1), cs), &ScatteringMatrix::balanced());
        let small = j.truncated(3);
        assert_eq!(small.rows(), 4);
        assert!(small.total() + small.truncation_bound() >= 1.0 - 1e-12);
    }

    proptest! {
        #[test]
        fn odd_totals_never_coincide(n in 0u32..12, m in 0u32..12, t in 0.05f64..0.95) {
            prop_assume!((n + m) % 2 == 1);
            let s = ScatteringMatrix::from_transmission(t).unwrap();
            let j = joint_distribution(&fock_pair(n, m), &s);
            prop_assert!(j.diagonal().iter().all(|&p| p == 0.0));
        }

        #[test]
        fn fock_outputs_are_normalized(n in 0u32..=16, m in 0u32..=16, t in -1.0f64..1.0) {
            prop_assume!(n + m <= 16);
            let s = ScatteringMatrix::from_transmission(t).unwrap();
            let j = joint_distribution(&fock_pair(n, m), &s);
            prop_assert!((j.total() - 1.0).abs() < 1e-12);
            prop_assert!(j.matrix().iter().flatten().all(|&p| p >= 0.0));
        }

        #[test]
        fn single_photon_distribution_is_symmetric(re in 0.1f64..3.0, im in -1.0f64..1.0) {
            let cs = make_coherent(Complex64::new(re, im), &Truncation::default()).unwrap();
            let j = joint_distribution(&BipartiteInput::new(make_fock(1), cs), &ScatteringMatrix::balanced());
            for a in 0..j.rows() {
                for b in 0..a {
                    prop_assert!((j.get(a, b) - j.get(b, a)).abs() < 1e-14);
                }
            }
        }

        #[test]
        fn efficiency_preserves_mass_and_scales_means(eta1 in 0.0f64..=1.0, eta2 in 0.0f64..=1.0, mean in 0.1f64..6.0) {
            let th = make_thermal(mean, &Truncation::default()).unwrap();
            let j = joint_distribution(&BipartiteInput::new(make_fock(1), th), &ScatteringMatrix::balanced());
            let d = DetectorModel::new(eta1, eta2).unwrap();
            let lossy = apply_efficiency(&j, &d);
            prop_assert!((lossy.total() - j.total()).abs() < 1e-12);
            prop_assert!((lossy.mean_a() - eta1 * j.mean_a()).abs() < 1e-10);
            prop_assert!((lossy.mean_b() - eta2 * j.mean_b()).abs() < 1e-10);
        }
    }
}
