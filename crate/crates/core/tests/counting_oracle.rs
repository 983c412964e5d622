mod common;

use common::linear_fit;
use ehom_core::counting::registered_distribution;
use ehom_core::{
    diagonal_tau0, fs_cs_counting_joint, make_coherent, make_fock, make_thermal, operator_oracle, registered_mean,
    single_mode_counting, BipartiteInput, CountingParams, CwMode, DetectorModel, GaussianMode, ModeSamples,
    PhotonProfile, SeriesSettings, Truncation,
};
use num_complex::Complex64;

fn base(eta: f64, mean: f64, t0: f64, tau: f64) -> CountingParams {
    CountingParams {
        eta,
        n1: 0,
        n2: 0,
        t0,
        tau,
        mode1: PhotonProfile::Gaussian(GaussianMode::new(1.2, 0.1, 1.3).unwrap()),
        mode2: CwMode::new(0.8, 0.9, 0.4).unwrap(),
        mean,
        series: SeriesSettings::default(),
    }
}

fn fs_cs_input(mean: f64) -> BipartiteInput {
    let beta = Complex64::from_polar(mean.sqrt(), 0.7);
    BipartiteInput::new(make_fock(1), make_coherent(beta, &Truncation::default()).unwrap())
}

#[test]
fn series_matches_operator_oracle() {
    for mean in [0.5, 2.0, 4.0] {
        let input = fs_cs_input(mean);
        for eta in [0.5, 0.9, 1.0] {
            for (t0, tau) in [(0.0, 0.0), (0.3, 0.8), (-0.6, 1.9), (1.1, -0.4)] {
                let params = base(eta, mean, t0, tau);
                let det = DetectorModel::equal(eta).unwrap();
                for n1 in 0..=3 {
                    for n2 in 0..=3 {
                        let r = fs_cs_counting_joint(&params.with_counts(n1, n2)).unwrap();
                        let want = operator_oracle(&input, &params.samples(), &det, n1, n2).unwrap();
                        assert!(
                            (r.total() - want).abs() <= 1e-8,
                            "mean={mean} eta={eta} t0={t0} tau={tau} ({n1},{n2}): {} vs {want}",
                            r.total()
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn monochromatic_diagonal_matches_oracle() {
    for mean in [1.0, 4.0] {
        let input = fs_cs_input(mean);
        let mut params = base(0.5, mean, 0.0, 0.0);
        params.mode1 = PhotonProfile::Monochromatic;
        params.mode2 = CwMode::new(1.0, 0.0, 0.0).unwrap();
        for n in 1..=3 {
            let d = diagonal_tau0(n, 0.5, 0.0, &params).unwrap();
            let want = operator_oracle(
                &input,
                &ModeSamples::monochromatic(),
                &DetectorModel::equal(0.5).unwrap(),
                n,
                n,
            )
            .unwrap();
            assert!((d - want).abs() <= 1e-8, "mean={mean} n={n}: {d} vs {want}");
        }
    }
}

#[test]
fn diagonal_is_linear_in_photon_intensity() {
    // p = η n̄ F / 2 is held fixed while t0 moves P1(t0) along the Gaussian
    let eta = 0.5;
    let params = base(eta, 3.0, 0.0, 0.0);
    let t0s: Vec<f64> = (0..13).map(|i| -1.5 + 0.25 * i as f64).collect();
    for n in 1..=3 {
        let p1: Vec<f64> = t0s.iter().map(|&t| base(eta, 3.0, t, 0.0).p1()).collect();
        let vals: Vec<f64> = t0s
            .iter()
            .map(|&t| diagonal_tau0(n, eta, t, &params).unwrap())
            .collect();
        let (intercept, slope, resid) = linear_fit(&p1, &vals);
        assert!(resid <= 1e-12, "n={n}: residual {resid}");
        assert!((slope / intercept + eta).abs() <= 1e-10);
        for (t, v) in t0s.iter().zip(&vals) {
            let r = fs_cs_counting_joint(&base(eta, 3.0, *t, 0.0).with_counts(n, n)).unwrap();
            assert!((r.total() - v).abs() <= r.series_error_bound + 1e-15);
        }
    }
}

#[test]
fn single_port_counting_matches_oracle() {
    let trunc = Truncation::default();
    let input = BipartiteInput::new(make_coherent(Complex64::new(1.5, 0.0), &trunc).unwrap(), make_fock(0));
    let dist = input.mode1.probabilities();
    for eta in [0.3, 0.75] {
        let det = DetectorModel::new(eta, 0.0).unwrap();
        for n in 0..6 {
            let want = operator_oracle(&input, &ModeSamples::single_port(), &det, n, 0).unwrap();
            let got = single_mode_counting(&dist, eta, n as usize).unwrap();
            assert!((got - want).abs() <= 1e-12, "eta={eta} n={n}");
        }
    }
}

#[test]
fn mean_count_law() {
    let trunc = Truncation::with_tolerance(1e-14);
    let states = [
        make_coherent(Complex64::new(2.2, -0.4), &trunc).unwrap(),
        make_thermal(1.7, &trunc).unwrap(),
        make_fock(7),
    ];
    for state in &states {
        let dist = state.probabilities();
        for eta in [0.0, 0.2, 0.65, 1.0] {
            let mean = registered_mean(&dist, eta).unwrap();
            assert!(
                (mean - eta * state.mean()).abs() <= 1e-10,
                "{} eta={eta}",
                state.describe()
            );
            let total: f64 = registered_distribution(&dist, eta).unwrap().iter().sum();
            assert!((total - dist.iter().sum::<f64>()).abs() < 1e-12);
        }
    }
}
