//! Independent reference computations shared by the integration tests and
//! the acceptance runner. Nothing here calls into the library's numerics.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;

/// Beamsplitter unitary on the two-mode space with at most `total` photons
/// per mode, from `exp(θ (a2† a1 - a1† a2))` with `t = cos θ`, `r = sin θ`.
/// Entry `(na·d + nb, n·d + m)` is the amplitude `<na, nb| U |n, m>`.
pub struct UnitaryOracle {
    dim: usize,
    u: DMatrix<f64>,
}

impl UnitaryOracle {
    pub fn new(total: usize, theta: f64) -> Self {
        let dim = total + 1;
        let mut a = DMatrix::<f64>::zeros(dim, dim);
        for n in 1..dim {
            a[(n - 1, n)] = (n as f64).sqrt();
        }
        let id = DMatrix::<f64>::identity(dim, dim);
        let a1 = a.kronecker(&id);
        let a2 = id.kronecker(&a);
        let g = a2.transpose() * &a1 - a1.transpose() * &a2;
        Self {
            dim,
            u: (g * theta).exp(),
        }
    }

    pub fn amplitude(&self, n: usize, m: usize, na: usize, nb: usize) -> f64 {
        self.u[(na * self.dim + nb, n * self.dim + m)]
    }
}

fn ln_fact(n: u64) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

fn binom(n: u64, k: u64) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

/// `P(N1, N2)` for one photon and a coherent state of mean `mean`, balanced
/// beamsplitter, written out from the output-state expansion.
pub fn fs_cs_reference(n1: u64, n2: u64, mean: f64) -> f64 {
    if n1 == n2 {
        return 0.0;
    }
    let d = n1 as f64 - n2 as f64;
    let tot = n1 + n2;
    (-mean + (tot as f64 - 1.0) * mean.ln() - ln_fact(n1) - ln_fact(n2) - tot as f64 * 2f64.ln()).exp() * d * d
}

/// Thinned diagonal `P_η(n, n)` as the double Bernoulli sum over the ideal
/// distribution, with a single `η^{2n}` factor.
pub fn p_eta_nn_series(n: u64, eta: f64, mean: f64, max_total: u64) -> f64 {
    let mut sum = 0.0;
    for big1 in n..=max_total {
        for big2 in n..=max_total - big1 + n {
            let p = fs_cs_reference(big1, big2, mean);
            if p == 0.0 {
                continue;
            }
            sum += binom(big1, n)
                * binom(big2, n)
                * eta.powi(2 * n as i32)
                * (1.0 - eta).powi((big1 + big2 - 2 * n) as i32)
                * p;
        }
    }
    sum
}

/// Sample `(N1, N2)` from `grid`, thin each count binomially with `eta`, and
/// return the empirical frequencies of `(n, n)` for `n < max_n`.
pub fn monte_carlo_diagonal(grid: &[Vec<f64>], eta: f64, samples: usize, max_n: usize, seed: u64) -> Vec<f64> {
    let cols = grid[0].len();
    let weights: Vec<f64> = grid.iter().flatten().copied().collect();
    let index = WeightedIndex::new(&weights).expect("valid weights");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0usize; max_n];
    for _ in 0..samples {
        let cell = index.sample(&mut rng);
        let (big1, big2) = ((cell / cols) as u64, (cell % cols) as u64);
        let k1 = Binomial::new(big1, eta).unwrap().sample(&mut rng) as usize;
        let k2 = Binomial::new(big2, eta).unwrap().sample(&mut rng) as usize;
        if k1 == k2 && k1 < max_n {
            hits[k1] += 1;
        }
    }
    hits.iter().map(|&h| h as f64 / samples as f64).collect()
}

/// Least-squares line through `(x, y)`; returns `(intercept, slope, max residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).abs())
        .fold(0.0, f64::max);
    (intercept, slope, resid)
}
