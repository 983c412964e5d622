//! Small numeric helpers shared by the photon-counting code paths.

use num_bigint::BigUint;
use num_traits::One;

pub(crate) fn ln_factorial(n: u64) -> f64 {
    statrs::function::factorial::ln_factorial(n)
}

/// `ln C(n, k)`, evaluated from the smaller of `k` and `n - k` so that
/// `ln_binomial(n, k)` and `ln_binomial(n, n - k)` are bitwise identical.
pub(crate) fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let lo = k.min(n - k);
    let hi = n - lo;
    ln_factorial(n) - ln_factorial(lo) - ln_factorial(hi)
}

/// `C(n, k) η^k (1-η)^(n-k)`, exact at the end points `η ∈ {0, 1}`.
pub(crate) fn bernoulli_weight(n: u64, k: u64, eta: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if eta <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if eta >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln = ln_binomial(n, k) + k as f64 * eta.ln() + (n - k) as f64 * (-eta).ln_1p();
    ln.exp()
}

pub(crate) fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub(crate) fn factorial_big(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Neumaier-compensated running sum that also tracks the sum of magnitudes.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
    magnitude: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
        self.magnitude += x.abs();
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }

    /// Sum of `|x|` over everything added so far.
    pub(crate) fn magnitude(&self) -> f64 {
        self.magnitude
    }
}
