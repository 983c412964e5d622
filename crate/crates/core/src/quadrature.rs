//! Adaptive 15-point Gauss–Kronrod quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Half-width of the integration window, in units of the integrand's width.
pub const TAIL_WIDTHS: f64 = 10.0;

/// Integral value together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub max_intervals: usize,
    /// Number of equal pieces the range is split into before adapting.
    pub initial_pieces: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_intervals: 4000,
            initial_pieces: 8,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_k * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let round_off = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(round_off);
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]`, bisecting the worst segment until the summed
/// error estimate drops below `settings.abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let pieces = settings.initial_pieces.max(1);
    let step = (b - a) / pieces as f64;
    let mut segments: Vec<Segment> = (0..pieces)
        .map(|i| {
            let lo = a + step * i as f64;
            let hi = if i + 1 == pieces { b } else { a + step * (i + 1) as f64 };
            gk15(&f, lo, hi)
        })
        .collect();
    loop {
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= settings.abs_tol {
            break;
        }
        if segments.len() >= settings.max_intervals {
            let value = segments.iter().map(|s| s.value).sum();
            return Err(Error::QuadratureNotConverged {
                value,
                estimate: error,
                target: settings.abs_tol,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval can no longer be split in floating point
            let value = segments.iter().map(|s| s.value).sum::<f64>() + seg.value;
            return Err(Error::QuadratureNotConverged {
                value,
                estimate: error,
                target: settings.abs_tol,
            });
        }
        segments.push(gk15(&f, seg.a, mid));
        segments.push(gk15(&f, mid, seg.b));
    }
    // sum in position order so results do not depend on refinement history
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(Estimate {
        value: segments.iter().map(|s| s.value).sum(),
        error: segments.iter().map(|s| s.error).sum(),
    })
}

/// Integrates over `center ± TAIL_WIDTHS · width`, for integrands with
/// Gaussian decay away from `center`.
pub fn integrate_window<F: Fn(f64) -> f64>(
    f: F,
    center: f64,
    width: f64,
    settings: &QuadratureSettings,
) -> Result<Estimate> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "window width must be positive, got {width}"
        )));
    }
    let half = TAIL_WIDTHS * width;
    integrate(f, center - half, center + half, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let est = integrate(
            |x| 3.0 * x * x - 2.0 * x + 1.0,
            -1.0,
            2.0,
            &QuadratureSettings::default(),
        )
        .unwrap();
        assert!((est.value - 9.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_window() {
        let est = integrate_window(
            |x| (-(x - 1.5f64).powi(2)).exp(),
            1.5,
            1.0,
            &QuadratureSettings::default(),
        )
        .unwrap();
        assert!((est.value - PI.sqrt()).abs() < 1e-12);
        assert!(est.error <= 1e-10);
    }

    #[test]
    fn oscillatory_gaussian() {
        // ∫ e^{-x²} cos(8x) dx = √π e^{-16}
        let est = integrate_window(
            |x| (-x * x).exp() * (8.0 * x).cos(),
            0.0,
            1.0,
            &QuadratureSettings::default(),
        )
        .unwrap();
        assert!((est.value - PI.sqrt() * (-16.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn reports_non_convergence() {
        let settings = QuadratureSettings {
            abs_tol: 1e-14,
            max_intervals: 10,
            initial_pieces: 1,
        };
        let err = integrate(|x: f64| x.abs().sqrt().recip(), 1e-12, 1.0, &settings).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }

    #[test]
    fn empty_range() {
        let est = integrate(|x| x, 2.0, 2.0, &QuadratureSettings::default()).unwrap();
        assert_eq!(est.value, 0.0);
    }
}
