//! Shapiro-Wilk W test using Royston's polynomial approximations for the
//! coefficients and the p-value (valid for 3 ≤ n ≤ 5000).

use alloc::vec::Vec;

use super::normal::ppnd;
use super::StatsError;
use crate::math::{exp, ln, normal_sf, sqrt};

pub const MAX_N: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapiroWilk {
    pub w: f64,
    pub p_value: f64,
}

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Coefficients `a_1..a_{n/2}` pairing the i-th smallest with the i-th
/// largest observation.
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return alloc::vec![core::f64::consts::FRAC_1_SQRT_2];
    }
    let an = n as f64;
    let m: Vec<f64> = (1..=half).map(|i| ppnd((i as f64 - 0.375) / (an + 0.25))).collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = sqrt(summ2);
    let rsn = 1.0 / sqrt(an);
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = alloc::vec![0.0; half];
    a[0] = a1;
    let (first, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
        (2, fac)
    } else {
        (1, sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)))
    };
    for i in first..half {
        a[i] = -m[i] / fac;
    }
    a
}

fn p_value(w: f64, n: usize) -> f64 {
    if n == 3 {
        return (6.0 / core::f64::consts::PI * (libm::asin(sqrt(w)) - core::f64::consts::FRAC_PI_3)).max(0.0);
    }
    let an = n as f64;
    let w1 = ln(1.0 - w);
    let (y, mean, sd) = if n <= 11 {
        let gamma = poly(&G, an);
        if w1 >= gamma {
            return 1e-99;
        }
        (-ln(gamma - w1), poly(&C3, an), exp(poly(&C4, an)))
    } else {
        let lx = ln(an);
        (w1, poly(&C5, lx), exp(poly(&C6, lx)))
    };
    normal_sf((y - mean) / sd)
}

/// Shapiro-Wilk normality test.
pub fn shapiro_wilk(data: &[f64]) -> Result<ShapiroWilk, StatsError> {
    let n = data.len();
    if n < 3 {
        return Err(StatsError::SampleTooSmall { min: 3, got: n });
    }
    if n > MAX_N {
        return Err(StatsError::SampleTooLarge { max: MAX_N, got: n });
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut x = data.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if range < 1e-19 * x[n - 1].abs().max(1.0) {
        return Err(StatsError::DegenerateSample);
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let ssq: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let a = coefficients(n);
    let num: f64 = a.iter().enumerate().map(|(i, ai)| ai * (x[n - 1 - i] - x[i])).sum();
    let w = (num * num / ssq).min(1.0);
    Ok(ShapiroWilk { w, p_value: p_value(w, n) })
}
