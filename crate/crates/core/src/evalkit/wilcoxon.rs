use alloc::vec;
use alloc::vec::Vec;

use super::StatsError;
use crate::math::{normal_cdf, normal_sf, sqrt};

/// Largest effective sample size evaluated exactly; above it the normal
/// approximation is used.
pub const EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alternative {
    #[default]
    TwoSided,
    /// `x` tends to be smaller than `y`.
    Less,
    /// `x` tends to be larger than `y`.
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wilcoxon {
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Pairs left after dropping zero differences.
    pub n_effective: usize,
    pub p_value: f64,
    pub method: WilcoxonMethod,
}

/// Doubled average ranks of `|d|`, so tied ranks stay integral.
fn doubled_ranks(abs_diffs: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let n = abs_diffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| abs_diffs[a].total_cmp(&abs_diffs[b]));
    let mut ranks = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && abs_diffs[order[j + 1]] == abs_diffs[order[i]] {
            j += 1;
        }
        // ranks i+1..=j+1 averaged, doubled
        let r2 = (i + j + 2) as u64;
        for &k in &order[i..=j] {
            ranks[k] = r2;
        }
        tie_sizes.push(j - i + 1);
        i = j + 1;
    }
    (ranks, tie_sizes)
}

/// Number of sign assignments with each doubled positive-rank sum.
fn sign_sum_counts(ranks: &[u64]) -> Vec<u64> {
    let total: u64 = ranks.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in ranks {
        let r = r as usize;
        for s in (r..=reach + r).rev() {
            counts[s] += counts[s - r];
        }
        reach += r;
    }
    counts
}

/// Wilcoxon signed-rank test on paired samples. Zero differences are
/// dropped and tied magnitudes share their average rank.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64], alternative: Alternative) -> Result<Wilcoxon, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(StatsError::SampleTooSmall { min: 1, got: 0 });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Err(StatsError::DegenerateSample);
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = doubled_ranks(&abs);
    let plus2: u64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let total2: u64 = ranks.iter().sum();
    let minus2 = total2 - plus2;
    let (w_plus, w_minus) = (plus2 as f64 / 2.0, minus2 as f64 / 2.0);
    let statistic = w_plus.min(w_minus);

    let (p_value, method) = if n <= EXACT_LIMIT {
        let counts = sign_sum_counts(&ranks);
        let denom = (1u64 << n) as f64;
        let at_most = |t: u64| counts[..=t as usize].iter().sum::<u64>() as f64 / denom;
        let p = match alternative {
            Alternative::TwoSided => (2.0 * at_most(plus2.min(minus2))).min(1.0),
            Alternative::Less => at_most(plus2),
            Alternative::Greater => counts[plus2 as usize..].iter().sum::<u64>() as f64 / denom,
        };
        (p, WilcoxonMethod::Exact)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
        let sd = sqrt(nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term);
        let p = match alternative {
            Alternative::TwoSided => (2.0 * normal_cdf((statistic - mean + 0.5) / sd)).min(1.0),
            Alternative::Less => normal_cdf((w_plus - mean + 0.5) / sd),
            Alternative::Greater => normal_sf((w_plus - mean - 0.5) / sd),
        };
        (p, WilcoxonMethod::Normal)
    };

    Ok(Wilcoxon { statistic, w_plus, w_minus, n_effective: n, p_value, method })
}
