//! Wilcoxon signed-rank test for paired per-snippet metrics, answering
//! whether a transformation shifted the score distribution.
//!
//! Zero differences are dropped, absolute differences are ranked with
//! average ranks on ties, and the statistic is the smaller signed rank
//! sum. Small samples get the exact two-sided p-value by counting sign
//! assignments; larger ones a normal approximation with tie and
//! continuity corrections.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    NormalApprox,
}

/// Largest sample size using exact enumeration; beyond it the normal
/// approximation takes over.
pub const EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    pub n_effective: usize,
    pub w: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub p_value: Option<f64>,
    pub method: Method,
    /// Σ(after − before): negative means performance went down.
    pub sum_differences: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigLevel {
    NotSignificant,
    P05,
    P01,
    P001,
}

impl SigLevel {
    pub fn of(p: f64) -> SigLevel {
        if p < 0.001 {
            SigLevel::P001
        } else if p < 0.01 {
            SigLevel::P01
        } else if p < 0.05 {
            SigLevel::P05
        } else {
            SigLevel::NotSignificant
        }
    }
}

impl WilcoxonResult {
    pub fn significance(&self) -> SigLevel {
        match self.p_value {
            Some(p) => SigLevel::of(p),
            None => SigLevel::NotSignificant,
        }
    }
}

/// Average ranks of already-sorted values, ties sharing their mean position.
fn average_ranks(sorted: &[f64]) -> Vec<f64> {
    let mut ranks = vec![0.0; sorted.len()];
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        // Positions i..=j are 1-based ranks i+1..=j+1; ties share the mean.
        let rank = (i + 1 + j + 1) as f64 / 2.0;
        for r in ranks.iter_mut().take(j + 1).skip(i) {
            *r = rank;
        }
        i = j + 1;
    }
    ranks
}

/// P(W+ ≤ w) over all 2ⁿ equally likely sign assignments, counted by
/// dynamic programming over rank sums. Ranks arrive doubled so average
/// ranks become integers.
fn exact_cumulative(double_ranks: &[u64], double_w: u64) -> f64 {
    let total: u64 = double_ranks.iter().sum();
    let mut ways = vec![0.0f64; (total + 1) as usize];
    ways[0] = 1.0;
    for &rank in double_ranks {
        for sum in (rank..=total).rev() {
            ways[sum as usize] += ways[(sum - rank) as usize];
        }
    }
    let below: f64 = ways[..=double_w as usize].iter().sum();
    below / 2f64.powi(double_ranks.len() as i32)
}

/// Abramowitz–Stegun rational approximation of the error function,
/// accurate to about 1.5e-7.
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// Two-sided test on paired samples; `before` and `after` must align by
/// position.
pub fn wilcoxon_signed_rank(before: &[f64], after: &[f64]) -> WilcoxonResult {
    assert_eq!(
        before.len(),
        after.len(),
        "paired samples must have equal length"
    );
    let diffs: Vec<f64> = before
        .iter()
        .zip(after)
        .map(|(b, a)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let sum_differences = diffs.iter().sum();
    let n = diffs.len();
    if n == 0 {
        return WilcoxonResult {
            n_effective: 0,
            w: 0.0,
            w_plus: 0.0,
            w_minus: 0.0,
            p_value: None,
            method: Method::Exact,
            sum_differences,
        };
    }

    let mut magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    magnitudes.sort_by(|a, b| a.partial_cmp(b).expect("finite metric values"));
    let ranks_sorted = average_ranks(&magnitudes);
    let rank_of = |magnitude: f64| -> f64 {
        let idx = magnitudes
            .iter()
            .position(|&m| m == magnitude)
            .expect("magnitude came from this list");
        ranks_sorted[idx]
    };
    let w_plus: f64 = diffs
        .iter()
        .filter(|d| **d > 0.0)
        .map(|d| rank_of(d.abs()))
        .sum();
    let w_minus: f64 = diffs
        .iter()
        .filter(|d| **d < 0.0)
        .map(|d| rank_of(d.abs()))
        .sum();
    let w = w_plus.min(w_minus);

    let (p, method) = if n <= EXACT_LIMIT {
        let double_ranks: Vec<u64> = ranks_sorted.iter().map(|r| (2.0 * r) as u64).collect();
        let cumulative = exact_cumulative(&double_ranks, (2.0 * w) as u64);
        ((2.0 * cumulative).min(1.0), Method::Exact)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let mut variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0;
        let mut i = 0;
        while i < magnitudes.len() {
            let mut j = i;
            while j + 1 < magnitudes.len() && magnitudes[j + 1] == magnitudes[i] {
                j += 1;
            }
            let t = (j - i + 1) as f64;
            variance -= (t * t * t - t) / 48.0;
            i = j + 1;
        }
        let z = (w - mean + 0.5) / variance.sqrt();
        ((2.0 * normal_cdf(z)).clamp(0.0, 1.0), Method::NormalApprox)
    };
    WilcoxonResult {
        n_effective: n,
        w,
        w_plus,
        w_minus,
        p_value: Some(p),
        method,
        sum_differences,
    }
}
