//! Aggregation statistics: pairwise-summed mean, order statistics, ECDF,
//! and panel normalization.

use std::collections::BTreeMap;

use crate::AnalyzerError;

/// Arithmetic mean with pairwise summation, so accumulation error stays
/// O(log n) instead of O(n).
pub fn mean(values: &[f64]) -> Result<f64, AnalyzerError> {
    if values.is_empty() {
        return Err(AnalyzerError::EmptyInput);
    }
    Ok(pairwise_sum(values) / values.len() as f64)
}

fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN metric values"));
    v
}

pub fn median(values: &[f64]) -> Result<f64, AnalyzerError> {
    percentile(values, 50.0)
}

/// Nearest-rank percentile over the sorted values.
pub fn percentile(values: &[f64], p: f64) -> Result<f64, AnalyzerError> {
    if values.is_empty() {
        return Err(AnalyzerError::EmptyInput);
    }
    let v = sorted(values);
    let rank = ((p / 100.0) * v.len() as f64).ceil() as usize;
    Ok(v[rank.clamp(1, v.len()) - 1])
}

/// Empirical CDF: sorted values paired with fractions i/n, ending at 1.0.
pub fn ecdf(values: &[f64]) -> Result<Vec<(f64, f64)>, AnalyzerError> {
    if values.is_empty() {
        return Err(AnalyzerError::EmptyInput);
    }
    let v = sorted(values);
    let n = v.len() as f64;
    Ok(v.into_iter()
        .enumerate()
        .map(|(i, x)| (x, (i + 1) as f64 / n))
        .collect())
}

/// Divides every value in the group by the global maximum, so exactly the
/// panel maximum maps to 1.0. Idempotent.
pub fn normalize(
    group: &BTreeMap<String, Vec<f64>>,
) -> Result<BTreeMap<String, Vec<f64>>, AnalyzerError> {
    let max = group
        .values()
        .flatten()
        .copied()
        .fold(0.0f64, f64::max);
    if max <= 0.0 {
        return Err(AnalyzerError::AllZero);
    }
    Ok(group
        .iter()
        .map(|(label, values)| {
            (
                label.clone(),
                values.iter().map(|v| v / max).collect(),
            )
        })
        .collect())
}
