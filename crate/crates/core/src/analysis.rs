//! Shape diagnostics for sampled traces: extrema counts, envelopes, settling.

use crate::params::TimeGrid;

/// Number of strict interior local maxima, `v[k-1] < v[k] > v[k+1]`.
pub fn count_local_maxima(v: &[f64]) -> usize {
    v.windows(3).filter(|w| w[0] < w[1] && w[1] > w[2]).count()
}

pub fn count_local_minima(v: &[f64]) -> usize {
    v.windows(3).filter(|w| w[0] > w[1] && w[1] < w[2]).count()
}

/// Index of the last strict interior local maximum, if any.
pub fn last_local_maximum(v: &[f64]) -> Option<usize> {
    v.windows(3)
        .rposition(|w| w[0] < w[1] && w[1] > w[2])
        .map(|k| k + 1)
}

/// `max v` over samples with `|t - center| <= width / 2`.
pub fn envelope(grid: &TimeGrid, v: &[f64], center: f64, width: f64) -> Option<f64> {
    grid.times()
        .zip(v)
        .filter(|(t, _)| (t - center).abs() <= 0.5 * width)
        .map(|(_, x)| *x)
        .reduce(f64::max)
}

/// Time after which the distance to the steady state decreases monotonically:
/// the last local maximum of `dist`, or 0 if there is none. A trace still
/// oscillating at its end reports a value close to `t_max`.
pub fn settling_time(grid: &TimeGrid, dist: &[f64]) -> f64 {
    last_local_maximum(dist).map_or(0.0, |k| grid.t(k))
}

pub fn min(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn max(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}
