//! Bundled weights for the demo scenarios.
//!
//! The dust weight survives only on a three-scale periodic family of thin
//! gaps; the gauge series of those gaps shows no octave decay, so every
//! positive-measure set carrying the weight is far from Carleson and the
//! splitting trend kicks in. The control weight vanishes on a single arc:
//! its complement is one fat arc with a trivially finite gauge series, and no
//! trend appears.

use std::f64::consts::TAU;

use crate::circle::CircleWeight;
use crate::error::{Error, Result};

/// Cell period of the dust pattern.
const DUST_PERIOD: usize = 128;

/// Per-period gap runs as `(offset, width, stride)`: a 16-cell gap, two
/// 4-cell gaps, four 1-cell gaps, mutually non-adjacent. 28 of every 128
/// cells survive as gaps.
const DUST_RUNS: [(usize, usize, usize); 3] = [(0, 16, 128), (32, 4, 64), (24, 1, 32)];

/// Weight that is 1 on a three-scale family of thin gaps and 0 elsewhere.
///
/// `grid_size` must be a multiple of 128 so the pattern tiles evenly; every
/// partition into `N <= grid_size / 128` arcs then sees the same gap
/// fraction, which keeps the per-N trend monotone. One window carries no
/// gaps at all: a periodic weight would make the outer functions collapse to
/// 1 on compact subsets to machine precision, while the lone defect leaves a
/// one-arc trace that shrinks with the vanishing coefficient.
pub fn divergent_dust_weight(grid_size: usize, t: f64) -> Result<CircleWeight> {
    if !grid_size.is_multiple_of(DUST_PERIOD) {
        return Err(Error::validation(format!(
            "dust weight needs a grid size divisible by {DUST_PERIOD}, got {grid_size}"
        )));
    }
    let mut pattern = [0.0; DUST_PERIOD];
    for (offset, width, stride) in DUST_RUNS {
        let mut start = offset;
        while start < DUST_PERIOD {
            for cell in pattern.iter_mut().skip(start).take(width) {
                *cell = 1.0;
            }
            start += stride;
        }
    }
    let windows = grid_size / DUST_PERIOD;
    let defect = windows / 4;
    let samples = (0..grid_size)
        .map(|g| {
            if g / DUST_PERIOD == defect {
                0.0
            } else {
                pattern[g % DUST_PERIOD]
            }
        })
        .collect();
    CircleWeight::new(samples, t)
}

/// Weight that is 1 everywhere except a single arc of about one radian,
/// where it vanishes. The set it vanishes on is a Carleson set of positive
/// measure carrying an integrable logarithm, so no splitting trend occurs.
pub fn single_gap_weight(grid_size: usize, t: f64) -> Result<CircleWeight> {
    let gap = (grid_size as f64 / TAU).round() as usize;
    if gap == 0 || gap >= grid_size {
        return Err(Error::validation(format!(
            "grid size {grid_size} too small for the single-gap weight"
        )));
    }
    let mut samples = vec![1.0; grid_size];
    for cell in samples.iter_mut().take(gap) {
        *cell = 0.0;
    }
    CircleWeight::new(samples, t)
}

/// Lengths (radians) of the maximal arcs where a sampled weight is positive:
/// the complementary arcs of its zero set.
pub fn positive_arc_lengths(w: &CircleWeight) -> Vec<f64> {
    let samples = w.samples();
    let grid = samples.len();
    let cell = w.cell_angle();
    if samples.iter().all(|&v| v > 0.0) {
        return vec![TAU]; // zero set empty: the whole circle is one positive arc
    }
    if samples.iter().all(|&v| v == 0.0) {
        return Vec::new();
    }
    // rotate so the scan starts on a zero cell, then collect positive runs
    let first_zero = samples.iter().position(|&v| v == 0.0).expect("zero exists");
    let mut lengths = Vec::new();
    let mut run = 0usize;
    for k in 0..grid {
        let v = samples[(first_zero + k) % grid];
        if v > 0.0 {
            run += 1;
        } else if run > 0 {
            lengths.push(run as f64 * cell);
            run = 0;
        }
    }
    if run > 0 {
        lengths.push(run as f64 * cell);
    }
    lengths
}

/// Density samples `(x, exp(-eps * x^(alpha - 1)))` on a uniform grid of
/// `(0, 1]`, the sub-exponential family whose induced gauge is `eps * x^alpha`.
pub fn alpha_density_samples(alpha: f64, eps: f64, count: usize) -> Vec<(f64, f64)> {
    (1..=count)
        .map(|i| {
            let x = i as f64 / count as f64;
            (x, (-eps * x.powf(alpha - 1.0)).exp())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::is_h_carleson;
    use crate::gauge::Gauge;

    #[test]
    fn dust_weight_tiles_evenly_around_the_defect() {
        let w = divergent_dust_weight(1024, 2.0).unwrap();
        let positive = w.samples().iter().filter(|&&v| v > 0.0).count();
        assert_eq!(positive, 28 * (1024 / 128 - 1));
        for (i, chunk) in w.samples().chunks(128).enumerate() {
            let gaps = chunk.iter().filter(|&&v| v > 0.0).count();
            assert_eq!(gaps, if i == 2 { 0 } else { 28 });
        }
    }

    #[test]
    fn dust_gap_series_shows_no_decay() {
        let w = divergent_dust_weight(16384, 2.0).unwrap();
        let arcs = positive_arc_lengths(&w);
        // every window contributes seven gaps except the defect window
        assert_eq!(arcs.len(), 127 * (1 + 2 + 4));
        let h = Gauge::log_type(TAU).unwrap();
        let (carleson, sum) = is_h_carleson(&arcs, &h).unwrap();
        assert!(!carleson);
        assert!(sum > 0.0);
    }

    #[test]
    fn control_weight_has_one_fat_positive_arc() {
        let w = single_gap_weight(16384, 2.0).unwrap();
        let arcs = positive_arc_lengths(&w);
        assert_eq!(arcs.len(), 1);
        assert!((arcs[0] - (TAU - 1.0)).abs() < 0.01);
        let h = Gauge::log_type(TAU).unwrap();
        let (carleson, _) = is_h_carleson(&arcs, &h).unwrap();
        assert!(carleson);
    }

    #[test]
    fn alpha_density_recovers_the_power_gauge() {
        let samples = alpha_density_samples(0.5, 1.0, 128);
        let g = Gauge::from_density(&samples, 50.0, 1.0).unwrap();
        use crate::gauge::GaugeFn;
        for i in [0usize, 63, 127] {
            let x = (i + 1) as f64 / 128.0;
            assert!((g.value(x).unwrap() - x.sqrt()).abs() < 1e-12);
        }
    }
}
