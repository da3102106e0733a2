//! Splitting machinery on the unit circle: sampled weights, sublevel sets of
//! `log+(1/w)`, zero-mean block functions packed under the gauge, and the
//! outer functions built from them.
//!
//! The circle is discretized by `M` uniform samples at the points
//! `exp(2 pi i j / M)`. Arcs are half-open runs of grid cells, assigned
//! left-closed, and each arc is mapped to `[0,1]` so the cube packer can run
//! on it unchanged; the arc length enters only by rescaling the gauge
//! argument.

mod block;
mod outer;

pub use block::{build_block, build_splitting_function, BlockFunction, SplittingFunction};
pub use outer::{
    boundary_modulus_agreement, outer_function, verify_splitting, OuterEvaluator, RadialBound,
    SplitDiag, SplittingReport,
};

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::gauge::GaugeFn;

/// Comparison slack when testing `log+(1/w) <= N`, absorbing the rounding of
/// `exp`/`ln` round trips in weight data.
const LEVEL_SLACK: f64 = 1e-12;

/// Octave-block decay ratio below which a gauge series is judged convergent.
const OCTAVE_RATIO: f64 = 0.75;

/// A non-negative integrable weight sampled on the uniform circle grid,
/// together with the norm exponent `t` it will be integrated with.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleWeight {
    samples: Vec<f64>,
    t: f64,
}

impl CircleWeight {
    pub fn new(samples: Vec<f64>, t: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::validation(
                "a circle weight needs at least two samples",
            ));
        }
        if samples.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::validation(
                "weight samples must be finite and non-negative",
            ));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::validation(format!(
                "exponent t must be positive, got {t}"
            )));
        }
        Ok(CircleWeight { samples, t })
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Grid spacing `2 pi / M`.
    pub fn cell_angle(&self) -> f64 {
        TAU / self.samples.len() as f64
    }

    /// `log+(1/w)` at one sample; `+inf` where the weight vanishes.
    pub fn log_roof(&self, j: usize) -> f64 {
        let w = self.samples[j];
        if w == 0.0 {
            f64::INFINITY
        } else {
            (-w.ln()).max(0.0)
        }
    }
}

/// Mask of the grid points where `log+(1/w) <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SublevelSet {
    mask: Vec<bool>,
    level: u32,
}

impl SublevelSet {
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn contains(&self, j: usize) -> bool {
        self.mask[j]
    }
}

/// Points where the weight is not yet exponentially small at scale `N`.
/// Monotone in `N`.
pub fn sublevel_set(w: &CircleWeight, level: u32) -> Result<SublevelSet> {
    if level < 1 {
        return Err(Error::validation("sublevel index must be at least 1"));
    }
    let bound = level as f64 * (1.0 + LEVEL_SLACK) + LEVEL_SLACK;
    let mask = (0..w.grid_size()).map(|j| w.log_roof(j) <= bound).collect();
    Ok(SublevelSet { mask, level })
}

/// A half-open run of grid cells, possibly wrapping past the seam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GridArc {
    pub start: usize,
    pub len: usize,
}

impl GridArc {
    pub fn new(start: usize, len: usize, grid: usize) -> Result<Self> {
        if len == 0 || len > grid || start >= grid {
            return Err(Error::validation(format!(
                "arc start {start} len {len} invalid on a {grid}-point grid"
            )));
        }
        Ok(GridArc { start, len })
    }

    /// Grid index of the arc's `j`-th cell.
    pub fn cell(&self, j: usize, grid: usize) -> usize {
        (self.start + j) % grid
    }

    /// Arc length in radians on an `M`-point grid.
    pub fn length(&self, grid: usize) -> f64 {
        self.len as f64 / grid as f64 * TAU
    }
}

/// View of a gauge with its argument rescaled by a fixed arc length, mapping
/// arc mass budgets onto unit-interval cube budgets.
pub(crate) struct ArcGauge<'a, H: GaugeFn> {
    inner: &'a H,
    scale: f64,
}

impl<'a, H: GaugeFn> ArcGauge<'a, H> {
    pub(crate) fn new(inner: &'a H, scale: f64) -> Self {
        ArcGauge { inner, scale }
    }
}

impl<H: GaugeFn> GaugeFn for ArcGauge<'_, H> {
    fn value(&self, x: f64) -> Result<f64> {
        self.inner.value(self.scale * x)
    }

    fn domain_max(&self) -> f64 {
        self.inner.domain_max() / self.scale
    }
}

/// The vanishing sequence driving the splitting: `gamma_N` balances the
/// divergence of `h(x)/x` so that `gamma_N -> 0` while
/// `gamma_N h(2 pi / N) / (2 pi / N) -> inf`, and `t * gamma_N <= 1` always.
pub fn choose_gamma<H: GaugeFn>(level: u32, h: &H, t: f64) -> Result<f64> {
    if level < 1 {
        return Err(Error::validation("gamma schedule index must be at least 1"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::validation(format!(
            "exponent t must be positive, got {t}"
        )));
    }
    let x = TAU / level as f64;
    let ratio = h.value(x)? / x;
    let finer_ratio = h.value(x / 2.0)? / (x / 2.0);
    if finer_ratio <= ratio * (1.0 + 1e-9) {
        log::warn!(
            "gauge ratio h(x)/x does not grow below the scale x = {x}; \
             the gamma schedule will not collapse the weight"
        );
    }
    Ok((1.0 / t).min(ratio.powf(-0.5)))
}

/// Partial gauge series of a closed set's complementary arc lengths, with a
/// convergence verdict.
///
/// The verdict compares octave blocks of the descending-sorted terms: the
/// series is judged convergent when the last two octave-to-octave ratios both
/// fall below the decay threshold. Fewer than four octaves of data count as
/// convergent, matching the finite-family case.
pub fn is_h_carleson<H: GaugeFn>(arc_lengths: &[f64], h: &H) -> Result<(bool, f64)> {
    let mut terms = Vec::with_capacity(arc_lengths.len());
    let mut total_len = 0.0;
    for &len in arc_lengths {
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::validation(format!(
                "complementary arc lengths must be positive, got {len}"
            )));
        }
        total_len += len;
        terms.push(h.value(len)?);
    }
    if total_len > TAU * (1.0 + 1e-9) {
        return Err(Error::validation(format!(
            "complementary arcs total {total_len} exceeds the circle length"
        )));
    }
    let sum: f64 = terms.iter().sum();
    terms.sort_by(|a, b| b.partial_cmp(a).expect("terms are finite"));

    let octaves = octave_blocks(&terms);
    if octaves.len() < 4 {
        return Ok((true, sum));
    }
    let k = octaves.len();
    let last_ok = block_ratio(octaves[k - 2], octaves[k - 1]) <= OCTAVE_RATIO;
    let prev_ok = block_ratio(octaves[k - 3], octaves[k - 2]) <= OCTAVE_RATIO;
    Ok((last_ok && prev_ok, sum))
}

/// Sums of the descending terms over index octaves `[2^r - 1, 2^{r+1} - 1)`.
/// A trailing octave that is less than half populated is dropped; a fuller
/// one is scaled up to its nominal width so decay ratios stay comparable.
fn octave_blocks(terms: &[f64]) -> Vec<f64> {
    let mut blocks = Vec::new();
    let mut start = 0usize;
    let mut width = 1usize;
    while start < terms.len() {
        let end = (start + width).min(terms.len());
        let actual = end - start;
        let sum: f64 = terms[start..end].iter().sum();
        if actual * 2 >= width {
            blocks.push(sum * (width as f64 / actual as f64));
        }
        start = end;
        width *= 2;
    }
    blocks
}

fn block_ratio(prev: f64, next: f64) -> f64 {
    if prev == 0.0 {
        0.0
    } else {
        next / prev
    }
}
