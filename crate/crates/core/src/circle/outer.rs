//! Outer functions from boundary data and the per-N splitting diagnostics.
//!
//! `H(z) = exp((gamma / 2 pi) * ∫ (zeta + z)/(zeta - z) f(zeta) |dzeta|)` is
//! evaluated by the trapezoid rule on the sample grid. On the grid itself the
//! boundary modulus identity `|H| = exp(gamma f)` is used directly; evaluation
//! inside the disk is capped at `1 - 4 pi / M`, where the kernel is still
//! resolved by the grid.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::block::SplittingFunction;
use super::{build_splitting_function, CircleWeight};
use crate::error::{Error, Result};
use crate::gauge::GaugeFn;

/// Herglotz-sum evaluator for one splitting function. Precomputes the grid
/// points so repeated evaluations only pay for the kernel sweep.
pub struct OuterEvaluator {
    gamma: f64,
    points: Vec<Complex64>,
    data: Vec<f64>,
}

impl OuterEvaluator {
    pub fn new(f: &SplittingFunction) -> Self {
        Self::from_boundary_data(f.gamma(), f.values().to_vec())
    }

    /// Evaluator for arbitrary grid boundary data scaled by `gamma`.
    pub fn from_boundary_data(gamma: f64, data: Vec<f64>) -> Self {
        let grid = data.len();
        let points = (0..grid)
            .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / grid as f64))
            .collect();
        OuterEvaluator {
            gamma,
            points,
            data,
        }
    }

    pub fn grid_size(&self) -> usize {
        self.data.len()
    }

    /// Largest modulus at which the kernel is resolved by the grid.
    pub fn radius_limit(&self) -> f64 {
        1.0 - 2.0 * TAU / self.data.len() as f64
    }

    fn guard(&self, z: Complex64) -> Result<()> {
        let limit = self.radius_limit();
        // 1e-12 forgives the rounding of polar-constructed sample points
        if z.norm() > limit * (1.0 + 1e-12) {
            return Err(Error::Resolution {
                modulus: z.norm(),
                limit,
                grid: self.data.len(),
            });
        }
        Ok(())
    }

    /// `H(z)` by the complex Herglotz quadrature.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.guard(z)?;
        let mut sum = Complex64::new(0.0, 0.0);
        for (p, &v) in self.points.iter().zip(&self.data) {
            sum += (p + z) / (p - z) * v;
        }
        Ok((sum * (self.gamma / self.data.len() as f64)).exp())
    }

    /// `|H(z)|` by the real Poisson-kernel quadrature, the second route to
    /// the boundary modulus.
    pub fn modulus_via_poisson(&self, z: Complex64) -> Result<f64> {
        self.guard(z)?;
        let one_minus = 1.0 - z.norm_sqr();
        let mut sum = 0.0;
        for (p, &v) in self.points.iter().zip(&self.data) {
            sum += one_minus / (p - z).norm_sqr() * v;
        }
        Ok((sum * (self.gamma / self.data.len() as f64)).exp())
    }

    /// Boundary modulus straight from the identity `|H| = exp(gamma f)`.
    pub fn boundary_modulus(&self, j: usize) -> f64 {
        (self.gamma * self.data[j]).exp()
    }
}

/// `H_N(z)` for a single point; builds a throwaway evaluator.
pub fn outer_function(f: &SplittingFunction, z: Complex64) -> Result<Complex64> {
    OuterEvaluator::new(f).eval(z)
}

/// Maximum boundary modulus near the circle computed two ways: the complex
/// Herglotz route and the real Poisson route. The two sweeps share nothing
/// past the grid points, so their agreement exercises both kernels.
pub fn boundary_modulus_agreement(f: &SplittingFunction, radius: f64) -> Result<(f64, f64)> {
    let eval = OuterEvaluator::new(f);
    let mut max_complex = 0.0f64;
    let mut max_real = 0.0f64;
    for j in 0..eval.grid_size() {
        let z = eval.points[j] * radius;
        max_complex = max_complex.max(eval.eval(z)?.norm());
        max_real = max_real.max(eval.modulus_via_poisson(z)?);
    }
    Ok((max_complex, max_real))
}

/// Growth-versus-bound sample at one radius: the largest
/// `|H(z)| * exp(-eps h(1-|z|)/(1-|z|))` over the angular sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialBound {
    pub radius: f64,
    pub max_ratio: f64,
}

/// Diagnostics for one partition count `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDiag {
    pub n: u32,
    pub gamma: f64,
    /// `|H_N(0) - 1|`.
    pub origin_deviation: f64,
    /// `∫ |H_N|^t w` over the grid, by the boundary modulus identity.
    pub integral_wt: f64,
    /// `max |H_N(z) - 1|` over the compact disk `|z| <= 1/2`.
    pub compact_max_dev: f64,
    /// Observed Poisson growth constant: largest
    /// `(1-|z|) log|H_N(z)| / (2 gamma h(1-|z|))` over the radial sweep.
    pub c1_measured: f64,
    /// Per-radius bound ratios, plottable.
    pub bound_profile: Vec<RadialBound>,
    /// Whether `max_j |H_N|^t w <= 1 + w` held on every sample
    /// (tested only when `t * gamma <= 1`, which the schedule guarantees).
    pub weight_bound_ok: bool,
    pub skipped_arcs: usize,
    pub premise_arcs: usize,
}

/// Splitting diagnostics across a ladder of partition counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub grid_size: usize,
    pub t: f64,
    pub eps: f64,
    pub per_n: Vec<SplitDiag>,
}

const PROFILE_ANGLES: usize = 96;
const COMPACT_ANGLES: usize = 64;

/// Runs the splitting pipeline for each `N` and collects the trend data:
/// the weighted integral, the compact-disk deviation, the growth-bound
/// profile, and the measured Poisson constant.
pub fn verify_splitting<H: GaugeFn>(
    w: &CircleWeight,
    h: &H,
    levels: &[u32],
    eps: f64,
) -> Result<SplittingReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::validation(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let grid = w.grid_size();
    let cell = w.cell_angle();
    let mut per_n = Vec::with_capacity(levels.len());
    for &level in levels {
        let f = build_splitting_function(w, level, h)?;
        let eval = OuterEvaluator::new(&f);
        let gamma = f.gamma();
        let t = f.t();

        let origin_deviation = (eval.eval(Complex64::new(0.0, 0.0))? - 1.0).norm();

        let mut integral_wt = 0.0;
        let mut weight_bound_ok = t * gamma <= 1.0 + 1e-12;
        for (j, &wj) in w.samples().iter().enumerate() {
            let modulus_t = (t * gamma * f.values()[j]).exp();
            integral_wt += modulus_t * wj * cell;
            if modulus_t * wj > (1.0 + wj) * (1.0 + 1e-9) {
                weight_bound_ok = false;
            }
        }

        let mut compact_max_dev = (eval.eval(Complex64::new(0.0, 0.0))? - 1.0).norm();
        for &r in &[0.125, 0.25, 0.375, 0.5] {
            for i in 0..COMPACT_ANGLES {
                let theta = TAU * (i as f64 + 0.5) / COMPACT_ANGLES as f64;
                let dev = (eval.eval(Complex64::from_polar(r, theta))? - 1.0).norm();
                compact_max_dev = compact_max_dev.max(dev);
            }
        }

        let limit = eval.radius_limit();
        let mut radii = vec![0.25, 0.5, 0.75, 0.9, 0.96, 0.99];
        radii.push(1.0 - 4.0 * TAU / grid as f64);
        radii.push(1.0 - 2.0 * TAU / grid as f64);
        radii.retain(|&r| r <= limit);
        radii.dedup();
        let mut bound_profile = Vec::with_capacity(radii.len());
        let mut c1_measured = 0.0f64;
        for &r in &radii {
            let decay = 1.0 - r;
            let envelope = (eps * h.value(decay)? / decay).exp();
            let mut max_ratio = 0.0f64;
            for i in 0..PROFILE_ANGLES {
                let theta = TAU * (i as f64 + 0.5) / PROFILE_ANGLES as f64;
                let modulus = eval.eval(Complex64::from_polar(r, theta))?.norm();
                max_ratio = max_ratio.max(modulus / envelope);
                if modulus > 1.0 {
                    let c1 = decay * modulus.ln() / (2.0 * gamma * h.value(decay)?);
                    c1_measured = c1_measured.max(c1);
                }
            }
            bound_profile.push(RadialBound {
                radius: r,
                max_ratio,
            });
        }

        let skipped_arcs = f.blocks().iter().filter(|b| b.skipped).count();
        let premise_arcs = f.blocks().iter().filter(|b| b.premise_met).count();
        per_n.push(SplitDiag {
            n: level,
            gamma,
            origin_deviation,
            integral_wt,
            compact_max_dev,
            c1_measured,
            bound_profile,
            weight_bound_ok,
            skipped_arcs,
            premise_arcs,
        });
    }
    Ok(SplittingReport {
        grid_size: grid,
        t: w.t(),
        eps,
        per_n,
    })
}
