//! Gauge functions: continuous increasing `h` with `h(0) = 0`, concave-type
//! regularity `h(x)/x` non-increasing (R1), and the small-scale divergence
//! `h(x)/x -> inf` as `x -> 0` (R2).
//!
//! The gauge measures how much mass a cube may carry as a function of its
//! volume, and how much an arc may carry as a function of its length. All
//! downstream algorithms consume gauges through the [`GaugeFn`] trait so that
//! argument-rescaled views (arcs mapped to the unit interval) reuse the same
//! kernels.

use crate::error::{Error, Result};

/// Relative slack used when validating monotonicity of sampled data.
const MONO_TOL: f64 = 1e-9;

/// A divergence trend is accepted when the ratio `h(x)/x` grows by at least
/// this factor from the coarsest to the finest grid point.
const R2_TREND_FACTOR: f64 = 2.0;

/// Evaluable gauge curve. Implemented by [`Gauge`] and by internal rescaled
/// views of a gauge.
pub trait GaugeFn {
    /// `h(x)` for `x` in `[0, domain_max]`.
    fn value(&self, x: f64) -> Result<f64>;

    /// Largest argument at which the curve may be evaluated.
    fn domain_max(&self) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
enum GaugeKind {
    /// `h(x) = x^alpha`, `alpha` in `(0, 1)`.
    Power { alpha: f64 },
    /// `h(x) = x * ln(e * domain_max / x)`, the increasing extension of
    /// `x ln(1/x)` to an arbitrary domain (equal to `x ln(e/x)` when the
    /// domain is the unit interval).
    LogType,
    /// Monotone piecewise-linear interpolation through `(0, 0)` and the
    /// sample points; extended beyond the last sample with a constant
    /// `h(x)/x` ratio.
    Tabulated { xs: Vec<f64>, ys: Vec<f64> },
}

/// A gauge function `h` together with the largest argument it will be asked
/// to evaluate (1 for the unit cube, 2π for the circle).
#[derive(Debug, Clone, PartialEq)]
pub struct Gauge {
    kind: GaugeKind,
    domain_max: f64,
}

/// Outcome of the regularity diagnostics on a geometric grid.
///
/// R1 and R2 are pass/fail; the Dini-type ratio `∫_0^l h(x)/x dx / h(l)` is
/// reported as an observed range and never enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub r1_pass: bool,
    pub r2_pass: bool,
    pub r3_ratio_min: f64,
    pub r3_ratio_max: f64,
    pub grid_depth: u32,
}

impl Gauge {
    /// `h(x) = x^alpha` with `alpha` in `(0, 1)`.
    pub fn power(alpha: f64, domain_max: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 || alpha >= 1.0 {
            return Err(Error::InvalidGauge(format!(
                "power exponent must lie in (0, 1), got {alpha}"
            )));
        }
        check_domain_max(domain_max)?;
        Ok(Gauge {
            kind: GaugeKind::Power { alpha },
            domain_max,
        })
    }

    /// `h(x) = x * ln(e * domain_max / x)`; reduces to `x ln(e/x)` on `[0, 1]`.
    pub fn log_type(domain_max: f64) -> Result<Self> {
        check_domain_max(domain_max)?;
        Ok(Gauge {
            kind: GaugeKind::LogType,
            domain_max,
        })
    }

    /// Monotone piecewise-linear gauge through the given `(x, h(x))` samples.
    ///
    /// Samples must have strictly ascending positive `x`, strictly increasing
    /// positive `h`, and a non-increasing ratio `h(x)/x` (the sampled form of
    /// R1). The curve passes through `(0, 0)` and extends past the last
    /// sample with constant ratio.
    pub fn tabulated(samples: &[(f64, f64)], domain_max: f64) -> Result<Self> {
        check_domain_max(domain_max)?;
        if samples.len() < 2 {
            return Err(Error::InvalidGauge(
                "tabulated gauge needs at least two samples".into(),
            ));
        }
        let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
        validate_samples(&xs, &ys)?;
        Ok(Gauge {
            kind: GaugeKind::Tabulated { xs, ys },
            domain_max,
        })
    }

    /// Builds a gauge from a sampled decreasing density `G` via
    /// `h(x) = x * log(1/G(x))`.
    ///
    /// Samples are `(x, G(x))` pairs with ascending `x` and `G(x)` in
    /// `(0, 1)`. The resulting `h` is monotonically repaired by a running
    /// maximum; values above `clamp` are rejected, as are repaired samples
    /// that still violate R1 or show no R2 divergence trend.
    pub fn from_density(samples: &[(f64, f64)], clamp: f64, domain_max: f64) -> Result<Self> {
        check_domain_max(domain_max)?;
        if clamp.is_nan() || clamp <= 0.0 {
            return Err(Error::InvalidGauge(format!(
                "clamp must be positive, got {clamp}"
            )));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidGauge(
                "density gauge needs at least two samples".into(),
            ));
        }
        let mut xs = Vec::with_capacity(samples.len());
        let mut ys = Vec::with_capacity(samples.len());
        let mut running = 0.0f64;
        for (i, &(x, g)) in samples.iter().enumerate() {
            if x.is_nan() || x <= 0.0 || xs.last().is_some_and(|&p| x <= p) {
                return Err(Error::InvalidGauge(format!(
                    "density sample {i}: x values must be positive and strictly ascending"
                )));
            }
            if g.is_nan() || g <= 0.0 || g >= 1.0 {
                return Err(Error::InvalidGauge(format!(
                    "density sample {i}: G({x}) = {g} outside (0, 1)"
                )));
            }
            let h = x * (1.0 / g).ln();
            if h > clamp {
                return Err(Error::InvalidGauge(format!(
                    "density sample {i}: h({x}) = {h} exceeds clamp {clamp}"
                )));
            }
            running = running.max(h);
            xs.push(x);
            ys.push(running);
        }
        // R1 on the repaired samples; report the first offender.
        for i in 1..xs.len() {
            let prev = ys[i - 1] / xs[i - 1];
            let cur = ys[i] / xs[i];
            if cur > prev * (1.0 + MONO_TOL) {
                return Err(Error::InvalidGauge(format!(
                    "sample (x = {}, h = {}): ratio h(x)/x increases, R1 fails",
                    xs[i], ys[i]
                )));
            }
        }
        // R2 divergence trend on the sample grid.
        let ratio_fine = ys[0] / xs[0];
        let ratio_coarse = ys[ys.len() - 1] / xs[xs.len() - 1];
        if ratio_fine < ratio_coarse * R2_TREND_FACTOR * (1.0 - 1e-12) {
            return Err(Error::InvalidGauge(format!(
                "h(x)/x shows no divergence trend on the sample grid \
                 ({ratio_fine} at x = {} vs {ratio_coarse} at x = {}), R2 fails",
                xs[0],
                xs[xs.len() - 1]
            )));
        }
        Ok(Gauge {
            kind: GaugeKind::Tabulated { xs, ys },
            domain_max,
        })
    }

    /// Regularity diagnostics on the geometric grid `x_j = domain_max * 2^-j`,
    /// `j = 0..=grid_depth`.
    pub fn check_regularity(&self, grid_depth: u32) -> Result<RegularityReport> {
        if grid_depth < 2 {
            return Err(Error::validation(format!(
                "grid_depth must be at least 2, got {grid_depth}"
            )));
        }
        let mut values = Vec::with_capacity(grid_depth as usize + 1);
        for j in 0..=grid_depth {
            let x = self.domain_max * 0.5f64.powi(j as i32);
            values.push((x, self.value(x)?));
        }
        // x decreases with j: R1 wants h non-increasing and h/x non-decreasing in j.
        let mut r1_pass = true;
        for w in values.windows(2) {
            let (x0, h0) = w[0];
            let (x1, h1) = w[1];
            if h1 > h0 * (1.0 + MONO_TOL) {
                r1_pass = false;
            }
            if h1 / x1 < (h0 / x0) * (1.0 - MONO_TOL) {
                r1_pass = false;
            }
        }
        let ratio_coarse = values[0].1 / values[0].0;
        let (x_fine, h_fine) = values[values.len() - 1];
        let ratio_fine = h_fine / x_fine;
        let r2_pass = r1_pass && ratio_fine >= ratio_coarse * R2_TREND_FACTOR * (1.0 - 1e-12);

        let mut r3_min = f64::INFINITY;
        let mut r3_max = f64::NEG_INFINITY;
        for &(x, h) in &values {
            if h <= 0.0 {
                continue;
            }
            let ratio = self.dini_integral(x)? / h;
            r3_min = r3_min.min(ratio);
            r3_max = r3_max.max(ratio);
        }
        Ok(RegularityReport {
            r1_pass,
            r2_pass,
            r3_ratio_min: r3_min,
            r3_ratio_max: r3_max,
            grid_depth,
        })
    }

    /// `∫_0^l h(x)/x dx` by composite trapezoid after the substitution
    /// `x = l * exp(-u)`, which turns the integrable endpoint singularity of
    /// the integrand into a decaying tail.
    fn dini_integral(&self, upper: f64) -> Result<f64> {
        let h_upper = self.value(upper)?;
        if h_upper == 0.0 {
            return Ok(0.0);
        }
        let du = 1.0f64 / 128.0;
        let cutoff = 1e-13 * h_upper;
        let mut sum = 0.5 * h_upper;
        let mut u = du;
        while u < 200.0 {
            let h = self.value(upper * (-u).exp())?;
            sum += h;
            if h < cutoff {
                break;
            }
            u += du;
        }
        Ok(sum * du)
    }

    pub fn domain_max(&self) -> f64 {
        self.domain_max
    }
}

impl GaugeFn for Gauge {
    fn value(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 || x > self.domain_max {
            return Err(Error::GaugeDomain {
                x,
                domain_max: self.domain_max,
            });
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok(match &self.kind {
            GaugeKind::Power { alpha } => x.powf(*alpha),
            GaugeKind::LogType => x * (std::f64::consts::E * self.domain_max / x).ln(),
            GaugeKind::Tabulated { xs, ys } => interp_monotone(xs, ys, x),
        })
    }

    fn domain_max(&self) -> f64 {
        self.domain_max
    }
}

fn check_domain_max(domain_max: f64) -> Result<()> {
    if !domain_max.is_finite() || domain_max <= 0.0 {
        return Err(Error::InvalidGauge(format!(
            "domain_max must be positive and finite, got {domain_max}"
        )));
    }
    Ok(())
}

fn validate_samples(xs: &[f64], ys: &[f64]) -> Result<()> {
    for i in 0..xs.len() {
        if !(xs[i] > 0.0 && xs[i].is_finite()) || !(ys[i] > 0.0 && ys[i].is_finite()) {
            return Err(Error::InvalidGauge(format!(
                "sample {i}: values must be positive and finite"
            )));
        }
        if i > 0 {
            if xs[i] <= xs[i - 1] {
                return Err(Error::InvalidGauge(format!(
                    "sample {i}: x values must be strictly ascending"
                )));
            }
            if ys[i] <= ys[i - 1] {
                return Err(Error::InvalidGauge(format!(
                    "sample {i}: h values must be strictly increasing"
                )));
            }
            let prev = ys[i - 1] / xs[i - 1];
            let cur = ys[i] / xs[i];
            if cur > prev * (1.0 + MONO_TOL) {
                return Err(Error::InvalidGauge(format!(
                    "sample {i}: ratio h(x)/x increases, R1 fails"
                )));
            }
        }
    }
    Ok(())
}

/// Linear interpolation through `(0, 0)` and the samples, constant-ratio
/// extension above the last sample. Sample-grid R1 propagates to the whole
/// interpolant: on each segment the chord slope is at most the left
/// endpoint's ratio.
fn interp_monotone(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last] * (x / xs[last]);
    }
    match xs.partition_point(|&p| p < x) {
        0 => ys[0] * (x / xs[0]),
        i => {
            let (x0, y0) = (xs[i - 1], ys[i - 1]);
            let (x1, y1) = (xs[i], ys[i]);
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_gauge_evaluates_analytically() {
        let g = Gauge::power(0.5, 1.0).unwrap();
        assert_eq!(g.value(0.25).unwrap(), 0.5);
        assert_eq!(g.value(0.0).unwrap(), 0.0);
    }

    #[test]
    fn log_gauge_is_one_at_one() {
        let g = Gauge::log_type(1.0).unwrap();
        assert!((g.value(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(g.value(0.0).unwrap(), 0.0);
    }

    #[test]
    fn log_gauge_rescales_with_domain() {
        // With a larger domain the ratio h(x)/x still decreases up to the
        // domain edge, where it reaches exactly 1.
        let g = Gauge::log_type(2.0 * std::f64::consts::PI).unwrap();
        let top = g.domain_max();
        assert!((g.value(top).unwrap() / top - 1.0).abs() < 1e-12);
        assert!(g.value(top / 2.0).unwrap() < g.value(top).unwrap());
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let g = Gauge::power(0.5, 1.0).unwrap();
        assert!(matches!(g.value(1.5), Err(Error::GaugeDomain { .. })));
        assert!(matches!(g.value(-0.1), Err(Error::GaugeDomain { .. })));
        assert!(matches!(g.value(f64::NAN), Err(Error::GaugeDomain { .. })));
    }

    #[test]
    fn power_exponent_outside_unit_interval_is_rejected() {
        assert!(Gauge::power(1.5, 1.0).is_err());
        assert!(Gauge::power(0.0, 1.0).is_err());
        assert!(Gauge::power(1.0, 1.0).is_err());
    }

    #[test]
    fn regularity_of_power_gauge() {
        let g = Gauge::power(0.5, 1.0).unwrap();
        let report = g.check_regularity(8).unwrap();
        assert!(report.r1_pass);
        assert!(report.r2_pass);
        // \int_0^l x^{-1/2} dx = 2 sqrt(l), so the Dini ratio is exactly 2.
        assert!((report.r3_ratio_min - 2.0).abs() < 1e-4);
        assert!((report.r3_ratio_max - 2.0).abs() < 1e-4);
    }

    #[test]
    fn regularity_of_log_gauge() {
        let g = Gauge::log_type(1.0).unwrap();
        let report = g.check_regularity(10).unwrap();
        assert!(report.r1_pass);
        assert!(report.r2_pass);
    }

    #[test]
    fn linear_table_fails_r2() {
        let samples: Vec<(f64, f64)> = (1..=32)
            .map(|i| (i as f64 / 32.0, i as f64 / 32.0))
            .collect();
        let g = Gauge::tabulated(&samples, 1.0).unwrap();
        let report = g.check_regularity(4).unwrap();
        assert!(report.r1_pass);
        assert!(!report.r2_pass);
    }

    #[test]
    fn grid_depth_below_two_is_rejected() {
        let g = Gauge::power(0.5, 1.0).unwrap();
        assert!(g.check_regularity(1).is_err());
    }

    #[test]
    fn tabulated_rejects_non_monotone_samples() {
        let err = Gauge::tabulated(&[(0.25, 0.6), (0.5, 0.5)], 1.0);
        assert!(matches!(err, Err(Error::InvalidGauge(_))));
    }

    #[test]
    fn tabulated_rejects_r1_violation() {
        // h jumps superlinearly between the samples: ratio increases.
        let err = Gauge::tabulated(&[(0.25, 0.1), (0.5, 0.4)], 1.0);
        assert!(matches!(err, Err(Error::InvalidGauge(_))));
    }

    #[test]
    fn density_power_law_matches_log_gauge_convention() {
        // G(x) = x gives h(x) = x log(1/x) = x ln(e/x) - x.
        let samples: Vec<(f64, f64)> = (1..=64)
            .map(|i| (i as f64 / 256.0, i as f64 / 256.0))
            .collect();
        let g = Gauge::from_density(&samples, 10.0, 1.0).unwrap();
        let builtin = Gauge::log_type(1.0).unwrap();
        for i in [1usize, 7, 20, 63] {
            let x = (i + 1) as f64 / 256.0;
            let expect = builtin.value(x).unwrap() - x;
            assert!((g.value(x).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn density_exponential_matches_power_gauge() {
        // G(x) = exp(-x^{alpha-1}) with alpha = 1/2 gives h(x) = sqrt(x).
        let samples: Vec<(f64, f64)> = (1..=64)
            .map(|i| {
                let x = i as f64 / 64.0;
                (x, (-x.powf(-0.5)).exp())
            })
            .collect();
        let g = Gauge::from_density(&samples, 10.0, 1.0).unwrap();
        for i in [0usize, 15, 63] {
            let x = (i + 1) as f64 / 64.0;
            assert!((g.value(x).unwrap() - x.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_density_fails_r2() {
        let samples: Vec<(f64, f64)> = (1..=16).map(|i| (i as f64 / 16.0, 0.5)).collect();
        let err = Gauge::from_density(&samples, 10.0, 1.0);
        assert!(matches!(err, Err(Error::InvalidGauge(msg)) if msg.contains("R2")));
    }

    #[test]
    fn density_clamp_rejects_oversized_values() {
        let samples = [(0.5, 1e-9), (1.0, 0.5)];
        let err = Gauge::from_density(&samples, 5.0, 1.0);
        assert!(matches!(err, Err(Error::InvalidGauge(msg)) if msg.contains("clamp")));
    }

    #[test]
    fn tabulated_extends_past_last_sample_with_constant_ratio() {
        let g = Gauge::tabulated(&[(0.5, 0.7), (1.0, 1.0)], 4.0).unwrap();
        assert!((g.value(2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((g.value(4.0).unwrap() - 4.0).abs() < 1e-15);
    }
}
