//! Near-optimal mass packing under a roof bound and per-cube gauge budgets.
//!
//! The packer caps the roof at the finest-cell density, then sweeps the
//! dyadic levels bottom-up, scaling the mass inside every cube whose budget
//! `h(volume)` is exceeded so that the budget holds with equality. Cubes that
//! get scaled are the bottlenecks; their maximal antichain is the semi-cover
//! certifying optimality of the result up to the dimensional constant `3^n`.
//!
//! Per-cell integrals are `value * 2^{-n m}` throughout, and every sum runs
//! in ascending flat-index order so results are bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::dyadic::{maximal_subset, CellField, DyadicCube};
use crate::error::{Error, Result};
use crate::gauge::GaugeFn;

/// Relative slack on the budget comparison, guarding against spurious
/// bottlenecks produced by rounding.
const BUDGET_SLACK: f64 = 1e-12;

/// Piecewise-constant roof on the level-`m` cells; `+inf` values allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RoofGrid {
    field: CellField,
}

impl RoofGrid {
    pub fn new(field: CellField) -> Self {
        RoofGrid { field }
    }

    pub fn field(&self) -> &CellField {
        &self.field
    }
}

/// Finite non-negative candidate mass function on the same cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MassFunction {
    field: CellField,
}

impl MassFunction {
    pub fn new(field: CellField) -> Result<Self> {
        if field.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("mass function values must be finite"));
        }
        Ok(MassFunction { field })
    }

    pub fn field(&self) -> &CellField {
        &self.field
    }

    /// Total integral, summed in ascending flat order.
    pub fn total(&self) -> f64 {
        let v = self.field.cell_volume();
        self.field.values().iter().map(|x| x * v).sum()
    }

    /// Integral over one dyadic cube.
    pub fn cube_total(&self, cube: &DyadicCube) -> Result<f64> {
        let v = self.field.cell_volume();
        let values = self.field.values();
        let mut sum = 0.0;
        for cell in cube.cells_under(self.field.depth())? {
            sum += values[cell] * v;
        }
        Ok(sum)
    }
}

/// One budget-saturating rescale: the cube and its factor `c < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStep {
    pub cube: DyadicCube,
    pub factor: f64,
}

/// Packed mass function with its bottleneck semi-cover and value trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackResult {
    /// The feasible packed function, `3^{-n}` times the raw field.
    pub f: MassFunction,
    /// The raw field: all dyadic budgets hold, general cubes may exceed
    /// their budget by at most `3^n`.
    pub f_raw: MassFunction,
    /// Maximal antichain of cubes whose budget is saturated.
    pub bottlenecks: Vec<DyadicCube>,
    /// Integral of `f`.
    pub primal_value: f64,
    /// Integral of `f_raw`; equals the dyadic min-cut of the roof.
    pub raw_value: f64,
    /// Every rescale performed, in sweep order (finest level first).
    pub trace: Vec<ScalingStep>,
}

/// `min(R, 2^{n m} h(2^{-n m}))`: the roof capped at the densest mass any
/// single cell may carry. Infinite roof values become the cap exactly.
pub fn initial_cap<H: GaugeFn>(roof: &RoofGrid, h: &H) -> Result<MassFunction> {
    let field = roof.field();
    let v_leaf = field.cell_volume();
    let cap = h.value(v_leaf)? / v_leaf;
    let values = field.values().iter().map(|&r| r.min(cap)).collect();
    MassFunction::new(CellField::new(field.dim(), field.depth(), values)?)
}

/// One sweep of level `k`: every cube of level `k - 1` whose mass exceeds its
/// budget `h(volume)` is scaled down to exact equality. Returns the scaled
/// field and the `(cube, factor)` pairs with factor `< 1`.
pub fn sweep_level<H: GaugeFn>(
    f: &MassFunction,
    k: u32,
    h: &H,
) -> Result<(MassFunction, Vec<ScalingStep>)> {
    let m = f.field().depth();
    if k < 1 || k > m {
        return Err(Error::validation(format!(
            "sweep level {k} outside 1..={m}"
        )));
    }
    let mut field = f.field().clone();
    let budget = h.value(0.5f64.powi((field.dim() as u32 * (k - 1)) as i32))?;
    let steps = sweep_in_place(&mut field, k, budget);
    Ok((MassFunction { field }, steps))
}

fn sweep_in_place(field: &mut CellField, k: u32, budget: f64) -> Vec<ScalingStep> {
    let n = field.dim();
    let m = field.depth();
    let v_leaf = field.cell_volume();
    let level = k - 1;
    let edge = 1u64 << level;
    let mut steps = Vec::new();
    let mut coords = vec![0u64; n];
    loop {
        let cube = DyadicCube::new(level, coords.clone()).expect("coords in range");
        let cells = cube.cells_under(m).expect("level <= m");
        let mut total = 0.0;
        let mut idx = Vec::with_capacity(cells.len());
        for cell in cells {
            total += field.values()[cell] * v_leaf;
            idx.push(cell);
        }
        if total > budget * (1.0 + BUDGET_SLACK) {
            let factor = budget / total;
            let values = field.values_mut();
            for cell in idx {
                values[cell] *= factor;
            }
            steps.push(ScalingStep { cube, factor });
        }
        // next cube, last coordinate fastest
        let mut j = n;
        while j > 0 {
            j -= 1;
            coords[j] += 1;
            if coords[j] < edge {
                break;
            }
            coords[j] = 0;
        }
        if j == 0 && coords[0] == 0 {
            break;
        }
    }
    steps
}

/// Runs the full pipeline: initial cap, sweeps from the finest level up to
/// the root, bottleneck extraction, and the final `3^{-n}` normalization.
pub fn pack<H: GaugeFn>(roof: &RoofGrid, h: &H) -> Result<PackResult> {
    let n = roof.field().dim();
    let m = roof.field().depth();
    if m < 1 {
        return Err(Error::validation("roof depth must be at least 1"));
    }
    let mut field = initial_cap(roof, h)?.field.clone();
    let mut trace = Vec::new();
    for k in (1..=m).rev() {
        let budget = h.value(0.5f64.powi((n as u32 * (k - 1)) as i32))?;
        trace.extend(sweep_in_place(&mut field, k, budget));
    }
    let scaled: Vec<DyadicCube> = trace.iter().map(|s| s.cube.clone()).collect();
    let bottlenecks = maximal_subset(&scaled);
    let f_raw = MassFunction {
        field: field.clone(),
    };
    let raw_value = f_raw.total();
    let norm = 3.0f64.powi(n as i32);
    for v in field.values_mut() {
        *v /= norm;
    }
    let f = MassFunction { field };
    let primal_value = raw_value / norm;
    Ok(PackResult {
        f,
        f_raw,
        bottlenecks,
        primal_value,
        raw_value,
        trace,
    })
}
