//! Zero-mean block functions on arcs and their sum, the splitting function.
//!
//! A block packs the roof `log+(1/w)` outside the sublevel set over a dyadic
//! tree local to its arc, then subtracts the constant on the sublevel part
//! that makes the arc integral vanish. The packed positive part keeps every
//! sub-arc within its gauge budget; the constant drives the function to a
//! strictly negative plateau wherever the weight survives.

use super::{sublevel_set, ArcGauge, CircleWeight, GridArc};
use crate::dyadic::CellField;
use crate::error::{Error, Result};
use crate::gauge::GaugeFn;
use crate::pack::{pack, RoofGrid};

/// Relative tolerance for the packed-value-versus-budget comparison deciding
/// whether an arc meets the full covering premise.
const PREMISE_SLACK: f64 = 1e-9;

/// Fraction of the arc budget the packed positive part is guaranteed to
/// reach whenever the covering premise holds (the one-dimensional duality
/// constant).
pub const BLOCK_VALUE_FRACTION: f64 = 1.0 / 3.0;

/// One block: values on its arc (zero elsewhere on the circle), the offset
/// subtracted on the sublevel part, and the packing diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockFunction {
    pub arc: GridArc,
    /// Per-cell values along the arc, `values[j]` at grid cell
    /// `(arc.start + j) % M`.
    pub values: Vec<f64>,
    /// The constant `p` subtracted on the sublevel part of the arc.
    pub offset: f64,
    /// Integral of the packed positive part over the arc.
    pub positive_part_integral: f64,
    /// Arc-local dyadic min-cut of the scaled roof (equals three times the
    /// positive part integral).
    pub min_cut_value: f64,
    /// `h(|I|)`, the budget of the whole arc.
    pub arc_budget: f64,
    /// Set when the sublevel set misses the arc entirely, so no block is
    /// placed there.
    pub skipped: bool,
    /// Whether the packed value reached `h(|I|)/3`, i.e. covering the roof
    /// inside the arc costs as much as covering the whole arc.
    pub premise_met: bool,
}

impl BlockFunction {
    fn zero(arc: GridArc, arc_budget: f64) -> Self {
        BlockFunction {
            values: vec![0.0; arc.len],
            arc,
            offset: 0.0,
            positive_part_integral: 0.0,
            min_cut_value: 0.0,
            arc_budget,
            skipped: true,
            premise_met: false,
        }
    }

    /// Arc integral of the block, `sum * 2 pi / M`; zero by construction.
    pub fn integral(&self, grid: usize) -> f64 {
        let cell = std::f64::consts::TAU / grid as f64;
        self.values.iter().map(|v| v * cell).sum()
    }
}

/// Builds the block for one arc at sublevel `N`.
///
/// The arc must span `2^q` grid cells with `q >= 1` so it carries a dyadic
/// tree. When the sublevel set misses the arc the zero block is returned
/// with the `skipped` flag set.
pub fn build_block<H: GaugeFn>(
    w: &CircleWeight,
    level: u32,
    arc: GridArc,
    h: &H,
) -> Result<BlockFunction> {
    let grid = w.grid_size();
    if !arc.len.is_power_of_two() || arc.len < 2 {
        return Err(Error::validation(format!(
            "arc of {} cells does not carry a dyadic tree (need a power of two, at least 2)",
            arc.len
        )));
    }
    let arc_len = arc.length(grid);
    if h.domain_max() < arc_len {
        return Err(Error::validation(format!(
            "gauge domain {} too small for an arc of length {arc_len}",
            h.domain_max()
        )));
    }
    let arc_budget = h.value(arc_len)?;
    let sublevel = sublevel_set(w, level)?;
    let inside: Vec<bool> = (0..arc.len)
        .map(|j| sublevel.contains(arc.cell(j, grid)))
        .collect();
    let inside_count = inside.iter().filter(|&&b| b).count();
    if inside_count == 0 {
        return Ok(BlockFunction::zero(arc, arc_budget));
    }

    // Roof for the packer, in unit-interval coordinates: the scaled
    // log-roof off the sublevel set, zero on it.
    let depth = arc.len.trailing_zeros();
    let roof_values: Vec<f64> = (0..arc.len)
        .map(|j| {
            if inside[j] {
                0.0
            } else {
                arc_len * w.log_roof(arc.cell(j, grid))
            }
        })
        .collect();
    let roof = RoofGrid::new(CellField::new(1, depth, roof_values)?);
    let arc_gauge = ArcGauge::new(h, arc_len);
    let packed = pack(&roof, &arc_gauge)?;

    let positive_part_integral = packed.primal_value;
    let min_cut_value = packed.raw_value;
    let sublevel_measure = inside_count as f64 / grid as f64 * std::f64::consts::TAU;
    let offset = positive_part_integral / sublevel_measure;
    let values = packed
        .f
        .field()
        .values()
        .iter()
        .zip(&inside)
        .map(|(&v, &in_a)| {
            let positive = v / arc_len;
            if in_a {
                positive - offset
            } else {
                positive
            }
        })
        .collect();
    let premise_met =
        positive_part_integral >= BLOCK_VALUE_FRACTION * arc_budget * (1.0 - PREMISE_SLACK);
    Ok(BlockFunction {
        arc,
        values,
        offset,
        positive_part_integral,
        min_cut_value,
        arc_budget,
        skipped: false,
        premise_met,
    })
}

/// The sum of the per-arc blocks over an equal partition of the circle,
/// with its vanishing coefficient attached.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingFunction {
    values: Vec<f64>,
    level: u32,
    gamma: f64,
    t: f64,
    arcs: Vec<GridArc>,
    blocks: Vec<BlockFunction>,
}

impl SplittingFunction {
    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    /// Boundary values on the circle grid.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn arcs(&self) -> &[GridArc] {
        &self.arcs
    }

    pub fn blocks(&self) -> &[BlockFunction] {
        &self.blocks
    }

    /// Circle integral `sum * 2 pi / M`; zero by construction.
    pub fn integral(&self) -> f64 {
        let cell = std::f64::consts::TAU / self.values.len() as f64;
        self.values.iter().map(|v| v * cell).sum()
    }
}

/// Partitions the circle into `N` equal half-open arcs (grid points assigned
/// left-closed), builds the block on every arc the sublevel set meets, and
/// attaches the vanishing coefficient from [`super::choose_gamma`].
pub fn build_splitting_function<H: GaugeFn>(
    w: &CircleWeight,
    level: u32,
    h: &H,
) -> Result<SplittingFunction> {
    let grid = w.grid_size();
    if level < 1 {
        return Err(Error::validation("partition count must be at least 1"));
    }
    if !grid.is_multiple_of(level as usize) {
        return Err(Error::validation(format!(
            "grid size {grid} is not divisible into {level} arcs"
        )));
    }
    let arc_cells = grid / level as usize;
    if !arc_cells.is_power_of_two() || arc_cells < 2 {
        return Err(Error::validation(format!(
            "arcs of {arc_cells} cells do not carry a dyadic tree"
        )));
    }
    let mut values = vec![0.0; grid];
    let mut arcs = Vec::with_capacity(level as usize);
    let mut blocks = Vec::with_capacity(level as usize);
    for k in 0..level as usize {
        let arc = GridArc::new(k * arc_cells, arc_cells, grid)?;
        let block = build_block(w, level, arc, h)?;
        for (j, &v) in block.values.iter().enumerate() {
            values[arc.cell(j, grid)] = v;
        }
        arcs.push(arc);
        blocks.push(block);
    }
    let gamma = super::choose_gamma(level, h, w.t())?;
    Ok(SplittingFunction {
        values,
        level,
        gamma,
        t: w.t(),
        arcs,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::Gauge;
    use std::f64::consts::TAU;

    fn circle_sqrt_gauge() -> Gauge {
        Gauge::power(0.5, TAU).unwrap()
    }

    #[test]
    fn unit_weight_gives_a_zero_block() {
        let w = CircleWeight::new(vec![1.0; 64], 2.0).unwrap();
        let arc = GridArc::new(0, 16, 64).unwrap();
        let block = build_block(&w, 3, arc, &circle_sqrt_gauge()).unwrap();
        assert!(!block.skipped);
        assert!(block.values.iter().all(|&v| v == 0.0));
        assert_eq!(block.offset, 0.0);
    }

    #[test]
    fn dead_arc_is_skipped() {
        let w = CircleWeight::new(vec![0.0; 64], 2.0).unwrap();
        let arc = GridArc::new(16, 16, 64).unwrap();
        let block = build_block(&w, 5, arc, &circle_sqrt_gauge()).unwrap();
        assert!(block.skipped);
        assert!(block.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn half_dead_arc_packs_the_dead_half() {
        // weight vanishes on the left half of the arc, is 1 on the right
        let mut samples = vec![1.0; 64];
        for cell in samples.iter_mut().take(8) {
            *cell = 0.0;
        }
        let w = CircleWeight::new(samples, 2.0).unwrap();
        let arc = GridArc::new(0, 16, 64).unwrap();
        let h = circle_sqrt_gauge();
        let block = build_block(&w, 4, arc, &h).unwrap();
        assert!(!block.skipped);

        let arc_len = arc.length(64);
        // covering the dead half is the cheapest cut: h(|I|/2)
        let expect_cut = h.value(arc_len / 2.0).unwrap();
        assert!((block.min_cut_value - expect_cut).abs() < 1e-12 * expect_cut);
        assert!((block.positive_part_integral - expect_cut / 3.0).abs() < 1e-12 * expect_cut);
        // the offset spreads the packed mass over the live half
        let live = arc_len / 2.0;
        assert!((block.offset - block.positive_part_integral / live).abs() < 1e-12);
        // positive part lives on the dead half only
        for j in 8..16 {
            assert!(block.values[j] < 0.0);
        }
        assert!(block.values[..8].iter().any(|&v| v > 0.0));
    }

    #[test]
    fn block_integral_vanishes() {
        let samples: Vec<f64> = (0..128)
            .map(|j| {
                if j % 5 == 0 {
                    0.0
                } else {
                    0.4 + 0.1 * (j % 3) as f64
                }
            })
            .collect();
        let w = CircleWeight::new(samples, 2.0).unwrap();
        let arc = GridArc::new(32, 64, 128).unwrap();
        let block = build_block(&w, 2, arc, &circle_sqrt_gauge()).unwrap();
        assert!(block.integral(128).abs() < 1e-9);
    }

    #[test]
    fn odd_arc_lengths_are_rejected() {
        let w = CircleWeight::new(vec![1.0; 60], 2.0).unwrap();
        let arc = GridArc::new(0, 15, 60).unwrap();
        assert!(build_block(&w, 2, arc, &circle_sqrt_gauge()).is_err());
    }

    #[test]
    fn splitting_of_unit_weight_is_zero() {
        let w = CircleWeight::new(vec![1.0; 64], 2.0).unwrap();
        let f = build_splitting_function(&w, 4, &circle_sqrt_gauge()).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
        assert_eq!(f.arcs().len(), 4);
    }

    #[test]
    fn splitting_function_has_zero_mean() {
        let samples: Vec<f64> = (0..256)
            .map(|j| if j % 7 < 2 { 0.0 } else { 1.0 })
            .collect();
        let w = CircleWeight::new(samples, 2.0).unwrap();
        let f = build_splitting_function(&w, 8, &circle_sqrt_gauge()).unwrap();
        assert!(f.integral().abs() < 1e-9);
    }

    #[test]
    fn indivisible_partition_is_rejected() {
        let w = CircleWeight::new(vec![1.0; 64], 2.0).unwrap();
        assert!(build_splitting_function(&w, 3, &circle_sqrt_gauge()).is_err());
    }
}
