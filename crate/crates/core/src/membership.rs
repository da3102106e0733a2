//! Certification that a mass function obeys its roof and every cube budget.
//!
//! Cube constraints are checked over grid-aligned cubes (any corner, any side
//! measured in cells). An n-dimensional prefix-sum table makes each cube
//! integral O(2^n). Exhaustive enumeration runs up to `n * m <= 12`; beyond
//! that a seeded sample of cubes is checked and the report says so.

use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicCube;
use crate::error::{Error, Result};
use crate::gauge::GaugeFn;
use crate::pack::{MassFunction, PackResult, RoofGrid};

/// Relative slack on every budget and roof comparison, absorbing rounding
/// accumulated across the packing sweeps.
pub const MEMBERSHIP_SLACK: f64 = 1e-9;

/// Largest `n * m` for which every grid cube is enumerated.
const EXHAUSTIVE_LIMIT: u32 = 12;

/// Cubes sampled per side class when enumeration is infeasible.
const SAMPLE_COUNT: usize = 20_000;

const DEFAULT_SAMPLE_SEED: u64 = 0x6d61_7373_7061_636b;

/// An axis-aligned cube of `side^n` grid cells with its corner in cell
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCube {
    pub corner: Vec<u64>,
    pub side: u64,
}

impl GridCube {
    pub fn new(corner: Vec<u64>, side: u64) -> Self {
        GridCube { corner, side }
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    /// `(side * 2^-m)^n`.
    pub fn volume(&self, m: u32) -> f64 {
        (self.side as f64 * 0.5f64.powi(m as i32)).powi(self.dim() as i32)
    }
}

/// Which family of cubes a membership check walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeScope {
    /// Dyadic cubes of every level `0..=m`.
    Dyadic,
    /// Every grid-aligned cube; falls back to a seeded sample when the grid
    /// is too large to enumerate.
    AllGrid { sample_seed: u64 },
}

impl CubeScope {
    pub fn all_grid() -> Self {
        CubeScope::AllGrid {
            sample_seed: DEFAULT_SAMPLE_SEED,
        }
    }
}

/// A single constraint violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `f > R` on a cell.
    Pointwise {
        cell: Vec<u64>,
        value: f64,
        roof: f64,
    },
    /// A cube integral exceeds its gauge budget.
    CubeMass {
        cube: GridCube,
        mass: f64,
        budget: f64,
        excess: f64,
    },
}

/// Result of a membership check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
    pub cubes_checked: usize,
    pub exhaustive: bool,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// N-dimensional table of cumulative cell integrals; any grid-cube integral
/// is reconstructed from `2^n` corner lookups.
#[derive(Debug, Clone)]
pub struct PrefixSumTable {
    n: usize,
    m: u32,
    edge: usize,
    strides: Vec<usize>,
    sums: Vec<f64>,
}

impl PrefixSumTable {
    /// Builds the table of cell integrals (`value * 2^{-n m}`) of a field.
    pub fn new(f: &MassFunction) -> Self {
        let field = f.field();
        let n = field.dim();
        let m = field.depth();
        let edge = field.cells_per_edge() as usize;
        let padded = edge + 1;
        let mut strides = vec![1usize; n];
        for j in (0..n.saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * padded;
        }
        let mut sums = vec![0.0f64; padded.pow(n as u32)];
        let v_leaf = field.cell_volume();
        // place each cell integral at its 1-based position
        for (flat, &v) in field.values().iter().enumerate() {
            let coords = field.coords_of(flat);
            let mut pos = 0usize;
            for (j, &c) in coords.iter().enumerate() {
                pos += (c as usize + 1) * strides[j];
            }
            sums[pos] = v * v_leaf;
        }
        // accumulate along one axis at a time
        for &stride in strides.iter().take(n) {
            for pos in 0..sums.len() {
                let coord = (pos / stride) % padded;
                if coord > 0 {
                    sums[pos] += sums[pos - stride];
                }
            }
        }
        PrefixSumTable {
            n,
            m,
            edge,
            strides,
            sums,
        }
    }

    pub fn depth(&self) -> u32 {
        self.m
    }

    /// Integral of the field over a grid cube, by inclusion-exclusion on the
    /// `2^n` prefix corners.
    pub fn cube_integral(&self, cube: &GridCube) -> Result<f64> {
        if cube.dim() != self.n {
            return Err(Error::shape(format!(
                "cube dimension {} does not match table dimension {}",
                cube.dim(),
                self.n
            )));
        }
        if cube.side == 0
            || cube
                .corner
                .iter()
                .any(|&c| c + cube.side > self.edge as u64)
        {
            return Err(Error::validation(format!(
                "grid cube {:?} side {} out of range for edge {}",
                cube.corner, cube.side, self.edge
            )));
        }
        let mut total = 0.0;
        for mask in 0..(1u32 << self.n) {
            let mut pos = 0usize;
            let mut ones = 0u32;
            for j in 0..self.n {
                let hi = (mask >> j) & 1 == 1;
                let coord = cube.corner[j] as usize + if hi { cube.side as usize } else { 0 };
                pos += coord * self.strides[j];
                ones += hi as u32;
            }
            let sign = if (self.n as u32 - ones).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            total += sign * self.sums[pos];
        }
        Ok(total)
    }
}

/// Checks `f <= R` per cell and `∫_c f <= h(V(c))` for every cube in scope,
/// at the default slack [`MEMBERSHIP_SLACK`].
pub fn check_membership<H: GaugeFn>(
    f: &MassFunction,
    roof: &RoofGrid,
    h: &H,
    scope: CubeScope,
) -> Result<ViolationReport> {
    check_membership_with_slack(f, roof, h, scope, MEMBERSHIP_SLACK)
}

/// [`check_membership`] with an explicit relative slack on every comparison.
pub fn check_membership_with_slack<H: GaugeFn>(
    f: &MassFunction,
    roof: &RoofGrid,
    h: &H,
    scope: CubeScope,
    slack: f64,
) -> Result<ViolationReport> {
    if slack.is_nan() || slack < 0.0 {
        return Err(Error::validation(format!(
            "slack must be non-negative, got {slack}"
        )));
    }
    let field = f.field();
    if !field.same_shape(roof.field()) {
        return Err(Error::shape(format!(
            "mass function is {}^{} cells, roof is {}^{}",
            field.cells_per_edge(),
            field.dim(),
            roof.field().cells_per_edge(),
            roof.field().dim()
        )));
    }
    let n = field.dim();
    let m = field.depth();
    let mut violations = Vec::new();
    for (flat, (&v, &r)) in field.values().iter().zip(roof.field().values()).enumerate() {
        if v > r * (1.0 + slack) {
            violations.push(Violation::Pointwise {
                cell: field.coords_of(flat),
                value: v,
                roof: r,
            });
        }
    }

    let table = PrefixSumTable::new(f);
    let edge = field.cells_per_edge();
    let mut cubes_checked = 0usize;
    let mut exhaustive = true;
    let check = |cube: GridCube, budget: f64, out: &mut Vec<Violation>| -> Result<()> {
        let mass = table.cube_integral(&cube)?;
        if mass > budget * (1.0 + slack) {
            out.push(Violation::CubeMass {
                cube,
                mass,
                budget,
                excess: mass - budget,
            });
        }
        Ok(())
    };

    match scope {
        CubeScope::Dyadic => {
            for k in 0..=m {
                let budget = h.value(0.5f64.powi((n as u32 * k) as i32))?;
                let side = edge >> k;
                let level_edge = 1u64 << k;
                let mut coords = vec![0u64; n];
                for _ in 0..(1usize << (n as u32 * k)) {
                    let corner = coords.iter().map(|&c| c * side).collect();
                    check(GridCube::new(corner, side), budget, &mut violations)?;
                    cubes_checked += 1;
                    advance(&mut coords, level_edge);
                }
            }
        }
        CubeScope::AllGrid { sample_seed } => {
            if n as u32 * m <= EXHAUSTIVE_LIMIT {
                let cell_edge = 0.5f64.powi(m as i32);
                for side in 1..=edge {
                    let budget = h.value((side as f64 * cell_edge).powi(n as i32))?;
                    let span = edge - side + 1;
                    let mut coords = vec![0u64; n];
                    for _ in 0..span.pow(n as u32) {
                        check(GridCube::new(coords.clone(), side), budget, &mut violations)?;
                        cubes_checked += 1;
                        advance(&mut coords, span);
                    }
                }
            } else {
                exhaustive = false;
                let mut rng = SplitMix64::new(sample_seed);
                for _ in 0..SAMPLE_COUNT {
                    let side = 1 + rng.next_below(edge);
                    let corner = (0..n).map(|_| rng.next_below(edge - side + 1)).collect();
                    let cube = GridCube::new(corner, side);
                    let budget = h.value(cube.volume(m))?;
                    check(cube, budget, &mut violations)?;
                    cubes_checked += 1;
                }
            }
        }
    }
    violations.sort_by_key(violation_key);
    Ok(ViolationReport {
        violations,
        cubes_checked,
        exhaustive,
    })
}

fn violation_key(v: &Violation) -> (u8, u64, Vec<u64>) {
    match v {
        Violation::Pointwise { cell, .. } => (0, 0, cell.clone()),
        Violation::CubeMass { cube, .. } => (1, cube.side, cube.corner.clone()),
    }
}

fn advance(coords: &mut [u64], edge: u64) {
    for j in (0..coords.len()).rev() {
        coords[j] += 1;
        if coords[j] < edge {
            return;
        }
        coords[j] = 0;
    }
}

/// Ratio of a dual value to the packed primal value. When the dual value is
/// the dyadic min-cut it lies in `[1, 3^n]`, and in the discretized setting
/// it equals `3^n` exactly.
pub fn duality_ratio(primal: &PackResult, dual_value: f64) -> Result<f64> {
    if dual_value < 0.0 || dual_value.is_nan() {
        return Err(Error::validation(format!(
            "dual value must be non-negative, got {dual_value}"
        )));
    }
    if primal.primal_value < 0.0 {
        return Err(Error::validation(format!(
            "primal value must be non-negative, got {}",
            primal.primal_value
        )));
    }
    if primal.primal_value == 0.0 {
        return Ok(if dual_value == 0.0 {
            1.0
        } else {
            f64::INFINITY
        });
    }
    Ok(dual_value / primal.primal_value)
}

/// The dyadic cubes of level `r` touching a grid cube, where `r` is the level
/// whose mesh matches the cube's side (`2^-r <= side <= 2^-r+1`). At most 3
/// cubes per axis are needed, hence at most `3^n` in total.
pub fn dyadic_cover(cube: &GridCube, m: u32) -> (u32, Vec<DyadicCube>) {
    debug_assert!(cube.side >= 1);
    let r = m - cube.side.ilog2();
    let shift = m - r;
    let n = cube.dim();
    let lo: Vec<u64> = cube.corner.iter().map(|&c| c >> shift).collect();
    let hi: Vec<u64> = cube
        .corner
        .iter()
        .map(|&c| (c + cube.side - 1) >> shift)
        .collect();
    let mut cubes = Vec::new();
    let mut idx = lo.clone();
    'outer: loop {
        cubes.push(DyadicCube::new(r, idx.clone()).expect("cover index in range"));
        for j in (0..n).rev() {
            idx[j] += 1;
            if idx[j] <= hi[j] {
                continue 'outer;
            }
            idx[j] = lo[j];
        }
        break;
    }
    (r, cubes)
}

/// Small deterministic generator for cube sampling; keeps the crate free of
/// an RNG dependency.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn next_below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound.max(1)
    }
}
