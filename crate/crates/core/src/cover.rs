//! The dual side: semi-covers by dyadic cubes and the exact minimum of their
//! value over all dyadic antichains.
//!
//! A semi-cover pays `h(volume)` for every cube it contains plus the roof
//! integral over everything it leaves uncovered. The minimum over dyadic
//! antichains is computed by one bottom-up pass over the cube tree:
//! `score(leaf) = min(h(v), ∫ R)` and
//! `score(d) = min(h(V(d)), sum of child scores)`, with the optimal antichain
//! reconstructed top-down. Infinite roof integrals saturate and lose to any
//! finite budget.

use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicCube;
use crate::error::{Error, Result};
use crate::gauge::GaugeFn;
use crate::pack::RoofGrid;

/// An antichain of dyadic cubes with the value it achieves against a roof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiCover {
    pub cubes: Vec<DyadicCube>,
    pub value: f64,
}

/// Value of an explicit cover: gauge cost of the cubes plus the roof
/// integral over the uncovered cells. `+inf` when the roof is infinite
/// somewhere off the cover.
pub fn semicover_value<H: GaugeFn>(roof: &RoofGrid, cover: &[DyadicCube], h: &H) -> Result<f64> {
    let field = roof.field();
    let m = field.depth();
    for c in cover {
        if c.dim() != field.dim() {
            return Err(Error::shape(format!(
                "cover cube dimension {} does not match roof dimension {}",
                c.dim(),
                field.dim()
            )));
        }
        if c.level() > m {
            return Err(Error::validation(format!(
                "cover cube at level {} is finer than the roof depth {m}",
                c.level()
            )));
        }
    }
    for (i, a) in cover.iter().enumerate() {
        for b in cover.iter().skip(i + 1) {
            if a.contains(b) || b.contains(a) {
                return Err(Error::validation(
                    "cover cubes overlap: input is not an antichain",
                ));
            }
        }
    }
    let mut cube_cost = 0.0;
    let mut covered = vec![false; field.len()];
    for c in cover {
        cube_cost += h.value(c.volume())?;
        for cell in c.cells_under(m)? {
            covered[cell] = true;
        }
    }
    let v_leaf = field.cell_volume();
    let mut residual = 0.0;
    for (cell, &r) in field.values().iter().enumerate() {
        if !covered[cell] {
            residual += r * v_leaf;
        }
    }
    Ok(cube_cost + residual)
}

/// Exact minimum of the semi-cover value over all dyadic antichains, with an
/// optimal antichain. Ties between a cube and its children break toward the
/// cube, so the returned cover is the coarsest optimum.
pub fn dyadic_min_cut<H: GaugeFn>(roof: &RoofGrid, h: &H) -> Result<(f64, SemiCover)> {
    let field = roof.field();
    let n = field.dim();
    let m = field.depth();
    let v_leaf = field.cell_volume();

    let mut budgets = Vec::with_capacity(m as usize + 1);
    for k in 0..=m {
        budgets.push(h.value(0.5f64.powi((n as u32 * k) as i32))?);
    }

    // scores[k] holds the optimal value for every level-k cube.
    let mut scores: Vec<Vec<f64>> = Vec::with_capacity(m as usize + 1);
    scores.resize(m as usize + 1, Vec::new());
    scores[m as usize] = field
        .values()
        .iter()
        .map(|&r| budgets[m as usize].min(r * v_leaf))
        .collect();
    for k in (0..m).rev() {
        let edge = 1u64 << k;
        let cubes = 1usize << (n as u32 * k);
        let mut level_scores = Vec::with_capacity(cubes);
        let mut coords = vec![0u64; n];
        for _ in 0..cubes {
            let sum = children_sum(&scores[k as usize + 1], &coords, n, k);
            level_scores.push(budgets[k as usize].min(sum));
            advance(&mut coords, edge);
        }
        scores[k as usize] = level_scores;
    }
    let value = scores[0][0];

    let mut cubes = Vec::new();
    let mut stack = vec![(0u32, vec![0u64; n])];
    while let Some((k, coords)) = stack.pop() {
        if k == m {
            let flat = flat_at(&coords, n, k);
            let direct = field.values()[flat] * v_leaf;
            if budgets[k as usize] <= direct {
                cubes.push(DyadicCube::new(k, coords)?);
            }
            continue;
        }
        let sum = children_sum(&scores[k as usize + 1], &coords, n, k);
        if budgets[k as usize] <= sum {
            cubes.push(DyadicCube::new(k, coords)?);
        } else {
            // push children in reverse so they pop in lexicographic order
            for mask in (0..(1u64 << n)).rev() {
                let child: Vec<u64> = (0..n)
                    .map(|j| 2 * coords[j] + ((mask >> (n - 1 - j)) & 1))
                    .collect();
                stack.push((k + 1, child));
            }
        }
    }
    cubes.sort();
    Ok((value, SemiCover { cubes, value }))
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

fn flat_at(coords: &[u64], n: usize, level: u32) -> usize {
    let edge = 1u64 << level;
    let mut flat = 0u64;
    for &c in coords.iter().take(n) {
        flat = flat * edge + c;
    }
    flat as usize
}

fn children_sum(child_scores: &[f64], coords: &[u64], n: usize, level: u32) -> f64 {
    let mut sum = 0.0;
    for mask in 0..(1u64 << n) {
        let child: Vec<u64> = (0..n)
            .map(|j| 2 * coords[j] + ((mask >> (n - 1 - j)) & 1))
            .collect();
        sum += child_scores[flat_at(&child, n, level + 1)];
    }
    sum
}
