#![allow(dead_code)]

use std::f64::consts::TAU;

use masspack_core::circle::{build_block, sublevel_set, CircleWeight, GridArc};
use masspack_core::cover::dyadic_min_cut;
use masspack_core::dyadic::{CellField, DyadicCube};
use masspack_core::gauge::{Gauge, GaugeFn};
use masspack_core::pack::RoofGrid;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x7061_636b_2d31;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Roof with cells drawn from {0, finite, +inf}; finite values spread over
/// several binary orders of magnitude so saturation happens at many levels.
pub fn random_roof(rng: &mut ChaCha8Rng, n: usize, m: u32) -> RoofGrid {
    let len = 1usize << (n as u32 * m);
    let values = (0..len)
        .map(|_| {
            let pick: f64 = rng.gen();
            if pick < 0.20 {
                0.0
            } else if pick < 0.35 {
                f64::INFINITY
            } else {
                let scale: f64 = rng.gen_range(-3.0..3.0);
                4.0 * scale.exp2()
            }
        })
        .collect();
    RoofGrid::new(CellField::new(n, m, values).unwrap())
}

/// Rotating family of unit-cube gauges for corpus runs.
pub fn corpus_gauge(i: usize) -> Gauge {
    match i % 4 {
        0 => Gauge::power(0.5, 1.0).unwrap(),
        1 => Gauge::power(0.3, 1.0).unwrap(),
        2 => Gauge::power(0.8, 1.0).unwrap(),
        _ => Gauge::log_type(1.0).unwrap(),
    }
}

/// Relative comparison that treats a pair of zeros as equal.
pub fn close_rel(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + f64::MIN_POSITIVE
}

/// Enumerates every antichain of the 1-D dyadic tree of depth `m` (including
/// the empty one) and hands it to the callback. Antichain counts grow as
/// `a(d+1) = a(d)^2 + 1`: 2, 5, 26, 677, 458330 for depths 0..=4.
pub fn for_each_antichain_1d(m: u32, mut f: impl FnMut(&[DyadicCube])) {
    // materialize antichains of depth m-1 subtrees relative to their root
    let mut table: Vec<Vec<Vec<(u32, u64)>>> = vec![vec![vec![], vec![(0, 0)]]];
    for _ in 1..m {
        let prev = table.last().unwrap();
        let mut next = vec![vec![(0, 0)]];
        for a in prev {
            for b in prev {
                let mut joined: Vec<(u32, u64)> = a.iter().map(|&(l, i)| (l + 1, i)).collect();
                joined.extend(b.iter().map(|&(l, i)| (l + 1, i + (1 << l))));
                next.push(joined);
            }
        }
        table.push(next);
    }
    let to_cubes = |entries: &[(u32, u64)]| -> Vec<DyadicCube> {
        entries
            .iter()
            .map(|&(l, i)| DyadicCube::new(l, vec![i]).unwrap())
            .collect()
    };
    if m == 0 {
        f(&[]);
        f(&to_cubes(&[(0, 0)]));
        return;
    }
    f(&to_cubes(&[(0, 0)]));
    let top = table.last().unwrap();
    for a in top {
        for b in top {
            let mut joined: Vec<(u32, u64)> = a.iter().map(|&(l, i)| (l + 1, i)).collect();
            joined.extend(b.iter().map(|&(l, i)| (l + 1, i + (1 << l))));
            f(&to_cubes(&joined));
        }
    }
}

pub const BLOCK_TOL: f64 = 1e-9;

pub fn circle_gauge(i: usize) -> Gauge {
    match i % 3 {
        0 => Gauge::power(0.5, TAU).unwrap(),
        1 => Gauge::power(0.3, TAU).unwrap(),
        _ => Gauge::log_type(TAU).unwrap(),
    }
}

/// Weight with zero-runs of random widths so blocks have substance.
pub fn random_weight(r: &mut rand_chacha::ChaCha8Rng, grid: usize) -> CircleWeight {
    let mut samples = vec![0.0; grid];
    let mut j = 0usize;
    while j < grid {
        let run = r.gen_range(1..=grid / 8);
        let value = if r.gen_bool(0.45) {
            0.0
        } else {
            r.gen_range(0.02..2.0)
        };
        for cell in samples.iter_mut().skip(j).take(run) {
            *cell = value;
        }
        j += run;
    }
    // never fully dead: keep one live cell
    if samples.iter().all(|&v| v == 0.0) {
        samples[grid / 2] = 1.0;
    }
    CircleWeight::new(samples, 2.0).unwrap()
}

pub struct BlockCheck {
    pub premise_count: usize,
    pub skipped_count: usize,
}

pub fn check_block_laws(
    w: &CircleWeight,
    level: u32,
    arc: GridArc,
    h: &Gauge,
) -> Option<BlockCheck> {
    let grid = w.grid_size();
    let block = build_block(w, level, arc, h).unwrap();
    let cell = w.cell_angle();
    let sub = sublevel_set(w, level).unwrap();
    let inside: Vec<bool> = (0..arc.len)
        .map(|j| sub.contains(arc.cell(j, grid)))
        .collect();

    if block.skipped {
        assert!(block.values.iter().all(|&v| v == 0.0));
        assert!(inside.iter().all(|&b| !b));
        return Some(BlockCheck {
            premise_count: 0,
            skipped_count: 1,
        });
    }

    // (i) pointwise roof bound on the arc
    for (j, &v) in block.values.iter().enumerate() {
        let roof = w.log_roof(arc.cell(j, grid));
        assert!(
            v <= roof * (1.0 + BLOCK_TOL) + BLOCK_TOL,
            "roof bound at cell {j}"
        );
    }

    // (ii) every grid sub-arc respects its budget
    let mut prefix = vec![0.0; arc.len + 1];
    for (j, &v) in block.values.iter().enumerate() {
        prefix[j + 1] = prefix[j] + v * cell;
    }
    for len in 1..=arc.len {
        let budget = h.value(len as f64 / grid as f64 * TAU).unwrap();
        for start in 0..=(arc.len - len) {
            let mass = prefix[start + len] - prefix[start];
            assert!(
                mass <= budget * (1.0 + BLOCK_TOL) + BLOCK_TOL,
                "sub-arc [{start}, {}) exceeds budget",
                start + len
            );
        }
    }

    // (iii) zero integral
    assert!(block.integral(grid).abs() <= BLOCK_TOL);

    // (iv) negative plateau on the sublevel part when the premise holds
    let mut premise_count = 0;
    if block.premise_met {
        premise_count = 1;
        let floor = -(block.arc_budget / 3.0) / arc.length(grid);
        for (j, &v) in block.values.iter().enumerate() {
            if inside[j] {
                assert!(
                    v <= floor * (1.0 - BLOCK_TOL),
                    "plateau value {v} above {floor}"
                );
            }
        }
    }

    // packed value always equals one third of the arc-local min-cut,
    // verified against the independent tree DP on the scaled roof
    let arc_len = arc.length(grid);
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
    let roof = RoofGrid::new(CellField::new(1, depth, roof_values).unwrap());
    let scaled = ScaledGauge {
        inner: h,
        scale: arc_len,
    };
    let (cut, _) = dyadic_min_cut(&roof, &scaled).unwrap();
    assert!(
        (block.min_cut_value - cut).abs() <= 1e-9 * cut.max(1e-12),
        "packed {} vs independent cut {cut}",
        block.min_cut_value
    );
    assert!((block.positive_part_integral - cut / 3.0).abs() <= 1e-9 * cut.max(1e-12));
    Some(BlockCheck {
        premise_count,
        skipped_count: 0,
    })
}

struct ScaledGauge<'a> {
    inner: &'a Gauge,
    scale: f64,
}

impl GaugeFn for ScaledGauge<'_> {
    fn value(&self, x: f64) -> masspack_core::Result<f64> {
        self.inner.value(self.scale * x)
    }
    fn domain_max(&self) -> f64 {
        self.inner.domain_max() / self.scale
    }
}
