//! Dyadic cubes over the unit cube `[0,1]^n` and flat per-cell storage.
//!
//! A cube is addressed by `(level, index)` with every coordinate of `index`
//! in `[0, 2^level)`. Geometry never enters any predicate: containment and
//! interior-disjointness are decided by shift arithmetic on indices, which is
//! exact.

use std::collections::HashSet;
use std::io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed dyadic cube of side `2^-level` inside the unit cube.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    level: u32,
    index: Vec<u64>,
}

impl DyadicCube {
    pub fn new(level: u32, index: Vec<u64>) -> Result<Self> {
        if index.is_empty() {
            return Err(Error::validation(
                "cube index must have at least one coordinate",
            ));
        }
        if level >= 64 {
            return Err(Error::validation(format!("cube level {level} too deep")));
        }
        let edge = 1u64 << level;
        if let Some(bad) = index.iter().find(|&&c| c >= edge) {
            return Err(Error::validation(format!(
                "cube coordinate {bad} out of range for level {level}"
            )));
        }
        Ok(DyadicCube { level, index })
    }

    /// The level-0 cube `[0,1]^n`.
    pub fn root(n: usize) -> Self {
        DyadicCube {
            level: 0,
            index: vec![0; n],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> &[u64] {
        &self.index
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    /// Exact volume `2^{-n * level}`.
    pub fn volume(&self) -> f64 {
        0.5f64.powi((self.dim() as u32 * self.level) as i32)
    }

    /// The parent cube, if any; its index is the coordinatewise floor-halving.
    pub fn parent(&self) -> Option<DyadicCube> {
        if self.level == 0 {
            return None;
        }
        Some(DyadicCube {
            level: self.level - 1,
            index: self.index.iter().map(|&c| c >> 1).collect(),
        })
    }

    /// The `2^n` children tiling this cube, in lexicographic index order.
    pub fn children(&self) -> Vec<DyadicCube> {
        let n = self.dim();
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0..(1u64 << n) {
            let index = (0..n)
                .map(|j| 2 * self.index[j] + ((mask >> (n - 1 - j)) & 1))
                .collect();
            out.push(DyadicCube {
                level: self.level + 1,
                index,
            });
        }
        out
    }

    /// Whether `other` is contained in `self` (equality counts).
    pub fn contains(&self, other: &DyadicCube) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        if self.level > other.level {
            return false;
        }
        let shift = other.level - self.level;
        self.index
            .iter()
            .zip(&other.index)
            .all(|(&a, &b)| (b >> shift) == a)
    }

    /// Flat row-major indices of the level-`m` cells tiling this cube.
    pub fn cells_under(&self, m: u32) -> Result<CellsUnder> {
        if self.level > m {
            return Err(Error::validation(format!(
                "cube at level {} has no cells at coarser depth {m}",
                self.level
            )));
        }
        let n = self.dim();
        let side = 1u64 << (m - self.level);
        let base: Vec<u64> = self.index.iter().map(|&c| c * side).collect();
        Ok(CellsUnder {
            base,
            side,
            edge: 1u64 << m,
            offset: vec![0; n],
            remaining: side.pow(n as u32),
        })
    }
}

/// Odometer over the cell box of a cube; yields flat row-major indices.
pub struct CellsUnder {
    base: Vec<u64>,
    side: u64,
    edge: u64,
    offset: Vec<u64>,
    remaining: u64,
}

impl Iterator for CellsUnder {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let mut flat = 0u64;
        for (b, o) in self.base.iter().zip(&self.offset) {
            flat = flat * self.edge + (b + o);
        }
        // advance the odometer, last coordinate fastest
        for j in (0..self.offset.len()).rev() {
            self.offset[j] += 1;
            if self.offset[j] < self.side {
                break;
            }
            self.offset[j] = 0;
        }
        Some(flat as usize)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining as usize, Some(self.remaining as usize))
    }
}

impl ExactSizeIterator for CellsUnder {}

/// Extracts the antichain of maximal cubes: every input cube not strictly
/// contained in another input cube, deduplicated, sorted by level then
/// lexicographic index.
pub fn maximal_subset(cubes: &[DyadicCube]) -> Vec<DyadicCube> {
    let mut sorted: Vec<DyadicCube> = cubes.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut kept: Vec<DyadicCube> = Vec::new();
    let mut kept_keys: HashSet<(u32, Vec<u64>)> = HashSet::new();
    let mut kept_levels: Vec<u32> = Vec::new();
    'outer: for cube in sorted {
        for &l in &kept_levels {
            if l >= cube.level {
                break;
            }
            let shift = cube.level - l;
            let ancestor: Vec<u64> = cube.index.iter().map(|&c| c >> shift).collect();
            if kept_keys.contains(&(l, ancestor)) {
                continue 'outer;
            }
        }
        kept_keys.insert((cube.level, cube.index.clone()));
        if kept_levels.last() != Some(&cube.level) {
            kept_levels.push(cube.level);
        }
        kept.push(cube);
    }
    kept
}

/// Piecewise-constant data on the level-`m` cells of `[0,1]^n`, stored
/// row-major over the index vector (first coordinate most significant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellField {
    n: usize,
    m: u32,
    #[serde(with = "inf_values")]
    values: Vec<f64>,
}

impl CellField {
    /// Wraps per-cell values. Values must be non-negative; `+inf` is allowed,
    /// NaN is not.
    pub fn new(n: usize, m: u32, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("dimension must be at least 1"));
        }
        let bits = n as u32 * m;
        if bits > 26 {
            return Err(Error::validation(format!(
                "grid with 2^{bits} cells is beyond the supported desk scale (n*m <= 26)"
            )));
        }
        let expect = 1usize << bits;
        if values.len() != expect {
            return Err(Error::shape(format!(
                "expected {expect} cells for n = {n}, m = {m}, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::validation(
                "cell values must be non-negative and not NaN",
            ));
        }
        Ok(CellField { n, m, values })
    }

    pub fn constant(n: usize, m: u32, value: f64) -> Result<Self> {
        let len = 1usize << (n as u32 * m);
        CellField::new(n, m, vec![value; len])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> u32 {
        self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Exact volume of one cell, `2^{-n m}`.
    pub fn cell_volume(&self) -> f64 {
        0.5f64.powi((self.n as u32 * self.m) as i32)
    }

    pub fn cells_per_edge(&self) -> u64 {
        1u64 << self.m
    }

    /// Row-major flat index of a cell coordinate vector.
    pub fn flat_index(&self, coords: &[u64]) -> usize {
        debug_assert_eq!(coords.len(), self.n);
        let edge = self.cells_per_edge();
        let mut flat = 0u64;
        for &c in coords {
            debug_assert!(c < edge);
            flat = flat * edge + c;
        }
        flat as usize
    }

    /// Cell coordinates of a flat index.
    pub fn coords_of(&self, mut flat: usize) -> Vec<u64> {
        let edge = self.cells_per_edge() as usize;
        let mut coords = vec![0u64; self.n];
        for j in (0..self.n).rev() {
            coords[j] = (flat % edge) as u64;
            flat /= edge;
        }
        coords
    }

    pub fn same_shape(&self, other: &CellField) -> bool {
        self.n == other.n && self.m == other.m
    }

    /// One row per cell: the coordinate vector followed by the value, with
    /// infinity spelled `inf`.
    pub fn write_csv<W: io::Write>(&self, w: &mut W) -> io::Result<()> {
        for (flat, &v) in self.values.iter().enumerate() {
            let coords = self.coords_of(flat);
            for c in coords {
                write!(w, "{c},")?;
            }
            if v.is_infinite() {
                writeln!(w, "inf")?;
            } else {
                writeln!(w, "{v}")?;
            }
        }
        Ok(())
    }
}

/// JSON form of cell values: numbers, with the string `"inf"` for infinity.
mod inf_values {
    use serde::de::Error as DeError;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrInf {
        Num(f64),
        Word(String),
    }

    pub fn serialize<S: Serializer>(values: &[f64], ser: S) -> Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(values.len()))?;
        for v in values {
            if v.is_infinite() {
                seq.serialize_element("inf")?;
            } else {
                seq.serialize_element(v)?;
            }
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<f64>, D::Error> {
        let raw = Vec::<NumOrInf>::deserialize(de)?;
        raw.into_iter()
            .map(|e| match e {
                NumOrInf::Num(v) => Ok(v),
                NumOrInf::Word(w) if w == "inf" => Ok(f64::INFINITY),
                NumOrInf::Word(w) => Err(D::Error::custom(format!(
                    "unexpected cell value string {w:?}, only \"inf\" is allowed"
                ))),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(level: u32, index: &[u64]) -> DyadicCube {
        DyadicCube::new(level, index.to_vec()).unwrap()
    }

    #[test]
    fn children_tile_the_interval() {
        let kids = DyadicCube::root(1).children();
        assert_eq!(kids, vec![cube(1, &[0]), cube(1, &[1])]);
    }

    #[test]
    fn planar_root_has_four_quadrants() {
        let kids = DyadicCube::root(2).children();
        assert_eq!(kids.len(), 4);
        assert_eq!(kids[0], cube(1, &[0, 0]));
        assert_eq!(kids[3], cube(1, &[1, 1]));
        for k in &kids {
            assert_eq!(k.parent().unwrap(), DyadicCube::root(2));
        }
    }

    #[test]
    fn children_of_parent_contains_the_cube() {
        let c = cube(1, &[1]);
        assert!(c.parent().unwrap().children().contains(&c));
    }

    #[test]
    fn cells_under_left_half() {
        let cells: Vec<usize> = cube(1, &[0]).cells_under(2).unwrap().collect();
        assert_eq!(cells, vec![0, 1]);
    }

    #[test]
    fn cells_under_self_is_singleton() {
        let cells: Vec<usize> = cube(2, &[3]).cells_under(2).unwrap().collect();
        assert_eq!(cells, vec![3]);
    }

    #[test]
    fn cells_under_root_in_the_plane() {
        let cells: Vec<usize> = DyadicCube::root(2).cells_under(1).unwrap().collect();
        assert_eq!(cells, vec![0, 1, 2, 3]);
    }

    #[test]
    fn cells_under_coarser_depth_is_an_error() {
        assert!(cube(3, &[1]).cells_under(2).is_err());
    }

    #[test]
    fn cells_under_quadrant_row_major() {
        // level-1 quadrant (0,1) of a depth-2 planar grid: rows 0..2, cols 2..4
        let cells: Vec<usize> = cube(1, &[0, 1]).cells_under(2).unwrap().collect();
        assert_eq!(cells, vec![2, 3, 6, 7]);
    }

    #[test]
    fn maximal_subset_drops_contained_cubes() {
        let input = vec![cube(1, &[0]), cube(2, &[0]), cube(2, &[2])];
        let out = maximal_subset(&input);
        assert_eq!(out, vec![cube(1, &[0]), cube(2, &[2])]);
    }

    #[test]
    fn maximal_subset_of_empty_is_empty() {
        assert!(maximal_subset(&[]).is_empty());
    }

    #[test]
    fn root_dominates_everything() {
        let input = vec![cube(2, &[1]), DyadicCube::root(1), cube(1, &[1])];
        assert_eq!(maximal_subset(&input), vec![DyadicCube::root(1)]);
    }

    #[test]
    fn maximal_subset_deduplicates() {
        let input = vec![cube(1, &[1]), cube(1, &[1])];
        assert_eq!(maximal_subset(&input), vec![cube(1, &[1])]);
    }

    #[test]
    fn volume_is_exact() {
        assert_eq!(cube(2, &[1, 2]).volume(), 1.0 / 16.0);
        assert_eq!(DyadicCube::root(3).volume(), 1.0);
    }

    #[test]
    fn field_round_trips_through_json_with_inf() {
        let f = CellField::new(1, 2, vec![1.5, f64::INFINITY, 0.0, 2.25]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"inf\""));
        let back: CellField = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn unknown_value_strings_fail_to_parse() {
        let err = serde_json::from_str::<CellField>(r#"{"n":1,"m":1,"values":["infinity",1.0]}"#);
        assert!(err.is_err());
    }

    #[test]
    fn field_rejects_nan_and_negatives() {
        assert!(CellField::new(1, 1, vec![1.0, f64::NAN]).is_err());
        assert!(CellField::new(1, 1, vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn field_rejects_wrong_length() {
        assert!(CellField::new(2, 2, vec![0.0; 15]).is_err());
    }

    #[test]
    fn csv_lists_coordinates_and_values() {
        let f = CellField::new(2, 1, vec![1.0, f64::INFINITY, 0.5, 2.0]).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().nth(1).unwrap().ends_with("inf"));
        assert!(text.starts_with("0,0,1"));
    }
}
