//! Dyadic cubes and the stopping-time cube decomposition.
//!
//! A dyadic cube at level `k` has sidelength `2^k` and half-open extent
//! `[2^k i, 2^k (i+1))` per axis with integer corner coordinates. The
//! decomposition subdivides a window of unit cubes until each cube `Q` is
//! *OK*: its 5-dilate contains at most one data point and its sidelength is
//! at most 1. Emitted cubes are maximal OK cubes (their strict dyadic
//! ancestors inside the window are not OK), they tile the window exactly,
//! and touching `65/64`-dilates differ by at most one level ("good
//! geometry").
//!
//! All membership and intersection tests run on exact integer corner/level
//! arithmetic; dilate corners are integers seven levels down (`65/64` of a
//! level-`k` cube has corners on the level-`(k-7)` grid), so there is no
//! floating-point boundary ambiguity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CzError {
    #[error("point {0} is not strictly inside the decomposition window")]
    PointOutsideRegion(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("point {0} has dimension {1}, window has dimension {2}")]
    DimensionMismatch(usize, usize, usize),
    #[error("window is empty on axis {0}")]
    EmptyRegion(usize),
    #[error("subdivision passed level {0}; data points are too close together")]
    LevelFloor(i32),
    #[error("cube {0} of type 2 has no data point in the 5-dilate of its parent")]
    MissingAnchor(usize),
    #[error("decomposition was built over a different point set")]
    PointSetMismatch,
}

/// Half-open dyadic cube `prod_i [2^k i_v, 2^k (i_v + 1))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: i32,
    pub corner: Vec<i64>,
}

impl DyadicCube {
    pub fn new(level: i32, corner: Vec<i64>) -> Self {
        DyadicCube { level, corner }
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    /// Sidelength `2^level`.
    pub fn sidelength(&self) -> f64 {
        (self.level as f64).exp2()
    }

    /// The unique dyadic cube of twice the sidelength containing this one.
    pub fn parent(&self) -> DyadicCube {
        DyadicCube {
            level: self.level + 1,
            corner: self.corner.iter().map(|c| c.div_euclid(2)).collect(),
        }
    }

    /// The `2^n` children of half the sidelength, in lexicographic order.
    pub fn children(&self) -> Vec<DyadicCube> {
        let n = self.dim();
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let corner = self
                .corner
                .iter()
                .enumerate()
                .map(|(axis, c)| 2 * c + ((mask >> (n - 1 - axis)) & 1) as i64)
                .collect();
            out.push(DyadicCube {
                level: self.level - 1,
                corner,
            });
        }
        out
    }

    pub fn lower(&self, axis: usize) -> f64 {
        ldexp(self.corner[axis], self.level)
    }

    pub fn upper(&self, axis: usize) -> f64 {
        ldexp(self.corner[axis] + 1, self.level)
    }

    pub fn center(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|a| ldexp(2 * self.corner[a] + 1, self.level - 1))
            .collect()
    }

    /// Half-open membership in the cube itself.
    pub fn contains(&self, x: &[f64]) -> bool {
        (0..self.dim()).all(|a| x[a] >= self.lower(a) && x[a] < self.upper(a))
    }

    /// Half-open membership in the 5-dilate `[2^k(i-2), 2^k(i+3))`.
    pub fn five_dilate_contains(&self, x: &[f64]) -> bool {
        (0..self.dim()).all(|a| {
            x[a] >= ldexp(self.corner[a] - 2, self.level)
                && x[a] < ldexp(self.corner[a] + 3, self.level)
        })
    }

    /// Closed extent of the `65/64`-dilate as integers at level `k - 7`.
    fn dilate_65_64_extent(&self, axis: usize) -> (i128, i128, i32) {
        let i = self.corner[axis] as i128;
        (128 * i - 1, 128 * i + 129, self.level - 7)
    }

    /// Whether the closed `65/64`-dilates of two cubes intersect, decided in
    /// exact integer arithmetic.
    pub fn dilates_touch(&self, other: &DyadicCube) -> bool {
        (0..self.dim()).all(|a| {
            let (lo1, hi1, l1) = self.dilate_65_64_extent(a);
            let (lo2, hi2, l2) = other.dilate_65_64_extent(a);
            let shift = (l1 - l2).unsigned_abs();
            let (lo1, hi1, lo2, hi2) = if l1 >= l2 {
                (lo1 << shift, hi1 << shift, lo2, hi2)
            } else {
                (lo1, hi1, lo2 << shift, hi2 << shift)
            };
            lo1 <= hi2 && lo2 <= hi1
        })
    }

    /// Whether the closed `65/64`-dilate contains `x`.
    pub fn dilate_65_64_contains(&self, x: &[f64]) -> bool {
        (0..self.dim()).all(|a| {
            let scale = ((self.level - 7) as f64).exp2();
            let i = self.corner[a] as f64;
            x[a] >= (128.0 * i - 1.0) * scale && x[a] <= (128.0 * i + 129.0) * scale
        })
    }

    /// Strict inclusion `self ⊂ other` as dyadic cubes.
    pub fn strictly_inside(&self, other: &DyadicCube) -> bool {
        if self.level >= other.level {
            return false;
        }
        let mut q = self.parent();
        while q.level < other.level {
            q = q.parent();
        }
        q == *other
    }
}

fn ldexp(mantissa: i64, exp: i32) -> f64 {
    mantissa as f64 * (exp as f64).exp2()
}

/// Axis-aligned window made of level-0 dyadic cubes: `prod_i [lo_i, hi_i)`
/// with integer bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicRegion {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl DyadicRegion {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self, CzError> {
        for a in 0..lo.len() {
            if hi[a] <= lo[a] {
                return Err(CzError::EmptyRegion(a));
            }
        }
        Ok(DyadicRegion { lo, hi })
    }

    /// Smallest window of unit cubes containing every point with at least
    /// `margin` units of clearance on every side.
    pub fn padded_around(points: &[Vec<f64>], dim: usize, margin: i64) -> Self {
        let mut lo = vec![i64::MAX; dim];
        let mut hi = vec![i64::MIN; dim];
        for p in points {
            for a in 0..dim {
                lo[a] = lo[a].min(p[a].floor() as i64);
                hi[a] = hi[a].max(p[a].floor() as i64 + 1);
            }
        }
        if points.is_empty() {
            lo = vec![0; dim];
            hi = vec![1; dim];
        }
        for a in 0..dim {
            lo[a] -= margin;
            hi[a] += margin;
        }
        DyadicRegion { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn strictly_contains(&self, x: &[f64]) -> bool {
        (0..self.dim()).all(|a| x[a] > self.lo[a] as f64 && x[a] < self.hi[a] as f64)
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        (0..self.dim()).all(|a| x[a] >= self.lo[a] as f64 && x[a] <= self.hi[a] as f64)
    }

    /// Unit cubes tiling the window, lexicographic.
    pub fn unit_cubes(&self) -> Vec<DyadicCube> {
        let mut out = Vec::new();
        let mut corner = self.lo.clone();
        loop {
            out.push(DyadicCube::new(0, corner.clone()));
            let mut axis = self.dim();
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                corner[axis] += 1;
                if corner[axis] < self.hi[axis] {
                    break;
                }
                corner[axis] = self.lo[axis];
            }
        }
    }

    /// Volume in units of `4^{-|min_level|}`-scaled cells; exact.
    fn volume_in_cells(&self, min_level: i32) -> i128 {
        let per_unit = 1i128 << ((-min_level) as u32);
        let mut v = 1i128;
        for a in 0..self.dim() {
            v *= (self.hi[a] - self.lo[a]) as i128 * per_unit;
        }
        v
    }
}

/// A cube is OK when its 5-dilate holds at most one data point and its
/// sidelength is at most 1.
pub fn is_ok(cube: &DyadicCube, points: &[Vec<f64>]) -> bool {
    if cube.level > 0 {
        return false;
    }
    let mut seen = 0;
    for p in points {
        if cube.five_dilate_contains(p) {
            seen += 1;
            if seen > 1 {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CubeType {
    /// Data in the 5-dilate; the anchor is the unique such point.
    Type1,
    /// No data in the 5-dilate, sidelength below 1; anchored to a point in
    /// the parent's 5-dilate.
    Type2,
    /// No data nearby at full sidelength; carries the zero extension.
    Type3,
}

/// Stopping-time decomposition of a window, with per-cube classification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CzDecomposition {
    pub region: DyadicRegion,
    pub cubes: Vec<DyadicCube>,
    /// Filled by [`classify_and_anchor`]; empty before that.
    pub types: Vec<CubeType>,
    pub anchors: Vec<Option<Vec<f64>>>,
    /// The point set the decomposition was built over.
    pub points: Vec<Vec<f64>>,
}

const LEVEL_FLOOR: i32 = -48;

/// Subdivides the window from level 0: a cube is emitted when OK, otherwise
/// split into its `2^n` children. Points must be pairwise distinct and
/// strictly inside the window.
pub fn cz_decompose(points: &[Vec<f64>], region: &DyadicRegion) -> Result<CzDecomposition, CzError> {
    for (i, p) in points.iter().enumerate() {
        if p.len() != region.dim() {
            return Err(CzError::DimensionMismatch(i, p.len(), region.dim()));
        }
        if !region.strictly_contains(p) {
            return Err(CzError::PointOutsideRegion(i));
        }
        for (j, q) in points.iter().enumerate().take(i) {
            if p == q {
                return Err(CzError::DuplicatePoints(j, i));
            }
        }
    }
    let mut cubes = Vec::new();
    let mut stack: Vec<DyadicCube> = region.unit_cubes();
    stack.reverse();
    while let Some(cube) = stack.pop() {
        if is_ok(&cube, points) {
            cubes.push(cube);
        } else {
            if cube.level <= LEVEL_FLOOR {
                return Err(CzError::LevelFloor(cube.level));
            }
            let mut children = cube.children();
            children.reverse();
            stack.extend(children);
        }
    }
    Ok(CzDecomposition {
        region: region.clone(),
        cubes,
        types: Vec::new(),
        anchors: Vec::new(),
        points: points.to_vec(),
    })
}

/// Fills in types and anchors. Type-1 cubes take the unique data point of
/// their 5-dilate; type-2 cubes take a point of the parent's 5-dilate
/// (closest to the cube center, ties broken lexicographically).
pub fn classify_and_anchor(mut dec: CzDecomposition, points: &[Vec<f64>]) -> Result<CzDecomposition, CzError> {
    if dec.points != points {
        return Err(CzError::PointSetMismatch);
    }
    let mut types = Vec::with_capacity(dec.cubes.len());
    let mut anchors = Vec::with_capacity(dec.cubes.len());
    for (i, cube) in dec.cubes.iter().enumerate() {
        let nearby: Vec<&Vec<f64>> = points
            .iter()
            .filter(|p| cube.five_dilate_contains(p))
            .collect();
        if !nearby.is_empty() {
            debug_assert_eq!(nearby.len(), 1, "OK cube with two points in its 5-dilate");
            types.push(CubeType::Type1);
            anchors.push(Some(nearby[0].clone()));
        } else if cube.level < 0 {
            let parent = cube.parent();
            let candidates: Vec<&Vec<f64>> = points
                .iter()
                .filter(|p| parent.five_dilate_contains(p))
                .collect();
            if candidates.is_empty() {
                return Err(CzError::MissingAnchor(i));
            }
            let center = cube.center();
            let anchor = candidates
                .into_iter()
                .min_by(|a, b| {
                    let da = crate::whitney::euclid(a, &center);
                    let db = crate::whitney::euclid(b, &center);
                    da.partial_cmp(&db)
                        .unwrap()
                        .then_with(|| a.partial_cmp(b).unwrap())
                })
                .unwrap();
            types.push(CubeType::Type2);
            anchors.push(Some(anchor.clone()));
        } else {
            types.push(CubeType::Type3);
            anchors.push(None);
        }
    }
    dec.types = types;
    dec.anchors = anchors;
    Ok(dec)
}

impl CzDecomposition {
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn min_level(&self) -> i32 {
        self.cubes.iter().map(|c| c.level).min().unwrap_or(0)
    }

    /// The cube containing `x`, if `x` lies in the window.
    pub fn cube_containing(&self, x: &[f64]) -> Option<usize> {
        self.cubes.iter().position(|c| c.contains(x))
    }

    /// Indices of cubes whose closed `65/64`-dilate touches that of `i`
    /// (including `i` itself).
    pub fn dilate_neighbors(&self, i: usize) -> Vec<usize> {
        let me = &self.cubes[i];
        self.cubes
            .iter()
            .enumerate()
            .filter(|(_, c)| me.dilates_touch(c))
            .map(|(j, _)| j)
            .collect()
    }

    /// Pairs violating good geometry (touching dilates, level gap above 1).
    pub fn good_geometry_violations(&self) -> Vec<(usize, usize)> {
        let mut bad = Vec::new();
        for i in 0..self.cubes.len() {
            for j in (i + 1)..self.cubes.len() {
                if self.cubes[i].dilates_touch(&self.cubes[j])
                    && (self.cubes[i].level - self.cubes[j].level).abs() > 1
                {
                    bad.push((i, j));
                }
            }
        }
        bad
    }

    /// Exact partition check: cubes disjoint, total volume equal to the
    /// window volume, every sidelength at most 1.
    pub fn is_exact_partition(&self) -> bool {
        let min_level = self.min_level();
        if self.cubes.iter().any(|c| c.level > 0) {
            return false;
        }
        let mut total: i128 = 0;
        for c in &self.cubes {
            let cells_per_axis = 1i128 << ((c.level - min_level) as u32);
            total += cells_per_axis.pow(self.region.dim() as u32);
        }
        if total != self.region.volume_in_cells(min_level) {
            return false;
        }
        for i in 0..self.cubes.len() {
            for j in (i + 1)..self.cubes.len() {
                if cubes_overlap(&self.cubes[i], &self.cubes[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether every emitted cube is maximal: OK itself, with no OK strict
    /// dyadic ancestor within level 0.
    pub fn is_maximal(&self, points: &[Vec<f64>]) -> bool {
        self.cubes.iter().all(|c| {
            if !is_ok(c, points) {
                return false;
            }
            let mut q = c.clone();
            while q.level < 0 {
                q = q.parent();
                if is_ok(&q, points) {
                    return false;
                }
            }
            true
        })
    }

    /// One record per cube for machine-readable export.
    pub fn dump_records(&self) -> Vec<CubeRecord> {
        (0..self.cubes.len())
            .map(|i| CubeRecord {
                level: self.cubes[i].level,
                corner: self.cubes[i].corner.clone(),
                cube_type: self.types.get(i).map(|t| match t {
                    CubeType::Type1 => 1,
                    CubeType::Type2 => 2,
                    CubeType::Type3 => 3,
                }),
                anchor: self.anchors.get(i).cloned().flatten(),
            })
            .collect()
    }

    /// CSV of cube outlines: `level,corner...,lo...,hi...,type`.
    pub fn to_csv(&self) -> String {
        let n = self.region.dim();
        let mut out = String::from("level");
        for a in 0..n {
            out.push_str(&format!(",corner{a}"));
        }
        for a in 0..n {
            out.push_str(&format!(",lo{a}"));
        }
        for a in 0..n {
            out.push_str(&format!(",hi{a}"));
        }
        out.push_str(",type\n");
        for (i, c) in self.cubes.iter().enumerate() {
            out.push_str(&format!("{}", c.level));
            for a in 0..n {
                out.push_str(&format!(",{}", c.corner[a]));
            }
            for a in 0..n {
                out.push_str(&format!(",{}", c.lower(a)));
            }
            for a in 0..n {
                out.push_str(&format!(",{}", c.upper(a)));
            }
            let t = self
                .types
                .get(i)
                .map(|t| match t {
                    CubeType::Type1 => "1",
                    CubeType::Type2 => "2",
                    CubeType::Type3 => "3",
                })
                .unwrap_or("");
            out.push_str(&format!(",{t}\n"));
        }
        out
    }
}

/// Flat record for JSON export.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CubeRecord {
    pub level: i32,
    pub corner: Vec<i64>,
    #[serde(rename = "type")]
    pub cube_type: Option<u8>,
    pub anchor: Option<Vec<f64>>,
}

fn cubes_overlap(a: &DyadicCube, b: &DyadicCube) -> bool {
    let fine = a.level.min(b.level);
    (0..a.dim()).all(|axis| {
        let (la, ha) = scaled_extent(a, axis, fine);
        let (lb, hb) = scaled_extent(b, axis, fine);
        la < hb && lb < ha
    })
}

fn scaled_extent(c: &DyadicCube, axis: usize, fine_level: i32) -> (i128, i128) {
    let shift = (c.level - fine_level) as u32;
    let lo = (c.corner[axis] as i128) << shift;
    (lo, lo + (1i128 << shift))
}
