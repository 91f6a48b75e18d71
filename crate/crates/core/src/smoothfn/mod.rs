//! Smooth cutoffs, bumps, and partitions of unity.
//!
//! Everything here is `C^m` with exactly-evaluable derivatives and exact
//! supports: the cutoff `chi` (one near the origin, zero outside the ball of
//! radius 1/2), the annular bump `phi` and its dyadic rescalings, the
//! Whitney partition subordinate to a cube decomposition, and the unit-scale
//! partition used to localize data that spans more than a unit cube.

pub mod profile;

mod handle;

pub use handle::{compose_scalar, finite_difference, FunctionHandle, UnaryKind};

use crate::czdecomp::CzDecomposition;
use crate::multiindex::{self, MultiIndex};
use profile::Profile;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("decomposition violates good geometry at cube pair ({0}, {1})")]
    BadGeometry(usize, usize),
    #[error("decomposition has no cubes")]
    Empty,
}

/// The cutoff/bump family at unit scale.
pub struct Bumps {
    /// One on the ball of radius 1/4, zero outside radius 1/2.
    pub chi: FunctionHandle,
    /// Annular bump: one for `1/2 <= |x| <= 2`, zero unless `1/4 < |x| < 4`.
    pub phi: FunctionHandle,
    m: usize,
    n: usize,
}

impl Bumps {
    /// `phi_k(x) = phi(2^k x)`: one on the annulus `2^{-1-k} <= |x| <= 2^{1-k}`,
    /// supported in `2^{-2-k} <= |x| <= 2^{2-k}`.
    pub fn phi_k(&self, k: u32) -> FunctionHandle {
        FunctionHandle::precompose_affine(self.phi.clone(), &vec![0.0; self.n], (k as f64).exp2())
    }

    pub fn order(&self) -> usize {
        self.m
    }
}

/// Builds the unit-scale cutoff and annular bump for smoothness order `m`
/// in dimension `n`.
pub fn build_bumps(m: usize, n: usize) -> Bumps {
    assert!(m >= 1);
    let origin = vec![0.0; n];
    let chi = FunctionHandle::radial(&origin, Profile::ramp_down(0.25, 0.5, m));
    let phi = FunctionHandle::radial(&origin, Profile::plateau(0.25, 0.5, 2.0, 4.0, m));
    Bumps { chi, phi, m, n }
}

/// A cutoff equal to one on a neighborhood of `center` and zero outside the
/// ball of radius `r`, with `C^m` ramps.
pub fn ball_cutoff(center: &[f64], r: f64, m: usize) -> FunctionHandle {
    FunctionHandle::radial(center, Profile::ramp_down(r / 2.0, r, m))
}

/// Whitney partition of unity subordinate to a cube decomposition: one
/// nonnegative `C^m` function per cube, supported in the closed
/// `65/64`-dilate, equal to `psi_Q / sum psi` with `psi_Q` a tensor bump
/// that is one on the closed cube and ramps off inside the dilate collar.
/// The sum of all returned functions is exactly one on the closed window
/// (each point is covered by the plateau of its own cube, so the
/// normalizing denominator is at least one there).
pub fn whitney_partition(
    dec: &CzDecomposition,
    m: usize,
) -> Result<Vec<FunctionHandle>, PartitionError> {
    if dec.is_empty() {
        return Err(PartitionError::Empty);
    }
    if let Some(&(i, j)) = dec.good_geometry_violations().first() {
        return Err(PartitionError::BadGeometry(i, j));
    }
    let n = dec.region.dim();
    let bumps: Vec<FunctionHandle> = dec
        .cubes
        .iter()
        .map(|c| {
            let collar = ((c.level - 7) as f64).exp2();
            let profiles = (0..n)
                .map(|a| {
                    let lo = c.lower(a);
                    let hi = c.upper(a);
                    Profile::plateau(lo - collar, lo, hi, hi + collar, m)
                })
                .collect();
            FunctionHandle::tensor(profiles)
        })
        .collect();
    Ok((0..dec.len())
        .map(|i| {
            let nbrs = dec.dilate_neighbors(i);
            let denom = FunctionHandle::sum(nbrs.iter().map(|&j| bumps[j].clone()).collect());
            FunctionHandle::product(bumps[i].clone(), FunctionHandle::recip(denom))
        })
        .collect())
}

/// One member of the unit-scale partition.
pub struct UnitBump {
    /// Center of the unit cube `Q_v`; the bump is supported in the closed
    /// half-cube `[center - 1/4, center + 1/4]^n`.
    pub center: Vec<f64>,
    pub handle: FunctionHandle,
}

impl UnitBump {
    /// Closed support box.
    pub fn support(&self) -> Vec<(f64, f64)> {
        self.center.iter().map(|c| (c - 0.25, c + 0.25)).collect()
    }

    pub fn support_contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.center)
            .all(|(xi, c)| (xi - c).abs() <= 0.25)
    }
}

/// Unit-scale partition of unity covering the window: bumps on the lattice
/// of quarter-integer centers, each supported in the half-cube of its unit
/// cube, nonnegative, summing to one everywhere (the normalizing
/// denominator runs over the full lattice neighborhood, so no boundary
/// effects arise). Open supports overlap at most `2^n`-fold.
pub fn unit_partition(window: &[(f64, f64)], m: usize) -> Vec<UnitBump> {
    let n = window.len();
    let lo: Vec<i64> = window
        .iter()
        .map(|&(a, _)| ((a - 0.5) * 4.0).floor() as i64)
        .collect();
    let hi: Vec<i64> = window
        .iter()
        .map(|&(_, b)| ((b + 0.5) * 4.0).ceil() as i64)
        .collect();
    let mut bumps = Vec::new();
    let mut idx = lo.clone();
    'outer: loop {
        let center: Vec<f64> = idx.iter().map(|&i| i as f64 / 4.0).collect();
        bumps.push(UnitBump {
            handle: lattice_bump(&center, m),
            center,
        });
        let mut axis = n;
        loop {
            if axis == 0 {
                break 'outer;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] <= hi[axis] {
                break;
            }
            idx[axis] = lo[axis];
        }
    }
    bumps
}

fn lattice_psi(center: &[f64], m: usize) -> FunctionHandle {
    let profiles = center
        .iter()
        .map(|&c| Profile::plateau(c - 0.25, c - 0.125, c + 0.125, c + 0.25, m))
        .collect();
    FunctionHandle::tensor(profiles)
}

fn lattice_bump(center: &[f64], m: usize) -> FunctionHandle {
    let n = center.len();
    // All lattice bumps whose support can meet this one: offsets up to 2
    // lattice steps (1/2) per axis.
    let mut terms = Vec::new();
    let mut offset = vec![-2i64; n];
    'outer: loop {
        let c: Vec<f64> = center
            .iter()
            .zip(&offset)
            .map(|(c, o)| c + *o as f64 / 4.0)
            .collect();
        terms.push(lattice_psi(&c, m));
        let mut axis = n;
        loop {
            if axis == 0 {
                break 'outer;
            }
            axis -= 1;
            offset[axis] += 1;
            if offset[axis] <= 2 {
                break;
            }
            offset[axis] = -2;
        }
    }
    FunctionHandle::product(
        lattice_psi(center, m),
        FunctionHandle::recip(FunctionHandle::sum(terms)),
    )
}

/// Uniform grid over a box, endpoints included.
pub fn grid_points(window: &[(f64, f64)], per_axis: usize) -> Vec<Vec<f64>> {
    assert!(per_axis >= 2);
    let n = window.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    'outer: loop {
        out.push(
            (0..n)
                .map(|a| {
                    let (lo, hi) = window[a];
                    lo + (hi - lo) * idx[a] as f64 / (per_axis - 1) as f64
                })
                .collect(),
        );
        let mut axis = n;
        loop {
            if axis == 0 {
                break 'outer;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < per_axis {
                break;
            }
            idx[axis] = 0;
        }
    }
    out
}

/// Supremum of `|d^b F|` over a grid, for every `|b| <= max_order`.
pub fn grid_derivative_sups(
    f: &FunctionHandle,
    window: &[(f64, f64)],
    per_axis: usize,
    max_order: usize,
) -> Vec<(MultiIndex, f64)> {
    let n = window.len();
    let indices = multiindex::enumerate(n, max_order as u32);
    let mut sups = vec![0.0f64; indices.len()];
    for x in grid_points(window, per_axis) {
        let jet = f.jet_at(&x, max_order);
        for (i, alpha) in indices.iter().enumerate() {
            sups[i] = sups[i].max(jet.coeff(alpha).abs());
        }
    }
    indices.iter().cloned().zip(sups).collect()
}

/// Minimum of `F` over a grid, with the attaining point.
pub fn grid_min(f: &FunctionHandle, window: &[(f64, f64)], per_axis: usize) -> (f64, Vec<f64>) {
    let mut best = f64::INFINITY;
    let mut arg = Vec::new();
    for x in grid_points(window, per_axis) {
        let v = f.eval(&x);
        if v < best {
            best = v;
            arg = x;
        }
    }
    (best, arg)
}

/// CSV dump `x1,...,xn,F,dF_b...` over a grid, derivatives through
/// `max_order` in graded-lex order.
pub fn grid_csv(
    f: &FunctionHandle,
    window: &[(f64, f64)],
    per_axis: usize,
    max_order: usize,
) -> String {
    let n = window.len();
    let indices = multiindex::enumerate(n, max_order as u32);
    let mut out = String::new();
    for a in 0..n {
        out.push_str(&format!("x{},", a + 1));
    }
    out.push('F');
    for alpha in indices.iter().skip(1) {
        out.push_str(&format!(
            ",dF_{}",
            alpha
                .0
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join("")
        ));
    }
    out.push('\n');
    for x in grid_points(window, per_axis) {
        let jet = f.jet_at(&x, max_order);
        for xa in &x {
            out.push_str(&format!("{xa:.12e},"));
        }
        let row: Vec<String> = indices
            .iter()
            .map(|a| format!("{:.12e}", jet.coeff(a)))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
