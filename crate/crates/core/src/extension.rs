//! Nonnegativity-preserving extensions and the interpolation pipeline.
//!
//! The local step turns an accepted jet into a nonnegative function with
//! that jet: the Lipschitz flavor is the closed form
//! `M chi(y - x) (P0(y - x) + |y - x|^m)`, the smooth flavor the truncated
//! series `chi (P + sum_k b_k phi_k)` with the negativity corrections `b_k`
//! carried by dyadic annular bumps. The global step glues local extensions
//! over a cube decomposition through a Whitney partition, and data spanning
//! more than a unit cube is first localized by the unit-scale partition.

use crate::czdecomp::{classify_and_anchor, cz_decompose, CubeType, CzDecomposition, CzError, DyadicRegion};
use crate::gamma::{
    bk_sequence, gamma0plus_member, gamma_prime_member, gamma_tilde0_completion, CompletionOutcome,
    GammaConfig, GammaError,
};
use crate::jets::{jet_multiply, Jet, JetError};
use crate::multiindex;
use crate::smoothfn::{
    ball_cutoff, build_bumps, finite_difference, grid_min, grid_points, unit_partition,
    whitney_partition, FunctionHandle, PartitionError,
};
use crate::whitney::{taylor_compat_check, WhitneyField, WhitneyError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtendError {
    #[error("jet at {point:?} rejected by membership ({status:?}, margin {margin:.3e})")]
    MembershipRejected {
        point: Vec<f64>,
        status: crate::gamma::MembershipStatus,
        margin: f64,
    },
    #[error("field fails compatibility at level {level}: seminorm {seminorm}")]
    CompatibilityFailed { level: f64, seminorm: f64 },
    #[error("data value at {point:?} is negative: {value}")]
    NegativeData { point: Vec<f64>, value: f64 },
    #[error("no jet supplied for data point {0:?}")]
    MissingJet(Vec<f64>),
    #[error("normalized quadrance of the pair deviates from one by {0:.3e}")]
    QuadranceViolation(f64),
    #[error("envelope bound fails for Q{index} at order {order}: |{value:.3e}| > delta^-{order}")]
    EnvelopeViolation { index: usize, order: u32, value: f64 },
    #[error("function {0} does not carry the claimed jet (max deviation {1:.3e})")]
    JetMismatch(usize, f64),
    #[error("cutoff radius search failed: Q1 stays below 1/10 near the point")]
    CutoffSearchFailed,
    #[error("locals and decomposition disagree: {0}")]
    GlueMismatch(String),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Cz(#[from] CzError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Whitney(#[from] WhitneyError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    /// Smooth flavor: series extension, small-ball membership condition.
    Cm,
    /// Lipschitz flavor: closed-form extension, exact membership up to grid
    /// resolution. The pipeline default.
    Cm1,
}

/// Pipeline tuning.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineConfig {
    #[serde(default)]
    pub gamma: GammaConfig,
    /// Series truncation for the smooth flavor.
    #[serde(default = "default_series_terms")]
    pub series_terms: usize,
    /// Verification grid per axis; `None` picks 10001 for `n = 1`, 101 for
    /// `n = 2`.
    #[serde(default)]
    pub verify_per_axis: Option<usize>,
    /// Padding of the verification window around the data box.
    #[serde(default = "default_window_pad")]
    pub window_pad: f64,
}

fn default_series_terms() -> usize {
    20
}

fn default_window_pad() -> f64 {
    1.5
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            gamma: GammaConfig::default(),
            series_terms: default_series_terms(),
            verify_per_axis: None,
            window_pad: default_window_pad(),
        }
    }
}

impl PipelineConfig {
    pub fn verify_grid_for(&self, dim: usize) -> usize {
        self.verify_per_axis
            .unwrap_or(if dim == 1 { 10001 } else { 101 })
    }
}

/// Closed-form Lipschitz-flavor extension of an accepted jet: nonnegative
/// everywhere, supported in the unit ball around `x`, carrying exactly the
/// jet `P` at `x`.
pub fn extend_jet_cm1(
    p: &Jet,
    x: &[f64],
    level: f64,
    cfg: &GammaConfig,
) -> Result<FunctionHandle, ExtendError> {
    let verdict = gamma_prime_member(p, x, level, None, cfg)?;
    if !verdict.is_member() {
        return Err(ExtendError::MembershipRejected {
            point: x.to_vec(),
            status: verdict.status,
            margin: verdict.margin,
        });
    }
    let m = p.degree() + 1;
    let chi = ball_cutoff(x, 1.0, m);
    let payload = FunctionHandle::sum(vec![
        FunctionHandle::poly(p.rebase(x)),
        FunctionHandle::scale(level, FunctionHandle::radial_power(x, m as u32)),
    ]);
    Ok(FunctionHandle::product(chi, payload))
}

/// Series extension of a degree-`m` member jet at the origin: the jet plus
/// per-annulus negativity corrections, cut off outside the half ball. The
/// result carries the jet exactly and dips below zero by at most
/// `2^{-m (k_max + 1)}`.
pub fn extend_jet_cm(
    p: &Jet,
    k_max: usize,
    cfg: &GammaConfig,
) -> Result<FunctionHandle, ExtendError> {
    let verdict = gamma0plus_member(p, cfg)?;
    if !verdict.is_member() {
        return Err(ExtendError::MembershipRejected {
            point: p.base().to_vec(),
            status: verdict.status,
            margin: verdict.margin,
        });
    }
    let m = p.degree();
    let n = p.dim();
    let bumps = build_bumps(m, n);
    let b = bk_sequence(p, k_max, cfg);
    let mut terms = vec![FunctionHandle::poly(p.clone())];
    for (k, &bk) in b.iter().enumerate() {
        if bk > 0.0 {
            terms.push(FunctionHandle::scale(bk, bumps.phi_k(k as u32)));
        }
    }
    Ok(FunctionHandle::product(
        ball_cutoff(&vec![0.0; n], 0.5, m),
        FunctionHandle::sum(terms),
    ))
}

/// Smooth-flavor extension of a degree-`(m-1)` jet at an arbitrary point
/// and level: normalize to the origin at level one, complete to a member
/// degree-`m` jet by linear programming, extend by the series, then
/// translate and rescale back.
pub fn extend_jet_cm_at(
    p: &Jet,
    x: &[f64],
    level: f64,
    k_max: usize,
    cfg: &GammaConfig,
) -> Result<FunctionHandle, ExtendError> {
    let origin = vec![0.0; p.dim()];
    let normalized = Jet::from_coeffs(
        &origin,
        p.degree(),
        p.rebase(x).scale(1.0 / level).coeffs().to_vec(),
    )?;
    let completion = match gamma_tilde0_completion(&normalized, cfg)? {
        CompletionOutcome::Member { completion, .. } => completion,
        CompletionOutcome::NonMember(v) | CompletionOutcome::Undetermined(v) => {
            return Err(ExtendError::MembershipRejected {
                point: x.to_vec(),
                status: v.status,
                margin: v.margin,
            });
        }
    };
    let f0 = extend_jet_cm(&completion, k_max, cfg)?;
    Ok(FunctionHandle::scale(
        level,
        FunctionHandle::precompose_affine(f0, x, 1.0),
    ))
}

/// Output of [`patch_pair`].
pub struct PatchResult {
    /// The blended function `theta_1^2 F_1 + theta_2^2 F_2`.
    pub handle: FunctionHandle,
    pub theta1: FunctionHandle,
    pub theta2: FunctionHandle,
    /// Radius factor actually used for the cutoff ball.
    pub c0: f64,
    /// Whether the pair was swapped to make the first weight large at `x`.
    pub swapped: bool,
}

/// Blends two nonnegative functions through a squared partition pair built
/// from polynomial weights `Q_1, Q_2` with `Q_1^2 + Q_2^2 = 1` (as jets at
/// `x`). The result agrees with `F_1` outside the ball `B(x, c0 delta)`,
/// stays nonnegative wherever both inputs are, and carries the jet
/// `Q_1 Q_1 P_1 + Q_2 Q_2 P_2` at `x`.
#[allow(clippy::too_many_arguments)]
pub fn patch_pair(
    f1: &FunctionHandle,
    f2: &FunctionHandle,
    p1: &Jet,
    p2: &Jet,
    q1: &Jet,
    q2: &Jet,
    x: &[f64],
    delta: f64,
    level: f64,
) -> Result<PatchResult, ExtendError> {
    assert!(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
    assert!(level > 0.0);
    let m = p1.degree() + 1;

    // Normalized quadrance: Q1 Q1 + Q2 Q2 = 1 exactly as jets.
    let quad = jet_multiply(q1, q1)?.add(&jet_multiply(q2, q2)?)?;
    let one = Jet::constant(quad.dim(), quad.degree(), quad.base(), 1.0);
    let dev = quad.sub(&one)?.max_abs_coeff();
    if dev > 1e-7 {
        return Err(ExtendError::QuadranceViolation(dev));
    }
    // Envelope bounds |d^b Q_i(x)| <= delta^{-|b|}.
    for (index, q) in [q1, q2].into_iter().enumerate() {
        let at_x = q.rebase(x);
        for (alpha, &c) in at_x.indices().iter().zip(at_x.coeffs()) {
            let bound = delta.powi(-(alpha.order() as i32));
            if c.abs() > bound * (1.0 + 1e-9) {
                return Err(ExtendError::EnvelopeViolation {
                    index: index + 1,
                    order: alpha.order(),
                    value: c,
                });
            }
        }
    }
    // The inputs must carry the claimed jets (finite-difference check).
    for (i, (f, p)) in [(f1, p1), (f2, p2)].into_iter().enumerate() {
        let scale = level.max(p.max_abs_coeff()).max(1.0);
        let mut worst = 0.0f64;
        for (alpha, &c) in p.rebase(x).indices().iter().zip(p.rebase(x).coeffs()) {
            let fd = finite_difference(f, x, alpha, 1e-4);
            worst = worst.max((fd - c).abs() / scale);
        }
        if worst > 1e-3 {
            return Err(ExtendError::JetMismatch(i + 1, worst));
        }
    }

    // Arrange Q1(x) >= 1/sqrt(2): swap the pair if needed, then flip the
    // sign of Q1 (which leaves both the quadrance and the blend invariant).
    let v1 = q1.rebase(x).coeffs()[0];
    let v2 = q2.rebase(x).coeffs()[0];
    let swapped = v2.abs() > v1.abs();
    let (mut q1, q2, f1, f2) = if swapped {
        (q2.clone(), q1.clone(), f2.clone(), f1.clone())
    } else {
        (q1.clone(), q2.clone(), f1.clone(), f2.clone())
    };
    if q1.rebase(x).coeffs()[0] < 0.0 {
        q1 = q1.scale(-1.0);
    }

    // Backtrack the cutoff radius until Q1 >= 1/10 on the ball.
    let q1_fn = q1.compile();
    let mut c0 = 0.5;
    let mut found = false;
    for _ in 0..20 {
        let r = c0 * delta;
        let (min, _) = crate::gamma::min_on_ball(|y| {
            let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
            q1_fn.eval(&p)
        }, x.len(), r, 201);
        if min >= 0.1 {
            found = true;
            break;
        }
        c0 *= 0.5;
    }
    if !found {
        return Err(ExtendError::CutoffSearchFailed);
    }

    let chi = ball_cutoff(x, c0 * delta, m);
    let theta1_tilde = FunctionHandle::sum(vec![
        FunctionHandle::product(chi.clone(), FunctionHandle::poly(q1.clone())),
        FunctionHandle::constant(1.0),
        FunctionHandle::scale(-1.0, chi.clone()),
    ]);
    let theta2_tilde = FunctionHandle::product(chi, FunctionHandle::poly(q2.clone()));
    let quadrance = FunctionHandle::sum(vec![
        FunctionHandle::product(theta1_tilde.clone(), theta1_tilde.clone()),
        FunctionHandle::product(theta2_tilde.clone(), theta2_tilde.clone()),
    ]);
    let inv = FunctionHandle::inv_sqrt(quadrance.clone());
    let theta1 = FunctionHandle::product(theta1_tilde.clone(), inv.clone());
    let theta2 = FunctionHandle::product(theta2_tilde.clone(), inv);
    let blend = FunctionHandle::product(
        FunctionHandle::sum(vec![
            FunctionHandle::product(
                FunctionHandle::product(theta1_tilde.clone(), theta1_tilde),
                f1,
            ),
            FunctionHandle::product(
                FunctionHandle::product(theta2_tilde.clone(), theta2_tilde),
                f2,
            ),
        ]),
        FunctionHandle::recip(quadrance),
    );
    Ok(PatchResult {
        handle: blend,
        theta1,
        theta2,
        c0,
        swapped,
    })
}

/// Glues local extensions over a classified decomposition:
/// `F = sum_Q theta_Q F_Q`, with the zero function on type-3 cubes.
/// `locals[i]` must be present exactly for type-1/2 cubes.
pub fn glue_cz(
    dec: &CzDecomposition,
    thetas: &[FunctionHandle],
    locals: &[Option<FunctionHandle>],
) -> Result<FunctionHandle, ExtendError> {
    if dec.types.len() != dec.len() {
        return Err(ExtendError::GlueMismatch(
            "decomposition is not classified".into(),
        ));
    }
    if thetas.len() != dec.len() || locals.len() != dec.len() {
        return Err(ExtendError::GlueMismatch(format!(
            "{} cubes, {} partition functions, {} locals",
            dec.len(),
            thetas.len(),
            locals.len()
        )));
    }
    let mut terms = Vec::new();
    for i in 0..dec.len() {
        match (dec.types[i], &locals[i]) {
            (CubeType::Type3, None) => {}
            (CubeType::Type3, Some(_)) => {
                return Err(ExtendError::GlueMismatch(format!(
                    "cube {i} is type 3 but carries a local extension"
                )));
            }
            (_, Some(f)) => {
                terms.push(FunctionHandle::product(thetas[i].clone(), f.clone()));
            }
            (_, None) => {
                return Err(ExtendError::GlueMismatch(format!(
                    "cube {i} needs a local extension"
                )));
            }
        }
    }
    if terms.is_empty() {
        return Ok(FunctionHandle::zero());
    }
    Ok(FunctionHandle::sum(terms))
}

/// Verification report; all fields measured on a grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub interp_ok: bool,
    /// Worst |F(x) - f(x)| over the data.
    pub interp_error: f64,
    pub min_on_grid: f64,
    pub min_arg: Vec<f64>,
    /// Supremum of |d^b F| per multi-index (key: concatenated exponents).
    pub norms: BTreeMap<String, f64>,
    pub max_norm: f64,
}

/// Checks interpolation, nonnegativity, and derivative sups on a grid.
pub fn verify_interpolant(
    f: &FunctionHandle,
    points: &[Vec<f64>],
    values: &[f64],
    m: usize,
    window: &[(f64, f64)],
    per_axis: usize,
) -> VerifyReport {
    let mut interp_error = 0.0f64;
    for (x, &v) in points.iter().zip(values) {
        interp_error = interp_error.max((f.eval(x) - v).abs());
    }
    let (min_on_grid, min_arg) = grid_min(f, window, per_axis);
    let mut norms = BTreeMap::new();
    let mut max_norm = 0.0f64;
    let n = window.len();
    let indices = multiindex::enumerate(n, m as u32);
    let mut sups = vec![0.0f64; indices.len()];
    for x in grid_points(window, per_axis) {
        let jet = f.jet_at(&x, m);
        for (i, alpha) in indices.iter().enumerate() {
            sups[i] = sups[i].max(jet.coeff(alpha).abs());
        }
    }
    for (alpha, sup) in indices.iter().zip(&sups) {
        let key: String = alpha.0.iter().map(|k| k.to_string()).collect();
        norms.insert(key, *sup);
        max_norm = max_norm.max(*sup);
    }
    VerifyReport {
        interp_ok: interp_error <= 1e-8,
        interp_error,
        min_on_grid,
        min_arg,
        norms,
        max_norm,
    }
}

/// Full report of an interpolation run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub interp_ok: bool,
    pub interp_error: f64,
    pub min_on_grid: f64,
    pub norms: BTreeMap<String, f64>,
    /// max norm divided by the requested level.
    pub norm_ratio: f64,
    /// Per touching pair of distinct local extensions:
    /// `sup |d^b (F_Q - F_Q')| / (M delta_Q^{m - |b|})`.
    pub defect_ratios: Vec<f64>,
    pub seminorm: f64,
    pub level: f64,
    pub flavor: Flavor,
    pub localized: bool,
}

/// End-to-end pipeline: checks the compatibility and membership hypotheses,
/// builds the decomposition, local extensions, partition, and glue; for
/// data spanning more than half a unit cube the problem is first localized
/// through the unit-scale partition. Returns the interpolant and a
/// verification report.
pub fn interpolate_nonneg(
    points: &[Vec<f64>],
    values: &[f64],
    field: &WhitneyField,
    level: f64,
    flavor: Flavor,
    cfg: &PipelineConfig,
) -> Result<(FunctionHandle, InterpolationReport), ExtendError> {
    assert_eq!(points.len(), values.len());
    let n = points.first().map(|p| p.len()).unwrap_or(1);
    let m = field
        .jets()
        .first()
        .map(|j| j.degree() + 1)
        .unwrap_or(1);

    for (x, &v) in points.iter().zip(values) {
        if v < 0.0 {
            return Err(ExtendError::NegativeData {
                point: x.clone(),
                value: v,
            });
        }
    }
    let compat = taylor_compat_check(field, m, level);
    if !compat.ok {
        return Err(ExtendError::CompatibilityFailed {
            level,
            seminorm: compat.seminorm,
        });
    }
    // Per-jet membership with the data slice pinned.
    for (x, &v) in points.iter().zip(values) {
        let jet = field
            .jet_at(x)
            .ok_or_else(|| ExtendError::MissingJet(x.clone()))?;
        let verdict = match flavor {
            Flavor::Cm1 => gamma_prime_member(jet, x, level, Some(v), &cfg.gamma)?,
            Flavor::Cm => {
                let origin = vec![0.0; n];
                let normalized = Jet::from_coeffs(
                    &origin,
                    jet.degree(),
                    jet.rebase(x).scale(1.0 / level).coeffs().to_vec(),
                )?;
                if (jet.rebase(x).coeffs()[0] - v).abs() > cfg.gamma.tol * (1.0 + v.abs().max(level)) {
                    return Err(GammaError::SliceMismatch(jet.rebase(x).coeffs()[0], v).into());
                }
                crate::gamma::gamma_tilde0_member(&normalized, &cfg.gamma)?
            }
        };
        if !verdict.is_member() {
            return Err(ExtendError::MembershipRejected {
                point: x.clone(),
                status: verdict.status,
                margin: verdict.margin,
            });
        }
    }

    let span = (0..n)
        .map(|a| {
            let lo = points.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .fold(0.0f64, f64::max);

    let localized = points.len() > 1 && span > 0.5;
    let (handle, defect_ratios) = if points.is_empty() {
        (FunctionHandle::zero(), Vec::new())
    } else if !localized {
        core_glue(points, values, field, level, flavor, m, cfg)?
    } else {
        // Localize: solve on each unit-lattice patch holding data, then
        // recombine through the unit partition.
        let window: Vec<(f64, f64)> = (0..n)
            .map(|a| {
                let lo = points.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min);
                let hi = points.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            })
            .collect();
        let bumps = unit_partition(&window, m);
        let mut terms = Vec::new();
        let mut defects = Vec::new();
        for bump in &bumps {
            let mut sub_points = Vec::new();
            let mut sub_values = Vec::new();
            for (x, &v) in points.iter().zip(values) {
                if bump.support_contains(x) {
                    sub_points.push(x.clone());
                    sub_values.push(v);
                }
            }
            if sub_points.is_empty() {
                continue;
            }
            let sub_field = field.restrict(|x| bump.support_contains(x));
            let (local, mut d) =
                core_glue(&sub_points, &sub_values, &sub_field, level, flavor, m, cfg)?;
            defects.append(&mut d);
            terms.push(FunctionHandle::product(bump.handle.clone(), local));
        }
        (FunctionHandle::sum(terms), defects)
    };

    // Verify on a window around the data.
    let window: Vec<(f64, f64)> = (0..n)
        .map(|a| {
            if points.is_empty() {
                return (-cfg.window_pad, cfg.window_pad);
            }
            let lo = points.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max);
            (lo - cfg.window_pad, hi + cfg.window_pad)
        })
        .collect();
    let report = verify_interpolant(
        &handle,
        points,
        values,
        m,
        &window,
        cfg.verify_grid_for(n),
    );
    let report = InterpolationReport {
        interp_ok: report.interp_ok,
        interp_error: report.interp_error,
        min_on_grid: report.min_on_grid,
        norm_ratio: report.max_norm / level,
        norms: report.norms,
        defect_ratios,
        seminorm: compat.seminorm,
        level,
        flavor,
        localized,
    };
    Ok((handle, report))
}

/// Core gluing step for data of small span: decomposition over a padded
/// window, one local extension per distinct anchor, Whitney partition,
/// glue, and defect measurement.
fn core_glue(
    points: &[Vec<f64>],
    _values: &[f64],
    field: &WhitneyField,
    level: f64,
    flavor: Flavor,
    m: usize,
    cfg: &PipelineConfig,
) -> Result<(FunctionHandle, Vec<f64>), ExtendError> {
    let n = points[0].len();
    let region = DyadicRegion::padded_around(points, n, 6);
    let dec = cz_decompose(points, &region)?;
    let dec = classify_and_anchor(dec, points)?;
    let thetas = whitney_partition(&dec, m)?;

    // One extension per distinct anchor; cubes sharing an anchor share the
    // local extension (and contribute no defect).
    let mut by_anchor: BTreeMap<Vec<u64>, FunctionHandle> = BTreeMap::new();
    let mut locals: Vec<Option<FunctionHandle>> = vec![None; dec.len()];
    for i in 0..dec.len() {
        let Some(anchor) = &dec.anchors[i] else {
            continue;
        };
        let key: Vec<u64> = anchor.iter().map(|c| c.to_bits()).collect();
        if let Some(f) = by_anchor.get(&key) {
            locals[i] = Some(f.clone());
            continue;
        }
        let jet = field
            .jet_at(anchor)
            .ok_or_else(|| ExtendError::MissingJet(anchor.clone()))?;
        let f = match flavor {
            Flavor::Cm1 => extend_jet_cm1(jet, anchor, level, &cfg.gamma)?,
            Flavor::Cm => {
                // Keep the truncation dip below the verification floor.
                let k = cfg.series_terms.max(34usize.div_ceil(m));
                extend_jet_cm_at(jet, anchor, level, k, &cfg.gamma)?
            }
        };
        by_anchor.insert(key, f.clone());
        locals[i] = Some(f);
    }

    let defects = measure_defects(&dec, &locals, level, m);
    let handle = glue_cz(&dec, &thetas, &locals)?;
    Ok((handle, defects))
}

/// For every touching pair of cubes carrying distinct local extensions,
/// the scaled defect `sup |d^b (F_Q - F_Q')| / (level * delta_Q^{m-|b|})`
/// over the overlap of their dilates, maximized over `|b| <= m`.
pub fn measure_defects(
    dec: &CzDecomposition,
    locals: &[Option<FunctionHandle>],
    level: f64,
    m: usize,
) -> Vec<f64> {
    let n = dec.region.dim();
    let indices = multiindex::enumerate(n, m as u32);
    let mut out = Vec::new();
    for i in 0..dec.len() {
        let Some(fi) = &locals[i] else { continue };
        for j in (i + 1)..dec.len() {
            let Some(fj) = &locals[j] else { continue };
            if !dec.cubes[i].dilates_touch(&dec.cubes[j]) {
                continue;
            }
            if dec.anchors[i] == dec.anchors[j] {
                continue; // identical extension, defect zero
            }
            // Overlap box of the closed dilates.
            let window: Vec<(f64, f64)> = (0..n)
                .map(|a| {
                    let scale_i = ((dec.cubes[i].level - 7) as f64).exp2();
                    let scale_j = ((dec.cubes[j].level - 7) as f64).exp2();
                    let lo_i = (128 * dec.cubes[i].corner[a] - 1) as f64 * scale_i;
                    let hi_i = (128 * dec.cubes[i].corner[a] + 129) as f64 * scale_i;
                    let lo_j = (128 * dec.cubes[j].corner[a] - 1) as f64 * scale_j;
                    let hi_j = (128 * dec.cubes[j].corner[a] + 129) as f64 * scale_j;
                    (lo_i.max(lo_j), hi_i.min(hi_j))
                })
                .collect();
            if window.iter().any(|&(lo, hi)| hi < lo) {
                continue;
            }
            let window: Vec<(f64, f64)> = window
                .into_iter()
                .map(|(lo, hi)| if hi > lo { (lo, hi) } else { (lo - 1e-12, hi + 1e-12) })
                .collect();
            let delta = dec.cubes[i].sidelength();
            let mut worst = 0.0f64;
            for x in grid_points(&window, 9) {
                let ji = fi.jet_at(&x, m);
                let jj = fj.jet_at(&x, m);
                for alpha in indices {
                    let d = (ji.coeff(alpha) - jj.coeff(alpha)).abs();
                    let scale = level * delta.powi((m - alpha.order() as usize) as i32);
                    worst = worst.max(d / scale);
                }
            }
            out.push(worst);
        }
    }
    out
}
