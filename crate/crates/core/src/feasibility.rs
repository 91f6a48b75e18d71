//! Convex feasibility over Whitney-field coefficients.
//!
//! Whether a data set admits a compatible family of jets at level `M` is a
//! linear question once the level and the nonnegativity sample points are
//! fixed: value slices are equalities, derivative boxes and pairwise
//! compatibility bounds are linear inequalities, and sampled nonnegativity
//! `P^x(y) + M |y - x|^m >= 0` is linear in the jet coefficients. The
//! resulting programs are small and solved by the in-crate simplex; every
//! feasible answer is re-verified against the dense membership tests (no
//! trust in the solver), refining the sample grid when the verification
//! disagrees.
//!
//! On top of the feasibility kernel sit the minimal-norm bisection, the
//! subset-versus-global finiteness experiment, and a Helly-property
//! harness for systems of convex sets given by linear inequalities.

use crate::gamma::{gamma_prime_member, GammaConfig, MembershipStatus};
use crate::jets::Jet;
use crate::lp::{
    infeasibility_certificate, solve, Backend, LinearProgram, LpError, LpOutcome, LpRow,
};
use crate::multiindex;
use crate::whitney::{taylor_compat_check, WhitneyField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeasError {
    #[error("empty point set")]
    EmptySet,
    #[error("points and values have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("data value {1} at point {0} is negative")]
    NegativeValue(usize, f64),
    #[error("level must be positive, got {0}")]
    BadLevel(f64),
    #[error("upper search bound {0} is infeasible; widest margin seen {1:.3e}")]
    UpperBoundInfeasible(f64, f64),
    #[error("subset budget exceeded: {0} subsets > {1}; shrink the set or k_sharp")]
    BudgetExceeded(u128, u128),
    #[error("tuple budget exceeded: {0} tuples")]
    TupleBudget(u128),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Gamma(#[from] crate::gamma::GammaError),
}

/// Where a constraint row comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RowTag {
    /// `P^x(x) = f(x)`.
    ValueSlice { point: usize },
    /// `+-d^b P^x(x) >= -M`.
    DerivBound { point: usize, index: Vec<u32> },
    /// `+-d^b (P^x - P^y)(x) >= -M |x-y|^{m-|b|}`.
    PairCompat {
        at: usize,
        other: usize,
        index: Vec<u32>,
    },
    /// `P^x(y) + M |y - x|^m >= 0` at a sample `y`.
    NonnegSample { point: usize, sample: Vec<f64> },
}

/// The assembled program over stacked jet coefficients, with row
/// provenance.
pub struct JetLp {
    pub lp: LinearProgram,
    pub tags: Vec<RowTag>,
    pub m: usize,
    pub level: f64,
    points: Vec<Vec<f64>>,
}

/// Tuning for the feasibility layer.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeasConfig {
    #[serde(default)]
    pub gamma: GammaConfig,
    /// Nonnegativity samples per axis per point; `None` picks 41 for
    /// `n = 1` and 9 for `n = 2`.
    #[serde(default)]
    pub lp_samples_per_axis: Option<usize>,
    /// Re-verification rounds with grid refinement.
    #[serde(default = "default_refine_rounds")]
    pub refine_rounds: usize,
    /// Bisection iteration cap.
    #[serde(default = "default_bisect_iters")]
    pub bisect_iters: usize,
    /// Relative tolerance on the minimal level.
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    /// Compute minimal infeasible row subsets on infeasible answers. Off in
    /// the bisection hot path (a deletion filter re-solves per row).
    #[serde(default)]
    pub certificates: bool,
}

fn default_refine_rounds() -> usize {
    3
}

fn default_bisect_iters() -> usize {
    40
}

fn default_rel_tol() -> f64 {
    1e-3
}

impl Default for FeasConfig {
    fn default() -> Self {
        FeasConfig {
            gamma: GammaConfig::default(),
            lp_samples_per_axis: None,
            refine_rounds: default_refine_rounds(),
            bisect_iters: default_bisect_iters(),
            rel_tol: default_rel_tol(),
            certificates: true,
        }
    }
}

impl FeasConfig {
    fn samples_for(&self, dim: usize) -> usize {
        self.lp_samples_per_axis
            .unwrap_or(if dim == 1 { 41 } else { 9 })
    }
}

/// Assembles the jet-coefficient program for a point set at a fixed level.
/// Extra nonnegativity samples (from failed re-verification) are appended
/// per point.
pub fn build_jet_lp(
    points: &[Vec<f64>],
    values: &[f64],
    m: usize,
    level: f64,
    samples_per_axis: usize,
    extra_samples: &[(usize, Vec<f64>)],
) -> JetLp {
    let n = points.first().map(|p| p.len()).unwrap_or(1);
    let indices = multiindex::enumerate(n, (m - 1) as u32);
    let dim_p = indices.len();
    let num_vars = points.len() * dim_p;
    let var = |point: usize, idx: usize| point * dim_p + idx;
    let mut rows = Vec::new();
    let mut tags = Vec::new();

    for (i, _) in points.iter().enumerate() {
        // Value slice: the zeroth coefficient is the value at the point.
        let mut c = vec![0.0; num_vars];
        c[var(i, 0)] = 1.0;
        rows.push(LpRow::eq(c, values[i]));
        tags.push(RowTag::ValueSlice { point: i });

        // Derivative box.
        for (idx, alpha) in indices.iter().enumerate() {
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; num_vars];
                c[var(i, idx)] = sign;
                rows.push(LpRow::ge(c, -level));
                tags.push(RowTag::DerivBound {
                    point: i,
                    index: alpha.0.clone(),
                });
            }
        }
    }

    // Pairwise compatibility: d^b (P^i - P^j)(x_i) bounded by the distance
    // power. d^b P^j(x_i) = sum_g c^j_{b+g} (x_i - x_j)^g / g!.
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i == j {
                continue;
            }
            let dist = crate::whitney::euclid(&points[i], &points[j]);
            let shift: Vec<f64> = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| a - b)
                .collect();
            for (bi, beta) in indices.iter().enumerate() {
                let bound = level * dist.powi((m - beta.order() as usize) as i32);
                for sign in [1.0, -1.0] {
                    let mut c = vec![0.0; num_vars];
                    c[var(i, bi)] += sign;
                    for (gi, gamma) in indices.iter().enumerate() {
                        let full = beta.add(gamma);
                        if full.order() as usize <= m - 1 {
                            let pos = indices.iter().position(|a| *a == full).unwrap();
                            c[var(j, pos)] -=
                                sign * gamma.monomial(&shift) / gamma.factorial();
                            let _ = gi;
                        }
                    }
                    rows.push(LpRow::ge(c, -bound));
                    tags.push(RowTag::PairCompat {
                        at: i,
                        other: j,
                        index: beta.0.clone(),
                    });
                }
            }
        }
    }

    // Sampled nonnegativity around each point. The sampling radius covers
    // the region where a level-bounded jet could fight the |y - x|^m term.
    let radius = sample_radius(n, m);
    for (i, x) in points.iter().enumerate() {
        let mut samples = box_grid(x, radius, samples_per_axis);
        samples.extend(
            extra_samples
                .iter()
                .filter(|(p, _)| *p == i)
                .map(|(_, y)| y.clone()),
        );
        for y in samples {
            let shift: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
            let dist = crate::whitney::euclid(&y, x);
            // Rows already implied by the derivative box are dropped: the
            // jet part is at least -level * sum |shift^a| / a! there.
            let reach: f64 = indices
                .iter()
                .map(|a| a.monomial(&shift).abs() / a.factorial())
                .sum();
            if reach <= dist.powi(m as i32) {
                continue;
            }
            let mut c = vec![0.0; num_vars];
            for (ai, alpha) in indices.iter().enumerate() {
                c[var(i, ai)] = alpha.monomial(&shift) / alpha.factorial();
            }
            rows.push(LpRow::ge(c, -level * dist.powi(m as i32)));
            tags.push(RowTag::NonnegSample {
                point: i,
                sample: y,
            });
        }
    }

    JetLp {
        lp: LinearProgram {
            num_vars,
            rows,
            objective: vec![0.0; num_vars],
        },
        tags,
        m,
        level,
        points: points.to_vec(),
    }
}

fn sample_radius(n: usize, m: usize) -> f64 {
    // Coefficients are bounded by the level, so the low-order mass of the
    // normalized jet is at most sum 1/a!; beyond that radius |y-x|^m wins.
    let mass: f64 = multiindex::enumerate(n, (m - 1) as u32)
        .iter()
        .map(|a| 1.0 / a.factorial())
        .sum();
    mass.max(1.0) * 1.25
}

fn box_grid(center: &[f64], radius: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let window: Vec<(f64, f64)> = center.iter().map(|&c| (c - radius, c + radius)).collect();
    crate::smoothfn::grid_points(&window, per_axis.max(3))
}

impl JetLp {
    fn extract_field(&self, x: &[f64]) -> WhitneyField {
        let n = self.points.first().map(|p| p.len()).unwrap_or(1);
        let dim_p = multiindex::count(n, (self.m - 1) as u32);
        let jets = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                Jet::from_coeffs(p, self.m - 1, x[i * dim_p..(i + 1) * dim_p].to_vec())
                    .expect("finite LP solution")
            })
            .collect();
        WhitneyField::new(self.points.clone(), jets).expect("distinct points")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeasStatus {
    Feasible,
    Infeasible,
    Undetermined,
}

#[derive(Debug)]
pub struct Feasibility {
    pub status: FeasStatus,
    /// Witness field; present iff feasible, re-verified against the dense
    /// membership and compatibility checks.
    pub witness: Option<WhitneyField>,
    /// Margin-variable value of the last solve.
    pub margin: f64,
    /// Minimal infeasible row subset (by tag), when affordable to compute.
    pub certificate: Option<Vec<RowTag>>,
    pub refine_rounds_used: usize,
}

/// Decides whether a compatible, per-point-admissible Whitney field exists
/// for the data at the given level. Feasible answers carry a witness that
/// passed independent re-verification.
pub fn whitney_feasible(
    points: &[Vec<f64>],
    values: &[f64],
    m: usize,
    level: f64,
    cfg: &FeasConfig,
) -> Result<Feasibility, FeasError> {
    if points.len() != values.len() {
        return Err(FeasError::LengthMismatch(points.len(), values.len()));
    }
    if !(level > 0.0) {
        return Err(FeasError::BadLevel(level));
    }
    for (i, &v) in values.iter().enumerate() {
        if v < 0.0 {
            return Err(FeasError::NegativeValue(i, v));
        }
    }
    if points.is_empty() {
        return Ok(Feasibility {
            status: FeasStatus::Feasible,
            witness: Some(WhitneyField::empty()),
            margin: f64::INFINITY,
            certificate: None,
            refine_rounds_used: 0,
        });
    }
    let n = points[0].len();
    let mut per_axis = cfg.samples_for(n);
    let mut extra: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut last_margin = f64::NEG_INFINITY;

    for round in 0..=cfg.refine_rounds {
        let jet_lp = build_jet_lp(points, values, m, level, per_axis, &extra);
        let (lp, margin_col) = with_margin(&jet_lp.lp, level);
        let outcome = solve(&lp, Backend::Float)?;
        match outcome {
            LpOutcome::Infeasible => {
                // Even with the margin fully relaxed the equalities clash;
                // can only happen through degenerate data.
                return Ok(Feasibility {
                    status: FeasStatus::Infeasible,
                    witness: None,
                    margin: f64::NEG_INFINITY,
                    certificate: certificate_if_small(&jet_lp, cfg),
                    refine_rounds_used: round,
                });
            }
            LpOutcome::Unbounded => unreachable!("margin is capped"),
            LpOutcome::Optimal { x, .. } => {
                last_margin = x[margin_col];
                if x[margin_col] < 0.0 {
                    return Ok(Feasibility {
                        status: FeasStatus::Infeasible,
                        witness: None,
                        margin: x[margin_col],
                        certificate: certificate_if_small(&jet_lp, cfg),
                        refine_rounds_used: round,
                    });
                }
                let field = jet_lp.extract_field(&x);
                match reverify(&field, points, values, m, level, cfg)? {
                    Ok(()) => {
                        return Ok(Feasibility {
                            status: FeasStatus::Feasible,
                            witness: Some(field),
                            margin: x[margin_col],
                            certificate: None,
                            refine_rounds_used: round,
                        });
                    }
                    Err(bad_samples) => {
                        extra.extend(bad_samples);
                        per_axis = per_axis * 2 - 1;
                    }
                }
            }
        }
    }
    Ok(Feasibility {
        status: FeasStatus::Undetermined,
        witness: None,
        margin: last_margin,
        certificate: None,
        refine_rounds_used: cfg.refine_rounds,
    })
}

/// Appends a margin variable to all inequality rows and caps it.
fn with_margin(lp: &LinearProgram, level: f64) -> (LinearProgram, usize) {
    let margin_col = lp.num_vars;
    let mut rows: Vec<LpRow> = lp
        .rows
        .iter()
        .map(|r| {
            let mut c = r.coeffs.clone();
            c.push(match r.relation {
                crate::lp::RowRelation::Ge => -1.0,
                crate::lp::RowRelation::Eq => 0.0,
            });
            LpRow {
                coeffs: c,
                relation: r.relation,
                rhs: r.rhs,
            }
        })
        .collect();
    let mut cap = vec![0.0; margin_col + 1];
    cap[margin_col] = -1.0;
    rows.push(LpRow::ge(cap, -0.1 * level.max(1.0)));
    let mut objective = vec![0.0; margin_col + 1];
    objective[margin_col] = 1.0;
    (
        LinearProgram {
            num_vars: margin_col + 1,
            rows,
            objective,
        },
        margin_col,
    )
}

fn certificate_if_small(jet_lp: &JetLp, cfg: &FeasConfig) -> Option<Vec<RowTag>> {
    if !cfg.certificates || jet_lp.lp.rows.len() > 220 {
        return None;
    }
    infeasibility_certificate(&jet_lp.lp, Backend::Float)
        .ok()
        .map(|rows| rows.into_iter().map(|r| jet_lp.tags[r].clone()).collect())
}

/// Dense re-verification of an LP witness; on failure returns sample
/// points to add near the violations.
#[allow(clippy::type_complexity)]
fn reverify(
    field: &WhitneyField,
    points: &[Vec<f64>],
    values: &[f64],
    m: usize,
    level: f64,
    cfg: &FeasConfig,
) -> Result<Result<(), Vec<(usize, Vec<f64>)>>, FeasError> {
    let slack = 1.0 + 1e-6;
    if !taylor_compat_check(field, m, level * slack).ok {
        // The pair rows are exact linear constraints; failure here means
        // solver noise. Treat as verification failure without new samples.
        return Ok(Err(Vec::new()));
    }
    let mut bad = Vec::new();
    for (i, x) in points.iter().enumerate() {
        let jet = field.jet_at(x).expect("witness covers every point");
        let verdict = gamma_prime_member(jet, x, level * slack, Some(values[i]), &cfg.gamma)?;
        if verdict.status != MembershipStatus::Member {
            if let Some(crate::gamma::Witness::Point { x: y, .. }) = verdict.witness {
                bad.push((i, y.clone()));
                // A short ray of nearby samples pins the violating dip.
                for t in [0.5, 0.75, 1.25] {
                    let nudged: Vec<f64> =
                        y.iter().zip(x).map(|(a, b)| b + (a - b) * t).collect();
                    bad.push((i, nudged));
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(Ok(()))
    } else {
        Ok(Err(bad))
    }
}

#[derive(Debug)]
pub struct MinNorm {
    pub level: f64,
    pub witness: WhitneyField,
    pub iterations: usize,
    /// Levels probed infeasible/feasible around the answer.
    pub bracket: (f64, f64),
}

/// Smallest feasible level by bisection, within the configured relative
/// tolerance. The lower search bound is a fraction of the largest value;
/// the upper bound comes from the crude estimate `max(max f, worst
/// pairwise slope)` under which constant jets are feasible.
pub fn min_norm(
    points: &[Vec<f64>],
    values: &[f64],
    m: usize,
    cfg: &FeasConfig,
) -> Result<MinNorm, FeasError> {
    if points.is_empty() {
        return Err(FeasError::EmptySet);
    }
    let max_f = values.iter().cloned().fold(0.0f64, f64::max);
    if max_f == 0.0 {
        // The zero field is feasible at every positive level.
        let jets = points
            .iter()
            .map(|p| Jet::zero(p.len(), m - 1, p))
            .collect();
        return Ok(MinNorm {
            level: 0.0,
            witness: WhitneyField::new(points.to_vec(), jets).expect("distinct points"),
            iterations: 0,
            bracket: (0.0, 0.0),
        });
    }

    let cfg = FeasConfig {
        certificates: false,
        ..cfg.clone()
    };
    let cfg = &cfg;
    let mut crude = max_f;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = crate::whitney::euclid(&points[i], &points[j]);
            let df = (values[i] - values[j]).abs();
            crude = crude.max(df / d.powi(m as i32)).max(df / d);
        }
    }
    let mut hi = crude * 1.25;
    let mut hi_result = whitney_feasible(points, values, m, hi, cfg)?;
    let mut expand = 0;
    while hi_result.status != FeasStatus::Feasible && expand < 4 {
        hi *= 2.0;
        hi_result = whitney_feasible(points, values, m, hi, cfg)?;
        expand += 1;
    }
    if hi_result.status != FeasStatus::Feasible {
        return Err(FeasError::UpperBoundInfeasible(hi, hi_result.margin));
    }
    let mut witness = hi_result.witness.expect("feasible");
    let mut lo = max_f * 1e-3;
    let mut iterations = 0;
    while iterations < cfg.bisect_iters && hi / lo > 1.0 + cfg.rel_tol {
        let mid = (lo * hi).sqrt();
        let result = whitney_feasible(points, values, m, mid, cfg)?;
        if result.status == FeasStatus::Feasible {
            hi = mid;
            witness = result.witness.expect("feasible");
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(MinNorm {
        level: hi,
        witness,
        iterations,
        bracket: (lo, hi),
    })
}

/// One subset row of the finiteness experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubsetRow {
    pub id: usize,
    pub members: Vec<usize>,
    pub size: usize,
    pub level: f64,
    pub status: FeasStatus,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GapReport {
    pub k_sharp: usize,
    /// Worst minimal level over subsets of size `min(k_sharp, #E)`.
    pub m_subset: f64,
    /// Minimal level over the full set.
    pub m_global: f64,
    /// `m_global / m_subset`; at least one up to solver tolerance.
    pub ratio: f64,
    pub table: Vec<SubsetRow>,
}

/// Subset-versus-global experiment: the worst minimal level over small
/// subsets against the global minimal level. Their ratio is the measured
/// finiteness constant. Subsets of size exactly `min(k_sharp, #E)` suffice:
/// the minimal level is monotone under restriction, so smaller subsets are
/// dominated by any superset of full size.
pub fn finiteness_gap(
    points: &[Vec<f64>],
    values: &[f64],
    m: usize,
    k_sharp: usize,
    cfg: &FeasConfig,
) -> Result<GapReport, FeasError> {
    if points.is_empty() {
        return Err(FeasError::EmptySet);
    }
    let n_pts = points.len();
    let k = k_sharp.min(n_pts);
    let budget: u128 = 1_000_000;
    let mut total: u128 = 0;
    for j in 0..=k {
        total += binom_u128(n_pts as u128, j as u128);
        if total > budget {
            return Err(FeasError::BudgetExceeded(total, budget));
        }
    }

    let subsets = combinations(n_pts, k);
    let rows: Result<Vec<SubsetRow>, FeasError> = subsets
        .par_iter()
        .enumerate()
        .map(|(id, members)| {
            let sub_points: Vec<Vec<f64>> = members.iter().map(|&i| points[i].clone()).collect();
            let sub_values: Vec<f64> = members.iter().map(|&i| values[i]).collect();
            let res = min_norm(&sub_points, &sub_values, m, cfg)?;
            Ok(SubsetRow {
                id,
                members: members.clone(),
                size: members.len(),
                level: res.level,
                status: FeasStatus::Feasible,
            })
        })
        .collect();
    let table = rows?;
    let m_global = min_norm(points, values, m, cfg)?.level;
    // The global witness restricts to every subset, so the global level is
    // itself a certified upper bound on every subset's minimal level;
    // capping with it removes bisection-grid misalignment between the
    // independent searches (which could otherwise push the ratio a hair
    // below one).
    let m_subset = table
        .iter()
        .map(|r| r.level.min(m_global))
        .fold(0.0f64, f64::max);
    let ratio = if m_subset > 0.0 {
        m_global / m_subset
    } else if m_global == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    Ok(GapReport {
        k_sharp,
        m_subset,
        m_global,
        ratio,
        table,
    })
}

/// Experiment export: `subset id, size, M*, status` CSV.
pub fn gap_table_csv(report: &GapReport) -> String {
    let mut out = String::from("subset_id,size,level,status\n");
    for row in &report.table {
        out.push_str(&format!(
            "{},{},{:.9e},{:?}\n",
            row.id, row.size, row.level, row.status
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Helly harness.

/// A convex subset of R^D given by finitely many linear inequalities
/// `coeffs . x >= rhs`.
#[derive(Clone, Debug)]
pub struct ConvexSet {
    pub rows: Vec<LpRow>,
}

impl ConvexSet {
    pub fn new(rows: Vec<LpRow>) -> Self {
        ConvexSet { rows }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HellyReport {
    pub dim: usize,
    pub tuples_checked: usize,
    pub all_tuples_nonempty: bool,
    pub first_empty_tuple: Option<Vec<usize>>,
    pub full_nonempty: bool,
    /// Helly consistency: `(D+1)`-wise nonempty implies globally nonempty.
    pub consistent: bool,
}

/// Checks both sides of the Helly property for the given sets: every
/// `(dim + 1)`-tuple intersection and the full intersection, each by a
/// feasibility program.
pub fn helly_check(sets: &[ConvexSet], dim: usize) -> Result<HellyReport, FeasError> {
    assert!(dim <= 20, "dimension bounded by configuration");
    let t = (dim + 1).min(sets.len().max(1));
    let tuple_count = binom_u128(sets.len() as u128, t as u128);
    if tuple_count > 200_000 {
        return Err(FeasError::TupleBudget(tuple_count));
    }
    let tuples = combinations(sets.len(), t);
    let mut all_tuples_nonempty = true;
    let mut first_empty_tuple = None;
    let mut tuples_checked = 0;
    for tuple in &tuples {
        tuples_checked += 1;
        if !intersection_nonempty(sets, tuple, dim)? {
            all_tuples_nonempty = false;
            first_empty_tuple = Some(tuple.clone());
            break;
        }
    }
    let all: Vec<usize> = (0..sets.len()).collect();
    let full_nonempty = intersection_nonempty(sets, &all, dim)?;
    Ok(HellyReport {
        dim,
        tuples_checked,
        all_tuples_nonempty,
        first_empty_tuple,
        full_nonempty,
        consistent: !all_tuples_nonempty || full_nonempty,
    })
}

fn intersection_nonempty(sets: &[ConvexSet], members: &[usize], dim: usize) -> Result<bool, FeasError> {
    let mut rows = Vec::new();
    for &i in members {
        rows.extend(sets[i].rows.iter().cloned());
    }
    let lp = LinearProgram {
        num_vars: dim,
        rows,
        objective: vec![0.0; dim],
    };
    match solve(&lp, Backend::Auto)? {
        LpOutcome::Infeasible => Ok(false),
        _ => Ok(true),
    }
}

// ---------------------------------------------------------------------------

fn binom_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let needed = k - cur.len();
        for i in start..=(n - needed) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    if k == 0 {
        out.push(Vec::new());
    } else if k <= n {
        rec(0, n, k, &mut cur, &mut out);
    }
    out
}
