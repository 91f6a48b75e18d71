//! Membership tests for the convex jet classes behind nonnegative
//! extension.
//!
//! At the origin, three nested questions arise for a jet `P`:
//!
//! - [`gamma0plus_member`]: is the degree-`m` jet `P` one of the model
//!   class — derivative values bounded by one, `P(x) + |x|^m >= 0`
//!   everywhere, and for every `eps > 0` some ball on which
//!   `P(x) + eps |x|^m >= 0`? Jets of this class extend to bounded
//!   nonnegative `C^m` functions.
//! - [`gamma_tilde0_member`]: can the degree-`(m-1)` jet `P` be completed
//!   by a homogeneous degree-`m` correction into the class above? Decided
//!   by linear programming over the correction coefficients, with the
//!   candidate re-verified directly.
//! - [`gamma_prime_member`]: the Lipschitz-flavor variant — derivative
//!   bounds through order `m-1` and `P(x) + |x|^m >= 0` globally, with no
//!   small-ball condition. This one is exact up to grid resolution.
//!
//! Translates and rescalings reduce membership at an arbitrary point and
//! level `M` to the origin at level one: rebase the jet, divide by `M`.
//!
//! Global nonnegativity of `polynomial + |x|^m` is decided on a compact
//! ball: outside a computed radius the `|x|^m` term dominates the
//! polynomial through a coefficient bound (or a sphere-minimum bound on the
//! top-degree part), and inside, a dense grid with local zoom refinement
//! finds the minimum. The small-ball condition is only semi-decidable
//! numerically; a ladder of `eps` values with scale-free annulus margins is
//! scanned, and an explicit `Undetermined` status keeps the incompleteness
//! visible instead of silently misclassifying.

use crate::jets::Jet;
use crate::multiindex::MultiIndex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GammaError {
    #[error("jet must be based at the origin")]
    NotAtOrigin,
    #[error("jet has degree bound {0}, expected {1}")]
    WrongDegree(usize, usize),
    #[error("norm level must be positive, got {0}")]
    BadLevel(f64),
    #[error("dimension {0} unsupported (this build handles n <= 2)")]
    UnsupportedDim(usize),
    #[error("jet value {0} at the point disagrees with the data value {1}")]
    SliceMismatch(f64, f64),
    #[error("linear program failed: {0}")]
    Lp(#[from] crate::lp::LpError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MembershipStatus {
    Member,
    NonMember,
    Undetermined,
}

/// Where a membership constraint failed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Witness {
    /// A point where `P + |x|^m` (suitably scaled) is negative.
    Point { x: Vec<f64>, value: f64 },
    /// An `eps` for which no ball works down to the scanned depth.
    EpsDelta {
        eps: f64,
        delta: f64,
        x: Vec<f64>,
        value: f64,
    },
    /// A derivative bound that fails outright.
    DerivBound { index: Vec<u32>, value: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub status: MembershipStatus,
    /// Worst constraint slack; nonnegative (up to tolerance) for members.
    pub margin: f64,
    pub witness: Option<Witness>,
    /// Diagnostic for undetermined outcomes.
    pub note: Option<String>,
}

impl MembershipVerdict {
    fn member(margin: f64) -> Self {
        MembershipVerdict {
            status: MembershipStatus::Member,
            margin,
            witness: None,
            note: None,
        }
    }

    fn nonmember(margin: f64, witness: Witness) -> Self {
        MembershipVerdict {
            status: MembershipStatus::NonMember,
            margin,
            witness: Some(witness),
            note: None,
        }
    }

    fn undetermined(margin: f64, note: impl Into<String>) -> Self {
        MembershipVerdict {
            status: MembershipStatus::Undetermined,
            margin,
            witness: None,
            note: Some(note.into()),
        }
    }

    pub fn is_member(&self) -> bool {
        self.status == MembershipStatus::Member
    }
}

/// Tuning knobs for the numerical membership machinery.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaConfig {
    /// Grid resolution per axis for ball scans; `None` picks 2001 for
    /// `n = 1` and 301 for `n = 2`.
    #[serde(default)]
    pub grid_per_axis: Option<usize>,
    /// Descending `eps` ladder for the small-ball condition.
    #[serde(default = "default_eps_ladder")]
    pub eps_ladder: Vec<f64>,
    /// Slack for equality slices and acceptance margins.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Relative enlargement of the computed domination radius.
    #[serde(default = "default_r_cut_slack")]
    pub r_cut_slack: f64,
}

fn default_eps_ladder() -> Vec<f64> {
    vec![1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
}

fn default_tol() -> f64 {
    1e-9
}

fn default_r_cut_slack() -> f64 {
    0.125
}

impl Default for GammaConfig {
    fn default() -> Self {
        GammaConfig {
            grid_per_axis: None,
            eps_ladder: default_eps_ladder(),
            tol: default_tol(),
            r_cut_slack: default_r_cut_slack(),
        }
    }
}

impl GammaConfig {
    pub fn grid_for(&self, dim: usize) -> usize {
        self.grid_per_axis
            .unwrap_or(if dim == 1 { 2001 } else { 301 })
    }
}

/// Absolute tolerance for nonnegativity margins.
pub const NONNEG_TOL: f64 = 1e-12;

fn check_origin_jet(p: &Jet, degree: usize) -> Result<(), GammaError> {
    if p.dim() > 2 {
        return Err(GammaError::UnsupportedDim(p.dim()));
    }
    if p.degree() != degree {
        return Err(GammaError::WrongDegree(p.degree(), degree));
    }
    if p.base().iter().any(|&b| b != 0.0) {
        return Err(GammaError::NotAtOrigin);
    }
    Ok(())
}

/// Membership of a degree-`m` jet at the origin in the model class: exact
/// derivative bounds, global nonnegativity of `P + |x|^m`, and the
/// `eps`-ladder small-ball condition.
pub fn gamma0plus_member(p: &Jet, cfg: &GammaConfig) -> Result<MembershipVerdict, GammaError> {
    let m = p.degree();
    check_origin_jet(p, m)?;
    let mut margin = f64::INFINITY;

    // Derivative bounds are read straight off the coefficients.
    for (alpha, &c) in p.indices().iter().zip(p.coeffs()) {
        let slack = 1.0 - c.abs();
        margin = margin.min(slack);
        if slack < -cfg.tol {
            return Ok(MembershipVerdict::nonmember(
                slack,
                Witness::DerivBound {
                    index: alpha.0.clone(),
                    value: c,
                },
            ));
        }
    }

    // Global nonnegativity of P + |x|^m.
    match global_nonneg_check(p, m, 1.0, cfg) {
        NonnegOutcome::Ok(min) => margin = margin.min(min),
        NonnegOutcome::Negative { x, value } => {
            return Ok(MembershipVerdict::nonmember(value, Witness::Point { x, value }));
        }
        NonnegOutcome::Marginal { min } => {
            return Ok(MembershipVerdict::undetermined(
                min.min(margin),
                "top-degree part of P + |x|^m is not coercive; tail unverified",
            ));
        }
    }

    // eps ladder: scale-free margins over dyadic annuli.
    let mut eps_margin = f64::INFINITY;
    for &eps in &cfg.eps_ladder {
        match eps_condition(p, m, eps, cfg) {
            EpsOutcome::Holds { margin: em } => eps_margin = eps_margin.min(em),
            EpsOutcome::Fails { delta, x, value } => {
                return Ok(MembershipVerdict::nonmember(
                    value,
                    Witness::EpsDelta {
                        eps,
                        delta,
                        x,
                        value,
                    },
                ));
            }
        }
    }
    if eps_margin < cfg.tol {
        return Ok(MembershipVerdict::undetermined(
            eps_margin,
            "eps ladder passed with vanishing margin at the smallest eps",
        ));
    }
    Ok(MembershipVerdict::member(margin.min(eps_margin)))
}

/// `b_k = max(0, -min { P(x) : |x| <= 2^{-k} })` for `k = 0..=k_max`.
/// The sequence is clamped to be nonincreasing (the exact values are; grid
/// noise of relative size `1e-15` is absorbed).
pub fn bk_sequence(p: &Jet, k_max: usize, cfg: &GammaConfig) -> Vec<f64> {
    let poly = p.compile();
    let n = p.dim();
    let mut out = Vec::with_capacity(k_max + 1);
    let mut prev = f64::INFINITY;
    for k in 0..=k_max {
        let r = (-(k as f64)).exp2();
        let (min, _) = min_on_ball(|x| poly.eval(x), n, r, cfg.grid_for(n));
        let mut b = (-min).max(0.0);
        b = b.min(prev);
        prev = b;
        out.push(b);
    }
    out
}

/// Membership of a degree-`(m-1)` jet in the projected class: existence of
/// a homogeneous degree-`m` completion placing it in the model class.
pub fn gamma_tilde0_member(p: &Jet, cfg: &GammaConfig) -> Result<MembershipVerdict, GammaError> {
    match gamma_tilde0_completion(p, cfg)? {
        CompletionOutcome::Member { verdict, .. } => Ok(verdict),
        CompletionOutcome::NonMember(v) | CompletionOutcome::Undetermined(v) => Ok(v),
    }
}

pub enum CompletionOutcome {
    Member {
        verdict: MembershipVerdict,
        /// The completed degree-`m` jet.
        completion: Jet,
    },
    NonMember(MembershipVerdict),
    Undetermined(MembershipVerdict),
}

/// As [`gamma_tilde0_member`], also returning the completed jet. The search
/// proceeds in two stages: a linear program over only *necessary*
/// constraints (derivative box, sampled nonnegativity) whose infeasibility
/// certifies nonmembership; then a margin-maximizing program with
/// sufficient-side small-ball rows whose solution is re-verified by
/// [`gamma0plus_member`], with up to three grid refinements.
pub fn gamma_tilde0_completion(
    p: &Jet,
    cfg: &GammaConfig,
) -> Result<CompletionOutcome, GammaError> {
    use crate::lp::{solve, Backend, LinearProgram, LpOutcome, LpRow};
    let m = p.degree() + 1;
    check_origin_jet(p, m - 1)?;
    let n = p.dim();

    // Bounds on P's own derivatives are necessary regardless of the
    // completion.
    for (alpha, &c) in p.indices().iter().zip(p.coeffs()) {
        if c.abs() > 1.0 + cfg.tol {
            return Ok(CompletionOutcome::NonMember(MembershipVerdict::nonmember(
                1.0 - c.abs(),
                Witness::DerivBound {
                    index: alpha.0.clone(),
                    value: c,
                },
            )));
        }
    }
    // P(0) >= 0 is necessary: every completion vanishes at the origin.
    let p0 = p.coeffs()[0];
    if p0 < -cfg.tol {
        return Ok(CompletionOutcome::NonMember(MembershipVerdict::nonmember(
            p0,
            Witness::Point {
                x: vec![0.0; n],
                value: p0,
            },
        )));
    }

    let top: Vec<MultiIndex> = crate::multiindex::enumerate(n, m as u32)
        .iter()
        .filter(|a| a.order() as usize == m)
        .cloned()
        .collect();
    let poly = p.compile();
    let sample_radius = tilde0_sample_radius(p, m, cfg);

    let box_rows = |rows: &mut Vec<LpRow>| {
        for (j, alpha) in top.iter().enumerate() {
            let fact = alpha.factorial();
            let mut c = vec![0.0; top.len()];
            c[j] = fact;
            rows.push(LpRow::ge(c.clone(), -1.0));
            for v in c.iter_mut() {
                *v = -*v;
            }
            rows.push(LpRow::ge(c, -1.0));
        }
    };
    let nonneg_rows = |rows: &mut Vec<LpRow>, per_axis: usize| {
        for y in ball_grid(n, sample_radius, per_axis) {
            let coeffs: Vec<f64> = top.iter().map(|a| a.monomial(&y)).collect();
            let rhs = -(poly.eval(&y) + norm(&y).powi(m as i32));
            rows.push(LpRow::ge(coeffs, rhs));
        }
    };

    // Stage 1: necessary constraints only.
    let mut rows = Vec::new();
    box_rows(&mut rows);
    nonneg_rows(&mut rows, cfg.grid_for(n).min(129));
    let lp = LinearProgram {
        num_vars: top.len(),
        rows,
        objective: vec![0.0; top.len()],
    };
    match solve(&lp, Backend::Float)? {
        LpOutcome::Infeasible => {
            return Ok(CompletionOutcome::NonMember(MembershipVerdict {
                status: MembershipStatus::NonMember,
                margin: f64::NEG_INFINITY,
                witness: None,
                note: Some(
                    "no degree-m completion satisfies the derivative box and sampled nonnegativity"
                        .into(),
                ),
            }));
        }
        LpOutcome::Optimal { .. } | LpOutcome::Unbounded => {}
    }

    // Stage 2: margin maximization with small-ball surrogate rows, then
    // direct re-verification of the candidate.
    let mut per_axis = cfg.grid_for(n).min(129);
    let mut delta_shrink = 1.0;
    let mut last_verdict: Option<MembershipVerdict> = None;
    for _round in 0..3 {
        let margin_col = top.len();
        let mut rows = Vec::new();
        box_rows(&mut rows);
        for r in rows.iter_mut() {
            r.coeffs.push(0.0); // box rows stay hard
        }
        // Scale-free margin: sampled rows are relaxed by `margin * |y|^m`,
        // so maximizing the margin steers the completion into the interior
        // of the admissible set at every scale. (A plain additive margin
        // would be pinned to zero by samples near the origin whenever
        // P(0) = 0.)
        let sampled_row = |y: &[f64], eps: f64, rows: &mut Vec<LpRow>| {
            let r_m = norm(y).powi(m as i32);
            if r_m == 0.0 {
                return;
            }
            let mut coeffs: Vec<f64> = top.iter().map(|a| a.monomial(y)).collect();
            coeffs.push(-r_m);
            rows.push(LpRow::ge(coeffs, -(poly.eval(y) + eps * r_m)));
        };
        for y in ball_grid(n, sample_radius, per_axis) {
            sampled_row(&y, 1.0, &mut rows);
        }
        // Small-ball surrogate: for each ladder eps, demand
        // P + T + eps |y|^m >= margin * |y|^m on a shrinking ball.
        for &eps in &cfg.eps_ladder {
            let delta = (eps * delta_shrink).min(1.0);
            for y in ball_grid(n, delta, 33) {
                sampled_row(&y, eps, &mut rows);
            }
        }
        // margin <= 1 keeps the program bounded.
        let mut cap = vec![0.0; top.len() + 1];
        cap[margin_col] = -1.0;
        rows.push(LpRow::ge(cap, -1.0));
        let mut objective = vec![0.0; top.len() + 1];
        objective[margin_col] = 1.0;
        let lp = LinearProgram {
            num_vars: top.len() + 1,
            rows,
            objective,
        };
        let candidate = match solve(&lp, Backend::Float)? {
            LpOutcome::Optimal { x, .. } => x[..top.len()].to_vec(),
            LpOutcome::Infeasible => {
                // Surrogate rows are sufficient-side; their failure does not
                // certify nonmembership.
                last_verdict = Some(MembershipVerdict::undetermined(
                    0.0,
                    "completion feasible for sampled necessary rows only",
                ));
                delta_shrink *= 0.125;
                per_axis = per_axis * 2 - 1;
                continue;
            }
            LpOutcome::Unbounded => unreachable!("margin is capped"),
        };

        let mut completed = p.embed(m);
        for (alpha, &t) in top.iter().zip(&candidate) {
            completed.set_coeff(alpha, (t * alpha.factorial()).clamp(-1.0, 1.0));
        }
        let verdict = gamma0plus_member(&completed, cfg)?;
        match verdict.status {
            MembershipStatus::Member => {
                return Ok(CompletionOutcome::Member {
                    verdict,
                    completion: completed,
                });
            }
            _ => {
                last_verdict = Some(verdict);
                delta_shrink *= 0.125;
                per_axis = per_axis * 2 - 1;
            }
        }
    }
    let v = last_verdict.unwrap();
    Ok(CompletionOutcome::Undetermined(MembershipVerdict::undetermined(
        v.margin,
        format!(
            "candidate completions kept failing re-verification ({})",
            v.note.unwrap_or_else(|| "margin below tolerance".into())
        ),
    )))
}

/// Membership in the Lipschitz-flavor class at point `x` and level `level`:
/// rebase to `x`, divide by `level`, then require derivative bounds through
/// order `m-1` and global nonnegativity of `P + |z|^m` (no small-ball
/// condition). With `f_value` given, additionally pins `P(x)` to the data
/// value. Monotone in the level: acceptance at `M` implies acceptance at
/// any `M' >= M`.
pub fn gamma_prime_member(
    p: &Jet,
    x: &[f64],
    level: f64,
    f_value: Option<f64>,
    cfg: &GammaConfig,
) -> Result<MembershipVerdict, GammaError> {
    if !(level > 0.0) {
        return Err(GammaError::BadLevel(level));
    }
    if p.dim() > 2 {
        return Err(GammaError::UnsupportedDim(p.dim()));
    }
    let m = p.degree() + 1;
    let rebased = p.rebase(x);
    if let Some(f) = f_value {
        let v = rebased.coeffs()[0];
        if (v - f).abs() > cfg.tol * (1.0 + f.abs().max(level)) {
            return Err(GammaError::SliceMismatch(v, f));
        }
    }
    let origin = vec![0.0; p.dim()];
    let normalized = Jet::from_coeffs(&origin, p.degree(), rebased.scale(1.0 / level).coeffs().to_vec())
        .expect("finite coefficients");

    let mut margin = f64::INFINITY;
    for (alpha, &c) in normalized.indices().iter().zip(normalized.coeffs()) {
        let slack = 1.0 - c.abs();
        margin = margin.min(slack);
        if slack < -cfg.tol {
            return Ok(MembershipVerdict::nonmember(
                slack,
                Witness::DerivBound {
                    index: alpha.0.clone(),
                    value: c * level,
                },
            ));
        }
    }
    match global_nonneg_check(&normalized, m, 1.0, cfg) {
        NonnegOutcome::Ok(min) => Ok(MembershipVerdict::member(margin.min(min))),
        NonnegOutcome::Negative { x: z, value } => {
            let point: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a + b).collect();
            Ok(MembershipVerdict::nonmember(
                value,
                Witness::Point {
                    x: point,
                    value: value * level,
                },
            ))
        }
        NonnegOutcome::Marginal { .. } => {
            unreachable!("degree <= m-1 polynomials are always dominated by |x|^m")
        }
    }
}

// ---------------------------------------------------------------------------
// Nonnegativity of polynomial + coefficient * |x|^m over all of space.

enum NonnegOutcome {
    Ok(f64),
    Negative { x: Vec<f64>, value: f64 },
    Marginal { min: f64 },
}

/// Decides `P(x) + c_top |x|^m >= 0` for all `x` by reduction to a ball.
fn global_nonneg_check(p: &Jet, m: usize, c_top: f64, cfg: &GammaConfig) -> NonnegOutcome {
    let n = p.dim();
    let poly = p.compile();
    let g = |x: &[f64]| poly.eval(x) + c_top * norm(x).powi(m as i32);

    let radius = match tail_radius(p, m, c_top, cfg) {
        TailOutcome::Dominated(r) => r,
        TailOutcome::NegativeDirection(omega) => {
            // Walk outward along the bad direction to a concrete witness.
            let mut t = 1.0;
            for _ in 0..400 {
                let x: Vec<f64> = omega.iter().map(|w| w * t).collect();
                let v = g(&x);
                if v < -NONNEG_TOL {
                    return NonnegOutcome::Negative { x, value: v };
                }
                t *= 1.5;
            }
            // The sphere bound says the tail goes negative eventually; if it
            // only does so beyond floating-point range, treat as marginal.
            let (min, _) = min_on_ball(g, n, 10.0, cfg.grid_for(n));
            return NonnegOutcome::Marginal { min };
        }
        TailOutcome::Marginal => {
            let (min, x) = min_on_ball(g, n, 10.0, cfg.grid_for(n));
            if min < -NONNEG_TOL {
                return NonnegOutcome::Negative { x, value: min };
            }
            return NonnegOutcome::Marginal { min };
        }
    };
    let (min, x) = min_on_ball(g, n, radius, cfg.grid_for(n));
    if min < -NONNEG_TOL {
        NonnegOutcome::Negative { x, value: min }
    } else {
        NonnegOutcome::Ok(min)
    }
}

enum TailOutcome {
    Dominated(f64),
    NegativeDirection(Vec<f64>),
    Marginal,
}

/// Radius beyond which `c_top |x|^m` dominates `P`, when one exists.
fn tail_radius(p: &Jet, m: usize, c_top: f64, cfg: &GammaConfig) -> TailOutcome {
    let n = p.dim();
    let indices = p.indices();
    let mono = p.monomial_coeffs();
    let mut top_mass = 0.0;
    let mut low_mass = 0.0;
    for (alpha, &a) in indices.iter().zip(&mono) {
        if alpha.order() as usize == m {
            top_mass += a.abs();
        } else {
            low_mass += a.abs();
        }
    }
    if top_mass < c_top * (1.0 - 1e-9) {
        let r = (low_mass / (c_top - top_mass)).max(1.0);
        return TailOutcome::Dominated(r * (1.0 + cfg.r_cut_slack));
    }
    // Sphere minimum of the top-degree part plus the |x|^m coefficient.
    let top_terms: Vec<(&MultiIndex, f64)> = indices
        .iter()
        .zip(&mono)
        .filter(|(a, _)| a.order() as usize == m)
        .map(|(a, &c)| (a, c))
        .collect();
    let h = |omega: &[f64]| -> f64 {
        c_top + top_terms.iter().map(|(a, c)| c * a.monomial(omega)).sum::<f64>()
    };
    let (mu, omega) = match n {
        1 => {
            let plus = h(&[1.0]);
            let minus = h(&[-1.0]);
            if plus <= minus {
                (plus, vec![1.0])
            } else {
                (minus, vec![-1.0])
            }
        }
        _ => {
            let mut best = f64::INFINITY;
            let mut arg = vec![1.0, 0.0];
            let k = 4096;
            for i in 0..k {
                let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                let w = vec![t.cos(), t.sin()];
                let v = h(&w);
                if v < best {
                    best = v;
                    arg = w;
                }
            }
            (best, arg)
        }
    };
    if mu > 1e-9 {
        TailOutcome::Dominated((low_mass / mu).max(1.0) * (1.0 + cfg.r_cut_slack))
    } else if mu < -1e-9 {
        TailOutcome::NegativeDirection(omega)
    } else {
        TailOutcome::Marginal
    }
}

enum EpsOutcome {
    Holds { margin: f64 },
    Fails { delta: f64, x: Vec<f64>, value: f64 },
}

/// Scale-free check of `exists delta: P + eps |x|^m >= 0 on |x| <= delta`:
/// scans the ratio `(P + eps |x|^m) / |x|^m` over dyadic annuli down to the
/// floating-point depth usable for order `m`, and accepts when the deepest
/// annuli clear the tolerance.
fn eps_condition(p: &Jet, m: usize, eps: f64, cfg: &GammaConfig) -> EpsOutcome {
    let n = p.dim();
    let poly = p.compile();
    let j_max = (23 / m).clamp(4, 23) as i32;
    let ratio_min = |j: i32| -> (f64, Vec<f64>) {
        let r_hi = (-j as f64).exp2();
        let mut best = f64::INFINITY;
        let mut arg = vec![0.0; n];
        let radii = [0.5, 0.625, 0.75, 0.875, 1.0];
        match n {
            1 => {
                for &s in &radii {
                    for sign in [-1.0, 1.0] {
                        let x = [sign * s * r_hi];
                        let rm = (s * r_hi).powi(m as i32);
                        let v = (poly.eval(&x) + eps * rm) / rm;
                        if v < best {
                            best = v;
                            arg = x.to_vec();
                        }
                    }
                }
            }
            _ => {
                let k = 512;
                for &s in &radii {
                    let r = s * r_hi;
                    let rm = r.powi(m as i32);
                    for i in 0..k {
                        let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                        let x = [r * t.cos(), r * t.sin()];
                        let v = (poly.eval(&x) + eps * rm) / rm;
                        if v < best {
                            best = v;
                            arg = x.to_vec();
                        }
                    }
                }
            }
        }
        (best, arg)
    };

    // Tail of the annulus scan decides; require the last three annuli.
    let tail_start = (j_max - 2).max(0);
    let mut tail_min = f64::INFINITY;
    let mut tail_arg = vec![0.0; n];
    for j in tail_start..=j_max {
        let (v, x) = ratio_min(j);
        if v < tail_min {
            tail_min = v;
            tail_arg = x;
        }
    }
    if tail_min >= -cfg.tol {
        EpsOutcome::Holds { margin: tail_min }
    } else {
        EpsOutcome::Fails {
            delta: (-tail_start as f64).exp2(),
            x: tail_arg.clone(),
            value: tail_min,
        }
    }
}

// ---------------------------------------------------------------------------
// Deterministic grid minimization over balls.

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Minimum of `g` over the closed ball of the given radius centered at the
/// origin: dense grid, then four zoom rounds around the best point
/// (projected back into the ball).
pub(crate) fn min_on_ball(
    g: impl Fn(&[f64]) -> f64,
    n: usize,
    radius: f64,
    per_axis: usize,
) -> (f64, Vec<f64>) {
    struct Best {
        value: f64,
        arg: Vec<f64>,
    }
    impl Best {
        fn consider(&mut self, x: &[f64], v: f64) {
            if v < self.value {
                self.value = v;
                self.arg = x.to_vec();
            }
        }
    }
    let mut best = Best {
        value: f64::INFINITY,
        arg: vec![0.0; n],
    };
    match n {
        1 => {
            for i in 0..per_axis {
                let t = [-radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64];
                best.consider(&t, g(&t));
            }
        }
        2 => {
            for i in 0..per_axis {
                let x0 = -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64;
                for j in 0..per_axis {
                    let x1 = -radius + 2.0 * radius * j as f64 / (per_axis - 1) as f64;
                    if x0 * x0 + x1 * x1 <= radius * radius {
                        let x = [x0, x1];
                        best.consider(&x, g(&x));
                    }
                }
            }
            // Boundary circle, where box grids are sparse.
            let k = 4 * per_axis;
            for i in 0..k {
                let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                let x = [radius * t.cos(), radius * t.sin()];
                best.consider(&x, g(&x));
            }
        }
        _ => unreachable!("dimension bounded by configuration"),
    }

    // Zoom refinement.
    let mut width = 2.0 * radius / (per_axis - 1) as f64;
    for _ in 0..4 {
        let center = best.arg.clone();
        let pts = 17;
        match n {
            1 => {
                for i in 0..pts {
                    let t = center[0] - width + 2.0 * width * i as f64 / (pts - 1) as f64;
                    let x = [t.clamp(-radius, radius)];
                    best.consider(&x, g(&x));
                }
            }
            2 => {
                for i in 0..pts {
                    for j in 0..pts {
                        let mut x = [
                            center[0] - width + 2.0 * width * i as f64 / (pts - 1) as f64,
                            center[1] - width + 2.0 * width * j as f64 / (pts - 1) as f64,
                        ];
                        let r = norm(&x);
                        if r > radius {
                            x[0] *= radius / r;
                            x[1] *= radius / r;
                        }
                        best.consider(&x, g(&x));
                    }
                }
            }
            _ => unreachable!(),
        }
        width /= 8.0;
    }
    (best.value, best.arg)
}

/// Grid over the closed ball (grid of the bounding box filtered to the
/// ball, plus the origin).
fn ball_grid(n: usize, radius: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; n]];
    match n {
        1 => {
            for i in 0..per_axis {
                let t = -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64;
                out.push(vec![t]);
            }
        }
        2 => {
            for i in 0..per_axis {
                let x0 = -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64;
                for j in 0..per_axis {
                    let x1 = -radius + 2.0 * radius * j as f64 / (per_axis - 1) as f64;
                    if x0 * x0 + x1 * x1 <= radius * radius {
                        out.push(vec![x0, x1]);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    out
}

fn tilde0_sample_radius(p: &Jet, m: usize, cfg: &GammaConfig) -> f64 {
    let n = p.dim();
    let low_mass: f64 = p.monomial_coeffs().iter().map(|c| c.abs()).sum();
    // Worst-case top mass of an admissible completion.
    let completion_mass: f64 = crate::multiindex::enumerate(n, m as u32)
        .iter()
        .filter(|a| a.order() as usize == m)
        .map(|a| 1.0 / a.factorial())
        .sum();
    if completion_mass < 1.0 - 1e-9 {
        (low_mass / (1.0 - completion_mass)).max(1.0) * (1.0 + cfg.r_cut_slack)
    } else {
        4.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn jet1(degree: usize, coeffs: &[f64]) -> Jet {
        Jet::from_coeffs(&[0.0], degree, coeffs.to_vec()).unwrap()
    }

    #[test]
    fn zero_jet_is_member() {
        let cfg = GammaConfig::default();
        let v = gamma0plus_member(&jet1(2, &[0.0, 0.0, 0.0]), &cfg).unwrap();
        assert!(v.is_member(), "{v:?}");
    }

    #[test]
    fn linear_jet_fails_global_nonnegativity() {
        // m = 2, P(x) = x: x + x^2 < 0 near x = -1/2.
        let cfg = GammaConfig::default();
        let v = gamma0plus_member(&jet1(2, &[0.0, 1.0, 0.0]), &cfg).unwrap();
        assert_eq!(v.status, MembershipStatus::NonMember);
        match v.witness.unwrap() {
            Witness::Point { x, value } => {
                assert_abs_diff_eq!(x[0], -0.5, epsilon = 1e-3);
                assert_abs_diff_eq!(value, -0.25, epsilon = 1e-6);
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn cubic_fails_eps_condition() {
        // m = 3, P(x) = x^3/6: globally fine (x^3/6 + |x|^3 >= 0), but for
        // eps < 1/6 and x < 0 the combination (eps - 1/6)|x|^3 is negative
        // on every ball around the origin.
        let cfg = GammaConfig::default();
        let v = gamma0plus_member(&jet1(3, &[0.0, 0.0, 0.0, 1.0]), &cfg).unwrap();
        assert_eq!(v.status, MembershipStatus::NonMember);
        assert!(matches!(v.witness, Some(Witness::EpsDelta { .. })), "{v:?}");
        // The unscaled cubic already violates the derivative box.
        let v = gamma0plus_member(&jet1(3, &[0.0, 0.0, 0.0, 6.0]), &cfg).unwrap();
        assert_eq!(v.status, MembershipStatus::NonMember);
    }

    #[test]
    fn deriv_bound_violation_detected() {
        let cfg = GammaConfig::default();
        let v = gamma0plus_member(&jet1(1, &[2.0, 0.0]), &cfg).unwrap();
        assert_eq!(v.status, MembershipStatus::NonMember);
        assert!(matches!(v.witness, Some(Witness::DerivBound { .. })));
    }

    #[test]
    fn bk_examples() {
        let cfg = GammaConfig::default();
        // P = x^2/2 >= 0: all b_k = 0.
        let b = bk_sequence(&jet1(2, &[0.0, 0.0, 1.0]), 10, &cfg);
        assert!(b.iter().all(|&v| v == 0.0));
        // P = 0.
        let b = bk_sequence(&jet1(2, &[0.0, 0.0, 0.0]), 5, &cfg);
        assert!(b.iter().all(|&v| v == 0.0));
        // Degree-2 jet of 1 - cos(x + 0.1): the truncation dips below zero
        // near the minimum (exact dip (1 - cos s)^2 / (2 cos s)), then the
        // balls shrink inside the positivity radius and the corrections
        // vanish.
        let s = 0.1f64;
        let p = jet1(2, &[1.0 - s.cos(), s.sin(), s.cos()]);
        let b = bk_sequence(&p, 20, &cfg);
        let dip = (1.0 - s.cos()).powi(2) / (2.0 * s.cos());
        assert_abs_diff_eq!(b[0], dip, epsilon = 1e-9);
        assert_eq!(*b.last().unwrap(), 0.0);
        for k in 1..b.len() {
            assert!(b[k] <= b[k - 1] + 1e-15);
        }
    }

    #[test]
    fn tilde0_constant_cases() {
        // m = 1: constants c are members iff 0 <= c <= 1.
        let cfg = GammaConfig::default();
        for (c, want) in [
            (0.0, MembershipStatus::Member),
            (0.5, MembershipStatus::Member),
            (1.0, MembershipStatus::Member),
            (2.0, MembershipStatus::NonMember),
            (-0.5, MembershipStatus::NonMember),
        ] {
            let v = gamma_tilde0_member(&jet1(0, &[c]), &cfg).unwrap();
            assert_eq!(v.status, want, "c = {c}: {v:?}");
        }
    }

    #[test]
    fn tilde0_linear_nonmember() {
        // m = 2, P(x) = x: no t makes x + t x^2 + x^2 >= 0 near 0- while
        // respecting |2t| <= 1.
        let cfg = GammaConfig::default();
        let v = gamma_tilde0_member(&jet1(1, &[0.0, 1.0]), &cfg).unwrap();
        assert_eq!(v.status, MembershipStatus::NonMember);
    }

    #[test]
    fn tilde0_returns_usable_completion() {
        let cfg = GammaConfig::default();
        let p = jet1(1, &[0.3, 0.4]);
        match gamma_tilde0_completion(&p, &cfg).unwrap() {
            CompletionOutcome::Member { completion, .. } => {
                assert_eq!(completion.degree(), 2);
                assert_eq!(completion.project(), p);
                assert!(gamma0plus_member(&completion, &cfg).unwrap().is_member());
            }
            other => panic!(
                "expected membership, got {:?}",
                match other {
                    CompletionOutcome::NonMember(v) | CompletionOutcome::Undetermined(v) => v,
                    _ => unreachable!(),
                }
            ),
        }
    }

    #[test]
    fn prime_constant_cases() {
        let cfg = GammaConfig::default();
        // m = 1 constants: membership iff 0 <= c <= M.
        let ok = gamma_prime_member(&jet1(0, &[0.5]), &[0.0], 1.0, None, &cfg).unwrap();
        assert!(ok.is_member());
        let too_big = gamma_prime_member(&jet1(0, &[2.0]), &[0.0], 1.0, None, &cfg).unwrap();
        assert_eq!(too_big.status, MembershipStatus::NonMember);
        let zero =
            gamma_prime_member(&jet1(0, &[0.0]), &[3.0], 7.0, Some(0.0), &cfg).unwrap();
        assert!(zero.is_member());
        // Slice mismatch is an input error.
        assert!(matches!(
            gamma_prime_member(&jet1(0, &[0.5]), &[0.0], 1.0, Some(0.4), &cfg),
            Err(GammaError::SliceMismatch(..))
        ));
    }

    #[test]
    fn prime_detects_negative_dip() {
        // m = 2, P(y) = -3/4 + (y - x): at level 1 the dip of
        // P(y) + |y - x|^2 stays above -1 only if ... compute: minimum of
        // c + t + t^2 at t = -1/2 is c - 1/4; with c = -3/4 the min is -1.
        // Wait: membership needs P0 + |z|^2 >= 0, i.e. c + z + z^2 >= 0;
        // min = c - 1/4 < 0 for c < 1/4. Use c = 0: min -1/4 < 0.
        let cfg = GammaConfig::default();
        let p = Jet::from_coeffs(&[2.0], 1, vec![0.0, 1.0]).unwrap();
        let v = gamma_prime_member(&p, &[2.0], 1.0, None, &cfg).unwrap();
        assert_eq!(v.status, MembershipStatus::NonMember);
        match v.witness.unwrap() {
            Witness::Point { x, .. } => assert_abs_diff_eq!(x[0], 1.5, epsilon = 1e-3),
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn prime_monotone_in_level() {
        let cfg = GammaConfig::default();
        let p = jet1(1, &[0.4, -0.9]);
        let at = |level: f64| {
            gamma_prime_member(&p, &[0.0], level, None, &cfg)
                .unwrap()
                .is_member()
        };
        assert!(at(1.0));
        assert!(at(2.0));
        assert!(at(10.0));
    }
}
