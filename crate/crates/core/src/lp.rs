//! Dense two-phase simplex over free variables.
//!
//! Small, self-contained, and deterministic: Bland's rule everywhere, rows
//! processed in input order. Two scalar backends share the implementation:
//! plain `f64` (with a relative pivot tolerance) and exact big rationals,
//! used for small systems where bit-for-bit reproducibility and exact
//! degeneracy handling matter more than speed.
//!
//! Problems are stated over free variables with `=` and `>=` rows and an
//! optional linear objective to maximize. Internally variables are split
//! into nonnegative pairs, surplus columns are added for `>=` rows, and
//! artificial columns complete an identity basis for phase one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("row {0} has {1} coefficients, expected {2}")]
    RowShape(usize, usize, usize),
    #[error("non-finite coefficient in row {0}")]
    NonFinite(usize),
    #[error("pivot limit exceeded ({0} pivots)")]
    PivotLimit(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowRelation {
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub relation: RowRelation,
    pub rhs: f64,
}

impl LpRow {
    pub fn eq(coeffs: Vec<f64>, rhs: f64) -> Self {
        LpRow {
            coeffs,
            relation: RowRelation::Eq,
            rhs,
        }
    }

    pub fn ge(coeffs: Vec<f64>, rhs: f64) -> Self {
        LpRow {
            coeffs,
            relation: RowRelation::Ge,
            rhs,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub rows: Vec<LpRow>,
    /// Maximize `objective . x`; all-zero means pure feasibility.
    pub objective: Vec<f64>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Float,
    Exact,
    /// Exact for small tableaus, float otherwise.
    Auto,
}

const EXACT_CELL_LIMIT: usize = 1600;
const PIVOT_LIMIT: usize = 200_000;

pub fn solve(lp: &LinearProgram, backend: Backend) -> Result<LpOutcome, LpError> {
    validate(lp)?;
    let cells = (lp.rows.len() + 1) * (2 * lp.num_vars + lp.rows.len() + 1);
    let exact = match backend {
        Backend::Float => false,
        Backend::Exact => true,
        Backend::Auto => cells <= EXACT_CELL_LIMIT,
    };
    if exact {
        simplex::<Rational>(lp)
    } else {
        simplex::<f64>(lp)
    }
}

/// Greedy deletion filter: a subset of row indices that is still infeasible
/// and minimal under single-row deletion. The input must be infeasible.
pub fn infeasibility_certificate(lp: &LinearProgram, backend: Backend) -> Result<Vec<usize>, LpError> {
    let mut keep: Vec<usize> = (0..lp.rows.len()).collect();
    let mut i = 0;
    while i < keep.len() {
        let mut trial = keep.clone();
        trial.remove(i);
        let sub = LinearProgram {
            num_vars: lp.num_vars,
            rows: trial.iter().map(|&r| lp.rows[r].clone()).collect(),
            objective: vec![0.0; lp.num_vars],
        };
        match solve(&sub, backend)? {
            LpOutcome::Infeasible => {
                keep = trial;
            }
            _ => {
                i += 1;
            }
        }
    }
    Ok(keep)
}

fn validate(lp: &LinearProgram) -> Result<(), LpError> {
    for (i, row) in lp.rows.iter().enumerate() {
        if row.coeffs.len() != lp.num_vars {
            return Err(LpError::RowShape(i, row.coeffs.len(), lp.num_vars));
        }
        if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite(i));
        }
    }
    Ok(())
}

/// Scalar abstraction shared by the float and exact backends.
trait Pivot: Clone {
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn zero() -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn lt(&self, o: &Self) -> bool;
}

impl Pivot for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn zero() -> Self {
        0.0
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_pos(&self) -> bool {
        *self > 1e-9
    }
    fn is_neg(&self) -> bool {
        *self < -1e-9
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

type Rational = BigRational;

impl Pivot for Rational {
    fn from_f64(x: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(x).expect("finite")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn zero() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

struct Tableau<S> {
    /// rows x (cols + 1); last column is the rhs.
    a: Vec<Vec<S>>,
    basis: Vec<usize>,
    cols: usize,
    artificial_start: usize,
}

fn simplex<S: Pivot>(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    let m = lp.rows.len();
    let n_split = 2 * lp.num_vars;
    let n_surplus = lp
        .rows
        .iter()
        .filter(|r| r.relation == RowRelation::Ge)
        .count();
    // A `>=` row with nonpositive right-hand side flips into a `<=` row
    // whose slack can start basic; only the remaining rows need an
    // artificial column.
    let needs_artificial: Vec<bool> = lp
        .rows
        .iter()
        .map(|r| r.relation == RowRelation::Eq || r.rhs > 0.0)
        .collect();
    let n_artificial = needs_artificial.iter().filter(|&&b| b).count();
    let cols = n_split + n_surplus + n_artificial;
    let artificial_start = n_split + n_surplus;

    let mut a: Vec<Vec<S>> = Vec::with_capacity(m);
    let mut basis = vec![0usize; m];
    let mut surplus_idx = 0;
    let mut artificial_idx = 0;
    for (i, row) in lp.rows.iter().enumerate() {
        // Scale for float conditioning; harmless under exact arithmetic.
        let scale = row
            .coeffs
            .iter()
            .fold(row.rhs.abs(), |acc, c| acc.max(c.abs()))
            .max(1e-30);
        let flip = if row.rhs > 0.0 || (row.rhs == 0.0 && row.relation == RowRelation::Eq) {
            1.0
        } else {
            -1.0
        };
        let mut r: Vec<S> = vec![S::zero(); cols + 1];
        for (j, &c) in row.coeffs.iter().enumerate() {
            let v = flip * c / scale;
            r[2 * j] = S::from_f64(v);
            r[2 * j + 1] = S::from_f64(-v);
        }
        if row.relation == RowRelation::Ge {
            r[n_split + surplus_idx] = S::from_f64(-flip);
            surplus_idx += 1;
        }
        r[cols] = S::from_f64(flip * row.rhs / scale);
        if needs_artificial[i] {
            r[artificial_start + artificial_idx] = S::from_f64(1.0);
            basis[i] = artificial_start + artificial_idx;
            artificial_idx += 1;
        } else {
            // flipped `>=` row: the surplus flipped to a slack (+1)
            basis[i] = n_split + surplus_idx - 1;
        }
        a.push(r);
    }

    let mut t = Tableau {
        a,
        basis,
        cols,
        artificial_start,
    };

    // Phase 1: minimize the sum of artificials (skipped when none exist).
    if n_artificial > 0 {
        let mut phase1_cost: Vec<S> = vec![S::zero(); cols + 1];
        for j in artificial_start..cols {
            phase1_cost[j] = S::from_f64(1.0);
        }
        let (feasible_value, _) = optimize(&mut t, &phase1_cost, true)?;
        if feasible_value.to_f64() > 1e-7 {
            return Ok(LpOutcome::Infeasible);
        }
        drive_out_artificials(&mut t);
    }

    // Phase 2: minimize -objective over the original columns.
    let mut cost: Vec<S> = vec![S::zero(); cols + 1];
    let mut has_objective = false;
    for (j, &c) in lp.objective.iter().enumerate() {
        if c != 0.0 {
            has_objective = true;
        }
        cost[2 * j] = S::from_f64(-c);
        cost[2 * j + 1] = S::from_f64(c);
    }
    if has_objective {
        let (_, bounded) = optimize(&mut t, &cost, false)?;
        if !bounded {
            return Ok(LpOutcome::Unbounded);
        }
    }

    // Read off the solution.
    let mut x = vec![0.0; lp.num_vars];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < 2 * lp.num_vars {
            let v = t.a[i][t.cols].to_f64();
            if b % 2 == 0 {
                x[b / 2] += v;
            } else {
                x[b / 2] -= v;
            }
        }
    }
    let objective = lp
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c * v)
        .sum::<f64>();
    Ok(LpOutcome::Optimal { x, objective })
}

/// Minimizes `cost . columns` with Bland's rule. Returns the final value
/// and whether the problem was bounded. Artificial columns may not enter
/// when `allow_artificials` is false.
fn optimize<S: Pivot>(
    t: &mut Tableau<S>,
    cost: &[S],
    allow_artificials: bool,
) -> Result<(S, bool), LpError> {
    // Reduced costs: z_j = cost_j - cost_B . B^{-1} A_j, maintained as an
    // explicit objective row reduced against the current basis.
    let cols = t.cols;
    let mut z: Vec<S> = cost.to_vec();
    for (i, &b) in t.basis.iter().enumerate() {
        let cb = cost[b].clone();
        if cb.is_pos() || cb.is_neg() {
            for j in 0..=cols {
                z[j] = z[j].sub(&cb.mul(&t.a[i][j]));
            }
        }
    }

    let mut pivots = 0usize;
    let mut stalled = 0usize; // degenerate pivots since the last real step
    loop {
        let limit = if allow_artificials {
            cols
        } else {
            t.artificial_start
        };
        // Dantzig pricing normally; Bland's rule after a degeneracy stall,
        // which guarantees termination.
        let bland = stalled > 64;
        let mut enter: Option<usize> = None;
        for j in 0..limit {
            if z[j].is_neg() {
                if bland {
                    enter = Some(j);
                    break;
                }
                match enter {
                    None => enter = Some(j),
                    Some(e) => {
                        if z[j].lt(&z[e]) {
                            enter = Some(j);
                        }
                    }
                }
            }
        }
        let Some(enter) = enter else {
            let value = S::zero().sub(&z[cols]);
            return Ok((value, true));
        };

        // Ratio test with Bland tie-breaking on the basic variable index.
        let mut leave: Option<usize> = None;
        let mut best: Option<S> = None;
        for i in 0..t.a.len() {
            if t.a[i][enter].is_pos() {
                let ratio = t.a[i][cols].div(&t.a[i][enter]);
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio.lt(b)
                            || (!b.lt(&ratio) && t.basis[i] < t.basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return Ok((S::zero(), false));
        };
        if best.map(|b| b.is_pos()).unwrap_or(false) {
            stalled = 0;
        } else {
            stalled += 1;
        }

        pivot(t, leave, enter, &mut z);
        pivots += 1;
        if pivots > PIVOT_LIMIT {
            return Err(LpError::PivotLimit(pivots));
        }
    }
}

fn pivot<S: Pivot>(t: &mut Tableau<S>, row: usize, col: usize, z: &mut [S]) {
    let cols = t.cols;
    let p = t.a[row][col].clone();
    for j in 0..=cols {
        t.a[row][j] = t.a[row][j].div(&p);
    }
    for i in 0..t.a.len() {
        if i == row {
            continue;
        }
        let f = t.a[i][col].clone();
        if f.is_pos() || f.is_neg() {
            for j in 0..=cols {
                t.a[i][j] = t.a[i][j].sub(&f.mul(&t.a[row][j]));
            }
        }
    }
    let f = z[col].clone();
    if f.is_pos() || f.is_neg() {
        for j in 0..=cols {
            z[j] = z[j].sub(&f.mul(&t.a[row][j]));
        }
    }
    t.basis[row] = col;
}

/// Pivots basic artificials (at zero level after phase 1) onto structural
/// columns where possible.
fn drive_out_artificials<S: Pivot>(t: &mut Tableau<S>) {
    for i in 0..t.a.len() {
        if t.basis[i] >= t.artificial_start {
            if let Some(col) = (0..t.artificial_start)
                .find(|&j| t.a[i][j].is_pos() || t.a[i][j].is_neg())
            {
                let mut dummy = vec![S::zero(); t.cols + 1];
                pivot(t, i, col, &mut dummy);
            }
        }
    }
}
