//! Whitney fields: one jet per point of a finite set, together with the
//! homogeneous compatibility seminorm that measures how close the family is
//! to being the Taylor data of a single smooth function.

use crate::jets::Jet;
use crate::multiindex::MultiIndex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WhitneyError {
    #[error("point {0} repeated in the set")]
    DuplicatePoint(usize),
    #[error("jet {index} is based at {jet_base:?}, not at its point {point:?}")]
    BaseMismatch {
        index: usize,
        jet_base: Vec<f64>,
        point: Vec<f64>,
    },
    #[error("jet {0} has dimension/degree ({1}, {2}), expected ({3}, {4})")]
    ShapeMismatch(usize, usize, usize, usize, usize),
    #[error("points and jets have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// A finite family of jets, one per (distinct) point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WhitneyField {
    points: Vec<Vec<f64>>,
    jets: Vec<Jet>,
}

impl WhitneyField {
    pub fn new(points: Vec<Vec<f64>>, jets: Vec<Jet>) -> Result<Self, WhitneyError> {
        if points.len() != jets.len() {
            return Err(WhitneyError::LengthMismatch(points.len(), jets.len()));
        }
        for i in 0..points.len() {
            if jets[i].base() != points[i].as_slice() {
                return Err(WhitneyError::BaseMismatch {
                    index: i,
                    jet_base: jets[i].base().to_vec(),
                    point: points[i].clone(),
                });
            }
            if i > 0
                && (jets[i].dim() != jets[0].dim() || jets[i].degree() != jets[0].degree())
            {
                return Err(WhitneyError::ShapeMismatch(
                    i,
                    jets[i].dim(),
                    jets[i].degree(),
                    jets[0].dim(),
                    jets[0].degree(),
                ));
            }
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(WhitneyError::DuplicatePoint(i));
                }
            }
        }
        Ok(WhitneyField { points, jets })
    }

    pub fn empty() -> Self {
        WhitneyField {
            points: Vec::new(),
            jets: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn jets(&self) -> &[Jet] {
        &self.jets
    }

    pub fn jet_at(&self, point: &[f64]) -> Option<&Jet> {
        self.points
            .iter()
            .position(|p| p.as_slice() == point)
            .map(|i| &self.jets[i])
    }

    /// Restricts the field to the points satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(&[f64]) -> bool) -> WhitneyField {
        let mut points = Vec::new();
        let mut jets = Vec::new();
        for (p, j) in self.points.iter().zip(&self.jets) {
            if keep(p) {
                points.push(p.clone());
                jets.push(j.clone());
            }
        }
        WhitneyField { points, jets }
    }
}

/// The worst pair in a compatibility scan.
#[derive(Clone, Debug, PartialEq)]
pub struct SeminormWitness {
    /// Index of the evaluation point `x`.
    pub at: usize,
    /// Index of the other point `y`.
    pub other: usize,
    pub beta: MultiIndex,
    pub quotient: f64,
}

/// Homogeneous compatibility seminorm of a Whitney field for smoothness
/// order `m`:
///
/// ```text
///     max over x != y, |b| <= m of  |d^b (P^x - P^y)(x)| / |x - y|^{m-|b|}
/// ```
///
/// The max ranges over ordered pairs both ways. Order-`m` derivatives of the
/// degree-`(m-1)` difference vanish identically, so only `|b| <= m - 1` is
/// evaluated; the omitted terms are exactly zero. A field over a single
/// point (or none) has seminorm zero.
pub fn seminorm(field: &WhitneyField, m: usize) -> f64 {
    seminorm_with_witness(field, m)
        .map(|w| w.quotient)
        .unwrap_or(0.0)
}

/// Seminorm together with the maximizing `(x, y, b)` triple. Ties are broken
/// by scan order (point index, then other index, then graded-lex `b`), so
/// the witness is reproducible.
pub fn seminorm_with_witness(field: &WhitneyField, m: usize) -> Option<SeminormWitness> {
    if field.len() < 2 {
        return None;
    }
    let mut best: Option<SeminormWitness> = None;
    for (i, x) in field.points.iter().enumerate() {
        for (j, y) in field.points.iter().enumerate() {
            if i == j {
                continue;
            }
            let dist = euclid(x, y);
            let diff = field.jets[i]
                .sub(&field.jets[j].rebase(x))
                .expect("rebased jets share base");
            for beta in diff.indices() {
                let order = beta.order() as usize;
                if order > m {
                    continue;
                }
                let quotient = diff.coeff(&beta).abs() / dist.powi((m - order) as i32);
                if best.as_ref().map_or(true, |b| quotient > b.quotient) {
                    best = Some(SeminormWitness {
                        at: i,
                        other: j,
                        beta: beta.clone(),
                        quotient,
                    });
                }
            }
        }
    }
    best
}

/// Verdict of the pairwise Taylor-compatibility test at level `M`.
#[derive(Clone, Debug)]
pub struct CompatVerdict {
    pub ok: bool,
    pub seminorm: f64,
    pub witness: Option<SeminormWitness>,
}

/// Checks `seminorm(field) <= M` and reports the worst triple.
pub fn taylor_compat_check(field: &WhitneyField, m: usize, level: f64) -> CompatVerdict {
    assert!(level > 0.0, "compatibility level must be positive");
    let witness = seminorm_with_witness(field, m);
    let value = witness.as_ref().map(|w| w.quotient).unwrap_or(0.0);
    CompatVerdict {
        ok: value <= level,
        seminorm: value,
        witness,
    }
}

pub(crate) fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}
