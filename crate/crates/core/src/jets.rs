//! Polynomial jets: truncated Taylor data of a smooth function at a point.
//!
//! A jet of degree bound `d` at base point `x` stores the derivative values
//! `c_a = d^a P(x)` for all multi-indices `|a| <= d`, in graded lexicographic
//! order. The polynomial it denotes is
//!
//! ```text
//!     P(y) = sum_{|a| <= d} c_a / a! * (y - x)^a .
//! ```
//!
//! Storing derivative values (rather than monomial coefficients) keeps every
//! formula in the construction — compatibility bounds, derivative boxes,
//! truncated products — a direct read of the coefficient vector. Monomial
//! coefficients are derived on demand by dividing by `a!`.
//!
//! For a smoothness order `m`, the crate works with two degree bounds:
//! `m - 1` (the jets propagated by the interpolation machinery) and `m`
//! (the enlarged jets used when completing to a full Taylor polynomial).
//! Both are represented by [`Jet`], distinguished by [`Jet::degree`].

use crate::multiindex::{self, MultiIndex};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JetError {
    #[error("jets have different base points: {0:?} vs {1:?}")]
    BaseMismatch(Vec<f64>, Vec<f64>),
    #[error("jets have different dimensions: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("jets have different degree bounds: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("non-finite coefficient at {0:?}")]
    NonFinite(MultiIndex),
    #[error("coefficient table is not total over the index range: expected {expected}, got {got}")]
    IncompleteTable { expected: usize, got: usize },
}

/// Truncated Taylor polynomial stored as derivative values at a base point.
#[derive(Clone, PartialEq)]
pub struct Jet {
    base: Vec<f64>,
    degree: usize,
    /// `coeffs[i] = d^{a_i} P(base)` for the graded-lex index list.
    coeffs: Vec<f64>,
}

impl Jet {
    /// Zero jet of the given dimension and degree bound.
    pub fn zero(dim: usize, degree: usize, base: &[f64]) -> Self {
        assert_eq!(base.len(), dim);
        Jet {
            base: base.to_vec(),
            degree,
            coeffs: vec![0.0; multiindex::count(dim, degree as u32)],
        }
    }

    /// Constant jet.
    pub fn constant(dim: usize, degree: usize, base: &[f64], value: f64) -> Self {
        let mut jet = Self::zero(dim, degree, base);
        jet.coeffs[0] = value;
        jet
    }

    /// Builds a jet from a derivative-value table in graded-lex order.
    pub fn from_coeffs(base: &[f64], degree: usize, coeffs: Vec<f64>) -> Result<Self, JetError> {
        let expected = multiindex::count(base.len(), degree as u32);
        if coeffs.len() != expected {
            return Err(JetError::IncompleteTable {
                expected,
                got: coeffs.len(),
            });
        }
        let jet = Jet {
            base: base.to_vec(),
            degree,
            coeffs,
        };
        if let Some(i) = jet.coeffs.iter().position(|c| !c.is_finite()) {
            return Err(JetError::NonFinite(jet.indices()[i].clone()));
        }
        Ok(jet)
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Graded-lex index list matching [`Jet::coeffs`].
    pub fn indices(&self) -> &'static [MultiIndex] {
        multiindex::enumerate(self.dim(), self.degree as u32)
    }

    /// Derivative value `d^a P(base)`; zero when `|a|` exceeds the bound.
    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        if alpha.order() as usize > self.degree {
            return 0.0;
        }
        let idx = self
            .indices()
            .iter()
            .position(|a| a == alpha)
            .expect("index in range");
        self.coeffs[idx]
    }

    pub fn set_coeff(&mut self, alpha: &MultiIndex, value: f64) {
        let idx = self
            .indices()
            .iter()
            .position(|a| a == alpha)
            .expect("index in range");
        self.coeffs[idx] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Evaluates `P(y)`.
    pub fn eval(&self, y: &[f64]) -> f64 {
        self.deriv_at(&MultiIndex::zero(self.dim()), y)
    }

    /// Evaluates `d^b P(y)` exactly (the derivative of a polynomial is a
    /// polynomial; re-expansion introduces no truncation).
    pub fn deriv_at(&self, beta: &MultiIndex, y: &[f64]) -> f64 {
        let shift: Vec<f64> = y.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        let mut acc = 0.0;
        for (alpha, &c) in self.indices().iter().zip(&self.coeffs) {
            if !beta.leq(alpha) {
                continue;
            }
            let gamma = alpha.sub(beta);
            acc += c / gamma.factorial() * gamma.monomial(&shift);
        }
        acc
    }

    /// Re-expresses the polynomial as a jet based at `y`. Exact.
    pub fn rebase(&self, y: &[f64]) -> Jet {
        let coeffs = self
            .indices()
            .iter()
            .map(|beta| self.deriv_at(beta, y))
            .collect();
        Jet {
            base: y.to_vec(),
            degree: self.degree,
            coeffs,
        }
    }

    /// Drops the top-order entries, lowering the degree bound by one.
    pub fn project(&self) -> Jet {
        assert!(self.degree >= 1, "cannot project a degree-0 jet");
        let keep = multiindex::count(self.dim(), self.degree as u32 - 1);
        Jet {
            base: self.base.clone(),
            degree: self.degree - 1,
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    /// Zero-extends to a higher degree bound.
    pub fn embed(&self, degree: usize) -> Jet {
        assert!(degree >= self.degree);
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(multiindex::count(self.dim(), degree as u32), 0.0);
        Jet {
            base: self.base.clone(),
            degree,
            coeffs,
        }
    }

    pub fn scale(&self, t: f64) -> Jet {
        Jet {
            base: self.base.clone(),
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * t).collect(),
        }
    }

    pub fn add(&self, other: &Jet) -> Result<Jet, JetError> {
        check_compatible(self, other)?;
        Ok(Jet {
            base: self.base.clone(),
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.add(&other.scale(-1.0))
    }

    /// Monomial coefficients `c_a / a!` in the `(y - base)` basis.
    pub fn monomial_coeffs(&self) -> Vec<f64> {
        self.indices()
            .iter()
            .zip(&self.coeffs)
            .map(|(a, &c)| c / a.factorial())
            .collect()
    }

    /// Precomputes the monomial form for repeated evaluation (grid scans).
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            base: self.base.clone(),
            terms: self
                .indices()
                .into_iter()
                .zip(self.monomial_coeffs())
                .filter(|(_, c)| *c != 0.0)
                .map(|(a, c)| (a.0.clone(), c))
                .collect(),
        }
    }
}

/// Monomial form of a jet, cheap to evaluate in tight loops.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    base: Vec<f64>,
    terms: Vec<(Vec<u32>, f64)>,
}

impl CompiledPoly {
    pub fn eval(&self, y: &[f64]) -> f64 {
        let mut shift = [0.0f64; 4];
        for (i, (a, b)) in y.iter().zip(&self.base).enumerate() {
            shift[i] = a - b;
        }
        let mut acc = 0.0;
        for (exps, c) in &self.terms {
            let mut term = *c;
            for (axis, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    term *= shift[axis];
                }
            }
            acc += term;
        }
        acc
    }
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Jet(base={:?}, deg<={}, c={:?})",
            self.base, self.degree, self.coeffs
        )
    }
}

fn check_compatible(p: &Jet, q: &Jet) -> Result<(), JetError> {
    if p.dim() != q.dim() {
        return Err(JetError::DimMismatch(p.dim(), q.dim()));
    }
    if p.base != q.base {
        return Err(JetError::BaseMismatch(p.base.clone(), q.base.clone()));
    }
    if p.degree != q.degree {
        return Err(JetError::DegreeMismatch(p.degree, q.degree));
    }
    Ok(())
}

/// Truncated product of two jets at their shared base point: the full
/// polynomial product with every term of order above the degree bound
/// discarded. Computed by the Leibniz rule on derivative values, so no
/// intermediate expansion is needed:
///
/// ```text
///     d^g (PQ)(x) = sum_{b <= g} C(g, b) d^b P(x) d^{g-b} Q(x) .
/// ```
pub fn jet_multiply(p: &Jet, q: &Jet) -> Result<Jet, JetError> {
    check_compatible(p, q)?;
    let indices = p.indices();
    let mut coeffs = vec![0.0; indices.len()];
    for (gi, gamma) in indices.iter().enumerate() {
        let mut acc = 0.0;
        for (bi, beta) in indices.iter().enumerate() {
            if !beta.leq(gamma) {
                continue;
            }
            let rest = gamma.sub(beta);
            acc += gamma.binomial(beta) * p.coeffs[bi] * q.coeff(&rest);
        }
        coeffs[gi] = acc;
    }
    Ok(Jet {
        base: p.base.clone(),
        degree: p.degree,
        coeffs,
    })
}

/// Serialized form: explicit `(alpha, value)` pairs, total over the range.
#[derive(Serialize, Deserialize)]
struct JetRepr {
    base: Vec<f64>,
    /// Degree bound of the stored polynomial.
    m: usize,
    n: usize,
    derivs: Vec<DerivEntry>,
}

#[derive(Serialize, Deserialize)]
struct DerivEntry {
    alpha: Vec<u32>,
    value: f64,
}

impl Serialize for Jet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let derivs = self
            .indices()
            .iter()
            .zip(&self.coeffs)
            .map(|(a, &value)| DerivEntry {
                alpha: a.0.clone(),
                value,
            })
            .collect();
        JetRepr {
            base: self.base.clone(),
            m: self.degree,
            n: self.dim(),
            derivs,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Jet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = JetRepr::deserialize(d)?;
        if repr.base.len() != repr.n {
            return Err(D::Error::custom(format!(
                "base point has {} coordinates but n = {}",
                repr.base.len(),
                repr.n
            )));
        }
        let mut jet = Jet::zero(repr.n, repr.m, &repr.base);
        let indices = jet.indices();
        let mut seen = vec![false; indices.len()];
        for entry in &repr.derivs {
            let alpha = MultiIndex(entry.alpha.clone());
            let pos = indices
                .iter()
                .position(|a| *a == alpha)
                .ok_or_else(|| D::Error::custom(format!("index {alpha:?} out of range")))?;
            jet.coeffs[pos] = entry.value;
            seen[pos] = true;
        }
        if let Some(miss) = seen.iter().position(|&s| !s) {
            return Err(D::Error::custom(format!(
                "derivative table is missing {:?}",
                indices[miss]
            )));
        }
        if !jet.coeffs.iter().all(|c| c.is_finite()) {
            return Err(D::Error::custom("non-finite coefficient"));
        }
        Ok(jet)
    }
}
