//! Multi-indices for multivariate derivatives and monomials.
//!
//! A multi-index is a tuple of nonnegative exponents, one per coordinate.
//! Enumeration is graded lexicographic (by total order, then lexicographic
//! on the exponent tuple), which fixes the layout of every coefficient
//! vector in the crate.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Exponent tuple `(a_1, ..., a_n)` with total order `|a| = a_1 + ... + a_n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// Unit index `e_axis`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total order `|a|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise `self <= other`.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference; caller must ensure `other.leq(self)`.
    pub fn sub(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `a! = a_1! a_2! ... a_n!` as a float (exact for the small orders used here).
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// Multivariate binomial `C(self, sub) = prod_i C(self_i, sub_i)`.
    pub fn binomial(&self, sub: &MultiIndex) -> f64 {
        self.0
            .iter()
            .zip(&sub.0)
            .map(|(&a, &b)| binomial(a, b))
            .product()
    }

    /// `prod_i v_i^{a_i}`.
    pub fn monomial(&self, v: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(v)
            .map(|(&a, &x)| x.powi(a as i32))
            .product()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{:?}", self.0)
    }
}

pub fn factorial(k: u32) -> f64 {
    (1..=k as u64).map(|i| i as f64).product()
}

pub fn binomial(a: u32, b: u32) -> f64 {
    if b > a {
        return 0.0;
    }
    // Exact in f64 for the small arguments used throughout.
    let mut num = 1.0;
    for i in 0..b {
        num = num * (a - i) as f64 / (i + 1) as f64;
    }
    num.round()
}

/// All multi-indices of dimension `dim` with `|a| <= max_order`, graded
/// lexicographic: ascending total order, then ascending lexicographic.
/// Cached: the returned slice is interned for the lifetime of the process
/// (the index layouts are tiny and live in every hot loop).
pub fn enumerate(dim: usize, max_order: u32) -> &'static [MultiIndex] {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), &'static [MultiIndex]>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    if let Some(slice) = map.get(&(dim, max_order)) {
        return slice;
    }
    let mut out = Vec::new();
    for order in 0..=max_order {
        let mut level = Vec::new();
        compositions(dim, order, &mut Vec::new(), &mut level);
        level.sort();
        out.extend(level);
    }
    let slice: &'static [MultiIndex] = Box::leak(out.into_boxed_slice());
    map.insert((dim, max_order), slice);
    slice
}

fn compositions(dim: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if dim == 1 {
        let mut idx = prefix.clone();
        idx.push(total);
        out.push(MultiIndex(idx));
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(dim - 1, total - first, prefix, out);
        prefix.pop();
    }
}

/// Number of multi-indices with `|a| <= max_order` in `dim` variables,
/// i.e. `C(max_order + dim, dim)`.
pub fn count(dim: usize, max_order: u32) -> usize {
    binomial(max_order + dim as u32, dim as u32) as usize
}
