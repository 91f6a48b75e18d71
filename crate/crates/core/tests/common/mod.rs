//! Shared test oracles, independent of the implementation paths they check.

use nninterp::jets::Jet;
use nninterp::multiindex::enumerate;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use rand::Rng;
use std::collections::BTreeMap;

type Q = BigRational;

fn q(x: f64) -> Q {
    BigRational::from_f64(x).expect("finite")
}

fn factorial_q(k: u32) -> Q {
    let mut acc = BigRational::from_integer(BigInt::from(1));
    for i in 1..=k {
        acc *= BigRational::from_integer(BigInt::from(i));
    }
    acc
}

fn multi_factorial_q(alpha: &[u32]) -> Q {
    alpha.iter().map(|&a| factorial_q(a)).product()
}

/// Exact multiply-then-truncate on monomial coefficient maps over big
/// rationals. No Leibniz rule, no floating point, no shared code with the
/// implementation path.
pub fn oracle_multiply(p: &Jet, r: &Jet) -> Vec<f64> {
    let degree = p.degree() as u32;
    let indices = enumerate(p.dim(), degree);
    let to_monomials = |jet: &Jet| -> BTreeMap<Vec<u32>, Q> {
        indices
            .iter()
            .zip(jet.coeffs())
            .map(|(a, &c)| (a.0.clone(), q(c) / multi_factorial_q(&a.0)))
            .collect()
    };
    let pm = to_monomials(p);
    let rm = to_monomials(r);
    let mut product: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
    for (ea, ca) in &pm {
        for (eb, cb) in &rm {
            let total: u32 = ea.iter().sum::<u32>() + eb.iter().sum::<u32>();
            if total > degree {
                continue;
            }
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let entry = product.entry(e).or_insert_with(Q::zero);
            *entry += ca * cb;
        }
    }
    indices
        .iter()
        .map(|a| {
            product
                .get(&a.0)
                .map(|c| (c * multi_factorial_q(&a.0)).to_f64().unwrap())
                .unwrap_or(0.0)
        })
        .collect()
}

pub fn random_jet(rng: &mut impl Rng, dim: usize, degree: usize, base: &[f64]) -> Jet {
    let count = nninterp::multiindex::count(dim, degree as u32);
    let coeffs = (0..count).map(|_| rng.gen_range(-3.0..3.0)).collect();
    Jet::from_coeffs(base, degree, coeffs).unwrap()
}

/// Central finite difference with one Richardson step: cancels the O(h)
/// error a symmetric stencil picks up from the Lipschitz kink of
/// `|y - x|^m` (odd `m`) while keeping O(h^2) accuracy on smooth parts.
pub fn fd_richardson(
    f: &nninterp::FunctionHandle,
    x: &[f64],
    beta: &nninterp::MultiIndex,
    h: f64,
) -> f64 {
    let d1 = nninterp::smoothfn::finite_difference(f, x, beta, h);
    let d2 = nninterp::smoothfn::finite_difference(f, x, beta, 2.0 * h);
    2.0 * d1 - d2
}
