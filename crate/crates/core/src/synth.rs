//! Seeded generators for random instances: data sets, admissible jets, and
//! weight pairs. Everything is driven by an explicit seed so verification
//! suites and the command-line self test reproduce bit-for-bit.

use crate::gamma::{gamma0plus_member, gamma_prime_member, GammaConfig};
use crate::jets::{jet_multiply, Jet};
use crate::smoothfn::compose_scalar;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random data set: up to `max_points` distinct points in `[0, span]^n`
/// with nonnegative values bounded by `max_value`. Points are separated by
/// at least `2^-10` per axis so decompositions stay shallow.
pub fn random_dataset(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_points: usize,
    span: f64,
    max_value: f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let count = rng.gen_range(1..=max_points.max(1));
    let mut points: Vec<Vec<f64>> = Vec::new();
    let min_sep = (2.0f64).powi(-10);
    while points.len() < count {
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..span)).collect();
        if points
            .iter()
            .all(|q| q.iter().zip(&p).any(|(a, b)| (a - b).abs() >= min_sep))
        {
            points.push(p);
        }
    }
    let values = (0..points.len())
        .map(|_| rng.gen_range(0.0..max_value))
        .collect();
    (points, values)
}

/// Random jet accepted by the Lipschitz-flavor membership at `(x, level)`,
/// by rejection from a shrinking coefficient box. The zeroth coefficient is
/// kept nonnegative.
pub fn random_prime_member(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    x: &[f64],
    level: f64,
    cfg: &GammaConfig,
) -> Jet {
    let mut scale = 0.5;
    loop {
        let count = crate::multiindex::count(n, (m - 1) as u32);
        let coeffs: Vec<f64> = (0..count)
            .map(|i| {
                let c = rng.gen_range(-1.0..1.0) * scale * level;
                if i == 0 {
                    c.abs()
                } else {
                    c
                }
            })
            .collect();
        let jet = Jet::from_coeffs(x, m - 1, coeffs).expect("finite");
        if gamma_prime_member(&jet, x, level, None, cfg)
            .map(|v| v.is_member())
            .unwrap_or(false)
        {
            return jet;
        }
        scale *= 0.7;
    }
}

/// Random degree-`m` jet in the model class at the origin, generated as the
/// jet of a scaled nonnegative smooth sample (a raised cosine plus an
/// offset), then rejection-checked. Samples with a strictly positive value
/// at the origin classify robustly.
pub fn random_plus_member(rng: &mut ChaCha8Rng, n: usize, m: usize, cfg: &GammaConfig) -> Jet {
    use crate::smoothfn::{FunctionHandle, UnaryKind};
    loop {
        let amp = rng.gen_range(0.02..0.3);
        let offset = rng.gen_range(0.01..0.2);
        let freq: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..1.2)).collect();
        let phase = rng.gen_range(-0.5..0.5);
        // F = amp * (1 - cos(w . x + phase)) + offset >= offset > 0.
        let mut arg = FunctionHandle::constant(phase);
        for (axis, &w) in freq.iter().enumerate() {
            arg = FunctionHandle::sum(vec![
                arg,
                FunctionHandle::scale(w, FunctionHandle::coordinate(n, axis)),
            ]);
        }
        let f = FunctionHandle::sum(vec![
            FunctionHandle::constant(amp + offset),
            FunctionHandle::scale(-amp, FunctionHandle::unary(UnaryKind::Cos, arg)),
        ]);
        let jet = f.jet_at(&vec![0.0; n], m);
        if gamma0plus_member(&jet, cfg)
            .map(|v| v.is_member())
            .unwrap_or(false)
        {
            return jet;
        }
    }
}

/// A weight pair `(Q1, Q2)` with `Q1 Q1 + Q2 Q2 = 1` exactly as jets at
/// `x`, and derivative envelopes below `delta^{-|b|}`: the cosine and sine
/// jets of a random polynomial phase with `delta`-scaled coefficients.
pub fn random_weight_pair(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    x: &[f64],
    delta: f64,
) -> (Jet, Jet) {
    let count = crate::multiindex::count(n, (m - 1) as u32);
    let indices = crate::multiindex::enumerate(n, (m - 1) as u32);
    let coeffs: Vec<f64> = (0..count)
        .map(|i| {
            let order = indices[i].order() as i32;
            rng.gen_range(-0.25..0.25) * delta.powi(-order)
        })
        .collect();
    let tau = Jet::from_coeffs(x, m - 1, coeffs).expect("finite");
    let t0 = tau.coeffs()[0];
    let degree = m - 1;
    let cos_derivs: Vec<f64> = (0..=degree)
        .map(|k| match k % 4 {
            0 => t0.cos(),
            1 => -t0.sin(),
            2 => -t0.cos(),
            _ => t0.sin(),
        })
        .collect();
    let sin_derivs: Vec<f64> = (0..=degree)
        .map(|k| match k % 4 {
            0 => t0.sin(),
            1 => t0.cos(),
            2 => -t0.sin(),
            _ => -t0.cos(),
        })
        .collect();
    let q1 = compose_scalar(&cos_derivs, &tau);
    let q2 = compose_scalar(&sin_derivs, &tau);
    debug_assert!({
        let quad = jet_multiply(&q1, &q1)
            .unwrap()
            .add(&jet_multiply(&q2, &q2).unwrap())
            .unwrap();
        (quad.coeffs()[0] - 1.0).abs() < 1e-12
            && quad.coeffs()[1..].iter().all(|c| c.abs() < 1e-10)
    });
    (q1, q2)
}

/// A second member jet within the `delta`-envelope of `p1`, for the
/// patching hypotheses: `|d^b (P1 - P2)(x)| <= level * delta^{m - |b|}`.
pub fn random_close_member(
    rng: &mut ChaCha8Rng,
    p1: &Jet,
    x: &[f64],
    level: f64,
    delta: f64,
    cfg: &GammaConfig,
) -> Jet {
    let m = p1.degree() + 1;
    let indices = p1.indices();
    loop {
        let perturbation: Vec<f64> = indices
            .iter()
            .map(|a| {
                let bound = level * delta.powi((m - a.order() as usize) as i32);
                rng.gen_range(-0.5..0.5) * bound
            })
            .collect();
        let p2 = p1
            .add(&Jet::from_coeffs(x, p1.degree(), perturbation).expect("finite"))
            .expect("same shape");
        if gamma_prime_member(&p2, x, level, None, cfg)
            .map(|v| v.is_member())
            .unwrap_or(false)
        {
            return p2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_respects_bounds() {
        let mut r = rng(7);
        let (points, values) = random_dataset(&mut r, 2, 10, 3.0, 2.0);
        assert!(!points.is_empty() && points.len() <= 10);
        assert_eq!(points.len(), values.len());
        assert!(values.iter().all(|&v| (0.0..2.0).contains(&v)));
        assert!(points
            .iter()
            .all(|p| p.iter().all(|&c| (0.0..3.0).contains(&c))));
    }

    #[test]
    fn generators_are_seed_deterministic() {
        let (a, fa) = random_dataset(&mut rng(42), 1, 8, 2.0, 1.0);
        let (b, fb) = random_dataset(&mut rng(42), 1, 8, 2.0, 1.0);
        assert_eq!(a, b);
        assert_eq!(fa, fb);
    }

    #[test]
    fn members_pass_their_checks() {
        let cfg = GammaConfig::default();
        let mut r = rng(3);
        let p = random_prime_member(&mut r, 1, 2, &[0.4], 1.0, &cfg);
        assert!(gamma_prime_member(&p, &[0.4], 1.0, None, &cfg)
            .unwrap()
            .is_member());
        let q = random_plus_member(&mut r, 1, 2, &cfg);
        assert!(gamma0plus_member(&q, &cfg).unwrap().is_member());
    }

    #[test]
    fn weight_pairs_have_unit_quadrance() {
        let mut r = rng(11);
        for _ in 0..10 {
            let (q1, q2) = random_weight_pair(&mut r, 1, 3, &[0.2], 0.5);
            let quad = jet_multiply(&q1, &q1)
                .unwrap()
                .add(&jet_multiply(&q2, &q2).unwrap())
                .unwrap();
            assert!((quad.coeffs()[0] - 1.0).abs() < 1e-12);
            assert!(quad.coeffs()[1..].iter().all(|c| c.abs() < 1e-9));
        }
    }
}
