//! Evaluable smooth functions with exact derivatives.
//!
//! A [`FunctionHandle`] is an immutable combinator tree over constants,
//! polynomial jets, 1D profiles (axis-aligned tensors and radial bumps),
//! sums, guarded products, scalings, affine argument maps, reciprocals and
//! reciprocal square roots of positive combinations, radial powers, and a
//! few elementary transcendental compositions.
//!
//! Derivatives are computed by propagating truncated Taylor polynomials
//! (jets) through the tree — multivariate forward differentiation to the
//! requested order — rather than by numeric differencing. Finite differences
//! are used only as an independent test oracle.
//!
//! Products are *guarded*: when the left factor has value zero (or an
//! identically zero jet), the product reports zero without touching the
//! right factor. This gives cutoff-times-payload composites exact supports
//! and lets the payload be a quotient that is only defined where the cutoff
//! lives. Guarded products are exact for the cutoff composites built by this
//! crate; they are not meant to cancel removable singularities.

use super::profile::Profile;
use crate::jets::{jet_multiply, Jet};
use crate::multiindex::MultiIndex;
use std::sync::Arc;

#[derive(Clone)]
pub struct FunctionHandle(Arc<Node>);

impl std::fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &*self.0 {
            Node::Const(v) => return write!(f, "Const({v})"),
            Node::Poly(_) => "Poly",
            Node::Sum(t) => return write!(f, "Sum[{}]", t.len()),
            Node::Scale(..) => "Scale",
            Node::Prod(..) => "Prod",
            Node::Affine { .. } => "Affine",
            Node::Tensor(_) => "Tensor",
            Node::Radial { .. } => "Radial",
            Node::RadialPower { .. } => "RadialPower",
            Node::Recip(_) => "Recip",
            Node::InvSqrt(_) => "InvSqrt",
            Node::Unary(..) => "Unary",
        };
        write!(f, "{kind}(..)")
    }
}

enum Node {
    Const(f64),
    Poly(Jet),
    Sum(Vec<FunctionHandle>),
    Scale(f64, FunctionHandle),
    /// Guarded product; the left factor acts as the cutoff.
    Prod(FunctionHandle, FunctionHandle),
    /// `x -> f(scale * (x - center))`
    Affine {
        f: FunctionHandle,
        center: Vec<f64>,
        scale: f64,
    },
    /// `prod_i w_i(x_i)`
    Tensor(Vec<Profile>),
    /// `w(|x - center|)`; the profile must be constant near 0.
    Radial {
        center: Vec<f64>,
        profile: Profile,
    },
    /// `|x - center|^power` for odd `power` (even powers are polynomials).
    RadialPower {
        center: Vec<f64>,
        power: u32,
    },
    /// `1 / f`, only evaluated where `f` is bounded away from 0.
    Recip(FunctionHandle),
    /// `f^{-1/2}`, only evaluated where `f > 0`.
    InvSqrt(FunctionHandle),
    /// Elementary transcendental composition.
    Unary(UnaryKind, FunctionHandle),
}

#[derive(Clone, Copy, Debug)]
pub enum UnaryKind {
    Sin,
    Cos,
    Exp,
}

impl FunctionHandle {
    pub fn constant(v: f64) -> Self {
        FunctionHandle(Arc::new(Node::Const(v)))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Polynomial given by a jet (exact everywhere).
    pub fn poly(jet: Jet) -> Self {
        FunctionHandle(Arc::new(Node::Poly(jet)))
    }

    /// The coordinate function `x -> x_axis`.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        let mut jet = Jet::zero(dim, 1, &vec![0.0; dim]);
        jet.set_coeff(&MultiIndex::unit(dim, axis), 1.0);
        Self::poly(jet)
    }

    pub fn sum(terms: Vec<FunctionHandle>) -> Self {
        FunctionHandle(Arc::new(Node::Sum(terms)))
    }

    pub fn scale(t: f64, f: FunctionHandle) -> Self {
        FunctionHandle(Arc::new(Node::Scale(t, f)))
    }

    /// Guarded product `cutoff * payload`; see the module docs.
    pub fn product(cutoff: FunctionHandle, payload: FunctionHandle) -> Self {
        FunctionHandle(Arc::new(Node::Prod(cutoff, payload)))
    }

    /// `x -> f(scale * (x - center))`.
    pub fn precompose_affine(f: FunctionHandle, center: &[f64], scale: f64) -> Self {
        FunctionHandle(Arc::new(Node::Affine {
            f,
            center: center.to_vec(),
            scale,
        }))
    }

    /// Tensor product of per-axis profiles.
    pub fn tensor(profiles: Vec<Profile>) -> Self {
        assert!(!profiles.is_empty());
        FunctionHandle(Arc::new(Node::Tensor(profiles)))
    }

    /// Radial profile `w(|x - center|)`. The profile must be constant on a
    /// neighborhood of 0 so the composite is smooth at the center.
    pub fn radial(center: &[f64], profile: Profile) -> Self {
        let start = profile.first_ramp_start();
        assert!(
            start.map_or(true, |s| s > 0.0),
            "radial profile must be constant near r = 0"
        );
        FunctionHandle(Arc::new(Node::Radial {
            center: center.to_vec(),
            profile,
        }))
    }

    /// `|x - center|^power`. Even powers become exact polynomials.
    pub fn radial_power(center: &[f64], power: u32) -> Self {
        if power % 2 == 0 {
            return Self::poly(even_radial_power_jet(center, power));
        }
        FunctionHandle(Arc::new(Node::RadialPower {
            center: center.to_vec(),
            power,
        }))
    }

    pub fn recip(f: FunctionHandle) -> Self {
        FunctionHandle(Arc::new(Node::Recip(f)))
    }

    pub fn inv_sqrt(f: FunctionHandle) -> Self {
        FunctionHandle(Arc::new(Node::InvSqrt(f)))
    }

    pub fn unary(kind: UnaryKind, f: FunctionHandle) -> Self {
        FunctionHandle(Arc::new(Node::Unary(kind, f)))
    }

    /// Value at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &*self.0 {
            Node::Const(v) => *v,
            Node::Poly(jet) => jet.eval(x),
            Node::Sum(terms) => terms.iter().map(|t| t.eval(x)).sum(),
            Node::Scale(t, f) => t * f.eval(x),
            Node::Prod(a, b) => {
                let va = a.eval(x);
                if va == 0.0 {
                    0.0
                } else {
                    va * b.eval(x)
                }
            }
            Node::Affine { f, center, scale } => {
                let u: Vec<f64> = x
                    .iter()
                    .zip(center)
                    .map(|(xi, ci)| scale * (xi - ci))
                    .collect();
                f.eval(&u)
            }
            Node::Tensor(profiles) => profiles
                .iter()
                .zip(x)
                .map(|(w, &xi)| w.value(xi))
                .product(),
            Node::Radial { center, profile } => {
                profile.value(crate::whitney::euclid(x, center))
            }
            Node::RadialPower { center, power } => {
                crate::whitney::euclid(x, center).powi(*power as i32)
            }
            Node::Recip(f) => 1.0 / f.eval(x),
            Node::InvSqrt(f) => 1.0 / f.eval(x).sqrt(),
            Node::Unary(kind, f) => {
                let t = f.eval(x);
                match kind {
                    UnaryKind::Sin => t.sin(),
                    UnaryKind::Cos => t.cos(),
                    UnaryKind::Exp => t.exp(),
                }
            }
        }
    }

    /// Derivative `d^b F(x)`, via the jet of order `|b|`.
    pub fn deriv(&self, x: &[f64], beta: &MultiIndex) -> f64 {
        self.jet_at(x, beta.order() as usize).coeff(beta)
    }

    /// Taylor jet of the function at `x`, truncated at `degree`.
    pub fn jet_at(&self, x: &[f64], degree: usize) -> Jet {
        match &*self.0 {
            Node::Const(v) => Jet::constant(x.len(), degree, x, *v),
            Node::Poly(jet) => {
                let r = jet.rebase(x);
                match degree.cmp(&r.degree()) {
                    std::cmp::Ordering::Less => {
                        let mut t = r;
                        while t.degree() > degree {
                            t = t.project();
                        }
                        t
                    }
                    std::cmp::Ordering::Equal => r,
                    std::cmp::Ordering::Greater => r.embed(degree),
                }
            }
            Node::Sum(terms) => {
                let mut acc = Jet::zero(x.len(), degree, x);
                for t in terms {
                    acc = acc.add(&t.jet_at(x, degree)).expect("same shape");
                }
                acc
            }
            Node::Scale(t, f) => f.jet_at(x, degree).scale(*t),
            Node::Prod(a, b) => {
                let ja = a.jet_at(x, degree);
                if ja.is_zero() {
                    ja
                } else {
                    jet_multiply(&ja, &b.jet_at(x, degree)).expect("same shape")
                }
            }
            Node::Affine { f, center, scale } => {
                let u: Vec<f64> = x
                    .iter()
                    .zip(center)
                    .map(|(xi, ci)| scale * (xi - ci))
                    .collect();
                let inner = f.jet_at(&u, degree);
                let coeffs = inner
                    .indices()
                    .iter()
                    .zip(inner.coeffs())
                    .map(|(a, &c)| c * scale.powi(a.order() as i32))
                    .collect();
                Jet::from_coeffs(x, degree, coeffs).expect("finite")
            }
            Node::Tensor(profiles) => {
                // Derivatives of a product in distinct variables factorize.
                let per_axis: Vec<Vec<f64>> = profiles
                    .iter()
                    .zip(x)
                    .map(|(w, &xi)| w.derivs(xi, degree))
                    .collect();
                let mut jet = Jet::zero(x.len(), degree, x);
                let indices = jet.indices();
                let coeffs: Vec<f64> = indices
                    .iter()
                    .map(|alpha| {
                        alpha
                            .0
                            .iter()
                            .enumerate()
                            .map(|(axis, &k)| per_axis[axis][k as usize])
                            .product()
                    })
                    .collect();
                for (i, c) in coeffs.into_iter().enumerate() {
                    jet.set_coeff(&indices[i], c);
                }
                jet
            }
            Node::Radial { center, profile } => {
                let r0 = crate::whitney::euclid(x, center);
                if let Some(v) = profile.local_const(r0) {
                    return Jet::constant(x.len(), degree, x, v);
                }
                // w(r) with r = sqrt(u), u = |x - center|^2 > 0 on ramps.
                let u_jet = squared_distance_jet(x, center, degree);
                let u0 = u_jet.coeff(&MultiIndex::zero(x.len()));
                assert!(u0 > 0.0, "radial ramp evaluated at its center");
                let r_jet = compose_scalar(&sqrt_derivs(u0, degree), &u_jet);
                compose_scalar(&profile.derivs(r0, degree), &r_jet)
            }
            Node::RadialPower { center, power } => {
                let u_jet = squared_distance_jet(x, center, degree);
                let u0 = u_jet.coeff(&MultiIndex::zero(x.len()));
                if u0 < 1e-280 {
                    // All derivatives below the power vanish at the center;
                    // the order-`power` ones are only essentially bounded and
                    // are reported as 0 at the single singular point.
                    return Jet::zero(x.len(), degree, x);
                }
                compose_scalar(&half_power_derivs(u0, *power as f64 / 2.0, degree), &u_jet)
            }
            Node::Recip(f) => {
                let inner = f.jet_at(x, degree);
                let t0 = inner.coeff(&MultiIndex::zero(x.len()));
                assert!(t0.abs() > 1e-280, "reciprocal of a vanishing function");
                let mut h = Vec::with_capacity(degree + 1);
                let mut v = 1.0 / t0;
                for k in 0..=degree {
                    h.push(v);
                    v *= -((k + 1) as f64) / t0;
                }
                compose_scalar(&h, &inner)
            }
            Node::InvSqrt(f) => {
                let inner = f.jet_at(x, degree);
                let t0 = inner.coeff(&MultiIndex::zero(x.len()));
                assert!(t0 > 0.0, "inverse square root of a nonpositive function");
                compose_scalar(&half_power_derivs(t0, -0.5, degree), &inner)
            }
            Node::Unary(kind, f) => {
                let inner = f.jet_at(x, degree);
                let t0 = inner.coeff(&MultiIndex::zero(x.len()));
                let h: Vec<f64> = (0..=degree)
                    .map(|k| match kind {
                        UnaryKind::Sin => match k % 4 {
                            0 => t0.sin(),
                            1 => t0.cos(),
                            2 => -t0.sin(),
                            _ => -t0.cos(),
                        },
                        UnaryKind::Cos => match k % 4 {
                            0 => t0.cos(),
                            1 => -t0.sin(),
                            2 => -t0.cos(),
                            _ => t0.sin(),
                        },
                        UnaryKind::Exp => t0.exp(),
                    })
                    .collect();
                compose_scalar(&h, &inner)
            }
        }
    }
}

/// Jet of `u(y) = |y - center|^2` at `x`.
fn squared_distance_jet(x: &[f64], center: &[f64], degree: usize) -> Jet {
    let dim = x.len();
    let mut jet = Jet::zero(dim, degree, x);
    let value: f64 = x
        .iter()
        .zip(center)
        .map(|(a, c)| (a - c) * (a - c))
        .sum();
    jet.set_coeff(&MultiIndex::zero(dim), value);
    if degree >= 1 {
        for axis in 0..dim {
            jet.set_coeff(&MultiIndex::unit(dim, axis), 2.0 * (x[axis] - center[axis]));
        }
    }
    if degree >= 2 {
        for axis in 0..dim {
            let mut e = vec![0; dim];
            e[axis] = 2;
            jet.set_coeff(&MultiIndex(e), 2.0);
        }
    }
    jet
}

/// `d^k (t^p)` at `t0` for `k = 0..=degree` (fractional `p` allowed).
fn half_power_derivs(t0: f64, p: f64, degree: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(degree + 1);
    let mut coef = 1.0;
    for k in 0..=degree {
        out.push(coef * t0.powf(p - k as f64));
        coef *= p - k as f64;
    }
    out
}

fn sqrt_derivs(t0: f64, degree: usize) -> Vec<f64> {
    half_power_derivs(t0, 0.5, degree)
}

/// Composition `h(g)` on jets: given `h^{(k)}(g(x))` and the jet of `g` at
/// `x`, returns the jet of `h(g)` at `x` by the truncated Taylor expansion
/// `sum_k h^{(k)}(g0)/k! * (G - g0)^k`.
pub fn compose_scalar(h_derivs: &[f64], inner: &Jet) -> Jet {
    let dim = inner.dim();
    let degree = inner.degree();
    assert!(h_derivs.len() >= degree + 1);
    let zero_idx = MultiIndex::zero(dim);
    let mut centered = inner.clone();
    centered.set_coeff(&zero_idx, 0.0);
    let mut acc = Jet::constant(dim, degree, inner.base(), h_derivs[0]);
    let mut power = Jet::constant(dim, degree, inner.base(), 1.0);
    let mut kfact = 1.0;
    for k in 1..=degree {
        power = jet_multiply(&power, &centered).expect("same shape");
        kfact *= k as f64;
        if power.is_zero() {
            break;
        }
        acc = acc
            .add(&power.scale(h_derivs[k] / kfact))
            .expect("same shape");
    }
    acc
}

/// Jet form of the polynomial `|x - center|^power` for even `power`.
fn even_radial_power_jet(center: &[f64], power: u32) -> Jet {
    let dim = center.len();
    let half = power / 2;
    // Expand (sum_i z_i^2)^half at base `center` by repeated jet products.
    let mut sq = Jet::zero(dim, power as usize, center);
    if power >= 2 {
        for axis in 0..dim {
            let mut e = vec![0; dim];
            e[axis] = 2;
            sq.set_coeff(&MultiIndex(e), 2.0);
        }
    }
    let mut acc = Jet::constant(dim, power as usize, center, 1.0);
    for _ in 0..half {
        acc = jet_multiply(&acc, &sq).expect("same shape");
    }
    acc
}

/// Central finite difference of `d^b f` at `x` with step `h`, accurate to
/// `O(h^2)`. Test oracle and precondition checker; not used to build
/// derivatives.
pub fn finite_difference(f: &FunctionHandle, x: &[f64], beta: &MultiIndex, h: f64) -> f64 {
    match beta.0.iter().position(|&k| k > 0) {
        None => f.eval(x),
        Some(axis) => {
            let lower = {
                let mut b = beta.clone();
                b.0[axis] -= 1;
                b
            };
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[axis] += h;
            xm[axis] -= h;
            (finite_difference(f, &xp, &lower, h) - finite_difference(f, &xm, &lower, h))
                / (2.0 * h)
        }
    }
}
