//! One-dimensional `C^m` ramp profiles as piecewise polynomials.
//!
//! The basic ingredient is the polynomial smoothstep of order `m`,
//!
//! ```text
//!     S_m(t) = (int_0^t s^m (1-s)^m ds) / (int_0^1 s^m (1-s)^m ds),
//! ```
//!
//! extended by 0 below and 1 above. `S_m` is a polynomial of degree
//! `2m + 1` on `[0, 1]` whose derivatives through order `m` vanish at both
//! endpoints, so every profile built from it joins its constant plateaus
//! with `C^m` smoothness and has *exact* support: evaluation on a constant
//! piece returns the constant, not a numerically small residue.

use crate::multiindex::binomial;

/// Piecewise-polynomial profile on the real line. Pieces are half-open
/// `[break_{i-1}, break_i)`, with the first piece covering `(-inf, break_0)`
/// and the last `[break_last, inf)`.
#[derive(Clone, Debug)]
pub struct Profile {
    breaks: Vec<f64>,
    pieces: Vec<Piece>,
}

#[derive(Clone, Debug)]
enum Piece {
    Const(f64),
    /// `poly(s)` with `s = (t - a) / (b - a)`, coefficients in the monomial
    /// basis of `s`. Values are clamped to `[lo, hi]` so that profiles meant
    /// to stay inside `[0, 1]` never leak a negative rounding residue.
    Ramp {
        a: f64,
        b: f64,
        coeffs: Vec<f64>,
        lo: f64,
        hi: f64,
    },
}

impl Profile {
    pub fn constant(v: f64) -> Self {
        Profile {
            breaks: Vec::new(),
            pieces: vec![Piece::Const(v)],
        }
    }

    /// 0 below `a`, `S_m` ramp on `[a, b)`, 1 above.
    pub fn ramp_up(a: f64, b: f64, m: usize) -> Self {
        assert!(b > a, "ramp needs a nonempty interval");
        Profile {
            breaks: vec![a, b],
            pieces: vec![
                Piece::Const(0.0),
                Piece::Ramp {
                    a,
                    b,
                    coeffs: smoothstep_coeffs(m),
                    lo: 0.0,
                    hi: 1.0,
                },
                Piece::Const(1.0),
            ],
        }
    }

    /// 1 below `a`, descending ramp on `[a, b)`, 0 above.
    pub fn ramp_down(a: f64, b: f64, m: usize) -> Self {
        assert!(b > a, "ramp needs a nonempty interval");
        let mut coeffs = smoothstep_coeffs(m);
        for c in coeffs.iter_mut() {
            *c = -*c;
        }
        coeffs[0] += 1.0;
        Profile {
            breaks: vec![a, b],
            pieces: vec![
                Piece::Const(1.0),
                Piece::Ramp {
                    a,
                    b,
                    coeffs,
                    lo: 0.0,
                    hi: 1.0,
                },
                Piece::Const(0.0),
            ],
        }
    }

    /// 0 outside `[a1, a4]`, ascending on `[a1, a2]`, 1 on `[a2, a3]`,
    /// descending on `[a3, a4]`.
    pub fn plateau(a1: f64, a2: f64, a3: f64, a4: f64, m: usize) -> Self {
        assert!(a1 < a2 && a2 <= a3 && a3 < a4, "plateau breakpoints out of order");
        let up = Profile::ramp_up(a1, a2, m);
        let down = Profile::ramp_down(a3, a4, m);
        Profile {
            breaks: vec![a1, a2, a3, a4],
            pieces: vec![
                Piece::Const(0.0),
                up.pieces[1].clone(),
                Piece::Const(1.0),
                down.pieces[1].clone(),
                Piece::Const(0.0),
            ],
        }
    }

    fn piece_at(&self, t: f64) -> &Piece {
        // First break with t < break; piece index equals that position.
        let mut idx = self.breaks.len();
        for (i, b) in self.breaks.iter().enumerate() {
            if t < *b {
                idx = i;
                break;
            }
        }
        &self.pieces[idx]
    }

    pub fn value(&self, t: f64) -> f64 {
        match self.piece_at(t) {
            Piece::Const(v) => *v,
            Piece::Ramp {
                a,
                b,
                coeffs,
                lo,
                hi,
            } => horner(coeffs, (t - a) / (b - a)).clamp(*lo, *hi),
        }
    }

    /// Value and derivatives through `max_order` at `t`. At a breakpoint the
    /// right-hand piece is used; the `C^m` junction makes the answer
    /// independent of that choice through order `m`.
    pub fn derivs(&self, t: f64, max_order: usize) -> Vec<f64> {
        match self.piece_at(t) {
            Piece::Const(v) => {
                let mut out = vec![0.0; max_order + 1];
                out[0] = *v;
                out
            }
            Piece::Ramp {
                a,
                b,
                coeffs,
                lo,
                hi,
            } => {
                let s = (t - a) / (b - a);
                let scale = 1.0 / (b - a);
                let mut out = Vec::with_capacity(max_order + 1);
                let mut d = coeffs.clone();
                for k in 0..=max_order {
                    let mut v = horner(&d, s);
                    if k == 0 {
                        v = v.clamp(*lo, *hi);
                    } else {
                        v *= scale.powi(k as i32);
                    }
                    out.push(v);
                    d = poly_derivative(&d);
                }
                out
            }
        }
    }

    /// The constant value when `t` lies on a constant piece.
    pub fn local_const(&self, t: f64) -> Option<f64> {
        match self.piece_at(t) {
            Piece::Const(v) => Some(*v),
            Piece::Ramp { .. } => None,
        }
    }

    /// Left endpoint of the leftmost non-constant piece, if any. Radial
    /// profiles must keep a constant piece around 0.
    pub fn first_ramp_start(&self) -> Option<f64> {
        self.pieces.iter().zip(std::iter::once(f64::NEG_INFINITY).chain(self.breaks.iter().copied()))
            .find_map(|(p, start)| match p {
                Piece::Ramp { .. } => Some(start),
                Piece::Const(_) => None,
            })
    }

    /// Interval outside of which the profile is identically zero, if it has
    /// compact support.
    pub fn support(&self) -> Option<(f64, f64)> {
        let first = self.pieces.first()?;
        let last = self.pieces.last()?;
        match (first, last) {
            (Piece::Const(a), Piece::Const(b)) if *a == 0.0 && *b == 0.0 => {
                Some((self.breaks[0], *self.breaks.last().unwrap()))
            }
            _ => None,
        }
    }

    /// Max absolute value of the `k`-th derivative over the ramps, by dense
    /// sampling; constant pieces contribute only at `k = 0`.
    pub fn deriv_sup(&self, k: usize, samples: usize) -> f64 {
        let mut sup: f64 = 0.0;
        if k == 0 {
            for p in &self.pieces {
                if let Piece::Const(v) = p {
                    sup = sup.max(v.abs());
                }
            }
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if let Piece::Ramp { a, b, .. } = p {
                let _ = i;
                for j in 0..=samples {
                    let t = a + (b - a) * j as f64 / samples as f64;
                    sup = sup.max(self.derivs(t, k)[k].abs());
                }
            }
        }
        sup
    }
}

/// Monomial coefficients of `S_m` on `[0, 1]`, degree `2m + 1`.
pub fn smoothstep_coeffs(m: usize) -> Vec<f64> {
    let m = m as u32;
    // int_0^t s^m (1-s)^m ds = sum_j (-1)^j C(m, j) t^{m+j+1} / (m+j+1)
    let norm: f64 = (0..=m)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(m, j) / (m + j + 1) as f64
        })
        .sum();
    let mut coeffs = vec![0.0; (2 * m + 2) as usize];
    for j in 0..=m {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[(m + j + 1) as usize] = sign * binomial(m, j) / ((m + j + 1) as f64 * norm);
    }
    coeffs
}

fn horner(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    if coeffs.len() <= 1 {
        return vec![0.0];
    }
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}
