//! Seminorm properties over random fields: homogeneity, subadditivity,
//! translation invariance, and the jet-translation identity used to reduce
//! membership at an arbitrary point to the origin.

use nninterp::jets::Jet;
use nninterp::smoothfn::{FunctionHandle, UnaryKind};
use nninterp::synth;
use nninterp::whitney::{seminorm, WhitneyField};
use rand::Rng;

fn random_field(rng: &mut rand_chacha::ChaCha8Rng, count: usize, degree: usize) -> WhitneyField {
    let mut points: Vec<Vec<f64>> = Vec::new();
    while points.len() < count {
        let p = vec![rng.gen_range(-2.0..2.0)];
        if points.iter().all(|q| (q[0] - p[0]).abs() > 1e-3) {
            points.push(p);
        }
    }
    let jets = points
        .iter()
        .map(|p| {
            let coeffs = (0..=degree).map(|_| rng.gen_range(-2.0..2.0)).collect();
            Jet::from_coeffs(p, degree, coeffs).unwrap()
        })
        .collect();
    WhitneyField::new(points, jets).unwrap()
}

#[test]
fn seminorm_is_subadditive_and_homogeneous() {
    let mut rng = synth::rng(5);
    for _ in 0..100 {
        let m = rng.gen_range(1..=3usize);
        let f = random_field(&mut rng, 4, m - 1);
        let g = WhitneyField::new(
            f.points().to_vec(),
            f.jets()
                .iter()
                .map(|j| {
                    let coeffs = j.coeffs().iter().map(|c| c + rng.gen_range(-1.0..1.0)).collect();
                    Jet::from_coeffs(j.base(), j.degree(), coeffs).unwrap()
                })
                .collect(),
        )
        .unwrap();
        let sum = WhitneyField::new(
            f.points().to_vec(),
            f.jets()
                .iter()
                .zip(g.jets())
                .map(|(a, b)| a.add(b).unwrap())
                .collect(),
        )
        .unwrap();
        let sf = seminorm(&f, m);
        let sg = seminorm(&g, m);
        let ss = seminorm(&sum, m);
        assert!(ss <= sf + sg + 1e-10 * (1.0 + sf + sg), "{ss} > {sf} + {sg}");

        let t = rng.gen_range(0.0..3.0);
        let scaled = WhitneyField::new(
            f.points().to_vec(),
            f.jets().iter().map(|j| j.scale(t)).collect(),
        )
        .unwrap();
        let st = seminorm(&scaled, m);
        assert!((st - t * sf).abs() <= 1e-12 * (1.0 + t * sf));
    }
}

#[test]
fn seminorm_is_translation_invariant() {
    let mut rng = synth::rng(13);
    for _ in 0..50 {
        let m = rng.gen_range(1..=3usize);
        let f = random_field(&mut rng, 4, m - 1);
        let shift = rng.gen_range(-3.0..3.0);
        let moved = WhitneyField::new(
            f.points().iter().map(|p| vec![p[0] + shift]).collect(),
            f.jets()
                .iter()
                .map(|j| {
                    Jet::from_coeffs(&[j.base()[0] + shift], j.degree(), j.coeffs().to_vec())
                        .unwrap()
                })
                .collect(),
        )
        .unwrap();
        let a = seminorm(&f, m);
        let b = seminorm(&moved, m);
        assert!((a - b).abs() <= 1e-9 * (1.0 + a), "{a} vs {b}");
    }
}

#[test]
fn translation_identity_for_membership_reduction() {
    // The jet of y -> M F(y - x) at x equals M times the jet of F at 0,
    // coefficient by coefficient. This is the identity that justifies
    // deciding membership at (x, M) by rebasing to the origin and dividing
    // by M.
    let f = FunctionHandle::sum(vec![
        FunctionHandle::constant(0.3),
        FunctionHandle::unary(
            UnaryKind::Sin,
            FunctionHandle::scale(1.3, FunctionHandle::coordinate(1, 0)),
        ),
    ]);
    for (x, level) in [(0.7, 2.0), (-1.2, 0.5), (3.0, 1.0)] {
        let shifted = FunctionHandle::scale(
            level,
            FunctionHandle::precompose_affine(f.clone(), &[x], 1.0),
        );
        let original = f.jet_at(&[0.0], 3);
        let moved = shifted.jet_at(&[x], 3);
        for (a, b) in moved.coeffs().iter().zip(original.coeffs()) {
            assert!((a - level * b).abs() <= 1e-12 * (1.0 + b.abs() * level));
        }
    }
}
