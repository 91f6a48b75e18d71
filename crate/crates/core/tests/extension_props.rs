//! Extension and gluing properties: nonnegativity, exact jet reproduction,
//! patch locality, and end-to-end interpolation against closed forms.

use nninterp::extension::{
    extend_jet_cm, extend_jet_cm1, interpolate_nonneg, patch_pair, verify_interpolant, Flavor,
    PipelineConfig,
};
use nninterp::gamma::{bk_sequence, GammaConfig};
use nninterp::jets::{jet_multiply, Jet};
use nninterp::smoothfn::{finite_difference, FunctionHandle};
use nninterp::synth;
use nninterp::whitney::WhitneyField;
use rand::Rng;

#[test]
fn cm1_extensions_are_nonnegative_with_exact_jets() {
    let cfg = GammaConfig::default();
    let mut rng = synth::rng(71);
    for trial in 0..12 {
        let n = 1 + trial % 2;
        let m = 1 + trial % 3;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let level = rng.gen_range(0.5..2.0);
        let p = synth::random_prime_member(&mut rng, n, m, &x, level, &cfg);
        let f = extend_jet_cm1(&p, &x, level, &cfg).unwrap();
        // nonnegative on a grid spanning the support and beyond
        let window: Vec<(f64, f64)> = x.iter().map(|&c| (c - 1.3, c + 1.3)).collect();
        let per_axis = if n == 1 { 4001 } else { 101 };
        for y in nninterp::smoothfn::grid_points(&window, per_axis) {
            assert!(f.eval(&y) >= 0.0, "negative value at {y:?}");
        }
        // exact jet at the base point, checked against finite differences;
        // for odd m >= 3 the |y - x|^m term is only C^{m-1,1}, and a central
        // difference of the top jet order sees its kink at O(h)
        let h = 1e-4;
        let kink = if m >= 3 && m % 2 == 1 {
            8.0 * level * h
        } else {
            0.0
        };
        let jet = f.jet_at(&x, m - 1);
        let scale = p.max_abs_coeff().max(1.0);
        for (alpha, (&got, &want)) in jet
            .indices()
            .iter()
            .zip(jet.coeffs().iter().zip(p.rebase(&x).coeffs()))
        {
            assert!(
                (got - want).abs() <= 1e-9 * scale,
                "jet entry {alpha:?}: {got} vs {want}"
            );
            let fd = finite_difference(&f, &x, alpha, h);
            let tol = 1e-5 * scale
                + if alpha.order() as usize == m - 1 {
                    kink
                } else {
                    0.0
                };
            assert!(
                (fd - want).abs() <= tol,
                "fd {alpha:?}: {fd} vs {want} (m = {m})"
            );
        }
        // support inside the unit ball around x
        let mut far = x.clone();
        far[0] += 1.01;
        assert_eq!(f.eval(&far), 0.0);
    }
}

#[test]
fn cm_extensions_respect_series_bounds() {
    let cfg = GammaConfig::default();
    let mut rng = synth::rng(73);
    for trial in 0..8 {
        let n = 1 + trial % 2;
        let m = 1 + trial % 3;
        let p = synth::random_plus_member(&mut rng, n, m, &cfg);
        let k_max = 40;
        let f = extend_jet_cm(&p, k_max, &cfg).unwrap();
        let b = bk_sequence(&p, k_max, &cfg);
        assert!(b
            .iter()
            .enumerate()
            .all(|(k, &v)| v <= 2.0f64.powi(-((m * k) as i32)) * (1.0 + 1e-9)));
        let window: Vec<(f64, f64)> = (0..n).map(|_| (-0.8, 0.8)).collect();
        let per_axis = if n == 1 { 4001 } else { 101 };
        let slack = 2.0f64.powi(-((m * (k_max + 1)) as i32)).max(1e-10);
        for y in nninterp::smoothfn::grid_points(&window, per_axis) {
            let v = f.eval(&y);
            assert!(v >= -slack, "dip {v} below -{slack} at {y:?}");
        }
        // the full degree-m jet at the origin is the input jet
        let jet = f.jet_at(&vec![0.0; n], m);
        let scale = p.max_abs_coeff().max(1.0);
        for (a, b) in jet.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b).abs() <= 1e-9 * scale);
        }
    }
}

#[test]
fn patch_pair_matches_weighted_jet_combination() {
    let cfg = GammaConfig::default();
    let mut rng = synth::rng(79);
    for trial in 0..30 {
        let n = 1 + trial % 2;
        let m = 1 + trial % 2; // keep fd order manageable
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.3..0.3)).collect();
        let level = 1.0;
        let delta = rng.gen_range(0.3..=1.0f64);
        let p1 = synth::random_prime_member(&mut rng, n, m, &x, level, &cfg);
        let p2 = synth::random_close_member(&mut rng, &p1, &x, level, delta, &cfg);
        let (q1, q2) = synth::random_weight_pair(&mut rng, n, m, &x, delta);
        let f1 = extend_jet_cm1(&p1, &x, level, &cfg).unwrap();
        let f2 = extend_jet_cm1(&p2, &x, level, &cfg).unwrap();
        let patched = patch_pair(&f1, &f2, &p1, &p2, &q1, &q2, &x, delta, level).unwrap();

        // jet of the blend equals Q1 Q1 P1 + Q2 Q2 P2
        let expect = jet_multiply(&jet_multiply(&q1, &q1).unwrap(), &p1)
            .unwrap()
            .add(&jet_multiply(&jet_multiply(&q2, &q2).unwrap(), &p2).unwrap())
            .unwrap();
        let jet = patched.handle.jet_at(&x, m - 1);
        let scale = expect.max_abs_coeff().max(1.0);
        for (alpha, (&got, &want)) in jet
            .indices()
            .iter()
            .zip(jet.coeffs().iter().zip(expect.coeffs()))
        {
            assert!(
                (got - want).abs() <= 1e-9 * scale,
                "trial {trial} {alpha:?}: {got} vs {want}"
            );
            let fd = finite_difference(&patched.handle, &x, alpha, 1e-4);
            assert!((fd - want).abs() <= 1e-4 * scale);
        }

        // nonnegative wherever the inputs are (they are everywhere)
        let window: Vec<(f64, f64)> = x.iter().map(|&c| (c - 1.2, c + 1.2)).collect();
        let per_axis = if n == 1 { 2001 } else { 61 };
        for y in nninterp::smoothfn::grid_points(&window, per_axis) {
            assert!(patched.handle.eval(&y) >= -1e-12);
        }

        // exact locality: agrees with F1 outside the cutoff ball
        for _ in 0..50 {
            let y: Vec<f64> = x
                .iter()
                .map(|&c| c + rng.gen_range(-1.5..1.5))
                .collect();
            let dist: f64 = y
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dist > patched.c0 * delta {
                assert_eq!(patched.handle.eval(&y), f1.eval(&y), "leak at {y:?}");
            }
        }

        // theta identities
        let probe: Vec<f64> = x.iter().map(|&c| c + 0.1).collect();
        let s = patched.theta1.eval(&probe).powi(2) + patched.theta2.eval(&probe).powi(2);
        assert!((s - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn glue_end_to_end_two_close_points() {
    // Jets taken from a single smooth nonnegative function are compatible
    // and admissible by construction.
    let cfg = PipelineConfig {
        verify_per_axis: Some(2001),
        ..PipelineConfig::default()
    };
    let points = vec![vec![0.21], vec![0.34]];
    let m = 2usize;
    let level = 1.0;
    let sample = {
        use nninterp::smoothfn::UnaryKind;
        let arg = FunctionHandle::sum(vec![
            FunctionHandle::constant(0.3),
            FunctionHandle::scale(0.9, FunctionHandle::coordinate(1, 0)),
        ]);
        FunctionHandle::sum(vec![
            FunctionHandle::constant(0.17),
            FunctionHandle::scale(-0.15, FunctionHandle::unary(UnaryKind::Cos, arg)),
        ])
    };
    let jets: Vec<Jet> = points.iter().map(|p| sample.jet_at(p, m - 1)).collect();
    let values: Vec<f64> = points.iter().map(|p| sample.eval(p)).collect();
    assert!(values.iter().all(|&v| v >= 0.0));
    let field = WhitneyField::new(points.clone(), jets).unwrap();
    assert!(nninterp::whitney::taylor_compat_check(&field, m, level).ok);

    let (f, report) =
        interpolate_nonneg(&points, &values, &field, level, Flavor::Cm1, &cfg).unwrap();
    assert!(report.interp_ok, "{report:?}");
    assert!(report.min_on_grid >= -1e-10);
    for (x, &v) in points.iter().zip(&values) {
        assert!((f.eval(x) - v).abs() <= 1e-8);
        // jets reproduced at the data points
        let jet = f.jet_at(x, m - 1);
        let want = field.jet_at(x).unwrap();
        let scale = want.max_abs_coeff().max(1.0);
        for (a, b) in jet.coeffs().iter().zip(want.coeffs()) {
            assert!((a - b).abs() <= 1e-5 * scale, "{a} vs {b}");
        }
    }
    assert!(report
        .defect_ratios
        .iter()
        .all(|r| r.is_finite() && *r >= 0.0));
}

#[test]
fn single_point_matches_lipschitz_closed_form() {
    // E = {x0}, f = 1, m = 1: the explicit optimal competitor is
    // max(0, 1 - |x - x0|), with unit sup and unit slope. Our interpolant
    // must match the value, stay nonnegative, and report a finite norm
    // ratio against the same level.
    let cfg = PipelineConfig {
        verify_per_axis: Some(4001),
        ..PipelineConfig::default()
    };
    let points = vec![vec![0.4]];
    let values = vec![1.0];
    let jets = vec![Jet::constant(1, 0, &[0.4], 1.0)];
    let field = WhitneyField::new(points.clone(), jets).unwrap();
    let (f, report) =
        interpolate_nonneg(&points, &values, &field, 1.0, Flavor::Cm1, &cfg).unwrap();
    assert!(report.interp_ok);
    assert!((f.eval(&[0.4]) - 1.0).abs() <= 1e-9);
    assert!(report.min_on_grid >= -1e-12);
    // oracle comparison: the closed form has norm exactly 1, so the norm
    // ratio reported for our construction is the measured constant.
    let oracle = |t: f64| (1.0 - (t - 0.4).abs()).max(0.0);
    assert_eq!(oracle(0.4), 1.0);
    assert!(report.norm_ratio >= 1.0 - 1e-9);
    assert!(report.norm_ratio.is_finite());
    println!(
        "single point: norm ratio {} vs closed-form optimum 1",
        report.norm_ratio
    );
}

#[test]
fn verify_report_behaviors() {
    // zero function against zero data passes; against nonzero data fails
    let zero = FunctionHandle::zero();
    let ok = verify_interpolant(&zero, &[vec![0.3]], &[0.0], 1, &[(0.0, 1.0)], 201);
    assert!(ok.interp_ok);
    assert_eq!(ok.min_on_grid, 0.0);
    let bad = verify_interpolant(&zero, &[vec![0.3]], &[2.0], 1, &[(0.0, 1.0)], 201);
    assert!(!bad.interp_ok);
    assert!((bad.interp_error - 2.0).abs() < 1e-15);
}

#[test]
fn pipeline_rejects_incompatible_hypotheses() {
    let cfg = PipelineConfig::default();
    let points = vec![vec![0.0], vec![1e-3]];
    let values = vec![0.0, 1.0]; // slope 1000 at level 1
    let jets = vec![
        Jet::constant(1, 0, &points[0], 0.0),
        Jet::constant(1, 0, &points[1], 1.0),
    ];
    let field = WhitneyField::new(points.clone(), jets).unwrap();
    let err = interpolate_nonneg(&points, &values, &field, 1.0, Flavor::Cm1, &cfg).unwrap_err();
    assert!(matches!(
        err,
        nninterp::extension::ExtendError::CompatibilityFailed { .. }
    ));
}
