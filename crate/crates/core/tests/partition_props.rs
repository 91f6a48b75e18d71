//! Partition-of-unity and bump-family properties: exact supports, unit
//! sums, derivative scaling across cube levels, and finite-difference
//! agreement.

use nninterp::czdecomp::{cz_decompose, DyadicRegion};
use nninterp::multiindex::MultiIndex;
use nninterp::smoothfn::{
    build_bumps, finite_difference, grid_points, unit_partition, whitney_partition,
};
use nninterp::synth;
use rand::Rng;

#[test]
fn chi_and_phi_pins() {
    for n in [1usize, 2] {
        let b = build_bumps(2, n);
        let origin = vec![0.0; n];
        assert_eq!(b.chi.eval(&origin), 1.0);
        let far: Vec<f64> = (0..n).map(|a| if a == 0 { 0.51 } else { 0.0 }).collect();
        assert_eq!(b.chi.eval(&far), 0.0);
        // phi = 1 on 1/2 <= |x| <= 2, 0 unless 1/4 < |x| < 4
        let at = |r: f64| {
            let mut x = vec![0.0; n];
            x[0] = r;
            b.phi.eval(&x)
        };
        assert_eq!(at(0.5), 1.0);
        assert_eq!(at(2.0), 1.0);
        assert_eq!(at(0.25), 0.0);
        assert_eq!(at(4.0), 0.0);
        assert_eq!(at(5.0), 0.0);
        assert!(at(0.3) > 0.0 && at(0.3) < 1.0);
    }
}

#[test]
fn phi_k_derivative_bounds_scale_dyadically() {
    // sup |d^b phi_k| <= C 2^{mk} with a stable constant across k.
    let m = 2usize;
    let b = build_bumps(m, 1);
    let beta = MultiIndex(vec![m as u32]);
    let mut ratios = Vec::new();
    for k in 0..=10u32 {
        let phi_k = b.phi_k(k);
        let r_hi = 2.0f64.powi(2 - k as i32);
        let mut sup = 0.0f64;
        for i in 0..2000 {
            let t = -r_hi + 2.0 * r_hi * i as f64 / 1999.0;
            sup = sup.max(phi_k.deriv(&[t], &beta).abs());
        }
        ratios.push(sup / 2.0f64.powi((m as i32) * k as i32));
    }
    let max = ratios.iter().cloned().fold(0.0f64, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min > 0.0);
    assert!(
        max / min < 1.0 + 1e-6,
        "scaling constant drifts: {ratios:?}"
    );
}

#[test]
fn whitney_partition_sums_and_nonnegativity() {
    for seed in 0..8u64 {
        let mut rng = synth::rng(seed);
        let n = 1 + (seed % 2) as usize;
        let (points, _) = synth::random_dataset(&mut rng, n, 8, 2.0, 1.0);
        let region = DyadicRegion::padded_around(&points, n, 6);
        let dec = cz_decompose(&points, &region).unwrap();
        let thetas = whitney_partition(&dec, 2).unwrap();
        for _ in 0..(1000 / n) {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..3.0)).collect();
            let mut sum = 0.0;
            for th in &thetas {
                let v = th.eval(&x);
                assert!(v >= 0.0, "theta negative at {x:?}");
                sum += v;
            }
            assert!((sum - 1.0).abs() <= 1e-9, "sum {sum} at {x:?}");
        }
    }
}

#[test]
fn support_containment_is_exact() {
    let region = DyadicRegion::new(vec![-2], vec![2]).unwrap();
    let e = vec![vec![0.25], vec![0.3]];
    let dec = cz_decompose(&e, &region).unwrap();
    let thetas = whitney_partition(&dec, 2).unwrap();
    let mut rng = synth::rng(3);
    for (i, th) in thetas.iter().enumerate() {
        for _ in 0..200 {
            let x = [rng.gen_range(-2.0..2.0)];
            if !dec.cubes[i].dilate_65_64_contains(&x) {
                assert_eq!(th.eval(&x), 0.0, "cube {i} leaks outside its dilate");
                assert!(th.jet_at(&x, 2).is_zero());
            }
        }
    }
}

#[test]
fn theta_derivative_sups_scale_with_sidelength() {
    // A close pair forces several levels; the per-level sup of |d^b theta|
    // must scale like delta^{-|b|} (log-log slope within 10%).
    let region = DyadicRegion::new(vec![-2], vec![2]).unwrap();
    let e = vec![vec![0.5], vec![0.5 + 2.0f64.powi(-6)]];
    let dec = cz_decompose(&e, &region).unwrap();
    let m = 2usize;
    let thetas = whitney_partition(&dec, m).unwrap();
    for order in 1..=m as u32 {
        let beta = MultiIndex(vec![order]);
        // max sup per level
        let mut per_level: std::collections::BTreeMap<i32, f64> = Default::default();
        for (i, th) in thetas.iter().enumerate() {
            let c = &dec.cubes[i];
            let lo = c.lower(0) - c.sidelength() / 64.0;
            let hi = c.upper(0) + c.sidelength() / 64.0;
            let mut sup = 0.0f64;
            for j in 0..300 {
                let t = lo + (hi - lo) * j as f64 / 299.0;
                sup = sup.max(th.deriv(&[t], &beta).abs());
            }
            let e = per_level.entry(c.level).or_insert(0.0);
            *e = e.max(sup);
        }
        let pts: Vec<(f64, f64)> = per_level
            .iter()
            .filter(|(_, &s)| s > 0.0)
            .map(|(&lvl, &s)| ((lvl as f64) * std::f64::consts::LN_2, s.ln()))
            .collect();
        assert!(pts.len() >= 4, "need several levels, got {pts:?}");
        // least-squares slope of ln sup against ln delta
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let target = -(order as f64);
        assert!(
            (slope - target).abs() <= 0.1 * order as f64,
            "order {order}: slope {slope} vs {target}"
        );
    }
}

#[test]
fn unit_partition_properties() {
    let m = 2;
    let bumps = unit_partition(&[(0.0, 2.0)], m);
    let mut rng = synth::rng(17);
    for _ in 0..1000 {
        let x = [rng.gen_range(0.0..2.0)];
        let sum: f64 = bumps.iter().map(|b| b.handle.eval(&x)).sum();
        assert!((sum - 1.0).abs() <= 1e-9);
    }
    // Uniform derivative bound across members.
    let beta = MultiIndex(vec![2]);
    let mut sups = Vec::new();
    for b in &bumps {
        let (lo, hi) = (b.center[0] - 0.25, b.center[0] + 0.25);
        let mut sup = 0.0f64;
        for j in 0..400 {
            let t = lo + (hi - lo) * j as f64 / 399.0;
            sup = sup.max(b.handle.deriv(&[t], &beta).abs());
        }
        sups.push(sup);
    }
    let hi = sups.iter().cloned().fold(0.0f64, f64::max);
    // interior members all see the same geometry
    let interior: Vec<f64> = bumps
        .iter()
        .zip(&sups)
        .filter(|(b, _)| b.center[0] > 0.3 && b.center[0] < 1.7)
        .map(|(_, &s)| s)
        .collect();
    let lo = interior.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi.is_finite() && hi > 0.0);
    assert!(hi / lo < 4.0, "member sups vary wildly: {sups:?}");
}

#[test]
fn derivatives_match_finite_differences_everywhere() {
    // 100 random probes per construction. The step scales with the
    // construction's feature size (a Whitney member at level k is a dyadic
    // rescaling of the unit-scale picture), and the tolerance is relative
    // to the derivative's scale over the probe set.
    let mut rng = synth::rng(23);
    let bumps = build_bumps(3, 1);
    let region = DyadicRegion::new(vec![-2], vec![2]).unwrap();
    let e = vec![vec![0.25], vec![0.75]];
    let dec = cz_decompose(&e, &region).unwrap();
    let thetas = whitney_partition(&dec, 3).unwrap();
    let unit = unit_partition(&[(0.0, 1.0)], 3);
    let theta_cube = dec.cube_containing(&[0.25]).unwrap();
    let handles: Vec<(nninterp::FunctionHandle, f64)> = vec![
        (bumps.chi.clone(), 1e-4),
        (bumps.phi.clone(), 1e-4),
        (bumps.phi_k(2), 0.25e-4),
        (
            // feature size is the dilate collar, sidelength / 128
            thetas[theta_cube].clone(),
            4e-4 * dec.cubes[theta_cube].sidelength() / 128.0,
        ),
        (unit[unit.len() / 2].handle.clone(), 0.5e-4),
    ];
    for (f, h) in &handles {
        let probes: Vec<[f64; 1]> = (0..100).map(|_| [rng.gen_range(-1.5..1.5)]).collect();
        let jets: Vec<_> = probes.iter().map(|x| f.jet_at(x, 2)).collect();
        for order in 0..=2usize {
            let alpha = MultiIndex(vec![order as u32]);
            let scale = jets
                .iter()
                .map(|j| j.coeff(&alpha).abs())
                .fold(1.0f64, f64::max);
            for (x, jet) in probes.iter().zip(&jets) {
                let exact = jet.coeff(&alpha);
                let fd = finite_difference(f, x, &alpha, *h);
                assert!(
                    (exact - fd).abs() <= 1e-5 * scale,
                    "|{exact} - {fd}| > 1e-5 * {scale} at {x:?}, order {order}"
                );
            }
        }
    }
}

#[test]
fn nonnegativity_closure_of_bump_handles() {
    let mut rng = synth::rng(31);
    let b = build_bumps(4, 2);
    for _ in 0..500 {
        let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        assert!(b.chi.eval(&x) >= 0.0);
        assert!(b.phi.eval(&x) >= 0.0);
    }
    for x in grid_points(&[(-1.0, 1.0), (-1.0, 1.0)], 41) {
        assert!(b.phi_k(3).eval(&x) >= 0.0);
    }
}
