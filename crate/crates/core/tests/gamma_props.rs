//! Membership-class properties: level monotonicity, convexity, the dyadic
//! correction bounds, the jet-level patching closure, and an independent
//! one-parameter sweep oracle for completions.

use nninterp::gamma::{
    bk_sequence, gamma0plus_member, gamma_prime_member, gamma_tilde0_member, GammaConfig,
    MembershipStatus,
};
use nninterp::jets::{jet_multiply, Jet};
use nninterp::synth;
use rand::Rng;

#[test]
fn prime_membership_monotone_in_level() {
    let cfg = GammaConfig::default();
    let mut rng = synth::rng(41);
    for _ in 0..25 {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(1..=3);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let level = rng.gen_range(0.5..2.0);
        let p = synth::random_prime_member(&mut rng, n, m, &x, level, &cfg);
        for factor in [1.0, 1.5, 4.0, 32.0] {
            let v = gamma_prime_member(&p, &x, level * factor, None, &cfg).unwrap();
            assert!(
                v.is_member(),
                "accepted at {level} but rejected at {}",
                level * factor
            );
        }
    }
}

#[test]
fn prime_class_is_convex() {
    let cfg = GammaConfig::default();
    let mut rng = synth::rng(43);
    for _ in 0..25 {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(1..=3);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let level = 1.0;
        let p1 = synth::random_prime_member(&mut rng, n, m, &x, level, &cfg);
        let p2 = synth::random_prime_member(&mut rng, n, m, &x, level, &cfg);
        let mid = p1.add(&p2).unwrap().scale(0.5);
        let v = gamma_prime_member(&mid, &x, level * (1.0 + 1e-9), None, &cfg).unwrap();
        assert!(v.is_member(), "midpoint rejected: {v:?}");
    }
}

#[test]
fn certified_members_obey_dyadic_correction_bounds() {
    // For members of the model class, 0 <= b_k <= 2^{-mk} for k <= 20.
    let cfg = GammaConfig::default();
    let mut rng = synth::rng(47);
    for _ in 0..20 {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(1..=3);
        let p = synth::random_plus_member(&mut rng, n, m, &cfg);
        let b = bk_sequence(&p, 20, &cfg);
        for (k, &bk) in b.iter().enumerate() {
            assert!(bk >= 0.0);
            let bound = 2.0f64.powi(-((m * k) as i32));
            assert!(
                bk <= bound * (1.0 + 1e-9),
                "b_{k} = {bk} exceeds {bound} (m = {m})"
            );
        }
    }
}

#[test]
fn scaled_corrections_decay_and_vanish() {
    // b_k 2^{mk} is nonincreasing once the ball minimum turns positive, and
    // hits exactly zero at finite depth when P(0) > 0.
    let cfg = GammaConfig::default();
    let mut rng = synth::rng(53);
    for _ in 0..10 {
        let m = rng.gen_range(1..=3);
        let p = synth::random_plus_member(&mut rng, 1, m, &cfg);
        assert!(p.coeffs()[0] > 0.0, "generator keeps a positive value");
        let b = bk_sequence(&p, 24, &cfg);
        let first_zero = b.iter().position(|&v| v == 0.0);
        assert!(
            first_zero.is_some(),
            "corrections never vanish despite P(0) > 0: {b:?}"
        );
        let fz = first_zero.unwrap();
        assert!(b[fz..].iter().all(|&v| v == 0.0));
        let scaled: Vec<f64> = b
            .iter()
            .enumerate()
            .map(|(k, &v)| v * 2.0f64.powi((m * k) as i32))
            .collect();
        for k in (fz.max(1))..scaled.len() {
            assert!(scaled[k] <= scaled[k - 1] + 1e-12);
        }
    }
}

#[test]
fn patching_closure_at_jet_level() {
    // Combining accepted jets through a unit-quadrance weight pair lands in
    // the class at a bounded multiple of the level; the suite-wide factor
    // is reported.
    let cfg = GammaConfig::default();
    let mut rng = synth::rng(59);
    let mut worst_factor: f64 = 1.0;
    for _ in 0..60 {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(1..=3);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let level = 1.0;
        let delta = rng.gen_range(0.25..=1.0f64);
        let p1 = synth::random_prime_member(&mut rng, n, m, &x, level, &cfg);
        let p2 = synth::random_close_member(&mut rng, &p1, &x, level, delta, &cfg);
        let (q1, q2) = synth::random_weight_pair(&mut rng, n, m, &x, delta);
        let combo = jet_multiply(&jet_multiply(&q1, &q1).unwrap(), &p1)
            .unwrap()
            .add(&jet_multiply(&jet_multiply(&q2, &q2).unwrap(), &p2).unwrap())
            .unwrap();
        // find the smallest factor on a ladder that re-accepts
        let mut accepted = None;
        for factor in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
            let v = gamma_prime_member(&combo, &x, level * factor, None, &cfg).unwrap();
            if v.is_member() {
                accepted = Some(factor);
                break;
            }
        }
        let factor = accepted.expect("combination must re-enter the class at a bounded level");
        worst_factor = worst_factor.max(factor);
    }
    println!("patching closure: worst re-acceptance factor {worst_factor}");
    assert!(worst_factor <= 64.0);
}

#[test]
fn tilde0_agrees_with_parameter_sweep_oracle() {
    // n = 1: the completion is a single coefficient t with |m! t| <= 1.
    // Sweep t densely and decide membership by the direct degree-m test;
    // compare against the linear-programming route.
    let cfg = GammaConfig::default();
    let mut rng = synth::rng(61);
    let mut checked = 0;
    for _ in 0..40 {
        let m = rng.gen_range(1..=3usize);
        let count = nninterp::multiindex::count(1, (m - 1) as u32);
        let coeffs: Vec<f64> = (0..count)
            .map(|i| {
                let c: f64 = rng.gen_range(-1.2..1.2);
                if i == 0 {
                    c.abs() * 0.5
                } else {
                    c * 0.6
                }
            })
            .collect();
        let p = Jet::from_coeffs(&[0.0], m - 1, coeffs).unwrap();
        let lp_verdict = gamma_tilde0_member(&p, &cfg).unwrap();

        let mut sweep_member = false;
        let bound = 1.0 / nninterp::multiindex::factorial(m as u32);
        for i in 0..=200 {
            let t = -bound + 2.0 * bound * i as f64 / 200.0;
            let mut completed = p.embed(m);
            completed.set_coeff(
                &nninterp::multiindex::MultiIndex(vec![m as u32]),
                t * nninterp::multiindex::factorial(m as u32),
            );
            if gamma0plus_member(&completed, &cfg).unwrap().is_member() {
                sweep_member = true;
                break;
            }
        }
        match lp_verdict.status {
            MembershipStatus::Member => {
                assert!(sweep_member, "LP says member, sweep disagrees: {p:?}");
                checked += 1;
            }
            MembershipStatus::NonMember => {
                assert!(!sweep_member, "LP says nonmember, sweep found {p:?}");
                checked += 1;
            }
            MembershipStatus::Undetermined => {} // honest abstention
        }
    }
    assert!(checked >= 25, "too many undetermined outcomes: {checked}");
}

#[test]
fn undetermined_is_visible_for_marginal_tails() {
    // P = -x^2 (as a degree-2 jet, c2 = -2) violates the derivative box;
    // scale to c2 = -1: P + x^2 = x^2/2 >= 0 fine, eps condition fails.
    let cfg = GammaConfig::default();
    let p = Jet::from_coeffs(&[0.0], 2, vec![0.0, 0.0, -1.0]).unwrap();
    let v = gamma0plus_member(&p, &cfg).unwrap();
    assert_eq!(v.status, MembershipStatus::NonMember, "{v:?}");
}
