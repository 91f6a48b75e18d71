//! Decomposition invariants against a brute-force enumeration oracle and
//! over random instances.

use nninterp::czdecomp::{
    classify_and_anchor, cz_decompose, is_ok, CubeType, CzDecomposition, DyadicCube, DyadicRegion,
};
use nninterp::synth;
use rand::Rng;
use std::collections::BTreeSet;
use std::time::Instant;

/// Every dyadic cube inside the region down to `min_level`, by full
/// enumeration (the oracle makes no use of the stopping-time recursion).
fn enumerate_all_cubes(region: &DyadicRegion, min_level: i32) -> Vec<DyadicCube> {
    let mut out = Vec::new();
    let n = region.dim();
    for level in (min_level..=0).rev() {
        let per_unit = 1i64 << (-level) as u32;
        let mut idx: Vec<i64> = region.lo.iter().map(|&l| l * per_unit).collect();
        let hi: Vec<i64> = region.hi.iter().map(|&h| h * per_unit).collect();
        'cubes: loop {
            out.push(DyadicCube::new(level, idx.clone()));
            let mut axis = n;
            loop {
                if axis == 0 {
                    break 'cubes;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < hi[axis] {
                    break;
                }
                idx[axis] = region.lo[axis] * per_unit;
            }
        }
    }
    out
}

/// Maximal OK cubes by exhaustive search: OK, and no OK strict dyadic
/// ancestor within the level-0 ceiling.
fn oracle_decomposition(
    points: &[Vec<f64>],
    region: &DyadicRegion,
    min_level: i32,
) -> BTreeSet<(i32, Vec<i64>)> {
    enumerate_all_cubes(region, min_level)
        .into_iter()
        .filter(|q| {
            if !is_ok(q, points) {
                return false;
            }
            let mut p = q.clone();
            while p.level < 0 {
                p = p.parent();
                if is_ok(&p, points) {
                    return false;
                }
            }
            true
        })
        .map(|q| (q.level, q.corner))
        .collect()
}

#[test]
fn close_pair_matches_enumeration_oracle() {
    let region = DyadicRegion::new(vec![-2], vec![2]).unwrap();
    let e = vec![vec![0.5], vec![0.5 + 2.0f64.powi(-6)]];
    let dec = cz_decompose(&e, &region).unwrap();
    assert!(dec.min_level() >= -10, "oracle depth covers the instance");
    let got: BTreeSet<(i32, Vec<i64>)> = dec
        .cubes
        .iter()
        .map(|q| (q.level, q.corner.clone()))
        .collect();
    let want = oracle_decomposition(&e, &region, -10);
    assert_eq!(got, want);

    // Anchors of type-1/2 cubes stay within a bounded multiple of the
    // sidelength.
    let dec = classify_and_anchor(dec, &e).unwrap();
    for i in 0..dec.len() {
        if let Some(anchor) = &dec.anchors[i] {
            let d = (anchor[0] - dec.cubes[i].center()[0]).abs();
            assert!(d <= 12.0 * dec.cubes[i].sidelength());
        }
    }
}

#[test]
fn two_dimensional_oracle_agreement() {
    let region = DyadicRegion::new(vec![-1, -1], vec![1, 1]).unwrap();
    let e = vec![vec![0.3, 0.4], vec![0.35, 0.4]];
    let dec = cz_decompose(&e, &region).unwrap();
    assert!(dec.min_level() >= -8);
    let got: BTreeSet<(i32, Vec<i64>)> = dec
        .cubes
        .iter()
        .map(|q| (q.level, q.corner.clone()))
        .collect();
    let want = oracle_decomposition(&e, &region, -8);
    assert_eq!(got, want);
}

fn validate_instance(dec: &CzDecomposition, points: &[Vec<f64>]) {
    assert!(dec.is_exact_partition(), "partition not exact");
    assert!(dec.is_maximal(points), "some cube not maximal OK");
    assert!(
        dec.good_geometry_violations().is_empty(),
        "good geometry violated"
    );
    assert!(dec.cubes.iter().all(|c| c.level <= 0));
}

#[test]
fn random_instances_keep_all_invariants() {
    for seed in 0..25u64 {
        let mut rng = synth::rng(seed);
        let n = 1 + (seed % 2) as usize;
        let started = Instant::now();
        let (points, _) = synth::random_dataset(&mut rng, n, 12, 3.0, 1.0);
        let region = DyadicRegion::padded_around(&points, n, 6);
        let dec = cz_decompose(&points, &region).unwrap();
        validate_instance(&dec, &points);
        let dec = classify_and_anchor(dec, &points).unwrap();
        for i in 0..dec.len() {
            match dec.types[i] {
                CubeType::Type1 => assert!(dec.anchors[i].is_some()),
                CubeType::Type2 => {
                    assert!(dec.anchors[i].is_some());
                    assert!(dec.cubes[i].level < 0);
                }
                CubeType::Type3 => {
                    assert!(dec.anchors[i].is_none());
                    assert_eq!(dec.cubes[i].level, 0);
                }
            }
        }
        assert!(
            started.elapsed().as_secs_f64() < 5.0,
            "seed {seed} took too long"
        );
    }
}

#[test]
fn refinement_is_monotone_under_new_points() {
    // Adding a point never enlarges the cube containing any location.
    for seed in 100..110u64 {
        let mut rng = synth::rng(seed);
        let (mut points, _) = synth::random_dataset(&mut rng, 1, 6, 2.0, 1.0);
        let region = DyadicRegion::padded_around(&points, 1, 7);
        let before = cz_decompose(&points, &region).unwrap();
        let extra = vec![rng.gen_range(0.25..1.75)];
        if points.contains(&extra) {
            continue;
        }
        points.push(extra);
        let after = cz_decompose(&points, &region).unwrap();
        for probe in [-1.3, 0.1, 0.77, 1.9] {
            let b = &before.cubes[before.cube_containing(&[probe]).unwrap()];
            let a = &after.cubes[after.cube_containing(&[probe]).unwrap()];
            assert!(
                a.level <= b.level,
                "seed {seed}: cube at {probe} grew from {b:?} to {a:?}"
            );
        }
    }
}

#[test]
fn ok_is_inherited_downward() {
    // If 5Q is inside 5Q' and Q' is OK, then Q is OK.
    let mut rng = synth::rng(5);
    for _ in 0..200 {
        let (points, _) = synth::random_dataset(&mut rng, 1, 8, 3.0, 1.0);
        let level = rng.gen_range(-4..=0);
        let corner = rng.gen_range(-8..8);
        let parent = DyadicCube::new(level, vec![corner]);
        for child in parent.children() {
            // 5(child) subset of 5(parent) holds for dyadic children.
            if is_ok(&parent, &points) {
                assert!(is_ok(&child, &points));
            }
        }
    }
}

#[test]
fn bounded_overlap_of_dilates() {
    let mut rng = synth::rng(9);
    for n in [1usize, 2] {
        let (points, _) = synth::random_dataset(&mut rng, n, 10, 2.0, 1.0);
        let region = DyadicRegion::padded_around(&points, n, 6);
        let dec = cz_decompose(&points, &region).unwrap();
        let bound = 4usize.pow(n as u32);
        for _ in 0..300 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..2.5)).collect();
            let count = dec
                .cubes
                .iter()
                .filter(|c| c.dilate_65_64_contains(&x))
                .count();
            assert!(count <= bound, "{count} dilates cover {x:?}");
        }
    }
}
