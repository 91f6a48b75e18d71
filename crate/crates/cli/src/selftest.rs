//! Built-in invariant suites: a compact, seeded subset of the library's
//! property checks, one line of output per suite.

use crate::CliError;
use nninterp::czdecomp::{cz_decompose, DyadicRegion};
use nninterp::feasibility::{helly_check, min_norm, ConvexSet, FeasConfig};
use nninterp::gamma::{gamma0plus_member, gamma_prime_member, GammaConfig};
use nninterp::jets::{jet_multiply, Jet};
use nninterp::lp::LpRow;
use nninterp::smoothfn::whitney_partition;
use nninterp::synth;
use rand::Rng;
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

pub fn run(seed: u64, out: Option<PathBuf>) -> Result<(), CliError> {
    let started = Instant::now();
    let mut results: Vec<(&str, bool, String)> = Vec::new();

    results.push(jets_suite(seed));
    results.push(gamma_suite(seed));
    results.push(decomposition_suite(seed));
    results.push(partition_suite(seed));
    results.push(lipschitz_suite(seed));
    results.push(helly_suite());

    let mut all_ok = true;
    for (name, ok, details) in &results {
        println!("{}: {} - {}", name, if *ok { "ok" } else { "FAILED" }, details);
        all_ok &= ok;
    }

    if let Some(dir) = out {
        let mut writer = crate::manifest::RunWriter::new(&dir)
            .map_err(|e| CliError::Input(format!("{e:#}")))?;
        let table: Vec<_> = results
            .iter()
            .map(|(name, ok, details)| json!({"suite": name, "ok": ok, "details": details}))
            .collect();
        writer
            .write_json("selftest.json", &table)
            .map_err(|e| CliError::Input(format!("{e:#}")))?;
        writer
            .finish(
                "selftest",
                json!({ "seed": seed }),
                None,
                json!({"all_ok": all_ok}),
                started,
            )
            .map_err(|e| CliError::Input(format!("{e:#}")))?;
    }
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Verification("selftest suites failed".into()))
    }
}

fn jets_suite(seed: u64) -> (&'static str, bool, String) {
    let mut rng = synth::rng(seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let dim = rng.gen_range(1..=2);
        let degree = rng.gen_range(0..=3);
        let base: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let count = nninterp::multiindex::count(dim, degree as u32);
        let coeffs: Vec<f64> = (0..count).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let p = Jet::from_coeffs(&base, degree, coeffs).unwrap();
        let coeffs: Vec<f64> = (0..count).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let q = Jet::from_coeffs(&base, degree, coeffs).unwrap();
        let pq = jet_multiply(&p, &q).unwrap();
        let qp = jet_multiply(&q, &p).unwrap();
        let scale = pq.max_abs_coeff().max(1.0);
        for (a, b) in pq.coeffs().iter().zip(qp.coeffs()) {
            worst = worst.max((a - b).abs() / scale);
        }
        // rebase round trip
        let to: Vec<f64> = base.iter().map(|b| b + 0.7).collect();
        let back = p.rebase(&to).rebase(&base);
        for (a, b) in p.coeffs().iter().zip(back.coeffs()) {
            worst = worst.max((a - b).abs() / p.max_abs_coeff().max(1.0));
        }
    }
    (
        "jets",
        worst <= 1e-10,
        format!("commutativity and rebase round trips, worst deviation {worst:.2e}"),
    )
}

fn gamma_suite(seed: u64) -> (&'static str, bool, String) {
    let cfg = GammaConfig::default();
    let mut rng = synth::rng(seed.wrapping_add(2));
    let mut ok = true;
    // trivial pins
    ok &= gamma0plus_member(&Jet::zero(1, 2, &[0.0]), &cfg)
        .map(|v| v.is_member())
        .unwrap_or(false);
    ok &= !gamma_prime_member(&Jet::constant(1, 0, &[0.0], 2.0), &[0.0], 1.0, None, &cfg)
        .map(|v| v.is_member())
        .unwrap_or(true);
    // monotonicity in the level on random members
    for _ in 0..5 {
        let p = synth::random_prime_member(&mut rng, 1, 2, &[0.2], 1.0, &cfg);
        ok &= gamma_prime_member(&p, &[0.2], 4.0, None, &cfg)
            .map(|v| v.is_member())
            .unwrap_or(false);
    }
    ("gamma", ok, "membership pins and level monotonicity".into())
}

fn decomposition_suite(seed: u64) -> (&'static str, bool, String) {
    let mut rng = synth::rng(seed.wrapping_add(3));
    let mut cubes = 0;
    for _ in 0..5 {
        let n = rng.gen_range(1..=2);
        let (points, _) = synth::random_dataset(&mut rng, n, 10, 2.0, 1.0);
        let region = DyadicRegion::padded_around(&points, n, 6);
        let dec = match cz_decompose(&points, &region) {
            Ok(d) => d,
            Err(e) => return ("decomposition", false, e.to_string()),
        };
        if !dec.is_exact_partition()
            || !dec.is_maximal(&points)
            || !dec.good_geometry_violations().is_empty()
        {
            return ("decomposition", false, "invariant violated".into());
        }
        cubes += dec.len();
    }
    (
        "decomposition",
        true,
        format!("partition, maximality, good geometry over 5 instances ({cubes} cubes)"),
    )
}

fn partition_suite(seed: u64) -> (&'static str, bool, String) {
    let mut rng = synth::rng(seed.wrapping_add(4));
    let mut worst = 0.0f64;
    for _ in 0..2 {
        let (points, _) = synth::random_dataset(&mut rng, 1, 6, 2.0, 1.0);
        let region = DyadicRegion::padded_around(&points, 1, 6);
        let dec = cz_decompose(&points, &region).unwrap();
        let thetas = match whitney_partition(&dec, 2) {
            Ok(t) => t,
            Err(e) => return ("partition", false, e.to_string()),
        };
        for _ in 0..300 {
            let x = [rng.gen_range(-1.0..3.0)];
            let sum: f64 = thetas.iter().map(|t| t.eval(&x)).sum();
            worst = worst.max((sum - 1.0).abs());
            if thetas.iter().any(|t| t.eval(&x) < 0.0) {
                return ("partition", false, "negative member".into());
            }
        }
    }
    (
        "partition",
        worst <= 1e-9,
        format!("unit sums within {worst:.2e}"),
    )
}

fn lipschitz_suite(seed: u64) -> (&'static str, bool, String) {
    let cfg = FeasConfig {
        certificates: false,
        ..FeasConfig::default()
    };
    let mut rng = synth::rng(seed.wrapping_add(5));
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let (points, values) = synth::random_dataset(&mut rng, 1, 6, 2.0, 1.5);
        let mut oracle = values.iter().cloned().fold(0.0f64, f64::max);
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                oracle = oracle
                    .max((values[i] - values[j]).abs() / (points[i][0] - points[j][0]).abs());
            }
        }
        if oracle == 0.0 {
            continue;
        }
        match min_norm(&points, &values, 1, &cfg) {
            Ok(mn) => worst = worst.max((mn.level - oracle).abs() / oracle),
            Err(e) => return ("lipschitz", false, e.to_string()),
        }
    }
    (
        "lipschitz",
        worst <= 5e-3,
        format!("minimal level vs closed form, worst deviation {worst:.2e}"),
    )
}

fn helly_suite() -> (&'static str, bool, String) {
    let sets = vec![
        ConvexSet::new(vec![LpRow::ge(vec![1.0, 0.0], 0.0)]),
        ConvexSet::new(vec![LpRow::ge(vec![0.0, 1.0], 0.0)]),
        ConvexSet::new(vec![LpRow::ge(vec![-1.0, -1.0], 1.0)]),
    ];
    match helly_check(&sets, 2) {
        Ok(r) => (
            "helly",
            !r.all_tuples_nonempty && !r.full_nonempty && r.consistent,
            "planar counterexample behaves".into(),
        ),
        Err(e) => ("helly", false, e.to_string()),
    }
}
