//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! `cargo test -p divbound --test acceptance -- --nocapture` shows the report.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use divbound::bounds::{
    bretagnolle_huber, check_monotone, hellinger_bound, invert, monotonicity, phi, Monotonicity,
};
use divbound::divergence::d_f;
use divbound::generator::{default_grid, dual, uniform_grid, Builtin};
use divbound::jointrange::{pair_on_stream, tightness_gap, verify_bound};
use divbound::measure::oracle::{mask_mass, subset_extrema, subset_masses, sup_abs_subset_mass};
use divbound::measure::{hahn_jordan, total_variation_norm, tv_distance, tv_via_density};
use divbound::{ExtendedReal, SignedMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fin(x: f64) -> ExtendedReal {
    ExtendedReal::Finite(x)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// 1. φ(TV/2) ≤ D_f + 1e-9 on 10,000 seeded pairs per generator, supports 2..=8, under 30 s.
fn proposition_soundness() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::NEG_INFINITY;
    for g in Builtin::ALL {
        let report =
            verify_bound(&g.generator::<f64>(), 10_000, 8, 2024).map_err(|e| e.to_string())?;
        ensure(report.trials == 10_000, || {
            format!("{g}: ran {} trials", report.trials)
        })?;
        ensure(report.max_violation <= 1e-9, || {
            format!("{g}: max violation {:e}", report.max_violation)
        })?;
        worst = worst.max(report.max_violation);
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("max violation {worst:.3e} in {elapsed:.2?}"))
}

/// 2. invert(SH, d) = 2√(1 − e^{−d}) within 1e-8 and 2√(1 − e^{−d}) ≤ 2√d + 1e-12, d on 1,000 points of [0, 10].
fn bretagnolle_huber_equivalence() -> Outcome {
    let sh = Builtin::Shannon.generator::<f64>();
    let mut max_err: f64 = 0.0;
    for d in uniform_grid::<f64>(0.0, 10.0, 999) {
        let closed = 2.0 * (1.0 - (-d).exp()).sqrt();
        let numeric = invert(&sh, fin(d))
            .map_err(|e| e.to_string())?
            .tv_upper_bound;
        max_err = max_err.max((numeric - closed).abs());
        ensure((numeric - closed).abs() <= 1e-8, || {
            format!("d = {d}: {numeric} vs {closed}")
        })?;
        ensure(closed <= 2.0 * d.sqrt() + 1e-12, || {
            format!("d = {d}: tight form exceeds 2 sqrt(d)")
        })?;
        let (tight, loose) = bretagnolle_huber(fin(d)).map_err(|e| e.to_string())?;
        ensure(
            (tight - closed).abs() <= 1e-12 && tight <= loose + 1e-12,
            || format!("d = {d}: corollary pair"),
        )?;
    }
    Ok(format!("max |invert - closed form| = {max_err:.3e}"))
}

/// 3. Hellinger closed form at {0, 0.25, 1, 2} and dominance of the numeric inversion on [0, 2].
fn hellinger_corollary() -> Outcome {
    for (he, expect) in [(0.0, 0.0), (0.25, 1.5), (1.0, 2.0), (2.0, 2.0)] {
        let got = hellinger_bound(fin(he)).map_err(|e| e.to_string())?;
        ensure(got == expect, || {
            format!("hellinger_bound({he}) = {got}, expected {expect}")
        })?;
    }
    let he = Builtin::Hellinger.generator::<f64>();
    let mut min_margin = f64::INFINITY;
    for d in uniform_grid::<f64>(0.0, 2.0, 2000) {
        let numeric = invert(&he, fin(d))
            .map_err(|e| e.to_string())?
            .tv_upper_bound;
        let closed = hellinger_bound(fin(d)).map_err(|e| e.to_string())?;
        ensure(numeric <= closed + 1e-8, || {
            format!("d = {d}: {numeric} > {closed}")
        })?;
        min_margin = min_margin.min(closed - numeric);
    }
    Ok(format!(
        "closed form exact at 4 points; min margin {min_margin:.3e}"
    ))
}

/// 4. Hahn–Jordan against exhaustive enumeration on 500 measures with n ≤ 12, under 60 s.
fn hahn_jordan_enumeration() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut balanced_count = 0;
    for case in 0..500 {
        let n = rng.gen_range(1..=12usize);
        // k / 1024 weights keep every subset sum exact
        let mut k: Vec<i64> = (0..n).map(|_| rng.gen_range(-1024..=1024)).collect();
        let balanced = case % 2 == 0 && n >= 2;
        if balanced {
            let rest: i64 = k[..n - 1].iter().sum();
            k[n - 1] = -rest;
        }
        let nu =
            SignedMeasure::from_weights(&k.iter().map(|&k| k as f64 / 1024.0).collect::<Vec<_>>())
                .map_err(|e| e.to_string())?;
        let h = hahn_jordan(&nu);
        let masses = subset_masses(&nu).map_err(|e| e.to_string())?;
        for a in 0..(1u32 << n) {
            let (sup, inf) = subset_extrema(&masses, a);
            ensure(mask_mass(&h.upper, a) == sup, || {
                format!("case {case}: upper({a:b}) != sup")
            })?;
            ensure(mask_mass(&h.lower, a) == -inf, || {
                format!("case {case}: lower({a:b}) != -inf")
            })?;
        }
        let norm = total_variation_norm(&nu);
        ensure(norm == h.upper_mass() + h.lower_mass(), || {
            format!("case {case}: norm")
        })?;
        if balanced {
            ensure(nu.total_mass() == 0.0, || {
                format!("case {case}: not balanced")
            })?;
            let sup_abs = sup_abs_subset_mass(&nu).map_err(|e| e.to_string())?;
            ensure(norm == 2.0 * sup_abs, || {
                format!("case {case}: {norm} != 2 * {sup_abs}")
            })?;
            balanced_count += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "500 measures ({balanced_count} balanced) exact in {elapsed:.2?}"
    ))
}

/// 5. tv_distance = tv_via_density = D_TV within 1e-12 on 10,000 pairs with μ ≪ ν.
fn representation_agreement() -> Outcome {
    let tv_gen = Builtin::TotalVariation.generator::<f64>();
    let mut max_dev: f64 = 0.0;
    for trial in 0..10_000u64 {
        let (mu, nu) =
            pair_on_stream::<f64>(2 + (trial % 7) as usize, 5, trial).map_err(|e| e.to_string())?;
        let a = tv_distance(&mu, &nu);
        let b = tv_via_density(&mu, &nu).map_err(|e| e.to_string())?;
        let c = d_f(&tv_gen, &mu, &nu)
            .map_err(|e| e.to_string())?
            .value
            .to_float();
        let dev = (a - b).abs().max((a - c).abs());
        max_dev = max_dev.max(dev);
        ensure(dev <= 1e-12, || format!("trial {trial}: {a}, {b}, {c}"))?;
    }
    Ok(format!("max deviation {max_dev:.3e}"))
}

/// 6. invert(TV, d) = min(d, 2) within 1e-10 on [0, 3]; tightness gap at resolution 2000 ≤ 1e-6.
fn tv_self_tightness() -> Outcome {
    let tv_gen = Builtin::TotalVariation.generator::<f64>();
    for d in uniform_grid::<f64>(0.0, 3.0, 3000) {
        let got = invert(&tv_gen, fin(d))
            .map_err(|e| e.to_string())?
            .tv_upper_bound;
        ensure((got - d.min(2.0)).abs() <= 1e-10, || {
            format!("d = {d}: {got}")
        })?;
    }
    let mut worst: f64 = f64::NEG_INFINITY;
    for d in uniform_grid::<f64>(0.0, 3.0, 12) {
        let gap = tightness_gap(&tv_gen, d, 2000).map_err(|e| e.to_string())?;
        ensure(gap.gap <= 1e-6, || format!("d = {d}: {gap:?}"))?;
        worst = worst.max(gap.gap);
    }
    Ok(format!(
        "inversion exact on 3001 points; worst gap {worst:.3e}"
    ))
}

/// 7. φ_PE = 2t², φ_TV = 2t within 1e-12 on 1,001 points; strict monotonicity for KL, SH, HE, PE.
fn closed_form_phi() -> Outcome {
    let pe = Builtin::Pearson.generator::<f64>();
    let tv = Builtin::TotalVariation.generator::<f64>();
    for t in uniform_grid::<f64>(0.0, 1.0, 1000) {
        let a = phi(&pe, t).map_err(|e| e.to_string())?.to_float();
        let b = phi(&tv, t).map_err(|e| e.to_string())?.to_float();
        ensure((a - 2.0 * t * t).abs() <= 1e-12, || {
            format!("phi_PE({t}) = {a}")
        })?;
        ensure((b - 2.0 * t).abs() <= 1e-12, || {
            format!("phi_TV({t}) = {b}")
        })?;
    }
    for g in [
        Builtin::KullbackLeibler,
        Builtin::Shannon,
        Builtin::Hellinger,
        Builtin::Pearson,
    ] {
        let f = g.generator::<f64>();
        ensure(
            check_monotone(&f, 1001) && monotonicity(&f, 1001) == Monotonicity::Strict,
            || format!("{g} not strictly monotone"),
        )?;
    }
    Ok("closed forms hold; KL, SH, HE, PE strictly increasing".into())
}

/// 8. D_{f*}(μ, ν) = D_f(ν, μ) within 1e-12 on 1,000 pairs; dual(dual(f)) = f within 1e-10 on the grid.
fn duality() -> Outcome {
    let grid = default_grid::<f64>();
    let mut max_dev: f64 = 0.0;
    for g in Builtin::ALL {
        let f = g.generator::<f64>();
        let fs = dual(&f);
        for trial in 0..1000u64 {
            let (mu, nu) = pair_on_stream::<f64>(2 + (trial % 7) as usize, 8, trial)
                .map_err(|e| e.to_string())?;
            let a = d_f(&fs, &mu, &nu)
                .map_err(|e| e.to_string())?
                .value
                .to_float();
            let b = d_f(&f, &nu, &mu)
                .map_err(|e| e.to_string())?
                .value
                .to_float();
            max_dev = max_dev.max((a - b).abs());
            ensure((a - b).abs() <= 1e-12, || {
                format!("{g} trial {trial}: {a} vs {b}")
            })?;
        }
        let ff = dual(&fs);
        for &x in &grid {
            let (a, b) = (f.eval(x), ff.eval(x));
            ensure(
                a == b || (a.to_float() - b.to_float()).abs() <= 1e-10,
                || format!("{g}: dual(dual(f))({x}) = {b}, f = {a}"),
            )?;
        }
    }
    Ok(format!("max swap deviation {max_dev:.3e}"))
}

/// 9. CLI goldens for compute, bound, invert, decompose, and exit codes 2 and 3.
fn cli_contract() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let cases: [(&str, &[&str], i32); 12] = [
        (
            "compute_kl",
            &[
                "compute",
                "--gen",
                "kl",
                "--mu",
                "tests/fixtures/bernoulli_half.json",
                "--nu",
                "tests/fixtures/bernoulli_quarter.json",
            ],
            0,
        ),
        (
            "compute_identical",
            &[
                "compute",
                "--gen",
                "he",
                "--mu",
                "tests/fixtures/bernoulli_quarter.json",
                "--nu",
                "tests/fixtures/bernoulli_quarter.csv",
            ],
            0,
        ),
        ("bound_tv", &["bound", "--gen", "tv", "--tv", "0.5"], 0),
        ("invert_sh", &["invert", "--gen", "sh", "--d", "0.1"], 0),
        ("invert_pe", &["invert", "--gen", "pe", "--d", "0.5"], 0),
        ("invert_kl_inf", &["invert", "--gen", "kl", "--d", "inf"], 0),
        (
            "decompose_json",
            &["decompose", "--nu", "tests/fixtures/signed_three.json"],
            0,
        ),
        (
            "compute_not_abs_continuous",
            &[
                "compute",
                "--gen",
                "sh",
                "--mu",
                "tests/fixtures/bernoulli_half.json",
                "--nu",
                "tests/fixtures/point_mass.json",
            ],
            3,
        ),
        (
            "compute_nan_weight",
            &[
                "compute",
                "--gen",
                "kl",
                "--mu",
                "tests/fixtures/nan_weight.csv",
                "--nu",
                "tests/fixtures/bernoulli_half.json",
            ],
            2,
        ),
        (
            "compute_duplicate_id",
            &[
                "compute",
                "--gen",
                "kl",
                "--mu",
                "tests/fixtures/duplicate_id.json",
                "--nu",
                "tests/fixtures/bernoulli_half.json",
            ],
            2,
        ),
        (
            "invert_malformed",
            &["invert", "--gen", "kl", "--d", "nope"],
            2,
        ),
        (
            "invert_negative",
            &["invert", "--gen", "kl", "--d", "-0.5"],
            3,
        ),
    ];
    for (name, args, code) in cases {
        let out = Command::new(env!("CARGO_BIN_EXE_divbound"))
            .args(args)
            .current_dir(&dir)
            .env_remove("DIVBOUND_PRECISION")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(code), || {
            format!("{name}: exit {:?}, expected {code}", out.status.code())
        })?;
        let golden = std::fs::read(dir.join("tests/golden").join(format!("{name}.out")))
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(out.stdout == golden, || {
            format!("{name}: stdout differs from golden")
        })?;
    }
    // numeric sanity of the goldens themselves
    let kl: f64 = std::fs::read_to_string(dir.join("tests/golden/compute_kl.out"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    ensure((kl - 0.143841).abs() <= 1e-6, || {
        format!("compute_kl printed {kl}")
    })?;
    let sh: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("tests/golden/invert_sh.out")).unwrap())
            .unwrap();
    let bh = 2.0 * (1.0 - (-0.1f64).exp()).sqrt();
    ensure(
        (sh["tv_upper_bound"].as_f64().unwrap() - bh).abs() <= 1e-8,
        || "invert_sh golden".into(),
    )?;
    Ok(format!("{} golden cases", cases.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("1 proposition soundness sweep", proposition_soundness),
        (
            "2 Bretagnolle-Huber equivalence",
            bretagnolle_huber_equivalence,
        ),
        ("3 Hellinger closed form", hellinger_corollary),
        ("4 Hahn-Jordan brute force", hahn_jordan_enumeration),
        ("5 TV representation agreement", representation_agreement),
        ("6 TV self-tightness", tv_self_tightness),
        ("7 closed-form phi and monotonicity", closed_form_phi),
        ("8 duality", duality),
        ("9 CLI contract", cli_contract),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                println!("FAIL  criterion {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
