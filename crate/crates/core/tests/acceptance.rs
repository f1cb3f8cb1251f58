//! Acceptance criteria, one pass/fail line each. Exits nonzero if any fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::Command as Process;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hrlab_core::constants::{check_constant_inequality, hardy_rellich_constant, rellich_constant};
use hrlab_core::engine::{disk_direct_lhs, factorization_residual, mode_lhs};
use hrlab_core::log_weights::LogWeightSpec;
use hrlab_core::output::{Cell, Table};
use hrlab_core::params::Parameters;
use hrlab_core::probe::{minimize_quotient, TrialFamily, LOWER_BOUND_TOL};
use hrlab_core::profile::random_poly_bump;
use hrlab_core::sweep::{
    run_constants, run_verify, Command, ListInput, SpecInput, SweepSpec, FACTOR_QUAD_TOL, FACTOR_RESIDUAL_TOL,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn floats(t: &Table, col: &str) -> Vec<f64> {
    t.values(col).into_iter().map(|c| c.as_f64().unwrap_or(f64::NAN)).collect()
}

fn criterion_1() -> Check {
    let t0 = Instant::now();
    let spec = SweepSpec::resolve(Command::Constants, SpecInput::default()).map_err(|e| e.to_string())?;
    let out = run_constants(&spec).map_err(|e| e.to_string())?;
    within(t0.elapsed(), Duration::from_secs(1))?;
    let expected = |n: u32| match n {
        2 => 0.0,
        3 => 25.0 / 36.0,
        4 => 3.0,
        _ => (n * n) as f64 / 4.0,
    };
    let ns = floats(&out.table, "n");
    let a = floats(&out.table, "A");
    let mut worst = 0.0f64;
    for (n, a) in ns.iter().zip(&a) {
        worst = worst.max((a - expected(*n as u32)).abs());
    }
    ensure(
        ns == (2..=12).map(f64::from).collect::<Vec<_>>() && worst <= 1e-12,
        format!("n=2..12, gamma=0: max |A - table| = {worst:.1e} (limit 1e-12) in {:.2?}", t0.elapsed()),
    )
}

fn criterion_2() -> Check {
    let a22 = hardy_rellich_constant(2, 2.0).value;
    let c22 = rellich_constant(2, 2.0).value;
    let c31 = rellich_constant(3, 1.0).value;
    ensure(a22 == 0.0 && c22 == 0.0 && c31 == 0.0, format!("A_(2,2) = {a22}, C_(2,2) = {c22}, C_(3,1) = {c31}"))
}

fn criterion_3() -> Check {
    let t0 = Instant::now();
    let spec = SweepSpec::resolve(Command::FactorCheck, SpecInput::default()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut count = 0;
    for (_, f) in spec.profiles() {
        for alpha in -2..=3 {
            for depth in 0..=3 {
                let log = LogWeightSpec::critical(depth, 1.0).map_err(|e| e.to_string())?;
                let c = factorization_residual(&f, alpha as f64, &log, FACTOR_QUAD_TOL).map_err(|e| e.to_string())?;
                worst = worst.max(c.residual);
                count += 1;
            }
        }
    }
    within(t0.elapsed(), Duration::from_secs(60))?;
    ensure(
        count == 100 * 6 * 4 && worst <= FACTOR_RESIDUAL_TOL,
        format!("{count} cases, max relative residual {worst:.2e} (limit 1e-8), single thread {:.2?}", t0.elapsed()),
    )
}

fn default_verify() -> Result<Table, String> {
    let spec = SweepSpec::resolve(Command::Verify, SpecInput::default()).map_err(|e| e.to_string())?;
    run_verify(&spec).map(|o| o.table).map_err(|e| e.to_string())
}

fn criterion_4() -> Check {
    let t0 = Instant::now();
    let table = default_verify()?;
    within(t0.elapsed(), Duration::from_secs(300))?;
    let suites = table.values("suite");
    let lhs = floats(&table, "lhs");
    let rhs = floats(&table, "rhs_total");
    let slack = floats(&table, "slack");
    let passed = table.values("passed");
    let mut counts = [0usize; 3];
    let mut worst = f64::INFINITY;
    let mut bad = 0;
    for i in 0..suites.len() {
        let k = match suites[i] {
            Cell::Text(s) if s == "lemma21" => 0,
            Cell::Text(s) if s == "theorem23" => 1,
            Cell::Text(s) if s == "rellich17" => 2,
            _ => continue,
        };
        counts[k] += 1;
        let magnitude = lhs[i].abs().max(rhs[i].abs());
        let rel = slack[i] / magnitude;
        worst = worst.min(rel);
        if !(slack[i] >= -1e-8 * magnitude) || passed[i].as_bool() != Some(true) {
            bad += 1;
        }
    }
    ensure(
        bad == 0 && counts.iter().all(|&c| c > 0),
        format!(
            "lemma21 {} / theorem23 {} / rellich17 {} reports, {bad} violations, min slack/magnitude {worst:.2e}, {:.2?}",
            counts[0],
            counts[1],
            counts[2],
            t0.elapsed()
        ),
    )
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let f = random_poly_bump(&mut rng, 1.0);
        let j = rng.gen_range(0..=5u32);
        let gamma = rng.gen_range(-2..=4) as f64;
        let p = Parameters::new(2, gamma, 0, 1.0, 1.0).validate().map_err(|e| e.to_string())?;
        let reduced = mode_lhs(&f, &p.mode(j), &p, 1e-12).map_err(|e| e.to_string())?.value;
        let direct = disk_direct_lhs(&f, j, gamma, 1e-12).map_err(|e| e.to_string())?.value;
        worst = worst.max((reduced - direct).abs() / direct.abs());
    }
    ensure(worst <= 1e-6, format!("30 disk cases, max relative difference {worst:.2e} (limit 1e-6)"))
}

fn criterion_6() -> Check {
    let mut worst = f64::INFINITY;
    let mut all = true;
    for n in 2..=8 {
        for g in -2..=4 {
            let r = check_constant_inequality(n, g as f64, 1000).map_err(|e| e.to_string())?;
            all &= r.holds;
            worst = worst.min(r.worst_relative_slack);
        }
    }
    ensure(all && worst >= -1e-9, format!("n=2..8, gamma=-2..4, j<=1000: min relative slack {worst:.2e}"))
}

fn criterion_7() -> Check {
    let t0 = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for (n, g, asserted) in
        [(5, 0.0, true), (4, 0.0, true), (3, 0.0, true), (6, 2.0, true), (2, 2.0, false), (3, 1.0, false)]
    {
        let p = Parameters::new(n, g, 0, 1.0, 1.0).validate().map_err(|e| e.to_string())?;
        let fam = TrialFamily::for_params(&p).map_err(|e| e.to_string())?;
        let r = minimize_quotient(&fam, &p, 2000).map_err(|e| e.to_string())?;
        let floor = r.target - LOWER_BOUND_TOL * (1.0 + r.target);
        ok &= r.min_evaluated >= floor && r.lower_bound_violations == 0;
        if asserted {
            ok &= r.within_target() && r.best_quotient <= 1.05 * r.target;
        }
        lines.push(format!(
            "({n},{g}) j={} {:.4}/{:.4}{}",
            r.mode_j,
            r.best_quotient,
            r.target,
            if asserted { "" } else { " [open, reported only]" }
        ));
    }
    within(t0.elapsed(), Duration::from_secs(300))?;
    ensure(ok, format!("{} in {:.2?}", lines.join(", "), t0.elapsed()))
}

fn criterion_8() -> Check {
    let status = Process::new(env!("CARGO_BIN_EXE_hrlab"))
        .args(["verify", "--debug-inflate-constant", "1.1", "--out"])
        .arg(std::env::temp_dir().join("hrlab-acceptance-8.csv"))
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.code() == Some(1), format!("inflated-constant verify exit code {:?} (expected 1)", status.code()))
}

fn criterion_9() -> Check {
    let input = SpecInput {
        n: Some(ListInput::Items(vec![2])),
        gamma: Some(ListInput::Items(vec![2.0])),
        big_n: Some(ListInput::Items(vec![1])),
        ..SpecInput::default()
    };
    let spec = SweepSpec::resolve(Command::Verify, input).map_err(|e| e.to_string())?;
    let table = run_verify(&spec).map_err(|e| e.to_string())?.table;
    let suites = table.values("suite");
    let lhs = floats(&table, "lhs");
    let rhs = floats(&table, "rhs_total");
    let mut count = 0;
    let mut worst = f64::INFINITY;
    for i in 0..suites.len() {
        if suites[i] != &Cell::from("theorem23") {
            continue;
        }
        count += 1;
        worst = worst.min(rhs[i] / lhs[i]);
    }
    ensure(
        count > 0 && worst > 1e-12,
        format!("(2,2), N=1: {count} theorem23 instances, min rhs_total/lhs {worst:.3e} (must exceed 1e-12)"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("constant table", criterion_1),
        ("vanishing constants", criterion_2),
        ("factorization identity", criterion_3),
        ("inequality slack suites", criterion_4),
        ("mode reduction on the disk", criterion_5),
        ("constant-level inequality", criterion_6),
        ("optimality probe", criterion_7),
        ("falsifiability", criterion_8),
        ("nontrivial refinement", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(msg) => println!("[PASS] criterion {}: {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
