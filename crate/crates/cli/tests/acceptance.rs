//! Acceptance suite: one PASS/FAIL line per criterion with its runtime.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are still run and printed as FAIL
//! when they fail, but do not fail the process unless
//! `QGIBBS_ACCEPTANCE_STRICT=1`. Criterion 8 needs `QGIBBS_GDP_CSV` pointing
//! at a `period,gdp_growth,climate` file and is reported, never gating.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use qgibbs::gibbs::{ParamVector, ProposalDraws, SamplerConfig};
use qgibbs::lab::{
    closed_form_remainder, dv_batch, is_convex_on_grid, log_grid, oracle_experiment, oracle_remainder,
    rio_mgf_check, MgfProcess, OracleConfig, Verdict,
};
use qgibbs::losses::LossFn;
use qgibbs::online::{coverage_table, error_metrics, records_for_tau, rolling_forecast, RollingConfig};
use qgibbs::series::{gen_synthetic, load_csv, CsvSchema, Design, FeatureMap, SyntheticSpec};
use qgibbs::stats::empirical_quantile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DV_GAP_TOL: f64 = 1e-12;
const DV_SOLVER_TOL: f64 = 1e-6;
const GRID_MEAN_TOL: f64 = 0.01;
const COVERAGE_TOL: f64 = 0.10;
const CLOSED_FORM_TARGET: f64 = 37.838;
const CLOSED_FORM_TOL: f64 = 1e-3;
const GDP_TARGET_MAE: f64 = 0.2236;
const GDP_TARGET_COVERAGE: [f64; 5] = [0.065, 0.434, 0.608, 0.848, 0.978];

/// The hand evaluation `6 · [2.25 + 4.0563]` rounds `log(57.735)`; the exact
/// closed form gives 37.83518, outside the 10⁻³ tolerance.
const KNOWN_UNATTAINABLE: &[u32] = &[6];

type Check = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn c1() -> Outcome {
    let t = Instant::now();
    let r = dv_batch(100, 50, 11).expect("dv batch");
    let el = t.elapsed();
    let pass = r.max_closed_form_gap < DV_GAP_TOL && r.max_numerical_excess <= DV_SOLVER_TOL && within(el, 10.0);
    outcome(
        pass,
        format!(
            "max |lhs - rhs_gibbs| = {:.3e} (< {DV_GAP_TOL:e}), max numerical excess = {:.3e} (<= {DV_SOLVER_TOL:e})",
            r.max_closed_form_gap, r.max_numerical_excess
        ),
    )
}

fn pinball(tau: f64, u: f64) -> f64 {
    if u >= 0.0 {
        tau * u
    } else {
        (tau - 1.0) * u
    }
}

fn c2() -> Outcome {
    let t = Instant::now();
    let ys = [0.31, -0.12, 0.55, 0.08, 0.9, -0.4, 0.22, 0.47, 0.05, 0.63, -0.2, 0.35];
    let tau = 0.5;
    let design = Design::from_parts(1, vec![1.0; ys.len()], ys.to_vec()).unwrap();
    let loss = LossFn::quantile(tau).unwrap();
    let radius = 2.0;
    let draws = ProposalDraws::draw(&ParamVector(vec![0.3]), radius, &SamplerConfig::with_samples(1_000_000), 2024)
        .expect("draws");
    let risks = draws.risks(&loss, design.view()).unwrap();
    let risk = |th: f64| ys.iter().map(|y| pinball(tau, y - th)).sum::<f64>() / ys.len() as f64;
    let cells = 201;
    let h = 2.0 * radius / cells as f64;
    let grid: Vec<f64> = (0..cells).map(|i| -radius + h * (i as f64 + 0.5)).collect();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for lambda in [1.0, 10.0, 100.0] {
        let est = draws.estimate(&risks, lambda).unwrap().theta_hat.0[0];
        let logw: Vec<f64> = grid.iter().map(|&g| -lambda * risk(g)).collect();
        let m = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logw.iter().map(|l| (l - m).exp()).collect();
        let exact = grid.iter().zip(&w).map(|(g, w)| g * w).sum::<f64>() / w.iter().sum::<f64>();
        worst = worst.max((est - exact).abs());
        parts.push(format!("λ={lambda}: IS {est:.5} grid {exact:.5}"));
    }
    let el = t.elapsed();
    outcome(
        worst < GRID_MEAN_TOL && within(el, 30.0),
        format!("{}; max err {worst:.4} (< {GRID_MEAN_TOL})", parts.join(", ")),
    )
}

fn c3() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let steps = 20_000;
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for _ in 0..50 {
        let len = rng.random_range(1..=200);
        let sample: Vec<f64> = (0..len).map(|_| rng.random_range(-10.0..10.0)).collect();
        for tau in [0.05, 0.25, 0.5, 0.75, 0.95] {
            let q = empirical_quantile(&sample, tau).unwrap();
            let total = |x: f64| sample.iter().map(|&y| pinball(tau, y - x)).sum::<f64>();
            let (lo, hi) = (-10.5, 10.5);
            let step = (hi - lo) / steps as f64;
            let grid_min = (0..=steps).map(|i| total(lo + step * i as f64)).fold(f64::INFINITY, f64::min);
            // Slopes are bounded by the sample size, so grid points can undercut
            // the true minimum by at most len · step / 2.
            let resolution = len as f64 * step / 2.0;
            let gap = total(q) - grid_min;
            ok &= gap <= 1e-9 * (1.0 + grid_min) && gap >= -resolution - 1e-9;
            worst = worst.max(gap / resolution.max(1e-300));
        }
    }
    let el = t.elapsed();
    outcome(
        ok && within(el, 10.0),
        format!("250 cases; worst (loss(q) - grid min) / resolution = {worst:.3} (must lie in [-1, 0])"),
    )
}

fn c4() -> Outcome {
    let t = Instant::now();
    let r = rio_mgf_check(MgfProcess::IidUniform { b: 1.0 }, 50, &[0.05, 0.1, 0.2], 100_000, 4).expect("mgf");
    let el = t.elapsed();
    let cells_ok = r.cells.iter().all(|c| c.verdict == Verdict::Pass && c.mc_mean >= 1.0);
    let detail = r
        .cells
        .iter()
        .map(|c| format!("t={}: {:.4}±{:.4} <= {:.4}", c.t, c.mc_mean, 3.0 * c.mc_se, c.bound))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(cells_ok && within(el, 60.0), detail)
}

fn c5() -> Outcome {
    let r = oracle_experiment(&OracleConfig::default()).expect("oracle experiment");
    let p = &r.per_tau[0];
    outcome(
        r.pass,
        format!(
            "M={} n={} λ={:.4} bound={:.4}; violation rate {:.4} <= {:.4}",
            r.config.replications, r.config.spec.length, p.lambda, p.bound, p.violation_rate, p.threshold
        ),
    )
}

fn c6() -> Outcome {
    let value = closed_form_remainder(300, 30.0, 99.0, 1.0, 1.0).expect("closed form");
    let arithmetic = (value - CLOSED_FORM_TARGET).abs() <= CLOSED_FORM_TOL;
    let grid = log_grid(1e-3, 1e4, 50).unwrap();
    let ys: Vec<f64> = grid.iter().map(|&l| oracle_remainder(l, 100, 2, 1.0, 3.0, 0.1).unwrap()).collect();
    let convex = is_convex_on_grid(&grid, &ys, 1e-9);
    outcome(
        arithmetic && convex,
        format!(
            "closed form = {value:.6} vs {CLOSED_FORM_TARGET} ± {CLOSED_FORM_TOL} [{}]; convex on 50-point log grid [{}]",
            if arithmetic { "ok" } else { "off" },
            if convex { "ok" } else { "off" }
        ),
    )
}

fn c7() -> Outcome {
    let s = gen_synthetic(&SyntheticSpec::ar1(0.5, 1.0, 400, 7)).unwrap();
    let taus: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
    let cfg = RollingConfig {
        taus,
        ball: 2.0,
        sampler: SamplerConfig::with_samples(5000),
        seed: 1,
        start: Some(s.period(100)),
        feature_map: FeatureMap::Autoregressive { order: 1 },
        target: 0,
    };
    let bt = rolling_forecast(&s, &cfg).expect("backtest");
    let table = coverage_table(&bt.records).unwrap();
    let worst = table.iter().map(|r| (r.frequency - r.tau).abs()).fold(0.0, f64::max);
    let show = table
        .iter()
        .filter(|r| [0.05, 0.25, 0.5, 0.75, 0.95].iter().any(|t| (t - r.tau).abs() < 1e-9))
        .map(|r| format!("{:.2}:{:.3}", r.tau, r.frequency))
        .collect::<Vec<_>>()
        .join(" ");
    outcome(
        worst <= COVERAGE_TOL,
        format!(
            "19 levels, {} periods; max |freq - τ| = {worst:.4} (<= {COVERAGE_TOL}); {show}",
            table[0].count
        ),
    )
}

fn c8() -> Option<String> {
    let path = std::env::var_os("QGIBBS_GDP_CSV")?;
    let s = load_csv(&path, &CsvSchema::gdp()).expect("GDP CSV");
    let cfg = RollingConfig {
        start: Some("2000Q1".parse().unwrap()),
        ..RollingConfig::default()
    };
    let bt = rolling_forecast(&s, &cfg).expect("backtest");
    let m = error_metrics(&records_for_tau(&bt.records, 0.5)).unwrap();
    let cov: Vec<String> = coverage_table(&bt.records)
        .unwrap()
        .iter()
        .zip(GDP_TARGET_COVERAGE)
        .map(|(r, target)| format!("{}:{:.3} (ref {target})", r.tau, r.frequency))
        .collect();
    Some(format!(
        "MAE {:.4} (ref {GDP_TARGET_MAE}), MSE {:.4}; coverage {}",
        m.mae,
        m.mse,
        cov.join(", ")
    ))
}

fn run_cli(args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_qgibbs"))
        .args(args)
        .output()
        .expect("spawn qgibbs");
    assert!(status.status.success(), "qgibbs {args:?}: {}", String::from_utf8_lossy(&status.stderr));
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (PathBuf::from(p.file_name().unwrap()), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn c9() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let sim = root.join("sim");
    run_cli(&["simulate", "--n", "80", "--seed", "5", "--out", sim.to_str().unwrap()]);
    let data = sim.join("synthetic.csv");
    let mut same = true;
    let mut counted = 0;
    for cmd in ["backtest", "verify"] {
        let runs: Vec<_> = (0..2)
            .map(|i| {
                let out = root.join(format!("{cmd}{i}"));
                let out_s = out.to_str().unwrap().to_string();
                let mut args = vec![cmd, "--seed", "9", "--out", &out_s];
                let data_s = data.to_str().unwrap();
                if cmd == "backtest" {
                    args.extend(["--data", data_s, "--model", "ar1", "--B", "2", "--samples", "3000", "--svg"]);
                }
                run_cli(&args);
                files(&out)
            })
            .collect();
        counted += runs[0].len();
        same &= !runs[0].is_empty() && runs[0] == runs[1];
    }
    outcome(same, format!("{counted} artifacts compared byte-for-byte across two runs"))
}

fn main() {
    let strict = std::env::var("QGIBBS_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let checks: [Check; 8] = [
        (1, "variational identity", c1),
        (2, "finite-grid Gibbs oracle", c2),
        (3, "pinball minimizer", c3),
        (4, "MGF bound, iid uniform", c4),
        (5, "oracle inequality replication", c5),
        (6, "bound arithmetic", c6),
        (7, "synthetic coverage", c7),
        (9, "determinism", c9),
    ];
    let mut blocking = Vec::new();
    for (id, name, f) in checks {
        if id == 9 {
            let t = Instant::now();
            match c8() {
                Some(detail) => println!("REPORT criterion 8 (GDP reproduction) [{:.2}s]: {detail}", t.elapsed().as_secs_f64()),
                None => println!("SKIP   criterion 8 (GDP reproduction): set QGIBBS_GDP_CSV to run"),
            }
        }
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let known = KNOWN_UNATTAINABLE.contains(&id);
        let tag = match (o.pass, known) {
            (true, _) => "PASS  ",
            (false, true) => "FAIL* ",
            (false, false) => "FAIL  ",
        };
        println!("{tag} criterion {id} ({name}) [{secs:.2}s]: {}", o.detail);
        if !o.pass && (strict || !known) {
            blocking.push(id);
        }
    }
    println!("(* known unattainable as stated; see README)");
    if !blocking.is_empty() {
        eprintln!("failing criteria: {blocking:?}");
        std::process::exit(1);
    }
}
