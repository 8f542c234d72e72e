use std::path::{Path, PathBuf};

use log::info;
use qgibbs::lab::{
    closed_form_report, dv_batch, is_convex_on_grid, kl_uniform_balls, log_grid, minimize_oracle_remainder,
    oracle_experiment, oracle_remainder, oracle_report, rio_mgf_check, risk_deviation_check, KlConvention,
    MgfProcess, OracleConfig, RiskDeviationConfig, TheoryConstants, Verdict,
};
use qgibbs::stats::derive_seed;
use qgibbs::SyntheticSpec;
use serde_json::{json, Value};

use super::{create_out_dir, write_json};
use crate::config::RunConfig;
use crate::error::CliError;

pub struct VerifyOutcome {
    pub artifacts: Vec<PathBuf>,
    pub verdict: Verdict,
}

fn verdict_of(pass: bool) -> Verdict {
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Bound arithmetic for the GDP predictor on the synthetic AR(1) process.
fn bound_section(cfg: &RunConfig, spec: &SyntheticSpec) -> Result<(Value, Verdict), CliError> {
    let (bb, c) = (spec.sup_bound(), spec.weak_dependence_bound());
    let n = cfg.verify.oracle_n;
    let consts = TheoryConstants::gdp(cfg.ball, bb, c, n)?;
    let lambda = consts.tuned_lambda();
    let per_convention = [KlConvention::StatedConstant, KlConvention::VolumeRatio { dim: 4 }]
        .iter()
        .map(|&conv| -> Result<Value, CliError> {
            let kl = kl_uniform_balls(cfg.ball, 1.0, conv)?;
            let report = oracle_report(lambda, n, consts.memory, consts.kappa, kl, cfg.epsilon)?;
            Ok(json!({ "convention": conv.label(), "kl_at_unit_delta": kl, "report": report }))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let closed_form = match closed_form_report(n, consts.kappa, cfg.ball, bb, cfg.epsilon) {
        Ok(r) => json!({ "applicable": true, "report": r }),
        Err(e) => json!({ "applicable": false, "reason": e.to_string() }),
    };
    let kl = kl_uniform_balls(cfg.ball, 1.0, KlConvention::StatedConstant)?;
    let grid = log_grid(1e-3, 1e4, 50)?;
    let values = grid
        .iter()
        .map(|&l| oracle_remainder(l, n, consts.memory, consts.kappa, kl, cfg.epsilon))
        .collect::<Result<Vec<_>, _>>()?;
    let convex = is_convex_on_grid(&grid, &values, 1e-9);
    let (best_lambda, best_bound) = minimize_oracle_remainder(&grid, n, consts.memory, consts.kappa, kl, cfg.epsilon)?;
    let verdict = verdict_of(convex);
    Ok((
        json!({
            "constants": consts,
            "tuned_lambda": lambda,
            "at_tuned_lambda": per_convention,
            "closed_form": closed_form,
            "grid_minimum": { "lambda": best_lambda, "bound": best_bound, "grid_points": grid.len() },
            "convex_in_lambda": convex,
            "verdict": verdict,
        }),
        verdict,
    ))
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<VerifyOutcome, CliError> {
    let v = &cfg.verify;
    let seed = |i: u64| derive_seed(cfg.seed, &[i]);

    info!("verify: variational identity");
    let dv = dv_batch(v.dv_instances, v.dv_max_support, seed(0))?;
    let dv_verdict = verdict_of(dv.pass);

    info!("verify: mgf bounds");
    let iid = rio_mgf_check(MgfProcess::IidUniform { b: 1.0 }, v.mgf_n, &v.mgf_t, v.mgf_replications, seed(1))?;
    let ar = rio_mgf_check(
        MgfProcess::Ar1 { a: v.mgf_ar, b: 1.0 },
        v.mgf_n,
        &v.mgf_t,
        v.mgf_replications,
        seed(2),
    )?;

    info!("verify: risk deviation");
    let deviation = risk_deviation_check(&RiskDeviationConfig {
        replications: v.deviation_replications,
        seed: seed(3),
        ..RiskDeviationConfig::default()
    })?;

    info!("verify: oracle inequality ({} replications)", v.oracle_replications);
    let spec = SyntheticSpec::ar1(0.5, 1.0, v.oracle_n, seed(4));
    let oracle = oracle_experiment(&OracleConfig {
        spec: spec.clone(),
        taus: v.oracle_taus.clone(),
        epsilon: cfg.epsilon,
        replications: v.oracle_replications,
        seed: seed(5),
        holdout: v.oracle_holdout,
        grid_per_axis: v.oracle_grid,
        sampler: qgibbs::SamplerConfig {
            samples: v.oracle_samples,
            ..cfg.sampler()
        },
        kl: v.kl,
        ..OracleConfig::default()
    })?;
    let oracle_verdict = verdict_of(oracle.pass);

    let (bounds, bounds_verdict) = bound_section(cfg, &spec)?;

    let verdict = Verdict::combine([dv_verdict, iid.verdict, ar.verdict, deviation.verdict, oracle_verdict, bounds_verdict]);
    let report = json!({
        "config": cfg,
        "verdict": verdict,
        "checks": {
            "variational_identity": { "verdict": dv_verdict, "report": dv },
            "mgf_iid": iid,
            "mgf_ar1": ar,
            "risk_deviation": deviation,
            "oracle_inequality": { "verdict": oracle_verdict, "report": oracle },
            "bounds": bounds,
        },
    });
    create_out_dir(out)?;
    let path = write_json(out.join("verify.json"), &report)?;
    Ok(VerifyOutcome {
        artifacts: vec![path],
        verdict,
    })
}
