use proptest::prelude::*;

use qgibbs::gibbs::gibbs_weights_finite;
use qgibbs::lab::{dv_check, is_convex_on_grid, kappa, log_grid, oracle_remainder};
use qgibbs::losses::{quantile_loss, LossFn};
use qgibbs::series::{
    build_features, gen_synthetic, read_csv, write_csv, CsvSchema, Design, FeatureMap, GdpRow, Quarter,
    SyntheticSpec, TimeSeries,
};
use qgibbs::stats::empirical_quantile;

fn start() -> Quarter {
    "1990Q2".parse().unwrap()
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, prop::num::f64::NORMAL, Just(0.0), Just(-0.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip(rows in prop::collection::vec((finite(), finite()), 1..40)) {
        let gdp: Vec<GdpRow> = rows
            .iter()
            .enumerate()
            .map(|(i, &(g, c))| GdpRow { period: start().offset(i as i64).unwrap(), gdp_growth: g, climate: c })
            .collect();
        let s = TimeSeries::from_gdp_rows(&gdp).unwrap();
        let mut buf = Vec::new();
        write_csv(&s, &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), &CsvSchema::gdp()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn synthetic_respects_sup_bound(
        a in -0.95..0.95f64,
        b in 0.01..10.0f64,
        len in 1usize..300,
        seed in any::<u64>(),
    ) {
        let spec = SyntheticSpec::ar1(a, b, len, seed);
        let s = gen_synthetic(&spec).unwrap();
        let bound = b / (1.0 - a.abs());
        prop_assert!(s.column(0).all(|x| x.abs() <= bound * (1.0 + 1e-12)));
        prop_assert_eq!(s.len(), len);
    }

    #[test]
    fn empirical_quantile_minimizes_pinball(
        sample in prop::collection::vec(-50.0..50.0f64, 1..200),
        tau_idx in 0usize..5,
    ) {
        let tau = [0.05, 0.25, 0.5, 0.75, 0.95][tau_idx];
        let q = empirical_quantile(&sample, tau).unwrap();
        let total = |t: f64| sample.iter().map(|&u| quantile_loss(tau, t, u).unwrap()).sum::<f64>();
        let at_q = total(q);
        let (lo, hi) = (-51.0, 51.0);
        let steps = 4000;
        let step = (hi - lo) / steps as f64;
        let grid_min = (0..=steps).map(|i| total(lo + step * i as f64)).fold(f64::INFINITY, f64::min);
        // The objective is piecewise linear with slope at most m, so a grid
        // point can undercut the true minimum by at most m · step / 2.
        prop_assert!(at_q <= grid_min + 1e-9 * (1.0 + grid_min.abs()));
        prop_assert!(at_q >= grid_min - sample.len() as f64 * step / 2.0 - 1e-9);
    }

    #[test]
    fn risk_is_convex_in_theta(
        t1 in prop::collection::vec(-3.0..3.0f64, 2),
        t2 in prop::collection::vec(-3.0..3.0f64, 2),
        alpha in 0.0..=1.0f64,
        ys in prop::collection::vec(-2.0..2.0f64, 5..40),
        tau in 0.01..0.99f64,
    ) {
        let design = Design::from_values(FeatureMap::Autoregressive { order: 1 }, &ys).unwrap();
        let loss = LossFn::quantile(tau).unwrap();
        let mix: Vec<f64> = t1.iter().zip(&t2).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
        let lhs = loss.risk(&mix, design.view());
        let rhs = alpha * loss.risk(&t1, design.view()) + (1.0 - alpha) * loss.risk(&t2, design.view());
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn pinball_is_lipschitz_in_prediction(
        x in -100.0..100.0f64,
        x2 in -100.0..100.0f64,
        y in -100.0..100.0f64,
        tau in 0.001..0.999f64,
    ) {
        let d = (quantile_loss(tau, x, y).unwrap() - quantile_loss(tau, x2, y).unwrap()).abs();
        let k = tau.max(1.0 - tau);
        prop_assert!(d <= k * (x - x2).abs() * (1.0 + 1e-12) + 1e-12);
        prop_assert!(k <= 1.0);
    }

    #[test]
    fn gibbs_weights_normalize_and_ignore_risk_shifts(
        risks in prop::collection::vec(0.0..10.0f64, 1..60),
        lambda in 0.0..1e4f64,
        shift in -100.0..100.0f64,
    ) {
        let m = risks.len();
        let prior = vec![1.0 / m as f64; m];
        let w = gibbs_weights_finite(lambda, &risks, &prior).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let shifted: Vec<f64> = risks.iter().map(|r| r + shift).collect();
        let w2 = gibbs_weights_finite(lambda, &shifted, &prior).unwrap();
        for (a, b) in w.iter().zip(&w2) {
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn better_point_gains_weight_with_lambda(r1 in 0.0..5.0f64, gap in 1e-3..5.0f64) {
        let grid = log_grid(1e-3, 1e3, 40).unwrap();
        let mut last = 0.0;
        for l in grid {
            let w = gibbs_weights_finite(l, &[r1, r1 + gap], &[0.5, 0.5]).unwrap()[0];
            prop_assert!(w >= last - 1e-15);
            last = w;
        }
    }

    #[test]
    fn dv_identity_on_random_instances(
        raw in prop::collection::vec((0.0..1.0f64, -10.0..10.0f64), 1..50),
        seed in any::<u64>(),
    ) {
        let total: f64 = raw.iter().map(|p| p.0).sum();
        prop_assume!(total > 1e-3);
        let prior: Vec<f64> = raw.iter().map(|p| p.0 / total).collect();
        let h: Vec<f64> = raw.iter().map(|p| p.1).collect();
        let r = dv_check(&prior, &h, seed).unwrap();
        prop_assert!(r.closed_form_gap() < 1e-12, "gap {}", r.closed_form_gap());
        prop_assert!(r.numerical_excess() <= 1e-6);
    }

    #[test]
    fn kappa_scales_with_bound_plus_dependence(
        k in 0.01..2.0f64,
        l in 0.0..200.0f64,
        b in 0.01..10.0f64,
        c in 0.0..10.0f64,
        scale in 0.01..100.0f64,
    ) {
        let base = kappa(k, l, b, c).unwrap();
        let scaled = kappa(k, l, scale * b, scale * c).unwrap();
        prop_assert!((scaled - scale * base).abs() <= 1e-12 * scaled.abs());
    }

    #[test]
    fn oracle_remainder_is_convex_in_lambda(
        n in 10usize..5000,
        k in 1usize..5,
        kap in 0.1..200.0f64,
        kl in 0.0..50.0f64,
        eps in 0.001..0.999f64,
    ) {
        prop_assume!(k < n);
        let grid = log_grid(1e-3, 1e4, 50).unwrap();
        let vals: Vec<f64> = grid.iter().map(|&l| oracle_remainder(l, n, k, kap, kl, eps).unwrap()).collect();
        prop_assert!(is_convex_on_grid(&grid, &vals, 1e-9));
    }

    #[test]
    fn climate_level_shift_only_moves_the_level_feature(
        rows in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 3..20),
        c in -50.0..50.0f64,
    ) {
        let mk = |shift: f64| {
            let gdp: Vec<GdpRow> = rows
                .iter()
                .enumerate()
                .map(|(i, &(g, cl))| GdpRow { period: start().offset(i as i64).unwrap(), gdp_growth: g, climate: cl + shift })
                .collect();
            TimeSeries::from_gdp_rows(&gdp).unwrap()
        };
        let (a, b) = (mk(0.0), mk(c));
        for t in 2..rows.len() {
            let fa = build_features(&a, t).unwrap().0;
            let fb = build_features(&b, t).unwrap().0;
            prop_assert_eq!(fa[0], fb[0]);
            prop_assert_eq!(fa[1], fb[1]);
            prop_assert!((fb[2] - fa[2] - c).abs() < 1e-9);
            // Differences of the shifted climate agree up to rounding.
            prop_assert!((fa[3] - fb[3]).abs() < 1e-9 * (1.0 + fa[3].abs()) * 1e3);
        }
    }
}
