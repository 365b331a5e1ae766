//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `--nocapture` to see them). Tolerances are pinned
//! in the assertions.

#![allow(clippy::needless_range_loop)] // oracle code mirrors the math

use std::io::Write;
use std::time::Instant;

use mooselect::data::{build_design_matrix, parse_model_formula, Dataset, DesignMatrix};
use mooselect::fixtures::{avian_points, AVIAN_N, AVIAN_OBJECTIVES_CSV};
use mooselect::glm::{fit_gaussian_ols, fit_poisson_irls};
use mooselect::objectives::{
    evaluate_criterion, penalty, rank_points, sensitivity_points, CriterionSpec, ObjectivePoint,
    PenaltySpec,
};
use mooselect::pareto::{
    constrained_select, dominates, elbow, marginal_returns, pareto_frontier,
    strict_parameter_budget,
};
use mooselect::penalized::{fit_lasso, fit_ridge};

/// The six Pareto optimal labels of the bundled objective table, by
/// parameter count {1, 2, 3, 4, 6, 7}.
const STARRED: [&str; 6] = [
    "1",
    "area",
    "area + temp",
    "area + precip + temp",
    "area + precip + precip^2 + temp + temp^2",
    "area + area^2 + precip + precip^2 + temp + temp^2",
];

fn pass(criterion: u32, detail: &str) {
    println!("acceptance criterion {criterion}: PASS - {detail}");
}

#[test]
fn criterion_1_frontier_fixture() {
    // Library route, timed.
    let points = avian_points::<f64>().unwrap();
    let start = Instant::now();
    let report = pareto_frontier(&points).unwrap();
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "frontier extraction took {elapsed:?}"
    );
    let ids = report.frontier_ids();
    assert_eq!(ids.len(), 6);
    for id in STARRED {
        assert!(
            ids.contains(&id.to_string()),
            "missing frontier member {id}"
        );
    }
    let ps: Vec<usize> = report.frontier.iter().map(|p| p.p).collect();
    assert_eq!(ps, vec![1, 2, 3, 4, 6, 7]);
    assert_eq!(report.dominated_count, 18);

    // CLI route: the `frontier` command over the same table.
    let mut fixture = tempfile::NamedTempFile::new().unwrap();
    fixture.write_all(AVIAN_OBJECTIVES_CSV.as_bytes()).unwrap();
    fixture.flush().unwrap();
    let report_path = tempfile::NamedTempFile::new().unwrap();
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_mooselect"))
        .args([
            "frontier",
            "--fixture",
            fixture.path().to_str().unwrap(),
            "--output",
            report_path.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(report_path.path()).unwrap()).unwrap();
    assert_eq!(json["frontier_ids"].as_array().unwrap().len(), 6);
    assert_eq!(json["dominated_ids"].as_array().unwrap().len(), 18);

    pass(1, "6 starred frontier members, 18 dominated, < 1 s");
}

#[test]
fn criterion_2_aic_reconstruction() {
    // Published AIC and delta-AIC columns, in fixture row order.
    let table_aic = [
        741.1, 571.2, 669.2, 706.1, 526.7, 567.7, 536.7, 572.8, 668.0, 704.9, 515.3, 524.3, 565.6,
        528.2, 535.5, 568.1, 524.2, 525.7, 567.1, 518.0, 512.2, 519.2, 511.3, 512.8,
    ];
    let table_delta = [
        229.8, 59.9, 157.9, 194.8, 15.4, 56.4, 25.5, 61.5, 156.7, 193.6, 4.0, 13.0, 54.3, 16.9,
        24.2, 56.8, 12.9, 14.4, 55.8, 6.7, 0.9, 7.9, 0.0, 1.5,
    ];
    let points = avian_points::<f64>().unwrap();
    assert_eq!(points.len(), 24);
    let recomputed: Vec<f64> = points.iter().map(|p| 2.0 * p.f1 + 2.0 * p.f2).collect();
    let best = recomputed.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut max_aic_err = 0.0f64;
    let mut max_delta_err = 0.0f64;
    for i in 0..24 {
        let aic_err = (recomputed[i] - table_aic[i]).abs();
        assert!(
            aic_err <= 0.2,
            "row {i} ({}): recomputed {} vs published {}",
            points[i].model_id,
            recomputed[i],
            table_aic[i]
        );
        let delta_err = ((recomputed[i] - best) - table_delta[i]).abs();
        assert!(
            delta_err <= 0.3,
            "row {i} ({}): delta {} vs published {}",
            points[i].model_id,
            recomputed[i] - best,
            table_delta[i]
        );
        max_aic_err = max_aic_err.max(aic_err);
        max_delta_err = max_delta_err.max(delta_err);
    }
    pass(
        2,
        &format!(
            "AIC within 0.2 (max {max_aic_err:.3}), delta within 0.3 (max {max_delta_err:.3}) on all 24 rows"
        ),
    );
}

#[test]
fn criterion_3_sensitivity_agreement() {
    let points = avian_points::<f64>().unwrap();
    let top_p6 = STARRED[4];
    for crit in [
        CriterionSpec::aic(),
        CriterionSpec::aicc(),
        CriterionSpec::bic(),
    ] {
        let table = rank_points(&points, &crit, AVIAN_N).unwrap();
        assert_eq!(
            table.top().label,
            top_p6,
            "{} selected {}",
            table.criterion,
            table.top().label
        );
    }
    let report = sensitivity_points(
        &points,
        &[
            CriterionSpec::aic(),
            CriterionSpec::aicc(),
            CriterionSpec::bic(),
        ],
        AVIAN_N,
    )
    .unwrap();
    assert!(report.all_agree);
    pass(
        3,
        "AIC, AICc and BIC (n = 49) all select the starred p = 6 model",
    );
}

#[test]
fn criterion_4_post_optimization_heuristics() {
    let points = avian_points::<f64>().unwrap();
    let report = pareto_frontier(&points).unwrap();

    let steps = marginal_returns(&report.frontier).unwrap();
    let expected = [86.0, 23.3, 6.6];
    for (k, want) in expected.iter().enumerate() {
        assert!(
            (steps[k] - want).abs() <= 0.2,
            "step {k}: {} vs {want}",
            steps[k]
        );
    }

    let e = elbow(&report.frontier).unwrap();
    assert_eq!(e.model_id, "area + temp");
    let elbow_point = report
        .frontier
        .iter()
        .find(|p| p.model_id == e.model_id)
        .unwrap();
    assert_eq!(elbow_point.p, 3);

    let p_max = strict_parameter_budget(AVIAN_N, 15);
    assert_eq!(p_max, 3);
    let pick = constrained_select(&report.frontier, p_max).unwrap();
    assert_eq!(pick.model_id, "area + temp");

    pass(
        4,
        "marginal returns 86.0/23.3/6.6, elbow at p = 3, p < 49/15 picks area + temp",
    );
}

#[test]
fn criterion_5_pareto_sufficiency_property() {
    // Deterministic xorshift generator: the trial set is fixed.
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut next_f64 = move |lo: f64, hi: f64| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        let unit = (state >> 11) as f64 / (1u64 << 53) as f64;
        lo + unit * (hi - lo)
    };

    let trials = 1_000;
    for trial in 0..trials {
        let count = 1 + (trial % 200);
        let points: Vec<ObjectivePoint<f64>> = (0..count)
            .map(|i| {
                ObjectivePoint::new(
                    format!("t{trial}m{i}"),
                    next_f64(0.0, 100.0),
                    next_f64(0.0, 100.0),
                    i,
                )
                .unwrap()
            })
            .collect();

        // Independent all-pairs oracle.
        let mut oracle: Vec<&str> = points
            .iter()
            .enumerate()
            .filter(|(i, a)| {
                !points
                    .iter()
                    .enumerate()
                    .any(|(j, b)| *i != j && dominates(b, a))
            })
            .map(|(_, a)| a.model_id.as_str())
            .collect();
        oracle.sort_unstable();

        let report = pareto_frontier(&points).unwrap();
        let mut got: Vec<String> = report.frontier_ids();
        got.sort_unstable();
        assert_eq!(got, oracle, "frontier mismatch on trial {trial}");

        // Weighted-sum minimizer with random positive weights.
        let w1 = next_f64(1e-3, 1e3);
        let w2 = next_f64(1e-3, 1e3);
        let winner = points
            .iter()
            .min_by(|a, b| {
                (w1 * a.f1 + w2 * a.f2)
                    .partial_cmp(&(w1 * b.f1 + w2 * b.f2))
                    .unwrap()
            })
            .unwrap();
        assert!(
            oracle.contains(&winner.model_id.as_str()),
            "trial {trial}: weighted-sum winner {} not Pareto optimal",
            winner.model_id
        );
    }
    pass(
        5,
        &format!("{trials} randomized trials: frontier == oracle, weighted-sum winner always Pareto optimal"),
    );
}

/// Independent Newton minimizer of the Poisson negative log-likelihood,
/// with its own elimination solve (shares nothing with the library's IRLS).
fn newton_oracle(cols: &[&[f64]], y: &[f64]) -> Vec<f64> {
    let p = cols.len();
    let n = y.len();
    let nll = |beta: &[f64]| -> f64 {
        (0..n)
            .map(|i| {
                let eta: f64 = (0..p).map(|j| cols[j][i] * beta[j]).sum();
                eta.exp() - y[i] * eta
            })
            .sum()
    };
    let mut beta = vec![0.0; p];
    for _ in 0..200 {
        let mut grad = vec![0.0; p];
        let mut hess = vec![vec![0.0; p]; p];
        for i in 0..n {
            let eta: f64 = (0..p).map(|j| cols[j][i] * beta[j]).sum();
            let mu = eta.exp();
            for j in 0..p {
                grad[j] += (mu - y[i]) * cols[j][i];
                for l in j..p {
                    hess[j][l] += mu * cols[j][i] * cols[l][i];
                }
            }
        }
        for j in 0..p {
            for l in 0..j {
                hess[j][l] = hess[l][j];
            }
        }
        let mut aug = hess;
        for (j, row) in aug.iter_mut().enumerate() {
            row.push(grad[j]);
        }
        for col in 0..p {
            let pivot_row = (col..p)
                .max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap())
                .unwrap();
            aug.swap(col, pivot_row);
            for row in 0..p {
                if row != col {
                    let f = aug[row][col] / aug[col][col];
                    for c in col..=p {
                        aug[row][c] -= f * aug[col][c];
                    }
                }
            }
        }
        let step: Vec<f64> = (0..p).map(|j| aug[j][p] / aug[j][j]).collect();
        let f0 = nll(&beta);
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let cand: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b - t * s).collect();
            if nll(&cand) <= f0 {
                beta = cand;
                moved = true;
                break;
            }
            t /= 2.0;
        }
        if !moved || grad.iter().all(|g| g.abs() < 1e-12) {
            break;
        }
    }
    beta
}

fn poisson_deviance(y: &[f64], mu: &[f64]) -> f64 {
    y.iter()
        .zip(mu)
        .map(|(yi, mi)| {
            if *yi > 0.0 {
                2.0 * (yi * (yi / mi).ln() - (yi - mi))
            } else {
                2.0 * mi
            }
        })
        .sum()
}

#[test]
fn criterion_6_glm_correctness() {
    // Intercept-only maximum likelihood estimate.
    let design = DesignMatrix::<f64>::from_columns(vec![], vec![], 3).unwrap();
    let fit = fit_poisson_irls(&design, &[1.0, 2.0, 3.0]).unwrap();
    assert!((fit.coefficients[0] - 2f64.ln()).abs() < 1e-10);

    // Seeded synthetic problem, n = 200, known coefficients.
    let mut state: u64 = 2024;
    let mut next_f64 = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let n = 200;
    let truth = [1.0, 0.3, -0.2];
    let x1: Vec<f64> = (0..n).map(|_| next_f64() * 4.0 - 2.0).collect();
    let x2: Vec<f64> = (0..n).map(|_| next_f64() * 4.0 - 2.0).collect();
    // Poisson draws by inversion from the uniform stream.
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let lambda = (truth[0] + truth[1] * x1[i] + truth[2] * x2[i]).exp();
            let u = next_f64();
            let mut cdf = (-lambda).exp();
            let mut pmf = cdf;
            let mut k = 0.0;
            while u > cdf && k < 1e4 {
                k += 1.0;
                pmf *= lambda / k;
                cdf += pmf;
            }
            k
        })
        .collect();

    let data = Dataset::new("y", y.clone(), vec![("x1".into(), x1), ("x2".into(), x2)]).unwrap();
    let spec = parse_model_formula("x1 + x2", &data.covariate_names()).unwrap();
    let design = build_design_matrix(&data, &spec, true).unwrap();
    let fit = fit_poisson_irls(&design, &y).unwrap();
    assert!(fit.converged);

    let cols: Vec<&[f64]> = (0..design.p()).map(|j| design.column(j)).collect();
    let oracle_beta = newton_oracle(&cols, &y);
    let oracle_mu: Vec<f64> = (0..n)
        .map(|i| {
            (0..design.p())
                .map(|j| cols[j][i] * oracle_beta[j])
                .sum::<f64>()
                .exp()
        })
        .collect();
    let dev_gap = (poisson_deviance(&y, &fit.fitted) - poisson_deviance(&y, &oracle_mu)).abs();
    assert!(dev_gap < 1e-6, "deviance gap {dev_gap}");

    let mut max_grad = 0.0f64;
    for j in 0..design.p() {
        let g: f64 = (0..n).map(|i| (fit.fitted[i] - y[i]) * cols[j][i]).sum();
        max_grad = max_grad.max(g.abs());
    }
    assert!(max_grad < 1e-6, "gradient max-norm {max_grad}");

    pass(
        6,
        &format!("intercept MLE exact to 1e-10; deviance gap {dev_gap:.2e}, gradient max-norm {max_grad:.2e}"),
    );
}

#[test]
fn criterion_7_penalized_solvers() {
    // Shared test problem.
    let data: Dataset<f64> = Dataset::new(
        "y",
        vec![3.0, 5.0, 4.0, 8.0, 9.0, 7.0],
        vec![
            ("a".into(), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
            ("b".into(), vec![0.5, -0.3, 0.8, 0.1, -0.6, 0.4]),
        ],
    )
    .unwrap();
    let spec = parse_model_formula("a + b", &data.covariate_names()).unwrap();
    let design = build_design_matrix(&data, &spec, true).unwrap();
    let y = data.response();

    // Ridge at w2 = 0 equals OLS.
    let ols = fit_gaussian_ols(&design, y).unwrap();
    let ridge0 = fit_ridge(&design, y, 0.0).unwrap();
    for (a, b) in ridge0.coefficients.iter().zip(&ols.coefficients) {
        assert!((a - b).abs() < 1e-6);
    }

    // One-dimensional closed form on a unit-norm centered column.
    let s = 2f64.sqrt();
    let unit =
        DesignMatrix::<f64>::from_columns(vec!["x".into()], vec![vec![-1.0 / s, 0.0, 1.0 / s]], 3)
            .unwrap();
    let y1 = vec![1.0, 2.0, 4.0];
    let beta_ols = fit_ridge(&unit, &y1, 0.0).unwrap().coefficients[1];
    for w2 in [0.5, 1.0, 4.0, 20.0] {
        let point = fit_ridge(&unit, &y1, w2).unwrap();
        assert!(
            (point.coefficients[1] - beta_ols / (1.0 + w2)).abs() < 1e-8,
            "ridge closed form at w2 = {w2}"
        );
    }

    // Lasso KKT conditions within 1e-6.
    let n = design.n();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let mut max_kkt_violation = 0.0f64;
    for w2 in [0.4, 1.5, 6.0] {
        let point = fit_lasso(&design, y, w2).unwrap();
        let mut residual: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
        for j in 1..design.p() {
            let col = design.column(j);
            let mj = col.iter().sum::<f64>() / n as f64;
            for i in 0..n {
                residual[i] -= (col[i] - mj) * point.coefficients[j];
            }
        }
        for j in 1..design.p() {
            let col = design.column(j);
            let mj = col.iter().sum::<f64>() / n as f64;
            let grad: f64 = col
                .iter()
                .zip(&residual)
                .map(|(x, r)| 2.0 * (x - mj) * r)
                .sum();
            let beta = point.coefficients[j];
            let violation = if beta != 0.0 {
                (grad - w2 * beta.signum()).abs()
            } else {
                (grad.abs() - w2).max(0.0)
            };
            assert!(violation < 1e-6, "KKT violation {violation} at w2 = {w2}");
            max_kkt_violation = max_kkt_violation.max(violation);
        }
    }

    // Exact zeros at and above the inactivity bound.
    let bound = (1..design.p())
        .map(|j| {
            let col = design.column(j);
            let mj = col.iter().sum::<f64>() / n as f64;
            let dot: f64 = col
                .iter()
                .zip(y)
                .map(|(x, yi)| (x - mj) * (yi - y_mean))
                .sum();
            2.0 * dot.abs()
        })
        .fold(0.0, f64::max);
    for w2 in [bound, bound * 1.5, bound * 100.0] {
        let point = fit_lasso(&design, y, w2).unwrap();
        for slope in &point.coefficients[1..] {
            assert_eq!(*slope, 0.0, "slope not exactly zero at w2 = {w2}");
        }
    }

    pass(
        7,
        &format!("ridge = OLS at w2 = 0, 1-D closed form to 1e-8, lasso KKT (max violation {max_kkt_violation:.2e}), exact zeros past the bound"),
    );
}

#[test]
fn criterion_8_count_penalty_identity() {
    // gamma = 0 counts every coefficient, including exact zeros.
    let vectors: Vec<Vec<f64>> = vec![
        vec![0.0],
        vec![0.5, -1.2, 3.0],
        vec![0.0, 0.0, 0.0, 0.0],
        vec![1e-300, -1e300, 42.0, 0.0, -0.0],
        (0..17).map(|i| (i as f64 - 8.0) * 0.37).collect(),
    ];
    for v in &vectors {
        let got = penalty(v, &PenaltySpec::count_penalty()).unwrap();
        assert_eq!(got, v.len() as f64);
    }

    // evaluate_criterion(AIC) == 2 * nll + 2 * p to machine precision.
    let data = Dataset::new(
        "y",
        vec![2.0, 6.0, 1.0, 9.0, 4.0, 11.0, 3.0, 5.0],
        vec![("x".into(), vec![-1.0, 0.8, -1.5, 1.4, 0.0, 1.9, -0.6, 0.4])],
    )
    .unwrap();
    let spec = parse_model_formula("x", &data.covariate_names()).unwrap();
    let design = build_design_matrix(&data, &spec, true).unwrap();
    let fit = fit_poisson_irls(&design, data.response()).unwrap();
    let aic = evaluate_criterion(&fit, &CriterionSpec::aic()).unwrap();
    let direct = 2.0 * fit.neg_log_lik + 2.0 * fit.p as f64;
    assert!(
        (aic - direct).abs() <= 4.0 * f64::EPSILON * direct.abs(),
        "AIC {aic} vs 2*nll + 2*p = {direct}"
    );
    pass(
        8,
        "count penalty equals p for every vector; AIC identity exact",
    );
}

#[test]
fn criterion_9_fixture_substitution() {
    // The raw survey data behind the bundled objective table is not
    // distributed, so f1 values cannot be recomputed here from scratch;
    // criteria 1-4 run against the bundled (label, f1, f2) table and
    // criterion 6 verifies the fitting machinery against independent
    // oracles on synthetic data instead.
    let points = avian_points::<f64>().unwrap();
    assert_eq!(
        points.len(),
        24,
        "bundled objective table is the substitute input"
    );
    let header = AVIAN_OBJECTIVES_CSV.lines().next().unwrap();
    assert_eq!(
        header, "label,f1,f2",
        "table carries objective values only, no raw observations"
    );
    pass(
        9,
        "raw-data reproduction out of reach by design; fixture-based checks (1-4) and oracle-based GLM checks (6) substitute",
    );
}
