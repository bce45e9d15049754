//! Seed-averaged variances of the period-1 quantities, next to their
//! normal-theory targets. Demonstrates how mistaking the estimator paradigm
//! distorts post-treatment variance estimates.

use std::fs;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::config::VarianceTableConfig;
use super::CliError;
use crate::distributions::{variance, EmpiricalDist};
use crate::forwardsim::{
    analytic_variances, estimate_counterfactual, estimate_interventional, generate_truth,
    StabilityParams, TreatmentRule,
};
use crate::substream;

#[derive(Debug, Clone, Copy)]
pub struct VarianceReport {
    pub analytic: [f64; 4],
    pub mean: [f64; 4],
    pub stddev: [f64; 4],
}

pub const QUANTITIES: [&str; 4] = ["var_y0", "var_y1_true", "var_y1_cf", "var_y1_int"];

/// Runs `reps` simulations with derived seeds and averages the variances.
pub fn compute(cfg: &VarianceTableConfig) -> Result<VarianceReport, CliError> {
    let rule = TreatmentRule::NegativeOutcome;
    let mut sums = [0.0f64; 4];
    let mut squares = [0.0f64; 4];
    for rep in 0..cfg.reps {
        let params = StabilityParams {
            n: cfg.n,
            mu_z: cfg.mu_z,
            sigma_z: cfg.sigma_z,
            sigma_u: cfg.sigma_u,
            sigma_mu: cfg.sigma_mu,
            delta: cfg.delta,
            seed: substream::derive_seed(cfg.seed, &[rep as u64]),
        };
        let data = generate_truth(&params, &rule)?;
        let (_, int_dist) = estimate_interventional(&data, &params)?;
        let (_, cf_dist) = estimate_counterfactual(&data, &params)?;
        let values = [
            variance(&EmpiricalDist::new(data.y0.clone())?)?,
            variance(&EmpiricalDist::new(data.y1_true.clone())?)?,
            variance(&cf_dist)?,
            variance(&int_dist)?,
        ];
        for (i, v) in values.iter().enumerate() {
            sums[i] += v;
            squares[i] += v * v;
        }
    }
    let reps = cfg.reps as f64;
    let mean = sums.map(|s| s / reps);
    let stddev = std::array::from_fn(|i| (squares[i] / reps - mean[i] * mean[i]).max(0.0).sqrt());
    let params = StabilityParams {
        n: cfg.n,
        mu_z: cfg.mu_z,
        sigma_z: cfg.sigma_z,
        sigma_u: cfg.sigma_u,
        sigma_mu: cfg.sigma_mu,
        delta: cfg.delta,
        seed: cfg.seed,
    };
    let analytic = analytic_variances(&params);
    Ok(VarianceReport {
        analytic: [analytic.y0, analytic.y1_true, analytic.y1_cf, analytic.y1_int],
        mean,
        stddev,
    })
}

pub fn execute(
    cfg: &VarianceTableConfig,
    out: &Path,
    writer: &mut dyn Write,
) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    super::config::echo(cfg, out, "variance_table")?;
    let report = compute(cfg)?;

    writeln!(
        writer,
        "Variance of period-1 quantities (sigma_u={}, sigma_mu={}, delta={}, n={}, {} seeds)",
        cfg.sigma_u, cfg.sigma_mu, cfg.delta, cfg.n, cfg.reps
    )?;
    writeln!(writer, "  {:<14} {:>10} {:>12} {:>10}", "quantity", "analytic", "mean", "stddev")?;
    for (i, quantity) in QUANTITIES.iter().enumerate() {
        writeln!(
            writer,
            "  {:<14} {:>10.3} {:>12.3} {:>10.3}",
            quantity, report.analytic[i], report.mean[i], report.stddev[i]
        )?;
    }

    // The paradigm-mismatch claim is about the distributions themselves, so
    // the orderings are asserted on the exact (analytic) variances; the
    // simulation is held to its analytic targets separately. Asserting the
    // orderings on seed averages would turn hairline margins (the
    // interventional excess over the period-0 variance is delta-squared
    // sized) into coin flips.
    let mut failures = Vec::new();
    let mut checks = vec![
        (
            "interventional variance exceeds the period-0 variance".to_string(),
            report.analytic[3] > report.analytic[0],
        ),
        (
            "true period-1 variance is below the period-0 variance".to_string(),
            report.analytic[1] < report.analytic[0],
        ),
        (
            "counterfactual variance is below the period-0 variance".to_string(),
            report.analytic[2] < report.analytic[0],
        ),
    ];
    for (i, quantity) in QUANTITIES.iter().enumerate() {
        checks.push((
            format!("measured {quantity} within 10% of analytic"),
            (report.mean[i] - report.analytic[i]).abs() <= 0.1 * report.analytic[i].abs(),
        ));
    }
    writeln!(writer)?;
    for (label, ok) in &checks {
        writeln!(writer, "  [{}] {label}", if *ok { "ok" } else { "FAIL" })?;
        if !ok {
            failures.push(label.clone());
        }
    }

    let csv_path = out.join("variance_table.csv");
    let mut csv = BufWriter::new(File::create(csv_path)?);
    writeln!(csv, "quantity,analytic,mean,stddev")?;
    for (i, quantity) in QUANTITIES.iter().enumerate() {
        writeln!(
            csv,
            "{},{},{},{}",
            quantity, report.analytic[i], report.mean[i], report.stddev[i]
        )?;
    }
    csv.flush()?;

    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(failures.join("\n")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averaged_variances_track_the_analytic_targets() {
        let cfg = VarianceTableConfig {
            reps: 20,
            ..VarianceTableConfig::default()
        };
        let report = compute(&cfg).unwrap();
        for i in 0..4 {
            let rel = (report.mean[i] - report.analytic[i]).abs() / report.analytic[i];
            assert!(
                rel < 0.05,
                "{}: mean {} vs analytic {}",
                QUANTITIES[i],
                report.mean[i],
                report.analytic[i]
            );
        }
    }

    #[test]
    fn writes_report_and_csv() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = VarianceTableConfig {
            reps: 5,
            n: 400,
            ..VarianceTableConfig::default()
        };
        let mut out = Vec::new();
        execute(&cfg, dir.path(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("quantity"));
        assert!(text.contains("[ok] interventional variance exceeds"));
        assert!(!text.contains("FAIL"));
        let csv = fs::read_to_string(dir.path().join("variance_table.csv")).unwrap();
        assert!(csv.starts_with("quantity,analytic,mean,stddev\n"));
        assert_eq!(csv.lines().count(), 5);
    }
}
