//! The worked treatment-choice example, end to end and in exact arithmetic:
//! abduction table, population decision-set welfare, and sample assignment
//! welfare with the exhaustive optimum. Every printed fraction is checked
//! against its built-in expected value; any mismatch makes the command exit
//! nonzero with a diff.

use std::io::Write;

use num_rational::BigRational;

use super::CliError;
use crate::models;
use crate::policy::{
    cf_post_treatment_cdf, cf_optimize, ewm_optimize, ewm_post_treatment_cdf, Budget,
    DecisionSetPolicy, SearchMode, UnitAssignment,
};
use crate::rational::{over_denominator, ratio};
use crate::scm::Intervention;
use crate::welfare::{gini_welfare, WelfareFunctional, WelfareValue};

fn fraction_report(value: &WelfareValue, denom: i64) -> String {
    let raw = over_denominator(value.exact(), denom)
        .unwrap_or_else(|| value.exact().to_string());
    let reduced = value.exact().to_string();
    if reduced != raw {
        format!("{raw} = {reduced} ({:.6})", value.approx())
    } else {
        format!("{raw} ({:.6})", value.approx())
    }
}

fn compact(w: &UnitAssignment) -> String {
    let digits: Vec<String> = w.as_slice().iter().map(|d| d.to_string()).collect();
    format!("[{}]", digits.join(","))
}

struct Checks {
    failures: Vec<String>,
}

impl Checks {
    fn expect_fraction(&mut self, label: &str, got: &WelfareValue, numer: i64, denom: i64) {
        if !got.eq_fraction(numer, denom) {
            self.failures.push(format!(
                "{label}: expected {numer}/{denom}, got {}",
                got.exact()
            ));
        }
    }

    fn expect(&mut self, label: &str, ok: bool) {
        if !ok {
            self.failures.push(format!("{label}: check failed"));
        }
    }
}

pub fn execute(out: &mut dyn Write) -> Result<(), CliError> {
    let scm = models::binary_treatment_scm();
    let sample = models::observed_four_units();
    let problem = models::binary_treatment_problem();
    let mut checks = Checks { failures: Vec::new() };

    writeln!(out, "Model: X = U_X, Z = U_Z, Y = X + Z + U_Y")?;
    writeln!(out, "  U_X, U_Z ~ Bernoulli(1/2), U_Y ~ Uniform{{0,1,2}}")?;
    writeln!(out)?;

    // Abduction and potential outcomes.
    let posterior = scm.abduct(&sample)?;
    let y0 = scm.counterfactual_sample(&sample, &Intervention::atomic("Z", 0.0))?;
    let y1 = scm.counterfactual_sample(&sample, &Intervention::atomic("Z", 1.0))?;
    writeln!(out, "Observed units, abducted noise, potential outcomes:")?;
    writeln!(out, "  unit   X  Z  Y   U_X  U_Z  U_Y   Y(0)  Y(1)")?;
    let expected_u = [
        (0.0, 0.0, 1.0),
        (0.0, 0.0, 2.0),
        (1.0, 0.0, 0.0),
        (1.0, 0.0, 1.0),
    ];
    let expected_po = [(1.0, 2.0), (2.0, 3.0), (1.0, 2.0), (2.0, 3.0)];
    for unit in 0..sample.n() {
        let row = (
            sample.value("X", unit).unwrap(),
            sample.value("Z", unit).unwrap(),
            sample.value("Y", unit).unwrap(),
            posterior.value("U_X", unit).unwrap(),
            posterior.value("U_Z", unit).unwrap(),
            posterior.value("U_Y", unit).unwrap(),
            y0.value("Y", unit).unwrap(),
            y1.value("Y", unit).unwrap(),
        );
        writeln!(
            out,
            "  {:>4}   {}  {}  {}   {}    {}    {}     {}     {}",
            unit + 1,
            row.0,
            row.1,
            row.2,
            row.3,
            row.4,
            row.5,
            row.6,
            row.7
        )?;
        checks.expect(
            &format!("abduction row {}", unit + 1),
            (row.3, row.4, row.5) == expected_u[unit],
        );
        checks.expect(
            &format!("potential outcomes row {}", unit + 1),
            (row.6, row.7) == expected_po[unit],
        );
    }
    writeln!(out)?;

    // Population (decision set) side.
    let feasible = vec![
        DecisionSetPolicy::empty(),
        DecisionSetPolicy::new(vec![0.0]),
        DecisionSetPolicy::new(vec![1.0]),
    ];
    let names = ["G_empty", "G_0", "G_1"];
    let expected_fractions = [(35, 36), (56, 36), (46, 36)];
    writeln!(out, "Population welfare by decision set (budget: 2 treatments):")?;
    let mut welfare_values = Vec::new();
    for ((g, name), (numer, denom)) in feasible.iter().zip(names).zip(expected_fractions) {
        let cdf = ewm_post_treatment_cdf(&scm, &sample, &problem, g)?;
        let value = gini_welfare(&cdf)?;
        let cum: Vec<String> = cdf
            .support()
            .iter()
            .zip(cdf.cumulative())
            .map(|(y, c)| format!("{c} at {y}"))
            .collect();
        writeln!(out, "  P_{name}: {}", cum.join(", "))?;
        writeln!(out, "  W({name}) = {}", fraction_report(&value, 36))?;
        checks.expect_fraction(&format!("W({name})"), &value, numer, denom);
        welfare_values.push(value);
    }
    let (best_set, best_set_value) =
        ewm_optimize(&scm, &sample, &problem, &feasible, WelfareFunctional::Gini)?;
    let best_name = names[feasible.iter().position(|g| *g == best_set).unwrap()];
    writeln!(out, "  G*_EWM = {best_name} (decision set {best_set})")?;
    checks.expect("G*_EWM is G_0", best_set == DecisionSetPolicy::new(vec![0.0]));
    writeln!(out)?;

    // Sample (assignment) side.
    writeln!(out, "Sample welfare by assignment:")?;
    let ewm_as_assignment = UnitAssignment::new(vec![1, 1, 0, 0]);
    let ewm_cdf = cf_post_treatment_cdf(&scm, &sample, &problem, &ewm_as_assignment)?;
    let ewm_value = gini_welfare(&ewm_cdf)?;
    writeln!(
        out,
        "  W_cf({}) = {}",
        compact(&ewm_as_assignment),
        fraction_report(&ewm_value, 16)
    )?;
    checks.expect_fraction("W_cf([1,1,0,0])", &ewm_value, 26, 16);

    let alternate = UnitAssignment::new(vec![1, 0, 1, 0]);
    let alternate_value = gini_welfare(&cf_post_treatment_cdf(&scm, &sample, &problem, &alternate)?)?;
    writeln!(
        out,
        "  W_cf({}) = {}",
        compact(&alternate),
        fraction_report(&alternate_value, 16)
    )?;
    checks.expect_fraction("W_cf([1,0,1,0])", &alternate_value, 32, 16);

    let budget = Budget { max_treated: 2 };
    let (best_w, best_w_value) = cf_optimize(
        &scm,
        &sample,
        &problem,
        budget,
        WelfareFunctional::Gini,
        SearchMode::Exhaustive,
    )?;
    writeln!(
        out,
        "  exhaustive search over 11 assignments with at most 2 treated:"
    )?;
    writeln!(
        out,
        "  G*_CF = {} with W(G*_CF) = {}",
        compact(&best_w),
        fraction_report(&best_w_value, 16)
    )?;
    checks.expect("G*_CF is [1,0,1,0]", best_w.as_slice() == [1, 0, 1, 0]);
    checks.expect_fraction("W(G*_CF)", &best_w_value, 2, 1);

    let strictly_better = best_w_value.exact() > ewm_value.exact();
    writeln!(
        out,
        "  W(G*_CF) = {} > {} = W_cf(G*_EWM as assignment): {}",
        best_w_value.exact(),
        ewm_value.exact(),
        if strictly_better { "yes" } else { "NO" }
    )?;
    checks.expect("W(G*_CF) > W(G*_EWM)", strictly_better);
    // Sanity on the exact comparison 2 > 26/16.
    checks.expect(
        "2 > 26/16",
        BigRational::from_integer(2.into()) > ratio(26, 16),
    );
    checks.expect(
        "population best is 56/36",
        best_set_value == welfare_values[1],
    );

    writeln!(out)?;
    if checks.failures.is_empty() {
        writeln!(out, "All built-in checks passed.")?;
        Ok(())
    } else {
        writeln!(out, "{} built-in check(s) FAILED.", checks.failures.len())?;
        Err(CliError::ChecksFailed(checks.failures.join("\n")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_contains_the_expected_exact_fractions() {
        let mut out = Vec::new();
        execute(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("W(G_empty) = 35/36"));
        assert!(text.contains("W(G_0) = 56/36"));
        assert!(text.contains("W(G_1) = 46/36"));
        assert!(text.contains("G*_EWM = G_0"));
        assert!(text.contains("W_cf([1,1,0,0]) = 26/16"));
        assert!(text.contains("W_cf([1,0,1,0]) = 32/16 = 2"));
        assert!(text.contains("All built-in checks passed."));
    }
}
