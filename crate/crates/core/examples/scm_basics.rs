//! Build a structural causal model, sample it, intervene on it, and run
//! the abduction–action–prediction counterfactual pipeline.
//!
//! Run: cargo run --example scm_basics

use cfchoice::scm::{Intervention, NoiseLaw, Scm, ScmVariable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // X = U_X, Z = U_Z, Y = X + Z + U_Y.
    let scm = Scm::new(vec![
        ScmVariable::exogenous("X", "U_X", NoiseLaw::Bernoulli { p: 0.5 }),
        ScmVariable::exogenous("Z", "U_Z", NoiseLaw::Bernoulli { p: 0.5 }),
        ScmVariable::additive(
            "Y",
            &["X", "Z"],
            &[1.0, 1.0],
            "U_Y",
            NoiseLaw::DiscreteUniform {
                support: vec![0.0, 1.0, 2.0],
            },
        ),
    ])?;
    println!("variables (topological order): {:?}", scm.topological_order());

    let sample = scm.sample_observational(8, 42)?;
    println!("\nobservational sample (n = {}):", sample.n());
    println!("  unit   X  Z  Y");
    for unit in 0..sample.n() {
        println!(
            "  {:>4}   {}  {}  {}",
            unit,
            sample.value("X", unit).unwrap(),
            sample.value("Z", unit).unwrap(),
            sample.value("Y", unit).unwrap()
        );
    }

    // Abduction: recover each unit's exogenous values exactly.
    let posterior = scm.abduct(&sample)?;
    println!("\nabducted U_Y per unit: {:?}", posterior.column("U_Y").unwrap());

    // Action + prediction: what would Y have been under do(Z = 1)?
    let treated = scm.counterfactual_sample(&sample, &Intervention::atomic("Z", 1.0))?;
    println!("counterfactual Y under do(Z=1): {:?}", treated.column("Y").unwrap());

    // X is not downstream of Z, so it is untouched.
    assert_eq!(treated.column("X"), sample.column("X"));

    // The factual intervention returns the observations themselves.
    let factual_values: Vec<f64> = (0..sample.n())
        .map(|unit| sample.value("Z", unit).unwrap())
        .collect();
    println!("\nfactual Z values: {factual_values:?}");
    Ok(())
}
