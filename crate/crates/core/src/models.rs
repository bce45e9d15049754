//! Catalog of the models used by the CLI, the examples, and the tests.

use crate::policy::{TreatmentProblem, TreatmentTemplate};
use crate::scm::{NoiseLaw, Sample, Scm, ScmVariable};

/// Binary-covariate treatment model:
/// `X = U_X`, `Z = U_Z`, `Y = X + Z + U_Y` with
/// `U_X, U_Z ~ Bernoulli(1/2)` and `U_Y ~ Uniform{0, 1, 2}`.
pub fn binary_treatment_scm() -> Scm {
    Scm::new(vec![
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
    ])
    .expect("catalog model is valid")
}

/// The four observed units used throughout the worked treatment-choice
/// example: X = (0,0,1,1), Z = 0, Y = (1,2,1,2).
pub fn observed_four_units() -> Sample {
    Sample::from_columns([
        ("X", vec![0.0, 0.0, 1.0, 1.0]),
        ("Z", vec![0.0, 0.0, 0.0, 0.0]),
        ("Y", vec![1.0, 2.0, 1.0, 2.0]),
    ])
    .expect("catalog sample is valid")
}

/// Treatment-choice problem for [`binary_treatment_scm`]: covariate `X`,
/// outcome `Y`, treatment `do(Z = 0)` vs `do(Z = 1)`.
pub fn binary_treatment_problem() -> TreatmentProblem {
    TreatmentProblem {
        covariate: "X".into(),
        outcome: "Y".into(),
        template: TreatmentTemplate::Atomic {
            variable: "Z".into(),
            control: 0.0,
            treated: 1.0,
        },
    }
}

/// Two-variable model `Z = U_Z`, `Y = Z + U_Y` with
/// `U_Z ~ N(mu_z, sigma_z^2)` and `U_Y ~ N(0, 1)`.
///
/// This is the time-zero slice of the two-period simulation; shifting `Z`
/// per unit plays the role of the period-one treatment.
pub fn school_scm(mu_z: f64, sigma_z: f64) -> Scm {
    Scm::new(vec![
        ScmVariable::exogenous(
            "Z",
            "U_Z",
            NoiseLaw::Normal {
                mean: mu_z,
                variance: sigma_z * sigma_z,
            },
        ),
        ScmVariable::additive(
            "Y",
            &["Z"],
            &[1.0],
            "U_Y",
            NoiseLaw::Normal {
                mean: 0.0,
                variance: 1.0,
            },
        ),
    ])
    .expect("catalog model is valid")
}
