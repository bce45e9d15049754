//! Rank-dependent social welfare functionals, evaluated exactly on step
//! CDFs.
//!
//! The Gini social welfare of an outcome distribution `P` supported on the
//! nonnegative reals is
//!
//! ```text
//! W(P) = integral over [0, inf) of (1 - P(y))^2 dy
//! ```
//!
//! which weights outcomes by rank and so penalizes inequality: moving mass
//! from high to low outcomes raises welfare. On a step CDF the integral is a
//! finite sum of rational terms, so welfare values of discrete mixtures come
//! out as exact fractions.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::distributions::StepCdf;
use crate::rational;

#[derive(Debug, Error)]
pub enum WelfareError {
    #[error("Gini integral defined on [0, inf); support starts at {0}")]
    NegativeSupport(f64),
    #[error("unknown welfare functional `{0}`; supported: gini, mean, neg_variance")]
    UnknownFunctional(String),
}

type Result<T> = std::result::Result<T, WelfareError>;

/// A welfare value: exact rational plus its float image via
/// [`WelfareValue::approx`]. Ordering compares the exact value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WelfareValue {
    exact: BigRational,
}

impl WelfareValue {
    fn new(exact: BigRational) -> Self {
        Self { exact }
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn approx(&self) -> f64 {
        rational::to_f64(&self.exact)
    }

    /// `true` when the value equals the integer fraction `numer/denom`.
    pub fn eq_fraction(&self, numer: i64, denom: i64) -> bool {
        rational::eq_ratio(&self.exact, numer, denom)
    }
}

impl fmt::Display for WelfareValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({:.6})", self.exact, self.approx())
    }
}

/// Gini social welfare of a step CDF supported on `[0, inf)`.
///
/// For steps at `0 <= y_1 < ... < y_k` with cumulative weights `P_j`, the
/// integral evaluates to `y_1 + sum_j (1 - P_j)^2 (y_{j+1} - y_j)`: the
/// segment below the first step contributes with weight one, each following
/// segment with the squared survival probability.
pub fn gini_welfare(cdf: &StepCdf) -> Result<WelfareValue> {
    let first = cdf.support()[0];
    if first < 0.0 {
        return Err(WelfareError::NegativeSupport(first));
    }
    let support: Vec<BigRational> = cdf
        .support()
        .iter()
        .map(|&y| rational::exact(y).expect("finite support"))
        .collect();
    let one = BigRational::one();
    let mut welfare = support[0].clone();
    for j in 0..support.len() - 1 {
        let survival = &one - &cdf.cumulative()[j];
        let gap = &support[j + 1] - &support[j];
        welfare += &survival * &survival * gap;
    }
    Ok(WelfareValue::new(welfare))
}

/// Mean of a step CDF, exact.
pub fn mean_welfare(cdf: &StepCdf) -> WelfareValue {
    let total = cdf
        .masses()
        .into_iter()
        .map(|(value, mass)| rational::exact(value).expect("finite support") * mass)
        .fold(BigRational::zero(), |acc, term| acc + term);
    WelfareValue::new(total)
}

/// Negative population variance of a step CDF, exact.
pub fn neg_variance_welfare(cdf: &StepCdf) -> WelfareValue {
    let mut mean = BigRational::zero();
    let mut second = BigRational::zero();
    for (value, mass) in cdf.masses() {
        let value = rational::exact(value).expect("finite support");
        mean += &value * &mass;
        second += &value * &value * mass;
    }
    WelfareValue::new(&mean * &mean - second)
}

/// The welfare functionals accepted by the policy optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WelfareFunctional {
    Gini,
    Mean,
    NegVariance,
}

impl WelfareFunctional {
    pub fn evaluate(&self, cdf: &StepCdf) -> Result<WelfareValue> {
        match self {
            WelfareFunctional::Gini => gini_welfare(cdf),
            WelfareFunctional::Mean => Ok(mean_welfare(cdf)),
            WelfareFunctional::NegVariance => Ok(neg_variance_welfare(cdf)),
        }
    }

    /// Evaluates on a plain sample through its ECDF, staying exact.
    pub fn evaluate_samples(&self, dist: &crate::distributions::EmpiricalDist) -> Result<WelfareValue> {
        self.evaluate(&crate::distributions::ecdf(dist))
    }

    pub fn name(&self) -> &'static str {
        match self {
            WelfareFunctional::Gini => "gini",
            WelfareFunctional::Mean => "mean",
            WelfareFunctional::NegVariance => "neg_variance",
        }
    }
}

impl FromStr for WelfareFunctional {
    type Err = WelfareError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gini" => Ok(WelfareFunctional::Gini),
            "mean" => Ok(WelfareFunctional::Mean),
            "neg_variance" => Ok(WelfareFunctional::NegVariance),
            other => Err(WelfareError::UnknownFunctional(other.to_string())),
        }
    }
}

impl fmt::Display for WelfareFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{mixture_of_pointmasses, StepCdf};
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn cdf(support: &[f64], cum: &[(i64, i64)]) -> StepCdf {
        StepCdf::new(
            support.to_vec(),
            cum.iter().map(|&(n, d)| ratio(n, d)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn worked_population_welfare_fractions() {
        // No treatment: steps (1/6, 3/6, 5/6, 1) at y = 0..3.
        let none = cdf(&[0.0, 1.0, 2.0, 3.0], &[(1, 6), (3, 6), (5, 6), (1, 1)]);
        assert!(gini_welfare(&none).unwrap().eq_fraction(35, 36));
        // Treat the x = 0 stratum: steps (1/3, 2/3, 1) at y = 1..3.
        let low = cdf(&[1.0, 2.0, 3.0], &[(1, 3), (2, 3), (1, 1)]);
        assert!(gini_welfare(&low).unwrap().eq_fraction(56, 36));
        // Treat the x = 1 stratum: steps (1/6, 2/6, 4/6, 5/6, 1) at y = 0..4.
        let high = cdf(
            &[0.0, 1.0, 2.0, 3.0, 4.0],
            &[(1, 6), (2, 6), (4, 6), (5, 6), (1, 1)],
        );
        assert!(gini_welfare(&high).unwrap().eq_fraction(46, 36));
    }

    #[test]
    fn point_mass_welfare_is_its_location() {
        let point = mixture_of_pointmasses(&[2.0, 2.0, 2.0, 2.0], None).unwrap();
        assert!(gini_welfare(&point).unwrap().eq_fraction(2, 1));
        assert!(gini_welfare(&point).unwrap().eq_fraction(32, 16));
    }

    #[test]
    fn sample_mixture_welfare() {
        // Treat units 1 and 2 of the observed four: outcomes (2, 3, 1, 2).
        let mixed = mixture_of_pointmasses(&[2.0, 3.0, 1.0, 2.0], None).unwrap();
        assert!(gini_welfare(&mixed).unwrap().eq_fraction(26, 16));
    }

    #[test]
    fn negative_support_is_rejected() {
        let shifted = mixture_of_pointmasses(&[-1.0, 2.0], None).unwrap();
        let err = gini_welfare(&shifted).unwrap_err();
        assert!(err.to_string().contains("[0, inf)"));
    }

    #[test]
    fn functional_dispatch() {
        let point = mixture_of_pointmasses(&[2.0], None).unwrap();
        let mean = WelfareFunctional::Mean.evaluate(&point).unwrap();
        assert!(mean.eq_fraction(2, 1));
        let constant = mixture_of_pointmasses(&[3.0, 3.0, 3.0], None).unwrap();
        let nv = WelfareFunctional::NegVariance.evaluate(&constant).unwrap();
        assert!(nv.eq_fraction(0, 1));
        let low = cdf(&[1.0, 2.0, 3.0], &[(1, 3), (2, 3), (1, 1)]);
        let gini = WelfareFunctional::Gini.evaluate(&low).unwrap();
        assert!(gini.eq_fraction(56, 36));
    }

    #[test]
    fn functionals_accept_plain_samples() {
        use crate::distributions::EmpiricalDist;
        let constant = EmpiricalDist::new(vec![3.0, 3.0, 3.0]).unwrap();
        let nv = WelfareFunctional::NegVariance.evaluate_samples(&constant).unwrap();
        assert!(nv.eq_fraction(0, 1));
        let spread = EmpiricalDist::new(vec![0.0, 2.0]).unwrap();
        let nv = WelfareFunctional::NegVariance.evaluate_samples(&spread).unwrap();
        assert!(nv.eq_fraction(-1, 1));
        let mean = WelfareFunctional::Mean.evaluate_samples(&spread).unwrap();
        assert!(mean.eq_fraction(1, 1));
    }

    #[test]
    fn unknown_functional_lists_supported_names() {
        let err = "median".parse::<WelfareFunctional>().unwrap_err();
        let message = err.to_string();
        assert!(message.contains("gini") && message.contains("neg_variance"));
    }

    /// Independent rank-weighted form: for equal point masses at sorted
    /// values, `W = sum_i x_(i) * ((n - i + 1)^2 - (n - i)^2) / n^2`.
    fn rank_weighted_gini(outcomes: &[f64]) -> BigRational {
        let n = outcomes.len() as i64;
        let mut sorted = outcomes.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted
            .iter()
            .enumerate()
            .map(|(idx, &x)| {
                let i = idx as i64 + 1;
                let weight = ratio((n - i + 1).pow(2) - (n - i).pow(2), n * n);
                crate::rational::exact(x).unwrap() * weight
            })
            .sum()
    }

    proptest! {
        #[test]
        fn integral_matches_rank_weighted_form(
            values in proptest::collection::vec(0.0f64..20.0, 1..25),
        ) {
            let cdf = mixture_of_pointmasses(&values, None).unwrap();
            let integral = gini_welfare(&cdf).unwrap();
            prop_assert_eq!(integral.exact().clone(), rank_weighted_gini(&values));
        }

        #[test]
        fn first_order_dominance_implies_higher_welfare(
            values in proptest::collection::vec(0.0f64..20.0, 1..25),
            lifts in proptest::collection::vec(0.0f64..5.0, 25),
        ) {
            let lifted: Vec<f64> = values
                .iter()
                .zip(&lifts)
                .map(|(v, l)| v + l)
                .collect();
            let base = gini_welfare(&mixture_of_pointmasses(&values, None).unwrap()).unwrap();
            let better = gini_welfare(&mixture_of_pointmasses(&lifted, None).unwrap()).unwrap();
            prop_assert!(better >= base);
        }

        #[test]
        fn point_mass_welfare_equals_location(c in 0.0f64..100.0) {
            let point = mixture_of_pointmasses(&[c], None).unwrap();
            let w = gini_welfare(&point).unwrap();
            prop_assert_eq!(w.exact().clone(), crate::rational::exact(c).unwrap());
        }
    }
}
