//! Outcome distributions: empirical samples, exact step CDFs, and Gaussian
//! kernel density estimates.
//!
//! [`StepCdf`] keeps its cumulative weights as exact rationals so that
//! welfare functionals evaluated on discrete mixtures come out as exact
//! fractions; floats appear only in [`EmpiricalDist`].

use std::io::Write;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational;

#[derive(Debug, Error)]
pub enum DistributionError {
    #[error("empirical distribution must contain at least one sample")]
    Empty,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("variance requires at least two samples")]
    TooFewSamples,
    #[error("weights must be positive and sum to exactly 1")]
    BadWeights,
    #[error("weights must match outcomes ({outcomes} outcomes, {weights} weights)")]
    WeightArity { outcomes: usize, weights: usize },
    #[error("step CDF must have matching, non-empty support and cumulative lists")]
    MalformedCdf,
    #[error("step CDF support must be strictly increasing and finite")]
    UnsortedSupport,
    #[error("cumulative weights must be nondecreasing in (0, 1] and end at exactly 1")]
    BadCumulative,
    #[error("density grid must be non-empty")]
    EmptyGrid,
    #[error("bandwidth must be positive and finite")]
    BadBandwidth,
    #[error("automatic bandwidth needs a sample with positive dispersion")]
    DegenerateBandwidth,
    #[error("csv write failed: {0}")]
    Io(#[from] std::io::Error),
}

type Result<T> = std::result::Result<T, DistributionError>;

// ── Empirical distributions ────────────────────────────────────────────

/// A plain sample of real outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDist {
    samples: Vec<f64>,
}

impl EmpiricalDist {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(DistributionError::Empty);
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(DistributionError::NonFinite);
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

/// Population variance (divide by `n`): in counterfactual treatment choice
/// the sample is the whole population of interest.
pub fn variance(dist: &EmpiricalDist) -> Result<f64> {
    if dist.len() < 2 {
        return Err(DistributionError::TooFewSamples);
    }
    let mean = dist.mean();
    Ok(dist.samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / dist.len() as f64)
}

// ── Step CDFs ──────────────────────────────────────────────────────────

/// Right-continuous step CDF with exact rational cumulative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    support: Vec<f64>,
    cum: Vec<BigRational>,
}

impl StepCdf {
    pub fn new(support: Vec<f64>, cum: Vec<BigRational>) -> Result<Self> {
        if support.is_empty() || support.len() != cum.len() {
            return Err(DistributionError::MalformedCdf);
        }
        if support.iter().any(|v| !v.is_finite())
            || support.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(DistributionError::UnsortedSupport);
        }
        let one = BigRational::one();
        let mut previous = BigRational::zero();
        for value in &cum {
            if *value <= BigRational::zero() || *value < previous || *value > one {
                return Err(DistributionError::BadCumulative);
            }
            previous = value.clone();
        }
        if previous != one {
            return Err(DistributionError::BadCumulative);
        }
        Ok(Self { support, cum })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn cumulative(&self) -> &[BigRational] {
        &self.cum
    }

    /// Step probabilities `(value, mass)`.
    pub fn masses(&self) -> Vec<(f64, BigRational)> {
        let mut previous = BigRational::zero();
        self.support
            .iter()
            .zip(&self.cum)
            .map(|(&value, cum)| {
                let mass = cum - &previous;
                previous = cum.clone();
                (value, mass)
            })
            .collect()
    }

    /// CDF value at `y` (right-continuous).
    pub fn at(&self, y: f64) -> BigRational {
        match self.support.partition_point(|&s| s <= y) {
            0 => BigRational::zero(),
            idx => self.cum[idx - 1].clone(),
        }
    }

    /// CDF value at `y` as a float.
    pub fn at_f64(&self, y: f64) -> f64 {
        rational::to_f64(&self.at(y))
    }

    /// Mixture of step CDFs with exact weights summing to 1.
    pub fn mix(parts: &[(BigRational, StepCdf)]) -> Result<StepCdf> {
        if parts.is_empty() {
            return Err(DistributionError::Empty);
        }
        let total: BigRational = parts.iter().map(|(w, _)| w.clone()).sum();
        if !total.is_one() || parts.iter().any(|(w, _)| *w < BigRational::zero()) {
            return Err(DistributionError::BadWeights);
        }
        let mut points: Vec<(f64, BigRational)> = Vec::new();
        for (weight, cdf) in parts {
            for (value, mass) in cdf.masses() {
                points.push((value, weight * mass));
            }
        }
        from_weighted_points(points)
    }

    /// Writes the CDF as CSV with columns `y,cdf`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut writer = writer;
        writeln!(writer, "y,cdf")?;
        for (value, cum) in self.support.iter().zip(&self.cum) {
            writeln!(writer, "{},{}", value, rational::to_f64(cum))?;
        }
        Ok(())
    }
}

fn from_weighted_points(mut points: Vec<(f64, BigRational)>) -> Result<StepCdf> {
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite support"));
    let mut support = Vec::new();
    let mut cum: Vec<BigRational> = Vec::new();
    let mut running = BigRational::zero();
    for (value, mass) in points {
        if rational::is_zero(&mass) {
            continue;
        }
        running += mass;
        if support.last() == Some(&value) {
            *cum.last_mut().expect("non-empty") = running.clone();
        } else {
            support.push(value);
            cum.push(running.clone());
        }
    }
    StepCdf::new(support, cum)
}

/// Exact step CDF of a mixture of per-unit point masses.
///
/// `weights` defaults to uniform `1/n` and must sum to exactly 1.
pub fn mixture_of_pointmasses(
    outcomes: &[f64],
    weights: Option<&[BigRational]>,
) -> Result<StepCdf> {
    if outcomes.is_empty() {
        return Err(DistributionError::Empty);
    }
    if outcomes.iter().any(|v| !v.is_finite()) {
        return Err(DistributionError::NonFinite);
    }
    let weights: Vec<BigRational> = match weights {
        Some(w) => {
            if w.len() != outcomes.len() {
                return Err(DistributionError::WeightArity {
                    outcomes: outcomes.len(),
                    weights: w.len(),
                });
            }
            if w.iter().any(|x| *x < BigRational::zero())
                || w.iter().cloned().sum::<BigRational>() != BigRational::one()
            {
                return Err(DistributionError::BadWeights);
            }
            w.to_vec()
        }
        None => {
            let uniform = BigRational::new(1.into(), (outcomes.len() as i64).into());
            vec![uniform; outcomes.len()]
        }
    };
    from_weighted_points(outcomes.iter().copied().zip(weights).collect())
}

/// Standard empirical CDF with rational weights `k/n`.
pub fn ecdf(dist: &EmpiricalDist) -> StepCdf {
    mixture_of_pointmasses(dist.samples(), None).expect("validated sample")
}

// ── Kernel density estimation ──────────────────────────────────────────

/// Bandwidth selection for [`kde_density`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// Silverman's rule of thumb.
    Auto,
    Fixed(f64),
}

/// Silverman bandwidth `0.9 * min(sd, iqr / 1.34) * n^(-1/5)`.
pub fn silverman_bandwidth(dist: &EmpiricalDist) -> Result<f64> {
    let sd = variance(dist).unwrap_or(0.0).sqrt();
    let mut sorted = dist.samples().to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = 0.9 * spread * (dist.len() as f64).powf(-0.2);
    if h > 0.0 && h.is_finite() {
        Ok(h)
    } else {
        Err(DistributionError::DegenerateBandwidth)
    }
}

/// Linear-interpolation quantile of a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Gaussian kernel density estimate evaluated on `grid`.
pub fn kde_density(
    dist: &EmpiricalDist,
    bandwidth: Bandwidth,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if grid.is_empty() {
        return Err(DistributionError::EmptyGrid);
    }
    let h = match bandwidth {
        Bandwidth::Auto => silverman_bandwidth(dist)?,
        Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => h,
        Bandwidth::Fixed(_) => return Err(DistributionError::BadBandwidth),
    };
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h * dist.len() as f64);
    Ok(grid
        .iter()
        .map(|&y| {
            let density = dist
                .samples()
                .iter()
                .map(|&x| (-0.5 * ((y - x) / h).powi(2)).exp())
                .sum::<f64>()
                * norm;
            (y, density)
        })
        .collect())
}

/// Evenly spaced grid spanning the sample range plus five bandwidths on
/// each side.
pub fn kde_grid(dist: &EmpiricalDist, bandwidth: f64, points: usize) -> Vec<f64> {
    let lo = dist.samples().iter().copied().fold(f64::INFINITY, f64::min) - 5.0 * bandwidth;
    let hi = dist.samples().iter().copied().fold(f64::NEG_INFINITY, f64::max) + 5.0 * bandwidth;
    let step = (hi - lo) / (points.max(2) - 1) as f64;
    (0..points.max(2)).map(|i| lo + step * i as f64).collect()
}

/// Writes a density curve as CSV with columns `y,density`.
pub fn write_density_csv<W: Write>(curve: &[(f64, f64)], writer: W) -> Result<()> {
    let mut writer = writer;
    writeln!(writer, "y,density")?;
    for (y, density) in curve {
        writeln!(writer, "{y},{density}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{eq_ratio, ratio};
    use proptest::prelude::*;

    #[test]
    fn mixture_reproduces_treated_units_distribution() {
        // Treating the first two of the observed four units yields outcomes
        // (2, 3, 1, 2): pmf {1: 1/4, 2: 1/2, 3: 1/4}.
        let cdf = mixture_of_pointmasses(&[2.0, 3.0, 1.0, 2.0], None).unwrap();
        assert_eq!(cdf.support(), &[1.0, 2.0, 3.0]);
        let masses = cdf.masses();
        assert!(eq_ratio(&masses[0].1, 1, 4));
        assert!(eq_ratio(&masses[1].1, 1, 2));
        assert!(eq_ratio(&masses[2].1, 1, 4));
    }

    #[test]
    fn mixture_collapses_to_point_mass() {
        let cdf = mixture_of_pointmasses(&[2.0, 2.0, 2.0, 2.0], None).unwrap();
        assert_eq!(cdf.support(), &[2.0]);
        assert!(cdf.at(1.999).is_zero());
        assert!(cdf.at(2.0).is_one());
        assert!(cdf.at(10.0).is_one());
    }

    #[test]
    fn single_outcome_is_one_step() {
        let cdf = mixture_of_pointmasses(&[0.5], None).unwrap();
        assert_eq!(cdf.support(), &[0.5]);
        assert!(cdf.at(0.5).is_one());
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            mixture_of_pointmasses(&[], None).unwrap_err(),
            DistributionError::Empty
        ));
    }

    #[test]
    fn ecdf_of_two_points() {
        let dist = EmpiricalDist::new(vec![0.0, 1.0]).unwrap();
        let cdf = ecdf(&dist);
        assert!(cdf.at(-0.1).is_zero());
        assert!(eq_ratio(&cdf.at(0.0), 1, 2));
        assert!(eq_ratio(&cdf.at(0.5), 1, 2));
        assert!(cdf.at(1.0).is_one());
    }

    #[test]
    fn ecdf_aggregates_ties() {
        let dist = EmpiricalDist::new(vec![1.0, 1.0, 2.0]).unwrap();
        let cdf = ecdf(&dist);
        assert_eq!(cdf.support(), &[1.0, 2.0]);
        assert!(eq_ratio(&cdf.at(1.0), 2, 3));
        assert!(cdf.at(2.0).is_one());
    }

    #[test]
    fn ecdf_matches_normal_cdf_at_zero() {
        use crate::models;
        let n = 100_000;
        let sample = models::school_scm(0.0, 1.0)
            .sample_observational(n, 5)
            .unwrap();
        let z = EmpiricalDist::new(sample.column("Z").unwrap().to_vec()).unwrap();
        let cdf = ecdf(&z);
        assert!((cdf.at_f64(0.0) - 0.5).abs() < 0.01);
    }

    #[test]
    fn variance_of_constant_and_two_point_samples() {
        let constant = EmpiricalDist::new(vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(variance(&constant).unwrap(), 0.0);
        let pair = EmpiricalDist::new(vec![0.0, 2.0]).unwrap();
        assert_eq!(variance(&pair).unwrap(), 1.0);
        let single = EmpiricalDist::new(vec![1.0]).unwrap();
        assert!(matches!(
            variance(&single).unwrap_err(),
            DistributionError::TooFewSamples
        ));
    }

    #[test]
    fn kde_single_sample_is_the_kernel() {
        let dist = EmpiricalDist::new(vec![0.0]).unwrap();
        let grid = [-1.0, 0.0, 1.0];
        let curve = kde_density(&dist, Bandwidth::Fixed(1.0), &grid).unwrap();
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        for ((y, density), expected) in curve.iter().zip(grid.iter().map(|&x| phi(x))) {
            assert!((density - expected).abs() < 1e-12, "at {y}");
        }
    }

    #[test]
    fn kde_peak_matches_standard_normal_density() {
        use crate::models;
        let sample = models::school_scm(0.0, 1.0)
            .sample_observational(10_000, 9)
            .unwrap();
        let z = EmpiricalDist::new(sample.column("Z").unwrap().to_vec()).unwrap();
        let curve = kde_density(&z, Bandwidth::Auto, &[0.0]).unwrap();
        let target = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((curve[0].1 - target).abs() < 0.05, "density {}", curve[0].1);
    }

    #[test]
    fn kde_is_symmetric_for_symmetric_samples() {
        let dist = EmpiricalDist::new(vec![-1.0, 1.0]).unwrap();
        let curve = kde_density(&dist, Bandwidth::Fixed(0.1), &[-1.0, 1.0]).unwrap();
        assert!((curve[0].1 - curve[1].1).abs() < 1e-9);
    }

    #[test]
    fn kde_integrates_to_one_on_a_wide_grid() {
        use crate::models;
        let sample = models::school_scm(0.0, 1.0)
            .sample_observational(2000, 13)
            .unwrap();
        let y = EmpiricalDist::new(sample.column("Y").unwrap().to_vec()).unwrap();
        let h = silverman_bandwidth(&y).unwrap();
        let grid = kde_grid(&y, h, 2001);
        let curve = kde_density(&y, Bandwidth::Fixed(h), &grid).unwrap();
        let step = grid[1] - grid[0];
        let integral: f64 = curve.windows(2).map(|w| (w[0].1 + w[1].1) / 2.0 * step).sum();
        assert!((integral - 1.0).abs() < 1e-2, "integral {integral}");
    }

    #[test]
    fn empty_grid_is_an_error() {
        let dist = EmpiricalDist::new(vec![0.0]).unwrap();
        assert!(matches!(
            kde_density(&dist, Bandwidth::Fixed(1.0), &[]).unwrap_err(),
            DistributionError::EmptyGrid
        ));
    }

    #[test]
    fn csv_schemas_are_stable() {
        let cdf = mixture_of_pointmasses(&[1.0, 2.0], None).unwrap();
        let mut cdf_out = Vec::new();
        cdf.write_csv(&mut cdf_out).unwrap();
        let text = String::from_utf8(cdf_out).unwrap();
        assert!(text.starts_with("y,cdf\n"));
        assert!(text.contains("1,0.5"));

        let mut density_out = Vec::new();
        write_density_csv(&[(0.0, 0.4)], &mut density_out).unwrap();
        assert!(String::from_utf8(density_out).unwrap().starts_with("y,density\n"));
    }

    #[test]
    fn mix_recovers_worked_population_cdf() {
        // Half weight on Uniform{0,1,2}, half on Uniform{1,2,3}: the
        // no-treatment population CDF (1/6, 3/6, 5/6, 1).
        let lo = mixture_of_pointmasses(&[0.0, 1.0, 2.0], None).unwrap();
        let hi = mixture_of_pointmasses(&[1.0, 2.0, 3.0], None).unwrap();
        let mixed = StepCdf::mix(&[(ratio(1, 2), lo), (ratio(1, 2), hi)]).unwrap();
        assert_eq!(mixed.support(), &[0.0, 1.0, 2.0, 3.0]);
        assert!(eq_ratio(&mixed.at(0.0), 1, 6));
        assert!(eq_ratio(&mixed.at(1.0), 3, 6));
        assert!(eq_ratio(&mixed.at(2.0), 5, 6));
        assert!(mixed.at(3.0).is_one());
    }

    proptest! {
        #[test]
        fn step_cdfs_are_monotone_and_terminal(values in proptest::collection::vec(-50.0f64..50.0, 1..40)) {
            let cdf = mixture_of_pointmasses(&values, None).unwrap();
            let cums = cdf.cumulative();
            for pair in cums.windows(2) {
                prop_assert!(pair[0] <= pair[1]);
            }
            prop_assert!(cums.last().unwrap().is_one());
            // Right continuity: at the step the value includes the mass.
            for (i, &s) in cdf.support().iter().enumerate() {
                prop_assert_eq!(&cdf.at(s), &cums[i]);
            }
        }

        #[test]
        fn mixture_equals_ecdf_under_uniform_weights(values in proptest::collection::vec(-5.0f64..5.0, 1..30)) {
            let dist = EmpiricalDist::new(values.clone()).unwrap();
            prop_assert_eq!(mixture_of_pointmasses(&values, None).unwrap(), ecdf(&dist));
        }

        #[test]
        fn variance_is_translation_invariant_and_scales_quadratically(
            values in proptest::collection::vec(-10.0f64..10.0, 2..30),
            shift in -5.0f64..5.0,
            scale in 0.1f64..4.0,
        ) {
            let base = variance(&EmpiricalDist::new(values.clone()).unwrap()).unwrap();
            let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
            let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
            let shifted_var = variance(&EmpiricalDist::new(shifted).unwrap()).unwrap();
            let scaled_var = variance(&EmpiricalDist::new(scaled).unwrap()).unwrap();
            prop_assert!((shifted_var - base).abs() < 1e-9 * (1.0 + base));
            prop_assert!((scaled_var - scale * scale * base).abs() < 1e-9 * (1.0 + scaled_var));
        }

        #[test]
        fn kde_is_nonnegative(
            values in proptest::collection::vec(-10.0f64..10.0, 1..20),
            grid_point in -20.0f64..20.0,
        ) {
            let dist = EmpiricalDist::new(values).unwrap();
            let curve = kde_density(&dist, Bandwidth::Fixed(0.5), &[grid_point]).unwrap();
            prop_assert!(curve[0].1 >= 0.0);
        }
    }
}
