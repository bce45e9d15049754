//! Two-period simulation contrasting interventional and counterfactual
//! predictions of post-treatment outcomes.
//!
//! Ground truth per unit `i`:
//!
//! ```text
//! Z0 = U_Z,            U_Z   ~ N(mu_z, sigma_z^2)
//! Y0 = Z0 + U_0,       U_0   ~ N(mu_u_i, sigma_u^2)
//! Z1 = Z0 + delta * w
//! Y1 = Z1 + U_1,       U_1   ~ N(mu_u_i, sigma_u^2)   (fresh at t = 1)
//! mu_u_i ~ N(0, sigma_mu^2)
//! ```
//!
//! `sigma_u` controls *stability* (how a unit's unobserved factors compare
//! to itself across periods) and `sigma_mu` controls *structure* (how units
//! compare to each other). The modeler sees only `(Z0, Y0)`, whose period-0
//! law is matched exactly by `U_0 ~ N(0, sigma_mu^2 + sigma_u^2)`; the two
//! estimators differ in what they do with that noise at `t = 1`:
//!
//! - the *interventional* estimate redraws it from the marginal prior,
//! - the *counterfactual* estimate carries each unit's abducted value
//!   forward: `Y1 = Z1 + (Y0 - Z0)`, which simplifies to `Y0 + delta * w`.
//!
//! The generator computes the true `Y1` as `(Y0 + delta * w) + (U_1 - U_0)`
//! — algebraically `Z1 + U_1` — so that when `sigma_u = 0` (where
//! `U_1 = U_0` holds exactly) the counterfactual estimate reproduces the
//! truth bit-for-bit.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::distributions::{variance, DistributionError, EmpiricalDist};
use crate::kl::{knn_kl, KlError};
use crate::substream;

#[derive(Debug, Error)]
pub enum ForwardSimError {
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
    #[error("parameter grid must be non-empty")]
    EmptyGrid,
    #[error(transparent)]
    Kl(#[from] KlError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
}

type Result<T> = std::result::Result<T, ForwardSimError>;

/// Parameters of one simulated population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityParams {
    pub n: usize,
    pub mu_z: f64,
    pub sigma_z: f64,
    /// Within-unit noise standard deviation (stability).
    pub sigma_u: f64,
    /// Across-unit mean standard deviation (structure).
    pub sigma_mu: f64,
    pub delta: f64,
    pub seed: u64,
}

impl StabilityParams {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(ForwardSimError::InvalidParams("n must be at least 1".into()));
        }
        for (name, value) in [
            ("sigma_z", self.sigma_z),
            ("sigma_u", self.sigma_u),
            ("sigma_mu", self.sigma_mu),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(ForwardSimError::InvalidParams(format!(
                    "{name} must be finite and >= 0"
                )));
            }
        }
        if !self.mu_z.is_finite() || !self.delta.is_finite() {
            return Err(ForwardSimError::InvalidParams(
                "mu_z and delta must be finite".into(),
            ));
        }
        Ok(())
    }

    /// The modeler's period-0 marginal noise variance.
    pub fn marginal_noise_variance(&self) -> f64 {
        self.sigma_mu * self.sigma_mu + self.sigma_u * self.sigma_u
    }
}

/// Who gets treated, as a function of period-0 observables `(z0, y0)`.
#[derive(Clone)]
pub enum TreatmentRule {
    /// Treat units with `y0 < 0`.
    NegativeOutcome,
    Custom(Arc<dyn Fn(f64, f64) -> bool + Send + Sync>),
}

impl TreatmentRule {
    pub fn decide(&self, z0: f64, y0: f64) -> bool {
        match self {
            TreatmentRule::NegativeOutcome => y0 < 0.0,
            TreatmentRule::Custom(rule) => rule(z0, y0),
        }
    }
}

impl std::fmt::Debug for TreatmentRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TreatmentRule::NegativeOutcome => f.write_str("NegativeOutcome"),
            TreatmentRule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// One simulated population: observables, treatment, and true period-1
/// outcomes, with the hidden exogenous draws retained for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStepData {
    pub mu_u: Vec<f64>,
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
    pub z0: Vec<f64>,
    pub y0: Vec<f64>,
    pub w: Vec<u8>,
    pub z1: Vec<f64>,
    pub y1_true: Vec<f64>,
}

impl TwoStepData {
    pub fn n(&self) -> usize {
        self.y0.len()
    }

    pub fn treated_count(&self) -> usize {
        self.w.iter().map(|&w| w as usize).sum()
    }
}

fn normal_draw(seed: u64, unit: usize, label: &str) -> f64 {
    substream::stream(seed, unit as u64, label).sample(StandardNormal)
}

/// Carried-forward counterfactual prediction for one unit. Kept as a single
/// expression so the generator and the estimator produce identical floats.
#[inline]
fn carried_forward(y0: f64, delta: f64, w: u8) -> f64 {
    y0 + delta * f64::from(w)
}

/// Simulates the ground-truth generator under `rule`.
///
/// Deterministic given `params.seed`; each `(unit, noise)` pair has its own
/// substream.
pub fn generate_truth(params: &StabilityParams, rule: &TreatmentRule) -> Result<TwoStepData> {
    params.validate()?;
    let n = params.n;
    let mut data = TwoStepData {
        mu_u: Vec::with_capacity(n),
        u0: Vec::with_capacity(n),
        u1: Vec::with_capacity(n),
        z0: Vec::with_capacity(n),
        y0: Vec::with_capacity(n),
        w: Vec::with_capacity(n),
        z1: Vec::with_capacity(n),
        y1_true: Vec::with_capacity(n),
    };
    let seed = params.seed;
    for unit in 0..n {
        let mu_u = params.sigma_mu * normal_draw(seed, unit, "mu_u");
        let u0 = mu_u + params.sigma_u * normal_draw(seed, unit, "u0");
        let u1 = mu_u + params.sigma_u * normal_draw(seed, unit, "u1");
        let z0 = params.mu_z + params.sigma_z * normal_draw(seed, unit, "u_z");
        let y0 = z0 + u0;
        let w = u8::from(rule.decide(z0, y0));
        let z1 = z0 + params.delta * f64::from(w);
        let y1_true = carried_forward(y0, params.delta, w) + (u1 - u0);
        data.mu_u.push(mu_u);
        data.u0.push(u0);
        data.u1.push(u1);
        data.z0.push(z0);
        data.y0.push(y0);
        data.w.push(w);
        data.z1.push(z1);
        data.y1_true.push(y1_true);
    }
    Ok(data)
}

/// Interventional estimate of the period-1 outcomes: keeps each unit's
/// realized `Z1` but redraws the outcome noise from the modeler's marginal
/// prior `N(0, sigma_mu^2 + sigma_u^2)`.
pub fn estimate_interventional(
    data: &TwoStepData,
    params: &StabilityParams,
) -> Result<(Vec<f64>, EmpiricalDist)> {
    params.validate()?;
    let sd = params.marginal_noise_variance().sqrt();
    let y1: Vec<f64> = (0..data.n())
        .map(|unit| data.z1[unit] + sd * normal_draw(params.seed, unit, "u1_model"))
        .collect();
    let dist = EmpiricalDist::new(y1.clone())?;
    Ok((y1, dist))
}

/// Forward-looking counterfactual estimate: abduction gives
/// `U0 = Y0 - Z0`, carrying it forward yields `Y1 = Z1 + U0 = Y0 + delta*w`
/// exactly. Untreated units keep `Y0` bit-for-bit; treated units move by
/// exactly `delta`.
pub fn estimate_counterfactual(
    data: &TwoStepData,
    params: &StabilityParams,
) -> Result<(Vec<f64>, EmpiricalDist)> {
    params.validate()?;
    let y1: Vec<f64> = (0..data.n())
        .map(|unit| carried_forward(data.y0[unit], params.delta, data.w[unit]))
        .collect();
    let dist = EmpiricalDist::new(y1.clone())?;
    Ok((y1, dist))
}

// ── Parameter sweeps ───────────────────────────────────────────────────

/// Grid of `(sigma_u, sigma_mu, delta)` combinations to sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub sigma_u_values: Vec<f64>,
    pub sigma_mu_values: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Neighbor count for the KL estimates.
    pub k: usize,
}

/// One grid point's divergences and variances.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub sigma_u: f64,
    pub sigma_mu: f64,
    pub delta: f64,
    pub n: usize,
    pub seed: u64,
    pub kl_true_vs_int: f64,
    pub kl_true_vs_cf: f64,
    pub var_y0: f64,
    pub var_y1_true: f64,
    pub var_y1_cf: f64,
    pub var_y1_int: f64,
}

/// Runs the full grid. Each point gets an independent seed derived from
/// `(master seed, sigma_u index, sigma_mu index, delta)`, points evaluate
/// in parallel, and rows come back in grid order (delta outermost, then
/// sigma_mu, then sigma_u), so reruns are bit-identical regardless of
/// thread count.
pub fn run_grid(
    base: &StabilityParams,
    grid: &GridSpec,
    rule: &TreatmentRule,
) -> Result<Vec<GridRow>> {
    base.validate()?;
    if grid.sigma_u_values.is_empty() || grid.sigma_mu_values.is_empty() || grid.deltas.is_empty()
    {
        return Err(ForwardSimError::EmptyGrid);
    }
    let mut points = Vec::new();
    for &delta in &grid.deltas {
        for (imu, &sigma_mu) in grid.sigma_mu_values.iter().enumerate() {
            for (iu, &sigma_u) in grid.sigma_u_values.iter().enumerate() {
                points.push((iu, imu, sigma_u, sigma_mu, delta));
            }
        }
    }
    points
        .into_par_iter()
        .map(|(iu, imu, sigma_u, sigma_mu, delta)| {
            let seed = substream::derive_seed(
                base.seed,
                &[iu as u64, imu as u64, delta.to_bits()],
            );
            let params = StabilityParams {
                sigma_u,
                sigma_mu,
                delta,
                seed,
                ..*base
            };
            grid_point(&params, grid.k, rule)
        })
        .collect()
}

fn grid_point(params: &StabilityParams, k: usize, rule: &TreatmentRule) -> Result<GridRow> {
    let data = generate_truth(params, rule)?;
    let (int_col, int_dist) = estimate_interventional(&data, params)?;
    let (_cf_col, cf_dist) = estimate_counterfactual(&data, params)?;
    let truth = EmpiricalDist::new(data.y1_true.clone())?;
    let y0 = EmpiricalDist::new(data.y0.clone())?;
    let kl_true_vs_int = knn_kl(truth.samples(), &int_col, k)?.value;
    let kl_true_vs_cf = knn_kl(truth.samples(), cf_dist.samples(), k)?.value;
    Ok(GridRow {
        sigma_u: params.sigma_u,
        sigma_mu: params.sigma_mu,
        delta: params.delta,
        n: params.n,
        seed: params.seed,
        kl_true_vs_int,
        kl_true_vs_cf,
        var_y0: variance(&y0)?,
        var_y1_true: variance(&truth)?,
        var_y1_cf: variance(&cf_dist)?,
        var_y1_int: variance(&int_dist)?,
    })
}

/// Writes grid rows as CSV with the documented column set.
pub fn write_grid_csv<W: std::io::Write>(rows: &[GridRow], writer: W) -> std::io::Result<()> {
    let mut writer = writer;
    writeln!(
        writer,
        "sigma_u,sigma_mu,delta,n,seed,kl_true_vs_int,kl_true_vs_cf,\
         var_y0,var_y1_true,var_y1_cf,var_y1_int"
    )?;
    for row in rows {
        writeln!(
            writer,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.sigma_u,
            row.sigma_mu,
            row.delta,
            row.n,
            row.seed,
            row.kl_true_vs_int,
            row.kl_true_vs_cf,
            row.var_y0,
            row.var_y1_true,
            row.var_y1_cf,
            row.var_y1_int
        )?;
    }
    Ok(())
}

// ── Analytic variance targets ──────────────────────────────────────────

/// Normal-theory variances of the four period-1 quantities under the
/// threshold rule `treat when Y0 < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticVariances {
    pub y0: f64,
    pub y1_true: f64,
    pub y1_cf: f64,
    pub y1_int: f64,
}

/// Abramowitz–Stegun 7.1.26 rational approximation (|error| < 1.5e-7).
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// Standard normal CDF.
pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

fn standard_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Analytic variances for [`TreatmentRule::NegativeOutcome`].
///
/// With `s^2 = sigma_z^2 + sigma_mu^2 + sigma_u^2`, `alpha = -mu_z / s`,
/// `p = Phi(alpha)` and `d = phi(alpha) / s`, covariances against the
/// treatment indicator are `Cov(X, w) = -Cov(X, Y0) * d`, giving
///
/// ```text
/// Var(Z1)  = sigma_z^2 + delta^2 p(1-p) - 2 delta sigma_z^2 d
/// Var(cf)  = s^2       + delta^2 p(1-p) - 2 delta s^2       d
/// Var(Y1)  = Var(Z1) + sigma_mu^2 + sigma_u^2 - 2 delta sigma_mu^2 d
/// Var(int) = Var(Z1) + sigma_mu^2 + sigma_u^2
/// ```
pub fn analytic_variances(params: &StabilityParams) -> AnalyticVariances {
    let sz2 = params.sigma_z * params.sigma_z;
    let smu2 = params.sigma_mu * params.sigma_mu;
    let su2 = params.sigma_u * params.sigma_u;
    let s2 = sz2 + smu2 + su2;
    let s = s2.sqrt();
    let delta = params.delta;
    let (p, dens) = if s > 0.0 {
        let alpha = -params.mu_z / s;
        (standard_normal_cdf(alpha), standard_normal_pdf(alpha) / s)
    } else {
        (if params.mu_z > 0.0 { 0.0 } else { 1.0 }, 0.0)
    };
    let bernoulli = p * (1.0 - p);
    let var_z1 = sz2 + delta * delta * bernoulli - 2.0 * delta * sz2 * dens;
    AnalyticVariances {
        y0: s2,
        y1_true: var_z1 + smu2 + su2 - 2.0 * delta * smu2 * dens,
        y1_cf: s2 + delta * delta * bernoulli - 2.0 * delta * s2 * dens,
        y1_int: var_z1 + smu2 + su2,
    }
}
