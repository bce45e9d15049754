//! Structural causal models with invertible mechanisms.
//!
//! An [`Scm`] couples one noise variable and one structural equation to each
//! endogenous variable. Mechanisms are restricted to forms that are
//! invertible in their noise term given parent values (additive-linear, or a
//! user-supplied closure with an explicit inverse), which keeps the
//! abduction step of counterfactual inference exact: from an observed unit
//! the exogenous values can be reconstructed uniquely, so per-unit
//! counterfactual distributions are point masses.
//!
//! The sampling operations follow the abduction–action–prediction recipe:
//!
//! - [`Scm::sample_observational`] draws all noises from their priors and
//!   evaluates equations in topological order;
//! - [`Scm::apply_intervention`] returns a modified model, leaving the
//!   original untouched;
//! - [`Scm::abduct`] recovers per-unit noise values from an observed sample;
//! - [`Scm::counterfactual_sample`] pushes abducted noise through an
//!   intervened model;
//! - [`Scm::interventional_sample`] does the same but redraws a chosen
//!   subset of noises from their priors.
//!
//! Counterfactual evaluation copies a variable's observed value unless the
//! intervention actually changes it or one of its parents changed, so
//! variables outside the intervention's downstream cone are reproduced
//! bit-for-bit and the factual intervention returns the observed sample
//! exactly.
//!
//! All sampling is deterministic: each `(unit, noise name)` pair draws from
//! its own substream derived from the seed, so redrawing one noise never
//! perturbs another's stream.
//!
//! Abduction conditions on *all* endogenous variables (every variable must
//! appear in the sample); conditioning on a subset, which would generally
//! produce set-valued posteriors, is out of scope.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational;
use crate::substream;

/// Errors from model construction, sampling, and counterfactual inference.
#[derive(Debug, Error)]
pub enum ScmError {
    #[error("model must declare at least one variable")]
    EmptyModel,
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("duplicate noise name `{0}`")]
    DuplicateNoise(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown noise `{0}`")]
    UnknownNoise(String),
    #[error("variable `{0}` lists itself as a parent")]
    SelfParent(String),
    #[error("variable `{variable}` has undeclared parent `{parent}`")]
    UndeclaredParent { variable: String, parent: String },
    #[error("structural equations contain a cycle")]
    Cyclic,
    #[error("equation target `{target}` does not match variable `{variable}`")]
    TargetMismatch { variable: String, target: String },
    #[error("invalid noise law for `{name}`: {reason}")]
    InvalidNoise { name: String, reason: String },
    #[error("variable `{variable}` has {got} coefficients for {expected} parents")]
    CoefficientArity {
        variable: String,
        expected: usize,
        got: usize,
    },
    #[error("non-finite coefficient in equation for `{0}`")]
    NonFiniteCoefficient(String),
    #[error("sample must contain at least one unit")]
    EmptySample,
    #[error("sample is missing variable `{0}`")]
    SampleMissingVariable(String),
    #[error("sample column `{variable}` has {got} units, expected {expected}")]
    SampleLength {
        variable: String,
        expected: usize,
        got: usize,
    },
    #[error("sample column `{variable}` contains a non-finite value at unit {unit}")]
    NonFiniteSampleValue { variable: String, unit: usize },
    #[error("abduction requires invertible mechanisms (variable `{0}`)")]
    NonInvertible(String),
    #[error("shift offsets for `{variable}` cover {got} units, expected {expected}")]
    ShiftLength {
        variable: String,
        expected: usize,
        got: usize,
    },
    #[error(
        "counterfactual evaluation has no posterior for noise `{0}`; \
         use interventional_sample with it in the resample set"
    )]
    UnresolvedNoise(String),
    #[error("mechanism for `{0}` cannot be serialized to the JSON schema")]
    UnsupportedSerialization(String),
    #[error("invalid model document: {0}")]
    Json(#[from] serde_json::Error),
}

type Result<T> = std::result::Result<T, ScmError>;

// ── Noise laws ─────────────────────────────────────────────────────────

/// Distribution of a single exogenous noise variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NoiseLaw {
    Normal { mean: f64, variance: f64 },
    Bernoulli { p: f64 },
    DiscreteUniform { support: Vec<f64> },
    PointMass { value: f64 },
}

impl NoiseLaw {
    fn validate(&self, name: &str) -> Result<()> {
        let fail = |reason: &str| {
            Err(ScmError::InvalidNoise {
                name: name.to_string(),
                reason: reason.to_string(),
            })
        };
        match self {
            NoiseLaw::Normal { mean, variance } => {
                if !mean.is_finite() || !variance.is_finite() || *variance < 0.0 {
                    return fail("normal law needs finite mean and variance >= 0");
                }
            }
            NoiseLaw::Bernoulli { p } => {
                if !(0.0..=1.0).contains(p) {
                    return fail("bernoulli p must lie in [0, 1]");
                }
            }
            NoiseLaw::DiscreteUniform { support } => {
                if support.is_empty() {
                    return fail("discrete uniform support must be non-empty");
                }
                if support.iter().any(|v| !v.is_finite()) {
                    return fail("discrete uniform support must be finite");
                }
                let mut sorted = support.clone();
                sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return fail("discrete uniform support must be duplicate-free");
                }
            }
            NoiseLaw::PointMass { value } => {
                if !value.is_finite() {
                    return fail("point mass value must be finite");
                }
            }
        }
        Ok(())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            NoiseLaw::Normal { mean, variance } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + variance.sqrt() * z
            }
            NoiseLaw::Bernoulli { p } => {
                if rng.gen_bool(*p) {
                    1.0
                } else {
                    0.0
                }
            }
            NoiseLaw::DiscreteUniform { support } => support[rng.gen_range(0..support.len())],
            NoiseLaw::PointMass { value } => *value,
        }
    }

    /// Finite support with exact probabilities, when the law has one.
    ///
    /// A zero-variance normal counts as a point mass. Returns `None` for
    /// laws with continuous support.
    pub fn finite_support(&self) -> Option<Vec<(f64, BigRational)>> {
        let one = || BigRational::from_integer(1.into());
        match self {
            NoiseLaw::Normal { mean, variance } => {
                (*variance == 0.0).then(|| vec![(*mean, one())])
            }
            NoiseLaw::Bernoulli { p } => {
                let p_exact = rational::exact(*p)?;
                let q = one() - &p_exact;
                let mut entries = Vec::new();
                if !rational::is_zero(&q) {
                    entries.push((0.0, q));
                }
                if !rational::is_zero(&p_exact) {
                    entries.push((1.0, p_exact));
                }
                Some(entries)
            }
            NoiseLaw::DiscreteUniform { support } => {
                let weight = BigRational::new(1.into(), (support.len() as i64).into());
                Some(support.iter().map(|v| (*v, weight.clone())).collect())
            }
            NoiseLaw::PointMass { value } => Some(vec![(*value, one())]),
        }
    }
}

/// A named exogenous noise variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub name: String,
    pub law: NoiseLaw,
}

impl NoiseSpec {
    pub fn new(name: impl Into<String>, law: NoiseLaw) -> Self {
        Self {
            name: name.into(),
            law,
        }
    }
}

// ── Mechanisms and equations ───────────────────────────────────────────

type MechanismFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// Functional form mapping parent values and a noise value to the target.
///
/// `AdditiveLinear` covers every model in this crate's catalog and is always
/// invertible in the noise term. `Custom` mechanisms supply a forward
/// closure and, if abduction is needed, an inverse mapping
/// `(parents, value) -> noise`.
#[derive(Clone)]
pub enum Mechanism {
    /// `value = sum(coeffs[i] * parents[i]) + noise`.
    AdditiveLinear { coeffs: Vec<f64> },
    /// Inner mechanism plus a per-unit additive offset.
    Shifted {
        inner: Box<Mechanism>,
        offsets: Arc<Vec<f64>>,
    },
    Custom {
        forward: MechanismFn,
        inverse: Option<MechanismFn>,
    },
}

impl fmt::Debug for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mechanism::AdditiveLinear { coeffs } => {
                f.debug_struct("AdditiveLinear").field("coeffs", coeffs).finish()
            }
            Mechanism::Shifted { inner, offsets } => f
                .debug_struct("Shifted")
                .field("inner", inner)
                .field("offsets", &offsets.len())
                .finish(),
            Mechanism::Custom { inverse, .. } => f
                .debug_struct("Custom")
                .field("invertible", &inverse.is_some())
                .finish(),
        }
    }
}

impl Mechanism {
    pub fn additive_linear(coeffs: impl Into<Vec<f64>>) -> Self {
        Mechanism::AdditiveLinear {
            coeffs: coeffs.into(),
        }
    }

    /// Constant equation, used for atomic interventions: no parents, noise
    /// passes through unchanged.
    fn passthrough() -> Self {
        Mechanism::AdditiveLinear { coeffs: Vec::new() }
    }

    pub(crate) fn evaluate(&self, unit: usize, parents: &[f64], noise: f64) -> f64 {
        match self {
            Mechanism::AdditiveLinear { coeffs } => {
                let dot: f64 = coeffs.iter().zip(parents).map(|(c, p)| c * p).sum();
                dot + noise
            }
            Mechanism::Shifted { inner, offsets } => {
                inner.evaluate(unit, parents, noise) + offsets[unit]
            }
            Mechanism::Custom { forward, .. } => forward(parents, noise),
        }
    }

    fn invert(&self, unit: usize, parents: &[f64], value: f64, variable: &str) -> Result<f64> {
        match self {
            Mechanism::AdditiveLinear { coeffs } => {
                let dot: f64 = coeffs.iter().zip(parents).map(|(c, p)| c * p).sum();
                Ok(value - dot)
            }
            Mechanism::Shifted { inner, offsets } => {
                inner.invert(unit, parents, value - offsets[unit], variable)
            }
            Mechanism::Custom { inverse, .. } => match inverse {
                Some(inv) => Ok(inv(parents, value)),
                None => Err(ScmError::NonInvertible(variable.to_string())),
            },
        }
    }

    fn shift_arity(&self) -> Option<(usize, &str)> {
        match self {
            Mechanism::Shifted { inner, offsets } => {
                Some(inner.shift_arity().unwrap_or((offsets.len(), "")))
            }
            _ => None,
        }
    }

    fn validate(&self, variable: &str, parent_count: usize) -> Result<()> {
        match self {
            Mechanism::AdditiveLinear { coeffs } => {
                if coeffs.len() != parent_count {
                    return Err(ScmError::CoefficientArity {
                        variable: variable.to_string(),
                        expected: parent_count,
                        got: coeffs.len(),
                    });
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(ScmError::NonFiniteCoefficient(variable.to_string()));
                }
                Ok(())
            }
            Mechanism::Shifted { inner, .. } => inner.validate(variable, parent_count),
            Mechanism::Custom { .. } => Ok(()),
        }
    }
}

/// A structural equation: `target = mechanism(parents, noise)`.
#[derive(Debug, Clone)]
pub struct StructuralEquation {
    pub target: String,
    pub parents: Vec<String>,
    pub mechanism: Mechanism,
}

impl StructuralEquation {
    pub fn new(
        target: impl Into<String>,
        parents: impl IntoIterator<Item = impl Into<String>>,
        mechanism: Mechanism,
    ) -> Self {
        Self {
            target: target.into(),
            parents: parents.into_iter().map(Into::into).collect(),
            mechanism,
        }
    }
}

/// One endogenous variable: its equation and its exogenous noise.
#[derive(Debug, Clone)]
pub struct ScmVariable {
    pub equation: StructuralEquation,
    pub noise: NoiseSpec,
}

impl ScmVariable {
    /// Additive-linear variable, the common case.
    pub fn additive(
        name: &str,
        parents: &[&str],
        coeffs: &[f64],
        noise_name: &str,
        law: NoiseLaw,
    ) -> Self {
        Self {
            equation: StructuralEquation::new(
                name,
                parents.iter().copied(),
                Mechanism::additive_linear(coeffs.to_vec()),
            ),
            noise: NoiseSpec::new(noise_name, law),
        }
    }

    /// Root variable `name = noise`.
    pub fn exogenous(name: &str, noise_name: &str, law: NoiseLaw) -> Self {
        Self::additive(name, &[], &[], noise_name, law)
    }
}

// ── Interventions ──────────────────────────────────────────────────────

/// A modification of one structural mechanism.
#[derive(Debug, Clone)]
pub enum Intervention {
    /// `do(variable = value)`: the equation becomes the constant `value`.
    Atomic { variable: String, value: f64 },
    /// Adds `offsets[unit]` to the variable's mechanism output.
    Shift { variable: String, offsets: Vec<f64> },
    /// Swaps in a new equation and noise for the variable.
    Replace {
        variable: String,
        equation: StructuralEquation,
        noise: NoiseSpec,
    },
}

impl Intervention {
    pub fn atomic(variable: impl Into<String>, value: f64) -> Self {
        Intervention::Atomic {
            variable: variable.into(),
            value,
        }
    }

    /// Shift by `delta * w[i]` per unit, the treatment-vector form.
    pub fn shift_by_assignment(variable: impl Into<String>, delta: f64, w: &[u8]) -> Self {
        Intervention::Shift {
            variable: variable.into(),
            offsets: w.iter().map(|&wi| delta * f64::from(wi)).collect(),
        }
    }

    pub fn variable(&self) -> &str {
        match self {
            Intervention::Atomic { variable, .. }
            | Intervention::Shift { variable, .. }
            | Intervention::Replace { variable, .. } => variable,
        }
    }
}

// ── Samples and posteriors ─────────────────────────────────────────────

/// A finite sample: one value per (unit, variable), with an optional record
/// of the noise values that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    n: usize,
    values: BTreeMap<String, Vec<f64>>,
    noise: Option<BTreeMap<String, Vec<f64>>>,
}

impl Sample {
    /// Builds a sample from per-variable columns of equal length.
    pub fn from_columns(
        columns: impl IntoIterator<Item = (impl Into<String>, Vec<f64>)>,
    ) -> Result<Self> {
        let mut values = BTreeMap::new();
        let mut n = None;
        for (name, column) in columns {
            let name = name.into();
            match n {
                None => n = Some(column.len()),
                Some(expected) if expected != column.len() => {
                    return Err(ScmError::SampleLength {
                        variable: name,
                        expected,
                        got: column.len(),
                    });
                }
                _ => {}
            }
            if let Some(unit) = column.iter().position(|v| !v.is_finite()) {
                return Err(ScmError::NonFiniteSampleValue {
                    variable: name,
                    unit,
                });
            }
            values.insert(name, column);
        }
        let n = n.filter(|&n| n > 0).ok_or(ScmError::EmptySample)?;
        Ok(Self {
            n,
            values,
            noise: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn column(&self, variable: &str) -> Option<&[f64]> {
        self.values.get(variable).map(Vec::as_slice)
    }

    pub fn value(&self, variable: &str, unit: usize) -> Option<f64> {
        self.values.get(variable).and_then(|c| c.get(unit)).copied()
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    /// Noise record retained at generation time, if any.
    pub fn noise_record(&self) -> Option<&BTreeMap<String, Vec<f64>>> {
        self.noise.as_ref()
    }

    fn require_column(&self, variable: &str, n: usize) -> Result<&[f64]> {
        let column = self
            .values
            .get(variable)
            .ok_or_else(|| ScmError::SampleMissingVariable(variable.to_string()))?;
        if column.len() != n {
            return Err(ScmError::SampleLength {
                variable: variable.to_string(),
                expected: n,
                got: column.len(),
            });
        }
        Ok(column)
    }
}

/// Per-unit point posterior over noise values, keyed by noise name.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePosterior {
    n: usize,
    values: BTreeMap<String, Vec<f64>>,
}

impl NoisePosterior {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn column(&self, noise: &str) -> Option<&[f64]> {
        self.values.get(noise).map(Vec::as_slice)
    }

    pub fn value(&self, noise: &str, unit: usize) -> Option<f64> {
        self.values.get(noise).and_then(|c| c.get(unit)).copied()
    }

    pub fn noises(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

// ── The model ──────────────────────────────────────────────────────────

/// A structural causal model over named variables.
#[derive(Debug, Clone)]
pub struct Scm {
    variables: Vec<ScmVariable>,
    index: BTreeMap<String, usize>,
    /// Indices into `variables` in a valid topological order.
    order: Vec<usize>,
}

impl Scm {
    pub fn new(variables: Vec<ScmVariable>) -> Result<Self> {
        if variables.is_empty() {
            return Err(ScmError::EmptyModel);
        }
        let mut index = BTreeMap::new();
        let mut noise_names = BTreeSet::new();
        for (i, var) in variables.iter().enumerate() {
            let name = &var.equation.target;
            if index.insert(name.clone(), i).is_some() {
                return Err(ScmError::DuplicateVariable(name.clone()));
            }
            if !noise_names.insert(var.noise.name.clone()) {
                return Err(ScmError::DuplicateNoise(var.noise.name.clone()));
            }
            var.noise.law.validate(&var.noise.name)?;
            var.equation.mechanism.validate(name, var.equation.parents.len())?;
        }
        for var in &variables {
            let name = &var.equation.target;
            for parent in &var.equation.parents {
                if parent == name {
                    return Err(ScmError::SelfParent(name.clone()));
                }
                if !index.contains_key(parent) {
                    return Err(ScmError::UndeclaredParent {
                        variable: name.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }

        // Kahn's algorithm, preferring declaration order for determinism.
        let n = variables.len();
        let mut remaining_parents: Vec<usize> =
            variables.iter().map(|v| v.equation.parents.len()).collect();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, var) in variables.iter().enumerate() {
            for parent in &var.equation.parents {
                children[index[parent]].push(i);
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        while order.len() < n {
            let next = (0..n).find(|&i| !placed[i] && remaining_parents[i] == 0);
            let Some(next) = next else {
                return Err(ScmError::Cyclic);
            };
            placed[next] = true;
            order.push(next);
            for &child in &children[next] {
                remaining_parents[child] -= 1;
            }
        }

        Ok(Self {
            variables,
            index,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn contains_variable(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Variable names in declaration order.
    pub fn variable_names(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().map(|v| v.equation.target.as_str())
    }

    /// Variable names in a valid topological order.
    pub fn topological_order(&self) -> Vec<&str> {
        self.order
            .iter()
            .map(|&i| self.variables[i].equation.target.as_str())
            .collect()
    }

    pub fn equation(&self, variable: &str) -> Option<&StructuralEquation> {
        self.index.get(variable).map(|&i| &self.variables[i].equation)
    }

    pub fn noise_spec(&self, variable: &str) -> Option<&NoiseSpec> {
        self.index.get(variable).map(|&i| &self.variables[i].noise)
    }

    pub fn noise_names(&self) -> impl Iterator<Item = &str> {
        self.variables.iter().map(|v| v.noise.name.as_str())
    }

    fn var(&self, i: usize) -> &ScmVariable {
        &self.variables[i]
    }

    fn check_shift_arity(&self, n: usize) -> Result<()> {
        for var in &self.variables {
            if let Some((len, _)) = var.equation.mechanism.shift_arity() {
                if len != n {
                    return Err(ScmError::ShiftLength {
                        variable: var.equation.target.clone(),
                        expected: n,
                        got: len,
                    });
                }
            }
        }
        Ok(())
    }

    /// Draws `n` units by sampling every noise from its prior and evaluating
    /// equations in topological order. The generated noise values are
    /// retained in the sample's noise record.
    pub fn sample_observational(&self, n: usize, seed: u64) -> Result<Sample> {
        if n == 0 {
            return Err(ScmError::EmptySample);
        }
        self.check_shift_arity(n)?;
        let mut values: Vec<Vec<f64>> = vec![vec![0.0; n]; self.variables.len()];
        let mut noises: Vec<Vec<f64>> = vec![vec![0.0; n]; self.variables.len()];
        for unit in 0..n {
            for &i in &self.order {
                let var = self.var(i);
                let mut rng = substream::stream(seed, unit as u64, &var.noise.name);
                let noise = var.noise.law.sample(&mut rng);
                let parents: Vec<f64> = var
                    .equation
                    .parents
                    .iter()
                    .map(|p| values[self.index[p]][unit])
                    .collect();
                noises[i][unit] = noise;
                values[i][unit] = var.equation.mechanism.evaluate(unit, &parents, noise);
            }
        }
        Ok(self.assemble_sample(n, values, Some(noises)))
    }

    fn assemble_sample(
        &self,
        n: usize,
        values: Vec<Vec<f64>>,
        noises: Option<Vec<Vec<f64>>>,
    ) -> Sample {
        let value_map = self
            .variables
            .iter()
            .zip(values)
            .map(|(v, col)| (v.equation.target.clone(), col))
            .collect();
        let noise_map = noises.map(|noises| {
            self.variables
                .iter()
                .zip(noises)
                .map(|(v, col)| (v.noise.name.clone(), col))
                .collect()
        });
        Sample {
            n,
            values: value_map,
            noise: noise_map,
        }
    }

    /// Returns the modified model; `self` is unchanged.
    ///
    /// Atomic interventions replace the equation with a constant and the
    /// noise with a point mass under a fresh `do:` name. Shift interventions
    /// wrap the existing mechanism and keep its noise. Replace interventions
    /// swap in the supplied equation and noise.
    pub fn apply_intervention(&self, intervention: &Intervention) -> Result<Scm> {
        let target = intervention.variable();
        let &i = self
            .index
            .get(target)
            .ok_or_else(|| ScmError::UnknownVariable(target.to_string()))?;
        let mut variables = self.variables.clone();
        match intervention {
            Intervention::Atomic { variable, value } => {
                variables[i] = ScmVariable {
                    equation: StructuralEquation::new(
                        variable.clone(),
                        Vec::<String>::new(),
                        Mechanism::passthrough(),
                    ),
                    noise: NoiseSpec::new(
                        format!("do:{variable}"),
                        NoiseLaw::PointMass { value: *value },
                    ),
                };
            }
            Intervention::Shift { offsets, .. } => {
                let inner = Box::new(variables[i].equation.mechanism.clone());
                variables[i].equation.mechanism = Mechanism::Shifted {
                    inner,
                    offsets: Arc::new(offsets.clone()),
                };
            }
            Intervention::Replace {
                variable,
                equation,
                noise,
            } => {
                if equation.target != *variable {
                    return Err(ScmError::TargetMismatch {
                        variable: variable.clone(),
                        target: equation.target.clone(),
                    });
                }
                variables[i] = ScmVariable {
                    equation: equation.clone(),
                    noise: noise.clone(),
                };
            }
        }
        Scm::new(variables)
    }

    /// Recovers per-unit noise values by inverting each mechanism at the
    /// observed values. Requires every variable observed and every mechanism
    /// invertible.
    pub fn abduct(&self, sample: &Sample) -> Result<NoisePosterior> {
        let n = sample.n();
        self.check_shift_arity(n)?;
        let mut posterior = BTreeMap::new();
        for var in &self.variables {
            let target = &var.equation.target;
            let column = sample.require_column(target, n)?;
            let parent_columns: Vec<&[f64]> = var
                .equation
                .parents
                .iter()
                .map(|p| sample.require_column(p, n))
                .collect::<Result<_>>()?;
            let mut noise_column = Vec::with_capacity(n);
            let mut parents = vec![0.0; parent_columns.len()];
            for unit in 0..n {
                for (slot, col) in parents.iter_mut().zip(&parent_columns) {
                    *slot = col[unit];
                }
                noise_column.push(var.equation.mechanism.invert(
                    unit,
                    &parents,
                    column[unit],
                    target,
                )?);
            }
            posterior.insert(var.noise.name.clone(), noise_column);
        }
        Ok(NoisePosterior {
            n,
            values: posterior,
        })
    }

    /// Forward-simulates with explicitly given noise values (point-mass
    /// noises may be omitted). Inverse of [`Scm::abduct`] up to floating
    /// rounding.
    // Unit-major evaluation mirrors sample_observational.
    #[allow(clippy::needless_range_loop)]
    pub fn simulate_with_noise(&self, noise: &NoisePosterior) -> Result<Sample> {
        let n = noise.n();
        if n == 0 {
            return Err(ScmError::EmptySample);
        }
        self.check_shift_arity(n)?;
        let mut values: Vec<Vec<f64>> = vec![vec![0.0; n]; self.variables.len()];
        for unit in 0..n {
            for &i in &self.order {
                let var = self.var(i);
                let noise_value = match noise.value(&var.noise.name, unit) {
                    Some(v) => v,
                    None => match var.noise.law {
                        NoiseLaw::PointMass { value } => value,
                        _ => return Err(ScmError::UnresolvedNoise(var.noise.name.clone())),
                    },
                };
                let parents: Vec<f64> = var
                    .equation
                    .parents
                    .iter()
                    .map(|p| values[self.index[p]][unit])
                    .collect();
                values[i][unit] = var.equation.mechanism.evaluate(unit, &parents, noise_value);
            }
        }
        Ok(self.assemble_sample(n, values, None))
    }

    /// Abduction–action–prediction: abducts noise from `sample`, applies the
    /// intervention, and re-evaluates. Deterministic given the observed
    /// sample.
    ///
    /// A variable keeps its observed value unless the intervention changes
    /// it or one of its parents changed, so non-descendants of the
    /// intervened variable (and factual interventions) reproduce the
    /// observed values bit-for-bit.
    pub fn counterfactual_sample(
        &self,
        sample: &Sample,
        intervention: &Intervention,
    ) -> Result<Sample> {
        let posterior = self.abduct(sample)?;
        let intervened = self.apply_intervention(intervention)?;
        intervened.predict(sample, &posterior, None, 0)
    }

    /// Like [`Scm::counterfactual_sample`], but noises named in `resample`
    /// are redrawn from their priors instead of abducted. Deterministic
    /// given `seed`; fresh draws come from substreams separate from the ones
    /// used by [`Scm::sample_observational`].
    pub fn interventional_sample(
        &self,
        base: &Sample,
        intervention: &Intervention,
        resample: &BTreeSet<String>,
        seed: u64,
    ) -> Result<Sample> {
        let posterior = self.abduct(base)?;
        let intervened = self.apply_intervention(intervention)?;
        let known: BTreeSet<&str> = self
            .noise_names()
            .chain(intervened.noise_names())
            .collect();
        for name in resample {
            if !known.contains(name.as_str()) {
                return Err(ScmError::UnknownNoise(name.clone()));
            }
        }
        intervened.predict(base, &posterior, Some(resample), seed)
    }

    /// Shared prediction step over an already-intervened model (`self`).
    fn predict(
        &self,
        observed: &Sample,
        posterior: &NoisePosterior,
        resample: Option<&BTreeSet<String>>,
        seed: u64,
    ) -> Result<Sample> {
        let n = observed.n();
        self.check_shift_arity(n)?;
        let observed_columns: Vec<&[f64]> = self
            .variables
            .iter()
            .map(|v| observed.require_column(&v.equation.target, n))
            .collect::<Result<_>>()?;

        let mut values: Vec<Vec<f64>> = vec![vec![0.0; n]; self.variables.len()];
        let mut noises: Vec<Vec<f64>> = vec![vec![0.0; n]; self.variables.len()];
        let mut dirty = vec![false; self.variables.len()];
        for unit in 0..n {
            for &i in &self.order {
                let var = self.var(i);
                let noise_name = &var.noise.name;
                let resampled = resample.is_some_and(|set| set.contains(noise_name));
                let noise_value = if resampled {
                    let label = format!("resample:{noise_name}");
                    let mut rng = substream::stream(seed, unit as u64, &label);
                    var.noise.law.sample(&mut rng)
                } else {
                    match posterior.value(noise_name, unit) {
                        Some(v) => v,
                        None => match var.noise.law {
                            NoiseLaw::PointMass { value } => value,
                            _ => return Err(ScmError::UnresolvedNoise(noise_name.clone())),
                        },
                    }
                };
                noises[i][unit] = noise_value;

                let parent_dirty = var
                    .equation
                    .parents
                    .iter()
                    .any(|p| dirty[self.index[p]]);
                // A noise missing from the posterior (atomic/replace
                // interventions) or redrawn from its prior can move the
                // value, so those paths are recomputed; everything else is
                // copied from the observation.
                let abducted = !resampled && posterior.value(noise_name, unit).is_some();
                let observed_value = observed_columns[i][unit];
                let value = if parent_dirty || !abducted || resampled {
                    let parents: Vec<f64> = var
                        .equation
                        .parents
                        .iter()
                        .map(|p| values[self.index[p]][unit])
                        .collect();
                    var.equation.mechanism.evaluate(unit, &parents, noise_value)
                } else if let Mechanism::Shifted { offsets, .. } = &var.equation.mechanism {
                    // Clean parents and abducted noise: the shifted value is
                    // exactly the observation plus the offset.
                    observed_value + offsets[unit]
                } else {
                    observed_value
                };
                dirty[i] = value != observed_value;
                values[i][unit] = value;
            }
        }
        Ok(self.assemble_sample(n, values, Some(noises)))
    }
}

// ── JSON document form ─────────────────────────────────────────────────

#[derive(Serialize, Deserialize)]
struct ScmDocument {
    variables: Vec<VariableDocument>,
}

#[derive(Serialize, Deserialize)]
struct VariableDocument {
    name: String,
    noise: NoiseLaw,
    #[serde(default)]
    parents: Vec<String>,
    #[serde(default)]
    coeffs: Vec<f64>,
    /// Defaults to `u_<name>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise_name: Option<String>,
}

impl Scm {
    /// Loads an additive-linear model from the JSON document form
    /// `{"variables":[{"name", "noise":{...}, "parents":[...], "coeffs":[...]}]}`.
    pub fn from_json(text: &str) -> Result<Scm> {
        let doc: ScmDocument = serde_json::from_str(text)?;
        let variables = doc
            .variables
            .into_iter()
            .map(|v| {
                let noise_name = v.noise_name.unwrap_or_else(|| format!("u_{}", v.name));
                ScmVariable {
                    equation: StructuralEquation::new(
                        v.name,
                        v.parents,
                        Mechanism::AdditiveLinear { coeffs: v.coeffs },
                    ),
                    noise: NoiseSpec::new(noise_name, v.noise),
                }
            })
            .collect();
        Scm::new(variables)
    }

    /// Serializes an additive-linear model to the JSON document form.
    pub fn to_json(&self) -> Result<String> {
        let variables = self
            .variables
            .iter()
            .map(|v| match &v.equation.mechanism {
                Mechanism::AdditiveLinear { coeffs } => Ok(VariableDocument {
                    name: v.equation.target.clone(),
                    noise: v.noise.law.clone(),
                    parents: v.equation.parents.clone(),
                    coeffs: coeffs.clone(),
                    noise_name: Some(v.noise.name.clone()),
                }),
                _ => Err(ScmError::UnsupportedSerialization(v.equation.target.clone())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(serde_json::to_string_pretty(&ScmDocument { variables })?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn eq4_scm() -> Scm {
        models::binary_treatment_scm()
    }

    fn table1_sample() -> Sample {
        models::observed_four_units()
    }

    #[test]
    fn observational_sampling_respects_equations() {
        let scm = eq4_scm();
        let sample = scm.sample_observational(200, 7).unwrap();
        let (x, z, y) = (
            sample.column("X").unwrap(),
            sample.column("Z").unwrap(),
            sample.column("Y").unwrap(),
        );
        for unit in 0..200 {
            assert!(y[unit] >= 0.0 && y[unit] <= 4.0);
            let u_y = sample.noise_record().unwrap()["U_Y"][unit];
            assert_eq!(y[unit], x[unit] + z[unit] + u_y);
        }
    }

    #[test]
    fn degenerate_point_masses_yield_zeros() {
        let scm = Scm::new(vec![
            ScmVariable::exogenous("A", "U_A", NoiseLaw::PointMass { value: 0.0 }),
            ScmVariable::additive("B", &["A"], &[0.0], "U_B", NoiseLaw::PointMass { value: 0.0 }),
        ])
        .unwrap();
        let sample = scm.sample_observational(5, 3).unwrap();
        assert!(sample.column("A").unwrap().iter().all(|&v| v == 0.0));
        assert!(sample.column("B").unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn continuous_generator_matches_its_law() {
        // Law-of-large-numbers check on the N(0,1) root of the two-period
        // model.
        let scm = models::school_scm(0.0, 1.0);
        let n = 100_000;
        let sample = scm.sample_observational(n, 11).unwrap();
        let z = sample.column("Z").unwrap();
        let mean = z.iter().sum::<f64>() / n as f64;
        let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 3.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn sampling_is_bit_reproducible() {
        let scm = models::school_scm(0.5, 2.0);
        let a = scm.sample_observational(64, 9).unwrap();
        let b = scm.sample_observational(64, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn atomic_intervention_replaces_equation_with_constant() {
        let scm = eq4_scm();
        let intervened = scm.apply_intervention(&Intervention::atomic("Z", 1.0)).unwrap();
        let sample = intervened.sample_observational(50, 5).unwrap();
        assert!(sample.column("Z").unwrap().iter().all(|&z| z == 1.0));
        // Original model unchanged.
        let original = scm.sample_observational(50, 5).unwrap();
        assert!(original.column("Z").unwrap().iter().any(|&z| z == 0.0));
    }

    #[test]
    fn shift_intervention_adds_per_unit_offsets() {
        let scm = models::school_scm(0.0, 1.0);
        let base = scm.sample_observational(4, 21).unwrap();
        let shift = Intervention::shift_by_assignment("Z", 1.0, &[1, 1, 0, 0]);
        let shifted = scm.counterfactual_sample(&base, &shift).unwrap();
        for unit in 0..4 {
            let expected = base.value("Z", unit).unwrap() + f64::from(u8::from(unit < 2));
            assert_eq!(shifted.value("Z", unit).unwrap(), expected);
        }
    }

    #[test]
    fn replace_intervention_swaps_mechanism_without_touching_original() {
        let scm = eq4_scm();
        let replace = Intervention::Replace {
            variable: "Y".into(),
            equation: StructuralEquation::new("Y", ["Z"], Mechanism::additive_linear([2.0])),
            noise: NoiseSpec::new("U_Y", NoiseLaw::DiscreteUniform { support: vec![0.0, 1.0, 2.0] }),
        };
        let intervened = scm.apply_intervention(&replace).unwrap();
        let sample = intervened.sample_observational(100, 13).unwrap();
        for unit in 0..100 {
            let z = sample.value("Z", unit).unwrap();
            let u_y = sample.noise_record().unwrap()["U_Y"][unit];
            assert_eq!(sample.value("Y", unit).unwrap(), 2.0 * z + u_y);
        }
        assert!(scm.equation("Y").unwrap().parents == vec!["X", "Z"]);
    }

    #[test]
    fn unknown_intervention_target_is_rejected_by_name() {
        let err = eq4_scm()
            .apply_intervention(&Intervention::atomic("W", 1.0))
            .unwrap_err();
        assert!(matches!(err, ScmError::UnknownVariable(name) if name == "W"));
    }

    #[test]
    fn abduction_recovers_observed_exogenous_values() {
        let scm = eq4_scm();
        let posterior = scm.abduct(&table1_sample()).unwrap();
        // Units 2 and 3 of the observed table.
        assert_eq!(posterior.value("U_X", 1), Some(0.0));
        assert_eq!(posterior.value("U_Z", 1), Some(0.0));
        assert_eq!(posterior.value("U_Y", 1), Some(2.0));
        assert_eq!(posterior.value("U_Y", 2), Some(0.0));
    }

    #[test]
    fn abduction_inverts_generation() {
        let scm = models::school_scm(0.0, 1.0);
        let sample = scm.sample_observational(256, 17).unwrap();
        let posterior = scm.abduct(&sample).unwrap();
        let record = sample.noise_record().unwrap();
        for noise in ["U_Z", "U_Y"] {
            for unit in 0..256 {
                let diff = (posterior.value(noise, unit).unwrap() - record[noise][unit]).abs();
                assert!(diff <= 1e-12, "{noise}[{unit}] off by {diff}");
            }
        }
        // Round trip: forward simulation from the posterior reproduces the
        // observations.
        let resim = scm.simulate_with_noise(&posterior).unwrap();
        for var in ["Z", "Y"] {
            for unit in 0..256 {
                let diff =
                    (resim.value(var, unit).unwrap() - sample.value(var, unit).unwrap()).abs();
                assert!(diff <= 1e-12);
            }
        }
    }

    #[test]
    fn abduction_requires_invertible_mechanisms() {
        let opaque = Mechanism::Custom {
            forward: Arc::new(|parents: &[f64], noise: f64| parents[0].max(noise)),
            inverse: None,
        };
        let scm = Scm::new(vec![
            ScmVariable::exogenous("A", "U_A", NoiseLaw::Bernoulli { p: 0.5 }),
            ScmVariable {
                equation: StructuralEquation::new("B", ["A"], opaque),
                noise: NoiseSpec::new("U_B", NoiseLaw::Bernoulli { p: 0.5 }),
            },
        ])
        .unwrap();
        let sample = scm.sample_observational(4, 1).unwrap();
        let err = scm.abduct(&sample).unwrap_err();
        assert!(err.to_string().contains("abduction requires invertible mechanisms"));
    }

    #[test]
    fn counterfactuals_reproduce_potential_outcome_columns() {
        let scm = eq4_scm();
        let sample = table1_sample();
        let treated = scm
            .counterfactual_sample(&sample, &Intervention::atomic("Z", 1.0))
            .unwrap();
        assert_eq!(treated.column("Y").unwrap(), &[2.0, 3.0, 2.0, 3.0]);
        let control = scm
            .counterfactual_sample(&sample, &Intervention::atomic("Z", 0.0))
            .unwrap();
        assert_eq!(control.column("Y").unwrap(), &[1.0, 2.0, 1.0, 2.0]);
    }

    #[test]
    fn factual_intervention_returns_observed_sample() {
        let scm = eq4_scm();
        let sample = table1_sample();
        // Observed Z is identically zero, so do(Z=0) is factual.
        let cf = scm
            .counterfactual_sample(&sample, &Intervention::atomic("Z", 0.0))
            .unwrap();
        for var in ["X", "Z", "Y"] {
            assert_eq!(cf.column(var).unwrap(), sample.column(var).unwrap());
        }
    }

    #[test]
    fn null_shift_returns_observed_sample_exactly() {
        let scm = models::school_scm(0.0, 1.0);
        let sample = scm.sample_observational(32, 23).unwrap();
        let null = Intervention::shift_by_assignment("Z", 1.0, &[0; 32]);
        let cf = scm.counterfactual_sample(&sample, &null).unwrap();
        for var in ["Z", "Y"] {
            assert_eq!(cf.column(var).unwrap(), sample.column(var).unwrap());
        }
    }

    #[test]
    fn intervention_leaves_non_descendants_untouched() {
        let scm = eq4_scm();
        let sample = scm.sample_observational(64, 3).unwrap();
        let cf = scm
            .counterfactual_sample(&sample, &Intervention::atomic("Z", 1.0))
            .unwrap();
        assert_eq!(cf.column("X").unwrap(), sample.column("X").unwrap());
    }

    #[test]
    fn empty_resample_set_matches_counterfactual() {
        let scm = models::school_scm(0.0, 1.0);
        let base = scm.sample_observational(16, 29).unwrap();
        let shift = Intervention::shift_by_assignment("Z", 0.5, &[1; 16]);
        let cf = scm.counterfactual_sample(&base, &shift).unwrap();
        let iv = scm
            .interventional_sample(&base, &shift, &BTreeSet::new(), 99)
            .unwrap();
        for var in ["Z", "Y"] {
            assert_eq!(cf.column(var).unwrap(), iv.column(var).unwrap());
        }
    }

    #[test]
    fn full_resample_with_null_intervention_is_distribution_equal_to_fresh_draws() {
        let scm = models::school_scm(0.0, 1.0);
        let n = 20_000;
        let base = scm.sample_observational(n, 31).unwrap();
        let null = Intervention::shift_by_assignment("Z", 0.0, &vec![0; n]);
        let resample: BTreeSet<String> = ["U_Z", "U_Y"].iter().map(|s| s.to_string()).collect();
        let fresh = scm.interventional_sample(&base, &null, &resample, 77).unwrap();
        let y = fresh.column("Y").unwrap();
        let mean = y.iter().sum::<f64>() / n as f64;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.04, "mean {mean}");
        assert!((var - 2.0).abs() < 0.1, "variance {var}");
    }

    #[test]
    fn partial_resample_keeps_other_streams() {
        // Redraw only U_Y: Z values must agree exactly with the
        // counterfactual, Y values must differ per unit.
        let scm = models::school_scm(0.0, 1.0);
        let n = 50;
        let base = scm.sample_observational(n, 37).unwrap();
        let shift = Intervention::shift_by_assignment("Z", 1.0, &vec![1; n]);
        let cf = scm.counterfactual_sample(&base, &shift).unwrap();
        let resample: BTreeSet<String> = std::iter::once("U_Y".to_string()).collect();
        let iv = scm.interventional_sample(&base, &shift, &resample, 41).unwrap();
        assert_eq!(iv.column("Z").unwrap(), cf.column("Z").unwrap());
        for unit in 0..n {
            assert_ne!(iv.value("Y", unit), cf.value("Y", unit));
        }
    }

    #[test]
    fn resampling_unknown_noise_is_an_error() {
        let scm = models::school_scm(0.0, 1.0);
        let base = scm.sample_observational(4, 1).unwrap();
        let resample: BTreeSet<String> = std::iter::once("U_missing".to_string()).collect();
        let err = scm
            .interventional_sample(
                &base,
                &Intervention::shift_by_assignment("Z", 0.0, &[0; 4]),
                &resample,
                1,
            )
            .unwrap_err();
        assert!(matches!(err, ScmError::UnknownNoise(_)));
    }

    #[test]
    fn counterfactual_under_replaced_stochastic_noise_is_rejected() {
        let scm = eq4_scm();
        let sample = table1_sample();
        let replace = Intervention::Replace {
            variable: "Y".into(),
            equation: StructuralEquation::new("Y", ["Z"], Mechanism::additive_linear([2.0])),
            noise: NoiseSpec::new("U_Y_new", NoiseLaw::Normal { mean: 0.0, variance: 1.0 }),
        };
        let err = scm.counterfactual_sample(&sample, &replace).unwrap_err();
        assert!(matches!(err, ScmError::UnresolvedNoise(_)));
        // The same intervention is fine when the new noise is resampled.
        let resample: BTreeSet<String> = std::iter::once("U_Y_new".to_string()).collect();
        scm.interventional_sample(&sample, &replace, &resample, 5).unwrap();
    }

    #[test]
    fn models_and_samples_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Scm>();
        assert_send_sync::<Intervention>();
        assert_send_sync::<Sample>();
        assert_send_sync::<NoisePosterior>();
    }

    #[test]
    fn cyclic_models_are_rejected() {
        let err = Scm::new(vec![
            ScmVariable::additive("A", &["B"], &[1.0], "U_A", NoiseLaw::PointMass { value: 0.0 }),
            ScmVariable::additive("B", &["A"], &[1.0], "U_B", NoiseLaw::PointMass { value: 0.0 }),
        ])
        .unwrap_err();
        assert!(matches!(err, ScmError::Cyclic));
    }

    #[test]
    fn noise_law_validation_rejects_bad_parameters() {
        assert!(Scm::new(vec![ScmVariable::exogenous(
            "A",
            "U_A",
            NoiseLaw::Bernoulli { p: 1.5 },
        )])
        .is_err());
        assert!(Scm::new(vec![ScmVariable::exogenous(
            "A",
            "U_A",
            NoiseLaw::Normal { mean: 0.0, variance: -1.0 },
        )])
        .is_err());
        assert!(Scm::new(vec![ScmVariable::exogenous(
            "A",
            "U_A",
            NoiseLaw::DiscreteUniform { support: vec![1.0, 1.0] },
        )])
        .is_err());
    }

    #[test]
    fn json_round_trip_preserves_model_behaviour() {
        let scm = eq4_scm();
        let text = scm.to_json().unwrap();
        let reloaded = Scm::from_json(&text).unwrap();
        let a = scm.sample_observational(32, 19).unwrap();
        let b = reloaded.sample_observational(32, 19).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_document_defaults_noise_names() {
        let text = r#"{
            "variables": [
                {"name": "X", "noise": {"type": "bernoulli", "p": 0.5}},
                {"name": "Y", "noise": {"type": "normal", "mean": 0.0, "variance": 1.0},
                 "parents": ["X"], "coeffs": [2.0]}
            ]
        }"#;
        let scm = Scm::from_json(text).unwrap();
        assert!(scm.noise_spec("X").unwrap().name == "u_X");
        assert_eq!(scm.topological_order(), vec!["X", "Y"]);
    }
}
