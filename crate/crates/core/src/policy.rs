//! Treatment rules in two paradigms.
//!
//! The population paradigm scores covariate *decision sets*: a rule treats
//! everyone whose covariate value lies in a set `G`, and is evaluated
//! against the population post-treatment distribution mixing the treated
//! conditional outcome law over `G` and the untreated law elsewhere,
//! weighted by the covariate marginal. The sample paradigm scores per-unit
//! *assignments*: a length-n binary vector chooses which observed units to
//! treat, and is evaluated against the average of the units' counterfactual
//! outcome distributions. Both are optimized under a budget on the number
//! of treated units.
//!
//! Two units with identical covariates can receive different treatments
//! under an assignment, so the assignment search space strictly contains
//! every decision-set rule of the same cost; the exhaustive optimum is
//! never worse than the best decision set evaluated on the same sample.
//!
//! Population conditionals are computed exactly by enumerating finite noise
//! supports; a Monte Carlo variant covers models with continuous noise.
//!
//! Treatments are binary per unit, acting through a shared
//! [`TreatmentTemplate`]; multi-valued treatments would generalize the
//! template and are not implemented.

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::distributions::{mixture_of_pointmasses, DistributionError, StepCdf};
use crate::scm::{Intervention, Sample, Scm, ScmError};
use crate::welfare::{WelfareError, WelfareFunctional, WelfareValue};

/// Default draw count for the Monte Carlo post-treatment CDF variant.
pub const DEFAULT_MC_DRAWS: usize = 100_000;
/// Largest exact-enumeration product of noise support sizes.
const MAX_ENUMERATION: u128 = 1_000_000;
/// Largest exhaustive assignment search, `sum_{j<=budget} C(n, j)`.
const MAX_EXHAUSTIVE: u128 = 10_000_000;
/// Most distinct covariate values treated as a finite covariate space.
const MAX_COVARIATE_SUPPORT: usize = 1000;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error(transparent)]
    Scm(#[from] ScmError),
    #[error(transparent)]
    Welfare(#[from] WelfareError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(
        "noise `{0}` has continuous support; exact post-treatment CDFs need \
         finite noise supports (use the Monte Carlo variant)"
    )]
    ContinuousNoise(String),
    #[error("covariate space looks continuous ({0} distinct values)")]
    ContinuousCovariate(usize),
    #[error("covariate `{covariate}` is downstream of treatment `{treatment}`")]
    CovariateDownstream { covariate: String, treatment: String },
    #[error("decision set value {0} is outside the observed covariate domain")]
    CovariateNotObserved(f64),
    #[error("noise support enumeration would need {0} combinations (cap {MAX_ENUMERATION})")]
    EnumerationTooLarge(u128),
    #[error("feasible policy set is empty")]
    EmptyFeasibleSet,
    #[error("budget {budget} exceeds sample size {n}")]
    BudgetExceedsSample { budget: usize, n: usize },
    #[error("assignment covers {got} units, expected {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error(
        "exhaustive search would enumerate {0} assignments (cap {MAX_EXHAUSTIVE}); \
         use greedy mode"
    )]
    SearchSpaceTooLarge(u128),
}

type Result<T> = std::result::Result<T, PolicyError>;

// ── Policy and problem types ───────────────────────────────────────────

/// A covariate decision set: treat exactly the units with covariate value
/// in the set.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionSetPolicy {
    values: Vec<f64>,
}

impl DecisionSetPolicy {
    /// The empty set (treat nobody).
    pub fn empty() -> Self {
        Self { values: Vec::new() }
    }

    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite covariate values"));
        values.dedup();
        Self { values }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.values.contains(&x)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl std::fmt::Display for DecisionSetPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.values.is_empty() {
            return f.write_str("{}");
        }
        let items: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

/// A per-unit binary treatment vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct UnitAssignment {
    w: Vec<u8>,
}

impl UnitAssignment {
    pub fn new(w: Vec<u8>) -> Self {
        assert!(w.iter().all(|&x| x <= 1), "assignments are binary");
        Self { w }
    }

    pub fn none(n: usize) -> Self {
        Self { w: vec![0; n] }
    }

    pub fn from_treated_indices(n: usize, treated: &[usize]) -> Self {
        let mut w = vec![0; n];
        for &i in treated {
            w[i] = 1;
        }
        Self { w }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn treated(&self, unit: usize) -> bool {
        self.w[unit] == 1
    }

    pub fn treated_count(&self) -> usize {
        self.w.iter().map(|&x| x as usize).sum()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.w
    }
}

impl std::fmt::Display for UnitAssignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let items: Vec<String> = self.w.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", items.join(", "))
    }
}

/// Cap on the number of treated units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_treated: usize,
}

/// How a single unit's treatment acts on the model.
#[derive(Debug, Clone)]
pub enum TreatmentTemplate {
    /// `do(variable = treated)` for treated units, `do(variable = control)`
    /// otherwise.
    Atomic {
        variable: String,
        control: f64,
        treated: f64,
    },
    /// Adds `delta` to the variable for treated units; untreated units keep
    /// their factual value.
    Shift { variable: String, delta: f64 },
}

impl TreatmentTemplate {
    fn variable(&self) -> &str {
        match self {
            TreatmentTemplate::Atomic { variable, .. }
            | TreatmentTemplate::Shift { variable, .. } => variable,
        }
    }

    /// Intervention treating (or not) every one of `n` units uniformly.
    fn uniform(&self, treat: bool, n: usize) -> Intervention {
        match self {
            TreatmentTemplate::Atomic {
                variable,
                control,
                treated,
            } => Intervention::atomic(variable.clone(), if treat { *treated } else { *control }),
            TreatmentTemplate::Shift { variable, delta } => Intervention::Shift {
                variable: variable.clone(),
                offsets: vec![if treat { *delta } else { 0.0 }; n],
            },
        }
    }
}

/// A treatment-choice problem: which variable is the covariate, which the
/// outcome, and how treating a unit intervenes on the model.
#[derive(Debug, Clone)]
pub struct TreatmentProblem {
    pub covariate: String,
    pub outcome: String,
    pub template: TreatmentTemplate,
}

/// Search strategy for [`cf_optimize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Global argmax over all assignments within budget.
    Exhaustive,
    /// Adds the unit with the best marginal welfare gain until the budget
    /// is exhausted or no gain is positive. Heuristic; may miss the optimum.
    Greedy,
}

// ── Exact population distributions ─────────────────────────────────────

/// Joint distribution over variable values (declaration order) obtained by
/// enumerating every combination of finite noise supports.
fn finite_joint(scm: &Scm) -> Result<Vec<(Vec<f64>, BigRational)>> {
    let names: Vec<&str> = scm.variable_names().collect();
    let supports: Vec<Vec<(f64, BigRational)>> = names
        .iter()
        .map(|name| {
            let spec = scm.noise_spec(name).expect("declared variable");
            spec.law
                .finite_support()
                .ok_or_else(|| PolicyError::ContinuousNoise(spec.name.clone()))
        })
        .collect::<Result<_>>()?;
    let combos = supports
        .iter()
        .map(|s| s.len() as u128)
        .product::<u128>();
    if combos > MAX_ENUMERATION {
        return Err(PolicyError::EnumerationTooLarge(combos));
    }

    let order = scm.topological_order();
    let index: std::collections::BTreeMap<&str, usize> =
        names.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let mut rows = Vec::with_capacity(combos as usize);
    let mut choice = vec![0usize; names.len()];
    loop {
        let mut weight = BigRational::one();
        let mut noise_values = vec![0.0; names.len()];
        for (i, support) in supports.iter().enumerate() {
            let (value, mass) = &support[choice[i]];
            noise_values[i] = *value;
            weight *= mass;
        }
        let mut values = vec![0.0; names.len()];
        for var in &order {
            let i = index[var];
            let equation = scm.equation(var).expect("declared variable");
            let parents: Vec<f64> = equation.parents.iter().map(|p| values[index[p.as_str()]]).collect();
            // Enumeration is unit-agnostic; population-level shifts carry a
            // uniform offset, evaluated as unit 0.
            values[i] = equation.mechanism.evaluate(0, &parents, noise_values[i]);
        }
        rows.push((values, weight));

        // Odometer increment over the support choices.
        let mut pos = 0;
        loop {
            if pos == supports.len() {
                return Ok(rows);
            }
            choice[pos] += 1;
            if choice[pos] < supports[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

fn descendants_contain(scm: &Scm, root: &str, needle: &str) -> bool {
    let mut frontier = vec![root.to_string()];
    let mut seen = std::collections::BTreeSet::new();
    while let Some(current) = frontier.pop() {
        if !seen.insert(current.clone()) {
            continue;
        }
        for name in scm.variable_names() {
            let equation = scm.equation(name).expect("declared variable");
            if equation.parents.contains(&current) && !seen.contains(name) {
                if name == needle {
                    return true;
                }
                frontier.push(name.to_string());
            }
        }
    }
    false
}

fn check_problem(scm: &Scm, problem: &TreatmentProblem) -> Result<()> {
    for variable in [
        problem.covariate.as_str(),
        problem.outcome.as_str(),
        problem.template.variable(),
    ] {
        if !scm.contains_variable(variable) {
            return Err(ScmError::UnknownVariable(variable.to_string()).into());
        }
    }
    if descendants_contain(scm, problem.template.variable(), &problem.covariate) {
        return Err(PolicyError::CovariateDownstream {
            covariate: problem.covariate.clone(),
            treatment: problem.template.variable().to_string(),
        });
    }
    Ok(())
}

fn check_decision_set(
    sample: &Sample,
    covariate: &str,
    g: &DecisionSetPolicy,
) -> Result<()> {
    let observed = sample
        .column(covariate)
        .ok_or_else(|| ScmError::SampleMissingVariable(covariate.to_string()))?;
    for &value in g.values() {
        if !observed.contains(&value) {
            return Err(PolicyError::CovariateNotObserved(value));
        }
    }
    Ok(())
}

/// Conditional CDF of `outcome` given `covariate == x` in the joint rows.
fn conditional_outcome_cdf(
    rows: &[(Vec<f64>, BigRational)],
    covariate_idx: usize,
    outcome_idx: usize,
    x: f64,
) -> Result<StepCdf> {
    let total: BigRational = rows
        .iter()
        .filter(|(values, _)| values[covariate_idx] == x)
        .map(|(_, weight)| weight.clone())
        .sum();
    let points: Vec<(f64, BigRational)> = rows
        .iter()
        .filter(|(values, _)| values[covariate_idx] == x)
        .map(|(values, weight)| (values[outcome_idx], weight / &total))
        .collect();
    let values: Vec<f64> = points.iter().map(|(v, _)| *v).collect();
    let weights: Vec<BigRational> = points.iter().map(|(_, w)| w.clone()).collect();
    Ok(mixture_of_pointmasses(&values, Some(&weights))?)
}

/// Population post-treatment CDF of a decision set: the treated conditional
/// outcome law for covariate values in `G`, the untreated law elsewhere,
/// mixed over the covariate marginal. Computed exactly from finite noise
/// supports.
pub fn ewm_post_treatment_cdf(
    scm: &Scm,
    sample: &Sample,
    problem: &TreatmentProblem,
    g: &DecisionSetPolicy,
) -> Result<StepCdf> {
    check_problem(scm, problem)?;
    check_decision_set(sample, &problem.covariate, g)?;

    let names: Vec<&str> = scm.variable_names().collect();
    let covariate_idx = names
        .iter()
        .position(|&n| n == problem.covariate)
        .expect("checked above");
    let outcome_idx = names
        .iter()
        .position(|&n| n == problem.outcome)
        .expect("checked above");

    let marginal_rows = finite_joint(scm)?;
    let mut marginal: Vec<(f64, BigRational)> = Vec::new();
    for (values, weight) in &marginal_rows {
        let x = values[covariate_idx];
        match marginal.iter_mut().find(|(v, _)| *v == x) {
            Some((_, mass)) => *mass += weight,
            None => marginal.push((x, weight.clone())),
        }
    }
    marginal.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite covariates"));

    let treated_rows = finite_joint(&scm.apply_intervention(&problem.template.uniform(true, 1))?)?;
    let control_rows = finite_joint(&scm.apply_intervention(&problem.template.uniform(false, 1))?)?;

    let mut parts = Vec::with_capacity(marginal.len());
    for (x, px) in marginal {
        let rows = if g.contains(x) { &treated_rows } else { &control_rows };
        let conditional = conditional_outcome_cdf(rows, covariate_idx, outcome_idx, x)?;
        parts.push((px, conditional));
    }
    Ok(StepCdf::mix(&parts)?)
}

/// Monte Carlo variant of [`ewm_post_treatment_cdf`] for models with
/// continuous noise: draws `draws` paired units from both arms and mixes by
/// the empirical covariate marginal.
pub fn ewm_post_treatment_cdf_mc(
    scm: &Scm,
    sample: &Sample,
    problem: &TreatmentProblem,
    g: &DecisionSetPolicy,
    draws: usize,
    seed: u64,
) -> Result<StepCdf> {
    check_problem(scm, problem)?;
    check_decision_set(sample, &problem.covariate, g)?;
    let treated_arm = scm
        .apply_intervention(&problem.template.uniform(true, draws))?
        .sample_observational(draws, seed)?;
    let control_arm = scm
        .apply_intervention(&problem.template.uniform(false, draws))?
        .sample_observational(draws, seed)?;
    // Both arms share noise substreams, so covariates are paired.
    let x = control_arm
        .column(&problem.covariate)
        .expect("declared variable");
    let mut distinct = x.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite covariates"));
    distinct.dedup();
    if distinct.len() > MAX_COVARIATE_SUPPORT {
        return Err(PolicyError::ContinuousCovariate(distinct.len()));
    }
    let y_treated = treated_arm.column(&problem.outcome).expect("declared variable");
    let y_control = control_arm.column(&problem.outcome).expect("declared variable");
    let outcomes: Vec<f64> = (0..draws)
        .map(|i| {
            if g.contains(x[i]) {
                y_treated[i]
            } else {
                y_control[i]
            }
        })
        .collect();
    Ok(mixture_of_pointmasses(&outcomes, None)?)
}

/// Argmax of `welfare` over the feasible decision sets; ties go to the
/// earliest policy in `feasible`.
pub fn ewm_optimize(
    scm: &Scm,
    sample: &Sample,
    problem: &TreatmentProblem,
    feasible: &[DecisionSetPolicy],
    welfare: WelfareFunctional,
) -> Result<(DecisionSetPolicy, WelfareValue)> {
    if feasible.is_empty() {
        return Err(PolicyError::EmptyFeasibleSet);
    }
    let mut best: Option<(usize, WelfareValue)> = None;
    for (i, g) in feasible.iter().enumerate() {
        let value = welfare.evaluate(&ewm_post_treatment_cdf(scm, sample, problem, g)?)?;
        let better = match &best {
            Some((_, incumbent)) => value > *incumbent,
            None => true,
        };
        if better {
            best = Some((i, value));
        }
    }
    let (i, value) = best.expect("feasible set is non-empty");
    Ok((feasible[i].clone(), value))
}

// ── Sample-paradigm distributions and optimizers ───────────────────────

/// Per-unit counterfactual outcomes `(control, treated)` under the
/// problem's treatment template.
pub fn potential_outcomes(
    scm: &Scm,
    sample: &Sample,
    problem: &TreatmentProblem,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_problem(scm, problem)?;
    let n = sample.n();
    let control = scm
        .counterfactual_sample(sample, &problem.template.uniform(false, n))?
        .column(&problem.outcome)
        .expect("declared variable")
        .to_vec();
    let treated = scm
        .counterfactual_sample(sample, &problem.template.uniform(true, n))?
        .column(&problem.outcome)
        .expect("declared variable")
        .to_vec();
    Ok((control, treated))
}

/// Sample post-treatment CDF of an assignment: each unit contributes the
/// point mass at its counterfactual outcome under its own treatment.
pub fn cf_post_treatment_cdf(
    scm: &Scm,
    sample: &Sample,
    problem: &TreatmentProblem,
    w: &UnitAssignment,
) -> Result<StepCdf> {
    if w.len() != sample.n() {
        return Err(PolicyError::AssignmentLength {
            expected: sample.n(),
            got: w.len(),
        });
    }
    let (control, treated) = potential_outcomes(scm, sample, problem)?;
    let outcomes = assignment_outcomes(&control, &treated, w);
    Ok(mixture_of_pointmasses(&outcomes, None)?)
}

fn assignment_outcomes(control: &[f64], treated: &[f64], w: &UnitAssignment) -> Vec<f64> {
    (0..control.len())
        .map(|i| if w.treated(i) { treated[i] } else { control[i] })
        .collect()
}

/// Translates a decision set into the assignment it induces on a sample.
pub fn assignment_from_decision_set(
    sample: &Sample,
    covariate: &str,
    g: &DecisionSetPolicy,
) -> Result<UnitAssignment> {
    let x = sample
        .column(covariate)
        .ok_or_else(|| ScmError::SampleMissingVariable(covariate.to_string()))?;
    Ok(UnitAssignment::new(
        x.iter().map(|&v| u8::from(g.contains(v))).collect(),
    ))
}

fn binomial_sum(n: usize, budget: usize) -> u128 {
    let mut total: u128 = 0;
    let mut coeff: u128 = 1;
    for j in 0..=budget.min(n) {
        total = total.saturating_add(coeff);
        coeff = coeff
            .saturating_mul((n - j) as u128)
            .checked_div((j + 1) as u128)
            .unwrap_or(u128::MAX);
        if total >= u128::MAX / 2 {
            return u128::MAX;
        }
    }
    total
}

struct AssignmentEvaluator<'a> {
    control: &'a [f64],
    treated: &'a [f64],
    welfare: WelfareFunctional,
}

impl AssignmentEvaluator<'_> {
    fn evaluate(&self, w: &UnitAssignment) -> Result<WelfareValue> {
        let outcomes = assignment_outcomes(self.control, self.treated, w);
        Ok(self.welfare.evaluate(&mixture_of_pointmasses(&outcomes, None)?)?)
    }
}

/// Best assignment within budget.
///
/// Exhaustive mode enumerates every assignment with at most `budget`
/// treated units and returns the global argmax; among welfare ties the
/// lexicographically least assignment wins, so the result is independent of
/// enumeration order and thread count. Greedy mode adds one unit at a time
/// (ties to the lowest unit index) and stops when the budget is exhausted
/// or no addition strictly improves welfare.
pub fn cf_optimize(
    scm: &Scm,
    sample: &Sample,
    problem: &TreatmentProblem,
    budget: Budget,
    welfare: WelfareFunctional,
    mode: SearchMode,
) -> Result<(UnitAssignment, WelfareValue)> {
    let n = sample.n();
    if budget.max_treated > n {
        return Err(PolicyError::BudgetExceedsSample {
            budget: budget.max_treated,
            n,
        });
    }
    let (control, treated) = potential_outcomes(scm, sample, problem)?;
    let evaluator = AssignmentEvaluator {
        control: &control,
        treated: &treated,
        welfare,
    };
    match mode {
        SearchMode::Exhaustive => exhaustive_search(n, budget.max_treated, &evaluator),
        SearchMode::Greedy => greedy_search(n, budget.max_treated, &evaluator),
    }
}

/// Candidate ordering: higher welfare wins; ties go to the
/// lexicographically least assignment.
fn better(candidate: &(UnitAssignment, WelfareValue), incumbent: &(UnitAssignment, WelfareValue)) -> bool {
    match candidate.1.cmp(&incumbent.1) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => candidate.0 < incumbent.0,
    }
}

fn exhaustive_search(
    n: usize,
    budget: usize,
    evaluator: &AssignmentEvaluator<'_>,
) -> Result<(UnitAssignment, WelfareValue)> {
    let combos = binomial_sum(n, budget);
    if combos > MAX_EXHAUSTIVE {
        return Err(PolicyError::SearchSpaceTooLarge(combos));
    }

    // One bucket for the empty assignment plus one per first treated unit;
    // buckets evaluate independently and merge with a total order, so the
    // result does not depend on parallel scheduling.
    let empty = UnitAssignment::none(n);
    let empty_best = (empty.clone(), evaluator.evaluate(&empty)?);
    let firsts: Vec<usize> = if budget == 0 { Vec::new() } else { (0..n).collect() };
    let bucket_bests: Vec<Result<(UnitAssignment, WelfareValue)>> = firsts
        .into_par_iter()
        .map(|first| {
            let mut treated_indices = vec![first];
            let w = UnitAssignment::from_treated_indices(n, &treated_indices);
            let mut best = (w.clone(), evaluator.evaluate(&w)?);
            if budget > 1 {
                explore(n, budget, &mut treated_indices, evaluator, &mut best)?;
            }
            Ok(best)
        })
        .collect();

    let mut best = empty_best;
    for bucket in bucket_bests {
        let bucket = bucket?;
        if better(&bucket, &best) {
            best = bucket;
        }
    }
    Ok(best)
}

fn explore(
    n: usize,
    budget: usize,
    treated_indices: &mut Vec<usize>,
    evaluator: &AssignmentEvaluator<'_>,
    best: &mut (UnitAssignment, WelfareValue),
) -> Result<()> {
    let start = treated_indices.last().map_or(0, |&i| i + 1);
    for next in start..n {
        treated_indices.push(next);
        let w = UnitAssignment::from_treated_indices(n, treated_indices);
        let value = evaluator.evaluate(&w)?;
        let candidate = (w, value);
        if better(&candidate, best) {
            *best = candidate;
        }
        if treated_indices.len() < budget {
            explore(n, budget, treated_indices, evaluator, best)?;
        }
        treated_indices.pop();
    }
    Ok(())
}

fn greedy_search(
    n: usize,
    budget: usize,
    evaluator: &AssignmentEvaluator<'_>,
) -> Result<(UnitAssignment, WelfareValue)> {
    let mut current = UnitAssignment::none(n);
    let mut current_value = evaluator.evaluate(&current)?;
    for _ in 0..budget {
        let mut best_step: Option<(usize, WelfareValue)> = None;
        for unit in 0..n {
            if current.treated(unit) {
                continue;
            }
            let mut w = current.clone();
            w.w[unit] = 1;
            let value = evaluator.evaluate(&w)?;
            let better_step = match &best_step {
                Some((_, incumbent)) => value > *incumbent,
                None => true,
            };
            if better_step {
                best_step = Some((unit, value));
            }
        }
        match best_step {
            Some((unit, value)) if value > current_value => {
                current.w[unit] = 1;
                current_value = value;
            }
            _ => break,
        }
    }
    Ok((current, current_value))
}

// ── Serialized optimizer results ───────────────────────────────────────

/// JSON-serializable summary of an optimizer run.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizerResult {
    pub assignment: Vec<u8>,
    pub welfare_exact: String,
    pub welfare_float: f64,
    pub mode: String,
    pub budget: usize,
    pub welfare_functional: String,
}

impl OptimizerResult {
    pub fn new(
        assignment: &UnitAssignment,
        value: &WelfareValue,
        mode: SearchMode,
        budget: Budget,
        welfare: WelfareFunctional,
    ) -> Self {
        Self {
            assignment: assignment.as_slice().to_vec(),
            welfare_exact: value.exact().to_string(),
            welfare_float: value.approx(),
            mode: match mode {
                SearchMode::Exhaustive => "exhaustive".into(),
                SearchMode::Greedy => "greedy".into(),
            },
            budget: budget.max_treated,
            welfare_functional: welfare.name().into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report")
    }
}
