//! Exhaustive structure enumeration, structure posteriors, and model-averaged
//! prediction.
//!
//! Enumeration walks every adjacency bitset over the variables (row-major
//! ordered pairs, ascending mask order) and keeps the acyclic ones, so the
//! family order is canonical and reproducible. Posteriors come from Bayes'
//! rule over per-structure marginal likelihoods; predictions average the
//! closed-form posterior predictives with posterior weights.

use std::collections::BTreeMap;

use crate::criteria::{
    class_sequential_exact, class_sequential_monte_carlo, conditional_node_monitor,
};
use crate::error::{Error, Result};
use crate::logspace::log_sum_exp;
use crate::network::{
    collect_stats, log_marginal_likelihood, predictive_case_log_prob, DagStructure, Dataset,
    DirichletSpec, Variable,
};

/// Exhaustive enumeration scans 2^(n(n−1)) adjacency masks; beyond this many
/// variables that is no longer a desk-scale computation.
pub const MAX_ENUMERABLE_VARIABLES: usize = 5;

/// A prior over a structure family: uniform, or explicit nonnegative weights
/// keyed by adjacency encoding. Weighted priors are normalized at
/// construction; structures missing from the map get weight zero.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelPrior {
    Uniform,
    Weighted(BTreeMap<u128, f64>),
}

impl ModelPrior {
    pub fn uniform() -> Self {
        ModelPrior::Uniform
    }

    pub fn weighted(weights: impl IntoIterator<Item = (u128, f64)>) -> Result<Self> {
        let map: BTreeMap<u128, f64> = weights.into_iter().collect();
        let mut total = 0.0;
        for (&key, &w) in &map {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "model prior weight {w} for structure {key} must be a nonnegative real"
                )));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::InvalidArgument(
                "model prior weights must not all be zero".into(),
            ));
        }
        Ok(ModelPrior::Weighted(
            map.into_iter().map(|(k, w)| (k, w / total)).collect(),
        ))
    }

    /// Log prior weights for the given family, renormalized over it. Zero
    /// weights stay exactly zero (−∞ in log space).
    fn log_weights(&self, structures: &[DagStructure]) -> Result<Vec<f64>> {
        match self {
            ModelPrior::Uniform => {
                let w = -(structures.len() as f64).ln();
                Ok(vec![w; structures.len()])
            }
            ModelPrior::Weighted(map) => {
                let raw: Vec<f64> = structures
                    .iter()
                    .map(|s| map.get(&s.adjacency_encoding()).copied().unwrap_or(0.0))
                    .collect();
                let total: f64 = raw.iter().sum();
                if total <= 0.0 {
                    return Err(Error::InvalidArgument(
                        "model prior assigns zero weight to every structure in the family".into(),
                    ));
                }
                Ok(raw.iter().map(|w| (w / total).ln()).collect())
            }
        }
    }
}

/// One scored structure: its marginal likelihood and posterior.
#[derive(Debug, Clone)]
pub struct PosteriorEntry {
    pub structure: DagStructure,
    pub log_marginal_likelihood: f64,
    pub log_prior: f64,
    pub log_posterior: f64,
}

/// A normalized structure posterior over an enumerated family, in family
/// order.
#[derive(Debug, Clone)]
pub struct PosteriorTable {
    pub entries: Vec<PosteriorEntry>,
    pub log_normalizer: f64,
}

/// Ranking criterion for [`select_top_k`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RankCriterion {
    Posterior,
    MarginalLikelihood,
    Cnm,
    CscExact { completion_cap: u64 },
    CscMonteCarlo { samples: u64, seed: u64 },
}

/// All acyclic adjacency masks over `variable_count` nodes in ascending mask
/// order, optionally dropping masks where any node has more than
/// `max_parents` parents. Bit positions run row-major over ordered pairs
/// (parent, child) with the diagonal skipped.
pub fn enumerate_dag_masks(variable_count: usize, max_parents: Option<usize>) -> Result<Vec<u128>> {
    if variable_count > MAX_ENUMERABLE_VARIABLES {
        return Err(Error::EnumerationBound {
            variables: variable_count,
            bound: MAX_ENUMERABLE_VARIABLES,
        });
    }
    let n = variable_count;
    if n == 0 {
        return Ok(vec![0]);
    }
    let bits = n * (n - 1);
    let mut masks = Vec::new();
    'mask: for mask in 0u128..(1u128 << bits) {
        let parents = parents_of_mask(n, mask);
        if let Some(cap) = max_parents {
            if parents.iter().any(|p| p.len() > cap) {
                continue;
            }
        }
        // Kahn's algorithm on the parent lists
        let mut remaining: Vec<usize> = parents.iter().map(|p| p.len()).collect();
        let mut placed = vec![false; n];
        for _ in 0..n {
            match (0..n).find(|&i| !placed[i] && remaining[i] == 0) {
                Some(node) => {
                    placed[node] = true;
                    for child in 0..n {
                        if !placed[child] && parents[child].contains(&node) {
                            remaining[child] -= 1;
                        }
                    }
                }
                None => continue 'mask, // cyclic
            }
        }
        masks.push(mask);
    }
    Ok(masks)
}

/// Parent lists (ascending) decoded from an adjacency mask.
#[allow(clippy::needless_range_loop)] // the pair ordering is the point
pub fn parents_of_mask(n: usize, mask: u128) -> Vec<Vec<usize>> {
    let mut parents = vec![Vec::new(); n];
    let mut bit = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if mask & (1u128 << bit) != 0 {
                parents[j].push(i);
            }
            bit += 1;
        }
    }
    parents
}

/// Every labeled DAG over the given variables with the given class, in
/// canonical (ascending adjacency mask) order.
pub fn enumerate_dags(
    variables: &[Variable],
    class_index: usize,
    max_parents: Option<usize>,
) -> Result<Vec<DagStructure>> {
    if variables.is_empty() {
        return Err(Error::InvalidArgument(
            "structure enumeration needs at least one variable".into(),
        ));
    }
    if class_index >= variables.len() {
        return Err(Error::InvalidModel(format!(
            "class index {class_index} is out of range for {} variables",
            variables.len()
        )));
    }
    let masks = enumerate_dag_masks(variables.len(), max_parents)?;
    masks
        .into_iter()
        .map(|mask| {
            DagStructure::new(
                variables.to_vec(),
                parents_of_mask(variables.len(), mask),
                class_index,
            )
        })
        .collect()
}

/// Scores every structure by its marginal likelihood under a constant-α
/// Dirichlet prior and normalizes with Bayes' rule.
pub fn structure_log_posterior(
    structures: &[DagStructure],
    model_prior: &ModelPrior,
    alpha: f64,
    dataset: &Dataset,
) -> Result<PosteriorTable> {
    if structures.is_empty() {
        return Err(Error::InvalidArgument(
            "posterior computation needs a nonempty structure family".into(),
        ));
    }
    let log_priors = model_prior.log_weights(structures)?;
    let mut entries = Vec::with_capacity(structures.len());
    for (structure, &log_prior) in structures.iter().zip(&log_priors) {
        let prior = DirichletSpec::constant(structure, alpha)?;
        let lml = log_marginal_likelihood(structure, &prior, dataset)?;
        entries.push(PosteriorEntry {
            structure: structure.clone(),
            log_marginal_likelihood: lml,
            log_prior,
            log_posterior: f64::NAN, // filled below
        });
    }
    let joint: Vec<f64> = entries
        .iter()
        .map(|e| e.log_prior + e.log_marginal_likelihood)
        .collect();
    let log_normalizer = log_sum_exp(&joint);
    for (entry, j) in entries.iter_mut().zip(&joint) {
        entry.log_posterior = j - log_normalizer;
    }
    Ok(PosteriorTable {
        entries,
        log_normalizer,
    })
}

/// p(case | D, m): the closed-form single-case posterior predictive. With
/// parameter independence the expectation of the CPT product over the
/// posterior is the product of per-cell expectations, so this is exact and
/// equals the marginal-likelihood ratio of D ∪ case over D.
pub fn posterior_predictive_joint(
    structure: &DagStructure,
    prior: &DirichletSpec,
    dataset: &Dataset,
    case: &[usize],
) -> Result<f64> {
    let stats = collect_stats(structure, dataset)?;
    Ok(predictive_case_log_prob(structure, prior, &stats, case)?.exp())
}

/// p(y | x, D, m) as the ratio of joint posterior predictives over the class
/// states. For class-sink structures this coincides with integrating the
/// conditional against the parameter posterior.
pub fn posterior_predictive_class(
    structure: &DagStructure,
    prior: &DirichletSpec,
    dataset: &Dataset,
    x_assignment: &[usize],
) -> Result<Vec<f64>> {
    let stats = collect_stats(structure, dataset)?;
    let r = structure.class_cardinality();
    let mut logs = Vec::with_capacity(r);
    for k in 0..r {
        let case = structure.assignment_with_class(x_assignment, k)?;
        logs.push(predictive_case_log_prob(structure, prior, &stats, &case)?);
    }
    let total = log_sum_exp(&logs);
    assert!(
        total > f64::NEG_INFINITY,
        "posterior predictive vanished despite positive hyperparameters"
    );
    Ok(logs.iter().map(|l| (l - total).exp()).collect())
}

/// Posterior-weighted mixture of per-structure class predictives.
pub fn averaged_class_predictive(
    table: &PosteriorTable,
    alpha: f64,
    dataset: &Dataset,
    x_assignment: &[usize],
) -> Result<Vec<f64>> {
    let r = first_structure(table)?.class_cardinality();
    let mut out = vec![0.0; r];
    for entry in &table.entries {
        let weight = entry.log_posterior.exp();
        if weight == 0.0 {
            continue;
        }
        let prior = DirichletSpec::constant(&entry.structure, alpha)?;
        let predictive =
            posterior_predictive_class(&entry.structure, &prior, dataset, x_assignment)?;
        for (o, p) in out.iter_mut().zip(&predictive) {
            *o += weight * p;
        }
    }
    Ok(out)
}

/// Posterior-weighted mixture of per-structure joint predictives.
pub fn averaged_joint_predictive(
    table: &PosteriorTable,
    alpha: f64,
    dataset: &Dataset,
    case: &[usize],
) -> Result<f64> {
    let mut out = 0.0;
    for entry in &table.entries {
        let weight = entry.log_posterior.exp();
        if weight == 0.0 {
            continue;
        }
        let prior = DirichletSpec::constant(&entry.structure, alpha)?;
        out += weight * posterior_predictive_joint(&entry.structure, &prior, dataset, case)?;
    }
    Ok(out)
}

fn first_structure(table: &PosteriorTable) -> Result<&DagStructure> {
    table
        .entries
        .first()
        .map(|e| &e.structure)
        .ok_or_else(|| Error::InvalidArgument("the posterior table is empty".into()))
}

/// The top `k` structures under the chosen criterion, best first. Ties are
/// broken by canonical adjacency encoding, so the order is deterministic.
pub fn select_top_k(
    table: &PosteriorTable,
    k: usize,
    criterion: RankCriterion,
    alpha: f64,
    dataset: &Dataset,
) -> Result<Vec<(DagStructure, f64)>> {
    if k == 0 || k > table.entries.len() {
        return Err(Error::InvalidArgument(format!(
            "k must be between 1 and the family size {}, got {k}",
            table.entries.len()
        )));
    }
    let mut scored = Vec::with_capacity(table.entries.len());
    for entry in &table.entries {
        let score = match criterion {
            RankCriterion::Posterior => entry.log_posterior,
            RankCriterion::MarginalLikelihood => entry.log_marginal_likelihood,
            RankCriterion::Cnm => {
                let prior = DirichletSpec::constant(&entry.structure, alpha)?;
                conditional_node_monitor(&entry.structure, &prior, dataset)?.value
            }
            RankCriterion::CscExact { completion_cap } => {
                let prior = DirichletSpec::constant(&entry.structure, alpha)?;
                class_sequential_exact(&entry.structure, &prior, dataset, completion_cap)?.value
            }
            RankCriterion::CscMonteCarlo { samples, seed } => {
                let prior = DirichletSpec::constant(&entry.structure, alpha)?;
                class_sequential_monte_carlo(&entry.structure, &prior, dataset, samples, seed)?
                    .value
            }
        };
        scored.push((entry.structure.clone(), score));
    }
    scored.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| a.0.adjacency_encoding().cmp(&b.0.adjacency_encoding()))
    });
    scored.truncate(k);
    Ok(scored)
}
