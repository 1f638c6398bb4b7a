//! Prequential selection criteria for classification.
//!
//! Two local criteria are computed under Dirichlet priors with parameter
//! independence. The conditional node monitor (CNM) scores each case's class
//! given its own inputs and the cases seen so far; the class sequential
//! criterion (CSC) conditions every class prediction on the entire input
//! block. CSC equals a ratio of marginal likelihoods, which this module
//! evaluates exactly by brute force over all class completions (exponential in
//! the sample size, so capped) or by prior-sampling Monte Carlo. Both criteria
//! coincide whenever the class variable is a sink — the structural condition
//! checked by [`is_brc_structure`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::logspace::LogSumExp;
use crate::network::{
    aligned_rows, joint_log_prob_unchecked, log_marginal_likelihood_of_rows,
    predictive_case_log_prob, sample_parameter_set, DagStructure, Dataset, DirichletSpec,
    SufficientStats,
};

/// Default cap on the number of class completions the exact CSC will sum over.
pub const DEFAULT_COMPLETION_CAP: u64 = 1 << 20;

/// Which criterion a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionKind {
    Cnm,
    CscExact,
    CscMonteCarlo,
    LogMarginalLikelihood,
}

/// A criterion value on the log scale with its per-case decomposition where
/// one exists, and a standard error for Monte-Carlo results.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub kind: CriterionKind,
    pub value: f64,
    /// One log-probability per case; empty for Monte-Carlo results.
    pub per_case_terms: Vec<f64>,
    pub std_error: Option<f64>,
    pub sample_count: Option<u64>,
}

/// True when the class variable has no children. Under parameter independence
/// and Dirichlet priors such a structure factors into an input model (all
/// non-class CPTs) and a conditional model (the class CPT) with independent
/// priors, which is exactly the condition making the two criteria agree.
pub fn is_brc_structure(structure: &DagStructure) -> bool {
    structure.children(structure.class_index()).is_empty()
}

/// Conditional node monitor: Σ_l log p(y_l | x_l, cases before l), closed
/// form via Dirichlet posterior predictives.
pub fn conditional_node_monitor(
    structure: &DagStructure,
    prior: &DirichletSpec,
    dataset: &Dataset,
) -> Result<CriterionReport> {
    let rows = aligned_rows(structure, dataset)?;
    let class = structure.class_index();
    let r = structure.class_cardinality();
    let mut history = SufficientStats::zeros(structure);
    let mut terms = Vec::with_capacity(rows.len());
    for case in &rows {
        let numerator = predictive_case_log_prob(structure, prior, &history, case)?;
        let mut denominator = LogSumExp::new();
        let mut alt = case.clone();
        for k in 0..r {
            alt[class] = k;
            denominator.add(predictive_case_log_prob(structure, prior, &history, &alt)?);
        }
        let denominator = denominator.value();
        assert!(
            denominator > f64::NEG_INFINITY,
            "predictive input marginal vanished despite positive hyperparameters"
        );
        terms.push((numerator - denominator).min(0.0));
        history.add_case(structure, case);
    }
    Ok(CriterionReport {
        kind: CriterionKind::Cnm,
        value: terms.iter().sum(),
        per_case_terms: terms,
        std_error: None,
        sample_count: None,
    })
}

/// Class sequential criterion, exact form: log p(y₁..y_N, x₁..x_N | m) −
/// log p(x₁..x_N | m), the denominator summed over all r^N class completions
/// of the input block. Errors when r^N exceeds `completion_cap`, pointing the
/// caller to the Monte-Carlo variant.
///
/// The per-case terms come from the telescoping sequential form: term l is
/// the log-ratio of completion sums agreeing with the observed classes up to
/// l versus up to l − 1.
pub fn class_sequential_exact(
    structure: &DagStructure,
    prior: &DirichletSpec,
    dataset: &Dataset,
    completion_cap: u64,
) -> Result<CriterionReport> {
    let rows = aligned_rows(structure, dataset)?;
    let n = rows.len();
    let r = structure.class_cardinality();
    check_completion_cap(r, n, completion_cap)?;
    if n == 0 {
        return Ok(CriterionReport {
            kind: CriterionKind::CscExact,
            value: 0.0,
            per_case_terms: Vec::new(),
            std_error: None,
            sample_count: None,
        });
    }
    let class = structure.class_index();
    let observed: Vec<usize> = rows.iter().map(|case| case[class]).collect();

    // prefix_sums[l] accumulates completions that agree with the observed
    // classes on the first l cases; prefix_sums[0] covers every completion.
    let mut prefix_sums = vec![LogSumExp::new(); n + 1];
    let mut completion = vec![0usize; n];
    let mut completed = rows.clone();
    loop {
        for (case, &label) in completed.iter_mut().zip(&completion) {
            case[class] = label;
        }
        let weight = log_marginal_likelihood_of_rows(structure, prior, &completed)?;
        let agreement = completion
            .iter()
            .zip(&observed)
            .take_while(|(a, b)| a == b)
            .count();
        for acc in prefix_sums.iter_mut().take(agreement + 1) {
            acc.add(weight);
        }
        // next completion, last case fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            completion[pos] += 1;
            if completion[pos] < r {
                break;
            }
            completion[pos] = 0;
        }
        if completion.iter().all(|&c| c == 0) {
            break;
        }
    }

    let numerator = log_marginal_likelihood_of_rows(structure, prior, &rows)?;
    let denominator = prefix_sums[0].value();
    let terms: Vec<f64> = (1..=n)
        .map(|l| (prefix_sums[l].value() - prefix_sums[l - 1].value()).min(0.0))
        .collect();
    Ok(CriterionReport {
        kind: CriterionKind::CscExact,
        value: numerator - denominator,
        per_case_terms: terms,
        std_error: None,
        sample_count: None,
    })
}

fn check_completion_cap(class_count: usize, cases: usize, cap: u64) -> Result<()> {
    let mut total: u128 = 1;
    for _ in 0..cases {
        total = total.saturating_mul(class_count as u128);
        if total > cap as u128 {
            return Err(Error::CompletionCapExceeded {
                class_count,
                cases,
                cap,
            });
        }
    }
    Ok(())
}

/// Class sequential criterion with the input-block marginal estimated by
/// Monte Carlo: parameters are drawn from the Dirichlet prior and the sample
/// mean of p(x₁..x_N | θ) is taken in log space. The numerator stays in
/// closed form. Deterministic for a given seed.
///
/// The standard error of the log-estimate comes from the delta method,
/// sd(w) / (√S · mean(w)), computed entirely in log space.
pub fn class_sequential_monte_carlo(
    structure: &DagStructure,
    prior: &DirichletSpec,
    dataset: &Dataset,
    samples: u64,
    seed: u64,
) -> Result<CriterionReport> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "Monte-Carlo estimation needs at least 2 samples, got {samples}"
        )));
    }
    let rows = aligned_rows(structure, dataset)?;
    let numerator = log_marginal_likelihood_of_rows(structure, prior, &rows)?;
    let class = structure.class_index();
    let r = structure.class_cardinality();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log_weights = LogSumExp::new();
    let mut log_square_weights = LogSumExp::new();
    let mut work = rows.clone();
    for _ in 0..samples {
        let theta = sample_parameter_set(structure, prior, &mut rng);
        let mut log_w = 0.0;
        for case in &mut work {
            // Σ_y p(y, x_l | θ), the class marginalized out in place
            let mut marginal = LogSumExp::new();
            for k in 0..r {
                case[class] = k;
                marginal.add(joint_log_prob_unchecked(structure, &theta, case));
            }
            log_w += marginal.value();
        }
        log_weights.add(log_w);
        log_square_weights.add(2.0 * log_w);
    }
    assert!(
        log_weights.value() > f64::NEG_INFINITY,
        "every Monte-Carlo weight vanished despite positive hyperparameters"
    );

    let log_s = (samples as f64).ln();
    let log_mean = log_weights.value() - log_s;
    let log_second_moment = log_square_weights.value() - log_s;
    // population variance in log space: log(m₂ − mean²)
    let gap = 2.0 * log_mean - log_second_moment;
    let std_error = if gap >= 0.0 {
        0.0 // all weights numerically identical
    } else {
        let log_var_pop = log_second_moment + (-gap.exp()).ln_1p();
        let log_var = log_var_pop + (samples as f64 / (samples as f64 - 1.0)).ln();
        (0.5 * log_var - 0.5 * log_s - log_mean).exp()
    };

    Ok(CriterionReport {
        kind: CriterionKind::CscMonteCarlo,
        value: numerator - log_mean,
        per_case_terms: Vec::new(),
        std_error: Some(std_error),
        sample_count: Some(samples),
    })
}

/// CNM − CSC (exact, default cap). Zero within 1e-9 whenever
/// [`is_brc_structure`] holds.
pub fn criterion_gap(
    structure: &DagStructure,
    prior: &DirichletSpec,
    dataset: &Dataset,
) -> Result<f64> {
    let cnm = conditional_node_monitor(structure, prior, dataset)?;
    let csc = class_sequential_exact(structure, prior, dataset, DEFAULT_COMPLETION_CAP)?;
    Ok(cnm.value - csc.value)
}

/// The global criterion: the log marginal likelihood with its chain-rule
/// per-case decomposition.
pub fn global_criterion(
    structure: &DagStructure,
    prior: &DirichletSpec,
    dataset: &Dataset,
) -> Result<CriterionReport> {
    let rows = aligned_rows(structure, dataset)?;
    let mut history = SufficientStats::zeros(structure);
    let mut terms = Vec::with_capacity(rows.len());
    for case in &rows {
        let term = predictive_case_log_prob(structure, prior, &history, case)?;
        terms.push(term.min(0.0));
        history.add_case(structure, case);
    }
    Ok(CriterionReport {
        kind: CriterionKind::LogMarginalLikelihood,
        value: terms.iter().sum(),
        per_case_terms: terms,
        std_error: None,
        sample_count: None,
    })
}
