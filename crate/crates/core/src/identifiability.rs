//! The map from free CPT parameters to the joint input distribution, its
//! numerical Jacobian, and a rank probe.
//!
//! Full Jacobian rank at a parameter point means the input distribution pins
//! down the free parameters locally, so the conditional-model parameters are
//! variationally dependent on the input-model parameters there. The probe
//! samples interior parameter points and reports how often the rank is full.
//!
//! Dropped-coordinate conventions: the last state of every CPT row is the
//! dependent one, and the last joint input configuration is dropped from the
//! distribution vector. For a binary naive Bayes model with three inputs this
//! gives the expected 7×7 Jacobian.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{configurations, DagStructure, ParameterSet};

/// Default cap on the number of joint input configurations.
pub const DEFAULT_CONFIG_CAP: u64 = 1 << 20;

/// Default central-difference step on free coordinates.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Default relative singular-value threshold for numerical rank.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-7;

/// Free CPT coordinates: every row contributes `cardinality − 1` entries (the
/// last state is dependent), flattened in node order, row order, state order.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeParameterVector {
    values: Vec<f64>,
}

impl FreeParameterVector {
    /// Validates entries against a structure: each in (0, 1) and each row's
    /// free entries summing below 1.
    pub fn new(structure: &DagStructure, values: Vec<f64>) -> Result<Self> {
        let expected = free_parameter_count(structure);
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        let mut offset = 0;
        for i in 0..structure.variable_count() {
            let free = structure.variable(i).cardinality() - 1;
            for _ in 0..structure.row_count(i) {
                let row = &values[offset..offset + free];
                let sum: f64 = row.iter().sum();
                if row.iter().any(|&v| !v.is_finite() || v <= 0.0 || v >= 1.0) || sum >= 1.0 {
                    return Err(Error::InvalidModel(format!(
                        "free parameters of variable '{}' leave the open simplex",
                        structure.variable(i).name()
                    )));
                }
                offset += free;
            }
        }
        Ok(Self { values })
    }

    /// Extracts the free coordinates of a parameter set (drops the last state
    /// of every row). No interiority check is performed here.
    pub fn from_params(structure: &DagStructure, params: &ParameterSet) -> Self {
        let mut values = Vec::with_capacity(free_parameter_count(structure));
        for i in 0..structure.variable_count() {
            let free = structure.variable(i).cardinality() - 1;
            for j in 0..structure.row_count(i) {
                values.extend_from_slice(&params.row(i, j)[..free]);
            }
        }
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Rebuilds the full parameter set, recomputing each row's dependent last
    /// state as one minus the free entries.
    pub fn to_params(&self, structure: &DagStructure) -> Result<ParameterSet> {
        let mut tables = Vec::with_capacity(structure.variable_count());
        let mut offset = 0;
        for i in 0..structure.variable_count() {
            let free = structure.variable(i).cardinality() - 1;
            let mut table = Vec::with_capacity(structure.row_count(i));
            for _ in 0..structure.row_count(i) {
                let mut row: Vec<f64> = self.values[offset..offset + free].to_vec();
                let sum: f64 = row.iter().sum();
                row.push(1.0 - sum);
                table.push(row);
                offset += free;
            }
            tables.push(table);
        }
        ParameterSet::new(structure, tables)
    }

    /// Distance to the nearest simplex boundary over all rows: the smallest
    /// free entry or dependent remainder.
    pub fn boundary_margin(&self, structure: &DagStructure) -> f64 {
        let mut margin = f64::INFINITY;
        let mut offset = 0;
        for i in 0..structure.variable_count() {
            let free = structure.variable(i).cardinality() - 1;
            for _ in 0..structure.row_count(i) {
                let row = &self.values[offset..offset + free];
                let sum: f64 = row.iter().sum();
                for &v in row {
                    margin = margin.min(v);
                }
                margin = margin.min(1.0 - sum);
                offset += free;
            }
        }
        margin
    }
}

/// Number of free CPT coordinates of a structure.
pub fn free_parameter_count(structure: &DagStructure) -> usize {
    (0..structure.variable_count())
        .map(|i| structure.row_count(i) * (structure.variable(i).cardinality() - 1))
        .sum()
}

/// Joint input probabilities for every non-class configuration in mixed-radix
/// order (first input variable most significant), with the last configuration
/// dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistributionVector {
    values: Vec<f64>,
}

impl InputDistributionVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The dropped last entry, restored by normalization.
    pub fn restored_last(&self) -> f64 {
        1.0 - self.values.iter().sum::<f64>()
    }
}

/// Outcome of the rank probe.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub points_tested: usize,
    pub full_rank_count: usize,
    pub expected_full_rank: usize,
    pub per_point_ranks: Vec<usize>,
    pub tolerance_used: f64,
    pub step_used: f64,
}

/// Evaluates the parameter-to-input-distribution map at explicit parameters.
///
/// Each entry is Σ_y p(y, x | θ), accumulated by direct products of CPT cells
/// in probability space. This is deliberately a separate code path from the
/// log-space evaluator in the network module, so the two can cross-check each
/// other.
pub fn input_distribution_map(
    structure: &DagStructure,
    params: &ParameterSet,
) -> Result<InputDistributionVector> {
    input_distribution_map_capped(structure, params, DEFAULT_CONFIG_CAP)
}

pub fn input_distribution_map_capped(
    structure: &DagStructure,
    params: &ParameterSet,
    config_cap: u64,
) -> Result<InputDistributionVector> {
    let configs = structure.input_configuration_count();
    if configs > config_cap as u128 {
        return Err(Error::ConfigCapExceeded {
            configs,
            cap: config_cap,
        });
    }
    let inputs = structure.input_variables();
    let cards: Vec<usize> = inputs
        .iter()
        .map(|&i| structure.variable(i).cardinality())
        .collect();
    let r = structure.class_cardinality();
    let n = structure.variable_count();
    let class = structure.class_index();

    let mut values = Vec::with_capacity(configs as usize);
    let mut full = vec![0usize; n];
    for x in configurations(&cards) {
        for (slot, &var) in inputs.iter().enumerate() {
            full[var] = x[slot];
        }
        let mut total = 0.0;
        for k in 0..r {
            full[class] = k;
            let mut product = 1.0;
            for i in 0..n {
                let row = structure.parent_row_index(i, &full);
                product *= params.prob(i, row, full[i]);
            }
            total += product;
        }
        values.push(total);
    }
    values.pop(); // drop the last configuration
    Ok(InputDistributionVector { values })
}

/// Central-difference Jacobian of the input-distribution map at a free
/// parameter point: rows are retained input configurations, columns free
/// coordinates. The dependent entries are recomputed for every perturbation.
///
/// The point must keep a margin of at least twice the step from every simplex
/// boundary so that all perturbed points are valid parameter sets.
pub fn numerical_jacobian(
    structure: &DagStructure,
    point: &FreeParameterVector,
    step: f64,
) -> Result<DMatrix<f64>> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    if point.len() != free_parameter_count(structure) {
        return Err(Error::DimensionMismatch {
            expected: free_parameter_count(structure),
            actual: point.len(),
        });
    }
    let margin = point.boundary_margin(structure);
    if margin < 2.0 * step {
        return Err(Error::BoundaryMargin { margin, step });
    }

    let eval = |values: &[f64]| -> Result<Vec<f64>> {
        let fp = FreeParameterVector {
            values: values.to_vec(),
        };
        let params = fp.to_params(structure)?;
        Ok(input_distribution_map(structure, &params)?.values)
    };

    let rows = (structure.input_configuration_count() as usize).saturating_sub(1);
    let cols = point.len();
    let mut jac = DMatrix::zeros(rows, cols);
    let mut perturbed = point.values.clone();
    for col in 0..cols {
        let original = perturbed[col];
        perturbed[col] = original + step;
        let plus = eval(&perturbed)?;
        perturbed[col] = original - step;
        let minus = eval(&perturbed)?;
        perturbed[col] = original;
        for row in 0..rows {
            jac[(row, col)] = (plus[row] - minus[row]) / (2.0 * step);
        }
    }
    Ok(jac)
}

/// Numerical rank: the number of singular values above `tolerance` times the
/// largest singular value.
pub fn numerical_rank(matrix: &DMatrix<f64>, tolerance: f64) -> Result<usize> {
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteMatrix);
    }
    if matrix.nrows() == 0 || matrix.ncols() == 0 {
        return Ok(0);
    }
    let singular = matrix.clone().svd(false, false).singular_values;
    let largest = singular.iter().copied().fold(0.0f64, f64::max);
    let threshold = tolerance * largest;
    Ok(singular.iter().filter(|&&s| s > threshold).count())
}

/// Samples interior parameter points uniformly on each CPT row simplex and
/// reports the Jacobian rank at each, with the default step and tolerance.
/// Deterministic for a given seed.
pub fn variational_dependence_probe(
    structure: &DagStructure,
    num_points: usize,
    seed: u64,
) -> Result<RankReport> {
    variational_dependence_probe_with(
        structure,
        num_points,
        seed,
        DEFAULT_STEP,
        DEFAULT_RANK_TOLERANCE,
    )
}

pub fn variational_dependence_probe_with(
    structure: &DagStructure,
    num_points: usize,
    seed: u64,
    step: f64,
    rank_tolerance: f64,
) -> Result<RankReport> {
    if num_points == 0 {
        return Err(Error::InvalidArgument(
            "the probe needs at least one point".into(),
        ));
    }
    let rows = (structure.input_configuration_count() as usize).saturating_sub(1);
    let cols = free_parameter_count(structure);
    let expected_full_rank = rows.min(cols);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_point_ranks = Vec::with_capacity(num_points);
    for _ in 0..num_points {
        let point = sample_interior_point(structure, &mut rng, 2.5 * step);
        let jac = numerical_jacobian(structure, &point, step)?;
        per_point_ranks.push(numerical_rank(&jac, rank_tolerance)?);
    }
    let full_rank_count = per_point_ranks
        .iter()
        .filter(|&&r| r == expected_full_rank)
        .count();
    Ok(RankReport {
        points_tested: num_points,
        full_rank_count,
        expected_full_rank,
        per_point_ranks,
        tolerance_used: rank_tolerance,
        step_used: step,
    })
}

/// One uniform draw per CPT row simplex (normalized unit exponentials),
/// redrawing any row that lands within `margin` of a boundary so the result
/// satisfies the Jacobian precondition. The rejection region has negligible
/// mass at the default step.
fn sample_interior_point(
    structure: &DagStructure,
    rng: &mut impl Rng,
    margin: f64,
) -> FreeParameterVector {
    let mut values = Vec::with_capacity(free_parameter_count(structure));
    for i in 0..structure.variable_count() {
        let card = structure.variable(i).cardinality();
        for _ in 0..structure.row_count(i) {
            loop {
                let row = crate::network::sample_dirichlet_row(&vec![1.0; card], rng);
                if row.iter().all(|&v| v >= margin) {
                    values.extend_from_slice(&row[..card - 1]);
                    break;
                }
            }
        }
    }
    FreeParameterVector { values }
}
