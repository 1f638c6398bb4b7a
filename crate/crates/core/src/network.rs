//! Discrete Bayesian networks with Dirichlet priors.
//!
//! A network is a [`DagStructure`] over finite-state [`Variable`]s with one
//! designated class variable, plus a [`ParameterSet`] of conditional
//! probability tables. [`DirichletSpec`] hyperparameters together with
//! [`SufficientStats`] counts form the conjugate posterior used by the
//! sequential predictive and marginal-likelihood operations.
//!
//! Conventions fixed here and relied on by every other module:
//!
//! * CPT rows are indexed by a mixed-radix encoding of the parent
//!   configuration with the **first parent in the parent list most
//!   significant**.
//! * Input assignments (`x_assignment`) list the states of all non-class
//!   variables in ascending variable-index order.
//! * All probability arithmetic is done in log space; zero factors produce
//!   −∞ rather than errors, so deterministic CPTs are legal models.
//! * Sampling uses the ChaCha8 stream cipher generator seeded explicitly;
//!   results are reproducible for a given seed on any build.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::logspace::LogSumExp;

/// CPT rows must sum to one within this tolerance.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// A named finite-state variable. States are indexed `0..cardinality`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    name: String,
    cardinality: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, cardinality: usize) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidModel(
                "variable name must be non-empty".into(),
            ));
        }
        if cardinality < 2 {
            return Err(Error::InvalidModel(format!(
                "variable '{name}' must have at least 2 states, got {cardinality}"
            )));
        }
        Ok(Self { name, cardinality })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }
}

/// A directed acyclic graph over variables with one designated class variable.
///
/// Parent lists are ordered; the order fixes the mixed-radix row indexing of
/// every table tied to this structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DagStructure {
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
    class_index: usize,
    topo_order: Vec<usize>,
}

impl DagStructure {
    pub fn new(
        variables: Vec<Variable>,
        parents: Vec<Vec<usize>>,
        class_index: usize,
    ) -> Result<Self> {
        let n = variables.len();
        if n == 0 {
            return Err(Error::InvalidModel(
                "a network needs at least one variable".into(),
            ));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if variables[i].name == variables[j].name {
                    return Err(Error::InvalidModel(format!(
                        "duplicate variable name '{}'",
                        variables[i].name
                    )));
                }
            }
        }
        if parents.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected {n} parent lists, got {}",
                parents.len()
            )));
        }
        for (child, list) in parents.iter().enumerate() {
            for (pos, &p) in list.iter().enumerate() {
                if p >= n {
                    return Err(Error::InvalidModel(format!(
                        "parent index {p} of '{}' is out of range",
                        variables[child].name
                    )));
                }
                if p == child {
                    return Err(Error::InvalidModel(format!(
                        "variable '{}' lists itself as a parent",
                        variables[child].name
                    )));
                }
                if list[..pos].contains(&p) {
                    return Err(Error::InvalidModel(format!(
                        "variable '{}' lists parent '{}' twice",
                        variables[child].name, variables[p].name
                    )));
                }
            }
        }
        if class_index >= n {
            return Err(Error::InvalidModel(format!(
                "class index {class_index} is out of range for {n} variables"
            )));
        }
        let topo_order = topological_order(n, &parents)?;
        Ok(Self {
            variables,
            parents,
            class_index,
            topo_order,
        })
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, index: usize) -> &Variable {
        &self.variables[index]
    }

    pub fn parents(&self, index: usize) -> &[usize] {
        &self.parents[index]
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn class_variable(&self) -> &Variable {
        &self.variables[self.class_index]
    }

    /// Number of class states.
    pub fn class_cardinality(&self) -> usize {
        self.class_variable().cardinality()
    }

    /// A canonical topological order: Kahn's algorithm, always taking the
    /// lowest-index available node. Used by ancestral sampling.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo_order
    }

    pub fn find_variable(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Children of `index`, ascending.
    pub fn children(&self, index: usize) -> Vec<usize> {
        (0..self.variables.len())
            .filter(|&c| self.parents[c].contains(&index))
            .collect()
    }

    /// Marks every node reachable from `index` by directed edges (excluding
    /// `index` itself).
    pub fn descendants(&self, index: usize) -> Vec<bool> {
        let n = self.variables.len();
        let mut seen = vec![false; n];
        let mut stack = self.children(index);
        while let Some(node) = stack.pop() {
            if seen[node] {
                continue;
            }
            seen[node] = true;
            stack.extend(self.children(node));
        }
        seen
    }

    /// Number of CPT rows for a node: the product of its parents' cardinalities.
    pub fn row_count(&self, index: usize) -> usize {
        self.parents[index]
            .iter()
            .map(|&p| self.variables[p].cardinality())
            .product()
    }

    /// Mixed-radix row index of a node's parent configuration within a full
    /// assignment. The first parent in the parent list is most significant.
    pub fn parent_row_index(&self, index: usize, assignment: &[usize]) -> usize {
        let mut row = 0;
        for &p in &self.parents[index] {
            row = row * self.variables[p].cardinality() + assignment[p];
        }
        row
    }

    /// Indices of the non-class variables, ascending.
    pub fn input_variables(&self) -> Vec<usize> {
        (0..self.variables.len())
            .filter(|&i| i != self.class_index)
            .collect()
    }

    /// Number of joint configurations of the non-class variables.
    pub fn input_configuration_count(&self) -> u128 {
        self.input_variables()
            .iter()
            .map(|&i| self.variables[i].cardinality() as u128)
            .product()
    }

    /// Validates a full assignment (one state per variable, in variable order).
    pub fn check_assignment(&self, assignment: &[usize]) -> Result<()> {
        if assignment.len() != self.variables.len() {
            return Err(Error::DimensionMismatch {
                expected: self.variables.len(),
                actual: assignment.len(),
            });
        }
        for (&state, var) in assignment.iter().zip(&self.variables) {
            if state >= var.cardinality() {
                return Err(Error::StateOutOfRange {
                    variable: var.name.clone(),
                    state,
                    cardinality: var.cardinality(),
                });
            }
        }
        Ok(())
    }

    /// Builds a full assignment from an input assignment (non-class variables
    /// in ascending index order) and a class state.
    pub fn assignment_with_class(
        &self,
        x_assignment: &[usize],
        class_state: usize,
    ) -> Result<Vec<usize>> {
        let n = self.variables.len();
        if x_assignment.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                actual: x_assignment.len(),
            });
        }
        let mut full = Vec::with_capacity(n);
        let mut xs = x_assignment.iter();
        for i in 0..n {
            if i == self.class_index {
                full.push(class_state);
            } else {
                full.push(*xs.next().expect("length checked above"));
            }
        }
        self.check_assignment(&full)?;
        Ok(full)
    }

    /// The input part of a full assignment (class entry removed).
    pub fn strip_class(&self, assignment: &[usize]) -> Vec<usize> {
        assignment
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.class_index)
            .map(|(_, &s)| s)
            .collect()
    }

    /// Adjacency relation packed into a bitset, row-major over ordered pairs
    /// (parent, child) with the diagonal skipped. This is the canonical
    /// structure identity used for tie-breaking and model priors.
    ///
    /// Only defined for networks of at most 11 variables (110 bits).
    pub fn adjacency_encoding(&self) -> u128 {
        let n = self.variables.len();
        assert!(
            n * (n - 1) <= 128,
            "adjacency encoding needs n*(n-1) <= 128 bits"
        );
        let mut mask = 0u128;
        let mut bit = 0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if self.parents[j].contains(&i) {
                    mask |= 1u128 << bit;
                }
                bit += 1;
            }
        }
        mask
    }
}

/// Kahn's algorithm with lowest-index tie-breaking; errors on cycles.
fn topological_order(n: usize, parents: &[Vec<usize>]) -> Result<Vec<usize>> {
    let mut remaining_parents: Vec<usize> = parents.iter().map(|p| p.len()).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    loop {
        let next = (0..n).find(|&i| !placed[i] && remaining_parents[i] == 0);
        match next {
            Some(node) => {
                placed[node] = true;
                order.push(node);
                for child in 0..n {
                    if !placed[child] && parents[child].contains(&node) {
                        remaining_parents[child] -= 1;
                    }
                }
            }
            None => break,
        }
    }
    if order.len() != n {
        return Err(Error::InvalidModel(
            "the parent relation contains a cycle".into(),
        ));
    }
    Ok(order)
}

/// Iterates all joint configurations of the given cardinalities in mixed-radix
/// order, first position most significant. An empty cardinality list yields
/// exactly one empty configuration.
pub fn configurations(cardinalities: &[usize]) -> ConfigIter {
    ConfigIter {
        cards: cardinalities.to_vec(),
        current: vec![0; cardinalities.len()],
        done: cardinalities.contains(&0),
    }
}

pub struct ConfigIter {
    cards: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl Iterator for ConfigIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let item = self.current.clone();
        // increment, last position fastest
        let mut pos = self.cards.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.current[pos] += 1;
            if self.current[pos] < self.cards[pos] {
                break;
            }
            self.current[pos] = 0;
        }
        Some(item)
    }
}

/// One probability table per node: rows indexed by parent configuration,
/// columns by state. Every row sums to one within [`ROW_SUM_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    tables: Vec<Vec<Vec<f64>>>,
}

impl ParameterSet {
    pub fn new(structure: &DagStructure, tables: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        check_table_shape(structure, &tables, "parameter")?;
        for (i, table) in tables.iter().enumerate() {
            for (j, row) in table.iter().enumerate() {
                let mut sum = 0.0;
                for &p in row {
                    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                        return Err(Error::InvalidModel(format!(
                            "probability {p} at variable '{}', row {j} is outside [0, 1]",
                            structure.variable(i).name()
                        )));
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return Err(Error::InvalidModel(format!(
                        "row {j} of variable '{}' sums to {sum}, not 1",
                        structure.variable(i).name()
                    )));
                }
            }
        }
        Ok(Self { tables })
    }

    /// All rows uniform.
    pub fn uniform(structure: &DagStructure) -> Self {
        let tables = (0..structure.variable_count())
            .map(|i| {
                let r = structure.variable(i).cardinality();
                vec![vec![1.0 / r as f64; r]; structure.row_count(i)]
            })
            .collect();
        Self { tables }
    }

    pub fn prob(&self, node: usize, row: usize, state: usize) -> f64 {
        self.tables[node][row][state]
    }

    pub fn row(&self, node: usize, row: usize) -> &[f64] {
        &self.tables[node][row]
    }

    pub fn tables(&self) -> &[Vec<Vec<f64>>] {
        &self.tables
    }
}

/// Dirichlet hyperparameters mirroring the [`ParameterSet`] shape; all entries
/// strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSpec {
    tables: Vec<Vec<Vec<f64>>>,
}

impl DirichletSpec {
    pub fn new(structure: &DagStructure, tables: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        check_table_shape(structure, &tables, "hyperparameter")?;
        for (i, table) in tables.iter().enumerate() {
            for (j, row) in table.iter().enumerate() {
                for &a in row {
                    if !a.is_finite() || a <= 0.0 {
                        return Err(Error::InvalidModel(format!(
                            "hyperparameter {a} at variable '{}', row {j} must be positive",
                            structure.variable(i).name()
                        )));
                    }
                }
            }
        }
        Ok(Self { tables })
    }

    /// The same scalar in every cell. The conventional default is α = 1.
    pub fn constant(structure: &DagStructure, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "hyperparameter alpha must be positive, got {alpha}"
            )));
        }
        let tables = (0..structure.variable_count())
            .map(|i| {
                let r = structure.variable(i).cardinality();
                vec![vec![alpha; r]; structure.row_count(i)]
            })
            .collect();
        Ok(Self { tables })
    }

    pub fn alpha(&self, node: usize, row: usize, state: usize) -> f64 {
        self.tables[node][row][state]
    }

    pub fn row(&self, node: usize, row: usize) -> &[f64] {
        &self.tables[node][row]
    }

    pub fn tables(&self) -> &[Vec<Vec<f64>>] {
        &self.tables
    }

    fn same_shape_as_counts(&self, stats: &SufficientStats) -> bool {
        self.tables.len() == stats.tables.len()
            && self.tables.iter().zip(&stats.tables).all(|(a, n)| {
                a.len() == n.len() && a.iter().zip(n).all(|(ar, nr)| ar.len() == nr.len())
            })
    }
}

/// Observation counts N, same shape as the parameter tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SufficientStats {
    tables: Vec<Vec<Vec<u64>>>,
}

impl SufficientStats {
    pub fn zeros(structure: &DagStructure) -> Self {
        let tables = (0..structure.variable_count())
            .map(|i| vec![vec![0u64; structure.variable(i).cardinality()]; structure.row_count(i)])
            .collect();
        Self { tables }
    }

    /// Adds one complete case. The case must already be validated against the
    /// structure the stats were created from.
    pub fn add_case(&mut self, structure: &DagStructure, case: &[usize]) {
        for i in 0..structure.variable_count() {
            let row = structure.parent_row_index(i, case);
            self.tables[i][row][case[i]] += 1;
        }
    }

    pub fn count(&self, node: usize, row: usize, state: usize) -> u64 {
        self.tables[node][row][state]
    }

    pub fn row(&self, node: usize, row: usize) -> &[u64] {
        &self.tables[node][row]
    }

    /// Total observations recorded for one node (equals the number of cases
    /// counted).
    pub fn node_total(&self, node: usize) -> u64 {
        self.tables[node].iter().flatten().sum()
    }
}

fn check_table_shape(structure: &DagStructure, tables: &[Vec<Vec<f64>>], what: &str) -> Result<()> {
    if tables.len() != structure.variable_count() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} {what} tables, got {}",
            structure.variable_count(),
            tables.len()
        )));
    }
    for (i, table) in tables.iter().enumerate() {
        let rows = structure.row_count(i);
        let states = structure.variable(i).cardinality();
        if table.len() != rows {
            return Err(Error::ShapeMismatch(format!(
                "variable '{}' needs {rows} {what} rows, got {}",
                structure.variable(i).name(),
                table.len()
            )));
        }
        for (j, row) in table.iter().enumerate() {
            if row.len() != states {
                return Err(Error::ShapeMismatch(format!(
                    "row {j} of variable '{}' needs {states} {what} entries, got {}",
                    structure.variable(i).name(),
                    row.len()
                )));
            }
        }
    }
    Ok(())
}

/// Complete cases over named columns. Every entry is a state index; missing
/// values are rejected at construction (complete data only).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    columns: Vec<String>,
    rows: Vec<Vec<usize>>,
}

impl Dataset {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<usize>>) -> Result<Self> {
        for i in 0..columns.len() {
            if columns[i].is_empty() {
                return Err(Error::ColumnMismatch("empty column name".into()));
            }
            for j in (i + 1)..columns.len() {
                if columns[i] == columns[j] {
                    return Err(Error::ColumnMismatch(format!(
                        "duplicate column '{}'",
                        columns[i]
                    )));
                }
            }
        }
        for (l, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::ColumnMismatch(format!(
                    "row {l} has {} entries for {} columns",
                    row.len(),
                    columns.len()
                )));
            }
        }
        Ok(Self { columns, rows })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Maps each structure variable to its dataset column, requiring the column
/// set to be exactly the variable set.
fn column_permutation(structure: &DagStructure, dataset: &Dataset) -> Result<Vec<usize>> {
    if dataset.columns.len() != structure.variable_count() {
        return Err(Error::ColumnMismatch(format!(
            "dataset has {} columns for {} variables",
            dataset.columns.len(),
            structure.variable_count()
        )));
    }
    let mut perm = Vec::with_capacity(structure.variable_count());
    for var in structure.variables() {
        match dataset.columns.iter().position(|c| c == var.name()) {
            Some(col) => perm.push(col),
            None => {
                return Err(Error::ColumnMismatch(format!(
                    "dataset is missing a column for variable '{}'",
                    var.name()
                )))
            }
        }
    }
    Ok(perm)
}

/// Dataset rows permuted into structure variable order, each state validated
/// against its variable's cardinality.
pub fn aligned_rows(structure: &DagStructure, dataset: &Dataset) -> Result<Vec<Vec<usize>>> {
    let perm = column_permutation(structure, dataset)?;
    let mut out = Vec::with_capacity(dataset.len());
    for row in &dataset.rows {
        let case: Vec<usize> = perm.iter().map(|&c| row[c]).collect();
        structure.check_assignment(&case)?;
        out.push(case);
    }
    Ok(out)
}

/// log p(z) under the factored joint: the sum over nodes of the log CPT entry
/// selected by the assignment. −∞ when any factor is exactly zero.
pub fn joint_log_prob(
    structure: &DagStructure,
    params: &ParameterSet,
    assignment: &[usize],
) -> Result<f64> {
    structure.check_assignment(assignment)?;
    Ok(joint_log_prob_unchecked(structure, params, assignment))
}

/// As [`joint_log_prob`] for an assignment the caller has already validated.
/// Hot loops (Monte-Carlo scoring) validate once and then call this.
pub(crate) fn joint_log_prob_unchecked(
    structure: &DagStructure,
    params: &ParameterSet,
    assignment: &[usize],
) -> f64 {
    let mut total = 0.0;
    for i in 0..structure.variable_count() {
        let row = structure.parent_row_index(i, assignment);
        total += params.prob(i, row, assignment[i]).ln();
    }
    total
}

/// p(y | x) over class states, by enumeration of the class variable.
///
/// Errors with [`Error::DegenerateDistribution`] when every class state has
/// zero joint probability under the given input.
pub fn conditional_class_dist(
    structure: &DagStructure,
    params: &ParameterSet,
    x_assignment: &[usize],
) -> Result<Vec<f64>> {
    let r = structure.class_cardinality();
    let mut logs = Vec::with_capacity(r);
    for k in 0..r {
        let full = structure.assignment_with_class(x_assignment, k)?;
        logs.push(joint_log_prob(structure, params, &full)?);
    }
    let total = crate::logspace::log_sum_exp(&logs);
    if total == f64::NEG_INFINITY {
        return Err(Error::DegenerateDistribution);
    }
    Ok(logs.iter().map(|l| (l - total).exp()).collect())
}

/// p(x) = Σ_y p(y, x), as a plain probability in [0, 1].
pub fn input_marginal_prob(
    structure: &DagStructure,
    params: &ParameterSet,
    x_assignment: &[usize],
) -> Result<f64> {
    Ok(input_marginal_log_prob(structure, params, x_assignment)?.exp())
}

/// log Σ_y p(y, x); −∞ when the marginal is zero.
pub fn input_marginal_log_prob(
    structure: &DagStructure,
    params: &ParameterSet,
    x_assignment: &[usize],
) -> Result<f64> {
    let r = structure.class_cardinality();
    let mut acc = LogSumExp::new();
    for k in 0..r {
        let full = structure.assignment_with_class(x_assignment, k)?;
        acc.add(joint_log_prob(structure, params, &full)?);
    }
    Ok(acc.value())
}

/// Counts N_ijk over the dataset: node i in state k with parents in
/// configuration j.
pub fn collect_stats(structure: &DagStructure, dataset: &Dataset) -> Result<SufficientStats> {
    let rows = aligned_rows(structure, dataset)?;
    let mut stats = SufficientStats::zeros(structure);
    for case in &rows {
        stats.add_case(structure, case);
    }
    Ok(stats)
}

/// Conjugate update: entrywise α + N.
pub fn posterior_hyperparams(
    prior: &DirichletSpec,
    stats: &SufficientStats,
) -> Result<DirichletSpec> {
    if !prior.same_shape_as_counts(stats) {
        return Err(Error::ShapeMismatch(
            "prior and sufficient statistics have different table shapes".into(),
        ));
    }
    let tables = prior
        .tables
        .iter()
        .zip(&stats.tables)
        .map(|(at, nt)| {
            at.iter()
                .zip(nt)
                .map(|(ar, nr)| ar.iter().zip(nr).map(|(&a, &n)| a + n as f64).collect())
                .collect()
        })
        .collect();
    Ok(DirichletSpec { tables })
}

/// log p(case | history) under the Dirichlet posterior predictive: the sum
/// over nodes of log[(α + N) / Σ(α + N)] at the case's cell.
///
/// Equals the difference of [`log_marginal_likelihood`] on history ∪ case
/// versus history alone.
pub fn predictive_case_log_prob(
    structure: &DagStructure,
    prior: &DirichletSpec,
    history: &SufficientStats,
    case: &[usize],
) -> Result<f64> {
    structure.check_assignment(case)?;
    if !prior.same_shape_as_counts(history) {
        return Err(Error::ShapeMismatch(
            "prior and history statistics have different table shapes".into(),
        ));
    }
    let mut total = 0.0;
    for i in 0..structure.variable_count() {
        let row = structure.parent_row_index(i, case);
        let alphas = prior.row(i, row);
        let counts = history.row(i, row);
        let numer = alphas[case[i]] + counts[case[i]] as f64;
        let denom: f64 = alphas.iter().zip(counts).map(|(&a, &n)| a + n as f64).sum();
        total += (numer / denom).ln();
    }
    Ok(total)
}

/// log p(D | m) with parameters integrated out.
///
/// Computed two ways on every call — the chain rule of sequential predictives
/// and the closed-form ratio of log-gamma terms — and the two routes are
/// required to agree within 1e-9 (scaled); disagreement is a bug and panics.
/// The closed-form value is returned.
pub fn log_marginal_likelihood(
    structure: &DagStructure,
    prior: &DirichletSpec,
    dataset: &Dataset,
) -> Result<f64> {
    let rows = aligned_rows(structure, dataset)?;
    log_marginal_likelihood_of_rows(structure, prior, &rows)
}

/// As [`log_marginal_likelihood`], but over rows already aligned to the
/// structure's variable order.
pub(crate) fn log_marginal_likelihood_of_rows(
    structure: &DagStructure,
    prior: &DirichletSpec,
    rows: &[Vec<usize>],
) -> Result<f64> {
    let mut stats = SufficientStats::zeros(structure);

    // Chain rule: log p(D) = Σ_l log p(case_l | cases 1..l-1).
    let mut chain = 0.0;
    for case in rows {
        chain += predictive_case_log_prob(structure, prior, &stats, case)?;
        stats.add_case(structure, case);
    }

    // Closed form over the final counts.
    let mut closed = 0.0;
    for i in 0..structure.variable_count() {
        for j in 0..structure.row_count(i) {
            let alphas = prior.row(i, j);
            let counts = stats.row(i, j);
            let alpha_sum: f64 = alphas.iter().sum();
            let count_sum: u64 = counts.iter().sum();
            closed -= ln_gamma_ratio(alpha_sum, count_sum);
            for (&a, &n) in alphas.iter().zip(counts) {
                closed += ln_gamma_ratio(a, n);
            }
        }
    }

    let tolerance = 1e-9 * (1.0 + closed.abs());
    assert!(
        (chain - closed).abs() <= tolerance,
        "marginal-likelihood routes disagree: chain rule {chain} vs closed form {closed}"
    );
    Ok(closed)
}

/// ln Γ(a + n) − ln Γ(a) for integer n ≥ 0. Small counts use the rising
/// factorial Σ ln(a + t), which stays exact where the difference of two huge
/// ln Γ values would cancel catastrophically (large a, few observations);
/// larger counts fall back to ln Γ, where the difference itself is large and
/// the relative error benign.
fn ln_gamma_ratio(a: f64, n: u64) -> f64 {
    if n <= 64 {
        (0..n).map(|t| (a + t as f64).ln()).sum()
    } else {
        ln_gamma(a + n as f64) - ln_gamma(a)
    }
}

/// Draws `n` complete cases by ancestral sampling in the canonical topological
/// order, using the ChaCha8 generator seeded with `seed`. Deterministic for a
/// given seed.
pub fn sample_dataset(
    structure: &DagStructure,
    params: &ParameterSet,
    n: usize,
    seed: u64,
) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns: Vec<String> = structure
        .variables()
        .iter()
        .map(|v| v.name().to_string())
        .collect();
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut case = vec![0usize; structure.variable_count()];
        for &node in structure.topological_order() {
            let row = structure.parent_row_index(node, &case);
            case[node] = sample_state(params.row(node, row), &mut rng);
        }
        rows.push(case);
    }
    Dataset { columns, rows }
}

fn sample_state(row: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    for (state, &p) in row.iter().enumerate() {
        cum += p;
        if u < cum {
            return state;
        }
    }
    row.len() - 1
}

/// Draws one full parameter set from the Dirichlet distribution described by
/// `spec`, row by row in node order. Used for Monte-Carlo scoring.
pub fn sample_parameter_set(
    structure: &DagStructure,
    spec: &DirichletSpec,
    rng: &mut impl Rng,
) -> ParameterSet {
    let tables = (0..structure.variable_count())
        .map(|i| {
            (0..structure.row_count(i))
                .map(|j| sample_dirichlet_row(spec.row(i, j), rng))
                .collect()
        })
        .collect();
    ParameterSet { tables }
}

/// One draw from Dirichlet(alphas) via normalized Gamma variates.
pub fn sample_dirichlet_row(alphas: &[f64], rng: &mut impl Rng) -> Vec<f64> {
    let mut draws: Vec<f64> = alphas
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("positive shape").sample(rng))
        .collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 {
        for d in &mut draws {
            *d /= total;
        }
    } else {
        // all draws underflowed to zero; fall back to the mean
        let alpha_sum: f64 = alphas.iter().sum();
        for (d, &a) in draws.iter_mut().zip(alphas) {
            *d = a / alpha_sum;
        }
    }
    draws
}
