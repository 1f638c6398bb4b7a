//! The JSON model format and the CSV dataset format.
//!
//! A model file declares the variables (with optional state labels), the
//! directed edges (parent → child; the order of appearance fixes each node's
//! parent order and therefore the CPT row indexing), the class variable, a
//! Dirichlet prior (a scalar for every cell, or per-node tables), and
//! optionally explicit parameter tables.
//!
//! Datasets are CSV with a header row of variable names; cells are integer
//! state indices or declared state labels. Parsing is strict: unknown
//! columns, missing cells, and out-of-range states are load errors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use preqnet::network::{DagStructure, Dataset, DirichletSpec, ParameterSet, Variable};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema: u32,
    pub class: String,
    pub variables: Vec<VariableDecl>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default = "default_prior")]
    pub prior: PriorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<BTreeMap<String, Vec<Vec<f64>>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDecl {
    pub name: String,
    pub cardinality: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSpec {
    Scalar(f64),
    Tables(BTreeMap<String, Vec<Vec<f64>>>),
}

fn default_prior() -> PriorSpec {
    PriorSpec::Scalar(1.0)
}

/// Everything a command needs from a parsed model file.
pub struct LoadedModel {
    pub file: ModelFile,
    pub structure: DagStructure,
    pub prior: DirichletSpec,
    pub parameters: Option<ParameterSet>,
}

pub fn parse_model(text: &str) -> Result<LoadedModel, CliError> {
    let file: ModelFile = serde_json::from_str(text)
        .map_err(|e| CliError::Validation(format!("model file does not parse: {e}")))?;
    build_model(file)
}

pub fn build_model(file: ModelFile) -> Result<LoadedModel, CliError> {
    if file.schema != SCHEMA_VERSION {
        return Err(CliError::Validation(format!(
            "unsupported schema version {}, expected {SCHEMA_VERSION}",
            file.schema
        )));
    }
    let mut variables = Vec::with_capacity(file.variables.len());
    for decl in &file.variables {
        let var = Variable::new(decl.name.clone(), decl.cardinality)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        if let Some(states) = &decl.states {
            if states.len() != decl.cardinality {
                return Err(CliError::Validation(format!(
                    "variable '{}' declares {} state labels for {} states",
                    decl.name,
                    states.len(),
                    decl.cardinality
                )));
            }
            for (i, label) in states.iter().enumerate() {
                if label.is_empty() || label.contains(',') {
                    return Err(CliError::Validation(format!(
                        "state label '{label}' of variable '{}' is empty or contains a comma",
                        decl.name
                    )));
                }
                if label.parse::<i64>().is_ok() {
                    return Err(CliError::Validation(format!(
                        "state label '{label}' of variable '{}' looks like an integer index",
                        decl.name
                    )));
                }
                if states[..i].contains(label) {
                    return Err(CliError::Validation(format!(
                        "duplicate state label '{label}' on variable '{}'",
                        decl.name
                    )));
                }
            }
        }
        variables.push(var);
    }

    let index_of = |name: &str| -> Result<usize, CliError> {
        variables
            .iter()
            .position(|v| v.name() == name)
            .ok_or_else(|| CliError::Validation(format!("unknown variable '{name}'")))
    };

    // parent order per node = order of appearance in the edge list
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); variables.len()];
    for (parent_name, child_name) in &file.edges {
        let parent = index_of(parent_name)?;
        let child = index_of(child_name)?;
        if parents[child].contains(&parent) {
            return Err(CliError::Validation(format!(
                "duplicate edge {parent_name} -> {child_name}"
            )));
        }
        parents[child].push(parent);
    }
    let class_index = index_of(&file.class)?;
    let structure = DagStructure::new(variables, parents, class_index)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let prior = match &file.prior {
        PriorSpec::Scalar(alpha) => DirichletSpec::constant(&structure, *alpha)
            .map_err(|e| CliError::Validation(e.to_string()))?,
        PriorSpec::Tables(tables) => {
            let full = tables_for_structure(&structure, tables, 1.0)?;
            DirichletSpec::new(&structure, full).map_err(|e| CliError::Validation(e.to_string()))?
        }
    };

    let parameters = match &file.parameters {
        None => None,
        Some(tables) => {
            let mut full = Vec::with_capacity(structure.variable_count());
            for i in 0..structure.variable_count() {
                let name = structure.variable(i).name();
                match tables.get(name) {
                    Some(table) => full.push(table.clone()),
                    None => {
                        return Err(CliError::Validation(format!(
                            "parameters are missing a table for variable '{name}'"
                        )))
                    }
                }
            }
            for name in tables.keys() {
                if structure.find_variable(name).is_none() {
                    return Err(CliError::Validation(format!(
                        "parameters mention unknown variable '{name}'"
                    )));
                }
            }
            Some(
                ParameterSet::new(&structure, full)
                    .map_err(|e| CliError::Validation(e.to_string()))?,
            )
        }
    };

    Ok(LoadedModel {
        file,
        structure,
        prior,
        parameters,
    })
}

/// Per-node prior tables, defaulting unlisted nodes to a constant α.
fn tables_for_structure(
    structure: &DagStructure,
    given: &BTreeMap<String, Vec<Vec<f64>>>,
    default_alpha: f64,
) -> Result<Vec<Vec<Vec<f64>>>, CliError> {
    for name in given.keys() {
        if structure.find_variable(name).is_none() {
            return Err(CliError::Validation(format!(
                "prior mentions unknown variable '{name}'"
            )));
        }
    }
    let mut full = Vec::with_capacity(structure.variable_count());
    for i in 0..structure.variable_count() {
        let name = structure.variable(i).name();
        match given.get(name) {
            Some(table) => full.push(table.clone()),
            None => full.push(vec![
                vec![default_alpha; structure.variable(i).cardinality()];
                structure.row_count(i)
            ]),
        }
    }
    Ok(full)
}

/// Parses a dataset CSV against the model's variable declarations. Cells may
/// be integer state indices or (when declared) state labels; every row must
/// be complete.
pub fn parse_dataset(text: &str, model: &LoadedModel) -> Result<Dataset, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| CliError::Validation("dataset is empty; a header row is required".into()))?;
    let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();

    // column -> (variable index, declared labels)
    let mut column_vars = Vec::with_capacity(columns.len());
    for column in &columns {
        let var = model
            .structure
            .find_variable(column)
            .ok_or_else(|| CliError::Validation(format!("unknown dataset column '{column}'")))?;
        let labels = model.file.variables[var].states.clone();
        column_vars.push((var, labels));
    }

    let mut rows = Vec::new();
    for (line_no, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != columns.len() {
            return Err(CliError::Validation(format!(
                "row {} has {} cells for {} columns",
                line_no + 1,
                cells.len(),
                columns.len()
            )));
        }
        let mut row = Vec::with_capacity(cells.len());
        for (col, (cell, (var, labels))) in cells.iter().zip(&column_vars).enumerate() {
            if cell.is_empty() {
                return Err(CliError::Validation(format!(
                    "row {} is missing a value for '{}'; complete data is required",
                    line_no + 1,
                    columns[col]
                )));
            }
            let state = parse_state(cell, labels.as_deref()).ok_or_else(|| {
                CliError::Validation(format!(
                    "cannot interpret '{cell}' as a state of variable '{}'",
                    model.structure.variable(*var).name()
                ))
            })?;
            let card = model.structure.variable(*var).cardinality();
            if state >= card {
                return Err(CliError::Validation(format!(
                    "state {state} is out of range for variable '{}' ({card} states)",
                    model.structure.variable(*var).name()
                )));
            }
            row.push(state);
        }
        rows.push(row);
    }
    Dataset::new(columns, rows).map_err(|e| CliError::Validation(e.to_string()))
}

fn parse_state(cell: &str, labels: Option<&[String]>) -> Option<usize> {
    if let Some(labels) = labels {
        if let Some(idx) = labels.iter().position(|l| l == cell) {
            return Some(idx);
        }
    }
    cell.parse::<usize>().ok()
}

/// Serializes a dataset as CSV with integer state indices.
pub fn dataset_to_csv(dataset: &Dataset) -> String {
    let mut out = dataset.columns().join(",");
    out.push('\n');
    for row in dataset.rows() {
        let cells: Vec<String> = row.iter().map(|s| s.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses a `--predict` argument of the form `X1=0,X2=hi` into an input
/// assignment over the non-class variables, ascending variable order.
pub fn parse_prediction_input(text: &str, model: &LoadedModel) -> Result<Vec<usize>, CliError> {
    let structure = &model.structure;
    let inputs = structure.input_variables();
    let mut values: Vec<Option<usize>> = vec![None; structure.variable_count()];
    for pair in text.split(',') {
        let (name, value) = pair.split_once('=').ok_or_else(|| {
            CliError::Validation(format!("'{pair}' is not of the form variable=state"))
        })?;
        let (name, value) = (name.trim(), value.trim());
        let var = structure
            .find_variable(name)
            .ok_or_else(|| CliError::Validation(format!("unknown variable '{name}'")))?;
        if var == structure.class_index() {
            return Err(CliError::Validation(format!(
                "'{name}' is the class variable; predictions condition on inputs only"
            )));
        }
        if values[var].is_some() {
            return Err(CliError::Validation(format!(
                "variable '{name}' given twice"
            )));
        }
        let labels = model.file.variables[var].states.clone();
        let state = parse_state(value, labels.as_deref()).ok_or_else(|| {
            CliError::Validation(format!("cannot interpret '{value}' as a state of '{name}'"))
        })?;
        if state >= structure.variable(var).cardinality() {
            return Err(CliError::Validation(format!(
                "state {state} is out of range for variable '{name}'"
            )));
        }
        values[var] = Some(state);
    }
    let mut assignment = Vec::with_capacity(inputs.len());
    for &var in &inputs {
        match values[var] {
            Some(state) => assignment.push(state),
            None => {
                return Err(CliError::Validation(format!(
                    "prediction input is missing variable '{}'",
                    structure.variable(var).name()
                )))
            }
        }
    }
    Ok(assignment)
}
