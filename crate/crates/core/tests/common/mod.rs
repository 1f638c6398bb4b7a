//! Shared generators for the property suites: random desk-scale networks,
//! interior parameter sets, and seeded datasets. Not every suite uses every
//! helper.
#![allow(dead_code)]

use preqnet::network::{sample_dirichlet_row, DagStructure, Dataset, ParameterSet, Variable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random DAG over `n` variables with cardinalities in `2..=max_card` and a
/// random class variable. Acyclicity comes from orienting edges along a
/// random permutation.
pub fn random_structure(rng: &mut ChaCha8Rng, n: usize, max_card: usize) -> DagStructure {
    let variables: Vec<Variable> = (0..n)
        .map(|i| {
            let card = rng.gen_range(2..=max_card);
            Variable::new(format!("V{i}"), card).unwrap()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut position = vec![0usize; n];
    for (pos, &v) in order.iter().enumerate() {
        position[v] = pos;
    }
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for child in 0..n {
        for parent in 0..n {
            if parent != child && position[parent] < position[child] && rng.gen_bool(0.4) {
                parents[child].push(parent);
            }
        }
    }
    let class_index = rng.gen_range(0..n);
    DagStructure::new(variables, parents, class_index).unwrap()
}

/// A naive Bayes structure: class root `Y`, binary by default, with `n`
/// children of the given cardinality.
pub fn naive_bayes_structure(n: usize, class_card: usize, input_card: usize) -> DagStructure {
    let mut variables = vec![Variable::new("Y", class_card).unwrap()];
    let mut parents = vec![Vec::new()];
    for i in 0..n {
        variables.push(Variable::new(format!("X{}", i + 1), input_card).unwrap());
        parents.push(vec![0]);
    }
    DagStructure::new(variables, parents, 0).unwrap()
}

/// A class-sink structure: inputs are roots (with a sprinkling of edges among
/// them), and the class's parents are a random subset of the inputs.
pub fn random_class_sink_structure(rng: &mut ChaCha8Rng, n_inputs: usize) -> DagStructure {
    let mut variables: Vec<Variable> = (0..n_inputs)
        .map(|i| Variable::new(format!("X{}", i + 1), 2).unwrap())
        .collect();
    variables.push(Variable::new("Y", 2).unwrap());
    let class = n_inputs;
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n_inputs];
    #[allow(clippy::needless_range_loop)]
    for child in 1..n_inputs {
        for parent in 0..child {
            if rng.gen_bool(0.3) {
                parents[child].push(parent);
            }
        }
    }
    let mut class_parents: Vec<usize> = (0..n_inputs).filter(|_| rng.gen_bool(0.6)).collect();
    if class_parents.is_empty() {
        class_parents.push(rng.gen_range(0..n_inputs));
    }
    parents.push(class_parents);
    DagStructure::new(variables, parents, class).unwrap()
}

/// Parameters drawn uniformly per row, redrawn until every entry clears
/// `margin` so log-ratios and tight tolerances stay well-behaved.
pub fn random_interior_params(
    rng: &mut ChaCha8Rng,
    structure: &DagStructure,
    margin: f64,
) -> ParameterSet {
    let mut tables = Vec::with_capacity(structure.variable_count());
    for i in 0..structure.variable_count() {
        let card = structure.variable(i).cardinality();
        let mut table = Vec::with_capacity(structure.row_count(i));
        for _ in 0..structure.row_count(i) {
            loop {
                let row = sample_dirichlet_row(&vec![1.0; card], rng);
                if row.iter().all(|&v| v >= margin) {
                    table.push(row);
                    break;
                }
            }
        }
        tables.push(table);
    }
    ParameterSet::new(structure, tables).unwrap()
}

/// A uniformly random complete dataset over the structure's variables.
pub fn random_dataset(rng: &mut ChaCha8Rng, structure: &DagStructure, cases: usize) -> Dataset {
    let columns: Vec<String> = structure
        .variables()
        .iter()
        .map(|v| v.name().to_string())
        .collect();
    let rows = (0..cases)
        .map(|_| {
            (0..structure.variable_count())
                .map(|i| rng.gen_range(0..structure.variable(i).cardinality()))
                .collect()
        })
        .collect();
    Dataset::new(columns, rows).unwrap()
}

/// All input configurations of a structure (non-class variables, ascending).
pub fn input_configurations(structure: &DagStructure) -> Vec<Vec<usize>> {
    let cards: Vec<usize> = structure
        .input_variables()
        .iter()
        .map(|&i| structure.variable(i).cardinality())
        .collect();
    preqnet::network::configurations(&cards).collect()
}
