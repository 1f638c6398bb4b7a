//! Checks the central-difference Jacobian against an exact directional
//! derivative of the parameter-to-input-distribution map, computed
//! symbolically: each retained entry is a sum of products of row-affine
//! factors, so the product rule gives the derivative without any differencing.
//! Also covers the map/marginal consistency, column-permutation symmetry, and
//! rank monotonicity properties.

mod common;

use common::*;
use nalgebra::DMatrix;
use preqnet::identifiability::{
    free_parameter_count, input_distribution_map, numerical_jacobian, numerical_rank,
    variational_dependence_probe, FreeParameterVector,
};
use preqnet::network::{configurations, input_marginal_prob, DagStructure, ParameterSet};
use rand::Rng;

/// Flat free-vector index of (node, row, state), matching the layout used by
/// `FreeParameterVector`.
fn free_index(structure: &DagStructure, node: usize, row: usize, state: usize) -> usize {
    let mut offset = 0;
    for i in 0..node {
        offset += structure.row_count(i) * (structure.variable(i).cardinality() - 1);
    }
    offset + row * (structure.variable(node).cardinality() - 1) + state
}

/// Exact directional derivative of the retained input-distribution entries in
/// direction `dir`, by the product rule over the factored joint.
fn symbolic_directional_derivative(
    structure: &DagStructure,
    point: &[f64],
    dir: &[f64],
) -> Vec<f64> {
    let inputs = structure.input_variables();
    let cards: Vec<usize> = inputs
        .iter()
        .map(|&i| structure.variable(i).cardinality())
        .collect();
    let class = structure.class_index();
    let r = structure.class_cardinality();
    let n = structure.variable_count();

    // value and directional derivative of one CPT factor
    let factor = |node: usize, row: usize, state: usize| -> (f64, f64) {
        let free = structure.variable(node).cardinality() - 1;
        if state < free {
            let idx = free_index(structure, node, row, state);
            (point[idx], dir[idx])
        } else {
            let mut value = 1.0;
            let mut deriv = 0.0;
            for s in 0..free {
                let idx = free_index(structure, node, row, s);
                value -= point[idx];
                deriv -= dir[idx];
            }
            (value, deriv)
        }
    };

    let mut out = Vec::new();
    let mut full = vec![0usize; n];
    let total = cards.iter().product::<usize>();
    for (cfg_idx, x) in configurations(&cards).enumerate() {
        if cfg_idx + 1 == total {
            break; // last configuration is the dropped coordinate
        }
        for (slot, &var) in inputs.iter().enumerate() {
            full[var] = x[slot];
        }
        let mut entry_deriv = 0.0;
        for k in 0..r {
            full[class] = k;
            let factors: Vec<(f64, f64)> = (0..n)
                .map(|i| factor(i, structure.parent_row_index(i, &full), full[i]))
                .collect();
            for pivot in 0..n {
                let mut term = factors[pivot].1;
                for (other, f) in factors.iter().enumerate() {
                    if other != pivot {
                        term *= f.0;
                    }
                }
                entry_deriv += term;
            }
        }
        out.push(entry_deriv);
    }
    out
}

fn random_interior_point(
    rng: &mut rand_chacha::ChaCha8Rng,
    structure: &DagStructure,
    margin: f64,
) -> FreeParameterVector {
    let params = random_interior_params(rng, structure, margin);
    FreeParameterVector::from_params(structure, &params)
}

#[test]
fn finite_differences_converge_at_second_order() {
    let mut rng = rng(0xface_0001);
    for trial in 0..12 {
        let structure = random_structure(&mut rng, 2 + trial % 3, 3);
        if structure.input_configuration_count() < 2 {
            continue;
        }
        let point = random_interior_point(&mut rng, &structure, 0.05);
        let dir: Vec<f64> = (0..point.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let exact = symbolic_directional_derivative(&structure, point.values(), &dir);
        let fd_error = |h: f64| -> f64 {
            let jac = numerical_jacobian(&structure, &point, h).unwrap();
            let mut err: f64 = 0.0;
            for row in 0..jac.nrows() {
                let mut jd = 0.0;
                for col in 0..jac.ncols() {
                    jd += jac[(row, col)] * dir[col];
                }
                err = err.max((jd - exact[row]).abs());
            }
            err
        };

        let coarse = fd_error(1e-3);
        let fine = fd_error(5e-4);
        if coarse < 1e-12 {
            continue; // derivative is essentially linear here; nothing to measure
        }
        let ratio = coarse / fine;
        assert!(
            (3.0..=5.0).contains(&ratio),
            "step-halving ratio {ratio} outside [3, 5] at trial {trial} (errors {coarse} -> {fine})"
        );
    }
}

#[test]
fn jacobian_times_direction_matches_the_oracle() {
    let mut rng = rng(0xface_0002);
    for trial in 0..15 {
        let structure = random_structure(&mut rng, 2 + trial % 3, 3);
        if structure.input_configuration_count() < 2 {
            continue;
        }
        let point = random_interior_point(&mut rng, &structure, 0.05);
        let dir: Vec<f64> = (0..point.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let exact = symbolic_directional_derivative(&structure, point.values(), &dir);
        let jac = numerical_jacobian(&structure, &point, 1e-5).unwrap();
        for row in 0..jac.nrows() {
            let mut jd = 0.0;
            for col in 0..jac.ncols() {
                jd += jac[(row, col)] * dir[col];
            }
            assert!(
                (jd - exact[row]).abs() < 1e-8,
                "row {row}: finite differences {jd} vs oracle {}",
                exact[row]
            );
        }
    }
}

#[test]
fn map_agrees_with_the_log_space_marginal_everywhere() {
    let mut rng = rng(0xface_0003);
    for _ in 0..25 {
        let node_count = 2 + rng.gen_range(0..3);
        let structure = random_structure(&mut rng, node_count, 3);
        let params = random_interior_params(&mut rng, &structure, 1e-3);
        let map = input_distribution_map(&structure, &params).unwrap();
        let configs = input_configurations(&structure);
        for (idx, x) in configs.iter().enumerate() {
            let direct = input_marginal_prob(&structure, &params, x).unwrap();
            let via_map = if idx < map.len() {
                map.values()[idx]
            } else {
                map.restored_last()
            };
            assert!((direct - via_map).abs() < 1e-12);
        }
        let full_sum: f64 = map.values().iter().sum::<f64>() + map.restored_last();
        assert!((full_sum - 1.0).abs() < 1e-12);
    }
}

#[test]
fn swapping_identical_inputs_permutes_the_jacobian() {
    // naive Bayes with X1 and X2 sharing a CPT: exchanging them permutes
    // configuration rows and free-parameter columns consistently
    let structure = naive_bayes_structure(3, 2, 2);
    let params = ParameterSet::new(
        &structure,
        vec![
            vec![vec![0.35, 0.65]],
            vec![vec![0.7, 0.3], vec![0.2, 0.8]],
            vec![vec![0.7, 0.3], vec![0.2, 0.8]],
            vec![vec![0.55, 0.45], vec![0.15, 0.85]],
        ],
    )
    .unwrap();
    let point = FreeParameterVector::from_params(&structure, &params);
    let jac = numerical_jacobian(&structure, &point, 1e-5).unwrap();

    // rows: configs (x1, x2, x3) indexed x1*4 + x2*2 + x3; swap x1 <-> x2
    let permute_row = |r: usize| -> usize {
        let (x1, x2, x3) = (r >> 2 & 1, r >> 1 & 1, r & 1);
        (x2 << 2) | (x1 << 1) | x3
    };
    // cols: [y, x1|y0, x1|y1, x2|y0, x2|y1, x3|y0, x3|y1]
    let permute_col = |c: usize| -> usize {
        match c {
            1 => 3,
            2 => 4,
            3 => 1,
            4 => 2,
            other => other,
        }
    };
    for row in 0..jac.nrows() {
        let pr = permute_row(row);
        if pr >= jac.nrows() {
            continue; // maps to the dropped configuration
        }
        for col in 0..jac.ncols() {
            let delta = (jac[(row, col)] - jac[(pr, permute_col(col))]).abs();
            assert!(delta < 1e-9, "asymmetry {delta} at ({row}, {col})");
        }
    }
}

#[test]
fn appending_a_duplicate_column_never_raises_the_rank() {
    let mut rng = rng(0xface_0004);
    for _ in 0..20 {
        let rows = rng.gen_range(2..7);
        let cols = rng.gen_range(2..7);
        let matrix = DMatrix::<f64>::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0));
        let base_rank = numerical_rank(&matrix, 1e-7).unwrap();

        let dup = rng.gen_range(0..cols);
        let mut extended = DMatrix::<f64>::zeros(rows, cols + 1);
        extended.view_mut((0, 0), (rows, cols)).copy_from(&matrix);
        for r in 0..rows {
            extended[(r, cols)] = matrix[(r, dup)];
        }
        let extended_rank = numerical_rank(&extended, 1e-7).unwrap();
        assert!(extended_rank <= base_rank);
    }
}

#[test]
fn probe_dimensions_match_the_free_parameter_count() {
    let structure = naive_bayes_structure(3, 2, 2);
    assert_eq!(free_parameter_count(&structure), 7);
    let report = variational_dependence_probe(&structure, 5, 42).unwrap();
    assert_eq!(report.expected_full_rank, 7);
    assert_eq!(report.full_rank_count, 5);
}
