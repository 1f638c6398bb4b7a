//! Conversion of a network's conditional p(y | x) into an explicit softmax
//! regression over state indicators, and stable evaluation of the result.
//!
//! The extracted model expresses each non-reference class's log-odds λ_k as a
//! sum of coefficient-weighted indicator monomials. Monomials are kept in a
//! canonical basis: literals sorted by variable, and state 0 of every variable
//! treated as the dropped reference state (indicator products mentioning a
//! reference state are expanded away). This makes coefficient sets unique, so
//! two extractions can be compared term by term.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::network::{configurations, DagStructure, ParameterSet};

/// Coefficients with magnitude below this are dropped after cancellation.
pub const COEFFICIENT_PRUNE_TOLERANCE: f64 = 1e-12;

/// A product of state indicators over distinct input variables, scaled by a
/// coefficient. An empty literal list is the intercept term.
///
/// Literal variable indices refer to positions in the owning model's
/// [`SoftmaxModel::variable_catalog`]. In canonical form no literal mentions
/// state 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub literals: Vec<(usize, usize)>,
    pub coefficient: f64,
}

/// A softmax regression over indicator variables: for each class k ≥ 2 (index
/// 1 onward), λ_k is the sum of its monomials over satisfied indicators, and
/// the reference class has λ_1 ≡ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxModel {
    class_cardinality: usize,
    /// `per_class_terms[k - 1]` holds the monomials of class state k.
    per_class_terms: Vec<Vec<Monomial>>,
    /// Non-class variables in ascending original index order: (name, cardinality).
    variable_catalog: Vec<(String, usize)>,
}

impl SoftmaxModel {
    pub fn class_cardinality(&self) -> usize {
        self.class_cardinality
    }

    /// Monomials of class state `k` (1-based over non-reference classes:
    /// `1 <= k < class_cardinality`).
    pub fn class_terms(&self, k: usize) -> &[Monomial] {
        &self.per_class_terms[k - 1]
    }

    pub fn per_class_terms(&self) -> &[Vec<Monomial>] {
        &self.per_class_terms
    }

    pub fn variable_catalog(&self) -> &[(String, usize)] {
        &self.variable_catalog
    }

    /// Log-odds λ_k of class `k` at the given input, with λ_0 = 0 for the
    /// reference class.
    pub fn log_odds(&self, k: usize, x_assignment: &[usize]) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.per_class_terms[k - 1]
            .iter()
            .filter(|m| m.literals.iter().all(|&(v, s)| x_assignment[v] == s))
            .map(|m| m.coefficient)
            .sum()
    }
}

/// A total ordering of the variables in which the class appears as late as
/// possible: every non-descendant of the class precedes it and every
/// descendant follows it. Ties are broken by ascending variable index, so the
/// result is deterministic. Returns the ordering and the split point `n_h`
/// (the number of variables preceding the class).
pub fn late_y_ordering(structure: &DagStructure) -> (Vec<usize>, usize) {
    let n = structure.variable_count();
    let class = structure.class_index();
    let descendant = structure.descendants(class);
    let mut placed = vec![false; n];
    let mut remaining: Vec<usize> = (0..n).map(|i| structure.parents(i).len()).collect();
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        // available nodes, preferring non-descendants, then the class, then
        // descendants; lowest index within each group
        let next = (0..n)
            .filter(|&i| !placed[i] && remaining[i] == 0)
            .min_by_key(|&i| {
                let group = if i == class {
                    1
                } else if descendant[i] {
                    2
                } else {
                    0
                };
                (group, i)
            })
            .expect("structure is acyclic");
        placed[next] = true;
        order.push(next);
        for child in 0..n {
            if !placed[child] && structure.parents(child).contains(&next) {
                remaining[child] -= 1;
            }
        }
    }
    let n_h = order
        .iter()
        .position(|&i| i == class)
        .expect("class is in the order");
    (order, n_h)
}

/// Extracts the linear softmax form of a naive Bayes model over binary inputs:
/// the class is a parentless root and every input variable has exactly the
/// class as its parent.
///
/// For each class k ≥ 2 the result has an intercept
/// log θ(y^k)/θ(y^1) + Σ_i log θ(x_i^1|y^k)/θ(x_i^1|y^1) and one single-literal
/// monomial per input on its second state. Any parameter inside a log-ratio
/// must be positive.
pub fn extract_linear_softmax(
    structure: &DagStructure,
    params: &ParameterSet,
) -> Result<SoftmaxModel> {
    let class = structure.class_index();
    if !structure.parents(class).is_empty() {
        return Err(Error::InvalidModel(
            "linear extraction requires the class variable to be a parentless root".into(),
        ));
    }
    let inputs = structure.input_variables();
    for &i in &inputs {
        if structure.parents(i) != [class] {
            return Err(Error::InvalidModel(format!(
                "linear extraction requires every input to have exactly the class as parent; \
                 '{}' does not",
                structure.variable(i).name()
            )));
        }
        if structure.variable(i).cardinality() != 2 {
            return Err(Error::InvalidModel(format!(
                "linear extraction requires binary inputs; '{}' has {} states",
                structure.variable(i).name(),
                structure.variable(i).cardinality()
            )));
        }
    }

    let r = structure.class_cardinality();
    let checked_ln = |node: usize, row: usize, state: usize| -> Result<f64> {
        let p = params.prob(node, row, state);
        if p <= 0.0 {
            return Err(Error::ZeroParameter {
                variable: structure.variable(node).name().to_string(),
                row,
                state,
            });
        }
        Ok(p.ln())
    };

    let mut per_class_terms = Vec::with_capacity(r - 1);
    for k in 1..r {
        let mut intercept = checked_ln(class, 0, k)? - checked_ln(class, 0, 0)?;
        let mut terms = Vec::new();
        for (pos, &i) in inputs.iter().enumerate() {
            let ratio_state0 = checked_ln(i, k, 0)? - checked_ln(i, 0, 0)?;
            let ratio_state1 = checked_ln(i, k, 1)? - checked_ln(i, 0, 1)?;
            intercept += ratio_state0;
            let coefficient = ratio_state1 - ratio_state0;
            if coefficient.abs() >= COEFFICIENT_PRUNE_TOLERANCE {
                terms.push(Monomial {
                    literals: vec![(pos, 1)],
                    coefficient,
                });
            }
        }
        let mut all = Vec::new();
        if intercept.abs() >= COEFFICIENT_PRUNE_TOLERANCE {
            all.push(Monomial {
                literals: Vec::new(),
                coefficient: intercept,
            });
        }
        all.extend(terms);
        per_class_terms.push(all);
    }

    Ok(SoftmaxModel {
        class_cardinality: r,
        per_class_terms,
        variable_catalog: catalog_of(structure),
    })
}

/// Extracts the polynomial softmax form of an arbitrary finite-state network.
///
/// Using the late-class ordering, λ_k collects the class-CPT log-ratio over
/// the class's parent configurations plus, for every descendant of the class
/// whose parent set contains it, the log-ratio of that descendant's CPT with
/// the class fixed to k versus the reference state. Factors that do not
/// depend on the class cancel and never enter a log, so zeros there are
/// harmless; a zero inside a retained ratio is an error naming the cell.
pub fn extract_polynomial_softmax(
    structure: &DagStructure,
    params: &ParameterSet,
) -> Result<SoftmaxModel> {
    let class = structure.class_index();
    let r = structure.class_cardinality();
    let (ordering, n_h) = late_y_ordering(structure);
    let inputs = structure.input_variables();
    let catalog_pos: Vec<Option<usize>> = {
        let mut pos = vec![None; structure.variable_count()];
        for (p, &i) in inputs.iter().enumerate() {
            pos[i] = Some(p);
        }
        pos
    };

    let checked_ln = |node: usize, row: usize, state: usize| -> Result<f64> {
        let p = params.prob(node, row, state);
        if p <= 0.0 {
            return Err(Error::ZeroParameter {
                variable: structure.variable(node).name().to_string(),
                row,
                state,
            });
        }
        Ok(p.ln())
    };

    // canonical accumulation: sorted literal list -> coefficient
    let mut acc: Vec<BTreeMap<Vec<(usize, usize)>, f64>> = vec![BTreeMap::new(); r - 1];

    // class CPT ratio over the class's parent configurations
    let class_parents = structure.parents(class).to_vec();
    let class_parent_cards: Vec<usize> = class_parents
        .iter()
        .map(|&p| structure.variable(p).cardinality())
        .collect();
    for config in configurations(&class_parent_cards) {
        let mut row = 0;
        for (&p, &s) in class_parents.iter().zip(&config) {
            row = row * structure.variable(p).cardinality() + s;
        }
        let reference = checked_ln(class, row, 0)?;
        let literals: Vec<(usize, usize)> = class_parents
            .iter()
            .zip(&config)
            .map(|(&p, &s)| (catalog_pos[p].expect("class is not its own parent"), s))
            .collect();
        for k in 1..r {
            let coefficient = checked_ln(class, row, k)? - reference;
            add_expanded(
                &mut acc[k - 1],
                &literals,
                coefficient,
                &catalog_cards(structure, &inputs),
            );
        }
    }

    // descendants of the class, in late-ordering position after the class
    for &node in &ordering[n_h + 1..] {
        let parents = structure.parents(node).to_vec();
        let Some(class_slot) = parents.iter().position(|&p| p == class) else {
            // ratio is identically one; the factor cancels before any log
            continue;
        };
        let x_parents: Vec<usize> = parents.iter().copied().filter(|&p| p != class).collect();
        let x_parent_cards: Vec<usize> = x_parents
            .iter()
            .map(|&p| structure.variable(p).cardinality())
            .collect();
        let node_card = structure.variable(node).cardinality();
        for config in configurations(&x_parent_cards) {
            // rebuild the full parent configuration with the class slot varying
            let row_for_class = |k: usize| -> usize {
                let mut row = 0;
                let mut xi = 0;
                for (slot, &p) in parents.iter().enumerate() {
                    let state = if slot == class_slot {
                        k
                    } else {
                        let s = config[xi];
                        xi += 1;
                        s
                    };
                    row = row * structure.variable(p).cardinality() + state;
                }
                row
            };
            let reference_row = row_for_class(0);
            for state in 0..node_card {
                let reference = checked_ln(node, reference_row, state)?;
                let mut literals: Vec<(usize, usize)> =
                    vec![(catalog_pos[node].expect("descendants are inputs"), state)];
                literals.extend(
                    x_parents
                        .iter()
                        .zip(&config)
                        .map(|(&p, &s)| (catalog_pos[p].expect("inputs only"), s)),
                );
                for k in 1..r {
                    let coefficient = checked_ln(node, row_for_class(k), state)? - reference;
                    add_expanded(
                        &mut acc[k - 1],
                        &literals,
                        coefficient,
                        &catalog_cards(structure, &inputs),
                    );
                }
            }
        }
    }

    let per_class_terms = acc
        .into_iter()
        .map(|map| {
            map.into_iter()
                .filter(|(_, c)| c.abs() >= COEFFICIENT_PRUNE_TOLERANCE)
                .map(|(literals, coefficient)| Monomial {
                    literals,
                    coefficient,
                })
                .collect()
        })
        .collect();

    Ok(SoftmaxModel {
        class_cardinality: r,
        per_class_terms,
        variable_catalog: catalog_of(structure),
    })
}

fn catalog_of(structure: &DagStructure) -> Vec<(String, usize)> {
    structure
        .input_variables()
        .into_iter()
        .map(|i| {
            (
                structure.variable(i).name().to_string(),
                structure.variable(i).cardinality(),
            )
        })
        .collect()
}

fn catalog_cards(structure: &DagStructure, inputs: &[usize]) -> Vec<usize> {
    inputs
        .iter()
        .map(|&i| structure.variable(i).cardinality())
        .collect()
}

/// Adds `coefficient · Π I(literals)` into the canonical accumulator,
/// expanding every reference-state indicator via
/// I(v = 0) = 1 − Σ_{s ≥ 1} I(v = s) so the stored basis never mentions
/// state 0. Literal lists are kept sorted by variable.
fn add_expanded(
    acc: &mut BTreeMap<Vec<(usize, usize)>, f64>,
    literals: &[(usize, usize)],
    coefficient: f64,
    catalog_cards: &[usize],
) {
    let mut pending: Vec<(Vec<(usize, usize)>, f64)> = vec![(literals.to_vec(), coefficient)];
    while let Some((mut lits, coef)) = pending.pop() {
        if let Some(pos) = lits.iter().position(|&(_, s)| s == 0) {
            let (var, _) = lits.remove(pos);
            // term without the indicator
            pending.push((lits.clone(), coef));
            // minus each non-reference state of the same variable
            for s in 1..catalog_cards[var] {
                let mut with = lits.clone();
                with.push((var, s));
                pending.push((with, -coef));
            }
            continue;
        }
        lits.sort_unstable();
        *acc.entry(lits).or_insert(0.0) += coef;
    }
}

/// Evaluates the softmax model at an input assignment (catalog order),
/// returning the class distribution. Computed max-shifted in log space.
pub fn evaluate_softmax(model: &SoftmaxModel, x_assignment: &[usize]) -> Result<Vec<f64>> {
    if x_assignment.len() != model.variable_catalog.len() {
        return Err(Error::DimensionMismatch {
            expected: model.variable_catalog.len(),
            actual: x_assignment.len(),
        });
    }
    for (&state, (name, card)) in x_assignment.iter().zip(&model.variable_catalog) {
        if state >= *card {
            return Err(Error::StateOutOfRange {
                variable: name.clone(),
                state,
                cardinality: *card,
            });
        }
    }
    let lambdas: Vec<f64> = (0..model.class_cardinality)
        .map(|k| model.log_odds(k, x_assignment))
        .collect();
    let max = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = lambdas.iter().map(|l| (l - max).exp()).collect();
    let denom: f64 = scaled.iter().sum();
    Ok(scaled.into_iter().map(|e| e / denom).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{conditional_class_dist, configurations, Variable};

    fn naive_bayes_binary(
        n: usize,
        theta_y0: f64,
        theta_x0_y0: f64,
        theta_x0_y1: f64,
    ) -> (DagStructure, ParameterSet) {
        let mut vars = vec![Variable::new("Y", 2).unwrap()];
        let mut parents = vec![vec![]];
        for i in 0..n {
            vars.push(Variable::new(format!("X{}", i + 1), 2).unwrap());
            parents.push(vec![0]);
        }
        let structure = DagStructure::new(vars, parents, 0).unwrap();
        let mut tables = vec![vec![vec![theta_y0, 1.0 - theta_y0]]];
        for _ in 0..n {
            tables.push(vec![
                vec![theta_x0_y0, 1.0 - theta_x0_y0],
                vec![theta_x0_y1, 1.0 - theta_x0_y1],
            ]);
        }
        (
            structure.clone(),
            ParameterSet::new(&structure, tables).unwrap(),
        )
    }

    fn chain_x_y_x() -> (DagStructure, ParameterSet) {
        // X1 -> Y -> X2, all binary
        let structure = DagStructure::new(
            vec![
                Variable::new("X1", 2).unwrap(),
                Variable::new("Y", 2).unwrap(),
                Variable::new("X2", 2).unwrap(),
            ],
            vec![vec![], vec![0], vec![1]],
            1,
        )
        .unwrap();
        let params = ParameterSet::new(
            &structure,
            vec![
                vec![vec![0.3, 0.7]],
                vec![vec![0.8, 0.2], vec![0.4, 0.6]],
                vec![vec![0.9, 0.1], vec![0.25, 0.75]],
            ],
        )
        .unwrap();
        (structure, params)
    }

    fn assert_matches_enumeration(
        structure: &DagStructure,
        params: &ParameterSet,
        model: &SoftmaxModel,
    ) {
        let cards: Vec<usize> = structure
            .input_variables()
            .iter()
            .map(|&i| structure.variable(i).cardinality())
            .collect();
        for x in configurations(&cards) {
            // zero-probability inputs have no defined conditional; skip them
            let direct = match conditional_class_dist(structure, params, &x) {
                Ok(dist) => dist,
                Err(Error::DegenerateDistribution) => continue,
                Err(other) => panic!("unexpected error: {other:?}"),
            };
            let via_softmax = evaluate_softmax(model, &x).unwrap();
            for (a, b) in direct.iter().zip(&via_softmax) {
                assert!(
                    (a - b).abs() < 1e-10,
                    "softmax disagrees with enumeration at {x:?}: {direct:?} vs {via_softmax:?}"
                );
            }
        }
    }

    #[test]
    fn late_y_ordering_examples() {
        let (nb, _) = naive_bayes_binary(3, 0.5, 0.5, 0.5);
        let (order, n_h) = late_y_ordering(&nb);
        assert_eq!(order, vec![0, 1, 2, 3]);
        assert_eq!(n_h, 0);

        let (chain, _) = chain_x_y_x();
        let (order, n_h) = late_y_ordering(&chain);
        assert_eq!(order, vec![0, 1, 2]);
        assert_eq!(n_h, 1);

        // class as a sink with every input a parent
        let structure = DagStructure::new(
            vec![
                Variable::new("X1", 2).unwrap(),
                Variable::new("X2", 2).unwrap(),
                Variable::new("Y", 2).unwrap(),
            ],
            vec![vec![], vec![], vec![0, 1]],
            2,
        )
        .unwrap();
        let (order, n_h) = late_y_ordering(&structure);
        assert_eq!(order, vec![0, 1, 2]);
        assert_eq!(n_h, 2);
    }

    #[test]
    fn linear_extraction_worked_example() {
        // symmetric class prior, θ(x_i = 0 | y) = 0.8 / 0.2
        let (structure, params) = naive_bayes_binary(2, 0.5, 0.8, 0.2);
        let model = extract_linear_softmax(&structure, &params).unwrap();

        let expected = 2.0 * 4.0f64.ln(); // 2·log 4 ≈ 2.7726
        let terms = model.class_terms(1);
        let intercept: f64 = terms
            .iter()
            .filter(|m| m.literals.is_empty())
            .map(|m| m.coefficient)
            .sum();
        assert!((intercept + expected).abs() < 1e-12);
        for pos in 0..2 {
            let coef: f64 = terms
                .iter()
                .filter(|m| m.literals == vec![(pos, 1)])
                .map(|m| m.coefficient)
                .sum();
            assert!((coef - expected).abs() < 1e-12);
        }

        let dist = evaluate_softmax(&model, &[0, 0]).unwrap();
        assert!((dist[1] - 1.0 / 17.0).abs() < 1e-12);
        assert!((dist[0] - 16.0 / 17.0).abs() < 1e-12);
        assert_matches_enumeration(&structure, &params, &model);
    }

    #[test]
    fn linear_extraction_class_independent_inputs() {
        let (structure, params) = naive_bayes_binary(3, 0.4, 0.7, 0.7);
        let model = extract_linear_softmax(&structure, &params).unwrap();
        let terms = model.class_terms(1);
        // all input coefficients cancel; only the intercept survives
        assert_eq!(terms.len(), 1);
        assert!(terms[0].literals.is_empty());
        assert!((terms[0].coefficient - (0.6f64 / 0.4).ln()).abs() < 1e-12);
    }

    #[test]
    fn linear_extraction_rejects_bad_structures() {
        let (chain, params) = chain_x_y_x();
        assert!(matches!(
            extract_linear_softmax(&chain, &params),
            Err(Error::InvalidModel(_))
        ));

        // non-binary input
        let structure = DagStructure::new(
            vec![
                Variable::new("Y", 2).unwrap(),
                Variable::new("X1", 3).unwrap(),
            ],
            vec![vec![], vec![0]],
            0,
        )
        .unwrap();
        let params = ParameterSet::uniform(&structure);
        assert!(extract_linear_softmax(&structure, &params).is_err());

        // zero parameter inside a ratio
        let (structure, params) = naive_bayes_binary(1, 0.5, 1.0, 0.5);
        assert!(matches!(
            extract_linear_softmax(&structure, &params),
            Err(Error::ZeroParameter { .. })
        ));
    }

    #[test]
    fn polynomial_matches_linear_on_naive_bayes() {
        let (structure, params) = naive_bayes_binary(3, 0.35, 0.8, 0.25);
        let linear = extract_linear_softmax(&structure, &params).unwrap();
        let poly = extract_polynomial_softmax(&structure, &params).unwrap();
        assert_eq!(linear.per_class_terms().len(), poly.per_class_terms().len());
        for (lt, pt) in linear.per_class_terms().iter().zip(poly.per_class_terms()) {
            assert_eq!(lt.len(), pt.len());
            for (a, b) in lt.iter().zip(pt) {
                assert_eq!(a.literals, b.literals);
                assert!((a.coefficient - b.coefficient).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn polynomial_extraction_on_chain() {
        let (structure, params) = chain_x_y_x();
        let model = extract_polynomial_softmax(&structure, &params).unwrap();
        assert_matches_enumeration(&structure, &params, &model);
        // catalog positions: X1 -> 0, X2 -> 1; monomials touch each separately
        for m in model.class_terms(1) {
            assert!(m.literals.len() <= 1);
        }
    }

    #[test]
    fn polynomial_extraction_class_sink() {
        let structure = DagStructure::new(
            vec![
                Variable::new("X1", 2).unwrap(),
                Variable::new("X2", 3).unwrap(),
                Variable::new("Y", 2).unwrap(),
            ],
            vec![vec![], vec![], vec![0, 1]],
            2,
        )
        .unwrap();
        let params = ParameterSet::new(
            &structure,
            vec![
                vec![vec![0.6, 0.4]],
                vec![vec![0.2, 0.5, 0.3]],
                vec![
                    vec![0.9, 0.1],
                    vec![0.7, 0.3],
                    vec![0.5, 0.5],
                    vec![0.3, 0.7],
                    vec![0.2, 0.8],
                    vec![0.1, 0.9],
                ],
            ],
        )
        .unwrap();
        let model = extract_polynomial_softmax(&structure, &params).unwrap();
        assert_matches_enumeration(&structure, &params, &model);
        // the descendant sum is empty: every monomial mentions only class parents
        for m in model.class_terms(1) {
            assert!(m.literals.len() <= 2);
        }
    }

    #[test]
    fn polynomial_extraction_three_classes() {
        let structure = DagStructure::new(
            vec![
                Variable::new("Y", 3).unwrap(),
                Variable::new("X1", 2).unwrap(),
            ],
            vec![vec![], vec![0]],
            0,
        )
        .unwrap();
        let params = ParameterSet::new(
            &structure,
            vec![
                vec![vec![0.2, 0.3, 0.5]],
                vec![vec![0.9, 0.1], vec![0.6, 0.4], vec![0.25, 0.75]],
            ],
        )
        .unwrap();
        let model = extract_polynomial_softmax(&structure, &params).unwrap();
        assert_eq!(model.class_cardinality(), 3);
        assert_matches_enumeration(&structure, &params, &model);
    }

    #[test]
    fn polynomial_reports_offending_zero_cell() {
        let (structure, params) = naive_bayes_binary(1, 0.5, 1.0, 0.5);
        match extract_polynomial_softmax(&structure, &params) {
            Err(Error::ZeroParameter {
                variable,
                row,
                state,
            }) => {
                assert_eq!(variable, "X1");
                assert_eq!(row, 0);
                assert_eq!(state, 1);
            }
            other => panic!("expected a zero-parameter error, got {other:?}"),
        }
    }

    #[test]
    fn zero_outside_retained_ratios_is_fine() {
        // Y -> X1 -> X2: X2 is a descendant of the class but the class is not
        // among its parents, so its CPT ratio cancels and its zero never
        // reaches a log.
        let structure = DagStructure::new(
            vec![
                Variable::new("Y", 2).unwrap(),
                Variable::new("X1", 2).unwrap(),
                Variable::new("X2", 2).unwrap(),
            ],
            vec![vec![], vec![0], vec![1]],
            0,
        )
        .unwrap();
        let params = ParameterSet::new(
            &structure,
            vec![
                vec![vec![0.5, 0.5]],
                vec![vec![0.8, 0.2], vec![0.3, 0.7]],
                vec![vec![1.0, 0.0], vec![0.5, 0.5]],
            ],
        )
        .unwrap();
        let model = extract_polynomial_softmax(&structure, &params).unwrap();
        // X2's factor cancels: no monomial mentions it
        for terms in model.per_class_terms() {
            for m in terms {
                assert!(m
                    .literals
                    .iter()
                    .all(|&(v, _)| model.variable_catalog()[v].0 != "X2"));
            }
        }
        assert_matches_enumeration(&structure, &params, &model);
    }

    #[test]
    fn evaluate_softmax_edge_cases() {
        let model = SoftmaxModel {
            class_cardinality: 2,
            per_class_terms: vec![vec![]],
            variable_catalog: vec![("X1".into(), 2)],
        };
        let dist = evaluate_softmax(&model, &[0]).unwrap();
        assert_eq!(dist, vec![0.5, 0.5]);

        let model = SoftmaxModel {
            class_cardinality: 3,
            per_class_terms: vec![vec![], vec![]],
            variable_catalog: vec![("X1".into(), 2)],
        };
        let dist = evaluate_softmax(&model, &[1]).unwrap();
        for p in &dist {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }

        assert!(evaluate_softmax(&model, &[0, 1]).is_err());
        assert!(evaluate_softmax(&model, &[2]).is_err());
    }

    #[test]
    fn shifting_all_log_odds_leaves_probabilities_unchanged() {
        let (structure, params) = naive_bayes_binary(2, 0.3, 0.8, 0.4);
        let model = extract_polynomial_softmax(&structure, &params).unwrap();
        let shift = 3.7;
        for x in configurations(&[2, 2]) {
            let base = evaluate_softmax(&model, &x).unwrap();
            // direct softmax of shifted log-odds, reference class included
            let lambdas: Vec<f64> = (0..model.class_cardinality())
                .map(|k| model.log_odds(k, &x) + shift)
                .collect();
            let denom: f64 = lambdas.iter().map(|l| l.exp()).sum();
            for (k, p) in base.iter().enumerate() {
                assert!((p - lambdas[k].exp() / denom).abs() < 1e-12);
            }
        }
    }
}
