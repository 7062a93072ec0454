//! Best-first branch-and-bound over the integer-marked variables.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{simplex, LinearProgram, LpError, LpStatus, SimplexOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MilpOptions {
    pub max_nodes: usize,
    /// A node is pruned once its bound is within this of the incumbent.
    pub gap_tol: f64,
    pub integrality_tol: f64,
    /// Round fractional integer variables up and keep the result as an
    /// incumbent when it is feasible.
    pub round_up_heuristic: bool,
    pub simplex: SimplexOptions,
}

impl Default for MilpOptions {
    fn default() -> Self {
        Self {
            max_nodes: 100_000,
            gap_tol: 1e-6,
            integrality_tol: 1e-6,
            round_up_heuristic: true,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    /// Objective of the root relaxation.
    pub root_bound: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum MilpError {
    #[error("branch-and-bound exceeded {limit} nodes")]
    NodeLimitExceeded { limit: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
}

struct Node {
    bound: f64,
    seq: usize,
    bounds: Vec<(f64, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: smallest bound first, then oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Most fractional integer variable; ties go to the lowest index.
fn branching_variable(lp: &LinearProgram, x: &[f64], tol: f64) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (j, var) in lp.vars().iter().enumerate() {
        if !var.integer {
            continue;
        }
        let frac = x[j] - x[j].floor();
        if frac.min(1.0 - frac) <= tol {
            continue;
        }
        let distance = (frac - 0.5).abs();
        if best.is_none_or(|(_, _, d)| distance < d - 1e-12) {
            best = Some((j, x[j], distance));
        }
    }
    best.map(|(j, v, _)| (j, v))
}

fn snap_integers(lp: &LinearProgram, x: &mut [f64]) {
    for (j, var) in lp.vars().iter().enumerate() {
        if var.integer {
            x[j] = x[j].round();
        }
    }
}

fn round_up(lp: &LinearProgram, x: &[f64], bounds: &[(f64, f64)], tol: f64) -> Vec<f64> {
    let mut out = x.to_vec();
    for (j, var) in lp.vars().iter().enumerate() {
        if var.integer {
            let frac = x[j] - x[j].floor();
            out[j] = if frac.min(1.0 - frac) <= tol {
                x[j].round()
            } else {
                x[j].ceil().min(bounds[j].1)
            };
        }
    }
    out
}

/// Solves `lp` honoring its integrality marks.
pub fn branch_and_bound(lp: &LinearProgram, opts: &MilpOptions) -> Result<MilpSolution, MilpError> {
    let root_bounds = lp.bounds();
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        seq: 0,
        bounds: root_bounds.clone(),
    });
    let mut seq = 1;
    let mut nodes = 0;
    let mut lp_iterations = 0;
    let mut root_bound = f64::NAN;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;

    let cutoff = |inc: &Option<(f64, Vec<f64>)>| inc.as_ref().map_or(f64::INFINITY, |(v, _)| *v);

    while let Some(node) = heap.pop() {
        if node.bound >= cutoff(&incumbent) - opts.gap_tol {
            break;
        }
        if nodes >= opts.max_nodes {
            return Err(MilpError::NodeLimitExceeded {
                limit: opts.max_nodes,
            });
        }
        nodes += 1;

        let sol = simplex::solve_with_bounds(lp, &node.bounds, &opts.simplex)?;
        lp_iterations += sol.iterations;
        if nodes == 1 {
            root_bound = match sol.status {
                LpStatus::Optimal => sol.objective,
                LpStatus::Infeasible => f64::INFINITY,
                LpStatus::Unbounded => f64::NEG_INFINITY,
            };
        }
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Ok(MilpSolution {
                    status: MilpStatus::Unbounded,
                    values: sol.values,
                    objective: f64::NEG_INFINITY,
                    root_bound,
                    nodes,
                    lp_iterations,
                });
            }
            LpStatus::Optimal => {}
        }
        if sol.objective >= cutoff(&incumbent) - opts.gap_tol {
            continue;
        }

        let Some((j, value)) = branching_variable(lp, &sol.values, opts.integrality_tol) else {
            let mut x = sol.values;
            snap_integers(lp, &mut x);
            incumbent = Some((lp.objective_value(&x), x));
            continue;
        };

        if opts.round_up_heuristic {
            let x = round_up(lp, &sol.values, &node.bounds, opts.integrality_tol);
            if lp.max_violation(&x, &node.bounds) <= opts.simplex.feasibility_tol {
                let obj = lp.objective_value(&x);
                if obj < cutoff(&incumbent) {
                    incumbent = Some((obj, x));
                }
            }
        }

        let mut down = node.bounds.clone();
        down[j].1 = value.floor();
        let mut up = node.bounds;
        up[j].0 = value.ceil();
        for bounds in [down, up] {
            heap.push(Node {
                bound: sol.objective,
                seq,
                bounds,
            });
            seq += 1;
        }
    }

    Ok(match incumbent {
        Some((objective, values)) => MilpSolution {
            status: MilpStatus::Optimal,
            values,
            objective,
            root_bound,
            nodes,
            lp_iterations,
        },
        None => MilpSolution {
            status: MilpStatus::Infeasible,
            values: Vec::new(),
            objective: f64::INFINITY,
            root_bound,
            nodes,
            lp_iterations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Sense;

    fn no_heuristic() -> MilpOptions {
        MilpOptions {
            round_up_heuristic: false,
            ..MilpOptions::default()
        }
    }

    /// max 5a + 4b + 3c st 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8, binary.
    fn knapsack() -> LinearProgram {
        let mut lp = LinearProgram::new();
        let a = lp.add_integer_var("a", 0.0, 1.0, -5.0);
        let b = lp.add_integer_var("b", 0.0, 1.0, -4.0);
        let c = lp.add_integer_var("c", 0.0, 1.0, -3.0);
        lp.add_constraint("r1", vec![(a, 2.0), (b, 3.0), (c, 1.0)], Sense::Le, 5.0);
        lp.add_constraint("r2", vec![(a, 4.0), (b, 1.0), (c, 2.0)], Sense::Le, 11.0);
        lp.add_constraint("r3", vec![(a, 3.0), (b, 4.0), (c, 2.0)], Sense::Le, 8.0);
        lp
    }

    fn enumerate_binary(lp: &LinearProgram) -> Option<f64> {
        let n = lp.num_vars();
        (0..1u32 << n)
            .filter_map(|mask| {
                let x: Vec<f64> = (0..n).map(|j| ((mask >> j) & 1) as f64).collect();
                (lp.max_violation(&x, &lp.bounds()) <= 1e-9).then(|| lp.objective_value(&x))
            })
            .min_by(f64::total_cmp)
    }

    #[test]
    fn matches_enumeration_on_a_knapsack() {
        let lp = knapsack();
        let expected = enumerate_binary(&lp).unwrap();
        for opts in [MilpOptions::default(), no_heuristic()] {
            let sol = branch_and_bound(&lp, &opts).unwrap();
            assert_eq!(sol.status, MilpStatus::Optimal);
            assert!((sol.objective - expected).abs() < 1e-9);
            assert!(sol.root_bound <= sol.objective + 1e-9);
        }
    }

    #[test]
    fn branches_when_the_relaxation_is_fractional() {
        // max x + y st 2x + 2y <= 3, integer -> relaxation 1.5, integer optimum 1
        let mut lp = LinearProgram::new();
        let x = lp.add_integer_var("x", 0.0, 5.0, -1.0);
        let y = lp.add_integer_var("y", 0.0, 5.0, -1.0);
        lp.add_constraint("r", vec![(x, 2.0), (y, 2.0)], Sense::Le, 3.0);
        let sol = branch_and_bound(&lp, &no_heuristic()).unwrap();
        assert_eq!(sol.objective, -1.0);
        assert_eq!(sol.root_bound, -1.5);
        assert!(sol.nodes > 1);
    }

    #[test]
    fn infeasible_integer_program() {
        // 2x = 1 has no integer solution
        let mut lp = LinearProgram::new();
        let x = lp.add_integer_var("x", 0.0, 3.0, 1.0);
        lp.add_constraint("r", vec![(x, 2.0)], Sense::Eq, 1.0);
        let sol = branch_and_bound(&lp, &MilpOptions::default()).unwrap();
        assert_eq!(sol.status, MilpStatus::Infeasible);
    }

    #[test]
    fn node_limit() {
        let opts = MilpOptions {
            max_nodes: 1,
            ..no_heuristic()
        };
        assert_eq!(
            branch_and_bound(&knapsack(), &opts),
            Err(MilpError::NodeLimitExceeded { limit: 1 })
        );
    }

    #[test]
    fn most_fractional_with_lowest_index_tie_break() {
        let mut lp = LinearProgram::new();
        for name in ["a", "b", "c"] {
            lp.add_integer_var(name, 0.0, 1.0, 0.0);
        }
        assert_eq!(branching_variable(&lp, &[0.3, 0.5, 0.5], 1e-6), Some((1, 0.5)));
        assert_eq!(branching_variable(&lp, &[0.0, 1.0, 0.0], 1e-6), None);
    }
}
