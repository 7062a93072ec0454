//! Linear and mixed-integer programs, solved by a bounded primal simplex
//! and best-first branch-and-bound.
//!
//! Programs are always minimized. Every variable needs a finite lower
//! bound; the upper bound may be infinite.

mod branch;
mod simplex;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use branch::{branch_and_bound, MilpError, MilpOptions, MilpSolution, MilpStatus};
pub use simplex::{solve, solve_with_bounds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
    pub integer: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    vars: Vec<Variable>,
    rows: Vec<Constraint>,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("simplex exceeded {limit} pivots")]
    IterationLimitExceeded { limit: usize },
    #[error("malformed program: {0}")]
    Malformed(String),
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64, cost: f64) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
            cost,
            integer: false,
        });
        VarId(self.vars.len() - 1)
    }

    pub fn add_integer_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        cost: f64,
    ) -> VarId {
        let id = self.add_var(name, lower, upper, cost);
        self.vars[id.0].integer = true;
        id
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        self.rows.push(Constraint {
            name: name.into(),
            coeffs,
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.vars.iter().map(|v| (v.lower, v.upper)).collect()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.vars.iter().zip(x).map(|(v, xi)| v.cost * xi).sum()
    }

    pub fn row_activity(&self, row: usize, x: &[f64]) -> f64 {
        self.rows[row].coeffs.iter().map(|(v, a)| a * x[v.0]).sum()
    }

    /// Largest violation of any row or of the given bounds by `x`.
    pub fn max_violation(&self, x: &[f64], bounds: &[(f64, f64)]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            let act = self.row_activity(i, x);
            let v = match row.sense {
                Sense::Le => act - row.rhs,
                Sense::Ge => row.rhs - act,
                Sense::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (xi, (lo, hi)) in x.iter().zip(bounds) {
            worst = worst.max(lo - xi).max(xi - hi);
        }
        worst
    }

    /// Checks that rows only reference declared variables and that all
    /// numbers are usable.
    pub fn check(&self) -> Result<(), LpError> {
        for v in &self.vars {
            if !v.lower.is_finite() {
                return Err(LpError::Malformed(format!("{} has no finite lower bound", v.name)));
            }
            if v.upper.is_nan() || v.upper < v.lower {
                return Err(LpError::Malformed(format!("{} has empty bounds", v.name)));
            }
            if !v.cost.is_finite() {
                return Err(LpError::Malformed(format!("{} has a non-finite cost", v.name)));
            }
        }
        for row in &self.rows {
            if !row.rhs.is_finite() {
                return Err(LpError::Malformed(format!("{} has a non-finite rhs", row.name)));
            }
            for (v, a) in &row.coeffs {
                if v.0 >= self.vars.len() {
                    return Err(LpError::Malformed(format!(
                        "{} references undeclared variable {}",
                        row.name, v.0
                    )));
                }
                if !a.is_finite() {
                    return Err(LpError::Malformed(format!("{} has a non-finite coefficient", row.name)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Variable values; meaningful only when `status` is `Optimal`.
    pub values: Vec<f64>,
    pub objective: f64,
    /// Row duals of the final basis.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pricing {
    /// Smallest-index entering and leaving variable on every pivot.
    Bland,
    /// Largest reduced cost, falling back to Bland's rule while pivots stall.
    Dantzig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexOptions {
    pub max_pivots: usize,
    pub pivot_tol: f64,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub pricing: Pricing,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_pivots: 50_000,
            pivot_tol: 1e-9,
            feasibility_tol: 1e-6,
            optimality_tol: 1e-9,
            pricing: Pricing::Dantzig,
        }
    }
}
