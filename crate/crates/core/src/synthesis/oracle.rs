use std::collections::BTreeMap;

use crate::demand::Commodity;
use crate::lp::{self, LpStatus};
use crate::mlg::{EntityId, Layer, LinkKey, VertexRole};

use super::{build_node_link_program, SynthesisError, SynthesisOptions};

/// Largest number of candidate links the oracle will enumerate by default.
pub const ORACLE_LINK_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    /// Best objective over all link subsets; `None` when no subset routes
    /// every commodity.
    pub objective: Option<f64>,
    /// A smallest subset reaching the best objective.
    pub installed: Vec<LinkKey>,
    /// Number of subsets evaluated.
    pub subsets: usize,
}

/// Minimum occupied bandwidth by enumerating every subset of candidate links.
///
/// Each subset fixes the installation variables and leaves a pure
/// continuous routing LP. Among subsets with equal objective (within
/// `gap_tol`) the one with fewest links, then lowest mask, wins.
pub fn brute_force_optimum(
    g1_augmented: &Layer,
    roles: &BTreeMap<EntityId, VertexRole>,
    commodities: &[Commodity],
    options: &SynthesisOptions,
) -> Result<OracleOutcome, SynthesisError> {
    let program = build_node_link_program(g1_augmented, roles, commodities)?;
    let m = program.links.len();
    if m > options.oracle_link_limit {
        return Err(SynthesisError::TooLargeForOracle {
            links: m,
            limit: options.oracle_link_limit,
        });
    }

    let base = program.lp.bounds();
    let tol = options.milp.gap_tol;
    let mut best: Option<(f64, u32, u64)> = None;
    let mut subsets = 0;
    for mask in 0u64..(1u64 << m) {
        subsets += 1;
        let mut bounds = base.clone();
        for (e, y) in program.install_vars.iter().enumerate() {
            let on = if mask >> e & 1 == 1 { 1.0 } else { 0.0 };
            bounds[y.0] = (on, on);
        }
        let sol = lp::solve_with_bounds(&program.lp, &bounds, &options.milp.simplex)?;
        if sol.status != LpStatus::Optimal {
            continue;
        }
        let size = mask.count_ones();
        let better = match best {
            None => true,
            Some((obj, s, _)) => sol.objective < obj - tol || (sol.objective <= obj + tol && size < s),
        };
        if better {
            best = Some((sol.objective, size, mask));
        }
    }

    Ok(match best {
        Some((objective, _, mask)) => OracleOutcome {
            objective: Some(objective),
            installed: program
                .links
                .iter()
                .enumerate()
                .filter(|(e, _)| mask >> e & 1 == 1)
                .map(|(_, (k, _))| k.clone())
                .collect(),
            subsets,
        },
        None => OracleOutcome {
            objective: None,
            installed: Vec::new(),
            subsets,
        },
    })
}
