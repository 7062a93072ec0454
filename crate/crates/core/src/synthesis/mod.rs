//! Topology synthesis on the redundant physical layer.
//!
//! The node-link program picks which candidate links to install and how
//! every commodity is routed, minimizing the occupied bandwidth (flow
//! carried per link, optionally weighted). A brute-force enumeration of
//! link subsets serves as the reference optimum on small instances.

mod oracle;
mod program;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::{augment_all, Commodity, CommodityId, DemandError};
use crate::flow::{
    check_capacity, check_demand_satisfaction, check_node_balance, check_transit_restrictions,
    FlowAssignment, LinkFlows, EPSILON,
};
use crate::lp::{self, LpError, LpSolution, MilpError, MilpOptions, MilpStatus};
use crate::mlg::{EntityId, Layer, LayerId, LinkKey, MultiLayerGraph};
use crate::validation::{ValidationReport, Violation};

pub use oracle::{brute_force_optimum, OracleOutcome, ORACLE_LINK_LIMIT};
pub use program::{build_node_link_program, FlowVar, NodeLinkProgram};

/// Flow values at or below this are reported as zero.
const FLOW_NOISE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SynthesisError {
    #[error("no commodity to route")]
    NoCommodities,
    #[error("commodity {0} has no super-source attached")]
    MissingSuperSource(CommodityId),
    #[error("physical link {0} has no capacity")]
    UncapacitatedLink(LinkKey),
    #[error("{links} candidate links exceed the oracle limit of {limit}")]
    TooLargeForOracle { links: usize, limit: usize },
    #[error("the result is not optimal")]
    NotOptimal,
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Milp(#[from] MilpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub status: SynthesisStatus,
    /// Links with `y = 1` that carry flow, in key order.
    pub installed: Vec<LinkKey>,
    /// Per-commodity arc flows, super-source arcs included.
    pub link_flows: LinkFlows,
    /// Occupied bandwidth of the chosen routing.
    pub objective: f64,
    /// Objective of the root LP relaxation.
    pub lp_bound: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    /// The commodities the result routes.
    pub commodities: Vec<Commodity>,
}

impl SynthesisResult {
    /// Result for a demand set with nothing to route.
    pub fn empty(commodities: Vec<Commodity>) -> Self {
        Self {
            status: SynthesisStatus::Optimal,
            installed: Vec::new(),
            link_flows: LinkFlows::new(),
            objective: 0.0,
            lp_bound: 0.0,
            nodes: 0,
            lp_iterations: 0,
            commodities,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SynthesisStatus::Optimal
    }

    /// Amount each server contributes to `commodity`.
    pub fn serving(&self, commodity: &Commodity) -> BTreeMap<EntityId, f64> {
        let source = commodity.super_source();
        self.link_flows
            .commodity(&commodity.id)
            .into_iter()
            .flatten()
            .filter(|(arc, &a)| arc.from == source && a > EPSILON)
            .map(|(arc, &a)| (arc.to.clone(), a))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisOptions {
    pub milp: MilpOptions,
    pub oracle_link_limit: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            milp: MilpOptions::default(),
            oracle_link_limit: ORACLE_LINK_LIMIT,
        }
    }
}

/// LP relaxation of the program.
pub fn solve_lp(program: &NodeLinkProgram, options: &SynthesisOptions) -> Result<LpSolution, SynthesisError> {
    Ok(lp::solve(&program.lp, &options.milp.simplex)?)
}

/// Solves the program with integral installation variables.
pub fn solve_milp(
    program: &NodeLinkProgram,
    options: &SynthesisOptions,
) -> Result<SynthesisResult, SynthesisError> {
    let sol = lp::branch_and_bound(&program.lp, &options.milp)?;
    let status = match sol.status {
        MilpStatus::Optimal => SynthesisStatus::Optimal,
        MilpStatus::Infeasible => SynthesisStatus::Infeasible,
        MilpStatus::Unbounded => SynthesisStatus::Unbounded,
    };
    let mut result = SynthesisResult {
        status,
        installed: Vec::new(),
        link_flows: LinkFlows::new(),
        objective: sol.objective,
        lp_bound: sol.root_bound,
        nodes: sol.nodes,
        lp_iterations: sol.lp_iterations,
        commodities: program.commodities.clone(),
    };
    if status != SynthesisStatus::Optimal {
        return Ok(result);
    }

    let mut carried = vec![0.0; program.links.len()];
    for fv in &program.flow_vars {
        let value = sol.values[fv.var.0];
        if value > FLOW_NOISE {
            result
                .link_flows
                .add(&program.commodities[fv.commodity].id, fv.arc.clone(), value);
            if let Some(e) = fv.link {
                carried[e] += value;
            }
        }
    }
    // y carries no cost, so installed-but-idle links can be dropped freely.
    result.installed = program
        .links
        .iter()
        .enumerate()
        .filter(|(e, _)| sol.values[program.install_vars[*e].0] > 0.5 && carried[*e] > 0.0)
        .map(|(_, (key, _))| key.clone())
        .collect();
    result.objective = program.lp.objective_value(&sol.values);
    Ok(result)
}

/// The input graph with layer 1 reduced to the installed links and their
/// endpoints. Layers 2 and 3 are kept; counterpart edges into removed
/// physical vertices are dropped.
pub fn extract_topology(
    result: &SynthesisResult,
    g: &MultiLayerGraph,
) -> Result<MultiLayerGraph, SynthesisError> {
    if !result.is_optimal() {
        return Err(SynthesisError::NotOptimal);
    }
    let original = g.physical();
    let mut reduced = Layer::new(LayerId::Physical);
    for key in &result.installed {
        let attrs = original.edges.get(key).copied().ok_or(SynthesisError::NotOptimal)?;
        reduced.add_vertex(key.a.clone());
        reduced.add_vertex(key.b.clone());
        reduced.insert_edge(key.clone(), attrs);
    }
    Ok(g.with_physical(reduced))
}

/// Routes `commodities` over the physical layer of `g`: attaches
/// super-sources, builds the node-link program and solves it.
pub fn synthesize(
    g: &MultiLayerGraph,
    commodities: &[Commodity],
    options: &SynthesisOptions,
) -> Result<SynthesisResult, SynthesisError> {
    if commodities.iter().all(|c| c.volume <= 0.0) {
        return Ok(SynthesisResult::empty(commodities.to_vec()));
    }
    let augmented = augment_all(g.physical(), commodities)?;
    let program = build_node_link_program(&augmented, &g.entity_roles(), commodities)?;
    solve_milp(&program, options)
}

/// Physical vertices touched by positive flow in `result`.
pub fn flow_carrying_vertices(result: &SynthesisResult) -> BTreeSet<EntityId> {
    result
        .link_flows
        .arc_totals()
        .into_iter()
        .filter(|(_, a)| *a > EPSILON)
        .flat_map(|(arc, _)| [arc.from, arc.to])
        .filter(|v| !v.is_super_source())
        .collect()
}

/// Runs the flow validators on a solved result: demand satisfaction, node
/// balance, subscriber transit and link capacity. Flow on a link that is not
/// installed counts as an overload against zero capacity.
pub fn verify_result(result: &SynthesisResult, g: &MultiLayerGraph) -> ValidationReport {
    let mut report = ValidationReport::new();
    if !result.is_optimal() {
        return report;
    }
    let assignment = FlowAssignment::from_link_flows(result.link_flows.clone(), &result.commodities);
    report.merge(check_demand_satisfaction(&assignment, &result.commodities));
    report.merge(check_node_balance(&result.link_flows, &result.commodities));
    report.merge(check_transit_restrictions(&result.link_flows, &g.entity_roles(), &result.commodities));
    report.merge(check_capacity(&result.link_flows, g.physical()));
    let installed: BTreeSet<&LinkKey> = result.installed.iter().collect();
    for (key, flow) in result.link_flows.link_totals() {
        let physical = !key.a.is_super_source() && !key.b.is_super_source();
        if physical && flow > EPSILON && !installed.contains(&key) {
            report.push(Violation::Overload {
                a: key.a,
                b: key.b,
                flow,
                capacity: 0.0,
            });
        }
    }
    report
}
