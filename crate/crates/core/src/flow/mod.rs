//! Flow assignments on the physical layer and the conservation checks run
//! against them.
//!
//! A path flow loads every arc on its route with the same amount; the sum
//! of a commodity's path flows must equal its volume; and at every node the
//! net outflow is the commodity volume at the source, minus the volume at
//! the destination and zero elsewhere. Subscribers only ever absorb flow
//! addressed to them.

mod route;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::{Commodity, CommodityId};
use crate::mlg::{EntityId, Layer, LinkKey, VertexRole};
use crate::validation::{ValidationReport, Violation};

pub use route::{map_route_down, RouteError, RouteMapping};

/// Absolute tolerance for every conservation check.
pub const EPSILON: f64 = 1e-6;

/// Flows below this are treated as absent when peeling paths.
const PEEL_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub from: EntityId,
    pub to: EntityId,
}

impl Arc {
    pub fn new(from: impl Into<EntityId>, to: impl Into<EntityId>) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
        }
    }

    pub fn link(&self) -> LinkKey {
        LinkKey::new(self.from.clone(), self.to.clone())
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathFlow {
    pub commodity: CommodityId,
    pub path: Vec<EntityId>,
    pub amount: f64,
}

impl PathFlow {
    pub fn new(commodity: impl Into<CommodityId>, path: &[&str], amount: f64) -> Self {
        Self {
            commodity: commodity.into(),
            path: path.iter().map(|v| EntityId::from(*v)).collect(),
            amount,
        }
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.path.windows(2).map(|w| Arc::new(w[0].clone(), w[1].clone()))
    }
}

/// Per-commodity flow on each directed arc.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinkFlows {
    by_commodity: BTreeMap<CommodityId, BTreeMap<Arc, f64>>,
}

impl LinkFlows {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, commodity: &CommodityId, arc: Arc, amount: f64) {
        *self
            .by_commodity
            .entry(commodity.clone())
            .or_default()
            .entry(arc)
            .or_insert(0.0) += amount;
    }

    pub fn get(&self, commodity: &CommodityId, arc: &Arc) -> f64 {
        self.by_commodity
            .get(commodity)
            .and_then(|m| m.get(arc))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn commodity(&self, commodity: &CommodityId) -> Option<&BTreeMap<Arc, f64>> {
        self.by_commodity.get(commodity)
    }

    pub fn commodities(&self) -> impl Iterator<Item = (&CommodityId, &BTreeMap<Arc, f64>)> {
        self.by_commodity.iter()
    }

    /// Flow per arc summed over commodities.
    pub fn arc_totals(&self) -> BTreeMap<Arc, f64> {
        let mut out = BTreeMap::new();
        for arcs in self.by_commodity.values() {
            for (arc, amount) in arcs {
                *out.entry(arc.clone()).or_insert(0.0) += amount;
            }
        }
        out
    }

    /// Flow per undirected link, both directions and all commodities.
    pub fn link_totals(&self) -> BTreeMap<LinkKey, f64> {
        let mut out = BTreeMap::new();
        for (arc, amount) in self.arc_totals() {
            *out.entry(arc.link()).or_insert(0.0) += amount;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.by_commodity
            .values()
            .all(|m| m.values().all(|&a| a.abs() <= EPSILON))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FlowError {
    #[error("invalid path for commodity {commodity}: {reason}")]
    InvalidPath {
        commodity: CommodityId,
        reason: String,
    },
}

/// Path flows together with the arc flows they induce.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowAssignment {
    pub path_flows: Vec<PathFlow>,
    pub link_flows: LinkFlows,
}

impl FlowAssignment {
    pub fn from_paths(layer: &Layer, path_flows: Vec<PathFlow>) -> Result<Self, FlowError> {
        let link_flows = aggregate(layer, &path_flows)?;
        Ok(Self {
            path_flows,
            link_flows,
        })
    }

    /// Paths are recovered by [`decompose`].
    pub fn from_link_flows(link_flows: LinkFlows, commodities: &[Commodity]) -> Self {
        let path_flows = decompose(&link_flows, commodities);
        Self {
            path_flows,
            link_flows,
        }
    }
}

/// Sums path amounts onto the arcs they traverse.
pub fn aggregate(layer: &Layer, path_flows: &[PathFlow]) -> Result<LinkFlows, FlowError> {
    let mut flows = LinkFlows::new();
    for pf in path_flows {
        let invalid = |reason: String| FlowError::InvalidPath {
            commodity: pf.commodity.clone(),
            reason,
        };
        if !(pf.amount.is_finite() && pf.amount >= 0.0) {
            return Err(invalid(format!("amount {} is negative or not finite", pf.amount)));
        }
        if pf.path.len() < 2 {
            return Err(invalid("a path needs at least two vertices".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &pf.path {
            if !layer.contains(v) {
                return Err(invalid(format!("{v} is not on the layer")));
            }
            if !seen.insert(v) {
                return Err(invalid(format!("{v} is visited twice")));
            }
        }
        for arc in pf.arcs() {
            if !layer.has_arc(&arc.from, &arc.to) {
                return Err(invalid(format!("no arc {arc}")));
            }
        }
        if pf.amount > 0.0 {
            for arc in pf.arcs() {
                flows.add(&pf.commodity, arc, pf.amount);
            }
        }
    }
    Ok(flows)
}

/// Each commodity's path amounts must add up to its volume, and the same
/// total must reach its destination.
pub fn check_demand_satisfaction(
    assignment: &FlowAssignment,
    commodities: &[Commodity],
) -> ValidationReport {
    let mut report = ValidationReport::new();
    for c in commodities {
        let mut delivered = 0.0;
        let mut arrived = 0.0;
        for pf in assignment.path_flows.iter().filter(|p| p.commodity == c.id) {
            delivered += pf.amount;
            if pf.path.last() == Some(&c.destination) {
                arrived += pf.amount;
            }
        }
        if (delivered - c.volume).abs() > EPSILON {
            report.push(Violation::DemandMismatch {
                commodity: c.id.clone(),
                delivered,
                volume: c.volume,
            });
        }
        if (arrived - c.volume).abs() > EPSILON {
            report.push(Violation::ArrivalMismatch {
                commodity: c.id.clone(),
                arrived,
                volume: c.volume,
            });
        }
    }
    report
}

fn net_outflow(arcs: &BTreeMap<Arc, f64>) -> BTreeMap<&EntityId, f64> {
    let mut net: BTreeMap<&EntityId, f64> = BTreeMap::new();
    for (arc, &amount) in arcs {
        *net.entry(&arc.from).or_insert(0.0) += amount;
        *net.entry(&arc.to).or_insert(0.0) -= amount;
    }
    net
}

/// Node balance per commodity.
///
/// When the commodity's super-source carries flow it is the only source.
/// Otherwise the candidate servers act as one joint source: none of them may
/// absorb flow and their net outflows must add up to the volume. The joint
/// mismatch is reported against the super-source id.
pub fn check_node_balance(link_flows: &LinkFlows, commodities: &[Commodity]) -> ValidationReport {
    let mut report = ValidationReport::new();
    let empty = BTreeMap::new();
    for c in commodities {
        let arcs = link_flows.commodity(&c.id).unwrap_or(&empty);
        let mut net = net_outflow(arcs);
        let super_source = c.super_source();
        let via_super_source = net.contains_key(&super_source);
        let mut imbalance = |node: &EntityId, residual: f64| {
            if residual.abs() > EPSILON {
                report.push(Violation::NodeImbalance {
                    commodity: c.id.clone(),
                    node: node.clone(),
                    residual,
                });
            }
        };

        let at_destination = net.remove(&c.destination).unwrap_or(0.0);
        imbalance(&c.destination, at_destination + c.volume);

        if via_super_source {
            let at_source = net.remove(&super_source).unwrap_or(0.0);
            imbalance(&super_source, at_source - c.volume);
        } else {
            let mut joint = 0.0;
            for s in &c.candidate_sources {
                let out = net.remove(s).unwrap_or(0.0);
                joint += out;
                if out < -EPSILON {
                    imbalance(s, out);
                }
            }
            imbalance(&super_source, joint - c.volume);
        }

        for (node, residual) in net {
            imbalance(node, residual);
        }
    }
    report
}

/// Subscribers never relay flow for other destinations and never emit flow.
pub fn check_transit_restrictions(
    link_flows: &LinkFlows,
    roles: &BTreeMap<EntityId, VertexRole>,
    commodities: &[Commodity],
) -> ValidationReport {
    let mut report = ValidationReport::new();
    let empty = BTreeMap::new();
    for c in commodities {
        let arcs = link_flows.commodity(&c.id).unwrap_or(&empty);
        let mut inflow: BTreeMap<&EntityId, f64> = BTreeMap::new();
        let mut outflow: BTreeMap<&EntityId, f64> = BTreeMap::new();
        for (arc, &amount) in arcs {
            *outflow.entry(&arc.from).or_insert(0.0) += amount;
            *inflow.entry(&arc.to).or_insert(0.0) += amount;
        }
        let touched: BTreeSet<&EntityId> = inflow.keys().chain(outflow.keys()).copied().collect();
        for node in touched {
            if roles.get(node) != Some(&VertexRole::Subscriber) {
                continue;
            }
            let out = outflow.get(node).copied().unwrap_or(0.0);
            let inn = inflow.get(node).copied().unwrap_or(0.0);
            if node == &c.destination {
                if out > EPSILON {
                    report.push(Violation::SubscriberOutflow {
                        commodity: c.id.clone(),
                        node: node.clone(),
                        amount: out,
                    });
                }
            } else if inn.max(out) > EPSILON {
                report.push(Violation::SubscriberTransit {
                    commodity: c.id.clone(),
                    node: node.clone(),
                    amount: inn.max(out),
                });
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Utilization {
    pub flow: f64,
    pub capacity: f64,
    pub fraction: f64,
    pub overloaded: bool,
}

/// Load of each capacitated link. Both directions of a link share its
/// capacity, so the fraction is taken over their sum.
pub fn link_utilization(link_flows: &LinkFlows, layer1: &Layer) -> BTreeMap<LinkKey, Utilization> {
    let totals = link_flows.link_totals();
    layer1
        .edges
        .iter()
        .filter_map(|(key, attrs)| {
            let capacity = attrs.capacity?;
            let flow = totals.get(key).copied().unwrap_or(0.0);
            let fraction = flow / capacity;
            Some((
                key.clone(),
                Utilization {
                    flow,
                    capacity,
                    fraction,
                    overloaded: fraction > 1.0 + EPSILON,
                },
            ))
        })
        .collect()
}

/// Overloaded links as report entries.
pub fn check_capacity(link_flows: &LinkFlows, layer1: &Layer) -> ValidationReport {
    let mut report = ValidationReport::new();
    for (key, u) in link_utilization(link_flows, layer1) {
        if u.overloaded {
            report.push(Violation::Overload {
                a: key.a,
                b: key.b,
                flow: u.flow,
                capacity: u.capacity,
            });
        }
    }
    report
}

/// Splits each commodity's arc flows into source-to-destination paths.
///
/// Repeatedly takes the lexicographically smallest simple path through arcs
/// that still carry flow and removes its bottleneck amount. Flow left on
/// cycles or dead ends is not returned.
pub fn decompose(link_flows: &LinkFlows, commodities: &[Commodity]) -> Vec<PathFlow> {
    let mut out = Vec::new();
    for c in commodities {
        let Some(arcs) = link_flows.commodity(&c.id) else {
            continue;
        };
        let mut residual: BTreeMap<Arc, f64> = arcs
            .iter()
            .filter(|(_, &a)| a > PEEL_THRESHOLD)
            .map(|(k, &a)| (k.clone(), a))
            .collect();
        let super_source = c.super_source();
        let sources: Vec<EntityId> = if residual.keys().any(|a| a.from == super_source) {
            vec![super_source]
        } else {
            c.candidate_sources.iter().cloned().collect()
        };
        while let Some(path) = smallest_path(&residual, &sources, &c.destination) {
            let arcs: Vec<Arc> = path
                .windows(2)
                .map(|w| Arc::new(w[0].clone(), w[1].clone()))
                .collect();
            let bottleneck = arcs
                .iter()
                .map(|a| residual[a])
                .fold(f64::INFINITY, f64::min);
            for arc in &arcs {
                let left = residual[arc] - bottleneck;
                if left > PEEL_THRESHOLD {
                    residual.insert(arc.clone(), left);
                } else {
                    residual.remove(arc);
                }
            }
            out.push(PathFlow {
                commodity: c.id.clone(),
                path,
                amount: bottleneck,
            });
        }
    }
    out
}

fn smallest_path(
    arcs: &BTreeMap<Arc, f64>,
    sources: &[EntityId],
    target: &EntityId,
) -> Option<Vec<EntityId>> {
    let mut succ: BTreeMap<&EntityId, Vec<&EntityId>> = BTreeMap::new();
    let mut pred: BTreeMap<&EntityId, Vec<&EntityId>> = BTreeMap::new();
    for arc in arcs.keys() {
        succ.entry(&arc.from).or_default().push(&arc.to);
        pred.entry(&arc.to).or_default().push(&arc.from);
    }
    // BTreeMap keys arrive sorted by (from, to), so successor lists are sorted.
    let mut reaches: BTreeSet<&EntityId> = BTreeSet::from([target]);
    let mut queue = VecDeque::from([target]);
    while let Some(v) = queue.pop_front() {
        for &u in pred.get(v).into_iter().flatten() {
            if reaches.insert(u) {
                queue.push_back(u);
            }
        }
    }

    let mut sorted_sources: Vec<&EntityId> = sources.iter().collect();
    sorted_sources.sort();
    for source in sorted_sources {
        if source == target || !reaches.contains(source) {
            continue;
        }
        let mut path = vec![source];
        let mut on_path = BTreeSet::from([source]);
        if dfs(&succ, &reaches, target, &mut path, &mut on_path) {
            return Some(path.into_iter().cloned().collect());
        }
    }
    None
}

fn dfs<'a>(
    succ: &BTreeMap<&'a EntityId, Vec<&'a EntityId>>,
    reaches: &BTreeSet<&'a EntityId>,
    target: &EntityId,
    path: &mut Vec<&'a EntityId>,
    on_path: &mut BTreeSet<&'a EntityId>,
) -> bool {
    let here = *path.last().expect("path is never empty");
    if here == target {
        return true;
    }
    for &next in succ.get(here).into_iter().flatten() {
        if !reaches.contains(next) || on_path.contains(next) {
            continue;
        }
        path.push(next);
        on_path.insert(next);
        if dfs(succ, reaches, target, path, on_path) {
            return true;
        }
        on_path.remove(next);
        path.pop();
    }
    false
}
