//! Findings produced by the structural and flow validators.
//!
//! Validators never fail: every broken rule becomes one [`Violation`] in a
//! [`ValidationReport`], and an empty report means the input is clean.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::demand::CommodityId;
use crate::mlg::{EntityId, LayerId, VertexId, VertexRole};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Replicas of one entity carry different roles.
    RoleOverlap {
        entity: EntityId,
        roles: Vec<VertexRole>,
    },
    MissingRole {
        vertex: VertexId,
    },
    /// A vertex whose role is not allowed on its layer (e.g. an access node on layer 2).
    MisplacedVertex {
        vertex: VertexId,
        role: VertexRole,
    },
    MultipleHubs {
        hubs: Vec<EntityId>,
    },
    MissingHub,
    SelfLoop {
        layer: LayerId,
        entity: EntityId,
    },
    EdgeEndpointMissing {
        layer: LayerId,
        a: EntityId,
        b: EntityId,
        missing: EntityId,
    },
    NonPositiveCapacity {
        layer: LayerId,
        a: EntityId,
        b: EntityId,
        capacity: Option<f64>,
    },
    UnexpectedCapacity {
        layer: LayerId,
        a: EntityId,
        b: EntityId,
    },
    /// A layer-3 edge that is not `{hub, subscriber}`.
    BrokenStar {
        a: EntityId,
        b: EntityId,
    },
    /// A layer-3 subscriber replica whose degree is not exactly one.
    StarDegree {
        entity: EntityId,
        degree: usize,
    },
    SubscriberAdjacency {
        a: EntityId,
        b: EntityId,
    },
    MissingCounterpart {
        entity: EntityId,
        lower: LayerId,
        upper: LayerId,
    },
    InvalidCounterpart {
        lower: VertexId,
        upper: VertexId,
        reason: String,
    },
    Disconnected {
        layer: LayerId,
        components: usize,
    },
    /// Sum of path amounts differs from the commodity volume.
    DemandMismatch {
        commodity: CommodityId,
        delivered: f64,
        volume: f64,
    },
    /// Flow arriving at the destination differs from the commodity volume.
    ArrivalMismatch {
        commodity: CommodityId,
        arrived: f64,
        volume: f64,
    },
    /// Net outflow at a node differs from what the commodity prescribes.
    NodeImbalance {
        commodity: CommodityId,
        node: EntityId,
        residual: f64,
    },
    /// A subscriber relays flow of a commodity destined elsewhere.
    SubscriberTransit {
        commodity: CommodityId,
        node: EntityId,
        amount: f64,
    },
    /// A subscriber emits flow.
    SubscriberOutflow {
        commodity: CommodityId,
        node: EntityId,
        amount: f64,
    },
    Overload {
        a: EntityId,
        b: EntityId,
        flow: f64,
        capacity: f64,
    },
}

impl Violation {
    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::RoleOverlap { .. } => "role_overlap",
            Violation::MissingRole { .. } => "missing_role",
            Violation::MisplacedVertex { .. } => "misplaced_vertex",
            Violation::MultipleHubs { .. } => "multiple_hubs",
            Violation::MissingHub => "missing_hub",
            Violation::SelfLoop { .. } => "self_loop",
            Violation::EdgeEndpointMissing { .. } => "edge_endpoint_missing",
            Violation::NonPositiveCapacity { .. } => "non_positive_capacity",
            Violation::UnexpectedCapacity { .. } => "unexpected_capacity",
            Violation::BrokenStar { .. } => "broken_star",
            Violation::StarDegree { .. } => "star_degree",
            Violation::SubscriberAdjacency { .. } => "subscriber_adjacency",
            Violation::MissingCounterpart { .. } => "missing_counterpart",
            Violation::InvalidCounterpart { .. } => "invalid_counterpart",
            Violation::Disconnected { .. } => "disconnected",
            Violation::DemandMismatch { .. } => "demand_mismatch",
            Violation::ArrivalMismatch { .. } => "arrival_mismatch",
            Violation::NodeImbalance { .. } => "node_imbalance",
            Violation::SubscriberTransit { .. } => "subscriber_transit",
            Violation::SubscriberOutflow { .. } => "subscriber_outflow",
            Violation::Overload { .. } => "overload",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RoleOverlap { entity, roles } => {
                write!(f, "entity {entity} carries several roles: {roles:?}")
            }
            Violation::MissingRole { vertex } => write!(f, "vertex {vertex} has no role"),
            Violation::MisplacedVertex { vertex, role } => {
                write!(f, "vertex {vertex} with role {role} is not allowed on its layer")
            }
            Violation::MultipleHubs { hubs } => write!(f, "more than one service hub: {hubs:?}"),
            Violation::MissingHub => write!(f, "layer 3 has subscribers but no service hub"),
            Violation::SelfLoop { layer, entity } => {
                write!(f, "self-loop at {entity} on layer {layer}")
            }
            Violation::EdgeEndpointMissing { layer, a, b, missing } => {
                write!(f, "edge {a}-{b} on layer {layer} names absent vertex {missing}")
            }
            Violation::NonPositiveCapacity { layer, a, b, capacity } => match capacity {
                Some(c) => write!(f, "edge {a}-{b} on layer {layer} has capacity {c:.6}"),
                None => write!(f, "edge {a}-{b} on layer {layer} has no capacity"),
            },
            Violation::UnexpectedCapacity { layer, a, b } => {
                write!(f, "edge {a}-{b} on layer {layer} must be uncapacitated")
            }
            Violation::BrokenStar { a, b } => {
                write!(f, "layer 3 edge {a}-{b} is not a hub-subscriber edge")
            }
            Violation::StarDegree { entity, degree } => {
                write!(f, "subscriber {entity} has degree {degree} on layer 3")
            }
            Violation::SubscriberAdjacency { a, b } => {
                write!(f, "subscribers {a} and {b} are adjacent on layer 2")
            }
            Violation::MissingCounterpart { entity, lower, upper } => write!(
                f,
                "entity {entity} lacks a counterpart edge between layers {lower} and {upper}"
            ),
            Violation::InvalidCounterpart { lower, upper, reason } => {
                write!(f, "counterpart edge {lower} - {upper}: {reason}")
            }
            Violation::Disconnected { layer, components } => {
                write!(f, "layer {layer} has {components} connected components")
            }
            Violation::DemandMismatch { commodity, delivered, volume } => write!(
                f,
                "commodity {commodity}: paths carry {delivered:.6} of {volume:.6} (deficit {:.6})",
                volume - delivered
            ),
            Violation::ArrivalMismatch { commodity, arrived, volume } => write!(
                f,
                "commodity {commodity}: {arrived:.6} arrives at the destination, expected {volume:.6}"
            ),
            Violation::NodeImbalance { commodity, node, residual } => write!(
                f,
                "commodity {commodity}: node {node} is out of balance by {residual:.6}"
            ),
            Violation::SubscriberTransit { commodity, node, amount } => write!(
                f,
                "commodity {commodity}: subscriber {node} relays {amount:.6}"
            ),
            Violation::SubscriberOutflow { commodity, node, amount } => write!(
                f,
                "commodity {commodity}: subscriber {node} emits {amount:.6}"
            ),
            Violation::Overload { a, b, flow, capacity } => write!(
                f,
                "link {a}-{b} carries {flow:.6} over capacity {capacity:.6}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, violation: Violation) {
        self.violations.push(violation);
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter()
    }

    pub fn has_kind(&self, kind: &str) -> bool {
        self.violations.iter().any(|v| v.kind() == kind)
    }
}
