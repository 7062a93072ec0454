//! Three-layer graph of a video-on-demand system.
//!
//! Layer 1 is the physical network, layer 2 the logical server/subscriber
//! overlay and layer 3 the service star. A vertex is the replica of an
//! entity on one layer, so a [`VertexId`] is an `(entity, layer)` pair and
//! counterpart lookup between adjacent layers reduces to entity identity
//! plus the stored [`CounterpartEdge`] set.

mod validate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use validate::{validate_structure, validate_structure_with, StructureOptions};

/// Prefix reserved for vertices the library creates itself.
pub const SYNTHETIC_PREFIX: char = '@';
const SUPER_SOURCE_PREFIX: &str = "@src/";

/// Opaque identifier of a functional unit (server, subscriber, node).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(String);

impl EntityId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The synthetic center of the layer-3 star.
    pub fn service_hub() -> Self {
        Self::new("@hub")
    }

    /// The synthetic super-source attached for one commodity.
    pub fn super_source(commodity: &str) -> Self {
        Self(format!("{SUPER_SOURCE_PREFIX}{commodity}"))
    }

    pub fn is_synthetic(&self) -> bool {
        self.0.starts_with(SYNTHETIC_PREFIX)
    }

    pub fn is_super_source(&self) -> bool {
        self.0.starts_with(SUPER_SOURCE_PREFIX)
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

impl From<String> for EntityId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum LayerId {
    Physical = 1,
    Logical = 2,
    Service = 3,
}

impl LayerId {
    pub const ALL: [LayerId; 3] = [LayerId::Physical, LayerId::Logical, LayerId::Service];

    pub fn number(self) -> u8 {
        self as u8
    }

    fn index(self) -> usize {
        self as usize - 1
    }

    pub fn is_adjacent(self, other: LayerId) -> bool {
        self.number().abs_diff(other.number()) == 1
    }

    pub fn above(self) -> Option<LayerId> {
        LayerId::try_from(self.number() + 1).ok()
    }
}

impl TryFrom<u8> for LayerId {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, Self::Error> {
        match n {
            1 => Ok(LayerId::Physical),
            2 => Ok(LayerId::Logical),
            3 => Ok(LayerId::Service),
            other => Err(format!("layer must be 1, 2 or 3, got {other}")),
        }
    }
}

impl From<LayerId> for u8 {
    fn from(l: LayerId) -> u8 {
        l.number()
    }
}

impl fmt::Display for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexRole {
    Subscriber,
    VideoServer,
    AccessNode,
    Intermediate,
    ServiceHub,
}

impl VertexRole {
    pub fn as_str(self) -> &'static str {
        match self {
            VertexRole::Subscriber => "subscriber",
            VertexRole::VideoServer => "video_server",
            VertexRole::AccessNode => "access_node",
            VertexRole::Intermediate => "intermediate",
            VertexRole::ServiceHub => "service_hub",
        }
    }

    /// Whether a replica with this role may live on `layer`.
    pub fn allowed_on(self, layer: LayerId) -> bool {
        match layer {
            LayerId::Physical => self != VertexRole::ServiceHub,
            LayerId::Logical => matches!(self, VertexRole::Subscriber | VertexRole::VideoServer),
            LayerId::Service => matches!(self, VertexRole::Subscriber | VertexRole::ServiceHub),
        }
    }
}

impl fmt::Display for VertexRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId {
    pub entity: EntityId,
    pub layer: LayerId,
}

impl VertexId {
    pub fn new(entity: impl Into<EntityId>, layer: LayerId) -> Self {
        Self {
            entity: entity.into(),
            layer,
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:L{}", self.entity, self.layer)
    }
}

/// Undirected vertex pair, stored with the smaller id first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkKey {
    pub a: EntityId,
    pub b: EntityId,
}

impl LinkKey {
    pub fn new(x: impl Into<EntityId>, y: impl Into<EntityId>) -> Self {
        let (x, y) = (x.into(), y.into());
        if x <= y {
            Self { a: x, b: y }
        } else {
            Self { a: y, b: x }
        }
    }

    pub fn is_self_loop(&self) -> bool {
        self.a == self.b
    }

    pub fn contains(&self, v: &EntityId) -> bool {
        &self.a == v || &self.b == v
    }

    pub fn other(&self, v: &EntityId) -> Option<&EntityId> {
        if &self.a == v {
            Some(&self.b)
        } else if &self.b == v {
            Some(&self.a)
        } else {
            None
        }
    }
}

impl fmt::Display for LinkKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeAttrs {
    /// Rate units; `None` means uncapacitated.
    pub capacity: Option<f64>,
    /// Cost per unit of carried rate.
    pub weight: f64,
}

impl EdgeAttrs {
    pub fn capacitated(capacity: f64) -> Self {
        Self {
            capacity: Some(capacity),
            weight: 1.0,
        }
    }

    pub fn uncapacitated() -> Self {
        Self {
            capacity: None,
            weight: 1.0,
        }
    }
}

/// One level of the multi-layer graph.
///
/// Edges incident to a super-source are one-way arcs leaving the
/// super-source; every other edge is undirected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub id: LayerId,
    pub vertices: BTreeSet<EntityId>,
    pub edges: BTreeMap<LinkKey, EdgeAttrs>,
}

impl Layer {
    pub fn new(id: LayerId) -> Self {
        Self {
            id,
            vertices: BTreeSet::new(),
            edges: BTreeMap::new(),
        }
    }

    pub fn add_vertex(&mut self, v: impl Into<EntityId>) -> bool {
        self.vertices.insert(v.into())
    }

    /// Inserts or replaces an edge without checking endpoints.
    pub fn insert_edge(&mut self, key: LinkKey, attrs: EdgeAttrs) -> Option<EdgeAttrs> {
        self.edges.insert(key, attrs)
    }

    pub fn contains(&self, v: &EntityId) -> bool {
        self.vertices.contains(v)
    }

    pub fn edge(&self, x: &EntityId, y: &EntityId) -> Option<&EdgeAttrs> {
        self.edges.get(&LinkKey::new(x.clone(), y.clone()))
    }

    /// Whether flow may move from `from` to `to` along a single edge.
    pub fn has_arc(&self, from: &EntityId, to: &EntityId) -> bool {
        if to.is_super_source() {
            return false;
        }
        self.edge(from, to).is_some()
    }

    pub fn degree(&self, v: &EntityId) -> usize {
        self.edges
            .keys()
            .filter(|k| k.contains(v))
            .map(|k| if k.is_self_loop() { 2 } else { 1 })
            .sum()
    }

    /// Sorted neighbor lists over all vertices, following arc direction.
    pub fn out_neighbors(&self) -> BTreeMap<&EntityId, Vec<&EntityId>> {
        let mut adj: BTreeMap<&EntityId, Vec<&EntityId>> =
            self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for key in self.edges.keys() {
            if !key.b.is_super_source() {
                adj.entry(&key.a).or_default().push(&key.b);
            }
            if !key.a.is_super_source() && !key.is_self_loop() {
                adj.entry(&key.b).or_default().push(&key.a);
            }
        }
        for list in adj.values_mut() {
            list.sort();
            list.dedup();
        }
        adj
    }

    /// Number of connected components over the layer's vertices.
    pub fn component_count(&self) -> usize {
        let mut undirected: BTreeMap<&EntityId, Vec<&EntityId>> = BTreeMap::new();
        for key in self.edges.keys() {
            undirected.entry(&key.a).or_default().push(&key.b);
            undirected.entry(&key.b).or_default().push(&key.a);
        }
        let mut seen: BTreeSet<&EntityId> = BTreeSet::new();
        let mut components = 0;
        for start in &self.vertices {
            if !seen.insert(start) {
                continue;
            }
            components += 1;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in undirected.get(v).into_iter().flatten() {
                    if self.vertices.contains(w) && seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }
}

/// Inter-layer edge joining two replicas of one entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CounterpartEdge {
    pub lower: VertexId,
    pub upper: VertexId,
}

impl CounterpartEdge {
    pub fn between(entity: &EntityId, lower: LayerId, upper: LayerId) -> Self {
        Self {
            lower: VertexId::new(entity.clone(), lower),
            upper: VertexId::new(entity.clone(), upper),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiLayerGraph {
    layers: [Layer; 3],
    roles: BTreeMap<VertexId, VertexRole>,
    counterparts: BTreeSet<CounterpartEdge>,
}

impl MultiLayerGraph {
    /// Assembles a graph from raw parts without checking any invariant.
    /// Use [`validate_structure`] to inspect the result.
    pub fn from_parts(
        layers: [Layer; 3],
        roles: BTreeMap<VertexId, VertexRole>,
        counterparts: BTreeSet<CounterpartEdge>,
    ) -> Self {
        Self {
            layers,
            roles,
            counterparts,
        }
    }

    pub fn into_parts(
        self,
    ) -> (
        [Layer; 3],
        BTreeMap<VertexId, VertexRole>,
        BTreeSet<CounterpartEdge>,
    ) {
        (self.layers, self.roles, self.counterparts)
    }

    pub fn layer(&self, id: LayerId) -> &Layer {
        &self.layers[id.index()]
    }

    pub fn layers(&self) -> &[Layer; 3] {
        &self.layers
    }

    pub fn physical(&self) -> &Layer {
        self.layer(LayerId::Physical)
    }

    pub fn roles(&self) -> &BTreeMap<VertexId, VertexRole> {
        &self.roles
    }

    pub fn counterparts(&self) -> &BTreeSet<CounterpartEdge> {
        &self.counterparts
    }

    pub fn role(&self, v: &VertexId) -> Option<VertexRole> {
        self.roles.get(v).copied()
    }

    /// Role per entity, taken from its lowest replica.
    pub fn entity_roles(&self) -> BTreeMap<EntityId, VertexRole> {
        let mut out = BTreeMap::new();
        for (v, role) in &self.roles {
            out.entry(v.entity.clone()).or_insert(*role);
        }
        out
    }

    pub fn entities(&self) -> BTreeSet<&EntityId> {
        self.layers.iter().flat_map(|l| l.vertices.iter()).collect()
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.layer(v.layer).contains(&v.entity)
    }

    /// Entities with the given role, in id order.
    pub fn entities_with_role(&self, role: VertexRole) -> Vec<EntityId> {
        self.entity_roles()
            .into_iter()
            .filter(|(_, r)| *r == role)
            .map(|(e, _)| e)
            .collect()
    }

    /// Replaces layer 1 and drops counterpart edges whose layer-1 end vanished.
    pub(crate) fn with_physical(&self, physical: Layer) -> Self {
        let mut out = self.clone();
        out.roles.retain(|v, _| v.layer != LayerId::Physical || physical.contains(&v.entity));
        out.counterparts
            .retain(|e| e.lower.layer != LayerId::Physical || physical.contains(&e.lower.entity));
        out.layers[0] = physical;
        out
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CounterpartError {
    #[error("layer {from} is not adjacent to layer {to}")]
    NonAdjacentLayer { from: LayerId, to: LayerId },
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
}

/// Replica of `v`'s entity on the adjacent layer `target`, following the
/// stored counterpart edges. `Ok(None)` when the entity is not replicated
/// there.
pub fn counterpart(
    g: &MultiLayerGraph,
    v: &VertexId,
    target: LayerId,
) -> Result<Option<VertexId>, CounterpartError> {
    if !v.layer.is_adjacent(target) {
        return Err(CounterpartError::NonAdjacentLayer {
            from: v.layer,
            to: target,
        });
    }
    if !g.contains(v) {
        return Err(CounterpartError::UnknownVertex(v.clone()));
    }
    let found = g.counterparts.iter().find_map(|e| {
        if &e.lower == v && e.upper.layer == target {
            Some(&e.upper)
        } else if &e.upper == v && e.lower.layer == target {
            Some(&e.lower)
        } else {
            None
        }
    });
    Ok(found.filter(|w| g.contains(w)).cloned())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntitySpec {
    pub id: EntityId,
    pub role: VertexRole,
    pub layers: BTreeSet<LayerId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub layer: LayerId,
    pub a: EntityId,
    pub b: EntityId,
    pub capacity: Option<f64>,
    pub weight: Option<f64>,
}

/// Declarative description of a graph: entities with their per-layer
/// presence, plus the edges of each layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub entities: Vec<EntitySpec>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("entity {0} is declared more than once")]
    DuplicateEntity(EntityId),
    #[error("entity id {0} uses the reserved '@' prefix")]
    ReservedEntityId(EntityId),
    #[error("edge {a}-{b} on layer {layer} names {missing}, which is not on that layer")]
    EdgeEndpointMissing {
        layer: LayerId,
        a: EntityId,
        b: EntityId,
        missing: EntityId,
    },
    #[error("edge {a}-{b} on layer {layer} needs a finite positive capacity, got {capacity:?}")]
    NonPositiveCapacity {
        layer: LayerId,
        a: EntityId,
        b: EntityId,
        capacity: Option<f64>,
    },
    #[error("edge {a}-{b} on layer {layer} must not carry a capacity")]
    UnexpectedCapacity {
        layer: LayerId,
        a: EntityId,
        b: EntityId,
    },
    #[error("edge {a}-{b} on layer {layer} has invalid weight {weight}")]
    InvalidWeight {
        layer: LayerId,
        a: EntityId,
        b: EntityId,
        weight: f64,
    },
    #[error("self-loop at {entity} on layer {layer}")]
    SelfLoop { layer: LayerId, entity: EntityId },
    #[error("edge {a}-{b} on layer {layer} is declared more than once")]
    DuplicateEdge {
        layer: LayerId,
        a: EntityId,
        b: EntityId,
    },
    #[error(transparent)]
    Generate(#[from] GenerateError),
}

/// Materializes every replica, edge and counterpart edge of `spec`.
pub fn build_graph(spec: &GraphSpec) -> Result<MultiLayerGraph, BuildError> {
    let mut layers = LayerId::ALL.map(Layer::new);
    let mut roles = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for entity in &spec.entities {
        if !seen.insert(&entity.id) {
            return Err(BuildError::DuplicateEntity(entity.id.clone()));
        }
        let reserved_ok = entity.role == VertexRole::ServiceHub && !entity.id.is_super_source();
        if entity.id.is_synthetic() && !reserved_ok {
            return Err(BuildError::ReservedEntityId(entity.id.clone()));
        }
        for &layer in &entity.layers {
            layers[layer.index()].add_vertex(entity.id.clone());
            roles.insert(VertexId::new(entity.id.clone(), layer), entity.role);
        }
    }

    for edge in &spec.edges {
        let layer = &mut layers[edge.layer.index()];
        for end in [&edge.a, &edge.b] {
            if !layer.contains(end) {
                return Err(BuildError::EdgeEndpointMissing {
                    layer: edge.layer,
                    a: edge.a.clone(),
                    b: edge.b.clone(),
                    missing: end.clone(),
                });
            }
        }
        if edge.a == edge.b {
            return Err(BuildError::SelfLoop {
                layer: edge.layer,
                entity: edge.a.clone(),
            });
        }
        let attrs = edge_attrs(edge)?;
        if layer
            .insert_edge(LinkKey::new(edge.a.clone(), edge.b.clone()), attrs)
            .is_some()
        {
            return Err(BuildError::DuplicateEdge {
                layer: edge.layer,
                a: edge.a.clone(),
                b: edge.b.clone(),
            });
        }
    }

    let mut counterparts = BTreeSet::new();
    for pair in LayerId::ALL.windows(2) {
        let (lower, upper) = (pair[0], pair[1]);
        for entity in layers[lower.index()]
            .vertices
            .intersection(&layers[upper.index()].vertices)
        {
            counterparts.insert(CounterpartEdge::between(entity, lower, upper));
        }
    }

    Ok(MultiLayerGraph {
        layers,
        roles,
        counterparts,
    })
}

fn edge_attrs(edge: &EdgeSpec) -> Result<EdgeAttrs, BuildError> {
    let weight = edge.weight.unwrap_or(1.0);
    if !weight.is_finite() || weight < 0.0 {
        return Err(BuildError::InvalidWeight {
            layer: edge.layer,
            a: edge.a.clone(),
            b: edge.b.clone(),
            weight,
        });
    }
    match (edge.layer, edge.capacity) {
        (LayerId::Physical, Some(c)) if c.is_finite() && c > 0.0 => Ok(EdgeAttrs {
            capacity: Some(c),
            weight,
        }),
        (LayerId::Physical, capacity) => Err(BuildError::NonPositiveCapacity {
            layer: edge.layer,
            a: edge.a.clone(),
            b: edge.b.clone(),
            capacity,
        }),
        (layer, Some(_)) => Err(BuildError::UnexpectedCapacity {
            layer,
            a: edge.a.clone(),
            b: edge.b.clone(),
        }),
        (_, None) => Ok(EdgeAttrs {
            capacity: None,
            weight,
        }),
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("the physical layer holds no subscriber")]
    NoSubscribers,
    #[error("the physical layer holds no video server")]
    NoServers,
    #[error("physical vertex {0} has no role")]
    UnassignedVertex(EntityId),
}

/// Canonical layers 2 and 3 derived from the physical layer.
///
/// Layer 2 joins every pair of servers and every subscriber to every
/// server, with no subscriber-subscriber edge. Layer 3 is a star from the
/// synthetic service hub to each subscriber.
pub fn generate_logical_layers(
    physical: &Layer,
    roles: &BTreeMap<EntityId, VertexRole>,
) -> Result<(Layer, Layer), GenerateError> {
    let mut servers = Vec::new();
    let mut subscribers = Vec::new();
    for v in &physical.vertices {
        match roles.get(v) {
            Some(VertexRole::VideoServer) => servers.push(v),
            Some(VertexRole::Subscriber) => subscribers.push(v),
            Some(_) => {}
            None => return Err(GenerateError::UnassignedVertex(v.clone())),
        }
    }
    if servers.is_empty() {
        return Err(GenerateError::NoServers);
    }
    if subscribers.is_empty() {
        return Err(GenerateError::NoSubscribers);
    }

    let mut logical = Layer::new(LayerId::Logical);
    for v in servers.iter().chain(&subscribers) {
        logical.add_vertex((*v).clone());
    }
    for (i, s) in servers.iter().enumerate() {
        for t in &servers[i + 1..] {
            logical.insert_edge(LinkKey::new((*s).clone(), (*t).clone()), EdgeAttrs::uncapacitated());
        }
        for a in &subscribers {
            logical.insert_edge(LinkKey::new((*a).clone(), (*s).clone()), EdgeAttrs::uncapacitated());
        }
    }

    let hub = EntityId::service_hub();
    let mut service = Layer::new(LayerId::Service);
    service.add_vertex(hub.clone());
    for a in &subscribers {
        service.add_vertex((*a).clone());
        service.insert_edge(LinkKey::new(hub.clone(), (*a).clone()), EdgeAttrs::uncapacitated());
    }
    Ok((logical, service))
}

/// A physical link as declared in a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalLink {
    pub a: EntityId,
    pub b: EntityId,
    pub capacity: f64,
    pub weight: Option<f64>,
}

/// Builds a [`GraphSpec`] from the physical description, generating the
/// logical and service layers canonically.
pub fn canonical_spec(
    entities: &[(EntityId, VertexRole)],
    links: &[PhysicalLink],
) -> Result<GraphSpec, BuildError> {
    let physical_edges: Vec<EdgeSpec> = links
        .iter()
        .map(|l| EdgeSpec {
            layer: LayerId::Physical,
            a: l.a.clone(),
            b: l.b.clone(),
            capacity: Some(l.capacity),
            weight: l.weight,
        })
        .collect();
    let physical_only = GraphSpec {
        entities: entities
            .iter()
            .map(|(id, role)| EntitySpec {
                id: id.clone(),
                role: *role,
                layers: BTreeSet::from([LayerId::Physical]),
            })
            .collect(),
        edges: physical_edges.clone(),
    };
    let physical = build_graph(&physical_only)?.layers[0].clone();
    let roles: BTreeMap<EntityId, VertexRole> = entities.iter().cloned().collect();
    let (logical, service) = generate_logical_layers(&physical, &roles)?;
    Ok(assemble_spec(entities, physical_edges, &logical, &service))
}

/// Combines physical data with explicitly given layers 2 and 3.
pub fn assemble_spec(
    entities: &[(EntityId, VertexRole)],
    physical_edges: Vec<EdgeSpec>,
    logical: &Layer,
    service: &Layer,
) -> GraphSpec {
    let mut specs: Vec<EntitySpec> = entities
        .iter()
        .map(|(id, role)| {
            let mut layers = BTreeSet::from([LayerId::Physical]);
            if logical.contains(id) {
                layers.insert(LayerId::Logical);
            }
            if service.contains(id) {
                layers.insert(LayerId::Service);
            }
            EntitySpec {
                id: id.clone(),
                role: *role,
                layers,
            }
        })
        .collect();
    let declared: BTreeSet<&EntityId> = entities.iter().map(|(id, _)| id).collect();
    for v in logical.vertices.iter().chain(&service.vertices) {
        if !declared.contains(v) && !specs.iter().any(|s| &s.id == v) {
            let mut layers = BTreeSet::new();
            if logical.contains(v) {
                layers.insert(LayerId::Logical);
            }
            if service.contains(v) {
                layers.insert(LayerId::Service);
            }
            specs.push(EntitySpec {
                id: v.clone(),
                role: VertexRole::ServiceHub,
                layers,
            });
        }
    }
    let mut edges = physical_edges;
    for layer in [logical, service] {
        edges.extend(layer.edges.keys().map(|k| EdgeSpec {
            layer: layer.id,
            a: k.a.clone(),
            b: k.b.clone(),
            capacity: None,
            weight: None,
        }));
    }
    GraphSpec {
        entities: specs,
        edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[&str]) -> Vec<EntityId> {
        v.iter().map(|s| EntityId::from(*s)).collect()
    }

    fn small_world() -> MultiLayerGraph {
        let entities = vec![
            (EntityId::from("vs1"), VertexRole::VideoServer),
            (EntityId::from("x1"), VertexRole::Intermediate),
            (EntityId::from("na1"), VertexRole::AccessNode),
            (EntityId::from("a1"), VertexRole::Subscriber),
        ];
        let links = vec![
            PhysicalLink { a: "vs1".into(), b: "x1".into(), capacity: 10.0, weight: None },
            PhysicalLink { a: "x1".into(), b: "na1".into(), capacity: 10.0, weight: None },
            PhysicalLink { a: "na1".into(), b: "a1".into(), capacity: 10.0, weight: None },
        ];
        build_graph(&canonical_spec(&entities, &links).unwrap()).unwrap()
    }

    #[test]
    fn builds_three_layers_with_counterparts() {
        let g = small_world();
        assert_eq!(g.physical().vertices.len(), 4);
        assert_eq!(g.layer(LayerId::Logical).vertices.len(), 2);
        assert_eq!(g.layer(LayerId::Service).vertices.len(), 2);
        // vs1 and a1 on 1<->2, a1 on 2<->3
        assert_eq!(g.counterparts().len(), 3);
        assert!(validate_structure(&g).is_clean());
    }

    #[test]
    fn zero_capacity_is_rejected() {
        let entities = vec![
            (EntityId::from("vs1"), VertexRole::VideoServer),
            (EntityId::from("a1"), VertexRole::Subscriber),
        ];
        let links = vec![PhysicalLink { a: "vs1".into(), b: "a1".into(), capacity: 0.0, weight: None }];
        assert!(matches!(
            canonical_spec(&entities, &links),
            Err(BuildError::NonPositiveCapacity { .. })
        ));
    }

    #[test]
    fn edge_to_absent_vertex_is_rejected() {
        let spec = GraphSpec {
            entities: vec![EntitySpec {
                id: "vs1".into(),
                role: VertexRole::VideoServer,
                layers: BTreeSet::from([LayerId::Physical]),
            }],
            edges: vec![EdgeSpec {
                layer: LayerId::Physical,
                a: "vs1".into(),
                b: "ghost".into(),
                capacity: Some(1.0),
                weight: None,
            }],
        };
        assert_eq!(
            build_graph(&spec),
            Err(BuildError::EdgeEndpointMissing {
                layer: LayerId::Physical,
                a: "vs1".into(),
                b: "ghost".into(),
                missing: "ghost".into(),
            })
        );
    }

    #[test]
    fn duplicate_entity_is_rejected() {
        let e = EntitySpec {
            id: "a1".into(),
            role: VertexRole::Subscriber,
            layers: BTreeSet::from([LayerId::Physical]),
        };
        let spec = GraphSpec {
            entities: vec![e.clone(), e],
            edges: vec![],
        };
        assert_eq!(build_graph(&spec), Err(BuildError::DuplicateEntity("a1".into())));
    }

    #[test]
    fn canonical_generation_counts() {
        let mut physical = Layer::new(LayerId::Physical);
        let mut roles = BTreeMap::new();
        for v in ids(&["vs1", "vs2"]) {
            physical.add_vertex(v.clone());
            roles.insert(v, VertexRole::VideoServer);
        }
        for v in ids(&["a1", "a2"]) {
            physical.add_vertex(v.clone());
            roles.insert(v, VertexRole::Subscriber);
        }
        let (logical, service) = generate_logical_layers(&physical, &roles).unwrap();
        assert_eq!(logical.edges.len(), 1 + 4);
        assert_eq!(service.edges.len(), 2);

        let mut one = Layer::new(LayerId::Physical);
        one.add_vertex("vs1");
        one.add_vertex("a1");
        let roles: BTreeMap<_, _> = [
            (EntityId::from("vs1"), VertexRole::VideoServer),
            (EntityId::from("a1"), VertexRole::Subscriber),
        ]
        .into();
        let (logical, service) = generate_logical_layers(&one, &roles).unwrap();
        assert_eq!(logical.edges.len(), 1);
        assert_eq!(service.edges.len(), 1);
    }

    #[test]
    fn generation_needs_servers_and_subscribers() {
        let mut physical = Layer::new(LayerId::Physical);
        physical.add_vertex("a1");
        let roles: BTreeMap<_, _> = [(EntityId::from("a1"), VertexRole::Subscriber)].into();
        assert_eq!(
            generate_logical_layers(&physical, &roles),
            Err(GenerateError::NoServers)
        );
        let mut physical = Layer::new(LayerId::Physical);
        physical.add_vertex("vs1");
        let roles: BTreeMap<_, _> = [(EntityId::from("vs1"), VertexRole::VideoServer)].into();
        assert_eq!(
            generate_logical_layers(&physical, &roles),
            Err(GenerateError::NoSubscribers)
        );
    }

    #[test]
    fn counterpart_lookup() {
        let g = small_world();
        let a1 = VertexId::new("a1", LayerId::Physical);
        let up = counterpart(&g, &a1, LayerId::Logical).unwrap();
        assert_eq!(up, Some(VertexId::new("a1", LayerId::Logical)));
        assert_eq!(
            counterpart(&g, &up.unwrap(), LayerId::Physical).unwrap(),
            Some(a1.clone())
        );
        let x1 = VertexId::new("x1", LayerId::Physical);
        assert_eq!(counterpart(&g, &x1, LayerId::Logical).unwrap(), None);
        assert_eq!(
            counterpart(&g, &a1, LayerId::Service),
            Err(CounterpartError::NonAdjacentLayer {
                from: LayerId::Physical,
                to: LayerId::Service
            })
        );
    }

    #[test]
    fn super_source_edges_are_one_way() {
        let mut layer = Layer::new(LayerId::Physical);
        let s = EntityId::super_source("d1");
        layer.add_vertex(s.clone());
        layer.add_vertex("vs1");
        layer.insert_edge(LinkKey::new(s.clone(), "vs1"), EdgeAttrs::uncapacitated());
        assert!(layer.has_arc(&s, &"vs1".into()));
        assert!(!layer.has_arc(&"vs1".into(), &s));
        let adj = layer.out_neighbors();
        assert!(adj[&EntityId::from("vs1")].is_empty());
    }
}
