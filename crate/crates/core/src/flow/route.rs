use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::mlg::{counterpart, EntityId, LayerId, LinkKey, MultiLayerGraph, VertexId};

#[derive(Debug, Error, PartialEq)]
pub enum RouteError {
    #[error("layer-2 edge {0} has no physical segment")]
    UnmappedEdge(LinkKey),
    #[error("segments do not meet at the counterpart of {at}")]
    DiscontinuousMapping { at: EntityId },
    #[error("expanded route visits {0} twice")]
    LoopingExpansion(EntityId),
    #[error("{0} is not an edge of layer 2")]
    NotALogicalEdge(LinkKey),
    #[error("segment for {edge} is not a simple physical path: {reason}")]
    InvalidSegment { edge: LinkKey, reason: String },
    #[error("a route needs at least two vertices")]
    EmptyRoute,
}

/// Physical path realizing each layer-2 edge.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RouteMapping {
    segments: BTreeMap<LinkKey, Vec<EntityId>>,
}

impl RouteMapping {
    /// Checks every segment: the edge exists on layer 2, the path is simple
    /// and connected on layer 1, and its ends are the physical counterparts
    /// of the edge's ends.
    pub fn new(
        g: &MultiLayerGraph,
        segments: impl IntoIterator<Item = (LinkKey, Vec<EntityId>)>,
    ) -> Result<Self, RouteError> {
        let segments: BTreeMap<_, _> = segments.into_iter().collect();
        let logical = g.layer(LayerId::Logical);
        let physical = g.physical();
        for (edge, path) in &segments {
            if !logical.edges.contains_key(edge) {
                return Err(RouteError::NotALogicalEdge(edge.clone()));
            }
            let invalid = |reason: &str| RouteError::InvalidSegment {
                edge: edge.clone(),
                reason: reason.to_string(),
            };
            if path.is_empty() {
                return Err(invalid("empty path"));
            }
            let distinct: BTreeSet<_> = path.iter().collect();
            if distinct.len() != path.len() {
                return Err(invalid("repeats a vertex"));
            }
            if path.iter().any(|v| !physical.contains(v)) {
                return Err(invalid("leaves layer 1"));
            }
            if path.windows(2).any(|w| physical.edge(&w[0], &w[1]).is_none()) {
                return Err(invalid("consecutive vertices are not adjacent"));
            }
            orient(g, edge, &edge.a, &edge.b, path)?;
        }
        Ok(Self { segments })
    }

    /// Builds a mapping without any check.
    pub fn from_raw(segments: impl IntoIterator<Item = (LinkKey, Vec<EntityId>)>) -> Self {
        Self {
            segments: segments.into_iter().collect(),
        }
    }

    pub fn segment(&self, edge: &LinkKey) -> Option<&[EntityId]> {
        self.segments.get(edge).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

fn physical_of(g: &MultiLayerGraph, v: &EntityId) -> Result<EntityId, RouteError> {
    counterpart(g, &VertexId::new(v.clone(), LayerId::Logical), LayerId::Physical)
        .ok()
        .flatten()
        .map(|w| w.entity)
        .ok_or_else(|| RouteError::DiscontinuousMapping { at: v.clone() })
}

/// The segment for `edge`, oriented to run from `from` to `to`.
fn orient(
    g: &MultiLayerGraph,
    edge: &LinkKey,
    from: &EntityId,
    to: &EntityId,
    path: &[EntityId],
) -> Result<Vec<EntityId>, RouteError> {
    let start = physical_of(g, from)?;
    let end = physical_of(g, to)?;
    let (first, last) = match (path.first(), path.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(RouteError::UnmappedEdge(edge.clone())),
    };
    if first == &start && last == &end {
        Ok(path.to_vec())
    } else if first == &end && last == &start {
        Ok(path.iter().rev().cloned().collect())
    } else if first != &start && first != &end {
        Err(RouteError::DiscontinuousMapping { at: from.clone() })
    } else {
        Err(RouteError::DiscontinuousMapping { at: to.clone() })
    }
}

/// Expands a layer-2 route into the physical path that carries it.
pub fn map_route_down(
    g: &MultiLayerGraph,
    route: &[EntityId],
    mapping: &RouteMapping,
) -> Result<Vec<EntityId>, RouteError> {
    if route.len() < 2 {
        return Err(RouteError::EmptyRoute);
    }
    let mut out: Vec<EntityId> = Vec::new();
    for hop in route.windows(2) {
        let edge = LinkKey::new(hop[0].clone(), hop[1].clone());
        let path = mapping
            .segment(&edge)
            .ok_or_else(|| RouteError::UnmappedEdge(edge.clone()))?;
        let segment = orient(g, &edge, &hop[0], &hop[1], path)?;
        match out.last() {
            None => out.extend(segment),
            Some(junction) => {
                if segment.first() != Some(junction) {
                    return Err(RouteError::DiscontinuousMapping { at: hop[0].clone() });
                }
                out.extend(segment.into_iter().skip(1));
            }
        }
    }
    let mut seen = BTreeSet::new();
    for v in &out {
        if !seen.insert(v) {
            return Err(RouteError::LoopingExpansion(v.clone()));
        }
    }
    Ok(out)
}
