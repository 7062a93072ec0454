//! Subscriber requests, the content catalog, and the commodities routed by
//! the synthesis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mlg::{EdgeAttrs, EntityId, Layer, LayerId, LinkKey, VertexId, VertexRole};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContentId(String);

impl ContentId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ContentId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

impl fmt::Display for ContentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CommodityId(String);

impl CommodityId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for CommodityId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

impl fmt::Display for CommodityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DemandError {
    #[error("content {0} is not in the catalog")]
    UnknownContent(ContentId),
    #[error("{0} is not a subscriber")]
    UnknownSubscriber(EntityId),
    #[error("catalog entry {content} lists {server}, which is not a video server")]
    NotAServer { content: ContentId, server: EntityId },
    #[error("catalog entry {0} lists no server")]
    EmptyHostSet(ContentId),
    #[error("request rate must be finite and positive, got {0}")]
    NonPositiveRate(f64),
    #[error("commodity id {0} is used twice")]
    DuplicateCommodity(CommodityId),
    #[error("candidate source {0} is not on the physical layer")]
    SourceNotOnLayer1(EntityId),
}

/// Content id to the set of servers hosting it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    entries: BTreeMap<ContentId, BTreeSet<EntityId>>,
}

impl Catalog {
    pub fn new(
        entries: BTreeMap<ContentId, BTreeSet<EntityId>>,
        roles: &BTreeMap<EntityId, VertexRole>,
    ) -> Result<Self, DemandError> {
        for (content, servers) in &entries {
            if servers.is_empty() {
                return Err(DemandError::EmptyHostSet(content.clone()));
            }
            if let Some(bad) = servers
                .iter()
                .find(|s| roles.get(*s) != Some(&VertexRole::VideoServer))
            {
                return Err(DemandError::NotAServer {
                    content: content.clone(),
                    server: bad.clone(),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn hosts(&self, content: &ContentId) -> Option<&BTreeSet<EntityId>> {
        self.entries.get(content)
    }

    pub fn entries(&self) -> &BTreeMap<ContentId, BTreeSet<EntityId>> {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: Option<CommodityId>,
    pub subscriber: EntityId,
    pub content: ContentId,
    pub rate: f64,
}

impl Request {
    pub fn new(
        subscriber: impl Into<EntityId>,
        content: impl Into<ContentId>,
        rate: f64,
    ) -> Result<Self, DemandError> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(DemandError::NonPositiveRate(rate));
        }
        Ok(Self {
            id: None,
            subscriber: subscriber.into(),
            content: content.into(),
            rate,
        })
    }

    pub fn with_id(mut self, id: impl Into<CommodityId>) -> Self {
        self.id = Some(id.into());
        self
    }
}

impl From<String> for ContentId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

impl From<String> for CommodityId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

/// One routable demand. The synthesis picks how much each candidate source
/// contributes, so a commodity may be served by several servers at once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Commodity {
    pub id: CommodityId,
    pub candidate_sources: BTreeSet<EntityId>,
    pub destination: EntityId,
    pub volume: f64,
}

impl Commodity {
    pub fn super_source(&self) -> EntityId {
        EntityId::super_source(self.id.as_str())
    }
}

/// One commodity per request, in request order. Requests without an id are
/// named `d1`, `d2`, ... by position.
pub fn build_commodities(
    requests: &[Request],
    catalog: &Catalog,
    roles: &BTreeMap<EntityId, VertexRole>,
) -> Result<Vec<Commodity>, DemandError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(requests.len());
    for (i, req) in requests.iter().enumerate() {
        if roles.get(&req.subscriber) != Some(&VertexRole::Subscriber) {
            return Err(DemandError::UnknownSubscriber(req.subscriber.clone()));
        }
        if !(req.rate.is_finite() && req.rate > 0.0) {
            return Err(DemandError::NonPositiveRate(req.rate));
        }
        let hosts = catalog
            .hosts(&req.content)
            .ok_or_else(|| DemandError::UnknownContent(req.content.clone()))?;
        let id = req
            .id
            .clone()
            .unwrap_or_else(|| CommodityId::new(format!("d{}", i + 1)));
        if !seen.insert(id.clone()) {
            return Err(DemandError::DuplicateCommodity(id));
        }
        out.push(Commodity {
            id,
            candidate_sources: hosts.clone(),
            destination: req.subscriber.clone(),
            volume: req.rate,
        });
    }
    Ok(out)
}

/// Copy of `g1` with a super-source for `commodity`, joined by one
/// zero-weight uncapacitated arc to each candidate source.
pub fn augment_super_source(
    g1: &Layer,
    commodity: &Commodity,
) -> Result<(Layer, VertexId), DemandError> {
    let mut layer = g1.clone();
    let source = attach(&mut layer, commodity)?;
    Ok((layer, VertexId::new(source, LayerId::Physical)))
}

/// Attaches the super-source of every commodity.
pub fn augment_all(g1: &Layer, commodities: &[Commodity]) -> Result<Layer, DemandError> {
    let mut layer = g1.clone();
    for c in commodities {
        attach(&mut layer, c)?;
    }
    Ok(layer)
}

fn attach(layer: &mut Layer, commodity: &Commodity) -> Result<EntityId, DemandError> {
    if let Some(missing) = commodity
        .candidate_sources
        .iter()
        .find(|s| !layer.contains(s))
    {
        return Err(DemandError::SourceNotOnLayer1(missing.clone()));
    }
    let source = commodity.super_source();
    layer.add_vertex(source.clone());
    for server in &commodity.candidate_sources {
        layer.insert_edge(
            LinkKey::new(source.clone(), server.clone()),
            EdgeAttrs {
                capacity: None,
                weight: 0.0,
            },
        );
    }
    Ok(source)
}
