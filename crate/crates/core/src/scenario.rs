//! Scenario files: a strict JSON document describing entities, physical
//! links, the content catalog, requests and solver options.
//!
//! ```json
//! {
//!   "entities": [{"id": "vs1", "role": "video_server"}, {"id": "a1", "role": "subscriber"}],
//!   "links": [{"a": "vs1", "b": "a1", "capacity": 10}],
//!   "catalog": [{"content": "film", "servers": ["vs1"]}],
//!   "requests": [{"subscriber": "a1", "content": "film", "rate": 4}],
//!   "options": {"max_nodes": 1000}
//! }
//! ```
//!
//! Two optional keys serve the `validate` command: `overlay` replaces the
//! generated layers 2 and 3 with explicit edge lists, and `flows` supplies
//! path flows to check.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::error::Category;
use thiserror::Error;

use crate::demand::{build_commodities, Catalog, Commodity, CommodityId, ContentId, Request};
use crate::flow::{aggregate, PathFlow};
use crate::lp::Pricing;
use crate::mlg::{
    assemble_spec, build_graph, canonical_spec, generate_logical_layers, EdgeAttrs, EdgeSpec,
    EntityId, Layer, LayerId, LinkKey, MultiLayerGraph, PhysicalLink, VertexRole,
};
use crate::synthesis::SynthesisOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub entities: Vec<EntityEntry>,
    pub links: Vec<LinkEntry>,
    pub catalog: Vec<CatalogEntry>,
    pub requests: Vec<RequestEntry>,
    #[serde(default)]
    pub options: OptionsEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlay: Option<Overlay>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flows: Option<Vec<FlowEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityEntry {
    pub id: String,
    pub role: VertexRole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkEntry {
    pub a: String,
    pub b: String,
    pub capacity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub content: String,
    pub servers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub subscriber: String,
    pub content: String,
    pub rate: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_pivots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pricing: Option<Pricing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_up_heuristic: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_link_limit: Option<usize>,
}

/// Explicit edges of layers 2 and 3. A missing list is generated.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overlay {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logical: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub service: Option<Vec<[String; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowEntry {
    pub commodity: String,
    pub path: Vec<String>,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown field `{field}` at {path} (line {line}, column {column})")]
    UnknownField {
        path: String,
        field: String,
        line: usize,
        column: usize,
    },
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
}

impl ScenarioError {
    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            Self::Syntax { .. } => None,
            Self::UnknownField { path, .. } | Self::Schema { path, .. } => Some(path),
        }
    }
}

/// A parsed scenario whose graph, catalog and requests passed their
/// construction checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub graph: MultiLayerGraph,
    pub catalog: Catalog,
    pub requests: Vec<Request>,
    pub commodities: Vec<Commodity>,
    pub options: SynthesisOptions,
    pub flows: Option<Vec<PathFlow>>,
}

impl Scenario {
    pub fn roles(&self) -> BTreeMap<EntityId, VertexRole> {
        self.graph.entity_roles()
    }
}

impl ScenarioFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = match serde_path_to_error::deserialize(&mut de) {
        Ok(file) => file,
        Err(err) => return Err(classify(err)),
    };
    de.end().map_err(|e| ScenarioError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Scenario::from_file(file)
}

fn classify(err: serde_path_to_error::Error<serde_json::Error>) -> ScenarioError {
    let path = err.path().to_string();
    let inner = err.inner();
    let (line, column) = (inner.line(), inner.column());
    match inner.classify() {
        Category::Syntax | Category::Eof | Category::Io => ScenarioError::Syntax {
            line,
            column,
            message: inner.to_string(),
        },
        Category::Data => {
            let message = inner.to_string();
            if let Some(field) = unknown_field_name(&message) {
                ScenarioError::UnknownField {
                    path,
                    field,
                    line,
                    column,
                }
            } else {
                ScenarioError::schema(path, message)
            }
        }
    }
}

fn unknown_field_name(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

impl Scenario {
    /// Checks `file` and builds the graph, catalog and commodities from it.
    pub fn from_file(file: ScenarioFile) -> Result<Self, ScenarioError> {
        let mut roles: BTreeMap<EntityId, VertexRole> = BTreeMap::new();
        let mut entities = Vec::new();
        for (i, e) in file.entities.iter().enumerate() {
            let at = format!("entities[{i}].id");
            if e.id.is_empty() {
                return Err(ScenarioError::schema(at, "entity id is empty"));
            }
            let id = EntityId::new(e.id.as_str());
            if id.is_synthetic() {
                return Err(ScenarioError::schema(at, format!("`{}` uses the reserved '@' prefix", e.id)));
            }
            if !e.role.allowed_on(LayerId::Physical) {
                return Err(ScenarioError::schema(
                    format!("entities[{i}].role"),
                    format!("role {} is not a physical role", e.role.as_str()),
                ));
            }
            if roles.insert(id.clone(), e.role).is_some() {
                return Err(ScenarioError::schema(at, format!("entity `{}` is declared twice", e.id)));
            }
            entities.push((id, e.role));
        }
        let known = |path: String, id: &str| -> Result<EntityId, ScenarioError> {
            let id = EntityId::new(id);
            if roles.contains_key(&id) {
                Ok(id)
            } else {
                Err(ScenarioError::schema(path, format!("unknown entity `{id}`")))
            }
        };

        let mut links = Vec::new();
        let mut seen_links = BTreeSet::new();
        for (i, l) in file.links.iter().enumerate() {
            let a = known(format!("links[{i}].a"), &l.a)?;
            let b = known(format!("links[{i}].b"), &l.b)?;
            if a == b {
                return Err(ScenarioError::schema(format!("links[{i}]"), format!("self-loop on `{a}`")));
            }
            if !positive(l.capacity) {
                return Err(ScenarioError::schema(
                    format!("links[{i}].capacity"),
                    format!("capacity must be positive, got {}", l.capacity),
                ));
            }
            if let Some(w) = l.weight {
                if !(w.is_finite() && w >= 0.0) {
                    return Err(ScenarioError::schema(
                        format!("links[{i}].weight"),
                        format!("weight must be finite and non-negative, got {w}"),
                    ));
                }
            }
            if !seen_links.insert(LinkKey::new(a.clone(), b.clone())) {
                return Err(ScenarioError::schema(format!("links[{i}]"), format!("link {a}-{b} is declared twice")));
            }
            links.push(PhysicalLink {
                a,
                b,
                capacity: l.capacity,
                weight: l.weight,
            });
        }

        let mut hosts: BTreeMap<ContentId, BTreeSet<EntityId>> = BTreeMap::new();
        for (i, c) in file.catalog.iter().enumerate() {
            let content = ContentId::new(c.content.as_str());
            if hosts.contains_key(&content) {
                return Err(ScenarioError::schema(
                    format!("catalog[{i}].content"),
                    format!("content `{}` is listed twice", c.content),
                ));
            }
            if c.servers.is_empty() {
                return Err(ScenarioError::schema(format!("catalog[{i}].servers"), "no server hosts this content"));
            }
            let mut servers = BTreeSet::new();
            for (j, s) in c.servers.iter().enumerate() {
                let at = format!("catalog[{i}].servers[{j}]");
                let s = known(at.clone(), s)?;
                if roles[&s] != VertexRole::VideoServer {
                    return Err(ScenarioError::schema(at, format!("`{s}` is not a video server")));
                }
                servers.insert(s);
            }
            hosts.insert(content, servers);
        }
        let catalog = Catalog::new(hosts, &roles).map_err(|e| ScenarioError::schema("catalog", e.to_string()))?;

        let mut requests = Vec::new();
        let mut ids = BTreeSet::new();
        for (i, r) in file.requests.iter().enumerate() {
            let sub = known(format!("requests[{i}].subscriber"), &r.subscriber)?;
            if roles[&sub] != VertexRole::Subscriber {
                return Err(ScenarioError::schema(
                    format!("requests[{i}].subscriber"),
                    format!("`{sub}` is not a subscriber"),
                ));
            }
            if catalog.hosts(&ContentId::new(r.content.as_str())).is_none() {
                return Err(ScenarioError::schema(
                    format!("requests[{i}].content"),
                    format!("content `{}` is not in the catalog", r.content),
                ));
            }
            if !positive(r.rate) {
                return Err(ScenarioError::schema(
                    format!("requests[{i}].rate"),
                    format!("rate must be positive, got {}", r.rate),
                ));
            }
            let id = r.id.clone().unwrap_or_else(|| format!("d{}", i + 1));
            if id.is_empty() || !ids.insert(id.clone()) {
                return Err(ScenarioError::schema(
                    format!("requests[{i}].id"),
                    format!("commodity id `{id}` is empty or used twice"),
                ));
            }
            let req = Request::new(sub, r.content.as_str(), r.rate)
                .map_err(|e| ScenarioError::schema(format!("requests[{i}]"), e.to_string()))?;
            requests.push(req.with_id(id));
        }
        let commodities =
            build_commodities(&requests, &catalog, &roles).map_err(|e| ScenarioError::schema("requests", e.to_string()))?;

        let options = solver_options(&file.options)?;
        let graph = build(&entities, &links, file.overlay.as_ref(), &roles)?;

        let flows = match &file.flows {
            None => None,
            Some(entries) => Some(path_flows(entries, &commodities, graph.physical())?),
        };

        Ok(Self {
            file,
            graph,
            catalog,
            requests,
            commodities,
            options,
            flows,
        })
    }
}

fn solver_options(o: &OptionsEntry) -> Result<SynthesisOptions, ScenarioError> {
    let mut out = SynthesisOptions::default();
    for (name, value) in [
        ("max_pivots", o.max_pivots),
        ("max_nodes", o.max_nodes),
        ("oracle_link_limit", o.oracle_link_limit),
    ] {
        if value == Some(0) {
            return Err(ScenarioError::schema(format!("options.{name}"), "must be at least 1"));
        }
    }
    if let Some(v) = o.max_pivots {
        out.milp.simplex.max_pivots = v;
    }
    if let Some(v) = o.max_nodes {
        out.milp.max_nodes = v;
    }
    if let Some(v) = o.pricing {
        out.milp.simplex.pricing = v;
    }
    if let Some(v) = o.round_up_heuristic {
        out.milp.round_up_heuristic = v;
    }
    if let Some(v) = o.oracle_link_limit {
        out.oracle_link_limit = v;
    }
    Ok(out)
}

fn build(
    entities: &[(EntityId, VertexRole)],
    links: &[PhysicalLink],
    overlay: Option<&Overlay>,
    roles: &BTreeMap<EntityId, VertexRole>,
) -> Result<MultiLayerGraph, ScenarioError> {
    let as_schema = |path: &str| {
        let path = path.to_string();
        move |e: crate::mlg::BuildError| ScenarioError::schema(path.clone(), e.to_string())
    };
    let overlay = match overlay {
        Some(o) if o.logical.is_some() || o.service.is_some() => o,
        _ => {
            let spec = canonical_spec(entities, links).map_err(as_schema("entities"))?;
            return build_graph(&spec).map_err(as_schema("entities"));
        }
    };

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
    let mut physical = Layer::new(LayerId::Physical);
    for (id, _) in entities {
        physical.add_vertex(id.clone());
    }
    for l in links {
        physical.insert_edge(LinkKey::new(l.a.clone(), l.b.clone()), EdgeAttrs::capacitated(l.capacity));
    }
    let (generated_logical, generated_service) =
        generate_logical_layers(&physical, roles).map_err(|e| ScenarioError::schema("entities", e.to_string()))?;

    let explicit = |edges: &[[String; 2]], id: LayerId, key: &str| -> Result<Layer, ScenarioError> {
        let mut layer = Layer::new(id);
        for (i, [a, b]) in edges.iter().enumerate() {
            for (j, end) in [a, b].into_iter().enumerate() {
                let e = EntityId::new(end.as_str());
                if !roles.contains_key(&e) && e != EntityId::service_hub() {
                    return Err(ScenarioError::schema(
                        format!("overlay.{key}[{i}][{j}]"),
                        format!("unknown entity `{end}`"),
                    ));
                }
                layer.add_vertex(e);
            }
            let k = LinkKey::new(a.as_str(), b.as_str());
            if layer.insert_edge(k.clone(), EdgeAttrs::uncapacitated()).is_some() {
                return Err(ScenarioError::schema(
                    format!("overlay.{key}[{i}]"),
                    format!("edge {k} is declared twice"),
                ));
            }
        }
        Ok(layer)
    };
    let logical = match &overlay.logical {
        Some(edges) => explicit(edges, LayerId::Logical, "logical")?,
        None => generated_logical,
    };
    let service = match &overlay.service {
        Some(edges) => explicit(edges, LayerId::Service, "service")?,
        None => generated_service,
    };
    let spec = assemble_spec(entities, physical_edges, &logical, &service);
    build_graph(&spec).map_err(as_schema("overlay"))
}

fn path_flows(
    entries: &[FlowEntry],
    commodities: &[Commodity],
    physical: &Layer,
) -> Result<Vec<PathFlow>, ScenarioError> {
    let ids: BTreeSet<&CommodityId> = commodities.iter().map(|c| &c.id).collect();
    let mut out = Vec::with_capacity(entries.len());
    for (i, f) in entries.iter().enumerate() {
        let commodity = CommodityId::new(f.commodity.as_str());
        if !ids.contains(&commodity) {
            return Err(ScenarioError::schema(
                format!("flows[{i}].commodity"),
                format!("no request has id `{}`", f.commodity),
            ));
        }
        if !(f.amount.is_finite() && f.amount >= 0.0) {
            return Err(ScenarioError::schema(
                format!("flows[{i}].amount"),
                format!("amount must be finite and non-negative, got {}", f.amount),
            ));
        }
        let path: Vec<&str> = f.path.iter().map(String::as_str).collect();
        let pf = PathFlow::new(commodity, &path, f.amount);
        aggregate(physical, std::slice::from_ref(&pf))
            .map_err(|e| ScenarioError::schema(format!("flows[{i}].path"), e.to_string()))?;
        out.push(pf);
    }
    Ok(out)
}
