use std::collections::{BTreeMap, BTreeSet};

use super::{EntityId, LayerId, MultiLayerGraph, VertexId, VertexRole};
use crate::validation::{ValidationReport, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureOptions {
    /// Require layer 1 to form a single connected component.
    pub require_connected_physical: bool,
}

impl Default for StructureOptions {
    fn default() -> Self {
        Self {
            require_connected_physical: true,
        }
    }
}

/// Checks every multi-layer graph invariant and lists what is broken.
pub fn validate_structure(g: &MultiLayerGraph) -> ValidationReport {
    validate_structure_with(g, &StructureOptions::default())
}

pub fn validate_structure_with(g: &MultiLayerGraph, options: &StructureOptions) -> ValidationReport {
    let mut report = ValidationReport::new();
    check_roles(g, &mut report);
    check_edges(g, &mut report);
    check_star(g, &mut report);
    check_logical(g, &mut report);
    check_counterparts(g, &mut report);
    if options.require_connected_physical {
        let components = g.physical().component_count();
        if components > 1 {
            report.push(Violation::Disconnected {
                layer: LayerId::Physical,
                components,
            });
        }
    }
    report
}

fn check_roles(g: &MultiLayerGraph, report: &mut ValidationReport) {
    let mut per_entity: BTreeMap<&EntityId, BTreeSet<VertexRole>> = BTreeMap::new();
    for layer in g.layers() {
        for entity in &layer.vertices {
            let vertex = VertexId::new(entity.clone(), layer.id);
            match g.role(&vertex) {
                None => report.push(Violation::MissingRole { vertex }),
                Some(role) => {
                    per_entity.entry(entity).or_default().insert(role);
                    if !role.allowed_on(layer.id) {
                        report.push(Violation::MisplacedVertex { vertex, role });
                    }
                }
            }
        }
    }
    let mut hubs = Vec::new();
    for (entity, roles) in per_entity {
        if roles.len() > 1 {
            report.push(Violation::RoleOverlap {
                entity: entity.clone(),
                roles: roles.iter().copied().collect(),
            });
        }
        if roles.contains(&VertexRole::ServiceHub) {
            hubs.push(entity.clone());
        }
    }
    if hubs.len() > 1 {
        report.push(Violation::MultipleHubs { hubs });
    }
}

fn check_edges(g: &MultiLayerGraph, report: &mut ValidationReport) {
    for layer in g.layers() {
        for (key, attrs) in &layer.edges {
            if key.is_self_loop() {
                report.push(Violation::SelfLoop {
                    layer: layer.id,
                    entity: key.a.clone(),
                });
            }
            for end in [&key.a, &key.b] {
                if !layer.contains(end) {
                    report.push(Violation::EdgeEndpointMissing {
                        layer: layer.id,
                        a: key.a.clone(),
                        b: key.b.clone(),
                        missing: end.clone(),
                    });
                }
            }
            match (layer.id, attrs.capacity) {
                (LayerId::Physical, Some(c)) if c.is_finite() && c > 0.0 => {}
                (LayerId::Physical, capacity) => report.push(Violation::NonPositiveCapacity {
                    layer: layer.id,
                    a: key.a.clone(),
                    b: key.b.clone(),
                    capacity,
                }),
                (_, Some(_)) => report.push(Violation::UnexpectedCapacity {
                    layer: layer.id,
                    a: key.a.clone(),
                    b: key.b.clone(),
                }),
                (_, None) => {}
            }
        }
    }
}

fn role_on(g: &MultiLayerGraph, entity: &EntityId, layer: LayerId) -> Option<VertexRole> {
    g.role(&VertexId::new(entity.clone(), layer))
}

fn check_star(g: &MultiLayerGraph, report: &mut ValidationReport) {
    let service = g.layer(LayerId::Service);
    let is = |e: &EntityId, r: VertexRole| role_on(g, e, LayerId::Service) == Some(r);
    let mut subscribers = 0;
    let mut hub_present = false;
    for v in &service.vertices {
        if is(v, VertexRole::Subscriber) {
            subscribers += 1;
            let degree = service.degree(v);
            if degree != 1 {
                report.push(Violation::StarDegree {
                    entity: v.clone(),
                    degree,
                });
            }
        } else if is(v, VertexRole::ServiceHub) {
            hub_present = true;
        }
    }
    if subscribers > 0 && !hub_present {
        report.push(Violation::MissingHub);
    }
    for key in service.edges.keys() {
        let hub_sub = (is(&key.a, VertexRole::ServiceHub) && is(&key.b, VertexRole::Subscriber))
            || (is(&key.b, VertexRole::ServiceHub) && is(&key.a, VertexRole::Subscriber));
        if !hub_sub && !key.is_self_loop() {
            report.push(Violation::BrokenStar {
                a: key.a.clone(),
                b: key.b.clone(),
            });
        }
    }
}

fn check_logical(g: &MultiLayerGraph, report: &mut ValidationReport) {
    let logical = g.layer(LayerId::Logical);
    for key in logical.edges.keys() {
        let sub = |e: &EntityId| role_on(g, e, LayerId::Logical) == Some(VertexRole::Subscriber);
        if !key.is_self_loop() && sub(&key.a) && sub(&key.b) {
            report.push(Violation::SubscriberAdjacency {
                a: key.a.clone(),
                b: key.b.clone(),
            });
        }
    }
}

fn check_counterparts(g: &MultiLayerGraph, report: &mut ValidationReport) {
    let mut present: BTreeSet<(&EntityId, LayerId, LayerId)> = BTreeSet::new();
    for edge in g.counterparts() {
        let reason = if !edge.lower.layer.is_adjacent(edge.upper.layer) {
            Some("layers are not adjacent")
        } else if edge.lower.layer > edge.upper.layer {
            Some("lower end sits above the upper end")
        } else if edge.lower.entity != edge.upper.entity {
            Some("ends belong to different entities")
        } else if !g.contains(&edge.lower) || !g.contains(&edge.upper) {
            Some("an end is not in the graph")
        } else {
            None
        };
        match reason {
            Some(reason) => report.push(Violation::InvalidCounterpart {
                lower: edge.lower.clone(),
                upper: edge.upper.clone(),
                reason: reason.to_string(),
            }),
            None => {
                present.insert((&edge.lower.entity, edge.lower.layer, edge.upper.layer));
            }
        }
    }
    for pair in LayerId::ALL.windows(2) {
        let (lower, upper) = (pair[0], pair[1]);
        for entity in g
            .layer(lower)
            .vertices
            .intersection(&g.layer(upper).vertices)
        {
            if !present.contains(&(entity, lower, upper)) {
                report.push(Violation::MissingCounterpart {
                    entity: entity.clone(),
                    lower,
                    upper,
                });
            }
        }
    }
}
