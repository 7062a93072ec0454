use std::collections::BTreeMap;

use crate::demand::Commodity;
use crate::flow::Arc;
use crate::lp::{LinearProgram, Sense, VarId};
use crate::mlg::{EdgeAttrs, EntityId, Layer, LinkKey, VertexRole};

use super::SynthesisError;

/// Flow of one commodity on one directed arc.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowVar {
    pub var: VarId,
    /// Index into [`NodeLinkProgram::commodities`].
    pub commodity: usize,
    pub arc: Arc,
    /// Index into [`NodeLinkProgram::links`]; `None` for super-source arcs.
    pub link: Option<usize>,
}

/// The node-link program together with the meaning of its variables.
#[derive(Debug, Clone)]
pub struct NodeLinkProgram {
    pub lp: LinearProgram,
    /// Commodities with positive volume, in input order.
    pub commodities: Vec<Commodity>,
    /// Candidate physical links, in key order.
    pub links: Vec<(LinkKey, EdgeAttrs)>,
    /// Installation variable of each link.
    pub install_vars: Vec<VarId>,
    pub flow_vars: Vec<FlowVar>,
    pub balance_rows: usize,
    pub coupling_rows: usize,
}

/// Builds the node-link formulation over the augmented physical layer.
///
/// Per commodity and node, out-flow minus in-flow is the volume at the
/// commodity's super-source, minus the volume at its destination and zero
/// elsewhere. Per link, the flow of all commodities in both directions is at
/// most `capacity * y`. Arcs leaving a subscriber, and arcs entering a
/// subscriber other than the commodity's destination, are fixed at zero.
/// The objective is the weighted flow carried on physical links; super-source
/// arcs cost nothing and have no installation variable.
pub fn build_node_link_program(
    g1_augmented: &Layer,
    roles: &BTreeMap<EntityId, VertexRole>,
    commodities: &[Commodity],
) -> Result<NodeLinkProgram, SynthesisError> {
    if commodities.is_empty() {
        return Err(SynthesisError::NoCommodities);
    }
    let routed: Vec<Commodity> = commodities
        .iter()
        .filter(|c| c.volume > 0.0)
        .cloned()
        .collect();
    for c in &routed {
        let s = c.super_source();
        let attached = g1_augmented.contains(&s)
            && c
                .candidate_sources
                .iter()
                .all(|vs| g1_augmented.has_arc(&s, vs));
        if !attached {
            return Err(SynthesisError::MissingSuperSource(c.id.clone()));
        }
    }

    let links: Vec<(LinkKey, EdgeAttrs)> = g1_augmented
        .edges
        .iter()
        .filter(|(k, _)| !k.a.is_super_source() && !k.b.is_super_source())
        .map(|(k, a)| (k.clone(), *a))
        .collect();
    let nodes: Vec<&EntityId> = g1_augmented
        .vertices
        .iter()
        .filter(|v| !v.is_super_source())
        .collect();
    let is_subscriber = |v: &EntityId| roles.get(v) == Some(&VertexRole::Subscriber);

    let mut lp = LinearProgram::new();
    let install_vars: Vec<VarId> = links
        .iter()
        .map(|(key, _)| lp.add_integer_var(format!("y[{key}]"), 0.0, 1.0, 0.0))
        .collect();

    let mut flow_vars = Vec::new();
    let mut coupling: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); links.len()];
    let mut balance_rows = 0;
    for (k, c) in routed.iter().enumerate() {
        let source = c.super_source();
        let mut balance: BTreeMap<&EntityId, Vec<(VarId, f64)>> =
            nodes.iter().map(|&v| (v, Vec::new())).collect();
        balance.insert(&source, Vec::new());

        for (e, (key, attrs)) in links.iter().enumerate() {
            for (from, to) in [(&key.a, &key.b), (&key.b, &key.a)] {
                let blocked = is_subscriber(from) || (is_subscriber(to) && to != &c.destination);
                let upper = if blocked { 0.0 } else { f64::INFINITY };
                let var = lp.add_var(format!("x[{}:{from}->{to}]", c.id), 0.0, upper, attrs.weight);
                balance.get_mut(from).expect("endpoint is a node").push((var, 1.0));
                balance.get_mut(to).expect("endpoint is a node").push((var, -1.0));
                coupling[e].push((var, 1.0));
                flow_vars.push(FlowVar {
                    var,
                    commodity: k,
                    arc: Arc::new(from.clone(), to.clone()),
                    link: Some(e),
                });
            }
        }
        for server in &c.candidate_sources {
            let attrs = g1_augmented
                .edge(&source, server)
                .expect("checked above");
            let var = lp.add_var(format!("x[{}:{source}->{server}]", c.id), 0.0, f64::INFINITY, attrs.weight);
            balance.get_mut(&source).expect("inserted").push((var, 1.0));
            balance.get_mut(server).expect("server is a node").push((var, -1.0));
            flow_vars.push(FlowVar {
                var,
                commodity: k,
                arc: Arc::new(source.clone(), server.clone()),
                link: None,
            });
        }

        for (node, coeffs) in balance {
            let rhs = if node == &source {
                c.volume
            } else if node == &c.destination {
                -c.volume
            } else {
                0.0
            };
            lp.add_constraint(format!("balance[{}:{node}]", c.id), coeffs, Sense::Eq, rhs);
            balance_rows += 1;
        }
    }

    for (e, (key, attrs)) in links.iter().enumerate() {
        let mut coeffs = std::mem::take(&mut coupling[e]);
        let capacity = attrs.capacity.unwrap_or(f64::INFINITY);
        if !capacity.is_finite() {
            return Err(SynthesisError::UncapacitatedLink(key.clone()));
        }
        coeffs.push((install_vars[e], -capacity));
        lp.add_constraint(format!("capacity[{key}]"), coeffs, Sense::Le, 0.0);
    }

    Ok(NodeLinkProgram {
        lp,
        commodities: routed,
        coupling_rows: links.len(),
        links,
        install_vars,
        flow_vars,
        balance_rows,
    })
}
