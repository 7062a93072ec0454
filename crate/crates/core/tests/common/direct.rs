//! Routing LP written directly on the physical layer: the single candidate
//! server supplies the volume itself, with no super-source and no
//! installation variables.

use std::collections::BTreeMap;

use vodnet::demand::Commodity;
use vodnet::lp::{self, LinearProgram, LpStatus, Sense, SimplexOptions};
use vodnet::mlg::{EntityId, Layer, VertexRole};

/// Optimal weighted flow, or `None` when infeasible. Every commodity must
/// have exactly one candidate source.
pub fn optimum(layer: &Layer, roles: &BTreeMap<EntityId, VertexRole>, commodities: &[Commodity]) -> Option<f64> {
    let mut prog = LinearProgram::new();
    let sub = |v: &EntityId| roles.get(v) == Some(&VertexRole::Subscriber);
    let mut per_link: BTreeMap<_, Vec<_>> = BTreeMap::new();
    for c in commodities {
        assert_eq!(c.candidate_sources.len(), 1);
        let source = c.candidate_sources.iter().next().unwrap();
        let mut rows: BTreeMap<&EntityId, Vec<_>> = layer.vertices.iter().map(|v| (v, Vec::new())).collect();
        for (key, attrs) in &layer.edges {
            for (from, to) in [(&key.a, &key.b), (&key.b, &key.a)] {
                if sub(from) || (sub(to) && *to != c.destination) {
                    continue;
                }
                let v = prog.add_var(format!("{}:{from}>{to}", c.id), 0.0, f64::INFINITY, attrs.weight);
                rows.get_mut(from).unwrap().push((v, 1.0));
                rows.get_mut(to).unwrap().push((v, -1.0));
                per_link.entry(key.clone()).or_default().push((v, 1.0));
            }
        }
        for (node, coeffs) in rows {
            let rhs = if node == source {
                c.volume
            } else if *node == c.destination {
                -c.volume
            } else {
                0.0
            };
            prog.add_constraint(format!("{}:{node}", c.id), coeffs, Sense::Eq, rhs);
        }
    }
    for (key, coeffs) in per_link {
        let cap = layer.edges[&key].capacity.unwrap();
        prog.add_constraint(format!("cap {key}"), coeffs, Sense::Le, cap);
    }
    let sol = lp::solve(&prog, &SimplexOptions::default()).unwrap();
    (sol.status == LpStatus::Optimal).then_some(sol.objective)
}
