//! Single-commodity min-cost flow by successive shortest paths, used as an
//! independent reference for the LP-based synthesis.

use std::collections::BTreeMap;

use vodnet::demand::Commodity;
use vodnet::mlg::{EntityId, Layer, VertexRole};

struct Edge {
    to: usize,
    cap: f64,
    cost: f64,
}

/// Cheapest way to ship `commodity.volume` from any candidate source to the
/// destination over `layer`, honoring subscriber transit rules. `None` when
/// the volume cannot be shipped.
pub fn min_cost(layer: &Layer, roles: &BTreeMap<EntityId, VertexRole>, commodity: &Commodity) -> Option<f64> {
    let names: Vec<&EntityId> = layer.vertices.iter().collect();
    let index: BTreeMap<&EntityId, usize> = names.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let src = names.len();
    let n = src + 1;
    let mut edges: Vec<Edge> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let push = |edges: &mut Vec<Edge>, adj: &mut Vec<Vec<usize>>, u: usize, v: usize, cap: f64, cost: f64| {
        adj[u].push(edges.len());
        edges.push(Edge { to: v, cap, cost });
        adj[v].push(edges.len());
        edges.push(Edge { to: u, cap: 0.0, cost: -cost });
    };
    let sub = |v: &EntityId| roles.get(v) == Some(&VertexRole::Subscriber);
    for (key, attrs) in &layer.edges {
        for (from, to) in [(&key.a, &key.b), (&key.b, &key.a)] {
            if sub(from) || (sub(to) && *to != commodity.destination) {
                continue;
            }
            let cap = attrs.capacity.unwrap_or(f64::INFINITY);
            push(&mut edges, &mut adj, index[from], index[to], cap, attrs.weight);
        }
    }
    for s in &commodity.candidate_sources {
        push(&mut edges, &mut adj, src, index[s], f64::INFINITY, 0.0);
    }
    let sink = index[&commodity.destination];

    let mut remaining = commodity.volume;
    let mut total = 0.0;
    while remaining > 1e-9 {
        // Bellman-Ford; residual costs may be negative.
        let mut dist = vec![f64::INFINITY; n];
        let mut prev: Vec<Option<usize>> = vec![None; n];
        dist[src] = 0.0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if dist[u].is_infinite() {
                    continue;
                }
                for &e in &adj[u] {
                    let edge = &edges[e];
                    if edge.cap > 1e-12 && dist[u] + edge.cost < dist[edge.to] - 1e-12 {
                        dist[edge.to] = dist[u] + edge.cost;
                        prev[edge.to] = Some(e);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[sink].is_infinite() {
            return None;
        }
        let mut push_amount = remaining;
        let mut v = sink;
        while let Some(e) = prev[v] {
            push_amount = push_amount.min(edges[e].cap);
            v = edges[e ^ 1].to;
        }
        let mut v = sink;
        while let Some(e) = prev[v] {
            edges[e].cap -= push_amount;
            edges[e ^ 1].cap += push_amount;
            v = edges[e ^ 1].to;
        }
        total += push_amount * dist[sink];
        remaining -= push_amount;
    }
    Some(total)
}
