//! Structural corruptions of a canonical graph, one per violation class.

use rand::seq::IteratorRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vodnet::mlg::{CounterpartEdge, EdgeAttrs, EntityId, LayerId, LinkKey, MultiLayerGraph, VertexId, VertexRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    SubscriberEdge,
    RoleOverlap,
    MissingCounterpart,
    BrokenStar,
    SelfLoop,
    ZeroCapacity,
}

impl Mutation {
    pub const ALL: [Mutation; 6] = [
        Mutation::SubscriberEdge,
        Mutation::RoleOverlap,
        Mutation::MissingCounterpart,
        Mutation::BrokenStar,
        Mutation::SelfLoop,
        Mutation::ZeroCapacity,
    ];

    /// Violation kind the validator must report for this corruption.
    pub fn expected_kind(self) -> &'static str {
        match self {
            Mutation::SubscriberEdge => "subscriber_adjacency",
            Mutation::RoleOverlap => "role_overlap",
            Mutation::MissingCounterpart => "missing_counterpart",
            Mutation::BrokenStar => "broken_star",
            Mutation::SelfLoop => "self_loop",
            Mutation::ZeroCapacity => "non_positive_capacity",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mutation::SubscriberEdge => "subscriber-subscriber logical edge",
            Mutation::RoleOverlap => "role overlap",
            Mutation::MissingCounterpart => "missing counterpart",
            Mutation::BrokenStar => "broken star",
            Mutation::SelfLoop => "self-loop",
            Mutation::ZeroCapacity => "zero capacity",
        }
    }
}

/// Applies `m` to `g`. The graph needs at least two subscribers.
pub fn apply(g: &MultiLayerGraph, m: Mutation, rng: &mut ChaCha8Rng) -> MultiLayerGraph {
    let subscribers = g.entities_with_role(VertexRole::Subscriber);
    assert!(subscribers.len() >= 2, "mutations need two subscribers");
    let (mut layers, mut roles, mut counterparts) = g.clone().into_parts();
    let pick_two = |rng: &mut ChaCha8Rng| {
        let two = subscribers.iter().choose_multiple(rng, 2);
        (two[0].clone(), two[1].clone())
    };
    match m {
        Mutation::SubscriberEdge => {
            let (a, b) = pick_two(rng);
            layers[1].insert_edge(LinkKey::new(a, b), EdgeAttrs::uncapacitated());
        }
        Mutation::RoleOverlap => {
            let v = layers[1].vertices.iter().choose(rng).expect("logical vertex").clone();
            let key = VertexId::new(v, LayerId::Logical);
            let flipped = match roles[&key] {
                VertexRole::Subscriber => VertexRole::VideoServer,
                _ => VertexRole::Subscriber,
            };
            roles.insert(key, flipped);
        }
        Mutation::MissingCounterpart => {
            let e: CounterpartEdge = counterparts.iter().choose(rng).expect("counterpart").clone();
            counterparts.remove(&e);
        }
        Mutation::BrokenStar => {
            let (a, b) = pick_two(rng);
            layers[2].edges.remove(&LinkKey::new(EntityId::service_hub(), a.clone()));
            layers[2].insert_edge(LinkKey::new(a, b), EdgeAttrs::uncapacitated());
        }
        Mutation::SelfLoop => {
            let layer = rng.gen_range(0..3);
            let v = layers[layer].vertices.iter().choose(rng).expect("vertex").clone();
            let attrs = if layer == 0 {
                EdgeAttrs::capacitated(5.0)
            } else {
                EdgeAttrs::uncapacitated()
            };
            layers[layer].insert_edge(LinkKey::new(v.clone(), v), attrs);
        }
        Mutation::ZeroCapacity => {
            let k = layers[0].edges.keys().choose(rng).expect("physical edge").clone();
            layers[0].edges.get_mut(&k).expect("edge").capacity = Some(0.0);
        }
    }
    MultiLayerGraph::from_parts(layers, roles, counterparts)
}
