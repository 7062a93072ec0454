#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vodnet::demand::{augment_all, Commodity, CommodityId};
use vodnet::mlg::{build_graph, canonical_spec, EntityId, Layer, MultiLayerGraph, PhysicalLink, VertexRole};

pub mod direct;
pub mod mutate;
pub mod ssp;
pub mod worked;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub entities: Vec<(EntityId, VertexRole)>,
    pub links: Vec<PhysicalLink>,
    pub commodities: Vec<Commodity>,
}

impl Instance {
    pub fn graph(&self) -> MultiLayerGraph {
        build_graph(&canonical_spec(&self.entities, &self.links).expect("spec")).expect("graph")
    }

    pub fn roles(&self) -> BTreeMap<EntityId, VertexRole> {
        self.entities.iter().cloned().collect()
    }

    pub fn augmented(&self) -> Layer {
        augment_all(self.graph().physical(), &self.commodities).expect("augment")
    }
}

pub fn link(a: &str, b: &str, capacity: f64) -> PhysicalLink {
    PhysicalLink {
        a: a.into(),
        b: b.into(),
        capacity,
        weight: None,
    }
}

pub fn commodity(id: &str, sources: &[&str], destination: &str, volume: f64) -> Commodity {
    Commodity {
        id: CommodityId::new(id),
        candidate_sources: sources.iter().map(|s| EntityId::new(*s)).collect(),
        destination: destination.into(),
        volume,
    }
}

fn role_prefix(role: VertexRole) -> &'static str {
    match role {
        VertexRole::VideoServer => "vs",
        VertexRole::Subscriber => "a",
        VertexRole::AccessNode => "na",
        VertexRole::Intermediate => "r",
        VertexRole::ServiceHub => "h",
    }
}

fn name_entities(roles: &[VertexRole]) -> Vec<(EntityId, VertexRole)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    roles
        .iter()
        .map(|&r| {
            let p = role_prefix(r);
            let n = counts.entry(p).or_default();
            *n += 1;
            (EntityId::new(format!("{p}{n}")), r)
        })
        .collect()
}

/// Random spanning tree over `n` nodes plus extra distinct links up to
/// `total`, with integer capacities drawn from `caps`.
fn random_links(
    rng: &mut ChaCha8Rng,
    names: &[EntityId],
    total: usize,
    caps: std::ops::RangeInclusive<u32>,
) -> Vec<PhysicalLink> {
    let n = names.len();
    let mut pairs = BTreeSet::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let j = order[rng.gen_range(0..i)];
        let k = order[i];
        pairs.insert((j.min(k), j.max(k)));
    }
    let max_pairs = n * (n - 1) / 2;
    while pairs.len() < total.min(max_pairs) {
        let j = rng.gen_range(0..n);
        let k = rng.gen_range(0..n);
        if j != k {
            pairs.insert((j.min(k), j.max(k)));
        }
    }
    pairs
        .into_iter()
        .map(|(j, k)| PhysicalLink {
            a: names[j].clone(),
            b: names[k].clone(),
            capacity: rng.gen_range(caps.clone()) as f64,
            weight: None,
        })
        .collect()
}

fn random_commodities(
    rng: &mut ChaCha8Rng,
    entities: &[(EntityId, VertexRole)],
    count: usize,
    rates: std::ops::RangeInclusive<u32>,
    max_sources: usize,
) -> Vec<Commodity> {
    let of = |role| -> Vec<EntityId> {
        entities
            .iter()
            .filter(|(_, r)| *r == role)
            .map(|(e, _)| e.clone())
            .collect()
    };
    let servers = of(VertexRole::VideoServer);
    let subscribers = of(VertexRole::Subscriber);
    (0..count)
        .map(|i| {
            let k = rng.gen_range(1..=servers.len().min(max_sources));
            Commodity {
                id: CommodityId::new(format!("d{}", i + 1)),
                candidate_sources: servers.choose_multiple(rng, k).cloned().collect(),
                destination: subscribers.choose(rng).expect("subscriber").clone(),
                volume: rng.gen_range(rates.clone()) as f64,
            }
        })
        .collect()
}

/// At most 6 nodes, 8 links and 3 commodities; rates 1..=10, capacities 1..=20.
pub fn small_instance(rng: &mut ChaCha8Rng) -> Instance {
    use VertexRole::*;
    let n = rng.gen_range(3..=6);
    let mut roles = vec![VideoServer, Subscriber];
    for _ in 2..n {
        roles.push(*[VideoServer, Subscriber, AccessNode, Intermediate].choose(rng).unwrap());
    }
    let entities = name_entities(&roles);
    let names: Vec<EntityId> = entities.iter().map(|(e, _)| e.clone()).collect();
    let total = rng.gen_range(n - 1..=8);
    let links = random_links(rng, &names, total, 1..=20);
    let k = rng.gen_range(1..=3);
    let commodities = random_commodities(rng, &entities, k, 1..=10, 3);
    Instance {
        entities,
        links,
        commodities,
    }
}

/// 50 nodes, 200 links, 30 commodities.
pub fn desk_instance(seed: u64) -> Instance {
    use VertexRole::*;
    let mut rng = rng(seed);
    let mut roles = Vec::new();
    roles.extend(std::iter::repeat_n(VideoServer, 5));
    roles.extend(std::iter::repeat_n(AccessNode, 10));
    roles.extend(std::iter::repeat_n(Intermediate, 20));
    roles.extend(std::iter::repeat_n(Subscriber, 15));
    let entities = name_entities(&roles);
    let names: Vec<EntityId> = entities.iter().map(|(e, _)| e.clone()).collect();
    let links = random_links(&mut rng, &names, 200, 20..=60);
    let commodities = random_commodities(&mut rng, &entities, 30, 1..=10, 2);
    Instance {
        entities,
        links,
        commodities,
    }
}

/// Canonical-graph material for structure checks: 4 to 10 nodes with at
/// least one server and two subscribers, connected.
pub fn structure_instance(rng: &mut ChaCha8Rng) -> Instance {
    use VertexRole::*;
    let n = rng.gen_range(4..=10);
    let mut roles = vec![VideoServer, Subscriber, Subscriber];
    for _ in 3..n {
        roles.push(*[VideoServer, Subscriber, AccessNode, Intermediate].choose(rng).unwrap());
    }
    let entities = name_entities(&roles);
    let names: Vec<EntityId> = entities.iter().map(|(e, _)| e.clone()).collect();
    let total = rng.gen_range(n - 1..=2 * n);
    let links = random_links(rng, &names, total, 1..=20);
    Instance {
        entities,
        links,
        commodities: Vec::new(),
    }
}
