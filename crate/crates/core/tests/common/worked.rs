//! The three small worked examples used by the example and acceptance tests.

use vodnet::mlg::VertexRole::{self, *};

use super::{commodity, link, Instance};

fn entities(list: &[(&str, VertexRole)]) -> Vec<(vodnet::mlg::EntityId, VertexRole)> {
    list.iter().map(|(e, r)| ((*e).into(), *r)).collect()
}

/// vs1 reaches na1 through x1 or x2; one request of 4 for a1.
pub fn diamond() -> Instance {
    Instance {
        entities: entities(&[("vs1", VideoServer), ("x1", Intermediate), ("x2", Intermediate), ("na1", AccessNode), ("a1", Subscriber)]),
        links: vec![
            link("vs1", "x1", 10.0),
            link("vs1", "x2", 10.0),
            link("x1", "na1", 10.0),
            link("x2", "na1", 10.0),
            link("na1", "a1", 10.0),
        ],
        commodities: vec![commodity("d1", &["vs1"], "a1", 4.0)],
    }
}

/// vs1 is two hops from a1, vs2 three; both host the content.
pub fn two_server() -> Instance {
    Instance {
        entities: entities(&[
            ("vs1", VideoServer),
            ("vs2", VideoServer),
            ("r1", Intermediate),
            ("na1", AccessNode),
            ("na2", AccessNode),
            ("a1", Subscriber),
        ]),
        links: vec![
            link("vs1", "na1", 10.0),
            link("na1", "a1", 10.0),
            link("vs2", "r1", 10.0),
            link("r1", "na2", 10.0),
            link("na2", "a1", 10.0),
        ],
        commodities: vec![commodity("d1", &["vs1", "vs2"], "a1", 5.0)],
    }
}

/// Two parallel two-hop paths of capacity 6 for a request of 10.
pub fn capacity_split() -> Instance {
    Instance {
        entities: entities(&[("vs1", VideoServer), ("na1", AccessNode), ("na2", AccessNode), ("a1", Subscriber)]),
        links: vec![
            link("vs1", "na1", 6.0),
            link("na1", "a1", 6.0),
            link("vs1", "na2", 6.0),
            link("na2", "a1", 6.0),
        ],
        commodities: vec![commodity("d1", &["vs1"], "a1", 10.0)],
    }
}
