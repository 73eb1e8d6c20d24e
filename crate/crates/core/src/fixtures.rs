//! Example networks with two populations, `hat` (index 0) and `check`
//! (index 1), plus a single-population network with a non-monotone road.
//!
//! | name               | description                                        |
//! |--------------------|----------------------------------------------------|
//! | [`net_a`]          | five roads, one shared road, delay on hat road r2  |
//! | [`net_b`]          | seven roads, shared congestion road r5 with blow-up|
//! | [`net_c`]          | diamond shared by trucks and cars                  |
//! | [`net_c5`]         | diamond plus the zero-cost bridge r5               |
//! | [`net_d`]          | two origins merging on r5                          |
//! | [`net_d6`]         | `net_d` plus a hat-only shortcut r6                |
//! | [`net_p`]          | one population, two parallel roads, `3 - eta`      |
//! | [`net_free_shared`]| two cost-free roads shared by both populations     |

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::costs::CostExpr;
use crate::network::{Network, Population, Road, Route};

pub const HAT: usize = 0;
pub const CHECK: usize = 1;

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 8] = ["net_a", "net_b", "net_c", "net_c5", "net_d", "net_d6", "net_p", "net_free_shared"];

/// Fixture by name; `delta` applies to `net_a` and `net_b` only.
pub fn by_name(name: &str, delta: f64) -> Option<Network> {
    Some(match name {
        "net_a" => net_a(delta),
        "net_b" => net_b(delta),
        "net_c" => net_c(),
        "net_c5" => net_c5(),
        "net_d" => net_d(),
        "net_d6" => net_d6(),
        "net_p" => net_p(),
        "net_free_shared" => net_free_shared(),
        _ => return None,
    })
}

fn ids(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn pop(name: &str, origin: &str, destination: &str, routes: &[&[&str]], costs: Vec<(&str, CostExpr)>) -> Population {
    Population {
        name: name.into(),
        origin: origin.into(),
        destination: destination.into(),
        routes: routes.iter().map(|r| Route::new(r)).collect(),
        costs: costs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<BTreeMap<_, _>>(),
    }
}

fn c(v: f64) -> CostExpr {
    CostExpr::constant(v)
}

/// `c0 + a * eta_hat + b * eta_check`.
fn lin(c0: f64, a: f64, b: f64) -> CostExpr {
    CostExpr::affine(c0, vec![a, b])
}

/// Five roads, routes hat `(r1, r3)`, `(r2)` and check `(r3, r4)`, `(r5)`;
/// `delta` is added to the hat cost of r2.
pub fn net_a(delta: f64) -> Network {
    Network {
        junctions: ids(&["O_hat", "O_check", "D_hat", "D_check"]),
        roads: vec![
            Road::new("r1", "O_hat", "O_check"),
            Road::new("r2", "O_hat", "D_hat"),
            Road::new("r3", "O_check", "D_hat"),
            Road::new("r4", "D_hat", "D_check"),
            Road::new("r5", "O_check", "D_check"),
        ],
        populations: vec![
            pop(
                "hat",
                "O_hat",
                "D_hat",
                &[&["r1", "r3"], &["r2"]],
                vec![("r1", lin(1.0, 1.0, 0.0)), ("r2", lin(3.0 + delta, 1.0, 0.0)), ("r3", lin(1.0, 1.0, 1.0))],
            ),
            pop(
                "check",
                "O_check",
                "D_check",
                &[&["r3", "r4"], &["r5"]],
                vec![("r3", lin(1.0, 1.0, 1.0)), ("r4", lin(1.0, 0.0, 1.0)), ("r5", lin(3.0, 0.0, 1.0))],
            ),
        ],
    }
}

/// Seven roads with the shared road r5 costing `s / (1 - s)`,
/// `s = eta_hat + eta_check`; `delta` is added to the hat highway r1.
pub fn net_b(delta: f64) -> Network {
    let r5 = || CostExpr::congestion(vec![1.0, 1.0], 1.0);
    Network {
        junctions: ids(&["O_hat", "A", "B", "D_hat", "O_check", "D_check"]),
        roads: vec![
            Road::new("r1", "O_hat", "D_hat"),
            Road::new("r2", "O_hat", "A"),
            Road::new("r3", "O_check", "A"),
            Road::new("r4", "O_check", "D_check"),
            Road::new("r5", "A", "B"),
            Road::new("r6", "B", "D_check"),
            Road::new("r7", "B", "D_hat"),
        ],
        populations: vec![
            pop(
                "hat",
                "O_hat",
                "D_hat",
                &[&["r2", "r5", "r7"], &["r1"]],
                vec![("r1", lin(2.0 + delta, 1.0, 0.0)), ("r2", c(1.0)), ("r5", r5()), ("r7", c(1.0))],
            ),
            pop(
                "check",
                "O_check",
                "D_check",
                &[&["r3", "r5", "r6"], &["r4"]],
                vec![("r3", c(1.0)), ("r4", lin(2.0, 0.0, 1.0)), ("r5", r5()), ("r6", c(1.0))],
            ),
        ],
    }
}

fn diamond_roads() -> Vec<Road> {
    vec![Road::new("r1", "O", "L"), Road::new("r2", "O", "U"), Road::new("r3", "U", "D"), Road::new("r4", "L", "D")]
}

fn hat_diamond() -> Vec<(&'static str, CostExpr)> {
    vec![("r1", c(45.0)), ("r2", lin(0.0, 40.0, 0.0)), ("r3", c(45.0)), ("r4", lin(0.0, 40.0, 0.0))]
}

fn check_diamond() -> Vec<(&'static str, CostExpr)> {
    vec![("r1", c(30.0)), ("r2", lin(0.0, 8.0, 20.0)), ("r3", c(30.0)), ("r4", lin(0.0, 8.0, 20.0))]
}

/// Diamond O -> {U, L} -> D shared by trucks (hat) and cars (check).
pub fn net_c() -> Network {
    let routes: &[&[&str]] = &[&["r2", "r3"], &["r1", "r4"]];
    Network {
        junctions: ids(&["O", "U", "L", "D"]),
        roads: diamond_roads(),
        populations: vec![pop("hat", "O", "D", routes, hat_diamond()), pop("check", "O", "D", routes, check_diamond())],
    }
}

/// [`net_c`] with the zero-cost road r5 from U to L.
pub fn net_c5() -> Network {
    let routes: &[&[&str]] = &[&["r2", "r3"], &["r1", "r4"], &["r2", "r5", "r4"]];
    let mut roads = diamond_roads();
    roads.push(Road::new("r5", "U", "L"));
    let mut hat = hat_diamond();
    hat.push(("r5", c(0.0)));
    let mut check = check_diamond();
    check.push(("r5", c(0.0)));
    Network {
        junctions: ids(&["O", "U", "L", "D"]),
        roads,
        populations: vec![pop("hat", "O", "D", routes, hat), pop("check", "O", "D", routes, check)],
    }
}

fn net_d_roads() -> Vec<Road> {
    vec![
        Road::new("r1", "O_hat", "D"),
        Road::new("r2", "O_hat", "X"),
        Road::new("r3", "O_check", "X"),
        Road::new("r4", "O_check", "D"),
        Road::new("r5", "X", "D"),
    ]
}

/// Two origins sharing the destination D; both populations merge on r5.
pub fn net_d() -> Network {
    Network {
        junctions: ids(&["O_hat", "O_check", "X", "D"]),
        roads: net_d_roads(),
        populations: vec![
            pop(
                "hat",
                "O_hat",
                "D",
                &[&["r1"], &["r2", "r5"]],
                vec![("r1", c(4.0)), ("r2", lin(1.0, 1.0, 0.0)), ("r5", lin(1.0, 1.0, 1.0))],
            ),
            pop(
                "check",
                "O_check",
                "D",
                &[&["r3", "r5"], &["r4"]],
                vec![("r3", lin(0.0, 0.0, 1.0)), ("r4", lin(0.0, 0.0, 5.0)), ("r5", lin(1.0, 1.0, 1.0))],
            ),
        ],
    }
}

/// [`net_d`] with road r6 from O_hat to O_check, opening the hat route
/// `(r6, r4)` onto the check highway.
pub fn net_d6() -> Network {
    let mut roads = net_d_roads();
    roads.push(Road::new("r6", "O_hat", "O_check"));
    Network {
        junctions: ids(&["O_hat", "O_check", "X", "D"]),
        roads,
        populations: vec![
            pop(
                "hat",
                "O_hat",
                "D",
                &[&["r1"], &["r2", "r5"], &["r6", "r4"]],
                vec![
                    ("r1", c(4.0)),
                    ("r2", lin(1.0, 1.0, 0.0)),
                    ("r4", lin(0.0, 5.0, 5.0)),
                    ("r5", lin(1.0, 1.0, 1.0)),
                    ("r6", c(1.0)),
                ],
            ),
            pop(
                "check",
                "O_check",
                "D",
                &[&["r3", "r5"], &["r4"]],
                vec![("r3", lin(0.0, 0.0, 1.0)), ("r4", lin(0.0, 5.0, 5.0)), ("r5", lin(1.0, 1.0, 1.0))],
            ),
        ],
    }
}

/// One population on two parallel roads: `1 + 3 eta` and `3 - eta`.
pub fn net_p() -> Network {
    Network {
        junctions: ids(&["O", "D"]),
        roads: vec![Road::new("r1", "O", "D"), Road::new("r2", "O", "D")],
        populations: vec![pop(
            "drivers",
            "O",
            "D",
            &[&["r1"], &["r2"]],
            vec![("r1", CostExpr::affine(1.0, vec![3.0])), ("r2", CostExpr::nonmonotone_affine(3.0, vec![-1.0]))],
        )],
    }
}

/// Both populations choose between two cost-free parallel roads.
pub fn net_free_shared() -> Network {
    let routes: &[&[&str]] = &[&["r1"], &["r2"]];
    let free = || vec![("r1", c(0.0)), ("r2", c(0.0))];
    Network {
        junctions: ids(&["O", "D"]),
        roads: vec![Road::new("r1", "O", "D"), Road::new("r2", "O", "D")],
        populations: vec![pop("hat", "O", "D", routes, free()), pop("check", "O", "D", routes, free())],
    }
}
