//! Junctions, one-way roads, routes and populations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::assignment::Assignment;
use crate::costs::CostExpr;
use crate::error::{Error, Result};
use crate::ext::ExtReal;

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Road {
    pub id: String,
    pub tail: String,
    pub head: String,
}

impl Road {
    pub fn new(id: &str, tail: &str, head: &str) -> Self {
        Road { id: id.into(), tail: tail.into(), head: head.into() }
    }
}

/// Ordered list of road ids.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Route {
    pub roads: Vec<String>,
}

impl Route {
    pub fn new(roads: &[&str]) -> Self {
        Route { roads: roads.iter().map(|s| s.to_string()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    pub name: String,
    pub origin: String,
    pub destination: String,
    pub routes: Vec<Route>,
    /// Cost of each road for this population. Only roads on the
    /// population's routes need an entry.
    pub costs: BTreeMap<String, CostExpr>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Network {
    pub junctions: Vec<String>,
    pub roads: Vec<Road>,
    pub populations: Vec<Population>,
}

impl Network {
    pub fn road_index(&self, id: &str) -> Option<usize> {
        self.roads.iter().position(|r| r.id == id)
    }

    pub fn population_index(&self, name: &str) -> Option<usize> {
        self.populations.iter().position(|p| p.name == name)
    }

    pub fn route_counts(&self) -> Vec<usize> {
        self.populations.iter().map(|p| p.routes.len()).collect()
    }

    fn population(&self, pop: usize) -> Result<&Population> {
        self.populations.get(pop).ok_or(Error::UnknownPopulation(pop))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "lowercase"))]
pub enum Severity {
    Warning,
    Error,
}

impl core::fmt::Display for Severity {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Severity::Warning => "WARNING",
            Severity::Error => "ERROR",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ValidationReport {
    pub ok: bool,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn has(&self, code: &str) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }
}

struct Findings(Vec<Finding>);

impl Findings {
    fn push(&mut self, severity: Severity, code: &'static str, message: String, witnesses: &[&str]) {
        self.0.push(Finding {
            severity,
            code,
            message,
            witnesses: witnesses.iter().map(|s| s.to_string()).collect(),
        });
    }

    fn error(&mut self, code: &'static str, message: String, witnesses: &[&str]) {
        self.push(Severity::Error, code, message, witnesses);
    }
}

/// Reports every structural problem of `net`; never fails.
pub fn validate_network(net: &Network) -> ValidationReport {
    let mut out = Findings(Vec::new());

    let mut junctions = BTreeSet::new();
    for j in &net.junctions {
        if !junctions.insert(j.as_str()) {
            out.error("duplicate-junction", format!("junction {j} is declared twice"), &[j]);
        }
    }

    let mut roads: BTreeMap<&str, &Road> = BTreeMap::new();
    for r in &net.roads {
        if roads.insert(r.id.as_str(), r).is_some() {
            out.error("duplicate-road", format!("road {} is declared twice", r.id), &[&r.id]);
        }
        for end in [&r.tail, &r.head] {
            if !junctions.contains(end.as_str()) {
                out.error("unknown-junction", format!("road {} refers to unknown junction {end}", r.id), &[&r.id, end]);
            }
        }
        if r.tail == r.head {
            out.error("self-loop", format!("road {} starts and ends at {}", r.id, r.tail), &[&r.id]);
        }
    }

    let npop = net.populations.len();
    let mut names = BTreeSet::new();
    let mut endpoints = BTreeSet::new();
    for pop in &net.populations {
        if !names.insert(pop.name.as_str()) {
            out.error("duplicate-population", format!("population {} is declared twice", pop.name), &[&pop.name]);
        }
        for end in [&pop.origin, &pop.destination] {
            endpoints.insert(end.as_str());
            if !junctions.contains(end.as_str()) {
                out.error(
                    "unknown-junction",
                    format!("population {} refers to unknown junction {end}", pop.name),
                    &[&pop.name, end],
                );
            }
        }
        validate_population(pop, &roads, npop, &mut out);
    }

    // in/out degree over the union of all roads
    let mut indeg: BTreeMap<&str, usize> = BTreeMap::new();
    let mut outdeg: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &net.roads {
        *outdeg.entry(r.tail.as_str()).or_default() += 1;
        *indeg.entry(r.head.as_str()).or_default() += 1;
    }
    for j in &net.junctions {
        let i = indeg.get(j.as_str()).copied().unwrap_or(0);
        let o = outdeg.get(j.as_str()).copied().unwrap_or(0);
        if i == 0 || o == 0 {
            let what = match (i, o) {
                (0, 0) => "no entering and no exiting road",
                (0, _) => "no entering road",
                _ => "no exiting road",
            };
            let severity = if endpoints.contains(j.as_str()) { Severity::Warning } else { Severity::Error };
            out.push(severity, "junction-degree", format!("junction {j} has {what}"), &[j]);
        }
    }

    let ok = out.0.iter().all(|f| f.severity != Severity::Error);
    ValidationReport { ok, findings: out.0 }
}

fn validate_population(pop: &Population, roads: &BTreeMap<&str, &Road>, npop: usize, out: &mut Findings) {
    let name = pop.name.as_str();
    if pop.routes.is_empty() {
        out.error("no-routes", format!("population {name} has no routes"), &[name]);
    }
    let mut used: BTreeSet<&str> = BTreeSet::new();
    for (i, route) in pop.routes.iter().enumerate() {
        let label = format!("{name} route {i}");
        if route.roads.is_empty() {
            out.error("route-empty", format!("{label} has no roads"), &[name]);
            continue;
        }
        let mut seen = BTreeSet::new();
        let mut known = Vec::with_capacity(route.roads.len());
        for id in &route.roads {
            used.insert(id.as_str());
            if !seen.insert(id.as_str()) {
                out.error("route-repeated-road", format!("{label} uses road {id} twice"), &[name, id]);
            }
            match roads.get(id.as_str()) {
                Some(r) => known.push(Some(*r)),
                None => {
                    out.error("unknown-road", format!("{label} refers to unknown road {id}"), &[name, id]);
                    known.push(None);
                }
            }
        }
        for w in known.windows(2) {
            if let (Some(a), Some(b)) = (w[0], w[1]) {
                if a.head != b.tail {
                    out.error(
                        "route-adjacency",
                        format!("{label}: road {} ends at {} but road {} starts at {}", a.id, a.head, b.id, b.tail),
                        &[name, &a.id, &b.id],
                    );
                }
            }
        }
        if let Some(Some(first)) = known.first() {
            if first.tail != pop.origin {
                out.error(
                    "route-origin",
                    format!("{label} starts at {} instead of origin {}", first.tail, pop.origin),
                    &[name, &first.id],
                );
            }
        }
        if let Some(Some(last)) = known.last() {
            if last.head != pop.destination {
                out.error(
                    "route-destination",
                    format!("{label} ends at {} instead of destination {}", last.head, pop.destination),
                    &[name, &last.id],
                );
            }
        }
    }

    // subnetwork = union of this population's known roads
    let sub: Vec<&Road> = used.iter().filter_map(|id| roads.get(id).copied()).collect();
    if !sub.is_empty() {
        if let Some(cycle_road) = find_cycle(&sub) {
            out.error(
                "not-acyclic",
                format!("subnetwork of {name} contains a directed cycle through road {cycle_road}"),
                &[name, cycle_road],
            );
        }
        let mut nodes: BTreeSet<&str> = BTreeSet::new();
        let mut has_in: BTreeSet<&str> = BTreeSet::new();
        let mut has_out: BTreeSet<&str> = BTreeSet::new();
        for r in &sub {
            nodes.insert(&r.tail);
            nodes.insert(&r.head);
            has_out.insert(&r.tail);
            has_in.insert(&r.head);
        }
        let sources: Vec<&str> = nodes.iter().copied().filter(|j| !has_in.contains(j)).collect();
        let sinks: Vec<&str> = nodes.iter().copied().filter(|j| !has_out.contains(j)).collect();
        if sources != [pop.origin.as_str()] {
            let mut w = vec![name];
            w.extend(sources.iter().copied());
            out.error(
                "multiple-sources",
                format!("subnetwork of {name} must have the single source {}, found {:?}", pop.origin, sources),
                &w,
            );
        }
        if sinks != [pop.destination.as_str()] {
            let mut w = vec![name];
            w.extend(sinks.iter().copied());
            out.error(
                "multiple-sinks",
                format!("subnetwork of {name} must have the single sink {}, found {:?}", pop.destination, sinks),
                &w,
            );
        }
    }

    for id in &used {
        if roads.contains_key(id) && !pop.costs.contains_key(*id) {
            out.error("missing-cost", format!("population {name} has no cost for road {id}"), &[name, id]);
        }
    }
    for (id, expr) in &pop.costs {
        if !roads.contains_key(id.as_str()) {
            out.error("unknown-road", format!("population {name} defines a cost for unknown road {id}"), &[name, id]);
        }
        if expr.arity() > npop {
            out.error(
                "cost-arity",
                format!("cost of road {id} for {name} refers to {} populations, network has {npop}", expr.arity()),
                &[name, id],
            );
        } else if let Err(e) = expr.validate(npop) {
            out.error("cost-invalid", format!("cost of road {id} for {name}: {e}"), &[name, id]);
        }
    }
}

/// Returns a road on some directed cycle, if any.
fn find_cycle<'a>(roads: &[&'a Road]) -> Option<&'a str> {
    let mut adj: BTreeMap<&str, Vec<&Road>> = BTreeMap::new();
    for r in roads {
        adj.entry(r.tail.as_str()).or_default().push(r);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();
    let starts: Vec<&str> = adj.keys().copied().collect();
    for s in starts {
        if state.get(s).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut stack: Vec<(&str, usize)> = vec![(s, 0)];
        state.insert(s, 1);
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            let out = adj.get(node).map(Vec::as_slice).unwrap_or(&[]);
            if *next < out.len() {
                let r = out[*next];
                *next += 1;
                match state.get(r.head.as_str()).copied().unwrap_or(0) {
                    1 => return Some(r.id.as_str()),
                    0 => {
                        state.insert(r.head.as_str(), 1);
                        stack.push((r.head.as_str(), 0));
                    }
                    _ => {}
                }
            } else {
                state.insert(node, 2);
                stack.pop();
            }
        }
    }
    None
}

/// 0/1 matrix, rows = roads in network order, columns = routes.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IncidenceMatrix {
    entries: Vec<Vec<u8>>,
    cols: usize,
}

impl IncidenceMatrix {
    pub fn from_rows(entries: Vec<Vec<u8>>, cols: usize) -> Self {
        debug_assert!(entries.iter().all(|r| r.len() == cols));
        IncidenceMatrix { entries, cols }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, h: usize, i: usize) -> u8 {
        self.entries[h][i]
    }

    pub fn row(&self, h: usize) -> &[u8] {
        &self.entries[h]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.entries.clone()
    }

    /// `row h . theta`.
    pub fn row_dot(&self, h: usize, theta: &[f64]) -> f64 {
        self.entries[h].iter().zip(theta).filter(|(g, _)| **g == 1).map(|(_, t)| t).sum()
    }
}

/// Incidence matrix of population `pop`.
pub fn build_incidence(net: &Network, pop: usize) -> Result<IncidenceMatrix> {
    let p = net.population(pop)?;
    let mut entries = vec![vec![0u8; p.routes.len()]; net.roads.len()];
    for (i, route) in p.routes.iter().enumerate() {
        for id in &route.roads {
            let h = net
                .road_index(id)
                .ok_or_else(|| Error::InvalidNetwork(format!("route {i} of {} uses unknown road {id}", p.name)))?;
            entries[h][i] = 1;
        }
    }
    Ok(IncidenceMatrix { entries, cols: p.routes.len() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConditionGamma {
    pub holds: bool,
    /// For each route, the first road (in network order) used by that route
    /// and by no other route of the population.
    pub witnesses: Vec<Option<String>>,
}

impl ConditionGamma {
    /// Index of the first route without a private road.
    pub fn first_failure(&self) -> Option<usize> {
        self.witnesses.iter().position(Option::is_none)
    }
}

pub fn check_condition_gamma(net: &Network, pop: usize) -> Result<ConditionGamma> {
    let g = build_incidence(net, pop)?;
    let ids: Vec<String> = net.roads.iter().map(|r| r.id.clone()).collect();
    Ok(condition_gamma_of(&g, &ids))
}

/// Condition (Gamma) on an incidence matrix whose rows are named by `road_ids`.
pub fn condition_gamma_of(g: &IncidenceMatrix, road_ids: &[String]) -> ConditionGamma {
    let witnesses: Vec<Option<String>> = (0..g.cols())
        .map(|i| {
            (0..g.rows())
                .find(|&h| g.get(h, i) == 1 && g.row(h).iter().map(|&x| x as usize).sum::<usize>() == 1)
                .map(|h| road_ids[h].clone())
        })
        .collect();
    ConditionGamma { holds: witnesses.iter().all(Option::is_some), witnesses }
}

/// All simple directed paths from `origin` to `destination`, sorted by their
/// road-id sequences.
pub fn enumerate_routes(net: &Network, origin: &str, destination: &str) -> Result<Vec<Route>> {
    for j in [origin, destination] {
        if !net.junctions.iter().any(|x| x == j) {
            return Err(Error::UnknownJunction(j.to_string()));
        }
    }
    let mut found = Vec::new();
    if origin == destination {
        return Ok(found);
    }
    let mut path: Vec<&Road> = Vec::new();
    let mut visited: BTreeSet<&str> = BTreeSet::new();
    visited.insert(origin);
    dfs(net, origin, destination, &mut path, &mut visited, &mut found);
    found.sort();
    Ok(found)
}

fn dfs<'a>(
    net: &'a Network,
    at: &str,
    destination: &str,
    path: &mut Vec<&'a Road>,
    visited: &mut BTreeSet<&'a str>,
    found: &mut Vec<Route>,
) {
    for r in net.roads.iter().filter(|r| r.tail == at) {
        if r.head == destination {
            let mut roads: Vec<String> = path.iter().map(|x| x.id.clone()).collect();
            roads.push(r.id.clone());
            found.push(Route { roads });
        } else if visited.insert(r.head.as_str()) {
            path.push(r);
            dfs(net, &r.head, destination, path, visited, found);
            path.pop();
            visited.remove(r.head.as_str());
        }
    }
}

/// `flows[h][p] = Gamma_p[h] . theta_p`.
pub fn flows_on_roads(incidences: &[IncidenceMatrix], theta: &Assignment) -> Result<Vec<Vec<f64>>> {
    let counts: Vec<usize> = incidences.iter().map(IncidenceMatrix::cols).collect();
    theta.check_dimensions(&counts)?;
    let rows = incidences.first().map_or(0, IncidenceMatrix::rows);
    if incidences.iter().any(|g| g.rows() != rows) {
        return Err(Error::Dimension("incidence matrices have different row counts".into()));
    }
    Ok((0..rows)
        .map(|h| {
            incidences
                .iter()
                .enumerate()
                .map(|(p, g)| g.row_dot(h, theta.population(p)).min(1.0))
                .collect()
        })
        .collect())
}

/// A validated network compiled to index form.
#[derive(Clone, Debug)]
pub struct Model {
    pub road_ids: Vec<String>,
    pub population_names: Vec<String>,
    pub incidence: Vec<IncidenceMatrix>,
    /// `route_roads[p][i]`: road indices of route `i` of population `p`.
    pub route_roads: Vec<Vec<Vec<usize>>>,
    /// `costs[h][p]`, present for every road on a route of `p`.
    pub costs: Vec<Vec<Option<CostExpr>>>,
}

impl Model {
    /// Validates and compiles; every error finding is folded into the message.
    pub fn new(net: &Network) -> Result<Self> {
        let report = validate_network(net);
        if !report.ok {
            let msg: Vec<String> = report.errors().map(|f| format!("{}: {}", f.code, f.message)).collect();
            return Err(Error::InvalidNetwork(msg.join("; ")));
        }
        let incidence = (0..net.populations.len()).map(|p| build_incidence(net, p)).collect::<Result<Vec<_>>>()?;
        let route_roads = net
            .populations
            .iter()
            .map(|pop| {
                pop.routes
                    .iter()
                    .map(|r| r.roads.iter().map(|id| net.road_index(id).expect("validated")).collect())
                    .collect()
            })
            .collect();
        let costs = net
            .roads
            .iter()
            .map(|road| net.populations.iter().map(|pop| pop.costs.get(&road.id).cloned()).collect())
            .collect();
        Ok(Model {
            road_ids: net.roads.iter().map(|r| r.id.clone()).collect(),
            population_names: net.populations.iter().map(|p| p.name.clone()).collect(),
            incidence,
            route_roads,
            costs,
        })
    }

    pub fn populations(&self) -> usize {
        self.population_names.len()
    }

    pub fn roads(&self) -> usize {
        self.road_ids.len()
    }

    pub fn route_counts(&self) -> Vec<usize> {
        self.incidence.iter().map(IncidenceMatrix::cols).collect()
    }

    /// Whether population `p` has road `h` on one of its routes.
    pub fn uses(&self, h: usize, p: usize) -> bool {
        self.incidence[p].row(h).contains(&1)
    }

    pub fn flows(&self, theta: &Assignment) -> Result<Vec<Vec<f64>>> {
        flows_on_roads(&self.incidence, theta)
    }

    /// Cost of road `h` for population `p` at road flows `eta` (one per population).
    pub fn road_cost(&self, h: usize, p: usize, eta: &[f64]) -> ExtReal {
        match &self.costs[h][p] {
            Some(c) => c.eval_unchecked(eta),
            None => ExtReal::ZERO,
        }
    }

    /// `d tau_{h,p} / d eta_q`; zero for roads `p` does not use.
    pub(crate) fn road_partial(&self, h: usize, p: usize, q: usize, eta: &[f64]) -> Result<f64> {
        match &self.costs[h][p] {
            Some(c) if self.uses(h, p) => {
                if c.eval_unchecked(eta).is_infinite() {
                    Err(Error::InfiniteCost)
                } else {
                    Ok(c.partial_unchecked(eta, q))
                }
            }
            _ => Ok(0.0),
        }
    }

    /// First (road, population) whose cost is not structurally monotone.
    pub fn first_nonmonotone(&self) -> Option<(usize, usize)> {
        (0..self.roads()).find_map(|h| {
            (0..self.populations()).find_map(|p| match &self.costs[h][p] {
                Some(c) if self.uses(h, p) && !c.is_structurally_monotone() => Some((h, p)),
                _ => None,
            })
        })
    }
}
