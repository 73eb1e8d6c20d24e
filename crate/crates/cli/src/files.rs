//! JSON network and assignment files.
//!
//! Cost expressions name populations instead of indexing them, so a file
//! stays readable when populations are reordered:
//!
//! ```json
//! {"kind": "affine", "constant": 1, "coeffs": {"hat": 1, "check": 1}}
//! {"kind": "congestion", "weights": {"hat": 1, "check": 1}, "capacity": 1}
//! {"kind": "poly", "terms": [{"coeff": 2, "exponents": {"hat": 2}}]}
//! {"kind": "scale", "factor": 3, "expr": {"kind": "constant", "value": 1}}
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use multipop_core::{Assignment, CostExpr, Monomial, Network, Population, Road, Route};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub junctions: Vec<String>,
    pub roads: Vec<RoadFile>,
    pub populations: Vec<PopulationFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadFile {
    pub id: String,
    pub tail: String,
    pub head: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationFile {
    pub name: String,
    pub origin: String,
    pub destination: String,
    pub routes: Vec<Vec<String>>,
    pub costs: BTreeMap<String, CostFile>,
}

/// Coefficients keyed by population name; absent populations get zero.
pub type ByPopulation<T> = BTreeMap<String, T>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostFile {
    Constant {
        value: f64,
    },
    Affine {
        #[serde(default)]
        constant: f64,
        #[serde(default)]
        coeffs: ByPopulation<f64>,
    },
    Poly {
        terms: Vec<TermFile>,
    },
    Congestion {
        weights: ByPopulation<f64>,
        capacity: f64,
    },
    Sum {
        terms: Vec<CostFile>,
    },
    Scale {
        factor: f64,
        expr: Box<CostFile>,
    },
    NonmonotoneAffine {
        #[serde(default)]
        constant: f64,
        #[serde(default)]
        coeffs: ByPopulation<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub coeff: f64,
    #[serde(default)]
    pub exponents: ByPopulation<u32>,
}

fn dense<T: Copy + Default>(map: &ByPopulation<T>, names: &[String], at: &str) -> Result<Vec<T>, CliError> {
    let mut v = vec![T::default(); names.len()];
    for (k, x) in map {
        let p = names
            .iter()
            .position(|n| n == k)
            .ok_or_else(|| CliError::Input(format!("{at}: unknown population `{k}`")))?;
        v[p] = *x;
    }
    Ok(v)
}

fn sparse<T: Copy + Default + PartialEq>(v: &[T], names: &[String]) -> ByPopulation<T> {
    v.iter()
        .zip(names)
        .filter(|(x, _)| **x != T::default())
        .map(|(x, n)| (n.clone(), *x))
        .collect()
}

impl CostFile {
    pub fn to_expr(&self, names: &[String], at: &str) -> Result<CostExpr, CliError> {
        Ok(match self {
            CostFile::Constant { value } => CostExpr::Constant(*value),
            CostFile::Affine { constant, coeffs } => CostExpr::affine(*constant, dense(coeffs, names, at)?),
            CostFile::NonmonotoneAffine { constant, coeffs } => {
                CostExpr::nonmonotone_affine(*constant, dense(coeffs, names, at)?)
            }
            CostFile::Poly { terms } => CostExpr::Poly(
                terms
                    .iter()
                    .map(|t| Ok(Monomial::new(t.coeff, dense(&t.exponents, names, at)?)))
                    .collect::<Result<_, CliError>>()?,
            ),
            CostFile::Congestion { weights, capacity } => CostExpr::congestion(dense(weights, names, at)?, *capacity),
            CostFile::Sum { terms } => CostExpr::Sum(
                terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| t.to_expr(names, &format!("{at}.terms[{i}]")))
                    .collect::<Result<_, _>>()?,
            ),
            CostFile::Scale { factor, expr } => CostExpr::scale(*factor, expr.to_expr(names, &format!("{at}.expr"))?),
        })
    }

    pub fn from_expr(e: &CostExpr, names: &[String]) -> Self {
        match e {
            CostExpr::Constant(value) => CostFile::Constant { value: *value },
            CostExpr::Affine { constant, coeffs } => {
                CostFile::Affine { constant: *constant, coeffs: sparse(coeffs, names) }
            }
            CostExpr::NonMonotoneAffine { constant, coeffs } => {
                CostFile::NonmonotoneAffine { constant: *constant, coeffs: sparse(coeffs, names) }
            }
            CostExpr::Poly(terms) => CostFile::Poly {
                terms: terms
                    .iter()
                    .map(|m| TermFile { coeff: m.coeff, exponents: sparse(&m.exponents, names) })
                    .collect(),
            },
            CostExpr::Congestion { weights, capacity } => {
                CostFile::Congestion { weights: sparse(weights, names), capacity: *capacity }
            }
            CostExpr::Sum(terms) => CostFile::Sum { terms: terms.iter().map(|t| Self::from_expr(t, names)).collect() },
            CostExpr::Scale(factor, inner) => {
                CostFile::Scale { factor: *factor, expr: Box::new(Self::from_expr(inner, names)) }
            }
        }
    }
}

impl NetworkFile {
    pub fn to_network(&self) -> Result<Network, CliError> {
        let names: Vec<String> = self.populations.iter().map(|p| p.name.clone()).collect();
        let populations = self
            .populations
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let costs = p
                    .costs
                    .iter()
                    .map(|(road, c)| Ok((road.clone(), c.to_expr(&names, &format!("populations[{i}].costs.{road}"))?)))
                    .collect::<Result<BTreeMap<_, _>, CliError>>()?;
                Ok(Population {
                    name: p.name.clone(),
                    origin: p.origin.clone(),
                    destination: p.destination.clone(),
                    routes: p.routes.iter().map(|r| Route { roads: r.clone() }).collect(),
                    costs,
                })
            })
            .collect::<Result<_, CliError>>()?;
        Ok(Network {
            junctions: self.junctions.clone(),
            roads: self.roads.iter().map(|r| Road::new(&r.id, &r.tail, &r.head)).collect(),
            populations,
        })
    }

    pub fn from_network(net: &Network) -> Self {
        let names: Vec<String> = net.populations.iter().map(|p| p.name.clone()).collect();
        NetworkFile {
            junctions: net.junctions.clone(),
            roads: net
                .roads
                .iter()
                .map(|r| RoadFile { id: r.id.clone(), tail: r.tail.clone(), head: r.head.clone() })
                .collect(),
            populations: net
                .populations
                .iter()
                .map(|p| PopulationFile {
                    name: p.name.clone(),
                    origin: p.origin.clone(),
                    destination: p.destination.clone(),
                    routes: p.routes.iter().map(|r| r.roads.clone()).collect(),
                    costs: p.costs.iter().map(|(k, c)| (k.clone(), CostFile::from_expr(c, &names))).collect(),
                })
                .collect(),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn parse_network(path: &Path, text: &str) -> Result<Network, CliError> {
    parse::<NetworkFile>(path, text)?.to_network()
}

pub fn read_network(path: &Path) -> Result<Network, CliError> {
    parse_network(path, &read(path)?)
}

/// Shares of every population of `names`, in that order.
pub fn parse_assignment(path: &Path, text: &str, names: &[String]) -> Result<Assignment, CliError> {
    let mut map: BTreeMap<String, Vec<f64>> = parse(path, text)?;
    let mut shares = Vec::with_capacity(names.len());
    for n in names {
        let v = map
            .remove(n)
            .ok_or_else(|| CliError::Dimension(format!("{}: no shares for population `{n}`", path.display())))?;
        shares.push(v);
    }
    if let Some(extra) = map.keys().next() {
        return Err(CliError::Dimension(format!("{}: network has no population `{extra}`", path.display())));
    }
    Ok(Assignment::new(shares)?)
}

pub fn read_assignment(path: &Path, names: &[String]) -> Result<Assignment, CliError> {
    parse_assignment(path, &read(path)?, names)
}

/// Assignment as a name-to-shares object, the format [`parse_assignment`] reads.
pub fn assignment_json(theta: &Assignment, names: &[String]) -> serde_json::Value {
    let mut m = serde_json::Map::new();
    for (p, n) in names.iter().enumerate() {
        m.insert(n.clone(), serde_json::json!(theta.population(p)));
    }
    serde_json::Value::Object(m)
}

pub fn network_json(net: &Network) -> String {
    let mut s = serde_json::to_string_pretty(&NetworkFile::from_network(net)).expect("network serializes");
    s.push('\n');
    s
}
