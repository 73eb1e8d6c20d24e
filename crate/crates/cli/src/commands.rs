use std::fmt::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use multipop_core::analysis::segment::DEFAULT_NODES;
use multipop_core::analysis::{self, HypothesisSampler, OracleParams};
use multipop_core::equilibrium::{self, EquilibriumReport, Tolerances};
use multipop_core::network::{self, Finding, Severity, ValidationReport};
use multipop_core::solver::{self, MultistartParams, SolveResult, SolverParams};
use multipop_core::{fixtures, Assignment, Error, Model, Network};
use serde_json::{json, Value};

use crate::error::{CliError, Exit};
use crate::files;
use crate::render::{ext, num, nums, table, yes_no};

#[derive(Parser, Debug)]
#[command(name = "multipop", version, about = "Nash equilibria of road networks shared by several populations")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Predicate {
    Equilibrium,
    Nash,
    EpsNash,
}

fn float_in(s: &str, lo: f64, hi: f64, lo_open: bool, what: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    let above = if lo_open { x > lo } else { x >= lo };
    if x.is_finite() && above && x <= hi {
        Ok(x)
    } else {
        let open = if lo_open { "(" } else { "[" };
        Err(format!("{what} must lie in {open}{lo}, {hi}], got {s}"))
    }
}

fn time_tol(s: &str) -> Result<f64, String> {
    float_in(s, 0.0, 1.0, true, "tolerance")
}

fn share_tol(s: &str) -> Result<f64, String> {
    float_in(s, 0.0, 0.5, false, "share tolerance")
}

fn unit(s: &str) -> Result<f64, String> {
    float_in(s, 0.0, 1.0, true, "value")
}

fn residual(s: &str) -> Result<f64, String> {
    float_in(s, 0.0, 1.0, true, "residual tolerance")
}

fn finite(s: &str) -> Result<f64, String> {
    float_in(s, f64::MIN, f64::MAX, false, "value")
}

/// Options shared by every command.
#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Relative tolerance on time comparisons, in (0, 1] [default: 1e-9]
    #[arg(long, global = true, value_name = "X", value_parser = time_tol)]
    pub tol: Option<f64>,
    /// Shares at or below this count as unused, in [0, 0.5] [default: 1e-9]
    #[arg(long, global = true, value_name = "X", value_parser = share_tol)]
    pub share_tol: Option<f64>,
    /// Shift size of the eps-Nash test, in (0, 1] [default: half the smallest positive share]
    #[arg(long, global = true, value_name = "X", value_parser = unit)]
    pub eps: Option<f64>,
    /// Damping of the fixed-point iteration, in (0, 1]
    #[arg(long, global = true, value_name = "X", default_value_t = 0.5, value_parser = unit)]
    pub omega: f64,
    /// Iteration cap of the solver
    #[arg(long, global = true, value_name = "N", default_value_t = 1_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iters: u64,
    /// Stop once the fixed-point residual drops below this, in (0, 1]
    #[arg(long, global = true, value_name = "X", default_value_t = 1e-14, value_parser = residual)]
    pub residual_tol: f64,
    /// Grid resolution m (step 1/m) of the oracle
    #[arg(long, global = true, value_name = "M", default_value_t = 100,
          value_parser = clap::value_parser!(u64).range(1..=1_000_000))]
    pub grid: u64,
    /// Seed of every sampled quantity
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub seed: u64,
    /// Gauss-Legendre nodes for segment integrals
    #[arg(long, global = true, value_name = "K", default_value_t = DEFAULT_NODES as u64,
          value_parser = clap::value_parser!(u64).range(1..=64))]
    pub quadrature: u64,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Solve even when some cost is not monotone
    #[arg(long, global = true)]
    pub allow_nonmonotone: bool,
    /// Write the report here instead of standard output
    #[arg(long, short, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check network files and list findings
    Validate {
        #[arg(required = true)]
        networks: Vec<PathBuf>,
    },
    /// Compute a Nash equilibrium
    Solve {
        network: PathBuf,
        /// Solve from grid corners, the barycenter and random starts
        #[arg(long)]
        multistart: bool,
        /// Random starts added by --multistart
        #[arg(long, value_name = "N", default_value_t = 8)]
        random_starts: usize,
        /// Assignment file to start from [default: barycenter]
        #[arg(long, value_name = "FILE", conflicts_with = "multistart")]
        start: Option<PathBuf>,
    },
    /// Evaluate the equilibrium predicates at an assignment
    Verify {
        network: PathBuf,
        assignment: PathBuf,
        /// Predicate deciding the exit status
        #[arg(long, value_enum, default_value_t = Predicate::Nash)]
        predicate: Predicate,
        /// Also test the shifts eps/2 and eps/4
        #[arg(long)]
        strict: bool,
    },
    /// Compare equilibrium times of two scenarios (Braess paradox)
    Compare { base: PathBuf, variant: PathBuf },
    /// Brute-force grid search for equilibria
    Oracle {
        network: PathBuf,
        /// Largest number of grid points evaluated
        #[arg(long, value_name = "N", default_value_t = 5_000_000,
              value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
    },
    /// Sample the uniqueness hypothesis
    Uniqueness {
        network: PathBuf,
        /// Random assignment pairs
        #[arg(long, value_name = "N", default_value_t = 100)]
        pairs: usize,
        /// Skip the vertex and barycenter pairs
        #[arg(long)]
        no_corners: bool,
    },
    /// List all simple routes between two junctions
    Routes {
        network: PathBuf,
        #[arg(long, value_name = "JUNCTION", requires = "to")]
        from: Option<String>,
        #[arg(long, value_name = "JUNCTION", requires = "from")]
        to: Option<String>,
    },
    /// Print a built-in example network as a network file
    Fixture {
        /// One of net_a, net_b, net_c, net_c5, net_d, net_d6, net_p, net_free_shared
        name: String,
        /// Extra delay on the hat road r2 (net_a) or shifted route costs (net_b)
        #[arg(long, value_name = "X", allow_negative_numbers = true, value_parser = finite)]
        delta: Option<f64>,
    },
}

/// Rendered outcome of a command.
#[derive(Clone, Debug)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub exit: Exit,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("report serializes");
                s.push('\n');
                s
            }
        }
    }
}

impl Options {
    pub fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        if let Some(x) = self.tol {
            t.time_rel = x;
        }
        if let Some(x) = self.share_tol {
            t.share = x;
        }
        t
    }

    pub fn solver(&self) -> SolverParams {
        SolverParams {
            omega: self.omega,
            max_iters: usize::try_from(self.max_iters).unwrap_or(usize::MAX),
            residual_tol: self.residual_tol,
            tolerances: self.tolerances(),
            allow_nonmonotone: self.allow_nonmonotone,
            record_trajectory: false,
        }
    }
}

fn load(path: &Path) -> Result<(Network, Model), CliError> {
    let net = files::read_network(path)?;
    let report = network::validate_network(&net);
    if !report.ok {
        return Err(CliError::Invalid { path: path.display().to_string(), report });
    }
    let model = Model::new(&net)?;
    Ok((net, model))
}

pub fn finding_line(f: &Finding) -> String {
    let mut s = format!("{} {}: {}", f.severity, f.code, f.message);
    if !f.witnesses.is_empty() {
        let _ = write!(s, " [{}]", f.witnesses.join(", "));
    }
    s
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let o = &cli.opts;
    match &cli.command {
        Command::Validate { networks } => Ok(validate(networks)),
        Command::Solve { network, multistart, random_starts, start } => {
            if *multistart {
                solve_multistart(o, network, *random_starts)
            } else {
                solve_single(o, network, start.as_deref())
            }
        }
        Command::Verify { network, assignment, predicate, strict } => verify(o, network, assignment, *predicate, *strict),
        Command::Compare { base, variant } => compare(o, base, variant),
        Command::Oracle { network, budget } => oracle(o, network, u128::from(*budget)),
        Command::Uniqueness { network, pairs, no_corners } => uniqueness(o, network, *pairs, !*no_corners),
        Command::Routes { network, from, to } => routes(network, from.as_deref().zip(to.as_deref())),
        Command::Fixture { name, delta } => fixture(name, *delta),
    }
}

fn nonmonotone_findings(net: &Network) -> Vec<Finding> {
    let mut out = Vec::new();
    for pop in &net.populations {
        for (road, c) in &pop.costs {
            if !c.is_structurally_monotone() {
                out.push(Finding {
                    severity: Severity::Warning,
                    code: "cost-nonmonotone",
                    message: format!("cost of road {road} for {} is not monotone; solving needs --allow-nonmonotone", pop.name),
                    witnesses: vec![pop.name.clone(), road.clone()],
                });
            }
        }
    }
    out
}

fn validate(paths: &[PathBuf]) -> Report {
    let mut text = String::new();
    let mut entries = Vec::new();
    let mut exit = Exit::Ok;
    for path in paths {
        let shown = path.display().to_string();
        match files::read_network(path) {
            Ok(net) => {
                let mut report: ValidationReport = network::validate_network(&net);
                report.findings.extend(nonmonotone_findings(&net));
                let _ = writeln!(text, "{shown}: {}", if report.ok { "ok" } else { "invalid" });
                for f in &report.findings {
                    let _ = writeln!(text, "{}", finding_line(f));
                }
                if !report.ok {
                    exit = exit.max(Exit::Failed);
                }
                entries.push(json!({"path": shown, "ok": report.ok, "findings": report.findings}));
            }
            Err(e) => {
                let _ = writeln!(text, "{shown}: error");
                let _ = writeln!(text, "ERROR parse: {e}");
                exit = exit.max(e.exit());
                entries.push(json!({"path": shown, "ok": false, "error": e.to_string()}));
            }
        }
    }
    Report { text, json: json!({"command": "validate", "files": entries}), exit }
}

fn by_name<T: serde::Serialize>(names: &[String], values: impl IntoIterator<Item = T>) -> Value {
    let mut m = serde_json::Map::new();
    for (n, v) in names.iter().zip(values) {
        m.insert(n.clone(), serde_json::to_value(v).expect("serializes"));
    }
    Value::Object(m)
}

fn solution_json(model: &Model, theta: &Assignment, rep: &EquilibriumReport) -> Value {
    json!({
        "assignment": files::assignment_json(theta, &model.population_names),
        "relevant_times": by_name(&model.population_names, &rep.relevant_times),
        "report": rep,
    })
}

fn route_label(net: &Network, p: usize, i: usize) -> String {
    net.populations[p].routes[i].roads.join(" ")
}

/// Per-route share and time of every population.
fn population_text(out: &mut String, net: &Network, model: &Model, theta: &Assignment, rep: &EquilibriumReport) {
    for (p, name) in model.population_names.iter().enumerate() {
        let _ = writeln!(out, "population {name}");
        let rows: Vec<Vec<String>> = theta
            .population(p)
            .iter()
            .enumerate()
            .map(|(i, &s)| vec![i.to_string(), route_label(net, p, i), num(s), ext(rep.route_times.times[p][i])])
            .collect();
        for line in table(&["route", "roads", "share", "time"], &rows).lines() {
            let _ = writeln!(out, "  {line}");
        }
        let _ = writeln!(out, "  relevant time {}", ext(rep.relevant_times[p]));
    }
}

fn solve_status(r: &SolveResult) -> (&'static str, Exit) {
    if r.success() {
        ("converged, verified Nash equilibrium", Exit::Ok)
    } else if r.converged {
        ("converged, not a Nash equilibrium", Exit::Failed)
    } else {
        ("not converged, best iterate shown", Exit::Unsolved)
    }
}

fn solve_single(o: &Options, path: &Path, start: Option<&Path>) -> Result<Report, CliError> {
    let (net, model) = load(path)?;
    let start = match start {
        Some(f) => files::read_assignment(f, &model.population_names)?,
        None => Assignment::uniform(&model.route_counts()),
    };
    let r = solver::solve_fixed_point(&model, &start, &o.solver())?;
    let (status, exit) = solve_status(&r);
    let mut text = String::new();
    let _ = writeln!(text, "status      {status}");
    let _ = writeln!(text, "iterations  {}", r.iterations);
    let _ = writeln!(text, "residual    {}", num(r.residual));
    population_text(&mut text, &net, &model, &r.assignment, &r.verified);
    let mut json = json!({
        "command": "solve",
        "status": status,
        "converged": r.converged,
        "nash": r.verified.is_nash,
        "iterations": r.iterations,
        "residual": r.residual,
    });
    merge(&mut json, solution_json(&model, &r.assignment, &r.verified));
    Ok(Report { text, json, exit })
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn solve_multistart(o: &Options, path: &Path, random_starts: usize) -> Result<Report, CliError> {
    let (net, model) = load(path)?;
    let ms = MultistartParams { random_starts, seed: o.seed, ..MultistartParams::default() };
    let r = solver::solve_multistart(&model, &o.solver(), &ms)?;
    let mut text = String::new();
    let _ = writeln!(text, "starts      {} ({} failed)", r.starts, r.failed_starts);
    let _ = writeln!(text, "equilibria  {}", r.equilibria.len());
    let mut list = Vec::new();
    for (k, e) in r.equilibria.iter().enumerate() {
        let _ = writeln!(text, "equilibrium {} (iterations {}, residual {})", k + 1, e.iterations, num(e.residual));
        population_text(&mut text, &net, &model, &e.assignment, &e.verified);
        let mut v = json!({"iterations": e.iterations, "residual": e.residual});
        merge(&mut v, solution_json(&model, &e.assignment, &e.verified));
        list.push(v);
    }
    let exit = if r.equilibria.is_empty() { Exit::Unsolved } else { Exit::Ok };
    let json = json!({
        "command": "solve",
        "multistart": true,
        "starts": r.starts,
        "failed_starts": r.failed_starts,
        "seed": o.seed,
        "equilibria": list,
    });
    Ok(Report { text, json, exit })
}

fn verify(o: &Options, path: &Path, asg: &Path, predicate: Predicate, strict: bool) -> Result<Report, CliError> {
    let (net, model) = load(path)?;
    let theta = files::read_assignment(asg, &model.population_names)?;
    let rep = equilibrium::verify(&model, &theta, o.eps, strict, &o.tolerances())?;
    let (label, holds) = match predicate {
        Predicate::Equilibrium => ("equilibrium", rep.is_equilibrium),
        Predicate::Nash => ("nash", rep.is_nash),
        Predicate::EpsNash => ("eps-nash", rep.is_eps_nash),
    };
    let mut text = String::new();
    let rows = vec![
        vec!["equilibrium".into(), yes_no(rep.is_equilibrium).into(), ext(rep.equilibrium_residual)],
        vec!["nash".into(), yes_no(rep.is_nash).into(), ext(rep.nash_residual)],
        vec!["eps-nash".into(), yes_no(rep.is_eps_nash).into(), ext(rep.eps_nash_residual)],
    ];
    text.push_str(&table(&["predicate", "holds", "residual"], &rows));
    let _ = writeln!(text, "eps {} (strict {})", num(rep.eps), yes_no(rep.strict));
    let _ = writeln!(text, "requested {label}: {}", if holds { "holds" } else { "FAILS" });
    population_text(&mut text, &net, &model, &theta, &rep);
    if !rep.violations.is_empty() {
        let _ = writeln!(text, "violations");
        for v in &rep.violations {
            let _ = writeln!(text, "  {v}");
        }
    }
    let mut json = json!({"command": "verify", "predicate": label, "holds": holds});
    merge(&mut json, solution_json(&model, &theta, &rep));
    Ok(Report { text, json, exit: if holds { Exit::Ok } else { Exit::Failed } })
}

fn compare(o: &Options, base: &Path, variant: &Path) -> Result<Report, CliError> {
    let (_, b) = load(base)?;
    let (_, v) = load(variant)?;
    let r = analysis::compare_scenarios(&b, &v, &o.solver())?;
    let rows: Vec<Vec<String>> = r
        .rows
        .iter()
        .map(|row| {
            vec![
                row.population.clone(),
                ext(row.before),
                ext(row.after),
                num(row.delta),
                if row.paradox { "PARADOX".into() } else { "-".into() },
            ]
        })
        .collect();
    let mut text = table(&["population", "before", "after", "delta", "paradox"], &rows);
    let flagged: Vec<&str> = r.rows.iter().filter(|x| x.paradox).map(|x| x.population.as_str()).collect();
    if flagged.is_empty() {
        let _ = writeln!(text, "no Braess paradox");
    } else {
        let _ = writeln!(text, "BRAESS PARADOX for {}", flagged.join(", "));
    }
    let json = json!({
        "command": "compare",
        "paradox": r.any_paradox(),
        "tolerance": r.tolerance,
        "rows": r.rows,
        "base": files::assignment_json(&r.base, &b.population_names),
        "variant": files::assignment_json(&r.variant, &v.population_names),
    });
    Ok(Report { text, json, exit: Exit::Ok })
}

fn oracle(o: &Options, path: &Path, budget: u128) -> Result<Report, CliError> {
    let (_, model) = load(path)?;
    let resolution = usize::try_from(o.grid).unwrap_or(usize::MAX);
    let params = OracleParams { resolution, tol: o.tol.unwrap_or(OracleParams::default().tol), budget, seed: o.seed };
    let r = analysis::brute_force_equilibria(&model, &params)?;
    let names = &model.population_names;
    let mut text = String::new();
    let _ = writeln!(text, "grid        m = {}, {} points", r.resolution, r.points);
    let _ = writeln!(text, "tolerance   {} (lipschitz {})", num(r.tolerance), num(r.lipschitz));
    let _ = writeln!(text, "hits        {}", r.hits);
    let _ = writeln!(text, "clusters    {}", r.clusters.len());
    let mut clusters = Vec::new();
    for (k, c) in r.clusters.iter().enumerate() {
        let _ = writeln!(text, "cluster {} (size {}, residual {})", k + 1, c.size, ext(c.residual));
        for (p, n) in names.iter().enumerate() {
            let _ = writeln!(
                text,
                "  {n}: shares {}  relevant time {}",
                nums(c.representative.population(p)),
                ext(c.relevant_times[p])
            );
        }
        clusters.push(json!({
            "representative": files::assignment_json(&c.representative, names),
            "residual": c.residual,
            "size": c.size,
            "relevant_times": by_name(names, &c.relevant_times),
        }));
    }
    let json = json!({
        "command": "oracle",
        "resolution": r.resolution,
        "points": u64::try_from(r.points).unwrap_or(u64::MAX),
        "tolerance": r.tolerance,
        "lipschitz": r.lipschitz,
        "hits": r.hits,
        "clusters": clusters,
    });
    let exit = if r.clusters.is_empty() { Exit::Unsolved } else { Exit::Ok };
    Ok(Report { text, json, exit })
}

fn check_gamma(net: &Network) -> Result<(), CliError> {
    for (p, pop) in net.populations.iter().enumerate() {
        let g = network::check_condition_gamma(net, p)?;
        if let Some(i) = g.first_failure() {
            return Err(CliError::Gamma(format!(
                "condition (Gamma) fails: route {i} ({}) of population {} has no road that its other routes avoid",
                route_label(net, p, i),
                pop.name
            )));
        }
    }
    Ok(())
}

fn uniqueness(o: &Options, path: &Path, pairs: usize, corners: bool) -> Result<Report, CliError> {
    let (net, model) = load(path)?;
    check_gamma(&net)?;
    let tol = o.tolerances();
    let ms = MultistartParams { seed: o.seed, ..MultistartParams::default() };
    let (equilibria, note) = match solver::solve_multistart(&model, &o.solver(), &ms) {
        Ok(r) => (r.equilibria.into_iter().map(|e| e.assignment).collect::<Vec<_>>(), None),
        Err(e @ Error::NonMonotone { .. }) => (Vec::new(), Some(format!("equilibrium residuals skipped: {e}"))),
        Err(e) => return Err(e.into()),
    };
    let sampler = HypothesisSampler {
        pairs,
        seed: o.seed,
        include_corners: corners,
        nodes: usize::try_from(o.quadrature).unwrap_or(DEFAULT_NODES),
    };
    let r = analysis::check_hypothesis_h(&model, &sampler, &equilibria, &tol)?;
    let mut text = String::new();
    let _ = writeln!(text, "verdict            {}", r.verdict);
    let _ = writeln!(text, "pairs              {} checked, {} skipped", r.pairs_checked, r.pairs_skipped);
    let _ = writeln!(text, "semidefinite       {}", yes_no(r.defpos_ok));
    let _ = writeln!(text, "exceptional roads  {}", r.exceptional_roads);
    let rows: Vec<Vec<String>> = r
        .roads
        .iter()
        .map(|d| {
            vec![
                d.road.clone(),
                if d.users.is_empty() { "-".into() } else { d.users.join(",") },
                d.case.to_string(),
                yes_no(d.exceptional).into(),
                num(d.q_hat),
                num(d.p_hat),
                num(d.p_check),
                num(d.q_check),
            ]
        })
        .collect();
    text.push_str(&table(&["road", "users", "case", "exceptional", "Q_hat", "P_hat", "P_check", "Q_check"], &rows));
    let _ = writeln!(text, "equilibria         {}", equilibria.len());
    for (k, res) in r.pair_residuals.iter().enumerate() {
        let _ = writeln!(text, "pair {} residuals  {}", k + 1, nums(res));
    }
    if let Some(n) = &note {
        let _ = writeln!(text, "{n}");
    }
    let json = json!({
        "command": "uniqueness",
        "verdict": r.verdict,
        "hypothesis_holds": r.hypothesis_holds,
        "defpos_ok": r.defpos_ok,
        "exceptional_roads": r.exceptional_roads,
        "pairs_checked": r.pairs_checked,
        "pairs_skipped": r.pairs_skipped,
        "roads": r.roads,
        "equilibria": equilibria.iter().map(|e| files::assignment_json(e, &model.population_names)).collect::<Vec<_>>(),
        "pair_residuals": r.pair_residuals,
        "note": note,
    });
    Ok(Report { text, json, exit: if r.hypothesis_holds { Exit::Ok } else { Exit::Failed } })
}

fn routes(path: &Path, between: Option<(&str, &str)>) -> Result<Report, CliError> {
    let net = files::read_network(path)?;
    let pairs: Vec<(Option<String>, String, String)> = match between {
        Some((a, b)) => vec![(None, a.to_string(), b.to_string())],
        None => net
            .populations
            .iter()
            .map(|p| (Some(p.name.clone()), p.origin.clone(), p.destination.clone()))
            .collect(),
    };
    let mut text = String::new();
    let mut list = Vec::new();
    for (name, from, to) in pairs {
        let found = network::enumerate_routes(&net, &from, &to)?;
        match &name {
            Some(n) => {
                let _ = writeln!(text, "{n}: {from} -> {to}");
            }
            None => {
                let _ = writeln!(text, "{from} -> {to}");
            }
        }
        for r in &found {
            let _ = writeln!(text, "  {}", r.roads.join(" "));
        }
        let routes: Vec<&Vec<String>> = found.iter().map(|r| &r.roads).collect();
        list.push(json!({"population": name, "from": from, "to": to, "routes": routes}));
    }
    Ok(Report { text, json: json!({"command": "routes", "pairs": list}), exit: Exit::Ok })
}

fn fixture(name: &str, delta: Option<f64>) -> Result<Report, CliError> {
    if delta.is_some() && !matches!(name, "net_a" | "net_b") {
        return Err(CliError::Input(format!("--delta applies to net_a and net_b only, not {name}")));
    }
    let net = fixtures::by_name(name, delta.unwrap_or(0.0)).ok_or_else(|| {
        CliError::Input(format!("unknown fixture `{name}`; expected one of {}", fixtures::NAMES.join(", ")))
    })?;
    let file = files::NetworkFile::from_network(&net);
    let text = files::network_json(&net);
    Ok(Report { text, json: serde_json::to_value(file).expect("network serializes"), exit: Exit::Ok })
}

