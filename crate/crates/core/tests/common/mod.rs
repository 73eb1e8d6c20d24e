//! Strategies, oracles and checks shared by the property suites and the
//! acceptance target.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::OnceLock;

use multipop_core::analysis::segment::{self, classify_road, segment_matrices};
use multipop_core::costs::{eval_cost, eval_partial};
use multipop_core::equilibrium::{self, Tolerances};
use multipop_core::network::{condition_gamma_of, IncidenceMatrix};
use multipop_core::solver::{self, MultistartParams, SolverParams};
use multipop_core::{fixtures, Assignment, CostExpr, ExtReal, Model, Monomial, Network};
use num_rational::Ratio;
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

pub type Check = Result<(), TestCaseError>;

/// Fixed-seed configuration for `proptest!` blocks.
pub fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

/// Runs `check` on `cases` values of `strategy` with a fixed seed.
pub fn run<S: Strategy>(cases: u32, seed: u64, strategy: S, check: impl Fn(S::Value) -> Check) -> Result<(), String> {
    let config = Config { cases, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new(config);
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

pub fn model(name: &str) -> Model {
    Model::new(&fixtures::by_name(name, 0.0).expect("fixture")).expect("valid fixture")
}

/// Two-population fixtures with monotone, differentiable costs.
pub const MONOTONE: [&str; 7] = ["net_a", "net_b", "net_c", "net_c5", "net_d", "net_d6", "net_free_shared"];

pub fn monotone_models() -> &'static [(&'static str, Model)] {
    static M: OnceLock<Vec<(&'static str, Model)>> = OnceLock::new();
    M.get_or_init(|| MONOTONE.iter().map(|&n| (n, model(n))).collect())
}

/// A monotone fixture, with `net_a` and `net_b` at a random delay.
pub fn monotone_fixture() -> impl Strategy<Value = (String, Model)> {
    (0..MONOTONE.len(), 0.0..1.0f64).prop_map(|(k, delta)| {
        let name = MONOTONE[k];
        let delta = match name {
            "net_a" => delta,
            "net_b" => delta * 0.5,
            _ => 0.0,
        };
        let net = fixtures::by_name(name, delta).unwrap();
        (format!("{name}({delta})"), Model::new(&net).unwrap())
    })
}

// ---- costs

fn leaf(pops: usize, bounded: bool) -> BoxedStrategy<CostExpr> {
    let constant = (0.0..5.0f64).prop_map(CostExpr::Constant);
    let affine = (0.0..5.0f64, vec(0.0..3.0f64, 0..=pops)).prop_map(|(c, v)| CostExpr::affine(c, v));
    let mono = (0.0..3.0f64, vec(0u32..4, 0..=pops)).prop_map(|(c, e)| Monomial::new(c, e));
    let poly = vec(mono, 1..4).prop_map(CostExpr::Poly);
    let congestion = (vec(0.0..2.0f64, 1..=pops), 0.2..3.0f64).prop_map(move |(w, cap)| {
        // bounded forms keep s <= 0.8 cap on the whole cube
        let cap = if bounded { 0.2 + 1.25 * w.iter().sum::<f64>() } else { cap };
        CostExpr::congestion(w, cap)
    });
    prop_oneof![constant, affine, poly, congestion].boxed()
}

/// Random cost expression over `pops` flows with nonnegative coefficients.
/// With `bounded`, every congestion term stays finite on `[0,1]^pops`.
pub fn monotone_expr(pops: usize, bounded: bool) -> BoxedStrategy<CostExpr> {
    leaf(pops, bounded)
        .prop_recursive(3, 16, 4, |inner| {
            prop_oneof![
                vec(inner.clone(), 1..4).prop_map(CostExpr::Sum),
                (0.0..3.0f64, inner).prop_map(|(c, e)| CostExpr::scale(c, e)),
            ]
        })
        .boxed()
}

pub fn unit_flows(pops: usize) -> impl Strategy<Value = Vec<f64>> {
    vec(prop_oneof![1 => Just(0.0), 1 => Just(1.0), 6 => 0.0..=1.0f64], pops)
}

/// Class C: `eval_cost` is weakly increasing along every ordered pair.
pub fn check_monotone_expr((expr, x, d): (CostExpr, Vec<f64>, Vec<f64>)) -> Check {
    let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| (a + b).min(1.0)).collect();
    let fx = eval_cost(&expr, &x).unwrap();
    let fy = eval_cost(&expr, &y).unwrap();
    prop_assert!(fx <= fy, "{expr:?}: f({x:?}) = {fx} > f({y:?}) = {fy}");
    prop_assert!(expr.is_structurally_monotone());
    Ok(())
}

pub fn monotone_cases() -> impl Strategy<Value = (CostExpr, Vec<f64>, Vec<f64>)> {
    (monotone_expr(3, false), unit_flows(3), vec(prop_oneof![Just(0.0), 0.0..1.0f64], 3))
}

pub const FD_STEP: f64 = 1e-6;

/// Analytic partial against a central difference with step [`FD_STEP`].
pub fn check_partial((expr, x, p): (CostExpr, Vec<f64>, usize)) -> Check {
    let mut up = x.clone();
    let mut down = x.clone();
    up[p] += FD_STEP;
    down[p] -= FD_STEP;
    let f = |v: &[f64]| eval_cost(&expr, v).unwrap().value().expect("bounded forms are finite");
    let fd = (f(&up) - f(&down)) / (2.0 * FD_STEP);
    let exact = eval_partial(&expr, &x, p).unwrap();
    let tol = f64::max(1e-6, 1e-6 * exact.abs());
    prop_assert!((fd - exact).abs() <= tol, "{expr:?} at {x:?}, p = {p}: analytic {exact}, difference {fd}");
    Ok(())
}

pub fn partial_cases() -> impl Strategy<Value = (CostExpr, Vec<f64>, usize)> {
    (monotone_expr(3, true), vec(1e-5..(1.0 - 1e-5), 3), 0..3usize)
}

// ---- simplices and assignments

pub fn simplex(n: usize) -> BoxedStrategy<Vec<f64>> {
    prop_oneof![
        4 => vec(0.0..1.0f64, n),
        1 => (0..n).prop_map(move |k| (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect()),
        2 => vec(prop_oneof![Just(0.0), 0.0..1.0f64], n),
    ]
    .prop_map(move |v| {
        let s: f64 = v.iter().sum();
        if s > 0.0 {
            v.iter().map(|x| x / s).collect()
        } else {
            vec![1.0 / n as f64; n]
        }
    })
    .boxed()
}

pub fn assignment(counts: &[usize]) -> BoxedStrategy<Assignment> {
    counts
        .iter()
        .map(|&n| simplex(n))
        .collect::<Vec<_>>()
        .prop_map(|s| Assignment::new(s).unwrap())
        .boxed()
}

/// A model together with two assignments on it.
pub fn fixture_with_points() -> impl Strategy<Value = (String, Model, Assignment, Assignment)> {
    monotone_fixture().prop_flat_map(|(name, m)| {
        let counts = m.route_counts();
        (Just(name), Just(m), assignment(&counts), assignment(&counts))
    })
}

/// Replaces every cost of a fixture by a random monotone expression.
pub fn random_cost_network() -> impl Strategy<Value = Network> {
    (0..MONOTONE.len(), vec(monotone_expr(2, false), 12)).prop_map(|(k, exprs)| {
        let mut net = fixtures::by_name(MONOTONE[k], 0.0).unwrap();
        let mut it = exprs.into_iter().cycle();
        for pop in &mut net.populations {
            for cost in pop.costs.values_mut() {
                *cost = it.next().unwrap();
            }
        }
        net
    })
}

// ---- linear algebra oracles

/// Rank over the rationals by Gaussian elimination.
pub fn rational_rank(rows: &[Vec<u8>], cols: usize) -> usize {
    let mut a: Vec<Vec<Ratio<i64>>> =
        rows.iter().map(|r| r.iter().map(|&x| Ratio::from_integer(i64::from(x))).collect()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..a.len()).find(|&r| a[r][c] != Ratio::from_integer(0)) else { continue };
        a.swap(rank, pivot);
        for r in 0..a.len() {
            if r != rank && a[r][c] != Ratio::from_integer(0) {
                let f = a[r][c] / a[rank][c];
                for k in c..cols {
                    let v = a[rank][k];
                    a[r][k] -= f * v;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn zero_one_matrix() -> impl Strategy<Value = (Vec<Vec<u8>>, usize)> {
    (1..9usize, 1..7usize).prop_flat_map(|(rows, cols)| (vec(vec(0u8..2, cols), rows), Just(cols)))
}

/// `Gamma^T M Gamma` for a diagonal `M`.
pub fn gram(g: &[Vec<u8>], cols: usize, m: &[f64]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; cols]; cols];
    for (row, &w) in g.iter().zip(m) {
        for i in 0..cols {
            for j in 0..cols {
                if row[i] == 1 && row[j] == 1 {
                    out[i][j] += w;
                }
            }
        }
    }
    out
}

pub fn check_gamma_rank((rows, cols): (Vec<Vec<u8>>, usize)) -> Check {
    let g = IncidenceMatrix::from_rows(rows.clone(), cols);
    let ids: Vec<String> = (0..rows.len()).map(|h| format!("r{h}")).collect();
    if condition_gamma_of(&g, &ids).holds {
        prop_assert_eq!(rational_rank(&rows, cols), cols);
    }
    Ok(())
}

pub fn check_matrix_inequality((rows, cols, m): (Vec<Vec<u8>>, usize, Vec<f64>)) -> Check {
    let a = gram(&rows, cols, &m);
    for j in 0..cols {
        for i in 0..cols {
            prop_assert!(a[j][j] >= a[j][i], "({j},{j}) = {} < ({j},{i}) = {}", a[j][j], a[j][i]);
        }
    }
    Ok(())
}

pub fn matrix_with_diagonal() -> impl Strategy<Value = (Vec<Vec<u8>>, usize, Vec<f64>)> {
    zero_one_matrix().prop_flat_map(|(rows, cols)| {
        let n = rows.len();
        (Just(rows), Just(cols), vec(prop_oneof![Just(0.0), 0.0..10.0f64], n))
    })
}

/// Smallest eigenvalue of `[[a, b], [b, c]]`, and the largest.
pub fn eigen_2x2(a: f64, b: f64, c: f64) -> (f64, f64) {
    let mid = 0.5 * (a + c);
    let r = (0.5 * (a - c)).hypot(b);
    let hi = mid + r;
    // stable smaller root from the determinant
    let lo = if hi > 0.0 { (a * c - b * b) / hi } else { mid - r };
    (lo, hi)
}

/// Four nonnegative entries, including zeros and exact boundary cases.
pub fn road_entries() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    let entry = || prop_oneof![2 => Just(0.0), 5 => 1e-3..10.0f64];
    prop_oneof![
        4 => (entry(), entry(), entry(), entry()),
        // 4 Qh Qc = (Ph + Pc)^2
        1 => (1e-2..3.0f64, 1e-2..3.0f64, 0.0..1.0f64).prop_map(|(x, y, t)| {
            let s = 2.0 * x * y;
            (x * x, t * s, (1.0 - t) * s, y * y)
        }),
    ]
}

pub fn psd_by_eigen(qh: f64, ph: f64, pc: f64, qc: f64) -> bool {
    let (lo, hi) = eigen_2x2(qh, 0.5 * (ph + pc), qc);
    lo >= -1e-12 * hi.abs().max(f64::MIN_POSITIVE)
}

pub fn check_classification((qh, ph, pc, qc): (f64, f64, f64, f64)) -> Check {
    let case = classify_road(qh, ph, pc, qc);
    prop_assert_eq!(case.admissible(), psd_by_eigen(qh, ph, pc, qc), "entries {:?} classified {:?}", (qh, ph, pc, qc), case);
    Ok(())
}

// ---- segment identities

/// Pulls both points toward the all-last-route vertex until every road cost
/// stays finite with margin on the whole path.
pub fn finite_segment(m: &Model, a: &Assignment, b: &Assignment) -> (Assignment, Assignment) {
    let counts = m.route_counts();
    let last: Vec<usize> = counts.iter().map(|n| n - 1).collect();
    let target = Assignment::vertex(&counts, &last);
    for k in 0..=8 {
        let w = k as f64 / 8.0;
        let (x, y) = (a.blend(&target, w), b.blend(&target, w));
        if path_has_margin(m, &x, &y) {
            return (x, y);
        }
    }
    (target.clone(), target)
}

fn path_has_margin(m: &Model, a: &Assignment, b: &Assignment) -> bool {
    let mid = Assignment::new(vec![a.population(0).to_vec(), b.population(1).to_vec()]).unwrap();
    let corners = [m.flows(a).unwrap(), m.flows(&mid).unwrap(), m.flows(b).unwrap()];
    (0..m.roads()).all(|h| {
        let eta: Vec<f64> = (0..m.populations())
            .map(|p| (corners.iter().map(|c| c[h][p]).fold(0.0, f64::max) * 1.5).min(1.0))
            .collect();
        (0..m.populations()).all(|p| m.road_cost(h, p, &eta).is_finite())
    })
}

fn times(m: &Model, theta: &Assignment) -> Vec<Vec<f64>> {
    equilibrium::route_times(m, theta)
        .unwrap()
        .times
        .into_iter()
        .map(|t| t.into_iter().map(|x| x.value().expect("finite region")).collect())
        .collect()
}

/// The four leg identities between segment matrices and route times.
pub fn check_reconstruction((name, m, a, b): (String, Model, Assignment, Assignment)) -> Check {
    let (a, b) = finite_segment(&m, &a, &b);
    let sm = segment_matrices(&m, &a, &b, segment::DEFAULT_NODES).unwrap();
    // check moves first (hat at theta'), then hat (check at theta'')
    let mid = Assignment::new(vec![a.population(0).to_vec(), b.population(1).to_vec()]).unwrap();
    let (ta, tm, tb) = (times(&m, &a), times(&m, &mid), times(&m, &b));
    for p in 0..2 {
        for (q, (hi, lo)) in [(0, (&tb, &tm)), (1, (&tm, &ta))] {
            let inc = sm.route_increment(&m, p, q);
            for i in 0..inc.len() {
                let direct = hi[p][i] - lo[p][i];
                prop_assert!(
                    (direct - inc[i]).abs() <= 1e-8,
                    "{name}: population {p}, leg {q}, route {i}: direct {direct}, matrices {}",
                    inc[i]
                );
            }
        }
        for i in 0..ta[p].len() {
            let total: f64 = (0..2).map(|q| sm.route_increment(&m, p, q)[i]).sum();
            prop_assert!((tb[p][i] - ta[p][i] - total).abs() <= 1e-8);
        }
    }
    for block in sm.blocks.iter().flatten() {
        prop_assert!(block.iter().all(|&x| x >= 0.0));
    }
    Ok(())
}

// ---- fixed-point map and predicates

pub fn check_map_into_simplex((net, theta_seed): (Network, Vec<Vec<f64>>)) -> Check {
    let m = Model::new(&net).unwrap();
    let theta = Assignment::new(theta_seed).unwrap();
    let image = solver::fp_map(&m, &theta).unwrap();
    prop_assert_eq!(image.route_counts(), m.route_counts());
    for v in image.shares() {
        prop_assert!(v.iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
    Ok(())
}

pub fn map_cases() -> impl Strategy<Value = (Network, Vec<Vec<f64>>)> {
    random_cost_network().prop_flat_map(|net| {
        let s: Vec<BoxedStrategy<Vec<f64>>> = net.route_counts().into_iter().map(simplex).collect();
        (Just(net), s)
    })
}

/// Verified solver outputs of every fixture, from several seeds.
pub fn solution_pool() -> &'static BTreeMap<&'static str, Vec<Assignment>> {
    static POOL: OnceLock<BTreeMap<&'static str, Vec<Assignment>>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut pool = BTreeMap::new();
        for name in fixtures::NAMES {
            let m = model(name);
            let params = SolverParams { allow_nonmonotone: name == "net_p", ..SolverParams::default() };
            let mut found = Vec::new();
            for seed in 0..3 {
                let ms = MultistartParams { seed, ..MultistartParams::default() };
                let starts = solver::multistart_points(&m.route_counts(), &ms);
                // grid corners and barycenter only once
                let skip = if seed == 0 { 0 } else { starts.len() - ms.random_starts };
                for s in &starts[skip..] {
                    let r = solver::solve_fixed_point(&m, s, &params).unwrap();
                    if r.success() {
                        found.push(r.assignment);
                    }
                }
            }
            pool.insert(name, found);
        }
        pool
    })
}

/// Points where the Nash test is likely to pass: pool members nudged by at
/// most `1e-12`, plus random points and vertices.
pub fn nash_candidates() -> impl Strategy<Value = (&'static str, Assignment)> {
    (0..MONOTONE.len(), any::<prop::sample::Index>(), 0u8..3, 0.0..1e-12f64).prop_flat_map(|(k, idx, mode, w)| {
        let name = MONOTONE[k];
        let m = &monotone_models()[k].1;
        let counts = m.route_counts();
        let pool = &solution_pool()[name];
        (Just(name), Just((idx, mode, w, pool.clone(), counts.clone())), assignment(&counts)).prop_map(
            |(name, (idx, mode, w, pool, counts), random)| {
                let theta = match mode {
                    0 if !pool.is_empty() => idx.get(&pool).blend(&random, w),
                    1 => {
                        let routes: Vec<usize> = counts.iter().map(|&n| idx.index(n)).collect();
                        Assignment::vertex(&counts, &routes)
                    }
                    _ => random,
                };
                (name, theta)
            },
        )
    })
}

/// Nash at a tight tolerance implies a fixed point of the map.
pub fn check_nash_is_fixed((name, theta): (&'static str, Assignment)) -> Check {
    let m = &monotone_models().iter().find(|(n, _)| *n == name).unwrap().1;
    let tol = Tolerances::default().with_time(1e-10);
    if equilibrium::is_nash(m, &theta, &tol).unwrap().holds {
        let r = theta.distance_inf(&solver::fp_map(m, &theta).unwrap());
        prop_assert!(r < 1e-9, "{name}: Nash point {theta:?} has residual {r}");
    }
    Ok(())
}

/// Pairs of verified equilibria of one fixture.
pub fn pool_pairs() -> impl Strategy<Value = (&'static str, usize, usize)> {
    (0..fixtures::NAMES.len(), any::<prop::sample::Index>(), any::<prop::sample::Index>()).prop_map(|(k, i, j)| {
        let name = fixtures::NAMES[k];
        let n = solution_pool()[name].len().max(1);
        (name, i.index(n), j.index(n))
    })
}

pub fn check_unique0_vanishes((name, i, j): (&'static str, usize, usize)) -> Check {
    let pool = &solution_pool()[name];
    if pool.is_empty() {
        return Err(TestCaseError::fail(format!("{name}: no verified equilibrium")));
    }
    let m = model(name);
    let r = multipop_core::analysis::check_unique0(&m, &pool[i], &pool[j], &Tolerances::default()).unwrap();
    prop_assert!(r.iter().all(|x| x.abs() < 1e-6), "{name}: residuals {r:?}");
    Ok(())
}

pub const EPS_GRID: [f64; 4] = [1e-3, 1e-2, 0.1, 0.25];

/// Moving mass off route `i` never slows `i` down, and moving it onto `j`
/// never speeds `j` up.
pub fn check_shift_monotone((name, m, theta, p, i, j, k): (String, Model, Assignment, usize, usize, usize, usize)) -> Check {
    let n = m.route_counts()[p % 2];
    let (p, i, j) = (p % 2, i % n, j % n);
    let eps = EPS_GRID[k % EPS_GRID.len()];
    let Some(moved) = theta.shifted(p, i, j, eps) else { return Ok(()) };
    let before = equilibrium::route_times(&m, &theta).unwrap().times;
    let after = equilibrium::route_times(&m, &moved).unwrap().times;
    if before[p][i].is_infinite() {
        return Ok(());
    }
    prop_assert!(le(after[p][i], before[p][i]), "{name}: route {i} slowed from {} to {}", before[p][i], after[p][i]);
    prop_assert!(le(before[p][j], after[p][j]), "{name}: route {j} sped up from {} to {}", before[p][j], after[p][j]);
    Ok(())
}

/// `a <= b` up to rounding.
pub fn le(a: ExtReal, b: ExtReal) -> bool {
    match (a.value(), b.value()) {
        (Some(x), Some(y)) => x <= y + 1e-12 * (1.0 + y.abs()),
        _ => a <= b,
    }
}

pub fn shift_cases() -> impl Strategy<Value = (String, Model, Assignment, usize, usize, usize, usize)> {
    fixture_with_points().prop_flat_map(|(name, m, a, _)| (Just(name), Just(m), Just(a), 0..2usize, 0..3usize, 0..3usize, 0..4usize))
}

pub const SIGMA_STEPS: usize = 20;

/// `sigma -> T_pj(sigma e_j + (1 - sigma) theta_p)` is non-decreasing.
pub fn check_segment_monotone((name, m, theta, p, j, _, _): (String, Model, Assignment, usize, usize, usize, usize)) -> Check {
    let p = p % 2;
    let n = m.route_counts()[p];
    let j = j % n;
    let mut prev = ExtReal::ZERO;
    for k in 0..=SIGMA_STEPS {
        let s = k as f64 / SIGMA_STEPS as f64;
        let v: Vec<f64> =
            theta.population(p).iter().enumerate().map(|(i, &x)| (1.0 - s) * x + if i == j { s } else { 0.0 }).collect();
        let t = equilibrium::route_times(&m, &Assignment::new(theta.with_population(p, v).into_shares()).unwrap())
            .unwrap()
            .times[p][j];
        prop_assert!(le(prev, t), "{name}: population {p} route {j} drops from {prev} to {t} at sigma = {s}");
        prev = t;
    }
    Ok(())
}

/// `eps-Nash => Nash => equilibrium` on every report.
pub fn check_predicate_order((name, m, theta, _): (String, Model, Assignment, Assignment)) -> Check {
    let r = equilibrium::verify(&m, &theta, None, false, &Tolerances::default()).unwrap();
    prop_assert!(!r.is_eps_nash || r.is_nash, "{name}");
    prop_assert!(!r.is_nash || r.is_equilibrium, "{name}");
    Ok(())
}
