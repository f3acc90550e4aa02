//! Acceptance suite: one check per acceptance criterion, each printing a
//! single PASS/FAIL line. Runs as a plain binary so the report is always
//! visible; a non-matching positional argument skips every criterion.
//!
//!     cargo test -p colony-core --release --test acceptance
//!     cargo test -p colony-core --test acceptance -- c05

use std::cell::OnceCell;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use colony_core::aco::{two_opt, AntDecay, Contribution};
use colony_core::experiments::{
    community_curves, error_curve, mean_stderr, paired_difference, run_scenario, stage_grid, train_from, train_population, ErrorCurve,
    EvalConfig, Model, Scenario, ScenarioConfig, SurvivalRule, TrainingConfig,
};
use colony_core::population::{summarize, Axis, ParamGrid};
use colony_core::rng;
use colony_core::tsp::{exact_optimum, is_permutation, nearest_neighbor_tour, Instance, ReferenceCache, RegionSpec, Tour};
use colony_core::ColonyConfig;
use rand::Rng;

const ONE_MINUTE: Duration = Duration::from_secs(60);

// criterion 1
const ORACLE_INSTANCES: usize = 100;
const ORACLE_TOL: f64 = 1e-9;
// criterion 2
const TWO_OPT_INSTANCES: usize = 100;
const TWO_OPT_N: usize = 50;
// criterion 3
const SCALING_INSTANCES: usize = 50;
const GREEDY_BAND: (f64, f64) = (1.6, 2.4);
const RANDOM_BAND: (f64, f64) = (3.5, 4.5);
// criterion 4
const SHIFT_SEEDS: [u64; 3] = [101, 202, 303];
const SHIFT_MAX_GRAPHS: usize = 500;
const SHIFT_T_MAX: usize = 200;
const SHIFT_MIN: f64 = 0.2;
// criteria 5, 6, 8
const EVAL_N: usize = 100;
const EVAL_T: usize = 1000;
const EVAL_GRAPHS: usize = 50;
const PLAIN_BAND: (f64, f64) = (0.003, 0.030);
const SPEEDUP_BAND: (f64, f64) = (0.0002, 0.012);
const COMMUNITY_GRAPHS: usize = 100;
const COMMUNITY_SEPARATION: f64 = 2.0;
// criterion 7
const STAGE_GAP: f64 = 0.2;
// criterion 8
const HASTY_BAND: (f64, f64) = (0.010, 0.040);
const HASTY_EARLY_T: usize = 25;
// criterion 9
const MIX_TOL: f64 = 1e-9;
const POOL: usize = 4000;
// criterion 10
const THREAD_COUNTS: [usize; 3] = [1, 4, 16];

// the normally trained N=100 grid shared by criteria 5-8
const NORMAL_SEED: u64 = 11;
const NORMAL_T_MAX: usize = 1000;
const NORMAL_MAX_GRAPHS: usize = 500;
const STAGED_MAX_GRAPHS: usize = 300;
const HASTY_SEED: u64 = 12;
const STAGED_SEED: u64 = 13;
const EVAL_SEED: u64 = 99;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

fn pct(x: f64) -> String {
    format!("{:.3}%", 100.0 * x)
}

fn in_band(x: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&x)
}

fn square(n: usize, seed: u64) -> Instance {
    Instance::generate(n, RegionSpec::unit_square(), seed).expect("instance")
}

fn column_mean(curve: &ErrorCurve, t: usize, graphs: usize) -> (Vec<f64>, f64) {
    let col: Vec<f64> = curve.per_graph[..graphs].iter().map(|g| g[t - 1]).collect();
    let mean = mean_stderr(&col).0;
    (col, mean)
}

/// Expensive artifacts, built on first use and shared between criteria.
struct Lab {
    cache: ReferenceCache,
    normal: OnceCell<Model>,
    communities: OnceCell<Vec<ErrorCurve>>,
    hasty: OnceCell<ErrorCurve>,
}

impl Lab {
    fn eval(&self, graphs: usize) -> EvalConfig {
        EvalConfig {
            n: EVAL_N,
            n_graphs: graphs,
            colony: ColonyConfig { t_max: EVAL_T, ..ColonyConfig::default() },
            ..EvalConfig::default()
        }
    }

    fn normal_config(&self) -> TrainingConfig {
        TrainingConfig {
            n: EVAL_N,
            colony: ColonyConfig { t_max: NORMAL_T_MAX, ..ColonyConfig::default() },
            max_graphs: NORMAL_MAX_GRAPHS,
            ..TrainingConfig::default()
        }
    }

    fn normal(&self) -> &Model {
        self.normal.get_or_init(|| {
            let out = train_population(&self.normal_config(), NORMAL_SEED, &mut |_| {}).expect("normal training");
            let s = summarize(&out.model.flattened());
            println!(
                "    normal N={EVAL_N} grid: {} graphs, converged={}, mean alpha {:.3}, mean beta {:.3}",
                out.graphs_used, out.converged, s.mean_alpha, s.mean_beta
            );
            out.model
        })
    }

    /// k = 1 and k = 2 curves on `COMMUNITY_GRAPHS` graphs; graph g and
    /// community 0 match a single-community evaluation with the same seed.
    fn communities(&self) -> &[ErrorCurve] {
        self.communities.get_or_init(|| {
            let cfg = EvalConfig { communities: 2, ..self.eval(COMMUNITY_GRAPHS) };
            community_curves(self.normal(), &cfg, EVAL_SEED, &self.cache).expect("community curves")
        })
    }

    fn plain(&self) -> &ErrorCurve {
        &self.communities()[0]
    }

    fn hasty(&self) -> &ErrorCurve {
        self.hasty.get_or_init(|| {
            let cfg = TrainingConfig { survival: SurvivalRule::EarlyOnly, ..self.normal_config() };
            let out = train_population(&cfg, HASTY_SEED, &mut |_| {}).expect("early-only training");
            let s = summarize(&out.model.flattened());
            println!(
                "    early-only grid: {} graphs, converged={}, mean alpha {:.3}, mean beta {:.3}",
                out.graphs_used, out.converged, s.mean_alpha, s.mean_beta
            );
            let mut eval = self.eval(EVAL_GRAPHS);
            eval.colony.ant_decay = Some(AntDecay::default());
            error_curve(&out.model, &eval, EVAL_SEED, &self.cache).expect("early-only curve")
        })
    }
}

fn brute_force(inst: &Instance) -> f64 {
    // Heap's algorithm over the vertices after 0
    let n = inst.n();
    let mut rest: Vec<usize> = (1..n).collect();
    let len = |rest: &[usize]| {
        let mut total = inst.dist(0, rest[0]) + inst.dist(rest[rest.len() - 1], 0);
        for w in rest.windows(2) {
            total += inst.dist(w[0], w[1]);
        }
        total
    };
    let mut best = len(&rest);
    let k = rest.len();
    let mut c = vec![0usize; k];
    let mut i = 1;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                rest.swap(0, i);
            } else {
                rest.swap(c[i], i);
            }
            best = best.min(len(&rest));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

fn c01_oracle(_: &Lab) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..ORACLE_INSTANCES {
        let n = 5 + i % 5;
        let inst = square(n, rng::derive_seed(1, &[i as u64]));
        let (tour, len) = exact_optimum(&inst).expect("exact");
        assert!(is_permutation(tour.order(), n));
        worst = worst.max((len - brute_force(&inst)).abs());
    }
    let took = start.elapsed();
    Outcome::new(
        worst <= ORACLE_TOL && took < ONE_MINUTE,
        format!("{ORACLE_INSTANCES} instances n=5..9, largest |held-karp - enumeration| = {worst:.3e}"),
    )
}

/// Every improving reversal still present in `order`, scanned independently.
fn improving_pairs(inst: &Instance, order: &[usize]) -> usize {
    let n = order.len();
    let mut found = 0;
    for i in 0..n {
        for j in i + 1..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b, c, d) = (order[(i + n - 1) % n], order[i], order[j], order[(j + 1) % n]);
            if inst.dist(a, b) + inst.dist(c, d) > inst.dist(a, c) + inst.dist(b, d) {
                found += 1;
            }
        }
    }
    found
}

fn c02_two_opt(_: &Lab) -> Outcome {
    let start = Instant::now();
    let (mut longer, mut leftover, mut broken) = (0, 0, 0);
    for i in 0..TWO_OPT_INSTANCES {
        let inst = square(TWO_OPT_N, rng::derive_seed(2, &[i as u64]));
        let mut r = rng::stream(2, &[i as u64, 1]);
        let input = Tour::random(&inst, &mut r);
        let out = two_opt(&inst, &input);
        longer += usize::from(out.length() > input.length());
        leftover += improving_pairs(&inst, out.order());
        broken += usize::from(!is_permutation(out.order(), TWO_OPT_N));
    }
    let took = start.elapsed();
    Outcome::new(
        longer == 0 && leftover == 0 && broken == 0 && took < ONE_MINUTE,
        format!("{TWO_OPT_INSTANCES} N={TWO_OPT_N} instances: {longer} got longer, {leftover} improving pairs left, {broken} invalid"),
    )
}

fn c03_greedy_scaling(_: &Lab) -> Outcome {
    let start = Instant::now();
    let means = |n: usize| {
        let (mut greedy, mut random) = (0.0, 0.0);
        for i in 0..SCALING_INSTANCES {
            let inst = square(n, rng::derive_seed(3, &[n as u64, i as u64]));
            greedy += nearest_neighbor_tour(&inst, 0).expect("greedy").length();
            let mut r = rng::stream(3, &[n as u64, i as u64, 1]);
            random += Tour::random(&inst, &mut r).length();
        }
        (greedy / SCALING_INSTANCES as f64, random / SCALING_INSTANCES as f64)
    };
    let (g100, r100) = means(100);
    let (g400, r400) = means(400);
    let (gr, rr) = (g400 / g100, r400 / r100);
    let took = start.elapsed();
    Outcome::new(
        in_band(gr, GREEDY_BAND) && in_band(rr, RANDOM_BAND) && took < ONE_MINUTE,
        format!("greedy ratio N=400/N=100 {gr:.3}, random-tour ratio {rr:.3}"),
    )
}

fn c04_alpha_shift(_: &Lab) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for seed in SHIFT_SEEDS {
        let mean_alpha = |n: usize| {
            let cfg = TrainingConfig {
                n,
                colony: ColonyConfig { t_max: SHIFT_T_MAX, ..ColonyConfig::default() },
                max_graphs: SHIFT_MAX_GRAPHS,
                ..TrainingConfig::default()
            };
            summarize(&train_population(&cfg, seed, &mut |_| {}).expect("training").model.flattened()).mean_alpha
        };
        let (small, large) = (mean_alpha(20), mean_alpha(100));
        ok &= large - small > SHIFT_MIN;
        parts.push(format!("seed {seed}: {small:.3} -> {large:.3}"));
    }
    Outcome::new(ok, format!("mean alpha N=20 -> N=100: {}", parts.join("; ")))
}

fn c05_residual_error(lab: &Lab) -> Outcome {
    let (plain, plain_mean) = column_mean(lab.plain(), EVAL_T, EVAL_GRAPHS);
    let mut cfg = lab.eval(EVAL_GRAPHS);
    cfg.colony.speedup = true;
    let fast_curve = error_curve(lab.normal(), &cfg, EVAL_SEED, &lab.cache).expect("speedup curve");
    let (fast, fast_mean) = column_mean(&fast_curve, EVAL_T, EVAL_GRAPHS);
    let (diff, se) = paired_difference(&fast, &plain);
    Outcome::new(
        in_band(plain_mean, PLAIN_BAND) && in_band(fast_mean, SPEEDUP_BAND) && diff < 0.0,
        format!(
            "eps(1000) without speedup {}, with speedup {}, paired difference {} (se {})",
            pct(plain_mean),
            pct(fast_mean),
            pct(diff),
            pct(se)
        ),
    )
}

fn c06_communities(lab: &Lab) -> Outcome {
    let curves = lab.communities();
    let (one, one_mean) = column_mean(&curves[0], EVAL_T, COMMUNITY_GRAPHS);
    let (two, two_mean) = column_mean(&curves[1], EVAL_T, COMMUNITY_GRAPHS);
    let (diff, se) = paired_difference(&one, &two);
    let separation = if se > 0.0 { diff / se } else { 0.0 };
    Outcome::new(
        two_mean < one_mean && separation >= COMMUNITY_SEPARATION,
        format!("eps(1000) k=1 {}, k=2 {}, reduction {:.2} standard errors", pct(one_mean), pct(two_mean), separation),
    )
}

fn c07_stage_ordering(lab: &Lab) -> Outcome {
    let cfg = TrainingConfig { staged: true, max_graphs: STAGED_MAX_GRAPHS, ..lab.normal_config() };
    let init = cfg.model_from(lab.normal().flattened()).expect("staged warm start");
    let out = train_from(&cfg, init, STAGED_SEED, &mut |_| {}).expect("staged training");
    let first = summarize(stage_grid(&out.model, 0).expect("first bucket")).mean_beta;
    let last = summarize(stage_grid(&out.model, 3).expect("last bucket")).mean_beta;
    Outcome::new(
        first - last > STAGE_GAP,
        format!("{} graphs: mean beta t=1-5 {first:.3}, t=101-1000 {last:.3}, gap {:.3}", out.graphs_used, first - last),
    )
}

fn c08_hasty_penalty(lab: &Lab) -> Outcome {
    let (_, normal_final) = column_mean(lab.plain(), EVAL_T, EVAL_GRAPHS);
    let (_, normal_early) = column_mean(lab.plain(), HASTY_EARLY_T, EVAL_GRAPHS);
    let (_, hasty_final) = column_mean(lab.hasty(), EVAL_T, EVAL_GRAPHS);
    let (_, hasty_early) = column_mean(lab.hasty(), HASTY_EARLY_T, EVAL_GRAPHS);
    Outcome::new(
        in_band(hasty_final, HASTY_BAND) && hasty_final > normal_final && hasty_early < normal_early,
        format!(
            "eps(1000) early-only+decay {} vs normal {}; eps(25) {} vs {}",
            pct(hasty_final),
            pct(normal_final),
            pct(hasty_early),
            pct(normal_early)
        ),
    )
}

fn random_grid<R: Rng>(r: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..51 * 51).map(|_| r.random::<f64>().powi(3)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn c09_mixing_identities(_: &Lab) -> Outcome {
    let ax = Axis::default();
    let mut r = rng::stream(9, &[0]);
    let contributors = |r: &mut rng::StreamRng, count: usize| -> Vec<Contribution> {
        (0..count)
            .map(|_| Contribution {
                t: r.random_range(1..=1000),
                params: colony_core::AntParams { alpha: r.random_range(0..51) as f64 / 10.0, beta: r.random_range(0..51) as f64 / 10.0 },
                length: 1.0,
                improvement: 0.0,
            })
            .collect()
    };
    let (mut identity, mut replacement, mut contraction) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let wa = random_grid(&mut r);
        let wb = random_grid(&mut r);
        let a = ParamGrid::from_weights(ax, ax, wa.clone()).unwrap();
        let b = ParamGrid::from_weights(ax, ax, wb.clone()).unwrap();

        let same = a.evolve(&[], POOL).unwrap();
        identity = identity.max(same.weights().iter().zip(&wa).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));

        let full = contributors(&mut r, POOL);
        let mut counts = vec![0.0; 51 * 51];
        for c in &full {
            counts[(c.params.alpha * 10.0).round() as usize * 51 + (c.params.beta * 10.0).round() as usize] += 1.0 / POOL as f64;
        }
        let replaced = a.evolve(&full, POOL).unwrap();
        replacement = replacement.max(replaced.weights().iter().zip(&counts).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));

        let n_c = r.random_range(1..POOL);
        let cs = contributors(&mut r, n_c);
        let before: f64 = 0.5 * wa.iter().zip(&wb).map(|(x, y)| (x - y).abs()).sum::<f64>();
        let (na, nb) = (a.evolve(&cs, POOL).unwrap(), b.evolve(&cs, POOL).unwrap());
        let after: f64 = 0.5 * na.weights().iter().zip(nb.weights()).map(|(x, y)| (x - y).abs()).sum::<f64>();
        contraction = contraction.max((after - (1.0 - n_c as f64 / POOL as f64) * before).abs());
    }
    Outcome::new(
        identity <= MIX_TOL && replacement <= MIX_TOL && contraction <= MIX_TOL,
        format!("100 random grids: n_c=0 error {identity:.2e}, n_c=M error {replacement:.2e}, contraction error {contraction:.2e}"),
    )
}

fn tiny_config() -> ScenarioConfig {
    let mut cfg = ScenarioConfig { seed: 77, sizes: vec![8, 12], communities: 2, ..ScenarioConfig::default() };
    cfg.training.n = 12;
    cfg.training.colony.t_max = 60;
    cfg.training.max_graphs = 8;
    cfg.evaluation.n = 20;
    cfg.evaluation.n_graphs = 4;
    cfg.evaluation.colony.t_max = 60;
    cfg.evaluation.reference_restarts = 5;
    cfg
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .expect("run dir")
        .map(|e| {
            let e = e.expect("dir entry");
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).expect("output file"))
        })
        .collect();
    files.sort();
    files
}

fn c10_determinism(_: &Lab) -> Outcome {
    let scenarios = [Scenario::ScaleSweep, Scenario::Stage, Scenario::Speedup, Scenario::Survival, Scenario::Communities];
    let root = tempfile::tempdir().expect("temp dir");
    let cfg = tiny_config();
    let mut mismatches = Vec::new();
    let mut files = 0;
    for scenario in scenarios {
        let mut runs = Vec::new();
        for threads in THREAD_COUNTS {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("pool");
            let out = root.path().join(format!("{}_{threads}", scenario.name()));
            pool.install(|| run_scenario(scenario, &cfg, &out, &ReferenceCache::in_memory(), &mut |_| {})).expect("scenario");
            runs.push(dir_bytes(&out));
        }
        files += runs[0].len();
        for run in &runs[1..] {
            if run != &runs[0] {
                mismatches.push(scenario.name());
            }
        }
    }
    Outcome::new(
        mismatches.is_empty() && files > 0,
        format!("5 scenarios x threads {THREAD_COUNTS:?}: {files} files per thread count, mismatched scenarios {mismatches:?}"),
    )
}

type Check = fn(&Lab) -> Outcome;

const CRITERIA: [(&str, &str, Check); 10] = [
    ("c01", "oracle exactness", c01_oracle),
    ("c02", "2-opt correctness", c02_two_opt),
    ("c03", "greedy scaling", c03_greedy_scaling),
    ("c04", "alpha shift with N", c04_alpha_shift),
    ("c05", "residual error bands", c05_residual_error),
    ("c06", "multi-community reduction", c06_communities),
    ("c07", "stage ordering", c07_stage_ordering),
    ("c08", "hasty-research penalty", c08_hasty_penalty),
    ("c09", "mixing identities", c09_mixing_identities),
    ("c10", "thread-count determinism", c10_determinism),
];

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        for (id, name, _) in CRITERIA {
            println!("{id}_{}: test", name.replace(' ', "_"));
        }
        return ExitCode::SUCCESS;
    }
    let filters: Vec<&String> = args.iter().filter(|a| !a.starts_with('-')).collect();
    let selected =
        |id: &str, name: &str| filters.is_empty() || filters.iter().any(|f| id.contains(f.as_str()) || name.contains(f.as_str()));

    let lab = Lab { cache: ReferenceCache::in_memory(), normal: OnceCell::new(), communities: OnceCell::new(), hasty: OnceCell::new() };
    let (mut passed, mut failed) = (0, 0);
    for (i, (id, name, check)) in CRITERIA.iter().enumerate() {
        if !selected(id, name) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| check(&lab)))
            .unwrap_or_else(|e| Outcome::new(false, format!("panicked: {}", e.downcast_ref::<String>().cloned().unwrap_or_default())));
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {name}: {} [{:.1?}]", i + 1, outcome.detail, start.elapsed());
        if outcome.passed {
            passed += 1;
        } else {
            failed += 1;
        }
    }
    println!("acceptance: {passed} passed, {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
