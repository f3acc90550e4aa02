use colony_core::aco::{
    ant_walk, is_two_opt_fixpoint, run_colony, transition_probabilities, two_opt, FixedParams, LogDistances, LogTrail, PheromoneField,
    WalkContext,
};
use colony_core::rng;
use colony_core::tsp::{exact_optimum, is_permutation, nearest_neighbor_tour, reference_optimum, tour_length, Instance, RegionSpec, Tour};
use colony_core::{AntParams, ColonyConfig};
use proptest::prelude::*;
use rand::Rng;

fn brute_force(inst: &Instance) -> f64 {
    fn rec(inst: &Instance, order: &mut Vec<usize>, used: &mut [bool], acc: f64, best: &mut f64) {
        let n = inst.n();
        if acc >= *best {
            return;
        }
        if order.len() == n {
            let closed = acc + inst.dist(order[n - 1], order[0]);
            if closed < *best {
                *best = closed;
            }
            return;
        }
        let last = *order.last().unwrap();
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                order.push(v);
                rec(inst, order, used, acc + inst.dist(last, v), best);
                order.pop();
                used[v] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; inst.n()];
    used[0] = true;
    rec(inst, &mut vec![0], &mut used, 0.0, &mut best);
    best
}

fn square(n: usize, seed: u64) -> Instance {
    Instance::generate(n, RegionSpec::unit_square(), seed).unwrap()
}

#[test]
fn held_karp_matches_enumeration_at_nine() {
    for seed in 0..10 {
        let inst = square(9, 500 + seed);
        let (tour, len) = exact_optimum(&inst).unwrap();
        assert!(is_permutation(tour.order(), 9));
        assert!((len - brute_force(&inst)).abs() < 1e-9);
        assert!((tour_length(&inst, tour.order()).unwrap() - len).abs() < 1e-12);
    }
}

#[test]
fn reference_delegates_and_is_monotone_in_restarts() {
    let small = square(12, 3);
    assert_eq!(reference_optimum(&small, 4).unwrap(), exact_optimum(&small).unwrap().1);
    let big = square(60, 4);
    let few = reference_optimum(&big, 3).unwrap();
    let more = reference_optimum(&big, 12).unwrap();
    assert!(more <= few);
    let mut r = rng::stream(5, &[1]);
    let single = two_opt(&big, &Tour::random(&big, &mut r));
    assert!(more <= single.length() + 1e-12);
}

#[test]
fn random_walks_match_random_permutation_mean() {
    let inst = square(100, 77);
    let n = inst.n();
    let mut pair_sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            pair_sum += inst.dist(i, j);
        }
    }
    let expected = n as f64 * pair_sum / (n * (n - 1) / 2) as f64;

    let (ld, lt) = (LogDistances::new(&inst), LogTrail::new(&PheromoneField::zeros(n), 0.01));
    let ctx = WalkContext { inst: &inst, ln_dist: &ld, ln_trail: &lt };
    let mut r = rng::stream(8, &[0]);
    let mean = (0..1000).map(|_| ant_walk(&ctx, AntParams { alpha: 0.0, beta: 0.0 }, &mut r).length()).sum::<f64>() / 1000.0;
    assert!((mean / expected - 1.0).abs() < 0.05, "walk mean {mean}, permutation mean {expected}");
}

#[test]
fn three_vertex_walks_are_the_triangle() {
    let inst = Instance::from_points(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]).unwrap();
    let (ld, lt) = (LogDistances::new(&inst), LogTrail::new(&PheromoneField::zeros(3), 0.01));
    let ctx = WalkContext { inst: &inst, ln_dist: &ld, ln_trail: &lt };
    let perimeter = 1.0 + 2.0 + 5f64.sqrt();
    let mut r = rng::stream(2, &[0]);
    for _ in 0..50 {
        let p = AntParams { alpha: r.random_range(0.0..5.0), beta: r.random_range(0.0..5.0) };
        assert!((ant_walk(&ctx, p, &mut r).length() - perimeter).abs() < 1e-12);
    }
}

#[test]
fn small_colonies_find_the_optimum() {
    let cfg = ColonyConfig { t_max: 200, ..ColonyConfig::default() };
    let source = FixedParams(AntParams { alpha: 1.0, beta: 2.0 });
    let mut hits = 0;
    for run in 0..100u64 {
        let inst = square(8, 9000 + run);
        let opt = exact_optimum(&inst).unwrap().1;
        let trace = run_colony(&inst, &source, &cfg, run).unwrap();
        if trace.best_tour.length() <= opt * 1.01 {
            hits += 1;
        }
    }
    assert!(hits >= 95, "{hits} of 100 runs within 1%");
}

#[test]
fn colony_trace_invariants() {
    let inst = square(30, 12);
    let cfg = ColonyConfig { t_max: 60, speedup: true, ..ColonyConfig::default() };
    let trace = run_colony(&inst, &FixedParams(AntParams { alpha: 1.0, beta: 3.0 }), &cfg, 4).unwrap();
    let curve = trace.best_known_curve();
    assert!(curve.windows(2).all(|w| w[1] <= w[0]));
    for it in &trace.iterations {
        for c in &it.contributors {
            if it.t >= 2 {
                assert!(c.length < it.best_known_before);
            }
        }
    }
    assert!(is_two_opt_fixpoint(&inst, trace.best_tour.order()));
    assert!(is_permutation(trace.best_tour.order(), 30));
    let again = run_colony(&inst, &FixedParams(AntParams { alpha: 1.0, beta: 3.0 }), &cfg, 4).unwrap();
    assert_eq!(trace.summary_csv(), again.summary_csv());
    assert_eq!(trace.contributors_csv(), again.contributors_csv());
}

#[test]
fn scaling_coordinates_scales_lengths() {
    let inst = square(10, 41);
    let c = 3.5;
    let big = inst.scaled(c).unwrap();
    let (t1, l1) = exact_optimum(&inst).unwrap();
    let (t2, l2) = exact_optimum(&big).unwrap();
    assert!((l2 - c * l1).abs() < 1e-9);
    assert!((tour_length(&big, t1.order()).unwrap() - l2).abs() < 1e-9);
    assert!((tour_length(&inst, t2.order()).unwrap() - l1).abs() < 1e-9);

    let mut field = PheromoneField::zeros(10);
    field.set(0, 3, 0.7).unwrap();
    field.set(0, 5, 0.2).unwrap();
    let mut visited = vec![false; 10];
    visited[0] = true;
    let p = AntParams { alpha: 2.0, beta: 0.0 };
    let a = transition_probabilities(&inst, &field, 0.01, 0, &visited, p).unwrap();
    let b = transition_probabilities(&big, &field, 0.01, 0, &visited, p).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn greedy_beats_random_walk_by_a_wide_margin() {
    let inst = square(200, 6);
    let greedy = nearest_neighbor_tour(&inst, 0).unwrap();
    let mut r = rng::stream(1, &[2]);
    let random = Tour::random(&inst, &mut r);
    assert!(greedy.length() * 3.0 < random.length());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transition_probabilities_are_a_distribution(seed in 0u64..1000, alpha in 0.0f64..5.0, beta in 0.0f64..5.0, nvis in 1usize..19) {
        let inst = square(20, seed);
        let mut field = PheromoneField::zeros(20);
        let mut r = rng::stream(seed, &[9]);
        for _ in 0..30 {
            let (i, j) = (r.random_range(0..20), r.random_range(0..20));
            if i != j {
                field.set(i, j, r.random_range(0.0..2.0)).unwrap();
            }
        }
        let mut visited = vec![false; 20];
        for v in 0..nvis {
            visited[v] = true;
        }
        let probs = transition_probabilities(&inst, &field, 0.01, 0, &visited, AntParams { alpha, beta }).unwrap();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for v in 0..nvis {
            prop_assert_eq!(probs[v], 0.0);
        }
        prop_assert!(probs.iter().all(|p| *p >= 0.0));
    }

    #[test]
    fn two_opt_is_monotone_and_idempotent(seed in 0u64..10_000, n in 4usize..40) {
        let inst = square(n, seed);
        let mut r = rng::stream(seed, &[3]);
        let start = Tour::random(&inst, &mut r);
        let once = two_opt(&inst, &start);
        prop_assert!(once.length() <= start.length());
        prop_assert!(is_permutation(once.order(), n));
        prop_assert!(is_two_opt_fixpoint(&inst, once.order()));
        let twice = two_opt(&inst, &once);
        prop_assert_eq!(twice.order(), once.order());
    }

    #[test]
    fn pheromone_stays_symmetric_and_nonnegative(seed in 0u64..1000, p in 1.0f64..100.0) {
        let inst = square(12, seed);
        let mut r = rng::stream(seed, &[4]);
        let tours: Vec<Tour> = (0..3).map(|_| Tour::random(&inst, &mut r)).collect();
        let refs: Vec<&Tour> = tours.iter().collect();
        let mut field = PheromoneField::zeros(12);
        field.deposit(&inst, &refs).unwrap();
        field.evaporate(p).unwrap();
        prop_assert!(field.is_symmetric());
        for i in 0..12 {
            for j in 0..12 {
                prop_assert!(field.get(i, j) >= 0.0);
            }
        }
    }
}
