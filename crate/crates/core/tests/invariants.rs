mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{check_trace, random_pattern, random_weighted};
use sgpart::baselines::{
    brute_force_optimal, four_apx, nicol_2d, pal_symmetric, two_sweep, uniform_partition,
    FourApxConfig, DEFAULT_BUDGET,
};
use sgpart::harness::{run_bench, Algorithm, BenchSpec, Instance};
use sgpart::io::ResultRow;
use sgpart::rect_index::naive_rect_load;
use sgpart::{optimize, InitMode, Objective, OptimizerConfig, Partition, Problem, RectIndex};

fn random_cuts<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut inner: Vec<usize> = (0..k - 1).map(|_| rng.gen_range(0..=n)).collect();
    inner.sort_unstable();
    let mut c = vec![0];
    c.extend(inner);
    c.push(n);
    c
}

#[test]
fn composite_tiles_match_naive_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let (m, l, n) = (
            rng.gen_range(3..14),
            rng.gen_range(3..14),
            rng.gen_range(3..14),
        );
        let a = random_weighted(&mut rng, m, l, 0.3);
        let b = random_weighted(&mut rng, l, n, 0.3);
        let k = [
            rng.gen_range(1..4),
            rng.gen_range(1..4),
            rng.gen_range(1..4),
        ];
        let problem = Problem::spgemm3d(&a, &b, k).unwrap();
        let p = Partition::new(vec![
            random_cuts(&mut rng, m, k[0]),
            random_cuts(&mut rng, l, k[1]),
            random_cuts(&mut rng, n, k[2]),
        ]);
        let tiles = problem.tile_loads(&p);
        for u in 0..k[0] {
            for w in 0..k[1] {
                for v in 0..k[2] {
                    let (ur, wr, vr) = (
                        &p.dim(0)[u..u + 2],
                        &p.dim(1)[w..w + 2],
                        &p.dim(2)[v..v + 2],
                    );
                    let want = naive_rect_load(&a, ur[0], ur[1], wr[0], wr[1])
                        + naive_rect_load(&b, wr[0], wr[1], vr[0], vr[1]);
                    assert_eq!(tiles.get(&[u, w, v]), want);
                }
            }
        }

        let s = random_weighted(&mut rng, m, m, 0.3);
        let kk = rng.gen_range(1..4);
        let problem = Problem::tri3d(&s, kk).unwrap();
        let c = random_cuts(&mut rng, m, kk);
        let tiles = problem.tile_loads(&Partition::new(vec![c.clone(), c.clone(), c.clone()]));
        for u in 0..kk {
            for w in 0..kk {
                for v in 0..kk {
                    let want = naive_rect_load(&s, c[u], c[u + 1], c[w], c[w + 1])
                        + naive_rect_load(&s, c[w], c[w + 1], c[v], c[v + 1])
                        + naive_rect_load(&s, c[u], c[u + 1], c[v], c[v + 1]);
                    assert_eq!(tiles.get(&[u, w, v]), want);
                }
            }
        }
    }
}

#[test]
fn baselines_bounded_by_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..25 {
        let (m, n) = (rng.gen_range(2..8), rng.gen_range(2..8));
        let a = random_weighted(&mut rng, m, n, 0.5);
        let (k1, k2) = (rng.gen_range(1..4), rng.gen_range(1..4));
        let problem = Problem::rpp2d(&a, k1, k2).unwrap();
        let opt = brute_force_optimal(&problem, DEFAULT_BUDGET).unwrap().load;
        let index = RectIndex::new(&a).unwrap();
        let nic = nicol_2d(&index, (k1, k2), 20).load;
        let swp = two_sweep(&index, (k1, k2)).load;
        let apx = four_apx(&index, (k1, k2), &FourApxConfig::default());
        let uni = problem
            .evaluate(&Partition::new(vec![
                uniform_partition(m, k1),
                uniform_partition(n, k2),
            ]))
            .unwrap()
            .max_load;
        for l in [nic, swp, apx.partition.load, uni] {
            assert!(l >= opt, "{l} below optimum {opt}");
        }
        assert!(nic <= 4.0 * opt && apx.target <= 4.0 * opt);
        assert!(apx.partition.load <= apx.target);
    }
}

#[test]
fn pal_is_symmetric_and_no_better_than_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let n = rng.gen_range(2..8);
        let a = random_weighted(&mut rng, n, n, 0.5);
        let k = rng.gen_range(1..4);
        let problem = Problem::srpp2d(&a, k).unwrap();
        let opt = brute_force_optimal(&problem, DEFAULT_BUDGET).unwrap().load;
        let (cuts, load) = pal_symmetric(&RectIndex::new(&a).unwrap(), k);
        let p = Partition::new(vec![cuts.clone(), cuts]);
        assert_eq!(problem.evaluate(&p).unwrap().max_load, load);
        assert!(load >= opt);
    }
}

#[test]
fn grouped_dimensions_share_cuts() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for seed in 0..6 {
        let n = rng.gen_range(6..20);
        let a = random_pattern(&mut rng, n, n, 0.3, usize::MAX);
        let config = OptimizerConfig {
            seed,
            ..Default::default()
        };
        for problem in [
            Problem::srpp2d(&a, 3).unwrap(),
            Problem::tri3d(&a, 2).unwrap(),
        ] {
            let r = optimize(&problem, &config).unwrap();
            let cuts = r.partition.cuts();
            assert!(cuts.iter().all(|c| c == &cuts[0]), "{cuts:?}");
        }
    }
}

#[test]
fn seeded_runs_repeat() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_weighted(&mut rng, 30, 25, 0.2);
    let problem = Problem::rpp2d(&a, 4, 3).unwrap();
    for init in [InitMode::Deterministic, InitMode::Random] {
        let config = OptimizerConfig {
            seed: 99,
            init,
            ..Default::default()
        };
        assert_eq!(
            optimize(&problem, &config).unwrap(),
            optimize(&problem, &config).unwrap()
        );
    }
}

fn strip_timing(rows: &[ResultRow]) -> Vec<ResultRow> {
    rows.iter()
        .map(|r| ResultRow {
            build_secs: 0.0,
            partition_secs: 0.0,
            wall_secs: 0.0,
            group_wall_secs: None,
            ..r.clone()
        })
        .collect()
}

#[test]
fn bench_rows_and_medians() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let instances = vec![Instance {
        name: "r".into(),
        inputs: vec![Arc::new(random_pattern(&mut rng, 12, 12, 0.3, usize::MAX))],
    }];
    let spec = BenchSpec {
        objective: Objective::Rpp2d,
        algorithms: vec![Algorithm::Sgo, Algorithm::Uni],
        parts: vec![vec![3, 3]],
        seeds: (0..10).collect(),
        config: OptimizerConfig::default(),
    };
    let rows = run_bench(&instances, &spec).unwrap();
    let raw = rows
        .iter()
        .filter(|r| r.kind == sgpart::io::RowKind::Raw)
        .count();
    assert_eq!((raw, rows.len() - raw), (11, 2));
    let sgo: Vec<f64> = rows[..10].iter().map(|r| r.load.unwrap()).collect();
    let mut sorted = sgo.clone();
    sorted.sort_by(f64::total_cmp);
    assert_eq!(rows[10].load, Some(sorted[4]));
    assert_eq!(rows[12].seed, None);
    assert_eq!(
        strip_timing(&rows),
        strip_timing(&run_bench(&instances, &spec).unwrap())
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sgo_runs_are_well_formed(
        seed in 0u64..1000,
        m in 2usize..14,
        n in 2usize..14,
        k1 in 1usize..5,
        k2 in 1usize..5,
        density in 0.05f64..0.8,
        det in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_weighted(&mut rng, m, n, density);
        prop_assume!(a.total_load() > 0.0);
        let problem = Problem::rpp2d(&a, k1, k2).unwrap();
        let config = OptimizerConfig {
            seed,
            init: if det { InitMode::Deterministic } else { InitMode::Random },
            max_iters: 500,
            ..Default::default()
        };
        let r = optimize(&problem, &config).unwrap();
        r.partition.validate(problem.extents(), problem.parts()).unwrap();
        prop_assert_eq!(problem.evaluate(&r.partition).unwrap().max_load, r.load);
        let window = (config.patience * (k1 + k2) as f64).ceil() as usize;
        if let Err(e) = check_trace(&r, &config, window) {
            prop_assert!(false, "{}", e);
        }
        let lower = (a.total_load() / (k1 * k2) as f64).max(a.weights().iter().copied().fold(0.0, f64::max));
        prop_assert!(r.load >= lower - 1e-9);
        let nl = problem.normalized_load(&r.partition).unwrap();
        prop_assert!((nl - r.load * (k1 * k2) as f64 / a.total_load()).abs() < 1e-12);
    }

    #[test]
    fn tile_loads_sum_to_total(seed in 0u64..1000, k1 in 1usize..6, k2 in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_weighted(&mut rng, 9, 11, 0.3);
        let problem = Problem::rpp2d(&a, k1, k2).unwrap();
        let p = Partition::new(vec![random_cuts(&mut rng, 9, k1), random_cuts(&mut rng, 11, k2)]);
        prop_assert_eq!(problem.tile_loads(&p).sum(), a.total_load());
    }
}
