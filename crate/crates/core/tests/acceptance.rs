use std::collections::BTreeSet;
use std::fs;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use homeomatch::bench::{self, ExperimentSpec};
use homeomatch::fixture;
use homeomatch::generate::{plant_subdivision, random_labeled_graph};
use homeomatch::oracle::{all_bounded_paths, brute_force_solve, verify_mapping};
use homeomatch::paths::{PathStore, UndoToken};
use homeomatch::search::{determine, enumerate_with, Refinements, SearchConfig, Strategy};
use homeomatch::stats::{median, Summary};
use homeomatch::{enumerate_all, LabeledGraph, Mapping, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load_spec(name: &str) -> ExperimentSpec {
    let path = configs().join(format!("{name}.toml"));
    ExperimentSpec::parse(&fs::read_to_string(&path).unwrap()).unwrap()
}

fn strategies() -> [SearchConfig; 2] {
    [
        SearchConfig::with_strategy(Strategy::Ndshd1),
        SearchConfig::with_strategy(Strategy::Ndshd2),
    ]
}

fn solution_set(g1: &LabeledGraph, g2: &LabeledGraph, l: usize, h: usize, config: &SearchConfig) -> BTreeSet<Mapping> {
    let mut out = BTreeSet::new();
    enumerate_with(g1, g2, l, h, config, None, |m| {
        out.insert(m);
        ControlFlow::Continue(())
    })
    .unwrap();
    out
}

fn golden_fixture() -> Check {
    let started = Instant::now();
    let (g1, g2) = fixture::running_example();
    let known = fixture::known_mapping();
    for config in strategies() {
        let name = config.strategy.name();
        let found = determine(&g1, &g2, 2, 2, &config).unwrap();
        let m = found.mapping.ok_or(format!("{name}: (2,2) reported false"))?;
        ensure(
            verify_mapping(&g1, &g2, 2, 2, &m).unwrap().is_valid(),
            format!("{name}: invalid witness"),
        )?;
        ensure(
            !determine(&g1, &g2, 3, 3, &config).unwrap().found(),
            format!("{name}: (3,3) reported true"),
        )?;
    }
    let all = enumerate_all(&g1, &g2, 2, 2, None).unwrap();
    ensure(all.contains(&known), "known mapping missing from enumeration")?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} mapping(s) at (2,2), none at (3,3), {elapsed:.2?}",
        all.len()
    ))
}

fn oracle_equivalence() -> Check {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut satisfiable = 0;
    for i in 0..500u64 {
        let n1 = rng.gen_range(2..=5);
        let n2 = rng.gen_range(5..=12);
        let d2 = rng.gen_range(2.0..=4.0f64).min(n2 as f64 - 1.0);
        let labels = rng.gen_range(2..=5);
        let h = rng.gen_range(1..=3);
        let d1 = rng.gen_range(1.0..=(n1 as f64 - 1.0).min(2.5));
        let g1 = random_labeled_graph(n1, d1, labels, rng.gen()).unwrap();
        let g2 = random_labeled_graph(n2, d2, labels, rng.gen()).unwrap();
        let solutions = brute_force_solve(&g1, &g2, 1, h).unwrap();
        let expected = !solutions.is_empty();
        satisfiable += expected as usize;
        for config in strategies() {
            let name = config.strategy.name();
            let out = determine(&g1, &g2, 1, h, &config).unwrap();
            ensure(
                out.found() == expected,
                format!("instance {i}: {name} says {} vs oracle {expected}", out.found()),
            )?;
            if let Some(m) = &out.mapping {
                ensure(
                    verify_mapping(&g1, &g2, 1, h, m).unwrap().is_valid(),
                    format!("instance {i}: {name} witness rejected"),
                )?;
                ensure(
                    solutions.binary_search(m).is_ok(),
                    format!("instance {i}: {name} witness not among the oracle's solutions"),
                )?;
            }
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(300), format!("took {elapsed:?}"))?;
    Ok(format!(
        "500 instances ({satisfiable} satisfiable), 0 disagreements, {elapsed:.2?}"
    ))
}

fn prune_soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let variants = [
        (
            "without node-path removal",
            Refinements {
                through_matched: false,
                ..Refinements::ALL
            },
        ),
        (
            "without conflicting-path removal",
            Refinements {
                conflicting: false,
                ..Refinements::ALL
            },
        ),
        (
            "without matrix refinement",
            Refinements {
                compatibility: false,
                ..Refinements::ALL
            },
        ),
    ];
    let mut tested = 0;
    let mut solutions = 0;
    let mut attempts = 0;
    while tested < 100 {
        attempts += 1;
        ensure(attempts < 5000, format!("only {tested} satisfiable instances found"))?;
        let n1 = rng.gen_range(2..=4);
        let labels = rng.gen_range(2..=3);
        let h = rng.gen_range(1..=3);
        let l = rng.gen_range(1..=h);
        let g1 = random_labeled_graph(n1, rng.gen_range(1.0..=(n1 as f64 - 1.0).min(2.0)), labels, rng.gen()).unwrap();
        let g2 = if rng.gen_bool(0.5) {
            plant_subdivision(&g1, l, h, rng.gen_range(0..=4), rng.gen()).unwrap()
        } else {
            let n2 = rng.gen_range(5..=9);
            random_labeled_graph(n2, rng.gen_range(2.0..=3.5), labels, rng.gen()).unwrap()
        };
        let full = solution_set(&g1, &g2, l, h, &SearchConfig::default());
        if full.is_empty() {
            continue;
        }
        tested += 1;
        solutions += full.len();
        for strategy in [Strategy::Ndshd1, Strategy::Ndshd2] {
            for (name, refinements) in variants {
                let config = SearchConfig {
                    strategy,
                    refinements,
                    ..Default::default()
                };
                ensure(
                    solution_set(&g1, &g2, l, h, &config) == full,
                    format!("instance {tested}: {} {name} changed the solution set", strategy.name()),
                )?;
            }
        }
    }
    Ok(format!(
        "100 satisfiable instances, {solutions} solutions, identical sets with each refinement off"
    ))
}

fn planted_completeness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut largest = 0;
    for i in 0..200 {
        let n1 = rng.gen_range(2..=6);
        let d1 = rng.gen_range(1.0..=(n1 as f64 - 1.0).min(3.0));
        let g1 = random_labeled_graph(n1, d1, rng.gen_range(1..=6), rng.gen()).unwrap();
        let h = rng.gen_range(1..=3);
        let l = rng.gen_range(1..=h);
        let g2 = plant_subdivision(&g1, l, h, rng.gen_range(0..=30), rng.gen()).unwrap();
        largest = largest.max(g2.vertex_count());
        for config in strategies() {
            let out = determine(&g1, &g2, l, h, &config).unwrap();
            let m = out.mapping.ok_or(format!(
                "instance {i}: {} missed the planted subdivision",
                config.strategy.name()
            ))?;
            ensure(
                verify_mapping(&g1, &g2, l, h, &m).unwrap().is_valid(),
                format!("instance {i}: bad witness"),
            )?;
        }
    }
    Ok(format!(
        "200/200 found by both strategies (data graphs up to {largest} vertices)"
    ))
}

fn scalability() -> Check {
    let spec = load_spec("exp1");
    // warm caches and the allocator before timing anything
    let warm = ExperimentSpec {
        sweep: None,
        repetitions: 1,
        ..spec.clone()
    };
    bench::run_experiment(&warm, &configs(), |_| {}).map_err(|e| e.to_string())?;

    let records = bench::run_experiment(&spec, &configs(), |_| {}).map_err(|e| e.to_string())?;
    let slowest = records
        .iter()
        .map(|r| r.stats.wall_time + r.stats.setup_time)
        .fold(0.0, f64::max);
    ensure(slowest < 30.0, format!("a run took {slowest:.2} s"))?;
    ensure(
        records.iter().all(|r| r.stats.outcome.to_string() != "timeout"),
        "a run timed out",
    )?;
    let mut parts = Vec::new();
    for strategy in [Strategy::Ndshd1, Strategy::Ndshd2] {
        let medians = bench::median_times(&records, strategy);
        let (first, last) = (medians.first().unwrap(), medians.last().unwrap());
        ensure(
            first.0 == Some(200.0) && last.0 == Some(2000.0),
            "exp1 sweep must run from 200 to 2000",
        )?;
        let ratio = last.1 / first.1;
        ensure(
            ratio < 20.0,
            format!("{}: median ratio {ratio:.1} >= 20", strategy.name()),
        )?;
        parts.push(format!("{} x{ratio:.1}", strategy.name()));
    }
    Ok(format!(
        "median time N2=2000 vs 200: {}; slowest run {:.3} s",
        parts.join(", "),
        slowest
    ))
}

fn strategy_comparison() -> Check {
    let spec = load_spec("strategy");
    ensure(spec.repetitions >= 20, "fewer than 20 runs")?;
    let records = bench::run_experiment(&spec, &configs(), |_| {}).map_err(|e| e.to_string())?;
    let pick = |s: Strategy, f: &dyn Fn(&bench::RunRecord) -> f64| -> Vec<f64> {
        records.iter().filter(|r| r.strategy == s).map(f).collect()
    };
    let calls = |s| median(&pick(s, &|r| r.stats.recursion_calls as f64));
    let spread = |s| Summary::of(&pick(s, &|r| r.stats.wall_time)).stddev;
    let (c1, c2) = (calls(Strategy::Ndshd1), calls(Strategy::Ndshd2));
    let (s1, s2) = (spread(Strategy::Ndshd1), spread(Strategy::Ndshd2));
    let detail = format!("median calls {c2} vs {c1}, wall stddev {s2:.5} s vs {s1:.5} s (ndshd2 vs ndshd1)");
    ensure(c2 <= c1 && s2 <= s1, detail.clone())?;
    Ok(detail)
}

fn path_index() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut total = 0;
    for i in 0..100 {
        let n = rng.gen_range(2..=12);
        let d = rng.gen_range(1.0..=(n as f64 - 1.0).min(4.0));
        let g = random_labeled_graph(n, d, 3, rng.gen()).unwrap();
        let ends: BTreeSet<Vertex> = g.vertices().filter(|_| rng.gen_bool(0.7)).collect();
        let h = rng.gen_range(1..=4);
        let l = rng.gen_range(1..=h);
        let store = PathStore::enumerate(&g, &ends.iter().copied().collect::<Vec<_>>(), l, h);
        let got: BTreeSet<Vec<Vertex>> = (0..store.len() as u32).map(|p| store.vertices(p).to_vec()).collect();
        ensure(got.len() == store.len(), format!("graph {i}: duplicate paths"))?;
        ensure(
            got == all_bounded_paths(&g, &ends, l, h),
            format!("graph {i}: path sets differ"),
        )?;
        total += store.len();
    }

    let g = random_labeled_graph(12, 3.5, 2, 5).unwrap();
    let verts: Vec<Vertex> = g.vertices().collect();
    let mut store = PathStore::enumerate(&g, &verts, 1, 4);
    let flags = store.alive_flags().to_vec();
    let dump = store.dump();
    let mut tokens: Vec<UndoToken> = Vec::new();
    for op in 0..1000 {
        if !tokens.is_empty() && rng.gen_bool(0.45) {
            store.undo(tokens.pop().unwrap());
        } else if rng.gen_bool(0.5) {
            tokens.push(store.remove_paths_through_vertex(verts[rng.gen_range(0..verts.len())]));
        } else {
            let p = rng.gen_range(0..store.len() as u32);
            if let Ok(t) = store.remove_paths_conflicting_with(p) {
                tokens.push(t);
            }
        }
        for &u in &verts {
            for &w in &verts {
                if u < w && store.count_between(u, w) as usize != store.alive_between(u, w).count() {
                    return Err(format!("op {op}: count for ({u},{w}) disagrees with the alive list"));
                }
            }
        }
    }
    while let Some(t) = tokens.pop() {
        store.undo(t);
    }
    ensure(
        store.alive_flags() == flags.as_slice() && store.dump() == dump,
        "state not restored",
    )?;
    Ok(format!(
        "100 graphs ({total} paths) match; 1000 remove/undo ops restored exactly"
    ))
}

fn determinism() -> Check {
    let (g1, g2) = fixture::running_example();
    let run = |config: &SearchConfig| {
        let out = determine(&g1, &g2, 1, 3, config).unwrap();
        (out.mapping.map(|m| m.to_text(&g1)), format!("{:?}", out.stats.trace))
    };
    for strategy in [Strategy::Ndshd1, Strategy::Ndshd2] {
        for order in [
            homeomatch::search::NodeOrder::MostConstrained,
            homeomatch::search::NodeOrder::Ascending,
        ] {
            let config = SearchConfig {
                strategy,
                order,
                trace: true,
                ..Default::default()
            };
            ensure(run(&config) == run(&config), "witness or trace differs between runs")?;
        }
    }

    let spec = load_spec("strategy");
    let csv = || {
        let records = bench::run_experiment(&spec, &configs(), |_| {}).unwrap();
        let mut buf = Vec::new();
        bench::write_csv(&spec, &records, &mut buf, true).unwrap();
        buf
    };
    let (a, b) = (csv(), csv());
    ensure(a == b, "bench CSV differs between runs")?;

    let g = || random_labeled_graph(300, 4.0, 10, 8).unwrap().to_text();
    ensure(g() == g(), "generator output differs")?;
    Ok(format!(
        "witnesses, traces, generator output and a {}-byte CSV repeat exactly",
        a.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("golden example", golden_fixture),
        ("oracle equivalence", oracle_equivalence),
        ("prune soundness", prune_soundness),
        ("planted-subdivision completeness", planted_completeness),
        ("scalability trend", scalability),
        ("strategy comparison", strategy_comparison),
        ("path-index correctness", path_index),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
