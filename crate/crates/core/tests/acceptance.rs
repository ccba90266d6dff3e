//! Acceptance criteria, one line each. Runs without the test harness so the
//! lines appear in `cargo test` output; exits non-zero if any criterion
//! fails.

use std::time::{Duration, Instant};

use ringdecomp::canonical::{multiset_drift, multiset_eq, to_matrix, Block, BlockMultiset, DecompKind};
use ringdecomp::decomp::{jordan, spectral, svd, Options};
use ringdecomp::testkit::suite::{
    bordered_trial, brute_force_isomorphic, in_scope, is_refusal, pair_bijection_trial, planted_jordan, random_input,
    run_cell, segre_signature, signed_graph, CellResult, BORDERED_RINGS, BORDERED_SHAPES,
};
use ringdecomp::testkit::{additivity_drift, random_unitary, sandwich, uniqueness_drift, Rng, MATCH_TOL};
use ringdecomp::{Matrix, RingId};

// pinned tolerances and budgets
const WORKED_TOL: f64 = 1e-9;
const WORKED_BUDGET: Duration = Duration::from_secs(1);
const DUAL_PARAM_TOL: f64 = 1e-7;
const DUAL_SEEDS: usize = 50;
const DUAL_BUDGET: Duration = Duration::from_secs(10);
const ADDITIVITY_PAIRS: usize = 100;
const MAX_REFUSAL_RATE: f64 = 0.2;
const UNIQUENESS_SANDWICHES: usize = 50;
const UNIQUENESS_DRIFT: f64 = 1e-6;
const BIJECTION_SAMPLES: usize = 100;
const BIJECTION_TOL: f64 = 1e-6;
const BORDERED_SAMPLES: usize = 50;
const BORDERED_TOL: f64 = 1e-6;
const GRAPH_PAIRS: usize = 20;
const PLANTED: usize = 50;
const PLANTED_COND: f64 = 100.0;
const PLANTED_MAX_N: usize = 6;
const MAX_JORDAN_REFUSALS: f64 = 0.1;
const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let m = Matrix::from_reals(RingId::Complex, 2, 3, &[1.0, 2.0, 0.0, 2.0, 1.0, 0.0]);
    let got = match svd(&m, &Options::default()) {
        Ok(f) => f.blocks,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let want = BlockMultiset::new(vec![Block::PosScalar(3.0), Block::PosScalar(1.0), Block::EmptyCol]);
    let ok = multiset_eq(&got, &want, WORKED_TOL) && elapsed < WORKED_BUDGET;
    outcome(ok, format!("blocks {:?}, {elapsed:?}", got.items().iter().map(|b| b.to_string()).collect::<Vec<_>>()))
}

/// A random generator of the given family with parameters drawn from `rng`.
fn dual_generator(family: &str, rng: &mut Rng) -> Block {
    let pos = |r: &mut Rng| r.uniform(0.2, 3.0);
    match family {
        "DualScalar" => Block::DualScalar { x: pos(rng), y: rng.uniform(-2.0, 2.0) },
        "DualEps" => Block::DualEps(pos(rng)),
        "PosScalar" => Block::PosScalar(pos(rng)),
        "DualRot2" => Block::DualRot2 { x: pos(rng), y: pos(rng) },
        "EmptyRow" => Block::EmptyRow,
        _ => Block::EmptyCol,
    }
}

fn dual_coverage() -> Outcome {
    let start = Instant::now();
    let families: [(RingId, &[&str]); 2] = [
        (RingId::DualTrivial, &["DualScalar", "DualEps", "EmptyRow", "EmptyCol"]),
        (RingId::DualConj, &["PosScalar", "DualRot2", "DualEps", "EmptyRow", "EmptyCol"]),
    ];
    let mut rng = Rng::new(SEED);
    let (mut cases, mut worst, mut bad) = (0, 0.0f64, Vec::new());
    for (ring, fams) in families {
        for fam in fams {
            for _ in 0..DUAL_SEEDS {
                cases += 1;
                let g = dual_generator(fam, &mut rng);
                let gm = to_matrix(&g, ring).expect("generator materializes");
                let u = random_unitary(ring, gm.rows(), rng.fork());
                let v = random_unitary(ring, gm.cols(), rng.fork());
                let m = u.matmul(&gm).and_then(|x| x.matmul(&v.adjoint())).expect("shapes agree");
                let want = BlockMultiset::new(vec![g.clone()]);
                match svd(&m, &Options::default()) {
                    Ok(f) => {
                        let d = multiset_drift(&f.blocks, &want).unwrap_or(f64::INFINITY);
                        worst = worst.max(d);
                        if d > DUAL_PARAM_TOL {
                            bad.push(format!("{ring} {g} -> {:?}", f.blocks.items()));
                        }
                    }
                    Err(e) => bad.push(format!("{ring} {g}: {e}")),
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = bad.is_empty() && elapsed < DUAL_BUDGET;
    let mut detail = format!("{cases} cases, worst drift {worst:.1e}, {} failures, {elapsed:?}", bad.len());
    if let Some(first) = bad.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    outcome(ok, detail)
}

fn summarize(cells: &[CellResult], max_rate: f64) -> Outcome {
    let failing: Vec<&CellResult> =
        cells.iter().filter(|c| c.failures > 0 || c.refusal_rate() >= max_rate).collect();
    let worst = cells.iter().map(|c| c.worst).fold(0.0, f64::max);
    let rate = cells.iter().map(CellResult::refusal_rate).fold(0.0, f64::max);
    let mut detail = format!("{} cells, worst drift {worst:.1e}, max refusal rate {rate:.3}", cells.len());
    for c in &failing {
        detail.push_str(&format!(
            "; {}/{} {} failures, refusal rate {:.3}{}",
            c.ring,
            c.kind,
            c.failures,
            c.refusal_rate(),
            c.first_failure.as_deref().map(|s| format!(" ({s})")).unwrap_or_default()
        ));
    }
    outcome(failing.is_empty(), detail)
}

fn additivity() -> Outcome {
    let opts = Options::default();
    let mut seeds = Rng::new(SEED + 3);
    let cells: Vec<CellResult> = in_scope()
        .into_iter()
        .map(|(ring, kind)| {
            run_cell(ring, kind, "additivity", ADDITIVITY_PAIRS, seeds.fork(), MATCH_TOL, |s| {
                let mut r = Rng::new(s);
                let a = random_input(ring, kind, r.fork());
                let b = random_input(ring, kind, r.fork());
                additivity_drift(&a, &b, kind, &opts)
            })
        })
        .collect();
    summarize(&cells, MAX_REFUSAL_RATE)
}

fn uniqueness() -> Outcome {
    let opts = Options::default();
    let mut seeds = Rng::new(SEED + 4);
    let cells: Vec<CellResult> = in_scope()
        .into_iter()
        .map(|(ring, kind)| {
            run_cell(ring, kind, "uniqueness", UNIQUENESS_SANDWICHES, seeds.fork(), UNIQUENESS_DRIFT, |s| {
                let mut r = Rng::new(s);
                let m = random_input(ring, kind, r.fork());
                uniqueness_drift(&m, kind, 1, r.fork(), &opts)
            })
        })
        .collect();
    summarize(&cells, MAX_REFUSAL_RATE)
}

fn bijection() -> Outcome {
    let opts = Options::default();
    let cell = run_cell(RingId::Complex, DecompKind::Jordan, "pair-bijection", BIJECTION_SAMPLES, SEED + 5, BIJECTION_TOL, |s| {
        pair_bijection_trial(s, &opts)
    });
    summarize(&[cell], MAX_REFUSAL_RATE)
}

fn bordered() -> Outcome {
    let opts = Options::default();
    let mut seeds = Rng::new(SEED + 6);
    let cells: Vec<CellResult> = BORDERED_RINGS
        .iter()
        .map(|&ring| {
            let mut shapes = BORDERED_SHAPES.iter().cycle();
            run_cell(ring, DecompKind::Svd, "bordered", BORDERED_SAMPLES, seeds.fork(), BORDERED_TOL, |s| {
                bordered_trial(ring, *shapes.next().expect("cycle"), s, &opts)
            })
        })
        .collect();
    summarize(&cells, MAX_REFUSAL_RATE)
}

fn graphs() -> Outcome {
    let opts = Options::default();
    let blocks = |m: &Matrix| spectral(m, &opts).map(|f| f.blocks);
    let mut rng = Rng::new(SEED + 7);
    let mut problems = Vec::new();
    for _ in 0..GRAPH_PAIRS {
        let n = 1 + rng.below(6);
        let g = signed_graph(n, rng.fork());
        let h = sandwich(&g, DecompKind::Spectral, rng.fork()).expect("square");
        if blocks(&g) != blocks(&h) {
            problems.push(format!("isomorphic pair differs:\n{g}{h}"));
        }
    }
    let mut distinct = 0;
    while distinct < GRAPH_PAIRS {
        let n = 1 + rng.below(6);
        let (g, h) = (signed_graph(n, rng.fork()), signed_graph(n, rng.fork()));
        if brute_force_isomorphic(&g, &h) {
            continue;
        }
        distinct += 1;
        if blocks(&g) == blocks(&h) {
            problems.push(format!("non-isomorphic pair agrees:\n{g}{h}"));
        }
    }
    for _ in 0..GRAPH_PAIRS {
        let (a, b) = (signed_graph(1 + rng.below(6), rng.fork()), signed_graph(1 + rng.below(6), rng.fork()));
        let whole = blocks(&a.direct_sum(&b).expect("same ring"));
        let parts = blocks(&a).and_then(|x| blocks(&b).map(|y| x.union(&y)));
        if whole != parts {
            problems.push("disjoint union is not additive".to_string());
        }
    }
    let detail = format!(
        "{GRAPH_PAIRS} isomorphic, {GRAPH_PAIRS} certified non-isomorphic, {GRAPH_PAIRS} unions; {} problems{}",
        problems.len(),
        problems.first().map(|p| format!("; first: {p}")).unwrap_or_default()
    );
    outcome(problems.is_empty(), detail)
}

fn jordan_honesty() -> Outcome {
    let opts = Options::default();
    let mut rng = Rng::new(SEED + 8);
    let (mut refused, mut wrong) = (0usize, Vec::new());
    for _ in 0..PLANTED {
        let (m, planted) = planted_jordan(rng.fork(), PLANTED_MAX_N, PLANTED_COND);
        match jordan(&m, &opts) {
            Ok(f) => {
                if segre_signature(&f.blocks, 5e-4) != segre_signature(&planted, 5e-4) {
                    wrong.push(format!(
                        "planted {:?} recovered {:?}",
                        planted.items().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                        f.blocks.items().iter().map(|b| b.to_string()).collect::<Vec<_>>()
                    ));
                }
            }
            Err(e) if is_refusal(&e) => refused += 1,
            Err(e) => wrong.push(format!("error: {e}")),
        }
    }
    let rate = refused as f64 / PLANTED as f64;
    let ok = wrong.is_empty() && rate < MAX_JORDAN_REFUSALS;
    let detail = format!(
        "{PLANTED} planted, {refused} refused (rate {rate:.2}), {} mismatches{}",
        wrong.len(),
        wrong.first().map(|w| format!("; first: {w}")).unwrap_or_default()
    );
    outcome(ok, detail)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("worked example svd", worked_example),
        ("dual svd generator coverage", dual_coverage),
        ("additivity", additivity),
        ("uniqueness", uniqueness),
        ("pair-embedding bijection", bijection),
        ("bordered consistency", bordered),
        ("integer graphs", graphs),
        ("numeric jordan honesty", jordan_honesty),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.pass;
        println!("criterion {} {name}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if !all {
        std::process::exit(1);
    }
}
