//! Acceptance suite. Each criterion runs as its own test, asserts its stated
//! thresholds exactly, and prints one PASS line (visible with
//! `cargo test --test acceptance -- --nocapture`).
//!
//! Timed criteria take a shared lock so measurements never run concurrently
//! with other tests of this binary.

use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use num_traits::Zero;
use sha2::{Digest, Sha256};

use linspp_core::*;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

const CORPUS_SIZE: usize = 500;
const PATH_LIMIT: usize = 1 << 14;
const SYSTEM_LIMIT: usize = 1 << 22;

struct CorpusEntry {
    seed: u64,
    gen: Generated,
}

/// 500 seeded random instances: random dags with at most 10 arcs, order
/// d ∈ {2, 3}, rational costs with numerators in [-9, 9]; the cost mode
/// cycles through arbitrary, linearizable and non-linearizable so both
/// verdicts appear. Graphs where nothing can be planted fall back to
/// arbitrary costs, deterministically.
fn corpus() -> &'static Vec<CorpusEntry> {
    static CORPUS: OnceLock<Vec<CorpusEntry>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        (0..CORPUS_SIZE as u64)
            .map(|seed| {
                let mode = match seed % 3 {
                    0 => Mode::Arbitrary,
                    1 => Mode::Linearizable,
                    _ => Mode::NonLinearizable,
                };
                let d = 2 + (seed % 2) as u32;
                let mut spec = GeneratorSpec::new(Family::RandomDag, d, seed, mode);
                spec.m = Some(4 + (seed % 7) as u32);
                let gen = match generate(&spec) {
                    Ok(gen) => gen,
                    Err(Error::UnsupportedParams(_)) => {
                        let mut fallback = spec.clone();
                        fallback.mode = Mode::Arbitrary;
                        generate(&fallback).expect("arbitrary mode always succeeds")
                    }
                    Err(e) => panic!("seed {seed}: generation failed: {e}"),
                };
                assert!(gen.dag.arc_count() <= 10);
                CorpusEntry { seed, gen }
            })
            .collect()
    })
}

struct Verdicts {
    fast: LinVerdict,
    lp: LinVerdict,
    tps: bool,
}

fn decide_all(gen: &Generated) -> Verdicts {
    let ns = choose_nonbasic_system(&gen.dag);
    Verdicts {
        fast: linearize(&gen.dag, &gen.q, &ns).expect("linearize"),
        lp: oracle_linearize_lp(&gen.dag, &gen.q, PATH_LIMIT).expect("lp oracle"),
        tps: oracle_linearize_tps(&gen.dag, &gen.q, SYSTEM_LIMIT).expect("tps oracle"),
    }
}

fn verdicts() -> &'static Vec<Verdicts> {
    static VERDICTS: OnceLock<Vec<Verdicts>> = OnceLock::new();
    VERDICTS.get_or_init(|| corpus().iter().map(|e| decide_all(&e.gen)).collect())
}

/// Criterion 1: the fast algorithm and both brute-force deciders return
/// identical verdicts on the whole corpus, exactly, within 60 seconds.
#[test]
fn criterion_1_oracle_equivalence() {
    let _guard = serial();
    let entries = corpus();
    let start = Instant::now();
    let mut yes = 0;
    for entry in entries {
        let v = decide_all(&entry.gen);
        assert_eq!(
            v.fast.is_linearizable(),
            v.lp.is_linearizable(),
            "seed {}: fast vs lp disagree",
            entry.seed
        );
        assert_eq!(
            v.fast.is_linearizable(),
            v.tps,
            "seed {}: fast vs tps disagree",
            entry.seed
        );
        if v.fast.is_linearizable() {
            yes += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "three deciders over {} instances took {elapsed:?}, budget is 60 s",
        entries.len()
    );
    println!(
        "criterion 1: PASS — 3 deciders agree on {}/{} instances ({yes} linearizable) in {elapsed:?}",
        entries.len(),
        entries.len()
    );
}

/// Criterion 2: every YES certificate verifies on all paths; every NO
/// witness is a two-path system violating the exchange equality.
#[test]
fn criterion_2_certificate_soundness() {
    let _guard = serial();
    let mut yes = 0;
    let mut no = 0;
    for (entry, v) in corpus().iter().zip(verdicts()) {
        let gen = &entry.gen;
        let ns = choose_nonbasic_system(&gen.dag);
        for verdict in [&v.fast, &v.lp] {
            match verdict {
                LinVerdict::Linearizable(c) => {
                    assert!(
                        verify_linearization(&gen.dag, &gen.q, c, PATH_LIMIT).unwrap(),
                        "seed {}: certificate fails a path",
                        entry.seed
                    );
                    yes += 1;
                }
                LinVerdict::NotLinearizable(w) => {
                    let sys = w.two_path_system(&gen.dag, &ns).unwrap();
                    assert!(
                        !two_path_linearizable(&sys, &gen.q).unwrap(),
                        "seed {}: witness does not violate the exchange equality",
                        entry.seed
                    );
                    no += 1;
                }
            }
        }
    }
    println!("criterion 2: PASS — {yes} YES certificates verified, {no} NO witnesses violate the exchange equality");
}

/// Criterion 3: the reduced form of the elimination oracle's solution equals
/// the fast algorithm's output exactly on every YES instance.
#[test]
fn criterion_3_reduced_form_uniqueness() {
    let _guard = serial();
    let mut checked = 0;
    for (entry, v) in corpus().iter().zip(verdicts()) {
        let gen = &entry.gen;
        if let (LinVerdict::Linearizable(fast), LinVerdict::Linearizable(lp)) = (&v.fast, &v.lp) {
            let ns = choose_nonbasic_system(&gen.dag);
            assert_eq!(
                &reduce_form(lp, &ns, &gen.dag),
                fast,
                "seed {}: reduced forms differ",
                entry.seed
            );
            checked += 1;
        }
    }
    assert!(checked > 0, "corpus contains no YES instance");
    println!("criterion 3: PASS — reduced-form uniqueness on {checked} YES instances");
}

/// Criterion 4: all-paths-equal verdicts match exhaustive enumeration with
/// exact common costs, and the attached-instance identity holds for every
/// strongly basic arc and every prefix path.
#[test]
fn criterion_4_apec_bridge() {
    let _guard = serial();
    let mut identities = 0;
    for entry in corpus() {
        let gen = &entry.gen;
        let costs: Vec<Rational> = enumerate_paths(&gen.dag, PATH_LIMIT)
            .unwrap()
            .iter()
            .map(|p| eval_order_d(&gen.q, p).unwrap())
            .collect();
        let all_equal = costs.windows(2).all(|w| w[0] == w[1]);
        let inst = ApecInstance::new(gen.dag.clone(), gen.q.clone()).unwrap();
        let verdict = solve_apec(&inst).unwrap();
        assert_eq!(
            verdict.all_equal(),
            all_equal,
            "seed {}: apec verdict vs enumeration",
            entry.seed
        );
        if let Some(beta) = verdict.beta() {
            assert_eq!(beta, &costs[0], "seed {}: beta mismatch", entry.seed);
        }

        // eval(q^(a), P) = f(P·N_u) − f(P·a·N_v) for every strongly basic
        // arc a = (u, v) and every s-u path P.
        let ns = choose_nonbasic_system(&gen.dag);
        let gamma = compute_gamma(&gen.q, &ns, &gen.dag);
        for a in ns.strongly_basic_arcs(&gen.dag) {
            let attached = corresponding_apec_instance(a, &gen.q, &ns, &gen.dag, &gamma).unwrap();
            let arc = gen.dag.arc(a);
            let n_u = nonbasic_path(&ns, &gen.dag, arc.tail).unwrap();
            let n_v = nonbasic_path(&ns, &gen.dag, arc.head).unwrap();
            for p in attached
                .dag
                .paths_between(attached.dag.source(), attached.dag.sink(), PATH_LIMIT)
                .unwrap()
            {
                let lifted = p.relabel(&attached.dag);
                let through_nu = lifted.concat(&n_u);
                let through_a = lifted.push_arc(&gen.dag, a).concat(&n_v);
                assert_eq!(
                    eval_order_d(&attached.q, &p).unwrap(),
                    eval_order_d(&gen.q, &through_nu).unwrap()
                        - eval_order_d(&gen.q, &through_a).unwrap(),
                    "seed {}: attached-instance identity fails at arc {a}",
                    entry.seed
                );
                identities += 1;
            }
        }
    }
    println!(
        "criterion 4: PASS — apec verdicts match enumeration on {} instances, {identities} identity checks",
        corpus().len()
    );
}

/// Criterion 5: kernel dimensions 2 / 11 / 36 on the fixed graphs; basis
/// vectors and 200 random spans linearize, 200 off-kernel vectors do not.
#[test]
fn criterion_5_subspace_dimensions() {
    let _guard = serial();
    let single = build_dag(2, &[(0, 1)], 0, 1).unwrap();
    let diamond = build_dag(4, &[(0, 1), (1, 3), (0, 2), (2, 3)], 0, 3).unwrap();
    let double = build_dag(
        7,
        &[
            (0, 1),
            (0, 2),
            (1, 3),
            (2, 3),
            (3, 4),
            (3, 5),
            (4, 6),
            (5, 6),
        ],
        0,
        6,
    )
    .unwrap();

    let mut dims = Vec::new();
    let mut bases = Vec::new();
    for (dag, expected) in [(&single, 2usize), (&diamond, 11), (&double, 36)] {
        let ns = choose_nonbasic_system(dag);
        let matrix = assemble_matrix(dag, 2, &ns).unwrap();
        let basis = kernel_basis(&matrix);
        assert_eq!(basis.len(), expected, "kernel dimension on m={}", dag.arc_count());
        for vector in basis.vectors() {
            let q = vector.to_order_d(matrix.index()).unwrap();
            assert!(
                linearize(dag, &q, &ns).unwrap().is_linearizable(),
                "basis vector fails to linearize on m={}",
                dag.arc_count()
            );
        }
        dims.push(basis.len());
        bases.push((dag, matrix, basis));
    }

    // 200 random span combinations linearize (on the only graph with a
    // nontrivial constraint, spans of the other two are covered above).
    let (double_dag, matrix, basis) = &bases[2];
    let ns = choose_nonbasic_system(double_dag);
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..200 {
        let mut x = CostVector::zeros(matrix.dimension());
        for _ in 0..4 {
            let i = (next() % basis.len() as u64) as usize;
            let coeff = rat((next() % 19) as i64 - 9);
            x.scaled_add(&coeff, &basis.vectors()[i]);
        }
        let q = x.to_order_d(matrix.index()).unwrap();
        assert!(
            linearize(double_dag, &q, &ns).unwrap().is_linearizable(),
            "span combination fails to linearize"
        );
    }

    // 200 random vectors outside the kernel fail, cross-checked against the
    // elimination oracle.
    let mut rejected = 0;
    while rejected < 200 {
        let mut x = CostVector::zeros(matrix.dimension());
        for _ in 0..6 {
            let i = (next() % matrix.dimension() as u64) as usize;
            x.set(i, rat((next() % 19) as i64 - 9));
        }
        if matrix.apply(&x).unwrap().iter().all(Zero::is_zero) {
            continue;
        }
        let q = x.to_order_d(matrix.index()).unwrap();
        assert!(
            !linearize(double_dag, &q, &ns).unwrap().is_linearizable(),
            "off-kernel vector linearizes"
        );
        assert!(
            !oracle_linearize_lp(double_dag, &q, PATH_LIMIT)
                .unwrap()
                .is_linearizable(),
            "off-kernel vector passes the elimination oracle"
        );
        rejected += 1;
    }
    println!(
        "criterion 5: PASS — kernel dimensions {dims:?}, all basis vectors + 200 spans linearize, 200 off-kernel vectors rejected"
    );
}

/// Criterion 6: on width-2 layered graphs with m ≈ {250, 500, 1000, 2000}
/// and d = 2, the median of 5 runtimes grows by at most 5.0x per doubling
/// and the largest size finishes under 10 seconds.
#[test]
fn criterion_6_complexity_envelope() {
    let _guard = serial();
    let layer_counts = [63u32, 125, 250, 500]; // m = 4 * layers
    let mut medians = Vec::new();
    let mut sizes = Vec::new();
    for (i, &layers) in layer_counts.iter().enumerate() {
        let mut spec = GeneratorSpec::new(Family::Layered, 2, 60 + i as u64, Mode::Linearizable);
        spec.width = Some(2);
        spec.layers = Some(layers);
        let gen = generate(&spec).unwrap();
        let ns = choose_nonbasic_system(&gen.dag);
        let mut runs: Vec<Duration> = (0..5)
            .map(|_| {
                let start = Instant::now();
                let verdict = linearize(&gen.dag, &gen.q, &ns).unwrap();
                assert!(verdict.is_linearizable());
                start.elapsed()
            })
            .collect();
        runs.sort();
        sizes.push(gen.dag.arc_count());
        medians.push(runs[2]);
    }
    for i in 1..medians.len() {
        let ratio = medians[i].as_secs_f64() / medians[i - 1].as_secs_f64().max(1e-9);
        assert!(
            ratio <= 5.0,
            "runtime ratio {:.2} from m={} to m={} exceeds 5.0 (medians {:?})",
            ratio,
            sizes[i - 1],
            sizes[i],
            medians
        );
    }
    assert!(
        medians[3] < Duration::from_secs(10),
        "m={} took {:?}, budget is 10 s",
        sizes[3],
        medians[3]
    );
    println!(
        "criterion 6: PASS — sizes {sizes:?}, median runtimes {medians:?}, all doubling ratios ≤ 5.0"
    );
}

/// Criterion 7: 100 linearizable-mode instances all YES; 100
/// non-linearizable-mode instances all NO with the planted witness violated
/// and rediscovered; byte-identical regeneration per seed.
#[test]
fn criterion_7_generator_contracts() {
    let _guard = serial();
    // 100 linearizable instances over random dags.
    for seed in 0..100u64 {
        let mut spec = GeneratorSpec::new(
            Family::RandomDag,
            2 + (seed % 2) as u32,
            1000 + seed,
            Mode::Linearizable,
        );
        spec.m = Some(4 + (seed % 7) as u32);
        let gen = generate(&spec).unwrap();
        let ns = choose_nonbasic_system(&gen.dag);
        assert!(
            linearize(&gen.dag, &gen.q, &ns).unwrap().is_linearizable(),
            "linearizable-mode seed {seed} is not linearizable"
        );
    }

    // 100 non-linearizable instances over graphs that always have a
    // planting spot.
    for seed in 0..100u64 {
        let mut spec = GeneratorSpec::new(
            if seed % 2 == 0 {
                Family::DoubleDiamond
            } else {
                Family::Layered
            },
            2 + (seed % 2) as u32,
            2000 + seed,
            Mode::NonLinearizable,
        );
        spec.width = Some(2);
        spec.layers = Some(3 + (seed % 2) as u32);
        let gen = generate(&spec).unwrap();
        let planted = gen.planted.as_ref().expect("planted witness");
        assert!(
            !two_path_linearizable(planted, &gen.q).unwrap(),
            "seed {seed}: planted system is balanced"
        );
        let ns = choose_nonbasic_system(&gen.dag);
        let verdict = linearize(&gen.dag, &gen.q, &ns).unwrap();
        let witness = verdict.witness().expect("non-linearizable");
        let sys = witness.two_path_system(&gen.dag, &ns).unwrap();
        assert!(
            !two_path_linearizable(&sys, &gen.q).unwrap(),
            "seed {seed}: rediscovered witness is balanced"
        );
    }

    // Determinism: identical seeds, identical bytes and hashes.
    let mut hashes = Vec::new();
    for round in 0..2 {
        let mut digest = Vec::new();
        for seed in [1u64, 7, 42] {
            let mut spec = GeneratorSpec::new(Family::RandomDag, 2, seed, Mode::Arbitrary);
            spec.m = Some(9);
            let gen = generate(&spec).unwrap();
            let text = write_instance(&gen.dag, &gen.q);
            let hash = Sha256::digest(text.as_bytes())
                .iter()
                .map(|b| format!("{b:02x}"))
                .collect::<String>();
            digest.push(hash);
        }
        hashes.push(digest);
        let _ = round;
    }
    assert_eq!(hashes[0], hashes[1], "regeneration changed instance bytes");
    println!(
        "criterion 7: PASS — 100 linearizable all YES, 100 planted all NO with violated witnesses, hashes stable"
    );
}
