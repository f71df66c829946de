//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p qfg-core --test acceptance`. Exits nonzero if
//! any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use qfg_core::gates::{cnot, cnot_network, dft, hadamard, mod_add_tensor, pauli, swap};
use qfg_core::graph::BoxRegion;
use qfg_core::montecarlo::{augment_conjugate, estimate_Z, sample, Scheme};
use qfg_core::qec::{
    rep3_symbolic_table, rep3_syndrome_table, shor_recover, shor_syndrome_table, ErrorSpec,
};
use qfg_core::quantum::{
    build_graph, density_matrix_before, family_superoperator, interaction_measurement_equivalence,
    interaction_measurement_equivalence_with, interaction_measurement_graphs,
    interaction_superoperator, interaction_to_kraus, joint_distribution, projection_family, replay,
    validate_measurement, InitialState, MeasurementFamily, QuantumTimeline, Step,
};
use qfg_core::tensor::{is_hermitian, is_psd, matmul, projective_equal, trace};
use qfg_core::{random, ComplexTensor, FactorGraph, FactorId, Tolerance, VariableId, C64};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let g = random_graph(&mut rng, 8, 4, 8);
        let mut ids: Vec<FactorId> = (0..g.factor_count()).map(FactorId).collect();
        ids.shuffle(&mut rng);
        let keep = rng.random_range(1..=ids.len());
        let b = BoxRegion::new(ids[..keep].iter().copied());
        let (_, internal) = g.classify(&b).unwrap();
        let mut order: Vec<VariableId> = internal.clone();
        order.shuffle(&mut rng);
        let greedy = g.exterior_function(&b, None).unwrap();
        let user = g.exterior_function(&b, Some(&order)).unwrap();
        let brute = g.brute_force_exterior(&b).unwrap();
        if greedy.axis_labels() != brute.axis_labels() || user.axis_labels() != brute.axis_labels()
        {
            return outcome(false, "boundary axes differ between methods");
        }
        worst = worst
            .max(greedy.max_abs_diff(&brute))
            .max(user.max_abs_diff(&brute))
            .max(greedy.max_abs_diff(&user));
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-10 && t < Duration::from_secs(30),
        format!(
            "500 graphs, max deviation {worst:.2e}, {:.2}s",
            t.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let tol = Tolerance::default();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = rng.random_range(1..=8);
        let x = rng.random_range(0..m);
        let u = random::unitary(&mut rng, m);
        let b = random::unitary(&mut rng, m);
        let t = QuantumTimeline::new(
            m,
            InitialState::KnownValue(x),
            vec![
                Step::Unitary(u.clone()),
                Step::Measure {
                    family: projection_family(&b, tol).unwrap(),
                    observed: None,
                },
            ],
        )
        .unwrap();
        let table = joint_distribution(&t).unwrap();
        let expected = born_oracle(&u, &b, x);
        for (p, q) in table.probabilities.iter().zip(&expected) {
            worst = worst.max((p - q).abs());
        }
    }
    outcome(
        worst <= 1e-10,
        format!("100 instances, max deviation {worst:.2e}"),
    )
}

fn timelines() -> Vec<QuantumTimeline> {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    (0..100)
        .map(|_| {
            let m = rng.random_range(2..=4);
            let n = rng.random_range(1..=3);
            random_timeline(&mut rng, m, n)
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    let mut worst_total = 0.0f64;
    let mut worst_future = 0.0f64;
    for t in timelines() {
        let table = joint_distribution(&t).unwrap();
        worst_total = worst_total
            .max((table.total() - 1.0).abs())
            .max((table.evidence - 1.0).abs());
        let extended = t
            .push(Step::Measure {
                family: random_family(&mut rng, t.dimension()),
                observed: None,
            })
            .unwrap();
        let longer = joint_distribution(&extended).unwrap();
        worst_total = worst_total.max((longer.total() - 1.0).abs());
        let marginal = longer.leading_marginal(table.outcome_steps.len());
        for (p, q) in marginal.iter().zip(&table.probabilities) {
            worst_future = worst_future.max((p - q).abs());
        }
    }
    outcome(
        worst_total <= 1e-10 && worst_future <= 1e-10,
        format!(
            "100 timelines, normalization {worst_total:.2e}, future measurement {worst_future:.2e}"
        ),
    )
}

fn outcome_tuples(shape: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &s in shape {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..s).map(move |y| {
                    let mut q = p.clone();
                    q.push(y);
                    q
                })
            })
            .collect();
    }
    out
}

fn valid_density(r: &ComplexTensor, eps: f64) -> bool {
    let tol = Tolerance::abs(eps);
    is_hermitian(r, tol).unwrap()
        && is_psd(r, tol).unwrap()
        && (trace(r).unwrap() - C64::new(1.0, 0.0)).norm() <= eps
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    let mut states = 0;
    let mut invalid = 0;
    for t in timelines() {
        let table = joint_distribution(&t).unwrap();
        for ys in outcome_tuples(&table.shape) {
            let p_graph = table.get(&ys).unwrap();
            let (p_oracle, rho_oracle) = replay_oracle(&t, &ys);
            worst = worst.max((p_graph - p_oracle).abs());
            if p_oracle < 1e-6 {
                continue;
            }
            let (p_replay, rho_replay) = replay(&t, &ys).unwrap();
            worst = worst.max((p_graph - p_replay).abs());
            for k in 1..=ys.len() + 1 {
                let (rho_graph, p_prefix) = density_matrix_before(&t, k, &ys[..k - 1]).unwrap();
                let (p_ref, mut rho_ref) = replay_oracle_prefix(&t, &ys[..k - 1]);
                worst = worst.max((p_prefix - p_ref).abs());
                for v in rho_ref.iter_mut().flatten() {
                    *v /= p_ref;
                }
                worst = worst.max(max_diff(&to_mat(rho_graph.matrix()), &rho_ref));
                states += 1;
                if !valid_density(rho_graph.matrix(), 1e-9) {
                    invalid += 1;
                }
            }
            let norm: Vec<Vec<C64>> = rho_oracle
                .iter()
                .map(|r| r.iter().map(|v| v / p_oracle).collect())
                .collect();
            worst = worst.max(max_diff(&to_mat(rho_replay.matrix()), &norm));
            if !valid_density(rho_replay.matrix(), 1e-9) {
                invalid += 1;
            }
        }
    }
    outcome(
        worst <= 1e-9 && invalid == 0,
        format!("max deviation {worst:.2e}, {states} conditional states, {invalid} invalid"),
    )
}

/// Oracle state just before measurement `prefix.len() + 1`.
fn replay_oracle_prefix(t: &QuantumTimeline, prefix: &[usize]) -> (f64, Mat) {
    let ms = t.measurement_steps();
    let upto = ms.get(prefix.len()).copied().unwrap_or(t.steps().len());
    let cut = QuantumTimeline::new(
        t.dimension(),
        t.initial().clone(),
        t.steps()[..upto].to_vec(),
    )
    .unwrap();
    replay_oracle(&cut, prefix)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let tol = Tolerance::default();
    let mut mismatches = 0;
    let mut worst_zero = 0.0f64;
    for _ in 0..50 {
        let w = random_coeffs(&mut rng);
        for loc in 1..=3 {
            let table = rep3_syndrome_table(&ErrorSpec::from_coeffs(loc, w).unwrap()).unwrap();
            for (s, ch) in table.syndromes.iter().zip(&table.channels) {
                match table_i(&w, s[0], s[1], loc) {
                    Some(v) => {
                        if !projective_equal(ch, &pauli_sum(&v), tol).unwrap() {
                            mismatches += 1;
                        }
                    }
                    None => worst_zero = worst_zero.max(ch.max_abs()),
                }
            }
        }
    }
    let expected = [
        ["w0 σ0 + w3 σ3", "w0 σ0 + w3 σ3", "w0 σ0 + w3 σ3"],
        ["0", "w1 σ0 + i w2 σ3", "0"],
        ["0", "0", "w1 σ0 + i w2 σ3"],
        ["w1 σ1 + w2 σ2", "0", "0"],
    ];
    let symbolic = rep3_symbolic_table().unwrap();
    let mut symbolic_bad = 0;
    for s in 0..4 {
        for loc in 0..3 {
            if symbolic[s][loc].render(1e-9) != expected[s][loc] {
                symbolic_bad += 1;
            }
        }
    }
    outcome(
        mismatches == 0 && worst_zero <= 1e-12 && symbolic_bad == 0,
        format!(
            "50 error vectors, {mismatches} cell mismatches, impossible cells max {worst_zero:.2e}, {symbolic_bad} symbolic mismatches"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let start = Instant::now();
    let tol = Tolerance::abs(1e-9);
    let mut mismatches = 0;
    let mut worst_fid = 0.0f64;
    let mut recoveries = 0;
    for _ in 0..200 {
        let loc = rng.random_range(1..=9);
        let w = random_coeffs(&mut rng);
        let psi = random::pure_state(&mut rng, 2);
        let err = ErrorSpec::from_coeffs(loc, w).unwrap();
        let table = shor_syndrome_table(&err).unwrap();
        for (s, ch) in table.syndromes.iter().zip(&table.channels) {
            let pred = shor_prediction(&w, loc, s);
            let pred_zero = pred.max_abs() == 0.0;
            let ok = if pred_zero {
                ch.max_abs() <= 1e-12 * err.matrix.frobenius_norm().max(1.0)
            } else {
                projective_equal(ch, &pred, tol).unwrap()
            };
            if !ok {
                mismatches += 1;
            }
        }
        for (s, &imp) in table.syndromes.iter().zip(&table.impossible) {
            if imp {
                continue;
            }
            let r = shor_recover(&err, s, &psi).unwrap();
            worst_fid = worst_fid.max((r.fidelity - 1.0).abs());
            recoveries += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        mismatches == 0 && worst_fid <= 1e-9 && t < Duration::from_secs(120),
        format!(
            "200 errors, {mismatches} syndrome mismatches, {recoveries} recoveries, max |fidelity - 1| {worst_fid:.2e}, {:.1}s",
            t.as_secs_f64()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let tol = Tolerance::abs(1e-10);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for m in [2, 3, 5] {
        let bases = [
            ("I", ComplexTensor::identity(m)),
            ("DFT", dft(m).unwrap()),
            ("random", random::unitary(&mut rng, m)),
        ];
        for (name, b) in bases {
            if !interaction_measurement_equivalence(&b, tol).unwrap() {
                failures.push(format!("M={m} B={name}"));
            }
            let (l, r) = interaction_measurement_graphs(&b, &mod_add_tensor(m).unwrap()).unwrap();
            let el = l.exterior_function(&BoxRegion::all(&l), None).unwrap();
            let er = r.exterior_function(&BoxRegion::all(&r), None).unwrap();
            worst = worst.max(el.max_abs_diff(&er));
        }
    }
    let b = random::unitary(&mut rng, 3);
    let mut corrupted = mod_add_tensor(3).unwrap();
    corrupted.set(&[0, 1, 2], C64::new(0.0, 0.0)).unwrap();
    corrupted.set(&[0, 1, 1], C64::new(1.0, 0.0)).unwrap();
    let control = interaction_measurement_equivalence_with(&b, &corrupted, tol).unwrap();
    outcome(
        failures.is_empty() && worst <= 1e-10 && !control,
        format!(
            "9 bases, failures {failures:?}, max deviation {worst:.2e}, corrupted adder {}",
            if control { "accepted" } else { "rejected" }
        ),
    )
}

/// `S[(a, a'), (b, b')] = sum_xi p(xi) sum_c V[(a,c),(b,xi)] conj(V[(a',c),(b',xi)])`.
fn superoperator_oracle(v: &ComplexTensor, prior: &[f64], m: usize) -> ComplexTensor {
    let d = prior.len();
    let n = m * d;
    let at = |r: usize, c: usize| v.data()[r * n + c];
    let mut out = ComplexTensor::zeros(vec![m * m, m * m]).unwrap();
    for a in 0..m {
        for a2 in 0..m {
            for b in 0..m {
                for b2 in 0..m {
                    let mut s = C64::new(0.0, 0.0);
                    for (xi, &p) in prior.iter().enumerate() {
                        for c in 0..d {
                            s += at(a * d + c, b * d + xi) * at(a2 * d + c, b2 * d + xi).conj() * p;
                        }
                    }
                    out.set(&[a * m + a2, b * m + b2], s).unwrap();
                }
            }
        }
    }
    out
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let tol = Tolerance::default();
    let mut worst = 0.0f64;
    let mut worst_tp = 0.0f64;
    for _ in 0..50 {
        let v = random::unitary(&mut rng, 4);
        let prior = random::probability_vector(&mut rng, 2);
        let fam: MeasurementFamily = interaction_to_kraus(&v, &prior, tol).unwrap();
        let s_kraus = family_superoperator(&fam).unwrap();
        let s_graph = interaction_superoperator(&v, &prior, tol).unwrap();
        let s_ref = superoperator_oracle(&v, &prior, 2);
        worst = worst
            .max(s_kraus.max_abs_diff(&s_graph))
            .max(s_graph.max_abs_diff(&s_ref));
        worst_tp = worst_tp.max(validate_measurement(&fam, tol).max_deviation);
    }
    outcome(
        worst <= 1e-9 && worst_tp <= 1e-9,
        format!("50 interactions, superoperator deviation {worst:.2e}, trace preservation {worst_tp:.2e}"),
    )
}

fn mc_graphs() -> Vec<(String, FactorGraph, Option<qfg_core::quantum::Registry>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut out = Vec::new();
    let mut toy = FactorGraph::new();
    let x = toy.add_variable(2).unwrap();
    toy.add_factor(
        ComplexTensor::from_real(vec![2], &[3.0, 1.0]).unwrap(),
        &[x],
    )
    .unwrap();
    out.push(("toy (3,1)".to_string(), toy, None));
    while out.len() < 9 {
        let g = random_graph(&mut rng, 6, 3, 5);
        let configs: usize = (0..g.variable_count())
            .map(VariableId)
            .filter(|&v| g.degree(v).unwrap() > 0)
            .map(|v| g.alphabet_size(v).unwrap())
            .product();
        // Constant-f graphs would make this a test of summation rounding.
        if configs >= 8 && g.brute_force_partition_sum().unwrap().norm() > 0.5 {
            out.push((format!("random {}", out.len()), g, None));
        }
    }
    let t = QuantumTimeline::new(
        2,
        InitialState::GivenDensity(random::density_matrix(&mut rng, 2)),
        vec![
            Step::Unitary(random::unitary(&mut rng, 2)),
            Step::Measure {
                family: projection_family(&random::unitary(&mut rng, 2), Tolerance::default())
                    .unwrap(),
                observed: None,
            },
        ],
    )
    .unwrap();
    let qg = build_graph(&t).unwrap();
    out.push((
        "quantum single measurement".to_string(),
        qg.graph,
        Some(qg.registry),
    ));
    out
}

fn criterion_9() -> Outcome {
    let k = 10_000;
    let mut failing = Vec::new();
    let mut worst_imag = 0.0f64;
    let mut repeat_ok = true;
    for (name, g, registry) in mc_graphs() {
        let truth = match &registry {
            Some(_) => C64::new(1.0, 0.0),
            None => g.brute_force_partition_sum().unwrap(),
        };
        let mut hits = 0;
        for run in 0..10u64 {
            let seed = 1000 + run;
            let report = match &registry {
                Some(reg) => {
                    let s = sample(&g, Scheme::AbsF, k, seed).unwrap();
                    let a = augment_conjugate(&s, &g, reg).unwrap();
                    for p in a.values.chunks(2) {
                        let sum = p[0] + p[1];
                        worst_imag = worst_imag
                            .max(sum.im.abs() / (p[0].norm() + p[1].norm()).max(f64::MIN_POSITIVE));
                    }
                    let r = estimate_Z(&a, &g).unwrap();
                    if r.estimate.im != 0.0 {
                        worst_imag = f64::INFINITY;
                    }
                    r
                }
                None => estimate_Z(&sample(&g, Scheme::Uniform, k, seed).unwrap(), &g).unwrap(),
            };
            if (report.estimate - truth).norm() <= 3.0 * report.std_error {
                hits += 1;
            }
            if run == 0 {
                let again = match &registry {
                    Some(reg) => {
                        let s = sample(&g, Scheme::AbsF, k, seed).unwrap();
                        estimate_Z(&augment_conjugate(&s, &g, reg).unwrap(), &g).unwrap()
                    }
                    None => estimate_Z(&sample(&g, Scheme::Uniform, k, seed).unwrap(), &g).unwrap(),
                };
                if again.estimate.re.to_bits() != report.estimate.re.to_bits()
                    || again.estimate.im.to_bits() != report.estimate.im.to_bits()
                    || again.std_error.to_bits() != report.std_error.to_bits()
                {
                    repeat_ok = false;
                }
            }
        }
        if hits < 9 {
            failing.push(format!("{name}: {hits}/10"));
        }
    }
    outcome(
        failing.is_empty() && worst_imag <= 1e-15 && repeat_ok,
        format!(
            "10 graphs x 10 runs, K = {k}, below 9/10: {failing:?}, paired imaginary residue {worst_imag:.1e}, reruns {}",
            if repeat_ok { "bit-identical" } else { "differ" }
        ),
    )
}

fn criterion_10() -> Outcome {
    let i4 = ComplexTensor::identity(4);
    let mut worst = 0.0f64;
    worst = worst.max(matmul(&cnot(), &cnot()).unwrap().max_abs_diff(&i4));
    worst = worst.max(matmul(&swap(), &swap()).unwrap().max_abs_diff(&i4));
    for k in 0..4 {
        let s = pauli(k).unwrap();
        worst = worst.max(matmul(&s, &s).unwrap().max_abs_diff(&pauli(0).unwrap()));
    }
    let h = hadamard();
    let hxh = matmul(&matmul(&h, &pauli(1).unwrap()).unwrap(), &h).unwrap();
    worst = worst.max(hxh.max_abs_diff(&pauli(3).unwrap()));
    let net = cnot_network(2).unwrap().reshape(vec![4, 4]).unwrap();
    worst = worst.max(net.max_abs_diff(&cnot()));
    outcome(worst <= 1e-12, format!("max deviation {worst:.2e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("closing-the-box soundness", criterion_1),
        ("Born rule", criterion_2),
        ("normalization and future-blindness", criterion_3),
        ("measurement calculus replay", criterion_4),
        ("repetition-code syndrome table", criterion_5),
        ("Shor code tables and recovery", criterion_6),
        ("interaction equivalence", criterion_7),
        ("Kraus/Choi correspondence", criterion_8),
        ("Monte Carlo partition sums", criterion_9),
        ("gate identities", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        println!(
            "criterion {:>2} {} {name}: {} ({:.2}s)",
            i + 1,
            if o.ok { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
