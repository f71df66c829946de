mod common;

use common::*;
use proptest::prelude::*;
use qfg_core::gates::{equality_tensor, mod_add_tensor};
use qfg_core::graph::BoxRegion;
use qfg_core::montecarlo::{augment_conjugate, sample, Scheme};
use qfg_core::quantum::{build_graph, joint_distribution, validate_measurement};
use qfg_core::tensor::{conj_transpose, einsum_pair, kron, matmul, spectral_decompose, trace};
use qfg_core::{random, ComplexTensor, FactorGraph, FactorId, Tolerance, VariableId, C64};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn square(r: &mut ChaCha8Rng, n: usize) -> ComplexTensor {
    random::ginibre(r, n, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn einsum_is_bilinear(seed in any::<u64>(), n in 1usize..4, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let mut r = rng(seed);
        let a1 = random::tensor(&mut r, vec![n, n + 1]);
        let a2 = random::tensor(&mut r, vec![n, n + 1]);
        let b = random::tensor(&mut r, vec![n + 1, 2]);
        let s = C64::new(re, im);
        let f = |a: &ComplexTensor| einsum_pair(a, &[0, 1], &b, &[1, 2], &[0, 2]).unwrap();
        let lhs = f(&a1.scale(s).add(&a2).unwrap());
        let rhs = f(&a1).scale(s).add(&f(&a2)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn kron_is_associative(seed in any::<u64>(), n in 1usize..3, m in 1usize..3, k in 1usize..3) {
        let mut r = rng(seed);
        let (a, b, c) = (square(&mut r, n), square(&mut r, m), square(&mut r, k));
        let lhs = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let rhs = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn trace_is_cyclic(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let (a, b) = (square(&mut r, n), square(&mut r, n));
        let d = trace(&matmul(&a, &b).unwrap()).unwrap() - trace(&matmul(&b, &a).unwrap()).unwrap();
        prop_assert!(d.norm() < 1e-11);
    }

    #[test]
    fn adjoint_reverses_products(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let (a, b) = (square(&mut r, n), square(&mut r, n));
        let lhs = conj_transpose(&matmul(&a, &b).unwrap()).unwrap();
        let rhs = matmul(&conj_transpose(&b).unwrap(), &conj_transpose(&a).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn spectral_decomposition_reconstructs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = square(&mut r, 8);
        let h = g.add(&conj_transpose(&g).unwrap()).unwrap();
        let (u, lambda) = spectral_decompose(&h, Tolerance::default()).unwrap();
        prop_assert!(lambda.windows(2).all(|w| w[0] >= w[1]));
        let d = ComplexTensor::diag_real(&lambda);
        let back = matmul(&matmul(&u, &d).unwrap(), &conj_transpose(&u).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&h) < 1e-10);
    }

    #[test]
    fn permute_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random::tensor(&mut r, vec![2, 3, 4]);
        let mut perm = vec![0, 1, 2];
        perm.shuffle(&mut r);
        let mut inv = vec![0; 3];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        prop_assert_eq!(t.permute(&perm).unwrap().permute(&inv).unwrap(), t);
    }

    #[test]
    fn elimination_matches_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 7, 3, 7);
        let b = BoxRegion::all(&g);
        let fast = g.exterior_function(&b, None).unwrap();
        let slow = g.brute_force_exterior(&b).unwrap();
        prop_assert!(fast.max_abs_diff(&slow) < 1e-10);
    }

    #[test]
    fn nested_boxes_compose(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 7, 3, 7);
        let mut ids: Vec<FactorId> = (0..g.factor_count()).map(FactorId).collect();
        ids.shuffle(&mut r);
        let k = r.random_range(1..=ids.len());
        let inner = BoxRegion::new(ids[..k].iter().copied());
        let e = g.exterior_function(&inner, None).unwrap();
        let labels: Vec<VariableId> = e.axis_labels().unwrap().iter().map(|&i| VariableId(i)).collect();

        // Same graph with the inner box collapsed to one factor.
        let mut h = FactorGraph::new();
        for i in 0..g.variable_count() {
            h.add_variable(g.alphabet_size(VariableId(i)).unwrap()).unwrap();
        }
        for f in &ids[k..] {
            let (t, vs) = g.factor(*f).unwrap();
            h.add_factor(t.clone(), vs).unwrap();
        }
        h.add_factor(e, &labels).unwrap();
        let lhs = g.exterior_function(&BoxRegion::all(&g), None).unwrap();
        let rhs = h.exterior_function(&BoxRegion::all(&h), None).unwrap();
        prop_assert_eq!(lhs.axis_labels(), rhs.axis_labels());
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn identity_insertion_is_invisible(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 6, 3, 6);
        let attached: Vec<VariableId> = (0..g.variable_count())
            .map(VariableId)
            .filter(|&v| g.degree(v).unwrap() == 2)
            .collect();
        prop_assume!(!attached.is_empty());
        let v = attached[r.random_range(0..attached.len())];
        let m = g.alphabet_size(v).unwrap();
        let (h, _) = g.insert_on_edge(v, ComplexTensor::identity(m)).unwrap();
        let d = h.partition_sum(None).unwrap() - g.partition_sum(None).unwrap();
        prop_assert!(d.norm() < 1e-10);
    }

    #[test]
    fn clamping_partitions_the_sum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 6, 3, 6);
        let attached: Vec<VariableId> = (0..g.variable_count())
            .map(VariableId)
            .filter(|&v| g.degree(v).unwrap() > 0)
            .collect();
        prop_assume!(!attached.is_empty());
        let v = attached[r.random_range(0..attached.len())];
        let mut total = C64::new(0.0, 0.0);
        for a in 0..g.alphabet_size(v).unwrap() {
            total += g.clamp(v, a).unwrap().partition_sum(None).unwrap();
        }
        prop_assert!((total - g.partition_sum(None).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn constraint_tensors_are_symmetric(m in 2usize..6, n in 1usize..4) {
        let add = mod_add_tensor(m).unwrap();
        for perm in [[1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0]] {
            prop_assert_eq!(&add.permute(&perm).unwrap(), &add);
        }
        let eq = equality_tensor(n, m).unwrap();
        let rev: Vec<usize> = (0..n).rev().collect();
        prop_assert_eq!(eq.permute(&rev).unwrap(), eq);
    }

    #[test]
    fn random_families_are_valid(seed in any::<u64>(), m in 1usize..5, n in 1usize..4) {
        let mut r = rng(seed);
        let fam = random_general_family(&mut r, m, n);
        prop_assert!(validate_measurement(&fam, Tolerance::default()).ok);
    }

    #[test]
    fn outcome_tables_are_distributions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.random_range(2..=4);
        let n = r.random_range(1..=3);
        let t = random_timeline(&mut r, m, n);
        let table = joint_distribution(&t).unwrap();
        prop_assert!(table.probabilities.iter().all(|&p| p >= 0.0));
        prop_assert!((table.total() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mirror_swap_conjugates(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_timeline(&mut r, 2, 2);
        let qg = build_graph(&t).unwrap();
        let s = sample(&qg.graph, Scheme::Uniform, 200, seed).unwrap();
        let a = augment_conjugate(&s, &qg.graph, &qg.registry).unwrap();
        for p in a.values.chunks(2) {
            prop_assert!((p[1] - p[0].conj()).norm() <= 1e-12 * (1.0 + p[0].norm()));
        }
    }

    #[test]
    fn seeded_sampling_repeats(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 5, 3, 4);
        prop_assume!(g.brute_force_partition_sum().is_ok());
        let a = sample(&g, Scheme::Uniform, 50, seed).unwrap();
        let b = sample(&g, Scheme::Uniform, 50, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
