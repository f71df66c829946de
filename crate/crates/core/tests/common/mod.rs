//! Shared generators and independent reference computations for the
//! integration tests. Nothing here calls into the contraction engine.

#![allow(dead_code)]

use qfg_core::gates::{hadamard, pauli};
use qfg_core::quantum::{
    partial_family, projection_family, InitialState, MeasurementFamily, QuantumTimeline, Step,
};
use qfg_core::random;
use qfg_core::C64;
use qfg_core::{ComplexTensor, FactorGraph, Tolerance, VariableId};
use rand::Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Random graph with up to `max_vars` variables of alphabet size up to
/// `max_alpha` and up to `max_factors` factors. Every variable is attached
/// to at most two factors; the ones with a single attachment are half
/// edges.
pub fn random_graph<R: Rng>(
    rng: &mut R,
    max_vars: usize,
    max_alpha: usize,
    max_factors: usize,
) -> FactorGraph {
    let mut g = FactorGraph::new();
    let nv = rng.random_range(1..=max_vars);
    let sizes: Vec<usize> = (0..nv).map(|_| rng.random_range(1..=max_alpha)).collect();
    let vars: Vec<VariableId> = sizes.iter().map(|&s| g.add_variable(s).unwrap()).collect();
    let mut free = vec![2usize; nv];
    let nf = rng.random_range(1..=max_factors);
    for _ in 0..nf {
        let available: Vec<usize> = (0..nv).filter(|&i| free[i] > 0).collect();
        if available.is_empty() {
            break;
        }
        let arity = rng.random_range(1..=available.len().min(3));
        let mut chosen = Vec::new();
        for _ in 0..arity {
            let cands: Vec<usize> = (0..nv).filter(|&i| free[i] > 0).collect();
            if cands.is_empty() {
                break;
            }
            let i = cands[rng.random_range(0..cands.len())];
            free[i] -= 1;
            chosen.push(i);
        }
        let shape: Vec<usize> = chosen.iter().map(|&i| sizes[i]).collect();
        let t = random::tensor(rng, shape);
        let vs: Vec<VariableId> = chosen.iter().map(|&i| vars[i]).collect();
        g.add_factor(t, &vs).unwrap();
    }
    g
}

pub type Mat = Vec<Vec<C64>>;

pub fn to_mat(t: &ComplexTensor) -> Mat {
    let (r, cols) = (t.shape()[0], t.shape()[1]);
    (0..r)
        .map(|i| t.data()[i * cols..(i + 1) * cols].to_vec())
        .collect()
}

pub fn from_mat(m: &Mat) -> ComplexTensor {
    let r = m.len();
    let cols = m[0].len();
    ComplexTensor::new(vec![r, cols], m.iter().flatten().copied().collect()).unwrap()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = vec![vec![c(0.0, 0.0); m]; n];
    for i in 0..n {
        for j in 0..m {
            for l in 0..k {
                out[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    out
}

pub fn mat_adj(a: &Mat) -> Mat {
    let r = a.len();
    let cols = a[0].len();
    (0..cols)
        .map(|j| (0..r).map(|i| a[i][j].conj()).collect())
        .collect()
}

pub fn mat_trace(a: &Mat) -> C64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Born probabilities `|B(., y)^H U(., x)|^2` by direct summation.
pub fn born_oracle(u: &ComplexTensor, b: &ComplexTensor, x: usize) -> Vec<f64> {
    let m = u.shape()[0];
    (0..m)
        .map(|y| {
            let mut amp = c(0.0, 0.0);
            for i in 0..m {
                amp += b.data()[i * m + y].conj() * u.data()[i * m + x];
            }
            amp.norm_sqr()
        })
        .collect()
}

/// Sequential density-matrix simulation with naive matrix loops:
/// probability of the outcome sequence and the unnormalized final state.
pub fn replay_oracle(t: &QuantumTimeline, outcomes: &[usize]) -> (f64, Mat) {
    let m = t.dimension();
    let mut rho: Mat = match t.initial() {
        InitialState::ClassicalPrior(p) => (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { c(p[i], 0.0) } else { c(0.0, 0.0) })
                    .collect()
            })
            .collect(),
        InitialState::KnownValue(x) => (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == *x && j == *x {
                            c(1.0, 0.0)
                        } else {
                            c(0.0, 0.0)
                        }
                    })
                    .collect()
            })
            .collect(),
        InitialState::GivenDensity(r) => to_mat(r),
    };
    let mut j = 0;
    for step in t.steps() {
        match step {
            Step::Unitary(u) => {
                let u = to_mat(u);
                rho = mat_mul(&mat_mul(&u, &rho), &mat_adj(&u));
            }
            Step::Measure { family, .. } => {
                let a = to_mat(family.matrix(outcomes[j]).unwrap());
                rho = mat_mul(&mat_mul(&a, &rho), &mat_adj(&a));
                j += 1;
            }
        }
    }
    (mat_trace(&rho).re, rho)
}

/// General measurement family from the first `m` columns of a random
/// `(m * n) x (m * n)` unitary, split into `n` stacked blocks.
pub fn random_general_family<R: Rng>(rng: &mut R, m: usize, n: usize) -> MeasurementFamily {
    let v = random::unitary(rng, m * n);
    let big = m * n;
    let mats = (0..n)
        .map(|y| {
            let data = (0..m)
                .flat_map(|i| (0..m).map(move |k| (y * m + i, k)))
                .map(|(r, k)| v.data()[r * big + k])
                .collect();
            ComplexTensor::new(vec![m, m], data).unwrap()
        })
        .collect();
    MeasurementFamily::new(mats).unwrap()
}

/// Projection, partial (when `m` is composite) or general family.
pub fn random_family<R: Rng>(rng: &mut R, m: usize) -> MeasurementFamily {
    let tol = Tolerance::default();
    match rng.random_range(0..3) {
        0 => projection_family(&random::unitary(rng, m), tol).unwrap(),
        1 if m == 4 => partial_family(&random::unitary(rng, 2), 2, tol).unwrap(),
        _ => {
            let n = rng.random_range(2..=3);
            random_general_family(rng, m, n)
        }
    }
}

pub fn random_initial<R: Rng>(rng: &mut R, m: usize) -> InitialState {
    match rng.random_range(0..3) {
        0 => InitialState::ClassicalPrior(random::probability_vector(rng, m)),
        1 => InitialState::KnownValue(rng.random_range(0..m)),
        _ => InitialState::GivenDensity(random::density_matrix(rng, m)),
    }
}

/// Random timeline with `measurements` unobserved measurements, each
/// possibly preceded by a unitary.
pub fn random_timeline<R: Rng>(rng: &mut R, m: usize, measurements: usize) -> QuantumTimeline {
    let mut steps = Vec::new();
    for _ in 0..measurements {
        if rng.random_bool(0.7) {
            steps.push(Step::Unitary(random::unitary(rng, m)));
        }
        steps.push(Step::Measure {
            family: random_family(rng, m),
            observed: None,
        });
    }
    QuantumTimeline::new(m, random_initial(rng, m), steps).unwrap()
}

/// Reference single-qubit repetition-code table in Pauli coefficients:
/// `None` for an impossible syndrome.
pub fn table_i(w: &[C64; 4], y2: u8, y1: u8, location: usize) -> Option<[C64; 4]> {
    let z = c(0.0, 0.0);
    let i = c(0.0, 1.0);
    match (y2, y1, location) {
        (0, 0, _) => Some([w[0], z, z, w[3]]),
        (0, 1, 2) | (1, 0, 3) => Some([w[1], z, z, i * w[2]]),
        (1, 1, 1) => Some([z, w[1], w[2], z]),
        _ => None,
    }
}

pub fn pauli_sum(w: &[C64; 4]) -> ComplexTensor {
    let mut out = ComplexTensor::zeros(vec![2, 2]).unwrap();
    for (k, &wk) in w.iter().enumerate() {
        out = out.add(&pauli(k).unwrap().scale(wk)).unwrap();
    }
    out
}

pub fn pauli_coeffs(a: &ComplexTensor) -> [C64; 4] {
    let a = to_mat(a);
    let mut w = [c(0.0, 0.0); 4];
    for (k, wk) in w.iter_mut().enumerate() {
        *wk = mat_trace(&mat_mul(&to_mat(&pauli(k).unwrap()), &a)) * 0.5;
    }
    w
}

/// Shor-code prediction by composing the repetition-code table: the inner
/// block containing the error, conjugated by the Hadamard, seen by the
/// outer code at the block's position. `syndrome` holds the eight bits in
/// block order followed by the outer pair.
pub fn shor_prediction(w: &[C64; 4], location: usize, syndrome: &[u8]) -> ComplexTensor {
    let block = (location - 1) / 3;
    let pos = (location - 1) % 3 + 1;
    let zero = ComplexTensor::zeros(vec![2, 2]).unwrap();
    for g in 0..3 {
        if g != block && (syndrome[2 * g] != 0 || syndrome[2 * g + 1] != 0) {
            return zero;
        }
    }
    let inner = match table_i(w, syndrome[2 * block], syndrome[2 * block + 1], pos) {
        Some(v) => pauli_sum(&v),
        None => return zero,
    };
    let h = to_mat(&hadamard());
    let seen = from_mat(&mat_mul(&mat_mul(&h, &to_mat(&inner)), &h));
    let w_outer = pauli_coeffs(&seen);
    match table_i(&w_outer, syndrome[6], syndrome[7], block + 1) {
        Some(v) => pauli_sum(&v),
        None => zero,
    }
}

pub fn random_coeffs<R: Rng>(rng: &mut R) -> [C64; 4] {
    loop {
        let w = [
            random::complex_gaussian(rng),
            random::complex_gaussian(rng),
            random::complex_gaussian(rng),
            random::complex_gaussian(rng),
        ];
        if w.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3 {
            return w;
        }
    }
}
