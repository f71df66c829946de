//! Random unitaries, states and density matrices for tests and examples.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg;
use crate::tensor::ComplexTensor;
use crate::{c64, C64};

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64(re, im)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexTensor {
    let data = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    ComplexTensor::new(alloc::vec![rows, cols], data).expect("finite samples")
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexTensor {
    loop {
        let mut m: Vec<C64> = ginibre(rng, n, n).into_data();
        if linalg::gram_schmidt_columns(n, &mut m) {
            return ComplexTensor::new(alloc::vec![n, n], m).expect("finite");
        }
    }
}

/// Uniformly random unit vector.
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Random full-rank density matrix `G G^H / tr(G G^H)`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexTensor {
    let g = ginibre(rng, n, n);
    let ggh = linalg::matmul_square(n, g.data(), &linalg::adjoint(n, n, g.data()));
    let tr: f64 = (0..n).map(|i| ggh[i * n + i].re).sum();
    let data = ggh.into_iter().map(|z| z / tr).collect();
    ComplexTensor::new(alloc::vec![n, n], data).expect("finite")
}

/// Random probability vector (normalized exponentials).
pub fn probability_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n)
        .map(|_| -libm::log(1.0 - rng.random::<f64>()))
        .collect();
    let s: f64 = w.iter().sum();
    if s <= 0.0 {
        return alloc::vec![1.0 / n as f64; n];
    }
    w.into_iter().map(|x| x / s).collect()
}

/// Random tensor with i.i.d. complex Gaussian entries.
pub fn tensor<R: Rng + ?Sized>(rng: &mut R, shape: Vec<usize>) -> ComplexTensor {
    let n = shape.iter().product();
    let data = (0..n).map(|_| complex_gaussian(rng)).collect();
    ComplexTensor::new(shape, data).expect("finite")
}
