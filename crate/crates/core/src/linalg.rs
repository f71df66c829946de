//! Small dense complex linear algebra on row-major square matrices.
//!
//! Everything here works on raw `&[C64]` slices of length `n * n`; the
//! [`ComplexTensor`](crate::ComplexTensor) wrappers live in [`crate::tensor`].

use alloc::vec;
use alloc::vec::Vec;

use crate::C64;

/// Row-major `n x n` product `a * b`.
pub fn matmul_square(n: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
    matmul(n, n, n, a, b)
}

/// Row-major `(r x k) * (k x c)` product.
pub fn matmul(r: usize, k: usize, c: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
    debug_assert_eq!(a.len(), r * k);
    debug_assert_eq!(b.len(), k * c);
    let mut out = vec![C64::new(0.0, 0.0); r * c];
    for i in 0..r {
        for l in 0..k {
            let x = a[i * k + l];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            let row = &b[l * c..(l + 1) * c];
            for (o, y) in out[i * c..(i + 1) * c].iter_mut().zip(row) {
                *o += x * y;
            }
        }
    }
    out
}

/// Conjugate transpose of a row-major `r x c` matrix.
pub fn adjoint(r: usize, c: usize, a: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); r * c];
    for i in 0..r {
        for j in 0..c {
            out[j * r + i] = a[i * c + j].conj();
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Returns `(eigenvalues, eigenvectors)` where eigenvector `k` is column `k`
/// of the returned row-major matrix. Eigenvalues come back unsorted. Only
/// the upper triangle's Hermitian part is trusted; the input is symmetrized
/// first.
pub fn hermitian_eigen(n: usize, input: &[C64]) -> (Vec<f64>, Vec<C64>) {
    let mut a: Vec<C64> = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (input[i * n + j] + input[j * n + i].conj()) * 0.5;
        }
    }
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }

    let scale = libm::sqrt(a.iter().map(|x| x.norm_sqr()).sum::<f64>());
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i * n + j].norm_sqr();
            }
        }
        if libm::sqrt(off) <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // Phase-rotate so the (p, q) entry is real, then apply a real
                // Givens rotation. Combined: G = diag(1, e^{-i phi}) * Q.
                let phase = apq / mag;
                let theta = 0.5 * libm::atan2(2.0 * mag, aqq - app);
                let (s, c) = (libm::sin(theta), libm::cos(theta));
                let g00 = C64::new(c, 0.0);
                let g01 = C64::new(s, 0.0);
                let g10 = -phase.conj() * s;
                let g11 = phase.conj() * c;

                // A <- A G (columns p, q)
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * g00 + akq * g10;
                    a[k * n + q] = akp * g01 + akq * g11;
                }
                // A <- G^H A (rows p, q)
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = g00.conj() * apk + g10.conj() * aqk;
                    a[q * n + k] = g01.conj() * apk + g11.conj() * aqk;
                }
                a[p * n + q] = C64::new(0.0, 0.0);
                a[q * n + p] = C64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                // V <- V G
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * g00 + vkq * g10;
                    v[k * n + q] = vkp * g01 + vkq * g11;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i].re).collect();
    (values, v)
}

/// Orthonormalizes the columns of a row-major `n x n` matrix in place
/// (modified Gram-Schmidt). Returns `false` if the columns are numerically
/// dependent.
pub fn gram_schmidt_columns(n: usize, m: &mut [C64]) -> bool {
    for j in 0..n {
        for k in 0..j {
            let mut dot = C64::new(0.0, 0.0);
            for i in 0..n {
                dot += m[i * n + k].conj() * m[i * n + j];
            }
            for i in 0..n {
                let t = m[i * n + k];
                m[i * n + j] -= dot * t;
            }
        }
        let norm = libm::sqrt((0..n).map(|i| m[i * n + j].norm_sqr()).sum::<f64>());
        if norm < 1e-12 {
            return false;
        }
        for i in 0..n {
            m[i * n + j] /= norm;
        }
    }
    true
}
