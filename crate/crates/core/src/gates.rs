//! Constraint factors and standard gates.
//!
//! Gate matrices are indexed `U(out, in)`. Two-qubit gates act on the pair
//! `(control, target)` flattened control-major, so `cnot` maps basis index
//! `2 * c + t` to `2 * c + (t ^ c)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{BoxRegion, FactorGraph};
use crate::tensor::{is_unitary, kron, ComplexTensor, Tolerance};
use crate::{c64, C64};

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Degree-`n` equality constraint over an alphabet of size `m`: 1 when all
/// arguments agree, 0 otherwise. Degree 2 is the identity matrix.
pub fn equality_tensor(n: usize, m: usize) -> Result<ComplexTensor> {
    if n == 0 || m == 0 {
        return Err(Error::Argument(
            "equality constraint needs n >= 1 and m >= 1".into(),
        ));
    }
    let shape = vec![m; n];
    let mut t = ComplexTensor::zeros(shape)?;
    for x in 0..m {
        t.set(&vec![x; n], c64(1.0, 0.0))?;
    }
    Ok(t)
}

/// Indicator of `(a + b + c) mod m == 0`.
pub fn mod_add_tensor(m: usize) -> Result<ComplexTensor> {
    if m < 2 {
        return Err(Error::Argument(format!(
            "mod-m adder needs m >= 2, got {m}"
        )));
    }
    let mut t = ComplexTensor::zeros(vec![m, m, m])?;
    for a in 0..m {
        for b in 0..m {
            let c = (2 * m - a - b) % m;
            t.set(&[a, b, c], c64(1.0, 0.0))?;
        }
    }
    Ok(t)
}

/// Pauli matrix `sigma_k`, `k` in `0..4` (`sigma_0` is the identity).
pub fn pauli(k: usize) -> Result<ComplexTensor> {
    let (o, z, i) = (c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 1.0));
    let data = match k {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, -i, i, z],
        3 => [o, z, z, -o],
        _ => return Err(Error::Argument(format!("Pauli index {k} not in 0..4"))),
    };
    ComplexTensor::new(vec![2, 2], data.to_vec())
}

/// All four Pauli matrices.
pub fn paulis() -> [ComplexTensor; 4] {
    [0, 1, 2, 3].map(|k| pauli(k).expect("index in range"))
}

pub fn hadamard() -> ComplexTensor {
    let h = c64(FRAC_1_SQRT_2, 0.0);
    ComplexTensor::new(vec![2, 2], vec![h, h, h, -h]).expect("valid constant")
}

/// CNOT obtained by contracting the equality/adder network: an equality
/// node copies the control onto a link, and a parity check joins the link,
/// the target input and the target output.
pub fn cnot() -> ComplexTensor {
    cnot_network(2).expect("valid constant")
}

/// Generalized CNOT on two `m`-ary wires: `(c, t) -> (c, t + c mod m)`.
pub fn cnot_network(m: usize) -> Result<ComplexTensor> {
    let mut g = FactorGraph::new();
    let c_in = g.add_variable(m)?;
    let t_in = g.add_variable(m)?;
    let c_out = g.add_variable(m)?;
    let t_out = g.add_variable(m)?;
    let link = g.add_variable(m)?;
    g.add_factor(equality_tensor(3, m)?, &[c_in, c_out, link])?;
    // f(t_in, link, t_out) needs t_out = t_in + link, i.e. t_in + link +
    // (-t_out) = 0; negate t_out's axis to reuse the balanced adder.
    g.add_factor(adder_with_negated_last(m)?, &[t_in, link, t_out])?;
    // Exterior axes come back as (c_in, t_in, c_out, t_out).
    let e = g.exterior_function(&BoxRegion::all(&g), None)?;
    e.permute(&[2, 3, 0, 1])?.reshape(vec![m * m, m * m])
}

fn adder_with_negated_last(m: usize) -> Result<ComplexTensor> {
    let base = mod_add_tensor(m)?;
    let mut t = ComplexTensor::zeros(vec![m, m, m])?;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                t.set(&[a, b, (m - c) % m], base.get(&[a, b, c])?)?;
            }
        }
    }
    Ok(t)
}

/// Swap of two `m`-ary wires.
pub fn swap_m(m: usize) -> ComplexTensor {
    let n = m * m;
    let mut t = ComplexTensor::zeros(vec![n, n]).expect("nonzero size");
    for a in 0..m {
        for b in 0..m {
            t.set(&[b * m + a, a * m + b], c64(1.0, 0.0))
                .expect("in range");
        }
    }
    t
}

pub fn swap() -> ComplexTensor {
    swap_m(2)
}

/// `block_diag(I, U)`: apply `U` to the target when the control qubit is 1.
pub fn controlled(u: &ComplexTensor) -> Result<ComplexTensor> {
    let m = u.square_dim()?;
    if !is_unitary(u, Tolerance::default())? {
        return Err(Error::Domain("controlled() needs a unitary".into()));
    }
    let mut t = ComplexTensor::zeros(vec![2 * m, 2 * m])?;
    for i in 0..m {
        t.set(&[i, i], c64(1.0, 0.0))?;
        for j in 0..m {
            t.set(&[m + i, m + j], u.get(&[i, j])?)?;
        }
    }
    Ok(t)
}

/// Unitary discrete Fourier transform, `F(j, k) = exp(2 pi i j k / m) / sqrt(m)`.
pub fn dft(m: usize) -> Result<ComplexTensor> {
    if m == 0 {
        return Err(Error::Argument("DFT size must be at least 1".into()));
    }
    let s = 1.0 / libm::sqrt(m as f64);
    let mut data = Vec::with_capacity(m * m);
    for j in 0..m {
        for k in 0..m {
            let angle = 2.0 * core::f64::consts::PI * ((j * k) % m) as f64 / m as f64;
            data.push(c64(s * libm::cos(angle), s * libm::sin(angle)));
        }
    }
    ComplexTensor::new(vec![m, m], data)
}

/// Names accepted by [`gate_by_name`].
pub const GATE_NAMES: &[&str] = &[
    "identity", "equality", "mod_add", "I", "X", "Y", "Z", "H", "CNOT", "SWAP", "DFT",
];

/// Resolves a gate name against the sizes of the variables it attaches to.
///
/// `identity`, `equality`, `mod_add` and `DFT` take their alphabet from the
/// first variable (`equality` has one axis per variable). The fixed gates
/// accept either one axis per matrix index (`[4, 4]` for CNOT) or one axis
/// per wire (`[2, 2, 2, 2]`, outputs first).
pub fn gate_by_name(name: &str, sizes: &[usize]) -> Result<ComplexTensor> {
    let first = || {
        sizes
            .first()
            .copied()
            .ok_or_else(|| Error::Argument(format!("gate {name} needs at least one variable")))
    };
    let t = match name {
        "identity" => ComplexTensor::identity(first()?),
        "equality" => equality_tensor(sizes.len(), first()?)?,
        "mod_add" => mod_add_tensor(first()?)?,
        "I" | "sigma0" => pauli(0)?,
        "X" | "sigma1" => pauli(1)?,
        "Y" | "sigma2" => pauli(2)?,
        "Z" | "sigma3" => pauli(3)?,
        "H" | "hadamard" => hadamard(),
        "CNOT" | "cnot" => cnot(),
        "SWAP" | "swap" => swap(),
        "DFT" | "dft" => dft(first()?)?,
        _ => return Err(Error::Argument(unknown_gate(name))),
    };
    if t.shape() == sizes {
        return Ok(t);
    }
    t.reshape(sizes.to_vec()).map_err(|_| {
        Error::Dimension(format!(
            "gate {name} of shape {:?} does not fit variables of sizes {sizes:?}",
            t.shape()
        ))
    })
}

fn unknown_gate(name: &str) -> String {
    format!(
        "unknown gate '{name}', expected one of {}",
        GATE_NAMES.join(", ")
    )
}

/// `kron` of a list of matrices, left factor most significant.
pub fn kron_all(ms: &[ComplexTensor]) -> Result<ComplexTensor> {
    let mut acc = ComplexTensor::identity(1);
    for m in ms {
        acc = kron(&acc, m)?;
    }
    Ok(acc)
}

/// Linear combination `sum_k w_k sigma_k`.
pub fn pauli_combination(w: &[C64; 4]) -> ComplexTensor {
    let mut acc = ComplexTensor::zeros(vec![2, 2]).expect("nonzero size");
    for (k, &wk) in w.iter().enumerate() {
        acc = acc
            .add(&pauli(k).expect("index in range").scale(wk))
            .expect("same shape");
    }
    acc
}
