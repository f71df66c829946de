use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{require_valid, DensityMatrix, MeasurementFamily};
use crate::error::{Error, Result};
use crate::gates::{equality_tensor, mod_add_tensor};
use crate::graph::{BoxRegion, FactorGraph};
use crate::tensor::{
    conj_transpose, is_unitary, matmul_chain, spectral_decompose, trace, ComplexTensor, Tolerance,
};
use crate::C64;

/// Eigenvalues of the Choi matrix at or below this are dropped when reading
/// off Kraus operators.
pub const KRAUS_EIGENVALUE_CUTOFF: f64 = 1e-12;

fn relaxed(tol: Tolerance) -> Tolerance {
    Tolerance {
        abs_eps: tol.abs_eps.max(1e-9),
        rel_eps: tol.rel_eps,
    }
}

/// `U rho U^H`.
pub fn evolve(rho: &DensityMatrix, u: &ComplexTensor, tol: Tolerance) -> Result<DensityMatrix> {
    if u.square_dim()? != rho.dimension() {
        return Err(Error::Dimension("unitary and state sizes differ".into()));
    }
    if !is_unitary(u, tol)? {
        return Err(Error::Domain("evolve needs a unitary".into()));
    }
    let out = matmul_chain(&[u, rho.matrix(), &conj_transpose(u)?])?;
    DensityMatrix::new(out, relaxed(tol))
}

/// Outcome probability `tr(A(y) rho A(y)^H)` and the normalized
/// post-measurement state.
pub fn collapse(
    rho: &DensityMatrix,
    fam: &MeasurementFamily,
    y: usize,
    tol: Tolerance,
) -> Result<(f64, DensityMatrix)> {
    require_valid(fam, tol)?;
    if fam.dimension() != rho.dimension() {
        return Err(Error::Dimension("family and state sizes differ".into()));
    }
    let a = fam.matrix(y)?;
    let unnorm = matmul_chain(&[a, rho.matrix(), &conj_transpose(a)?])?;
    let p = trace(&unnorm)?.re;
    if p <= tol.abs_eps {
        return Err(Error::ZeroProbability(format!(
            "outcome {y} has probability {p:e}"
        )));
    }
    let state = DensityMatrix::new(unnorm.scale(C64::new(1.0 / p, 0.0)), relaxed(tol))?;
    Ok((p, state))
}

/// `sum_y E(y) rho E(y)^H`.
pub fn kraus_apply(
    rho: &DensityMatrix,
    fam: &MeasurementFamily,
    tol: Tolerance,
) -> Result<DensityMatrix> {
    require_valid(fam, tol)?;
    DensityMatrix::new(kraus_sum(rho.matrix(), fam)?, relaxed(tol))
}

fn kraus_sum(rho: &ComplexTensor, fam: &MeasurementFamily) -> Result<ComplexTensor> {
    let m = fam.dimension();
    let mut acc = ComplexTensor::zeros(vec![m, m])?;
    for e in fam.matrices() {
        acc = acc.add(&matmul_chain(&[e, rho, &conj_transpose(e)?])?)?;
    }
    Ok(acc)
}

/// Superoperator of a Kraus family as an `M^2 x M^2` matrix with rows
/// `(x_out, x_out')` and columns `(x_in, x_in')`, so that
/// `vec(rho_out) = S vec(rho_in)` under row-major vectorization.
pub fn family_superoperator(fam: &MeasurementFamily) -> Result<ComplexTensor> {
    let m = fam.dimension();
    let mut s = ComplexTensor::zeros(vec![m * m, m * m])?;
    let mut data = s.clone().into_data();
    for e in fam.matrices() {
        let d = e.data();
        for a in 0..m {
            for ap in 0..m {
                for x in 0..m {
                    for xp in 0..m {
                        data[(a * m + ap) * m * m + x * m + xp] +=
                            d[a * m + x] * d[ap * m + xp].conj();
                    }
                }
            }
        }
    }
    s = ComplexTensor::new(vec![m * m, m * m], data)?;
    Ok(s)
}

/// Superoperator of a system of size `M` interacting through the unitary
/// `V` (on the `M * d` joint space, system factor first) with an ancilla
/// prepared in basis state `xi` with probability `prior[xi]` and discarded
/// afterwards. Obtained by closing the box around the conjugate pair of
/// `V` factors, the ancilla prior and the ancilla's terminal equality node.
/// Layout as in [`family_superoperator`].
pub fn interaction_superoperator(
    v: &ComplexTensor,
    prior: &[f64],
    tol: Tolerance,
) -> Result<ComplexTensor> {
    let (m, d) = interaction_dims(v, prior, tol)?;
    let v4 = v.reshape(vec![m, d, m, d])?;
    let mut g = FactorGraph::new();
    let x_out = g.add_variable(m)?;
    let x_out_l = g.add_variable(m)?;
    let x_in = g.add_variable(m)?;
    let x_in_l = g.add_variable(m)?;
    let xi = g.add_variable(d)?;
    let xi_u = g.add_variable(d)?;
    let xi_l = g.add_variable(d)?;
    let a_u = g.add_variable(d)?;
    let a_l = g.add_variable(d)?;
    g.add_factor(ComplexTensor::from_real(vec![d], prior)?, &[xi])?;
    g.add_factor(equality_tensor(3, d)?, &[xi, xi_u, xi_l])?;
    g.add_factor(v4.clone(), &[x_out, a_u, x_in, xi_u])?;
    g.add_factor(v4.conj(), &[x_out_l, a_l, x_in_l, xi_l])?;
    g.add_factor(equality_tensor(2, d)?, &[a_u, a_l])?;
    // Axes come back as (x_out, x_out', x_in, x_in').
    let e = g.exterior_function(&BoxRegion::all(&g), None)?;
    e.reshape(vec![m * m, m * m])
}

fn interaction_dims(v: &ComplexTensor, prior: &[f64], tol: Tolerance) -> Result<(usize, usize)> {
    let n = v.square_dim()?;
    let d = prior.len();
    if d == 0 || n % d != 0 {
        return Err(Error::Dimension(format!(
            "ancilla size {d} does not divide the joint dimension {n}"
        )));
    }
    if !is_unitary(v, tol)? {
        return Err(Error::Domain("interaction must be unitary".into()));
    }
    if prior.iter().any(|&p| !(p >= 0.0))
        || (prior.iter().sum::<f64>() - 1.0).abs() > tol.bound(1.0)
    {
        return Err(Error::Domain(
            "ancilla prior is not a probability vector".into(),
        ));
    }
    Ok((n / d, d))
}

/// Kraus operators equivalent to a marginalized unitary interaction, read
/// off the eigendecomposition of the Choi matrix
/// `C[(x_out, x_in), (x_out', x_in')] = S[(x_out, x_out'), (x_in, x_in')]`.
pub fn interaction_to_kraus(
    v: &ComplexTensor,
    prior: &[f64],
    tol: Tolerance,
) -> Result<MeasurementFamily> {
    let (m, _) = interaction_dims(v, prior, tol)?;
    let s = interaction_superoperator(v, prior, tol)?;
    let choi = s
        .reshape(vec![m, m, m, m])?
        .permute(&[0, 2, 1, 3])?
        .reshape(vec![m * m, m * m])?;
    let (u, lambda) = spectral_decompose(&choi, relaxed(tol))?;
    let mut ops = Vec::new();
    for (j, &l) in lambda.iter().enumerate() {
        if l <= KRAUS_EIGENVALUE_CUTOFF {
            continue;
        }
        let s = libm::sqrt(l);
        let data = (0..m * m)
            .map(|row| u.data()[row * m * m + j] * s)
            .collect();
        ops.push(ComplexTensor::new(vec![m, m], data)?);
    }
    if ops.is_empty() {
        return Err(Error::Internal(
            "interaction channel has no Kraus operators".into(),
        ));
    }
    MeasurementFamily::new(ops)
}

/// The two graphs whose equivalence shows that a projection measurement in
/// basis `B` with its outcome ignored is the same as a unitary interaction
/// with an `M`-ary ancilla through mod-`M` adders.
///
/// Both graphs have boundary `(x, x', x_out, x_out')`. In the first, the
/// upper chain is `B^H`, a degree-3 equality node splitting off `zeta`, then
/// `B`; `zeta` enters an adder with the ancilla, the lower chain mirrors it,
/// the ancilla starts from a uniform prior copied to both chains, and the
/// two adders share the ancilla output. In the second, `zeta` and its
/// mirror are joined directly. `adder` replaces the mod-`M` adder so that
/// corrupted variants can be tested.
pub fn interaction_measurement_graphs(
    b: &ComplexTensor,
    adder: &ComplexTensor,
) -> Result<(FactorGraph, FactorGraph)> {
    let m = b.square_dim()?;
    if adder.shape() != [m, m, m] {
        return Err(Error::Dimension("adder must be an M x M x M tensor".into()));
    }
    let bh = conj_transpose(b)?;
    let chains = |g: &mut FactorGraph| -> Result<[crate::graph::VariableId; 2]> {
        let x = g.add_variable(m)?;
        let xl = g.add_variable(m)?;
        let xo = g.add_variable(m)?;
        let xol = g.add_variable(m)?;
        let mut zetas = [x; 2];
        for (half, (xin, xout)) in [(x, xo), (xl, xol)].into_iter().enumerate() {
            let (bh_t, b_t) = if half == 0 {
                (bh.clone(), b.clone())
            } else {
                (bh.conj(), b.conj())
            };
            let u1 = g.add_variable(m)?;
            let u2 = g.add_variable(m)?;
            let zeta = g.add_variable(m)?;
            g.add_factor(bh_t, &[u1, xin])?;
            g.add_factor(equality_tensor(3, m)?, &[u1, u2, zeta])?;
            g.add_factor(b_t, &[xout, u2])?;
            zetas[half] = zeta;
        }
        Ok(zetas)
    };

    let mut left = FactorGraph::new();
    let [zeta, zeta_l] = chains(&mut left)?;
    let xi = left.add_variable(m)?;
    let xi_u = left.add_variable(m)?;
    let xi_l = left.add_variable(m)?;
    let xi_out = left.add_variable(m)?;
    left.add_factor(
        ComplexTensor::from_real(vec![m], &vec![1.0 / m as f64; m])?,
        &[xi],
    )?;
    left.add_factor(equality_tensor(3, m)?, &[xi, xi_u, xi_l])?;
    left.add_factor(adder.clone(), &[xi_u, zeta, xi_out])?;
    left.add_factor(adder.conj(), &[xi_l, zeta_l, xi_out])?;

    let mut right = FactorGraph::new();
    let [zeta, zeta_l] = chains(&mut right)?;
    right.add_factor(equality_tensor(2, m)?, &[zeta, zeta_l])?;
    Ok((left, right))
}

/// Contracts both graphs of [`interaction_measurement_graphs`] with the
/// balanced mod-`M` adder and compares their exterior functions.
pub fn interaction_measurement_equivalence(b: &ComplexTensor, tol: Tolerance) -> Result<bool> {
    let m = b.square_dim()?;
    if !is_unitary(b, tol)? {
        return Err(Error::Domain("basis must be unitary".into()));
    }
    if m < 2 {
        return Err(Error::Argument(
            "interaction equivalence needs M >= 2".into(),
        ));
    }
    interaction_measurement_equivalence_with(b, &mod_add_tensor(m)?, tol)
}

/// [`interaction_measurement_equivalence`] with a caller-supplied adder.
pub fn interaction_measurement_equivalence_with(
    b: &ComplexTensor,
    adder: &ComplexTensor,
    tol: Tolerance,
) -> Result<bool> {
    let (l, r) = interaction_measurement_graphs(b, adder)?;
    let el = l.exterior_function(&BoxRegion::all(&l), None)?;
    let er = r.exterior_function(&BoxRegion::all(&r), None)?;
    Ok(tol.close(&el, &er))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace of a state on an `n * m` system (first factor `n`,
/// second `m`), keeping the requested subsystem.
pub fn partial_trace(
    rho: &DensityMatrix,
    n: usize,
    m: usize,
    keep: Subsystem,
    tol: Tolerance,
) -> Result<DensityMatrix> {
    if n == 0 || m == 0 || n * m != rho.dimension() {
        return Err(Error::Dimension(format!(
            "state of size {} does not factor as {n} x {m}",
            rho.dimension()
        )));
    }
    let t = rho.matrix().reshape(vec![n, m, n, m])?;
    let out = match keep {
        // rho_A(a, a') = sum_b rho(a, b, a', b)
        Subsystem::First => crate::tensor::einsum_single(&t, &[0, 1, 2, 1], &[0, 2])?,
        Subsystem::Second => crate::tensor::einsum_single(&t, &[0, 1, 0, 3], &[1, 3])?,
    };
    DensityMatrix::new(out, relaxed(tol))
}

/// Post-processes an outcome distribution `p(zeta)` through a classical
/// channel, `channel[zeta][y] = p(y | zeta)`.
pub fn apply_classical_channel(
    p: &[f64],
    channel: &[Vec<f64>],
    tol: Tolerance,
) -> Result<Vec<f64>> {
    if channel.len() != p.len() {
        return Err(Error::Dimension(format!(
            "channel has {} rows for {} inputs",
            channel.len(),
            p.len()
        )));
    }
    let ny = channel.first().map(|r| r.len()).unwrap_or(0);
    let mut out = vec![0.0; ny];
    for (z, row) in channel.iter().enumerate() {
        if row.len() != ny {
            return Err(Error::Dimension("channel rows differ in length".into()));
        }
        if row.iter().any(|&q| !(q >= 0.0))
            || (row.iter().sum::<f64>() - 1.0).abs() > tol.bound(1.0)
        {
            return Err(Error::Domain(format!(
                "channel row {z} is not a probability vector"
            )));
        }
        for (o, &q) in out.iter_mut().zip(row) {
            *o += p[z] * q;
        }
    }
    Ok(out)
}
