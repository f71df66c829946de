//! Repetition-code and Shor-code effective channels.
//!
//! Circuits are assembled from the gate library on top of a factor graph:
//! a CNOT is a degree-3 equality node on the control joined to a parity
//! check on the target, ancillas start from a one-hot factor on `|0>`, and
//! the detector is the mirror image of the encoder. Clamping the detector's
//! ancilla outputs to a syndrome and closing the box gives the effective
//! 2x2 channel from the data input to the data output.
//!
//! Error locations are 1-based qubit indices. Syndrome bits are listed
//! `(Y2, Y1)` per three-qubit block, `Y1` being read off the block's second
//! qubit and `Y2` off its third.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gates::{equality_tensor, hadamard, mod_add_tensor, pauli, pauli_combination};
use crate::graph::{BoxRegion, FactorGraph, VariableId};
use crate::tensor::{einsum_single, matmul, projective_equal, trace, ComplexTensor, Tolerance};
use crate::C64;

/// Relative Frobenius norm at or below which a channel counts as zero.
pub const IMPOSSIBLE_THRESHOLD: f64 = 1e-12;

/// A single-qubit error `A` at a 1-based qubit location.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSpec {
    pub location: usize,
    pub matrix: ComplexTensor,
}

impl ErrorSpec {
    pub fn new(location: usize, matrix: ComplexTensor) -> Result<Self> {
        if matrix.shape() != [2, 2] {
            return Err(Error::Dimension("error matrix must be 2x2".into()));
        }
        if matrix.frobenius_norm() == 0.0 {
            return Err(Error::Argument("error matrix must be nonzero".into()));
        }
        if location == 0 {
            return Err(Error::Argument("error locations are 1-based".into()));
        }
        Ok(ErrorSpec { location, matrix })
    }

    /// `A = sum_k w_k sigma_k`.
    pub fn from_coeffs(location: usize, w: [C64; 4]) -> Result<Self> {
        Self::new(location, from_pauli_coeffs(&w))
    }

    pub fn coeffs(&self) -> [C64; 4] {
        pauli_coeffs(&self.matrix).expect("2x2")
    }
}

/// Pauli-basis coefficients `w_k = tr(sigma_k A) / 2`.
pub fn pauli_coeffs(a: &ComplexTensor) -> Result<[C64; 4]> {
    if a.shape() != [2, 2] {
        return Err(Error::Dimension(
            "Pauli decomposition needs a 2x2 matrix".into(),
        ));
    }
    let mut w = [C64::new(0.0, 0.0); 4];
    for (k, wk) in w.iter_mut().enumerate() {
        *wk = trace(&matmul(&pauli(k)?, a)?)? * 0.5;
    }
    Ok(w)
}

pub fn from_pauli_coeffs(w: &[C64; 4]) -> ComplexTensor {
    pauli_combination(w)
}

/// Whether a channel is zero relative to the error's size.
pub fn is_impossible(channel: &ComplexTensor, error: &ComplexTensor) -> bool {
    channel.frobenius_norm() <= IMPOSSIBLE_THRESHOLD * error.frobenius_norm().max(1.0)
}

/// Single-qubit wires on a factor graph, optionally built with conjugated
/// factors for the lower half of a conjugate pair.
struct Circuit<'g> {
    g: &'g mut FactorGraph,
    wires: Vec<VariableId>,
    conj: bool,
}

impl<'g> Circuit<'g> {
    /// Wire 0 starts at `input`; the other wires are ancillas in `|0>`.
    fn new(g: &'g mut FactorGraph, n: usize, input: VariableId, conj: bool) -> Result<Self> {
        let mut wires = vec![input];
        for _ in 1..n {
            let a = g.add_variable(2)?;
            g.add_factor(ComplexTensor::one_hot(2, 0)?, &[a])?;
            wires.push(a);
        }
        Ok(Circuit { g, wires, conj })
    }

    fn gate(&mut self, q: usize, u: &ComplexTensor) -> Result<()> {
        let out = self.g.add_variable(2)?;
        let t = if self.conj { u.conj() } else { u.clone() };
        self.g.add_factor(t, &[out, self.wires[q]])?;
        self.wires[q] = out;
        Ok(())
    }

    fn cnot(&mut self, c: usize, t: usize) -> Result<()> {
        let c_out = self.g.add_variable(2)?;
        let link = self.g.add_variable(2)?;
        let t_out = self.g.add_variable(2)?;
        self.g
            .add_factor(equality_tensor(3, 2)?, &[self.wires[c], c_out, link])?;
        self.g
            .add_factor(mod_add_tensor(2)?, &[self.wires[t], link, t_out])?;
        self.wires[c] = c_out;
        self.wires[t] = t_out;
        Ok(())
    }
}

/// Closes the box around the whole graph and returns the exterior function
/// with its axes in the order given by `vars`.
fn exterior_in_order(g: &FactorGraph, vars: &[VariableId]) -> Result<ComplexTensor> {
    let e = g.exterior_function(&BoxRegion::all(g), None)?;
    let labels: Vec<usize> = e.axis_labels().map(|l| l.to_vec()).unwrap_or_default();
    let out: Vec<usize> = vars.iter().map(|v| v.0).collect();
    if labels.len() != out.len() {
        return Err(Error::Internal(
            "unexpected boundary in code circuit".into(),
        ));
    }
    einsum_single(&e, &labels, &out)
}

/// Upper-half circuit with wire 0's input and output and the given
/// syndrome wires left open. Returns the tensor over
/// `(syndrome..., out, in)`.
fn upper_channel_tensor(
    n: usize,
    build: impl FnOnce(&mut Circuit) -> Result<()>,
    syndrome_wires: &[usize],
) -> Result<ComplexTensor> {
    let mut g = FactorGraph::new();
    let input = g.add_variable(2)?;
    let mut c = Circuit::new(&mut g, n, input, false)?;
    build(&mut c)?;
    let wires = c.wires.clone();
    let mut order: Vec<VariableId> = syndrome_wires.iter().map(|&w| wires[w]).collect();
    order.push(wires[0]);
    order.push(input);
    exterior_in_order(&g, &order)
}

fn check_location(location: usize, n: usize) -> Result<()> {
    if location == 0 || location > n {
        return Err(Error::Argument(format!(
            "error location {location} not in 1..={n}"
        )));
    }
    Ok(())
}

fn rep2_channel(a: &ComplexTensor, wire: usize, y: usize) -> Result<ComplexTensor> {
    if y > 1 {
        return Err(Error::Argument(format!("syndrome bit {y} is not 0 or 1")));
    }
    let t = upper_channel_tensor(
        2,
        |c| {
            c.cnot(0, 1)?;
            c.gate(wire, a)?;
            c.cnot(0, 1)
        },
        &[1],
    )?;
    t.slice_axis(0, y)
}

/// Length-2 repetition code with the error on the data qubit, syndrome
/// fixed to `y`.
pub fn effective_channel_direct(a: &ComplexTensor, y: usize) -> Result<ComplexTensor> {
    rep2_channel(a, 0, y)
}

/// Length-2 repetition code with the error on the check qubit, syndrome
/// fixed to `y`.
pub fn effective_channel_check(a: &ComplexTensor, y: usize) -> Result<ComplexTensor> {
    rep2_channel(a, 1, y)
}

/// Effective channels indexed by syndrome tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct SyndromeTable {
    /// Each syndrome, bits in the module's documented order.
    pub syndromes: Vec<Vec<u8>>,
    pub channels: Vec<ComplexTensor>,
    /// Whether each channel is zero (impossible syndrome).
    pub impossible: Vec<bool>,
}

impl SyndromeTable {
    fn from_tensor(t: &ComplexTensor, bits: usize, error: &ComplexTensor) -> Result<Self> {
        let data = t.data();
        let mut syndromes = Vec::new();
        let mut channels = Vec::new();
        let mut impossible = Vec::new();
        for s in 0..(1usize << bits) {
            let ch = ComplexTensor::new(vec![2, 2], data[4 * s..4 * s + 4].to_vec())?;
            syndromes.push(
                (0..bits)
                    .map(|b| ((s >> (bits - 1 - b)) & 1) as u8)
                    .collect(),
            );
            impossible.push(is_impossible(&ch, error));
            channels.push(ch);
        }
        Ok(SyndromeTable {
            syndromes,
            channels,
            impossible,
        })
    }

    pub fn get(&self, syndrome: &[u8]) -> Option<&ComplexTensor> {
        self.syndromes
            .iter()
            .position(|s| s == syndrome)
            .map(|i| &self.channels[i])
    }

    /// Total probability weight `sum_s tr(C_s C_s^H) / 2`; 1 for unitary
    /// errors.
    pub fn total_weight(&self) -> f64 {
        self.channels
            .iter()
            .map(|c| c.data().iter().map(|z| z.norm_sqr()).sum::<f64>() / 2.0)
            .sum()
    }
}

fn rep3_build(c: &mut Circuit, a: &ComplexTensor, location: usize) -> Result<()> {
    c.cnot(0, 1)?;
    c.cnot(0, 2)?;
    c.gate(location - 1, a)?;
    c.cnot(0, 2)?;
    c.cnot(0, 1)
}

/// Effective channel of the length-3 repetition code for each syndrome
/// `(Y2, Y1)`.
pub fn rep3_syndrome_table(error: &ErrorSpec) -> Result<SyndromeTable> {
    check_location(error.location, 3)?;
    let t = upper_channel_tensor(3, |c| rep3_build(c, &error.matrix, error.location), &[2, 1])?;
    SyndromeTable::from_tensor(&t, 2, &error.matrix)
}

/// Syndrome wires of the Shor code in syndrome-bit order.
pub const SHOR_SYNDROME_WIRES: [usize; 8] = [2, 1, 5, 4, 8, 7, 6, 3];

fn shor_build(c: &mut Circuit, a: &ComplexTensor, location: usize) -> Result<()> {
    let h = hadamard();
    c.cnot(0, 3)?;
    c.cnot(0, 6)?;
    for q in [0, 3, 6] {
        c.gate(q, &h)?;
    }
    for q in [0, 3, 6] {
        c.cnot(q, q + 1)?;
        c.cnot(q, q + 2)?;
    }
    c.gate(location - 1, a)?;
    for q in [6, 3, 0] {
        c.cnot(q, q + 2)?;
        c.cnot(q, q + 1)?;
    }
    for q in [6, 3, 0] {
        c.gate(q, &h)?;
    }
    c.cnot(0, 6)?;
    c.cnot(0, 3)
}

/// Effective channel of the Shor code for every one of the 256 syndromes,
/// from one contraction with all syndrome wires left open.
pub fn shor_syndrome_table(error: &ErrorSpec) -> Result<SyndromeTable> {
    check_location(error.location, 9)?;
    let t = upper_channel_tensor(
        9,
        |c| shor_build(c, &error.matrix, error.location),
        &SHOR_SYNDROME_WIRES,
    )?;
    SyndromeTable::from_tensor(&t, 8, &error.matrix)
}

fn check_syndrome(bits: &[u8], n: usize) -> Result<()> {
    if bits.len() != n || bits.iter().any(|&b| b > 1) {
        return Err(Error::Argument(format!("syndrome must be {n} bits")));
    }
    Ok(())
}

/// Effective channel of the Shor code at one syndrome.
pub fn shor_effective_channel(error: &ErrorSpec, syndrome: &[u8]) -> Result<ComplexTensor> {
    check_syndrome(syndrome, 8)?;
    check_location(error.location, 9)?;
    let mut g = FactorGraph::new();
    let input = g.add_variable(2)?;
    let mut c = Circuit::new(&mut g, 9, input, false)?;
    shor_build(&mut c, &error.matrix, error.location)?;
    let wires = c.wires.clone();
    for (&w, &bit) in SHOR_SYNDROME_WIRES.iter().zip(syndrome) {
        g.add_factor(ComplexTensor::one_hot(2, bit as usize)?, &[wires[w]])?;
    }
    exterior_in_order(&g, &[wires[0], input])
}

/// The Shor code as a conjugate-pair graph: the circuit on the upper half,
/// its conjugate on the lower half, and each syndrome wire pair joined to an
/// outcome half edge by a degree-3 equality node. The data input and output
/// pairs are left open.
#[derive(Debug, Clone)]
pub struct ShorGraph {
    pub graph: FactorGraph,
    /// Upper and lower data input.
    pub input: (VariableId, VariableId),
    /// Upper and lower data output.
    pub output: (VariableId, VariableId),
    /// Syndrome outcome variables in syndrome-bit order.
    pub syndrome: Vec<VariableId>,
}

pub fn shor_graph(error: &ErrorSpec) -> Result<ShorGraph> {
    check_location(error.location, 9)?;
    let mut g = FactorGraph::new();
    let in_u = g.add_variable(2)?;
    let in_l = g.add_variable(2)?;
    let mut halves = Vec::new();
    for (input, conj) in [(in_u, false), (in_l, true)] {
        let mut c = Circuit::new(&mut g, 9, input, conj)?;
        shor_build(&mut c, &error.matrix, error.location)?;
        halves.push(c.wires.clone());
    }
    let mut syndrome = Vec::new();
    for &w in &SHOR_SYNDROME_WIRES {
        let y = g.add_variable(2)?;
        g.add_factor(equality_tensor(3, 2)?, &[halves[0][w], halves[1][w], y])?;
        syndrome.push(y);
    }
    Ok(ShorGraph {
        graph: g,
        input: (in_u, in_l),
        output: (halves[0][0], halves[1][0]),
        syndrome,
    })
}

impl ShorGraph {
    /// Unnormalized output state for input `rho` with the syndrome clamped.
    /// Its trace is the probability of the syndrome.
    pub fn output_state(&self, rho: &ComplexTensor, syndrome: &[u8]) -> Result<ComplexTensor> {
        check_syndrome(syndrome, 8)?;
        let mut g = self.graph.clone();
        g.add_factor(rho.clone(), &[self.input.0, self.input.1])?;
        for (&y, &bit) in self.syndrome.iter().zip(syndrome) {
            g.add_factor(ComplexTensor::one_hot(2, bit as usize)?, &[y])?;
        }
        exterior_in_order(&g, &[self.output.0, self.output.1])
    }
}

/// Outcome of a recovery attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    /// Pauli index `k` of the correction `sigma_k`.
    pub correction: usize,
    pub channel: ComplexTensor,
    /// Probability of the syndrome for the given input state.
    pub syndrome_probability: f64,
    /// `<psi| rho_out |psi>` after correction.
    pub fidelity: f64,
}

/// Picks the Pauli correction for a syndrome and checks it on the input
/// state `psi` by running the conjugate-pair graph.
pub fn shor_recover(error: &ErrorSpec, syndrome: &[u8], psi: &[C64]) -> Result<RecoveryReport> {
    if psi.len() != 2 {
        return Err(Error::Dimension(
            "input state must have two amplitudes".into(),
        ));
    }
    let channel = shor_effective_channel(error, syndrome)?;
    if is_impossible(&channel, &error.matrix) {
        return Err(Error::ZeroProbability(format!(
            "syndrome {syndrome:?} cannot occur for an error at location {}",
            error.location
        )));
    }
    let w = pauli_coeffs(&channel)?;
    let k = (0..4)
        .max_by(|&i, &j| w[i].norm().total_cmp(&w[j].norm()))
        .expect("four coefficients");
    let sk = pauli(k)?;
    let corrected = matmul(&sk, &channel)?;
    if !projective_equal(
        &corrected,
        &ComplexTensor::identity(2),
        Tolerance::abs(1e-9),
    )? {
        return Err(Error::Internal(format!(
            "effective channel at syndrome {syndrome:?} is not a multiple of a Pauli matrix"
        )));
    }

    let rho_in = ComplexTensor::outer(psi, psi);
    let out = shor_graph(error)?.output_state(&rho_in, syndrome)?;
    let p = trace(&out)?.re;
    if p <= 0.0 {
        return Err(Error::ZeroProbability(format!(
            "syndrome {syndrome:?} has probability {p:e}"
        )));
    }
    let fixed = matmul(&matmul(&sk, &out)?, &sk)?.scale(C64::new(1.0 / p, 0.0));
    let mut fid = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            fid += psi[i].conj() * fixed.get(&[i, j])? * psi[j];
        }
    }
    Ok(RecoveryReport {
        correction: k,
        channel,
        syndrome_probability: p,
        fidelity: fid.re,
    })
}

/// A 2x2 channel that is linear in the error coefficients `w`:
/// `sum_k (sum_j map[k][j] w_j) sigma_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicChannel {
    pub map: [[C64; 4]; 4],
}

impl SymbolicChannel {
    /// Probes a linear channel-valued function with `A = sigma_j`.
    pub fn probe(f: impl Fn(&ComplexTensor) -> Result<ComplexTensor>) -> Result<Self> {
        let mut map = [[C64::new(0.0, 0.0); 4]; 4];
        for j in 0..4 {
            let c = pauli_coeffs(&f(&pauli(j)?)?)?;
            for k in 0..4 {
                map[k][j] = c[k];
            }
        }
        Ok(SymbolicChannel { map })
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.map.iter().flatten().all(|z| z.norm() <= eps)
    }

    /// Numeric channel for coefficients `w`.
    pub fn evaluate(&self, w: &[C64; 4]) -> ComplexTensor {
        let mut c = [C64::new(0.0, 0.0); 4];
        for k in 0..4 {
            c[k] = (0..4).map(|j| self.map[k][j] * w[j]).sum();
        }
        from_pauli_coeffs(&c)
    }

    /// Renders e.g. `w1 σ0 + i w2 σ3`, rounding coefficients at `eps`.
    pub fn render(&self, eps: f64) -> String {
        let mut terms: Vec<String> = Vec::new();
        for k in 0..4 {
            let parts: Vec<(usize, C64)> = (0..4)
                .filter(|&j| self.map[k][j].norm() > eps)
                .map(|j| (j, self.map[k][j]))
                .collect();
            if parts.is_empty() {
                continue;
            }
            let inner: Vec<String> = parts
                .iter()
                .map(|&(j, c)| term(c, &format!("w{j}"), eps))
                .collect();
            let joined = join_signed(&inner);
            if parts.len() == 1 {
                terms.push(format!("{joined} σ{k}"));
            } else {
                terms.push(format!("({joined}) σ{k}"));
            }
        }
        if terms.is_empty() {
            return String::from("0");
        }
        join_signed(&terms)
    }
}

fn join_signed(parts: &[String]) -> String {
    let mut s = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            s.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            s.push_str(" - ");
            s.push_str(rest);
        } else {
            s.push_str(" + ");
            s.push_str(p);
        }
    }
    s
}

fn round_display(x: f64, eps: f64) -> f64 {
    if x.abs() <= eps {
        0.0
    } else {
        x
    }
}

fn term(c: C64, name: &str, eps: f64) -> String {
    let re = round_display(c.re, eps);
    let im = round_display(c.im, eps);
    let near = |x: f64, t: f64| (x - t).abs() <= eps;
    if im == 0.0 {
        if near(re, 1.0) {
            return String::from(name);
        }
        if near(re, -1.0) {
            return format!("-{name}");
        }
        return format!("{} {name}", fmt_num(re));
    }
    if re == 0.0 {
        if near(im, 1.0) {
            return format!("i {name}");
        }
        if near(im, -1.0) {
            return format!("-i {name}");
        }
        return format!("{}i {name}", fmt_num(im));
    }
    format!(
        "({}{}{}i) {name}",
        fmt_num(re),
        if im < 0.0 { "-" } else { "+" },
        fmt_num(im.abs())
    )
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    String::from(s)
}

/// Symbolic repetition-code table: `result[s][loc - 1]` for syndrome index
/// `s` (bits `(Y2, Y1)` read as a binary number).
pub fn rep3_symbolic_table() -> Result<Vec<Vec<SymbolicChannel>>> {
    let mut out = vec![Vec::new(); 4];
    for loc in 1..=3 {
        let tables: Vec<SyndromeTable> = (0..4)
            .map(|j| rep3_syndrome_table(&ErrorSpec::new(loc, pauli(j)?)?))
            .collect::<Result<_>>()?;
        for (s, row) in out.iter_mut().enumerate() {
            row.push(SymbolicChannel::probe(|a| {
                let j = (0..4)
                    .find(|&j| pauli(j).map(|p| &p == a).unwrap_or(false))
                    .expect("probe with Paulis");
                Ok(tables[j].channels[s].clone())
            })?);
        }
    }
    Ok(out)
}

/// Symbolic Shor-code table for one error location: one entry per
/// syndrome, zero for impossible ones.
pub fn shor_symbolic_table(location: usize) -> Result<Vec<(Vec<u8>, SymbolicChannel)>> {
    let tables: Vec<SyndromeTable> = (0..4)
        .map(|j| shor_syndrome_table(&ErrorSpec::new(location, pauli(j)?)?))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for s in 0..256 {
        let mut map = [[C64::new(0.0, 0.0); 4]; 4];
        for (j, t) in tables.iter().enumerate() {
            let c = pauli_coeffs(&t.channels[s])?;
            for k in 0..4 {
                map[k][j] = c[k];
            }
        }
        out.push((tables[0].syndromes[s].clone(), SymbolicChannel { map }));
    }
    Ok(out)
}
