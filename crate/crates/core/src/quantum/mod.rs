//! Quantum timelines compiled into conjugate-pair factor graphs.
//!
//! A timeline starts from an initial state on an `M`-ary system and applies
//! unitaries and measurements in order. The compiled graph has an upper
//! chain carrying the matrices themselves and a lower chain carrying their
//! entry-wise conjugates with the same argument order. Every measurement
//! contributes an outcome edge `Y` joined to both chains by a degree-3
//! equality node, and the chains are tied together at the end by a
//! degree-2 equality node. Summing the graph over everything but the
//! unobserved outcomes gives their joint distribution.

mod channel;
mod timeline;

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::{
    column, conj_transpose, is_hermitian, is_psd, is_unitary, kron, matmul, trace, ComplexTensor,
    Tolerance,
};
use crate::C64;

pub use channel::{
    apply_classical_channel, collapse, evolve, family_superoperator,
    interaction_measurement_equivalence, interaction_measurement_equivalence_with,
    interaction_measurement_graphs, interaction_superoperator, interaction_to_kraus, kraus_apply,
    partial_trace, Subsystem,
};
pub use timeline::{
    build_graph, conditional_next, density_matrix_before, joint_distribution,
    joint_distribution_with_order, observable_expectation, replay, JointTable, OutcomeVars,
    QuantumGraph, Registry, StepRecord,
};

/// How the system is prepared.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// The system starts in basis state `x` with probability `p[x]`.
    ClassicalPrior(Vec<f64>),
    /// The system starts in basis state `x0`.
    KnownValue(usize),
    /// The system starts in the given density matrix.
    GivenDensity(ComplexTensor),
}

/// Outcome-indexed square matrices `A(y)`, outcome `y` being the index
/// into `matrices`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementFamily {
    matrices: Vec<ComplexTensor>,
}

/// Result of checking `sum_y A(y)^H A(y) = I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementReport {
    pub ok: bool,
    /// `max |sum_y A(y)^H A(y) - I|`.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Unitary(ComplexTensor),
    Measure {
        family: MeasurementFamily,
        observed: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumTimeline {
    dimension: usize,
    initial: InitialState,
    steps: Vec<Step>,
    tol: Tolerance,
}

/// Hermitian, positive semidefinite, trace-one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexTensor,
}

impl MeasurementFamily {
    /// Family from explicit matrices. Only shapes are checked here; use
    /// [`validate_measurement`] for completeness.
    pub fn new(matrices: Vec<ComplexTensor>) -> Result<Self> {
        let first = matrices.first().ok_or_else(|| {
            Error::Argument("measurement family needs at least one outcome".into())
        })?;
        let m = first.square_dim()?;
        for (y, a) in matrices.iter().enumerate() {
            if a.square_dim()? != m {
                return Err(Error::Dimension(format!(
                    "outcome {y} matrix is {:?}, expected {m}x{m}",
                    a.shape()
                )));
            }
        }
        Ok(MeasurementFamily { matrices })
    }

    pub fn dimension(&self) -> usize {
        self.matrices[0].shape()[0]
    }

    pub fn outcome_count(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[ComplexTensor] {
        &self.matrices
    }

    pub fn matrix(&self, y: usize) -> Result<&ComplexTensor> {
        self.matrices
            .get(y)
            .ok_or_else(|| Error::Argument(format!("outcome {y} out of range")))
    }

    /// The family as one factor `A(x_out, x_in, y)`.
    pub fn as_factor(&self) -> ComplexTensor {
        let m = self.dimension();
        let ny = self.outcome_count();
        let mut data = alloc::vec![C64::new(0.0, 0.0); m * m * ny];
        for (y, a) in self.matrices.iter().enumerate() {
            for (i, &z) in a.data().iter().enumerate() {
                data[i * ny + y] = z;
            }
        }
        ComplexTensor::new(alloc::vec![m, m, ny], data).expect("consistent shape")
    }
}

/// Projectors onto the columns of a unitary `B`: `A(y) = B(., y) B(., y)^H`.
pub fn projection_family(b: &ComplexTensor, tol: Tolerance) -> Result<MeasurementFamily> {
    let m = b.square_dim()?;
    if !is_unitary(b, tol)? {
        return Err(Error::Domain(
            "projection_family needs a unitary basis".into(),
        ));
    }
    let mats = (0..m)
        .map(|y| {
            let c = column(b, y)?;
            Ok(ComplexTensor::outer(&c, &c))
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementFamily::new(mats)
}

/// Measures the second factor of an `n * m` system in the basis `B`
/// (`m x m`), leaving the first factor alone: `A(y) = I_n (x) B(., y) B(., y)^H`.
pub fn partial_family(
    b: &ComplexTensor,
    idle_dim: usize,
    tol: Tolerance,
) -> Result<MeasurementFamily> {
    if idle_dim == 0 {
        return Err(Error::Argument("idle dimension must be at least 1".into()));
    }
    let inner = projection_family(b, tol)?;
    let id = ComplexTensor::identity(idle_dim);
    let mats = inner
        .matrices
        .iter()
        .map(|p| kron(&id, p))
        .collect::<Result<Vec<_>>>()?;
    MeasurementFamily::new(mats)
}

/// Checks the completeness relation `sum_y A(y)^H A(y) = I`.
pub fn validate_measurement(fam: &MeasurementFamily, tol: Tolerance) -> MeasurementReport {
    let m = fam.dimension();
    let mut sum = ComplexTensor::zeros(alloc::vec![m, m]).expect("nonzero size");
    for a in &fam.matrices {
        let aha = matmul(&conj_transpose(a).expect("square"), a).expect("square");
        sum = sum.add(&aha).expect("same shape");
    }
    let dev = sum.max_abs_diff(&ComplexTensor::identity(m));
    MeasurementReport {
        ok: dev <= tol.bound(1.0),
        max_deviation: dev,
    }
}

fn require_valid(fam: &MeasurementFamily, tol: Tolerance) -> Result<()> {
    let r = validate_measurement(fam, tol);
    if !r.ok {
        return Err(Error::Domain(format!(
            "measurement family is not complete (max deviation {:e})",
            r.max_deviation
        )));
    }
    Ok(())
}

impl QuantumTimeline {
    pub fn new(dimension: usize, initial: InitialState, steps: Vec<Step>) -> Result<Self> {
        Self::with_tolerance(dimension, initial, steps, Tolerance::default())
    }

    /// Validates every step against `tol`, which is also used by all later
    /// queries on this timeline.
    pub fn with_tolerance(
        dimension: usize,
        initial: InitialState,
        steps: Vec<Step>,
        tol: Tolerance,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Argument("dimension must be at least 1".into()));
        }
        match &initial {
            InitialState::ClassicalPrior(p) => check_prior(p, dimension, tol)?,
            InitialState::KnownValue(x) => {
                if *x >= dimension {
                    return Err(Error::Argument(format!("initial value {x} out of range")));
                }
            }
            InitialState::GivenDensity(rho) => {
                if rho.square_dim()? != dimension {
                    return Err(Error::Dimension(
                        "initial density matrix has the wrong size".into(),
                    ));
                }
                DensityMatrix::new(rho.clone(), tol)?;
            }
        }
        for (k, step) in steps.iter().enumerate() {
            match step {
                Step::Unitary(u) => {
                    if u.square_dim()? != dimension {
                        return Err(Error::Dimension(format!(
                            "step {k}: unitary has the wrong size"
                        )));
                    }
                    if !is_unitary(u, tol)? {
                        return Err(Error::Domain(format!("step {k}: matrix is not unitary")));
                    }
                }
                Step::Measure { family, observed } => {
                    if family.dimension() != dimension {
                        return Err(Error::Dimension(format!(
                            "step {k}: family has the wrong size"
                        )));
                    }
                    require_valid(family, tol)?;
                    if let Some(y) = observed {
                        if *y >= family.outcome_count() {
                            return Err(Error::Argument(format!(
                                "step {k}: observed outcome {y} out of range"
                            )));
                        }
                    }
                }
            }
        }
        Ok(QuantumTimeline {
            dimension,
            initial,
            steps,
            tol,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn initial(&self) -> &InitialState {
        &self.initial
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    /// Step indices of the measurements, in order.
    pub fn measurement_steps(&self) -> Vec<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Step::Measure { .. }))
            .map(|(i, _)| i)
            .collect()
    }

    /// Copy with one more step appended.
    pub fn push(&self, step: Step) -> Result<Self> {
        let mut steps = self.steps.clone();
        steps.push(step);
        Self::with_tolerance(self.dimension, self.initial.clone(), steps, self.tol)
    }

    /// The initial state as a density matrix.
    pub fn initial_density(&self) -> DensityMatrix {
        let m = self.dimension;
        let matrix = match &self.initial {
            InitialState::ClassicalPrior(p) => ComplexTensor::diag_real(p),
            InitialState::KnownValue(x) => {
                let mut d = alloc::vec![0.0; m];
                d[*x] = 1.0;
                ComplexTensor::diag_real(&d)
            }
            InitialState::GivenDensity(rho) => rho.clone(),
        };
        DensityMatrix { matrix }
    }
}

fn check_prior(p: &[f64], dimension: usize, tol: Tolerance) -> Result<()> {
    if p.len() != dimension {
        return Err(Error::Dimension(format!(
            "prior has {} entries, expected {dimension}",
            p.len()
        )));
    }
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::Domain(
            "prior entries must be finite and nonnegative".into(),
        ));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > tol.bound(1.0) {
        return Err(Error::Domain(format!("prior sums to {s}, not 1")));
    }
    Ok(())
}

impl DensityMatrix {
    /// Validates Hermitian, PSD and unit trace within `tol`.
    pub fn new(matrix: ComplexTensor, tol: Tolerance) -> Result<Self> {
        matrix.square_dim()?;
        if !is_hermitian(&matrix, tol)? {
            return Err(Error::Domain("density matrix is not Hermitian".into()));
        }
        if !is_psd(&matrix, tol)? {
            return Err(Error::Domain(
                "density matrix is not positive semidefinite".into(),
            ));
        }
        let tr = trace(&matrix)?;
        if (tr - C64::new(1.0, 0.0)).norm() > tol.bound(1.0) {
            return Err(Error::Domain(format!("density matrix has trace {tr}")));
        }
        Ok(DensityMatrix { matrix })
    }

    /// `psi psi^H` for a unit vector `psi`.
    pub fn pure(psi: &[C64], tol: Tolerance) -> Result<Self> {
        Self::new(ComplexTensor::outer(psi, psi), tol)
    }

    pub fn matrix(&self) -> &ComplexTensor {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexTensor {
        self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.shape()[0]
    }

    /// `tr(rho O)` for a Hermitian observable `O`.
    pub fn expectation(&self, o: &ComplexTensor, tol: Tolerance) -> Result<f64> {
        if !is_hermitian(o, tol)? {
            return Err(Error::Domain("observable is not Hermitian".into()));
        }
        Ok(trace(&matmul(&self.matrix, o)?)?.re)
    }
}

/// `true` iff closing the box around a measurement whose outcome is summed
/// out, together with the terminal equality node, leaves an identity
/// matrix: the measurement is invisible to an observer who ignores it.
pub fn dont_mind_future_check(fam: &MeasurementFamily, tol: Tolerance) -> Result<bool> {
    use crate::gates::equality_tensor;
    use crate::graph::{BoxRegion, FactorGraph};
    let m = fam.dimension();
    let ny = fam.outcome_count();
    let a = fam.as_factor();
    let mut g = FactorGraph::new();
    let x_in = g.add_variable(m)?;
    let x_in_l = g.add_variable(m)?;
    let x_out = g.add_variable(m)?;
    let x_out_l = g.add_variable(m)?;
    let yu = g.add_variable(ny)?;
    let yl = g.add_variable(ny)?;
    let y = g.add_variable(ny)?;
    g.add_factor(a.clone(), &[x_out, x_in, yu])?;
    g.add_factor(a.conj(), &[x_out_l, x_in_l, yl])?;
    g.add_factor(equality_tensor(3, ny)?, &[yu, yl, y])?;
    g.add_factor(
        ComplexTensor::zeros(alloc::vec![ny])?.map(|_| C64::new(1.0, 0.0)),
        &[y],
    )?;
    g.add_factor(equality_tensor(2, m)?, &[x_out, x_out_l])?;
    let e = g.exterior_function(&BoxRegion::all(&g), None)?;
    let e = e.reshape(alloc::vec![m, m])?;
    Ok(e.max_abs_diff(&ComplexTensor::identity(m)) <= tol.bound(1.0))
}
