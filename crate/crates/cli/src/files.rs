//! JSON file formats.
//!
//! Complex numbers are `[re, im]` pairs. Matrices are lists of rows.

use std::collections::{BTreeMap, HashMap};

use qfg_core::gates::gate_by_name;
use qfg_core::quantum::{
    partial_family, projection_family, InitialState, MeasurementFamily, QuantumTimeline, Step,
};
use qfg_core::{BoxRegion, ComplexTensor, FactorGraph, FactorId, Tolerance, VariableId, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

fn to_c64(z: &Complex) -> C64 {
    C64::new(z[0], z[1])
}

fn from_c64(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn matrix_to_tensor(m: &Matrix, what: &str) -> Result<ComplexTensor, CliError> {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    if rows == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(CliError::Schema(format!(
            "{what}: matrix rows must be nonempty and of equal length"
        )));
    }
    let data = m.iter().flatten().map(to_c64).collect();
    Ok(ComplexTensor::new(vec![rows, cols], data)?)
}

pub fn tensor_to_matrix(t: &ComplexTensor) -> Matrix {
    let cols = t.shape()[1];
    t.data()
        .chunks(cols)
        .map(|r| r.iter().map(|&z| from_c64(z)).collect())
        .collect()
}

/// Parses JSON with path-aware diagnostics.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse(format!(
            "{what}: line {} column {} at {path}: {inner}",
            inner.line(),
            inner.column()
        ))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub id: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorSpec {
    Table {
        vars: Vec<usize>,
        shape: Vec<usize>,
        data: Vec<Complex>,
    },
    Gate {
        gate: String,
        vars: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFileV1 {
    pub version: u32,
    pub variables: Vec<VariableSpec>,
    pub factors: Vec<FactorSpec>,
    #[serde(default)]
    pub boxes: BTreeMap<String, Vec<usize>>,
    /// Upper/lower variable pairs of a conjugate-pair graph.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mirror_pairs: Vec<[usize; 2]>,
}

/// A graph file resolved against the core library.
pub struct LoadedGraph {
    pub graph: FactorGraph,
    pub boxes: BTreeMap<String, BoxRegion>,
    /// File id of each graph variable, indexed by `VariableId`.
    pub file_ids: Vec<usize>,
    pub mirror_pairs: Vec<(VariableId, VariableId)>,
}

impl LoadedGraph {
    pub fn variable(&self, file_id: usize) -> Result<VariableId, CliError> {
        self.file_ids
            .iter()
            .position(|&i| i == file_id)
            .map(VariableId)
            .ok_or_else(|| CliError::Schema(format!("unknown variable id {file_id}")))
    }
}

impl GraphFileV1 {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let f: GraphFileV1 = parse_json(text, "graph file")?;
        if f.version != 1 {
            return Err(CliError::Schema(format!(
                "unsupported graph file version {}",
                f.version
            )));
        }
        Ok(f)
    }

    pub fn load(&self) -> Result<LoadedGraph, CliError> {
        let mut g = FactorGraph::new();
        let mut index = HashMap::new();
        let mut file_ids = Vec::new();
        for (k, v) in self.variables.iter().enumerate() {
            if index.insert(v.id, g.add_variable(v.size)?).is_some() {
                return Err(CliError::Schema(format!(
                    "variables[{k}]: duplicate id {}",
                    v.id
                )));
            }
            file_ids.push(v.id);
        }
        let resolve = |ids: &[usize], at: &str| -> Result<Vec<VariableId>, CliError> {
            ids.iter()
                .map(|i| {
                    index
                        .get(i)
                        .copied()
                        .ok_or_else(|| CliError::Schema(format!("{at}: unknown variable id {i}")))
                })
                .collect()
        };
        for (k, f) in self.factors.iter().enumerate() {
            let at = format!("factors[{k}]");
            let (tensor, vars) = match f {
                FactorSpec::Table { vars, shape, data } => {
                    let expected: usize = shape.iter().product();
                    if data.len() != expected {
                        return Err(CliError::Schema(format!(
                            "{at}.data: length {} does not match shape {shape:?} ({expected} entries)",
                            data.len()
                        )));
                    }
                    let t = ComplexTensor::new(shape.clone(), data.iter().map(to_c64).collect())
                        .map_err(|e| CliError::Schema(format!("{at}: {e}")))?;
                    (t, resolve(vars, &at)?)
                }
                FactorSpec::Gate { gate, vars } => {
                    let vs = resolve(vars, &at)?;
                    let sizes: Vec<usize> = vs
                        .iter()
                        .map(|&v| g.alphabet_size(v))
                        .collect::<Result<_, _>>()?;
                    let t = gate_by_name(gate, &sizes)
                        .map_err(|e| CliError::Schema(format!("{at}.gate: {e}")))?;
                    (t, vs)
                }
            };
            g.add_factor(tensor, &vars)
                .map_err(|e| CliError::Semantic(qfg_core::Error::Argument(format!("{at}: {e}"))))?;
        }
        let mut boxes = BTreeMap::new();
        for (name, ids) in &self.boxes {
            if let Some(&bad) = ids.iter().find(|&&i| i >= self.factors.len()) {
                return Err(CliError::Schema(format!(
                    "boxes.{name}: no factor with index {bad}"
                )));
            }
            boxes.insert(
                name.clone(),
                BoxRegion::new(ids.iter().map(|&i| FactorId(i))),
            );
        }
        let mirror_pairs = self
            .mirror_pairs
            .iter()
            .map(|[a, b]| {
                Ok((
                    resolve(&[*a], "mirror_pairs")?[0],
                    resolve(&[*b], "mirror_pairs")?[0],
                ))
            })
            .collect::<Result<_, CliError>>()?;
        Ok(LoadedGraph {
            graph: g,
            boxes,
            file_ids,
            mirror_pairs,
        })
    }

    /// Writes a graph with variable ids equal to their index.
    pub fn from_graph(
        g: &FactorGraph,
        mirror_pairs: &[(VariableId, VariableId)],
    ) -> Result<Self, CliError> {
        let variables = (0..g.variable_count())
            .map(|i| {
                Ok(VariableSpec {
                    id: i,
                    size: g.alphabet_size(VariableId(i))?,
                })
            })
            .collect::<Result<_, CliError>>()?;
        let factors = (0..g.factor_count())
            .map(|f| {
                let (t, vs) = g.factor(FactorId(f))?;
                Ok(FactorSpec::Table {
                    vars: vs.iter().map(|v| v.0).collect(),
                    shape: t.shape().to_vec(),
                    data: t.data().iter().map(|&z| from_c64(z)).collect(),
                })
            })
            .collect::<Result<_, CliError>>()?;
        let mut boxes = BTreeMap::new();
        boxes.insert("all".to_string(), (0..g.factor_count()).collect());
        Ok(GraphFileV1 {
            version: 1,
            variables,
            factors,
            boxes,
            mirror_pairs: mirror_pairs.iter().map(|(a, b)| [a.0, b.0]).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Probability of each basis state.
    Prior(Vec<f64>),
    Known(usize),
    Density(Matrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitarySpec {
    Gate { gate: String },
    Matrix(Matrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// Projection onto the columns of `basis`.
    Projection {
        basis: Matrix,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        observed: Option<usize>,
    },
    /// `I_idle (x) projection(basis)`.
    Partial {
        basis: Matrix,
        idle: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        observed: Option<usize>,
    },
    /// Explicit `A(y)` matrices.
    General {
        matrices: Vec<Matrix>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        observed: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StepSpec {
    Unitary(UnitarySpec),
    Measure(MeasureSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimelineFileV1 {
    pub version: u32,
    pub dimension: usize,
    pub initial: InitialSpec,
    pub steps: Vec<StepSpec>,
}

impl TimelineFileV1 {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let f: TimelineFileV1 = parse_json(text, "timeline file")?;
        if f.version != 1 {
            return Err(CliError::Schema(format!(
                "unsupported timeline file version {}",
                f.version
            )));
        }
        Ok(f)
    }

    /// Measurement families in step order, before any validation.
    pub fn families(&self, tol: Tolerance) -> Result<Vec<(usize, MeasurementFamily)>, CliError> {
        let mut out = Vec::new();
        for (k, s) in self.steps.iter().enumerate() {
            if let StepSpec::Measure(m) = s {
                out.push((k, measure_family(m, k, tol)?.0));
            }
        }
        Ok(out)
    }

    pub fn build(&self, tol: Tolerance) -> Result<QuantumTimeline, CliError> {
        let m = self.dimension;
        let initial = match &self.initial {
            InitialSpec::Prior(p) => InitialState::ClassicalPrior(p.clone()),
            InitialSpec::Known(x) => InitialState::KnownValue(*x),
            InitialSpec::Density(d) => {
                InitialState::GivenDensity(matrix_to_tensor(d, "initial.density")?)
            }
        };
        let mut steps = Vec::new();
        for (k, s) in self.steps.iter().enumerate() {
            steps.push(match s {
                StepSpec::Unitary(UnitarySpec::Gate { gate }) => Step::Unitary(
                    gate_by_name(gate, &[m, m])
                        .map_err(|e| CliError::Schema(format!("steps[{k}].unitary: {e}")))?,
                ),
                StepSpec::Unitary(UnitarySpec::Matrix(u)) => {
                    Step::Unitary(matrix_to_tensor(u, &format!("steps[{k}].unitary"))?)
                }
                StepSpec::Measure(ms) => {
                    let (family, observed) = measure_family(ms, k, tol)?;
                    Step::Measure { family, observed }
                }
            });
        }
        Ok(QuantumTimeline::with_tolerance(m, initial, steps, tol)?)
    }
}

fn measure_family(
    m: &MeasureSpec,
    k: usize,
    tol: Tolerance,
) -> Result<(MeasurementFamily, Option<usize>), CliError> {
    let at = format!("steps[{k}].measure");
    Ok(match m {
        MeasureSpec::Projection { basis, observed } => (
            projection_family(&matrix_to_tensor(basis, &at)?, tol)?,
            *observed,
        ),
        MeasureSpec::Partial {
            basis,
            idle,
            observed,
        } => (
            partial_family(&matrix_to_tensor(basis, &at)?, *idle, tol)?,
            *observed,
        ),
        MeasureSpec::General { matrices, observed } => {
            let ms = matrices
                .iter()
                .map(|a| matrix_to_tensor(a, &at))
                .collect::<Result<Vec<_>, _>>()?;
            (MeasurementFamily::new(ms)?, *observed)
        }
    })
}

/// A file that is either a graph or a timeline.
pub enum AnyFile {
    Graph(GraphFileV1),
    Timeline(TimelineFileV1),
}

impl AnyFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let v: serde_json::Value = parse_json(text, "input file")?;
        if v.get("steps").is_some() {
            Ok(AnyFile::Timeline(TimelineFileV1::parse(text)?))
        } else if v.get("variables").is_some() {
            Ok(AnyFile::Graph(GraphFileV1::parse(text)?))
        } else {
            Err(CliError::Schema(
                "input is neither a graph file (no \"variables\") nor a timeline file (no \"steps\")".into(),
            ))
        }
    }
}
