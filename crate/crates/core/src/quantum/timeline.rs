use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{collapse, evolve, DensityMatrix, InitialState, QuantumTimeline, Step};
use crate::error::{Error, Result};
use crate::gates::equality_tensor;
use crate::graph::{BoxRegion, FactorGraph, FactorId, VariableId};
use crate::tensor::{trace, ComplexTensor, Tolerance};
use crate::C64;

/// Outcome edges of one measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeVars {
    /// Outcome argument of the upper measurement factor.
    pub upper: VariableId,
    /// Outcome argument of the lower (conjugated) measurement factor.
    pub lower: VariableId,
    /// The outcome `Y` itself: a half edge unless observed.
    pub outcome: VariableId,
    pub observed: Option<usize>,
}

/// Variables and factors contributed by one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub upper_in: VariableId,
    pub lower_in: VariableId,
    pub upper_out: VariableId,
    pub lower_out: VariableId,
    pub outcome: Option<OutcomeVars>,
    pub factors: Vec<FactorId>,
}

/// Where everything lives in a compiled timeline graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    /// Classical initial variable `X0` for a prior.
    pub prior: Option<VariableId>,
    /// Upper and lower initial state variables.
    pub initial: (VariableId, VariableId),
    pub initial_factors: Vec<FactorId>,
    pub steps: Vec<StepRecord>,
    pub terminal: Option<FactorId>,
}

impl Registry {
    /// Upper/lower variable pairs related by the conjugate mirror.
    pub fn mirror_pairs(&self) -> Vec<(VariableId, VariableId)> {
        let mut pairs = vec![self.initial];
        for s in &self.steps {
            pairs.push((s.upper_out, s.lower_out));
            if let Some(o) = s.outcome {
                pairs.push((o.upper, o.lower));
            }
        }
        pairs
    }

    /// Outcome variables that are half edges, in measurement order.
    pub fn unobserved_outcomes(&self) -> Vec<VariableId> {
        self.steps
            .iter()
            .filter_map(|s| s.outcome)
            .filter(|o| o.observed.is_none())
            .map(|o| o.outcome)
            .collect()
    }

    /// State variables after the last step.
    pub fn final_state(&self) -> (VariableId, VariableId) {
        self.steps
            .last()
            .map(|s| (s.upper_out, s.lower_out))
            .unwrap_or(self.initial)
    }
}

/// A compiled timeline.
#[derive(Debug, Clone)]
pub struct QuantumGraph {
    pub graph: FactorGraph,
    pub registry: Registry,
}

impl QuantumGraph {
    /// Internal variables of the whole graph in creation order, which is
    /// chronological (left to right); `reverse` gives right to left.
    pub fn chronological_order(&self, reverse: bool) -> Result<Vec<VariableId>> {
        let (_, mut internal) = self.graph.classify(&BoxRegion::all(&self.graph))?;
        if reverse {
            internal.reverse();
        }
        Ok(internal)
    }
}

fn ones(n: usize) -> ComplexTensor {
    ComplexTensor::zeros(vec![n])
        .expect("nonzero size")
        .map(|_| C64::new(1.0, 0.0))
}

/// Compiles the first `upto` steps. `outcomes[j]` overrides the observation
/// of the `j`-th included measurement. When `marginalize` is set, unobserved
/// outcomes are summed inside the graph instead of left as half edges.
fn compile(
    t: &QuantumTimeline,
    upto: usize,
    outcomes: &[Option<usize>],
    marginalize: bool,
    terminal: bool,
) -> Result<QuantumGraph> {
    let m = t.dimension;
    let mut g = FactorGraph::new();
    let mut prior = None;
    let mut initial_factors = Vec::new();
    if let InitialState::ClassicalPrior(_) = t.initial {
        prior = Some(g.add_variable(m)?);
    }
    let u0 = g.add_variable(m)?;
    let l0 = g.add_variable(m)?;
    match &t.initial {
        InitialState::ClassicalPrior(p) => {
            let x0 = prior.expect("created above");
            let pt = ComplexTensor::from_real(vec![m], p)?;
            initial_factors.push(g.add_factor(pt, &[x0])?);
            initial_factors.push(g.add_factor(equality_tensor(3, m)?, &[x0, u0, l0])?);
        }
        InitialState::KnownValue(x) => {
            initial_factors.push(g.add_factor(ComplexTensor::one_hot(m, *x)?, &[u0])?);
            initial_factors.push(g.add_factor(ComplexTensor::one_hot(m, *x)?, &[l0])?);
        }
        InitialState::GivenDensity(rho) => {
            initial_factors.push(g.add_factor(rho.clone(), &[u0, l0])?);
        }
    }

    let mut steps = Vec::new();
    let (mut u, mut l) = (u0, l0);
    let mut meas = 0;
    for step in &t.steps[..upto] {
        let u_out = g.add_variable(m)?;
        let l_out = g.add_variable(m)?;
        let mut factors = Vec::new();
        let mut outcome = None;
        match step {
            Step::Unitary(mat) => {
                factors.push(g.add_factor(mat.clone(), &[u_out, u])?);
                factors.push(g.add_factor(mat.conj(), &[l_out, l])?);
            }
            Step::Measure { family, observed } => {
                let ny = family.outcome_count();
                let observed = outcomes.get(meas).copied().unwrap_or(*observed);
                meas += 1;
                let a = family.as_factor();
                let yu = g.add_variable(ny)?;
                let yl = g.add_variable(ny)?;
                let y = g.add_variable(ny)?;
                factors.push(g.add_factor(a.clone(), &[u_out, u, yu])?);
                factors.push(g.add_factor(a.conj(), &[l_out, l, yl])?);
                factors.push(g.add_factor(equality_tensor(3, ny)?, &[yu, yl, y])?);
                match observed {
                    Some(v) => factors.push(g.add_factor(ComplexTensor::one_hot(ny, v)?, &[y])?),
                    None if marginalize => factors.push(g.add_factor(ones(ny), &[y])?),
                    None => {}
                }
                outcome = Some(OutcomeVars {
                    upper: yu,
                    lower: yl,
                    outcome: y,
                    observed,
                });
            }
        }
        steps.push(StepRecord {
            upper_in: u,
            lower_in: l,
            upper_out: u_out,
            lower_out: l_out,
            outcome,
            factors,
        });
        u = u_out;
        l = l_out;
    }
    let terminal = if terminal {
        Some(g.add_factor(equality_tensor(2, m)?, &[u, l])?)
    } else {
        None
    };
    Ok(QuantumGraph {
        graph: g,
        registry: Registry {
            prior,
            initial: (u0, l0),
            initial_factors,
            steps,
            terminal,
        },
    })
}

/// Compiles the whole timeline. Observed outcomes are clamped by one-hot
/// factors; unobserved ones are half edges.
pub fn build_graph(t: &QuantumTimeline) -> Result<QuantumGraph> {
    compile(t, t.steps.len(), &[], false, true)
}

/// Probability table over a timeline's unobserved outcomes, conditioned on
/// the observed ones.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    /// Step index of each table axis.
    pub outcome_steps: Vec<usize>,
    pub shape: Vec<usize>,
    /// Row-major probabilities.
    pub probabilities: Vec<f64>,
    /// Probability of the observed outcomes (1 if none were observed).
    pub evidence: f64,
    /// Largest imaginary part seen before truncation, relative to the
    /// evidence.
    pub max_imaginary: f64,
}

impl JointTable {
    pub fn get(&self, index: &[usize]) -> Result<f64> {
        if index.len() != self.shape.len() {
            return Err(Error::Argument("index rank does not match table".into()));
        }
        let mut flat = 0;
        for (&i, &s) in index.iter().zip(&self.shape) {
            if i >= s {
                return Err(Error::Argument(format!("outcome {i} out of range")));
            }
            flat = flat * s + i;
        }
        Ok(self.probabilities[flat])
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Marginal over the listed leading axes (`keep` leading axes are
    /// retained, the rest summed).
    pub fn leading_marginal(&self, keep: usize) -> Vec<f64> {
        let inner: usize = self.shape[keep.min(self.shape.len())..].iter().product();
        self.probabilities
            .chunks(inner.max(1))
            .map(|c| c.iter().sum())
            .collect()
    }
}

/// Converts an unnormalized outcome tensor into probabilities, enforcing the
/// imaginary-residue and sign policies.
fn to_table(e: &ComplexTensor, tol: Tolerance) -> Result<(Vec<f64>, f64, f64)> {
    let total: C64 = e.data().iter().sum();
    let scale = e.max_abs().max(total.norm());
    let bound = tol.bound(scale);
    let mut max_im: f64 = total.im.abs();
    for z in e.data() {
        max_im = max_im.max(z.im.abs());
        if z.re < -bound {
            return Err(Error::Internal(format!("negative probability {}", z.re)));
        }
    }
    if max_im > bound {
        return Err(Error::Internal(format!(
            "outcome marginal has imaginary residue {max_im:e}"
        )));
    }
    let evidence = total.re;
    if evidence <= tol.abs_eps {
        return Err(Error::ZeroProbability(format!(
            "observed outcomes have probability {evidence:e}"
        )));
    }
    let probs = e.data().iter().map(|z| z.re.max(0.0) / evidence).collect();
    Ok((probs, evidence, max_im / evidence))
}

fn table_from_graph(
    t: &QuantumTimeline,
    qg: &QuantumGraph,
    order: Option<&[VariableId]>,
) -> Result<JointTable> {
    let e = qg
        .graph
        .exterior_function(&BoxRegion::all(&qg.graph), order)?;
    let (probabilities, evidence, max_imaginary) = to_table(&e, t.tol)?;
    let mut outcome_steps = Vec::new();
    let mut shape = Vec::new();
    for (k, s) in qg.registry.steps.iter().enumerate() {
        if let Some(o) = s.outcome {
            if o.observed.is_none() {
                outcome_steps.push(k);
                shape.push(qg.graph.alphabet_size(o.outcome)?);
            }
        }
    }
    Ok(JointTable {
        outcome_steps,
        shape,
        probabilities,
        evidence,
        max_imaginary,
    })
}

/// Joint distribution of the unobserved outcomes given the observed ones.
pub fn joint_distribution(t: &QuantumTimeline) -> Result<JointTable> {
    table_from_graph(t, &build_graph(t)?, None)
}

/// [`joint_distribution`] under a caller-supplied elimination order (see
/// [`QuantumGraph::chronological_order`]).
pub fn joint_distribution_with_order(
    t: &QuantumTimeline,
    order: &[VariableId],
) -> Result<JointTable> {
    table_from_graph(t, &build_graph(t)?, Some(order))
}

fn nth_measurement_step(t: &QuantumTimeline, k: usize) -> Result<usize> {
    let ms = t.measurement_steps();
    if k == 0 || k > ms.len() + 1 {
        return Err(Error::Argument(format!(
            "measurement index {k} not in 1..={}",
            ms.len() + 1
        )));
    }
    Ok(ms.get(k - 1).copied().unwrap_or(t.steps.len()))
}

fn prefix_outcomes(t: &QuantumTimeline, prefix: &[usize]) -> Result<Vec<Option<usize>>> {
    let ms = t.measurement_steps();
    if prefix.len() > ms.len() {
        return Err(Error::Argument(
            "prefix longer than the number of measurements".into(),
        ));
    }
    prefix
        .iter()
        .zip(&ms)
        .map(|(&y, &s)| match &t.steps[s] {
            Step::Measure { family, observed } => {
                if y >= family.outcome_count() {
                    return Err(Error::Argument(format!(
                        "outcome {y} out of range at step {s}"
                    )));
                }
                if let Some(o) = observed {
                    if *o != y {
                        return Err(Error::Argument(format!(
                            "prefix outcome {y} contradicts observed outcome {o} at step {s}"
                        )));
                    }
                }
                Ok(Some(y))
            }
            Step::Unitary(_) => unreachable!("measurement index"),
        })
        .collect()
}

/// State just before the `k`-th measurement (1-based; `k = n + 1` is the
/// final state) given the outcomes of the first `k - 1` measurements.
///
/// Returns the normalized density matrix and the probability of the prefix,
/// which is the trace of the unnormalized state.
pub fn density_matrix_before(
    t: &QuantumTimeline,
    k: usize,
    prefix: &[usize],
) -> Result<(DensityMatrix, f64)> {
    let s = nth_measurement_step(t, k)?;
    if prefix.len() != k - 1 {
        return Err(Error::Argument(format!(
            "expected {} prefix outcomes, got {}",
            k - 1,
            prefix.len()
        )));
    }
    let outcomes = prefix_outcomes(t, prefix)?;
    past_state(t, s, &outcomes)
}

/// Contracts the first `upto` steps with the chains left open at the end.
fn past_state(
    t: &QuantumTimeline,
    upto: usize,
    outcomes: &[Option<usize>],
) -> Result<(DensityMatrix, f64)> {
    let qg = compile(t, upto, outcomes, true, false)?;
    let e = qg
        .graph
        .exterior_function(&BoxRegion::all(&qg.graph), None)?;
    // Boundary is (upper, lower) since the upper variable is created first.
    let m = t.dimension;
    let unnorm = e.reshape(vec![m, m])?;
    let p = trace(&unnorm)?;
    if p.im.abs() > t.tol.bound(p.norm()) {
        return Err(Error::Internal(format!("state trace {p} is not real")));
    }
    if p.re <= t.tol.abs_eps {
        return Err(Error::ZeroProbability(format!(
            "prefix has probability {:e}",
            p.re
        )));
    }
    let rho = unnorm.scale(C64::new(1.0 / p.re, 0.0));
    let rho = DensityMatrix::new(rho, Tolerance::new(t.tol.abs_eps.max(1e-9), t.tol.rel_eps)?)
        .map_err(|e| Error::Internal(format!("contracted state is not a density matrix: {e}")))?;
    Ok((rho, p.re))
}

/// Distribution of the next measurement's outcome given the outcomes of the
/// earlier ones. Later steps are not compiled: they cannot influence it.
pub fn conditional_next(t: &QuantumTimeline, prefix: &[usize]) -> Result<Vec<f64>> {
    let k = prefix.len() + 1;
    let ms = t.measurement_steps();
    if k > ms.len() {
        return Err(Error::Argument(format!(
            "no measurement number {k} in a timeline with {}",
            ms.len()
        )));
    }
    let mut outcomes = prefix_outcomes(t, prefix)?;
    outcomes.push(None);
    let qg = compile(t, ms[k - 1] + 1, &outcomes, false, true)?;
    Ok(table_from_graph(t, &qg, None)?.probabilities)
}

/// `tr(rho O)` with `rho` the state at the end of the timeline (observed
/// outcomes conditioned on, unobserved ones averaged over). This is the
/// expected value of `g(Y)` for a subsequent measurement in basis `B` when
/// `O = B diag(g) B^H`.
pub fn observable_expectation(t: &QuantumTimeline, o: &ComplexTensor) -> Result<f64> {
    let (rho, _) = past_state(t, t.steps.len(), &[])?;
    rho.expectation(o, t.tol)
}

/// Sequential evolve/collapse replay along the timeline with the given
/// outcome for every measurement. Returns the probability of the whole
/// outcome sequence and the final normalized state.
pub fn replay(t: &QuantumTimeline, outcomes: &[usize]) -> Result<(f64, DensityMatrix)> {
    let ms = t.measurement_steps();
    if outcomes.len() != ms.len() {
        return Err(Error::Argument(format!(
            "expected {} outcomes, got {}",
            ms.len(),
            outcomes.len()
        )));
    }
    let mut rho = t.initial_density();
    let mut prob = 1.0;
    let mut j = 0;
    for step in &t.steps {
        match step {
            Step::Unitary(u) => rho = evolve(&rho, u, t.tol)?,
            Step::Measure { family, .. } => {
                let (p, next) = collapse(&rho, family, outcomes[j], t.tol)?;
                prob *= p;
                rho = next;
                j += 1;
            }
        }
    }
    Ok((prob, rho))
}

#[cfg(test)]
mod tests {
    use super::super::{projection_family, MeasurementFamily};
    use super::*;
    use crate::gates::hadamard;
    use crate::tensor::{column, conj_transpose, matmul};
    use crate::{c64, random};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ideal(m: usize) -> Step {
        Step::Measure {
            family: projection_family(&ComplexTensor::identity(m), Tolerance::default()).unwrap(),
            observed: None,
        }
    }

    #[test]
    fn no_measurement_partition_sum_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = QuantumTimeline::new(
            3,
            InitialState::KnownValue(2),
            vec![Step::Unitary(random::unitary(&mut rng, 3))],
        )
        .unwrap();
        let z = build_graph(&t).unwrap().graph.partition_sum(None).unwrap();
        assert!((z - c64(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn repeated_ideal_measurement() {
        let t = QuantumTimeline::new(
            2,
            InitialState::ClassicalPrior(vec![0.5, 0.5]),
            vec![
                Step::Unitary(ComplexTensor::identity(2)),
                ideal(2),
                Step::Unitary(ComplexTensor::identity(2)),
                ideal(2),
            ],
        )
        .unwrap();
        let j = joint_distribution(&t).unwrap();
        assert_eq!(j.shape, vec![2, 2]);
        assert_eq!(j.outcome_steps, vec![1, 3]);
        let expect = [0.5, 0.0, 0.0, 0.5];
        for (a, b) in j.probabilities.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn born_rule_single_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random::unitary(&mut rng, 3);
        let b = random::unitary(&mut rng, 3);
        let tol = Tolerance::default();
        let t = QuantumTimeline::new(
            3,
            InitialState::KnownValue(1),
            vec![
                Step::Unitary(u.clone()),
                Step::Measure {
                    family: projection_family(&b, tol).unwrap(),
                    observed: None,
                },
            ],
        )
        .unwrap();
        let j = joint_distribution(&t).unwrap();
        let ux = column(&u, 1).unwrap();
        for y in 0..3 {
            let by = column(&b, y).unwrap();
            let amp: C64 = by.iter().zip(&ux).map(|(b, u)| b.conj() * u).sum();
            assert!((j.probabilities[y] - amp.norm_sqr()).abs() < 1e-12);
        }
        let (rho, p) = density_matrix_before(&t, 1, &[]).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!(rho.matrix().max_abs_diff(&ComplexTensor::outer(&ux, &ux)) < 1e-12);
    }

    #[test]
    fn prior_gives_mixture() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random::unitary(&mut rng, 2);
        let p = vec![0.3, 0.7];
        let t = QuantumTimeline::new(
            2,
            InitialState::ClassicalPrior(p.clone()),
            vec![Step::Unitary(u.clone()), ideal(2)],
        )
        .unwrap();
        let (rho, _) = density_matrix_before(&t, 1, &[]).unwrap();
        let mut expect = ComplexTensor::zeros(vec![2, 2]).unwrap();
        for x in 0..2 {
            let c = column(&u, x).unwrap();
            expect = expect
                .add(&ComplexTensor::outer(&c, &c).scale(c64(p[x], 0.0)))
                .unwrap();
        }
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn conditional_matches_replay() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let tol = Tolerance::default();
        let t = QuantumTimeline::new(
            2,
            InitialState::GivenDensity(random::density_matrix(&mut rng, 2)),
            vec![
                Step::Measure {
                    family: projection_family(&random::unitary(&mut rng, 2), tol).unwrap(),
                    observed: None,
                },
                Step::Unitary(random::unitary(&mut rng, 2)),
                Step::Measure {
                    family: projection_family(&random::unitary(&mut rng, 2), tol).unwrap(),
                    observed: None,
                },
            ],
        )
        .unwrap();
        let j = joint_distribution(&t).unwrap();
        for y1 in 0..2 {
            let c = conditional_next(&t, &[y1]).unwrap();
            let py1 = j.probabilities[2 * y1] + j.probabilities[2 * y1 + 1];
            for y2 in 0..2 {
                assert!((c[y2] - j.probabilities[2 * y1 + y2] / py1).abs() < 1e-10);
                let (p, _) = replay(&t, &[y1, y2]).unwrap();
                assert!((p - j.probabilities[2 * y1 + y2]).abs() < 1e-10);
            }
        }
        assert!(conditional_next(&t, &[0, 0]).is_err());
    }

    #[test]
    fn zero_probability_prefix() {
        let t =
            QuantumTimeline::new(2, InitialState::KnownValue(0), vec![ideal(2), ideal(2)]).unwrap();
        assert!(matches!(
            conditional_next(&t, &[1]),
            Err(Error::ZeroProbability(_))
        ));
        assert!(matches!(
            density_matrix_before(&t, 2, &[1]),
            Err(Error::ZeroProbability(_))
        ));
    }

    #[test]
    fn trivial_family_is_deterministic() {
        let fam = MeasurementFamily::new(vec![ComplexTensor::identity(2)]).unwrap();
        let t = QuantumTimeline::new(
            2,
            InitialState::KnownValue(1),
            vec![Step::Measure {
                family: fam,
                observed: None,
            }],
        )
        .unwrap();
        assert_eq!(conditional_next(&t, &[]).unwrap().len(), 1);
        assert!((conditional_next(&t, &[]).unwrap()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn observed_outcomes_condition_the_table() {
        let tol = Tolerance::default();
        let t = QuantumTimeline::new(
            2,
            InitialState::KnownValue(0),
            vec![
                Step::Unitary(hadamard()),
                Step::Measure {
                    family: projection_family(&ComplexTensor::identity(2), tol).unwrap(),
                    observed: Some(1),
                },
                Step::Unitary(hadamard()),
                ideal(2),
            ],
        )
        .unwrap();
        let j = joint_distribution(&t).unwrap();
        assert!((j.evidence - 0.5).abs() < 1e-12);
        assert_eq!(j.outcome_steps, vec![3]);
        assert!((j.probabilities[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn expectation_matches_outcome_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let tol = Tolerance::default();
        let u = random::unitary(&mut rng, 3);
        let b = random::unitary(&mut rng, 3);
        let g = [0.5, -1.0, 2.0];
        let base =
            QuantumTimeline::new(3, InitialState::KnownValue(0), vec![Step::Unitary(u)]).unwrap();
        let obs = matmul(
            &matmul(&b, &ComplexTensor::diag_real(&g)).unwrap(),
            &conj_transpose(&b).unwrap(),
        )
        .unwrap();
        let e = observable_expectation(&base, &obs).unwrap();
        let with = base
            .push(Step::Measure {
                family: projection_family(&b, tol).unwrap(),
                observed: None,
            })
            .unwrap();
        let j = joint_distribution(&with).unwrap();
        let avg: f64 = j.probabilities.iter().zip(g).map(|(p, g)| p * g).sum();
        assert!((e - avg).abs() < 1e-10);
        assert!(
            (observable_expectation(&base, &ComplexTensor::identity(3)).unwrap() - 1.0).abs()
                < 1e-12
        );
    }

    #[test]
    fn schroedinger_and_heisenberg_orders_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let tol = Tolerance::default();
        let t = QuantumTimeline::new(
            2,
            InitialState::KnownValue(0),
            vec![
                Step::Unitary(random::unitary(&mut rng, 2)),
                Step::Measure {
                    family: projection_family(&random::unitary(&mut rng, 2), tol).unwrap(),
                    observed: None,
                },
                Step::Unitary(random::unitary(&mut rng, 2)),
                Step::Measure {
                    family: projection_family(&random::unitary(&mut rng, 2), tol).unwrap(),
                    observed: None,
                },
            ],
        )
        .unwrap();
        let qg = build_graph(&t).unwrap();
        let fwd =
            joint_distribution_with_order(&t, &qg.chronological_order(false).unwrap()).unwrap();
        let bwd =
            joint_distribution_with_order(&t, &qg.chronological_order(true).unwrap()).unwrap();
        for (a, b) in fwd.probabilities.iter().zip(&bwd.probabilities) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
