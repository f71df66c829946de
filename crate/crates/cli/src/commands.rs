//! Command implementations. Each returns the text destined for stdout.

use qfg_core::montecarlo::{
    anneal_ladder_with, augment_with_pairs, estimate_Z, sample_with, EstimatorReport, SamplerMode,
    SamplerOptions, Scheme,
};
use qfg_core::qec::{
    pauli_coeffs, rep3_symbolic_table, rep3_syndrome_table, shor_recover, shor_symbolic_table,
    shor_syndrome_table, ErrorSpec, SyndromeTable,
};
use qfg_core::quantum::{build_graph, joint_distribution, validate_measurement, Step};
use qfg_core::{random, BoxRegion, ComplexTensor, FactorGraph, Tolerance, VariableId, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::files::{AnyFile, GraphFileV1, TimelineFileV1};
use crate::numfmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    Greedy,
    User,
}

pub struct ContractArgs {
    pub box_name: Option<String>,
    pub partition_sum: bool,
    pub order: OrderKind,
    /// Elimination order in file variable ids, for [`OrderKind::User`].
    pub elimination: Vec<usize>,
    pub oracle: bool,
    pub raw: bool,
}

pub fn contract(text: &str, args: &ContractArgs, tol: Tolerance) -> Result<String, CliError> {
    let file = GraphFileV1::parse(text)?;
    let loaded = file.load()?;
    let g = &loaded.graph;
    let order = match args.order {
        OrderKind::Greedy => None,
        OrderKind::User => {
            if args.elimination.is_empty() {
                return Err(CliError::Usage(
                    "--order user needs --elim with variable ids".into(),
                ));
            }
            Some(
                args.elimination
                    .iter()
                    .map(|&i| loaded.variable(i))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        }
    };
    if args.partition_sum {
        let z = g.partition_sum(order.as_deref())?;
        if args.oracle {
            let reference = g.brute_force_partition_sum()?;
            if !tol.close_scalar(z, reference) {
                return Err(CliError::Oracle(format!(
                    "partition sum {z} differs from enumeration {reference}"
                )));
            }
        }
        return Ok(format!("{}\n", numfmt::complex(z, args.raw)));
    }
    let name = args
        .box_name
        .as_ref()
        .ok_or_else(|| CliError::Usage("give a box name or --partition-sum".into()))?;
    let b = loaded
        .boxes
        .get(name)
        .ok_or_else(|| CliError::Usage(format!("no box named '{name}' in the graph file")))?;
    let e = g.exterior_function(b, order.as_deref())?;
    if args.oracle {
        let reference = g.brute_force_exterior(b)?;
        if !tol.close(&e, &reference) {
            return Err(CliError::Oracle(format!(
                "exterior function differs from enumeration by {:e}",
                e.max_abs_diff(&reference)
            )));
        }
    }
    let axes: Vec<usize> = e
        .axis_labels()
        .unwrap_or(&[])
        .iter()
        .map(|&i| loaded.file_ids[i])
        .collect();
    Ok(render_table(&e, &axes, args.raw))
}

/// One line per entry: index tuple then value; a header names the axes.
fn render_table(t: &ComplexTensor, axes: &[usize], raw: bool) -> String {
    let mut out = String::from("# axes:");
    for a in axes {
        out.push_str(&format!(" {a}"));
    }
    out.push('\n');
    let shape = t.shape();
    for (flat, &z) in t.data().iter().enumerate() {
        let mut idx = vec![0; shape.len()];
        let mut rest = flat;
        for k in (0..shape.len()).rev() {
            idx[k] = rest % shape[k];
            rest /= shape[k];
        }
        for i in idx {
            out.push_str(&format!("{i} "));
        }
        out.push_str(&numfmt::complex(z, raw));
        out.push('\n');
    }
    out
}

/// Parses `y2=1` or `2=1` into a 1-based measurement number and an outcome.
pub fn parse_condition(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("condition '{s}' is not of the form yK=VALUE"));
    let (k, v) = s.split_once('=').ok_or_else(bad)?;
    let k = k
        .trim()
        .trim_start_matches('y')
        .parse::<usize>()
        .map_err(|_| bad())?;
    let v = v.trim().parse::<usize>().map_err(|_| bad())?;
    if k == 0 {
        return Err(bad());
    }
    Ok((k, v))
}

pub fn joint(
    text: &str,
    conditions: &[(usize, usize)],
    raw: bool,
    tol: Tolerance,
) -> Result<String, CliError> {
    let file = TimelineFileV1::parse(text)?;
    let t = file.build(tol)?;
    let ms = t.measurement_steps();
    let mut steps = t.steps().to_vec();
    for &(k, y) in conditions {
        let s = *ms
            .get(k - 1)
            .ok_or_else(|| CliError::Usage(format!("no measurement number {k}")))?;
        if let Step::Measure { observed, .. } = &mut steps[s] {
            *observed = Some(y);
        }
    }
    let t = qfg_core::quantum::QuantumTimeline::with_tolerance(
        t.dimension(),
        t.initial().clone(),
        steps,
        tol,
    )?;
    let table = joint_distribution(&t)?;
    let numbers: Vec<String> = table
        .outcome_steps
        .iter()
        .map(|s| {
            format!(
                "y{}",
                ms.iter().position(|m| m == s).expect("measurement step") + 1
            )
        })
        .collect();
    let mut out = format!(
        "# outcomes:{}\n",
        numbers.iter().map(|n| format!(" {n}")).collect::<String>()
    );
    let shape = &table.shape;
    for (flat, &p) in table.probabilities.iter().enumerate() {
        let mut idx = vec![0; shape.len()];
        let mut rest = flat;
        for k in (0..shape.len()).rev() {
            idx[k] = rest % shape[k];
            rest /= shape[k];
        }
        for i in idx {
            out.push_str(&format!("{i} "));
        }
        out.push_str(&numfmt::real(p, raw));
        out.push('\n');
    }
    out.push_str(&format!("total {}\n", numfmt::real(table.total(), raw)));
    if !conditions.is_empty() {
        out.push_str(&format!("evidence {}\n", numfmt::real(table.evidence, raw)));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    Rep3,
    Shor,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ErrorArg {
    Coeffs([C64; 4]),
    Random,
}

pub struct QecArgs {
    pub code: Code,
    pub error: ErrorArg,
    pub location: usize,
    pub syndrome: Option<Vec<u8>>,
    pub recover: bool,
    /// Input state for recovery; random when absent.
    pub state: Option<[C64; 2]>,
    pub seed: u64,
    pub raw: bool,
}

/// Parses `re` or `re:im`.
pub fn parse_complex(s: &str) -> Result<C64, CliError> {
    let bad = || CliError::Usage(format!("'{s}' is not a number or re:im pair"));
    match s.split_once(':') {
        Some((re, im)) => Ok(C64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        None => Ok(C64::new(s.trim().parse().map_err(|_| bad())?, 0.0)),
    }
}

pub fn parse_error_arg(s: &str) -> Result<ErrorArg, CliError> {
    if s == "random" {
        return Ok(ErrorArg::Random);
    }
    let parts: Vec<C64> = s.split(',').map(parse_complex).collect::<Result<_, _>>()?;
    let w: [C64; 4] = parts
        .try_into()
        .map_err(|_| CliError::Usage(format!("--error needs four coefficients, got '{s}'")))?;
    Ok(ErrorArg::Coeffs(w))
}

pub fn parse_bits(s: &str) -> Result<Vec<u8>, CliError> {
    s.chars()
        .filter(|c| *c != ',' && *c != ' ')
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(CliError::Usage(format!(
                "syndrome '{s}' must consist of 0 and 1"
            ))),
        })
        .collect()
}

/// Numeric Pauli expansion, e.g. `0.5 σ0 + (0.1-0.2i) σ3`.
fn numeric_pauli(ch: &ComplexTensor, raw: bool) -> String {
    let w = pauli_coeffs(ch).expect("2x2 channel");
    let terms: Vec<String> = w
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 1e-12)
        .map(|(k, z)| {
            if z.im == 0.0 || (z.im.abs() <= 1e-15 && !raw) {
                format!("{} σ{k}", numfmt::real(z.re, raw))
            } else {
                format!(
                    "({}, {}) σ{k}",
                    numfmt::real(z.re, raw),
                    numfmt::real(z.im, raw)
                )
            }
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

fn bits_string(s: &[u8]) -> String {
    s.iter().map(|b| char::from(b'0' + b)).collect()
}

pub fn qec(args: &QecArgs) -> Result<String, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let w = match &args.error {
        ErrorArg::Coeffs(w) => *w,
        ErrorArg::Random => {
            // Unit coefficient norm, so the syndrome probabilities sum to one.
            let w: [C64; 4] = core::array::from_fn(|_| random::complex_gaussian(&mut rng));
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            w.map(|z| z / norm)
        }
    };
    let error = ErrorSpec::from_coeffs(args.location, w)?;
    let mut out = format!(
        "# error at location {}: {}\n",
        args.location,
        numeric_pauli(&error.matrix, args.raw)
    );
    match args.code {
        Code::Rep3 => {
            if args.recover {
                return Err(CliError::Usage(
                    "--recover is only available for the shor code".into(),
                ));
            }
            let table = rep3_syndrome_table(&error)?;
            let symbolic = rep3_symbolic_table()?;
            out.push_str("# Y2Y1  symbolic  numeric\n");
            for (s, ch) in table.syndromes.iter().zip(&table.channels) {
                if let Some(want) = &args.syndrome {
                    if want != s {
                        continue;
                    }
                }
                let idx = (s[0] * 2 + s[1]) as usize;
                out.push_str(&format!(
                    "{}  {}  {}\n",
                    bits_string(s),
                    symbolic[idx][args.location - 1].render(1e-9),
                    numeric_pauli(ch, args.raw)
                ));
            }
        }
        Code::Shor => {
            let table: SyndromeTable = shor_syndrome_table(&error)?;
            let symbolic = shor_symbolic_table(args.location)?;
            let psi = match args.state {
                Some(s) => {
                    let n = (s[0].norm_sqr() + s[1].norm_sqr()).sqrt();
                    if n == 0.0 {
                        return Err(CliError::Usage("--state must be nonzero".into()));
                    }
                    vec![s[0] / n, s[1] / n]
                }
                None => random::pure_state(&mut rng, 2),
            };
            out.push_str("# syndrome (Y2 Y1 per block, then outer Y2 Y1)  symbolic  numeric\n");
            for (i, (s, ch)) in table.syndromes.iter().zip(&table.channels).enumerate() {
                match &args.syndrome {
                    Some(want) if want != s => continue,
                    None if table.impossible[i] => continue,
                    _ => {}
                }
                out.push_str(&format!(
                    "{}  {}  {}\n",
                    bits_string(s),
                    symbolic[i].1.render(1e-9),
                    numeric_pauli(ch, args.raw)
                ));
                if args.recover {
                    let r = shor_recover(&error, s, &psi)?;
                    let fid = if args.raw {
                        numfmt::raw(r.fidelity)
                    } else {
                        format!("{:.*}", numfmt::SIGNIFICANT_DIGITS - 1, r.fidelity)
                    };
                    out.push_str(&format!(
                        "  correction σ{}  probability {}  fidelity {fid}\n",
                        r.correction,
                        numfmt::real(r.syndrome_probability, args.raw)
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Monte Carlo report as written to stdout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReportJson {
    pub scheme: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
    pub estimate: [f64; 2],
    pub std_error: f64,
    pub conjugate_augmented: bool,
    pub sampler: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thinning: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ladder: Vec<f64>,
    /// Exact bit patterns of `estimate` and `std_error` with `--raw`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<RawValues>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawValues {
    pub estimate: [String; 2],
    pub std_error: String,
}

impl McReportJson {
    pub fn from_report(r: &EstimatorReport, raw: bool) -> Self {
        let (scheme, rho) = match r.scheme {
            Scheme::Uniform => ("uniform", None),
            Scheme::AbsF => ("abs_f", None),
            Scheme::AbsFAnnealed(p) => ("abs_f_annealed", Some(p)),
        };
        let (sampler, burn_in, thinning) = match r.mode {
            SamplerMode::Exact => ("exact", None, None),
            SamplerMode::Metropolis { burn_in, thinning } => {
                ("metropolis", Some(burn_in), Some(thinning))
            }
        };
        McReportJson {
            scheme: scheme.to_string(),
            rho,
            k: r.samples,
            seed: r.seed,
            estimate: [numfmt::round(r.estimate.re), numfmt::round(r.estimate.im)],
            std_error: numfmt::round(r.std_error),
            conjugate_augmented: r.conjugate_augmented,
            sampler: sampler.to_string(),
            burn_in,
            thinning,
            ladder: r.ladder.clone(),
            raw: raw.then(|| RawValues {
                estimate: [numfmt::raw(r.estimate.re), numfmt::raw(r.estimate.im)],
                std_error: numfmt::raw(r.std_error),
            }),
        }
    }
}

pub fn parse_scheme(s: &str) -> Result<Scheme, CliError> {
    match s {
        "uniform" => Ok(Scheme::Uniform),
        "abs_f" => Ok(Scheme::AbsF),
        _ => {
            let rho = s
                .strip_prefix("abs_f_annealed:")
                .or_else(|| s.strip_prefix("annealed:"))
                .and_then(|r| r.parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "unknown scheme '{s}', expected uniform, abs_f or abs_f_annealed:RHO"
                    ))
                })?;
            Ok(Scheme::AbsFAnnealed(rho))
        }
    }
}

pub struct McArgs {
    pub scheme: Scheme,
    pub k: usize,
    pub seed: u64,
    pub ladder: Option<Vec<f64>>,
    pub augment: bool,
    pub options: SamplerOptions,
    pub raw: bool,
}

/// Graph and mirror pairs from either file kind.
fn graph_for_mc(
    text: &str,
    tol: Tolerance,
) -> Result<(FactorGraph, Vec<(VariableId, VariableId)>), CliError> {
    match AnyFile::parse(text)? {
        AnyFile::Graph(f) => {
            let l = f.load()?;
            Ok((l.graph, l.mirror_pairs))
        }
        AnyFile::Timeline(f) => {
            let qg = build_graph(&f.build(tol)?)?;
            Ok((qg.graph, qg.registry.mirror_pairs()))
        }
    }
}

pub fn mc(text: &str, args: &McArgs, tol: Tolerance) -> Result<String, CliError> {
    let (g, pairs) = graph_for_mc(text, tol)?;
    let report = match &args.ladder {
        Some(levels) => {
            if args.augment {
                return Err(CliError::Usage(
                    "--augment cannot be combined with --ladder".into(),
                ));
            }
            anneal_ladder_with(&g, levels, args.k, args.seed, &args.options)?
        }
        None => {
            let mut s = sample_with(&g, args.scheme, args.k, args.seed, &args.options)?;
            if args.augment {
                if pairs.is_empty() {
                    return Err(CliError::Semantic(qfg_core::Error::Structure(
                        "--augment needs a conjugate-pair graph (timeline file or mirror_pairs)"
                            .into(),
                    )));
                }
                s = augment_with_pairs(&s, &g, &pairs, tol)?;
            }
            estimate_Z(&s, &g)?
        }
    };
    let json = McReportJson::from_report(&report, args.raw);
    Ok(serde_json::to_string_pretty(&json).expect("serializable") + "\n")
}

pub fn validate(text: &str, tol: Tolerance) -> Result<String, CliError> {
    match AnyFile::parse(text)? {
        AnyFile::Graph(f) => {
            let l = f.load()?;
            for (name, b) in &l.boxes {
                l.graph
                    .classify(b)
                    .map_err(|e| CliError::Schema(format!("boxes.{name}: {e}")))?;
            }
            let all = BoxRegion::all(&l.graph);
            Ok(format!(
                "graph ok: {} variables, {} factors, {} boxes, {} half edges\n",
                l.graph.variable_count(),
                l.graph.factor_count(),
                l.boxes.len(),
                l.graph.boundary(&all)?.len()
            ))
        }
        AnyFile::Timeline(f) => {
            let mut out = String::new();
            let mut bad = Vec::new();
            for (k, fam) in f.families(tol)? {
                let r = validate_measurement(&fam, tol);
                out.push_str(&format!(
                    "step {k}: measurement with {} outcomes, max deviation {} {}\n",
                    fam.outcome_count(),
                    numfmt::sig(r.max_deviation),
                    if r.ok { "ok" } else { "INVALID" }
                ));
                if !r.ok {
                    bad.push(k);
                }
            }
            if !bad.is_empty() {
                return Err(CliError::Semantic(qfg_core::Error::Domain(format!(
                    "measurement families at steps {bad:?} do not satisfy sum A^H A = I"
                ))));
            }
            let t = f.build(tol)?;
            out.push_str(&format!(
                "timeline ok: dimension {}, {} steps, {} measurements\n",
                t.dimension(),
                t.steps().len(),
                t.measurement_steps().len()
            ));
            Ok(out)
        }
    }
}

/// Compiles a timeline into a graph file with its mirror pairs.
pub fn compile(text: &str, tol: Tolerance) -> Result<String, CliError> {
    let f = TimelineFileV1::parse(text)?;
    let qg = build_graph(&f.build(tol)?)?;
    let out = GraphFileV1::from_graph(&qg.graph, &qg.registry.mirror_pairs())?;
    Ok(serde_json::to_string(&out).expect("serializable") + "\n")
}

/// Reads `QFG_TOL` as `ABS` or `ABS,REL`.
pub fn tolerance_from_env(value: Option<&str>) -> Result<Tolerance, CliError> {
    let Some(v) = value else {
        return Ok(Tolerance::default());
    };
    let parts: Vec<&str> = v.split(',').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("QFG_TOL='{v}' is not ABS or ABS,REL")))
    };
    let t = match parts.as_slice() {
        [a] => Tolerance::new(num(a)?, Tolerance::default().rel_eps),
        [a, r] => Tolerance::new(num(a)?, num(r)?),
        _ => {
            return Err(CliError::Usage(format!(
                "QFG_TOL='{v}' is not ABS or ABS,REL"
            )))
        }
    };
    t.map_err(|e| CliError::Usage(format!("QFG_TOL: {e}")))
}
