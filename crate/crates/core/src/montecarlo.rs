//! Monte Carlo estimation of partition sums.
//!
//! Configurations are drawn either uniformly or from `|f|^rho / Z_rho`
//! (`rho = 1` is the plain `|f|` target). Small graphs are sampled exactly
//! by inverse CDF over the enumerated table; larger ones fall back to a
//! single-site Metropolis chain. For conjugate-pair quantum graphs each
//! sample can be joined by its mirror image, which makes paired summands
//! real.
//!
//! Randomness comes from ChaCha8 seeded with the caller's seed; ladder
//! levels use separate streams of the same seed so they can be run in any
//! order.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{FactorGraph, VariableId};
use crate::quantum::Registry;
use crate::tensor::Tolerance;
use crate::C64;

pub const DEFAULT_BURN_IN: usize = 1000;
pub const DEFAULT_THINNING: usize = 10;

/// Target distribution the samples were drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Uniform,
    /// `p(x) ∝ |f(x)|`.
    AbsF,
    /// `p(x) ∝ |f(x)|^rho` with `0 < rho < 1`.
    AbsFAnnealed(f64),
}

impl Scheme {
    /// Exponent of `|f|` in the target; 0 for uniform.
    pub fn exponent(&self) -> f64 {
        match *self {
            Scheme::Uniform => 0.0,
            Scheme::AbsF => 1.0,
            Scheme::AbsFAnnealed(r) => r,
        }
    }

    fn for_exponent(rho: f64) -> Scheme {
        if rho == 0.0 {
            Scheme::Uniform
        } else if rho == 1.0 {
            Scheme::AbsF
        } else {
            Scheme::AbsFAnnealed(rho)
        }
    }

    fn validate(&self) -> Result<()> {
        if let Scheme::AbsFAnnealed(r) = *self {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Argument(format!(
                    "annealing exponent {r} not in (0,1)"
                )));
            }
        }
        Ok(())
    }
}

/// How the samples were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerMode {
    Exact,
    Metropolis { burn_in: usize, thinning: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerOptions {
    pub burn_in: usize,
    pub thinning: usize,
    /// Use Metropolis even when exact sampling is possible.
    pub force_metropolis: bool,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions {
            burn_in: DEFAULT_BURN_IN,
            thinning: DEFAULT_THINNING,
            force_metropolis: false,
        }
    }
}

/// Sampled configurations with their factor-graph values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    /// The variables that are summed over, in id order.
    pub variables: Vec<VariableId>,
    /// One value per entry of `variables` for each sample.
    pub configurations: Vec<Vec<usize>>,
    pub values: Vec<C64>,
    pub scheme: Scheme,
    pub seed: u64,
    pub mode: SamplerMode,
    /// Samples come in mirror pairs `(2i, 2i+1)`.
    pub augmented: bool,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A Monte Carlo estimate of a partition sum.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub estimate: C64,
    pub std_error: f64,
    /// Number of independent summands.
    pub samples: usize,
    pub scheme: Scheme,
    pub seed: u64,
    pub mode: SamplerMode,
    pub conjugate_augmented: bool,
    /// Annealing levels for ladder estimates, empty otherwise.
    pub ladder: Vec<f64>,
}

impl EstimatorReport {
    /// Pools independent reports, weighting each by its sample count.
    pub fn merge(reports: &[EstimatorReport]) -> Result<EstimatorReport> {
        let first = reports
            .first()
            .ok_or_else(|| Error::Argument("nothing to merge".into()))?;
        let total: usize = reports.iter().map(|r| r.samples).sum();
        if total == 0 {
            return Err(Error::Argument("reports carry no samples".into()));
        }
        let mut est = C64::new(0.0, 0.0);
        let mut var = 0.0;
        for r in reports {
            if r.scheme != first.scheme {
                return Err(Error::SchemeMismatch(
                    "cannot merge reports with different schemes".into(),
                ));
            }
            let w = r.samples as f64 / total as f64;
            est += r.estimate * w;
            var += w * w * r.std_error * r.std_error;
        }
        Ok(EstimatorReport {
            estimate: est,
            std_error: libm::sqrt(var),
            samples: total,
            ..first.clone()
        })
    }
}

/// Variables with at least one factor attached; the rest do not enter `Z`.
fn summed_variables(g: &FactorGraph) -> Vec<VariableId> {
    (0..g.variable_count())
        .map(VariableId)
        .filter(|&v| g.degree(v).map(|d| d > 0).unwrap_or(false))
        .collect()
}

fn space_size(g: &FactorGraph, vars: &[VariableId]) -> Result<u128> {
    let mut n = 1u128;
    for &v in vars {
        n = n.saturating_mul(g.alphabet_size(v)? as u128);
    }
    Ok(n)
}

struct Evaluator<'g> {
    g: &'g FactorGraph,
    vars: Vec<VariableId>,
    sizes: Vec<usize>,
    full: Vec<usize>,
}

impl<'g> Evaluator<'g> {
    fn new(g: &'g FactorGraph) -> Result<Self> {
        let vars = summed_variables(g);
        let sizes = vars
            .iter()
            .map(|&v| g.alphabet_size(v))
            .collect::<Result<_>>()?;
        Ok(Evaluator {
            g,
            vars,
            sizes,
            full: vec![0; g.variable_count()],
        })
    }

    fn value(&mut self, config: &[usize]) -> Result<C64> {
        for (v, &x) in self.vars.iter().zip(config) {
            self.full[v.0] = x;
        }
        self.g.evaluate(&self.full)
    }

    fn decode(&self, mut index: u128) -> Vec<usize> {
        let mut c = vec![0; self.sizes.len()];
        for i in (0..self.sizes.len()).rev() {
            let s = self.sizes[i] as u128;
            c[i] = (index % s) as usize;
            index /= s;
        }
        c
    }
}

fn weight(f: C64, rho: f64) -> f64 {
    if rho == 0.0 {
        1.0
    } else if rho == 1.0 {
        f.norm()
    } else {
        libm::pow(f.norm(), rho)
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Sum of `|f|^rho` over all configurations, by enumeration.
pub fn exact_weight_sum(g: &FactorGraph, rho: f64) -> Result<f64> {
    let mut ev = Evaluator::new(g)?;
    let count = space_size(g, &ev.vars)?;
    if count > g.enumeration_guard() {
        return Err(Error::Resource {
            what: "enumeration of |f|",
            needed: count,
            budget: g.enumeration_guard(),
        });
    }
    let mut total = 0.0;
    for i in 0..count {
        let c = ev.decode(i);
        total += weight(ev.value(&c)?, rho);
    }
    Ok(total)
}

/// Draws `k` configurations with the default sampler options.
pub fn sample(g: &FactorGraph, scheme: Scheme, k: usize, seed: u64) -> Result<SampleSet> {
    sample_with(g, scheme, k, seed, &SamplerOptions::default())
}

pub fn sample_with(
    g: &FactorGraph,
    scheme: Scheme,
    k: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<SampleSet> {
    sample_stream(g, scheme, k, seed, 0, opts)
}

fn sample_stream(
    g: &FactorGraph,
    scheme: Scheme,
    k: usize,
    seed: u64,
    stream: u64,
    opts: &SamplerOptions,
) -> Result<SampleSet> {
    scheme.validate()?;
    if k == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let mut rng = rng_for(seed, stream);
    let mut ev = Evaluator::new(g)?;
    let rho = scheme.exponent();
    let count = space_size(g, &ev.vars)?;
    let mut configurations = Vec::with_capacity(k);
    let mut values = Vec::with_capacity(k);
    let mode;

    if scheme == Scheme::Uniform && !opts.force_metropolis {
        mode = SamplerMode::Exact;
        for _ in 0..k {
            let c: Vec<usize> = ev.sizes.iter().map(|&s| rng.random_range(0..s)).collect();
            values.push(ev.value(&c)?);
            configurations.push(c);
        }
    } else if count <= g.enumeration_guard() && !opts.force_metropolis {
        mode = SamplerMode::Exact;
        let mut cdf = Vec::with_capacity(count as usize);
        let mut total = 0.0;
        for i in 0..count {
            let c = ev.decode(i);
            total += weight(ev.value(&c)?, rho);
            cdf.push(total);
        }
        if !(total > 0.0) {
            return Err(Error::DegenerateTarget);
        }
        for _ in 0..k {
            let u = rng.random::<f64>() * total;
            // First entry with cdf > u; zero-weight entries are never chosen.
            let mut i = cdf.partition_point(|&c| c <= u);
            if i >= cdf.len() {
                i = cdf.len() - 1;
                while i > 0 && cdf[i - 1] == cdf[i] {
                    i -= 1;
                }
            }
            let c = ev.decode(i as u128);
            values.push(ev.value(&c)?);
            configurations.push(c);
        }
    } else {
        if opts.thinning == 0 {
            return Err(Error::Argument("thinning must be at least 1".into()));
        }
        mode = SamplerMode::Metropolis {
            burn_in: opts.burn_in,
            thinning: opts.thinning,
        };
        let mut state = None;
        for _ in 0..10_000 {
            let c: Vec<usize> = ev.sizes.iter().map(|&s| rng.random_range(0..s)).collect();
            let f = ev.value(&c)?;
            if weight(f, rho) > 0.0 {
                state = Some((c, f));
                break;
            }
        }
        let (mut c, mut f) = state.ok_or(Error::DegenerateTarget)?;
        let mut w = weight(f, rho);
        let n = ev.sizes.len();
        let steps = opts.burn_in + k * opts.thinning;
        for step in 1..=steps {
            if n > 0 {
                let i = rng.random_range(0..n);
                let old = c[i];
                c[i] = rng.random_range(0..ev.sizes[i]);
                let f_new = ev.value(&c)?;
                let w_new = weight(f_new, rho);
                let u: f64 = rng.random();
                if w_new >= w || u * w < w_new {
                    f = f_new;
                    w = w_new;
                } else {
                    c[i] = old;
                }
            }
            if step > opts.burn_in && (step - opts.burn_in).is_multiple_of(opts.thinning) {
                configurations.push(c.clone());
                values.push(f);
            }
        }
    }

    Ok(SampleSet {
        variables: ev.vars,
        configurations,
        values,
        scheme,
        seed,
        mode,
        augmented: false,
    })
}

/// Joins each sample of a conjugate-pair quantum graph by its mirror image.
pub fn augment_conjugate(s: &SampleSet, g: &FactorGraph, registry: &Registry) -> Result<SampleSet> {
    augment_with_pairs(s, g, &registry.mirror_pairs(), Tolerance::default())
}

/// Mirror swap given explicitly as `(upper, lower)` variable pairs. Every
/// swapped value must be the conjugate of the original within `tol`.
pub fn augment_with_pairs(
    s: &SampleSet,
    g: &FactorGraph,
    pairs: &[(VariableId, VariableId)],
    tol: Tolerance,
) -> Result<SampleSet> {
    if s.augmented {
        return Err(Error::Argument("sample set is already augmented".into()));
    }
    let pos = |v: VariableId| s.variables.iter().position(|&x| x == v);
    let mut swaps = Vec::new();
    for &(a, b) in pairs {
        if g.alphabet_size(a)? != g.alphabet_size(b)? {
            return Err(Error::Structure(format!(
                "mirror pair ({}, {}) has different alphabets",
                a.0, b.0
            )));
        }
        match (pos(a), pos(b)) {
            (Some(i), Some(j)) => swaps.push((i, j)),
            (None, None) => {}
            _ => {
                return Err(Error::Structure(format!(
                    "mirror pair ({}, {}) is only half attached",
                    a.0, b.0
                )))
            }
        }
    }
    let mut ev = Evaluator::new(g)?;
    if ev.vars != s.variables {
        return Err(Error::Argument(
            "sample set was drawn from a different graph".into(),
        ));
    }
    let mut configurations = Vec::with_capacity(2 * s.len());
    let mut values = Vec::with_capacity(2 * s.len());
    for (c, &f) in s.configurations.iter().zip(&s.values) {
        let mut m = c.clone();
        for &(i, j) in &swaps {
            m.swap(i, j);
        }
        let fm = ev.value(&m)?;
        if (fm - f.conj()).norm() > tol.bound(f.norm()) {
            return Err(Error::Structure(format!(
                "mirrored value {fm} is not the conjugate of {f}"
            )));
        }
        configurations.push(c.clone());
        values.push(f);
        configurations.push(m);
        values.push(fm);
    }
    Ok(SampleSet {
        configurations,
        values,
        augmented: true,
        ..s.clone()
    })
}

/// The per-sample summands (pair-averaged when augmented) before scaling.
/// For `|f|^rho` targets this is `f / |f|^rho`.
pub fn summands(s: &SampleSet) -> Vec<C64> {
    let rho = s.scheme.exponent();
    let term = |f: C64| {
        if rho == 0.0 {
            f
        } else {
            f / weight(f, rho)
        }
    };
    if s.augmented {
        s.values
            .chunks(2)
            .map(|p| {
                // The pair sums to a real number; drop the rounding residue.
                let t = (term(p[0]) + term(p[1])) * 0.5;
                C64::new(t.re, 0.0)
            })
            .collect()
    } else {
        s.values.iter().map(|&f| term(f)).collect()
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean and standard error of complex summands.
fn mean_and_error(xs: &[C64]) -> (C64, f64) {
    let n = xs.len() as f64;
    let mean = C64::new(
        compensated_sum(xs.iter().map(|x| x.re)),
        compensated_sum(xs.iter().map(|x| x.im)),
    ) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(xs.iter().map(|x| (x - mean).norm_sqr()));
    (mean, libm::sqrt(ss / (n - 1.0) / n))
}

/// Estimates `Z` from a sample set. Normalizers of `|f|`-based targets are
/// computed by enumeration; use [`anneal_ladder`] when that is too large.
#[allow(non_snake_case)]
pub fn estimate_Z(s: &SampleSet, g: &FactorGraph) -> Result<EstimatorReport> {
    if s.is_empty() {
        return Err(Error::Argument("empty sample set".into()));
    }
    let vars = summed_variables(g);
    if vars != s.variables {
        return Err(Error::Argument(
            "sample set was drawn from a different graph".into(),
        ));
    }
    let scale = match s.scheme {
        Scheme::Uniform => space_size(g, &vars)? as f64,
        other => exact_weight_sum(g, other.exponent())?,
    };
    let terms = summands(s);
    let (mean, se) = mean_and_error(&terms);
    Ok(EstimatorReport {
        estimate: mean * scale,
        std_error: se * scale,
        samples: terms.len(),
        scheme: s.scheme,
        seed: s.seed,
        mode: s.mode,
        conjugate_augmented: s.augmented,
        ladder: Vec::new(),
    })
}

/// Like [`estimate_Z`], but first checks that the samples came from the
/// proposal the caller expects.
#[allow(non_snake_case)]
pub fn estimate_Z_for(s: &SampleSet, g: &FactorGraph, expected: Scheme) -> Result<EstimatorReport> {
    if s.scheme != expected {
        return Err(Error::SchemeMismatch(format!(
            "samples drawn with {:?}, estimator expects {:?}",
            s.scheme, expected
        )));
    }
    estimate_Z(s, g)
}

/// Ladder estimate with default sampler options.
pub fn anneal_ladder(
    g: &FactorGraph,
    levels: &[f64],
    k: usize,
    seed: u64,
) -> Result<EstimatorReport> {
    anneal_ladder_with(g, levels, k, seed, &SamplerOptions::default())
}

/// Estimates `Z` without enumerating `|f|`.
///
/// With levels `0 = rho_0 < rho_1 < ... < rho_L <= 1`,
/// `Z_rho = sum |f|^rho` telescopes as
/// `Z_{rho_L} = |X| * prod_i E_{rho_{i-1}}[|f|^(rho_i - rho_{i-1})]`, and
/// `Z = Z_{rho_L} * E_{rho_L}[f / |f|^rho_L]`. Level `i` is sampled on
/// stream `i`. An empty ladder is the uniform estimator.
pub fn anneal_ladder_with(
    g: &FactorGraph,
    levels: &[f64],
    k: usize,
    seed: u64,
    opts: &SamplerOptions,
) -> Result<EstimatorReport> {
    let mut prev = 0.0;
    for &r in levels {
        if !(r > prev && r <= 1.0) {
            return Err(Error::Argument(format!(
                "ladder levels must increase strictly within (0,1], got {levels:?}"
            )));
        }
        prev = r;
    }
    let x_size = space_size(g, &summed_variables(g))? as f64;
    let mut rhos = vec![0.0];
    rhos.extend_from_slice(levels);

    let mut log_scale = libm::log(x_size);
    let mut rel_var = 0.0;
    let mut mode = SamplerMode::Exact;
    for (i, pair) in rhos.windows(2).enumerate() {
        let s = sample_stream(g, Scheme::for_exponent(pair[0]), k, seed, i as u64, opts)?;
        if let SamplerMode::Metropolis { .. } = s.mode {
            mode = s.mode;
        }
        let d = pair[1] - pair[0];
        let ratios: Vec<C64> = s
            .values
            .iter()
            .map(|&f| C64::new(weight(f, d), 0.0))
            .collect();
        let (r, se) = mean_and_error(&ratios);
        if !(r.re > 0.0) {
            return Err(Error::DegenerateTarget);
        }
        log_scale += libm::log(r.re);
        rel_var += (se / r.re) * (se / r.re);
    }
    let top = *rhos.last().expect("nonempty");
    let s = sample_stream(
        g,
        Scheme::for_exponent(top),
        k,
        seed,
        levels.len() as u64,
        opts,
    )?;
    if let SamplerMode::Metropolis { .. } = s.mode {
        mode = s.mode;
    }
    let (phase, se_phase) = mean_and_error(&summands(&s));
    let scale = libm::exp(log_scale);
    let estimate = phase * scale;
    let std_error = libm::sqrt(scale * scale * se_phase * se_phase + estimate.norm_sqr() * rel_var);
    Ok(EstimatorReport {
        estimate,
        std_error,
        samples: k,
        scheme: Scheme::for_exponent(top),
        seed,
        mode,
        conjugate_augmented: false,
        ladder: levels.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::tensor::ComplexTensor;

    fn toy() -> FactorGraph {
        let mut g = FactorGraph::new();
        let x = g.add_variable(2).unwrap();
        g.add_factor(
            ComplexTensor::from_real(vec![2], &[3.0, 1.0]).unwrap(),
            &[x],
        )
        .unwrap();
        g
    }

    #[test]
    fn abs_f_frequencies() {
        let s = sample(&toy(), Scheme::AbsF, 10_000, 1).unwrap();
        let zeros = s.configurations.iter().filter(|c| c[0] == 0).count() as f64 / 1e4;
        let sigma = libm::sqrt(0.75 * 0.25 / 1e4);
        assert!((zeros - 0.75).abs() < 3.0 * sigma, "{zeros}");
        assert_eq!(s.mode, SamplerMode::Exact);
    }

    #[test]
    fn uniform_estimate_of_toy() {
        let g = toy();
        let r = estimate_Z(&sample(&g, Scheme::Uniform, 20_000, 2).unwrap(), &g).unwrap();
        assert!((r.estimate - c64(4.0, 0.0)).norm() < 3.0 * r.std_error);
        let r = estimate_Z(&sample(&g, Scheme::AbsF, 100, 2).unwrap(), &g).unwrap();
        assert!((r.estimate - c64(4.0, 0.0)).norm() < 1e-12);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn seeded_runs_repeat() {
        let g = toy();
        let a = sample(&g, Scheme::AbsFAnnealed(0.5), 500, 9).unwrap();
        let b = sample(&g, Scheme::AbsFAnnealed(0.5), 500, 9).unwrap();
        assert_eq!(a, b);
        let c = sample(&g, Scheme::AbsFAnnealed(0.5), 500, 10).unwrap();
        assert_ne!(a.configurations, c.configurations);
    }

    #[test]
    fn metropolis_matches_target() {
        let opts = SamplerOptions {
            force_metropolis: true,
            ..Default::default()
        };
        let s = sample_with(&toy(), Scheme::AbsF, 20_000, 3, &opts).unwrap();
        let zeros = s.configurations.iter().filter(|c| c[0] == 0).count() as f64 / 2e4;
        assert!((zeros - 0.75).abs() < 0.02, "{zeros}");
        assert_eq!(
            s.mode,
            SamplerMode::Metropolis {
                burn_in: 1000,
                thinning: 10
            }
        );
    }

    #[test]
    fn degenerate_and_bad_arguments() {
        let mut g = FactorGraph::new();
        let x = g.add_variable(2).unwrap();
        g.add_factor(ComplexTensor::zeros(vec![2]).unwrap(), &[x])
            .unwrap();
        assert!(matches!(
            sample(&g, Scheme::AbsF, 10, 0),
            Err(Error::DegenerateTarget)
        ));
        assert!(sample(&toy(), Scheme::AbsFAnnealed(1.5), 10, 0).is_err());
        assert!(anneal_ladder(&toy(), &[0.5, 0.3], 10, 0).is_err());
        let s = sample(&toy(), Scheme::Uniform, 10, 0).unwrap();
        assert!(matches!(
            estimate_Z_for(&s, &toy(), Scheme::AbsF),
            Err(Error::SchemeMismatch(_))
        ));
    }

    #[test]
    fn hermitian_pair_augments_to_real() {
        let mut g = FactorGraph::new();
        let u = g.add_variable(2).unwrap();
        let l = g.add_variable(2).unwrap();
        let f = ComplexTensor::new(
            vec![2, 2],
            vec![c64(1.0, 0.0), c64(1.0, 1.0), c64(1.0, -1.0), c64(1.0, 0.0)],
        )
        .unwrap();
        g.add_factor(f, &[u, l]).unwrap();
        let s = sample(&g, Scheme::AbsF, 2000, 4).unwrap();
        let a = augment_with_pairs(&s, &g, &[(u, l)], Tolerance::default()).unwrap();
        assert_eq!(a.len(), 4000);
        for p in a.values.chunks(2) {
            assert_eq!((p[0] + p[1]).im, 0.0);
        }
        let r = estimate_Z(&a, &g).unwrap();
        assert_eq!(r.estimate.im, 0.0);
        assert!((r.estimate.re - 4.0).abs() < 3.0 * r.std_error.max(1e-12));

        let mut h = FactorGraph::new();
        let a1 = h.add_variable(2).unwrap();
        let b1 = h.add_variable(2).unwrap();
        h.add_factor(
            ComplexTensor::from_real(vec![2, 2], &[1.0, 2.0, 3.0, 4.0]).unwrap(),
            &[a1, b1],
        )
        .unwrap();
        let s = sample(&h, Scheme::Uniform, 50, 5).unwrap();
        assert!(matches!(
            augment_with_pairs(&s, &h, &[(a1, b1)], Tolerance::default()),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn ladder_on_toy() {
        let g = toy();
        let r = anneal_ladder(&g, &[0.5, 1.0], 10_000, 6).unwrap();
        assert!(
            (r.estimate - c64(4.0, 0.0)).norm() < 3.0 * r.std_error,
            "{r:?}"
        );
        let empty = anneal_ladder(&g, &[], 10_000, 6).unwrap();
        let direct = estimate_Z(&sample(&g, Scheme::Uniform, 10_000, 6).unwrap(), &g).unwrap();
        assert_eq!(empty.estimate, direct.estimate);
    }

    #[test]
    fn merge_pools_by_count() {
        let g = toy();
        let a = estimate_Z(&sample(&g, Scheme::Uniform, 100, 1).unwrap(), &g).unwrap();
        let b = estimate_Z(&sample(&g, Scheme::Uniform, 300, 2).unwrap(), &g).unwrap();
        let m = EstimatorReport::merge(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(m.samples, 400);
        assert!((m.estimate - (a.estimate * 0.25 + b.estimate * 0.75)).norm() < 1e-12);
    }
}
