//! Normal factor graphs: variables are edges (or half edges), factors are
//! nodes, and every variable touches at most two factor ports.
//!
//! Closing a box replaces the factors inside it by their exterior function:
//! the product of the factors summed over the variables that live entirely
//! inside the box. Boundary variables (attached inside and outside, or half
//! edges inside) become the axes of the result, in ascending
//! [`VariableId`] order.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gates;
use crate::tensor::{einsum_pair, einsum_single, ComplexTensor};
use crate::C64;

/// Default cap on the number of entries of any intermediate tensor.
pub const DEFAULT_ENTRY_BUDGET: u128 = 1 << 26;
/// Default cap on the number of configurations brute-force enumeration visits.
pub const DEFAULT_ENUMERATION_GUARD: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactorId(pub usize);

/// A set of factors to close a box around.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRegion {
    factors: Vec<FactorId>,
}

impl BoxRegion {
    pub fn new(factors: impl IntoIterator<Item = FactorId>) -> Self {
        let set: BTreeSet<FactorId> = factors.into_iter().collect();
        BoxRegion {
            factors: set.into_iter().collect(),
        }
    }

    /// Box around every factor of `g`.
    pub fn all(g: &FactorGraph) -> Self {
        BoxRegion {
            factors: (0..g.factors.len()).map(FactorId).collect(),
        }
    }

    pub fn factors(&self) -> &[FactorId] {
        &self.factors
    }

    pub fn contains(&self, f: FactorId) -> bool {
        self.factors.binary_search(&f).is_ok()
    }
}

#[derive(Debug, Clone)]
struct Variable {
    size: usize,
    ports: Vec<(FactorId, usize)>,
}

#[derive(Debug, Clone)]
struct Factor {
    tensor: ComplexTensor,
    vars: Vec<VariableId>,
}

#[derive(Debug, Clone)]
pub struct FactorGraph {
    variables: Vec<Variable>,
    factors: Vec<Factor>,
    entry_budget: u128,
    enumeration_guard: u128,
}

impl Default for FactorGraph {
    fn default() -> Self {
        Self::new()
    }
}

/// Working tensor during elimination: data plus one variable per axis.
struct Work {
    tensor: ComplexTensor,
    vars: Vec<usize>,
}

impl FactorGraph {
    pub fn new() -> Self {
        FactorGraph {
            variables: Vec::new(),
            factors: Vec::new(),
            entry_budget: DEFAULT_ENTRY_BUDGET,
            enumeration_guard: DEFAULT_ENUMERATION_GUARD,
        }
    }

    pub fn with_entry_budget(mut self, budget: u128) -> Self {
        self.entry_budget = budget;
        self
    }

    pub fn with_enumeration_guard(mut self, guard: u128) -> Self {
        self.enumeration_guard = guard;
        self
    }

    pub fn entry_budget(&self) -> u128 {
        self.entry_budget
    }

    pub fn enumeration_guard(&self) -> u128 {
        self.enumeration_guard
    }

    pub fn add_variable(&mut self, alphabet_size: usize) -> Result<VariableId> {
        if alphabet_size == 0 {
            return Err(Error::Argument("alphabet size must be at least 1".into()));
        }
        self.variables.push(Variable {
            size: alphabet_size,
            ports: Vec::new(),
        });
        Ok(VariableId(self.variables.len() - 1))
    }

    /// Attaches `tensor` to `vars` (one variable per axis, in axis order).
    /// The same variable may fill two ports of one factor.
    pub fn add_factor(&mut self, tensor: ComplexTensor, vars: &[VariableId]) -> Result<FactorId> {
        if tensor.rank() != vars.len() {
            return Err(Error::Dimension(format!(
                "factor of rank {} given {} variables",
                tensor.rank(),
                vars.len()
            )));
        }
        for (axis, &v) in vars.iter().enumerate() {
            let var = self
                .variables
                .get(v.0)
                .ok_or_else(|| Error::Argument(format!("unknown variable {}", v.0)))?;
            if var.size != tensor.shape()[axis] {
                return Err(Error::Dimension(format!(
                    "axis {axis} has size {} but variable {} has alphabet size {}",
                    tensor.shape()[axis],
                    v.0,
                    var.size
                )));
            }
            let extra = vars[..axis].iter().filter(|&&w| w == v).count();
            if var.ports.len() + extra >= 2 {
                return Err(Error::Normality { variable: v.0 });
            }
        }
        let id = FactorId(self.factors.len());
        for (axis, &v) in vars.iter().enumerate() {
            self.variables[v.0].ports.push((id, axis));
        }
        let tensor = tensor.with_labels(vars.iter().map(|v| v.0).collect())?;
        self.factors.push(Factor {
            tensor,
            vars: vars.to_vec(),
        });
        Ok(id)
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn alphabet_size(&self, v: VariableId) -> Result<usize> {
        self.variables
            .get(v.0)
            .map(|x| x.size)
            .ok_or_else(|| Error::Argument(format!("unknown variable {}", v.0)))
    }

    /// Number of factor ports the variable is attached to (0, 1 or 2).
    pub fn degree(&self, v: VariableId) -> Result<usize> {
        self.variables
            .get(v.0)
            .map(|x| x.ports.len())
            .ok_or_else(|| Error::Argument(format!("unknown variable {}", v.0)))
    }

    /// Factor ports `(factor, axis)` the variable is attached to.
    pub fn ports(&self, v: VariableId) -> Result<&[(FactorId, usize)]> {
        self.variables
            .get(v.0)
            .map(|x| x.ports.as_slice())
            .ok_or_else(|| Error::Argument(format!("unknown variable {}", v.0)))
    }

    pub fn factor(&self, f: FactorId) -> Result<(&ComplexTensor, &[VariableId])> {
        self.factors
            .get(f.0)
            .map(|x| (&x.tensor, x.vars.as_slice()))
            .ok_or_else(|| Error::Argument(format!("unknown factor {}", f.0)))
    }

    /// Variables with exactly one attachment.
    pub fn half_edges(&self) -> Vec<VariableId> {
        (0..self.variables.len())
            .filter(|&i| self.variables[i].ports.len() == 1)
            .map(VariableId)
            .collect()
    }

    fn check_box(&self, b: &BoxRegion) -> Result<()> {
        if let Some(f) = b.factors.iter().find(|f| f.0 >= self.factors.len()) {
            return Err(Error::Argument(format!(
                "box references unknown factor {}",
                f.0
            )));
        }
        Ok(())
    }

    /// `(boundary, internal)` variables of a box, each ascending.
    pub fn classify(&self, b: &BoxRegion) -> Result<(Vec<VariableId>, Vec<VariableId>)> {
        self.check_box(b)?;
        let mut boundary = Vec::new();
        let mut internal = Vec::new();
        for (i, var) in self.variables.iter().enumerate() {
            let inside = var.ports.iter().filter(|(f, _)| b.contains(*f)).count();
            if inside == 0 {
                continue;
            }
            if inside == 2 {
                internal.push(VariableId(i));
            } else {
                boundary.push(VariableId(i));
            }
        }
        Ok((boundary, internal))
    }

    pub fn boundary(&self, b: &BoxRegion) -> Result<Vec<VariableId>> {
        Ok(self.classify(b)?.0)
    }

    fn work_set(&self, b: &BoxRegion) -> Vec<Work> {
        b.factors
            .iter()
            .map(|f| {
                let fac = &self.factors[f.0];
                Work {
                    tensor: fac.tensor.clone(),
                    vars: fac.vars.iter().map(|v| v.0).collect(),
                }
            })
            .collect()
    }

    fn merged_size(&self, sets: &[&[usize]], drop: usize) -> u128 {
        let mut seen: Vec<usize> = Vec::new();
        let mut size: u128 = 1;
        for s in sets {
            for &v in s.iter() {
                if v != drop && !seen.contains(&v) {
                    seen.push(v);
                    size = size.saturating_mul(self.variables[v].size as u128);
                }
            }
        }
        size
    }

    /// Greedy elimination order over the internal variables of a box: at
    /// each step eliminate the variable whose merged result is smallest,
    /// ties broken by smallest id.
    pub fn elimination_order(&self, b: &BoxRegion) -> Result<Vec<VariableId>> {
        let (_, internal) = self.classify(b)?;
        let sets: Vec<Vec<usize>> = self.work_set(b).into_iter().map(|w| w.vars).collect();
        Ok(self.greedy_order(sets, internal.iter().map(|v| v.0).collect()))
    }

    fn greedy_order(
        &self,
        mut sets: Vec<Vec<usize>>,
        mut remaining: Vec<usize>,
    ) -> Vec<VariableId> {
        let mut order = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let mut best: Option<(u128, usize, usize)> = None;
            for (ri, &v) in remaining.iter().enumerate() {
                let touching: Vec<&[usize]> = sets
                    .iter()
                    .filter(|s| s.contains(&v))
                    .map(|s| s.as_slice())
                    .collect();
                let size = self.merged_size(&touching, v);
                let better = match best {
                    None => true,
                    Some((bs, _, bv)) => size < bs || (size == bs && v < bv),
                };
                if better {
                    best = Some((size, ri, v));
                }
            }
            let (_, ri, v) = best.unwrap();
            remaining.swap_remove(ri);
            let mut merged: Vec<usize> = Vec::new();
            sets.retain(|s| {
                if s.contains(&v) {
                    for &w in s {
                        if w != v && !merged.contains(&w) {
                            merged.push(w);
                        }
                    }
                    false
                } else {
                    true
                }
            });
            sets.push(merged);
            order.push(VariableId(v));
        }
        order
    }

    /// Contracts the work set, eliminating `order` in sequence and keeping
    /// `keep` (ascending) as output axes.
    fn eliminate(
        &self,
        mut work: Vec<Work>,
        order: &[usize],
        keep: &[usize],
    ) -> Result<ComplexTensor> {
        for &v in order {
            let (touching, rest): (Vec<Work>, Vec<Work>) =
                work.into_iter().partition(|w| w.vars.contains(&v));
            work = rest;
            let merged = self.merge(touching, Some(v))?;
            work.push(merged);
        }
        let mut all = self.merge(work, None)?;
        // Any kept variable appears exactly once by now.
        let out: Vec<usize> = keep.to_vec();
        if all.vars != out {
            all.tensor = einsum_single(&all.tensor, &all.vars, &out)?;
            all.vars = out;
        }
        all.tensor.with_labels(all.vars)
    }

    fn check_budget(&self, size: u128) -> Result<()> {
        if size > self.entry_budget {
            return Err(Error::Resource {
                what: "intermediate tensor",
                needed: size,
                budget: self.entry_budget,
            });
        }
        Ok(())
    }

    /// Multiplies tensors together, summing `drop` out at the end.
    fn merge(&self, mut ts: Vec<Work>, drop: Option<usize>) -> Result<Work> {
        let drop_label = drop.unwrap_or(usize::MAX);
        if ts.is_empty() {
            return Ok(Work {
                tensor: ComplexTensor::scalar(C64::new(1.0, 0.0)),
                vars: Vec::new(),
            });
        }
        // Smallest first keeps intermediates small for outer products.
        ts.sort_by_key(|w| w.tensor.len());
        let mut iter = ts.into_iter();
        let mut acc = iter.next().unwrap();
        let mut pending: Vec<Work> = iter.collect();
        if pending.is_empty() {
            let out: Vec<usize> = dedup(&acc.vars, drop_label);
            self.check_budget(self.merged_size(&[&acc.vars], drop_label))?;
            if out != acc.vars {
                acc.tensor = einsum_single(&acc.tensor, &acc.vars, &out)?;
                acc.vars = out;
            }
            return Ok(acc);
        }
        while !pending.is_empty() {
            let next = pending.remove(0);
            let last = pending.is_empty();
            let mut union = acc.vars.clone();
            union.extend_from_slice(&next.vars);
            let out = dedup(&union, if last { drop_label } else { usize::MAX });
            self.check_budget(self.merged_size(&[&out], usize::MAX))?;
            let t = einsum_pair(&acc.tensor, &acc.vars, &next.tensor, &next.vars, &out)?;
            acc = Work {
                tensor: t,
                vars: out,
            };
        }
        Ok(acc)
    }

    fn validate_order(&self, order: &[VariableId], internal: &[VariableId]) -> Result<()> {
        let mut sorted: Vec<VariableId> = order.to_vec();
        sorted.sort();
        if sorted != internal {
            return Err(Error::Argument(
                "elimination order must be a permutation of the box's internal variables".into(),
            ));
        }
        Ok(())
    }

    /// Exterior function of a box, with axes in ascending variable id (also
    /// recorded as the result's axis labels). `order`, if given, must list
    /// every internal variable exactly once.
    pub fn exterior_function(
        &self,
        b: &BoxRegion,
        order: Option<&[VariableId]>,
    ) -> Result<ComplexTensor> {
        let (boundary, internal) = self.classify(b)?;
        let order: Vec<VariableId> = match order {
            Some(o) => {
                self.validate_order(o, &internal)?;
                o.to_vec()
            }
            None => self.elimination_order(b)?,
        };
        let order: Vec<usize> = order.iter().map(|v| v.0).collect();
        let keep: Vec<usize> = boundary.iter().map(|v| v.0).collect();
        self.eliminate(self.work_set(b), &order, &keep)
    }

    /// Sum over every attached variable (half edges included) of the
    /// product of all factors.
    pub fn partition_sum(&self, order: Option<&[VariableId]>) -> Result<C64> {
        let b = BoxRegion::all(self);
        let attached: Vec<VariableId> = (0..self.variables.len())
            .filter(|&i| !self.variables[i].ports.is_empty())
            .map(VariableId)
            .collect();
        let order: Vec<VariableId> = match order {
            Some(o) => {
                self.validate_order(o, &attached)?;
                o.to_vec()
            }
            None => {
                let sets = self.work_set(&b).into_iter().map(|w| w.vars).collect();
                self.greedy_order(sets, attached.iter().map(|v| v.0).collect())
            }
        };
        let order: Vec<usize> = order.iter().map(|v| v.0).collect();
        self.eliminate(self.work_set(&b), &order, &[])?
            .scalar_value()
    }

    /// Exterior function by exhaustive enumeration of all internal
    /// configurations. Used as the reference for everything else.
    pub fn brute_force_exterior(&self, b: &BoxRegion) -> Result<ComplexTensor> {
        let (boundary, internal) = self.classify(b)?;
        self.enumerate(b, &boundary, &internal)
    }

    /// Partition sum by exhaustive enumeration.
    pub fn brute_force_partition_sum(&self) -> Result<C64> {
        let b = BoxRegion::all(self);
        let attached: Vec<VariableId> = (0..self.variables.len())
            .filter(|&i| !self.variables[i].ports.is_empty())
            .map(VariableId)
            .collect();
        self.enumerate(&b, &[], &attached)?.scalar_value()
    }

    fn enumerate(
        &self,
        b: &BoxRegion,
        boundary: &[VariableId],
        internal: &[VariableId],
    ) -> Result<ComplexTensor> {
        let count: u128 = internal
            .iter()
            .map(|v| self.variables[v.0].size as u128)
            .fold(1u128, |a, s| a.saturating_mul(s));
        if count > self.enumeration_guard {
            return Err(Error::Resource {
                what: "brute-force enumeration",
                needed: count,
                budget: self.enumeration_guard,
            });
        }
        let out_shape: Vec<usize> = boundary.iter().map(|v| self.variables[v.0].size).collect();
        let out_len: u128 = out_shape.iter().map(|&s| s as u128).product();
        self.check_budget(out_len)?;
        let mut out = ComplexTensor::zeros(out_shape)?.into_data();

        let all: Vec<VariableId> = boundary.iter().chain(internal).copied().collect();
        let dims: Vec<usize> = all.iter().map(|v| self.variables[v.0].size).collect();
        let mut assignment = vec![0usize; self.variables.len()];
        let mut idx = vec![0usize; all.len()];
        let inner: usize = internal.iter().map(|v| self.variables[v.0].size).product();
        let factors: Vec<&Factor> = b.factors.iter().map(|f| &self.factors[f.0]).collect();
        let mut flat = 0usize;
        let mut counter = 0usize;
        loop {
            for (k, v) in all.iter().enumerate() {
                assignment[v.0] = idx[k];
            }
            let mut prod = C64::new(1.0, 0.0);
            for fac in &factors {
                let mut off = 0;
                for (axis, v) in fac.vars.iter().enumerate() {
                    off = off * fac.tensor.shape()[axis] + assignment[v.0];
                }
                prod *= fac.tensor.data()[off];
                if prod.re == 0.0 && prod.im == 0.0 {
                    break;
                }
            }
            out[flat] += prod;
            counter += 1;
            if counter == inner {
                counter = 0;
                flat += 1;
            }
            // Odometer, last variable fastest.
            let mut k = all.len();
            loop {
                if k == 0 {
                    let labels = boundary.iter().map(|v| v.0).collect();
                    let shape = boundary.iter().map(|v| self.variables[v.0].size).collect();
                    return ComplexTensor::new(shape, out)?.with_labels(labels);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// Product of all factors at a full assignment (indexed by variable id).
    pub fn evaluate(&self, assignment: &[usize]) -> Result<C64> {
        if assignment.len() != self.variables.len() {
            return Err(Error::Dimension(format!(
                "assignment of length {} for {} variables",
                assignment.len(),
                self.variables.len()
            )));
        }
        for (i, (&a, var)) in assignment.iter().zip(&self.variables).enumerate() {
            if a >= var.size {
                return Err(Error::Argument(format!(
                    "value {a} out of range for variable {i} of size {}",
                    var.size
                )));
            }
        }
        let mut prod = C64::new(1.0, 0.0);
        for fac in &self.factors {
            let mut off = 0;
            for (axis, v) in fac.vars.iter().enumerate() {
                off = off * fac.tensor.shape()[axis] + assignment[v.0];
            }
            prod *= fac.tensor.data()[off];
        }
        Ok(prod)
    }

    /// Moves the second port of a degree-2 variable onto a fresh variable and
    /// returns it. Afterwards `v` has one free port and so does the new one.
    fn cut_edge(&mut self, v: VariableId) -> Result<VariableId> {
        let var = self
            .variables
            .get(v.0)
            .ok_or_else(|| Error::Argument(format!("unknown variable {}", v.0)))?;
        if var.ports.len() != 2 {
            return Err(Error::Structure(format!(
                "variable {} is not a full edge",
                v.0
            )));
        }
        let size = var.size;
        let (f, axis) = var.ports[1];
        let w = self.add_variable(size)?;
        self.variables[v.0].ports.pop();
        self.variables[w.0].ports.push((f, axis));
        let fac = &mut self.factors[f.0];
        fac.vars[axis] = w;
        let labels = fac.vars.iter().map(|x| x.0).collect();
        fac.tensor = fac.tensor.clone().with_labels(labels)?;
        Ok(w)
    }

    /// Returns a copy of the graph with `v` fixed to `value`.
    ///
    /// If `v` has a free port a one-hot factor is attached to it. Otherwise
    /// the edge is split by a degree-3 equality node whose third port
    /// carries the one-hot factor. Existing factor ids stay valid; the new
    /// factors are appended.
    pub fn clamp(&self, v: VariableId, value: usize) -> Result<FactorGraph> {
        let size = self.alphabet_size(v)?;
        let delta = ComplexTensor::one_hot(size, value)?;
        let mut g = self.clone();
        if g.degree(v)? < 2 {
            g.add_factor(delta, &[v])?;
        } else {
            let w = g.cut_edge(v)?;
            let t = g.add_variable(size)?;
            g.add_factor(gates::equality_tensor(3, size)?, &[v, w, t])?;
            g.add_factor(delta, &[t])?;
        }
        Ok(g)
    }

    /// Returns a copy with the matrix `m` inserted on the edge `v`: the
    /// factor at `v`'s first port keeps `v`, the factor at its second port
    /// is moved to a new variable `w`, and `m(v, w)` joins them. For the
    /// identity matrix every exterior function is unchanged.
    pub fn insert_on_edge(
        &self,
        v: VariableId,
        m: ComplexTensor,
    ) -> Result<(FactorGraph, VariableId)> {
        let mut g = self.clone();
        let w = g.cut_edge(v)?;
        g.add_factor(m, &[v, w])?;
        Ok((g, w))
    }
}

fn dedup(vars: &[usize], drop: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(vars.len());
    for &v in vars {
        if v != drop && !out.contains(&v) {
            out.push(v);
        }
    }
    out
}
