//! Dense complex tensors over finite alphabets.
//!
//! Data is stored row-major: the last axis varies fastest. A rank-0 tensor
//! holds exactly one value (a scalar).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Absolute/relative tolerance pair used by every approximate comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rel_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_eps: 1e-10,
            rel_eps: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, rel_eps: f64) -> Result<Self> {
        if !(abs_eps >= 0.0 && rel_eps >= 0.0) || !abs_eps.is_finite() || !rel_eps.is_finite() {
            return Err(Error::Argument(format!(
                "tolerances must be finite and nonnegative, got abs={abs_eps}, rel={rel_eps}"
            )));
        }
        Ok(Tolerance { abs_eps, rel_eps })
    }

    /// Absolute-only tolerance.
    pub fn abs(eps: f64) -> Self {
        Tolerance {
            abs_eps: eps,
            rel_eps: 0.0,
        }
    }

    /// Allowed deviation when comparing against something of magnitude
    /// `reference`: `abs_eps` up to magnitude 1, relative beyond.
    pub fn bound(&self, reference: f64) -> f64 {
        if reference > 1.0 {
            self.abs_eps.max(self.rel_eps * reference)
        } else {
            self.abs_eps
        }
    }

    /// Max-norm comparison of two same-shaped tensors; the reference
    /// magnitude is the larger max-norm of the two.
    pub fn close(&self, a: &ComplexTensor, b: &ComplexTensor) -> bool {
        if a.shape != b.shape {
            return false;
        }
        let reference = a.max_abs().max(b.max_abs());
        a.max_abs_diff(b) <= self.bound(reference)
    }

    pub fn close_scalar(&self, a: C64, b: C64) -> bool {
        let reference = a.norm().max(b.norm());
        (a - b).norm() <= self.bound(reference)
    }
}

/// Dense row-major complex tensor with optional per-axis variable labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensor {
    shape: Vec<usize>,
    axis_labels: Option<Vec<usize>>,
    data: Vec<C64>,
}

fn checked_len(shape: &[usize]) -> Result<usize> {
    let mut n: usize = 1;
    for &s in shape {
        if s == 0 {
            return Err(Error::Dimension("axis sizes must be at least 1".into()));
        }
        n = n
            .checked_mul(s)
            .ok_or_else(|| Error::Dimension("tensor size overflows usize".into()))?;
    }
    Ok(n)
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut st = vec![1usize; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        st[i] = st[i + 1] * shape[i + 1];
    }
    st
}

impl ComplexTensor {
    /// Builds a tensor, validating the length and that all values are finite.
    pub fn new(shape: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        let n = checked_len(&shape)?;
        if data.len() != n {
            return Err(Error::Dimension(format!(
                "data length {} does not match shape {:?} (expected {})",
                data.len(),
                shape,
                n
            )));
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Domain(format!(
                "non-finite value at flat index {pos}"
            )));
        }
        Ok(ComplexTensor {
            shape,
            axis_labels: None,
            data,
        })
    }

    /// Builds from real values.
    pub fn from_real(shape: Vec<usize>, data: &[f64]) -> Result<Self> {
        Self::new(shape, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn scalar(value: C64) -> Self {
        ComplexTensor {
            shape: Vec::new(),
            axis_labels: None,
            data: vec![value],
        }
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let n = checked_len(&shape)?;
        Ok(ComplexTensor {
            shape,
            axis_labels: None,
            data: vec![ZERO; n],
        })
    }

    /// `n x n` identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            data[i * n + i] = ONE;
        }
        ComplexTensor {
            shape: vec![n, n],
            axis_labels: None,
            data,
        }
    }

    /// Rank-1 one-hot vector of length `size` with a 1 at `value`.
    pub fn one_hot(size: usize, value: usize) -> Result<Self> {
        if value >= size {
            return Err(Error::Argument(format!(
                "value {value} out of range for alphabet of size {size}"
            )));
        }
        let mut t = Self::zeros(vec![size])?;
        t.data[value] = ONE;
        Ok(t)
    }

    /// Diagonal matrix from real entries.
    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut data = vec![ZERO; n * n];
        for (i, &v) in values.iter().enumerate() {
            data[i * n + i] = C64::new(v, 0.0);
        }
        ComplexTensor {
            shape: vec![n, n],
            axis_labels: None,
            data,
        }
    }

    /// Outer product `v w^H` of two vectors given as slices.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        let mut data = Vec::with_capacity(v.len() * w.len());
        for a in v {
            for b in w {
                data.push(a * b.conj());
            }
        }
        ComplexTensor {
            shape: vec![v.len(), w.len()],
            axis_labels: None,
            data,
        }
    }

    /// Attaches per-axis labels.
    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.shape.len() {
            return Err(Error::Dimension(format!(
                "{} labels for a rank-{} tensor",
                labels.len(),
                self.shape.len()
            )));
        }
        self.axis_labels = Some(labels);
        Ok(self)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn axis_labels(&self) -> Option<&[usize]> {
        self.axis_labels.as_deref()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// The value of a rank-0 tensor (or the single entry of any size-1 tensor).
    pub fn scalar_value(&self) -> Result<C64> {
        if self.data.len() == 1 {
            Ok(self.data[0])
        } else {
            Err(Error::Dimension(format!(
                "expected a scalar, got shape {:?}",
                self.shape
            )))
        }
    }

    fn flat_index(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.shape.len() {
            return Err(Error::Argument(format!(
                "index of rank {} for tensor of rank {}",
                index.len(),
                self.shape.len()
            )));
        }
        let mut flat = 0;
        for (&i, &s) in index.iter().zip(&self.shape) {
            if i >= s {
                return Err(Error::Argument(format!(
                    "index {i} out of range for axis of size {s}"
                )));
            }
            flat = flat * s + i;
        }
        Ok(flat)
    }

    pub fn get(&self, index: &[usize]) -> Result<C64> {
        Ok(self.data[self.flat_index(index)?])
    }

    pub fn set(&mut self, index: &[usize], value: C64) -> Result<()> {
        let i = self.flat_index(index)?;
        self.data[i] = value;
        Ok(())
    }

    /// `(rows, cols)` of a rank-2 tensor.
    pub fn matrix_dims(&self) -> Result<(usize, usize)> {
        if self.shape.len() != 2 {
            return Err(Error::Dimension(format!(
                "expected a matrix, got rank {}",
                self.shape.len()
            )));
        }
        Ok((self.shape[0], self.shape[1]))
    }

    /// Side length of a square matrix.
    pub fn square_dim(&self) -> Result<usize> {
        let (r, c) = self.matrix_dims()?;
        if r != c {
            return Err(Error::Dimension(format!(
                "expected a square matrix, got {r}x{c}"
            )));
        }
        Ok(r)
    }

    /// Same data under a new shape with the same number of entries. Labels
    /// are dropped.
    pub fn reshape(&self, shape: Vec<usize>) -> Result<Self> {
        if checked_len(&shape)? != self.data.len() {
            return Err(Error::Dimension(format!(
                "cannot reshape {:?} into {:?}",
                self.shape, shape
            )));
        }
        Ok(ComplexTensor {
            shape,
            axis_labels: None,
            data: self.data.clone(),
        })
    }

    /// Axis permutation: output axis `i` is input axis `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let r = self.rank();
        if perm.len() != r {
            return Err(Error::Argument(format!(
                "permutation of length {} for rank {r}",
                perm.len()
            )));
        }
        let mut seen = vec![false; r];
        for &p in perm {
            if p >= r || seen[p] {
                return Err(Error::Argument(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let labels: Vec<usize> = perm.to_vec();
        let out_labels: Vec<usize> = (0..r).collect();
        let mut out = einsum_single(self, &labels_from_perm(&labels), &out_labels)?;
        out.axis_labels = self
            .axis_labels
            .as_ref()
            .map(|l| perm.iter().map(|&p| l[p]).collect());
        Ok(out)
    }

    /// Fixes axis `axis` to `value`, dropping that axis.
    pub fn slice_axis(&self, axis: usize, value: usize) -> Result<Self> {
        if axis >= self.rank() {
            return Err(Error::Argument(format!("axis {axis} out of range")));
        }
        if value >= self.shape[axis] {
            return Err(Error::Argument(format!(
                "value {value} out of range for axis of size {}",
                self.shape[axis]
            )));
        }
        let st = strides(&self.shape);
        let mut shape = self.shape.clone();
        shape.remove(axis);
        let n = checked_len(&shape)?;
        let outer: usize = self.shape[..axis].iter().product();
        let inner = st[axis];
        let mut data = Vec::with_capacity(n);
        for o in 0..outer {
            let base = o * self.shape[axis] * inner + value * inner;
            data.extend_from_slice(&self.data[base..base + inner]);
        }
        let axis_labels = self.axis_labels.as_ref().map(|l| {
            let mut l = l.clone();
            l.remove(axis);
            l
        });
        Ok(ComplexTensor {
            shape,
            axis_labels,
            data,
        })
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ComplexTensor {
            shape: self.shape.clone(),
            axis_labels: self.axis_labels.clone(),
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|z| z * c)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::Dimension(format!(
                "shape mismatch {:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(ComplexTensor {
            shape: self.shape.clone(),
            axis_labels: self.axis_labels.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Entry-wise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Max-norm of the difference. Shapes must agree; mismatched shapes give
    /// `f64::INFINITY`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.shape != other.shape {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

fn labels_from_perm(perm: &[usize]) -> Vec<usize> {
    // Input axis `perm[i]` becomes output axis `i`: label input axes by their
    // output position.
    let mut labels = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        labels[p] = i;
    }
    labels
}

/// Generalized pairwise einsum on integer labels.
///
/// Each axis of `a` and `b` carries a label; repeated labels (within or
/// across operands) are identified, and labels absent from `out` are summed.
/// Every label in `out` must occur in an input, and `out` may not repeat a
/// label. Cost is the product of the sizes of all distinct labels.
pub fn einsum_pair(
    a: &ComplexTensor,
    la: &[usize],
    b: &ComplexTensor,
    lb: &[usize],
    out: &[usize],
) -> Result<ComplexTensor> {
    if la.len() != a.rank() || lb.len() != b.rank() {
        return Err(Error::Argument(
            "label count does not match tensor rank".into(),
        ));
    }
    // Distinct labels with sizes.
    let mut labels: Vec<usize> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for (&l, &s) in la.iter().zip(a.shape()).chain(lb.iter().zip(b.shape())) {
        match labels.iter().position(|&x| x == l) {
            Some(p) => {
                if sizes[p] != s {
                    return Err(Error::Dimension(format!(
                        "label {l} has sizes {} and {s}",
                        sizes[p]
                    )));
                }
            }
            None => {
                labels.push(l);
                sizes.push(s);
            }
        }
    }
    let mut out_shape = Vec::with_capacity(out.len());
    for (i, &l) in out.iter().enumerate() {
        if out[..i].contains(&l) {
            return Err(Error::Argument(format!("output label {l} repeated")));
        }
        match labels.iter().position(|&x| x == l) {
            Some(p) => out_shape.push(sizes[p]),
            None => return Err(Error::Argument(format!("output label {l} not in inputs"))),
        }
    }
    // Loop order: output labels first (outermost), then summed labels. This
    // keeps writes to `out` sequential.
    let mut order: Vec<usize> = out
        .iter()
        .map(|l| labels.iter().position(|x| x == l).unwrap())
        .collect();
    for p in 0..labels.len() {
        if !order.contains(&p) {
            order.push(p);
        }
    }
    let stride_for = |ls: &[usize], shape: &[usize]| -> Vec<usize> {
        let st = strides(shape);
        order
            .iter()
            .map(|&p| {
                ls.iter()
                    .zip(&st)
                    .filter(|(&l, _)| l == labels[p])
                    .map(|(_, &s)| s)
                    .sum()
            })
            .collect()
    };
    let sa = stride_for(la, a.shape());
    let sb = stride_for(lb, b.shape());
    let out_st = strides(&out_shape);
    let so: Vec<usize> = order
        .iter()
        .map(|&p| match out.iter().position(|&l| l == labels[p]) {
            Some(i) => out_st[i],
            None => 0,
        })
        .collect();
    let dims: Vec<usize> = order.iter().map(|&p| sizes[p]).collect();

    let mut result = vec![ZERO; checked_len(&out_shape)?];
    let total: u128 = dims.iter().map(|&d| d as u128).product();
    if total == 0 {
        return ComplexTensor::new(out_shape, result);
    }
    let ad = a.data();
    let bd = b.data();
    let r = dims.len();
    let mut idx = vec![0usize; r];
    let (mut oa, mut ob, mut oo) = (0usize, 0usize, 0usize);
    // Innermost loop unrolled over the last label.
    let (last_dim, last_sa, last_sb, last_so) = if r > 0 {
        (dims[r - 1], sa[r - 1], sb[r - 1], so[r - 1])
    } else {
        (1, 0, 0, 0)
    };
    loop {
        let (mut ia, mut ib, mut io) = (oa, ob, oo);
        for _ in 0..last_dim {
            result[io] += ad[ia] * bd[ib];
            ia += last_sa;
            ib += last_sb;
            io += last_so;
        }
        // Odometer over the remaining labels.
        let mut k = r.saturating_sub(1);
        loop {
            if k == 0 {
                return ComplexTensor::new(out_shape, result);
            }
            k -= 1;
            idx[k] += 1;
            oa += sa[k];
            ob += sb[k];
            oo += so[k];
            if idx[k] < dims[k] {
                break;
            }
            oa -= sa[k] * dims[k];
            ob -= sb[k] * dims[k];
            oo -= so[k] * dims[k];
            idx[k] = 0;
        }
    }
}

/// Single-operand einsum (transpose, diagonal extraction, summation).
pub fn einsum_single(a: &ComplexTensor, la: &[usize], out: &[usize]) -> Result<ComplexTensor> {
    einsum_pair(a, la, &ComplexTensor::scalar(ONE), &[], out)
}

/// Contracts `a` and `b` over the listed axis pairs. The result carries the
/// remaining axes of `a` followed by the remaining axes of `b`.
pub fn contract(
    a: &ComplexTensor,
    b: &ComplexTensor,
    pairs: &[(usize, usize)],
) -> Result<ComplexTensor> {
    let ra = a.rank();
    let rb = b.rank();
    let mut used_a = vec![false; ra];
    let mut used_b = vec![false; rb];
    let la: Vec<usize> = (0..ra).collect();
    let mut lb: Vec<usize> = (ra..ra + rb).collect();
    for &(i, j) in pairs {
        if i >= ra || j >= rb {
            return Err(Error::Argument(format!(
                "axis pair ({i}, {j}) out of range"
            )));
        }
        if used_a[i] || used_b[j] {
            return Err(Error::Argument(format!(
                "axis pair ({i}, {j}) reuses an axis"
            )));
        }
        if a.shape[i] != b.shape[j] {
            return Err(Error::Dimension(format!(
                "paired axes ({i}, {j}) have sizes {} and {}",
                a.shape[i], b.shape[j]
            )));
        }
        used_a[i] = true;
        used_b[j] = true;
        lb[j] = i;
    }
    let out: Vec<usize> = (0..ra)
        .filter(|&i| !used_a[i])
        .chain((0..rb).filter(|&j| !used_b[j]).map(|j| ra + j))
        .collect();
    einsum_pair(a, &la, b, &lb, &out)
}

/// Sums out the listed axes.
pub fn sum_out(t: &ComplexTensor, axes: &[usize]) -> Result<ComplexTensor> {
    let r = t.rank();
    for (i, &ax) in axes.iter().enumerate() {
        if ax >= r {
            return Err(Error::Argument(format!(
                "axis {ax} out of range for rank {r}"
            )));
        }
        if axes[..i].contains(&ax) {
            return Err(Error::Argument(format!("axis {ax} listed twice")));
        }
    }
    let la: Vec<usize> = (0..r).collect();
    let out: Vec<usize> = (0..r).filter(|i| !axes.contains(i)).collect();
    let mut res = einsum_single(t, &la, &out)?;
    if let Some(l) = &t.axis_labels {
        res.axis_labels = Some(out.iter().map(|&i| l[i]).collect());
    }
    Ok(res)
}

/// Sum of the diagonal of a square matrix.
pub fn trace(t: &ComplexTensor) -> Result<C64> {
    let n = t.square_dim()?;
    Ok((0..n).map(|i| t.data[i * n + i]).sum())
}

/// General outer product: axes of `a` followed by axes of `b`.
pub fn tensor_product(a: &ComplexTensor, b: &ComplexTensor) -> ComplexTensor {
    let mut shape = a.shape.clone();
    shape.extend_from_slice(&b.shape);
    let mut data = Vec::with_capacity(a.data.len() * b.data.len());
    for x in &a.data {
        for y in &b.data {
            data.push(x * y);
        }
    }
    ComplexTensor {
        shape,
        axis_labels: None,
        data,
    }
}

/// Kronecker product of two matrices, flattened so that rows are indexed by
/// `(row_a, row_b)` and columns by `(col_a, col_b)`, `a` major.
pub fn kron(a: &ComplexTensor, b: &ComplexTensor) -> Result<ComplexTensor> {
    let (ra, ca) = a.matrix_dims()?;
    let (rb, cb) = b.matrix_dims()?;
    // tensor_product axes are (ra, ca, rb, cb); regroup to (ra, rb, ca, cb).
    let t = tensor_product(a, b).permute(&[0, 2, 1, 3])?;
    t.reshape(vec![ra * rb, ca * cb])
}

/// Matrix product of two rank-2 tensors.
pub fn matmul(a: &ComplexTensor, b: &ComplexTensor) -> Result<ComplexTensor> {
    let (r, k) = a.matrix_dims()?;
    let (k2, c) = b.matrix_dims()?;
    if k != k2 {
        return Err(Error::Dimension(format!(
            "cannot multiply {r}x{k} by {k2}x{c}"
        )));
    }
    ComplexTensor::new(vec![r, c], linalg::matmul(r, k, c, &a.data, &b.data))
}

/// Product of a chain of matrices, left to right.
pub fn matmul_chain(ms: &[&ComplexTensor]) -> Result<ComplexTensor> {
    let (first, rest) = ms
        .split_first()
        .ok_or_else(|| Error::Argument("empty matrix chain".into()))?;
    let mut acc = (*first).clone();
    for m in rest {
        acc = matmul(&acc, m)?;
    }
    Ok(acc)
}

/// Entry-wise complex conjugate.
pub fn conj(t: &ComplexTensor) -> ComplexTensor {
    t.conj()
}

/// Hermitian transpose of a matrix.
pub fn conj_transpose(m: &ComplexTensor) -> Result<ComplexTensor> {
    let (r, c) = m.matrix_dims()?;
    ComplexTensor::new(vec![c, r], linalg::adjoint(r, c, &m.data))
}

fn identity_deviation(m: &ComplexTensor) -> f64 {
    let n = m.shape[0];
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            dev = dev.max((m.data[i * n + j] - target).norm());
        }
    }
    dev
}

/// `max |M^H M - I| <= tol`.
pub fn is_unitary(m: &ComplexTensor, tol: Tolerance) -> Result<bool> {
    let n = m.square_dim()?;
    let mhm = linalg::matmul_square(n, &linalg::adjoint(n, n, &m.data), &m.data);
    let prod = ComplexTensor::new(vec![n, n], mhm)?;
    Ok(identity_deviation(&prod) <= tol.bound(1.0))
}

/// `max |M - M^H| <= tol`, relative when entries exceed 1.
pub fn is_hermitian(m: &ComplexTensor, tol: Tolerance) -> Result<bool> {
    let n = m.square_dim()?;
    let bound = tol.bound(m.max_abs());
    for i in 0..n {
        for j in i..n {
            if (m.data[i * n + j] - m.data[j * n + i].conj()).norm() > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Hermitian with smallest eigenvalue `>= -tol`.
pub fn is_psd(m: &ComplexTensor, tol: Tolerance) -> Result<bool> {
    if !is_hermitian(m, tol)? {
        return Ok(false);
    }
    let n = m.square_dim()?;
    let (values, _) = linalg::hermitian_eigen(n, &m.data);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(n == 0 || min >= -tol.bound(m.max_abs()))
}

/// Whether `b = c * a` for some complex `c`.
///
/// Both tensors are scaled to unit Frobenius norm and rotated so that a
/// common pivot entry is real and positive; the pivot is the first entry of
/// `a` whose magnitude is within `abs_eps` of the largest. A tensor with
/// norm at most `abs_eps` counts as zero, and zero is only projectively
/// equal to zero.
pub fn projective_equal(a: &ComplexTensor, b: &ComplexTensor, tol: Tolerance) -> Result<bool> {
    if a.shape != b.shape {
        return Err(Error::Dimension(format!(
            "shape mismatch {:?} vs {:?}",
            a.shape, b.shape
        )));
    }
    let na = a.frobenius_norm();
    let nb = b.frobenius_norm();
    let za = na <= tol.abs_eps;
    let zb = nb <= tol.abs_eps;
    if za || zb {
        return Ok(za && zb);
    }
    let an = a.scale(C64::new(1.0 / na, 0.0));
    let bn = b.scale(C64::new(1.0 / nb, 0.0));
    let max = an.max_abs();
    let pivot = an
        .data
        .iter()
        .position(|z| z.norm() >= max - tol.abs_eps)
        .unwrap_or(0);
    let pa = an.data[pivot];
    let pb = bn.data[pivot];
    if pb.norm() <= tol.abs_eps {
        return Ok(false);
    }
    let ra = an.scale(pa.conj() / pa.norm());
    let rb = bn.scale(pb.conj() / pb.norm());
    Ok(ra.max_abs_diff(&rb) <= tol.abs_eps)
}

/// Hermitian eigendecomposition `A = U diag(lambda) U^H` with eigenvalues
/// sorted in descending order.
pub fn spectral_decompose(h: &ComplexTensor, tol: Tolerance) -> Result<(ComplexTensor, Vec<f64>)> {
    let n = h.square_dim()?;
    if !is_hermitian(h, tol)? {
        return Err(Error::Domain(
            "spectral_decompose needs a Hermitian matrix".into(),
        ));
    }
    let (values, vecs) = linalg::hermitian_eigen(n, &h.data);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let mut u = vec![ZERO; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            u[row * n + new_col] = vecs[row * n + old_col];
        }
    }
    let lambda = order.iter().map(|&i| values[i]).collect();
    Ok((ComplexTensor::new(vec![n, n], u)?, lambda))
}

/// Column `j` of a matrix.
pub fn column(m: &ComplexTensor, j: usize) -> Result<Vec<C64>> {
    let (r, c) = m.matrix_dims()?;
    if j >= c {
        return Err(Error::Argument(format!("column {j} out of range")));
    }
    Ok((0..r).map(|i| m.data[i * c + j]).collect())
}
