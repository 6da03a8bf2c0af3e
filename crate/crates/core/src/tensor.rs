//! Dense k-order tensors and the multilinear primitives everything else is
//! built on.
//!
//! Storage is a flat `Vec<f64>` in last-index-fastest (row-major) order over
//! 0-based multi-indices. An order-0 tensor holds a single scalar; it only
//! appears as the result of fixing every mode or as a scalar operand of the
//! outer product.

use std::collections::BTreeSet;

use itertools::Itertools;
use nalgebra::DMatrix;

use crate::error::{KronError, Result};

/// A 0-based multi-index, one entry per mode.
pub type MultiIndex = Vec<usize>;

/// Absolute tolerance used by [`DenseTensor::structure_check`] callers that
/// have no better choice.
pub const DEFAULT_STRUCTURE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StructureKind {
    Diagonal,
    Supersymmetric,
    UpperTriangular,
    LowerTriangular,
    Stochastic,
}

impl StructureKind {
    pub const ALL: [StructureKind; 5] = [
        StructureKind::Diagonal,
        StructureKind::Supersymmetric,
        StructureKind::UpperTriangular,
        StructureKind::LowerTriangular,
        StructureKind::Stochastic,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub frobenius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

/// Row-major flat offset of `index` in a tensor of shape `dims`.
pub fn ravel(dims: &[usize], index: &[usize]) -> Result<usize> {
    if index.len() != dims.len() || index.iter().zip(dims).any(|(i, n)| i >= n) {
        return Err(KronError::IndexOutOfRange {
            index: index.to_vec(),
            dims: dims.to_vec(),
        });
    }
    Ok(index.iter().zip(dims).fold(0, |acc, (i, n)| acc * n + i))
}

/// Inverse of [`ravel`].
pub fn unravel(dims: &[usize], mut flat: usize) -> MultiIndex {
    let mut index = vec![0; dims.len()];
    for p in (0..dims.len()).rev() {
        index[p] = flat % dims[p];
        flat /= dims[p];
    }
    index
}

/// Advances `index` to the next multi-index in last-index-fastest order.
/// Returns false after wrapping past the final index.
pub fn next_index(dims: &[usize], index: &mut [usize]) -> bool {
    for p in (0..dims.len()).rev() {
        index[p] += 1;
        if index[p] < dims[p] {
            return true;
        }
        index[p] = 0;
    }
    false
}

/// Iterates all multi-indices of `dims` in storage order.
pub fn indices(dims: &[usize]) -> impl Iterator<Item = MultiIndex> + '_ {
    let total: usize = dims.iter().product();
    (0..total).map(move |flat| unravel(dims, flat))
}

fn split_at_mode(dims: &[usize], p: usize) -> (usize, usize, usize) {
    let pre = dims[..p].iter().product();
    let post = dims[p + 1..].iter().product();
    (pre, dims[p], post)
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(KronError::Shape(format!("zero-length dimension in {dims:?}")));
        }
        let len: usize = dims.iter().product();
        if data.len() != len {
            return Err(KronError::Shape(format!(
                "dims {dims:?} need {len} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: &[usize]) -> Self {
        assert!(dims.iter().all(|&n| n > 0), "zero-length dimension");
        Self {
            dims: dims.to_vec(),
            data: vec![0.0; dims.iter().product()],
        }
    }

    pub fn filled(dims: &[usize], value: f64) -> Self {
        let mut t = Self::zeros(dims);
        t.data.fill(value);
        t
    }

    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(dims);
        let mut index = vec![0; dims.len()];
        for v in t.data.iter_mut() {
            *v = f(&index);
            next_index(dims, &mut index);
        }
        t
    }

    pub fn scalar(value: f64) -> Self {
        Self {
            dims: Vec::new(),
            data: vec![value],
        }
    }

    pub fn from_vector(v: &[f64]) -> Self {
        assert!(!v.is_empty(), "empty vector");
        Self {
            dims: vec![v.len()],
            data: v.to_vec(),
        }
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self::from_fn(&[m.nrows(), m.ncols()], |ix| m[(ix[0], ix[1])])
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.order() != 2 {
            return Err(KronError::Shape(format!("expected order 2, got {:?}", self.dims)));
        }
        Ok(DMatrix::from_row_slice(self.dims[0], self.dims[1], &self.data))
    }

    /// Diagonal cubical tensor with `diag` on the superdiagonal.
    pub fn diagonal(order: usize, diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(&vec![n; order], |ix| {
            if ix.iter().all(|&i| i == ix[0]) {
                diag[ix[0]]
            } else {
                0.0
            }
        })
    }

    /// `u ∘ u ∘ … ∘ u` with `order` factors.
    pub fn symmetric_rank_one(u: &[f64], order: usize) -> Self {
        Self::from_fn(&vec![u.len(); order], |ix| ix.iter().map(|&i| u[i]).product())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Common dimension if every mode has the same size.
    pub fn cubical_dim(&self) -> Option<usize> {
        let n = *self.dims.first()?;
        self.dims.iter().all(|&d| d == n).then_some(n)
    }

    fn require_cubical(&self) -> Result<usize> {
        self.cubical_dim()
            .ok_or_else(|| KronError::Shape(format!("expected a cubical tensor, got dims {:?}", self.dims)))
    }

    pub fn get(&self, index: &[usize]) -> Result<f64> {
        Ok(self.data[ravel(&self.dims, index)?])
    }

    /// Entry at `index`; panics when out of range.
    pub fn at(&self, index: &[usize]) -> f64 {
        self.data[ravel(&self.dims, index).expect("index out of range")]
    }

    pub fn set(&mut self, index: &[usize], value: f64) -> Result<()> {
        let k = ravel(&self.dims, index)?;
        self.data[k] = value;
        Ok(())
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            data: self.data.iter().map(|v| alpha * v).collect(),
        }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(KronError::Shape(format!(
                "dims differ: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            dims: self.dims.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            dims: self.dims.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: f64, other: &Self) -> Result<()> {
        self.same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn norms(&self) -> Norms {
        Norms {
            l1: self.l1_norm(),
            frobenius: self.frobenius_norm(),
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    /// Outer product; the result has order `k1 + k2`.
    pub fn outer(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut data = Vec::with_capacity(self.len() * other.len());
        for &a in &self.data {
            data.extend(other.data.iter().map(|b| a * b));
        }
        Self { dims, data }
    }

    /// `T ×_p M` for an `r × n_p` matrix `M`.
    pub fn mode_product(&self, m: &DMatrix<f64>, p: usize) -> Result<Self> {
        if p >= self.order() {
            return Err(KronError::Shape(format!("mode {p} out of range for order {}", self.order())));
        }
        if m.ncols() != self.dims[p] {
            return Err(KronError::Shape(format!(
                "matrix has {} columns but mode {p} has size {}",
                m.ncols(),
                self.dims[p]
            )));
        }
        let (pre, np, post) = split_at_mode(&self.dims, p);
        let r = m.nrows();
        let mut dims = self.dims.clone();
        dims[p] = r;
        if r == 0 {
            return Err(KronError::Shape("matrix has no rows".into()));
        }
        let mut out = vec![0.0; pre * r * post];
        for a in 0..pre {
            for j in 0..np {
                let src = &self.data[(a * np + j) * post..(a * np + j + 1) * post];
                for i in 0..r {
                    let mij = m[(i, j)];
                    if mij == 0.0 {
                        continue;
                    }
                    let dst = &mut out[(a * r + i) * post..(a * r + i + 1) * post];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += mij * s;
                    }
                }
            }
        }
        Ok(Self { dims, data: out })
    }

    /// Contracts the trailing mode with `x`, dropping it.
    fn contract_last(data: &[f64], x: &[f64]) -> Vec<f64> {
        data.chunks_exact(x.len())
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `T x^{k-1}`: contracts modes 2..k with `x`, leaving a vector indexed by mode 1.
    pub fn apply_polynomial(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.require_cubical()?;
        if x.len() != n {
            return Err(KronError::Shape(format!("vector length {} but tensor dimension {n}", x.len())));
        }
        let mut cur = self.data.clone();
        for _ in 1..self.order() {
            cur = Self::contract_last(&cur, x);
        }
        Ok(cur)
    }

    /// `T x^k`, the homogeneous polynomial value.
    pub fn polynomial_value(&self, x: &[f64]) -> Result<f64> {
        let y = self.apply_polynomial(x)?;
        Ok(y.iter().zip(x).map(|(a, b)| a * b).sum())
    }

    /// `T x^{k-2}` as an `n × n` matrix.
    pub fn apply_polynomial_matrix(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.require_cubical()?;
        if self.order() < 2 {
            return Err(KronError::Shape("order must be at least 2".into()));
        }
        if x.len() != n {
            return Err(KronError::Shape(format!("vector length {} but tensor dimension {n}", x.len())));
        }
        let mut cur = self.data.clone();
        for _ in 2..self.order() {
            cur = Self::contract_last(&cur, x);
        }
        Ok(DMatrix::from_row_slice(n, n, &cur))
    }

    /// Einstein product of an order-2k tensor with interleaved dims
    /// `n1, m1, …, nk, mk` and an order-k tensor with dims `m1, …, mk`.
    pub fn einstein_product(&self, x: &Self) -> Result<Self> {
        let k = x.order();
        if self.order() != 2 * k || k == 0 {
            return Err(KronError::Shape(format!(
                "Einstein product needs order {} for a tensor of order {k}, got {}",
                2 * k,
                self.order()
            )));
        }
        for q in 0..k {
            if self.dims[2 * q + 1] != x.dims[q] {
                return Err(KronError::Shape(format!(
                    "mode {} has size {} but operand mode {q} has size {}",
                    2 * q + 1,
                    self.dims[2 * q + 1],
                    x.dims[q]
                )));
            }
        }
        let out_dims: Vec<usize> = (0..k).map(|q| self.dims[2 * q]).collect();
        let mut out = Self::zeros(&out_dims);
        let out_strides = strides(&out_dims);
        let x_strides = strides(&x.dims);
        let mut index = vec![0; 2 * k];
        for &t in &self.data {
            if t != 0.0 {
                let mut o = 0;
                let mut xi = 0;
                for q in 0..k {
                    o += index[2 * q] * out_strides[q];
                    xi += index[2 * q + 1] * x_strides[q];
                }
                out.data[o] += t * x.data[xi];
            }
            next_index(&self.dims, &mut index);
        }
        Ok(out)
    }

    /// Copies the sub-tensor obtained by fixing the given `(mode, index)` pairs.
    /// Free modes keep their relative order.
    pub fn subview(&self, fixed: &[(usize, usize)]) -> Result<Self> {
        let mut fixed_at: Vec<Option<usize>> = vec![None; self.order()];
        for &(mode, idx) in fixed {
            if mode >= self.order() {
                return Err(KronError::Shape(format!("mode {mode} out of range for order {}", self.order())));
            }
            if fixed_at[mode].is_some() {
                return Err(KronError::Shape(format!("mode {mode} fixed twice")));
            }
            if idx >= self.dims[mode] {
                return Err(KronError::IndexOutOfRange {
                    index: vec![idx],
                    dims: vec![self.dims[mode]],
                });
            }
            fixed_at[mode] = Some(idx);
        }
        let free: Vec<usize> = (0..self.order()).filter(|&p| fixed_at[p].is_none()).collect();
        let out_dims: Vec<usize> = free.iter().map(|&p| self.dims[p]).collect();
        let mut full: Vec<usize> = fixed_at.iter().map(|f| f.unwrap_or(0)).collect();
        let total: usize = out_dims.iter().product();
        let mut data = Vec::with_capacity(total);
        let mut sub = vec![0; out_dims.len()];
        for _ in 0..total {
            for (q, &p) in free.iter().enumerate() {
                full[p] = sub[q];
            }
            data.push(self.data[ravel(&self.dims, &full)?]);
            next_index(&out_dims, &mut sub);
        }
        Ok(Self { dims: out_dims, data })
    }

    /// Mode-`p` unfolding: an `n_p × ∏_{q≠p} n_q` matrix whose column index
    /// runs last-index-fastest over the remaining modes in ascending order.
    pub fn unfold(&self, p: usize) -> Result<DMatrix<f64>> {
        if p >= self.order() {
            return Err(KronError::Shape(format!("mode {p} out of range for order {}", self.order())));
        }
        let (pre, np, post) = split_at_mode(&self.dims, p);
        let mut m = DMatrix::zeros(np, pre * post);
        for a in 0..pre {
            for i in 0..np {
                let src = &self.data[(a * np + i) * post..(a * np + i + 1) * post];
                for (b, &v) in src.iter().enumerate() {
                    m[(i, a * post + b)] = v;
                }
            }
        }
        Ok(m)
    }

    /// Inverse of [`DenseTensor::unfold`].
    pub fn fold(m: &DMatrix<f64>, p: usize, dims: &[usize]) -> Result<Self> {
        if p >= dims.len() {
            return Err(KronError::Shape(format!("mode {p} out of range for order {}", dims.len())));
        }
        let (pre, np, post) = split_at_mode(dims, p);
        if m.nrows() != np || m.ncols() != pre * post {
            return Err(KronError::Shape(format!(
                "{}x{} matrix cannot fold into {dims:?} along mode {p}",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut t = Self::zeros(dims);
        for a in 0..pre {
            for i in 0..np {
                for b in 0..post {
                    t.data[(a * np + i) * post + b] = m[(i, a * post + b)];
                }
            }
        }
        Ok(t)
    }

    /// Reorders modes so that result mode `q` is source mode `perm[q]`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Self> {
        let k = self.order();
        let valid = perm.len() == k && perm.iter().copied().collect::<BTreeSet<_>>() == (0..k).collect();
        if !valid {
            return Err(KronError::Shape(format!("{perm:?} is not a permutation of 0..{k}")));
        }
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let src_strides = strides(&self.dims);
        let mut src = vec![0; k];
        Ok(Self::from_fn(&dims, |ix| {
            for (q, &p) in perm.iter().enumerate() {
                src[p] = ix[q];
            }
            let off: usize = src.iter().zip(&src_strides).map(|(i, s)| i * s).sum();
            self.data[off]
        }))
    }

    /// True iff the tensor has the requested structure within absolute tolerance `tol`.
    pub fn structure_check(&self, kind: StructureKind, tol: f64) -> Result<bool> {
        use StructureKind::*;
        if matches!(kind, Diagonal | Supersymmetric | UpperTriangular | LowerTriangular) {
            self.require_cubical()?;
        }
        let mut index = vec![0; self.order()];
        let ok = match kind {
            Diagonal => self.data.iter().all(|&v| {
                let on_diag = index.iter().all(|&i| i == index[0]);
                next_index(&self.dims, &mut index);
                on_diag || v.abs() <= tol
            }),
            Supersymmetric => self.data.iter().all(|&v| {
                let mut sorted = index.clone();
                sorted.sort_unstable();
                let w = self.at(&sorted);
                next_index(&self.dims, &mut index);
                (v - w).abs() <= tol
            }),
            UpperTriangular | LowerTriangular => self.data.iter().all(|&v| {
                let monotone = if kind == UpperTriangular {
                    index.windows(2).all(|w| w[0] <= w[1])
                } else {
                    index.windows(2).all(|w| w[0] >= w[1])
                };
                next_index(&self.dims, &mut index);
                monotone || v.abs() <= tol
            }),
            Stochastic => {
                if self.data.iter().any(|&v| v < -tol) {
                    return Ok(false);
                }
                let sums = self.unfold(0)?.column_sum();
                sums.iter().all(|s| (s - 1.0).abs() <= tol)
            }
        };
        Ok(ok)
    }

    /// Average over all `k!` index permutations.
    pub fn symmetrize(&self) -> Result<Self> {
        let n = self.require_cubical()?;
        let k = self.order();
        let dims = vec![n; k];
        let mut out = Self::zeros(&dims);
        let mut index = vec![0; k];
        loop {
            if index.windows(2).all(|w| w[0] <= w[1]) {
                let orbit: BTreeSet<Vec<usize>> = index.iter().copied().permutations(k).collect();
                let values: Vec<f64> = orbit.iter().map(|ix| self.at(ix)).collect();
                let v = if values.iter().all(|&v| v == values[0]) {
                    values[0]
                } else {
                    values.iter().sum::<f64>() / values.len() as f64
                };
                for ix in &orbit {
                    out.set(ix, v)?;
                }
            }
            if !next_index(&dims, &mut index) {
                break;
            }
        }
        Ok(out)
    }
}

/// Row-major strides for `dims`.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for p in (0..dims.len().saturating_sub(1)).rev() {
        s[p] = s[p + 1] * dims[p + 1];
    }
    s
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Kronecker product of two vectors, `(x ⊗ y)[i·m + j] = x[i]·y[j]`.
pub fn kron_vec(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mode_product_identity_and_ones() {
        let t = DenseTensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(t.mode_product(&DMatrix::identity(2, 2), 0).unwrap(), t);

        let ones = DenseTensor::filled(&[2, 2, 2], 1.0);
        let row = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let r = ones.mode_product(&row, 0).unwrap();
        assert_eq!(r.dims(), &[1, 2, 2]);
        assert!(r.data().iter().all(|&v| v == 2.0));
    }

    #[test]
    fn mode_product_rejects_bad_shapes() {
        let t = DenseTensor::zeros(&[2, 3]);
        assert!(t.mode_product(&DMatrix::zeros(2, 2), 1).is_err());
        assert!(t.mode_product(&DMatrix::zeros(2, 2), 2).is_err());
    }

    #[test]
    fn apply_polynomial_diagonal() {
        let t = DenseTensor::diagonal(3, &[2.0, 3.0]);
        assert_eq!(t.apply_polynomial(&[1.0, 1.0]).unwrap(), vec![2.0, 3.0]);
        assert!(DenseTensor::zeros(&[2, 3]).apply_polynomial(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn inner_small_cases() {
        let a = DenseTensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let i = DenseTensor::new(vec![2, 2], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(a.inner(&i).unwrap(), 5.0);

        let mut e1 = DenseTensor::zeros(&[2, 2]);
        e1.set(&[0, 1], 1.0).unwrap();
        let mut e2 = DenseTensor::zeros(&[2, 2]);
        e2.set(&[1, 0], 1.0).unwrap();
        assert_eq!(e1.inner(&e2).unwrap(), 0.0);
        assert!(a.inner(&DenseTensor::zeros(&[4])).is_err());
    }

    #[test]
    fn outer_small_cases() {
        let x = DenseTensor::from_vector(&[1.0, 2.0]);
        let y = DenseTensor::from_vector(&[3.0, 4.0]);
        let o = x.outer(&y);
        assert_eq!(o.dims(), &[2, 2]);
        assert_eq!(o.data(), &[3.0, 4.0, 6.0, 8.0]);

        let t = DenseTensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let s = DenseTensor::scalar(2.0).outer(&t);
        assert_eq!(s, t.scaled(2.0));
    }

    #[test]
    fn einstein_identity_and_matvec() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = samples::uniform(&[2, 3], -1.0, 1.0, &mut rng);
        let id = DenseTensor::from_fn(&[2, 2, 3, 3], |ix| {
            if ix[0] == ix[1] && ix[2] == ix[3] {
                1.0
            } else {
                0.0
            }
        });
        assert_eq!(id.einstein_product(&x).unwrap(), x);

        let m = DenseTensor::new(vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let v = DenseTensor::from_vector(&[1.0, 0.0, -1.0]);
        assert_eq!(m.einstein_product(&v).unwrap().data(), &[-2.0, -2.0]);
        assert!(m.einstein_product(&DenseTensor::from_vector(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn norms_small_cases() {
        assert_eq!(DenseTensor::zeros(&[3, 2]).norms(), Norms { l1: 0.0, frobenius: 0.0 });
        let n = DenseTensor::filled(&[2, 2, 2], 1.0).norms();
        assert_eq!(n.l1, 8.0);
        assert_eq!(n.frobenius, 8f64.sqrt());
    }

    #[test]
    fn subview_fibers() {
        let t = DenseTensor::from_fn(&[3, 3, 3], |ix| (ix[0] * 9 + ix[1] * 3 + ix[2]) as f64);
        let s = t.subview(&[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(s.order(), 0);
        assert_eq!(s.data(), &[15.0]);
        let fiber = t.subview(&[(1, 0), (2, 0)]).unwrap();
        assert_eq!(fiber.data(), &[0.0, 9.0, 18.0]);
        assert!(t.subview(&[(0, 3)]).is_err());
        assert!(t.subview(&[(0, 1), (0, 2)]).is_err());
    }

    #[test]
    fn unfold_matrix_cases() {
        let t = DenseTensor::new(vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let m = t.to_matrix().unwrap();
        assert_eq!(t.unfold(0).unwrap(), m);
        assert_eq!(t.unfold(1).unwrap(), m.transpose());
    }

    #[test]
    fn structure_witnesses() {
        let id = DenseTensor::diagonal(3, &[1.0, 1.0, 1.0]);
        assert!(id.structure_check(StructureKind::Diagonal, 1e-10).unwrap());
        assert!(id.structure_check(StructureKind::Supersymmetric, 1e-10).unwrap());
        assert!(id.structure_check(StructureKind::UpperTriangular, 1e-10).unwrap());

        let mut t = DenseTensor::zeros(&[2, 2, 2]);
        t.set(&[0, 1, 0], 1.0).unwrap();
        assert!(!t.structure_check(StructureKind::Supersymmetric, 1e-10).unwrap());
        assert!(!t.structure_check(StructureKind::UpperTriangular, 1e-10).unwrap());
        assert!(DenseTensor::zeros(&[2, 3]).structure_check(StructureKind::Diagonal, 1e-10).is_err());

        let stoch = DenseTensor::filled(&[3, 2], 0.5);
        assert!(stoch.structure_check(StructureKind::Stochastic, 1e-10).unwrap());
    }

    #[test]
    fn symmetrize_matrix_and_fixed_point() {
        let t = DenseTensor::new(vec![2, 2], vec![1.0, 2.0, 4.0, 3.0]).unwrap();
        let s = t.symmetrize().unwrap();
        assert_eq!(s.data(), &[1.0, 3.0, 3.0, 3.0]);
        assert_eq!(s.symmetrize().unwrap(), s);
        assert!(DenseTensor::zeros(&[2, 3]).symmetrize().is_err());
    }

    #[test]
    fn zero_length_dims_rejected() {
        assert!(DenseTensor::new(vec![2, 0], vec![]).is_err());
        assert!(DenseTensor::new(vec![2, 2], vec![1.0]).is_err());
    }
}
