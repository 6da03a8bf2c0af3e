//! The tensor Kronecker product and mixed-product fast paths.
//!
//! For `B` with dims `n_p` and `C` with dims `m_p`, entry `(i, j)` of the
//! factor pair lands at composite index `i_p·m_p + j_p` in every mode `p`.

use nalgebra::DMatrix;

use crate::error::{KronError, Result};
use crate::tensor::{next_index, strides, DenseTensor, MultiIndex, Norms};

/// Default materialization budget in elements (2^27).
pub const DEFAULT_BUDGET: u128 = 1 << 27;

/// Element budget for materializing Kronecker products. `KRONTEN_BUDGET`
/// overrides the default.
pub fn materialization_budget() -> u128 {
    std::env::var("KRONTEN_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

pub(crate) fn check_budget(dims: &[usize]) -> Result<()> {
    let needed = dims.iter().map(|&d| d as u128).product::<u128>();
    let budget = materialization_budget();
    if needed > budget {
        return Err(KronError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Offsets of every entry of a factor inside the product, given the
/// per-mode multiplier (`m_p` for the left factor, 1 for the right).
fn scattered_offsets(dims: &[usize], mult: &[usize], out_strides: &[usize]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let mut offs = Vec::with_capacity(total);
    let mut index = vec![0; dims.len()];
    for _ in 0..total {
        offs.push(
            index
                .iter()
                .zip(mult)
                .zip(out_strides)
                .map(|((i, m), s)| i * m * s)
                .sum(),
        );
        next_index(dims, &mut index);
    }
    offs
}

/// `B ⊗ C` for two tensors of equal order.
pub fn kron(b: &DenseTensor, c: &DenseTensor) -> Result<DenseTensor> {
    if b.order() != c.order() {
        return Err(KronError::OrderMismatch {
            left: b.order(),
            right: c.order(),
        });
    }
    let dims: Vec<usize> = b.dims().iter().zip(c.dims()).map(|(n, m)| n * m).collect();
    check_budget(&dims)?;
    let out_strides = strides(&dims);
    let off_b = scattered_offsets(b.dims(), c.dims(), &out_strides);
    let off_c = scattered_offsets(c.dims(), &vec![1; c.order()], &out_strides);
    let mut out = vec![0.0; dims.iter().product()];
    for (&bv, &ob) in b.data().iter().zip(&off_b) {
        if bv == 0.0 {
            continue;
        }
        for (&cv, &oc) in c.data().iter().zip(&off_c) {
            out[ob + oc] = bv * cv;
        }
    }
    DenseTensor::new(dims, out)
}

/// Left-to-right chain `F₁ ⊗ F₂ ⊗ …`.
pub fn kron_all(factors: &[DenseTensor]) -> Result<DenseTensor> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| KronError::InvalidArgument("no factors".into()))?;
    rest.iter().try_fold(first.clone(), |acc, f| kron(&acc, f))
}

/// Composite index of `(i, j)` where `m` are the dims of the right factor.
pub fn kron_index(i: &[usize], j: &[usize], m: &[usize]) -> Result<MultiIndex> {
    if i.len() != j.len() || j.len() != m.len() {
        return Err(KronError::Shape(format!(
            "index lengths differ: {} / {} / {}",
            i.len(),
            j.len(),
            m.len()
        )));
    }
    if j.iter().zip(m).any(|(a, b)| a >= b) {
        return Err(KronError::IndexOutOfRange {
            index: j.to_vec(),
            dims: m.to_vec(),
        });
    }
    Ok(i.iter().zip(j).zip(m).map(|((a, b), mp)| a * mp + b).collect())
}

/// Splits a composite index back into the factor indices.
pub fn kron_inverse_index(c: &[usize], m: &[usize]) -> Result<(MultiIndex, MultiIndex)> {
    if c.len() != m.len() {
        return Err(KronError::Shape(format!("index has {} entries but {} dims", c.len(), m.len())));
    }
    if m.contains(&0) {
        return Err(KronError::Shape("zero-length dimension".into()));
    }
    Ok(c.iter().zip(m).map(|(cp, mp)| (cp / mp, cp % mp)).unzip())
}

/// Matrix Kronecker product with the same `i·m + j` convention on rows and
/// columns.
pub fn kron_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// A Kronecker chain `F₁ ⊗ … ⊗ F_q` kept in factored form.
#[derive(Clone, Debug, PartialEq)]
pub struct KronFactored {
    factors: Vec<DenseTensor>,
}

/// A vector `v₁ ⊗ … ⊗ v_q` kept in factored form.
#[derive(Clone, Debug, PartialEq)]
pub struct KronVector {
    pub factors: Vec<Vec<f64>>,
}

impl KronVector {
    pub fn materialize(&self) -> Vec<f64> {
        self.factors
            .iter()
            .fold(vec![1.0], |acc, v| crate::tensor::kron_vec(&acc, v))
    }

    pub fn len(&self) -> usize {
        self.factors.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl KronFactored {
    pub fn new(factors: Vec<DenseTensor>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| KronError::InvalidArgument("no factors".into()))?;
        for f in &factors[1..] {
            if f.order() != first.order() {
                return Err(KronError::OrderMismatch {
                    left: first.order(),
                    right: f.order(),
                });
            }
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[DenseTensor] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors[0].order()
    }

    pub fn virtual_dims(&self) -> Vec<usize> {
        (0..self.order())
            .map(|p| self.factors.iter().map(|f| f.dims()[p]).product())
            .collect()
    }

    /// Dense `F₁ ⊗ … ⊗ F_q`, subject to the materialization budget.
    pub fn materialize(&self) -> Result<DenseTensor> {
        check_budget(&self.virtual_dims())?;
        kron_all(&self.factors)
    }

    /// `(⊗F_q) ×_p (⊗M_q) = ⊗(F_q ×_p M_q)`.
    pub fn mode_product(&self, ms: &[DMatrix<f64>], p: usize) -> Result<Self> {
        if ms.len() != self.factors.len() {
            return Err(KronError::Shape(format!(
                "{} matrices for {} factors",
                ms.len(),
                self.factors.len()
            )));
        }
        let factors = self
            .factors
            .iter()
            .zip(ms)
            .map(|(f, m)| f.mode_product(m, p))
            .collect::<Result<_>>()?;
        Ok(Self { factors })
    }

    /// `(⊗F_q)(⊗x_q)^{k-1} = ⊗(F_q x_q^{k-1})`.
    pub fn polynomial(&self, xs: &[Vec<f64>]) -> Result<KronVector> {
        if xs.len() != self.factors.len() {
            return Err(KronError::Shape(format!(
                "{} vectors for {} factors",
                xs.len(),
                self.factors.len()
            )));
        }
        let factors = self
            .factors
            .iter()
            .zip(xs)
            .map(|(f, x)| f.apply_polynomial(x))
            .collect::<Result<_>>()?;
        Ok(KronVector { factors })
    }

    /// Products of the per-factor norms.
    pub fn norms(&self) -> Norms {
        self.factors.iter().fold(Norms { l1: 1.0, frobenius: 1.0 }, |acc, f| {
            let n = f.norms();
            Norms {
                l1: acc.l1 * n.l1,
                frobenius: acc.frobenius * n.frobenius,
            }
        })
    }

    /// `⟨⊗F_q, ⊗G_q⟩ = ∏⟨F_q, G_q⟩`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.factors.len() != other.factors.len() {
            return Err(KronError::Shape("factor counts differ".into()));
        }
        self.factors
            .iter()
            .zip(&other.factors)
            .try_fold(1.0, |acc, (a, b)| Ok(acc * a.inner(b)?))
    }
}
