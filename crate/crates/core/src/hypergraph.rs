//! k-uniform hypergraphs, their adjacency tensors and Kronecker products.
//!
//! The Kronecker hypergraph's canonical tensor is `A(H₁) ⊗ A(H₂)`, whose
//! nonzeros are `(1/(k−1)!)²`. The adjacency tensor of the product's edge set
//! has the same support with entries `1/(k−1)!`, so the two differ by the
//! factor `(k−1)!`. Likewise the clique-expansion count matrix is `(k−1)`
//! times the tensor view `A·1^{k−2}`. Both views are exposed; the Kronecker
//! identities hold for the tensor views.

use std::collections::BTreeSet;

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{KronError, Result};
use crate::kron::kron;
use crate::spectral::{self, EigenKind, SolverOptions};
use crate::tensor::DenseTensor;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    k: usize,
    n: usize,
    edges: BTreeSet<Vec<usize>>,
}

/// Count matrix and tensor view of the clique expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct CliqueExpansion {
    /// Number of edges containing both `i` and `j` (zero diagonal).
    pub counts: DMatrix<f64>,
    /// `A(H)·1^{k−2}`, equal to `counts / (k−1)`.
    pub tensor_view: DMatrix<f64>,
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl Hypergraph {
    /// Validates and canonicalizes the edges (each sorted ascending).
    pub fn new(k: usize, n: usize, edges: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        if k == 0 {
            return Err(KronError::InvalidHypergraph("uniformity must be >= 1".into()));
        }
        let mut set = BTreeSet::new();
        for mut e in edges {
            if e.len() != k {
                return Err(KronError::InvalidHypergraph(format!("edge {e:?} does not have {k} vertices")));
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(KronError::InvalidHypergraph(format!("edge {e:?} repeats a vertex")));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= n) {
                return Err(KronError::InvalidHypergraph(format!("vertex {v} out of range for n = {n}")));
            }
            if !set.insert(e.clone()) {
                return Err(KronError::InvalidHypergraph(format!("duplicate edge {e:?}")));
            }
        }
        Ok(Self { k, n, edges: set })
    }

    /// Random `k`-uniform hypergraph with `m` distinct edges on `n` vertices.
    pub fn random<R: Rng + ?Sized>(k: usize, n: usize, m: usize, rng: &mut R) -> Result<Self> {
        let total = (0..n).combinations(k).count();
        if m > total {
            return Err(KronError::InvalidArgument(format!("only {total} distinct {k}-edges on {n} vertices")));
        }
        let mut set = BTreeSet::new();
        while set.len() < m {
            let mut e: Vec<usize> = rand::seq::index::sample(rng, n, k).into_vec();
            e.sort_unstable();
            set.insert(e);
        }
        Self::new(k, n, set)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<Vec<usize>> {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Supersymmetric `n^k` tensor with `1/(k−1)!` on every ordering of every
    /// edge.
    pub fn adjacency_tensor(&self) -> Result<DenseTensor> {
        let dims = vec![self.n; self.k];
        crate::kron::check_budget(&dims)?;
        let mut t = DenseTensor::zeros(&dims);
        let w = 1.0 / factorial(self.k - 1);
        for e in &self.edges {
            for p in e.iter().copied().permutations(self.k) {
                t.set(&p, w)?;
            }
        }
        Ok(t)
    }

    /// Degree vector `A(H)·1^{k−1}`.
    pub fn degree_vector(&self) -> Result<Vec<f64>> {
        tensor_degree(&self.adjacency_tensor()?)
    }

    /// Number of edges containing each vertex.
    pub fn edge_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                d[v] += 1;
            }
        }
        d
    }

    pub fn is_regular(&self) -> bool {
        let d = self.edge_degrees();
        d.windows(2).all(|w| w[0] == w[1])
    }

    pub fn clique_expansion(&self) -> Result<CliqueExpansion> {
        if self.k < 2 {
            return Err(KronError::InvalidHypergraph("clique expansion needs k >= 2".into()));
        }
        let mut counts = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            for (&a, &b) in e.iter().tuple_combinations() {
                counts[(a, b)] += 1.0;
                counts[(b, a)] += 1.0;
            }
        }
        let tensor_view = tensor_clique(&self.adjacency_tensor()?)?;
        Ok(CliqueExpansion { counts, tensor_view })
    }

    /// Positive H- or Z-eigenvector of the adjacency tensor, unit 2-norm.
    pub fn centrality(&self, kind: EigenKind, opts: &SolverOptions) -> Result<Vec<f64>> {
        tensor_centrality(&self.adjacency_tensor()?, kind, opts)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(KronError::InvalidArgument(format!(
                "permutation of length {} for {} vertices",
                perm.len(),
                self.n
            )));
        }
        Self::new(self.k, self.n, self.edges.iter().map(|e| e.iter().map(|&v| perm[v]).collect()))
    }
}

/// `T·1^{k−1}`.
pub fn tensor_degree(t: &DenseTensor) -> Result<Vec<f64>> {
    let n = t
        .cubical_dim()
        .ok_or_else(|| KronError::Shape(format!("expected a cubical tensor, got {:?}", t.dims())))?;
    t.apply_polynomial(&vec![1.0; n])
}

/// `T·1^{k−2}` as an `n × n` matrix.
pub fn tensor_clique(t: &DenseTensor) -> Result<DMatrix<f64>> {
    let n = t
        .cubical_dim()
        .ok_or_else(|| KronError::Shape(format!("expected a cubical tensor, got {:?}", t.dims())))?;
    t.apply_polynomial_matrix(&vec![1.0; n])
}

/// Eigenvector centrality of a nonnegative supersymmetric tensor: the
/// strictly positive converged eigenvector with the largest eigenvalue,
/// scaled to unit 2-norm.
pub fn tensor_centrality(t: &DenseTensor, kind: EigenKind, opts: &SolverOptions) -> Result<Vec<f64>> {
    let n = t
        .cubical_dim()
        .ok_or_else(|| KronError::Shape(format!("expected a cubical tensor, got {:?}", t.dims())))?;
    let pairs = match kind {
        EigenKind::Z => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let starts: Vec<Vec<f64>> = (0..opts.starts)
                .map(|s| {
                    if s == 0 {
                        vec![1.0; n]
                    } else {
                        (0..n).map(|_| rng.gen_range(0.1..1.0)).collect()
                    }
                })
                .collect();
            spectral::z_eigen_from_starts(t, &starts, opts)?
        }
        EigenKind::H => spectral::h_eigen_power(t, opts)?.pairs,
        other => return Err(KronError::KindMismatch(other.to_string(), "H or Z".into())),
    };
    let k = t.order() as i32;
    let best = pairs
        .into_iter()
        .filter(|p| {
            // a coordinate whose (k−1)-th power is below the convergence
            // tolerance is indistinguishable from zero
            let floor = opts.tol * p.value.abs().max(1.0);
            let scale = crate::tensor::norm2(&p.vector);
            p.value > 0.0 && p.vector.iter().all(|&v| v > 0.0 && (v / scale).powi(k - 1) > floor)
        })
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or(KronError::NoPositiveEigenvector)?;
    let norm = crate::tensor::norm2(&best.vector);
    Ok(best.vector.iter().map(|v| v / norm).collect())
}

/// Edge-set Kronecker product: vertex `(u, v)` has flat id `u·n₂ + v`, and
/// every pair of edges contributes one edge per bijection between them, so
/// `|E| = |E₁|·|E₂|·k!`.
pub fn kron_hypergraph(h1: &Hypergraph, h2: &Hypergraph) -> Result<Hypergraph> {
    if h1.k != h2.k {
        return Err(KronError::OrderMismatch {
            left: h1.k,
            right: h2.k,
        });
    }
    let k = h1.k;
    let mut edges = BTreeSet::new();
    for e1 in &h1.edges {
        for e2 in &h2.edges {
            for sigma in (0..k).permutations(k) {
                let mut e: Vec<usize> = (0..k).map(|i| e1[i] * h2.n + e2[sigma[i]]).collect();
                e.sort_unstable();
                edges.insert(e);
            }
        }
    }
    Ok(Hypergraph {
        k,
        n: h1.n * h2.n,
        edges,
    })
}

/// The canonical Kronecker hypergraph tensor `A(H₁) ⊗ A(H₂)`.
pub fn kron_adjacency(h1: &Hypergraph, h2: &Hypergraph) -> Result<DenseTensor> {
    kron(&h1.adjacency_tensor()?, &h2.adjacency_tensor()?)
}

/// Whether the product's adjacency support equals that of
/// `A(H₁) ⊗ A(H₂)`, and the entries differ by exactly `(k−1)!`.
pub fn kron_support_matches(h1: &Hypergraph, h2: &Hypergraph, product: &Hypergraph) -> Result<bool> {
    let a = product.adjacency_tensor()?;
    let b = kron_adjacency(h1, h2)?;
    if a.dims() != b.dims() {
        return Ok(false);
    }
    let ratio = factorial(h1.k - 1);
    Ok(a.data()
        .iter()
        .zip(b.data())
        .all(|(&x, &y)| (x != 0.0) == (y != 0.0) && (x - ratio * y).abs() <= 1e-15 * x.abs().max(1.0)))
}

/// Vertex map `(u, v) ↦ (v, u)` in flat ids, taking `H₁ ⊗ H₂` onto
/// `H₂ ⊗ H₁`.
pub fn kron_isomorphism_witness(h1: &Hypergraph, h2: &Hypergraph) -> Result<Vec<usize>> {
    if h1.k != h2.k {
        return Err(KronError::OrderMismatch {
            left: h1.k,
            right: h2.k,
        });
    }
    let (n1, n2) = (h1.n, h2.n);
    Ok((0..n1 * n2).map(|id| (id % n2) * n1 + id / n2).collect())
}
