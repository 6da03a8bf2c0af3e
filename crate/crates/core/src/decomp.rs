//! Tucker/HOSVD, CP-ALS, odeco and tensor-train decompositions, each with a
//! composition path from decompositions of Kronecker factors.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{KronError, Result};
use crate::kron::{kron, kron_matrix};
use crate::linalg;
use crate::spectral::{self, SolverOptions};
use crate::tensor::{DenseTensor, StructureKind};

/// Default threshold on the relative odeco residual.
pub const ODECO_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    General,
    Hosvd,
    Cp,
    Odeco,
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Flavor::General => "general",
            Flavor::Hosvd => "hosvd",
            Flavor::Cp => "cp",
            Flavor::Odeco => "odeco",
        })
    }
}

impl std::str::FromStr for Flavor {
    type Err = KronError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Flavor::General),
            "hosvd" => Ok(Flavor::Hosvd),
            "cp" => Ok(Flavor::Cp),
            "odeco" => Ok(Flavor::Odeco),
            other => Err(KronError::InvalidArgument(format!("unknown flavor {other:?}"))),
        }
    }
}

/// `T = S ×₁ U₁ ×₂ … ×_k U_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TuckerDecomp {
    pub core: DenseTensor,
    pub factors: Vec<DMatrix<f64>>,
    pub flavor: Flavor,
    /// Per-mode singular values `‖S_{j_p=α}‖_F` (HOSVD only, else empty).
    pub mode_singular_values: Vec<Vec<f64>>,
}

/// Tensor train with cores of dims `(r_{p-1}, n_p, r_p)`, `r_0 = r_k = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TTDecomp {
    pub cores: Vec<DenseTensor>,
    pub ranks: Vec<usize>,
}

/// `T ≈ Σ_j λ_j u_j^{∘k}` with orthonormal `u_j` (columns of `vectors`).
#[derive(Clone, Debug, PartialEq)]
pub struct OdecoDecomp {
    pub order: usize,
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    /// `‖T − Σ λ_j u_j^{∘k}‖_F / ‖T‖_F` (0 for the zero tensor).
    pub residual: f64,
    pub is_odeco: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CpOptions {
    pub max_sweeps: usize,
    /// Stop once the fit changes by less than this between sweeps.
    pub tol: f64,
    /// Trial 0 starts from HOSVD vectors, later trials from seeded random ones.
    pub trials: usize,
    pub seed: u64,
}

impl Default for CpOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 500,
            tol: 1e-10,
            trials: 1,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CpResult {
    pub decomp: TuckerDecomp,
    /// `1 − ‖T − R‖_F / ‖T‖_F`.
    pub fit: f64,
    pub converged: bool,
    pub sweeps: usize,
    /// Relative error after every sweep of the returned trial.
    pub errors: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OdecoOptions {
    pub solver: SolverOptions,
    /// Threshold on the relative residual for calling the result odeco.
    pub odeco_tol: f64,
}

impl Default for OdecoOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            odeco_tol: ODECO_TOL,
        }
    }
}

fn truncate_columns(m: &DMatrix<f64>, r: usize) -> DMatrix<f64> {
    m.columns(0, r).into_owned()
}

/// Higher-order SVD. Each factor holds the left singular vectors of the
/// mode-`p` unfolding, truncated to its numerical rank, with the
/// largest-magnitude entry of every column positive.
pub fn hosvd(t: &DenseTensor) -> Result<TuckerDecomp> {
    if t.order() == 0 {
        return Err(KronError::Shape("HOSVD needs order >= 1".into()));
    }
    let mut factors = Vec::with_capacity(t.order());
    for p in 0..t.order() {
        let svd = linalg::svd(&t.unfold(p)?);
        let r = linalg::numerical_rank(&svd.s).max(1);
        let mut u = truncate_columns(&svd.u, r);
        linalg::canonicalize_columns(&mut u);
        factors.push(u);
    }
    let mut core = t.clone();
    for (p, u) in factors.iter().enumerate() {
        core = core.mode_product(&u.transpose(), p)?;
    }
    let mode_singular_values = (0..core.order()).map(|p| slice_norms(&core, p)).collect::<Result<_>>()?;
    Ok(TuckerDecomp {
        core,
        factors,
        flavor: Flavor::Hosvd,
        mode_singular_values,
    })
}

/// `‖S_{j_p=α}‖_F` for every `α`.
pub fn slice_norms(s: &DenseTensor, p: usize) -> Result<Vec<f64>> {
    let m = s.unfold(p)?;
    Ok(m.row_iter().map(|r| r.norm()).collect())
}

/// Largest `|⟨S_{j_p=α}, S_{j_p=β}⟩|` over all modes and `α ≠ β`, relative
/// to `‖S‖_F²`.
pub fn all_orthogonality_defect(s: &DenseTensor) -> Result<f64> {
    let total = s.frobenius_norm().powi(2);
    let mut worst = 0.0f64;
    for p in 0..s.order() {
        let m = s.unfold(p)?;
        let g = &m * m.transpose();
        for i in 0..g.nrows() {
            for j in 0..i {
                worst = worst.max(g[(i, j)].abs());
            }
        }
    }
    Ok(if total > 0.0 { worst / total } else { worst })
}

/// Whether every mode's slice norms are nonincreasing (to relative `1e-12`).
pub fn is_ordered(s: &DenseTensor) -> Result<bool> {
    for p in 0..s.order() {
        let n = slice_norms(s, p)?;
        let scale = n.iter().copied().fold(0.0, f64::max);
        if n.windows(2).any(|w| w[1] > w[0] + 1e-12 * scale) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// HOSVD validator: all-orthogonality within `tol` (relative to `‖S‖_F²`),
/// ordering, and orthonormal factor columns.
pub fn validate_hosvd(d: &TuckerDecomp, tol: f64) -> Result<bool> {
    let orthonormal = d.factors.iter().all(|u| {
        let g = u.transpose() * u;
        linalg::max_abs(&(g - DMatrix::identity(u.ncols(), u.ncols()))) <= 1e-10
    });
    Ok(orthonormal && all_orthogonality_defect(&d.core)? <= tol && is_ordered(&d.core)?)
}

/// `S ×₁ U₁ … ×_k U_k`.
pub fn reconstruct_tucker(d: &TuckerDecomp) -> Result<DenseTensor> {
    let mut out = d.core.clone();
    for (p, u) in d.factors.iter().enumerate() {
        out = out.mode_product(u, p)?;
    }
    Ok(out)
}

/// Rows of the Khatri–Rao product over all modes except `p`, ordered like
/// the columns of `unfold(p)`.
fn khatri_rao_except(factors: &[DMatrix<f64>], p: usize) -> DMatrix<f64> {
    let rank = factors[0].ncols();
    let others: Vec<&DMatrix<f64>> = factors.iter().enumerate().filter(|(q, _)| *q != p).map(|(_, f)| f).collect();
    let rows: usize = others.iter().map(|f| f.nrows()).product();
    let mut kr = DMatrix::from_element(rows, rank, 1.0);
    let mut stride = rows;
    for f in others {
        stride /= f.nrows();
        for row in 0..rows {
            let i = (row / stride) % f.nrows();
            for r in 0..rank {
                kr[(row, r)] *= f[(i, r)];
            }
        }
    }
    kr
}

fn cp_tensor(weights: &[f64], factors: &[DMatrix<f64>]) -> DenseTensor {
    let dims: Vec<usize> = factors.iter().map(|f| f.nrows()).collect();
    DenseTensor::from_fn(&dims, |ix| {
        weights
            .iter()
            .enumerate()
            .map(|(r, w)| w * ix.iter().zip(factors).map(|(&i, f)| f[(i, r)]).product::<f64>())
            .sum()
    })
}

fn relative_error(t: &DenseTensor, r: &DenseTensor, norm: f64) -> f64 {
    let diff = t.data().iter().zip(r.data()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if norm > 0.0 {
        diff / norm
    } else {
        diff
    }
}

fn normalize_columns(f: &mut DMatrix<f64>) -> Vec<f64> {
    (0..f.ncols())
        .map(|r| {
            let n = f.column(r).norm();
            if n > 0.0 {
                f.column_mut(r).scale_mut(1.0 / n);
            }
            n
        })
        .collect()
}

fn cp_trial(t: &DenseTensor, rank: usize, opts: &CpOptions, init: Vec<DMatrix<f64>>) -> Result<CpResult> {
    let k = t.order();
    let norm = t.frobenius_norm();
    let mut factors = init;
    let mut weights = vec![1.0; rank];
    for f in &mut factors {
        normalize_columns(f);
    }
    let unfoldings: Vec<DMatrix<f64>> = (0..k).map(|p| t.unfold(p)).collect::<Result<_>>()?;
    let mut errors = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_sweeps {
        for p in 0..k {
            let mut gram = DMatrix::from_element(rank, rank, 1.0);
            for (q, f) in factors.iter().enumerate() {
                if q != p {
                    gram.component_mul_assign(&(f.transpose() * f));
                }
            }
            let mttkrp = &unfoldings[p] * khatri_rao_except(&factors, p);
            factors[p] = linalg::solve_right_psd(&mttkrp, &gram);
            weights = normalize_columns(&mut factors[p]);
        }
        let err = relative_error(t, &cp_tensor(&weights, &factors), norm);
        let prev = errors.last().copied();
        errors.push(err);
        if let Some(prev) = prev {
            if (prev - err).abs() < opts.tol {
                converged = true;
                break;
            }
        }
    }
    // largest weight first
    let mut order: Vec<usize> = (0..rank).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    let weights: Vec<f64> = order.iter().map(|&r| weights[r]).collect();
    let factors: Vec<DMatrix<f64>> = factors
        .iter()
        .map(|f| DMatrix::from_fn(f.nrows(), rank, |i, j| f[(i, order[j])]))
        .collect();
    let core = DenseTensor::diagonal(k, &weights);
    let err = errors.last().copied().unwrap_or(1.0);
    Ok(CpResult {
        decomp: TuckerDecomp {
            core,
            factors,
            flavor: Flavor::Cp,
            mode_singular_values: Vec::new(),
        },
        fit: 1.0 - err,
        converged,
        sweeps: errors.len(),
        errors,
    })
}

/// Rank-`rank` CP decomposition by alternating least squares. Returns the
/// best trial; `converged` is false when the sweep budget ran out first.
pub fn cpd_als(t: &DenseTensor, rank: usize, opts: &CpOptions) -> Result<CpResult> {
    if rank == 0 || opts.max_sweeps == 0 || opts.trials == 0 {
        return Err(KronError::InvalidArgument(
            "CP needs rank >= 1, max_sweeps >= 1 and trials >= 1".into(),
        ));
    }
    if t.order() < 2 {
        return Err(KronError::Shape("CP needs order >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<CpResult> = None;
    for trial in 0..opts.trials {
        let init: Vec<DMatrix<f64>> = (0..t.order())
            .map(|p| {
                let n = t.dims()[p];
                let mut f = DMatrix::from_fn(n, rank, |_, _| rng.gen_range(-1.0..1.0));
                if trial == 0 {
                    let u = linalg::svd(&t.unfold(p)?).u;
                    for j in 0..rank.min(u.ncols()) {
                        f.set_column(j, &u.column(j));
                    }
                }
                Ok(f)
            })
            .collect::<Result<_>>()?;
        let res = cp_trial(t, rank, opts, init)?;
        if best.as_ref().is_none_or(|b| res.fit > b.fit) {
            best = Some(res);
        }
    }
    Ok(best.expect("at least one trial"))
}

/// Greedy odeco decomposition: repeatedly take the Z-eigenpair of largest
/// `|λ|` of the deflated tensor (iterates kept orthogonal to the vectors
/// already found) and subtract `λ u^{∘k}`.
pub fn odeco(t: &DenseTensor, opts: &OdecoOptions) -> Result<OdecoDecomp> {
    opts.solver.validate()?;
    let n = t
        .cubical_dim()
        .ok_or_else(|| KronError::Shape(format!("odeco needs a cubical tensor, got {:?}", t.dims())))?;
    if !t.structure_check(StructureKind::Supersymmetric, spectral::SUPERSYMMETRY_TOL)? {
        return Err(KronError::NotSupersymmetric {
            tol: spectral::SUPERSYMMETRY_TOL,
        });
    }
    let k = t.order();
    let norm = t.frobenius_norm();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.solver.seed);
    let mut rest = t.clone();
    let mut values = Vec::new();
    let mut found: Vec<Vec<f64>> = Vec::new();
    while found.len() < n && rest.frobenius_norm() > 1e-14 * norm.max(f64::MIN_POSITIVE) {
        let rules = spectral::shift_rules(k, opts.solver.shift);
        let mut best: Option<spectral::ZRun> = None;
        for _ in 0..opts.solver.starts {
            let x0 = crate::samples::unit_vector(n, &mut rng);
            for &rule in &rules {
                if let Some(run) = spectral::sshopm_single(&rest, &x0, rule, opts.solver.tol, opts.solver.max_iter, &found)
                {
                    if best.as_ref().is_none_or(|b| run.value.abs() > b.value.abs()) {
                        best = Some(run);
                    }
                }
            }
        }
        let Some(run) = best else { break };
        rest.axpy(-run.value, &DenseTensor::symmetric_rank_one(&run.vector, k))?;
        values.push(run.value);
        found.push(run.vector);
    }
    let vectors = DMatrix::from_fn(n, found.len(), |i, j| found[j][i]);
    let residual = if norm > 0.0 { rest.frobenius_norm() / norm } else { 0.0 };
    Ok(OdecoDecomp {
        order: k,
        values,
        vectors,
        residual,
        is_odeco: residual <= opts.odeco_tol,
    })
}

/// `Σ_j λ_j u_j^{∘k}`.
pub fn reconstruct_odeco(d: &OdecoDecomp) -> DenseTensor {
    crate::samples::odeco_tensor(&d.values, &d.vectors, d.order)
}

/// Extends the vectors to an orthonormal basis of `R^n`, giving the added
/// directions `λ = 0`.
pub fn complete_basis(d: &OdecoDecomp) -> OdecoDecomp {
    let n = d.vectors.nrows();
    let m = d.vectors.ncols();
    if m >= n {
        return d.clone();
    }
    let mut cols: Vec<nalgebra::DVector<f64>> = d.vectors.column_iter().map(|c| c.into_owned()).collect();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = nalgebra::DVector::from_fn(n, |i, _| if i == e { 1.0 } else { 0.0 });
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dot(&v);
                v -= c * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / norm);
        }
    }
    let mut values = d.values.clone();
    values.resize(n, 0.0);
    OdecoDecomp {
        vectors: DMatrix::from_columns(&cols),
        values,
        ..d.clone()
    }
}

/// `(λ_a μ_b, u_a ⊗ v_b)` at position `a·m + b`. The residual is the bound
/// `r_B + r_C + r_B r_C` on the relative residual of the composition.
pub fn kron_compose_odeco(b: &OdecoDecomp, c: &OdecoDecomp) -> Result<OdecoDecomp> {
    if b.order != c.order {
        return Err(KronError::OrderMismatch {
            left: b.order,
            right: c.order,
        });
    }
    let values = b
        .values
        .iter()
        .flat_map(|x| c.values.iter().map(move |y| x * y))
        .collect();
    let residual = b.residual + c.residual + b.residual * c.residual;
    Ok(OdecoDecomp {
        order: b.order,
        values,
        vectors: kron_matrix(&b.vectors, &c.vectors),
        residual,
        is_odeco: b.is_odeco && c.is_odeco,
    })
}

/// Tucker view of an odeco decomposition.
pub fn odeco_as_tucker(d: &OdecoDecomp) -> TuckerDecomp {
    TuckerDecomp {
        core: DenseTensor::diagonal(d.order, &d.values),
        factors: vec![d.vectors.clone(); d.order],
        flavor: Flavor::Odeco,
        mode_singular_values: Vec::new(),
    }
}

/// Row-major matrix view of a flat buffer.
fn row_major(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, data)
}

fn to_row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

/// TT-SVD with per-step truncation `δ = tol·‖T‖_F/√(k−1)`: each rank is the
/// smallest whose discarded tail has norm ≤ δ, capped at the numerical rank.
pub fn ttd(t: &DenseTensor, tol: f64) -> Result<TTDecomp> {
    if !(tol >= 0.0) {
        return Err(KronError::InvalidArgument(format!("tolerance must be >= 0, got {tol}")));
    }
    let k = t.order();
    if k == 0 {
        return Err(KronError::Shape("TT needs order >= 1".into()));
    }
    let dims = t.dims();
    let delta = if k > 1 {
        tol * t.frobenius_norm() / ((k - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut ranks = vec![1];
    let mut cores = Vec::with_capacity(k);
    let mut rest = t.data().to_vec();
    let mut remaining: usize = dims.iter().product();
    for (p, &n) in dims.iter().enumerate().take(k - 1) {
        let r_prev = ranks[p];
        remaining /= n;
        let m = row_major(r_prev * n, remaining, &rest);
        let svd = linalg::svd(&m);
        let mut r = svd.s.len();
        let mut tail = 0.0;
        while r > 1 && (tail + svd.s[r - 1].powi(2)).sqrt() <= delta {
            tail += svd.s[r - 1].powi(2);
            r -= 1;
        }
        let r = r.min(linalg::numerical_rank(&svd.s).max(1));
        let u = truncate_columns(&svd.u, r);
        cores.push(DenseTensor::new(vec![r_prev, n, r], to_row_major(&u))?);
        let sv = DMatrix::from_fn(r, remaining, |i, j| svd.s[i] * svd.v_t[(i, j)]);
        rest = to_row_major(&sv);
        ranks.push(r);
    }
    cores.push(DenseTensor::new(vec![ranks[k - 1], dims[k - 1], 1], rest)?);
    ranks.push(1);
    Ok(TTDecomp { cores, ranks })
}

/// Contracts the train back into a dense tensor.
pub fn reconstruct_tt(d: &TTDecomp) -> Result<DenseTensor> {
    let mut acc = vec![1.0];
    let mut rows = 1;
    let mut dims = Vec::with_capacity(d.cores.len());
    for core in &d.cores {
        let cd = core.dims();
        let (r0, n, r1) = (cd[0], cd[1], cd[2]);
        let a = row_major(rows, r0, &acc);
        let g = row_major(r0, n * r1, core.data());
        acc = to_row_major(&(a * g));
        rows *= n;
        dims.push(n);
        let _ = r1;
    }
    DenseTensor::new(dims, acc)
}

/// Cores `B^{(p)} ⊗ C^{(p)}`; ranks multiply.
pub fn kron_compose_tt(b: &TTDecomp, c: &TTDecomp) -> Result<TTDecomp> {
    if b.cores.len() != c.cores.len() {
        return Err(KronError::OrderMismatch {
            left: b.cores.len(),
            right: c.cores.len(),
        });
    }
    let cores = b.cores.iter().zip(&c.cores).map(|(x, y)| kron(x, y)).collect::<Result<_>>()?;
    let ranks = b.ranks.iter().zip(&c.ranks).map(|(x, y)| x * y).collect();
    Ok(TTDecomp { cores, ranks })
}

/// Core `S ⊗ R`, factors `U_p ⊗ V_p`. For HOSVD with `reorder`, each mode is
/// stably re-sorted by the composed singular values `γ_α γ_β`, permuting core
/// indices and factor columns together.
pub fn kron_compose_tucker(b: &TuckerDecomp, c: &TuckerDecomp, reorder: bool) -> Result<TuckerDecomp> {
    if b.flavor != c.flavor {
        return Err(KronError::FlavorMismatch(b.flavor, c.flavor));
    }
    if b.factors.len() != c.factors.len() {
        return Err(KronError::OrderMismatch {
            left: b.factors.len(),
            right: c.factors.len(),
        });
    }
    let mut core = kron(&b.core, &c.core)?;
    let mut factors: Vec<DMatrix<f64>> = b.factors.iter().zip(&c.factors).map(|(u, v)| kron_matrix(u, v)).collect();
    let mut mode_singular_values: Vec<Vec<f64>> = b
        .mode_singular_values
        .iter()
        .zip(&c.mode_singular_values)
        .map(|(x, y)| x.iter().flat_map(|a| y.iter().map(move |g| a * g)).collect())
        .collect();
    if b.flavor == Flavor::Hosvd && reorder {
        for p in 0..factors.len() {
            let sv = &mode_singular_values[p];
            let mut perm: Vec<usize> = (0..sv.len()).collect();
            perm.sort_by(|&x, &y| sv[y].total_cmp(&sv[x]));
            if perm.iter().enumerate().all(|(i, &j)| i == j) {
                continue;
            }
            let mut m = core.unfold(p)?;
            m = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(perm[i], j)]);
            core = DenseTensor::fold(&m, p, core.dims())?;
            let f = &factors[p];
            factors[p] = DMatrix::from_fn(f.nrows(), f.ncols(), |i, j| f[(i, perm[j])]);
            mode_singular_values[p] = perm.iter().map(|&j| sv[j]).collect();
        }
    }
    Ok(TuckerDecomp {
        core,
        factors,
        flavor: b.flavor,
        mode_singular_values,
    })
}
