//! Tensor eigensolvers (Z, H, M, U), Kronecker composition of eigenpairs and
//! residual diagnostics.
//!
//! Conventions:
//! - Z-pairs are unit vectors in the 2-norm; H-pairs are normalized to
//!   `‖x‖_{k-1} = 1`.
//! - Odd-order Z-pairs are reported with the first significant component
//!   positive, flipping `λ` accordingly (`(λ, x)` and `(-λ, -x)` are the same
//!   pair).
//! - For an order-`2k` tensor the M-problem contracts `x` into the even
//!   positions `0, 2, …` and `y` into the odd positions `1, 3, …`. The free
//!   mode of `T x^k y^{k-1}` is the last `y` position and vice versa.
//! - U-pairs come from the square unfolding whose rows run over the even
//!   positions and columns over the odd positions; `T * X = M vec(X)`.

use nalgebra::{Complex, DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{KronError, Result};
use crate::kron::kron;
use crate::linalg;
use crate::tensor::{dot, kron_vec, next_index, norm2, DenseTensor, StructureKind};

/// Supersymmetry precondition tolerance for the symmetric solvers.
pub const SUPERSYMMETRY_TOL: f64 = 1e-8;
/// Vector distance below which two converged pairs are considered equal.
pub const DEDUP_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenKind {
    H,
    Z,
    M,
    U,
}

impl std::fmt::Display for EigenKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EigenKind::H => "H",
            EigenKind::Z => "Z",
            EigenKind::M => "M",
            EigenKind::U => "U",
        };
        f.write_str(s)
    }
}

/// An H- or Z-eigenpair.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpair {
    pub kind: EigenKind,
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Generalized M-eigentriple `(λ, x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigentriple {
    pub value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// U-eigenpair `(λ, X)` with complex `X = re + i·im`, unit Frobenius norm and
/// its largest-magnitude entry real and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct UEigenpair {
    pub value: Complex64,
    pub re: DenseTensor,
    pub im: DenseTensor,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shift {
    /// Solver-chosen. The Z solver recomputes the smallest shift keeping
    /// the objective locally convex at every iterate and, for even orders,
    /// also runs the concave variant.
    Adaptive,
    /// Positive values run the convex iteration, negative the concave one.
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub starts: usize,
    pub shift: Shift,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1000,
            starts: 10,
            shift: Shift::Adaptive,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 || self.starts == 0 {
            return Err(KronError::InvalidArgument(format!(
                "solver options need tol > 0, max_iter > 0, starts >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }
}

/// Whether the H power iteration carries its convergence guarantee.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HStatus {
    Guaranteed,
    /// The tensor has negative entries; results are best effort.
    BestEffort,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HEigenResult {
    pub pairs: Vec<Eigenpair>,
    pub status: HStatus,
}

fn require_supersymmetric(t: &DenseTensor) -> Result<usize> {
    let n = t
        .cubical_dim()
        .ok_or_else(|| KronError::Shape(format!("expected a cubical tensor, got dims {:?}", t.dims())))?;
    if !t.structure_check(StructureKind::Supersymmetric, SUPERSYMMETRY_TOL)? {
        return Err(KronError::NotSupersymmetric { tol: SUPERSYMMETRY_TOL });
    }
    Ok(n)
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for u in basis {
        let c = dot(v, u);
        v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
    }
}

fn first_significant_sign(v: &[f64]) -> f64 {
    match v.iter().find(|x| x.abs() > 1e-8) {
        Some(&x) if x < 0.0 => -1.0,
        _ => 1.0,
    }
}

/// Shift used by one SS-HOPM run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum ShiftRule {
    Fixed(f64),
    /// Recomputed every iteration from the spectrum of `(k−1)·T x^{k−2}` so
    /// the shifted objective is locally convex (ascent).
    Convex,
    /// Mirror of `Convex` for descent towards local minima.
    Concave,
}

const SHIFT_MARGIN: f64 = 1e-6;

fn shift_at(t: &DenseTensor, x: &[f64], rule: ShiftRule) -> Option<f64> {
    match rule {
        ShiftRule::Fixed(a) => Some(a),
        ShiftRule::Convex | ShiftRule::Concave => {
            let h = t.apply_polynomial_matrix(x).ok()? * (t.order() - 1) as f64;
            let (eig, _) = crate::linalg::symmetric_eigen(&h);
            let (hi, lo) = (eig[0], eig[eig.len() - 1]);
            Some(if rule == ShiftRule::Convex {
                (SHIFT_MARGIN - lo).max(0.0)
            } else {
                -(SHIFT_MARGIN + hi).max(0.0)
            })
        }
    }
}

/// Outcome of one shifted power run.
pub(crate) struct ZRun {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// One SS-HOPM run from `x0`. Iterates are kept orthogonal to `deflated`.
/// A positive shift climbs towards local maxima of `T x^k`, a negative one
/// descends towards local minima.
pub(crate) fn sshopm_single(
    t: &DenseTensor,
    x0: &[f64],
    rule: ShiftRule,
    tol: f64,
    max_iter: usize,
    deflated: &[Vec<f64>],
) -> Option<ZRun> {
    let mut x = x0.to_vec();
    project_out(&mut x, deflated);
    if normalize(&mut x) < 1e-12 {
        return None;
    }
    for it in 0..=max_iter {
        let mut g = t.apply_polynomial(&x).ok()?;
        project_out(&mut g, deflated);
        let lambda = dot(&x, &g);
        let residual = norm2(&g.iter().zip(&x).map(|(a, b)| a - lambda * b).collect::<Vec<_>>());
        if !residual.is_finite() {
            return None;
        }
        if residual <= tol * lambda.abs().max(1.0) {
            return Some(ZRun {
                value: lambda,
                vector: x,
                residual,
                iterations: it,
            });
        }
        if it == max_iter {
            break;
        }
        let alpha = shift_at(t, &x, rule)?;
        let sign = if alpha < 0.0 || rule == ShiftRule::Concave { -1.0 } else { 1.0 };
        let mut next: Vec<f64> = g.iter().zip(&x).map(|(a, b)| sign * (a + alpha * b)).collect();
        project_out(&mut next, deflated);
        if normalize(&mut next) < 1e-300 {
            return None;
        }
        x = next;
    }
    None
}

/// Even orders search both maxima and minima of `T x^k`; for odd orders the
/// minima are the negated maxima.
pub(crate) fn shift_rules(order: usize, shift: Shift) -> Vec<ShiftRule> {
    match shift {
        Shift::Fixed(a) => vec![ShiftRule::Fixed(a)],
        Shift::Adaptive if order.is_multiple_of(2) => vec![ShiftRule::Convex, ShiftRule::Concave],
        Shift::Adaptive => vec![ShiftRule::Convex],
    }
}

fn canonical_z(t: &DenseTensor, value: f64, mut vector: Vec<f64>) -> (f64, Vec<f64>) {
    if first_significant_sign(&vector) < 0.0 {
        vector.iter_mut().for_each(|x| *x = -*x);
        if t.order() % 2 == 1 {
            return (-value, vector);
        }
    }
    (value, vector)
}

fn dedup_sort(mut pairs: Vec<Eigenpair>) -> Vec<Eigenpair> {
    let mut kept: Vec<Eigenpair> = Vec::new();
    for p in pairs.drain(..) {
        let dup = kept.iter().any(|q| {
            let d: f64 = q
                .vector
                .iter()
                .zip(&p.vector)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d < DEDUP_TOL
        });
        if !dup {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| {
        b.value
            .total_cmp(&a.value)
            .then_with(|| cmp_lex(&a.vector, &b.vector))
    });
    kept
}

fn cmp_lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn random_unit_starts(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| crate::samples::unit_vector(n, &mut rng)).collect()
}

/// Z-eigenpairs of a supersymmetric tensor by the shifted symmetric
/// higher-order power method from `opts.starts` seeded random unit starts.
pub fn z_eigen_sshopm(t: &DenseTensor, opts: &SolverOptions) -> Result<Vec<Eigenpair>> {
    opts.validate()?;
    let n = require_supersymmetric(t)?;
    let starts = random_unit_starts(n, opts.starts, opts.seed);
    z_eigen_from_starts(t, &starts, opts)
}

/// As [`z_eigen_sshopm`] with caller-provided starting vectors.
pub fn z_eigen_from_starts(t: &DenseTensor, starts: &[Vec<f64>], opts: &SolverOptions) -> Result<Vec<Eigenpair>> {
    opts.validate()?;
    let n = require_supersymmetric(t)?;
    let mut found = Vec::new();
    for rule in shift_rules(t.order(), opts.shift) {
        for x0 in starts {
            if x0.len() != n {
                return Err(KronError::Shape(format!("start of length {} for dimension {n}", x0.len())));
            }
            if let Some(run) = sshopm_single(t, x0, rule, opts.tol, opts.max_iter, &[]) {
                let (value, vector) = canonical_z(t, run.value, run.vector);
                found.push(Eigenpair {
                    kind: EigenKind::Z,
                    value,
                    vector,
                    residual: run.residual,
                    iterations: run.iterations,
                });
            }
        }
    }
    if found.is_empty() {
        return Err(KronError::NoConvergence(format!(
            "SS-HOPM: none of {} starts reached tol {:e} in {} iterations",
            starts.len(),
            opts.tol,
            opts.max_iter
        )));
    }
    Ok(dedup_sort(found))
}

/// Pair with the largest `|λ|`.
pub fn dominant(pairs: &[Eigenpair]) -> Option<&Eigenpair> {
    pairs.iter().max_by(|a, b| a.value.abs().total_cmp(&b.value.abs()))
}

fn hadamard_power(x: &[f64], p: usize) -> Vec<f64> {
    x.iter().map(|v| v.powi(p as i32)).collect()
}

fn normalize_h(x: &mut [f64], k: usize) -> f64 {
    let q = (k - 1).max(1) as f64;
    let s = x.iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q);
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    }
    s
}

fn h_single(t: &DenseTensor, x0: &[f64], shift: f64, tol: f64, max_iter: usize) -> Option<ZRun> {
    let k = t.order();
    let q = (k - 1).max(1);
    let mut x = x0.to_vec();
    if normalize_h(&mut x, k) < 1e-12 {
        return None;
    }
    for it in 0..=max_iter {
        let g = t.apply_polynomial(&x).ok()?;
        let xp = hadamard_power(&x, q);
        let denom = dot(&x, &xp);
        if denom.abs() < 1e-300 {
            return None;
        }
        let lambda = dot(&x, &g) / denom;
        let r: Vec<f64> = g.iter().zip(&xp).map(|(a, b)| a - lambda * b).collect();
        let residual = norm2(&r);
        if !residual.is_finite() {
            return None;
        }
        if residual <= tol * lambda.abs().max(1.0) {
            return Some(ZRun {
                value: lambda,
                vector: x,
                residual,
                iterations: it,
            });
        }
        if it == max_iter {
            break;
        }
        let mut next: Vec<f64> = g
            .iter()
            .zip(&xp)
            .map(|(a, b)| {
                let y = a + shift * b;
                y.signum() * y.abs().powf(1.0 / q as f64)
            })
            .collect();
        if normalize_h(&mut next, k) < 1e-300 {
            return None;
        }
        x = next;
    }
    None
}

/// H-eigenpairs by the shifted power iteration
/// `x ← (T x^{k-1} + s·x^{[k-1]})^{[1/(k-1)]}`, normalized to `‖x‖_{k-1} = 1`.
///
/// Convergence is only guaranteed for entrywise-nonnegative tensors. Starts
/// are: the all-ones vector, then the coordinate vectors, then random
/// nonnegative vectors on random supports (which reach the eigenvectors of
/// invariant sub-blocks of reducible tensors).
pub fn h_eigen_power(t: &DenseTensor, opts: &SolverOptions) -> Result<HEigenResult> {
    opts.validate()?;
    let n = require_supersymmetric(t)?;
    if t.order() < 2 {
        return Err(KronError::Shape("H-eigenpairs need order >= 2".into()));
    }
    let nonneg = t.data().iter().all(|&v| v >= 0.0);
    let status = if nonneg { HStatus::Guaranteed } else { HStatus::BestEffort };
    let shift = match opts.shift {
        Shift::Fixed(s) => s,
        Shift::Adaptive => 1.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<f64>> = (0..opts.starts)
        .map(|s| match s {
            0 => vec![1.0; n],
            s if s <= n => (0..n).map(|i| if i + 1 == s { 1.0 } else { 0.0 }).collect(),
            _ => loop {
                let v: Vec<f64> = (0..n)
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            if nonneg {
                                rng.gen_range(0.1..1.0)
                            } else {
                                rng.gen_range(-1.0..1.0)
                            }
                        } else {
                            0.0
                        }
                    })
                    .collect();
                if v.iter().any(|&x| x != 0.0) {
                    break v;
                }
            },
        })
        .collect();
    let mut found = Vec::new();
    for x0 in &starts {
        if let Some(run) = h_single(t, x0, shift, opts.tol, opts.max_iter) {
            let mut vector = run.vector;
            if first_significant_sign(&vector) < 0.0 {
                vector.iter_mut().for_each(|x| *x = -*x);
            }
            found.push(Eigenpair {
                kind: EigenKind::H,
                value: run.value,
                vector,
                residual: run.residual,
                iterations: run.iterations,
            });
        }
    }
    if found.is_empty() {
        return Err(KronError::NoConvergence(format!(
            "H power iteration: none of {} starts reached tol {:e}",
            starts.len(),
            opts.tol
        )));
    }
    Ok(HEigenResult {
        pairs: dedup_sort(found),
        status,
    })
}

/// Contracts every mode except `free` with the vector assigned to it.
fn contract_except(t: &DenseTensor, vecs: &[&[f64]], free: usize) -> Vec<f64> {
    let dims = t.dims();
    let mut out = vec![0.0; dims[free]];
    let mut index = vec![0; dims.len()];
    for &v in t.data() {
        if v != 0.0 {
            let mut w = v;
            for (p, &i) in index.iter().enumerate() {
                if p != free {
                    w *= vecs[p][i];
                }
            }
            out[index[free]] += w;
        }
        next_index(dims, &mut index);
    }
    out
}

fn m_vectors<'a>(order: usize, x: &'a [f64], y: &'a [f64]) -> Vec<&'a [f64]> {
    (0..order).map(|p| if p % 2 == 0 { x } else { y }).collect()
}

/// `(T x^k y^{k-1}, T y^k x^{k-1})`.
pub fn m_contractions(t: &DenseTensor, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let vecs = m_vectors(t.order(), x, y);
    let gy = contract_except(t, &vecs, t.order() - 1);
    let gx = contract_except(t, &vecs, t.order() - 2);
    (gy, gx)
}

fn require_even_cubical(t: &DenseTensor) -> Result<usize> {
    let n = t
        .cubical_dim()
        .ok_or_else(|| KronError::Shape(format!("expected a cubical tensor, got dims {:?}", t.dims())))?;
    if !t.order().is_multiple_of(2) || t.order() == 0 {
        return Err(KronError::Shape(format!("expected even order, got {}", t.order())));
    }
    Ok(n)
}

/// M-eigentriples by alternating shifted power steps on `x` and `y`.
pub fn m_eigen_alternating(t: &DenseTensor, opts: &SolverOptions) -> Result<Vec<Eigentriple>> {
    opts.validate()?;
    let n = require_even_cubical(t)?;
    let alpha = match opts.shift {
        Shift::Fixed(a) => a,
        Shift::Adaptive => t.order() as f64 / 2.0 * t.frobenius_norm(),
    };
    let sign = if alpha < 0.0 { -1.0 } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut found: Vec<Eigentriple> = Vec::new();
    for _ in 0..opts.starts {
        let mut x = crate::samples::unit_vector(n, &mut rng);
        let mut y = crate::samples::unit_vector(n, &mut rng);
        for it in 0..=opts.max_iter {
            let (gy, gx) = m_contractions(t, &x, &y);
            let lambda = dot(&y, &gy);
            let rx = norm2(&gx.iter().zip(&x).map(|(a, b)| a - lambda * b).collect::<Vec<_>>());
            let ry = norm2(&gy.iter().zip(&y).map(|(a, b)| a - lambda * b).collect::<Vec<_>>());
            let residual = rx.max(ry);
            if !residual.is_finite() {
                break;
            }
            if residual <= opts.tol * lambda.abs().max(1.0) {
                // flipping x or y alone multiplies λ by (-1)^k
                let flip = if (t.order() / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
                let mut lambda = lambda;
                for v in [&mut x, &mut y] {
                    if first_significant_sign(v) < 0.0 {
                        v.iter_mut().for_each(|c| *c = -*c);
                        lambda *= flip;
                    }
                }
                let dup = found.iter().any(|f| {
                    let d = |a: &[f64], b: &[f64]| norm2(&a.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
                    d(&f.x, &x) < DEDUP_TOL && d(&f.y, &y) < DEDUP_TOL
                });
                if !dup {
                    found.push(Eigentriple {
                        value: lambda,
                        x: x.clone(),
                        y: y.clone(),
                        residual,
                        iterations: it,
                    });
                }
                break;
            }
            if it == opts.max_iter {
                break;
            }
            let mut nx: Vec<f64> = gx.iter().zip(&x).map(|(a, b)| sign * (a + alpha * b)).collect();
            if normalize(&mut nx) < 1e-300 {
                break;
            }
            x = nx;
            let gy = m_contractions(t, &x, &y).0;
            let mut ny: Vec<f64> = gy.iter().zip(&y).map(|(a, b)| sign * (a + alpha * b)).collect();
            if normalize(&mut ny) < 1e-300 {
                break;
            }
            y = ny;
        }
    }
    if found.is_empty() {
        return Err(KronError::NoConvergence(format!(
            "alternating M iteration: none of {} starts reached tol {:e}",
            opts.starts, opts.tol
        )));
    }
    found.sort_by(|a, b| {
        b.value
            .total_cmp(&a.value)
            .then_with(|| cmp_lex(&a.x, &b.x))
            .then_with(|| cmp_lex(&a.y, &b.y))
    });
    Ok(found)
}

/// Dims `(n_1, …, n_k)` of the U-eigentensors of an order-`2k` tensor with
/// paired dims `n_1, n_1, …, n_k, n_k`.
pub fn u_dims(t: &DenseTensor) -> Result<Vec<usize>> {
    let d = t.dims();
    if d.is_empty() || !d.len().is_multiple_of(2) || d.chunks(2).any(|c| c[0] != c[1]) {
        return Err(KronError::Shape(format!("U-eigenpairs need paired dims n1,n1,…,nk,nk; got {d:?}")));
    }
    Ok(d.iter().step_by(2).copied().collect())
}

/// Square unfolding `M` with `(T * X) = M vec(X)`.
pub fn u_unfolding(t: &DenseTensor) -> Result<DMatrix<f64>> {
    let half = u_dims(t)?;
    let size: usize = half.iter().product();
    let hs = crate::tensor::strides(&half);
    let mut m = DMatrix::zeros(size, size);
    let mut index = vec![0; t.order()];
    for &v in t.data() {
        let (mut r, mut c) = (0, 0);
        for q in 0..half.len() {
            r += index[2 * q] * hs[q];
            c += index[2 * q + 1] * hs[q];
        }
        m[(r, c)] = v;
        next_index(t.dims(), &mut index);
    }
    Ok(m)
}

fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

/// Multiset of U-eigenvalues (eigenvalues of the square unfolding), sorted by
/// real part then imaginary part, descending.
pub fn u_eigenvalues(t: &DenseTensor) -> Result<Vec<Complex64>> {
    let m = u_unfolding(t)?;
    let mut vals: Vec<Complex64> = if is_symmetric(&m) {
        linalg::symmetric_eigen(&m).0.into_iter().map(|v| Complex64::new(v, 0.0)).collect()
    } else {
        m.complex_eigenvalues().iter().map(|c| Complex64::new(c.re, c.im)).collect()
    };
    sort_complex(&mut vals);
    Ok(vals)
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let scale = linalg::max_abs(m).max(1.0);
    (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= 1e-14 * scale))
}

fn phase_normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut big = Complex64::new(0.0, 0.0);
    for c in v.iter() {
        if c.norm() > big.norm() + 1e-12 {
            big = *c;
        }
    }
    let phase = if big.norm() > 0.0 { big.conj() / big.norm() } else { Complex64::new(1.0, 0.0) };
    for c in v.iter_mut() {
        *c = *c * phase / norm;
    }
}

/// U-eigenpairs via the square unfolding: every matrix eigenpair `(λ, v)` of
/// `M` is a U-eigenpair `(λ, X)` with `vec(X) = v`, and conversely.
/// Repeated eigenvalues contribute one pair per independent eigenvector.
pub fn u_eigen(t: &DenseTensor) -> Result<Vec<UEigenpair>> {
    let half = u_dims(t)?;
    let m = u_unfolding(t)?;
    let size = m.nrows();
    let mut vectors: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    if is_symmetric(&m) {
        let (vals, q) = linalg::symmetric_eigen(&m);
        for (j, &l) in vals.iter().enumerate() {
            vectors.push((
                Complex64::new(l, 0.0),
                q.column(j).iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            ));
        }
    } else {
        let mut vals: Vec<Complex64> = m.complex_eigenvalues().iter().map(|c| Complex64::new(c.re, c.im)).collect();
        sort_complex(&mut vals);
        let scale = linalg::max_abs(&m).max(1.0);
        let mc: DMatrix<Complex<f64>> = m.map(|v| Complex::new(v, 0.0));
        let mut start = 0;
        while start < vals.len() {
            let lambda = vals[start];
            let mut end = start + 1;
            while end < vals.len() && (vals[end] - lambda).norm() <= 1e-8 * scale {
                end += 1;
            }
            let mult = end - start;
            let shifted = &mc - DMatrix::<Complex<f64>>::identity(size, size) * Complex::new(lambda.re, lambda.im);
            let svd = shifted.svd(false, true);
            let v_t = svd.v_t.expect("requested Vᵀ");
            let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
            order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
            let null: Vec<usize> = order
                .iter()
                .copied()
                .filter(|&j| svd.singular_values[j] <= 1e-6 * scale)
                .take(mult)
                .collect();
            let picks = if null.is_empty() { vec![order[0]] } else { null };
            for j in picks {
                // right singular vector = conjugate of the row of Vᴴ
                let v: Vec<Complex64> = v_t.row(j).iter().map(|c| Complex64::new(c.re, -c.im)).collect();
                vectors.push((lambda, v));
            }
            start = end;
        }
    }
    let mut pairs = Vec::with_capacity(vectors.len());
    for (value, mut v) in vectors {
        phase_normalize(&mut v);
        let re = DenseTensor::new(half.clone(), v.iter().map(|c| c.re).collect())?;
        let im = DenseTensor::new(half.clone(), v.iter().map(|c| c.im).collect())?;
        let mut pair = UEigenpair {
            value,
            re,
            im,
            residual: 0.0,
        };
        pair.residual = u_residual(t, &pair)?;
        pairs.push(pair);
    }
    Ok(pairs)
}

/// `‖T x^{k-1} − λx‖₂`.
pub fn z_residual(t: &DenseTensor, value: f64, x: &[f64]) -> Result<f64> {
    let g = t.apply_polynomial(x)?;
    Ok(norm2(&g.iter().zip(x).map(|(a, b)| a - value * b).collect::<Vec<_>>()))
}

/// `‖T x^{k-1} − λ x^{[k-1]}‖₂`.
pub fn h_residual(t: &DenseTensor, value: f64, x: &[f64]) -> Result<f64> {
    let g = t.apply_polynomial(x)?;
    let xp = hadamard_power(x, t.order().saturating_sub(1));
    Ok(norm2(&g.iter().zip(&xp).map(|(a, b)| a - value * b).collect::<Vec<_>>()))
}

/// Residual of an H- or Z-pair under its defining equation.
pub fn residual(t: &DenseTensor, pair: &Eigenpair) -> Result<f64> {
    match pair.kind {
        EigenKind::Z => z_residual(t, pair.value, &pair.vector),
        EigenKind::H => h_residual(t, pair.value, &pair.vector),
        k => Err(KronError::KindMismatch(k.to_string(), "H or Z".into())),
    }
}

/// Larger of the two defining-equation residuals.
pub fn m_residual(t: &DenseTensor, triple: &Eigentriple) -> Result<f64> {
    let n = require_even_cubical(t)?;
    if triple.x.len() != n || triple.y.len() != n {
        return Err(KronError::Shape("triple vectors do not match the tensor dimension".into()));
    }
    let (gy, gx) = m_contractions(t, &triple.x, &triple.y);
    let l = triple.value;
    let ry = norm2(&gy.iter().zip(&triple.y).map(|(a, b)| a - l * b).collect::<Vec<_>>());
    let rx = norm2(&gx.iter().zip(&triple.x).map(|(a, b)| a - l * b).collect::<Vec<_>>());
    Ok(rx.max(ry))
}

/// `‖T * X − λX‖_F` for complex `X`, evaluated with real Einstein products.
pub fn u_residual(t: &DenseTensor, pair: &UEigenpair) -> Result<f64> {
    let tr = t.einstein_product(&pair.re)?;
    let ti = t.einstein_product(&pair.im)?;
    let (a, b) = (pair.value.re, pair.value.im);
    let mut s = 0.0;
    for i in 0..tr.len() {
        let (xr, xi) = (pair.re.data()[i], pair.im.data()[i]);
        let dr = tr.data()[i] - (a * xr - b * xi);
        let di = ti.data()[i] - (a * xi + b * xr);
        s += dr * dr + di * di;
    }
    Ok(s.sqrt())
}

fn composed_residual_bound(a: f64, ra: f64, b: f64, rb: f64) -> f64 {
    a.abs() * rb + b.abs() * ra + ra * rb
}

/// `(αβ, x ⊗ y)` for two H-pairs or two Z-pairs. The composed `residual`
/// field holds the bound `|α|r_C + |β|r_B + r_B r_C` on its residual over
/// `B ⊗ C`.
pub fn compose_pairs(b: &Eigenpair, c: &Eigenpair) -> Result<Eigenpair> {
    if b.kind != c.kind || !matches!(b.kind, EigenKind::H | EigenKind::Z) {
        return Err(KronError::KindMismatch(b.kind.to_string(), c.kind.to_string()));
    }
    Ok(Eigenpair {
        kind: b.kind,
        value: b.value * c.value,
        vector: kron_vec(&b.vector, &c.vector),
        residual: composed_residual_bound(b.value, b.residual, c.value, c.residual),
        iterations: 0,
    })
}

/// `(αβ, w ⊗ y, x ⊗ z)` from `(α, w, x)` and `(β, y, z)`.
pub fn compose_triples(b: &Eigentriple, c: &Eigentriple) -> Eigentriple {
    Eigentriple {
        value: b.value * c.value,
        x: kron_vec(&b.x, &c.x),
        y: kron_vec(&b.y, &c.y),
        residual: composed_residual_bound(b.value, b.residual, c.value, c.residual),
        iterations: 0,
    }
}

/// `(αβ, X ⊗ Y)` for U-pairs.
pub fn compose_u(b: &UEigenpair, c: &UEigenpair) -> Result<UEigenpair> {
    let rr = kron(&b.re, &c.re)?;
    let ii = kron(&b.im, &c.im)?;
    let ri = kron(&b.re, &c.im)?;
    let ir = kron(&b.im, &c.re)?;
    Ok(UEigenpair {
        value: b.value * c.value,
        re: rr.sub(&ii)?,
        im: ri.add(&ir)?,
        residual: composed_residual_bound(b.value.norm(), b.residual, c.value.norm(), c.residual),
    })
}

/// Real matrix view used by tests and the CLI.
pub fn u_vector(pair: &UEigenpair) -> DVector<Complex64> {
    DVector::from_iterator(
        pair.re.len(),
        pair.re.data().iter().zip(pair.im.data()).map(|(&a, &b)| Complex64::new(a, b)),
    )
}
