//! Homogeneous polynomial dynamics `ẋ = T x^{k−1}` and `x(t+1) = T x(t)^{k−1}`:
//! simulation and odeco-based stability classification of the origin.

use crate::decomp::{self, OdecoDecomp, OdecoOptions};
use crate::error::{KronError, Result};
use crate::linalg;
use crate::tensor::{dot, norm2, DenseTensor, StructureKind};

/// Test values within this distance of the threshold count as the boundary.
pub const TIE_TOL: f64 = 1e-12;
/// State norm beyond which a trajectory is declared divergent.
pub const BLOWUP_NORM: f64 = 1e150;
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub diverged: bool,
    /// Time of the first non-finite or exploding state.
    pub blowup_time: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectories hold the initial state")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    AsymptoticallyStable,
    Unstable,
    Undecidable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "Stable",
            Verdict::AsymptoticallyStable => "AsymptoticallyStable",
            Verdict::Unstable => "Unstable",
            Verdict::Undecidable => "Undecidable",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeMode {
    Continuous,
    Discrete,
}

/// One odeco direction: `λ_j`, `α_j = ⟨x0, u_j⟩` and the test value.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeEvidence {
    pub lambda: f64,
    pub alpha: f64,
    pub test: f64,
    /// The test value sits on the threshold within [`TIE_TOL`].
    pub boundary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityVerdict {
    pub verdict: Verdict,
    pub evidence: Vec<ModeEvidence>,
    pub mode: TimeMode,
    pub odeco_residual: Option<f64>,
    /// Why the verdict is `Undecidable`, if it is.
    pub note: Option<String>,
}

fn check_state(t: &DenseTensor, x0: &[f64]) -> Result<usize> {
    let n = t
        .cubical_dim()
        .ok_or_else(|| KronError::Shape(format!("expected a cubical tensor, got {:?}", t.dims())))?;
    if t.order() < 2 {
        return Err(KronError::Shape("dynamics need order >= 2".into()));
    }
    if x0.len() != n {
        return Err(KronError::Shape(format!("state of length {} for dimension {n}", x0.len())));
    }
    Ok(n)
}

fn exploded(x: &[f64]) -> bool {
    x.iter().any(|v| !v.is_finite()) || norm2(x) > BLOWUP_NORM
}

/// Iterates `x ← T x^{k−1}` for `steps` steps, stopping at the first
/// non-finite or exploding state.
pub fn simulate_discrete(t: &DenseTensor, x0: &[f64], steps: usize) -> Result<Trajectory> {
    check_state(t, x0)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.to_vec()],
        diverged: false,
        blowup_time: None,
    };
    for s in 1..=steps {
        let next = t.apply_polynomial(traj.last())?;
        traj.times.push(s as f64);
        let bad = exploded(&next);
        traj.states.push(next);
        if bad {
            traj.diverged = true;
            traj.blowup_time = Some(s as f64);
            break;
        }
    }
    Ok(traj)
}

/// Classic fourth-order Runge–Kutta with fixed step `dt`; the final step is
/// shortened to land on `t_end`.
pub fn simulate_continuous(t: &DenseTensor, x0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    check_state(t, x0)?;
    if !(dt > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(KronError::InvalidArgument(format!("need dt > 0 and finite t_end >= 0 (dt={dt}, t_end={t_end})")));
    }
    let f = |x: &[f64]| t.apply_polynomial(x);
    let axpy = |x: &[f64], a: f64, k: &[f64]| -> Vec<f64> { x.iter().zip(k).map(|(u, v)| u + a * v).collect() };
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.to_vec()],
        diverged: false,
        blowup_time: None,
    };
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let mut time = 0.0;
    for s in 0..steps {
        let h = if s + 1 == steps { t_end - time } else { dt };
        let x = traj.last().to_vec();
        let k1 = f(&x)?;
        let k2 = f(&axpy(&x, h / 2.0, &k1))?;
        let k3 = f(&axpy(&x, h / 2.0, &k2))?;
        let k4 = f(&axpy(&x, h, &k3))?;
        let next: Vec<f64> = (0..x.len())
            .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        time = if s + 1 == steps { t_end } else { time + h };
        traj.times.push(time);
        let bad = exploded(&next);
        traj.states.push(next);
        if bad {
            traj.diverged = true;
            traj.blowup_time = Some(time);
            break;
        }
    }
    Ok(traj)
}

fn undecidable(mode: TimeMode, residual: Option<f64>, note: String) -> StabilityVerdict {
    StabilityVerdict {
        verdict: Verdict::Undecidable,
        evidence: Vec::new(),
        mode,
        odeco_residual: residual,
        note: Some(note),
    }
}

/// Maps per-mode tests against `threshold`: any above → Unstable, all below →
/// AsymptoticallyStable, otherwise Stable (boundary ties flagged).
fn verdict_from(mode: TimeMode, terms: Vec<(f64, f64, f64)>, threshold: f64, residual: Option<f64>) -> StabilityVerdict {
    let evidence: Vec<ModeEvidence> = terms
        .into_iter()
        .map(|(lambda, alpha, test)| ModeEvidence {
            lambda,
            alpha,
            test,
            boundary: (test - threshold).abs() <= TIE_TOL,
        })
        .collect();
    let verdict = if evidence.iter().any(|e| e.test > threshold + TIE_TOL) {
        Verdict::Unstable
    } else if evidence.iter().all(|e| e.test < threshold - TIE_TOL) {
        Verdict::AsymptoticallyStable
    } else {
        Verdict::Stable
    };
    StabilityVerdict {
        verdict,
        evidence,
        mode,
        odeco_residual: residual,
        note: None,
    }
}

/// Linear case `k = 2`: eigenvalues of the symmetric matrix decide.
fn classify_linear(t: &DenseTensor, x0: &[f64], mode: TimeMode) -> Result<StabilityVerdict> {
    let m = t.to_matrix()?;
    let (values, q) = linalg::symmetric_eigen(&m);
    let terms = values
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            let alpha = q.column(j).dot(&nalgebra::DVector::from_column_slice(x0));
            let test = match mode {
                TimeMode::Continuous => l,
                TimeMode::Discrete => l.abs(),
            };
            (l, alpha, test)
        })
        .collect();
    let threshold = if mode == TimeMode::Continuous { 0.0 } else { 1.0 };
    Ok(verdict_from(mode, terms, threshold, Some(0.0)))
}

fn decompose(t: &DenseTensor, x0: &[f64], mode: TimeMode, opts: &OdecoOptions) -> Result<std::result::Result<OdecoDecomp, StabilityVerdict>> {
    check_state(t, x0)?;
    if !t.structure_check(StructureKind::Supersymmetric, crate::spectral::SUPERSYMMETRY_TOL)? {
        return Ok(Err(undecidable(mode, None, "tensor is not supersymmetric".into())));
    }
    let d = match decomp::odeco(t, opts) {
        Ok(d) => d,
        Err(e) => return Ok(Err(undecidable(mode, None, format!("odeco failed: {e}")))),
    };
    if !d.is_odeco {
        let r = d.residual;
        return Ok(Err(undecidable(
            mode,
            Some(r),
            format!("not odeco: relative residual {r:e} above {:e}", opts.odeco_tol),
        )));
    }
    Ok(Ok(d))
}

/// Continuous-time verdict from a given odeco decomposition. Tests are
/// `λ_j α_j^{k−2}` over an orthonormal basis completed with `λ = 0`
/// directions.
pub fn classify_continuous_with(d: &OdecoDecomp, x0: &[f64]) -> Result<StabilityVerdict> {
    classify_with(d, x0, TimeMode::Continuous)
}

/// Discrete-time verdict from a given odeco decomposition. Tests are
/// `|α_j|·|λ_j|^{1/(k−2)}` against 1.
pub fn classify_discrete_with(d: &OdecoDecomp, x0: &[f64]) -> Result<StabilityVerdict> {
    classify_with(d, x0, TimeMode::Discrete)
}

fn classify_with(d: &OdecoDecomp, x0: &[f64], mode: TimeMode) -> Result<StabilityVerdict> {
    if d.vectors.nrows() != x0.len() {
        return Err(KronError::Shape(format!(
            "state of length {} for dimension {}",
            x0.len(),
            d.vectors.nrows()
        )));
    }
    if d.order < 3 {
        return Err(KronError::Shape("odeco stability tests need order >= 3".into()));
    }
    if !d.is_odeco {
        return Ok(undecidable(mode, Some(d.residual), "decomposition is not odeco".into()));
    }
    let full = decomp::complete_basis(d);
    let k = d.order as i32;
    let terms = full
        .values
        .iter()
        .enumerate()
        .map(|(j, &lambda)| {
            let u: Vec<f64> = full.vectors.column(j).iter().copied().collect();
            let alpha = dot(x0, &u);
            let test = match mode {
                TimeMode::Continuous => lambda * alpha.powi(k - 2),
                TimeMode::Discrete => alpha.abs() * lambda.abs().powf(1.0 / (k - 2) as f64),
            };
            (lambda, alpha, test)
        })
        .collect();
    let threshold = if mode == TimeMode::Continuous { 0.0 } else { 1.0 };
    Ok(verdict_from(mode, terms, threshold, Some(d.residual)))
}

/// Stability of the origin of `ẋ = T x^{k−1}` from `x0`.
pub fn classify_stability_continuous(t: &DenseTensor, x0: &[f64], opts: &OdecoOptions) -> Result<StabilityVerdict> {
    check_state(t, x0)?;
    if t.order() == 2 {
        return classify_linear(t, x0, TimeMode::Continuous);
    }
    match decompose(t, x0, TimeMode::Continuous, opts)? {
        Ok(d) => classify_continuous_with(&d, x0),
        Err(v) => Ok(v),
    }
}

/// Stability of the origin of `x(t+1) = T x(t)^{k−1}` from `x0`.
pub fn classify_stability_discrete(t: &DenseTensor, x0: &[f64], opts: &OdecoOptions) -> Result<StabilityVerdict> {
    check_state(t, x0)?;
    if t.order() == 2 {
        return classify_linear(t, x0, TimeMode::Discrete);
    }
    match decompose(t, x0, TimeMode::Discrete, opts)? {
        Ok(d) => classify_discrete_with(&d, x0),
        Err(v) => Ok(v),
    }
}
