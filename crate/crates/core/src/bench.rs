//! Direct-vs-Kronecker timing harness.
//!
//! For every factor dimension `n` and trial, third-order `n`-dimensional
//! factors `B`, `C` are drawn uniform on (0, 1) (symmetrized for `zeig`) and
//! `A = B ⊗ C` is materialized. The Direct approach runs the algorithm on
//! `A`; the Kronecker approach runs it on `B` and `C` and composes. Only the
//! algorithm calls are timed; quality metrics are computed afterwards.

use std::fmt::Write as _;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decomp::{self, CpOptions};
use crate::error::{KronError, Result};
use crate::kron::kron;
use crate::samples;
use crate::spectral::{self, SolverOptions};
use crate::tensor::DenseTensor;

pub const CSV_HEADER: &str = "op,n,approach,trial,seconds,metric";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BenchOp {
    Cpd,
    Ttd,
    Zeig,
}

impl std::fmt::Display for BenchOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BenchOp::Cpd => "cpd",
            BenchOp::Ttd => "ttd",
            BenchOp::Zeig => "zeig",
        })
    }
}

impl std::str::FromStr for BenchOp {
    type Err = KronError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cpd" => Ok(BenchOp::Cpd),
            "ttd" => Ok(BenchOp::Ttd),
            "zeig" => Ok(BenchOp::Zeig),
            other => Err(KronError::InvalidArgument(format!("unknown benchmark op {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Approach {
    Direct,
    Kronecker,
}

impl std::fmt::Display for Approach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Approach::Direct => "direct",
            Approach::Kronecker => "kronecker",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub op: BenchOp,
    pub n: usize,
    pub approach: Approach,
    pub trial: usize,
    pub seconds: f64,
    /// CP fit, TT relative reconstruction error, or Z-eigen residual on `A`.
    pub metric: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub op: BenchOp,
    pub ns: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub cp_rank: usize,
    pub tt_tol: f64,
    pub solver: SolverOptions,
    pub parallel_trials: bool,
}

impl BenchConfig {
    pub fn new(op: BenchOp, ns: Vec<usize>) -> Self {
        Self {
            op,
            ns,
            trials: 5,
            seed: 0,
            cp_rank: 4,
            tt_tol: 0.0,
            solver: SolverOptions::default(),
            parallel_trials: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchSummary {
    pub op: BenchOp,
    pub n: usize,
    pub approach: Approach,
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub median: f64,
}

/// Splits a CP rank `r` into factor ranks `(a, r/a)` with `a` the largest
/// divisor not above `√r`.
pub fn split_rank(r: usize) -> (usize, usize) {
    let a = (1..=r).filter(|a| r.is_multiple_of(*a) && a * a <= r).max().unwrap_or(1);
    (a, r / a)
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(f64, T)> {
    let start = Instant::now();
    let out = f()?;
    Ok((start.elapsed().as_secs_f64().max(1e-9), out))
}

fn rel_error(a: &DenseTensor, approx: &DenseTensor) -> Result<f64> {
    Ok(a.sub(approx)?.frobenius_norm() / a.frobenius_norm().max(f64::MIN_POSITIVE))
}

fn trial_seed(seed: u64, n: usize, trial: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((n as u64) << 32) ^ trial as u64
}

fn run_trial(cfg: &BenchConfig, n: usize, trial: usize) -> Result<[BenchRecord; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, n, trial));
    let (b, c) = match cfg.op {
        BenchOp::Zeig => (
            samples::nonnegative_supersymmetric(n, 3, &mut rng),
            samples::nonnegative_supersymmetric(n, 3, &mut rng),
        ),
        _ => (
            samples::uniform(&[n, n, n], 0.0, 1.0, &mut rng),
            samples::uniform(&[n, n, n], 0.0, 1.0, &mut rng),
        ),
    };
    let a = kron(&b, &c)?;
    let solver = SolverOptions {
        seed: trial_seed(cfg.seed, n, trial),
        ..cfg.solver.clone()
    };
    let ((t_direct, m_direct), (t_kron, m_kron)) = match cfg.op {
        BenchOp::Cpd => {
            let opts = CpOptions {
                seed: solver.seed,
                ..CpOptions::default()
            };
            let (rb, rc) = split_rank(cfg.cp_rank);
            let (td, direct) = timed(|| decomp::cpd_als(&a, cfg.cp_rank, &opts))?;
            let (tk, composed) = timed(|| {
                let db = decomp::cpd_als(&b, rb, &opts)?;
                let dc = decomp::cpd_als(&c, rc, &opts)?;
                decomp::kron_compose_tucker(&db.decomp, &dc.decomp, false)
            })?;
            let fit_k = 1.0 - rel_error(&a, &decomp::reconstruct_tucker(&composed)?)?;
            ((td, direct.fit), (tk, fit_k))
        }
        BenchOp::Ttd => {
            let (td, direct) = timed(|| decomp::ttd(&a, cfg.tt_tol))?;
            let (tk, composed) = timed(|| {
                let db = decomp::ttd(&b, cfg.tt_tol)?;
                let dc = decomp::ttd(&c, cfg.tt_tol)?;
                decomp::kron_compose_tt(&db, &dc)
            })?;
            let ed = rel_error(&a, &decomp::reconstruct_tt(&direct)?)?;
            let ek = rel_error(&a, &decomp::reconstruct_tt(&composed)?)?;
            ((td, ed), (tk, ek))
        }
        BenchOp::Zeig => {
            let (td, direct) = timed(|| spectral::z_eigen_sshopm(&a, &solver))?;
            let (tk, composed) = timed(|| {
                let pb = spectral::z_eigen_sshopm(&b, &solver)?;
                let pc = spectral::z_eigen_sshopm(&c, &solver)?;
                let db = spectral::dominant(&pb).expect("nonempty on success");
                let dc = spectral::dominant(&pc).expect("nonempty on success");
                spectral::compose_pairs(db, dc)
            })?;
            let d = spectral::dominant(&direct).expect("nonempty on success");
            let rd = spectral::residual(&a, d)?;
            let rk = spectral::residual(&a, &composed)?;
            ((td, rd), (tk, rk))
        }
    };
    let rec = |approach, seconds, metric| BenchRecord {
        op: cfg.op,
        n,
        approach,
        trial,
        seconds,
        metric,
    };
    Ok([rec(Approach::Direct, t_direct, m_direct), rec(Approach::Kronecker, t_kron, m_kron)])
}

/// Runs every `(n, trial)` pair. Dimensions whose product tensor would
/// exceed the materialization budget are skipped and reported through
/// `notice`.
pub fn run_benchmark(cfg: &BenchConfig, notice: &mut dyn FnMut(String)) -> Result<Vec<BenchRecord>> {
    if cfg.trials == 0 || cfg.cp_rank == 0 {
        return Err(KronError::InvalidArgument("need trials >= 1 and cp_rank >= 1".into()));
    }
    let mut out = Vec::new();
    for &n in &cfg.ns {
        if n == 0 {
            return Err(KronError::InvalidArgument("factor dimension must be >= 1".into()));
        }
        let nn = n * n;
        if let Err(e) = crate::kron::check_budget(&[nn, nn, nn]) {
            notice(format!("skipping n = {n}: {e}"));
            continue;
        }
        let trials: Vec<[BenchRecord; 2]> = if cfg.parallel_trials {
            (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, n, t)).collect::<Result<_>>()?
        } else {
            (0..cfg.trials).map(|t| run_trial(cfg, n, t)).collect::<Result<_>>()?
        };
        let (mut direct, mut kronecker): (Vec<_>, Vec<_>) = trials.into_iter().map(|[d, k]| (d, k)).unzip();
        out.append(&mut direct);
        out.append(&mut kronecker);
    }
    Ok(out)
}

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.9e},{:.16e}",
            r.op, r.n, r.approach, r.trial, r.seconds, r.metric
        );
    }
    s
}

/// Mean, standard error and median of the timings per `(op, n, approach)`.
pub fn summarize(records: &[BenchRecord]) -> Vec<BenchSummary> {
    let mut groups: std::collections::BTreeMap<(BenchOp, usize, Approach), Vec<f64>> = Default::default();
    for r in records {
        groups.entry((r.op, r.n, r.approach)).or_default().push(r.seconds);
    }
    groups
        .into_iter()
        .map(|((op, n, approach), mut secs)| {
            let m = secs.len() as f64;
            let mean = secs.iter().sum::<f64>() / m;
            let var = if secs.len() > 1 {
                secs.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (m - 1.0)
            } else {
                0.0
            };
            secs.sort_by(f64::total_cmp);
            let mid = secs.len() / 2;
            let median = if secs.len() % 2 == 1 {
                secs[mid]
            } else {
                (secs[mid - 1] + secs[mid]) / 2.0
            };
            BenchSummary {
                op,
                n,
                approach,
                trials: secs.len(),
                mean,
                stderr: (var / m).sqrt(),
                median,
            }
        })
        .collect()
}
