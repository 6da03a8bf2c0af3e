use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kronten::bench::{self, BenchConfig, BenchOp};
use kronten::decomp::{self, CpOptions, OdecoOptions};
use kronten::dynamics::{self, StabilityVerdict};
use kronten::hypergraph::{self, Hypergraph};
use kronten::io::{self, Bundle, TnsLayout};
use kronten::spectral::{self, EigenKind, Shift, SolverOptions};
use kronten::{DenseTensor, KronError, Result};

#[derive(Parser)]
#[command(name = "kronten", version, about = "Tensor Kronecker products, eigenpairs, decompositions and hypergraph dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kronecker product of two or more tensors, left to right.
    Kron {
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        /// Write the sparse TNS1 layout.
        #[arg(long)]
        sparse: bool,
    },
    /// Decompose a tensor and print a summary; optionally write a bundle.
    Decomp(DecompArgs),
    /// Tensor eigenpairs.
    Eig(EigArgs),
    /// Hypergraph operations.
    #[command(subcommand)]
    Hg(HgCommand),
    /// Polynomial dynamics.
    #[command(subcommand)]
    Dyn(DynCommand),
    /// Direct vs Kronecker timing benchmark (CSV on stdout or --output).
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Hosvd,
    Cp,
    Odeco,
    Ttd,
}

#[derive(Args)]
struct DecompArgs {
    #[arg(long, value_enum)]
    method: Method,
    /// CP rank.
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// TT truncation tolerance (relative).
    #[arg(long, default_value_t = 0.0)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CP trials (first from HOSVD vectors, then random).
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Bundle directory to write.
    #[arg(short, long)]
    output: Option<PathBuf>,
    input: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum EigType {
    Z,
    H,
    M,
    U,
}

#[derive(Args, Clone)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 10)]
    starts: usize,
    /// `adaptive` or a number.
    #[arg(long, default_value = "adaptive")]
    shift: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn options(&self) -> Result<SolverOptions> {
        let shift = if self.shift == "adaptive" {
            Shift::Adaptive
        } else {
            Shift::Fixed(
                self.shift
                    .parse()
                    .map_err(|_| KronError::InvalidArgument(format!("bad shift {:?}", self.shift)))?,
            )
        };
        let opts = SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            starts: self.starts,
            shift,
            seed: self.seed,
        };
        opts.validate()?;
        Ok(opts)
    }
}

#[derive(Args)]
struct EigArgs {
    #[arg(long = "type", value_enum)]
    kind: EigType,
    #[command(flatten)]
    solver: SolverArgs,
    input: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CentralityType {
    Z,
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliqueView {
    Counts,
    Tensor,
}

#[derive(Subcommand)]
enum HgCommand {
    /// Edge-set Kronecker product of two hypergraphs.
    Kron {
        first: PathBuf,
        second: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Degree vector `A·1^{k−1}`.
    Degree { input: PathBuf },
    /// Eigenvector centrality.
    Centrality {
        #[arg(long = "type", value_enum, default_value = "h")]
        kind: CentralityType,
        #[command(flatten)]
        solver: SolverArgs,
        input: PathBuf,
    },
    /// Clique expansion matrix.
    Clique {
        #[arg(long, value_enum, default_value = "counts")]
        view: CliqueView,
        input: PathBuf,
    },
    /// Adjacency tensor.
    Adj {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        sparse: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Cont,
    Disc,
}

#[derive(Subcommand)]
enum DynCommand {
    /// Simulate from x0; writes trajectory CSV.
    Simulate {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Vector file, or comma-separated values.
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = dynamics::DEFAULT_DT)]
        dt: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        input: PathBuf,
    },
    /// Classify the stability of the origin.
    Stability {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = decomp::ODECO_TOL)]
        odeco_tol: f64,
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Cpd,
    Ttd,
    Zeig,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    op: OpArg,
    /// Factor dimensions: `4..8` (inclusive) or `4,6,8`.
    #[arg(long, default_value = "4..8")]
    n: String,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    rank: usize,
    #[arg(long)]
    parallel_trials: bool,
    /// Print mean, standard error and median per group to stderr.
    #[arg(long)]
    summary: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = || KronError::InvalidArgument(format!("bad dimension list {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn read_x0(spec: &str) -> Result<Vec<f64>> {
    if Path::new(spec).exists() {
        return io::read_vector(spec);
    }
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| KronError::InvalidArgument(format!("x0 {spec:?} is neither a file nor a list of numbers")))
        })
        .collect()
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|&x| io::format_f64(x)).collect::<Vec<_>>().join(" ")
}

fn layout(sparse: bool) -> TnsLayout {
    if sparse {
        TnsLayout::Sparse
    } else {
        TnsLayout::Dense
    }
}

fn run_decomp(a: &DecompArgs) -> Result<()> {
    let t = io::read_tensor(&a.input)?;
    let (bundle, extra) = match a.method {
        Method::Hosvd => {
            let d = decomp::hosvd(&t)?;
            let err = t.sub(&decomp::reconstruct_tucker(&d)?)?.frobenius_norm();
            println!("method hosvd");
            println!("ranks {}", join_usize(d.core.dims()));
            println!("reconstruction_error {}", io::format_f64(err));
            (Bundle::Tucker(d), vec![])
        }
        Method::Cp => {
            let opts = CpOptions {
                seed: a.seed,
                trials: a.trials,
                ..CpOptions::default()
            };
            let r = decomp::cpd_als(&t, a.rank, &opts)?;
            println!("method cp");
            println!("rank {}", a.rank);
            println!("fit {}", io::format_f64(r.fit));
            println!("sweeps {}", r.sweeps);
            println!("converged {}", r.converged);
            let extra = vec![("fit".to_string(), io::format_f64(r.fit)), ("converged".to_string(), r.converged.to_string())];
            (Bundle::Tucker(r.decomp), extra)
        }
        Method::Odeco => {
            let opts = OdecoOptions {
                solver: SolverOptions {
                    seed: a.seed,
                    ..SolverOptions::default()
                },
                ..OdecoOptions::default()
            };
            let d = decomp::odeco(&t, &opts)?;
            println!("method odeco");
            println!("is_odeco {}", d.is_odeco);
            println!("residual {}", io::format_f64(d.residual));
            println!("values {}", fmt_vec(&d.values));
            (Bundle::Odeco(d), vec![])
        }
        Method::Ttd => {
            let d = decomp::ttd(&t, a.tol)?;
            let err = t.sub(&decomp::reconstruct_tt(&d)?)?.frobenius_norm();
            println!("method ttd");
            println!("ranks {}", join_usize(&d.ranks));
            println!("reconstruction_error {}", io::format_f64(err));
            (Bundle::Tt(d), vec![("tol".to_string(), io::format_f64(a.tol))])
        }
    };
    if let Some(dir) = &a.output {
        io::write_bundle(&bundle, dir, &extra)?;
    }
    Ok(())
}

fn join_usize(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn run_eig(a: &EigArgs) -> Result<()> {
    let t = io::read_tensor(&a.input)?;
    let opts = a.solver.options()?;
    match a.kind {
        EigType::Z | EigType::H => {
            let (pairs, note) = if matches!(a.kind, EigType::Z) {
                (spectral::z_eigen_sshopm(&t, &opts)?, None)
            } else {
                let r = spectral::h_eigen_power(&t, &opts)?;
                let note = (r.status == spectral::HStatus::BestEffort)
                    .then_some("warning: tensor has negative entries; H-pairs are best effort");
                (r.pairs, note)
            };
            if let Some(n) = note {
                eprintln!("{n}");
            }
            let kind = if matches!(a.kind, EigType::Z) { EigenKind::Z } else { EigenKind::H };
            println!("kind {kind} pairs {}", pairs.len());
            for p in &pairs {
                println!(
                    "value {} residual {:.3e} vector {}",
                    io::format_f64(p.value),
                    p.residual,
                    fmt_vec(&p.vector)
                );
            }
        }
        EigType::M => {
            let triples = spectral::m_eigen_alternating(&t, &opts)?;
            println!("kind M triples {}", triples.len());
            for tr in &triples {
                println!(
                    "value {} residual {:.3e} x {} y {}",
                    io::format_f64(tr.value),
                    tr.residual,
                    fmt_vec(&tr.x),
                    fmt_vec(&tr.y)
                );
            }
        }
        EigType::U => {
            let pairs = spectral::u_eigen(&t)?;
            println!("kind U pairs {}", pairs.len());
            for p in &pairs {
                println!(
                    "value {} {} residual {:.3e} re {} im {}",
                    io::format_f64(p.value.re),
                    io::format_f64(p.value.im),
                    p.residual,
                    fmt_vec(p.re.data()),
                    fmt_vec(p.im.data())
                );
            }
        }
    }
    Ok(())
}

fn print_matrix(m: &nalgebra::DMatrix<f64>) {
    for row in m.row_iter() {
        let v: Vec<f64> = row.iter().copied().collect();
        println!("{}", fmt_vec(&v));
    }
}

fn run_hg(c: &HgCommand) -> Result<()> {
    match c {
        HgCommand::Kron { first, second, output } => {
            let h1 = io::read_hypergraph(first)?;
            let h2 = io::read_hypergraph(second)?;
            let p = hypergraph::kron_hypergraph(&h1, &h2)?;
            io::write_hypergraph(&p, output)?;
            println!("vertices {} edges {}", p.n(), p.num_edges());
        }
        HgCommand::Degree { input } => {
            let h = io::read_hypergraph(input)?;
            println!("{}", fmt_vec(&h.degree_vector()?));
        }
        HgCommand::Centrality { kind, solver, input } => {
            let h = io::read_hypergraph(input)?;
            let kind = match kind {
                CentralityType::Z => EigenKind::Z,
                CentralityType::H => EigenKind::H,
            };
            println!("{}", fmt_vec(&h.centrality(kind, &solver.options()?)?));
        }
        HgCommand::Clique { view, input } => {
            let h: Hypergraph = io::read_hypergraph(input)?;
            let c = h.clique_expansion()?;
            match view {
                CliqueView::Counts => print_matrix(&c.counts),
                CliqueView::Tensor => print_matrix(&c.tensor_view),
            }
        }
        HgCommand::Adj { input, output, sparse } => {
            let h = io::read_hypergraph(input)?;
            io::write_tensor(&h.adjacency_tensor()?, output, layout(*sparse))?;
        }
    }
    Ok(())
}

fn print_verdict(v: &StabilityVerdict) {
    println!("{}", v.verdict);
    if let Some(r) = v.odeco_residual {
        println!("odeco_residual {r:.3e}");
    }
    if let Some(n) = &v.note {
        println!("note {n}");
    }
    for e in &v.evidence {
        println!(
            "lambda {} alpha {} test {}{}",
            io::format_f64(e.lambda),
            io::format_f64(e.alpha),
            io::format_f64(e.test),
            if e.boundary { " boundary" } else { "" }
        );
    }
}

fn run_dyn(c: &DynCommand) -> Result<()> {
    match c {
        DynCommand::Simulate {
            mode,
            x0,
            t_end,
            dt,
            steps,
            output,
            input,
        } => {
            let t = io::read_tensor(input)?;
            let x0 = read_x0(x0)?;
            let traj = match mode {
                Mode::Cont => dynamics::simulate_continuous(&t, &x0, *t_end, *dt)?,
                Mode::Disc => dynamics::simulate_discrete(&t, &x0, *steps)?,
            };
            if traj.diverged {
                eprintln!("diverged at t = {}", traj.blowup_time.unwrap_or(f64::NAN));
            }
            match output {
                Some(p) => io::write_trajectory(&traj, p)?,
                None => print!("{}", io::format_trajectory(&traj)),
            }
        }
        DynCommand::Stability {
            mode,
            x0,
            seed,
            odeco_tol,
            input,
        } => {
            let t: DenseTensor = io::read_tensor(input)?;
            let x0 = read_x0(x0)?;
            let opts = OdecoOptions {
                solver: SolverOptions {
                    seed: *seed,
                    ..SolverOptions::default()
                },
                odeco_tol: *odeco_tol,
            };
            let v = match mode {
                Mode::Cont => dynamics::classify_stability_continuous(&t, &x0, &opts)?,
                Mode::Disc => dynamics::classify_stability_discrete(&t, &x0, &opts)?,
            };
            print_verdict(&v);
        }
    }
    Ok(())
}

fn run_bench(a: &BenchArgs) -> Result<()> {
    let op = match a.op {
        OpArg::Cpd => BenchOp::Cpd,
        OpArg::Ttd => BenchOp::Ttd,
        OpArg::Zeig => BenchOp::Zeig,
    };
    let cfg = BenchConfig {
        trials: a.trials,
        seed: a.seed,
        cp_rank: a.rank,
        parallel_trials: a.parallel_trials,
        ..BenchConfig::new(op, parse_range(&a.n)?)
    };
    let records = bench::run_benchmark(&cfg, &mut |msg| eprintln!("{msg}"))?;
    let csv = bench::to_csv(&records);
    match &a.output {
        Some(p) => std::fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    if a.summary {
        for s in bench::summarize(&records) {
            eprintln!(
                "{} n={} {}: mean {:.6e} s, stderr {:.2e}, median {:.6e} s ({} trials)",
                s.op, s.n, s.approach, s.mean, s.stderr, s.median, s.trials
            );
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Kron { inputs, output, sparse } => {
            let factors = inputs.iter().map(io::read_tensor).collect::<Result<Vec<_>>>()?;
            let product = kronten::KronFactored::new(factors)?.materialize()?;
            io::write_tensor(&product, output, layout(*sparse))?;
            println!("dims {}", join_usize(product.dims()));
        }
        Command::Decomp(a) => run_decomp(a)?,
        Command::Eig(a) => run_eig(a)?,
        Command::Hg(c) => run_hg(c)?,
        Command::Dyn(c) => run_dyn(c)?,
        Command::Bench(a) => run_bench(a)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors and 0 on --help
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
