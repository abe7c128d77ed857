//! Argument grammar for the `gnorm` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "gnorm",
    version,
    about = "Certified lp->lq operator norms and envelope diagnostics for structured random matrices",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Operator norm of the variance profile by a selected method
    Norm(NormArgs),
    /// Deterministic envelope quantities (marginal norms, deletion functionals)
    Envelope(EnvelopeArgs),
    /// Monte Carlo estimate of the expected norm or one of its moments
    Estimate(EstimateArgs),
    /// Two-sided comparability check: Monte Carlo mean against envelope brackets
    Compare(CompareArgs),
    /// Deterministic tail bounds, optionally with empirical exceedance frequencies
    Tail(TailArgs),
    /// Support-graph diagnostics: degrees and r-connected subset counts
    Structure(StructureArgs),
    /// Greedy band decomposition with off-band decay verification
    Decompose(DecomposeArgs),
    /// Growing-truncation diagnostic for envelope boundedness of an entry rule
    Boundedness(BoundednessArgs),
}

/// Where the matrix comes from.  Exactly one of the two flags must be given.
#[derive(Args, Debug)]
pub struct SourceArgs {
    /// Matrix input: a path to a CSV file (comma-separated rows, no header),
    /// a path to a JSON file, or an inline JSON object
    /// {"rows":M,"cols":N,"data":[...]} (row-major)
    #[arg(long, value_name = "PATH|JSON", conflicts_with = "family")]
    pub matrix: Option<String>,

    /// Builtin family: ones:M,N | diag:V1,V2,... | powerlaw:M,N,ALPHA |
    /// sparse:M,N,DENSITY,SEED | block:S1,S2,...[@SEED]
    #[arg(long, value_name = "SPEC")]
    pub family: Option<String>,
}

#[derive(Args, Debug)]
pub struct PqArgs {
    /// Domain exponent p in [1,2]: a decimal or a rational such as 4/3
    #[arg(long, value_name = "P")]
    pub p: String,

    /// Codomain exponent q in [2,inf]: a decimal, a rational, or "inf"
    #[arg(long, value_name = "Q")]
    pub q: String,
}

#[derive(Args, Debug)]
pub struct OutArgs {
    /// Write the report to this file instead of standard output
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Closed form; only for p = 1, q = inf, or p = q = 2
    Exact,
    /// Alternating-ascent lower bound
    Alt,
    /// Dyadic-net certified upper bound
    Net,
    /// Factorized interpolation upper bound
    Cheap,
    /// Certified interval combining ascent and net bounds
    Interval,
}

#[derive(Args, Debug)]
pub struct NormArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub pq: PqArgs,
    #[command(flatten)]
    pub out: OutArgs,

    /// How to compute the norm
    #[arg(long, value_enum, default_value_t = Method::Interval)]
    pub method: Method,

    /// Random restarts for the alternating ascent
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,

    /// Seed for the ascent restarts
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct EnvelopeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub pq: PqArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub pq: PqArgs,
    #[command(flatten)]
    pub out: OutArgs,

    /// Number of Monte Carlo samples
    #[arg(long, default_value_t = 100)]
    pub samples: usize,

    /// Master seed for the ensemble sampler
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Entry distribution: gauss | weibull:R | bernoulli |
    /// mixture:constant,C | mixture:twopoint,LO,HI | mixture:lognormal,MU,SIGMA
    #[arg(long, default_value = "gauss")]
    pub dist: String,

    /// Ascent restarts used on each sampled matrix
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,

    /// Estimate E[norm^rho] instead of the expected norm
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub pq: PqArgs,
    #[command(flatten)]
    pub out: OutArgs,

    /// Number of Monte Carlo samples
    #[arg(long, default_value_t = 200)]
    pub samples: usize,

    /// Master seed for the ensemble sampler
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Entry distribution (see `estimate --help`)
    #[arg(long, default_value = "gauss")]
    pub dist: String,

    /// Ascent restarts used on each sampled matrix
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
}

#[derive(Args, Debug)]
pub struct TailArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub pq: PqArgs,
    #[command(flatten)]
    pub out: OutArgs,

    /// Tail offset t >= 0: bounds P(norm >= E[norm] + t)
    #[arg(long, value_name = "T")]
    pub t: f64,

    /// Also measure the empirical exceedance frequency from this many samples
    #[arg(long)]
    pub samples: Option<usize>,

    /// Master seed for the ensemble sampler
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Entry distribution (see `estimate --help`)
    #[arg(long, default_value = "gauss")]
    pub dist: String,

    /// Ascent restarts used on each sampled matrix
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,

    /// Concentration constant for the Weibull tail bound
    #[arg(long)]
    pub c2: Option<f64>,
}

#[derive(Args, Debug)]
pub struct StructureArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub out: OutArgs,

    /// Adjacency radius for the r-connected subset count (requires --k)
    #[arg(long)]
    pub r: Option<usize>,

    /// Subset size for the r-connected subset count (requires --r)
    #[arg(long)]
    pub k: Option<usize>,

    /// Enumeration budget before the count is abandoned
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub pq: PqArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct BoundednessArgs {
    /// Entry rule extended to every index pair: ones:M,N | diag:V1,... |
    /// powerlaw:M,N,ALPHA | sparse:M,N,DENSITY,SEED
    #[arg(long, value_name = "SPEC")]
    pub family: String,

    #[command(flatten)]
    pub pq: PqArgs,
    #[command(flatten)]
    pub out: OutArgs,

    /// Comma-separated truncation sizes, e.g. 4,8,16,32
    #[arg(long, value_name = "N1,N2,...")]
    pub sizes: String,
}
