//! Subcommand dispatch: parse, call one library entry point, emit a report.

use std::ffi::OsString;

use clap::Parser;
use serde_json::{json, Map, Value};

use gnorm::ensembles::{EnsembleKind, EnsembleSpec};
use gnorm::envelope::{
    boundedness_diagnostic, envelope_report, gaussian_tail_bound, weibull_tail_bound,
};
use gnorm::montecarlo::{
    comparability_report, default_mc_ascent, estimate_expected_norm, estimate_moment,
    tail_frequency,
};
use gnorm::pqnorm::{
    alternating_norm_lower, certified_norm_interval, cheap_norm_upper, dyadic_net_upper,
    norm_1_to_q, norm_2_to_2, norm_p_to_inf, AscentConfig, DyadicNetConfig,
};
use gnorm::structure::{
    check_subset_count_bound, degrees, greedy_band_decomposition, verify_decay_bounds,
    ProfileGraph,
};
use gnorm::{Error, ExponentPair, NormEstimate, Result, VarianceProfile};

use crate::cli::{
    BoundednessArgs, Cli, Command, CompareArgs, DecomposeArgs, EnvelopeArgs, EstimateArgs, Method,
    NormArgs, SourceArgs, StructureArgs, TailArgs,
};
use crate::input::{
    exponent_value, parse_dist, parse_pq, parse_sizes, Family, ProfileSpec,
};
use crate::report::Report;

/// Parses the argument vector, runs the requested subcommand, and returns the
/// process exit code: 0 success, 2 invalid input or usage, 3 resource budget
/// exceeded, 4 numeric failure.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // clap reports usage errors as 2 and --help/--version as 0.
            let code = err.exit_code();
            let _ = err.print();
            return code;
        }
    };
    if let Err(err) = init_thread_pool() {
        eprintln!("error: {err}");
        return exit_code(&err);
    }
    match execute(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::Degenerate(_) | Error::Config(_) => 2,
        Error::Resource(_) => 3,
        Error::Numeric(_) => 4,
    }
}

/// Applies the GNORM_THREADS cap before any parallel work runs. If a global
/// pool already exists the cap was applied by whoever built it first.
fn init_thread_pool() -> Result<()> {
    let Some(raw) = std::env::var_os("GNORM_THREADS") else {
        return Ok(());
    };
    let text = raw.to_string_lossy();
    let threads = text
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            Error::Config(format!(
                "GNORM_THREADS must be a positive integer, got '{text}'"
            ))
        })?;
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Norm(args) => cmd_norm(args),
        Command::Envelope(args) => cmd_envelope(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Tail(args) => cmd_tail(args),
        Command::Structure(args) => cmd_structure(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Boundedness(args) => cmd_boundedness(args),
    }
}

/// Loads the matrix and builds the `input` section of the report.
fn load_matrix(source: &SourceArgs) -> Result<(VarianceProfile, Value)> {
    let spec = ProfileSpec::from_source(source)?;
    let a = spec.load()?;
    let mut desc = match &spec {
        ProfileSpec::Family(_) => json!({
            "source": "family",
            "spec": source.family.as_deref().unwrap_or_default(),
        }),
        ProfileSpec::File(path) => json!({
            "source": "file",
            "path": path.display().to_string(),
        }),
        ProfileSpec::Inline(_) => json!({ "source": "inline_json" }),
    };
    desc["rows"] = json!(a.rows());
    desc["cols"] = json!(a.cols());
    Ok((a, desc))
}

fn pq_value(pq: &ExponentPair) -> Value {
    json!({
        "p": exponent_value(pq.p()),
        "q": exponent_value(pq.q()),
    })
}

fn to_results<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("result serialization cannot fail")
}

fn cmd_norm(args: NormArgs) -> Result<()> {
    let (a, input) = load_matrix(&args.source)?;
    let pq = parse_pq(&args.pq)?;
    let ascent = AscentConfig {
        restarts: args.restarts,
        seed: args.seed,
        ..AscentConfig::default()
    };
    let net = DyadicNetConfig::default();
    let estimate = match args.method {
        Method::Exact => exact_norm(&a, &pq)?,
        Method::Alt => alternating_norm_lower(&a, &pq, &ascent),
        Method::Net => dyadic_net_upper(&a, &pq, &net)?,
        Method::Cheap => cheap_norm_upper(&a, &pq),
        Method::Interval => certified_norm_interval(&a, &pq, &ascent, &net)?,
    };
    Report::new(input, pq_value(&pq), to_results(&estimate), Some(args.seed)).emit(&args.out)
}

/// Routes to the closed form when one exists for the pair.
fn exact_norm(a: &VarianceProfile, pq: &ExponentPair) -> Result<NormEstimate> {
    if pq.p().as_f64() == 1.0 {
        return Ok(norm_1_to_q(a, pq.q()));
    }
    if pq.q().is_infinite() {
        return Ok(norm_p_to_inf(a, pq.p()));
    }
    if pq.p().as_f64() == 2.0 && pq.q().as_f64() == 2.0 {
        return norm_2_to_2(a, 1e-10);
    }
    Err(Error::Domain(
        "no exact closed form for this exponent pair (need p = 1, q = inf, or p = q = 2); \
         use --method interval"
            .into(),
    ))
}

fn cmd_envelope(args: EnvelopeArgs) -> Result<()> {
    let (a, input) = load_matrix(&args.source)?;
    let pq = parse_pq(&args.pq)?;
    let report = envelope_report(&a, &pq);
    Report::new(input, pq_value(&pq), to_results(&report), None).emit(&args.out)
}

fn cmd_estimate(args: EstimateArgs) -> Result<()> {
    let (a, input) = load_matrix(&args.source)?;
    let pq = parse_pq(&args.pq)?;
    let spec = EnsembleSpec::new(parse_dist(&args.dist)?, args.seed, 0)?;
    let results = match args.rho {
        None => {
            let ascent = AscentConfig {
                restarts: args.restarts,
                ..default_mc_ascent(args.seed)
            };
            to_results(&estimate_expected_norm(&a, &pq, &spec, args.samples, &ascent)?)
        }
        Some(rho) => {
            let moment = estimate_moment(&a, &pq, &spec, rho, args.samples)?;
            json!({
                "rho": rho,
                "moment": moment,
                "n_samples": args.samples,
            })
        }
    };
    Report::new(input, pq_value(&pq), results, Some(args.seed)).emit(&args.out)
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let (a, input) = load_matrix(&args.source)?;
    let pq = parse_pq(&args.pq)?;
    let spec = EnsembleSpec::new(parse_dist(&args.dist)?, args.seed, 0)?;
    let ascent = AscentConfig {
        restarts: args.restarts,
        ..default_mc_ascent(args.seed)
    };
    let report = comparability_report(&a, &pq, &spec, args.samples, &ascent)?;
    Report::new(input, pq_value(&pq), to_results(&report), Some(args.seed)).emit(&args.out)
}

fn cmd_tail(args: TailArgs) -> Result<()> {
    let (a, input) = load_matrix(&args.source)?;
    let pq = parse_pq(&args.pq)?;
    let kind = parse_dist(&args.dist)?;
    let spec = EnsembleSpec::new(kind, args.seed, 0)?;
    if !args.t.is_finite() || args.t < 0.0 {
        return Err(Error::Domain(format!(
            "tail offset t must be a finite real >= 0, got {}",
            args.t
        )));
    }
    if args.c2.is_some() && !matches!(kind, EnsembleKind::Weibull { .. }) {
        return Err(Error::Config(
            "--c2 applies only to weibull ensembles".into(),
        ));
    }

    let mut results = Map::new();
    results.insert("t".into(), json!(args.t));
    let bound = match kind {
        EnsembleKind::Gaussian => Some(gaussian_tail_bound(&a, args.t)?),
        EnsembleKind::Weibull { r } => match args.c2 {
            Some(c2) => Some(weibull_tail_bound(&a, args.t, r, Some(c2))?),
            None => {
                results.insert(
                    "note".into(),
                    json!("pass --c2 to evaluate the weibull tail bound"),
                );
                None
            }
        },
        EnsembleKind::Mixture { .. } | EnsembleKind::Bernoulli => {
            results.insert(
                "note".into(),
                json!("no deterministic tail bound for this ensemble"),
            );
            None
        }
    };
    results.insert("bound".into(), json!(bound));

    if let Some(n) = args.samples {
        let ascent = AscentConfig {
            restarts: args.restarts,
            ..default_mc_ascent(args.seed)
        };
        let stats = estimate_expected_norm(&a, &pq, &spec, n, &ascent)?;
        let threshold = stats.mean + args.t;
        let frequency = tail_frequency(&a, &pq, &spec, threshold, n)?;
        results.insert("mean_estimate".into(), json!(stats.mean));
        results.insert("mean_stderr".into(), json!(stats.stderr));
        results.insert("threshold".into(), json!(threshold));
        results.insert("empirical_frequency".into(), json!(frequency));
        results.insert("n_samples".into(), json!(n));
    }
    Report::new(input, pq_value(&pq), Value::Object(results), Some(args.seed)).emit(&args.out)
}

fn cmd_structure(args: StructureArgs) -> Result<()> {
    let (a, input) = load_matrix(&args.source)?;
    let graph = ProfileGraph::new(&a);
    let (d1, d2, d) = degrees(&a);
    let mut results = Map::new();
    results.insert("nnz".into(), json!(a.nnz()));
    results.insert("edges".into(), json!(graph.edge_count()));
    results.insert(
        "degrees".into(),
        json!({"d1": d1, "d2": d2, "d": d}),
    );
    match (args.r, args.k) {
        (Some(r), Some(k)) => {
            let report = check_subset_count_bound(&a, r, k, args.budget)?;
            results.insert("subset_count".into(), to_results(&report));
        }
        (None, None) => {}
        _ => {
            return Err(Error::Domain(
                "--r and --k must be given together to count r-connected subsets".into(),
            ))
        }
    }
    Report::new(input, Value::Null, Value::Object(results), None).emit(&args.out)
}

fn cmd_decompose(args: DecomposeArgs) -> Result<()> {
    let (a, input) = load_matrix(&args.source)?;
    let pq = parse_pq(&args.pq)?;
    let decomposition = greedy_band_decomposition(&a, &pq)?;
    let decay = verify_decay_bounds(&a, &pq, &decomposition)?;
    let results = json!({
        "decomposition": decomposition,
        "decay": decay,
    });
    Report::new(input, pq_value(&pq), results, None).emit(&args.out)
}

fn cmd_boundedness(args: BoundednessArgs) -> Result<()> {
    let pq = parse_pq(&args.pq)?;
    let family = Family::parse(&args.family)?;
    let generator = family.generator()?;
    let sizes = parse_sizes(&args.sizes)?;
    let report = boundedness_diagnostic(&pq, generator, &sizes)?;
    let input = json!({"source": "family", "spec": args.family});
    Report::new(input, pq_value(&pq), to_results(&report), None).emit(&args.out)
}
