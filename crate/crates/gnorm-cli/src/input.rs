//! Input parsing: matrix sources, builtin families, exponents, distributions.

use std::path::PathBuf;

use gnorm::ensembles::{EnsembleKind, RadialDistribution};
use gnorm::structure::block_diag_compose;
use gnorm::{Error, Exponent, ExponentPair, Result, VarianceProfile};

use crate::cli::{PqArgs, SourceArgs};

/// Where a matrix comes from, resolved from `--matrix` / `--family`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Family(Family),
    /// A file holding either CSV rows or a JSON matrix object.
    File(PathBuf),
    /// An inline JSON matrix object.
    Inline(String),
}

impl ProfileSpec {
    pub fn from_source(source: &SourceArgs) -> Result<Self> {
        match (&source.matrix, &source.family) {
            (Some(_), Some(_)) => Err(Error::Domain(
                "--matrix and --family are mutually exclusive".into(),
            )),
            (Some(m), None) => {
                if m.trim_start().starts_with('{') {
                    Ok(ProfileSpec::Inline(m.clone()))
                } else {
                    Ok(ProfileSpec::File(PathBuf::from(m)))
                }
            }
            (None, Some(f)) => Ok(ProfileSpec::Family(Family::parse(f)?)),
            (None, None) => Err(Error::Domain(
                "provide a matrix with --matrix PATH|JSON or --family SPEC".into(),
            )),
        }
    }

    pub fn load(&self) -> Result<VarianceProfile> {
        match self {
            ProfileSpec::Family(family) => family.build(),
            ProfileSpec::Inline(json) => VarianceProfile::from_json(json),
            ProfileSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Domain(format!("cannot read matrix file '{}': {e}", path.display()))
                })?;
                if text.trim_start().starts_with('{') {
                    VarianceProfile::from_json(&text)
                } else {
                    parse_matrix_csv(&text)
                }
            }
        }
    }
}

/// Builtin deterministic matrix families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// All-ones M×N matrix.
    Ones { rows: usize, cols: usize },
    /// Square diagonal matrix with the given diagonal.
    Diag { values: Vec<f64> },
    /// a_ij = (i + j)^{-alpha} with 1-based indices.
    PowerLaw { rows: usize, cols: usize, alpha: f64 },
    /// Seeded Bernoulli support of the given density; kept entries are drawn
    /// uniformly from [0.1, 1.0) by a keyed hash, so the matrix is a pure
    /// function of (M, N, density, seed).
    Sparse {
        rows: usize,
        cols: usize,
        density: f64,
        seed: u64,
    },
    /// Block-diagonal with seeded square blocks of the given sizes; block
    /// entries are drawn uniformly from [0.1, 1.1).
    Block { sizes: Vec<usize>, seed: u64 },
}

impl Family {
    /// Parses `NAME:PARAMS` specs: `ones:M,N`, `diag:V1,V2,...`,
    /// `powerlaw:M,N,ALPHA`, `sparse:M,N,DENSITY,SEED`, `block:S1,...[@SEED]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, params) = spec.trim().split_once(':').ok_or_else(|| {
            Error::Domain(format!(
                "family spec '{spec}' must look like NAME:PARAMS, e.g. ones:4,4"
            ))
        })?;
        match name.to_ascii_lowercase().as_str() {
            "ones" => {
                let [rows, cols] = parse_dims(name, params)?;
                Ok(Family::Ones { rows, cols })
            }
            "diag" => {
                let values = parse_numbers(name, params)?;
                Ok(Family::Diag { values })
            }
            "powerlaw" => {
                let fields = split_fields(name, params, 3)?;
                let [rows, cols] = parse_dims(name, &fields[..2].join(","))?;
                let alpha = parse_number(name, "alpha", fields[2])?;
                Ok(Family::PowerLaw { rows, cols, alpha })
            }
            "sparse" => {
                let fields = split_fields(name, params, 4)?;
                let [rows, cols] = parse_dims(name, &fields[..2].join(","))?;
                let density = parse_number(name, "density", fields[2])?;
                if !(0.0..=1.0).contains(&density) {
                    return Err(Error::Domain(format!(
                        "sparse density must lie in [0,1], got {density}"
                    )));
                }
                let seed = parse_seed(name, fields[3])?;
                Ok(Family::Sparse {
                    rows,
                    cols,
                    density,
                    seed,
                })
            }
            "block" => {
                let (sizes_part, seed_part) = match params.split_once('@') {
                    Some((s, t)) => (s, Some(t)),
                    None => (params, None),
                };
                let sizes = sizes_part
                    .split(',')
                    .map(|f| parse_count(name, "block size", f))
                    .collect::<Result<Vec<usize>>>()?;
                if sizes.is_empty() {
                    return Err(Error::Domain("block family needs at least one size".into()));
                }
                let seed = match seed_part {
                    Some(t) => parse_seed(name, t)?,
                    None => 0,
                };
                Ok(Family::Block { sizes, seed })
            }
            other => Err(Error::Domain(format!(
                "unknown family '{other}'; expected ones, diag, powerlaw, sparse, or block"
            ))),
        }
    }

    /// Materializes the family as a matrix.
    pub fn build(&self) -> Result<VarianceProfile> {
        match self {
            Family::Ones { rows, cols } => VarianceProfile::from_fn(*rows, *cols, |_, _| 1.0),
            Family::Diag { values } => {
                let n = values.len();
                VarianceProfile::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
            }
            Family::PowerLaw { rows, cols, alpha } => {
                VarianceProfile::from_fn(*rows, *cols, |i, j| power_law_entry(*alpha, i + 1, j + 1))
            }
            Family::Sparse {
                rows,
                cols,
                density,
                seed,
            } => VarianceProfile::from_fn(*rows, *cols, |i, j| {
                sparse_entry(*seed, *density, i + 1, j + 1)
            }),
            Family::Block { sizes, seed } => {
                let blocks = sizes
                    .iter()
                    .enumerate()
                    .map(|(b, &s)| {
                        VarianceProfile::from_fn(s, s, |i, j| block_entry(*seed, b, i, j))
                    })
                    .collect::<Result<Vec<_>>>()?;
                block_diag_compose(&blocks)
            }
        }
    }

    /// Extends the family to an entry rule on all 1-based index pairs, for
    /// growing-truncation diagnostics. Block families have no canonical
    /// infinite extension.
    pub fn generator(&self) -> Result<Box<dyn Fn(usize, usize) -> f64>> {
        match self {
            Family::Ones { .. } => Ok(Box::new(|_, _| 1.0)),
            Family::Diag { values } => {
                let values = values.clone();
                Ok(Box::new(move |i, j| {
                    if i == j && i <= values.len() {
                        values[i - 1]
                    } else {
                        0.0
                    }
                }))
            }
            Family::PowerLaw { alpha, .. } => {
                let alpha = *alpha;
                Ok(Box::new(move |i, j| power_law_entry(alpha, i, j)))
            }
            Family::Sparse { density, seed, .. } => {
                let (density, seed) = (*density, *seed);
                Ok(Box::new(move |i, j| sparse_entry(seed, density, i, j)))
            }
            Family::Block { .. } => Err(Error::Domain(
                "block families have no infinite extension; pick ones, diag, powerlaw, or sparse"
                    .into(),
            )),
        }
    }
}

fn power_law_entry(alpha: f64, i: usize, j: usize) -> f64 {
    ((i + j) as f64).powf(-alpha)
}

fn sparse_entry(seed: u64, density: f64, i: usize, j: usize) -> f64 {
    if hash_unit(seed, 1, i, j) < density {
        0.1 + 0.9 * hash_unit(seed, 2, i, j)
    } else {
        0.0
    }
}

fn block_entry(seed: u64, block: usize, i: usize, j: usize) -> f64 {
    0.1 + hash_unit(seed, 3 + block as u64, i, j)
}

/// SplitMix64 finalizer over the key (seed, salt, i, j), mapped to [0, 1).
/// Keyed hashing (rather than a sequential stream) keeps every entry a pure
/// function of its coordinates, so family matrices never depend on fill order.
fn hash_unit(seed: u64, salt: u64, i: usize, j: usize) -> f64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let key = mix(seed.wrapping_add(0x9E37_79B9_7F4A_7C15))
        ^ mix(salt.wrapping_mul(0xD129_0209_7D37_31C3).wrapping_add(1))
        ^ mix(((i as u64) << 32) | j as u64);
    (mix(key) >> 11) as f64 / (1u64 << 53) as f64
}

/// Parses CSV matrix text: one row per line, comma-separated numbers, no
/// header; blank lines are skipped.
pub fn parse_matrix_csv(text: &str) -> Result<VarianceProfile> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::Domain(format!(
                        "matrix CSV line {}: cannot parse '{}' as a number",
                        lineno + 1,
                        cell.trim()
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    VarianceProfile::from_rows(&rows)
}

/// Renders a matrix as CSV rows using shortest round-trip float formatting,
/// so `parse_matrix_csv(&matrix_to_csv(a))` reproduces `a` exactly.
pub fn matrix_to_csv(a: &VarianceProfile) -> String {
    let mut out = String::new();
    for i in 0..a.rows() {
        let line = a
            .row(i)
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Parses one exponent: a decimal, a rational `A/B`, or `inf`.
pub fn parse_exponent(text: &str) -> Result<f64> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
        return Ok(f64::INFINITY);
    }
    if let Some((num, den)) = t.split_once('/') {
        let parse = |part: &str| {
            part.trim().parse::<f64>().map_err(|_| {
                Error::Domain(format!("cannot parse '{part}' in rational exponent '{text}'"))
            })
        };
        let (a, b) = (parse(num)?, parse(den)?);
        if b == 0.0 {
            return Err(Error::Domain(format!(
                "rational exponent '{text}' has a zero denominator"
            )));
        }
        return Ok(a / b);
    }
    t.parse::<f64>()
        .map_err(|_| Error::Domain(format!("cannot parse exponent '{text}'")))
}

pub fn parse_pq(args: &PqArgs) -> Result<ExponentPair> {
    ExponentPair::from_f64(parse_exponent(&args.p)?, parse_exponent(&args.q)?)
}

/// JSON rendering of an exponent; infinity becomes the string `"inf"`.
pub fn exponent_value(e: Exponent) -> serde_json::Value {
    if e.is_infinite() {
        serde_json::Value::String("inf".into())
    } else {
        serde_json::json!(e.as_f64())
    }
}

/// Parses `--dist` specs: `gauss`, `weibull:R`, `bernoulli`,
/// `mixture:constant,C`, `mixture:twopoint,LO,HI`, `mixture:lognormal,MU,SIGMA`.
pub fn parse_dist(text: &str) -> Result<EnsembleKind> {
    let t = text.trim();
    let (name, params) = match t.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (t, None),
    };
    match (name.to_ascii_lowercase().as_str(), params) {
        ("gauss" | "gaussian", None) => Ok(EnsembleKind::Gaussian),
        ("bernoulli", None) => Ok(EnsembleKind::Bernoulli),
        ("weibull", Some(p)) => Ok(EnsembleKind::Weibull {
            r: parse_number("weibull", "shape", p)?,
        }),
        ("mixture", Some(p)) => {
            let fields: Vec<&str> = p.split(',').collect();
            let radial = match (fields[0].to_ascii_lowercase().as_str(), fields.len()) {
                ("constant", 2) => RadialDistribution::Constant {
                    c: parse_number("mixture", "c", fields[1])?,
                },
                ("twopoint", 3) => RadialDistribution::TwoPoint {
                    low: parse_number("mixture", "low", fields[1])?,
                    high: parse_number("mixture", "high", fields[2])?,
                },
                ("lognormal", 3) => RadialDistribution::Lognormal {
                    mu: parse_number("mixture", "mu", fields[1])?,
                    sigma: parse_number("mixture", "sigma", fields[2])?,
                },
                _ => {
                    return Err(Error::Domain(format!(
                        "mixture spec '{t}' must be mixture:constant,C, \
                         mixture:twopoint,LO,HI, or mixture:lognormal,MU,SIGMA"
                    )))
                }
            };
            Ok(EnsembleKind::Mixture { radial })
        }
        _ => Err(Error::Domain(format!(
            "unknown distribution '{text}'; expected gauss, weibull:R, bernoulli, or mixture:..."
        ))),
    }
}

/// Parses a comma-separated list of positive truncation sizes.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|f| parse_count("sizes", "size", f))
        .collect()
}

fn split_fields<'a>(family: &str, params: &'a str, expected: usize) -> Result<Vec<&'a str>> {
    let fields: Vec<&str> = params.split(',').collect();
    if fields.len() != expected {
        return Err(Error::Domain(format!(
            "family '{family}' takes {expected} comma-separated parameters, got {}",
            fields.len()
        )));
    }
    Ok(fields)
}

fn parse_numbers(context: &str, params: &str) -> Result<Vec<f64>> {
    let values = params
        .split(',')
        .map(|f| parse_number(context, "entry", f))
        .collect::<Result<Vec<f64>>>()?;
    if values.is_empty() {
        return Err(Error::Domain(format!(
            "{context}: needs at least one value"
        )));
    }
    Ok(values)
}

fn parse_dims(family: &str, params: &str) -> Result<[usize; 2]> {
    let fields = split_fields(family, params, 2)?;
    Ok([
        parse_count(family, "rows", fields[0])?,
        parse_count(family, "cols", fields[1])?,
    ])
}

fn parse_count(context: &str, what: &str, text: &str) -> Result<usize> {
    let n = text.trim().parse::<usize>().map_err(|_| {
        Error::Domain(format!(
            "{context}: cannot parse '{}' as a positive integer {what}",
            text.trim()
        ))
    })?;
    if n == 0 {
        return Err(Error::Domain(format!(
            "{context}: {what} must be at least 1"
        )));
    }
    Ok(n)
}

fn parse_seed(context: &str, text: &str) -> Result<u64> {
    text.trim().parse::<u64>().map_err(|_| {
        Error::Domain(format!(
            "{context}: cannot parse '{}' as a seed (u64)",
            text.trim()
        ))
    })
}

fn parse_number(context: &str, what: &str, text: &str) -> Result<f64> {
    let v = text.trim().parse::<f64>().map_err(|_| {
        Error::Domain(format!(
            "{context}: cannot parse '{}' as a number for {what}",
            text.trim()
        ))
    })?;
    if !v.is_finite() {
        return Err(Error::Domain(format!(
            "{context}: {what} must be finite, got {v}"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_specs_parse() {
        assert_eq!(
            Family::parse("ones:2,3").unwrap(),
            Family::Ones { rows: 2, cols: 3 }
        );
        assert_eq!(
            Family::parse("diag:1,2.5,3").unwrap(),
            Family::Diag {
                values: vec![1.0, 2.5, 3.0]
            }
        );
        assert_eq!(
            Family::parse("powerlaw:4,5,1.5").unwrap(),
            Family::PowerLaw {
                rows: 4,
                cols: 5,
                alpha: 1.5
            }
        );
        assert_eq!(
            Family::parse("sparse:6,6,0.25,17").unwrap(),
            Family::Sparse {
                rows: 6,
                cols: 6,
                density: 0.25,
                seed: 17
            }
        );
        assert_eq!(
            Family::parse("block:2,3@5").unwrap(),
            Family::Block {
                sizes: vec![2, 3],
                seed: 5
            }
        );
        assert_eq!(
            Family::parse("block:4").unwrap(),
            Family::Block {
                sizes: vec![4],
                seed: 0
            }
        );
    }

    #[test]
    fn bad_family_specs_are_rejected() {
        for spec in [
            "ones",
            "ones:2",
            "ones:0,3",
            "ones:2,3,4",
            "powerlaw:2,3",
            "sparse:2,3,1.5,0",
            "sparse:2,3,0.5,-1",
            "octagon:2,2",
            "diag:",
            "block:0@1",
        ] {
            assert!(Family::parse(spec).is_err(), "spec '{spec}' should fail");
        }
    }

    #[test]
    fn family_matrices_have_expected_entries() {
        let ones = Family::parse("ones:2,3").unwrap().build().unwrap();
        assert_eq!(ones.data(), &[1.0; 6]);

        let diag = Family::parse("diag:2,-3").unwrap().build().unwrap();
        assert_eq!(diag.data(), &[2.0, 0.0, 0.0, -3.0]);

        let pl = Family::parse("powerlaw:2,2,1").unwrap().build().unwrap();
        assert_eq!(pl.entry(0, 0), 0.5); // (1+1)^{-1}
        assert_eq!(pl.entry(1, 1), 0.25); // (2+2)^{-1}

        let block = Family::parse("block:2,1@9").unwrap().build().unwrap();
        assert_eq!((block.rows(), block.cols()), (3, 3));
        assert_eq!(block.entry(0, 2), 0.0);
        assert_eq!(block.entry(2, 0), 0.0);
        assert!(block.entry(2, 2) >= 0.1);
    }

    #[test]
    fn sparse_family_is_deterministic_and_respects_density() {
        let a = Family::parse("sparse:20,20,0.3,7").unwrap().build().unwrap();
        let b = Family::parse("sparse:20,20,0.3,7").unwrap().build().unwrap();
        assert_eq!(a.data(), b.data());
        let c = Family::parse("sparse:20,20,0.3,8").unwrap().build().unwrap();
        assert_ne!(a.data(), c.data());
        // Density 0.3 over 400 keyed-hash draws stays well inside [0.15, 0.45].
        let frac = a.nnz() as f64 / 400.0;
        assert!((0.15..=0.45).contains(&frac), "fill fraction {frac}");
        assert_eq!(
            Family::parse("sparse:5,5,0,1").unwrap().build().unwrap().nnz(),
            0
        );
        assert_eq!(
            Family::parse("sparse:5,5,1,1").unwrap().build().unwrap().nnz(),
            25
        );
    }

    #[test]
    fn generators_match_their_square_truncations() {
        for spec in ["ones:3,3", "diag:1,2,3", "powerlaw:3,3,1", "sparse:3,3,0.5,4"] {
            let family = Family::parse(spec).unwrap();
            let a = family.build().unwrap();
            let gen = family.generator().unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(a.entry(i, j), gen(i + 1, j + 1), "{spec} at ({i},{j})");
                }
            }
        }
        assert!(Family::parse("block:2,2").unwrap().generator().is_err());
    }

    #[test]
    fn csv_round_trips_exactly() {
        let a = VarianceProfile::from_rows(&[
            vec![0.1, -2.0, 3.5e-7],
            vec![1.0 / 3.0, 0.0, f64::MIN_POSITIVE],
        ])
        .unwrap();
        let text = matrix_to_csv(&a);
        let b = parse_matrix_csv(&text).unwrap();
        assert_eq!(a.data(), b.data());
        assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    }

    #[test]
    fn csv_parse_rejects_garbage() {
        assert!(parse_matrix_csv("1,2\n3").is_err()); // ragged
        assert!(parse_matrix_csv("1,x\n").is_err()); // non-numeric
        assert!(parse_matrix_csv("").is_err()); // empty
        let ok = parse_matrix_csv("1, 2\n\n3,4\n").unwrap(); // spaces + blank line
        assert_eq!(ok.data(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn exponents_parse_decimals_rationals_and_inf() {
        assert_eq!(parse_exponent("1.5").unwrap(), 1.5);
        assert_eq!(parse_exponent("4/3").unwrap(), 4.0 / 3.0);
        assert_eq!(parse_exponent(" 3 / 2 ").unwrap(), 1.5);
        assert!(parse_exponent("inf").unwrap().is_infinite());
        assert!(parse_exponent("INF").unwrap().is_infinite());
        assert!(parse_exponent("x").is_err());
        assert!(parse_exponent("1/0").is_err());
        let pq = parse_pq(&PqArgs {
            p: "4/3".into(),
            q: "inf".into(),
        })
        .unwrap();
        assert_eq!(pq.p().as_f64(), 4.0 / 3.0);
        assert!(pq.q().is_infinite());
        // Out-of-regime pairs are rejected by the library.
        assert!(parse_pq(&PqArgs {
            p: "3".into(),
            q: "2".into(),
        })
        .is_err());
    }

    #[test]
    fn distributions_parse() {
        assert_eq!(parse_dist("gauss").unwrap(), EnsembleKind::Gaussian);
        assert_eq!(parse_dist("bernoulli").unwrap(), EnsembleKind::Bernoulli);
        assert_eq!(
            parse_dist("weibull:1.5").unwrap(),
            EnsembleKind::Weibull { r: 1.5 }
        );
        assert_eq!(
            parse_dist("mixture:constant,2").unwrap(),
            EnsembleKind::Mixture {
                radial: RadialDistribution::Constant { c: 2.0 }
            }
        );
        assert_eq!(
            parse_dist("mixture:twopoint,0.5,2").unwrap(),
            EnsembleKind::Mixture {
                radial: RadialDistribution::TwoPoint {
                    low: 0.5,
                    high: 2.0
                }
            }
        );
        assert_eq!(
            parse_dist("mixture:lognormal,0,1").unwrap(),
            EnsembleKind::Mixture {
                radial: RadialDistribution::Lognormal { mu: 0.0, sigma: 1.0 }
            }
        );
        for bad in ["gauss:1", "weibull", "mixture:cauchy,1", "poisson"] {
            assert!(parse_dist(bad).is_err(), "dist '{bad}' should fail");
        }
    }

    #[test]
    fn profile_spec_resolution() {
        let fam = SourceArgs {
            matrix: None,
            family: Some("ones:2,2".into()),
        };
        assert!(matches!(
            ProfileSpec::from_source(&fam).unwrap(),
            ProfileSpec::Family(_)
        ));

        let inline = SourceArgs {
            matrix: Some(r#"{"rows":1,"cols":2,"data":[1.0,2.0]}"#.into()),
            family: None,
        };
        let spec = ProfileSpec::from_source(&inline).unwrap();
        assert!(matches!(spec, ProfileSpec::Inline(_)));
        let a = spec.load().unwrap();
        assert_eq!(a.data(), &[1.0, 2.0]);

        let neither = SourceArgs {
            matrix: None,
            family: None,
        };
        assert!(ProfileSpec::from_source(&neither).is_err());
    }

    #[test]
    fn sizes_parse() {
        assert_eq!(parse_sizes("4,8,16").unwrap(), vec![4, 8, 16]);
        assert!(parse_sizes("4,0,16").is_err());
        assert!(parse_sizes("").is_err());
    }
}
