use std::io::Read;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use igusa_core::newton::{all_cones, polyhedron_of, polyhedron_of_series, DEFAULT_MAX_N};
use igusa_core::nondegen::is_nondegenerate_series;
use igusa_core::onevar::{
    one_var_zeta, stabilization_threshold_simple, OneVarOptions, DEFAULT_DEPTH_LIMIT,
};
use igusa_core::oracle::{count_solutions_series, numeric_zeta, zeta_series_from_counts};
use igusa_core::padic::DEFAULT_ENUM_LIMIT;
use igusa_core::truncation::{family, scan, Engine, ScanOptions};
use igusa_core::zeta::{igusa_zeta_newton_series, ZetaOptions};
use igusa_core::{
    parse_input, Exec, Input, PrimeContext, Result, SeriesSpec, ZetaError, ZetaRational,
};

/// Exact Igusa local zeta functions over the p-adic integers.
#[derive(Debug, Parser)]
#[command(name = "igusa", version)]
struct Cli {
    #[command(flatten)]
    limits: Limits,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Limits {
    /// Largest number of residues any enumeration may visit.
    #[arg(long, global = true, env = "IGUSA_ENUM_LIMIT", default_value_t = DEFAULT_ENUM_LIMIT)]
    enum_limit: u64,
    /// Deepest ball the one-variable engine may open.
    #[arg(long, global = true, env = "IGUSA_DEPTH_LIMIT", default_value_t = DEFAULT_DEPTH_LIMIT)]
    depth_limit: u32,
    /// Largest number of variables accepted by the Newton engine.
    #[arg(long, global = true, env = "IGUSA_MAX_N", default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

impl Limits {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

#[derive(Debug, Args)]
struct Source {
    /// File path, `-` for stdin, or inline JSON / expression such as `x^2 + y^3`.
    input: Option<String>,
    /// Built-in series family instead of an input.
    #[arg(long)]
    family: Option<String>,
    /// The prime.
    #[arg(long)]
    p: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Newton polyhedron: generators, facets, faces and cones.
    Newton(Source),
    /// Per-face non-degeneracy verdicts, witnesses and zero counts.
    CheckNondegenerate(Source),
    /// Z(s) by the Newton polyhedron formula.
    Zeta {
        #[command(flatten)]
        source: Source,
        /// Add a LaTeX rendering in terms of p^{-s}.
        #[arg(long)]
        latex: bool,
        /// Include the per-face terms.
        #[arg(long)]
        terms: bool,
    },
    /// Z(s) in one variable by ball decomposition.
    Zeta1 {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        latex: bool,
        /// Print the ball-decomposition tree.
        #[arg(long)]
        trace: bool,
    },
    /// Solution counts mod p^m and the series they determine.
    OracleCount {
        #[command(flatten)]
        source: Source,
        /// Highest precision M.
        #[arg(long, default_value_t = 6)]
        m: u32,
        /// Bracket the real value Z(s) at this s.
        #[arg(long)]
        s: Option<f64>,
    },
    /// Z of the truncations f_D over a range of D, with a stabilization verdict.
    TruncateScan {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        d_min: u32,
        #[arg(long, default_value_t = 8)]
        d_max: u32,
        /// newton or onevar.
        #[arg(long, default_value = "onevar")]
        engine: Engine,
        #[arg(long)]
        latex: bool,
    },
}

fn exit_code(e: &ZetaError) -> u8 {
    match e {
        ZetaError::Parse { .. } | ZetaError::Validation(_) | ZetaError::NotPrime(_) => 2,
        ZetaError::PreconditionViolated(_)
        | ZetaError::CertificateMissing
        | ZetaError::SupportBoundMissing
        | ZetaError::DegenerateFace(_)
        | ZetaError::DegenerateInput { .. }
        | ZetaError::HypothesisViolated(_) => 3,
        ZetaError::DimensionTooLarge { .. }
        | ZetaError::EnumLimitExceeded { .. }
        | ZetaError::DepthLimitExceeded(_) => 4,
    }
}

fn error_json(e: &ZetaError) -> Value {
    let mut body = json!({
        "kind": e.kind(),
        "message": e.to_string(),
        "exit_code": exit_code(e),
    });
    match e {
        ZetaError::Parse { line, column, .. } => {
            body["line"] = json!(line);
            body["column"] = json!(column);
        }
        ZetaError::DegenerateInput { face, point } => {
            body["face"] = json!(face);
            body["point"] = json!(point);
        }
        _ => {}
    }
    json!({ "error": body })
}

fn read_source(text: &str) -> Result<String> {
    let io_err = |e: std::io::Error| ZetaError::Validation(format!("cannot read input: {e}"));
    if text == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(io_err)?;
        return Ok(buf);
    }
    let path = Path::new(text);
    if path.is_file() {
        return std::fs::read_to_string(path).map_err(io_err);
    }
    Ok(text.to_string())
}

struct Loaded {
    series: SeriesSpec,
    ctx: PrimeContext,
}

fn load_input(source: &Source) -> Result<Input> {
    match (&source.input, &source.family) {
        (Some(_), Some(_)) => Err(ZetaError::Validation(
            "give either an input or --family, not both".into(),
        )),
        (None, None) => Err(ZetaError::Validation("no input given".into())),
        (None, Some(name)) => {
            let p = source
                .p
                .ok_or_else(|| ZetaError::Validation("--family needs --p".into()))?;
            Ok(Input::Series(family(name, p)?))
        }
        (Some(text), None) => parse_input(&read_source(text)?, source.p),
    }
}

fn load(source: &Source, limits: &Limits) -> Result<Loaded> {
    let input = load_input(source)?;
    let p = source
        .p
        .or(input.p())
        .ok_or_else(|| ZetaError::Validation("no prime given; pass --p".into()))?;
    let ctx = PrimeContext::with_enum_limit(p, limits.enum_limit)?;
    Ok(Loaded {
        series: input.into_series(p)?,
        ctx,
    })
}

fn zeta_json(z: &ZetaRational, latex: bool) -> Value {
    let mut v = json!(z);
    v["display"] = json!(z.to_string());
    if latex {
        v["latex"] = json!(format!("Z(s) = {}", z.latex()));
    }
    v
}

fn run(cli: &Cli) -> Result<Value> {
    let limits = &cli.limits;
    let exec = limits.exec();
    match &cli.command {
        Command::Newton(source) => {
            // the polyhedron of a polynomial does not depend on p
            let (name, poly) = match load_input(source)? {
                Input::Poly(f) if source.p.is_none() => {
                    (f.render(), polyhedron_of(&f, limits.max_n)?)
                }
                _ => {
                    let l = load(source, limits)?;
                    (
                        l.series.name().to_string(),
                        polyhedron_of_series(&l.series, limits.max_n)?,
                    )
                }
            };
            let cones = all_cones(&poly, exec)?;
            Ok(json!({
                "input": name,
                "n": poly.n(),
                "generators": json!(&poly.generators()),
                "facets": json!(&poly.facets()),
                "vertices": json!(&poly.vertices()),
                "faces": json!(&poly.faces()),
                "cones": json!(&cones),
            }))
        }
        Command::CheckNondegenerate(source) => {
            let l = load(source, limits)?;
            let poly = polyhedron_of_series(&l.series, limits.max_n)?;
            let report = is_nondegenerate_series(&l.series, &poly, &l.ctx, exec)?;
            let mut v = json!(&report);
            v["input"] = json!(l.series.name());
            v["n_tau"] = json!(&report.counts());
            Ok(v)
        }
        Command::Zeta {
            source,
            latex,
            terms,
        } => {
            let l = load(source, limits)?;
            let opts = ZetaOptions {
                max_n: limits.max_n,
                exec,
            };
            let nz = igusa_zeta_newton_series(&l.series, &l.ctx, opts)?;
            let mut v = json!({
                "input": l.series.name(),
                "engine": "newton",
                "zeta": zeta_json(&nz.zeta, *latex),
            });
            if *terms {
                v["terms"] = json!(&nz.terms);
            }
            Ok(v)
        }
        Command::Zeta1 {
            source,
            latex,
            trace,
        } => {
            let l = load(source, limits)?;
            let opts = OneVarOptions {
                depth_limit: limits.depth_limit,
                exec,
            };
            if l.series.n() != 1 {
                return Err(ZetaError::PreconditionViolated(format!(
                    "zeta1 needs one variable, input has {}",
                    l.series.n()
                )));
            }
            if l.series.is_polynomial() {
                let f = l.series.truncate(l.series.explicit_degree());
                let r = one_var_zeta(&f, &l.ctx, opts)?;
                let mut v = json!({
                    "input": l.series.name(),
                    "engine": "onevar",
                    "zeta": zeta_json(&r.zeta, *latex),
                    "balls": r.trace.count(),
                });
                if *trace {
                    v["trace"] = json!(&r.trace);
                }
                Ok(v)
            } else {
                let r = stabilization_threshold_simple(&l.series, &l.ctx, opts)?;
                let mut v = json!({
                    "input": l.series.name(),
                    "engine": "onevar",
                    "threshold": r.threshold,
                    "max_valuation": r.max_valuation,
                    "zeta": zeta_json(&r.zeta, *latex),
                    "balls": r.balls,
                });
                if *trace {
                    let f = l.series.truncate(r.threshold);
                    v["trace"] = json!(&one_var_zeta(&f, &l.ctx, opts)?.trace);
                }
                Ok(v)
            }
        }
        Command::OracleCount { source, m, s } => {
            let l = load(source, limits)?;
            let c = count_solutions_series(&l.series, &l.ctx, *m, exec)?;
            let mut v = json!({
                "input": l.series.name(),
                "p": c.p,
                "n": c.n,
                "m": m,
                "counts": c.counts,
                "mu": strings(&c.mus()),
                "series": strings(&zeta_series_from_counts(&c)),
            });
            if let Some(s) = s {
                let (lo, hi) = numeric_zeta(&c, *s)?;
                v["numeric"] = json!({"s": s, "lower": lo, "upper": hi});
            }
            Ok(v)
        }
        Command::TruncateScan {
            source,
            d_min,
            d_max,
            engine,
            latex,
        } => {
            let l = load(source, limits)?;
            let opts = ScanOptions {
                depth_limit: limits.depth_limit,
                max_n: limits.max_n,
                exec,
            };
            let report = scan(&l.series, &l.ctx, *d_min, *d_max, *engine, opts)?;
            let mut v = json!(&report);
            if *latex {
                for (entry, out) in report
                    .results
                    .iter()
                    .zip(v["results"].as_array_mut().unwrap())
                {
                    if let Some(z) = &entry.zeta {
                        out["zeta"]["latex"] = json!(format!("Z(s) = {}", z.latex()));
                    }
                }
            }
            Ok(v)
        }
    }
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(T::to_string).collect()
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            emit(&json!({"error": {
                "kind": "UsageError",
                "message": message.trim_end(),
                "exit_code": 2,
            }}));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(e) => {
            emit(&error_json(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
