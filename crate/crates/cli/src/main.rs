use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use ffgeom::clifford::{verify_isomorphism, CliffordAlgebra};
use ffgeom::gen::{from_csv, generate, to_csv, GeneratorSpec};
use ffgeom::kinematic::{bisector_decomposition, census};
use ffgeom::report::{ratio, CheckRecord, Quantity, Report};
use ffgeom::stats::{bisector_energy, check_identities, collinearity, distance_profile, segment_class_sizes, triangle_counts};
use ffgeom::structure::{claim_t2_pipeline, k3_from_k, prune_curve_checked, prune_iterate, prune_iterate_checks, rich_curves, rich_threshold};
use ffgeom::{FieldCtx, PointSet};

/// Above this prime the exhaustive suites (kinematic census, claim
/// systems, the ℒ₂ pipeline) are skipped and recorded as vacuous.
const EXHAUSTIVE_P: u64 = 31;
const SAMPLES: usize = 200;

#[derive(Parser)]
#[command(name = "ffgeom", version, about = "Distances, isosceles triangles and bisector energy over F_p²")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a point set and write it as CSV.
    Generate {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "uniform")]
        model: String,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance, triangle and bisector statistics of a CSV point set.
    Stats {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every identity and inequality suite on a CSV point set.
    Verify {
        input: PathBuf,
        /// Rich-curve threshold; defaults to ⌈√(8|A|)⌉.
        #[arg(long)]
        k: Option<u64>,
        /// The decomposition parameter K as a rational, e.g. 7 or 25/2.
        #[arg(long = "K-override")]
        k_override: Option<String>,
        #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
        lambda: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kinematic-map census over F_p.
    Kinematic {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Clifford algebra and group-isomorphism suite.
    Clifford {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
        lambda: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Triangle and pinned-distance statistics over a grid of primes and sizes.
    Sweep {
        /// Comma-separated primes.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u64>,
        /// Comma-separated set sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        size: Vec<usize>,
        #[arg(long, default_value = "uniform")]
        model: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Checks(Value),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    input: Value,
    #[serde(skip_serializing_if = "Value::is_null")]
    data: Value,
    checks: &'a [CheckRecord],
    all_pass: bool,
    elapsed_ms: u128,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Checks(v)) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            ExitCode::from(1)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<PointSet, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(from_csv(&text, &path.display().to_string())?)
}

/// `uniform` with `--size 40` becomes `uniform@40`; explicit models pass through.
fn model_string(model: &str, size: Option<usize>) -> Result<String, Failure> {
    match size {
        Some(_) if model.contains('@') => Err(Failure::Input(format!("--size given but model {model:?} already fixes its size"))),
        Some(n) => Ok(format!("{model}@{n}")),
        None => Ok(model.to_string()),
    }
}

fn finish(command: &'static str, input: Value, data: Value, rep: &Report, started: Instant, out: Option<&Path>) -> Result<(), Failure> {
    let all_pass = rep.all_pass();
    let run = RunReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        input,
        data,
        checks: &rep.checks,
        all_pass,
        elapsed_ms: started.elapsed().as_millis(),
    };
    let text = serde_json::to_string_pretty(&run)? + "\n";
    if all_pass {
        return emit(out, &text);
    }
    if let Some(path) = out {
        emit(Some(path), &text)?;
    }
    Err(Failure::Checks(json!({ "command": command, "input": run.input, "failures": rep.failures() })))
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    let started = Instant::now();
    match cmd {
        Cmd::Generate { p, model, size, seed, out } => {
            let spec = GeneratorSpec::parse(&model_string(&model, size)?, p, seed)?;
            emit(out.as_deref(), &to_csv(&generate(&spec)?))
        }
        Cmd::Stats { input, out } => {
            let a = load(&input)?;
            let rep = Report::default();
            finish("stats", json!({ "file": input.display().to_string(), "p": a.p(), "size": a.len() }), stats_json(&a)?, &rep, started, out.as_deref())
        }
        Cmd::Verify { input, k, k_override, lambda, seed, out } => {
            let a = load(&input)?;
            let big_k = k_override
                .as_deref()
                .map(|s| s.trim().parse::<BigRational>().map_err(|e| Failure::Input(format!("--K-override {s:?}: {e}"))))
                .transpose()?;
            if big_k.as_ref().is_some_and(|v| *v <= BigRational::from_integer(0.into())) {
                return Err(Failure::Input("--K-override must be positive".into()));
            }
            let input_json = json!({
                "file": input.display().to_string(), "p": a.p(), "size": a.len(),
                "k": k, "K": k_override, "lambda": lambda, "seed": seed,
            });
            let rep = verify(&a, k, big_k.map(|v| k3_from_k(&v)), lambda, seed)?;
            finish("verify", input_json, Value::Null, &rep, started, out.as_deref())
        }
        Cmd::Kinematic { p, seed, out } => {
            let ctx = FieldCtx::new(p)?;
            let rep = census(&ctx, SAMPLES, seed);
            finish("kinematic", json!({ "p": p, "seed": seed }), Value::Null, &rep, started, out.as_deref())
        }
        Cmd::Clifford { p, lambda, seed, out } => {
            let ctx = FieldCtx::new(p)?;
            let alg = CliffordAlgebra::new(&ctx, ctx.elem(lambda))?;
            let rep = verify_isomorphism(&alg, SAMPLES, seed);
            finish("clifford", json!({ "p": p, "lambda": lambda, "seed": seed }), Value::Null, &rep, started, out.as_deref())
        }
        Cmd::Sweep { p, size, model, seed, out } => {
            let cells: Vec<(u64, usize)> = p.iter().flat_map(|&q| size.iter().map(move |&n| (q, n))).collect();
            let specs = cells
                .iter()
                .map(|&(q, n)| Ok(GeneratorSpec::parse(&model_string(&model, Some(n))?, q, seed)?))
                .collect::<Result<Vec<_>, Failure>>()?;
            let rows = specs.par_iter().map(sweep_cell).collect::<Result<Vec<_>, Failure>>()?;
            let mut text = String::from(SWEEP_HEADER);
            for r in rows {
                text.push_str(&r);
            }
            emit(out.as_deref(), &text)
        }
    }
}

fn stats_json(a: &PointSet) -> Result<Value, Failure> {
    let prof = distance_profile(a)?;
    let tri = triangle_counts(a);
    let be = bisector_energy(a);
    let col = collinearity(a);
    let sizes = segment_class_sizes(a);
    let n = a.len() as u64;
    let t_ratio = Quantity::from(ratio(tri.t_star as u128 * a.p() as u128, (n as u128).pow(3)));
    Ok(json!({
        "delta": prof.delta,
        "delta0": prof.delta0,
        "pin_max": prof.pin_max,
        "pin_max_nonzero": prof.pin_max_nonzero,
        "pin_argmax": [prof.pin_argmax.x.value(), prof.pin_argmax.y.value()],
        "t_star": tri.t_star,
        "t_ni": tri.t_ni,
        "t_star_p_over_n3": t_ratio,
        "bisector_energy": be.b.to_string(),
        "bisector_energy_star": be.b_star.to_string(),
        "max_collinear": col.lines,
        "max_cocircular": col.circles,
        "isotropic_pairs": sizes[0],
        "distance_classes": sizes[1..].iter().filter(|&&s| s > 0).count(),
    }))
}

fn verify(a: &PointSet, k: Option<u64>, k3: Option<BigRational>, lambda: i64, seed: u64) -> Result<Report, Failure> {
    let ctx = a.ctx();
    let mut rep = check_identities(a);

    let fam = rich_curves(a, k.unwrap_or_else(|| rich_threshold(a.len())));
    rep.extend(fam.checks());
    for c in &fam.curves {
        rep.extend(prune_curve_checked(a, &c.curve).1);
    }
    rep.extend(prune_iterate_checks(a, &prune_iterate(a)));

    if a.p() <= EXHAUSTIVE_P {
        rep.extend(bisector_decomposition(a)?);
        rep.extend(claim_t2_pipeline(a, k3)?.report);
        rep.extend(census(&ctx, SAMPLES, seed));
    } else {
        let why = format!("p > {EXHAUSTIVE_P}: exhaustive suites skipped");
        for name in ["bisector_decomposition", "claim_t2_pipeline", "kinematic_census"] {
            rep.push(CheckRecord::vacuous(name, "exhaustive suite", &why));
        }
    }
    let alg = CliffordAlgebra::new(&ctx, ctx.elem(lambda))?;
    rep.extend(verify_isomorphism(&alg, SAMPLES, seed));
    Ok(rep)
}

const SWEEP_HEADER: &str = "p,size,model,seed,t_star,t_star_p_over_n3,t_excess_ratio,pin_max,pin_max_nonzero,pin_over_n23,pin_over_n43p23,pin_over_p\n";

/// One CSV row. The excess ratio is (T* − |A|³/p) / min(p^{2/3}|A|^{5/3} + p^{1/4}|A|², |A|^{7/3}).
fn sweep_cell(spec: &GeneratorSpec) -> Result<String, Failure> {
    let a = generate(spec)?;
    let (p, n) = (spec.p as f64, a.len() as f64);
    let t = triangle_counts(&a).t_star;
    let prof = distance_profile(&a)?;
    let excess = (t as f64 - n.powi(3) / p) / (p.powf(2.0 / 3.0) * n.powf(5.0 / 3.0) + p.powf(0.25) * n * n).min(n.powf(7.0 / 3.0));
    let pin = prof.pin_max_nonzero as f64;
    let model = spec.components.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("+");
    Ok(format!(
        "{},{},{},{},{},{:.6},{:.6},{},{},{:.6},{:.6},{:.6}\n",
        spec.p,
        a.len(),
        model,
        spec.seed,
        t,
        t as f64 * p / n.powi(3),
        excess,
        prof.pin_max,
        prof.pin_max_nonzero,
        pin / n.powf(2.0 / 3.0),
        pin / (n.powf(4.0 / 3.0) * p.powf(-2.0 / 3.0)),
        pin / p,
    ))
}
