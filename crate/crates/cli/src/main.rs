use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use weil_core::finmod::FinModule;
use weil_core::spgroup::{enumerate_sp, sp_random, SpElement, SymplecticSpace};
use weil_core::weil::{closed_value, verify_identities, Oracle, VerifyOptions};
use weil_core::zmod::{AdditiveCharacter, Ring};

#[derive(Parser)]
#[command(name = "weil", version, about = "Weil character values of finite symplectic modules")]
struct Cli {
    /// Run the identity battery on the built-in fixtures and exit.
    #[arg(long)]
    selftest: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Formula,
    Oracle,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct Context {
    /// Module as a path or inline JSON: {"m": 9, "divisors": [3, 9, 3, 9], "omega": [[...]]}
    #[arg(long)]
    module: String,
    /// Twist `s` of the additive character `r -> exp(2 pi i s r / m)`.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    lambda_s: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the character at one element.
    Eval {
        #[command(flatten)]
        ctx: Context,
        /// Matrix of g (rows are images of the generators), path or inline JSON.
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, value_enum, default_value_t = Method::Formula)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the identity battery; one JSON line per check.
    Verify {
        #[command(flatten)]
        ctx: Context,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Skip the matrix oracle cross-checks.
        #[arg(long)]
        no_oracle: bool,
    },
    /// Tabulate the character over the whole group or a random sample.
    Table {
        #[command(flatten)]
        ctx: Context,
        /// Number of random elements; the whole group is enumerated when absent.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<weil_core::Error> for Failure {
    fn from(e: weil_core::Error) -> Self {
        Failure::Check(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleInput {
    m: u64,
    divisors: Vec<u64>,
    omega: Option<Vec<Vec<i64>>>,
}

fn read_json(arg: &str) -> CliResult<Value> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("cannot read {arg}: {e}")))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("malformed JSON: {e}")))
}

fn load_space(arg: &str) -> CliResult<Arc<SymplecticSpace>> {
    let input: ModuleInput = serde_json::from_value(read_json(arg)?)
        .map_err(|e| Failure::Usage(format!("malformed module: {e}")))?;
    let ring = Ring::new(input.m)?;
    let space = match input.omega {
        Some(gram) => SymplecticSpace::new(FinModule::new(ring, input.divisors)?, gram)?,
        None => {
            let k = input.divisors.len() / 2;
            if input.divisors.len() % 2 != 0 || input.divisors[..k] != input.divisors[k..] {
                return Err(Failure::Usage(
                    "without \"omega\" the divisors must read d_1..d_k d_1..d_k".into(),
                ));
            }
            SymplecticSpace::hyperbolic(input.m, &input.divisors[..k])?
        }
    };
    Ok(Arc::new(space))
}

fn load_lambda(space: &SymplecticSpace, s: i64) -> CliResult<AdditiveCharacter> {
    Ok(AdditiveCharacter::new(space.ring(), s)?)
}

fn load_element(space: &Arc<SymplecticSpace>, arg: &str) -> CliResult<SpElement> {
    let rows: Vec<Vec<i64>> =
        serde_json::from_value(read_json(arg)?).map_err(|e| Failure::Usage(format!("malformed matrix: {e}")))?;
    let module = space.module();
    let rows = rows
        .into_iter()
        .map(|r| module.reduce(&r.iter().map(|&x| x as i128).collect::<Vec<_>>()))
        .collect();
    Ok(SpElement::from_matrix(space, rows)?)
}

fn eval(ctx: &Context, g: &str, method: Method, format: Format) -> CliResult<()> {
    let space = load_space(&ctx.module)?;
    let lambda = load_lambda(&space, ctx.lambda_s)?;
    let g = load_element(&space, g)?;
    let mut out = Map::new();
    let closed = closed_value(&g, &lambda)?;
    let name = match method {
        Method::Formula => "formula",
        Method::Oracle => "oracle",
        Method::Both => "both",
    };
    let value = match method {
        Method::Formula => closed,
        Method::Oracle | Method::Both => Oracle::new(&space, lambda)?.value_exact(&g)?,
    };
    out.insert("c".into(), json!(value.c));
    out.insert("eps".into(), json!(value.eps.to_string()));
    out.insert("complex".into(), json!(value.to_string()));
    out.insert("method".into(), json!(name));
    out.insert("order_of_g".into(), json!(g.order()));
    out.insert("displacement_order".into(), json!(g.displacement().order()));
    let mut failed = false;
    if method == Method::Both {
        let raw = Oracle::new(&space, lambda)?.value(&g)?;
        let residual = (raw - closed.to_complex()).norm();
        failed = residual >= 1e-6 * (1.0 + (closed.c as f64).sqrt()) || value != closed;
        out.insert("residual".into(), json!(residual));
    }
    let mut stdout = std::io::stdout().lock();
    match format {
        Format::Json => writeln!(stdout, "{}", Value::Object(out)).ok(),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(stdout);
            let keys: Vec<&String> = out.keys().collect();
            w.write_record(&keys).ok();
            w.write_record(out.values().map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            }))
            .ok();
            w.flush().ok()
        }
    };
    if failed {
        return Err(Failure::Check("oracle and formula disagree".into()));
    }
    Ok(())
}

fn verify(ctx: &Context, seed: u64, samples: usize, oracle: bool) -> CliResult<()> {
    let space = load_space(&ctx.module)?;
    let lambda = load_lambda(&space, ctx.lambda_s)?;
    let report = verify_identities(&space, lambda, &VerifyOptions { seed, samples, oracle })?;
    let mut stdout = std::io::stdout().lock();
    let mut failures = 0usize;
    for check in &report {
        if !check.pass {
            failures += 1;
        }
        writeln!(stdout, "{}", serde_json::to_string(check).expect("serializable")).ok();
    }
    if failures > 0 {
        return Err(Failure::Check(format!("{failures} of {} checks failed", report.len())));
    }
    Ok(())
}

fn table(ctx: &Context, samples: Option<usize>, seed: u64, format: Format) -> CliResult<()> {
    let space = load_space(&ctx.module)?;
    let lambda = load_lambda(&space, ctx.lambda_s)?;
    let elems = match samples {
        None => enumerate_sp(&space)?,
        Some(k) => (0..k as u64)
            .map(|i| sp_random(&space, seed.wrapping_add(i), 3))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let mut rows = Vec::with_capacity(elems.len());
    for g in &elems {
        let v = closed_value(g, &lambda)?;
        rows.push((serde_json::to_string(g.matrix()).expect("serializable"), g.order(), v));
    }
    let stdout = std::io::stdout().lock();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(stdout);
            w.write_record(["g", "order", "c", "eps", "psi"]).ok();
            for (g, order, v) in &rows {
                w.write_record([g.clone(), order.to_string(), v.c.to_string(), v.eps.to_string(), v.to_string()])
                    .ok();
            }
            w.flush().ok();
        }
        Format::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|(g, order, v)| {
                    json!({"g": serde_json::from_str::<Value>(g).expect("valid"), "order": order,
                           "c": v.c, "eps": v.eps.to_string(), "psi": v.to_string()})
                })
                .collect();
            let mut stdout = stdout;
            writeln!(stdout, "{}", Value::Array(arr)).ok();
        }
    }
    Ok(())
}

fn selftest() -> CliResult<()> {
    let fixtures = [
        r#"{"m":3,"divisors":[3,3]}"#,
        r#"{"m":9,"divisors":[3,9,3,9]}"#,
        r#"{"m":15,"divisors":[15,15]}"#,
    ];
    let mut failures = 0;
    for module in fixtures {
        let ctx = Context { module: module.into(), lambda_s: 1 };
        let space = load_space(&ctx.module)?;
        let lambda = load_lambda(&space, 1)?;
        let report = verify_identities(&space, lambda, &VerifyOptions { seed: 0, samples: 10, oracle: true })?;
        let bad = report.iter().filter(|c| !c.pass).count();
        println!("{module}: {} checks, {bad} failed", report.len());
        failures += bad;
    }
    if failures > 0 {
        return Err(Failure::Check(format!("{failures} checks failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match (&cli.command, cli.selftest) {
        (_, true) => selftest(),
        (Some(Command::Eval { ctx, g, method, format }), _) => eval(ctx, g, *method, *format),
        (Some(Command::Verify { ctx, seed, samples, no_oracle }), _) => verify(ctx, *seed, *samples, !no_oracle),
        (Some(Command::Table { ctx, samples, seed, format }), _) => table(ctx, *samples, *seed, *format),
        (None, false) => Err(Failure::Usage("a subcommand or --selftest is required".into())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
