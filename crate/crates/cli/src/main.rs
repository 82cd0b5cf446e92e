use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use flipbraid::braid::{parse_word, BraidEngine, LoopShape, RelationFamily, VerifyOptions};
use flipbraid::fixtures::{self, FixtureSet};
use flipbraid::flip::FlipRecord;
use flipbraid::svg::render_svg;
use flipbraid::{ExtractOptions, Rational};

#[derive(Parser, Debug)]
#[command(name = "flipbraid", version, about = "Pure braid invariants from Delaunay flips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Matrix invariant of a pure braid word.
    Invariant(InvariantArgs),
    /// Check relation families.
    Verify(VerifyArgs),
    /// Run the bundled reference-matrix suites.
    Fixtures(FixturesArgs),
    /// Flip sequence of a word, optionally with SVG snapshots.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct Sampling {
    /// Sampling step, p/q.
    #[arg(long, default_value = "1/64")]
    step: Rational,
    /// Bisection floor, p/q.
    #[arg(long, default_value = "1/1099511627776")]
    floor: Rational,
}

#[derive(Args, Debug)]
struct InvariantArgs {
    #[arg(long)]
    n: usize,
    /// Word such as "b(1,2) b(2,3)^-1".
    #[arg(long, default_value = "")]
    word: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    sampling: Sampling,
    /// Include the monic characteristic polynomial.
    #[arg(long)]
    charpoly: bool,
    /// Include the trace.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    n: usize,
    /// inverse, far_comm, pentagon or pb_all; repeat for several. Default: all.
    #[arg(long)]
    family: Vec<RelationFamily>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the full JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FixturesArgs {}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "")]
    word: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    sampling: Sampling,
    /// Write one SVG per triangulation between flips.
    #[arg(long)]
    svg_dir: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Math(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Math(format!("{e:#}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Invariant(a) => cmd_invariant(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Fixtures(a) => cmd_fixtures(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn check_n(n: usize) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    Ok(())
}

fn options(s: &Sampling) -> Result<ExtractOptions, Failure> {
    if !(s.floor > Rational::zero() && s.floor < s.step && s.step <= Rational::one()) {
        return Err(Failure::Usage("need 0 < floor < step <= 1".into()));
    }
    Ok(ExtractOptions {
        step: s.step.clone(),
        floor: s.floor.clone(),
        ..ExtractOptions::default()
    })
}

fn engine(n: usize, s: &Sampling) -> Result<BraidEngine, Failure> {
    check_n(n)?;
    let opts = options(s)?;
    BraidEngine::with_options(n, LoopShape::default(), opts).map_err(|e| Failure::Math(e.to_string()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).context("writing stdout")?;
        }
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value).context("serializing")?;
    text.push('\n');
    Ok(text)
}

fn cmd_invariant(a: InvariantArgs) -> Result<(), Failure> {
    let mut engine = engine(a.n, &a.sampling)?;
    let word = parse_word(&a.word, a.n).map_err(|e| Failure::Usage(e.to_string()))?;
    let result = engine.invariant(&word).map_err(|e| Failure::Math(e.to_string()))?;
    emit(&to_json(&result.to_json(a.trace, a.charpoly))?, a.out.as_deref())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    check_n(a.n)?;
    let families = if a.family.is_empty() {
        RelationFamily::all().to_vec()
    } else {
        a.family.clone()
    };
    let opts = VerifyOptions {
        seed: a.seed,
        trials: a.trials,
        max_instances: None,
    };
    let mut reports = Vec::new();
    let mut ok = true;
    for family in families {
        let report = flipbraid::braid::verify_relations(a.n, family, &opts);
        let failures: Vec<_> = report.failures().collect();
        if failures.is_empty() {
            println!("PASS {} ({} instances)", family.name(), report.instances.len());
        } else {
            ok = false;
            println!(
                "FAIL {} ({} of {} instances failed)",
                family.name(),
                failures.len(),
                report.instances.len()
            );
            for f in failures {
                let detail = match (&f.error, &f.mismatch) {
                    (Some(e), _) => e.clone(),
                    (None, Some((l, r))) => match l.first_difference(r) {
                        Some((i, j)) if i < l.rows() && j < l.cols() => {
                            format!("entry ({i}, {j}): {} vs {}", l.get(i, j), r.get(i, j))
                        }
                        _ => "shape mismatch".into(),
                    },
                    _ => String::new(),
                };
                eprintln!("  {}: {detail}", f.instance);
            }
        }
        reports.push(serde_json::json!({ "family": family.name(), "report": report }));
    }
    if let Some(path) = &a.out {
        emit(&to_json(&reports)?, Some(path))?;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Math("relation check failed".into()))
    }
}

fn cmd_fixtures(_: FixturesArgs) -> Result<(), Failure> {
    let source = match std::env::var_os(fixtures::ENV_VAR) {
        Some(dir) => PathBuf::from(dir).display().to_string(),
        None => "bundled".to_string(),
    };
    let set = FixtureSet::load().map_err(|e| Failure::Math(e.to_string()))?;
    set.verify_manifest().map_err(|e| Failure::Math(e.to_string()))?;
    println!("PASS manifest ({source})");
    let zeta = [1, 2, 3, 4, 5].map(Rational::from);
    let suites = [
        fixtures::check_pentagon(&set, &zeta),
        fixtures::check_braid_products(&set),
        fixtures::check_flip_pair(&set),
    ];
    let mut ok = true;
    for outcome in suites {
        match outcome {
            Ok(s) => println!("PASS {} ({} checks)", s.suite, s.checks),
            Err(e) => {
                ok = false;
                println!("FAIL {e}");
            }
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Math("fixture mismatch".into()))
    }
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), Failure> {
    let mut engine = engine(a.n, &a.sampling)?;
    let word = parse_word(&a.word, a.n).map_err(|e| Failure::Usage(e.to_string()))?;
    let events = engine.word_events(&word).map_err(|e| Failure::Math(e.to_string()))?;
    let records: Vec<FlipRecord> = events.iter().map(FlipRecord::from).collect();
    emit(&to_json(&records)?, a.out.as_deref())?;
    if let Some(dir) = &a.svg_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let snapshots = engine.snapshots(&word).map_err(|e| Failure::Math(e.to_string()))?;
        for (k, t) in snapshots.iter().enumerate() {
            let title = if k == 0 {
                "initial".to_string()
            } else {
                format!("after flip {k}")
            };
            let path = dir.join(format!("snapshot_{k:04}.svg"));
            fs::write(&path, render_svg(t, &title)).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}
