//! `wdvv-kit`: command-line front end of `wdvv-core`.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use wdvv_core::frobenius::{bundled_source, parse_manifest, FrobeniusData};
use wdvv_core::pipeline::{
    all_selections, examples, run_check, run_hierarchy, run_transform, Report, RunError, Selection,
    Symmetry, VerifyContext, VerifyRequest,
};
use wdvv_core::solutions::parse_grid;

use config::FileConfig;

#[derive(Parser, Debug)]
#[command(
    name = "wdvv-kit",
    version,
    about = "Frobenius manifolds, principal hierarchies and their symmetries"
)]
struct Cli {
    /// Config file whose keys mirror the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the WDVV axioms and type-2 eligibility.
    Check(Common),
    /// Build and dump theta, R, Omega and the flows.
    Hierarchy(Common),
    /// Apply a symmetry and describe the hatted manifold.
    Transform(WithSymmetry),
    /// Run symbolic and numeric verifications of a symmetry.
    Verify(VerifyArgs),
    /// List the bundled manifolds.
    Examples,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Manifold file, or the name of a bundled manifold.
    manifold: Option<String>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (check, verify) or directory (hierarchy, transform).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
struct WithSymmetry {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    type1: bool,
    #[arg(long)]
    kappa: Option<usize>,
    #[arg(long)]
    type2: bool,
}

#[derive(Args, Debug, Clone, Default)]
struct VerifyArgs {
    #[command(flatten)]
    sym: WithSymmetry,
    /// Run every applicable verification.
    #[arg(long)]
    all: bool,
    #[arg(long)]
    prop1: bool,
    #[arg(long)]
    prop2: bool,
    #[arg(long)]
    prop3: bool,
    #[arg(long)]
    string: bool,
    /// Comma-separated selection: map, eta_c, metrics, genus1, gfun, prop1, prop2, prop3, string.
    #[arg(long, value_delimiter = ',')]
    select: Vec<String>,
    /// Grid, e.g. `center=x:0.5,2.0:1.0;axes=x,2.0,1.1;radius=0.01;points=3`.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    #[default]
    Json,
    Markdown,
}

struct Failure(RunError);

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure(e)
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure(RunError::Input(msg.into()))
}

fn load_manifold(spec: Option<&str>) -> Result<FrobeniusData, Failure> {
    let spec = spec.ok_or_else(|| input("no manifold given"))?;
    let path = Path::new(spec);
    let src = if path.exists() {
        fs::read_to_string(path).map_err(|e| input(format!("{spec}: {e}")))?
    } else if let Some(s) = bundled_source(spec) {
        s.to_string()
    } else {
        return Err(input(format!("{spec}: no such file or bundled manifold")));
    };
    parse_manifest(&src).map_err(|e| input(format!("{spec}: {e}")))
}

fn render(r: &Report, f: Format) -> String {
    match f {
        Format::Json => r.to_json(),
        Format::Markdown => r.to_markdown(),
    }
}

fn ext(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Markdown => "md",
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn verdict(r: &Report) -> ExitCode {
    eprintln!(
        "{} {}: {}",
        r.command,
        r.manifold,
        if r.passed { "PASS" } else { "FAIL" }
    );
    ExitCode::from(if r.passed { 0 } else { 1 })
}

/// Writes the report to `out` or stdout.
fn emit(r: &Report, f: Format, out: Option<&Path>) -> Result<ExitCode, Failure> {
    let text = render(r, f);
    match out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(verdict(r))
}

/// Writes named text files plus the report into `dir`, or prints the texts.
fn emit_dir(
    r: &Report,
    f: Format,
    out: Option<&Path>,
    files: &[(&str, &str)],
) -> Result<ExitCode, Failure> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
            for (name, text) in files {
                write(&dir.join(name), text)?;
            }
            write(&dir.join(format!("report.{}", ext(f))), &render(r, f))?;
        }
        None => {
            for (_, text) in files {
                print!("{text}");
            }
        }
    }
    Ok(verdict(r))
}

fn symmetry(a: &WithSymmetry) -> Result<Symmetry, Failure> {
    match (a.type1, a.type2) {
        (true, true) => Err(input("choose one of --type1 and --type2")),
        (true, false) => Ok(Symmetry::Type1 {
            kappa: a.kappa.ok_or_else(|| input("--type1 needs --kappa"))?,
        }),
        (false, true) => Ok(Symmetry::Type2),
        (false, false) => Err(input(
            "a symmetry is required: --type1 --kappa K or --type2",
        )),
    }
}

fn selection(a: &VerifyArgs, m: &FrobeniusData, sym: Symmetry) -> Result<Vec<Selection>, Failure> {
    let mut sel: Vec<Selection> = Vec::new();
    for (on, s) in [
        (a.prop1, Selection::Prop1),
        (a.prop2, Selection::Prop2),
        (a.prop3, Selection::Prop3),
        (a.string, Selection::String),
    ] {
        if on {
            sel.push(s);
        }
    }
    for name in &a.select {
        sel.push(
            Selection::from_name(name.trim())
                .ok_or_else(|| input(format!("unknown selection `{name}`")))?,
        );
    }
    if a.all {
        sel.extend(all_selections(m, sym));
    }
    if sel.is_empty() {
        sel.push(Selection::Map);
    }
    sel.sort();
    sel.dedup();
    Ok(sel)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(input)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Examples => {
            for (name, desc) in examples() {
                println!("{name:<6} {desc}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check(c) => {
            let c = file.common(c);
            let m = load_manifold(c.manifold.as_deref())?;
            emit(
                &run_check(&m),
                c.format.unwrap_or_default(),
                c.out.as_deref(),
            )
        }
        Command::Hierarchy(c) => {
            let c = file.common(c);
            let m = load_manifold(c.manifold.as_deref())?;
            let (r, d) = run_hierarchy(&m, c.order.unwrap_or(4))?;
            let files = [
                ("theta.txt", d.theta.as_str()),
                ("r.txt", d.r.as_str()),
                ("omega.txt", d.omega.as_str()),
                ("flows.txt", d.flows.as_str()),
            ];
            emit_dir(&r, c.format.unwrap_or_default(), c.out.as_deref(), &files)
        }
        Command::Transform(a) => {
            let a = file.with_symmetry(a);
            let m = load_manifold(a.common.manifold.as_deref())?;
            let sym = symmetry(&a)?;
            let (r, text) = run_transform(&m, sym, a.common.order.unwrap_or(3))?;
            let c = &a.common;
            emit_dir(
                &r,
                c.format.unwrap_or_default(),
                c.out.as_deref(),
                &[("transform.txt", &text)],
            )
        }
        Command::Verify(a) => {
            let a = file.verify(a);
            let c = a.sym.common.clone();
            let m = load_manifold(c.manifold.as_deref())?;
            let sym = symmetry(&a.sym)?;
            let grid = a
                .grid
                .as_deref()
                .map(parse_grid)
                .transpose()
                .map_err(input)?;
            let req = VerifyRequest {
                order: c.order.unwrap_or(3),
                symmetry: sym,
                selection: selection(&a, &m, sym)?,
                grid,
            };
            let ctx = VerifyContext::new(&m, req)?;
            let mut sections = vec![ctx.solution_section()];
            sections.extend(
                ctx.request
                    .selection
                    .par_iter()
                    .map(|&s| ctx.section(s))
                    .collect::<Vec<_>>(),
            );
            emit(
                &ctx.report(sections),
                c.format.unwrap_or_default(),
                c.out.as_deref(),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
