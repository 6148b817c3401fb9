//! Command-line definitions and dispatch.

use std::path::{Path, PathBuf};
use std::process::{Child, Command};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use crate::runner::{execute, output_dir, write_outputs};
use crate::scenario::{validate_scenario, Scenario, ValidationReport};
use crate::soliton::{self, Kind, Tracking};

#[derive(Debug, Parser)]
#[command(name = "geoflow", version, about = "Curve shortening flow on S², R² and H²")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Check a scenario's initial data against the flow hypotheses.
    Validate { file: PathBuf },
    /// Run a scenario and write diagnostics.csv, snapshots.jsonl and summary.json.
    Run {
        file: PathBuf,
        /// Output directory (default: $GEOFLOW_OUT/<name>, or out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run even if validation fails; invariant checks are then skipped.
        #[arg(long)]
        force: bool,
    },
    /// Residual tables for the self-similar solutions.
    SolitonCheck(SolitonArgs),
    /// Run every scenario file in a directory in separate processes.
    Sweep {
        dir: PathBuf,
        /// Output root (default: $GEOFLOW_OUT, or out).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
        /// Maximum number of concurrent runs.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct SolitonArgs {
    #[arg(long)]
    pub grim_reaper: bool,
    #[arg(long)]
    pub circle: bool,
    #[arg(long)]
    pub geodesic: bool,
    /// Resolution (parameter intervals).
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Also run the grim reaper flow to this time and report its tracking error.
    #[arg(long)]
    pub track: Option<f64>,
    /// Resolution of the tracking run.
    #[arg(long, default_value_t = 128)]
    pub track_n: usize,
}

pub fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Cmd::Validate { file } => {
            let (scn, report) = load_and_validate(&file)?;
            print_validation(&scn, &report);
            Ok(if report.passed() { 0 } else { 1 })
        }
        Cmd::Run { file, out, force } => run_file(&file, out.as_deref(), force),
        Cmd::SolitonCheck(args) => soliton_check(&args),
        Cmd::Sweep { dir, out, force, jobs } => sweep(&dir, out.as_deref(), force, jobs),
    }
}

pub fn load_and_validate(file: &Path) -> anyhow::Result<(Scenario, ValidationReport)> {
    let scn = Scenario::load(file)?;
    let curve = scn.build_curve().with_context(|| format!("building initial curve of {}", file.display()))?;
    let report = validate_scenario(&scn, &curve)?;
    Ok((scn, report))
}

fn print_validation(scn: &Scenario, report: &ValidationReport) {
    println!("scenario {} ({})", scn.name, scn.surface.name());
    for c in &report.checks {
        println!("  {:<24} {}  {}", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
    }
}

pub fn run_file(file: &Path, out: Option<&Path>, force: bool) -> anyhow::Result<i32> {
    let (scn, report) = load_and_validate(file)?;
    if !report.passed() && !force {
        print_validation(&scn, &report);
        bail!("{} fails validation; pass --force to run it anyway", file.display());
    }
    scn.flow.validate().with_context(|| format!("flow config of {}", file.display()))?;
    let output = execute(&scn, report, force)?;
    let dir = output_dir(out, &scn.name);
    write_outputs(&output, &dir)?;
    let s = &output.summary;
    println!(
        "{}: {:?} at t={:.6e} after {} steps ({} records, {} violations) -> {}",
        s.scenario,
        s.status,
        s.t_final,
        s.steps,
        s.records,
        s.violations.len(),
        dir.display()
    );
    Ok(output.exit_code())
}

fn soliton_check(args: &SolitonArgs) -> anyhow::Result<i32> {
    let mut kinds = Vec::new();
    if args.grim_reaper {
        kinds.push(Kind::GrimReaper);
    }
    if args.circle {
        kinds.push(Kind::Circle);
    }
    if args.geodesic {
        kinds.push(Kind::Geodesic);
    }
    if kinds.is_empty() {
        bail!("select at least one of --grim-reaper, --circle, --geodesic");
    }
    if args.n < 16 || args.track_n < 16 {
        bail!("--n and --track-n must be at least 16");
    }
    let track = args.track.map(|t_end| Tracking { t_end, n: args.track_n });
    let mut ok = true;
    for k in kinds {
        let t = soliton::tables(k, args.n, track)?;
        print!("{}", soliton::render(&t));
        ok &= t.iter().all(|t| t.passed());
    }
    Ok(if ok { 0 } else { 1 })
}

fn sweep(dir: &Path, out: Option<&Path>, force: bool, jobs: Option<usize>) -> anyhow::Result<i32> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no scenario files in {}", dir.display());
    }
    let root = out.map(Path::to_path_buf).unwrap_or_else(|| output_dir(None, ""));
    let exe = std::env::current_exe().context("locating the geoflow executable")?;
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);

    let mut pending = files.iter();
    let mut running: Vec<(&PathBuf, Child)> = Vec::new();
    let mut results = Vec::new();
    loop {
        while running.len() < jobs {
            let Some(file) = pending.next() else { break };
            let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let mut cmd = Command::new(&exe);
            cmd.arg("run").arg(file).arg("--out").arg(root.join(stem));
            if force {
                cmd.arg("--force");
            }
            running.push((file, cmd.spawn().with_context(|| format!("starting run of {}", file.display()))?));
        }
        if running.is_empty() {
            break;
        }
        let (file, mut child) = running.remove(0);
        let status = child.wait()?;
        results.push((file.clone(), status.code().unwrap_or(-1)));
    }
    println!("{:<48} exit", "scenario");
    let mut failed = false;
    for (file, code) in &results {
        println!("{:<48} {code}", file.display());
        failed |= !matches!(code, 0 | 2 | 3);
    }
    Ok(if failed { 1 } else { 0 })
}
