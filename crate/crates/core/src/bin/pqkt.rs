use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pqkt::catalog;
use pqkt::manifest::Manifest;
use pqkt::report::Status;
use pqkt::suite::{self, RunConfig};

#[derive(Parser)]
#[command(name = "pqkt", version, about = "Verify PQKT identities on polynomial models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate identity suites on the model described by a manifest
    Run {
        manifest: PathBuf,
        /// Restrict to these suites (repeatable)
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Number of sample points
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Multiply every tolerance by this factor
        #[arg(long)]
        tol_scale: Option<f64>,
        /// Write the canonical JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in models
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
    /// Print a manifest for a catalog model
    Emit {
        kind: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = catalog::DEFAULT_SEED)]
        seed: u64,
    },
}

fn run(
    path: PathBuf,
    suites: Vec<String>,
    points: Option<usize>,
    seed: Option<u64>,
    tol_scale: Option<f64>,
    out: Option<PathBuf>,
) -> Result<bool, String> {
    let m = Manifest::load(&path).map_err(|e| e.to_string())?;
    let model = m.model.build().map_err(|e| e.to_string())?;
    let mut cfg = RunConfig::from_manifest(&m);
    if !suites.is_empty() {
        cfg.suites = suites;
    }
    if let Some(p) = points {
        cfg.points = p;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = tol_scale {
        if !(t > 0.0 && t.is_finite()) {
            return Err("--tol-scale must be positive".into());
        }
        cfg.tolerance_scale = t;
    }
    let report = suite::run(&model, &cfg).map_err(|e| e.to_string())?;
    let json = report.to_canonical_json();
    match out {
        Some(p) => std::fs::write(&p, json + "\n").map_err(|e| format!("{}: {e}", p.display()))?,
        None => println!("{json}"),
    }
    eprintln!(
        "{} pass, {} fail, {} not applicable",
        report.count(Status::Pass),
        report.count(Status::Fail),
        report.count(Status::NotApplicable)
    );
    for (id, r) in report.identities.iter().filter(|(_, r)| r.status == Status::Fail) {
        eprintln!("FAIL {id}: {:e} > {:e}", r.max_residual.unwrap_or(f64::NAN), r.tolerance);
    }
    Ok(!report.failed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run { manifest, suites, points, seed, tol_scale, out } => run(manifest, suites, points, seed, tol_scale, out),
        Cmd::Catalog { cmd: CatalogCmd::List } => {
            for e in &catalog::ENTRIES {
                let tag = if e.admits_pqkt { "pqkt" } else { "no-pqkt" };
                println!("{:<20} {:<8} {}", e.name, tag, e.summary);
            }
            Ok(true)
        }
        Cmd::Catalog { cmd: CatalogCmd::Emit { kind, n, seed } } => catalog::by_name(&kind, n, seed)
            .map(|s| {
                println!("{}", Manifest::for_structure(&s).to_json());
                true
            })
            .map_err(|e| e.to_string()),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
