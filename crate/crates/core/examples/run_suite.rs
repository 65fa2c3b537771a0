//! Run every suite on a catalog model and print the canonical report.
use pqkt::catalog;
use pqkt::report::Status;
use pqkt::suite::{run, RunConfig};

fn main() -> pqkt::error::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "conformal-quadratic".into());
    let m = catalog::by_name(&name, 2, catalog::DEFAULT_SEED)?;
    let report = run(&m, &RunConfig { points: 5, seed: 1, ..Default::default() })?;
    eprintln!(
        "{name}: {} pass, {} fail, {} not applicable",
        report.count(Status::Pass),
        report.count(Status::Fail),
        report.count(Status::NotApplicable)
    );
    println!("{}", report.to_canonical_json());
    Ok(())
}
