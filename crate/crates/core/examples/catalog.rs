//! List the catalog and print the manifest of each model.
use pqkt::catalog;
use pqkt::manifest::Manifest;

fn main() -> pqkt::error::Result<()> {
    for e in &catalog::ENTRIES {
        let s = catalog::by_name(e.name, 1, catalog::DEFAULT_SEED)?;
        let json = Manifest::for_structure(&s).to_json();
        println!("{} (admits PQKT: {}): {}", e.name, e.admits_pqkt, e.summary);
        println!("  manifest: {} bytes, {} lines", json.len(), json.lines().count());
    }
    Ok(())
}
