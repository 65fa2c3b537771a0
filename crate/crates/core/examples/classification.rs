//! Lee forms and the structural flags of each catalog model.
use pqkt::catalog;
use pqkt::connections::pqkt_connection;
use pqkt::forms::{classify, Flag};
use pqkt::frame::{build_adapted_frame, PIVOT};
use pqkt::jet::JetSpace;

fn main() -> pqkt::error::Result<()> {
    let p = [0.05, 0.1, -0.2, 0.3, 0.0, -0.15, 0.2, 0.1];
    for e in catalog::ENTRIES.iter().filter(|e| e.admits_pqkt) {
        let m = catalog::by_name(e.name, 2, catalog::DEFAULT_SEED)?;
        let space = JetSpace::new(m.dim(), 2)?;
        let s = m.jets(&space, &p, 2)?;
        let pq = pqkt_connection(&s)?;
        let frame = build_adapted_frame(&s.g_val(), &s.j_val(), PIVOT, 1)?;
        let flags: Vec<String> =
            classify(&s, &pq, &frame)?.into_iter().map(|(k, r)| format!("{k}={}", Flag::from_residual(r).as_str())).collect();
        println!("{:<20} |θ_1| {:.3}  {}", e.name, pq.lee.theta[0].values().max_abs(), flags.join(" "));
    }
    Ok(())
}
