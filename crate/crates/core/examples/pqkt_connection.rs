//! Existence test and explicit PQKT connection: torsion 3-form, 1-forms t_α and ω_α.
use pqkt::algebra::jform;
use pqkt::catalog;
use pqkt::connections::pqkt_connection;
use pqkt::jet::JetSpace;

fn main() -> pqkt::error::Result<()> {
    let p = [0.3, -0.1, 0.25, 0.4, -0.35, 0.05, 0.2, -0.45];
    for e in &catalog::ENTRIES {
        let m = catalog::by_name(e.name, 2, catalog::DEFAULT_SEED)?;
        let space = JetSpace::new(m.dim(), 2)?;
        let s = m.jets(&space, &p, 2)?;
        match pqkt_connection(&s) {
            Ok(pq) => {
                let j = s.j_val();
                let jt: Vec<_> = (0..3).map(|a| jform(&pq.t_alpha[a].values(), &j[a])).collect();
                println!(
                    "{:<20} |T| {:.4}  |t| {:.4}  |J1t1 - J2t2| {:.1e}",
                    e.name,
                    pq.torsion.values().max_abs(),
                    pq.t.values().max_abs(),
                    jt[0].max_abs_diff(&jt[1])
                );
            }
            Err(err) => println!("{:<20} {err}", e.name),
        }
    }
    Ok(())
}
