//! Curvature of the PQKT connection and the residuals of its identities.
use pqkt::catalog;
use pqkt::connections::pqkt_connection;
use pqkt::curvature::curvature_data;
use pqkt::jet::JetSpace;

fn main() -> pqkt::error::Result<()> {
    let m = catalog::quadratic_conformal(2);
    let space = JetSpace::new(m.dim(), 2)?;
    let s = m.jets(&space, &[0.3, -0.1, 0.25, 0.4, -0.35, 0.05, 0.2, -0.45], 2)?;
    let pq = pqkt_connection(&s)?;
    let cd = curvature_data(&s, &pq)?;
    println!("scal {:.6}  scal_g {:.6}  |∇T| {:.3e}", cd.scal, cd.scal_g, cd.torsion_parallel_defect());
    for (id, order, r) in cd.identities() {
        println!("{id:<18} {order:?}  {:.2e}", r.max_abs());
    }
    Ok(())
}
