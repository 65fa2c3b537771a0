//! Complex-product connection, the canonical connection preserving the
//! paraquaternionic bundle, and the integrability torsion.
use pqkt::catalog;
use pqkt::connections::{canonical_p_connection, complex_product_connection, omega_extraction};
use pqkt::jet::JetSpace;

fn main() -> pqkt::error::Result<()> {
    for name in ["conformal", "frame-deformed"] {
        let m = catalog::by_name(name, 2, catalog::DEFAULT_SEED)?;
        let space = JetSpace::new(m.dim(), 1)?;
        let s = m.jets(&space, &[0.1, -0.2, 0.3, 0.1, 0.0, 0.2, -0.1, 0.25], 1)?;
        let (j, dj) = (s.j_val(), s.dj_val()?);
        let cp = complex_product_connection(&j, &dj);
        let can = canonical_p_connection(&cp.gamma_cp, &j, &dj, s.n)?;
        let (_, preserve) = omega_extraction(&can.gamma, &j, &dj)?;
        println!(
            "{name:<15} |T^CP| {:.3e}  |T^P| {:.3e}  preserves P to {:.1e}",
            cp.th.max_abs(),
            can.torsion.max_abs(),
            preserve
        );
    }
    Ok(())
}
