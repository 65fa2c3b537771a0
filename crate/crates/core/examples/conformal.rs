//! Transport of PQKT data under a conformal change of the metric.
use pqkt::catalog;
use pqkt::conformal::{conformal_point, rescale, transport_checks};
use pqkt::jet::JetSpace;

fn main() -> pqkt::error::Result<()> {
    // rescale a model whose torsion is already non-zero
    let m = rescale(&catalog::quadratic_conformal(2), catalog::default_factor(8));
    let space = JetSpace::new(m.dim(), 2)?;
    let cp = conformal_point(&m, &space, &[0.2, -0.3, 0.1, 0.45, -0.2, 0.0, 0.33, -0.1], 2)?.expect("conformal");
    for c in transport_checks(&cp)? {
        println!("{:<18} {:.2e}", c.id, c.value.max_abs());
    }
    Ok(())
}
