//! Nijenhuis tensors and the bracket relations on a structure that is not integrable.
use pqkt::catalog;
use pqkt::connections::complex_product_connection;
use pqkt::jet::JetSpace;
use pqkt::structures::{bracket_lemma, nijenhuis};

fn main() -> pqkt::error::Result<()> {
    let m = catalog::frame_deformed_model(2, catalog::DEFAULT_SEED);
    let space = JetSpace::new(m.dim(), 1)?;
    let s = m.jets(&space, &[0.2; 8], 1)?;
    let (j, dj) = (s.j_val(), s.dj_val()?);
    for a in 0..3 {
        println!("|N_{}| = {:.4e}", a + 1, nijenhuis(&j[a], &dj[a]).max_abs());
    }
    let cp = complex_product_connection(&j, &dj);
    for (id, rs) in bracket_lemma(&j, &cp.brackets, &cp.th) {
        let worst = rs.iter().map(|r| r.max_abs()).fold(0.0, f64::max);
        println!("{id:<8} residual {worst:.3e}");
    }
    Ok(())
}
