//! Algebraic checks of a para-hypercomplex metric structure and its adapted frame.
use pqkt::catalog;
use pqkt::frame::{build_adapted_frame, PIVOT};
use pqkt::jet::JetSpace;
use pqkt::structures::verify_algebra;

fn main() -> pqkt::error::Result<()> {
    let m = catalog::pushforward_model(2, catalog::DEFAULT_SEED);
    let space = JetSpace::new(m.dim(), 1)?;
    let s = m.jets(&space, &[0.1, 0.2, -0.3, 0.0, 0.4, -0.1, 0.05, 0.3], 1)?;
    let (g, j) = (s.g_val(), s.j_val());
    for (id, r) in verify_algebra(&g, &j) {
        println!("{id:<22} {r:.3e}");
    }
    let frame = build_adapted_frame(&g, &j, PIVOT, 7)?;
    println!("frame gram residual    {:.3e}", frame.gram_residual(&g));
    println!("frame adapted residual {:.3e}", frame.adapted_residual(&j));
    println!("signature              {:?}", frame.signs);
    Ok(())
}
