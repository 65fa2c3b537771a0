//! Truncated Taylor jets of a polynomial field.
use pqkt::jet::JetSpace;
use pqkt::poly::PolyField;

fn main() -> pqkt::error::Result<()> {
    let d = 3;
    let mut f = PolyField::constant(d, 1.0);
    f.add_term(vec![1, 0, 0], 0.5);
    f.add_term(vec![0, 2, 1], -2.0);
    let space = JetSpace::new(d, 2)?;
    let p = [0.3, -0.4, 0.2];
    let jf = f.eval_jet(&space, &p, 2)?;
    println!("f(p)        = {}", jf.value());
    println!("grad f(p)   = {:?}", jf.gradient());
    println!("d2f/dy dz   = {}", jf.derivative(&[0, 1, 1]));
    let inv = jf.recip()?;
    println!("(1/f)(p)    = {}  grad {:?}", inv.value(), inv.gradient());
    let ln = jf.ln()?;
    println!("ln f(p)     = {}  grad {:?}", ln.value(), ln.gradient());
    Ok(())
}
