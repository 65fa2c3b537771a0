//! Describe a model in JSON, validate it and build the structure.
use pqkt::manifest::Manifest;

fn main() -> pqkt::error::Result<()> {
    let mut f = vec![r#"{"exponents": [0,0,0,0,0,0,0,0], "coeff": 1.0}"#.to_string()];
    f.push(r#"{"exponents": [0,1,1,0,0,0,0,0], "coeff": 0.2}"#.into());
    let text = format!(
        r#"{{"model": {{"kind": "conformal", "base": {{"kind": "flat", "n": 2}}, "f": [{}]}},
            "samples": {{"count": 4, "seed": 11}}, "suites": ["conformal"]}}"#,
        f.join(",")
    );
    let m = Manifest::parse(&text, "inline")?;
    let s = m.model.build()?;
    println!("kind {} n {} conformal {}", m.model.kind(), s.n, s.is_conformal());
    println!("{}", m.to_json());

    let bad = r#"{"model": {"kind": "flat", "n": 2}, "samples": {"count": 0}}"#;
    println!("invalid manifest: {}", Manifest::parse(bad, "inline").unwrap_err());
    Ok(())
}
