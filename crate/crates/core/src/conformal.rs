//! Conformal rescaling `ḡ = f g` and direct transport of PQKT data.

use crate::algebra::{jform, lower_last, raise_last, wedge12, CYCLIC, EPS};
use crate::connections::pqkt_connection;
use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::poly::PolyField;
use crate::structures::{kahler_forms, Model, ParaHermitianStructure, StructureJets};
use crate::tensor::{JetTensor, Real, Tensor};

/// `f · g` with the same `J_α`.
pub fn rescale(s: &ParaHermitianStructure, f: PolyField) -> ParaHermitianStructure {
    crate::catalog::conformal_model(s.clone(), f)
}

fn gradient(h: &Jet) -> Result<JetTensor> {
    let d = h.space().dim();
    let mut v = Vec::with_capacity(d);
    for i in 0..d {
        v.push(h.partial(i)?);
    }
    Ok(Tensor::from_vec(d, 1, v))
}

/// `Σ_α ε_α (J_α dh) ∧ F_α`.
fn twisted_sum<S: Scalar>(dh: &Tensor<S>, j: &[Tensor<S>; 3], f: &[Tensor<S>; 3]) -> Tensor<S> {
    let mut out = wedge12(&jform(dh, &j[0]), &f[0]).scale(EPS[0]);
    for a in 1..3 {
        out.axpy(EPS[a], &wedge12(&jform(dh, &j[a]), &f[a]));
    }
    out
}

/// Connection of `h · g` obtained from a PQKT connection `Γ` of `g`:
/// `ḡ(∇̄_XY,Z) = h g(∇_XY,Z) + ½(dh(X)g(Y,Z) + dh(Y)g(X,Z) − dh(Z)g(X,Y)) − ½ Σ ε_α (J_α dh ∧ F_α)(X,Y,Z)`.
pub fn transport(gamma: &JetTensor, g: &JetTensor, j: &[JetTensor; 3], h: &Jet) -> Result<JetTensor> {
    let d = g.dim();
    let order = gamma.order();
    let h = h.truncate(order + 1);
    let dh = gradient(&h)?;
    let g = g.map(|x| x.truncate(order));
    let j: [JetTensor; 3] = std::array::from_fn(|a| j[a].map(|x| x.truncate(order)));
    let hv = h.truncate(order);
    let low = lower_last(gamma, &g).scale_by(&hv);
    let sym = Tensor::from_fn(d, 3, |ix| {
        let (x, y, z) = (ix[0], ix[1], ix[2]);
        let mut s = dh.at(x).mul(g.at2(y, z));
        s.add_assign(&dh.at(y).mul(g.at2(x, z)));
        s.add_assign(&dh.at(z).mul(g.at2(x, y)).scale(-1.0));
        s.scale(0.5)
    });
    let f = kahler_forms(&g, &j);
    let mut out = low.add(&sym);
    out.axpy(-0.5, &twisted_sum(&dh, &j, &f));
    let ginv_bar = crate::linalg::invert_jet(&g.scale_by(&hv))?;
    Ok(raise_last(&out, &ginv_bar))
}

/// Pointwise data for a conformal model: the model, its base and the factor jet.
pub struct ConformalPoint {
    pub model: StructureJets,
    pub base: StructureJets,
    pub factor: Jet,
}

/// Jets of a conformal model and of its base at `p`; `None` when the model is not conformal.
pub fn conformal_point(
    s: &ParaHermitianStructure,
    space: &std::sync::Arc<crate::jet::JetSpace>,
    p: &[f64],
    order: usize,
) -> Result<Option<ConformalPoint>> {
    let Model::Conformal { base, f } = &s.model else {
        return Ok(None);
    };
    let model = s.jets(space, p, order)?;
    let base = base.jets(space, p, order)?;
    let factor = f.eval_jet(space, p, order)?;
    if factor.value() <= 0.0 {
        return Err(Error::NonPositiveFactor(factor.value()));
    }
    Ok(Some(ConformalPoint { model, base, factor }))
}

/// A named residual tensor and whether its last slot is a vector index.
pub struct Check {
    pub id: &'static str,
    pub value: Real,
    pub vector_valued: bool,
}

fn chk(id: &'static str, value: Real) -> Check {
    Check { id, value, vector_valued: false }
}

fn worst(v: Vec<Real>) -> Real {
    v.into_iter().fold(None::<Real>, |acc, r| match acc {
        Some(a) if a.max_abs() >= r.max_abs() => Some(a),
        _ => Some(r),
    })
    .expect("non-empty")
}

/// Transport laws comparing PQKT data of `f g` against the base data.
pub fn transport_checks(cp: &ConformalPoint) -> Result<Vec<Check>> {
    let base = pqkt_connection(&cp.base)?;
    let bar = pqkt_connection(&cp.model)?;
    let n = cp.base.n as f64;
    let f = &cp.factor;
    let df = gradient(f)?.values();
    let dl = gradient(&f.ln()?)?.values();
    let fv = f.value();
    let j = cp.base.j_val();
    let g = cp.base.g_val();
    let fk = kahler_forms(&g, &j);
    let mut out = Vec::new();

    let direct = transport(&base.gamma, &cp.base.g, &cp.base.j, f)?;
    out.push(Check { id: "eq.z1", value: direct.values().sub(&bar.gamma.values()), vector_valued: true });

    let lee0 = &base.lee;
    let lee1 = &bar.lee;
    out.push(chk(
        "eq.z2.dF",
        worst(
            (0..3)
                .map(|a| {
                    let lhs = jform(&lee1.df_plus[a].values(), &j[a]);
                    let mut rhs = jform(&lee0.df_plus[a].values(), &j[a]).scale(fv);
                    rhs.axpy(-EPS[a], &wedge12(&jform(&df, &j[a]), &fk[a]));
                    lhs.sub(&rhs)
                })
                .collect(),
        ),
    ));
    out.push(chk(
        "eq.z2.theta",
        worst(
            (0..3)
                .map(|a| {
                    let mut r = lee1.theta[a].values().sub(&lee0.theta[a].values());
                    r.axpy(-(2.0 * n - 1.0), &dl);
                    r
                })
                .collect(),
        ),
    ));
    out.push(chk(
        "eq.z2.theta-cross",
        worst(
            CYCLIC
                .iter()
                .map(|&(a, b, c)| {
                    let mut r = lee1.theta_cross[a][c].values().sub(&lee0.theta_cross[a][c].values());
                    r.axpy(-EPS[c], &jform(&dl, &j[b]));
                    r
                })
                .collect(),
        ),
    ));
    out.push(chk(
        "eq.z3.K",
        worst(
            CYCLIC
                .iter()
                .map(|&(a, b, _)| {
                    let mut r = bar.k[a].values().sub(&base.k[a].values());
                    r.axpy(2.0 * EPS[a], &jform(&dl, &j[b]));
                    r
                })
                .collect(),
        ),
    ));
    out.push(chk(
        "eq.z3.omega",
        worst(
            CYCLIC
                .iter()
                .map(|&(a, _, c)| {
                    let mut r = bar.omega[a].values().sub(&base.omega[a].values());
                    r.axpy(EPS[c], &jform(&dl, &j[a]));
                    r
                })
                .collect(),
        ),
    ));
    let a0 = base.a_forms(&j);
    let a1 = bar.a_forms(&j);
    out.push(chk("eq.z3.A", worst((0..3).map(|a| a1[a].sub(&a0[a])).collect())));

    let mut z4 = base.torsion.values().scale(fv);
    z4 = z4.sub(&twisted_sum(&df, &j, &fk));
    out.push(chk("eq.z4", bar.torsion.values().sub(&z4)));
    let mut z5 = bar.t.values().sub(&base.t.values());
    z5.axpy(2.0 * n + 1.0, &dl);
    out.push(chk("eq.z5", z5));

    // f then 1/f returns the base connection
    let fwd = transport(&base.gamma, &cp.base.g, &cp.base.j, f)?;
    let gbar = cp.base.g.map(|x| x.truncate(f.order())).scale_by(f);
    let back = transport(&fwd, &gbar, &cp.base.j, &f.recip()?)?;
    out.push(Check { id: "conf.round-trip", value: back.values().sub(&base.gamma.values()), vector_valued: true });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::jet::JetSpace;

    #[test]
    fn transport_laws_hold() {
        let nested = rescale(&catalog::quadratic_conformal(2), catalog::default_factor(8));
        let pushed = rescale(&catalog::pushforward_model(2, 3), catalog::quadratic_factor(8));
        for m in [catalog::default_conformal(2), catalog::quadratic_conformal(2), nested, pushed] {
            let space = JetSpace::new(8, 2).unwrap();
            let p = [0.2, -0.3, 0.1, 0.45, -0.2, 0.0, 0.33, -0.1];
            let cp = conformal_point(&m, &space, &p, 2).unwrap().unwrap();
            for c in transport_checks(&cp).unwrap() {
                assert!(c.value.max_abs() < 1e-13, "{}: {:e}", c.id, c.value.max_abs());
            }
        }
    }

    #[test]
    fn non_conformal_is_none() {
        let space = JetSpace::new(8, 2).unwrap();
        assert!(conformal_point(&catalog::flat_model(2), &space, &[0.0; 8], 2).unwrap().is_none());
    }
}
