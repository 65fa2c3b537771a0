//! Form algebra shared by all modules: J-twists, type operators, wedges,
//! exterior derivatives of jets and covariant derivatives.
//!
//! Conventions:
//!
//! * `(a∧F)(X,Y,Z) = a(X)F(Y,Z) + a(Y)F(Z,X) + a(Z)F(X,Y)`, `a∧b = a⊗b − b⊗a`;
//! * `d` is the unnormalised alternating sum of partial derivatives;
//! * `Jψ = (−1)^r ψ(J·,…,J·)` for an `r`-form `ψ`;
//! * connection coefficients are `Γ[i][j][k] = (∇_{e_i} e_j)^k`.

use std::sync::Arc;

use crate::error::Result;
use crate::jet::{Jet, JetSpace, Scalar};
use crate::tensor::{JetTensor, Real, Tensor};

/// Signs `ε_α` with `J_α² = ε_α Id`.
pub const EPS: [f64; 3] = [1.0, 1.0, -1.0];

/// Cyclic triples `(α, β, γ)`.
pub const CYCLIC: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

/// Constant jet tensor with the values of `t`.
pub fn lift(t: &Real, space: &Arc<JetSpace>, order: usize) -> JetTensor {
    t.map(|&v| Jet::constant(space, order, v))
}

/// `Jψ = (−1)^r ψ(J·,…,J·)`.
pub fn jform<S: Scalar>(psi: &Tensor<S>, j: &Tensor<S>) -> Tensor<S> {
    let mut out = psi.clone();
    for s in 0..psi.rank() {
        out = out.apply_slot(s, j);
    }
    if psi.rank() % 2 == 1 {
        out.scale(-1.0)
    } else {
        out
    }
}

/// `ψ(JX,JY,Z) + ψ(JX,Y,JZ) + ψ(X,JY,JZ)` for a 3-tensor.
pub fn type_l<S: Scalar>(psi: &Tensor<S>, j: &Tensor<S>) -> Tensor<S> {
    let a = psi.apply_slot(0, j);
    let mut out = a.apply_slot(1, j);
    out = out.add(&a.apply_slot(2, j));
    out.add(&psi.apply_slot(1, j).apply_slot(2, j))
}

/// The (1,2)+(2,1) part `(3ψ − ε Lψ)/4` of a 3-form.
pub fn plus_part<S: Scalar>(psi: &Tensor<S>, j: &Tensor<S>, eps: f64) -> Tensor<S> {
    let mut out = psi.scale(0.75);
    out.axpy(-0.25 * eps, &type_l(psi, j));
    out
}

/// Residual of the (1,2)+(2,1) condition `Lψ + εψ = 0`.
pub fn check_3form_type(psi: &Real, j: &Real, eps: f64) -> f64 {
    let mut r = type_l(psi, j);
    r.axpy(eps, psi);
    r.max_abs()
}

/// `B(PX, QY)` for a bilinear form `B`.
pub fn ev2<S: Scalar>(b: &Tensor<S>, p: Option<&Tensor<S>>, q: Option<&Tensor<S>>) -> Tensor<S> {
    let mut out = b.clone();
    if let Some(p) = p {
        out = out.apply_slot(0, p);
    }
    if let Some(q) = q {
        out = out.apply_slot(1, q);
    }
    out
}

pub fn wedge11<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>) -> Tensor<S> {
    a.outer(b).sub(&b.outer(a))
}

pub fn wedge12<S: Scalar>(a: &Tensor<S>, f: &Tensor<S>) -> Tensor<S> {
    let x = a.outer(f);
    x.add(&x.permute(&[1, 2, 0])).add(&x.permute(&[2, 0, 1]))
}

/// Totally skew part of a 3-tensor.
pub fn alt3<S: Scalar>(t: &Tensor<S>) -> Tensor<S> {
    let mut out = t.clone();
    out.axpy(-1.0, &t.permute(&[1, 0, 2]));
    out.axpy(-1.0, &t.permute(&[0, 2, 1]));
    out.axpy(-1.0, &t.permute(&[2, 1, 0]));
    out.axpy(1.0, &t.permute(&[1, 2, 0]));
    out.axpy(1.0, &t.permute(&[2, 0, 1]));
    out.scale(1.0 / 6.0)
}

/// Cyclic sum over the first three slots of a 4-tensor.
pub fn cyc3<S: Scalar>(t: &Tensor<S>) -> Tensor<S> {
    t.add(&t.permute(&[1, 2, 0, 3])).add(&t.permute(&[2, 0, 1, 3]))
}

/// Which type component of a vector-valued 2-form to extract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypePart {
    P11,
    P20,
    P02,
}

/// Type projection of a vector-valued 2-form `P[x][y][k]` with respect to `J`.
pub fn project_2form_type<S: Scalar>(p: &Tensor<S>, j: &Tensor<S>, eps: f64, part: TypePart) -> Tensor<S> {
    let pjj = p.apply_slot(0, j).apply_slot(1, j);
    let mut out = p.clone();
    match part {
        TypePart::P11 => {
            out.axpy(-eps, &pjj);
            out.scale(0.5)
        }
        TypePart::P20 | TypePart::P02 => {
            let s = if part == TypePart::P20 { eps } else { -eps };
            out.axpy(eps, &pjj);
            out.axpy(s, &p.apply_slot(0, j).apply_out(2, j));
            out.axpy(s, &p.apply_slot(1, j).apply_out(2, j));
            out.scale(0.25)
        }
    }
}

/// Largest antisymmetry defect `|P(X,Y) + P(Y,X)|` of a tensor in its first two slots.
pub fn skew_defect(p: &Real) -> f64 {
    p.add(&p.swap(0, 1)).max_abs()
}

/// `dt[x][y] = ∂_x t_y − ∂_y t_x`.
pub fn d1(t: &JetTensor) -> Result<JetTensor> {
    let p = t.partial()?;
    Ok(p.transpose().sub(&p))
}

/// Exterior derivative of a 2-form jet.
pub fn d2(f: &JetTensor) -> Result<JetTensor> {
    let a = f.partial()?.permute(&[1, 2, 0]);
    Ok(a.add(&a.permute(&[1, 2, 0])).add(&a.permute(&[2, 0, 1])))
}

/// Exterior derivative of a 3-form jet.
pub fn d3(t: &JetTensor) -> Result<JetTensor> {
    let a = t.partial()?.permute(&[1, 2, 3, 0]);
    let mut out = a.clone();
    out.axpy(-1.0, &a.permute(&[1, 0, 2, 3]));
    out.axpy(1.0, &a.permute(&[2, 0, 1, 3]));
    out.axpy(-1.0, &a.permute(&[3, 0, 1, 2]));
    Ok(out)
}

/// Covariant derivative of a covariant tensor jet, derivative slot first:
/// `out[x][y..] = ∂_x t[y..] − Σ_s Σ_m Γ[x][y_s][m] t[..m..]`.
pub fn cov_deriv(t: &JetTensor, gamma: &JetTensor) -> Result<JetTensor> {
    let r = t.rank();
    let d = t.dim();
    let mut perm: Vec<usize> = (1..=r).collect();
    perm.push(0);
    let dt = t.partial()?.permute(&perm);
    let mut out = dt;
    let mut idx = vec![0usize; r + 1];
    let mut sub = vec![0usize; r];
    let n = out.data().len();
    let mut data: Vec<Jet> = out.data().to_vec();
    for (o, acc) in data.iter_mut().enumerate().take(n) {
        let mut rem = o;
        for k in (0..=r).rev() {
            idx[k] = rem % d;
            rem /= d;
        }
        let x = idx[0];
        for s in 0..r {
            sub.copy_from_slice(&idx[1..]);
            for m in 0..d {
                let gm = gamma.at3(x, idx[1 + s], m);
                if gm.is_zero() {
                    continue;
                }
                sub[s] = m;
                acc.add_mul(&gm.scale(-1.0), t.get(&sub));
            }
        }
    }
    out = Tensor::from_vec(d, r + 1, data);
    Ok(out)
}

/// Covariant derivative of an endomorphism field: `(∇_x A)^k_j`, stored `[x][k][j]`.
pub fn cov_deriv_endo<S: Scalar>(a: &Tensor<S>, da: &Tensor<S>, gamma: &Tensor<S>) -> Tensor<S> {
    let d = a.dim();
    Tensor::from_fn(d, 3, |ix| {
        let (x, k, j) = (ix[0], ix[1], ix[2]);
        let mut acc = da.at3(k, j, x).clone();
        for m in 0..d {
            acc.add_mul(gamma.at3(x, m, k), a.at2(m, j));
            acc.add_mul(&gamma.at3(x, j, m).scale(-1.0), a.at2(k, m));
        }
        acc
    })
}

/// Torsion `T[i][j][k] = Γ[i][j][k] − Γ[j][i][k]` of coordinate coefficients.
pub fn torsion_of<S: Scalar>(gamma: &Tensor<S>) -> Tensor<S> {
    gamma.sub(&gamma.swap(0, 1))
}

/// Raise the last slot: `out[..k] = Σ_l t[..l] g^{lk}`.
pub fn raise_last<S: Scalar>(t: &Tensor<S>, ginv: &Tensor<S>) -> Tensor<S> {
    t.apply_out(t.rank() - 1, ginv)
}

/// Lower the last slot: `out[..l] = Σ_k t[..k] g_{kl}`.
pub fn lower_last<S: Scalar>(t: &Tensor<S>, g: &Tensor<S>) -> Tensor<S> {
    t.apply_out(t.rank() - 1, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::flat_data;
    use crate::poly::PolyField;

    fn rnd(d: usize, rank: usize, seed: u64) -> Real {
        let mut s = seed;
        Tensor::from_fn(d, rank, |_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
    }

    #[test]
    fn jform_sign_and_involution() {
        let (_, j) = flat_data(1);
        let a = rnd(4, 1, 1);
        let twice = jform(&jform(&a, &j[2]), &j[2]);
        assert!(twice.max_abs_diff(&a.scale(-1.0)) < 1e-15);
        let f = j[0].clone();
        assert!(jform(&jform(&f, &j[0]), &j[0]).max_abs_diff(&f) < 1e-15);
    }

    #[test]
    fn type_parts_partition_and_relations() {
        let (_, js) = flat_data(1);
        let p0 = rnd(4, 3, 7);
        let p = p0.sub(&p0.swap(0, 1));
        for (a, j) in js.iter().enumerate() {
            let e = EPS[a];
            let p11 = project_2form_type(&p, j, e, TypePart::P11);
            let p20 = project_2form_type(&p, j, e, TypePart::P20);
            let p02 = project_2form_type(&p, j, e, TypePart::P02);
            assert!(p11.add(&p20).add(&p02).max_abs_diff(&p) < 1e-14);
            for (q, part) in [(&p11, TypePart::P11), (&p20, TypePart::P20), (&p02, TypePart::P02)] {
                assert!(project_2form_type(q, j, e, part).max_abs_diff(q) < 1e-14);
            }
            assert!(project_2form_type(&p20, j, e, TypePart::P02).max_abs() < 1e-14);
            assert!(project_2form_type(&p11, j, e, TypePart::P20).max_abs() < 1e-14);
            let rel11 = p11.apply_slot(0, j).apply_slot(1, j).add(&p11.scale(e));
            assert!(rel11.max_abs() < 1e-14);
            assert!(p20.apply_slot(0, j).sub(&p20.apply_out(2, j)).max_abs() < 1e-14);
            assert!(p02.apply_slot(0, j).add(&p02.apply_out(2, j)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn exterior_derivative_squares_to_zero() {
        let d = 4;
        let space = JetSpace::new(d, 3).unwrap();
        let x = [0.1, -0.2, 0.3, 0.05];
        let mut p = PolyField::constant(d, 0.0);
        p.add_term(vec![2, 1, 0, 0], 1.0);
        p.add_term(vec![0, 1, 1, 1], -0.5);
        let t = Tensor::from_fn(d, 1, |i| {
            let mut q = p.clone();
            q.add_term(vec![0, 0, 0, 1 + i[0] as u32], 0.3);
            q.eval_jet(&space, &x, 3).unwrap()
        });
        let dd = d2(&d1(&t).unwrap()).unwrap();
        assert!(dd.values().max_abs() < 1e-14);
        let w = d2(&Tensor::from_fn(d, 2, |i| {
            let mut q = PolyField::zero(d);
            q.add_term(vec![i[0] as u32, i[1] as u32, 0, 1], 1.0);
            q.add_term(vec![i[1] as u32, i[0] as u32, 0, 1], -1.0);
            q.eval_jet(&space, &x, 3).unwrap()
        }))
        .unwrap();
        assert!(d3(&w).unwrap().values().max_abs() < 1e-13);
    }
}
