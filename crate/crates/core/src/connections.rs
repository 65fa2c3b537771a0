//! Levi-Civita, complex-product, canonical and PQKT connections, and their
//! structure 1-forms.
//!
//! Coefficients are stored as `Γ[i][j][k] = (∇_{e_i} e_j)^k`.

use crate::algebra::{
    cov_deriv_endo, jform, raise_last, torsion_of, wedge12, CYCLIC, EPS,
};
use crate::error::{Error, Result};
use crate::forms::{lee_data, to3, LeeData};
use crate::linalg::least_squares;
use crate::structures::{all_brackets, app, ev, StructureJets};
use crate::tensor::{JetTensor, Real, Tensor};

/// Max residual of the `∇J_α` decomposition accepted as "preserves ℙ".
pub const PRESERVE_TOL: f64 = 1e-8;
/// Largest existence residual accepted before building the PQKT connection.
pub const EXISTENCE_TOL: f64 = 1e-7;

/// Christoffel jets of the Levi-Civita connection, one order below `g`.
pub fn levi_civita(g: &JetTensor, ginv: &JetTensor) -> Result<JetTensor> {
    let dg = g.partial()?;
    let mut low = dg.permute(&[1, 2, 0]);
    low = low.add(&dg.permute(&[0, 2, 1]));
    low = low.sub(&dg);
    Ok(raise_last(&low.scale(0.5), ginv))
}

/// `(∇_x J_α)^k_j` for each α, stored `[x][k][j]`.
pub fn nabla_j(gamma: &Real, j: &[Real; 3], dj: &[Real; 3]) -> [Real; 3] {
    std::array::from_fn(|a| cov_deriv_endo(&j[a], &dj[a], gamma))
}

/// Least-squares fit `∇J_α = ω_β ⊗ J_γ + ε_γ ω_γ ⊗ J_β`; returns `(ω, max residual)`.
pub fn omega_extraction(gamma: &Real, j: &[Real; 3], dj: &[Real; 3]) -> Result<([Real; 3], f64)> {
    let d = gamma.dim();
    let nj = nabla_j(gamma, j, dj);
    let block = d * d * d;
    let rows = 3 * block;
    let cols = 3 * d;
    let mut a = vec![0.0; rows * cols];
    let mut b = vec![0.0; rows];
    for (blk, &(al, be, ga)) in CYCLIC.iter().enumerate() {
        for x in 0..d {
            for k in 0..d {
                for jj in 0..d {
                    let r = blk * block + (x * d + k) * d + jj;
                    b[r] = *nj[al].at3(x, k, jj);
                    a[r * cols + be * d + x] += j[ga].at2(k, jj);
                    a[r * cols + ga * d + x] += EPS[ga] * j[be].at2(k, jj);
                }
            }
        }
    }
    let (sol, res) = least_squares(rows, cols, &a, &b)?;
    let omega = std::array::from_fn(|w| Tensor::from_vec(d, 1, sol[w * d..(w + 1) * d].to_vec()));
    Ok((omega, res))
}

/// `∇^CP`, `∇⁰` and `T^H` of an almost hyper-paracomplex structure.
#[derive(Clone, Debug)]
pub struct ComplexProduct {
    pub gamma_cp: Real,
    pub gamma0: Real,
    pub th: Real,
    pub brackets: [[Real; 3]; 3],
}

pub fn complex_product_connection(j: &[Real; 3], dj: &[Real; 3]) -> ComplexProduct {
    use crate::structures::lie_bracket as brk;
    let d = j[0].dim();
    let id = Real::identity(d);
    let z = Real::zeros(d, 3);
    let mut s1 = Real::zeros(d, 3);
    for (a, b, c) in CYCLIC {
        s1 = s1.add(&app(&j[a], &brk(&j[b], &dj[b], &j[c], &dj[c])));
        s1 = s1.sub(&app(&j[a], &brk(&j[c], &dj[c], &j[b], &dj[b])));
    }
    let mut s2 = Real::zeros(d, 3);
    let mut s3 = Real::zeros(d, 3);
    for a in 0..3 {
        let ji = app(&j[a], &brk(&j[a], &dj[a], &id, &z));
        let ij = app(&j[a], &brk(&id, &z, &j[a], &dj[a]));
        s2.axpy(EPS[a], &ji.sub(&ij));
        s3.axpy(EPS[a], &brk(&j[a], &dj[a], &j[a], &dj[a]).sub(&ji).sub(&ij));
    }
    let gamma0 = s1.sub(&s2.scale(2.0)).scale(1.0 / 12.0);
    let gamma_cp = gamma0.sub(&s3.scale(1.0 / 12.0));
    let brackets = all_brackets(j, dj);
    let mut th = Real::zeros(d, 3);
    for a in 0..3 {
        th.axpy(-EPS[a] / 12.0, &brackets[a][a]);
    }
    ComplexProduct { gamma_cp, gamma0, th, brackets }
}

/// `[T, J]_X = T_X J − J T_X` with `T_X Y = T(X, Y)`, stored `[x][k][j]`.
pub fn torsion_commutator(t: &Real, j: &Real) -> Real {
    let tx = t.permute(&[0, 2, 1]);
    let d = t.dim();
    Tensor::from_fn(d, 3, |ix| {
        let (x, k, jj) = (ix[0], ix[1], ix[2]);
        let mut s = 0.0;
        for m in 0..d {
            s += tx.at3(x, k, m) * j.at2(m, jj) - j.at2(k, m) * tx.at3(x, m, jj);
        }
        s
    })
}

/// `a_α(X) = (1/(2n−1)) Σ_k T(X, e_k)` traced against `J_α`.
pub fn structure_one_forms(t: &Real, j: &[Real; 3], n: usize) -> [Real; 3] {
    let d = t.dim();
    std::array::from_fn(|a| {
        Tensor::from_fn(d, 1, |ix| {
            let mut s = 0.0;
            for k in 0..d {
                for m in 0..d {
                    s += j[a].at2(k, m) * t.at3(ix[0], k, m);
                }
            }
            s / (2 * n - 1) as f64
        })
    })
}

/// `Σ_α ε_α ∂(a_α ⊗ J_α)` with `∂(a⊗J)(X,Y) = a(X)JY − a(Y)JX`.
pub fn boundary_term(a: &[Real; 3], j: &[Real; 3]) -> Real {
    let d = j[0].dim();
    Tensor::from_fn(d, 3, |ix| {
        let (x, y, k) = (ix[0], ix[1], ix[2]);
        (0..3).map(|z| EPS[z] * (a[z].at(x) * j[z].at2(k, y) - a[z].at(y) * j[z].at2(k, x))).sum()
    })
}

/// The canonical connection `∇^ℙ` built from a ℙ-preserving connection.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub gamma: Real,
    pub torsion: Real,
    /// `b_α` computed from the input torsion.
    pub b: [Real; 3],
}

pub fn canonical_p_connection(gamma: &Real, j: &[Real; 3], dj: &[Real; 3], n: usize) -> Result<Canonical> {
    let (_, res) = omega_extraction(gamma, j, dj)?;
    if res > PRESERVE_TOL {
        return Err(Error::NotParaquaternionic(res));
    }
    let d = gamma.dim();
    let t = torsion_of(gamma);
    let b = structure_one_forms(&t, j, n);
    let mut bsum = Real::zeros(d, 1);
    for z in 0..3 {
        bsum.axpy(EPS[z], &b[z].apply_slot(0, &j[z]));
    }
    let mut add = Real::zeros(d, 3);
    for z in 0..3 {
        let mut coef = b[z].scale(EPS[z]);
        coef.axpy(-EPS[z] / 3.0, &bsum.apply_slot(0, &j[z]));
        add = add.add(&Tensor::from_fn(d, 3, |ix| coef.at(ix[0]) * j[z].at2(ix[2], ix[1])));
    }
    let mut s = Real::zeros(d, 3);
    for z in 0..3 {
        s = s.add(&t);
        s.axpy(-EPS[z], &ev(&t, Some(&j[z]), Some(&j[z])));
        s.axpy(EPS[z], &app(&j[z], &ev(&t, None, Some(&j[z]))));
        s.axpy(EPS[z], &app(&j[z], &ev(&t, Some(&j[z]), None)));
    }
    let gp = gamma.add(&add).sub(&s.scale(1.0 / 12.0));
    let tp = torsion_of(&gp);
    Ok(Canonical { gamma: gp, torsion: tp, b })
}

/// `T^ℙ` of the canonical connection built from `∇^CP`.
pub fn integrability_torsion(j: &[Real; 3], dj: &[Real; 3], n: usize) -> Result<Real> {
    let cp = complex_product_connection(j, dj);
    Ok(canonical_p_connection(&cp.gamma_cp, j, dj, n)?.torsion)
}

/// PQKT connection and everything derived on the way, as jets.
#[derive(Clone, Debug)]
pub struct PqktData {
    pub lee: LeeData,
    /// `K_α` of the existence theorem.
    pub k: [JetTensor; 3],
    /// Existence residual tensors, one per cyclic triple.
    pub existence: [Real; 3],
    /// Torsion 3-form `T(X,Y,Z) = g(T(X,Y),Z)`.
    pub torsion: JetTensor,
    /// Torsion evaluated from each `α` (they agree on PQKT structures).
    pub torsion_by_alpha: [Real; 3],
    pub gamma: JetTensor,
    pub t_alpha: [JetTensor; 3],
    pub t: JetTensor,
    /// `ω_α` from the closed form.
    pub omega: [JetTensor; 3],
}

/// `K_α = (ε_α J_β θ_α + ε_β θ_{α,γ}) / (1 − n)`.
pub fn k_forms(lee: &LeeData, j: &[JetTensor; 3], n: usize) -> [JetTensor; 3] {
    let m = 1.0 / (1.0 - n as f64);
    to3(CYCLIC
        .iter()
        .map(|&(a, b, c)| jform(&lee.theta[a], &j[b]).scale(EPS[a]).add(&lee.theta_cross[a][c].scale(EPS[b])).scale(m))
        .collect())
}

/// Closed-form `ω_β = ½ε_α J_β(θ_γ − θ_β + θ_α/(1−n)) + ε_β θ_{α,γ}/(2(1−n))`.
pub fn omega_closed_form(lee: &LeeData, j: &[JetTensor; 3], n: usize) -> [JetTensor; 3] {
    let m = 1.0 / (1.0 - n as f64);
    let mut out: Vec<Option<JetTensor>> = vec![None, None, None];
    for (a, b, c) in CYCLIC {
        let inner = lee.theta[c].sub(&lee.theta[b]).add(&lee.theta[a].scale(m));
        let w = jform(&inner, &j[b]).scale(0.5 * EPS[a]).add(&lee.theta_cross[a][c].scale(0.5 * EPS[b] * m));
        out[b] = Some(w);
    }
    to3(out.into_iter().map(|x| x.expect("every index is covered")).collect())
}

fn torsion_from_alpha(lee: &LeeData, k: &[JetTensor; 3], j: &[JetTensor; 3], alpha: usize) -> JetTensor {
    let (a, b, c) = CYCLIC[alpha];
    let f = &lee.kahler;
    let w1 = wedge12(&jform(&k[a], &j[a]), &f[c]).scale(EPS[a]);
    let w2 = wedge12(&k[a], &f[b]).scale(EPS[c]);
    jform(&lee.df_plus[a], &j[a]).sub(&w1.add(&w2).scale(0.5))
}

/// `t_α(X) = ε_α ½ Σ_i ε_i T(X, e_i, J_α e_i)`.
pub fn torsion_forms<S: crate::jet::Scalar>(t3: &Tensor<S>, ginv: &Tensor<S>, j: &[Tensor<S>; 3]) -> ([Tensor<S>; 3], Tensor<S>) {
    let ta: [Tensor<S>; 3] = std::array::from_fn(|a| t3.apply_slot(2, &j[a]).trace(1, 2, ginv).scale(0.5 * EPS[a]));
    let t = jform(&ta[0], &j[0]);
    (ta, t)
}

/// Existence residuals: `d_αF⁺_α − d_βF⁺_β − ½(ε_γ K_α∧F_β − ε_β J_βK_β∧F_α − ε_α (K_β − J_αK_α)∧F_γ)`.
pub fn existence_residuals(lee: &LeeData, k: &[JetTensor; 3], j: &[JetTensor; 3]) -> [Real; 3] {
    let f: Vec<Real> = lee.kahler.iter().map(|x| x.values()).collect();
    let jv: Vec<Real> = j.iter().map(|x| x.values()).collect();
    let kv: Vec<Real> = k.iter().map(|x| x.values()).collect();
    let dp: Vec<Real> = lee.df_plus.iter().map(|x| x.values()).collect();
    to3(CYCLIC
        .iter()
        .map(|&(a, b, c)| {
            let lhs = jform(&dp[a], &jv[a]).sub(&jform(&dp[b], &jv[b]));
            let mut rhs = wedge12(&kv[a], &f[b]).scale(EPS[c]);
            rhs.axpy(-EPS[b], &wedge12(&jform(&kv[b], &jv[b]), &f[a]));
            rhs.axpy(-EPS[a], &wedge12(&kv[b].sub(&jform(&kv[a], &jv[a])), &f[c]));
            lhs.sub(&rhs.scale(0.5))
        })
        .collect())
}

/// Build the PQKT connection of a structure. Requires `n ≥ 2` and the existence condition.
pub fn pqkt_connection(s: &StructureJets) -> Result<PqktData> {
    if s.n < 2 {
        return Err(Error::Unsupported("the PQKT connection formula needs n >= 2".into()));
    }
    let lee = lee_data(s)?;
    let k = k_forms(&lee, &s.j, s.n);
    let existence = existence_residuals(&lee, &k, &s.j);
    let worst = existence.iter().map(|r| r.max_abs()).fold(0.0, f64::max);
    if !(worst <= EXISTENCE_TOL) {
        return Err(Error::NoPqkt(worst));
    }
    let torsion = torsion_from_alpha(&lee, &k, &s.j, 0);
    let torsion_by_alpha = std::array::from_fn(|a| torsion_from_alpha(&lee, &k, &s.j, a).values());
    let tvec = raise_last(&torsion, &s.ginv);
    let gamma = lee.gamma_g.add(&tvec.scale(0.5));
    let (t_alpha, t) = torsion_forms(&torsion, &s.ginv, &s.j);
    let omega = omega_closed_form(&lee, &s.j, s.n);
    Ok(PqktData { lee, k, existence, torsion, torsion_by_alpha, gamma, t_alpha, t, omega })
}

impl PqktData {
    /// `A_α = ω_β − ε_α J_α ω_γ`.
    pub fn a_forms(&self, j: &[Real; 3]) -> [Real; 3] {
        let w: Vec<Real> = self.omega.iter().map(|x| x.values()).collect();
        to3(CYCLIC.iter().map(|&(a, b, c)| w[b].sub(&jform(&w[c], &j[a]).scale(EPS[a]))).collect())
    }

    /// `C_α = ω_β + ε_α J_α ω_γ`.
    pub fn c_forms(&self, j: &[Real; 3]) -> [Real; 3] {
        let w: Vec<Real> = self.omega.iter().map(|x| x.values()).collect();
        to3(CYCLIC.iter().map(|&(a, b, c)| w[b].add(&jform(&w[c], &j[a]).scale(EPS[a]))).collect())
    }
}

/// Nijenhuis tensors predicted from `A_α`:
/// `N_α(X,Y) = −A(Y)J_βX + A(X)J_βY − (J_αA)(Y)J_γX + (J_αA)(X)J_γY`.
pub fn nijenhuis_from_a(a_forms: &[Real; 3], j: &[Real; 3]) -> [Real; 3] {
    let d = j[0].dim();
    to3(CYCLIC
        .iter()
        .map(|&(a, b, c)| {
            let aa = &a_forms[a];
            let ja = jform(aa, &j[a]);
            Tensor::from_fn(d, 3, |ix| {
                let (x, y, k) = (ix[0], ix[1], ix[2]);
                -aa.at(y) * j[b].at2(k, x) + aa.at(x) * j[b].at2(k, y) - ja.at(y) * j[c].at2(k, x)
                    + ja.at(x) * j[c].at2(k, y)
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetSpace;
    use crate::structures::{flat_data, ParaHermitianStructure};

    #[test]
    fn flat_levi_civita_vanishes() {
        let s = ParaHermitianStructure::flat(1);
        let space = JetSpace::new(4, 2).unwrap();
        let sj = s.jets(&space, &[0.1, 0.0, -0.2, 0.3], 2).unwrap();
        let gm = levi_civita(&sj.g, &sj.ginv).unwrap();
        assert_eq!(gm.values().max_abs(), 0.0);
    }

    #[test]
    fn flat_complex_product_is_trivial() {
        let (_, j) = flat_data(2);
        let z = [Real::zeros(8, 3), Real::zeros(8, 3), Real::zeros(8, 3)];
        let cp = complex_product_connection(&j, &z);
        assert_eq!(cp.gamma_cp.max_abs(), 0.0);
        assert_eq!(cp.th.max_abs(), 0.0);
        let (w, r) = omega_extraction(&cp.gamma_cp, &j, &z).unwrap();
        assert!(r < 1e-15 && w.iter().all(|x| x.max_abs() < 1e-15));
    }

    #[test]
    fn n1_rejected() {
        let s = ParaHermitianStructure::flat(1);
        let space = JetSpace::new(4, 2).unwrap();
        let sj = s.jets(&space, &[0.0; 4], 2).unwrap();
        assert!(matches!(pqkt_connection(&sj), Err(Error::Unsupported(_))));
    }

    #[test]
    fn non_preserving_input_rejected() {
        let (_, j) = flat_data(1);
        let z = [Real::zeros(4, 3), Real::zeros(4, 3), Real::zeros(4, 3)];
        let gamma = Tensor::from_fn(4, 3, |ix| if ix == [0, 1, 2] { 1.0 } else { 0.0 });
        assert!(matches!(canonical_p_connection(&gamma, &j, &z, 1), Err(Error::NotParaquaternionic(_))));
    }
}
