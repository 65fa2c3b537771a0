//! Lee forms, `θ_{α,β}`, the `dF` splitting and classification predicates.

use crate::algebra::{cov_deriv, d1, d2, jform, plus_part, wedge12, CYCLIC, EPS};
use crate::connections::{levi_civita, PqktData};
use crate::error::Result;
use crate::frame::FrameData;
use crate::structures::{kahler_forms, StructureJets};
use crate::tensor::{JetTensor, Real};

/// Lee data as jets one order below the metric jets.
#[derive(Clone, Debug)]
pub struct LeeData {
    pub gamma_g: JetTensor,
    pub kahler: [JetTensor; 3],
    pub df: [JetTensor; 3],
    pub df_plus: [JetTensor; 3],
    pub df_minus: [JetTensor; 3],
    pub theta: [JetTensor; 3],
    /// `theta_cross[α][β] = θ_{α,β}`.
    pub theta_cross: [[JetTensor; 3]; 3],
}

/// `θ_α = −ε_α δF_α ∘ J_α` and `θ_{α,β}(X) = ε_α ½ Σ_i ε_i dF⁺_α(X, e_i, J_β e_i)`.
pub fn lee_data(s: &StructureJets) -> Result<LeeData> {
    let gamma_g = levi_civita(&s.g, &s.ginv)?;
    let kahler = kahler_forms(&s.g, &s.j);
    let mut df = Vec::with_capacity(3);
    let mut df_plus = Vec::with_capacity(3);
    let mut df_minus = Vec::with_capacity(3);
    let mut theta = Vec::with_capacity(3);
    for a in 0..3 {
        let dfa = d2(&kahler[a])?;
        let plus = plus_part(&dfa, &s.j[a], EPS[a]);
        df_minus.push(dfa.sub(&plus));
        df_plus.push(plus);
        df.push(dfa);
        let nabla_f = cov_deriv(&kahler[a], &gamma_g)?;
        let delta = nabla_f.trace(0, 1, &s.ginv).scale(-1.0);
        theta.push(delta.apply_slot(0, &s.j[a]).scale(-EPS[a]));
    }
    let theta_cross = std::array::from_fn(|a| {
        std::array::from_fn(|b| df_plus[a].apply_slot(2, &s.j[b]).trace(1, 2, &s.ginv).scale(0.5 * EPS[a]))
    });
    Ok(LeeData {
        gamma_g,
        kahler,
        df: to3(df),
        df_plus: to3(df_plus),
        df_minus: to3(df_minus),
        theta: to3(theta),
        theta_cross,
    })
}

pub(crate) fn to3<T>(v: Vec<T>) -> [T; 3] {
    v.try_into().unwrap_or_else(|_| panic!("expected three entries"))
}

/// `u_α = θ_α + ε_α J_β θ_{α,γ}`, which vanishes exactly for HPKT structures.
pub fn hpkt_forms(lee: &LeeData, j: &[JetTensor; 3]) -> [JetTensor; 3] {
    let mut out = Vec::with_capacity(3);
    for (a, b, c) in CYCLIC {
        out.push(lee.theta[a].add(&jform(&lee.theta_cross[a][c], &j[b]).scale(EPS[a])));
    }
    to3(out)
}

/// Tiered outcome of a classification predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flag {
    True,
    False,
    Indeterminate,
}

/// Predicates below this residual are true.
pub const FLAG_PASS: f64 = 1e-8;
/// Predicates above this residual are false.
pub const FLAG_FAIL: f64 = 1e-5;

impl Flag {
    pub fn from_residual(r: f64) -> Flag {
        if r < FLAG_PASS {
            Flag::True
        } else if r > FLAG_FAIL {
            Flag::False
        } else {
            Flag::Indeterminate
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Flag::True => "true",
            Flag::False => "false",
            Flag::Indeterminate => "indeterminate",
        }
    }
}

/// Classification residuals at one point, keyed by predicate name.
pub fn classify(s: &StructureJets, pq: &PqktData, frame: &FrameData) -> Result<Vec<(&'static str, f64)>> {
    let n = s.n as f64;
    let g = s.g_val();
    let j = s.j_val();
    let lee = &pq.lee;
    let u = hpkt_forms(lee, &s.j);
    let hpkt = u.iter().map(|x| frame.covariant(&x.values()).max_abs()).fold(0.0, f64::max);
    let f = kahler_forms(&g, &j);
    let mut w = pq.torsion.values();
    for a in 0..3 {
        w.axpy(-1.0 / (2.0 * n + 1.0), &wedge12(&pq.t_alpha[a].values(), &f[a]));
    }
    let dt = d1(&pq.t)?.values();
    let u3 = frame.covariant(&w).max_abs();
    let lcpqk = u3.max(frame.covariant(&dt).max_abs());
    let mut lchpkt = 0.0f64;
    for x in &u {
        lchpkt = lchpkt.max(frame.covariant(&d1(x)?.values()).max_abs());
    }
    let k = 2.0 * (1.0 - n) / (2.0 * n + 1.0);
    let tv = pq.t.values();
    let mut cor = 0.0f64;
    for x in &u {
        cor = cor.max(frame.covariant(&x.values().sub(&tv.scale(k))).max_abs());
    }
    let lchpk = u3.max(cor);
    let th: Vec<Real> = lee.theta.iter().map(|x| x.values()).collect();
    let integrable = frame.covariant(&th[0].sub(&th[1])).max_abs().max(frame.covariant(&th[1].sub(&th[2])).max_abs());
    Ok(vec![
        ("hpkt", hpkt),
        ("integrable", integrable),
        ("lc-hpk", lchpk),
        ("lc-hpkt", lchpkt),
        ("lc-pqk", lcpqk),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_tiers() {
        assert_eq!(Flag::from_residual(1e-9), Flag::True);
        assert_eq!(Flag::from_residual(1e-3), Flag::False);
        assert_eq!(Flag::from_residual(1e-6), Flag::Indeterminate);
    }
}
