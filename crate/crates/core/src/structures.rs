//! Almost paraquaternionic Hermitian structures on a polynomial chart.

use std::sync::Arc;

use crate::algebra::{lift, CYCLIC, EPS};
use crate::error::{Error, Result};
use crate::jet::{JetSpace, Scalar};
use crate::linalg::invert_jet;
use crate::poly::{PolyField, PolyMatrix};
use crate::tensor::{JetTensor, Real, Tensor};

/// Constant flat data `(g₀, [J₁, J₂, J₃])` on `R^{4n}` in block order `(e, J₃e, J₁e, J₂e)`.
pub fn flat_data(n: usize) -> (Real, [Real; 3]) {
    let d = 4 * n;
    let mut js = [Real::zeros(d, 2), Real::zeros(d, 2), Real::zeros(d, 2)];
    // (source block, target block, sign) for each J
    let maps: [[(usize, usize, f64); 4]; 3] = [
        [(0, 2, 1.0), (1, 3, 1.0), (2, 0, 1.0), (3, 1, 1.0)],
        [(0, 3, 1.0), (1, 2, -1.0), (2, 1, -1.0), (3, 0, 1.0)],
        [(0, 1, 1.0), (1, 0, -1.0), (2, 3, -1.0), (3, 2, 1.0)],
    ];
    for i in 0..n {
        for (a, map) in maps.iter().enumerate() {
            for &(src, dst, s) in map {
                js[a].set(&[dst * n + i, src * n + i], s);
            }
        }
    }
    let g = Tensor::from_fn(d, 2, |ix| if ix[0] != ix[1] { 0.0 } else if ix[0] < 2 * n { 1.0 } else { -1.0 });
    (g, js)
}

/// How the structure is generated from polynomial data.
#[derive(Clone, Debug)]
pub enum Model {
    /// Constant flat structure.
    Flat,
    /// `J = E J₀ E⁻¹`, `g = E^{-T} g₀ E⁻¹` for a polynomial matrix `E`.
    FrameDeformed { e: PolyMatrix },
    /// Pullback of the flat structure by a polynomial map `φ`.
    Pushforward { phi: Vec<PolyField> },
    /// `f · g` over a base structure, same `J`.
    Conformal { base: Box<ParaHermitianStructure>, f: PolyField },
}

#[derive(Clone, Debug)]
pub struct ParaHermitianStructure {
    pub n: usize,
    pub model: Model,
}

/// Jets of `g`, `g⁻¹` and `J_α` at a point.
#[derive(Clone, Debug)]
pub struct StructureJets {
    pub n: usize,
    pub space: Arc<JetSpace>,
    pub point: Vec<f64>,
    pub g: JetTensor,
    pub ginv: JetTensor,
    pub j: [JetTensor; 3],
}

impl StructureJets {
    pub fn dim(&self) -> usize {
        4 * self.n
    }

    pub fn g_val(&self) -> Real {
        self.g.values()
    }

    pub fn ginv_val(&self) -> Real {
        self.ginv.values()
    }

    pub fn j_val(&self) -> [Real; 3] {
        [self.j[0].values(), self.j[1].values(), self.j[2].values()]
    }

    /// First derivatives `dJ[k][j][a] = ∂_a J^k_j`.
    pub fn dj_val(&self) -> Result<[Real; 3]> {
        Ok([self.j[0].partial()?.values(), self.j[1].partial()?.values(), self.j[2].partial()?.values()])
    }
}

impl ParaHermitianStructure {
    pub fn flat(n: usize) -> Self {
        ParaHermitianStructure { n, model: Model::Flat }
    }

    pub fn dim(&self) -> usize {
        4 * self.n
    }

    /// Conformal factor at `p` multiplied over all nested conformal layers.
    pub fn factor_at(&self, p: &[f64]) -> f64 {
        match &self.model {
            Model::Conformal { base, f } => f.eval(p) * base.factor_at(p),
            _ => 1.0,
        }
    }

    pub fn is_conformal(&self) -> bool {
        matches!(self.model, Model::Conformal { .. })
    }

    /// Jets of the structure tensors at `p`.
    pub fn jets(&self, space: &Arc<JetSpace>, p: &[f64], order: usize) -> Result<StructureJets> {
        let d = self.dim();
        if p.len() != d || space.dim() != d {
            return Err(Error::Shape(format!("point of length {} for a {d}-dimensional chart", p.len())));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::Shape("non-finite point coordinate".into()));
        }
        let (g0, j0) = flat_data(self.n);
        let (g, ginv, j) = match &self.model {
            Model::Flat => {
                let g = lift(&g0, space, order);
                let js = j0.clone().map(|m| lift(&m, space, order));
                (g.clone(), g, js)
            }
            Model::FrameDeformed { e } => {
                let ej = e.eval_jet(space, p, order)?;
                let einv = invert_jet(&ej)?;
                let g0j = lift(&g0, space, order);
                let js = j0.clone().map(|m| ej.matmul(&lift(&m, space, order)).matmul(&einv));
                let g = einv.transpose().matmul(&g0j).matmul(&einv);
                let ginv = ej.matmul(&g0j).matmul(&ej.transpose());
                (g, ginv, js)
            }
            Model::Pushforward { phi } => {
                if phi.len() != d {
                    return Err(Error::Shape(format!("{} map components for dimension {d}", phi.len())));
                }
                let dphi = PolyMatrix::from_fn(d, |a, i| phi[a].derivative(i)).eval_jet(space, p, order)?;
                let inv = invert_jet(&dphi)?;
                let g0j = lift(&g0, space, order);
                let js = j0.clone().map(|m| inv.matmul(&lift(&m, space, order)).matmul(&dphi));
                let g = dphi.transpose().matmul(&g0j).matmul(&dphi);
                let ginv = inv.matmul(&g0j).matmul(&inv.transpose());
                (g, ginv, js)
            }
            Model::Conformal { base, f } => {
                let b = base.jets(space, p, order)?;
                let fj = f.eval_jet(space, p, order)?;
                if fj.value() <= 0.0 {
                    return Err(Error::NonPositiveFactor(fj.value()));
                }
                let r = fj.recip()?;
                (b.g.scale_by(&fj), b.ginv.scale_by(&r), b.j)
            }
        };
        Ok(StructureJets { n: self.n, space: space.clone(), point: p.to_vec(), g, ginv, j })
    }
}

/// `F_α = g(·, J_α·)`.
pub fn kahler_forms<S: Scalar>(g: &Tensor<S>, j: &[Tensor<S>; 3]) -> [Tensor<S>; 3] {
    [g.matmul(&j[0]), g.matmul(&j[1]), g.matmul(&j[2])]
}

/// Residuals of the paraquaternionic identities and of metric compatibility.
pub fn verify_algebra(g: &Real, j: &[Real; 3]) -> Vec<(&'static str, f64)> {
    let d = g.dim();
    let id = Real::identity(d);
    let mut sq = 0.0f64;
    let mut anti = 0.0f64;
    let mut prod = 0.0f64;
    let mut compat = 0.0f64;
    for (a, b, c) in CYCLIC {
        sq = sq.max(j[a].matmul(&j[a]).max_abs_diff(&id.scale(EPS[a])));
        anti = anti.max(j[a].matmul(&j[b]).add(&j[b].matmul(&j[a])).max_abs());
        prod = prod.max(j[a].matmul(&j[b]).add(&j[c].scale(EPS[c])).max_abs());
        let gjj = j[a].transpose().matmul(g).matmul(&j[a]);
        compat = compat.max(gjj.add(&g.scale(EPS[a])).max_abs());
    }
    let sym = g.max_abs_diff(&g.transpose());
    vec![
        ("alg.square", sq),
        ("alg.anticommute", anti),
        ("alg.product", prod),
        ("alg.compat", compat),
        ("alg.metric-symmetric", sym),
    ]
}

/// `[A e_i, B e_j]^k` for endomorphism fields with derivatives `dA[k][j][a] = ∂_a A^k_j`.
pub fn lie_bracket(a: &Real, da: &Real, b: &Real, db: &Real) -> Real {
    let d = a.dim();
    Tensor::from_fn(d, 3, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        let mut s = 0.0;
        for m in 0..d {
            s += db.at3(k, j, m) * a.at2(m, i) - da.at3(k, i, m) * b.at2(m, j);
        }
        s
    })
}

/// Endomorphism `A` applied to the output of a vector-valued 2-form.
pub fn app(a: &Real, v: &Real) -> Real {
    v.apply_out(2, a)
}

/// `V(PX, QY)` for a vector-valued 2-form.
pub fn ev(v: &Real, p: Option<&Real>, q: Option<&Real>) -> Real {
    crate::algebra::ev2(v, p, q)
}

/// Nijenhuis bracket `[[A,B]]` on coordinate fields.
pub fn nijenhuis_bracket(a: &Real, da: &Real, b: &Real, db: &Real) -> Real {
    let d = a.dim();
    let id = Real::identity(d);
    let z = Real::zeros(d, 3);
    let mut out = lie_bracket(a, da, b, db);
    out = out.sub(&app(a, &lie_bracket(b, db, &id, &z)));
    out = out.sub(&app(b, &lie_bracket(&id, &z, a, da)));
    out = out.add(&lie_bracket(b, db, a, da));
    out = out.sub(&app(b, &lie_bracket(a, da, &id, &z)));
    out.sub(&app(a, &lie_bracket(&id, &z, b, db)))
}

/// Nijenhuis tensor `N(X,Y) = [JX,JY] + ε[X,Y] − J[JX,Y] − J[X,JY]` on coordinate fields.
pub fn nijenhuis(j: &Real, dj: &Real) -> Real {
    let d = j.dim();
    let id = Real::identity(d);
    let z = Real::zeros(d, 3);
    let mut out = lie_bracket(j, dj, j, dj);
    out = out.sub(&app(j, &lie_bracket(j, dj, &id, &z)));
    out.sub(&app(j, &lie_bracket(&id, &z, j, dj)))
}

/// All nine brackets `[[J_α, J_β]]`.
pub fn all_brackets(j: &[Real; 3], dj: &[Real; 3]) -> [[Real; 3]; 3] {
    std::array::from_fn(|a| std::array::from_fn(|b| nijenhuis_bracket(&j[a], &dj[a], &j[b], &dj[b])))
}

fn mixed_op(v: &Real, ja: &Real, jb: &Real) -> Real {
    app(ja, &ev(v, None, Some(jb)))
        .add(&app(ja, &ev(v, Some(jb), None)))
        .add(&app(jb, &ev(v, None, Some(ja))))
        .add(&app(jb, &ev(v, Some(ja), None)))
        .sub(&ev(v, Some(ja), Some(jb)))
        .sub(&ev(v, Some(jb), Some(ja)))
}

/// Residual tensors of the bracket lemma (keys `eq.l0.2` … `eq.l0.5`), maximised over the three cyclic triples.
pub fn bracket_lemma(j: &[Real; 3], brackets: &[[Real; 3]; 3], th: &Real) -> Vec<(&'static str, Vec<Real>)> {
    let mut l2 = Vec::new();
    let mut l3 = Vec::new();
    let mut l4 = Vec::new();
    let mut l5 = Vec::new();
    for (a, b, c) in CYCLIC {
        let (ja, jb, jc) = (&j[a], &j[b], &j[c]);
        l2.push(brackets[a][b].sub(&mixed_op(th, ja, jb)));
        l3.push(th.scale(-12.0 * EPS[c]).sub(&mixed_op(&brackets[a][b], ja, jb)));
        let r4 = th
            .scale(-EPS[a])
            .add(&app(ja, &ev(th, None, Some(ja))))
            .add(&app(ja, &ev(th, Some(ja), None)))
            .sub(&ev(th, Some(ja), Some(ja)));
        l4.push(brackets[a][a].scale(0.5).sub(&r4));
        let part = |v: &Real, k: &Real, e: f64| {
            ev(v, Some(k), Some(k)).sub(&app(k, &ev(v, Some(k), None))).sub(&app(k, &ev(v, None, Some(k)))).sub(&v.scale(e))
        };
        let r5 = part(&brackets[b][b], jc, EPS[c]).add(&part(&brackets[c][c], jb, EPS[b]));
        l5.push(brackets[a][a].scale(2.0).sub(&r5));
    }
    vec![("eq.l0.2", l2), ("eq.l0.3", l3), ("eq.l0.4", l4), ("eq.l0.5", l5)]
}
