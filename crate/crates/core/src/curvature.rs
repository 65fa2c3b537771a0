//! Curvature of the PQKT and Levi-Civita connections, Ricci forms, scalar
//! curvatures and the curvature identity suite.
//!
//! `R[x][y][z][v] = g(R(e_x, e_y) e_z, e_v)`, `ρ_α(X,Y) = ½ Σ_i ε_i R(X,Y,e_i,J_α e_i)`.

use crate::algebra::{cov_deriv, cyc3, d1, d3, ev2, wedge11, CYCLIC, EPS};
use crate::connections::PqktData;
use crate::error::Result;
use crate::structures::StructureJets;
use crate::tensor::{JetTensor, Real, Tensor};

/// `∇T` below this bound counts as parallel torsion.
pub const PARALLEL_TOL: f64 = 1e-9;
/// `dT` type defect below this bound counts as type (2,2).
pub const TYPE22_TOL: f64 = 1e-9;

/// Ids produced by [`CurvatureData::identities`], in order.
pub const CURVATURE_IDS: [&str; 34] = [
    "eq.11", "eq.12", "eq.13", "eq.14", "eq.15", "eq.sof", "eq.tir1", "ric.antisym", "eq.r5", "eq.r5.scalar",
    "eq.tir2", "eq.tir4", "eq.20", "eq.ti20", "eq.ti22", "eq.21", "eq.nov2", "eq.21.2", "eq.e21.1", "eq.22.2",
    "eq.22.3", "eq.22.4.diag", "eq.22.4.offdiag", "eq.pq1", "eq.pq1.cross", "prop.4.10.a", "prop.4.10.b",
    "prop.4.10.c", "eq.rn2", "eq.l1.1", "eq.l1.2.diag", "eq.l1.2.mixed", "lemma.3.3.mixed",
    "lemma.3.3.square",
];

/// Curvature 4-tensor of a connection given by order-1 Christoffel jets.
pub fn curvature(gamma: &JetTensor, g: &Real) -> Result<Real> {
    let d = gamma.dim();
    let dg = gamma.partial()?.values();
    let gm = gamma.values();
    let r = Tensor::from_fn(d, 4, |ix| {
        let (x, y, z, k) = (ix[0], ix[1], ix[2], ix[3]);
        let mut s = dg.at4(y, z, k, x) - dg.at4(x, z, k, y);
        for m in 0..d {
            s += gm.at3(y, z, m) * gm.at3(x, m, k) - gm.at3(x, z, m) * gm.at3(y, m, k);
        }
        s
    });
    Ok(r.apply_out(3, g))
}

/// `ρ_α = ½ tr_{2,3} R(·,·,·,J_α·)`.
pub fn ricci_forms(r: &Real, ginv: &Real, j: &[Real; 3]) -> [Real; 3] {
    std::array::from_fn(|a| r.apply_slot(3, &j[a]).trace(2, 3, ginv).scale(0.5))
}

fn scalar(t: &Real) -> f64 {
    t.data()[0]
}

/// Everything the curvature identities need at one point.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    pub n: usize,
    pub g: Real,
    pub ginv: Real,
    pub j: [Real; 3],
    /// Torsion 3-form and its vector-valued version `Tv[x][y][k]`.
    pub t3: Real,
    pub tv: Real,
    pub r: Real,
    pub rg: Real,
    pub ric: Real,
    pub ric_g: Real,
    pub scal: f64,
    pub scal_g: f64,
    pub rho: [Real; 3],
    pub rho_g: [Real; 3],
    /// `∇T` and `∇^g T`, derivative slot first.
    pub nabla_t: Real,
    pub nabla_g_t: Real,
    pub dt3: Real,
    pub t: Real,
    pub nabla_t1: Real,
    pub nabla_g_t1: Real,
    pub dt1: Real,
    /// `g(T(X,Y), T(Z,U))`.
    pub gtt: Real,
    /// `|T|²` and `|t|²`.
    pub t_norm: f64,
    pub t1_norm: f64,
    /// `δt = −tr ∇^g t`.
    pub delta_t: f64,
    pub omega: [Real; 3],
    pub domega: [Real; 3],
}

pub fn curvature_data(s: &StructureJets, pq: &PqktData) -> Result<CurvatureData> {
    let g = s.g_val();
    let ginv = s.ginv_val();
    let j = s.j_val();
    let gamma_g = &pq.lee.gamma_g;
    let r = curvature(&pq.gamma, &g)?;
    let rg = curvature(gamma_g, &g)?;
    let ric = r.trace(0, 3, &ginv);
    let ric_g = rg.trace(0, 3, &ginv);
    let scal = scalar(&ric.trace(0, 1, &ginv));
    let scal_g = scalar(&ric_g.trace(0, 1, &ginv));
    let rho = ricci_forms(&r, &ginv, &j);
    let rho_g = ricci_forms(&rg, &ginv, &j);
    let t3 = pq.torsion.values();
    let tv = t3.apply_out(2, &ginv);
    let nabla_t = cov_deriv(&pq.torsion, &pq.gamma)?.values();
    let nabla_g_t = cov_deriv(&pq.torsion, gamma_g)?.values();
    let dt3 = d3(&pq.torsion)?.values();
    let t = pq.t.values();
    let nabla_t1 = cov_deriv(&pq.t, &pq.gamma)?.values();
    let nabla_g_t1 = cov_deriv(&pq.t, gamma_g)?.values();
    let dt1 = d1(&pq.t)?.values();
    let d = g.dim();
    let gtt = Tensor::from_fn(d, 4, |ix| (0..d).map(|b| t3.at3(ix[0], ix[1], b) * tv.at3(ix[2], ix[3], b)).sum());
    let t_up = t3.apply_out(0, &ginv).apply_out(1, &ginv).apply_out(2, &ginv);
    let t_norm = t_up.dot(&t3);
    let t1_norm = scalar(&t.outer(&t).trace(0, 1, &ginv));
    let delta_t = -scalar(&nabla_g_t1.trace(0, 1, &ginv));
    let omega = std::array::from_fn(|a| pq.omega[a].values());
    let mut domega = Vec::with_capacity(3);
    for w in &pq.omega {
        domega.push(d1(w)?.values());
    }
    Ok(CurvatureData {
        n: s.n,
        g,
        ginv,
        j,
        t3,
        tv,
        r,
        rg,
        ric,
        ric_g,
        scal,
        scal_g,
        rho,
        rho_g,
        nabla_t,
        nabla_g_t,
        dt3,
        t,
        nabla_t1,
        nabla_g_t1,
        dt1,
        gtt,
        t_norm,
        t1_norm,
        delta_t,
        omega,
        domega: crate::forms::to3(domega),
    })
}

/// Whether an identity involves only first derivatives of the metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

/// A named residual: a covariant tensor (rank 0 for scalar identities).
pub type Residual = (&'static str, Order, Real);

fn sc(v: f64, d: usize) -> Real {
    Tensor::from_vec(d, 0, vec![v])
}

impl CurvatureData {
    fn d(&self) -> usize {
        self.g.dim()
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `ε_α ρ_α(X, J_α Y)`.
    pub fn s_form(&self, a: usize) -> Real {
        ev2(&self.rho[a], None, Some(&self.j[a])).scale(EPS[a])
    }

    pub fn s_form_g(&self, a: usize) -> Real {
        ev2(&self.rho_g[a], None, Some(&self.j[a])).scale(EPS[a])
    }

    /// `(dT)_α(X,Y) = Σ_i ε_i dT(X,Y,e_i,J_α e_i)`.
    pub fn dt_alpha(&self, a: usize) -> Real {
        self.dt3.apply_slot(3, &self.j[a]).trace(2, 3, &self.ginv)
    }

    /// `ε_α (dT)_α(X, J_α Y)`.
    fn dt_alpha_j(&self, a: usize) -> Real {
        ev2(&self.dt_alpha(a), None, Some(&self.j[a])).scale(EPS[a])
    }

    /// `Σ_i ε_i g(T(X,e_i), T(Y, J_α e_i))`.
    fn t_pair(&self, a: usize) -> Real {
        let tj = self.tv.apply_slot(1, &self.j[a]);
        self.pair(&self.t3, &tj)
    }

    /// `Σ g^{pq} A[x][p][l] B[y][q][l]`.
    fn pair(&self, a: &Real, b: &Real) -> Real {
        let d = self.d();
        Tensor::from_fn(d, 2, |ix| {
            let mut s = 0.0;
            for p in 0..d {
                for q in 0..d {
                    let gpq = self.ginv.at2(p, q);
                    if *gpq == 0.0 {
                        continue;
                    }
                    for l in 0..d {
                        s += gpq * a.at3(ix[0], p, l) * b.at3(ix[1], q, l);
                    }
                }
            }
            s
        })
    }

    /// `Σ ε_iε_j g(T(e_i,e_j), T(P e_i, Q e_j))`.
    fn t_square(&self, p: &Real, q: &Real) -> f64 {
        let tpq = self.tv.apply_slot(0, p).apply_slot(1, q);
        let up = self.t3.apply_out(0, &self.ginv).apply_out(1, &self.ginv);
        up.dot(&tpq)
    }

    /// Matrix of `Scal_{αβ} = ε_α Σ_i ε_i ρ_α(e_i, J_β e_i)`.
    pub fn scal_matrix(&self, rho: &[Real; 3]) -> [[f64; 3]; 3] {
        std::array::from_fn(|a| {
            std::array::from_fn(|b| EPS[a] * scalar(&rho[a].apply_slot(1, &self.j[b]).trace(0, 1, &self.ginv)))
        })
    }

    /// `Scal_α = −Σ_i ε_i Ric(e_i, J_α e_i)`.
    pub fn scal_alpha(&self) -> [f64; 3] {
        std::array::from_fn(|a| -scalar(&self.ric.apply_slot(1, &self.j[a]).trace(0, 1, &self.ginv)))
    }

    /// Residuals of the general curvature identities.
    pub fn identities(&self) -> Vec<Residual> {
        use Order::*;
        let d = self.d();
        let n = self.nf();
        let j = &self.j;
        let nt = &self.nabla_t;
        let gtt = &self.gtt;
        let mut out: Vec<Residual> = Vec::new();

        // [R(X,Y), J_α] in terms of Ricci forms
        let rend = self.r.apply_out(3, &self.ginv).swap(2, 3);
        let mut e11 = 0.0f64;
        let mut e11t = Real::zeros(d, 4);
        for (a, b, c) in CYCLIC {
            let comm = rend.apply_slot(3, &j[a]).sub(&rend.apply_out(2, &j[a]));
            let mut rhs = self.rho[c].outer(&j[b]).scale(-EPS[a]);
            rhs.axpy(EPS[a], &self.rho[b].outer(&j[c]));
            let res = comm.sub(&rhs.scale(1.0 / n));
            let low = res.apply_out(2, &self.g);
            if low.max_abs() >= e11 {
                e11 = low.max_abs();
                e11t = low;
            }
        }
        out.push(("eq.11", Second, e11t));

        out.push(("eq.12", Second, self.worst(|a, b, c| {
            let mut rhs = self.domega[a].clone();
            rhs.axpy(EPS[a], &wedge11(&self.omega[b], &self.omega[c]));
            self.rho[a].scale(EPS[c]).sub(&rhs.scale(n))
        })));

        let dt13 = cyc3(&nt.add(&gtt.scale(2.0))).sub(&nt.permute(&[3, 0, 1, 2]));
        out.push(("eq.13", Second, self.dt3.sub(&dt13)));
        let b = cyc3(&self.r);
        out.push(("eq.14", Second, b.sub(&cyc3(&nt.add(gtt)))));
        let mut e15 = self.r.sub(&nt.scale(0.5)).add(&nt.swap(0, 1).scale(0.5)).sub(&gtt.scale(0.5));
        e15.axpy(-0.25, &gtt.permute(&[1, 2, 0, 3]));
        e15.axpy(-0.25, &gtt.permute(&[2, 0, 1, 3]));
        out.push(("eq.15", Second, self.rg.sub(&e15)));
        out.push(("eq.sof", Second, self.nabla_g_t.sub(&nt.add(&cyc3(gtt).scale(0.5)))));

        let dd = self.r.sub(&self.r.permute(&[2, 3, 0, 1]));
        let mut tir1 = nt.scale(0.5);
        tir1.axpy(-0.5, &nt.swap(0, 1));
        tir1.axpy(-0.5, &nt.permute(&[2, 3, 0, 1]));
        tir1.axpy(0.5, &nt.permute(&[3, 2, 0, 1]));
        out.push(("eq.tir1", Second, dd.sub(&tir1)));

        let delta_tt = self.nabla_g_t.trace(0, 1, &self.ginv).scale(-1.0);
        out.push(("ric.antisym", Second, self.ric.sub(&self.ric.transpose()).add(&delta_tt)));
        let tt = self.pair(&self.t3, &self.tv);
        let mut r5 = self.ric_g.sub(&self.ric).sub(&delta_tt.scale(0.5));
        r5.axpy(-0.25, &tt);
        out.push(("eq.r5", Second, r5));
        out.push(("eq.r5.scalar", Second, sc(self.scal_g - self.scal - 0.25 * self.t_norm, d)));

        let nt1 = &self.nabla_t1;
        let da: [Real; 3] = std::array::from_fn(|a| dd.apply_slot(2, &j[a]).trace(1, 2, &self.ginv));
        let ba: [Real; 3] = std::array::from_fn(|a| b.apply_slot(3, &j[a]).trace(2, 3, &self.ginv));
        out.push(("eq.tir2", Second, self.worst(|a, _, _| {
            let x = ev2(nt1, None, Some(&j[a]));
            da[a].add(&x).add(&x.transpose())
        })));
        out.push(("eq.tir4", Second, self.worst(|a, _, _| {
            let mut rhs = self.dt_alpha(a).scale(0.5);
            rhs.axpy(-2.0, &ev2(nt1, None, Some(&j[a])));
            ba[a].add(&da[a]).sub(&rhs)
        })));
        out.push(("eq.20", Second, self.worst(|a, b, c| {
            let lhs = self.s_form(a).scale(n).add(&self.s_form(b)).add(&self.s_form(c));
            let mut rhs = self.ric.scale(n);
            rhs.axpy(0.5 * n * EPS[a], &ev2(&ba[a], None, Some(&j[a])));
            rhs.axpy(0.5 * n * EPS[a], &ev2(&da[a], None, Some(&j[a])));
            lhs.sub(&rhs)
        })));
        out.push(("eq.ti20", Second, self.worst(|a, b, c| {
            let lhs = self.s_form(a).scale(n).add(&self.s_form(b)).add(&self.s_form(c));
            let mut rhs = self.ric.scale(n);
            rhs.axpy(0.25 * n, &self.dt_alpha_j(a));
            rhs.axpy(-n, nt1);
            lhs.sub(&rhs)
        })));
        out.push(("eq.ti22", Second, self.worst(|a, b, c| {
            let lhs = self.s_form(a).scale(n - 1.0);
            let mut rhs = self.ric.sub(nt1).scale(n * (n - 1.0) / (n + 2.0));
            let mut w = self.dt_alpha_j(a).scale(n + 1.0);
            w = w.sub(&self.dt_alpha_j(b)).sub(&self.dt_alpha_j(c));
            rhs.axpy(n / (4.0 * (n + 2.0)), &w);
            lhs.sub(&rhs)
        })));
        out.push(("eq.21", Second, self.worst(|a, b, _| {
            let lhs = self.s_form(a).sub(&self.s_form(b)).scale(n - 1.0);
            lhs.sub(&self.dt_alpha_j(a).sub(&self.dt_alpha_j(b)).scale(n / 4.0))
        })));
        out.push(("eq.nov2", Second, self.worst(|a, b, _| {
            let lhs = self.s_form(a).sub(&self.s_form(b)).scale(2.0 * (n - 1.0) / n);
            lhs.sub(&self.dt_alpha_j(a).sub(&self.dt_alpha_j(b)).scale(0.5))
        })));
        let twisted = |f: &[Real; 3], a: usize, b: usize, c: usize| {
            let mut r = ev2(&f[a], Some(&j[b]), Some(&j[b]));
            r.axpy(EPS[b], &f[a]);
            r.axpy(EPS[c], &ev2(&f[c], Some(&j[b]), None));
            r.axpy(EPS[c], &ev2(&f[c], None, Some(&j[b])));
            r
        };
        out.push(("eq.21.2", Second, self.worst(|a, b, c| twisted(&self.rho, a, b, c))));
        let lt: [Real; 3] = std::array::from_fn(|a| self.t_pair(a));
        out.push(("eq.e21.1", First, self.worst(|a, b, c| twisted(&lt, a, b, c))));
        let dt1 = &self.dt1;
        let dtt = |a: usize| {
            let mut r = dt1.clone();
            r.axpy(EPS[a], &ev2(dt1, Some(&j[a]), Some(&j[a])));
            r
        };
        out.push(("eq.22.2", Second, self.worst(|a, _, _| {
            let mut l = self.s_form(a).add(&ev2(&self.rho[a], Some(&j[a]), None).scale(EPS[a]));
            l.axpy(n / (n + 1.0), &dtt(a));
            l
        })));
        out.push(("eq.22.3", Second, self.worst(|a, _, _| {
            let mut l = self.s_form_g(a).add(&ev2(&self.rho_g[a], Some(&j[a]), None).scale(EPS[a]));
            l.axpy((n - 1.0) / (2.0 * (n + 1.0)), &dtt(a));
            l
        })));

        let sm = self.scal_matrix(&self.rho);
        let smg = self.scal_matrix(&self.rho_g);
        let diag = (sm[0][0] - sm[1][1]).abs().max((sm[1][1] - sm[2][2]).abs());
        out.push(("eq.22.4.diag", Second, sc(diag, d)));
        let off = (0..3)
            .flat_map(|a| (0..3).filter(move |&b| b != a).map(move |b| (a, b)))
            .map(|(a, b)| sm[a][b].abs())
            .fold(0.0, f64::max);
        out.push(("eq.22.4.offdiag", Second, sc(off, d)));

        let sp = sm[0][0];
        let t2 = self.t1_norm;
        let dl = self.delta_t;
        let tn = self.t_norm;
        let pq1 = (0..3).map(|a| (smg[a][a] - (sp - dl + t2 - tn / 12.0)).abs()).fold(0.0, f64::max);
        out.push(("eq.pq1", Second, sc(pq1, d)));
        let sa = self.scal_alpha();
        let cross = CYCLIC.iter().map(|&(a, b, c)| (-EPS[c] * smg[a][b] - sa[c]).abs()).fold(0.0, f64::max);
        out.push(("eq.pq1.cross", Second, sc(cross, d)));
        out.push(("prop.4.10.a", Second, sc(self.scal_g - ((n + 2.0) / n * sp - 3.0 * dl + 2.0 * t2 - tn / 12.0), d)));
        out.push(("prop.4.10.b", Second, sc(pq1, d)));
        out.push(("prop.4.10.c", Second, sc(self.scal - ((n + 2.0) / n * sp - 3.0 * dl + 2.0 * t2 - tn / 3.0), d)));

        out.push(("eq.rn2", Second, self.worst(|a, _, _| {
            let mut rhs = self.s_form(a);
            rhs.axpy(0.5, nt1);
            rhs.axpy(-0.5 * EPS[a], &ev2(nt1, Some(&j[a]), Some(&j[a])).transpose());
            let txj = self.tv.apply_slot(1, &j[a]);
            let u: Vec<f64> = (0..d).map(|k| (0..d).map(|l| self.t.at(l) * j[a].at2(l, k)).sum()).collect();
            let tjt = Tensor::from_fn(d, 2, |ix| (0..d).map(|k| u[k] * txj.at3(ix[0], ix[1], k)).sum());
            rhs.axpy(0.5 * EPS[a], &tjt);
            let tj = self.tv.apply_slot(0, &j[a]).apply_slot(1, &j[a]);
            rhs.axpy(0.25 * EPS[a], &self.pair(&self.t3, &tj));
            self.s_form_g(a).sub(&rhs)
        })));

        out.push(("eq.l1.1", Second, self.worst(|a, _, _| {
            let l = nt.apply_slot(1, &j[a]).apply_slot(3, &j[a]).trace(2, 3, &self.ginv);
            l.add(&nt1.scale(2.0 * EPS[a]))
        })));
        let dbl = |p: &Real, q: &Real| {
            scalar(&self.dt3.apply_slot(1, p).apply_slot(3, q).trace(0, 1, &self.ginv).trace(0, 1, &self.ginv))
        };
        let l12 = (0..3)
            .map(|a| (dbl(&j[a], &j[a]) - EPS[a] * (8.0 * dl - 8.0 * t2 + 4.0 / 3.0 * tn)).abs())
            .fold(0.0, f64::max);
        out.push(("eq.l1.2.diag", Second, sc(l12, d)));
        let l12m = CYCLIC.iter().map(|&(_, b, c)| dbl(&j[b], &j[c]).abs()).fold(0.0, f64::max);
        out.push(("eq.l1.2.mixed", Second, sc(l12m, d)));

        let mixed = CYCLIC.iter().map(|&(_, b, c)| self.t_square(&j[c], &j[b]).abs()).fold(0.0, f64::max);
        out.push(("lemma.3.3.mixed", First, sc(mixed, d)));
        let square = (0..3).map(|b| (self.t_square(&j[b], &j[b]) + EPS[b] * tn / 3.0).abs()).fold(0.0, f64::max);
        out.push(("lemma.3.3.square", First, sc(square, d)));
        out
    }

    /// Residual tensor with the largest entry over the three cyclic triples.
    fn worst(&self, f: impl Fn(usize, usize, usize) -> Real) -> Real {
        let mut best: Option<Real> = None;
        for (a, b, c) in CYCLIC {
            let r = f(a, b, c);
            if best.as_ref().map_or(true, |x| r.max_abs() > x.max_abs()) {
                best = Some(r);
            }
        }
        best.expect("three triples")
    }

    /// Whether `∇T` vanishes at this point (coordinate components).
    pub fn torsion_parallel_defect(&self) -> f64 {
        self.nabla_t.max_abs()
    }

    /// Defect of `dT` from type (2,2) for each `J_α`:
    /// `−ε dT − dT(J,J,·,·) − dT(J,·,J,·) − dT(·,J,J,·)`.
    pub fn type22_defect(&self) -> Real {
        self.worst(|a, _, _| {
            let t = &self.dt3;
            let ja = &self.j[a];
            let mut r = t.scale(-EPS[a]);
            r = r.sub(&t.apply_slot(0, ja).apply_slot(1, ja));
            r = r.sub(&t.apply_slot(0, ja).apply_slot(2, ja));
            r.sub(&t.apply_slot(1, ja).apply_slot(2, ja))
        })
    }

    /// Identities for parallel torsion; the second list needs `dT` of type (2,2).
    pub fn parallel_identities(&self) -> (Vec<Residual>, Vec<Residual>, f64) {
        use Order::*;
        let b = cyc3(&self.r);
        let dd = self.r.sub(&self.r.permute(&[2, 3, 0, 1]));
        let first = vec![
            ("eq.17", Second, b.sub(&self.dt3.scale(0.5))),
            ("eq.tir1.parallel", Second, dd),
        ];
        let dj = |a: usize| ev2(&self.dt_alpha(a), None, Some(&self.j[a]));
        let e24 = dj(0).sub(&dj(1));
        let e24b = dj(1).add(&dj(2));
        let e24 = if e24.max_abs() >= e24b.max_abs() { e24 } else { e24b };
        let e24p = self.worst(|a, _, _| {
            let x = self.dt_alpha(a);
            ev2(&x, None, Some(&self.j[a])).add(&ev2(&x, Some(&self.j[a]), None))
        });
        let lam = EPS[0] * scalar(&self.rho[0].apply_slot(1, &self.j[0]).trace(0, 1, &self.ginv)) / (4.0 * self.nf());
        let e27 = self.worst(|a, _, _| self.s_form(a).sub(&self.g.scale(lam)));
        let second = vec![("eq.24", Second, e24), ("eq.24p", Second, e24p), ("eq.27", Second, e27)];
        (first, second, lam)
    }
}
