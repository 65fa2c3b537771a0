//! Identity suites evaluated over seeded sample points, aggregated into a [`Report`].

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{
    cov_deriv, jform, project_2form_type, type_l, wedge12, TypePart, CYCLIC, EPS,
};
use crate::conformal::{conformal_point, transport_checks};
use crate::connections::{
    boundary_term, canonical_p_connection, complex_product_connection, nabla_j, nijenhuis_from_a, omega_extraction,
    pqkt_connection, structure_one_forms, torsion_commutator, PqktData,
};
use crate::curvature::{curvature_data, Order, PARALLEL_TOL, TYPE22_TOL};
use crate::error::{Error, Result};
use crate::forms::{classify, hpkt_forms, Flag};
use crate::frame::{build_adapted_frame, FrameData, PIVOT};
use crate::jet::JetSpace;
use crate::manifest::{Manifest, ModelSpec};
use crate::report::{sha256_hex, FlagResult, IdentityResult, Measurement, Report, Status};
use crate::structures::{bracket_lemma, kahler_forms, nijenhuis, verify_algebra, Model, ParaHermitianStructure, StructureJets};
use crate::tensor::Real;

pub const SUITES: [&str; 7] = ["algebra", "structures", "connections", "forms", "curvature", "conformal", "parallel-torsion"];

/// Tolerance for identities involving at most first derivatives of the data.
pub const TOL_FIRST: f64 = 1e-9;
/// Tolerance for curvature-level identities.
pub const TOL_SECOND: f64 = 1e-7;
/// Tolerance on the flat model, where everything vanishes exactly.
pub const TOL_FLAT: f64 = 1e-12;
/// Pinned per-identity tolerances.
pub const PINNED: [(&str, f64); 2] = [("eq.z5", 1e-10), ("eq.5.metric", 1e-10)];
/// Premise threshold for identities stated as implications.
pub const PREMISE_TOL: f64 = 1e-9;

pub const ENGINE: &str = concat!("pqkt ", env!("CARGO_PKG_VERSION"));

/// Identities that need the PQKT connection, by suite.
const PQKT_CONNECTION_IDS: [&str; 17] = [
    "eq.4", "eq.5.metric", "eq.5.type", "eq.5.alpha", "eq.1", "eq.c7", "eq.c4", "eq.c5", "eq.c6", "eq.6", "eq.tr1",
    "prop.3.1", "cor.3.3", "eq.per1", "eq.per2", "eq.u3", "lee.theta-diag",
];
const CONFORMAL_IDS: [&str; 10] = [
    "eq.z1", "eq.z2.dF", "eq.z2.theta", "eq.z2.theta-cross", "eq.z3.K", "eq.z3.omega", "eq.z3.A", "eq.z4", "eq.z5",
    "conf.round-trip",
];
const PARALLEL_IDS: [&str; 3] = ["eq.17", "eq.tir1.parallel", "par.dT-type22"];
const TYPE22_IDS: [&str; 3] = ["eq.24", "eq.24p", "eq.27"];

/// Run settings (from a manifest, possibly overridden on the command line).
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub suites: Vec<String>,
    pub points: usize,
    pub seed: u64,
    pub region: f64,
    pub tolerance_scale: f64,
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn from_manifest(m: &Manifest) -> Self {
        RunConfig {
            suites: m.suites.clone(),
            points: m.samples.count,
            seed: m.samples.seed,
            region: m.samples.region,
            tolerance_scale: m.tolerance_scale,
            tolerances: m.tolerances.clone(),
        }
    }

    fn wants(&self, suite: &str) -> bool {
        self.suites.is_empty() || self.suites.iter().any(|s| s == suite)
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: Vec::new(),
            points: 25,
            seed: 0,
            region: 0.5,
            tolerance_scale: 1.0,
            tolerances: BTreeMap::new(),
        }
    }
}

/// Seeded points, uniform in `[−region, region]^d`.
pub fn sample_points(d: usize, count: usize, seed: u64, region: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..d).map(|_| rng.gen_range(-region..=region)).collect()).collect()
}

#[derive(Clone, Debug)]
enum Val {
    Residual(f64),
    NotApplicable(String),
}

#[derive(Clone, Debug)]
struct Entry {
    id: String,
    suite: &'static str,
    order: Order,
    val: Val,
}

#[derive(Default)]
struct PointResult {
    entries: Vec<Entry>,
    measurements: Vec<(String, f64)>,
    flags: Vec<(&'static str, f64)>,
    errors: Vec<String>,
}

impl PointResult {
    fn res(&mut self, suite: &'static str, id: &str, order: Order, r: f64) {
        self.entries.push(Entry { id: id.to_string(), suite, order, val: Val::Residual(r) });
    }

    fn na(&mut self, suite: &'static str, id: &str, why: &str) {
        self.entries.push(Entry { id: id.to_string(), suite, order: Order::First, val: Val::NotApplicable(why.into()) });
    }

    fn measure(&mut self, id: &str, v: f64) {
        self.measurements.push((id.to_string(), v));
    }
}

struct Ctx<'a> {
    model: &'a ParaHermitianStructure,
    s: StructureJets,
    space: std::sync::Arc<JetSpace>,
    point: Vec<f64>,
    g: Real,
    j: [Real; 3],
    dj: [Real; 3],
    frame: FrameData,
    pq: std::result::Result<PqktData, String>,
}

impl Ctx<'_> {
    fn cov(&self, t: &Real) -> f64 {
        self.frame.covariant(t).max_abs()
    }

    fn vec(&self, t: &Real) -> f64 {
        self.frame.vector_valued(t, &self.g).max_abs()
    }

    /// Endomorphism-valued 1-form stored `[x][k][j]`.
    fn endo(&self, t: &Real) -> f64 {
        self.vec(&t.swap(1, 2))
    }
}

fn worst(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a: f64, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn algebra_suite(c: &Ctx, out: &mut PointResult) {
    const S: &str = "algebra";
    for (id, r) in verify_algebra(&c.g, &c.j) {
        out.res(S, id, Order::First, r);
    }
    out.res(S, "frame.gram", Order::First, c.frame.gram_residual(&c.g));
    out.res(S, "frame.adapted", Order::First, c.frame.adapted_residual(&c.j));
    let f = kahler_forms(&c.g, &c.j);
    out.res(S, "kahler.skew", Order::First, worst(f.iter().map(|x| c.cov(&x.add(&x.transpose())))));
    let mut ty = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            let k = if a == b { -EPS[a] } else { EPS[b] };
            ty = ty.max(c.cov(&crate::algebra::ev2(&f[a], Some(&c.j[b]), Some(&c.j[b])).sub(&f[a].scale(k))));
        }
    }
    out.res(S, "kahler.type", Order::First, ty);
}

fn structures_suite(c: &Ctx, out: &mut PointResult) {
    const S: &str = "structures";
    let cp = complex_product_connection(&c.j, &c.dj);
    let nij: Vec<Real> = (0..3).map(|a| nijenhuis(&c.j[a], &c.dj[a])).collect();
    out.res(S, "nij.skew", Order::First, worst(nij.iter().map(|x| c.vec(&x.add(&x.swap(0, 1))))));
    out.res(
        S,
        "nij.bracket-double",
        Order::First,
        worst((0..3).map(|a| c.vec(&cp.brackets[a][a].sub(&nij[a].scale(2.0))))),
    );
    out.res(
        S,
        "nij.bracket-symmetric",
        Order::First,
        worst(CYCLIC.iter().map(|&(a, b, _)| c.vec(&cp.brackets[a][b].sub(&cp.brackets[b][a])))),
    );
    for (id, rs) in bracket_lemma(&c.j, &cp.brackets, &cp.th) {
        out.res(S, id, Order::First, worst(rs.iter().map(|r| c.vec(r))));
    }
    for (a, x) in nij.iter().enumerate() {
        out.measure(&format!("nijenhuis.{}", a + 1), c.vec(x));
    }
}

fn connections_suite(c: &Ctx, out: &mut PointResult) {
    const S: &str = "connections";
    let n = c.s.n;
    let cp = complex_product_connection(&c.j, &c.dj);
    out.res(S, "eq.tt1.1", Order::First, worst(nabla_j(&cp.gamma_cp, &c.j, &c.dj).iter().map(|x| c.endo(x))));
    let t_cp = crate::algebra::torsion_of(&cp.gamma_cp);
    out.res(S, "eq.tt1.2", Order::First, c.vec(&t_cp.sub(&cp.th)));
    out.res(S, "rem.nabla0.torsion-free", Order::First, c.vec(&crate::algebra::torsion_of(&cp.gamma0)));
    let n0 = nabla_j(&cp.gamma0, &c.j, &c.dj);
    out.res(
        S,
        "rem.nabla0.J",
        Order::First,
        worst((0..3).map(|a| c.endo(&n0[a].add(&torsion_commutator(&cp.th, &c.j[a]).scale(0.5))))),
    );
    out.res(S, "rem.nabla0.split", Order::First, c.vec(&cp.gamma_cp.sub(&cp.gamma0).sub(&cp.th.scale(0.5))));
    let ah = structure_one_forms(&cp.th, &c.j, n);
    let mut s13 = Real::zeros(c.g.dim(), 1);
    for a in 0..3 {
        s13.axpy(EPS[a], &ah[a].apply_slot(0, &c.j[a]));
    }
    out.res(S, "eq.tt1.3", Order::First, c.cov(&s13));
    match canonical_p_connection(&cp.gamma_cp, &c.j, &c.dj, n) {
        Ok(can) => {
            let mut bsum = Real::zeros(c.g.dim(), 1);
            for a in 0..3 {
                bsum.axpy(EPS[a], &can.b[a].apply_slot(0, &c.j[a]));
            }
            let ch: [Real; 3] = std::array::from_fn(|a| can.b[a].sub(&bsum.apply_slot(0, &c.j[a]).scale(1.0 / 3.0)));
            out.res(S, "eq.tt1.6", Order::First, c.vec(&can.torsion.sub(&cp.th).sub(&boundary_term(&ch, &c.j))));
            match omega_extraction(&can.gamma, &c.j, &c.dj) {
                Ok((_, r)) => out.res(S, "prop.2.4", Order::First, r),
                Err(e) => out.errors.push(format!("prop.2.4: {e}")),
            }
            out.measure("integrability.torsion", c.vec(&can.torsion));
        }
        Err(e) => {
            out.na(S, "eq.tt1.6", &e.to_string());
            out.na(S, "prop.2.4", &e.to_string());
        }
    }

    let pq = match &c.pq {
        Ok(pq) => pq,
        Err(why) => {
            for id in PQKT_CONNECTION_IDS {
                out.na(S, id, why);
            }
            return;
        }
    };
    let nf = n as f64;
    let j = &c.j;
    let g = &c.g;
    out.res(S, "eq.4", Order::First, worst(pq.existence.iter().map(|r| c.cov(r))));
    let t3 = pq.torsion.values();
    match cov_deriv(&c.s.g, &pq.gamma) {
        Ok(ng) => out.res(S, "eq.5.metric", Order::First, c.cov(&ng.values())),
        Err(e) => out.errors.push(format!("eq.5.metric: {e}")),
    }
    out.res(
        S,
        "eq.5.type",
        Order::First,
        worst((0..3).map(|a| {
            let mut r = type_l(&t3, &j[a]);
            r.axpy(EPS[a], &t3);
            c.cov(&r)
        })),
    );
    out.res(S, "eq.5.alpha", Order::First, worst(pq.torsion_by_alpha.iter().map(|x| c.cov(&x.sub(&t3)))));

    let gamma = pq.gamma.values();
    let w: Vec<Real> = pq.omega.iter().map(|x| x.values()).collect();
    let nj = nabla_j(&gamma, j, &c.dj);
    out.res(
        S,
        "eq.1",
        Order::First,
        worst(CYCLIC.iter().map(|&(a, b, cc)| {
            let mut r = nj[a].clone();
            r = r.sub(&w[b].outer(&j[cc]));
            r.axpy(-EPS[cc], &w[cc].outer(&j[b]));
            c.endo(&r)
        })),
    );
    match omega_extraction(&gamma, j, &c.dj) {
        Ok((we, _)) => out.res(S, "eq.c7", Order::First, worst((0..3).map(|a| c.cov(&we[a].sub(&w[a]))))),
        Err(e) => out.errors.push(format!("eq.c7: {e}")),
    }

    let th: Vec<Real> = pq.lee.theta.iter().map(|x| x.values()).collect();
    let tab: Vec<Vec<Real>> = pq.lee.theta_cross.iter().map(|r| r.iter().map(|x| x.values()).collect()).collect();
    let ta: Vec<Real> = pq.t_alpha.iter().map(|x| x.values()).collect();
    let cf = pq.c_forms(j);
    let af = pq.a_forms(j);
    let jf = |v: &Real, k: usize| jform(v, &j[k]);
    out.res(
        S,
        "eq.c4",
        Order::First,
        worst(CYCLIC.iter().flat_map(|&(a, b, cc)| {
            let jt = jf(&ta[a], a);
            let r1 = jt.add(&th[a]).add(&jf(&cf[a], b).scale(EPS[cc]));
            let r2 = jt.sub(&jf(&tab[b][a], cc).scale(EPS[b])).add(&jf(&cf[b], cc).scale(nf * EPS[a]));
            let r3 = jt.add(&jf(&tab[cc][a], b).scale(EPS[cc])).add(&jf(&cf[cc], a).scale(nf * EPS[b]));
            [c.cov(&r1), c.cov(&r2), c.cov(&r3)]
        })),
    );
    out.res(
        S,
        "eq.c5",
        Order::First,
        worst(CYCLIC.iter().flat_map(|&(a, b, cc)| {
            let lhs = af[a].scale(EPS[a]);
            let r1 = lhs.add(&jf(&cf[b], a)).sub(&jf(&cf[cc], cc).scale(EPS[a]));
            let r2 = lhs.sub(&jf(&th[cc].sub(&th[b]), b));
            [c.cov(&r1), c.cov(&r2)]
        })),
    );
    out.res(
        S,
        "eq.c6",
        Order::First,
        worst(CYCLIC.iter().map(|&(a, b, cc)| {
            let lhs = jf(&cf[a], b).scale((nf - 1.0) * EPS[cc]);
            c.cov(&lhs.sub(&th[a]).sub(&jf(&tab[a][cc], b).scale(EPS[a])))
        })),
    );
    let nij: Vec<Real> = (0..3).map(|a| nijenhuis(&j[a], &c.dj[a])).collect();
    let pred = nijenhuis_from_a(&af, j);
    out.res(S, "eq.6", Order::First, worst((0..3).map(|a| c.vec(&nij[a].sub(&pred[a])))));
    let tv = t3.apply_out(2, &c.s.ginv_val());
    out.res(
        S,
        "eq.tr1",
        Order::First,
        worst((0..3).map(|a| c.vec(&project_2form_type(&tv, &j[a], EPS[a], TypePart::P02)))),
    );
    let jt: Vec<Real> = (0..3).map(|a| jf(&ta[a], a)).collect();
    out.res(S, "prop.3.1", Order::First, c.cov(&jt[0].sub(&jt[1])).max(c.cov(&jt[1].sub(&jt[2]))));
    out.res(
        S,
        "cor.3.3",
        Order::First,
        worst(CYCLIC.iter().map(|&(a, b, cc)| c.cov(&jf(&tab[a][cc], b).add(&jf(&tab[a][b], cc))))),
    );
    out.res(
        S,
        "eq.per1",
        Order::First,
        worst(CYCLIC.iter().map(|&(a, b, cc)| {
            let mut r = th[a].scale(nf * nf + nf);
            r.axpy(-nf, &th[b]);
            r.axpy(-nf * nf, &th[cc]);
            r.axpy(-EPS[b], &jf(&tab[b][a], cc));
            r.axpy(-nf * EPS[cc], &jf(&tab[cc][b], a));
            r.axpy((nf + 1.0) * EPS[a], &jf(&tab[a][cc], b));
            c.cov(&r)
        })),
    );
    out.res(
        S,
        "eq.per2",
        Order::First,
        worst(CYCLIC.iter().map(|&(a, b, cc)| {
            let lhs = jf(&cf[a], b).scale((nf.powi(3) - 1.0) * EPS[cc]);
            let mut rhs = th[a].add(&jf(&tab[b][a], cc).scale(EPS[b]));
            rhs.axpy(nf, &th[b].add(&jf(&tab[cc][b], a).scale(EPS[cc])));
            rhs.axpy(nf * nf, &th[cc].add(&jf(&tab[a][cc], b).scale(EPS[a])));
            c.cov(&lhs.sub(&rhs))
        })),
    );
    let f = kahler_forms(g, j);
    let mut u3 = t3.clone();
    for a in 0..3 {
        u3.axpy(-1.0 / (2.0 * nf + 1.0), &wedge12(&ta[a], &f[a]));
    }
    out.res(S, "eq.u3", Order::First, c.cov(&u3));
    out.res(S, "lee.theta-diag", Order::First, worst((0..3).map(|a| c.cov(&tab[a][a].sub(&th[a])))));
}

fn forms_suite(c: &Ctx, out: &mut PointResult) {
    const S: &str = "forms";
    let lee = match &c.pq {
        Ok(pq) => pq.lee.clone(),
        Err(_) => match crate::forms::lee_data(&c.s) {
            Ok(l) => l,
            Err(e) => {
                out.errors.push(format!("lee data: {e}"));
                return;
            }
        },
    };
    let dp: Vec<Real> = lee.df_plus.iter().map(|x| x.values()).collect();
    let dm: Vec<Real> = lee.df_minus.iter().map(|x| x.values()).collect();
    out.res(
        S,
        "lee.dF-plus-type",
        Order::First,
        worst((0..3).map(|a| {
            let mut r = type_l(&dp[a], &c.j[a]);
            r.axpy(EPS[a], &dp[a]);
            c.cov(&r)
        })),
    );
    out.res(
        S,
        "lee.dF-minus-type",
        Order::First,
        worst((0..3).map(|a| {
            let mut r = type_l(&dm[a], &c.j[a]);
            r.axpy(-3.0 * EPS[a], &dm[a]);
            c.cov(&r)
        })),
    );
    for a in 0..3 {
        out.measure(&format!("theta.{}", a + 1), c.cov(&lee.theta[a].values()));
    }
    let th: Vec<Real> = lee.theta.iter().map(|x| x.values()).collect();
    let hp: Vec<Real> = hpkt_forms(&lee, &c.s.j).iter().map(|x| x.values()).collect();
    if c.s.n == 1 {
        // without a closed form for ω only the Lee-form relations remain
        out.res(
            S,
            "cor.3.3.n1",
            Order::First,
            worst(CYCLIC.iter().flat_map(|&(a, b, cc)| {
                let r2 = th[a].sub(&jform(&lee.theta_cross[a][b].values(), &c.j[cc]).scale(EPS[a]));
                [c.cov(&hp[a]), c.cov(&r2)]
            })),
        );
    }
    let Ok(pq) = &c.pq else {
        for id in ["prop.3.4", "prop.3.5"] {
            out.na(S, id, c.pq.as_ref().err().map_or("", |w| w.as_str()));
        }
        return;
    };
    match classify(&c.s, pq, &c.frame) {
        Ok(fl) => out.flags = fl,
        Err(e) => out.errors.push(format!("classification: {e}")),
    }
    out.measure("torsion.max", c.cov(&pq.torsion.values()));
    out.measure("t.max", c.cov(&pq.t.values()));

    // equal Lee forms force vanishing Nijenhuis tensors
    let equal = c.cov(&th[0].sub(&th[1])).max(c.cov(&th[1].sub(&th[2])));
    let nij = worst((0..3).map(|a| c.vec(&nijenhuis(&c.j[a], &c.dj[a]))));
    if equal < PREMISE_TOL {
        out.res(S, "prop.3.4", Order::Second, nij);
    } else {
        out.na(S, "prop.3.4", &format!("Lee forms differ ({equal:e})"));
    }

    // the three local HPKT criteria imply one another
    let dfa: Vec<Real> = (0..3).map(|a| jform(&dp[a], &c.j[a])).collect();
    let r_ii = c.cov(&dfa[0].sub(&dfa[1])).max(c.cov(&dfa[1].sub(&dfa[2])));
    let r_iii = worst(hp.iter().map(|x| c.cov(x)));
    let r_w = match omega_extraction(&pq.gamma.values(), &c.j, &c.dj) {
        Ok((w, _)) => worst(w.iter().map(|x| c.cov(x))),
        Err(e) => {
            out.errors.push(format!("prop.3.5: {e}"));
            return;
        }
    };
    out.measure("hpk.dF-plus-spread", r_ii);
    out.measure("hpk.lee-relation", r_iii);
    out.measure("omega.max", r_w);
    let crit = [r_ii, r_iii, r_w];
    let mut implied: Option<f64> = None;
    for (l, &left) in crit.iter().enumerate() {
        if left < PREMISE_TOL {
            let rest = crit.iter().enumerate().filter(|(r, _)| *r != l).map(|(_, v)| *v);
            implied = Some(implied.unwrap_or(0.0).max(worst(rest)));
        }
    }
    match implied {
        Some(r) => out.res(S, "prop.3.5", Order::Second, r),
        None => out.na(S, "prop.3.5", "no local HPKT criterion holds"),
    }
}

fn curvature_suites(c: &Ctx, out: &mut PointResult, curv: bool, par: bool) {
    let pq = match &c.pq {
        Ok(pq) => pq,
        Err(why) => {
            if curv {
                for id in crate::curvature::CURVATURE_IDS {
                    out.na("curvature", id, why);
                }
            }
            if par {
                for id in PARALLEL_IDS.iter().chain(&TYPE22_IDS) {
                    out.na("parallel-torsion", id, why);
                }
            }
            return;
        }
    };
    let cd = match curvature_data(&c.s, pq) {
        Ok(cd) => cd,
        Err(e) => {
            out.errors.push(format!("curvature: {e}"));
            return;
        }
    };
    if curv {
        for (id, order, r) in cd.identities() {
            out.res("curvature", id, order, c.cov(&r));
        }
        out.measure("scal", cd.scal);
        out.measure("scal.g", cd.scal_g);
        out.measure("scal.p", cd.scal_matrix(&cd.rho)[0][0]);
        for (a, v) in cd.scal_alpha().iter().enumerate() {
            out.measure(&format!("scal.alpha.{}", a + 1), *v);
        }
    }
    if par {
        const S: &str = "parallel-torsion";
        let nt = c.cov(&cd.nabla_t);
        out.measure("nabla-torsion.max", nt);
        if nt > PARALLEL_TOL {
            let why = format!("torsion is not parallel (|∇T| = {nt:e})");
            for id in PARALLEL_IDS.iter().chain(&TYPE22_IDS) {
                out.na(S, id, &why);
            }
            return;
        }
        let (first, second, lam) = cd.parallel_identities();
        for (id, order, r) in first {
            out.res(S, id, order, c.cov(&r));
        }
        let ty = c.cov(&cd.type22_defect());
        out.res(S, "par.dT-type22", Order::Second, ty);
        if ty > TYPE22_TOL {
            let why = format!("dT is not of type (2,2) (defect {ty:e})");
            for id in TYPE22_IDS {
                out.na(S, id, &why);
            }
        } else {
            for (id, order, r) in second {
                out.res(S, id, order, c.cov(&r));
            }
            out.measure("lambda", lam);
        }
    }
}

fn conformal_suite(c: &Ctx, out: &mut PointResult) {
    const S: &str = "conformal";
    let na = |out: &mut PointResult, why: &str| {
        for id in CONFORMAL_IDS {
            out.na(S, id, why);
        }
    };
    if !matches!(c.model.model, Model::Conformal { .. }) {
        na(out, "model is not a conformal rescaling");
        return;
    }
    let cp = match conformal_point(c.model, &c.space, &c.point, 2) {
        Ok(Some(cp)) => cp,
        Ok(None) => return na(out, "model is not a conformal rescaling"),
        Err(e) => {
            out.errors.push(format!("conformal: {e}"));
            return;
        }
    };
    match transport_checks(&cp) {
        Ok(checks) => {
            for ch in checks {
                let r = if ch.vector_valued { c.vec(&ch.value) } else { c.cov(&ch.value) };
                out.res(S, ch.id, Order::First, r);
            }
        }
        Err(e @ (Error::NoPqkt(_) | Error::Unsupported(_))) => na(out, &format!("base structure: {e}")),
        Err(e) => out.errors.push(format!("conformal: {e}")),
    }
}

fn evaluate_point(model: &ParaHermitianStructure, p: &[f64], cfg: &RunConfig, frame_seed: u64) -> PointResult {
    let mut out = PointResult::default();
    let d = model.dim();
    let prep = (|| -> Result<Ctx> {
        let space = JetSpace::new(d, 2)?;
        let s = model.jets(&space, p, 2)?;
        let g = s.g_val();
        let j = s.j_val();
        let dj = s.dj_val()?;
        let frame = build_adapted_frame(&g, &j, PIVOT, frame_seed)?;
        let pq = match pqkt_connection(&s) {
            Ok(pq) => Ok(pq),
            Err(e @ (Error::NoPqkt(_) | Error::Unsupported(_))) => Err(e.to_string()),
            Err(e) => return Err(e),
        };
        Ok(Ctx { model, s, space, point: p.to_vec(), g, j, dj, frame, pq })
    })();
    let c = match prep {
        Ok(c) => c,
        Err(e) => {
            out.errors.push(format!("point setup: {e}"));
            return out;
        }
    };
    if let Err(e @ Error::NoPqkt(_)) = pqkt_connection(&c.s).map(|_| ()) {
        if let Error::NoPqkt(r) = e {
            out.measure("existence.residual", r);
        }
    } else if let Ok(pq) = &c.pq {
        out.measure("existence.residual", worst(pq.existence.iter().map(|r| r.max_abs())));
    }
    if cfg.wants("algebra") {
        algebra_suite(&c, &mut out);
    }
    if cfg.wants("structures") {
        structures_suite(&c, &mut out);
    }
    if cfg.wants("connections") {
        connections_suite(&c, &mut out);
    }
    if cfg.wants("forms") {
        forms_suite(&c, &mut out);
    }
    let (cv, pt) = (cfg.wants("curvature"), cfg.wants("parallel-torsion"));
    if cv || pt {
        curvature_suites(&c, &mut out, cv, pt);
    }
    if cfg.wants("conformal") {
        conformal_suite(&c, &mut out);
    }
    out
}

/// Tolerance for an identity before the run-wide scale is applied.
pub fn base_tolerance(id: &str, order: Order, flat: bool, overrides: &BTreeMap<String, f64>) -> f64 {
    if let Some(t) = overrides.get(id) {
        return *t;
    }
    if flat {
        return TOL_FLAT;
    }
    if let Some((_, t)) = PINNED.iter().find(|(k, _)| *k == id) {
        return *t;
    }
    match order {
        Order::First => TOL_FIRST,
        Order::Second => TOL_SECOND,
    }
}

/// Evaluate the selected suites on `model` and aggregate into a report.
pub fn run(model: &ParaHermitianStructure, cfg: &RunConfig) -> Result<Report> {
    for s in &cfg.suites {
        if !SUITES.contains(&s.as_str()) {
            return Err(Error::Unsupported(format!("unknown suite '{s}'")));
        }
    }
    if cfg.points == 0 {
        return Err(Error::Unsupported("at least one sample point is required".into()));
    }
    let d = model.dim();
    let pts = sample_points(d, cfg.points, cfg.seed, cfg.region);
    let results: Vec<PointResult> = pts
        .par_iter()
        .enumerate()
        .map(|(i, p)| evaluate_point(model, p, cfg, cfg.seed.wrapping_add(i as u64)))
        .collect();

    let flat = matches!(model.model, Model::Flat);
    let mut agg: BTreeMap<String, (&'static str, Order, Option<f64>, usize, Option<String>)> = BTreeMap::new();
    let mut measurements: BTreeMap<String, Measurement> = BTreeMap::new();
    let mut flags: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    let mut errors = Vec::new();
    for (i, r) in results.iter().enumerate() {
        for e in &r.entries {
            let slot = agg.entry(e.id.clone()).or_insert((e.suite, e.order, None, 0, None));
            match &e.val {
                Val::Residual(x) => {
                    slot.1 = e.order;
                    slot.3 += 1;
                    let cur = slot.2.unwrap_or(0.0);
                    slot.2 = Some(if x.is_nan() || cur.is_nan() { f64::NAN } else { cur.max(*x) });
                }
                Val::NotApplicable(why) => {
                    if slot.4.is_none() {
                        slot.4 = Some(why.clone());
                    }
                }
            }
        }
        for (k, v) in &r.measurements {
            measurements.entry(k.clone()).and_modify(|m| m.push(*v)).or_insert_with(|| Measurement::new(*v));
        }
        for (k, v) in &r.flags {
            let e = flags.entry(k.to_string()).or_insert((0.0, 0));
            e.0 = e.0.max(*v);
            e.1 += 1;
        }
        for e in &r.errors {
            errors.push(format!("point {i}: {e}"));
        }
    }

    let mut identities = BTreeMap::new();
    for (id, (suite, order, max, evaluated, why)) in agg {
        let tolerance = base_tolerance(&id, order, flat, &cfg.tolerances) * cfg.tolerance_scale;
        let (status, note) = match max {
            None => (Status::NotApplicable, why),
            Some(m) if m <= tolerance => (Status::Pass, if evaluated < cfg.points { why } else { None }),
            Some(_) => (Status::Fail, if evaluated < cfg.points { why } else { None }),
        };
        identities.insert(id, IdentityResult { suite: suite.to_string(), tolerance, max_residual: max, evaluated, status, note });
    }
    identities.insert(
        "engine.evaluation".into(),
        IdentityResult {
            suite: "engine".into(),
            tolerance: 0.0,
            max_residual: Some(errors.len() as f64),
            evaluated: cfg.points,
            status: if errors.is_empty() { Status::Pass } else { Status::Fail },
            note: None,
        },
    );
    // flags are only meaningful when every point produced them
    let classification = flags
        .into_iter()
        .filter(|(_, (_, k))| *k == cfg.points)
        .map(|(k, (r, _))| (k, FlagResult { residual: r, flag: Flag::from_residual(r).as_str() }))
        .collect();

    let spec = ModelSpec::from_structure(model);
    let spec_json = crate::report::canonical_json(&serde_json::to_value(&spec).expect("model serializes"));
    let suites = if cfg.suites.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        let mut v = cfg.suites.clone();
        v.sort();
        v.dedup();
        v
    };
    Ok(Report {
        engine: ENGINE.to_string(),
        model_kind: spec.kind().to_string(),
        n: model.n,
        model_hash: sha256_hex(&spec_json),
        seed: cfg.seed,
        points: cfg.points,
        region: cfg.region,
        tolerance_scale: cfg.tolerance_scale,
        suites,
        identities,
        measurements,
        classification,
        errors,
    })
}
