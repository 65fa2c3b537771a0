//! Independent reference computations for integration tests.
//!
//! Nothing here calls into the connection or curvature code of the library;
//! only the jets of `g` and `J_α` are taken from the model.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use pqkt::jet::JetSpace;
use pqkt::structures::{ParaHermitianStructure, StructureJets};

pub const EPS: [f64; 3] = [1.0, 1.0, -1.0];
pub const CYC: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

/// Strictly increasing triples in `0..d`.
pub fn triples(d: usize) -> Vec<[usize; 3]> {
    let mut v = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            for k in j + 1..d {
                v.push([i, j, k]);
            }
        }
    }
    v
}

fn signed_perms([i, j, k]: [usize; 3]) -> [([usize; 3], f64); 6] {
    [([i, j, k], 1.0), ([j, k, i], 1.0), ([k, i, j], 1.0), ([j, i, k], -1.0), ([i, k, j], -1.0), ([k, j, i], -1.0)]
}

/// Dense `d×d` matrices and their first derivatives at a point.
pub struct PointData {
    pub d: usize,
    pub g: Vec<Vec<f64>>,
    /// `dg[x][i][j] = ∂_x g_ij`.
    pub dg: Vec<Vec<Vec<f64>>>,
    /// `j[a][k][m] = (J_a)^k_m`.
    pub j: [Vec<Vec<f64>>; 3],
    pub dj: [Vec<Vec<Vec<f64>>>; 3],
}

pub fn point_data(m: &ParaHermitianStructure, p: &[f64]) -> (StructureJets, PointData) {
    let d = m.dim();
    let space = JetSpace::new(d, 2).unwrap();
    let s = m.jets(&space, p, 2).unwrap();
    let mat = |t: &pqkt::tensor::JetTensor| -> (Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>) {
        let v = (0..d).map(|i| (0..d).map(|k| t.at2(i, k).value()).collect()).collect();
        let dv = (0..d)
            .map(|x| (0..d).map(|i| (0..d).map(|k| t.at2(i, k).gradient()[x]).collect()).collect())
            .collect();
        (v, dv)
    };
    let (g, dg) = mat(&s.g);
    let js: Vec<_> = s.j.iter().map(mat).collect();
    let j = std::array::from_fn(|a| js[a].0.clone());
    let dj = std::array::from_fn(|a| js[a].1.clone());
    (s, PointData { d, g, dg, j, dj })
}

fn to_na(m: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(m.len(), m.len(), |i, k| m[i][k])
}

impl PointData {
    pub fn ginv(&self) -> Vec<Vec<f64>> {
        let inv = to_na(&self.g).try_inverse().expect("metric is invertible");
        (0..self.d).map(|i| (0..self.d).map(|k| inv[(i, k)]).collect()).collect()
    }

    /// `Γ[x][y][k]`, the Levi-Civita connection `(∇_x ∂_y)^k`.
    pub fn christoffel(&self) -> Vec<Vec<Vec<f64>>> {
        let d = self.d;
        let gi = self.ginv();
        let mut out = vec![vec![vec![0.0; d]; d]; d];
        for x in 0..d {
            for y in 0..d {
                for k in 0..d {
                    let mut s = 0.0;
                    for l in 0..d {
                        s += gi[k][l] * (self.dg[x][y][l] + self.dg[y][x][l] - self.dg[l][x][y]);
                    }
                    out[x][y][k] = 0.5 * s;
                }
            }
        }
        out
    }

    /// `(∇^g_x J_a)^k_y`.
    pub fn nabla_g_j(&self, a: usize) -> Vec<Vec<Vec<f64>>> {
        let d = self.d;
        let gm = self.christoffel();
        let j = &self.j[a];
        let mut out = vec![vec![vec![0.0; d]; d]; d];
        for x in 0..d {
            for k in 0..d {
                for y in 0..d {
                    let mut s = self.dj[a][x][k][y];
                    for m in 0..d {
                        s += gm[x][m][k] * j[m][y] - j[k][m] * gm[x][y][m];
                    }
                    out[x][k][y] = s;
                }
            }
        }
        out
    }

    /// `F_a(y, z) = g(y, J_a z)`.
    pub fn kahler(&self, a: usize) -> Vec<Vec<f64>> {
        let d = self.d;
        (0..d).map(|y| (0..d).map(|z| (0..d).map(|m| self.g[y][m] * self.j[a][m][z]).sum()).collect()).collect()
    }
}

/// Solution of the pointwise linear system for a PQKT connection.
pub struct Oracle {
    /// `T[x][y][z]` flattened, totally skew.
    pub torsion: Vec<f64>,
    pub omega: [Vec<f64>; 3],
    /// `max |A s − b|` at the least-squares solution.
    pub residual: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Unknowns: the independent components of a 3-form `T` and the `3d`
/// components of `ω`. Rows: metric compatibility of `∇ = ∇^g + ½T` with the
/// structure equations, and the type condition on `T` for each `α`.
pub fn oracle(p: &PointData) -> Oracle {
    let d = p.d;
    let trip = triples(d);
    let nt = trip.len();
    let ncol = nt + 3 * d;
    let d3 = d * d * d;
    let at = |x: usize, y: usize, z: usize| (x * d + y) * d + z;
    let basis: Vec<Vec<f64>> = trip
        .iter()
        .map(|&[i, j, k]| {
            let mut b = vec![0.0; d3];
            for (p, s) in signed_perms([i, j, k]) {
                b[at(p[0], p[1], p[2])] = s;
            }
            b
        })
        .collect();
    let f: Vec<_> = (0..3).map(|a| p.kahler(a)).collect();
    let mut a_mat = DMatrix::<f64>::zeros(6 * d3, ncol);
    let mut rhs = DVector::<f64>::zeros(6 * d3);
    for (blk, &(a, b, c)) in CYC.iter().enumerate() {
        let nj = p.nabla_g_j(a);
        let ja = &p.j[a];
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let row = blk * d3 + at(x, y, z);
                    rhs[row] = -(0..d).map(|k| p.g[z][k] * nj[x][k][y]).sum::<f64>();
                    for (col, bt) in basis.iter().enumerate() {
                        let mut v = 0.0;
                        for m in 0..d {
                            v += bt[at(x, m, z)] * ja[m][y] + bt[at(x, y, m)] * ja[m][z];
                        }
                        a_mat[(row, col)] = 0.5 * v;
                    }
                    a_mat[(row, nt + b * d + x)] += f[c][y][z];
                    a_mat[(row, nt + c * d + x)] += EPS[c] * f[b][y][z];
                }
            }
        }
    }
    // type rows, accumulated over the six non-zero entries of each basis tensor
    for al in 0..3 {
        let ja = &p.j[al];
        for (col, &[i, j, k]) in trip.iter().enumerate() {
            let mut v = vec![0.0; d3];
            for ([u, w, r], sg) in signed_perms([i, j, k]) {
                v[at(u, w, r)] += EPS[al] * sg;
                for x in 0..d {
                    for y in 0..d {
                        v[at(x, y, r)] += sg * ja[u][x] * ja[w][y];
                        v[at(x, w, y)] += sg * ja[u][x] * ja[r][y];
                        v[at(u, x, y)] += sg * ja[w][x] * ja[r][y];
                    }
                }
            }
            for (e, val) in v.into_iter().enumerate() {
                a_mat[((3 + al) * d3 + e, col)] = val;
            }
        }
    }
    let svd = a_mat.clone().svd(true, true);
    let sv = &svd.singular_values;
    let sigma_min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let sigma_max = sv.iter().cloned().fold(0.0, f64::max);
    let sol = svd.solve(&rhs, 1e-12).expect("svd solve");
    let residual = (&a_mat * &sol - &rhs).amax();
    let mut torsion = vec![0.0; d3];
    for (col, bt) in basis.iter().enumerate() {
        for (t, b) in torsion.iter_mut().zip(bt) {
            *t += sol[col] * b;
        }
    }
    let omega = std::array::from_fn(|a| (0..d).map(|x| sol[nt + a * d + x]).collect());
    Oracle { torsion, omega, residual, sigma_min, sigma_max }
}
