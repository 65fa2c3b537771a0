//! Adapted frames `(e_i, J₃e_i, J₁e_i, J₂e_i)` and frame components.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::{Real, Tensor};

/// Default pivot threshold for paraquaternionic Gram–Schmidt.
pub const PIVOT: f64 = 1e-6;
const RANDOM_RETRIES: usize = 64;

/// Adapted orthonormal frame. `vectors[a][i]` is component `a` of `e_i`.
#[derive(Clone, Debug)]
pub struct FrameData {
    pub vectors: Real,
    pub signs: Vec<f64>,
}

fn gdot(g: &Real, u: &[f64], v: &[f64]) -> f64 {
    let d = u.len();
    let mut s = 0.0;
    for a in 0..d {
        if u[a] == 0.0 {
            continue;
        }
        for b in 0..d {
            s += u[a] * g.at2(a, b) * v[b];
        }
    }
    s
}

fn apply(m: &Real, v: &[f64]) -> Vec<f64> {
    let d = v.len();
    (0..d).map(|k| (0..d).map(|l| m.at2(k, l) * v[l]).sum()).collect()
}

/// Paraquaternionic Gram–Schmidt on `(g, J₁, J₂, J₃)` at a point.
pub fn build_adapted_frame(g: &Real, j: &[Real; 3], threshold: f64, seed: u64) -> Result<FrameData> {
    let d = g.dim();
    if d % 4 != 0 {
        return Err(Error::Shape(format!("dimension {d} is not a multiple of 4")));
    }
    let n = d / 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut found_eps: Vec<f64> = Vec::with_capacity(d);
    let mut quads: Vec<[Vec<f64>; 4]> = Vec::with_capacity(n);
    let mut next_coord = 0;
    let mut retries = 0;
    while quads.len() < n {
        let mut v: Vec<f64> = if next_coord < d {
            let mut e = vec![0.0; d];
            e[next_coord] = 1.0;
            next_coord += 1;
            e
        } else {
            retries += 1;
            if retries > RANDOM_RETRIES {
                return Err(Error::Frame(format!("no admissible direction after {RANDOM_RETRIES} random candidates")));
            }
            (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        for (w, &ew) in found.iter().zip(&found_eps) {
            let c = ew * gdot(g, &v, w);
            for a in 0..d {
                v[a] -= c * w[a];
            }
        }
        let mut q = gdot(g, &v, &v);
        if q.abs() <= threshold {
            continue;
        }
        if q < 0.0 {
            v = apply(&j[0], &v);
            q = gdot(g, &v, &v);
        }
        let s = 1.0 / q.sqrt();
        let v: Vec<f64> = v.iter().map(|x| x * s).collect();
        let quad = [v.clone(), apply(&j[2], &v), apply(&j[0], &v), apply(&j[1], &v)];
        for (k, w) in quad.iter().enumerate() {
            found.push(w.clone());
            found_eps.push(if k < 2 { 1.0 } else { -1.0 });
        }
        quads.push(quad);
    }
    let mut cols = vec![vec![0.0; d]; d];
    for (i, quad) in quads.iter().enumerate() {
        for (k, w) in quad.iter().enumerate() {
            cols[k * n + i] = w.clone();
        }
    }
    let vectors = Tensor::from_fn(d, 2, |ix| cols[ix[1]][ix[0]]);
    let signs = (0..d).map(|i| if i < 2 * n { 1.0 } else { -1.0 }).collect();
    Ok(FrameData { vectors, signs })
}

impl FrameData {
    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    /// Frame components `t(e_{i_1},…,e_{i_r})` of a covariant tensor.
    pub fn covariant(&self, t: &Real) -> Real {
        let mut out = t.clone();
        for s in 0..t.rank() {
            out = out.apply_slot(s, &self.vectors);
        }
        out
    }

    /// Frame components of a tensor whose last slot is a vector: the last slot is lowered with `g` first.
    pub fn vector_valued(&self, t: &Real, g: &Real) -> Real {
        self.covariant(&t.apply_out(t.rank() - 1, g))
    }

    /// `Σ_i ε_i t(…,e_i,…,e_i,…)` over slots `s1 < s2` of a covariant tensor.
    pub fn trace(&self, t: &Real, s1: usize, s2: usize) -> Real {
        let d = self.dim();
        let h = Tensor::from_fn(d, 2, |ix| {
            (0..d).map(|i| self.signs[i] * self.vectors.at2(ix[0], i) * self.vectors.at2(ix[1], i)).sum()
        });
        t.trace(s1, s2, &h)
    }

    /// `max |g(e_i,e_j) − ε_i δ_ij|`.
    pub fn gram_residual(&self, g: &Real) -> f64 {
        let gram = self.covariant(g);
        let d = self.dim();
        let mut r = 0.0f64;
        for i in 0..d {
            for k in 0..d {
                let want = if i == k { self.signs[i] } else { 0.0 };
                r = r.max((gram.at2(i, k) - want).abs());
            }
        }
        r
    }

    /// Residual of `e_{n+i} = J₃e_i`, `e_{2n+i} = J₁e_i`, `e_{3n+i} = J₂e_i`.
    pub fn adapted_residual(&self, j: &[Real; 3]) -> f64 {
        let d = self.dim();
        let n = d / 4;
        let mut r = 0.0f64;
        for i in 0..n {
            let v: Vec<f64> = (0..d).map(|a| *self.vectors.at2(a, i)).collect();
            for (block, ja) in [(1, 2), (2, 0), (3, 1)] {
                let w = apply(&j[ja], &v);
                for a in 0..d {
                    r = r.max((w[a] - self.vectors.at2(a, block * n + i)).abs());
                }
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::flat_data;

    #[test]
    fn flat_frame_is_standard_basis() {
        let (g, j) = flat_data(2);
        let f = build_adapted_frame(&g, &j, PIVOT, 0).unwrap();
        assert!(f.vectors.max_abs_diff(&Real::identity(8)) < 1e-15);
        assert_eq!(f.signs, vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn negative_candidate_is_twisted() {
        let (g, j) = flat_data(1);
        let g2 = g.scale(-1.0);
        let j2 = [j[1].clone(), j[0].clone(), j[2].scale(-1.0)];
        let f = build_adapted_frame(&g2, &j2, PIVOT, 0).unwrap();
        assert!(f.gram_residual(&g2) < 1e-14);
        assert!(f.adapted_residual(&j2) < 1e-14);
    }

    #[test]
    fn degenerate_metric_fails() {
        let (_, j) = flat_data(1);
        let g = Real::zeros(4, 2);
        assert!(matches!(build_adapted_frame(&g, &j, PIVOT, 0), Err(Error::Frame(_))));
    }

    #[test]
    fn trace_of_metric_counts_dimension() {
        let (g, j) = flat_data(2);
        let f = build_adapted_frame(&g, &j, PIVOT, 3).unwrap();
        assert_eq!(*f.trace(&g, 0, 1).data().first().unwrap(), 8.0);
        let f1 = crate::structures::kahler_forms(&g, &j);
        let tr: f64 = f.trace(&f1[0].apply_slot(1, &j[0]), 0, 1).data()[0];
        assert!((tr - 8.0).abs() < 1e-14);
    }
}
