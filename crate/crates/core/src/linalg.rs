//! Small dense linear algebra: LU solves, inverses, least squares and jet
//! matrix inversion.

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::tensor::{JetTensor, Real, Tensor};

/// Condition number above which a matrix is treated as degenerate.
pub const COND_LIMIT: f64 = 1e12;

/// LU factorisation with partial pivoting of a row-major `n x n` matrix.
pub struct Lu {
    n: usize,
    a: Vec<f64>,
    piv: Vec<usize>,
}

impl Lu {
    pub fn new(n: usize, mut a: Vec<f64>) -> Result<Lu> {
        assert_eq!(a.len(), n * n);
        let mut piv: Vec<usize> = (0..n).collect();
        let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, big) = (k..n).map(|i| (i, a[i * n + k].abs())).fold((k, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            if big <= scale * 1e-14 {
                return Err(Error::Degenerate(format!("singular matrix (pivot {big:e})")));
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let akk = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / akk;
                a[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        a[i * n + j] -= f * a[k * n + j];
                    }
                }
            }
        }
        Ok(Lu { n, a, piv })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.a[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.a[i * n + j] * x[j];
            }
            x[i] /= self.a[i * n + i];
        }
        x
    }
}

fn inf_norm(n: usize, a: &[f64]) -> f64 {
    (0..n).map(|i| a[i * n..(i + 1) * n].iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Inverse of a real rank-2 tensor; fails if singular or ill-conditioned.
pub fn inverse(m: &Real) -> Result<Real> {
    let n = m.dim();
    let lu = Lu::new(n, m.as_slice().to_vec())?;
    let mut inv = vec![0.0; n * n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = lu.solve(&e);
        for i in 0..n {
            inv[i * n + j] = col[i];
        }
    }
    let cond = inf_norm(n, m.as_slice()) * inf_norm(n, &inv);
    if !(cond < COND_LIMIT) {
        return Err(Error::Degenerate(format!("condition number {cond:e}")));
    }
    Ok(Tensor::from_vec(n, 2, inv))
}

/// Jet of the inverse matrix: `M^{-1} = Σ_k (-M0^{-1} N)^k M0^{-1}` with `N = M - M0`.
pub fn invert_jet(m: &JetTensor) -> Result<JetTensor> {
    let n = m.dim();
    let order = m.order();
    let m0 = m.values();
    let inv0 = inverse(&m0)?;
    let space = m.at(0).space().clone();
    let inv0j = inv0.map(|&v| Jet::constant(&space, order, v));
    let nil = Tensor::from_fn(n, 2, |ix| {
        let mut x = m.at2(ix[0], ix[1]).truncate(order);
        x.add_assign(&Jet::constant(&space, order, -m0.at2(ix[0], ix[1])));
        x
    });
    let step = inv0j.matmul(&nil).scale(-1.0);
    let mut term = inv0j.clone();
    let mut acc = inv0j;
    for _ in 0..order {
        term = step.matmul(&term);
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Least-squares solution of `A x = b` (`A` is `rows x cols`, row-major) through
/// the normal equations. Returns the solution and the max-abs residual.
pub fn least_squares(rows: usize, cols: usize, a: &[f64], b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let mut ata = vec![0.0; cols * cols];
    let mut atb = vec![0.0; cols];
    for r in 0..rows {
        let row = &a[r * cols..(r + 1) * cols];
        for i in 0..cols {
            if row[i] == 0.0 {
                continue;
            }
            atb[i] += row[i] * b[r];
            for j in 0..cols {
                ata[i * cols + j] += row[i] * row[j];
            }
        }
    }
    let x = Lu::new(cols, ata)?.solve(&atb);
    let mut res = 0.0f64;
    for r in 0..rows {
        let v: f64 = a[r * cols..(r + 1) * cols].iter().zip(&x).map(|(p, q)| p * q).sum();
        res = res.max((v - b[r]).abs());
    }
    Ok((x, res))
}
