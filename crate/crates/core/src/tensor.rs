//! Dense square tensors over a [`Scalar`].
//!
//! Every slot has the chart dimension `d`; storage is row-major. Slot
//! variance is tracked by the caller. Conventions used throughout the crate:
//!
//! * an endomorphism `A` is a rank-2 tensor with `A[k][j] = A^k_j`;
//! * a vector-valued form `P(X,Y)` is stored as `P[x][y][k]`, output last;
//! * `apply_slot(s, A)` replaces the argument in slot `s` by `A X`;
//! * `apply_out(s, A)` applies `A` to the vector index in slot `s`.

use crate::jet::{Jet, Scalar};

#[derive(Clone, Debug)]
pub struct Tensor<S> {
    dim: usize,
    rank: usize,
    data: Vec<S>,
}

pub type Real = Tensor<f64>;
pub type JetTensor = Tensor<Jet>;

fn strides(dim: usize, rank: usize) -> Vec<usize> {
    let mut s = vec![1; rank];
    for k in (0..rank.saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dim;
    }
    s
}

impl<S: Scalar> Tensor<S> {
    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> S) -> Self {
        let n = dim.pow(rank as u32);
        let mut idx = vec![0usize; rank];
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            data.push(f(&idx));
            for k in (0..rank).rev() {
                idx[k] += 1;
                if idx[k] < dim {
                    break;
                }
                idx[k] = 0;
            }
        }
        Tensor { dim, rank, data }
    }

    pub fn from_vec(dim: usize, rank: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), dim.pow(rank as u32), "tensor data length");
        Tensor { dim, rank, data }
    }

    pub fn filled(dim: usize, rank: usize, v: S) -> Self {
        Tensor { dim, rank, data: vec![v; dim.pow(rank as u32)] }
    }

    pub fn zeros_like(&self) -> Self {
        let z = self.data[0].zero_like();
        Tensor::filled(self.dim, self.rank, z)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn at(&self, i: usize) -> &S {
        &self.data[i]
    }

    pub fn at2(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.dim + j]
    }

    pub fn at3(&self, i: usize, j: usize, k: usize) -> &S {
        &self.data[(i * self.dim + j) * self.dim + k]
    }

    pub fn at4(&self, i: usize, j: usize, k: usize, l: usize) -> &S {
        &self.data[((i * self.dim + j) * self.dim + k) * self.dim + l]
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Tensor<T> {
        Tensor { dim: self.dim, rank: self.rank, data: self.data.iter().map(f).collect() }
    }

    pub fn values(&self) -> Real {
        self.map(|s| s.value())
    }

    fn same_shape(&self, o: &Self) {
        assert!(self.dim == o.dim && self.rank == o.rank, "tensor shape mismatch");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_shape(o);
        Tensor { dim: self.dim, rank: self.rank, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.same_shape(o);
        Tensor { dim: self.dim, rank: self.rank, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|a| a.scale(k))
    }

    pub fn scale_by(&self, s: &S) -> Self {
        self.map(|a| a.mul(s))
    }

    /// `self += k * o`
    pub fn axpy(&mut self, k: f64, o: &Self) {
        self.same_shape(o);
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            a.add_scaled(b, k);
        }
    }

    /// `out[i_0..i_{r-1}] = self[i_{perm[0]}, .., i_{perm[r-1]}]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank);
        let st = strides(self.dim, self.rank);
        Tensor::from_fn(self.dim, self.rank, |idx| {
            let o: usize = perm.iter().enumerate().map(|(k, &p)| idx[p] * st[k]).sum();
            self.data[o].clone()
        })
    }

    /// Swap two slots.
    pub fn swap(&self, a: usize, b: usize) -> Self {
        let mut perm: Vec<usize> = (0..self.rank).collect();
        perm.swap(a, b);
        self.permute(&perm)
    }

    /// Replace the argument in `slot` by `m X`: `out[..a..] = Σ_b self[..b..] m[b][a]`.
    pub fn apply_slot(&self, slot: usize, m: &Tensor<S>) -> Self {
        self.contract_slot(slot, m, true)
    }

    /// Apply the endomorphism `m` to the vector index in `slot`: `out[..k..] = Σ_l m[k][l] self[..l..]`.
    pub fn apply_out(&self, slot: usize, m: &Tensor<S>) -> Self {
        self.contract_slot(slot, m, false)
    }

    fn contract_slot(&self, slot: usize, m: &Tensor<S>, transpose: bool) -> Self {
        assert_eq!(m.rank, 2);
        let d = self.dim;
        let st = strides(d, self.rank)[slot];
        let mut out = self.zeros_like();
        for (o, val) in out.data.iter_mut().enumerate() {
            let a = (o / st) % d;
            let base = o - a * st;
            for b in 0..d {
                let mv = if transpose { &m.data[b * d + a] } else { &m.data[a * d + b] };
                val.add_mul(&self.data[base + b * st], mv);
            }
        }
        out
    }

    /// Trace of slots `s1 < s2` against a bilinear form on the dual (usually `g^{-1}`).
    pub fn trace(&self, s1: usize, s2: usize, ginv: &Tensor<S>) -> Self {
        assert!(s1 < s2 && s2 < self.rank);
        let d = self.dim;
        let st = strides(d, self.rank);
        let z = self.data[0].zero_like();
        Tensor::from_fn(d, self.rank - 2, |idx| {
            let mut base = 0;
            let mut k = 0;
            for s in 0..self.rank {
                if s == s1 || s == s2 {
                    continue;
                }
                base += idx[k] * st[s];
                k += 1;
            }
            let mut acc = z.clone();
            for a in 0..d {
                for b in 0..d {
                    let gab = &ginv.data[a * d + b];
                    if gab.is_zero() {
                        continue;
                    }
                    acc.add_mul(gab, &self.data[base + a * st[s1] + b * st[s2]]);
                }
            }
            acc
        })
    }

    /// Plain index contraction of slots `s1 < s2` (one upper, one lower).
    pub fn contract(&self, s1: usize, s2: usize) -> Self {
        assert!(s1 < s2 && s2 < self.rank);
        let d = self.dim;
        let st = strides(d, self.rank);
        let z = self.data[0].zero_like();
        Tensor::from_fn(d, self.rank - 2, |idx| {
            let mut base = 0;
            let mut k = 0;
            for s in 0..self.rank {
                if s == s1 || s == s2 {
                    continue;
                }
                base += idx[k] * st[s];
                k += 1;
            }
            let mut acc = z.clone();
            for a in 0..d {
                acc.add_assign(&self.data[base + a * st[s1] + a * st[s2]]);
            }
            acc
        })
    }

    pub fn outer(&self, o: &Tensor<S>) -> Self {
        Tensor::from_fn(self.dim, self.rank + o.rank, |idx| {
            let i = self.offset(&idx[..self.rank]);
            let j = o.offset(&idx[self.rank..]);
            self.data[i].mul(&o.data[j])
        })
    }

    /// Matrix product of two rank-2 tensors.
    pub fn matmul(&self, o: &Tensor<S>) -> Self {
        assert!(self.rank == 2 && o.rank == 2);
        let d = self.dim;
        let z = self.data[0].zero_like();
        Tensor::from_fn(d, 2, |ix| {
            let mut acc = z.clone();
            for k in 0..d {
                acc.add_mul(&self.data[ix[0] * d + k], &o.data[k * d + ix[1]]);
            }
            acc
        })
    }

    /// Matrix-vector product `m v` for rank-2 `self` and rank-1 `v`.
    pub fn matvec(&self, v: &Tensor<S>) -> Self {
        assert!(self.rank == 2 && v.rank == 1);
        let d = self.dim;
        let z = self.data[0].zero_like();
        Tensor::from_fn(d, 1, |ix| {
            let mut acc = z.clone();
            for k in 0..d {
                acc.add_mul(&self.data[ix[0] * d + k], &v.data[k]);
            }
            acc
        })
    }

    pub fn transpose(&self) -> Self {
        self.swap(0, 1)
    }

    pub fn identity_like(&self) -> Self {
        let z = self.data[0].zero_like();
        let one = z.const_like(1.0);
        Tensor::from_fn(self.dim, 2, |ix| if ix[0] == ix[1] { one.clone() } else { z.clone() })
    }

    /// Full contraction with a same-shape tensor: `Σ self[I] o[I]`.
    pub fn dot(&self, o: &Tensor<S>) -> S {
        self.same_shape(o);
        let mut acc = self.data[0].zero_like();
        for (a, b) in self.data.iter().zip(&o.data) {
            acc.add_mul(a, b);
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|s| s.value().abs()).fold(0.0, f64::max)
    }
}

impl Tensor<Jet> {
    /// Appends a derivative slot: `out[.., i] = ∂_i self[..]`, lowering jet order by one.
    pub fn partial(&self) -> crate::error::Result<Tensor<Jet>> {
        let d = self.dim;
        let mut data = Vec::with_capacity(self.data.len() * d);
        for x in &self.data {
            for i in 0..d {
                data.push(x.partial(i)?);
            }
        }
        Ok(Tensor { dim: d, rank: self.rank + 1, data })
    }

    pub fn order(&self) -> usize {
        self.data.iter().map(|j| j.order()).min().unwrap_or(0)
    }
}

impl Real {
    pub fn zeros(dim: usize, rank: usize) -> Real {
        Tensor::filled(dim, rank, 0.0)
    }

    pub fn identity(dim: usize) -> Real {
        Tensor::from_fn(dim, 2, |ix| if ix[0] == ix[1] { 1.0 } else { 0.0 })
    }

    pub fn max_abs_diff(&self, o: &Real) -> f64 {
        self.same_shape(o);
        self.data.iter().zip(&o.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t3(d: usize) -> Real {
        Tensor::from_fn(d, 3, |i| (i[0] * 100 + i[1] * 10 + i[2]) as f64)
    }

    #[test]
    fn permute_moves_indices() {
        let t = t3(3);
        let p = t.permute(&[2, 0, 1]);
        assert_eq!(*p.at3(1, 2, 0), *t.at3(0, 1, 2));
    }

    #[test]
    fn apply_slot_matches_loop() {
        let d = 3;
        let t = t3(d);
        let m = Tensor::from_fn(d, 2, |i| (i[0] as f64) - 2.0 * (i[1] as f64) + 0.5);
        let a = t.apply_slot(1, &m);
        let b = t.apply_out(2, &m);
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let e1: f64 = (0..d).map(|k| t.at3(x, k, z) * m.at2(k, y)).sum();
                    let e2: f64 = (0..d).map(|k| m.at2(z, k) * t.at3(x, y, k)).sum();
                    assert_eq!(*a.at3(x, y, z), e1);
                    assert_eq!(*b.at3(x, y, z), e2);
                }
            }
        }
    }

    #[test]
    fn trace_and_contract() {
        let d = 3;
        let t = t3(d);
        let g = Real::identity(d);
        let a = t.trace(0, 2, &g);
        let b = t.contract(0, 2);
        for y in 0..d {
            let e: f64 = (0..d).map(|k| t.at3(k, y, k)).sum();
            assert_eq!(*a.at(y), e);
            assert_eq!(*b.at(y), e);
        }
    }
}
