//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] of order `k` at a point `p` stores the Taylor coefficients of a
//! scalar field in the displacement `h = x - p` for all monomials of total
//! degree `<= k`. Products truncate, and `partial(i)` lowers the order by one,
//! so a chain of field operations followed by `value()` yields exact
//! derivatives up to rounding.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Highest supported jet order.
pub const MAX_ORDER: usize = 3;

/// Monomial bookkeeping shared by every jet of a given dimension and order.
#[derive(Debug)]
pub struct JetSpace {
    dim: usize,
    max_order: usize,
    monos: Vec<Vec<u8>>,
    /// `offsets[k]` = number of monomials with degree `< k`.
    offsets: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// Product table sorted by result degree: `(a, b, out)`.
    mul: Vec<(u32, u32, u32)>,
    /// `mul_end[k]` = number of table entries whose result degree is `<= k`.
    mul_end: Vec<usize>,
    /// Per variable: for each target monomial of degree `< max_order`,
    /// the source monomial and the factor of `∂_i`.
    deriv: Vec<Vec<(u32, f64)>>,
}

impl JetSpace {
    pub fn new(dim: usize, max_order: usize) -> Result<Arc<Self>> {
        if max_order > MAX_ORDER {
            return Err(Error::UnsupportedOrder(max_order));
        }
        let mut monos: Vec<Vec<u8>> = Vec::new();
        let mut offsets = vec![0usize];
        for deg in 0..=max_order {
            let mut cur = vec![0u8; dim];
            gen_degree(dim, deg, 0, &mut cur, &mut monos);
            offsets.push(monos.len());
        }
        let index: HashMap<Vec<u8>, usize> =
            monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let deg_of = |m: &Vec<u8>| m.iter().map(|&e| e as usize).sum::<usize>();

        let mut mul = Vec::new();
        let mut mul_end = Vec::new();
        for rdeg in 0..=max_order {
            for a in 0..monos.len() {
                let da = deg_of(&monos[a]);
                if da > rdeg {
                    continue;
                }
                for b in offsets[rdeg - da]..offsets[rdeg - da + 1] {
                    let s: Vec<u8> = monos[a].iter().zip(&monos[b]).map(|(x, y)| x + y).collect();
                    mul.push((a as u32, b as u32, index[&s] as u32));
                }
            }
            mul_end.push(mul.len());
        }

        let mut deriv = vec![Vec::new(); dim];
        let lower = if max_order == 0 { 0 } else { offsets[max_order] };
        for (i, table) in deriv.iter_mut().enumerate() {
            for m in &monos[..lower] {
                let mut s = m.clone();
                s[i] += 1;
                table.push((index[&s] as u32, f64::from(s[i])));
            }
        }

        Ok(Arc::new(JetSpace { dim, max_order, monos, offsets, index, mul, mul_end, deriv }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of coefficients of a jet of order `k`.
    pub fn len(&self, k: usize) -> usize {
        self.offsets[k + 1]
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn monomial(&self, i: usize) -> &[u8] {
        &self.monos[i]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }
}

fn gen_degree(dim: usize, left: usize, pos: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if pos + 1 == dim || dim == 0 {
        if dim > 0 {
            cur[pos] = left as u8;
            out.push(cur.clone());
            cur[pos] = 0;
        } else if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for e in (0..=left).rev() {
        cur[pos] = e as u8;
        gen_degree(dim, left - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// Truncated Taylor expansion of a scalar field.
#[derive(Clone, Debug)]
pub struct Jet {
    space: Arc<JetSpace>,
    order: usize,
    c: Vec<f64>,
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, order: usize, v: f64) -> Jet {
        let mut c = vec![0.0; space.len(order)];
        c[0] = v;
        Jet { space: space.clone(), order, c }
    }

    /// The coordinate function `x_i` expanded at `p_i`.
    pub fn variable(space: &Arc<JetSpace>, order: usize, i: usize, p_i: f64) -> Jet {
        let mut j = Jet::constant(space, order, p_i);
        if order >= 1 {
            j.c[1 + i] = 1.0;
        }
        j
    }

    pub fn from_coeffs(space: &Arc<JetSpace>, order: usize, c: Vec<f64>) -> Jet {
        assert_eq!(c.len(), space.len(order));
        Jet { space: space.clone(), order, c }
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Gradient at the expansion point (requires order >= 1).
    pub fn gradient(&self) -> Vec<f64> {
        let d = self.space.dim;
        if self.order == 0 {
            return vec![0.0; d];
        }
        self.c[1..1 + d].to_vec()
    }

    /// Mixed partial derivative `∂^α f(p)` for a multi-index of degree `<= order`.
    pub fn derivative(&self, exps: &[u8]) -> f64 {
        let deg: usize = exps.iter().map(|&e| e as usize).sum();
        if deg > self.order {
            return 0.0;
        }
        let i = self.space.index_of(exps).expect("multi-index of wrong length");
        let fact: f64 = exps.iter().map(|&e| (1..=e as u32).product::<u32>() as f64).product();
        self.c[i] * fact
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet { space: self.space.clone(), order, c: self.c[..self.space.len(order)].to_vec() }
    }

    /// `∂_i`, lowering the order by one.
    pub fn partial(&self, i: usize) -> Result<Jet> {
        if self.order == 0 {
            return Err(Error::UnsupportedOrder(0));
        }
        let ord = self.order - 1;
        let n = self.space.len(ord);
        let table = &self.space.deriv[i];
        let c = (0..n).map(|m| {
            let (src, f) = table[m];
            self.c[src as usize] * f
        });
        Ok(Jet { space: self.space.clone(), order: ord, c: c.collect() })
    }

    pub fn recip(&self) -> Result<Jet> {
        let a0 = self.c[0];
        if a0 == 0.0 || !a0.is_finite() {
            return Err(Error::Degenerate("reciprocal of a jet with zero value".into()));
        }
        // 1/(a0 + u) = Σ_k (-u)^k / a0^{k+1}, u nilpotent of index order+1.
        let mut u = self.clone();
        u.c[0] = 0.0;
        let mut term = Jet::constant(&self.space, self.order, 1.0 / a0);
        let mut acc = term.clone();
        for _ in 0..self.order {
            term = term.mul(&u).scale(-1.0 / a0);
            acc.add_assign(&term);
        }
        Ok(acc)
    }

    pub fn ln(&self) -> Result<Jet> {
        let a0 = self.c[0];
        if a0 <= 0.0 {
            return Err(Error::Degenerate("logarithm of a non-positive jet".into()));
        }
        // ln(a0 + u) = ln a0 + Σ_k (-1)^{k+1} (u/a0)^k / k
        let mut v = self.scale(1.0 / a0);
        v.c[0] = 0.0;
        let mut acc = Jet::constant(&self.space, self.order, a0.ln());
        let mut pow = v.clone();
        for k in 1..=self.order {
            let s = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            acc.add_assign(&pow.scale(s));
            pow = pow.mul(&v);
        }
        Ok(acc)
    }

    fn aligned<'a>(&'a self, other: &'a Jet) -> (usize, &'a [f64], &'a [f64]) {
        let ord = self.order.min(other.order);
        let n = self.space.len(ord);
        (ord, &self.c[..n], &other.c[..n])
    }
}

/// Ring operations shared by plain floats and jets, so field formulas can be
/// written once and evaluated either pointwise or with derivatives.
pub trait Scalar: Clone + Send + Sync + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn const_like(&self, v: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, k: f64) -> Self;
    fn add_assign(&mut self, o: &Self);
    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self);
    /// `self += k * a`
    fn add_scaled(&mut self, a: &Self, k: f64);
    fn value(&self) -> f64;
    fn is_zero(&self) -> bool;
}

impl Scalar for f64 {
    fn zero_like(&self) -> f64 {
        0.0
    }
    fn const_like(&self, v: f64) -> f64 {
        v
    }
    fn add(&self, o: &f64) -> f64 {
        self + o
    }
    fn sub(&self, o: &f64) -> f64 {
        self - o
    }
    fn mul(&self, o: &f64) -> f64 {
        self * o
    }
    fn scale(&self, k: f64) -> f64 {
        self * k
    }
    fn add_assign(&mut self, o: &f64) {
        *self += o;
    }
    fn add_mul(&mut self, a: &f64, b: &f64) {
        *self += a * b;
    }
    fn add_scaled(&mut self, a: &f64, k: f64) {
        *self += k * a;
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for Jet {
    fn zero_like(&self) -> Jet {
        Jet { space: self.space.clone(), order: self.order, c: vec![0.0; self.c.len()] }
    }
    fn const_like(&self, v: f64) -> Jet {
        Jet::constant(&self.space, self.order, v)
    }
    fn add(&self, o: &Jet) -> Jet {
        let (order, a, b) = self.aligned(o);
        Jet { space: self.space.clone(), order, c: a.iter().zip(b).map(|(x, y)| x + y).collect() }
    }
    fn sub(&self, o: &Jet) -> Jet {
        let (order, a, b) = self.aligned(o);
        Jet { space: self.space.clone(), order, c: a.iter().zip(b).map(|(x, y)| x - y).collect() }
    }
    fn mul(&self, o: &Jet) -> Jet {
        let (order, a, b) = self.aligned(o);
        let mut c = vec![0.0; a.len()];
        for &(i, j, k) in &self.space.mul[..self.space.mul_end[order]] {
            c[k as usize] += a[i as usize] * b[j as usize];
        }
        Jet { space: self.space.clone(), order, c }
    }
    fn scale(&self, k: f64) -> Jet {
        Jet { space: self.space.clone(), order: self.order, c: self.c.iter().map(|x| x * k).collect() }
    }
    fn add_assign(&mut self, o: &Jet) {
        if o.order < self.order {
            *self = self.truncate(o.order);
        }
        for (x, y) in self.c.iter_mut().zip(&o.c) {
            *x += y;
        }
    }
    fn add_mul(&mut self, a: &Jet, b: &Jet) {
        let order = self.order.min(a.order).min(b.order);
        if order < self.order {
            *self = self.truncate(order);
        }
        for &(i, j, k) in &self.space.mul[..self.space.mul_end[order]] {
            self.c[k as usize] += a.c[i as usize] * b.c[j as usize];
        }
    }
    fn add_scaled(&mut self, a: &Jet, k: f64) {
        if a.order < self.order {
            *self = self.truncate(a.order);
        }
        for (x, y) in self.c.iter_mut().zip(&a.c) {
            *x += k * y;
        }
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(d: usize, k: usize) -> Arc<JetSpace> {
        JetSpace::new(d, k).unwrap()
    }

    #[test]
    fn monomial_counts() {
        let s = space(8, 3);
        assert_eq!(s.len(0), 1);
        assert_eq!(s.len(1), 9);
        assert_eq!(s.len(2), 45);
        assert_eq!(s.len(3), 165);
    }

    #[test]
    fn order_above_three_rejected() {
        assert!(matches!(JetSpace::new(4, 4), Err(Error::UnsupportedOrder(4))));
    }

    #[test]
    fn square_of_variable() {
        let s = space(3, 2);
        let x = Jet::variable(&s, 2, 0, 2.0);
        let f = x.mul(&x);
        assert_eq!(f.value(), 4.0);
        assert_eq!(f.gradient(), vec![4.0, 0.0, 0.0]);
        assert_eq!(f.derivative(&[2, 0, 0]), 2.0);
    }

    #[test]
    fn mixed_partial_symmetric() {
        let s = space(2, 2);
        let x = Jet::variable(&s, 2, 0, 1.0);
        let y = Jet::variable(&s, 2, 1, 1.0);
        let f = x.mul(&y);
        assert_eq!(f.derivative(&[1, 1]), 1.0);
        let fx = f.partial(0).unwrap();
        let fy = f.partial(1).unwrap();
        assert_eq!(fx.partial(1).unwrap().value(), fy.partial(0).unwrap().value());
    }

    #[test]
    fn recip_and_ln() {
        let s = space(2, 3);
        let x = Jet::variable(&s, 3, 0, 0.5);
        let f = x.const_like(1.0).add(&x); // 1 + x at x = 0.5
        let r = f.recip().unwrap();
        // d^k/dx^k (1+x)^{-1} = (-1)^k k! (1+x)^{-k-1}
        assert!((r.value() - 1.0 / 1.5).abs() < 1e-15);
        assert!((r.derivative(&[1, 0]) + 1.0 / 1.5f64.powi(2)).abs() < 1e-15);
        assert!((r.derivative(&[3, 0]) + 6.0 / 1.5f64.powi(4)).abs() < 1e-14);
        let l = f.ln().unwrap();
        assert!((l.derivative(&[2, 0]) + 1.0 / 1.5f64.powi(2)).abs() < 1e-14);
        assert!((f.mul(&r).value() - 1.0).abs() < 1e-15);
        assert!(f.mul(&r).coeffs()[1..].iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn partial_lowers_order() {
        let s = space(2, 2);
        let x = Jet::variable(&s, 2, 0, 0.0);
        assert_eq!(x.partial(0).unwrap().order(), 1);
        assert!(x.truncate(0).partial(0).is_err());
    }
}
