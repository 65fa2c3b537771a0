//! Exact multivariate polynomials on a chart.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace, Scalar};
use crate::tensor::{JetTensor, Tensor};

/// One term `coeff * Π x_i^{exponents[i]}` as it appears in manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

/// Polynomial scalar field. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyField {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl PolyField {
    pub fn zero(dim: usize) -> Self {
        PolyField { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn coord(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        let mut p = Self::zero(dim);
        p.add_term(e, 1.0);
        p
    }

    pub fn from_terms(dim: usize, terms: &[Term]) -> Result<Self> {
        let mut p = Self::zero(dim);
        for t in terms {
            if t.exponents.len() != dim {
                return Err(Error::Shape(format!(
                    "term has {} exponents, chart dimension is {dim}",
                    t.exponents.len()
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::Shape("non-finite coefficient".into()));
            }
            p.add_term(t.exponents.clone(), t.coeff);
        }
        Ok(p)
    }

    pub fn to_terms(&self) -> Vec<Term> {
        self.terms.iter().map(|(e, &c)| Term { exponents: e.clone(), coeff: c }).collect()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: f64) {
        assert_eq!(exps.len(), self.dim);
        let v = self.terms.entry(exps.clone()).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.terms.remove(&exps);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, &c) in &o.terms {
            p.add_term(e.clone(), c);
        }
        p
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut p = Self::zero(self.dim);
        for (e, &c) in &self.terms {
            p.add_term(e.clone(), c * k);
        }
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero(self.dim);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &o.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, ca * cb);
            }
        }
        p
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero(self.dim);
        for (e, &c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                p.add_term(e2, c * e[i] as f64);
            }
        }
        p
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Taylor jet of order `order` at `p`.
    pub fn eval_jet(&self, space: &Arc<JetSpace>, p: &[f64], order: usize) -> Result<Jet> {
        if order > space.max_order() {
            return Err(Error::UnsupportedOrder(order));
        }
        if p.len() != self.dim || space.dim() != self.dim {
            return Err(Error::Shape(format!("point of length {} for a {}-dimensional field", p.len(), self.dim)));
        }
        let mut acc = Jet::constant(space, order, 0.0);
        let vars: Vec<Jet> = (0..self.dim).map(|i| Jet::variable(space, order, i, p[i])).collect();
        for (e, &c) in &self.terms {
            let mut m = Jet::constant(space, order, c);
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    m = m.mul(&vars[i]);
                }
            }
            acc.add_assign(&m);
        }
        Ok(acc)
    }
}

/// Square matrix of polynomials, `m[k][j]` stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    dim: usize,
    entries: Vec<PolyField>,
}

impl PolyMatrix {
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> PolyField) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        PolyMatrix { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| PolyField::constant(dim, if i == j { 1.0 } else { 0.0 }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &PolyField {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[PolyField] {
        &self.entries
    }

    pub fn eval(&self, x: &[f64]) -> Tensor<f64> {
        Tensor::from_fn(self.dim, 2, |ix| self.entry(ix[0], ix[1]).eval(x))
    }

    pub fn eval_jet(&self, space: &Arc<JetSpace>, p: &[f64], order: usize) -> Result<JetTensor> {
        let data = self.entries.iter().map(|e| e.eval_jet(space, p, order)).collect::<Result<Vec<_>>>()?;
        Ok(Tensor::from_vec(self.dim, 2, data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_monomial() {
        let mut p = PolyField::zero(2);
        p.add_term(vec![3, 1], 2.0);
        let dx = p.derivative(0);
        assert_eq!(dx.eval(&[1.0, 2.0]), 12.0);
        assert_eq!(p.derivative(1).derivative(1).num_terms(), 0);
    }

    #[test]
    fn zero_coefficients_dropped() {
        let mut p = PolyField::coord(3, 1);
        p.add_term(vec![0, 1, 0], -1.0);
        assert!(p.is_zero());
    }

    #[test]
    fn jet_matches_symbolic_derivatives() {
        let d = 3;
        let space = JetSpace::new(d, 3).unwrap();
        let mut p = PolyField::constant(d, 0.5);
        p.add_term(vec![2, 1, 0], 1.5);
        p.add_term(vec![0, 1, 3], -0.7);
        p.add_term(vec![1, 0, 1], 2.0);
        let x = [0.3, -0.2, 0.7];
        let j = p.eval_jet(&space, &x, 3).unwrap();
        assert!((j.value() - p.eval(&x)).abs() < 1e-14);
        for i in 0..d {
            assert!((j.gradient()[i] - p.derivative(i).eval(&x)).abs() < 1e-14);
            for k in 0..d {
                let mut e = vec![0u8; d];
                e[i] += 1;
                e[k] += 1;
                let sym = p.derivative(i).derivative(k).eval(&x);
                assert!((j.derivative(&e) - sym).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_shape_error() {
        let space = JetSpace::new(2, 1).unwrap();
        let p = PolyField::coord(3, 0);
        assert!(matches!(p.eval_jet(&space, &[0.0, 0.0, 0.0], 1), Err(Error::Shape(_))));
    }
}
