//! Sparse polynomials with complex floating coefficients.
//!
//! Mirror of the exact layer for the numeric verification path: re-expanding
//! a decomposition whose weights or points did not reconstruct as rationals.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::polyring::{monomials_of_degree, multinomial, MultiIndex, Polynomial};

#[derive(Debug, Clone, Default)]
pub struct CPoly {
    pub nvars: usize,
    pub terms: BTreeMap<MultiIndex, Complex64>,
}

const DROP_EPS: f64 = 0.0; // keep every nonzero term; comparisons use norms

impl CPoly {
    pub fn zero(nvars: usize) -> Self {
        CPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(MultiIndex::zero(nvars), c);
        p
    }

    pub fn from_polynomial(p: &Polynomial) -> Self {
        let mut out = Self::zero(p.nvars());
        for (m, c) in p.terms() {
            out.add_term(
                m.clone(),
                Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0),
            );
        }
        out
    }

    pub fn add_term(&mut self, m: MultiIndex, c: Complex64) {
        if c.norm() <= DROP_EPS {
            return;
        }
        *self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn add(&self, other: &CPoly) -> CPoly {
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), *c);
        }
        p
    }

    pub fn sub(&self, other: &CPoly) -> CPoly {
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), -c);
        }
        p
    }

    pub fn scale(&self, s: Complex64) -> CPoly {
        let mut p = self.clone();
        for c in p.terms.values_mut() {
            *c *= s;
        }
        p
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        let mut p = CPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                p.add_term(ma.add(mb), ca * cb);
            }
        }
        p
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Expansion of `(c_1 x_1 + ... + c_n x_n)^d` over complex coefficients.
pub fn power_of_linear_form_c(coeffs: &[Complex64], d: u32) -> CPoly {
    let n = coeffs.len();
    let mut p = CPoly::zero(n);
    for m in monomials_of_degree(n, d) {
        let mut c = Complex64::new(
            multinomial(d, &m).to_f64().unwrap_or(f64::NAN),
            0.0,
        );
        for (i, &e) in m.0.iter().enumerate() {
            c *= coeffs[i].powu(e);
        }
        if c.norm() > 0.0 {
            p.add_term(m, c);
        }
    }
    p
}

/// Substitute `x_i ↦ Σ_j T_ij x_j` with complex rows.
pub fn apply_change_c(p: &CPoly, rows: &[Vec<Complex64>]) -> CPoly {
    let mut acc = CPoly::zero(p.nvars);
    for (m, c) in &p.terms {
        let mut term = CPoly::constant(p.nvars, *c);
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                term = term.mul(&power_of_linear_form_c(&rows[i], e));
            }
        }
        acc = acc.add(&term);
    }
    acc
}
