//! Sparse multivariate polynomials over arbitrary-precision rationals.
//!
//! Monomials are exponent vectors ordered degree-first; within a degree the
//! lexicographically larger exponent vector (x1 heaviest) comes first, so the
//! ascending sequence of monomials in two variables reads
//! 1, y, z, y², yz, z², y³, ... — the order used for all matrix bases.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::QMatrix;

/// Exponent vector of a monomial in a fixed number of variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(nvars: usize) -> Self {
        MultiIndex(vec![0; nvars])
    }

    /// The exponent vector of the variable `x_i`.
    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.0.len(), other.0.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise subtraction; `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u32>>>()
            .map(MultiIndex)
    }

    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All exponent vectors of the given total degree, ascending in the canonical
/// order (within one degree that is lexicographically descending).
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; nvars];
    fn rec(nvars: usize, pos: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if pos + 1 == nvars {
            current[pos] = left;
            out.push(MultiIndex(current.clone()));
            return;
        }
        for e in (0..=left).rev() {
            current[pos] = e;
            rec(nvars, pos + 1, left - e, current, out);
        }
    }
    if nvars == 0 {
        if degree == 0 {
            out.push(MultiIndex(vec![]));
        }
        return out;
    }
    rec(nvars, 0, degree, &mut current, &mut out);
    out
}

/// All exponent vectors of total degree at most `degree`, canonically ordered.
pub fn monomials_up_to_degree(nvars: usize, degree: u32) -> Vec<MultiIndex> {
    (0..=degree)
        .flat_map(|d| monomials_of_degree(nvars, d))
        .collect()
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k.min(n - k) {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Multinomial coefficient `d! / ((d-|α|)! · Π α_i!)`, counting the slack
/// `d - |α|` as one more block. Zero when `|α| > d`.
pub fn multinomial(d: u32, alpha: &MultiIndex) -> BigInt {
    let total = alpha.degree();
    if total > d {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    let mut rest = d;
    for &e in &alpha.0 {
        r *= binomial(rest, e);
        rest -= e;
    }
    r
}

/// Sparse polynomial with exact rational coefficients.
#[derive(Debug, Clone)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<MultiIndex, BigRational>,
    homogeneous_degree: Option<u32>,
}

/// Equality is on variables and terms; the homogeneity tag is cached
/// metadata, not identity.
impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
            homogeneous_degree: None,
        }
    }

    pub fn constant(nvars: usize, value: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !value.is_zero() {
            p.terms.insert(MultiIndex::zero(nvars), value);
        }
        p
    }

    pub fn variable(nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return Err(Error::IndexOutOfBounds { index: i, nvars });
        }
        let mut p = Self::zero(nvars);
        p.terms.insert(MultiIndex::unit(nvars, i), BigRational::one());
        Ok(p)
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (MultiIndex, BigRational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: m.nvars(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: MultiIndex, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &MultiIndex) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    pub fn homogeneous_degree(&self) -> Option<u32> {
        self.homogeneous_degree
    }

    /// Checks that every term has the same total degree and tags it.
    pub fn tag_homogeneous(mut self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let d = self.total_degree().expect("nonzero");
        if let Some(bad) = self.terms.keys().find(|m| m.degree() != d) {
            return Err(Error::NotHomogeneous(format!(
                "term with exponents {bad} has degree {} != {}",
                bad.degree(),
                d
            )));
        }
        self.homogeneous_degree = Some(d);
        Ok(self)
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.total_degree() {
            None => true,
            Some(d) => self.terms.keys().all(|m| m.degree() == d),
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut p = self.clone();
        p.homogeneous_degree = None;
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut p = self.clone();
        p.homogeneous_degree = None;
        for (m, c) in &other.terms {
            p.add_term(m.clone(), -c.clone());
        }
        p
    }

    pub fn neg(&self) -> Polynomial {
        let mut p = self.clone();
        for c in p.terms.values_mut() {
            *c = -c.clone();
        }
        p
    }

    pub fn scale(&self, s: &BigRational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        let mut p = self.clone();
        for c in p.terms.values_mut() {
            *c *= s.clone();
        }
        p
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut p = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                p.add_term(ma.add(mb), ca * cb);
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut r = Polynomial::constant(self.nvars, BigRational::one());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Exact evaluation at a rational point.
    pub fn eval_at_point(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= point[i].clone();
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            for (i, &e) in m.0.iter().enumerate() {
                t *= point[i].powu(e);
            }
            acc += t;
        }
        acc
    }

    pub fn partial_derivative(&self, i: usize) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfBounds { index: i, nvars: self.nvars });
        }
        let mut p = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[i] == 0 {
                continue;
            }
            let mut e = m.clone();
            e.0[i] -= 1;
            p.add_term(e, c * BigRational::from(BigInt::from(m.0[i])));
        }
        Ok(p)
    }

    pub fn max_abs_coeff_f64(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    /// The largest absolute coefficient as an exact rational; zero for the
    /// zero polynomial.
    pub fn max_abs_coeff(&self) -> BigRational {
        let mut best = BigRational::zero();
        for c in self.terms.values() {
            let a = c.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Divide by the largest absolute coefficient, so every surviving
    /// coefficient lies in [-1, 1] with at least one of magnitude one. Exact
    /// cancellation can leave equations with tiny content whose residuals
    /// would otherwise drown in floating-point thresholds.
    pub fn normalize_scale(&self) -> Polynomial {
        let m = self.max_abs_coeff();
        if m.is_zero() {
            return self.clone();
        }
        self.scale(&m.recip())
    }
}

/// Substitute `x_i = 1` for the first variable of a homogeneous polynomial,
/// producing a polynomial in the remaining `n` variables.
pub fn dehomogenize(f: &Polynomial) -> Result<Polynomial> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.homogeneous_degree.is_none() {
        return Err(Error::NotHomogeneous("degree tag absent".into()));
    }
    let n = f.nvars - 1;
    let mut p = Polynomial::zero(n);
    for (m, c) in &f.terms {
        p.add_term(MultiIndex(m.0[1..].to_vec()), c.clone());
    }
    Ok(p)
}

/// Inverse of [`dehomogenize`] at degree `d`: pad each exponent vector with a
/// leading slack exponent `d - |α|`.
pub fn homogenize(f: &Polynomial, d: u32) -> Result<Polynomial> {
    let mut p = Polynomial::zero(f.nvars + 1);
    for (m, c) in &f.terms {
        let deg = m.degree();
        if deg > d {
            return Err(Error::DegreeExceeded { bound: d, got: deg });
        }
        let mut e = Vec::with_capacity(f.nvars + 1);
        e.push(d - deg);
        e.extend_from_slice(&m.0);
        p.add_term(MultiIndex(e), c.clone());
    }
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    p.tag_homogeneous()
}

/// The bilinear pairing `Σ_α f_α g_α / C(d, α)` on polynomials of degree ≤ d,
/// where `C(d, α)` is the multinomial weight of `x^α` inside degree d.
pub fn apolar_product(f: &Polynomial, g: &Polynomial, d: u32) -> Result<BigRational> {
    debug_assert_eq!(f.nvars, g.nvars);
    let mut acc = BigRational::zero();
    for (m, cf) in &f.terms {
        if m.degree() > d {
            return Err(Error::DegreeExceeded { bound: d, got: m.degree() });
        }
        if let Some(cg) = g.terms.get(m) {
            acc += cf * cg / BigRational::from(multinomial(d, m));
        }
    }
    if let Some(bad) = g.terms.keys().find(|m| m.degree() > d) {
        return Err(Error::DegreeExceeded { bound: d, got: bad.degree() });
    }
    Ok(acc)
}

/// The dual functional of `f` at the monomial `x^α`: `f_α / C(d, α)`.
pub fn dual_eval(f: &Polynomial, d: u32, alpha: &MultiIndex) -> Result<BigRational> {
    if alpha.degree() > d {
        return Err(Error::DegreeExceeded { bound: d, got: alpha.degree() });
    }
    Ok(f.coefficient(alpha) / BigRational::from(multinomial(d, alpha)))
}

/// Expansion of `(c_1 x_1 + ... + c_n x_n)^d` with exact multinomials.
pub fn power_of_linear_form(coeffs: &[BigRational], d: u32) -> Polynomial {
    let n = coeffs.len();
    let mut p = Polynomial::zero(n);
    for m in monomials_of_degree(n, d) {
        let mut c = BigRational::from(multinomial(d, &m));
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                if coeffs[i].is_zero() {
                    c = BigRational::zero();
                    break;
                }
                for _ in 0..e {
                    c *= coeffs[i].clone();
                }
            }
        }
        p.add_term(m, c);
    }
    if !p.is_zero() {
        p.homogeneous_degree = Some(d);
    }
    p
}

/// Expansion of `(c_0 + c_1 x_1 + ... + c_n x_n)^d` in `n` variables.
pub fn power_of_affine_form(constant: &BigRational, coeffs: &[BigRational], d: u32) -> Polynomial {
    let mut full = vec![constant.clone()];
    full.extend_from_slice(coeffs);
    let homog = power_of_linear_form(&full, d);
    let n = coeffs.len();
    let mut p = Polynomial::zero(n);
    for (m, c) in &homog.terms {
        p.add_term(MultiIndex(m.0[1..].to_vec()), c.clone());
    }
    p
}

/// Invertible linear change of variables on `n` variables (substitution
/// `x_i ↦ Σ_j m_ij x_j`).
#[derive(Debug, Clone)]
pub struct LinearChange {
    matrix: QMatrix,
}

impl LinearChange {
    pub fn new(matrix: QMatrix) -> Result<Self> {
        assert_eq!(matrix.nrows(), matrix.ncols());
        if matrix.det().is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(LinearChange { matrix })
    }

    pub fn identity(n: usize) -> Self {
        LinearChange {
            matrix: QMatrix::identity(n),
        }
    }

    pub fn nvars(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> LinearChange {
        LinearChange {
            matrix: self.matrix.inverse().expect("invertible by construction"),
        }
    }
}

/// Substitute `x_i ↦ Σ_j T_ij x_j` into `F` and recollect.
pub fn apply_change(f: &Polynomial, t: &LinearChange) -> Result<Polynomial> {
    if t.nvars() != f.nvars {
        return Err(Error::DimensionMismatch {
            expected: f.nvars,
            got: t.nvars(),
        });
    }
    let rows: Vec<Vec<BigRational>> = (0..f.nvars).map(|i| t.matrix.row(i).to_vec()).collect();
    let mut acc = Polynomial::zero(f.nvars);
    for (m, c) in &f.terms {
        let mut term = Polynomial::constant(f.nvars, c.clone());
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                term = term.mul(&power_of_linear_form(&rows[i], e));
            }
        }
        acc = acc.add(&term);
    }
    acc.homogeneous_degree = f.homogeneous_degree;
    debug_assert!(acc.homogeneous_degree.is_none() || acc.is_homogeneous() || acc.is_zero());
    Ok(acc)
}

impl fmt::Display for Polynomial {
    /// Renders with variables `x0, x1, ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_const = m.degree() == 0;
            if !mag.is_one() || is_const {
                write!(f, "{mag}")?;
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut firstv = true;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !firstv {
                    write!(f, "*")?;
                }
                firstv = false;
                write!(f, "x{i}")?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}
