//! Characteristic polynomials, square-free decomposition, and root finding.
//!
//! Rational matrices get an exact characteristic polynomial and an exact
//! square-free (Yun) decomposition, so eigenvalue multiplicities are known
//! before any floating-point work; Aberth iteration then only ever sees
//! simple roots. Float matrices go through the same Aberth iteration on the
//! numeric characteristic polynomial as a fallback when Schur stalls.
//!
//! Univariate polynomials are coefficient vectors indexed by power.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::exact::QMatrix;
use crate::numeric::CMatrix;

// ---------------------------------------------------------------------------
// univariate exact polynomials
// ---------------------------------------------------------------------------

pub fn poly_trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub fn poly_degree(p: &[BigRational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn poly_is_zero(p: &[BigRational]) -> bool {
    poly_degree(p).is_none()
}

pub fn poly_derivative(p: &[BigRational]) -> Vec<BigRational> {
    let mut d: Vec<BigRational> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from(BigInt::from(i)))
        .collect();
    poly_trim(&mut d);
    d
}

pub fn poly_monic(p: &[BigRational]) -> Vec<BigRational> {
    let Some(d) = poly_degree(p) else {
        return Vec::new();
    };
    let lead = p[d].clone();
    let mut out: Vec<BigRational> = p[..=d].iter().map(|c| c / &lead).collect();
    poly_trim(&mut out);
    out
}

pub fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if poly_is_zero(a) || poly_is_zero(b) {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if !cb.is_zero() {
                out[i + j] += ca * cb;
            }
        }
    }
    poly_trim(&mut out);
    out
}

/// Quotient and remainder of `a / b`; panics on zero divisor.
pub fn poly_div_rem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let db = poly_degree(b).expect("division by the zero polynomial");
    let mut rem: Vec<BigRational> = a.to_vec();
    poly_trim(&mut rem);
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    let lead = b[db].clone();
    while let Some(dr) = poly_degree(&rem) {
        if dr < db {
            break;
        }
        let factor = &rem[dr] / &lead;
        let shift = dr - db;
        quot[shift] = factor.clone();
        for i in 0..=db {
            let v = &rem[shift + i] - &factor * &b[i];
            rem[shift + i] = v;
        }
        poly_trim(&mut rem);
    }
    poly_trim(&mut quot);
    (quot, rem)
}

/// Exact division; panics if the remainder is nonzero.
pub fn poly_div_exact(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let (q, r) = poly_div_rem(a, b);
    assert!(poly_is_zero(&r), "inexact polynomial division");
    q
}

/// Monic greatest common divisor by the Euclidean algorithm.
pub fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut x = poly_monic(a);
    let mut y = poly_monic(b);
    while !poly_is_zero(&y) {
        let (_, r) = poly_div_rem(&x, &y);
        x = y;
        y = poly_monic(&r);
    }
    poly_monic(&x)
}

/// Yun square-free decomposition of a monic polynomial: returns pairs
/// `(factor, multiplicity)` with `p = Π factor^multiplicity`, factors
/// square-free and pairwise coprime.
pub fn squarefree_decomposition(p: &[BigRational]) -> Vec<(Vec<BigRational>, usize)> {
    let p = poly_monic(p);
    let Some(d) = poly_degree(&p) else {
        return Vec::new();
    };
    if d == 0 {
        return Vec::new();
    }
    let dp = poly_derivative(&p);
    let g = poly_gcd(&p, &dp);
    if poly_degree(&g) == Some(0) || poly_is_zero(&g) {
        return vec![(p, 1)];
    }
    let mut out = Vec::new();
    let mut c = poly_div_exact(&p, &g);
    let mut w = {
        let dq = poly_div_exact(&dp, &g);
        poly_sub(&dq, &poly_derivative(&c))
    };
    let mut i = 1;
    while poly_degree(&c).unwrap_or(0) > 0 {
        let f = poly_gcd(&c, &w);
        if poly_degree(&f).unwrap_or(0) > 0 {
            out.push((f.clone(), i));
        }
        c = poly_div_exact(&c, &f);
        let dq = poly_div_exact(&w, &f);
        w = poly_sub(&dq, &poly_derivative(&c));
        i += 1;
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    poly_trim(&mut out);
    out
}

// ---------------------------------------------------------------------------
// characteristic polynomials
// ---------------------------------------------------------------------------

/// Exact monic characteristic polynomial, coefficients by ascending power.
pub fn charpoly_rational(a: &QMatrix) -> Vec<BigRational> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = QMatrix::identity(n);
    for k in 1..=n {
        let am = a.mul(&m);
        let tr: BigRational = (0..n).map(|i| am[(i, i)].clone()).sum();
        let c = -tr / BigRational::from(BigInt::from(k));
        coeffs[n - k] = c.clone();
        m = am;
        for i in 0..n {
            m[(i, i)] += c.clone();
        }
    }
    coeffs
}

/// Characteristic polynomial of a complex matrix by the same recursion.
pub fn charpoly_complex(a: &CMatrix) -> Vec<Complex64> {
    let n = a.nrows();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut m = CMatrix::identity(n, n);
    for k in 1..=n {
        let am = a * &m;
        let tr: Complex64 = (0..n).map(|i| am[(i, i)]).sum();
        let c = -tr / k as f64;
        coeffs[n - k] = c;
        m = am;
        for i in 0..n {
            m[(i, i)] += c;
        }
    }
    coeffs
}

// ---------------------------------------------------------------------------
// numeric roots
// ---------------------------------------------------------------------------

/// All complex roots of a polynomial with complex coefficients (ascending
/// powers) by Aberth–Ehrlich iteration; zero roots are split off exactly.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|z| z.norm() == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut zero_roots = 0;
    while c.first().is_some_and(|z| z.norm() == 0.0) {
        c.remove(0);
        zero_roots += 1;
    }
    let mut roots = vec![Complex64::new(0.0, 0.0); zero_roots];
    let n = c.len() - 1;
    if n == 0 {
        return roots;
    }
    if n == 1 {
        roots.push(-c[0] / c[1]);
        return roots;
    }

    let lead = c[n];
    let radius = 1.0
        + c[..n]
            .iter()
            .map(|z| (z / lead).norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.35) / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &ck in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + ck;
        }
        (p, dp)
    };

    for _ in 0..500 {
        let mut max_step = 0.0f64;
        let snapshot = z.clone();
        for j in 0..n {
            let (p, dp) = eval(z[j]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = if dp.norm() == 0.0 {
                Complex64::new(1e-12, 1e-12)
            } else {
                p / dp
            };
            let mut s = Complex64::new(0.0, 0.0);
            for (k, zk) in snapshot.iter().enumerate() {
                if k != j {
                    let diff = z[j] - zk;
                    if diff.norm() > 1e-300 {
                        s += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let step = if denom.norm() < 1e-300 { w } else { w / denom };
            z[j] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[j].norm()));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    roots.extend(z);
    roots
}

/// Eigenvalues of an exact rational matrix with their exact algebraic
/// multiplicities.
pub fn eigen_exact(a: &QMatrix) -> Vec<(Complex64, usize)> {
    let cp = charpoly_rational(a);
    let mut out = Vec::new();
    for (factor, mult) in squarefree_decomposition(&cp) {
        let cf: Vec<Complex64> = factor
            .iter()
            .map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0))
            .collect();
        for root in polynomial_roots(&cf) {
            out.push((root, mult));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// rational reconstruction
// ---------------------------------------------------------------------------

/// Continued-fraction reconstruction of a float as a small-denominator
/// rational. Accepts only approximations far better than an irrational
/// number's best convergent at that denominator (error ≲ 1/q²), so genuine
/// irrationals are rejected rather than snapped.
pub fn rationalize(x: f64, denom_cap: u64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let scale = x.abs().max(1.0);
    // convergents p/q of the continued fraction
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
    let mut v = x;
    let cap = BigInt::from(denom_cap);
    let mut best: Option<BigRational> = None;
    for _ in 0..64 {
        let a = v.floor();
        if !a.is_finite() {
            break;
        }
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p0 + &p1;
        let q2 = &ai * &q0 + &q1;
        if q2 > cap {
            break;
        }
        p1 = p0;
        q1 = q0;
        p0 = p2;
        q0 = q2;
        let cand = BigRational::new(p0.clone(), q0.clone());
        let err = (cand.to_f64().unwrap_or(f64::NAN) - x).abs();
        let q = q0.to_f64().unwrap_or(f64::INFINITY);
        if err <= 1e-9 * scale && err <= 0.01 / (q * q) {
            best = Some(cand);
            if err == 0.0 {
                break;
            }
        }
        let frac = v - a;
        if frac.abs() < 1e-18 {
            break;
        }
        v = 1.0 / frac;
    }
    best
}

/// Reconstruction for complex values: the imaginary part must vanish within
/// noise and the real part must reconstruct.
pub fn rationalize_complex(z: Complex64, denom_cap: u64) -> Option<BigRational> {
    if z.im.abs() > 1e-9 * z.norm().max(1.0) {
        return None;
    }
    rationalize(z.re, denom_cap)
}
