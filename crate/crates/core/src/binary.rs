//! Exact Waring rank of binary forms, used as an independent oracle.
//!
//! For F = Σ aₖ x^{d−k} y^k the normalized coefficients cₖ = aₖ/C(d,k)
//! fill a Hankel matrix whose kernel at the smallest size e determines the
//! rank: e if the kernel contains a square-free binary form, d − e + 2
//! otherwise. The apolar ideal of a binary form is a complete intersection,
//! so the kernel at the minimal e has dimension 1 unless the two generator
//! degrees coincide, in which case both candidate ranks agree.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact::QMatrix;
use crate::polyring::{binomial, MultiIndex, Polynomial};
use crate::roots::{poly_degree, poly_derivative, poly_gcd, poly_is_zero};

/// Whether the binary form Σ gⱼ x^{e−j} y^j has no repeated linear factor.
///
/// `coeffs` lists g₀..g_e. The x-multiplicity is e minus the top nonzero
/// index; every other repeated factor shows up in gcd(p, p′) for the
/// dehomogenized p(t) = Σ gⱼ tʲ.
pub fn is_squarefree_binary(coeffs: &[BigRational]) -> bool {
    if poly_is_zero(coeffs) {
        return false;
    }
    let e = coeffs.len() - 1;
    let deg = poly_degree(coeffs).unwrap_or(0);
    if e - deg > 1 {
        return false;
    }
    let g = poly_gcd(coeffs, &poly_derivative(coeffs));
    poly_degree(&g) == Some(0)
}

/// Exact Waring rank of a nonzero homogeneous binary form.
pub fn binary_waring_rank(f: &Polynomial) -> Result<u32> {
    if f.nvars() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: f.nvars(),
        });
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = f
        .homogeneous_degree()
        .ok_or_else(|| Error::NotHomogeneous("degree tag absent".into()))?;
    if d == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let du = d as usize;
    let c: Vec<BigRational> = (0..=du)
        .map(|k| {
            f.coefficient(&MultiIndex(vec![d - k as u32, k as u32]))
                / BigRational::from_integer(binomial(d, k as u32))
        })
        .collect();

    for e in 1..=(du / 2 + 1) {
        let h = QMatrix::from_fn(du - e + 1, e + 1, |i, j| c[i + j].clone());
        let kernel = h.nullspace();
        if kernel.is_empty() {
            continue;
        }
        // a 2-dimensional kernel forces e = d − e + 2, so both cases agree
        let rank = if kernel.len() > 1 || is_squarefree_binary(&kernel[0]) {
            e
        } else {
            du - e + 2
        };
        return Ok(rank as u32);
    }
    // the kernel is nonzero once e + 1 exceeds d − e + 1
    unreachable!("Hankel kernel appears by e = d/2 + 1");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qi;
    use crate::polyring::power_of_linear_form;

    fn form(terms: &[(u32, u32, i64)]) -> Polynomial {
        Polynomial::from_terms(
            2,
            terms
                .iter()
                .map(|&(a, b, c)| (MultiIndex(vec![a, b]), qi(c)))
                .collect::<Vec<_>>(),
        )
        .unwrap()
        .tag_homogeneous()
        .unwrap()
    }

    #[test]
    fn squarefree_detection() {
        // x² + y² yes; x²y no (as (1,0,0) padded: x² in e=2 has x-mult 2)
        assert!(is_squarefree_binary(&[qi(1), qi(0), qi(1)]));
        assert!(!is_squarefree_binary(&[qi(1), qi(0), qi(0)]));
        // xy: coefficients (0,1,0) over x², xy, y²  → mult 1 each
        assert!(is_squarefree_binary(&[qi(0), qi(1), qi(0)]));
        // (x + y)² = x² + 2xy + y²
        assert!(!is_squarefree_binary(&[qi(1), qi(2), qi(1)]));
        assert!(!is_squarefree_binary(&[qi(0), qi(0), qi(0)]));
    }

    #[test]
    fn rank_of_pure_powers() {
        for d in 1..=7 {
            let f = power_of_linear_form(&[qi(2), qi(-3)], d)
                .tag_homogeneous()
                .unwrap();
            assert_eq!(binary_waring_rank(&f).unwrap(), 1, "degree {d}");
        }
    }

    #[test]
    fn rank_of_tangential_monomials() {
        // x^{d−1}y needs d powers
        for d in 3..=6 {
            let f = form(&[(d - 1, 1, 1)]);
            assert_eq!(binary_waring_rank(&f).unwrap(), d);
        }
    }

    #[test]
    fn rank_of_balanced_monomials() {
        // x^a y^b with a, b ≥ 1 has rank max(a, b) + 1
        assert_eq!(binary_waring_rank(&form(&[(1, 1, 1)])).unwrap(), 2);
        assert_eq!(binary_waring_rank(&form(&[(2, 2, 1)])).unwrap(), 3);
        assert_eq!(binary_waring_rank(&form(&[(2, 3, 1)])).unwrap(), 4);
        assert_eq!(binary_waring_rank(&form(&[(3, 3, 1)])).unwrap(), 4);
    }

    #[test]
    fn rank_of_power_sums() {
        let f = form(&[(3, 0, 1), (0, 3, 1)]);
        assert_eq!(binary_waring_rank(&f).unwrap(), 2);

        let g = power_of_linear_form(&[qi(1), qi(0)], 5)
            .add(&power_of_linear_form(&[qi(1), qi(1)], 5))
            .add(&power_of_linear_form(&[qi(1), qi(-1)], 5))
            .tag_homogeneous()
            .unwrap();
        assert_eq!(binary_waring_rank(&g).unwrap(), 3);
    }

    #[test]
    fn rank_is_scale_invariant() {
        let f = form(&[(3, 1, 5), (1, 3, -7), (2, 2, 2)]);
        let g = f.scale(&crate::exact::q(-3, 11)).tag_homogeneous().unwrap();
        assert_eq!(
            binary_waring_rank(&f).unwrap(),
            binary_waring_rank(&g).unwrap()
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        let ternary = Polynomial::from_terms(3, vec![(MultiIndex(vec![1, 1, 1]), qi(1))])
            .unwrap()
            .tag_homogeneous()
            .unwrap();
        assert!(matches!(
            binary_waring_rank(&ternary),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            binary_waring_rank(&Polynomial::zero(2)),
            Err(Error::ZeroPolynomial)
        ));
    }
}
