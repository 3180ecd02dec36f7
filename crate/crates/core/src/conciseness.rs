//! Essential variables via the first catalecticant matrix.
//!
//! Row i of the catalecticant lists the coefficients of ∂_i F in the
//! degree-(d−1) monomial basis. Its rank is the number of essential
//! variables; its column space, read as linear forms in the original
//! variables, spans the essential ones. Reduction rewrites F in a seeded
//! random invertible mix of that space so downstream genericity assumptions
//! hold, and records the change of coordinates for exact pullback.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{qi, QMatrix};
use crate::polyring::{
    apply_change, monomials_of_degree, LinearChange, MultiIndex, Polynomial,
};

/// First catalecticant: one row per variable, one column per degree-(d−1)
/// monomial.
#[derive(Debug, Clone)]
pub struct Catalecticant {
    pub matrix: QMatrix,
    pub col_monomials: Vec<MultiIndex>,
}

pub fn catalecticant(f: &Polynomial) -> Result<Catalecticant> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = f
        .homogeneous_degree()
        .ok_or_else(|| Error::NotHomogeneous("degree tag absent".into()))?;
    if d == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let n = f.nvars();
    let cols = monomials_of_degree(n, d - 1);
    let matrix = QMatrix::from_fn(n, cols.len(), |i, j| {
        // coefficient of monomial j in ∂_i F equals f_{α+e_i}·(α_i + 1)
        let mut up = cols[j].clone();
        up.0[i] += 1;
        f.coefficient(&up) * qi(i64::from(cols[j].0[i]) + 1)
    });
    Ok(Catalecticant {
        matrix,
        col_monomials: cols,
    })
}

/// Number of essential variables: the catalecticant rank, exactly.
pub fn essential_count(f: &Polynomial) -> Result<usize> {
    Ok(catalecticant(f)?.matrix.rank())
}

/// Result of rewriting F in a general set of essential variables.
#[derive(Debug, Clone)]
pub struct EssentialReduction {
    /// F in the new coordinates, using only the first `essential` variables
    /// (and truncated to that many).
    pub polynomial: Polynomial,
    /// The full change S with `reduced(S·x) = F(x)`; its first `essential`
    /// rows are the mixed essential forms.
    pub change: LinearChange,
    /// Basis of the essential space before mixing (rows of coefficient
    /// vectors over the original variables).
    pub essential_basis: Vec<Vec<BigRational>>,
    pub essential: usize,
    pub seed: u64,
}

impl EssentialReduction {
    /// Pull a linear form on the reduced variables back to the original
    /// ones: coefficients Sᵀ·(k padded with zeros).
    pub fn pull_back_linear(&self, coeffs: &[BigRational]) -> Vec<BigRational> {
        let n = self.change.nvars();
        let mut padded = coeffs.to_vec();
        padded.resize(n, BigRational::zero());
        self.change.matrix().transpose().mul_vec(&padded)
    }
}

/// Scale a rational vector to coprime integers.
fn primitive_integer_vector(row: &[BigRational]) -> Vec<BigRational> {
    let mut denom_lcm = BigInt::one();
    for q in row {
        denom_lcm = denom_lcm.lcm(q.denom());
    }
    let scaled = BigRational::from_integer(denom_lcm);
    let ints: Vec<BigInt> = row.iter().map(|q| (q * &scaled).to_integer()).collect();
    let mut content = BigInt::zero();
    for v in &ints {
        content = content.gcd(v);
    }
    if content.is_zero() {
        return row.to_vec();
    }
    ints.into_iter()
        .map(|v| BigRational::from_integer(v / &content))
        .collect()
}

/// Rewrite F in m = essential_count(F) fresh coordinates: a seeded random
/// invertible integer mix of a column basis of the catalecticant, completed
/// to an invertible change of all variables.
pub fn reduce_to_essential(f: &Polynomial, seed: u64, mix_box: i64) -> Result<EssentialReduction> {
    let cat = catalecticant(f)?;
    let n = f.nvars();
    // row-reducing the transpose gives a basis of the column space with
    // small canonical entries, which keeps the mixed coordinates and all
    // numerics downstream tame
    let (rt, _) = cat.matrix.transpose().rref();
    let mut basis: Vec<Vec<BigRational>> = Vec::new();
    for i in 0..rt.nrows() {
        let row = rt.row(i).to_vec();
        if row.iter().any(|q| !q.is_zero()) {
            basis.push(primitive_integer_vector(&row));
        }
    }
    let m = basis.len();
    debug_assert_eq!(m, cat.matrix.rank());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mix = loop {
        let cand = QMatrix::from_fn(m, m, |_, _| qi(rng.gen_range(-mix_box..=mix_box)));
        if !cand.det().is_zero() {
            break cand;
        }
    };
    let basis_mat = QMatrix::from_rows(basis.clone());
    let mixed = mix.mul(&basis_mat); // m × n, rows = general essential forms

    // complete to an invertible n × n matrix with unit rows
    let mut rows: Vec<Vec<BigRational>> = (0..m).map(|i| mixed.row(i).to_vec()).collect();
    for j in 0..n {
        if rows.len() == n {
            break;
        }
        let mut unit = vec![BigRational::zero(); n];
        unit[j] = BigRational::from_integer(1.into());
        rows.push(unit);
        if QMatrix::from_rows(rows.clone()).rank() < rows.len() {
            rows.pop();
        }
    }
    let s = QMatrix::from_rows(rows);
    debug_assert_eq!(s.rank(), n);
    let change = LinearChange::new(s)?;

    // G(t) := F(S⁻¹ t) uses only the first m coordinates
    let g_full = apply_change(f, &change.inverse())?;
    let mut g = Polynomial::zero(m);
    let mut truncated = Polynomial::zero(m);
    for (mono, c) in g_full.terms() {
        if mono.0[m..].iter().all(|&e| e == 0) {
            truncated = truncated.add(&Polynomial::from_terms(
                m,
                vec![(MultiIndex(mono.0[..m].to_vec()), c.clone())],
            )?);
        } else {
            // cannot happen when the basis really spans the derivative space
            return Err(Error::InvalidInput(format!(
                "reduction left a term in a non-essential variable: {mono}"
            )));
        }
    }
    std::mem::swap(&mut g, &mut truncated);
    let g = g.tag_homogeneous()?;

    Ok(EssentialReduction {
        polynomial: g,
        change,
        essential_basis: basis,
        essential: m,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use crate::polyring::power_of_linear_form;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex(e.to_vec())
    }

    /// (x+y+z)³ − x³, essentially binary.
    fn almost_cube() -> Polynomial {
        power_of_linear_form(&[qi(1), qi(1), qi(1)], 3)
            .sub(&power_of_linear_form(&[qi(1), qi(0), qi(0)], 3))
            .tag_homogeneous()
            .unwrap()
    }

    /// xu³ + yuv² + zu²v in variables (x, y, z, u, v): five essential
    /// variables but identically zero Hessian determinant.
    fn perazzo() -> Polynomial {
        Polynomial::from_terms(
            5,
            vec![
                (mi(&[1, 0, 0, 3, 0]), qi(1)),
                (mi(&[0, 1, 0, 1, 2]), qi(1)),
                (mi(&[0, 0, 1, 2, 1]), qi(1)),
            ],
        )
        .unwrap()
        .tag_homogeneous()
        .unwrap()
    }

    #[test]
    fn catalecticant_of_square() {
        // F = x0² in two variables: rows (2,0,0) and (0,0,0) over {x0², x0x1, x1²}
        let f = Polynomial::from_terms(2, vec![(mi(&[2, 0]), qi(1))])
            .unwrap()
            .tag_homogeneous()
            .unwrap();
        let c = catalecticant(&f).unwrap();
        assert_eq!(c.matrix.nrows(), 2);
        assert_eq!(c.matrix.ncols(), 2);
        assert_eq!(c.matrix[(0, 0)], qi(2));
        assert!(c.matrix.row(1).iter().all(Zero::is_zero));
        assert_eq!(essential_count(&f).unwrap(), 1);
    }

    #[test]
    fn essential_counts() {
        assert_eq!(essential_count(&almost_cube()).unwrap(), 2);
        assert_eq!(essential_count(&perazzo()).unwrap(), 5);
        let power = power_of_linear_form(&[qi(2), qi(-3), qi(5)], 6)
            .tag_homogeneous()
            .unwrap();
        assert_eq!(essential_count(&power).unwrap(), 1);
    }

    #[test]
    fn essential_count_is_change_invariant() {
        let f = almost_cube();
        let t = LinearChange::new(QMatrix::from_i64(3, 3, &[1, 2, 0, 0, 1, 5, 1, 0, 1])).unwrap();
        let g = apply_change(&f, &t).unwrap();
        assert_eq!(essential_count(&f).unwrap(), essential_count(&g).unwrap());
    }

    #[test]
    fn reduction_reaches_conciseness_and_pulls_back() {
        let f = almost_cube();
        let red = reduce_to_essential(&f, 7, 20).unwrap();
        assert_eq!(red.essential, 2);
        assert_eq!(red.polynomial.nvars(), 2);
        assert_eq!(essential_count(&red.polynomial).unwrap(), 2);

        // expanding G(S·x) reproduces F exactly
        let n = f.nvars();
        let mut padded = Polynomial::zero(n);
        for (mono, c) in red.polynomial.terms() {
            let mut e = mono.0.clone();
            e.resize(n, 0);
            padded = padded.add(&Polynomial::from_terms(n, vec![(MultiIndex(e), c.clone())]).unwrap());
        }
        let back = apply_change(&padded, &red.change).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn reduction_of_concise_input_keeps_all_variables() {
        let f = Polynomial::from_terms(
            2,
            vec![(mi(&[3, 0]), qi(1)), (mi(&[0, 3]), q(2, 3))],
        )
        .unwrap()
        .tag_homogeneous()
        .unwrap();
        let red = reduce_to_essential(&f, 3, 20).unwrap();
        assert_eq!(red.essential, 2);
        assert_eq!(essential_count(&red.polynomial).unwrap(), 2);
    }

    #[test]
    fn pull_back_linear_matches_change() {
        let f = almost_cube();
        let red = reduce_to_essential(&f, 11, 20).unwrap();
        // pulled-back form of t_0 must equal row 0 of S
        let k = vec![qi(1), qi(0)];
        let back = red.pull_back_linear(&k);
        assert_eq!(back, red.change.matrix().row(0).to_vec());
    }

    #[test]
    fn perazzo_hessian_vanishes() {
        // symbolic Hessian determinant over the polynomial ring
        let f = perazzo();
        let n = f.nvars();
        let second: Vec<Vec<Polynomial>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        f.partial_derivative(i)
                            .unwrap()
                            .partial_derivative(j)
                            .unwrap()
                    })
                    .collect()
            })
            .collect();
        // cofactor expansion over the first row, exact polynomial arithmetic
        fn det(m: &[Vec<Polynomial>], nvars: usize) -> Polynomial {
            let k = m.len();
            if k == 1 {
                return m[0][0].clone();
            }
            let mut acc = Polynomial::zero(nvars);
            for j in 0..k {
                let minor: Vec<Vec<Polynomial>> = (1..k)
                    .map(|i| {
                        (0..k)
                            .filter(|&c| c != j)
                            .map(|c| m[i][c].clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][j].mul(&det(&minor, nvars));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
        assert!(det(&second, n).is_zero());
    }
}
