//! Randomized invariants: the pairing identity against point evaluation, the
//! rank chain across the three modes, agreement with the binary-form oracle,
//! and exact recovery of planted power sums.

use apolar::binary::binary_waring_rank;
use apolar::decompose::{cactus, tangential, verify, waring, DriveOutcome};
use apolar::moments::{build_moment_table, square_block_rank};
use apolar::polyring::{
    apolar_product, binomial, dehomogenize, monomials_of_degree, power_of_linear_form,
};
use apolar::{Config, Polynomial};
use num_rational::BigRational;
use proptest::prelude::*;

fn qi(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// A random homogeneous polynomial with small rational coefficients, `None`
/// when every drawn coefficient is zero.
fn dense_form(nvars: usize, d: u32, coeffs: &[(i64, i64)]) -> Option<Polynomial> {
    let monos = monomials_of_degree(nvars, d);
    let terms: Vec<_> = monos
        .into_iter()
        .zip(coeffs)
        .filter(|(_, (num, _))| *num != 0)
        .map(|(m, (num, den))| (m, q(*num, *den)))
        .collect();
    if terms.is_empty() {
        return None;
    }
    let p = Polynomial::from_terms(nvars, terms).unwrap();
    Some(p.tag_homogeneous().unwrap())
}

/// Σ wᵢ Lᵢ^d for planted integer data.
fn planted_sum(forms: &[Vec<i64>], weights: &[i64], d: u32) -> Polynomial {
    let mut acc = Polynomial::zero(forms[0].len());
    for (l, w) in forms.iter().zip(weights) {
        let c: Vec<BigRational> = l.iter().map(|&v| qi(v)).collect();
        acc = acc.add(&power_of_linear_form(&c, d).scale(&qi(*w)));
    }
    acc
}

/// Coefficient strategy: a numerator and a positive denominator.
fn coeff() -> impl Strategy<Value = (i64, i64)> {
    (-9i64..=9, 1i64..=3)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 100,
        max_shrink_iters: 32,
        failure_persistence: None,
        .. ProptestConfig::default()
    })]

    /// Pairing a form with the d-th power of a linear form evaluates the
    /// form at the point of coefficients, exactly.
    #[test]
    fn pairing_against_a_power_is_point_evaluation(
        nvars in 2usize..=4,
        d in 1u32..=6,
        point in proptest::collection::vec((-6i64..=6, 1i64..=4), 4),
        raw in proptest::collection::vec(coeff(), 220),
    ) {
        let l: Vec<BigRational> = point[..nvars].iter().map(|&(n, den)| q(n, den)).collect();
        let f = match dense_form(nvars, d, &raw) {
            Some(f) => f,
            None => return Ok(()),
        };
        let power = power_of_linear_form(&l, d);
        let lhs = apolar_product(&f, &power, d).unwrap();
        prop_assert_eq!(lhs, f.eval_at_point(&l));
        // the pairing is symmetric
        prop_assert_eq!(
            apolar_product(&f, &power, d).unwrap(),
            apolar_product(&power, &f, d).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 20,
        max_shrink_iters: 8,
        failure_persistence: None,
        .. ProptestConfig::default()
    })]

    /// On one input the three modes respect
    /// square block ≤ cactus ≤ tangential ≤ power-sum rank.
    #[test]
    fn rank_chain_across_modes(
        d in 2u32..=4,
        r in 1usize..=3,
        raw_forms in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 3), 3),
        raw_weights in proptest::collection::vec(1i64..=3, 3),
    ) {
        let mut forms: Vec<Vec<i64>> = raw_forms[..r].to_vec();
        for f in &mut forms {
            if f.iter().all(|&c| c == 0) {
                f[0] = 1;
            }
        }
        forms.dedup();
        let weights = &raw_weights[..forms.len()];
        let f = planted_sum(&forms, weights, d);
        prop_assume!(!f.is_zero());
        let tagged = f.clone().tag_homogeneous().unwrap();
        let table = build_moment_table(&dehomogenize(&tagged).unwrap(), d).unwrap();
        let sbr = square_block_rank(&table);

        let config = Config::default();
        let modes: Vec<usize> = [cactus(&f, &config, 7), tangential(&f, &config, 7), waring(&f, &config, 7)]
            .into_iter()
            .map(|out| match out.unwrap() {
                DriveOutcome::Success(rep) => rep.rank,
                DriveOutcome::Failure(fail) => panic!("driver failed on a planted sum: {}", fail.reason),
            })
            .collect();
        let (c, t, w) = (modes[0], modes[1], modes[2]);
        prop_assert!(sbr <= c, "square block {sbr} above cactus rank {c}");
        prop_assert!(c <= t, "cactus rank {c} above tangential rank {t}");
        prop_assert!(t <= w, "tangential rank {t} above power-sum rank {w}");
        prop_assert!(w <= forms.len(), "rank {w} above the planted witness {}", forms.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 50,
        max_shrink_iters: 16,
        failure_persistence: None,
        .. ProptestConfig::default()
    })]

    /// The full pipeline agrees with the binary kernel oracle.
    #[test]
    fn binary_rank_matches_the_sylvester_oracle(
        d in 2u32..=8,
        raw in proptest::collection::vec(-9i64..=9, 9),
    ) {
        let monos = monomials_of_degree(2, d);
        let terms: Vec<_> = monos
            .into_iter()
            .zip(&raw)
            .filter(|(_, &c)| c != 0)
            .map(|(m, &c)| (m, qi(c)))
            .collect();
        prop_assume!(!terms.is_empty());
        let f = Polynomial::from_terms(2, terms)
            .unwrap()
            .tag_homogeneous()
            .unwrap();
        let oracle = binary_waring_rank(&f).unwrap() as usize;
        match waring(&f, &Config::default(), 3).unwrap() {
            DriveOutcome::Success(rep) => {
                prop_assert_eq!(rep.rank, oracle, "pipeline {} vs oracle {}", rep.rank, oracle);
                prop_assert!(rep.residual <= 1e-8);
            }
            DriveOutcome::Failure(fail) => {
                return Err(TestCaseError::fail(format!(
                    "pipeline failed where the oracle gives {oracle}: {}",
                    fail.reason
                )));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 24,
        max_shrink_iters: 8,
        failure_persistence: None,
        .. ProptestConfig::default()
    })]

    /// Planted generic power sums come back with the exact rank and the
    /// planted forms, up to order, when the middle catalecticant certifies
    /// the count.
    #[test]
    fn planted_power_sums_are_recovered(
        nvars in 2usize..=3,
        d in 3u32..=6,
        r in 1usize..=5,
        raw_forms in proptest::collection::vec(proptest::collection::vec(-4i64..=4, 3), 5),
        raw_weights in proptest::collection::vec(-5i64..=5, 5),
    ) {
        let nv = nvars - 1;
        let cap = binomial(nv as u32 + d.div_ceil(2), nv as u32);
        let r = r.min(usize::try_from(cap.to_integer()).unwrap_or(1)).max(1);

        let mut forms: Vec<Vec<i64>> = raw_forms[..r]
            .iter()
            .map(|row| {
                let mut v = vec![1i64];
                v.extend_from_slice(&row[..nv]);
                v
            })
            .collect();
        forms.sort();
        forms.dedup();
        let weights: Vec<i64> = raw_weights[..forms.len()]
            .iter()
            .map(|&w| if w == 0 { 1 } else { w })
            .collect();
        let f = planted_sum(&forms, &weights, d).tag_homogeneous().unwrap();
        let table = build_moment_table(&dehomogenize(&f).unwrap(), d).unwrap();
        // the planted count is the true rank exactly when the middle
        // catalecticant already certifies it from below
        prop_assume!(square_block_rank(&table) == forms.len());

        let report = match waring(&f, &Config::default(), 11).unwrap() {
            DriveOutcome::Success(rep) => rep,
            DriveOutcome::Failure(fail) => {
                return Err(TestCaseError::fail(format!(
                    "pipeline failed on a certified planted sum: {}",
                    fail.reason
                )));
            }
        };
        prop_assert_eq!(report.rank, forms.len());
        prop_assert!(report.residual <= 1e-8, "residual {}", report.residual);
        prop_assert!(verify(&report, &f).unwrap() <= 1e-8);

        // every planted form appears among the reported points (both sides
        // are normalized to leading coordinate one)
        let mut used = vec![false; report.points.len()];
        for l in &forms {
            let mut found = false;
            for (i, p) in report.points.iter().enumerate() {
                if used[i] || p.len() != l.len() {
                    continue;
                }
                let close = p.iter().zip(l).all(|(v, &c)| {
                    let z = v.to_complex();
                    (z.re - c as f64).abs() <= 1e-8 && z.im.abs() <= 1e-8
                });
                if close {
                    used[i] = true;
                    found = true;
                    break;
                }
            }
            prop_assert!(found, "planted form {l:?} missing from the report");
        }
    }
}
