//! Decomposition drivers: power sums, tangential pieces, and cactus
//! decompositions with multiplicity structure.
//!
//! The shared pipeline rewrites the input in a random invertible mix of its
//! essential variables, builds the moment table of the dehomogenized dual,
//! and walks candidate staircase bases by increasing size. For each basis
//! the slot solver produces commuting multiplication operators, their joint
//! eigenstructure yields support points with multiplicities, and a final
//! linear system recovers the weights or cofactors. Results are pulled back
//! to the original coordinates, verified against the input, and reported
//! exactly whenever every intermediate quantity rationalizes.

use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::{Config, DegreeCap};
use crate::conciseness::{reduce_to_essential, EssentialReduction};
use crate::cpoly::{apply_change_c, power_of_linear_form_c, CPoly};
use crate::error::{Error, Result};
use crate::exact::QMatrix;
use crate::moments::{build_moment_table, slot_name, square_block_rank, SlotValue};
use crate::numeric::{lstsq, max_abs, CMatrix, CVector};
use crate::paramsolve::{CommutationProblem, Solution, SolveOutcome};
use crate::polyring::{
    apply_change, dehomogenize, monomials_of_degree, monomials_up_to_degree,
    power_of_linear_form, MultiIndex, Polynomial,
};
use crate::roots::rationalize_complex;
use crate::spectral::{joint_eigenspaces, SpectralData};
use crate::staircases::{enumerate, StaircaseBasis};

/// Decomposition flavor requested by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Waring,
    Tangential,
    Cactus,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Waring => write!(f, "waring"),
            Mode::Tangential => write!(f, "tangential"),
            Mode::Cactus => write!(f, "cactus"),
        }
    }
}

/// A scalar that is exact when provably rational and floating otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Real(f64),
    Complex(Complex64),
}

impl Value {
    pub fn from_complex(z: Complex64) -> Value {
        if z.im.abs() <= 1e-9 * (1.0 + z.re.abs()) {
            Value::Real(z.re)
        } else {
            Value::Complex(z)
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Value::Exact(q) => Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0),
            Value::Real(x) => Complex64::new(*x, 0.0),
            Value::Complex(z) => *z,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(q) => Some(q),
            _ => None,
        }
    }

    /// Inverse of the display form: "p/q" or an integer is exact, "a±bi" is
    /// complex, anything else that reads as a float is real.
    pub fn parse(s: &str) -> Option<Value> {
        let t = s.trim();
        if let Ok(q) = t.parse::<BigRational>() {
            return Some(Value::Exact(q));
        }
        if let Some(body) = t.strip_suffix('i') {
            let bytes = body.as_bytes();
            // the imaginary part starts at the last sign that is neither
            // leading nor part of an exponent
            for pos in (1..bytes.len()).rev() {
                let c = bytes[pos] as char;
                if (c == '+' || c == '-') && !matches!(bytes[pos - 1] as char, 'e' | 'E') {
                    let re: f64 = body[..pos].parse().ok()?;
                    let im: f64 = body[pos..].parse().ok()?;
                    return Some(Value::Complex(Complex64::new(re, im)));
                }
            }
            return None;
        }
        t.parse::<f64>().ok().map(Value::Real)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{q}"),
            // debug formatting keeps a decimal point or exponent, so an
            // integral float never reads back as exact
            Value::Real(x) => write!(f, "{x:?}"),
            Value::Complex(z) => {
                if z.im >= 0.0 {
                    write!(f, "{:?}+{:?}i", z.re, z.im)
                } else {
                    write!(f, "{:?}-{:?}i", z.re, -z.im)
                }
            }
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        Value::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("unreadable scalar '{s}'")))
    }
}

/// Cofactor polynomial as exponent-vector/coefficient pairs over the
/// original variables.
pub type CofactorRepr = Vec<(Vec<u32>, Value)>;

/// One summand: weight · form^exponent · cofactor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Term {
    pub weight: Value,
    /// Coefficients of the linear form over the original variables.
    pub form: Vec<Value>,
    pub exponent: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cofactor: Option<CofactorRepr>,
}

/// A verified decomposition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub mode: Mode,
    pub rank: usize,
    pub degree: u32,
    /// Number of original variables.
    pub nvars: usize,
    /// Number of essential variables.
    pub essential: usize,
    pub exact: bool,
    /// Max-abs coefficient residual of input minus reconstruction, relative
    /// to the input scale; exactly zero on the exact path.
    pub residual: f64,
    pub terms: Vec<Term>,
    /// Support points in the original coordinates, scaled so the first
    /// nonzero coordinate is one.
    pub points: Vec<Vec<Value>>,
    pub multiplicities: Vec<usize>,
    /// Power of the linear form attached to each point.
    pub exponents: Vec<u32>,
    /// Scheme exponent per point: the cactus k with form power d − k + 1,
    /// or the chain length in tangential mode. Empty in power-sum mode.
    pub scheme_exponents: Vec<u32>,
    /// Monomial basis of the multiplication algebra, in mixed internal
    /// coordinates t1, t2, ...
    pub basis: Vec<String>,
    /// Values assigned to the unknown moment slots.
    pub params: Vec<(String, Value)>,
    pub seed: u64,
    pub warnings: Vec<String>,
}

/// A search that ended without a decomposition, with the evidence gathered.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionFailure {
    pub mode: Mode,
    pub reason: String,
    pub ranks_tried: Vec<usize>,
    pub attempts: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub best_residual: Option<f64>,
    pub warnings: Vec<String>,
}

/// Driver outcome: a verified report, or an honest failure.
#[derive(Debug, Clone)]
pub enum DriveOutcome {
    Success(DecompositionReport),
    Failure(DecompositionFailure),
}

impl DriveOutcome {
    pub fn report(&self) -> Option<&DecompositionReport> {
        match self {
            DriveOutcome::Success(r) => Some(r),
            DriveOutcome::Failure(_) => None,
        }
    }
}

/// Minimal power-sum decomposition.
pub fn waring(f: &Polynomial, config: &Config, seed: u64) -> Result<DriveOutcome> {
    run(f, Mode::Waring, config, seed)
}

/// Decomposition into powers and tangential pieces λL^d + μL^{d−1}M.
pub fn tangential(f: &Polynomial, config: &Config, seed: u64) -> Result<DriveOutcome> {
    run(f, Mode::Tangential, config, seed)
}

/// Cactus decomposition Σ L_i^{d−k_i+1} N_i with support multiplicities.
pub fn cactus(f: &Polynomial, config: &Config, seed: u64) -> Result<DriveOutcome> {
    run(f, Mode::Cactus, config, seed)
}

fn run(f: &Polynomial, mode: Mode, config: &Config, seed: u64) -> Result<DriveOutcome> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let tagged = f.clone().tag_homogeneous()?;
    let d = tagged.homogeneous_degree().unwrap();
    if d == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    for mix in 0..config.essential_retries.max(1) {
        match pipeline(&tagged, mode, config, seed, u64::from(mix)) {
            Err(Error::DegenerateNormalization) => continue,
            other => return other,
        }
    }
    Err(Error::DegenerateNormalization)
}

fn derive_seed(master: u64, stream: u64, r: usize, bi: usize, attempt: u32) -> u64 {
    let mut x = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    for v in [r as u64, bi as u64, u64::from(attempt)] {
        x = x.wrapping_mul(0x0000_0100_0000_01B3).wrapping_add(v + 1);
        x ^= x >> 31;
    }
    x
}

fn note(warnings: &mut Vec<String>, msg: String) {
    if warnings.len() < 50 && !warnings.iter().any(|w| *w == msg) {
        warnings.push(msg);
    }
}

fn pipeline(
    f: &Polynomial,
    mode: Mode,
    config: &Config,
    seed: u64,
    mix_index: u64,
) -> Result<DriveOutcome> {
    let d = f.homogeneous_degree().unwrap();
    let mix_seed = seed.wrapping_add(mix_index.wrapping_mul(0x9E37_79B9));
    let red = reduce_to_essential(f, mix_seed, config.mix_box)?;
    let m = red.essential;
    if m == 1 {
        return rank_one(f, mode, &red, d, seed);
    }
    let g = dehomogenize(&red.polynomial)?;
    let table = build_moment_table(&g, d)?;
    let nv = m - 1;
    let r0 = square_block_rank(&table).max(1);
    let universe = monomials_up_to_degree(nv, d).len();
    let cap_rank = config.max_rank.unwrap_or(universe);

    let mut warnings: Vec<String> = Vec::new();
    let mut ranks_tried = Vec::new();
    let mut best_res = f64::INFINITY;
    let mut attempts_total = 0u32;

    for r in r0..=cap_rank {
        ranks_tried.push(r);
        let deg_cap = match config.degree_cap {
            DegreeCap::InputDegree => d,
            DegreeCap::Rank => d.max(r as u32),
        };
        let bases = enumerate(nv, r, deg_cap);
        for (bi, basis) in bases.iter().enumerate() {
            let problem = CommutationProblem::new(&table, basis)?;
            for attempt in 0..config.attempts.max(1) {
                attempts_total += 1;
                let outcome =
                    problem.solve(derive_seed(seed, 1, r, bi, attempt), attempt > 0, config)?;
                let sol = match outcome {
                    SolveOutcome::Unsolved {
                        best_residual,
                        definitive,
                        ..
                    } => {
                        if best_residual.is_finite() {
                            best_res = best_res.min(best_residual);
                        }
                        if definitive {
                            break;
                        }
                        continue;
                    }
                    SolveOutcome::Solved(sol) => sol,
                };
                let data = match joint_eigenspaces(
                    &sol.ops,
                    derive_seed(seed, 2, r, bi, attempt),
                    config,
                ) {
                    Ok(x) => x,
                    Err(_) => {
                        note(
                            &mut warnings,
                            format!("rank {r}: eigenvalue refinement failed; retrying"),
                        );
                        continue;
                    }
                };
                let op_scale = sol.ops.iter().map(max_abs).fold(1.0, f64::max);
                if data.residual > config.eig_tol * op_scale {
                    note(
                        &mut warnings,
                        format!("rank {r}: eigenspace residual too large; retrying"),
                    );
                    continue;
                }
                if data
                    .spaces
                    .iter()
                    .any(|s| s.point.iter().any(|z| z.norm() > 1e8))
                {
                    // a support point escaped to infinity in the mixed
                    // chart; remix the essential coordinates
                    return Err(Error::DegenerateNormalization);
                }
                let step = match mode {
                    Mode::Waring => {
                        finalize_waring(f, &red, d, basis, &sol, &data, config, seed, &mut warnings)?
                    }
                    Mode::Tangential => finalize_tangential(
                        f,
                        &red,
                        d,
                        basis,
                        &sol,
                        &data,
                        config,
                        seed,
                        &mut warnings,
                    )?,
                    Mode::Cactus => {
                        finalize_cactus(f, &red, d, basis, &sol, &data, config, seed, &mut warnings)?
                    }
                };
                if let Some(report) = step {
                    return Ok(DriveOutcome::Success(report));
                }
            }
        }
    }
    let reason = if cap_rank < r0 {
        format!(
            "rank cap {cap_rank} is below {r0}, the lower bound certified by the \
             middle catalecticant"
        )
    } else {
        format!("no {mode} decomposition found for ranks {r0}..={cap_rank}")
    };
    Ok(DriveOutcome::Failure(DecompositionFailure {
        mode,
        reason,
        ranks_tried,
        attempts: attempts_total,
        best_residual: best_res.is_finite().then_some(best_res),
        warnings,
    }))
}

/// A form with one essential variable is a single scaled power.
fn rank_one(
    f: &Polynomial,
    mode: Mode,
    red: &EssentialReduction,
    d: u32,
    seed: u64,
) -> Result<DriveOutcome> {
    let c = red.polynomial.coefficient(&MultiIndex(vec![d]));
    let l = red.pull_back_linear(&[BigRational::one()]);
    let (l_norm, scale) = normalize_exact(&l)?;
    let weight = c * qpow(&scale, d);
    let report = DecompositionReport {
        mode,
        rank: 1,
        degree: d,
        nvars: f.nvars(),
        essential: 1,
        exact: true,
        residual: 0.0,
        terms: vec![Term {
            weight: Value::Exact(weight),
            form: values_exact(&l_norm),
            exponent: d,
            cofactor: None,
        }],
        points: vec![values_exact(&l_norm)],
        multiplicities: vec![1],
        exponents: vec![d],
        scheme_exponents: match mode {
            Mode::Waring => vec![],
            Mode::Tangential | Mode::Cactus => vec![1],
        },
        basis: vec!["1".into()],
        params: vec![],
        seed,
        warnings: vec![],
    };
    debug_assert_eq!(verify(&report, f)?, 0.0);
    Ok(DriveOutcome::Success(report))
}

// ---- small shared helpers ----

fn qpow(q: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= q.clone();
    }
    acc
}

fn values_exact(v: &[BigRational]) -> Vec<Value> {
    v.iter().map(|q| Value::Exact(q.clone())).collect()
}

fn values_numeric(v: &[Complex64]) -> Vec<Value> {
    v.iter().map(|z| Value::from_complex(*z)).collect()
}

/// Scale so the first nonzero coordinate is one; returns the scale.
fn normalize_exact(v: &[BigRational]) -> Result<(Vec<BigRational>, BigRational)> {
    let lead = v
        .iter()
        .find(|q| !q.is_zero())
        .ok_or_else(|| Error::InvalidInput("zero linear form".into()))?
        .clone();
    Ok((v.iter().map(|q| q / lead.clone()).collect(), lead))
}

fn normalize_numeric(v: &[Complex64]) -> Result<(Vec<Complex64>, Complex64)> {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lead = *v
        .iter()
        .find(|z| z.norm() > 1e-9 * peak)
        .ok_or_else(|| Error::InvalidInput("zero linear form".into()))?;
    Ok((v.iter().map(|z| z / lead).collect(), lead))
}

fn rationalize_vec(v: &[Complex64], cap: u64) -> Option<Vec<BigRational>> {
    v.iter().map(|z| rationalize_complex(*z, cap)).collect()
}

fn pull_back_numeric(red: &EssentialReduction, k: &[Complex64]) -> Vec<Complex64> {
    let s = red.change.matrix().to_complex();
    let n = s.nrows();
    (0..n)
        .map(|j| {
            (0..k.len())
                .map(|i| s[(i, j)] * k[i])
                .sum::<Complex64>()
        })
        .collect()
}

/// Pull an internal polynomial back to the original variables, exactly.
fn pull_back_poly_exact(red: &EssentialReduction, p: &Polynomial) -> Result<Polynomial> {
    let n = red.change.nvars();
    let mut padded = Polynomial::zero(n);
    for (mono, c) in p.terms() {
        let mut e = mono.0.clone();
        e.resize(n, 0);
        padded = padded.add(&Polynomial::from_terms(n, vec![(MultiIndex(e), c.clone())])?);
    }
    apply_change(&padded, &red.change)
}

fn pull_back_poly_numeric(red: &EssentialReduction, p: &CPoly) -> CPoly {
    let n = red.change.nvars();
    let mut padded = CPoly::zero(n);
    for (mono, c) in &p.terms {
        let mut e = mono.0.clone();
        e.resize(n, 0);
        padded.add_term(MultiIndex(e), *c);
    }
    let s = red.change.matrix().to_complex();
    let rows: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| s[(i, j)]).collect()).collect();
    apply_change_c(&padded, &rows)
}

fn cofactor_exact(p: &Polynomial) -> CofactorRepr {
    p.terms()
        .map(|(mono, c)| (mono.0.clone(), Value::Exact(c.clone())))
        .collect()
}

fn cofactor_numeric(p: &CPoly, drop_tol: f64) -> CofactorRepr {
    let peak = p.max_abs_coeff().max(1e-300);
    p.terms
        .iter()
        .filter(|(_, c)| c.norm() > drop_tol * peak)
        .map(|(mono, c)| (mono.0.clone(), Value::from_complex(*c)))
        .collect()
}

fn basis_labels(basis: &StaircaseBasis) -> Vec<String> {
    basis.monomials.iter().map(monomial_label).collect()
}

fn monomial_label(m: &MultiIndex) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("t{}", i + 1)),
            _ => parts.push(format!("t{}^{}", i + 1, e)),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn params_list(sol: &Solution) -> Vec<(String, Value)> {
    sol.assignment
        .iter()
        .map(|(slot, v)| {
            let value = match v {
                SlotValue::Exact(q) => Value::Exact(q.clone()),
                SlotValue::Numeric(z) => Value::from_complex(*z),
            };
            (slot_name(slot), value)
        })
        .collect()
}

/// Solve Σ xⱼ·colⱼ = target exactly over the degree-d coefficient space.
fn exact_linear_solve(
    cols: &[Polynomial],
    target: &Polynomial,
    d: u32,
    m: usize,
) -> Option<Vec<BigRational>> {
    let rows = monomials_of_degree(m, d);
    let a = QMatrix::from_fn(rows.len(), cols.len(), |i, j| cols[j].coefficient(&rows[i]));
    let rhs: Vec<BigRational> = rows.iter().map(|mi| target.coefficient(mi)).collect();
    a.solve_consistent(&rhs)
}

/// Least squares over the degree-d coefficient space; returns coefficients
/// and the relative residual of the fit. Columns are equilibrated so wildly
/// different column scales cannot starve small contributions.
fn numeric_linear_solve(
    cols: &[CPoly],
    target: &Polynomial,
    d: u32,
    m: usize,
) -> (Vec<Complex64>, f64) {
    let rows = monomials_of_degree(m, d);
    let scales: Vec<f64> = cols
        .iter()
        .map(|c| {
            let s = c.max_abs_coeff();
            if s > 0.0 { s } else { 1.0 }
        })
        .collect();
    let a = CMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        cols[j].terms.get(&rows[i]).copied().unwrap_or_default() / scales[j]
    });
    let b = CVector::from_iterator(
        rows.len(),
        rows.iter()
            .map(|mi| Complex64::new(target.coefficient(mi).to_f64().unwrap_or(f64::NAN), 0.0)),
    );
    let (x, rel) = lstsq(&a, &b, 1e-13);
    (x.iter().enumerate().map(|(j, z)| z / scales[j]).collect(), rel)
}

/// Pull an internal affine support point back to a normalized linear form in
/// the original coordinates.
fn point_form(red: &EssentialReduction, point: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut k = vec![Complex64::new(1.0, 0.0)];
    k.extend(point.iter().copied());
    let l = pull_back_numeric(red, &k);
    Ok(normalize_numeric(&l)?.0)
}

fn linear_form_exact(n: usize, coeffs: &[BigRational]) -> Result<Polynomial> {
    Polynomial::from_terms(
        n,
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (MultiIndex::unit(n, j), c.clone()))
            .collect::<Vec<_>>(),
    )
}

fn linear_form_numeric(n: usize, coeffs: &[Complex64]) -> CPoly {
    let mut p = CPoly::zero(n);
    for (j, c) in coeffs.iter().enumerate() {
        p.add_term(MultiIndex::unit(n, j), *c);
    }
    p
}

/// Residual of a report against the input, relative to the input scale.
/// Exactly zero when an exact report reconstructs the input identically.
pub fn verify(report: &DecompositionReport, f: &Polynomial) -> Result<f64> {
    let tagged = f.clone().tag_homogeneous()?;
    let n = tagged.nvars();
    if n != report.nvars {
        return Err(Error::DimensionMismatch {
            expected: report.nvars,
            got: n,
        });
    }
    let all_exact = report.terms.iter().all(|t| {
        t.weight.exact().is_some()
            && t.form.iter().all(|v| v.exact().is_some())
            && t.cofactor
                .as_ref()
                .map(|c| c.iter().all(|(_, v)| v.exact().is_some()))
                .unwrap_or(true)
    });
    if all_exact {
        let mut total = Polynomial::zero(n);
        for term in &report.terms {
            let coeffs: Vec<BigRational> =
                term.form.iter().map(|v| v.exact().unwrap().clone()).collect();
            let mut piece = power_of_linear_form(&coeffs, term.exponent)
                .scale(term.weight.exact().unwrap());
            if let Some(cof) = &term.cofactor {
                let cof_poly = Polynomial::from_terms(
                    n,
                    cof.iter()
                        .map(|(e, v)| (MultiIndex(e.clone()), v.exact().unwrap().clone()))
                        .collect::<Vec<_>>(),
                )?;
                piece = piece.mul(&cof_poly);
            }
            total = total.add(&piece);
        }
        let diff = total.sub(&tagged);
        if diff.is_zero() {
            return Ok(0.0);
        }
        let scale = tagged.max_abs_coeff_f64().max(1.0);
        return Ok(diff.max_abs_coeff_f64() / scale);
    }
    let mut total = CPoly::zero(n);
    for term in &report.terms {
        let coeffs: Vec<Complex64> = term.form.iter().map(Value::to_complex).collect();
        let mut piece = power_of_linear_form_c(&coeffs, term.exponent);
        piece = piece.scale(term.weight.to_complex());
        if let Some(cof) = &term.cofactor {
            let mut cof_poly = CPoly::zero(n);
            for (e, v) in cof {
                cof_poly.add_term(MultiIndex(e.clone()), v.to_complex());
            }
            piece = piece.mul(&cof_poly);
        }
        total = total.add(&piece);
    }
    let diff = total.sub(&CPoly::from_polynomial(&tagged));
    let scale = tagged.max_abs_coeff_f64().max(1.0);
    Ok(diff.max_abs_coeff() / scale)
}

// ---- mode-specific finishing steps ----

#[allow(clippy::too_many_arguments)]
fn finalize_waring(
    f: &Polynomial,
    red: &EssentialReduction,
    d: u32,
    basis: &StaircaseBasis,
    sol: &Solution,
    data: &SpectralData,
    config: &Config,
    seed: u64,
    warnings: &mut Vec<String>,
) -> Result<Option<DecompositionReport>> {
    let r = basis.size();
    if !data.all_simple() {
        note(
            warnings,
            format!("rank {r}: support scheme is not reduced; retrying"),
        );
        return Ok(None);
    }
    let n = f.nvars();
    // pull the support points back first and fit the powers against the
    // input itself, so the fit residual is measured where it matters
    let forms_c: Vec<Vec<Complex64>> = data
        .spaces
        .iter()
        .map(|s| point_form(red, &s.point))
        .collect::<Result<_>>()?;
    let forms_q: Option<Vec<Vec<BigRational>>> = forms_c
        .iter()
        .map(|v| rationalize_vec(v, config.denom_cap))
        .collect();

    if let Some(fq) = &forms_q {
        let cols: Vec<Polynomial> = fq.iter().map(|l| power_of_linear_form(l, d)).collect();
        if let Some(lambda) = exact_linear_solve(&cols, f, d, n) {
            let mut terms = Vec::new();
            let mut points = Vec::new();
            for (w, l_norm) in lambda.iter().zip(fq) {
                if w.is_zero() {
                    note(warnings, "a power received weight zero and was dropped".into());
                    continue;
                }
                terms.push(Term {
                    weight: Value::Exact(w.clone()),
                    form: values_exact(l_norm),
                    exponent: d,
                    cofactor: None,
                });
                points.push(values_exact(l_norm));
            }
            let rank = terms.len();
            let report = DecompositionReport {
                mode: Mode::Waring,
                rank,
                degree: d,
                nvars: n,
                essential: red.essential,
                exact: true,
                residual: 0.0,
                terms,
                points,
                multiplicities: vec![1; rank],
                exponents: vec![d; rank],
                scheme_exponents: vec![],
                basis: basis_labels(basis),
                params: params_list(sol),
                seed,
                warnings: warnings.clone(),
            };
            let res = verify(&report, f)?;
            if res != 0.0 {
                return Err(Error::InvalidInput(
                    "internal: exact reconstruction mismatch".into(),
                ));
            }
            return Ok(Some(report));
        }
        note(
            warnings,
            format!("rank {r}: exact power-sum fit is inconsistent; trying a numeric fit"),
        );
    }

    let cols: Vec<CPoly> = forms_c
        .iter()
        .map(|l| power_of_linear_form_c(l, d))
        .collect();
    let (lambda, rel) = numeric_linear_solve(&cols, f, d, n);
    if rel > config.verify_tol {
        note(
            warnings,
            format!("rank {r}: power-sum system is inconsistent; retrying"),
        );
        return Ok(None);
    }
    let peak = lambda.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut terms = Vec::new();
    let mut points = Vec::new();
    for (w, l_norm) in lambda.iter().zip(&forms_c) {
        if w.norm() <= 1e-9 * (1.0 + peak) {
            note(warnings, "a power received weight zero and was dropped".into());
            continue;
        }
        terms.push(Term {
            weight: Value::from_complex(*w),
            form: values_numeric(l_norm),
            exponent: d,
            cofactor: None,
        });
        points.push(values_numeric(l_norm));
    }
    let rank = terms.len();
    let mut report = DecompositionReport {
        mode: Mode::Waring,
        rank,
        degree: d,
        nvars: n,
        essential: red.essential,
        exact: false,
        residual: f64::NAN,
        terms,
        points,
        multiplicities: vec![1; rank],
        exponents: vec![d; rank],
        scheme_exponents: vec![],
        basis: basis_labels(basis),
        params: params_list(sol),
        seed,
        warnings: warnings.clone(),
    };
    let res = verify(&report, f)?;
    if res > config.verify_tol {
        note(
            warnings,
            format!("rank {r}: reconstruction residual {res:.2e} above tolerance; retrying"),
        );
        return Ok(None);
    }
    report.residual = res;
    Ok(Some(report))
}

#[allow(clippy::too_many_arguments)]
fn finalize_tangential(
    f: &Polynomial,
    red: &EssentialReduction,
    d: u32,
    basis: &StaircaseBasis,
    sol: &Solution,
    data: &SpectralData,
    config: &Config,
    seed: u64,
    warnings: &mut Vec<String>,
) -> Result<Option<DecompositionReport>> {
    let r = basis.size();
    if data.max_multiplicity() > 2 {
        note(
            warnings,
            format!("rank {r}: a support point has multiplicity above two; retrying"),
        );
        return Ok(None);
    }
    for s in &data.spaces {
        if s.dim == 2 && s.nilindex != 2 {
            note(
                warnings,
                format!("rank {r}: a double point carries no tangent chain; retrying"),
            );
            return Ok(None);
        }
    }
    let n = f.nvars();
    let m = red.essential;
    let nv = m - 1;
    let pos_const = basis
        .index_of(&MultiIndex::zero(nv))
        .ok_or_else(|| Error::InvalidInput("basis without constant element".into()))?;
    let positions: Vec<usize> = (0..nv)
        .map(|k| {
            basis
                .index_of(&MultiIndex::unit(nv, k))
                .ok_or_else(|| Error::InvalidInput("basis without a variable element".into()))
        })
        .collect::<Result<_>>()?;

    // per-space data in the original coordinates: the support form and, for
    // double points, the tangent cofactor read off the chain partner
    let mut forms_c: Vec<Vec<Complex64>> = Vec::new();
    let mut cofs_c: Vec<Option<Vec<Complex64>>> = Vec::new();
    for s in &data.spaces {
        forms_c.push(point_form(red, &s.point)?);
        if s.dim == 2 {
            let w = s.chain_partner()?;
            let mut aff = vec![w[pos_const]];
            for &p in &positions {
                aff.push(w[p]);
            }
            let peak = w.camax();
            if aff.iter().map(|z| z.norm()).fold(0.0, f64::max) <= 1e-10 * peak.max(1.0) {
                note(
                    warnings,
                    format!("rank {r}: chain cofactor is degenerate; retrying"),
                );
                return Ok(None);
            }
            let m_orig = pull_back_numeric(red, &aff);
            cofs_c.push(Some(normalize_numeric(&m_orig)?.0));
        } else {
            cofs_c.push(None);
        }
    }

    let forms_q: Option<Vec<Vec<BigRational>>> = forms_c
        .iter()
        .map(|v| rationalize_vec(v, config.denom_cap))
        .collect();
    let cofs_q: Option<Vec<Option<Vec<BigRational>>>> = cofs_c
        .iter()
        .map(|p| match p {
            None => Some(None),
            Some(v) => rationalize_vec(v, config.denom_cap).map(Some),
        })
        .collect();

    if let (Some(fq), Some(cq)) = (&forms_q, &cofs_q) {
        // exact track: columns L^d and, for chains, L^{d−1}·M
        let mut cols = Vec::new();
        for (l, mc) in fq.iter().zip(cq) {
            cols.push(power_of_linear_form(l, d));
            if let Some(mv) = mc {
                let m_poly = linear_form_exact(n, mv)?;
                cols.push(power_of_linear_form(l, d - 1).mul(&m_poly));
            }
        }
        if let Some(x) = exact_linear_solve(&cols, f, d, n) {
            let report = assemble_tangential_exact(
                f, red.essential, d, basis, sol, data, &x, fq, cq, seed, warnings,
            )?;
            let res = verify(&report, f)?;
            if res != 0.0 {
                return Err(Error::InvalidInput(
                    "internal: exact reconstruction mismatch".into(),
                ));
            }
            return Ok(Some(report));
        }
        note(
            warnings,
            format!("rank {r}: exact tangential fit is inconsistent; trying a numeric fit"),
        );
    }

    // numeric track
    let mut cols = Vec::new();
    for (l, mc) in forms_c.iter().zip(&cofs_c) {
        cols.push(power_of_linear_form_c(l, d));
        if let Some(mv) = mc {
            let m_poly = linear_form_numeric(n, mv);
            cols.push(power_of_linear_form_c(l, d - 1).mul(&m_poly));
        }
    }
    let (x, rel) = numeric_linear_solve(&cols, f, d, n);
    if rel > config.verify_tol {
        note(
            warnings,
            format!("rank {r}: tangential system is inconsistent; retrying"),
        );
        return Ok(None);
    }
    let mut report = assemble_tangential_numeric(
        f, red.essential, d, basis, sol, data, &x, &forms_c, &cofs_c, seed, warnings,
    )?;
    let res = verify(&report, f)?;
    if res > config.verify_tol {
        note(
            warnings,
            format!("rank {r}: reconstruction residual {res:.2e} above tolerance; retrying"),
        );
        return Ok(None);
    }
    report.residual = res;
    Ok(Some(report))
}

#[allow(clippy::too_many_arguments)]
fn assemble_tangential_exact(
    f: &Polynomial,
    essential: usize,
    d: u32,
    basis: &StaircaseBasis,
    sol: &Solution,
    data: &SpectralData,
    x: &[BigRational],
    forms: &[Vec<BigRational>],
    cofs: &[Option<Vec<BigRational>>],
    seed: u64,
    warnings: &mut Vec<String>,
) -> Result<DecompositionReport> {
    let mut terms = Vec::new();
    let mut points = Vec::new();
    let mut multiplicities = Vec::new();
    let mut exponents = Vec::new();
    let mut scheme_exponents = Vec::new();
    let mut rank = 0usize;
    let mut xi = x.iter();
    for (i, l_norm) in forms.iter().enumerate() {
        let lambda = xi.next().unwrap().clone();
        let mu = cofs[i].as_ref().map(|_| xi.next().unwrap().clone());
        points.push(values_exact(l_norm));
        multiplicities.push(data.spaces[i].dim);
        exponents.push(if cofs[i].is_some() { d - 1 } else { d });
        scheme_exponents.push(data.spaces[i].dim as u32);
        if !lambda.is_zero() {
            terms.push(Term {
                weight: Value::Exact(lambda),
                form: values_exact(l_norm),
                exponent: d,
                cofactor: None,
            });
            rank += 1;
        }
        if let Some(mu) = mu {
            if mu.is_zero() {
                note(warnings, "a tangent piece received weight zero".into());
            } else {
                let mv = cofs[i].as_ref().unwrap();
                let cof: CofactorRepr = mv
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(j, c)| {
                        let mut e = vec![0u32; f.nvars()];
                        e[j] = 1;
                        (e, Value::Exact(c.clone()))
                    })
                    .collect();
                terms.push(Term {
                    weight: Value::Exact(mu),
                    form: values_exact(l_norm),
                    exponent: d - 1,
                    cofactor: Some(cof),
                });
                rank += 1;
            }
        }
    }
    Ok(DecompositionReport {
        mode: Mode::Tangential,
        rank,
        degree: d,
        nvars: f.nvars(),
        essential,
        exact: true,
        residual: 0.0,
        terms,
        points,
        multiplicities,
        exponents,
        scheme_exponents,
        basis: basis_labels(basis),
        params: params_list(sol),
        seed,
        warnings: warnings.clone(),
    })
}

#[allow(clippy::too_many_arguments)]
fn assemble_tangential_numeric(
    f: &Polynomial,
    essential: usize,
    d: u32,
    basis: &StaircaseBasis,
    sol: &Solution,
    data: &SpectralData,
    x: &[Complex64],
    forms: &[Vec<Complex64>],
    cofs: &[Option<Vec<Complex64>>],
    seed: u64,
    warnings: &mut Vec<String>,
) -> Result<DecompositionReport> {
    let peak = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = 1e-9 * (1.0 + peak);
    let mut terms = Vec::new();
    let mut points = Vec::new();
    let mut multiplicities = Vec::new();
    let mut exponents = Vec::new();
    let mut scheme_exponents = Vec::new();
    let mut rank = 0usize;
    let mut xi = x.iter();
    for (i, l_norm) in forms.iter().enumerate() {
        let lambda = *xi.next().unwrap();
        let mu = cofs[i].as_ref().map(|_| *xi.next().unwrap());
        points.push(values_numeric(l_norm));
        multiplicities.push(data.spaces[i].dim);
        exponents.push(if cofs[i].is_some() { d - 1 } else { d });
        scheme_exponents.push(data.spaces[i].dim as u32);
        if lambda.norm() > tiny {
            terms.push(Term {
                weight: Value::from_complex(lambda),
                form: values_numeric(l_norm),
                exponent: d,
                cofactor: None,
            });
            rank += 1;
        }
        if let Some(mu) = mu {
            if mu.norm() <= tiny {
                note(warnings, "a tangent piece received weight zero".into());
            } else {
                let mv = cofs[i].as_ref().unwrap();
                let cof: CofactorRepr = mv
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() > 1e-12)
                    .map(|(j, c)| {
                        let mut e = vec![0u32; f.nvars()];
                        e[j] = 1;
                        (e, Value::from_complex(*c))
                    })
                    .collect();
                terms.push(Term {
                    weight: Value::from_complex(mu),
                    form: values_numeric(l_norm),
                    exponent: d - 1,
                    cofactor: Some(cof),
                });
                rank += 1;
            }
        }
    }
    Ok(DecompositionReport {
        mode: Mode::Tangential,
        rank,
        degree: d,
        nvars: f.nvars(),
        essential,
        exact: false,
        residual: f64::NAN,
        terms,
        points,
        multiplicities,
        exponents,
        scheme_exponents,
        basis: basis_labels(basis),
        params: params_list(sol),
        seed,
        warnings: warnings.clone(),
    })
}

/// Exponent vectors k with k̄ᵢ ≤ kᵢ ≤ d and the given total, in
/// lexicographic order.
fn exponent_vectors(kbars: &[u32], d: u32, total: u32) -> Vec<Vec<u32>> {
    fn dfs(kbars: &[u32], d: u32, i: usize, remaining: i64, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == kbars.len() {
            if remaining == 0 {
                out.push(current.clone());
            }
            return;
        }
        let rest_min: i64 = kbars[i + 1..].iter().map(|&k| i64::from(k)).sum();
        let rest_max: i64 = i64::from(d) * (kbars.len() - i - 1) as i64;
        for k in kbars[i]..=d {
            let left = remaining - i64::from(k);
            if left < rest_min || left > rest_max {
                continue;
            }
            current.push(k);
            dfs(kbars, d, i + 1, left, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    dfs(kbars, d, 0, i64::from(total), &mut Vec::new(), &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn finalize_cactus(
    f: &Polynomial,
    red: &EssentialReduction,
    d: u32,
    basis: &StaircaseBasis,
    sol: &Solution,
    data: &SpectralData,
    config: &Config,
    seed: u64,
    warnings: &mut Vec<String>,
) -> Result<Option<DecompositionReport>> {
    let r = basis.size();
    let m = red.essential;
    let p = data.spaces.len();
    let kbars: Vec<u32> = data.spaces.iter().map(|s| s.nilindex as u32).collect();
    if kbars.iter().any(|&k| k > d) {
        note(
            warnings,
            format!("rank {r}: nilpotency exceeds the degree; retrying"),
        );
        return Ok(None);
    }
    let n = f.nvars();
    let forms_c: Vec<Vec<Complex64>> = data
        .spaces
        .iter()
        .map(|s| point_form(red, &s.point))
        .collect::<Result<_>>()?;
    let forms_q: Option<Vec<Vec<BigRational>>> = forms_c
        .iter()
        .map(|v| rationalize_vec(v, config.denom_cap))
        .collect();

    // internal cofactor monomials pull back exactly through the rational
    // change of coordinates, so precompute them per candidate degree
    let pull_monomial_exact = |mono: &MultiIndex| -> Result<Polynomial> {
        let t = Polynomial::from_terms(m, vec![(mono.clone(), BigRational::one())])?;
        pull_back_poly_exact(red, &t)
    };
    let pull_monomial_numeric = |mono: &MultiIndex| -> CPoly {
        let mut t = CPoly::zero(m);
        t.add_term(mono.clone(), Complex64::new(1.0, 0.0));
        pull_back_poly_numeric(red, &t)
    };

    // search exponent vectors by total, then lexicographically, for the
    // first one whose cofactor system is solvable
    let lo: u32 = kbars.iter().sum();
    let hi: u32 = d * p as u32;
    let mut tested = 0usize;
    for total in lo..=hi {
        for kvec in exponent_vectors(&kbars, d, total) {
            tested += 1;
            if tested > 2000 {
                note(
                    warnings,
                    format!("rank {r}: exponent search budget exhausted; retrying"),
                );
                return Ok(None);
            }
            // column group per point: L^{d−k+1} times each pulled-back
            // monomial of the cofactor
            if let Some(fq) = &forms_q {
                let mut cols = Vec::new();
                let mut groups = Vec::new();
                for (i, l) in fq.iter().enumerate() {
                    let power = power_of_linear_form(l, d - kvec[i] + 1);
                    let monos = monomials_of_degree(m, kvec[i] - 1);
                    let start = cols.len();
                    for mono in &monos {
                        cols.push(power.mul(&pull_monomial_exact(mono)?));
                    }
                    groups.push((start, monos));
                }
                if let Some(x) = exact_linear_solve(&cols, f, d, n) {
                    let report = assemble_cactus_exact(
                        f, red, d, basis, sol, data, &x, fq, &kvec, &groups, seed, warnings,
                    )?;
                    let res = verify(&report, f)?;
                    if res != 0.0 {
                        return Err(Error::InvalidInput(
                            "internal: exact reconstruction mismatch".into(),
                        ));
                    }
                    return Ok(Some(report));
                }
            } else {
                let mut cols = Vec::new();
                let mut groups = Vec::new();
                for (i, l) in forms_c.iter().enumerate() {
                    let power = power_of_linear_form_c(l, d - kvec[i] + 1);
                    let monos = monomials_of_degree(m, kvec[i] - 1);
                    let start = cols.len();
                    for mono in &monos {
                        cols.push(power.mul(&pull_monomial_numeric(mono)));
                    }
                    groups.push((start, monos));
                }
                let (x, rel) = numeric_linear_solve(&cols, f, d, n);
                if rel <= config.verify_tol {
                    let mut report = assemble_cactus_numeric(
                        f, red, d, basis, sol, data, &x, &forms_c, &kvec, &groups, seed, warnings,
                    )?;
                    let res = verify(&report, f)?;
                    if res <= config.verify_tol {
                        report.residual = res;
                        return Ok(Some(report));
                    }
                }
            }
        }
    }
    note(
        warnings,
        format!("rank {r}: no exponent vector admits a cofactor solution; retrying"),
    );
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn assemble_cactus_exact(
    f: &Polynomial,
    red: &EssentialReduction,
    d: u32,
    basis: &StaircaseBasis,
    sol: &Solution,
    data: &SpectralData,
    x: &[BigRational],
    forms: &[Vec<BigRational>],
    kvec: &[u32],
    groups: &[(usize, Vec<MultiIndex>)],
    seed: u64,
    warnings: &mut Vec<String>,
) -> Result<DecompositionReport> {
    let m = red.essential;
    let mut terms = Vec::new();
    let mut points = Vec::new();
    for (i, (start, monos)) in groups.iter().enumerate() {
        let e = d - kvec[i] + 1;
        let l_norm = &forms[i];
        points.push(values_exact(l_norm));
        let n_int = Polynomial::from_terms(
            m,
            monos
                .iter()
                .enumerate()
                .map(|(j, mono)| (mono.clone(), x[start + j].clone()))
                .collect::<Vec<_>>(),
        )?;
        if n_int.is_zero() {
            note(warnings, "a cactus cofactor vanished".into());
            continue;
        }
        if kvec[i] == 1 {
            terms.push(Term {
                weight: Value::Exact(n_int.coefficient(&MultiIndex::zero(m))),
                form: values_exact(l_norm),
                exponent: e,
                cofactor: None,
            });
        } else {
            let n_orig = pull_back_poly_exact(red, &n_int)?;
            terms.push(Term {
                weight: Value::Exact(BigRational::one()),
                form: values_exact(l_norm),
                exponent: e,
                cofactor: Some(cofactor_exact(&n_orig)),
            });
        }
    }
    Ok(DecompositionReport {
        mode: Mode::Cactus,
        rank: data.total_multiplicity(),
        degree: d,
        nvars: f.nvars(),
        essential: m,
        exact: true,
        residual: 0.0,
        terms,
        points,
        multiplicities: data.spaces.iter().map(|s| s.dim).collect(),
        exponents: kvec.iter().map(|&k| d - k + 1).collect(),
        scheme_exponents: kvec.to_vec(),
        basis: basis_labels(basis),
        params: params_list(sol),
        seed,
        warnings: warnings.clone(),
    })
}

#[allow(clippy::too_many_arguments)]
fn assemble_cactus_numeric(
    f: &Polynomial,
    red: &EssentialReduction,
    d: u32,
    basis: &StaircaseBasis,
    sol: &Solution,
    data: &SpectralData,
    x: &[Complex64],
    forms: &[Vec<Complex64>],
    kvec: &[u32],
    groups: &[(usize, Vec<MultiIndex>)],
    seed: u64,
    warnings: &mut Vec<String>,
) -> Result<DecompositionReport> {
    let m = red.essential;
    let peak = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut terms = Vec::new();
    let mut points = Vec::new();
    for (i, (start, monos)) in groups.iter().enumerate() {
        let e = d - kvec[i] + 1;
        let l_norm = &forms[i];
        points.push(values_numeric(l_norm));
        let mut n_int = CPoly::zero(m);
        for (j, mono) in monos.iter().enumerate() {
            n_int.add_term(mono.clone(), x[start + j]);
        }
        if n_int.max_abs_coeff() <= 1e-9 * (1.0 + peak) {
            note(warnings, "a cactus cofactor vanished".into());
            continue;
        }
        if kvec[i] == 1 {
            let c = n_int
                .terms
                .get(&MultiIndex::zero(m))
                .copied()
                .unwrap_or_default();
            terms.push(Term {
                weight: Value::from_complex(c),
                form: values_numeric(l_norm),
                exponent: e,
                cofactor: None,
            });
        } else {
            let n_orig = pull_back_poly_numeric(red, &n_int);
            terms.push(Term {
                weight: Value::Real(1.0),
                form: values_numeric(l_norm),
                exponent: e,
                cofactor: Some(cofactor_numeric(&n_orig, 1e-12)),
            });
        }
    }
    Ok(DecompositionReport {
        mode: Mode::Cactus,
        rank: data.total_multiplicity(),
        degree: d,
        nvars: f.nvars(),
        essential: m,
        exact: false,
        residual: f64::NAN,
        terms,
        points,
        multiplicities: data.spaces.iter().map(|s| s.dim).collect(),
        exponents: kvec.iter().map(|&k| d - k + 1).collect(),
        scheme_exponents: kvec.to_vec(),
        basis: basis_labels(basis),
        params: params_list(sol),
        seed,
        warnings: warnings.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex(e.to_vec())
    }

    fn cubic_three_powers() -> Polynomial {
        power_of_linear_form(&[qi(1), qi(1), qi(0)], 3)
            .add(&power_of_linear_form(&[qi(1), qi(0), qi(1)], 3))
            .add(&power_of_linear_form(&[qi(1), qi(1), qi(1)], 3))
    }

    fn exact_form(term: &Term) -> Vec<BigRational> {
        term.form
            .iter()
            .map(|v| v.exact().expect("exact form").clone())
            .collect()
    }

    #[test]
    fn waring_recovers_three_cubes_exactly() {
        let f = cubic_three_powers();
        let out = waring(&f, &Config::default(), 1).unwrap();
        let report = out.report().expect("success");
        assert_eq!(report.rank, 3);
        assert!(report.exact);
        assert_eq!(report.residual, 0.0);
        let mut forms: Vec<Vec<BigRational>> = report.terms.iter().map(exact_form).collect();
        forms.sort();
        let expected = vec![
            vec![qi(1), qi(0), qi(1)],
            vec![qi(1), qi(1), qi(0)],
            vec![qi(1), qi(1), qi(1)],
        ];
        let mut expected = expected;
        expected.sort();
        assert_eq!(forms, expected);
        for t in &report.terms {
            assert_eq!(t.weight.exact().unwrap(), &qi(1));
            assert_eq!(t.exponent, 3);
        }
    }

    #[test]
    fn waring_finds_rank_two_difference() {
        let f = power_of_linear_form(&[qi(1), qi(1), qi(1)], 3)
            .sub(&power_of_linear_form(&[qi(1), qi(0), qi(0)], 3));
        let out = waring(&f, &Config::default(), 2).unwrap();
        let report = out.report().expect("success");
        assert_eq!(report.rank, 2);
        assert!(report.exact);
        let mut forms: Vec<Vec<BigRational>> = report.terms.iter().map(exact_form).collect();
        forms.sort();
        assert_eq!(
            forms,
            vec![vec![qi(1), qi(0), qi(0)], vec![qi(1), qi(1), qi(1)]]
        );
    }

    #[test]
    fn rank_one_shortcut() {
        let f = power_of_linear_form(&[qi(2), qi(-3), qi(1)], 5).scale(&qi(4));
        let out = waring(&f, &Config::default(), 3).unwrap();
        let report = out.report().expect("success");
        assert_eq!(report.rank, 1);
        assert!(report.exact);
        assert_eq!(report.essential, 1);
        // form normalized at the x coordinate, weight absorbs 2^5 · 4
        assert_eq!(exact_form(&report.terms[0]), vec![qi(1), q(-3, 2), q(1, 2)]);
        assert_eq!(report.terms[0].weight.exact().unwrap(), &qi(128));
    }

    #[test]
    fn waring_of_binary_monomial_agrees_with_oracle() {
        // x²y has rank 3; the pipeline must reject the first chained
        // attempt and re-randomize free slots to land there
        let f = Polynomial::from_terms(2, vec![(mi(&[2, 1]), qi(1))]).unwrap();
        let out = waring(&f, &Config::default(), 7).unwrap();
        let report = out.report().expect("success");
        let oracle = crate::binary::binary_waring_rank(&f.clone().tag_homogeneous().unwrap())
            .unwrap() as usize;
        assert_eq!(report.rank, oracle);
        assert_eq!(report.rank, 3);
        assert!(verify(report, &f).unwrap() <= 1e-8);
    }

    #[test]
    fn waring_honest_failure_under_rank_cap() {
        let f = cubic_three_powers();
        let config = Config {
            max_rank: Some(2),
            ..Config::default()
        };
        match waring(&f, &config, 1).unwrap() {
            DriveOutcome::Failure(fail) => {
                assert_eq!(fail.ranks_tried, Vec::<usize>::new());
                assert!(fail.reason.contains("below 3"));
            }
            DriveOutcome::Success(r) => panic!("expected failure, got rank {}", r.rank),
        }
    }

    #[test]
    fn tangential_quintic_has_rank_five() {
        // (x+y+z)⁴x + 2(x+y−z)⁴(x−z) − 2(x−2y+3z)⁵
        let p1 = power_of_linear_form(&[qi(1), qi(1), qi(1)], 4)
            .mul(&power_of_linear_form(&[qi(1), qi(0), qi(0)], 1));
        let p2 = power_of_linear_form(&[qi(1), qi(1), qi(-1)], 4)
            .mul(&power_of_linear_form(&[qi(1), qi(0), qi(-1)], 1))
            .scale(&qi(2));
        let p3 = power_of_linear_form(&[qi(1), qi(-2), qi(3)], 5).scale(&qi(-2));
        let f = p1.add(&p2).add(&p3);
        let out = tangential(&f, &Config::default(), 11).unwrap();
        let report = out.report().expect("success");
        assert_eq!(report.rank, 5);
        assert!(report.residual <= 1e-8);
        let mut mults = report.multiplicities.clone();
        mults.sort_unstable();
        assert_eq!(mults, vec![1, 2, 2]);
        assert!(verify(report, &f).unwrap() <= 1e-8);
    }

    #[test]
    fn cactus_conic_times_line() {
        // (x² + y² + 6xz − 8z²)(4x − y − 5z): one triple point
        let conic = Polynomial::from_terms(
            3,
            vec![
                (mi(&[2, 0, 0]), qi(1)),
                (mi(&[0, 2, 0]), qi(1)),
                (mi(&[1, 0, 1]), qi(6)),
                (mi(&[0, 0, 2]), qi(-8)),
            ],
        )
        .unwrap();
        let line = Polynomial::from_terms(
            3,
            vec![
                (mi(&[1, 0, 0]), qi(4)),
                (mi(&[0, 1, 0]), qi(-1)),
                (mi(&[0, 0, 1]), qi(-5)),
            ],
        )
        .unwrap();
        let f = conic.mul(&line);
        let out = cactus(&f, &Config::default(), 5).unwrap();
        let report = out.report().expect("success");
        assert_eq!(report.rank, 3);
        assert_eq!(report.multiplicities, vec![3]);
        assert_eq!(report.scheme_exponents, vec![3]);
        assert_eq!(report.exponents, vec![1]);
        assert_eq!(report.points.len(), 1);
        let p: Vec<Complex64> = report.points[0].iter().map(Value::to_complex).collect();
        assert!((p[0] - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        assert!((p[1] - Complex64::new(-0.25, 0.0)).norm() < 1e-8);
        assert!((p[2] - Complex64::new(-1.25, 0.0)).norm() < 1e-8);
        assert!(verify(report, &f).unwrap() <= 1e-8);
    }

    #[test]
    fn verify_reports_the_damage_after_tampering() {
        let f = cubic_three_powers();
        let out = waring(&f, &Config::default(), 1).unwrap();
        let mut report = out.report().expect("success").clone();
        assert_eq!(verify(&report, &f).unwrap(), 0.0);
        report.terms[0].weight = Value::Exact(qi(2));
        assert!(verify(&report, &f).unwrap() > 0.1);
    }

    #[test]
    fn drivers_are_deterministic_in_the_seed() {
        let f = cubic_three_powers();
        let a = waring(&f, &Config::default(), 9).unwrap();
        let b = waring(&f, &Config::default(), 9).unwrap();
        let (ra, rb) = (a.report().unwrap(), b.report().unwrap());
        assert_eq!(
            serde_json::to_string(ra).unwrap(),
            serde_json::to_string(rb).unwrap()
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        let zero = Polynomial::zero(2);
        assert!(matches!(
            waring(&zero, &Config::default(), 0),
            Err(Error::ZeroPolynomial)
        ));
        let inhomogeneous = Polynomial::from_terms(
            2,
            vec![(mi(&[1, 0]), qi(1)), (mi(&[2, 0]), qi(1))],
        )
        .unwrap();
        assert!(waring(&inhomogeneous, &Config::default(), 0).is_err());
        let constant = Polynomial::from_terms(2, vec![(mi(&[0, 0]), qi(3))]).unwrap();
        assert!(waring(&constant, &Config::default(), 0).is_err());
    }
}
