//! Assigns the unknown high-degree moments so the shifted Hankel blocks
//! define commuting multiplication operators.
//!
//! Slots split into two groups: those inside the unshifted block control its
//! determinant, the rest appear only in shifts. The solver fixes the first
//! group to make the block invertible (zeros first, then seeded random
//! integers), turns the pairwise commutators into polynomial equations in
//! the remaining slots via the exact adjugate, and solves them exactly when
//! they are affine or by damped Gauss-Newton when quadratic terms remain.
//! Numeric solutions are re-verified independently and upgraded to exact
//! ones when every slot value rationalizes.


use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::exact::{qi, QMatrix};
use crate::moments::{hankel_block, HankelBlock, MomentTable, ParamAssignment, SlotValue};
use crate::numeric::{cond, inverse, lstsq, max_abs, CMatrix, CVector};
use crate::polyring::{MultiIndex, Polynomial};
use crate::roots::rationalize_complex;
use crate::staircases::StaircaseBasis;

/// Multiplication data extracted from a successful slot assignment.
#[derive(Debug, Clone)]
pub struct Solution {
    pub assignment: ParamAssignment,
    /// Transposed multiplication operators, one per variable, exact when the
    /// whole assignment is rational.
    pub exact_ops: Option<Vec<QMatrix>>,
    /// Complex-float copies of the same operators.
    pub ops: Vec<CMatrix>,
    /// Condition number of the unshifted block.
    pub cond: f64,
    /// Max-abs commutator entry; exactly zero on the exact path.
    pub residual: f64,
}

/// Outcome of the search for a commuting extension over one basis.
#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Solved(Box<Solution>),
    Unsolved {
        /// Determinant assignments tried before giving up.
        attempts: u32,
        /// Smallest commutator residual seen, infinite if none was reached.
        best_residual: f64,
        /// True when no extension exists at all, proved exactly.
        definitive: bool,
    },
}

impl SolveOutcome {
    pub fn is_solved(&self) -> bool {
        matches!(self, SolveOutcome::Solved(_))
    }
}

/// Submatrix with one row and one column removed.
fn poly_minor(m: &[Vec<Polynomial>], skip_row: usize, skip_col: usize) -> Vec<Vec<Polynomial>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != skip_row)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != skip_col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// Determinant of a small square matrix of polynomials, by Laplace expansion
/// along the first row.
fn poly_det(m: &[Vec<Polynomial>], nvars: usize) -> Polynomial {
    let r = m.len();
    if r == 0 {
        return Polynomial::constant(nvars, qi(1));
    }
    if r == 1 {
        return m[0][0].clone();
    }
    let mut acc = Polynomial::zero(nvars);
    for j in 0..r {
        if m[0][j].is_zero() {
            continue;
        }
        let cof = m[0][j].mul(&poly_det(&poly_minor(m, 0, j), nvars));
        acc = if j % 2 == 0 { acc.add(&cof) } else { acc.sub(&cof) };
    }
    acc
}

/// Adjugate of a small square matrix of polynomials.
fn poly_adjugate(m: &[Vec<Polynomial>], nvars: usize) -> Vec<Vec<Polynomial>> {
    let r = m.len();
    let mut adj = vec![vec![Polynomial::zero(nvars); r]; r];
    for i in 0..r {
        for j in 0..r {
            let c = poly_det(&poly_minor(m, i, j), nvars);
            adj[j][i] = if (i + j) % 2 == 0 { c } else { c.neg() };
        }
    }
    adj
}

fn poly_mat_mul(
    a: &[Vec<Polynomial>],
    b: &[Vec<Polynomial>],
    nvars: usize,
) -> Vec<Vec<Polynomial>> {
    let r = a.len();
    let mut out = vec![vec![Polynomial::zero(nvars); r]; r];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let mut acc = Polynomial::zero(nvars);
            for (k, bk) in b.iter().enumerate() {
                if !a[i][k].is_zero() && !bk[j].is_zero() {
                    acc = acc.add(&a[i][k].mul(&bk[j]));
                }
            }
            *entry = acc;
        }
    }
    out
}

/// Largest commutator entry over all operator pairs.
pub fn commutator_residual(ops: &[CMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..ops.len() {
        for b in a + 1..ops.len() {
            let c = &ops[a] * &ops[b] - &ops[b] * &ops[a];
            worst = worst.max(max_abs(&c));
        }
    }
    worst
}

fn exact_commutators_vanish(ops: &[QMatrix]) -> bool {
    for a in 0..ops.len() {
        for b in a + 1..ops.len() {
            if !ops[a].mul(&ops[b]).sub(&ops[b].mul(&ops[a])).is_zero() {
                return false;
            }
        }
    }
    true
}

/// The commuting-extension problem for one candidate basis.
#[derive(Debug, Clone)]
pub struct CommutationProblem {
    table: MomentTable,
    basis: StaircaseBasis,
    det_slots: Vec<MultiIndex>,
    shift_slots: Vec<MultiIndex>,
}

impl CommutationProblem {
    pub fn new(table: &MomentTable, basis: &StaircaseBasis) -> Result<Self> {
        if basis.nvars != table.nvars() {
            return Err(Error::DimensionMismatch {
                expected: table.nvars(),
                got: basis.nvars,
            });
        }
        let empty = ParamAssignment::empty();
        let det_slots: Vec<MultiIndex> = hankel_block(table, basis, None, &empty)
            .unresolved_slots()
            .into_iter()
            .collect();
        let mut shift_slots = Vec::new();
        for k in 0..table.nvars() {
            for s in hankel_block(table, basis, Some(k), &empty).unresolved_slots() {
                if !det_slots.contains(&s) && !shift_slots.contains(&s) {
                    shift_slots.push(s);
                }
            }
        }
        shift_slots.sort();
        Ok(CommutationProblem {
            table: table.clone(),
            basis: basis.clone(),
            det_slots,
            shift_slots,
        })
    }

    pub fn basis(&self) -> &StaircaseBasis {
        &self.basis
    }

    /// Slots appearing in the unshifted block.
    pub fn det_slots(&self) -> &[MultiIndex] {
        &self.det_slots
    }

    /// Slots appearing only in the shifted blocks.
    pub fn shift_slots(&self) -> &[MultiIndex] {
        &self.shift_slots
    }

    fn block(&self, shift: Option<usize>, assignment: &ParamAssignment) -> HankelBlock {
        hankel_block(&self.table, &self.basis, shift, assignment)
    }

    /// Entry as a polynomial in the shift slots; determinant slots must
    /// already be assigned.
    fn symbolic_entry(&self, block: &HankelBlock, i: usize, j: usize) -> Result<Polynomial> {
        use crate::moments::BlockEntry;
        let s = self.shift_slots.len();
        match block.entry(i, j) {
            BlockEntry::Known(v) => Ok(Polynomial::constant(s, v.clone())),
            BlockEntry::Numeric(_) => Err(Error::InvalidInput(
                "numeric entry while forming symbolic equations".into(),
            )),
            BlockEntry::Slot(slot) => {
                let idx = self
                    .shift_slots
                    .iter()
                    .position(|t| t == slot)
                    .ok_or_else(|| Error::UnassignedSlot(crate::moments::slot_name(slot)))?;
                Polynomial::variable(s, idx)
            }
        }
    }

    /// Pairwise commutator entries of `H_k · adj(H)` as polynomials in the
    /// shift slots.
    fn commutator_equations(
        &self,
        assignment: &ParamAssignment,
        adj: &QMatrix,
    ) -> Result<Vec<Polynomial>> {
        let n = self.table.nvars();
        let r = self.basis.size();
        let s = self.shift_slots.len();
        let mut scaled: Vec<Vec<Vec<Polynomial>>> = Vec::with_capacity(n);
        for k in 0..n {
            let block = self.block(Some(k), assignment);
            let mut rows = Vec::with_capacity(r);
            for i in 0..r {
                let mut row = Vec::with_capacity(r);
                for l in 0..r {
                    let mut acc = Polynomial::zero(s);
                    for j in 0..r {
                        let h = self.symbolic_entry(&block, i, j)?;
                        acc = acc.add(&h.scale(&adj[(j, l)]));
                    }
                    row.push(acc);
                }
                rows.push(row);
            }
            scaled.push(rows);
        }
        let mut equations: Vec<Polynomial> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for i in 0..r {
                    for l in 0..r {
                        let mut acc = Polynomial::zero(s);
                        for j in 0..r {
                            acc = acc.add(&scaled[a][i][j].mul(&scaled[b][j][l]));
                            acc = acc.sub(&scaled[b][i][j].mul(&scaled[a][j][l]));
                        }
                        let acc = acc.normalize_scale();
                        if !acc.is_zero() && !equations.contains(&acc) {
                            equations.push(acc);
                        }
                    }
                }
            }
        }
        Ok(equations)
    }

    /// Build the final operators from a fully assigned table.
    fn finish(&self, assignment: ParamAssignment, config: &Config) -> Result<Option<Solution>> {
        let n = self.table.nvars();
        if assignment.all_exact() {
            let h = self.block(None, &assignment).to_exact()?;
            let hinv = match h.inverse() {
                Some(m) => m,
                None => return Ok(None),
            };
            let mut exact_ops = Vec::with_capacity(n);
            for k in 0..n {
                let hk = self.block(Some(k), &assignment).to_exact()?;
                exact_ops.push(hk.mul(&hinv));
            }
            if !exact_commutators_vanish(&exact_ops) {
                return Ok(None);
            }
            let ops: Vec<CMatrix> = exact_ops.iter().map(QMatrix::to_complex).collect();
            let cnd = cond(&h.to_complex());
            return Ok(Some(Solution {
                assignment,
                exact_ops: Some(exact_ops),
                ops,
                cond: cnd,
                residual: 0.0,
            }));
        }
        let h = self.block(None, &assignment).to_numeric()?;
        let cnd = cond(&h);
        if !cnd.is_finite() || cnd > config.cond_cap {
            return Ok(None);
        }
        let hinv = match inverse(&h) {
            Some(m) => m,
            None => return Ok(None),
        };
        let mut ops = Vec::with_capacity(n);
        for k in 0..n {
            let hk = self.block(Some(k), &assignment).to_numeric()?;
            ops.push(&hk * &hinv);
        }
        let residual = commutator_residual(&ops);
        if residual > config.commute_tol {
            return Ok(None);
        }
        Ok(Some(Solution {
            assignment,
            exact_ops: None,
            ops,
            cond: cnd,
            residual,
        }))
    }

    /// All unknown slots, determinant ones first.
    fn joint_slots(&self) -> Vec<MultiIndex> {
        let mut slots = self.det_slots.clone();
        slots.extend(self.shift_slots.iter().cloned());
        slots
    }

    /// The block as a matrix of polynomials in the given slot list.
    fn symbolic_block(
        &self,
        shift: Option<usize>,
        slots: &[MultiIndex],
    ) -> Result<Vec<Vec<Polynomial>>> {
        use crate::moments::BlockEntry;
        let s = slots.len();
        let block = self.block(shift, &ParamAssignment::empty());
        let r = self.basis.size();
        let mut rows = Vec::with_capacity(r);
        for i in 0..r {
            let mut row = Vec::with_capacity(r);
            for j in 0..r {
                let p = match block.entry(i, j) {
                    BlockEntry::Known(v) => Polynomial::constant(s, v.clone()),
                    BlockEntry::Numeric(_) => {
                        return Err(Error::InvalidInput(
                            "numeric entry while forming symbolic equations".into(),
                        ))
                    }
                    BlockEntry::Slot(slot) => {
                        let idx = slots
                            .iter()
                            .position(|t| t == slot)
                            .ok_or_else(|| Error::UnassignedSlot(crate::moments::slot_name(slot)))?;
                        Polynomial::variable(s, idx)?
                    }
                };
                row.push(p);
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// Commutation of every operator pair as polynomial equations in all
    /// slots at once: Hₐ·adj(H)·H_b − H_b·adj(H)·Hₐ = 0. Multiplying the
    /// commutator of Hₖ·H⁻¹ through by H and det(H) clears the inverse, so
    /// the determinant slots become ordinary unknowns instead of guesses.
    fn joint_equations(&self, slots: &[MultiIndex]) -> Result<Vec<Polynomial>> {
        let s = slots.len();
        let n = self.table.nvars();
        let h = self.symbolic_block(None, slots)?;
        let adj = poly_adjugate(&h, s);
        let mut blocks = Vec::with_capacity(n);
        let mut scaled = Vec::with_capacity(n);
        for k in 0..n {
            let b = self.symbolic_block(Some(k), slots)?;
            scaled.push(poly_mat_mul(&b, &adj, s));
            blocks.push(b);
        }
        let mut equations: Vec<Polynomial> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let left = poly_mat_mul(&scaled[a], &blocks[b], s);
                let right = poly_mat_mul(&scaled[b], &blocks[a], s);
                for (lrow, rrow) in left.iter().zip(&right) {
                    for (l, r) in lrow.iter().zip(rrow) {
                        let e = l.sub(r).normalize_scale();
                        if !e.is_zero() && !equations.contains(&e) {
                            equations.push(e);
                        }
                    }
                }
            }
        }
        Ok(equations)
    }

    /// Rationalize a full slot vector and re-verify exactly.
    fn try_exact_upgrade_joint(
        &self,
        slots: &[MultiIndex],
        values: &CVector,
        config: &Config,
    ) -> Result<Option<Solution>> {
        let mut assignment = ParamAssignment::empty();
        for (slot, v) in slots.iter().zip(values.iter()) {
            match rationalize_complex(*v, config.denom_cap) {
                Some(q) => assignment.assign(slot.clone(), SlotValue::Exact(q)),
                None => return Ok(None),
            }
        }
        self.finish(assignment, config)
    }

    /// Try to upgrade a numeric slot vector to rationals; on success the
    /// exact assignment is re-verified from scratch.
    fn try_exact_upgrade(
        &self,
        base: &ParamAssignment,
        values: &CVector,
        config: &Config,
    ) -> Result<Option<Solution>> {
        let mut exact_vals = Vec::with_capacity(self.shift_slots.len());
        for v in values.iter() {
            match rationalize_complex(*v, config.denom_cap) {
                Some(q) => exact_vals.push(q),
                None => return Ok(None),
            }
        }
        let mut assignment = base.clone();
        for (slot, q) in self.shift_slots.iter().zip(exact_vals) {
            assignment.assign(slot.clone(), SlotValue::Exact(q));
        }
        self.finish(assignment, config)
    }

    /// Solve the affine system `equations = 0` exactly. Returns the slot
    /// values, or `None` if the system is inconsistent.
    fn solve_affine(
        &self,
        equations: &[Polynomial],
        rng: &mut ChaCha8Rng,
        randomize_free: bool,
    ) -> Option<Vec<BigRational>> {
        let s = self.shift_slots.len();
        let rows = equations.len().max(1);
        let mut aug = QMatrix::zeros(rows, s + 1);
        for (e, eq) in equations.iter().enumerate() {
            for (mono, c) in eq.terms() {
                match mono.degree() {
                    0 => aug[(e, s)] = -c.clone(),
                    1 => {
                        let v = mono.0.iter().position(|&x| x == 1).unwrap();
                        aug[(e, v)] = c.clone();
                    }
                    _ => unreachable!("affine path invoked on a nonlinear equation"),
                }
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&s) {
            return None;
        }
        let mut values = vec![BigRational::zero(); s];
        let free: Vec<usize> = (0..s).filter(|c| !pivots.contains(c)).collect();
        for &c in &free {
            values[c] = if randomize_free {
                qi(rng.gen_range(-9..=9))
            } else {
                BigRational::zero()
            };
        }
        for (row, &p) in pivots.iter().enumerate() {
            let mut v = r[(row, s)].clone();
            for &c in &free {
                v -= r[(row, c)].clone() * values[c].clone();
            }
            values[p] = v;
        }
        Some(values)
    }

    /// Damped Gauss-Newton on the commutator equations from one start.
    fn newton(
        &self,
        equations: &[Polynomial],
        jacobian: &[Vec<Polynomial>],
        start: CVector,
        scale: f64,
    ) -> (CVector, f64) {
        let m = equations.len();
        let s = start.len();
        let eval = |v: &CVector| -> CVector {
            let pt: Vec<Complex64> = v.iter().copied().collect();
            CVector::from_iterator(m, equations.iter().map(|e| e.eval_complex(&pt)))
        };
        let mut v = start;
        let mut fv = eval(&v);
        let mut best = fv.camax();
        for _ in 0..100 {
            let pt: Vec<Complex64> = v.iter().copied().collect();
            let j = CMatrix::from_fn(m, s, |e, c| jacobian[e][c].eval_complex(&pt));
            let (step, _) = lstsq(&j, &(-&fv), 1e-14);
            if step.camax() < 1e-15 * (1.0 + v.camax()) {
                break;
            }
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let cand = &v + &step * Complex64::new(t, 0.0);
                let fc = eval(&cand);
                if fc.camax() < fv.camax() {
                    v = cand;
                    fv = fc;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
            best = best.min(fv.camax());
            if fv.camax() <= 1e-13 * scale.max(1.0) {
                break;
            }
        }
        (v, best)
    }

    /// Search for a slot assignment with invertible unshifted block and
    /// commuting operators.
    ///
    /// With `randomize_free` unset the deterministic choices (zeros) come
    /// first; set it on retry attempts to explore other extensions.
    pub fn solve(&self, seed: u64, randomize_free: bool, config: &Config) -> Result<SolveOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best_residual = f64::INFINITY;
        let mut attempts = 0;

        for outer in 0..=config.outer_restarts {
            // Stage 1: make the unshifted block exactly invertible.
            let mut assignment = ParamAssignment::empty();
            if self.det_slots.is_empty() {
                let h = self.block(None, &assignment).to_exact()?;
                if h.det().is_zero() {
                    return Ok(SolveOutcome::Unsolved {
                        attempts: 1,
                        best_residual,
                        definitive: true,
                    });
                }
            } else {
                let mut found = false;
                for retry in 0..config.det_retries {
                    let mut trial = ParamAssignment::empty();
                    let zeros = outer == 0 && retry == 0 && !randomize_free;
                    for slot in &self.det_slots {
                        let v = if zeros { qi(0) } else { qi(rng.gen_range(-9..=9)) };
                        trial.assign(slot.clone(), SlotValue::Exact(v));
                    }
                    attempts += 1;
                    if !self.block(None, &trial).to_exact()?.det().is_zero() {
                        assignment = trial;
                        found = true;
                        break;
                    }
                }
                if !found {
                    continue;
                }
            }
            let h = self.block(None, &assignment).to_exact()?;
            let adj = h.adjugate().ok_or(Error::SingularBlock)?;

            // Stage 2: exact commutator equations in the shift slots.
            let equations = self.commutator_equations(&assignment, &adj)?;
            let affine = equations
                .iter()
                .all(|e| e.total_degree().unwrap_or(0) <= 1);
            if affine {
                match self.solve_affine(&equations, &mut rng, randomize_free) {
                    Some(values) => {
                        let mut full = assignment.clone();
                        for (slot, v) in self.shift_slots.iter().zip(values) {
                            full.assign(slot.clone(), SlotValue::Exact(v));
                        }
                        if let Some(sol) = self.finish(full, config)? {
                            return Ok(SolveOutcome::Solved(Box::new(sol)));
                        }
                        // commutators vanish by construction, so only a
                        // singular block can land here; re-randomize
                        continue;
                    }
                    None => {
                        if self.det_slots.is_empty() {
                            // no freedom left anywhere: proved unsolvable
                            let constant_residual = equations
                                .iter()
                                .filter(|e| e.total_degree().unwrap_or(0) == 0)
                                .map(Polynomial::max_abs_coeff_f64)
                                .fold(f64::INFINITY, f64::min);
                            return Ok(SolveOutcome::Unsolved {
                                attempts: 1,
                                best_residual: if self.shift_slots.is_empty() {
                                    constant_residual
                                } else {
                                    best_residual
                                },
                                definitive: true,
                            });
                        }
                        continue;
                    }
                }
            }

            // Stage 3: Gauss-Newton on the quadratic system.
            let s = self.shift_slots.len();
            let jacobian: Vec<Vec<Polynomial>> = equations
                .iter()
                .map(|e| (0..s).map(|v| e.partial_derivative(v).unwrap()).collect())
                .collect();
            let scale = equations
                .iter()
                .map(Polynomial::max_abs_coeff_f64)
                .fold(0.0, f64::max);
            for restart in 0..config.newton_restarts {
                let start = if restart == 0 && !randomize_free {
                    CVector::zeros(s)
                } else {
                    CVector::from_fn(s, |_, _| {
                        Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
                    })
                };
                let (v, best) = self.newton(&equations, &jacobian, start, scale);
                best_residual = best_residual.min(best);
                if best > 1e-9 * scale.max(1.0) {
                    continue;
                }
                if let Some(sol) = self.try_exact_upgrade(&assignment, &v, config)? {
                    return Ok(SolveOutcome::Solved(Box::new(sol)));
                }
                let mut full = assignment.clone();
                for (slot, z) in self.shift_slots.iter().zip(v.iter()) {
                    full.assign(slot.clone(), SlotValue::Numeric(*z));
                }
                if let Some(sol) = self.finish(full, config)? {
                    return Ok(SolveOutcome::Solved(Box::new(sol)));
                }
            }
            if self.det_slots.is_empty() {
                // Newton exhausted and no determinant freedom to vary
                break;
            }
        }

        // Stage 4: integer determinant-slot guesses miss extensions whose
        // determinant moments are forced to specific non-integer values, so
        // solve for every slot jointly before giving up. The adjugate form
        // keeps the system polynomial; size is gated because its degree
        // grows with the basis.
        let slots = self.joint_slots();
        if !self.det_slots.is_empty()
            && self.table.nvars() > 1
            && slots.len() <= 12
            && self.basis.size() <= 6
        {
            let equations = self.joint_equations(&slots)?;
            if !equations.is_empty() {
                let s = slots.len();
                let jacobian: Vec<Vec<Polynomial>> = equations
                    .iter()
                    .map(|e| (0..s).map(|v| e.partial_derivative(v).unwrap()).collect())
                    .collect();
                let scale = equations
                    .iter()
                    .map(Polynomial::max_abs_coeff_f64)
                    .fold(0.0, f64::max);
                for restart in 0..(2 * config.newton_restarts) {
                    let start = if restart == 0 && !randomize_free {
                        CVector::zeros(s)
                    } else {
                        CVector::from_fn(s, |_, _| {
                            Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
                        })
                    };
                    attempts += 1;
                    let (v, best) = self.newton(&equations, &jacobian, start, scale);
                    best_residual = best_residual.min(best);
                    if best > 1e-9 * scale.max(1.0) {
                        continue;
                    }
                    if let Some(sol) = self.try_exact_upgrade_joint(&slots, &v, config)? {
                        return Ok(SolveOutcome::Solved(Box::new(sol)));
                    }
                    let mut full = ParamAssignment::empty();
                    for (slot, z) in slots.iter().zip(v.iter()) {
                        full.assign(slot.clone(), SlotValue::Numeric(*z));
                    }
                    if let Some(sol) = self.finish(full, config)? {
                        return Ok(SolveOutcome::Solved(Box::new(sol)));
                    }
                }
            }
        }

        Ok(SolveOutcome::Unsolved {
            attempts: attempts.max(1),
            best_residual,
            definitive: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use crate::moments::build_moment_table;
    use crate::polyring::{dehomogenize, power_of_linear_form, Polynomial};

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex(e.to_vec())
    }

    fn basis_of(nvars: usize, monos: &[&[u32]]) -> StaircaseBasis {
        StaircaseBasis {
            monomials: monos.iter().map(|m| mi(m)).collect(),
            nvars,
            degree_cap: monos.iter().map(|m| m.iter().sum()).max().unwrap(),
        }
    }

    /// Cubic with Waring decomposition (x+y)³ + (x+z)³ + (x+y+z)³.
    fn sum_of_three_cubes() -> Polynomial {
        power_of_linear_form(&[qi(1), qi(1), qi(0)], 3)
            .add(&power_of_linear_form(&[qi(1), qi(0), qi(1)], 3))
            .add(&power_of_linear_form(&[qi(1), qi(1), qi(1)], 3))
            .tag_homogeneous()
            .unwrap()
    }

    /// (x+y)²(x+z) + (x−z)²(x+y+z), the cubic whose smallest commuting
    /// basis has four elements.
    fn tangential_cubic() -> Polynomial {
        let a = power_of_linear_form(&[qi(1), qi(1), qi(0)], 2);
        let b = power_of_linear_form(&[qi(1), qi(0), qi(1)], 1);
        let c = power_of_linear_form(&[qi(1), qi(0), qi(-1)], 2);
        let d = power_of_linear_form(&[qi(1), qi(1), qi(1)], 1);
        a.mul(&b).add(&c.mul(&d)).tag_homogeneous().unwrap()
    }

    #[test]
    fn fully_known_blocks_solve_exactly() {
        let f = sum_of_three_cubes();
        let g = dehomogenize(&f).unwrap();
        let table = build_moment_table(&g, 3).unwrap();
        let basis = basis_of(2, &[&[0, 0], &[1, 0], &[0, 1]]);
        let problem = CommutationProblem::new(&table, &basis).unwrap();
        assert!(problem.det_slots().is_empty());
        assert!(problem.shift_slots().is_empty());
        let outcome = problem.solve(1, false, &Config::default()).unwrap();
        match outcome {
            SolveOutcome::Solved(sol) => {
                assert_eq!(sol.residual, 0.0);
                let ops = sol.exact_ops.as_ref().unwrap();
                assert_eq!(ops.len(), 2);
                // multiplication by y fixes the evaluation vectors, so its
                // trace is the sum of the y-coordinates 0 + 1 + 1
                let trace = ops[0][(0, 0)].clone() + ops[0][(1, 1)].clone() + ops[0][(2, 2)].clone();
                assert_eq!(trace, qi(2));
            }
            other => panic!("expected a solution, got {other:?}"),
        }
    }

    #[test]
    fn non_commuting_basis_is_rejected_definitively() {
        let f = tangential_cubic();
        let g = dehomogenize(&f).unwrap();
        let table = build_moment_table(&g, 3).unwrap();
        let basis = basis_of(2, &[&[0, 0], &[1, 0], &[0, 1]]);
        let problem = CommutationProblem::new(&table, &basis).unwrap();
        assert!(problem.det_slots().is_empty());
        assert!(problem.shift_slots().is_empty());
        match problem.solve(1, false, &Config::default()).unwrap() {
            SolveOutcome::Unsolved {
                definitive,
                best_residual,
                ..
            } => {
                assert!(definitive);
                assert!(best_residual > 0.0);
            }
            other => panic!("expected unsolved, got {other:?}"),
        }
    }

    #[test]
    fn quadratic_slots_reach_an_exact_extension() {
        let f = tangential_cubic();
        let g = dehomogenize(&f).unwrap();
        let table = build_moment_table(&g, 3).unwrap();
        let basis = basis_of(2, &[&[0, 0], &[1, 0], &[0, 1], &[2, 0]]);
        let problem = CommutationProblem::new(&table, &basis).unwrap();
        assert_eq!(problem.det_slots(), &[mi(&[4, 0])]);
        assert_eq!(problem.shift_slots().len(), 4);
        let outcome = problem.solve(5, false, &Config::default()).unwrap();
        match outcome {
            SolveOutcome::Solved(sol) => {
                assert!(sol.residual <= 1e-10);
                assert!(commutator_residual(&sol.ops) <= 1e-9);
            }
            other => panic!("expected a solution, got {other:?}"),
        }
    }

    #[test]
    fn free_slots_default_to_zero_and_randomize_on_request() {
        // binary quartic: one free shift slot, no commutator constraints
        let f = Polynomial::from_terms(
            2,
            vec![
                (mi(&[4, 0]), qi(3)),
                (mi(&[2, 2]), qi(12)),
                (mi(&[0, 4]), qi(2)),
            ],
        )
        .unwrap()
        .tag_homogeneous()
        .unwrap();
        let g = dehomogenize(&f).unwrap();
        let table = build_moment_table(&g, 4).unwrap();
        let basis = basis_of(1, &[&[0], &[1], &[2]]);
        let problem = CommutationProblem::new(&table, &basis).unwrap();
        assert!(problem.det_slots().is_empty());
        assert_eq!(problem.shift_slots(), &[mi(&[5])]);

        let zeroed = match problem.solve(1, false, &Config::default()).unwrap() {
            SolveOutcome::Solved(sol) => sol,
            other => panic!("expected a solution, got {other:?}"),
        };
        assert_eq!(
            zeroed.assignment.get(&mi(&[5])),
            Some(&SlotValue::Exact(qi(0)))
        );

        let randomized = match problem.solve(1, true, &Config::default()).unwrap() {
            SolveOutcome::Solved(sol) => sol,
            other => panic!("expected a solution, got {other:?}"),
        };
        assert_ne!(
            randomized.assignment.get(&mi(&[5])),
            Some(&SlotValue::Exact(qi(0)))
        );
    }

    #[test]
    fn solve_is_deterministic_in_the_seed() {
        let f = tangential_cubic();
        let g = dehomogenize(&f).unwrap();
        let table = build_moment_table(&g, 3).unwrap();
        let basis = basis_of(2, &[&[0, 0], &[1, 0], &[0, 1], &[2, 0]]);
        let problem = CommutationProblem::new(&table, &basis).unwrap();
        let a = problem.solve(42, false, &Config::default()).unwrap();
        let b = problem.solve(42, false, &Config::default()).unwrap();
        match (a, b) {
            (SolveOutcome::Solved(x), SolveOutcome::Solved(y)) => {
                assert_eq!(x.residual, y.residual);
                for (p, q) in x.ops.iter().zip(y.ops.iter()) {
                    assert_eq!(p, q);
                }
            }
            other => panic!("expected two solutions, got {other:?}"),
        }
    }

    #[test]
    fn known_singular_block_fails_fast() {
        // F = x³ + y³ restricted to a basis containing z: dual pairs with z
        // all vanish, so the block is singular with no slots to tune
        let f = Polynomial::from_terms(
            3,
            vec![(mi(&[3, 0, 0]), qi(1)), (mi(&[0, 3, 0]), qi(1))],
        )
        .unwrap()
        .tag_homogeneous()
        .unwrap();
        let g = dehomogenize(&f).unwrap();
        let table = build_moment_table(&g, 3).unwrap();
        let basis = basis_of(2, &[&[0, 0], &[1, 0], &[0, 1]]);
        let problem = CommutationProblem::new(&table, &basis).unwrap();
        match problem.solve(1, false, &Config::default()).unwrap() {
            SolveOutcome::Unsolved { definitive, .. } => assert!(definitive),
            other => panic!("expected unsolved, got {other:?}"),
        }
    }

    #[test]
    fn quintic_five_element_basis_commutes_without_slots() {
        // (x+y+z)⁴x + 2(x+y−z)⁴(x−z) − 2(x−2y+3z)⁵ expanded
        let p1 = power_of_linear_form(&[qi(1), qi(1), qi(1)], 4)
            .mul(&power_of_linear_form(&[qi(1), qi(0), qi(0)], 1));
        let p2 = power_of_linear_form(&[qi(1), qi(1), qi(-1)], 4)
            .mul(&power_of_linear_form(&[qi(1), qi(0), qi(-1)], 1))
            .scale(&qi(2));
        let p3 = power_of_linear_form(&[qi(1), qi(-2), qi(3)], 5).scale(&qi(-2));
        let f = p1.add(&p2).add(&p3).tag_homogeneous().unwrap();
        let g = dehomogenize(&f).unwrap();
        let table = build_moment_table(&g, 5).unwrap();
        let basis = basis_of(2, &[&[0, 0], &[1, 0], &[0, 1], &[2, 0], &[1, 1]]);
        let problem = CommutationProblem::new(&table, &basis).unwrap();
        assert!(problem.det_slots().is_empty());
        assert!(problem.shift_slots().is_empty());
        let outcome = problem.solve(1, false, &Config::default()).unwrap();
        assert!(outcome.is_solved());
    }

    #[test]
    fn moment_scale_is_respected() {
        // same quartic as above but scaled: outcomes stay solvable
        let f = Polynomial::from_terms(
            2,
            vec![
                (mi(&[4, 0]), q(3, 7)),
                (mi(&[2, 2]), q(12, 7)),
                (mi(&[0, 4]), q(2, 7)),
            ],
        )
        .unwrap()
        .tag_homogeneous()
        .unwrap();
        let g = dehomogenize(&f).unwrap();
        let table = build_moment_table(&g, 4).unwrap();
        let basis = basis_of(1, &[&[0], &[1], &[2]]);
        let problem = CommutationProblem::new(&table, &basis).unwrap();
        assert!(problem.solve(9, false, &Config::default()).unwrap().is_solved());
    }
}
