//! Moment tables and Hankel blocks.
//!
//! The dual functional of a dehomogenized polynomial f fixes every moment of
//! degree at most d exactly; moments above d are named parameter slots, one
//! per exponent vector. Blocks indexed by a staircase basis B materialize the
//! square matrix (Λ(b_i b_j)) and its variable-shifted companions
//! (Λ(x_k b_i b_j)), either exactly or over complex floats.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exact::QMatrix;
use crate::numeric::CMatrix;
use crate::polyring::{dual_eval, monomials_up_to_degree, MultiIndex, Polynomial};
use crate::staircases::StaircaseBasis;

/// A moment is either pinned by the input polynomial or a free parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentValue {
    Known(BigRational),
    Param(MultiIndex),
}

/// Canonical display name of the parameter slot at exponent `alpha`.
pub fn slot_name(alpha: &MultiIndex) -> String {
    let mut s = String::from("h_{");
    for (k, e) in alpha.0.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        let _ = write!(s, "{e}");
    }
    s.push('}');
    s
}

/// Moments of the dual functional of `f` at degree `d`.
#[derive(Debug, Clone)]
pub struct MomentTable {
    nvars: usize,
    degree: u32,
    known: BTreeMap<MultiIndex, BigRational>,
}

impl MomentTable {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn value(&self, alpha: &MultiIndex) -> MomentValue {
        if alpha.degree() <= self.degree {
            MomentValue::Known(
                self.known
                    .get(alpha)
                    .cloned()
                    .unwrap_or_else(|| BigRational::from_integer(0.into())),
            )
        } else {
            MomentValue::Param(alpha.clone())
        }
    }
}

/// Moments of degree ≤ d are `f_α / C(d, α)`; everything above is a slot.
pub fn build_moment_table(f: &Polynomial, d: u32) -> Result<MomentTable> {
    if let Some(deg) = f.total_degree() {
        if deg > d {
            return Err(Error::DegreeExceeded { bound: d, got: deg });
        }
    }
    let mut known = BTreeMap::new();
    for (alpha, _) in f.terms() {
        known.insert(alpha.clone(), dual_eval(f, d, alpha)?);
    }
    Ok(MomentTable {
        nvars: f.nvars(),
        degree: d,
        known,
    })
}

/// Exact rank of the largest fully numeric Hankel block: rows of degree
/// ≤ ⌈d/2⌉ against columns of degree ≤ ⌊d/2⌋.
pub fn square_block_rank(table: &MomentTable) -> usize {
    let rows = monomials_up_to_degree(table.nvars, table.degree.div_ceil(2));
    let cols = monomials_up_to_degree(table.nvars, table.degree / 2);
    let m = QMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        match table.value(&rows[i].add(&cols[j])) {
            MomentValue::Known(v) => v,
            MomentValue::Param(_) => unreachable!("row+col degree ≤ d"),
        }
    });
    m.rank()
}

/// Values for parameter slots; exact and numeric values may coexist.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamAssignment {
    values: BTreeMap<MultiIndex, SlotValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SlotValue {
    Exact(BigRational),
    Numeric(Complex64),
}

impl SlotValue {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            SlotValue::Exact(q) => Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0),
            SlotValue::Numeric(z) => *z,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            SlotValue::Exact(q) => Some(q),
            SlotValue::Numeric(_) => None,
        }
    }
}

impl ParamAssignment {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Inserting a slot twice with a different value is a logic error.
    pub fn assign(&mut self, slot: MultiIndex, value: SlotValue) {
        if let Some(old) = self.values.get(&slot) {
            assert_eq!(old, &value, "slot {} assigned twice", slot_name(&slot));
            return;
        }
        self.values.insert(slot, value);
    }

    pub fn get(&self, slot: &MultiIndex) -> Option<&SlotValue> {
        self.values.get(slot)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &SlotValue)> {
        self.values.iter()
    }

    pub fn all_exact(&self) -> bool {
        self.values.values().all(|v| matches!(v, SlotValue::Exact(_)))
    }
}

/// One entry of a Hankel block: resolved or still a named slot.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockEntry {
    Known(BigRational),
    Numeric(Complex64),
    Slot(MultiIndex),
}

/// A square basis-indexed block of moments, possibly with unresolved slots.
#[derive(Debug, Clone)]
pub struct HankelBlock {
    pub basis: StaircaseBasis,
    /// `None` for the unshifted block, `Some(k)` for the x_k shift.
    pub shift: Option<usize>,
    pub entries: Vec<BlockEntry>, // row-major, size × size
}

/// Materialize the block `(Λ(b_i · b_j · x_shift))` under `assignment`.
/// Slots the assignment does not cover stay symbolic in the result.
pub fn hankel_block(
    table: &MomentTable,
    basis: &StaircaseBasis,
    shift: Option<usize>,
    assignment: &ParamAssignment,
) -> HankelBlock {
    let size = basis.size();
    let mut entries = Vec::with_capacity(size * size);
    let shift_mi = shift.map(|k| MultiIndex::unit(table.nvars, k));
    for i in 0..size {
        for j in 0..size {
            let mut alpha = basis.monomials[i].add(&basis.monomials[j]);
            if let Some(s) = &shift_mi {
                alpha = alpha.add(s);
            }
            let entry = match table.value(&alpha) {
                MomentValue::Known(v) => BlockEntry::Known(v),
                MomentValue::Param(slot) => match assignment.get(&slot) {
                    Some(SlotValue::Exact(q)) => BlockEntry::Known(q.clone()),
                    Some(SlotValue::Numeric(z)) => BlockEntry::Numeric(*z),
                    None => BlockEntry::Slot(slot),
                },
            };
            entries.push(entry);
        }
    }
    HankelBlock {
        basis: basis.clone(),
        shift,
        entries,
    }
}

impl HankelBlock {
    pub fn size(&self) -> usize {
        self.basis.size()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BlockEntry {
        &self.entries[i * self.size() + j]
    }

    /// Slots still unresolved in this block, in canonical order.
    pub fn unresolved_slots(&self) -> BTreeSet<MultiIndex> {
        self.entries
            .iter()
            .filter_map(|e| match e {
                BlockEntry::Slot(s) => Some(s.clone()),
                _ => None,
            })
            .collect()
    }

    /// Fully exact matrix; errors if any entry is numeric or unresolved.
    pub fn to_exact(&self) -> Result<QMatrix> {
        let n = self.size();
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                match self.entry(i, j) {
                    BlockEntry::Known(v) => m[(i, j)] = v.clone(),
                    BlockEntry::Numeric(_) => {
                        return Err(Error::InvalidInput(
                            "numeric entry in a block demanded exact".into(),
                        ))
                    }
                    BlockEntry::Slot(s) => return Err(Error::UnassignedSlot(slot_name(s))),
                }
            }
        }
        Ok(m)
    }

    /// Complex-float matrix; errors only on unresolved slots.
    pub fn to_numeric(&self) -> Result<CMatrix> {
        let n = self.size();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = match self.entry(i, j) {
                    BlockEntry::Known(v) => Complex64::new(v.to_f64().unwrap_or(f64::NAN), 0.0),
                    BlockEntry::Numeric(z) => *z,
                    BlockEntry::Slot(s) => return Err(Error::UnassignedSlot(slot_name(s))),
                };
            }
        }
        Ok(m)
    }
}
