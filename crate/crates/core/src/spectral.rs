//! Joint eigenstructure of the commuting multiplication operators.
//!
//! A seeded random integer combination N = Σ γₖ Wₖ splits the space into
//! generalized eigenspaces; restricting the family to each block and
//! repeating with fresh combinations refines the splitting until every
//! block carries a single eigenvalue per operator. Each leaf is a support
//! point with its multiplicity (block dimension) and nilpotency index, the
//! data the decomposition drivers consume.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::numeric::{eigenvalues, max_abs, CMatrix, CVector};

/// One joint generalized eigenspace of the commuting family.
#[derive(Debug, Clone)]
pub struct JointEigenspace {
    /// Shared eigenvalue of each operator on this block.
    pub point: Vec<Complex64>,
    /// Block dimension, the multiplicity of the point.
    pub dim: usize,
    /// Largest nilpotency index of Wₖ − ζₖ over the block.
    pub nilindex: usize,
    /// Orthonormal ambient basis of the block, one column per dimension.
    pub basis: CMatrix,
    /// The operators restricted to the block, in that basis.
    pub restrictions: Vec<CMatrix>,
}

impl JointEigenspace {
    /// A vector fixed by every operator, in ambient coordinates.
    pub fn common_eigenvector(&self) -> CVector {
        if self.dim == 1 {
            return self.basis.column(0).into_owned();
        }
        let n = self.restrictions.len();
        let mut stacked = CMatrix::zeros(n * self.dim, self.dim);
        for (k, c) in self.restrictions.iter().enumerate() {
            let shifted = c - CMatrix::identity(self.dim, self.dim) * self.point[k];
            stacked.rows_mut(k * self.dim, self.dim).copy_from(&shifted);
        }
        let local = smallest_singular_vectors(&stacked, 1);
        &self.basis * local.column(0)
    }

    /// For a two-dimensional block, the chain partner: the direction
    /// orthogonal to the common eigenvector inside the block. Every
    /// operator maps it into the eigenvector line.
    pub fn chain_partner(&self) -> Result<CVector> {
        if self.dim != 2 {
            return Err(Error::InvalidInput(format!(
                "chain partner requested on a block of dimension {}",
                self.dim
            )));
        }
        let n = self.restrictions.len();
        let mut stacked = CMatrix::zeros(n * 2, 2);
        for (k, c) in self.restrictions.iter().enumerate() {
            let shifted = c - CMatrix::identity(2, 2) * self.point[k];
            stacked.rows_mut(k * 2, 2).copy_from(&shifted);
        }
        let local = smallest_singular_vectors(&stacked, 1);
        let perp = CVector::from_column_slice(&[-local[(1, 0)].conj(), local[(0, 0)].conj()]);
        Ok(&self.basis * perp)
    }
}

/// The complete splitting into joint generalized eigenspaces.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub spaces: Vec<JointEigenspace>,
    /// Worst invariance defect max‖Wₖ·V − V·Cₖ‖ over all blocks.
    pub residual: f64,
}

impl SpectralData {
    pub fn total_multiplicity(&self) -> usize {
        self.spaces.iter().map(|s| s.dim).sum()
    }

    pub fn all_simple(&self) -> bool {
        self.spaces.iter().all(|s| s.dim == 1)
    }

    pub fn max_multiplicity(&self) -> usize {
        self.spaces.iter().map(|s| s.dim).max().unwrap_or(0)
    }
}

/// Orthonormal right singular vectors for the `take` smallest singular
/// values.
fn smallest_singular_vectors(m: &CMatrix, take: usize) -> CMatrix {
    let cols = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[a]
            .partial_cmp(&svd.singular_values[b])
            .unwrap()
    });
    // rows of v_t beyond the singular-value count span the exact kernel of
    // a wide matrix; nalgebra never returns them, so guard the dimension
    let mut out = CMatrix::zeros(cols, take);
    for (j, &i) in order.iter().take(take).enumerate() {
        out.set_column(j, &vt.row(i).transpose().map(|z| z.conj()));
    }
    out
}

fn single_linkage_clusters(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Power norms of a genuinely nilpotent shifted block stay below this
/// floor; it covers rounding in the powering itself plus entry noise in
/// operators produced by the numeric solver.
fn nil_floor(op_scale: f64, a_scale: f64, t: usize) -> f64 {
    1e-10 * op_scale.max(1.0) * a_scale.max(1.0).powi(t.saturating_sub(1) as i32)
}

/// Whether `c` has a single eigenvalue, by clustering backed up with a
/// nilpotency power test (clustering alone over-splits defective blocks).
fn has_single_eigenvalue(c: &CMatrix, config: &Config) -> Option<Complex64> {
    let m = c.nrows();
    let mu = c.trace() / Complex64::new(m as f64, 0.0);
    if m == 1 {
        return Some(mu);
    }
    let eigs = eigenvalues(c);
    let scale = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if single_linkage_clusters(&eigs, config.cluster_tol * (1.0 + scale)).len() == 1 {
        return Some(mu);
    }
    // clustering disagrees; a defective eigenvalue scatters by at most
    // about ‖C‖·ε^{1/m} under rounding, so only spreads inside that radius
    // may be rescued by the nilpotency test
    let op_scale = max_abs(c);
    let spread = eigs.iter().map(|z| (z - mu).norm()).fold(0.0, f64::max);
    if spread > 2.0 * op_scale.max(1.0) * 1e-13f64.powf(1.0 / m as f64) {
        return None;
    }
    let a = c - CMatrix::identity(m, m) * mu;
    let mut pow = a.clone();
    for _ in 1..m {
        pow = &pow * &a;
    }
    if max_abs(&pow) <= nil_floor(op_scale, max_abs(&a), m) {
        Some(mu)
    } else {
        None
    }
}

fn nilpotency_index(c: &CMatrix, mu: Complex64, _config: &Config) -> usize {
    let m = c.nrows();
    let a = c - CMatrix::identity(m, m) * mu;
    let op_scale = max_abs(c);
    let a_scale = max_abs(&a);
    let mut pow = a.clone();
    for t in 1..=m {
        if max_abs(&pow) <= nil_floor(op_scale, a_scale, t) {
            return t;
        }
        pow = &pow * &a;
    }
    // not visibly nilpotent; report the full dimension as a ceiling
    m
}

struct Leaf {
    point: Vec<Complex64>,
    /// Ambient orthonormal basis of the block.
    basis: CMatrix,
}

fn refine(
    ops: &[CMatrix],
    ambient: &CMatrix,
    rng: &mut ChaCha8Rng,
    config: &Config,
    depth: usize,
    out: &mut Vec<Leaf>,
) -> Result<()> {
    let m = ops[0].nrows();
    if depth > m + 32 {
        return Err(Error::InvalidInput(
            "eigenvalue refinement recursion exceeded its depth bound".into(),
        ));
    }
    // leaf when every operator carries one eigenvalue
    let mut point = Vec::with_capacity(ops.len());
    let mut is_leaf = true;
    for c in ops {
        match has_single_eigenvalue(c, config) {
            Some(mu) => point.push(mu),
            None => {
                is_leaf = false;
                break;
            }
        }
    }
    if is_leaf {
        out.push(Leaf {
            point,
            basis: ambient.clone(),
        });
        return Ok(());
    }

    for _attempt in 0..8 {
        let n = CMatrix::zeros(m, m);
        let n = ops.iter().fold(n, |acc, c| {
            acc + c * Complex64::new(f64::from(rng.gen_range(1..1000)), 0.0)
        });
        let eigs = eigenvalues(&n);
        let scale = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let clusters = single_linkage_clusters(&eigs, config.cluster_tol * (1.0 + scale));
        if clusters.len() < 2 {
            continue;
        }
        let mut pieces = Vec::new();
        let mut ok = true;
        for cluster in &clusters {
            let mc = cluster.len();
            let center = cluster.iter().map(|&i| eigs[i]).sum::<Complex64>()
                / Complex64::new(mc as f64, 0.0);
            let shifted = &n - CMatrix::identity(m, m) * center;
            let mut pow = CMatrix::identity(m, m);
            for _ in 0..mc {
                pow = &pow * &shifted;
            }
            let v = smallest_singular_vectors(&pow, mc);
            // restrictions stay faithful only if the block is invariant
            let mut restricted = Vec::with_capacity(ops.len());
            for c in ops {
                let cv = c * &v;
                let local = v.adjoint() * &cv;
                let defect = max_abs(&(&cv - &v * &local));
                if defect > config.eig_tol * (1.0 + max_abs(c)) * 100.0 {
                    ok = false;
                    break;
                }
                restricted.push(local);
            }
            if !ok {
                break;
            }
            pieces.push((v, restricted));
        }
        if !ok || pieces.iter().map(|(v, _)| v.ncols()).sum::<usize>() != m {
            continue;
        }
        for (v, restricted) in pieces {
            let next_ambient = ambient * &v;
            refine(&restricted, &next_ambient, rng, config, depth + 1, out)?;
        }
        return Ok(());
    }
    Err(Error::InvalidInput(
        "eigenvalue refinement stalled on a block that never split".into(),
    ))
}

/// Split the commuting family into joint generalized eigenspaces.
pub fn joint_eigenspaces(ops: &[CMatrix], seed: u64, config: &Config) -> Result<SpectralData> {
    if ops.is_empty() {
        return Err(Error::InvalidInput("no operators to analyze".into()));
    }
    let r = ops[0].nrows();
    for c in ops {
        if c.nrows() != r || c.ncols() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: c.nrows(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut leaves = Vec::new();
    refine(
        ops,
        &CMatrix::identity(r, r),
        &mut rng,
        config,
        0,
        &mut leaves,
    )?;

    let mut spaces = Vec::with_capacity(leaves.len());
    let mut residual: f64 = 0.0;
    for leaf in leaves {
        let dim = leaf.basis.ncols();
        let mut restrictions = Vec::with_capacity(ops.len());
        let mut nil = 1;
        for (k, c) in ops.iter().enumerate() {
            let cv = c * &leaf.basis;
            let local = leaf.basis.adjoint() * &cv;
            residual = residual.max(max_abs(&(&cv - &leaf.basis * &local)));
            nil = nil.max(nilpotency_index(&local, leaf.point[k], config));
            restrictions.push(local);
        }
        spaces.push(JointEigenspace {
            point: leaf.point,
            dim,
            nilindex: nil,
            basis: leaf.basis,
            restrictions,
        });
    }
    if spaces.iter().map(|s| s.dim).sum::<usize>() != r {
        return Err(Error::MultiplicityMismatch {
            expected: r,
            got: spaces.iter().map(|s| s.dim).sum::<usize>(),
        });
    }
    spaces.sort_by(|a, b| {
        b.dim.cmp(&a.dim).then_with(|| {
            for (x, y) in a.point.iter().zip(&b.point) {
                let key = (x.re - y.re, x.im - y.im);
                if key.0.abs() > 1e-9 {
                    return x.re.partial_cmp(&y.re).unwrap();
                }
                if key.1.abs() > 1e-9 {
                    return x.im.partial_cmp(&y.im).unwrap();
                }
            }
            std::cmp::Ordering::Equal
        })
    });
    Ok(SpectralData { spaces, residual })
}
