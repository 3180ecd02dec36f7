//! Enumeration of complete-staircase monomial bases.
//!
//! A complete staircase is a divisor-closed monomial set that contains 1 and
//! every degree-one monomial. Because the canonical monomial order refines
//! divisibility, every such set can be built by inserting its elements in
//! increasing order, which gives a duplicate-free depth-first enumeration.

use crate::polyring::{monomials_up_to_degree, MultiIndex};

/// Ordered complete-staircase monomial basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaircaseBasis {
    pub monomials: Vec<MultiIndex>,
    pub nvars: usize,
    pub degree_cap: u32,
}

impl StaircaseBasis {
    pub fn size(&self) -> usize {
        self.monomials.len()
    }

    /// Position of the monomial 1 (always 0) and of each variable inside the
    /// basis; completeness guarantees they exist.
    pub fn index_of(&self, m: &MultiIndex) -> Option<usize> {
        self.monomials.iter().position(|b| b == m)
    }

    /// Sum of the total degrees of the members; the enumeration's primary key.
    pub fn degree_sum(&self) -> u32 {
        self.monomials.iter().map(MultiIndex::degree).sum()
    }
}

/// True iff `set` (sorted, duplicate-free) is divisor-closed and contains 1
/// and all degree-one monomials.
pub fn is_complete_staircase(set: &[MultiIndex], nvars: usize) -> bool {
    if set.is_empty() || set[0] != MultiIndex::zero(nvars) {
        return false;
    }
    for i in 0..nvars {
        if !set.contains(&MultiIndex::unit(nvars, i)) {
            return false;
        }
    }
    set.iter().all(|m| {
        (0..nvars).all(|i| {
            m.0[i] == 0 || {
                let mut p = m.clone();
                p.0[i] -= 1;
                set.contains(&p)
            }
        })
    })
}

/// All complete staircases in `nvars` variables with exactly `size` elements
/// of degree at most `degree_cap`, ordered by (degree sum, lexicographic on
/// the sorted monomial lists).
pub fn enumerate(nvars: usize, size: usize, degree_cap: u32) -> Vec<StaircaseBasis> {
    if size < nvars + 1 {
        return Vec::new();
    }
    let universe = monomials_up_to_degree(nvars, degree_cap);
    let base: Vec<MultiIndex> = universe.iter().take(nvars + 1).cloned().collect();
    debug_assert!(is_complete_staircase(&base, nvars));

    let mut out = Vec::new();
    let mut current = base;
    dfs_staircase(&universe, nvars, size, degree_cap, &mut current, &mut out);
    out.sort_by_key(|b| (b.degree_sum(), b.monomials.clone()));
    out
}

fn dfs_staircase(
    universe: &[MultiIndex],
    nvars: usize,
    size: usize,
    degree_cap: u32,
    current: &mut Vec<MultiIndex>,
    out: &mut Vec<StaircaseBasis>,
) {
    if current.len() == size {
        out.push(StaircaseBasis {
            monomials: current.clone(),
            nvars,
            degree_cap,
        });
        return;
    }
    let last = current.last().cloned().expect("base is non-empty");
    for cand in universe.iter().filter(|m| **m > last) {
        let closed = (0..nvars).all(|i| {
            cand.0[i] == 0 || {
                let mut p = cand.clone();
                p.0[i] -= 1;
                current.contains(&p)
            }
        });
        if closed {
            current.push(cand.clone());
            dfs_staircase(universe, nvars, size, degree_cap, current, out);
            current.pop();
        }
    }
}

/// Number of monomial sets of the given size that contain 1 and are connected
/// to it: every other member has at least one immediate divisor in the set.
/// (Elements never need degree beyond `size - 1`.)
pub fn count_connected_to_one(nvars: usize, size: usize) -> u64 {
    if size == 0 {
        return 0;
    }
    let universe = monomials_up_to_degree(nvars, size.saturating_sub(1) as u32);
    let mut current = vec![MultiIndex::zero(nvars)];
    let mut count = 0u64;
    dfs_connected(&universe, nvars, size, &mut current, &mut count);
    count
}

fn dfs_connected(
    universe: &[MultiIndex],
    nvars: usize,
    size: usize,
    current: &mut Vec<MultiIndex>,
    count: &mut u64,
) {
    if current.len() == size {
        *count += 1;
        return;
    }
    let last = current.last().cloned().expect("starts with 1");
    for cand in universe.iter().filter(|m| **m > last) {
        let connected = (0..nvars).any(|i| {
            cand.0[i] > 0 && {
                let mut p = cand.clone();
                p.0[i] -= 1;
                current.contains(&p)
            }
        });
        if connected {
            current.push(cand.clone());
            dfs_connected(universe, nvars, size, current, count);
            current.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_basis_is_one_and_the_variables() {
        let bs = enumerate(2, 3, 3);
        assert_eq!(bs.len(), 1);
        let names: Vec<Vec<u32>> = bs[0].monomials.iter().map(|m| m.0.clone()).collect();
        assert_eq!(names, vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn counts_in_two_variables() {
        // sizes 3..7 with an unconstraining cap
        let counts: Vec<usize> = (3..=7).map(|s| enumerate(2, s, 7).len()).collect();
        assert_eq!(counts, vec![1, 3, 5, 9, 13]);
    }

    #[test]
    fn connected_counts_in_two_variables() {
        let counts: Vec<u64> = (3..=7).map(|s| count_connected_to_one(2, s)).collect();
        assert_eq!(counts, vec![5, 13, 35, 96, 267]);
    }

    #[test]
    fn every_emitted_basis_is_a_complete_staircase() {
        for size in 3..=7 {
            for b in enumerate(2, size, 7) {
                assert!(is_complete_staircase(&b.monomials, 2));
                assert_eq!(b.size(), size);
            }
        }
        for b in enumerate(3, 6, 4) {
            assert!(is_complete_staircase(&b.monomials, 3));
        }
    }

    #[test]
    fn degree_cap_restricts() {
        // with cap 1 in two variables only {1, y, z} fits
        assert_eq!(enumerate(2, 3, 1).len(), 1);
        assert_eq!(enumerate(2, 4, 1).len(), 0);
        // size below n+1 is impossible
        assert!(enumerate(2, 2, 5).is_empty());
    }

    #[test]
    fn enumeration_prefers_low_degree_sums() {
        let bs = enumerate(2, 5, 7);
        let sums: Vec<u32> = bs.iter().map(StaircaseBasis::degree_sum).collect();
        let mut sorted = sums.clone();
        sorted.sort_unstable();
        assert_eq!(sums, sorted);
    }

    #[test]
    fn exhaustive_against_brute_force() {
        // brute force over all subsets of monomials of degree <= 3 (size 4)
        use crate::polyring::monomials_up_to_degree;
        let universe = monomials_up_to_degree(2, 3);
        let mut brute = 0;
        let n = universe.len();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() != 4 {
                continue;
            }
            let set: Vec<_> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| universe[i].clone())
                .collect();
            if is_complete_staircase(&set, 2) {
                brute += 1;
            }
        }
        assert_eq!(enumerate(2, 4, 3).len(), brute);
    }
}
