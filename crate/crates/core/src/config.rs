//! Tunable tolerances and search budgets shared by the solver and drivers.

/// Degree cap for the staircase basis search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeCap {
    /// Bases drawn from monomials of degree at most the input degree d.
    InputDegree,
    /// Cap raised to max(d, current rank); strictly enlarges the search.
    Rank,
}

#[derive(Debug, Clone)]
pub struct Config {
    /// Random integer assignments tried for determinant-relevant slots.
    pub det_retries: u32,
    /// Newton starts per determinant assignment.
    pub newton_restarts: u32,
    /// Re-randomizations of the determinant-relevant slots.
    pub outer_restarts: u32,
    /// Solve attempts (seed substreams) per basis.
    pub attempts: u32,
    /// Max-abs commutator entry accepted as "commuting" on the numeric path.
    pub commute_tol: f64,
    /// |det| below this counts as singular on the numeric path.
    pub det_tol: f64,
    /// Condition-number cap on the square Hankel block for numeric solutions.
    pub cond_cap: f64,
    /// Relative singular-value threshold for numeric rank/kernel decisions.
    pub svd_tol: f64,
    /// Relative residual bound for accepting a decomposition.
    pub verify_tol: f64,
    /// Residual bound for accepting a vector as a simultaneous eigenvector.
    pub eig_tol: f64,
    /// Distance below which eigenvalues/points are merged.
    pub cluster_tol: f64,
    /// Retries of the essential-variable reduction on degeneracy.
    pub essential_retries: u32,
    /// Integer box [-B, B] for the random essential-variable mix.
    pub mix_box: i64,
    /// Denominator cap for rational reconstruction of numeric data.
    pub denom_cap: u64,
    /// Hard cap on the rank search; `None` means the full coefficient-space
    /// dimension C(n+d, d).
    pub max_rank: Option<usize>,
    pub degree_cap: DegreeCap,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            det_retries: 8,
            newton_restarts: 12,
            outer_restarts: 4,
            attempts: 3,
            commute_tol: 1e-10,
            det_tol: 1e-10,
            cond_cap: 1e12,
            svd_tol: 1e-8,
            verify_tol: 1e-8,
            eig_tol: 1e-7,
            cluster_tol: 1e-5,
            essential_retries: 5,
            mix_box: 20,
            denom_cap: 1_000_000,
            max_rank: None,
            degree_cap: DegreeCap::InputDegree,
        }
    }
}
