use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building landscapes, profiles, or
/// solutions.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A specific volume at or below the co-volume `b`, or another argument
    /// outside its physical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The temperature does not admit a two-phase landscape.
    #[error("supercritical temperature: theta = {theta} >= theta_c = {theta_c} (require theta < theta_c = 8a/(27Rb))")]
    Supercritical { theta: f64, theta_c: f64 },

    /// Temperature so close to critical that the distinguished volumes merge
    /// below root tolerance.
    #[error(
        "near-critical temperature: theta_c - theta = {gap:.3e} is below the resolvable separation"
    )]
    NearCritical { gap: f64 },

    /// A pressure level outside the three-root band.
    #[error("pressure {sigma} outside the three-root band ({lo}, {hi})")]
    OutOfBand { sigma: f64, lo: f64, hi: f64 },

    /// The vapor-side companion volume does not exist because the local
    /// pressure minimum is non-positive.
    #[error("vapor companion volume undefined: p(alpha) = {sigma_lo:.6e} <= 0, the decaying vapor branch never reaches it")]
    CompanionUndefined { sigma_lo: f64 },

    /// An iteration failed to reach its tolerance.
    #[error("no convergence in {what}: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence {
        what: String,
        residual: f64,
        iterations: usize,
    },

    /// A `(sigma, lambda)` pair outside the admissible set for closed orbits.
    #[error("inadmissible (sigma, lambda): {0}")]
    Inadmissible(String),

    /// A two-phase profile was requested for a mean volume outside the
    /// Maxwell region.
    #[error(
        "infeasible profile: mean volume {vbar} outside the Maxwell region ({alpha0}, {beta0})"
    )]
    Infeasible { vbar: f64, alpha0: f64, beta0: f64 },

    /// A phase-length offset outside its allowed range.
    #[error("interface offset {offset} outside [0, {max}]")]
    OffsetOutOfRange { offset: f64, max: f64 },

    /// Turning points too close to distinguish (orbit collapsed to the
    /// hilltop).
    #[error("near-degenerate orbit: z2 - z1 = {gap:.3e} below tolerance")]
    NearDegenerate { gap: f64 },

    /// A turning point where the first integral has a numerically double
    /// zero; raw (sigma, lambda) arithmetic cannot resolve it.
    #[error("non-simple zero at a turning point: |f'(z)| = {slope:.3e}; the level is indistinguishable from the plateau at double precision")]
    NonSimpleZero { slope: f64 },

    /// The period/mass system has no solution at this viscosity.
    #[error("no nonconstant solution at epsilon = {epsilon}: {detail} (triviality threshold epsilon* = {eps_star:.6e})")]
    NoSolution {
        epsilon: f64,
        eps_star: f64,
        detail: String,
    },

    /// Not enough sweep rows for a fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A zero-mean constraint violated beyond tolerance.
    #[error("mean constraint violated: |mean| = {mean:.3e} exceeds {tol:.1e}")]
    MeanViolation { mean: f64, tol: f64 },

    /// Two independent evaluation routes disagree.
    #[error("cross-check mismatch in {what}: {a} vs {b} (relative {rel:.3e})")]
    CrossCheckMismatch {
        what: String,
        a: f64,
        b: f64,
        rel: f64,
    },

    /// Adaptive quadrature could not reach its tolerance.
    #[error("quadrature failure: {0}")]
    Quadrature(String),

    /// Invalid run configuration (CLI surface).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
