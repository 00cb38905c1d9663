//! Smooth periodic steady states of the viscosity-regularized system.
//!
//! After scaling the period to `[-1/epsilon, 1/epsilon]` the steady problem
//! reduces to `-v_yy = p(v) - sigma` with the mean-volume constraint, and
//! every nonconstant periodic solution lives on a closed orbit of the first
//! integral `(1/2) v_y^2 = W(v) + sigma v - lambda =: f(v)`. A solution with
//! `2N` monotonicity changes exists exactly when the period and mass moments
//! of the orbit satisfy `N I_0 = 1/epsilon` and `N I_1 = vbar/epsilon`,
//! where `I_n = (1/sqrt 2) integral s^n f^{-1/2} ds` between the turning
//! points.
//!
//! The solver works in logarithmic gap coordinates `(k1, k2)` with
//! `h_i = exp(mu_i k_i) exp(-c_i(vbar)/epsilon)`: the gaps between `lambda`
//! and the tilted-well minima collapse exponentially as `epsilon` shrinks,
//! so Newton iteration on `(sigma, lambda)` directly would lose every digit,
//! while the residual is nearly affine in `(k1, k2)`.

mod orbit;
mod solver;

pub(crate) use orbit::{exp_diff, Orbit, QUAD_REL_TOL};

use crate::eos::{self, EosParams, Landscape};
use crate::potential::Potential;
use crate::report::csv_table;
use crate::solve1d::bracketed_root;
use crate::{Error, Result};
use serde::Serialize;

/// Default number of grid intervals for reconstructed profiles.
pub const DEFAULT_GRID: usize = 4096;

/// The double-well potential `W(v)` anchored at the mean volume:
/// `W(v) = -(a/v - a/vbar) - R theta ln((v-b)/(vbar-b))`, so `W(vbar) = 0`,
/// `W' = -p`, `W'' = -p'`.
pub fn potential_w(params: &EosParams, vbar: f64, v: f64) -> Result<f64> {
    Potential::new(params, vbar)?.w(v)
}

/// The shifted well `H(V) = integral_0^V (p(vbar) - p(s + vbar)) ds` in
/// closed form.
pub fn double_well_h(params: &EosParams, vbar: f64, shift: f64) -> Result<f64> {
    Potential::new(params, vbar)?.h(shift)
}

/// Which branch of the admissible `lambda` range is active for a solved
/// orbit: the lower level bound sits at the vapor-side plateau when
/// `sigma > sigma0` and at the liquid-side plateau otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LambdaBranch {
    SigmaAboveMaxwell,
    SigmaAtOrBelowMaxwell,
}

/// First-integral data of a solved orbit.
///
/// `f(z1) = f(z2) = 0` with `f > 0` strictly between; the hidden log-space
/// gap fields make exact reconstruction possible long after `lambda` itself
/// has absorbed them at double precision.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FirstIntegral {
    pub sigma: f64,
    pub lambda: f64,
    pub z1: f64,
    pub z2: f64,
    pub branch: LambdaBranch,
    #[serde(skip)]
    pub(crate) ln_h1: f64,
    #[serde(skip)]
    pub(crate) ln_h2: f64,
}

impl FirstIntegral {
    pub(crate) fn from_orbit(orbit: &Orbit, branch: LambdaBranch) -> FirstIntegral {
        FirstIntegral {
            sigma: orbit.sigma,
            lambda: orbit.lambda,
            z1: orbit.z1(),
            z2: orbit.z2(),
            branch,
            ln_h1: orbit.left.ln_h,
            ln_h2: orbit.right.ln_h,
        }
    }

    /// Log-space level gaps above the two tilted-well minima.
    pub fn ln_gaps(&self) -> (f64, f64) {
        (self.ln_h1, self.ln_h2)
    }
}

/// Rebuild the quadrature-ready orbit behind a [`FirstIntegral`].
pub(crate) fn orbit_from_first_integral(
    params: &EosParams,
    vbar: f64,
    fi: &FirstIntegral,
) -> Result<Orbit> {
    let pot = Potential::new(params, vbar)?;
    let (alpha, beta) = eos::spinodal_points(params)?;
    Orbit::from_levels(&pot, alpha, beta, fi.sigma, fi.ln_h1, fi.ln_h2)
}

/// Build an orbit from raw `(sigma, lambda)`. The gaps are recovered by
/// subtraction, so this surface rejects levels that double precision cannot
/// distinguish from the plateaus; the continuation solver avoids the issue
/// by tracking the gaps in log space from the start.
fn orbit_from_raw(params: &EosParams, vbar: f64, sigma: f64, lambda: f64) -> Result<Orbit> {
    let pot = Potential::new(params, vbar)?;
    let (alpha, beta) = eos::spinodal_points(params)?;
    let band_lo = params.p_raw(alpha).max(0.0);
    let band_hi = params.p_raw(beta);
    if !(sigma > band_lo && sigma < band_hi) {
        return Err(Error::Inadmissible(format!(
            "sigma = {sigma} outside the open band ({band_lo}, {band_hi})"
        )));
    }
    let alpha_sigma = eos::outer_liquid_root(params, alpha, sigma)?;
    let xi = eos::middle_root(params, alpha, beta, sigma)?;
    let beta_sigma = eos::outer_vapor_root(params, beta, sigma)?;
    let h1 = lambda - pot.tilted(alpha_sigma, sigma);
    let h2 = lambda - pot.tilted(beta_sigma, sigma);
    let hilltop = pot.tilted(xi, sigma);
    if h1 <= 0.0 {
        return Err(Error::Inadmissible(format!(
            "lambda = {lambda} at or below the liquid plateau level {} (lower bound violated)",
            pot.tilted(alpha_sigma, sigma)
        )));
    }
    if h2 <= 0.0 {
        return Err(Error::Inadmissible(format!(
            "lambda = {lambda} at or below the vapor plateau level {} (lower bound violated)",
            pot.tilted(beta_sigma, sigma)
        )));
    }
    if lambda >= hilltop {
        return Err(Error::Inadmissible(format!(
            "lambda = {lambda} at or above the hilltop level {hilltop} (upper bound violated)"
        )));
    }
    Orbit::from_levels(&pot, alpha, beta, sigma, h1.ln(), h2.ln())
}

/// The two roots `z1 < z2` of `W(v) + sigma v - lambda` for an admissible
/// pair, with `z1` between the liquid plateau and the hilltop and `z2`
/// between the hilltop and the vapor plateau.
pub fn turning_points(
    params: &EosParams,
    vbar: f64,
    sigma: f64,
    lambda: f64,
) -> Result<(f64, f64)> {
    let orbit = orbit_from_raw(params, vbar, sigma, lambda)?;
    Ok((orbit.z1(), orbit.z2()))
}

/// The singular moments `I_0 = (1/sqrt 2) integral f^{-1/2} ds` and
/// `I_1 = (1/sqrt 2) integral s f^{-1/2} ds` over `[z1, z2]`.
///
/// Errors on hilltop collapse (`z2 - z1` below 1e-10) and on numerically
/// double turning-point zeros, where a raw `(sigma, lambda)` description
/// has already lost the gap.
pub fn period_integrals(
    params: &EosParams,
    vbar: f64,
    sigma: f64,
    lambda: f64,
) -> Result<(f64, f64)> {
    let orbit = orbit_from_raw(params, vbar, sigma, lambda)?;
    for side in [&orbit.left, &orbit.right] {
        let slope = side.w2 * side.delta;
        if slope.abs() < 1e-12 {
            return Err(Error::NonSimpleZero { slope });
        }
    }
    Ok(orbit.inv_sqrt_integrals(QUAD_REL_TOL))
}

/// Shape classification of a solved profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolutionKind {
    SinglePeak,
    SingleValley,
    MultiInterface,
    Constant,
}

/// Requested orientation of the basic oscillation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Peak,
    Valley,
}

/// Residual diagnostics attached to every reconstructed solution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolveResiduals {
    /// `|epsilon N I_0 - 1|`.
    pub period: f64,
    /// `|epsilon N I_1 - vbar|`.
    pub mass: f64,
    /// Max deviation of `(1/2) v_y^2` (centered differences) from `f(v)`
    /// on the stored grid.
    pub first_integral: f64,
    /// `|grid mean - vbar|`.
    pub mean: f64,
    /// `|v(-1/eps) - v(1/eps)|` across the stored period.
    pub periodicity: f64,
}

/// One sample of a reconstructed profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub v: f64,
}

/// A smooth periodic steady state on `[-1/epsilon, 1/epsilon]` in the
/// stretched variable `y = x/epsilon`.
#[derive(Debug, Clone, Serialize)]
pub struct ViscousSolution {
    pub epsilon: f64,
    pub vbar: f64,
    pub kind: SolutionKind,
    /// Number of monotonicity changes per period (`2N`); zero for constants.
    pub n_transitions: u32,
    pub first_integral: FirstIntegral,
    pub residuals: SolveResiduals,
    #[serde(skip)]
    pub grid: Vec<GridPoint>,
}

impl ViscousSolution {
    /// Number of basic cells `N`.
    pub fn n_cells(&self) -> u32 {
        self.n_transitions / 2
    }

    /// The trivial constant solution `v = vbar` (always a steady state).
    pub fn constant(
        params: &EosParams,
        vbar: f64,
        epsilon: f64,
        grid_size: usize,
    ) -> Result<ViscousSolution> {
        let pot = Potential::new(params, vbar)?;
        let sigma = params.p_raw(vbar);
        let lambda = pot.tilted(vbar, sigma);
        let n = grid_size.max(2);
        let mut grid = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let y = -1.0 / epsilon + 2.0 / epsilon * j as f64 / n as f64;
            grid.push(GridPoint {
                x: epsilon * y,
                y,
                v: vbar,
            });
        }
        Ok(ViscousSolution {
            epsilon,
            vbar,
            kind: SolutionKind::Constant,
            n_transitions: 0,
            first_integral: FirstIntegral {
                sigma,
                lambda,
                z1: vbar,
                z2: vbar,
                branch: LambdaBranch::SigmaAtOrBelowMaxwell,
                ln_h1: f64::NEG_INFINITY,
                ln_h2: f64::NEG_INFINITY,
            },
            residuals: SolveResiduals {
                period: 0.0,
                mass: 0.0,
                first_integral: 0.0,
                mean: 0.0,
                periodicity: 0.0,
            },
            grid,
        })
    }

    /// CSV rows `(x, y, v)` over one period.
    pub fn to_csv(&self) -> String {
        csv_table(
            "x,y,v",
            &self
                .grid
                .iter()
                .map(|g| vec![g.x, g.y, g.v])
                .collect::<Vec<_>>(),
        )
    }
}

/// Sample a solved first integral onto a uniform grid over one period.
///
/// The valley (or peak) center sits at `y = shift`; the profile is the
/// `n_cells`-fold tiling of the basic oscillation.
#[allow(clippy::too_many_arguments)]
pub fn reconstruct_profile(
    params: &EosParams,
    vbar: f64,
    epsilon: f64,
    fi: &FirstIntegral,
    kind: Orientation,
    n_cells: u32,
    grid_size: usize,
    shift: f64,
) -> Result<ViscousSolution> {
    if grid_size < 64 {
        return Err(Error::Domain(format!(
            "grid_size must be at least 64, got {grid_size}"
        )));
    }
    if n_cells == 0 {
        return Err(Error::Domain("n_cells must be positive".into()));
    }
    let orbit = orbit_from_first_integral(params, vbar, fi)?;
    let map = orbit.profile_map();
    let half = map.half_period;
    let pot = Potential::new(params, vbar)?;

    let n = grid_size;
    let dy = 2.0 / (epsilon * n as f64);
    let mut grid = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let y = -1.0 / epsilon + j as f64 * dy;
        let phase = match kind {
            Orientation::Valley => y - shift,
            Orientation::Peak => y - shift + half,
        };
        let v = map.v_valley(phase);
        grid.push(GridPoint {
            x: epsilon * y,
            y,
            v,
        });
    }

    let (i0, i1) = orbit.inv_sqrt_integrals(QUAD_REL_TOL);
    let scale = epsilon * n_cells as f64;
    let mean = grid[..n].iter().map(|g| g.v).sum::<f64>() / n as f64;
    let mut fi_dev = 0.0_f64;
    for j in 0..=n {
        let prev = if j == 0 { n - 1 } else { j - 1 };
        let next = if j == n { 1 } else { j + 1 };
        let vy = (grid[next].v - grid[prev].v) / (2.0 * dy);
        let f_here = pot.tilted(grid[j].v, fi.sigma) - fi.lambda;
        fi_dev = fi_dev.max((0.5 * vy * vy - f_here).abs());
    }
    let residuals = SolveResiduals {
        period: (scale * i0 - 1.0).abs(),
        mass: (scale * i1 - vbar).abs(),
        first_integral: fi_dev,
        mean: (mean - vbar).abs(),
        periodicity: (grid[0].v - grid[n].v).abs(),
    };
    let kind = if n_cells == 1 {
        match kind {
            Orientation::Peak => SolutionKind::SinglePeak,
            Orientation::Valley => SolutionKind::SingleValley,
        }
    } else {
        SolutionKind::MultiInterface
    };
    Ok(ViscousSolution {
        epsilon,
        vbar,
        kind,
        n_transitions: 2 * n_cells,
        first_integral: *fi,
        residuals,
        grid,
    })
}

/// Viscosity above which the constant state is the only steady solution:
/// `eps* = sqrt(max p' on [alpha, beta]) / pi`.
pub fn triviality_threshold(params: &EosParams, landscape: &Landscape) -> f64 {
    // p'' crosses from + to - exactly once between the spinodal points.
    let v_star = bracketed_root(
        |v| params.d2p_raw(v),
        |v| params.d3p_raw(v),
        landscape.alpha,
        landscape.beta,
    )
    .unwrap_or(0.5 * (landscape.alpha + landscape.beta));
    params.dp_raw(v_star).max(0.0).sqrt() / std::f64::consts::PI
}

/// Logarithmic gap coordinates of a solved orbit: `h_i = exp(mu_i k_i)
/// exp(-c_i(vbar)/epsilon)` with scales set by the well curvatures at the
/// Maxwell points.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HCoordinates {
    pub h1: f64,
    pub h2: f64,
    pub k1: f64,
    pub k2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
}

/// The gap-coordinate scales for a given landscape and mean volume.
pub(crate) fn gap_scales(
    params: &EosParams,
    landscape: &Landscape,
    vbar: f64,
) -> (f64, f64, f64, f64, f64, f64) {
    let width = landscape.maxwell_width();
    let w2_a = -params.dp_raw(landscape.alpha0);
    let w2_b = -params.dp_raw(landscape.beta0);
    let b1 = 1.0 / (2.0 * w2_a).sqrt();
    let b2 = 1.0 / (2.0 * w2_b).sqrt();
    let mu1 = 1.0 / (b1 * width);
    let mu2 = 1.0 / (b2 * width);
    let c1 = 2.0 * (landscape.beta0 - vbar) / (b1 * width);
    let c2 = 2.0 * (vbar - landscape.alpha0) / (b2 * width);
    (b1, b2, mu1, mu2, c1, c2)
}

/// Express a solved first integral in the gap coordinates.
pub fn h_coordinates(
    params: &EosParams,
    landscape: &Landscape,
    vbar: f64,
    epsilon: f64,
    fi: &FirstIntegral,
) -> HCoordinates {
    let (b1, b2, mu1, mu2, c1, c2) = gap_scales(params, landscape, vbar);
    let (ln_h1, ln_h2) = fi.ln_gaps();
    HCoordinates {
        h1: ln_h1.exp(),
        h2: ln_h2.exp(),
        k1: (ln_h1 + c1 / epsilon) / mu1,
        k2: (ln_h2 + c2 / epsilon) / mu2,
        mu1,
        mu2,
        b1,
        b2,
        c1,
        c2,
    }
}

pub(crate) use solver::solve_cell;
pub use solver::{solve_2n, solve_two_interface};
