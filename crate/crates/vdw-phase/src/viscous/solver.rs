//! Damped Newton iteration in the logarithmic gap coordinates, with
//! geometric continuation in the viscosity.

use super::orbit::{exp_diff, Orbit, QUAD_REL_TOL};
use super::{
    gap_scales, reconstruct_profile, triviality_threshold, FirstIntegral, LambdaBranch,
    Orientation, ViscousSolution, DEFAULT_GRID,
};
use crate::eos::{self, EosParams, Landscape};
use crate::potential::Potential;
use crate::{Error, Result};

const NEWTON_TOL: f64 = 1e-10;
const NEWTON_ACCEPT: f64 = 1e-8;
const MAX_NEWTON: usize = 60;
const FD_STEP: f64 = 1e-6;
const LADDER_RATIO: f64 = 0.8;

/// The per-cell period/mass system at fixed landscape and mean volume.
struct CellSystem {
    params: EosParams,
    pot: Potential,
    vbar: f64,
    alpha: f64,
    beta: f64,
    sigma0: f64,
    width0: f64,
    band: (f64, f64),
    mu: [f64; 2],
    c: [f64; 2],
}

impl CellSystem {
    fn new(params: &EosParams, landscape: &Landscape, vbar: f64) -> Result<CellSystem> {
        let pot = Potential::new(params, vbar)?;
        let (alpha, beta) = eos::spinodal_points(params)?;
        let (_, _, mu1, mu2, c1, c2) = gap_scales(params, landscape, vbar);
        Ok(CellSystem {
            params: *params,
            pot,
            vbar,
            alpha,
            beta,
            sigma0: landscape.sigma0,
            width0: landscape.maxwell_width(),
            band: landscape.isobar_band(),
            mu: [mu1, mu2],
            c: [c1, c2],
        })
    }

    /// Pressure level consistent with the gap difference `h1 - h2`: the
    /// level difference of the two tilted-well minima is strictly increasing
    /// in sigma, so a couple of Newton corrections from the Maxwell seed
    /// land at machine accuracy.
    fn sigma_for(&self, ln_h1: f64, ln_h2: f64) -> Result<f64> {
        let dh = exp_diff(ln_h1, ln_h2);
        let mut sigma = self.sigma0 + dh / self.width0;
        let (lo, hi) = self.band;
        let margin = 1e-9 * (hi - lo);
        for _ in 0..3 {
            if !(sigma > lo + margin && sigma < hi - margin) {
                return Err(Error::Inadmissible(format!(
                    "sigma update left the three-root band: sigma = {sigma}"
                )));
            }
            let a_s = eos::outer_liquid_root(&self.params, self.alpha, sigma)?;
            let b_s = eos::outer_vapor_root(&self.params, self.beta, sigma)?;
            let g = self.pot.tilted(b_s, sigma) - self.pot.tilted(a_s, sigma);
            let step = (dh - g) / (b_s - a_s);
            sigma += step;
            if step.abs() < 1e-15 * sigma.abs().max(1.0) {
                break;
            }
        }
        Ok(sigma)
    }

    fn orbit_at(&self, k: [f64; 2], eps_cell: f64) -> Result<Orbit> {
        let ln_h1 = self.mu[0] * k[0] - self.c[0] / eps_cell;
        let ln_h2 = self.mu[1] * k[1] - self.c[1] / eps_cell;
        let sigma = self.sigma_for(ln_h1, ln_h2)?;
        Orbit::from_levels(&self.pot, self.alpha, self.beta, sigma, ln_h1, ln_h2)
    }

    fn residual(&self, k: [f64; 2], eps_cell: f64) -> Result<([f64; 2], Orbit)> {
        let orbit = self.orbit_at(k, eps_cell)?;
        let (i0, i1) = orbit.inv_sqrt_integrals(QUAD_REL_TOL);
        Ok(([eps_cell * i0 - 1.0, eps_cell * i1 - self.vbar], orbit))
    }

    /// Damped Newton with a forward-difference Jacobian in `k`.
    fn newton(&self, eps_cell: f64, k0: [f64; 2]) -> Result<([f64; 2], Orbit, [f64; 2])> {
        let norm = |r: &[f64; 2]| r[0].abs().max(r[1].abs());
        let mut k = k0;
        let (mut r, mut orbit) = self.residual(k, eps_cell)?;
        for _ in 0..MAX_NEWTON {
            if norm(&r) < NEWTON_TOL {
                return Ok((k, orbit, r));
            }
            let (r1, _) = self.residual([k[0] + FD_STEP, k[1]], eps_cell)?;
            let (r2, _) = self.residual([k[0], k[1] + FD_STEP], eps_cell)?;
            let j = [
                [(r1[0] - r[0]) / FD_STEP, (r2[0] - r[0]) / FD_STEP],
                [(r1[1] - r[1]) / FD_STEP, (r2[1] - r[1]) / FD_STEP],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-300 {
                return Err(Error::NoConvergence {
                    what: "singular Jacobian in the gap-coordinate Newton".into(),
                    residual: norm(&r),
                    iterations: MAX_NEWTON,
                });
            }
            let dk = [
                -(j[1][1] * r[0] - j[0][1] * r[1]) / det,
                -(-j[1][0] * r[0] + j[0][0] * r[1]) / det,
            ];
            let mut t = 1.0;
            let mut advanced = false;
            for _ in 0..45 {
                let trial = [k[0] + t * dk[0], k[1] + t * dk[1]];
                if let Ok((r_t, orbit_t)) = self.residual(trial, eps_cell) {
                    if norm(&r_t) < norm(&r) {
                        k = trial;
                        r = r_t;
                        orbit = orbit_t;
                        advanced = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !advanced {
                break;
            }
        }
        if norm(&r) < NEWTON_ACCEPT {
            Ok((k, orbit, r))
        } else {
            Err(Error::NoConvergence {
                what: "gap-coordinate Newton stalled".into(),
                residual: norm(&r),
                iterations: MAX_NEWTON,
            })
        }
    }
}

/// Solve the cell problem at `eps_cell = epsilon * N`.
///
/// With a warm start `(epsilon_prev, k_prev)` from a neighboring viscosity
/// the guess is rescaled by the viscosity ratio (the solved coordinates grow
/// like `1/epsilon`); otherwise the direct solve runs from the origin and
/// falls back to continuation from a larger solvable viscosity.
pub(crate) fn solve_cell(
    params: &EosParams,
    landscape: &Landscape,
    vbar: f64,
    epsilon: f64,
    n_cells: u32,
    warm: Option<(f64, [f64; 2])>,
) -> Result<(Orbit, [f64; 2])> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Domain(format!(
            "epsilon must be positive: {epsilon}"
        )));
    }
    if !(vbar > landscape.alpha0 && vbar < landscape.beta0) {
        return Err(Error::Infeasible {
            vbar,
            alpha0: landscape.alpha0,
            beta0: landscape.beta0,
        });
    }
    let sys = CellSystem::new(params, landscape, vbar)?;
    let eps_cell = epsilon * n_cells as f64;
    let eps_star = triviality_threshold(params, landscape);

    if let Some((eps_prev, k_prev)) = warm {
        let eps_prev_cell = eps_prev * n_cells as f64;
        let guess = [
            k_prev[0] * eps_prev_cell / eps_cell,
            k_prev[1] * eps_prev_cell / eps_cell,
        ];
        if let Ok((k, orbit, _)) = sys.newton(eps_cell, guess) {
            return Ok((orbit, k));
        }
    }
    if let Ok((k, orbit, _)) = sys.newton(eps_cell, [0.0, 0.0]) {
        return Ok((orbit, k));
    }

    // Find the largest solvable anchor on a geometric grid below the
    // triviality threshold, then walk down to the target, rescaling the
    // warm start (the solved k grows like 1/epsilon).
    let mut anchor: Option<(f64, [f64; 2])> = None;
    let mut eps_try = 0.9 * eps_star;
    for _ in 0..30 {
        if eps_try <= eps_cell {
            break;
        }
        if let Ok((k, _, _)) = sys.newton(eps_try, [0.0, 0.0]) {
            anchor = Some((eps_try, k));
            break;
        }
        eps_try *= LADDER_RATIO;
    }
    let (mut eps_here, mut k_here) = anchor.ok_or_else(|| Error::NoSolution {
        epsilon,
        eps_star,
        detail: format!(
            "no solvable anchor viscosity found above the target (cell viscosity {eps_cell:.6e})"
        ),
    })?;

    loop {
        let eps_next = (eps_here * LADDER_RATIO).max(eps_cell);
        let k_guess = [
            k_here[0] * eps_here / eps_next,
            k_here[1] * eps_here / eps_next,
        ];
        match sys.newton(eps_next, k_guess) {
            Ok((k, orbit, _)) => {
                if eps_next <= eps_cell {
                    return Ok((orbit, k));
                }
                eps_here = eps_next;
                k_here = k;
            }
            Err(e) => {
                return Err(Error::NoSolution {
                    epsilon,
                    eps_star,
                    detail: format!("continuation stalled at cell viscosity {eps_next:.6e}: {e}"),
                });
            }
        }
    }
}

/// Solve for the basic two-interface (single peak or valley) state.
pub fn solve_two_interface(
    params: &EosParams,
    landscape: &Landscape,
    vbar: f64,
    epsilon: f64,
    kind: Orientation,
) -> Result<ViscousSolution> {
    solve_2n(params, landscape, vbar, epsilon, 1, kind)
}

/// Solve for the state with `2 n_cells` monotonicity changes per period:
/// the basic oscillation tiled `n_cells` times, with the cell period/mass
/// moments scaled by `n_cells`.
pub fn solve_2n(
    params: &EosParams,
    landscape: &Landscape,
    vbar: f64,
    epsilon: f64,
    n_cells: u32,
    kind: Orientation,
) -> Result<ViscousSolution> {
    if n_cells == 0 {
        return Err(Error::Domain("n_cells must be positive".into()));
    }
    let (orbit, _) = solve_cell(params, landscape, vbar, epsilon, n_cells, None)?;
    let branch = if orbit.sigma > landscape.sigma0 {
        LambdaBranch::SigmaAboveMaxwell
    } else {
        LambdaBranch::SigmaAtOrBelowMaxwell
    };
    let fi = FirstIntegral::from_orbit(&orbit, branch);
    reconstruct_profile(params, vbar, epsilon, &fi, kind, n_cells, DEFAULT_GRID, 0.0)
}
