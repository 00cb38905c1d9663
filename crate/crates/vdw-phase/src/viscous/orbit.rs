//! Closed orbits of the first integral `(1/2) v_y^2 = W(v) + sigma v - lambda`
//! and their singular period integrals.
//!
//! An orbit is described by the pressure level `sigma` and the gaps `h_1`,
//! `h_2` between `lambda` and the two tilted-well minima at `alpha_sigma`,
//! `beta_sigma`. The gaps collapse like `exp(-c/epsilon)` in the regime of
//! interest, far below what `f64` subtraction can represent, so an [`Orbit`]
//! carries them in log space and reconstructs everything else from stable
//! factored differences.
//!
//! The period integrands `s^n f^{-1/2}` have inverse-square-root endpoint
//! singularities whose strength degenerates as the gaps vanish. Substituting
//! `u = delta cosh t` on each half (with `u` the distance to the local well
//! minimum and `delta` the turning-point offset) absorbs both the endpoint
//! singularity and the log-divergent plateau stretch: the transformed
//! integrand is `[W'' Q]^{-1/2}`, a smooth O(1) function of `t`, where
//! `Q(u, delta) = 2 (f(u) - f(delta)) / (W'' (u^2 - delta^2))` is evaluated
//! from local Taylor data near the minimum and factored differences away
//! from it.

use crate::eos;
use crate::potential::Potential;
use crate::quad::{adaptive_gl, gl20};
use crate::solve1d::bracketed_root;
use crate::{Error, Result};

/// Relative tolerance for the orbit quadratures.
pub(crate) const QUAD_REL_TOL: f64 = 1e-11;

/// Orbit half widths below this count as hilltop collapse.
pub(crate) const DEGENERATE_GAP: f64 = 1e-10;

/// t-extent of the numeric segment that resolves the turning point.
const T_NEAR: f64 = 6.0;
/// t-extent of the numeric segment that resolves the approach to the hilltop.
const T_TOP: f64 = 22.0;

/// One side of the orbit: the tilted-well minimum it hugs and the local
/// expansion of the well there.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Side {
    /// Well minimum (`alpha_sigma` on the left, `beta_sigma` on the right).
    pub x0: f64,
    /// Orientation: points from `x0` toward the hilltop (`+1` left, `-1` right).
    pub orient: f64,
    /// Distance from `x0` to the hilltop `xi_sigma`.
    pub u_top: f64,
    /// `W''(x0) > 0`.
    pub w2: f64,
    /// Orientation-folded Taylor coefficients of `q` in
    /// `phi(u) = (1/2) W'' u^2 q(u)`.
    pub c: [f64; 4],
    /// Switch between the Taylor form of `q` and the factored-difference form.
    pub u_taylor: f64,
    /// Level gap above this minimum, in log space (the primary datum).
    pub ln_h: f64,
    /// Turning-point offset from `x0`, in log space and as an `f64`
    /// (which may flush to zero harmlessly).
    pub ln_delta: f64,
    pub delta: f64,
    /// `arccosh(u_top / delta)`.
    pub t_max: f64,
}

/// A closed orbit, ready for quadrature and profile reconstruction.
#[derive(Debug, Clone)]
pub(crate) struct Orbit {
    pub pot: Potential,
    pub sigma: f64,
    /// `lambda` as an `f64`; exponentially small gaps may be absorbed into
    /// the plateau level here, the sides keep the exact log-space values.
    pub lambda: f64,
    pub xi: f64,
    pub left: Side,
    pub right: Side,
}

fn ln_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `exp(ln_a) - exp(ln_b)` without forming unrepresentable intermediates.
pub(crate) fn exp_diff(ln_a: f64, ln_b: f64) -> f64 {
    if ln_a >= ln_b {
        -ln_a.exp() * (ln_b - ln_a).exp_m1()
    } else {
        ln_b.exp() * (ln_a - ln_b).exp_m1()
    }
}

fn arccosh_safe(ratio_ln: f64) -> f64 {
    // arccosh(r) for r given as ln r; exact switch-over around r ~ 1e8
    if ratio_ln > 18.0 {
        ratio_ln + std::f64::consts::LN_2
    } else {
        let r = ratio_ln.exp();
        (r + (r * r - 1.0).max(0.0).sqrt()).ln()
    }
}

impl Side {
    fn build(
        pot: &Potential,
        sigma: f64,
        x0: f64,
        orient: f64,
        xi: f64,
        ln_h: f64,
    ) -> Result<Side> {
        let w2 = pot.w_second(x0);
        if !(w2 > 0.0) {
            return Err(Error::Inadmissible(format!(
                "tilted well not convex at its minimum: W''({x0}) = {w2}"
            )));
        }
        let u_top = (xi - x0).abs();
        let hilltop_gap = pot.tilted_diff(xi, x0, sigma);
        if !(hilltop_gap > 0.0) {
            return Err(Error::Inadmissible(format!(
                "hilltop not above the plateau at sigma = {sigma}"
            )));
        }
        if ln_h >= hilltop_gap.ln() {
            return Err(Error::Inadmissible(format!(
                "lambda at or above the hilltop level: ln h = {ln_h:.6e} vs ln gap = {:.6e}",
                hilltop_gap.ln()
            )));
        }
        let c3 = pot.w_third(x0) / (3.0 * w2);
        let c4 = pot.w_fourth(x0) / (12.0 * w2);
        let c5 = pot.w_fifth(x0) / (60.0 * w2);
        let c6 = pot.w_sixth(x0) / (360.0 * w2);
        let c = [orient * c3, c4, orient * c5, c6];
        let u_taylor = (3e-3 * (x0 - pot.params.b)).min(0.5 * u_top);

        let mut side = Side {
            x0,
            orient,
            u_top,
            w2,
            c,
            u_taylor,
            ln_h,
            ln_delta: 0.0,
            delta: 0.0,
            t_max: 0.0,
        };
        side.solve_delta(pot, sigma)?;
        Ok(side)
    }

    /// `q(u)` from the folded Taylor series; valid for `u <= u_taylor`.
    fn q_taylor(&self, u: f64) -> f64 {
        1.0 + u * (self.c[0] + u * (self.c[1] + u * (self.c[2] + u * self.c[3])))
    }

    /// Displaced well value `phi(u) = (W + sigma v)(x0 + orient u) - (W + sigma v)(x0)`.
    fn phi(&self, pot: &Potential, sigma: f64, u: f64) -> f64 {
        if u <= self.u_taylor {
            0.5 * self.w2 * u * u * self.q_taylor(u)
        } else {
            pot.tilted_diff(self.x0 + self.orient * u, self.x0, sigma)
        }
    }

    /// d phi / d u, stable for any `u`.
    fn dphi(&self, pot: &Potential, sigma: f64, u: f64) -> f64 {
        // phi'(u) = orient (sigma - p(x0 + orient u))
        let s = self.x0 + self.orient * u;
        self.orient * (sigma - pot.params.p_raw(self.x0) - pot.params.pressure_diff(s, self.x0))
    }

    /// Solve `phi(delta) = h` for the turning-point offset, working in log
    /// space whenever the gap is below the Taylor window.
    fn solve_delta(&mut self, pot: &Potential, sigma: f64) -> Result<()> {
        let ln_delta0 = 0.5 * (std::f64::consts::LN_2 + self.ln_h - self.w2.ln());
        let taylor_cut = (0.5 * self.u_taylor).ln();
        if ln_delta0 <= taylor_cut {
            // Fixed-point in log space on delta = sqrt(2h / (W'' q(delta))).
            let mut ln_delta = ln_delta0;
            for _ in 0..4 {
                let q = self.q_taylor(ln_delta.exp());
                if !(q > 0.0) {
                    return Err(Error::Inadmissible(format!(
                        "local well expansion lost convexity near x0 = {}",
                        self.x0
                    )));
                }
                ln_delta = ln_delta0 - 0.5 * q.ln();
            }
            self.ln_delta = ln_delta;
            self.delta = ln_delta.exp();
        } else {
            let h = self.ln_h.exp();
            let lo = (0.3 * ln_delta0.exp()).min(0.9 * self.u_top);
            let hi = self.u_top;
            let root = bracketed_root(
                |u| self.phi(pot, sigma, u) - h,
                |u| self.dphi(pot, sigma, u),
                lo,
                hi,
            )?;
            self.delta = root;
            self.ln_delta = root.ln();
        }
        let ratio_ln = self.u_top.ln() - self.ln_delta;
        if ratio_ln <= 0.0 {
            return Err(Error::Inadmissible(
                "turning point reached the hilltop".into(),
            ));
        }
        self.t_max = arccosh_safe(ratio_ln);
        Ok(())
    }

    /// Distance to the well minimum at parameter `t`, clamped to the hilltop.
    fn u_at(&self, t: f64) -> f64 {
        (self.ln_delta + ln_cosh(t)).exp().min(self.u_top)
    }

    /// `Q(u, delta) = 2 (phi(u) - h) / (W'' (u^2 - delta^2))`, the smooth
    /// positive factor left after the simple zeros are divided out.
    ///
    /// Three regimes, each evaluated without subtractive cancellation:
    /// both points inside the Taylor window (exact polynomial identity in
    /// `u, delta`), points close together (midpoint-derivative form, whose
    /// leading factor `u - delta` is divided out algebraically), and points
    /// far apart (plain difference, no cancellation left to lose).
    fn q_factor(&self, pot: &Potential, sigma: f64, u: f64) -> f64 {
        let d = self.delta;
        if u + d == 0.0 {
            return 1.0;
        }
        if u <= self.u_taylor {
            let [c3, c4, c5, c6] = self.c;
            let s2 = u * u + d * d;
            let r3 = (u * u + u * d + d * d) / (u + d);
            let r5 =
                (u * u * u * u + u * u * u * d + u * u * d * d + u * d * d * d + d * d * d * d)
                    / (u + d);
            return 1.0
                + c3 * r3
                + c4 * s2
                + c5 * r5
                + c6 * (u * u * u * u + u * u * d * d + d * d * d * d);
        }
        let du = u - d;
        if du <= 0.02 * (self.x0 - pot.params.b) {
            let m = 0.5 * (u + d);
            let d1 = self.dphi(pot, sigma, m);
            let d3 = self.orient * pot.w_third(self.x0 + self.orient * m);
            let d5 = self.orient * pot.w_fifth(self.x0 + self.orient * m);
            2.0 * (d1 + du * du * (d3 / 24.0 + du * du * d5 / 1920.0)) / (self.w2 * (u + d))
        } else {
            let h = self.ln_h.exp();
            2.0 * (self.phi(pot, sigma, u) - h) / (self.w2 * (u * u - d * d))
        }
    }

    /// Inverse-square-root weight `[W'' Q]^{-1/2}` at parameter `t`.
    fn weight(&self, pot: &Potential, sigma: f64, t: f64) -> f64 {
        let u = self.u_at(t);
        let q = self.q_factor(pot, sigma, u);
        1.0 / (self.w2 * q).sqrt()
    }

    /// Per-side contribution to the inverse-square-root moments
    /// `(1/sqrt 2) integral s^n f^{-1/2} ds` for `n = 0, 1`, as
    /// `(moment0, moment1)`.
    fn inv_sqrt_moments(&self, pot: &Potential, sigma: f64, rel_tol: f64) -> (f64, f64) {
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        let add_numeric = |a: f64, b: f64, m0: &mut f64, m1: &mut f64| {
            *m0 += adaptive_gl(&mut |t| self.weight(pot, sigma, t), a, b, rel_tol);
            *m1 += adaptive_gl(
                &mut |t| {
                    let u = self.u_at(t);
                    (self.x0 + self.orient * u) * self.weight(pot, sigma, t)
                },
                a,
                b,
                rel_tol,
            );
        };
        if self.t_max <= T_NEAR + T_TOP {
            add_numeric(0.0, self.t_max, &mut m0, &mut m1);
        } else {
            let t_a = T_NEAR;
            let t_b = self.t_max - T_TOP;
            add_numeric(0.0, t_a, &mut m0, &mut m1);
            // Analytic plateau stretch: u is microscopic there, so the
            // integrand is [W'']^{-1/2} (1 + c3 u)^{-1/2} (x0 + orient u)^n
            // expanded to first order in u; integral of u dt is
            // delta (sinh t_b - sinh t_a).
            let root_w2 = self.w2.sqrt();
            let u_a = self.u_at(t_a);
            let u_b = self.u_at(t_b);
            let sinh_span = (u_b * u_b - self.delta * self.delta).max(0.0).sqrt()
                - (u_a * u_a - self.delta * self.delta).max(0.0).sqrt();
            let c3 = self.c[0];
            m0 += ((t_b - t_a) - 0.5 * c3 * sinh_span) / root_w2;
            m1 +=
                (self.x0 * (t_b - t_a) + (self.orient - 0.5 * self.x0 * c3) * sinh_span) / root_w2;
            add_numeric(t_b, self.t_max, &mut m0, &mut m1);
        }
        (m0, m1)
    }
}

impl Orbit {
    /// Build an orbit from the pressure level and the log-space gaps.
    ///
    /// `alpha`, `beta` are the spinodal points (cached by callers).
    pub fn from_levels(
        pot: &Potential,
        alpha: f64,
        beta: f64,
        sigma: f64,
        ln_h1: f64,
        ln_h2: f64,
    ) -> Result<Orbit> {
        let params = &pot.params;
        let sigma_band_lo = params.p_raw(alpha).max(0.0);
        let sigma_band_hi = params.p_raw(beta);
        if !(sigma > sigma_band_lo && sigma < sigma_band_hi) {
            return Err(Error::Inadmissible(format!(
                "sigma = {sigma} outside the three-root band ({sigma_band_lo}, {sigma_band_hi})"
            )));
        }
        let alpha_sigma = eos::outer_liquid_root(params, alpha, sigma)?;
        let xi = eos::middle_root(params, alpha, beta, sigma)?;
        let beta_sigma = eos::outer_vapor_root(params, beta, sigma)?;
        let left = Side::build(pot, sigma, alpha_sigma, 1.0, xi, ln_h1)?;
        let right = Side::build(pot, sigma, beta_sigma, -1.0, xi, ln_h2)?;
        let lambda = pot.tilted(alpha_sigma, sigma) + ln_h1.exp();
        let orbit = Orbit {
            pot: *pot,
            sigma,
            lambda,
            xi,
            left,
            right,
        };
        if orbit.z2() - orbit.z1() < DEGENERATE_GAP {
            return Err(Error::NearDegenerate {
                gap: orbit.z2() - orbit.z1(),
            });
        }
        Ok(orbit)
    }

    pub fn z1(&self) -> f64 {
        self.left.x0 + self.left.delta
    }

    pub fn z2(&self) -> f64 {
        self.right.x0 - self.right.delta
    }

    /// The moments `I_0 = (1/sqrt 2) integral f^{-1/2} ds` and
    /// `I_1 = (1/sqrt 2) integral s f^{-1/2} ds` over `[z1, z2]`.
    pub fn inv_sqrt_integrals(&self, rel_tol: f64) -> (f64, f64) {
        let (l0, l1) = self.left.inv_sqrt_moments(&self.pot, self.sigma, rel_tol);
        let (r0, r1) = self.right.inv_sqrt_moments(&self.pot, self.sigma, rel_tol);
        (l0 + r0, l1 + r1)
    }

    /// `f(s)` evaluated from the gap to one turning point; `gap` is
    /// `s - z1` on the left side, `z2 - s` on the right. Valid on the whole
    /// orbit (the factored difference forms are global), but the gap must
    /// belong to the named side for full accuracy near its turning point.
    fn f_from_gap(&self, side: &Side, gap: f64) -> f64 {
        let u = side.delta + gap;
        let q = side.q_factor(&self.pot, self.sigma, u);
        0.5 * side.w2 * (u * u - side.delta * side.delta) * q
    }

    /// `integral of sqrt(f) ds` over `[z1, z2]` by the sine substitution;
    /// the integrand vanishes at both ends so no log range is involved.
    pub fn sqrt_integral(&self, rel_tol: f64) -> f64 {
        let z1 = self.z1();
        let z2 = self.z2();
        let r = 0.5 * (z2 - z1);
        let psi_split = {
            // psi where s = z1 + 2 r sin^2(psi/2) crosses the hilltop
            let srt = ((self.xi - z1) / (2.0 * r)).clamp(0.0, 1.0).sqrt();
            2.0 * srt.asin()
        };
        let integrand = |psi: f64, left: bool| {
            let half = psi / 2.0;
            let f = if left {
                let gap1 = 2.0 * r * half.sin().powi(2);
                self.f_from_gap(&self.left, gap1)
            } else {
                let gap2 = 2.0 * r * half.cos().powi(2);
                self.f_from_gap(&self.right, gap2)
            };
            f.max(0.0).sqrt() * r * psi.sin()
        };
        adaptive_gl(&mut |psi| integrand(psi, true), 0.0, psi_split, rel_tol)
            + adaptive_gl(
                &mut |psi| integrand(psi, false),
                psi_split,
                std::f64::consts::PI,
                rel_tol,
            )
    }

    /// Rise-time map for profile reconstruction: `y(t)` tables per side.
    pub fn profile_map(&self) -> ProfileMap {
        let left = SideMap::build(self, &self.left);
        let right = SideMap::build(self, &self.right);
        ProfileMap {
            half_period: left.total + right.total,
            left,
            right,
        }
    }
}

/// Cumulative rise-time table along one side, from its turning point up to
/// the hilltop.
pub(crate) struct SideMap {
    /// Segment boundaries in t.
    t: Vec<f64>,
    /// Cumulative time at each boundary.
    y: Vec<f64>,
    pub total: f64,
    side: Side,
    pot: Potential,
    sigma: f64,
}

impl SideMap {
    fn build(orbit: &Orbit, side: &Side) -> SideMap {
        let mut bounds = vec![0.0_f64];
        let step = 0.5;
        if side.t_max <= T_NEAR + T_TOP {
            let mut t = step;
            while t < side.t_max {
                bounds.push(t);
                t += step;
            }
        } else {
            let mut t = step;
            while t < T_NEAR {
                bounds.push(t);
                t += step;
            }
            bounds.push(T_NEAR);
            bounds.push(side.t_max - T_TOP);
            let mut t2 = side.t_max - T_TOP + step;
            while t2 < side.t_max {
                bounds.push(t2);
                t2 += step;
            }
        }
        bounds.push(side.t_max);
        let mut y = Vec::with_capacity(bounds.len());
        y.push(0.0);
        let mut acc = 0.0;
        for w in bounds.windows(2) {
            let (a, b) = (w[0], w[1]);
            let seg = if b - a > 2.0 * step {
                // analytic plateau stretch
                let root_w2 = side.w2.sqrt();
                let u_a = side.u_at(a);
                let u_b = side.u_at(b);
                let sinh_span = (u_b * u_b - side.delta * side.delta).max(0.0).sqrt()
                    - (u_a * u_a - side.delta * side.delta).max(0.0).sqrt();
                ((b - a) - 0.5 * side.c[0] * sinh_span) / root_w2
            } else {
                gl20(|t| side.weight(&orbit.pot, orbit.sigma, t), a, b)
            };
            acc += seg;
            y.push(acc);
        }
        SideMap {
            t: bounds,
            y,
            total: acc,
            side: *side,
            pot: orbit.pot,
            sigma: orbit.sigma,
        }
    }

    /// Volume at cumulative rise time `y` from this side's turning point.
    fn v_at(&self, y_query: f64) -> f64 {
        let y_query = y_query.clamp(0.0, self.total);
        let idx = match self
            .y
            .binary_search_by(|p| p.partial_cmp(&y_query).unwrap())
        {
            Ok(i) => i.min(self.y.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.y.len() - 2),
        };
        let (t_lo, t_hi) = (self.t[idx], self.t[idx + 1]);
        let (y_lo, y_hi) = (self.y[idx], self.y[idx + 1]);
        // Newton on the cumulative integral within the segment, seeded by
        // linear inversion; the weight varies slowly inside a segment.
        let mut t = t_lo + (t_hi - t_lo) * ((y_query - y_lo) / (y_hi - y_lo).max(1e-300));
        for _ in 0..4 {
            let y_t = y_lo + gl20(|s| self.side.weight(&self.pot, self.sigma, s), t_lo, t);
            let w = self.side.weight(&self.pot, self.sigma, t);
            let dt = (y_query - y_t) / w;
            t = (t + dt).clamp(t_lo, t_hi);
            if dt.abs() < 1e-12 * (1.0 + t.abs()) {
                break;
            }
        }
        self.side.x0 + self.side.orient * self.side.u_at(t)
    }

    /// Rise time needed to move `dist` away from the turning point
    /// (capped at the hilltop).
    fn time_to_distance(&self, dist: f64) -> f64 {
        let u_target = (self.side.delta + dist).min(self.side.u_top);
        let ratio_ln = u_target.ln() - self.side.ln_delta;
        if ratio_ln <= 0.0 {
            return 0.0;
        }
        let t_target = arccosh_safe(ratio_ln).min(self.side.t_max);
        let idx = match self
            .t
            .binary_search_by(|p| p.partial_cmp(&t_target).unwrap())
        {
            Ok(i) => i.min(self.t.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.t.len() - 2),
        };
        self.y[idx]
            + gl20(
                |s| self.side.weight(&self.pot, self.sigma, s),
                self.t[idx],
                t_target,
            )
    }
}

/// Invertible map between rise time and volume along half an oscillation.
pub(crate) struct ProfileMap {
    pub left: SideMap,
    pub right: SideMap,
    /// Time from `z1` to `z2`, i.e. half the cell period.
    pub half_period: f64,
}

impl ProfileMap {
    /// Volume after rising for time `tau` in `[0, half_period]` from `z1`.
    pub fn v_rise(&self, tau: f64) -> f64 {
        let tau = tau.clamp(0.0, self.half_period);
        if tau <= self.left.total {
            self.left.v_at(tau)
        } else {
            self.right.v_at(self.half_period - tau)
        }
    }

    /// Periodized volume for a valley-centered cell of period
    /// `2 half_period`: the minimum sits at `y = 0`.
    pub fn v_valley(&self, y: f64) -> f64 {
        let period = 2.0 * self.half_period;
        let mut frac = (y / period).fract();
        if frac < 0.0 {
            frac += 1.0;
        }
        let local = frac * period;
        let tau = if local <= self.half_period {
            local
        } else {
            period - local
        };
        self.v_rise(tau)
    }

    /// Time per period spent within `dist` of the orbit minimum `z1`.
    pub fn time_near_minimum(&self, dist: f64) -> f64 {
        2.0 * self.left.time_to_distance(dist)
    }

    /// Time per period spent within `dist` of the orbit maximum `z2`.
    pub fn time_near_maximum(&self, dist: f64) -> f64 {
        2.0 * self.right.time_to_distance(dist)
    }
}
