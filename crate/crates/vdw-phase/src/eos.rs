//! The van der Waals equation of state and its subcritical pressure
//! landscape.
//!
//! For a fixed temperature `theta` below the critical value
//! `theta_c = 8a/(27Rb)` the isotherm `p(v) = R theta/(v-b) - a/v^2` has a
//! local minimum at `alpha` and a local maximum at `beta` (the spinodal
//! points), an equal-area tie line at the Maxwell pressure `sigma0` joining
//! `alpha0` and `beta0`, and companion volumes where the outer monotone
//! branches return to the spinodal pressure levels. [`Landscape`] collects
//! all of them; [`crate::maxwell::construct`] fills it.

use crate::solve1d::{bracketed_root, polish_root};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Van der Waals constants and the fixed working temperature.
///
/// `a` is the cohesion constant, `b` the co-volume, `r` the gas constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EosParams {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub theta: f64,
}

impl EosParams {
    /// Validated constructor: all four constants must be strictly positive.
    pub fn new(a: f64, b: f64, r: f64, theta: f64) -> Result<Self> {
        for (name, value) in [("a", a), ("b", b), ("R", r), ("theta", theta)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Domain(format!(
                    "{name} must be a positive finite number, got {value}"
                )));
            }
        }
        Ok(Self { a, b, r, theta })
    }

    /// The reduced normalization `a = 3`, `b = 1/3`, `R = 8/3`, so that the
    /// critical point sits at `v = 1`, `theta = 1`, `p = 1`.
    pub fn reduced(theta: f64) -> Result<Self> {
        Self::new(3.0, 1.0 / 3.0, 8.0 / 3.0, theta)
    }

    /// Critical temperature `8a/(27Rb)`.
    pub fn critical_temperature(&self) -> f64 {
        8.0 * self.a / (27.0 * self.r * self.b)
    }

    /// Critical volume `3b` (the inflection point of the critical isotherm).
    pub fn critical_volume(&self) -> f64 {
        3.0 * self.b
    }

    /// True when the working temperature admits a two-phase landscape.
    pub fn is_subcritical(&self) -> bool {
        self.theta < self.critical_temperature()
    }

    fn require_volume(&self, v: f64) -> Result<()> {
        if v > self.b && v.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "specific volume must exceed the co-volume: v = {v}, b = {}",
                self.b
            )))
        }
    }

    fn require_subcritical(&self) -> Result<()> {
        let theta_c = self.critical_temperature();
        if self.theta < theta_c {
            Ok(())
        } else {
            Err(Error::Supercritical {
                theta: self.theta,
                theta_c,
            })
        }
    }

    /// Pressure `p(v) = R theta/(v-b) - a/v^2`.
    pub fn pressure(&self, v: f64) -> Result<f64> {
        self.require_volume(v)?;
        Ok(self.p_raw(v))
    }

    /// First or second derivative of the pressure, in closed form.
    pub fn pressure_derivative(&self, v: f64, order: u32) -> Result<f64> {
        self.require_volume(v)?;
        match order {
            1 => Ok(self.dp_raw(v)),
            2 => Ok(self.d2p_raw(v)),
            _ => Err(Error::Domain(format!(
                "unsupported derivative order {order} (expected 1 or 2)"
            ))),
        }
    }

    #[inline]
    pub(crate) fn p_raw(&self, v: f64) -> f64 {
        self.r * self.theta / (v - self.b) - self.a / (v * v)
    }

    #[inline]
    pub(crate) fn dp_raw(&self, v: f64) -> f64 {
        -self.r * self.theta / ((v - self.b) * (v - self.b)) + 2.0 * self.a / (v * v * v)
    }

    #[inline]
    pub(crate) fn d2p_raw(&self, v: f64) -> f64 {
        2.0 * self.r * self.theta / (v - self.b).powi(3) - 6.0 * self.a / v.powi(4)
    }

    #[inline]
    pub(crate) fn d3p_raw(&self, v: f64) -> f64 {
        -6.0 * self.r * self.theta / (v - self.b).powi(4) + 24.0 * self.a / v.powi(5)
    }

    #[inline]
    pub(crate) fn d4p_raw(&self, v: f64) -> f64 {
        24.0 * self.r * self.theta / (v - self.b).powi(5) - 120.0 * self.a / v.powi(6)
    }

    #[inline]
    pub(crate) fn d5p_raw(&self, v: f64) -> f64 {
        -120.0 * self.r * self.theta / (v - self.b).powi(6) + 720.0 * self.a / v.powi(7)
    }

    /// Antiderivative of the pressure, `P(v) = R theta ln(v-b) + a/v`.
    pub(crate) fn pressure_antiderivative(&self, v: f64) -> f64 {
        self.r * self.theta * (v - self.b).ln() + self.a / v
    }

    /// `p(v2) - p(v1)` in factored form, exact to relative rounding even for
    /// nearly equal arguments.
    pub(crate) fn pressure_diff(&self, v2: f64, v1: f64) -> f64 {
        let d = v2 - v1;
        -self.r * self.theta * d / ((v2 - self.b) * (v1 - self.b))
            + self.a * d * (v2 + v1) / (v1 * v1 * v2 * v2)
    }
}

/// Every distinguished volume and pressure of a subcritical isotherm.
///
/// Ordering: `b < alpha_bar < alpha0 < alpha < beta < beta0 < beta_bar`.
/// `sigma_lo = p(alpha)` and `sigma_hi = p(beta)` bound the pressures with
/// three isobar roots (the usable band is `(max(sigma_lo, 0), sigma_hi)`
/// because the vapor branch carries only positive pressures), `sigma0` is the
/// Maxwell pressure and `lambda0` the common value of `W(v) + sigma0 v` at
/// the two Maxwell points, with the potential `W` referenced to the critical
/// volume `3b`.
///
/// `beta_bar` exists only when `sigma_lo > 0`, which happens exactly for
/// `theta/theta_c > 27/32`; below that the decaying vapor branch never
/// reaches the (negative) level `p(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub alpha: f64,
    pub beta: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub alpha_bar: f64,
    pub beta_bar: Option<f64>,
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub sigma0: f64,
    pub lambda0: f64,
}

impl Landscape {
    /// Width of the coexistence interval `(alpha0, beta0)`.
    pub fn maxwell_width(&self) -> f64 {
        self.beta0 - self.alpha0
    }

    /// Midpoint of the coexistence interval, the default mean volume for
    /// experiments.
    pub fn maxwell_midpoint(&self) -> f64 {
        0.5 * (self.alpha0 + self.beta0)
    }

    /// Pressure band on which `p(v) = sigma` has three roots.
    pub fn isobar_band(&self) -> (f64, f64) {
        (self.sigma_lo.max(0.0), self.sigma_hi)
    }
}

/// The two critical points of the pressure: `alpha` (local minimum) and
/// `beta` (local maximum), with `b < alpha < beta`.
pub fn spinodal_points(params: &EosParams) -> Result<(f64, f64)> {
    params.require_subcritical()?;
    let vc = params.critical_volume();
    // p' < 0 just above b, > 0 at the critical volume, < 0 for large v.
    let mut lo = params.b * (1.0 + 1e-9);
    while params.dp_raw(lo) >= 0.0 {
        lo = 0.5 * (lo + params.b);
    }
    let alpha = bracketed_root(|v| params.dp_raw(v), |v| params.d2p_raw(v), lo, vc)?;
    let mut hi = 2.0 * vc;
    while params.dp_raw(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 * vc {
            return Err(Error::NoConvergence {
                what: "spinodal upper bracket".into(),
                residual: params.dp_raw(hi),
                iterations: 0,
            });
        }
    }
    let beta = bracketed_root(|v| params.dp_raw(v), |v| params.d2p_raw(v), vc, hi)?;
    let alpha = polish_root(
        |v| params.dp_raw(v),
        |v| params.d2p_raw(v),
        alpha,
        params.b,
        vc,
    );
    let beta = polish_root(|v| params.dp_raw(v), |v| params.d2p_raw(v), beta, vc, hi);
    Ok((alpha, beta))
}

/// Companion volumes: `alpha_bar` in `(b, alpha)` where the liquid branch
/// carries the pressure `p(beta)`, and (when it exists) `beta_bar` beyond
/// `beta` where the vapor branch carries `p(alpha)`.
pub fn companion_points(params: &EosParams, alpha: f64, beta: f64) -> Result<(f64, Option<f64>)> {
    params.require_subcritical()?;
    let sigma_lo = params.p_raw(alpha);
    let sigma_hi = params.p_raw(beta);
    let alpha_bar = outer_liquid_root(params, alpha, sigma_hi)?;
    let beta_bar = if sigma_lo > 0.0 {
        Some(outer_vapor_root(params, beta, sigma_lo)?)
    } else {
        None
    };
    Ok((alpha_bar, beta_bar))
}

/// Root of `p(v) = sigma` on the decreasing liquid branch `(b, alpha)`.
pub(crate) fn outer_liquid_root(params: &EosParams, alpha: f64, sigma: f64) -> Result<f64> {
    let mut lo = params.b + 0.5 * (alpha - params.b);
    while params.p_raw(lo) <= sigma {
        lo = params.b + 0.5 * (lo - params.b);
    }
    let root = bracketed_root(|v| params.p_raw(v) - sigma, |v| params.dp_raw(v), lo, alpha)?;
    Ok(polish_root(
        |v| params.p_raw(v) - sigma,
        |v| params.dp_raw(v),
        root,
        params.b,
        alpha,
    ))
}

/// Root of `p(v) = sigma` on the decreasing vapor branch `(beta, infinity)`;
/// requires `0 < sigma < p(beta)`.
pub(crate) fn outer_vapor_root(params: &EosParams, beta: f64, sigma: f64) -> Result<f64> {
    if sigma <= 0.0 {
        return Err(Error::CompanionUndefined { sigma_lo: sigma });
    }
    let mut hi = 2.0 * beta;
    while params.p_raw(hi) >= sigma {
        hi *= 2.0;
        if hi > 1e14 * beta {
            return Err(Error::NoConvergence {
                what: "vapor root bracket".into(),
                residual: params.p_raw(hi) - sigma,
                iterations: 0,
            });
        }
    }
    let root = bracketed_root(|v| params.p_raw(v) - sigma, |v| params.dp_raw(v), beta, hi)?;
    Ok(polish_root(
        |v| params.p_raw(v) - sigma,
        |v| params.dp_raw(v),
        root,
        beta,
        hi,
    ))
}

/// Root of `p(v) = sigma` on the increasing spinodal branch `(alpha, beta)`.
pub(crate) fn middle_root(params: &EosParams, alpha: f64, beta: f64, sigma: f64) -> Result<f64> {
    let root = bracketed_root(
        |v| params.p_raw(v) - sigma,
        |v| params.dp_raw(v),
        alpha,
        beta,
    )?;
    Ok(polish_root(
        |v| params.p_raw(v) - sigma,
        |v| params.dp_raw(v),
        root,
        alpha,
        beta,
    ))
}

/// The three roots `alpha_sigma < xi_sigma < beta_sigma` of `p(v) = sigma`
/// for a level inside the three-root band.
pub fn solve_isobar(
    params: &EosParams,
    landscape: &Landscape,
    sigma: f64,
) -> Result<(f64, f64, f64)> {
    let (lo, hi) = landscape.isobar_band();
    if !(sigma > lo && sigma < hi) {
        return Err(Error::OutOfBand { sigma, lo, hi });
    }
    let a_s = outer_liquid_root(params, landscape.alpha, sigma)?;
    let xi = middle_root(params, landscape.alpha, landscape.beta, sigma)?;
    let b_s = outer_vapor_root(params, landscape.beta, sigma)?;
    Ok((a_s, xi, b_s))
}
