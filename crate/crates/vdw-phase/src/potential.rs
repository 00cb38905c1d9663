//! The double-well potential `W` anchored at a mean volume, and stable
//! difference forms for the tilted well `W(v) + sigma v`.
//!
//! `W(v) = -(a/v - a/vbar) - R theta ln((v-b)/(vbar-b))` is minus the
//! pressure antiderivative referenced so that `W(vbar) = 0`; its derivatives
//! are `W' = -p` and `W'' = -p'`. Everything downstream (first integrals,
//! energies, the equal-level conditions at the Maxwell points) is built on
//! it, and the exponentially small level gaps near the plateaus make the
//! factored difference forms here load-bearing: naive subtraction of
//! `W + sigma v` values loses every digit once the gap drops below 1e-16.

use crate::eos::{EosParams, Landscape};
use crate::{Error, Result};

/// `W` and friends for a fixed parameter set and mean-volume anchor.
#[derive(Debug, Clone, Copy)]
pub struct Potential {
    pub params: EosParams,
    pub vbar: f64,
}

impl Potential {
    pub fn new(params: &EosParams, vbar: f64) -> Result<Self> {
        if !(vbar > params.b) || !vbar.is_finite() {
            return Err(Error::Domain(format!(
                "mean volume must exceed the co-volume: vbar = {vbar}, b = {}",
                params.b
            )));
        }
        Ok(Self {
            params: *params,
            vbar,
        })
    }

    /// `W(v)`, zero at the anchor.
    pub fn w(&self, v: f64) -> Result<f64> {
        if !(v > self.params.b) {
            return Err(Error::Domain(format!(
                "potential argument below co-volume: v = {v}"
            )));
        }
        Ok(self.w_raw(v))
    }

    #[inline]
    pub(crate) fn w_raw(&self, v: f64) -> f64 {
        let p = &self.params;
        -(p.a / v - p.a / self.vbar) - p.r * p.theta * ((v - p.b) / (self.vbar - p.b)).ln()
    }

    /// `W'(v) = -p(v)`.
    #[inline]
    pub fn w_prime(&self, v: f64) -> f64 {
        -self.params.p_raw(v)
    }

    /// `W''(v) = -p'(v)`.
    #[inline]
    pub fn w_second(&self, v: f64) -> f64 {
        -self.params.dp_raw(v)
    }

    #[inline]
    pub(crate) fn w_third(&self, v: f64) -> f64 {
        -self.params.d2p_raw(v)
    }

    #[inline]
    pub(crate) fn w_fourth(&self, v: f64) -> f64 {
        -self.params.d3p_raw(v)
    }

    #[inline]
    pub(crate) fn w_fifth(&self, v: f64) -> f64 {
        -self.params.d4p_raw(v)
    }

    #[inline]
    pub(crate) fn w_sixth(&self, v: f64) -> f64 {
        -self.params.d5p_raw(v)
    }

    /// Shifted well `H(V) = integral_0^V (p(vbar) - p(s + vbar)) ds`
    /// in closed form.
    pub fn h(&self, shift: f64) -> Result<f64> {
        let v = shift + self.vbar;
        if !(v > self.params.b) {
            return Err(Error::Domain(format!(
                "shifted volume below co-volume: V + vbar = {v}"
            )));
        }
        Ok(self.params.p_raw(self.vbar) * shift + self.w_raw(v))
    }

    /// Tilted well `W(v) + sigma v`.
    #[inline]
    pub fn tilted(&self, v: f64, sigma: f64) -> f64 {
        self.w_raw(v) + sigma * v
    }

    /// `(W + sigma v)(v2) - (W + sigma v)(v1)` in factored form: every term
    /// carries the factor `v2 - v1`, so the result keeps full relative
    /// accuracy however close the arguments are.
    #[inline]
    pub fn tilted_diff(&self, v2: f64, v1: f64, sigma: f64) -> f64 {
        let p = &self.params;
        let d = v2 - v1;
        -p.r * p.theta * (d / (v1 - p.b)).ln_1p() + p.a * d / (v1 * v2) + sigma * d
    }

    /// The Maxwell level `W(alpha0) + sigma0 alpha0` in this anchor.
    pub fn maxwell_level(&self, landscape: &Landscape) -> f64 {
        self.tilted(landscape.alpha0, landscape.sigma0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxwell;

    fn setup() -> (EosParams, Potential) {
        let params = EosParams::reduced(0.85).unwrap();
        let pot = Potential::new(&params, 1.2).unwrap();
        (params, pot)
    }

    #[test]
    fn anchored_at_zero() {
        let (_, pot) = setup();
        assert_eq!(pot.w(1.2).unwrap(), 0.0);
        assert_eq!(pot.h(0.0).unwrap(), 0.0);
    }

    #[test]
    fn derivative_identities_by_finite_differences() {
        let (params, pot) = setup();
        let mut state = 0xa5a5a5a5deadbeefu64;
        let mut rand01 = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let v = params.b + 0.4 + rand01() * 5.0;
            let h = 1e-5;
            let w_fd = (pot.w_raw(v + h) - pot.w_raw(v - h)) / (2.0 * h);
            assert!((w_fd - pot.w_prime(v)).abs() < 1e-8 * w_fd.abs().max(1.0));
            let w2_fd = (pot.w_raw(v + h) - 2.0 * pot.w_raw(v) + pot.w_raw(v - h)) / (h * h);
            assert!((w2_fd - pot.w_second(v)).abs() < 1e-4 * w2_fd.abs().max(1.0));
        }
    }

    #[test]
    fn shifted_well_identities() {
        let (params, pot) = setup();
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut rand01 = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let shift = -0.5 + rand01() * 3.0;
            let h_val = pot.h(shift).unwrap();
            // H(V) = W(V + vbar) + p(vbar) V
            let alt = pot.w_raw(shift + pot.vbar) + params.p_raw(pot.vbar) * shift;
            assert!((h_val - alt).abs() < 1e-10 * h_val.abs().max(1.0));
            // H'(V) = p(vbar) - p(V + vbar)
            let dh = 1e-6;
            let fd = (pot.h(shift + dh).unwrap() - pot.h(shift - dh).unwrap()) / (2.0 * dh);
            let exact = params.p_raw(pot.vbar) - params.p_raw(shift + pot.vbar);
            assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn tilted_diff_matches_direct_subtraction_when_far_apart() {
        let (_, pot) = setup();
        let sigma = 0.5;
        let direct = pot.tilted(2.5, sigma) - pot.tilted(0.9, sigma);
        let stable = pot.tilted_diff(2.5, 0.9, sigma);
        assert!((direct - stable).abs() < 1e-13 * direct.abs().max(1.0));
    }

    #[test]
    fn tilted_diff_keeps_relative_accuracy_for_close_arguments() {
        let (_, pot) = setup();
        // Quadratic growth away from a tilted-well minimum: difference from
        // the minimum level must match (1/2) W'' d^2 to leading order.
        let sigma = 0.5045;
        let params = pot.params;
        let v_min = crate::eos::outer_liquid_root(
            &params,
            crate::eos::spinodal_points(&params).unwrap().0,
            sigma,
        )
        .unwrap();
        for d in [1e-4, 1e-6, 1e-8] {
            let got = pot.tilted_diff(v_min + d, v_min, sigma);
            let expect = 0.5
                * pot.w_second(v_min)
                * d
                * d
                * (1.0 + pot.w_third(v_min) * d / (3.0 * pot.w_second(v_min)));
            assert!(
                (got - expect).abs() < 1e-6 * expect.abs(),
                "d = {d}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn maxwell_level_equal_on_both_plateaus() {
        let params = EosParams::reduced(0.85).unwrap();
        let landscape = maxwell::construct(&params).unwrap();
        let pot = Potential::new(&params, landscape.maxwell_midpoint()).unwrap();
        let level = pot.maxwell_level(&landscape);
        let right = pot.tilted(landscape.beta0, landscape.sigma0);
        assert!((level - right).abs() < 1e-10);
    }
}
