//! Piecewise-constant two-phase steady states on `[-1, 1]`.
//!
//! When the mean volume lies strictly inside the coexistence interval
//! `(alpha0, beta0)`, the vanishing-viscosity system admits profiles taking
//! only the two Maxwell values, with total phase lengths fixed by the mean:
//! `l1 = 2(beta0 - vbar)/(beta0 - alpha0)` for the `alpha0` phase and
//! `l2 = 2 - l1` for the `beta0` phase. Where the interfaces sit is a gauge
//! freedom; the offset parameter surfaces it instead of fixing it.

use crate::eos::{EosParams, Landscape};
use crate::potential::Potential;
use crate::report::fmt_g17;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Requested shape of a sharp profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProfileKind {
    /// `v = vbar` everywhere (the only choice outside the Maxwell region).
    Constant,
    /// One `beta0` plateau inside an `alpha0` background.
    SinglePeak,
    /// One `alpha0` plateau inside a `beta0` background.
    SingleValley,
    /// Finitely many `beta0` intervals (left endpoints, right endpoints)
    /// inside an `alpha0` background; the total length must match `l2`.
    GeneralTwoValue { beta_intervals: Vec<(f64, f64)> },
}

/// A piecewise-constant profile: `values[i]` on `[cuts[i], cuts[i+1]]` with
/// `cuts[0] = -1` and `cuts[last] = 1` implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpProfile {
    pub kind: ProfileKind,
    pub alpha0: f64,
    pub beta0: f64,
    pub vbar: f64,
    /// Total length of the `alpha0` phase (zero for constant profiles).
    pub l1: f64,
    /// Total length of the `beta0` phase.
    pub l2: f64,
    /// The interface offset used to place the plateau, when applicable.
    pub offset: f64,
    /// Interior jump locations, ascending, inside `[-1, 1]`.
    pub breakpoints: Vec<f64>,
    /// Piece values; one more entry than `breakpoints`.
    pub values: Vec<f64>,
}

/// True exactly when a nonconstant two-phase profile with mean `vbar`
/// exists, i.e. `alpha0 < vbar < beta0` strictly.
pub fn exists_two_phase(landscape: &Landscape, b: f64, vbar: f64) -> Result<bool> {
    if !(vbar > b) || !vbar.is_finite() {
        return Err(Error::Domain(format!(
            "mean volume must exceed the co-volume: vbar = {vbar}, b = {b}"
        )));
    }
    Ok(vbar > landscape.alpha0 && vbar < landscape.beta0)
}

/// Build a sharp profile of the requested kind.
///
/// For `SinglePeak` the offset is the left `alpha0` length `l11` in
/// `[0, l1]`; for `SingleValley` it is the left `beta0` length `l21` in
/// `[0, l2]`. Nonconstant kinds require the mean strictly inside the
/// Maxwell region.
pub fn build_profile(
    params: &EosParams,
    landscape: &Landscape,
    vbar: f64,
    kind: ProfileKind,
    offset: f64,
) -> Result<SharpProfile> {
    if !(vbar > params.b) || !vbar.is_finite() {
        return Err(Error::Domain(format!(
            "mean volume must exceed the co-volume: vbar = {vbar}"
        )));
    }
    let (alpha0, beta0) = (landscape.alpha0, landscape.beta0);
    if let ProfileKind::Constant = kind {
        return Ok(SharpProfile {
            kind,
            alpha0,
            beta0,
            vbar,
            l1: 0.0,
            l2: 0.0,
            offset: 0.0,
            breakpoints: vec![],
            values: vec![vbar],
        });
    }
    if !exists_two_phase(landscape, params.b, vbar)? {
        return Err(Error::Infeasible {
            vbar,
            alpha0,
            beta0,
        });
    }
    let width = beta0 - alpha0;
    let l1 = 2.0 * (beta0 - vbar) / width;
    let l2 = 2.0 * (vbar - alpha0) / width;
    let check_offset = |max: f64| {
        if (0.0..=max).contains(&offset) {
            Ok(())
        } else {
            Err(Error::OffsetOutOfRange { offset, max })
        }
    };
    let (breakpoints, values) = match &kind {
        ProfileKind::SinglePeak => {
            check_offset(l1)?;
            (
                vec![-1.0 + offset, -1.0 + offset + l2],
                vec![alpha0, beta0, alpha0],
            )
        }
        ProfileKind::SingleValley => {
            check_offset(l2)?;
            (
                vec![-1.0 + offset, -1.0 + offset + l1],
                vec![beta0, alpha0, beta0],
            )
        }
        ProfileKind::GeneralTwoValue { beta_intervals } => {
            let mut cuts = Vec::new();
            let mut vals = vec![alpha0];
            let mut total = 0.0;
            let mut prev_end = -1.0;
            for &(lo, hi) in beta_intervals {
                if !(lo >= prev_end && hi > lo && hi <= 1.0) {
                    return Err(Error::Domain(format!(
                        "beta intervals must be disjoint, increasing, inside [-1, 1]: ({lo}, {hi})"
                    )));
                }
                total += hi - lo;
                cuts.push(lo);
                cuts.push(hi);
                vals.push(beta0);
                vals.push(alpha0);
                prev_end = hi;
            }
            if (total - l2).abs() > 1e-10 {
                return Err(Error::Domain(format!(
                    "beta-phase measure {total} inconsistent with mean volume (expected {l2})"
                )));
            }
            (cuts, vals)
        }
        ProfileKind::Constant => unreachable!(),
    };
    Ok(SharpProfile {
        kind,
        alpha0,
        beta0,
        vbar,
        l1,
        l2,
        offset,
        breakpoints,
        values,
    })
}

impl SharpProfile {
    /// Profile value at `x` (right-continuous at the jumps).
    pub fn sample(&self, x: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&c| c <= x);
        self.values[idx]
    }

    /// Exact mean over `[-1, 1]` by piecewise integration.
    pub fn mean(&self) -> f64 {
        let mut acc = 0.0;
        let mut left = -1.0;
        for (i, &value) in self.values.iter().enumerate() {
            let right = self.breakpoints.get(i).copied().unwrap_or(1.0);
            acc += value * (right - left);
            left = right;
        }
        acc / 2.0
    }

    /// The jumps as `(location, left value, right value)`.
    pub fn jumps(&self) -> Vec<(f64, f64, f64)> {
        self.breakpoints
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, self.values[i], self.values[i + 1]))
            .collect()
    }

    /// Value of the tilted functional `integral of (W(v) + sigma0 v) dx`
    /// over `[-1, 1]`, with `W` anchored at this profile's mean. Every valid
    /// two-phase profile attains `2 lambda0`; interior constants sit
    /// strictly above.
    pub fn maxwell_functional(&self, params: &EosParams, sigma0: f64) -> Result<f64> {
        let pot = Potential::new(params, self.vbar)?;
        let mut acc = 0.0;
        let mut left = -1.0;
        for (i, &value) in self.values.iter().enumerate() {
            let right = self.breakpoints.get(i).copied().unwrap_or(1.0);
            acc += pot.tilted(value, sigma0) * (right - left);
            left = right;
        }
        Ok(acc)
    }

    /// CSV samples `(x, v)` on a uniform grid of `n` points.
    pub fn to_csv(&self, n: usize) -> String {
        let n = n.max(2);
        let mut out = String::from("x,v\n");
        for i in 0..n {
            let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            out.push_str(&format!("{},{}\n", fmt_g17(x), fmt_g17(self.sample(x))));
        }
        out
    }
}

/// Both corner conditions at every jump: the one-sided values are stationary
/// for the tilted well (`W'(v) = -sigma0`, i.e. `p(v) = sigma0`) and the
/// tilted well itself is continuous across the jump.
pub fn weierstrass_erdmann_check(
    params: &EosParams,
    landscape: &Landscape,
    profile: &SharpProfile,
) -> Result<bool> {
    let tol = 1e-10;
    let pot = Potential::new(params, profile.vbar)?;
    let sigma0 = landscape.sigma0;
    for (_, left, right) in profile.jumps() {
        for v in [left, right] {
            if (params.p_raw(v) - sigma0).abs() > tol {
                return Ok(false);
            }
        }
        if pot.tilted_diff(right, left, sigma0).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
