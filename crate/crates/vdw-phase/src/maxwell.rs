//! The equal-area construction and the stable / metastable / unstable
//! partition of the volume axis.

use crate::eos::{self, EosParams, Landscape};
use crate::solve1d::bracketed_root;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Relative distance to the critical temperature below which the
/// construction is refused: the distinguished volumes are too close to
/// separate at the working root tolerance.
const NEAR_CRITICAL_GAP: f64 = 1e-8;

/// Snapping tolerance for classifying volumes that sit on a region boundary.
const BOUNDARY_SNAP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionTag {
    Unstable,
    Metastable,
    Stable,
}

/// Classification of a volume, plus membership in the coexistence interval
/// `(alpha0, beta0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub tag: RegionTag,
    pub in_maxwell: bool,
}

/// Area between the isotherm and the tie line at level `sigma`, between the
/// outer isobar roots: `integral of (p - sigma) dv`. Strictly decreasing in
/// `sigma`, with the Maxwell pressure as its unique zero.
fn tie_line_area(
    params: &EosParams,
    landscape_alpha: f64,
    landscape_beta: f64,
    sigma: f64,
) -> Result<(f64, f64)> {
    let a_s = eos::outer_liquid_root(params, landscape_alpha, sigma)?;
    let b_s = eos::outer_vapor_root(params, landscape_beta, sigma)?;
    let area = params.pressure_antiderivative(b_s)
        - params.pressure_antiderivative(a_s)
        - sigma * (b_s - a_s);
    Ok((area, b_s - a_s))
}

/// Perform the Maxwell construction and fill the whole [`Landscape`].
///
/// The Maxwell pressure is the zero of the closed-form tie-line area,
/// located by bisection with Newton polish (the area derivative is minus the
/// root gap). The potential level `lambda0` is referenced to the critical
/// volume `3b`; see [`crate::potential::Potential::maxwell_level`] for the
/// level in a mean-volume-anchored potential.
pub fn construct(params: &EosParams) -> Result<Landscape> {
    let theta_c = params.critical_temperature();
    if params.theta >= theta_c {
        return Err(Error::Supercritical {
            theta: params.theta,
            theta_c,
        });
    }
    let gap = (theta_c - params.theta) / theta_c;
    if gap < NEAR_CRITICAL_GAP {
        return Err(Error::NearCritical { gap });
    }

    let (alpha, beta) = eos::spinodal_points(params)?;
    let sigma_lo = params.p_raw(alpha);
    let sigma_hi = params.p_raw(beta);
    let (alpha_bar, beta_bar) = eos::companion_points(params, alpha, beta)?;

    let band_lo = sigma_lo.max(0.0);
    let margin = 1e-9 * (sigma_hi - band_lo);
    let lo = band_lo + margin;
    let hi = sigma_hi - margin;
    let area_lo = tie_line_area(params, alpha, beta, lo)?.0;
    let area_hi = tie_line_area(params, alpha, beta, hi)?.0;
    if !(area_lo > 0.0 && area_hi < 0.0) {
        return Err(Error::NoConvergence {
            what: format!(
                "equal-area bracket: area({lo:.6e}) = {area_lo:.6e}, area({hi:.6e}) = {area_hi:.6e}"
            ),
            residual: area_lo.abs().min(area_hi.abs()),
            iterations: 0,
        });
    }
    let sigma0 = bracketed_root(
        |s| {
            tie_line_area(params, alpha, beta, s)
                .map(|t| t.0)
                .unwrap_or(f64::NAN)
        },
        |s| {
            tie_line_area(params, alpha, beta, s)
                .map(|t| -t.1)
                .unwrap_or(f64::NAN)
        },
        lo,
        hi,
    )?;

    let alpha0 = eos::outer_liquid_root(params, alpha, sigma0)?;
    let beta0 = eos::outer_vapor_root(params, beta, sigma0)?;
    // Potential referenced to the critical volume: W_c(v) = P(3b) - P(v).
    let w_c = |v: f64| {
        params.pressure_antiderivative(params.critical_volume()) - params.pressure_antiderivative(v)
    };
    let lambda0 = w_c(alpha0) + sigma0 * alpha0;

    Ok(Landscape {
        alpha,
        beta,
        alpha0,
        beta0,
        alpha_bar,
        beta_bar,
        sigma_lo,
        sigma_hi,
        sigma0,
        lambda0,
    })
}

/// Classify a volume into the region partition, with half-open boundaries
/// taken literally: stable on `(b, alpha0]` and `[beta0, inf)`, metastable on
/// `(alpha0, alpha]` and `[beta, beta0)`, unstable on `(alpha, beta)`.
/// Volumes within `1e-10` of a boundary are snapped onto it.
pub fn classify(landscape: &Landscape, b: f64, v: f64) -> Result<RegionLabel> {
    if !(v > b) || !v.is_finite() {
        return Err(Error::Domain(format!(
            "volume must exceed the co-volume: v = {v}, b = {b}"
        )));
    }
    let snap = |x: f64, boundary: f64| {
        if (x - boundary).abs() < BOUNDARY_SNAP {
            boundary
        } else {
            x
        }
    };
    let mut vv = v;
    for boundary in [
        landscape.alpha0,
        landscape.alpha,
        landscape.beta,
        landscape.beta0,
    ] {
        vv = snap(vv, boundary);
    }
    let tag = if vv <= landscape.alpha0 {
        RegionTag::Stable
    } else if vv <= landscape.alpha {
        RegionTag::Metastable
    } else if vv < landscape.beta {
        RegionTag::Unstable
    } else if vv < landscape.beta0 {
        RegionTag::Metastable
    } else {
        RegionTag::Stable
    };
    let in_maxwell = vv > landscape.alpha0 && vv < landscape.beta0;
    Ok(RegionLabel { tag, in_maxwell })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (EosParams, Landscape) {
        let params = EosParams::reduced(0.85).unwrap();
        let landscape = construct(&params).unwrap();
        (params, landscape)
    }

    #[test]
    fn equal_area_residual_is_tiny() {
        let (params, l) = setup();
        let area = params.pressure_antiderivative(l.beta0)
            - params.pressure_antiderivative(l.alpha0)
            - l.sigma0 * (l.beta0 - l.alpha0);
        assert!(area.abs() < 1e-10, "area residual {area:.3e}");
        assert!((params.p_raw(l.alpha0) - params.p_raw(l.beta0)).abs() < 1e-10);
        assert!((params.p_raw(l.alpha0) - l.sigma0).abs() < 1e-10);
    }

    #[test]
    fn potential_level_matches_on_both_sides() {
        let (params, l) = setup();
        let w_c = |v: f64| {
            params.pressure_antiderivative(params.critical_volume())
                - params.pressure_antiderivative(v)
        };
        let left = w_c(l.alpha0) + l.sigma0 * l.alpha0;
        let right = w_c(l.beta0) + l.sigma0 * l.beta0;
        assert!((left - right).abs() < 1e-10);
        assert!((left - l.lambda0).abs() < 1e-12);
    }

    #[test]
    fn ordering_chain_holds() {
        let (params, l) = setup();
        let bb = l.beta_bar.unwrap();
        assert!(params.b < l.alpha_bar);
        assert!(l.alpha_bar < l.alpha0);
        assert!(l.alpha0 < l.alpha);
        assert!(l.alpha < l.beta);
        assert!(l.beta < l.beta0);
        assert!(l.beta0 < bb);
        assert!(l.sigma_lo < l.sigma0 && l.sigma0 < l.sigma_hi);
    }

    #[test]
    fn construct_is_idempotent() {
        let params = EosParams::reduced(0.85).unwrap();
        let a = construct(&params).unwrap();
        let b = construct(&params).unwrap();
        assert!((a.sigma0 - b.sigma0).abs() < 1e-12);
        assert!((a.alpha0 - b.alpha0).abs() < 1e-12);
    }

    #[test]
    fn construct_rejects_supercritical_and_near_critical() {
        assert!(matches!(
            construct(&EosParams::reduced(1.1).unwrap()),
            Err(Error::Supercritical { .. })
        ));
        assert!(matches!(
            construct(&EosParams::reduced(1.0 - 1e-10).unwrap()),
            Err(Error::NearCritical { .. })
        ));
    }

    #[test]
    fn classify_boundaries() {
        let (params, l) = setup();
        let mid = 0.5 * (l.alpha + l.beta);
        let lab = classify(&l, params.b, mid).unwrap();
        assert_eq!(lab.tag, RegionTag::Unstable);
        assert!(lab.in_maxwell);

        let at_alpha0 = classify(&l, params.b, l.alpha0).unwrap();
        assert_eq!(at_alpha0.tag, RegionTag::Stable);
        assert!(!at_alpha0.in_maxwell);

        let at_beta = classify(&l, params.b, l.beta).unwrap();
        assert_eq!(at_beta.tag, RegionTag::Metastable);
        assert!(at_beta.in_maxwell);

        let at_alpha = classify(&l, params.b, l.alpha).unwrap();
        assert_eq!(at_alpha.tag, RegionTag::Metastable);

        assert!(classify(&l, params.b, 0.2).is_err());
    }

    #[test]
    fn classify_partition_property() {
        let (params, l) = setup();
        let mut state = 0x853c49e6748fea9bu64;
        let mut rand01 = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10_000 {
            let v = params.b + 1e-6 + rand01() * 10.0;
            let lab = classify(&l, params.b, v).unwrap();
            let expected_maxwell = v > l.alpha0 && v < l.beta0;
            if (v - l.alpha0).abs() > 1e-9 && (v - l.beta0).abs() > 1e-9 {
                assert_eq!(lab.in_maxwell, expected_maxwell, "v = {v}");
            }
            let in_tag_maxwell = matches!(lab.tag, RegionTag::Unstable | RegionTag::Metastable);
            assert_eq!(lab.in_maxwell, in_tag_maxwell, "v = {v}");
        }
    }

    #[test]
    fn coexistence_width_shrinks_toward_critical() {
        let mut widths = Vec::new();
        for i in 0..10 {
            let theta = 0.5 + 0.05 * i as f64;
            let params = EosParams::reduced(theta).unwrap();
            widths.push(construct(&params).unwrap().maxwell_width());
        }
        for w in widths.windows(2) {
            assert!(w[0] > w[1], "widths not decreasing: {w:?}");
        }
    }

    #[test]
    fn isobar_roots_round_trip() {
        let (params, l) = setup();
        for frac in [0.1, 0.35, 0.5, 0.8, 0.95] {
            let (lo, hi) = l.isobar_band();
            let sigma = lo + frac * (hi - lo);
            let (a_s, xi, b_s) = eos::solve_isobar(&params, &l, sigma).unwrap();
            assert!(a_s < xi && xi < b_s);
            for root in [a_s, xi, b_s] {
                assert!((params.p_raw(root) - sigma).abs() < 1e-10);
            }
            assert!(l.alpha_bar <= a_s && a_s < l.alpha);
            assert!(l.alpha < xi && xi < l.beta);
            assert!(l.beta < b_s);
        }
        // at sigma0 the outer roots are the Maxwell points
        let (a_s, _, b_s) = eos::solve_isobar(&params, &l, l.sigma0).unwrap();
        assert!((a_s - l.alpha0).abs() < 1e-10);
        assert!((b_s - l.beta0).abs() < 1e-10);
        // out-of-band rejection
        assert!(matches!(
            eos::solve_isobar(&params, &l, l.sigma_hi + 0.1),
            Err(Error::OutOfBand { .. })
        ));
    }

    #[test]
    fn isobar_outer_roots_merge_at_band_edge() {
        let (params, l) = setup();
        let sigma = l.sigma_lo + 1e-7 * (l.sigma_hi - l.sigma_lo);
        let (a_s, xi, _) = eos::solve_isobar(&params, &l, sigma).unwrap();
        assert!((a_s - l.alpha).abs() < 2e-3);
        assert!((xi - l.alpha).abs() < 2e-3);
    }
}
