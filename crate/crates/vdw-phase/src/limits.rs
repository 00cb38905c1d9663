//! Viscosity sweeps: how the smooth two-interface states sharpen into the
//! piecewise-constant Maxwell profiles.
//!
//! Each rung of a geometric viscosity ladder is solved by continuation from
//! the rung above, then measured against the gauge-aligned sharp profile:
//! sup-distance away from the interface bands, interface times, turning-point
//! gaps to the Maxwell volumes, and energy. The gaps shrink like
//! `exp(-C/epsilon)`, so they are assembled from log-space orbit data and the
//! stable pressure-difference form of the plateau drift rather than from
//! `z - alpha0` subtraction, which would hit rounding noise by mid-ladder.

use crate::eos::{EosParams, Landscape};
use crate::report::csv_table;
use crate::viscous::{self, LambdaBranch, Orientation};
use crate::{Error, Result};
use serde::Serialize;

/// Half-width multiplier of the interface exclusion bands, in units of
/// `epsilon |ln epsilon|`; the band total width is `10 epsilon |ln eps|`.
const BAND_WIDTH_FACTOR: f64 = 10.0;

/// Number of probe points for the sup-distance measurement.
const SUP_PROBES: usize = 2001;

/// One solved rung of a viscosity sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub z1: f64,
    pub z2: f64,
    /// `|z1 - alpha0|` assembled in stable form.
    pub gap1: f64,
    /// `|z2 - beta0|` assembled in stable form.
    pub gap2: f64,
    /// `epsilon * T1`: scaled time per period within `epsilon` of the orbit
    /// minimum.
    pub eps_t1: f64,
    /// `epsilon * T2`: scaled time per period within `epsilon` of the orbit
    /// maximum.
    pub eps_t2: f64,
    /// Sup-distance to the gauge-aligned sharp profile outside the
    /// interface bands; absent when the bands cover the whole period.
    pub sup_distance: Option<f64>,
    /// Energy of the state (closed form).
    pub energy: f64,
}

/// A full viscosity sweep toward the sharp-interface limit.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub vbar: f64,
    pub kind: Orientation,
    /// Every rung the ladder intended to visit.
    pub eps_ladder: Vec<f64>,
    /// The rungs that actually solved (in ladder order).
    pub rows: Vec<SweepRow>,
    /// True when continuation failed before the final rung.
    pub truncated: bool,
}

/// Exponential decay constants fitted from a sweep, with fit quality.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    /// Fitted decay constant of `|z1 - alpha0|` (positive).
    pub c1: f64,
    /// Fitted decay constant of `|z2 - beta0|` (positive).
    pub c2: f64,
    pub r2_1: f64,
    pub r2_2: f64,
}

/// Drift of an outer isobar root away from its Maxwell point: the root of
/// `p(x0 + delta) - p(x0) = dsigma` in offset form. Both sides carry the
/// factor `delta` (resp. `dsigma`), so the result keeps full relative
/// accuracy down to exponentially small drifts.
fn plateau_drift(params: &EosParams, x0: f64, dsigma: f64) -> f64 {
    let slope0 = params.dp_raw(x0);
    let mut delta = dsigma / slope0;
    for _ in 0..4 {
        let f = params.pressure_diff(x0 + delta, x0) - dsigma;
        let slope = params.dp_raw(x0 + delta);
        if slope == 0.0 {
            break;
        }
        let step = f / slope;
        delta -= step;
        if step.abs() <= 1e-3 * f64::EPSILON * delta.abs() {
            break;
        }
    }
    delta
}

/// The sharp profile value at `x` for the gauge-aligned comparison profile:
/// plateau of the orbit-extremum phase centered at `x = 0`.
fn aligned_sharp(landscape: &Landscape, vbar: f64, kind: Orientation, x: f64) -> f64 {
    let width = landscape.maxwell_width();
    let l1 = 2.0 * (landscape.beta0 - vbar) / width;
    let l2 = 2.0 - l1;
    let half = match kind {
        Orientation::Valley => 0.5 * l1,
        Orientation::Peak => 0.5 * l2,
    };
    let inside = x.abs() <= half;
    match (kind, inside) {
        (Orientation::Valley, true) | (Orientation::Peak, false) => landscape.alpha0,
        _ => landscape.beta0,
    }
}

/// Interface locations of the aligned sharp profile.
fn aligned_interfaces(landscape: &Landscape, vbar: f64, kind: Orientation) -> [f64; 2] {
    let width = landscape.maxwell_width();
    let l1 = 2.0 * (landscape.beta0 - vbar) / width;
    let l2 = 2.0 - l1;
    let half = match kind {
        Orientation::Valley => 0.5 * l1,
        Orientation::Peak => 0.5 * l2,
    };
    [-half, half]
}

/// Run a geometric viscosity ladder from `eps_start` down to `eps_end`,
/// warm-starting every rung from the one above. A rung that fails to solve
/// truncates the sweep (reported, not fatal).
pub fn run_sweep(
    params: &EosParams,
    landscape: &Landscape,
    vbar: f64,
    eps_start: f64,
    eps_end: f64,
    ratio: f64,
    kind: Orientation,
) -> Result<SweepResult> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Domain(format!("ratio must lie in (0, 1): {ratio}")));
    }
    if !(eps_end > 0.0 && eps_start > eps_end) {
        return Err(Error::Domain(format!(
            "need eps_start > eps_end > 0: {eps_start}, {eps_end}"
        )));
    }
    if !(vbar > landscape.alpha0 && vbar < landscape.beta0) {
        return Err(Error::Infeasible {
            vbar,
            alpha0: landscape.alpha0,
            beta0: landscape.beta0,
        });
    }
    let mut eps_ladder = Vec::new();
    let mut eps = eps_start;
    while eps > eps_end * (1.0 + 1e-9) {
        eps_ladder.push(eps);
        eps *= ratio;
    }
    eps_ladder.push(eps_end);

    let mut rows = Vec::new();
    let mut warm: Option<(f64, [f64; 2])> = None;
    let mut truncated = false;
    for &eps in &eps_ladder {
        match viscous::solve_cell(params, landscape, vbar, eps, 1, warm) {
            Ok((orbit, k)) => {
                warm = Some((eps, k));
                rows.push(measure_rung(params, landscape, vbar, eps, kind, &orbit));
            }
            Err(_) => {
                truncated = true;
                break;
            }
        }
    }
    Ok(SweepResult {
        vbar,
        kind,
        eps_ladder,
        rows,
        truncated,
    })
}

fn measure_rung(
    params: &EosParams,
    landscape: &Landscape,
    vbar: f64,
    eps: f64,
    kind: Orientation,
    orbit: &viscous::Orbit,
) -> SweepRow {
    let sigma = orbit.sigma;
    // sigma - sigma0: direct subtraction while it has digits; below that,
    // recovered from the exact log-space gaps (the level difference of the
    // two well minima equals h1 - h2 and grows in sigma with slope
    // beta_sigma - alpha_sigma)
    let direct = sigma - landscape.sigma0;
    let dsigma = if direct.abs() > 1e-8 {
        direct
    } else {
        viscous::exp_diff(orbit.left.ln_h, orbit.right.ln_h) / (orbit.right.x0 - orbit.left.x0)
    };
    let drift_alpha = plateau_drift(params, landscape.alpha0, dsigma);
    let drift_beta = plateau_drift(params, landscape.beta0, dsigma);
    let gap1 = (drift_alpha + orbit.left.delta).abs();
    let gap2 = (drift_beta - orbit.right.delta).abs();

    let map = orbit.profile_map();
    let t1 = map.time_near_minimum(eps);
    let t2 = map.time_near_maximum(eps);

    // sup-distance outside the interface bands, extremum centers aligned
    let band = 0.5 * BAND_WIDTH_FACTOR * eps * eps.ln().abs();
    let interfaces = aligned_interfaces(landscape, vbar, kind);
    let half = map.half_period;
    let mut sup: Option<f64> = None;
    for i in 0..SUP_PROBES {
        let x = -1.0 + 2.0 * i as f64 / (SUP_PROBES - 1) as f64;
        if interfaces.iter().any(|&xi| (x - xi).abs() < band) {
            continue;
        }
        let phase = match kind {
            Orientation::Valley => x / eps,
            Orientation::Peak => x / eps + half,
        };
        let d = (map.v_valley(phase) - aligned_sharp(landscape, vbar, kind, x)).abs();
        sup = Some(sup.map_or(d, |s: f64| s.max(d)));
    }

    let energy = 2.0 * (-sigma * vbar + orbit.lambda)
        + 2.0 * std::f64::consts::SQRT_2 * eps * orbit.sqrt_integral(viscous::QUAD_REL_TOL);

    SweepRow {
        epsilon: eps,
        sigma,
        lambda: orbit.lambda,
        z1: orbit.z1(),
        z2: orbit.z2(),
        gap1,
        gap2,
        eps_t1: eps * t1,
        eps_t2: eps * t2,
        sup_distance: sup,
        energy,
    }
}

impl SweepResult {
    /// CSV rows, one per solved rung. Absent sup-distances print as NaN.
    pub fn to_csv(&self) -> String {
        csv_table(
            "epsilon,sigma,lambda,z1,z2,gap1,gap2,eps_t1,eps_t2,sup_distance,energy",
            &self
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.epsilon,
                        r.sigma,
                        r.lambda,
                        r.z1,
                        r.z2,
                        r.gap1,
                        r.gap2,
                        r.eps_t1,
                        r.eps_t2,
                        r.sup_distance.unwrap_or(f64::NAN),
                        r.energy,
                    ]
                })
                .collect::<Vec<_>>(),
        )
    }
}

/// Least-squares fit of `ln gap` against `1/epsilon` for both turning-point
/// gaps; slopes are returned as positive decay constants.
pub fn fit_decay(sweep: &SweepResult) -> Result<DecayFit> {
    let usable: Vec<&SweepRow> = sweep
        .rows
        .iter()
        .filter(|r| r.gap1 > 0.0 && r.gap2 > 0.0)
        .collect();
    if usable.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "need at least 4 sweep rows with positive gaps, have {}",
            usable.len()
        )));
    }
    let xs: Vec<f64> = usable.iter().map(|r| 1.0 / r.epsilon).collect();
    let x_mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let x_var: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    if x_var <= 0.0 {
        return Err(Error::InsufficientData(
            "degenerate ladder: all viscosities identical".into(),
        ));
    }
    let fit = |ys: Vec<f64>| {
        let y_mean = ys.iter().sum::<f64>() / ys.len() as f64;
        let cov: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - x_mean) * (y - y_mean))
            .sum();
        let slope = cov / x_var;
        let intercept = y_mean - slope * x_mean;
        let ss_res: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| {
                let e = y - (intercept + slope * x);
                e * e
            })
            .sum();
        let ss_tot: f64 = ys.iter().map(|y| (y - y_mean) * (y - y_mean)).sum();
        (slope, 1.0 - ss_res / ss_tot.max(1e-300))
    };
    let (m1, r2_1) = fit(usable.iter().map(|r| r.gap1.ln()).collect());
    let (m2, r2_2) = fit(usable.iter().map(|r| r.gap2.ln()).collect());
    Ok(DecayFit {
        c1: -m1,
        c2: -m2,
        r2_1,
        r2_2,
    })
}

/// Analytic predictions for the fitted decay constants.
///
/// The level gaps close like `h_i ~ exp(-l_i sqrt(W''_i)/epsilon)` (the rate
/// that makes the plateau times consistent with the period), the
/// turning-point offsets like `sqrt(h_i)`, and the plateau drift like the
/// larger gap; each measured distance therefore decays at the smaller of
/// its own half rate and the opposite side's full rate.
pub fn predicted_decay_constants(
    params: &EosParams,
    landscape: &Landscape,
    vbar: f64,
) -> (f64, f64) {
    let width = landscape.maxwell_width();
    let l1 = 2.0 * (landscape.beta0 - vbar) / width;
    let l2 = 2.0 - l1;
    let rate1 = l1 * (-params.dp_raw(landscape.alpha0)).sqrt();
    let rate2 = l2 * (-params.dp_raw(landscape.beta0)).sqrt();
    ((0.5 * rate1).min(rate2), (0.5 * rate2).min(rate1))
}

/// Which lambda-range branch a sweep ended on (diagnostic for reports).
pub fn final_branch(sweep: &SweepResult, landscape: &Landscape) -> Option<LambdaBranch> {
    sweep.rows.last().map(|r| {
        if r.sigma > landscape.sigma0 {
            LambdaBranch::SigmaAboveMaxwell
        } else {
            LambdaBranch::SigmaAtOrBelowMaxwell
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxwell;

    fn setup() -> (EosParams, Landscape) {
        let params = EosParams::reduced(0.85).unwrap();
        let landscape = maxwell::construct(&params).unwrap();
        (params, landscape)
    }

    #[test]
    fn sweep_validates_inputs() {
        let (params, l) = setup();
        let mid = l.maxwell_midpoint();
        assert!(run_sweep(&params, &l, mid, 0.05, 0.02, 1.5, Orientation::Valley).is_err());
        assert!(run_sweep(&params, &l, mid, 0.02, 0.05, 0.8, Orientation::Valley).is_err());
        assert!(run_sweep(&params, &l, 5.0, 0.05, 0.02, 0.8, Orientation::Valley).is_err());
    }

    #[test]
    fn short_sweep_shrinks_gaps_monotonically() {
        let (params, l) = setup();
        let mid = l.maxwell_midpoint();
        let sweep = run_sweep(&params, &l, mid, 0.06, 0.025, 0.7, Orientation::Valley).unwrap();
        assert!(!sweep.truncated);
        assert!(sweep.rows.len() >= 3);
        for pair in sweep.rows.windows(2) {
            assert!(pair[1].gap1 < pair[0].gap1);
            assert!(pair[1].gap2 < pair[0].gap2);
            assert!(pair[1].epsilon < pair[0].epsilon);
        }
        // gaps measured stably agree with direct subtraction while the
        // latter still has digits
        for row in &sweep.rows {
            let direct1 = (row.z1 - l.alpha0).abs();
            if direct1 > 1e-10 {
                assert!(
                    (row.gap1 - direct1).abs() < 1e-6 * direct1,
                    "gap1 {} vs direct {direct1}",
                    row.gap1
                );
            }
            let direct2 = (row.z2 - l.beta0).abs();
            if direct2 > 1e-10 {
                assert!((row.gap2 - direct2).abs() < 1e-6 * direct2);
            }
        }
    }

    #[test]
    fn decay_fit_requires_enough_rows() {
        let (params, l) = setup();
        let mid = l.maxwell_midpoint();
        let sweep = run_sweep(&params, &l, mid, 0.05, 0.035, 0.8, Orientation::Valley).unwrap();
        assert!(sweep.rows.len() < 4);
        assert!(matches!(fit_decay(&sweep), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn decay_constants_are_positive_and_near_prediction() {
        let (params, l) = setup();
        let mid = l.maxwell_midpoint();
        let sweep = run_sweep(&params, &l, mid, 0.05, 0.012, 0.8, Orientation::Valley).unwrap();
        assert!(!sweep.truncated);
        let fitted = fit_decay(&sweep).unwrap();
        assert!(fitted.c1 > 0.0 && fitted.c2 > 0.0);
        assert!(fitted.r2_1 > 0.99 && fitted.r2_2 > 0.99, "{fitted:?}");
        let (p1, p2) = predicted_decay_constants(&params, &l, mid);
        assert!(
            (fitted.c1 - p1).abs() < 0.2 * p1,
            "c1 fitted {} vs predicted {p1}",
            fitted.c1
        );
        assert!(
            (fitted.c2 - p2).abs() < 0.2 * p2,
            "c2 fitted {} vs predicted {p2}",
            fitted.c2
        );
    }

    #[test]
    fn gauge_fixed_probe_points_converge() {
        // pointwise distances at fixed probe locations (outside the
        // interface bands) decrease along the ladder
        let (params, l) = setup();
        let mid = l.maxwell_midpoint();
        let kind = Orientation::Valley;
        let probes = [-0.9, -0.5, 0.0, 0.5, 0.9];
        let interfaces = aligned_interfaces(&l, mid, kind);
        let mut last: Vec<Option<f64>> = vec![None; probes.len()];
        for eps in [0.02, 0.012, 0.007] {
            let (orbit, _) = crate::viscous::solve_cell(&params, &l, mid, eps, 1, None).unwrap();
            let map = orbit.profile_map();
            let band = 5.0 * eps * eps.ln().abs();
            for (i, &x) in probes.iter().enumerate() {
                if interfaces.iter().any(|&xi| (x - xi).abs() < band) {
                    continue;
                }
                let d = (map.v_valley(x / eps) - aligned_sharp(&l, mid, kind, x)).abs();
                if let Some(prev) = last[i] {
                    assert!(d < prev, "probe {x}: {prev:.3e} -> {d:.3e}");
                }
                last[i] = Some(d);
            }
        }
        assert!(last.iter().filter(|d| d.is_some()).count() >= 3);
    }

    #[test]
    fn degenerate_ladder_is_rejected_by_the_fit() {
        let row = SweepRow {
            epsilon: 0.02,
            sigma: 0.5,
            lambda: 0.8,
            z1: 0.56,
            z2: 3.1,
            gap1: 1e-8,
            gap2: 1e-4,
            eps_t1: 0.9,
            eps_t2: 0.9,
            sup_distance: None,
            energy: -0.1,
        };
        let sweep = SweepResult {
            vbar: 1.84,
            kind: Orientation::Valley,
            eps_ladder: vec![0.02; 5],
            rows: vec![row.clone(), row.clone(), row.clone(), row.clone(), row],
            truncated: false,
        };
        assert!(matches!(fit_decay(&sweep), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn csv_has_one_line_per_solved_rung() {
        let (params, l) = setup();
        let mid = l.maxwell_midpoint();
        let sweep = run_sweep(&params, &l, mid, 0.05, 0.03, 0.8, Orientation::Peak).unwrap();
        let csv = sweep.to_csv();
        assert_eq!(csv.lines().count(), sweep.rows.len() + 1);
        assert!(csv.starts_with("epsilon,sigma"));
    }
}
