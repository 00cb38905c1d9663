//! Linearized Fourier stability of constant states under density
//! viscosity.
//!
//! Linearizing the density-regularized system about a constant state
//! `(rho0, 0)` and inserting the mode `exp(i n x)` gives a 2x2 system with
//! matrix
//!
//! ```text
//! A = [ -eps n^2      i n rho0   ]
//!     [ (i n / rho0) p'(rho0)   -n^2 ]
//! ```
//!
//! Growth rates here are the real parts of the eigenvalues computed from
//! the trace and determinant by the standard quadratic formula
//! `(tau +- sqrt(tau^2 - 4 det)) / 2`; since the trace is negative for
//! `n != 0`, a mode grows exactly when the determinant
//! `eps n^4 + p'(rho0) n^2` is negative, i.e. for
//! `0 < |n| < sqrt(-p'(rho0)/eps)`.

use crate::eos::EosParams;
use crate::report::csv_table;
use crate::{Error, Result};
use serde::Serialize;

/// Growth rates of the Fourier modes about one constant state.
#[derive(Debug, Clone, Serialize)]
pub struct ModeSpectrum {
    pub rho0: f64,
    pub eps_rho: f64,
    /// `(n, growth)` for integer wavenumbers `0..=n_max`.
    pub modes: Vec<(u32, f64)>,
    /// Continuous instability cutoff `sqrt(-p'(rho0)/eps)`, zero when the
    /// state is mechanically stable.
    pub cutoff: f64,
}

impl ModeSpectrum {
    /// Largest integer wavenumber with positive growth, if any.
    pub fn largest_unstable(&self) -> Option<u32> {
        self.modes
            .iter()
            .rev()
            .find(|(_, g)| *g > 0.0)
            .map(|(n, _)| *n)
    }

    /// CSV rows `(n, growth)`.
    pub fn to_csv(&self) -> String {
        csv_table(
            "n,growth",
            &self
                .modes
                .iter()
                .map(|&(n, g)| vec![n as f64, g])
                .collect::<Vec<_>>(),
        )
    }
}

fn pressure_slope_in_density(params: &EosParams, rho0: f64) -> Result<f64> {
    if !(rho0 > 0.0) || !(1.0 / rho0 > params.b) {
        return Err(Error::Domain(format!(
            "base density must satisfy 0 < rho0 < 1/b: rho0 = {rho0}, b = {}",
            params.b
        )));
    }
    let v = 1.0 / rho0;
    // chain rule from the volume form: dp/drho = -v^2 dp/dv
    Ok(-v * v * params.dp_raw(v))
}

/// Real part of the fastest eigenvalue of the mode matrix at wavenumber `n`.
pub fn growth_rate(params: &EosParams, rho0: f64, eps_rho: f64, n: u32) -> Result<f64> {
    if !(eps_rho > 0.0) {
        return Err(Error::Domain(format!(
            "density viscosity must be positive: {eps_rho}"
        )));
    }
    let p_rho = pressure_slope_in_density(params, rho0)?;
    let n2 = (n as f64) * (n as f64);
    let trace = -(eps_rho + 1.0) * n2;
    let det = eps_rho * n2 * n2 + p_rho * n2;
    let disc = trace * trace - 4.0 * det;
    if disc >= 0.0 {
        Ok(0.5 * (trace + disc.sqrt()))
    } else {
        Ok(0.5 * trace)
    }
}

/// Tabulate growth rates for `0 <= n <= n_max` together with the analytic
/// cutoff.
pub fn unstable_band(
    params: &EosParams,
    rho0: f64,
    eps_rho: f64,
    n_max: u32,
) -> Result<ModeSpectrum> {
    let p_rho = pressure_slope_in_density(params, rho0)?;
    let cutoff = if p_rho < 0.0 {
        (-p_rho / eps_rho).sqrt()
    } else {
        0.0
    };
    let modes = (0..=n_max)
        .map(|n| Ok((n, growth_rate(params, rho0, eps_rho, n)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeSpectrum {
        rho0,
        eps_rho,
        modes,
        cutoff,
    })
}
