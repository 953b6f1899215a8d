//! Return-time and density profiles behind the figures: T(Ψ), averaged
//! return times, and the harmonic mean density at several subdivisions.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fields::{FieldModel, Rhs};
use crate::ode::Tolerances;
use crate::surfaces::{harmonic_average_rho, lattice_generators, seed_point, CriticalSet, Region};
use crate::tracer::{uline_returns, TraceSpec, UlineSearch};

/// Averaging counts of the `T_avg_N` columns.
pub const AVG_COUNTS: [usize; 4] = [1, 10, 20, 30];
/// Subdivisions of the `inv_rho_hat_q` columns.
pub const RHO_SUBDIVISIONS: [usize; 4] = [4, 5, 6, 7];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub region: Region,
    pub psi: f64,
    /// First true u-line return time along `B/ρ`.
    pub t: f64,
    /// `t_N/N` along B for each of [`AVG_COUNTS`].
    pub t_avg: [f64; 4],
    /// `1/ρ̂` for each of [`RHO_SUBDIVISIONS`].
    pub inv_rho_hat: [f64; 4],
}

/// One surface's diagnostics.
pub fn diagnostics_row(
    field: &dyn FieldModel,
    crit: &CriticalSet,
    psi: f64,
    region: Region,
    tol: Tolerances,
) -> Result<DiagnosticsRow> {
    let x0 = seed_point(field, crit, psi, region)?;
    let v = TraceSpec::new(field, Rhs::V, x0).with_tol(tol);
    let gens = lattice_generators(&v, UlineSearch::default(), 1)?;
    let mut inv_rho_hat = [0.0; 4];
    for (out, &q) in inv_rho_hat.iter_mut().zip(&RHO_SUBDIVISIONS) {
        *out = 1.0 / harmonic_average_rho(field, &gens, q)?;
    }
    let n_max = AVG_COUNTS[AVG_COUNTS.len() - 1];
    let b = TraceSpec::new(field, Rhs::B, x0).with_tol(tol);
    let b = b.with_max_time(b.max_time * n_max as f64);
    let r = uline_returns(&b, UlineSearch::default(), n_max)?;
    let times: Vec<f64> = r.valid().map(|e| e.t).collect();
    let mut t_avg = [0.0; 4];
    for (out, &n) in t_avg.iter_mut().zip(&AVG_COUNTS) {
        *out = times[n - 1] / n as f64;
    }
    Ok(DiagnosticsRow {
        region,
        psi,
        t: gens.return_time(),
        t_avg,
        inv_rho_hat,
    })
}
