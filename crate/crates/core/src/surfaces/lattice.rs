use crate::error::{Error, Result};
use crate::fields::{FieldModel, Rhs};
use crate::tracer::{uline_returns, CrossingEvent, TraceSpec, Trajectory, UlineSearch};

/// Generators of the period lattice of the joint (u, v) flow on one flux
/// surface, as (u-time, v-time) pairs.
#[derive(Debug, Clone)]
pub struct LatticeGenerators {
    pub t1: [f64; 2],
    /// `(−c, T)`; the shift `c` is never computed and stored as 0.
    pub t2: [f64; 2],
    pub delta: f64,
    pub c_known: bool,
    /// The accepted u-line return along the traced field.
    pub event: CrossingEvent,
    /// Dense trajectory from the start point up to the return.
    pub trajectory: Trajectory,
    pub x0: [f64; 3],
    pub rhs: Rhs,
}

impl LatticeGenerators {
    pub fn return_time(&self) -> f64 {
        self.t2[1]
    }
}

/// `T1 = (τ, 0)` from the common u-period and `T2 = (−c, T)` from the
/// `count`-th accepted return to the u-line through `spec.x0` along
/// `spec.rhs` (normally v). With validation on, `count = 1` is the true
/// return; in counting mode island surfaces need `count = 2`.
pub fn lattice_generators(spec: &TraceSpec, search: UlineSearch, count: usize) -> Result<LatticeGenerators> {
    let count = count.max(1);
    let r = uline_returns(spec, search, count)?;
    let event = if search.validate {
        r.valid().nth(count - 1).copied()
    } else {
        r.candidates.get(count - 1).copied()
    }
    .expect("search stops once enough returns are accepted");
    let tau = spec.field.u_period();
    let t = event.t;
    Ok(LatticeGenerators {
        t1: [tau, 0.0],
        t2: [0.0, t],
        delta: (tau * t).abs(),
        c_known: false,
        event,
        trajectory: r.trajectory,
        x0: spec.x0,
        rhs: spec.rhs,
    })
}

/// Harmonic average `ρ̂`: the reciprocal of the mean of `1/ρ` over the
/// `q × q` subdivision of the lattice, reached by flowing along v for
/// `n₂T/q` and along u for `n₁τ/q`. The unknown shift `c` only offsets each
/// row of u-samples, which leaves the equally spaced rule spectrally
/// accurate.
pub fn harmonic_average_rho(field: &dyn FieldModel, gens: &LatticeGenerators, q: usize) -> Result<f64> {
    if q < 2 {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: format!("need q >= 2, got {q}"),
        });
    }
    let t = gens.return_time();
    let tau = gens.t1[0];
    let mut sum = 0.0;
    for n2 in 0..q {
        let tv = n2 as f64 * t / q as f64;
        let y = if n2 == 0 { gens.x0 } else { gens.trajectory.point(tv) };
        for n1 in 0..q {
            let x = field.u_flow(&y, n1 as f64 * tau / q as f64);
            let rho = field.density(&x);
            if !(rho.is_finite() && rho != 0.0) {
                return Err(Error::NonFinite(field.psi_label(&x)));
            }
            sum += 1.0 / rho;
        }
    }
    Ok((q * q) as f64 / sum)
}
