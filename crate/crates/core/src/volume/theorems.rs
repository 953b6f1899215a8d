use crate::error::{Error, Result};
use crate::fields::{Chart, FieldModel, Rhs};
use crate::ode::Tolerances;
use crate::surfaces::{harmonic_average_rho, lattice_generators, seed_point, CriticalSet, Region};
use crate::tracer::{return_to_section, uline_returns, Section, TraceSpec, UlineSearch};

/// `τ T(Ψ)` with `T` the poloidal return time of the field line through
/// the outboard midplane point at distance `√(2Ψ)` from the axis.
pub fn dvdpsi_thm1(field: &dyn FieldModel, psi: f64, tol: Tolerances) -> Result<f64> {
    if field.chart() != Chart::Cylindrical {
        return Err(Error::Unsupported(
            "the poloidal return-time formula needs the axisymmetric model".into(),
        ));
    }
    if !(psi > 0.0) {
        return Err(Error::InvalidParameter {
            name: "psi",
            reason: format!("need Psi > 0, got {psi}"),
        });
    }
    let a = field.magnetic_axis();
    let x = field.section_to_chart([a[0] + (2.0 * psi).sqrt(), a[1]]);
    if !field.in_domain(&x) {
        return Err(Error::Domain {
            what: "Psi",
            value: psi,
        });
    }
    let spec = TraceSpec::new(field, Rhs::B, x).with_tol(tol);
    let t = return_to_section(&spec, Section::PoloidalAngle, 1)?[0].t;
    Ok(field.u_period() * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Thm3pMode {
    /// Trace `B/ρ` and divide the lattice determinant by `ρ̂`.
    #[default]
    Density,
    /// Take `ρ ≡ 1`: trace `B` and return the determinant itself.
    UnitDensity,
}

/// `Δ(Ψ)/ρ̂(Ψ)` from the period lattice of `(u, B/ρ)` on the surface
/// through the region's seed point.
pub fn dvdpsi_thm3p(
    field: &dyn FieldModel,
    crit: &CriticalSet,
    psi: f64,
    region: Region,
    q: usize,
    mode: Thm3pMode,
    tol: Tolerances,
) -> Result<f64> {
    let x0 = seed_point(field, crit, psi, region)?;
    let rhs = match mode {
        Thm3pMode::Density => Rhs::V,
        Thm3pMode::UnitDensity => Rhs::B,
    };
    let spec = TraceSpec::new(field, rhs, x0).with_tol(tol);
    let gens = lattice_generators(&spec, UlineSearch::default(), 1)?;
    match mode {
        Thm3pMode::Density => Ok(gens.delta / harmonic_average_rho(field, &gens, q)?),
        Thm3pMode::UnitDensity => Ok(gens.delta),
    }
}

/// `|dΦ/dΨ| T̄` with `T̄ = t_N / N` from the first `n_avg` accepted u-line
/// returns along B.
pub fn dvdpsi_thm4(
    field: &dyn FieldModel,
    crit: &CriticalSet,
    psi: f64,
    region: Region,
    n_avg: usize,
    tol: Tolerances,
) -> Result<f64> {
    if n_avg == 0 {
        return Err(Error::InvalidParameter {
            name: "n_avg",
            reason: "need at least one return".into(),
        });
    }
    let x0 = seed_point(field, crit, psi, region)?;
    let base = TraceSpec::new(field, Rhs::B, x0).with_tol(tol);
    let horizon = base.max_time * n_avg.max(1) as f64;
    let spec = base.with_max_time(horizon);
    let r = uline_returns(&spec, UlineSearch::default(), n_avg)?;
    let t_n = r
        .valid()
        .nth(n_avg - 1)
        .expect("search stops once enough returns are accepted")
        .t;
    Ok(flux_per_label(field, &x0).abs() * t_n / n_avg as f64)
}

/// `∮ A♭` along the u-line through `x` by the trapezoid rule with `nodes`
/// points per period.
pub fn phi_flux(field: &dyn FieldModel, x: &[f64; 3], nodes: usize) -> f64 {
    let period = field.u_period();
    let h = period / nodes as f64;
    let mut sum = 0.0;
    for k in 0..nodes {
        let y = field.u_flow(x, k as f64 * h);
        let a = field.a_cov(&y);
        let u = field.u_contra(&y);
        sum += a[0] * u[0] + a[1] * u[1] + a[2] * u[2];
    }
    sum * h
}

const FLUX_NODES: usize = 64;

/// `dΦ/dΨ` across the surface through `x`: the flux through the u-lines of
/// two nearby points displaced along the normal field, divided by their
/// label difference.
pub fn flux_per_label(field: &dyn FieldModel, x: &[f64; 3]) -> f64 {
    let n = field.normal_field(x);
    let h = 1e-5;
    let xp = [x[0] + h * n[0], x[1] + h * n[1], x[2] + h * n[2]];
    let xm = [x[0] - h * n[0], x[1] - h * n[1], x[2] - h * n[2]];
    let dphi = phi_flux(field, &xp, FLUX_NODES) - phi_flux(field, &xm, FLUX_NODES);
    dphi / (field.psi_label(&xp) - field.psi_label(&xm))
}
