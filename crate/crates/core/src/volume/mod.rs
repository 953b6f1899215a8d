//! Enclosed volumes: direct grid sampling, the contour integral, the
//! return-time theorems, and the Ψ-quadrature of dV/dΨ profiles.

mod contour;
mod grid;
mod ladder;
mod theorems;

pub use contour::{contour_dvdpsi, dvdpsi_contour};
pub use grid::{transit_time, volume_grid, GridSpec, GridVolume, NodeLayout};
pub use ladder::{integrate_profile, PsiLadder};
pub use theorems::{dvdpsi_thm1, dvdpsi_thm3p, dvdpsi_thm4, flux_per_label, phi_flux, Thm3pMode};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FieldModel;
use crate::ode::Tolerances;
use crate::surfaces::{CriticalSet, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Section sampling weighted by the toroidal transit time.
    Grid,
    /// Transit time integrated over a discretised level set.
    Contour,
    /// Poloidal return time of an axisymmetric field.
    Thm1,
    /// Lattice determinant over the harmonic mean density.
    Thm3p,
    /// Averaged u-line return time times the flux per unit Ψ.
    Thm4,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Grid, Method::Contour, Method::Thm1, Method::Thm3p, Method::Thm4];

    pub fn name(self) -> &'static str {
        match self {
            Method::Grid => "grid",
            Method::Contour => "contour",
            Method::Thm1 => "thm1",
            Method::Thm3p => "thm3p",
            Method::Thm4 => "thm4",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter {
                name: "method",
                reason: format!("unknown method {s:?}"),
            })
    }
}

/// Knobs shared by the profile methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodOptions {
    pub tol: Tolerances,
    /// Lattice subdivision for the harmonic mean density.
    pub q: usize,
    /// Number of u-line returns averaged.
    pub n_avg: usize,
    /// Nodes per level-set loop.
    pub n_g: usize,
    /// Treat the density as 1 in the lattice method.
    pub unit_density: bool,
}

impl Default for MethodOptions {
    fn default() -> Self {
        MethodOptions {
            tol: Tolerances::default(),
            q: 6,
            n_avg: 10,
            n_g: 100,
            unit_density: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub psi: f64,
    /// `None` where the method gives no derivative (grid totals).
    pub dvdpsi: Option<f64>,
    pub v_cum: f64,
    /// The derivative was extrapolated rather than computed.
    pub extrapolated: bool,
}

/// Cumulative volume along a ladder of flux surfaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeProfile {
    pub method: Method,
    pub region: Region,
    pub rows: Vec<ProfileRow>,
}

impl VolumeProfile {
    pub fn total(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.v_cum)
    }

    /// Adds a constant to every cumulative value, e.g. the volume enclosed
    /// by the inner and island regions for an outer profile.
    pub fn offset(mut self, v: f64) -> Self {
        for r in &mut self.rows {
            r.v_cum += v;
        }
        self
    }
}

/// dV/dΨ at one surface by a profile method.
pub fn dvdpsi(
    field: &dyn FieldModel,
    crit: &CriticalSet,
    method: Method,
    psi: f64,
    region: Region,
    opts: &MethodOptions,
) -> Result<f64> {
    match method {
        Method::Grid => Err(Error::Unsupported(
            "the grid method gives interval volumes, not dV/dPsi".into(),
        )),
        Method::Contour => dvdpsi_contour(field, crit, psi, region, opts.n_g, opts.tol),
        Method::Thm1 => dvdpsi_thm1(field, psi, opts.tol),
        Method::Thm3p => {
            let mode = if opts.unit_density {
                Thm3pMode::UnitDensity
            } else {
                Thm3pMode::Density
            };
            dvdpsi_thm3p(field, crit, psi, region, opts.q, mode, opts.tol)
        }
        Method::Thm4 => dvdpsi_thm4(field, crit, psi, region, opts.n_avg, opts.tol),
    }
}

/// dV/dΨ on every ladder node that needs evaluating, in ladder order. Nodes
/// that are filled by extrapolation come back as `Ok(NaN)`.
pub fn sample_ladder(
    field: &dyn FieldModel,
    crit: &CriticalSet,
    method: Method,
    ladder: &PsiLadder,
    opts: &MethodOptions,
) -> Vec<Result<f64>> {
    (0..ladder.values.len())
        .into_par_iter()
        .map(|i| {
            if ladder.is_extrapolated(i) {
                Ok(f64::NAN)
            } else {
                dvdpsi(field, crit, method, ladder.values[i], ladder.region, opts)
            }
        })
        .collect()
}

/// Samples a ladder and integrates it; the first failed node aborts.
pub fn volume_profile(
    field: &dyn FieldModel,
    crit: &CriticalSet,
    method: Method,
    ladder: &PsiLadder,
    opts: &MethodOptions,
) -> Result<VolumeProfile> {
    let samples = sample_ladder(field, crit, method, ladder, opts)
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    integrate_profile(method, ladder, &samples)
}
