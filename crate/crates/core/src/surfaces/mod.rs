//! Flux-surface geometry on the poloidal section φ = 0.

mod contour;
mod critical;
mod lattice;

pub use contour::{extract_contour, ray_root, seed_point, LevelSetContour, RayFrame};
pub use critical::{find_critical_points, CriticalKind, CriticalPoint, CriticalSearch, CriticalSet};
pub use lattice::{harmonic_average_rho, lattice_generators, LatticeGenerators};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FieldModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Inner,
    Island,
    Outer,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::Inner, Region::Island, Region::Outer];

    pub fn name(self) -> &'static str {
        match self {
            Region::Inner => "inner",
            Region::Island => "island",
            Region::Outer => "outer",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "inner" | "in" => Ok(Region::Inner),
            "island" | "isl" => Ok(Region::Island),
            "outer" | "out" => Ok(Region::Outer),
            _ => Err(Error::InvalidParameter {
                name: "region",
                reason: format!("unknown region {s:?}"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub region: Region,
    /// Within 1e-9 of the separatrix level.
    pub boundary: bool,
}

/// Samples along a ray used to find the lowest value of Ψ on it.
const RAY_SAMPLES: usize = 64;

/// Minimum of Ψ along the segment from `a` to `b`: a coarse scan refined by
/// golden-section search around the best sample.
pub(crate) fn segment_min_psi(field: &dyn FieldModel, a: [f64; 2], b: [f64; 2]) -> f64 {
    segment_min(&|p| field.section_psi(p), a, b)
}

fn segment_min(g: &dyn Fn([f64; 2]) -> f64, a: [f64; 2], b: [f64; 2]) -> f64 {
    let at = |s: f64| g([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
    let mut best = (0usize, at(0.0));
    for k in 1..=RAY_SAMPLES {
        let v = at(k as f64 / RAY_SAMPLES as f64);
        if v < best.1 {
            best = (k, v);
        }
    }
    let h = 1.0 / RAY_SAMPLES as f64;
    let mut lo = (best.0 as f64 - 1.0).max(0.0) * h;
    let mut hi = (best.0 as f64 + 1.0).min(RAY_SAMPLES as f64) * h;
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (at(c), at(d));
    for _ in 0..40 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = at(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = at(d);
        }
    }
    best.1.min(fc).min(fd).min(at(1.0))
}

/// Region of a section point.
///
/// Below the separatrix level a point is in the island. Above it, a point is
/// inner when the straight segment from the magnetic axis stays above the
/// separatrix level, outer otherwise. Without islands everything is inner.
pub fn classify(field: &dyn FieldModel, crit: &CriticalSet, p: [f64; 2]) -> Classification {
    let Some(sep) = crit.psi_sep().filter(|_| crit.has_island()) else {
        return Classification {
            region: Region::Inner,
            boundary: false,
        };
    };
    let psi = field.section_psi(p);
    let boundary = (psi - sep).abs() <= 1e-9;
    let region = if psi < sep {
        Region::Island
    } else if segment_min_psi(field, crit.axis.p, p) > sep {
        Region::Inner
    } else {
        Region::Outer
    };
    Classification { region, boundary }
}

/// Open interval of Ψ values carried by a region. For an outer region the
/// upper end is Ψ on the domain boundary along the positive ỹ axis.
pub fn region_interval(field: &dyn FieldModel, crit: &CriticalSet, region: Region) -> Result<(f64, f64)> {
    let axis = crit.psi_axis();
    match (region, crit.psi_sep().filter(|_| crit.has_island())) {
        (Region::Inner, Some(sep)) => Ok(ordered(sep, axis)),
        (Region::Inner, None) => Ok(ordered(axis, monotone_edge(field, crit.axis.p))),
        (Region::Island, Some(sep)) => Ok(ordered(crit.psi_o().unwrap_or(sep), sep)),
        (Region::Outer, Some(sep)) => {
            let c = crit.axis.p;
            let edge = field.section_psi([c[0] + field.section_domain_radius(), c[1]]);
            Ok(ordered(sep, edge))
        }
        (r, None) => Err(Error::OutsideRegion {
            psi: f64::NAN,
            region: format!("{r} (field has no island)"),
        }),
    }
}

/// Level the region's volume is measured from: the magnetic axis, the
/// O-point, or the separatrix.
pub fn region_anchor(crit: &CriticalSet, region: Region) -> Result<f64> {
    let island = |v: Option<f64>| {
        v.filter(|_| crit.has_island()).ok_or_else(|| Error::OutsideRegion {
            psi: f64::NAN,
            region: format!("{region} (field has no island)"),
        })
    };
    match region {
        Region::Inner => Ok(crit.psi_axis()),
        Region::Island => island(crit.psi_o()),
        Region::Outer => island(crit.psi_sep()),
    }
}

/// Critical points of a field: a full search when the model can carry
/// islands, the magnetic axis alone otherwise.
pub fn critical_set(field: &dyn FieldModel) -> Result<CriticalSet> {
    if field.has_islands() {
        find_critical_points(field, CriticalSearch::default())
    } else {
        Ok(CriticalSet::axis_only(field))
    }
}

/// Ψ where it stops being monotone along the ray from the axis along +ỹ, or
/// on the domain boundary.
fn monotone_edge(field: &dyn FieldModel, c: [f64; 2]) -> f64 {
    let r_max = field.section_domain_radius();
    let n = 4 * RAY_SAMPLES;
    let at = |k: usize| field.section_psi([c[0] + r_max * k as f64 / n as f64, c[1]]);
    let v1 = at(1);
    let rising = v1 > at(0);
    let mut prev = v1;
    for k in 2..=n {
        let v = at(k);
        if (v > prev) != rising {
            let a = [c[0] + r_max * (k - 2) as f64 / n as f64, c[1]];
            let b = [c[0] + r_max * k as f64 / n as f64, c[1]];
            return if rising {
                -segment_min(&|p| -field.section_psi(p), a, b)
            } else {
                segment_min_psi(field, a, b)
            };
        }
        prev = v;
    }
    prev
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[cfg(test)]
mod tests;
