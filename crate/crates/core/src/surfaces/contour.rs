use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{region_interval, segment_min_psi, CriticalSet, Region};
use crate::error::{Error, Result};
use crate::fields::FieldModel;
use crate::roots::brent;

/// Samples per ray when bracketing the level set.
const MARCH: usize = 512;
const ROOT_TOL: f64 = 1e-15;

/// A level set of Ψ on the section, one closed loop per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetContour {
    pub region: Region,
    pub psi0: f64,
    /// Nodes of each loop, counter-clockwise about its centre, not repeated
    /// at the end.
    pub loops: Vec<Vec<[f64; 2]>>,
    pub centres: Vec<[f64; 2]>,
    /// Some ray met the level set more than once within the region.
    pub multiple_roots: bool,
}

impl LevelSetContour {
    pub fn components(&self) -> usize {
        self.loops.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64; 2]> {
        self.loops.iter().flatten()
    }
}

/// Where rays are cast from when locating a level set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RayFrame {
    /// Straight rays in the section from a centre point.
    About([f64; 2]),
    /// Rays in scaled polar coordinates about the magnetic axis, centred on
    /// an island O-point: `ξ = (r − r_o)/h_r` radially, `η = (θ − θ_o)/h_θ`
    /// along the island, so the separatrix eye spans roughly the unit
    /// square and every island surface is star-shaped about the origin.
    Island {
        axis: [f64; 2],
        r_o: f64,
        theta_o: f64,
        half_r: f64,
        half_theta: f64,
    },
}

impl RayFrame {
    pub fn about(centre: [f64; 2]) -> Self {
        RayFrame::About(centre)
    }

    /// Island frame about the O-point `o`, scaled by the angular distance
    /// to the nearest X-point and the radial half-width of the separatrix.
    pub fn island(field: &dyn FieldModel, crit: &CriticalSet, o: [f64; 2]) -> Result<Self> {
        let axis = crit.axis.p;
        let sep = crit.psi_sep().ok_or(Error::NoCriticalPoints)?;
        let (dx, dy) = (o[0] - axis[0], o[1] - axis[1]);
        let r_o = dx.hypot(dy);
        let theta_o = dy.atan2(dx);
        let half_theta = crit
            .x_points
            .iter()
            .map(|x| {
                let t = (x.p[1] - axis[1]).atan2(x.p[0] - axis[0]);
                (t - theta_o + PI).rem_euclid(TAU) - PI
            })
            .map(f64::abs)
            .fold(f64::INFINITY, f64::min);
        let at = |r: f64| field.section_psi([axis[0] + r * theta_o.cos(), axis[1] + r * theta_o.sin()]) - sep;
        let r_max = field.section_domain_radius();
        let crossing = |a: f64, b: f64| -> Result<f64> {
            let n = 256;
            let mut prev = a;
            for k in 1..=n {
                let r = a + (b - a) * k as f64 / n as f64;
                if at(prev).signum() != at(r).signum() {
                    return brent(&at, prev, r, 1e-14, 200).ok_or(Error::NoCriticalPoints);
                }
                prev = r;
            }
            Err(Error::NoCriticalPoints)
        };
        let r_in = crossing(r_o, 0.0)?;
        let r_out = crossing(r_o, r_max)?;
        Ok(RayFrame::Island {
            axis,
            r_o,
            theta_o,
            half_r: (r_o - r_in).max(r_out - r_o),
            half_theta,
        })
    }

    fn origin(&self) -> [f64; 2] {
        self.point(0.0, 0.0)
    }

    fn point(&self, angle: f64, s: f64) -> [f64; 2] {
        match *self {
            RayFrame::About(c) => [c[0] + s * angle.cos(), c[1] + s * angle.sin()],
            RayFrame::Island {
                axis,
                r_o,
                theta_o,
                half_r,
                half_theta,
            } => {
                let r = r_o + half_r * s * angle.cos();
                let t = theta_o + half_theta * s * angle.sin();
                [axis[0] + r * t.cos(), axis[1] + r * t.sin()]
            }
        }
    }

    /// Largest ray parameter that keeps the ray inside the domain disc
    /// about the magnetic axis.
    fn reach(&self, field: &dyn FieldModel, angle: f64) -> f64 {
        let axis = field.magnetic_axis();
        let rad = field.section_domain_radius();
        match *self {
            RayFrame::About(centre) => {
                let d = [centre[0] - axis[0], centre[1] - axis[1]];
                let (dx, dy) = (angle.cos(), angle.sin());
                let b = d[0] * dx + d[1] * dy;
                let c = d[0] * d[0] + d[1] * d[1] - rad * rad;
                -b + (b * b - c).max(0.0).sqrt()
            }
            RayFrame::Island { r_o, half_r, .. } => {
                let c = angle.cos();
                let radial = if c > 1e-12 {
                    (rad - r_o) / (half_r * c)
                } else if c < -1e-12 {
                    0.999 * r_o / (half_r * -c)
                } else {
                    f64::INFINITY
                };
                radial.min(ISLAND_REACH)
            }
        }
    }
}

/// Island rays stop by this parameter; the separatrix eye lies within the
/// unit square of the scaled frame.
const ISLAND_REACH: f64 = 2.0;

/// Intersection of the ray from the frame origin at `angle` with the level
/// set `psi0`, chosen by the region convention: the first root for the
/// inner region and islands, the last one for the outer region. The flag
/// reports a second root belonging to the same region.
pub fn ray_root(
    field: &dyn FieldModel,
    crit: &CriticalSet,
    frame: &RayFrame,
    angle: f64,
    psi0: f64,
    region: Region,
) -> Result<([f64; 2], bool)> {
    let sep = crit.psi_sep().filter(|_| crit.has_island());
    let r_max = frame.reach(field, angle);
    let h = r_max / MARCH as f64;
    let pt = |r: f64| frame.point(angle, r);
    let g = |r: f64| field.section_psi(pt(r)) - psi0;
    let mut rs = Vec::with_capacity(MARCH + 1);
    let mut vs = Vec::with_capacity(MARCH + 1);
    for k in 0..=MARCH {
        let r = k as f64 * h;
        let v = g(r);
        rs.push(r);
        vs.push(v);
        if region == Region::Island {
            if let Some(sep) = sep {
                if v + psi0 > sep && k > 0 {
                    break;
                }
            }
        }
    }
    let mut brackets: Vec<(f64, f64)> = Vec::new();
    for k in 1..rs.len() {
        if vs[k - 1] == 0.0 && k > 1 {
            continue;
        }
        if vs[k - 1].signum() != vs[k].signum() || vs[k] == 0.0 {
            brackets.push((rs[k - 1], rs[k]));
            continue;
        }
        // a thin excursion through the level between two samples
        if k + 1 < rs.len() {
            let (a, b, c) = (vs[k - 1], vs[k], vs[k + 1]);
            let is_min = b <= a && b <= c && b > 0.0;
            let is_max = b >= a && b >= c && b < 0.0;
            if is_min || is_max {
                if let Some((rm, vm)) = refine_extremum(&g, rs[k - 1], rs[k + 1], is_min) {
                    if vm.signum() != b.signum() {
                        brackets.push((rs[k - 1], rm));
                        brackets.push((rm, rs[k + 1]));
                    }
                }
            }
        }
    }
    let mut roots: Vec<f64> = brackets
        .iter()
        .filter_map(|&(a, b)| brent(&g, a, b, ROOT_TOL, 200))
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let centre = frame.origin();
    let miss = || Error::RayMiss {
        cx: centre[0],
        cy: centre[1],
        angle,
        psi: psi0,
    };
    let (root, multiple) = match region {
        Region::Inner | Region::Island => {
            let r = *roots.first().ok_or_else(miss)?;
            let multiple = match (region, sep) {
                (Region::Island, _) => roots.len() > 1,
                (_, Some(sep)) => roots
                    .get(1)
                    .is_some_and(|&r2| segment_min_psi(field, pt(r), pt(r2)) > sep),
                _ => false,
            };
            (r, multiple)
        }
        Region::Outer => {
            let r = *roots.last().ok_or_else(miss)?;
            let multiple = match (roots.len(), sep) {
                (n, Some(sep)) if n >= 2 => segment_min_psi(field, pt(roots[n - 2]), pt(r)) > sep,
                _ => false,
            };
            (r, multiple)
        }
    };
    Ok((pt(root), multiple))
}

fn refine_extremum<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64, min: bool) -> Option<(f64, f64)> {
    let s = if min { 1.0 } else { -1.0 };
    let f = |r: f64| s * g(r);
    let k = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - k * (hi - lo);
    let mut d = lo + k * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..50 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - k * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + k * (hi - lo);
            fd = f(d);
        }
    }
    let r = 0.5 * (lo + hi);
    let v = g(r);
    v.is_finite().then_some((r, v))
}

fn region_frames(field: &dyn FieldModel, crit: &CriticalSet, region: Region) -> Result<Vec<RayFrame>> {
    match region {
        Region::Inner | Region::Outer => Ok(vec![RayFrame::about(crit.axis.p)]),
        Region::Island => crit
            .o_points
            .iter()
            .map(|c| RayFrame::island(field, crit, c.p))
            .collect(),
    }
}

fn check_interval(field: &dyn FieldModel, crit: &CriticalSet, psi0: f64, region: Region) -> Result<()> {
    let (lo, hi) = region_interval(field, crit, region)?;
    if psi0 > lo && psi0 < hi {
        Ok(())
    } else {
        Err(Error::OutsideRegion {
            psi: psi0,
            region: region.to_string(),
        })
    }
}

/// The level set `Ψ = psi0` of a region, sampled on `n_g` equally spaced
/// rays about each region centre (the axis, or each O-point in its island
/// frame).
pub fn extract_contour(
    field: &dyn FieldModel,
    crit: &CriticalSet,
    psi0: f64,
    region: Region,
    n_g: usize,
) -> Result<LevelSetContour> {
    if n_g < 3 {
        return Err(Error::InvalidParameter {
            name: "n_g",
            reason: format!("need at least 3 nodes, got {n_g}"),
        });
    }
    check_interval(field, crit, psi0, region)?;
    let frames = region_frames(field, crit, region)?;
    let centres: Vec<[f64; 2]> = frames.iter().map(RayFrame::origin).collect();
    let mut loops = Vec::with_capacity(frames.len());
    let mut multiple_roots = false;
    for frame in &frames {
        let nodes: Vec<([f64; 2], bool)> = (0..n_g)
            .into_par_iter()
            .map(|j| ray_root(field, crit, frame, TAU * j as f64 / n_g as f64, psi0, region))
            .collect::<Result<_>>()?;
        multiple_roots |= nodes.iter().any(|n| n.1);
        loops.push(nodes.into_iter().map(|n| n.0).collect());
    }
    Ok(LevelSetContour {
        region,
        psi0,
        loops,
        centres,
        multiple_roots,
    })
}

/// A chart point on `Ψ = psi0` in the given region, on the outward ray at
/// angle 0 from the first region centre.
pub fn seed_point(field: &dyn FieldModel, crit: &CriticalSet, psi0: f64, region: Region) -> Result<[f64; 3]> {
    check_interval(field, crit, psi0, region)?;
    let frame = region_frames(field, crit, region)?[0];
    let (p, _) = ray_root(field, crit, &frame, 0.0, psi0, region)?;
    Ok(field.section_to_chart(p))
}
