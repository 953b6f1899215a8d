use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FieldModel;

/// Kind of a nondegenerate critical point of Ψ on the section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    /// Local extremum (the magnetic axis or an island O-point).
    Elliptic,
    /// Saddle (an island X-point).
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub p: [f64; 2],
    pub psi: f64,
    pub kind: CriticalKind,
}

/// Critical points of Ψ on the section φ = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    pub axis: CriticalPoint,
    pub o_points: Vec<CriticalPoint>,
    pub x_points: Vec<CriticalPoint>,
}

impl CriticalSet {
    pub fn psi_axis(&self) -> f64 {
        self.axis.psi
    }

    /// Ψ at the island O-points (they share one value by symmetry; the mean
    /// is returned).
    pub fn psi_o(&self) -> Option<f64> {
        mean(self.o_points.iter().map(|c| c.psi))
    }

    /// Ψ of the separatrix through the X-points.
    pub fn psi_sep(&self) -> Option<f64> {
        mean(self.x_points.iter().map(|c| c.psi))
    }

    pub fn has_island(&self) -> bool {
        !self.o_points.is_empty() && !self.x_points.is_empty()
    }

    /// A critical set with only the magnetic axis, for symmetric fields.
    pub fn axis_only(field: &dyn FieldModel) -> Self {
        let p = field.magnetic_axis();
        CriticalSet {
            axis: CriticalPoint {
                p,
                psi: field.section_psi(p),
                kind: CriticalKind::Elliptic,
            },
            o_points: vec![],
            x_points: vec![],
        }
    }
}

fn mean(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Seed grid for the Newton search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalSearch {
    /// Half-width of the square of seeds about the magnetic axis.
    pub radius: f64,
    /// Seeds per side.
    pub seeds: usize,
}

impl Default for CriticalSearch {
    fn default() -> Self {
        CriticalSearch { radius: 1.0, seeds: 25 }
    }
}

const HESS_STEP: f64 = 1e-6;
const GRAD_TOL: f64 = 1e-13;
const DEDUPE: f64 = 1e-8;
/// Hessians with smaller |det| (relative to the squared trace) are treated
/// as degenerate, e.g. the resonant circle of the unperturbed field.
const DEGENERATE: f64 = 1e-6;

fn hessian(field: &dyn FieldModel, p: [f64; 2]) -> [[f64; 2]; 2] {
    let mut h = [[0.0; 2]; 2];
    for j in 0..2 {
        let mut pp = p;
        let mut pm = p;
        pp[j] += HESS_STEP;
        pm[j] -= HESS_STEP;
        let gp = field.section_psi_gradient(pp);
        let gm = field.section_psi_gradient(pm);
        for i in 0..2 {
            h[i][j] = (gp[i] - gm[i]) / (2.0 * HESS_STEP);
        }
    }
    let sym = 0.5 * (h[0][1] + h[1][0]);
    h[0][1] = sym;
    h[1][0] = sym;
    h
}

fn newton(field: &dyn FieldModel, mut p: [f64; 2], limit: f64) -> Option<[f64; 2]> {
    let centre = field.magnetic_axis();
    for _ in 0..60 {
        let g = field.section_psi_gradient(p);
        if g[0].hypot(g[1]) < GRAD_TOL {
            return Some(p);
        }
        let h = hessian(field, p);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let dy = (h[0][0] * g[1] - h[1][0] * g[0]) / det;
        let step = dx.hypot(dy);
        let scale = if step > 0.1 * limit { 0.1 * limit / step } else { 1.0 };
        p = [p[0] - scale * dx, p[1] - scale * dy];
        if (p[0] - centre[0]).hypot(p[1] - centre[1]) > 1.5 * limit {
            return None;
        }
        if step < 1e-15 {
            let g = field.section_psi_gradient(p);
            return (g[0].hypot(g[1]) < 1e-10).then_some(p);
        }
    }
    let g = field.section_psi_gradient(p);
    (g[0].hypot(g[1]) < 1e-10).then_some(p)
}

/// Newton iteration on `∇Ψ = 0` from a square grid of seeds, classified by
/// the sign of the Hessian determinant and de-duplicated.
pub fn find_critical_points(field: &dyn FieldModel, search: CriticalSearch) -> Result<CriticalSet> {
    let centre = field.magnetic_axis();
    let n = search.seeds.max(2);
    let mut found: Vec<CriticalPoint> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let s = [
                centre[0] - search.radius + 2.0 * search.radius * (i as f64 + 0.5) / n as f64,
                centre[1] - search.radius + 2.0 * search.radius * (j as f64 + 0.5) / n as f64,
            ];
            let Some(p) = newton(field, s, search.radius) else {
                continue;
            };
            if found.iter().any(|c| (c.p[0] - p[0]).hypot(c.p[1] - p[1]) < DEDUPE) {
                continue;
            }
            let h = hessian(field, p);
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            let tr = h[0][0] + h[1][1];
            if det.abs() <= DEGENERATE * tr * tr {
                continue;
            }
            let kind = if det > 0.0 {
                CriticalKind::Elliptic
            } else {
                CriticalKind::Hyperbolic
            };
            found.push(CriticalPoint {
                p,
                psi: field.section_psi(p),
                kind,
            });
        }
    }
    let axis_idx = found
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind == CriticalKind::Elliptic)
        .min_by(|a, b| {
            let da = (a.1.p[0] - centre[0]).hypot(a.1.p[1] - centre[1]);
            let db = (b.1.p[0] - centre[0]).hypot(b.1.p[1] - centre[1]);
            da.total_cmp(&db)
        })
        .map(|(i, _)| i)
        .ok_or(Error::NoCriticalPoints)?;
    let axis = found.remove(axis_idx);
    let mut o_points: Vec<_> = found
        .iter()
        .copied()
        .filter(|c| c.kind == CriticalKind::Elliptic)
        .collect();
    let mut x_points: Vec<_> = found
        .iter()
        .copied()
        .filter(|c| c.kind == CriticalKind::Hyperbolic)
        .collect();
    let by_angle = |a: &CriticalPoint, b: &CriticalPoint| {
        // angles in [0, 2π), with round-off just below 0 counted as 0
        let ang = |c: &CriticalPoint| ((c.p[1] - centre[1]).atan2(c.p[0] - centre[0]) + 1e-9).rem_euclid(TAU);
        ang(a).total_cmp(&ang(b))
    };
    o_points.sort_by(by_angle);
    x_points.sort_by(by_angle);
    Ok(CriticalSet {
        axis,
        o_points,
        x_points,
    })
}
