use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use super::grid::transit_time;
use crate::error::{Error, Result};
use crate::fields::{Chart, FieldModel};
use crate::ode::Tolerances;
use crate::surfaces::{extract_contour, CriticalSet, LevelSetContour, Region};

fn wrap(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Chart displacement from `a` to `b`, with angle components wrapped.
fn chart_delta(field: &dyn FieldModel, a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    let mut d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let angles: &[usize] = match field.chart() {
        Chart::Cylindrical => &[1],
        Chart::AdaptedToroidal => &[1, 2],
    };
    for &i in angles {
        d[i] = wrap(d[i]);
    }
    d
}

fn det3(c0: [f64; 3], c1: [f64; 3], c2: [f64; 3]) -> f64 {
    c0[0] * (c1[1] * c2[2] - c1[2] * c2[1]) - c1[0] * (c0[1] * c2[2] - c0[2] * c2[1])
        + c2[0] * (c0[1] * c1[2] - c0[2] * c1[1])
}

/// dV/dΨ from a discretised level set: `Σ_j 𝖳(ν_j) √g det(n, B, ε_j)` with
/// `ε_j` half the chart displacement between the neighbours of node `j`.
/// All loops of the contour are summed.
pub fn contour_dvdpsi(field: &dyn FieldModel, contour: &LevelSetContour, tol: Tolerances) -> Result<f64> {
    let mut items = Vec::new();
    let mut offset = 0;
    for lp in &contour.loops {
        let n = lp.len();
        if n < 3 {
            return Err(Error::DegenerateContour(offset));
        }
        let chart: Vec<[f64; 3]> = lp.iter().map(|&p| field.section_to_chart(p)).collect();
        for j in 0..n {
            let prev = &chart[(j + n - 1) % n];
            let next = &chart[(j + 1) % n];
            let d = chart_delta(field, prev, next);
            let eps = [0.5 * d[0], 0.5 * d[1], 0.5 * d[2]];
            if eps.iter().all(|&e| e == 0.0) {
                return Err(Error::DegenerateContour(offset + j));
            }
            items.push((lp[j], chart[j], eps));
        }
        offset += n;
    }
    let terms: Vec<f64> = items
        .par_iter()
        .map(|&(p, x, eps)| {
            let t = transit_time(field, p, tol)?;
            let w = det3(field.normal_field(&x), field.b_contra(&x), eps);
            Ok(t * field.sqrt_g(&x) * w)
        })
        .collect::<Result<_>>()?;
    let sum: f64 = terms.iter().sum();
    if !sum.is_finite() {
        return Err(Error::NonFinite(contour.psi0));
    }
    Ok(sum.abs())
}

/// Extracts the level set `psi` with `n_g` nodes per loop and applies
/// [`contour_dvdpsi`].
pub fn dvdpsi_contour(
    field: &dyn FieldModel,
    crit: &CriticalSet,
    psi: f64,
    region: Region,
    n_g: usize,
    tol: Tolerances,
) -> Result<f64> {
    let c = extract_contour(field, crit, psi, region, n_g)?;
    contour_dvdpsi(field, &c, tol)
}
