use serde::{Deserialize, Serialize};

use super::{Method, ProfileRow, VolumeProfile};
use crate::error::{Error, Result};
use crate::fields::FieldModel;
use crate::surfaces::{region_interval, CriticalSet, Region};

/// Uniform ladder of flux-surface labels inside one region, ordered from
/// the anchor level outwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiLadder {
    pub region: Region,
    pub values: Vec<f64>,
    /// Width of the band kept clear of the separatrix level.
    pub separatrix_clip: f64,
    /// Integration bounds; they differ from the first and last values only
    /// where the ladder was pulled off the separatrix.
    pub start: f64,
    pub end: f64,
    /// Ladder ends whose derivative is extrapolated from the next two nodes
    /// instead of computed: a region centre (axis or O-point), where the
    /// surface degenerates, or the edge of the separatrix band, where the
    /// return time diverges logarithmically.
    pub extrapolated_ends: [bool; 2],
    /// The requested bounds were clamped to the region interval.
    pub clamped: bool,
}

fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 })
        .collect()
}

impl PsiLadder {
    /// A plain uniform ladder of `n` intervals from `a` to `b`, no clipping.
    pub fn uniform(region: Region, a: f64, b: f64, n: usize) -> Result<Self> {
        check_n(n, 1)?;
        Ok(PsiLadder {
            region,
            values: uniform(a, b, n),
            separatrix_clip: 0.0,
            start: a,
            end: b,
            extrapolated_ends: [false; 2],
            clamped: false,
        })
    }

    /// Ladder of `n` intervals from `psi_a` to `psi_b` in `region`. Bounds
    /// beyond the region interval are clamped to it; a bound on the region
    /// centre is kept but extrapolated, and a bound within the clip band of
    /// the separatrix is moved to the edge of the band and extrapolated.
    pub fn new(
        field: &dyn FieldModel,
        crit: &CriticalSet,
        region: Region,
        psi_a: f64,
        psi_b: f64,
        n: usize,
    ) -> Result<Self> {
        let (lo, hi) = region_interval(field, crit, region)?;
        let width = (psi_b.clamp(lo, hi) - psi_a.clamp(lo, hi)).abs();
        Self::with_clip(field, crit, region, psi_a, psi_b, n, (1e-4 * width).max(1e-6))
    }

    /// Like [`PsiLadder::new`] with an explicit separatrix band `delta`.
    pub fn with_clip(
        field: &dyn FieldModel,
        crit: &CriticalSet,
        region: Region,
        psi_a: f64,
        psi_b: f64,
        n: usize,
        delta: f64,
    ) -> Result<Self> {
        check_n(n, 2)?;
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "separatrix_clip",
                reason: format!("must be positive, got {delta}"),
            });
        }
        if !(psi_a.is_finite() && psi_b.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "psi",
                reason: format!("non-finite bound ({psi_a}, {psi_b})"),
            });
        }
        let (lo, hi) = region_interval(field, crit, region)?;
        let a = psi_a.clamp(lo, hi);
        let b = psi_b.clamp(lo, hi);
        let slack = 1e-9 * (b - a).abs();
        let clamped = (a - psi_a).abs() > slack || (b - psi_b).abs() > slack;
        if a == b {
            return Err(Error::OutsideRegion {
                psi: psi_b,
                region: format!("{region} (empty interval after clamping to [{lo}, {hi}])"),
            });
        }
        let sep = crit.psi_sep().filter(|_| crit.has_island());
        let centre = match region {
            Region::Inner => Some(crit.psi_axis()),
            Region::Island => crit.psi_o(),
            Region::Outer => None,
        };
        let dir = (b - a).signum();
        let near_sep = |v: f64| sep.is_some_and(|s| (v - s).abs() < delta);
        let pull = |v: f64, inward: f64| match sep {
            Some(s) if near_sep(v) => s + inward * delta,
            _ => v,
        };
        let (a1, b1) = (pull(a, dir), pull(b, -dir));
        if (b1 - a1) * dir <= 0.0 {
            return Err(Error::OutsideRegion {
                psi: psi_b,
                region: format!("{region} (interval narrower than the separatrix band)"),
            });
        }
        let at_centre = |v: f64| centre.is_some_and(|c| (v - c).abs() <= 1e-9 * (b - a).abs());
        Ok(PsiLadder {
            region,
            values: uniform(a1, b1, n),
            separatrix_clip: if sep.is_some() { delta } else { 0.0 },
            start: a,
            end: b,
            extrapolated_ends: [at_centre(a1) || near_sep(a), at_centre(b1) || near_sep(b)],
            clamped,
        })
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_extrapolated(&self, i: usize) -> bool {
        (i == 0 && self.extrapolated_ends[0]) || (i + 1 == self.values.len() && self.extrapolated_ends[1])
    }

    /// The ladder without the nodes at `drop` (e.g. failed samples). Ends
    /// keep their integration bounds and are extrapolated from the
    /// remaining nodes.
    pub fn without(&self, drop: &[usize]) -> Result<Self> {
        let last = self.values.len() - 1;
        let keep: Vec<usize> = (0..=last).filter(|i| !drop.contains(i)).collect();
        if keep.len() < 3 {
            return Err(Error::InvalidParameter {
                name: "ladder",
                reason: format!("only {} nodes left", keep.len()),
            });
        }
        Ok(PsiLadder {
            values: keep.iter().map(|&i| self.values[i]).collect(),
            extrapolated_ends: [
                self.extrapolated_ends[0] && keep[0] == 0,
                self.extrapolated_ends[1] && *keep.last().unwrap() == last,
            ],
            ..self.clone()
        })
    }
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("need at least {min} ladder intervals, got {n}"),
        });
    }
    Ok(())
}

/// Straight line through `(x0, f0)` and `(x1, f1)` evaluated at `x`.
fn linear(x0: f64, f0: f64, x1: f64, f1: f64, x: f64) -> f64 {
    f0 + (f1 - f0) * (x - x0) / (x1 - x0)
}

/// Cumulative trapezoid of `|dV/dΨ|` along the ladder, starting from 0 at
/// `ladder.start`. `samples` align with `ladder.values`; entries at
/// extrapolated ends are ignored.
pub fn integrate_profile(method: Method, ladder: &PsiLadder, samples: &[f64]) -> Result<VolumeProfile> {
    let n = ladder.values.len();
    if samples.len() != n {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("{} samples for {n} ladder values", samples.len()),
        });
    }
    if n < 2 || (n < 3 && ladder.extrapolated_ends.iter().any(|&c| c)) {
        return Err(Error::InvalidParameter {
            name: "ladder",
            reason: format!("{n} values are too few"),
        });
    }
    let x = &ladder.values;
    let mut f = vec![0.0; n];
    for i in 0..n {
        if ladder.is_extrapolated(i) {
            continue;
        }
        if !samples[i].is_finite() {
            return Err(Error::NonFinite(x[i]));
        }
        f[i] = samples[i].abs();
    }
    if ladder.extrapolated_ends[0] {
        f[0] = linear(x[1], f[1], x[2], f[2], x[0]).max(0.0);
    }
    if ladder.extrapolated_ends[1] {
        f[n - 1] = linear(x[n - 2], f[n - 2], x[n - 3], f[n - 3], x[n - 1]).max(0.0);
    }
    let mut pts: Vec<(f64, f64, bool)> = Vec::with_capacity(n + 2);
    if ladder.start != x[0] {
        pts.push((
            ladder.start,
            linear(x[0], f[0], x[1], f[1], ladder.start).max(0.0),
            true,
        ));
    }
    pts.extend((0..n).map(|i| (x[i], f[i], ladder.is_extrapolated(i))));
    if ladder.end != x[n - 1] {
        pts.push((
            ladder.end,
            linear(x[n - 1], f[n - 1], x[n - 2], f[n - 2], ladder.end).max(0.0),
            true,
        ));
    }
    let mut rows = Vec::with_capacity(pts.len());
    let mut v = 0.0;
    for (k, &(psi, d, extrapolated)) in pts.iter().enumerate() {
        if k > 0 {
            let (p0, d0, _) = pts[k - 1];
            v += 0.5 * (d0 + d) * (psi - p0).abs();
        }
        rows.push(ProfileRow {
            psi,
            dvdpsi: Some(d),
            v_cum: v,
            extrapolated,
        });
    }
    Ok(VolumeProfile {
        method,
        region: ladder.region,
        rows,
    })
}
