//! Reproduction of the two accuracy tables: the axisymmetric field against
//! the exact law and the helical field against a fine lattice reference.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Axisymmetric, FieldModel, Helical};
use crate::surfaces::{find_critical_points, CriticalSearch, CriticalSet, Region};
use crate::volume::{volume_grid, volume_profile, GridSpec, Method, MethodOptions, PsiLadder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableId {
    Table1,
    Table2,
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableId::Table1 => "table1",
            TableId::Table2 => "table2",
        })
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table1" | "1" => Ok(TableId::Table1),
            "table2" | "2" => Ok(TableId::Table2),
            _ => Err(Error::InvalidParameter {
                name: "table",
                reason: format!("unknown table {s:?}"),
            }),
        }
    }
}

/// One method at one interval, with the published figures alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub table: TableId,
    pub row: usize,
    pub region: Region,
    pub psi1: f64,
    pub psi2: f64,
    pub method: Method,
    /// Grid side, or ladder intervals for the profile methods.
    pub n1: usize,
    /// Second grid side, or nodes per level set for the contour method.
    pub n2: Option<usize>,
    pub volume: Option<f64>,
    /// Exact volume (axisymmetric) or the fine lattice reference (helical).
    pub reference: f64,
    pub rel_err: Option<f64>,
    pub published_volume: f64,
    pub published_rel_err: f64,
    pub published_seconds: f64,
    pub seconds: f64,
    pub error: Option<String>,
}

impl TableCell {
    /// Relative difference from the published volume.
    pub fn published_diff(&self) -> Option<f64> {
        self.volume
            .map(|v| (v - self.published_volume).abs() / self.published_volume)
    }
}

struct Published {
    method: Method,
    n1: usize,
    n2: Option<usize>,
    volume: f64,
    seconds: f64,
    rel_err: f64,
}

const fn cell(method: Method, n1: usize, n2: Option<usize>, volume: f64, seconds: f64, rel_err: f64) -> Published {
    Published {
        method,
        n1,
        n2,
        volume,
        seconds,
        rel_err,
    }
}

use Method::{Contour, Grid, Thm1, Thm3p, Thm4};

/// Outboard radius `R1` of the outer surface, and the published cells.
const TABLE1: [(f64, [Published; 3]); 4] = [
    (
        1.2,
        [
            cell(Grid, 300, Some(300), 0.782214, 67.0, 0.009),
            cell(Contour, 50, Some(50), 0.787261, 56.0, 0.003),
            cell(Thm1, 20, None, 0.789548, 5.0, 2.6e-5),
        ],
    ),
    (
        1.4,
        [
            cell(Grid, 200, Some(200), 3.123140, 107.0, 0.011),
            cell(Contour, 50, Some(50), 3.149079, 57.0, 0.003),
            cell(Thm1, 20, None, 3.158248, 5.0, 7.9e-6),
        ],
    ),
    (
        1.6,
        [
            cell(Grid, 200, Some(200), 7.016993, 240.0, 0.012),
            cell(Contour, 50, Some(50), 7.085340, 57.0, 0.003),
            cell(Thm1, 20, None, 7.106088, 4.0, 3.8e-6),
        ],
    ),
    (
        1.8,
        [
            cell(Grid, 200, Some(200), 12.488658, 403.0, 0.011),
            cell(Contour, 50, Some(50), 12.595751, 58.0, 0.003),
            cell(Thm1, 20, None, 12.633059, 4.0, 2.7e-6),
        ],
    ),
];

/// An interval of the helical table: the surfaces through `(ỹ1, 0)` and
/// `(ỹ2, 0)`, with the rounded labels printed next to them.
pub struct Interval {
    pub y1: f64,
    pub y2: f64,
    pub printed_psi1: f64,
    pub printed_psi2: f64,
    pub region: Region,
}

const INNER_BOX: ([f64; 2], [f64; 2]) = ([-0.335, 0.335], [-0.47, 0.47]);
const WIDE_BOX: ([f64; 2], [f64; 2]) = ([-0.9, 0.9], [-0.8, 0.8]);

const fn interval(y1: f64, y2: f64, printed_psi1: f64, printed_psi2: f64, region: Region) -> Interval {
    Interval {
        y1,
        y2,
        printed_psi1,
        printed_psi2,
        region,
    }
}

pub const TABLE2_INTERVALS: [Interval; 6] = [
    interval(0.0, 0.150, 0.0, -0.0060, Region::Inner),
    interval(0.0, 0.320, 0.0, -0.0245, Region::Inner),
    interval(0.52542, 0.550, -0.0384, -0.0380, Region::Island),
    interval(0.52542, 0.662, -0.0384, -0.0251, Region::Island),
    interval(0.66345, 0.670, -0.0248, -0.0240, Region::Outer),
    interval(0.66345, 0.780, -0.0248, 0.0172, Region::Outer),
];

const TABLE2: [[Published; 4]; 6] = [
    [
        cell(Grid, 300, Some(300), 0.997447, 145.0, 0.006),
        cell(Contour, 100, Some(100), 1.002811, 261.0, 7.7e-4),
        cell(Thm3p, 100, None, 1.013366, 31.0, 9.7e-4),
        cell(Thm4, 100, None, 1.003619, 115.0, 3.3e-5),
    ],
    [
        cell(Grid, 300, Some(300), 4.998763, 652.0, 0.005),
        cell(Contour, 100, Some(100), 5.027210, 252.0, 8.1e-4),
        cell(Thm3p, 100, None, 5.031270, 30.0, 0.002),
        cell(Thm4, 100, None, 5.031856, 114.0, 0.002),
    ],
    [
        cell(Grid, 500, Some(500), 0.155675, 17.0, 0.003),
        cell(Contour, 100, Some(100), 0.154939, 310.0, 0.002),
        cell(Thm3p, 100, None, 0.155206, 16.0, 5.1e-5),
        cell(Thm4, 100, None, 0.155038, 58.0, 0.001),
    ],
    [
        cell(Grid, 500, Some(500), 7.470030, 640.0, 0.005),
        cell(Contour, 100, Some(150), 7.492240, 623.0, 0.002),
        cell(Thm3p, 100, None, 7.521046, 18.0, 0.002),
        cell(Thm4, 100, None, 7.519672, 106.0, 0.002),
    ],
    [
        cell(Grid, 600, Some(600), 0.639184, 58.0, 0.014),
        cell(Contour, 100, Some(100), 0.650239, 361.0, 0.003),
        cell(Thm3p, 100, None, 0.649799, 44.0, 0.002),
        cell(Thm4, 100, None, 0.650996, 212.0, 0.004),
    ],
    [
        cell(Grid, 600, Some(600), 7.736527, 614.0, 0.008),
        cell(Contour, 100, Some(100), 7.906824, 354.0, 0.014),
        cell(Thm3p, 100, None, 7.904392, 44.0, 0.014),
        cell(Thm4, 100, None, 7.909134, 173.0, 0.014),
    ],
];

/// Ladder intervals of the lattice reference volume.
pub const REFERENCE_LADDER: usize = 400;

/// Volume between the levels `psi1` (the region anchor) and `psi2` by one
/// method at the published resolution.
#[allow(clippy::too_many_arguments)]
fn compute(
    field: &dyn FieldModel,
    crit: &CriticalSet,
    region: Region,
    psi1: f64,
    psi2: f64,
    p: &Published,
    bounds: ([f64; 2], [f64; 2]),
    base: &MethodOptions,
) -> Result<f64> {
    match p.method {
        Grid => {
            let g = GridSpec::from_bounds(bounds.0, bounds.1, [p.n1, p.n2.unwrap_or(p.n1)])?;
            let mask = crit.has_island().then_some(region);
            Ok(volume_grid(field, crit, psi1, psi2, &g, mask, base.tol)?.volume)
        }
        m => {
            let opts = MethodOptions {
                n_g: p.n2.unwrap_or(base.n_g),
                ..*base
            };
            let ladder = PsiLadder::new(field, crit, region, psi1, psi2, p.n1)?;
            Ok(volume_profile(field, crit, m, &ladder, &opts)?.total())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    table: TableId,
    row: usize,
    field: &dyn FieldModel,
    crit: &CriticalSet,
    region: Region,
    (psi1, psi2): (f64, f64),
    p: &Published,
    bounds: ([f64; 2], [f64; 2]),
    reference: f64,
    opts: &MethodOptions,
) -> TableCell {
    let t0 = Instant::now();
    let r = compute(field, crit, region, psi1, psi2, p, bounds, opts);
    let seconds = t0.elapsed().as_secs_f64();
    let (volume, error) = match r {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    TableCell {
        table,
        row,
        region,
        psi1,
        psi2,
        method: p.method,
        n1: p.n1,
        n2: p.n2,
        volume,
        reference,
        rel_err: volume.map(|v| (v - reference).abs() / reference),
        published_volume: p.volume,
        published_rel_err: p.rel_err,
        published_seconds: p.seconds,
        seconds,
        error,
    }
}

/// Axisymmetric field, volumes between the axis and the surface through
/// `(R1, 0)`, against `4π²Ψ`.
pub fn table1(opts: &MethodOptions) -> Vec<TableCell> {
    let field = Axisymmetric::default();
    let crit = CriticalSet::axis_only(&field);
    let mut out = Vec::new();
    for (row, (r1, cells)) in TABLE1.iter().enumerate() {
        let psi = 0.5 * (r1 - 1.0) * (r1 - 1.0);
        let exact = Axisymmetric::exact_volume(psi);
        for p in cells {
            out.push(run_cell(
                TableId::Table1,
                row + 1,
                &field,
                &crit,
                Region::Inner,
                (0.0, psi),
                p,
                ([0.1, 1.9], [-0.9, 0.9]),
                exact,
                opts,
            ));
        }
    }
    out
}

/// Region anchor and outer label of a helical interval: the critical level
/// for the region (axis, O-point or separatrix) and Ψ at `(ỹ2, 0)`.
pub fn interval_levels(field: &dyn FieldModel, crit: &CriticalSet, iv: &Interval) -> (f64, f64) {
    let anchor = match iv.region {
        Region::Inner => crit.psi_axis(),
        Region::Island => crit.psi_o().unwrap_or(iv.printed_psi1),
        Region::Outer => crit.psi_sep().unwrap_or(iv.printed_psi1),
    };
    (anchor, field.section_psi([iv.y2, 0.0]))
}

/// Reference volume of a helical interval: the lattice method on a
/// [`REFERENCE_LADDER`] ladder.
pub fn reference_volume(
    field: &dyn FieldModel,
    crit: &CriticalSet,
    iv: &Interval,
    opts: &MethodOptions,
) -> Result<f64> {
    let (a, b) = interval_levels(field, crit, iv);
    let ladder = PsiLadder::new(field, crit, iv.region, a, b, REFERENCE_LADDER)?;
    Ok(volume_profile(field, crit, Method::Thm3p, &ladder, opts)?.total())
}

/// Standard helical field, six intervals, four methods each, against the
/// fine lattice reference. Rows whose reference fails report NaN errors.
pub fn table2(opts: &MethodOptions) -> Result<Vec<TableCell>> {
    let field = Helical::standard();
    let crit = find_critical_points(&field, CriticalSearch::default())?;
    let mut out = Vec::new();
    for (row, (iv, cells)) in TABLE2_INTERVALS.iter().zip(&TABLE2).enumerate() {
        let levels = interval_levels(&field, &crit, iv);
        let reference = reference_volume(&field, &crit, iv, opts).unwrap_or(f64::NAN);
        let bounds = if iv.region == Region::Inner {
            INNER_BOX
        } else {
            WIDE_BOX
        };
        for p in cells {
            out.push(run_cell(
                TableId::Table2,
                row + 1,
                &field,
                &crit,
                iv.region,
                levels,
                p,
                bounds,
                reference,
                opts,
            ));
        }
    }
    Ok(out)
}

pub fn table(which: TableId, opts: &MethodOptions) -> Result<Vec<TableCell>> {
    match which {
        TableId::Table1 => Ok(table1(opts)),
        TableId::Table2 => table2(opts),
    }
}
