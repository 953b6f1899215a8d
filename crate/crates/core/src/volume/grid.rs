use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldModel, Rhs};
use crate::ode::Tolerances;
use crate::surfaces::{classify, CriticalSet, Region};
use crate::tracer::{return_to_section, Section, TraceSpec};

/// Where the nodes sit inside the rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeLayout {
    /// One node at the centre of each of the `N1 × N2` cells.
    #[default]
    Centred,
    /// Nodes on both edges, spacing `2L/(N − 1)`, but still weighted by the
    /// cell area `4L1L2/(N1N2)`. Biased low by `O(1/N)`.
    Inclusive,
}

/// A regular `N1 × N2` grid on the rectangle `[x0 ± L1] × [y0 ± L2]` of the
/// section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: [f64; 2],
    pub half: [f64; 2],
    pub counts: [usize; 2],
    #[serde(default)]
    pub layout: NodeLayout,
}

impl GridSpec {
    pub fn new(center: [f64; 2], half: [f64; 2], counts: [usize; 2]) -> Result<Self> {
        let g = GridSpec {
            center,
            half,
            counts,
            layout: NodeLayout::Centred,
        };
        g.validate()?;
        Ok(g)
    }

    /// Grid over `[x_lo, x_hi] × [y_lo, y_hi]`.
    pub fn from_bounds(x: [f64; 2], y: [f64; 2], counts: [usize; 2]) -> Result<Self> {
        GridSpec::new(
            [0.5 * (x[0] + x[1]), 0.5 * (y[0] + y[1])],
            [0.5 * (x[1] - x[0]), 0.5 * (y[1] - y[0])],
            counts,
        )
    }

    pub fn with_layout(mut self, layout: NodeLayout) -> Self {
        self.layout = layout;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.counts.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter {
                name: "grid counts",
                reason: format!("need N1, N2 >= 2, got {:?}", self.counts),
            });
        }
        if !self.half.iter().all(|&l| l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "grid half-extents",
                reason: format!("need L1, L2 > 0, got {:?}", self.half),
            });
        }
        if !self.center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "grid center",
                reason: format!("{:?}", self.center),
            });
        }
        Ok(())
    }

    pub fn cell_area(&self) -> f64 {
        4.0 * self.half[0] * self.half[1] / (self.counts[0] * self.counts[1]) as f64
    }

    fn coord(&self, axis: usize, i: usize) -> f64 {
        let (c, l, n) = (self.center[axis], self.half[axis], self.counts[axis] as f64);
        match self.layout {
            NodeLayout::Centred => c - l + (i as f64 + 0.5) * 2.0 * l / n,
            NodeLayout::Inclusive => c - l + i as f64 * 2.0 * l / (n - 1.0),
        }
    }

    /// Nodes in row-major order (second coordinate fastest).
    pub fn nodes(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.counts[0]).flat_map(move |i| (0..self.counts[1]).map(move |j| [self.coord(0, i), self.coord(1, j)]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridVolume {
    pub volume: f64,
    /// Nodes that passed the Ψ and region test.
    pub members: usize,
    /// Empty membership set; the volume is reported as 0.
    pub empty: bool,
}

/// Time along B for one full toroidal circuit from the section point `p`.
pub fn transit_time(field: &dyn FieldModel, p: [f64; 2], tol: Tolerances) -> Result<f64> {
    let x = field.section_to_chart(p);
    let spec = TraceSpec::new(field, Rhs::B, x).with_tol(tol);
    Ok(return_to_section(&spec, Section::ToroidalPlane, 1)?[0].t)
}

/// Volume between the levels `psi0` and `psi1` by summing `𝖳·|f|` over the
/// grid nodes with Ψ strictly between them, optionally restricted to one
/// region.
pub fn volume_grid(
    field: &dyn FieldModel,
    crit: &CriticalSet,
    psi0: f64,
    psi1: f64,
    grid: &GridSpec,
    region: Option<Region>,
    tol: Tolerances,
) -> Result<GridVolume> {
    grid.validate()?;
    let (lo, hi) = if psi0 <= psi1 { (psi0, psi1) } else { (psi1, psi0) };
    let nodes: Vec<[f64; 2]> = grid.nodes().collect();
    let terms: Vec<Option<f64>> = nodes
        .par_iter()
        .map(|&p| {
            let x = field.section_to_chart(p);
            if !field.in_domain(&x) {
                return Ok(None);
            }
            let psi = field.psi_label(&x);
            if !(psi > lo && psi < hi) {
                return Ok(None);
            }
            if let Some(r) = region {
                if classify(field, crit, p).region != r {
                    return Ok(None);
                }
            }
            let t = transit_time(field, p, tol)?;
            Ok(Some(t * field.section_flux_factor(p).abs()))
        })
        .collect::<Result<_>>()?;
    let mut sum = 0.0;
    let mut members = 0;
    for t in terms.into_iter().flatten() {
        sum += t;
        members += 1;
    }
    Ok(GridVolume {
        volume: sum * grid.cell_area(),
        members,
        empty: members == 0,
    })
}
