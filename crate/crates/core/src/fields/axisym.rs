use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Chart, FieldModel, Rhs, State};
use crate::error::{Error, Result};

/// Parameters of the axisymmetric tokamak field with unit major radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisymParams {
    /// Toroidal field strength.
    pub c: f64,
    /// Bound on the minor radius of the solid torus.
    pub r0: f64,
}

impl Default for AxisymParams {
    fn default() -> Self {
        AxisymParams { c: 1.0, r0: 0.9 }
    }
}

/// `B = (−z/R, C/R², (R−1)/R)` in `(R, φ, z)` with `Ψ = ((R−1)² + z²)/2`.
#[derive(Debug, Clone)]
pub struct Axisymmetric {
    params: AxisymParams,
}

impl Axisymmetric {
    pub fn new(params: AxisymParams) -> Result<Self> {
        if !(params.c > 0.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: format!("must be positive, got {}", params.c),
            });
        }
        if !(params.r0 > 0.0 && params.r0 < 1.0) {
            return Err(Error::InvalidParameter {
                name: "r0",
                reason: format!("must lie in (0, 1), got {}", params.r0),
            });
        }
        Ok(Axisymmetric { params })
    }

    pub fn params(&self) -> &AxisymParams {
        &self.params
    }

    /// Enclosed volume between the axis and the surface Ψ.
    pub fn exact_volume(psi: f64) -> f64 {
        4.0 * PI * PI * psi
    }
}

impl Default for Axisymmetric {
    fn default() -> Self {
        Axisymmetric::new(AxisymParams::default()).unwrap()
    }
}

impl FieldModel for Axisymmetric {
    fn chart(&self) -> Chart {
        Chart::Cylindrical
    }

    fn toroidal_index(&self) -> usize {
        1
    }

    fn b_contra(&self, x: &[f64; 3]) -> [f64; 3] {
        let (big_r, z) = (x[0], x[2]);
        [-z / big_r, self.params.c / (big_r * big_r), (big_r - 1.0) / big_r]
    }

    fn psi_label(&self, x: &[f64; 3]) -> f64 {
        let r = x[0] - 1.0;
        0.5 * (r * r + x[2] * x[2])
    }

    fn psi_gradient(&self, x: &[f64; 3]) -> [f64; 3] {
        [x[0] - 1.0, 0.0, x[2]]
    }

    fn a_cov(&self, x: &[f64; 3]) -> [f64; 3] {
        [0.0, self.psi_label(x), -self.params.c * x[0].ln()]
    }

    fn density(&self, _x: &[f64; 3]) -> f64 {
        1.0
    }

    fn u_contra(&self, _x: &[f64; 3]) -> [f64; 3] {
        [0.0, 1.0, 0.0]
    }

    fn u_flow(&self, x: &[f64; 3], s: f64) -> [f64; 3] {
        [x[0], x[1] + s, x[2]]
    }

    fn u_period(&self) -> f64 {
        2.0 * PI
    }

    fn sqrt_g(&self, x: &[f64; 3]) -> f64 {
        x[0]
    }

    fn normal_field(&self, x: &[f64; 3]) -> [f64; 3] {
        let g = self.psi_gradient(x);
        let norm2 = g[0] * g[0] + g[2] * g[2];
        [g[0] / norm2, 0.0, g[2] / norm2]
    }

    fn poloidal_angle_rate(&self, x: &[f64; 3], w: &[f64; 3]) -> f64 {
        let r = x[0] - 1.0;
        let z = x[2];
        let rho2 = r * r + z * z;
        if rho2 < 1e-28 {
            // on the axis the field lines rotate at rate 1/R; u does not move
            return if w[0] == 0.0 && w[2] == 0.0 { 0.0 } else { 1.0 / x[0] };
        }
        (r * w[2] - z * w[0]) / rho2
    }

    fn uline_phase(&self, state: &State, start: &State) -> f64 {
        state[3] - start[3]
    }

    fn uline_mismatch(&self, x: &[f64; 3], start: &[f64; 3]) -> f64 {
        (x[0] - start[0]).hypot(x[2] - start[2])
    }

    fn in_domain(&self, x: &[f64; 3]) -> bool {
        x[0] > 0.0 && x.iter().all(|v| v.is_finite())
    }

    fn section_to_chart(&self, p: [f64; 2]) -> [f64; 3] {
        [p[0], 0.0, p[1]]
    }

    fn chart_to_section(&self, x: &[f64; 3]) -> [f64; 2] {
        [x[0], x[2]]
    }

    fn section_flux_factor(&self, p: [f64; 2]) -> f64 {
        self.params.c / p[0]
    }

    fn section_psi_gradient(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0] - 1.0, p[1]]
    }

    fn magnetic_axis(&self) -> [f64; 2] {
        [1.0, 0.0]
    }

    fn section_domain_radius(&self) -> f64 {
        self.params.r0
    }

    fn reference_period(&self, rhs: Rhs) -> f64 {
        match rhs {
            Rhs::B | Rhs::V => 2.0 * PI,
            Rhs::U => self.u_period(),
        }
    }

    fn has_islands(&self) -> bool {
        false
    }
}
