//! Analytic integrable field models.
//!
//! Every model is evaluated in its own chart. Vector quantities are returned
//! as contravariant components in chart order, covectors (the potential and
//! the gradient of the flux label) as covariant components.

mod axisym;
mod helical;

pub use axisym::{AxisymParams, Axisymmetric};
pub use helical::{Helical, HelicalParams};

use serde::{Deserialize, Serialize};

/// Chart in which a model is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// `(R, φ, z)`
    Cylindrical,
    /// `(ψ, ϑ, φ)`
    AdaptedToroidal,
}

/// Which vector field a line is traced along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rhs {
    /// The magnetic field itself.
    B,
    /// The scaled field `B/ρ`.
    V,
    /// The symmetry field.
    U,
}

/// Traced state: the three chart coordinates plus an unwrapped poloidal
/// angle about the magnetic axis.
pub type State = [f64; 4];

pub trait FieldModel: Send + Sync + std::fmt::Debug {
    fn chart(&self) -> Chart;

    /// Position of φ among the chart coordinates.
    fn toroidal_index(&self) -> usize;

    fn b_contra(&self, x: &[f64; 3]) -> [f64; 3];

    fn psi_label(&self, x: &[f64; 3]) -> f64;

    /// Covariant components `∂Ψ/∂x^i`.
    fn psi_gradient(&self, x: &[f64; 3]) -> [f64; 3];

    fn a_cov(&self, x: &[f64; 3]) -> [f64; 3];

    /// Density preserved by the symmetry field.
    fn density(&self, x: &[f64; 3]) -> f64;

    fn u_contra(&self, x: &[f64; 3]) -> [f64; 3];

    /// Exact flow of the symmetry field for time `s`.
    fn u_flow(&self, x: &[f64; 3], s: f64) -> [f64; 3];

    /// Common period of all closed u-lines.
    fn u_period(&self) -> f64;

    fn sqrt_g(&self, x: &[f64; 3]) -> f64;

    /// `n = ∇Ψ/|∇Ψ|²` (contravariant) in the model's auxiliary metric, so
    /// that `dΨ(n) = 1`.
    fn normal_field(&self, x: &[f64; 3]) -> [f64; 3];

    /// Rate of change of the poloidal angle about the magnetic axis for a
    /// point moving with contravariant velocity `w`.
    fn poloidal_angle_rate(&self, x: &[f64; 3], w: &[f64; 3]) -> f64;

    /// Phase whose multiples of 2π mark candidate returns to the u-line
    /// through `start`.
    fn uline_phase(&self, state: &State, start: &State) -> f64;

    /// Transverse distance used to tell a true u-line return from a
    /// projection artefact.
    fn uline_mismatch(&self, x: &[f64; 3], start: &[f64; 3]) -> f64;

    fn in_domain(&self, x: &[f64; 3]) -> bool;

    /// Chart point of the section φ = 0 from section coordinates.
    fn section_to_chart(&self, p: [f64; 2]) -> [f64; 3];

    fn chart_to_section(&self, x: &[f64; 3]) -> [f64; 2];

    /// `|f|` in the restriction `β = f dx∧dy` of the flux form to the section.
    fn section_flux_factor(&self, p: [f64; 2]) -> f64;

    fn section_psi_gradient(&self, p: [f64; 2]) -> [f64; 2];

    /// Magnetic axis in section coordinates.
    fn magnetic_axis(&self) -> [f64; 2];

    /// Radius about the magnetic axis (section coordinates) beyond which the
    /// model is not used.
    fn section_domain_radius(&self) -> f64;

    /// Typical u-line return time near the axis, used for timeouts.
    fn reference_period(&self, rhs: Rhs) -> f64;

    /// Whether islands can exist (the model is not symmetric).
    fn has_islands(&self) -> bool;

    fn section_psi(&self, p: [f64; 2]) -> f64 {
        self.psi_label(&self.section_to_chart(p))
    }

    fn rhs(&self, which: Rhs, x: &[f64; 3]) -> [f64; 3] {
        match which {
            Rhs::B => self.b_contra(x),
            Rhs::V => {
                let b = self.b_contra(x);
                let rho = self.density(x);
                [b[0] / rho, b[1] / rho, b[2] / rho]
            }
            Rhs::U => self.u_contra(x),
        }
    }

    /// Right-hand side of the augmented state equation.
    fn state_rhs(&self, which: Rhs, y: &State) -> State {
        let x = [y[0], y[1], y[2]];
        let w = self.rhs(which, &x);
        [w[0], w[1], w[2], self.poloidal_angle_rate(&x, &w)]
    }
}

/// A field model chosen at run time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum AnyField {
    Axisym(AxisymParams),
    Helical(HelicalParams),
}

impl AnyField {
    pub fn build(&self) -> crate::Result<Box<dyn FieldModel>> {
        Ok(match self {
            AnyField::Axisym(p) => Box::new(Axisymmetric::new(p.clone())?),
            AnyField::Helical(p) => Box::new(Helical::new(p.clone())?),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            AnyField::Axisym(_) => "axisym",
            AnyField::Helical(_) => "helical",
        }
    }
}

/// Centered finite-difference partial derivative of a scalar on the chart.
pub fn fd_partial<F: Fn(&[f64; 3]) -> f64>(f: F, x: &[f64; 3], i: usize, h: f64) -> f64 {
    let mut xp = *x;
    let mut xm = *x;
    xp[i] += h;
    xm[i] -= h;
    (f(&xp) - f(&xm)) / (2.0 * h)
}

#[cfg(test)]
mod tests;
