use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Chart, FieldModel, Rhs, State};
use crate::coords;
use crate::error::{Error, Result};

/// Parameters of the circular tokamak field perturbed by one helical mode.
///
/// The potential is `A = (0, ψ, −[w1 ψ + w2 ψ² + ε ψ^{m/2} f(ψ) cos(mϑ − nφ + ζ)])`
/// in the adapted chart `(ψ, ϑ, φ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelicalParams {
    pub w1: f64,
    pub w2: f64,
    pub b0: f64,
    /// Major radius of the magnetic axis.
    pub big_r0: f64,
    pub m: u32,
    pub n: i32,
    pub eps: f64,
    pub zeta: f64,
    /// Coefficients of `f(ψ)`, lowest degree first.
    pub f: Vec<f64>,
}

impl HelicalParams {
    /// `w1 = 1/4, w2 = 1, B0 = 1, R0 = 2, ζ = 0, f(ψ) = ψ − R0²/B0`,
    /// resonance (m, n) = (2, 1) and ε = 0.007.
    pub fn standard() -> Self {
        HelicalParams {
            w1: 0.25,
            w2: 1.0,
            b0: 1.0,
            big_r0: 2.0,
            m: 2,
            n: 1,
            eps: 0.007,
            zeta: 0.0,
            f: vec![-4.0, 1.0],
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }
}

impl Default for HelicalParams {
    fn default() -> Self {
        HelicalParams::standard()
    }
}

#[derive(Debug, Clone)]
pub struct Helical {
    p: HelicalParams,
    half_m: f64,
}

/// Perturbation amplitude `P = ψ^{m/2} f(ψ)`, its ψ-derivative and the
/// helical phase `χ = mϑ − nφ + ζ`.
struct Mode {
    amp: f64,
    amp_prime: f64,
    chi: f64,
}

impl Helical {
    pub fn new(p: HelicalParams) -> Result<Self> {
        if p.m < 2 {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: format!("must be at least 2, got {}", p.m),
            });
        }
        if p.w2 == 0.0 {
            return Err(Error::InvalidParameter {
                name: "w2",
                reason: "must be nonzero".into(),
            });
        }
        if !(p.b0 > 0.0) || !(p.big_r0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "b0/R0",
                reason: "must be positive".into(),
            });
        }
        if p.f.is_empty() {
            return Err(Error::InvalidParameter {
                name: "f",
                reason: "needs at least one coefficient".into(),
            });
        }
        let half_m = p.m as f64 / 2.0;
        Ok(Helical { p, half_m })
    }

    pub fn standard() -> Self {
        Helical::new(HelicalParams::standard()).unwrap()
    }

    pub fn params(&self) -> &HelicalParams {
        &self.p
    }

    fn f_and_deriv(&self, psi: f64) -> (f64, f64) {
        let mut val = 0.0;
        let mut der = 0.0;
        for &c in self.p.f.iter().rev() {
            der = der * psi + val;
            val = val * psi + c;
        }
        (val, der)
    }

    fn pow_half_m(&self, psi: f64, shift: i32) -> f64 {
        let e = self.half_m + shift as f64;
        if e == 0.0 {
            1.0
        } else if self.p.m.is_multiple_of(2) {
            psi.powi(e as i32)
        } else {
            psi.max(0.0).powf(e)
        }
    }

    fn mode(&self, x: &[f64; 3]) -> Mode {
        let psi = x[0];
        let (f, fp) = self.f_and_deriv(psi);
        let amp = self.pow_half_m(psi, 0) * f;
        let amp_prime = self.pow_half_m(psi, -1) * (self.half_m * f + psi * fp);
        Mode {
            amp,
            amp_prime,
            chi: self.p.m as f64 * x[1] - self.p.n as f64 * x[2] + self.p.zeta,
        }
    }

    /// Cylindrical radius; NaN outside the chart domain.
    pub fn big_r(&self, psi: f64, vtheta: f64) -> f64 {
        coords::r_major_of_adapted(coords::PointTorAdapted::new(psi, vtheta, 0.0), self.p.b0, self.p.big_r0)
            .unwrap_or(f64::NAN)
    }

    /// `B0 R0 / R²`
    fn b_phi(&self, x: &[f64; 3]) -> f64 {
        let r = self.big_r(x[0], x[1]);
        self.p.b0 * self.p.big_r0 / (r * r)
    }

    /// Divergence of u with respect to the true volume,
    /// `−2n r sin ϑ / (R0 − r cos ϑ)`.
    pub fn u_divergence(&self, x: &[f64; 3]) -> f64 {
        let r = coords::r_of_psi(x[0], self.p.b0, self.p.big_r0).unwrap_or(f64::NAN);
        -2.0 * self.p.n as f64 * r * x[1].sin() / (self.p.big_r0 - r * x[1].cos())
    }

    /// Magnetic flux `∮ A♭` around the u-line through `x`, in closed form.
    pub fn phi_flux_closed_form(&self, x: &[f64; 3]) -> f64 {
        -2.0 * PI * self.psi_label(x)
    }
}

impl FieldModel for Helical {
    fn chart(&self) -> Chart {
        Chart::AdaptedToroidal
    }

    fn toroidal_index(&self) -> usize {
        2
    }

    fn b_contra(&self, x: &[f64; 3]) -> [f64; 3] {
        let k = self.b_phi(x);
        let md = self.mode(x);
        let p = &self.p;
        [
            k * p.m as f64 * p.eps * md.amp * md.chi.sin(),
            k * (p.w1 + 2.0 * p.w2 * x[0] + p.eps * md.amp_prime * md.chi.cos()),
            k,
        ]
    }

    fn psi_label(&self, x: &[f64; 3]) -> f64 {
        let p = &self.p;
        let md = self.mode(x);
        let a_phi = -(p.w1 * x[0] + p.w2 * x[0] * x[0] + p.eps * md.amp * md.chi.cos());
        -(p.n as f64) * x[0] - p.m as f64 * a_phi
    }

    fn psi_gradient(&self, x: &[f64; 3]) -> [f64; 3] {
        let p = &self.p;
        let md = self.mode(x);
        let (m, n) = (p.m as f64, p.n as f64);
        [
            -n + m * (p.w1 + 2.0 * p.w2 * x[0] + p.eps * md.amp_prime * md.chi.cos()),
            -m * m * p.eps * md.amp * md.chi.sin(),
            m * n * p.eps * md.amp * md.chi.sin(),
        ]
    }

    fn a_cov(&self, x: &[f64; 3]) -> [f64; 3] {
        let p = &self.p;
        let md = self.mode(x);
        [
            0.0,
            x[0],
            -(p.w1 * x[0] + p.w2 * x[0] * x[0] + p.eps * md.amp * md.chi.cos()),
        ]
    }

    fn density(&self, x: &[f64; 3]) -> f64 {
        self.b_phi(x)
    }

    fn u_contra(&self, _x: &[f64; 3]) -> [f64; 3] {
        [0.0, self.p.n as f64, self.p.m as f64]
    }

    fn u_flow(&self, x: &[f64; 3], s: f64) -> [f64; 3] {
        [x[0], x[1] + self.p.n as f64 * s, x[2] + self.p.m as f64 * s]
    }

    fn u_period(&self) -> f64 {
        let g = gcd(self.p.m as i64, self.p.n.unsigned_abs() as i64).max(1);
        2.0 * PI / g as f64
    }

    fn sqrt_g(&self, x: &[f64; 3]) -> f64 {
        1.0 / self.b_phi(x)
    }

    fn normal_field(&self, x: &[f64; 3]) -> [f64; 3] {
        let d = self.psi_gradient(x);
        let metric = coords::adapted_diagonal_metric(x[0], self.p.b0, self.p.big_r0);
        let up = [
            d[0] / metric.g_diag[0],
            d[1] / metric.g_diag[1],
            d[2] / metric.g_diag[2],
        ];
        let norm2 = up[0] * d[0] + up[1] * d[1] + up[2] * d[2];
        [up[0] / norm2, up[1] / norm2, up[2] / norm2]
    }

    fn poloidal_angle_rate(&self, _x: &[f64; 3], w: &[f64; 3]) -> f64 {
        w[1]
    }

    fn uline_phase(&self, state: &State, start: &State) -> f64 {
        self.p.m as f64 * (state[1] - start[1]) - self.p.n as f64 * (state[2] - start[2])
    }

    fn uline_mismatch(&self, x: &[f64; 3], start: &[f64; 3]) -> f64 {
        (x[0] - start[0]).abs()
    }

    fn in_domain(&self, x: &[f64; 3]) -> bool {
        x[0] >= 0.0 && x[0] < self.p.b0 * self.p.big_r0 * self.p.big_r0 && x.iter().all(|v| v.is_finite())
    }

    fn section_to_chart(&self, p: [f64; 2]) -> [f64; 3] {
        let (a, _) = coords::adapted_of_symplectic(coords::PointSymplectic { ytil: p[0], ztil: p[1] }, self.p.b0, 0.0);
        a.to_array()
    }

    fn chart_to_section(&self, x: &[f64; 3]) -> [f64; 2] {
        let s = coords::symplectic_of_adapted(coords::PointTorAdapted::from_array(*x), self.p.b0);
        [s.ytil, s.ztil]
    }

    fn section_flux_factor(&self, _p: [f64; 2]) -> f64 {
        self.p.b0.abs()
    }

    fn section_psi_gradient(&self, p: [f64; 2]) -> [f64; 2] {
        let rho2 = p[0] * p[0] + p[1] * p[1];
        if rho2 < 1e-300 {
            return [0.0, 0.0];
        }
        let x = self.section_to_chart(p);
        let d = self.psi_gradient(&x);
        let b0 = self.p.b0;
        [
            d[0] * b0 * p[0] - d[1] * p[1] / rho2,
            d[0] * b0 * p[1] + d[1] * p[0] / rho2,
        ]
    }

    fn magnetic_axis(&self) -> [f64; 2] {
        [0.0, 0.0]
    }

    fn section_domain_radius(&self) -> f64 {
        self.p.big_r0 * 1.9f64.sqrt()
    }

    fn reference_period(&self, rhs: Rhs) -> f64 {
        let rate = (self.p.m as f64 * self.p.w1 - self.p.n as f64).abs();
        let v_period = if rate > 1e-3 { 2.0 * PI / rate } else { 2.0 * PI };
        match rhs {
            Rhs::V => v_period,
            Rhs::B => v_period * self.p.big_r0 / self.p.b0,
            Rhs::U => self.u_period(),
        }
    }

    fn has_islands(&self) -> bool {
        self.p.eps != 0.0
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}
