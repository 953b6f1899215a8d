//! Coordinate charts used by the two field models.
//!
//! Cartesian `(x, y, z)` with `x = R sin φ`, `y = R cos φ`; cylindrical
//! `(R, φ, z)`; standard toroidal `(r, θ, φ)` about a circular axis of radius
//! `R0`; adapted toroidal `(ψ, ϑ, φ)` where ψ is the toroidal flux through the
//! disk of radius `r`; and symplectic section coordinates `(ỹ, z̃)` whose area
//! element equals toroidal flux.
//!
//! Angles are never reduced here unless a conversion needs it; tracing keeps
//! them unwrapped.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointCyl {
    pub r_major: f64,
    pub phi: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointTorAdapted {
    pub psi: f64,
    pub vtheta: f64,
    pub phi: f64,
}

impl PointTorAdapted {
    pub fn new(psi: f64, vtheta: f64, phi: f64) -> Self {
        PointTorAdapted { psi, vtheta, phi }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.psi, self.vtheta, self.phi]
    }

    pub fn from_array(x: [f64; 3]) -> Self {
        PointTorAdapted::new(x[0], x[1], x[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSymplectic {
    pub ytil: f64,
    pub ztil: f64,
}

/// Volume factor and diagonal metric components of a chart at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricInfo {
    pub sqrt_g: f64,
    pub g_diag: [f64; 3],
}

impl MetricInfo {
    pub fn diagonal(g_diag: [f64; 3]) -> Self {
        MetricInfo {
            sqrt_g: (g_diag[0] * g_diag[1] * g_diag[2]).abs().sqrt(),
            g_diag,
        }
    }
}

/// Reduce an angle to `(-π, π]`, returning the reduced angle and the number
/// of full turns removed.
pub fn reduce_angle(a: f64) -> (f64, f64) {
    let turns = ((a + PI) / (2.0 * PI)).ceil() - 1.0;
    let mut red = a - 2.0 * PI * turns;
    if red <= -PI {
        red += 2.0 * PI;
    }
    (red, turns)
}

pub fn psi_of_r(r: f64, b0: f64, r0: f64) -> Result<f64> {
    if !(0.0..r0).contains(&r) {
        return Err(Error::Domain { what: "r", value: r });
    }
    let s = r / r0;
    // 1 - sqrt(1 - s^2) written without cancellation
    Ok(b0 * r0 * r0 * s * s / (1.0 + (1.0 - s * s).sqrt()))
}

pub fn r_of_psi(psi: f64, b0: f64, r0: f64) -> Result<f64> {
    let psi_max = b0 * r0 * r0;
    if !(0.0..psi_max).contains(&psi) {
        return Err(Error::Domain {
            what: "psi",
            value: psi,
        });
    }
    let q = psi / psi_max;
    // 1 - (1 - q)^2 = q (2 - q)
    Ok(r0 * (q * (2.0 - q)).sqrt())
}

fn vtheta_ratio(r: f64, r0: f64) -> Result<f64> {
    if !(0.0..r0).contains(&r) {
        return Err(Error::Domain { what: "r", value: r });
    }
    Ok(((r0 - r) / (r0 + r)).sqrt())
}

/// Map the geometric poloidal angle θ to the adapted angle ϑ.
///
/// Works on unwrapped angles: the number of full turns in `theta` is carried
/// over to the result unchanged.
pub fn vtheta_of_theta(theta: f64, r: f64, r0: f64) -> Result<f64> {
    let k = vtheta_ratio(r, r0)?;
    let (red, turns) = reduce_angle(theta);
    let half = 0.5 * red;
    Ok(2.0 * (k * half.sin()).atan2(half.cos()) + 2.0 * PI * turns)
}

pub fn theta_of_vtheta(vtheta: f64, r: f64, r0: f64) -> Result<f64> {
    let k = vtheta_ratio(r, r0)?;
    let (red, turns) = reduce_angle(vtheta);
    let half = 0.5 * red;
    Ok(2.0 * half.sin().atan2(k * half.cos()) + 2.0 * PI * turns)
}

/// Cylindrical radius of an adapted point, `R = (R0² − r²)/(R0 − r cos ϑ)`.
pub fn r_major_of_adapted(p: PointTorAdapted, b0: f64, r0: f64) -> Result<f64> {
    let r = r_of_psi(p.psi, b0, r0)?;
    Ok((r0 * r0 - r * r) / (r0 - r * p.vtheta.cos()))
}

pub fn symplectic_of_adapted(p: PointTorAdapted, b0: f64) -> PointSymplectic {
    let rho = (2.0 * p.psi.max(0.0) / b0).sqrt();
    PointSymplectic {
        ytil: rho * p.vtheta.cos(),
        ztil: rho * p.vtheta.sin(),
    }
}

/// Inverse of [`symplectic_of_adapted`] on the section φ = `phi`.
///
/// The boolean is `false` at the origin, where ϑ is undefined (returned as 0).
pub fn adapted_of_symplectic(s: PointSymplectic, b0: f64, phi: f64) -> (PointTorAdapted, bool) {
    let rho2 = s.ytil * s.ytil + s.ztil * s.ztil;
    let psi = 0.5 * b0 * rho2;
    if rho2 == 0.0 {
        return (PointTorAdapted::new(0.0, 0.0, phi), false);
    }
    (PointTorAdapted::new(psi, s.ztil.atan2(s.ytil), phi), true)
}

/// Standard toroidal `(r, θ, φ)` to adapted `(ψ, ϑ, φ)`.
pub fn adapted_of_toroidal(r: f64, theta: f64, phi: f64, b0: f64, r0: f64) -> Result<PointTorAdapted> {
    Ok(PointTorAdapted::new(
        psi_of_r(r, b0, r0)?,
        vtheta_of_theta(theta, r, r0)?,
        phi,
    ))
}

/// Adapted to standard toroidal, returned as `(r, θ, φ)`.
pub fn toroidal_of_adapted(p: PointTorAdapted, b0: f64, r0: f64) -> Result<(f64, f64, f64)> {
    let r = r_of_psi(p.psi, b0, r0)?;
    Ok((r, theta_of_vtheta(p.vtheta, r, r0)?, p.phi))
}

pub fn cyl_of_toroidal(r: f64, theta: f64, phi: f64, r0: f64) -> PointCyl {
    PointCyl {
        r_major: r0 + r * theta.cos(),
        phi,
        z: r * theta.sin(),
    }
}

pub fn toroidal_of_cyl(p: PointCyl, r0: f64) -> (f64, f64, f64) {
    let dr = p.r_major - r0;
    ((dr * dr + p.z * p.z).sqrt(), p.z.atan2(dr), p.phi)
}

pub fn cyl_of_adapted(p: PointTorAdapted, b0: f64, r0: f64) -> Result<PointCyl> {
    let (r, theta, phi) = toroidal_of_adapted(p, b0, r0)?;
    Ok(cyl_of_toroidal(r, theta, phi, r0))
}

pub fn adapted_of_cyl(p: PointCyl, b0: f64, r0: f64) -> Result<PointTorAdapted> {
    let (r, theta, phi) = toroidal_of_cyl(p, r0);
    adapted_of_toroidal(r, theta, phi, b0, r0)
}

/// Cartesian coordinates, using `x = R sin φ, y = R cos φ`.
pub fn cartesian_of_cyl(p: PointCyl) -> [f64; 3] {
    [p.r_major * p.phi.sin(), p.r_major * p.phi.cos(), p.z]
}

pub fn cyl_of_cartesian(x: [f64; 3]) -> PointCyl {
    PointCyl {
        r_major: x[0].hypot(x[1]),
        phi: x[0].atan2(x[1]),
        z: x[2],
    }
}

/// Metric of the standard toroidal chart, `diag(1, r², R²)`.
pub fn toroidal_metric(r: f64, theta: f64, r0: f64) -> MetricInfo {
    let big_r = r0 + r * theta.cos();
    MetricInfo::diagonal([1.0, r * r, big_r * big_r])
}

/// Metric of the cylindrical chart `(R, φ, z)`, `diag(1, R², 1)`.
pub fn cylindrical_metric(r_major: f64) -> MetricInfo {
    MetricInfo::diagonal([1.0, r_major * r_major, 1.0])
}

/// The diagonal stand-in metric on the adapted chart used to build
/// `n = ∇Ψ/|∇Ψ|²`: `ds² = dψ²/(2B0ψ) + (2ψ/B0) dϑ² + R0² dφ²`.
pub fn adapted_diagonal_metric(psi: f64, b0: f64, r0: f64) -> MetricInfo {
    MetricInfo::diagonal([1.0 / (2.0 * b0 * psi), 2.0 * psi / b0, r0 * r0])
}

/// True volume factor of the adapted chart, `√|g| = R²/(B0 R0)`.
pub fn adapted_volume_factor(p: PointTorAdapted, b0: f64, r0: f64) -> Result<f64> {
    let big_r = r_major_of_adapted(p, b0, r0)?;
    Ok(big_r * big_r / (b0 * r0))
}
