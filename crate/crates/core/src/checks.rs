//! Seeded invariant suite behind the `check` subcommand.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coords::{self, PointCyl, PointTorAdapted};
use crate::error::Result;
use crate::fields::{fd_partial, Axisymmetric, FieldModel, Helical, Rhs};
use crate::ode::Tolerances;
use crate::surfaces::{
    find_critical_points, harmonic_average_rho, lattice_generators, seed_point, CriticalSearch, CriticalSet, Region,
};
use crate::tracer::{return_to_uline, section_returns, Section, TraceSpec, UlineSearch};
use crate::volume::{phi_flux, volume_grid, GridSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Worst observed value of the checked quantity.
    pub value: f64,
    pub bound: f64,
    /// `value <= bound`, or `value >= bound` for lower bounds.
    pub lower_bound: bool,
    pub pass: bool,
}

impl CheckResult {
    fn upper(name: &str, value: f64, bound: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            value,
            bound,
            lower_bound: false,
            pass: value <= bound,
        }
    }

    fn lower(name: &str, value: f64, bound: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            value,
            bound,
            lower_bound: true,
            pass: value >= bound,
        }
    }

    fn failed(name: &str, bound: f64, lower_bound: bool, err: &crate::Error) -> Self {
        CheckResult {
            name: format!("{name} ({err})"),
            value: f64::NAN,
            bound,
            lower_bound,
            pass: false,
        }
    }
}

pub const CHECK_NAMES: [&str; 8] = [
    "psi_conservation",
    "div_b",
    "u_commutator",
    "uline_start_invariance",
    "chart_round_trip",
    "grid_convergence",
    "rho_hat_q6_q7",
    "phi_identity",
];

/// Runs every check with points drawn from `seed`.
pub fn run_checks(seed: u64) -> Vec<CheckResult> {
    let hel = Helical::standard();
    let ax = Axisymmetric::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut push = |name: &str, bound: f64, lower: bool, r: Result<f64>| {
        out.push(match r {
            Ok(v) if lower => CheckResult::lower(name, v, bound),
            Ok(v) => CheckResult::upper(name, v, bound),
            Err(e) => CheckResult::failed(name, bound, lower, &e),
        })
    };
    let hp = helical_points(&mut rng, 200);
    let ap = axisym_points(&mut rng, 200);
    push(CHECK_NAMES[0], 1e-7, false, psi_conservation(&hel, &ax, &mut rng));
    push(
        CHECK_NAMES[1],
        1e-6,
        false,
        Ok(divergence_check(&hel, &hp).max(divergence_check(&ax, &ap))),
    );
    push(
        CHECK_NAMES[2],
        1e-6,
        false,
        Ok(commutator_check(&hel, &hp).max(commutator_check(&ax, &ap))),
    );
    push(CHECK_NAMES[3], 1e-6, false, uline_start_invariance(&hel, &mut rng));
    push(CHECK_NAMES[4], 1e-12, false, Ok(chart_round_trip(&hel, &mut rng)));
    push(CHECK_NAMES[5], 0.6, true, grid_convergence(&ax, &mut rng));
    push(CHECK_NAMES[6], 1e-3, false, rho_hat_convergence(&hel, &mut rng));
    push(CHECK_NAMES[7], 1e-8, false, Ok(phi_identity(&hel, &hp[..20])));
    out
}

fn helical_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 3]> {
    (0..n)
        .map(|_| {
            [
                rng.gen_range(0.005..0.5),
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
            ]
        })
        .collect()
}

fn axisym_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 3]> {
    (0..n)
        .map(|_| {
            let rho = rng.gen_range(0.01..0.85);
            let t = rng.gen_range(-PI..PI);
            [1.0 + rho * t.cos(), rng.gen_range(-PI..PI), rho * t.sin()]
        })
        .collect()
}

fn norm(v: &[f64; 3]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Largest relative label drift over ten toroidal transits along B.
pub fn psi_conservation(hel: &Helical, ax: &Axisymmetric, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    let starts: Vec<(&dyn FieldModel, [f64; 2])> = (0..6)
        .map(|k| -> (&dyn FieldModel, [f64; 2]) {
            if k % 2 == 0 {
                (hel, [rng.gen_range(0.1..0.8), rng.gen_range(-0.5..0.5)])
            } else {
                (ax, [1.0 + rng.gen_range(0.05..0.7), rng.gen_range(-0.3..0.3)])
            }
        })
        .collect();
    for (f, p) in starts {
        let x0 = f.section_to_chart(p);
        let psi0 = f.psi_label(&x0);
        let spec = TraceSpec::new(f, Rhs::B, x0);
        let (_, traj) = section_returns(&spec, Section::ToroidalPlane, 10)?;
        let scale = psi0.abs().max(1e-3);
        for (_, y) in traj.nodes() {
            worst = worst.max((f.psi_label(&[y[0], y[1], y[2]]) - psi0).abs() / scale);
        }
    }
    Ok(worst)
}

/// Largest `|div B|`, relative to `max(|B|, 1)`, by centred differences.
pub fn divergence_check(field: &dyn FieldModel, points: &[[f64; 3]]) -> f64 {
    let h = 1e-5;
    points
        .iter()
        .map(|x| {
            let d = (0..3)
                .map(|i| fd_partial(|y| field.sqrt_g(y) * field.b_contra(y)[i], x, i, h))
                .sum::<f64>()
                / field.sqrt_g(x);
            d.abs() / norm(&field.b_contra(x)).max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Largest component of the Lie bracket `[u, B/ρ]` by centred differences.
pub fn commutator_check(field: &dyn FieldModel, points: &[[f64; 3]]) -> f64 {
    let h = 1e-5;
    let mut worst = 0.0f64;
    for x in points {
        let u = field.u_contra(x);
        let v = field.rhs(Rhs::V, x);
        for k in 0..3 {
            let u_dv: f64 = (0..3)
                .map(|i| u[i] * fd_partial(|y| field.rhs(Rhs::V, y)[k], x, i, h))
                .sum();
            let v_du: f64 = (0..3)
                .map(|i| v[i] * fd_partial(|y| field.u_contra(y)[k], x, i, h))
                .sum();
            worst = worst.max((u_dv - v_du).abs());
        }
    }
    worst
}

/// Largest relative change of the u-line return time when the start point
/// slides along its u-line.
pub fn uline_start_invariance(f: &Helical, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let x0 = f.section_to_chart([rng.gen_range(0.15..0.75), rng.gen_range(-0.1..0.1)]);
        let t0 = return_to_uline(&TraceSpec::new(f, Rhs::V, x0), 1, UlineSearch::default())?.t;
        for _ in 0..3 {
            let x1 = f.u_flow(&x0, rng.gen_range(0.0..f.u_period()));
            let t1 = return_to_uline(&TraceSpec::new(f, Rhs::V, x1), 1, UlineSearch::default())?.t;
            worst = worst.max((t1 - t0).abs() / t0);
        }
    }
    Ok(worst)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest round-trip error over the chart maps: section ↔ helical chart,
/// adapted ↔ cylindrical, adapted ↔ symplectic, cylindrical ↔ Cartesian.
pub fn chart_round_trip(hel: &Helical, rng: &mut ChaCha8Rng) -> f64 {
    let b0 = hel.params().b0;
    let r0 = hel.params().big_r0;
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let p = [rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)];
        worst = worst.max(dist(&hel.chart_to_section(&hel.section_to_chart(p)), &p));

        let a = PointTorAdapted::new(
            rng.gen_range(0.01..0.9) * b0 * r0 * r0,
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        if let Ok(back) = coords::cyl_of_adapted(a, b0, r0).and_then(|c| coords::adapted_of_cyl(c, b0, r0)) {
            worst = worst.max(dist(&back.to_array(), &a.to_array()) / a.psi.max(1.0));
        }
        let s = coords::symplectic_of_adapted(a, b0);
        let (back, _) = coords::adapted_of_symplectic(s, b0, a.phi);
        worst = worst.max(dist(&back.to_array(), &a.to_array()));
        let s2 = coords::symplectic_of_adapted(back, b0);
        worst = worst.max(dist(&[s2.ytil, s2.ztil], &[s.ytil, s.ztil]));

        let c = PointCyl {
            r_major: rng.gen_range(0.2..2.0),
            phi: rng.gen_range(-3.0..3.0),
            z: rng.gen_range(-1.0..1.0),
        };
        let c2 = coords::cyl_of_cartesian(coords::cartesian_of_cyl(c));
        worst = worst.max(dist(&[c2.r_major, c2.phi, c2.z], &[c.r_major, c.phi, c.z]));
    }
    worst
}

/// Exponent `k` of a least-squares fit `err ∝ (N₁N₂)^(−k)` for the
/// axisymmetric grid volume of `Ψ < 0.08`. The error of one grid depends
/// strongly on how the lattice sits against the surface, so each size is
/// averaged over 32 random offsets; with 8 the fitted exponent scatters
/// between 0.5 and 1.0 from seed to seed.
pub fn grid_convergence(ax: &Axisymmetric, rng: &mut ChaCha8Rng) -> Result<f64> {
    let crit = CriticalSet::axis_only(ax);
    let exact = Axisymmetric::exact_volume(0.08);
    let ns = [20usize, 40, 80, 160];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &n in &ns {
        let h = 1.0 / n as f64;
        let seeds = 32;
        let mut s = 0.0;
        for _ in 0..seeds {
            let centre = [1.0 + rng.gen_range(-h..h), rng.gen_range(-h..h)];
            let g = GridSpec::new(centre, [0.5, 0.5], [n, n])?;
            let v = volume_grid(ax, &crit, 0.0, 0.08, &g, None, Tolerances::default())?;
            s += (v.volume - exact).abs() / exact;
        }
        xs.push(((n * n) as f64).ln());
        ys.push((s / seeds as f64).ln());
    }
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    Ok(-slope)
}

/// Largest `|⟨1/ρ⟩₆ − ⟨1/ρ⟩₇| / ⟨1/ρ⟩₇` over ten random surfaces per region.
pub fn rho_hat_convergence(hel: &Helical, rng: &mut ChaCha8Rng) -> Result<f64> {
    let crit = find_critical_points(hel, CriticalSearch::default())?;
    rho_hat_convergence_on(hel, &crit, rng, 10)
}

pub fn rho_hat_convergence_on(
    hel: &Helical,
    crit: &CriticalSet,
    rng: &mut ChaCha8Rng,
    per_region: usize,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for region in Region::ALL {
        let (a, b) = match region {
            Region::Inner => (-0.0240, -0.0010),
            Region::Island => (-0.0380, -0.0255),
            Region::Outer => (-0.0240, 0.0150),
        };
        for _ in 0..per_region {
            let psi = rng.gen_range(a..b);
            let x0 = seed_point(hel, crit, psi, region)?;
            let g = lattice_generators(&TraceSpec::new(hel, Rhs::V, x0), UlineSearch::default(), 1)?;
            let a6 = 1.0 / harmonic_average_rho(hel, &g, 6)?;
            let a7 = 1.0 / harmonic_average_rho(hel, &g, 7)?;
            worst = worst.max((a6 - a7).abs() / a7);
        }
    }
    Ok(worst)
}

/// Largest relative difference between the quadratured flux through the
/// u-line at each point and `−2πΨ`.
pub fn phi_identity(hel: &Helical, points: &[[f64; 3]]) -> f64 {
    points
        .iter()
        .map(|x| {
            let q = phi_flux(hel, x, 64);
            let c = -2.0 * PI * hel.psi_label(x);
            (q - c).abs() / c.abs().max(1e-12)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_is_deterministic() {
        let a = run_checks(7);
        assert_eq!(a.len(), CHECK_NAMES.len());
        for r in &a {
            assert!(r.pass, "{r:?}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = chart_round_trip(&Helical::standard(), &mut rng);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(b, chart_round_trip(&Helical::standard(), &mut rng));
    }
}
