use std::collections::VecDeque;
use std::f64::consts::TAU;

use super::*;
use crate::fields::{Axisymmetric, Helical, HelicalParams, Rhs};
use crate::tracer::{TraceSpec, UlineSearch};

fn standard() -> (Helical, CriticalSet) {
    let f = Helical::standard();
    let c = find_critical_points(&f, CriticalSearch::default()).unwrap();
    (f, c)
}

fn shoelace(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        * 0.5
}

fn inv_rho_hat(f: &Helical, x0: [f64; 3], q: usize) -> f64 {
    let spec = TraceSpec::new(f, Rhs::V, x0);
    let g = lattice_generators(&spec, UlineSearch::default(), 1).unwrap();
    1.0 / harmonic_average_rho(f, &g, q).unwrap()
}

#[test]
fn unperturbed_field_has_only_the_axis() {
    let f = Helical::new(HelicalParams::standard().with_eps(0.0)).unwrap();
    let c = find_critical_points(&f, CriticalSearch::default()).unwrap();
    assert!(c.axis.p[0].abs() < 1e-12 && c.axis.p[1].abs() < 1e-12);
    assert!(c.axis.psi.abs() < 1e-15);
    assert!(c.o_points.is_empty() && c.x_points.is_empty());
    assert!(!c.has_island());
}

#[test]
fn island_critical_points() {
    let (f, c) = standard();
    assert_eq!(c.o_points.len(), 2);
    assert_eq!(c.x_points.len(), 2);
    let o = c.o_points[0];
    assert!((o.p[0] - 0.52542).abs() < 5e-5 && o.p[1].abs() < 1e-10, "{:?}", o.p);
    assert!((c.psi_o().unwrap() - -0.0384).abs() < 5e-4);
    assert!((c.psi_sep().unwrap() - -0.0248).abs() < 5e-4);
    assert!(c.psi_o().unwrap() < c.psi_sep().unwrap() && c.psi_sep().unwrap() < c.psi_axis());
    // X-points sit on the z̃ axis, O-points on the ỹ axis
    for x in &c.x_points {
        assert!(x.p[0].abs() < 1e-10);
    }
    // outer crossing of the separatrix on the ỹ axis
    let (p, _) = ray_root(
        &f,
        &c,
        &RayFrame::about([0.0, 0.0]),
        0.0,
        c.psi_sep().unwrap() + 1e-12,
        Region::Outer,
    )
    .unwrap();
    assert!((p[0] - 0.66345).abs() < 5e-5, "{p:?}");
}

#[test]
fn classification_examples() {
    let (f, c) = standard();
    assert_eq!(classify(&f, &c, [0.150, 0.0]).region, Region::Inner);
    assert_eq!(classify(&f, &c, [0.570, 0.211]).region, Region::Island);
    assert_eq!(classify(&f, &c, [0.7, 0.0]).region, Region::Outer);
    assert_eq!(classify(&f, &c, [0.0, 0.2]).region, Region::Inner);
    assert_eq!(classify(&f, &c, [0.0, 0.6]).region, Region::Outer);
    let x = c.x_points[0].p;
    assert!(classify(&f, &c, x).boundary);
    let axis = Axisymmetric::default();
    let ca = CriticalSet::axis_only(&axis);
    assert_eq!(classify(&axis, &ca, [1.3, 0.2]).region, Region::Inner);
}

#[test]
fn region_parsing() {
    assert_eq!("Island".parse::<Region>().unwrap(), Region::Island);
    assert_eq!("out".parse::<Region>().unwrap(), Region::Outer);
    assert!("middle".parse::<Region>().is_err());
}

#[test]
fn axisymmetric_contours_are_circles() {
    let f = Axisymmetric::default();
    let c = CriticalSet::axis_only(&f);
    let k = extract_contour(&f, &c, 0.02, Region::Inner, 64).unwrap();
    assert_eq!(k.components(), 1);
    assert!(!k.multiple_roots);
    for p in k.nodes() {
        let r2 = (p[0] - 1.0).powi(2) + p[1].powi(2);
        assert!((r2 - 0.04).abs() < 1e-12);
    }
    assert!(matches!(
        extract_contour(&f, &c, 0.5, Region::Inner, 16),
        Err(crate::Error::OutsideRegion { .. })
    ));
}

#[test]
fn unperturbed_helical_contours_are_circles() {
    let f = Helical::new(HelicalParams::standard().with_eps(0.0)).unwrap();
    let c = find_critical_points(&f, CriticalSearch::default()).unwrap();
    let psi0 = f.section_psi([0.3, 0.0]);
    let k = extract_contour(&f, &c, psi0, Region::Inner, 50).unwrap();
    for p in k.nodes() {
        assert!((p[0].hypot(p[1]) - 0.3).abs() < 1e-12);
    }
}

#[test]
fn contour_nodes_lie_on_the_level_set() {
    let (f, c) = standard();
    for &(psi0, region) in &[
        (-0.01031, Region::Inner),
        (-0.0316, Region::Island),
        (-0.01533, Region::Outer),
        (0.0172, Region::Outer),
        (-0.0247, Region::Inner),
        (-0.0249, Region::Island),
    ] {
        let k = extract_contour(&f, &c, psi0, region, 100).unwrap();
        for p in k.nodes() {
            let err = (f.section_psi(*p) - psi0).abs() / psi0.abs();
            assert!(err < 1e-10, "{region} {psi0}: {err}");
            assert_eq!(classify(&f, &c, *p).region, region);
        }
        assert!(!k.multiple_roots, "{region} {psi0}");
        for l in &k.loops {
            assert!(shoelace(l) > 0.0);
        }
    }
}

/// Connected components of `{Ψ < psi0}` on a dense pixel grid, with the
/// pixel area of each; a test-only contouring oracle.
fn pixel_components(f: &Helical, psi0: f64, half: f64, n: usize) -> Vec<(f64, [f64; 2])> {
    let h = 2.0 * half / n as f64;
    let inside: Vec<bool> = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            let p = [-half + (i as f64 + 0.5) * h, -half + (j as f64 + 0.5) * h];
            f.section_psi(p) < psi0
        })
        .collect();
    let mut label = vec![usize::MAX; n * n];
    let mut comps = Vec::new();
    for start in 0..n * n {
        if !inside[start] || label[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut count = 0usize;
        let mut sum = [0.0, 0.0];
        let mut queue = VecDeque::from([start]);
        label[start] = id;
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k % n, k / n);
            count += 1;
            sum[0] += -half + (i as f64 + 0.5) * h;
            sum[1] += -half + (j as f64 + 0.5) * h;
            let nbrs = [
                (i > 0).then(|| k - 1),
                (i + 1 < n).then(|| k + 1),
                (j > 0).then(|| k - n),
                (j + 1 < n).then(|| k + n),
            ];
            for m in nbrs.into_iter().flatten() {
                if inside[m] && label[m] == usize::MAX {
                    label[m] = id;
                    queue.push_back(m);
                }
            }
        }
        comps.push((count as f64 * h * h, [sum[0] / count as f64, sum[1] / count as f64]));
    }
    comps
}

#[test]
fn island_contour_matches_dense_grid_oracle() {
    let (f, c) = standard();
    let psi0 = -0.0316;
    let k = extract_contour(&f, &c, psi0, Region::Island, 400).unwrap();
    assert_eq!(k.components(), 2);
    let oracle = pixel_components(&f, psi0, 0.8, 2000);
    assert_eq!(oracle.len(), 2);
    for (l, centre) in k.loops.iter().zip(&k.centres) {
        let area = shoelace(l);
        let (pix, _) = oracle
            .iter()
            .min_by(|a, b| {
                let da = (a.1[0] - centre[0]).hypot(a.1[1] - centre[1]);
                let db = (b.1[0] - centre[0]).hypot(b.1[1] - centre[1]);
                da.total_cmp(&db)
            })
            .unwrap();
        assert!((area - pix).abs() / pix < 2e-3, "{area} vs {pix}");
    }
}

#[test]
fn lattice_determinants_match_reference_return_times() {
    let (f, c) = standard();
    for &(psi0, region, t) in &[
        (-0.01031, Region::Inner, 15.60),
        (-0.0316, Region::Island, 43.86),
        (-0.01533, Region::Outer, 18.15),
    ] {
        let x0 = seed_point(&f, &c, psi0, region).unwrap();
        let g = lattice_generators(&TraceSpec::new(&f, Rhs::V, x0), UlineSearch::default(), 1).unwrap();
        assert_eq!(g.t1, [TAU, 0.0]);
        assert!(!g.c_known);
        assert!((g.delta - TAU * t).abs() < TAU * 0.15, "{region}: {}", g.delta / TAU);
    }
}

#[test]
fn counting_mode_needs_two_candidates_in_islands() {
    let (f, c) = standard();
    let x0 = seed_point(&f, &c, -0.0316, Region::Island).unwrap();
    let spec = TraceSpec::new(&f, Rhs::V, x0);
    let a = lattice_generators(&spec, UlineSearch::default(), 1).unwrap();
    let b = lattice_generators(&spec, UlineSearch::counting(), 2).unwrap();
    assert!((a.delta - b.delta).abs() < 1e-8);
}

#[test]
fn harmonic_average_tends_to_axis_value() {
    let (f, c) = standard();
    let x0 = seed_point(&f, &c, -1e-7, Region::Inner).unwrap();
    let v = inv_rho_hat(&f, x0, 6);
    assert!((v - 2.0).abs() < 1e-3, "{v}");
}

#[test]
fn harmonic_average_unperturbed_matches_quadrature() {
    let f = Helical::new(HelicalParams::standard().with_eps(0.0)).unwrap();
    for &psi in &[0.02, 0.06, 0.2] {
        let x0 = [psi, 0.4, 0.0];
        let n = 20_000;
        let oracle = (0..n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                let r = f.big_r(psi, t);
                r * r / 2.0
            })
            .sum::<f64>()
            / n as f64;
        // q = 6 leaves aliasing of the sixth Fourier mode
        let v = inv_rho_hat(&f, x0, 6);
        assert!((v - oracle).abs() < 1e-5 * oracle, "{v} vs {oracle}");
        let v = inv_rho_hat(&f, x0, 16);
        assert!((v - oracle).abs() < 1e-12 * oracle, "{v} vs {oracle}");
    }
}

fn ten_levels(region: Region) -> Vec<f64> {
    let (a, b) = match region {
        Region::Inner => (-0.0240, -0.0010),
        Region::Island => (-0.0380, -0.0255),
        Region::Outer => (-0.0240, 0.0150),
    };
    (0..10).map(|k| a + (b - a) * k as f64 / 9.0).collect()
}

#[test]
fn harmonic_average_converges_in_q() {
    let (f, c) = standard();
    for region in Region::ALL {
        for psi0 in ten_levels(region) {
            let x0 = seed_point(&f, &c, psi0, region).unwrap();
            let spec = TraceSpec::new(&f, Rhs::V, x0);
            let g = lattice_generators(&spec, UlineSearch::default(), 1).unwrap();
            let a6 = 1.0 / harmonic_average_rho(&f, &g, 6).unwrap();
            let a7 = 1.0 / harmonic_average_rho(&f, &g, 7).unwrap();
            assert!((a6 - a7).abs() / a7 <= 1e-3, "{region} {psi0}: {a6} {a7}");
        }
    }
}

#[test]
fn harmonic_average_error_decays_geometrically() {
    let (f, c) = standard();
    let x0 = seed_point(&f, &c, -0.01031, Region::Inner).unwrap();
    let g = lattice_generators(&TraceSpec::new(&f, Rhs::V, x0), UlineSearch::default(), 1).unwrap();
    let reference = 1.0 / harmonic_average_rho(&f, &g, 40).unwrap();
    let errs: Vec<f64> = (3..=8)
        .map(|q| (1.0 / harmonic_average_rho(&f, &g, q).unwrap() - reference).abs())
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0] || w[1] < 1e-13, "{errs:?}");
    }
    assert!(errs[5] < 1e-3 * errs[0] || errs[5] < 1e-13, "{errs:?}");
}

#[test]
fn harmonic_average_is_independent_of_start_point() {
    let (f, c) = standard();
    for &(psi0, region) in &[
        (-0.01031, Region::Inner),
        (-0.0316, Region::Island),
        (-0.01533, Region::Outer),
    ] {
        let k = extract_contour(&f, &c, psi0, region, 8).unwrap();
        let vals: Vec<f64> = [0, 3, 5]
            .iter()
            .map(|&j| inv_rho_hat(&f, f.section_to_chart(k.loops[0][j]), 16))
            .collect();
        for v in &vals[1..] {
            assert!((v - vals[0]).abs() < 1e-6 * vals[0], "{region}: {vals:?}");
        }
    }
}

#[test]
fn lattice_determinant_grows_towards_the_separatrix() {
    let (f, c) = standard();
    let sep = c.psi_sep().unwrap();
    for region in Region::ALL {
        let toward: f64 = if region == Region::Island { -1.0 } else { 1.0 };
        let mut last = 0.0;
        for k in 1..=5 {
            let d = 10f64.powi(-(k + 1)) * 0.5;
            let psi0 = sep + toward * d;
            let x0 = seed_point(&f, &c, psi0, region).unwrap();
            let g = lattice_generators(&TraceSpec::new(&f, Rhs::V, x0), UlineSearch::default(), 1).unwrap();
            assert!(g.delta > last, "{region} at {psi0}: {} <= {last}", g.delta);
            last = g.delta;
        }
    }
}
