use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn helical_points(n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
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

fn axisym_points(n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let rho = rng.gen_range(0.01..0.85);
            let t = rng.gen_range(-PI..PI);
            [1.0 + rho * t.cos(), rng.gen_range(-PI..PI), rho * t.sin()]
        })
        .collect()
}

fn divergence(field: &dyn FieldModel, x: &[f64; 3], h: f64) -> f64 {
    (0..3)
        .map(|i| fd_partial(|y| field.sqrt_g(y) * field.b_contra(y)[i], x, i, h))
        .sum::<f64>()
        / field.sqrt_g(x)
}

fn norm(v: &[f64; 3]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[test]
fn axisym_examples() {
    let f = Axisymmetric::default();
    assert_eq!(f.b_contra(&[1.0, 0.0, 0.0]), [0.0, 1.0, 0.0]);
    let b = f.b_contra(&[1.2, 0.0, 0.0]);
    assert_eq!(b[0], 0.0);
    assert!((b[1] - 1.0 / 1.44).abs() < 1e-15);
    assert!((b[2] - 0.2 / 1.2).abs() < 1e-15);
    assert!((f.psi_label(&[1.2, 0.0, 0.0]) - 0.02).abs() < 1e-15);
    assert_eq!(Axisymmetric::exact_volume(0.0), 0.0);
    assert!((Axisymmetric::exact_volume(0.02) - 0.789568).abs() < 5e-7);
    assert!((Axisymmetric::exact_volume(0.32) - 12.633094).abs() < 5e-7);
}

#[test]
fn axisym_rejects_bad_params() {
    assert!(Axisymmetric::new(AxisymParams { c: 0.0, r0: 0.5 }).is_err());
    assert!(Axisymmetric::new(AxisymParams { c: 1.0, r0: 1.0 }).is_err());
}

#[test]
fn helical_axis_is_field_line() {
    let f = Helical::standard();
    for &(t, p) in &[(0.0, 0.0), (1.0, 2.0), (-2.5, 0.3)] {
        let b = f.b_contra(&[0.0, t, p]);
        assert_eq!(b[0], 0.0);
        // P'(0) = f(0) for m = 2, so the angular rate keeps the mode
        let expect = 0.5 * (0.25 - 4.0 * 0.007 * (2.0 * t - p).cos());
        assert!((b[1] - expect).abs() < 1e-15);
        assert!((b[2] - 0.5).abs() < 1e-15);
        assert_eq!(f.psi_label(&[0.0, t, p]), 0.0);
        assert_eq!(f.a_cov(&[0.0, t, p]), [0.0, 0.0, 0.0]);
        assert!((f.density(&[0.0, t, p]) - 0.5).abs() < 1e-15);
    }
}

#[test]
fn helical_unperturbed_has_no_radial_field() {
    let f = Helical::new(HelicalParams::standard().with_eps(0.0)).unwrap();
    for x in helical_points(50, 3) {
        assert_eq!(f.b_contra(&x)[0], 0.0);
    }
}

#[test]
fn helical_standard_point() {
    let f = Helical::standard();
    let x = [0.02, 0.0, 0.0];
    assert_eq!(f.b_contra(&x)[0], 0.0);
    let a = f.a_cov(&x);
    assert!((a[2] - -(0.005 + 0.0004 + 0.007 * 0.02 * -3.98)).abs() < 1e-16);
    assert!((a[2] - -0.004_842_8).abs() < 1e-12);
    // B^ϑ: K [w1 + 2 w2 ψ + ε (f + ψ f')] with K = B0 R0 / R², R = R0 + r
    let r = crate::coords::r_of_psi(0.02, 1.0, 2.0).unwrap();
    let k = 2.0 / ((2.0 + r) * (2.0 + r));
    let expect = k * (0.25 + 0.04 + 0.007 * ((0.02 - 4.0) + 0.02));
    assert!((f.b_contra(&x)[1] - expect).abs() < 1e-15);
}

#[test]
fn helical_psi_label_table_anchors() {
    let f = Helical::standard();
    let at = |y: f64| f.section_psi([y, 0.0]);
    assert!((at(0.150) - -0.0060).abs() < 5e-5);
    assert!((at(0.52542) - -0.0384).abs() < 5e-5);
    // (m, n) = (2, 1) closed form
    for x in helical_points(20, 5) {
        let psi = x[0];
        let expect = -psi + 2.0 * (psi / 4.0 + psi * psi + 0.007 * psi * (psi - 4.0) * (2.0 * x[1] - x[2]).cos());
        assert!((f.psi_label(&x) - expect).abs() < 1e-15);
    }
}

#[test]
fn symmetry_field_and_density() {
    let f = Helical::standard();
    assert_eq!(f.u_contra(&[0.1, 0.0, 0.0]), [0.0, 1.0, 2.0]);
    for x in helical_points(20, 9) {
        let v = f.rhs(Rhs::V, &x);
        assert!((v[2] - 1.0).abs() < 1e-15);
        assert!(f.density(&x) > 0.0);
    }
    assert!((f.u_period() - 2.0 * PI).abs() < 1e-15);
}

#[test]
fn curl_of_potential_reproduces_field() {
    fn check(f: &dyn FieldModel, points: Vec<[f64; 3]>) {
        let h = 1e-5;
        for x in points {
            let d = |i: usize, j: usize| fd_partial(|y: &[f64; 3]| f.a_cov(y)[j], &x, i, h);
            let g = f.sqrt_g(&x);
            let curl = [
                (d(1, 2) - d(2, 1)) / g,
                (d(2, 0) - d(0, 2)) / g,
                (d(0, 1) - d(1, 0)) / g,
            ];
            let b = f.b_contra(&x);
            for i in 0..3 {
                assert!((curl[i] - b[i]).abs() < 1e-6, "{i}: {} vs {}", curl[i], b[i]);
            }
        }
    }
    check(&Helical::standard(), helical_points(100, 11));
    check(&Axisymmetric::default(), axisym_points(100, 12));
}

#[test]
fn fields_are_divergence_free() {
    let hel = Helical::standard();
    for x in helical_points(1000, 21) {
        let d = divergence(&hel, &x, 1e-5);
        assert!(d.abs() <= 1e-6 * norm(&hel.b_contra(&x)).max(1.0), "{d}");
    }
    let ax = Axisymmetric::default();
    for x in axisym_points(1000, 22) {
        let d = divergence(&ax, &x, 1e-5);
        assert!(d.abs() <= 1e-6 * norm(&ax.b_contra(&x)).max(1.0));
    }
}

#[test]
fn label_is_invariant_under_b_and_u() {
    let hel = Helical::standard();
    let ax = Axisymmetric::default();
    let fields: [(&dyn FieldModel, Vec<[f64; 3]>); 2] =
        [(&hel, helical_points(300, 31)), (&ax, axisym_points(300, 32))];
    for (f, pts) in fields {
        for x in pts {
            let grad: Vec<f64> = (0..3).map(|i| fd_partial(|y| f.psi_label(y), &x, i, 1e-6)).collect();
            let scale = grad.iter().map(|g| g.abs()).sum::<f64>().max(1e-12);
            for w in [f.b_contra(&x), f.u_contra(&x)] {
                let dd: f64 = (0..3).map(|i| w[i] * grad[i]).sum();
                let wn = norm(&w);
                assert!(dd.abs() <= 1e-8 * scale * wn.max(1.0), "{dd}");
            }
            // analytic gradient agrees with finite differences
            let an = f.psi_gradient(&x);
            for i in 0..3 {
                assert!((an[i] - grad[i]).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn u_commutes_with_scaled_field() {
    let f = Helical::standard();
    let h = 1e-5;
    for x in helical_points(200, 41) {
        let u = f.u_contra(&x);
        let v = f.rhs(Rhs::V, &x);
        for k in 0..3 {
            let u_dv: f64 = (0..3)
                .map(|i| u[i] * fd_partial(|y| f.rhs(Rhs::V, y)[k], &x, i, h))
                .sum();
            let v_du: f64 = (0..3).map(|i| v[i] * fd_partial(|y| f.u_contra(y)[k], &x, i, h)).sum();
            assert!((u_dv - v_du).abs() < 1e-6);
        }
    }
}

#[test]
fn u_divergence_matches_closed_form() {
    let f = Helical::standard();
    for x in helical_points(200, 51) {
        let fd: f64 = (0..3)
            .map(|i| fd_partial(|y| f.sqrt_g(y) * f.u_contra(y)[i], &x, i, 1e-5))
            .sum::<f64>()
            / f.sqrt_g(&x);
        assert!((fd - f.u_divergence(&x)).abs() < 1e-6);
    }
}

#[test]
fn flux_form_coefficients() {
    let ax = Axisymmetric::default();
    assert!((ax.section_flux_factor([1.25, 0.1]) - 1.0 / 1.25).abs() < 1e-15);
    let hel = Helical::standard();
    assert_eq!(hel.section_flux_factor([0.3, -0.2]), 1.0);
    // |f| dx∧dy equals the flux β through the section: B^φ √g |∂(chart)/∂(section)|
    for &p in &[[0.3, -0.2], [0.05, 0.4], [-0.6, 0.1]] {
        let x = hel.section_to_chart(p);
        let jac = jacobian_det(
            |q| {
                let y = hel.section_to_chart(q);
                [y[0], y[1]]
            },
            p,
        );
        let beta = hel.b_contra(&x)[2] * hel.sqrt_g(&x) * jac;
        assert!((beta - hel.section_flux_factor(p)).abs() < 1e-7);
    }
}

fn jacobian_det<F: Fn([f64; 2]) -> [f64; 2]>(f: F, p: [f64; 2]) -> f64 {
    let h = 1e-6;
    let d = |i: usize| {
        let mut a = p;
        let mut b = p;
        a[i] += h;
        b[i] -= h;
        let (fa, fb) = (f(a), f(b));
        [(fa[0] - fb[0]) / (2.0 * h), (fa[1] - fb[1]) / (2.0 * h)]
    };
    let (c0, c1) = (d(0), d(1));
    (c0[0] * c1[1] - c0[1] * c1[0]).abs()
}

#[test]
fn normal_field_pairs_to_one_with_label_gradient() {
    let hel = Helical::standard();
    for x in helical_points(100, 61) {
        let n = hel.normal_field(&x);
        let g = hel.psi_gradient(&x);
        let pair: f64 = (0..3).map(|i| n[i] * g[i]).sum();
        assert!((pair - 1.0).abs() < 1e-12);
    }
    let ax = Axisymmetric::default();
    for x in axisym_points(100, 62) {
        let n = ax.normal_field(&x);
        let g = ax.psi_gradient(&x);
        let pair: f64 = (0..3).map(|i| n[i] * g[i]).sum();
        assert!((pair - 1.0).abs() < 1e-12);
    }
}

#[test]
fn section_gradient_matches_finite_differences() {
    let hel = Helical::standard();
    for &p in &[[0.3, -0.2], [0.05, 0.4], [-0.6, 0.1], [0.52, 0.0]] {
        let g = hel.section_psi_gradient(p);
        for i in 0..2 {
            let mut a = p;
            let mut b = p;
            a[i] += 1e-6;
            b[i] -= 1e-6;
            let fd = (hel.section_psi(a) - hel.section_psi(b)) / 2e-6;
            assert!((g[i] - fd).abs() < 1e-8);
        }
    }
}

#[test]
fn phi_flux_equals_minus_two_pi_psi() {
    let f = Helical::standard();
    for x in helical_points(20, 71) {
        let q = crate::volume::phi_flux(&f, &x, 64);
        let c = f.phi_flux_closed_form(&x);
        assert!((q - c).abs() <= 1e-8 * c.abs().max(1e-12));
    }
}
