use num_complex::Complex64;
use proptest::prelude::*;
use vortex_resolution::calculus::*;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.5..1.5f64, -1.5..1.5f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn nonzero() -> impl Strategy<Value = Complex64> {
    complex().prop_filter("away from the pole", |z| z.norm() > 0.3)
}

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![0.2..2.0f64, -2.0..-0.2f64], 2)
}

// mixed polynomials in two variables and their conjugates
fn f1(z: &[Complex64]) -> Complex64 {
    z[0] * z[0] * z[1].conj() + 0.5 * z[1] * z[0].conj()
}

fn f2(z: &[Complex64]) -> Complex64 {
    z[0].conj() * z[1] * z[1] - 0.3 * z[0] * z[0].conj()
}

fn f3(z: &[Complex64]) -> Complex64 {
    z[1].conj() * z[1].conj() + z[0] * z[1]
}

proptest! {
    #[test]
    fn product_derivative(z in complex()) {
        let f = |w: &[Complex64]| Complex64::new(w[0].re * w[0].im, 0.0);
        prop_assert!((d_dz(&f, 0, &[z]).unwrap() - z / (2.0 * I)).norm() < 1e-9);
    }

    #[test]
    fn quotient_derivative(z in nonzero()) {
        let f = |w: &[Complex64]| w[0].conj() / w[0];
        let want = 2.0 * I * z.im / (z * z);
        prop_assert!((d_dx(&f, 0, &[z]).unwrap() - want).norm() < 1e-8 * (1.0 + want.norm()));
    }

    #[test]
    fn sum_of_squares_against_difference(z in complex()) {
        let f = |w: &[Complex64]| w[0] * w[0].conj();
        let g = |w: &[Complex64]| (w[0] * w[0] + w[0].conj() * w[0].conj()) / 2.0;
        let b = poisson_bracket(&f, &g, &[z], &[1.0]).unwrap();
        prop_assert!((b - Complex64::new(-8.0 * z.re * z.im, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn leibniz(a in complex(), b in complex(), w in weights()) {
        let p = [a, b];
        let fg = |z: &[Complex64]| f1(z) * f2(z);
        let lhs = poisson_bracket(&fg, &f3, &p, &w).unwrap();
        let rhs = f1(&p) * poisson_bracket(&f2, &f3, &p, &w).unwrap()
            + f2(&p) * poisson_bracket(&f1, &f3, &p, &w).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-6);
    }

    #[test]
    fn conjugation(a in complex(), b in complex(), w in weights()) {
        let p = [a, b];
        let g1 = |z: &[Complex64]| f1(z).conj();
        let g2 = |z: &[Complex64]| f2(z).conj();
        let lhs = poisson_bracket(&f1, &f2, &p, &w).unwrap().conj();
        let rhs = poisson_bracket(&g1, &g2, &p, &w).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-6);
    }

    #[test]
    fn antisymmetry(a in complex(), b in complex(), w in weights()) {
        let p = [a, b];
        let ab = poisson_bracket(&f1, &f2, &p, &w).unwrap();
        let ba = poisson_bracket(&f2, &f1, &p, &w).unwrap();
        prop_assert!((ab + ba).norm() < 1e-8);
        prop_assert!(poisson_bracket(&f1, &f1, &p, &w).unwrap().norm() < 1e-8);
    }

    #[test]
    fn jacobi(a in complex(), b in complex(), w in weights()) {
        // inner brackets are quartic, where the five-point stencil is exact at any step
        let p = [a, b];
        let ww = w.clone();
        let br = move |f: fn(&[Complex64]) -> Complex64, g: fn(&[Complex64]) -> Complex64| {
            let w = ww.clone();
            move |z: &[Complex64]| poisson_bracket(&f, &g, z, &w).unwrap()
        };
        let wide = |f: fn(&[Complex64]) -> Complex64, g: &dyn Fn(&[Complex64]) -> Complex64| {
            (0..2)
                .map(|k| {
                    let (fz, fzb) = wirtinger_step(&f, k, &p, 0.1).unwrap();
                    let (gz, gzb) = wirtinger_step(g, k, &p, 0.1).unwrap();
                    -2.0 * I * w[k] * (fz * gzb - fzb * gz)
                })
                .sum::<Complex64>()
        };
        let t1 = wide(f1, &br(f2, f3));
        let t2 = wide(f2, &br(f3, f1));
        let t3 = wide(f3, &br(f1, f2));
        prop_assert!((t1 + t2 + t3).norm() < 1e-5, "{}", (t1 + t2 + t3).norm());
    }

    #[test]
    fn field_generates_the_bracket(a in complex(), b in complex(), w in weights()) {
        // df/dt = {f, H} along the Hamiltonian field
        let p = [a, b];
        let h = |z: &[Complex64]| Complex64::new(z[0].norm_sqr() * z[1].re + z[1].norm_sqr().powi(2), 0.0);
        let x = hamiltonian_field(&h, &p, &w).unwrap();
        let bracket = poisson_bracket(&f1, &h, &p, &w).unwrap();
        let mut directional = Complex64::new(0.0, 0.0);
        for k in 0..2 {
            let (dz, dzb) = wirtinger(&f1, k, &p).unwrap();
            directional += dz * x[k] + dzb * x[k].conj();
        }
        prop_assert!((directional - bracket).norm() < 1e-6);
    }
}

#[test]
fn stencil_is_fourth_order() {
    let f = |z: &[Complex64]| z[0].powu(5) * z[0].conj().powu(2);
    let z = Complex64::new(0.6, -0.7);
    let exact_dz = 5.0 * z.powu(4) * z.conj().powu(2);
    let err = |h: f64| (wirtinger_step(&f, 0, &[z], h).unwrap().0 - exact_dz).norm();
    let ratio = err(0.02) / err(0.01);
    assert!((ratio - 16.0).abs() < 1.0, "{ratio}");
}

type Map<'a> = &'a dyn Fn(&[Complex64]) -> Complex64;

#[test]
fn linear_change_of_variables_has_no_defect() {
    let z = [Complex64::new(0.4, 0.1), Complex64::new(-0.2, 0.7)];
    let w0 = |z: &[Complex64]| z[0] + 2.0 * z[1];
    let w1 = |z: &[Complex64]| I * z[0] - z[1];
    let w: [Map; 2] = [&w0, &w1];
    let f = |w: &[Complex64]| w[0] * w[1].conj() * w[0];
    let g = |w: &[Complex64]| w[1] * w[1].conj() + w[0].conj();
    let d = bracket_transform_check(&w, &f, &g, &z, &diagonal_structure(&[1.0, -0.5])).unwrap();
    assert!(d < 1e-6, "{d}");
}
