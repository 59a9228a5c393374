#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vortex_resolution::resolution::{UState, VState};
use vortex_resolution::se2::SE2Element;
use vortex_resolution::vortex_core::FullState;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rand_c(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    c(rng.random_range(-r..r), rng.random_range(-r..r))
}

fn min_sep(z: &[Complex64]) -> f64 {
    let mut d = f64::INFINITY;
    for m in 0..z.len() {
        for n in m + 1..z.len() {
            d = d.min((z[m] - z[n]).norm());
        }
    }
    d
}

/// Well-separated positions with a sector sum bounded away from zero.
pub fn full_state(rng: &mut ChaCha8Rng, n_points: usize) -> FullState {
    loop {
        let z: Vec<Complex64> = (0..n_points).map(|_| rand_c(rng, 1.0)).collect();
        let sum: Complex64 = z[1..].iter().map(|x| x - z[0]).sum();
        if min_sep(&z) > 0.15 && sum.norm() > 0.2 {
            return FullState::new(z);
        }
    }
}

pub fn ustate(rng: &mut ChaCha8Rng, n: usize, u0: Option<f64>) -> UState {
    loop {
        let u0 = u0.unwrap_or_else(|| rng.random_range(0.1..2.0));
        let us = UState::new(u0, (0..n).map(|_| rand_c(rng, 1.0)).collect()).unwrap();
        let mut pts = us.u.clone();
        pts.push(c(-us.rate(), 0.0));
        if min_sep(&pts) > 0.15 {
            return us;
        }
    }
}

pub fn vstate(rng: &mut ChaCha8Rng, u: f64) -> VState {
    loop {
        let vs = VState::new(rand_c(rng, 1.0), rand_c(rng, 0.6), u);
        let us = vortex_resolution::resolution::from_v(&vs);
        let mut pts = us.u.clone();
        pts.push(c(-u, 0.0));
        if min_sep(&pts) > 0.2 {
            return vs;
        }
    }
}

pub fn group_element(rng: &mut ChaCha8Rng) -> SE2Element {
    SE2Element::new(
        Complex64::from_polar(1.0, rng.random_range(-3.0..3.0)),
        rand_c(rng, 2.0),
    )
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Rotation number of the return map of the ε⁴ slice expansion, measured about the orbit centroid.
pub fn expansion_rotation(alpha: f64, u: f64, start: (f64, f64), returns: usize) -> f64 {
    use std::f64::consts::PI;
    use vortex_resolution::integrate::{integrate, Direction, IntegratorConfig};
    use vortex_resolution::poincare::{rotation_number, SectionData, SectionParams};
    use vortex_resolution::slice::{h_slice_trunc0, SliceState};
    let gamma = 1.0;
    let h = |y: &[f64]| {
        h_slice_trunc0(&SliceState::new(y[0], y[1], y[2], y[3]), u, alpha, gamma, 4).unwrap()
    };
    let field = |_t: f64, y: &[f64], dy: &mut [f64]| -> vortex_resolution::Result<()> {
        let mut grad = [0.0; 4];
        for k in 0..4 {
            let d = 1e-6 * (1.0 + y[k].abs());
            let mut yp = [y[0], y[1], y[2], y[3]];
            let mut ym = yp;
            yp[k] += d;
            ym[k] -= d;
            grad[k] = (h(&yp) - h(&ym)) / (2.0 * d);
        }
        dy[0] = grad[1] / gamma;
        dy[1] = -grad[0] / gamma;
        dy[2] = grad[3] / gamma;
        dy[3] = -grad[2] / gamma;
        Ok(())
    };
    let period = 2.0 * PI * 3.0 * PI * alpha * alpha / gamma;
    let loose = IntegratorConfig::default()
        .with_rel_tol(1e-10)
        .with_abs_tol(1e-12);
    let sol = integrate(
        field,
        &[0.0, 0.0, start.0, start.1],
        (0.0, period * (returns as f64 + 0.5)),
        &loose,
    )
    .unwrap();
    let points: Vec<(f64, f64)> = sol
        .find_events(|_t, y| y[0].sin(), Direction::Up)
        .into_iter()
        .filter(|e| e.y[0].cos() > 0.0 && e.t > 1e-6)
        .map(|e| (e.y[2], e.y[3]))
        .collect();
    let n = points.len() as f64;
    let center = (
        points.iter().map(|p| p.0).sum::<f64>() / n,
        points.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sd = SectionData {
        energies: vec![0.0; points.len()],
        params: SectionParams {
            alpha_e: alpha,
            u,
            gamma,
            n_iters: points.len(),
        },
        points,
        center,
    };
    rotation_number(&sd).unwrap()
}
