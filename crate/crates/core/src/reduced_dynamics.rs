//! Reduced Hamiltonian dynamics in the `u` and canonical `v` coordinates,
//! the boundary system at `u = 0`, the permutation action and the reduced
//! energy landscape in `v = v₂/v₁`.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{self, IntegratorConfig};
use crate::resolution::{self, theta, UState, VState};
use crate::vortex_core::{check_separation, FullState, Strengths, Trajectory, COLLISION_GUARD};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative size of `|v₁³ − v₂³|` or of the central factor treated as a collision.
pub const V_GUARD: f64 = 1e-9;

fn u_points(us: &UState) -> Vec<Complex64> {
    let mut pts = us.u.clone();
    pts.push(Complex64::new(-us.rate(), 0.0));
    pts
}

/// `−(1/4π)(Γ/N)² Σ_{m<n} ln|u_m − u_n|² + (Γ²/4πN) Σ ln|u_m + u|²`, `u = u₀/N`.
pub fn h_u(us: &UState, g: &Strengths) -> Result<f64> {
    check_separation(&u_points(us), COLLISION_GUARD)?;
    let n = us.n() as f64;
    let gamma = g.gamma();
    let rate = us.rate();
    let mut pair = 0.0;
    for m in 0..us.n() {
        for k in m + 1..us.n() {
            pair += (us.u[m] - us.u[k]).norm_sqr().ln();
        }
    }
    let central: f64 = us.u.iter().map(|x| (x + rate).norm_sqr().ln()).sum();
    Ok(-(gamma / n).powi(2) / (4.0 * PI) * pair + gamma * gamma / (4.0 * PI * n) * central)
}

/// `du_m/dt = Σ_n {u_m, ū_n} ∂h_u/∂ū_n`.
pub fn u_field(us: &UState, g: &Strengths, guard: f64) -> Result<Vec<Complex64>> {
    check_separation(&u_points(us), guard)?;
    let n = us.n();
    let nf = n as f64;
    let gamma = g.gamma();
    let rate = us.rate();
    let pair_c = -(gamma / nf).powi(2) / (4.0 * PI);
    let central_c = gamma * gamma / (4.0 * PI * nf);
    let grad: Vec<Complex64> = (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..n {
                if m != k {
                    acc += pair_c / (us.u[k] - us.u[m]).conj();
                }
            }
            acc + central_c / (us.u[k] + rate).conj()
        })
        .collect();
    let table = resolution::bracket_structure(g);
    Ok((0..n)
        .map(|m| (0..n).map(|k| table.u_ubar[m][k] * grad[k]).sum())
        .collect())
}

fn guard_v(vs: &VState, guard: f64) -> Result<(Complex64, Complex64)> {
    let c1 = vs.v1 * vs.v1 * vs.v1;
    let c2 = vs.v2 * vs.v2 * vs.v2;
    let scale = c1.norm() + c2.norm();
    let p = c1 - c2;
    let t = c1 + c2 - 3.0 * vs.u * vs.v1 * vs.v2 + vs.u.powi(3);
    let tp = guard * scale;
    if !(p.norm() > tp) {
        return Err(Error::Collision {
            distance: p.norm(),
            threshold: tp,
        });
    }
    let tt = guard * (scale + vs.u.powi(3));
    if !(t.norm() > tt) {
        return Err(Error::Collision {
            distance: t.norm(),
            threshold: tt,
        });
    }
    Ok((p, t))
}

/// `−(Γ²/18π)(ln|(v₁³−v₂³)/(v₁³+v₂³)³| − 3 ln|1 − (3v₁v₂ − u²)u/(v₁³+v₂³)|)`.
pub fn h_v(vs: &VState, g: &Strengths) -> Result<f64> {
    let (p, t) = guard_v(vs, V_GUARD)?;
    let gamma = g.gamma();
    Ok(-gamma * gamma / (18.0 * PI) * (p.norm().ln() - 3.0 * t.norm().ln()))
}

/// Constant `h_u(from_v(v)) − h_v(v)`.
pub fn h_offset(g: &Strengths) -> f64 {
    -g.gamma().powi(2) / (36.0 * PI) * 27f64.ln()
}

fn v_field_guarded(vs: &VState, g: &Strengths, guard: f64) -> Result<(Complex64, Complex64)> {
    let (p, t) = guard_v(vs, guard)?;
    let gamma = g.gamma();
    let (v1, v2, u) = (vs.v1, vs.v2, vs.u);
    if u == 0.0 {
        return Ok((
            boundary_component(v1, v2, gamma),
            boundary_component(v2, v1, gamma),
        ));
    }
    let k = -I * gamma / (6.0 * PI);
    let d1 = k * (v1 * v1 / p - 3.0 * (v1 * v1 - u * v2) / t).conj();
    let d2 = k * (-v2 * v2 / p - 3.0 * (v2 * v2 - u * v1) / t).conj();
    Ok((d1, d2))
}

fn boundary_component(a: Complex64, b: Complex64, gamma: f64) -> Complex64 {
    let a6 = a.powu(6);
    let b6 = b.powu(6);
    let d = a6 - b6;
    let ac = a.conj();
    let bc = b.conj();
    -I * gamma / (3.0 * PI) * d / d.norm_sqr() * ac * ac * (2.0 * bc.powu(3) - ac.powu(3))
}

/// `dvₙ/dt = (2i/Γ) ∂h_v/∂v̄ₙ`; the closed boundary form is used at `u = 0`.
pub fn v_field(vs: &VState, g: &Strengths) -> Result<(Complex64, Complex64)> {
    v_field_guarded(vs, g, V_GUARD)
}

/// `(Γ/2)(|v₁|² + |v₂|²)`.
pub fn so2_momentum(vs: &VState, g: &Strengths) -> f64 {
    0.5 * g.gamma() * (vs.v1.norm_sqr() + vs.v2.norm_sqr())
}

/// Real-vector form of the `v` field, `[Re v₁, Im v₁, Re v₂, Im v₂]`.
pub fn v_flow(
    g: &Strengths,
    u: f64,
    guard: f64,
) -> impl FnMut(f64, &[f64], &mut [f64]) -> Result<()> + '_ {
    move |_t, y, dy| {
        let vs = VState::new(Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]), u);
        let (d1, d2) = v_field_guarded(&vs, g, guard)?;
        dy[0] = d1.re;
        dy[1] = d1.im;
        dy[2] = d2.re;
        dy[3] = d2.im;
        Ok(())
    }
}

pub fn v_to_flat(vs: &VState) -> [f64; 4] {
    [vs.v1.re, vs.v1.im, vs.v2.re, vs.v2.im]
}

pub fn v_from_flat(y: &[f64], u: f64) -> VState {
    VState::new(Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3]), u)
}

/// Integrates the canonical reduced system.
pub fn simulate_v(
    vs0: &VState,
    g: &Strengths,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<VState>> {
    let sol = integrate::integrate(
        v_flow(g, vs0.u, cfg.collision_guard),
        &v_to_flat(vs0),
        (0.0, t_end),
        cfg,
    )?;
    let states: Vec<VState> = sol.states.iter().map(|y| v_from_flat(y, vs0.u)).collect();
    let energy = states
        .iter()
        .map(|s| h_v(s, g))
        .collect::<Result<Vec<_>>>()?;
    let momentum = states
        .iter()
        .map(|s| resolution::gauge_momentum(&resolution::from_v(s), g))
        .collect();
    Ok(Trajectory {
        times: sol.times,
        states,
        energy,
        momentum,
    })
}

/// Integrates the reduced system in `u` coordinates; `u₀` is carried unchanged.
pub fn simulate_u(
    us0: &UState,
    g: &Strengths,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<UState>> {
    let n = us0.n();
    let u0 = us0.u0;
    let guard = cfg.collision_guard;
    let field = |_t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let us = unflat_u(u0, y, n);
        let du = u_field(&us, g, guard)?;
        for (k, d) in du.iter().enumerate() {
            dy[2 * k] = d.re;
            dy[2 * k + 1] = d.im;
        }
        Ok(())
    };
    let y0: Vec<f64> = us0.u.iter().flat_map(|x| [x.re, x.im]).collect();
    let sol = integrate::integrate(field, &y0, (0.0, t_end), cfg)?;
    let mut states = Vec::with_capacity(sol.states.len());
    for y in &sol.states {
        let mut us = unflat_u(u0, y, n);
        us.reproject();
        states.push(us);
    }
    let energy = states
        .iter()
        .map(|s| h_u(s, g))
        .collect::<Result<Vec<_>>>()?;
    let momentum = states
        .iter()
        .map(|s| resolution::gauge_momentum(s, g))
        .collect();
    Ok(Trajectory {
        times: sol.times,
        states,
        energy,
        momentum,
    })
}

fn unflat_u(u0: f64, y: &[f64], n: usize) -> UState {
    UState {
        u0,
        u: (0..n)
            .map(|k| Complex64::new(y[2 * k], y[2 * k + 1]))
            .collect(),
    }
}

/// Projects an ambient trajectory pointwise to reduced coordinates.
pub fn reduce(traj: &Trajectory<FullState>, g: &Strengths) -> Result<Trajectory<UState>> {
    let states = traj
        .states
        .iter()
        .map(|s| resolution::project(s, g))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: traj.times.clone(),
        states,
        energy: traj.energy.clone(),
        momentum: traj.momentum.clone(),
    })
}

/// A permutation of three satellites, stored as images (`perm[n] = σ(n)`, 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Perm(pub [usize; 3]);

impl Perm {
    pub const IDENTITY: Perm = Perm([0, 1, 2]);
    /// The cycle `(1,2,3)`.
    pub const CYCLE: Perm = Perm([1, 2, 0]);
    /// The transposition `(2,3)`.
    pub const SWAP: Perm = Perm([0, 2, 1]);

    pub fn all() -> [Perm; 6] {
        [
            Perm([0, 1, 2]),
            Perm([0, 2, 1]),
            Perm([1, 0, 2]),
            Perm([1, 2, 0]),
            Perm([2, 0, 1]),
            Perm([2, 1, 0]),
        ]
    }

    /// `(self ∘ other)(n) = self(other(n))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm([self.0[other.0[0]], self.0[other.0[1]], self.0[other.0[2]]])
    }

    pub fn pow(&self, k: usize) -> Perm {
        (0..k).fold(Perm::IDENTITY, |acc, _| acc.compose(self))
    }

    /// `(k, s)` with `self = CYCLE^k ∘ SWAP^s`.
    pub fn word(&self) -> (usize, usize) {
        for k in 0..3 {
            for s in 0..2 {
                if Perm::CYCLE.pow(k).compose(&Perm::SWAP.pow(s)) == *self {
                    return (k, s);
                }
            }
        }
        unreachable!("every permutation of three letters is a word in the generators")
    }
}

/// Action on `(v₁, v₂)` generated by `(1,2,3) ↦ (θv₁, θ⁻¹v₂)` and `(2,3) ↦ (v₂, v₁)`.
pub fn s3_act(perm: Perm, vs: &VState) -> VState {
    let (k, s) = perm.word();
    let t = theta(3);
    let mut out = *vs;
    for _ in 0..k {
        out = VState::new(t * out.v1, t.conj() * out.v2, out.u);
    }
    if s == 1 {
        out = VState::new(out.v2, out.v1, out.u);
    }
    out
}

/// Rectangle `[re_min, re_max] × [im_min, im_max]` in the `v` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            re_min: -1.5,
            re_max: 1.5,
            im_min: -1.5,
            im_max: 1.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    Extremum,
    Saddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub v: Complex64,
    pub kind: CriticalKind,
}

/// Samples of the reduced energy on the `v = v₂/v₁` plane at fixed momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedEnergyGrid {
    pub mu: f64,
    pub gamma: f64,
    pub bounds: Bounds,
    pub resolution: usize,
    /// `values[row][col]`, row along `Im v`, column along `Re v`; NaN when flagged.
    pub values: Vec<Vec<f64>>,
}

/// `−(Γ²/18π) ln|(Γ/2μ)³(1+|v|²)³(1−v³)/(1+v³)³|`.
pub fn energy_on_plane(v: Complex64, mu: f64, gamma: f64) -> f64 {
    let v3 = v * v * v;
    let f = (gamma / (2.0 * mu)).powi(3) * (1.0 + v.norm_sqr()).powi(3) * (1.0 - v3)
        / (1.0 + v3).powu(3);
    -gamma * gamma / (18.0 * PI) * f.norm().ln()
}

/// `∂H/∂x + i∂H/∂y` of [`energy_on_plane`].
pub fn energy_gradient(v: Complex64, gamma: f64) -> Complex64 {
    let v2 = v * v;
    let v3 = v2 * v;
    let dbar = 6.0 * v / (1.0 + v.norm_sqr()) + (-3.0 * v2 / (1.0 - v3)).conj()
        - 3.0 * (3.0 * v2 / (1.0 + v3)).conj();
    // d/dv̄ of ln|f|², doubled for the real gradient, scaled by the prefactor acting on ln|f|
    -gamma * gamma / (18.0 * PI) * dbar
}

pub fn energy_grid(
    mu: f64,
    bounds: Bounds,
    resolution: usize,
    g: &Strengths,
) -> Result<ReducedEnergyGrid> {
    let gamma = g.gamma();
    if !(mu * gamma > 0.0) {
        return Err(Error::Invalid(
            "the momentum level must have the sign of gamma".into(),
        ));
    }
    if resolution < 3 {
        return Err(Error::Invalid("resolution must be at least 3".into()));
    }
    if !(bounds.re_max > bounds.re_min && bounds.im_max > bounds.im_min) {
        return Err(Error::Invalid("empty bounds".into()));
    }
    let mut grid = ReducedEnergyGrid {
        mu,
        gamma,
        bounds,
        resolution,
        values: vec![vec![0.0; resolution]; resolution],
    };
    let h = grid.spacing();
    let h = h.0.max(h.1);
    for row in 0..resolution {
        for col in 0..resolution {
            let v = grid.point(row, col);
            let v3 = v * v * v;
            let val = energy_on_plane(v, mu, gamma);
            let near = (1.0 - v3).norm() < 3.0 * h || (1.0 + v3).norm() < 3.0 * h;
            grid.values[row][col] = if near || !val.is_finite() {
                f64::NAN
            } else {
                val
            };
        }
    }
    Ok(grid)
}

impl ReducedEnergyGrid {
    pub fn spacing(&self) -> (f64, f64) {
        let d = (self.resolution - 1) as f64;
        (
            (self.bounds.re_max - self.bounds.re_min) / d,
            (self.bounds.im_max - self.bounds.im_min) / d,
        )
    }

    pub fn point(&self, row: usize, col: usize) -> Complex64 {
        let (hx, hy) = self.spacing();
        Complex64::new(
            self.bounds.re_min + col as f64 * hx,
            self.bounds.im_min + row as f64 * hy,
        )
    }

    pub fn is_flagged(&self, row: usize, col: usize) -> bool {
        self.values[row][col].is_nan()
    }

    /// Connected groups of flagged cells (8-neighbour connectivity).
    pub fn collision_loci(&self) -> Vec<Vec<(usize, usize)>> {
        let n = self.resolution;
        let mut seen = vec![vec![false; n]; n];
        let mut out = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if seen[r][c] || !self.is_flagged(r, c) {
                    continue;
                }
                let mut comp = Vec::new();
                let mut queue = VecDeque::from([(r, c)]);
                seen[r][c] = true;
                while let Some((a, b)) = queue.pop_front() {
                    comp.push((a, b));
                    for da in -1i64..=1 {
                        for db in -1i64..=1 {
                            let (x, y) = (a as i64 + da, b as i64 + db);
                            if x < 0 || y < 0 || x >= n as i64 || y >= n as i64 {
                                continue;
                            }
                            let (x, y) = (x as usize, y as usize);
                            if !seen[x][y] && self.is_flagged(x, y) {
                                seen[x][y] = true;
                                queue.push_back((x, y));
                            }
                        }
                    }
                }
                out.push(comp);
            }
        }
        out
    }

    /// Critical points seeded from sign changes of the sampled gradient and
    /// refined by Newton iteration on the analytic gradient.
    pub fn critical_points(&self) -> Vec<CriticalPoint> {
        let n = self.resolution;
        let (hx, hy) = self.spacing();
        let mut grad = vec![vec![None; n]; n];
        for r in 1..n - 1 {
            for c in 1..n - 1 {
                let v = &self.values;
                let (l, rr, d, u) = (v[r][c - 1], v[r][c + 1], v[r - 1][c], v[r + 1][c]);
                if [l, rr, d, u].iter().all(|x| x.is_finite()) {
                    grad[r][c] = Some(((rr - l) / (2.0 * hx), (u - d) / (2.0 * hy)));
                }
            }
        }
        let mut found: Vec<CriticalPoint> = Vec::new();
        for r in 1..n - 2 {
            for c in 1..n - 2 {
                let corners = [
                    grad[r][c],
                    grad[r][c + 1],
                    grad[r + 1][c],
                    grad[r + 1][c + 1],
                ];
                if corners.iter().any(|x| x.is_none()) {
                    continue;
                }
                let gx: Vec<f64> = corners.iter().map(|x| x.unwrap().0).collect();
                let gy: Vec<f64> = corners.iter().map(|x| x.unwrap().1).collect();
                let changes =
                    |a: &[f64]| a.iter().any(|x| *x <= 0.0) && a.iter().any(|x| *x >= 0.0);
                if !(changes(&gx) && changes(&gy)) {
                    continue;
                }
                let seed = self.point(r, c) + Complex64::new(0.5 * hx, 0.5 * hy);
                if let Some(cp) = self.refine(seed) {
                    let tol = 1e-6 * (1.0 + cp.v.norm());
                    if !found.iter().any(|f| (f.v - cp.v).norm() < tol) {
                        found.push(cp);
                    }
                }
            }
        }
        found
    }

    fn refine(&self, seed: Complex64) -> Option<CriticalPoint> {
        let gamma = self.gamma;
        let (hx, hy) = self.spacing();
        let mut v = seed;
        for _ in 0..50 {
            let (g0, hess) = gradient_and_hessian(v, gamma);
            let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            let dx = (hess[1][1] * g0.re - hess[0][1] * g0.im) / det;
            let dy = (-hess[1][0] * g0.re + hess[0][0] * g0.im) / det;
            v -= Complex64::new(dx, dy);
            if dx.hypot(dy) < 1e-14 * (1.0 + v.norm()) {
                break;
            }
        }
        let (g0, hess) = gradient_and_hessian(v, gamma);
        let scale = gamma * gamma / (18.0 * PI);
        if !(g0.norm() < 1e-9 * scale) {
            return None;
        }
        if (v - seed).norm() > 2.0 * hx.max(hy) {
            return None;
        }
        let b = &self.bounds;
        if v.re < b.re_min || v.re > b.re_max || v.im < b.im_min || v.im > b.im_max {
            return None;
        }
        let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
        let kind = if det > 0.0 {
            CriticalKind::Extremum
        } else {
            CriticalKind::Saddle
        };
        Some(CriticalPoint { v, kind })
    }

    /// CSV with columns `re_v,im_v,H`; flagged cells print `sing`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Invalid(format!("csv output failed: {e}"));
        wr.write_record(["re_v", "im_v", "H"]).map_err(io)?;
        for row in 0..self.resolution {
            for col in 0..self.resolution {
                let v = self.point(row, col);
                let h = if self.is_flagged(row, col) {
                    "sing".to_string()
                } else {
                    format!("{:.17e}", self.values[row][col])
                };
                wr.write_record([format!("{:.17e}", v.re), format!("{:.17e}", v.im), h])
                    .map_err(io)?;
            }
        }
        wr.flush()
            .map_err(|e| Error::Invalid(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

fn gradient_and_hessian(v: Complex64, gamma: f64) -> (Complex64, [[f64; 2]; 2]) {
    let g0 = energy_gradient(v, gamma);
    let h = 1e-6 * (1.0 + v.norm());
    let gxp = energy_gradient(v + h, gamma);
    let gxm = energy_gradient(v - h, gamma);
    let gyp = energy_gradient(v + Complex64::new(0.0, h), gamma);
    let gym = energy_gradient(v - Complex64::new(0.0, h), gamma);
    let dx = (gxp - gxm) / (2.0 * h);
    let dy = (gyp - gym) / (2.0 * h);
    (g0, [[dx.re, dy.re], [dx.im, dy.im]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn o_point_energy() {
        let g = Strengths::ring(1.3, 3).unwrap();
        let alpha = 0.8;
        let h = h_v(&VState::new(c(alpha, 0.0), c(0.0, 0.0), 0.0), &g).unwrap();
        assert!((h - 1.3 * 1.3 * alpha.ln() / (3.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn o_point_velocity() {
        let gamma = 2.0;
        let alpha = 1.7;
        let g = Strengths::ring(gamma, 3).unwrap();
        let (d1, d2) = v_field(&VState::new(c(alpha, 0.0), c(0.0, 0.0), 0.0), &g).unwrap();
        let ue = gamma / (3.0 * PI * alpha * alpha);
        assert!((d1 - I * ue * alpha).norm() < 1e-14);
        assert_eq!(d2, c(0.0, 0.0));
    }

    #[test]
    fn cycle_has_order_three() {
        let vs = VState::new(c(0.3, 0.2), c(-0.1, 0.5), 0.1);
        let mut w = vs;
        for _ in 0..3 {
            w = s3_act(Perm::CYCLE, &w);
        }
        assert!((w.v1 - vs.v1).norm() < 1e-12 && (w.v2 - vs.v2).norm() < 1e-12);
        assert_eq!(s3_act(Perm::IDENTITY, &vs), vs);
        let t = theta(3);
        let w = s3_act(Perm::CYCLE, &vs);
        assert!((w.v1 - t * vs.v1).norm() < 1e-15);
        let w = s3_act(Perm::SWAP, &vs);
        assert_eq!((w.v1, w.v2), (vs.v2, vs.v1));
    }

    #[test]
    fn words_cover_the_group() {
        for p in Perm::all() {
            let (k, s) = p.word();
            assert_eq!(Perm::CYCLE.pow(k).compose(&Perm::SWAP.pow(s)), p);
        }
    }

    #[test]
    fn satellite_collision_is_typed() {
        let g = Strengths::ring(1.0, 3).unwrap();
        let vs = VState::new(c(1.0, 0.0), c(1.0, 0.0), 0.0);
        assert!(matches!(h_v(&vs, &g), Err(Error::Collision { .. })));
        assert!(matches!(v_field(&vs, &g), Err(Error::Collision { .. })));
    }

    #[test]
    fn grid_rejects_wrong_sign() {
        let g = Strengths::ring(1.0, 3).unwrap();
        assert!(energy_grid(-1.0, Bounds::default(), 11, &g).is_err());
    }

    #[test]
    fn grid_origin_is_regular() {
        let g = Strengths::ring(1.0, 3).unwrap();
        let grid = energy_grid(0.5, Bounds::default(), 31, &g).unwrap();
        assert!(grid.values[15][15].is_finite());
        assert!(grid.point(15, 15).norm() < 1e-15);
    }
}
