//! Maps between the ambient configuration space and the resolved reduced
//! space `P₁`: projection, the standard-gauge section, reduced brackets, the
//! `u ↔ v` canonicalization and reconstruction of ambient motion.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{self, IntegratorConfig};
use crate::reduced_dynamics;
use crate::se2::{SE2Element, Se2Momentum};
use crate::vortex_core::{self, check_separation, FullState, Strengths, Trajectory};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative threshold on `|Σ(z_m − z₀)|` below which projection is refused.
pub const SINGULAR_TOLERANCE: f64 = 1e-10;

/// `e^{2πi/N}`.
pub fn theta(n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / n as f64)
}

/// Reduced state `(u₀, u₁..u_N)` with `u₀ ≥ 0` and `Σ uₙ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UState {
    pub u0: f64,
    pub u: Vec<Complex64>,
}

impl UState {
    /// Builds a state, removing any mean from `u`.
    pub fn new(u0: f64, u: Vec<Complex64>) -> Result<Self> {
        if !(u0 >= 0.0) || !u0.is_finite() {
            return Err(Error::Invalid(format!(
                "u0 = {u0} must be finite and non-negative"
            )));
        }
        if u.is_empty() {
            return Err(Error::Invalid("u must be nonempty".into()));
        }
        let mut s = UState { u0, u };
        s.reproject();
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// The rescaled parameter `u₀/N`.
    pub fn rate(&self) -> f64 {
        self.u0 / self.n() as f64
    }

    pub fn reproject(&mut self) {
        let mean = self.u.iter().sum::<Complex64>() / self.u.len() as f64;
        self.u.iter_mut().for_each(|x| *x -= mean);
    }

    /// `u'_n = u_{σ(n)}` for a permutation given by its images.
    pub fn permute(&self, perm: &[usize]) -> UState {
        UState {
            u0: self.u0,
            u: perm.iter().map(|&k| self.u[k]).collect(),
        }
    }

    pub fn rotate(&self, phase: Complex64) -> UState {
        UState {
            u0: self.u0,
            u: self.u.iter().map(|x| phase * x).collect(),
        }
    }
}

/// Canonical three-satellite state `(v₁, v₂)` with parameter `u = u₀/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VState {
    pub v1: Complex64,
    pub v2: Complex64,
    pub u: f64,
}

impl VState {
    pub fn new(v1: Complex64, v2: Complex64, u: f64) -> Self {
        VState { v1, v2, u }
    }

    pub fn rotate(&self, phase: Complex64) -> VState {
        VState {
            v1: phase * self.v1,
            v2: phase * self.v2,
            u: self.u,
        }
    }
}

fn sector_sum(s: &FullState) -> Complex64 {
    let z0 = s.z[0];
    s.z[1..].iter().map(|z| z - z0).sum()
}

fn check_family(s: &FullState, g: &Strengths) -> Result<()> {
    if s.len() != g.len() || s.len() < 2 {
        return Err(Error::Invalid(format!(
            "{} positions for {} strengths",
            s.len(),
            g.len()
        )));
    }
    Ok(())
}

/// `u₀ = |S|`, `uₙ = u₀(zₙ − z₀)/S − u₀/N` with `S = Σ(z_m − z₀)`.
pub fn project(s: &FullState, g: &Strengths) -> Result<UState> {
    check_family(s, g)?;
    let n = g.n_sat() as f64;
    let sum = sector_sum(s);
    let threshold = SINGULAR_TOLERANCE * s.diameter();
    if !(sum.norm() > threshold) {
        return Err(Error::SingularSector {
            magnitude: sum.norm(),
            threshold,
        });
    }
    let u0 = sum.norm();
    let u = s.z[1..]
        .iter()
        .map(|z| u0 * (z - s.z[0]) / sum - u0 / n)
        .collect();
    UState::new(u0, u)
}

/// Projection written through the momentum: `u₀ = N|ν|/|Γ|`,
/// `uₙ = (u₀/Nν)(iΓ(zₙ − z₀) − ν)`.
pub fn project_via_momentum(s: &FullState, g: &Strengths) -> Result<UState> {
    check_family(s, g)?;
    let n = g.n_sat() as f64;
    let gamma = g.gamma();
    let nu = vortex_core::momentum(s, g).nu;
    let threshold = SINGULAR_TOLERANCE * s.diameter() * gamma.abs() / n;
    if !(nu.norm() > threshold) {
        return Err(Error::SingularSector {
            magnitude: nu.norm() * n / gamma.abs(),
            threshold: SINGULAR_TOLERANCE * s.diameter(),
        });
    }
    let u0 = n * nu.norm() / gamma.abs();
    let u = s.z[1..]
        .iter()
        .map(|z| u0 / (n * nu) * (I * gamma * (z - s.z[0]) - nu))
        .collect();
    UState::new(u0, u)
}

/// Standard gauge: `z₀ = 0`, `zₙ = uₙ + u₀/N`.
pub fn section(us: &UState, g: &Strengths) -> Result<FullState> {
    if us.n() != g.n_sat() {
        return Err(Error::Invalid(format!(
            "{} reduced coordinates for {} satellites",
            us.n(),
            g.n_sat()
        )));
    }
    let shift = us.rate();
    let mut z = Vec::with_capacity(us.n() + 1);
    z.push(ZERO);
    z.extend(us.u.iter().map(|x| x + shift));
    check_separation(&z, vortex_core::COLLISION_GUARD)?;
    Ok(FullState::new(z))
}

/// The group element carrying `section(project(s))` onto `s`.
pub fn gauge_of(s: &FullState, g: &Strengths) -> Result<SE2Element> {
    check_family(s, g)?;
    let sum = sector_sum(s);
    let threshold = SINGULAR_TOLERANCE * s.diameter();
    if !(sum.norm() > threshold) {
        return Err(Error::SingularSector {
            magnitude: sum.norm(),
            threshold,
        });
    }
    Ok(SE2Element::new(sum, s.z[0]))
}

/// `μ = (Γ/2N)Σ|uₙ|² + Γu₀²/2N²`, `ν = iΓu₀/N`.
pub fn gauge_momentum(us: &UState, g: &Strengths) -> Se2Momentum {
    let gamma = g.gamma();
    let n = us.n() as f64;
    let s2: f64 = us.u.iter().map(|x| x.norm_sqr()).sum();
    Se2Momentum {
        mu: gamma / (2.0 * n) * s2 + gamma * us.u0 * us.u0 / (2.0 * n * n),
        nu: I * gamma * us.u0 / n,
    }
}

/// Constant bracket table of the reduced coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UBracketTable {
    /// `{u_m, u_n}`.
    pub u_u: Vec<Vec<Complex64>>,
    /// `{u_m, ū_n}`.
    pub u_ubar: Vec<Vec<Complex64>>,
    /// `{u_m, u₀}`.
    pub u_u0: Vec<Complex64>,
}

/// `{u_m, ū_n} = −2i(1/Γ − Nδ_{mn}/Γ)`, all other entries zero.
pub fn bracket_structure(g: &Strengths) -> UBracketTable {
    let n = g.n_sat();
    let gamma = g.gamma();
    let u_ubar = (0..n)
        .map(|m| {
            (0..n)
                .map(|k| {
                    let delta = if m == k { n as f64 } else { 0.0 };
                    -2.0 * I * (1.0 - delta) / gamma
                })
                .collect()
        })
        .collect();
    UBracketTable {
        u_u: vec![vec![ZERO; n]; n],
        u_ubar,
        u_u0: vec![ZERO; n],
    }
}

/// Bracket table of the canonical coordinates `v₁, v₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VBracketTable {
    /// `{v₁, v̄₁} = {v₂, v̄₂}`.
    pub v_vbar: Complex64,
    /// `{v₁, v̄₂} = {v₂, v̄₁}`.
    pub v1_v2bar: Complex64,
    /// `{v₁, v₂}`.
    pub v1_v2: Complex64,
    /// Coefficient `c` in `{f, g} = −2ic Σ(∂f/∂vₙ ∂g/∂v̄ₙ − ∂f/∂v̄ₙ ∂g/∂vₙ)`.
    pub coefficient: f64,
}

pub fn v_bracket_structure(g: &Strengths) -> VBracketTable {
    let coefficient = -1.0 / g.gamma();
    VBracketTable {
        v_vbar: -2.0 * I * coefficient,
        v1_v2bar: ZERO,
        v1_v2: ZERO,
        coefficient,
    }
}

fn require_three(n: usize) -> Result<()> {
    if n != 3 {
        return Err(Error::Invalid(format!(
            "canonical v-coordinates need N = 3, got {n}"
        )));
    }
    Ok(())
}

/// `v₁ = (u₁ + θ²u₂ + θu₃)/3`, `v₂ = (u₁ + θu₂ + θ²u₃)/3`, `u = u₀/3`.
pub fn to_v(us: &UState) -> Result<VState> {
    require_three(us.n())?;
    let t = theta(3);
    let t2 = t * t;
    let [a, b, c] = [us.u[0], us.u[1], us.u[2]];
    Ok(VState {
        v1: (a + t2 * b + t * c) / 3.0,
        v2: (a + t * b + t2 * c) / 3.0,
        u: us.u0 / 3.0,
    })
}

/// `u₁ = v₁ + v₂`, `u₂ = θv₁ + θ²v₂`, `u₃ = θ²v₁ + θv₂`, `u₀ = 3u`.
pub fn from_v(vs: &VState) -> UState {
    let t = theta(3);
    let t2 = t * t;
    UState {
        u0: 3.0 * vs.u,
        u: vec![
            vs.v1 + vs.v2,
            t * vs.v1 + t2 * vs.v2,
            t2 * vs.v1 + t * vs.v2,
        ],
    }
}

/// Matrix taking `(v̊, v₁, …, v_{N−1})` to `(u₁, …, u_N)`.
pub fn forward_matrix(n: usize) -> Vec<Vec<Complex64>> {
    let t = theta(n);
    let powers: Vec<Complex64> = (1..n).map(|k| t.powu(k as u32)).collect();
    let mut m = vec![vec![ZERO; n]; n];
    for row in m.iter_mut() {
        row[0] = Complex64::new(1.0, 0.0);
    }
    for col in 1..n {
        m[0][col] = Complex64::new(1.0, 0.0);
        let shift = col - 1;
        for r in 1..n {
            // right rotation of (θ, …, θ^{N−1}) by `shift`
            let src = (r - 1 + (n - 1) - shift) % (n - 1);
            m[r][col] = powers[src];
        }
    }
    m
}

/// Inverse of [`forward_matrix`], assembled from `a = −1/(1−θ)`, `b = θ/(1−θ)`.
pub fn inverse_matrix(n: usize) -> Vec<Vec<Complex64>> {
    let t = theta(n);
    let a = -1.0 / (1.0 - t);
    let b = t / (1.0 - t);
    let nf = n as f64;
    let one = Complex64::new(1.0, 0.0);
    let mut e = vec![one; n - 1];
    e[0] = one + nf * a;
    e[1] = one + nf * b;
    let mut m = vec![vec![ZERO; n]; n];
    for row in m.iter_mut() {
        row[0] = one / nf;
    }
    for col in 1..n {
        m[0][col] = one / nf;
        let shift = col - 1;
        for r in 1..n {
            let src = (r - 1 + (n - 1) - shift) % (n - 1);
            m[r][col] = e[src] / nf;
        }
    }
    m
}

fn mat_vec(m: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// `(v̊, v₁, …, v_{N−1})` from `(u₁, …, u_N)`; `v̊` is the mean of `u`.
pub fn to_v_general(u: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    if n < 3 || u.len() != n {
        return Err(Error::Invalid(format!("need N >= 3 and {n} coordinates")));
    }
    Ok(mat_vec(&inverse_matrix(n), u))
}

pub fn from_v_general(v: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    if n < 3 || v.len() != n {
        return Err(Error::Invalid(format!("need N >= 3 and {n} coordinates")));
    }
    Ok(mat_vec(&forward_matrix(n), v))
}

fn pack_u(us: &UState, y: &mut [f64]) {
    for (k, x) in us.u.iter().enumerate() {
        y[2 * k] = x.re;
        y[2 * k + 1] = x.im;
    }
}

fn unpack_u(u0: f64, y: &[f64], n: usize) -> UState {
    UState {
        u0,
        u: (0..n)
            .map(|k| Complex64::new(y[2 * k], y[2 * k + 1]))
            .collect(),
    }
}

/// Lifts a reduced trajectory to the ambient space as `g(t)·ι(c(t))`.
///
/// The reduced state is co-integrated with the gauge `g = (A, a)`, where
/// `Ȧ = iu_ξA`, `ȧ = Av_ξ` and `ξ` matches the ambient velocity at the section.
/// Output is sampled at `c.times`, starting from the gauge `g0`.
pub fn reconstruct(
    c: &Trajectory<UState>,
    g: &Strengths,
    g0: &SE2Element,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<FullState>> {
    let first = c
        .states
        .first()
        .ok_or_else(|| Error::Invalid("empty reduced trajectory".into()))?;
    let n = first.n();
    let u0 = first.u0;
    section(first, g)?;
    let dim = 2 * n + 4;
    let mut y0 = vec![0.0; dim];
    pack_u(first, &mut y0);
    y0[2 * n] = g0.rot.re;
    y0[2 * n + 1] = g0.rot.im;
    y0[2 * n + 2] = g0.trans.re;
    y0[2 * n + 3] = g0.trans.im;

    let guard = cfg.collision_guard;
    let field = |_t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let us = unpack_u(u0, y, n);
        let du = reduced_dynamics::u_field(&us, g, guard)?;
        let iota = section(&us, g)?;
        let x = vortex_core::vector_field(&iota, g)?;
        let v_xi = x[0];
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 1..=n {
            let r = x[k] - v_xi - du[k - 1];
            let gen = I * iota.z[k];
            num += (r * gen.conj()).re;
            den += gen.norm_sqr();
        }
        let u_xi = num / den;
        let rot = Complex64::new(y[2 * n], y[2 * n + 1]);
        let d_rot = I * u_xi * rot;
        let d_trans = rot * v_xi;
        for (k, d) in du.iter().enumerate() {
            dy[2 * k] = d.re;
            dy[2 * k + 1] = d.im;
        }
        dy[2 * n] = d_rot.re;
        dy[2 * n + 1] = d_rot.im;
        dy[2 * n + 2] = d_trans.re;
        dy[2 * n + 3] = d_trans.im;
        Ok(())
    };
    let t0 = c.times[0];
    let t1 = *c.times.last().unwrap_or(&t0);
    let sol = integrate::integrate(field, &y0, (t0, t1), cfg)?;

    let mut out = Trajectory {
        times: Vec::with_capacity(c.len()),
        states: Vec::with_capacity(c.len()),
        energy: Vec::with_capacity(c.len()),
        momentum: Vec::with_capacity(c.len()),
    };
    for &t in &c.times {
        let y = sol.at(t)?;
        let us = unpack_u(u0, &y, n);
        let gauge = SE2Element::new(
            Complex64::new(y[2 * n], y[2 * n + 1]),
            Complex64::new(y[2 * n + 2], y[2 * n + 3]),
        );
        let s = section(&us, g)?.act(&gauge);
        out.energy.push(vortex_core::hamiltonian(&s, g)?);
        out.momentum.push(vortex_core::momentum(&s, g));
        out.times.push(t);
        out.states.push(s);
    }
    Ok(out)
}
