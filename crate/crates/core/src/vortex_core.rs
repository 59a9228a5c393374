//! The ambient point-vortex system: energy, velocities, momentum map and the
//! relative-equilibrium residual.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{self, IntegratorConfig};
use crate::se2::{SE2Element, Se2Momentum, Se2Vector};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default relative separation below which two vortices count as collided.
pub const COLLISION_GUARD: f64 = 1e-9;

/// Vortex strengths, either the central-plus-ring family or an arbitrary list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strengths {
    gamma: f64,
    n_sat: usize,
    values: Vec<f64>,
    family: bool,
}

impl Strengths {
    /// `Γ₀ = Γ` and `Γₙ = −Γ/N` for `n = 1..N`.
    pub fn ring(gamma: f64, n_sat: usize) -> Result<Self> {
        if !(gamma.is_finite() && gamma != 0.0) {
            return Err(Error::Invalid("gamma must be finite and nonzero".into()));
        }
        if n_sat == 0 {
            return Err(Error::Invalid("at least one satellite is required".into()));
        }
        let mut values = vec![-gamma / n_sat as f64; n_sat + 1];
        values[0] = gamma;
        Ok(Strengths {
            gamma,
            n_sat,
            values,
            family: true,
        })
    }

    pub fn general(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|g| !(g.is_finite() && *g != 0.0)) {
            return Err(Error::Invalid(
                "strengths must be finite and nonzero".into(),
            ));
        }
        Ok(Strengths {
            gamma: values[0],
            n_sat: values.len() - 1,
            values,
            family: false,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_sat(&self) -> usize {
        self.n_sat
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_ring_family(&self) -> bool {
        self.family
    }

    /// Total circulation; exactly zero for the central-plus-ring family.
    pub fn total(&self) -> f64 {
        if self.family {
            0.0
        } else {
            self.values.iter().sum()
        }
    }
}

/// Vortex positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullState {
    pub z: Vec<Complex64>,
}

impl FullState {
    pub fn new(z: Vec<Complex64>) -> Self {
        FullState { z }
    }

    /// Interleaved `[x0, y0, x1, y1, ...]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.z.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn from_flat(y: &[f64]) -> Self {
        FullState {
            z: y.chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        }
    }

    pub fn act(&self, g: &SE2Element) -> FullState {
        FullState {
            z: self.z.iter().map(|z| g.act(*z)).collect(),
        }
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.z)
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// Largest pairwise distance.
pub fn diameter(z: &[Complex64]) -> f64 {
    let mut d: f64 = 0.0;
    for m in 0..z.len() {
        for n in m + 1..z.len() {
            d = d.max((z[m] - z[n]).norm());
        }
    }
    d
}

/// Errors when two points are closer than `guard` times the diameter.
pub fn check_separation(z: &[Complex64], guard: f64) -> Result<()> {
    let threshold = guard * diameter(z);
    for m in 0..z.len() {
        for n in m + 1..z.len() {
            let d = (z[m] - z[n]).norm();
            if !(d > threshold) || d == 0.0 {
                return Err(Error::Collision {
                    distance: d,
                    threshold,
                });
            }
        }
    }
    Ok(())
}

fn check_len(s: &FullState, g: &Strengths) -> Result<()> {
    if s.len() != g.len() {
        return Err(Error::Invalid(format!(
            "{} positions for {} strengths",
            s.len(),
            g.len()
        )));
    }
    Ok(())
}

/// `H = −(1/8π) Σ_{m≠n} Γ_m Γ_n ln|z_m − z_n|²`.
pub fn hamiltonian(s: &FullState, g: &Strengths) -> Result<f64> {
    check_len(s, g)?;
    check_separation(&s.z, COLLISION_GUARD)?;
    let gv = g.values();
    let mut h = 0.0;
    for m in 0..s.len() {
        for n in m + 1..s.len() {
            h += gv[m] * gv[n] * (s.z[m] - s.z[n]).norm_sqr().ln();
        }
    }
    Ok(-h / (4.0 * PI))
}

fn field_unchecked(z: &[Complex64], gv: &[f64], out: &mut [Complex64]) {
    for n in 0..z.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..z.len() {
            if m != n {
                acc += gv[m] / (z[n] - z[m]).conj();
            }
        }
        out[n] = I * acc / (2.0 * PI);
    }
}

/// `dz_n/dt = (i/2π) Σ_{m≠n} Γ_m (z_n − z_m)/|z_n − z_m|²`.
pub fn vector_field(s: &FullState, g: &Strengths) -> Result<Vec<Complex64>> {
    check_len(s, g)?;
    check_separation(&s.z, COLLISION_GUARD)?;
    let mut out = vec![Complex64::new(0.0, 0.0); s.len()];
    field_unchecked(&s.z, g.values(), &mut out);
    Ok(out)
}

/// `∂ż_n/∂z̄_m`; the velocities depend on the conjugate positions only.
pub fn field_derivatives(s: &FullState, g: &Strengths) -> Result<Vec<Vec<Complex64>>> {
    check_len(s, g)?;
    check_separation(&s.z, COLLISION_GUARD)?;
    let n_v = s.len();
    let gv = g.values();
    let c = I / (2.0 * PI);
    let mut d = vec![vec![Complex64::new(0.0, 0.0); n_v]; n_v];
    for n in 0..n_v {
        for m in 0..n_v {
            if m == n {
                continue;
            }
            let w = (s.z[n] - s.z[m]).conj();
            let t = c * gv[m] / (w * w);
            d[n][m] += t;
            d[n][n] -= t;
        }
    }
    Ok(d)
}

/// `μ = −½ Σ Γ_n |z_n|²`, `ν = −i Σ Γ_n z_n`.
pub fn momentum(s: &FullState, g: &Strengths) -> Se2Momentum {
    let gv = g.values();
    let mu = -0.5
        * s.z
            .iter()
            .zip(gv)
            .map(|(z, g)| g * z.norm_sqr())
            .sum::<f64>();
    let nu = -I * s.z.iter().zip(gv).map(|(z, g)| *z * *g).sum::<Complex64>();
    Se2Momentum { mu, nu }
}

/// `σ(A, a) = −(Σ Γ_n)(½|a|², i a)`.
pub fn cocycle(gel: &SE2Element, g: &Strengths) -> Se2Momentum {
    let total = g.total();
    Se2Momentum {
        mu: -total * 0.5 * gel.trans.norm_sqr(),
        nu: -total * I * gel.trans,
    }
}

/// Velocity minus the rigid motion generated by `xi`.
pub fn req_residual(s: &FullState, g: &Strengths, xi: Se2Vector) -> Result<Vec<Complex64>> {
    let f = vector_field(s, g)?;
    Ok(f.iter()
        .zip(&s.z)
        .map(|(f, z)| f - xi.generator(*z))
        .collect())
}

/// A sampled solution together with per-sample diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub energy: Vec<f64>,
    pub momentum: Vec<Se2Momentum>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Real-vector form of the ambient field, for the integrator.
pub fn flow(g: &Strengths, guard: f64) -> impl FnMut(f64, &[f64], &mut [f64]) -> Result<()> + '_ {
    let n_v = g.len();
    let mut z = vec![Complex64::new(0.0, 0.0); n_v];
    let mut f = vec![Complex64::new(0.0, 0.0); n_v];
    move |_t, y, dy| {
        for (k, zk) in z.iter_mut().enumerate() {
            *zk = Complex64::new(y[2 * k], y[2 * k + 1]);
        }
        check_separation(&z, guard)?;
        field_unchecked(&z, g.values(), &mut f);
        for (k, fk) in f.iter().enumerate() {
            dy[2 * k] = fk.re;
            dy[2 * k + 1] = fk.im;
        }
        Ok(())
    }
}

/// Integrates the ambient system, recording every accepted step.
pub fn simulate(
    s0: &FullState,
    g: &Strengths,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<FullState>> {
    check_len(s0, g)?;
    check_separation(&s0.z, cfg.collision_guard)?;
    let sol = integrate::integrate(
        flow(g, cfg.collision_guard),
        &s0.to_flat(),
        (0.0, t_end),
        cfg,
    )?;
    let states: Vec<FullState> = sol.states.iter().map(|y| FullState::from_flat(y)).collect();
    let energy = states
        .iter()
        .map(|s| hamiltonian(s, g))
        .collect::<Result<Vec<_>>>()?;
    let momentum = states.iter().map(|s| momentum(s, g)).collect();
    Ok(Trajectory {
        times: sol.times,
        states,
        energy,
        momentum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_vortex_energy() {
        let g = Strengths::general(vec![1.0, -1.0]).unwrap();
        let s = FullState::new(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(hamiltonian(&s, &g).unwrap(), 0.0);
        let s = FullState::new(vec![c(0.0, 0.0), c(std::f64::consts::E, 0.0)]);
        assert!((hamiltonian(&s, &g).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn two_vortex_velocity() {
        let g = Strengths::general(vec![1.0, -1.0]).unwrap();
        let s = FullState::new(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let f = vector_field(&s, &g).unwrap();
        assert!((f[0] - c(0.0, 1.0 / (2.0 * PI))).norm() < 1e-15);
    }

    #[test]
    fn collision_is_typed() {
        let g = Strengths::ring(1.0, 3).unwrap();
        let s = FullState::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert!(matches!(hamiltonian(&s, &g), Err(Error::Collision { .. })));
        assert!(matches!(vector_field(&s, &g), Err(Error::Collision { .. })));
    }

    #[test]
    fn ring_family_totals_zero() {
        let g = Strengths::ring(0.7, 3).unwrap();
        assert_eq!(g.total(), 0.0);
        assert_eq!(g.values(), &[0.7, -0.7 / 3.0, -0.7 / 3.0, -0.7 / 3.0]);
        let gel = SE2Element::new(c(0.0, 1.0), c(3.0, -1.0));
        assert_eq!(cocycle(&gel, &g), Se2Momentum::default());
    }

    #[test]
    fn cocycle_by_substitution() {
        let g = Strengths::general(vec![1.0, 1.0]).unwrap();
        let gel = SE2Element::new(c(1.0, 0.0), c(2.0, 0.0));
        let s = cocycle(&gel, &g);
        assert_eq!(s.mu, -4.0);
        assert_eq!(s.nu, c(0.0, -4.0));
        assert_eq!(cocycle(&SE2Element::IDENTITY, &g).mu, 0.0);
    }

    #[test]
    fn momentum_at_origin_vanishes() {
        let g = Strengths::general(vec![1.0, 2.0]).unwrap();
        let s = FullState::new(vec![c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(momentum(&s, &g), Se2Momentum::default());
    }

    #[test]
    fn flat_round_trip() {
        let s = FullState::new(vec![c(1.0, 2.0), c(-3.0, 0.5)]);
        assert_eq!(FullState::from_flat(&s.to_flat()), s);
    }

    #[test]
    fn invalid_strengths() {
        assert!(Strengths::ring(0.0, 3).is_err());
        assert!(Strengths::ring(1.0, 0).is_err());
        assert!(Strengths::general(vec![1.0, 0.0]).is_err());
    }
}
