//! The rigidly rotating configurations `O` (equilateral ring about the
//! central vortex) and `Y` (collinear pair with two outer satellites), their
//! linearizations and geometric diagnostics.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduced_dynamics;
use crate::resolution::{theta, VState};
use crate::se2::{SE2Element, Se2Vector};
use crate::vortex_core::{self, FullState, Strengths};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    O,
    Y,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "O" | "o" => Ok(Family::O),
            "Y" | "y" => Ok(Family::Y),
            other => Err(Error::Invalid(format!(
                "unknown family {other:?}, expected O or Y"
            ))),
        }
    }
}

/// A relative equilibrium with its generator and momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReqSpec {
    pub family: Family,
    pub alpha_e: f64,
    pub gamma: f64,
    pub u_e: f64,
    pub v_e: Complex64,
    pub mu_e: f64,
    pub z: FullState,
    pub v: VState,
    pub center: Complex64,
}

impl ReqSpec {
    pub fn strengths(&self) -> Strengths {
        Strengths::ring(self.gamma, 3).expect("validated at construction")
    }

    pub fn generator(&self) -> Se2Vector {
        Se2Vector::new(self.u_e, self.v_e)
    }

    /// The same motion with `z₀` moved to the origin.
    pub fn standard_gauge(&self) -> ReqSpec {
        let shift = SE2Element::translation(-self.z.z[0]);
        let center = shift.act(self.center);
        ReqSpec {
            z: self.z.act(&shift),
            center,
            v_e: -I * self.u_e * center,
            ..self.clone()
        }
    }
}

/// `r₁ = (1 + √3 − ⁴√12)/2`.
pub fn r1() -> f64 {
    (1.0 + 3f64.sqrt() - 12f64.powf(0.25)) / 2.0
}

/// `r₂ = 1/r₁`.
pub fn r2() -> f64 {
    (1.0 + 3f64.sqrt() + 12f64.powf(0.25)) / 2.0
}

fn check_params(alpha_e: f64, gamma: f64) -> Result<()> {
    if !(alpha_e > 0.0 && alpha_e.is_finite()) {
        return Err(Error::Invalid("alpha_e must be positive".into()));
    }
    if !(gamma != 0.0 && gamma.is_finite()) {
        return Err(Error::Invalid("gamma must be nonzero".into()));
    }
    Ok(())
}

/// `z = α(0, 1, θ, θ²)` rotating about the origin at `u_e = Γ/3πα²`.
pub fn make_o(alpha_e: f64, gamma: f64) -> Result<ReqSpec> {
    check_params(alpha_e, gamma)?;
    let t = theta(3);
    let a = Complex64::new(alpha_e, 0.0);
    Ok(ReqSpec {
        family: Family::O,
        alpha_e,
        gamma,
        u_e: gamma / (3.0 * PI * alpha_e * alpha_e),
        v_e: ZERO,
        mu_e: gamma * alpha_e * alpha_e / 2.0,
        z: FullState::new(vec![ZERO, a, a * t, a * t * t]),
        v: VState::new(a, ZERO, 0.0),
        center: ZERO,
    })
}

/// `v = (α/√(1+r₁²))(1, r₁)`, placed with its center of rotation at the origin.
pub fn make_y(alpha_e: f64, gamma: f64) -> Result<ReqSpec> {
    check_params(alpha_e, gamma)?;
    let r = r1();
    let v1 = alpha_e / (1.0 + r * r).sqrt();
    let s3 = 3f64.sqrt();
    let z1 = Complex64::new((r + 1.0) * v1, 0.0);
    let z2 = Complex64::new(-(r + 1.0) / 2.0, s3 * (1.0 - r) / 2.0) * v1;
    let center = Complex64::new(0.5 * (r + 1.0) * v1, 0.0);
    let z = vec![ZERO - center, z1 - center, z2 - center, z2.conj() - center];
    Ok(ReqSpec {
        family: Family::Y,
        alpha_e,
        gamma,
        u_e: gamma / (3.0 * PI * alpha_e * alpha_e),
        v_e: ZERO,
        mu_e: gamma * alpha_e * alpha_e / 2.0,
        z: FullState::new(z),
        v: VState::new(Complex64::new(v1, 0.0), Complex64::new(r * v1, 0.0), 0.0),
        center: ZERO,
    })
}

pub fn make(family: Family, alpha_e: f64, gamma: f64) -> Result<ReqSpec> {
    match family {
        Family::O => make_o(alpha_e, gamma),
        Family::Y => make_y(alpha_e, gamma),
    }
}

/// Positive roots of `r² − Rr + 1 = 0` where `R² − 2R cos3θ − 2 = 0`, `R > 0`.
pub fn solve_radial(cos3theta: f64) -> Vec<f64> {
    let big_r = cos3theta + (cos3theta * cos3theta + 2.0).sqrt();
    let disc = big_r * big_r - 4.0;
    if big_r <= 0.0 || disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    let mut roots: Vec<f64> = [(big_r - s) / 2.0, (big_r + s) / 2.0]
        .into_iter()
        .filter(|r| *r > 0.0)
        .collect();
    roots.dedup();
    roots
}

/// Residuals of the polar equilibrium equations at `v₂/v₁ = r e^{iθ}`.
pub fn radial_residual(r: f64, theta_angle: f64) -> (f64, f64) {
    let (c3, s3) = ((3.0 * theta_angle).cos(), (3.0 * theta_angle).sin());
    let (c6, s6) = ((6.0 * theta_angle).cos(), (6.0 * theta_angle).sin());
    (
        r.powi(4) * c6 - 2.0 * r * (r * r + 1.0) * c3 + 1.0,
        r.powi(3) * s6 - 2.0 * (r * r + 1.0) * s3,
    )
}

/// `(v̇₁ − iu_e v₁, v̇₂ − iu_e v₂)` for the boundary field.
pub fn v_req_residual(vs: &VState, u_e: f64, g: &Strengths) -> Result<(Complex64, Complex64)> {
    let boundary = VState::new(vs.v1, vs.v2, 0.0);
    let (d1, d2) = reduced_dynamics::v_field(&boundary, g)?;
    Ok((d1 - I * u_e * vs.v1, d2 - I * u_e * vs.v2))
}

/// Jacobian of the rotating-frame field and its spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    /// Row-major, coordinates `(x₀, y₀, x₁, y₁, …)`.
    pub jacobian: Vec<Vec<f64>>,
    pub eigenvalues: Vec<Complex64>,
}

impl Linearization {
    pub fn trace(&self) -> f64 {
        (0..self.jacobian.len()).map(|k| self.jacobian[k][k]).sum()
    }
}

/// Analytic Jacobian of `ż − (iuz + v)` in real coordinates.
pub fn residual_jacobian(s: &FullState, g: &Strengths, xi: Se2Vector) -> Result<Vec<Vec<f64>>> {
    let d = vortex_core::field_derivatives(s, g)?;
    let n = s.len();
    let mut j = vec![vec![0.0; 2 * n]; 2 * n];
    for a in 0..n {
        for b in 0..n {
            let dd = d[a][b];
            j[2 * a][2 * b] = dd.re;
            j[2 * a][2 * b + 1] = dd.im;
            j[2 * a + 1][2 * b] = dd.im;
            j[2 * a + 1][2 * b + 1] = -dd.re;
        }
        j[2 * a][2 * a + 1] += xi.u;
        j[2 * a + 1][2 * a] -= xi.u;
    }
    Ok(j)
}

/// Five-point central differences with one Richardson step, for cross-checks.
pub fn residual_jacobian_fd(
    s: &FullState,
    g: &Strengths,
    xi: Se2Vector,
    h: f64,
) -> Result<Vec<Vec<f64>>> {
    let base = s.to_flat();
    let dim = base.len();
    let eval = |y: &[f64]| -> Result<Vec<f64>> {
        let st = FullState::from_flat(y);
        let r = vortex_core::req_residual(&st, g, xi)?;
        Ok(r.iter().flat_map(|c| [c.re, c.im]).collect())
    };
    let stencil = |k: usize, h: f64| -> Result<Vec<f64>> {
        let mut out = vec![0.0; dim];
        let offsets = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
        for (o, w) in offsets {
            let mut y = base.clone();
            y[k] += o * h;
            let f = eval(&y)?;
            for i in 0..dim {
                out[i] += w * f[i] / (12.0 * h);
            }
        }
        Ok(out)
    };
    let mut j = vec![vec![0.0; dim]; dim];
    for k in 0..dim {
        let coarse = stencil(k, h)?;
        let fine = stencil(k, h / 2.0)?;
        for i in 0..dim {
            j[i][k] = fine[i] + (fine[i] - coarse[i]) / 15.0;
        }
    }
    Ok(j)
}

pub fn eigenvalues(j: &[Vec<f64>]) -> Vec<Complex64> {
    let n = j.len();
    let m = DMatrix::from_fn(n, n, |r, c| j[r][c]);
    let mut ev: Vec<Complex64> = m
        .complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

pub fn linearize(s: &FullState, g: &Strengths, xi: Se2Vector) -> Result<Linearization> {
    let jacobian = residual_jacobian(s, g, xi)?;
    let eigenvalues = eigenvalues(&jacobian);
    Ok(Linearization {
        jacobian,
        eigenvalues,
    })
}

/// Outer-to-inner radius ratio and the angle subtended at the center by the
/// outer pair, in degrees.
pub fn y_geometry(spec: &ReqSpec) -> Result<(f64, f64)> {
    if spec.family != Family::Y {
        return Err(Error::Invalid(
            "geometry is defined for the Y family".into(),
        ));
    }
    let c = spec.center;
    let z = &spec.z.z;
    let ratio = (z[2] - c).norm() / (z[0] - c).norm();
    let angle = ((z[2] - c) / (z[3] - c)).arg().abs().to_degrees();
    Ok((ratio, angle))
}
