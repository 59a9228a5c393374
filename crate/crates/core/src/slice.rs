//! Slice coordinates `(θ, j, q, p)` at the equilateral equilibrium, the
//! truncated Hamiltonians, the `(θ, k, w)` change of variables and the linear
//! estimate of the return map.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resolution::VState;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceState {
    pub theta: f64,
    pub j: f64,
    pub q: f64,
    pub p: f64,
}

impl SliceState {
    pub fn new(theta: f64, j: f64, q: f64, p: f64) -> Self {
        SliceState { theta, j, q, p }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.q, self.p)
    }

    fn to_array(self) -> [f64; 4] {
        [self.theta, self.j, self.q, self.p]
    }

    fn from_array(a: [f64; 4]) -> Self {
        SliceState::new(a[0], a[1], a[2], a[3])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WState {
    pub theta: f64,
    pub k: f64,
    pub w: Complex64,
}

/// Linear estimate of the return map on `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareEstimate {
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// Acts on `(Q, P)` column vectors.
    pub matrix: [[f64; 2]; 2],
}

fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// `v₁ = f e^{iθ}`, `v₂ = (q − ip) e^{iθ}` with `f = √(α² + 2j − q² − p²)`.
pub fn from_slice(ss: &SliceState, alpha_e: f64, u: f64) -> Result<VState> {
    let f2 = alpha_e * alpha_e + 2.0 * ss.j - ss.q * ss.q - ss.p * ss.p;
    if !(f2 > 0.0) {
        return Err(Error::Chart(format!(
            "alpha^2 + 2j - q^2 - p^2 = {f2} is not positive"
        )));
    }
    let e = Complex64::from_polar(1.0, ss.theta);
    Ok(VState::new(f2.sqrt() * e, ss.z().conj() * e, u))
}

/// `q + ip = v₁v̄₂/|v₁|`, `j = ½(|v₁|² + |v₂|² − α²)`, `θ = arg v₁`.
pub fn to_slice(vs: &VState, alpha_e: f64) -> Result<SliceState> {
    if !((vs.v1 - alpha_e).norm() < alpha_e) {
        return Err(Error::Chart(format!(
            "|v1 - alpha| = {} is not below alpha = {alpha_e}",
            (vs.v1 - alpha_e).norm()
        )));
    }
    let r = vs.v1.norm();
    let z = vs.v1 * vs.v2.conj() / r;
    Ok(SliceState {
        theta: vs.v1.arg(),
        j: 0.5 * (r * r + vs.v2.norm_sqr() - alpha_e * alpha_e),
        q: z.re,
        p: z.im,
    })
}

fn jacobian4<F>(f: F, x: [f64; 4], h: f64) -> Result<[[f64; 4]; 4]>
where
    F: Fn([f64; 4]) -> Result<[f64; 4]>,
{
    let mut d = [[0.0; 4]; 4];
    for k in 0..4 {
        let eval = |o: f64| {
            let mut y = x;
            y[k] += o * h;
            f(y)
        };
        let (m2, m1, p1, p2) = (eval(-2.0)?, eval(-1.0)?, eval(1.0)?, eval(2.0)?);
        for i in 0..4 {
            d[i][k] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
        }
    }
    Ok(d)
}

/// `blockdiag(J, J)` with `J = [[0, 1], [−1, 0]]`.
fn standard_form() -> [[f64; 4]; 4] {
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
}

fn pullback(d: &[[f64; 4]; 4], omega: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = 0.0;
            for i in 0..4 {
                for k in 0..4 {
                    acc += d[i][a] * omega[i][k] * d[k][b];
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

fn max_defect(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4], scale: f64) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..4 {
        for k in 0..4 {
            m = m.max((a[i][k] - b[i][k] * scale).abs());
        }
    }
    m
}

/// Max-norm distance between the pulled-back `v`-space form `−Γ(dx₁∧dy₁ + dx₂∧dy₂)`
/// and `Γ(dθ∧dj + dq∧dp)`, divided by `|Γ|`.
pub fn slice_symplectic_check(ss: &SliceState, alpha_e: f64, gamma: f64) -> Result<f64> {
    from_slice(ss, alpha_e, 0.0)?;
    let h = 1e-4 * alpha_e;
    let map = |x: [f64; 4]| -> Result<[f64; 4]> {
        let v = from_slice(&SliceState::from_array(x), alpha_e, 0.0)?;
        Ok([v.v1.re, v.v1.im, v.v2.re, v.v2.im])
    };
    let d = jacobian4(map, ss.to_array(), h)?;
    let mut omega_v = standard_form();
    omega_v.iter_mut().flatten().for_each(|x| *x *= -gamma);
    let pulled = pullback(&d, &omega_v);
    Ok(max_defect(&pulled, &standard_form(), gamma) / gamma.abs())
}

/// Expansion terms of the slice Hamiltonian, `terms[r][s]` multiplying `ε^r u^s`.
pub fn trunc0_terms(ss: &SliceState, u: f64, alpha_e: f64, gamma: f64) -> [[f64; 3]; 5] {
    let z = ss.z();
    let e = Complex64::from_polar(1.0, ss.theta);
    let a = alpha_e;
    let g2 = gamma * gamma;
    let m = 2.0 * ss.j - z.norm_sqr();
    let mut t = [[0.0; 3]; 5];
    t[0][0] = g2 * a.ln() / (3.0 * PI);
    t[1][1] = -g2 * (e * z).re / (2.0 * PI * a * a) * u;
    t[2][0] = g2 * m / (6.0 * PI * a * a);
    t[2][2] = -3.0 * g2 * (z * z * e * e).re / (4.0 * PI * a.powi(4)) * u * u;
    t[3][0] = 2.0 * g2 * (z * z * z).re / (9.0 * PI * a.powi(3));
    t[3][1] = g2 * m * (e * z).re / (2.0 * PI * a.powi(4)) * u;
    t[4][0] = -g2 * m * m / (12.0 * PI * a.powi(4));
    t[4][1] = g2 * (z.powu(4) * e).re / (2.0 * PI * a.powi(5)) * u;
    t[4][2] = 3.0 * g2 * m * (z * z * e * e).re / (2.0 * PI * a.powi(6)) * u * u;
    t
}

/// Expansion of the reduced Hamiltonian at `O` through `ε^order`, `order ∈ {2, 3, 4}`.
pub fn h_slice_trunc0(
    ss: &SliceState,
    u: f64,
    alpha_e: f64,
    gamma: f64,
    epsilon_order: usize,
) -> Result<f64> {
    if !(2..=4).contains(&epsilon_order) {
        return Err(Error::Invalid(format!(
            "epsilon order {epsilon_order} is not one of 2, 3, 4"
        )));
    }
    let t = trunc0_terms(ss, u, alpha_e, gamma);
    Ok(t[..=epsilon_order].iter().flatten().sum())
}

/// `j − ½|z|² − (3u/2)Re(e^{iθ}z) + (2/3α)Re(z³)` in rescaled time.
pub fn h_slice_trunc1(ss: &SliceState, u: f64, alpha_e: f64) -> f64 {
    let z = ss.z();
    let e = Complex64::from_polar(1.0, ss.theta);
    ss.j - 0.5 * z.norm_sqr() - 1.5 * u * (e * z).re + 2.0 * (z * z * z).re / (3.0 * alpha_e)
}

/// `k = j + ½|z|²`, `w = e^{iθ}z + 3u/4`.
pub fn to_w(ss: &SliceState, u: f64) -> WState {
    let z = ss.z();
    WState {
        theta: ss.theta,
        k: ss.j + 0.5 * z.norm_sqr(),
        w: Complex64::from_polar(1.0, ss.theta) * z + 0.75 * u,
    }
}

pub fn from_w(ws: &WState, u: f64) -> SliceState {
    let z = Complex64::from_polar(1.0, -ws.theta) * (ws.w - 0.75 * u);
    SliceState {
        theta: wrap_angle(ws.theta),
        j: ws.k - 0.5 * z.norm_sqr(),
        q: z.re,
        p: z.im,
    }
}

/// Defect of `dθ∧dk + dQ∧dP = dθ∧dj + dq∧dp` at `ss`.
pub fn w_symplectic_defect(ss: &SliceState, u: f64) -> Result<f64> {
    let map = |x: [f64; 4]| -> Result<[f64; 4]> {
        let w = to_w(&SliceState::from_array(x), u);
        Ok([w.theta, w.k, w.w.re, w.w.im])
    };
    let d = jacobian4(map, ss.to_array(), 1e-4)?;
    let pulled = pullback(&d, &standard_form());
    Ok(max_defect(&pulled, &standard_form(), 1.0))
}

fn frequencies(u: f64, alpha_e: f64) -> Result<(f64, f64)> {
    let lhs = 36.0 * u * u;
    let rhs = alpha_e * alpha_e;
    if lhs > rhs {
        return Err(Error::Hyperbolic { lhs, rhs });
    }
    let x = lhs / rhs;
    let root = (1.0 - x).sqrt();
    // 1 − √(1 − x) = x / (1 + √(1 − x))
    let omega_minus = 0.5 * x / (1.0 + root);
    Ok((1.0 - omega_minus, omega_minus))
}

/// `ω± = (1 ± √(1 − 36u²/α²))/2` and `P·A(2πω⁻)·P⁻¹`.
pub fn poincare_estimate(u: f64, alpha_e: f64) -> Result<PoincareEstimate> {
    let (omega_plus, omega_minus) = frequencies(u, alpha_e)?;
    let kappa = 6.0 * u / alpha_e;
    if (1.0 - kappa.abs()) <= 0.0 {
        return Err(Error::Degenerate(
            "36u^2 = alpha^2: the estimate is singular".into(),
        ));
    }
    let (s, c) = (2.0 * PI * omega_minus).sin_cos();
    let r = ((1.0 - kappa) / (1.0 + kappa)).sqrt();
    Ok(PoincareEstimate {
        omega_plus,
        omega_minus,
        matrix: [[c, s * r], [-s / r, c]],
    })
}

/// `w(t) = (A√ω⁻ e^{−iω⁺t} − Ā√ω⁺ e^{−iω⁻t}) e^{2it}`.
pub fn w_solution(t: f64, a_const: Complex64, u: f64, alpha_e: f64) -> Result<Complex64> {
    let (op, om) = frequencies(u, alpha_e)?;
    let e = |w: f64| Complex64::from_polar(1.0, w * t);
    Ok((a_const * om.sqrt() * e(-op) - a_const.conj() * op.sqrt() * e(-om)) * e(2.0))
}

/// `dw/dt = 2iw + (3iu/α)e^{3it}w̄`.
pub fn w_equation(t: f64, w: Complex64, u: f64, alpha_e: f64) -> Complex64 {
    2.0 * I * w + 3.0 * I * u / alpha_e * Complex64::from_polar(1.0, 3.0 * t) * w.conj()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_maps_to_o() {
        let vs = from_slice(&SliceState::new(0.0, 0.0, 0.0, 0.0), 1.5, 0.0).unwrap();
        assert_eq!(vs.v1, Complex64::new(1.5, 0.0));
        assert_eq!(vs.v2, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn chart_violations() {
        assert!(from_slice(&SliceState::new(0.0, -1.0, 0.5, 0.5), 1.0, 0.0).is_err());
        let vs = VState::new(Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
        assert!(matches!(to_slice(&vs, 1.0), Err(Error::Chart(_))));
    }

    #[test]
    fn trunc1_special_values() {
        assert_eq!(
            h_slice_trunc1(&SliceState::new(0.3, 0.0, 0.0, 0.0), 0.1, 1.0),
            0.0
        );
        let (j, q, a) = (0.2, 0.3, 1.7);
        let h = h_slice_trunc1(&SliceState::new(0.9, j, q, 0.0), 0.0, a);
        assert!((h - (j - 0.5 * q * q + 2.0 * q.powi(3) / (3.0 * a))).abs() < 1e-15);
    }

    #[test]
    fn w_origin() {
        let w = to_w(&SliceState::new(0.0, 0.0, 0.0, 0.0), 0.2);
        assert_eq!(w.k, 0.0);
        assert!((w.w - Complex64::new(0.15, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn estimate_special_values() {
        let e = poincare_estimate(0.0, 1.0).unwrap();
        assert_eq!((e.omega_plus, e.omega_minus), (1.0, 0.0));
        assert_eq!(e.matrix, [[1.0, 0.0], [0.0, 1.0]]);
        let e = poincare_estimate(0.075, 2.0).unwrap();
        assert!((e.omega_minus - 0.0128206).abs() < 1e-7);
        assert!((e.matrix[0][0] - 0.99676).abs() < 1e-5);
        assert!((e.matrix[0][1] - 0.0640).abs() < 1e-4);
        assert!((e.matrix[1][0] + 0.10117).abs() < 1e-5);
        assert!(matches!(
            poincare_estimate(0.2, 1.0),
            Err(Error::Hyperbolic { .. })
        ));
    }

    #[test]
    fn bad_order() {
        let ss = SliceState::new(0.0, 0.0, 0.0, 0.0);
        assert!(h_slice_trunc0(&ss, 0.0, 1.0, 1.0, 5).is_err());
    }
}
