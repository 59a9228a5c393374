//! The planar Euclidean group in complex notation.
//!
//! A group element is a pair `(A, a)` with `|A| = 1` acting on the plane by
//! `z -> A z + a`. Algebra elements are `(u, v)` with `u` real and `v` complex;
//! dual elements are `(mu, nu)` paired by `mu u + nu . v`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this angular rate `exp` switches to its power series.
pub const EXP_SERIES_THRESHOLD: f64 = 1e-6;

/// `z . w = Re(z conj(w))`.
pub fn dot(z: Complex64, w: Complex64) -> f64 {
    (z * w.conj()).re
}

/// `z ^ w = -Im(z conj(w))`.
pub fn wedge(z: Complex64, w: Complex64) -> f64 {
    -(z * w.conj()).im
}

/// Group element `(A, a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SE2Element {
    /// Rotation part `A`, a unit complex number.
    pub rot: Complex64,
    /// Translation part `a`.
    pub trans: Complex64,
}

/// Algebra element `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Se2Vector {
    pub u: f64,
    pub v: Complex64,
}

/// Dual element `(mu, nu)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Se2Momentum {
    pub mu: f64,
    pub nu: Complex64,
}

impl SE2Element {
    pub const IDENTITY: SE2Element = SE2Element {
        rot: Complex64::new(1.0, 0.0),
        trans: Complex64::new(0.0, 0.0),
    };

    /// Builds `(A, a)`, rescaling `A` onto the unit circle.
    pub fn new(rot: Complex64, trans: Complex64) -> Self {
        SE2Element {
            rot: rot / rot.norm(),
            trans,
        }
    }

    pub fn rotation(angle: f64) -> Self {
        SE2Element {
            rot: Complex64::from_polar(1.0, angle),
            trans: Complex64::new(0.0, 0.0),
        }
    }

    pub fn translation(a: Complex64) -> Self {
        SE2Element {
            rot: Complex64::new(1.0, 0.0),
            trans: a,
        }
    }

    /// `(A, a)(B, b) = (AB, a + A b)`.
    pub fn compose(&self, other: &SE2Element) -> SE2Element {
        SE2Element::new(self.rot * other.rot, self.trans + self.rot * other.trans)
    }

    /// `(A, a)^-1 = (A^-1, -A^-1 a)`.
    pub fn inverse(&self) -> SE2Element {
        let inv = self.rot.conj();
        SE2Element::new(inv, -inv * self.trans)
    }

    pub fn act(&self, z: Complex64) -> Complex64 {
        self.rot * z + self.trans
    }

    pub fn exp(xi: Se2Vector) -> SE2Element {
        let u = xi.u;
        let rot = Complex64::from_polar(1.0, u);
        let trans = if u.abs() < EXP_SERIES_THRESHOLD {
            // v (e^{iu} - 1)/(iu) = v (1 + iu/2 - u^2/6 - iu^3/24 + u^4/120 + ...)
            let iu = I * u;
            let series =
                1.0 + iu / 2.0 + iu * iu / 6.0 + iu * iu * iu / 24.0 + iu * iu * iu * iu / 120.0;
            xi.v * series
        } else {
            (rot - 1.0) * xi.v / (I * u)
        };
        SE2Element { rot, trans }
    }

    /// `Ad_(A,a)(u', v') = (u', A v' - i u' a)`.
    pub fn adjoint(&self, xi: Se2Vector) -> Se2Vector {
        Se2Vector {
            u: xi.u,
            v: self.rot * xi.v - I * xi.u * self.trans,
        }
    }

    /// `CoAd_(A,a)(mu, nu) = (mu + a ^ A nu, A nu)`.
    pub fn coadjoint(&self, m: Se2Momentum) -> Se2Momentum {
        let anu = self.rot * m.nu;
        Se2Momentum {
            mu: m.mu + wedge(self.trans, anu),
            nu: anu,
        }
    }
}

impl Default for SE2Element {
    fn default() -> Self {
        SE2Element::IDENTITY
    }
}

impl Se2Vector {
    pub fn new(u: f64, v: Complex64) -> Self {
        Se2Vector { u, v }
    }

    pub fn scale(&self, s: f64) -> Se2Vector {
        Se2Vector {
            u: self.u * s,
            v: self.v * s,
        }
    }

    /// `ad_(u,v)(u', v') = (0, i(u v' - u' v))`.
    pub fn ad(&self, eta: Se2Vector) -> Se2Vector {
        Se2Vector {
            u: 0.0,
            v: I * (self.u * eta.v - eta.u * self.v),
        }
    }

    /// `coad_(u,v)(mu, nu) = (v ^ nu, i u nu)`.
    pub fn coad(&self, m: Se2Momentum) -> Se2Momentum {
        Se2Momentum {
            mu: wedge(self.v, m.nu),
            nu: I * self.u * m.nu,
        }
    }

    /// Infinitesimal generator `i u z + v`.
    pub fn generator(&self, z: Complex64) -> Complex64 {
        I * self.u * z + self.v
    }
}

impl Se2Momentum {
    pub fn new(mu: f64, nu: Complex64) -> Self {
        Se2Momentum { mu, nu }
    }

    /// `<(mu, nu), (u, v)> = mu u + nu . v`.
    pub fn pair(&self, xi: Se2Vector) -> f64 {
        self.mu * xi.u + dot(self.nu, xi.v)
    }
}

impl std::ops::Add for Se2Momentum {
    type Output = Se2Momentum;
    fn add(self, rhs: Se2Momentum) -> Se2Momentum {
        Se2Momentum {
            mu: self.mu + rhs.mu,
            nu: self.nu + rhs.nu,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn compose_by_substitution() {
        let g = SE2Element::new(c(0.0, 1.0), c(0.0, 0.0));
        let h = SE2Element::new(c(1.0, 0.0), c(1.0, 0.0));
        let gh = g.compose(&h);
        assert!((gh.rot - c(0.0, 1.0)).norm() < 1e-15);
        assert!((gh.trans - c(0.0, 1.0)).norm() < 1e-15);
        let e = SE2Element::IDENTITY.compose(&g);
        assert_eq!(e, g);
    }

    #[test]
    fn inverse_by_substitution() {
        let g = SE2Element::new(c(0.0, 1.0), c(1.0, 0.0));
        let gi = g.inverse();
        assert!((gi.rot - c(0.0, -1.0)).norm() < 1e-15);
        assert!((gi.trans - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(SE2Element::IDENTITY.inverse(), SE2Element::IDENTITY);
    }

    #[test]
    fn act_by_substitution() {
        let g = SE2Element::new(c(0.0, 1.0), c(1.0, 0.0));
        assert!((g.act(c(1.0, 0.0)) - c(1.0, 1.0)).norm() < 1e-15);
        let z = c(0.3, -2.0);
        assert_eq!(SE2Element::IDENTITY.act(z), z);
    }

    #[test]
    fn exp_special_values() {
        let g = SE2Element::exp(Se2Vector::new(0.0, c(1.0, 0.0)));
        assert_eq!(g.rot, c(1.0, 0.0));
        assert!((g.trans - c(1.0, 0.0)).norm() < 1e-15);

        let g = SE2Element::exp(Se2Vector::new(std::f64::consts::PI, c(0.0, 0.0)));
        assert!((g.rot - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(g.trans.norm() < 1e-15);

        let g = SE2Element::exp(Se2Vector::new(std::f64::consts::FRAC_PI_2, c(1.0, 0.0)));
        let want = c(1.0, 1.0) * (2.0 / std::f64::consts::PI);
        assert!((g.rot - c(0.0, 1.0)).norm() < 1e-15);
        assert!((g.trans - want).norm() < 1e-15);
    }

    #[test]
    fn exp_branches_agree_at_threshold() {
        let v = c(0.7, -1.3);
        // (e^{iu} - 1)/(iu) = sin(u)/u + i 2 sin^2(u/2)/u, free of cancellation
        let exact = |u: f64| v * c(u.sin() / u, 2.0 * (0.5 * u).sin().powi(2) / u);
        for u in [EXP_SERIES_THRESHOLD * 0.999, EXP_SERIES_THRESHOLD * 1.001] {
            let g = SE2Element::exp(Se2Vector::new(u, v));
            assert!((g.trans - exact(u)).norm() < 1e-9);
        }
    }

    #[test]
    fn identity_actions() {
        let xi = Se2Vector::new(0.4, c(1.0, 2.0));
        let m = Se2Momentum::new(-0.2, c(0.5, 0.1));
        assert_eq!(SE2Element::IDENTITY.adjoint(xi), xi);
        assert_eq!(SE2Element::IDENTITY.coadjoint(m), m);
        assert_eq!(xi.ad(xi), Se2Vector::new(0.0, c(0.0, 0.0)));
    }

    #[test]
    fn singular_axis_is_fixed() {
        let g = SE2Element::new(c(0.6, 0.8), c(-3.0, 2.0));
        let m = Se2Momentum::new(1.7, c(0.0, 0.0));
        assert_eq!(g.coadjoint(m), m);
    }

    #[test]
    fn generator_special_values() {
        let v = c(2.0, -1.0);
        assert_eq!(Se2Vector::new(0.0, v).generator(c(5.0, 5.0)), v);
        assert_eq!(
            Se2Vector::new(1.0, c(0.0, 0.0)).generator(c(1.0, 0.0)),
            c(0.0, 1.0)
        );
    }
}
