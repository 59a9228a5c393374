//! Poincaré sections of the reduced flow near the equilateral equilibrium and
//! the crawl of a slightly translated configuration.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibria;
use crate::error::{Error, Result};
use crate::integrate::{self, Direction, Dop853, IntegratorConfig};
use crate::reduced_dynamics::{h_v, v_flow, v_from_flat, v_to_flat};
use crate::resolution::VState;
use crate::slice::{from_slice, to_slice, SliceState};
use crate::vortex_core::{self, Strengths};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionParams {
    pub alpha_e: f64,
    pub u: f64,
    pub gamma: f64,
    pub n_iters: usize,
}

/// Iterates of the first-return map on `θ = 0, j = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionData {
    pub points: Vec<(f64, f64)>,
    pub energies: Vec<f64>,
    pub params: SectionParams,
    /// Fixed point of the return map.
    pub center: (f64, f64),
}

impl SectionData {
    /// `(max H − min H) / max(|H|, 1)`.
    pub fn energy_spread(&self) -> f64 {
        let lo = self.energies.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self
            .energies
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let scale = self.energies.iter().map(|e| e.abs()).fold(1.0, f64::max);
        (hi - lo) / scale
    }

    /// Columns `iter,q,p,H`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
        wr.write_record(["iter", "q", "p", "H"]).map_err(io)?;
        for (k, ((q, p), h)) in self.points.iter().zip(&self.energies).enumerate() {
            wr.write_record([k.to_string(), q.to_string(), p.to_string(), h.to_string()])
                .map_err(io)?;
        }
        wr.flush()
            .map_err(|e| Error::Invalid(format!("csv: {e}")))?;
        Ok(())
    }
}

/// A state on a section together with its time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub t: f64,
    pub state: VState,
}

fn rotation_period(alpha_e: f64, gamma: f64) -> f64 {
    2.0 * PI * 3.0 * PI * alpha_e * alpha_e / gamma.abs()
}

/// The first `n` crossings of `arg v₁ = angle` in the direction of rotation,
/// excluding the starting point.
pub fn crossings(
    vs0: &VState,
    g: &Strengths,
    angle: f64,
    n: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<Crossing>> {
    let alpha = vs0.v1.norm().max(vs0.v2.norm());
    if !(alpha > 0.0) {
        return Err(Error::Invalid("v1 and v2 vanish".into()));
    }
    let patience = 4.0 * rotation_period(alpha, g.gamma());
    let back = Complex64::from_polar(1.0, -angle);
    let dir = if g.gamma() > 0.0 {
        Direction::Up
    } else {
        Direction::Down
    };
    let mut event = |_t: f64, y: &[f64]| (Complex64::new(y[0], y[1]) * back).im;
    let mut stepper = Dop853::new(
        v_flow(g, vs0.u, cfg.collision_guard),
        0.0,
        &v_to_flat(vs0),
        1.0,
        *cfg,
    )?;
    let mut out = Vec::with_capacity(n);
    let mut last = 0.0;
    let settle = 1e-9 * patience;
    while out.len() < n {
        let step = stepper.step(f64::INFINITY)?;
        if let Some(ev) = step.locate(&mut event, dir) {
            if ev.t > settle && (Complex64::new(ev.y[0], ev.y[1]) * back).re > 0.0 {
                last = ev.t;
                out.push(Crossing {
                    t: ev.t,
                    state: v_from_flat(&ev.y, vs0.u),
                });
            }
        }
        if stepper.t() - last > patience {
            return Err(Error::Chart(format!(
                "no return to the section within t = {}",
                stepper.t() - last
            )));
        }
    }
    Ok(out)
}

fn on_section(q: f64, p: f64, alpha_e: f64, u: f64) -> Result<VState> {
    from_slice(&SliceState::new(0.0, 0.0, q, p), alpha_e, u)
}

fn returns(
    q: f64,
    p: f64,
    alpha_e: f64,
    u: f64,
    g: &Strengths,
    n: usize,
    cfg: &IntegratorConfig,
) -> Result<Vec<(SliceState, VState)>> {
    crossings(&on_section(q, p, alpha_e, u)?, g, 0.0, n, cfg)?
        .into_iter()
        .map(|c| Ok((to_slice(&c.state, alpha_e)?, c.state)))
        .collect()
}

/// One application of the return map in `(q, p)`.
pub fn first_return(
    q: f64,
    p: f64,
    alpha_e: f64,
    u: f64,
    g: &Strengths,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64)> {
    let (ss, _) = returns(q, p, alpha_e, u, g, 1, cfg)?[0];
    Ok((ss.q, ss.p))
}

/// Newton iteration on `P(x) − x`, started at `(−3u/4, 0)`.
pub fn fixed_point(
    alpha_e: f64,
    u: f64,
    g: &Strengths,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64)> {
    if u == 0.0 {
        return Ok((0.0, 0.0));
    }
    let disp = |x: [f64; 2]| -> Result<[f64; 2]> {
        let (q, p) = first_return(x[0], x[1], alpha_e, u, g, cfg)?;
        Ok([q - x[0], p - x[1]])
    };
    let h = 1e-6 * alpha_e;
    let mut x = [-0.75 * u, 0.0];
    let mut d = disp(x)?;
    for _ in 0..30 {
        if d[0].hypot(d[1]) <= 1e-12 * alpha_e {
            break;
        }
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let (dp, dm) = (disp(xp)?, disp(xm)?);
            for i in 0..2 {
                jac[i][k] = (dp[i] - dm[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Degenerate(
                "return map has a singular displacement Jacobian".into(),
            ));
        }
        let step = [
            (jac[1][1] * d[0] - jac[0][1] * d[1]) / det,
            (jac[0][0] * d[1] - jac[1][0] * d[0]) / det,
        ];
        x = [x[0] - step[0], x[1] - step[1]];
        d = disp(x)?;
        if step[0].hypot(step[1]) <= 1e-13 * alpha_e {
            break;
        }
    }
    if d[0].hypot(d[1]) > 1e-8 * alpha_e {
        return Err(Error::Degenerate(format!(
            "fixed point search stalled with displacement {}",
            d[0].hypot(d[1])
        )));
    }
    Ok((x[0], x[1]))
}

/// Iterates the return map from the fixed point displaced by the `(q, p)` of
/// `v0`. The run uses `u = v0.u`; `v0` must have `j = 0`.
pub fn section_map(
    v0: &VState,
    alpha_e: f64,
    gamma: f64,
    n_iters: usize,
    cfg: &IntegratorConfig,
) -> Result<SectionData> {
    let g = Strengths::ring(gamma, 3)?;
    let u = v0.u;
    let offset = to_slice(v0, alpha_e)?;
    if offset.j.abs() > 1e-9 * alpha_e * alpha_e {
        return Err(Error::Invalid(format!(
            "v0 has j = {}, expected 0",
            offset.j
        )));
    }
    let center = fixed_point(alpha_e, u, &g, cfg)?;
    let (q0, p0) = (center.0 + offset.q, center.1 + offset.p);
    let mut points = Vec::with_capacity(n_iters);
    let mut energies = Vec::with_capacity(n_iters);
    for (ss, vs) in returns(q0, p0, alpha_e, u, &g, n_iters, cfg)? {
        points.push((ss.q, ss.p));
        energies.push(h_v(&vs, &g)?);
    }
    log::debug!(
        "section: {} iterates about ({:.3e}, {:.3e})",
        points.len(),
        center.0,
        center.1
    );
    Ok(SectionData {
        points,
        energies,
        params: SectionParams {
            alpha_e,
            u,
            gamma,
            n_iters,
        },
        center,
    })
}

/// Mean unwrapped angle increment about the center, in turns.
pub fn rotation_number(sd: &SectionData) -> Result<f64> {
    if sd.points.len() < 10 {
        return Err(Error::Invalid(format!(
            "rotation number needs at least 10 points, got {}",
            sd.points.len()
        )));
    }
    let tol = 1e-8 * sd.params.alpha_e.abs().max(f64::MIN_POSITIVE);
    let rel: Vec<Complex64> = sd
        .points
        .iter()
        .map(|(q, p)| Complex64::new(q - sd.center.0, p - sd.center.1))
        .collect();
    if rel.iter().any(|z| z.norm() <= tol) {
        return Err(Error::Degenerate(
            "section points sit on the fixed point".into(),
        ));
    }
    let total: f64 = rel.windows(2).map(|w| (w[1] / w[0]).arg()).sum();
    Ok(total / ((rel.len() - 1) as f64 * 2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrawlResult {
    pub drift: Complex64,
    /// `ν/m_e` with `m_e = 8πα²/3`.
    pub predicted: Complex64,
}

/// Displaces the central vortex of the equilateral equilibrium by `iε/Γ`
/// and fits a line to the mean position of all four vortices.
pub fn crawl_experiment(
    alpha_e: f64,
    gamma: f64,
    eps: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<CrawlResult> {
    if !eps.is_finite() {
        return Err(Error::Invalid("eps must be finite".into()));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Invalid("t_end must be positive".into()));
    }
    let o = equilibria::make_o(alpha_e, gamma)?;
    let g = o.strengths();
    let mut s0 = o.z.clone();
    s0.z[0] += Complex64::new(0.0, eps / gamma);
    let nu = vortex_core::momentum(&s0, &g).nu;
    let sol = integrate::integrate(
        vortex_core::flow(&g, cfg.collision_guard),
        &s0.to_flat(),
        (0.0, t_end),
        cfg,
    )?;
    let samples = 2000;
    let mut ts = Vec::with_capacity(samples + 1);
    let mut cs = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        let t = t_end * k as f64 / samples as f64;
        let y = sol.at(t)?;
        let n = y.len() / 2;
        let sum: Complex64 = (0..n).map(|i| Complex64::new(y[2 * i], y[2 * i + 1])).sum();
        ts.push(t);
        cs.push(sum / n as f64);
    }
    let t_mean = ts.iter().sum::<f64>() / ts.len() as f64;
    let c_mean = cs.iter().sum::<Complex64>() / cs.len() as f64;
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (t, c) in ts.iter().zip(&cs) {
        num += (c - c_mean) * (t - t_mean);
        den += (t - t_mean) * (t - t_mean);
    }
    let m_e = 8.0 * PI * alpha_e * alpha_e / 3.0;
    Ok(CrawlResult {
        drift: num / den,
        predicted: nu / m_e,
    })
}
