//! Adaptive Runge-Kutta integration of order 8 with embedded error estimates
//! of orders 5 and 3 (the Dormand-Prince 8(5,3) pair), seventh-order dense
//! output and event location on the dense output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and limits for one integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step length; `None` leaves it free.
    pub max_step: Option<f64>,
    /// Relative pair-distance threshold used by vortex fields.
    pub collision_guard: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: None,
            collision_guard: 1e-9,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Invalid("tolerances must be positive".into()));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                return Err(Error::Invalid("max_step must be positive".into()));
            }
        }
        if !(self.collision_guard > 0.0) {
            return Err(Error::Invalid("collision_guard must be positive".into()));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = Some(max_step);
        self
    }
}

/// Crossing direction for events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
    Either,
}

/// A located event.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: f64,
    pub y: Vec<f64>,
}

const C: [f64; 12] = [
    0.0,
    5.260015195876773e-2,
    7.89002279381516e-2,
    1.183503419072274e-1,
    2.816496580927726e-1,
    3.333333333333333e-1,
    0.25,
    3.076923076923077e-1,
    6.512820512820513e-1,
    0.6,
    8.571428571428571e-1,
    1.0,
];

const A: [[f64; 11]; 12] = [
    [0.0; 11],
    [
        5.260015195876773e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        1.97250569845379e-2,
        5.91751709536137e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.958758547680685e-2,
        0.0,
        8.876275643042054e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.413651341592667e-1,
        0.0,
        -8.845494793282861e-1,
        9.24834003261792e-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.7037037037037035e-2,
        0.0,
        0.0,
        1.7082860872947386e-1,
        1.2546768756682242e-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.7109375e-2,
        0.0,
        0.0,
        1.7025221101954405e-1,
        6.021653898045596e-2,
        -1.7578125e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.709200011850479e-2,
        0.0,
        0.0,
        1.7038392571223998e-1,
        1.0726203044637328e-1,
        -1.5319437748624402e-2,
        8.273789163814023e-3,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        6.241109587160757e-1,
        0.0,
        0.0,
        -3.3608926294469414,
        -8.68219346841726e-1,
        2.759209969944671e1,
        2.0154067550477894e1,
        -4.348988418106996e1,
        0.0,
        0.0,
        0.0,
    ],
    [
        4.7766253643826434e-1,
        0.0,
        0.0,
        -2.4881146199716677,
        -5.90290826836843e-1,
        2.1230051448181193e1,
        1.5279233632882423e1,
        -3.328821096898486e1,
        -2.0331201708508627e-2,
        0.0,
        0.0,
    ],
    [
        -9.371424300859873e-1,
        0.0,
        0.0,
        5.186372428844064,
        1.0914373489967295,
        -8.149787010746927,
        -1.852006565999696e1,
        2.2739487099350505e1,
        2.4936055526796523,
        -3.0467644718982196,
        0.0,
    ],
    [
        2.273310147516538,
        0.0,
        0.0,
        -1.053449546673725e1,
        -2.0008720582248625,
        -1.79589318631188e1,
        2.794888452941996e1,
        -2.8589982771350235,
        -8.87285693353063,
        1.2360567175794303e1,
        6.433927460157636e-1,
    ],
];

const B: [f64; 12] = [
    5.4293734116568765e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    3.111643669578199e-1,
    -1.521609496625161e-1,
    2.0136540080403034e-1,
    4.471061572777259e-2,
];

const ER: [f64; 12] = [
    1.312004499419488e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -4.957589496572502e-1,
    1.6643771824549864,
    -3.5032884874997366e-1,
    3.341791187130175e-1,
    8.192320648511571e-2,
    -2.2355307863886294e-2,
];

const BHH: [f64; 3] = [
    2.440944881889764e-1,
    7.338466882816118e-1,
    2.2058823529411766e-2,
];

const C_DENSE: [f64; 3] = [0.1, 0.2, 7.777777777777778e-1];

const A_DENSE: [[f64; 16]; 3] = [
    [
        5.6167502283047954e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        2.5350021021662483e-1,
        -2.462390374708025e-1,
        -1.2419142326381637e-1,
        1.5329179827876568e-1,
        8.20105229563469e-3,
        7.567897660545699e-3,
        -8.298e-3,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.183464816350214e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        2.8300909672366776e-2,
        5.3541988307438566e-2,
        -5.492374857139099e-2,
        0.0,
        0.0,
        -1.0834732869724932e-4,
        3.825710908356584e-4,
        -3.4046500868740456e-4,
        1.413124436746325e-1,
        0.0,
        0.0,
    ],
    [
        -4.2889630158379194e-1,
        0.0,
        0.0,
        0.0,
        0.0,
        -4.697621415361164,
        7.683421196062599,
        4.06898981839711,
        3.567271874552811e-1,
        0.0,
        0.0,
        0.0,
        -1.3990241651590145e-3,
        2.9475147891527724,
        -9.15095847217987,
        0.0,
    ],
];

const D: [[f64; 16]; 4] = [
    [
        -8.428938276109013,
        0.0,
        0.0,
        0.0,
        0.0,
        5.667149535193777e-1,
        -3.0689499459498917,
        2.38466765651207,
        2.117034582445028,
        -8.71391583777973e-1,
        2.2404374302607883,
        6.315787787694688e-1,
        -8.899033645133331e-2,
        1.8148505520854727e1,
        -9.194632392478356,
        -4.436036387594894,
    ],
    [
        1.0427508642579134e1,
        0.0,
        0.0,
        0.0,
        0.0,
        2.4228349177525817e2,
        1.6520045171727028e2,
        -3.745467547226902e2,
        -2.2113666853125306e1,
        7.733432668472264,
        -3.0674084731089398e1,
        -9.332130526430229,
        1.5697238121770845e1,
        -3.1139403219565178e1,
        -9.35292435884448,
        3.581684148639408e1,
    ],
    [
        1.9985053242002433e1,
        0.0,
        0.0,
        0.0,
        0.0,
        -3.870373087493518e2,
        -1.8917813819516758e2,
        5.278081592054236e2,
        -1.157390253995963e1,
        6.8812326946963,
        -1.0006050966910838,
        7.777137798053443e-1,
        -2.778205752353508,
        -6.019669523126412e1,
        8.432040550667716e1,
        1.199229113618279e1,
    ],
    [
        -2.569393346270375e1,
        0.0,
        0.0,
        0.0,
        0.0,
        -1.5418974869023643e2,
        -2.315293791760455e2,
        3.576391179106141e2,
        9.340532418362432e1,
        -3.745832313645163e1,
        1.040996495089623e2,
        2.98402934266605e1,
        -4.353345659001114e1,
        9.632455395918828e1,
        -3.917726167561544e1,
        -1.4972683625798564e2,
    ],
];

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.333;
const FAC_MAX: f64 = 6.0;
const BETA: f64 = 0.04;

/// Seventh-order interpolant over one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    cont: [Vec<f64>; 8],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> &[f64] {
        &self.cont[0]
    }

    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.h >= 0.0 {
            (self.t0, self.t1())
        } else {
            (self.t1(), self.t0)
        };
        t >= lo && t <= hi
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        for i in 0..out.len() {
            let conpar = c[4][i] + (c[5][i] + (c[6][i] + c[7][i] * s) * s1) * s;
            out[i] = c[0][i] + (c[1][i] + (c[2][i] + (c[3][i] + conpar * s1) * s) * s1) * s;
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.cont[0].len()];
        self.eval_into(t, &mut out);
        out
    }

    /// Locates a sign change of `event` inside this step.
    pub fn locate<E>(&self, event: &mut E, direction: Direction) -> Option<Event>
    where
        E: FnMut(f64, &[f64]) -> f64,
    {
        let t1 = self.t1();
        let y1 = self.eval(t1);
        let g0 = event(self.t0, &self.cont[0]);
        let g1 = event(t1, &y1);
        let up = g0 < 0.0 && g1 >= 0.0;
        let down = g0 > 0.0 && g1 <= 0.0;
        let hit = match direction {
            Direction::Up => up,
            Direction::Down => down,
            Direction::Either => up || down,
        };
        if !hit {
            return None;
        }
        if g1 == 0.0 {
            return Some(Event { t: t1, y: y1 });
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut glo = g0;
        let mut best = (t1, g1.abs());
        let tol_t = 4.0 * f64::EPSILON * self.t0.abs().max(t1.abs()).max(1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let tm = self.t0 + mid * self.h;
            let ym = self.eval(tm);
            let gm = event(tm, &ym);
            if gm.abs() < best.1 {
                best = (tm, gm.abs());
            }
            if gm.abs() < 1e-12 {
                return Some(Event { t: tm, y: ym });
            }
            if (gm < 0.0) == (glo < 0.0) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
            if (hi - lo) * self.h.abs() < tol_t {
                break;
            }
        }
        Some(Event {
            t: best.0,
            y: self.eval(best.0),
        })
    }
}

/// Adaptive stepper with dense output.
pub struct Dop853<F> {
    field: F,
    cfg: IntegratorConfig,
    t: f64,
    y: Vec<f64>,
    f0: Vec<f64>,
    h: f64,
    facold: f64,
    last_rejected: bool,
    steps: usize,
    rejected: usize,
    evals: usize,
    k: Vec<Vec<f64>>,
    ytmp: Vec<f64>,
}

fn call<F>(field: &mut F, t: f64, y: &[f64], out: &mut [f64]) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    field(t, y, out)?;
    if out.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { t })
    }
}

impl<F> Dop853<F>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    /// Prepares a stepper at `(t0, y0)` heading towards `t_dir`.
    pub fn new(
        mut field: F,
        t0: f64,
        y0: &[f64],
        t_dir: f64,
        cfg: IntegratorConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if y0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: t0 });
        }
        let n = y0.len();
        let mut f0 = vec![0.0; n];
        call(&mut field, t0, y0, &mut f0)?;
        let mut s = Dop853 {
            field,
            cfg,
            t: t0,
            y: y0.to_vec(),
            f0,
            h: 0.0,
            facold: 1e-4,
            last_rejected: false,
            steps: 0,
            rejected: 0,
            evals: 1,
            k: vec![vec![0.0; n]; 16],
            ytmp: vec![0.0; n],
        };
        let dir = if t_dir < 0.0 { -1.0 } else { 1.0 };
        s.h = s.initial_step(dir)?;
        Ok(s)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn accepted(&self) -> usize {
        self.steps
    }

    pub fn rejected(&self) -> usize {
        self.rejected
    }

    pub fn evaluations(&self) -> usize {
        self.evals
    }

    fn hmax(&self) -> f64 {
        self.cfg.max_step.unwrap_or(f64::INFINITY)
    }

    fn initial_step(&mut self, dir: f64) -> Result<f64> {
        let n = self.y.len();
        if n == 0 {
            return Ok(dir * self.hmax().min(1.0));
        }
        let (rtol, atol) = (self.cfg.rel_tol, self.cfg.abs_tol);
        let mut dnf = 0.0;
        let mut dny = 0.0;
        for i in 0..n {
            let sk = atol + rtol * self.y[i].abs();
            dnf += (self.f0[i] / sk).powi(2);
            dny += (self.y[i] / sk).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min(self.hmax()) * dir;
        for i in 0..n {
            self.ytmp[i] = self.y[i] + h * self.f0[i];
        }
        let mut f1 = vec![0.0; n];
        call(&mut self.field, self.t + h, &self.ytmp, &mut f1)?;
        self.evals += 1;
        let mut der2 = 0.0;
        for i in 0..n {
            let sk = atol + rtol * self.y[i].abs();
            der2 += ((f1[i] - self.f0[i]) / sk).powi(2);
        }
        let der2 = der2.sqrt() / h.abs();
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            1e-6_f64.max(h.abs() * 1e-3)
        } else {
            (0.01 / der12).powf(1.0 / 8.0)
        };
        Ok(dir * (100.0 * h.abs()).min(h1).min(self.hmax()))
    }

    fn stage(&mut self, s: usize, h: f64) -> Result<()> {
        let n = self.y.len();
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..s {
                let a = A[s][j];
                if a != 0.0 {
                    acc += a * self.k[j][i];
                }
            }
            self.ytmp[i] = self.y[i] + h * acc;
        }
        let (head, tail) = self.k.split_at_mut(s);
        let _ = head;
        call(&mut self.field, self.t + C[s] * h, &self.ytmp, &mut tail[0])?;
        self.evals += 1;
        Ok(())
    }

    fn dense_stage(&mut self, d: usize, h: f64, y_new_slot: usize) -> Result<()> {
        let _ = y_new_slot;
        let n = self.y.len();
        let idx = 13 + d;
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..idx {
                let a = A_DENSE[d][j];
                if a != 0.0 {
                    acc += a * self.k[j][i];
                }
            }
            self.ytmp[i] = self.y[i] + h * acc;
        }
        let (_, tail) = self.k.split_at_mut(idx);
        call(
            &mut self.field,
            self.t + C_DENSE[d] * h,
            &self.ytmp,
            &mut tail[0],
        )?;
        self.evals += 1;
        Ok(())
    }

    /// Advances by one accepted step without passing `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<DenseStep> {
        let n = self.y.len();
        let dir = if t_end >= self.t { 1.0 } else { -1.0 };
        if self.h * dir <= 0.0 {
            self.h = -self.h;
        }
        let expo1 = 1.0 / 8.0 - BETA * 0.2;
        loop {
            if self.steps + self.rejected >= self.cfg.max_steps {
                return Err(Error::StepLimit {
                    t: self.t,
                    steps: self.cfg.max_steps,
                });
            }
            let remaining = t_end - self.t;
            let mut h = self.h.abs().min(self.hmax()) * dir;
            let last = h.abs() >= remaining.abs();
            if last {
                h = remaining;
            }
            if h.abs() <= 16.0 * f64::EPSILON * self.t.abs().max(1.0) && !last {
                return Err(Error::StepSizeUnderflow { t: self.t, h });
            }
            if h == 0.0 {
                return Err(Error::StepSizeUnderflow { t: self.t, h });
            }

            self.k[0].copy_from_slice(&self.f0);
            for s in 1..12 {
                self.stage(s, h)?;
            }
            let mut y_new = vec![0.0; n];
            let mut err = 0.0;
            let mut err2 = 0.0;
            for i in 0..n {
                let mut incr = 0.0;
                let mut e = 0.0;
                for s in 0..12 {
                    incr += B[s] * self.k[s][i];
                    e += ER[s] * self.k[s][i];
                }
                y_new[i] = self.y[i] + h * incr;
                let sk = self.cfg.abs_tol + self.cfg.rel_tol * self.y[i].abs().max(y_new[i].abs());
                let e2 =
                    incr - BHH[0] * self.k[0][i] - BHH[1] * self.k[8][i] - BHH[2] * self.k[11][i];
                err2 += (e2 / sk).powi(2);
                err += (e / sk).powi(2);
            }
            let mut deno = err + 0.01 * err2;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = if n == 0 {
                0.0
            } else {
                h.abs() * err * (1.0 / (deno * n as f64)).sqrt()
            };
            if !err.is_finite() {
                return Err(Error::NonFinite { t: self.t });
            }

            let fac11 = err.powf(expo1);
            let fac = fac11 / self.facold.powf(BETA);
            let fac = (1.0 / FAC_MAX).max((1.0 / FAC_MIN).min(fac / SAFE));
            let mut h_new = h / fac;

            if err <= 1.0 {
                self.facold = err.max(1e-4);
                let t_new = if last { t_end } else { self.t + h };
                {
                    let (_, tail) = self.k.split_at_mut(12);
                    call(&mut self.field, t_new, &y_new, &mut tail[0])?;
                    self.evals += 1;
                }
                let mut cont: [Vec<f64>; 8] = Default::default();
                cont[0] = self.y.clone();
                cont[1] = vec![0.0; n];
                cont[2] = vec![0.0; n];
                cont[3] = vec![0.0; n];
                for i in 0..n {
                    let ydiff = y_new[i] - self.y[i];
                    let bspl = h * self.k[0][i] - ydiff;
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - h * self.k[12][i] - bspl;
                }
                for d in 0..3 {
                    self.dense_stage(d, h, 12)?;
                }
                for (row, coeffs) in D.iter().enumerate() {
                    let mut v = vec![0.0; n];
                    for (i, vi) in v.iter_mut().enumerate() {
                        let mut acc = 0.0;
                        for (s, d) in coeffs.iter().enumerate() {
                            if *d != 0.0 {
                                acc += d * self.k[s][i];
                            }
                        }
                        *vi = h * acc;
                    }
                    cont[4 + row] = v;
                }
                let dense = DenseStep {
                    t0: self.t,
                    h,
                    cont,
                };

                self.f0.copy_from_slice(&self.k[12]);
                self.y = y_new;
                self.t = t_new;
                self.steps += 1;
                if self.last_rejected {
                    h_new = h_new.abs().min(h.abs()) * dir;
                }
                self.last_rejected = false;
                if !last || h_new.abs() > self.h.abs() * 1e-3 {
                    self.h = h_new;
                }
                return Ok(dense);
            }

            self.rejected += 1;
            self.last_rejected = true;
            self.h = h / (1.0 / FAC_MIN).min(fac11 / SAFE);
        }
    }
}

/// Output of a complete integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub steps: Vec<DenseStep>,
    pub rejected: usize,
    pub evaluations: usize,
}

impl Solution {
    pub fn last(&self) -> &[f64] {
        self.states.last().map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Dense evaluation at any `t` inside the span.
    pub fn at(&self, t: f64) -> Result<Vec<f64>> {
        if self.steps.is_empty() {
            if t == self.times[0] {
                return Ok(self.states[0].clone());
            }
            return Err(Error::Invalid(format!("t = {t} outside an empty span")));
        }
        let forward = self.steps[0].h > 0.0;
        let idx = self
            .steps
            .partition_point(|s| if forward { s.t1() < t } else { s.t1() > t });
        match self.steps.get(idx) {
            Some(s) if s.contains(t) => Ok(s.eval(t)),
            _ => Err(Error::Invalid(format!(
                "t = {t} outside the integrated span"
            ))),
        }
    }

    /// First event along the solution.
    pub fn find_event<E>(&self, mut event: E, direction: Direction) -> Result<Event>
    where
        E: FnMut(f64, &[f64]) -> f64,
    {
        self.steps
            .iter()
            .find_map(|s| s.locate(&mut event, direction))
            .ok_or(Error::NoSignChange)
    }

    /// Every event along the solution, in time order.
    pub fn find_events<E>(&self, mut event: E, direction: Direction) -> Vec<Event>
    where
        E: FnMut(f64, &[f64]) -> f64,
    {
        self.steps
            .iter()
            .filter_map(|s| s.locate(&mut event, direction))
            .collect()
    }
}

/// Integrates `dy/dt = field(t, y)` over `t_span`, keeping every accepted step.
pub fn integrate<F>(
    field: F,
    y0: &[f64],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Solution>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let (t0, t1) = t_span;
    let mut stepper = Dop853::new(field, t0, y0, t1 - t0, *cfg)?;
    let mut sol = Solution {
        times: vec![t0],
        states: vec![y0.to_vec()],
        steps: Vec::new(),
        rejected: 0,
        evaluations: 0,
    };
    while stepper.t() != t1 {
        let dense = stepper.step(t1)?;
        sol.times.push(stepper.t());
        sol.states.push(stepper.y().to_vec());
        sol.steps.push(dense);
    }
    sol.rejected = stepper.rejected();
    sol.evaluations = stepper.evaluations();
    Ok(sol)
}
