//! Wirtinger derivatives and Poisson brackets by finite differences.
//!
//! Functions are closures `Fn(&[Complex64]) -> Complex64` of a list of complex
//! variables. Derivatives use a fourth-order central stencil in the real
//! coordinates of one variable:
//!
//! `d/dz = (d/dx - i d/dy)/2`, `d/dzbar = (d/dx + i d/dy)/2`.
//!
//! Brackets follow `{f, g} = sum_pq S_pq (f_{z_p} g_{zbar_q} - f_{zbar_q} g_{z_p})`
//! where `S_pq = {z_p, zbar_q}`; a diagonal structure `S_pp = -2i w_p` is the
//! weighted canonical bracket.

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative step of the default stencil.
pub const DEFAULT_REL_STEP: f64 = 1e-5;

/// Default step `1e-5 (1 + |z|)`.
pub fn default_step(z: Complex64) -> f64 {
    DEFAULT_REL_STEP * (1.0 + z.norm())
}

fn sample<F>(f: &F, point: &[Complex64], idx: usize, dz: Complex64) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    let mut p = point.to_vec();
    p[idx] += dz;
    let val = f(&p);
    if val.re.is_finite() && val.im.is_finite() {
        Ok(val)
    } else {
        Err(Error::NonFiniteSample)
    }
}

fn stencil<F>(f: &F, point: &[Complex64], idx: usize, dir: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    let fp1 = sample(f, point, idx, dir * h)?;
    let fm1 = sample(f, point, idx, -dir * h)?;
    let fp2 = sample(f, point, idx, dir * (2.0 * h))?;
    let fm2 = sample(f, point, idx, -dir * (2.0 * h))?;
    Ok((fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h))
}

/// Real partials `(df/dx, df/dy)` of variable `idx` with step `h`.
pub fn partials_step<F>(
    f: &F,
    idx: usize,
    point: &[Complex64],
    h: f64,
) -> Result<(Complex64, Complex64)>
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    let dx = stencil(f, point, idx, Complex64::new(1.0, 0.0), h)?;
    let dy = stencil(f, point, idx, I, h)?;
    Ok((dx, dy))
}

/// Both Wirtinger derivatives `(df/dz, df/dzbar)` with step `h`.
pub fn wirtinger_step<F>(
    f: &F,
    idx: usize,
    point: &[Complex64],
    h: f64,
) -> Result<(Complex64, Complex64)>
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    let (dx, dy) = partials_step(f, idx, point, h)?;
    Ok(((dx - I * dy) * 0.5, (dx + I * dy) * 0.5))
}

/// Both Wirtinger derivatives at the default step.
pub fn wirtinger<F>(f: &F, idx: usize, point: &[Complex64]) -> Result<(Complex64, Complex64)>
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    wirtinger_step(f, idx, point, default_step(point[idx]))
}

pub fn d_dx<F>(f: &F, idx: usize, point: &[Complex64]) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    stencil(
        f,
        point,
        idx,
        Complex64::new(1.0, 0.0),
        default_step(point[idx]),
    )
}

pub fn d_dz<F>(f: &F, idx: usize, point: &[Complex64]) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    Ok(wirtinger(f, idx, point)?.0)
}

pub fn d_dzbar<F>(f: &F, idx: usize, point: &[Complex64]) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    Ok(wirtinger(f, idx, point)?.1)
}

/// Diagonal structure `{z_p, zbar_p} = -2i w_p`.
pub fn diagonal_structure(weights: &[f64]) -> Vec<Vec<Complex64>> {
    let n = weights.len();
    let mut s = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (p, w) in weights.iter().enumerate() {
        s[p][p] = -2.0 * I * *w;
    }
    s
}

/// Bracket for a general structure table `S_pq = {z_p, zbar_q}` with `{z_p, z_q} = 0`.
pub fn structured_bracket<F, G>(
    f: &F,
    g: &G,
    point: &[Complex64],
    structure: &[Vec<Complex64>],
) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
    G: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    let n = point.len();
    if structure.len() != n || structure.iter().any(|row| row.len() != n) {
        return Err(Error::Invalid(format!(
            "structure table must be {n}x{n} to match the point"
        )));
    }
    let df: Vec<_> = (0..n)
        .map(|p| wirtinger(f, p, point))
        .collect::<Result<_>>()?;
    let dg: Vec<_> = (0..n)
        .map(|p| wirtinger(g, p, point))
        .collect::<Result<_>>()?;
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..n {
        for q in 0..n {
            let s = structure[p][q];
            if s == Complex64::new(0.0, 0.0) {
                continue;
            }
            total += s * (df[p].0 * dg[q].1 - df[q].1 * dg[p].0);
        }
    }
    Ok(total)
}

/// `{f, g} = -2i sum_p w_p (f_z g_zbar - f_zbar g_z)`.
pub fn poisson_bracket<F, G>(
    f: &F,
    g: &G,
    point: &[Complex64],
    weights: &[f64],
) -> Result<Complex64>
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
    G: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    if weights.len() != point.len() {
        return Err(Error::Invalid("one weight per variable is required".into()));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (p, w) in weights.iter().enumerate() {
        let (fz, fzb) = wirtinger(f, p, point)?;
        let (gz, gzb) = wirtinger(g, p, point)?;
        total += -2.0 * I * *w * (fz * gzb - fzb * gz);
    }
    Ok(total)
}

/// Hamiltonian vector field `dz_p/dt = -2i w_p dH/dzbar_p` of a real function.
pub fn hamiltonian_field<F>(h: &F, point: &[Complex64], weights: &[f64]) -> Result<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Complex64 + ?Sized,
{
    if weights.len() != point.len() {
        return Err(Error::Invalid("one weight per variable is required".into()));
    }
    let value = h(point);
    if value.im.abs() >= 1e-10 {
        return Err(Error::NotReal {
            imag: value.im.abs(),
        });
    }
    weights
        .iter()
        .enumerate()
        .map(|(p, w)| Ok(-2.0 * I * *w * d_dzbar(h, p, point)?))
        .collect()
}

fn check_holomorphic<W>(w_funcs: &[W], point: &[Complex64]) -> Result<()>
where
    W: Fn(&[Complex64]) -> Complex64,
{
    for (i, w) in w_funcs.iter().enumerate() {
        for p in 0..point.len() {
            let (dz, dzb) = wirtinger(w, p, point)?;
            if dzb.norm() > 1e-8 * (1.0 + dz.norm()) {
                return Err(Error::NotHolomorphic {
                    index: i,
                    residual: dzb.norm(),
                });
            }
        }
    }
    Ok(())
}

/// Structure table `{w_i, wbar_j}` induced by holomorphic coordinates `w(z)`.
pub fn induced_structure<W>(
    w_funcs: &[W],
    point: &[Complex64],
    structure: &[Vec<Complex64>],
) -> Result<Vec<Vec<Complex64>>>
where
    W: Fn(&[Complex64]) -> Complex64,
{
    check_holomorphic(w_funcs, point)?;
    let m = w_funcs.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for i in 0..m {
        for j in 0..m {
            let wj = &w_funcs[j];
            let wbar = |z: &[Complex64]| wj(z).conj();
            out[i][j] = structured_bracket(&w_funcs[i], &wbar, point, structure)?;
        }
    }
    Ok(out)
}

/// Defect between `{f o w, g o w}` computed directly and through the
/// structure constants `{w_i, wbar_j}` of holomorphic coordinates `w`.
pub fn bracket_transform_check<W, F, G>(
    w_funcs: &[W],
    f: &F,
    g: &G,
    point: &[Complex64],
    structure: &[Vec<Complex64>],
) -> Result<f64>
where
    W: Fn(&[Complex64]) -> Complex64,
    F: Fn(&[Complex64]) -> Complex64,
    G: Fn(&[Complex64]) -> Complex64,
{
    let table = induced_structure(w_funcs, point, structure)?;
    let eval_w = |z: &[Complex64]| -> Vec<Complex64> { w_funcs.iter().map(|w| w(z)).collect() };
    let fw = |z: &[Complex64]| f(&eval_w(z));
    let gw = |z: &[Complex64]| g(&eval_w(z));
    let direct = structured_bracket(&fw, &gw, point, structure)?;

    let wpt = eval_w(point);
    let m = wpt.len();
    let df: Vec<_> = (0..m)
        .map(|i| wirtinger(f, i, &wpt))
        .collect::<Result<_>>()?;
    let dg: Vec<_> = (0..m)
        .map(|i| wirtinger(g, i, &wpt))
        .collect::<Result<_>>()?;
    let mut via = Complex64::new(0.0, 0.0);
    for i in 0..m {
        for j in 0..m {
            via += table[i][j] * (df[i].0 * dg[j].1 - df[j].1 * dg[i].0);
        }
    }
    Ok((direct - via).norm())
}
