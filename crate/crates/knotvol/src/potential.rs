//! Potential functions of the state sums, their saddle points, contour grids
//! and region checks.
//!
//! With u = e^{2πiα}, v = e^{2πiβ}, the inner sum over s concentrates at
//! γ₀ = (1/2πi) log w₀, where w₀ solves 2w² − (u+1)(v+1)w + 2uv = 0. The
//! root is tracked by continuation from (α, β) = (½, ½), where w₀ = −i.

use crate::error::{Error, Result};
use crate::specfun::{li2, lobachevsky};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);
const PI2: f64 = PI * PI;
const CONTINUATION_STEPS: usize = 64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// e^{2πiz}.
pub fn e2pi(z: Complex64) -> Complex64 {
    (TWO_PI_I * z).exp()
}

/// The inner maximizer at (α, β).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerMax {
    pub u: Complex64,
    pub v: Complex64,
    pub w0: Complex64,
    /// γ₀ on the branch making ∂Ψ/∂γ = 0.
    pub gamma0: Complex64,
    /// √((u+1)²(v+1)² − 16uv) on the branch w₀ = ((u+1)(v+1) − √·)/4.
    pub sqrt_disc: Complex64,
}

fn quad_roots(u: Complex64, v: Complex64) -> Result<(Complex64, Complex64)> {
    let s = (u + 1.0) * (v + 1.0);
    let d = s * s - 16.0 * u * v;
    let scale = s.norm_sqr() + 16.0 * (u * v).norm();
    if d.norm() <= 1e-24 * scale.max(1.0) {
        return Err(Error::Domain(format!("degenerate discriminant at u = {u}, v = {v}")));
    }
    let r = d.sqrt();
    Ok(((s - r) / 4.0, (s + r) / 4.0))
}

/// Track w₀ along the straight path from (½, ½) to (α, β) and fix the branch
/// of γ₀ by the stationarity condition ∂Ψ_B/∂γ = 0.
pub fn inner_max(alpha: Complex64, beta: Complex64) -> Result<InnerMax> {
    let half = c(0.5, 0.0);
    let mut w = c(0.0, -1.0);
    for j in 1..=CONTINUATION_STEPS {
        let t = j as f64 / CONTINUATION_STEPS as f64;
        let (a, b) = (half + (alpha - half) * t, half + (beta - half) * t);
        let (r1, r2) = quad_roots(e2pi(a), e2pi(b))?;
        w = if (r1 - w).norm() <= (r2 - w).norm() { r1 } else { r2 };
    }
    let (u, v) = (e2pi(alpha), e2pi(beta));
    let one = c(1.0, 0.0);
    let l = (one - w).ln() - (one - w / u).ln() - (one - w / v).ln() + (one - u * v / w).ln();
    let x = (l + w.ln() - TWO_PI_I * (alpha + beta)) / TWO_PI_I;
    let n = -x.re.round();
    let gamma0 = (w.ln() + TWO_PI_I * n) / TWO_PI_I;
    Ok(InnerMax { u, v, w0: w, gamma0, sqrt_disc: (u + 1.0) * (v + 1.0) - 4.0 * w })
}

/// w₀ and γ₀ = (1/2πi) log w₀ (Re γ₀ ∈ [0, 1)) for given (u, v).
pub fn w0_gamma0(u: Complex64, v: Complex64) -> Result<(Complex64, Complex64)> {
    let to_alpha = |z: Complex64| {
        let a = z.ln() / TWO_PI_I;
        c(a.re.rem_euclid(1.0), a.im)
    };
    let m = inner_max(to_alpha(u), to_alpha(v))?;
    let g = m.w0.ln() / TWO_PI_I;
    Ok((m.w0, c(g.re.rem_euclid(1.0), g.im)))
}

/// Ψ_B(α, β) evaluated at the inner maximizer.
pub fn psi_b(alpha: Complex64, beta: Complex64) -> Result<Complex64> {
    let m = inner_max(alpha, beta)?;
    psi_b_at(alpha, beta, &m)
}

fn psi_b_at(alpha: Complex64, beta: Complex64, m: &InnerMax) -> Result<Complex64> {
    let g = m.gamma0;
    let quad = -4.0 * PI2 * (g * g - 2.0 * (alpha + beta) * g + alpha * alpha + alpha * beta + beta * beta);
    let (u, v, w) = (m.u, m.v, m.w0);
    Ok(quad - 2.0 * li2(w)? + 2.0 * li2(w / u)? + 2.0 * li2(w / v)? + 2.0 * li2(u * v / w)? - 2.0 * PI2 / 3.0)
}

/// (∂Ψ_B/∂α, ∂Ψ_B/∂β). γ₀ is stationary, so only explicit dependence counts.
pub fn psi_b_grad(alpha: Complex64, beta: Complex64) -> Result<[Complex64; 2]> {
    let m = inner_max(alpha, beta)?;
    Ok(psi_b_grad_at(alpha, beta, &m))
}

fn psi_b_grad_at(alpha: Complex64, beta: Complex64, m: &InnerMax) -> [Complex64; 2] {
    let one = c(1.0, 0.0);
    let g = m.gamma0;
    let four_pi_i = c(0.0, 4.0 * PI);
    let luv = (one - m.u * m.v / m.w0).ln();
    let da = 8.0 * PI2 * g - 8.0 * PI2 * alpha - 4.0 * PI2 * beta + four_pi_i * ((one - m.w0 / m.u).ln() - luv);
    let db = 8.0 * PI2 * g - 4.0 * PI2 * alpha - 8.0 * PI2 * beta + four_pi_i * ((one - m.w0 / m.v).ln() - luv);
    [da, db]
}

/// Ψ_W(α) = Ψ_B(α, ½).
pub fn psi_w(alpha: Complex64) -> Result<Complex64> {
    psi_b(alpha, c(0.5, 0.0))
}

pub fn psi_w_deriv(alpha: Complex64) -> Result<Complex64> {
    Ok(psi_b_grad(alpha, c(0.5, 0.0))?[0])
}

/// Φ_{W_p}(α) = −2π²p(α−½)² + Ψ_W(α).
pub fn phi_wp(p: i64, alpha: Complex64) -> Result<Complex64> {
    Ok(-2.0 * PI2 * p as f64 * (alpha - 0.5).powi(2) + psi_w(alpha)?)
}

/// Φ_{D_{p,r}}(α, β) = −2π²p(α−½)² + 2π²r(β−½)² + Ψ_B(α, β).
pub fn phi_dpr(p: i64, r: i64, alpha: Complex64, beta: Complex64) -> Result<Complex64> {
    Ok(-2.0 * PI2 * p as f64 * (alpha - 0.5).powi(2) + 2.0 * PI2 * r as f64 * (beta - 0.5).powi(2) + psi_b(alpha, beta)?)
}

/// Twisted family whose potential is being studied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    W,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub p: i64,
    /// Unused for the W family.
    pub r: i64,
    pub family: Family,
}

impl PotentialParams {
    pub fn whitehead(p: i64) -> Self {
        Self { p, r: 0, family: Family::W }
    }

    pub fn double(p: i64, r: i64) -> Self {
        Self { p, r, family: Family::D }
    }

    fn dim(&self) -> usize {
        match self.family {
            Family::W => 1,
            Family::D => 2,
        }
    }

    fn point(&self, z: &[Complex64]) -> (Complex64, Complex64) {
        match self.family {
            Family::W => (z[0], c(0.5, 0.0)),
            Family::D => (z[0], z[1]),
        }
    }

    /// Saddle functional f = 4π²α [+ 4π²β] + Φ.
    pub fn value(&self, z: &[Complex64]) -> Result<Complex64> {
        let (a, b) = self.point(z);
        Ok(match self.family {
            Family::W => 4.0 * PI2 * a + phi_wp(self.p, a)?,
            Family::D => 4.0 * PI2 * (a + b) + phi_dpr(self.p, self.r, a, b)?,
        })
    }

    /// Holomorphic gradient of the saddle functional.
    pub fn grad(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let (a, b) = self.point(z);
        let m = inner_max(a, b)?;
        let g = psi_b_grad_at(a, b, &m);
        let ga = 4.0 * PI2 - 4.0 * PI2 * self.p as f64 * (a - 0.5) + g[0];
        Ok(match self.family {
            Family::W => vec![ga],
            Family::D => vec![ga, 4.0 * PI2 + 4.0 * PI2 * self.r as f64 * (b - 0.5) + g[1]],
        })
    }

    /// Hessian by central differences of the analytic gradient.
    pub fn hessian(&self, z: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        let h = 1e-6;
        let d = self.dim();
        let mut out = vec![vec![c(0.0, 0.0); d]; d];
        for j in 0..d {
            let mut zp = z.to_vec();
            let mut zm = z.to_vec();
            zp[j] += h;
            zm[j] -= h;
            let (gp, gm) = (self.grad(&zp)?, self.grad(&zm)?);
            for i in 0..d {
                out[i][j] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        Ok(out)
    }

    /// (1/i)(f − 2π² [− 2π²]): Vol + i·CS before reduction mod π².
    pub fn raw_complex_volume(&self, z: &[Complex64]) -> Result<Complex64> {
        let shift = match self.family {
            Family::W => 2.0 * PI2,
            Family::D => 4.0 * PI2,
        };
        Ok((self.value(z)? - shift) / Complex64::i())
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn solve(h: &[Vec<Complex64>], g: &[Complex64]) -> Result<Vec<Complex64>> {
    match g.len() {
        1 => Ok(vec![g[0] / h[0][0]]),
        2 => {
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            if det.norm() < 1e-300 {
                return Err(Error::Numeric("singular Hessian".into()));
            }
            Ok(vec![(h[1][1] * g[0] - h[0][1] * g[1]) / det, (h[0][0] * g[1] - h[1][0] * g[0]) / det])
        }
        _ => unreachable!("potentials have one or two variables"),
    }
}

fn det(h: &[Vec<Complex64>]) -> Complex64 {
    if h.len() == 1 {
        h[0][0]
    } else {
        h[0][0] * h[1][1] - h[0][1] * h[1][0]
    }
}

/// Result of a damped Newton run.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonResult {
    pub z: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 100;

/// Damped Newton on the holomorphic gradient: the step is halved until the
/// gradient norm decreases.
pub fn newton(params: &PotentialParams, seed: &[Complex64]) -> Result<NewtonResult> {
    let mut z = seed.to_vec();
    let mut g = params.grad(&z)?;
    let mut res = norm(&g);
    for it in 0..NEWTON_MAX_ITER {
        if res < NEWTON_TOL {
            return Ok(NewtonResult { z, residual: res, iterations: it });
        }
        let h = params.hessian(&z)?;
        let step = solve(&h, &g)?;
        let mut lam = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<Complex64> = z.iter().zip(&step).map(|(a, s)| a - s * lam).collect();
            if let Ok(gt) = params.grad(&trial) {
                let rt = norm(&gt);
                if rt < res {
                    z = trial;
                    g = gt;
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            lam *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res < 1e-10 {
        Ok(NewtonResult { z, residual: res, iterations: NEWTON_MAX_ITER })
    } else {
        Err(Error::Numeric(format!("Newton did not converge from {seed:?}: residual {res:.3e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleSolution {
    pub alpha0: Complex64,
    pub beta0: Option<Complex64>,
    pub u: Complex64,
    pub v: Complex64,
    pub w0: Complex64,
    /// 4π²α₀ [+ 4π²β₀] + Φ at the saddle.
    pub value: Complex64,
    pub grad_residual: f64,
    pub hessian_det: Complex64,
}

impl SaddleSolution {
    fn build(params: &PotentialParams, z: &[Complex64], residual: f64) -> Result<Self> {
        let (a, b) = params.point(z);
        let m = inner_max(a, b)?;
        Ok(Self {
            alpha0: a,
            beta0: (params.family == Family::D).then_some(b),
            u: m.u,
            v: m.v,
            w0: m.w0,
            value: params.value(z)?,
            grad_residual: residual,
            hessian_det: det(&params.hessian(z)?),
        })
    }

    /// Vol = Im of the shifted value.
    pub fn volume(&self) -> f64 {
        self.value.im
    }
}

fn dedup(mut pts: Vec<(Vec<Complex64>, f64)>) -> Vec<(Vec<Complex64>, f64)> {
    let mut out: Vec<(Vec<Complex64>, f64)> = Vec::new();
    pts.sort_by(|a, b| a.0[0].re.total_cmp(&b.0[0].re));
    for p in pts {
        if !out.iter().any(|q| q.0.iter().zip(&p.0).all(|(x, y)| (x - y).norm() < 1e-8)) {
            out.push(p);
        }
    }
    out
}

fn run_seeds(params: &PotentialParams, seeds: &[Vec<Complex64>]) -> Vec<(Vec<Complex64>, f64)> {
    let found: Vec<_> = seeds.par_iter().filter_map(|s| newton(params, s).ok()).map(|r| (r.z, r.residual)).collect();
    dedup(found)
}

/// Largest-volume critical point among the candidates; the geometric
/// representation maximizes volume.
fn select(params: &PotentialParams, cands: Vec<(Vec<Complex64>, f64)>, accept: impl Fn(&[Complex64]) -> bool) -> Result<SaddleSolution> {
    let mut best: Option<SaddleSolution> = None;
    for (z, res) in cands {
        if !accept(&z) {
            continue;
        }
        let s = SaddleSolution::build(params, &z, res)?;
        if s.volume() > 0.0 && best.as_ref().is_none_or(|b| s.volume() > b.volume()) {
            best = Some(s);
        }
    }
    best.ok_or_else(|| Error::Selection(format!("no critical point with positive volume for {params:?}")))
}

/// Saddle of 4π²α + Φ_{W_p}(α).
pub fn saddle_whitehead(p: i64) -> Result<SaddleSolution> {
    if p.abs() < 2 {
        return Err(Error::Domain(format!("twisted Whitehead link needs |p| >= 2, got {p}")));
    }
    let params = PotentialParams::whitehead(p);
    let primary = if p > 0 { c(0.85, -0.17) } else { c(0.15, -0.17) };
    let mut seeds = vec![vec![primary]];
    for i in 0..7 {
        for j in 0..5 {
            let re = 0.05 + 0.15 * i as f64;
            let im = -0.3 + 0.15 * j as f64;
            seeds.push(vec![c(re, im)]);
        }
    }
    let cands = run_seeds(&params, &seeds);
    let sol = select(&params, cands, |z| z[0].re > 0.0 && z[0].re < 1.0)?;
    let branch = phi_w_branch(p, sol.alpha0)?;
    if (branch - TWO_PI_I).norm() > 1e-8 {
        return Err(Error::Branch(format!("(1/2πi)Φ'(α₀) = {branch}, expected 2πi")));
    }
    Ok(sol)
}

/// (1/2πi)·dΦ_{W_p}/dα.
pub fn phi_w_branch(p: i64, alpha: Complex64) -> Result<Complex64> {
    let d = -4.0 * PI2 * p as f64 * (alpha - 0.5) + psi_w_deriv(alpha)?;
    Ok(d / TWO_PI_I)
}

/// Seed lattice for the two-variable saddle.
fn double_seeds(p: i64, r: i64) -> Vec<Vec<Complex64>> {
    let lin = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / 4.0;
    let (alo, ahi) = if p > 0 { (0.45, 0.9) } else { (0.1, 0.55) };
    let (blo, bhi) = if r > 0 { (0.1, 0.55) } else { (0.45, 0.9) };
    let mut seeds = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                let im = lin(-0.2, 0.01, k);
                let im = if p > 0 { im } else { -im };
                seeds.push(vec![c(lin(alo, ahi, i), im), c(lin(blo, bhi, j), im)]);
            }
        }
    }
    seeds
}

/// Saddle of 4π²α + 4π²β + Φ_{D_{p,r}}(α, β).
pub fn saddle_double(p: i64, r: i64) -> Result<SaddleSolution> {
    let params = PotentialParams::double(p, r);
    let cands = run_seeds(&params, &double_seeds(p, r));
    select(&params, cands, |z| z.iter().all(|x| x.re > 0.0 && x.re < 1.0))
}

/// All distinct critical points reached from the standard seed lattice.
pub fn critical_points(params: &PotentialParams, seeds: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    run_seeds(params, seeds).into_iter().map(|(z, _)| z).collect()
}

/// Rectangle in the (Re, Im) plane of one complex variable, or a real
/// rectangle for the two-variable potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// Imaginary shifts (of α, β) for the two-variable potential; for W the
    /// first component is added to Im α.
    pub imag_shift: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub alpha: Complex64,
    pub beta: Complex64,
    /// (1/2πi)·f at the sample; NaN when flagged.
    pub value: Complex64,
    pub near_pole: bool,
}

impl GridSpec {
    fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        let t = |lo: f64, hi: f64, k: usize, n: usize| if n <= 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
        (t(self.x.0, self.x.1, i, self.nx), t(self.y.0, self.y.1, j, self.ny))
    }

    fn variables(&self, params: &PotentialParams, i: usize, j: usize) -> Vec<Complex64> {
        let (x, y) = self.coords(i, j);
        match params.family {
            Family::W => vec![c(x, y + self.imag_shift.0)],
            Family::D => vec![c(x, self.imag_shift.0), c(y, self.imag_shift.1)],
        }
    }
}

fn near_pole(a: Complex64, b: Complex64) -> bool {
    let Ok(m) = inner_max(a, b) else { return true };
    let one = c(1.0, 0.0);
    [m.w0, m.w0 / m.u, m.w0 / m.v, m.u * m.v / m.w0].iter().any(|z| (z - one).norm() < 1e-9)
}

/// Sample (1/2πi)(4π²α [+ 4π²β] + Φ) on a grid; rows are computed in parallel.
pub fn contour_grid(params: &PotentialParams, spec: &GridSpec) -> Vec<GridSample> {
    let rows: Vec<Vec<GridSample>> = (0..spec.ny)
        .into_par_iter()
        .map(|j| {
            (0..spec.nx)
                .map(|i| {
                    let z = spec.variables(params, i, j);
                    let (a, b) = params.point(&z);
                    let flagged = near_pole(a, b);
                    let value = if flagged {
                        None
                    } else {
                        params.value(&z).ok().map(|f| f / TWO_PI_I)
                    };
                    GridSample { alpha: a, beta: b, value: value.unwrap_or(c(f64::NAN, f64::NAN)), near_pole: value.is_none() }
                })
                .collect()
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// Write a grid as CSV.
pub fn write_grid_csv<W: Write>(samples: &[GridSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re_alpha", "im_alpha", "re_beta", "im_beta", "re_f", "im_f", "flag"])?;
    for s in samples {
        let f = |x: f64| format!("{x:.15e}");
        w.write_record([
            f(s.alpha.re),
            f(s.alpha.im),
            f(s.beta.re),
            f(s.beta.im),
            f(s.value.re),
            f(s.value.im),
            (if s.near_pole { "near_pole" } else { "ok" }).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Cells of a one-variable grid around which the argument of f' winds,
/// i.e. cells containing a critical point. Returns cell centres.
pub fn critical_cells(params: &PotentialParams, spec: &GridSpec) -> Vec<Complex64> {
    assert_eq!(params.family, Family::W, "winding test needs a one-variable potential");
    let g = |i: usize, j: usize| -> Option<Complex64> { params.grad(&spec.variables(params, i, j)).ok().map(|v| v[0]) };
    let mut cells = Vec::new();
    for j in 0..spec.ny.saturating_sub(1) {
        for i in 0..spec.nx.saturating_sub(1) {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let vals: Option<Vec<Complex64>> = corners.iter().map(|&(a, b)| g(a, b)).collect();
            let Some(vals) = vals else { continue };
            let mut wind = 0.0;
            for k in 0..4 {
                wind += (vals[(k + 1) % 4] / vals[k]).arg();
            }
            if (wind / (2.0 * PI)).round() != 0.0 {
                let (x0, y0) = spec.coords(i, j);
                let (x1, y1) = spec.coords(i + 1, j + 1);
                cells.push(c((x0 + x1) / 2.0, (y0 + y1) / 2.0 + spec.imag_shift.0));
            }
        }
    }
    cells
}

/// Box in (α, β) ∈ ℂ² given by ranges of Re α, Im α, Re β, Im β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box4 {
    pub re_a: (f64, f64),
    pub im_a: (f64, f64),
    pub re_b: (f64, f64),
    pub im_b: (f64, f64),
}

impl Box4 {
    fn ranges(&self) -> [(f64, f64); 4] {
        [self.re_a, self.im_a, self.re_b, self.im_b]
    }

    pub fn contains(&self, a: Complex64, b: Complex64) -> bool {
        let x = [a.re, a.im, b.re, b.im];
        self.ranges().iter().zip(x).all(|(r, v)| v >= r.0 && v <= r.1)
    }
}

/// Regions used for the uniqueness checks of the critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Region {
    E,
    Eprime,
    Edoubleprime,
    Custom(Box4),
}

impl Region {
    pub fn bounds(&self) -> Box4 {
        match *self {
            Region::E => Box4 { re_a: (0.45, 0.88), im_a: (-0.12, 0.01), re_b: (0.12, 0.55), im_b: (-0.12, 0.01) },
            Region::Eprime => Box4 { re_a: (0.45, 0.88), im_a: (-0.12, 0.01), re_b: (0.45, 0.88), im_b: (-0.12, 0.01) },
            Region::Edoubleprime => Box4 { re_a: (0.45, 0.7), im_a: (-0.04, 0.01), re_b: (0.12, 0.55), im_b: (-0.18, 0.01) },
            Region::Custom(b) => b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub boundary_samples: usize,
    pub min_grad_on_boundary: f64,
    pub interior_critical_points: Vec<(Complex64, Complex64)>,
}

/// Sample |∇f| on the boundary of a box (samples spread evenly over its eight
/// three-dimensional faces) and enumerate interior critical points by Newton
/// runs from a 5×5 seed lattice.
pub fn boundary_gradient_check(p: i64, r: i64, region: Region, boundary_samples: usize) -> Result<RegionReport> {
    let params = PotentialParams::double(p, r);
    let bx = region.bounds();
    let rg = bx.ranges();
    let per_face = boundary_samples.div_ceil(8).max(1);
    let side = (per_face as f64).cbrt().ceil() as usize;
    let lin = |r: (f64, f64), k: usize, n: usize| if n <= 1 { (r.0 + r.1) / 2.0 } else { r.0 + (r.1 - r.0) * k as f64 / (n - 1) as f64 };
    let mut pts = Vec::new();
    for face in 0..8 {
        let (axis, hi) = (face / 2, face % 2 == 1);
        let free: Vec<usize> = (0..4).filter(|&a| a != axis).collect();
        let mut count = 0;
        'outer: for i in 0..side {
            for j in 0..side {
                for k in 0..side {
                    if count == per_face {
                        break 'outer;
                    }
                    let mut x = [0.0; 4];
                    x[axis] = if hi { rg[axis].1 } else { rg[axis].0 };
                    for (slot, idx) in free.iter().zip([i, j, k]) {
                        x[*slot] = lin(rg[*slot], idx, side);
                    }
                    pts.push([c(x[0], x[1]), c(x[2], x[3])]);
                    count += 1;
                }
            }
        }
    }
    let grads: Vec<f64> = pts.par_iter().map(|z| params.grad(z).map(|g| norm(&g)).unwrap_or(f64::NAN)).collect();
    if grads.iter().any(|g| g.is_nan()) {
        return Err(Error::Domain("gradient undefined on the region boundary".into()));
    }
    let min_grad = grads.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut seeds = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            let t = |r: (f64, f64), k: usize| r.0 + (r.1 - r.0) * (k as f64 + 0.5) / 5.0;
            seeds.push(vec![c(t(rg[0], i), t(rg[1], j)), c(t(rg[2], j), t(rg[3], i))]);
        }
    }
    let interior = critical_points(&params, &seeds)
        .into_iter()
        .filter(|z| bx.contains(z[0], z[1]))
        .map(|z| (z[0], z[1]))
        .collect();
    Ok(RegionReport { boundary_samples: pts.len(), min_grad_on_boundary: min_grad, interior_critical_points: interior })
}

/// Volume of the Borromean rings complement, 16Λ(π/4).
pub fn borromean_volume() -> f64 {
    16.0 * lobachevsky(PI / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ado::{log_xi, s_range};
    use crate::qnum::RootOfUnityCtx;

    #[test]
    fn anchor_and_whitehead_slice() {
        let (w, g) = w0_gamma0(c(-1.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert!((w - c(0.0, -1.0)).norm() < 1e-14);
        assert!((g - c(0.75, 0.0)).norm() < 1e-14);
        for a in [c(0.6, -0.1), c(0.856, -0.169), c(0.3, 0.05)] {
            let m = inner_max(a, c(0.5, 0.0)).unwrap();
            // √u = e^{πiα} along the continuation path.
            assert!((m.w0 + (Complex64::new(0.0, PI) * a).exp()).norm() < 1e-12, "{a}");
            let q = 2.0 * m.w0 * m.w0 - (m.u + 1.0) * (m.v + 1.0) * m.w0 + 2.0 * m.u * m.v;
            assert!(q.norm() < 1e-12);
        }
    }

    #[test]
    fn gamma0_locates_xi_maximum() {
        let n = 51;
        let ctx = RootOfUnityCtx::new(n).unwrap();
        for (k, l) in [(10, 20), (25, 25), (40, 7), (30, 44), (5, 5)] {
            let a = c((2 * k + 1) as f64 / (2 * n) as f64, 0.0);
            let b = c((2 * l + 1) as f64 / (2 * n) as f64, 0.0);
            let (_, g) = w0_gamma0(e2pi(a), e2pi(b)).unwrap();
            let pred = (n as f64 * g.re - 0.5).round() as usize;
            let best = s_range(n, k, l).max_by(|&x, &y| log_xi(&ctx, k, l, x).total_cmp(&log_xi(&ctx, k, l, y))).unwrap();
            assert!(pred.abs_diff(best) <= 1, "k={k} l={l}: predicted {pred}, actual {best}");
        }
    }

    #[test]
    fn stationarity_shortcut() {
        let h = 1e-5;
        for (a, b) in [(c(0.65, -0.05), c(0.2, -0.1)), (c(0.8, -0.1), c(0.4, 0.0))] {
            let g = psi_b_grad(a, b).unwrap();
            let fa = (psi_b(a + h, b).unwrap() - psi_b(a - h, b).unwrap()) / (2.0 * h);
            let fb = (psi_b(a, b + h).unwrap() - psi_b(a, b - h).unwrap()) / (2.0 * h);
            assert!((g[0] - fa).norm() < 1e-8 * g[0].norm().max(1.0));
            assert!((g[1] - fb).norm() < 1e-8 * g[1].norm().max(1.0));
        }
    }

    #[test]
    fn borromean_point() {
        let psi = psi_w(c(0.5, 0.0)).unwrap();
        let vb = borromean_volume();
        assert!((psi / Complex64::i() - vb).norm() < 1e-10, "{psi}");
    }

    #[test]
    fn whitehead_two() {
        let s = saddle_whitehead(2).unwrap();
        assert!((s.alpha0 - c(0.856035, -0.168907)).norm() < 1e-5);
        let closed = (c(1.0, -1.0) + c(-1.0, -2.0).sqrt()).ln() / TWO_PI_I + 1.0;
        assert!((s.alpha0 - closed).norm() < 1e-10);
        assert!((s.u - c(1.78615, -2.27202)).norm() < 1e-5);
        assert!(s.grad_residual < 1e-10);
        assert!(s.hessian_det.norm() > 1e-6);
        // dΦ_W/dα exponentiated is the meridian eigenvalue relation.
        let t = s.u.sqrt();
        let lhs = (psi_w_deriv(s.alpha0).unwrap() / TWO_PI_I).exp();
        assert!((lhs + (t - 1.0).powi(2) / (t + 1.0).powi(2)).norm() < 1e-9);
    }

    #[test]
    fn double_six_two() {
        let s = saddle_double(6, 2).unwrap();
        assert!((s.u - c(-0.619307, -0.884567)).norm() < 1e-5, "{}", s.u);
        assert!((s.v - c(1.72565, 2.06055)).norm() < 1e-5, "{}", s.v);
        assert!(s.grad_residual < 1e-10);
    }
}
