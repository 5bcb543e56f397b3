//! Colored Jones invariants J_{N−1} at q = exp(iπ/N) for the Borromean family,
//! twisted Whitehead links W_p and double twist knots D_{p,r}.
//!
//! The Whitehead and double twist formulas are derivatives of 6j state sums
//! (the degenerate 0/0 of the ADO normalization is resolved by
//! differentiating). Derivatives are taken analytically: every perturbed
//! factor {n + c, n} has log-derivatives that are prefix sums of cotangents,
//! tabulated once per N in [`RootOfUnityCtx`].

use crate::ado::{log_xi, s_range, sixj_degenerate, sixj_eps, xi_analytic, DegenerateSixJ};
use crate::error::{Error, Result};
use crate::mpsum;
use crate::qnum::{qfact, qint, qint_deriv, qpoch, LogComplex, LogSum, RootOfUnityCtx};
use crate::reduce::{par_rows, tree_reduce};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Knot and link families handled by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KnotSpec {
    Borromean,
    B1,
    B11,
    Whitehead(i64),
    DoubleTwist(i64, i64),
}

impl KnotSpec {
    /// The twist knot T_p, which is D_{p,2}.
    pub fn twist_knot(p: i64) -> Self {
        KnotSpec::DoubleTwist(p, 2)
    }
}

impl fmt::Display for KnotSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnotSpec::Borromean => write!(f, "borromean"),
            KnotSpec::B1 => write!(f, "b1"),
            KnotSpec::B11 => write!(f, "b11"),
            KnotSpec::Whitehead(p) => write!(f, "whitehead(p={p})"),
            KnotSpec::DoubleTwist(p, r) => write!(f, "double(p={p},r={r})"),
        }
    }
}

/// How a Jones value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JonesMethod {
    DirectSum,
    AnalyticDerivative,
    EpsLimit,
}

/// Largest N at which [`Precision::Auto`] keeps the twisted sums in f64.
pub const AUTO_DOUBLE_MAX_N: usize = 11;

/// Arithmetic used for the twisted (Whitehead and double twist) sums, whose
/// terms cancel heavily; the Borromean family is always summed in f64.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Double,
    Bits(u32),
    /// f64 up to [`AUTO_DOUBLE_MAX_N`], otherwise [`mpsum::auto_bits`].
    #[default]
    Auto,
}

impl Precision {
    /// Working bits at N; `None` means f64.
    pub fn resolve(self, n: usize) -> Option<u32> {
        match self {
            Precision::Double => None,
            Precision::Bits(b) => Some(b.max(64)),
            Precision::Auto if n <= AUTO_DOUBLE_MAX_N => None,
            Precision::Auto => Some(mpsum::auto_bits(n)),
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Double => write!(f, "double"),
            Precision::Bits(b) => write!(f, "{b}"),
            Precision::Auto => write!(f, "auto"),
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;

    /// "auto", "double" or a bit count.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "auto" => Ok(Precision::Auto),
            "double" => Ok(Precision::Double),
            t => t.parse().map(Precision::Bits).map_err(|_| format!("precision must be auto, double or a bit count, got {t:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JonesValue {
    pub value: LogComplex,
    pub n: usize,
    pub knot: KnotSpec,
    pub method: JonesMethod,
    /// log J on the branch obtained by keeping the phase of the q-power
    /// prefactor unreduced and taking the principal argument of the sum.
    pub log_branch: Complex64,
    /// Mantissa bits of the summation (53 for f64).
    pub precision_bits: u32,
}

impl JonesValue {
    pub fn to_complex(&self) -> Complex64 {
        self.value.to_complex()
    }

    /// (2π/N)·log J on the recorded branch.
    pub fn growth(&self) -> Complex64 {
        self.log_branch * (2.0 * PI / self.n as f64)
    }
}

/// Build a value from a prefactor e^{pre_log} (phase unreduced) and a sum.
fn assemble(ctx: &RootOfUnityCtx, knot: KnotSpec, method: JonesMethod, pre_log: Complex64, sum: LogComplex) -> JonesValue {
    let log_branch = pre_log + sum.ln();
    JonesValue { value: LogComplex::new(log_branch.re, log_branch.im), n: ctx.n(), knot, method, log_branch, precision_bits: 53 }
}

/// Σ over rows k of per-row partial sums, reduced deterministically.
fn row_sum<F>(ctx: &RootOfUnityCtx, row: F) -> LogComplex
where
    F: Fn(usize) -> LogSum + Sync + Send,
{
    let rows = par_rows(ctx.n(), row);
    tree_reduce(&rows, LogSum::new(), &|a: LogSum, b: LogSum| a.merge(b)).finish()
}

/// Σ_{l,s} ξ_N(k, l, s)·w(k, l), each (k,l) block max-shifted.
fn borromean_family(ctx: &RootOfUnityCtx, weight: impl Fn(usize, usize) -> Complex64 + Sync + Send) -> LogComplex {
    let n = ctx.n();
    row_sum(ctx, |k| {
        let mut acc = LogSum::new();
        for l in 0..n {
            let (m, s0) = xi_block(ctx, k, l);
            acc.push_scaled(m, weight(k, l) * s0);
        }
        acc
    })
}

/// (max log ξ, Σ_s ξ e^{−max}) for fixed (k, l).
fn xi_block(ctx: &RootOfUnityCtx, k: usize, l: usize) -> (f64, f64) {
    let n = ctx.n();
    let m = s_range(n, k, l).map(|s| log_xi(ctx, k, l, s)).fold(f64::NEG_INFINITY, f64::max);
    let s0 = s_range(n, k, l).map(|s| (log_xi(ctx, k, l, s) - m).exp()).sum();
    (m, s0)
}

/// J_{N−1}(B) = N² Σ_{k,l} Σ_s ξ_N(k, l, s).
pub fn jones_borromean(ctx: &RootOfUnityCtx) -> JonesValue {
    let sum = borromean_family(ctx, |_, _| Complex64::new(1.0, 0.0));
    let pre = Complex64::new(2.0 * (ctx.n() as f64).ln(), 0.0);
    assemble(ctx, KnotSpec::Borromean, JonesMethod::DirectSum, pre, sum)
}

/// J_{N−1}(B₁) = N² q^{−(N−1)²/4} Σ q^{(k−h)²} ξ_N(k, l, s), h = (N−1)/2.
pub fn jones_b1(ctx: &RootOfUnityCtx) -> JonesValue {
    let h = ctx.half();
    let sum = borromean_family(ctx, |k, _| ctx.q_pow_re((k as f64 - h).powi(2)));
    let nf = ctx.n() as f64;
    let pre = Complex64::new(2.0 * nf.ln(), -ctx.pi_over_n() * (nf - 1.0).powi(2) / 4.0);
    assemble(ctx, KnotSpec::B1, JonesMethod::DirectSum, pre, sum)
}

/// J_{N−1}(B₁,₁) = N² q^{−(N−1)²/2} Σ q^{(k−h)² + (l−h)²} ξ_N(k, l, s).
pub fn jones_b11(ctx: &RootOfUnityCtx) -> JonesValue {
    let h = ctx.half();
    let sum = borromean_family(ctx, |k, l| ctx.q_pow_re((k as f64 - h).powi(2) + (l as f64 - h).powi(2)));
    let nf = ctx.n() as f64;
    let pre = Complex64::new(2.0 * nf.ln(), -ctx.pi_over_n() * (nf - 1.0).powi(2) / 2.0);
    assemble(ctx, KnotSpec::B11, JonesMethod::DirectSum, pre, sum)
}

/// ∂/∂ε and ∂/∂δ of log {s+ε+δ, s}/({s−k−ε+δ, s−k}{s−l+ε−δ, s−l}{k+l−s+ε+δ, k+l−s})
/// at 0, and the mixed second derivative.
#[inline]
fn kernel_log_derivs(ctx: &RootOfUnityCtx, k: usize, l: usize, s: usize) -> (f64, f64, f64) {
    let (a, b, c, d) = (s, s - k, s - l, k + l - s);
    let (ca, cb, cc, cd) = (ctx.cot_prefix(a), ctx.cot_prefix(b), ctx.cot_prefix(c), ctx.cot_prefix(d));
    let le = ca + cb - cc - cd;
    let ld = ca - cb + cc - cd;
    let led = ctx.csc2_prefix(a) + ctx.csc2_prefix(b) + ctx.csc2_prefix(c) - ctx.csc2_prefix(d);
    (le, ld, led)
}

/// A(x) = q^{p(x−h)²}{2x+1} and A'(x) at integer x = k.
fn twist_factor(ctx: &RootOfUnityCtx, p: f64, k: usize) -> (Complex64, Complex64) {
    let h = ctx.half();
    let x = k as f64;
    let qp = ctx.q_pow_re(p * (x - h).powi(2));
    let two_x1 = Complex64::new(2.0 * x + 1.0, 0.0);
    let a = qp * qint(ctx, two_x1);
    let dlogq = Complex64::new(0.0, ctx.pi_over_n() * 2.0 * p * (x - h));
    let da = dlogq * a + qp * 2.0 * qint_deriv(ctx, two_x1);
    (a, da)
}

/// Per-(k,l) max-shifted sums Σ_s ξ·{1, Lε, Lδ, Lεδ + Lε·Lδ}.
fn derivative_block(ctx: &RootOfUnityCtx, k: usize, l: usize) -> (f64, [f64; 4]) {
    let n = ctx.n();
    let m = s_range(n, k, l).map(|s| log_xi(ctx, k, l, s)).fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; 4];
    for s in s_range(n, k, l) {
        let w = (log_xi(ctx, k, l, s) - m).exp();
        let (le, ld, led) = kernel_log_derivs(ctx, k, l, s);
        out[0] += w;
        out[1] += w * le;
        out[2] += w * ld;
        out[3] += w * (led + le * ld);
    }
    (m, out)
}

fn check_whitehead(p: i64) -> Result<()> {
    if p.abs() < 2 {
        return Err(Error::Domain(format!("twisted Whitehead link needs |p| >= 2, got {p}")));
    }
    Ok(())
}

/// J_{N−1}(W_p) = −N² q^{p(N−1)²/4}/(4πi) · Σ_{k,l} d/dx [q^{p(x−h)²}{2x+1}
/// Σ_s ξ_N(x, l, s + (x−k)/2)]_{x=k}, with the holomorphic ξ of
/// [`xi_analytic`]; the s-sum is reparametrized so its bounds do not move.
pub fn jones_whitehead(ctx: &RootOfUnityCtx, p: i64) -> Result<JonesValue> {
    jones_whitehead_with(ctx, p, Precision::Auto)
}

/// [`jones_whitehead`] with an explicit summation precision.
pub fn jones_whitehead_with(ctx: &RootOfUnityCtx, p: i64, precision: Precision) -> Result<JonesValue> {
    check_whitehead(p)?;
    let n = ctx.n();
    let pf = p as f64;
    let bits = precision.resolve(n);
    let sum = match bits {
        Some(b) => mpsum::whitehead_sum(n, p, b),
        None => whitehead_sum_f64(ctx, pf),
    };
    let nf = n as f64;
    // −1/(4πi) = e^{iπ/2}/(4π).
    let pre = Complex64::new(2.0 * nf.ln() - (4.0 * PI).ln(), PI / 2.0 + ctx.pi_over_n() * pf * (nf - 1.0).powi(2) / 4.0);
    let mut v = assemble(ctx, KnotSpec::Whitehead(p), JonesMethod::AnalyticDerivative, pre, sum);
    v.precision_bits = bits.unwrap_or(53);
    Ok(v)
}

fn whitehead_sum_f64(ctx: &RootOfUnityCtx, pf: f64) -> LogComplex {
    let n = ctx.n();
    row_sum(ctx, |k| {
        let (a, da) = twist_factor(ctx, pf, k);
        let mut acc = LogSum::new();
        for l in 0..n {
            let (m, sb) = derivative_block(ctx, k, l);
            acc.push_scaled(m, da * sb[0] + a * sb[1]);
        }
        acc
    })
}

/// J_{N−1}(D_{p,r}) = −N² q^{(p−r)(N−1)²/4}/(16π²) · ∂²F/∂ε∂δ at 0, where
/// F(ε,δ) = Σ_{k,l} q^{p(k+ε−h)² − r(l+δ−h)²}{2k+2ε+1}{2l+2δ+1} Σ_s
/// {s}!{s+ε+δ, s} / ({s−k}!{s−k−ε+δ, s−k} {s−l}!{s−l+ε−δ, s−l} {k+l−s}!{k+l−s+ε+δ, k+l−s}).
pub fn jones_double_twist(ctx: &RootOfUnityCtx, p: i64, r: i64) -> Result<JonesValue> {
    jones_double_twist_with(ctx, p, r, Precision::Auto)
}

/// [`jones_double_twist`] with an explicit summation precision.
pub fn jones_double_twist_with(ctx: &RootOfUnityCtx, p: i64, r: i64, precision: Precision) -> Result<JonesValue> {
    let n = ctx.n();
    let (pf, rf) = (p as f64, r as f64);
    let bits = precision.resolve(n);
    let sum = match bits {
        Some(b) => mpsum::double_twist_sum(n, p, r, b),
        None => double_twist_sum_f64(ctx, pf, rf),
    };
    let nf = n as f64;
    let pre = Complex64::new(
        2.0 * nf.ln() - (16.0 * PI * PI).ln(),
        PI + ctx.pi_over_n() * (pf - rf) * (nf - 1.0).powi(2) / 4.0,
    );
    let mut v = assemble(ctx, KnotSpec::DoubleTwist(p, r), JonesMethod::AnalyticDerivative, pre, sum);
    v.precision_bits = bits.unwrap_or(53);
    Ok(v)
}

fn double_twist_sum_f64(ctx: &RootOfUnityCtx, pf: f64, rf: f64) -> LogComplex {
    let n = ctx.n();
    row_sum(ctx, |k| {
        let (a, da) = twist_factor(ctx, pf, k);
        let mut inner_a = LogSum::new();
        let mut inner_da = LogSum::new();
        for l in 0..n {
            let (b, db) = twist_factor(ctx, -rf, l);
            let (m, sb) = derivative_block(ctx, k, l);
            // ∂εδ(A B S) = A'B' S + A'B S_δ + A B' S_ε + A B S_εδ.
            inner_da.push_scaled(m, db * sb[0] + b * sb[2]);
            inner_a.push_scaled(m, db * sb[1] + b * sb[3]);
        }
        let (x, y) = (inner_da.finish(), inner_a.finish());
        let mut acc = LogSum::new();
        acc.push(x.scale(da));
        acc.push(y.scale(a));
        acc
    })
}

/// Dispatch on the knot family.
pub fn jones(ctx: &RootOfUnityCtx, knot: KnotSpec) -> Result<JonesValue> {
    jones_with(ctx, knot, Precision::Auto)
}

/// [`jones`] with an explicit precision for the twisted sums.
pub fn jones_with(ctx: &RootOfUnityCtx, knot: KnotSpec, precision: Precision) -> Result<JonesValue> {
    match knot {
        KnotSpec::Borromean => Ok(jones_borromean(ctx)),
        KnotSpec::B1 => Ok(jones_b1(ctx)),
        KnotSpec::B11 => Ok(jones_b11(ctx)),
        KnotSpec::Whitehead(p) => jones_whitehead_with(ctx, p, precision),
        KnotSpec::DoubleTwist(p, r) => jones_double_twist_with(ctx, p, r, precision),
    }
}

/// The function G(ε) whose derivative at 0, times −N²q^{p(N−1)²/4}/(4πi),
/// is J_{N−1}(W_p), evaluated in plain complex arithmetic (for small N).
pub fn whitehead_pre_derivative(ctx: &RootOfUnityCtx, p: i64, eps: f64) -> Result<Complex64> {
    let n = ctx.n();
    let h = ctx.half();
    let pf = p as f64;
    let mut tot = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let x = k as f64 + eps;
        let pre = ctx.q_pow_re(pf * (x - h).powi(2)) * qint(ctx, Complex64::new(2.0 * x + 1.0, 0.0));
        for l in 0..n {
            for s in s_range(n, k, l) {
                let v = xi_analytic(
                    ctx,
                    Complex64::new(x, 0.0),
                    Complex64::new(l as f64, 0.0),
                    Complex64::new(s as f64 + eps / 2.0, 0.0),
                )?;
                tot += pre * v.to_complex();
            }
        }
    }
    Ok(tot)
}

/// Global factor −N² q^{p(N−1)²/4}/(4πi) of the Whitehead formula.
pub fn whitehead_prefactor(ctx: &RootOfUnityCtx, p: i64) -> Complex64 {
    let nf = ctx.n() as f64;
    -ctx.q_pow_re(p as f64 * (nf - 1.0).powi(2) / 4.0) * nf * nf / Complex64::new(0.0, 4.0 * PI)
}

/// The function F(ε, δ) of [`jones_double_twist`] in plain complex arithmetic.
pub fn double_twist_pre_derivative(ctx: &RootOfUnityCtx, p: i64, r: i64, eps: f64, delta: f64) -> Result<Complex64> {
    let n = ctx.n();
    let h = ctx.half();
    let (pf, rf) = (p as f64, r as f64);
    let re = |x: f64| Complex64::new(x, 0.0);
    let mut tot = Complex64::new(0.0, 0.0);
    for k in 0..n {
        for l in 0..n {
            let (x, y) = (k as f64 + eps, l as f64 + delta);
            let pre = ctx.q_pow_re(pf * (x - h).powi(2) - rf * (y - h).powi(2))
                * qint(ctx, re(2.0 * x + 1.0))
                * qint(ctx, re(2.0 * y + 1.0));
            for s in s_range(n, k, l) {
                let base = (0.5 * log_xi(ctx, k, l, s)).exp();
                let sf = s as f64;
                let num = qpoch(ctx, re(sf + eps + delta), s);
                let den = qpoch(ctx, re(sf - k as f64 - eps + delta), s - k)
                    * qpoch(ctx, re(sf - l as f64 + eps - delta), s - l)
                    * qpoch(ctx, re((k + l) as f64 - sf + eps + delta), k + l - s);
                tot += pre * base * (num / den).to_complex();
            }
        }
    }
    Ok(tot)
}

/// Global factor −N² q^{(p−r)(N−1)²/4}/(16π²) of the double twist formula.
pub fn double_twist_prefactor(ctx: &RootOfUnityCtx, p: i64, r: i64) -> Complex64 {
    let nf = ctx.n() as f64;
    -ctx.q_pow_re((p - r) as f64 * (nf - 1.0).powi(2) / 4.0) * nf * nf / (16.0 * PI * PI)
}

/// The un-differentiated ε-perturbed Whitehead state sum built from 6j
/// symbols, whose ε → 0 limit is J_{N−1}(W_p):
/// q^{p(N−1)²/4} Σ_{k,l} q^{p(k+ε−h)² − pε²} {N−1}!² {2k+2ε+1} i^{N−1} / {2k+2ε+N, N}
/// · {N−1−ε, N−1}/{N−1}! · {6j}(k, l; ε/2, −ε/2).
pub fn whitehead_eps_chain(ctx: &RootOfUnityCtx, p: i64, eps: f64) -> Result<Complex64> {
    let n = ctx.n();
    let h = ctx.half();
    let nf = n as f64;
    let pf = p as f64;
    let re = |x: f64| Complex64::new(x, 0.0);
    let top2 = qfact(ctx, n - 1)?.powi(2).to_complex();
    let ipow = Complex64::i().powu((n - 1) as u32);
    let deg = sixj_degenerate(ctx, DegenerateSixJ::HalfEpsLeg { l: 0, eps: re(eps) })?.to_complex();
    let mut tot = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let x = k as f64 + eps;
        let outer = ctx.q_pow_re(pf * (x - h).powi(2) - pf * eps * eps) * top2 * qint(ctx, re(2.0 * x + 1.0)) * ipow
            / qpoch(ctx, re(2.0 * x + nf), n).to_complex()
            * deg;
        for l in 0..n {
            tot += outer * sixj_eps(ctx, k, l, re(eps / 2.0), re(-eps / 2.0))?.to_complex();
        }
    }
    Ok(ctx.q_pow_re(pf * (nf - 1.0).powi(2) / 4.0) * tot)
}

/// The un-differentiated (ε, δ)-perturbed double twist state sum built from
/// 6j symbols, whose (ε, δ) → 0 limit is J_{N−1}(D_{p,r}).
pub fn double_twist_eps_chain(ctx: &RootOfUnityCtx, p: i64, r: i64, eps: f64, delta: f64) -> Result<Complex64> {
    let n = ctx.n();
    let h = ctx.half();
    let nf = n as f64;
    let (pf, rf) = (p as f64, r as f64);
    let re = |x: f64| Complex64::new(x, 0.0);
    let top2 = qfact(ctx, n - 1)?.powi(2).to_complex();
    let mut tot = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let x = k as f64 + eps;
        let kpart = qint(ctx, re(2.0 * x + 1.0)) / qpoch(ctx, re(2.0 * x + nf), n).to_complex()
            * sixj_degenerate(ctx, DegenerateSixJ::TwoParamK { k, eps: re(eps), delta: re(delta) })?.to_complex();
        for l in 0..n {
            let y = l as f64 + delta;
            let phase = ctx.q_pow_re(
                pf * (x - h).powi(2) - rf * (y - h).powi(2) - (pf - rf) * (eps * eps + delta * delta) / 2.0,
            );
            let lpart = qint(ctx, re(2.0 * y + 1.0)) / qpoch(ctx, re(2.0 * y + nf), n).to_complex()
                * sixj_degenerate(ctx, DegenerateSixJ::TwoParamL { l, eps: re(eps), delta: re(delta) })?.to_complex();
            let six = sixj_eps(ctx, k, l, re((eps + delta) / 2.0), re((delta - eps) / 2.0))?.to_complex();
            tot += phase * top2 * kpart * lpart * six;
        }
    }
    Ok(ctx.q_pow_re((pf - rf) * (nf - 1.0).powi(2) / 4.0) * tot)
}

/// ε → 0 limit of [`whitehead_eps_chain`]: symmetric average (error O(ε²))
/// with one Richardson step.
pub fn jones_whitehead_eps_limit(ctx: &RootOfUnityCtx, p: i64, eps: f64) -> Result<JonesValue> {
    check_whitehead(p)?;
    let g = |e: f64| -> Result<Complex64> { Ok((whitehead_eps_chain(ctx, p, e)? + whitehead_eps_chain(ctx, p, -e)?) / 2.0) };
    let v = (g(eps / 2.0)? * 4.0 - g(eps)?) / 3.0;
    Ok(assemble(ctx, KnotSpec::Whitehead(p), JonesMethod::EpsLimit, Complex64::new(0.0, 0.0), LogComplex::from_complex(v)))
}

/// (ε, δ) → 0 limit of [`double_twist_eps_chain`]: average over the four sign
/// choices with one Richardson step.
pub fn jones_double_twist_eps_limit(ctx: &RootOfUnityCtx, p: i64, r: i64, eps: f64) -> Result<JonesValue> {
    let g = |e: f64| -> Result<Complex64> {
        let mut t = Complex64::new(0.0, 0.0);
        for (a, b) in [(e, e), (e, -e), (-e, e), (-e, -e)] {
            t += double_twist_eps_chain(ctx, p, r, a, b)?;
        }
        Ok(t / 4.0)
    };
    let v = (g(eps / 2.0)? * 4.0 - g(eps)?) / 3.0;
    Ok(assemble(ctx, KnotSpec::DoubleTwist(p, r), JonesMethod::EpsLimit, Complex64::new(0.0, 0.0), LogComplex::from_complex(v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: usize) -> RootOfUnityCtx {
        RootOfUnityCtx::new(n).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    /// Kashaev-type sums Σ_n ∏_{j≤n}(1−ω^j) with ω = e^{2πi/N}.
    fn kashaev(n: usize, abs2: bool) -> Complex64 {
        let w = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
        let (mut t, mut prod) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        for j in 0..n {
            t += if abs2 { Complex64::new(prod.norm_sqr(), 0.0) } else { prod };
            prod *= Complex64::new(1.0, 0.0) - w.powu(j as u32 + 1);
        }
        t
    }

    #[test]
    fn borromean_n3_brute_force() {
        let c = ctx(3);
        let mut direct = 0.0;
        for k in 0..3 {
            for l in 0..3 {
                for s in s_range(3, k, l) {
                    let num = qpoch(&c, Complex64::new(s as f64, 0.0), s).to_complex();
                    let den = qpoch(&c, Complex64::new((s - k) as f64, 0.0), s - k).to_complex()
                        * qpoch(&c, Complex64::new((s - l) as f64, 0.0), s - l).to_complex()
                        * qpoch(&c, Complex64::new((k + l - s) as f64, 0.0), k + l - s).to_complex();
                    direct += (num / den).powu(2).re;
                }
            }
        }
        let v = jones_borromean(&c);
        assert!(v.value.phase.abs() < 1e-12);
        assert!(close(v.to_complex(), Complex64::new(9.0 * direct, 0.0), 1e-12));
    }

    #[test]
    fn borromean_dominant_term() {
        let n = 21;
        let c = ctx(n);
        let mut best = (f64::NEG_INFINITY, 0, 0, 0);
        for k in 0..n {
            for l in 0..n {
                for s in s_range(n, k, l) {
                    let v = log_xi(&c, k, l, s);
                    if v > best.0 + 1e-12 {
                        best = (v, k, l, s);
                    }
                }
            }
        }
        let (kk, ss) = ((n - 1) / 2, 3 * (n - 1) / 4);
        assert!((log_xi(&c, kk, kk, ss) - best.0).abs() < 1e-12);
    }

    #[test]
    fn b1_b11_bounded_by_borromean() {
        for n in [5, 9, 15] {
            let c = ctx(n);
            let b = jones_borromean(&c).value.logmag;
            assert!(jones_b1(&c).value.logmag <= b + 1e-12);
            assert!(jones_b11(&c).value.logmag <= b + 1e-12);
        }
    }

    #[test]
    fn whitehead_eps_oracle_and_mirror() {
        let c = ctx(5);
        for p in [2, 3] {
            let a = jones_whitehead(&c, p).unwrap().to_complex();
            let b = jones_whitehead_eps_limit(&c, p, 1e-4).unwrap().to_complex();
            assert!(close(a, b, 1e-5), "p={p}: {a} vs {b}");
            let m = jones_whitehead(&c, -p).unwrap().to_complex();
            assert!(close(m, a.conj(), 1e-10));
        }
        let w2 = jones_whitehead(&c, 2).unwrap().to_complex();
        assert!(close(w2, Complex64::new(115.9549, 117.9233), 1e-6));
    }

    #[test]
    fn whitehead_finite_difference() {
        let c = ctx(7);
        let a = jones_whitehead(&c, 3).unwrap().to_complex();
        let g = |e: f64| whitehead_pre_derivative(&c, 3, e).unwrap();
        let h = 1e-3;
        let fd = (g(-2.0 * h) - g(2.0 * h) * 1.0 + (g(h) - g(-h)) * 8.0) / (12.0 * h);
        let fd = fd * whitehead_prefactor(&c, 3);
        assert!(close(a, fd, 1e-7), "{a} vs {fd}");
    }

    #[test]
    fn double_twist_kashaev_oracles() {
        for n in [3, 5, 7] {
            let c = ctx(n);
            let fig8 = jones_double_twist(&c, 2, 2).unwrap().to_complex();
            assert!(close(fig8, kashaev(n, true), 1e-11), "N={n}");
            let tref = jones_double_twist(&c, -2, 2).unwrap().to_complex();
            assert!(close(tref, kashaev(n, false), 1e-11), "N={n}");
        }
        let c = ctx(3);
        assert!(close(jones_double_twist(&c, 2, 2).unwrap().to_complex(), Complex64::new(13.0, 0.0), 1e-12));
    }

    #[test]
    fn double_twist_reference_values() {
        let c = ctx(5);
        let v = jones_double_twist(&c, 6, 2).unwrap().to_complex();
        assert!(close(v, Complex64::new(157.803398875, 105.211734723), 1e-9));
        let v = jones_double_twist(&c, 4, 4).unwrap().to_complex();
        assert!(close(v, Complex64::new(282.535994664, 0.0), 1e-9));
        let c3 = ctx(3);
        let v = jones_double_twist(&c3, 5, 3).unwrap().to_complex();
        assert!(close(v, Complex64::new(-42.0, -36.3730669589), 1e-9));
    }

    #[test]
    fn double_twist_eps_oracle() {
        let c = ctx(5);
        for (p, r) in [(6, 2), (4, 4), (5, 3)] {
            let a = jones_double_twist(&c, p, r).unwrap().to_complex();
            let b = jones_double_twist_eps_limit(&c, p, r, 1e-3).unwrap().to_complex();
            assert!(close(a, b, 1e-4), "({p},{r}): {a} vs {b}");
        }
    }

    #[test]
    fn double_twist_mirrors() {
        let c = ctx(5);
        let a = jones_double_twist(&c, 6, 2).unwrap().to_complex();
        let m = jones_double_twist(&c, -6, -2).unwrap().to_complex();
        assert!(close(m, a.conj(), 1e-10));
        let s = jones_double_twist(&c, -2, -6).unwrap().to_complex();
        assert!(close(s, a, 1e-10));
    }

    #[test]
    fn double_twist_nested_finite_difference() {
        let c = ctx(5);
        let a = jones_double_twist(&c, 4, 4).unwrap().to_complex();
        let f = |e: f64, d: f64| double_twist_pre_derivative(&c, 4, 4, e, d).unwrap();
        let h = 1e-3;
        let mixed = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        let h2 = h / 2.0;
        let mixed2 = (f(h2, h2) - f(h2, -h2) - f(-h2, h2) + f(-h2, -h2)) / (4.0 * h2 * h2);
        let rich = (mixed2 * 4.0 - mixed) / 3.0;
        assert!(close(a, rich * double_twist_prefactor(&c, 4, 4), 1e-6));
    }

    #[test]
    fn multiprecision_matches_double_at_small_n() {
        for n in [5, 9, 11] {
            let c = ctx(n);
            for k in [KnotSpec::Whitehead(2), KnotSpec::Whitehead(-3), KnotSpec::DoubleTwist(6, 2), KnotSpec::DoubleTwist(5, 3)] {
                let a = jones_with(&c, k, Precision::Double).unwrap();
                let b = jones_with(&c, k, Precision::Bits(160)).unwrap();
                assert_eq!(b.precision_bits, 160);
                assert!((a.log_branch - b.log_branch).norm() < 1e-12, "{k} N={n}");
            }
        }
    }

    #[test]
    fn auto_precision_switches_above_threshold() {
        assert_eq!(Precision::Auto.resolve(AUTO_DOUBLE_MAX_N), None);
        assert!(Precision::Auto.resolve(AUTO_DOUBLE_MAX_N + 2).is_some());
        let c = ctx(31);
        let a = jones_whitehead(&c, 2).unwrap();
        let b = jones_whitehead_with(&c, 2, Precision::Bits(a.precision_bits + 64)).unwrap();
        assert!((a.log_branch - b.log_branch).norm() < 1e-13);
    }
}
