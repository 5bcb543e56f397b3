//! Closed-form quantum 6j symbols of the ADO theory at q = exp(iπ/N).
//!
//! The tetrahedral symbol {a b e; d c f} is evaluated with the four-binomial
//! sum; the (N−1)/2-colored family reduces to a sum of the positive kernel
//! ξ_N(k, l, s) = {s}!² / ({s−k}!² {s−l}!² {k+l−s}!²).

use crate::error::{Error, Result};
use crate::qnum::{binom_length, qbinom, qfact, qpoch, LogComplex, LogSum, RootOfUnityCtx};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Edge colors of the tetrahedral graph, written {a b e; d c f}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SixJColors {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
    pub f: Complex64,
}

/// Orientation type of a trivalent vertex, which fixes the admissibility window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    /// a + b + c ∈ {−2N+2, …, −N+1}.
    SumLow,
    /// a + b − c ∈ {−N+1, …, 0}.
    DiffLow,
    /// a + b − c ∈ {0, …, N−1}.
    DiffHigh,
    /// a + b + c ∈ {N−1, …, 2N−2}.
    SumHigh,
}

const INT_TOL: f64 = 1e-6;

fn near_int(z: Complex64) -> Option<i64> {
    let r = z.re.round();
    if (z - r).norm() <= INT_TOL {
        Some(r as i64)
    } else {
        None
    }
}

/// Whether the three colors around a vertex of the given kind are admissible.
pub fn admissible(ctx: &RootOfUnityCtx, a: Complex64, b: Complex64, c: Complex64, kind: VertexKind) -> bool {
    let n = ctx.n() as i64;
    let (val, lo, hi) = match kind {
        VertexKind::SumLow => (a + b + c, -2 * n + 2, -n + 1),
        VertexKind::DiffLow => (a + b - c, -n + 1, 0),
        VertexKind::DiffHigh => (a + b - c, 0, n - 1),
        VertexKind::SumHigh => (a + b + c, n - 1, 2 * n - 2),
    };
    matches!(near_int(val), Some(m) if m >= lo && m <= hi)
}

fn int_in_range(ctx: &RootOfUnityCtx, z: Complex64, what: &str) -> Result<usize> {
    match near_int(z) {
        Some(m) if m >= 0 && m < ctx.n() as i64 => Ok(m as usize),
        _ => Err(Error::Domain(format!("{what} = {z} is not an integer in 0..={}", ctx.n() - 1))),
    }
}

/// Ratio [x; y] / [x; z] of two binomials sharing the upper entry. Identical
/// lower entries cancel exactly even when both binomials vanish.
fn binom_ratio(ctx: &RootOfUnityCtx, x: Complex64, y: Complex64, z: Complex64) -> Result<LogComplex> {
    if (y - z).norm() <= INT_TOL {
        binom_length(ctx, x, y)?;
        return Ok(LogComplex::ONE);
    }
    let num = qbinom(ctx, x, y)?;
    let den = qbinom(ctx, x, z)?;
    Ok(num * den.inv()?)
}

/// The general quantum 6j symbol {a b e; d c f}.
pub fn sixj_general(ctx: &RootOfUnityCtx, col: &SixJColors) -> Result<LogComplex> {
    let SixJColors { a, b, c, d, e, f } = *col;
    let nn = ctx.n() as f64;
    let bxyz = |x: Complex64, y: Complex64, z: Complex64| x + y - z;
    let axyz = |x: Complex64, y: Complex64, z: Complex64| x + y + z;
    let b_dec = int_in_range(ctx, bxyz(d, e, c), "B_dec")?;
    let b_abe = int_in_range(ctx, bxyz(a, b, e), "B_abe")?;
    let b_bdf = int_in_range(ctx, bxyz(b, d, f), "B_bdf")?;
    let b_afc = int_in_range(ctx, bxyz(a, f, c), "B_afc")?;

    let sign = if (ctx.n() - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let mut pre = qfact(ctx, b_dec)? * qfact(ctx, b_abe)? * (qfact(ctx, b_bdf)? * qfact(ctx, b_afc)?).inv()?;
    pre = pre.scale(Complex64::new(sign, 0.0));
    pre = pre * binom_ratio(ctx, 2.0 * e, axyz(a, b, e) + 1.0 - nn, bxyz(c, e, d))?;

    let lo = (b_dec as i64 - b_bdf as i64).max(0);
    let hi = b_dec.min(b_afc) as i64;
    let b_acf = bxyz(a, c, f);
    let b_bfd = bxyz(b, f, d);
    let b_cde = bxyz(c, d, e);
    let b_dfb = bxyz(d, f, b);
    let a_acf = axyz(a, c, f);
    let mut acc = LogSum::new();
    for s in lo..=hi {
        let sf = s as f64;
        let t = qbinom(ctx, a_acf + 1.0 - nn, 2.0 * c + sf + 1.0 - nn)?
            * qbinom(ctx, b_acf + sf, b_acf)?
            * qbinom(ctx, b_bfd + b_dec as f64 - sf, b_bfd)?
            * qbinom(ctx, b_cde + sf, b_dfb)?;
        acc.push(t);
    }
    Ok(pre * acc.finish())
}

fn check_kl(ctx: &RootOfUnityCtx, k: usize, l: usize) -> Result<()> {
    if k >= ctx.n() || l >= ctx.n() {
        return Err(Error::Domain(format!("k = {k}, l = {l} must lie in 0..={}", ctx.n() - 1)));
    }
    Ok(())
}

/// Summation range max(k, l) ..= min(k + l, N − 1) of the ξ-sums.
#[inline]
pub fn s_range(n: usize, k: usize, l: usize) -> std::ops::RangeInclusive<usize> {
    k.max(l)..=(k + l).min(n - 1)
}

/// log ξ_N(k, l, s) (ξ is a positive real).
#[inline]
pub fn log_xi(ctx: &RootOfUnityCtx, k: usize, l: usize, s: usize) -> f64 {
    2.0 * (ctx.log_fact(s) - ctx.log_fact(s - k) - ctx.log_fact(s - l) - ctx.log_fact(k + l - s))
}

/// ξ_N(k, l, s) = {s}!² / ({s−k}!² {s−l}!² {k+l−s}!²) for max(k,l) ≤ s ≤ min(k+l, N−1).
pub fn xi(ctx: &RootOfUnityCtx, k: usize, l: usize, s: usize) -> Result<LogComplex> {
    check_kl(ctx, k, l)?;
    if !s_range(ctx.n(), k, l).contains(&s) {
        return Err(Error::Domain(format!("s = {s} outside max(k,l)..=min(k+l,N-1) for k = {k}, l = {l}")));
    }
    Ok(LogComplex::new(log_xi(ctx, k, l, s), 0.0))
}

/// Unsquared holomorphic kernel
/// {s, n₀} / ({s−x, n₁} {s−y, n₂} {x+y−s, n₃}),
/// where each length nᵢ is the nearest integer to the real part of the first
/// argument. At integer points it is {s}!/({s−k}!{s−l}!{k+l−s}!).
pub fn kernel_analytic(ctx: &RootOfUnityCtx, x: Complex64, y: Complex64, s: Complex64) -> Result<LogComplex> {
    let len = |z: Complex64| -> Result<usize> {
        let r = z.re.round();
        if r < 0.0 || r >= ctx.n() as f64 {
            return Err(Error::Domain(format!("analytic factorial argument {z} outside 0..N")));
        }
        Ok(r as usize)
    };
    let num = qpoch(ctx, s, len(s)?);
    let den = qpoch(ctx, s - x, len(s - x)?) * qpoch(ctx, s - y, len(s - y)?) * qpoch(ctx, x + y - s, len(x + y - s)?);
    if den.is_zero() {
        return Err(Error::Domain(format!("pole of the analytic kernel at ({x}, {y}, {s})")));
    }
    Ok(num / den)
}

/// Holomorphic extension of ξ_N: the square of [`kernel_analytic`].
pub fn xi_analytic(ctx: &RootOfUnityCtx, x: Complex64, y: Complex64, s: Complex64) -> Result<LogComplex> {
    Ok(kernel_analytic(ctx, x, y, s)?.powi(2))
}

/// The ε = 0 symbol {h h l; h h k} with h = (N−1)/2, as Σ_s ξ_N(k, l, s).
pub fn sixj_half(ctx: &RootOfUnityCtx, k: usize, l: usize) -> Result<LogComplex> {
    check_kl(ctx, k, l)?;
    let mut acc = LogSum::new();
    for s in s_range(ctx.n(), k, l) {
        acc.push_scaled(log_xi(ctx, k, l, s), Complex64::new(1.0, 0.0));
    }
    Ok(acc.finish())
}

/// Colors {h h l; h h k} of the ε = 0 family.
pub fn half_colors(ctx: &RootOfUnityCtx, k: usize, l: usize) -> SixJColors {
    let h = Complex64::new(ctx.half(), 0.0);
    SixJColors { a: h, b: h, c: h, d: h, e: Complex64::new(l as f64, 0.0), f: Complex64::new(k as f64, 0.0) }
}

/// Perturbed symbol {h+δ, h+ε, l+ε+δ; h−δ, h+ε, k+ε−δ}:
/// {N−1−2δ, N−1}/{N−1}! · Σ_s {s}!/({s−k}!{s−l}!{k+l−s}!) ·
/// {s+2ε, s} / ({s−k+2δ, s−k} {s−l−2δ, s−l} {k+l−s+2ε, k+l−s}).
pub fn sixj_eps(ctx: &RootOfUnityCtx, k: usize, l: usize, eps: Complex64, delta: Complex64) -> Result<LogComplex> {
    check_kl(ctx, k, l)?;
    if eps.norm() >= 0.5 || delta.norm() >= 0.5 {
        return Err(Error::Domain("perturbations must satisfy |ε|, |δ| < 1/2".into()));
    }
    let n = ctx.n();
    let top = n - 1;
    let pre = qpoch(ctx, Complex64::new(top as f64, 0.0) - 2.0 * delta, top) / qfact(ctx, top)?;
    let mut acc = LogSum::new();
    for s in s_range(n, k, l) {
        let half = 0.5 * log_xi(ctx, k, l, s);
        let (sf, kf, lf) = (s as f64, k as f64, l as f64);
        let num = qpoch(ctx, sf + 2.0 * eps, s);
        let den = qpoch(ctx, sf - kf + 2.0 * delta, s - k)
            * qpoch(ctx, sf - lf - 2.0 * delta, s - l)
            * qpoch(ctx, kf + lf - sf + 2.0 * eps, k + l - s);
        if den.is_zero() {
            return Err(Error::Domain("pole in the perturbed 6j symbol".into()));
        }
        acc.push(LogComplex::new(half, 0.0) * (num / den));
    }
    Ok(pre * acc.finish())
}

/// Colors of [`sixj_eps`].
pub fn eps_colors(ctx: &RootOfUnityCtx, k: usize, l: usize, eps: Complex64, delta: Complex64) -> SixJColors {
    let h = Complex64::new(ctx.half(), 0.0);
    SixJColors {
        a: h + delta,
        b: h + eps,
        e: Complex64::new(l as f64, 0.0) + eps + delta,
        d: h - delta,
        c: h + eps,
        f: Complex64::new(k as f64, 0.0) + eps - delta,
    }
}

/// Degenerate symbols with one small color, each with a product closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DegenerateSixJ {
    /// {l h h; ε h+ε h+ε} = {l+2ε, l}/{l}!.
    EpsLeg { l: usize, eps: Complex64 },
    /// {l h−ε/2 h−ε/2; ε h+ε/2 h+ε/2} = {N−1−ε, N−1}/{N−1}! (first closed form).
    HalfEpsLeg { l: usize, eps: Complex64 },
    /// {−ε h h−ε; N−1−l+ε h h+ε} = {l−2ε, l}/{l}!.
    NegEpsLeg { l: usize, eps: Complex64 },
    /// {h−(ε+δ)/2 h+(ε−δ)/2 −δ; h+(ε+δ)/2 h+(ε−δ)/2 k+ε}
    /// = {k+ε−δ, k}{N−1+ε+δ, N−1}/({k+ε+δ, k}{N−1}!).
    TwoParamK { k: usize, eps: Complex64, delta: Complex64 },
    /// {l+δ h−(ε+δ)/2 h−(ε−δ)/2; ε h+(ε+δ)/2 h+(ε−δ)/2}
    /// = {l+ε+δ, l}/{l−ε+δ, l} (second closed form).
    TwoParamL { l: usize, eps: Complex64, delta: Complex64 },
}

impl DegenerateSixJ {
    /// The tetrahedral colors the closed form is attached to.
    pub fn colors(&self, ctx: &RootOfUnityCtx) -> SixJColors {
        let h = Complex64::new(ctx.half(), 0.0);
        let re = |x: usize| Complex64::new(x as f64, 0.0);
        let top = re(ctx.n() - 1);
        match *self {
            DegenerateSixJ::EpsLeg { l, eps } => SixJColors { a: re(l), b: h, e: h, d: eps, c: h + eps, f: h + eps },
            DegenerateSixJ::HalfEpsLeg { l, eps } => {
                SixJColors { a: re(l), b: h - eps / 2.0, e: h - eps / 2.0, d: eps, c: h + eps / 2.0, f: h + eps / 2.0 }
            }
            DegenerateSixJ::NegEpsLeg { l, eps } => {
                SixJColors { a: -eps, b: h, e: h - eps, d: top - re(l) + eps, c: h, f: h + eps }
            }
            DegenerateSixJ::TwoParamK { k, eps, delta } => SixJColors {
                a: h - (eps + delta) / 2.0,
                b: h + (eps - delta) / 2.0,
                e: -delta,
                d: h + (eps + delta) / 2.0,
                c: h + (eps - delta) / 2.0,
                f: re(k) + eps,
            },
            DegenerateSixJ::TwoParamL { l, eps, delta } => SixJColors {
                a: re(l) + delta,
                b: h - (eps + delta) / 2.0,
                e: h - (eps - delta) / 2.0,
                d: eps,
                c: h + (eps + delta) / 2.0,
                f: h + (eps - delta) / 2.0,
            },
        }
    }
}

/// Closed-form value of a degenerate symbol.
pub fn sixj_degenerate(ctx: &RootOfUnityCtx, which: DegenerateSixJ) -> Result<LogComplex> {
    let top = ctx.n() - 1;
    let topc = Complex64::new(top as f64, 0.0);
    let check = |x: usize| -> Result<()> {
        if x > top {
            Err(Error::Domain(format!("index {x} outside 0..={top}")))
        } else {
            Ok(())
        }
    };
    let re = |x: usize| Complex64::new(x as f64, 0.0);
    let v = match which {
        DegenerateSixJ::EpsLeg { l, eps } => {
            check(l)?;
            qpoch(ctx, re(l) + 2.0 * eps, l) / qfact(ctx, l)?
        }
        DegenerateSixJ::HalfEpsLeg { l, eps } => {
            check(l)?;
            qpoch(ctx, topc - eps, top) / qfact(ctx, top)?
        }
        DegenerateSixJ::NegEpsLeg { l, eps } => {
            check(l)?;
            qpoch(ctx, re(l) - 2.0 * eps, l) / qfact(ctx, l)?
        }
        DegenerateSixJ::TwoParamK { k, eps, delta } => {
            check(k)?;
            qpoch(ctx, re(k) + eps - delta, k) * qpoch(ctx, topc + eps + delta, top)
                / (qpoch(ctx, re(k) + eps + delta, k) * qfact(ctx, top)?)
        }
        DegenerateSixJ::TwoParamL { l, eps, delta } => {
            check(l)?;
            let den = qpoch(ctx, re(l) - eps + delta, l);
            qpoch(ctx, re(l) + eps + delta, l) * den.inv()?
        }
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: LogComplex, b: LogComplex) -> f64 {
        let (x, y) = (a.to_complex(), b.to_complex());
        (x - y).norm() / y.norm().max(1e-300)
    }

    #[test]
    fn admissibility_examples() {
        let ctx = RootOfUnityCtx::new(5).unwrap();
        let two = c(2.0, 0.0);
        assert!(admissible(&ctx, two, two, c(4.0, 0.0), VertexKind::DiffHigh));
        assert!(admissible(&ctx, two, two, c(0.0, 0.0), VertexKind::DiffHigh));
        assert!(!admissible(&ctx, two, two, c(-1.0, 0.0), VertexKind::DiffHigh));
        assert!(admissible(&ctx, two, two, c(0.0, 0.0), VertexKind::SumHigh));
        assert!(admissible(&ctx, -two, -two, c(-2.0, 0.0), VertexKind::SumLow));
        assert!(admissible(&ctx, -two, two, c(3.0, 0.0), VertexKind::DiffLow));
        assert!(!admissible(&ctx, two, two, c(0.5, 0.0), VertexKind::DiffHigh));
    }

    #[test]
    fn half_family_base_values() {
        let ctx = RootOfUnityCtx::new(5).unwrap();
        assert!(rel(sixj_half(&ctx, 0, 0).unwrap(), LogComplex::ONE) < 1e-14);
        assert!(rel(sixj_general(&ctx, &half_colors(&ctx, 0, 0)).unwrap(), LogComplex::ONE) < 1e-12);
        // Three s-terms for (2, 2) at N = 5.
        let direct: f64 = (2..=4).map(|s| xi(&ctx, 2, 2, s).unwrap().to_complex().re).sum();
        let v = sixj_half(&ctx, 2, 2).unwrap();
        assert!(v.phase.abs() < 1e-14);
        assert!((v.to_complex().re - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn general_rejects_non_integer_colors() {
        let ctx = RootOfUnityCtx::new(5).unwrap();
        let mut col = half_colors(&ctx, 1, 1);
        col.e = c(1.3, 0.0);
        assert!(matches!(sixj_general(&ctx, &col), Err(Error::Domain(_))));
    }

    #[test]
    fn eps_reduces_to_half() {
        let ctx = RootOfUnityCtx::new(7).unwrap();
        for k in 0..7 {
            for l in 0..7 {
                let a = sixj_eps(&ctx, k, l, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
                assert!(rel(a, sixj_half(&ctx, k, l).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn eps_matches_general_formula() {
        let ctx = RootOfUnityCtx::new(5).unwrap();
        let (e, d) = (c(1e-3, 0.0), c(1e-3, 0.0));
        for (k, l) in [(1, 2), (2, 3), (0, 4), (4, 4)] {
            let a = sixj_eps(&ctx, k, l, e, d).unwrap();
            let b = sixj_general(&ctx, &eps_colors(&ctx, k, l, e, d)).unwrap();
            assert!(rel(a, b) < 1e-10, "k={k} l={l}");
        }
    }

    #[test]
    fn eps_derivative_matches_finite_difference() {
        let ctx = RootOfUnityCtx::new(5).unwrap();
        let f = |e: f64| sixj_eps(&ctx, 1, 1, c(e, 0.0), c(0.0, 0.0)).unwrap().to_complex();
        let h = 1e-4;
        let fd1 = (f(h) - f(-h)) / (2.0 * h);
        let fd2 = (f(h / 2.0) - f(-h / 2.0)) / h;
        let rich = (4.0 * fd2 - fd1) / 3.0;
        assert!((fd2 - rich).norm() < 1e-6 * rich.norm().max(1.0));
        assert!(f(1e-4).norm().is_finite());
    }

    #[test]
    fn degenerate_trivial_values() {
        let ctx = RootOfUnityCtx::new(5).unwrap();
        let z = c(0.0, 0.0);
        for l in 0..5 {
            let v = sixj_degenerate(&ctx, DegenerateSixJ::EpsLeg { l, eps: z }).unwrap();
            assert!(rel(v, LogComplex::ONE) < 1e-13);
            let v = sixj_degenerate(&ctx, DegenerateSixJ::TwoParamL { l, eps: z, delta: z }).unwrap();
            assert!(rel(v, LogComplex::ONE) < 1e-13);
        }
    }

    #[test]
    fn degenerate_forms_against_general() {
        let ctx = RootOfUnityCtx::new(5).unwrap();
        let (e, d) = (c(0.01, 0.0), c(0.007, 0.0));
        for x in 0..5 {
            for which in [
                DegenerateSixJ::EpsLeg { l: x, eps: e },
                DegenerateSixJ::NegEpsLeg { l: x, eps: e },
                DegenerateSixJ::TwoParamK { k: x, eps: e, delta: d },
            ] {
                let a = sixj_degenerate(&ctx, which).unwrap();
                let b = sixj_general(&ctx, &which.colors(&ctx)).unwrap();
                assert!(rel(a, b) < 1e-10, "{which:?}");
            }
            // The two closed forms attached to the same colors multiply to the general value.
            let six = sixj_degenerate(&ctx, DegenerateSixJ::HalfEpsLeg { l: x, eps: e - d }).unwrap();
            let eight = DegenerateSixJ::TwoParamL { l: x, eps: e, delta: d };
            let g = sixj_general(&ctx, &eight.colors(&ctx)).unwrap();
            assert!(rel(six * sixj_degenerate(&ctx, eight).unwrap(), g) < 1e-10);
        }
        // At the end points l = 0 and l = N−1 the first closed form alone is exact.
        for l in [0, 4] {
            let which = DegenerateSixJ::HalfEpsLeg { l, eps: e };
            let a = sixj_degenerate(&ctx, which).unwrap();
            assert!(rel(a, sixj_general(&ctx, &which.colors(&ctx)).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn analytic_kernel_restricts_to_xi() {
        let ctx = RootOfUnityCtx::new(9).unwrap();
        for k in 0..9 {
            for l in 0..9 {
                for s in s_range(9, k, l) {
                    let a = xi_analytic(&ctx, c(k as f64, 0.0), c(l as f64, 0.0), c(s as f64, 0.0)).unwrap();
                    assert!(rel(a, xi(&ctx, k, l, s).unwrap()) < 1e-12);
                }
            }
        }
        assert!(rel(xi(&ctx, 0, 0, 0).unwrap(), LogComplex::ONE) < 1e-15);
    }
}
