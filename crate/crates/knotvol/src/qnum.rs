//! Arithmetic at the primitive 2N-th root of unity q = exp(iπ/N).
//!
//! Quantum integers {a} = q^a − q^{−a} = 2i·sin(πa/N), factorials, generalized
//! Pochhammer products {a, k} = ∏_{j<k} {a − j} and quantum binomials, all
//! returned in a log-magnitude/phase form so that ratios of products whose
//! magnitudes span hundreds of orders of magnitude stay finite.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The odd order N together with tables that depend only on N.
#[derive(Debug, Clone)]
pub struct RootOfUnityCtx {
    n: usize,
    pi_over_n: f64,
    /// log |{k}!| for k = 0..N−1.
    log_fact: Vec<f64>,
    /// Σ_{m=1}^{k} (π/N)·cot(πm/N): first derivative of log {k + c, k} at c = 0.
    cot_prefix: Vec<f64>,
    /// −Σ_{m=1}^{k} (π/N)²·csc²(πm/N): second derivative of log {k + c, k} at c = 0.
    csc2_prefix: Vec<f64>,
}

impl RootOfUnityCtx {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::Domain(format!("N must be odd and at least 3, got {n}")));
        }
        let pi_over_n = PI / n as f64;
        let mut log_fact = Vec::with_capacity(n);
        let mut cot_prefix = Vec::with_capacity(n);
        let mut csc2_prefix = Vec::with_capacity(n);
        let (mut lf, mut c1, mut c2) = (0.0, 0.0, 0.0);
        log_fact.push(0.0);
        cot_prefix.push(0.0);
        csc2_prefix.push(0.0);
        for m in 1..n {
            let x = pi_over_n * m as f64;
            let s = x.sin();
            lf += (2.0 * s).ln();
            c1 += pi_over_n * x.cos() / s;
            c2 -= pi_over_n * pi_over_n / (s * s);
            log_fact.push(lf);
            cot_prefix.push(c1);
            csc2_prefix.push(c2);
        }
        Ok(Self { n, pi_over_n, log_fact, cot_prefix, csc2_prefix })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn pi_over_n(&self) -> f64 {
        self.pi_over_n
    }

    /// (N − 1)/2.
    #[inline]
    pub fn half(&self) -> f64 {
        (self.n as f64 - 1.0) / 2.0
    }

    /// q^a = exp(iπa/N).
    #[inline]
    pub fn q_pow(&self, a: Complex64) -> Complex64 {
        (Complex64::i() * self.pi_over_n * a).exp()
    }

    /// q^a for real a.
    #[inline]
    pub fn q_pow_re(&self, a: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.pi_over_n * a)
    }

    /// log |{k}!| for 0 ≤ k ≤ N − 1.
    #[inline]
    pub fn log_fact(&self, k: usize) -> f64 {
        self.log_fact[k]
    }

    /// d/dc log {k + c, k} at c = 0.
    #[inline]
    pub fn cot_prefix(&self, k: usize) -> f64 {
        self.cot_prefix[k]
    }

    /// d²/dc² log {k + c, k} at c = 0.
    #[inline]
    pub fn csc2_prefix(&self, k: usize) -> f64 {
        self.csc2_prefix[k]
    }
}

/// A complex number stored as (log-magnitude, phase). Zero is logmag = −∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub logmag: f64,
    pub phase: f64,
}

/// Reduce an angle into (−π, π].
#[inline]
pub fn reduce_phase(p: f64) -> f64 {
    let mut r = p.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex { logmag: f64::NEG_INFINITY, phase: 0.0 };
    pub const ONE: LogComplex = LogComplex { logmag: 0.0, phase: 0.0 };

    pub fn new(logmag: f64, phase: f64) -> Self {
        if logmag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self { logmag, phase: reduce_phase(phase) }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::ZERO
        } else {
            Self { logmag: z.norm().ln(), phase: z.arg() }
        }
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(self.logmag.exp(), self.phase)
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.logmag == f64::NEG_INFINITY
    }

    /// Principal complex logarithm (−∞ real part for zero).
    pub fn ln(self) -> Complex64 {
        Complex64::new(self.logmag, self.phase)
    }

    pub fn inv(self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(Self::new(-self.logmag, -self.phase))
    }

    pub fn powi(self, k: i32) -> Self {
        if self.is_zero() {
            return if k == 0 { Self::ONE } else { Self::ZERO };
        }
        Self::new(self.logmag * k as f64, self.phase * k as f64)
    }

    /// Multiply by an ordinary complex number.
    pub fn scale(self, z: Complex64) -> Self {
        self * LogComplex::from_complex(z)
    }

    /// Sum of two values with max-shifted accumulation.
    pub fn add(self, other: Self) -> Self {
        let mut acc = LogSum::new();
        acc.push(self);
        acc.push(other);
        acc.finish()
    }

    /// Sum of many values with max-shifted accumulation.
    pub fn sum<I: IntoIterator<Item = LogComplex>>(items: I) -> Self {
        let mut acc = LogSum::new();
        for t in items {
            acc.push(t);
        }
        acc.finish()
    }
}

impl std::ops::Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.logmag + rhs.logmag, self.phase + rhs.phase)
    }
}

impl std::ops::Div for LogComplex {
    type Output = LogComplex;
    /// Division; dividing by zero yields a NaN magnitude, use [`LogComplex::inv`] to get an error instead.
    fn div(self, rhs: Self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        if rhs.is_zero() {
            return Self { logmag: f64::NAN, phase: f64::NAN };
        }
        Self::new(self.logmag - rhs.logmag, self.phase - rhs.phase)
    }
}

/// Running sum that keeps a common scale e^{scale} factored out.
///
/// Terms larger than the current scale trigger a rescale of the partial
/// sum, so no term or partial sum ever overflows.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    scale: f64,
    acc: Complex64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        Self { scale: f64::NEG_INFINITY, acc: Complex64::new(0.0, 0.0) }
    }

    pub fn push(&mut self, t: LogComplex) {
        if t.is_zero() {
            return;
        }
        self.push_scaled(t.logmag, Complex64::from_polar(1.0, t.phase));
    }

    /// Add e^{logmag}·z.
    pub fn push_scaled(&mut self, logmag: f64, z: Complex64) {
        if logmag == f64::NEG_INFINITY || (z.re == 0.0 && z.im == 0.0) {
            return;
        }
        if logmag > self.scale {
            if self.scale != f64::NEG_INFINITY {
                self.acc *= (self.scale - logmag).exp();
            }
            self.scale = logmag;
        }
        self.acc += z * (logmag - self.scale).exp();
    }

    /// Combine two partial sums.
    pub fn merge(mut self, other: LogSum) -> LogSum {
        if other.scale != f64::NEG_INFINITY {
            self.push_scaled(other.scale, other.acc);
        }
        self
    }

    pub fn finish(self) -> LogComplex {
        if self.scale == f64::NEG_INFINITY || (self.acc.re == 0.0 && self.acc.im == 0.0) {
            return LogComplex::ZERO;
        }
        LogComplex { logmag: self.scale + self.acc.norm().ln(), phase: self.acc.arg() }
    }
}

/// If `a` is an exact real integer, return it.
#[inline]
pub(crate) fn exact_int(a: Complex64) -> Option<i64> {
    if a.im == 0.0 && a.re.fract() == 0.0 && a.re.abs() < 9.0e15 {
        Some(a.re as i64)
    } else {
        None
    }
}

/// {a} = 2i·sin(πa/N). Exact integers are reduced mod 2N first, and multiples
/// of N give an exact zero.
pub fn qint(ctx: &RootOfUnityCtx, a: Complex64) -> Complex64 {
    let n = ctx.n as i64;
    if let Some(m) = exact_int(a) {
        let r = m.rem_euclid(2 * n);
        if r % n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        return Complex64::new(0.0, 2.0 * (ctx.pi_over_n * r as f64).sin());
    }
    Complex64::new(0.0, 2.0) * (a * ctx.pi_over_n).sin()
}

/// d/da {a} = 2i·(π/N)·cos(πa/N).
pub fn qint_deriv(ctx: &RootOfUnityCtx, a: Complex64) -> Complex64 {
    Complex64::new(0.0, 2.0 * ctx.pi_over_n) * (a * ctx.pi_over_n).cos()
}

/// {k}! for 0 ≤ k ≤ N − 1. Each factor has phase π/2, so the phase is kπ/2.
pub fn qfact(ctx: &RootOfUnityCtx, k: usize) -> Result<LogComplex> {
    if k >= ctx.n {
        return Err(Error::Domain(format!("factorial index {k} outside 0..={}", ctx.n - 1)));
    }
    Ok(LogComplex::new(ctx.log_fact[k], k as f64 * PI / 2.0))
}

/// {a, k} = ∏_{j=0}^{k−1} {a − j}.
pub fn qpoch(ctx: &RootOfUnityCtx, a: Complex64, k: usize) -> LogComplex {
    if let Some(m) = exact_int(a) {
        if m >= k as i64 && m < ctx.n as i64 {
            // {m}!/{m−k}! from the table.
            let m = m as usize;
            return LogComplex::new(ctx.log_fact[m] - ctx.log_fact[m - k], k as f64 * PI / 2.0);
        }
    }
    let (mut lm, mut ph) = (0.0, 0.0);
    for j in 0..k {
        let z = qint(ctx, a - j as f64);
        if z.re == 0.0 && z.im == 0.0 {
            return LogComplex::ZERO;
        }
        lm += z.norm().ln();
        ph += z.arg();
    }
    LogComplex::new(lm, ph)
}

/// Quantum binomial [a; b] = ∏_{j=0}^{a−b−1} {a − j}/{a − b − j}, with a − b a
/// non-negative integer below N (within 1e−6).
pub fn qbinom(ctx: &RootOfUnityCtx, a: Complex64, b: Complex64) -> Result<LogComplex> {
    let n = binom_length(ctx, a, b)?;
    Ok(qpoch(ctx, a, n) / qfact(ctx, n)?)
}

/// Integer length a − b of a quantum binomial, validated.
pub(crate) fn binom_length(ctx: &RootOfUnityCtx, a: Complex64, b: Complex64) -> Result<usize> {
    let d = a - b;
    let r = d.re.round();
    if (d - r).norm() > 1e-6 || r < 0.0 || r >= ctx.n as f64 {
        return Err(Error::Domain(format!(
            "binomial lower/upper difference {d} is not an integer in 0..={}",
            ctx.n - 1
        )));
    }
    Ok(r as usize)
}

/// d/da log {a} = (π/N)·cot(πa/N).
pub fn log_deriv_qint(ctx: &RootOfUnityCtx, a: Complex64) -> Result<Complex64> {
    let x = a * ctx.pi_over_n;
    let s = x.sin();
    let on_pole = match exact_int(a) {
        Some(m) => m.rem_euclid(ctx.n as i64) == 0,
        None => s.norm() < 1e-300,
    };
    if on_pole {
        return Err(Error::Domain(format!("log-derivative of {{a}} has a pole at a = {a}")));
    }
    Ok(x.cos() / s * ctx.pi_over_n)
}

/// Framing exponent t_a = a(a + 1 − N).
pub fn t_twist(ctx: &RootOfUnityCtx, a: Complex64) -> Complex64 {
    a * (a + 1.0 - ctx.n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ctx_rejects_even_or_small() {
        assert!(RootOfUnityCtx::new(4).is_err());
        assert!(RootOfUnityCtx::new(1).is_err());
        assert!(RootOfUnityCtx::new(3).is_ok());
    }

    #[test]
    fn qint_examples() {
        let ctx = RootOfUnityCtx::new(3).unwrap();
        let v = qint(&ctx, c(1.0, 0.0));
        assert_relative_eq!(v.im, 3f64.sqrt(), epsilon = 1e-14);
        assert_eq!(qint(&ctx, c(0.0, 0.0)), c(0.0, 0.0));
        assert_eq!(qint(&ctx, c(3.0, 0.0)), c(0.0, 0.0));
        // N = 4 is not an allowed context, but the formula 2i·sin(πa/N) at a = N/2 is 2i.
        let ctx5 = RootOfUnityCtx::new(5).unwrap();
        assert_relative_eq!(qint(&ctx5, c(2.5, 0.0)).im, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn qfact_top_is_i_pow_times_n() {
        for n in (3..=99).step_by(2) {
            let ctx = RootOfUnityCtx::new(n).unwrap();
            let f = qfact(&ctx, n - 1).unwrap();
            assert_relative_eq!(f.logmag, (n as f64).ln(), epsilon = 1e-12);
            // Oracle: ∏ 2 sin(πj/N) by direct multiplication.
            let direct: f64 = (1..n).map(|j| 2.0 * (PI * j as f64 / n as f64).sin()).product();
            assert_relative_eq!(direct, n as f64, max_relative = 1e-12);
            let expect = Complex64::i().powu((n - 1) as u32) * n as f64;
            let got = f.to_complex();
            assert!((got - expect).norm() < 1e-10 * n as f64);
        }
        let ctx = RootOfUnityCtx::new(5).unwrap();
        assert_eq!(qfact(&ctx, 0).unwrap(), LogComplex::ONE);
        assert!(qfact(&ctx, 5).is_err());
    }

    #[test]
    fn qpoch_examples() {
        let ctx = RootOfUnityCtx::new(5).unwrap();
        assert_eq!(qpoch(&ctx, c(1.3, 0.2), 0), LogComplex::ONE);
        let a = qpoch(&ctx, c(3.0, 0.0), 3).to_complex();
        let b = qfact(&ctx, 3).unwrap().to_complex();
        assert!((a - b).norm() < 1e-13);
        let ctx7 = RootOfUnityCtx::new(7).unwrap();
        let z = c(2.5, 0.1);
        let direct = qint(&ctx7, z) * qint(&ctx7, z - 1.0);
        assert!((qpoch(&ctx7, z, 2).to_complex() - direct).norm() < 1e-13);
    }

    #[test]
    fn qbinom_examples() {
        let ctx = RootOfUnityCtx::new(5).unwrap();
        assert_eq!(qbinom(&ctx, c(2.2, 0.0), c(2.2, 0.0)).unwrap(), LogComplex::ONE);
        assert!((qbinom(&ctx, c(4.0, 0.0), c(0.0, 0.0)).unwrap().to_complex() - 1.0).norm() < 1e-13);
        assert!(qbinom(&ctx, c(4.5, 0.0), c(0.0, 0.0)).is_err());
        for n in (3..=31).step_by(2) {
            let ctx = RootOfUnityCtx::new(n).unwrap();
            let v = qbinom(&ctx, c((2 * n - 1) as f64, 0.0), c(n as f64, 0.0)).unwrap().to_complex();
            // Term-by-term oracle {2N−1}⋯{N+1}/({N−1}⋯{1}).
            let mut direct = c(1.0, 0.0);
            for j in 0..(n - 1) {
                direct *= qint(&ctx, c((2 * n - 1 - j) as f64, 0.0)) / qint(&ctx, c((n - 1 - j) as f64, 0.0));
            }
            let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((v - sign).norm() < 1e-10);
            assert!((direct - sign).norm() < 1e-10);
        }
    }

    #[test]
    fn log_deriv_examples() {
        let ctx = RootOfUnityCtx::new(7).unwrap();
        let a = c(2.0, 0.3);
        let h = 1e-5;
        let fd = (qint(&ctx, a + h).ln() - qint(&ctx, a - h).ln()) / (2.0 * h);
        assert!((log_deriv_qint(&ctx, a).unwrap() - fd).norm() < 1e-8);
        assert!(log_deriv_qint(&ctx, c(7.0, 0.0)).is_err());
        assert!(log_deriv_qint(&ctx, c(0.0, 0.0)).is_err());
        // cot(π/2) = 0 at a = N/2.
        assert!(log_deriv_qint(&ctx, c(3.5, 0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn twist_examples() {
        let ctx = RootOfUnityCtx::new(9).unwrap();
        assert_eq!(t_twist(&ctx, c(0.0, 0.0)), c(0.0, 0.0));
        assert_eq!(t_twist(&ctx, c(8.0, 0.0)), c(0.0, 0.0));
        assert_relative_eq!(t_twist(&ctx, c(4.0, 0.0)).re, -16.0);
    }

    #[test]
    fn prefix_tables_match_derivatives() {
        let ctx = RootOfUnityCtx::new(11).unwrap();
        for k in 0..11usize {
            let f = |c_: f64| qpoch(&ctx, c(k as f64 + c_, 0.0), k).ln();
            let h = 1e-4;
            let d1 = (f(h) - f(-h)) / (2.0 * h);
            let d2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
            assert!((d1.re - ctx.cot_prefix(k)).abs() < 1e-7);
            assert!((d2.re - ctx.csc2_prefix(k)).abs() < 1e-4);
        }
    }

    #[test]
    fn logcomplex_round_trip_and_zero() {
        let z = c(-3.5, 1.25);
        let back = LogComplex::from_complex(z).to_complex();
        assert!((back - z).norm() < 1e-14);
        assert!((LogComplex::ZERO * LogComplex::ONE).is_zero());
        assert!(LogComplex::ZERO.inv().is_err());
        let big = LogComplex::new(800.0, 0.3);
        let s = LogComplex::sum([big, big]);
        assert_relative_eq!(s.logmag, 800.0 + 2f64.ln(), epsilon = 1e-12);
    }
}
