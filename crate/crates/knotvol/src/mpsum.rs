//! Multiprecision evaluation of the twisted state sums.
//!
//! The summands of the Whitehead and double twist sums are of size
//! e^{N·v_B/2π} while the result is only e^{N·Vol/2π}, so the twist phases
//! cancel about N(v_B − Vol)/(2π ln 2) bits. The sums are accumulated in
//! MPFR floats with enough precision to absorb that loss; every phase is an
//! exact multiple of π/N and comes from a table.

use crate::qnum::LogComplex;
use crate::reduce::{par_rows, tree_reduce};
use rug::float::Constant;
use rug::{Assign, Float};
use std::f64::consts::{LN_2, PI};

/// 16Λ(π/4): growth of the untwisted sums.
const BORROMEAN_GROWTH: f64 = 7.327724753417479;

/// Working precision for a twisted sum at N: the worst-case cancellation
/// plus 96 guard bits.
pub fn auto_bits(n: usize) -> u32 {
    let nf = n as f64;
    let loss = nf * BORROMEAN_GROWTH / (2.0 * PI * LN_2) + 3.0 * nf.log2();
    96 + loss.ceil() as u32
}

/// Complex number as a pair of MPFR floats.
#[derive(Debug, Clone)]
struct Cf {
    re: Float,
    im: Float,
}

impl Cf {
    fn zero(prec: u32) -> Self {
        Self { re: Float::new(prec), im: Float::new(prec) }
    }

    /// self += z·x for real x.
    fn add_scaled(&mut self, z: &Cf, x: &Float, tmp: &mut Float) {
        tmp.assign(&z.re * x);
        self.re += &*tmp;
        tmp.assign(&z.im * x);
        self.im += &*tmp;
    }

    /// self += a·b.
    fn add_mul(&mut self, a: &Cf, b: &Cf, tmp: &mut Float) {
        tmp.assign(&a.re * &b.re);
        self.re += &*tmp;
        tmp.assign(&a.im * &b.im);
        self.re -= &*tmp;
        tmp.assign(&a.re * &b.im);
        self.im += &*tmp;
        tmp.assign(&a.im * &b.re);
        self.im += &*tmp;
    }

    fn add(mut self, o: Cf) -> Cf {
        self.re += o.re;
        self.im += o.im;
        self
    }
}

/// Per-N tables at a fixed precision.
struct Tables {
    n: usize,
    prec: u32,
    /// |{m}!| = Π 2 sin(πj/N) and its inverse.
    fact: Vec<Float>,
    inv_fact: Vec<Float>,
    /// Σ (π/N)cot(πj/N) and −Σ (π/N)²csc²(πj/N).
    c1: Vec<Float>,
    c2: Vec<Float>,
    /// sin(πj/N), cos(πj/N) for j in 0..2N.
    sin: Vec<Float>,
    cos: Vec<Float>,
    pi_over_n: Float,
}

impl Tables {
    fn new(n: usize, prec: u32) -> Self {
        let pi = Float::with_val(prec, Constant::Pi);
        let pi_over_n = Float::with_val(prec, &pi / n as u32);
        let mut sin = Vec::with_capacity(2 * n);
        let mut cos = Vec::with_capacity(2 * n);
        for j in 0..2 * n {
            let x = Float::with_val(prec, &pi_over_n * j as u32);
            let (s, c) = x.sin_cos(Float::new(prec));
            sin.push(s);
            cos.push(c);
        }
        let mut fact = vec![Float::with_val(prec, 1)];
        let mut c1 = vec![Float::new(prec)];
        let mut c2 = vec![Float::new(prec)];
        for j in 1..n {
            let s = &sin[j];
            fact.push(Float::with_val(prec, &fact[j - 1] * s) * 2u32);
            let cot = Float::with_val(prec, &cos[j] / s);
            c1.push(Float::with_val(prec, &c1[j - 1] + &pi_over_n * cot));
            let csc2 = Float::with_val(prec, s.square_ref()).recip();
            let t = Float::with_val(prec, pi_over_n.square_ref()) * csc2;
            c2.push(Float::with_val(prec, &c2[j - 1] - t));
        }
        let inv_fact = fact.iter().map(|f| Float::with_val(prec, f.recip_ref())).collect();
        Self { n, prec, fact, inv_fact, c1, c2, sin, cos, pi_over_n }
    }

    /// q^e = e^{iπe/N} for integer e.
    fn q_pow(&self, e: i64) -> Cf {
        let j = e.rem_euclid(2 * self.n as i64) as usize;
        Cf { re: self.cos[j].clone(), im: self.sin[j].clone() }
    }

    /// A(k) = q^{p(k−h)²}{2k+1} and A′(k) with {a} = 2i sin(πa/N).
    fn twist(&self, p: i64, k: usize) -> (Cf, Cf) {
        let prec = self.prec;
        let h = (self.n as i64 - 1) / 2;
        let d = k as i64 - h;
        let qp = self.q_pow(p * d * d);
        let j = (2 * k + 1) % (2 * self.n);
        // {2k+1} = 2i·sin, d/dx {2x+1} = 4i(π/N)·cos.
        let qi = Float::with_val(prec, &self.sin[j] * 2u32);
        let dqi = Float::with_val(prec, &self.cos[j] * &self.pi_over_n) * 4u32;
        // A = qp·(i·qi).
        let a = Cf { re: -Float::with_val(prec, &qp.im * &qi), im: Float::with_val(prec, &qp.re * &qi) };
        // A′ = i(π/N)·2p(k−h)·A + qp·(i·dqi).
        let f = Float::with_val(prec, &self.pi_over_n * (2 * p * d));
        let da = Cf {
            re: -Float::with_val(prec, &a.im * &f) - Float::with_val(prec, &qp.im * &dqi),
            im: Float::with_val(prec, &a.re * &f) + Float::with_val(prec, &qp.re * &dqi),
        };
        (a, da)
    }

    /// Σ_s ξ·{1, Lε, Lδ, Lεδ + Lε·Lδ} for fixed (k, l); `want` limits how
    /// many of the four are accumulated.
    fn block(&self, k: usize, l: usize, want: usize, out: &mut [Float; 4], w: &mut Float, t: &mut Float, le: &mut Float, ld: &mut Float) {
        for o in out.iter_mut() {
            o.assign(0);
        }
        for s in k.max(l)..=(k + l).min(self.n - 1) {
            let (a, b, c, d) = (s, s - k, s - l, k + l - s);
            w.assign(&self.fact[a] * &self.inv_fact[b]);
            *w *= &self.inv_fact[c];
            *w *= &self.inv_fact[d];
            w.square_mut();
            out[0] += &*w;
            if want == 1 {
                continue;
            }
            le.assign(&self.c1[a] + &self.c1[b]);
            *le -= &self.c1[c];
            *le -= &self.c1[d];
            t.assign(&*w * &*le);
            out[1] += &*t;
            if want == 2 {
                continue;
            }
            ld.assign(&self.c1[a] - &self.c1[b]);
            *ld += &self.c1[c];
            *ld -= &self.c1[d];
            t.assign(&*w * &*ld);
            out[2] += &*t;
            // Lεδ + Lε·Lδ.
            t.assign(&self.c2[a] + &self.c2[b]);
            *t += &self.c2[c];
            *t -= &self.c2[d];
            *le *= &*ld;
            *t += &*le;
            *t *= &*w;
            out[3] += &*t;
        }
    }

    fn scratch(&self) -> ([Float; 4], Float, Float, Float, Float, Float) {
        let f = || Float::new(self.prec);
        ([f(), f(), f(), f()], f(), f(), f(), f(), f())
    }
}

fn to_log_complex(z: &Cf) -> LogComplex {
    if z.re.is_zero() && z.im.is_zero() {
        return LogComplex::new(f64::NEG_INFINITY, 0.0);
    }
    let exp_of = |x: &Float| if x.is_zero() { i32::MIN } else { x.to_f64_exp().1 };
    let e = exp_of(&z.re).max(exp_of(&z.im));
    let scale = |x: &Float| if x.is_zero() { 0.0 } else { let (m, ex) = x.to_f64_exp(); m * 2f64.powi(ex - e) };
    let (r, i) = (scale(&z.re), scale(&z.im));
    LogComplex::new(r.hypot(i).ln() + e as f64 * LN_2, i.atan2(r))
}

/// Σ_{k,l} [A′(k)·S₀ + A(k)·S_ε] of the Whitehead sum, at `prec` bits.
pub fn whitehead_sum(n: usize, p: i64, prec: u32) -> LogComplex {
    let tab = Tables::new(n, prec);
    let rows = par_rows(n, |k| {
        let (mut out, mut w, mut t, mut le, mut ld, mut tmp) = tab.scratch();
        let mut t0 = Float::new(prec);
        let mut t1 = Float::new(prec);
        for l in 0..n {
            tab.block(k, l, 2, &mut out, &mut w, &mut t, &mut le, &mut ld);
            t0 += &out[0];
            t1 += &out[1];
        }
        let (a, da) = tab.twist(p, k);
        let mut row = Cf::zero(prec);
        row.add_scaled(&da, &t0, &mut tmp);
        row.add_scaled(&a, &t1, &mut tmp);
        row
    });
    to_log_complex(&tree_reduce(&rows, Cf::zero(prec), &|a: Cf, b: Cf| a.add(b)))
}

/// Σ_k [A′(k)Σ_l(B′S₀ + B·S_δ) + A(k)Σ_l(B′S_ε + B·S_εδ)] of the double twist
/// sum, with B the twist factor for −r, at `prec` bits.
pub fn double_twist_sum(n: usize, p: i64, r: i64, prec: u32) -> LogComplex {
    let tab = Tables::new(n, prec);
    let twist_r: Vec<(Cf, Cf)> = (0..n).map(|l| tab.twist(-r, l)).collect();
    let rows = par_rows(n, |k| {
        let (mut out, mut w, mut t, mut le, mut ld, mut tmp) = tab.scratch();
        let mut inner_da = Cf::zero(prec);
        let mut inner_a = Cf::zero(prec);
        for (l, (b, db)) in twist_r.iter().enumerate() {
            tab.block(k, l, 4, &mut out, &mut w, &mut t, &mut le, &mut ld);
            inner_da.add_scaled(db, &out[0], &mut tmp);
            inner_da.add_scaled(b, &out[2], &mut tmp);
            inner_a.add_scaled(db, &out[1], &mut tmp);
            inner_a.add_scaled(b, &out[3], &mut tmp);
        }
        let (a, da) = tab.twist(p, k);
        let mut row = Cf::zero(prec);
        row.add_mul(&da, &inner_da, &mut tmp);
        row.add_mul(&a, &inner_a, &mut tmp);
        row
    });
    to_log_complex(&tree_reduce(&rows, Cf::zero(prec), &|a: Cf, b: Cf| a.add(b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_grows_linearly() {
        assert!(auto_bits(101) > 96 && auto_bits(401) > 3 * auto_bits(101) / 2);
    }

    #[test]
    fn log_conversion() {
        let z = Cf { re: Float::with_val(200, -3.0), im: Float::with_val(200, 4.0) };
        let l = to_log_complex(&z);
        assert!((l.logmag - 5f64.ln()).abs() < 1e-15 && (l.phase - 4f64.atan2(-3.0)).abs() < 1e-15);
        let big = Cf { re: Float::with_val(200, Float::i_exp(1, 5000)), im: Float::new(200) };
        assert!((to_log_complex(&big).logmag - 5000.0 * LN_2).abs() < 1e-9);
    }
}
