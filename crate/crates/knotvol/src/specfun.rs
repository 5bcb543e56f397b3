//! Special functions: the complex dilogarithm Li₂, the Lobachevsky function Λ
//! and Faddeev's quantum dilogarithm φ_N.

use crate::error::{Error, Result};
use crate::qnum::RootOfUnityCtx;
use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

const PI2_6: f64 = PI * PI / 6.0;

/// A value of a multivalued function together with the sheet it lives on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchedValue {
    pub value: Complex64,
    /// Number of times 2πi·log z has been added (Li₂ continued around z = 1).
    pub branch_index: i64,
}

/// Which side of the cut [1, ∞) an on-cut argument is approached from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutSide {
    Above,
    Below,
}

/// B_{2k}/(2k+1)! for k = 1..=20.
fn bernoulli_coeffs() -> &'static [f64; 20] {
    static C: OnceLock<[f64; 20]> = OnceLock::new();
    C.get_or_init(|| {
        const B: [(f64, f64); 20] = [
            (1.0, 6.0),
            (-1.0, 30.0),
            (1.0, 42.0),
            (-1.0, 30.0),
            (5.0, 66.0),
            (-691.0, 2730.0),
            (7.0, 6.0),
            (-3617.0, 510.0),
            (43867.0, 798.0),
            (-174611.0, 330.0),
            (854513.0, 138.0),
            (-236364091.0, 2730.0),
            (8553103.0, 6.0),
            (-23749461029.0, 870.0),
            (8615841276005.0, 14322.0),
            (-7709321041217.0, 510.0),
            (2577687858367.0, 6.0),
            (-26315271553053477373.0, 1919190.0),
            (2929993913841559.0, 6.0),
            (-261082718496449122051.0, 13530.0),
        ];
        let mut out = [0.0; 20];
        let mut fact = 1.0;
        for (k, (num, den)) in B.iter().enumerate() {
            let m = 2 * k + 3;
            fact *= ((m - 1) * m) as f64;
            out[k] = num / den / fact;
        }
        out
    })
}

/// Bernoulli series Li₂(z) = Σ B_n uⁿ⁺¹/(n+1)!, u = −log(1−z); used for
/// |z| ≤ 1, Re z ≤ 1/2 where |u| < 1.4.
fn li2_series(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let mut term = u * u2;
    let mut sum = u - u2 / 4.0;
    for &c in bernoulli_coeffs() {
        let t = term * c;
        sum += t;
        if t.norm() < 1e-17 * sum.norm() {
            break;
        }
        term *= u2;
    }
    sum
}

fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re > 1.0
}

/// Principal branch of the dilogarithm, analytic off [1, ∞).
pub fn li2(z: Complex64) -> Result<Complex64> {
    if on_cut(z) {
        return Err(Error::Domain(format!("Li2 evaluated on its cut at {z} without a side")));
    }
    Ok(li2_unchecked(z))
}

/// Li₂ with an explicit side for arguments on the cut [1, ∞).
pub fn li2_side(z: Complex64, side: CutSide) -> Complex64 {
    if !on_cut(z) {
        return li2_unchecked(z);
    }
    let x = z.re;
    let lx = x.ln();
    let re = 2.0 * PI2_6 - 0.5 * lx * lx - li2_unchecked(Complex64::new(1.0 / x, 0.0)).re;
    let im = PI * lx;
    match side {
        CutSide::Above => Complex64::new(re, im),
        CutSide::Below => Complex64::new(re, -im),
    }
}

fn li2_unchecked(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if z.norm_sqr() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if z == one {
        return Complex64::new(PI2_6, 0.0);
    }
    if z.norm() > 1.0 {
        // Li₂(z) = −π²/6 − ½log²(−z) − Li₂(1/z), valid off [0, ∞).
        let l = (-z).ln();
        return -PI2_6 - 0.5 * l * l - li2_unchecked(one / z);
    }
    if z.re > 0.5 {
        // Li₂(z) = π²/6 − log z log(1−z) − Li₂(1−z).
        return PI2_6 - z.ln() * (one - z).ln() - li2_series(one - z);
    }
    li2_series(z)
}

/// Li₂ continued k times around z = 1: Li₂(z) − 2πik·log z.
pub fn li2_sheet(z: Complex64, k: i64) -> Result<BranchedValue> {
    let v = li2(z)?;
    Ok(BranchedValue { value: v - Complex64::new(0.0, 2.0 * PI * k as f64) * z.ln(), branch_index: k })
}

/// Lobachevsky function Λ(θ) = ½ Σ_{n≥1} sin(2nθ)/n², summed in closed form
/// as ½ Im Li₂(e^{2iθ}).
pub fn lobachevsky(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t == 0.0 {
        return 0.0;
    }
    0.5 * li2_unchecked(Complex64::from_polar(1.0, 2.0 * t)).im
}

/// Volume of the regular ideal octahedron, 8Λ(π/4).
pub fn octahedron_volume() -> f64 {
    8.0 * lobachevsky(PI / 4.0)
}

/// Quadrature layout for [`faddeev_phi`].
const SEG_NODES: usize = 24;
const SEG_LEN: f64 = 2.0;
const ARC_NODES: usize = 64;

fn gl(deg: usize) -> &'static GaussLegendre {
    static R24: OnceLock<GaussLegendre> = OnceLock::new();
    static R64: OnceLock<GaussLegendre> = OnceLock::new();
    let cell = if deg == SEG_NODES { &R24 } else { &R64 };
    cell.get_or_init(|| GaussLegendre::new(deg).expect("degree >= 2"))
}

/// Faddeev's quantum dilogarithm
/// φ_N(x) = ∫_C e^{(2x−1)t} / (4t sinh t sinh(t/N)) dt
/// for 0 < Re x < 1, where C is the real line with the segment [−1, 1]
/// replaced by the upper unit semicircle.
pub fn faddeev_phi(ctx: &RootOfUnityCtx, x: Complex64) -> Result<Complex64> {
    if !(x.re > 0.0 && x.re < 1.0) {
        return Err(Error::Domain(format!("faddeev_phi needs 0 < Re x < 1, got {x}")));
    }
    let nf = ctx.n() as f64;
    let a = 2.0 * x - 1.0;
    let one = Complex64::new(1.0, 0.0);

    // Semicircle t = e^{iθ}, θ from π to 0.
    let arc = gl(ARC_NODES);
    let mut arc_sum = Complex64::new(0.0, 0.0);
    for &(node, weight) in arc.as_node_weight_pairs() {
        let th = PI / 2.0 * (1.0 + node);
        let t = Complex64::from_polar(1.0, th);
        let f = (a * t).exp() / (4.0 * t * t.sinh() * (t / nf).sinh());
        arc_sum -= f * Complex64::i() * t * (PI / 2.0) * weight;
    }

    // Rays: f(t) + f(−t) = sinh(at)/(2t sinh t sinh(t/N)) on [1, ∞), written
    // with decaying exponentials only.
    let pair = |t: f64| -> Complex64 {
        let e2 = (-2.0 * t).exp();
        let en = (-2.0 * t / nf).exp();
        let num = ((a - 1.0) * t).exp() - ((-a - 1.0) * t).exp();
        num * 2.0 * (-t / nf).exp() / (2.0 * t * (1.0 - e2) * (one - en))
    };
    let rate = 1.0 + 1.0 / nf - a.re.abs();
    let t_max = 1.0 + 45.0 / rate;
    let nseg = ((t_max - 1.0) / SEG_LEN).ceil() as usize;
    if nseg > 2_000_000 {
        return Err(Error::Numeric(format!("faddeev_phi: integrand decays too slowly (rate {rate:.3e})")));
    }
    let seg = gl(SEG_NODES);
    let mut ray = Complex64::new(0.0, 0.0);
    for j in 0..nseg {
        let lo = 1.0 + j as f64 * SEG_LEN;
        let mut s = Complex64::new(0.0, 0.0);
        for &(node, weight) in seg.as_node_weight_pairs() {
            s += pair(lo + SEG_LEN / 2.0 * (1.0 + node)) * weight;
        }
        ray += s * (SEG_LEN / 2.0);
    }
    let v = arc_sum + ray;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Numeric(format!("faddeev_phi: non-finite result at x = {x}, N = {}", ctx.n())));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn li2_special_values() {
        assert_eq!(li2(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((li2(c(1.0, 0.0)).unwrap() - PI2_6).norm() < 1e-15);
        assert!((li2(c(-1.0, 0.0)).unwrap() + PI * PI / 12.0).norm() < 1e-14);
        assert!((li2(c(0.5, 0.0)).unwrap().re - (PI2_6 / 2.0 - 0.5 * 2f64.ln().powi(2))).abs() < 1e-14);
        assert!(li2(c(2.0, 0.0)).is_err());
    }

    #[test]
    fn li2_cut_sides() {
        let above = li2_side(c(3.0, 0.0), CutSide::Above);
        let below = li2_side(c(3.0, 0.0), CutSide::Below);
        assert!((above - li2(c(3.0, 1e-12)).unwrap()).norm() < 1e-9);
        assert!((below - li2(c(3.0, -1e-12)).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn li2_power_series_oracle() {
        for z in [c(0.3, 0.4), c(-0.6, 0.2), c(0.7, -0.5), c(0.1, 0.9)] {
            let mut s = Complex64::new(0.0, 0.0);
            let mut zp = z;
            for n in 1..4000 {
                s += zp / (n * n) as f64;
                zp *= z;
            }
            assert!((li2(z).unwrap() - s).norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn lobachevsky_values() {
        assert_eq!(lobachevsky(0.0), 0.0);
        assert!(lobachevsky(PI / 2.0).abs() < 1e-15);
        assert!((16.0 * lobachevsky(PI / 4.0) - 7.327724753).abs() < 1e-8);
        // Partial Fourier sum with the alternating tail removed.
        let th = 0.4;
        let m = 200_000;
        let mut s = 0.0;
        for n in 1..=m {
            s += (2.0 * n as f64 * th).sin() / (n as f64).powi(2);
        }
        assert!((0.5 * s - lobachevsky(th)).abs() < 1e-5);
    }

    #[test]
    fn faddeev_shift_identity() {
        let ctx = RootOfUnityCtx::new(11).unwrap();
        for a in [c(0.3, 0.0), c(0.45, -0.1), c(0.7, 0.05)] {
            let h = 1.0 / 22.0;
            let lhs = faddeev_phi(&ctx, a + h).unwrap() - faddeev_phi(&ctx, a - h).unwrap();
            let rhs = -(1.0 - (Complex64::new(0.0, 2.0 * PI) * a).exp()).ln();
            assert!((lhs - rhs).norm() < 1e-8, "{a}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn faddeev_classical_limit() {
        let t = c(0.3, 0.0);
        let mut prev = f64::INFINITY;
        for n in [51, 101, 201] {
            let ctx = RootOfUnityCtx::new(n).unwrap();
            let cl = (n as f64) / Complex64::new(0.0, 2.0 * PI) * li2((Complex64::new(0.0, 2.0 * PI) * t).exp()).unwrap();
            let d = (faddeev_phi(&ctx, t).unwrap() - cl).norm();
            assert!(d < prev, "N={n}: {d}");
            prev = d;
        }
        let n = 101;
        let ctx = RootOfUnityCtx::new(n).unwrap();
        let v = faddeev_phi(&ctx, c(0.5 / n as f64, 0.0)).unwrap();
        let lead = n as f64 / Complex64::new(0.0, 2.0 * PI) * PI2_6;
        assert!((v - lead).norm() < 3.0 * (n as f64).ln());
    }
}
