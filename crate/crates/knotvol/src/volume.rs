//! Complex volumes from saddle values and from the Neumann–Zagier surgery
//! formula, plus convergence studies of Jones growth rates.

use crate::error::{Error, Result};
use crate::jones::{jones, JonesValue, KnotSpec};
use crate::potential::{psi_w, psi_w_deriv, saddle_double, saddle_whitehead, PotentialParams};
use crate::qnum::RootOfUnityCtx;
use crate::specfun::octahedron_volume;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

const PI2: f64 = PI * PI;
const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// Cache key component; bump when numerics change.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumePath {
    SaddlePotential,
    NzSurgery,
}

/// Vol + i·CS with CS reduced into [0, π²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexVolume {
    pub vol: f64,
    pub cs: f64,
    /// Value before reduction of the imaginary part.
    pub raw: Complex64,
    pub path: VolumePath,
}

/// x mod π² in [0, π²).
pub fn reduce_cs(x: f64) -> f64 {
    let r = x.rem_euclid(PI2);
    if r >= PI2 {
        0.0
    } else {
        r
    }
}

/// Signed distance of x from 0 mod π², in (−π²/2, π²/2].
pub fn cs_distance(x: f64) -> f64 {
    let r = reduce_cs(x);
    if r > PI2 / 2.0 {
        r - PI2
    } else {
        r
    }
}

impl ComplexVolume {
    pub fn from_raw(raw: Complex64, path: VolumePath) -> Self {
        Self { vol: raw.re, cs: reduce_cs(raw.im), raw, path }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.vol, self.cs)
    }
}

/// Vol(S³∖B) = 16Λ(π/4), the volume of two regular ideal octahedra.
pub fn borromean_complex_volume() -> ComplexVolume {
    ComplexVolume::from_raw(Complex64::new(2.0 * octahedron_volume(), 0.0), VolumePath::SaddlePotential)
}

/// CS of the manifold a W_p surgery starts from: B for even p, B₁ (CS π²/2)
/// for odd p. The closed combination below is normalized at B.
fn whitehead_anchor_shift(p: i64) -> Complex64 {
    if p % 2 == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, PI2 / 2.0)
    }
}

/// (1/i)(Φ_{W_p}(α₀) + 4π²(α₀ − ½)) at the geometric saddle, plus iπ²/2 for
/// odd p.
pub fn complex_volume_whitehead(p: i64) -> Result<ComplexVolume> {
    let s = saddle_whitehead(p)?;
    let raw = PotentialParams::whitehead(p).raw_complex_volume(&[s.alpha0])? + whitehead_anchor_shift(p);
    Ok(ComplexVolume::from_raw(raw, VolumePath::SaddlePotential))
}

/// (1/i)(Φ_{D_{p,r}}(α₀, β₀) + 4π²(α₀ − ½) + 4π²(β₀ − ½)) at the saddle.
pub fn complex_volume_double(p: i64, r: i64) -> Result<ComplexVolume> {
    let s = saddle_double(p, r)?;
    let beta0 = s.beta0.ok_or_else(|| Error::Numeric("two-variable saddle without β₀".into()))?;
    let raw = PotentialParams::double(p, r).raw_complex_volume(&[s.alpha0, beta0])?;
    Ok(ComplexVolume::from_raw(raw, VolumePath::SaddlePotential))
}

/// Log-holonomies of the surgery component at a point α of the Whitehead
/// deformation (v = −1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurgeryCurveData {
    /// Meridian: log(−(√u−1)²/(√u+1)²) + 2πi·branch.
    pub m: Complex64,
    /// Longitude: 4πiα − 2πi.
    pub l: Complex64,
    /// Core geodesic of the filled component.
    pub gamma: Complex64,
    /// Sheet of the logarithm in m.
    pub branch: i64,
}

/// −(√u−1)²/(√u+1)² with √u principal.
fn meridian_ratio(alpha: Complex64) -> Complex64 {
    let s = (TWO_PI_I * alpha).exp().sqrt();
    -(s - 1.0).powi(2) / (s + 1.0).powi(2)
}

/// m(α) on the sheet matching (1/2πi)Ψ_W′(α), l(α) = 4πiα − 2πi.
pub fn surgery_curve(alpha: Complex64) -> Result<SurgeryCurveData> {
    let principal = meridian_ratio(alpha).ln();
    let target = psi_w_deriv(alpha)? / TWO_PI_I;
    let branch = ((target - principal).im / (2.0 * PI)).round() as i64;
    let m = principal + TWO_PI_I * branch as f64;
    let l = 4.0 * PI * Complex64::i() * alpha - TWO_PI_I;
    Ok(SurgeryCurveData { m, l, gamma: l, branch })
}

/// H = Ψ_W − ½ml.
fn nz_h(alpha: Complex64) -> Result<(Complex64, SurgeryCurveData)> {
    let d = surgery_curve(alpha)?;
    Ok((psi_w(alpha)? - 0.5 * d.m * d.l, d))
}

/// max |dH/dm + l/2| over the samples, with dH/dm by central differences.
pub fn nz_consistency(alphas: &[Complex64]) -> Result<f64> {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for &a in alphas {
        let (hp, dp) = nz_h(a + h)?;
        let (hm, dm) = nz_h(a - h)?;
        let (_, d) = nz_h(a)?;
        let deriv = (hp - hm) / (dp.m - dm.m);
        worst = worst.max((deriv + 0.5 * d.l).norm());
    }
    Ok(worst)
}

/// h(m) = H(m) + ¼ml.
pub fn nz_small_h(alpha: Complex64) -> Result<Complex64> {
    let (hh, d) = nz_h(alpha)?;
    Ok(hh + 0.25 * d.m * d.l)
}

/// Surgery data at the W_p saddle with m on the sheet where
/// m + (p/2)·l = 2πi.
pub fn whitehead_surgery_data(p: i64) -> Result<SurgeryCurveData> {
    let s = saddle_whitehead(p)?;
    let mut d = surgery_curve(s.alpha0)?;
    let principal = meridian_ratio(s.alpha0).ln();
    let want = TWO_PI_I - 0.5 * p as f64 * d.l;
    let k = ((want - principal).im / (2.0 * PI)).round();
    d.m = principal + TWO_PI_I * k;
    d.branch = k as i64;
    if (d.m + 0.5 * p as f64 * d.l - TWO_PI_I).norm() > 1e-8 {
        return Err(Error::Branch(format!("m + (p/2)l = {} is not 2πi", d.m + 0.5 * p as f64 * d.l)));
    }
    Ok(d)
}

/// Complex volume of W_p by the surgery formula (1/i)(h(m) − (πi/2)·γ),
/// γ = l, with h(0) the complex volume of B (even p) or B₁ (odd p). Negative p goes through the mirror W_{−p}.
pub fn complex_volume_whitehead_nz(p: i64) -> Result<ComplexVolume> {
    if p < 0 {
        let m = complex_volume_whitehead_nz(-p)?;
        return Ok(ComplexVolume::from_raw(m.raw.conj(), VolumePath::NzSurgery));
    }
    let s = saddle_whitehead(p)?;
    let d = whitehead_surgery_data(p)?;
    let h = psi_w(s.alpha0)? - 0.25 * d.m * d.l;
    let raw = (h - 0.5 * PI * Complex64::i() * d.gamma) / Complex64::i() + whitehead_anchor_shift(p);
    Ok(ComplexVolume::from_raw(raw, VolumePath::NzSurgery))
}

/// Target Vol + i·CS for the knots with known complex volume.
pub fn target_volume(knot: KnotSpec) -> Result<ComplexVolume> {
    let b = borromean_complex_volume();
    match knot {
        KnotSpec::Borromean | KnotSpec::B11 => Ok(b),
        KnotSpec::B1 => Ok(ComplexVolume::from_raw(Complex64::new(b.vol, PI2 / 2.0), VolumePath::SaddlePotential)),
        KnotSpec::Whitehead(p) => complex_volume_whitehead(p),
        KnotSpec::DoubleTwist(p, r) => complex_volume_double(p, r),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// (2π/N)·log|J| + i·(two-point cs estimate).
    pub growth: Complex64,
    /// π·(log J(N+2) − log J(N)), cs reduced to [0, π²).
    pub two_point: Complex64,
    pub target: Complex64,
    /// |growth − target| with the imaginary difference taken mod π².
    pub abs_err: f64,
    /// |Re growth − Vol|.
    pub vol_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub knot: KnotSpec,
    pub rows: Vec<ConvergenceRow>,
    /// Constant term of the fit a + b·(log N)/N + c/N (needs ≥ 3 rows).
    pub extrapolated: Option<Complex64>,
    pub extrapolated_err: Option<f64>,
}

impl ConvergenceTable {
    /// Indices i where vol_err[i] >= vol_err[i−1].
    pub fn non_monotone_steps(&self) -> Vec<usize> {
        (1..self.rows.len()).filter(|&i| self.rows[i].vol_err >= self.rows[i - 1].vol_err).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["N", "re_growth", "im_growth", "re_target", "im_target", "abs_err"])?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                format!("{:.15e}", r.growth.re),
                format!("{:.15e}", r.growth.im),
                format!("{:.15e}", r.target.re),
                format!("{:.15e}", r.target.im),
                format!("{:.15e}", r.abs_err),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One cached Jones evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub knot: String,
    pub n: usize,
    pub version: String,
    pub value: JonesValue,
}

/// Append-only JSON-lines cache keyed by (knot, N, code version).
#[derive(Debug, Default)]
pub struct JonesCache {
    entries: HashMap<(String, usize, String), JonesValue>,
}

impl JonesCache {
    pub fn load(path: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let e: CacheEntry = serde_json::from_str(&line)?;
                entries.insert((e.knot, e.n, e.version), e.value);
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, knot: KnotSpec, n: usize) -> Option<JonesValue> {
        self.entries.get(&(knot.to_string(), n, CODE_VERSION.to_string())).copied()
    }

    pub fn append(&mut self, path: &Path, value: JonesValue) -> Result<()> {
        let e = CacheEntry { knot: value.knot.to_string(), n: value.n, version: CODE_VERSION.to_string(), value };
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        writeln!(f, "{}", serde_json::to_string(&e)?)?;
        self.entries.insert((e.knot, e.n, e.version), value);
        Ok(())
    }
}

/// Evaluate J_{N−1}(K) for each N in parallel, reusing and extending the
/// cache when given.
pub fn jones_ladder(knot: KnotSpec, ns: &[usize], cache: Option<&Path>) -> Result<Vec<JonesValue>> {
    let mut store = match cache {
        Some(p) => JonesCache::load(p)?,
        None => JonesCache::default(),
    };
    let missing: Vec<usize> = ns.iter().copied().filter(|&n| store.get(knot, n).is_none()).collect();
    let fresh: Vec<JonesValue> = missing
        .par_iter()
        .map(|&n| jones(&RootOfUnityCtx::new(n)?, knot))
        .collect::<Result<Vec<_>>>()?;
    if let Some(p) = cache {
        for v in &fresh {
            store.append(p, *v)?;
        }
    } else {
        for v in &fresh {
            store.entries.insert((knot.to_string(), v.n, CODE_VERSION.to_string()), *v);
        }
    }
    ns.iter()
        .map(|&n| store.get(knot, n).ok_or_else(|| Error::Numeric(format!("missing value for N = {n}"))))
        .collect()
}

/// Two-point estimate π·(log J(N+2) − log J(N)) of vol + i·cs. Shifting
/// either log by 2πi moves the imaginary part by 2π², so the estimate is
/// branch-free once cs is reduced mod π²; the real part carries no 1/N
/// bias from the polynomial prefactor's leading term.
pub fn two_point_estimate(at_n: &JonesValue, at_n2: &JonesValue) -> Result<Complex64> {
    if at_n2.n != at_n.n + 2 || at_n.knot != at_n2.knot {
        return Err(Error::Domain(format!("two-point estimate needs N and N+2 of one knot, got {} and {}", at_n.n, at_n2.n)));
    }
    let d = (at_n2.log_branch - at_n.log_branch) * PI;
    Ok(Complex64::new(d.re, reduce_cs(d.im)))
}

/// Growth rates with Re = (2π/N)·log|J(N)| and Im the two-point cs estimate,
/// the latter moved by multiples of π² to stay nearest the previous entry
/// (the first is placed nearest `anchor`).
pub fn growth_rates(values: &[JonesValue], successors: &[JonesValue], anchor: f64) -> Result<Vec<Complex64>> {
    let mut out: Vec<Complex64> = Vec::with_capacity(values.len());
    for (v, w) in values.iter().zip(successors) {
        let est = two_point_estimate(v, w)?;
        let reference = out.last().map_or(anchor, |g| g.im);
        let cs = reference + cs_distance(est.im - reference);
        out.push(Complex64::new(v.growth().re, cs));
    }
    Ok(out)
}

/// Least-squares fit y ≈ a + b·(log N)/N + c/N; returns a.
pub fn extrapolate(ns: &[usize], ys: &[Complex64]) -> Option<Complex64> {
    if ns.len() < 3 || ns.len() != ys.len() {
        return None;
    }
    let basis = |n: usize| {
        let n = n as f64;
        [1.0, n.ln() / n, 1.0 / n]
    };
    let a = nalgebra::DMatrix::from_fn(ns.len(), 3, |i, j| basis(ns[i])[j]);
    let solve = |y: nalgebra::DVector<f64>| -> Option<f64> {
        let svd = a.clone().svd(true, true);
        svd.solve(&y, 1e-14).ok().map(|x| x[0])
    };
    let re = solve(nalgebra::DVector::from_iterator(ys.len(), ys.iter().map(|z| z.re)))?;
    let im = solve(nalgebra::DVector::from_iterator(ys.len(), ys.iter().map(|z| z.im)))?;
    Some(Complex64::new(re, im))
}

fn complex_err(growth: Complex64, target: Complex64) -> f64 {
    Complex64::new(growth.re - target.re, cs_distance(growth.im - target.im)).norm()
}

/// Compare growth rates of J_{N−1}(K) along the ladder with the complex
/// volume.
pub fn convergence_study(knot: KnotSpec, ns: &[usize], cache: Option<&Path>) -> Result<ConvergenceTable> {
    if ns.is_empty() {
        return Err(Error::Domain("empty N ladder".into()));
    }
    if ns.iter().any(|n| n % 2 == 0) || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!("N ladder must be odd and ascending: {ns:?}")));
    }
    if let KnotSpec::DoubleTwist(p, r) = knot {
        if p.abs() < 2 || r.abs() < 2 {
            return Err(Error::Domain(format!("D({p},{r}) is not hyperbolic; hyperbolic only")));
        }
    }
    let target = target_volume(knot)?.as_complex();
    let mut all: Vec<usize> = ns.iter().flat_map(|&n| [n, n + 2]).collect();
    all.sort_unstable();
    all.dedup();
    let values = jones_ladder(knot, &all, cache)?;
    let at = |n: usize| values[all.binary_search(&n).expect("ladder contains n")];
    let base: Vec<JonesValue> = ns.iter().map(|&n| at(n)).collect();
    let next: Vec<JonesValue> = ns.iter().map(|&n| at(n + 2)).collect();
    let growth = growth_rates(&base, &next, target.im)?;
    let rows: Vec<ConvergenceRow> = ns
        .iter()
        .zip(&growth)
        .zip(base.iter().zip(&next))
        .map(|((&n, &g), (a, b))| {
            let two_point = two_point_estimate(a, b).expect("checked in growth_rates");
            ConvergenceRow { n, growth: g, two_point, target, abs_err: complex_err(g, target), vol_err: (g.re - target.re).abs() }
        })
        .collect();
    let extrapolated = extrapolate(ns, &growth);
    let extrapolated_err = extrapolated.map(|e| complex_err(e, target));
    Ok(ConvergenceTable { knot, rows, extrapolated, extrapolated_err })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitehead_two_is_one_octahedron() {
        let v = complex_volume_whitehead(2).unwrap();
        assert!((v.vol - octahedron_volume()).abs() < 1e-9, "{v:?}");
        assert_eq!(v.path, VolumePath::SaddlePotential);
    }

    #[test]
    fn mirror_whitehead() {
        let a = complex_volume_whitehead(2).unwrap();
        let b = complex_volume_whitehead(-2).unwrap();
        assert!((a.vol - b.vol).abs() < 1e-9);
        assert!(cs_distance(a.cs + b.cs).abs() < 1e-8);
    }

    #[test]
    fn cs_reduction_idempotent() {
        for x in [-30.0, -PI2, -1.0, 0.0, 4.0, PI2, 25.0] {
            let r = reduce_cs(x);
            assert!((0.0..PI2).contains(&r));
            assert_eq!(reduce_cs(r), r);
            assert!(cs_distance(x - r).abs() < 1e-12);
        }
    }

    #[test]
    fn nz_reassembly_two() {
        let a = complex_volume_whitehead(2).unwrap();
        let b = complex_volume_whitehead_nz(2).unwrap();
        assert!((a.raw - b.raw).norm() < 1e-8, "{a:?} {b:?}");
    }

    #[test]
    fn nz_anchor() {
        let h0 = nz_small_h(Complex64::new(0.5, 0.0)).unwrap();
        assert!((h0 / Complex64::i() - 2.0 * octahedron_volume()).norm() < 1e-10, "{h0}");
    }

    #[test]
    fn two_point_is_branch_free() {
        let a = jones(&RootOfUnityCtx::new(11).unwrap(), KnotSpec::B1).unwrap();
        let b = jones(&RootOfUnityCtx::new(13).unwrap(), KnotSpec::B1).unwrap();
        let e0 = two_point_estimate(&a, &b).unwrap();
        let shifted = JonesValue { log_branch: b.log_branch + TWO_PI_I * 3.0, ..b };
        let e1 = two_point_estimate(&a, &shifted).unwrap();
        assert!((e0 - e1).norm() < 1e-9);
        assert!(two_point_estimate(&a, &a).is_err());
    }

    #[test]
    fn extrapolation_recovers_constant() {
        let ns = [101, 201, 401, 501];
        let ys: Vec<Complex64> = ns
            .iter()
            .map(|&n| {
                let x = n as f64;
                Complex64::new(7.0 + 3.0 * x.ln() / x - 2.0 / x, 1.0 - 1.0 / x)
            })
            .collect();
        let a = extrapolate(&ns, &ys).unwrap();
        assert!((a - Complex64::new(7.0, 1.0)).norm() < 1e-9);
    }
}
