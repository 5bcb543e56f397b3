//! Parabolic SL(2,ℂ) representations: the Borromean solutions, the twisted
//! Whitehead trace equation with geometric root selection, the coupled double
//! twist system, fixed points, relation checks and domain export.

use crate::error::{Error, Result};
use crate::jones::KnotSpec;
use crate::potential::{inner_max, psi_b_grad, saddle_double, saddle_whitehead};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::Mul;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// 2×2 complex matrix [[a, b], [c, d]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2C {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, o: Mat2C) -> Mat2C {
        Mat2C {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

impl Mat2C {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(ONE, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), ONE)
    }

    pub fn diag(x: Complex64, y: Complex64) -> Self {
        Self::new(x, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), y)
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn inv(&self) -> Self {
        let det = self.det();
        Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn powi(&self, k: i64) -> Self {
        let base = if k < 0 { self.inv() } else { *self };
        let mut out = Self::identity();
        let mut b = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = out * b;
            }
            b = b * b;
            e >>= 1;
        }
        out
    }

    pub fn sup_norm(&self) -> f64 {
        [self.a, self.b, self.c, self.d].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn sub(&self, o: &Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    /// Möbius action on the Riemann sphere (None is ∞).
    pub fn mobius(&self, z: Option<Complex64>) -> Option<Complex64> {
        match z {
            None => (self.c.norm() > 0.0).then(|| self.a / self.c),
            Some(z) => {
                let den = self.c * z + self.d;
                (den.norm() > 0.0).then(|| (self.a * z + self.b) / den)
            }
        }
    }

    /// Fixed points of the Möbius action; for a parabolic matrix both
    /// entries coincide. The first uses +√, the second −√ of the discriminant.
    pub fn fixed_points(&self) -> [Option<Complex64>; 2] {
        let tr = self.trace();
        let disc = (tr * tr - 4.0).sqrt();
        let scale = self.sup_norm().max(1.0);
        if self.c.norm() <= 1e-14 * scale {
            // Upper triangular: ∞ and b/(d−a).
            let other = (self.d - self.a).norm() > 1e-14 * scale;
            let finite = other.then(|| self.b / (self.d - self.a));
            return [None, finite];
        }
        [Some((self.a - self.d + disc) / (2.0 * self.c)), Some((self.a - self.d - disc) / (2.0 * self.c))]
    }

    /// Fixed point whose eigenvector has eigenvalue λ.
    pub fn eigen_fixed_point(&self, lambda: Complex64) -> Option<Complex64> {
        let scale = self.sup_norm().max(1.0);
        // Eigenvector (b, λ−a) or (λ−d, c); use the larger one.
        let (x0, y0) = (self.b, lambda - self.a);
        let (x1, y1) = (lambda - self.d, self.c);
        let (x, y) = if x0.norm() + y0.norm() >= x1.norm() + y1.norm() { (x0, y0) } else { (x1, y1) };
        (y.norm() > 1e-14 * scale).then(|| x / y)
    }

    /// Fixed point of a parabolic matrix.
    pub fn parabolic_fixed_point(&self) -> Option<Complex64> {
        let scale = self.sup_norm().max(1.0);
        if self.c.norm() <= 1e-14 * scale {
            None
        } else {
            Some((self.a - self.d) / (2.0 * self.c))
        }
    }
}

/// Relative sup-norm distance between L and ±R (SL(2,ℂ) covers PSL(2,ℂ)).
pub fn projective_residual(l: &Mat2C, r: &Mat2C) -> f64 {
    let scale = l.sup_norm().max(r.sup_norm()).max(1.0);
    l.sub(r).sup_norm().min(l.sub(&r.scale(-ONE)).sup_norm()) / scale
}

/// A word in the generators: (name, exponent) pairs, multiplied left to right.
pub type Word = Vec<(String, i64)>;

fn w(parts: &[(&str, i64)]) -> Word {
    parts.iter().map(|(n, e)| (n.to_string(), *e)).collect()
}

fn eval_word(m: &BTreeMap<String, Mat2C>, word: &Word) -> Result<Mat2C> {
    let mut out = Mat2C::identity();
    for (name, e) in word {
        let g = m.get(name).ok_or_else(|| Error::Domain(format!("no matrix for generator {name}")))?;
        out = out * g.powi(*e);
    }
    Ok(out)
}

/// A relation lhs = rhs between words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub lhs: Word,
    pub rhs: Word,
}

fn rel(name: &str, lhs: &[(&str, i64)], rhs: &[(&str, i64)]) -> Relation {
    Relation { name: name.to_string(), lhs: w(lhs), rhs: w(rhs) }
}

/// Find h with A·h = h·B for all pairs (A, B): the right singular vector of
/// the stacked linear system for the smallest singular value, scaled to
/// det h = 1. Returns h and the smallest singular value.
pub fn solve_conjugator(pairs: &[(Mat2C, Mat2C)]) -> Result<(Mat2C, f64)> {
    let mut rows = DMatrix::<Complex64>::zeros(4 * pairs.len(), 4);
    // Unknown h = (h00, h01, h10, h11).
    for (k, (a, b)) in pairs.iter().enumerate() {
        let am = [[a.a, a.b], [a.c, a.d]];
        let bm = [[b.a, b.b], [b.c, b.d]];
        for i in 0..2 {
            for j in 0..2 {
                let row = 4 * k + 2 * i + j;
                for m in 0..2 {
                    rows[(row, 2 * m + j)] += am[i][m];
                    rows[(row, 2 * i + m)] -= bm[m][j];
                }
            }
        }
    }
    let svd = rows.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Numeric("SVD failed".into()))?;
    let (idx, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, s)| (i, *s))
        .ok_or_else(|| Error::Numeric("empty SVD".into()))?;
    let v: Vec<Complex64> = (0..4).map(|j| vt[(idx, j)].conj()).collect();
    let h = Mat2C::new(v[0], v[1], v[2], v[3]);
    let det = h.det();
    if det.norm() < 1e-12 {
        return Err(Error::Numeric("conjugator is singular".into()));
    }
    Ok((h.scale(ONE / det.sqrt()), smin))
}

/// Representation data for one knot or link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyData {
    pub knot: KnotSpec,
    pub u: Complex64,
    pub v: Complex64,
    pub matrices: BTreeMap<String, Mat2C>,
    /// None encodes ∞.
    pub fixed_points: BTreeMap<String, Option<Complex64>>,
    pub relations: Vec<Relation>,
    pub relation_residuals: BTreeMap<String, f64>,
}

impl HolonomyData {
    fn new(knot: KnotSpec, u: Complex64, v: Complex64) -> Self {
        Self {
            knot,
            u,
            v,
            matrices: BTreeMap::new(),
            fixed_points: BTreeMap::new(),
            relations: Vec::new(),
            relation_residuals: BTreeMap::new(),
        }
    }

    fn set(&mut self, name: &str, m: Mat2C) {
        self.matrices.insert(name.to_string(), m);
    }

    fn fp(&mut self, name: &str, z: Option<Complex64>) {
        self.fixed_points.insert(name.to_string(), z);
    }

    pub fn matrix(&self, name: &str) -> Option<&Mat2C> {
        self.matrices.get(name)
    }

    pub fn fixed_point(&self, name: &str) -> Option<Option<Complex64>> {
        self.fixed_points.get(name).copied()
    }
}

/// Sup-norm residual of every relation attached to the data.
pub fn verify_relations(data: &HolonomyData) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for r in &data.relations {
        let l = eval_word(&data.matrices, &r.lhs)?;
        let rr = eval_word(&data.matrices, &r.rhs)?;
        out.insert(r.name.clone(), projective_residual(&l, &rr));
    }
    Ok(out)
}

fn finish(mut data: HolonomyData) -> Result<HolonomyData> {
    data.relation_residuals = verify_relations(&data)?;
    Ok(data)
}

/// One nonabelian parabolic solution for the Borromean rings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorromeanSolution {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
    pub data: HolonomyData,
}

fn borromean_meridians(x: Complex64, y: Complex64, z: Complex64) -> (Mat2C, Mat2C, Mat2C) {
    let m1 = Mat2C::new(-ONE, x, Complex64::new(0.0, 0.0), -ONE);
    let m2 = Mat2C::new(y - 1.0, y, -y, -ONE - y);
    let m3 = Mat2C::new(-ONE, Complex64::new(0.0, 0.0), -z, -ONE);
    (m1, m2, m3)
}

/// The two nonabelian solutions of xy = 4, yz = 4, trace ρ(g₄) = −2 with
/// ρ(g₁) = [[−1, x], [0, −1]], ρ(g₂) = [[−1+y, y], [−y, −1−y]],
/// ρ(g₃) = [[−1, 0], [−z, −1]], g₄ = (g₁g₂g₃)⁻¹.
///
/// With y = 4/x and z = 4/y = x, trace ρ(g₁g₂g₃) + 2 = xy + z(x + y + xy)
/// reduces to x² + 4x + 8 = 0.
pub fn borromean_solutions() -> Result<[BorromeanSolution; 2]> {
    let roots = [c(-2.0, 2.0), c(-2.0, -2.0)];
    let mut out = Vec::new();
    for x in roots {
        debug_assert!((x * x + 4.0 * x + 8.0).norm() < 1e-12);
        let y = 4.0 / x;
        let z = 4.0 / y;
        let (g1, g2, g3) = borromean_meridians(x, y, z);
        let g4 = (g1 * g2 * g3).inv();
        let mut d = HolonomyData::new(KnotSpec::Borromean, c(-1.0, 0.0), c(-1.0, 0.0));
        let (g12, g23) = (g1 * g2, g2 * g3);
        let (h1, _) = solve_conjugator(&[(g2, g1.inv()), (g3, g4.inv()), (g23, g23)])?;
        let (h2, _) = solve_conjugator(&[(g3.inv(), g2), (g12, g12)])?;
        for (n, m) in [("g1", g1), ("g2", g2), ("g3", g3), ("g4", g4), ("g12", g12), ("g23", g23), ("h1", h1), ("h2", h2)] {
            d.set(n, m);
        }
        for n in ["g1", "g2", "g3", "g4", "g12", "g23"] {
            let f = d.matrices[n].parabolic_fixed_point();
            d.fp(&n.replace('g', "p"), f);
        }
        d.relations = vec![
            rel("B1", &[("g2", 1)], &[("h1", 1), ("g1", -1), ("h1", -1)]),
            rel("B2", &[("g3", 1)], &[("h1", 1), ("g4", -1), ("h1", -1)]),
            rel("B3", &[("g3", -1)], &[("h2", 1), ("g2", 1), ("h2", -1)]),
            rel("product", &[("g1", 1), ("g2", 1), ("g3", 1), ("g4", 1)], &[]),
        ];
        out.push(BorromeanSolution { x, y, z, data: finish(d)? });
    }
    let b = out.pop().expect("two solutions");
    let a = out.pop().expect("two solutions");
    Ok([a, b])
}

/// Geometric representations of B, B₁, B₁,₁ normalized by
/// ρ′(g₂₃) = [[−1, x], [0, −1]], ρ′(g₁) = [[−1+y, y], [−y, −1−y]],
/// ρ′(g₂) = [[−1, 0], [−z, −1]] with (x, y, z) = (2i, −2i, 2i).
pub fn borromean_variant(knot: KnotSpec) -> Result<HolonomyData> {
    let (x, y, z) = (c(0.0, 2.0), c(0.0, -2.0), c(0.0, 2.0));
    let (g23, g1, g2) = borromean_meridians(x, y, z);
    let g3 = g2.inv() * g23;
    let g4 = (g1 * g2 * g3).inv();
    let g12 = g1 * g2;
    let mut d = HolonomyData::new(knot, c(-1.0, 0.0), c(-1.0, 0.0));
    let (h1_pairs, b3): (Vec<(Mat2C, Mat2C)>, Relation) = match knot {
        KnotSpec::Borromean => (
            vec![(g2, g1.inv()), (g3, g4.inv()), (g23, g23)],
            rel("B3", &[("g3", -1)], &[("h2", 1), ("g2", 1), ("h2", -1)]),
        ),
        KnotSpec::B1 => (
            vec![(g2, g4.inv()), (g3.inv(), g4 * g1 * g4.inv()), (g23, g23)],
            rel("B3", &[("g3", -1)], &[("h2", 1), ("g2", 1), ("h2", -1)]),
        ),
        KnotSpec::B11 => (
            vec![(g2, g4.inv()), (g3.inv(), g4 * g1 * g4.inv()), (g23, g23)],
            rel("B3", &[("g3", -1)], &[("h2", 1), ("g2", -1), ("g1", 1), ("g2", 1), ("h2", -1)]),
        ),
        other => return Err(Error::Domain(format!("{other} is not in the Borromean family"))),
    };
    let (h1, _) = solve_conjugator(&h1_pairs)?;
    // Normalize h₁ to eigenvalue −1.
    let h1 = if h1.trace().re > 0.0 { h1.scale(-ONE) } else { h1 };
    let h2_target = match knot {
        KnotSpec::B11 => g2.inv() * g1 * g2,
        _ => g2,
    };
    let (h2, _) = solve_conjugator(&[(g3.inv(), h2_target), (g12, g12)])?;
    for (n, m) in [("g1", g1), ("g2", g2), ("g3", g3), ("g4", g4), ("g12", g12), ("g23", g23), ("h1", h1), ("h2", h2)] {
        d.set(n, m);
    }
    for n in ["g1", "g2", "g3", "g4", "g12", "g23"] {
        let f = d.matrices[n].parabolic_fixed_point();
        d.fp(&n.replace('g', "r"), f);
    }
    let b1 = match knot {
        KnotSpec::Borromean => [
            rel("B1", &[("g2", 1)], &[("h1", 1), ("g1", -1), ("h1", -1)]),
            rel("B2", &[("g3", 1)], &[("h1", 1), ("g4", -1), ("h1", -1)]),
        ],
        _ => [
            rel("B1", &[("g2", 1)], &[("h1", 1), ("g4", -1), ("h1", -1)]),
            rel("B2", &[("g3", -1)], &[("h1", 1), ("g4", 1), ("g1", 1), ("g4", -1), ("h1", -1)]),
        ],
    };
    d.relations = vec![b1[0].clone(), b1[1].clone(), b3, rel("product", &[("g1", 1), ("g2", 1), ("g3", 1), ("g4", 1)], &[])];
    finish(d)
}

/// Vertices of the two regular ideal octahedra O₁ (fixed points of the
/// normalized Borromean representation) and O₂.
pub fn octahedra() -> (Vec<(String, Option<Complex64>)>, Vec<(String, Option<Complex64>)>) {
    let o1 = vec![
        ("r1".into(), Some(c(-1.0, 0.0))),
        ("r2".into(), Some(c(0.0, 0.0))),
        ("r3".into(), Some(c(0.0, 1.0))),
        ("r4".into(), Some(c(-1.0, 1.0))),
        ("r23".into(), None),
        ("r12".into(), Some(c(-0.5, 0.5))),
    ];
    let o2 = vec![
        ("s1".into(), Some(c(-1.0, 1.0))),
        ("s2".into(), Some(c(0.0, 1.0))),
        ("s3".into(), Some(c(0.0, 2.0))),
        ("s4".into(), Some(c(-1.0, 2.0))),
        ("s23".into(), None),
    ];
    (o1, o2)
}

/// Coefficients (ascending) of the product of two polynomials.
fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

fn monomial(k: usize, coef: f64) -> Vec<f64> {
    let mut v = vec![0.0; k + 1];
    v[k] = coef;
    v
}

fn poly_eval(p: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &a in p.iter().rev() {
        dv = dv * z + v;
        v = v * z + a;
    }
    (v, dv)
}

/// Roots of a real polynomial via companion-matrix eigenvalues, each polished
/// by Newton steps.
pub fn poly_roots(p: &[f64]) -> Result<Vec<Complex64>> {
    let mut p = p.to_vec();
    while p.last().is_some_and(|&x| x == 0.0) {
        p.pop();
    }
    let n = p.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = p[n];
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -p[i] / lead;
    }
    let eig: DVector<Complex64> = comp.complex_eigenvalues();
    Ok(eig
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..3 {
                let (v, dv) = poly_eval(&p, z);
                if dv.norm() == 0.0 {
                    break;
                }
                z -= v / dv;
            }
            z
        })
        .collect())
}

/// The polynomial in t = √u obtained by clearing denominators in
/// −(−t²)^p (t−1)²/(t+1)² = 1.
pub fn whitehead_t_polynomial(p: i64) -> Vec<f64> {
    let sq_m = [1.0, -2.0, 1.0]; // (t−1)²
    let sq_p = [1.0, 2.0, 1.0]; // (t+1)²
    let k = 2 * p.unsigned_abs() as usize;
    let sign = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 }; // (−1)^p
    if p > 0 {
        // −(−1)^p t^{2p}(t−1)² − (t+1)² = 0.
        poly_add(&poly_mul(&monomial(k, -sign), &sq_m), &sq_p.map(|x| -x))
    } else {
        // −(−1)^p (t−1)² − t^{2|p|}(t+1)² = 0.
        poly_add(&sq_m.map(|x| -sign * x), &poly_mul(&monomial(k, -1.0), &sq_p))
    }
}

/// Roots of the Whitehead trace equation and the geometric one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhiteheadRoots {
    /// Roots t of [`whitehead_t_polynomial`].
    pub t_roots: Vec<Complex64>,
    /// u = t² for each root.
    pub u_roots: Vec<Complex64>,
    /// The selected geometric u.
    pub u: Complex64,
    /// The square root of u solving the trace equation (principal for p > 0,
    /// the negated principal root for p < 0).
    pub t: Complex64,
}

/// p₃ = −(t−1)²/(t+1)² for the Whitehead family.
pub fn whitehead_p3(t: Complex64) -> Complex64 {
    -(t - 1.0).powi(2) / (t + 1.0).powi(2)
}

/// p·arg(−u) + arg(p₃), the real angle of the completeness condition.
pub fn whitehead_angle_sum(p: i64, t: Complex64) -> f64 {
    p as f64 * (-(t * t)).arg() + whitehead_p3(t).arg()
}

/// Find all roots of the Whitehead trace equation and select the geometric
/// one: angle condition p·arg(−u) + arg(p₃) = ±2π, then agreement with the
/// saddle point of the potential.
pub fn wp_geometric_u(p: i64) -> Result<WhiteheadRoots> {
    if p.abs() < 2 {
        return Err(Error::Domain(format!("twisted Whitehead link needs |p| >= 2, got {p}")));
    }
    let t_roots = poly_roots(&whitehead_t_polynomial(p))?;
    let u_roots: Vec<Complex64> = t_roots.iter().map(|t| t * t).collect();
    let saddle = saddle_whitehead(p)?;
    let t = t_roots
        .iter()
        .copied()
        .filter(|t| (whitehead_angle_sum(p, *t).abs() - 2.0 * PI).abs() < 1e-8)
        .min_by(|a, b| (a * a - saddle.u).norm().total_cmp(&(b * b - saddle.u).norm()))
        .filter(|t| (t * t - saddle.u).norm() < 1e-8)
        .ok_or_else(|| {
            Error::Selection(format!(
                "no root passes the angle condition and matches the saddle u = {}; roots: {u_roots:?}",
                saddle.u
            ))
        })?;
    Ok(WhiteheadRoots { t_roots, u_roots, u: t * t, t })
}

/// The representation of π₁(S³∖W_p) at u = t².
pub fn build_rep_whitehead(p: i64, t: Complex64) -> Result<HolonomyData> {
    let u = t * t;
    if (u.norm() < 1e-12) || (u - 1.0).norm() < 1e-12 || (u + 1.0).norm() < 1e-12 {
        return Err(Error::Domain(format!("degenerate u = {u}")));
    }
    let up1 = u + 1.0;
    let g1 = Mat2C::new(-2.0 / up1, u * (u - 1.0) / up1, -(u - 1.0) / (u * up1), -2.0 * u / up1);
    let g2 = Mat2C::new(
        -2.0 * u / up1,
        u * (t - 1.0).powi(3) / ((t + 1.0) * up1),
        -(t + 1.0).powi(3) / (u * (t - 1.0) * up1),
        -2.0 / up1,
    );
    let g3 = Mat2C::new(-2.0 * u / up1, -(t - 1.0).powi(3) / ((t + 1.0) * up1), (t + 1.0).powi(3) / ((t - 1.0) * up1), -2.0 / up1);
    let g4 = Mat2C::new(-2.0 / up1, -(u - 1.0) / up1, (u - 1.0) / up1, -2.0 * u / up1);
    let g23 = Mat2C::diag(u, ONE / u);
    let g12 = g1 * g2;
    let (h, _) = solve_conjugator(&[(g4, g1), (g3, g2)])?;
    let mut d = HolonomyData::new(KnotSpec::Whitehead(p), u, c(-1.0, 0.0));
    for (n, m) in [("g1", g1), ("g2", g2), ("g3", g3), ("g4", g4), ("g12", g12), ("g23", g23), ("g23_half", Mat2C::diag(I * t, -I / t)), ("h", h)] {
        d.set(n, m);
    }
    for n in ["g1", "g2", "g3", "g4", "g12"] {
        let f = d.matrices[n].parabolic_fixed_point();
        d.fp(&n.replace('g', "p"), f);
    }
    d.fp("p23_0", Some(Complex64::new(0.0, 0.0)));
    d.fp("p23_1", None);
    let mut rels = vec![
        rel("conj_h_g1", &[("g4", 1)], &[("h", 1), ("g1", 1), ("h", -1)]),
        rel("conj_h_g2", &[("g3", 1)], &[("h", 1), ("g2", 1), ("h", -1)]),
        rel("product", &[("g1", 1), ("g2", 1), ("g3", 1), ("g4", 1)], &[]),
    ];
    if p % 2 == 0 {
        let k = p / 2;
        rels.push(rel("twist_g4", &[("g4", -1)], &[("g23", k), ("g3", 1), ("g23", -k)]));
        rels.push(rel("twist_g1", &[("g1", -1)], &[("g23", k), ("g2", 1), ("g23", -k)]));
    } else {
        let (a, b) = ((p - 1) / 2, (p + 1) / 2);
        rels.push(rel("twist_g4", &[("g4", -1)], &[("g23", a), ("g2", 1), ("g23", -a)]));
        rels.push(rel("twist_g1", &[("g1", -1)], &[("g23", b), ("g3", 1), ("g23", -b)]));
    }
    d.relations = rels;
    finish(d)
}

/// Closed-form fixed points of the Whitehead representation at u = t² (with
/// the sign of p₁₂ matching the fixed point of ρ(g₁g₂)).
pub fn whitehead_fixed_points(t: Complex64) -> BTreeMap<String, Complex64> {
    let u = t * t;
    let r = (t - 1.0).powi(2) / (t + 1.0).powi(2);
    BTreeMap::from([
        ("p1".to_string(), -u),
        ("p2".to_string(), u * r),
        ("p3".to_string(), -r),
        ("p4".to_string(), ONE),
        ("p12".to_string(), -(t - 1.0) * t / (t + 1.0)),
    ])
}

/// Discriminant D = (u+1)²(v+1)² − 16uv.
pub fn disc(u: Complex64, v: Complex64) -> Complex64 {
    ((u + 1.0) * (v + 1.0)).powi(2) - 16.0 * u * v
}

/// p₃(u, v) for a chosen branch s of √D.
pub fn p3(u: Complex64, v: Complex64, s: Complex64) -> Complex64 {
    ((u + 1.0).powi(2) * (v * v + 1.0) - 8.0 * u * v - (u + 1.0) * (v - 1.0) * s) / (2.0 * v * (u - 1.0).powi(2))
}

/// p′₃(u, v) for a chosen branch s of √D.
pub fn p3_prime(u: Complex64, v: Complex64, s: Complex64) -> Complex64 {
    ((u * u + 1.0) * (v + 1.0).powi(2) - 8.0 * u * v - (u - 1.0) * (v + 1.0) * s) / (2.0 * u * (v - 1.0).powi(2))
}

fn nearest_sqrt(d: Complex64, prev: Complex64) -> Complex64 {
    let s = d.sqrt();
    if (s - prev).norm() <= (s + prev).norm() {
        s
    } else {
        -s
    }
}

/// Solution of the coupled double twist system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleTwistSolution {
    pub u: Complex64,
    pub v: Complex64,
    pub sqrt_disc: Complex64,
    /// p log(−u) + log p₃ and −r log(−v) + log p′₃.
    pub completeness: [Complex64; 2],
    /// (−u)^p p₃ − 1 and (−v)^{−r} p′₃ − 1.
    pub residuals: [f64; 2],
    pub data: HolonomyData,
}

fn dpr_residual(p: i64, r: i64, u: Complex64, v: Complex64, s: Complex64) -> [Complex64; 2] {
    [(-u).powi(p as i32) * p3(u, v, s) - 1.0, (-v).powi(-r as i32) * p3_prime(u, v, s) - 1.0]
}

/// Solve (−u)^{−p} = p₃(u, v), (−v)^r = p′₃(u, v) by Newton from the saddle of
/// the potential, check completeness and build ρ, ρ′ = Q⁻¹ρQ and all fixed
/// points.
pub fn dpr_solve(p: i64, r: i64) -> Result<DoubleTwistSolution> {
    let saddle = saddle_double(p, r)?;
    let m = crate::potential::inner_max(saddle.alpha0, saddle.beta0.unwrap_or(c(0.5, 0.0)))?;
    let (mut u, mut v, mut s) = (m.u, m.v, m.sqrt_disc);
    let h = 1e-7;
    for _ in 0..50 {
        let f = dpr_residual(p, r, u, v, s);
        if f[0].norm() + f[1].norm() < 1e-14 {
            break;
        }
        let fu = dpr_residual(p, r, u + h, v, nearest_sqrt(disc(u + h, v), s));
        let fv = dpr_residual(p, r, u, v + h, nearest_sqrt(disc(u, v + h), s));
        let j = [[(fu[0] - f[0]) / h, (fv[0] - f[0]) / h], [(fu[1] - f[1]) / h, (fv[1] - f[1]) / h]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.norm() == 0.0 {
            return Err(Error::Numeric("singular Jacobian in the (u, v) system".into()));
        }
        u -= (j[1][1] * f[0] - j[0][1] * f[1]) / det;
        v -= (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        s = nearest_sqrt(disc(u, v), s);
    }
    let f = dpr_residual(p, r, u, v, s);
    let residuals = [f[0].norm(), f[1].norm()];
    if residuals.iter().any(|x| *x > 1e-9) {
        return Err(Error::Numeric(format!("(u, v) system did not converge: residuals {residuals:?}")));
    }
    let completeness = [
        p as f64 * (-u).ln() + p3(u, v, s).ln(),
        -(r as f64) * (-v).ln() + p3_prime(u, v, s).ln(),
    ];
    for x in completeness {
        if x.re.abs() > 1e-8 || (x.im.abs() - 2.0 * PI).abs() > 1e-8 {
            return Err(Error::Branch(format!("completeness sums {completeness:?} are not ±2πi")));
        }
    }
    let data = build_rep_double(p, r, u, v, s)?;
    Ok(DoubleTwistSolution { u, v, sqrt_disc: s, completeness, residuals, data })
}

/// ρ and ρ′ = Q⁻¹ρQ for the double twist knot at (u, v) with √D = s.
pub fn build_rep_double(p: i64, r: i64, u: Complex64, v: Complex64, s: Complex64) -> Result<HolonomyData> {
    let up1 = u + 1.0;
    let um1 = u - 1.0;
    let (vp1, vm1) = (v + 1.0, v - 1.0);
    let rm = up1.powi(2) * (v * v + 1.0) - 8.0 * u * v - up1 * vm1 * s;
    let rp = up1.powi(2) * (v * v + 1.0) - 8.0 * u * v + up1 * vm1 * s;
    let g1 = Mat2C::new(-2.0 / up1, u * um1 / up1, -um1 / (u * up1), -2.0 * u / up1);
    let g2 = Mat2C::new(-2.0 * u / up1, -u * rm / (2.0 * v * um1 * up1), rp / (2.0 * u * v * um1 * up1), -2.0 / up1);
    let g3 = Mat2C::new(-2.0 * u / up1, rm / (2.0 * v * um1 * up1), -rp / (2.0 * v * um1 * up1), -2.0 / up1);
    let g4 = Mat2C::new(-2.0 / up1, -um1 / up1, um1 / up1, -2.0 * u / up1);
    let g12 = g1 * g2;
    let g23 = g2 * g3;
    // Columns are eigenvectors of ρ(g₁₂): Q·0 = p₁₂⁰ (eigenvalue 1/v) and
    // Q·∞ = p₁₂¹ (eigenvalue v).
    let q10 = -(up1 * vp1.powi(2) - 8.0 * u * v - vp1 * s) / (4.0 * u * v * vm1);
    let p12_1 = -(up1.powi(2) * vp1 - 8.0 * u * v + up1 * s) / (4.0 * um1 * v);
    let q = Mat2C::new(p12_1 * q10, -(up1.powi(2) * vp1 - 8.0 * u - up1 * s) / (4.0 * um1), q10, ONE);
    let qi = q.inv();
    let mut d = HolonomyData::new(KnotSpec::DoubleTwist(p, r), u, v);
    let base = [("g1", g1), ("g2", g2), ("g3", g3), ("g4", g4), ("g12", g12), ("g23", g23)];
    for (n, m) in base {
        d.set(n, m);
        d.set(&format!("{n}'"), qi * m * q);
    }
    d.set("Q", q);
    for n in ["g1", "g2", "g3", "g4"] {
        let f = d.matrices[n].parabolic_fixed_point();
        d.fp(&n.replace('g', "p"), f);
        let fp = d.matrices[&format!("{n}'")].parabolic_fixed_point();
        d.fp(&format!("{}'", n.replace('g', "p")), fp);
    }
    let inv_u = ONE / u;
    let inv_v = ONE / v;
    for (n, lbl, lam0, lam1) in [("g12", "p12", inv_v, v), ("g23", "p23", inv_u, u), ("g12'", "p12'", inv_v, v), ("g23'", "p23'", inv_u, u)] {
        let m = d.matrices[n];
        let (l0, l1) = match lbl.strip_suffix('\'') {
            Some(stem) => (format!("{stem}_0'"), format!("{stem}_1'")),
            None => (format!("{lbl}_0"), format!("{lbl}_1")),
        };
        d.fp(&l0, m.eigen_fixed_point(lam0));
        d.fp(&l1, m.eigen_fixed_point(lam1));
    }
    let mut rels = vec![
        rel("g12_def", &[("g12", 1)], &[("g1", 1), ("g2", 1)]),
        rel("g23_def", &[("g23", 1)], &[("g2", 1), ("g3", 1)]),
        rel("product", &[("g1", 1), ("g2", 1), ("g3", 1), ("g4", 1)], &[]),
    ];
    if p % 2 == 0 {
        let k = p / 2;
        rels.push(rel("twist_p_g1", &[("g1", -1)], &[("g23", k), ("g2", 1), ("g23", -k)]));
        rels.push(rel("twist_p_g4", &[("g4", -1)], &[("g23", k), ("g3", 1), ("g23", -k)]));
    } else {
        let (a, b) = ((p + 1) / 2, (p - 1) / 2);
        rels.push(rel("twist_p_g1", &[("g1", -1)], &[("g23", a), ("g3", 1), ("g23", -a)]));
        rels.push(rel("twist_p_g4", &[("g4", -1)], &[("g23", b), ("g2", 1), ("g23", -b)]));
    }
    if r % 2 == 0 {
        let k = r / 2;
        rels.push(rel("twist_r_g4", &[("g4", -1)], &[("g12", k), ("g1", 1), ("g12", -k)]));
        rels.push(rel("twist_r_g3", &[("g3", -1)], &[("g12", k), ("g2", 1), ("g12", -k)]));
    } else {
        let (a, b) = ((r + 1) / 2, (r - 1) / 2);
        rels.push(rel("twist_r_g4", &[("g4", -1)], &[("g12", a), ("g2", 1), ("g12", -a)]));
        rels.push(rel("twist_r_g3", &[("g3", -1)], &[("g12", b), ("g1", 1), ("g12", -b)]));
    }
    d.relations = rels;
    finish(d)
}

/// |exp(∂Ψ_B/∂x) − p₃| and |exp(∂Ψ_B/∂y) − p′₃| at (x, y) = 2πi(α, β), with
/// p₃, p′₃ on the branch of √D fixed by the inner maximizer.
pub fn gradient_bridge(alpha: Complex64, beta: Complex64) -> Result<[f64; 2]> {
    let m = inner_max(alpha, beta)?;
    let [ga, gb] = psi_b_grad(alpha, beta)?;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    Ok([
        ((ga / two_pi_i).exp() - p3(m.u, m.v, m.sqrt_disc)).norm(),
        ((gb / two_pi_i).exp() - p3_prime(m.u, m.v, m.sqrt_disc)).norm(),
    ])
}

/// Closed-form fixed points of the double twist representations.
pub fn double_fixed_points(u: Complex64, v: Complex64, s: Complex64) -> BTreeMap<String, Complex64> {
    let p3v = p3(u, v, s);
    let p3p = p3_prime(u, v, s);
    let (up1, um1, vp1, vm1) = (u + 1.0, u - 1.0, v + 1.0, v - 1.0);
    BTreeMap::from([
        ("p1".to_string(), -u),
        ("p2".to_string(), -u * p3v),
        ("p3".to_string(), p3v),
        ("p4".to_string(), ONE),
        ("p12_0".to_string(), -(up1.powi(2) * vp1 - 8.0 * u - up1 * s) / (4.0 * um1)),
        ("p12_1".to_string(), -(up1.powi(2) * vp1 - 8.0 * u * v + up1 * s) / (4.0 * um1 * v)),
        ("p1'".to_string(), -v),
        ("p2'".to_string(), ONE),
        ("p3'".to_string(), p3p),
        ("p4'".to_string(), -v * p3p),
        ("p23_0'".to_string(), -(up1 * vp1.powi(2) - 8.0 * v - vp1 * s) / (4.0 * vm1)),
        ("p23_1'".to_string(), -(up1 * vp1.powi(2) - 8.0 * u * v + vp1 * s) / (4.0 * u * vm1)),
    ])
}

fn point_json(z: Option<Complex64>) -> Value {
    match z {
        Some(z) => json!({"coords": [z.re, z.im], "label": "finite"}),
        None => json!({"coords": null, "label": "inf"}),
    }
}

/// Structured export of the labelled boundary points and axes.
pub fn export_domain(data: &HolonomyData) -> Value {
    let fixed: serde_json::Map<String, Value> = data.fixed_points.iter().map(|(k, v)| (k.clone(), point_json(*v))).collect();
    let mut axes = Vec::new();
    for stem in ["p23", "p12", "p23'", "p12'"] {
        let (a, b) = match stem.strip_suffix('\'') {
            Some(s) => (format!("{s}_0'"), format!("{s}_1'")),
            None => (format!("{stem}_0"), format!("{stem}_1")),
        };
        if let (Some(x), Some(y)) = (data.fixed_points.get(&a), data.fixed_points.get(&b)) {
            axes.push(json!({"name": stem.replace('p', "l"), "ends": [point_json(*x), point_json(*y)]}));
        }
    }
    let residuals: serde_json::Map<String, Value> = data.relation_residuals.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let mut doc = json!({
        "version": 1,
        "knot": data.knot.to_string(),
        "u": [data.u.re, data.u.im],
        "v": [data.v.re, data.v.im],
        "fixed_points": fixed,
        "axes": axes,
        "relation_residuals": residuals,
    });
    if matches!(data.knot, KnotSpec::Borromean | KnotSpec::B1 | KnotSpec::B11) {
        let (o1, o2) = octahedra();
        let verts = |v: Vec<(String, Option<Complex64>)>| -> serde_json::Map<String, Value> {
            v.into_iter().map(|(k, z)| (k, point_json(z))).collect()
        };
        doc["octahedra"] = json!({"O1": verts(o1), "O2": verts(o2)});
    }
    doc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn borromean_solution_two() {
        let [s1, s2] = borromean_solutions().unwrap();
        assert!(close(s1.x, c(-2.0, 2.0), 1e-14));
        assert!(close(s2.x, c(-2.0, -2.0), 1e-14) && close(s2.y, c(-1.0, 1.0), 1e-14) && close(s2.z, c(-2.0, -2.0), 1e-14));
        for s in [&s1, &s2] {
            assert!((s.x * s.y - 4.0).norm() < 1e-12 && (s.y * s.z - 4.0).norm() < 1e-12);
            assert!((s.data.matrices["g4"].trace() + 2.0).norm() < 1e-12);
            for (name, r) in &s.data.relation_residuals {
                assert!(*r < 1e-10, "{name}: {r}");
            }
        }
        let f = &s2.data.fixed_points;
        assert_eq!(f["p1"], None);
        for (k, z) in [("p2", c(-1.0, 0.0)), ("p3", c(0.0, 0.0)), ("p4", c(1.0, 0.0)), ("p12", c(0.0, 1.0)), ("p23", c(0.0, -1.0))] {
            assert!(close(f[k].unwrap(), z, 1e-12), "{k}: {:?}", f[k]);
        }
    }

    #[test]
    fn borromean_variants() {
        for knot in [KnotSpec::Borromean, KnotSpec::B1, KnotSpec::B11] {
            let d = borromean_variant(knot).unwrap();
            for (name, r) in &d.relation_residuals {
                assert!(*r < 1e-10, "{knot} {name}: {r}");
            }
            let h1 = d.matrices["h1"];
            let expect = if knot == KnotSpec::Borromean { c(-1.0, 0.0) } else { c(-1.0, 1.0) };
            assert!(close(h1.b, expect, 1e-10) && h1.c.norm() < 1e-10, "{knot}: {h1:?}");
            let f = &d.fixed_points;
            for (k, z) in [("r1", c(-1.0, 0.0)), ("r2", c(0.0, 0.0)), ("r3", c(0.0, 1.0)), ("r4", c(-1.0, 1.0)), ("r12", c(-0.5, 0.5))] {
                assert!(close(f[k].unwrap(), z, 1e-12), "{k}");
            }
            assert_eq!(f["r23"], None);
        }
    }

    #[test]
    fn whitehead_two_roots() {
        let roots = wp_geometric_u(2).unwrap();
        assert!(roots.u_roots.iter().any(|u| close(*u, c(-1.0, 0.0), 1e-10)));
        assert!(roots.u_roots.iter().any(|u| close(*u, c(1.78615, 2.27202), 1e-5)));
        assert!(close(roots.u, c(1.78615, -2.27202), 1e-5));
        for t in &roots.t_roots {
            let u = t * t;
            let f = (u + 1.0) * (u * u - 2.0 * u * t + 2.0 * t + 1.0);
            assert!(f.norm() < 1e-10);
        }
    }

    #[test]
    fn whitehead_rep() {
        let roots = wp_geometric_u(2).unwrap();
        let (u, t) = (roots.u, roots.t);
        let d = build_rep_whitehead(2, t).unwrap();
        for (name, r) in &d.relation_residuals {
            assert!(*r < 1e-9, "{name}: {r}");
        }
        let m = &d.matrices;
        assert!(((m["g1"] * m["g2"] * m["g3"]).trace() + 2.0).norm() < 1e-10);
        let f = whitehead_fixed_points(t);
        assert!(close(f["p1"], -u * f["p4"], 1e-14));
        for k in ["p1", "p2", "p3", "p4", "p12"] {
            assert!(close(d.fixed_points[k].unwrap(), f[k], 1e-9), "{k}");
        }
        let uref = c(1.78615, -2.27202);
        let fr = whitehead_fixed_points(uref.sqrt());
        assert!(close(fr["p2"], c(-0.2138, -0.2720), 1e-4));
        assert!(close(fr["p3"], c(-0.0283, 0.1163), 1e-4));
        assert!(close(fr["p12"], c(-0.2571, 0.5291), 1e-4));
    }

    #[test]
    fn whitehead_family() {
        for p in [-7i64, -4, -3, -2, 3, 4, 5, 8] {
            let roots = wp_geometric_u(p).unwrap();
            let d = build_rep_whitehead(p, roots.t).unwrap();
            for (name, r) in &d.relation_residuals {
                assert!(*r < 1e-9, "W{p} {name}: {r}");
            }
            let mirror = wp_geometric_u(-p).unwrap();
            assert!(close(mirror.u, roots.u.conj(), 1e-9), "W{p}");
        }
    }

    #[test]
    fn double_six_two() {
        let s = dpr_solve(6, 2).unwrap();
        assert!(close(s.u, c(-0.6193, -0.8846), 1e-4));
        assert!(close(s.v, c(1.7257, 2.0606), 1e-4));
        for x in s.completeness {
            assert!(close(x, c(0.0, 2.0 * PI), 1e-8), "{x}");
        }
        for (name, r) in &s.data.relation_residuals {
            assert!(*r < 1e-9, "{name}: {r}");
        }
        let f = &s.data.fixed_points;
        let table = [
            ("p1", c(0.6193, 0.8846)),
            ("p2", c(0.0596, 0.6786)),
            ("p3", c(0.5464, 0.3152)),
            ("p4", c(1.0, 0.0)),
            ("p1'", c(-1.7257, -2.0606)),
            ("p2'", c(1.0, 0.0)),
            ("p3'", c(-1.2680, 7.1116)),
        ];
        for (k, z) in table {
            assert!(close(f[k].unwrap(), z, 1e-4), "{k}: {:?}", f[k]);
        }
        assert!(close(f["p4'"].unwrap(), c(16.842, -9.659), 1e-3));
        for (k, z) in [("p12_0", c(0.2495, 0.7240)), ("p12_1", c(0.8631, 0.2152))] {
            assert!(close(f[k].unwrap(), z, 1e-4), "{k}: {:?}", f[k]);
        }
        for (k, z) in [("p23_0'", c(3.974, 0.959)), ("p23_1'", c(3.450, -3.264))] {
            assert!(close(f[k].unwrap(), z, 1e-3), "{k}: {:?}", f[k]);
        }
        assert_eq!(f["p23_1"], None);
        assert!(f["p23_0"].unwrap().norm() < 1e-12 && f["p12_0'"].unwrap().norm() < 1e-12);
        assert_eq!(f["p12_1'"], None);
        for (k, z) in double_fixed_points(s.u, s.v, s.sqrt_disc) {
            assert!(close(f[&k].unwrap(), z, 1e-9 * z.norm().max(1.0)), "{k}");
        }
        let q = s.data.matrices["g12'"];
        assert!(q.b.norm() < 1e-9 && q.c.norm() < 1e-9 && close(q.a, s.v, 1e-9));
    }

    #[test]
    fn gradient_bridge_at_saddle() {
        let sd = saddle_double(6, 2).unwrap();
        let [a, b] = gradient_bridge(sd.alpha0, sd.beta0.unwrap()).unwrap();
        assert!(a < 1e-10 && b < 1e-10, "{a} {b}");
    }
}
