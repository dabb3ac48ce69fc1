//! Orbit types of E7 on the Freudenthal space, and of F4 / E6 on diagonal
//! Jordan elements.
//!
//! Two independent paths:
//! * invariants `⟨P,P⟩`, `‖P×P‖²_HS`, `⟨T,T⟩`, `|⟨T,P⟩|` recover the squared
//!   diagonal multiset as the roots of a quartic, then a pattern rule names
//!   the type;
//! * the stabilizer dimension in e7 names the type directly (authoritative).

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::freudenthal::{cross_p, t_covariant, weight, FreudenthalVector, DIM};
use crate::lie::E7Algebra;
use crate::scalar::{Exact, Float, Scalar};

/// Default relative tolerance for equality and zero decisions.
pub const DEFAULT_EPS: f64 = 1e-6;
/// Largest accepted relative residual of the Hilbert–Schmidt fit.
pub const CALIBRATION_TOL: f64 = 1e-8;
/// Roots of the invariant quartic must be real and nonnegative to this
/// (relative) tolerance.
pub const ROOT_TOL: f64 = 1e-6;
/// Coefficient agreement required before nearly equal roots are merged.
const MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrbitType {
    E7,
    E6,
    F4,
    Spin11,
    Spin10,
    Spin9,
    Spin8,
}

impl OrbitType {
    pub const ALL: [OrbitType; 7] = [
        OrbitType::E7,
        OrbitType::E6,
        OrbitType::F4,
        OrbitType::Spin11,
        OrbitType::Spin10,
        OrbitType::Spin9,
        OrbitType::Spin8,
    ];

    /// Dimension of the isotropy group.
    pub fn stabilizer_dim(&self) -> usize {
        match self {
            OrbitType::E7 => 133,
            OrbitType::E6 => 78,
            OrbitType::F4 => 52,
            OrbitType::Spin11 => 55,
            OrbitType::Spin10 => 45,
            OrbitType::Spin9 => 36,
            OrbitType::Spin8 => 28,
        }
    }

    pub fn from_stabilizer_dim(dim: usize) -> Option<OrbitType> {
        Self::ALL.into_iter().find(|t| t.stabilizer_dim() == dim)
    }

    /// Machine label, e.g. `SPIN11`.
    pub fn name(&self) -> &'static str {
        match self {
            OrbitType::E7 => "E7",
            OrbitType::E6 => "E6",
            OrbitType::F4 => "F4",
            OrbitType::Spin11 => "SPIN11",
            OrbitType::Spin10 => "SPIN10",
            OrbitType::Spin9 => "SPIN9",
            OrbitType::Spin8 => "SPIN8",
        }
    }

    /// Isotropy group, e.g. `Spin(11)`.
    pub fn group(&self) -> &'static str {
        match self {
            OrbitType::E7 => "E7",
            OrbitType::E6 => "E6",
            OrbitType::F4 => "F4",
            OrbitType::Spin11 => "Spin(11)",
            OrbitType::Spin10 => "Spin(10)",
            OrbitType::Spin9 => "Spin(9)",
            OrbitType::Spin8 => "Spin(8)",
        }
    }

    /// Orbit reading `E7/Spin(11)`.
    pub fn quotient(&self) -> String {
        format!("E7/{}", self.group())
    }
}

impl fmt::Display for OrbitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrbitType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s) || t.quotient() == s)
            .ok_or_else(|| Error::Parse(format!("unknown orbit type \"{s}\"")))
    }
}

/// Four nonnegative reals `(r1, r2, r3, r)`, sorted descending and stored as
/// `scale · entries` with `max(entries) = 1` (or all zero).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalForm {
    entries: [f64; 4],
    scale: f64,
    pub tol: f64,
}

impl DiagonalForm {
    pub fn new(raw: [f64; 4], tol: f64) -> Result<Self> {
        if raw.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::BadDiagonal(raw));
        }
        let mut e = raw;
        e.sort_by(|a, b| b.total_cmp(a));
        let scale = e[0];
        if scale > 0.0 {
            e.iter_mut().for_each(|x| *x /= scale);
        }
        Ok(DiagonalForm { entries: e, scale, tol })
    }

    /// Normalized entries, descending, largest equal to 1 unless all vanish.
    pub fn entries(&self) -> [f64; 4] {
        self.entries
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `scale · entries`.
    pub fn raw(&self) -> [f64; 4] {
        self.entries.map(|x| x * self.scale)
    }

    /// `(r1, r2, r3; r)` with the raw entries in the slots given.
    pub fn embed(&self) -> FreudenthalVector<Float> {
        let [a, b, c, d] = self.raw().map(|x| Float::new(x, 0.0));
        FreudenthalVector::normal_form(a, b, c, d)
    }
}

/// Nine significant digits; `{:#}` prints full precision.
fn short(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{:.*}", (8 - x.abs().log10().floor() as i32).max(0) as usize, x);
    if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').into() } else { s }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.raw();
        if f.alternate() {
            write!(f, "({a}, {b}, {c}; {d})")
        } else {
            write!(f, "({}, {}, {}; {})", short(a), short(b), short(c), short(d))
        }
    }
}

/// Gap decisions behind a pattern match.
#[derive(Clone, Debug, PartialEq)]
pub struct Margins {
    /// Differences between consecutive sorted values (and the last value
    /// and zero when zero is a reference point).
    pub gaps: Vec<f64>,
    /// `min |gap − eps|`.
    pub min: f64,
    pub eps: f64,
}

impl Margins {
    pub fn to_json(&self) -> Value {
        json!({ "gaps": self.gaps, "min": self.min, "eps": self.eps })
    }
}

/// Cluster structure of sorted values: number of values equal to zero and
/// the sizes (descending) of the nonzero clusters.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Pattern {
    zeros: usize,
    sizes: Vec<usize>,
}

fn pattern(n: usize, closed: &[bool], anchor_zero: bool) -> Pattern {
    // Points are the n values followed by 0 when anchored.
    let points = n + usize::from(anchor_zero);
    let mut clusters = vec![1usize];
    for i in 0..points - 1 {
        if closed[i] {
            *clusters.last_mut().expect("nonempty") += 1;
        } else {
            clusters.push(1);
        }
    }
    let zeros = if anchor_zero { clusters.pop().expect("anchor cluster") - 1 } else { 0 };
    clusters.sort_unstable_by(|a, b| b.cmp(a));
    Pattern { zeros, sizes: clusters }
}

/// Decide equalities among `values` (sorted descending, normalized) at
/// tolerance `eps`; any decision within `eps/2` of the threshold that would
/// change the label is reported as ambiguous.
fn decide<T: PartialEq + fmt::Display>(
    values: &[f64],
    anchor_zero: bool,
    eps: f64,
    label: impl Fn(&Pattern) -> T,
) -> Result<(T, Margins)> {
    let mut gaps: Vec<f64> = values.windows(2).map(|w| w[0] - w[1]).collect();
    if anchor_zero {
        gaps.push(*values.last().expect("nonempty"));
    }
    let closed: Vec<bool> = gaps.iter().map(|&g| g <= eps).collect();
    let chosen = label(&pattern(values.len(), &closed, anchor_zero));
    let min = gaps.iter().map(|g| (g - eps).abs()).fold(f64::INFINITY, f64::min);
    for (i, g) in gaps.iter().enumerate() {
        let margin = (g - eps).abs();
        if margin < eps / 2.0 {
            let mut flipped = closed.clone();
            flipped[i] = !flipped[i];
            let alt = label(&pattern(values.len(), &flipped, anchor_zero));
            if alt != chosen {
                return Err(Error::Ambiguous { first: chosen.to_string(), second: alt.to_string(), margin, eps });
            }
        }
    }
    Ok((chosen, Margins { gaps, min, eps }))
}

fn orbit_of_pattern(p: &Pattern) -> OrbitType {
    use OrbitType::*;
    match (p.zeros, p.sizes.as_slice()) {
        (4, _) => E7,
        (3, [1]) | (0, [4]) => E6,
        (1, [3]) | (0, [3, 1]) => F4,
        (2, [2]) | (0, [2, 2]) => Spin11,
        (2, [1, 1]) => Spin10,
        (1, [2, 1]) | (0, [2, 1, 1]) => Spin9,
        (1, [1, 1, 1]) | (0, [1, 1, 1, 1]) => Spin8,
        _ => unreachable!("four values form one of the listed patterns"),
    }
}

/// Orbit type from the pattern of the diagonal multiset.
pub fn classify_multiset(m: &DiagonalForm, eps: f64) -> Result<OrbitType> {
    classify_multiset_with_margins(m, eps).map(|(t, _)| t)
}

pub fn classify_multiset_with_margins(m: &DiagonalForm, eps: f64) -> Result<(OrbitType, Margins)> {
    if m.scale == 0.0 {
        return Ok((OrbitType::E7, Margins { gaps: vec![0.0; 4], min: eps, eps }));
    }
    decide(&m.entries, true, eps, orbit_of_pattern)
}

/// Orbit types of F4 on real diagonal Jordan elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JordanOrbit {
    F4,
    Spin9,
    Spin8,
}

impl fmt::Display for JordanOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JordanOrbit::F4 => "F4/F4",
            JordanOrbit::Spin9 => "F4/Spin(9)",
            JordanOrbit::Spin8 => "F4/Spin(8)",
        })
    }
}

/// Orbit types of E6 on nonnegative diagonal elements of `𝔍^C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JordanCOrbit {
    E6,
    F4,
    Spin10,
    Spin9,
    Spin8,
}

impl fmt::Display for JordanCOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JordanCOrbit::E6 => "E6/E6",
            JordanCOrbit::F4 => "E6/F4",
            JordanCOrbit::Spin10 => "E6/Spin(10)",
            JordanCOrbit::Spin9 => "E6/Spin(9)",
            JordanCOrbit::Spin8 => "E6/Spin(8)",
        })
    }
}

fn sorted_normalized(m: [f64; 3]) -> Option<[f64; 3]> {
    let mut v = m;
    v.sort_by(|a, b| b.total_cmp(a));
    let s = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    (s > 0.0).then(|| v.map(|x| x / s))
}

/// F4-orbit type of `diag(ξ1, ξ2, ξ3)` in the real Jordan algebra.
pub fn classify_jordan(m: [f64; 3], eps: f64) -> Result<JordanOrbit> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::BadDiagonal([m[0], m[1], m[2], 0.0]));
    }
    let Some(v) = sorted_normalized(m) else { return Ok(JordanOrbit::F4) };
    decide(&v, false, eps, |p| match p.sizes.len() {
        1 => JordanOrbit::F4,
        2 => JordanOrbit::Spin9,
        _ => JordanOrbit::Spin8,
    })
    .map(|(t, _)| t)
}

/// E6-orbit type of `diag(r1, r2, r3)`, `r_k ≥ 0`, in `𝔍^C`.
pub fn classify_jordan_c(m: [f64; 3], eps: f64) -> Result<JordanCOrbit> {
    if m.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::BadDiagonal([m[0], m[1], m[2], 0.0]));
    }
    let Some(v) = sorted_normalized(m) else { return Ok(JordanCOrbit::E6) };
    decide(&v, true, eps, |p| match (p.zeros, p.sizes.as_slice()) {
        (0, [3]) => JordanCOrbit::F4,
        (2, [1]) => JordanCOrbit::Spin10,
        (1, [2]) | (0, [2, 1]) => JordanCOrbit::Spin9,
        _ => JordanCOrbit::Spin8,
    })
    .map(|(t, _)| t)
}

/// `(⟨P,P⟩, ‖P×P‖²_HS, ⟨T,T⟩, ⟨T,P⟩)` with `T = τλ((P×P)P)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Invariants<S: Scalar> {
    pub i1: S,
    pub i2: S,
    pub i3: S,
    pub i4: S,
}

/// Squared Hilbert–Schmidt norm of the action of `P×P`, in a
/// `<,>`-orthonormal basis: `sum_j ⟨Me_j, Me_j⟩ / w_j`.
pub fn hs_squared<S: Scalar>(p: &FreudenthalVector<S>) -> S {
    let pp = cross_p(p, p);
    let mut total = S::zero();
    for j in 0..DIM {
        let col = pp.apply(&FreudenthalVector::basis(j));
        total = total + col.norm_sq().scale(1, weight(j) as i64);
    }
    total
}

pub fn invariants_of<S: Scalar>(p: &FreudenthalVector<S>) -> Invariants<S> {
    let t = t_covariant(p);
    Invariants { i1: p.norm_sq(), i2: hs_squared(p), i3: t.norm_sq(), i4: t.herm_inner(p) }
}

impl Invariants<Float> {
    pub fn to_json(&self) -> Value {
        json!({
            "I1": self.i1.re,
            "I2": self.i2.re,
            "I3": self.i3.re,
            "I4": [self.i4.re, self.i4.im],
        })
    }
}

/// `I2 = κ1·e1² + κ2·e2` on diagonal forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub kappa1: f64,
    pub kappa2: f64,
    /// Largest relative residual on held-out diagonals.
    pub residual: f64,
}

fn elementary(sq: &[f64; 4]) -> (f64, f64) {
    let e1 = sq.iter().sum();
    let mut e2 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            e2 += sq[i] * sq[j];
        }
    }
    (e1, e2)
}

fn hs_sample(rng: &mut ChaCha8Rng) -> ([f64; 4], f64) {
    let r: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..2.0));
    let p = DiagonalForm::new(r, DEFAULT_EPS).expect("nonnegative").embed();
    (r.map(|x| x * x), hs_squared(&p).re)
}

/// Least-squares fit over 60 random diagonal forms, validated on 20 others.
pub fn calibrate_hs() -> Result<Calibration> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4a5);
    let fit: Vec<([f64; 4], f64)> = (0..60).map(|_| hs_sample(&mut rng)).collect();
    let a = DMatrix::from_fn(fit.len(), 2, |i, j| {
        let (e1, e2) = elementary(&fit[i].0);
        if j == 0 { e1 * e1 } else { e2 }
    });
    let b = DVector::from_iterator(fit.len(), fit.iter().map(|s| s.1));
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    if sv.min() <= 1e-12 * sv.max() {
        return Err(Error::Calibration(f64::INFINITY));
    }
    let k = svd.solve(&b, 0.0).map_err(|e| Error::Verification(e.to_string()))?;
    let (kappa1, kappa2) = (k[0], k[1]);
    let mut residual: f64 = 0.0;
    for _ in 0..20 {
        let (sq, i2) = hs_sample(&mut rng);
        let (e1, e2) = elementary(&sq);
        residual = residual.max((kappa1 * e1 * e1 + kappa2 * e2 - i2).abs() / i2.abs().max(f64::MIN_POSITIVE));
    }
    Ok(Calibration { kappa1, kappa2, residual })
}

static CALIBRATION: OnceLock<std::result::Result<Calibration, String>> = OnceLock::new();

/// Process-wide calibration; fails if the fit is singular or its held-out
/// residual exceeds [`CALIBRATION_TOL`].
pub fn calibration() -> Result<Calibration> {
    CALIBRATION
        .get_or_init(|| calibrate_hs().map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::Verification)
        .and_then(|c| if c.residual <= CALIBRATION_TOL { Ok(c) } else { Err(Error::Calibration(c.residual)) })
}

/// Elementary symmetric functions `e1..e4` of the squared entries, from the
/// invariants.
fn elementary_from_invariants(inv: &Invariants<Float>, cal: &Calibration, notes: &mut Vec<String>) -> [f64; 4] {
    let i1 = inv.i1.re;
    let shifted = inv.i2.re - cal.kappa1 * i1 * i1;
    if inv.i2.re != 0.0 && shifted.abs() < 1e-6 * inv.i2.re.abs() {
        notes.push(format!("e2 extraction cancels more than 6 digits (I2 = {:e})", inv.i2.re));
    }
    [i1, shifted / cal.kappa2, 4.0 / 9.0 * inv.i3.re, inv.i4.norm_sqr() / 36.0]
}

fn symmetric(roots: &[f64; 4]) -> [f64; 4] {
    let mut e = [0.0; 4];
    // Coefficients of prod (t − r_i) = t⁴ − e1 t³ + e2 t² − e3 t + e4.
    let mut c = [1.0, 0.0, 0.0, 0.0, 0.0];
    for &r in roots {
        for k in (1..5).rev() {
            c[k] += r * c[k - 1];
        }
    }
    e.copy_from_slice(&c[1..]);
    e
}

/// Roots `u` of `u⁴ − c1u³ + c2u² − c3u + c4` (normalized so they are O(1)),
/// snapped to the coarsest grouping that reproduces the coefficients.
fn quartic_roots(c: [f64; 4]) -> Result<[f64; 4]> {
    let companion = Matrix4::new(
        c[0], -c[1], c[2], -c[3], //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0,
    );
    let mut roots: Vec<Complex64> = companion.complex_eigenvalues().iter().copied().collect();
    roots.sort_by(|a, b| b.re.total_cmp(&a.re));
    let roots: [Complex64; 4] = roots.try_into().expect("four eigenvalues");
    let (snapped, groups) = snap_roots(roots, c);
    for group in groups {
        // Merged groups are real by construction; singletons must be.
        if let [i] = group[..] {
            let z = roots[i];
            if z.im.abs() > ROOT_TOL {
                return Err(Error::Inconsistent(format!("complex root {z} of the invariant quartic")));
            }
        }
    }
    for &u in &snapped {
        if u < -ROOT_TOL {
            return Err(Error::Inconsistent(format!("negative root {u} of the invariant quartic")));
        }
    }
    Ok(snapped.map(|u| u.max(0.0)))
}

/// Repeated roots come out of the eigenvalue solver with errors of order
/// `ε^(1/k)` for multiplicity `k`. Among contiguous groupings of the roots
/// (sorted by real part; the last group optionally snapped to zero), pick
/// the one with fewest distinct nonzero values whose symmetric functions
/// match `c` to [`MERGE_TOL`]. Returns the real values and the grouping.
fn snap_roots(roots: [Complex64; 4], c: [f64; 4]) -> ([f64; 4], Vec<Vec<usize>>) {
    let mut best: Option<(usize, f64, [f64; 4], Vec<Vec<usize>>)> = None;
    for cuts in 0..8u32 {
        let mut groups: Vec<Vec<usize>> = vec![vec![0]];
        for i in 1..4 {
            if cuts & (1 << (i - 1)) != 0 {
                groups.push(vec![i]);
            } else {
                groups.last_mut().expect("nonempty").push(i);
            }
        }
        for zero_last in [false, true] {
            let mut snapped = [0.0; 4];
            for (g, idx) in groups.iter().enumerate() {
                let mean = idx.iter().map(|&i| roots[i].re).sum::<f64>() / idx.len() as f64;
                let value = if zero_last && g + 1 == groups.len() { 0.0 } else { mean };
                idx.iter().for_each(|&i| snapped[i] = value);
            }
            let params = groups.len() - usize::from(zero_last);
            let e = symmetric(&snapped);
            let err = (0..4).map(|k| (e[k] - c[k]).abs()).fold(0.0, f64::max);
            if err <= MERGE_TOL && best.as_ref().is_none_or(|b| (params, err) < (b.0, b.1)) {
                best = Some((params, err, snapped, groups.clone()));
            }
        }
    }
    match best {
        Some((_, _, snapped, groups)) => (snapped, groups),
        None => (roots.map(|z| z.re), (0..4).map(|i| vec![i]).collect()),
    }
}

/// Diagonal multiset of `P` from its invariants, with notes on conditioning.
pub fn recover_multiset_with_notes(p: &FreudenthalVector<Float>) -> Result<(DiagonalForm, Vec<String>)> {
    let cal = calibration()?;
    let mut notes = Vec::new();
    let e = elementary_from_invariants(&invariants_of(p), &cal, &mut notes);
    if e[0] <= 0.0 {
        return Ok((DiagonalForm::new([0.0; 4], DEFAULT_EPS)?, notes));
    }
    let s = e[0];
    let c = [1.0, e[1] / (s * s), e[2] / (s * s * s), e[3] / (s * s * s * s)];
    let u = quartic_roots(c)?;
    let raw = u.map(|x| (x * s).sqrt());
    Ok((DiagonalForm::new(raw, DEFAULT_EPS)?, notes))
}

pub fn recover_multiset(p: &FreudenthalVector<Float>) -> Result<DiagonalForm> {
    recover_multiset_with_notes(p).map(|r| r.0)
}

/// Simplest rational within `tol·max(1, |x|)` of `x` (continued fractions).
fn rational(x: f64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let width = tol * x.abs().max(1.0);
    let (mut h0, mut h1) = (BigInt::from(0), BigInt::from(1));
    let (mut k0, mut k1) = (BigInt::from(1), BigInt::from(0));
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let ai = BigInt::from(a as i64);
        (h0, h1) = (h1.clone(), &ai * &h1 + h0);
        (k0, k1) = (k1.clone(), &ai * &k1 + k0);
        let approx = BigRational::new(h1.clone(), k1.clone());
        if (approx.to_f64()? - x).abs() <= width {
            return Some(approx);
        }
        let frac = rest - a;
        if frac == 0.0 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

static EXACT_CALIBRATION: OnceLock<std::result::Result<(BigRational, BigRational), String>> = OnceLock::new();

/// Exact calibration constants, fitted on two rational diagonals and checked
/// on a third (computed once per process).
pub fn calibrate_hs_exact() -> Result<(BigRational, BigRational)> {
    EXACT_CALIBRATION
        .get_or_init(|| fit_exact().map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::Verification)
}

fn fit_exact() -> Result<(BigRational, BigRational)> {
    let samples = [[(1, 1), (2, 1), (3, 1), (5, 1)], [(1, 2), (1, 1), (0, 1), (2, 3)], [(3, 1), (1, 1), (1, 4), (1, 1)]];
    let rows: Vec<(BigRational, BigRational, BigRational)> = samples
        .iter()
        .map(|s| {
            let sq: Vec<BigRational> = s.iter().map(|&(p, q)| BigRational::new(p.into(), q.into()).pow(2)).collect();
            let e1: BigRational = sq.iter().sum();
            let mut e2 = BigRational::zero();
            for i in 0..4 {
                for j in i + 1..4 {
                    e2 += &sq[i] * &sq[j];
                }
            }
            let i2 = hs_squared(&FreudenthalVector::<Exact>::normal_form_ratio(*s)).re;
            (&e1 * &e1, e2, i2)
        })
        .collect();
    let (a, b, c) = (&rows[0], &rows[1], &rows[2]);
    let det = &a.0 * &b.1 - &a.1 * &b.0;
    if det.is_zero() {
        return Err(Error::Calibration(f64::INFINITY));
    }
    let k1 = (&a.2 * &b.1 - &a.1 * &b.2) / &det;
    let k2 = (&a.0 * &b.2 - &a.2 * &b.0) / &det;
    let miss = &k1 * &c.0 + &k2 * &c.1 - &c.2;
    if !miss.is_zero() {
        return Err(Error::Calibration((miss / &c.2).abs().to_f64().unwrap_or(f64::INFINITY)));
    }
    Ok((k1, k2))
}

/// Exact multiset recovery for points whose diagonal entries are rational:
/// float roots are rationalized and the result is accepted only if it
/// reproduces the invariants exactly.
pub fn recover_multiset_exact(p: &FreudenthalVector<Exact>) -> Result<[BigRational; 4]> {
    let (k1, k2) = calibrate_hs_exact()?;
    let inv = invariants_of(p);
    let i1 = inv.i1.re.clone();
    let e = [
        i1.clone(),
        (&inv.i2.re - &k1 * &i1 * &i1) / &k2,
        BigRational::new(4.into(), 9.into()) * &inv.i3.re,
        inv.i4.abs_sq().re / BigRational::from_integer(36.into()),
    ];
    let approx = {
        let s = e[0].to_f64().unwrap_or(0.0);
        if s <= 0.0 {
            return Ok(std::array::from_fn(|_| BigRational::zero()));
        }
        let c: [f64; 4] = std::array::from_fn(|k| e[k].to_f64().unwrap_or(f64::NAN) / s.powi(k as i32 + 1));
        quartic_roots(c)?.map(|u| (u * s).sqrt())
    };
    let mut entries: Vec<BigRational> = approx
        .iter()
        .map(|&x| rational(x, 1e-9).ok_or_else(|| Error::Inconsistent(format!("entry {x} has no rational form"))))
        .collect::<Result<_>>()?;
    entries.sort_by(|a, b| b.cmp(a));
    let sq: Vec<BigRational> = entries.iter().map(|r| r * r).collect();
    let mut c = vec![BigRational::from_integer(1.into()), BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()];
    for r in &sq {
        for k in (1..5).rev() {
            let prev = c[k - 1].clone();
            c[k] += r * prev;
        }
    }
    if c[1..] != e[..] {
        return Err(Error::Inconsistent("rationalized entries do not reproduce the invariants".into()));
    }
    Ok(entries.try_into().expect("four entries"))
}

/// End-to-end classification report.
#[derive(Clone, Debug)]
pub struct Classification {
    /// Authoritative (stabilizer-based) type.
    pub label: OrbitType,
    pub stab_dim: usize,
    pub gap_ratio: f64,
    /// Invariant-path result: multiset, its type and margins, or the reason
    /// it is unavailable.
    pub multiset: Option<DiagonalForm>,
    pub invariant_label: Option<OrbitType>,
    pub margins: Option<Margins>,
    pub method_agreement: bool,
    /// Two-candidate report when the invariant path sits on a tolerance
    /// boundary.
    pub ambiguity: Option<(String, String, f64)>,
    pub diagnostics: Vec<String>,
}

impl Classification {
    pub fn to_json(&self) -> Value {
        json!({
            "type": self.label.name(),
            "orbit": self.label.quotient(),
            "multiset": self.multiset.map(|m| m.raw()),
            "stab_dim": self.stab_dim,
            "gap_ratio": self.gap_ratio,
            "invariant_type": self.invariant_label.map(|t| t.name()),
            "margins": self.margins.as_ref().map(Margins::to_json),
            "method_agreement": self.method_agreement,
            "ambiguity": self.ambiguity.as_ref().map(|(a, b, m)| json!({"candidates": [a, b], "margin": m})),
            "diagnostics": self.diagnostics,
        })
    }
}

/// Classify by both paths; the stabilizer dimension decides.
pub fn classify(p: &FreudenthalVector<Float>, eps: f64) -> Result<Classification> {
    let algebra = E7Algebra::shared()?;
    let n = p.norm();
    let unit = if n > 0.0 { p.scale(&Float::new(1.0 / n, 0.0)) } else { p.clone() };
    let stab = algebra.stabilizer_dimension(&unit)?;
    let label = OrbitType::from_stabilizer_dim(stab.dim)
        .ok_or_else(|| Error::Inconsistent(format!("stabilizer dimension {} is not in the orbit table", stab.dim)))?;
    let mut out = Classification {
        label,
        stab_dim: stab.dim,
        gap_ratio: stab.certificate.gap_ratio,
        multiset: None,
        invariant_label: None,
        margins: None,
        method_agreement: false,
        ambiguity: None,
        diagnostics: Vec::new(),
    };
    match recover_multiset_with_notes(&unit) {
        Ok((m, notes)) => {
            out.diagnostics.extend(notes);
            let m = DiagonalForm::new(m.raw().map(|x| x * n), eps)?;
            out.multiset = Some(m);
            match classify_multiset_with_margins(&m, eps) {
                Ok((t, margins)) => {
                    out.invariant_label = Some(t);
                    out.margins = Some(margins);
                    out.method_agreement = t == label;
                    if t != label {
                        out.diagnostics.push(format!(
                            "invariant path gives {t} (stabilizer dimension {}) but the stabilizer has dimension {}",
                            t.stabilizer_dim(),
                            stab.dim
                        ));
                    }
                }
                Err(Error::Ambiguous { first, second, margin, .. }) => {
                    out.diagnostics.push(format!("invariant path ambiguous between {first} and {second}"));
                    out.ambiguity = Some((first, second, margin));
                }
                Err(e) => return Err(e),
            }
        }
        Err(e) => out.diagnostics.push(format!("invariant path unavailable: {e}")),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(r: [f64; 4]) -> DiagonalForm {
        DiagonalForm::new(r, DEFAULT_EPS).unwrap()
    }

    #[test]
    fn pattern_rules() {
        use OrbitType::*;
        let cases = [
            ([0.0, 0.0, 0.0, 0.0], E7),
            ([0.0, 0.0, 0.0, 1.0], E6),
            ([1.0, 1.0, 1.0, 1.0], E6),
            ([1.0, 1.0, 1.0, 0.0], F4),
            ([1.0, 1.0, 1.0, 2.0], F4),
            ([1.0, 0.0, 0.0, 1.0], Spin11),
            ([1.0, 2.0, 2.0, 1.0], Spin11),
            ([1.0, 0.0, 0.0, 2.0], Spin10),
            ([1.0, 1.0, 2.0, 0.0], Spin9),
            ([1.0, 1.0, 2.0, 3.0], Spin9),
            ([1.0, 2.0, 3.0, 0.0], Spin8),
            ([1.0, 2.0, 3.0, 5.0], Spin8),
        ];
        for (r, t) in cases {
            assert_eq!(classify_multiset(&form(r), DEFAULT_EPS).unwrap(), t, "{r:?}");
        }
    }

    #[test]
    fn boundary_is_reported() {
        let m = form([1.0, 1.0 - 1e-6, 0.5, 0.2]);
        match classify_multiset(&m, DEFAULT_EPS) {
            Err(Error::Ambiguous { first, second, .. }) => {
                let mut pair = [first, second];
                pair.sort();
                assert_eq!(pair, ["SPIN8", "SPIN9"]);
            }
            other => panic!("expected ambiguity, got {other:?}"),
        }
        // A smallest entry sitting on the zero threshold.
        assert!(classify_multiset(&form([1.0, 0.0, 0.0, 1e-6]), DEFAULT_EPS).is_err());
        assert_eq!(classify_multiset(&form([1.0, 0.5, 0.5, 0.5 - 1e-9]), DEFAULT_EPS).unwrap(), OrbitType::F4);
    }

    #[test]
    fn display_trims_noise() {
        assert_eq!(form([0.9999999999999998, 0.0, 3.0000000000000044, 1.5e-3]).to_string(), "(3, 1, 0.0015; 0)");
        assert_eq!(format!("{:#}", form([1.0, 0.5, 0.0, 0.0])), "(1, 0.5, 0; 0)");
    }

    #[test]
    fn scale_is_normalized() {
        let m = form([0.0, 3.0, 1.5, 3.0]);
        assert_eq!(m.entries(), [1.0, 1.0, 0.5, 0.0]);
        assert_eq!(m.raw(), [3.0, 3.0, 1.5, 0.0]);
        assert!(DiagonalForm::new([1.0, -1.0, 0.0, 0.0], 1e-6).is_err());
    }

    #[test]
    fn jordan_patterns() {
        assert_eq!(classify_jordan([2.0, 2.0, 2.0], DEFAULT_EPS).unwrap(), JordanOrbit::F4);
        assert_eq!(classify_jordan([-1.0, 3.0, -1.0], DEFAULT_EPS).unwrap(), JordanOrbit::Spin9);
        assert_eq!(classify_jordan([0.0, 1.0, -1.0], DEFAULT_EPS).unwrap(), JordanOrbit::Spin8);
        assert_eq!(classify_jordan_c([0.0, 0.0, 0.0], DEFAULT_EPS).unwrap(), JordanCOrbit::E6);
        assert_eq!(classify_jordan_c([2.0, 2.0, 2.0], DEFAULT_EPS).unwrap(), JordanCOrbit::F4);
        assert_eq!(classify_jordan_c([1.0, 0.0, 0.0], DEFAULT_EPS).unwrap(), JordanCOrbit::Spin10);
        assert_eq!(classify_jordan_c([1.0, 2.0, 2.0], DEFAULT_EPS).unwrap(), JordanCOrbit::Spin9);
        assert_eq!(classify_jordan_c([1.0, 1.0, 0.0], DEFAULT_EPS).unwrap(), JordanCOrbit::Spin9);
        assert_eq!(classify_jordan_c([3.0, 1.0, 2.0], DEFAULT_EPS).unwrap(), JordanCOrbit::Spin8);
    }

    #[test]
    fn snapping_merges_split_double_roots() {
        let truth = [4.0, 1.0, 1.0, 0.0];
        let c = symmetric(&truth);
        let noisy = [4.0, 1.0 + 3e-8, 1.0 - 3e-8, 1e-9].map(|x| Complex64::new(x, 0.0));
        assert_eq!(snap_roots(noisy, c).0, truth);
        let triple = [1.0, 1.0, 1.0, 0.0];
        let w = Complex64::new(-0.5, 3f64.sqrt() / 2.0) * 1e-5;
        let noisy = [Complex64::new(1.0, 0.0) + 1e-5, Complex64::new(1.0, 0.0) + w, Complex64::new(1.0, 0.0) + w.conj(), Complex64::new(0.0, 0.0)];
        assert_eq!(snap_roots(noisy, symmetric(&triple)).0, triple);
    }

    #[test]
    fn orbit_type_names_round_trip() {
        for t in OrbitType::ALL {
            assert_eq!(t.name().parse::<OrbitType>().unwrap(), t);
            assert_eq!(OrbitType::from_stabilizer_dim(t.stabilizer_dim()), Some(t));
        }
    }
}
