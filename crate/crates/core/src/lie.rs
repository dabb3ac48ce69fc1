//! Compact Lie algebras f4 ⊂ e6 ⊂ e7 acting on the Freudenthal space,
//! their one-parameter subgroups, and stabilizer computations.
//!
//! * f4 is spanned by the commutators `[X̃, Ỹ]` of multiplication operators
//!   of the real Jordan algebra (52 independent derivations).
//! * e6 = f4 ⊕ { i·Ã : A real, tr A = 0 }.
//! * e7 = e6 ⊕ { Φ(0, A, −τA, 0) : A ∈ 𝔍^C } ⊕ R·Φ(0, 0, 0, i).
//!
//! Ranks are decided by singular values with a relative threshold and a
//! mandatory gap report.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freudenthal::{cross_p, weight, FreudenthalVector, LieElement, DIM};
use crate::jordan::{mult_operator, JordanElement, JordanOperator, JORDAN_DIM};
use crate::octonion::Octonion;
use crate::scalar::Float;

/// Relative singular-value threshold for numeric rank.
pub const RANK_THRESHOLD: f64 = 1e-8;
/// Minimum accepted ratio between the singular values straddling the threshold.
pub const MIN_GAP_RATIO: f64 = 10.0;
/// Tolerance for group-element certificates and subgroup membership.
pub const CERT_TOL: f64 = 1e-9;

pub const F4_DIM: usize = 52;
pub const E6_DIM: usize = 78;
pub const E7_DIM: usize = 133;

type FV = FreudenthalVector<Float>;

/// Standard normal sample.
pub fn normal_sample<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Singular values of a coordinate matrix together with the rank decision.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankCertificate {
    /// Descending.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub threshold: f64,
    /// `σ_rank / max(σ_{rank+1}, threshold)`; infinite when everything vanishes.
    pub gap_ratio: f64,
}

impl RankCertificate {
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        let mut sv: Vec<f64> = if m.nrows() == 0 || m.ncols() == 0 {
            Vec::new()
        } else {
            SVD::new(m, false, false).singular_values.iter().copied().collect()
        };
        sv.sort_by(|a, b| b.total_cmp(a));
        Self::from_singular_values(sv)
    }

    /// Like [`Self::from_matrix`], with the threshold measured against
    /// `max(σ_max, reference)` so that an all-noise matrix has rank 0.
    pub fn from_matrix_scaled(m: DMatrix<f64>, reference: f64) -> Self {
        let mut c = Self::from_matrix(m);
        if reference > c.singular_values.first().copied().unwrap_or(0.0) {
            c = Self::from_singular_values_scaled(c.singular_values, reference);
        }
        c
    }

    pub fn from_singular_values(sv: Vec<f64>) -> Self {
        Self::from_singular_values_scaled(sv, 0.0)
    }

    pub fn from_singular_values_scaled(sv: Vec<f64>, reference: f64) -> Self {
        let smax = sv.first().copied().unwrap_or(0.0);
        let threshold = RANK_THRESHOLD * smax.max(reference);
        let rank = sv.iter().filter(|&&s| s > threshold).count();
        if rank == 0 {
            let gap_ratio = if smax == 0.0 { f64::INFINITY } else { threshold / smax };
            return RankCertificate { singular_values: sv, rank: 0, threshold, gap_ratio };
        }
        let below = sv.get(rank).copied().unwrap_or(0.0).max(threshold);
        let gap_ratio = sv[rank - 1] / below;
        RankCertificate { singular_values: sv, rank, threshold, gap_ratio }
    }

    pub fn is_certain(&self) -> bool {
        self.gap_ratio >= MIN_GAP_RATIO
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraLabel {
    F4,
    E6,
    E7,
}

impl AlgebraLabel {
    pub fn dim(&self) -> usize {
        match self {
            AlgebraLabel::F4 => F4_DIM,
            AlgebraLabel::E6 => E6_DIM,
            AlgebraLabel::E7 => E7_DIM,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            AlgebraLabel::F4 => "f4",
            AlgebraLabel::E6 => "e6",
            AlgebraLabel::E7 => "e7",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LieBasis {
    pub label: AlgebraLabel,
    pub elements: Vec<LieElement<Float>>,
    pub certificate: RankCertificate,
    span: OnceLock<SVD<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

/// `G^{1/2} M G^{-1/2}`: the matrix in a basis orthonormal for `<,>`.
pub fn orthonormal_matrix(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(DIM, DIM, |i, j| m[(i, j)] * (weight(i) / weight(j)).sqrt())
}

/// Hilbert–Schmidt norm of an operator on the Freudenthal space, measured in
/// a `<,>`-orthonormal basis.
pub fn hs_norm(m: &DMatrix<Complex64>) -> f64 {
    let mut s = 0.0;
    for j in 0..DIM {
        for i in 0..DIM {
            s += m[(i, j)].norm_sqr() * weight(i) / weight(j);
        }
    }
    s.sqrt()
}

fn realify_matrix(m: &DMatrix<Complex64>) -> Vec<f64> {
    m.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn realify_jordan_op(op: &JordanOperator<Float>) -> Vec<f64> {
    op.m.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn columns_to_matrix(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let rows = cols.first().map_or(0, |c| c.len());
    DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

impl LieBasis {
    fn new(label: AlgebraLabel, elements: Vec<LieElement<Float>>, certificate: RankCertificate) -> Self {
        LieBasis { label, elements, certificate, span: OnceLock::new() }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn matrices(&self) -> impl Iterator<Item = &DMatrix<Complex64>> {
        self.elements.iter().map(|e| e.matrix())
    }

    fn span_svd(&self) -> &SVD<f64, nalgebra::Dyn, nalgebra::Dyn> {
        self.span.get_or_init(|| {
            let cols: Vec<Vec<f64>> = self.matrices().map(realify_matrix).collect();
            SVD::new(columns_to_matrix(&cols), true, true)
        })
    }

    /// Least-squares coefficients of `m` in the basis and the relative
    /// residual `‖m − sum c_k B_k‖ / ‖m‖`.
    pub fn decompose(&self, m: &DMatrix<Complex64>) -> (Vec<f64>, f64) {
        let target = DVector::from_vec(realify_matrix(m));
        let svd = self.span_svd();
        let coeffs = svd.solve(&target, 1e-12).expect("SVD with vectors");
        let cols: Vec<Vec<f64>> = self.matrices().map(realify_matrix).collect();
        let fit = columns_to_matrix(&cols) * &coeffs;
        let norm = target.norm();
        let residual = (fit - &target).norm() / if norm > 0.0 { norm } else { 1.0 };
        (coeffs.iter().copied().collect(), residual)
    }

    /// `sum c_k B_k`.
    pub fn element(&self, coeffs: &[f64]) -> LieElement<Float> {
        LieElement::combination(&self.elements, coeffs)
    }

    /// Matrix of `sum c_k B_k`.
    pub fn matrix_of(&self, coeffs: &[f64]) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(DIM, DIM);
        for (b, &c) in self.matrices().zip(coeffs) {
            if c != 0.0 {
                m += b * Complex64::new(c, 0.0);
            }
        }
        m
    }

    /// `{B ∈ span : BP = 0}`, with the rank threshold referenced to `‖P‖`.
    pub fn annihilator(&self, p: &FV) -> Stabilizer {
        let v = p.to_dvector();
        let cols: Vec<Vec<f64>> =
            self.matrices().map(|m| (m * &v).iter().flat_map(|z| [z.re, z.im]).collect()).collect();
        let certificate = RankCertificate::from_matrix_scaled(columns_to_matrix(&cols), p.norm());
        Stabilizer { dim: self.len() - certificate.rank, certificate }
    }

    /// JSON export: version tag, rank certificate and the Φ-tuples.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "version": 1,
            "label": self.label.name(),
            "certificate": self.certificate,
            "elements": self.elements.iter().map(crate::io::lie_element_to_json).collect::<Vec<_>>(),
        })
    }
}

fn check_rank(label: AlgebraLabel, cert: &RankCertificate) -> Result<()> {
    if cert.rank != label.dim() {
        return Err(Error::RankMismatch { label: label.name(), found: cert.rank, expected: label.dim() });
    }
    if !cert.is_certain() {
        return Err(Error::UncertainRank { rank: cert.rank, ratio: cert.gap_ratio });
    }
    Ok(())
}

/// Real basis of the Jordan algebra in coordinate order.
fn real_jordan_basis() -> Vec<JordanElement<Float>> {
    (0..JORDAN_DIM).map(JordanElement::basis).collect()
}

/// Real basis of the traceless part, orthonormal for `(,)`.
fn traceless_basis() -> Vec<JordanElement<Float>> {
    let r = |x: f64| Complex64::new(x, 0.0);
    let mut out = vec![
        JordanElement::diag(r(1.0), r(-1.0), r(0.0)).scale(&r(1.0 / 2f64.sqrt())),
        JordanElement::diag(r(1.0), r(1.0), r(-2.0)).scale(&r(1.0 / 6f64.sqrt())),
    ];
    for k in 1..=3 {
        for i in 0..8 {
            out.push(JordanElement::off(k, Octonion::unit(i)).scale(&r(1.0 / 2f64.sqrt())));
        }
    }
    out
}

/// Normalize a Lie element to unit Hilbert–Schmidt norm of its action.
fn normalized(e: LieElement<Float>) -> LieElement<Float> {
    let n = hs_norm(e.matrix());
    e.scale(&Complex64::new(1.0 / n, 0.0))
}

pub fn build_f4_basis() -> Result<LieBasis> {
    let ops: Vec<JordanOperator<Float>> = real_jordan_basis().iter().map(mult_operator).collect();
    let mut cols = Vec::new();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let c = ops[i].commutator(&ops[j]);
            cols.push(c.m.iter().map(|z| z.re).collect::<Vec<f64>>());
        }
    }
    let svd = SVD::new(columns_to_matrix(&cols), true, false);
    let u = svd.u.as_ref().expect("left singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let cert = RankCertificate::from_singular_values(sv);
    check_rank(AlgebraLabel::F4, &cert)?;

    let elements = order[..F4_DIM]
        .iter()
        .map(|&k| {
            let m = u.column(k).iter().map(|&v| Complex64::new(v, 0.0)).collect();
            normalized(LieElement::from_phi(JordanOperator { m }))
        })
        .collect();
    Ok(LieBasis::new(AlgebraLabel::F4, elements, cert))
}

pub fn build_e6_basis(f4: &LieBasis) -> Result<LieBasis> {
    let mut elements: Vec<LieElement<Float>> = f4.elements.clone();
    let i = Complex64::new(0.0, 1.0);
    for a in traceless_basis() {
        elements.push(normalized(LieElement::from_phi(mult_operator(&a).scale(&i))));
    }
    let cols: Vec<Vec<f64>> = elements.iter().map(|e| realify_jordan_op(&e.phi)).collect();
    let cert = RankCertificate::from_matrix(columns_to_matrix(&cols));
    check_rank(AlgebraLabel::E6, &cert)?;
    Ok(LieBasis::new(AlgebraLabel::E6, elements, cert))
}

pub fn build_e7_basis(e6: &LieBasis) -> Result<LieBasis> {
    let mut elements: Vec<LieElement<Float>> = e6.elements.clone();
    let i = Complex64::new(0.0, 1.0);
    for a in real_jordan_basis() {
        for s in [Complex64::new(1.0, 0.0), i] {
            let a = a.scale(&s);
            let b = -a.tau();
            elements.push(normalized(LieElement::new(JordanOperator::zero(), a, b, Complex64::new(0.0, 0.0))));
        }
    }
    elements.push(normalized(LieElement::new(
        JordanOperator::zero(),
        JordanElement::zero(),
        JordanElement::zero(),
        i,
    )));
    let cols: Vec<Vec<f64>> = elements.iter().map(|e| realify_matrix(e.matrix())).collect();
    let cert = RankCertificate::from_matrix(columns_to_matrix(&cols));
    check_rank(AlgebraLabel::E7, &cert)?;
    Ok(LieBasis::new(AlgebraLabel::E7, elements, cert))
}

/// The three bases, built once.
#[derive(Debug)]
pub struct E7Algebra {
    pub f4: LieBasis,
    pub e6: LieBasis,
    pub e7: LieBasis,
}

static ALGEBRA: OnceLock<std::result::Result<E7Algebra, String>> = OnceLock::new();

impl E7Algebra {
    pub fn build() -> Result<Self> {
        let f4 = build_f4_basis()?;
        let e6 = build_e6_basis(&f4)?;
        let e7 = build_e7_basis(&e6)?;
        Ok(E7Algebra { f4, e6, e7 })
    }

    /// Process-wide instance.
    pub fn shared() -> Result<&'static E7Algebra> {
        ALGEBRA
            .get_or_init(|| E7Algebra::build().map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::Verification(e.clone()))
    }

    /// Random element `sum c_k B_k` with standard normal coefficients.
    pub fn random_coeffs<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.e7.len()).map(|_| normal_sample(rng)).collect()
    }

    pub fn random_group_element(&self, seed: u64, n_factors: usize) -> Result<GroupElement> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = GroupElement::identity();
        for _ in 0..n_factors {
            let coeffs = self.random_coeffs(&mut rng);
            let t = rng.random_range(-1.0..1.0);
            let m = (self.e7.matrix_of(&coeffs) * Complex64::new(t, 0.0)).exp();
            g.matrix = m * &g.matrix;
            g.provenance.push(format!("exp({t:.6}·B), seed {seed}"));
        }
        if n_factors > 0 {
            g.certify(CERT_PROBES, seed)?;
        }
        Ok(g)
    }

    /// `α·(r1, r2, r3; r)` for a random certified `α` (three factors).
    pub fn random_orbit_sample(&self, pattern: [f64; 4], seed: u64) -> Result<FV> {
        let g = self.random_group_element(seed, 3)?;
        let c = |x: f64| Complex64::new(x, 0.0);
        Ok(g.act(&FV::normal_form(c(pattern[0]), c(pattern[1]), c(pattern[2]), c(pattern[3]))))
    }

    /// Dimension of `{B ∈ e7 : BP = 0}`.
    pub fn stabilizer_dimension(&self, p: &FV) -> Result<Stabilizer> {
        let s = self.stabilizer_report(p);
        if s.certificate.is_certain() {
            Ok(s)
        } else {
            Err(Error::UncertainRank { rank: s.certificate.rank, ratio: s.certificate.gap_ratio })
        }
    }

    /// Like [`Self::stabilizer_dimension`] but never fails on a small gap.
    pub fn stabilizer_report(&self, p: &FV) -> Stabilizer {
        self.e7.annihilator(p)
    }
}

#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub dim: usize,
    pub certificate: RankCertificate,
}

/// Weighted check that `M` is skew-Hermitian for `<,>`: `max |(G M + M^† G)_{ij}|`.
pub fn skew_hermitian_residual(m: &DMatrix<Complex64>) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            let v = m[(i, j)] * weight(i) + m[(j, i)].conj() * weight(j);
            r = r.max(v.norm());
        }
    }
    r
}

/// Matrix of the real-linear part of λ: `τλ(P) = L·conj(P)`.
fn lambda_matrix() -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(DIM, DIM);
    for j in 0..DIM {
        let col = FV::basis(j).lambda().coords();
        for (i, v) in col.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

/// `max |M L − L conj(M)|`, zero iff `M` commutes with τλ.
pub fn tau_lambda_residual(m: &DMatrix<Complex64>) -> f64 {
    let l = lambda_matrix();
    let d = m * &l - &l * m.map(|z| z.conj());
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Certificate residuals of a group element.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Certificate {
    pub unitarity: f64,
    pub tau_lambda: f64,
    pub equivariance: f64,
}

impl Certificate {
    pub fn max(&self) -> f64 {
        self.unitarity.max(self.tau_lambda).max(self.equivariance)
    }
}

/// Probe pairs used when certifying a group element.
pub const CERT_PROBES: usize = 3;

/// An element of the compact group E7 as a `56 × 56` complex matrix.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub matrix: DMatrix<Complex64>,
    pub provenance: Vec<String>,
    pub certificate: Certificate,
}

/// Random probe vector of unit `<,>`-norm.
pub fn random_vector<R: Rng>(rng: &mut R) -> FV {
    let coords: Vec<Complex64> =
        (0..DIM).map(|_| Complex64::new(normal_sample(rng), normal_sample(rng))).collect();
    let p = FV::from_coords(&coords);
    let n = p.norm();
    p.scale(&Complex64::new(1.0 / n, 0.0))
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            matrix: DMatrix::identity(DIM, DIM),
            provenance: Vec::new(),
            certificate: Certificate::default(),
        }
    }

    pub fn act(&self, p: &FV) -> FV {
        FV::from_dvector(&(&self.matrix * p.to_dvector()))
    }

    /// `self ∘ other`, re-certified.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        let mut provenance = other.provenance.clone();
        provenance.extend(self.provenance.iter().cloned());
        let mut g = GroupElement { matrix: &self.matrix * &other.matrix, provenance, certificate: Certificate::default() };
        g.certify(CERT_PROBES, 0)?;
        Ok(g)
    }

    /// Compute certificate residuals on `probes` random probe pairs.
    pub fn measure(&self, probes: usize, seed: u64) -> Certificate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
        let inverse = self.matrix.clone().try_inverse();
        let mut cert = Certificate::default();
        for _ in 0..probes {
            let (p, q) = (random_vector(&mut rng), random_vector(&mut rng));
            let (gp, gq) = (self.act(&p), self.act(&q));
            cert.unitarity = cert.unitarity.max((gp.herm_inner(&gq) - p.herm_inner(&q)).norm());
            let tl = (self.act(&p.tau_lambda()) - gp.tau_lambda()).max_abs();
            cert.tau_lambda = cert.tau_lambda.max(tl);
            let eq = match &inverse {
                Some(inv) => {
                    let lhs = &self.matrix * cross_p(&p, &q).matrix() * inv;
                    let rhs = cross_p(&gp, &gq);
                    (lhs - rhs.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
                }
                None => f64::INFINITY,
            };
            cert.equivariance = cert.equivariance.max(eq);
        }
        cert
    }

    pub fn certify(&mut self, probes: usize, seed: u64) -> Result<()> {
        self.certificate = self.measure(probes, seed);
        for (check, residual) in [
            ("unitarity", self.certificate.unitarity),
            ("tau-lambda", self.certificate.tau_lambda),
            ("equivariance", self.certificate.equivariance),
        ] {
            if !(residual <= CERT_TOL) {
                return Err(Error::Certificate { check, residual, tolerance: CERT_TOL });
            }
        }
        Ok(())
    }

    pub fn fixes(&self, p: &FV) -> bool {
        (self.act(p) - p.clone()).max_abs() <= CERT_TOL
    }

    pub fn subgroup_labels(&self) -> BTreeSet<Subgroup> {
        subgroup_labels(self)
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<[f64; 2]>> = (0..DIM)
            .map(|i| (0..DIM).map(|j| [self.matrix[(i, j)].re, self.matrix[(i, j)].im]).collect())
            .collect();
        serde_json::json!({ "matrix": rows, "provenance": self.provenance, "certificate": self.certificate })
    }
}

/// `exp(t·B)`, certified. `B` must be compact (skew-Hermitian, τλ-commuting).
pub fn exp_element(b: &LieElement<Float>, t: f64) -> Result<GroupElement> {
    let m = b.matrix();
    let scale = 1.0 + m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for (check, residual) in [("skew-hermitian", skew_hermitian_residual(m)), ("tau-lambda", tau_lambda_residual(m))] {
        if residual > CERT_TOL * scale {
            return Err(Error::Certificate { check, residual, tolerance: CERT_TOL * scale });
        }
    }
    if t == 0.0 {
        return Ok(GroupElement::identity());
    }
    let mut g = GroupElement {
        matrix: (m * Complex64::new(t, 0.0)).exp(),
        provenance: vec![format!("exp({t:.6}·B)")],
        certificate: Certificate::default(),
    };
    g.certify(CERT_PROBES, t.to_bits())?;
    Ok(g)
}

/// Subgroups recognized by their fixed points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Subgroup {
    E7,
    E6,
    F4,
    Spin11,
    Spin10,
    Spin9,
    Spin8,
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Subgroup::E7 => "E7",
            Subgroup::E6 => "E6",
            Subgroup::F4 => "F4",
            Subgroup::Spin11 => "Spin(11)",
            Subgroup::Spin10 => "Spin(10)",
            Subgroup::Spin9 => "Spin(9)",
            Subgroup::Spin8 => "Spin(8)",
        };
        f.write_str(s)
    }
}

fn first_slot(x: JordanElement<Float>) -> FV {
    FV::new(x, JordanElement::zero(), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
}

/// Every subgroup whose defining fixed-point conditions `α` satisfies:
/// E6 fixes `(0,0,1,0)`; F4 ⊂ E6 fixes `E`; Spin(8) ⊂ F4 fixes each `E_k`;
/// Spin(9) ⊂ F4 and Spin(10) ⊂ E6 fix `E_1`; Spin(11) fixes `(E_1, 0, 1, 0)`.
pub fn subgroup_labels(g: &GroupElement) -> BTreeSet<Subgroup> {
    let one = Complex64::new(1.0, 0.0);
    let xi_unit = FV::new(JordanElement::zero(), JordanElement::zero(), one, Complex64::new(0.0, 0.0));
    let e = |k| first_slot(JordanElement::e(k));
    let mut out = BTreeSet::from([Subgroup::E7]);
    let in_e6 = g.fixes(&xi_unit);
    let fixes_e1 = g.fixes(&e(1));
    if in_e6 {
        out.insert(Subgroup::E6);
        if fixes_e1 {
            out.insert(Subgroup::Spin10);
        }
        if g.fixes(&first_slot(JordanElement::identity())) {
            out.insert(Subgroup::F4);
            if fixes_e1 {
                out.insert(Subgroup::Spin9);
                if g.fixes(&e(2)) && g.fixes(&e(3)) {
                    out.insert(Subgroup::Spin8);
                }
            }
        }
    }
    if g.fixes(&(e(1) + xi_unit)) {
        out.insert(Subgroup::Spin11);
    }
    out
}

/// Derivation residual `max |D(X∘Y) − DX∘Y − X∘DY|` over random real probes.
pub fn derivation_residual(d: &JordanOperator<Float>, probes: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let mut rand_j = || {
            JordanElement::from_coords(&(0..JORDAN_DIM).map(|_| Complex64::new(normal_sample(&mut rng), 0.0)).collect::<Vec<_>>())
        };
        let (x, y) = (rand_j(), rand_j());
        let r = d.apply(&x.circ(&y)) - d.apply(&x).circ(&y) - x.circ(&d.apply(&y));
        worst = worst.max(r.coords().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_certificate_gap() {
        let c = RankCertificate::from_singular_values(vec![3.0, 1.0, 1e-14]);
        assert_eq!(c.rank, 2);
        assert!(c.is_certain());
        let c = RankCertificate::from_singular_values(vec![1.0, 5e-8, 5e-9]);
        assert_eq!(c.rank, 2);
        assert!(!c.is_certain());
        let c = RankCertificate::from_singular_values(vec![0.0, 0.0]);
        assert_eq!(c.rank, 0);
        assert!(c.is_certain());
    }

    #[test]
    fn identity_has_every_label() {
        let labels = GroupElement::identity().subgroup_labels();
        assert_eq!(labels.len(), 7);
    }

    #[test]
    fn su2_generator_is_unitary() {
        let m = crate::freudenthal::SU2Matrix::exp_generator([0.3, -1.2, 0.7], 0.9);
        assert!(((m.a.norm_sqr() + m.b.norm_sqr()) - 1.0).abs() < 1e-15);
    }
}
