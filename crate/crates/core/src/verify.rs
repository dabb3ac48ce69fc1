//! Self-check suites: exact identities of the covariants on normal forms,
//! structure laws of the algebras, and floating-point properties of the Lie
//! algebra and group elements. Each check can run against perturbed product
//! constants to show that the identities pin the normalization.

use std::time::Instant;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::freudenthal::{
    cross_p, cross_p_with, phi_su2, s_covariant_with, t_covariant_with, FreudenthalVector, ProductConstants, SU2Matrix,
};
use crate::jordan::JordanElement;
use crate::lie::{exp_element, random_vector, skew_hermitian_residual, tau_lambda_residual, E7Algebra, CERT_TOL};
use crate::octonion::Octonion;
use crate::scalar::{exact, Exact, Float, Scalar};

type PE = FreudenthalVector<Exact>;
type FV = FreudenthalVector<Float>;

/// Parameters substituted for the symbols `r, s, t`.
pub const R: i64 = 2;
pub const S: i64 = 3;
pub const T: i64 = 5;

#[derive(Clone, Debug)]
pub struct Check {
    pub group: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(group: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { group, name: name.into(), passed, detail: detail.into() }
    }

    fn residual(group: &'static str, name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Check::new(group, name, residual <= tol, format!("residual {residual:.2e} (tol {tol:.0e})"))
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn count(&self, group: &str) -> (usize, usize) {
        let g: Vec<&Check> = self.checks.iter().filter(|c| c.group == group).collect();
        (g.iter().filter(|c| c.passed).count(), g.len())
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn into_result(self) -> Result<Report> {
        match self.first_failure() {
            Some(c) => Err(Error::Verification(format!("{}: {}", c.name, c.detail))),
            None => Ok(self),
        }
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let pad = width - c.name.chars().count();
            out += &format!(
                "{} [{}] {}{}  {}\n",
                if c.passed { "pass" } else { "FAIL" },
                c.group,
                c.name,
                " ".repeat(pad),
                c.detail
            );
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "seconds": self.seconds,
            "checks": self.checks.iter().map(|c| json!({
                "group": c.group, "name": c.name, "passed": c.passed, "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

fn nf(entries: [i64; 4]) -> PE {
    PE::normal_form_ratio(entries.map(|e| (e, 1)))
}

/// `c·(r1, r2, r3; r)` with rational `c = num/den`.
fn scaled(num: i64, den: i64, entries: [i64; 4]) -> PE {
    nf(entries).scale_ratio(num, den)
}

fn show(e: [i64; 4]) -> String {
    format!("({}, {}, {}; {})", e[0], e[1], e[2], e[3])
}

/// The eight covariant values on normal forms, in exact arithmetic.
pub fn covariant_identities(k: &ProductConstants) -> Vec<Check> {
    let (r, s, t) = (R, S, T);
    let cases: [(&str, [i64; 4], (i64, i64), [i64; 4]); 8] = [
        ("T", [1, 1, 1, 0], (3, 2), [0, 0, 0, 1]),
        ("T", [1, 1, 1, r], (3, 2), [r, r, r, 1]),
        ("T", [1, r, r, 1], (3, 2), [r * r, r, r, r * r]),
        ("S", [1, 0, 0, r], (-1, 2), [r * r, 0, 0, r]),
        ("T", [1, 1, r, 0], (3, 2), [0, 0, 0, r]),
        ("T", [1, 1, r, s], (3, 2), [r * s, r * s, s, r]),
        ("T", [1, r, s, 0], (3, 2), [0, 0, 0, r * s]),
        ("T", [1, r, s, t], (3, 2), [r * s * t, s * t, r * t, r * s]),
    ];
    cases
        .iter()
        .map(|&(which, p, (num, den), want)| {
            let point = nf(p);
            let got = if which == "T" { t_covariant_with(&point, k) } else { s_covariant_with(&point, k) };
            let expected = scaled(num, den, want);
            let name = format!("{which}{} = ({num}/{den}){}", show(p), show(want));
            let detail = if got == expected { "exact".to_string() } else { "mismatch".to_string() };
            Check::new("identity", name, got == expected, detail)
        })
        .collect()
}

/// Points of the cone `P×P = 0`, `⟨P,P⟩ = 1`, and the `φ(A)` displays.
pub fn cone_and_su2_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let xi = PE::new(JordanElement::zero(), JordanElement::zero(), Exact::one(), Exact::zero());
    out.push(Check::new(
        "cone",
        "(0, 0, 1, 0): P×P = 0, <P,P> = 1",
        cross_p(&xi, &xi).is_zero() && xi.norm_sq() == Exact::one(),
        "exact",
    ));

    let c = Complex64::new(1.0 / (2.0 * 2f64.sqrt()), 0.0);
    let e = JordanElement::<Float>::identity();
    let p = FV::new(e.clone(), e.clone(), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).scale(&c);
    let pp = cross_p(&p, &p);
    let residual = pp.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max).max((p.norm_sq().re - 1.0).abs());
    out.push(Check::residual("cone", "(E, E, 1, 1)/(2√2): P×P = 0, <P,P> = 1", residual, 1e-12));

    let h = 1.0 / 2f64.sqrt();
    let a = SU2Matrix::new(Complex64::new(h, 0.0), Complex64::new(-h, 0.0)).expect("unit");
    for (label, x) in [("E", JordanElement::identity()), ("E1", JordanElement::e(1))] {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let src = FV::new(x.clone(), JordanElement::zero(), one, zero);
        let want = FV::new(x.clone(), x, one, one).scale(&Complex64::new(h, 0.0));
        let residual = (phi_su2(&a, &src) - want).max_abs();
        out.push(Check::residual("su2", format!("φ(A)({label}, 0, 1, 0) = ({label}, {label}, 1, 1)/√2"), residual, 1e-12));
    }
    out
}

fn small_rational(rng: &mut ChaCha8Rng) -> (i64, i64) {
    (rng.random_range(-6..=6), rng.random_range(1..=4))
}

fn rational_octonion(rng: &mut ChaCha8Rng, complex: bool) -> Octonion<Exact> {
    Octonion::new(std::array::from_fn(|_| {
        let im = if complex { small_rational(rng) } else { (0, 1) };
        exact(small_rational(rng), im)
    }))
}

fn rational_jordan(rng: &mut ChaCha8Rng, complex: bool) -> JordanElement<Exact> {
    let d = std::array::from_fn(|_| exact(small_rational(rng), if complex { small_rational(rng) } else { (0, 1) }));
    let x = std::array::from_fn(|_| rational_octonion(rng, complex));
    JordanElement { d, x }
}

/// Alternativity, composition, Jordan identity and the adjugate law on
/// random rational elements (exact).
pub fn structure_laws(k: &ProductConstants, samples: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a75);
    let (mut alt, mut comp, mut jordan, mut adj, mut trace) = (true, true, true, true, true);
    for _ in 0..samples {
        let (a, b) = (rational_octonion(&mut rng, true), rational_octonion(&mut rng, true));
        alt &= &(&a * &a) * &b == &a * &(&a * &b) && &(&a * &b) * &b == &a * &(&b * &b);
        comp &= (&a * &b).norm() == a.norm() * b.norm();

        let (x, y) = (rational_jordan(&mut rng, false), rational_jordan(&mut rng, false));
        let x2 = x.circ(&x);
        jordan &= x2.circ(&x.circ(&y)) == x.circ(&x2.circ(&y));

        let z = rational_jordan(&mut rng, true);
        let zz = z.cross_with(&z, &k.cross);
        adj &= zz.cross_with(&zz, &k.cross) == z.scale(&z.det());
        // tr(X×Y) = ½(trX·trY − (X,Y)) for the trace-free part of the cross.
        let w = rational_jordan(&mut rng, true);
        let lhs = z.cross_with(&w, &k.cross).trace();
        let rhs = (z.trace() * w.trace() - z.inner(&w)) * Exact::from_ratio(1, 2);
        trace &= lhs == rhs;
    }
    let detail = format!("{samples} random rational samples");
    vec![
        Check::new("law", "octonions alternative", alt, detail.clone()),
        Check::new("law", "norm composition N(ab) = N(a)N(b)", comp, detail.clone()),
        Check::new("law", "Jordan identity (X²∘Y)∘X = X²∘(Y∘X)", jordan, detail.clone()),
        Check::new("law", "(X×X)×(X×X) = det(X)·X", adj, detail.clone()),
        Check::new("law", "tr(X×Y) = (trX·trY − (X,Y))/2", trace, detail),
    ]
}

fn max_abs(m: &nalgebra::DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Floating-point properties of the Lie algebra, group elements and
/// covariants; the covariants use the given constants.
pub fn float_suites(k: &ProductConstants) -> Result<Vec<Check>> {
    let algebra = E7Algebra::shared()?;
    let mut out = Vec::new();
    for (name, basis, dim) in [("f4", &algebra.f4, 52), ("e6", &algebra.e6, 78), ("e7", &algebra.e7, 133)] {
        let c = &basis.certificate;
        out.push(Check::new(
            "lie",
            format!("{name} rank {dim}"),
            c.rank == dim && c.is_certain(),
            format!("rank {} gap ratio {:.2e}", c.rank, c.gap_ratio),
        ));
    }
    let skew = algebra.e7.matrices().map(skew_hermitian_residual).fold(0.0, f64::max);
    let tl = algebra.e7.matrices().map(tau_lambda_residual).fold(0.0, f64::max);
    out.push(Check::residual("lie", "e7 skew-Hermitian and τλ-commuting", skew.max(tl), 1e-12));

    let mut rng = ChaCha8Rng::seed_from_u64(0xc105);
    let n = algebra.e7.len();
    let mut closure: f64 = 0.0;
    for _ in 0..20 {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        let (a, b) = (algebra.e7.elements[i].matrix(), algebra.e7.elements[j].matrix());
        // Relative to ‖A‖‖B‖: commuting pairs have a bracket of pure rounding noise.
        let c = a * b - b * a;
        closure = closure.max(algebra.e7.decompose(&c).1 * c.norm() / (a.norm() * b.norm()));
    }
    out.push(Check::residual("lie", "e7 closed under brackets", closure, 1e-9));

    let mut infinitesimal: f64 = 0.0;
    for _ in 0..5 {
        let theta = algebra.e7.element(&algebra.random_coeffs(&mut rng));
        let (p, q) = (random_vector(&mut rng), random_vector(&mut rng));
        let m = theta.matrix();
        let pq = cross_p_with(&p, &q, k);
        let lhs = m * pq.matrix() - pq.matrix() * m;
        let rhs = cross_p_with(&theta.apply(&p), &q, k).add(&cross_p_with(&p, &theta.apply(&q), k));
        infinitesimal = infinitesimal.max(max_abs(&(lhs - rhs.matrix())));
    }
    out.push(Check::residual("lie", "[Θ, P×Q] = ΘP×Q + P×ΘQ", infinitesimal, 1e-9));

    let mut cert: f64 = 0.0;
    for _ in 0..5 {
        let b = algebra.e7.element(&algebra.random_coeffs(&mut rng));
        let g = exp_element(&b, rng.random_range(-1.0..1.0))?;
        cert = cert.max(g.certificate.max());
    }
    out.push(Check::residual("group", "exp(tB) unitary, τλ- and ×-equivariant", cert, CERT_TOL));

    let (mut t_eq, mut s_eq): (f64, f64) = (0.0, 0.0);
    for seed in 0..5 {
        let g = algebra.random_group_element(1000 + seed, 2)?;
        let p = random_vector(&mut rng);
        let tp = t_covariant_with(&p, k);
        t_eq = t_eq.max((t_covariant_with(&g.act(&p), k) - g.act(&tp)).norm() / (1.0 + tp.norm()));
        let sp = s_covariant_with(&p, k);
        s_eq = s_eq.max((s_covariant_with(&g.act(&p), k) - g.act(&sp)).norm() / (1.0 + sp.norm()));
    }
    out.push(Check::residual("group", "T(αP) = αT(P)", t_eq, 1e-9));
    out.push(Check::residual("group", "S(αP) = αS(P)", s_eq, 1e-9));

    Ok(out)
}

/// Identities only (`quick`) or everything.
pub fn run(k: &ProductConstants, quick: bool) -> Result<Report> {
    let start = Instant::now();
    let mut checks = covariant_identities(k);
    if !quick {
        checks.extend(cone_and_su2_checks());
        checks.extend(structure_laws(k, 8));
        checks.extend(float_suites(k)?);
    }
    Ok(Report { checks, seconds: start.elapsed().as_secs_f64() })
}
