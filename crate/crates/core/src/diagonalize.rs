//! Reduction of an arbitrary `P` to the normal form `(r1, r2, r3; r)` by
//! products of one-parameter subgroups of E7 and `φ(SU(2))` factors.
//!
//! Each sweep line-searches every e7 basis direction, and the three su(2)
//! directions once they are enabled. Between sweeps a Gauss–Newton step on
//! the linearized off-form residual (columns `B_k P` and the su(2)
//! derivatives) finishes the quadratic tail that coordinate sweeps only
//! approach linearly.
//!
//! Runs start with E7 alone: `φ(A)` commutes with E7 but moves `P` to a
//! different E7 orbit of the same type, whose diagonal form generally has a
//! different multiset. Only when E7 sweeps stall are the su(2) directions
//! switched on, for inputs whose E7 orbit meets no real diagonal form.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::classify::{classify, classify_multiset, DiagonalForm, DEFAULT_EPS};
use crate::error::{Error, Result};
use crate::freudenthal::{phi_su2, weight, FreudenthalVector, SU2Matrix, DIM};
use crate::jordan::JORDAN_DIM;
use crate::lie::{normal_sample, E7Algebra};
use crate::scalar::Float;

type FV = FreudenthalVector<Float>;

const GRID: usize = 40;
const GOLDEN_ITERS: usize = 40;
const GN_ITERS: usize = 8;
const STAGNATION: f64 = 1e-14;
/// Relative cutoff when snapping diagonal entries to zero.
const ZERO_SNAP: f64 = 1e-12;

/// Which part of a coordinate `off_form_energy` penalizes.
#[derive(Clone, Copy, PartialEq)]
enum Penalty {
    Imag,
    Full,
}

fn penalty(i: usize) -> Penalty {
    match i {
        0..=2 => Penalty::Imag,
        i if i == 2 * JORDAN_DIM => Penalty::Imag,
        _ => Penalty::Full,
    }
}

/// Sum of squared moduli of the off-diagonal parts of X, Im diag X, all of
/// Y, Im ξ and η.
pub fn off_form_energy(p: &FV) -> f64 {
    p.coords().iter().enumerate().map(|(i, z)| coordinate_energy(i, *z)).sum()
}

fn coordinate_energy(i: usize, z: Complex64) -> f64 {
    match penalty(i) {
        Penalty::Imag => z.im * z.im,
        Penalty::Full => z.norm_sqr(),
    }
}

/// Real-linear residual whose squared norm is the energy.
fn residual_vector(p: &FV) -> Vec<f64> {
    let mut r = Vec::with_capacity(108);
    for (i, z) in p.coords().into_iter().enumerate() {
        match penalty(i) {
            Penalty::Imag => r.push(z.im),
            Penalty::Full => r.extend([z.re, z.im]),
        }
    }
    r
}

/// `exp(tB) = W^{-1/2} U diag(e^{−iλt}) U† W^{1/2}` from the Hermitian
/// matrix `i·W^{1/2} B W^{-1/2}`.
struct Direction {
    u: DMatrix<Complex64>,
    lambda: Vec<f64>,
}

fn sqrt_weights() -> DVector<f64> {
    DVector::from_fn(DIM, |i, _| weight(i).sqrt())
}

impl Direction {
    fn new(m: &DMatrix<Complex64>) -> Self {
        let w = sqrt_weights();
        let h = DMatrix::from_fn(DIM, DIM, |i, j| Complex64::new(0.0, 1.0) * m[(i, j)] * (w[i] / w[j]));
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        Direction { u: eig.eigenvectors, lambda: eig.eigenvalues.iter().copied().collect() }
    }

    /// `U†·W^{1/2}v`, reused for every `t`.
    fn spectral(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let w = sqrt_weights();
        self.u.adjoint() * DVector::from_fn(DIM, |i, _| v[i] * w[i])
    }

    fn evolve(&self, spectral: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let w = sqrt_weights();
        let phased = DVector::from_fn(DIM, |i, _| spectral[i] * Complex64::from_polar(1.0, -self.lambda[i] * t));
        let on = &self.u * phased;
        DVector::from_fn(DIM, |i, _| on[i] / w[i])
    }

    fn apply(&self, v: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        self.evolve(&self.spectral(v), t)
    }
}

fn directions(algebra: &E7Algebra) -> &'static [Direction] {
    static DIRECTIONS: OnceLock<Vec<Direction>> = OnceLock::new();
    DIRECTIONS.get_or_init(|| algebra.e7.matrices().collect::<Vec<_>>().par_iter().map(|m| Direction::new(m)).collect())
}

fn energy_of(v: &DVector<Complex64>) -> f64 {
    v.iter().enumerate().map(|(i, z)| coordinate_energy(i, *z)).sum()
}

/// su(2) generators `diag(i, −i)`, `[[0, −1], [1, 0]]`, `[[0, i], [i, 0]]`.
const SU2_GENERATORS: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// One recorded group move.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    /// `exp(t·B_k)` for the e7 basis element `k`.
    Basis { index: usize, t: f64 },
    /// `exp(t·sum c_k B_k)`.
    Combination { coeffs: Vec<f64>, t: f64 },
    /// `φ(A)`.
    Su2(SU2Matrix<Float>),
}

impl Factor {
    pub fn to_json(&self) -> Value {
        match self {
            Factor::Basis { index, t } => json!({"kind": "basis", "index": index, "t": t}),
            Factor::Combination { coeffs, t } => json!({"kind": "combination", "coeffs": coeffs, "t": t}),
            Factor::Su2(m) => json!({"kind": "su2", "a": [m.a.re, m.a.im], "b": [m.b.re, m.b.im]}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Factor> {
        let bad = || Error::Parse(format!("malformed factor {v}"));
        let num = |key: &str| v.get(key).and_then(Value::as_f64).ok_or_else(bad);
        let pair = |key: &str| -> Result<Complex64> {
            let a = v.get(key).and_then(Value::as_array).filter(|a| a.len() == 2).ok_or_else(bad)?;
            Ok(Complex64::new(a[0].as_f64().ok_or_else(bad)?, a[1].as_f64().ok_or_else(bad)?))
        };
        match v.get("kind").and_then(Value::as_str) {
            Some("basis") => {
                Ok(Factor::Basis { index: v.get("index").and_then(Value::as_u64).ok_or_else(bad)? as usize, t: num("t")? })
            }
            Some("combination") => {
                let coeffs = v.get("coeffs").and_then(Value::as_array).ok_or_else(bad)?;
                let coeffs = coeffs.iter().map(|c| c.as_f64().ok_or_else(bad)).collect::<Result<_>>()?;
                Ok(Factor::Combination { coeffs, t: num("t")? })
            }
            Some("su2") => Ok(Factor::Su2(SU2Matrix::new(pair("a")?, pair("b")?)?)),
            _ => Err(bad()),
        }
    }
}

/// Apply the factors in order to `p`. Basis factors use the cached spectral
/// decompositions; combinations use the matrix exponential.
pub fn replay(algebra: &E7Algebra, factors: &[Factor], p: &FV) -> FV {
    let dirs = directions(algebra);
    let mut v = p.to_dvector();
    for f in factors {
        v = match f {
            Factor::Basis { index, t } => dirs[*index].apply(&v, *t),
            Factor::Combination { coeffs, t } => (algebra.e7.matrix_of(coeffs) * Complex64::new(*t, 0.0)).exp() * v,
            Factor::Su2(m) => phi_su2(m, &FV::from_dvector(&v)).to_dvector(),
        };
    }
    FV::from_dvector(&v)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReduceConfig {
    /// Convergence threshold on the energy of the unit-normalized input.
    pub tol: f64,
    pub max_sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        ReduceConfig { tol: 1e-12, max_sweeps: 500, restarts: 8, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct ReductionResult {
    /// Sorted absolute values of the final entries.
    pub diagonal: DiagonalForm,
    /// Final entries `(r1, r2, r3; r)` in slot order, before taking absolute
    /// values.
    pub slots: [Complex64; 4],
    /// Factors in application order; the result equals their product
    /// applied to the input up to the discarded phases of the slots.
    pub factors: Vec<Factor>,
    /// `sqrt(off_form_energy)` of the transformed input.
    pub residual: f64,
    /// Completed sweeps of the winning run.
    pub iterations: usize,
    pub restart: usize,
    /// `false` when the run stopped without reaching the tolerance.
    pub certified: bool,
    /// Whether su(2) factors were needed; if so the diagonal form belongs to
    /// a `φ(SU(2))`-translate of the input's E7 orbit.
    pub su2_used: bool,
}

impl ReductionResult {
    pub fn to_json(&self) -> Value {
        json!({
            "diagonal": self.diagonal.raw(),
            "slots": self.slots.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "residual": self.residual,
            "iterations": self.iterations,
            "restart": self.restart,
            "certified": self.certified,
            "su2_used": self.su2_used,
            "phases_discarded": true,
            "factors": self.factors.iter().map(Factor::to_json).collect::<Vec<_>>(),
        })
    }
}

struct Run {
    v: DVector<Complex64>,
    factors: Vec<Factor>,
    energy: f64,
    sweeps: usize,
    su2: bool,
}

fn golden(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd { (c, fc) } else { (d, fd) }
}

/// Minimize `f` over `[−π, π]`: grid scan, then golden section around the
/// best grid point.
fn line_search(f: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let h = 2.0 * std::f64::consts::PI / GRID as f64;
    let (mut best_t, mut best) = (0.0, f(0.0));
    for k in 0..=GRID {
        let t = -std::f64::consts::PI + h * k as f64;
        let e = f(t);
        if e < best {
            best = e;
            best_t = t;
        }
    }
    let (t, e) = golden(f, best_t - h, best_t + h);
    if e < best { (t, e) } else { (best_t, best) }
}

fn su2_apply(c: [f64; 3], t: f64, v: &DVector<Complex64>) -> DVector<Complex64> {
    phi_su2(&SU2Matrix::exp_generator(c, t), &FV::from_dvector(v)).to_dvector()
}

fn sweep(dirs: &[Direction], run: &mut Run) {
    for (index, d) in dirs.iter().enumerate() {
        let spectral = d.spectral(&run.v);
        let (t, e) = line_search(&|t| energy_of(&d.evolve(&spectral, t)));
        if e < run.energy && t != 0.0 {
            run.v = d.evolve(&spectral, t);
            run.energy = energy_of(&run.v);
            run.factors.push(Factor::Basis { index, t });
        }
    }
    if !run.su2 {
        return;
    }
    for c in SU2_GENERATORS {
        let v = run.v.clone();
        let (t, e) = line_search(&|t| energy_of(&su2_apply(c, t, &v)));
        if e < run.energy && t != 0.0 {
            run.v = su2_apply(c, t, &v);
            run.energy = energy_of(&run.v);
            run.factors.push(Factor::Su2(SU2Matrix::exp_generator(c, t)));
        }
    }
}

/// Derivatives of `φ(exp(sH_j))P` at `s = 0` for the three generators.
fn su2_tangents(p: &FV) -> [FV; 3] {
    let i = Complex64::new(0.0, 1.0);
    let tl = p.tau_lambda();
    [p.scale(&i), tl.clone(), tl.scale(&-i)]
}

/// Gauss–Newton steps on the residual, each accepted only if it lowers the
/// energy (with step halving).
fn gauss_newton(algebra: &E7Algebra, run: &mut Run) {
    for _ in 0..GN_ITERS {
        if run.energy == 0.0 {
            return;
        }
        let p = FV::from_dvector(&run.v);
        let mut cols: Vec<Vec<f64>> =
            algebra.e7.matrices().map(|m| residual_vector(&FV::from_dvector(&(m * &run.v)))).collect();
        if run.su2 {
            cols.extend(su2_tangents(&p).iter().map(residual_vector));
        }
        let r = DVector::from_vec(residual_vector(&p));
        let j = DMatrix::from_fn(r.len(), cols.len(), |a, b| cols[b][a]);
        let svd = j.svd(true, true);
        let smax = svd.singular_values.max();
        let Ok(delta) = svd.solve(&(-&r), 1e-10 * smax) else { return };
        let e7: Vec<f64> = delta.iter().take(algebra.e7.len()).copied().collect();
        let mut su: Vec<f64> = delta.iter().skip(algebra.e7.len()).copied().collect();
        su.resize(3, 0.0);
        let gen = algebra.e7.matrix_of(&e7);
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let su2 = SU2Matrix::exp_generator([su[0], su[1], su[2]], step);
            let moved = phi_su2(&su2, &FV::from_dvector(&((&gen * Complex64::new(step, 0.0)).exp() * &run.v)));
            let e = off_form_energy(&moved);
            if e < run.energy {
                run.v = moved.to_dvector();
                run.energy = e;
                run.factors.push(Factor::Combination { coeffs: e7.clone(), t: step });
                if run.su2 {
                    run.factors.push(Factor::Su2(su2));
                }
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted {
            return;
        }
    }
}

fn run_from(algebra: &E7Algebra, start: DVector<Complex64>, factors: Vec<Factor>, cfg: &ReduceConfig) -> Run {
    let dirs = directions(algebra);
    let energy = energy_of(&start);
    let mut run = Run { v: start, factors, energy, sweeps: 0, su2: false };
    while run.energy >= cfg.tol && run.sweeps < cfg.max_sweeps {
        let before = run.energy;
        sweep(dirs, &mut run);
        gauss_newton(algebra, &mut run);
        run.sweeps += 1;
        if before - run.energy < STAGNATION && run.energy >= cfg.tol {
            if run.su2 {
                break;
            }
            run.su2 = true;
        }
    }
    if run.energy < cfg.tol {
        // Drive the tail to rounding level.
        gauss_newton(algebra, &mut run);
    }
    run
}

fn random_start(algebra: &E7Algebra, seed: u64, v: &DVector<Complex64>) -> (DVector<Complex64>, Vec<Factor>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = v.clone();
    let mut factors = Vec::new();
    for _ in 0..3 {
        let coeffs: Vec<f64> = (0..algebra.e7.len()).map(|_| normal_sample(&mut rng)).collect();
        let t = rng.random_range(-1.0..1.0);
        v = (algebra.e7.matrix_of(&coeffs) * Complex64::new(t, 0.0)).exp() * v;
        factors.push(Factor::Combination { coeffs, t });
    }
    (v, factors)
}

fn finish(run: Run, restart: usize, norm: f64, cfg: &ReduceConfig) -> Result<ReductionResult> {
    let p = FV::from_dvector(&run.v);
    let mut slots = [p.x.d[0], p.x.d[1], p.x.d[2], p.xi];
    for z in &mut slots {
        if z.norm() < ZERO_SNAP {
            *z = Complex64::new(0.0, 0.0);
        }
        *z *= norm;
    }
    let su2_used = run.factors.iter().any(|f| matches!(f, Factor::Su2(_)));
    Ok(ReductionResult {
        diagonal: DiagonalForm::new(slots.map(|z| z.norm()), DEFAULT_EPS)?,
        slots,
        factors: run.factors,
        residual: run.energy.sqrt() * norm,
        iterations: run.sweeps,
        restart,
        certified: run.energy < cfg.tol,
        su2_used,
    })
}

/// Reduce `P` to `(r1, r2, r3; r)`. Restart 0 starts from `P`; if it stalls,
/// restarts `1..=restarts` start from random E7 translates in parallel and
/// the certified one with the lowest index wins. Without any certified run
/// the best run is returned with `certified = false`.
pub fn reduce(p: &FV, cfg: &ReduceConfig) -> Result<ReductionResult> {
    let algebra = E7Algebra::shared()?;
    let norm = p.norm();
    if norm == 0.0 {
        return finish(Run { v: p.to_dvector(), factors: Vec::new(), energy: 0.0, sweeps: 0, su2: false }, 0, 0.0, cfg);
    }
    let unit = p.scale(&Complex64::new(1.0 / norm, 0.0)).to_dvector();
    let first = run_from(algebra, unit.clone(), Vec::new(), cfg);
    if first.energy < cfg.tol || cfg.restarts == 0 {
        return finish(first, 0, norm, cfg);
    }
    let runs: Vec<(usize, Run)> = (1..=cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let seed = cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k as u64);
            let (start, factors) = random_start(algebra, seed, &unit);
            (k, run_from(algebra, start, factors, cfg))
        })
        .collect();
    let best = std::iter::once((0, first))
        .chain(runs)
        .min_by(|a, b| {
            let key = |r: &(usize, Run)| (r.1.energy >= cfg.tol, if r.1.energy < cfg.tol { 0.0 } else { r.1.energy }, r.0);
            key(a).partial_cmp(&key(b)).expect("finite energies")
        })
        .expect("at least one run");
    finish(best.1, best.0, norm, cfg)
}

/// Outcome of re-checking a reduction.
#[derive(Clone, Debug)]
pub struct ReductionCheck {
    /// `‖replay(P) − result‖` relative to `‖P‖`, phases removed.
    pub replay: f64,
    pub residual: f64,
    pub norm_drift: f64,
    pub classification: Option<(String, String)>,
    pub failures: Vec<String>,
}

impl ReductionCheck {
    pub fn to_json(&self) -> Value {
        json!({
            "replay": self.replay,
            "residual": self.residual,
            "norm_drift": self.norm_drift,
            "classification": self.classification.as_ref().map(|(a, b)| json!({"point": a, "diagonal": b})),
            "failures": self.failures,
        })
    }
}

/// Replay the factors, and check the residual, norm conservation and that
/// the diagonal classifies like `P`.
pub fn verify_reduction(p: &FV, result: &ReductionResult) -> Result<ReductionCheck> {
    let algebra = E7Algebra::shared()?;
    let norm = p.norm();
    let rel = |x: f64| if norm > 0.0 { x / norm } else { x };
    let q = replay(algebra, &result.factors, p);
    let mut check = ReductionCheck {
        replay: 0.0,
        residual: off_form_energy(&q).sqrt(),
        norm_drift: (q.norm_sq().re - p.norm_sq().re).abs() / (norm * norm).max(f64::MIN_POSITIVE),
        classification: None,
        failures: Vec::new(),
    };
    let mut replayed = [q.x.d[0].norm(), q.x.d[1].norm(), q.x.d[2].norm(), q.xi.norm()];
    replayed.sort_by(|a, b| b.total_cmp(a));
    check.replay = rel(replayed.iter().zip(result.diagonal.raw()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    if check.replay > 1e-8 {
        check.failures.push(format!("replayed diagonal differs by {:e}", check.replay));
    }
    if rel(check.residual) > rel(result.residual).max(1e-12) * 10.0 + 1e-12 {
        check.failures.push(format!("replayed residual {:e} exceeds reported {:e}", check.residual, result.residual));
    }
    if check.norm_drift > 1e-9 {
        check.failures.push(format!("norm drift {:e}", check.norm_drift));
    }
    let of_point = classify(p, DEFAULT_EPS)?.label;
    let of_diag = classify_multiset(&result.diagonal, DEFAULT_EPS)?;
    if of_point != of_diag {
        check.failures.push(format!("point classifies as {of_point}, diagonal as {of_diag}"));
    }
    check.classification = Some((of_point.to_string(), of_diag.to_string()));
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn energy_examples() {
        assert_eq!(off_form_energy(&FV::normal_form(c(1.0), c(2.0), c(3.0), c(5.0))), 0.0);
        let p = FV::new(crate::jordan::JordanElement::zero(), crate::jordan::JordanElement::e(1), c(0.0), c(0.0));
        assert_eq!(off_form_energy(&p), 1.0);
        assert_eq!(residual_vector(&p).len(), 108);
    }

    #[test]
    fn spectral_path_matches_matrix_exponential() {
        let algebra = E7Algebra::shared().unwrap();
        let d = Direction::new(algebra.e7.matrices().nth(100).unwrap());
        let v = crate::lie::random_vector(&mut ChaCha8Rng::seed_from_u64(3)).to_dvector();
        let fast = d.apply(&v, 0.7);
        let slow = (algebra.e7.elements[100].matrix() * c(0.7)).exp() * &v;
        assert!((fast - slow).norm() < 1e-13);
    }

    #[test]
    fn line_search_finds_interior_minimum() {
        let (t, e) = line_search(&|t: f64| (t - 1.234).powi(2));
        assert!((t - 1.234).abs() < 1e-6 && e < 1e-12);
    }

    #[test]
    fn factor_json_round_trip() {
        let fs = [
            Factor::Basis { index: 7, t: -0.25 },
            Factor::Combination { coeffs: vec![0.5, -1.0], t: 0.125 },
            Factor::Su2(SU2Matrix::exp_generator([0.0, 1.0, 0.0], 0.5)),
        ];
        for f in fs {
            assert_eq!(Factor::from_json(&f.to_json()).unwrap(), f);
        }
    }
}
