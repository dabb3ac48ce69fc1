//! JSON formats.
//!
//! Complex numbers are `[re, im]`: doubles in float mode, `"p/q"` strings in
//! exact mode (plain JSON numbers are also accepted on input). A bioctonion is
//! an array of 8 complex numbers, a Jordan element `{"d": [3], "x": [3 × 8]}`,
//! a Freudenthal vector `{"X", "Y", "xi", "eta"}`. An element file adds
//! `"mode": "exact" | "float"` and may use the shorthand
//! `{"diag": [r1, r2, r3, r]}` for `(diag(r1, r2, r3), 0, r, 0)`.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::freudenthal::{FreudenthalVector, LieElement};
use crate::jordan::{JordanElement, JORDAN_DIM};
use crate::octonion::Octonion;
use crate::scalar::{format_rational, parse_rational, Exact, Float, Scalar};

/// Scalars with a JSON representation.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

fn parse_err(what: &str, v: &Value) -> Error {
    Error::Parse(format!("expected {what}, got {v}"))
}

fn real_f64(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| parse_err("a number", v)),
        Value::String(s) => {
            parse_rational(s).and_then(|r| r.to_f64()).ok_or_else(|| parse_err("a number", v))
        }
        _ => Err(parse_err("a number", v)),
    }
}

fn real_exact(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| parse_err("a rational", v)),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(i.into()))
            } else {
                parse_rational(&n.to_string()).ok_or_else(|| parse_err("a rational", v))
            }
        }
        _ => Err(parse_err("a rational", v)),
    }
}

/// `[re, im]` or a bare real.
fn complex_parts(v: &Value) -> Result<(&Value, Option<&Value>)> {
    match v {
        Value::Array(a) if a.len() == 2 => Ok((&a[0], Some(&a[1]))),
        Value::Number(_) | Value::String(_) => Ok((v, None)),
        _ => Err(parse_err("[re, im] or a real number", v)),
    }
}

impl JsonScalar for Float {
    fn to_json(&self) -> Value {
        json!([self.re, self.im])
    }

    fn from_json(v: &Value) -> Result<Self> {
        let (re, im) = complex_parts(v)?;
        Ok(Float::new(real_f64(re)?, im.map(real_f64).transpose()?.unwrap_or(0.0)))
    }
}

impl JsonScalar for Exact {
    fn to_json(&self) -> Value {
        json!([format_rational(&self.re), format_rational(&self.im)])
    }

    fn from_json(v: &Value) -> Result<Self> {
        let (re, im) = complex_parts(v)?;
        let im = im.map(real_exact).transpose()?.unwrap_or_else(BigRational::zero);
        Ok(Complex::new(real_exact(re)?, im))
    }
}

fn array<'a>(v: &'a Value, len: usize, what: &str) -> Result<&'a Vec<Value>> {
    match v {
        Value::Array(a) if a.len() == len => Ok(a),
        _ => Err(parse_err(&format!("{what} (array of {len})"), v)),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field \"{key}\"")))
}

pub fn octonion_to_json<S: JsonScalar>(o: &Octonion<S>) -> Value {
    Value::Array(o.c.iter().map(JsonScalar::to_json).collect())
}

pub fn octonion_from_json<S: JsonScalar>(v: &Value) -> Result<Octonion<S>> {
    let a = array(v, 8, "bioctonion")?;
    let c: Vec<S> = a.iter().map(S::from_json).collect::<Result<_>>()?;
    Ok(Octonion::new(c.try_into().expect("length checked")))
}

pub fn jordan_to_json<S: JsonScalar>(x: &JordanElement<S>) -> Value {
    json!({
        "d": x.d.iter().map(JsonScalar::to_json).collect::<Vec<_>>(),
        "x": x.x.iter().map(octonion_to_json).collect::<Vec<_>>(),
    })
}

pub fn jordan_from_json<S: JsonScalar>(v: &Value) -> Result<JordanElement<S>> {
    let d = array(field(v, "d")?, 3, "diagonal")?;
    let x = array(field(v, "x")?, 3, "off-diagonal")?;
    let d: Vec<S> = d.iter().map(S::from_json).collect::<Result<_>>()?;
    let x: Vec<Octonion<S>> = x.iter().map(octonion_from_json).collect::<Result<_>>()?;
    Ok(JordanElement { d: d.try_into().expect("length checked"), x: x.try_into().expect("length checked") })
}

pub fn vector_to_json<S: JsonScalar>(p: &FreudenthalVector<S>) -> Value {
    json!({
        "X": jordan_to_json(&p.x),
        "Y": jordan_to_json(&p.y),
        "xi": p.xi.to_json(),
        "eta": p.eta.to_json(),
    })
}

pub fn vector_from_json<S: JsonScalar>(v: &Value) -> Result<FreudenthalVector<S>> {
    if let Some(d) = v.get("diag") {
        let d = array(d, 4, "diag")?;
        let d: Vec<S> = d.iter().map(S::from_json).collect::<Result<_>>()?;
        let [a, b, c, r]: [S; 4] = d.try_into().expect("length checked");
        return Ok(FreudenthalVector::normal_form(a, b, c, r));
    }
    Ok(FreudenthalVector::new(
        jordan_from_json(field(v, "X")?)?,
        jordan_from_json(field(v, "Y")?)?,
        S::from_json(field(v, "xi")?)?,
        S::from_json(field(v, "eta")?)?,
    ))
}

/// `{"phi": 27 × 27 rows, "A", "B", "nu"}`.
pub fn lie_element_to_json<S: JsonScalar>(e: &LieElement<S>) -> Value {
    let rows: Vec<Vec<Value>> = (0..JORDAN_DIM)
        .map(|i| (0..JORDAN_DIM).map(|j| e.phi.get(i, j).to_json()).collect())
        .collect();
    json!({ "phi": rows, "A": jordan_to_json(&e.a), "B": jordan_to_json(&e.b), "nu": e.nu.to_json() })
}

pub fn lie_element_from_json<S: JsonScalar>(v: &Value) -> Result<LieElement<S>> {
    let rows = array(field(v, "phi")?, JORDAN_DIM, "phi rows")?;
    let mut m = Vec::with_capacity(JORDAN_DIM * JORDAN_DIM);
    for row in rows {
        for z in array(row, JORDAN_DIM, "phi row")? {
            m.push(S::from_json(z)?);
        }
    }
    Ok(LieElement::new(
        crate::jordan::JordanOperator { m },
        jordan_from_json(field(v, "A")?)?,
        jordan_from_json(field(v, "B")?)?,
        S::from_json(field(v, "nu")?)?,
    ))
}

/// Values substituted for the symbols `r`, `s`, `t` in patterns.
pub const DEFAULT_SYMBOLS: [(char, i64); 3] = [('r', 2), ('s', 3), ('t', 5)];

/// Parse `"(r1, r2, r3; r)"` (parentheses optional, `,` `;` or blanks as
/// separators). Entries are rationals or the symbols `r`, `s`, `t`.
pub fn parse_pattern(text: &str) -> Result<[BigRational; 4]> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = inner.split([',', ';', ' ']).map(str::trim).filter(|p| !p.is_empty()).collect();
    if parts.len() != 4 {
        return Err(Error::Parse(format!("pattern \"{text}\" needs four entries")));
    }
    let entry = |p: &str| -> Result<BigRational> {
        if let Some(&(_, v)) = DEFAULT_SYMBOLS.iter().find(|(c, _)| p.len() == 1 && p.starts_with(*c)) {
            return Ok(BigRational::from_integer(v.into()));
        }
        parse_rational(p).ok_or_else(|| Error::Parse(format!("bad pattern entry \"{p}\"")))
    };
    let v: Vec<BigRational> = parts.into_iter().map(entry).collect::<Result<_>>()?;
    if v.iter().any(|x| x < &BigRational::zero()) {
        return Err(Error::Parse(format!("pattern \"{text}\" has a negative entry")));
    }
    Ok(v.try_into().expect("four entries"))
}

/// Exact normal form of a pattern.
pub fn pattern_vector(e: &[BigRational; 4]) -> FreudenthalVector<Exact> {
    let [a, b, c, r] = e.clone().map(|x| Complex::new(x, BigRational::zero()));
    FreudenthalVector::normal_form(a, b, c, r)
}

pub fn pattern_floats(e: &[BigRational; 4]) -> [f64; 4] {
    e.clone().map(|x| x.to_f64().unwrap_or(f64::NAN))
}

/// `(r1, r2, r3; r)` notation.
pub fn format_pattern(e: &[BigRational; 4]) -> String {
    let f: Vec<String> = e.iter().map(format_rational).collect();
    format!("({}, {}, {}; {})", f[0], f[1], f[2], f[3])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }

    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            _ => Err(Error::Parse(format!("unknown mode \"{s}\" (expected exact or float)"))),
        }
    }
}

/// A Freudenthal vector read from or written to disk.
#[derive(Clone, Debug, PartialEq)]
pub enum ElementFile {
    Exact(FreudenthalVector<Exact>),
    Float(FreudenthalVector<Float>),
}

impl ElementFile {
    pub fn mode(&self) -> Mode {
        match self {
            ElementFile::Exact(_) => Mode::Exact,
            ElementFile::Float(_) => Mode::Float,
        }
    }

    /// Missing `"mode"` means float unless `force` says otherwise.
    pub fn from_value(v: &Value, force: Option<Mode>) -> Result<Self> {
        let declared = match v.get("mode") {
            Some(Value::String(s)) => Some(Mode::parse(s)?),
            Some(other) => return Err(parse_err("a mode string", other)),
            None => None,
        };
        match force.or(declared).unwrap_or(Mode::Float) {
            Mode::Exact => Ok(ElementFile::Exact(vector_from_json(v)?)),
            Mode::Float => Ok(ElementFile::Float(vector_from_json(v)?)),
        }
    }

    pub fn parse(text: &str, force: Option<Mode>) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_value(&v, force)
    }

    pub fn to_value(&self) -> Value {
        let mut v = match self {
            ElementFile::Exact(p) => vector_to_json(p),
            ElementFile::Float(p) => vector_to_json(p),
        };
        v["mode"] = json!(self.mode().name());
        v
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("JSON values serialize")
    }

    pub fn to_float(&self) -> FreudenthalVector<Float> {
        match self {
            ElementFile::Exact(p) => p.to_float(),
            ElementFile::Float(p) => p.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::exact;

    #[test]
    fn patterns() {
        let p = parse_pattern("(1, 1, r; s)").unwrap();
        assert_eq!(format_pattern(&p), "(1, 1, 2; 3)");
        assert_eq!(format_pattern(&parse_pattern("1/2 0 t 1").unwrap()), "(1/2, 0, 5; 1)");
        assert!(parse_pattern("(1, 2, 3)").is_err());
        assert!(parse_pattern("(1, -2, 3; 4)").is_err());
        assert!(parse_pattern("(1, x, 3; 4)").is_err());
    }

    #[test]
    fn diag_shorthand() {
        let f = ElementFile::parse(r#"{"diag": [1, "1/2", 0, 3], "mode": "exact"}"#, None).unwrap();
        let want = FreudenthalVector::<Exact>::normal_form_ratio([(1, 1), (1, 2), (0, 1), (3, 1)]);
        assert_eq!(f, ElementFile::Exact(want));
    }

    #[test]
    fn exact_round_trip() {
        let mut p = FreudenthalVector::<Exact>::normal_form_ratio([(1, 3), (2, 1), (-5, 7), (1, 1)]);
        p.y.x[1].c[6] = exact((2, 9), (-1, 4));
        p.eta = exact((0, 1), (7, 3));
        let f = ElementFile::Exact(p);
        assert_eq!(ElementFile::parse(&f.to_string_pretty(), None).unwrap(), f);
    }

    #[test]
    fn float_round_trip_is_bitwise() {
        let coords: Vec<Float> =
            (0..crate::freudenthal::DIM).map(|i| Float::new((i as f64 + 0.1).sqrt(), 1.0 / (i as f64 + 3.0))).collect();
        let f = ElementFile::Float(FreudenthalVector::from_coords(&coords));
        let back = ElementFile::parse(&f.to_string_pretty(), None).unwrap();
        for (a, b) in back.to_float().coords().iter().zip(&coords) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_malformed() {
        assert!(ElementFile::parse(r#"{"diag": [1, 2, 3]}"#, None).is_err());
        assert!(ElementFile::parse(r#"{"diag": [1, 2, 3, 4], "mode": "fuzzy"}"#, None).is_err());
        assert!(ElementFile::parse(r#"{"X": {}}"#, None).is_err());
        assert!(ElementFile::parse("not json", None).is_err());
    }

    #[test]
    fn lie_element_round_trip() {
        let p = FreudenthalVector::<Exact>::normal_form_ratio([(1, 1), (2, 1), (3, 1), (5, 1)]);
        let e = crate::freudenthal::cross_p(&p, &p.tau_lambda());
        let back: LieElement<Exact> = lie_element_from_json(&lie_element_to_json(&e)).unwrap();
        assert_eq!(back, e);
    }
}
