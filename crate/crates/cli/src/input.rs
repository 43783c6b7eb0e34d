//! JSON input: a top-level object holding exactly one of
//!
//! ```json
//! {"coeffs": [[re, im], ...]}
//! {"rational": {"A": [[re, im], ...], "B": [[re, im], ...], "d": 3}}
//! ```
//!
//! Complex numbers are `[re, im]` pairs. Errors carry the JSON pointer of the
//! offending value.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};
use szego_core::rational::default_modes;
use szego_core::{rational_to_coeffs, HardyFunction, RationalSymbol, SobolevIndex, C64};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum InputData {
    Coeffs(HardyFunction),
    Rational(RationalSymbol),
}

impl InputData {
    /// Coefficients of the datum. Rational data are expanded until the H¹
    /// tail is below 1e−12, with at least `min_modes` coefficients.
    pub fn coefficients(&self, min_modes: usize) -> HardyFunction {
        match self {
            Self::Coeffs(u) => u.clone(),
            Self::Rational(r) => {
                let s = SobolevIndex::new(1.0).expect("valid index");
                rational_to_coeffs(r, default_modes(r, s, 1e-12, min_modes))
            }
        }
    }
}

pub fn parse_input(path: &Path) -> CliResult<InputData> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse_input_str(&text)
}

pub fn parse_input_str(text: &str) -> CliResult<InputData> {
    let root: Value = serde_json::from_str(text).map_err(|e| CliError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = as_object(&root, "")?;
    check_keys(obj, "", &["coeffs", "rational"])?;
    match (obj.get("coeffs"), obj.get("rational")) {
        (Some(c), None) => {
            let coeffs = complex_array(c, "/coeffs")?;
            HardyFunction::new(coeffs)
                .map(InputData::Coeffs)
                .map_err(|source| CliError::Invalid { pointer: "/coeffs".into(), source })
        }
        (None, Some(r)) => parse_rational(r).map(InputData::Rational),
        (Some(_), Some(_)) => {
            Err(CliError::schema("", "expected exactly one of \"coeffs\" or \"rational\", found both"))
        }
        (None, None) => Err(CliError::schema("", "expected exactly one of \"coeffs\" or \"rational\"")),
    }
}

fn parse_rational(v: &Value) -> CliResult<RationalSymbol> {
    let obj = as_object(v, "/rational")?;
    check_keys(obj, "/rational", &["A", "B", "d"])?;
    let field =
        |key: &str| obj.get(key).ok_or_else(|| CliError::schema("/rational", format!("missing field \"{key}\"")));
    let a = complex_array(field("A")?, "/rational/A")?;
    let b = complex_array(field("B")?, "/rational/B")?;
    let d = field("d")?
        .as_u64()
        .and_then(|d| usize::try_from(d).ok())
        .ok_or_else(|| CliError::schema("/rational/d", "expected a nonnegative integer"))?;
    RationalSymbol::new(a, b, d).map_err(|source| CliError::Invalid { pointer: "/rational".into(), source })
}

fn as_object<'a>(v: &'a Value, pointer: &str) -> CliResult<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| CliError::schema(pointer, format!("expected an object, found {}", kind(v))))
}

fn check_keys(obj: &Map<String, Value>, pointer: &str, allowed: &[&str]) -> CliResult<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::schema(format!("{pointer}/{}", escape(k)), "unknown field")),
        None => Ok(()),
    }
}

fn complex_array(v: &Value, pointer: &str) -> CliResult<Vec<C64>> {
    let items =
        v.as_array().ok_or_else(|| CliError::schema(pointer, format!("expected an array, found {}", kind(v))))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let at = format!("{pointer}/{i}");
            let pair = item
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| CliError::schema(&at, "expected a [re, im] pair"))?;
            let part =
                |j: usize| pair[j].as_f64().ok_or_else(|| CliError::schema(format!("{at}/{j}"), "expected a number"));
            Ok(C64::new(part(0)?, part(1)?))
        })
        .collect()
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

/// RFC 6901 escaping of a pointer token.
fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

/// Random datum of V(3) or V(4) with ‖u₀‖ = 1: B has d/2 inverse roots of
/// modulus in [0.1, 0.7], A is linear with uniform complex coefficients.
pub fn random_datum(seed: u64) -> InputData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.gen_range(3..=4usize);
    let mut complex = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    loop {
        let a = vec![complex(), complex()];
        let mut b = vec![C64::new(1.0, 0.0)];
        for _ in 0..d / 2 {
            let z = complex();
            let beta = C64::from_polar(0.1 + 0.6 * z.re.abs(), std::f64::consts::PI * z.im);
            b.push(C64::new(0.0, 0.0));
            for k in (1..b.len()).rev() {
                b[k] = b[k] - beta * b[k - 1];
            }
        }
        let Ok(r) = RationalSymbol::new(a.clone(), b.clone(), d) else { continue };
        let norm = rational_to_coeffs(&r, 400).norm_l2();
        if let Ok(r) = RationalSymbol::new(a.iter().map(|c| c / norm).collect(), b, d) {
            return InputData::Rational(r);
        }
    }
}
