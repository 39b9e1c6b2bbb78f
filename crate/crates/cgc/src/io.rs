//! File loading, flag parsing, and output helpers.

use std::fs;
use std::path::Path;

use cg_closure::body::ConvexBody;
use cg_closure::jsonio;
use cg_closure::numeric::{parse_rational, Int, QuadExt, Rational};
use num_traits::Zero;
use serde_json::Value;

use crate::{domain, Failure};

/// One-line sketch of the body description schema, shown on usage errors.
pub(crate) const BODY_SCHEMA: &str = concat!(
    r#"{"type":"polytope","field":m,"vertices":[[x1,y1],...]} with entries "#,
    r#""p/q" or [rat, coeff-of-sqrt(m)]; or {"type":"ball","center":[...],"radius":"p/q"}; "#,
    r#"or {"type":"ellipse","center":[...],"matrix":[[..],[..]]}"#,
);

/// Reads a file, mapping any I/O failure to a usage error.
pub(crate) fn read_text(path: &Path, what: &str, schema: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        Failure::Usage(format!(
            "cannot read {what} file {}: {e}\nexpected schema: {schema}",
            path.display()
        ))
    })
}

/// Reads and parses a JSON file.
pub(crate) fn load_json(path: &Path, what: &str, schema: &str) -> Result<Value, Failure> {
    let text = read_text(path, what, schema)?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::Usage(format!(
            "{what} file {} is not valid JSON: {e}\nexpected schema: {schema}",
            path.display()
        ))
    })
}

/// Loads a convex body description.
pub(crate) fn load_body(path: &Path) -> Result<ConvexBody, Failure> {
    let v = load_json(path, "body", BODY_SCHEMA)?;
    ConvexBody::from_json(&v).map_err(|e| domain("body", e))
}

/// Parses a vector flag of exact field elements.
///
/// The value is a JSON array of coordinates: scalars are rationals, and
/// two-entry arrays are field elements `[rational, coefficient of sqrt(m)]`.
/// A bare two-entry array of scalars whose second entry is nonzero is read
/// as a single irrational coordinate (a one-dimensional vector), so that
/// `"[0,1]"` over `Q(sqrt(2))` denotes `(sqrt(2))`.
pub(crate) fn quad_vec_flag(raw: &str, m: u64) -> Result<Vec<QuadExt>, Failure> {
    let v: Value = serde_json::from_str(raw)
        .map_err(|e| Failure::Usage(format!("flag value {raw:?} is not valid JSON: {e}")))?;
    let arr = v
        .as_array()
        .ok_or_else(|| Failure::Usage(format!("flag value {raw:?} must be a JSON array")))?;
    if m > 1 && arr.len() == 2 && arr.iter().all(|e| !e.is_array()) {
        if let Ok(q) = jsonio::quad_from_value(&v, m) {
            if !q.irr_part().is_zero() {
                return Ok(vec![q]);
            }
        }
    }
    jsonio::quad_vec_from_value(&v, m)
        .map_err(|e| Failure::Usage(format!("flag value {raw:?}: {e}")))
}

/// Parses a single exact field element from a flag.
pub(crate) fn quad_flag(raw: &str, m: u64) -> Result<QuadExt, Failure> {
    let v: Value = serde_json::from_str(raw)
        .map_err(|e| Failure::Usage(format!("flag value {raw:?} is not valid JSON: {e}")))?;
    jsonio::quad_from_value(&v, m)
        .map_err(|e| Failure::Usage(format!("flag value {raw:?}: {e}")))
}

/// Parses an integer-vector flag.
pub(crate) fn int_vec_flag(raw: &str) -> Result<Vec<Int>, Failure> {
    let v: Value = serde_json::from_str(raw)
        .map_err(|e| Failure::Usage(format!("flag value {raw:?} is not valid JSON: {e}")))?;
    jsonio::int_vec_from_value(&v)
        .map_err(|e| Failure::Usage(format!("flag value {raw:?}: {e}")))
}

/// Parses an exact rational flag such as `1/100` or `3`.
pub(crate) fn rat_flag(raw: &str) -> Result<Rational, Failure> {
    parse_rational(raw)
        .map_err(|e| Failure::Usage(format!("flag value {raw:?} is not an exact rational: {e}")))
}

/// Writes text (expected to end in a newline) to the given file, or to
/// stdout when no file is given.
pub(crate) fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| {
            Failure::Usage(format!("cannot write output file {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Pretty JSON with a trailing newline; key order is sorted and therefore
/// deterministic.
pub(crate) fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable value");
    s.push('\n');
    s
}
