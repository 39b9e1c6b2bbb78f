//! Round-trip of computed result files back into library structures.

use cg_closure::closure::{ClosureResult, FaceNode};
use cg_closure::cuts::CutPool;
use cg_closure::geometry::Polytope;
use cg_closure::jsonio;
use serde_json::Value;

/// Identifier stored in the `format` field of every result file.
pub(crate) const RESULT_FORMAT: &str = "cg-closure-result";

/// Rebuilds a polytope from the `vertices` block of a result file; the dual
/// description is recomputed exactly, so the parsed polytope is canonical.
fn polytope_from_json(v: &Value, m: u64) -> Result<Polytope, String> {
    let rows = jsonio::field(v, "vertices")?
        .as_array()
        .ok_or_else(|| "vertices must be an array".to_string())?;
    if rows.is_empty() {
        return Err("a stored polytope needs at least one vertex".to_string());
    }
    let points = rows
        .iter()
        .map(|row| jsonio::quad_vec_from_value(row, m))
        .collect::<Result<Vec<_>, _>>()?;
    Polytope::from_vertices(m, points).map_err(|e| e.to_string())
}

/// Rebuilds a closure result from its JSON form, relative to the polytope
/// (`host`) whose closure it claims to be.
///
/// Recursion faces are reconstructed exactly from their stored directions
/// via the host's face oracle; certificate logs are not needed for
/// verification and are left empty.
pub(crate) fn closure_result_from_json(
    v: &Value,
    host: &Polytope,
) -> Result<ClosureResult, String> {
    let m = host.field_index();
    let closure = match v.get("closure") {
        None | Some(Value::Null) => None,
        Some(c) => Some(polytope_from_json(c, m)?),
    };
    let defining_cuts = CutPool::from_json(jsonio::field(v, "defining_cuts")?)?;
    let mut recursion_tree = Vec::new();
    if let Some(nodes) = v.get("recursion_tree").and_then(Value::as_array) {
        for node in nodes {
            let face_v = jsonio::field(node, "face")?;
            let dir = jsonio::quad_vec_from_value(jsonio::field(face_v, "direction")?, m)?;
            let face = host.pi_face(&dir).map_err(|e| e.to_string())?;
            let sub = closure_result_from_json(jsonio::field(node, "result")?, &face.polytope)?;
            recursion_tree.push(FaceNode { face, result: sub });
        }
    }
    Ok(ClosureResult {
        closure,
        defining_cuts,
        certificate_log: Vec::new(),
        recursion_tree,
    })
}
