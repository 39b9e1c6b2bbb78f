//! Drivers for the individual subcommands.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use cg_closure::body::ConvexBody;
use cg_closure::closure::{
    brute_force_closure, cg_closure, truncated_closure, verify_closure, ClosureError,
    ClosureResult, OracleResult,
};
use cg_closure::cuts::{cg_cut, CGCut};
use cg_closure::geometry::Polytope;
use cg_closure::homogeneity::{lift_cut, HomogeneityError};
use cg_closure::jsonio;
use cg_closure::kronecker::{approximate, residual_norm_sq};
use cg_closure::numeric::{Int, QuadExt};
use num_traits::Signed;
use serde_json::{json, Value};

use crate::io::{
    emit, int_vec_flag, load_body, load_json, pretty, quad_flag, quad_vec_flag, rat_flag,
};
use crate::resultio::{closure_result_from_json, RESULT_FORMAT};
use crate::svg::{plot2d, PlotError};
use crate::{domain, ApproxArgs, ComputeArgs, CorpusArgs, Failure, LiftArgs, Mode, PlotArgs, VerifyArgs};

/// One-line sketch of the result file schema, shown on usage errors.
const RESULT_SCHEMA: &str =
    r#"{"format":"cg-closure-result","mode":"exact","body":{...},"result":{...}}"#;

/// One-line sketch of the corpus instance schema.
const INSTANCE_SCHEMA: &str =
    r#"{"body":{...},"mode":"exact"|"oracle","bound":B,"expected":{"empty":true}|{"vertices":[...]}}"#;

/// A finished computation of either mode.
enum Computed {
    Exact(ClosureResult),
    Oracle(OracleResult),
}

impl Computed {
    /// The computed closure polytope, `None` when empty.
    fn closure(&self) -> Option<&Polytope> {
        match self {
            Computed::Exact(r) => r.closure.as_ref(),
            Computed::Oracle(r) => (!r.polytope.is_empty()).then_some(&r.polytope),
        }
    }

    /// Number of cuts backing the result (enumeration size for the oracle).
    fn summary(&self) -> String {
        match self {
            Computed::Exact(r) => format!("{} cuts", r.defining_cuts.len()),
            Computed::Oracle(r) => format!("oracle bound {}", r.bound),
        }
    }
}

/// Runs the requested computation on a loaded body.
fn compute_body(body: &ConvexBody, mode: Mode, bound: u32) -> Result<Computed, Failure> {
    match mode {
        Mode::Exact => Ok(Computed::Exact(
            cg_closure(body).map_err(|e| domain("closure", e))?,
        )),
        Mode::Oracle => Ok(Computed::Oracle(
            brute_force_closure(body, bound).map_err(|e| domain("closure", e))?,
        )),
    }
}

/// The deterministic result document for a computation.
fn computed_json(body: &ConvexBody, computed: &Computed) -> Value {
    match computed {
        Computed::Exact(r) => json!({
            "format": RESULT_FORMAT,
            "mode": "exact",
            "body": body.to_json(),
            "result": r.to_json(),
        }),
        Computed::Oracle(r) => json!({
            "format": RESULT_FORMAT,
            "mode": "oracle",
            "body": body.to_json(),
            "bound": r.bound,
            "result": r.to_json(),
        }),
    }
}

pub(crate) fn compute(args: &ComputeArgs) -> Result<(), Failure> {
    let body = load_body(&args.body)?;
    let started = Instant::now();
    let computed = compute_body(&body, args.mode, args.bound)?;
    eprintln!("computed in {} ms", started.elapsed().as_millis());
    emit(&pretty(&computed_json(&body, &computed)), args.out.as_deref())
}

pub(crate) fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let body = load_body(&args.body)?;
    let host = body
        .as_polytope()
        .ok_or_else(|| domain("closure", ClosureError::PolytopeOnly))?;
    let doc = load_json(&args.result, "result", RESULT_SCHEMA)?;
    let format = doc.get("format").and_then(Value::as_str);
    if format != Some(RESULT_FORMAT) {
        return Err(Failure::Usage(format!(
            "{} is not a result file\nexpected schema: {RESULT_SCHEMA}",
            args.result.display()
        )));
    }
    if doc.get("mode").and_then(Value::as_str) != Some("exact") {
        return Err(Failure::Usage(
            "only exact-mode results carry verifiable certificates; \
             recompute with --mode exact"
                .to_string(),
        ));
    }
    let result_v = doc.get("result").ok_or_else(|| {
        Failure::Usage(format!("result file misses \"result\"\nexpected schema: {RESULT_SCHEMA}"))
    })?;
    let result = closure_result_from_json(result_v, host)
        .map_err(|e| Failure::Usage(format!("malformed result file: {e}")))?;
    let report = verify_closure(&result, &body, args.bound).map_err(|e| domain("closure", e))?;
    emit(&pretty(&report.to_json()), None)?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        Err(Failure::Domain {
            module: "closure",
            message: format!("VerificationFailed: checks failed: {}", failed.join(", ")),
        })
    }
}

pub(crate) fn kronecker_approx(args: &ApproxArgs) -> Result<(), Failure> {
    let pi = quad_vec_flag(&args.pi, args.field)?;
    if pi.iter().all(QuadExt::is_zero) {
        return Err(Failure::Usage("the target vector --pi must be nonzero".to_string()));
    }
    let eps = rat_flag(&args.eps)?;
    if !eps.is_positive() {
        return Err(Failure::Usage("--eps must be a positive rational".to_string()));
    }
    let n0 = Int::from(args.n0);
    let (a, n) = approximate(&pi, &eps, &n0).map_err(|e| domain("kronecker", e))?;
    let residual = residual_norm_sq(&pi, &a, &n);
    let eps_sq = QuadExt::rational(&eps * &eps, args.field);
    let doc = json!({
        "a": jsonio::int_vec_to_value(&a),
        "N": jsonio::int_to_value(&n),
        "residual_norm_sq": jsonio::quad_to_value(&residual),
        "eps": jsonio::rat_to_value(&eps),
        "certified": residual < eps_sq,
    });
    emit(&format!("{doc}\n"), None)
}

pub(crate) fn homogeneity_lift(args: &LiftArgs) -> Result<(), Failure> {
    let body = load_body(&args.body)?;
    let host = body
        .as_polytope()
        .ok_or_else(|| domain("homogeneity", HomogeneityError::PolytopeOnly))?;
    let m = host.field_index();
    let normal = quad_vec_flag(&args.face_normal, m)?;
    let face = host.pi_face(&normal).map_err(|e| domain("geometry", e))?;
    let c = int_vec_flag(&args.cut)?;
    if c.len() != host.ambient_dim() {
        return Err(Failure::Usage(format!(
            "--cut has {} entries but the body lives in dimension {}",
            c.len(),
            host.ambient_dim()
        )));
    }
    let delta = match &args.delta {
        Some(raw) => quad_flag(raw, m)?,
        None => {
            let dir: Vec<QuadExt> =
                c.iter().map(|k| QuadExt::integer(k.clone(), m)).collect();
            face.polytope.support(&dir)
        }
    };
    let certificate = lift_cut(&body, &face, &c, &delta).map_err(|e| domain("homogeneity", e))?;
    emit(&pretty(&certificate.to_json()), args.out.as_deref())
}

pub(crate) fn plot(args: &PlotArgs) -> Result<(), Failure> {
    let body = load_body(&args.body)?;
    let dim = body.ambient_dim();
    if dim != 2 {
        return Err(domain("plot", PlotError::NotPlottable { dim }));
    }
    let (cuts, closure) = match args.mode {
        Mode::Oracle => {
            let b = args.bound as i64;
            let mut cuts = Vec::new();
            let mut c = [-b, -b];
            loop {
                if c != [0, 0] {
                    let normal = vec![Int::from(c[0]), Int::from(c[1])];
                    cuts.push(cg_cut(&body, &normal).map_err(|e| domain("cuts", e))?);
                }
                if !advance(&mut c, b) {
                    break;
                }
            }
            let truncated = truncated_closure(&body, args.bound.max(1))
                .map_err(|e| domain("closure", e))?;
            (cuts, (!truncated.is_empty()).then_some(truncated))
        }
        Mode::Exact => {
            let result = cg_closure(&body).map_err(|e| domain("closure", e))?;
            (result.defining_cuts.iter().collect::<Vec<CGCut>>(), result.closure)
        }
    };
    let svg = plot2d(&body, &cuts, closure.as_ref()).map_err(|e| domain("plot", e))?;
    emit(&svg, args.out.as_deref())
}

/// Lexicographic odometer over `[-b, b]^2`.
fn advance(c: &mut [i64; 2], b: i64) -> bool {
    for i in (0..2).rev() {
        if c[i] < b {
            c[i] += 1;
            for entry in c.iter_mut().skip(i + 1) {
                *entry = -b;
            }
            return true;
        }
    }
    false
}

/// Outcome of one corpus instance.
struct Outcome {
    stem: String,
    line: String,
    ok: bool,
    doc: Value,
}

pub(crate) fn corpus_run(args: &CorpusArgs) -> Result<(), Failure> {
    let instance_dir = args.dir.join("instances");
    let expected_dir = args.dir.join("expected");
    let mut paths: Vec<PathBuf> = fs::read_dir(&instance_dir)
        .map_err(|e| {
            Failure::Usage(format!(
                "cannot read corpus directory {}: {e}",
                instance_dir.display()
            ))
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Usage(format!(
            "no instances/*.json files under {}",
            args.dir.display()
        )));
    }

    let threads = std::env::var("CG_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
        .min(paths.len());

    let slots: Mutex<Vec<Option<Outcome>>> = Mutex::new((0..paths.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= paths.len() {
                    break;
                }
                let outcome = run_instance(&paths[i], &expected_dir);
                slots.lock().expect("corpus worker panicked")[i] = Some(outcome);
            });
        }
    });
    let outcomes: Vec<Outcome> = slots
        .into_inner()
        .expect("corpus worker panicked")
        .into_iter()
        .map(|o| o.expect("every instance index is filled"))
        .collect();

    if let Some(out_dir) = &args.out_dir {
        fs::create_dir_all(out_dir).map_err(|e| {
            Failure::Usage(format!("cannot create output directory {}: {e}", out_dir.display()))
        })?;
        for outcome in &outcomes {
            if !outcome.doc.is_null() {
                let path = out_dir.join(format!("{}.json", outcome.stem));
                fs::write(&path, pretty(&outcome.doc)).map_err(|e| {
                    Failure::Usage(format!("cannot write {}: {e}", path.display()))
                })?;
            }
        }
    }

    let mut failed = 0usize;
    for outcome in &outcomes {
        println!("{}", outcome.line);
        if !outcome.ok {
            failed += 1;
        }
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Domain {
            module: "corpus",
            message: format!(
                "InstanceFailures: {failed} of {} instances failed",
                outcomes.len()
            ),
        })
    }
}

/// Runs one corpus instance file and renders its report line.
fn run_instance(path: &Path, expected_dir: &Path) -> Outcome {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    match instance_outcome(path, expected_dir, &stem) {
        Ok(outcome) => outcome,
        Err(message) => Outcome {
            line: format!("{stem}: error: {message}"),
            stem,
            ok: false,
            doc: Value::Null,
        },
    }
}

fn instance_outcome(path: &Path, expected_dir: &Path, stem: &str) -> Result<Outcome, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| format!("invalid JSON: {e}; expected schema: {INSTANCE_SCHEMA}"))?;
    let body_v = doc
        .get("body")
        .ok_or_else(|| format!("missing \"body\"; expected schema: {INSTANCE_SCHEMA}"))?;
    let body = ConvexBody::from_json(body_v).map_err(|e| e.to_string())?;
    let mode = match doc.get("mode").and_then(Value::as_str).unwrap_or("exact") {
        "exact" => Mode::Exact,
        "oracle" => Mode::Oracle,
        other => return Err(format!("unknown mode {other:?}")),
    };
    let bound = doc.get("bound").and_then(Value::as_u64).unwrap_or(3) as u32;
    let computed = compute_body(&body, mode, bound).map_err(|f| match f {
        Failure::Usage(m) => m,
        Failure::Domain { module, message } => format!("{module}: {message}"),
    })?;

    let expected = match load_expected(&doc, expected_dir, stem)? {
        Some(exp) => exp,
        None => {
            let line = format!("{stem}: ok ({}, no expectation)", describe(&computed));
            return Ok(Outcome {
                stem: stem.to_string(),
                line,
                ok: true,
                doc: computed_json(&body, &computed),
            });
        }
    };
    let matches = expectation_matches(&expected, computed.closure(), body.field_index())?;
    let line = if matches {
        format!("{stem}: ok ({}, {})", describe(&computed), computed.summary())
    } else {
        format!(
            "{stem}: mismatch: computed {} but expected {}",
            describe(&computed),
            describe_expected(&expected)
        )
    };
    Ok(Outcome {
        stem: stem.to_string(),
        line,
        ok: matches,
        doc: computed_json(&body, &computed),
    })
}

/// The expectation block: from the instance itself or the expected/ twin.
fn load_expected(
    doc: &Value,
    expected_dir: &Path,
    stem: &str,
) -> Result<Option<Value>, String> {
    let twin = expected_dir.join(format!("{stem}.json"));
    if twin.is_file() {
        let text = fs::read_to_string(&twin).map_err(|e| e.to_string())?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| format!("invalid JSON in {}: {e}", twin.display()))?;
        return Ok(Some(v));
    }
    Ok(doc.get("expected").cloned())
}

/// Exact comparison of a computed closure against an expectation block.
fn expectation_matches(
    expected: &Value,
    closure: Option<&Polytope>,
    field: u64,
) -> Result<bool, String> {
    if expected.get("empty").and_then(Value::as_bool) == Some(true) {
        return Ok(closure.is_none());
    }
    let rows = expected
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| {
            format!("expectation needs \"empty\":true or \"vertices\"; got {expected}")
        })?;
    let Some(p) = closure else {
        return Ok(false);
    };
    let mut want = rows
        .iter()
        .map(|row| jsonio::quad_vec_from_value(row, field))
        .collect::<Result<Vec<_>, _>>()?;
    let mut got = p.vertices().to_vec();
    want.sort();
    got.sort();
    Ok(want == got)
}

fn describe(computed: &Computed) -> String {
    match computed.closure() {
        None => "empty closure".to_string(),
        Some(p) => format!("{} vertices", p.vertices().len()),
    }
}

fn describe_expected(expected: &Value) -> String {
    if expected.get("empty").and_then(Value::as_bool) == Some(true) {
        "empty closure".to_string()
    } else {
        match expected.get("vertices").and_then(Value::as_array) {
            Some(rows) => format!("{} vertices", rows.len()),
            None => "malformed expectation".to_string(),
        }
    }
}
