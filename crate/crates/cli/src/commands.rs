//! Subcommand bodies. Each returns a JSON report; the binary handles I/O and exit codes.

use std::collections::BTreeSet;
use std::path::Path;

use orichain::chains::{project_to_oriented, Chain, SimplicialComplex};
use orichain::gluing::{
    build_cobordism, check_phi_psi_identity, extract_cobordism, extract_face_pairing, glue, glue_open, FaceSlot, GluedComplex, GluingError,
};
use orichain::homology::{homology, relative_homology, verify_mv_vanishing, ChainModel, HomologyError};
use orichain::prism::{verify_homotopy_identity, LinearMapSimplex, SPrimeGenerator};
use orichain::simplex::{project_to_face, region_contains, BaryPoint, Permutation, Rational, RegionSpec};
use orichain::smoothing::{sup_distance, SmoothingMap};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{exit, CliError};
use crate::format::{format_float, format_rational, parse_weight, CoverExpectation, LabelMap, Payload, ProblemFile};
use crate::off::to_off;

pub const DEFAULT_MAX_DIM: usize = 6;
pub const SMOOTHING_TOLERANCE: f64 = 1e-12;

/// A finished command: its report and the exit code it asks for.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self { report, exit_code: exit::OK, warnings: Vec::new() }
    }
}

fn model_name(model: ChainModel) -> &'static str {
    match model {
        ChainModel::Oriented => "oriented",
        ChainModel::Ordered => "ordered",
    }
}

fn homology_error(e: HomologyError) -> CliError {
    match e {
        HomologyError::NotSubcomplex => CliError::NotSubcomplex,
        HomologyError::CoverMismatch => CliError::VerifyFailed("the cover does not union to the complex".into()),
        other => CliError::Internal(other.to_string()),
    }
}

fn gluing_error(e: GluingError, labels: &LabelMap) -> CliError {
    match e {
        GluingError::NotACycle { residue } => CliError::NotACycle { residue: labels.oriented_text(&residue) },
        GluingError::BoundaryMismatch { residue } => CliError::BoundaryMismatch { residue: labels.oriented_text(&residue) },
        other => CliError::Internal(other.to_string()),
    }
}

type Simplices = Vec<Vec<crate::format::Label>>;

fn complex_of(file: &ProblemFile) -> Result<(&Simplices, Option<&Simplices>), CliError> {
    match &file.payload {
        Payload::Complex { simplices, subcomplex, .. } => Ok((simplices, subcomplex.as_ref())),
        _ => Err(CliError::Schema(format!("expected a complex, got kind {:?}", file.kind()))),
    }
}

/// Integral homology, absolute or relative to the file's `subcomplex` (or `extra`).
pub fn homology_cmd(file: &ProblemFile, model: ChainModel, extra: Option<&ProblemFile>) -> Result<Outcome, CliError> {
    let (simplices, inline_sub) = complex_of(file)?;
    let extra_sub = extra.map(complex_of).transpose()?.map(|(s, _)| s);
    if inline_sub.is_some() && extra_sub.is_some() {
        return Err(CliError::Schema("subcomplex given both inline and as a separate file".into()));
    }
    let mut labels = file.label_map()?.labels().to_vec();
    if let Some(e) = extra {
        labels.extend(e.label_map()?.labels().iter().cloned());
    }
    let labels = LabelMap::new(labels);
    let k = labels.complex(simplices)?;
    let sub = inline_sub.or(extra_sub).map(|s| labels.complex(s)).transpose()?;
    let groups = match &sub {
        Some(a) => relative_homology(&k, a, model),
        None => homology(&k, model),
    }
    .map_err(homology_error)?;
    let table: Vec<Value> = groups
        .iter()
        .enumerate()
        .map(|(d, g)| json!({ "degree": d, "group": g.to_string(), "free_rank": g.free_rank(), "torsion": g.torsion() }))
        .collect();
    Ok(Outcome::ok(json!({
        "command": "homology",
        "model": model_name(model),
        "relative": sub.is_some(),
        "f_vector": k.f_vector(),
        "euler_characteristic": k.euler_characteristic(),
        "groups": table,
    })))
}

fn slot_json(s: FaceSlot) -> Value {
    json!({ "cell": s.cell, "face": s.face })
}

fn chain_and_complex(file: &ProblemFile) -> Result<(LabelMap, Chain, Option<SimplicialComplex>), CliError> {
    let (chain, complex) = match &file.payload {
        Payload::Chain { chain, complex, .. } | Payload::Cycle { chain, complex, .. } => (chain, complex),
        _ => return Err(CliError::Schema(format!("expected a chain or cycle, got kind {:?}", file.kind()))),
    };
    let labels = file.label_map()?;
    let c = labels.chain(chain, None)?;
    let k = complex.as_ref().map(|s| labels.complex(s)).transpose()?;
    Ok((labels, c, k))
}

fn support_complex(c: &Chain) -> Result<SimplicialComplex, CliError> {
    let supports: BTreeSet<Vec<usize>> = c.terms().map(|(s, _)| s.support()).collect();
    SimplicialComplex::from_maximal(supports.into_iter().collect::<Vec<_>>()).map_err(|e| CliError::Internal(e.to_string()))
}

/// Result of `glue`: the report plus the OFF text when it was requested and possible.
pub struct GlueOutcome {
    pub outcome: Outcome,
    pub off: Option<String>,
}

pub fn glue_cmd(file: &ProblemFile, check_identity: bool, export_off: bool) -> Result<GlueOutcome, CliError> {
    let (labels, s, complex) = chain_and_complex(file)?;
    if s.grade() == 0 {
        return Err(CliError::Schema("0-chains cannot be glued".into()));
    }
    let pairing = extract_face_pairing(&s).map_err(|e| gluing_error(e, &labels))?;
    let g = glue(&s, &pairing).map_err(|e| gluing_error(e, &labels))?;
    let identity = if check_identity {
        let k = match complex {
            Some(k) => {
                if !k.supports(&s) {
                    return Err(CliError::NotSubcomplex);
                }
                k
            }
            None => support_complex(&s)?,
        };
        Some(check_phi_psi_identity(&s, &k).map_err(|e| gluing_error(e, &labels))?)
    } else {
        None
    };
    let mut warnings = Vec::new();
    let off = if export_off {
        let text = to_off(&g, labels.labels().len());
        if text.is_none() {
            warnings.push(format!("OFF export covers 2-dimensional complexes only; this one has dimension {}, nothing written", g.dim()));
        }
        text
    } else {
        None
    };
    let report = glue_report(&g, &labels, identity, &warnings);
    let exit_code = if identity == Some(false) { exit::VERIFY_FAILED } else { exit::OK };
    Ok(GlueOutcome { outcome: Outcome { report, exit_code, warnings }, off })
}

fn glue_report(g: &GluedComplex, labels: &LabelMap, identity: Option<bool>, warnings: &[String]) -> Value {
    let cells: Vec<Value> = g.cells().iter().map(|c| json!({ "simplex": labels.labelled(&c.simplex), "sign": c.sign })).collect();
    let pairs: Vec<Value> = g
        .pairing()
        .pairs()
        .map(|(x, y, tau)| {
            json!({
                "x": slot_json(x),
                "y": slot_json(y),
                "tau": tau.images(),
                "face": labels.labelled(&g.cells()[x.cell].face(x.face)),
            })
        })
        .collect();
    let check = g.check();
    let classes = g.vertex_classes().iter().flatten().collect::<BTreeSet<_>>().len();
    json!({
        "command": "glue",
        "dim": g.dim(),
        "cells": cells,
        "pairing": pairs,
        "face_counts": g.face_counts(),
        "vertex_classes": classes,
        "euler_characteristic": g.euler_characteristic(),
        "closed": g.is_closed(),
        "orientation_compatible": g.orientation_compatible(),
        "orientable": g.orientable(),
        "pairing_check": {
            "involution": check.involution,
            "bijective": check.bijective,
            "inverse_symmetric": check.inverse_symmetric,
            "sign_condition": check.sign_condition,
            "aligned": check.aligned,
        },
        "identity_check": identity,
        "warnings": warnings,
    })
}

pub fn cobordism_cmd(file: &ProblemFile) -> Result<Outcome, CliError> {
    let Payload::Cobordism { total, source, target, .. } = &file.payload else {
        return Err(CliError::Schema(format!("expected a cobordism, got kind {:?}", file.kind())));
    };
    let labels = file.label_map()?;
    let grade_of = |terms: &[crate::format::Term]| terms.first().map(|t| t.simplex.len().saturating_sub(1));
    let boundary_grade = grade_of(source).or(grade_of(target)).or(grade_of(total).map(|g| g.saturating_sub(1)));
    let Some(k) = boundary_grade else {
        return Err(CliError::Schema("all three chains are empty".into()));
    };
    let s_total = labels.chain(total, Some(k + 1))?;
    let s0 = labels.chain(source, Some(k))?;
    let s1 = labels.chain(target, Some(k))?;
    if s_total.grade() != k + 1 || s0.grade() != k || s1.grade() != k {
        return Err(CliError::Schema("s̃ must have grade one more than s₀ and s₁".into()));
    }
    let data = extract_cobordism(&s_total, &s0, &s1).map_err(|e| gluing_error(e, &labels))?;
    let slots = |level: usize| data.slots_at_level(level).into_iter().map(slot_json).collect::<Vec<_>>();
    let assignments: Vec<Value> =
        data.boundary().iter().map(|b| json!({ "level": b.level, "cell": b.cell, "slot": slot_json(b.slot), "tau": b.tau.images() })).collect();
    let direct: Vec<Value> = data.direct().iter().map(|d| json!({ "a": [d.a.0, d.a.1], "b": [d.b.0, d.b.1], "tau": d.tau.images() })).collect();

    let mut warnings = Vec::new();
    let glued = if k == 0 {
        warnings.push("boundary chains of grade 0 have no collars; the glued cobordism is not built".to_string());
        Value::Null
    } else {
        let m0 = glue_open(&s0).map_err(|e| gluing_error(e, &labels))?;
        let m1 = glue_open(&s1).map_err(|e| gluing_error(e, &labels))?;
        match build_cobordism(&data, &m0, &m1) {
            Ok(built) => {
                let g = built.complex();
                let check = g.check();
                json!({
                    "cells": g.cells().len(),
                    "boundary_slots": g.boundary_slots().len(),
                    "closed_boundary": built.closed_boundary(),
                    "boundary_matches": built.boundary_matches(),
                    "orientation_compatible": g.orientation_compatible(),
                    "sign_condition": check.sign_condition,
                    "aligned": check.aligned,
                    "boundary_chain": labels.oriented_json(&g.boundary_chain().map_err(|e| gluing_error(e, &labels))?),
                })
            }
            Err(GluingError::InconsistentAttachment(msg)) => {
                warnings.push(format!("collars not built: {msg}"));
                Value::Null
            }
            Err(e) => return Err(gluing_error(e, &labels)),
        }
    };
    let mut difference = project_to_oriented(&s1).map_err(|e| CliError::Internal(e.to_string()))?;
    difference
        .add_scaled(-1, &project_to_oriented(&s0).map_err(|e| CliError::Internal(e.to_string()))?)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(Outcome {
        report: json!({
            "command": "cobordism",
            "partition": {
                "interior_pairs": data.interior().len(),
                "level0": slots(0),
                "level1": slots(1),
                "assignments": assignments,
                "direct_collars": direct,
                "complete": data.partition_complete(),
            },
            "sign_conditions": {
                "interior": data.interior_signs_ok(),
                "boundary": data.boundary_signs_ok(),
            },
            "attachments_complete": data.attachments_complete(),
            "target_minus_source": labels.oriented_json(&difference),
            "glued": glued,
            "warnings": warnings,
        }),
        exit_code: exit::OK,
        warnings,
    })
}

/// Points `w / n` for all compositions `w` of `n` into `k + 1` parts, lexicographically.
pub fn grid_points(k: usize, n: usize) -> Vec<BaryPoint> {
    fn rec(left: usize, slots: usize, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if slots == 1 {
            prefix.push(left as i64);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=left {
            prefix.push(v as i64);
            rec(left - v, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut weights = Vec::new();
    rec(n, k + 1, &mut Vec::new(), &mut weights);
    weights.into_iter().map(|w| BaryPoint::from_weights(&w).expect("grid weights sum to n > 0")).collect()
}

/// Points from a JSON array of weight vectors; each vector is normalized by its sum.
pub fn parse_points(text: &str, k: usize) -> Result<Vec<BaryPoint>, CliError> {
    let value: Value = serde_json::from_str(text)?;
    let Value::Array(rows) = value else {
        return Err(CliError::Schema("points file must be an array of weight arrays".into()));
    };
    rows.iter()
        .map(|row| {
            let Value::Array(entries) = row else {
                return Err(CliError::Schema(format!("point {row} is not an array")));
            };
            if entries.len() != k + 1 {
                return Err(CliError::Schema(format!("point {row} has {} coordinates, expected {}", entries.len(), k + 1)));
            }
            let weights = entries.iter().map(parse_weight).collect::<Result<Vec<Rational>, _>>()?;
            let total: Rational = weights.iter().sum();
            if total == Rational::from_integer(0) {
                return Err(CliError::Schema(format!("point {row} has zero total weight")));
            }
            BaryPoint::new(weights.into_iter().map(|w| w / total).collect()).map_err(|e| CliError::Schema(e.to_string()))
        })
        .collect()
}

fn region_tags(k: usize, x: &BaryPoint) -> Result<Vec<String>, CliError> {
    let mut regions = vec![(RegionSpec::Interior { k }, "interior".to_string())];
    for p in 0..=k {
        regions.push((RegionSpec::Face { k, p }, format!("face({p})")));
        regions.push((RegionSpec::UFace { k, p }, format!("u_face({p})")));
    }
    if k >= 2 {
        for p in 0..=k {
            for q in p + 1..=k {
                regions.push((RegionSpec::UTildeCodim2 { k, p, q }, format!("u_tilde({p},{q})")));
                regions.push((RegionSpec::UCodim2 { k, p, q }, format!("u_codim2({p},{q})")));
            }
        }
    }
    let mut tags = Vec::new();
    for (r, name) in regions {
        if region_contains(&r, x).map_err(|e| CliError::Internal(e.to_string()))?.contains {
            tags.push(name);
        }
    }
    Ok(tags)
}

fn smoothing_internal(e: orichain::smoothing::SmoothingError) -> CliError {
    CliError::Internal(e.to_string())
}

/// Evaluates `φ_k` on the points and checks equivariance, the projection property
/// and independence of the face used to compute it.
pub fn smoothing_eval_cmd(k: usize, points: &[BaryPoint], max_dim: usize) -> Result<Outcome, CliError> {
    if k > max_dim {
        return Err(CliError::DimensionOverflow { requested: k, max: max_dim });
    }
    if k == 0 {
        return Err(CliError::Schema("k must be at least 1".into()));
    }
    let phi = SmoothingMap::standard(k).map_err(smoothing_internal)?;
    let all_perms = (1..=k + 1).product::<usize>() <= 24;
    let perms: Vec<Permutation> =
        if all_perms { Permutation::all(k) } else { (0..k).map(|i| Permutation::transposition(k, i, i + 1).expect("adjacent indices")).collect() };
    let mut rows = Vec::new();
    let (mut equivariance, mut projection, mut well_defined) = (0.0f64, 0.0f64, 0.0f64);
    let mut projection_samples = 0usize;
    for x in points {
        if x.dim() != k {
            return Err(CliError::Schema(format!("point of dimension {} for k = {k}", x.dim())));
        }
        let xf = x.to_f64();
        let fx = phi.phi(&xf).map_err(smoothing_internal)?;
        for tau in &perms {
            let lhs = phi.phi(&tau.permute_coords(&xf)).map_err(smoothing_internal)?;
            equivariance = equivariance.max(sup_distance(&lhs, &tau.permute_coords(&fx)));
        }
        for p in 0..=k + 1 {
            well_defined = well_defined.max(sup_distance(&phi.phi_through_face(&xf, p).map_err(smoothing_internal)?, &fx));
        }
        let tags = region_tags(k, x)?;
        for p in 0..=k {
            if tags.contains(&format!("u_face({p})")) {
                let expected = project_to_face(x, p).map_err(|e| CliError::Internal(e.to_string()))?.to_f64();
                projection = projection.max(sup_distance(&fx, &expected));
                projection_samples += 1;
            }
        }
        rows.push(json!({
            "x": x.coords().iter().map(format_rational).collect::<Vec<_>>(),
            "phi": fx.iter().map(|&v| format_float(v)).collect::<Vec<_>>(),
            "regions": tags,
        }));
    }
    let passed = equivariance <= SMOOTHING_TOLERANCE && projection <= SMOOTHING_TOLERANCE && well_defined <= SMOOTHING_TOLERANCE;
    let report = json!({
        "command": "smoothing eval",
        "k": k,
        "points": rows,
        "summary": {
            "samples": points.len(),
            "permutations": if all_perms { "all" } else { "adjacent transpositions" },
            "equivariance_max_deviation": format_float(equivariance),
            "projection_max_deviation": format_float(projection),
            "projection_samples": projection_samples,
            "well_definedness_max_deviation": format_float(well_defined),
            "tolerance": format_float(SMOOTHING_TOLERANCE),
            "passed": passed,
        },
    });
    Ok(Outcome { report, exit_code: if passed { exit::OK } else { exit::VERIFY_FAILED }, warnings: Vec::new() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Homotopy,
    Mv,
    All,
}

/// Covers shipped with the binary, as `(name, json)`.
pub const BUNDLED_COVERS: [(&str, &str); 2] =
    [("hexagon", include_str!("../fixtures/covers/hexagon.json")), ("octahedron", include_str!("../fixtures/covers/octahedron.json"))];

pub const HOMOTOPY_SEED: u64 = 0x5eed;
pub const HOMOTOPY_SAMPLES: usize = 100;

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> BaryPoint {
    loop {
        let w: Vec<i64> = (0..=n).map(|_| rng.gen_range(0..5)).collect();
        if w.iter().any(|&v| v > 0) {
            return BaryPoint::from_weights(&w).expect("nonzero weights");
        }
    }
}

/// A random generator `f − (sign τ) f∘τ` with `f: Δ^k → Δ^n`, `n ∈ {k, k+1}`.
pub fn random_s_prime_generator(rng: &mut ChaCha8Rng, k: usize) -> SPrimeGenerator {
    let n = k + rng.gen_range(0..2);
    let mut images: Vec<BaryPoint> = (0..=k).map(|_| random_point(rng, n)).collect();
    if rng.gen_bool(0.2) {
        images[1] = images[0].clone();
    }
    let f = LinearMapSimplex::new(n, images).expect("points lie in Δ^n");
    let tau = Permutation::all(k).choose(rng).expect("nonempty").clone();
    SPrimeGenerator::new(f, tau).expect("matching degrees")
}

fn homotopy_suite() -> Result<(Value, bool), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(HOMOTOPY_SEED);
    let mut per_k = Vec::new();
    let mut ok = true;
    for k in 1..=3 {
        let mut failures = Vec::new();
        for i in 0..HOMOTOPY_SAMPLES {
            let c = random_s_prime_generator(&mut rng, k).to_chain();
            let check = verify_homotopy_identity(&c).map_err(|e| CliError::Internal(e.to_string()))?;
            if !check.holds {
                failures.push(json!({ "sample": i, "chain": c.to_string(), "defect": check.defect.to_string() }));
            }
        }
        ok &= failures.is_empty();
        per_k.push(json!({ "k": k, "samples": HOMOTOPY_SAMPLES, "passed": failures.is_empty(), "failures": failures }));
    }
    Ok((json!({ "seed": HOMOTOPY_SEED, "by_dimension": per_k, "passed": ok }), ok))
}

fn check_cover(name: &str, text: &str) -> Result<(Value, bool), CliError> {
    let file = ProblemFile::parse(text).map_err(|e| CliError::Schema(format!("{name}: {e}")))?;
    let Payload::Cover { complex, cover, expect, .. } = &file.payload else {
        return Err(CliError::Schema(format!("{name}: expected kind \"cover\", got {:?}", file.kind())));
    };
    let labels = file.label_map()?;
    let k = labels.complex(complex)?;
    let pieces = cover.iter().map(|c| labels.complex(c)).collect::<Result<Vec<_>, _>>()?;
    let report = match verify_mv_vanishing(&k, &pieces) {
        Ok(r) => r,
        Err(HomologyError::CoverMismatch) => {
            return Ok((json!({ "name": name, "passed": false, "error": "the cover does not union to the complex" }), false));
        }
        Err(e) => return Err(homology_error(e)),
    };
    let matches_expectation = expect
        .as_ref()
        .is_none_or(|e: &CoverExpectation| e.hypothesis_holds == report.hypothesis_holds && e.conclusion_holds == report.conclusion_holds);
    let passed = report.passes() && matches_expectation;
    let failures: Vec<Value> = report.hypothesis_failures.iter().map(|(set, d)| json!({ "pieces": set, "degree": d })).collect();
    Ok((
        json!({
            "name": name,
            "cover_size": report.cover_size,
            "hypothesis_holds": report.hypothesis_holds,
            "conclusion_holds": report.conclusion_holds,
            "hypothesis_failures": failures,
            "counterexample_degree": report.counterexample_degree,
            "expected": expect,
            "passed": passed,
        }),
        passed,
    ))
}

/// Cover fixtures from a directory: every `*.json` file, by file name.
pub fn read_cover_dir(dir: &Path) -> Result<Vec<(String, String)>, CliError> {
    let io = |source| CliError::Io { path: dir.display().to_string(), source };
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().is_some_and(|e| e == "json") {
            let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            out.push((name, text));
        }
    }
    out.sort();
    Ok(out)
}

pub fn verify_cmd(suite: Suite, covers: &[(String, String)]) -> Result<Outcome, CliError> {
    let mut report = serde_json::Map::new();
    report.insert("command".into(), json!("verify"));
    let mut ok = true;
    if matches!(suite, Suite::Homotopy | Suite::All) {
        let (value, passed) = homotopy_suite()?;
        ok &= passed;
        report.insert("homotopy".into(), value);
    }
    if matches!(suite, Suite::Mv | Suite::All) {
        let mut entries = Vec::new();
        for (name, text) in covers {
            let (value, passed) = check_cover(name, text)?;
            ok &= passed;
            entries.push(value);
        }
        report.insert("mv".into(), Value::Array(entries));
    }
    report.insert("passed".into(), json!(ok));
    Ok(Outcome { report: Value::Object(report), exit_code: if ok { exit::OK } else { exit::VERIFY_FAILED }, warnings: Vec::new() })
}

pub fn bundled_covers() -> Vec<(String, String)> {
    BUNDLED_COVERS.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect()
}

/// `ORICHAIN_MAX_DIM`, defaulting to [`DEFAULT_MAX_DIM`].
pub fn max_dim_from_env() -> Result<usize, CliError> {
    match std::env::var("ORICHAIN_MAX_DIM") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Schema(format!("ORICHAIN_MAX_DIM={v:?} is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_MAX_DIM),
    }
}
