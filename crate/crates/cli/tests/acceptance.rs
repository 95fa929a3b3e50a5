use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use orichain::chains::{is_cycle_oriented, project_to_oriented, Chain, OrderedSimplex, SimplicialComplex, Vertex};
use orichain::corpus;
use orichain::gluing::{build_cobordism, check_phi_psi_identity, extract_cobordism, extract_face_pairing, glue, GluedComplex};
use orichain::homology::{homology, verify_mv_vanishing, ChainModel, HomologyGroup};
use orichain::prism::{homotopy_d, verify_homotopy_identity, LinearMapSimplex, SPrimeGenerator};
use orichain::simplex::{project_to_face, region_contains, BaryPoint, FaceInclusion, Permutation, Rational, RegionSpec};
use orichain::smoothing::{sup_distance, SmoothingMap};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Debug) -> String {
    format!("{e:?}")
}

// Criterion 1

/// `∂` on ordered tuples written out directly, as a map from tuple to coefficient.
fn naive_boundary(c: &BTreeMap<Vec<Vertex>, i64>) -> BTreeMap<Vec<Vertex>, i64> {
    let mut out = BTreeMap::new();
    for (s, &a) in c {
        if s.len() < 2 {
            continue;
        }
        for i in 0..s.len() {
            let mut f = s.clone();
            f.remove(i);
            *out.entry(f).or_insert(0) += if i % 2 == 0 { a } else { -a };
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

fn as_map(c: &Chain) -> BTreeMap<Vec<Vertex>, i64> {
    c.terms().map(|(s, a)| (s.vertices().to_vec(), a)).collect()
}

fn chain_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut nonzero_boundaries = 0;
    for i in 0..1000 {
        let grade = i % 6;
        let mut c = Chain::zero(grade);
        for _ in 0..rng.gen_range(1..=8) {
            let s: Vec<Vertex> = (0..=grade).map(|_| rng.gen_range(0..8)).collect();
            c.add_term(OrderedSimplex::new(s).map_err(err)?, rng.gen_range(-9..=9)).map_err(err)?;
        }
        let d = c.boundary().map_err(err)?;
        ensure(as_map(&d) == naive_boundary(&as_map(&c)), || format!("∂ disagrees with the direct formula on {c:?}"))?;
        let dd = d.boundary().map_err(err)?;
        ensure(dd.is_empty(), || format!("∂∂ ≠ 0 on {c:?}"))?;
        let oriented = project_to_oriented(&c).map_err(err)?;
        ensure(oriented.boundary().map_err(err)?.boundary().map_err(err)?.is_zero(), || format!("oriented ∂∂ ≠ 0 on {c:?}"))?;
        nonzero_boundaries += usize::from(!d.is_empty());
    }
    Ok(format!("1000 chains, {nonzero_boundaries} with nonzero boundary"))
}

// Criterion 2

fn boundary_matrix(k: &SimplicialComplex, d: usize) -> Vec<Vec<i64>> {
    let rows: BTreeMap<&Vec<Vertex>, usize> = k.simplices(d - 1).enumerate().map(|(i, s)| (s, i)).collect();
    let cols: Vec<&Vec<Vertex>> = k.simplices(d).collect();
    let mut m = vec![vec![0i64; cols.len()]; rows.len()];
    for (j, s) in cols.iter().enumerate() {
        for i in 0..s.len() {
            let mut f = s.to_vec();
            f.remove(i);
            m[rows[&f]][j] += if i % 2 == 0 { 1 } else { -1 };
        }
    }
    m
}

fn rank_rational(m: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect()).collect();
    let zero = Rational::from_integer(0);
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] != zero) else { continue };
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            let f = m[r][c] / m[rank][c];
            if f != zero {
                let pivot_row = m[rank].clone();
                for (dst, src) in m[r][c..].iter_mut().zip(&pivot_row[c..]) {
                    *dst -= f * src;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn rank_mod(m: &[Vec<i64>], p: i64) -> usize {
    let mut m: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|v| v.rem_euclid(p)).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, pivot);
        let inv = (1..p).find(|x| m[rank][c] * x % p == 1).expect("p is prime");
        for r in rank + 1..m.len() {
            let f = m[r][c] * inv % p;
            let pivot_row = m[rank].clone();
            for (dst, src) in m[r][c..].iter_mut().zip(&pivot_row[c..]) {
                *dst = (*dst - f * src).rem_euclid(p);
            }
        }
        rank += 1;
    }
    rank
}

/// Betti numbers from boundary ranks computed by `rank`.
fn betti(k: &SimplicialComplex, rank: impl Fn(&[Vec<i64>]) -> usize) -> Vec<usize> {
    let top = k.dim().unwrap_or(0);
    let ranks: Vec<usize> = (0..=top + 1).map(|d| if d == 0 || d > top { 0 } else { rank(&boundary_matrix(k, d)) }).collect();
    (0..=top).map(|d| k.count(d) - ranks[d] - ranks[d + 1]).collect()
}

fn surface_homology() -> Outcome {
    let g = |free: usize, torsion: &[i64]| HomologyGroup::new(free, torsion.to_vec()).map_err(err);
    let cases = [
        ("S²", corpus::tetrahedron_boundary(), vec![g(1, &[])?, g(0, &[])?, g(1, &[])?]),
        ("T²", corpus::torus(), vec![g(1, &[])?, g(2, &[])?, g(1, &[])?]),
        ("RP²", corpus::projective_plane(), vec![g(1, &[])?, g(0, &[2])?, g(0, &[])?]),
        ("Klein", corpus::klein_bottle(), vec![g(1, &[])?, g(1, &[2])?, g(0, &[])?]),
    ];
    let mut summary = Vec::new();
    for (name, k, expected) in cases {
        let oriented = homology(&k, ChainModel::Oriented).map_err(err)?;
        let ordered = homology(&k, ChainModel::Ordered).map_err(err)?;
        ensure(oriented == expected, || format!("{name}: oriented {oriented:?}"))?;
        ensure(ordered == expected, || format!("{name}: ordered {ordered:?}"))?;
        let free: Vec<usize> = oriented.iter().map(HomologyGroup::free_rank).collect();
        ensure(betti(&k, rank_rational) == free, || format!("{name}: rational ranks disagree"))?;
        for p in [2, 3] {
            let tors = |d: usize| oriented[d].torsion().iter().filter(|&&t| t % p == 0).count();
            let predicted: Vec<usize> = (0..oriented.len()).map(|d| free[d] + tors(d) + if d > 0 { tors(d - 1) } else { 0 }).collect();
            ensure(betti(&k, |m| rank_mod(m, p)) == predicted, || format!("{name}: F_{p} ranks disagree"))?;
        }
        let groups: Vec<String> = oriented.iter().map(ToString::to_string).collect();
        summary.push(format!("{name} ({})", groups.join(", ")));
    }
    Ok(summary.join("; "))
}

// Criterion 3

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Result<BaryPoint, String> {
    loop {
        let w: Vec<i64> = (0..=n).map(|_| rng.gen_range(0..5)).collect();
        if w.iter().any(|&v| v > 0) {
            return BaryPoint::from_weights(&w).map_err(err);
        }
    }
}

fn homotopy_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut terms = 0;
    let mut plus_form_failures = 0;
    for k in 1..=3 {
        let perms: Vec<Permutation> = Permutation::all(k).into_iter().filter(|t| !t.is_identity()).collect();
        for _ in 0..100 {
            let n = k + rng.gen_range(0..2);
            let mut images = (0..=k).map(|_| random_point(&mut rng, n)).collect::<Result<Vec<_>, _>>()?;
            if rng.gen_bool(0.2) {
                images[1] = images[0].clone();
            }
            let f = LinearMapSimplex::new(n, images).map_err(err)?;
            let tau = perms.choose(&mut rng).cloned().ok_or("no permutations")?;
            let c = SPrimeGenerator::new(f, tau).map_err(err)?.to_chain();
            let check = verify_homotopy_identity(&c).map_err(err)?;
            ensure(check.defect.is_zero(), || format!("k={k}: defect {:?}", check.defect))?;
            // recompute both sides from the public operators
            let dc = homotopy_d(&c).map_err(err)?;
            let d_bd = homotopy_d(&c.boundary().map_err(err)?).map_err(err)?;
            let sign = if k % 2 == 0 { -1 } else { 1 };
            let mut rhs = d_bd.clone();
            rhs.add_scaled(sign, &c).map_err(err)?;
            ensure(dc.boundary().map_err(err)? == rhs, || format!("k={k}: ∂Dc ≠ (−1)^(k+1)c + D∂c"))?;
            let mut summed = dc.boundary().map_err(err)?;
            summed.add_scaled(1, &d_bd).map_err(err)?;
            summed.add_scaled(-sign, &c).map_err(err)?;
            plus_form_failures += usize::from(!summed.is_zero());
            terms += dc.len();
        }
    }
    Ok(format!(
        "300 generators, zero defect in ∂D = (−1)^(k+1) Id + D∂, {terms} terms in Dc overall; ∂D + D∂ = (−1)^(k+1) Id fails on {plus_form_failures}"
    ))
}

// Criterion 4

const TOL: f64 = 1e-12;
const SAMPLES: usize = 10_000;

fn uniform(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..=k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v / total).collect()
}

/// A point of `U_p`: integer weights with `(k+2) w_p < w_q` for all `q ≠ p`.
fn point_in_face_region(rng: &mut ChaCha8Rng, k: usize, p: usize) -> Result<BaryPoint, String> {
    let mut w: Vec<i64> = (0..=k).map(|_| rng.gen_range(1..1_000_000)).collect();
    let min = (0..=k).filter(|&q| q != p).map(|q| w[q]).min().unwrap_or(1);
    w[p] = (rng.gen::<f64>() * min as f64 / (k + 2) as f64).floor() as i64;
    BaryPoint::from_weights(&w).map_err(err)
}

fn smoothing_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = [0.0f64; 4];
    for k in 1..=3 {
        let phi = SmoothingMap::standard(k).map_err(err)?;
        let big = Permutation::all(k + 1);
        let small = Permutation::all(k);
        for i in 0..SAMPLES {
            let x = uniform(&mut rng, k + 1);
            let fx = phi.phi_tilde(&x).map_err(err)?;
            for tau in &big {
                let d = sup_distance(&phi.phi_tilde(&tau.permute_coords(&x)).map_err(err)?, &tau.permute_coords(&fx));
                worst[0] = worst[0].max(d);
            }

            let y = uniform(&mut rng, k);
            let fy = phi.phi(&y).map_err(err)?;
            for tau in &small {
                let d = sup_distance(&phi.phi(&tau.permute_coords(&y)).map_err(err)?, &tau.permute_coords(&fy));
                worst[0] = worst[0].max(d);
            }
            for p in 0..=k + 1 {
                let inc = FaceInclusion::new(k + 1, p).map_err(err)?;
                let d = sup_distance(&phi.phi_tilde(&inc.insert(&y, 0.0)).map_err(err)?, &inc.insert(&fy, 0.0));
                worst[1] = worst[1].max(d);
                worst[3] = worst[3].max(sup_distance(&phi.phi_through_face(&y, p).map_err(err)?, &fy));
            }

            let p = i % (k + 1);
            let z = point_in_face_region(&mut rng, k, p)?;
            ensure(region_contains(&RegionSpec::UFace { k, p }, &z).map_err(err)?.contains, || format!("sample outside U_{p}"))?;
            let expected = project_to_face(&z, p).map_err(err)?.to_f64();
            worst[2] = worst[2].max(sup_distance(&phi.phi(&z.to_f64()).map_err(err)?, &expected));
        }
    }
    let names = ["equivariance", "face compatibility", "projection", "well-definedness"];
    let report: Vec<String> = names.iter().zip(worst).map(|(n, w)| format!("{n} {w:.1e}")).collect();
    ensure(worst.iter().all(|&w| w <= TOL), || format!("max deviations: {}", report.join(", ")))?;
    Ok(format!("{SAMPLES} samples per k, max deviations: {}", report.join(", ")))
}

// Criteria 5 and 6

fn corpus_cycles() -> Vec<(&'static str, Chain, SimplicialComplex, i64)> {
    vec![
        ("triangle boundary", corpus::triangle_boundary_cycle(), corpus::triangle_boundary(), 0),
        ("∂Δ³", corpus::tetrahedron_cycle(), corpus::tetrahedron_boundary(), 2),
        ("octahedron", corpus::octahedron_cycle(), corpus::octahedron(), 2),
        ("torus", corpus::torus_cycle(), corpus::torus(), 0),
    ]
}

/// Each codimension-one face slot lies in exactly one pair, and the counts close up.
fn slots_in_pairs(g: &GluedComplex) -> bool {
    let mut seen: BTreeMap<_, usize> = BTreeMap::new();
    for (x, y, _) in g.pairing().pairs() {
        *seen.entry(x).or_default() += 1;
        *seen.entry(y).or_default() += 1;
    }
    let slots: usize = g.cells().iter().map(|c| c.simplex.len()).sum();
    let faces = g.face_counts()[g.dim() - 1];
    seen.len() == slots && seen.values().all(|&n| n == 1) && 2 * faces == slots
}

fn gluing_corpus() -> Outcome {
    let mut summary = Vec::new();
    for (name, s, _, chi) in corpus_cycles() {
        ensure(is_cycle_oriented(&s).map_err(err)?, || format!("{name} is not a cycle"))?;
        let pairing = extract_face_pairing(&s).map_err(err)?;
        let g = glue(&s, &pairing).map_err(err)?;
        ensure(g.check().all(), || format!("{name}: pairing check {:?}", g.check()))?;
        ensure(g.is_closed(), || format!("{name}: not closed"))?;
        ensure(slots_in_pairs(&g), || format!("{name}: a face is not in exactly two slots"))?;
        ensure(g.orientation_compatible(), || format!("{name}: orientations not compatible"))?;
        ensure(g.euler_characteristic() == chi, || format!("{name}: χ = {}", g.euler_characteristic()))?;
        summary.push(format!("{name} χ={chi}"));
    }
    Ok(summary.join(", "))
}

fn phi_psi_identity() -> Outcome {
    let mut count = 0;
    for (name, s, k, _) in corpus_cycles() {
        ensure(check_phi_psi_identity(&s, &k).map_err(err)?, || format!("{name}: identity fails"))?;
        let doubled = s.scaled(2).map_err(err)?;
        ensure(check_phi_psi_identity(&doubled, &k).map_err(err)?, || format!("2·{name}: identity fails"))?;
        count += 2;
    }
    Ok(format!("{count} cycles (corpus and doubled)"))
}

// Criterion 7

fn cobordisms() -> Outcome {
    let mut summary = Vec::new();
    for (name, p) in [("cylinder", corpus::cylinder()), ("torus cobordism", corpus::torus_cobordism())] {
        let data = extract_cobordism(&p.total, &p.source, &p.target).map_err(err)?;
        ensure(data.partition_complete(), || format!("{name}: partition incomplete"))?;
        ensure(data.interior_signs_ok(), || format!("{name}: interior signs"))?;
        ensure(data.boundary_signs_ok(), || format!("{name}: boundary signs"))?;
        ensure(data.attachments_complete(), || format!("{name}: attachments incomplete"))?;
        let m0 = glue(&p.source, &extract_face_pairing(&p.source).map_err(err)?).map_err(err)?;
        let m1 = glue(&p.target, &extract_face_pairing(&p.target).map_err(err)?).map_err(err)?;
        let built = build_cobordism(&data, &m0, &m1).map_err(err)?;
        let boundary = built.complex().boundary_chain().map_err(err)?;
        let expected = project_to_oriented(&p.target.minus(&p.source).map_err(err)?).map_err(err)?;
        ensure(boundary == expected, || format!("{name}: ∂ = {boundary:?}"))?;
        ensure(built.boundary_matches() && built.closed_boundary(), || format!("{name}: boundary flags"))?;
        summary.push(format!("{name} ({} cells, {} interior pairs)", data.total_cells().len(), data.interior().len()));
    }
    Ok(summary.join(", "))
}

// Criterion 8

fn mayer_vietoris() -> Outcome {
    let mut summary = Vec::new();
    for (name, k, cover) in
        [("hexagon", corpus::hexagon(), corpus::hexagon_cover()), ("octahedron", corpus::octahedron(), corpus::octahedron_cover())]
    {
        let report = verify_mv_vanishing(&k, &cover).map_err(err)?;
        ensure(report.hypothesis_holds && report.conclusion_holds, || format!("{name}: {report:?}"))?;
        summary.push(format!("{name} ({} pieces)", report.cover_size));
    }
    Ok(summary.join(", "))
}

// Criterion 9

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn run(args: &[String]) -> Result<(Option<i32>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_orichain")).args(args).output().map_err(err)?;
    Ok((out.status.code(), out.stdout))
}

fn args(cmd: &str, file: &Path, extra: &[&str]) -> Vec<String> {
    let mut v = cmd.split(' ').map(String::from).collect::<Vec<_>>();
    v.push(file.display().to_string());
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn cli_determinism() -> Outcome {
    let dir = fixtures();
    let mut invocations: Vec<Vec<String>> = Vec::new();
    for name in ["sphere", "torus", "projective_plane", "klein_bottle", "disk_relative"] {
        for model in ["oriented", "ordered"] {
            invocations.push(args("homology", &dir.join(format!("{name}.json")), &["--model", model]));
        }
    }
    for name in ["triangle_cycle", "tetrahedron_cycle", "octahedron_cycle", "torus_cycle"] {
        invocations.push(args("glue", &dir.join(format!("{name}.json")), &["--check-identity"]));
    }
    for name in ["cylinder", "torus_cobordism", "triangle_cobordism"] {
        invocations.push(args("cobordism", &dir.join(format!("{name}.json")), &[]));
    }
    invocations.push(args("verify --suite mv --fixtures", &dir.join("covers"), &[]));
    invocations.push(["verify", "--suite", "all"].map(String::from).to_vec());
    invocations.push(["smoothing", "eval", "--k", "2", "--grid", "8"].map(String::from).to_vec());

    for a in &invocations {
        let (code, first) = run(a)?;
        ensure(code == Some(0), || format!("exit {code:?} for {a:?}"))?;
        let (_, second) = run(a)?;
        ensure(first == second, || format!("reports differ for {a:?}"))?;
    }

    let neg = dir.join("negative");
    let negatives: Vec<(Vec<String>, i32)> = vec![
        (args("homology", &neg.join("malformed.json"), &[]), 2),
        (args("homology", &neg.join("bad_version.json"), &[]), 2),
        (args("homology", &neg.join("unknown_kind.json"), &[]), 2),
        (args("glue", &neg.join("undeclared_label.json"), &[]), 2),
        (args("homology", &dir.join("missing.json"), &[]), 2),
        (args("homology", &neg.join("not_subcomplex.json"), &[]), 3),
        (args("glue", &neg.join("single_simplex.json"), &[]), 4),
        (args("cobordism", &neg.join("boundary_mismatch.json"), &[]), 5),
        (["smoothing", "eval", "--k", "40", "--grid", "2"].map(String::from).to_vec(), 6),
        (args("verify --suite mv --fixtures", &neg.join("corrupt_covers"), &[]), 1),
    ];
    for (a, expected) in &negatives {
        let (code, _) = run(a)?;
        ensure(code == Some(*expected), || format!("exit {code:?}, expected {expected}, for {a:?}"))?;
    }
    Ok(format!("{} invocations byte-identical, {} exit codes as documented", invocations.len(), negatives.len()))
}

struct Criterion {
    title: &'static str,
    limit: Option<Duration>,
    check: fn() -> Outcome,
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { title: "∂∂ = 0 on random chains", limit: secs(5), check: chain_axioms },
        Criterion { title: "surface homology in both models", limit: secs(10), check: surface_homology },
        Criterion { title: "homotopy identity on S′ generators", limit: secs(30), check: homotopy_identity },
        Criterion { title: "smoothing identities", limit: secs(60), check: smoothing_identities },
        Criterion { title: "face pairings and gluing", limit: None, check: gluing_corpus },
        Criterion { title: "Φ∘Ψ = id", limit: None, check: phi_psi_identity },
        Criterion { title: "cobordisms", limit: None, check: cobordisms },
        Criterion { title: "Mayer–Vietoris vanishing", limit: None, check: mayer_vietoris },
        Criterion { title: "CLI determinism and exit codes", limit: None, check: cli_determinism },
    ];
    let mut failures = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = (c.check)();
        let elapsed = start.elapsed();
        let result = match (result, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took longer than {}s", limit.as_secs())),
            (r, _) => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failures += usize::from(result.is_err());
        println!("{tag} criterion {}: {} ({:.2}s) {detail}", i + 1, c.title, elapsed.as_secs_f64());
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}
