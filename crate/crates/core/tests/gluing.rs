use std::collections::BTreeMap;

use orichain::chains::{project_to_oriented, Chain, OrderedSimplex, SimplicialComplex, Vertex};
use orichain::corpus;
use orichain::gluing::{
    build_cobordism, check_phi_psi_identity, coherent_signs, expand_cells, extract_cobordism, extract_face_pairing, fundamental_cycle, glue,
    glue_open, induced_orientations_opposite, FaceSlot, GluedComplex, GluingError,
};
use orichain::simplex::Permutation;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every slot occurs in exactly one pair, never with itself.
fn each_slot_twice(g: &GluedComplex) -> bool {
    let mut seen: BTreeMap<FaceSlot, usize> = BTreeMap::new();
    for (x, y, _) in g.pairing().pairs() {
        if x == y {
            return false;
        }
        *seen.entry(x).or_default() += 1;
        *seen.entry(y).or_default() += 1;
    }
    let total: usize = g.cells().iter().map(|c| c.simplex.len()).sum();
    seen.len() == total && seen.values().all(|&n| n == 1)
}

fn assert_closed_gluing(s: &Chain, k: &SimplicialComplex) -> GluedComplex {
    let g = glue(s, &extract_face_pairing(s).unwrap()).unwrap();
    assert!(g.is_closed());
    assert!(g.check().all(), "{:?}", g.check());
    assert!(each_slot_twice(&g));
    assert!(g.orientation_compatible());
    assert!(induced_orientations_opposite(g.cells(), g.pairing()).iter().all(|(_, _, v)| *v == Some(true)));
    assert_eq!(g.euler_characteristic(), k.euler_characteristic());
    assert_eq!(project_to_oriented(&fundamental_cycle(&g).unwrap()).unwrap(), project_to_oriented(s).unwrap());
    g
}

#[test]
fn corpus_cycles_glue() {
    let cases = [
        (corpus::triangle_boundary_cycle(), corpus::triangle_boundary(), 0),
        (corpus::tetrahedron_cycle(), corpus::tetrahedron_boundary(), 2),
        (corpus::octahedron_cycle(), corpus::octahedron(), 2),
        (corpus::torus_cycle(), corpus::torus(), 0),
    ];
    for (s, k, chi) in cases {
        let g = assert_closed_gluing(&s, &k);
        assert_eq!(g.euler_characteristic(), chi);
        assert!(check_phi_psi_identity(&s, &k).unwrap());
    }
}

/// `∂Δ^4` with each term rewritten as `(sign τ) f∘τ`, terms shuffled and vertices relabelled.
fn shelled_sphere(rng: &mut ChaCha8Rng) -> (Chain, SimplicialComplex) {
    let mut labels: Vec<Vertex> = (10..15).collect();
    labels.shuffle(rng);
    let top = OrderedSimplex::new(labels).unwrap();
    let boundary = Chain::simplex(top.clone()).boundary().unwrap();
    let mut terms: Vec<(OrderedSimplex, i64)> = boundary
        .terms()
        .map(|(f, a)| {
            let tau = Permutation::all(3).choose(rng).unwrap().clone();
            (f.precompose(&tau), a * tau.sign())
        })
        .collect();
    terms.shuffle(rng);
    let s = Chain::from_terms(3, terms).unwrap();
    let k = SimplicialComplex::from_maximal(&[top.support()]).unwrap();
    let skeleton = SimplicialComplex::from_maximal(k.simplices(3).cloned().collect::<Vec<_>>()).unwrap();
    (s, skeleton)
}

#[test]
fn randomized_sphere_shellings() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..50 {
        let (s, k) = shelled_sphere(&mut rng);
        let g = assert_closed_gluing(&s, &k);
        assert_eq!(g.face_counts(), &[5, 10, 10, 5]);
        assert_eq!(g.euler_characteristic(), 0);
        assert!(check_phi_psi_identity(&s, &k).unwrap());
    }
}

#[test]
fn multiplicities_and_negative_coefficients() {
    let s = corpus::tetrahedron_cycle().scaled(2).unwrap();
    let g = glue(&s, &extract_face_pairing(&s).unwrap()).unwrap();
    assert_eq!(g.cells().len(), 8);
    assert!(g.check().all());
    assert_eq!(project_to_oriented(&fundamental_cycle(&g).unwrap()).unwrap(), project_to_oriented(&s).unwrap());
    assert!(check_phi_psi_identity(&s, &corpus::tetrahedron_boundary()).unwrap());

    let neg = corpus::torus_cycle().scaled(-1).unwrap();
    assert!(expand_cells(&neg).iter().all(|c| c.sign == 1));
    assert!(check_phi_psi_identity(&neg, &corpus::torus()).unwrap());
}

#[test]
fn non_orientable_surfaces() {
    for tris in [corpus::projective_plane_triangles(), corpus::klein_bottle_triangles()] {
        let g = GluedComplex::from_pseudomanifold(&tris).unwrap();
        assert!(g.is_closed());
        assert!(!g.orientable());
        assert!(coherent_signs(g.cells(), g.pairing()).is_none());
    }
    let torus = GluedComplex::from_pseudomanifold(&corpus::torus_triangles()).unwrap();
    assert!(torus.orientable());
}

#[test]
fn non_cycles_are_rejected() {
    let s = Chain::from_tuples(&[(&[0, 1, 2], 1), (&[0, 2, 3], 1)]).unwrap();
    match extract_face_pairing(&s) {
        Err(GluingError::NotACycle { residue }) => assert_eq!(residue, project_to_oriented(&s.boundary().unwrap()).unwrap()),
        other => panic!("{other:?}"),
    }
    let open = glue_open(&s).unwrap();
    assert!(!open.is_closed());
    assert_eq!(open.boundary_slots().len(), 4);
    assert_eq!(open.boundary_chain().unwrap(), project_to_oriented(&s.boundary().unwrap()).unwrap());
}

#[test]
fn cylinder_and_torus_cobordisms() {
    for p in [corpus::cylinder(), corpus::torus_cobordism()] {
        let data = extract_cobordism(&p.total, &p.source, &p.target).unwrap();
        assert!(data.partition_complete());
        assert!(data.interior_signs_ok());
        assert!(data.boundary_signs_ok());
        assert!(data.attachments_complete());
        assert!(data.direct().is_empty());
        let m0 = glue(&p.source, &extract_face_pairing(&p.source).unwrap()).unwrap();
        let m1 = glue(&p.target, &extract_face_pairing(&p.target).unwrap()).unwrap();
        let built = build_cobordism(&data, &m0, &m1).unwrap();
        let g = built.complex();
        assert!(built.closed_boundary());
        assert!(built.boundary_matches());
        assert!(g.check().sign_condition && g.check().aligned && g.check().involution);
        assert!(g.orientation_compatible());
        assert_eq!(g.boundary_slots().len(), m0.cells().len() + m1.cells().len());
        let expected = project_to_oriented(&p.target.minus(&p.source).unwrap()).unwrap();
        assert_eq!(g.boundary_chain().unwrap(), expected);
    }
}

#[test]
fn random_prisms_are_cobordisms() {
    // s̃ = prism over a random relabelling of ∂Δ^3, built by the staircase formula
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..10 {
        let mut labels: Vec<Vertex> = (0..4).collect();
        labels.shuffle(&mut rng);
        let base = Chain::simplex(OrderedSimplex::new(labels).unwrap()).boundary().unwrap();
        let shift = rng.gen_range(4..9);
        let lift = |c: &Chain| {
            Chain::from_terms(c.grade(), c.terms().map(|(s, a)| (OrderedSimplex::new(s.vertices().iter().map(|v| v + shift).collect()).unwrap(), a)))
                .unwrap()
        };
        let mut total = Chain::zero(3);
        for (s, a) in base.terms() {
            let v = s.vertices();
            for i in 0..v.len() {
                let mut t = v[..=i].to_vec();
                t.extend(v[i..].iter().map(|x| x + shift));
                total.add_term(OrderedSimplex::new(t).unwrap(), if i % 2 == 0 { a } else { -a }).unwrap();
            }
        }
        let top = lift(&base);
        let data = extract_cobordism(&total, &base, &top).unwrap();
        assert!(data.partition_complete() && data.boundary_signs_ok());
        let built = build_cobordism(&data, &glue_open(&base).unwrap(), &glue_open(&top).unwrap()).unwrap();
        assert!(built.boundary_matches() && built.closed_boundary());
    }
}

#[test]
fn boundary_mismatch_reports_residue() {
    let p = corpus::cylinder();
    let err = extract_cobordism(&p.total, &p.target, &p.source).unwrap_err();
    match err {
        GluingError::BoundaryMismatch { residue } => assert!(!residue.is_zero()),
        other => panic!("{other:?}"),
    }
}
