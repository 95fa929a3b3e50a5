use std::collections::BTreeMap;

use super::{FacePairing, FaceSlot, GluedCell, GluedComplex, GluingError};
use crate::chains::{project_to_oriented, Chain, OrderedSimplex, OrientedClass, SimplicialComplex, Vertex};
use crate::homology::homologous;
use crate::simplex::Permutation;

/// One cell per unit of coefficient. A negative coefficient swaps the first two
/// vertices; degenerate tuples (zero in the oriented model) are dropped.
pub fn expand_cells(s: &Chain) -> Vec<GluedCell> {
    let mut cells = Vec::new();
    for (f, a) in s.terms() {
        if f.is_degenerate() {
            continue;
        }
        let mut simplex = f.vertices().to_vec();
        let mut sign = 1;
        if a < 0 {
            if simplex.len() >= 2 {
                simplex.swap(0, 1);
            } else {
                sign = -1;
            }
        }
        for _ in 0..a.unsigned_abs() {
            cells.push(GluedCell::new(simplex.clone(), sign));
        }
    }
    cells
}

/// The permutation with `to[q] = from[τ(q)]`; labels in `from` are distinct.
pub(crate) fn aligning_permutation(from: &[Vertex], to: &[Vertex]) -> Permutation {
    let images = to.iter().map(|v| from.iter().position(|w| w == v).expect("faces share their labels")).collect();
    Permutation::new(images).expect("faces are permutations of each other")
}

/// Greedy matching of opposite induced orientations within each face class, in
/// `(j, p)` order. Returns the pairing and the unmatched slots.
pub(crate) fn match_slots(cells: &[GluedCell]) -> (FacePairing, Vec<FaceSlot>) {
    let mut groups: BTreeMap<Vec<Vertex>, (Vec<FaceSlot>, Vec<FaceSlot>)> = BTreeMap::new();
    let mut unmatched = Vec::new();
    for (j, c) in cells.iter().enumerate() {
        for p in 0..c.simplex.len() {
            match c.induced_face(p) {
                OrientedClass::Signed { sign, simplex } => {
                    let g = groups.entry(simplex).or_default();
                    if sign > 0 {
                        g.0.push(FaceSlot::new(j, p));
                    } else {
                        g.1.push(FaceSlot::new(j, p));
                    }
                }
                OrientedClass::Zero => unmatched.push(FaceSlot::new(j, p)),
            }
        }
    }
    let mut pairing = FacePairing::new();
    for (plus, minus) in groups.into_values() {
        for (&a, &b) in plus.iter().zip(&minus) {
            let (x, y) = if a < b { (a, b) } else { (b, a) };
            let tau = aligning_permutation(&cells[x.cell].face(x.face), &cells[y.cell].face(y.face));
            pairing.insert(x, y, tau).expect("slots are matched once");
        }
        let n = plus.len().min(minus.len());
        unmatched.extend(plus[n..].iter().chain(&minus[n..]));
    }
    unmatched.sort();
    (pairing, unmatched)
}

/// Pairing data of a cycle; fails with the boundary residue when `s` is not a cycle.
pub fn extract_face_pairing(s: &Chain) -> Result<FacePairing, GluingError> {
    let cells = expand_cells(s);
    let (pairing, unmatched) = match_slots(&cells);
    if !unmatched.is_empty() {
        return Err(GluingError::NotACycle { residue: project_to_oriented(&s.boundary()?)? });
    }
    Ok(pairing)
}

/// Pairing of as many faces as possible; the rest are returned as boundary slots.
pub fn extract_partial_pairing(s: &Chain) -> (FacePairing, Vec<FaceSlot>) {
    match_slots(&expand_cells(s))
}

/// The closed complex of a cycle under a perfect pairing.
pub fn glue(s: &Chain, pairing: &FacePairing) -> Result<GluedComplex, GluingError> {
    let g = glue_with(s, pairing.clone())?;
    if !g.is_closed() {
        return Err(GluingError::PairingMismatch(format!("{} face slots are unmatched", g.boundary_slots().len())));
    }
    Ok(g)
}

/// Glues an arbitrary chain along its partial pairing, keeping unmatched faces as boundary.
pub fn glue_open(s: &Chain) -> Result<GluedComplex, GluingError> {
    glue_with(s, extract_partial_pairing(s).0)
}

fn glue_with(s: &Chain, pairing: FacePairing) -> Result<GluedComplex, GluingError> {
    if s.grade() == 0 {
        return Err(GluingError::PairingMismatch("0-chains have no faces to glue".into()));
    }
    GluedComplex::new(s.grade(), expand_cells(s), pairing)
}

/// `Σ ε_j f_j` over the cells of a closed, orientation-compatible complex.
pub fn fundamental_cycle(g: &GluedComplex) -> Result<Chain, GluingError> {
    if !g.is_closed() {
        return Err(GluingError::NotClosed);
    }
    if !g.orientation_compatible() {
        return Err(GluingError::NotOrientationCompatible);
    }
    let mut c = Chain::zero(g.dim());
    for cell in g.cells() {
        c.add_term(OrderedSimplex::new(cell.simplex.clone())?, cell.sign)?;
    }
    Ok(c)
}

/// Whether the fundamental cycle of the gluing of `s` is homologous to `s` in `k`.
pub fn check_phi_psi_identity(s: &Chain, k: &SimplicialComplex) -> Result<bool, GluingError> {
    if s.is_empty() {
        return Ok(true);
    }
    let pairing = extract_face_pairing(s)?;
    let g = glue(s, &pairing)?;
    let f = fundamental_cycle(&g)?;
    Ok(homologous(k, &project_to_oriented(&f)?, &project_to_oriented(s)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn triangle_boundary_pairing() {
        let s = corpus::triangle_boundary_cycle();
        let pairing = extract_face_pairing(&s).unwrap();
        assert_eq!(pairing.len(), 3);
        for (x, y, _) in pairing.pairs() {
            assert_ne!(x.face, y.face);
        }
        let g = glue(&s, &pairing).unwrap();
        assert_eq!(g.face_counts(), &[3, 3]);
        assert_eq!(g.euler_characteristic(), 0);
        assert_eq!(fundamental_cycle(&g).unwrap(), s);
    }

    #[test]
    fn sphere_gluing() {
        let s = corpus::tetrahedron_cycle();
        let pairing = extract_face_pairing(&s).unwrap();
        assert_eq!(pairing.len(), 6);
        let g = glue(&s, &pairing).unwrap();
        assert_eq!(g.face_counts(), &[4, 6, 4]);
        assert!(g.orientation_compatible());
        assert!(g.check().all());
    }

    #[test]
    fn single_simplex_is_not_a_cycle() {
        let s = Chain::simplex(OrderedSimplex::new(vec![0, 1, 2]).unwrap());
        assert!(matches!(extract_face_pairing(&s), Err(GluingError::NotACycle { .. })));
    }

    #[test]
    fn octahedron_ordered_boundary() {
        let s = corpus::octahedron_cycle();
        let g = glue(&s, &extract_face_pairing(&s).unwrap()).unwrap();
        assert_eq!(g.euler_characteristic(), 2);
        let f = fundamental_cycle(&g).unwrap();
        assert!(!f.boundary().unwrap().is_empty());
        assert!(project_to_oriented(&f.boundary().unwrap()).unwrap().is_zero());
        assert!(check_phi_psi_identity(&s, &corpus::octahedron()).unwrap());
    }
}
