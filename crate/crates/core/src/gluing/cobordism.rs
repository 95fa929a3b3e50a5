use std::collections::{BTreeMap, BTreeSet};

use super::cycle::{aligning_permutation, expand_cells};
use super::{check_pairing, has_repeated_class, parity, FacePairing, FaceSlot, GluedCell, GluedComplex, GluingError};
use crate::chains::{project_to_oriented, Chain, OrientedChain, OrientedClass, Vertex};
use crate::simplex::Permutation;

/// Attachment of a cell of `M_level` to a face slot of `s̃`:
/// `face(slot)[q] = cell[τ̃(q)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryAssignment {
    pub level: usize,
    pub cell: usize,
    pub slot: FaceSlot,
    pub tau: Permutation,
}

/// Two boundary cells cancelling in `s_1 − s_0` without an `s̃` face between them;
/// their collars are glued end to end. `b[q] = a[τ(q)]` on the cell tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectCollar {
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub tau: Permutation,
}

/// Partition of the face slots of `s̃` into interior pairs and the two boundary sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CobordismData {
    dim: usize,
    total_cells: Vec<GluedCell>,
    level_cells: [Vec<GluedCell>; 2],
    interior: FacePairing,
    boundary: Vec<BoundaryAssignment>,
    direct: Vec<DirectCollar>,
}

impl CobordismData {
    /// Dimension of the cells of `s̃`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total_cells(&self) -> &[GluedCell] {
        &self.total_cells
    }

    pub fn level_cells(&self, level: usize) -> &[GluedCell] {
        &self.level_cells[level]
    }

    pub fn interior(&self) -> &FacePairing {
        &self.interior
    }

    pub fn boundary(&self) -> &[BoundaryAssignment] {
        &self.boundary
    }

    pub fn direct(&self) -> &[DirectCollar] {
        &self.direct
    }

    /// The slot set `𝒞^(level)`.
    pub fn slots_at_level(&self, level: usize) -> BTreeSet<FaceSlot> {
        self.boundary.iter().filter(|b| b.level == level).map(|b| b.slot).collect()
    }

    /// Interior pairs and both boundary sets partition all slots of `s̃`.
    pub fn partition_complete(&self) -> bool {
        let mut seen = BTreeSet::new();
        let mut disjoint = true;
        for s in self.interior.matched_slots().chain(self.boundary.iter().map(|b| b.slot)) {
            disjoint &= seen.insert(s);
        }
        let total: usize = self.total_cells.iter().map(|c| c.simplex.len()).sum();
        disjoint && seen.len() == total
    }

    /// Interior pairs: sign condition and alignment, as for cycles.
    pub fn interior_signs_ok(&self) -> bool {
        let check = check_pairing(&self.total_cells, &self.interior);
        check.involution && check.inverse_symmetric && check.sign_condition && check.aligned
    }

    /// `sign τ̃ = −ε̃ ε (−1)^{i+p̃}` and `face(slot) = cell∘τ̃` for every boundary assignment.
    pub fn boundary_signs_ok(&self) -> bool {
        self.boundary.iter().all(|b| {
            let host = &self.total_cells[b.slot.cell];
            let cell = &self.level_cells[b.level][b.cell];
            let sign_ok = b.tau.sign() == -host.sign * cell.sign * parity(b.level + b.slot.face);
            sign_ok && host.face(b.slot.face) == b.tau.reorder(&cell.simplex)
        })
    }

    /// Every cell of `M_0` and `M_1` is attached exactly once.
    pub fn attachments_complete(&self) -> bool {
        let mut seen = BTreeSet::new();
        let mut ok = true;
        for key in self.boundary.iter().map(|b| (b.level, b.cell)).chain(self.direct.iter().flat_map(|d| [d.a, d.b])) {
            ok &= seen.insert(key);
        }
        ok && seen.len() == self.level_cells[0].len() + self.level_cells[1].len()
    }
}

fn oriented_sign(cell: &GluedCell) -> Option<(Vec<Vertex>, i64)> {
    match crate::chains::orient_normalize(&crate::chains::OrderedSimplex::new(cell.simplex.clone()).ok()?) {
        OrientedClass::Zero => None,
        OrientedClass::Signed { sign, simplex } => Some((simplex, sign * cell.sign)),
    }
}

#[derive(Default)]
struct FaceGroup {
    plus: Vec<FaceSlot>,
    minus: Vec<FaceSlot>,
    need_plus: Vec<(usize, usize)>,
    need_minus: Vec<(usize, usize)>,
}

/// Partitions the slots of `s̃` given `∂s̃ = s_1 − s_0` in the oriented model.
///
/// Boundary cells are assigned first, in `(level, cell)` order, to the first free slot
/// of matching sign; the remaining slots are paired greedily; boundary cells left over
/// cancel pairwise as direct collars.
pub fn extract_cobordism(total: &Chain, s0: &Chain, s1: &Chain) -> Result<CobordismData, GluingError> {
    let mut residue = project_to_oriented(&total.boundary()?)?;
    residue.add_scaled(-1, &project_to_oriented(s1)?)?;
    residue.add_scaled(1, &project_to_oriented(s0)?)?;
    if !residue.is_zero() {
        return Err(GluingError::BoundaryMismatch { residue });
    }
    let dim = if total.is_empty() { s0.grade().max(s1.grade()) + 1 } else { total.grade() };
    let total_cells = expand_cells(total);
    let level_cells = [expand_cells(s0), expand_cells(s1)];

    let mut groups: BTreeMap<Vec<Vertex>, FaceGroup> = BTreeMap::new();
    for (j, c) in total_cells.iter().enumerate() {
        for p in 0..c.simplex.len() {
            if let OrientedClass::Signed { sign, simplex } = c.induced_face(p) {
                let g = groups.entry(simplex).or_default();
                if sign > 0 {
                    g.plus.push(FaceSlot::new(j, p))
                } else {
                    g.minus.push(FaceSlot::new(j, p))
                }
            }
        }
    }
    for (level, cells) in level_cells.iter().enumerate() {
        for (j, c) in cells.iter().enumerate() {
            let (face, sign) = oriented_sign(c).expect("expanded cells are non-degenerate");
            let need = if level == 1 { sign } else { -sign };
            let g = groups.entry(face).or_default();
            if need > 0 {
                g.need_plus.push((level, j))
            } else {
                g.need_minus.push((level, j))
            }
        }
    }

    let mut interior = FacePairing::new();
    let mut boundary = Vec::new();
    let mut direct = Vec::new();
    for g in groups.into_values() {
        let assign = |slots: &[FaceSlot], needs: &[(usize, usize)], out: &mut Vec<BoundaryAssignment>| {
            for (&slot, &(level, cell)) in slots.iter().zip(needs) {
                let tau = aligning_permutation(&level_cells[level][cell].simplex, &total_cells[slot.cell].face(slot.face));
                out.push(BoundaryAssignment { level, cell, slot, tau });
            }
        };
        assign(&g.plus, &g.need_plus, &mut boundary);
        assign(&g.minus, &g.need_minus, &mut boundary);
        let free_plus = g.plus.get(g.need_plus.len()..).unwrap_or_default();
        let free_minus = g.minus.get(g.need_minus.len()..).unwrap_or_default();
        for (&a, &b) in free_plus.iter().zip(free_minus) {
            let (x, y) = if a < b { (a, b) } else { (b, a) };
            let tau = aligning_permutation(&total_cells[x.cell].face(x.face), &total_cells[y.cell].face(y.face));
            interior.insert(x, y, tau)?;
        }
        let left_plus = g.need_plus.get(g.plus.len()..).unwrap_or_default();
        let left_minus = g.need_minus.get(g.minus.len()..).unwrap_or_default();
        for (&a, &b) in left_plus.iter().zip(left_minus) {
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            let tau = aligning_permutation(&level_cells[a.0][a.1].simplex, &level_cells[b.0][b.1].simplex);
            direct.push(DirectCollar { a, b, tau });
        }
        let unbalanced = free_plus.len() != free_minus.len() || left_plus.len() != left_minus.len();
        if unbalanced {
            return Err(GluingError::InconsistentAttachment("unbalanced face group despite ∂s̃ = s₁ − s₀".into()));
        }
    }
    boundary.sort_by_key(|b| (b.level, b.cell));
    Ok(CobordismData { dim, total_cells, level_cells, interior, boundary, direct })
}

/// The glued cobordism `M̃` with collars `I × M_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CobordismComplex {
    complex: GluedComplex,
    free_ends: Vec<(FaceSlot, usize, usize)>,
    closed_boundary: bool,
    boundary_matches: bool,
}

impl CobordismComplex {
    pub fn complex(&self) -> &GluedComplex {
        &self.complex
    }

    /// Boundary slots realizing `M_level` cell by cell: `(slot, level, cell)`.
    pub fn free_ends(&self) -> &[(FaceSlot, usize, usize)] {
        &self.free_ends
    }

    /// The boundary consists of the free collar ends only.
    pub fn closed_boundary(&self) -> bool {
        self.closed_boundary
    }

    /// The oriented boundary chain equals `s_1 − s_0`.
    pub fn boundary_matches(&self) -> bool {
        self.boundary_matches
    }
}

/// A side wall: collar level and its (level, vertex class) pairs.
type WallKey = (usize, Vec<(usize, usize)>);
/// Index of the first staircase cell of each collar, per level.
type Collars = [Vec<usize>; 2];

/// Glues collars `I × M_i` onto the cells of `s̃` according to `data`.
///
/// Each collar over a `k`-cell is the staircase `(a_0…a_m, b_m…b_k)`, `m = 0…k`, with
/// vertices ordered by their global class in `M_i`, so neighbouring collars induce the
/// same triangulation on their common wall.
pub fn build_cobordism(data: &CobordismData, m0: &GluedComplex, m1: &GluedComplex) -> Result<CobordismComplex, GluingError> {
    let k = data.dim - 1;
    let levels = [m0, m1];
    for (i, m) in levels.iter().enumerate() {
        if m.cells() != data.level_cells(i) {
            return Err(GluingError::InconsistentAttachment(format!("M_{i} does not carry the cells of s_{i}")));
        }
        if !m.cells().is_empty() && m.dim() != k {
            return Err(GluingError::InconsistentAttachment(format!("M_{i} has dimension {}, expected {k}", m.dim())));
        }
    }
    if !data.attachments_complete() {
        return Err(GluingError::InconsistentAttachment("some boundary cell has no attachment".into()));
    }

    let mut cells: Vec<GluedCell> = data.total_cells().to_vec();
    let mut pairing = data.interior().clone();
    let mut collars: Collars = [Vec::new(), Vec::new()];
    let mut walls: BTreeMap<WallKey, Vec<(FaceSlot, usize, usize)>> = BTreeMap::new();

    for (i, m) in levels.iter().enumerate() {
        for (c, base) in m.cells().iter().enumerate() {
            let classes = &m.vertex_classes()[c];
            if has_repeated_class(classes) {
                return Err(GluingError::InconsistentAttachment(format!("cell {c} of M_{i} has identified vertices")));
            }
            let rho = Permutation::sorting(classes);
            let u = rho.images();
            let first = cells.len();
            let orient = base.sign * rho.sign();
            for step in 0..=k {
                let mut simplex: Vec<Vertex> = u[..=step].iter().map(|&x| base.simplex[x]).collect();
                simplex.extend(u[step..].iter().map(|&x| base.simplex[x]));
                cells.push(GluedCell::new(simplex, orient * parity(step)));
                if step > 0 {
                    pairing.insert(FaceSlot::new(first + step - 1, step), FaceSlot::new(first + step, step), Permutation::identity(k))?;
                }
                // side walls: positions other than step and step + 1
                for r in (0..k + 2).filter(|&r| r != step && r != step + 1) {
                    let omitted = if r < step { u[r] } else { u[r - 1] };
                    let mut key: Vec<(usize, usize)> = (0..=step).map(|x| (0, classes[u[x]])).collect();
                    key.extend((step..=k).map(|x| (1, classes[u[x]])));
                    key.remove(r);
                    walls.entry((i, key)).or_default().push((FaceSlot::new(first + step, r), c, omitted));
                }
            }
            collars[i].push(first);
        }
    }

    for ((i, _), entries) in walls {
        let m = levels[i];
        let mut used = vec![false; entries.len()];
        for a in 0..entries.len() {
            if used[a] {
                continue;
            }
            let (slot_a, ca, xa) = entries[a];
            let Some(partner) = m.pairing().partner(FaceSlot::new(ca, xa)) else { continue };
            let found = (a + 1..entries.len()).find(|&b| !used[b] && (entries[b].1, entries[b].2) == (partner.cell, partner.face));
            if let Some(b) = found {
                used[a] = true;
                used[b] = true;
                pairing.insert(slot_a, entries[b].0, Permutation::identity(k))?;
            }
        }
    }

    let end_slot = |i: usize, c: usize, top: bool| {
        let first = collars[i][c];
        if top {
            FaceSlot::new(first, 0)
        } else {
            FaceSlot::new(first + k, k + 1)
        }
    };
    // level 1 collars attach at their bottom (level 0), level 0 collars at their top
    let attach = |i: usize, c: usize| end_slot(i, c, i == 0);
    for b in data.boundary() {
        let host = b.slot;
        let end = attach(b.level, b.cell);
        let tau = aligning_permutation(&cells[host.cell].face(host.face), &cells[end.cell].face(end.face));
        pairing.insert(host, end, tau)?;
    }
    for d in data.direct() {
        let (x, y) = (attach(d.a.0, d.a.1), attach(d.b.0, d.b.1));
        let tau = aligning_permutation(&cells[x.cell].face(x.face), &cells[y.cell].face(y.face));
        pairing.insert(x, y, tau)?;
    }

    let mut free_ends = Vec::new();
    for (i, list) in collars.iter().enumerate() {
        for c in 0..list.len() {
            free_ends.push((end_slot(i, c, i == 1), i, c));
        }
    }
    let complex = GluedComplex::new(data.dim, cells, pairing)?;
    let ends: BTreeSet<FaceSlot> = free_ends.iter().map(|e| e.0).collect();
    let closed_boundary = complex.boundary_slots().iter().all(|s| ends.contains(s));
    let expected = level_chain(data.level_cells(1))?.minus(&level_chain(data.level_cells(0))?)?;
    let boundary_matches = complex.boundary_chain()? == expected;
    Ok(CobordismComplex { complex, free_ends, closed_boundary, boundary_matches })
}

fn level_chain(cells: &[GluedCell]) -> Result<OrientedChain, GluingError> {
    let grade = cells.first().map_or(0, |c| c.simplex.len() - 1);
    let mut out = OrientedChain::zero(grade);
    for c in cells {
        out.add_tuple(&c.simplex, c.sign)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::OrderedSimplex;
    use crate::corpus;
    use crate::gluing::glue_open;

    #[test]
    fn single_triangle_partition() {
        let total = Chain::simplex(OrderedSimplex::new(vec![0, 1, 2]).unwrap());
        let s1 = Chain::from_tuples(&[(&[0, 1], 1), (&[1, 2], 1)]).unwrap();
        let s0 = Chain::from_tuples(&[(&[0, 2], 1)]).unwrap();
        let data = extract_cobordism(&total, &s0, &s1).unwrap();
        assert_eq!(data.slots_at_level(1), BTreeSet::from([FaceSlot::new(0, 0), FaceSlot::new(0, 2)]));
        assert_eq!(data.slots_at_level(0), BTreeSet::from([FaceSlot::new(0, 1)]));
        assert!(data.interior().is_empty());
        assert!(data.partition_complete() && data.boundary_signs_ok());
        let built = build_cobordism(&data, &glue_open(&s0).unwrap(), &glue_open(&s1).unwrap()).unwrap();
        assert!(!built.closed_boundary());
        assert!(built.boundary_matches());
    }

    #[test]
    fn cylinder() {
        let p = corpus::cylinder();
        let data = extract_cobordism(&p.total, &p.source, &p.target).unwrap();
        assert_eq!(data.interior().len(), 6);
        assert_eq!(data.slots_at_level(0).len(), 3);
        assert_eq!(data.slots_at_level(1).len(), 3);
        assert!(data.partition_complete() && data.interior_signs_ok() && data.boundary_signs_ok());
        let built = build_cobordism(&data, &glue_open(&p.source).unwrap(), &glue_open(&p.target).unwrap()).unwrap();
        assert!(built.closed_boundary());
        assert!(built.boundary_matches());
        assert!(built.complex().orientation_compatible());
        assert!(built.complex().check().sign_condition);
    }

    #[test]
    fn empty_and_direct() {
        let empty = Chain::zero(2);
        let c = corpus::triangle_boundary_cycle();
        let data = extract_cobordism(&empty, &c, &c).unwrap();
        assert!(data.boundary().is_empty() && data.interior().is_empty());
        assert_eq!(data.direct().len(), 3);
        let built = build_cobordism(&data, &glue_open(&c).unwrap(), &glue_open(&c).unwrap()).unwrap();
        assert!(built.boundary_matches() && built.closed_boundary());
        let other = corpus::cylinder().target;
        assert!(matches!(extract_cobordism(&empty, &c, &other), Err(GluingError::BoundaryMismatch { .. })));
        let none = extract_cobordism(&empty, &Chain::zero(1), &Chain::zero(1)).unwrap();
        let built = build_cobordism(&none, &glue_open(&Chain::zero(1)).unwrap(), &glue_open(&Chain::zero(1)).unwrap()).unwrap();
        assert!(built.complex().cells().is_empty());
    }
}
