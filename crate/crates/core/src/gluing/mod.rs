//! Face pairings of cycles, glued pseudomanifolds, and cobordisms with collars.
//!
//! A cycle is expanded into a list of cells (one per unit of coefficient). Each cell
//! `j` has face slots `(j, p)`. A [`FacePairing`] matches slots in pairs together with
//! the permutation aligning the two face tuples:
//! `face(j_2, p_2)[q] = face(j_1, p_1)[τ(q)]`.

mod cobordism;
mod cycle;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::chains::{orient_normalize, ChainError, OrderedSimplex, OrientedChain, OrientedClass, Vertex};
use crate::homology::HomologyError;
use crate::simplex::{Permutation, SimplexError};

pub use cobordism::{build_cobordism, extract_cobordism, BoundaryAssignment, CobordismComplex, CobordismData, DirectCollar};
pub use cycle::{check_phi_psi_identity, expand_cells, extract_face_pairing, extract_partial_pairing, fundamental_cycle, glue, glue_open};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GluingError {
    #[error("chain is not a cycle; boundary residue {residue}")]
    NotACycle { residue: OrientedChain },
    #[error("pairing does not fit the chain: {0}")]
    PairingMismatch(String),
    #[error("glued complex is not orientation-compatible")]
    NotOrientationCompatible,
    #[error("glued complex has unmatched faces")]
    NotClosed,
    #[error("∂s̃ ≠ s₁ − s₀; residue {residue}")]
    BoundaryMismatch { residue: OrientedChain },
    #[error("inconsistent attachment: {0}")]
    InconsistentAttachment(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
}

/// Face `p` of cell `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceSlot {
    pub cell: usize,
    pub face: usize,
}

impl FaceSlot {
    pub fn new(cell: usize, face: usize) -> Self {
        Self { cell, face }
    }
}

impl fmt::Display for FaceSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.cell, self.face)
    }
}

/// A top cell: its vertex map into the ambient complex and an orientation sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GluedCell {
    pub simplex: Vec<Vertex>,
    pub sign: i64,
}

impl GluedCell {
    pub fn new(simplex: Vec<Vertex>, sign: i64) -> Self {
        assert!(sign == 1 || sign == -1, "cell sign must be ±1");
        Self { simplex, sign }
    }

    pub fn face(&self, p: usize) -> Vec<Vertex> {
        let mut f = self.simplex.clone();
        f.remove(p);
        f
    }

    /// `ε·(−1)^p·[face]` in the oriented model.
    pub fn induced_face(&self, p: usize) -> OrientedClass {
        match orient_normalize(&OrderedSimplex::new(self.face(p)).expect("cells have dimension ≥ 1")) {
            OrientedClass::Zero => OrientedClass::Zero,
            OrientedClass::Signed { sign, simplex } => {
                OrientedClass::Signed { sign: sign * self.sign * if p.is_multiple_of(2) { 1 } else { -1 }, simplex }
            }
        }
    }
}

/// Involutive matching of face slots with aligning permutations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FacePairing {
    partner: BTreeMap<FaceSlot, FaceSlot>,
    perm: BTreeMap<(FaceSlot, FaceSlot), Permutation>,
}

impl FacePairing {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `x ~ y` with `face(y)[q] = face(x)[τ(q)]`; the reverse pair gets `τ^{-1}`.
    pub fn insert(&mut self, x: FaceSlot, y: FaceSlot, tau: Permutation) -> Result<(), GluingError> {
        if x == y {
            return Err(GluingError::PairingMismatch(format!("slot {x} paired with itself")));
        }
        for s in [x, y] {
            if self.partner.contains_key(&s) {
                return Err(GluingError::PairingMismatch(format!("slot {s} paired twice")));
            }
        }
        self.partner.insert(x, y);
        self.partner.insert(y, x);
        self.perm.insert((y, x), tau.inverse());
        self.perm.insert((x, y), tau);
        Ok(())
    }

    pub fn partner(&self, x: FaceSlot) -> Option<FaceSlot> {
        self.partner.get(&x).copied()
    }

    pub fn permutation(&self, x: FaceSlot, y: FaceSlot) -> Option<&Permutation> {
        self.perm.get(&(x, y))
    }

    /// Pairs `(x, y, τ)` with `x < y`.
    pub fn pairs(&self) -> impl Iterator<Item = (FaceSlot, FaceSlot, &Permutation)> + '_ {
        self.partner.iter().filter(|(x, y)| x < y).map(|(&x, &y)| (x, y, &self.perm[&(x, y)]))
    }

    pub fn len(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    pub fn matched_slots(&self) -> impl Iterator<Item = FaceSlot> + '_ {
        self.partner.keys().copied()
    }
}

/// Results of checking a pairing against its cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingCheck {
    /// `partner(partner(x)) = x` and no fixed points.
    pub involution: bool,
    /// Every slot occurs exactly once on each side of the matching.
    pub bijective: bool,
    /// `τ(y,x) = τ(x,y)^{-1}` and `sign τ = −ε_1 ε_2 (−1)^{p_1+p_2}`.
    pub inverse_symmetric: bool,
    pub sign_condition: bool,
    /// Face tuples agree after applying the permutation.
    pub aligned: bool,
}

impl PairingCheck {
    pub fn all(&self) -> bool {
        self.involution && self.bijective && self.inverse_symmetric && self.sign_condition && self.aligned
    }
}

fn all_slots(cells: &[GluedCell]) -> impl Iterator<Item = FaceSlot> + '_ {
    cells.iter().enumerate().flat_map(|(j, c)| (0..c.simplex.len()).map(move |p| FaceSlot::new(j, p)))
}

fn parity(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Checks every pairing invariant; `bijective` requires a perfect matching.
pub fn check_pairing(cells: &[GluedCell], pairing: &FacePairing) -> PairingCheck {
    let in_range = |s: FaceSlot| s.cell < cells.len() && s.face < cells[s.cell].simplex.len();
    let involution = pairing.partner.iter().all(|(x, y)| x != y && pairing.partner.get(y) == Some(x) && in_range(*x));
    let bijective = involution && all_slots(cells).all(|s| pairing.partner.contains_key(&s));
    let mut inverse_symmetric = true;
    let mut sign_condition = true;
    let mut aligned = true;
    for (&(x, y), tau) in &pairing.perm {
        if !in_range(x) || !in_range(y) {
            aligned = false;
            continue;
        }
        if pairing.perm.get(&(y, x)) != Some(&tau.inverse()) {
            inverse_symmetric = false;
        }
        let (cx, cy) = (&cells[x.cell], &cells[y.cell]);
        if tau.degree() + 2 != cx.simplex.len() {
            aligned = false;
            continue;
        }
        if tau.sign() != -cx.sign * cy.sign * parity(x.face + y.face) {
            sign_condition = false;
        }
        if cy.face(y.face) != tau.reorder(&cx.face(x.face)) {
            aligned = false;
        }
    }
    PairingCheck { involution, bijective, inverse_symmetric, sign_condition, aligned }
}

/// For each pair, whether the two induced boundary orientations on the shared face
/// are opposite, decided from the labelled face tuples. `None` when the face tuple
/// repeats a label and the labels cannot decide.
pub fn induced_orientations_opposite(cells: &[GluedCell], pairing: &FacePairing) -> Vec<(FaceSlot, FaceSlot, Option<bool>)> {
    pairing
        .pairs()
        .map(|(x, y, _)| {
            let a = cells[x.cell].induced_face(x.face);
            let b = cells[y.cell].induced_face(y.face);
            let verdict = match (a, b) {
                (OrientedClass::Signed { sign: s1, simplex: f1 }, OrientedClass::Signed { sign: s2, simplex: f2 }) if f1 == f2 => Some(s1 == -s2),
                _ => None,
            };
            (x, y, verdict)
        })
        .collect()
}

/// A class of identified codimension-2 faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codim2Face {
    /// Vertex labels of a representative.
    pub simplex: Vec<Vertex>,
    /// Number of (cell, face) incidences in the class.
    pub incidences: usize,
}

/// Cells glued along a face pairing, with derived combinatorics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedComplex {
    dim: usize,
    cells: Vec<GluedCell>,
    pairing: FacePairing,
    boundary_slots: Vec<FaceSlot>,
    face_counts: Vec<usize>,
    codim2: Vec<Codim2Face>,
    orientation_compatible: bool,
    orientable: bool,
    vertex_classes: Vec<Vec<usize>>,
}

impl GluedComplex {
    /// Validates the pairing against the cells and derives counts and orientation data.
    /// Unmatched slots become boundary slots.
    pub fn new(dim: usize, cells: Vec<GluedCell>, pairing: FacePairing) -> Result<Self, GluingError> {
        if dim == 0 {
            return Err(GluingError::PairingMismatch("cells must have dimension ≥ 1".into()));
        }
        if let Some(c) = cells.iter().find(|c| c.simplex.len() != dim + 1) {
            return Err(GluingError::PairingMismatch(format!("cell {:?} is not {dim}-dimensional", c.simplex)));
        }
        let check = check_pairing(&cells, &pairing);
        if !(check.involution && check.inverse_symmetric && check.aligned) {
            return Err(GluingError::PairingMismatch(format!("{check:?}")));
        }
        let boundary_slots: Vec<FaceSlot> = all_slots(&cells).filter(|s| pairing.partner(*s).is_none()).collect();
        let (face_counts, codim2, vertex_classes) = face_classes(dim, &cells, &pairing);
        let orientable = coherent_signs(&cells, &pairing).is_some();
        Ok(Self {
            dim,
            orientation_compatible: check.sign_condition,
            orientable,
            cells,
            pairing,
            boundary_slots,
            face_counts,
            codim2,
            vertex_classes,
        })
    }

    /// Pairs the codimension-one faces shared by exactly two of the given simplices.
    ///
    /// Cells are the sorted simplices with sign `+1`; faces in one simplex are boundary,
    /// faces in more than two are rejected.
    pub fn from_pseudomanifold(simplices: &[Vec<Vertex>]) -> Result<Self, GluingError> {
        let cells: Vec<GluedCell> = simplices
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.sort_unstable();
                GluedCell::new(s, 1)
            })
            .collect();
        let dim = cells.first().map_or(1, |c| c.simplex.len() - 1);
        let mut by_face: BTreeMap<Vec<Vertex>, Vec<FaceSlot>> = BTreeMap::new();
        for s in all_slots(&cells) {
            by_face.entry(cells[s.cell].face(s.face)).or_default().push(s);
        }
        let mut pairing = FacePairing::new();
        for (face, slots) in by_face {
            match slots.as_slice() {
                [_] => {}
                [x, y] => pairing.insert(*x, *y, Permutation::identity(dim - 1))?,
                _ => return Err(GluingError::PairingMismatch(format!("face {face:?} lies in {} cells", slots.len()))),
            }
        }
        Self::new(dim, cells, pairing)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[GluedCell] {
        &self.cells
    }

    pub fn pairing(&self) -> &FacePairing {
        &self.pairing
    }

    pub fn boundary_slots(&self) -> &[FaceSlot] {
        &self.boundary_slots
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_slots.is_empty()
    }

    /// Number of face classes in each dimension `0..=dim`.
    pub fn face_counts(&self) -> &[usize] {
        &self.face_counts
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.face_counts.iter().enumerate().map(|(d, &n)| parity(d) * n as i64).sum()
    }

    pub fn codim2_skeleton(&self) -> &[Codim2Face] {
        &self.codim2
    }

    /// All pairs reverse induced orientations under the given cell signs.
    pub fn orientation_compatible(&self) -> bool {
        self.orientation_compatible
    }

    /// Some choice of cell signs is orientation-compatible.
    pub fn orientable(&self) -> bool {
        self.orientable
    }

    /// Vertex class of each local vertex of each cell.
    pub fn vertex_classes(&self) -> &[Vec<usize>] {
        &self.vertex_classes
    }

    pub fn check(&self) -> PairingCheck {
        check_pairing(&self.cells, &self.pairing)
    }

    /// Every codimension-one face class has one incidence (boundary) or two (interior).
    pub fn codim1_incidences_ok(&self) -> bool {
        let matched = self.pairing.len() * 2;
        matched + self.boundary_slots.len() == self.cells.len() * (self.dim + 1)
    }

    /// `Σ_{boundary slots} ε_j (−1)^p [face]`.
    pub fn boundary_chain(&self) -> Result<OrientedChain, GluingError> {
        let mut out = OrientedChain::zero(self.dim - 1);
        for s in &self.boundary_slots {
            if let OrientedClass::Signed { sign, simplex } = self.cells[s.cell].induced_face(s.face) {
                out.add_tuple(&simplex, sign)?;
            }
        }
        Ok(out)
    }
}

/// Signs `ε_j` making every pair orientation-reversing, if they exist.
pub fn coherent_signs(cells: &[GluedCell], pairing: &FacePairing) -> Option<Vec<i64>> {
    let mut adjacency: Vec<Vec<(usize, i64)>> = vec![Vec::new(); cells.len()];
    for (x, y, tau) in pairing.pairs() {
        // ε_y = −sign τ (−1)^{p_x+p_y} ε_x
        let rel = -tau.sign() * parity(x.face + y.face);
        adjacency[x.cell].push((y.cell, rel));
        adjacency[y.cell].push((x.cell, rel));
    }
    let mut sign = vec![0i64; cells.len()];
    for start in 0..cells.len() {
        if sign[start] != 0 {
            continue;
        }
        sign[start] = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(j) = queue.pop_front() {
            for &(n, rel) in &adjacency[j] {
                let want = rel * sign[j];
                if sign[n] == 0 {
                    sign[n] = want;
                    queue.push_back(n);
                } else if sign[n] != want {
                    return None;
                }
            }
        }
    }
    Some(sign)
}

/// Face-class counts, codimension-2 classes, and per-cell vertex classes.
fn face_classes(dim: usize, cells: &[GluedCell], pairing: &FacePairing) -> (Vec<usize>, Vec<Codim2Face>, Vec<Vec<usize>>) {
    let n = dim + 1;
    let subsets = 1usize << n;
    let id = |cell: usize, mask: usize| cell * subsets + mask;
    let mut uf = UnionFind::<usize>::new(cells.len() * subsets);
    for (x, y, tau) in pairing.pairs() {
        // local vertex of y's cell ↔ local vertex of x's cell
        let local_map: Vec<(usize, usize)> = (0..dim)
            .map(|q| {
                let in_y = if q < y.face { q } else { q + 1 };
                let tq = tau.image(q);
                let in_x = if tq < x.face { tq } else { tq + 1 };
                (in_y, in_x)
            })
            .collect();
        for sub in 1usize..(1 << dim) {
            let (mut my, mut mx) = (0usize, 0usize);
            for (bit, &(a, b)) in local_map.iter().enumerate() {
                if sub >> bit & 1 == 1 {
                    my |= 1 << a;
                    mx |= 1 << b;
                }
            }
            uf.union(id(y.cell, my), id(x.cell, mx));
        }
    }
    let mut classes: Vec<BTreeMap<usize, (usize, usize, usize)>> = vec![BTreeMap::new(); n];
    for cell in 0..cells.len() {
        for mask in 1..subsets {
            let d = mask.count_ones() as usize - 1;
            let root = uf.find(id(cell, mask));
            classes[d].entry(root).or_insert((cell, mask, 0)).2 += 1;
        }
    }
    let counts = classes.iter().map(BTreeMap::len).collect();
    let codim2 = if dim >= 2 {
        classes[dim - 2]
            .values()
            .map(|&(cell, mask, incidences)| Codim2Face {
                simplex: (0..n).filter(|i| mask >> i & 1 == 1).map(|i| cells[cell].simplex[i]).collect(),
                incidences,
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut vertex_ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut per_cell = Vec::with_capacity(cells.len());
    for cell in 0..cells.len() {
        let row = (0..n)
            .map(|v| {
                let root = uf.find(id(cell, 1 << v));
                let next = vertex_ids.len();
                *vertex_ids.entry(root).or_insert(next)
            })
            .collect();
        per_cell.push(row);
    }
    (counts, codim2, per_cell)
}

/// Distinct labels of a vertex-class assignment (used to spot pinched cells).
pub(crate) fn has_repeated_class(classes: &[usize]) -> bool {
    let set: BTreeSet<usize> = classes.iter().copied().collect();
    set.len() != classes.len()
}
