//! Integral homology of finite simplicial complexes and pairs.
//!
//! Two chain models are available. The oriented model has one generator per
//! simplex. The ordered model has one generator per vertex tuple (repeats allowed)
//! whose vertex set is a simplex; it is truncated at degree `dim K + 1`, which is
//! enough for all groups up to `dim K`.

mod snf;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::chains::{ChainError, OrientedChain, SimplicialComplex, Vertex};

pub use snf::{invariant_factors, rank, smith_normal_form, IntegerMatrix, SmithNormalForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("integer overflow during elimination")]
    Overflow,
    #[error("entry ({row},{col}) outside the matrix")]
    IndexOutOfRange { row: usize, col: usize },
    #[error("cannot multiply {left:?} by {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("torsion coefficients {0:?} do not form a divisor chain of integers ≥ 2")]
    InvalidTorsion(Vec<i64>),
    #[error("the given subcomplex is not contained in the complex")]
    NotSubcomplex,
    #[error("the cover does not union to the complex")]
    CoverMismatch,
    #[error("chain term {0:?} is not a simplex of the complex")]
    NotSupported(Vec<Vertex>),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// `ℤ^free_rank ⊕ ℤ/d_1 ⊕ … ⊕ ℤ/d_r` with `d_i | d_{i+1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HomologyGroup {
    free_rank: usize,
    torsion: Vec<i64>,
}

impl HomologyGroup {
    pub fn new(free_rank: usize, torsion: Vec<i64>) -> Result<Self, HomologyError> {
        let chain_ok = torsion.iter().all(|&d| d >= 2) && torsion.windows(2).all(|w| w[1] % w[0] == 0);
        if !chain_ok {
            return Err(HomologyError::InvalidTorsion(torsion));
        }
        Ok(Self { free_rank, torsion })
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, torsion: Vec::new() }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[i64] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainModel {
    Oriented,
    Ordered,
}

/// Generators of one chain model in each degree, with their index.
struct ChainBasis {
    by_degree: Vec<Vec<Vec<Vertex>>>,
    index: Vec<HashMap<Vec<Vertex>, usize>>,
}

impl ChainBasis {
    fn new(k: &SimplicialComplex, a: Option<&SimplicialComplex>, model: ChainModel, top: usize) -> Self {
        let mut by_degree = Vec::with_capacity(top + 1);
        for d in 0..=top {
            let gens: Vec<Vec<Vertex>> = match model {
                ChainModel::Oriented => k.simplices(d).cloned().collect(),
                ChainModel::Ordered => ordered_tuples(k, d),
            };
            let kept = gens.into_iter().filter(|g| a.is_none_or(|a| !a.contains(&support(g)))).collect();
            by_degree.push(kept);
        }
        let index = by_degree.iter().map(|g: &Vec<Vec<Vertex>>| g.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect()).collect();
        Self { by_degree, index }
    }

    fn size(&self, d: usize) -> usize {
        self.by_degree.get(d).map_or(0, Vec::len)
    }

    /// Matrix of `∂_d: C_d → C_{d−1}`; faces outside the basis are dropped
    /// (they vanish in the quotient by the subcomplex).
    fn boundary(&self, d: usize) -> Result<IntegerMatrix, HomologyError> {
        let mut entries = Vec::new();
        if d > 0 {
            for (j, g) in self.by_degree[d].iter().enumerate() {
                for p in 0..g.len() {
                    let mut face = g.clone();
                    face.remove(p);
                    if let Some(&i) = self.index[d - 1].get(&face) {
                        entries.push((i, j, if p % 2 == 0 { 1 } else { -1 }));
                    }
                }
            }
        }
        let rows = if d == 0 { 0 } else { self.size(d - 1) };
        IntegerMatrix::from_entries(rows, self.size(d), entries)
    }
}

fn support(tuple: &[Vertex]) -> Vec<Vertex> {
    let mut s = tuple.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Tuples of length `d+1` whose vertex set is exactly some simplex of `k`.
fn ordered_tuples(k: &SimplicialComplex, d: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    for sdim in 0..=d {
        for simplex in k.simplices(sdim) {
            let n = simplex.len();
            let len = d + 1;
            let mut digits = vec![0usize; len];
            loop {
                let mut hit = vec![false; n];
                for &x in &digits {
                    hit[x] = true;
                }
                if hit.iter().all(|&h| h) {
                    out.push(digits.iter().map(|&x| simplex[x]).collect());
                }
                let Some(pos) = (0..len).rev().find(|&i| digits[i] + 1 < n) else { break };
                digits[pos] += 1;
                for x in &mut digits[pos + 1..] {
                    *x = 0;
                }
            }
        }
    }
    out.sort();
    out
}

fn groups_from_basis(basis: &ChainBasis, top: usize) -> Result<Vec<HomologyGroup>, HomologyError> {
    let factors = (0..=top + 1).map(|d| invariant_factors(&basis.boundary(d)?)).collect::<Result<Vec<_>, _>>()?;
    (0..=top)
        .map(|d| {
            let cycles = basis.size(d) - factors[d].len();
            let next = &factors[d + 1];
            let torsion: Vec<i64> = next.iter().copied().filter(|&x| x > 1).collect();
            HomologyGroup::new(cycles - next.len(), torsion)
        })
        .collect()
}

/// `H_0, …, H_{dim K}`; empty for the empty complex.
pub fn homology(k: &SimplicialComplex, model: ChainModel) -> Result<Vec<HomologyGroup>, HomologyError> {
    let Some(top) = k.dim() else { return Ok(Vec::new()) };
    let basis = ChainBasis::new(k, None, model, top + 1);
    groups_from_basis(&basis, top)
}

/// `H_d(K, A)` for `d ≤ dim K`, from chains of `K` with generators supported in `A` deleted.
pub fn relative_homology(k: &SimplicialComplex, a: &SimplicialComplex, model: ChainModel) -> Result<Vec<HomologyGroup>, HomologyError> {
    if !a.is_subcomplex_of(k) {
        return Err(HomologyError::NotSubcomplex);
    }
    let Some(top) = k.dim() else { return Ok(Vec::new()) };
    let basis = ChainBasis::new(k, Some(a), model, top + 1);
    groups_from_basis(&basis, top)
}

/// Alternating sum of free ranks.
pub fn euler_characteristic(groups: &[HomologyGroup]) -> i64 {
    groups.iter().enumerate().map(|(d, g)| if d % 2 == 0 { g.free_rank() as i64 } else { -(g.free_rank() as i64) }).sum()
}

/// Outcome of the Mayer–Vietoris vanishing check for a cover `U_0, …, U_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MvReport {
    pub cover_size: usize,
    /// Every nonempty intersection has vanishing homology above degree 0.
    pub hypothesis_holds: bool,
    /// `H_l(K) = 0` for all `l > k`.
    pub conclusion_holds: bool,
    /// Index sets of intersections with nonzero higher homology, with the degree.
    pub hypothesis_failures: Vec<(Vec<usize>, usize)>,
    /// Least degree `l > k` with `H_l(K) ≠ 0`.
    pub counterexample_degree: Option<usize>,
}

impl MvReport {
    pub fn passes(&self) -> bool {
        !self.hypothesis_holds || self.conclusion_holds
    }
}

pub fn verify_mv_vanishing(k: &SimplicialComplex, cover: &[SimplicialComplex]) -> Result<MvReport, HomologyError> {
    let union = cover.iter().fold(SimplicialComplex::empty(), |acc, u| acc.union(u));
    if union != *k && !(union.is_empty() && k.is_empty()) {
        return Err(HomologyError::CoverMismatch);
    }
    let n = cover.len();
    let mut failures = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let inter = members[1..].iter().fold(cover[members[0]].clone(), |acc, &i| acc.intersection(&cover[i]));
        for (d, g) in homology(&inter, ChainModel::Oriented)?.iter().enumerate().skip(1) {
            if !g.is_trivial() {
                failures.push((members.clone(), d));
                break;
            }
        }
    }
    let groups = homology(k, ChainModel::Oriented)?;
    let bound = n.saturating_sub(1);
    let counterexample = groups.iter().enumerate().skip(bound + 1).find(|(_, g)| !g.is_trivial()).map(|(d, _)| d);
    Ok(MvReport {
        cover_size: n,
        hypothesis_holds: failures.is_empty(),
        conclusion_holds: counterexample.is_none(),
        hypothesis_failures: failures,
        counterexample_degree: counterexample,
    })
}

/// Solves `∂x = c` over ℤ in the oriented chains of `k`; `None` when `c` is not a boundary.
pub fn solve_boundary(k: &SimplicialComplex, c: &OrientedChain) -> Result<Option<OrientedChain>, HomologyError> {
    let d = c.grade();
    for (s, _) in c.terms() {
        if !k.contains(s) {
            return Err(HomologyError::NotSupported(s.to_vec()));
        }
    }
    if c.is_zero() {
        return Ok(Some(OrientedChain::zero(d + 1)));
    }
    let basis = ChainBasis::new(k, None, ChainModel::Oriented, d + 1);
    let a = basis.boundary(d + 1)?;
    let mut rhs = vec![0i64; a.rows()];
    for (s, coeff) in c.terms() {
        rhs[basis.index[d][s]] = coeff;
    }
    let snf = smith_normal_form(&a)?;
    // S·y = U·c with x = V·y
    let uc = snf.u.apply(&rhs)?;
    let mut y = vec![0i64; a.cols()];
    for (i, &val) in uc.iter().enumerate() {
        let di = if i < a.cols() { snf.s.get(i, i) } else { 0 };
        if di == 0 {
            if val != 0 {
                return Ok(None);
            }
        } else if val % di != 0 {
            return Ok(None);
        } else {
            y[i] = val / di;
        }
    }
    let x = snf.v.apply(&y)?;
    let mut out = OrientedChain::zero(d + 1);
    for (j, &coeff) in x.iter().enumerate() {
        if coeff != 0 {
            out.add_tuple(&basis.by_degree[d + 1][j], coeff)?;
        }
    }
    debug_assert!(out.boundary()?.minus(c)?.is_zero());
    Ok(Some(out))
}

/// Whether two oriented cycles of `k` differ by a boundary.
pub fn homologous(k: &SimplicialComplex, a: &OrientedChain, b: &OrientedChain) -> Result<bool, HomologyError> {
    Ok(solve_boundary(k, &a.minus(b)?)?.is_some())
}

/// Number of generators per degree of a model (for reporting).
pub fn chain_ranks(k: &SimplicialComplex, model: ChainModel) -> Vec<usize> {
    let Some(top) = k.dim() else { return Vec::new() };
    let basis = ChainBasis::new(k, None, model, top + 1);
    (0..=top + 1).map(|d| basis.size(d)).collect()
}
