//! Ordered chains, the oriented quotient, and finite simplicial complexes.
//!
//! Vertices are `usize` indices. A generator of the ordered chain group is a vertex
//! tuple, possibly with repeats; the oriented quotient identifies a tuple with the
//! signed sorted tuple and kills tuples with a repeated vertex.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::simplex::Permutation;

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("a simplex needs at least one vertex")]
    EmptySimplex,
    #[error("grade mismatch: expected {expected}, got {found}")]
    GradeMismatch { expected: usize, found: usize },
    #[error("simplex {0:?} repeats a vertex")]
    RepeatedVertex(Vec<Vertex>),
    #[error("{0:?} is not a simplex of the ambient complex")]
    NotInComplex(Vec<Vertex>),
    #[error("coefficient overflow")]
    Overflow,
}

/// An ordered vertex tuple `(v_0, ..., v_k)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderedSimplex(Vec<Vertex>);

impl OrderedSimplex {
    pub fn new(vertices: Vec<Vertex>) -> Result<Self, ChainError> {
        if vertices.is_empty() {
            return Err(ChainError::EmptySimplex);
        }
        Ok(Self(vertices))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_degenerate(&self) -> bool {
        let mut seen = self.0.clone();
        seen.sort_unstable();
        seen.windows(2).any(|w| w[0] == w[1])
    }

    /// The tuple with entry `p` deleted, i.e. `f∘ι_{k,p}`. Panics on a vertex.
    pub fn face(&self, p: usize) -> OrderedSimplex {
        assert!(self.0.len() > 1, "a vertex has no faces");
        let mut v = self.0.clone();
        v.remove(p);
        OrderedSimplex(v)
    }

    /// `f∘τ`: entry `q` of the result is entry `τ(q)` of `self`.
    pub fn precompose(&self, tau: &Permutation) -> OrderedSimplex {
        OrderedSimplex(tau.reorder(&self.0))
    }

    /// Sorted distinct vertices.
    pub fn support(&self) -> Vec<Vertex> {
        let set: BTreeSet<Vertex> = self.0.iter().copied().collect();
        set.into_iter().collect()
    }
}

impl From<&[Vertex]> for OrderedSimplex {
    fn from(v: &[Vertex]) -> Self {
        Self::new(v.to_vec()).expect("non-empty tuple")
    }
}

impl fmt::Display for OrderedSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Normal form of a tuple in the oriented model.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrientedClass {
    Zero,
    Signed { sign: i64, simplex: Vec<Vertex> },
}

impl OrientedClass {
    pub fn sign(&self) -> i64 {
        match self {
            OrientedClass::Zero => 0,
            OrientedClass::Signed { sign, .. } => *sign,
        }
    }

    pub fn simplex(&self) -> Option<&[Vertex]> {
        match self {
            OrientedClass::Zero => None,
            OrientedClass::Signed { simplex, .. } => Some(simplex),
        }
    }
}

/// Sorts the tuple and records the parity of the sorting permutation.
pub fn orient_normalize(f: &OrderedSimplex) -> OrientedClass {
    let sigma = Permutation::sorting(f.vertices());
    let sorted = sigma.reorder(f.vertices());
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return OrientedClass::Zero;
    }
    OrientedClass::Signed { sign: sigma.sign(), simplex: sorted }
}

fn add_coeff<K: Ord>(terms: &mut BTreeMap<K, i64>, key: K, coeff: i64) -> Result<(), ChainError> {
    if coeff == 0 {
        return Ok(());
    }
    let slot = terms.entry(key);
    match slot {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(coeff);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let v = e.get().checked_add(coeff).ok_or(ChainError::Overflow)?;
            if v == 0 {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
    }
    Ok(())
}

/// Finite integer combination of ordered simplices of one grade.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    grade: usize,
    terms: BTreeMap<OrderedSimplex, i64>,
}

impl Chain {
    pub fn zero(grade: usize) -> Self {
        Self { grade, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(grade: usize, terms: I) -> Result<Self, ChainError>
    where
        I: IntoIterator<Item = (OrderedSimplex, i64)>,
    {
        let mut c = Self::zero(grade);
        for (s, a) in terms {
            c.add_term(s, a)?;
        }
        Ok(c)
    }

    /// Shorthand for tests and fixtures: tuples with coefficient.
    pub fn from_tuples(terms: &[(&[Vertex], i64)]) -> Result<Self, ChainError> {
        let grade = terms.first().map(|(v, _)| v.len().saturating_sub(1)).unwrap_or(0);
        let mut c = Self::zero(grade);
        for (v, a) in terms {
            c.add_term(OrderedSimplex::new(v.to_vec())?, *a)?;
        }
        Ok(c)
    }

    pub fn simplex(s: OrderedSimplex) -> Self {
        let grade = s.dim();
        Self { grade, terms: BTreeMap::from([(s, 1)]) }
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn add_term(&mut self, s: OrderedSimplex, coeff: i64) -> Result<(), ChainError> {
        if s.dim() != self.grade {
            return Err(ChainError::GradeMismatch { expected: self.grade, found: s.dim() });
        }
        add_coeff(&mut self.terms, s, coeff)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OrderedSimplex, i64)> + '_ {
        self.terms.iter().map(|(s, a)| (s, *a))
    }

    pub fn coefficient(&self, s: &OrderedSimplex) -> i64 {
        self.terms.get(s).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self + factor·other`. An empty chain is accepted in any grade.
    pub fn add_scaled(&mut self, factor: i64, other: &Chain) -> Result<(), ChainError> {
        if other.is_empty() || factor == 0 {
            return Ok(());
        }
        if self.is_empty() {
            self.grade = other.grade;
        } else if other.grade != self.grade {
            return Err(ChainError::GradeMismatch { expected: self.grade, found: other.grade });
        }
        for (s, a) in &other.terms {
            let c = a.checked_mul(factor).ok_or(ChainError::Overflow)?;
            add_coeff(&mut self.terms, s.clone(), c)?;
        }
        Ok(())
    }

    pub fn plus(&self, other: &Chain) -> Result<Chain, ChainError> {
        let mut c = self.clone();
        c.add_scaled(1, other)?;
        Ok(c)
    }

    pub fn minus(&self, other: &Chain) -> Result<Chain, ChainError> {
        let mut c = self.clone();
        c.add_scaled(-1, other)?;
        Ok(c)
    }

    pub fn scaled(&self, factor: i64) -> Result<Chain, ChainError> {
        let mut c = Chain::zero(self.grade);
        c.add_scaled(factor, self)?;
        Ok(c)
    }

    /// `Σ a_f Σ_p (−1)^p f∘ι_p`; a grade-0 chain has empty boundary (reported in grade 0).
    pub fn boundary(&self) -> Result<Chain, ChainError> {
        if self.grade == 0 {
            return Ok(Chain::zero(0));
        }
        let mut out = Chain::zero(self.grade - 1);
        for (s, a) in &self.terms {
            for p in 0..=self.grade {
                let c = if p % 2 == 0 { *a } else { a.checked_neg().ok_or(ChainError::Overflow)? };
                add_coeff(&mut out.terms, s.face(p), c)?;
            }
        }
        Ok(out)
    }

    /// Vertices occurring in any term.
    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.terms.keys().flat_map(|s| s.vertices().iter().copied()).collect()
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a:+}{s}")?;
        }
        Ok(())
    }
}

/// Chain in the oriented model: sorted tuples without repeats.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrientedChain {
    grade: usize,
    terms: BTreeMap<Vec<Vertex>, i64>,
}

impl OrientedChain {
    pub fn zero(grade: usize) -> Self {
        Self { grade, terms: BTreeMap::new() }
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    /// Adds `coeff·[simplex]`, where `simplex` is any tuple (normalized here).
    pub fn add_tuple(&mut self, simplex: &[Vertex], coeff: i64) -> Result<(), ChainError> {
        if simplex.is_empty() {
            return Err(ChainError::EmptySimplex);
        }
        if simplex.len() != self.grade + 1 {
            return Err(ChainError::GradeMismatch { expected: self.grade, found: simplex.len() - 1 });
        }
        match orient_normalize(&OrderedSimplex(simplex.to_vec())) {
            OrientedClass::Zero => Ok(()),
            OrientedClass::Signed { sign, simplex } => add_coeff(&mut self.terms, simplex, coeff.checked_mul(sign).ok_or(ChainError::Overflow)?),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Vertex], i64)> + '_ {
        self.terms.iter().map(|(s, a)| (s.as_slice(), *a))
    }

    pub fn coefficient(&self, simplex: &[Vertex]) -> i64 {
        self.terms.get(simplex).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_scaled(&mut self, factor: i64, other: &OrientedChain) -> Result<(), ChainError> {
        if other.is_zero() || factor == 0 {
            return Ok(());
        }
        if self.is_zero() {
            self.grade = other.grade;
        } else if other.grade != self.grade {
            return Err(ChainError::GradeMismatch { expected: self.grade, found: other.grade });
        }
        for (s, a) in &other.terms {
            add_coeff(&mut self.terms, s.clone(), a.checked_mul(factor).ok_or(ChainError::Overflow)?)?;
        }
        Ok(())
    }

    pub fn minus(&self, other: &OrientedChain) -> Result<OrientedChain, ChainError> {
        let mut c = self.clone();
        c.add_scaled(-1, other)?;
        Ok(c)
    }

    /// Boundary on sorted tuples; deleting an entry keeps them sorted.
    pub fn boundary(&self) -> Result<OrientedChain, ChainError> {
        if self.grade == 0 {
            return Ok(OrientedChain::zero(0));
        }
        let mut out = OrientedChain::zero(self.grade - 1);
        for (s, a) in &self.terms {
            for p in 0..s.len() {
                let mut face = s.clone();
                face.remove(p);
                let c = if p % 2 == 0 { *a } else { -*a };
                add_coeff(&mut out.terms, face, c)?;
            }
        }
        Ok(out)
    }

    /// The ordered chain of sorted representatives.
    pub fn to_chain(&self) -> Chain {
        Chain { grade: self.grade, terms: self.terms.iter().map(|(s, a)| (OrderedSimplex(s.clone()), *a)).collect() }
    }
}

impl fmt::Display for OrientedChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_chain(), f)
    }
}

/// The projection `S_* → S̄_*`.
pub fn project_to_oriented(c: &Chain) -> Result<OrientedChain, ChainError> {
    let mut out = OrientedChain::zero(c.grade());
    for (s, a) in c.terms() {
        out.add_tuple(s.vertices(), a)?;
    }
    Ok(out)
}

/// Whether the oriented projection of `∂c` vanishes.
pub fn is_cycle_oriented(c: &Chain) -> Result<bool, ChainError> {
    Ok(project_to_oriented(&c.boundary()?)?.is_zero())
}

/// Drops the terms whose vertex support is a simplex of `a`.
pub fn subcomplex_filter(c: &Chain, a: &SimplicialComplex) -> Chain {
    Chain { grade: c.grade, terms: c.terms.iter().filter(|(s, _)| !a.contains(&s.support())).map(|(s, v)| (s.clone(), *v)).collect() }
}

/// Finite abstract simplicial complex, stored as sorted tuples grouped by dimension.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimplicialComplex {
    by_dim: Vec<BTreeSet<Vec<Vertex>>>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Face closure of the given simplices (in any vertex order).
    pub fn from_maximal<I, S>(simplices: I) -> Result<Self, ChainError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[Vertex]>,
    {
        let mut k = Self::empty();
        for s in simplices {
            k.insert_closed(s.as_ref())?;
        }
        Ok(k)
    }

    /// Adds a simplex and all of its faces.
    pub fn insert_closed(&mut self, simplex: &[Vertex]) -> Result<(), ChainError> {
        if simplex.is_empty() {
            return Err(ChainError::EmptySimplex);
        }
        let mut sorted = simplex.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(ChainError::RepeatedVertex(simplex.to_vec()));
        }
        if self.contains(&sorted) {
            return Ok(());
        }
        let n = sorted.len();
        if self.by_dim.len() < n {
            self.by_dim.resize_with(n, BTreeSet::new);
        }
        for mask in 1u64..(1u64 << n) {
            let face: Vec<Vertex> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| sorted[i]).collect();
            self.by_dim[face.len() - 1].insert(face);
        }
        Ok(())
    }

    /// Membership of a sorted tuple.
    pub fn contains(&self, sorted: &[Vertex]) -> bool {
        match sorted.len() {
            0 => false,
            n => self.by_dim.get(n - 1).is_some_and(|s| s.contains(sorted)),
        }
    }

    /// `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.iter().rposition(|s| !s.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        self.dim().is_none()
    }

    pub fn simplices(&self, d: usize) -> impl Iterator<Item = &Vec<Vertex>> + '_ {
        self.by_dim.get(d).into_iter().flatten()
    }

    pub fn count(&self, d: usize) -> usize {
        self.by_dim.get(d).map_or(0, BTreeSet::len)
    }

    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.dim().map_or(0, |d| d + 1)).map(|d| self.count(d)).take_while(|&n| n > 0).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().iter().enumerate().map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.simplices(0).map(|s| s[0])
    }

    /// Simplices not contained in a larger one.
    pub fn maximal_simplices(&self) -> Vec<Vec<Vertex>> {
        let mut covered: BTreeSet<&[Vertex]> = BTreeSet::new();
        let mut out = Vec::new();
        for d in (0..self.by_dim.len()).rev() {
            for s in &self.by_dim[d] {
                if !covered.contains(s.as_slice()) {
                    out.push(s.clone());
                }
            }
            if d > 0 {
                for s in &self.by_dim[d] {
                    for p in 0..s.len() {
                        let mut f = s.clone();
                        f.remove(p);
                        if let Some(stored) = self.by_dim[d - 1].get(&f) {
                            covered.insert(stored.as_slice());
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.by_dim.iter().flatten().all(|s| other.contains(s))
    }

    pub fn union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let n = self.by_dim.len().max(other.by_dim.len());
        let by_dim = (0..n)
            .map(|d| {
                let a = self.by_dim.get(d).into_iter().flatten();
                let b = other.by_dim.get(d).into_iter().flatten();
                a.chain(b).cloned().collect()
            })
            .collect();
        SimplicialComplex { by_dim }
    }

    pub fn intersection(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let by_dim = self.by_dim.iter().map(|s| s.iter().filter(|x| other.contains(x)).cloned().collect()).collect();
        let mut k = SimplicialComplex { by_dim };
        k.trim();
        k
    }

    /// Closure of all simplices containing the given sorted simplex.
    pub fn closed_star(&self, sorted: &[Vertex]) -> SimplicialComplex {
        let mut k = SimplicialComplex::empty();
        for s in self.by_dim.iter().flatten() {
            if sorted.iter().all(|v| s.binary_search(v).is_ok()) {
                k.insert_closed(s).expect("stored simplices are valid");
            }
        }
        k
    }

    /// Whether the sorted tuples of every term of `c` (support with repeats removed) lie in the complex.
    pub fn supports(&self, c: &Chain) -> bool {
        c.terms().all(|(s, _)| self.contains(&s.support()))
    }

    fn trim(&mut self) {
        while self.by_dim.last().is_some_and(BTreeSet::is_empty) {
            self.by_dim.pop();
        }
    }
}
