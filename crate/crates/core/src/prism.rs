//! Linear simplices in `Δ^k`, the cone operator `P_k`, and the chain homotopy `D`.
//!
//! `D(Id_{Δ^k}) = P_k(Id + (−1)^{k+1} D ∂ Id)` is computed once per `k` and cached;
//! for any linear `f: Δ^m → Δ^k`, `D f = f_#(D(Id_{Δ^m}))`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::simplex::{barycenter, BaryPoint, Permutation, SimplexError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrismError {
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error("expected a map into Δ^{expected}, got Δ^{found}")]
    TargetMismatch { expected: usize, found: usize },
    #[error("expected source grade {expected}, got {found}")]
    GradeMismatch { expected: usize, found: usize },
    #[error("a linear simplex needs at least one vertex image")]
    Empty,
    #[error("chain is not in S′: {residue} orbit(s) fail the generator test")]
    NotInSPrime { residue: usize },
    #[error("coefficient overflow")]
    Overflow,
}

/// A linear map `Δ^m → Δ^k` given by its vertex images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearMapSimplex {
    target: usize,
    images: Vec<BaryPoint>,
}

impl LinearMapSimplex {
    pub fn new(target: usize, images: Vec<BaryPoint>) -> Result<Self, PrismError> {
        if images.is_empty() {
            return Err(PrismError::Empty);
        }
        if let Some(bad) = images.iter().find(|x| x.dim() != target) {
            return Err(PrismError::TargetMismatch { expected: target, found: bad.dim() });
        }
        Ok(Self { target, images })
    }

    /// `Id_{Δ^k}`.
    pub fn identity(k: usize) -> Self {
        Self { target: k, images: (0..=k).map(|p| BaryPoint::vertex(k, p).expect("p ≤ k")).collect() }
    }

    /// The linear map with vertex images `e_{v_0}, …, e_{v_m}`.
    pub fn from_vertices(target: usize, vertices: &[usize]) -> Result<Self, PrismError> {
        let images = vertices.iter().map(|&v| BaryPoint::vertex(target, v)).collect::<Result<Vec<_>, _>>()?;
        Self::new(target, images)
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn source(&self) -> usize {
        self.images.len() - 1
    }

    pub fn images(&self) -> &[BaryPoint] {
        &self.images
    }

    /// `f∘ι_{m,p}`.
    pub fn face(&self, p: usize) -> LinearMapSimplex {
        let mut images = self.images.clone();
        images.remove(p);
        Self { target: self.target, images }
    }

    /// `f∘τ` for `τ ∈ 𝒮_m`.
    pub fn precompose(&self, tau: &Permutation) -> LinearMapSimplex {
        Self { target: self.target, images: tau.reorder(&self.images) }
    }

    /// `τ∘f` for `τ ∈ 𝒮_k` acting on the target.
    pub fn postcompose(&self, tau: &Permutation) -> Result<LinearMapSimplex, PrismError> {
        let images = self.images.iter().map(|x| tau.apply(x)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { target: self.target, images })
    }

    /// `outer∘self`, where `outer: Δ^k → Δ^n` is linear.
    pub fn push_forward(&self, outer: &LinearMapSimplex) -> Result<LinearMapSimplex, PrismError> {
        if outer.source() != self.target {
            return Err(PrismError::TargetMismatch { expected: outer.source(), found: self.target });
        }
        let images = self.images.iter().map(|x| BaryPoint::affine_combination(&outer.images, x.coords())).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { target: outer.target, images })
    }

    /// `P_k f`: appends `b_k` as the last vertex image.
    pub fn prism(&self) -> LinearMapSimplex {
        let mut images = self.images.clone();
        images.push(barycenter(self.target));
        Self { target: self.target, images }
    }

    /// Vertex images sorted, used to group precomposition orbits.
    fn orbit_key(&self) -> Vec<BaryPoint> {
        let mut key = self.images.clone();
        key.sort();
        key
    }
}

impl fmt::Display for LinearMapSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// Integer combination of linear maps `Δ^m → Δ^k` with fixed `m` and `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearChain {
    source: usize,
    target: usize,
    terms: BTreeMap<LinearMapSimplex, i64>,
}

impl LinearChain {
    pub fn zero(source: usize, target: usize) -> Self {
        Self { source, target, terms: BTreeMap::new() }
    }

    pub fn generator(f: LinearMapSimplex) -> Self {
        Self { source: f.source(), target: f.target, terms: BTreeMap::from([(f, 1)]) }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LinearMapSimplex, i64)> + '_ {
        self.terms.iter().map(|(f, a)| (f, *a))
    }

    pub fn coefficient(&self, f: &LinearMapSimplex) -> i64 {
        self.terms.get(f).copied().unwrap_or(0)
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

    pub fn add_term(&mut self, f: LinearMapSimplex, coeff: i64) -> Result<(), PrismError> {
        if f.target != self.target {
            return Err(PrismError::TargetMismatch { expected: self.target, found: f.target });
        }
        if f.source() != self.source {
            return Err(PrismError::GradeMismatch { expected: self.source, found: f.source() });
        }
        if coeff == 0 {
            return Ok(());
        }
        match self.terms.entry(f) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                let v = e.get().checked_add(coeff).ok_or(PrismError::Overflow)?;
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
        Ok(())
    }

    /// `self + factor·other`; a zero `other` is accepted in any grade.
    pub fn add_scaled(&mut self, factor: i64, other: &LinearChain) -> Result<(), PrismError> {
        for (f, a) in &other.terms {
            self.add_term(f.clone(), a.checked_mul(factor).ok_or(PrismError::Overflow)?)?;
        }
        Ok(())
    }

    pub fn minus(&self, other: &LinearChain) -> Result<LinearChain, PrismError> {
        let mut c = self.clone();
        c.add_scaled(-1, other)?;
        Ok(c)
    }

    /// Boundary, deleting vertex images with sign `(−1)^p`. Zero on grade 0.
    pub fn boundary(&self) -> Result<LinearChain, PrismError> {
        if self.source == 0 {
            return Ok(LinearChain::zero(0, self.target));
        }
        let mut out = LinearChain::zero(self.source - 1, self.target);
        for (f, a) in &self.terms {
            for p in 0..=self.source {
                out.add_term(f.face(p), if p % 2 == 0 { *a } else { -*a })?;
            }
        }
        Ok(out)
    }

    /// Termwise `P_k`.
    pub fn prism(&self) -> LinearChain {
        LinearChain { source: self.source + 1, target: self.target, terms: self.terms.iter().map(|(f, a)| (f.prism(), *a)).collect() }
    }

    /// `outer_#`.
    pub fn push_forward(&self, outer: &LinearMapSimplex) -> Result<LinearChain, PrismError> {
        let mut out = LinearChain::zero(self.source, outer.target);
        for (f, a) in &self.terms {
            out.add_term(f.push_forward(outer)?, *a)?;
        }
        Ok(out)
    }

    /// Whether the chain lies in `S′`, the span of `f − (sign τ) f∘τ`.
    ///
    /// Within one precomposition orbit, free orbits need the signed coefficient sum
    /// to vanish and orbits with repeated images need an even coefficient sum.
    pub fn s_prime_defects(&self) -> usize {
        let mut orbits: BTreeMap<Vec<BaryPoint>, (i64, bool)> = BTreeMap::new();
        for (f, a) in &self.terms {
            let key = f.orbit_key();
            let repeated = key.windows(2).any(|w| w[0] == w[1]);
            let sign = if repeated { 1 } else { Permutation::sorting(&f.images).sign() };
            let slot = orbits.entry(key).or_insert((0, repeated));
            slot.0 += sign * a;
        }
        orbits.values().filter(|(sum, repeated)| if *repeated { sum % 2 != 0 } else { *sum != 0 }).count()
    }

    pub fn is_in_s_prime(&self) -> bool {
        self.s_prime_defects() == 0
    }
}

impl fmt::Display for LinearChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (g, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a:+}{g}")?;
        }
        Ok(())
    }
}

/// The generator `f − (sign τ) f∘τ` of `S′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPrimeGenerator {
    pub f: LinearMapSimplex,
    pub tau: Permutation,
}

impl SPrimeGenerator {
    pub fn new(f: LinearMapSimplex, tau: Permutation) -> Result<Self, PrismError> {
        if tau.degree() != f.source() {
            return Err(PrismError::GradeMismatch { expected: f.source(), found: tau.degree() });
        }
        Ok(Self { f, tau })
    }

    pub fn to_chain(&self) -> LinearChain {
        let mut c = LinearChain::generator(self.f.clone());
        c.add_term(self.f.precompose(&self.tau), -self.tau.sign()).expect("same grade and target");
        c
    }
}

type DCache = Mutex<HashMap<usize, Arc<LinearChain>>>;

fn d_cache() -> &'static DCache {
    static CACHE: OnceLock<DCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `D(Id_{Δ^k})`, a chain of linear maps `Δ^{k+1} → Δ^k`.
pub fn homotopy_of_identity(k: usize) -> Arc<LinearChain> {
    if let Some(hit) = d_cache().lock().expect("cache poisoned").get(&k) {
        return Arc::clone(hit);
    }
    let value = Arc::new(compute_d_identity(k));
    // a concurrent caller may have inserted first; keep whichever landed
    let mut cache = d_cache().lock().expect("cache poisoned");
    Arc::clone(cache.entry(k).or_insert(value))
}

fn compute_d_identity(k: usize) -> LinearChain {
    let id = LinearMapSimplex::identity(k);
    if k == 0 {
        return LinearChain::zero(1, 0);
    }
    let mut inner = LinearChain::generator(id.clone());
    let boundary = LinearChain::generator(id).boundary().expect("identity boundary");
    let d_boundary = homotopy_d(&boundary).expect("faces of the identity are linear");
    let sign = if (k + 1).is_multiple_of(2) { 1 } else { -1 };
    inner.add_scaled(sign, &d_boundary).expect("grades agree");
    inner.prism()
}

/// `D` on a linear chain; zero in grade 0.
pub fn homotopy_d(c: &LinearChain) -> Result<LinearChain, PrismError> {
    let m = c.source();
    let mut out = LinearChain::zero(m + 1, c.target());
    if m == 0 {
        return Ok(out);
    }
    let d_id = homotopy_of_identity(m);
    for (f, a) in c.terms() {
        out.add_scaled(a, &d_id.push_forward(f)?)?;
    }
    Ok(out)
}

/// `∂Dc − (−1)^{m+1}c − D∂c` for a chain of source grade `m`.
pub fn homotopy_defect(c: &LinearChain) -> Result<LinearChain, PrismError> {
    let m = c.source();
    let mut defect = homotopy_d(c)?.boundary()?;
    defect.add_scaled(if (m + 1).is_multiple_of(2) { -1 } else { 1 }, c)?;
    defect.add_scaled(-1, &homotopy_d(&c.boundary()?)?)?;
    Ok(defect)
}

/// Outcome of the homotopy identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyCheck {
    pub holds: bool,
    pub defect: LinearChain,
}

/// Checks `∂D = (−1)^{m+1} Id + D∂` on a chain of `S′`.
pub fn verify_homotopy_identity(c: &LinearChain) -> Result<HomotopyCheck, PrismError> {
    let residue = c.s_prime_defects();
    if residue > 0 {
        return Err(PrismError::NotInSPrime { residue });
    }
    let defect = homotopy_defect(c)?;
    Ok(HomotopyCheck { holds: defect.is_zero(), defect })
}

/// Number of terms of `D(Id_{Δ^k})` before cancellation, `T(k) = 1 + (k+1) T(k−1)`.
pub fn expected_identity_terms(k: usize) -> usize {
    (1..=k).fold(0, |t, j| 1 + (j + 1) * t)
}
