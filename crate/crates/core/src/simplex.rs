//! Exact combinatorics and geometry of the standard simplex.
//!
//! Points of `Δ^k` are stored as barycentric coordinate vectors `(t_0, …, t_k)`
//! over exact rationals. Face inclusions, face projections, the three barycenter
//! families and the distinguished neighbourhoods of faces are all decided exactly;
//! float conversion only happens in [`crate::smoothing`].

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact scalar used for all simplex geometry.
pub type Rational = Ratio<i64>;

/// Shorthand for the rational `n/d`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimplexError {
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("projection undefined at this point")]
    UndefinedProjection,
    #[error("invalid barycentric point: {0}")]
    InvalidPoint(String),
    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
}

/// A point of the standard simplex `Δ^k` in barycentric coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaryPoint {
    coords: Vec<Rational>,
}

impl BaryPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self, SimplexError> {
        if coords.is_empty() {
            return Err(SimplexError::InvalidPoint("no coordinates".into()));
        }
        if coords.iter().any(|c| c.is_negative()) {
            return Err(SimplexError::InvalidPoint(format!("negative coordinate in {coords:?}")));
        }
        let total: Rational = coords.iter().sum();
        if !total.is_one() {
            return Err(SimplexError::InvalidPoint(format!("coordinates sum to {total}")));
        }
        Ok(Self { coords })
    }

    /// Builds a point from integer weights, normalising by their sum.
    pub fn from_weights(weights: &[i64]) -> Result<Self, SimplexError> {
        let total: i64 = weights.iter().sum();
        if total <= 0 {
            return Err(SimplexError::InvalidPoint(format!("weights {weights:?}")));
        }
        Self::new(weights.iter().map(|&w| q(w, total)).collect())
    }

    /// The coordinate vertex `e_p` of `Δ^k`.
    pub fn vertex(k: usize, p: usize) -> Result<Self, SimplexError> {
        check_index(p, k)?;
        let mut coords = vec![Rational::zero(); k + 1];
        coords[p] = Rational::one();
        Ok(Self { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn coord(&self, p: usize) -> Rational {
        self.coords[p]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(rational_to_f64).collect()
    }

    /// Affine combination `Σ w_i p_i`; weights must sum to one.
    pub fn affine_combination(points: &[BaryPoint], weights: &[Rational]) -> Result<Self, SimplexError> {
        let dim = points.first().map(BaryPoint::dim).ok_or_else(|| SimplexError::InvalidPoint("empty combination".into()))?;
        let mut coords = vec![Rational::zero(); dim + 1];
        for (pt, w) in points.iter().zip(weights) {
            if pt.dim() != dim {
                return Err(SimplexError::DimensionMismatch { expected: dim, found: pt.dim() });
            }
            for (c, x) in coords.iter_mut().zip(&pt.coords) {
                *c += *w * *x;
            }
        }
        Self::new(coords)
    }

    pub(crate) fn from_coords_unchecked(coords: Vec<Rational>) -> Self {
        Self { coords }
    }
}

impl fmt::Display for BaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check_index(p: usize, k: usize) -> Result<(), SimplexError> {
    if p > k {
        Err(SimplexError::IndexOutOfRange { index: p, dim: k })
    } else {
        Ok(())
    }
}

/// A permutation of `{0, …, k}` in one-line notation: `images[q] = τ(q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, SimplexError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(SimplexError::InvalidPermutation(images));
            }
            seen[i] = true;
        }
        if images.is_empty() {
            return Err(SimplexError::InvalidPermutation(images));
        }
        Ok(Self { images })
    }

    /// Identity of `𝒮_k`, acting on `{0, …, k}`.
    pub fn identity(k: usize) -> Self {
        Self { images: (0..=k).collect() }
    }

    /// The transposition swapping `a` and `b` in `𝒮_k`.
    pub fn transposition(k: usize, a: usize, b: usize) -> Result<Self, SimplexError> {
        check_index(a, k)?;
        check_index(b, k)?;
        let mut images: Vec<usize> = (0..=k).collect();
        images.swap(a, b);
        Ok(Self { images })
    }

    /// The permutation sorting `keys` ascending: `keys[σ(0)] ≤ keys[σ(1)] ≤ …`
    /// with ties broken by position.
    pub fn sorting<T: Ord>(keys: &[T]) -> Self {
        let mut images: Vec<usize> = (0..keys.len()).collect();
        images.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
        Self { images }
    }

    /// All permutations of `{0, …, k}` in lexicographic order.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..=k).collect();
        loop {
            out.push(Self { images: current.clone() });
            // next lexicographic permutation
            let Some(i) = (0..current.len().saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
                break;
            };
            let j = (i + 1..current.len()).rev().find(|&j| current[j] > current[i]).expect("successor exists");
            current.swap(i, j);
            current[i + 1..].reverse();
        }
        out
    }

    /// `k` such that this permutes `{0, …, k}`.
    pub fn degree(&self) -> usize {
        self.images.len() - 1
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image(&self, q: usize) -> usize {
        self.images[q]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Parity by inversion count.
    pub fn sign(&self) -> i64 {
        let mut inversions = 0usize;
        for i in 0..self.images.len() {
            for j in i + 1..self.images.len() {
                if self.images[i] > self.images[j] {
                    inversions += 1;
                }
            }
        }
        if inversions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.images.len(), other.images.len(), "composing permutations of different degree");
        Self { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Self { images }
    }

    /// The image of this permutation under `𝒮_k ⊂ 𝒮_{k+1}` (fixing `k+1`).
    pub fn extend(&self) -> Permutation {
        let mut images = self.images.clone();
        images.push(images.len());
        Self { images }
    }

    /// Moves entry `q` of `values` to slot `τ(q)`: the coordinate action of the
    /// linear map `τ(e_q) = e_{τ(q)}`.
    pub fn permute_coords<T: Clone>(&self, values: &[T]) -> Vec<T> {
        assert_eq!(values.len(), self.images.len());
        let mut out = values.to_vec();
        for (qi, v) in values.iter().enumerate() {
            out[self.images[qi]] = v.clone();
        }
        out
    }

    /// Precomposition of a vertex tuple: `(f∘τ)(e_q) = f(e_{τ(q)})`.
    pub fn reorder<T: Clone>(&self, tuple: &[T]) -> Vec<T> {
        assert_eq!(tuple.len(), self.images.len());
        self.images.iter().map(|&i| tuple[i].clone()).collect()
    }

    /// The linear self-map of `Δ^k` induced by this permutation.
    pub fn apply(&self, x: &BaryPoint) -> Result<BaryPoint, SimplexError> {
        if x.dim() != self.degree() {
            return Err(SimplexError::DimensionMismatch { expected: self.degree(), found: x.dim() });
        }
        Ok(BaryPoint::from_coords_unchecked(self.permute_coords(&x.coords)))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// The face inclusion `ι_{k,p}: Δ^{k-1} → Δ^k_p ⊂ Δ^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaceInclusion {
    k: usize,
    p: usize,
}

impl FaceInclusion {
    pub fn new(k: usize, p: usize) -> Result<Self, SimplexError> {
        if k == 0 {
            return Err(SimplexError::IndexOutOfRange { index: p, dim: k });
        }
        check_index(p, k)?;
        Ok(Self { k, p })
    }

    pub fn target_dim(&self) -> usize {
        self.k
    }

    pub fn omitted(&self) -> usize {
        self.p
    }

    /// Index of `ι(e_q)`: `q` if `q < p`, else `q + 1`.
    pub fn map_index(&self, q: usize) -> usize {
        if q < self.p {
            q
        } else {
            q + 1
        }
    }

    /// Inverse of [`Self::map_index`]; `None` for the omitted vertex.
    pub fn preimage_index(&self, r: usize) -> Option<usize> {
        match r.cmp(&self.p) {
            std::cmp::Ordering::Less => Some(r),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(r - 1),
        }
    }

    /// Vertex images `ι(e_0), …, ι(e_{k-1})` as coordinate indices of `Δ^k`.
    pub fn vertex_images(&self) -> Vec<usize> {
        (0..self.k).map(|q| self.map_index(q)).collect()
    }

    /// Inserts `zero` at slot `p`.
    pub fn insert<T: Clone>(&self, values: &[T], zero: T) -> Vec<T> {
        assert_eq!(values.len(), self.k);
        let mut out = Vec::with_capacity(self.k + 1);
        out.extend_from_slice(&values[..self.p]);
        out.push(zero);
        out.extend_from_slice(&values[self.p..]);
        out
    }

    /// Removes slot `p`.
    pub fn remove<T: Clone>(&self, values: &[T]) -> Vec<T> {
        assert_eq!(values.len(), self.k + 1);
        values.iter().enumerate().filter(|&(i, _)| i != self.p).map(|(_, v)| v.clone()).collect()
    }

    pub fn apply(&self, x: &BaryPoint) -> Result<BaryPoint, SimplexError> {
        if x.dim() + 1 != self.k {
            return Err(SimplexError::DimensionMismatch { expected: self.k - 1, found: x.dim() });
        }
        Ok(BaryPoint::from_coords_unchecked(self.insert(&x.coords, Rational::zero())))
    }

    /// `ι^{-1}` on the face `Δ^k_p`; `None` off the face.
    pub fn restrict(&self, x: &BaryPoint) -> Option<BaryPoint> {
        if x.dim() != self.k || !x.coords[self.p].is_zero() {
            return None;
        }
        Some(BaryPoint::from_coords_unchecked(self.remove(&x.coords)))
    }
}

/// `ι_{k,p}` as a list of vertex images.
pub fn face_inclusion(k: usize, p: usize) -> Result<FaceInclusion, SimplexError> {
    FaceInclusion::new(k, p)
}

/// The projection `π̃^k_p` of `Δ^k − {e_p}` onto the face `Δ^k_p`.
pub fn project_to_face(x: &BaryPoint, p: usize) -> Result<BaryPoint, SimplexError> {
    check_index(p, x.dim())?;
    let rest = Rational::one() - x.coords[p];
    if rest.is_zero() {
        return Err(SimplexError::UndefinedProjection);
    }
    let coords = x.coords.iter().enumerate().map(|(i, c)| if i == p { Rational::zero() } else { *c / rest }).collect();
    Ok(BaryPoint::from_coords_unchecked(coords))
}

/// The projection `π̃^k_{p,q}` of `Δ^k − CH(e_p, e_q)` onto `Δ^k_{p,q}`.
pub fn project_to_codim2(x: &BaryPoint, p: usize, q_: usize) -> Result<BaryPoint, SimplexError> {
    check_index(p, x.dim())?;
    check_index(q_, x.dim())?;
    if p == q_ {
        return Err(SimplexError::InvalidRegion(format!("repeated index {p}")));
    }
    let rest = Rational::one() - x.coords[p] - x.coords[q_];
    if rest.is_zero() {
        return Err(SimplexError::UndefinedProjection);
    }
    let coords = x.coords.iter().enumerate().map(|(i, c)| if i == p || i == q_ { Rational::zero() } else { *c / rest }).collect();
    Ok(BaryPoint::from_coords_unchecked(coords))
}

/// The barycenter `b_k`.
pub fn barycenter(k: usize) -> BaryPoint {
    BaryPoint::from_coords_unchecked(vec![q(1, k as i64 + 1); k + 1])
}

/// `b_{k,p} = ι_{k,p}(b_{k-1})`, the barycenter of the face `Δ^k_p`.
pub fn face_barycenter(k: usize, p: usize) -> Result<BaryPoint, SimplexError> {
    FaceInclusion::new(k, p)?.apply(&barycenter(k - 1))
}

/// `b'_{k,p} = (b_k + Σ_{q≠p} e_q) / (k+1)`, the barycenter of the simplex
/// spanned by `b_k` and the vertices of `Δ^k_p`.
pub fn cone_barycenter(k: usize, p: usize) -> Result<BaryPoint, SimplexError> {
    check_index(p, k)?;
    let mut points = vec![barycenter(k)];
    for v in (0..=k).filter(|&v| v != p) {
        points.push(BaryPoint::vertex(k, v)?);
    }
    let w = q(1, k as i64 + 1);
    BaryPoint::affine_combination(&points, &vec![w; k + 1])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarycenterFamily {
    pub center: BaryPoint,
    pub face_centers: Vec<BaryPoint>,
    pub cone_centers: Vec<BaryPoint>,
}

/// `b_k`, the list of `b_{k,p}` and the list of `b'_{k,p}`.
/// For `k = 0` the two face families are empty.
pub fn barycenter_points(k: usize) -> BarycenterFamily {
    let (face_centers, cone_centers) = if k == 0 {
        (Vec::new(), Vec::new())
    } else {
        (
            (0..=k).map(|p| face_barycenter(k, p).expect("index in range")).collect(),
            (0..=k).map(|p| cone_barycenter(k, p).expect("index in range")).collect(),
        )
    };
    BarycenterFamily { center: barycenter(k), face_centers, cone_centers }
}

/// The distinguished subsets of `Δ^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionSpec {
    /// `U^k_p`, a neighbourhood of `Int Δ^k_p`.
    UFace { k: usize, p: usize },
    /// `Ũ^k_{p,q}`.
    UTildeCodim2 { k: usize, p: usize, q: usize },
    /// `U^k_{p,q}`.
    UCodim2 { k: usize, p: usize, q: usize },
    /// The closed face `Δ^k_p`.
    Face { k: usize, p: usize },
    /// The closed codimension-two face `Δ^k_{p,q}`.
    Codim2Face { k: usize, p: usize, q: usize },
    /// `Int Δ^k`.
    Interior { k: usize },
}

/// Sign constraint on one coefficient of a generator expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Zero,
    NonNegative,
    Positive,
}

impl Bound {
    fn admits(self, t: &Rational, closure: bool) -> bool {
        match self {
            Bound::Zero => t.is_zero(),
            Bound::NonNegative => !t.is_negative(),
            Bound::Positive if closure => !t.is_negative(),
            Bound::Positive => t.is_positive(),
        }
    }
}

/// Result of [`region_contains`]: the verdict plus the exact expansion
/// coefficients of the point in the region's generator system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub contains: bool,
    pub coefficients: Vec<Rational>,
}

impl RegionSpec {
    pub fn dim(&self) -> usize {
        match *self {
            RegionSpec::UFace { k, .. }
            | RegionSpec::UTildeCodim2 { k, .. }
            | RegionSpec::UCodim2 { k, .. }
            | RegionSpec::Face { k, .. }
            | RegionSpec::Codim2Face { k, .. }
            | RegionSpec::Interior { k } => k,
        }
    }

    pub fn validate(&self) -> Result<(), SimplexError> {
        match *self {
            RegionSpec::UFace { k, p } | RegionSpec::Face { k, p } => {
                if k == 0 {
                    return Err(SimplexError::InvalidRegion("faces need k ≥ 1".into()));
                }
                check_index(p, k)
            }
            RegionSpec::UTildeCodim2 { k, p, q } | RegionSpec::UCodim2 { k, p, q } | RegionSpec::Codim2Face { k, p, q } => {
                check_index(p, k)?;
                check_index(q, k)?;
                if p == q {
                    return Err(SimplexError::InvalidRegion(format!("p = q = {p}")));
                }
                Ok(())
            }
            RegionSpec::Interior { .. } => Ok(()),
        }
    }

    /// The affinely independent generator points, one per coefficient slot.
    pub fn generators(&self) -> Result<Arc<[BaryPoint]>, SimplexError> {
        self.validate()?;
        static CACHE: OnceLock<Mutex<HashMap<RegionSpec, Arc<[BaryPoint]>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(g) = cache.lock().expect("generator cache poisoned").get(self) {
            return Ok(g.clone());
        }
        let g: Arc<[BaryPoint]> = self.derive_generators()?.into();
        cache.lock().expect("generator cache poisoned").entry(*self).or_insert_with(|| g.clone());
        Ok(g)
    }

    fn derive_generators(&self) -> Result<Vec<BaryPoint>, SimplexError> {
        let k = self.dim();
        let mut gens: Vec<BaryPoint> = (0..=k).map(|v| BaryPoint::vertex(k, v)).collect::<Result<_, _>>()?;
        match *self {
            RegionSpec::UFace { p, .. } => gens[p] = cone_barycenter(k, p)?,
            RegionSpec::UTildeCodim2 { p, q, .. } => {
                gens[p] = face_barycenter(k, p)?;
                gens[q] = face_barycenter(k, q)?;
            }
            RegionSpec::UCodim2 { p, q, .. } => {
                gens[p] = nested_cone_barycenter(k, p, q)?;
                gens[q] = nested_cone_barycenter(k, q, p)?;
            }
            RegionSpec::Face { .. } | RegionSpec::Codim2Face { .. } | RegionSpec::Interior { .. } => {}
        }
        Ok(gens)
    }

    pub fn bound(&self, slot: usize) -> Bound {
        match *self {
            RegionSpec::UFace { p, .. } if slot == p => Bound::NonNegative,
            RegionSpec::UTildeCodim2 { p, q, .. } | RegionSpec::UCodim2 { p, q, .. } if slot == p || slot == q => Bound::NonNegative,
            RegionSpec::UFace { .. } | RegionSpec::UTildeCodim2 { .. } | RegionSpec::UCodim2 { .. } | RegionSpec::Interior { .. } => Bound::Positive,
            RegionSpec::Face { p, .. } if slot == p => Bound::Zero,
            RegionSpec::Codim2Face { p, q, .. } if slot == p || slot == q => Bound::Zero,
            RegionSpec::Face { .. } | RegionSpec::Codim2Face { .. } => Bound::NonNegative,
        }
    }
}

/// `ι_{k,p}(b'_{k-1, ι_{k,p}^{-1}(q)})`: the generator attached to slot `p` of `U^k_{p,q}`.
fn nested_cone_barycenter(k: usize, p: usize, q_: usize) -> Result<BaryPoint, SimplexError> {
    let inc = FaceInclusion::new(k, p)?;
    let inner = inc.preimage_index(q_).ok_or(SimplexError::InvalidRegion(format!("p = q = {p}")))?;
    inc.apply(&cone_barycenter(k - 1, inner)?)
}

/// Decides membership by solving the barycentric expansion of `x` in the
/// region's generator system exactly. Strict inequalities are taken literally.
pub fn region_contains(region: &RegionSpec, x: &BaryPoint) -> Result<Membership, SimplexError> {
    membership(region, x, false)
}

/// As [`region_contains`] but for the topological closure of the region.
pub fn region_closure_contains(region: &RegionSpec, x: &BaryPoint) -> Result<Membership, SimplexError> {
    membership(region, x, true)
}

fn membership(region: &RegionSpec, x: &BaryPoint, closure: bool) -> Result<Membership, SimplexError> {
    if x.dim() != region.dim() {
        return Err(SimplexError::DimensionMismatch { expected: region.dim(), found: x.dim() });
    }
    let gens = region.generators()?;
    let coefficients = solve_expansion(&gens, x)?;
    let contains = coefficients.iter().enumerate().all(|(slot, t)| region.bound(slot).admits(t, closure));
    Ok(Membership { contains, coefficients })
}

/// Solves `Σ t_i g_i = x` by exact Gaussian elimination.
fn solve_expansion(gens: &[BaryPoint], x: &BaryPoint) -> Result<Vec<Rational>, SimplexError> {
    let n = gens.len();
    // rows = coordinates, columns = generators, augmented with x
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|r| {
            let mut row: Vec<Rational> = gens.iter().map(|g| g.coords[r]).collect();
            row.push(x.coords[r]);
            row
        })
        .collect();
    for col in 0..n {
        let pivot =
            (col..n).find(|&r| !m[r][col].is_zero()).ok_or_else(|| SimplexError::InvalidRegion("generators are affinely dependent".into()))?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for v in m[col].iter_mut() {
            *v *= inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col];
                let pivot_row = m[col].clone();
                for (dst, src) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *dst -= factor * src;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n]).collect())
}

/// Returns `(τ_p, τ(p))` with `τ∘ι_{k,p} = ι_{k,τ(p)}∘τ_p`.
///
/// The sign relation `sign τ_p = (-1)^{p+τ(p)} sign τ` is checked on every call.
pub fn induced_face_permutation(tau: &Permutation, p: usize) -> Result<(Permutation, usize), SimplexError> {
    let k = tau.degree();
    let source = FaceInclusion::new(k, p)?;
    let target_face = tau.image(p);
    let target = FaceInclusion::new(k, target_face)?;
    let images = (0..k).map(|qi| target.preimage_index(tau.image(source.map_index(qi))).expect("τ maps the face onto face τ(p)")).collect();
    let tau_p = Permutation::new(images)?;
    let parity = if (p + target_face).is_multiple_of(2) { 1 } else { -1 };
    assert_eq!(tau_p.sign(), parity * tau.sign(), "face sign identity violated for {tau} at {p}");
    Ok((tau_p, target_face))
}
