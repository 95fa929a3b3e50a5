//! Bump functions `η̃_{p,q}` and the smoothing self-maps `φ̃_{k+1}`, `φ_k`.
//!
//! Everything here is binary64. Points are barycentric coordinate slices.
//!
//! In barycentric coordinates of `Δ^n` the two neighbourhoods of `Int Δ^n_{p,q}`
//! have closed forms: with `s = x_p + x_q` and `r` ranging over the other indices,
//!
//! * `x ∈ Ũ^n_{p,q}` iff `x_r > s` for all `r`,
//! * `x ∈ U^n_{p,q}` iff `x_r > (n+1)·s` for all `r`.
//!
//! The bump is `η̃_{p,q}(x) = Π_r h(x_r / s)` where `h` rises smoothly from 0 at
//! ratio 1 to 1 at ratio `n+1`. It is symmetric in the `r` indices and in `p, q`,
//! so the relabelling rule `η̃_{τ(p),τ(q)} = η̃_{p,q}∘τ^{-1}` holds identically.

use thiserror::Error;

use crate::simplex::FaceInclusion;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmoothingError {
    #[error("point lies on the excluded locus of η̃_{{{p},{q}}}")]
    UndefinedInput { p: usize, q: usize },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid bump profile: {0}")]
    InvalidProfile(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

const POINT_TOLERANCE: f64 = 1e-9;

/// Smooth cutoff profile with thresholds `0 < lower < upper < 1`, applied to the
/// bumps on `Δ^{dim}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpSpec {
    dim: usize,
    lower: f64,
    upper: f64,
}

impl BumpSpec {
    pub fn new(dim: usize, lower: f64, upper: f64) -> Result<Self, SmoothingError> {
        if !(0.0 < lower && lower < upper && upper < 1.0) {
            return Err(SmoothingError::InvalidProfile(format!("need 0 < {lower} < {upper} < 1")));
        }
        if dim < 2 {
            return Err(SmoothingError::InvalidProfile(format!("bumps live on Δ^n with n ≥ 2, got {dim}")));
        }
        Ok(Self { dim, lower, upper })
    }

    /// Thresholds `(1/4, 3/4)`.
    pub fn standard(dim: usize) -> Result<Self, SmoothingError> {
        Self::new(dim, 0.25, 0.75)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn thresholds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// 0 for `s ≤ lower`, 1 for `s ≥ upper`, strictly increasing and `C^∞` between.
    pub fn profile(&self, s: f64) -> f64 {
        if s <= self.lower {
            return 0.0;
        }
        if s >= self.upper {
            return 1.0;
        }
        let t = (s - self.lower) / (self.upper - self.lower);
        let a = flat(t);
        let b = flat(1.0 - t);
        a / (a + b)
    }

    /// Cutoff in the coordinate ratio `u = x_r / (x_p + x_q)`.
    fn ratio_cutoff(&self, u: f64) -> f64 {
        self.profile((u - 1.0) / self.dim as f64)
    }

    /// `η̃_{p,q}(x)` for `x ∈ Δ^{dim}`.
    pub fn eta(&self, p: usize, q: usize, x: &[f64]) -> Result<f64, SmoothingError> {
        check_point(x, self.dim)?;
        self.check_pair(p, q)?;
        Ok(self.eta_unchecked(p, q, x)?.unwrap_or(1.0))
    }

    fn check_pair(&self, p: usize, q: usize) -> Result<(), SmoothingError> {
        for i in [p, q] {
            if i > self.dim {
                return Err(SmoothingError::IndexOutOfRange { index: i, dim: self.dim });
            }
        }
        if p == q {
            return Err(SmoothingError::InvalidPoint(format!("η̃ needs distinct indices, got {p} twice")));
        }
        Ok(())
    }

    /// `Ok(None)` means `x ∈ Int Δ_{p,q}` where the bump is identically one.
    fn eta_unchecked(&self, p: usize, q: usize, x: &[f64]) -> Result<Option<f64>, SmoothingError> {
        let s = x[p] + x[q];
        let others = x.iter().enumerate().filter(|&(r, _)| r != p && r != q).map(|(_, &v)| v);
        if s == 0.0 {
            return if others.clone().any(|v| v == 0.0) { Err(SmoothingError::UndefinedInput { p, q }) } else { Ok(None) };
        }
        let mut factors: Vec<f64> = Vec::with_capacity(self.dim);
        for v in others {
            let h = self.ratio_cutoff(v / s);
            if h == 0.0 {
                return Ok(Some(0.0));
            }
            factors.push(h);
        }
        // order-independent product keeps the permutation symmetry bit-exact
        factors.sort_by(f64::total_cmp);
        Ok(Some(factors.into_iter().product()))
    }
}

fn flat(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn check_point(x: &[f64], dim: usize) -> Result<(), SmoothingError> {
    if x.len() != dim + 1 {
        return Err(SmoothingError::InvalidPoint(format!("expected {} coordinates, got {}", dim + 1, x.len())));
    }
    if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(SmoothingError::InvalidPoint(format!("{x:?} has a negative or non-finite coordinate")));
    }
    let total: f64 = x.iter().sum();
    if (total - 1.0).abs() > POINT_TOLERANCE {
        return Err(SmoothingError::InvalidPoint(format!("coordinates sum to {total}")));
    }
    Ok(())
}

/// `π̃_{p,q}` in floats; callers guarantee `x_p + x_q < 1`.
fn project_codim2(x: &[f64], p: usize, q: usize) -> Vec<f64> {
    let rest = 1.0 - x[p] - x[q];
    x.iter().enumerate().map(|(i, &v)| if i == p || i == q { 0.0 } else { v / rest }).collect()
}

/// The pair `(φ_k, φ̃_{k+1})` built from one bump profile on `Δ^{k+1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothingMap {
    k: usize,
    bump: BumpSpec,
}

impl SmoothingMap {
    pub fn new(k: usize, bump: BumpSpec) -> Result<Self, SmoothingError> {
        if k == 0 || bump.dim() != k + 1 {
            return Err(SmoothingError::InvalidProfile(format!("φ_{k} needs k ≥ 1 and a bump on Δ^{}", k + 1)));
        }
        Ok(Self { k, bump })
    }

    pub fn standard(k: usize) -> Result<Self, SmoothingError> {
        if k == 0 {
            return Err(SmoothingError::InvalidProfile("φ_0 is not defined".into()));
        }
        Self::new(k, BumpSpec::standard(k + 1)?)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bump(&self) -> &BumpSpec {
        &self.bump
    }

    /// `φ̃_{k+1}(x) = x + Σ_{p<q} η̃_{p,q}(x)·(π̃_{p,q}(x) − x)`.
    ///
    /// Terms are evaluated coefficient first: a vanishing bump skips the projection.
    pub fn phi_tilde(&self, x: &[f64]) -> Result<Vec<f64>, SmoothingError> {
        let n = self.k + 1;
        check_point(x, n)?;
        let mut out = x.to_vec();
        for p in 0..=n {
            for q in p + 1..=n {
                if x[p] + x[q] == 0.0 {
                    // π̃_{p,q} fixes Δ_{p,q}
                    continue;
                }
                let eta = self.bump.eta_unchecked(p, q, x)?.unwrap_or(1.0);
                if eta == 0.0 {
                    continue;
                }
                let proj = project_codim2(x, p, q);
                for (o, (pi, xi)) in out.iter_mut().zip(proj.iter().zip(x)) {
                    *o += eta * (pi - xi);
                }
            }
        }
        Ok(out)
    }

    /// `φ_k = ι_{k+1,k+1}^{-1} ∘ φ̃_{k+1} ∘ ι_{k+1,k+1}`.
    pub fn phi(&self, x: &[f64]) -> Result<Vec<f64>, SmoothingError> {
        self.phi_through_face(x, self.k + 1)
    }

    /// `φ_k` computed through the face `Δ^{k+1}_p`; independent of `p`.
    pub fn phi_through_face(&self, x: &[f64], p: usize) -> Result<Vec<f64>, SmoothingError> {
        check_point(x, self.k)?;
        let inc = FaceInclusion::new(self.k + 1, p).map_err(|_| SmoothingError::IndexOutOfRange { index: p, dim: self.k + 1 })?;
        let lifted = inc.insert(x, 0.0);
        let image = self.phi_tilde(&lifted)?;
        debug_assert_eq!(image[p], 0.0, "φ̃ preserves faces");
        Ok(inc.remove(&image))
    }
}

/// Sup-norm distance.
pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{barycenter, face_barycenter, region_contains, BaryPoint, RegionSpec};

    #[test]
    fn profile_levels() {
        let b = BumpSpec::standard(3).unwrap();
        assert_eq!(b.profile(0.1), 0.0);
        assert_eq!(b.profile(0.25), 0.0);
        assert_eq!(b.profile(0.75), 1.0);
        assert!((b.profile(0.5) - 0.5).abs() < 1e-15);
        let mut last = 0.0;
        for i in 1..100 {
            let v = b.profile(0.25 + 0.5 * i as f64 / 100.0);
            // the profile saturates in binary64 just below the upper threshold
            assert!(v > last || (v == 1.0 && last > 1.0 - 1e-12));
            last = v;
        }
        assert!(BumpSpec::new(3, 0.5, 0.5).is_err());
        assert!(BumpSpec::new(1, 0.25, 0.75).is_err());
    }

    #[test]
    fn eta_on_regions() {
        let bump = BumpSpec::standard(3).unwrap();
        // deep inside U^3_{0,1}
        let inside = BaryPoint::from_weights(&[1, 1, 20, 20]).unwrap();
        assert!(region_contains(&RegionSpec::UCodim2 { k: 3, p: 0, q: 1 }, &inside).unwrap().contains);
        assert_eq!(bump.eta(0, 1, &inside.to_f64()).unwrap(), 1.0);
        // outside Ũ^3_{0,1}
        let outside = BaryPoint::from_weights(&[1, 1, 1, 20]).unwrap();
        assert!(!region_contains(&RegionSpec::UTildeCodim2 { k: 3, p: 0, q: 1 }, &outside).unwrap().contains);
        assert_eq!(bump.eta(0, 1, &outside.to_f64()).unwrap(), 0.0);
        // b_{3,3} lies in no Ũ^3_{p,q}
        let b33 = face_barycenter(3, 3).unwrap().to_f64();
        for p in 0..4 {
            for q in p + 1..4 {
                assert_eq!(bump.eta(p, q, &b33).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn eta_excluded_locus() {
        let bump = BumpSpec::standard(3).unwrap();
        // x_0 = x_1 = 0 and x_2 = 0: a vertex of Δ_{0,1}
        assert_eq!(bump.eta(0, 1, &[0.0, 0.0, 0.0, 1.0]), Err(SmoothingError::UndefinedInput { p: 0, q: 1 }));
        assert_eq!(bump.eta(0, 1, &[0.0, 0.0, 0.5, 0.5]).unwrap(), 1.0);
    }

    #[test]
    fn phi_tilde_fixed_points() {
        let map = SmoothingMap::standard(2).unwrap();
        let b33 = face_barycenter(3, 3).unwrap().to_f64();
        assert_eq!(map.phi_tilde(&b33).unwrap(), b33);
        let b3 = barycenter(3).to_f64();
        assert_eq!(map.phi_tilde(&b3).unwrap(), b3);
        // on U^3_{0,1} it is the projection
        let x = BaryPoint::from_weights(&[1, 2, 30, 40]).unwrap().to_f64();
        let expected = project_codim2(&x, 0, 1);
        assert!(sup_distance(&map.phi_tilde(&x).unwrap(), &expected) < 1e-15);
    }

    #[test]
    fn phi_examples() {
        let map = SmoothingMap::standard(2).unwrap();
        let b2 = barycenter(2).to_f64();
        assert_eq!(map.phi(&b2).unwrap(), b2);
        let on_face = [0.0, 0.3, 0.7];
        assert!(sup_distance(&map.phi(&on_face).unwrap(), &on_face) < 1e-15);
        // x in U^2_2 goes to the face projection
        let x = [0.45, 0.5, 0.05];
        let expected = [0.45 / 0.95, 0.5 / 0.95, 0.0];
        assert!(sup_distance(&map.phi(&x).unwrap(), &expected) < 1e-15);
    }

    #[test]
    fn rejects_bad_points() {
        let map = SmoothingMap::standard(2).unwrap();
        assert!(map.phi(&[0.5, 0.5]).is_err());
        assert!(map.phi(&[0.5, 0.6, -0.1]).is_err());
        assert!(map.phi(&[0.5, 0.6, 0.1]).is_err());
        assert!(SmoothingMap::standard(0).is_err());
    }
}
