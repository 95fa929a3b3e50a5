use num_traits::{One, Signed, Zero};
use orichain::simplex::{induced_face_permutation, q, region_contains, BaryPoint, FaceInclusion, Permutation, Rational, RegionSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `a·x ≥ b`, or `a·x > b` when strict.
#[derive(Clone, Debug)]
struct Ineq {
    a: Vec<Rational>,
    b: Rational,
    strict: bool,
}

/// Fourier–Motzkin feasibility over the rationals.
fn feasible(mut system: Vec<Ineq>, vars: usize) -> bool {
    for j in 0..vars {
        let (pos, rest): (Vec<Ineq>, Vec<Ineq>) = system.into_iter().partition(|c| c.a[j].is_positive());
        let (neg, mut next): (Vec<Ineq>, Vec<Ineq>) = rest.into_iter().partition(|c| c.a[j].is_negative());
        for p in &pos {
            for n in &neg {
                let (sp, sn) = (Rational::one() / p.a[j], Rational::one() / -n.a[j]);
                next.push(Ineq {
                    a: p.a.iter().zip(&n.a).map(|(x, y)| x * sp + y * sn).collect(),
                    b: p.b * sp + n.b * sn,
                    strict: p.strict || n.strict,
                });
            }
        }
        system = next;
    }
    system.iter().all(|c| if c.strict { c.b.is_negative() } else { !c.b.is_positive() })
}

/// Closed-form description of `Ũ^k_{p,q}` in the free coordinates `x_0…x_{k-1}`,
/// with `x_k = 1 − Σ x_i` substituted.
fn u_tilde_system(k: usize, p: usize, q_: usize) -> Vec<Ineq> {
    // coordinate r as an affine form (coefficients, constant)
    let coord = |r: usize| -> (Vec<Rational>, Rational) {
        if r == k {
            (vec![-Rational::one(); k], Rational::one())
        } else {
            let mut a = vec![Rational::zero(); k];
            a[r] = Rational::one();
            (a, Rational::zero())
        }
    };
    let mut out = Vec::new();
    for r in 0..=k {
        let (a, c) = coord(r);
        out.push(Ineq { a, b: -c, strict: false });
    }
    let (ap, cp) = coord(p);
    let (aq, cq) = coord(q_);
    for r in (0..=k).filter(|&r| r != p && r != q_) {
        let (ar, cr) = coord(r);
        let a = (0..k).map(|i| ar[i] - ap[i] - aq[i]).collect();
        out.push(Ineq { a, b: cp + cq - cr, strict: true });
    }
    out
}

fn pairs(k: usize) -> Vec<(usize, usize)> {
    (0..=k).flat_map(|p| (p + 1..=k).map(move |q_| (p, q_))).collect()
}

#[test]
fn fourier_motzkin_sanity() {
    // x > 0, x < 0 is empty; x ≥ 0, x ≤ 0 is not
    let strict = vec![Ineq { a: vec![q(1, 1)], b: q(0, 1), strict: true }, Ineq { a: vec![q(-1, 1)], b: q(0, 1), strict: true }];
    assert!(!feasible(strict, 1));
    let weak = vec![Ineq { a: vec![q(1, 1)], b: q(0, 1), strict: false }, Ineq { a: vec![q(-1, 1)], b: q(0, 1), strict: false }];
    assert!(feasible(weak, 1));
}

#[test]
fn u_tilde_regions_are_disjoint_exactly() {
    for k in 2..=4 {
        let ps = pairs(k);
        for &(p, q_) in &ps {
            assert!(feasible(u_tilde_system(k, p, q_), k), "Ũ^{k}_{p},{q_} should be nonempty");
        }
        for (i, &(p1, q1)) in ps.iter().enumerate() {
            for &(p2, q2) in &ps[i + 1..] {
                let mut system = u_tilde_system(k, p1, q1);
                system.extend(u_tilde_system(k, p2, q2));
                assert!(!feasible(system, k), "Ũ^{k}_{p1},{q1} ∩ Ũ^{k}_{p2},{q2} ≠ ∅");
            }
        }
    }
}

fn sample_in(rng: &mut ChaCha8Rng, region: &RegionSpec) -> BaryPoint {
    let gens = region.generators().unwrap();
    let w: Vec<Rational> = (0..gens.len()).map(|_| q(rng.gen_range(1..50), 1)).collect();
    let total: Rational = w.iter().sum();
    let w: Vec<Rational> = w.into_iter().map(|v| v / total).collect();
    BaryPoint::affine_combination(&gens, &w).unwrap()
}

#[test]
fn u_tilde_regions_are_disjoint_by_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 2..=4 {
        let ps = pairs(k);
        for &(p1, q1) in &ps {
            let own = RegionSpec::UTildeCodim2 { k, p: p1, q: q1 };
            for _ in 0..1000 {
                let x = sample_in(&mut rng, &own);
                assert!(region_contains(&own, &x).unwrap().contains);
                for &(p2, q2) in ps.iter().filter(|&&pq| pq != (p1, q1)) {
                    assert!(!region_contains(&RegionSpec::UTildeCodim2 { k, p: p2, q: q2 }, &x).unwrap().contains);
                }
            }
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, k: usize) -> BaryPoint {
    loop {
        let w: Vec<i64> = (0..=k).map(|_| rng.gen_range(0..7)).collect();
        if w.iter().any(|&v| v > 0) {
            return BaryPoint::from_weights(&w).unwrap();
        }
    }
}

/// Closed-form membership, independent of the generator expansion.
fn closed_form(region: &RegionSpec, x: &BaryPoint) -> bool {
    let c = x.coords();
    let n = c.len();
    let others = |skip: Vec<usize>| (0..n).filter(move |r| !skip.contains(r));
    match *region {
        RegionSpec::UFace { k, p } => others(vec![p]).all(|r| c[r] > c[p] * q((k + 2) as i64, 1)),
        RegionSpec::UTildeCodim2 { p, q: q_, .. } => others(vec![p, q_]).all(|r| c[r] > c[p] + c[q_]),
        RegionSpec::UCodim2 { k, p, q: q_ } => others(vec![p, q_]).all(|r| c[r] > (c[p] + c[q_]) * q((k + 1) as i64, 1)),
        RegionSpec::Face { p, .. } => c[p].is_zero(),
        RegionSpec::Codim2Face { p, q: q_, .. } => c[p].is_zero() && c[q_].is_zero(),
        RegionSpec::Interior { .. } => c.iter().all(|v| v.is_positive()),
    }
}

#[test]
fn membership_matches_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for k in 1..=4 {
        let mut regions = vec![RegionSpec::Interior { k }];
        for p in 0..=k {
            regions.push(RegionSpec::UFace { k, p });
            regions.push(RegionSpec::Face { k, p });
        }
        if k >= 2 {
            for (p, q_) in pairs(k) {
                regions.push(RegionSpec::UTildeCodim2 { k, p, q: q_ });
                regions.push(RegionSpec::UCodim2 { k, p, q: q_ });
                regions.push(RegionSpec::Codim2Face { k, p, q: q_ });
            }
        }
        for _ in 0..400 {
            let x = random_point(&mut rng, k);
            for r in &regions {
                assert_eq!(region_contains(r, &x).unwrap().contains, closed_form(r, &x), "{r:?} at {:?}", x.coords());
            }
        }
    }
}

#[test]
fn u_codim2_sits_inside_u_tilde() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for k in 2..=4 {
        for (p, q_) in pairs(k) {
            let small = RegionSpec::UCodim2 { k, p, q: q_ };
            let big = RegionSpec::UTildeCodim2 { k, p, q: q_ };
            for _ in 0..200 {
                assert!(region_contains(&big, &sample_in(&mut rng, &small)).unwrap().contains);
            }
        }
    }
}

fn inversion_sign(images: &[usize]) -> i64 {
    let mut sign = 1;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i] > images[j] {
                sign = -sign;
            }
        }
    }
    sign
}

#[test]
fn induced_face_permutations_exhaustive() {
    for k in 1..=5 {
        for tau in Permutation::all(k) {
            assert_eq!(tau.sign(), inversion_sign(tau.images()));
            for p in 0..=k {
                let (tau_p, target) = induced_face_permutation(&tau, p).unwrap();
                assert_eq!(target, tau.image(p));
                let source = FaceInclusion::new(k, p).unwrap();
                let dest = FaceInclusion::new(k, target).unwrap();
                for i in 0..k {
                    assert_eq!(tau.image(source.map_index(i)), dest.map_index(tau_p.image(i)));
                }
                let parity = if (p + target) % 2 == 0 { 1 } else { -1 };
                assert_eq!(inversion_sign(tau_p.images()), parity * inversion_sign(tau.images()));
            }
        }
    }
}

#[test]
fn induced_face_permutation_on_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for k in 1..=4 {
        for tau in Permutation::all(k) {
            let x = random_point(&mut rng, k - 1);
            for p in 0..=k {
                let (tau_p, target) = induced_face_permutation(&tau, p).unwrap();
                let lhs = tau.apply(&FaceInclusion::new(k, p).unwrap().apply(&x).unwrap()).unwrap();
                let rhs = FaceInclusion::new(k, target).unwrap().apply(&tau_p.apply(&x).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}
