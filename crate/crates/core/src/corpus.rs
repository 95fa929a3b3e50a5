//! Small triangulations, cycles, cobordisms and covers used by tests and fixtures.

use std::collections::{BTreeMap, VecDeque};

use crate::chains::{Chain, OrderedSimplex, SimplicialComplex, Vertex};

fn complex(simplices: &[Vec<Vertex>]) -> SimplicialComplex {
    SimplicialComplex::from_maximal(simplices).expect("corpus simplices are valid")
}

fn chain(terms: &[(Vec<Vertex>, i64)]) -> Chain {
    let grade = terms.first().map_or(0, |(s, _)| s.len() - 1);
    Chain::from_terms(grade, terms.iter().map(|(s, a)| (OrderedSimplex::new(s.clone()).expect("non-empty"), *a))).expect("uniform grade")
}

/// Coherently oriented sum of the given top simplices (sorted tuples with signs),
/// or `None` when no coherent orientation exists.
///
/// Two simplices sharing a codimension-one face must induce opposite orientations on it.
pub fn coherent_orientation(simplices: &[Vec<Vertex>]) -> Option<Chain> {
    let sorted: Vec<Vec<Vertex>> = simplices
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s
        })
        .collect();
    let mut faces: BTreeMap<Vec<Vertex>, Vec<(usize, usize)>> = BTreeMap::new();
    for (j, s) in sorted.iter().enumerate() {
        for p in 0..s.len() {
            let mut f = s.clone();
            f.remove(p);
            faces.entry(f).or_default().push((j, p));
        }
    }
    let mut adjacency: Vec<Vec<(usize, i64)>> = vec![Vec::new(); sorted.len()];
    for slots in faces.values() {
        match slots.as_slice() {
            [_] => {}
            [(j1, p1), (j2, p2)] => {
                let rel = if (p1 + p2) % 2 == 0 { -1 } else { 1 };
                adjacency[*j1].push((*j2, rel));
                adjacency[*j2].push((*j1, rel));
            }
            _ => return None,
        }
    }
    let mut sign = vec![0i64; sorted.len()];
    for start in 0..sorted.len() {
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
    Some(chain(&sorted.into_iter().zip(sign).collect::<Vec<_>>()))
}

/// `∂Δ^3` on vertices `0..4`.
pub fn tetrahedron_boundary() -> SimplicialComplex {
    complex(&[vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]])
}

/// `∂(0,1,2,3)`.
pub fn tetrahedron_cycle() -> Chain {
    chain(&[(vec![1, 2, 3], 1), (vec![0, 2, 3], -1), (vec![0, 1, 3], 1), (vec![0, 1, 2], -1)])
}

/// Octahedron with vertices `±x, ±y, ±z` numbered `0..6` (`+x = 0`, `−x = 1`, …).
pub fn octahedron() -> SimplicialComplex {
    complex(&octahedron_triangles().into_iter().map(|(t, _)| t).collect::<Vec<_>>())
}

fn octahedron_triangles() -> Vec<(Vec<Vertex>, i64)> {
    let mut out = Vec::new();
    for a in [0, 1] {
        for b in [2, 3] {
            for c in [4, 5] {
                // (+x,+y,+z) is outward-positive; each sign flip reverses it
                let sign = [a, b, c].iter().map(|v| if v % 2 == 0 { 1 } else { -1 }).product();
                out.push((vec![a, b, c], sign));
            }
        }
    }
    out
}

pub fn octahedron_cycle() -> Chain {
    chain(&octahedron_triangles())
}

/// Minimal 7-vertex torus.
pub fn torus_triangles() -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    for i in 0..7 {
        out.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        out.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    out
}

pub fn torus() -> SimplicialComplex {
    complex(&torus_triangles())
}

pub fn torus_cycle() -> Chain {
    coherent_orientation(&torus_triangles()).expect("the torus is orientable")
}

/// Minimal 6-vertex projective plane: a cone over a pentagon plus five triangles.
pub fn projective_plane_triangles() -> Vec<Vec<Vertex>> {
    let mut out: Vec<Vec<Vertex>> = (1..=5).map(|i| vec![0, i, i % 5 + 1]).collect();
    out.extend([vec![1, 2, 4], vec![2, 3, 5], vec![3, 4, 1], vec![4, 5, 2], vec![5, 1, 3]]);
    out
}

pub fn projective_plane() -> SimplicialComplex {
    complex(&projective_plane_triangles())
}

/// Klein bottle from a 3×3 grid: rows wrap with a reflection of the columns.
pub fn klein_bottle_triangles() -> Vec<Vec<Vertex>> {
    let (n, m) = (3usize, 3usize);
    let vertex = |i: usize, j: usize| {
        if i >= n {
            (i - n) * m + (m - j % m) % m
        } else {
            i * m + j % m
        }
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..m {
            let a = vertex(i, j);
            let b = vertex(i, j + 1);
            let c = vertex(i + 1, j + 1);
            let d = vertex(i + 1, j);
            out.push(vec![a, b, c]);
            out.push(vec![a, c, d]);
        }
    }
    out
}

pub fn klein_bottle() -> SimplicialComplex {
    complex(&klein_bottle_triangles())
}

/// `(0,1) + (1,2) + (2,0)`.
pub fn triangle_boundary_cycle() -> Chain {
    chain(&[(vec![0, 1], 1), (vec![1, 2], 1), (vec![2, 0], 1)])
}

pub fn triangle_boundary() -> SimplicialComplex {
    complex(&[vec![0, 1], vec![1, 2], vec![0, 2]])
}

/// Hexagon `0–1–…–5–0`.
pub fn hexagon() -> SimplicialComplex {
    complex(&(0..6).map(|i| vec![i, (i + 1) % 6]).collect::<Vec<_>>())
}

pub fn hexagon_cover() -> Vec<SimplicialComplex> {
    vec![complex(&[vec![0, 1], vec![1, 2], vec![2, 3]]), complex(&[vec![3, 4], vec![4, 5], vec![5, 0]])]
}

/// Closed star of `+z`, and closed stars of the edges `(−z, +x)`, `(−z, −x)`.
pub fn octahedron_cover() -> Vec<SimplicialComplex> {
    let oct = octahedron();
    vec![oct.closed_star(&[4]), oct.closed_star(&[0, 5]), oct.closed_star(&[1, 5])]
}

/// A cobordism problem `(s̃, s_0, s_1)` with `∂s̃ = s_1 − s_0` in the oriented model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CobordismProblem {
    pub total: Chain,
    pub source: Chain,
    pub target: Chain,
}

/// Cylinder over the triangle boundary: bottom `0,1,2`, top `3,4,5`.
pub fn cylinder() -> CobordismProblem {
    let mut terms = Vec::new();
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        let (ta, tb) = (a + 3, b + 3);
        terms.push((vec![b, a, tb], 1));
        terms.push((vec![a, ta, tb], 1));
    }
    CobordismProblem { total: chain(&terms), source: triangle_boundary_cycle(), target: chain(&[(vec![3, 4], 1), (vec![4, 5], 1), (vec![5, 3], 1)]) }
}

/// `T × I` over the 7-vertex torus; the top copy uses vertices `7..14`.
pub fn torus_cobordism() -> CobordismProblem {
    let base = torus_cycle();
    let lift = |c: &Chain| {
        let terms: Vec<(Vec<Vertex>, i64)> = c.terms().map(|(s, a)| (s.vertices().iter().map(|v| v + 7).collect(), a)).collect();
        chain(&terms)
    };
    let mut terms = Vec::new();
    for (s, a) in base.terms() {
        let v = s.vertices();
        for i in 0..v.len() {
            let mut t: Vec<Vertex> = v[..=i].to_vec();
            t.extend(v[i..].iter().map(|x| x + 7));
            terms.push((t, if i % 2 == 0 { a } else { -a }));
        }
    }
    CobordismProblem { total: chain(&terms), target: lift(&base), source: base }
}
