//! OFF export of two-dimensional glued complexes.

use std::fmt::Write;

use orichain::gluing::GluedComplex;

/// Each cell gets the chart sending its vertex with vertex index `v` to the
/// moment-curve point `(t, t², t³)`, `t = (v + 1) / n`; a vertex class sits at the average
/// of its chart positions. Triangles are listed with their orientation sign applied.
///
/// Returns `None` unless the complex is two-dimensional.
pub fn to_off(g: &GluedComplex, vertex_count: usize) -> Option<String> {
    if g.dim() != 2 {
        return None;
    }
    let classes = g.vertex_classes();
    let n_classes = classes.iter().flatten().map(|&c| c + 1).max().unwrap_or(0);
    let mut sums = vec![[0.0f64; 3]; n_classes];
    let mut counts = vec![0usize; n_classes];
    let scale = vertex_count.max(1) as f64;
    for (cell, local) in g.cells().iter().zip(classes) {
        for (&v, &class) in cell.simplex.iter().zip(local) {
            let t = (v + 1) as f64 / scale;
            for (s, x) in sums[class].iter_mut().zip([t, t * t, t * t * t]) {
                *s += x;
            }
            counts[class] += 1;
        }
    }
    let mut out = String::new();
    writeln!(out, "OFF").ok()?;
    writeln!(out, "{} {} 0", n_classes, g.cells().len()).ok()?;
    for (s, &c) in sums.iter().zip(&counts) {
        let c = c.max(1) as f64;
        writeln!(out, "{:.9} {:.9} {:.9}", s[0] / c, s[1] / c, s[2] / c).ok()?;
    }
    for (cell, local) in g.cells().iter().zip(classes) {
        let mut face = local.clone();
        if cell.sign < 0 {
            face.swap(0, 1);
        }
        writeln!(out, "3 {} {} {}", face[0], face[1], face[2]).ok()?;
    }
    Some(out)
}
