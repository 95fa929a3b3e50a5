//! Sparse integer matrices and Smith normal form over ℤ.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::HomologyError;

/// Integer matrix stored as its nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), i64>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: n, entries: (0..n).map(|i| ((i, i), 1)).collect() }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self, HomologyError>
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        let mut m = Self::zeros(rows, cols);
        for (i, j, v) in entries {
            if i >= rows || j >= cols {
                return Err(HomologyError::IndexOutOfRange { row: i, col: j });
            }
            let cur = m.get(i, j);
            m.set(i, j, cur.checked_add(v).ok_or(HomologyError::Overflow)?);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        if v == 0 {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.entries.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for (&(i, j), &v) in &self.entries {
            d[i][j] = v;
        }
        d
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix, HomologyError> {
        if self.cols != other.rows {
            return Err(HomologyError::ShapeMismatch { left: (self.rows, self.cols), right: (other.rows, other.cols) });
        }
        let mut by_row: Vec<Vec<(usize, i64)>> = vec![Vec::new(); other.rows];
        for (&(i, j), &v) in &other.entries {
            by_row[i].push((j, v));
        }
        let mut out = BTreeMap::<(usize, usize), i64>::new();
        for (&(i, k), &a) in &self.entries {
            for &(j, b) in &by_row[k] {
                let prod = a.checked_mul(b).ok_or(HomologyError::Overflow)?;
                let e = out.entry((i, j)).or_insert(0);
                *e = e.checked_add(prod).ok_or(HomologyError::Overflow)?;
            }
        }
        out.retain(|_, v| *v != 0);
        Ok(IntegerMatrix { rows: self.rows, cols: other.cols, entries: out })
    }

    /// `A·x` for a dense column vector.
    pub fn apply(&self, x: &[i64]) -> Result<Vec<i64>, HomologyError> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0i64; self.rows];
        for (&(i, j), &v) in &self.entries {
            y[i] = y[i].checked_add(v.checked_mul(x[j]).ok_or(HomologyError::Overflow)?).ok_or(HomologyError::Overflow)?;
        }
        Ok(y)
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.keys().all(|(i, j)| i == j)
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(i64::to_string).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// `U·A·V = S` with `S` diagonal, `d_1 | d_2 | …`, and `U`, `V` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithNormalForm {
    pub s: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithNormalForm {
    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<i64> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s.get(i, i)).take_while(|&d| d != 0).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(a: &IntegerMatrix) -> Result<SmithNormalForm, HomologyError> {
    let mut work = Dense::new(a.to_dense(), true);
    work.reduce()?;
    let (s, u, v) = work.into_parts();
    let snf = SmithNormalForm {
        s: IntegerMatrix::from_dense_shape(&s, a.rows(), a.cols()),
        u: IntegerMatrix::from_dense_shape(&u.expect("tracked"), a.rows(), a.rows()),
        v: IntegerMatrix::from_dense_shape(&v.expect("tracked"), a.cols(), a.cols()),
    };
    if cfg!(debug_assertions) {
        debug_assert_eq!(snf.u.mul(a)?.mul(&snf.v)?, snf.s, "U·A·V = S");
        let d = snf.invariant_factors();
        debug_assert!(d.windows(2).all(|w| w[1] % w[0] == 0), "divisibility chain");
    }
    Ok(snf)
}

impl IntegerMatrix {
    fn from_dense_shape(d: &[Vec<i64>], rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, row) in d.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }
}

/// Nonzero invariant factors of `a`, without transforms.
///
/// Unit pivots are eliminated sparsely first; the remainder goes through the dense
/// reduction.
pub fn invariant_factors(a: &IntegerMatrix) -> Result<Vec<i64>, HomologyError> {
    let mut sparse = SparseEliminator::new(a);
    let units = sparse.eliminate_units()?;
    let rest = sparse.remainder();
    let mut out = vec![1; units];
    if !rest.is_empty() {
        let mut work = Dense::new(rest, false);
        work.reduce()?;
        let (s, _, _) = work.into_parts();
        out.extend((0..s.len().min(s.first().map_or(0, Vec::len))).map(|i| s[i][i]).take_while(|&d| d != 0));
    }
    Ok(out)
}

pub fn rank(a: &IntegerMatrix) -> Result<usize, HomologyError> {
    Ok(invariant_factors(a)?.len())
}

fn add(a: i64, b: i64) -> Result<i64, HomologyError> {
    a.checked_add(b).ok_or(HomologyError::Overflow)
}

fn mul(a: i64, b: i64) -> Result<i64, HomologyError> {
    a.checked_mul(b).ok_or(HomologyError::Overflow)
}

/// Dense reduction with optional transform tracking.
struct Dense {
    m: Vec<Vec<i64>>,
    u: Option<Vec<Vec<i64>>>,
    v: Option<Vec<Vec<i64>>>,
    rows: usize,
    cols: usize,
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

type Rows = Vec<Vec<i64>>;

impl Dense {
    fn new(m: Vec<Vec<i64>>, track: bool) -> Self {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        Self { u: track.then(|| identity(rows)), v: track.then(|| identity(cols)), m, rows, cols }
    }

    fn into_parts(self) -> (Rows, Option<Rows>, Option<Rows>) {
        (self.m, self.u, self.v)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.m.swap(a, b);
        if let Some(u) = &mut self.u {
            u.swap(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for row in &mut self.m {
            row.swap(a, b);
        }
        if let Some(v) = &mut self.v {
            for row in v {
                row.swap(a, b);
            }
        }
    }

    /// row[dst] += f·row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, f: i64) -> Result<(), HomologyError> {
        fn go(m: &mut [Vec<i64>], dst: usize, src: usize, f: i64) -> Result<(), HomologyError> {
            for j in 0..m[dst].len() {
                let s = m[src][j];
                if s != 0 {
                    m[dst][j] = add(m[dst][j], mul(f, s)?)?;
                }
            }
            Ok(())
        }
        go(&mut self.m, dst, src, f)?;
        if let Some(u) = &mut self.u {
            go(u, dst, src, f)?;
        }
        Ok(())
    }

    /// col[dst] += f·col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, f: i64) -> Result<(), HomologyError> {
        fn go(m: &mut [Vec<i64>], dst: usize, src: usize, f: i64) -> Result<(), HomologyError> {
            for row in m {
                let s = row[src];
                if s != 0 {
                    row[dst] = add(row[dst], mul(f, s)?)?;
                }
            }
            Ok(())
        }
        go(&mut self.m, dst, src, f)?;
        if let Some(v) = &mut self.v {
            go(v, dst, src, f)?;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.m[i] {
            *x = -*x;
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = -*x;
            }
        }
    }

    /// Smallest nonzero |entry| in the trailing block.
    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let a = self.m[i][j].unsigned_abs();
                if a != 0 && best.is_none_or(|(b, _, _)| a < b as u64) {
                    best = Some((a as i64, i, j));
                    if a == 1 {
                        return Some((i, j));
                    }
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn reduce(&mut self) -> Result<(), HomologyError> {
        for t in 0..self.rows.min(self.cols) {
            let Some((i, j)) = self.min_entry(t) else { break };
            self.swap_rows(t, i);
            self.swap_cols(t, j);
            loop {
                if let Some((i, j)) = self.clear_cross(t)? {
                    // a remainder smaller than the pivot appeared; promote it
                    self.swap_rows(t, i);
                    self.swap_cols(t, j);
                    continue;
                }
                // cross cleared: enforce divisibility on the trailing block
                let d = self.m[t][t];
                let bad = (t + 1..self.rows).find(|&i| (t + 1..self.cols).any(|j| self.m[i][j] % d != 0));
                match bad {
                    Some(i) => self.row_axpy(t, i, 1)?,
                    None => break,
                }
            }
            if self.m[t][t] < 0 {
                self.negate_row(t);
            }
        }
        Ok(())
    }

    /// Clears row and column `t` against the pivot; returns the position of a
    /// nonzero remainder when the pivot does not divide an entry.
    fn clear_cross(&mut self, t: usize) -> Result<Option<(usize, usize)>, HomologyError> {
        let d = self.m[t][t];
        for i in t + 1..self.rows {
            let a = self.m[i][t];
            if a != 0 {
                self.row_axpy(i, t, -a.div_euclid(d))?;
                if self.m[i][t] != 0 {
                    return Ok(Some((i, t)));
                }
            }
        }
        for j in t + 1..self.cols {
            let a = self.m[t][j];
            if a != 0 {
                self.col_axpy(j, t, -a.div_euclid(d))?;
                if self.m[t][j] != 0 {
                    return Ok(Some((t, j)));
                }
            }
        }
        Ok(None)
    }
}

/// Row-sparse elimination of unit pivots.
struct SparseEliminator {
    rows: Vec<BTreeMap<usize, i64>>,
    cols: Vec<BTreeSet<usize>>,
}

impl SparseEliminator {
    fn new(a: &IntegerMatrix) -> Self {
        let mut rows = vec![BTreeMap::new(); a.rows()];
        let mut cols = vec![BTreeSet::new(); a.cols()];
        for (i, j, v) in a.entries() {
            rows[i].insert(j, v);
            cols[j].insert(i);
        }
        Self { rows, cols }
    }

    /// Unit entry with the least Markowitz cost.
    fn unit_pivot(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            for (&j, &v) in row {
                if v == 1 || v == -1 {
                    let cost = (row.len() - 1) * (self.cols[j].len() - 1);
                    if best.is_none_or(|(c, _, _)| cost < c) {
                        best = Some((cost, i, j));
                        if cost == 0 {
                            return Some((i, j));
                        }
                    }
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn eliminate_units(&mut self) -> Result<usize, HomologyError> {
        let mut count = 0;
        while let Some((r, c)) = self.unit_pivot() {
            let pivot = self.rows[r][&c];
            let pivot_row: Vec<(usize, i64)> = self.rows[r].iter().map(|(&j, &v)| (j, v)).collect();
            let targets: Vec<usize> = self.cols[c].iter().copied().filter(|&i| i != r).collect();
            for i in targets {
                // pivot is ±1, so a/pivot = a·pivot
                let f = mul(self.rows[i][&c], pivot)?;
                for &(j, v) in &pivot_row {
                    let new = add(self.rows[i].get(&j).copied().unwrap_or(0), -mul(f, v)?)?;
                    if new == 0 {
                        self.rows[i].remove(&j);
                        self.cols[j].remove(&i);
                    } else {
                        self.rows[i].insert(j, new);
                        self.cols[j].insert(i);
                    }
                }
            }
            for &(j, _) in &pivot_row {
                self.cols[j].remove(&r);
            }
            self.rows[r].clear();
            count += 1;
        }
        Ok(count)
    }

    /// Dense copy of the surviving nonzero rows and columns.
    fn remainder(&self) -> Vec<Vec<i64>> {
        let live_cols: Vec<usize> = (0..self.cols.len()).filter(|&j| !self.cols[j].is_empty()).collect();
        let index: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        self.rows
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| {
                let mut dense = vec![0; live_cols.len()];
                for (j, &v) in r {
                    dense[index[j]] = v;
                }
                dense
            })
            .collect()
    }
}
