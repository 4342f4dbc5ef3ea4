//! Sparse exact-rational matrices, exact and floating-point rank, block inversion
//! and Matrix Market output.

use std::collections::BTreeSet;
use std::io::Write;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::polytensor::Rational;

/// Arithmetic used for rank computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Rational,
    Float,
}

/// Relative singular-value cutoff of the floating-point rank.
pub const FLOAT_RANK_TOLERANCE: f64 = 1e-9;

/// Row-major sparse matrix; every row is sorted by column and holds no zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Rational)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { rows: n, cols: n, data: (0..n).map(|i| vec![(i, Rational::one())]).collect() }
    }

    /// Sums duplicate positions and drops zeros.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut data: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) outside {rows}x{cols}");
            data[r].push((c, v));
        }
        for row in &mut data {
            *row = normalize_row(std::mem::take(row));
        }
        SparseMatrix { rows, cols, data }
    }

    /// Builds from rows given as `(column, value)` lists.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, Rational)>>) -> Self {
        let n = rows.len();
        let data = rows.into_iter().map(normalize_row).collect();
        SparseMatrix { rows: n, cols, data }
    }

    pub fn from_dense(dense: &[Vec<Rational>], cols: usize) -> Self {
        let rows = dense
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.clone())).collect())
            .collect();
        SparseMatrix::from_rows(cols, rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Rational)] {
        &self.data[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        match self.data[r].binary_search_by_key(&c, |(col, _)| *col) {
            Ok(i) => self.data[r][i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.data.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut data: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.cols];
        for (r, c, v) in self.triplets() {
            data[c].push((r, v.clone()));
        }
        SparseMatrix { rows: self.cols, cols: self.rows, data }
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: Vec<(usize, Rational)> = Vec::new();
                for (k, a) in row {
                    for (c, b) in &other.data[*k] {
                        acc.push((*c, a * b));
                    }
                }
                normalize_row(acc)
            })
            .collect();
        SparseMatrix { rows: self.rows, cols: other.cols, data }
    }

    pub fn matvec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        self.data
            .iter()
            .map(|row| row.iter().fold(Rational::zero(), |acc, (c, v)| acc + v * &x[*c]))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut d = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v.clone();
        }
        d
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = rational_to_f64(v);
        }
        m
    }
}

fn normalize_row(mut row: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    row.sort_by_key(|(c, _)| *c);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

pub fn rational_to_f64(v: &Rational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Rank of `m` in the requested arithmetic.
pub fn exact_rank(m: &SparseMatrix, mode: Arithmetic) -> usize {
    match mode {
        Arithmetic::Rational => rank_rational(m),
        Arithmetic::Float => rank_float(m),
    }
}

/// Number of singular values above `1e-9` times the largest.
pub fn rank_float(m: &SparseMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 || m.is_zero() {
        return 0;
    }
    let dense = m.to_f64();
    let sv = dense.singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    sv.iter().filter(|&&s| s > FLOAT_RANK_TOLERANCE * max).count()
}

/// Primitive integer multiple of a rational row.
fn integer_row(row: &[(usize, Rational)]) -> Vec<(usize, BigInt)> {
    let lcm = row.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    let ints: Vec<(usize, BigInt)> =
        row.iter().map(|(c, v)| (*c, v.numer() * (&lcm / v.denom()))).collect();
    primitive(ints)
}

fn primitive(mut row: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    let g = row.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for (_, v) in &mut row {
            *v /= &g;
        }
    }
    row
}

/// `p * s - a * r` over sorted sparse integer rows, made primitive.
fn eliminate(s: &[(usize, BigInt)], r: &[(usize, BigInt)], p: &BigInt, a: &BigInt) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(s.len() + r.len());
    let (mut i, mut j) = (0, 0);
    while i < s.len() || j < r.len() {
        let take_s = j >= r.len() || (i < s.len() && s[i].0 < r[j].0);
        let take_r = i >= s.len() || (j < r.len() && r[j].0 < s[i].0);
        let (c, v) = if take_s {
            let v = p * &s[i].1;
            i += 1;
            (s[i - 1].0, v)
        } else if take_r {
            let v = -(a * &r[j].1);
            j += 1;
            (r[j - 1].0, v)
        } else {
            let v = p * &s[i].1 - a * &r[j].1;
            i += 1;
            j += 1;
            (s[i - 1].0, v)
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    primitive(out)
}

/// Exact rank by fraction-free sparse elimination.
///
/// Pivots follow a Markowitz rule: the active column with the fewest
/// nonzeros, then the shortest row within it. Each updated row is divided by
/// the gcd of its entries, which keeps integers small.
pub fn rank_rational(m: &SparseMatrix) -> usize {
    let mut rows: Vec<Vec<(usize, BigInt)>> = m.data.iter().map(|r| integer_row(r)).collect();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
    for (r, row) in rows.iter().enumerate() {
        for (c, _) in row {
            col_rows[*c].insert(r);
        }
    }
    let mut rank = 0;
    while let Some(col) = (0..m.cols).filter(|&c| !col_rows[c].is_empty()).min_by_key(|&c| col_rows[c].len()) {
        let pivot_row = *col_rows[col].iter().min_by_key(|&&r| (rows[r].len(), r)).expect("nonempty column");
        rank += 1;
        let pivot = std::mem::take(&mut rows[pivot_row]);
        for (c, _) in &pivot {
            col_rows[*c].remove(&pivot_row);
        }
        let p = &pivot[pivot.binary_search_by_key(&col, |(c, _)| *c).expect("pivot entry")].1;
        let targets: Vec<usize> = col_rows[col].iter().copied().collect();
        for s in targets {
            let old = std::mem::take(&mut rows[s]);
            let a = &old[old.binary_search_by_key(&col, |(c, _)| *c).expect("entry in column")].1;
            let new = eliminate(&old, &pivot, p, a);
            for (c, _) in &old {
                col_rows[*c].remove(&s);
            }
            for (c, _) in &new {
                col_rows[*c].insert(s);
            }
            rows[s] = new;
        }
    }
    rank
}

/// Gauss-Jordan on a dense rational matrix; returns the reduced rows and pivot columns.
pub fn rref(mut a: Vec<Vec<Rational>>, cols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Basis of `{ x : A x = 0 }`, one vector per free column in increasing order.
pub fn nullspace(a: Vec<Vec<Rational>>, cols: usize) -> Vec<Vec<Rational>> {
    let (r, pivots) = rref(a, cols);
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    (0..cols)
        .filter(|c| !pivot_set.contains(c))
        .map(|f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &pc) in r.iter().zip(&pivots) {
                v[pc] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix, computed independently on each connected block
/// of its nonzero pattern. On failure returns the rank found.
pub fn invert_blockwise(m: &SparseMatrix) -> Result<SparseMatrix, usize> {
    let n = m.rows;
    if m.cols != n {
        return Err(exact_rank(m, Arithmetic::Rational));
    }
    // union-find over rows (0..n) and columns (n..2n)
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (r, c, _) in m.triplets() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, n + c));
        if a != b {
            parent[a] = b;
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        blocks.entry(root).or_default().0.push(i);
    }
    for j in 0..n {
        let root = find(&mut parent, n + j);
        blocks.entry(root).or_default().1.push(j);
    }
    let mut triplets = Vec::new();
    let mut singular = false;
    for (rows, cols) in blocks.values() {
        if rows.len() != cols.len() {
            singular = true;
            continue;
        }
        let size = rows.len();
        let col_pos: std::collections::HashMap<usize, usize> =
            cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        // augmented [A | I]
        let mut aug: Vec<Vec<Rational>> = rows
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let mut v = vec![Rational::zero(); 2 * size];
                for (c, val) in m.row(r) {
                    v[col_pos[c]] = val.clone();
                }
                v[size + i] = Rational::one();
                v
            })
            .collect();
        aug = rref(aug, 2 * size).0;
        if aug.len() < size || (0..size).any(|i| aug[i][i] != Rational::one()) {
            singular = true;
            continue;
        }
        // inverse maps row-space (dofs) back to column-space (coordinates)
        for (i, &c) in cols.iter().enumerate() {
            for (j, &r) in rows.iter().enumerate() {
                let v = &aug[i][size + j];
                if !v.is_zero() {
                    triplets.push((c, r, v.clone()));
                }
            }
        }
    }
    if singular {
        return Err(exact_rank(m, Arithmetic::Rational));
    }
    Ok(SparseMatrix::from_triplets(n, n, triplets))
}

/// Matrix Market coordinate output with 1-based indices.
///
/// Exact mode writes every value as `p/q`; float mode writes the shortest
/// round-trip decimal of the nearest double.
pub fn write_matrix_market<W: Write>(m: &SparseMatrix, mut w: W, float: bool) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    if float {
        writeln!(w, "% values are IEEE-754 doubles")?;
    } else {
        writeln!(w, "% values are exact rationals written as p/q")?;
    }
    writeln!(w, "{} {} {}", m.rows, m.cols, m.nnz())?;
    for (r, c, v) in m.triplets() {
        if float {
            writeln!(w, "{} {} {}", r + 1, c + 1, rational_to_f64(v))?;
        } else {
            writeln!(w, "{} {} {}/{}", r + 1, c + 1, v.numer(), v.denom())?;
        }
    }
    Ok(())
}

/// True when `v` (as a column) lies in the column span of `basis`.
pub fn in_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    let n = v.len();
    let mut rows: Vec<Vec<(usize, Rational)>> = basis
        .iter()
        .map(|b| b.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect())
        .collect();
    let base = rank_rational(&SparseMatrix::from_rows(n, rows.clone()));
    rows.push(v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect());
    rank_rational(&SparseMatrix::from_rows(n, rows)) == base
}
