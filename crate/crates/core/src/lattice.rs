//! Exact integer linear algebra on exponent matrices.
//!
//! Everything here works over `BigInt`: Hermite normal form (column style,
//! with the unimodular transform) for kernels and canonical lattice bases,
//! and Smith normal form for elementary divisors and lattice indices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sparse_system::MixedStructure;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        IntMatrix {
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
            cols,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Rows as `i64`, failing if an entry does not fit.
    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|v| v.to_i64().ok_or(Error::ExponentOverflow))
                    .collect()
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.data[idx] += a * other.get(k, c);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Keeps only the columns in `range`.
    pub fn columns(&self, range: std::ops::Range<usize>) -> IntMatrix {
        let cols = range.len();
        let mut out = Self::zeros(self.rows, cols);
        for r in 0..self.rows {
            for (k, c) in range.clone().enumerate() {
                out.set(r, k, self.get(r, c).clone());
            }
        }
        out
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// col[dst] -= q * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = q * &self.data[r * self.cols + src];
            self.data[r * self.cols + dst] -= v;
        }
    }

    /// row[dst] -= q * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = q * &self.data[src * self.cols + c];
            self.data[dst * self.cols + c] -= v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let idx = r * self.cols + c;
            self.data[idx] = -&self.data[idx];
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|r| {
                self.row(r)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            }))
            .finish()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // Entries are small at desk scale; fall back to strings for huge ones.
        let rows: Vec<Vec<serde_json::Value>> = (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|v| match v.to_i64() {
                        Some(i) => serde_json::Value::from(i),
                        None => serde_json::Value::from(v.to_string()),
                    })
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

/// Result of [`column_hermite`]: `a * u = h` with `u` unimodular.
#[derive(Clone, Debug)]
pub struct ColumnHermite {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub rank: usize,
    pub pivot_rows: Vec<usize>,
}

/// Column-style Hermite normal form.
///
/// `h` is lower echelon: its first `rank` columns carry positive pivots at
/// strictly increasing rows, entries left of a pivot are reduced into
/// `[0, pivot)`, and the remaining columns are zero. The last
/// `cols - rank` columns of `u` therefore span the integer kernel of `a`.
pub fn column_hermite(a: &IntMatrix) -> ColumnHermite {
    let mut h = a.clone();
    let mut u = IntMatrix::identity(a.cols);
    let mut r = 0;
    let mut pivot_rows = Vec::new();
    for i in 0..a.rows {
        if r == a.cols {
            break;
        }
        loop {
            let pivot = (r..a.cols)
                .filter(|&j| !h.get(i, j).is_zero())
                .min_by(|&x, &y| h.get(i, x).abs().cmp(&h.get(i, y).abs()));
            let Some(p) = pivot else { break };
            h.swap_cols(p, r);
            u.swap_cols(p, r);
            let mut clean = true;
            for j in r + 1..a.cols {
                if h.get(i, j).is_zero() {
                    continue;
                }
                let q = h.get(i, j).div_floor(h.get(i, r));
                h.col_axpy(j, r, &q);
                u.col_axpy(j, r, &q);
                if !h.get(i, j).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h.get(i, r).is_zero() {
            continue;
        }
        if h.get(i, r).is_negative() {
            h.negate_col(r);
            u.negate_col(r);
        }
        for j in 0..r {
            let q = h.get(i, j).div_floor(h.get(i, r));
            h.col_axpy(j, r, &q);
            u.col_axpy(j, r, &q);
        }
        pivot_rows.push(i);
        r += 1;
    }
    ColumnHermite {
        h,
        u,
        rank: r,
        pivot_rows,
    }
}

/// Rank over the rationals.
pub fn rank(a: &IntMatrix) -> usize {
    column_hermite(a).rank
}

/// Canonical basis (as rows) of the lattice spanned by the rows of `g`.
///
/// Two generator sets span the same lattice iff their canonical forms agree.
pub fn row_lattice_canonical(g: &IntMatrix) -> IntMatrix {
    let ch = column_hermite(&g.transpose());
    ch.h.columns(0..ch.rank).transpose()
}

/// Nonzero elementary divisors (Smith normal form diagonal), ascending in
/// the divisibility order.
pub fn elementary_divisors(a: &IntMatrix) -> Vec<BigInt> {
    let mut m = a.clone();
    let mut divisors = Vec::new();
    let dim = m.rows.min(m.cols);
    for t in 0..dim {
        // smallest nonzero entry of the trailing block goes to the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..m.rows {
            for j in t..m.cols {
                let v = m.get(i, j);
                if v.is_zero() {
                    continue;
                }
                if best.map_or(true, |(bi, bj)| v.abs() < m.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap_rows(t, pi);
        m.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m.rows {
                if !m.get(i, t).is_zero() {
                    let q = m.get(i, t).div_floor(m.get(t, t));
                    m.row_axpy(i, t, &q);
                    dirty |= !m.get(i, t).is_zero();
                }
            }
            for j in t + 1..m.cols {
                if !m.get(t, j).is_zero() {
                    let q = m.get(t, j).div_floor(m.get(t, t));
                    m.col_axpy(j, t, &q);
                    dirty |= !m.get(t, j).is_zero();
                }
            }
            if dirty {
                // move the smallest remainder in row/column t to the pivot
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..m.rows {
                    let v = m.get(i, t);
                    if !v.is_zero() && v.abs() < m.get(bi, bj).abs() {
                        bi = i;
                        bj = t;
                    }
                }
                for j in t + 1..m.cols {
                    let v = m.get(t, j);
                    if !v.is_zero() && v.abs() < m.get(bi, bj).abs() {
                        bi = t;
                        bj = j;
                    }
                }
                m.swap_rows(t, bi);
                m.swap_cols(t, bj);
                continue;
            }
            // pivot must divide the whole trailing block
            let pivot = m.get(t, t).clone();
            let offender = (t + 1..m.rows).find(|&i| {
                (t + 1..m.cols).any(|j| !m.get(i, j).is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => m.row_axpy(t, i, &BigInt::from(-1)),
                None => break,
            }
        }
        divisors.push(m.get(t, t).abs());
    }
    divisors
}

/// Determinant of a square matrix by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> BigInt {
    assert_eq!(a.rows, a.cols, "determinant of non-square matrix");
    let n = a.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m.get(k, k).is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                return BigInt::zero();
            };
            m.swap_rows(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                m.set(i, j, v);
            }
        }
        prev = m.get(k, k).clone();
    }
    sign * m.get(n - 1, n - 1)
}

/// Rows are all exponent vectors `w_{i,j}` in block order
/// (`w_{1,0}, ..., w_{1,l_1}, w_{2,0}, ...`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentMatrix {
    pub matrix: IntMatrix,
    /// `(i, j)` for every row; `j = 0` is the lead exponent of block `i`.
    pub labels: Vec<(usize, usize)>,
}

impl ExponentMatrix {
    pub fn from_structure(ms: &MixedStructure) -> Self {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (i, block) in ms.blocks().iter().enumerate() {
            rows.push(block.lead.entries().to_vec());
            labels.push((i, 0));
            for (j, w) in block.body.iter().enumerate() {
                rows.push(w.entries().to_vec());
                labels.push((i, j + 1));
            }
        }
        ExponentMatrix {
            matrix: IntMatrix::from_i64_rows(&rows, ms.n()),
            labels,
        }
    }

    /// Matrix without block metadata; every row labelled `(0, r)`.
    pub fn from_rows(rows: &[Vec<i64>], n: usize) -> Self {
        ExponentMatrix {
            matrix: IntMatrix::from_i64_rows(rows, n),
            labels: (0..rows.len()).map(|r| (0, r)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.matrix.cols()
    }
}

/// Integer relations `alpha * W = 0`, one per row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationBasis {
    pub alphas: IntMatrix,
    /// `(i, j)` label of every column, copied from the exponent matrix.
    pub labels: Vec<(usize, usize)>,
}

impl RelationBasis {
    pub fn len(&self) -> usize {
        self.alphas.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.rows() == 0
    }
}

fn require_full_rank(w: &ExponentMatrix) -> Result<ColumnHermite> {
    let ch = column_hermite(&w.matrix.transpose());
    if ch.rank < w.n() {
        return Err(Error::RankDeficient {
            rank: ch.rank,
            expected: w.n(),
        });
    }
    Ok(ch)
}

/// Basis of the saturated lattice of integer relations among the rows of `w`.
pub fn kernel_basis(w: &ExponentMatrix) -> Result<RelationBasis> {
    let ch = require_full_rank(w)?;
    let total = w.matrix.rows();
    let alphas = ch.u.columns(ch.rank..total).transpose();
    debug_assert!(alphas.mul(&w.matrix).is_zero());
    Ok(RelationBasis {
        alphas,
        labels: w.labels.clone(),
    })
}

/// `[Z^n : Z W]`, the product of the elementary divisors.
pub fn lattice_index(w: &ExponentMatrix) -> Result<BigInt> {
    let divisors = elementary_divisors(&w.matrix);
    if divisors.len() < w.n() {
        return Err(Error::RankDeficient {
            rank: divisors.len(),
            expected: w.n(),
        });
    }
    Ok(divisors.iter().product())
}

pub fn odd_index_check(w: &ExponentMatrix) -> Result<bool> {
    Ok(lattice_index(w)?.is_odd())
}

/// Unimodular `m` with `w * m = (d, 0, ..., 0)`, `d = gcd(w) > 0`.
pub fn unimodular_to_axis(w: &[i64]) -> Option<(BigInt, IntMatrix)> {
    let row = IntMatrix::from_i64_rows(&[w.to_vec()], w.len());
    let ch = column_hermite(&row);
    if ch.rank == 0 {
        return None;
    }
    Some((ch.h.get(0, 0).clone(), ch.u))
}
