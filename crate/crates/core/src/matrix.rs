//! Dense matrices over a prime field.
//!
//! Gaussian elimination always pivots on the first nonzero entry of the
//! current column, so every result here is deterministic.

use rand::Rng;
use thiserror::Error;

use crate::gf::{FieldElement, GfError, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear system has no solution")]
    NoSolution,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("cannot complete the zero vector to a basis")]
    ZeroVector,
    #[error(transparent)]
    Field(#[from] GfError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

/// One solution of `A x = y` together with a basis of the null space of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<FieldElement>,
    pub nullspace: Vec<Vec<FieldElement>>,
}

impl Solution {
    pub fn is_unique(&self) -> bool {
        self.nullspace.is_empty()
    }
}

impl Matrix {
    pub fn new(field: PrimeField, rows: usize, cols: usize, entries: Vec<FieldElement>) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| e.field() != field) {
            return Err(GfError::FieldMismatch(field.modulus(), e.field().modulus()).into());
        }
        Ok(Self {
            field,
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Build from row vectors. `cols` is needed for the zero-row case.
    pub fn from_rows(field: PrimeField, cols: usize, rows: &[Vec<FieldElement>]) -> Result<Self, MatrixError> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(MatrixError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            entries.extend_from_slice(r);
        }
        Self::new(field, rows.len(), cols, entries)
    }

    pub fn from_u64_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        let rows: Vec<Vec<FieldElement>> = rows.iter().map(|r| field.vector(r)).collect();
        Self::from_rows(field, cols, &rows)
    }

    /// Build from column vectors of equal length `rows`.
    pub fn from_columns(field: PrimeField, rows: usize, columns: &[Vec<FieldElement>]) -> Result<Self, MatrixError> {
        Ok(Self::from_rows(field, rows, columns)?.transpose())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>, MatrixError> {
        if x.len() != self.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(self.field.zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = m.get(r, j) * inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(i, j) - factor * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Solve `self * x = y`. Returns one solution (free variables set to
    /// zero) and a null-space basis, or `NoSolution` when inconsistent.
    pub fn solve(&self, y: &[FieldElement]) -> Result<Solution, MatrixError> {
        if y.len() != self.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                y.len(),
                self.rows
            )));
        }
        let mut aug = Self::zeros(self.field, self.rows, self.cols + 1);
        for (r, &yr) in y.iter().enumerate() {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, yr);
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Err(MatrixError::NoSolution);
        }
        let mut particular = vec![self.field.zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            particular[pc] = red.get(row, self.cols);
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let nullspace = free
            .iter()
            .map(|&fc| {
                let mut v = vec![self.field.zero(); self.cols];
                v[fc] = self.field.one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -red.get(row, fc);
                }
                v
            })
            .collect();
        Ok(Solution { particular, nullspace })
    }

    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut aug = Self::zeros(self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, self.field.one());
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(MatrixError::Singular);
        }
        let mut inv = Self::zeros(self.field, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.get(r, n + c));
            }
        }
        Ok(inv)
    }
}

/// Rank of a list of equal-length vectors.
pub fn vectors_rank(field: PrimeField, dim: usize, vectors: &[Vec<FieldElement>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(field, dim, vectors)
        .expect("vectors of equal length")
        .rank()
}

/// Invertible `m x m` matrix whose column `position` is `v`. The other
/// columns are standard basis vectors taken greedily in index order,
/// skipping any that would break independence.
pub fn complete_to_basis(v: &[FieldElement], position: usize) -> Result<Matrix, MatrixError> {
    complete_with(v, position, |i, field, m| {
        let mut e = vec![field.zero(); m];
        e[i % m] = field.one();
        Some(e)
    })
}

/// As [`complete_to_basis`], but the filler columns are random vectors.
pub fn complete_to_basis_random<R: Rng>(
    v: &[FieldElement],
    position: usize,
    rng: &mut R,
) -> Result<Matrix, MatrixError> {
    complete_with(v, position, |_, field, m| {
        Some(
            (0..m)
                .map(|_| field.elem(rng.random_range(0..field.modulus())))
                .collect(),
        )
    })
}

fn complete_with<F>(v: &[FieldElement], position: usize, mut next: F) -> Result<Matrix, MatrixError>
where
    F: FnMut(usize, PrimeField, usize) -> Option<Vec<FieldElement>>,
{
    let m = v.len();
    if position >= m {
        return Err(MatrixError::DimensionMismatch(format!(
            "column {position} of a {m}x{m} matrix"
        )));
    }
    let field = v[0].field();
    if v.iter().all(FieldElement::is_zero) {
        return Err(MatrixError::ZeroVector);
    }
    let mut chosen = vec![v.to_vec()];
    let mut attempt = 0usize;
    // Standard basis completion needs at most m candidates; random completion
    // succeeds with overwhelming probability long before this cap.
    let cap = 64 * m + 64;
    while chosen.len() < m {
        if attempt >= cap {
            return Err(MatrixError::Singular);
        }
        let Some(c) = next(attempt, field, m) else { break };
        attempt += 1;
        chosen.push(c);
        if vectors_rank(field, m, &chosen) < chosen.len() {
            chosen.pop();
        }
    }
    let pinned = chosen.remove(0);
    let mut columns = chosen;
    columns.insert(position, pinned);
    Matrix::from_columns(field, m, &columns)
}
