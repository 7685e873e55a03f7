//! Dense matrices over a single scalar field, with the exact elimination
//! routines (RREF, nullspace, column space, inverse, pseudoinverse, linear
//! solve) that every other module builds on.
//!
//! All outputs follow fixed deterministic conventions so that certificates
//! reproduce byte-for-byte: elimination picks the first usable pivot over
//! exact fields (largest magnitude over floats), nullspace bases set each
//! free variable to one in increasing column order, and solves zero out free
//! variables.

use std::fmt;

use crate::field::{FieldTag, Scalar};

/// Default relative threshold below which a float entry is treated as zero
/// during elimination. Ignored by the exact fields.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    NonSquare {
        rows: usize,
        cols: usize,
    },
    /// Pseudoinverse is meaningless without an inner product; GF(p) callers
    /// use `solve_linear` instead.
    FieldUnsupported {
        op: &'static str,
        field: FieldTag,
    },
    NoSolution,
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::DimensionMismatch { op, left, right } => write!(
                f,
                "{op}: dimension mismatch {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            MatrixError::NonSquare { rows, cols } => {
                write!(f, "expected a square matrix, got {rows}x{cols}")
            }
            MatrixError::FieldUnsupported { op, field } => {
                write!(f, "{op} is not supported over {field}")
            }
            MatrixError::NoSolution => write!(f, "linear system has no solution"),
        }
    }
}

impl std::error::Error for MatrixError {}

/// Dense row-major matrix over one scalar field.
#[derive(Clone, PartialEq)]
pub struct Matrix<F: Scalar> {
    rows: usize,
    cols: usize,
    entries: Vec<F>,
}

impl<F: Scalar> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix<{}> {}x{} [", F::FIELD, self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}", self[(r, c)])?;
                if c + 1 < self.cols {
                    write!(f, ", ")?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Result of reduced-row-echelon elimination.
#[derive(Debug, Clone)]
pub struct Rref<F: Scalar> {
    pub matrix: Matrix<F>,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl<F: Scalar> Matrix<F> {
    pub fn new(rows: usize, cols: usize, entries: Vec<F>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![F::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Matrix::new(rows, cols, entries)
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let n = rows.len();
        Matrix::new(n, cols, rows.into_iter().flatten().collect())
    }

    /// Integer-seeded constructor, handy for fixtures over any field.
    pub fn from_ints(rows: usize, cols: usize, vals: &[i64]) -> Self {
        assert_eq!(vals.len(), rows * cols);
        Matrix::new(rows, cols, vals.iter().map(|&v| F::from_i64(v)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix<F> {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn map(&self, f: impl Fn(&F) -> F) -> Matrix<F> {
        Matrix::new(self.rows, self.cols, self.entries.iter().map(f).collect())
    }

    pub fn neg(&self) -> Matrix<F> {
        self.map(|e| e.neg())
    }

    pub fn scale(&self, s: &F) -> Matrix<F> {
        self.map(|e| e.mul(s))
    }

    pub fn add(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "add: shape mismatch"
        );
        Matrix::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "sub: shape mismatch"
        );
        Matrix::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    pub fn mul(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(
            self.cols, rhs.rows,
            "mul: inner dimensions {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out: Matrix<F> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.mul(&rhs[(k, j)]);
                    out[(i, j)] = out[(i, j)].add(&prod);
                }
            }
        }
        out
    }

    /// Ordered product of a non-empty factor list.
    pub fn product(factors: &[Matrix<F>]) -> Matrix<F> {
        assert!(!factors.is_empty(), "empty product");
        factors[1..]
            .iter()
            .fold(factors[0].clone(), |acc, m| acc.mul(m))
    }

    pub fn hstack(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.rows, rhs.rows, "hstack: row mismatch");
        Matrix::from_fn(self.rows, self.cols + rhs.cols, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                rhs[(r, c - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, rhs.cols, "vstack: column mismatch");
        Matrix::from_fn(self.rows + rhs.rows, self.cols, |r, c| {
            if r < self.rows {
                self[(r, c)].clone()
            } else {
                rhs[(r - self.rows, c)].clone()
            }
        })
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix<F> {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        Matrix::from_fn(r1 - r0, c1 - c0, |r, c| self[(r0 + r, c0 + c)].clone())
    }

    /// Assemble a 2x2 block matrix `[a b; c d]`.
    pub fn from_blocks(a: &Matrix<F>, b: &Matrix<F>, c: &Matrix<F>, d: &Matrix<F>) -> Matrix<F> {
        assert_eq!(a.rows, b.rows, "block rows (top)");
        assert_eq!(c.rows, d.rows, "block rows (bottom)");
        assert_eq!(a.cols, c.cols, "block cols (left)");
        assert_eq!(b.cols, d.cols, "block cols (right)");
        a.hstack(b).vstack(&c.hstack(d))
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(F::is_zero)
    }

    pub fn is_identity_matrix(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    if r == c {
                        self[(r, c)] == F::one()
                    } else {
                        self[(r, c)].is_zero()
                    }
                })
            })
    }

    /// Frobenius-style magnitude of the matrix. Exactly 0.0 iff the matrix is
    /// exactly zero over an exact field; for GF(p) this is the square root of
    /// the number of non-zero entries.
    pub fn residual_norm(&self) -> f64 {
        if self.is_zero_matrix() {
            return 0.0;
        }
        let sum: f64 = self.entries.iter().map(|e| e.magnitude().powi(2)).sum();
        let norm = sum.sqrt();
        if norm == 0.0 {
            // Guard against underflow: the matrix is not exactly zero.
            f64::MIN_POSITIVE
        } else {
            norm
        }
    }

    /// `‖self − rhs‖` under the residual convention above.
    pub fn distance(&self, rhs: &Matrix<F>) -> f64 {
        self.sub(rhs).residual_norm()
    }

    /// Field-aware equality: exact over exact fields, `‖a−b‖ ≤ tol·max(1,‖a‖)`
    /// over floats.
    pub fn eq_within(&self, rhs: &Matrix<F>, tol: f64) -> bool {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return false;
        }
        if F::EXACT {
            self == rhs
        } else {
            self.distance(rhs) <= tol * 1f64.max(self.residual_norm())
        }
    }

    pub fn rref(&self) -> Rref<F> {
        self.rref_with(DEFAULT_ZERO_TOL)
    }

    /// Reduced row echelon form. Over exact fields the first non-zero entry
    /// in a column is the pivot; over floats the largest-magnitude entry is,
    /// and anything below `zero_tol` times the largest magnitude seen so far
    /// counts as zero.
    pub fn rref_with(&self, zero_tol: f64) -> Rref<F> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0usize;
        let mut running_max = if F::EXACT {
            0.0
        } else {
            m.entries
                .iter()
                .map(Scalar::magnitude)
                .fold(0.0f64, f64::max)
        };

        let negligible = |e: &F, max: f64| -> bool {
            if F::EXACT {
                e.is_zero()
            } else {
                e.is_zero() || e.magnitude() < zero_tol * max
            }
        };

        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            // Pivot choice: first non-zero (exact) or largest magnitude (float).
            let pivot = if F::EXACT {
                (pivot_row..m.rows).find(|&r| !m[(r, col)].is_zero())
            } else {
                (pivot_row..m.rows)
                    .filter(|&r| !negligible(&m[(r, col)], running_max))
                    .max_by(|&a, &b| {
                        m[(a, col)]
                            .magnitude()
                            .partial_cmp(&m[(b, col)].magnitude())
                            .unwrap_or(std::cmp::Ordering::Equal)
                    })
            };
            let Some(prow) = pivot else { continue };
            m.swap_rows(pivot_row, prow);

            let inv = m[(pivot_row, col)]
                .inv()
                .expect("pivot is non-zero by choice");
            for c in col..m.cols {
                m[(pivot_row, c)] = m[(pivot_row, c)].mul(&inv);
            }
            for r in 0..m.rows {
                if r == pivot_row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in col..m.cols {
                    let delta = factor.mul(&m[(pivot_row, c)]);
                    m[(r, c)] = m[(r, c)].sub(&delta);
                    if !F::EXACT {
                        running_max = running_max.max(m[(r, c)].magnitude());
                    }
                }
                m[(r, col)] = F::zero();
            }
            if !F::EXACT {
                // Snap sub-threshold residue in the pivot column to zero so the
                // echelon structure is literal.
                for r in 0..m.rows {
                    if r != pivot_row && negligible(&m[(r, col)], running_max) {
                        m[(r, col)] = F::zero();
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        if !F::EXACT {
            for e in m.entries.iter_mut() {
                if e.magnitude() < zero_tol * running_max {
                    *e = F::zero();
                }
            }
        }
        let rank = pivots.len();
        Rref {
            matrix: m,
            pivots,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Columns form the canonical basis of the nullspace: free variables are
    /// taken in increasing column order, the free coordinate set to one.
    pub fn nullspace_basis(&self) -> Matrix<F> {
        self.nullspace_basis_with(DEFAULT_ZERO_TOL)
    }

    pub fn nullspace_basis_with(&self, zero_tol: f64) -> Matrix<F> {
        let Rref {
            matrix: r,
            pivots,
            rank,
        } = self.rref_with(zero_tol);
        let n = self.cols;
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(n, free.len());
        for (j, &fc) in free.iter().enumerate() {
            basis[(fc, j)] = F::one();
            for (prow, &pcol) in pivots.iter().enumerate().take(rank) {
                basis[(pcol, j)] = r[(prow, fc)].neg();
            }
        }
        basis
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// The pivot columns of `self`, with their original entries.
    pub fn colspace_basis(&self) -> Matrix<F> {
        let pivots = self.rref().pivots;
        let mut basis = Matrix::zeros(self.rows, pivots.len());
        for (j, &c) in pivots.iter().enumerate() {
            for r in 0..self.rows {
                basis[(r, j)] = self[(r, c)].clone();
            }
        }
        basis
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(n));
        let red = aug.rref();
        if red.rank < n || red.pivots.iter().any(|&p| p >= n) {
            return None;
        }
        Some(red.matrix.submatrix(0, n, n, 2 * n))
    }

    /// Moore–Penrose pseudoinverse via the full-rank factorization
    /// `M = F·G`, `M⁺ = Gᵀ(GGᵀ)⁻¹(FᵀF)⁻¹Fᵀ`. Exact over the rationals.
    pub fn pseudoinverse(&self) -> Result<Matrix<F>, MatrixError> {
        match F::FIELD {
            FieldTag::Gf2 | FieldTag::Gf3 | FieldTag::Gf5 => {
                return Err(MatrixError::FieldUnsupported {
                    op: "pseudoinverse",
                    field: F::FIELD,
                })
            }
            FieldTag::Q | FieldTag::F64 => {}
        }
        let red = self.rref();
        let r = red.rank;
        if r == 0 {
            return Ok(Matrix::zeros(self.cols, self.rows));
        }
        let fac_f = self.colspace_basis(); // m x r
        let fac_g = red.matrix.submatrix(0, r, 0, self.cols); // r x n
        let gt = fac_g.transpose();
        let ft = fac_f.transpose();
        let ggt_inv = fac_g
            .mul(&gt)
            .inverse()
            .expect("GGᵀ is positive definite for full row rank G");
        let ftf_inv = ft
            .mul(&fac_f)
            .inverse()
            .expect("FᵀF is positive definite for full column rank F");
        Ok(gt.mul(&ggt_inv).mul(&ftf_inv).mul(&ft))
    }

    /// One solution of `A·X = B` with free variables set to zero, or
    /// `NoSolution` when some column of `B` leaves the column space of `A`.
    /// The solution map is linear in `B`, which downstream kernel arguments
    /// rely on.
    pub fn solve_linear(&self, b: &Matrix<F>) -> Result<Matrix<F>, MatrixError> {
        if self.rows != b.rows {
            return Err(MatrixError::DimensionMismatch {
                op: "solve_linear",
                left: (self.rows, self.cols),
                right: (b.rows, b.cols),
            });
        }
        let aug = self.hstack(b);
        let red = aug.rref();
        if red.pivots.iter().any(|&p| p >= self.cols) {
            return Err(MatrixError::NoSolution);
        }
        let mut x = Matrix::zeros(self.cols, b.cols);
        for (prow, &pcol) in red.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(pcol, j)] = red.matrix[(prow, self.cols + j)].clone();
            }
        }
        Ok(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl<F: Scalar> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;

    fn index(&self, (r, c): (usize, usize)) -> &F {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.entries[r * self.cols + c]
    }
}

impl<F: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut F {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &mut self.entries[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, Gf, Rat};

    fn mq(rows: usize, cols: usize, vals: &[i64]) -> Matrix<Rat> {
        Matrix::from_ints(rows, cols, vals)
    }

    #[test]
    fn rref_identity_is_identity() {
        let id = Matrix::<Rat>::identity(2);
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn rref_rank_one() {
        // row2 = 2*row1, so elimination leaves a single pivot in column 0.
        let m = mq(2, 2, &[1, 2, 2, 4]);
        let r = m.rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(r.matrix, mq(2, 2, &[1, 2, 0, 0]));
    }

    #[test]
    fn rref_zero_matrix() {
        let r = Matrix::<Rat>::zeros(3, 3).rref();
        assert_eq!(r.rank, 0);
        assert!(r.pivots.is_empty());
    }

    #[test]
    fn rref_is_idempotent_as_transformation() {
        let m = mq(3, 4, &[2, 4, 1, 7, 0, 3, 3, 1, 2, 7, 4, 8]);
        let once = m.rref().matrix;
        assert_eq!(once.rref().matrix, once);
    }

    #[test]
    fn nullspace_identity_empty() {
        assert_eq!(Matrix::<Rat>::identity(2).nullspace_basis().cols(), 0);
    }

    #[test]
    fn nullspace_canonical_vector() {
        // 2x + 3y = 0 with y = 1 gives (-3/2, 1).
        let m = mq(2, 2, &[2, 3, 0, 0]);
        let ns = m.nullspace_basis();
        assert_eq!(ns.cols(), 1);
        assert_eq!(ns[(0, 0)], rat(-3, 2));
        assert_eq!(ns[(1, 0)], rat(1, 1));
        assert!(m.mul(&ns).is_zero_matrix());
    }

    #[test]
    fn nullspace_of_zero_is_identity() {
        let ns = Matrix::<Rat>::zeros(2, 2).nullspace_basis();
        assert!(ns.is_identity_matrix());
    }

    #[test]
    fn colspace_of_rank_one() {
        let m = mq(2, 2, &[1, 2, 2, 4]);
        let cs = m.colspace_basis();
        assert_eq!(cs, mq(2, 1, &[1, 2]));
        assert_eq!(Matrix::<Rat>::zeros(2, 2).colspace_basis().cols(), 0);
        let id = Matrix::<Rat>::identity(3);
        assert_eq!(id.colspace_basis(), id);
    }

    #[test]
    fn pseudoinverse_of_invertible_is_inverse() {
        let m = mq(2, 2, &[1, 2, 3, 4]);
        let pinv = m.pseudoinverse().unwrap();
        assert_eq!(pinv, m.inverse().unwrap());
    }

    #[test]
    fn pseudoinverse_symmetric_idempotent() {
        let m = mq(2, 2, &[1, 0, 0, 0]);
        assert_eq!(m.pseudoinverse().unwrap(), m);
    }

    #[test]
    fn pseudoinverse_column_vector() {
        // (1,1)ᵀ⁺ = (1/2, 1/2): derived from Gᵀ(GGᵀ)⁻¹ with G = (1,1)ᵀ.
        let m = mq(2, 1, &[1, 1]);
        let p = m.pseudoinverse().unwrap();
        assert_eq!(p, Matrix::from_rows(vec![vec![rat(1, 2), rat(1, 2)]]));
    }

    #[test]
    fn penrose_identities_hold_exactly() {
        let m = mq(3, 2, &[1, 2, 2, 4, 0, 1]);
        let p = m.pseudoinverse().unwrap();
        assert_eq!(m.mul(&p).mul(&m), m);
        assert_eq!(p.mul(&m).mul(&p), p);
        let mp = m.mul(&p);
        assert_eq!(mp.transpose(), mp);
        let pm = p.mul(&m);
        assert_eq!(pm.transpose(), pm);
    }

    #[test]
    fn pseudoinverse_rejected_over_gf() {
        let m = Matrix::<Gf<2>>::identity(2);
        assert!(matches!(
            m.pseudoinverse(),
            Err(MatrixError::FieldUnsupported { .. })
        ));
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let b = mq(2, 2, &[5, 6, 7, 8]);
        let x = Matrix::<Rat>::identity(2).solve_linear(&b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn solve_detects_no_solution() {
        let a = mq(2, 2, &[1, 0, 0, 0]);
        let b = mq(2, 1, &[0, 1]);
        assert!(matches!(a.solve_linear(&b), Err(MatrixError::NoSolution)));
    }

    #[test]
    fn solve_over_gf2_matches_enumeration() {
        let a = Matrix::<Gf<2>>::from_ints(2, 2, &[1, 1, 0, 0]);
        let b = Matrix::<Gf<2>>::from_ints(2, 1, &[1, 0]);
        let x = a.solve_linear(&b).unwrap();
        // Oracle: enumerate all four vectors over GF(2).
        let solutions: Vec<Matrix<Gf<2>>> = (0..4)
            .map(|bits| Matrix::from_ints(2, 1, &[bits & 1, (bits >> 1) & 1]))
            .filter(|v| a.mul(v) == b)
            .collect();
        assert!(solutions.contains(&x));
        assert_eq!(x, Matrix::from_ints(2, 1, &[1, 0]));
    }

    #[test]
    fn float_rref_uses_relative_threshold() {
        let m = Matrix::<f64>::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-15]]);
        assert_eq!(m.rank(), 1);
        let m2 = Matrix::<f64>::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-9]]);
        assert_eq!(m2.rank(), 2);
    }

    #[test]
    fn float_nullspace_residual_small() {
        let m = Matrix::<f64>::from_rows(vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]);
        let ns = m.nullspace_basis();
        assert_eq!(ns.cols(), 2);
        assert!(m.mul(&ns).residual_norm() <= 1e-9);
    }

    #[test]
    fn rank_nullity_counts() {
        let m = mq(3, 4, &[1, 2, 3, 4, 2, 4, 6, 8, 0, 0, 1, 1]);
        assert_eq!(m.rank() + m.nullspace_basis().cols(), m.cols());
    }

    #[test]
    fn inverse_round_trip() {
        let m = mq(3, 3, &[2, 1, 0, 1, 3, 1, 0, 1, 1]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity_matrix());
        assert!(mq(2, 2, &[1, 2, 2, 4]).inverse().is_none());
    }

    #[test]
    fn block_assembly_round_trip() {
        let a = mq(1, 1, &[1]);
        let b = mq(1, 2, &[2, 3]);
        let c = mq(2, 1, &[4, 7]);
        let d = mq(2, 2, &[5, 6, 8, 9]);
        let m = Matrix::from_blocks(&a, &b, &c, &d);
        assert_eq!(m, mq(3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]));
        assert_eq!(m.submatrix(0, 1, 1, 3), b);
    }
}
