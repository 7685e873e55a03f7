//! Direct-sum decompositions `X = K ⊕ L`, the projectors and inclusions they
//! induce, and block representations of operators relative to them.
//!
//! Blocks are stored in decomposition coordinates (a `k`-dimensional block is
//! a `k×k` matrix, not `n×n`), so the block equations used throughout the
//! factorization recipes are literal matrix equations; [`BlockRep::assemble`]
//! performs the conjugation back to ambient coordinates.

use std::fmt;

use crate::field::Scalar;
use crate::matrix::{Matrix, DEFAULT_ZERO_TOL};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompError {
    /// The candidate basis columns are linearly dependent.
    DependentColumns,
    /// `k` must satisfy `1 ≤ k ≤ n−1`: both summands are non-zero and proper.
    BadDimension { n: usize, k: usize },
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// No local block representation: the operator is zero or has full range.
    NotApplicable(&'static str),
}

impl fmt::Display for DecompError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompError::DependentColumns => write!(f, "basis columns are linearly dependent"),
            DecompError::BadDimension { n, k } => {
                write!(
                    f,
                    "subspace dimension {k} must satisfy 1 <= k <= {}",
                    n.saturating_sub(1)
                )
            }
            DecompError::DimensionMismatch { expected, got } => write!(
                f,
                "dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            DecompError::NotApplicable(why) => write!(f, "not applicable: {why}"),
        }
    }
}

impl std::error::Error for DecompError {}

/// An ordered pair of subspace bases spanning `X = K ⊕ L`, with the
/// change-of-basis matrix `P = [K_basis | L_basis]` and its inverse cached.
#[derive(Clone, PartialEq)]
pub struct Decomposition<F: Scalar> {
    k_basis: Matrix<F>,
    l_basis: Matrix<F>,
    change: Matrix<F>,
    change_inv: Matrix<F>,
}

impl<F: Scalar> fmt::Debug for Decomposition<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Decomposition<{}> n={} k={} K={:?} L={:?}",
            F::FIELD,
            self.ambient_dim(),
            self.k_dim(),
            self.k_basis,
            self.l_basis
        )
    }
}

impl<F: Scalar> Decomposition<F> {
    /// Build a decomposition from explicit bases of `K` and `L`.
    pub fn new(k_basis: Matrix<F>, l_basis: Matrix<F>) -> Result<Self, DecompError> {
        let n = k_basis.rows();
        let k = k_basis.cols();
        if l_basis.rows() != n {
            return Err(DecompError::DimensionMismatch {
                expected: (n, n - k),
                got: (l_basis.rows(), l_basis.cols()),
            });
        }
        if k == 0 || k >= n || l_basis.cols() != n - k {
            return Err(DecompError::BadDimension { n, k });
        }
        let change = k_basis.hstack(&l_basis);
        let change_inv = change.inverse().ok_or(DecompError::DependentColumns)?;
        Ok(Decomposition {
            k_basis,
            l_basis,
            change,
            change_inv,
        })
    }

    /// The standard-coordinate decomposition: `K` spanned by the first `k`
    /// standard basis vectors, `L` by the rest.
    pub fn standard(n: usize, k: usize) -> Result<Self, DecompError> {
        let id = Matrix::<F>::identity(n);
        Decomposition::new(id.submatrix(0, n, 0, k), id.submatrix(0, n, k, n))
    }

    /// Extend `K` to the whole space by the lexicographically-first standard
    /// basis vectors that stay independent. Deterministic.
    pub fn extend_to_complement(k_basis: Matrix<F>) -> Result<Self, DecompError> {
        let n = k_basis.rows();
        let k = k_basis.cols();
        if k == 0 || k >= n {
            return Err(DecompError::BadDimension { n, k });
        }
        if k_basis.rank() != k {
            return Err(DecompError::DependentColumns);
        }
        let mut current = k_basis.clone();
        let mut l_cols: Vec<usize> = Vec::new();
        for i in 0..n {
            if current.cols() == n {
                break;
            }
            let mut e = Matrix::zeros(n, 1);
            e[(i, 0)] = F::one();
            let cand = current.hstack(&e);
            if cand.rank() == current.cols() + 1 {
                current = cand;
                l_cols.push(i);
            }
        }
        let mut l_basis = Matrix::zeros(n, n - k);
        for (j, &i) in l_cols.iter().enumerate() {
            l_basis[(i, j)] = F::one();
        }
        Decomposition::new(k_basis, l_basis)
    }

    /// Orthogonal-complement variant: `L = N(Kᵀ)`, modelling the Hilbert-space
    /// decomposition `K ⊕⊥ L` for the rationals and floats.
    pub fn orthogonal_complement(k_basis: Matrix<F>) -> Result<Self, DecompError> {
        let n = k_basis.rows();
        let k = k_basis.cols();
        if k == 0 || k >= n {
            return Err(DecompError::BadDimension { n, k });
        }
        if k_basis.rank() != k {
            return Err(DecompError::DependentColumns);
        }
        let l_basis = k_basis.transpose().nullspace_basis();
        Decomposition::new(k_basis, l_basis)
    }

    pub fn ambient_dim(&self) -> usize {
        self.k_basis.rows()
    }

    pub fn k_dim(&self) -> usize {
        self.k_basis.cols()
    }

    pub fn l_dim(&self) -> usize {
        self.l_basis.cols()
    }

    pub fn k_basis(&self) -> &Matrix<F> {
        &self.k_basis
    }

    pub fn l_basis(&self) -> &Matrix<F> {
        &self.l_basis
    }

    pub fn change_of_basis(&self) -> &Matrix<F> {
        &self.change
    }

    pub fn change_of_basis_inv(&self) -> &Matrix<F> {
        &self.change_inv
    }

    /// The projection on `K` along `L`: idempotent with range `K` and
    /// nullspace `L`, computed as `P·diag(I_k, 0)·P⁻¹`.
    pub fn projector(&self) -> Matrix<F> {
        let n = self.ambient_dim();
        let k = self.k_dim();
        let mut diag = Matrix::zeros(n, n);
        for i in 0..k {
            diag[(i, i)] = F::one();
        }
        self.change.mul(&diag).mul(&self.change_inv)
    }

    /// The complementary projection `I − P_K` on `L` along `K`.
    pub fn complement_projector(&self) -> Matrix<F> {
        Matrix::identity(self.ambient_dim()).sub(&self.projector())
    }

    /// Block representation of `T` relative to this decomposition:
    /// `T1 = p_K T i_K`, `T2 = p_K T i_L`, `T3 = p_L T i_K`, `T4 = p_L T i_L`,
    /// all in coordinates.
    pub fn block_rep(&self, t: &Matrix<F>) -> Result<BlockRep<F>, DecompError> {
        let n = self.ambient_dim();
        if (t.rows(), t.cols()) != (n, n) {
            return Err(DecompError::DimensionMismatch {
                expected: (n, n),
                got: (t.rows(), t.cols()),
            });
        }
        let k = self.k_dim();
        let coords = self.change_inv.mul(t).mul(&self.change);
        Ok(BlockRep {
            decomposition: self.clone(),
            t1: coords.submatrix(0, k, 0, k),
            t2: coords.submatrix(0, k, k, n),
            t3: coords.submatrix(k, n, 0, k),
            t4: coords.submatrix(k, n, k, n),
            local: false,
        })
    }
}

/// The four blocks of an operator relative to a decomposition. A rep flagged
/// `local` has `T3 = 0` and `T4 = 0`, i.e. the range lies inside `K`.
#[derive(Clone, PartialEq)]
pub struct BlockRep<F: Scalar> {
    decomposition: Decomposition<F>,
    t1: Matrix<F>,
    t2: Matrix<F>,
    t3: Matrix<F>,
    t4: Matrix<F>,
    local: bool,
}

impl<F: Scalar> fmt::Debug for BlockRep<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BlockRep<{}> local={} T1={:?} T2={:?} T3={:?} T4={:?}",
            F::FIELD,
            self.local,
            self.t1,
            self.t2,
            self.t3,
            self.t4
        )
    }
}

impl<F: Scalar> BlockRep<F> {
    /// Build a block representation from explicit blocks.
    pub fn from_blocks(
        decomposition: Decomposition<F>,
        t1: Matrix<F>,
        t2: Matrix<F>,
        t3: Matrix<F>,
        t4: Matrix<F>,
    ) -> Result<Self, DecompError> {
        let k = decomposition.k_dim();
        let l = decomposition.l_dim();
        for (block, shape) in [(&t1, (k, k)), (&t2, (k, l)), (&t3, (l, k)), (&t4, (l, l))] {
            if (block.rows(), block.cols()) != shape {
                return Err(DecompError::DimensionMismatch {
                    expected: shape,
                    got: (block.rows(), block.cols()),
                });
            }
        }
        let local = t3.is_zero_matrix() && t4.is_zero_matrix();
        Ok(BlockRep {
            decomposition,
            t1,
            t2,
            t3,
            t4,
            local,
        })
    }

    /// A local rep `[T1, T2; 0, 0]` from its two non-trivial blocks.
    pub fn local_from_blocks(
        decomposition: Decomposition<F>,
        t1: Matrix<F>,
        t2: Matrix<F>,
    ) -> Result<Self, DecompError> {
        let k = decomposition.k_dim();
        let l = decomposition.l_dim();
        BlockRep::from_blocks(
            decomposition,
            t1,
            t2,
            Matrix::zeros(l, k),
            Matrix::zeros(l, l),
        )
    }

    pub fn decomposition(&self) -> &Decomposition<F> {
        &self.decomposition
    }

    pub fn t1(&self) -> &Matrix<F> {
        &self.t1
    }

    pub fn t2(&self) -> &Matrix<F> {
        &self.t2
    }

    pub fn t3(&self) -> &Matrix<F> {
        &self.t3
    }

    pub fn t4(&self) -> &Matrix<F> {
        &self.t4
    }

    pub fn is_local(&self) -> bool {
        self.local
    }

    pub fn k_dim(&self) -> usize {
        self.decomposition.k_dim()
    }

    pub fn l_dim(&self) -> usize {
        self.decomposition.l_dim()
    }

    /// The blocks as one `n×n` matrix in decomposition coordinates.
    pub fn coordinate_matrix(&self) -> Matrix<F> {
        Matrix::from_blocks(&self.t1, &self.t2, &self.t3, &self.t4)
    }

    /// The unique operator whose block representation this is.
    pub fn assemble(&self) -> Matrix<F> {
        let d = &self.decomposition;
        d.change.mul(&self.coordinate_matrix()).mul(&d.change_inv)
    }

    /// Block multiply of two reps over the same decomposition.
    pub fn compose(&self, rhs: &BlockRep<F>) -> Result<BlockRep<F>, DecompError> {
        if self.decomposition != rhs.decomposition {
            return Err(DecompError::NotApplicable(
                "block product requires a common decomposition",
            ));
        }
        let t1 = self.t1.mul(&rhs.t1).add(&self.t2.mul(&rhs.t3));
        let t2 = self.t1.mul(&rhs.t2).add(&self.t2.mul(&rhs.t4));
        let t3 = self.t3.mul(&rhs.t1).add(&self.t4.mul(&rhs.t3));
        let t4 = self.t3.mul(&rhs.t2).add(&self.t4.mul(&rhs.t4));
        BlockRep::from_blocks(self.decomposition.clone(), t1, t2, t3, t4)
    }
}

/// Local block representation of `T`: `K` is exactly the range of `T`
/// (the minimum admissible choice, which makes outputs canonical), `L` the
/// greedy standard-basis complement, and the rep has `T3 = 0`, `T4 = 0`.
///
/// Fails with `NotApplicable` when `T = 0` or `T` has full range, i.e. when
/// `T` has no non-zero left annihilator.
pub fn local_block_rep<F: Scalar>(t: &Matrix<F>) -> Result<BlockRep<F>, DecompError> {
    if t.is_zero_matrix() {
        return Err(DecompError::NotApplicable("zero operator"));
    }
    let k_basis = t.colspace_basis();
    if k_basis.cols() == t.rows() {
        return Err(DecompError::NotApplicable(
            "operator has full range, hence no non-zero left annihilator",
        ));
    }
    let d = Decomposition::extend_to_complement(k_basis)?;
    local_rep_in(t, d)
}

/// Variant entry point: a caller-supplied `K ⊇ R(T)` (as a basis matrix)
/// instead of the canonical minimum `K = R(T)`.
pub fn local_block_rep_in<F: Scalar>(
    t: &Matrix<F>,
    k_basis: Matrix<F>,
) -> Result<BlockRep<F>, DecompError> {
    if t.is_zero_matrix() {
        return Err(DecompError::NotApplicable("zero operator"));
    }
    let k = k_basis.cols();
    if k_basis.rank() != k {
        return Err(DecompError::DependentColumns);
    }
    // R(T) ⊆ span(K): appending the columns of T must not raise the rank.
    if k_basis.hstack(t).rank() != k {
        return Err(DecompError::NotApplicable(
            "K does not contain the range of T",
        ));
    }
    let d = Decomposition::extend_to_complement(k_basis)?;
    local_rep_in(t, d)
}

fn local_rep_in<F: Scalar>(t: &Matrix<F>, d: Decomposition<F>) -> Result<BlockRep<F>, DecompError> {
    let rep = d.block_rep(t)?;
    if F::EXACT {
        debug_assert!(rep.t3.is_zero_matrix() && rep.t4.is_zero_matrix());
    } else {
        // Floating-point conjugation leaves dust in the annihilated blocks;
        // snap it to exact zeros once it is below the elimination threshold.
        let scale = 1f64.max(t.residual_norm());
        if rep.t3.residual_norm() > DEFAULT_ZERO_TOL * scale * 1e3
            || rep.t4.residual_norm() > DEFAULT_ZERO_TOL * scale * 1e3
        {
            return Err(DecompError::NotApplicable(
                "bottom blocks are not negligible; K does not contain the range",
            ));
        }
    }
    BlockRep::local_from_blocks(d, rep.t1, rep.t2)
}

/// Mirrored local form: `L` is exactly the range of `T`, `K` the greedy
/// complement, so the rep is `[0, 0; T3, T4]`. Used by the range-swallow
/// mirror recipe.
pub fn colocal_block_rep<F: Scalar>(t: &Matrix<F>) -> Result<BlockRep<F>, DecompError> {
    if t.is_zero_matrix() {
        return Err(DecompError::NotApplicable("zero operator"));
    }
    let l_basis = t.colspace_basis();
    let n = t.rows();
    if l_basis.cols() == n {
        return Err(DecompError::NotApplicable(
            "operator has full range, hence no non-zero left annihilator",
        ));
    }
    // Greedy standard-basis complement of R(T), taken as K.
    let mirror = Decomposition::extend_to_complement(l_basis.clone())?;
    let d = Decomposition::new(mirror.l_basis().clone(), l_basis)?;
    let rep = d.block_rep(t)?;
    let zeroed = BlockRep::from_blocks(
        d,
        Matrix::zeros(rep.t1.rows(), rep.t1.cols()),
        Matrix::zeros(rep.t2.rows(), rep.t2.cols()),
        rep.t3.clone(),
        rep.t4.clone(),
    )?;
    if F::EXACT {
        debug_assert!(rep.t1.is_zero_matrix() && rep.t2.is_zero_matrix());
    } else {
        let scale = 1f64.max(t.residual_norm());
        if rep.t1.residual_norm() > DEFAULT_ZERO_TOL * scale * 1e3
            || rep.t2.residual_norm() > DEFAULT_ZERO_TOL * scale * 1e3
        {
            return Err(DecompError::NotApplicable(
                "top blocks are not negligible; L does not contain the range",
            ));
        }
    }
    Ok(zeroed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Gf, Rat};

    fn mq(rows: usize, cols: usize, vals: &[i64]) -> Matrix<Rat> {
        Matrix::from_ints(rows, cols, vals)
    }

    #[test]
    fn extend_standard_vector() {
        let d = Decomposition::extend_to_complement(mq(2, 1, &[1, 0])).unwrap();
        assert_eq!(d.l_basis(), &mq(2, 1, &[0, 1]));
    }

    #[test]
    fn extend_diagonal_vector_picks_e1() {
        // e1 is the first standard vector independent of (1,1)ᵀ.
        let d = Decomposition::extend_to_complement(mq(2, 1, &[1, 1])).unwrap();
        assert_eq!(d.l_basis(), &mq(2, 1, &[1, 0]));
    }

    #[test]
    fn extend_rejects_full_space() {
        assert_eq!(
            Decomposition::extend_to_complement(Matrix::<Rat>::identity(2)).unwrap_err(),
            DecompError::BadDimension { n: 2, k: 2 }
        );
    }

    #[test]
    fn extend_rejects_dependent_columns() {
        let m = mq(3, 2, &[1, 2, 2, 4, 0, 0]);
        assert_eq!(
            Decomposition::extend_to_complement(m).unwrap_err(),
            DecompError::DependentColumns
        );
    }

    #[test]
    fn projector_standard_axes() {
        let d = Decomposition::extend_to_complement(mq(2, 1, &[1, 0])).unwrap();
        assert_eq!(d.projector(), mq(2, 2, &[1, 0, 0, 0]));
    }

    #[test]
    fn projector_oblique() {
        // P(1,1)ᵀ = (1,1)ᵀ and P e1 = 0 solve to [[0,1],[0,1]].
        let d = Decomposition::new(mq(2, 1, &[1, 1]), mq(2, 1, &[1, 0])).unwrap();
        let p = d.projector();
        assert_eq!(p, mq(2, 2, &[0, 1, 0, 1]));
        assert_eq!(p.mul(&p), p);
        assert_eq!(p.rank(), d.k_dim());
        assert_eq!(p.mul(d.k_basis()), *d.k_basis());
        assert!(p.mul(d.l_basis()).is_zero_matrix());
    }

    #[test]
    fn complement_projector_swaps_range_and_nullspace() {
        let d = Decomposition::new(mq(2, 1, &[1, 1]), mq(2, 1, &[1, 0])).unwrap();
        let q = d.complement_projector();
        assert_eq!(q.mul(&q), q);
        assert!(q.mul(d.k_basis()).is_zero_matrix());
        assert_eq!(q.mul(d.l_basis()), *d.l_basis());
    }

    #[test]
    fn block_rep_standard_coordinates() {
        let d = Decomposition::extend_to_complement(mq(2, 1, &[1, 0])).unwrap();
        let t = mq(2, 2, &[1, 2, 3, 4]);
        let b = d.block_rep(&t).unwrap();
        assert_eq!(b.t1(), &mq(1, 1, &[1]));
        assert_eq!(b.t2(), &mq(1, 1, &[2]));
        assert_eq!(b.t3(), &mq(1, 1, &[3]));
        assert_eq!(b.t4(), &mq(1, 1, &[4]));
        assert_eq!(b.assemble(), t);
    }

    #[test]
    fn block_rep_oblique_coordinates() {
        // T(1,1)ᵀ = 2·(1,1)ᵀ and T e1 = (1,1)ᵀ = 1·(1,1)ᵀ + 0·e1.
        let d = Decomposition::new(mq(2, 1, &[1, 1]), mq(2, 1, &[1, 0])).unwrap();
        let t = mq(2, 2, &[1, 1, 1, 1]);
        let b = d.block_rep(&t).unwrap();
        assert_eq!(b.t1(), &mq(1, 1, &[2]));
        assert_eq!(b.t2(), &mq(1, 1, &[1]));
        assert!(b.t3().is_zero_matrix());
        assert!(b.t4().is_zero_matrix());
        assert_eq!(b.assemble(), t);
    }

    #[test]
    fn block_rep_zero_operator() {
        let d = Decomposition::new(mq(2, 1, &[1, 1]), mq(2, 1, &[1, 0])).unwrap();
        let b = d.block_rep(&Matrix::zeros(2, 2)).unwrap();
        assert!(b.coordinate_matrix().is_zero_matrix());
        assert!(b.assemble().is_zero_matrix());
    }

    #[test]
    fn local_rep_of_rank_one() {
        let t = mq(2, 2, &[1, 1, 1, 1]);
        let b = local_block_rep(&t).unwrap();
        assert!(b.is_local());
        assert_eq!(b.decomposition().k_basis(), &mq(2, 1, &[1, 1]));
        assert_eq!(b.t1(), &mq(1, 1, &[2]));
        assert_eq!(b.t2(), &mq(1, 1, &[1]));
        assert_eq!(b.assemble(), t);
    }

    #[test]
    fn local_rep_rejects_invertible_and_zero() {
        assert!(matches!(
            local_block_rep(&Matrix::<Rat>::identity(2)),
            Err(DecompError::NotApplicable(_))
        ));
        assert!(matches!(
            local_block_rep(&Matrix::<Rat>::zeros(2, 2)),
            Err(DecompError::NotApplicable(_))
        ));
    }

    #[test]
    fn local_rep_scaled_unit() {
        let t = mq(2, 2, &[5, 0, 0, 0]);
        let b = local_block_rep(&t).unwrap();
        assert_eq!(b.decomposition().k_basis(), &mq(2, 1, &[5, 0]));
        assert_eq!(b.t1(), &mq(1, 1, &[5]));
        assert!(b.t2().is_zero_matrix());
    }

    #[test]
    fn local_rep_with_larger_k() {
        let t = mq(3, 3, &[1, 0, 0, 0, 0, 0, 0, 0, 0]);
        let k = mq(3, 2, &[1, 0, 0, 1, 0, 0]);
        let b = local_block_rep_in(&t, k).unwrap();
        assert_eq!(b.k_dim(), 2);
        assert_eq!(b.assemble(), t);
        // K must contain the range.
        let bad_k = mq(3, 1, &[0, 1, 0]);
        assert!(local_block_rep_in(&t, bad_k).is_err());
    }

    #[test]
    fn colocal_rep_mirrors() {
        let t = mq(2, 2, &[0, 0, 3, 6]);
        let b = colocal_block_rep(&t).unwrap();
        assert!(b.t1().is_zero_matrix() && b.t2().is_zero_matrix());
        assert_eq!(b.assemble(), t);
    }

    #[test]
    fn round_trip_over_gf3() {
        let t = Matrix::<Gf<3>>::from_ints(3, 3, &[1, 2, 0, 0, 1, 1, 2, 2, 2]);
        let k = Matrix::<Gf<3>>::from_ints(3, 1, &[1, 1, 0]);
        let d = Decomposition::extend_to_complement(k).unwrap();
        let b = d.block_rep(&t).unwrap();
        assert_eq!(b.assemble(), t);
    }

    #[test]
    fn orthogonal_complement_is_orthogonal() {
        let k = mq(3, 1, &[1, 1, 1]);
        let d = Decomposition::orthogonal_complement(k).unwrap();
        assert!(d.k_basis().transpose().mul(d.l_basis()).is_zero_matrix());
        let p = d.projector();
        assert_eq!(p.mul(&p), p);
    }

    #[test]
    fn float_local_rep() {
        let t = Matrix::<f64>::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        let b = local_block_rep(&t).unwrap();
        assert!(b.is_local());
        assert!(b.assemble().eq_within(&t, 1e-9));
    }
}
