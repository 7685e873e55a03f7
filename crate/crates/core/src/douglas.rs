//! Range-inclusion factorization: `R(U) ⊆ R(V)` iff `U = VW`, with the unique
//! minimal-kernel solution `W₀` satisfying `N(W₀) = N(U)`.
//!
//! Over the rationals and floats `W₀ = V⁺U`; over GF(p) the canonical
//! columnwise solve with free variables zero is linear in `U`, which forces
//! `N(W₀) ⊇ N(U)` by construction, and `U = VW₀` gives the reverse inclusion.
//! Kernel equality is re-verified on every call rather than trusted.

use std::fmt;

use crate::field::{FieldTag, Scalar};
use crate::matrix::{Matrix, MatrixError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DouglasError {
    DimensionMismatch {
        u_rows: usize,
        v_rows: usize,
    },
    RangeNotContained,
    /// The computed solution failed the kernel-equality check; no certificate
    /// is returned rather than a wrong one.
    InternalNormalizationFailure,
}

impl fmt::Display for DouglasError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DouglasError::DimensionMismatch { u_rows, v_rows } => {
                write!(f, "U has {u_rows} rows but V has {v_rows}")
            }
            DouglasError::RangeNotContained => {
                write!(f, "the range of U is not contained in the range of V")
            }
            DouglasError::InternalNormalizationFailure => {
                write!(f, "minimal-kernel normalization failed verification")
            }
        }
    }
}

impl std::error::Error for DouglasError {}

/// `R(U) ⊆ R(V)`, decided by `rank([V|U]) = rank(V)`.
pub fn range_included<F: Scalar>(u: &Matrix<F>, v: &Matrix<F>) -> Result<bool, DouglasError> {
    if u.rows() != v.rows() {
        return Err(DouglasError::DimensionMismatch {
            u_rows: u.rows(),
            v_rows: v.rows(),
        });
    }
    Ok(v.hstack(u).rank() == v.rank())
}

/// Solve `U = V·W₀` with `N(W₀) = N(U)`.
pub fn douglas_solve<F: Scalar>(u: &Matrix<F>, v: &Matrix<F>) -> Result<Matrix<F>, DouglasError> {
    if !range_included(u, v)? {
        return Err(DouglasError::RangeNotContained);
    }
    let w0 = match F::FIELD {
        FieldTag::Q | FieldTag::F64 => {
            let pinv = v
                .pseudoinverse()
                .expect("pseudoinverse exists over Q and F64");
            pinv.mul(u)
        }
        FieldTag::Gf2 | FieldTag::Gf3 | FieldTag::Gf5 => match v.solve_linear(u) {
            Ok(x) => x,
            Err(MatrixError::NoSolution) => return Err(DouglasError::RangeNotContained),
            Err(e) => unreachable!("dimensions were checked: {e}"),
        },
    };

    // Kernel equality by rank plus annihilation of a kernel basis.
    let tol_ok = |m: &Matrix<F>| {
        if F::EXACT {
            m.is_zero_matrix()
        } else {
            m.residual_norm() <= 1e-9 * 1f64.max(u.residual_norm())
        }
    };
    let product_ok = tol_ok(&v.mul(&w0).sub(u));
    let kernel_ok = w0.nullity() == u.nullity() && tol_ok(&w0.mul(&u.nullspace_basis()));
    if !product_ok || !kernel_ok {
        return Err(DouglasError::InternalNormalizationFailure);
    }
    Ok(w0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Gf, Rat};
    use crate::rng::SplitMix64;

    fn mq(rows: usize, cols: usize, vals: &[i64]) -> Matrix<Rat> {
        Matrix::from_ints(rows, cols, vals)
    }

    #[test]
    fn invertible_v_contains_everything() {
        let v = mq(2, 2, &[2, 1, 1, 1]);
        let u = mq(2, 2, &[5, 0, 3, 9]);
        assert!(range_included(&u, &v).unwrap());
    }

    #[test]
    fn zero_v_contains_only_zero() {
        let v = Matrix::<Rat>::zeros(2, 2);
        assert!(!range_included(&mq(2, 2, &[1, 0, 0, 0]), &v).unwrap());
        assert!(range_included(&Matrix::zeros(2, 2), &v).unwrap());
    }

    #[test]
    fn column_multiples_are_contained() {
        let v = mq(2, 1, &[1, 0]);
        let u = mq(2, 2, &[2, 3, 0, 0]);
        assert!(range_included(&u, &v).unwrap());
    }

    #[test]
    fn solve_with_identity_returns_u() {
        let u = mq(2, 2, &[4, 1, 2, 2]);
        assert_eq!(douglas_solve(&u, &Matrix::identity(2)).unwrap(), u);
    }

    #[test]
    fn solve_projection_case() {
        let v = mq(2, 2, &[1, 0, 0, 0]);
        let u = mq(2, 2, &[2, 0, 0, 0]);
        let w0 = douglas_solve(&u, &v).unwrap();
        assert_eq!(w0, mq(2, 2, &[2, 0, 0, 0]));
        assert_eq!(w0.nullity(), u.nullity());
    }

    #[test]
    fn solve_row_case_minimal_kernel() {
        let v = mq(2, 1, &[1, 0]);
        let u = mq(2, 2, &[2, 3, 0, 0]);
        let w0 = douglas_solve(&u, &v).unwrap();
        assert_eq!(w0, mq(1, 2, &[2, 3]));
        // N(W0) = N(U) = span((3,−2)ᵀ); both have nullity one.
        assert_eq!(w0.nullity(), 1);
        assert!(w0.mul(&u.nullspace_basis()).is_zero_matrix());
    }

    #[test]
    fn solve_detects_range_violation() {
        let v = mq(2, 2, &[1, 0, 0, 0]);
        let u = mq(2, 2, &[0, 0, 1, 0]);
        assert_eq!(
            douglas_solve(&u, &v).unwrap_err(),
            DouglasError::RangeNotContained
        );
        // Cross-check: the raw linear solver rejects the same system.
        assert!(v.solve_linear(&u).is_err());
    }

    #[test]
    fn rejections_agree_with_solve_linear() {
        let mut rng = SplitMix64::new(23);
        let mut negatives = 0;
        while negatives < 50 {
            let m = 2 + (rng.below(3) as usize);
            let vc = 1 + (rng.below(3) as usize);
            let uc = 1 + (rng.below(3) as usize);
            let v = Matrix::<Rat>::from_fn(m, vc, |_, _| Rat::from_i64(rng.int_in(-3, 3)));
            let u = Matrix::<Rat>::from_fn(m, uc, |_, _| Rat::from_i64(rng.int_in(-3, 3)));
            if range_included(&u, &v).unwrap() {
                continue;
            }
            negatives += 1;
            assert_eq!(
                douglas_solve(&u, &v).unwrap_err(),
                DouglasError::RangeNotContained
            );
            assert!(v.solve_linear(&u).is_err());
        }
    }

    #[test]
    fn gf_path_has_equal_kernels() {
        let v = Matrix::<Gf<3>>::from_ints(3, 2, &[1, 2, 0, 1, 2, 2]);
        let w = Matrix::<Gf<3>>::from_ints(2, 3, &[1, 0, 2, 2, 1, 1]);
        let u = v.mul(&w);
        let w0 = douglas_solve(&u, &v).unwrap();
        assert_eq!(v.mul(&w0), u);
        assert_eq!(w0.nullity(), u.nullity());
        assert!(w0.mul(&u.nullspace_basis()).is_zero_matrix());
    }

    #[test]
    fn forced_inclusions_solve_exactly() {
        // U := V·W on random shapes forces range inclusion.
        let mut rng = SplitMix64::new(7);
        for _ in 0..50 {
            let m = 1 + (rng.below(4) as usize);
            let p = 1 + (rng.below(4) as usize);
            let q = 1 + (rng.below(4) as usize);
            let v = Matrix::<Rat>::from_fn(m, p, |_, _| Rat::from_i64(rng.int_in(-3, 3)));
            let w = Matrix::<Rat>::from_fn(p, q, |_, _| Rat::from_i64(rng.int_in(-3, 3)));
            let u = v.mul(&w);
            let w0 = douglas_solve(&u, &v).unwrap();
            assert_eq!(v.mul(&w0), u);
            assert_eq!(w0.nullity(), u.nullity());
            assert!(w0.mul(&u.nullspace_basis()).is_zero_matrix());
        }
    }

    #[test]
    fn gf2_minimal_kernel_exhaustive() {
        // Oracle: over all 256 pairs (V, W) of 2x2 GF(2) matrices with
        // U := V·W, the canonical solution has exactly the kernel of U.
        for v_bits in 0..16u32 {
            for w_bits in 0..16u32 {
                let unpack = |bits: u32| {
                    Matrix::<Gf<2>>::from_ints(
                        2,
                        2,
                        &[
                            (bits & 1) as i64,
                            ((bits >> 1) & 1) as i64,
                            ((bits >> 2) & 1) as i64,
                            ((bits >> 3) & 1) as i64,
                        ],
                    )
                };
                let v = unpack(v_bits);
                let u = v.mul(&unpack(w_bits));
                let w0 = douglas_solve(&u, &v).unwrap();
                assert_eq!(v.mul(&w0), u);
                assert_eq!(w0.nullity(), u.nullity(), "V={v_bits:#06b} W={w_bits:#06b}");
                assert!(w0.mul(&u.nullspace_basis()).is_zero_matrix());
            }
        }
    }

    #[test]
    fn float_solve_within_tolerance() {
        let v = Matrix::<f64>::from_rows(vec![vec![1.0, 2.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
        let w = Matrix::<f64>::from_rows(vec![vec![0.5, -1.0], vec![2.0, 3.0]]);
        let u = v.mul(&w);
        let w0 = douglas_solve(&u, &v).unwrap();
        assert!(v.mul(&w0).distance(&u) <= 1e-9);
        assert_eq!(w0.nullity(), u.nullity());
    }
}
