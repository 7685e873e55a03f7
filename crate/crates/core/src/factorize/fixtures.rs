//! Hand-checked factorization fixtures over 2x2 matrices, parameterized over
//! the field. These reproduce the classical closed-form products exactly and
//! anchor the acceptance suite.

use std::collections::BTreeMap;

use crate::decomp::Decomposition;
use crate::field::Scalar;
use crate::matrix::Matrix;

use super::{Certificate, Recipe, RecipeError};

fn two_by_two<F: Scalar>(a: F, b: F, c: F, d: F) -> Matrix<F> {
    Matrix::new(2, 2, vec![a, b, c, d])
}

fn fixture<F: Scalar>(
    target: Matrix<F>,
    factors: Vec<Matrix<F>>,
    tol: f64,
) -> Result<Certificate<F>, RecipeError> {
    Certificate::new_checked(
        target,
        Some(Decomposition::standard(2, 1)?),
        factors,
        Recipe::Fixture,
        BTreeMap::new(),
        tol,
    )
}

/// `[a, 0; 0, 0] = [1, a−1; 0, 0]·[1, 0; 1, 0]` for any non-zero scalar `a`.
pub fn scale_two_factors<F: Scalar>(a: &F, tol: f64) -> Result<Certificate<F>, RecipeError> {
    let one = F::one();
    let zero = F::zero();
    let target = two_by_two(a.clone(), zero.clone(), zero.clone(), zero.clone());
    let e1 = two_by_two(one.clone(), a.sub(&one), zero.clone(), zero.clone());
    let e2 = two_by_two(one.clone(), zero.clone(), one.clone(), zero.clone());
    fixture(target, vec![e1, e2], tol)
}

/// `[bc, 0; 0, 0] = [1, b; 0, 0]·[0, 0; 0, 1]·[1, 0; c, 0]` for non-zero
/// scalars `b`, `c`.
pub fn scale_three_factors<F: Scalar>(
    b: &F,
    c: &F,
    tol: f64,
) -> Result<Certificate<F>, RecipeError> {
    let one = F::one();
    let zero = F::zero();
    let target = two_by_two(b.mul(c), zero.clone(), zero.clone(), zero.clone());
    let e1 = two_by_two(one.clone(), b.clone(), zero.clone(), zero.clone());
    let e2 = two_by_two(zero.clone(), zero.clone(), zero.clone(), one.clone());
    let e3 = two_by_two(one.clone(), zero.clone(), c.clone(), zero.clone());
    fixture(target, vec![e1, e2, e3], tol)
}

/// `[a, ab; 0, 0] = [1, a−1+b; 0, 0]·[1−b, b(1−b); 1, b]` for non-zero `a`.
pub fn row_two_factors<F: Scalar>(a: &F, b: &F, tol: f64) -> Result<Certificate<F>, RecipeError> {
    let one = F::one();
    let zero = F::zero();
    let target = two_by_two(a.clone(), a.mul(b), zero.clone(), zero.clone());
    let e1 = two_by_two(one.clone(), a.sub(&one).add(b), zero.clone(), zero.clone());
    let one_minus_b = one.sub(b);
    let e2 = two_by_two(
        one_minus_b.clone(),
        b.mul(&one_minus_b),
        one.clone(),
        b.clone(),
    );
    fixture(target, vec![e1, e2], tol)
}

/// The pair `Q1 = [1, a; 0, 0]`, `Q2 = [0, 0; b, 1]` with reciprocal
/// off-diagonal entries. When `ab = 1` the ranges are mutually
/// non-containing yet `Q1·Q2` is idempotent, so mutual non-containment of
/// consecutive ranges is necessary but not sufficient for a product of two
/// idempotents to have index two.
pub fn reciprocal_pair<F: Scalar>(a: &F, b: &F) -> (Matrix<F>, Matrix<F>) {
    let one = F::one();
    let zero = F::zero();
    (
        two_by_two(one.clone(), a.clone(), zero.clone(), zero.clone()),
        two_by_two(zero.clone(), zero.clone(), b.clone(), one.clone()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, rat_from_int, Gf, Rat};
    use crate::idempotent::is_idempotent;

    const TOL: f64 = 1e-9;

    #[test]
    fn scale_fixture_reproduces_exactly() {
        let cert = scale_two_factors(&rat_from_int(5), TOL).unwrap();
        assert_eq!(cert.factors.len(), 2);
        assert_eq!(cert.residuals.product, 0.0);
        assert_eq!(cert.target, Matrix::<Rat>::from_ints(2, 2, &[5, 0, 0, 0]));
    }

    #[test]
    fn three_factor_fixture_reproduces_exactly() {
        let cert = scale_three_factors(&rat_from_int(3), &rat_from_int(7), TOL).unwrap();
        assert_eq!(cert.factors.len(), 3);
        assert_eq!(cert.target, Matrix::<Rat>::from_ints(2, 2, &[21, 0, 0, 0]));
    }

    #[test]
    fn row_fixture_matches_hand_product() {
        let cert = row_two_factors(&rat_from_int(2), &rat_from_int(3), TOL).unwrap();
        assert_eq!(cert.target, Matrix::<Rat>::from_ints(2, 2, &[2, 6, 0, 0]));
        assert_eq!(cert.e1(), &Matrix::<Rat>::from_ints(2, 2, &[1, 4, 0, 0]));
        assert_eq!(cert.e2(), &Matrix::<Rat>::from_ints(2, 2, &[-2, -6, 1, 3]));
    }

    #[test]
    fn fixtures_work_over_gf5() {
        let a = Gf::<5>::new(3);
        let b = Gf::<5>::new(2);
        assert!(scale_two_factors(&a, TOL).is_ok());
        assert!(scale_three_factors(&b, &a, TOL).is_ok());
        assert!(row_two_factors(&a, &b, TOL).is_ok());
    }

    #[test]
    fn reciprocal_pair_product_is_idempotent() {
        let (q1, q2) = reciprocal_pair(&rat_from_int(2), &rat(1, 2));
        assert!(is_idempotent(&q1.mul(&q2), TOL).unwrap());
        let (g1, g2) = reciprocal_pair(&Gf::<2>::new(1), &Gf::<2>::new(1));
        assert!(is_idempotent(&g1.mul(&g2), TOL).unwrap());
        // Mutual non-containment of the ranges still holds.
        use crate::douglas::range_included;
        let r1 = q1.colspace_basis();
        let r2 = q2.colspace_basis();
        assert!(!range_included(&r1, &r2).unwrap());
        assert!(!range_included(&r2, &r1).unwrap());
    }

    #[test]
    fn reciprocal_pair_product_not_idempotent_otherwise() {
        let (q1, q2) = reciprocal_pair(&rat_from_int(2), &rat_from_int(3));
        assert!(!is_idempotent(&q1.mul(&q2), TOL).unwrap());
    }
}
