//! Deterministic parameter samplers. Every draw is a pure function of a
//! 64-bit seed: entries come from the small integers `{-3..3}` (rationals,
//! floats) or from the whole field (GF(p)), with resampling on degenerate or
//! colliding draws, bounded by a fixed attempt budget.

use crate::decomp::Decomposition;
use crate::field::{FieldTag, Scalar};
use crate::matrix::Matrix;
use crate::rng::SplitMix64;

use super::RecipeError;

pub(crate) fn sample_scalar<F: Scalar>(rng: &mut SplitMix64) -> F {
    match F::FIELD {
        FieldTag::Q | FieldTag::F64 => F::from_i64(rng.int_in(-3, 3)),
        FieldTag::Gf2 => F::from_i64(rng.below(2) as i64),
        FieldTag::Gf3 => F::from_i64(rng.below(3) as i64),
        FieldTag::Gf5 => F::from_i64(rng.below(5) as i64),
    }
}

pub(crate) fn sample_matrix<F: Scalar>(
    rows: usize,
    cols: usize,
    rng: &mut SplitMix64,
) -> Matrix<F> {
    Matrix::from_fn(rows, cols, |_, _| sample_scalar::<F>(rng))
}

/// `count` pairwise-distinct matrices `V` with `R(V) ⊆ N(T1)`, built as
/// kernel-basis times small random coefficient matrices.
pub fn sample_thm48_directions<F: Scalar>(
    t1: &Matrix<F>,
    l_dim: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Matrix<F>>, RecipeError> {
    let kernel = t1.nullspace_basis();
    if kernel.cols() == 0 {
        return Err(RecipeError::NotApplicable(
            "N(T1) is trivial; the only admissible V is zero".into(),
        ));
    }
    let mut rng = SplitMix64::new(seed);
    let mut out: Vec<Matrix<F>> = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count.max(1) {
            return Err(RecipeError::BadParameter(format!(
                "sampler exhausted after {attempts} draws; the V-space is too small for {count} distinct samples"
            )));
        }
        let coeff = sample_matrix::<F>(kernel.cols(), l_dim, &mut rng);
        let v = kernel.mul(&coeff);
        if out.contains(&v) {
            continue;
        }
        out.push(v);
    }
    Ok(out)
}

/// `count` pairwise-distinct idempotents `D` on `L` whose kernel is a random
/// line inside `N(T2 − T1T2)`: `D = I_L − P` for `P` the projection onto the
/// line along its greedy complement.
pub fn sample_thm411_kernels<F: Scalar>(
    defect: &Matrix<F>,
    l_dim: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Matrix<F>>, RecipeError> {
    let kernel = defect.nullspace_basis();
    if kernel.cols() == 0 {
        return Err(RecipeError::NotApplicable(
            "N(T2 - T1T2) is trivial; no admissible D exists".into(),
        ));
    }
    if l_dim < 2 {
        return Err(RecipeError::NotApplicable(
            "dim L must be at least 2".into(),
        ));
    }
    let mut rng = SplitMix64::new(seed);
    let mut out: Vec<Matrix<F>> = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count.max(1) {
            return Err(RecipeError::BadParameter(format!(
                "sampler exhausted after {attempts} draws; not enough kernel lines for {count} distinct D's"
            )));
        }
        let coeff = sample_matrix::<F>(kernel.cols(), 1, &mut rng);
        let w = kernel.mul(&coeff);
        if w.is_zero_matrix() {
            continue;
        }
        let Ok(line) = Decomposition::extend_to_complement(w) else {
            continue;
        };
        let d = Matrix::identity(l_dim).sub(&line.projector());
        if out.contains(&d) {
            continue;
        }
        out.push(d);
    }
    Ok(out)
}

/// One random invertible matrix (small entries), resampled until the draw is
/// non-singular.
pub fn sample_invertible<F: Scalar>(
    n: usize,
    rng: &mut SplitMix64,
) -> Result<Matrix<F>, RecipeError> {
    for _ in 0..200 {
        let m = sample_matrix::<F>(n, n, rng);
        if m.inverse().is_some() {
            return Ok(m);
        }
    }
    Err(RecipeError::SingularParameter(
        "could not draw an invertible matrix".into(),
    ))
}
