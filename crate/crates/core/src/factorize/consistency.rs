//! The consistency-condition systems under which the peeled candidate
//! `S = T_{B,C,D}` is idempotent and `(Q_B, S)` certifies `T` as a product of
//! two idempotents.
//!
//! With `U = T1−BC` and `V = T2−BD` the six base equations are
//!
//! ```text
//! (1) U² + VC = U            (1')  VC = U(I_K−U)
//! (2) UV + VD = V            (2')  UV = V(I_L−D)
//! (3) CU + DC = C            (3')  CU = (I_L−D)C
//! (4) CV + D² = D            (4')  CV = D(I_L−D)
//! (5) T1U + T2C = T1         (5')  T2C = T1(I_K−U)
//! (6) T1V + T2D = T2         (6')  T1V = T2(I_L−D)
//! ```
//!
//! `{(1)..(4)}` is equivalent to `S² = S` and `{(5),(6)}` to `TS = T`; each
//! primed equation is an algebraic rewrite of its plain form. The module
//! evaluates every equation, every named set, the three four-equation
//! replacement sets (in plain and primed form), and the standalone conditions
//! `C1: C(T1−T2C) = 0`, `C2: (I_K−T1)(T1−T2C) = 0`,
//! `C3: T1T2−T2 = (T1B−T2)D`, and `C5: T1C⁻¹ = T2D⁻¹` for invertible `C, D`.

use crate::decomp::{BlockRep, Decomposition};
use crate::field::Scalar;
use crate::matrix::Matrix;

use super::{params_from, Certificate, Recipe, RecipeError};

/// Per-equation residuals and per-system verdicts for one `(T1,T2,B,C,D)`
/// tuple. Booleans are exact over exact fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub k_dim: usize,
    pub l_dim: usize,
    /// Residuals of equations (1)–(6).
    pub eq_residuals: [f64; 6],
    /// Residuals of equations (1′)–(6′).
    pub eq_primed_residuals: [f64; 6],
    /// `S = T_{B,C,D}` is idempotent (checked by direct squaring).
    pub set_c1: bool,
    /// `set_c1` together with `T·S = T`.
    pub set_c2: bool,
    /// Equations (1)–(4).
    pub set_c3a: bool,
    /// Equations (1)–(6).
    pub set_c3b: bool,
    /// Equations (1′)–(4′).
    pub set_c4a: bool,
    /// Equations (1′)–(6′).
    pub set_c4b: bool,
    /// The six four-equation replacement sets: `{3,4,5,6}`, `{3,4,1,6}`,
    /// `{3,4,2,5}` and their primed counterparts, each equivalent to the full
    /// six-equation system.
    pub replacement_sets: [bool; 6],
    /// `C(T1−T2C) = 0`.
    pub cond_c1: bool,
    /// `(I_K−T1)(T1−T2C) = 0`.
    pub cond_c2: bool,
    /// General-B form `T1T2−T2 = (T1B−T2)D`.
    pub cond_c3: bool,
    /// The `B ∈ {T2, T2D}` specialization `(I_K−T1)T2(I_L−D) = 0`.
    pub cond_c3_specialized: bool,
    /// Invertible `C`, `D` with `T1C⁻¹ = T2D⁻¹`.
    pub cond_c5: bool,
}

fn check_dims<F: Scalar>(
    t1: &Matrix<F>,
    t2: &Matrix<F>,
    b: &Matrix<F>,
    c: &Matrix<F>,
    d: &Matrix<F>,
) -> Result<(usize, usize), RecipeError> {
    let k = t1.rows();
    let l = t2.cols();
    for (name, m, shape) in [
        ("T1", t1, (k, k)),
        ("T2", t2, (k, l)),
        ("B", b, (k, l)),
        ("C", c, (l, k)),
        ("D", d, (l, l)),
    ] {
        if (m.rows(), m.cols()) != shape {
            return Err(RecipeError::DimensionMismatch(format!(
                "{name} must be {}x{}, got {}x{}",
                shape.0,
                shape.1,
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok((k, l))
}

pub fn check_consistency<F: Scalar>(
    t1: &Matrix<F>,
    t2: &Matrix<F>,
    b: &Matrix<F>,
    c: &Matrix<F>,
    d: &Matrix<F>,
    tol: f64,
) -> Result<ConsistencyReport, RecipeError> {
    let (k, l) = check_dims(t1, t2, b, c, d)?;
    let ik = Matrix::<F>::identity(k);
    let il = Matrix::<F>::identity(l);
    let u = t1.sub(&b.mul(c));
    let v = t2.sub(&b.mul(d));

    let resid = |lhs: &Matrix<F>, rhs: &Matrix<F>| lhs.sub(rhs).residual_norm();
    let eq_residuals = [
        resid(&u.mul(&u).add(&v.mul(c)), &u),
        resid(&u.mul(&v).add(&v.mul(d)), &v),
        resid(&c.mul(&u).add(&d.mul(c)), c),
        resid(&c.mul(&v).add(&d.mul(d)), d),
        resid(&t1.mul(&u).add(&t2.mul(c)), t1),
        resid(&t1.mul(&v).add(&t2.mul(d)), t2),
    ];
    let eq_primed_residuals = [
        resid(&v.mul(c), &u.mul(&ik.sub(&u))),
        resid(&u.mul(&v), &v.mul(&il.sub(d))),
        resid(&c.mul(&u), &il.sub(d).mul(c)),
        resid(&c.mul(&v), &d.mul(&il.sub(d))),
        resid(&t2.mul(c), &t1.mul(&ik.sub(&u))),
        resid(&t1.mul(&v), &t2.mul(&il.sub(d))),
    ];

    let hold = |r: f64| if F::EXACT { r == 0.0 } else { r <= tol };
    let eq = |i: usize| hold(eq_residuals[i - 1]);
    let eqp = |i: usize| hold(eq_primed_residuals[i - 1]);

    // S and T in block coordinates; idempotency and reproduction directly.
    let s = Matrix::from_blocks(&u, &v, c, d);
    let t = Matrix::from_blocks(t1, t2, &Matrix::zeros(l, k), &Matrix::zeros(l, l));
    let set_c1 = hold(resid(&s.mul(&s), &s));
    let set_c2 = set_c1 && hold(resid(&t.mul(&s), &t));

    let set_c3a = eq(1) && eq(2) && eq(3) && eq(4);
    let set_c3b = set_c3a && eq(5) && eq(6);
    let set_c4a = eqp(1) && eqp(2) && eqp(3) && eqp(4);
    let set_c4b = set_c4a && eqp(5) && eqp(6);
    let replacement_sets = [
        eq(3) && eq(4) && eq(5) && eq(6),
        eq(3) && eq(4) && eq(1) && eq(6),
        eq(3) && eq(4) && eq(2) && eq(5),
        eqp(3) && eqp(4) && eqp(5) && eqp(6),
        eqp(3) && eqp(4) && eqp(1) && eqp(6),
        eqp(3) && eqp(4) && eqp(2) && eqp(5),
    ];

    let w = t1.sub(&t2.mul(c));
    let cond_c1 = hold(c.mul(&w).residual_norm());
    let cond_c2 = hold(ik.sub(t1).mul(&w).residual_norm());
    let cond_c3 = hold(resid(&t1.mul(t2).sub(t2), &t1.mul(b).sub(t2).mul(d)));
    let cond_c3_specialized = hold(ik.sub(t1).mul(t2).mul(&il.sub(d)).residual_norm());
    let cond_c5 = match (c.inverse(), d.inverse()) {
        (Some(c_inv), Some(d_inv)) => hold(resid(&t1.mul(&c_inv), &t2.mul(&d_inv))),
        _ => false,
    };

    Ok(ConsistencyReport {
        k_dim: k,
        l_dim: l,
        eq_residuals,
        eq_primed_residuals,
        set_c1,
        set_c2,
        set_c3a,
        set_c3b,
        set_c4a,
        set_c4b,
        replacement_sets,
        cond_c1,
        cond_c2,
        cond_c3,
        cond_c3_specialized,
        cond_c5,
    })
}

/// When `S = T_{B,C,D}` is idempotent, the pair `(Q_B, S)` is a verified
/// two-idempotent certificate for `T = [T1, T2; 0, 0]` (in standard
/// coordinates on `K ⊕ L`); `Q_B·S = T` holds identically.
pub fn consistency_certificate<F: Scalar>(
    t1: &Matrix<F>,
    t2: &Matrix<F>,
    b: &Matrix<F>,
    c: &Matrix<F>,
    d: &Matrix<F>,
    tol: f64,
) -> Result<Option<Certificate<F>>, RecipeError> {
    let report = check_consistency(t1, t2, b, c, d, tol)?;
    if !report.set_c1 {
        return Ok(None);
    }
    let (k, l) = (report.k_dim, report.l_dim);
    let decomp = Decomposition::standard(k + l, k)?;
    let u = t1.sub(&b.mul(c));
    let v = t2.sub(&b.mul(d));
    let target = BlockRep::from_blocks(
        decomp.clone(),
        t1.clone(),
        t2.clone(),
        Matrix::zeros(l, k),
        Matrix::zeros(l, l),
    )?
    .assemble();
    let q_b = BlockRep::from_blocks(
        decomp.clone(),
        Matrix::identity(k),
        b.clone(),
        Matrix::zeros(l, k),
        Matrix::zeros(l, l),
    )?
    .assemble();
    let s = BlockRep::from_blocks(decomp.clone(), u, v, c.clone(), d.clone())?.assemble();
    Certificate::new_checked(
        target,
        Some(decomp),
        vec![q_b, s],
        Recipe::Peel,
        params_from(&[("B", b), ("C", c), ("D", d)]),
        tol,
    )
    .map(Some)
}
