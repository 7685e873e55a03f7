//! Idempotent predicates and classification by range position relative to a
//! decomposition `X = K ⊕ L`, the semigroup of range-`K` idempotents and its
//! module action on range-inside-`K` idempotents, and annihilator analysis
//! with explicit idempotent witnesses.

use std::collections::BTreeSet;
use std::fmt;

use crate::decomp::{BlockRep, DecompError, Decomposition};
use crate::field::Scalar;
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdemError {
    NonSquare {
        rows: usize,
        cols: usize,
    },
    /// The argument is not in the class the operation requires.
    WrongClass {
        expected: &'static str,
        got: IdemTag,
    },
    Decomp(DecompError),
}

impl fmt::Display for IdemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdemError::NonSquare { rows, cols } => {
                write!(f, "expected a square matrix, got {rows}x{cols}")
            }
            IdemError::WrongClass { expected, got } => {
                write!(f, "expected an operand of class {expected}, got {got:?}")
            }
            IdemError::Decomp(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for IdemError {}

impl From<DecompError> for IdemError {
    fn from(e: DecompError) -> Self {
        IdemError::Decomp(e)
    }
}

/// `T² = T`, exactly over exact fields or within `tol·max(1,‖T‖)` over floats.
pub fn is_idempotent<F: Scalar>(t: &Matrix<F>, tol: f64) -> Result<bool, IdemError> {
    if !t.is_square() {
        return Err(IdemError::NonSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    Ok(t.mul(t).eq_within(t, tol))
}

/// Position of an idempotent's range relative to the decomposition.
///
/// The range tags are the equational classes of the block characterizations:
/// `RangeEqualsK` is `[I_K, B; 0, 0]`, `RangeInsideK` is `[T1, T2; 0, 0]` with
/// `T1² = T1`, `T1T2 = T2`, and `ContainsK` is `T1 = I_K` together with
/// `T2T3 = 0`, `T2T4 = 0`, `T4T3 = 0`, `T3T2 = T4 − T4²`. The `L` tags are the
/// mirrors under swapping `K ↔ L`, `T1 ↔ T4`, `T2 ↔ T3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdemTag {
    Zero,
    Identity,
    RangeEqualsK,
    RangeEqualsL,
    RangeInsideK,
    RangeInsideL,
    ContainsK,
    ContainsL,
    General,
    NotIdempotent,
}

impl IdemTag {
    pub fn as_str(self) -> &'static str {
        match self {
            IdemTag::Zero => "zero",
            IdemTag::Identity => "identity",
            IdemTag::RangeEqualsK => "range_equals_k",
            IdemTag::RangeEqualsL => "range_equals_l",
            IdemTag::RangeInsideK => "range_inside_k",
            IdemTag::RangeInsideL => "range_inside_l",
            IdemTag::ContainsK => "contains_k",
            IdemTag::ContainsL => "contains_l",
            IdemTag::General => "general",
            IdemTag::NotIdempotent => "not_idempotent",
        }
    }
}

/// Classification result: the finest tag plus every satisfied coarser tag
/// (the classes overlap; e.g. `RangeEqualsK ⊂ ContainsK ∩ RangeInsideK`),
/// with the witness blocks of the range-equality forms: the `B` of
/// `[I_K, B; 0, 0]` when the range equals `K`, the `C` of `[0, 0; C, I_L]`
/// when it equals `L`.
#[derive(Debug, Clone)]
pub struct IdempotentClass<F: Scalar> {
    pub primary: IdemTag,
    pub tags: BTreeSet<IdemTag>,
    pub range_k_witness: Option<Matrix<F>>,
    pub range_l_witness: Option<Matrix<F>>,
}

impl<F: Scalar> IdempotentClass<F> {
    pub fn is(&self, tag: IdemTag) -> bool {
        self.tags.contains(&tag)
    }

    pub fn is_idempotent(&self) -> bool {
        self.primary != IdemTag::NotIdempotent
    }
}

/// Classify an operator given in block form. Idempotency itself is decided by
/// the four block equations `T1² + T2T3 = T1`, `T1T2 + T2T4 = T2`,
/// `T3T1 + T4T3 = T3`, `T3T2 + T4² = T4`.
pub fn classify_idempotent<F: Scalar>(
    b: &BlockRep<F>,
    tol: f64,
) -> Result<IdempotentClass<F>, IdemError> {
    let (t1, t2, t3, t4) = (b.t1(), b.t2(), b.t3(), b.t4());
    let k = b.k_dim();
    let l = b.l_dim();
    let eq = |a: &Matrix<F>, b: &Matrix<F>| a.eq_within(b, tol);
    let zero = |m: &Matrix<F>| {
        if F::EXACT {
            m.is_zero_matrix()
        } else {
            m.residual_norm() <= tol
        }
    };

    let idem = eq(&t1.mul(t1).add(&t2.mul(t3)), t1)
        && eq(&t1.mul(t2).add(&t2.mul(t4)), t2)
        && eq(&t3.mul(t1).add(&t4.mul(t3)), t3)
        && eq(&t3.mul(t2).add(&t4.mul(t4)), t4);
    if !idem {
        return Ok(IdempotentClass {
            primary: IdemTag::NotIdempotent,
            tags: BTreeSet::from([IdemTag::NotIdempotent]),
            range_k_witness: None,
            range_l_witness: None,
        });
    }

    let ik = Matrix::<F>::identity(k);
    let il = Matrix::<F>::identity(l);
    let mut tags = BTreeSet::new();

    let top_zero = zero(t3) && zero(t4);
    let bottom_zero = zero(t1) && zero(t2);
    if top_zero && bottom_zero {
        tags.insert(IdemTag::Zero);
    }
    if eq(t1, &ik) && eq(t4, &il) && zero(t2) && zero(t3) {
        tags.insert(IdemTag::Identity);
    }
    if top_zero && eq(t1, &ik) {
        tags.insert(IdemTag::RangeEqualsK);
    }
    if top_zero && eq(&t1.mul(t1), t1) && eq(&t1.mul(t2), t2) {
        tags.insert(IdemTag::RangeInsideK);
    }
    if bottom_zero && eq(t4, &il) {
        tags.insert(IdemTag::RangeEqualsL);
    }
    if bottom_zero && eq(&t4.mul(t4), t4) && eq(&t4.mul(t3), t3) {
        tags.insert(IdemTag::RangeInsideL);
    }
    if eq(t1, &ik)
        && zero(&t2.mul(t3))
        && zero(&t2.mul(t4))
        && zero(&t4.mul(t3))
        && eq(&t3.mul(t2), &t4.sub(&t4.mul(t4)))
    {
        tags.insert(IdemTag::ContainsK);
    }
    if eq(t4, &il)
        && zero(&t3.mul(t2))
        && zero(&t3.mul(t1))
        && zero(&t1.mul(t2))
        && eq(&t2.mul(t3), &t1.sub(&t1.mul(t1)))
    {
        tags.insert(IdemTag::ContainsL);
    }
    if tags.is_empty() {
        tags.insert(IdemTag::General);
    }

    let primary = [
        IdemTag::Zero,
        IdemTag::Identity,
        IdemTag::RangeEqualsK,
        IdemTag::RangeEqualsL,
        IdemTag::RangeInsideK,
        IdemTag::RangeInsideL,
        IdemTag::ContainsK,
        IdemTag::ContainsL,
        IdemTag::General,
    ]
    .into_iter()
    .find(|t| tags.contains(t))
    .expect("a non-empty tag set");

    let range_k_witness = if tags.contains(&IdemTag::RangeEqualsK) {
        Some(t2.clone())
    } else {
        None
    };
    let range_l_witness = if tags.contains(&IdemTag::RangeEqualsL) {
        Some(t3.clone())
    } else {
        None
    };
    Ok(IdempotentClass {
        primary,
        tags,
        range_k_witness,
        range_l_witness,
    })
}

/// Product inside the semigroup of idempotents with range exactly `K`
/// (or, mirrored, exactly `L`): `Q_B·Q_{B'} = Q_{B'}` in both cases.
pub fn ek_product<F: Scalar>(
    q1: &BlockRep<F>,
    q2: &BlockRep<F>,
    tol: f64,
) -> Result<BlockRep<F>, IdemError> {
    let c1 = classify_idempotent(q1, tol)?;
    let c2 = classify_idempotent(q2, tol)?;
    let both_k = c1.is(IdemTag::RangeEqualsK) && c2.is(IdemTag::RangeEqualsK);
    let both_l = c1.is(IdemTag::RangeEqualsL) && c2.is(IdemTag::RangeEqualsL);
    if !(both_k || both_l) {
        return Err(IdemError::WrongClass {
            expected: "range_equals_k pair or range_equals_l pair",
            got: if c1.is(IdemTag::RangeEqualsK) || c1.is(IdemTag::RangeEqualsL) {
                c2.primary
            } else {
                c1.primary
            },
        });
    }
    let prod = q1.compose(q2)?;
    debug_assert!(classify_idempotent(&prod, tol).is_ok_and(|c| {
        both_k && c.is(IdemTag::RangeEqualsK) || both_l && c.is(IdemTag::RangeEqualsL)
    }));
    Ok(prod)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionSide {
    Left,
    Right,
}

/// The left/right module action of a range-`K` idempotent `E` on an
/// idempotent `Q` with range inside `K`: acting on the left fixes `Q`, acting
/// on the right replaces the `T2` part.
pub fn ek_module_action<F: Scalar>(
    q: &BlockRep<F>,
    e: &BlockRep<F>,
    side: ActionSide,
    tol: f64,
) -> Result<BlockRep<F>, IdemError> {
    let cq = classify_idempotent(q, tol)?;
    if !cq.is(IdemTag::RangeInsideK) {
        return Err(IdemError::WrongClass {
            expected: "range_inside_k",
            got: cq.primary,
        });
    }
    let ce = classify_idempotent(e, tol)?;
    if !ce.is(IdemTag::RangeEqualsK) {
        return Err(IdemError::WrongClass {
            expected: "range_equals_k",
            got: ce.primary,
        });
    }
    let acted = match side {
        ActionSide::Left => e.compose(q)?,
        ActionSide::Right => q.compose(e)?,
    };
    debug_assert!(classify_idempotent(&acted, tol).is_ok_and(|c| c.is(IdemTag::RangeInsideK)));
    Ok(acted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnihilatorVerdict {
    /// Non-zero idempotent annihilators exist on both sides: the necessary
    /// condition for being a finite product of idempotents.
    PassesNecessary,
    FailsLeft,
    FailsRight,
    FailsBoth,
    /// The zero operator; the identity annihilates it on both sides.
    TrivialOperator,
}

impl AnnihilatorVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            AnnihilatorVerdict::PassesNecessary => "passes_necessary",
            AnnihilatorVerdict::FailsLeft => "fails_left",
            AnnihilatorVerdict::FailsRight => "fails_right",
            AnnihilatorVerdict::FailsBoth => "fails_both",
            AnnihilatorVerdict::TrivialOperator => "trivial_operator",
        }
    }
}

/// Annihilator analysis of a square operator: a non-zero idempotent `A` with
/// `AT = 0` exists iff the range is proper, a non-zero idempotent `B` with
/// `TB = 0` exists iff the kernel is non-trivial.
#[derive(Debug, Clone)]
pub struct AnnihilatorReport<F: Scalar> {
    pub verdict: AnnihilatorVerdict,
    pub left_witness: Option<Matrix<F>>,
    pub right_witness: Option<Matrix<F>>,
}

/// Compute canonical annihilator witnesses: the left witness is `I − P` for
/// `P` the projection onto `R(T)` along the greedy complement; the right
/// witness is the projection onto `N(T)` along its greedy complement.
pub fn annihilator_report<F: Scalar>(t: &Matrix<F>) -> Result<AnnihilatorReport<F>, IdemError> {
    if !t.is_square() {
        return Err(IdemError::NonSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let n = t.rows();
    if t.is_zero_matrix() {
        return Ok(AnnihilatorReport {
            verdict: AnnihilatorVerdict::TrivialOperator,
            left_witness: Some(Matrix::identity(n)),
            right_witness: Some(Matrix::identity(n)),
        });
    }

    let range = t.colspace_basis();
    let left_witness = if range.cols() < n {
        let d = Decomposition::extend_to_complement(range)?;
        Some(d.complement_projector())
    } else {
        None
    };

    let kernel = t.nullspace_basis();
    let right_witness = if kernel.cols() > 0 && kernel.cols() < n {
        let d = Decomposition::extend_to_complement(kernel)?;
        Some(d.projector())
    } else if kernel.cols() == n {
        Some(Matrix::identity(n))
    } else {
        None
    };

    let verdict = match (&left_witness, &right_witness) {
        (Some(_), Some(_)) => AnnihilatorVerdict::PassesNecessary,
        (None, Some(_)) => AnnihilatorVerdict::FailsLeft,
        (Some(_), None) => AnnihilatorVerdict::FailsRight,
        (None, None) => AnnihilatorVerdict::FailsBoth,
    };
    Ok(AnnihilatorReport {
        verdict,
        left_witness,
        right_witness,
    })
}
