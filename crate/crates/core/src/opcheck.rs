//! Exact symbolic predicates for structured operators on ℓ²(ℕ): weighted
//! right/left shifts and diagonal operators described by a finite weight
//! rule. Kernel triviality, range classification, annihilator existence, the
//! necessary condition for being a finite product of idempotents, and
//! regularity are decided in closed form from the rule — no truncation.
//!
//! Weight indices are 1-based. A right shift maps `e_j ↦ w_j e_{j+1}`, a left
//! shift maps `e_j ↦ w_j e_{j−1}` (with `e_1 ↦ 0`), a diagonal operator maps
//! `e_j ↦ w_j e_j`.

use std::collections::BTreeMap;
use std::fmt;

use crate::field::{Rat, Scalar};
use crate::matrix::Matrix;

/// Tail of a weight rule beyond the exceptional indices: `coeff / j^power`.
/// `Constant(c)` is power zero, the harmonic tail `1/j` is `(1, 1)`. Products
/// of rules stay in this family, so the diagonal operators are closed under
/// composition.
#[derive(Debug, Clone, PartialEq)]
pub struct Tail {
    coeff: Rat,
    power: u32,
}

impl Tail {
    pub fn constant(c: Rat) -> Tail {
        Tail { coeff: c, power: 0 }
    }

    pub fn harmonic() -> Tail {
        Tail {
            coeff: <Rat as Scalar>::one(),
            power: 1,
        }
    }

    pub fn coeff(&self) -> &Rat {
        &self.coeff
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn value_at(&self, j: u64) -> Rat {
        let mut denom = <Rat as Scalar>::one();
        let j_rat = <Rat as Scalar>::from_i64(j as i64);
        for _ in 0..self.power {
            denom = denom.mul(&j_rat);
        }
        self.coeff.mul(&denom.inv().expect("j >= 1"))
    }

    fn mul(&self, rhs: &Tail) -> Tail {
        Tail {
            coeff: Scalar::mul(&self.coeff, &rhs.coeff),
            power: self.power + rhs.power,
        }
    }

    /// The tail takes the value zero somewhere (identically, in fact).
    fn is_zero(&self) -> bool {
        Scalar::is_zero(&self.coeff)
    }

    /// Non-zero tail values are bounded away from zero.
    fn bounded_below(&self) -> bool {
        self.is_zero() || self.power == 0
    }
}

/// Finite description of a bounded weight sequence: finitely many exceptional
/// values over a tail rule.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightRule {
    exceptional: BTreeMap<u64, Rat>,
    tail: Tail,
}

impl WeightRule {
    pub fn new(exceptional: BTreeMap<u64, Rat>, tail: Tail) -> WeightRule {
        WeightRule { exceptional, tail }
    }

    pub fn constant(c: Rat) -> WeightRule {
        WeightRule {
            exceptional: BTreeMap::new(),
            tail: Tail::constant(c),
        }
    }

    pub fn ones() -> WeightRule {
        WeightRule::constant(<Rat as Scalar>::one())
    }

    pub fn harmonic() -> WeightRule {
        WeightRule {
            exceptional: BTreeMap::new(),
            tail: Tail::harmonic(),
        }
    }

    pub fn exceptional(&self) -> &BTreeMap<u64, Rat> {
        &self.exceptional
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn weight(&self, j: u64) -> Rat {
        debug_assert!(j >= 1, "weights are 1-indexed");
        self.exceptional
            .get(&j)
            .cloned()
            .unwrap_or_else(|| self.tail.value_at(j))
    }

    /// Some weight is zero. A finite exceptional map never covers the whole
    /// tail, so a zero tail always contributes zero weights.
    pub fn has_zero_weight(&self) -> bool {
        self.exceptional.values().any(Scalar::is_zero) || self.tail.is_zero()
    }

    /// The non-zero weights are bounded away from zero.
    pub fn nonzero_bounded_below(&self) -> bool {
        // Finitely many exceptions never affect boundedness.
        self.tail.bounded_below()
    }

    /// Pointwise product of two rules.
    pub fn pointwise_mul(&self, rhs: &WeightRule) -> WeightRule {
        let mut exceptional = BTreeMap::new();
        for &j in self.exceptional.keys().chain(rhs.exceptional.keys()) {
            exceptional.insert(j, Scalar::mul(&self.weight(j), &rhs.weight(j)));
        }
        WeightRule {
            exceptional,
            tail: self.tail.mul(&rhs.tail),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    RightShift,
    LeftShift,
    Diagonal,
}

impl OpKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OpKind::RightShift => "right-shift",
            OpKind::LeftShift => "left-shift",
            OpKind::Diagonal => "diagonal",
        }
    }

    pub fn from_name(s: &str) -> Option<OpKind> {
        match s {
            "right-shift" => Some(OpKind::RightShift),
            "left-shift" => Some(OpKind::LeftShift),
            "diagonal" => Some(OpKind::Diagonal),
            _ => None,
        }
    }
}

/// A weighted shift or diagonal operator on ℓ².
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredOperator {
    pub kind: OpKind,
    pub weights: WeightRule,
}

/// Topological type of the range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeClassification {
    pub dense: bool,
    pub closed: bool,
    pub equals_x: bool,
}

/// The qualitative verdicts for one structured operator.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    /// A non-zero idempotent `A` with `AT = 0` exists (range closure proper).
    pub left_annihilator: bool,
    /// A non-zero idempotent `B` with `TB = 0` exists (kernel non-trivial).
    pub right_annihilator: bool,
    /// Both annihilators exist: necessary (not sufficient) for membership in
    /// the set of finite products of idempotents.
    pub in_f_possible: bool,
    /// `TGT = T` for some bounded `G`; decided for diagonal operators,
    /// unknown for shifts.
    pub regular: Option<bool>,
    pub left_witness: Option<String>,
    pub right_witness: Option<String>,
}

impl StructuredOperator {
    pub fn right_shift() -> StructuredOperator {
        StructuredOperator {
            kind: OpKind::RightShift,
            weights: WeightRule::ones(),
        }
    }

    pub fn left_shift() -> StructuredOperator {
        StructuredOperator {
            kind: OpKind::LeftShift,
            weights: WeightRule::ones(),
        }
    }

    pub fn diagonal_harmonic() -> StructuredOperator {
        StructuredOperator {
            kind: OpKind::Diagonal,
            weights: WeightRule::harmonic(),
        }
    }

    /// `N(T) = {0}`. A left shift always kills `e_1`.
    pub fn kernel_trivial(&self) -> bool {
        match self.kind {
            OpKind::RightShift | OpKind::Diagonal => !self.weights.has_zero_weight(),
            OpKind::LeftShift => false,
        }
    }

    pub fn range_classification(&self) -> RangeClassification {
        let all_nonzero = !self.weights.has_zero_weight();
        let closed = self.weights.nonzero_bounded_below();
        match self.kind {
            OpKind::RightShift => {
                // The range misses the first coordinate, so it is never dense.
                RangeClassification {
                    dense: false,
                    closed,
                    equals_x: false,
                }
            }
            OpKind::LeftShift => RangeClassification {
                dense: all_nonzero,
                closed,
                equals_x: all_nonzero && closed,
            },
            OpKind::Diagonal => RangeClassification {
                dense: all_nonzero,
                closed,
                equals_x: all_nonzero && closed,
            },
        }
    }

    pub fn membership_report(&self) -> MembershipReport {
        let range = self.range_classification();
        let left = !range.dense;
        let right = !self.kernel_trivial();
        let regular = match self.kind {
            // A diagonal operator is regular iff its range is closed: the
            // candidate G inverts the non-zero weights, and boundedness of G
            // is exactly boundedness below of those weights.
            OpKind::Diagonal => Some(range.closed),
            OpKind::RightShift | OpKind::LeftShift => None,
        };
        let left_witness = left.then(|| match self.kind {
            OpKind::RightShift => "orthogonal projection P_1 onto the first coordinate".to_string(),
            _ => "orthogonal projection onto coordinates outside the range closure".to_string(),
        });
        let right_witness = right.then(|| match self.kind {
            OpKind::LeftShift => "orthogonal projection P_1 onto the first coordinate".to_string(),
            _ => "orthogonal projection onto the kernel coordinates".to_string(),
        });
        MembershipReport {
            left_annihilator: left,
            right_annihilator: right,
            in_f_possible: left && right,
            regular,
            left_witness,
            right_witness,
        }
    }

    /// Pointwise product of two diagonal operators; `None` for shifts.
    pub fn compose_diagonal(&self, rhs: &StructuredOperator) -> Option<StructuredOperator> {
        if self.kind != OpKind::Diagonal || rhs.kind != OpKind::Diagonal {
            return None;
        }
        Some(StructuredOperator {
            kind: OpKind::Diagonal,
            weights: self.weights.pointwise_mul(&rhs.weights),
        })
    }

    /// The `n×n` compression to the span of the first `n` coordinates.
    /// Right-shift truncations are nilpotent, which is exactly why desk-scale
    /// truncation cannot replace the symbolic predicates.
    pub fn truncate(&self, n: usize) -> Matrix<Rat> {
        let mut m = Matrix::zeros(n, n);
        match self.kind {
            OpKind::RightShift => {
                for j in 1..n {
                    m[(j, j - 1)] = self.weights.weight(j as u64);
                }
            }
            OpKind::LeftShift => {
                for j in 1..n {
                    m[(j - 1, j)] = self.weights.weight((j + 1) as u64);
                }
            }
            OpKind::Diagonal => {
                for j in 0..n {
                    m[(j, j)] = self.weights.weight((j + 1) as u64);
                }
            }
        }
        m
    }
}

impl fmt::Display for StructuredOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} with tail {:?}",
            self.kind.as_str(),
            self.weights.tail
        )
    }
}
