//! Scalar arithmetic over the three supported fields: exact rationals,
//! binary64 floats, and the small prime fields GF(2), GF(3), GF(5).
//!
//! Every matrix in this crate is homogeneous in one field; the field is part
//! of the matrix type, so mixing fields is a type error at construction.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar: arbitrary-precision numerator/denominator, kept in
/// reduced canonical form (positive denominator) by `num-rational`.
pub type Rat = num_rational::BigRational;

/// Runtime tag naming a scalar field, as used in the JSON wire format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldTag {
    Q,
    F64,
    Gf2,
    Gf3,
    Gf5,
}

impl FieldTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldTag::Q => "Q",
            FieldTag::F64 => "F64",
            FieldTag::Gf2 => "GF2",
            FieldTag::Gf3 => "GF3",
            FieldTag::Gf5 => "GF5",
        }
    }

    pub fn from_name(s: &str) -> Option<FieldTag> {
        match s {
            "Q" => Some(FieldTag::Q),
            "F64" => Some(FieldTag::F64),
            "GF2" => Some(FieldTag::Gf2),
            "GF3" => Some(FieldTag::Gf3),
            "GF5" => Some(FieldTag::Gf5),
            _ => None,
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A scalar drawn from one of the supported fields.
///
/// Exact fields (`EXACT = true`) admit exact zero tests and exact equality;
/// the float field relies on the tolerances threaded through the callers.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    const FIELD: FieldTag;
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    /// Canonical embedding of a small integer (reduced mod p for GF(p)).
    fn from_i64(v: i64) -> Self;
    /// Magnitude used for pivot selection and residual norms. Exact fields
    /// report 1.0 for any non-zero value.
    fn magnitude(&self) -> f64;
    fn entry_to_json(&self) -> serde_json::Value;
    fn entry_from_json(v: &serde_json::Value) -> Result<Self, String>;
}

impl Scalar for Rat {
    const FIELD: FieldTag = FieldTag::Q;
    const EXACT: bool = true;

    fn zero() -> Self {
        num_traits::Zero::zero()
    }

    fn one() -> Self {
        num_traits::One::one()
    }

    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn inv(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_i64(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }

    fn magnitude(&self) -> f64 {
        // Exact conversion is not needed for pivoting; an approximation of
        // the true magnitude is enough and never affects exactness.
        self.to_f64().map(f64::abs).unwrap_or(f64::MAX)
    }

    fn entry_to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }

    fn entry_from_json(v: &serde_json::Value) -> Result<Self, String> {
        match v {
            serde_json::Value::String(s) => s
                .trim()
                .parse::<Rat>()
                .map_err(|e| format!("bad rational entry {s:?}: {e}")),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(<Rat as Scalar>::from_i64)
                .ok_or_else(|| format!("rational entries must be strings or integers, got {n}")),
            other => Err(format!("rational entries must be strings, got {other}")),
        }
    }
}

impl Scalar for f64 {
    const FIELD: FieldTag = FieldTag::F64;
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn entry_to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn entry_from_json(v: &serde_json::Value) -> Result<Self, String> {
        v.as_f64()
            .ok_or_else(|| format!("float entries must be numbers, got {v}"))
    }
}

/// Residue in GF(P), stored reduced to `[0, P)`. Only P in {2, 3, 5} is
/// supported; other instantiations fail at compile time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf<const P: u64>(u64);

pub type Gf2 = Gf<2>;
pub type Gf3 = Gf<3>;
pub type Gf5 = Gf<5>;

impl<const P: u64> Gf<P> {
    const TAG: FieldTag = match P {
        2 => FieldTag::Gf2,
        3 => FieldTag::Gf3,
        5 => FieldTag::Gf5,
        _ => panic!("only GF(2), GF(3), GF(5) are supported"),
    };

    pub fn new(residue: u64) -> Self {
        Gf(residue % P)
    }

    pub fn residue(self) -> u64 {
        self.0
    }

    pub fn modulus() -> u64 {
        P
    }
}

impl<const P: u64> fmt::Display for Gf<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Scalar for Gf<P> {
    const FIELD: FieldTag = Self::TAG;
    const EXACT: bool = true;

    fn zero() -> Self {
        Gf(0)
    }

    fn one() -> Self {
        Gf(1 % P)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0
    }

    fn add(&self, rhs: &Self) -> Self {
        Gf((self.0 + rhs.0) % P)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Gf((self.0 + P - rhs.0) % P)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Gf((self.0 * rhs.0) % P)
    }

    fn neg(&self) -> Self {
        Gf((P - self.0) % P)
    }

    fn inv(&self) -> Option<Self> {
        // P is tiny; a direct search beats bookkeeping.
        (1..P).map(Gf::<P>).find(|x| Scalar::mul(x, self).0 == 1)
    }

    fn from_i64(v: i64) -> Self {
        Gf(v.rem_euclid(P as i64) as u64)
    }

    fn magnitude(&self) -> f64 {
        if self.0 == 0 {
            0.0
        } else {
            1.0
        }
    }

    fn entry_to_json(&self) -> serde_json::Value {
        serde_json::Value::Number(self.0.into())
    }

    fn entry_from_json(v: &serde_json::Value) -> Result<Self, String> {
        let n = v
            .as_u64()
            .ok_or_else(|| format!("GF({P}) entries must be integers in [0,{P}), got {v}"))?;
        if n >= P {
            return Err(format!("GF({P}) entry {n} out of range"));
        }
        Ok(Gf(n))
    }
}

/// Parse a rational from its canonical string form `"p/q"` or `"n"`.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| format!("bad rational {s:?}: {e}"))
}

pub fn rat_from_int(n: i64) -> Rat {
    <Rat as Scalar>::from_i64(n)
}

pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Numerator/denominator check helper used by invariants tests.
pub fn rat_is_canonical(r: &Rat) -> bool {
    use num_integer::Integer;
    r.denom().is_positive() && (r.numer().is_zero() || r.numer().gcd(r.denom()).is_one())
}
