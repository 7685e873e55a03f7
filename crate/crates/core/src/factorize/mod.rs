//! Constructive factorizations of operators into products of idempotents,
//! with machine-checkable certificates.
//!
//! The recipes operate on a local block representation `T = [T1, T2; 0, 0]`
//! in `X = K ⊕ L` and produce a [`Certificate`]: the target, the ordered
//! idempotent factors, the recipe's free parameters, and the verification
//! residuals. Over exact fields every residual of an emitted certificate is
//! exactly zero; [`verify_certificate`] recomputes them from scratch.

mod consistency;
mod fixtures;
mod recipes;
mod samplers;

pub use consistency::{check_consistency, consistency_certificate, ConsistencyReport};
pub use fixtures::{reciprocal_pair, row_two_factors, scale_three_factors, scale_two_factors};
pub use recipes::{
    auto_factor, factor_embed, factor_lemma41, factor_range_swallow, factor_range_swallow_mirror,
    factor_thm411, factor_thm411_family, factor_thm413, factor_thm413_family, factor_thm48,
    factor_thm48_family, factor_thm48_idem, lift_factorization, peel_candidate, peel_rep, q_b,
    Lemma41Order, Thm411Variant,
};
pub use samplers::{sample_invertible, sample_thm411_kernels, sample_thm48_directions};

use std::collections::BTreeMap;
use std::fmt;

use crate::decomp::{DecompError, Decomposition};
use crate::douglas::DouglasError;
use crate::field::Scalar;
use crate::idempotent::AnnihilatorReport;
use crate::matrix::Matrix;

/// Default residual tolerance for float verification; exact fields demand
/// exact zeros regardless.
pub const DEFAULT_TOL: f64 = 1e-9;

pub(crate) fn params_from<F: Scalar>(pairs: &[(&str, &Matrix<F>)]) -> BTreeMap<String, Matrix<F>> {
    pairs
        .iter()
        .map(|(name, m)| (name.to_string(), (*m).clone()))
        .collect()
}

/// Which construction produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Recipe {
    /// The target is itself idempotent; single-factor certificate.
    Idempotent,
    Lemma41,
    RangeSwallow,
    RangeSwallowMirror,
    Embed,
    Thm48,
    Thm48Idem,
    Thm411,
    Thm411Prime,
    Thm413,
    /// Pair `(Q_B, T_{B,C,D})` certified through the consistency conditions.
    Peel,
    /// Block-diagonal lifting of a factorization of `T1`.
    Lift,
    Fixture,
}

impl Recipe {
    pub fn as_str(self) -> &'static str {
        match self {
            Recipe::Idempotent => "idempotent",
            Recipe::Lemma41 => "lemma41",
            Recipe::RangeSwallow => "range_swallow",
            Recipe::RangeSwallowMirror => "range_swallow_mirror",
            Recipe::Embed => "embed",
            Recipe::Thm48 => "thm48",
            Recipe::Thm48Idem => "thm48_idem",
            Recipe::Thm411 => "thm411",
            Recipe::Thm411Prime => "thm411_prime",
            Recipe::Thm413 => "thm413",
            Recipe::Peel => "peel",
            Recipe::Lift => "lift",
            Recipe::Fixture => "fixture",
        }
    }

    pub fn from_name(s: &str) -> Option<Recipe> {
        [
            Recipe::Idempotent,
            Recipe::Lemma41,
            Recipe::RangeSwallow,
            Recipe::RangeSwallowMirror,
            Recipe::Embed,
            Recipe::Thm48,
            Recipe::Thm48Idem,
            Recipe::Thm411,
            Recipe::Thm411Prime,
            Recipe::Thm413,
            Recipe::Peel,
            Recipe::Lift,
            Recipe::Fixture,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecipeError {
    /// The recipe's precondition fails for this input.
    NotApplicable(String),
    /// A supplied parameter violates the recipe's requirements.
    BadParameter(String),
    /// The embedding map is not a left-invertible injection.
    BadJ(String),
    /// A parameter that must be invertible is singular.
    SingularParameter(String),
    FactorNotIdempotent {
        index: usize,
    },
    ProductMismatch,
    DimensionMismatch(String),
    /// The constructed certificate failed its own verification (possible only
    /// through float round-off; exact fields cannot reach this).
    VerificationFailed(String),
    InvalidTarget(String),
    Douglas(DouglasError),
    Decomp(DecompError),
}

impl fmt::Display for RecipeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecipeError::NotApplicable(why) => write!(f, "recipe not applicable: {why}"),
            RecipeError::BadParameter(why) => write!(f, "bad parameter: {why}"),
            RecipeError::BadJ(why) => write!(f, "bad embedding map: {why}"),
            RecipeError::SingularParameter(why) => write!(f, "singular parameter: {why}"),
            RecipeError::FactorNotIdempotent { index } => {
                write!(f, "factor {index} is not idempotent")
            }
            RecipeError::ProductMismatch => write!(f, "factor product does not equal the target"),
            RecipeError::DimensionMismatch(why) => write!(f, "dimension mismatch: {why}"),
            RecipeError::VerificationFailed(why) => write!(f, "verification failed: {why}"),
            RecipeError::InvalidTarget(why) => write!(f, "invalid target: {why}"),
            RecipeError::Douglas(e) => write!(f, "{e}"),
            RecipeError::Decomp(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RecipeError {}

impl From<DouglasError> for RecipeError {
    fn from(e: DouglasError) -> Self {
        match e {
            DouglasError::RangeNotContained => {
                RecipeError::NotApplicable("range inclusion fails".into())
            }
            other => RecipeError::Douglas(other),
        }
    }
}

impl From<DecompError> for RecipeError {
    fn from(e: DecompError) -> Self {
        RecipeError::Decomp(e)
    }
}

/// Verification residuals of a certificate: one idempotency defect per factor
/// plus the product defect. Exactly zero over exact fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    pub factor_idempotency: Vec<f64>,
    pub product: f64,
}

/// A claimed factorization of `target` into the ordered idempotent `factors`.
#[derive(Debug, Clone)]
pub struct Certificate<F: Scalar> {
    pub target: Matrix<F>,
    pub decomposition: Option<Decomposition<F>>,
    pub factors: Vec<Matrix<F>>,
    pub recipe: Recipe,
    pub parameters: BTreeMap<String, Matrix<F>>,
    pub residuals: Residuals,
    /// Upper bound on the idempotent index implied by this certificate.
    pub index_upper_bound: usize,
}

impl<F: Scalar> Certificate<F> {
    /// Build a certificate and verify it; recipes funnel through here so an
    /// unverifiable certificate is never returned.
    pub fn new_checked(
        target: Matrix<F>,
        decomposition: Option<Decomposition<F>>,
        factors: Vec<Matrix<F>>,
        recipe: Recipe,
        parameters: BTreeMap<String, Matrix<F>>,
        tol: f64,
    ) -> Result<Self, RecipeError> {
        let index_upper_bound = factors.len();
        let mut cert = Certificate {
            target,
            decomposition,
            factors,
            recipe,
            parameters,
            residuals: Residuals {
                factor_idempotency: Vec::new(),
                product: 0.0,
            },
            index_upper_bound,
        };
        let report = cert.verify(tol);
        cert.residuals = Residuals {
            factor_idempotency: report.factor_idempotency.clone(),
            product: report.product,
        };
        if !report.pass {
            return Err(RecipeError::VerificationFailed(report.failures.join("; ")));
        }
        Ok(cert)
    }

    /// First factor of a two-factor certificate.
    pub fn e1(&self) -> &Matrix<F> {
        &self.factors[0]
    }

    /// Second factor of a two-factor certificate.
    pub fn e2(&self) -> &Matrix<F> {
        &self.factors[1]
    }

    /// Recompute every residual from scratch and check it against the field's
    /// convention: exact zero for exact fields, `tol`-relative for floats.
    pub fn verify(&self, tol: f64) -> VerificationReport {
        let mut failures = Vec::new();
        let mut factor_idempotency = Vec::with_capacity(self.factors.len());
        if self.factors.is_empty() {
            failures.push("certificate has no factors".to_string());
        }
        for (i, f) in self.factors.iter().enumerate() {
            if !f.is_square() || f.rows() != self.target.rows() {
                failures.push(format!("factor {i} has shape {}x{}", f.rows(), f.cols()));
                factor_idempotency.push(f64::INFINITY);
                continue;
            }
            let defect = f.mul(f).sub(f);
            let r = defect.residual_norm();
            factor_idempotency.push(r);
            let ok = if F::EXACT {
                r == 0.0
            } else {
                r <= tol * 1f64.max(f.residual_norm())
            };
            if !ok {
                failures.push(format!("factor {i} idempotency residual {r:e}"));
            }
        }
        let product = if self.factors.is_empty() || failures.iter().any(|f| f.contains("shape")) {
            f64::INFINITY
        } else {
            Matrix::product(&self.factors)
                .sub(&self.target)
                .residual_norm()
        };
        let product_ok = if F::EXACT {
            product == 0.0
        } else {
            product <= tol * 1f64.max(self.target.residual_norm())
        };
        if !product_ok {
            failures.push(format!("product residual {product:e}"));
        }
        VerificationReport {
            pass: failures.is_empty(),
            factor_idempotency,
            product,
            failures,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub pass: bool,
    pub factor_idempotency: Vec<f64>,
    pub product: f64,
    pub failures: Vec<String>,
}

/// Recompute all residuals of a certificate: every factor must be idempotent
/// and the ordered product must equal the target.
pub fn verify_certificate<F: Scalar>(cert: &Certificate<F>, tol: f64) -> VerificationReport {
    cert.verify(tol)
}

/// Why the dispatcher could not factor a target: the annihilator analysis
/// plus the per-recipe precondition failures.
#[derive(Debug, Clone)]
pub struct NoRecipeApplies<F: Scalar> {
    pub annihilators: Option<AnnihilatorReport<F>>,
    pub attempts: Vec<(Recipe, String)>,
}

#[derive(Debug, Clone)]
pub enum AutoFactorError<F: Scalar> {
    InvalidTarget(String),
    NoRecipeApplies(NoRecipeApplies<F>),
}

impl<F: Scalar> fmt::Display for AutoFactorError<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutoFactorError::InvalidTarget(why) => write!(f, "invalid target: {why}"),
            AutoFactorError::NoRecipeApplies(n) => {
                write!(f, "no recipe applies")?;
                for (r, why) in &n.attempts {
                    write!(f, "; {r}: {why}")?;
                }
                Ok(())
            }
        }
    }
}

impl<F: Scalar> std::error::Error for AutoFactorError<F> {}
