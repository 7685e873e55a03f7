//! Construction, verification, and certification of factorizations of linear
//! operators into finite products of idempotents.
//!
//! The crate works at desk scale over exact rationals, binary64 floats, and
//! the prime fields GF(2), GF(3), GF(5). It provides:
//!
//! - dense matrix algebra with deterministic elimination ([`matrix`]);
//! - direct-sum decompositions, projectors, and block representations
//!   ([`decomp`]);
//! - idempotent classification, range-based semigroup structure, and
//!   annihilator analysis ([`idempotent`]);
//! - range-inclusion factorization with the minimal-kernel normalization
//!   ([`douglas`]);
//! - constructive two-idempotent factorization recipes, consistency-condition
//!   systems, and machine-checkable certificates ([`factorize`]);
//! - exact idempotent-index computation over small finite fields by
//!   exhaustive semigroup closure ([`atlas`]);
//! - symbolic predicates for weighted shift and diagonal operators on ℓ²
//!   ([`opcheck`]).

pub mod atlas;
pub mod decomp;
pub mod douglas;
pub mod factorize;
pub mod field;
pub mod idempotent;
pub mod json;
pub mod matrix;
pub mod opcheck;
pub mod rng;
