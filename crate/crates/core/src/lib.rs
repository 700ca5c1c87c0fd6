//! Verification toolkit for explicit domains in `C^n`.
//!
//! The library stores defining functions as expression trees over the complex
//! coordinates, differentiates them symbolically with Wirtinger operators, and
//! builds numerical certificates on top of that: boundary location, Levi-form
//! rank and signature analysis, invariance identities for holomorphic map
//! families, torus-action checks, and dimension enumeration for normalized
//! Reinhardt models. The [`harness`] module bundles all of this into seeded,
//! deterministic verification scenarios with machine-readable reports; the
//! `domkit` binary exposes them on the command line.

pub mod catalog;
pub mod expr;
pub mod harness;
pub mod levi;
pub mod maps;
pub mod reinhardt;
pub mod stream;

pub use num_complex::Complex64;
