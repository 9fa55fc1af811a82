//! Exact-arithmetic engine for second-order Fuchsian equations of
//! hypergeometric and Heun type.
//!
//! Everything here is computed over exact scalar fields — the rationals
//! [`Rational`] or the quadratic extension [`OmegaRational`] by a primitive
//! cube root of unity — so every verification is a proof-grade identity check
//! on truncated power series, never a floating-point approximation.
//!
//! The crate is organised in layers:
//!
//! * scalar fields and polynomial/series plumbing: [`scalar`], [`poly`],
//!   [`ratfun`], [`series`], [`multipoly`], [`factor`]
//! * the two equations and their local solutions: [`hpg`], [`heun`],
//!   [`scheme`]
//! * fractional-linear solution groups (24 hypergeometric, 192 Heun):
//!   [`moebius`], [`orbit`]
//! * rational pull-back transformations between the equations: [`pullback`]
//! * existence/nonexistence of coverings with prescribed branching and the
//!   classification of 2- and 3-parameter transformations: [`covering`]
//! * the identity catalog, record composition and batch verification:
//!   [`expr`], [`catalog`], [`verify`], [`exec`], [`sample`]

pub mod scalar;
pub mod poly;
pub mod ratfun;
pub mod series;
pub mod multipoly;
pub mod factor;
pub mod scheme;
pub mod hpg;
pub mod heun;
pub mod moebius;
pub mod orbit;
pub mod pullback;
pub mod covering;
pub mod expr;
pub mod catalog;
pub mod sample;
pub mod exec;
pub mod verify;

pub use scalar::{OmegaRational, Rational, Scalar};
