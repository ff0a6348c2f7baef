//! Compiles the guide's code blocks as doctests, one module per chapter, so
//! `cargo test` keeps the book in sync with the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/exact-arithmetic.md")]
pub mod exact_arithmetic {}
#[doc = include_str!("../../../book/src/cohomology-models.md")]
pub mod cohomology_models {}
#[doc = include_str!("../../../book/src/blowups.md")]
pub mod blowups {}
#[doc = include_str!("../../../book/src/maps.md")]
pub mod maps {}
#[doc = include_str!("../../../book/src/monge-ampere.md")]
pub mod monge_ampere {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
