//! The guide's code samples, compiled and run as doc-tests.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../book/src/polynomials.md")]
pub mod polynomials {}

#[doc = include_str!("../../book/src/cohomology.md")]
pub mod cohomology {}

#[doc = include_str!("../../book/src/basecases.md")]
pub mod basecases {}

#[doc = include_str!("../../book/src/recursion.md")]
pub mod recursion {}

#[doc = include_str!("../../book/src/derivation.md")]
pub mod derivation {}

#[doc = include_str!("../../book/src/cli.md")]
pub mod cli {}
