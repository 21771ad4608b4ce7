//! The guide in `book/` is plain mdbook markdown. Each chapter is included
//! here as a module doc so `cargo test` runs its listings against the
//! current crate.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/effective.md")]
pub mod chapter1 {}
#[doc = include_str!("../../../book/src/model.md")]
pub mod chapter2 {}
#[doc = include_str!("../../../book/src/tilings.md")]
pub mod chapter3 {}
#[doc = include_str!("../../../book/src/contours.md")]
pub mod chapter4 {}
#[doc = include_str!("../../../book/src/sampling.md")]
pub mod chapter5 {}
#[doc = include_str!("../../../book/src/bounds.md")]
pub mod chapter6 {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod chapter7 {}
