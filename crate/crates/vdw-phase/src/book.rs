//! Doctest mirrors of the book chapters.
//!
//! mdBook cannot execute snippets against an external crate, so every
//! chapter is also attached here as module documentation; `cargo test
//! --doc` then compiles and runs each fenced Rust block, keeping the guide
//! and the library in lockstep.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/pressure-landscape.md")]
pub mod pressure_landscape {}

#[doc = include_str!("../../../book/src/maxwell-construction.md")]
pub mod maxwell_construction {}

#[doc = include_str!("../../../book/src/sharp-interfaces.md")]
pub mod sharp_interfaces {}

#[doc = include_str!("../../../book/src/viscous-profiles.md")]
pub mod viscous_profiles {}

#[doc = include_str!("../../../book/src/energy.md")]
pub mod energy_chapter {}

#[doc = include_str!("../../../book/src/stability.md")]
pub mod stability_chapter {}

#[doc = include_str!("../../../book/src/singular-limit.md")]
pub mod singular_limit {}
