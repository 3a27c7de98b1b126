//! Bound-state counting with the Birman–Schwinger operator.
//!
//! The guide in `book/` walks through each module; its listings run as
//! doctests of this crate.

pub mod bsengine;
pub mod efimov;
pub mod error;
pub mod iterbs;
pub mod linop;
pub mod quad;
pub mod radial;
pub mod sample;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/iterated.md")]
    mod iterated {}
    #[doc = include_str!("../../../book/src/radial.md")]
    mod radial {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/efimov.md")]
    mod efimov {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
