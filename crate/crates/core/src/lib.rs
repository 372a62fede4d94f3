//! Interval calculus built on the generalized Hukuhara (gH) difference.
//!
//! - [`interval`]: closed intervals with Minkowski, Hukuhara and gH
//!   subtraction.
//! - [`product`]: the gH-product of a real vector with a tuple of intervals,
//!   next to the Minkowski dot product it refines.
//! - [`expr`]: a small language for interval-valued functions given by
//!   (possibly piecewise) endpoint formulas.
//! - [`calculus`]: gH-partial derivatives and gradients from sampled one-sided
//!   difference quotients.
//! - [`cli`]: the `ghcalc` command-line front end.
//!
//! ```
//! use ghcalc::interval::Interval;
//!
//! let a = Interval::new(0.0, 4.0)?;
//! let b = Interval::new(0.0, 10.0)?;
//! assert_eq!(a.h_diff(&b), None);
//! assert_eq!(a.gh_diff(&b)?, Interval::new(-6.0, 0.0)?);
//! # Ok::<(), ghcalc::error::Error>(())
//! ```
//!
//! The guide in `book/` walks through each layer; its code listings run as
//! doctests of this crate.

pub mod calculus;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod interval;
pub mod product;

// One module per chapter so a failing listing points at its chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/intervals.md")]
    mod intervals {}
    #[doc = include_str!("../../../book/src/products.md")]
    mod products {}
    #[doc = include_str!("../../../book/src/specs.md")]
    mod specs {}
    #[doc = include_str!("../../../book/src/derivatives.md")]
    mod derivatives {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
