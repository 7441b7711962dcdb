//! Convex imprecise previsions on finite possibility spaces.
//!
//! All arithmetic is exact ([`Rational`]). The modules build on one another:
//! [`lp`] is the exact simplex engine, [`extension`] computes the natural and
//! convex natural extensions, [`consistency`] classifies assessments,
//! [`correction`] repairs them, [`envelope`] handles envelope
//! representations, [`models`] covers possibility measures and [`risk`]
//! convex risk measures. [`random`] generates test instances.

pub mod assessment;
pub mod consistency;
pub mod correction;
pub mod envelope;
pub mod error;
pub mod extension;
pub mod lp;
pub mod models;
pub mod number;
pub mod random;
pub mod risk;
pub mod space;

pub use assessment::{Assessment, Entry, Orientation, PrecisePrevision};
pub use error::{Error, Result};
pub use number::{format_decimal, parse_rational, rat, Rational};
pub use space::{Gamble, Space};
