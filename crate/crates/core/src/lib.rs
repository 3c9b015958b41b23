//! Exact computation of Igusa's local zeta function `Z_f(s)` for polynomials
//! and certified power series over the p-adic integers.
//!
//! Results are rational functions in `t = p^{-s}` with exact rational
//! coefficients. Two engines produce them: a Newton-polyhedron engine for
//! non-degenerate `f` in several variables, and a ball-decomposition engine
//! for one variable. A brute-force congruence counter checks both.

pub mod error;
pub mod exec;
pub mod input;
pub mod linalg;
pub mod newton;
pub mod nondegen;
pub mod onevar;
pub mod oracle;
pub mod padic;
pub mod rational_fn;
pub mod series;
pub mod truncation;
pub mod zeta;

pub use error::{Result, ZetaError};
pub use exec::Exec;
pub use input::{parse_expression, parse_input, Input};
pub use padic::PrimeContext;
pub use rational_fn::ZetaRational;
pub use series::{PolySeries, SeriesSpec};
