//! Spectral statistics of quantum graphs reduced to exact combinatorics.
//!
//! The crate computes the spectral form factor of small quantum graphs by
//! several independent routes (direct phase averaging, periodic-orbit family
//! sums, Monte Carlo, and exact trigonometric quadrature) and checks the
//! binomial-sum identities that equate them with exact rational arithmetic.
//!
//! * [`combinatorics`]: `N(s,t)`, Kravtchouk squares, and the binomial
//!   identities.
//! * [`series`]: truncated power series used for the generating functions.
//! * [`ring`]: the single-vertex ring graph, its form factors and orbit
//!   amplitudes.
//! * [`graph`]: general graphs, bond-scattering matrices, ensembles and
//!   periodic-orbit families.
//! * [`suite`]: the batch identity checks driven by the CLI.

pub mod combinatorics;
pub mod graph;
pub mod quadrature;
pub mod ring;
pub mod series;
pub mod suite;

use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Nearest `f64` to an exact rational.
pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/combinatorics.md")]
    mod combinatorics {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/ring.md")]
    mod ring {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
