//! Exact computation in free solvable groups `S_{r,d} = F_r / F_r^{(d)}`.
//!
//! * [`words`]: words over generators `z_i` and unknowns `x_i`, with nested commutators.
//! * [`lattice`]: Smith normal form and abelianization tests over `Z`.
//! * [`groupring`]: group rings `Z[A]`, Laurent polynomials, the augmentation valuation.
//! * [`magnus`]: normal forms via the iterated Magnus embedding and Fox calculus.
//! * [`nilq5`]: the class-5 quotient of the free metabelian group.
//! * [`closure`]: retractions, decision rules and bounded equation search.
//! * [`cli`]: the `solvkit` command line.

pub mod cli;
pub mod closure;
pub mod groupring;
pub mod lattice;
pub mod magnus;
pub mod nilq5;
pub mod words;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Word(#[from] words::WordError),
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
    #[error(transparent)]
    GroupRing(#[from] groupring::GroupRingError),
    #[error(transparent)]
    Magnus(#[from] magnus::MagnusError),
    #[error(transparent)]
    Nil(#[from] nilq5::NilError),
    #[error(transparent)]
    Closure(#[from] closure::ClosureError),
    #[error("{0}")]
    Usage(String),
    #[error("output failed: {0}")]
    Io(#[from] std::io::Error),
}
