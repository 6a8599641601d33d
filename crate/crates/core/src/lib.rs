//! Exact-arithmetic toolkit for finite σ-subalgebras of the Lebesgue space `[0,1)`.
//!
//! Sets are finite unions of half-open intervals with dyadic endpoints, algebras
//! are represented by their atoms, and every measure, expectation and distance
//! is an exact rational.

pub mod demo;
pub mod dset;
pub mod dyadic;
pub mod error;
pub mod gallery;
pub mod lab;
pub mod partition;
pub mod rat;
pub mod seq;
pub mod step;

pub use dset::{boolean_combine, make_set, BoolOp, DSet};
pub use dyadic::Dyadic;
pub use error::{LabError, Result};
pub use partition::{generate, Partition, GENERATOR_CAP};
pub use rat::Rat;
pub use seq::{AlgebraSeq, ParamValue, SeqSource};
pub use step::{
    best_approx, cond_exp, cond_exp_perp, indicator, indicator_seminorm_ratio, inner, integrate,
    lp_dist, seminorm, Norm, Step,
};
