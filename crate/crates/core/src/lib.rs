//! Exact computation in Thompson's group F.
//!
//! Two independent representations of the group are implemented and
//! cross-checked against each other: the unique normal form over the
//! infinite presentation ([`normal_form`]) and the piecewise-linear
//! homeomorphism model of the real line ([`plmap`]). On top of those sit
//! the word metric with respect to the finite presentation ([`metrics`])
//! and the quasi-isometric embeddings of F x Z^n ([`embeddings`]).

pub mod dyadic;
pub mod embeddings;
pub mod metrics;
pub mod normal_form;
pub mod plmap;
pub mod sample;
pub mod words;

pub use dyadic::Dyadic;
pub use normal_form::{DStat, NormalForm};
pub use plmap::{Breakpoint, PLMap};
pub use words::{Letter, Sign, Word};
