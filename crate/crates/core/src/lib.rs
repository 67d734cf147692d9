//! Numerical toolkit for vector-valued variational time–frequency analysis.
//!
//! Signals take values in `X = (ℂ^d, ℓ^p)`. The crate computes r-variation norms,
//! partial Fourier integrals and variational Carleson operators, builds an explicit
//! family of truncated wave packets, embeds signals into the time–frequency–scale
//! half-space and measures the results with outer Lebesgue quasinorms over trees
//! and strips.

pub mod embedding;
pub mod experiments;
pub mod error;
pub mod fourier;
pub mod generate;
pub mod io;
pub mod quad;
pub mod signal;
pub mod tfs;
pub mod outersize;
pub mod space;
pub mod variation;
pub mod wavepacket;

pub use error::{Error, Result};
pub use signal::{FrequencySelection, Grid, SampledSignal, SequenceSignal};
pub use space::NormedSpace;
