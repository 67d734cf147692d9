//! An explicit family of truncated wave packets decomposing sharp frequency cutoffs.

mod bumps;
mod family;
mod multiplier;
mod reconstruct;

pub use bumps::{BumpSpec, Bumps};
pub use family::{Sign, WavePacketFamily};
pub use multiplier::{assemble_m, compute_m_plus, MultiplierSettings, MultiplierTable, M_PLUS_SELF_CONVERGENCE};
pub use reconstruct::{reconstruct_at, verify_reconstruction, ReconstructionReport};
