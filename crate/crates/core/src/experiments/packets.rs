//! Samples of a single truncated wave packet in space and frequency.


use serde::Serialize;

use super::{Check, ExperimentConfig, Report};
use crate::error::Result;
use crate::fourier::frequencies;
use crate::signal::Grid;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PacketRow {
    pub k: usize,
    pub x: f64,
    pub re: f64,
    pub im: f64,
    /// DFT frequency of index `k` (ascending) and `Ψ̂` there.
    pub zeta: f64,
    pub hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PacketResult {
    pub sign: crate::wavepacket::Sign,
    pub c_minus: f64,
    pub c_plus: Option<f64>,
    pub eta: f64,
    pub t: f64,
    /// η-range on which packets of this scale are nonzero, if any.
    pub eta_window: Option<(f64, f64)>,
    /// Largest `|Ψ̂|` at `|ζ| ≥ b` (must vanish).
    pub hat_outside_band: f64,
    #[serde(skip)]
    pub rows: Vec<PacketRow>,
}

pub fn dump(cfg: &ExperimentConfig) -> Result<Report<PacketResult>> {
    let pc = cfg.packet;
    let family = cfg.wavepacket.family()?;
    let grid = Grid::centered(pc.dx, pc.n)?;
    let c = pc.interval();
    let psi = family.packet_space(pc.sign, c, (pc.eta, pc.t), &grid)?;
    let b = family.spec().b;
    let mut rows = Vec::with_capacity(grid.n);
    let mut outside = 0.0_f64;
    for (k, zeta) in frequencies(&grid).into_iter().enumerate() {
        let hat = family.packet_hat(pc.sign, c, (pc.eta, pc.t), zeta)?;
        if zeta.abs() >= b {
            outside = outside.max(hat.abs());
        }
        let v = psi.sample(k)[0];
        rows.push(PacketRow { k, x: grid.x(k), re: v.re, im: v.im, zeta, hat });
    }
    let checks = vec![Check::at_most("packet spectrum outside B_b", outside, 0.0)];
    let res = PacketResult {
        sign: pc.sign,
        c_minus: pc.c_minus,
        c_plus: pc.c_plus,
        eta: pc.eta,
        t: pc.t,
        eta_window: family.eta_window(pc.sign, c, pc.t),
        hat_outside_band: outside,
        rows,
    };
    Ok(Report::new("packets", cfg, checks, res))
}
