//! Rate of Fourier inversion: `sup_x ‖C_ξ f(x) − f(x)‖` against the `V^r` tail
//! `sup_x ‖ξ' ↦ C_{ξ'} f(x)‖_{V^r([ξ, ∞))}`, which bounds it.
//!
//! The error is summed directly from the top of the spectrum,
//! `C_ξ f − f = −Σ_{ξ_m > ξ} f̂_m e^{2πi ξ_m x} Δξ`, so small tails are free of cancellation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Check, ExperimentConfig, Report};
use crate::error::Result;
use crate::fourier::{dft, plateau_grid, PartialFourier};
use crate::generate::{make_signal, SignalKind};
use crate::signal::{Grid, SampledSignal};
use crate::variation::suffix_variation_norms;

pub const BAND: f64 = 0.75;
pub const DEFAULT_BANDLIMITED: usize = 3;
/// Past the band the error must vanish to this absolute level.
pub const EXACT_TOLERANCE: f64 = 1e-10;
/// Strict decrease is checked across the frequency steps whose spectral mass `‖f̂_m‖ Δξ`
/// exceeds this fraction of `max ‖f‖`; smaller decrements are below rounding of the error.
pub const NOISE_FLOOR: f64 = 1e-12;
/// Rounding allowance (relative to `max ‖f‖`) for `error ≤ tail`.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergeRow {
    pub signal: usize,
    pub kind: String,
    pub xi: f64,
    pub sup_error: f64,
    pub vr_tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalSummary {
    pub signal: usize,
    pub kind: String,
    pub max_abs: f64,
    /// Band-limited: largest error at frequencies past the band.
    pub error_past_band: Option<f64>,
    /// Gaussian: strictly decreasing across every step of resolvable spectral mass.
    pub strictly_decreasing: Option<bool>,
    pub tail_bounds_error: bool,
    pub tail_monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergeResult {
    pub r: f64,
    #[serde(skip)]
    pub rows: Vec<ConvergeRow>,
    pub signals: Vec<SignalSummary>,
}

/// Error and tail curves on the plateau grid `ξ_0 < … < ξ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curves {
    pub xis: Vec<f64>,
    /// `sup_x ‖C_{ξ_i} f(x) − f(x)‖`.
    pub error: Vec<f64>,
    /// `sup_x ‖ξ ↦ C_ξ f(x)‖_{V^r}` over `ξ ≥ ξ_i`.
    pub tail: Vec<f64>,
    /// `‖f̂_m‖ Δξ` of the DFT frequency between `ξ_m` and `ξ_{m+1}`.
    pub step_mass: Vec<f64>,
}

pub fn error_and_tail(f: &SampledSignal, r: f64) -> Result<Curves> {
    let grid = *f.grid();
    let xis = plateau_grid(&grid);
    let spec = dft(f);
    let d = f.dim();
    let space = *f.space();
    let pf = PartialFourier::new(f);
    let mut err = vec![0.0_f64; xis.len()];
    let mut tail = vec![0.0_f64; xis.len()];
    let mut acc = vec![Complex64::new(0.0, 0.0); d];
    for k in 0..grid.n {
        let x = grid.x(k);
        acc.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        // plateau point i sits just below DFT frequency i
        for i in (0..xis.len()).rev() {
            if i < grid.n {
                let ph = Complex64::from_polar(grid.dxi(), TAU * spec.frequency(i) * x);
                for (a, c) in acc.iter_mut().zip(spec.coeff(i)) {
                    *a += c * ph;
                }
            }
            err[i] = err[i].max(space.norm_unchecked(&acc));
        }
        let suffix = suffix_variation_norms(&pf.path(k, &xis), r)?;
        for (t, s) in tail.iter_mut().zip(suffix) {
            *t = t.max(s);
        }
    }
    let step_mass = (0..grid.n).map(|m| space.norm_unchecked(spec.coeff(m)) * grid.dxi()).collect();
    Ok(Curves { xis, error: err, tail, step_mass })
}

pub fn converge(cfg: &ExperimentConfig) -> Result<ConvergeResult> {
    let r = cfg.exponents.r;
    let n = cfg.preset.pick(64, 128, 256);
    let grid = Grid::centered(0.25, n)?;
    let space = cfg.space.space()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut corpus: Vec<(String, SampledSignal)> = Vec::new();
    for _ in 0..cfg.corpus.unwrap_or(DEFAULT_BANDLIMITED) {
        let kind = SignalKind::BandlimitedRandom { band: BAND, bumps: 3 };
        corpus.push(("bandlimited".into(), make_signal(&kind, grid, space, rng.gen())?));
    }
    let kind = SignalKind::Gaussian { sigma: 1.0, center: 0.0 };
    corpus.push(("gaussian".into(), make_signal(&kind, grid, space, 0)?));
    let mut rows = Vec::new();
    let mut signals = Vec::new();
    for (idx, (kind, f)) in corpus.into_iter().enumerate() {
        let Curves { xis, error: err, tail, step_mass } = error_and_tail(&f, r)?;
        let max_abs = f.max_abs();
        let error_past_band = (kind == "bandlimited").then(|| {
            xis.iter().zip(&err).filter(|(&x, _)| x > BAND).map(|(_, &e)| e).fold(0.0, f64::max)
        });
        let strictly_decreasing = (kind == "gaussian").then(|| {
            err.windows(2).zip(&step_mass).all(|(w, &m)| m < NOISE_FLOOR * max_abs || w[1] < w[0])
        });
        let tail_bounds_error = err.iter().zip(&tail).all(|(e, t)| *e <= t + BOUND_SLACK * max_abs);
        let tail_monotone = tail.windows(2).all(|w| w[1] <= w[0]);
        for i in 0..xis.len() {
            rows.push(ConvergeRow { signal: idx, kind: kind.clone(), xi: xis[i], sup_error: err[i], vr_tail: tail[i] });
        }
        signals.push(SignalSummary { signal: idx, kind, max_abs, error_past_band, strictly_decreasing, tail_bounds_error, tail_monotone });
    }
    Ok(ConvergeResult { r, rows, signals })
}

pub fn run_converge(cfg: &ExperimentConfig) -> Result<Report<ConvergeResult>> {
    let res = converge(cfg)?;
    let mut checks = Vec::new();
    for s in &res.signals {
        let tag = format!("signal {} ({})", s.signal, s.kind);
        if let Some(e) = s.error_past_band {
            checks.push(Check::at_most(&format!("{tag}: error past band"), e, EXACT_TOLERANCE));
        }
        if let Some(ok) = s.strictly_decreasing {
            checks.push(Check::flag(&format!("{tag}: error strictly decreasing"), ok));
        }
        checks.push(Check::flag(&format!("{tag}: V^r tail bounds error"), s.tail_bounds_error));
        checks.push(Check::flag(&format!("{tag}: V^r tail monotone"), s.tail_monotone));
    }
    Ok(Report::new("converge", cfg, checks, res))
}
