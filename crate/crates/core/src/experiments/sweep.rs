//! Empirical `L^p` ratios of the linearised and full variational Carleson operators over
//! exponent cells, with the admissibility flags of the exponent region.
//!
//! The corpus is band-limited random signals; selections draw `J + 1` levels per sample,
//! independently and uniformly from the frequency grid over the band. Each corpus item is
//! seeded from the run seed, so the first half of a `2N` corpus is the `N` corpus and the
//! stability of the per-cell maxima under doubling is read off one run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Check, ExperimentConfig, Report};
use crate::error::{Error, Result};
use crate::fourier::{linearized_vc, plateau_grid, variational_carleson};
use crate::generate::{make_signal, SignalKind};
use crate::signal::{FrequencySelection, Grid};
use crate::space::conjugate;

pub const DEFAULT_CORPUS: usize = 16;
pub const GROWTH_TOLERANCE: f64 = 1.25;
const BAND: f64 = 1.0;
const BUMPS: usize = 3;
const LEVELS: usize = 6;

/// Flags of the exponent region for `(p, r, r₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Admissibility {
    /// `r₀ < r` and `p > (r/(r₀−1))′`.
    pub theorem: bool,
    /// Some `q` has `q > min(p, r₀)′(r₀−1)` and `q′ > r′`.
    pub q_exists: bool,
}

pub fn admissibility(p: f64, r: f64, r0: f64) -> Admissibility {
    let theorem = r0 < r && {
        let a = r / (r0 - 1.0);
        a > 1.0 && p > conjugate(a)
    };
    // q′ > r′ ⟺ q < r
    let q_exists = conjugate(p.min(r0)) * (r0 - 1.0) < r;
    Admissibility { theorem, q_exists }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub r: f64,
    pub r0: f64,
    pub seed: u64,
    /// `‖V_c f‖_{L^p(ℓ^r(X))} / ‖f‖_{L^p(X)}` for the random selection `c`.
    pub ratio: f64,
    /// `‖V^r_* f‖_{L^p} / ‖f‖_{L^p(X)}`.
    pub sup_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub p: f64,
    pub r: f64,
    pub r0: f64,
    pub admissible: bool,
    pub q_exists: bool,
    /// Maxima over the first half of the corpus and over all of it.
    pub max_ratio_half: f64,
    pub max_ratio: f64,
    pub max_sup_ratio_half: f64,
    pub max_sup_ratio: f64,
    /// `max_ratio / max_ratio_half`.
    pub growth: f64,
    pub sup_growth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub corpus: usize,
    pub samples: usize,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
    pub cells: Vec<CellSummary>,
}

pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let grid_cfg = &cfg.sweep;
    if grid_cfg.p.is_empty() || grid_cfg.r.is_empty() || grid_cfg.r0.is_empty() {
        return Err(Error::Config("sweep needs at least one value of p, r and r0".into()));
    }
    for &v in grid_cfg.p.iter().chain(&grid_cfg.r) {
        if !(v > 1.0 && v.is_finite()) {
            return Err(Error::Config(format!("sweep exponent {v} must lie in (1, inf)")));
        }
    }
    if grid_cfg.r0.iter().any(|&v| !(v >= 2.0 && v.is_finite())) {
        return Err(Error::Config("sweep r0 values must lie in [2, inf)".into()));
    }
    let n = cfg.preset.pick(64, 128, 256);
    let grid = Grid::centered(0.25, n)?;
    let space = cfg.space.space()?;
    let xis: Vec<f64> = plateau_grid(&grid);
    // the spectrum vanishes outside the band, so the path is constant beyond its plateau points
    let lo = xis.partition_point(|&x| x < -BAND).saturating_sub(1);
    let hi = (xis.partition_point(|&x| x <= BAND) + 1).min(xis.len());
    let band_xis = &xis[lo..hi];
    let half = cfg.corpus.unwrap_or(DEFAULT_CORPUS);
    let corpus = 2 * half;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // zero signals contribute no rows (0/0)
    let mut rows = Vec::new();
    let seeds: Vec<u64> = (0..corpus).map(|_| rng.gen()).collect();
    for &seed in &seeds {
        let f = make_signal(&SignalKind::BandlimitedRandom { band: BAND, bumps: BUMPS }, grid, space, seed)?;
        let mut srng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let c = FrequencySelection::new(
            (0..n)
                .map(|_| {
                    let mut v: Vec<f64> = (0..LEVELS).map(|_| band_xis[srng.gen_range(0..band_xis.len())]).collect();
                    v.sort_by(f64::total_cmp);
                    v
                })
                .collect(),
        )?;
        if f.is_zero() {
            continue;
        }
        let vc = linearized_vc(&f, &c)?;
        for &r in &grid_cfg.r {
            let vstar = variational_carleson(&f, r, band_xis)?;
            for &p in &grid_cfg.p {
                let fnorm = f.lp_norm(p);
                let vnorm = (vstar.iter().map(|v| v.powf(p)).sum::<f64>() * grid.dx).powf(1.0 / p);
                let ratio = vc.lp_lr_norm(p, r) / fnorm;
                for &r0 in &grid_cfg.r0 {
                    rows.push(SweepRow { p, r, r0, seed, ratio, sup_ratio: vnorm / fnorm });
                }
            }
        }
    }
    let first: std::collections::HashSet<u64> = seeds[..half].iter().copied().collect();
    let mut cells = Vec::new();
    for &p in &grid_cfg.p {
        for &r in &grid_cfg.r {
            for &r0 in &grid_cfg.r0 {
                let cell: Vec<&SweepRow> = rows.iter().filter(|x| x.p == p && x.r == r && x.r0 == r0).collect();
                let max = |f: fn(&SweepRow) -> f64, only_first: bool| {
                    cell.iter().filter(|x| !only_first || first.contains(&x.seed)).map(|x| f(x)).fold(0.0, f64::max)
                };
                let a = admissibility(p, r, r0);
                let (mh, m) = (max(|x| x.ratio, true), max(|x| x.ratio, false));
                let (sh, s) = (max(|x| x.sup_ratio, true), max(|x| x.sup_ratio, false));
                let growth = |a: f64, b: f64| if b > 0.0 { a / b } else { 1.0 };
                cells.push(CellSummary {
                    p,
                    r,
                    r0,
                    admissible: a.theorem,
                    q_exists: a.q_exists,
                    max_ratio_half: mh,
                    max_ratio: m,
                    max_sup_ratio_half: sh,
                    max_sup_ratio: s,
                    growth: growth(m, mh),
                    sup_growth: growth(s, sh),
                });
            }
        }
    }
    Ok(SweepResult { corpus, samples: n, rows, cells })
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Report<SweepResult>> {
    let res = sweep(cfg)?;
    let mut checks = Vec::new();
    for c in res.cells.iter().filter(|c| c.admissible) {
        let tag = format!("p = {}, r = {}, r0 = {}", c.p, c.r, c.r0);
        checks.push(Check::at_most(&format!("growth {tag}"), c.growth, GROWTH_TOLERANCE));
        checks.push(Check::at_most(&format!("sup growth {tag}"), c.sup_growth, GROWTH_TOLERANCE));
    }
    for c in &res.cells {
        log::info!(
            "cell p={} r={} r0={}: admissible={} q_exists={} max ratio {:.4} (half {:.4})",
            c.p, c.r, c.r0, c.admissible, c.q_exists, c.max_ratio, c.max_ratio_half
        );
    }
    Ok(Report::new("sweep", cfg, checks, res))
}
