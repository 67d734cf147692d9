//! Reconstruction, dual-representation and pointwise-vs-norm verification runs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{complex_normal, Check, ExperimentConfig, Preset, Report};
use crate::embedding::{check_dual_representation, DualReport, DualSettings};
use crate::error::Result;
use crate::fourier::{compare_pointwise_norm, plateau_grid, ComparabilityReport};
use crate::generate::{make_signal, SignalKind};
use crate::signal::{FrequencySelection, Grid, SampledSignal, SequenceSignal};
use crate::space::NormedSpace;
use crate::wavepacket::{verify_reconstruction, ReconstructionReport};

pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-2;
pub const RECONSTRUCTION_MIN_RATIO: f64 = 2.0;
pub const ENDPOINT_GAP: f64 = 0.02;
pub const TABLE_TOLERANCE: f64 = 1e-8;
pub const DUAL_TOLERANCE: f64 = 0.05;
pub const PTNM_TOLERANCE: f64 = 1e-10;

/// Midpoint nodes per window coordinate; the refined run doubles them.
pub fn reconstruction_steps(preset: Preset) -> usize {
    preset.pick(20, 24, 48)
}

pub fn dual_steps(preset: Preset) -> usize {
    preset.pick(8, 16, 32)
}

pub const RECONSTRUCTION_INTERVALS: [(f64, f64); 4] =
    [(0.0, 1.0), (-1.0, 2.5), (0.3, f64::INFINITY), (f64::NEG_INFINITY, 0.0)];
const RECONSTRUCTION_POINTS: usize = 401;

fn evaluation_points(c: (f64, f64)) -> Vec<f64> {
    let lo = if c.0.is_finite() { c.0 - 0.5 } else { c.1 - 2.0 };
    let hi = if c.1.is_finite() { c.1 + 0.5 } else { c.0 + 2.0 };
    let n = RECONSTRUCTION_POINTS;
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TableInvariants {
    pub min_value: f64,
    pub symmetry_defect: f64,
    pub flatness_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionResult {
    pub steps: usize,
    pub table: TableInvariants,
    pub intervals: Vec<ReconstructionReport>,
}

pub fn run_reconstruction(cfg: &ExperimentConfig) -> Result<Report<ReconstructionResult>> {
    let family = cfg.wavepacket.family()?;
    let steps = reconstruction_steps(cfg.preset);
    let t = family.table();
    let table = TableInvariants {
        min_value: t.min_value(),
        symmetry_defect: t.symmetry_defect(),
        flatness_defect: t.flatness_defect(),
    };
    let mut checks = vec![
        Check::flag("m positive", table.min_value > 0.0),
        Check::at_most("m symmetry defect", table.symmetry_defect, TABLE_TOLERANCE),
        Check::at_most("m slope outside B_{b/2}(1/2)", table.flatness_defect, TABLE_TOLERANCE),
    ];
    let mut intervals = Vec::new();
    for c in RECONSTRUCTION_INTERVALS {
        let rep = verify_reconstruction(&family, c, &evaluation_points(c), steps, ENDPOINT_GAP)?;
        let tag = format!("({}, {})", c.0, c.1);
        checks.push(Check::at_most(&format!("sup residual {tag}"), rep.sup_residual, RECONSTRUCTION_TOLERANCE));
        checks.push(Check::at_least(&format!("refinement ratio {tag}"), rep.convergence_ratio, RECONSTRUCTION_MIN_RATIO));
        intervals.push(rep);
    }
    Ok(Report::new("reconstruction", cfg, checks, ReconstructionResult { steps, table, intervals }))
}

pub const DUAL_INSTANCES: usize = 4;
const DUAL_SAMPLES: usize = 256;

/// `d = 1` Gaussian `f` and `g = (g_1, g_2)`, and a selection with three uniform random levels in
/// `[−0.6, 0.6]` on each half-line.
pub fn dual_instance(rng: &mut ChaCha8Rng) -> Result<(SampledSignal, SequenceSignal, FrequencySelection)> {
    let grid = Grid::centered(0.25, DUAL_SAMPLES)?;
    let gaussian = |rng: &mut ChaCha8Rng| -> Result<SampledSignal> {
        let sigma = rng.gen_range(1.5..3.0);
        let center = rng.gen_range(-2.0..2.0);
        let amp: Complex64 = complex_normal(rng);
        Ok(make_signal(&SignalKind::Gaussian { sigma, center }, grid, NormedSpace::scalar(), 0)?.scale(amp))
    };
    let f = gaussian(rng)?;
    let g = SequenceSignal::new(vec![gaussian(rng)?, gaussian(rng)?])?;
    let mut levels = || {
        let mut v: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.6..0.6)).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let (left, right) = (levels(), levels());
    let c = FrequencySelection::new((0..grid.n).map(|k| if grid.x(k) < 0.0 { left.clone() } else { right.clone() }).collect())?;
    Ok((f, g, c))
}

#[derive(Debug, Clone, Serialize)]
pub struct DualResult {
    pub steps: usize,
    pub instances: Vec<DualReport>,
    pub max_relative_error: f64,
    pub refined: Option<Box<DualResult>>,
}

pub fn dual_errors(cfg: &ExperimentConfig) -> Result<DualResult> {
    let emb = cfg.embedding()?;
    let steps = dual_steps(cfg.preset);
    let settings = DualSettings { steps, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut instances = Vec::new();
    for _ in 0..cfg.corpus.unwrap_or(DUAL_INSTANCES) {
        let (f, g, c) = dual_instance(&mut rng)?;
        instances.push(check_dual_representation(&f, &g, &c, &emb, &settings)?);
    }
    let max_relative_error = instances.iter().map(|r| r.relative_error).fold(0.0, f64::max);
    Ok(DualResult { steps, instances, max_relative_error, refined: None })
}

pub fn run_dual(cfg: &ExperimentConfig) -> Result<Report<DualResult>> {
    let mut res = dual_errors(cfg)?;
    let mut checks = vec![Check::at_most("max relative error", res.max_relative_error, DUAL_TOLERANCE)];
    if cfg.compare_refined {
        if let Some(next) = cfg.preset.refined() {
            let fine = dual_errors(&cfg.with_preset(next))?;
            let decreasing = res.instances.iter().zip(&fine.instances).all(|(a, b)| b.relative_error < a.relative_error);
            checks.push(Check::flag("error decreases under refinement", decreasing));
            res.refined = Some(Box::new(fine));
        }
    }
    Ok(Report::new("dual", cfg, checks, res))
}

pub const PTNM_SIGNALS: usize = 50;
pub const PTNM_DIM: usize = 4;
const PTNM_CANDIDATES: usize = 40;

#[derive(Debug, Clone, Serialize)]
pub struct PtnmResult {
    pub r: f64,
    pub signals: usize,
    pub candidates: Vec<Vec<usize>>,
    /// Per `s`, the worst excess over all signals.
    pub spaces: Vec<ComparabilityReport>,
}

/// `X = ℓ^s(ℂ⁴)` for `s ∈ {1.5, r, 4}`; every signal and space shares the same candidates.
pub fn run_ptnm(cfg: &ExperimentConfig) -> Result<Report<PtnmResult>> {
    let r = cfg.exponents.r;
    let n = cfg.preset.pick(32, 64, 128);
    let grid = Grid::centered(0.125, n)?;
    let xis = plateau_grid(&grid);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let candidates: Vec<Vec<usize>> = (0..PTNM_CANDIDATES)
        .map(|_| {
            let m = rng.gen_range(2..8);
            let mut c: Vec<usize> = (0..m).map(|_| rng.gen_range(0..xis.len())).collect();
            c.sort_unstable();
            c
        })
        .collect();
    let signals = cfg.corpus.unwrap_or(PTNM_SIGNALS);
    let seeds: Vec<u64> = (0..signals).map(|_| rng.gen()).collect();
    let mut exps = vec![1.5, r, 4.0];
    exps.sort_by(f64::total_cmp);
    exps.dedup();
    let mut spaces = Vec::new();
    let mut checks = Vec::new();
    for s in exps {
        let space = NormedSpace::new(PTNM_DIM, s)?;
        let mut worst: Option<ComparabilityReport> = None;
        for &seed in &seeds {
            let f = make_signal(&SignalKind::BandlimitedRandom { band: 2.0, bumps: 3 }, grid, space, seed)?;
            let rep = compare_pointwise_norm(&f, r, &xis, &candidates, PTNM_TOLERANCE)?;
            worst = Some(match worst {
                None => rep,
                Some(w) => ComparabilityReport {
                    convex_excess: w.convex_excess.zip(rep.convex_excess).map(|(a, b)| a.max(b)),
                    concave_excess: w.concave_excess.zip(rep.concave_excess).map(|(a, b)| a.max(b)),
                    holds: w.holds && rep.holds,
                    ..w
                },
            });
        }
        let w = worst.expect("at least one signal");
        if let Some(v) = w.convex_excess {
            checks.push(Check::at_most(&format!("s = {s}: pt <= nm"), v, PTNM_TOLERANCE));
        }
        if let Some(v) = w.concave_excess {
            checks.push(Check::at_most(&format!("s = {s}: pt >= nm"), v, PTNM_TOLERANCE));
        }
        spaces.push(w);
    }
    Ok(Report::new("ptnm", cfg, checks, PtnmResult { r, signals, candidates, spaces }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ptnm_equality_regime_at_s_equal_r() {
        let cfg = ExperimentConfig { preset: Preset::Tiny, corpus: Some(3), ..Default::default() };
        let rep = run_ptnm(&cfg).unwrap();
        assert!(rep.pass, "{rep:?}");
        let at_r = rep.result.spaces.iter().find(|s| s.s == cfg.exponents.r).unwrap();
        assert!(at_r.convex_excess.is_some() && at_r.concave_excess.is_some());
    }

    #[test]
    fn dual_instances_are_reproducible() {
        let draw = || dual_instance(&mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let (a, b) = (draw(), draw());
        assert_eq!(a.0.values(), b.0.values());
        assert_eq!(a.2.at(0), b.2.at(0));
        assert!(a.2.at(0).windows(2).all(|w| w[0] <= w[1]));
    }
}
