//! Random instances of the domination of `A±_c[g]` by `M_{c,Θ}[g]` outside an exceptional set.
//!
//! Each instance draws a sign, `g` with two entries (each three Gaussian atoms with
//! complex-normal amplitudes and random modulation), a selection `c` that is constant on the
//! four blocks `x < −4, −4 ≤ x < 0, 0 ≤ x < 4, x ≥ 4` with three sorted levels drawn from the
//! DFT frequencies in `[−2, 1]`, and `E` as the union of up to two random dictionary trees.
//! Packets at scale `t` have spectral features of width `ε/t`, so the signal is long
//! (`Δξ = 1/2048`) and the η axis fine enough to sample windows of width `2ε/t`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{complex_normal, Check, ExperimentConfig, Preset, Report, TfsSpec};
use crate::embedding::{check_domination, embed_a, embed_m, DominationReport, EmbeddingConfig};
use crate::error::Result;
use crate::fourier::frequencies;
use crate::signal::{FrequencySelection, Grid, SampledSignal, SequenceSignal};
use crate::space::NormedSpace;
use crate::tfs::{TfsGrid, Top, TreeDictionary};
use crate::wavepacket::Sign;

pub const DEFAULT_INSTANCES: usize = 50;
pub const SIGNAL_SAMPLES: usize = 8192;
pub const SIGNAL_DX: f64 = 0.25;
pub const PRESET_TOLERANCE: f64 = 0.25;
const ENTRIES: usize = 2;
const ATOMS: usize = 3;
const BLOCK_EDGES: [f64; 3] = [-4.0, 0.0, 4.0];

pub fn tfs_spec(preset: Preset) -> TfsSpec {
    let (ne, ny, ratio) = preset.pick((769, 25, 2.0), (1537, 49, 2f64.sqrt()), (3073, 97, 2f64.powf(0.25)));
    TfsSpec {
        eta_range: (-0.75, 0.75),
        eta_steps: ne,
        y_range: (-6.0, 6.0),
        y_steps: ny,
        t_min: 0.5,
        t_max: 2.0,
        ratio,
    }
}

/// Tops on `ξ ∈ {−3/4, …, 3/4}`, `x ∈ {−4, −2, …, 4}`, `s ∈ {1, 2, 4}`.
pub fn dictionary(theta: (f64, f64), theta_in: (f64, f64)) -> Result<TreeDictionary> {
    let mut tops = Vec::new();
    for s in [1.0, 2.0, 4.0] {
        for i in 0..7 {
            for j in 0..5 {
                tops.push(Top { xi: -0.75 + 0.25 * i as f64, x: -4.0 + 2.0 * j as f64, s });
            }
        }
    }
    TreeDictionary::new(theta, theta_in, tops)
}

fn atoms(rng: &mut ChaCha8Rng, grid: Grid, space: NormedSpace) -> Result<SampledSignal> {
    let d = space.dim();
    let mut v = vec![Complex64::new(0.0, 0.0); grid.n * d];
    for _ in 0..ATOMS {
        let centre = rng.gen_range(-3.0..3.0);
        let width: f64 = rng.gen_range(1.0..3.0);
        let freq = rng.gen_range(-0.5..0.5);
        let a: Vec<Complex64> = (0..d).map(|_| complex_normal(rng)).collect();
        for k in 0..grid.n {
            let x = grid.x(k);
            let e = (-(x - centre) * (x - centre) / (2.0 * width * width)).exp();
            if e < 1e-300 {
                continue;
            }
            let ph = Complex64::from_polar(e, std::f64::consts::TAU * freq * x);
            for i in 0..d {
                v[k * d + i] += a[i] * ph;
            }
        }
    }
    SampledSignal::new(grid, space, v)
}

/// One random `(sign, g, c, E)`.
pub struct Instance {
    pub sign: Sign,
    pub g: SequenceSignal,
    pub c: FrequencySelection,
    pub blocks: Vec<Vec<f64>>,
    pub excluded: Vec<usize>,
}

pub fn random_instance(rng: &mut ChaCha8Rng, space: NormedSpace, trees: usize) -> Result<Instance> {
    let sgrid = Grid::centered(SIGNAL_DX, SIGNAL_SAMPLES)?;
    let pool: Vec<f64> = frequencies(&sgrid).into_iter().filter(|x| (-2.0..=1.0).contains(x)).collect();
    let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
    let g = SequenceSignal::new((0..ENTRIES).map(|_| atoms(rng, sgrid, space)).collect::<Result<_>>()?)?;
    let blocks: Vec<Vec<f64>> = (0..BLOCK_EDGES.len() + 1)
        .map(|_| {
            let mut v: Vec<f64> = (0..3).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
            v.sort_by(f64::total_cmp);
            v
        })
        .collect();
    let c = FrequencySelection::new(
        (0..sgrid.n)
            .map(|k| blocks[BLOCK_EDGES.partition_point(|&e| e <= sgrid.x(k))].clone())
            .collect(),
    )?;
    let count = rng.gen_range(0..3);
    let excluded = (0..count).map(|_| rng.gen_range(0..trees)).collect();
    Ok(Instance { sign, g, c, blocks, excluded })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceRecord {
    pub sign: Sign,
    pub blocks: Vec<Vec<f64>>,
    pub excluded: Vec<usize>,
    pub report: DominationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationResult {
    pub preset: Preset,
    pub grid: TfsSpec,
    pub instances: Vec<InstanceRecord>,
    /// Instances with a nonzero left side.
    pub nonzero: usize,
    /// `max LHS/RHS` with `K = E`.
    pub max_masked: f64,
    /// `max LHS/RHS` with `K = ∅`.
    pub max_unmasked: f64,
    pub refined: Option<Box<DominationResult>>,
}

fn thetas(cfg: &ExperimentConfig, emb: &EmbeddingConfig, sign: Sign) -> ((f64, f64), (f64, f64)) {
    let (mut th, mut th_in) = emb.theta(sign);
    let flip = |(a, b): (f64, f64)| (-b, -a);
    if let Some(t) = cfg.tfs.theta {
        th = if sign == Sign::Plus { t } else { flip(t) };
    }
    if let Some(t) = cfg.tfs.theta_in {
        th_in = if sign == Sign::Plus { t } else { flip(t) };
    }
    (th, th_in)
}

pub fn domination_ratios(cfg: &ExperimentConfig) -> Result<DominationResult> {
    let spec = tfs_spec(cfg.preset).with(&cfg.tfs);
    let grid = spec.grid()?;
    let emb = cfg.embedding()?;
    let space = cfg.space.space()?;
    let dicts = [Sign::Plus, Sign::Minus].map(|s| {
        let (th, th_in) = thetas(cfg, &emb, s);
        dictionary(th, th_in)
    });
    let [plus, minus] = dicts;
    let (plus, minus) = (plus?, minus?);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut instances = Vec::new();
    for idx in 0..cfg.corpus.unwrap_or(DEFAULT_INSTANCES) {
        let inst = random_instance(&mut rng, space, plus.len())?;
        let dict = if inst.sign == Sign::Plus { &plus } else { &minus };
        let report = check_domination(&inst.g, &inst.c, inst.sign, &inst.excluded, dict, &emb, &grid)?;
        log::debug!("domination instance {idx}: {report:?}");
        if idx == 0 {
            if let Some(dir) = &cfg.dump_dir {
                dump_fields(dir, &inst, dict, &emb, &grid)?;
            }
        }
        instances.push(InstanceRecord { sign: inst.sign, blocks: inst.blocks, excluded: inst.excluded, report });
    }
    let max = |f: fn(&DominationReport) -> f64| instances.iter().map(|i| f(&i.report)).fold(0.0, f64::max);
    Ok(DominationResult {
        preset: cfg.preset,
        grid: spec,
        nonzero: instances.iter().filter(|i| i.report.lhs > 0.0).count(),
        max_masked: max(|r| r.ratio_masked),
        max_unmasked: max(|r| r.ratio_unmasked),
        instances,
        refined: None,
    })
}

fn dump_fields(dir: &std::path::Path, inst: &Instance, dict: &TreeDictionary, emb: &EmbeddingConfig, grid: &TfsGrid) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| crate::Error::Io { path: dir.display().to_string(), source })?;
    let a = embed_a(&inst.g, &inst.c, inst.sign, emb, grid)?;
    let m = embed_m(&inst.g, &inst.c, dict.theta, emb, grid)?;
    crate::io::write_field(&dir.join("domination_a.field"), &a)?;
    crate::io::write_field(&dir.join("domination_m.field"), &m)
}

pub fn run_domination(cfg: &ExperimentConfig) -> Result<Report<DominationResult>> {
    let mut res = domination_ratios(cfg)?;
    let mut checks = vec![
        Check::flag("ratios finite", res.max_masked.is_finite() && res.max_unmasked.is_finite()),
        Check::flag("no violations", res.instances.iter().all(|i| !i.report.violation)),
    ];
    if cfg.compare_refined {
        if let Some(next) = cfg.preset.refined() {
            let fine = domination_ratios(&cfg.with_preset(next))?;
            checks.push(Check::relative("masked max under refinement", fine.max_masked, res.max_masked, PRESET_TOLERANCE));
            checks.push(Check::relative("unmasked max under refinement", fine.max_unmasked, res.max_unmasked, PRESET_TOLERANCE));
            res.refined = Some(Box::new(fine));
        }
    }
    Ok(Report::new("domination", cfg, checks, res))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible_and_well_formed() {
        let space = NormedSpace::new(2, 2.0).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_instance(&mut rng, space, 105).unwrap()
        };
        let (a, b) = (draw(3), draw(3));
        assert_eq!(a.blocks, b.blocks);
        assert_eq!(a.excluded, b.excluded);
        assert_eq!(a.g.entries()[1].values(), b.g.entries()[1].values());
        assert_eq!(a.c.samples(), SIGNAL_SAMPLES);
        assert!(a.blocks.iter().all(|v| v.windows(2).all(|w| w[0] <= w[1])));
        assert!(a.excluded.len() <= 2 && a.excluded.iter().all(|&i| i < 105));
        let grid = *a.g.grid();
        assert_eq!(a.c.at(0), a.blocks[0].as_slice());
        assert_eq!(a.c.at(grid.index_of(0.0).unwrap()), a.blocks[2].as_slice());
    }
}
