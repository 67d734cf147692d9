//! Reproducible experiments: configuration, grid presets and pass/fail reports.
//!
//! Every experiment is a pure function of an [`ExperimentConfig`]; all randomness flows
//! from `ChaCha8Rng::seed_from_u64(config.seed)`, so a run is bit-exactly reproducible.

pub mod converge;
pub mod domination;
pub mod holder;
pub mod packets;
pub mod sweep;
pub mod verify;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingConfig;
use crate::error::{Error, Result};
use crate::space::NormedSpace;
use crate::tfs::{GeometricAxis, TfsGrid, UniformAxis};
use crate::wavepacket::{BumpSpec, MultiplierSettings, WavePacketFamily};

/// Resolution level; every experiment pins its grids and quadrature steps per preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Tiny,
    #[default]
    Ref,
    Fine,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Tiny, Preset::Ref, Preset::Fine];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Tiny => "tiny",
            Preset::Ref => "ref",
            Preset::Fine => "fine",
        }
    }

    /// The next finer preset, if any.
    pub fn refined(self) -> Option<Preset> {
        match self {
            Preset::Tiny => Some(Preset::Ref),
            Preset::Ref => Some(Preset::Fine),
            Preset::Fine => None,
        }
    }

    fn pick<T>(self, tiny: T, reference: T, fine: T) -> T {
        match self {
            Preset::Tiny => tiny,
            Preset::Ref => reference,
            Preset::Fine => fine,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tiny" => Ok(Preset::Tiny),
            "ref" => Ok(Preset::Ref),
            "fine" => Ok(Preset::Fine),
            other => Err(Error::Config(format!("unknown preset '{other}' (expected tiny, ref or fine)"))),
        }
    }
}

/// `X = (ℂ^d, ℓ^p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpaceConfig {
    pub d: usize,
    pub p: f64,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig { d: 2, p: 2.0 }
    }
}

impl SpaceConfig {
    pub fn space(&self) -> Result<NormedSpace> {
        NormedSpace::new(self.d, self.p)
    }
}

/// Lebesgue exponent `p`, outer exponent `q`, variation exponent `r` and the
/// intermediate-UMD parameter `r₀` of the target space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub r0: f64,
}

impl Default for Exponents {
    fn default() -> Self {
        Exponents { p: 3.0, q: 2.0, r: 3.0, r0: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WavePacketConfig {
    pub b: f64,
    pub eps: f64,
    pub m_grid: usize,
    pub quad_order: usize,
}

impl Default for WavePacketConfig {
    fn default() -> Self {
        let b = BumpSpec::default();
        let m = MultiplierSettings::default();
        WavePacketConfig { b: b.b, eps: b.eps, m_grid: m.grid, quad_order: m.quad_order }
    }
}

impl WavePacketConfig {
    pub fn family(&self) -> Result<WavePacketFamily> {
        WavePacketFamily::new(
            BumpSpec::new(self.b, self.eps)?,
            MultiplierSettings { grid: self.m_grid, quad_order: self.quad_order },
        )
    }
}

/// Overrides of the preset time–frequency–scale grid and cone apertures; unset keys keep
/// the experiment's preset value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TfsOverrides {
    pub eta_range: Option<(f64, f64)>,
    pub eta_steps: Option<usize>,
    pub y_range: Option<(f64, f64)>,
    pub y_steps: Option<usize>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub ratio: Option<f64>,
    pub theta: Option<(f64, f64)>,
    pub theta_in: Option<(f64, f64)>,
}

/// A concrete time–frequency–scale grid description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TfsSpec {
    pub eta_range: (f64, f64),
    pub eta_steps: usize,
    pub y_range: (f64, f64),
    pub y_steps: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub ratio: f64,
}

impl TfsSpec {
    pub fn with(mut self, o: &TfsOverrides) -> Self {
        self.eta_range = o.eta_range.unwrap_or(self.eta_range);
        self.eta_steps = o.eta_steps.unwrap_or(self.eta_steps);
        self.y_range = o.y_range.unwrap_or(self.y_range);
        self.y_steps = o.y_steps.unwrap_or(self.y_steps);
        self.t_min = o.t_min.unwrap_or(self.t_min);
        self.t_max = o.t_max.unwrap_or(self.t_max);
        self.ratio = o.ratio.unwrap_or(self.ratio);
        self
    }

    pub fn grid(&self) -> Result<TfsGrid> {
        Ok(TfsGrid::new(
            UniformAxis::spanning(self.eta_range.0, self.eta_range.1, self.eta_steps)?,
            UniformAxis::spanning(self.y_range.0, self.y_range.1, self.y_steps)?,
            GeometricAxis::spanning(self.t_min, self.t_max, self.ratio)?,
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiKind {
    /// `φ̂ = 1` on `B_{b/2}`, smooth decay to 0 on `|ζ| = b`.
    #[default]
    Plateau,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedConfig {
    #[serde(rename = "N")]
    pub n_decay: u32,
    pub rprime: f64,
    pub phi_kind: PhiKind,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig { n_decay: 8, rprime: 2.0, phi_kind: PhiKind::Plateau }
    }
}

/// Exponent cells of the `L^p` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub p: Vec<f64>,
    pub r: Vec<f64>,
    pub r0: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            p: vec![1.25, 1.5, 2.0, 3.0, 4.0],
            r: vec![1.5, 2.5, 3.0, 4.0, 8.0],
            r0: vec![2.0],
        }
    }
}

/// Packet selection for `packets dump`; `c_plus = null` stands for `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketConfig {
    pub sign: crate::wavepacket::Sign,
    pub c_minus: f64,
    pub c_plus: Option<f64>,
    pub eta: f64,
    pub t: f64,
    pub n: usize,
    pub dx: f64,
}

impl Default for PacketConfig {
    fn default() -> Self {
        PacketConfig {
            sign: crate::wavepacket::Sign::Plus,
            c_minus: 0.0,
            c_plus: Some(1.0),
            eta: 1.0 / 2.0,
            t: 2.0,
            n: 1024,
            dx: 0.25,
        }
    }
}

impl PacketConfig {
    pub fn interval(&self) -> (f64, f64) {
        (self.c_minus, self.c_plus.unwrap_or(f64::INFINITY))
    }
}

/// Everything an experiment run depends on. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: Option<String>,
    pub seed: u64,
    pub preset: Preset,
    pub space: SpaceConfig,
    pub exponents: Exponents,
    /// Number of random instances; each experiment has its own default.
    pub corpus: Option<usize>,
    pub wavepacket: WavePacketConfig,
    pub tfs: TfsOverrides,
    pub embed: EmbedConfig,
    pub sweep: SweepGrid,
    pub packet: PacketConfig,
    /// Also run the next finer preset and check stability against it.
    pub compare_refined: bool,
    /// Directory for binary field dumps (domination experiment).
    pub dump_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.space.space()?;
        let e = &self.exponents;
        for (name, v) in [("p", e.p), ("q", e.q), ("r", e.r)] {
            if !(v > 1.0 && v.is_finite()) {
                return Err(Error::Config(format!("exponent {name} = {v} must lie in (1, inf)")));
            }
        }
        if !(e.r0 >= 2.0 && e.r0.is_finite()) {
            return Err(Error::Config(format!("r0 = {} must lie in [2, inf)", e.r0)));
        }
        if self.corpus == Some(0) {
            return Err(Error::Config("corpus size must be positive".into()));
        }
        BumpSpec::new(self.wavepacket.b, self.wavepacket.eps)?;
        if !(self.embed.n_decay >= 2) || !(self.embed.rprime >= 1.0) {
            return Err(Error::Config("embed.N must be at least 2 and embed.rprime at least 1".into()));
        }
        Ok(())
    }

    pub fn with_preset(&self, preset: Preset) -> Self {
        ExperimentConfig { preset, ..self.clone() }
    }

    pub fn embedding(&self) -> Result<EmbeddingConfig> {
        EmbeddingConfig::new(self.wavepacket.family()?, self.embed.n_decay, self.embed.rprime)
    }
}

/// One tolerance check of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, bound, pass: value <= bound }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, bound, pass: value >= bound }
    }

    /// `|value/reference − 1| ≤ tol`, reported as the relative deviation.
    pub fn relative(name: &str, value: f64, reference: f64, tol: f64) -> Self {
        let dev = (value / reference - 1.0).abs();
        Check { name: name.into(), value: dev, bound: tol, pass: dev <= tol }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Check { name: name.into(), value: if ok { 1.0 } else { 0.0 }, bound: 1.0, pass: ok }
    }
}

/// A JSON report: the outcome of every check and the experiment's own result record.
#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub experiment: String,
    pub preset: Preset,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(experiment: &str, cfg: &ExperimentConfig, checks: Vec<Check>, result: T) -> Self {
        Report {
            experiment: experiment.into(),
            preset: cfg.preset,
            seed: cfg.seed,
            pass: checks.iter().all(|c| c.pass),
            checks,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub(crate) fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Records as RFC 4180 CSV with a header row.
pub fn to_csv<T: Serialize>(records: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| Error::InvalidValue(format!("csv serialisation failed: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidValue(format!("csv serialisation failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes `text` to `path`, reporting failures with the path.
pub fn write_text(path: &std::path::Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_round_trip() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.preset, Preset::Ref);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
        let cfg = ExperimentConfig::from_json(
            r#"{"seed": 4, "preset": "fine", "embed": {"N": 6}, "tfs": {"eta_range": [-1, 1]}}"#,
        )
        .unwrap();
        assert_eq!((cfg.seed, cfg.preset, cfg.embed.n_decay), (4, Preset::Fine, 6));
        assert_eq!(cfg.tfs.eta_range, Some((-1.0, 1.0)));
    }

    #[test]
    fn csv_has_header_and_quotes() {
        #[derive(Serialize)]
        struct Row {
            name: String,
            value: f64,
        }
        let text = to_csv(&[Row { name: "a,b".into(), value: 0.5 }, Row { name: "c\"d".into(), value: -1.0 }]).unwrap();
        assert_eq!(text, "name,value\n\"a,b\",0.5\n\"c\"\"d\",-1.0\n");
    }

    #[test]
    fn config_rejects_unknown_and_invalid() {
        assert!(matches!(ExperimentConfig::from_json(r#"{"sed": 1}"#), Err(Error::Parse { .. })));
        assert!(matches!(ExperimentConfig::from_json(r#"{"exponents": {"p": 1.0}}"#), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_json(r#"{"wavepacket": {"eps": 0.1}}"#), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::from_json(r#"{"preset": "huge"}"#), Err(Error::Parse { .. })));
        assert!("huge".parse::<Preset>().is_err());
        assert_eq!("fine".parse::<Preset>().unwrap(), Preset::Fine);
    }
}
