//! Left- (`+`) and right- (`−`) truncated wave packets `Ψ^{(c−,c+),±}_{(η,t)}`.
//!
//! For `(c−, c+) = (0, 1)`:
//! `Ψ̂⁺(ζ) = χ(tη−1) χ⁻(t(η−1)+1) φ̂(ζ) / m(ζ/t + η)` and
//! `Ψ̂⁻(ζ) = χ⁺(tη−1) χ(t(η−1)+1) φ̂(ζ) / m(ζ/t + η)`.
//! General intervals follow by `(η, t) ↦ ((η−c−)/L, tL)` with `L = c+ − c−`; infinite
//! endpoints use the closed-form limits of these expressions.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bumps::{BumpSpec, Bumps};
use super::multiplier::{assemble_m, MultiplierSettings, MultiplierTable};
use crate::error::{Error, Result};
use crate::fourier::{frequencies, idft, Spectrum};
use crate::quad::Rule;
use crate::signal::{Grid, SampledSignal};
use crate::space::NormedSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// Shared bump functions and multiplier table; cheap to clone.
#[derive(Debug, Clone)]
pub struct WavePacketFamily {
    bumps: Arc<Bumps>,
    table: Arc<MultiplierTable>,
}

fn check_interval(c: (f64, f64)) -> Result<()> {
    let (lo, hi) = c;
    if lo.is_nan() || hi.is_nan() || !(lo < hi) || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
        return Err(Error::Domain(format!("packet interval needs c- < c+, got ({lo}, {hi})")));
    }
    Ok(())
}

impl WavePacketFamily {
    pub fn new(spec: BumpSpec, settings: MultiplierSettings) -> Result<Self> {
        let bumps = Bumps::new(spec)?;
        let table = assemble_m(&bumps, settings)?;
        Ok(WavePacketFamily {
            bumps: Arc::new(bumps),
            table: Arc::new(table),
        })
    }

    pub fn spec(&self) -> &BumpSpec {
        self.bumps.spec()
    }

    pub fn bumps(&self) -> &Bumps {
        &self.bumps
    }

    pub fn table(&self) -> &MultiplierTable {
        &self.table
    }

    /// The `(η, t)`-dependent cutoff factor; zero exactly outside the frequency window.
    pub fn window(&self, sign: Sign, c: (f64, f64), eta: f64, t: f64) -> f64 {
        let (lo, hi) = c;
        let b = &self.bumps;
        match (sign, lo.is_finite(), hi.is_finite()) {
            (_, false, false) => 0.0,
            (Sign::Plus, true, true) => b.chi(t * (eta - lo) - 1.0) * b.chi_minus(t * (eta - hi) + 1.0),
            (Sign::Plus, true, false) => b.chi(t * (eta - lo) - 1.0),
            (Sign::Plus, false, true) => 0.0,
            (Sign::Minus, true, true) => b.chi_plus(t * (eta - lo) - 1.0) * b.chi(t * (eta - hi) + 1.0),
            (Sign::Minus, false, true) => b.chi(t * (eta - hi) + 1.0),
            (Sign::Minus, true, false) => 0.0,
        }
    }

    /// `φ̂(ζ) / m(·)` with the rescaled multiplier argument.
    #[inline]
    pub fn profile(&self, c: (f64, f64), eta: f64, t: f64, zeta: f64) -> f64 {
        let phi = self.bumps.phi_hat(zeta);
        if phi == 0.0 {
            return 0.0;
        }
        let (lo, hi) = c;
        let m = if lo.is_finite() && hi.is_finite() {
            self.table.m((zeta / t + eta - lo) / (hi - lo))
        } else {
            self.table.m_edge()
        };
        phi / m
    }

    /// `Ψ̂^{(c−,c+),±}_{(η,t)}(ζ)`; real-valued.
    pub fn packet_hat(&self, sign: Sign, c: (f64, f64), eta_t: (f64, f64), zeta: f64) -> Result<f64> {
        check_interval(c)?;
        let (eta, t) = eta_t;
        if !(t > 0.0) {
            return Err(Error::Domain(format!("packet scale t = {t} must be positive")));
        }
        Ok(self.packet_hat_unchecked(sign, c, eta, t, zeta))
    }

    #[inline]
    pub fn packet_hat_unchecked(&self, sign: Sign, c: (f64, f64), eta: f64, t: f64, zeta: f64) -> f64 {
        let w = self.window(sign, c, eta, t);
        if w == 0.0 {
            return 0.0;
        }
        w * self.profile(c, eta, t, zeta)
    }

    /// Frequency window of the family: `(η_lo, η_hi)` outside which the packet vanishes.
    pub fn eta_window(&self, sign: Sign, c: (f64, f64), t: f64) -> Option<(f64, f64)> {
        let eps = self.spec().eps;
        let (lo, hi) = c;
        let (a, b) = match sign {
            Sign::Plus => {
                if !lo.is_finite() {
                    return None;
                }
                (lo + (1.0 - eps) / t, (hi - (1.0 - eps) / t).min(lo + (1.0 + eps) / t))
            }
            Sign::Minus => {
                if !hi.is_finite() {
                    return None;
                }
                ((lo + (1.0 - eps) / t).max(hi - (1.0 + eps) / t), hi - (1.0 - eps) / t)
            }
        };
        (a < b).then_some((a, b))
    }

    /// Samples of `Ψ` on `grid`, obtained by inverse DFT of `Ψ̂` on the grid's frequencies.
    pub fn packet_space(&self, sign: Sign, c: (f64, f64), eta_t: (f64, f64), grid: &Grid) -> Result<SampledSignal> {
        check_interval(c)?;
        let b = self.spec().b;
        if grid.nyquist() <= b {
            return Err(Error::Config(format!(
                "grid Nyquist {} does not exceed the packet bandwidth {b}",
                grid.nyquist()
            )));
        }
        if grid.dxi() > b / 16.0 {
            return Err(Error::Config(format!(
                "grid of length {} resolves the packet spectrum too coarsely",
                grid.length()
            )));
        }
        let coeffs = frequencies(grid)
            .into_iter()
            .map(|z| self.packet_hat(sign, c, eta_t, z).map(|v| Complex64::new(v, 0.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(idft(&Spectrum::new(*grid, NormedSpace::scalar(), coeffs)?))
    }

    /// `Ψ(x) = ∫ Ψ̂(ζ) e^{2πiζx} dζ` by composite Gauss–Legendre over `B_{b/2}`.
    pub fn packet_value(&self, sign: Sign, c: (f64, f64), eta: f64, t: f64, x: f64, rule: &Rule, panels: usize) -> Complex64 {
        let w = self.window(sign, c, eta, t);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let half = 0.5 * self.spec().b;
        rule.composite(-half, half, panels)
            .into_iter()
            .map(|(z, wz)| Complex64::from_polar(wz * self.profile(c, eta, t, z), std::f64::consts::TAU * z * x))
            .sum::<Complex64>()
            * w
    }
}
