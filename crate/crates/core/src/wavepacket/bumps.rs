//! The bump functions `χ`, `χ±` and `φ̂` underlying the packet construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::unit_bump;
use crate::quad::Rule;

/// Intervals of the tabulated cumulative bump on `[−1, 0]`.
const CUMULATIVE_INTERVALS: usize = 4096;

/// Support parameters: `χ` lives on `B_ε`, `φ̂` on `B_{b/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub b: f64,
    pub eps: f64,
}

impl Default for BumpSpec {
    fn default() -> Self {
        BumpSpec {
            b: 1.0 / 16.0,
            eps: 1.0 / 256.0,
        }
    }
}

impl BumpSpec {
    pub fn new(b: f64, eps: f64) -> Result<Self> {
        let spec = BumpSpec { b, eps };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b <= 0.125) {
            return Err(Error::Config(format!("b = {} must lie in (0, 1/8]", self.b)));
        }
        if !(self.eps > 0.0 && self.eps <= self.b / 16.0) {
            return Err(Error::Config(format!(
                "eps = {} must lie in (0, b/16] = (0, {}]",
                self.eps,
                self.b / 16.0
            )));
        }
        Ok(())
    }
}

/// Evaluators for `χ`, `χ⁺`, `χ⁻` and `φ̂`.
///
/// `χ` is the unit-mass bump on `B_ε`; `χ⁺` its distribution function, tabulated with
/// cubic Hermite interpolation on the left half and completed by `χ⁺(z) = 1 − χ⁺(−z)`,
/// so `χ⁺ + χ⁻ = 1` holds to rounding and `χ⁺` is exactly 0 below `−ε` and 1 above `ε`.
#[derive(Debug, Clone)]
pub struct Bumps {
    spec: BumpSpec,
    /// `∫_{−1}^{1} unit_bump`.
    mass: f64,
    /// Normalised cumulative values at `u_i = −1 + i/K`, `i = 0..=K`.
    cumulative: Vec<f64>,
}

impl Bumps {
    pub fn new(spec: BumpSpec) -> Result<Self> {
        spec.validate()?;
        let rule = Rule::gauss_legendre(12)?;
        let k = CUMULATIVE_INTERVALS;
        let h = 1.0 / k as f64;
        let mut raw = Vec::with_capacity(k + 1);
        let mut acc = 0.0;
        raw.push(0.0);
        for i in 0..k {
            let a = -1.0 + i as f64 * h;
            acc += rule.integrate(a, a + h, unit_bump);
            raw.push(acc);
        }
        let mass = 2.0 * acc;
        let cumulative = raw.iter().map(|v| v / mass).collect();
        Ok(Bumps {
            spec,
            mass,
            cumulative,
        })
    }

    pub fn spec(&self) -> &BumpSpec {
        &self.spec
    }

    /// `χ(z)`, unit mass on `B_ε`.
    #[inline]
    pub fn chi(&self, z: f64) -> f64 {
        unit_bump(z / self.spec.eps) / (self.spec.eps * self.mass)
    }

    /// Cumulative of the unit-mass bump on `[−1, 0]` in the normalised variable.
    fn left_cumulative(&self, u: f64) -> f64 {
        if u <= -1.0 {
            return 0.0;
        }
        let k = CUMULATIVE_INTERVALS;
        let h = 1.0 / k as f64;
        let pos = (u + 1.0) * k as f64;
        let i = (pos.floor() as usize).min(k - 1);
        let s = pos - i as f64;
        let (y0, y1) = (self.cumulative[i], self.cumulative[i + 1]);
        let u0 = -1.0 + i as f64 * h;
        let d0 = unit_bump(u0) / self.mass * h;
        let d1 = unit_bump(u0 + h) / self.mass * h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * d1
    }

    /// `χ⁺(z) = ∫_{−∞}^{z} χ`.
    #[inline]
    pub fn chi_plus(&self, z: f64) -> f64 {
        let u = z / self.spec.eps;
        if u <= 0.0 {
            self.left_cumulative(u)
        } else {
            1.0 - self.left_cumulative(-u)
        }
    }

    /// `χ⁻(z) = χ⁺(−z)`.
    #[inline]
    pub fn chi_minus(&self, z: f64) -> f64 {
        self.chi_plus(-z)
    }

    /// `φ̂(ζ)`, supported in `B_{b/2}` with `φ̂(0) = 1`.
    #[inline]
    pub fn phi_hat(&self, zeta: f64) -> f64 {
        std::f64::consts::E * unit_bump(2.0 * zeta / self.spec.b)
    }
}
