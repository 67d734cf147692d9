//! Finite-dimensional stand-in for the Banach space `X`: complex `d`-space with an `ℓ^p` norm.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exponent in `[1, ∞]`. `f64::INFINITY` is the max norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("exponent {p} is not in [1, inf]")));
        }
        Ok(Exponent(p))
    }

    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Conjugate exponent `p' = p / (p - 1)`, with `1 <-> ∞`.
    pub fn dual(self) -> Exponent {
        Exponent(conjugate(self.0))
    }
}

/// `p / (p - 1)` extended by `1 -> ∞` and `∞ -> 1`.
pub fn conjugate(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `(ℂ^d, ℓ^p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormedSpace {
    dim: usize,
    exponent: Exponent,
}

impl NormedSpace {
    pub fn new(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        Ok(NormedSpace {
            dim,
            exponent: Exponent::new(p)?,
        })
    }

    pub fn scalar() -> Self {
        NormedSpace {
            dim: 1,
            exponent: Exponent(2.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn p(&self) -> f64 {
        self.exponent.0
    }

    /// The dual space `(ℂ^d, ℓ^{p'})`.
    pub fn dual(&self) -> NormedSpace {
        NormedSpace {
            dim: self.dim,
            exponent: self.exponent.dual(),
        }
    }

    /// Checked norm; rejects wrong length and non-finite entries.
    pub fn norm(&self, v: &[Complex64]) -> Result<f64> {
        if v.len() != self.dim {
            return Err(Error::Shape(format!(
                "vector of length {} in a space of dimension {}",
                v.len(),
                self.dim
            )));
        }
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidValue("non-finite vector entry".into()));
        }
        Ok(lp_norm(v, self.p()))
    }

    /// Unchecked norm used on hot paths where inputs are already validated.
    #[inline]
    pub fn norm_unchecked(&self, v: &[Complex64]) -> f64 {
        lp_norm(v, self.p())
    }
}

/// `ℓ^p` norm of a complex vector.
pub fn lp_norm(v: &[Complex64], p: f64) -> f64 {
    lp_norm_real(v.iter().map(|z| z.norm()), p)
}

/// `ℓ^p` norm of nonnegative magnitudes, scaled by the largest entry to avoid overflow.
pub fn lp_norm_real<I: Iterator<Item = f64> + Clone>(mags: I, p: f64) -> f64 {
    let max = mags.clone().fold(0.0_f64, f64::max);
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    if p == 1.0 {
        return mags.sum();
    }
    if p == 2.0 {
        let s: f64 = mags.map(|m| (m / max) * (m / max)).sum();
        return max * s.sqrt();
    }
    let s: f64 = mags.map(|m| (m / max).powf(p)).sum();
    max * s.powf(1.0 / p)
}

/// Sesquilinear pairing `<v; w> = Σ v_k conj(w_k)`.
pub fn duality_pairing(v: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    if v.len() != w.len() {
        return Err(Error::Shape(format!(
            "pairing of vectors with lengths {} and {}",
            v.len(),
            w.len()
        )));
    }
    Ok(pairing_unchecked(v, w))
}

#[inline]
pub(crate) fn pairing_unchecked(v: &[Complex64], w: &[Complex64]) -> Complex64 {
    v.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}
