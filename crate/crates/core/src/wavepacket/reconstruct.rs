//! Numerical check of `1_{(c−,c+)}(ξ) = Σ_± ∬ Ψ̂^{(c−,c+),±}_{(η,t)}(t(ξ−η)) dη dt`.
//!
//! Each family is integrated in its window coordinates: `u = t(η−c−) − 1` for `+`,
//! `u = t(η−c+) + 1` for `−`, and `s = ln t`, so that `dη dt = du ds`. For fixed `ξ` the
//! integrand lives in a box `|u| < ε`, `s ∈ [s_lo, s_hi]` and is smooth and compactly
//! supported there; the tensor midpoint rule is applied on that box.

use serde::Serialize;

use super::family::{Sign, WavePacketFamily};
use crate::error::{Error, Result};

/// `Σ_± ∬ Ψ̂(t(ξ−η)) dη dt` with `steps × steps` midpoint nodes per family.
pub fn reconstruct_at(family: &WavePacketFamily, c: (f64, f64), xi: f64, steps: usize) -> f64 {
    Sign::BOTH
        .iter()
        .map(|&sign| family_integral(family, sign, c, xi, steps))
        .sum()
}

fn family_integral(family: &WavePacketFamily, sign: Sign, c: (f64, f64), xi: f64, steps: usize) -> f64 {
    let spec = family.spec();
    let (eps, half) = (spec.eps, 0.5 * spec.b);
    let (lo, hi) = c;
    // distance from the anchoring endpoint; the packet needs t·dist ≈ 1
    let dist = match sign {
        Sign::Plus if lo.is_finite() => xi - lo,
        Sign::Minus if hi.is_finite() => hi - xi,
        _ => return 0.0,
    };
    if !(dist > 0.0) {
        return 0.0;
    }
    let s_lo = ((1.0 - eps - half) / dist).ln();
    let s_hi = ((1.0 + eps + half) / dist).ln();
    let du = 2.0 * eps / steps as f64;
    let ds = (s_hi - s_lo) / steps as f64;
    let mut total = 0.0;
    for i in 0..steps {
        let u = -eps + (i as f64 + 0.5) * du;
        for j in 0..steps {
            let t = (s_lo + (j as f64 + 0.5) * ds).exp();
            let eta = match sign {
                Sign::Plus => lo + (1.0 + u) / t,
                Sign::Minus => hi + (u - 1.0) / t,
            };
            total += family.packet_hat_unchecked(sign, c, eta, t, t * (xi - eta));
        }
    }
    total * du * ds
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport {
    pub c_minus: f64,
    pub c_plus: f64,
    pub steps: usize,
    pub xi: Vec<f64>,
    pub value: Vec<f64>,
    pub value_refined: Vec<f64>,
    pub sup_residual: f64,
    pub l2_residual: f64,
    pub sup_residual_refined: f64,
    pub l2_residual_refined: f64,
    /// `sup_residual / sup_residual_refined`.
    pub convergence_ratio: f64,
}

/// Evaluates the identity on `xis` (dropping points within `delta` of a finite endpoint)
/// at `steps` and `2·steps` midpoint nodes per dimension.
pub fn verify_reconstruction(
    family: &WavePacketFamily,
    c: (f64, f64),
    xis: &[f64],
    steps: usize,
    delta: f64,
) -> Result<ReconstructionReport> {
    if !(c.0 < c.1) {
        return Err(Error::Domain(format!("reconstruction interval needs c- < c+, got {c:?}")));
    }
    if steps == 0 {
        return Err(Error::Config("reconstruction needs at least one quadrature step".into()));
    }
    let near = |e: f64, x: f64| e.is_finite() && (x - e).abs() < delta;
    let xi: Vec<f64> = xis.iter().copied().filter(|&x| !near(c.0, x) && !near(c.1, x)).collect();
    let indicator = |x: f64| if c.0 < x && x < c.1 { 1.0 } else { 0.0 };
    let value: Vec<f64> = xi.iter().map(|&x| reconstruct_at(family, c, x, steps)).collect();
    let value_refined: Vec<f64> = xi.iter().map(|&x| reconstruct_at(family, c, x, 2 * steps)).collect();
    let residuals = |vals: &[f64]| -> (f64, f64) {
        let res: Vec<f64> = vals.iter().zip(&xi).map(|(v, &x)| (v - indicator(x)).abs()).collect();
        let sup = res.iter().copied().fold(0.0, f64::max);
        let l2 = if res.is_empty() { 0.0 } else { (res.iter().map(|r| r * r).sum::<f64>() / res.len() as f64).sqrt() };
        (sup, l2)
    };
    let (sup_residual, l2_residual) = residuals(&value);
    let (sup_residual_refined, l2_residual_refined) = residuals(&value_refined);
    let convergence_ratio = if sup_residual_refined > 0.0 {
        sup_residual / sup_residual_refined
    } else if sup_residual > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    Ok(ReconstructionReport {
        c_minus: c.0,
        c_plus: c.1,
        steps,
        xi,
        value,
        value_refined,
        sup_residual,
        l2_residual,
        sup_residual_refined,
        l2_residual_refined,
        convergence_ratio,
    })
}
