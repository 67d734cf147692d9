//! The multiplier `m = m⁺ + m⁻` normalising the packet family.
//!
//! With `v = tη`, `w = tξ` the defining double integral becomes
//! `m⁺(ξ) = ∫∫ φ̂(w − v) χ(v − 1) χ⁻(v + 1 − w/ξ) dv dw / w`
//! over the compact box `v ∈ B_ε(1)`, `w ∈ B_{b/2}(v)`. The factor `χ⁻` switches from 0
//! to 1 across `w ∈ (ξ(v+1−ε), ξ(v+1+ε))`; the `w`-range is split there.

use serde::{Deserialize, Serialize};

use super::bumps::Bumps;
use crate::error::{Error, Result};
use crate::quad::Rule;

/// Agreement demanded between the quadrature at `order` and at `2·order`.
pub const M_PLUS_SELF_CONVERGENCE: f64 = 1e-8;

/// Flatness demanded of `m` outside `B_{b/2}(1/2)`.
const FLATNESS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSettings {
    /// Number of table nodes on `[−δ, 1+δ]`.
    pub grid: usize,
    /// Gauss–Legendre nodes per dimension and per smooth piece.
    pub quad_order: usize,
}

impl Default for MultiplierSettings {
    fn default() -> Self {
        MultiplierSettings {
            grid: 4096,
            quad_order: 64,
        }
    }
}

/// What the `w`-integral sees for a given `ξ`.
enum Regime {
    /// `ξ ≤ 0` or small enough that `χ⁻ ≡ 1` on the whole box: the `ξ → 0⁺` limit.
    Limit,
    /// `χ⁻ ≡ 0` on the whole box.
    Zero,
    Transition,
}

struct PlusQuadrature<'a> {
    bumps: &'a Bumps,
    rule: Rule,
    v_nodes: Vec<(f64, f64)>,
}

impl<'a> PlusQuadrature<'a> {
    fn new(bumps: &'a Bumps, order: usize) -> Result<Self> {
        let rule = Rule::gauss_legendre(order)?;
        let eps = bumps.spec().eps;
        let v_nodes = rule
            .on(1.0 - eps, 1.0 + eps)
            .map(|(v, w)| (v, w * bumps.chi(v - 1.0)))
            .collect();
        Ok(PlusQuadrature { bumps, rule, v_nodes })
    }

    fn regime(&self, xi: f64) -> Regime {
        if xi <= 0.0 {
            return Regime::Limit;
        }
        if xi >= 1.0 {
            return Regime::Zero;
        }
        let s = self.bumps.spec();
        let half = 0.5 * s.b;
        let eps = s.eps;
        let all_one = self.v_nodes.iter().all(|&(v, _)| xi * (v + 1.0 + eps) <= v - half);
        if all_one {
            return Regime::Limit;
        }
        let all_zero = self.v_nodes.iter().all(|&(v, _)| xi * (v + 1.0 - eps) >= v + half);
        if all_zero {
            return Regime::Zero;
        }
        Regime::Transition
    }

    fn smooth_piece(&self, v: f64, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.rule.integrate(a, b, |w| self.bumps.phi_hat(w - v) / w)
    }

    fn limit(&self) -> f64 {
        let half = 0.5 * self.bumps.spec().b;
        self.v_nodes
            .iter()
            .map(|&(v, wv)| wv * self.smooth_piece(v, v - half, v + half))
            .sum()
    }

    fn value(&self, xi: f64) -> f64 {
        match self.regime(xi) {
            Regime::Limit => self.limit(),
            Regime::Zero => 0.0,
            Regime::Transition => {
                let s = self.bumps.spec();
                let half = 0.5 * s.b;
                self.v_nodes
                    .iter()
                    .map(|&(v, wv)| {
                        let (lo, hi) = (v - half, v + half);
                        let p1 = (xi * (v + 1.0 - s.eps)).clamp(lo, hi);
                        let p2 = (xi * (v + 1.0 + s.eps)).clamp(lo, hi);
                        let ramp = if p2 > p1 {
                            self.rule.integrate(p1, p2, |w| {
                                self.bumps.phi_hat(w - v) * self.bumps.chi_minus(v + 1.0 - w / xi) / w
                            })
                        } else {
                            0.0
                        };
                        wv * (ramp + self.smooth_piece(v, p2, hi))
                    })
                    .sum()
            }
        }
    }
}

/// `m⁺(ξ)` with a self-convergence check against the rule of twice the order.
/// Arguments `ξ ≤ 0` return the `ξ → 0⁺` limit, `ξ ≥ 1` return 0.
pub fn compute_m_plus(bumps: &Bumps, xi: f64, order: usize) -> Result<f64> {
    if xi.is_nan() {
        return Err(Error::InvalidValue("m⁺ at NaN".into()));
    }
    let coarse = PlusQuadrature::new(bumps, order)?.value(xi);
    let fine = PlusQuadrature::new(bumps, 2 * order)?.value(xi);
    let scale = PlusQuadrature::new(bumps, 2 * order)?.limit();
    if (coarse - fine).abs() > M_PLUS_SELF_CONVERGENCE * scale {
        return Err(Error::Numeric(format!(
            "m⁺({xi}) quadrature did not settle: {coarse} at order {order}, {fine} at order {}",
            2 * order
        )));
    }
    Ok(fine)
}

/// Tabulated `m⁺` and `m` on a mirror-symmetric grid over `[−δ, 1+δ]`, `δ = b`.
#[derive(Debug, Clone)]
pub struct MultiplierTable {
    lo: f64,
    h: f64,
    nodes: Vec<f64>,
    m_plus: Vec<f64>,
    m: Vec<f64>,
    /// `m⁺(0⁺)`, the constant value of `m` outside `(0, 1)`.
    m_edge: f64,
    b: f64,
}

/// Four-point Lagrange interpolation on a uniform grid; returns the common value
/// exactly when the four nodes agree.
fn interpolate(values: &[f64], lo: f64, h: f64, x: f64) -> f64 {
    let n = values.len();
    let pos = (x - lo) / h;
    let i = (pos.floor() as isize).clamp(1, n as isize - 3) as usize;
    let ys = [values[i - 1], values[i], values[i + 1], values[i + 2]];
    if ys.iter().all(|&y| y == ys[0]) {
        return ys[0];
    }
    let s = pos - i as f64;
    let l0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    let l1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    let l2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    let l3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    l0 * ys[0] + l1 * ys[1] + l2 * ys[2] + l3 * ys[3]
}

/// Builds and validates the table: `m > 0`, `m` flat outside `B_{b/2}(1/2)`,
/// `m⁺` flat outside `[1/4, 3/4]`, and `m⁺` converged at a few transition points.
pub fn assemble_m(bumps: &Bumps, settings: MultiplierSettings) -> Result<MultiplierTable> {
    let n = settings.grid;
    if n < 16 {
        return Err(Error::Config(format!("multiplier grid needs at least 16 nodes, got {n}")));
    }
    let b = bumps.spec().b;
    let delta = b;
    let lo = -delta;
    let h = (1.0 + 2.0 * delta) / (n - 1) as f64;
    let mut nodes = vec![0.0; n];
    for i in 0..n {
        nodes[i] = if 2 * i < n { lo + i as f64 * h } else { 1.0 - (lo + (n - 1 - i) as f64 * h) };
    }
    let quad = PlusQuadrature::new(bumps, settings.quad_order)?;
    let m_edge = quad.limit();
    let m_plus: Vec<f64> = nodes.iter().map(|&x| quad.value(x)).collect();
    let m: Vec<f64> = (0..n).map(|i| m_plus[i] + m_plus[n - 1 - i]).collect();

    if let Some(i) = m.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Construction(format!(
            "m vanishes at ξ = {}; eps is too large relative to b",
            nodes[i]
        )));
    }
    for i in 0..n - 1 {
        let mid = 0.5 * (nodes[i] + nodes[i + 1]);
        let slope = (m[i + 1] - m[i]) / h;
        if (mid - 0.5).abs() >= 0.5 * b + h && slope.abs() >= FLATNESS_TOLERANCE {
            return Err(Error::Construction(format!(
                "m varies outside B_(b/2)(1/2): slope {slope} near ξ = {mid}"
            )));
        }
        let slope_plus = (m_plus[i + 1] - m_plus[i]) / h;
        if !(0.25..=0.75).contains(&mid) && slope_plus.abs() >= FLATNESS_TOLERANCE {
            return Err(Error::Construction(format!(
                "m⁺ varies outside [1/4, 3/4]: slope {slope_plus} near ξ = {mid}"
            )));
        }
    }
    for k in 1..=4 {
        let x = 0.5 - 0.5 * b + b * k as f64 / 5.0;
        compute_m_plus(bumps, x, settings.quad_order)?;
    }
    Ok(MultiplierTable {
        lo,
        h,
        nodes,
        m_plus,
        m,
        m_edge,
        b,
    })
}

impl MultiplierTable {
    /// `m(ξ)`; constant `m⁺(0⁺)` outside the tabulated range.
    #[inline]
    pub fn m(&self, xi: f64) -> f64 {
        if xi <= self.lo || xi >= 1.0 - self.lo {
            return self.m_edge;
        }
        interpolate(&self.m, self.lo, self.h, xi)
    }

    /// Tabulated `m⁺`, with the same extension conventions as [`compute_m_plus`].
    pub fn m_plus(&self, xi: f64) -> f64 {
        if xi <= self.lo {
            return self.m_edge;
        }
        if xi >= 1.0 - self.lo {
            return 0.0;
        }
        interpolate(&self.m_plus, self.lo, self.h, xi)
    }

    /// `m⁻(ξ) = m⁺(1 − ξ)`.
    pub fn m_minus(&self, xi: f64) -> f64 {
        self.m_plus(1.0 - xi)
    }

    /// `m(0) = m(1)`.
    pub fn m_edge(&self) -> f64 {
        self.m_edge
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node_values(&self) -> &[f64] {
        &self.m
    }

    pub fn node_plus_values(&self) -> &[f64] {
        &self.m_plus
    }

    /// Largest `|m(ξ_i) − m(1−ξ_i)|` over nodes, evaluated through the interpolant.
    pub fn symmetry_defect(&self) -> f64 {
        self.nodes
            .iter()
            .map(|&x| (self.m(x) - self.m(1.0 - x)).abs())
            .fold(0.0, f64::max)
    }

    /// Largest finite-difference slope of `m` at nodes outside `B_{b/2}(1/2)`.
    pub fn flatness_defect(&self) -> f64 {
        let n = self.m.len();
        (0..n - 1)
            .filter(|&i| (0.5 * (self.nodes[i] + self.nodes[i + 1]) - 0.5).abs() >= 0.5 * self.b + self.h)
            .map(|i| ((self.m[i + 1] - self.m[i]) / self.h).abs())
            .fold(0.0, f64::max)
    }

    /// Largest finite-difference slope of `m⁺` at nodes outside `[1/4, 3/4]`.
    pub fn plus_flatness_defect(&self) -> f64 {
        let n = self.m_plus.len();
        (0..n - 1)
            .filter(|&i| !(0.25..=0.75).contains(&(0.5 * (self.nodes[i] + self.nodes[i + 1]))))
            .map(|i| ((self.m_plus[i + 1] - self.m_plus[i]) / self.h).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.m.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
