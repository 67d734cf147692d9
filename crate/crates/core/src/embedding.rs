//! Embeddings of signals into the time–frequency–scale half-space:
//! `E_φ[f]`, the truncated packet embeddings `A±_c[g]` and the scalar auxiliary `M[g]`.
//!
//! `E` and `A` are evaluated from the DFT of the signal: for fixed `(η, t)` both are
//! band-limited in `y`, e.g. `E_φ[f](η, y, t) = Σ_m F_m φ̂(t(ξ_m − η)) e^{2πi y ξ_m} Δξ`,
//! which is the grid Riemann sum of the defining integral against the periodised packet.
//! For `A`, samples sharing the same interval `(c_j(x), c_{j+1}(x))` are grouped and
//! each group is transformed once.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{dft, linearized_vc, lowest_index, Spectrum};
use crate::outersize::{SizeContext, SizeSpec};
use crate::signal::{FrequencySelection, Grid, SampledSignal, SequenceSignal};
use crate::space::{pairing_unchecked, NormedSpace};
use crate::tfs::{OuterField, Region, TfsGrid, TreeDictionary};
use crate::wavepacket::{Sign, WavePacketFamily};

/// `φ̂ = 1` on `[−inner, inner]`, `0` outside `(−outer, outer)`, smooth and monotone between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateauWindow {
    pub inner: f64,
    pub outer: f64,
}

/// `C^∞` step from 0 at `u ≤ 0` to 1 at `u ≥ 1`.
fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

impl PlateauWindow {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::Config(format!("plateau window needs 0 < inner < outer, got {inner}, {outer}")));
        }
        Ok(PlateauWindow { inner, outer })
    }

    #[inline]
    pub fn phi_hat(&self, zeta: f64) -> f64 {
        1.0 - smooth_step((zeta.abs() - self.inner) / (self.outer - self.inner))
    }

    /// Samples of `φ` on `grid` (real and even).
    pub fn sample(&self, grid: &Grid) -> Result<SampledSignal> {
        if grid.nyquist() <= self.outer {
            return Err(Error::Config(format!(
                "grid Nyquist {} does not exceed the window bandwidth {}",
                grid.nyquist(),
                self.outer
            )));
        }
        let lo = lowest_index(grid.n);
        let coeffs = (0..grid.n)
            .map(|i| Complex64::new(self.phi_hat((lo + i as i64) as f64 * grid.dxi()), 0.0))
            .collect();
        Ok(crate::fourier::idft(&Spectrum::new(*grid, NormedSpace::scalar(), coeffs)?))
    }
}

/// Parameters shared by the embeddings.
#[derive(Debug, Clone)]
pub struct EmbeddingConfig {
    pub family: WavePacketFamily,
    /// Analysing window; equal to 1 on the Fourier support of every packet.
    pub phi: PlateauWindow,
    /// Decay order `N` of the kernel `⟨u⟩^{−N}` in `M`.
    pub n_decay: u32,
    /// Exponent `r′` in `M`.
    pub rprime: f64,
}

impl EmbeddingConfig {
    pub fn new(family: WavePacketFamily, n_decay: u32, rprime: f64) -> Result<Self> {
        if n_decay < 2 {
            return Err(Error::Config(format!("decay order N = {n_decay} must be at least 2")));
        }
        if rprime.is_nan() || rprime < 1.0 {
            return Err(Error::Config(format!("exponent r' = {rprime} must lie in [1, inf]")));
        }
        let b = family.spec().b;
        let phi = PlateauWindow::new(b / 2.0, b)?;
        Ok(EmbeddingConfig { family, phi, n_decay, rprime })
    }

    /// `(Θ, Θ_in)` for the given sign: `Θ = ±(−1/4, 9/8)` oriented to contain `±[0, 1+ε)`,
    /// `Θ_in = Θ ∩ ±(−∞, 1−ε)`.
    pub fn theta(&self, sign: Sign) -> ((f64, f64), (f64, f64)) {
        let eps = self.family.spec().eps;
        match sign {
            Sign::Plus => ((-0.25, 1.125), (-0.25, 1.0 - eps)),
            Sign::Minus => ((-1.125, 0.25), (-1.0 + eps, 0.25)),
        }
    }
}

/// Adds `Σ_m coeff_m · mult(ξ_m) e^{2πi y ξ_m} Δξ` over `|ξ_m − η| < half` to `out[y, :]`.
fn band_sum<M: Fn(f64) -> f64>(spec: &Spectrum, eta: f64, half: f64, mult: M, ys: &[f64], out: &mut [Complex64]) {
    let grid = spec.grid();
    let d = spec.space().dim();
    let dxi = grid.dxi();
    let lo = lowest_index(grid.n);
    let m_min = (((eta - half) / dxi).ceil() as i64).max(lo);
    let m_max = (((eta + half) / dxi).floor() as i64).min(lo + grid.n as i64 - 1);
    for m in m_min..=m_max {
        let xi = m as f64 * dxi;
        let w = mult(xi) * dxi;
        if w == 0.0 {
            continue;
        }
        let c = spec.coeff((m - lo) as usize);
        for (iy, &y) in ys.iter().enumerate() {
            let ph = Complex64::from_polar(w, std::f64::consts::TAU * y * xi);
            for (o, v) in out[iy * d..(iy + 1) * d].iter_mut().zip(c) {
                *o += v * ph;
            }
        }
    }
}

fn check_band(signal_grid: &Grid, grid: &TfsGrid, half_at_unit_scale: f64) -> Result<()> {
    let reach = grid.eta.lo.abs().max(grid.eta.hi().abs()) + half_at_unit_scale / grid.t.t_min;
    if reach >= signal_grid.nyquist() {
        return Err(Error::Config(format!(
            "embedding needs frequencies up to {reach} but the signal grid resolves only {}",
            signal_grid.nyquist()
        )));
    }
    Ok(())
}

fn y_values(grid: &TfsGrid) -> Vec<f64> {
    (0..grid.y.n).map(|i| grid.y.value(i)).collect()
}

/// Evaluates a band sum for every `(η, t)` pair of the grid and stores the `y`-slices.
fn fill_slices<F: FnMut(f64, f64, &[f64], &mut [Complex64]) -> bool>(grid: &TfsGrid, space: NormedSpace, mut slice: F) -> Result<OuterField> {
    let mut field = OuterField::zeros(*grid, space);
    let d = space.dim();
    let ys = y_values(grid);
    let mut buf = vec![Complex64::new(0.0, 0.0); ys.len() * d];
    for k in 0..grid.t.n {
        let t = grid.t.value(k);
        for j in 0..grid.eta.n {
            let eta = grid.eta.value(j);
            buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            if !slice(eta, t, &ys, &mut buf) {
                continue;
            }
            for i in 0..grid.y.n {
                field.at_mut(grid.index(k, i, j)).copy_from_slice(&buf[i * d..(i + 1) * d]);
            }
        }
    }
    Ok(field)
}

/// `E_φ[f](η, y, t) = ⟨f; Λ_{(η,y,t)} φ⟩`.
pub fn embed_e(f: &SampledSignal, cfg: &EmbeddingConfig, grid: &TfsGrid) -> Result<OuterField> {
    check_band(f.grid(), grid, cfg.phi.outer)?;
    let spec = dft(f);
    let phi = cfg.phi;
    fill_slices(grid, *f.space(), |eta, t, ys, out| {
        band_sum(&spec, eta, phi.outer / t, |xi| phi.phi_hat(t * (xi - eta)), ys, out);
        true
    })
}

/// Sums of `g_j` over samples sharing the interval `(c_j(x), c_{j+1}(x))`, in order of first
/// appearance; degenerate intervals carry no packet and are dropped.
pub fn group_by_interval(g: &SequenceSignal, c: &FrequencySelection) -> Result<Vec<((f64, f64), SampledSignal)>> {
    let grid = *g.grid();
    if c.samples() != grid.n {
        return Err(Error::Shape(format!("selection has {} samples, signal has {}", c.samples(), grid.n)));
    }
    if c.intervals() != g.len() {
        return Err(Error::Shape(format!("selection has {} intervals, sequence has {} entries", c.intervals(), g.len())));
    }
    let d = g.space().dim();
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut groups: Vec<((f64, f64), Vec<Complex64>)> = Vec::new();
    for k in 0..grid.n {
        for (j, gj) in g.entries().iter().enumerate() {
            let iv = c.interval(k, j);
            if !(iv.0 < iv.1) {
                continue;
            }
            let v = gj.sample(k);
            if v.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                continue;
            }
            let slot = *index.entry((iv.0.to_bits(), iv.1.to_bits())).or_insert_with(|| {
                groups.push((iv, vec![Complex64::new(0.0, 0.0); grid.n * d]));
                groups.len() - 1
            });
            for (a, b) in groups[slot].1[k * d..(k + 1) * d].iter_mut().zip(v) {
                *a += b;
            }
        }
    }
    groups
        .into_iter()
        .map(|(iv, vals)| Ok((iv, SampledSignal::new(grid, *g.space(), vals)?)))
        .collect()
}

/// `A±_c[g](η, y, t) = ∫ Σ_j g_j(x) conj(Λ_{(η,y,t)} Ψ^{(c_j(x), c_{j+1}(x)),±}_{(η,t)}(x)) dx`.
/// Exactly zero at nodes where every interval violates the packet's frequency window.
pub fn embed_a(g: &SequenceSignal, c: &FrequencySelection, sign: Sign, cfg: &EmbeddingConfig, grid: &TfsGrid) -> Result<OuterField> {
    let b = cfg.family.spec().b;
    check_band(g.grid(), grid, b / 2.0)?;
    let groups: Vec<((f64, f64), Spectrum)> = group_by_interval(g, c)?
        .into_iter()
        .map(|(iv, s)| (iv, dft(&s)))
        .collect();
    let fam = &cfg.family;
    fill_slices(grid, *g.space(), |eta, t, ys, out| {
        let mut any = false;
        for (iv, spec) in &groups {
            if fam.window(sign, *iv, eta, t) == 0.0 {
                continue;
            }
            any = true;
            band_sum(spec, eta, b / (2.0 * t), |xi| fam.packet_hat_unchecked(sign, *iv, eta, t, t * (xi - eta)), ys, out);
        }
        any
    })
}

/// `⟨u⟩^{−N} = (1 + u²)^{−N/2}`.
#[inline]
fn japanese_decay(u: f64, n: u32) -> f64 {
    let base = 1.0 + u * u;
    if n % 2 == 0 {
        base.powi(-((n / 2) as i32))
    } else {
        base.powi(-((n / 2) as i32)) / base.sqrt()
    }
}

/// Radius (in units of `t`) beyond which `∫_R^∞ ⟨u⟩^{−N} du < 1e−13`; infinite for slowly decaying kernels.
fn kernel_reach(n: u32) -> f64 {
    if n < 4 {
        return f64::INFINITY;
    }
    let m = (n - 1) as f64;
    (1e-13 * m).powf(-1.0 / m)
}

/// `M[g](η, y, t) = ∫ (Σ_j ‖g_j(x)‖^{r′} 1_Θ(tη − t c_j(x)))^{1/r′} t^{−1} ⟨(x−y)/t⟩^{−N} dx`,
/// as a grid Riemann sum in `x` (kernel tails below `1e−13` dropped); scalar-valued.
pub fn embed_m(g: &SequenceSignal, c: &FrequencySelection, theta: (f64, f64), cfg: &EmbeddingConfig, grid: &TfsGrid) -> Result<OuterField> {
    let sgrid = *g.grid();
    if c.samples() != sgrid.n || c.intervals() != g.len() {
        return Err(Error::Shape("selection does not match the sequence".into()));
    }
    let space = *g.space();
    let norms: Vec<Vec<f64>> = g
        .entries()
        .iter()
        .map(|e| (0..sgrid.n).map(|k| space.norm_unchecked(e.sample(k))).collect())
        .collect();
    let rp = cfg.rprime;
    let n = cfg.n_decay;
    let xs: Vec<f64> = (0..sgrid.n).map(|k| sgrid.x(k)).collect();
    let mut h = vec![0.0; sgrid.n];
    let mut support: Vec<usize> = Vec::with_capacity(sgrid.n);
    // the indicator is piecewise constant in η, so neighbouring slices often repeat
    let mut prev: Option<(f64, Vec<f64>, Vec<Complex64>)> = None;
    fill_slices(grid, NormedSpace::scalar(), |eta, t, ys, out| {
        support.clear();
        for k in 0..sgrid.n {
            let levels = c.at(k);
            let mut acc = 0.0_f64;
            for (j, nj) in norms.iter().enumerate() {
                let v = nj[k];
                if v == 0.0 {
                    continue;
                }
                let th = t * eta - t * levels[j];
                if theta.0 < th && th < theta.1 {
                    acc = if rp.is_infinite() {
                        acc.max(v)
                    } else if rp == 1.0 {
                        acc + v
                    } else {
                        acc + v.powf(rp)
                    };
                }
            }
            h[k] = if rp.is_infinite() || rp == 1.0 { acc } else { acc.powf(1.0 / rp) };
            if h[k] != 0.0 {
                support.push(k);
            }
        }
        if support.is_empty() {
            return false;
        }
        if let Some((pt, ph, pv)) = &prev {
            if *pt == t && *ph == h {
                out.copy_from_slice(pv);
                return true;
            }
        }
        let scale = sgrid.dx / t;
        let reach = kernel_reach(n) * t;
        for (iy, &y) in ys.iter().enumerate() {
            let lo = support.partition_point(|&k| xs[k] < y - reach);
            let hi = support.partition_point(|&k| xs[k] <= y + reach);
            let s: f64 = support[lo..hi].iter().map(|&k| h[k] * japanese_decay((xs[k] - y) / t, n)).sum();
            out[iy] = Complex64::new(s * scale, 0.0);
        }
        prev = Some((t, h.clone(), out.to_vec()));
        true
    })
}

/// Quadrature resolution for [`check_dual_representation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualSettings {
    /// Midpoint nodes per packet window in each of the two window coordinates.
    pub steps: usize,
    /// The `y` nodes are every `y_stride`-th sample of the signal grid.
    pub y_stride: usize,
    /// Frequencies with `‖f̂‖` below `cutoff · max ‖f̂‖` are not resolved by the `(η, t)` nodes.
    pub cutoff: f64,
}

impl Default for DualSettings {
    fn default() -> Self {
        DualSettings {
            steps: 16,
            y_stride: 8,
            cutoff: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualReport {
    /// `∫ ⟨V_c f(x); g(x)⟩ dx`.
    pub lhs: Complex64,
    /// `Σ_± ∫ ⟨E_φ[f]; A±_c[g]⟩ dη dy dt`.
    pub rhs: Complex64,
    pub rhs_plus: Complex64,
    pub rhs_minus: Complex64,
    /// `|lhs − rhs| / |lhs|` (absolute difference when `lhs = 0`).
    pub relative_error: f64,
    /// Number of `(η, t)` quadrature nodes.
    pub nodes: usize,
    pub steps: usize,
}

/// Both sides of `∫⟨V_c f; g⟩ dx = Σ_± ∫⟨E_φ[f]; A±_c[g]⟩ dη dy dt`.
///
/// For every interval group and sign, the `(η, t)` integral is taken in the coordinates
/// `u = t(η − c_∓) ∓ 1 ∈ (−ε, ε)`, `s = ln t` (so `dη dt = du ds`), on the `s`-range where
/// the packets meet the resolved spectrum of `f`. The `y` nodes cover a full period of the
/// signal grid, where the `y`-sum of the band-limited integrand is exact.
pub fn check_dual_representation(
    f: &SampledSignal,
    g: &SequenceSignal,
    c: &FrequencySelection,
    cfg: &EmbeddingConfig,
    settings: &DualSettings,
) -> Result<DualReport> {
    let sgrid = *f.grid();
    if !sgrid.compatible(g.grid()) || f.dim() != g.space().dim() {
        return Err(Error::Shape("f and g live on different grids or dimensions".into()));
    }
    if settings.steps == 0 || settings.y_stride == 0 || sgrid.n % settings.y_stride != 0 {
        return Err(Error::Config(format!(
            "dual check needs steps > 0 and a y stride dividing {}",
            sgrid.n
        )));
    }
    let vc = linearized_vc(f, c)?;
    let d = f.dim();
    let mut lhs = Complex64::new(0.0, 0.0);
    for (vj, gj) in vc.entries().iter().zip(g.entries()) {
        for k in 0..sgrid.n {
            lhs += pairing_unchecked(vj.sample(k), gj.sample(k)) * sgrid.dx;
        }
    }

    let fspec = dft(f);
    let mags: Vec<f64> = (0..sgrid.n).map(|i| f.space().norm_unchecked(fspec.coeff(i))).collect();
    let fmax = mags.iter().cloned().fold(0.0, f64::max);
    let resolved: Vec<f64> = (0..sgrid.n)
        .filter(|&i| fmax > 0.0 && mags[i] > settings.cutoff * fmax)
        .map(|i| fspec.frequency(i))
        .collect();

    let dy = sgrid.dx * settings.y_stride as f64;
    let ys: Vec<f64> = (0..sgrid.n / settings.y_stride).map(|i| sgrid.x(i * settings.y_stride)).collect();
    let bs = *cfg.family.spec();
    let (b, eps) = (bs.b, bs.eps);
    let box_width = ((1.0 + eps + b / 2.0) / (1.0 - eps - b / 2.0)).ln();
    let h = box_width / settings.steps as f64;
    let du = 2.0 * eps / settings.steps as f64;
    let phi = cfg.phi;
    let fam = &cfg.family;

    let mut rhs_sign = [Complex64::new(0.0, 0.0); 2];
    let mut nodes = 0usize;
    let mut e_buf = vec![Complex64::new(0.0, 0.0); ys.len() * d];
    let mut a_buf = vec![Complex64::new(0.0, 0.0); ys.len() * d];
    for (iv, gs) in group_by_interval(g, c)? {
        let gspec = dft(&gs);
        for (si, sign) in Sign::BOTH.into_iter().enumerate() {
            let (anchor, dists): (f64, Vec<f64>) = match sign {
                Sign::Plus if iv.0.is_finite() => (iv.0, resolved.iter().filter(|&&x| iv.0 < x && x < iv.1).map(|x| x - iv.0).collect()),
                Sign::Minus if iv.1.is_finite() => (iv.1, resolved.iter().filter(|&&x| iv.0 < x && x < iv.1).map(|x| iv.1 - x).collect()),
                _ => continue,
            };
            if dists.is_empty() {
                continue;
            }
            let dmin = dists.iter().cloned().fold(f64::INFINITY, f64::min);
            let dmax = dists.iter().cloned().fold(0.0, f64::max);
            let s_lo = ((1.0 - eps - b / 2.0) / dmax).ln();
            let s_hi = ((1.0 + eps + b / 2.0) / dmin).ln();
            let ns = ((s_hi - s_lo) / h).ceil().max(1.0) as usize;
            if ns.saturating_mul(settings.steps) > 20_000_000 {
                return Err(Error::CostGuard(format!("{} quadrature nodes", ns * settings.steps)));
            }
            let ds = (s_hi - s_lo) / ns as f64;
            let w = du * ds * dy;
            for a in 0..ns {
                let t = (s_lo + (a as f64 + 0.5) * ds).exp();
                if (phi.outer + b / 2.0) / t * dy >= 1.0 {
                    return Err(Error::Config(format!(
                        "y stride {} is too coarse for packets at scale {t}",
                        settings.y_stride
                    )));
                }
                for q in 0..settings.steps {
                    let u = -eps + (q as f64 + 0.5) * du;
                    let eta = match sign {
                        Sign::Plus => anchor + (1.0 + u) / t,
                        Sign::Minus => anchor + (u - 1.0) / t,
                    };
                    if fam.window(sign, iv, eta, t) == 0.0 {
                        continue;
                    }
                    if eta.abs() + phi.outer / t >= sgrid.nyquist() {
                        return Err(Error::Config(format!(
                            "packets at (η, t) = ({eta}, {t}) reach beyond the signal's Nyquist frequency"
                        )));
                    }
                    nodes += 1;
                    e_buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                    a_buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                    band_sum(&fspec, eta, phi.outer / t, |xi| phi.phi_hat(t * (xi - eta)), &ys, &mut e_buf);
                    band_sum(&gspec, eta, b / (2.0 * t), |xi| fam.packet_hat_unchecked(sign, iv, eta, t, t * (xi - eta)), &ys, &mut a_buf);
                    let s: Complex64 = (0..ys.len())
                        .map(|i| pairing_unchecked(&e_buf[i * d..(i + 1) * d], &a_buf[i * d..(i + 1) * d]))
                        .sum();
                    rhs_sign[si] += s * w;
                }
            }
        }
    }
    let rhs = rhs_sign[0] + rhs_sign[1];
    let diff = (lhs - rhs).norm();
    let relative_error = if lhs.norm() > 0.0 { diff / lhs.norm() } else { diff };
    Ok(DualReport {
        lhs,
        rhs,
        rhs_plus: rhs_sign[0],
        rhs_minus: rhs_sign[1],
        relative_error,
        nodes,
        steps: settings.steps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    pub sign: Sign,
    /// `‖1_{∖E} A±_c[g]‖_{F*}` over the dictionary.
    pub lhs: f64,
    /// `‖1_{∖K} M[g]‖_{L^∞}` with `K = E`.
    pub rhs_masked: f64,
    /// The same with `K = ∅`.
    pub rhs_unmasked: f64,
    pub ratio_masked: f64,
    pub ratio_unmasked: f64,
    /// `g = 0`: both sides vanish.
    pub vacuous: bool,
    /// A nonzero left side against a vanishing right side.
    pub violation: bool,
}

fn ratio(lhs: f64, rhs: f64) -> (f64, bool) {
    if rhs > 0.0 {
        (lhs / rhs, false)
    } else if lhs > 0.0 {
        (f64::INFINITY, true)
    } else {
        (0.0, false)
    }
}

/// Spot check of `‖1_{∖E} A±_c[g]‖_{F*_Θ} ≲ ‖1_{∖K} M_{c,Θ}[g]‖_{L^∞_Θ}` with `E` the union of
/// the dictionary trees listed in `excluded`, for both `K = E` and `K = ∅`.
pub fn check_domination(
    g: &SequenceSignal,
    c: &FrequencySelection,
    sign: Sign,
    excluded: &[usize],
    dict: &TreeDictionary,
    cfg: &EmbeddingConfig,
    grid: &TfsGrid,
) -> Result<DominationReport> {
    if let Some(&bad) = excluded.iter().find(|&&i| i >= dict.len()) {
        return Err(Error::Shape(format!("excluded tree {bad} is not in the dictionary")));
    }
    let a = embed_a(g, c, sign, cfg, grid)?;
    let m = embed_m(g, c, dict.theta, cfg, grid)?;
    let mut keep = vec![true; grid.len()];
    for &i in excluded {
        for row in dict.trees[i].rows(grid, Region::Full) {
            for &(lo, hi) in row.ranges() {
                for j in lo..hi {
                    keep[grid.index(row.k, row.i, j)] = false;
                }
            }
        }
    }
    let masked = |v: Vec<f64>| -> Vec<f64> { v.into_iter().zip(&keep).map(|(x, &k)| if k { x } else { 0.0 }).collect() };
    let a_mags = masked(a.magnitudes());
    let m_mags = m.magnitudes();
    let lhs = SizeContext::new(grid, dict, SizeSpec::FStar)?.outer_size(&a_mags)?;
    let sup = SizeContext::new(grid, dict, SizeSpec::Lp { p: f64::INFINITY, region: Region::Full })?;
    let rhs_unmasked = sup.outer_size(&m_mags)?;
    let rhs_masked = sup.outer_size(&masked(m_mags))?;
    let (ratio_masked, v1) = ratio(lhs, rhs_masked);
    let (ratio_unmasked, v2) = ratio(lhs, rhs_unmasked);
    Ok(DominationReport {
        sign,
        lhs,
        rhs_masked,
        rhs_unmasked,
        ratio_masked,
        ratio_unmasked,
        vacuous: g.entries().iter().all(|e| e.is_zero()),
        violation: v1 || v2,
    })
}
