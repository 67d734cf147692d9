//! The discretised time–frequency–scale half-space: grids, charts, trees and strips.
//!
//! Every set is evaluated as a finite set of grid nodes. A node `(η_j, y_i, t_k)`
//! carries the weight `Δη Δy t_k ln ρ` for `dη dy dt`; in the chart of a tree with top
//! scale `s` the measure `dθ dζ dσ/σ` equals `dη dy dt / s`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::NormedSpace;

/// `n` equally spaced points starting at `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformAxis {
    pub lo: f64,
    pub step: f64,
    pub n: usize,
}

impl UniformAxis {
    /// `steps` points covering `[lo, hi]` inclusive.
    pub fn spanning(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if steps < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Config(format!("axis [{lo}, {hi}] with {steps} points is degenerate")));
        }
        Ok(UniformAxis {
            lo,
            step: (hi - lo) / (steps - 1) as f64,
            n: steps,
        })
    }

    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }

    pub fn hi(&self) -> f64 {
        self.value(self.n - 1)
    }

    /// Fractional index of `v`.
    #[inline]
    pub fn position(&self, v: f64) -> f64 {
        (v - self.lo) / self.step
    }
}

/// `t_k = t_min ρ^k`, `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricAxis {
    pub t_min: f64,
    pub ratio: f64,
    pub n: usize,
}

impl GeometricAxis {
    /// Levels `t_min ρ^k` up to and including the last one not exceeding `t_max` (with rounding slack).
    pub fn spanning(t_min: f64, t_max: f64, ratio: f64) -> Result<Self> {
        if !(t_min > 0.0) || !(t_max >= t_min) || !(ratio > 1.0) || !t_max.is_finite() {
            return Err(Error::Config(format!(
                "scale axis needs 0 < t_min <= t_max and ratio > 1, got {t_min}, {t_max}, {ratio}"
            )));
        }
        let n = ((t_max / t_min).ln() / ratio.ln() + 1e-9).floor() as usize + 1;
        Ok(GeometricAxis { t_min, ratio, n })
    }

    #[inline]
    pub fn value(&self, k: usize) -> f64 {
        self.t_min * self.ratio.powi(k as i32)
    }

    pub fn t_max(&self) -> f64 {
        self.value(self.n - 1)
    }

    #[inline]
    pub fn position(&self, t: f64) -> f64 {
        (t / self.t_min).ln() / self.ratio.ln()
    }
}

/// Tensor grid over `(η, y, t)`; node index `(k·n_y + i)·n_η + j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfsGrid {
    pub eta: UniformAxis,
    pub y: UniformAxis,
    pub t: GeometricAxis,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub eta: f64,
    pub y: f64,
    pub t: f64,
}

impl TfsGrid {
    pub fn new(eta: UniformAxis, y: UniformAxis, t: GeometricAxis) -> Self {
        TfsGrid { eta, y, t }
    }

    pub fn len(&self) -> usize {
        self.eta.n * self.y.n * self.t.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.y.n + i) * self.eta.n + j
    }

    /// `(k, i, j)` of a flat index.
    #[inline]
    pub fn split(&self, idx: usize) -> (usize, usize, usize) {
        let j = idx % self.eta.n;
        let r = idx / self.eta.n;
        (r / self.y.n, r % self.y.n, j)
    }

    #[inline]
    pub fn node(&self, idx: usize) -> Node {
        let (k, i, j) = self.split(idx);
        Node {
            eta: self.eta.value(j),
            y: self.y.value(i),
            t: self.t.value(k),
        }
    }

    /// Weight of every node on scale level `k` for `dη dy dt`.
    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        self.eta.step * self.y.step * self.t.value(k) * self.t.ratio.ln()
    }

    /// Weight of scale level `k` for `dt/t`.
    pub fn log_weight(&self) -> f64 {
        self.t.ratio.ln()
    }
}

/// `(ξ, x, s)` top of a tree (`ξ` ignored for strips).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Top {
    pub xi: f64,
    pub x: f64,
    pub s: f64,
}

fn check_scale(v: f64, what: &str) -> Result<()> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("{what} = {v} must be positive")));
    }
    Ok(())
}

/// `π_{(ξ,x,s)}(θ, ζ, σ) = (ξ + θ/(sσ), x + sζ, sσ)`.
pub fn coord_forward(top: Top, p: (f64, f64, f64)) -> Result<(f64, f64, f64)> {
    check_scale(top.s, "top scale")?;
    check_scale(p.2, "sigma")?;
    let (theta, zeta, sigma) = p;
    Ok((top.xi + theta / (top.s * sigma), top.x + top.s * zeta, top.s * sigma))
}

/// `π^{-1}_{(ξ,x,s)}(η, y, t) = (t(η − ξ), (y − x)/s, t/s)`.
pub fn coord_inverse(top: Top, node: (f64, f64, f64)) -> Result<(f64, f64, f64)> {
    check_scale(top.s, "top scale")?;
    check_scale(node.2, "t")?;
    Ok(coord_inverse_unchecked(top, node.0, node.1, node.2))
}

#[inline]
fn coord_inverse_unchecked(top: Top, eta: f64, y: f64, t: f64) -> (f64, f64, f64) {
    (t * (eta - top.xi), (y - top.x) / top.s, t / top.s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Full,
    In,
    Out,
}

/// Open interval `(lo, hi)`.
#[inline]
fn open_contains(iv: (f64, f64), v: f64) -> bool {
    iv.0 < v && v < iv.1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub top: Top,
    pub theta: (f64, f64),
    pub theta_in: (f64, f64),
}

impl Tree {
    pub fn new(top: Top, theta: (f64, f64), theta_in: (f64, f64)) -> Result<Self> {
        check_scale(top.s, "tree top scale")?;
        if !(theta.0 <= theta_in.0 && theta_in.0 < 0.0 && 0.0 < theta_in.1 && theta_in.1 <= theta.1) {
            return Err(Error::Config(format!(
                "need 0 ∈ Θ_in ⊂ Θ, got Θ = {theta:?}, Θ_in = {theta_in:?}"
            )));
        }
        Ok(Tree { top, theta, theta_in })
    }

    /// `μ(T) = s_T`.
    pub fn measure(&self) -> f64 {
        self.top.s
    }

    /// Membership of `(η, y, t)` in the tree, its inner part or its outer part.
    #[inline]
    pub fn contains(&self, eta: f64, y: f64, t: f64, region: Region) -> bool {
        if !(t > 0.0) {
            return false;
        }
        let (theta, zeta, sigma) = coord_inverse_unchecked(self.top, eta, y, t);
        if !(zeta.abs() < 1.0 - sigma) || !open_contains(self.theta, theta) {
            return false;
        }
        match region {
            Region::Full => true,
            Region::In => open_contains(self.theta_in, theta),
            Region::Out => !open_contains(self.theta_in, theta),
        }
    }

    /// Rows `(k, i)` of the grid meeting the tree with their η-index ranges (half-open).
    /// Outer parts contribute up to two ranges per row.
    pub fn rows(&self, grid: &TfsGrid, region: Region) -> Vec<RowRanges> {
        let mut out = Vec::new();
        for k in 0..grid.t.n {
            let t = grid.t.value(k);
            if t >= self.top.s {
                break;
            }
            for i in 0..grid.y.n {
                let y = grid.y.value(i);
                let zeta = (y - self.top.x) / self.top.s;
                if !(zeta.abs() < 1.0 - t / self.top.s) {
                    continue;
                }
                let mut ranges = [(0, 0); 2];
                let mut count = 0;
                let mut push = |r: (usize, usize)| {
                    if r.0 < r.1 {
                        ranges[count] = r;
                        count += 1;
                    }
                };
                match region {
                    Region::Full => push(self.eta_range(grid, t, y, self.theta, Region::Full)),
                    Region::In => push(self.eta_range(grid, t, y, self.theta_in, Region::In)),
                    Region::Out => {
                        let full = self.eta_range(grid, t, y, self.theta, Region::Full);
                        let inner = self.eta_range(grid, t, y, self.theta_in, Region::In);
                        if inner.0 >= inner.1 {
                            push(full);
                        } else {
                            push((full.0, inner.0.max(full.0)));
                            push((inner.1.min(full.1), full.1));
                        }
                    }
                }
                if count > 0 {
                    out.push(RowRanges { k, i, ranges, count });
                }
            }
        }
        out
    }

    /// Indices `j` with `t(η_j − ξ)` in the open interval `iv` and the node in `region`;
    /// boundary nodes are settled by the exact membership predicate.
    fn eta_range(&self, grid: &TfsGrid, t: f64, y: f64, iv: (f64, f64), region: Region) -> (usize, usize) {
        let n = grid.eta.n as isize;
        let lo_pos = grid.eta.position(self.top.xi + iv.0 / t).ceil() as isize - 1;
        let hi_pos = grid.eta.position(self.top.xi + iv.1 / t).floor() as isize + 1;
        let member = |j: isize| j >= 0 && j < n && self.contains(grid.eta.value(j as usize), y, t, region);
        let mut a = lo_pos.clamp(0, n);
        while a < n && a <= hi_pos && !member(a) {
            a += 1;
        }
        if a >= n || a > hi_pos {
            return (0, 0);
        }
        while a > 0 && member(a - 1) {
            a -= 1;
        }
        let mut b = hi_pos.clamp(a, n - 1);
        while b > a && !member(b) {
            b -= 1;
        }
        while b + 1 < n && member(b + 1) {
            b += 1;
        }
        (a as usize, b as usize + 1)
    }
}

/// η-index ranges of one `(k, i)` row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowRanges {
    pub k: usize,
    pub i: usize,
    ranges: [(usize, usize); 2],
    count: usize,
}

impl RowRanges {
    pub fn ranges(&self) -> &[(usize, usize)] {
        &self.ranges[..self.count]
    }
}

/// `D_{(x,s)} = {|y − x| < s − t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub x: f64,
    pub s: f64,
}

impl Strip {
    pub fn new(x: f64, s: f64) -> Result<Self> {
        check_scale(s, "strip top scale")?;
        Ok(Strip { x, s })
    }

    /// `ν(D) = s_D`.
    pub fn measure(&self) -> f64 {
        self.s
    }

    #[inline]
    pub fn contains(&self, y: f64, t: f64) -> bool {
        t > 0.0 && (y - self.x).abs() < self.s - t
    }
}

/// Finite collection of trees sharing `(Θ, Θ_in)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDictionary {
    pub theta: (f64, f64),
    pub theta_in: (f64, f64),
    pub trees: Vec<Tree>,
}

impl TreeDictionary {
    pub fn new(theta: (f64, f64), theta_in: (f64, f64), tops: Vec<Top>) -> Result<Self> {
        if tops.is_empty() {
            return Err(Error::Config("tree dictionary is empty".into()));
        }
        let trees = tops
            .into_iter()
            .map(|top| Tree::new(top, theta, theta_in))
            .collect::<Result<Vec<_>>>()?;
        Ok(TreeDictionary { theta, theta_in, trees })
    }

    /// Tops at every `eta_stride`-th η node and `y_stride`-th y node, for the dyadic
    /// scales `s_min·2^k ≤ s_max`.
    pub fn lattice(
        grid: &TfsGrid,
        theta: (f64, f64),
        theta_in: (f64, f64),
        eta_stride: usize,
        y_stride: usize,
        s_min: f64,
        s_max: f64,
    ) -> Result<Self> {
        if eta_stride == 0 || y_stride == 0 || !(s_min > 0.0) || !(s_max >= s_min) {
            return Err(Error::Config("invalid tree lattice parameters".into()));
        }
        let mut tops = Vec::new();
        let mut s = s_min;
        while s <= s_max * (1.0 + 1e-12) {
            for i in (0..grid.y.n).step_by(y_stride) {
                for j in (0..grid.eta.n).step_by(eta_stride) {
                    tops.push(Top {
                        xi: grid.eta.value(j),
                        x: grid.y.value(i),
                        s,
                    });
                }
            }
            s *= 2.0;
        }
        TreeDictionary::new(theta, theta_in, tops)
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn max_scale(&self) -> f64 {
        self.trees.iter().map(|t| t.top.s).fold(0.0, f64::max)
    }

    /// Fraction of grid nodes with `t < max s_T` lying in some dictionary tree.
    pub fn coverage(&self, grid: &TfsGrid) -> f64 {
        let smax = self.max_scale();
        let mut covered = vec![false; grid.len()];
        for tree in &self.trees {
            for row in tree.rows(grid, Region::Full) {
                for &(a, b) in row.ranges() {
                    for j in a..b {
                        covered[grid.index(row.k, row.i, j)] = true;
                    }
                }
            }
        }
        let (mut total, mut hit) = (0usize, 0usize);
        for idx in 0..grid.len() {
            if grid.node(idx).t < smax {
                total += 1;
                hit += covered[idx] as usize;
            }
        }
        if total == 0 {
            1.0
        } else {
            hit as f64 / total as f64
        }
    }
}

/// `X`-valued function on the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterField {
    grid: TfsGrid,
    space: NormedSpace,
    values: Vec<Complex64>,
}

impl OuterField {
    pub fn new(grid: TfsGrid, space: NormedSpace, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() * space.dim() {
            return Err(Error::Shape(format!(
                "field has {} values, grid and space need {}",
                values.len(),
                grid.len() * space.dim()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidValue("field contains non-finite values".into()));
        }
        Ok(OuterField { grid, space, values })
    }

    pub fn zeros(grid: TfsGrid, space: NormedSpace) -> Self {
        OuterField {
            grid,
            space,
            values: vec![Complex64::new(0.0, 0.0); grid.len() * space.dim()],
        }
    }

    /// Field from a per-node closure returning a `d`-vector.
    pub fn from_fn<F: FnMut(Node) -> Vec<Complex64>>(grid: TfsGrid, space: NormedSpace, mut f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * space.dim());
        for idx in 0..grid.len() {
            let v = f(grid.node(idx));
            if v.len() != space.dim() {
                return Err(Error::Shape(format!("node value of length {} in dimension {}", v.len(), space.dim())));
            }
            values.extend(v);
        }
        OuterField::new(grid, space, values)
    }

    pub fn grid(&self) -> &TfsGrid {
        &self.grid
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, idx: usize) -> &[Complex64] {
        let d = self.space.dim();
        &self.values[idx * d..(idx + 1) * d]
    }

    pub(crate) fn at_mut(&mut self, idx: usize) -> &mut [Complex64] {
        let d = self.space.dim();
        &mut self.values[idx * d..(idx + 1) * d]
    }

    /// `‖F(node)‖_X` for every node.
    pub fn magnitudes(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| self.space.norm_unchecked(self.at(i))).collect()
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        OuterField {
            grid: self.grid,
            space: self.space,
            values: self.values.iter().map(|v| v * lambda).collect(),
        }
    }

    /// `F + G` on a shared grid and space.
    pub fn add(&self, other: &OuterField) -> Result<Self> {
        if self.grid != other.grid || self.space != other.space {
            return Err(Error::Shape("fields live on different grids or spaces".into()));
        }
        Ok(OuterField {
            grid: self.grid,
            space: self.space,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    /// The field multiplied by the indicator of `keep`.
    pub fn masked<P: Fn(Node) -> bool>(&self, keep: P) -> Self {
        let mut out = self.clone();
        for idx in 0..self.grid.len() {
            if !keep(self.grid.node(idx)) {
                out.at_mut(idx).iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            }
        }
        out
    }

    /// The field multiplied by a per-node indicator.
    pub fn masked_by(&self, keep: &[bool]) -> Self {
        let mut out = self.clone();
        for (idx, &k) in keep.iter().enumerate().take(self.grid.len()) {
            if !k {
                out.at_mut(idx).iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// Multilinear interpolation in `(η, y, ln t)` with zero extension outside the grid.
    pub fn interpolate(&self, eta: f64, y: f64, t: f64) -> Vec<Complex64> {
        let d = self.space.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        if !(t > 0.0) {
            return out;
        }
        let g = &self.grid;
        let coords = [
            (g.t.position(t), g.t.n),
            (g.y.position(y), g.y.n),
            (g.eta.position(eta), g.eta.n),
        ];
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for (a, &(pos, n)) in coords.iter().enumerate() {
            if !(pos >= 0.0 && pos <= (n - 1) as f64) {
                return out;
            }
            let b = (pos.floor() as usize).min(n.saturating_sub(2));
            base[a] = b;
            frac[a] = pos - b as f64;
        }
        for corner in 0..8 {
            let bits = [(corner >> 2) & 1, (corner >> 1) & 1, corner & 1];
            let mut w = 1.0;
            let mut ix = [0usize; 3];
            for a in 0..3 {
                w *= if bits[a] == 1 { frac[a] } else { 1.0 - frac[a] };
                ix[a] = base[a] + bits[a];
            }
            if w == 0.0 || ix[0] >= g.t.n || ix[1] >= g.y.n || ix[2] >= g.eta.n {
                continue;
            }
            let v = self.at(g.index(ix[0], ix[1], ix[2]));
            for c in 0..d {
                out[c] += v[c] * w;
            }
        }
        out
    }
}

/// `(π*_T F)(θ, ζ, σ) = 1_{closure of model tree} e^{−2πi ξ_T(x_T + s_T ζ)} F(π_T(θ, ζ, σ))`,
/// with `F` read off the grid by [`OuterField::interpolate`].
pub fn pullback(tree: &Tree, field: &OuterField, p: (f64, f64, f64)) -> Result<Vec<Complex64>> {
    let (theta, zeta, sigma) = p;
    let d = field.space().dim();
    let inside = theta >= tree.theta.0 && theta <= tree.theta.1 && zeta.abs() <= 1.0 - sigma && sigma > 0.0;
    if !inside {
        return Ok(vec![Complex64::new(0.0, 0.0); d]);
    }
    let (eta, y, t) = coord_forward(tree.top, p)?;
    let phase = Complex64::from_polar(1.0, -std::f64::consts::TAU * tree.top.xi * (tree.top.x + tree.top.s * zeta));
    Ok(field.interpolate(eta, y, t).into_iter().map(|v| v * phase).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn small_grid() -> TfsGrid {
        TfsGrid::new(
            UniformAxis::spanning(-2.0, 2.0, 33).unwrap(),
            UniformAxis::spanning(-4.0, 4.0, 33).unwrap(),
            GeometricAxis::spanning(0.25, 4.0, 2f64.sqrt()).unwrap(),
        )
    }

    const THETA: (f64, f64) = (-0.25, 1.125);
    const THETA_IN: (f64, f64) = (-0.25, 0.99);

    #[test]
    fn axes() {
        let t = GeometricAxis::spanning(0.25, 4.0, 2.0).unwrap();
        assert_eq!(t.n, 5);
        assert_eq!(t.t_max(), 4.0);
        let u = UniformAxis::spanning(-1.0, 1.0, 5).unwrap();
        assert_eq!(u.value(4), 1.0);
        assert!(GeometricAxis::spanning(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn chart_examples() {
        let top = Top { xi: 0.7, x: -1.2, s: 3.0 };
        assert_eq!(coord_forward(top, (0.0, 0.0, 1.0)).unwrap(), (0.7, -1.2, 3.0));
        let id = Top { xi: 0.0, x: 0.0, s: 1.0 };
        assert_eq!(coord_forward(id, (0.3, -0.2, 0.5)).unwrap(), (0.6, -0.2, 0.5));
        assert_eq!(coord_inverse(top, (0.7, -1.2, 3.0)).unwrap(), (0.0, 0.0, 1.0));
        assert_eq!(coord_inverse(top, (0.1, 0.0, 1.7)).unwrap().2, 1.7 / 3.0);
        assert!(coord_inverse(top, (0.0, 0.0, 0.0)).is_err());
        assert!(coord_forward(Top { s: -1.0, ..top }, (0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn chart_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let top = Top {
                xi: rng.gen_range(-5.0..5.0),
                x: rng.gen_range(-5.0..5.0),
                s: rng.gen_range(0.1..10.0),
            };
            let p = (rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.01..2.0));
            let q = coord_inverse(top, coord_forward(top, p).unwrap()).unwrap();
            assert!((p.0 - q.0).abs() <= 1e-12 * (1.0 + p.0.abs()) * (1.0 + top.xi.abs() * top.s * p.2));
            assert!((p.1 - q.1).abs() <= 1e-12 * (1.0 + top.x.abs() / top.s));
            assert!((p.2 - q.2).abs() <= 1e-12 * p.2);
        }
    }

    #[test]
    fn tree_membership_examples() {
        let tree = Tree::new(Top { xi: 0.0, x: 0.0, s: 2.0 }, THETA, THETA_IN).unwrap();
        assert!(!tree.contains(0.0, 0.0, 2.0, Region::Full));
        assert!(tree.contains(0.0, 0.0, 1.0, Region::In));
        assert!(!tree.contains(0.0, 0.0, 1.0, Region::Out));
        assert!(tree.contains(1.05, 0.0, 1.0, Region::Out));
        assert!(!tree.contains(1.2, 0.0, 1.0, Region::Full));
        assert!(Tree::new(Top { xi: 0.0, x: 0.0, s: 1.0 }, (0.1, 1.0), (0.2, 0.5)).is_err());
    }

    #[test]
    fn rows_match_membership_and_partition() {
        let grid = small_grid();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let top = Top {
                xi: rng.gen_range(-2.0..2.0),
                x: rng.gen_range(-4.0..4.0),
                s: rng.gen_range(0.3..5.0),
            };
            let tree = Tree::new(top, THETA, THETA_IN).unwrap();
            let mut sets = Vec::new();
            for region in [Region::Full, Region::In, Region::Out] {
                let mut from_rows = vec![false; grid.len()];
                for row in tree.rows(&grid, region) {
                    for &(a, b) in row.ranges() {
                        for j in a..b {
                            from_rows[grid.index(row.k, row.i, j)] = true;
                        }
                    }
                }
                for idx in 0..grid.len() {
                    let n = grid.node(idx);
                    assert_eq!(from_rows[idx], tree.contains(n.eta, n.y, n.t, region));
                }
                sets.push(from_rows);
            }
            for idx in 0..grid.len() {
                assert_eq!(sets[0][idx], sets[1][idx] || sets[2][idx]);
                assert!(!(sets[1][idx] && sets[2][idx]));
            }
        }
    }

    #[test]
    fn translation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let top = Top { xi: 0.25, x: 0.5, s: 2.0 };
            let tree = Tree::new(top, THETA, THETA_IN).unwrap();
            let (eta, y, t) = (rng.gen_range(-1.0..2.0), rng.gen_range(-2.0..3.0), rng.gen_range(0.1..2.5));
            let (a, b) = (0.5, -1.0);
            let moved = Tree::new(Top { xi: top.xi + a, x: top.x + b, s: top.s }, THETA, THETA_IN).unwrap();
            for region in [Region::Full, Region::In, Region::Out] {
                assert_eq!(tree.contains(eta, y, t, region), moved.contains(eta + a, y + b, t, region));
            }
        }
    }

    #[test]
    fn strips() {
        let d = Strip::new(1.0, 0.5).unwrap();
        assert_eq!(d.measure(), 0.5);
        assert!(d.contains(1.0, 0.25));
        assert!(!d.contains(1.0, 0.5));
        assert!(!d.contains(1.0, 0.75));
        let tree = Tree::new(Top { xi: 0.0, x: 0.0, s: 2.0 }, THETA, THETA_IN).unwrap();
        assert_eq!(tree.measure(), 2.0);
    }

    #[test]
    fn strip_is_union_of_trees() {
        let grid = small_grid();
        let strip = Strip::new(0.5, 3.0).unwrap();
        let xis: Vec<f64> = (0..2000).map(|i| -6.0 + i as f64 * 0.006).collect();
        let trees: Vec<Tree> = xis
            .iter()
            .map(|&xi| Tree::new(Top { xi, x: 0.5, s: 3.0 }, THETA, THETA_IN).unwrap())
            .collect();
        for idx in 0..grid.len() {
            let n = grid.node(idx);
            let in_union = trees.iter().any(|t| t.contains(n.eta, n.y, n.t, Region::Full));
            assert_eq!(strip.contains(n.y, n.t), in_union, "{n:?}");
        }
    }

    #[test]
    fn measure_monotone_under_inclusion() {
        let grid = small_grid();
        let dict = TreeDictionary::lattice(&grid, THETA, THETA_IN, 8, 8, 0.5, 4.0).unwrap();
        let sets: Vec<Vec<usize>> = dict
            .trees
            .iter()
            .map(|t| {
                let mut v = Vec::new();
                for row in t.rows(&grid, Region::Full) {
                    for &(a, b) in row.ranges() {
                        v.extend((a..b).map(|j| grid.index(row.k, row.i, j)));
                    }
                }
                v.sort_unstable();
                v
            })
            .collect();
        for (a, sa) in sets.iter().enumerate() {
            for (b, sb) in sets.iter().enumerate() {
                if !sa.is_empty() && sa.iter().all(|x| sb.binary_search(x).is_ok()) {
                    assert!(dict.trees[a].measure() <= dict.trees[b].measure(), "{a} ⊆ {b}");
                }
            }
        }
        assert!(dict.coverage(&grid) > 0.0);
    }

    #[test]
    fn pullback_properties() {
        let grid = small_grid();
        let space = NormedSpace::new(2, 2.0).unwrap();
        let zero = OuterField::zeros(grid, space);
        let tree = Tree::new(Top { xi: 0.5, x: 0.25, s: 2.0 }, THETA, THETA_IN).unwrap();
        assert!(pullback(&tree, &zero, (0.1, 0.1, 0.5)).unwrap().iter().all(|z| z.norm() == 0.0));
        let f = OuterField::from_fn(grid, space, |n| {
            vec![Complex64::new(n.eta + n.y, n.t), Complex64::new(1.0, -n.y)]
        })
        .unwrap();
        let p = (0.3, -0.2, 0.5);
        let pb = pullback(&tree, &f, p).unwrap();
        let (eta, y, t) = coord_forward(tree.top, p).unwrap();
        let direct = f.interpolate(eta, y, t);
        for c in 0..2 {
            assert!((pb[c].norm() - direct[c].norm()).abs() < 1e-12);
        }
        // linear in η and y, so interpolation is exact in those directions
        assert!((direct[0].re - (eta + y)).abs() < 1e-12);
        assert!(pullback(&tree, &f, (2.0, 0.0, 0.5)).unwrap().iter().all(|z| z.norm() == 0.0));
        let trivial = Tree::new(Top { xi: 0.0, x: 0.0, s: 1.0 }, THETA, THETA_IN).unwrap();
        let node = grid.node(grid.index(1, 16, 17));
        let v = pullback(&trivial, &f, (node.t * node.eta, node.y, node.t)).unwrap();
        let expected = f.at(grid.index(1, 16, 17));
        for c in 0..2 {
            assert!((v[c] - expected[c]).norm() < 1e-12);
        }
    }
}
