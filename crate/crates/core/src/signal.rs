//! Vector-valued signals on a uniform spatial grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::space::NormedSpace;

/// Uniform sample grid `x_k = x0 + k dx`, `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x0: f64, dx: f64, n: usize) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() || !x0.is_finite() {
            return Err(Error::Config(format!("grid needs finite x0 and dx > 0, got x0={x0}, dx={dx}")));
        }
        if n < 2 {
            return Err(Error::Config(format!("grid needs at least 2 samples, got {n}")));
        }
        Ok(Grid { x0, dx, n })
    }

    /// Grid of `n` samples centred so that `x = 0` is sample `n / 2`.
    pub fn centered(dx: f64, n: usize) -> Result<Self> {
        Grid::new(-((n / 2) as f64) * dx, dx, n)
    }

    #[inline]
    pub fn x(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn length(&self) -> f64 {
        self.n as f64 * self.dx
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.dx
    }

    /// Spacing of the discrete frequency grid.
    pub fn dxi(&self) -> f64 {
        1.0 / self.length()
    }

    /// Index of the sample nearest to `x`, if inside the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let k = ((x - self.x0) / self.dx).round();
        if k >= 0.0 && (k as usize) < self.n {
            Some(k as usize)
        } else {
            None
        }
    }

    pub fn compatible(&self, other: &Grid) -> bool {
        self.n == other.n && self.x0 == other.x0 && self.dx == other.dx
    }
}

/// `n × d` complex samples of an `X`-valued function.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    grid: Grid,
    space: NormedSpace,
    values: Vec<Complex64>,
}

impl SampledSignal {
    /// `values` is row-major: sample `k`, coordinate `i` lives at `k * d + i`.
    pub fn new(grid: Grid, space: NormedSpace, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n * space.dim() {
            return Err(Error::Shape(format!(
                "{} values for a {} x {} signal",
                values.len(),
                grid.n,
                space.dim()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidValue("signal contains non-finite samples".into()));
        }
        Ok(SampledSignal { grid, space, values })
    }

    pub fn zeros(grid: Grid, space: NormedSpace) -> Self {
        SampledSignal {
            grid,
            space,
            values: vec![Complex64::new(0.0, 0.0); grid.n * space.dim()],
        }
    }

    /// Scalar signal from a closure.
    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Grid, f: F) -> Self {
        let values = (0..grid.n).map(|k| f(grid.x(k))).collect();
        SampledSignal {
            grid,
            space: NormedSpace::scalar(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The `d`-vector at sample `k`.
    #[inline]
    pub fn sample(&self, k: usize) -> &[Complex64] {
        let d = self.dim();
        &self.values[k * d..(k + 1) * d]
    }

    /// Samples of coordinate `i` as a contiguous vector.
    pub fn coordinate(&self, i: usize) -> Vec<Complex64> {
        let d = self.dim();
        (0..self.n()).map(|k| self.values[k * d + i]).collect()
    }

    pub fn with_space(mut self, space: NormedSpace) -> Result<Self> {
        if space.dim() != self.dim() {
            return Err(Error::Shape("space dimension differs from signal dimension".into()));
        }
        self.space = space;
        Ok(self)
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|z| *z *= lambda);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `(Σ_k ‖f(x_k)‖_X^p dx)^{1/p}` with the signal's own space norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let norms = (0..self.n()).map(|k| self.space.norm_unchecked(self.sample(k)));
        if p.is_infinite() {
            norms.fold(0.0, f64::max)
        } else {
            (norms.map(|v| v.powf(p)).sum::<f64>() * self.grid.dx).powf(1.0 / p)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

/// Finitely supported sequence `(g_j)` of signals sharing one grid and space.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSignal {
    entries: Vec<SampledSignal>,
}

impl SequenceSignal {
    pub fn new(entries: Vec<SampledSignal>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::Shape("a sequence signal needs at least one entry".into()));
        };
        for e in &entries[1..] {
            if !e.grid().compatible(first.grid()) || e.space() != first.space() {
                return Err(Error::Shape("sequence entries must share grid and space".into()));
            }
        }
        Ok(SequenceSignal { entries })
    }

    pub fn entries(&self) -> &[SampledSignal] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        self.entries[0].grid()
    }

    pub fn space(&self) -> &NormedSpace {
        self.entries[0].space()
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        SequenceSignal {
            entries: self.entries.iter().map(|e| e.scale(lambda)).collect(),
        }
    }

    /// `(Σ_k (Σ_j ‖g_j(x_k)‖^r)^{p/r} dx)^{1/p}`.
    pub fn lp_lr_norm(&self, p: f64, r: f64) -> f64 {
        let grid = self.grid();
        let space = self.space();
        let pointwise = (0..grid.n).map(|k| {
            crate::space::lp_norm_real(
                self.entries.iter().map(|e| space.norm_unchecked(e.sample(k))),
                r,
            )
        });
        if p.is_infinite() {
            pointwise.fold(0.0, f64::max)
        } else {
            (pointwise.map(|v| v.powf(p)).sum::<f64>() * grid.dx).powf(1.0 / p)
        }
    }
}

/// Per-sample nondecreasing frequency sequences `(c_j(x_k))_{j=0..=J}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySelection {
    levels: Vec<Vec<f64>>,
}

impl FrequencySelection {
    pub fn new(levels: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = levels.first() else {
            return Err(Error::Shape("selection needs at least one sample".into()));
        };
        let len = first.len();
        if len < 2 {
            return Err(Error::Shape("selection needs at least two levels per sample".into()));
        }
        for (k, seq) in levels.iter().enumerate() {
            if seq.len() != len {
                return Err(Error::Shape(format!("sample {k} has {} levels, expected {len}", seq.len())));
            }
            if seq.iter().any(|c| c.is_nan()) {
                return Err(Error::InvalidValue(format!("sample {k} has a NaN level")));
            }
            if let Some(j) = seq.windows(2).position(|w| w[0] > w[1]) {
                return Err(Error::InvalidValue(format!(
                    "selection decreases at sample {k}, level {j}: {} > {}",
                    seq[j],
                    seq[j + 1]
                )));
            }
        }
        Ok(FrequencySelection { levels })
    }

    /// The same sequence at every one of `n` samples.
    pub fn constant(n: usize, seq: Vec<f64>) -> Result<Self> {
        FrequencySelection::new(vec![seq; n])
    }

    pub fn samples(&self) -> usize {
        self.levels.len()
    }

    /// Number of intervals `J` (levels minus one).
    pub fn intervals(&self) -> usize {
        self.levels[0].len() - 1
    }

    pub fn at(&self, k: usize) -> &[f64] {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// `(c_j(x_k), c_{j+1}(x_k))`.
    #[inline]
    pub fn interval(&self, k: usize, j: usize) -> (f64, f64) {
        (self.levels[k][j], self.levels[k][j + 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 0.0, 8).is_err());
        assert!(Grid::new(0.0, 0.1, 1).is_err());
        let g = Grid::centered(0.5, 8).unwrap();
        assert_eq!(g.x(4), 0.0);
        assert_eq!(g.index_of(0.0), Some(4));
        assert_eq!(g.index_of(100.0), None);
    }

    #[test]
    fn selection_rejects_decreasing_pair() {
        assert!(FrequencySelection::new(vec![vec![0.0, 1.0], vec![1.0, 0.5]]).is_err());
        assert!(FrequencySelection::new(vec![vec![0.0, 0.0, 2.0]]).is_ok());
        assert!(FrequencySelection::new(vec![vec![0.0]]).is_err());
        assert!(FrequencySelection::new(vec![vec![0.0, 1.0], vec![0.0, 1.0, 2.0]]).is_err());
    }

    #[test]
    fn sequence_requires_shared_grid() {
        let g1 = Grid::centered(0.5, 8).unwrap();
        let g2 = Grid::centered(0.25, 8).unwrap();
        let a = SampledSignal::zeros(g1, NormedSpace::scalar());
        let b = SampledSignal::zeros(g2, NormedSpace::scalar());
        assert!(SequenceSignal::new(vec![a.clone(), b]).is_err());
        assert!(SequenceSignal::new(vec![a.clone(), a]).is_ok());
        assert!(SequenceSignal::new(vec![]).is_err());
    }

    #[test]
    fn signal_shape_checked() {
        let g = Grid::centered(0.5, 4).unwrap();
        let s = NormedSpace::new(2, 2.0).unwrap();
        assert!(SampledSignal::new(g, s, vec![Complex64::new(0.0, 0.0); 7]).is_err());
        assert!(SampledSignal::new(g, s, vec![Complex64::new(f64::INFINITY, 0.0); 8]).is_err());
    }
}
