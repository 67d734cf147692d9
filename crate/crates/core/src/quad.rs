//! Gauss–Legendre rules mapped onto arbitrary intervals.

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Rule {
    pairs: Vec<(f64, f64)>,
}

impl Rule {
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        let gl = GaussLegendre::new(n)
            .map_err(|_| Error::Config(format!("Gauss–Legendre rule needs at least 2 nodes, got {n}")))?;
        let mut pairs = gl.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Rule { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Nodes and weights on `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.pairs.iter().map(move |&(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// `panels` equal copies of the rule across `[a, b]`.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / panels as f64;
        (0..panels)
            .flat_map(|i| {
                let lo = a + i as f64 * h;
                self.on(lo, lo + h).collect::<Vec<_>>()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_and_smooth_functions() {
        let r = Rule::gauss_legendre(8).unwrap();
        assert!((r.integrate(0.0, 2.0, |x| x.powi(7)) - 32.0).abs() < 1e-12);
        let c = r.composite(0.0, std::f64::consts::PI, 4);
        let s: f64 = c.iter().map(|&(x, w)| w * x.sin()).sum();
        assert!((s - 2.0).abs() < 1e-13);
        assert!(Rule::gauss_legendre(1).is_err());
    }
}
