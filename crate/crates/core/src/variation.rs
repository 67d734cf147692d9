//! r-variation of discrete vector-valued paths.
//!
//! The supremum over increasing parameter sequences is taken over subsequences of the
//! sample points. `variation_norm` solves it exactly with an O(n²) dynamic program;
//! `variation_norm_bruteforce` enumerates every subsequence and serves as the oracle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::space::NormedSpace;

const BRUTEFORCE_MAX_LEN: usize = 20;

/// Ordered list of `d`-vectors `u(c_0), u(c_1), ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    space: NormedSpace,
    points: Vec<Complex64>,
}

impl Path {
    /// `points` is row-major with `space.dim()` entries per point.
    pub fn new(space: NormedSpace, points: Vec<Complex64>) -> Result<Self> {
        let d = space.dim();
        if points.is_empty() || points.len() % d != 0 {
            return Err(Error::Shape(format!(
                "path of {} scalars is not a nonempty list of {d}-vectors",
                points.len()
            )));
        }
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidValue("path contains non-finite values".into()));
        }
        Ok(Path { space, points })
    }

    /// Scalar path from real values.
    pub fn scalar(values: &[f64]) -> Result<Self> {
        Path::new(
            NormedSpace::scalar(),
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.space.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[Complex64] {
        let d = self.space.dim();
        &self.points[i * d..(i + 1) * d]
    }

    /// `‖u(c_j) − u(c_i)‖_X`.
    #[inline]
    pub fn increment(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.point(i), self.point(j));
        if a.len() == 1 {
            return (b[0] - a[0]).norm();
        }
        crate::space::lp_norm_real(
            a.iter().zip(b).map(|(x, y)| (y - x).norm()),
            self.space.p(),
        )
    }

    /// Restriction to the first `len` points.
    pub fn prefix(&self, len: usize) -> Path {
        let d = self.space.dim();
        Path {
            space: self.space,
            points: self.points[..len * d].to_vec(),
        }
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Path) -> Result<Path> {
        if self.space != other.space {
            return Err(Error::Shape("cannot concatenate paths in different spaces".into()));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Ok(Path {
            space: self.space,
            points,
        })
    }
}

fn check_r(r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::Domain(format!("variation exponent r = {r} must be >= 1")));
    }
    Ok(())
}

/// Optimal r-variation together with the maximizing subsequence of indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Variation {
    pub value: f64,
    pub witness: Vec<usize>,
}

/// Exact discrete `V^r` norm.
pub fn variation_norm(path: &Path, r: f64) -> Result<f64> {
    Ok(variation_with_witness(path, r)?.value)
}

/// Dynamic program `best[j] = max_{i<j} best[i] + ‖x_j − x_i‖^r`; ties go to the
/// smaller predecessor index.
pub fn variation_with_witness(path: &Path, r: f64) -> Result<Variation> {
    check_r(r)?;
    let n = path.len();
    if n == 0 {
        return Err(Error::Domain("variation of an empty path".into()));
    }
    let mut best = vec![0.0_f64; n];
    let mut pred = vec![usize::MAX; n];
    for j in 1..n {
        let mut bj = f64::NEG_INFINITY;
        let mut pj = 0;
        for i in 0..j {
            let cand = best[i] + path.increment(i, j).powf(r);
            if cand > bj {
                bj = cand;
                pj = i;
            }
        }
        best[j] = bj;
        pred[j] = pj;
    }
    let mut end = 0;
    for j in 1..n {
        if best[j] > best[end] {
            end = j;
        }
    }
    let mut witness = vec![end];
    let mut cur = end;
    while pred[cur] != usize::MAX {
        cur = pred[cur];
        witness.push(cur);
    }
    witness.reverse();
    Ok(Variation {
        value: best[end].powf(1.0 / r),
        witness,
    })
}

/// `V^r` norms of every suffix `(x_s, …, x_{n−1})`, via the backward program
/// `tail[i] = max(0, max_{j>i} ‖x_j − x_i‖^r + tail[j])` and suffix maxima.
pub fn suffix_variation_norms(path: &Path, r: f64) -> Result<Vec<f64>> {
    check_r(r)?;
    let n = path.len();
    if n == 0 {
        return Err(Error::Domain("variation of an empty path".into()));
    }
    let mut tail = vec![0.0_f64; n];
    for i in (0..n).rev() {
        for j in i + 1..n {
            tail[i] = tail[i].max(path.increment(i, j).powf(r) + tail[j]);
        }
    }
    let mut out = vec![0.0; n];
    let mut run = 0.0_f64;
    for s in (0..n).rev() {
        run = run.max(tail[s]);
        out[s] = run.powf(1.0 / r);
    }
    Ok(out)
}

/// Exhaustive maximum over all subsequences of length ≥ 2.
pub fn variation_norm_bruteforce(path: &Path, r: f64) -> Result<f64> {
    check_r(r)?;
    let n = path.len();
    if n > BRUTEFORCE_MAX_LEN {
        return Err(Error::CostGuard(format!(
            "brute force over 2^{n} subsequences exceeds the limit of length {BRUTEFORCE_MAX_LEN}"
        )));
    }
    let mut best = 0.0_f64;
    let mut idx = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        idx.clear();
        idx.extend((0..n).filter(|i| mask & (1 << i) != 0));
        let s: f64 = idx.windows(2).map(|w| path.increment(w[0], w[1]).powf(r)).sum();
        best = best.max(s);
    }
    Ok(best.powf(1.0 / r))
}

/// `sup_j ‖u(c_j)‖_X`.
pub fn linf_norm(path: &Path) -> f64 {
    (0..path.len())
        .map(|i| path.space.norm_unchecked(path.point(i)))
        .fold(0.0, f64::max)
}

/// Sum of `‖·‖^r` increments along a fixed index sequence, to the power `1/r`.
pub fn sequence_sum(path: &Path, indices: &[usize], r: f64) -> f64 {
    indices
        .windows(2)
        .map(|w| path.increment(w[0], w[1]).powf(r))
        .sum::<f64>()
        .powf(1.0 / r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_path_has_zero_variation() {
        let p = Path::scalar(&[2.0; 7]).unwrap();
        for r in [1.0, 2.0, 3.5] {
            assert_eq!(variation_norm(&p, r).unwrap(), 0.0);
        }
    }

    #[test]
    fn up_down_path() {
        let p = Path::scalar(&[0.0, 1.0, 0.0]).unwrap();
        let v = variation_with_witness(&p, 2.0).unwrap();
        assert!((v.value - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(v.witness, vec![0, 1, 2]);
    }

    #[test]
    fn bruteforce_examples() {
        let p = Path::scalar(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!((variation_norm_bruteforce(&p, 1.0).unwrap() - 3.0).abs() < 1e-15);
        let p = Path::scalar(&[-1.5, 2.0]).unwrap();
        assert!((variation_norm_bruteforce(&p, 2.7).unwrap() - 3.5).abs() < 1e-14);
        let long = Path::scalar(&[0.0; 21]).unwrap();
        assert!(matches!(variation_norm_bruteforce(&long, 2.0), Err(Error::CostGuard(_))));
    }

    #[test]
    fn rejects_small_r() {
        let p = Path::scalar(&[0.0, 1.0]).unwrap();
        assert!(matches!(variation_norm(&p, 0.5), Err(Error::Domain(_))));
        assert!(matches!(variation_norm_bruteforce(&p, 0.9), Err(Error::Domain(_))));
    }

    #[test]
    fn linf_examples() {
        let p = Path::scalar(&[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(linf_norm(&p), 1.0);
        let s = NormedSpace::new(2, 2.0).unwrap();
        let v = [Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)];
        let p = Path::new(s, [v, v].concat()).unwrap();
        assert!((linf_norm(&p) - 5.0).abs() < 1e-15);
    }

    fn random_path(rng: &mut ChaCha8Rng, space: NormedSpace, len: usize) -> Path {
        let pts = (0..len * space.dim())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Path::new(space, pts).unwrap()
    }

    #[test]
    fn linf_bounded_by_variation_with_zero_prefix() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let space = NormedSpace::new(3, 2.0).unwrap();
        for _ in 0..50 {
            let len = rng.gen_range(1..10);
            let p = random_path(&mut rng, space, len);
            let zero = Path::new(space, vec![Complex64::new(0.0, 0.0); 3]).unwrap();
            let with_zero = zero.concat(&p).unwrap();
            for r in [1.0, 2.0, 4.0] {
                let v = variation_norm(&with_zero, r).unwrap();
                assert!(linf_norm(&p) <= v + space.norm_unchecked(p.point(0)) + 1e-12);
            }
        }
    }

    #[test]
    fn dp_matches_bruteforce_on_random_scalar_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let len = rng.gen_range(1..=12);
            let vals: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = Path::scalar(&vals).unwrap();
            for r in [1.0, 2.0, 2.5, 4.0] {
                let a = variation_norm(&p, r).unwrap();
                let b = variation_norm_bruteforce(&p, r).unwrap();
                assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{a} vs {b}");
            }
        }
    }

    proptest! {
        #[test]
        fn v1_is_sum_of_increments(vals in proptest::collection::vec(-10.0f64..10.0, 1..30)) {
            let p = Path::scalar(&vals).unwrap();
            let direct: f64 = vals.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
            let v = variation_norm(&p, 1.0).unwrap();
            prop_assert!((v - direct).abs() <= 1e-12 * direct.max(1.0));
        }

        #[test]
        fn monotone_in_r(vals in proptest::collection::vec(-10.0f64..10.0, 1..25),
                         r1 in 1.0f64..5.0, dr in 0.0f64..3.0) {
            let p = Path::scalar(&vals).unwrap();
            let a = variation_norm(&p, r1).unwrap();
            let b = variation_norm(&p, r1 + dr).unwrap();
            prop_assert!(b <= a * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn restriction_monotone(vals in proptest::collection::vec(-10.0f64..10.0, 2..25),
                                cut in 1usize..24, r in 1.0f64..4.0) {
            let p = Path::scalar(&vals).unwrap();
            let cut = cut.min(vals.len());
            let sub = p.prefix(cut);
            prop_assert!(variation_norm(&sub, r).unwrap() <= variation_norm(&p, r).unwrap() * (1.0 + 1e-12));
        }

        #[test]
        fn witness_attains_value(vals in proptest::collection::vec(-10.0f64..10.0, 2..20), r in 1.0f64..4.0) {
            let p = Path::scalar(&vals).unwrap();
            let v = variation_with_witness(&p, r).unwrap();
            let s = sequence_sum(&p, &v.witness, r);
            prop_assert!((s - v.value).abs() <= 1e-12 * v.value.max(1.0));
        }
    }

    #[test]
    fn suffix_norms_match_direct() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for r in [1.0, 2.0, 3.5] {
            let vals: Vec<f64> = (0..15).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let path = Path::scalar(&vals).unwrap();
            let tails = suffix_variation_norms(&path, r).unwrap();
            for s in 0..vals.len() {
                let direct = variation_norm(&Path::scalar(&vals[s..]).unwrap(), r).unwrap();
                assert!((tails[s] - direct).abs() <= 1e-12 * direct.max(1.0));
            }
            assert_eq!(*tails.last().unwrap(), 0.0);
        }
    }
}
