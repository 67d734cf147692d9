//! Seeded test-signal generators.
//!
//! Every generator produces samples whose tails at the grid edges are negligible
//! (below `1e-12 · max` for the documented parameter ranges), standing in for
//! Schwartz decay.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{dft, idft, Spectrum};
use crate::signal::{Grid, SampledSignal};
use crate::space::NormedSpace;

/// Envelope width of band-limited spectra as a fraction of the band; chosen so the
/// Gaussian envelope is below machine precision at the band edge.
const BAND_ENVELOPE_FRACTION: f64 = 1.0 / 8.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SignalKind {
    /// `exp(−(x−center)²/(2σ²))`.
    Gaussian { sigma: f64, center: f64 },
    /// Random combination of `bumps` translated copies of a Gaussian-windowed band of
    /// half-width `band`; spectrum vanishes identically outside `[−band, band]`.
    BandlimitedRandom { band: f64, bumps: usize },
    /// `exp(−x²/(2σ²)) e^{iπ rate x²}`.
    Chirp { rate: f64, sigma: f64 },
    /// `exp(−1/(1−u²)) e^{2πi freq x}` with `u = (x−center)/width`.
    ModulatedBump { freq: f64, width: f64, center: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// Smooth compactly supported bump `exp(−1/(1−u²))` on `(−1, 1)`.
#[inline]
pub fn unit_bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// Builds a signal; deterministic kinds ignore the seed. For `d > 1`, deterministic
/// kinds put the profile times `1/(i+1)` in coordinate `i`, random kinds draw each
/// coordinate independently.
pub fn make_signal(kind: &SignalKind, grid: Grid, space: NormedSpace, seed: u64) -> Result<SampledSignal> {
    let d = space.dim();
    let profile: Box<dyn Fn(f64) -> Complex64> = match *kind {
        SignalKind::Gaussian { sigma, center } => {
            positive("sigma", sigma)?;
            Box::new(move |x| Complex64::new((-(x - center).powi(2) / (2.0 * sigma * sigma)).exp(), 0.0))
        }
        SignalKind::Chirp { rate, sigma } => {
            positive("sigma", sigma)?;
            if !rate.is_finite() {
                return Err(Error::Config("chirp rate must be finite".into()));
            }
            if rate.abs() * grid.length() / 2.0 >= grid.nyquist() {
                return Err(Error::Config(format!(
                    "chirp rate {rate} reaches beyond Nyquist {} on this grid",
                    grid.nyquist()
                )));
            }
            Box::new(move |x| {
                Complex64::from_polar((-x * x / (2.0 * sigma * sigma)).exp(), std::f64::consts::PI * rate * x * x)
            })
        }
        SignalKind::ModulatedBump { freq, width, center } => {
            positive("width", width)?;
            if freq.abs() >= grid.nyquist() {
                return Err(Error::Config(format!("modulation {freq} exceeds Nyquist {}", grid.nyquist())));
            }
            Box::new(move |x| {
                Complex64::from_polar(unit_bump((x - center) / width), std::f64::consts::TAU * freq * x)
            })
        }
        SignalKind::BandlimitedRandom { band, bumps } => {
            return bandlimited_random(band, bumps, grid, space, seed);
        }
    };
    let mut values = Vec::with_capacity(grid.n * d);
    for k in 0..grid.n {
        let v = profile(grid.x(k));
        values.extend((0..d).map(|i| v / (i + 1) as f64));
    }
    SampledSignal::new(grid, space, values)
}

fn bandlimited_random(band: f64, bumps: usize, grid: Grid, space: NormedSpace, seed: u64) -> Result<SampledSignal> {
    positive("band", band)?;
    if band >= grid.nyquist() {
        return Err(Error::Config(format!(
            "band {band} must lie below the Nyquist frequency {}",
            grid.nyquist()
        )));
    }
    if bumps == 0 {
        return Err(Error::Config("bandlimited-random needs at least one bump".into()));
    }
    let d = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centre = grid.x0 + grid.length() / 2.0;
    let spread = grid.length() / 8.0;
    let sigma = band * BAND_ENVELOPE_FRACTION;
    // (coordinate, shift, amplitude)
    let mut atoms = Vec::with_capacity(d * bumps);
    for i in 0..d {
        for _ in 0..bumps {
            let shift = centre + rng.gen_range(-spread..spread);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            atoms.push((i, shift, Complex64::new(re, im) / (bumps as f64).sqrt()));
        }
    }
    let template = dft(&SampledSignal::zeros(grid, space));
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.n * d];
    for m in 0..grid.n {
        let xi = template.frequency(m);
        if xi.abs() > band {
            continue;
        }
        let env = (-xi * xi / (2.0 * sigma * sigma)).exp();
        for &(i, shift, amp) in &atoms {
            coeffs[m * d + i] += amp * Complex64::from_polar(env, -std::f64::consts::TAU * xi * shift);
        }
    }
    Ok(idft(&Spectrum::new(grid, space, coeffs)?))
}

/// Largest sample norm among the outermost `edge` samples on each side relative to the maximum.
pub fn tail_ratio(signal: &SampledSignal, edge: usize) -> f64 {
    let n = signal.n();
    let max = signal.max_abs();
    if max == 0.0 {
        return 0.0;
    }
    let tail = (0..edge.min(n))
        .chain(n.saturating_sub(edge)..n)
        .flat_map(|k| signal.sample(k).iter().map(|z| z.norm()))
        .fold(0.0, f64::max);
    tail / max
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_real_even_and_normalised() {
        let grid = Grid::centered(0.1, 256).unwrap();
        let s = make_signal(&SignalKind::Gaussian { sigma: 1.0, center: 0.0 }, grid, NormedSpace::scalar(), 0).unwrap();
        let k0 = grid.index_of(0.0).unwrap();
        assert_eq!(s.sample(k0)[0], Complex64::new(1.0, 0.0));
        for j in 1..100 {
            assert!((s.sample(k0 + j)[0] - s.sample(k0 - j)[0]).norm() < 1e-14);
            assert_eq!(s.sample(k0 + j)[0].im, 0.0);
        }
        assert!(tail_ratio(&s, 1) < 1e-12);
    }

    #[test]
    fn bandlimited_vanishes_outside_band() {
        let grid = Grid::centered(0.0625, 512).unwrap();
        let space = NormedSpace::new(2, 2.0).unwrap();
        let kind = SignalKind::BandlimitedRandom { band: 4.0, bumps: 3 };
        let s = make_signal(&kind, grid, space, 7).unwrap();
        let spec = dft(&s);
        let scale = spec.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..grid.n {
            if spec.frequency(i).abs() > 4.0 {
                assert!(spec.coeff(i).iter().all(|z| z.norm() <= 1e-13 * scale));
            }
        }
        assert!(tail_ratio(&s, 1) < 1e-12);
        assert_eq!(s, make_signal(&kind, grid, space, 7).unwrap());
        assert_ne!(s, make_signal(&kind, grid, space, 8).unwrap());
    }

    #[test]
    fn band_beyond_nyquist_rejected() {
        let grid = Grid::centered(0.125, 64).unwrap();
        let kind = SignalKind::BandlimitedRandom { band: 4.0, bumps: 1 };
        assert!(matches!(
            make_signal(&kind, grid, NormedSpace::scalar(), 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn chirp_and_bump_decay() {
        let grid = Grid::centered(0.05, 512).unwrap();
        let c = make_signal(&SignalKind::Chirp { rate: 0.5, sigma: 1.5 }, grid, NormedSpace::scalar(), 0).unwrap();
        assert!(tail_ratio(&c, 1) < 1e-12);
        let b = make_signal(
            &SignalKind::ModulatedBump { freq: 2.0, width: 3.0, center: 0.5 },
            grid,
            NormedSpace::new(3, 1.0).unwrap(),
            0,
        )
        .unwrap();
        assert_eq!(tail_ratio(&b, 10), 0.0);
        let k = grid.index_of(0.5).unwrap();
        assert!((b.sample(k)[2].norm() - (-1.0f64).exp() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn kinds_round_trip_through_json() {
        let kinds = [
            SignalKind::Gaussian { sigma: 1.0, center: 0.0 },
            SignalKind::BandlimitedRandom { band: 2.0, bumps: 4 },
            SignalKind::Chirp { rate: 0.5, sigma: 1.0 },
            SignalKind::ModulatedBump { freq: 1.0, width: 2.0, center: 0.0 },
        ];
        for k in kinds {
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(serde_json::from_str::<SignalKind>(&json).unwrap(), k);
        }
    }
}
