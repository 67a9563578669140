//! Sinc waveform, per-pair received-signal synthesis and seeded complex AWGN.

use std::io::Write;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spa::{PairResponse, ResponseTerm};

/// Delay spread the time grid must cover on each side of the extreme delays, in units of `1/B`.
pub const COVER_PERIODS: f64 = 4.0;

/// Normalised sinc pulse `sin(pi B t) / (pi B t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waveform<T> {
    pub bandwidth: T,
}

impl<T: Scalar> Waveform<T> {
    pub fn new(bandwidth: T) -> Result<Self> {
        if !(bandwidth > T::zero() && bandwidth.is_finite()) {
            return Err(Error::Config(format!("bandwidth must be positive, got {bandwidth}")));
        }
        Ok(Self { bandwidth })
    }

    #[inline]
    pub fn eval(&self, t: T) -> T {
        waveform_eval(self.bandwidth, t)
    }

    /// Pulse energy `int s(t)^2 dt = 1/B`.
    pub fn energy(&self) -> T {
        self.bandwidth.recip()
    }
}

#[inline]
fn sinc_of_arg<T: Scalar>(x: T, sin_x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        let x2 = x * x;
        T::one() - x2 / T::lit(6.0) + x2 * x2 / T::lit(120.0)
    } else {
        sin_x / x
    }
}

pub fn waveform_eval<T: Scalar>(bandwidth: T, t: T) -> T {
    let x = T::PI() * bandwidth * t;
    sinc_of_arg(x, x.sin())
}

/// Uniform sampling instants `t0 + i dt`, `i < n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    pub t0: T,
    pub dt: T,
    pub n: usize,
}

impl<T: Scalar> TimeGrid<T> {
    pub fn new(t0: T, dt: T, n: usize) -> Result<Self> {
        if !(dt > T::zero() && dt.is_finite() && t0.is_finite()) || n == 0 {
            return Err(Error::Config(format!("invalid time grid t0={t0}, dt={dt}, n={n}")));
        }
        Ok(Self { t0, dt, n })
    }

    /// Grid with step `1/(oversample B)` spanning `[lo - margin/B, hi + margin/B]`,
    /// snapped to multiples of the step so that grids built for nearby spans line up.
    pub fn covering(lo: T, hi: T, waveform: &Waveform<T>, oversample: usize, margin_periods: T) -> Result<Self> {
        if oversample < 2 {
            return Err(Error::Config(format!("oversample must be >= 2, got {oversample}")));
        }
        if !(hi >= lo) {
            return Err(Error::Config("delay span is empty".into()));
        }
        let period = waveform.bandwidth.recip();
        let dt = period / T::from_usize_lossy(oversample);
        let start = ((lo - margin_periods * period) / dt).floor();
        let stop = ((hi + margin_periods * period) / dt).ceil();
        let n = (stop - start).to_usize().unwrap_or(0) + 1;
        Self::new(start * dt, dt, n)
    }

    #[inline]
    pub fn time(&self, i: usize) -> T {
        self.t0 + self.dt * T::from_usize_lossy(i)
    }

    pub fn end(&self) -> T {
        self.time(self.n - 1)
    }

    pub fn covers(&self, lo: T, hi: T, waveform: &Waveform<T>) -> bool {
        let pad = T::lit(COVER_PERIODS) / waveform.bandwidth;
        let slack = self.dt * T::lit(1e-6);
        self.t0 <= lo - pad + slack && self.end() >= hi + pad - slack
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec<T> {
    /// Complex noise variance per sample.
    pub variance: T,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal<T> {
    pub tx_index: usize,
    pub rx_index: usize,
    pub samples: Vec<Complex<T>>,
    pub t0: T,
    pub dt: T,
}

impl<T: Scalar> SampledSignal<T> {
    /// Rectangle-rule energy `sum |u|^2 dt`.
    pub fn energy(&self) -> T {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<T>() * self.dt
    }

    pub fn time(&self, i: usize) -> T {
        self.t0 + self.dt * T::from_usize_lossy(i)
    }
}

/// Adds `scale * amplitude * s(t_i - delay)` for every term onto `out`.
///
/// The sine is advanced by angle-addition and re-seeded every 64 samples.
pub fn accumulate_terms<T: Scalar>(
    terms: &[ResponseTerm<T>],
    waveform: &Waveform<T>,
    grid: &TimeGrid<T>,
    scale: Complex<T>,
    out: &mut [Complex<T>],
) {
    let w = T::PI() * waveform.bandwidth;
    let (sd, cd) = (w * grid.dt).sin_cos();
    for term in terms {
        let amp = term.amplitude * scale;
        for (block, chunk) in out[..grid.n].chunks_mut(64).enumerate() {
            let first = block * 64;
            let (mut s, mut c) = (w * (grid.time(first) - term.delay)).sin_cos();
            for (offset, slot) in chunk.iter_mut().enumerate() {
                let x = w * (grid.time(first + offset) - term.delay);
                *slot = *slot + amp * sinc_of_arg(x, s);
                let s_next = s * cd + c * sd;
                c = c * cd - s * sd;
                s = s_next;
            }
        }
    }
}

fn pair_stream(seed: u64, tx: usize, rx: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((tx as u64) << 32) | rx as u64);
    rng
}

/// Received signals `u = xi * sum_terms a s(t - tau) + w` for every pair response.
///
/// Noise for pair `(tx, rx)` is drawn from its own ChaCha stream, so the output does not
/// depend on evaluation order.
pub fn synthesize<T: Scalar>(
    responses: &[PairResponse<T>],
    waveform: &Waveform<T>,
    grid: &TimeGrid<T>,
    xi: Complex<T>,
    noise: Option<NoiseSpec<T>>,
) -> Result<Vec<SampledSignal<T>>> {
    if grid.dt * waveform.bandwidth > T::lit(0.5) {
        return Err(Error::Config("time step exceeds 1/(2B)".into()));
    }
    let delays = responses.iter().flat_map(|r| r.terms.iter().map(|t| t.delay));
    let (lo, hi) = delays.fold((T::infinity(), T::neg_infinity()), |(lo, hi), d| (lo.min(d), hi.max(d)));
    if lo.is_finite() && !grid.covers(lo, hi, waveform) {
        return Err(Error::Config(format!(
            "time grid [{}, {}] does not cover delays [{}, {}] with {} periods of margin",
            grid.t0,
            grid.end(),
            lo,
            hi,
            COVER_PERIODS
        )));
    }
    if let Some(ns) = noise {
        if !(ns.variance >= T::zero() && ns.variance.is_finite()) {
            return Err(Error::Config(format!("noise variance must be >= 0, got {}", ns.variance)));
        }
    }
    Ok(responses
        .par_iter()
        .map(|resp| {
            let mut samples = vec![Complex::new(T::zero(), T::zero()); grid.n];
            accumulate_terms(&resp.terms, waveform, grid, xi, &mut samples);
            if let Some(ns) = noise.filter(|ns| ns.variance > T::zero()) {
                let sigma = (ns.variance.as_f64() / 2.0).sqrt();
                let mut rng = pair_stream(ns.seed, resp.tx_index, resp.rx_index);
                for s in samples.iter_mut() {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    *s = *s + Complex::new(T::lit(sigma * re), T::lit(sigma * im));
                }
            }
            SampledSignal { tx_index: resp.tx_index, rx_index: resp.rx_index, samples, t0: grid.t0, dt: grid.dt }
        })
        .collect())
}

/// Writes `pair_tx,pair_rx,t,re,im` rows with round-trip precision.
pub fn write_signals_csv<T: Scalar, W: Write>(signals: &[SampledSignal<T>], mut out: W) -> std::io::Result<()> {
    writeln!(out, "pair_tx,pair_rx,t,re,im")?;
    for s in signals {
        for (i, v) in s.samples.iter().enumerate() {
            writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e}",
                s.tx_index,
                s.rx_index,
                s.time(i).as_f64(),
                v.re.as_f64(),
                v.im.as_f64()
            )?;
        }
    }
    Ok(())
}
