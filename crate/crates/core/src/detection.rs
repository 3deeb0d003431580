//! Heterodyne detection chain: square-law detector power and the gated
//! spectrum-analyzer readout.
//!
//! The detector sees, in the frame of the control carrier, three components:
//! the reflected control beam itself (the local oscillator, reflection
//! coefficient -1 far off cavity resonance), the promptly reflected lower
//! modulation sideband, and the cavity-processed upper sideband. With Ω =
//! 2π·beat_freq the total field is
//!
//! ```text
//! F(t) = -s_lo(t) + P_in(t)·e^{+iΩt} + s_out(t)·e^{-iΩt}
//! ```
//!
//! and the detected power is |F(t)|². Keeping the lower-sideband term is
//! essential: for pure phase modulation with no cavity interaction the two
//! sideband beats cancel, so no power appears at Ω (the null every
//! measurement of this kind is calibrated against).
//!
//! The spectrum analyzer is emulated as: flat gate of `gate_length` with
//! raised-cosine edges of 0.6/rbw **outside** the gate (the response time of
//! a 1 MHz resolution filter), window-weighted mean removal, zero-padded
//! FFT, one-sided power spectral density normalized by Σw², and convolution
//! with a Gaussian of FWHM = rbw.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::float::{of, Real};
use crate::pulse::PulseSequence;
use crate::dynamics::Trajectory;

/// Default gate length (s).
pub const DEFAULT_GATE_LENGTH: f64 = 3.0e-6;
/// Default resolution bandwidth (Hz).
pub const DEFAULT_RBW: f64 = 1.0e6;
/// Default analysis span around the center frequency (Hz).
pub const DEFAULT_SPAN: f64 = 4.0e6;
/// Gate edge (taper) length in units of 1/rbw.
const TAPER_PER_RBW: f64 = 0.6;

/// Input-output relation at one instant: `-s_in + √(2π·kappa_ex)·alpha`
/// with `kappa_ex` in Hz. `alpha = 0` gives full off-resonant reflection.
pub fn output_field<T: Real>(
    alpha: Complex<T>,
    s_in: Complex<T>,
    kappa_ex: T,
) -> Complex<T> {
    -s_in + alpha * (T::TAU() * kappa_ex).sqrt()
}

/// Detected power series on the trajectory grid (photons/s).
#[derive(Debug, Clone, PartialEq)]
pub struct BeatSeries<T> {
    pub t0: T,
    pub dt: T,
    pub power: Vec<T>,
    /// Reference time gate delays are measured from (the writing-pulse
    /// rising edge).
    pub t_ref: T,
}

impl<T: Real> BeatSeries<T> {
    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn time(&self, j: usize) -> T {
        self.t0 + self.dt * of::<T>(j as f64)
    }

    pub fn t_end(&self) -> T {
        self.time(self.len().saturating_sub(1))
    }
}

/// Square-law detector power |F(t)|² with the explicit carrier beat, using
/// the trajectory's own LO waveform and beat frequency. `seq` supplies the
/// writing-pulse rising edge that gate delays are measured from.
pub fn heterodyne_beat<T: Real>(traj: &Trajectory<T>, seq: &PulseSequence<T>) -> BeatSeries<T> {
    let t_ref = seq.writing().map_or(T::zero(), |w| w.t_start);
    heterodyne_beat_with(traj, &traj.lo, traj.beat_freq, t_ref)
}

/// Same as [`heterodyne_beat`] with an explicit LO waveform (sampled on the
/// trajectory grid), beat frequency (Hz) and delay reference time.
pub fn heterodyne_beat_with<T: Real>(
    traj: &Trajectory<T>,
    lo: &[Complex<T>],
    beat_freq: T,
    t_ref: T,
) -> BeatSeries<T> {
    assert_eq!(lo.len(), traj.len(), "LO waveform must be sampled on the trajectory grid");
    let w = T::TAU() * beat_freq * traj.dt;
    let power = (0..traj.len())
        .map(|j| {
            let phase = w * of::<T>(j as f64) + T::TAU() * beat_freq * traj.t0;
            let (s, c) = phase.sin_cos();
            let e_plus = Complex::new(c, s);
            let f = -lo[j] + traj.p_in[j] * e_plus + traj.s_out[j] * e_plus.conj();
            f.norm_sqr()
        })
        .collect();
    BeatSeries { t0: traj.t0, dt: traj.dt, power, t_ref }
}

/// Spectrum-analyzer settings for one gated acquisition. `gate_delay` is
/// measured from the writing-pulse rising edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConfig<T> {
    pub gate_delay: T,
    /// Flat gate length (s).
    pub gate_length: T,
    /// Resolution bandwidth: FWHM of the Gaussian frequency filter (Hz).
    pub rbw: T,
    /// Analysis center frequency (Hz), near the beat frequency.
    pub center_freq: T,
    /// Analysis span (Hz); the returned spectrum covers center ± span/2.
    pub span: T,
}

impl<T: Real> GateConfig<T> {
    /// Gate at `gate_delay` with the default 3 µs length, 1 MHz RBW and
    /// 4 MHz span around `center_freq`.
    pub fn around(center_freq: T, gate_delay: T) -> Self {
        GateConfig {
            gate_delay,
            gate_length: of(DEFAULT_GATE_LENGTH),
            rbw: of(DEFAULT_RBW),
            center_freq,
            span: of(DEFAULT_SPAN),
        }
    }

    pub fn with_gate_length(mut self, gate_length: T) -> Self {
        self.gate_length = gate_length;
        self
    }

    pub fn with_rbw(mut self, rbw: T) -> Self {
        self.rbw = rbw;
        self
    }

    pub fn with_span(mut self, span: T) -> Self {
        self.span = span;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.gate_length > T::zero()
            && self.rbw > T::zero()
            && self.span > T::zero()
            && self.center_freq >= T::zero()
            && self.gate_delay.is_finite()
            && self.gate_length.is_finite()
            && self.rbw.is_finite()
            && self.span.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "gate must satisfy gate_length > 0, rbw > 0, span > 0, center_freq >= 0 \
                 (got delay = {}, length = {}, rbw = {}, center = {}, span = {})",
                self.gate_delay, self.gate_length, self.rbw, self.center_freq, self.span
            )))
        }
    }

    /// Taper (edge) length added outside the flat gate.
    fn taper(&self) -> T {
        of::<T>(TAPER_PER_RBW) / self.rbw
    }
}

/// One-sided power spectral density over the analysis span, on uniform bins
/// `f_j = f0 + j·df` with `df ≤ rbw/4`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum<T> {
    pub f0: T,
    pub df: T,
    /// Spectral density per bin ((photons/s)²/Hz), non-negative.
    pub density: Vec<T>,
    /// The gate delay this spectrum was acquired at (s).
    pub gate_delay: T,
}

impl<T: Real> PowerSpectrum<T> {
    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    pub fn freq(&self, j: usize) -> T {
        self.f0 + self.df * of::<T>(j as f64)
    }

    /// Peak frequency, refined by parabolic interpolation through the three
    /// bins around the maximum.
    pub fn peak_frequency(&self) -> T {
        let mut k = 0usize;
        for (j, v) in self.density.iter().enumerate() {
            if *v > self.density[k] {
                k = j;
            }
        }
        if k == 0 || k + 1 >= self.len() {
            return self.freq(k);
        }
        let (ym, y0, yp) = (self.density[k - 1], self.density[k], self.density[k + 1]);
        let denom = ym - of::<T>(2.0) * y0 + yp;
        let shift = if denom.abs() > T::zero() {
            of::<T>(0.5) * (ym - yp) / denom
        } else {
            T::zero()
        };
        self.freq(k) + shift * self.df
    }
}

/// Σ density·df over the span: the spectrally-integrated power
/// ((photons/s)²).
pub fn spectrally_integrated_power<T: Real>(spec: &PowerSpectrum<T>) -> T {
    spec.density.iter().copied().sum::<T>() * spec.df
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Gate window value at offset `s` from the flat-gate start: 1 on
/// [0, length], raised-cosine over `taper` on both outsides.
fn gate_window<T: Real>(s: T, length: T, taper: T) -> T {
    let half = of::<T>(0.5);
    if s >= T::zero() && s <= length {
        T::one()
    } else if s > -taper && s < T::zero() {
        half * (T::one() + (T::PI() * (-s) / taper).cos())
    } else if s > length && s < length + taper {
        half * (T::one() + (T::PI() * (s - length) / taper).cos())
    } else {
        T::zero()
    }
}

/// Gated, resolution-filtered power spectrum of the detected beat.
///
/// Pipeline: apply the tapered gate window, remove the window-weighted mean
/// (the large LO power pedestal), FFT with zero padding so the bin spacing
/// is at most rbw/4, normalize to a one-sided PSD by Σw², then convolve with
/// a unit-area Gaussian of FWHM = rbw and return the bins within
/// center ± span/2.
pub fn gated_power_spectrum<T: Real>(
    beat: &BeatSeries<T>,
    gate: &GateConfig<T>,
) -> Result<PowerSpectrum<T>> {
    gate.validate()?;
    if beat.len() < 2 {
        return Err(Error::Domain("beat series too short to gate".to_string()));
    }
    let a = beat.t_ref + gate.gate_delay;
    let b = a + gate.gate_length;
    if a < beat.t0 || b > beat.t_end() {
        return Err(Error::Domain(format!(
            "gate [{}, {}] s outside the recorded span [{}, {}] s",
            a,
            b,
            beat.t0,
            beat.t_end()
        )));
    }
    let fs = T::one() / beat.dt;
    let needed = gate.center_freq + gate.span * of(0.5) + of::<T>(3.0) * gate.rbw;
    if needed > fs * of(0.5) {
        return Err(Error::Domain(format!(
            "sample rate {} Hz cannot resolve the analysis band up to {} Hz; \
             integrate with a finer step",
            fs, needed
        )));
    }

    // Window sample range, tapers clipped to the series.
    let taper = gate.taper();
    let j0 = (((a - taper) - beat.t0) / beat.dt).ceil().max(T::zero()).approx_f64() as usize;
    let j1_f = (((b + taper) - beat.t0) / beat.dt).floor().approx_f64() as usize;
    let j1 = j1_f.min(beat.len() - 1);
    if j0 >= j1 {
        return Err(Error::Domain("gate window contains no samples".to_string()));
    }
    let n_win = j1 - j0 + 1;

    let mut w = Vec::with_capacity(n_win);
    let mut w_sum = T::zero();
    let mut w_sq_sum = T::zero();
    let mut pw_sum = T::zero();
    for j in j0..=j1 {
        let s = beat.time(j) - a;
        let wj = gate_window(s, gate.gate_length, taper);
        w_sum += wj;
        w_sq_sum += wj * wj;
        pw_sum += beat.power[j] * wj;
        w.push(wj);
    }
    if !(w_sum > T::zero()) {
        return Err(Error::Domain("gate window has zero weight".to_string()));
    }
    let mean = pw_sum / w_sum;

    // Zero-padded FFT length: enough bins for rbw/4 spacing.
    let min_bins = (of::<T>(4.0) * fs / gate.rbw).ceil().approx_f64() as usize;
    let n_fft = next_pow2(n_win.max(min_bins).max(16));
    let mut buf: Vec<Complex<T>> = Vec::with_capacity(n_fft);
    for (k, j) in (j0..=j1).enumerate() {
        buf.push(Complex::new((beat.power[j] - mean) * w[k], T::zero()));
    }
    buf.resize(n_fft, Complex::new(T::zero(), T::zero()));
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);

    // One-sided PSD normalized so that ∫S df = Σ((P-mean)·w)²/Σw².
    let df = fs / of::<T>(n_fft as f64);
    let half_n = n_fft / 2;
    let scale = beat.dt / w_sq_sum;
    let two = of::<T>(2.0);
    let mut psd = Vec::with_capacity(half_n + 1);
    for (k, y) in buf.iter().take(half_n + 1).enumerate() {
        let one_sided = if k == 0 || k == half_n { T::one() } else { two };
        psd.push(one_sided * scale * y.norm_sqr());
    }

    // Gaussian resolution filter, FWHM = rbw, truncated at 4σ and
    // renormalized per point so a flat spectrum stays flat at the edges.
    let sigma_bins = (gate.rbw / (of::<T>(8.0) * of::<T>(2.0).ln()).sqrt()) / df;
    let radius = (of::<T>(4.0) * sigma_bins).ceil().approx_f64() as usize;
    let kernel: Vec<T> = (0..=radius)
        .map(|m| {
            let z = of::<T>(m as f64) / sigma_bins;
            (-z * z * of::<T>(0.5)).exp()
        })
        .collect();

    // Slice to the analysis span before smoothing; smooth from the raw PSD.
    let f_lo = gate.center_freq - gate.span * of(0.5);
    let f_hi = gate.center_freq + gate.span * of(0.5);
    let k_lo = (f_lo / df).ceil().max(T::zero()).approx_f64() as usize;
    let k_hi = ((f_hi / df).floor().approx_f64() as usize).min(half_n);
    if k_lo > k_hi {
        return Err(Error::Domain(format!(
            "analysis span [{f_lo}, {f_hi}] Hz contains no spectral bins (df = {df} Hz)"
        )));
    }
    let mut density = Vec::with_capacity(k_hi - k_lo + 1);
    for k in k_lo..=k_hi {
        let mut acc = psd[k] * kernel[0];
        let mut norm = kernel[0];
        for m in 1..=radius {
            if k >= m {
                acc += psd[k - m] * kernel[m];
                norm += kernel[m];
            }
            if k + m <= half_n {
                acc += psd[k + m] * kernel[m];
                norm += kernel[m];
            }
        }
        density.push(acc / norm);
    }

    Ok(PowerSpectrum {
        f0: df * of::<T>(k_lo as f64),
        df,
        density,
        gate_delay: gate.gate_delay,
    })
}
