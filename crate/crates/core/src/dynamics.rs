//! Coupled-mode time evolution and input-output bookkeeping.
//!
//! State is the pair (α, β): intracavity field and mechanical amplitude,
//! normalized so |α|² is the intracavity photon number and |β|² the phonon
//! number. In the frame rotating with the drive's upper modulation sideband
//! the linearized equations of motion are
//!
//! ```text
//! dα/dt = -(i·2π·f_cavity_offset + κ/2)·α - i·G(t)·β + √κ_ex·P_in(t)
//! dβ/dt = -(i·d_m       + γ_m/2)·β - i·G(t)·α,   d_m = -2π·detuning
//! ```
//!
//! with κ, γ_m, G, κ_ex angular here (the public structs carry /2π values in
//! Hz and this module converts). `P_in` is the incident signal flux amplitude
//! in √(photons/s); the reflected field follows the input-output relation
//! `s_out = -P_in + √κ_ex·α`.
//!
//! Integration is classical RK4 on a uniform record grid, with each step
//! split at envelope breakpoints so no stage ever straddles a corner of a
//! pulse; within one sub-step the envelope branch is chosen at the midpoint
//! and its closed form is used at all stage times. This keeps fourth-order
//! accuracy through rectangular pulse edges.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::float::{of, Real};
use crate::model::{DriveConfig, ResonatorParams};
use crate::pulse::{Branch, PulseSequence};

/// Hard cap on record samples per run (memory guard).
pub const MAX_SAMPLES: usize = 1 << 24;

/// Automatic step rule: at least this many steps per radian of the fastest
/// angular rate in the problem.
const STEPS_PER_RADIAN: f64 = 50.0;

/// Instantaneous (α, β) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState<T> {
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
}

impl<T: Real> ModeState<T> {
    pub fn new(alpha: Complex<T>, beta: Complex<T>) -> Self {
        ModeState { alpha, beta }
    }

    /// Both modes empty.
    pub fn vacuum() -> Self {
        ModeState { alpha: Complex::new(T::zero(), T::zero()), beta: Complex::new(T::zero(), T::zero()) }
    }

    /// One photon-equivalent amplitude in the cavity, mechanics at rest.
    /// Starting point for transfer-efficiency runs that bypass the input
    /// coupler.
    pub fn cavity_loaded() -> Self {
        ModeState { alpha: Complex::new(T::one(), T::zero()), beta: Complex::new(T::zero(), T::zero()) }
    }

    /// √(|α|² + |β|²).
    pub fn norm(&self) -> T {
        (self.alpha.norm_sqr() + self.beta.norm_sqr()).sqrt()
    }
}

/// Step-size selection for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize<T> {
    /// Derive the step from the fastest rate among κ, max G, |detuning| and
    /// |f_cavity_offset|.
    Auto,
    /// Requested record step (s); rounded down so the grid ends exactly at
    /// `t_end`.
    Fixed(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    /// End of the run (s); the grid starts at 0.
    pub t_end: T,
    pub step: StepSize<T>,
    pub initial: ModeState<T>,
}

impl<T: Real> IntegratorConfig<T> {
    pub fn to(t_end: T) -> Self {
        IntegratorConfig { t_end, step: StepSize::Auto, initial: ModeState::vacuum() }
    }

    pub fn with_step(mut self, dt: T) -> Self {
        self.step = StepSize::Fixed(dt);
        self
    }

    pub fn with_initial(mut self, state: ModeState<T>) -> Self {
        self.initial = state;
        self
    }
}

/// Time series produced by [`integrate`], stored column-wise on the uniform
/// grid `t_j = t0 + j·dt`, `j = 0..len`. Rates and frequencies are /2π (Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub t0: T,
    pub dt: T,
    /// Intracavity field (√photons).
    pub alpha: Vec<Complex<T>>,
    /// Mechanical amplitude (√phonons).
    pub beta: Vec<Complex<T>>,
    /// Reflected signal-band flux amplitude `-P_in + √κ_ex·α` (√(photons/s)).
    pub s_out: Vec<Complex<T>>,
    /// Incident signal flux amplitude (√(photons/s)).
    pub p_in: Vec<Complex<T>>,
    /// Coupling waveform G(t)/2π (Hz).
    pub coupling: Vec<T>,
    /// Local-oscillator flux amplitude at the detector (√(photons/s)).
    pub lo: Vec<Complex<T>>,
    /// External coupling rate κ_ex/2π (Hz) used for this run.
    pub kappa_ex: T,
    /// Modulation (= LO-to-signal beat) frequency (Hz).
    pub beat_freq: T,
}

impl<T: Real> Trajectory<T> {
    /// Number of samples (grid points), = steps + 1.
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Time of sample `j`.
    pub fn time(&self, j: usize) -> T {
        self.t0 + self.dt * of::<T>(j as f64)
    }

    /// Last grid time.
    pub fn t_end(&self) -> T {
        self.time(self.len().saturating_sub(1))
    }

    /// Sample rate 1/dt (Hz).
    pub fn sample_rate(&self) -> T {
        T::one() / self.dt
    }

    /// Index of the grid point nearest `t`, clamped to the grid.
    pub fn index_at(&self, t: T) -> usize {
        let j = ((t - self.t0) / self.dt).round();
        let max = of::<T>((self.len().saturating_sub(1)) as f64);
        j.max(T::zero()).min(max).approx_f64() as usize
    }
}

struct Coeffs<T> {
    /// i·2π·f_cavity_offset + κ_ang/2
    cavity_decay: Complex<T>,
    /// i·d_m + γ_ang/2 with d_m = -2π·detuning
    mech_decay: Complex<T>,
    /// √(κ_ex angular)
    sqrt_kex: T,
}

impl<T: Real> Coeffs<T> {
    fn new(params: &ResonatorParams<T>, drive: &DriveConfig<T>) -> Self {
        let tau = T::TAU();
        let half = of::<T>(0.5);
        Coeffs {
            cavity_decay: Complex::new(half * tau * params.kappa, tau * params.f_cavity_offset),
            mech_decay: Complex::new(half * tau * params.gamma_m, -tau * drive.detuning),
            sqrt_kex: (tau * params.kappa_ex).sqrt(),
        }
    }

    /// Right-hand side at coupling `g_ang` (rad/s) and incident flux `p`.
    #[inline]
    fn rhs(
        &self,
        g_ang: T,
        p: Complex<T>,
        a: Complex<T>,
        b: Complex<T>,
    ) -> (Complex<T>, Complex<T>) {
        let ig = Complex::new(T::zero(), g_ang);
        let da = -(self.cavity_decay * a) - ig * b + p * self.sqrt_kex;
        let db = -(self.mech_decay * b) - ig * a;
        (da, db)
    }
}

fn grid_steps<T: Real>(
    params: &ResonatorParams<T>,
    drive: &DriveConfig<T>,
    seq: &PulseSequence<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<usize> {
    if !(cfg.t_end > T::zero() && cfg.t_end.is_finite()) {
        return Err(Error::InvalidConfig(format!("t_end must be positive, got {}", cfg.t_end)));
    }
    let n = match cfg.step {
        StepSize::Fixed(dt) => {
            if !(dt > T::zero() && dt.is_finite()) {
                return Err(Error::InvalidConfig(format!("fixed step must be positive, got {dt}")));
            }
            (cfg.t_end / dt).ceil().approx_f64() as usize
        }
        StepSize::Auto => {
            let fastest = params
                .kappa
                .max(seq.max_coupling())
                .max(drive.detuning.abs())
                .max(params.f_cavity_offset.abs());
            let rate = T::TAU() * fastest;
            let n = (cfg.t_end * rate * of::<T>(STEPS_PER_RADIAN)).ceil().approx_f64();
            (n as usize).max(64)
        }
    }
    .max(1);
    if n > MAX_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "time grid would need {n} samples (limit {MAX_SAMPLES}); \
             shorten t_end, lower the fastest rate, or supply a coarser fixed step"
        )));
    }
    Ok(n)
}

/// Integrates the coupled-mode equations from t = 0 to `cfg.t_end` and
/// records the trajectory together with the incident, reflected and
/// local-oscillator fields on the same grid.
///
/// Zero decay rates are accepted (they are how lossless reference runs are
/// expressed); [`ResonatorParams::validate`] flags them for real-experiment
/// configs.
pub fn integrate<T: Real>(
    params: &ResonatorParams<T>,
    drive: &DriveConfig<T>,
    seq: &PulseSequence<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    params.check_simulable()?;
    drive.check(params.f_m)?;
    seq.validate()?;

    let n = grid_steps(params, drive, seq, cfg)?;
    let dt = cfg.t_end / of::<T>(n as f64);
    let coeffs = Coeffs::new(params, drive);
    let tau = T::TAU();
    let half = of::<T>(0.5);
    let sixth = T::one() / of::<T>(6.0);

    let breakpoints = seq.breakpoints();
    let mut bp_cursor = 0usize;

    // Divergence threshold scaled to the run's own amplitudes.
    let input_scale = T::one() + cfg.initial.norm() + seq.lo_amplitude + max_incident(seq);
    let blowup = (of::<T>(1e12) * input_scale) * (of::<T>(1e12) * input_scale);

    let mut alpha = Vec::with_capacity(n + 1);
    let mut beta = Vec::with_capacity(n + 1);
    let mut s_out = Vec::with_capacity(n + 1);
    let mut p_in_rec = Vec::with_capacity(n + 1);
    let mut coupling_rec = Vec::with_capacity(n + 1);
    let mut lo_rec = Vec::with_capacity(n + 1);

    let mut a = cfg.initial.alpha;
    let mut b = cfg.initial.beta;
    let mut branches: Vec<Branch> = Vec::with_capacity(seq.pulses.len());

    let record = |t: T,
                  a: Complex<T>,
                  b: Complex<T>,
                  alpha: &mut Vec<Complex<T>>,
                  beta: &mut Vec<Complex<T>>,
                  s_out: &mut Vec<Complex<T>>,
                  p_in_rec: &mut Vec<Complex<T>>,
                  coupling_rec: &mut Vec<T>,
                  lo_rec: &mut Vec<Complex<T>>| {
        let p = crate::pulse::incident_flux(seq, t);
        alpha.push(a);
        beta.push(b);
        s_out.push(-p + a * coeffs.sqrt_kex);
        p_in_rec.push(p);
        coupling_rec.push(crate::pulse::coupling_waveform(seq, t));
        lo_rec.push(crate::pulse::lo_waveform(seq, t));
    };

    record(T::zero(), a, b, &mut alpha, &mut beta, &mut s_out, &mut p_in_rec, &mut coupling_rec, &mut lo_rec);

    for j in 0..n {
        let t_lo = dt * of::<T>(j as f64);
        let t_hi = if j + 1 == n { cfg.t_end } else { dt * of::<T>((j + 1) as f64) };

        // Sub-steps: split [t_lo, t_hi] at every envelope breakpoint inside.
        while bp_cursor < breakpoints.len() && breakpoints[bp_cursor] <= t_lo {
            bp_cursor += 1;
        }
        let mut sub_lo = t_lo;
        let mut k = bp_cursor;
        loop {
            let sub_hi = if k < breakpoints.len() && breakpoints[k] < t_hi {
                let b = breakpoints[k];
                k += 1;
                b
            } else {
                t_hi
            };
            let h = sub_hi - sub_lo;
            if h > T::zero() {
                let mid = half * (sub_lo + sub_hi);
                seq.classify(mid, &mut branches);
                let g_lo = tau * seq.coupling_on(&branches, sub_lo);
                let g_mid = tau * seq.coupling_on(&branches, mid);
                let g_hi = tau * seq.coupling_on(&branches, sub_hi);
                let p_lo = seq.incident_flux_on(&branches, sub_lo);
                let p_mid = seq.incident_flux_on(&branches, mid);
                let p_hi = seq.incident_flux_on(&branches, sub_hi);

                let (k1a, k1b) = coeffs.rhs(g_lo, p_lo, a, b);
                let (k2a, k2b) = coeffs.rhs(g_mid, p_mid, a + k1a * (half * h), b + k1b * (half * h));
                let (k3a, k3b) = coeffs.rhs(g_mid, p_mid, a + k2a * (half * h), b + k2b * (half * h));
                let (k4a, k4b) = coeffs.rhs(g_hi, p_hi, a + k3a * h, b + k3b * h);
                a = a + (k1a + (k2a + k3a) * of::<T>(2.0) + k4a) * (h * sixth);
                b = b + (k1b + (k2b + k3b) * of::<T>(2.0) + k4b) * (h * sixth);
            }
            if sub_hi >= t_hi {
                break;
            }
            sub_lo = sub_hi;
        }

        let norm_sq = a.norm_sqr() + b.norm_sqr();
        if !norm_sq.is_finite() || norm_sq > blowup {
            return Err(Error::Diverged { t_s: t_hi.approx_f64() });
        }
        record(t_hi, a, b, &mut alpha, &mut beta, &mut s_out, &mut p_in_rec, &mut coupling_rec, &mut lo_rec);
    }

    Ok(Trajectory {
        t0: T::zero(),
        dt,
        alpha,
        beta,
        s_out,
        p_in: p_in_rec,
        coupling: coupling_rec,
        lo: lo_rec,
        kappa_ex: params.kappa_ex,
        beat_freq: drive.delta_sl,
    })
}

fn max_incident<T: Real>(seq: &PulseSequence<T>) -> T {
    if let Some(s) = seq.signal() {
        s.peak
    } else {
        of::<T>(0.5) * seq.modulation_depth * seq.lo_amplitude
    }
}

/// Closed-form lossless beam-splitter map: with all decay rates and
/// detunings zero, a coupling pulse of area θ = ∫G dt rotates the pair as
///
/// ```text
/// α(θ) = α₀·cos θ - i·β₀·sin θ
/// β(θ) = β₀·cos θ - i·α₀·sin θ
/// ```
///
/// Reference solution for integrator verification; θ = π/2 is a complete
/// state swap.
pub fn lossless_evolve<T: Real>(
    theta: T,
    alpha0: Complex<T>,
    beta0: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let (s, c) = theta.sin_cos();
    let mi = Complex::new(T::zero(), -T::one());
    (alpha0 * c + mi * beta0 * s, beta0 * c + mi * alpha0 * s)
}

/// Photon count ∫|s_out|² dt over `[t_from, t_to]`, trapezoidal on the
/// record grid with linear interpolation at the window edges. Windows are
/// clipped to the trajectory span; an empty window yields 0.
pub fn retrieved_energy<T: Real>(traj: &Trajectory<T>, t_from: T, t_to: T) -> T {
    let lo = t_from.max(traj.t0);
    let hi = t_to.min(traj.t_end());
    if !(hi > lo) || traj.len() < 2 {
        return T::zero();
    }
    let power = |j: usize| traj.s_out[j].norm_sqr();
    let frac_power = |t: T| {
        // Linear interpolation of |s_out|² between bracketing samples.
        let x = (t - traj.t0) / traj.dt;
        let j = x.floor().approx_f64() as usize;
        let j = j.min(traj.len() - 2);
        let w = x - of::<T>(j as f64);
        power(j) * (T::one() - w) + power(j + 1) * w
    };
    let j_first = ((lo - traj.t0) / traj.dt).ceil().approx_f64() as usize;
    let j_last = ((hi - traj.t0) / traj.dt).floor().approx_f64() as usize;
    let j_last = j_last.min(traj.len() - 1);
    if j_first > j_last {
        // Window falls between two adjacent samples.
        return (frac_power(lo) + frac_power(hi)) * (hi - lo) * of::<T>(0.5);
    }
    let mut acc = T::zero();
    for j in j_first..j_last {
        acc += (power(j) + power(j + 1)) * of::<T>(0.5);
    }
    let mut total = acc * traj.dt;
    let t_first = traj.time(j_first);
    if lo < t_first {
        total += (frac_power(lo) + power(j_first)) * (t_first - lo) * of::<T>(0.5);
    }
    let t_last = traj.time(j_last);
    if hi > t_last {
        total += (power(j_last) + frac_power(hi)) * (hi - t_last) * of::<T>(0.5);
    }
    total
}

/// Phonon number |β|² at the grid point nearest `t`.
pub fn stored_excitation<T: Real>(traj: &Trajectory<T>, t: T) -> T {
    traj.beta[traj.index_at(t)].norm_sqr()
}
