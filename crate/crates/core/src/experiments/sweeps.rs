//! Parameter sweeps over storage runs. Each point owns its configuration
//! copy and runs independently; results are gathered in sweep order, so a
//! sweep is reproducible bit-for-bit regardless of worker count.

use std::fmt::Display;

use rayon::prelude::*;

use super::fit::{fit_exponential, measure_fwhm, FitModel, FitRecord};
use super::{temporal_profile, Scenario};
use crate::detection::{gated_power_spectrum, spectrally_integrated_power, BeatSeries, GateConfig, PowerSpectrum};
use crate::error::{Error, Result};
use crate::float::{of, Real};
use crate::model::DriveConfig;
use crate::pulse::PulseSequence;

/// One sweep curve: swept values, retrieved energies, a normalized copy, and
/// an optional fit.
#[derive(Debug, Clone)]
pub struct SweepResult<T> {
    /// Name of the swept parameter, e.g. "delay_s".
    pub parameter: String,
    pub values: Vec<T>,
    /// Retrieved energy (photons) per swept value.
    pub energies: Vec<T>,
    /// Energies divided by the sweep's reference point (smallest delay,
    /// unit relative intensity, or zero detuning).
    pub normalized: Vec<T>,
    pub fit: Option<FitRecord<T>>,
}

/// Tag an error with the swept value that produced it so a failing point in
/// a parallel sweep is identifiable.
fn at_point<X, V: Display>(what: &str, v: V, res: Result<X>) -> Result<X> {
    res.map_err(|e| match e {
        Error::InvalidConfig(m) => Error::InvalidConfig(format!("{what} = {v}: {m}")),
        Error::Domain(m) => Error::Domain(format!("{what} = {v}: {m}")),
        Error::Diverged { t_s } => {
            Error::Domain(format!("{what} = {v}: diverged at t = {t_s} s"))
        }
        Error::Fit(m) => Error::Fit(format!("{what} = {v}: {m}")),
        Error::Shape(m) => Error::Shape(format!("{what} = {v}: {m}")),
        Error::Normalization(m) => Error::Normalization(format!("{what} = {v}: {m}")),
    })
}

fn retrieved_at<T: Real>(scenario: &Scenario<T>) -> Result<T> {
    Ok(temporal_profile(scenario)?.retrieved)
}

/// Rebuild a scenario with the readout pulse starting `delay` after the
/// writing pulse ends, integrating just past the retrieval window.
fn with_readout_delay<T: Real>(base: &Scenario<T>, delay: T) -> Result<Scenario<T>> {
    let writing = base
        .seq
        .writing()
        .ok_or_else(|| Error::InvalidConfig("delay sweep needs a writing pulse".to_string()))?;
    let readout = base
        .seq
        .readout()
        .ok_or_else(|| Error::InvalidConfig("delay sweep needs a readout pulse".to_string()))?;
    if !(delay > T::zero()) || !delay.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "delays must be positive and finite (got {delay})"
        )));
    }
    let mut moved = *readout;
    moved.t_start = writing.t_end() + delay;
    let mut seq = base.seq.clone();
    for p in &mut seq.pulses {
        if p.kind == moved.kind {
            *p = moved;
        }
    }
    let ring = if base.params.kappa > T::zero() {
        of::<T>(5.0) / (T::TAU() * base.params.kappa)
    } else {
        T::zero()
    };
    let mut s = base.clone();
    s.seq = seq;
    s.t_end = moved.t_end() + ring;
    Ok(s)
}

/// Retrieved energy versus writing-end → readout-start delay, with an
/// exponential-lifetime fit. Energies are normalized to the shortest delay.
pub fn sweep_delay<T: Real>(base: &Scenario<T>, delays: &[T]) -> Result<SweepResult<T>> {
    if delays.is_empty() {
        return Err(Error::InvalidConfig("delay sweep needs at least one delay".to_string()));
    }
    let energies: Vec<T> = delays
        .par_iter()
        .map(|&d| at_point("delay", d, with_readout_delay(base, d).and_then(|s| retrieved_at(&s))))
        .collect::<Result<_>>()?;
    let mut i_ref = 0;
    for (i, d) in delays.iter().enumerate() {
        if *d < delays[i_ref] {
            i_ref = i;
        }
    }
    let normalized = normalize_to(&energies, i_ref, "shortest-delay energy")?;
    let fit = fit_exponential(delays, &energies)?;
    Ok(SweepResult {
        parameter: "delay_s".to_string(),
        values: delays.to_vec(),
        energies,
        normalized,
        fit: Some(fit),
    })
}

/// Retrieved energy versus relative readout intensity I/I₀. The readout
/// coupling scales as the base readout peak times √(I/I₀); the writing pulse
/// is left untouched. Energies are normalized to the I/I₀ = 1 point.
pub fn sweep_readout_intensity<T: Real>(
    base: &Scenario<T>,
    relative_intensities: &[T],
) -> Result<SweepResult<T>> {
    let readout = base.seq.readout().ok_or_else(|| {
        Error::InvalidConfig("intensity sweep needs a readout pulse".to_string())
    })?;
    if relative_intensities.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
        return Err(Error::InvalidConfig(
            "relative intensities must be positive and finite".to_string(),
        ));
    }
    let g_unit = readout.peak;
    let energies: Vec<T> = relative_intensities
        .par_iter()
        .map(|&i_rel| {
            let mut s = base.clone();
            for p in &mut s.seq.pulses {
                if p.kind == readout.kind {
                    p.peak = g_unit * i_rel.sqrt();
                }
            }
            at_point("relative_intensity", i_rel, retrieved_at(&s))
        })
        .collect::<Result<_>>()?;
    let i_ref = relative_intensities
        .iter()
        .position(|v| (*v - T::one()).abs() <= of::<T>(1e-9))
        .ok_or_else(|| {
            Error::Normalization(
                "intensity sweep must include the I/I0 = 1 point to normalize against"
                    .to_string(),
            )
        })?;
    let normalized = normalize_to(&energies, i_ref, "unit-intensity energy")?;
    Ok(SweepResult {
        parameter: "relative_readout_intensity".to_string(),
        values: relative_intensities.to_vec(),
        energies,
        normalized,
        fit: None,
    })
}

/// Retrieved energy versus two-photon detuning (beat minus mechanical
/// frequency, Hz), at the given readout and writing plateau couplings. The
/// signal stays on cavity resonance; the detuning moves the control carrier.
/// Energies are normalized to the zero-detuning point and a FWHM fit is
/// attached.
pub fn sweep_detuning<T: Real>(
    base: &Scenario<T>,
    detunings: &[T],
    readout_g0: T,
    writing_g0: T,
) -> Result<SweepResult<T>> {
    if base.seq.writing().is_none() || base.seq.readout().is_none() {
        return Err(Error::InvalidConfig(
            "detuning sweep needs writing and readout pulses".to_string(),
        ));
    }
    if detunings.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("detunings must be finite".to_string()));
    }
    let energies: Vec<T> = detunings
        .par_iter()
        .map(|&delta| {
            let mut s = base.clone();
            s.drive = DriveConfig::detuned(s.params.f_m, delta);
            for p in &mut s.seq.pulses {
                match p.kind {
                    crate::pulse::PulseKind::Writing => p.peak = writing_g0,
                    crate::pulse::PulseKind::Readout => p.peak = readout_g0,
                    crate::pulse::PulseKind::Signal => {}
                }
            }
            at_point("detuning_hz", delta, retrieved_at(&s))
        })
        .collect::<Result<_>>()?;
    let i_ref = detunings
        .iter()
        .position(|v| *v == T::zero())
        .ok_or_else(|| {
            Error::Normalization(
                "detuning sweep must include the zero-detuning point".to_string(),
            )
        })?;
    let normalized = normalize_to(&energies, i_ref, "zero-detuning energy")?;
    let fwhm = measure_fwhm(detunings, &normalized)?;
    let peak = energies.iter().copied().fold(T::zero(), T::max);
    let fit = FitRecord {
        model: FitModel::LineshapeFwhm,
        amplitude: peak,
        scale: fwhm,
        residual_norm: T::zero(),
        converged: true,
    };
    Ok(SweepResult {
        parameter: "detuning_hz".to_string(),
        values: detunings.to_vec(),
        energies,
        normalized,
        fit: Some(fit),
    })
}

fn normalize_to<T: Real>(energies: &[T], i_ref: usize, what: &str) -> Result<Vec<T>> {
    let e_ref = energies[i_ref];
    if !(e_ref > T::zero()) {
        return Err(Error::Normalization(format!("{what} is zero; cannot normalize")));
    }
    Ok(energies.iter().map(|e| *e / e_ref).collect())
}

/// Gate-delay scan of one beat series: the detected (spectrally integrated)
/// power versus gate position, plus each gate's spectrum.
#[derive(Debug, Clone)]
pub struct GateScan<T> {
    /// Gate delays (s, relative to the beat series' reference time).
    pub delays: Vec<T>,
    /// ∫S(f)df over the analysis span, per delay.
    pub integrated: Vec<T>,
    pub spectra: Vec<PowerSpectrum<T>>,
}

/// Run the gated spectrum analyzer at each delay of `delays`, sharing one
/// beat series. The template's gate length, bandwidth, and span are kept.
pub fn scan_gate_delays<T: Real>(
    beat: &BeatSeries<T>,
    template: &GateConfig<T>,
    delays: &[T],
) -> Result<GateScan<T>> {
    if delays.is_empty() {
        return Err(Error::InvalidConfig("gate scan needs at least one delay".to_string()));
    }
    let spectra: Vec<PowerSpectrum<T>> = delays
        .par_iter()
        .map(|&d| {
            let mut gate = *template;
            gate.gate_delay = d;
            at_point("gate_delay", d, gated_power_spectrum(beat, &gate))
        })
        .collect::<Result<_>>()?;
    let integrated = spectra.iter().map(spectrally_integrated_power).collect();
    Ok(GateScan { delays: delays.to_vec(), integrated, spectra })
}

/// Convenience: run a scenario, form its heterodyne beat, and scan gates.
pub fn scenario_gate_scan<T: Real>(
    scenario: &Scenario<T>,
    template: &GateConfig<T>,
    delays: &[T],
) -> Result<GateScan<T>> {
    let traj = scenario.run()?;
    let beat = crate::detection::heterodyne_beat(&traj, &scenario.seq);
    scan_gate_delays(&beat, template, delays)
}

/// Scale every optical amplitude of a sequence by `c` (signal, carrier, and
/// local oscillator alike). Used by linearity checks: normalized curves and
/// fitted lifetimes are invariant under this.
pub fn scale_input<T: Real>(seq: &PulseSequence<T>, c: T) -> PulseSequence<T> {
    let mut out = seq.clone();
    out.lo_amplitude = seq.lo_amplitude * c;
    for p in &mut out.pulses {
        if p.kind == crate::pulse::PulseKind::Signal {
            p.peak = p.peak * c;
        }
    }
    out
}
