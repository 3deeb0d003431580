//! Control-pulse envelopes and the incident signal flux they imply.
//!
//! A storage run is described by up to three pulses: a `Writing` coupling
//! pulse (plateau value = G_0/2π in Hz), a later `Readout` coupling pulse,
//! and an optional explicit `Signal` flux pulse sharing the writing pulse's
//! timing. When no explicit signal pulse is present the incident signal is
//! the upper phase-modulation sideband of the control beam, with amplitude
//! (M/2)·s_w shaped like the writing envelope.
//!
//! Envelopes are raised-cosine trapezoids: cosine edges of length `ramp` and
//! a flat plateau. Ramps exist to keep detected power spectra free of edge
//! artifacts; they do not model any physical turn-on time.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::float::{of, Real};

/// Default raised-cosine edge length (s).
pub const DEFAULT_RAMP: f64 = 50.0e-9;
/// Default writing/signal pulse duration (s).
pub const DEFAULT_WRITING_DURATION: f64 = 2.0e-6;
/// Default readout pulse duration (s).
pub const DEFAULT_READOUT_DURATION: f64 = 3.0e-6;

/// Role of a pulse within the storage protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseKind {
    /// Coupling pulse that maps the signal onto the mechanical mode.
    Writing,
    /// Coupling pulse that maps the mechanical mode back onto light.
    Readout,
    /// Incident signal flux envelope (only used on the direct-drive path).
    Signal,
}

/// One raised-cosine trapezoid pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec<T> {
    pub kind: PulseKind,
    /// Leading-edge time (s).
    pub t_start: T,
    /// Total length including both ramps (s); positive.
    pub duration: T,
    /// Raised-cosine edge length (s); `0 ≤ 2·ramp ≤ duration`. Zero gives a
    /// rectangular pulse.
    pub ramp: T,
    /// Plateau value: G_0/2π (Hz) for coupling pulses, peak incident
    /// amplitude (√(photons/s)) for the signal. Non-negative.
    pub peak: T,
}

/// Smooth piece of an envelope. Within one branch the shape is analytic, so
/// an integrator that never straddles a branch boundary keeps full order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Branch {
    Outside,
    RampUp,
    Plateau,
    RampDown,
}

impl<T: Real> PulseSpec<T> {
    pub fn new(kind: PulseKind, t_start: T, duration: T, ramp: T, peak: T) -> Self {
        PulseSpec { kind, t_start, duration, ramp, peak }
    }

    /// Trailing-edge time (s).
    pub fn t_end(&self) -> T {
        self.t_start + self.duration
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.duration > T::zero()
            && self.ramp >= T::zero()
            && of::<T>(2.0) * self.ramp <= self.duration
            && self.peak >= T::zero()
            && self.t_start.is_finite()
            && self.duration.is_finite()
            && self.peak.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "pulse must satisfy duration > 0, 0 <= 2*ramp <= duration, peak >= 0 \
                 (got t_start = {}, duration = {}, ramp = {}, peak = {})",
                self.t_start, self.duration, self.ramp, self.peak
            )))
        }
    }

    /// Unit envelope shape at `t`: 0 outside, 1 on the plateau. The plateau
    /// branch is tested first so the maximum is exactly 1 even when the two
    /// ramps meet in the middle.
    pub fn shape(&self, t: T) -> T {
        self.shape_on(self.branch_at(t), t)
    }

    /// Envelope value `peak · shape(t)`.
    pub fn envelope(&self, t: T) -> T {
        self.peak * self.shape(t)
    }

    pub(crate) fn branch_at(&self, t: T) -> Branch {
        let s = t - self.t_start;
        if s < T::zero() || s > self.duration {
            Branch::Outside
        } else if s >= self.ramp && s <= self.duration - self.ramp {
            Branch::Plateau
        } else if s < self.ramp {
            Branch::RampUp
        } else {
            Branch::RampDown
        }
    }

    /// Evaluates one branch's closed form at `t` without bounds checks; used
    /// by the integrator, which picks the branch from a sub-step midpoint and
    /// then needs consistent values at the sub-step endpoints as well.
    pub(crate) fn shape_on(&self, branch: Branch, t: T) -> T {
        let half = of::<T>(0.5);
        match branch {
            Branch::Outside => T::zero(),
            Branch::Plateau => T::one(),
            Branch::RampUp => {
                let s = t - self.t_start;
                half * (T::one() - (T::PI() * s / self.ramp).cos())
            }
            Branch::RampDown => {
                let s = self.t_end() - t;
                half * (T::one() - (T::PI() * s / self.ramp).cos())
            }
        }
    }

    /// Times where the envelope's analytic form changes.
    fn breakpoints(&self, out: &mut Vec<T>) {
        out.push(self.t_start);
        out.push(self.t_end());
        if self.ramp > T::zero() {
            out.push(self.t_start + self.ramp);
            out.push(self.t_end() - self.ramp);
        }
    }
}

/// Optomechanical pulse area θ = ∫ G(t) dt (rad, with G angular), which for
/// a raised-cosine trapezoid is exactly 2π·peak·(duration − ramp). θ = π/2
/// transfers the intracavity state completely in the lossless limit.
pub fn pulse_area<T: Real>(spec: &PulseSpec<T>) -> Result<T> {
    if spec.kind == PulseKind::Signal {
        return Err(Error::Domain(
            "pulse area is defined for coupling pulses, not the signal flux".to_string(),
        ));
    }
    spec.validate()?;
    Ok(T::TAU() * spec.peak * (spec.duration - spec.ramp))
}

/// The pulse chain of one storage run plus the optical scales needed to
/// derive the signal flux and the detection local oscillator from it.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence<T> {
    pub pulses: Vec<PulseSpec<T>>,
    /// Control (local-oscillator) flux amplitude s_w on the writing plateau
    /// (√(photons/s)). Pure scale factor: every energy ratio is invariant.
    pub lo_amplitude: T,
    /// EOM phase-modulation depth M. Positive M with no explicit signal
    /// pulse selects the sideband signal path; the sideband amplitude is
    /// (M/2)·s_w.
    pub modulation_depth: T,
}

impl<T: Real> PulseSequence<T> {
    pub fn new(pulses: Vec<PulseSpec<T>>) -> Self {
        PulseSequence { pulses, lo_amplitude: T::one(), modulation_depth: T::zero() }
    }

    pub fn with_lo_amplitude(mut self, s_w: T) -> Self {
        self.lo_amplitude = s_w;
        self
    }

    pub fn with_modulation_depth(mut self, m: T) -> Self {
        self.modulation_depth = m;
        self
    }

    pub fn writing(&self) -> Option<&PulseSpec<T>> {
        self.pulses.iter().find(|p| p.kind == PulseKind::Writing)
    }

    pub fn readout(&self) -> Option<&PulseSpec<T>> {
        self.pulses.iter().find(|p| p.kind == PulseKind::Readout)
    }

    pub fn signal(&self) -> Option<&PulseSpec<T>> {
        self.pulses.iter().find(|p| p.kind == PulseKind::Signal)
    }

    /// Whether the incident signal comes from the modulation sideband rather
    /// than an explicit flux pulse.
    pub fn uses_sideband_signal(&self) -> bool {
        self.signal().is_none() && self.modulation_depth > T::zero()
    }

    /// End of the last pulse, or zero for an empty sequence.
    pub fn span_end(&self) -> T {
        self.pulses
            .iter()
            .map(|p| p.t_end())
            .fold(T::zero(), T::max)
    }

    /// Largest coupling plateau (Hz); feeds the automatic step-size rule.
    pub fn max_coupling(&self) -> T {
        self.pulses
            .iter()
            .filter(|p| p.kind != PulseKind::Signal)
            .map(|p| p.peak)
            .fold(T::zero(), T::max)
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.pulses {
            p.validate()?;
        }
        for kind in [PulseKind::Writing, PulseKind::Readout, PulseKind::Signal] {
            if self.pulses.iter().filter(|p| p.kind == kind).count() > 1 {
                return Err(Error::InvalidConfig(format!(
                    "at most one {kind:?} pulse per sequence"
                )));
            }
        }
        if let (Some(w), Some(s)) = (self.writing(), self.signal()) {
            // The experiment derives the signal from the writing beam, so the
            // two envelopes are tied together exactly.
            if w.t_start != s.t_start || w.duration != s.duration {
                return Err(Error::InvalidConfig(
                    "signal and writing pulses must share t_start and duration".to_string(),
                ));
            }
        }
        if let (Some(w), Some(r)) = (self.writing(), self.readout()) {
            if r.t_start < w.t_end() {
                return Err(Error::InvalidConfig(format!(
                    "readout must start after the writing pulse ends \
                     (readout t_start = {}, writing ends at {})",
                    r.t_start,
                    w.t_end()
                )));
            }
        }
        if !(self.lo_amplitude >= T::zero() && self.lo_amplitude.is_finite()) {
            return Err(Error::InvalidConfig("lo_amplitude must be finite and >= 0".to_string()));
        }
        if !(self.modulation_depth >= T::zero() && self.modulation_depth.is_finite()) {
            return Err(Error::InvalidConfig(
                "modulation_depth must be finite and >= 0".to_string(),
            ));
        }
        Ok(())
    }

    /// Non-fatal advisories (the small-modulation expansion degrades well
    /// before it breaks).
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.modulation_depth > of(0.5) {
            w.push(format!(
                "modulation depth M = {} is outside the small-modulation regime (M <= 0.5); \
                 the two-sideband expansion of the drive is inaccurate",
                self.modulation_depth
            ));
        }
        w
    }

    /// Sorted, deduplicated times where any envelope changes analytic form.
    pub(crate) fn breakpoints(&self) -> Vec<T> {
        let mut bp = Vec::with_capacity(4 * self.pulses.len());
        for p in &self.pulses {
            p.breakpoints(&mut bp);
        }
        bp.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        bp.dedup();
        bp
    }

    /// Branch of every pulse at time `t`, in pulse order.
    pub(crate) fn classify(&self, t: T, out: &mut Vec<Branch>) {
        out.clear();
        out.extend(self.pulses.iter().map(|p| p.branch_at(t)));
    }

    pub(crate) fn coupling_on(&self, branches: &[Branch], t: T) -> T {
        self.pulses
            .iter()
            .zip(branches)
            .filter(|(p, _)| p.kind != PulseKind::Signal)
            .map(|(p, &b)| p.peak * p.shape_on(b, t))
            .sum()
    }

    pub(crate) fn incident_flux_on(&self, branches: &[Branch], t: T) -> Complex<T> {
        if let Some(idx) = self.pulses.iter().position(|p| p.kind == PulseKind::Signal) {
            let p = &self.pulses[idx];
            return Complex::new(p.peak * p.shape_on(branches[idx], t), T::zero());
        }
        if self.modulation_depth > T::zero() {
            if let Some(idx) = self.pulses.iter().position(|p| p.kind == PulseKind::Writing) {
                let p = &self.pulses[idx];
                let amp = of::<T>(0.5) * self.modulation_depth * self.lo_amplitude;
                return Complex::new(amp * p.shape_on(branches[idx], t), T::zero());
            }
        }
        Complex::new(T::zero(), T::zero())
    }
}

/// Total coupling waveform G(t)/2π (Hz): the sum of the writing and readout
/// envelopes. Zero outside every pulse; the maximum equals the largest peak.
pub fn coupling_waveform<T: Real>(seq: &PulseSequence<T>, t: T) -> T {
    seq.pulses
        .iter()
        .filter(|p| p.kind != PulseKind::Signal)
        .map(|p| p.envelope(t))
        .sum()
}

/// Incident signal flux amplitude on the sideband path: (M/2)·s_w shaped by
/// the writing envelope (√(photons/s), real by phase convention).
pub fn signal_flux_waveform<T: Real>(
    seq: &PulseSequence<T>,
    modulation_depth: T,
    t: T,
) -> Complex<T> {
    let shape = seq.writing().map_or(T::zero(), |w| w.shape(t));
    let amp = of::<T>(0.5) * modulation_depth * seq.lo_amplitude;
    Complex::new(amp * shape, T::zero())
}

/// Incident signal flux amplitude P_in(t) the integrator consumes: the
/// explicit signal pulse when present, else the modulation sideband.
pub fn incident_flux<T: Real>(seq: &PulseSequence<T>, t: T) -> Complex<T> {
    if let Some(s) = seq.signal() {
        Complex::new(s.envelope(t), T::zero())
    } else if seq.modulation_depth > T::zero() {
        signal_flux_waveform(seq, seq.modulation_depth, t)
    } else {
        Complex::new(T::zero(), T::zero())
    }
}

/// Local-oscillator (control) flux amplitude reaching the detector, which
/// tracks √intensity and therefore the coupling envelope: `lo_amplitude` on
/// the writing plateau, scaled by the peak ratio on the readout plateau.
pub fn lo_waveform<T: Real>(seq: &PulseSequence<T>, t: T) -> Complex<T> {
    let g_ref = seq
        .writing()
        .map(|p| p.peak)
        .filter(|&g| g > T::zero())
        .or_else(|| seq.readout().map(|p| p.peak).filter(|&g| g > T::zero()))
        .unwrap_or_else(T::one);
    let amp: T = seq
        .pulses
        .iter()
        .filter(|p| p.kind != PulseKind::Signal)
        .map(|p| (p.peak / g_ref) * p.shape(t))
        .sum();
    Complex::new(seq.lo_amplitude * amp, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn writing(t_start: f64, duration: f64, ramp: f64, g0: f64) -> PulseSpec<f64> {
        PulseSpec::new(PulseKind::Writing, t_start, duration, ramp, g0)
    }

    /// Composite Simpson quadrature of the coupling waveform, split at the
    /// envelope breakpoints so every panel integrates a smooth function.
    /// Independent oracle for `pulse_area`.
    fn quadrature_area(seq: &PulseSequence<f64>) -> f64 {
        let bp = seq.breakpoints();
        let mut total = 0.0;
        for win in bp.windows(2) {
            let (a, b) = (win[0], win[1]);
            let n = 2000usize; // even panel count per smooth piece
            let h = (b - a) / n as f64;
            let mut acc = coupling_waveform(seq, a) + coupling_waveform(seq, b);
            for k in 1..n {
                let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * coupling_waveform(seq, a + h * k as f64);
            }
            total += acc * h / 3.0;
        }
        total * std::f64::consts::TAU
    }

    #[test]
    fn plateau_and_outside_values() {
        let seq = PulseSequence::new(vec![writing(0.0, 2.0e-6, 0.2e-6, 2.0e6)]);
        assert_eq!(coupling_waveform(&seq, 1.0e-6), 2.0e6); // plateau, exact
        assert_eq!(coupling_waveform(&seq, 3.0e-6), 0.0); // past the pulse
        assert_eq!(coupling_waveform(&seq, -1.0e-9), 0.0);
        // Half-way up the cosine edge sits at half the peak.
        assert_relative_eq!(coupling_waveform(&seq, 0.1e-6), 1.0e6, max_relative = 1e-12);
    }

    #[test]
    fn maximum_equals_peak_even_without_plateau() {
        // 2*ramp == duration: the two edges meet at a single peak sample.
        let p = writing(0.0, 0.4e-6, 0.2e-6, 3.3e6);
        assert_eq!(p.envelope(0.2e-6), 3.3e6);
    }

    #[test]
    fn rectangular_pi_half_area() {
        let p = writing(0.0, 0.125e-6, 0.0, 2.0e6);
        assert_relative_eq!(
            pulse_area(&p).unwrap(),
            std::f64::consts::FRAC_PI_2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn zero_peak_has_zero_area() {
        let p = writing(0.0, 1.0e-6, 0.1e-6, 0.0);
        assert_eq!(pulse_area(&p).unwrap(), 0.0);
    }

    #[test]
    fn raised_cosine_area_matches_quadrature() {
        let p = writing(0.0, 0.2e-6, 0.05e-6, 2.0e6);
        let area = pulse_area(&p).unwrap();
        assert_relative_eq!(area, 1.8849555921538756, max_relative = 1e-12);
        let seq = PulseSequence::new(vec![p]);
        assert_relative_eq!(area, quadrature_area(&seq), max_relative = 1e-11);
    }

    #[test]
    fn signal_kind_has_no_area() {
        let p = PulseSpec::new(PulseKind::Signal, 0.0, 1.0e-6, 0.0, 10.0);
        assert!(matches!(pulse_area(&p), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_pulse_geometry_is_rejected() {
        assert!(writing(0.0, -1.0e-6, 0.0, 1.0e6).validate().is_err());
        assert!(writing(0.0, 1.0e-6, 0.6e-6, 1.0e6).validate().is_err()); // 2*ramp > duration
        assert!(writing(0.0, 1.0e-6, 0.0, -1.0).validate().is_err());
    }

    #[test]
    fn sideband_flux_amplitude() {
        let seq = PulseSequence::new(vec![writing(0.0, 2.0e-6, 0.0, 2.0e6)])
            .with_lo_amplitude(1000.0)
            .with_modulation_depth(0.1);
        // (M/2) * s_w = 50 inside the writing window.
        assert_eq!(signal_flux_waveform(&seq, 0.1, 1.0e-6).re, 50.0);
        assert_eq!(signal_flux_waveform(&seq, 0.1, 1.0e-6).im, 0.0);
        assert_eq!(signal_flux_waveform(&seq, 0.1, 5.0e-6).re, 0.0);
        assert_eq!(incident_flux(&seq, 1.0e-6).re, 50.0);
    }

    #[test]
    fn direct_signal_path_matches_sideband_path() {
        // An explicit signal pulse with peak (M/2)*s_w reproduces the
        // sideband flux everywhere.
        let w = writing(0.0, 2.0e-6, 0.1e-6, 2.0e6);
        let sideband = PulseSequence::new(vec![w])
            .with_lo_amplitude(1000.0)
            .with_modulation_depth(0.1);
        let direct = PulseSequence::new(vec![
            w,
            PulseSpec::new(PulseKind::Signal, 0.0, 2.0e-6, 0.1e-6, 50.0),
        ]);
        for k in 0..200 {
            let t = -0.1e-6 + k as f64 * 0.012e-6;
            assert_abs_diff_eq!(
                incident_flux(&sideband, t).re,
                incident_flux(&direct, t).re,
                epsilon = 1e-12 * 50.0
            );
        }
    }

    #[test]
    fn sequence_invariants() {
        let w = writing(0.0, 2.0e-6, 0.05e-6, 2.0e6);
        let r = PulseSpec::new(PulseKind::Readout, 6.0e-6, 3.0e-6, 0.05e-6, 2.0e6);
        PulseSequence::new(vec![w, r]).validate().unwrap();

        // Readout overlapping the writing pulse.
        let early = PulseSpec::new(PulseKind::Readout, 1.0e-6, 3.0e-6, 0.05e-6, 2.0e6);
        assert!(PulseSequence::new(vec![w, early]).validate().is_err());

        // Signal must share the writing timing.
        let s_bad = PulseSpec::new(PulseKind::Signal, 0.5e-6, 2.0e-6, 0.05e-6, 1.0);
        assert!(PulseSequence::new(vec![w, s_bad]).validate().is_err());

        // Deep modulation only warns.
        let deep = PulseSequence::new(vec![w, r]).with_modulation_depth(0.8);
        deep.validate().unwrap();
        assert_eq!(deep.warnings().len(), 1);
    }

    #[test]
    fn lo_tracks_coupling_ratio() {
        let seq = PulseSequence::new(vec![
            writing(0.0, 2.0e-6, 0.0, 2.0e6),
            PulseSpec::new(PulseKind::Readout, 6.0e-6, 3.0e-6, 0.0, 1.0e6),
        ])
        .with_lo_amplitude(800.0);
        assert_eq!(lo_waveform(&seq, 1.0e-6).re, 800.0); // writing plateau
        assert_eq!(lo_waveform(&seq, 7.0e-6).re, 400.0); // readout at half the coupling
        assert_eq!(lo_waveform(&seq, 4.0e-6).re, 0.0); // gap
    }

    proptest! {
        #[test]
        fn area_is_additive_and_linear(
            g1 in 1.0e5f64..5.0e6,
            g2 in 1.0e5f64..5.0e6,
            d1 in 0.2e-6f64..3.0e-6,
            d2 in 0.2e-6f64..3.0e-6,
            ramp in 0.0f64..0.1e-6,
            c in 0.5f64..4.0,
        ) {
            let w = writing(0.0, d1, ramp, g1);
            let r = PulseSpec::new(PulseKind::Readout, d1 + 1.0e-6, d2, ramp, g2);
            let sum = pulse_area(&w).unwrap() + pulse_area(&r).unwrap();
            let direct = std::f64::consts::TAU * (g1 * (d1 - ramp) + g2 * (d2 - ramp));
            prop_assert!((sum - direct).abs() <= 1e-12 * direct.abs());

            // Linear in the peak.
            let scaled = writing(0.0, d1, ramp, c * g1);
            let ratio = pulse_area(&scaled).unwrap() / pulse_area(&w).unwrap();
            prop_assert!((ratio - c).abs() < 1e-12 * c);
        }

        #[test]
        fn quadrature_reproduces_area(
            g in 1.0e5f64..5.0e6,
            dur in 0.2e-6f64..2.0e-6,
            ramp_frac in 0.0f64..0.5,
        ) {
            let ramp = ramp_frac * dur / 2.0;
            let seq = PulseSequence::new(vec![writing(0.3e-6, dur, ramp, g)]);
            let area = pulse_area(&seq.writing().unwrap()).unwrap();
            let quad = quadrature_area(&seq);
            prop_assert!((area - quad).abs() < 1e-9 * area.max(1.0));
        }

        #[test]
        fn waveform_bounded_by_peak_and_continuous(
            g in 1.0e5f64..5.0e6,
            dur in 0.2e-6f64..2.0e-6,
            ramp_frac in 0.01f64..0.5,
            t_frac in -0.2f64..1.2,
        ) {
            let ramp = ramp_frac * dur / 2.0;
            let p = writing(0.0, dur, ramp, g);
            let t = t_frac * dur;
            let v = p.envelope(t);
            prop_assert!((0.0..=g).contains(&v));
            // Continuity: a 1e-6-of-ramp nudge moves the value by at most
            // the max slope (pi*peak/(2*ramp)) times the nudge, padded 2x.
            let eps = ramp * 1e-6;
            let dv = (p.envelope(t + eps) - v).abs();
            prop_assert!(dv <= std::f64::consts::PI * g / (2.0 * ramp) * eps * 2.0 + 1e-30);
        }

        #[test]
        fn branch_eval_agrees_with_pointwise(
            dur in 0.2e-6f64..2.0e-6,
            ramp_frac in 0.0f64..0.5,
            t_frac in -0.2f64..1.2,
        ) {
            let ramp = ramp_frac * dur / 2.0;
            let p = writing(0.1e-6, dur, ramp, 1.5e6);
            let t = 0.1e-6 + t_frac * dur;
            let b = p.branch_at(t);
            prop_assert_eq!(p.shape_on(b, t), p.shape(t));
        }
    }
}
