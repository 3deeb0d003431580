//! Resonator, drive, and coupling parameter types.
//!
//! Unit convention, used everywhere in this crate: stored rates and
//! frequencies are the /2π values in hertz, the numbers a lab plot axis
//! would carry (κ/2π = 40 MHz is stored as `4.0e7`). Equations of motion
//! multiply by 2π at the point of use; nothing in this module is angular.
//!
//! The model is the linearized beam-splitter interaction between one optical
//! cavity mode (field amplitude α, photon units) and one mechanical mode
//! (phonon amplitude β), with effective coupling G/2π = g·x_zpf·√n_c set by
//! the control-beam intracavity photon number n_c.

use crate::error::{Error, Result};
use crate::float::{of, Real};

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054571817e-34;

/// Fixed rates of one cavity-resonator pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorParams<T> {
    /// Mechanical resonance frequency ω_m/2π (Hz).
    pub f_m: T,
    /// Intrinsic mechanical energy decay rate γ_m/2π (Hz).
    pub gamma_m: T,
    /// Total cavity linewidth κ/2π (Hz).
    pub kappa: T,
    /// External (taper) coupling rate κ_ex/2π (Hz), at most `kappa`.
    pub kappa_ex: T,
    /// Detuning (ω_0 − ω_s)/2π of the cavity from the signal carrier (Hz).
    /// Zero when the signal sits on cavity resonance, the usual case.
    pub f_cavity_offset: T,
}

impl<T: Real> ResonatorParams<T> {
    /// The silica-microsphere parameter set every preset builds on:
    /// f_m = 108.4 MHz, γ_m = 38 kHz, κ = 40 MHz, κ_ex = κ/2, no offset.
    pub fn experiment_defaults() -> Self {
        Self::with_kappa(of(40.0e6))
    }

    /// Same mechanical mode behind a cavity of linewidth `kappa` (Hz),
    /// critically coupled (κ_ex = κ/2).
    pub fn with_kappa(kappa: T) -> Self {
        ResonatorParams {
            f_m: of(108.4e6),
            gamma_m: of(38.0e3),
            kappa,
            kappa_ex: kappa / of(2.0),
            f_cavity_offset: T::zero(),
        }
    }

    /// Hard precondition for integration: everything finite, f_m positive,
    /// decay rates non-negative and κ_ex within [0, κ]. Looser than
    /// [`validate`](Self::validate), which also flags the zero-rate edge
    /// cases that lossless reference runs rely on.
    pub fn check_simulable(&self) -> Result<()> {
        let fin = self.f_m.is_finite()
            && self.gamma_m.is_finite()
            && self.kappa.is_finite()
            && self.kappa_ex.is_finite()
            && self.f_cavity_offset.is_finite();
        let ok = fin
            && self.f_m > T::zero()
            && self.gamma_m >= T::zero()
            && self.kappa >= T::zero()
            && self.kappa_ex >= T::zero()
            && self.kappa_ex <= self.kappa;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "resonator parameters not simulable: need f_m > 0, gamma_m >= 0, \
                 0 <= kappa_ex <= kappa, all finite \
                 (got f_m = {}, gamma_m = {}, kappa = {}, kappa_ex = {}, f_cavity_offset = {})",
                self.f_m, self.gamma_m, self.kappa, self.kappa_ex, self.f_cavity_offset
            )))
        }
    }

    /// Checks the physical-configuration invariants and reports rather than
    /// fails: integration itself tolerates edge values (the lossless κ = 0
    /// limit is exercised by tests), but an experiment description with a
    /// violation listed here is almost certainly a typo.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let fin = |x: T| x.is_finite();
        if !(fin(self.f_m) && fin(self.gamma_m) && fin(self.kappa) && fin(self.kappa_ex) && fin(self.f_cavity_offset)) {
            violations.push("non-finite parameter".to_string());
        }
        if self.f_m <= T::zero() {
            violations.push(format!("f_m must be positive (got {})", self.f_m));
        }
        if self.gamma_m <= T::zero() {
            violations.push(format!("gamma_m must be positive (got {})", self.gamma_m));
        }
        if self.kappa <= T::zero() {
            violations.push(format!("kappa must be positive (got {})", self.kappa));
        }
        if self.kappa_ex < T::zero() || self.kappa_ex > self.kappa {
            violations.push(format!(
                "kappa_ex must lie in [0, kappa] (got {}, kappa = {})",
                self.kappa_ex, self.kappa
            ));
        }
        ValidationReport {
            resolved_sideband: self.f_m > self.kappa,
            violations,
        }
    }
}

/// Outcome of [`ResonatorParams::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// Whether the pair sits in the resolved-sideband regime (f_m > κ),
    /// where the beam-splitter form of the interaction is a good model.
    pub resolved_sideband: bool,
    /// Human-readable invariant violations; empty for a sound config.
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Frequency placement of the control (ω_l) and signal (ω_s) tones.
///
/// `detuning` is the two-photon detuning (ω_s − ω_l)/2π − f_m that the
/// lineshape experiments sweep. Constructors keep the `detuning =
/// delta_sl − f_m` identity; the integrator consumes `detuning` directly so
/// small sweep values never suffer cancellation against the 108 MHz carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig<T> {
    /// Signal–control frequency offset (ω_s − ω_l)/2π (Hz); this is the EOM
    /// modulation frequency and the heterodyne beat frequency.
    pub delta_sl: T,
    /// Two-photon detuning `delta_sl − f_m` (Hz); zero on the storage
    /// resonance.
    pub detuning: T,
}

impl<T: Real> DriveConfig<T> {
    /// Control placed exactly one mechanical frequency below the signal.
    pub fn resonant(f_m: T) -> Self {
        DriveConfig { delta_sl: f_m, detuning: T::zero() }
    }

    /// Control offset so the two-photon detuning equals `detuning`, with the
    /// signal kept on cavity resonance (the sweep convention: ω_l moves).
    pub fn detuned(f_m: T, detuning: T) -> Self {
        DriveConfig { delta_sl: f_m + detuning, detuning }
    }

    /// Verifies the `detuning = delta_sl − f_m` identity to a few ulps of
    /// f_m (bit-exactness in both directions is impossible in floats).
    pub fn check(&self, f_m: T) -> Result<()> {
        let residual = (self.detuning - (self.delta_sl - f_m)).abs();
        let tol = T::epsilon() * of::<T>(8.0) * f_m.abs().max(T::one());
        if residual > tol {
            return Err(Error::InvalidConfig(format!(
                "drive fields inconsistent: detuning = {} but delta_sl - f_m = {}",
                self.detuning,
                self.delta_sl - f_m
            )));
        }
        Ok(())
    }
}

/// How the effective coupling G_0 is specified.
///
/// Every experiment in this crate takes the direct `g0` path; the
/// `(g_times_xzpf, n_c)` pair exists for calibrating against a measured
/// intracavity photon number.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CouplingSpec<T> {
    /// Vacuum coupling rate times zero-point amplitude, g·x_zpf/2π (Hz).
    pub g_times_xzpf: Option<T>,
    /// Mean intracavity control photon number on the pulse plateau.
    pub n_c: Option<T>,
    /// Effective coupling G_0/2π (Hz), given directly.
    pub g0: Option<T>,
}

impl<T: Real> CouplingSpec<T> {
    pub fn direct(g0: T) -> Self {
        CouplingSpec { g_times_xzpf: None, n_c: None, g0: Some(g0) }
    }

    pub fn from_photon_number(g_times_xzpf: T, n_c: T) -> Self {
        CouplingSpec { g_times_xzpf: Some(g_times_xzpf), n_c: Some(n_c), g0: None }
    }

    /// Resolves to a single G_0/2π value, checking consistency when both
    /// paths are given (they must agree to a relative 1e-9).
    pub fn resolve(&self) -> Result<T> {
        let derived = match (self.g_times_xzpf, self.n_c) {
            (Some(g), Some(n)) => Some(effective_coupling(g, n)?),
            (None, None) => None,
            _ => {
                return Err(Error::InvalidConfig(
                    "g_times_xzpf and n_c must be given together".to_string(),
                ))
            }
        };
        match (self.g0, derived) {
            (Some(direct), Some(d)) => {
                let scale = direct.abs().max(d.abs()).max(T::min_positive_value());
                if (direct - d).abs() / scale > of(1.0e-9) {
                    Err(Error::InvalidConfig(format!(
                        "coupling over-specified and inconsistent: g0 = {direct}, g*x_zpf*sqrt(n_c) = {d}"
                    )))
                } else {
                    Ok(direct)
                }
            }
            (Some(direct), None) => Ok(direct),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::InvalidConfig(
                "coupling unspecified: give g0 or (g_times_xzpf, n_c)".to_string(),
            )),
        }
    }
}

/// Effective coupling G_0/2π = (g·x_zpf/2π)·√n_c (Hz).
pub fn effective_coupling<T: Real>(g_times_xzpf: T, n_c: T) -> Result<T> {
    if !n_c.is_finite() || n_c < T::zero() {
        return Err(Error::Domain(format!(
            "photon number must be finite and non-negative (got {n_c})"
        )));
    }
    Ok(g_times_xzpf * n_c.sqrt())
}

/// Zero-point displacement x_zpf = √(ħ / (2 m ω_m)) (m) for an effective
/// mass in kg and mechanical frequency f_m = ω_m/2π in Hz.
pub fn zero_point_fluctuation<T: Real>(mass_kg: T, f_m: T) -> Result<T> {
    if !(mass_kg.is_finite() && f_m.is_finite()) || mass_kg <= T::zero() || f_m <= T::zero() {
        return Err(Error::Domain(format!(
            "mass and frequency must be positive and finite (got m = {mass_kg}, f_m = {f_m})"
        )));
    }
    let omega = T::TAU() * f_m;
    Ok((of::<T>(HBAR) / (of::<T>(2.0) * mass_kg * omega)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coupling_from_measured_photon_number() {
        // n_c = 1.5e6 photons at g*x_zpf = 1.633 kHz gives the 2 MHz working point.
        let g0 = effective_coupling(1632.9931618554522_f64, 1.5e6).unwrap();
        assert_relative_eq!(g0, 2.0e6, max_relative = 1e-12);
    }

    #[test]
    fn coupling_vanishes_with_empty_cavity() {
        assert_eq!(effective_coupling(1.633e3_f64, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn coupling_scales_as_sqrt_photon_number() {
        // x4 photons is exactly x2 coupling (both ops exact in binary fp).
        let g = 1.7213e3_f64;
        let n = 8.31e5_f64;
        let g1 = effective_coupling(g, n).unwrap();
        let g2 = effective_coupling(g, 4.0 * n).unwrap();
        assert_eq!(g2, 2.0 * g1);
    }

    #[test]
    fn coupling_rejects_negative_photon_number() {
        assert!(matches!(
            effective_coupling(1.633e3_f64, -1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn zero_point_amplitude_of_reference_oscillator() {
        // Independently computed: sqrt(hbar / (2 * 1e-11 kg * 2pi * 108.4 MHz)).
        let x = zero_point_fluctuation(1.0e-11_f64, 108.4e6).unwrap();
        assert_relative_eq!(x, 8.798699939635699e-17, max_relative = 1e-12);
    }

    #[test]
    fn zero_point_amplitude_scaling_laws() {
        let x = zero_point_fluctuation(1.0e-11_f64, 108.4e6).unwrap();
        // Quadrupling the mass halves the amplitude, exactly in fp.
        assert_eq!(zero_point_fluctuation(4.0e-11, 108.4e6).unwrap(), x / 2.0);
        // Quadrupling the frequency halves it too.
        assert_eq!(zero_point_fluctuation(1.0e-11, 4.0 * 108.4e6).unwrap(), x / 2.0);
    }

    #[test]
    fn zero_point_amplitude_rejects_nonpositive_inputs() {
        assert!(zero_point_fluctuation(0.0_f64, 1.0e8).is_err());
        assert!(zero_point_fluctuation(1.0e-11_f64, -1.0).is_err());
    }

    #[test]
    fn experiment_defaults_are_valid_and_resolved_sideband() {
        let report = ResonatorParams::<f64>::experiment_defaults().validate();
        assert!(report.is_valid(), "violations: {:?}", report.violations);
        assert!(report.resolved_sideband); // 108.4 MHz > 40 MHz
    }

    #[test]
    fn validate_flags_bad_rates() {
        let mut p = ResonatorParams::<f64>::experiment_defaults();
        p.f_m = 0.0;
        p.kappa_ex = p.kappa * 2.0;
        let report = p.validate();
        assert!(!report.is_valid());
        assert_eq!(report.violations.len(), 2);
        assert!(!report.resolved_sideband);
    }

    #[test]
    fn good_cavity_is_not_resolved_sideband_flagged_as_such() {
        // kappa = 0.5 MHz << f_m: still resolved sideband (f_m > kappa).
        let report = ResonatorParams::<f64>::with_kappa(0.5e6).validate();
        assert!(report.is_valid());
        assert!(report.resolved_sideband);
    }

    #[test]
    fn drive_constructors_keep_the_identity() {
        let f_m = 108.4e6_f64;
        let d = DriveConfig::resonant(f_m);
        assert_eq!(d.detuning, 0.0);
        assert_eq!(d.delta_sl, f_m);
        d.check(f_m).unwrap();

        let d = DriveConfig::detuned(f_m, -2.0e6);
        assert_eq!(d.detuning, -2.0e6);
        assert_relative_eq!(d.delta_sl, 106.4e6, max_relative = 1e-12);
        d.check(f_m).unwrap();

        let broken = DriveConfig { delta_sl: f_m, detuning: 1.0e5 };
        assert!(broken.check(f_m).is_err());
    }

    #[test]
    fn coupling_spec_resolution_paths() {
        let direct = CouplingSpec::direct(2.0e6_f64);
        assert_eq!(direct.resolve().unwrap(), 2.0e6);

        let derived = CouplingSpec::from_photon_number(1632.9931618554522_f64, 1.5e6);
        assert_relative_eq!(derived.resolve().unwrap(), 2.0e6, max_relative = 1e-12);

        let consistent = CouplingSpec {
            g0: Some(2.0e6),
            ..CouplingSpec::from_photon_number(1632.9931618554522_f64, 1.5e6)
        };
        assert_relative_eq!(consistent.resolve().unwrap(), 2.0e6, max_relative = 1e-12);

        let inconsistent = CouplingSpec {
            g0: Some(3.0e6),
            ..CouplingSpec::from_photon_number(1632.9931618554522_f64, 1.5e6)
        };
        assert!(matches!(inconsistent.resolve(), Err(Error::InvalidConfig(_))));

        let half_given = CouplingSpec::<f64> {
            g_times_xzpf: Some(1.0e3),
            n_c: None,
            g0: None,
        };
        assert!(half_given.resolve().is_err());
        assert!(CouplingSpec::<f64>::default().resolve().is_err());
    }
}
