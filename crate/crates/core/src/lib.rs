//! Virtual optomechanical light-storage experiment.
//!
//! Simulates a driven optical cavity mode coupled to a mechanical oscillator
//! by pulsed, linearized beam-splitter interaction, then emulates the
//! heterodyne detection chain (local-oscillator beat, gated power spectra)
//! used to characterize storage and retrieval of optical pulses.
//!
//! Everything is generic over the scalar type through [`float::Real`];
//! `f64`-concrete aliases live at the crate root.

pub mod detection;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod float;
pub mod model;
pub mod pulse;

pub use error::{Error, Result};
pub use float::Real;

/// `f64` resonator parameter set.
pub type ResonatorParams = model::ResonatorParams<f64>;
/// `f64` drive configuration.
pub type DriveConfig = model::DriveConfig<f64>;
/// `f64` coupling specification.
pub type CouplingSpec = model::CouplingSpec<f64>;
/// `f64` pulse description.
pub type PulseSpec = pulse::PulseSpec<f64>;
/// `f64` pulse chain.
pub type PulseSequence = pulse::PulseSequence<f64>;
/// `f64` gate settings.
pub type GateConfig = detection::GateConfig<f64>;
/// `f64` detected-power series.
pub type BeatSeries = detection::BeatSeries<f64>;
/// `f64` gated spectrum.
pub type PowerSpectrum = detection::PowerSpectrum<f64>;
/// `f64` integrator configuration.
pub type IntegratorConfig = dynamics::IntegratorConfig<f64>;
/// `f64` mode pair.
pub type ModeState = dynamics::ModeState<f64>;
/// `f64` recorded time series.
pub type Trajectory = dynamics::Trajectory<f64>;
/// `f64` experiment description.
pub type Scenario = experiments::Scenario<f64>;
/// `f64` storage run with energy bookkeeping.
pub type TemporalProfile = experiments::TemporalProfile<f64>;
/// `f64` sweep curve.
pub type SweepResult = experiments::sweeps::SweepResult<f64>;
/// `f64` gate-delay scan.
pub type GateScan = experiments::sweeps::GateScan<f64>;
/// `f64` fit summary.
pub type FitRecord = experiments::fit::FitRecord<f64>;
/// `f64` preset output.
pub type PresetData = experiments::presets::PresetData<f64>;
