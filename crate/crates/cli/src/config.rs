//! Run configuration: sectioned key-value text with explicit units.
//!
//! A config file holds `[section]` headers and `key = value` lines; `#` or
//! `;` lines are comments. Frequencies take Hz/kHz/MHz/GHz suffixes, times
//! take s/ms/us/ns (us may be written with a mu), dimensionless values take
//! none. Sweep grids accept either a comma list (`0.3, 0.6, 1.4 us`, one
//! shared unit at the end) or an inclusive range `start:stop:step us`.
//! Every key has a default, so an empty file is a complete configuration.
//!
//! `emit` renders a config back to text, choosing for each value the unit
//! under which the printed decimal re-parses to the identical bits, so
//! emit-then-parse is the identity.

use std::fmt;

use lightstore::dynamics::{integrate, StepSize};
use lightstore::experiments::InputKind;
use lightstore::pulse::{PulseKind, PulseSpec as GenericPulseSpec};
use lightstore::{
    DriveConfig, GateConfig, IntegratorConfig, ModeState, PulseSequence, PulseSpec,
    ResonatorParams, Scenario, Trajectory,
};

const SECTIONS: [&str; 5] = ["model", "pulses", "integrator", "gate", "sweep"];

const MODEL_KEYS: &[&str] =
    &["f_m", "gamma_m", "kappa", "kappa_ex", "cavity_offset", "detuning"];
const PULSES_KEYS: &[&str] = &[
    "lo_amplitude",
    "modulation_depth",
    "writing_start",
    "writing_duration",
    "writing_ramp",
    "writing_coupling",
    "readout_start",
    "readout_duration",
    "readout_ramp",
    "readout_coupling",
];
const INTEGRATOR_KEYS: &[&str] = &["t_end", "dt", "input"];
const GATE_KEYS: &[&str] = &["center", "delay", "length", "rbw", "span"];
const SWEEP_KEYS: &[&str] = &[
    "delays",
    "readout_intensities",
    "detunings",
    "detuning_intensities",
    "readout_durations",
    "gate_delays",
];

/// Display units, largest first; the factor converts to the base unit.
const FREQ_UNITS: &[(&str, f64)] =
    &[("GHz", 1.0e9), ("MHz", 1.0e6), ("kHz", 1.0e3), ("Hz", 1.0)];
const TIME_UNITS: &[(&str, f64)] =
    &[("s", 1.0), ("ms", 1.0e-3), ("us", 1.0e-6), ("ns", 1.0e-9)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    Freq,
    Time,
    Plain,
}

/// Configuration failure with enough context to fix the file.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// One coupling pulse: placement plus peak coupling rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEntry {
    /// Leading edge (s).
    pub start: f64,
    /// Plateau length including ramps (s).
    pub duration: f64,
    /// Raised-cosine ramp length (s); 0 for a rectangle.
    pub ramp: f64,
    /// Peak coupling rate G0/2pi (Hz).
    pub coupling: f64,
}

impl PulseEntry {
    fn spec(&self, kind: PulseKind) -> PulseSpec {
        GenericPulseSpec::new(kind, self.start, self.duration, self.ramp, self.coupling)
    }

    fn from_spec(p: &PulseSpec) -> Self {
        PulseEntry { start: p.t_start, duration: p.duration, ramp: p.ramp, coupling: p.peak }
    }
}

/// Everything one invocation needs: resonator, drive, pulses, integration
/// grid, detection gate, and the sweep grids. Defaults describe the baseline
/// storage run, so any subset of keys yields a runnable configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // [model]
    pub f_m: f64,
    pub gamma_m: f64,
    pub kappa: f64,
    pub kappa_ex: f64,
    pub cavity_offset: f64,
    pub detuning: f64,
    // [pulses]
    pub lo_amplitude: f64,
    pub modulation_depth: f64,
    pub writing: PulseEntry,
    pub readout: PulseEntry,
    // [integrator]
    /// Run length (s); 0 resolves to readout end plus cavity ring-out.
    pub t_end: f64,
    /// Record step (s); 0 picks the step from the fastest rate.
    pub dt: f64,
    pub input: InputKind,
    // [gate]
    /// Analysis center frequency (Hz); 0 resolves to the mechanical one.
    pub gate_center: f64,
    pub gate_delay: f64,
    pub gate_length: f64,
    pub gate_rbw: f64,
    pub gate_span: f64,
    // [sweep]
    pub delays: Vec<f64>,
    pub readout_intensities: Vec<f64>,
    pub detunings: Vec<f64>,
    pub detuning_intensities: Vec<f64>,
    pub readout_durations: Vec<f64>,
    pub gate_delays: Vec<f64>,
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            f_m: 108.4e6,
            gamma_m: 38.0e3,
            kappa: 40.0e6,
            kappa_ex: 20.0e6,
            cavity_offset: 0.0,
            detuning: 0.0,
            lo_amplitude: 1.0e3,
            modulation_depth: 0.02,
            writing: PulseEntry { start: 0.0, duration: 2.0e-6, ramp: 50.0e-9, coupling: 0.7e6 },
            readout: PulseEntry {
                start: 4.0e-6,
                duration: 3.0e-6,
                ramp: 50.0e-9,
                coupling: 0.7e6,
            },
            t_end: 0.0,
            dt: 0.0,
            input: InputKind::IncidentFlux,
            gate_center: 0.0,
            gate_delay: 0.0,
            gate_length: lightstore::detection::DEFAULT_GATE_LENGTH,
            gate_rbw: lightstore::detection::DEFAULT_RBW,
            gate_span: lightstore::detection::DEFAULT_SPAN,
            delays: grid(0.5e-6, 12.0e-6, 0.5e-6),
            readout_intensities: vec![0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0],
            detunings: grid(-1.5e6, 1.5e6, 0.05e6),
            detuning_intensities: vec![1.0, 0.45],
            readout_durations: vec![0.3e-6, 0.6e-6, 1.4e-6],
            gate_delays: grid(1.5e-6, 8.5e-6, 0.25e-6),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{origin}: {e}")))?;
        Self::parse(&text, &origin)
    }

    /// Parse `text`, overlaying values onto the defaults. `origin` prefixes
    /// error messages (typically the file path).
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut section: Option<&'static str> = None;
        let mut seen: Vec<(String, usize)> = Vec::new();
        let at = |line: usize, msg: String| ConfigError(format!("{origin}: line {line}: {msg}"));

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return Err(at(line_no, format!("unterminated section header \"{line}\"")));
                };
                let name = name.trim();
                match SECTIONS.iter().find(|s| **s == name) {
                    Some(s) => section = Some(s),
                    None => return Err(at(line_no, unknown_name("section", name, &SECTIONS))),
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(at(
                    line_no,
                    format!("expected \"key = value\" or \"[section]\", got \"{line}\""),
                ));
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(sec) = section else {
                return Err(at(line_no, format!("key \"{key}\" appears before any [section]")));
            };
            let slot = format!("{sec}.{key}");
            if let Some((_, first)) = seen.iter().find(|(s, _)| *s == slot) {
                return Err(at(
                    line_no,
                    format!("duplicate key \"{key}\" in [{sec}] (first set on line {first})"),
                ));
            }
            seen.push((slot, line_no));
            cfg.assign(sec, key, value)
                .map_err(|msg| at(line_no, format!("key \"{key}\": {msg}")))?;
        }
        Ok(cfg)
    }

    fn assign(&mut self, section: &str, key: &str, value: &str) -> Result<(), String> {
        use Dim::{Freq, Plain, Time};
        match section {
            "model" => {
                let slot = match key {
                    "f_m" => &mut self.f_m,
                    "gamma_m" => &mut self.gamma_m,
                    "kappa" => &mut self.kappa,
                    "kappa_ex" => &mut self.kappa_ex,
                    "cavity_offset" => &mut self.cavity_offset,
                    "detuning" => &mut self.detuning,
                    _ => return Err(unknown_name("key", key, MODEL_KEYS)),
                };
                *slot = parse_scalar(Freq, value)?;
            }
            "pulses" => match key {
                "lo_amplitude" => self.lo_amplitude = parse_scalar(Plain, value)?,
                "modulation_depth" => self.modulation_depth = parse_scalar(Plain, value)?,
                "writing_start" => self.writing.start = parse_scalar(Time, value)?,
                "writing_duration" => self.writing.duration = parse_scalar(Time, value)?,
                "writing_ramp" => self.writing.ramp = parse_scalar(Time, value)?,
                "writing_coupling" => self.writing.coupling = parse_scalar(Freq, value)?,
                "readout_start" => self.readout.start = parse_scalar(Time, value)?,
                "readout_duration" => self.readout.duration = parse_scalar(Time, value)?,
                "readout_ramp" => self.readout.ramp = parse_scalar(Time, value)?,
                "readout_coupling" => self.readout.coupling = parse_scalar(Freq, value)?,
                _ => return Err(unknown_name("key", key, PULSES_KEYS)),
            },
            "integrator" => match key {
                "t_end" => self.t_end = parse_scalar(Time, value)?,
                "dt" => self.dt = parse_scalar(Time, value)?,
                "input" => self.input = parse_input(value)?,
                _ => return Err(unknown_name("key", key, INTEGRATOR_KEYS)),
            },
            "gate" => match key {
                "center" => self.gate_center = parse_scalar(Freq, value)?,
                "delay" => self.gate_delay = parse_scalar(Time, value)?,
                "length" => self.gate_length = parse_scalar(Time, value)?,
                "rbw" => self.gate_rbw = parse_scalar(Freq, value)?,
                "span" => self.gate_span = parse_scalar(Freq, value)?,
                _ => return Err(unknown_name("key", key, GATE_KEYS)),
            },
            "sweep" => match key {
                "delays" => self.delays = parse_list(Time, value)?,
                "readout_intensities" => self.readout_intensities = parse_list(Plain, value)?,
                "detunings" => self.detunings = parse_list(Freq, value)?,
                "detuning_intensities" => {
                    self.detuning_intensities = parse_list(Plain, value)?;
                }
                "readout_durations" => self.readout_durations = parse_list(Time, value)?,
                "gate_delays" => self.gate_delays = parse_list(Time, value)?,
                _ => return Err(unknown_name("key", key, SWEEP_KEYS)),
            },
            other => return Err(format!("unknown section \"{other}\"")),
        }
        Ok(())
    }

    /// Fill the auto fields (t_end, gate center) from the rest of the
    /// configuration. Explicit values pass through unchanged, so resolving
    /// twice is a no-op; dt = 0 stays 0 and is resolved by the integrator.
    pub fn resolve(&mut self) {
        if self.gate_center == 0.0 {
            self.gate_center = self.f_m;
        }
        if self.t_end == 0.0 {
            let ring = if self.kappa > 0.0 {
                5.0 / (std::f64::consts::TAU * self.kappa)
            } else {
                0.0
            };
            self.t_end = self.readout.start + self.readout.duration + ring + 5.0e-8;
        }
    }

    /// Every violated invariant, one message each; empty means runnable.
    /// Call after [`RunConfig::resolve`] so the auto fields are concrete.
    pub fn violations(&self) -> Vec<String> {
        let mut out = self.params().validate().violations;
        if let Err(e) = self.drive().check(self.f_m) {
            out.push(e.to_string());
        }
        let seq = self.sequence();
        if let Err(e) = seq.validate() {
            out.push(e.to_string());
        }
        for (name, v) in [
            ("pulses.lo_amplitude", self.lo_amplitude),
            ("pulses.modulation_depth", self.modulation_depth),
        ] {
            if !v.is_finite() || v < 0.0 {
                out.push(format!("{name} must be finite and nonnegative (got {v})"));
            }
        }
        for (name, v) in [
            ("gate.center", self.gate_center),
            ("gate.length", self.gate_length),
            ("gate.rbw", self.gate_rbw),
            ("gate.span", self.gate_span),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                out.push(format!("{name} must be positive (got {v})"));
            }
        }
        if !self.gate_delay.is_finite() {
            out.push(format!("gate.delay must be finite (got {})", self.gate_delay));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            out.push(format!("integrator.t_end must be positive (got {})", self.t_end));
        } else if self.t_end < seq.span_end() {
            out.push(format!(
                "integrator.t_end = {} s ends before the pulse sequence does ({} s)",
                self.t_end,
                seq.span_end()
            ));
        }
        if self.dt < 0.0 || !self.dt.is_finite() {
            out.push(format!("integrator.dt must be 0 (auto) or positive (got {})", self.dt));
        } else if self.dt > 0.0 && self.dt >= self.t_end {
            out.push(format!(
                "integrator.dt = {} s is not smaller than t_end = {} s",
                self.dt, self.t_end
            ));
        }
        for (name, vals, need_positive) in [
            ("sweep.delays", &self.delays, true),
            ("sweep.readout_intensities", &self.readout_intensities, true),
            ("sweep.detunings", &self.detunings, false),
            ("sweep.detuning_intensities", &self.detuning_intensities, true),
            ("sweep.readout_durations", &self.readout_durations, true),
            ("sweep.gate_delays", &self.gate_delays, false),
        ] {
            if vals.is_empty() {
                out.push(format!("{name} must not be empty"));
            }
            for v in vals {
                if !v.is_finite() || (need_positive && !(*v > 0.0)) {
                    out.push(format!(
                        "{name} entries must be {} (got {v})",
                        if need_positive { "positive" } else { "finite" }
                    ));
                    break;
                }
            }
        }
        out
    }

    pub fn params(&self) -> ResonatorParams {
        ResonatorParams {
            f_m: self.f_m,
            gamma_m: self.gamma_m,
            kappa: self.kappa,
            kappa_ex: self.kappa_ex,
            f_cavity_offset: self.cavity_offset,
        }
    }

    pub fn drive(&self) -> DriveConfig {
        DriveConfig::detuned(self.f_m, self.detuning)
    }

    pub fn sequence(&self) -> PulseSequence {
        PulseSequence::new(vec![
            self.writing.spec(PulseKind::Writing),
            self.readout.spec(PulseKind::Readout),
        ])
        .with_lo_amplitude(self.lo_amplitude)
        .with_modulation_depth(self.modulation_depth)
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::new(self.params(), self.drive(), self.sequence(), self.t_end, self.input)
    }

    pub fn gate(&self) -> GateConfig {
        GateConfig::around(self.gate_center, self.gate_delay)
            .with_gate_length(self.gate_length)
            .with_rbw(self.gate_rbw)
            .with_span(self.gate_span)
    }

    /// Integrate the configured run, honoring an explicit dt when given.
    pub fn trajectory(&self) -> lightstore::Result<Trajectory> {
        let sc = self.scenario();
        if self.dt > 0.0 {
            let mut icfg = IntegratorConfig::to(sc.t_end);
            icfg.step = StepSize::Fixed(self.dt);
            if sc.input == InputKind::CavityLoad {
                icfg = icfg.with_initial(ModeState::cavity_loaded());
            }
            integrate(&sc.params, &sc.drive, &sc.seq, &icfg)
        } else {
            sc.run()
        }
    }

    /// Configuration equivalent to a built scenario; used to echo preset
    /// runs into manifests. Gate and sweep settings keep their defaults.
    pub fn from_scenario(sc: &Scenario) -> Self {
        let mut cfg = RunConfig::default();
        cfg.f_m = sc.params.f_m;
        cfg.gamma_m = sc.params.gamma_m;
        cfg.kappa = sc.params.kappa;
        cfg.kappa_ex = sc.params.kappa_ex;
        cfg.cavity_offset = sc.params.f_cavity_offset;
        cfg.detuning = sc.drive.detuning;
        cfg.lo_amplitude = sc.seq.lo_amplitude;
        cfg.modulation_depth = sc.seq.modulation_depth;
        if let Some(p) = sc.seq.writing() {
            cfg.writing = PulseEntry::from_spec(p);
        }
        if let Some(p) = sc.seq.readout() {
            cfg.readout = PulseEntry::from_spec(p);
        }
        cfg.t_end = sc.t_end;
        cfg.input = sc.input;
        cfg
    }

    /// Render to config text. Parsing the result reproduces this value
    /// bit for bit.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        s.push_str("[model]\n");
        s.push_str(&kv("f_m", &freq(self.f_m)));
        s.push_str(&kv("gamma_m", &freq(self.gamma_m)));
        s.push_str(&kv("kappa", &freq(self.kappa)));
        s.push_str(&kv("kappa_ex", &freq(self.kappa_ex)));
        s.push_str(&kv("cavity_offset", &freq(self.cavity_offset)));
        s.push_str(&kv("detuning", &freq(self.detuning)));
        s.push_str("\n[pulses]\n");
        s.push_str(&kv("lo_amplitude", &plain(self.lo_amplitude)));
        s.push_str(&kv("modulation_depth", &plain(self.modulation_depth)));
        for (tag, p) in [("writing", &self.writing), ("readout", &self.readout)] {
            s.push_str(&kv(&format!("{tag}_start"), &time(p.start)));
            s.push_str(&kv(&format!("{tag}_duration"), &time(p.duration)));
            s.push_str(&kv(&format!("{tag}_ramp"), &time(p.ramp)));
            s.push_str(&kv(&format!("{tag}_coupling"), &freq(p.coupling)));
        }
        s.push_str("\n[integrator]\n");
        s.push_str("# t_end = 0 s resolves to readout end + ring-out; dt = 0 s picks the step\n");
        s.push_str(&kv("t_end", &time(self.t_end)));
        s.push_str(&kv("dt", &time(self.dt)));
        let input = match self.input {
            InputKind::IncidentFlux => "incident-flux",
            InputKind::CavityLoad => "cavity-load",
        };
        s.push_str(&kv("input", input));
        s.push_str("\n[gate]\n");
        s.push_str("# center = 0 Hz resolves to the mechanical frequency\n");
        s.push_str(&kv("center", &freq(self.gate_center)));
        s.push_str(&kv("delay", &time(self.gate_delay)));
        s.push_str(&kv("length", &time(self.gate_length)));
        s.push_str(&kv("rbw", &freq(self.gate_rbw)));
        s.push_str(&kv("span", &freq(self.gate_span)));
        s.push_str("\n[sweep]\n");
        s.push_str(&kv("delays", &time_list(&self.delays)));
        s.push_str(&kv("readout_intensities", &plain_list(&self.readout_intensities)));
        s.push_str(&kv("detunings", &freq_list(&self.detunings)));
        s.push_str(&kv("detuning_intensities", &plain_list(&self.detuning_intensities)));
        s.push_str(&kv("readout_durations", &time_list(&self.readout_durations)));
        s.push_str(&kv("gate_delays", &time_list(&self.gate_delays)));
        s
    }
}

fn kv(key: &str, value: &str) -> String {
    format!("{key} = {value}\n")
}

fn parse_input(value: &str) -> Result<InputKind, String> {
    match value {
        "incident-flux" => Ok(InputKind::IncidentFlux),
        "cavity-load" => Ok(InputKind::CavityLoad),
        other => {
            Err(format!("input must be \"incident-flux\" or \"cavity-load\", got \"{other}\""))
        }
    }
}

fn unknown_name(what: &str, got: &str, valid: &[&str]) -> String {
    let best = valid
        .iter()
        .min_by_key(|k| strsim::levenshtein(got, k))
        .expect("non-empty candidate list");
    if strsim::levenshtein(got, best) <= 3 {
        format!("unknown {what} \"{got}\"; closest valid {what} is \"{best}\"")
    } else {
        format!("unknown {what} \"{got}\"; valid: {}", valid.join(", "))
    }
}

/// Split a trailing unit token off a value. The token must be whitespace
/// separated and must not look like a number.
fn split_unit(raw: &str) -> (&str, Option<&str>) {
    match raw.rsplit_once(char::is_whitespace) {
        Some((head, tail))
            if !tail.is_empty()
                && !tail
                    .starts_with(|c: char| c.is_ascii_digit() || c == '+' || c == '-' || c == '.') =>
        {
            (head.trim_end(), Some(tail))
        }
        _ => (raw, None),
    }
}

fn freq_factor(unit: &str) -> Option<f64> {
    FREQ_UNITS.iter().find(|(u, _)| *u == unit).map(|(_, f)| *f)
}

fn time_factor(unit: &str) -> Option<f64> {
    match unit {
        "us" | "\u{3bc}s" | "\u{b5}s" => Some(1.0e-6),
        _ => TIME_UNITS.iter().find(|(u, _)| *u == unit).map(|(_, f)| *f),
    }
}

fn dimension_factor(dim: Dim, unit: Option<&str>) -> Result<f64, String> {
    match (dim, unit) {
        (Dim::Plain, None) => Ok(1.0),
        (Dim::Plain, Some(u)) => {
            Err(format!("this value is dimensionless; drop the unit \"{u}\""))
        }
        (Dim::Freq, None) => Err("missing frequency unit (Hz, kHz, MHz, or GHz)".to_string()),
        (Dim::Time, None) => Err("missing time unit (s, ms, us, or ns)".to_string()),
        (Dim::Freq, Some(u)) => freq_factor(u)
            .ok_or_else(|| format!("unknown frequency unit \"{u}\" (use Hz, kHz, MHz, or GHz)")),
        (Dim::Time, Some(u)) => time_factor(u)
            .ok_or_else(|| format!("unknown time unit \"{u}\" (use s, ms, us, or ns)")),
    }
}

fn parse_number(tok: &str) -> Result<f64, String> {
    let tok = tok.trim();
    let v: f64 = tok.parse().map_err(|_| format!("expected a number, got \"{tok}\""))?;
    if !v.is_finite() {
        return Err(format!("value must be finite, got \"{tok}\""));
    }
    Ok(v)
}

fn parse_scalar(dim: Dim, raw: &str) -> Result<f64, String> {
    let (nums, unit) = split_unit(raw);
    let factor = dimension_factor(dim, unit)?;
    if nums.contains(',') || nums.contains(':') {
        return Err(format!("expected a single value, got a list \"{raw}\""));
    }
    Ok(parse_number(nums)? * factor)
}

fn parse_list(dim: Dim, raw: &str) -> Result<Vec<f64>, String> {
    let (nums, unit) = split_unit(raw);
    let factor = dimension_factor(dim, unit)?;
    if nums.contains(':') {
        if nums.contains(',') {
            return Err("use a comma list or start:stop:step, not both".to_string());
        }
        let parts: Vec<&str> = nums.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range form is start:stop:step, got \"{nums}\""));
        }
        let start = parse_number(parts[0])?;
        let stop = parse_number(parts[1])?;
        let step = parse_number(parts[2])?;
        if !(step > 0.0) {
            return Err(format!("range step must be positive, got {step}"));
        }
        if stop < start {
            return Err(format!("range stop {stop} lies before start {start}"));
        }
        let n = ((stop - start) / step).round();
        if n > 1.0e7 {
            return Err("range holds more than ten million points".to_string());
        }
        return Ok((0..=n as usize).map(|k| (start + k as f64 * step) * factor).collect());
    }
    nums.split(',').map(|tok| parse_number(tok).map(|v| v * factor)).collect()
}

/// Shortest decimal for `v` (always reparses to the same bits).
pub fn plain(v: f64) -> String {
    format!("{v}")
}

fn preferred_unit(amax: f64, units: &'static [(&str, f64)]) -> (&'static str, f64) {
    *units
        .iter()
        .find(|(_, f)| amax >= *f)
        .unwrap_or_else(|| units.last().expect("unit table is non-empty"))
}

/// Scale check: does `text * factor` reproduce `v` exactly?
fn reparses(text: &str, factor: f64, v: f64) -> bool {
    text.parse::<f64>().map(|r| (r * factor).to_bits() == v.to_bits()).unwrap_or(false)
}

fn scaled(v: f64, units: &'static [(&str, f64)], base: &str) -> String {
    if v == 0.0 {
        // Covers both zero signs: Display keeps the minus.
        return format!("{} {base}", plain(v));
    }
    let (name, factor) = preferred_unit(v.abs(), units);
    let text = plain(v / factor);
    if reparses(&text, factor, v) {
        return format!("{text} {name}");
    }
    // The base factor is exactly 1, so the shortest decimal always survives.
    format!("{} {base}", plain(v))
}

fn scaled_list(vals: &[f64], units: &'static [(&str, f64)], base: &str) -> String {
    let amax = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if amax > 0.0 {
        let (name, factor) = preferred_unit(amax, units);
        let texts: Vec<String> = vals.iter().map(|v| plain(v / factor)).collect();
        if vals.iter().zip(&texts).all(|(v, t)| reparses(t, factor, *v)) {
            return format!("{} {name}", texts.join(", "));
        }
    }
    let texts: Vec<String> = vals.iter().map(|v| plain(*v)).collect();
    format!("{} {base}", texts.join(", "))
}

fn freq(v: f64) -> String {
    scaled(v, FREQ_UNITS, "Hz")
}

fn time(v: f64) -> String {
    scaled(v, TIME_UNITS, "s")
}

fn freq_list(vals: &[f64]) -> String {
    scaled_list(vals, FREQ_UNITS, "Hz")
}

fn time_list(vals: &[f64]) -> String {
    scaled_list(vals, TIME_UNITS, "s")
}

fn plain_list(vals: &[f64]) -> String {
    vals.iter().map(|v| plain(*v)).collect::<Vec<_>>().join(", ")
}
