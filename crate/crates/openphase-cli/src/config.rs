//! Run configuration: TOML sections `pulse`, `schedule`, `grid`, `run`, `output`.
//!
//! Every field is optional in the file; missing values are resolved from the
//! selected figure (or the reference parameters) and the resolved configuration
//! is echoed into each output.

use std::path::Path;

use openphase::holonomy::{FieldPath, ThetaGrid, TrackOptions, ALL_LABELS};
use openphase::lindblad::DecayRates;
use openphase::stirap::PulseParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::figures::{FigureId, RatePoint};

/// Smallest accepted grid size.
pub const MIN_POINTS: usize = 100;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    pulse: Option<RawPulse>,
    schedule: Option<RawSchedule>,
    grid: Option<RawGrid>,
    run: Option<RawRun>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPulse {
    g01: Option<f64>,
    g02: Option<f64>,
    t0: Option<f64>,
    tau: Option<f64>,
    phi: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    figure: Option<String>,
    points: Option<Vec<RatePoint>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    points: Option<usize>,
    t_min: Option<f64>,
    t_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    labels: Option<Vec<u8>>,
    seed: Option<u64>,
    threads: Option<usize>,
    lenient: Option<bool>,
    field_path: Option<FieldPathKind>,
    field_norm: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseConfig {
    pub g01: f64,
    pub g02: f64,
    pub t0: f64,
    pub tau: f64,
    pub phi: f64,
}

impl PulseConfig {
    pub fn params(&self) -> PulseParams {
        PulseParams { g01: self.g01, g02: self.g02, t0: self.t0, tau: self.tau, phi: self.phi }
    }
}

impl From<PulseParams> for PulseConfig {
    fn from(p: PulseParams) -> Self {
        PulseConfig { g01: p.g01, g02: p.g02, t0: p.t0, tau: p.tau, phi: p.phi }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleConfig {
    /// Built-in figure; its schedule is expanded at run time.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_figure")]
    pub figure: Option<FigureId>,
    /// Explicit schedule, used when no figure is selected.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<RatePoint>,
}

fn serialize_figure<S: serde::Serializer>(figure: &Option<FigureId>, s: S) -> Result<S::Ok, S::Error> {
    match figure {
        Some(id) => s.serialize_str(id.name()),
        None => s.serialize_none(),
    }
}

impl ScheduleConfig {
    /// Schedule points in run order.
    pub fn expanded(&self) -> Vec<RatePoint> {
        match self.figure {
            Some(id) => id.schedule(),
            None => self.points.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    pub points: usize,
    pub t_min: f64,
    pub t_max: f64,
}

/// Field amplitudes along the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldPathKind {
    /// Fixed norm √((g01² + g02²)/2).
    Reference,
    /// Fixed norm `field_norm`.
    Fixed,
    /// Literal pulse amplitudes.
    Pulsed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOptions {
    pub labels: Vec<u8>,
    /// Seed for randomized batteries; sweeps are deterministic without it.
    pub seed: u64,
    /// Worker threads; 0 picks the number of available cores.
    pub threads: usize,
    /// Report degenerate or poorly tracked labels instead of failing them.
    pub lenient: bool,
    pub field_path: FieldPathKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: String,
    /// File stem of the outputs.
    pub name: String,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub pulse: PulseConfig,
    pub schedule: ScheduleConfig,
    pub grid: GridConfig,
    pub run: RunOptions,
    pub output: OutputConfig,
}

impl RunConfig {
    /// Defaults of a built-in figure.
    pub fn for_figure(id: FigureId) -> Self {
        let (t_min, t_max) = id.window();
        RunConfig {
            pulse: id.pulse().into(),
            schedule: ScheduleConfig { figure: Some(id), points: Vec::new() },
            grid: GridConfig { points: ThetaGrid::DEFAULT_POINTS, t_min, t_max },
            run: RunOptions {
                labels: id.labels(),
                seed: 0,
                threads: 0,
                lenient: false,
                field_path: FieldPathKind::Reference,
                field_norm: None,
            },
            output: OutputConfig { dir: ".".to_string(), name: id.file_stem() },
        }
    }

    /// Parse TOML text, resolve defaults and validate.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::ConfigParse(e.to_string()))?;
        let schedule = raw.schedule.unwrap_or_default();
        let figure = schedule.figure.as_deref().map(str::parse::<FigureId>).transpose()?;
        if figure.is_some() && schedule.points.is_some() {
            return Err(CliError::InvalidConfig {
                field: "schedule",
                reason: "give either 'figure' or 'points', not both".to_string(),
            });
        }
        let mut config = match figure {
            Some(id) => RunConfig::for_figure(id),
            None => {
                let mut base = RunConfig::for_figure(FigureId::Emission);
                base.schedule = ScheduleConfig { figure: None, points: schedule.points.unwrap_or_default() };
                base.output.name = "sweep".to_string();
                base
            }
        };

        let pulse = raw.pulse.unwrap_or_default();
        let p = &mut config.pulse;
        p.g01 = pulse.g01.unwrap_or(p.g01);
        p.g02 = pulse.g02.unwrap_or(p.g02);
        p.t0 = pulse.t0.unwrap_or(p.t0);
        p.tau = pulse.tau.unwrap_or(p.tau);
        p.phi = pulse.phi.unwrap_or(p.phi);

        let grid = raw.grid.unwrap_or_default();
        let g = &mut config.grid;
        g.points = grid.points.unwrap_or(g.points);
        g.t_min = grid.t_min.unwrap_or(g.t_min);
        g.t_max = grid.t_max.unwrap_or(g.t_max);

        let run = raw.run.unwrap_or_default();
        let r = &mut config.run;
        r.labels = run.labels.unwrap_or_else(|| r.labels.clone());
        r.seed = run.seed.unwrap_or(r.seed);
        r.threads = run.threads.unwrap_or(r.threads);
        r.lenient = run.lenient.unwrap_or(r.lenient);
        r.field_path = run.field_path.unwrap_or(r.field_path);
        r.field_norm = run.field_norm;

        let output = raw.output.unwrap_or_default();
        config.output.dir = output.dir.unwrap_or(config.output.dir);
        config.output.name = output.name.unwrap_or(config.output.name);

        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let invalid = |field, reason: &str| Err(CliError::InvalidConfig { field, reason: reason.to_string() });
        self.pulse.params().validate()?;
        if self.grid.points < MIN_POINTS {
            return invalid("grid.points", "at least 100 points are required");
        }
        if !(self.grid.t_min < 0.0 && 0.0 < self.grid.t_max)
            || !self.grid.t_min.is_finite()
            || !self.grid.t_max.is_finite()
        {
            return invalid("grid", "t_min < 0 < t_max is required");
        }
        if self.run.labels.is_empty() {
            return invalid("run.labels", "at least one label is required");
        }
        if let Some(&label) = self.run.labels.iter().find(|l| !ALL_LABELS.contains(l)) {
            return Err(CliError::InvalidConfig {
                field: "run.labels",
                reason: format!("label {label} is not in 1..=9"),
            });
        }
        match (self.run.field_path, self.run.field_norm) {
            (FieldPathKind::Fixed, Some(norm)) if norm > 0.0 && norm.is_finite() => {}
            (FieldPathKind::Fixed, _) => return invalid("run.field_norm", "a positive field_norm is required"),
            (_, Some(_)) => return invalid("run.field_norm", "field_norm applies to field_path = \"fixed\" only"),
            _ => {}
        }
        for point in &self.schedule.points {
            self::rates(point)?;
        }
        if self.output.name.is_empty() || self.output.name.contains(['/', '\\']) {
            return invalid("output.name", "a plain file stem is required");
        }
        Ok(())
    }

    /// Tracking options implied by the `run` section.
    pub fn track_options(&self) -> TrackOptions {
        let field_path = match self.run.field_path {
            FieldPathKind::Reference => FieldPath::ReferenceNorm,
            FieldPathKind::Fixed => FieldPath::FixedNorm(self.run.field_norm.unwrap_or_default()),
            FieldPathKind::Pulsed => FieldPath::Pulsed,
        };
        TrackOptions { field_path, lenient: self.run.lenient, ..TrackOptions::default() }
    }

    /// The resolved configuration as TOML.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

/// Decay rates of a schedule point.
pub fn rates(point: &RatePoint) -> Result<DecayRates, CliError> {
    Ok(DecayRates::new(point.gamma13, point.gamma23, point.gamma12, point.gamma21)?)
}
