//! Project file: where the inputs are, what period to run and how.

use std::path::{Path, PathBuf};

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::airflow::AirflowOptions;
use crate::building::{case_study_building, parse_building, Building};
use crate::error::{Error, Result};
use crate::thermal::CouplingOptions;

/// Building reference resolving to the bundled case study.
pub const BUILTIN_CASE_STUDY: &str = "builtin:case_study";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub start: NaiveDateTime,
    /// Inclusive.
    pub end: NaiveDateTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub convection_criterion: f64,
    pub max_convection_iterations: u32,
    pub coupling_criterion: f64,
    pub max_coupling_sweeps: u32,
    pub airflow_tolerance: f64,
    pub max_airflow_iterations: u32,
    /// Extra airflow/thermal passes within a step; 0 uses the previous
    /// step's temperatures for the airflow.
    pub airflow_outer_iterations: u32,
    /// Repetitions of the first day before the reported period.
    pub warmup_days: u32,
    /// Every HVAC system delivers whatever power its setpoint needs.
    pub sizing: bool,
    /// Also write per-surface results.
    pub verbose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        let c = CouplingOptions::default();
        let a = AirflowOptions::default();
        Self {
            convection_criterion: c.convection_criterion,
            max_convection_iterations: c.max_convection_iterations,
            coupling_criterion: c.criterion,
            max_coupling_sweeps: c.max_sweeps,
            airflow_tolerance: a.tolerance,
            max_airflow_iterations: a.max_iterations,
            airflow_outer_iterations: 0,
            warmup_days: 3,
            sizing: false,
            verbose: false,
        }
    }
}

impl SolverOptions {
    pub fn coupling(&self) -> CouplingOptions {
        CouplingOptions {
            criterion: self.coupling_criterion,
            max_sweeps: self.max_coupling_sweeps,
            convection_criterion: self.convection_criterion,
            max_convection_iterations: self.max_convection_iterations,
        }
    }

    pub fn airflow(&self) -> AirflowOptions {
        AirflowOptions {
            tolerance: self.airflow_tolerance,
            max_iterations: self.max_airflow_iterations,
            ..AirflowOptions::default()
        }
    }

    fn check(&self) -> Result<()> {
        let positive = [
            ("convection_criterion", self.convection_criterion),
            ("coupling_criterion", self.coupling_criterion),
            ("airflow_tolerance", self.airflow_tolerance),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Config(format!("solver.{name} must be > 0")));
            }
        }
        let counts = [
            ("max_convection_iterations", self.max_convection_iterations),
            ("max_coupling_sweeps", self.max_coupling_sweeps),
            ("max_airflow_iterations", self.max_airflow_iterations),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("solver.{name} must be >= 1")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum BuildingSource {
    Path(String),
    Inline(Box<serde_json::Value>),
}

fn default_results() -> String {
    "results".into()
}

fn default_timestep() -> f64 {
    3600.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectFile {
    weather: String,
    building: BuildingSource,
    #[serde(default = "default_results")]
    results: String,
    #[serde(default)]
    period: Option<Period>,
    #[serde(default = "default_timestep")]
    timestep: f64,
    #[serde(default)]
    solver: SolverOptions,
    #[serde(default)]
    focus_zone: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Project {
    pub weather: PathBuf,
    pub building: Building,
    /// Output directory.
    pub results: PathBuf,
    pub period: Option<Period>,
    /// Seconds.
    pub timestep: f64,
    pub solver: SolverOptions,
    pub focus_zone: Option<String>,
}

impl Project {
    /// A project around an in-memory building, with default settings.
    pub fn new(building: Building, weather: impl Into<PathBuf>) -> Self {
        Self {
            weather: weather.into(),
            building,
            results: PathBuf::from(default_results()),
            period: None,
            timestep: default_timestep(),
            solver: SolverOptions::default(),
            focus_zone: None,
        }
    }

    /// The zone whose results the comparisons report: the configured one,
    /// else the first zone with an HVAC system, else the first zone.
    pub fn focus_zone(&self) -> Option<usize> {
        if let Some(name) = &self.focus_zone {
            return self.building.zone_index(name);
        }
        let models = crate::thermal::compile_zones(&self.building);
        models.iter().position(|m| m.hvac.is_some()).or(if models.is_empty() { None } else { Some(0) })
    }

    pub fn check(&self) -> Result<()> {
        self.solver.check()?;
        if !(self.timestep > 0.0) || (86_400.0 / self.timestep).fract() != 0.0 {
            return Err(Error::Config(format!(
                "timestep {} s must be positive and divide a day",
                self.timestep
            )));
        }
        if let Some(p) = &self.period {
            if p.end < p.start {
                return Err(Error::Config(format!("period ends ({}) before it starts ({})", p.end, p.start)));
            }
        }
        if let Some(name) = &self.focus_zone {
            if self.building.zone_index(name).is_none() {
                return Err(Error::Config(format!("focus_zone \"{name}\" is not a zone")));
            }
        }
        Ok(())
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = Path::new(p);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

/// Reads a building from a path, or the bundled case study.
pub fn load_building(path: &Path) -> Result<Building> {
    if path.as_os_str() == BUILTIN_CASE_STUDY {
        return Ok(case_study_building());
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_building(&text)
}

/// Parses a project document; relative paths are taken from `base`.
pub fn parse_project(text: &str, base: &Path) -> Result<Project> {
    let file: ProjectFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let building = match file.building {
        BuildingSource::Path(p) if p == BUILTIN_CASE_STUDY => case_study_building(),
        BuildingSource::Path(p) => load_building(&resolve(base, &p))?,
        BuildingSource::Inline(v) => parse_building(&v.to_string())?,
    };
    let project = Project {
        weather: resolve(base, &file.weather),
        building,
        results: resolve(base, &file.results),
        period: file.period,
        timestep: file.timestep,
        solver: file.solver,
        focus_zone: file.focus_zone,
    };
    project.check()?;
    Ok(project)
}

pub fn load_project(path: &Path) -> Result<Project> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_project(&text, base)
}
