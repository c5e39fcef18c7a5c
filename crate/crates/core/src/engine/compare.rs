//! Runs of one project under different interior convection assignments,
//! compared against a reference run.

use std::path::Path;

use serde::Serialize;

use super::project::Project;
use super::results::{format_value, write_outputs};
use super::run::{run_simulation, IterationStats, SimulationOutput};
use super::weather::WeatherSeries;
use crate::error::{Error, Result};
use crate::thermal::ConvectionModel;

/// A named convection assignment. Zones not listed keep their model unless
/// `others` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub label: String,
    pub zones: Vec<(String, ConvectionModel)>,
    pub others: Option<ConvectionModel>,
}

impl CaseSpec {
    /// Parses `LABEL=zone:model,zone:model,*:model`.
    pub fn parse(text: &str) -> Result<Self> {
        let (label, body) = text
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("case \"{text}\" needs LABEL=zone:model,...")))?;
        let mut spec = CaseSpec { label: label.trim().to_string(), zones: vec![], others: None };
        if spec.label.is_empty() {
            return Err(Error::Config(format!("case \"{text}\" has an empty label")));
        }
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (zone, model) = item
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("case item \"{item}\" needs zone:model")))?;
            let model = ConvectionModel::from_label(model.trim())
                .ok_or_else(|| Error::Config(format!("unknown convection model \"{}\"", model.trim())))?;
            match zone.trim() {
                "*" => spec.others = Some(model),
                z => spec.zones.push((z.to_string(), model)),
            }
        }
        Ok(spec)
    }

    pub fn apply(&self, project: &Project) -> Result<Project> {
        let mut p = project.clone();
        if let Some(m) = self.others {
            for z in &mut p.building.zones {
                z.convection = m;
            }
        }
        for (name, m) in &self.zones {
            let i = p
                .building
                .zone_index(name)
                .ok_or_else(|| Error::Config(format!("case {}: no zone \"{name}\"", self.label)))?;
            p.building.zones[i].convection = *m;
        }
        Ok(p)
    }
}

/// The three standard cases: A every zone constant, B every zone nonlinear,
/// C nonlinear in the focus zone only.
pub fn standard_cases(focus_zone: &str) -> Vec<CaseSpec> {
    vec![
        CaseSpec { label: "A".into(), zones: vec![], others: Some(ConvectionModel::constant()) },
        CaseSpec { label: "B".into(), zones: vec![], others: Some(ConvectionModel::nonlinear()) },
        CaseSpec {
            label: "C".into(),
            zones: vec![(focus_zone.to_string(), ConvectionModel::nonlinear())],
            others: Some(ConvectionModel::constant()),
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseSummary {
    pub label: String,
    /// Largest air temperature difference from the reference in the focus zone, K.
    pub max_dt: f64,
    /// Largest HVAC power difference from the reference in the focus zone, W.
    pub max_dp: f64,
    /// Assembly and solve time, seconds (best of the repeats).
    pub solve_s: f64,
    pub wall_s: f64,
    /// `solve_s` over the reference's.
    pub time_ratio: f64,
    /// Convection iterations of the focus zone.
    pub focus_iterations: IterationStats,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub reference: String,
    pub focus_zone: String,
    pub cases: Vec<CaseSummary>,
    pub outputs: Vec<SimulationOutput>,
}

impl Comparison {
    pub fn case(&self, label: &str) -> Option<&CaseSummary> {
        self.cases.iter().find(|c| c.label == label)
    }

    pub fn output(&self, label: &str) -> Option<&SimulationOutput> {
        self.cases.iter().position(|c| c.label == label).map(|i| &self.outputs[i])
    }

    pub fn table(&self) -> String {
        let mut s = format!(
            "focus zone {}, reference {}\n{:<8} {:>10} {:>12} {:>10} {:>8} {:>10}\n",
            self.focus_zone, self.reference, "case", "max_dT_K", "max_dP_W", "solve_s", "ratio", "iter_med"
        );
        for c in &self.cases {
            s.push_str(&format!(
                "{:<8} {:>10} {:>12} {:>10} {:>8} {:>10}\n",
                c.label,
                format_value(c.max_dt),
                format_value(c.max_dp),
                format_value(c.solve_s),
                format_value(c.time_ratio),
                format_value(c.focus_iterations.median),
            ));
        }
        s
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            reference: &'a str,
            focus_zone: &'a str,
            cases: &'a [CaseSummary],
        }
        serde_json::to_string_pretty(&Doc {
            reference: &self.reference,
            focus_zone: &self.focus_zone,
            cases: &self.cases,
        })
        .expect("comparison serializes")
    }

    /// Per-case result files plus `comparison.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        for (c, out) in self.cases.iter().zip(&self.outputs) {
            write_outputs(dir, out, &format!("{}_", c.label))?;
        }
        let path = dir.join("comparison.json");
        std::fs::write(&path, self.to_json()).map_err(|e| Error::io(&path, e))
    }
}

/// Runs every case `repeats` times, interleaved, keeping the fastest timing
/// of each, and compares the focus zone with the reference case.
pub fn compare_cases(
    project: &Project,
    weather: &WeatherSeries,
    cases: &[CaseSpec],
    reference: &str,
    repeats: usize,
) -> Result<Comparison> {
    let focus =
        project.focus_zone().ok_or_else(|| Error::Config("comparison needs at least one zone".into()))?;
    let ref_index = cases
        .iter()
        .position(|c| c.label == reference)
        .ok_or_else(|| Error::Config(format!("reference case \"{reference}\" is not among the cases")))?;
    let projects = cases.iter().map(|c| c.apply(project)).collect::<Result<Vec<_>>>()?;

    let mut outputs: Vec<Option<SimulationOutput>> = vec![None; cases.len()];
    for _ in 0..repeats.max(1) {
        for (k, (c, p)) in cases.iter().zip(&projects).enumerate() {
            let out = run_simulation(p, weather, &c.label)?;
            let keep = match &outputs[k] {
                Some(best) => out.timing.solve_s() < best.timing.solve_s(),
                None => true,
            };
            if keep {
                outputs[k] = Some(out);
            }
        }
    }
    let outputs: Vec<SimulationOutput> = outputs.into_iter().map(|o| o.expect("ran at least once")).collect();

    let reference_out = &outputs[ref_index];
    let ref_time = reference_out.timing.solve_s();
    let summaries = cases
        .iter()
        .zip(&outputs)
        .map(|(c, out)| {
            let (mut max_dt, mut max_dp) = (0.0f64, 0.0f64);
            for (a, b) in out.result.rows.iter().zip(&reference_out.result.rows) {
                max_dt = max_dt.max((a.zones[focus].tair - b.zones[focus].tair).abs());
                max_dp = max_dp.max((a.zones[focus].p_hvac - b.zones[focus].p_hvac).abs());
            }
            CaseSummary {
                label: c.label.clone(),
                max_dt,
                max_dp,
                solve_s: out.timing.solve_s(),
                wall_s: out.timing.wall_s,
                time_ratio: if ref_time > 0.0 { out.timing.solve_s() / ref_time } else { f64::NAN },
                focus_iterations: out.timing.zones[focus].iterations.clone(),
            }
        })
        .collect();
    Ok(Comparison {
        reference: reference.to_string(),
        focus_zone: project.building.zones[focus].name.clone(),
        cases: summaries,
        outputs,
    })
}
