#![allow(dead_code)]

use zonesim::building::{case_study_building, Building, Component};
use zonesim::engine::weather::{default_synth_start, SynthParams};
use zonesim::engine::{
    run_simulation, synthesize, write_results_csv, DayKind, Project, SimulationOutput, WeatherSeries,
};

/// The two-day sequence: a cloudy day then a sunny one.
pub fn replica_weather() -> WeatherSeries {
    let site = case_study_building().site;
    WeatherSeries {
        records: synthesize(
            &[DayKind::Cloudy, DayKind::Sunny],
            default_synth_start(),
            &site,
            &SynthParams::default(),
        ),
        warnings: vec![],
    }
}

pub fn project_for(building: Building) -> Project {
    Project::new(building, "synthetic.csv")
}

pub fn run(project: &Project, weather: &WeatherSeries) -> SimulationOutput {
    run_simulation(project, weather, "test").expect("simulation runs")
}

pub fn csv_bytes(out: &SimulationOutput) -> Vec<u8> {
    let mut buf = Vec::new();
    write_results_csv(&mut buf, &out.result).expect("csv writes");
    buf
}

pub fn set_hvac_limit(building: &mut Building, watts: f64) {
    for iz in &mut building.interzones {
        for c in &mut iz.components {
            if let Component::Hvac(h) = c {
                h.heating_power_max = watts;
                h.cooling_power_max = watts;
            }
        }
    }
}

/// Two upstairs rooms of the case study joined by their partition, with no
/// exterior boundary at all.
pub fn adiabatic_building() -> Building {
    let mut b = case_study_building();
    b.zones.retain(|z| z.name != "ground_floor");
    b.interzones.retain(|iz| iz.name == "west_to_east");
    for z in &mut b.zones {
        z.initial_temperature = 20.0;
    }
    b
}
