//! Simulation driver: weather input, project settings, the time loop and
//! result output.

pub mod compare;
pub mod project;
pub mod results;
pub mod run;
pub mod weather;

pub use compare::{compare_cases, standard_cases, CaseSpec, CaseSummary, Comparison};
pub use project::{load_building, load_project, parse_project, Period, Project, SolverOptions};
pub use results::{format_value, write_outputs, write_results_csv};
pub use run::{run_simulation, SimulationOutput, SimulationResult, TimingReport};
pub use weather::{
    load_weather, read_weather, synthesize, write_weather, DayKind, WeatherRecord, WeatherSeries,
};
