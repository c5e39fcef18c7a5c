use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use chrono::{NaiveDate, NaiveDateTime};
use clap::{Args, Parser, Subcommand};

use zonesim::building::validate_building;
use zonesim::engine::project::BUILTIN_CASE_STUDY;
use zonesim::engine::weather::{default_synth_start, parse_timestamp, SynthParams};
use zonesim::engine::{
    compare_cases, load_building, load_project, load_weather, run_simulation, standard_cases, synthesize,
    write_outputs, write_weather, CaseSpec, DayKind, Period, Project,
};
use zonesim::thermal::compile_zones;
use zonesim::Error;

#[derive(Parser)]
#[command(name = "zonesim", version, about = "Multizone building heat, air and moisture simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a project and write its results.
    Simulate(SimulateArgs),
    /// Run a project under several convection assignments and compare them.
    Compare(CompareArgs),
    /// Weather file utilities.
    #[command(subcommand)]
    Weather(WeatherCommand),
    /// Validate a project's building and print its zones, nodes and components.
    Describe {
        /// Project file, building JSON, or builtin:case_study.
        #[arg(long)]
        project: PathBuf,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    project: PathBuf,
    /// First and last reported timestamps, inclusive.
    #[arg(long, num_args = 2, value_names = ["START", "END"], value_parser = parse_time)]
    period: Option<Vec<NaiveDateTime>>,
    /// Step length in seconds.
    #[arg(long)]
    timestep: Option<f64>,
    /// Unlimited HVAC power.
    #[arg(long)]
    sizing: bool,
    /// A, B, C, or LABEL=zone:model,...,*:model.
    #[arg(long)]
    case: Option<String>,
    /// Also write node temperatures.
    #[arg(long)]
    verbose: bool,
    /// Output directory (defaults to the project's).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    project: PathBuf,
    /// Standard cases: A (all constant), B (all nonlinear), C (nonlinear in
    /// the focus zone).
    #[arg(long, value_delimiter = ',', default_value = "A,B,C")]
    cases: Vec<String>,
    /// Extra case, LABEL=zone:model,...,*:model. Repeatable.
    #[arg(long = "case")]
    extra: Vec<String>,
    #[arg(long, default_value = "B")]
    reference: String,
    /// Runs per case; the fastest timing is kept.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long)]
    sizing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum WeatherCommand {
    /// Write hourly synthetic weather for a list of day kinds.
    Synth {
        /// Comma-separated day kinds: sunny, cloudy.
        #[arg(long, default_value = "cloudy,sunny")]
        days: String,
        /// First day, YYYY-MM-DD.
        #[arg(long)]
        start: Option<NaiveDate>,
        /// Building whose site sets the sun path.
        #[arg(long, default_value = BUILTIN_CASE_STUDY)]
        building: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_time(s: &str) -> Result<NaiveDateTime, String> {
    parse_timestamp(s).ok_or_else(|| format!("unrecognised timestamp \"{s}\""))
}

/// Resolves a single-letter standard case or parses a full assignment.
fn case_spec(text: &str, focus: &str) -> Result<CaseSpec> {
    if text.contains('=') {
        return Ok(CaseSpec::parse(text)?);
    }
    standard_cases(focus)
        .into_iter()
        .find(|c| c.label == text)
        .with_context(|| format!("unknown case \"{text}\"; use A, B, C or LABEL=zone:model,..."))
}

fn focus_name(project: &Project) -> Result<String> {
    project.focus_zone().map(|i| project.building.zones[i].name.clone()).context("the building has no zones")
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(e) if e.is_validation() => 2,
        Some(e) if e.is_convergence() => 3,
        _ => 1,
    }
}

fn load(path: &Path, sizing: bool) -> Result<(Project, zonesim::engine::WeatherSeries)> {
    let mut project = load_project(path).with_context(|| format!("loading project {}", path.display()))?;
    project.solver.sizing |= sizing;
    let weather = load_weather(&project.weather)
        .with_context(|| format!("loading weather {}", project.weather.display()))?;
    for w in &weather.warnings {
        eprintln!("warning: {w}");
    }
    Ok((project, weather))
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let (mut project, weather) = load(&args.project, args.sizing)?;
    project.solver.verbose |= args.verbose;
    if let Some(p) = &args.period {
        project.period = Some(Period { start: p[0], end: p[1] });
    }
    if let Some(dt) = args.timestep {
        project.timestep = dt;
    }
    project.check()?;
    let label = match &args.case {
        Some(text) => {
            let case = case_spec(text, &focus_name(&project)?)?;
            project = case.apply(&project)?;
            case.label
        }
        None => "default".to_string(),
    };
    let out = run_simulation(&project, &weather, &label)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let dir = args.out.unwrap_or_else(|| project.results.clone());
    for path in write_outputs(&dir, &out, "")? {
        println!("wrote {}", path.display());
    }
    println!(
        "{} steps, {} zones, solve {:.3} s, wall {:.3} s",
        out.timing.steps,
        out.timing.zone_count,
        out.timing.solve_s(),
        out.timing.wall_s
    );
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let (project, weather) = load(&args.project, args.sizing)?;
    let focus = focus_name(&project)?;
    let cases = args
        .cases
        .iter()
        .chain(&args.extra)
        .map(|c| case_spec(c.trim(), &focus))
        .collect::<Result<Vec<_>>>()?;
    let cmp = compare_cases(&project, &weather, &cases, &args.reference, args.repeats)?;
    let dir = args.out.unwrap_or_else(|| project.results.clone());
    cmp.write(&dir)?;
    print!("{}", cmp.table());
    println!("wrote {}", dir.display());
    Ok(())
}

fn synth(days: &str, start: Option<NaiveDate>, building: &Path, output: &Path) -> Result<()> {
    let kinds = days.split(',').map(str::parse).collect::<zonesim::Result<Vec<DayKind>>>()?;
    let building = load_building(building)?;
    let records = synthesize(
        &kinds,
        start.unwrap_or_else(default_synth_start),
        &building.site,
        &SynthParams::default(),
    );
    let file = std::fs::File::create(output).map_err(|e| Error::io(output, e))?;
    write_weather(std::io::BufWriter::new(file), &records)?;
    println!("wrote {} rows to {}", records.len(), output.display());
    Ok(())
}

/// A project file names its weather; anything else is read as a building.
fn describe_target(path: &Path) -> Result<zonesim::Building> {
    if path.as_os_str() == BUILTIN_CASE_STUDY {
        return Ok(load_building(path)?);
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.get("weather").is_some() {
        let project = load_project(path)?;
        println!(
            "project: weather {}, timestep {} s, results {}",
            project.weather.display(),
            project.timestep,
            project.results.display()
        );
        Ok(project.building)
    } else {
        Ok(load_building(path)?)
    }
}

fn describe(path: &Path) -> Result<()> {
    let building = describe_target(path)?;
    let diags = validate_building(&building);
    if !diags.is_empty() {
        return Err(Error::Validation(diags).into());
    }
    let models = compile_zones(&building);
    println!(
        "site {:.2}°, {:.2}°  models: {}",
        building.site.latitude_deg,
        building.site.longitude_deg,
        serde_json::to_string(&building.models)?
    );
    for (zone, m) in building.zones.iter().zip(&models) {
        println!(
            "zone {}: {} m³, {} nodes, {} interior surfaces, {} exterior faces, convection {}{}",
            zone.name,
            zone.volume,
            m.len(),
            m.surfaces.len(),
            m.exterior.len(),
            m.convection.label(),
            m.hvac.as_ref().map(|h| format!(", hvac {}", h.name)).unwrap_or_default()
        );
    }
    for iz in &building.interzones {
        let parts: Vec<String> = iz.components.iter().map(|c| format!("{} {}", c.kind(), c.name())).collect();
        println!("interzone {} ({} | {}): {}", iz.name, iz.side_a, iz.side_b, parts.join(", "));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Compare(a) => compare(a),
        Command::Weather(WeatherCommand::Synth { days, start, building, out }) => {
            synth(&days, start, &building, &out)
        }
        Command::Describe { project } => describe(&project),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
