//! The time loop: boundary conditions, solar, airflow, heat and moisture for
//! every step of the period.

use std::time::{Duration, Instant};

use chrono::{Duration as Span, NaiveDateTime, Timelike};
use serde::Serialize;

use super::project::Project;
use super::weather::{format_timestamp, WeatherRecord, WeatherSeries};
use crate::airflow::{
    airflow_links, fixed_rates, solve_pressure_network, AirNode, AirflowNetwork, LinkFlowResult,
};
use crate::building::{AirflowModel, Building, Component};
use crate::error::{Error, Result};
use crate::moisture::{solve_building_humidity, ZoneMoisture};
use crate::solar::{
    incidence_cosine, sky_temperature, solar_position, tilted_irradiance, IrradianceSample, KELVIN,
};
use crate::thermal::{
    compile_zones, couple_zones, distribute_solar_gains, window_transmission, AbsorbingSurface, Boundary,
    FlowSource, Inflow, ZoneLoads, ZoneModel, AIR,
};

/// Solar power entering a zone through its windows, W.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ZoneSolar {
    pub beam: f64,
    /// Sky and ground diffuse.
    pub diffuse: f64,
    /// The sky part of `diffuse`.
    pub sky_diffuse: f64,
    /// W absorbed on the outer faces of opaque walls.
    pub exterior_absorbed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZoneRow {
    /// °C
    pub tair: f64,
    /// kg/kg
    pub w: f64,
    /// W, heating positive.
    pub p_hvac: f64,
    /// The HVAC system hit a power limit.
    pub clamped: bool,
    pub humidity_clamped: bool,
    /// Convection iterations in the first coupling sweep.
    pub iterations: u32,
    pub solar: ZoneSolar,
    /// Node temperatures, only kept in verbose runs.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub timestamp: NaiveDateTime,
    pub zones: Vec<ZoneRow>,
    /// kg/s per link, in [`SimulationResult::link_ids`] order.
    pub links: Vec<f64>,
    pub sweeps: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub zone_names: Vec<String>,
    pub link_ids: Vec<String>,
    /// Per zone, node names in the order of [`ZoneRow::nodes`].
    pub node_names: Vec<Vec<String>>,
    pub rows: Vec<ResultRow>,
}

impl SimulationResult {
    pub fn zone(&self, name: &str) -> Option<usize> {
        self.zone_names.iter().position(|z| z == name)
    }

    /// One zone's series of a field.
    pub fn series(&self, zone: usize, f: impl Fn(&ZoneRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(|r| f(&r.zones[zone])).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationStats {
    pub min: u32,
    pub median: f64,
    pub max: u32,
    /// (iterations, number of steps)
    pub histogram: Vec<(u32, usize)>,
}

impl IterationStats {
    pub fn from_counts(counts: &[u32]) -> Self {
        if counts.is_empty() {
            return Self { min: 0, median: 0.0, max: 0, histogram: vec![] };
        }
        let mut sorted = counts.to_vec();
        sorted.sort_unstable();
        let n = sorted.len();
        let median =
            if n % 2 == 1 { sorted[n / 2] as f64 } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) as f64 };
        let mut histogram: Vec<(u32, usize)> = vec![];
        for c in sorted.iter() {
            match histogram.last_mut() {
                Some((v, k)) if v == c => *k += 1,
                _ => histogram.push((*c, 1)),
            }
        }
        Self { min: sorted[0], median, max: sorted[n - 1], histogram }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZoneTiming {
    pub name: String,
    pub model: String,
    /// Seconds spent assembling and solving this zone.
    pub solve_s: f64,
    pub iterations: IterationStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingReport {
    pub case: String,
    pub zone_count: usize,
    pub steps: usize,
    /// Seconds for the reported period, warm-up excluded.
    pub wall_s: f64,
    pub zones: Vec<ZoneTiming>,
    pub sweeps: IterationStats,
}

impl TimingReport {
    /// Assembly and solve time over all zones.
    pub fn solve_s(&self) -> f64 {
        self.zones.iter().map(|z| z.solve_s).sum()
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub result: SimulationResult,
    pub timing: TimingReport,
    pub warnings: Vec<String>,
}

/// Timestamps of the reported steps. Each step ends at its timestamp.
pub fn step_times(project: &Project, weather: &WeatherSeries) -> Result<Vec<NaiveDateTime>> {
    let (first, last) = match (weather.first(), weather.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Weather { row: 1, message: "no weather rows".into() }),
    };
    let (start, end) = project.period.map(|p| (p.start, p.end)).unwrap_or((first, last));
    if !weather.covers(start, end) {
        return Err(Error::Config(format!(
            "period {start} to {end} is outside the weather data ({first} to {last})"
        )));
    }
    let dt = Span::milliseconds((project.timestep * 1000.0).round() as i64);
    let mut out = vec![];
    let mut t = start;
    while t <= end {
        out.push(t);
        t += dt;
    }
    Ok(out)
}

struct StepInputs<'a> {
    building: &'a Building,
    weather: &'a WeatherSeries,
    models: &'a [ZoneModel],
    network: &'a AirflowNetwork,
    project: &'a Project,
    ground: f64,
}

struct State {
    temperatures: Vec<Vec<f64>>,
    humidity: Vec<f64>,
    hvac: Vec<f64>,
}

struct StepOutcome {
    row: ResultRow,
    solve_time: Vec<Duration>,
}

fn solar_loads(
    inputs: &StepInputs,
    wx: &WeatherRecord,
    t: NaiveDateTime,
) -> Result<(Vec<ZoneLoads>, Vec<ZoneSolar>)> {
    let site = &inputs.building.site;
    let sun = solar_position(
        t,
        site.utc_offset_hours,
        site.latitude_deg.to_radians(),
        site.longitude_deg.to_radians(),
    );
    let sample = IrradianceSample::new(wx.gh, wx.dh);
    let diffuse_model = inputs.building.models.diffuse;
    let hour = t.hour();
    let mut loads = Vec::with_capacity(inputs.models.len());
    let mut solar = Vec::with_capacity(inputs.models.len());
    for (m, zone) in inputs.models.iter().zip(&inputs.building.zones) {
        let mut l = ZoneLoads { exterior_absorbed: vec![0.0; m.exterior.len()], ..Default::default() };
        let mut s = ZoneSolar::default();
        for (k, face) in m.exterior.iter().enumerate() {
            let irr = tilted_irradiance(&sample, &sun, &face.orientation, site.albedo, diffuse_model);
            match &face.glazing {
                None => {
                    l.exterior_absorbed[k] = face.absorptance * irr.total() * face.area;
                    s.exterior_absorbed += l.exterior_absorbed[k];
                }
                Some(g) => {
                    let cos_i = incidence_cosine(&sun, &face.orientation);
                    let tr = window_transmission(g, irr.beam, irr.diffuse(), cos_i);
                    s.beam += tr.beam;
                    s.diffuse += tr.diffuse;
                    s.sky_diffuse += g.area * g.diffuse_transmittance * irr.sky_diffuse;
                }
            }
        }
        let absorbing: Vec<AbsorbingSurface> = m
            .surfaces
            .iter()
            .map(|x| AbsorbingSurface { area: x.area, absorptance: x.absorptance })
            .collect();
        if s.beam + s.diffuse > 0.0 {
            match distribute_solar_gains(&absorbing, s.beam, s.diffuse, m.floor) {
                Ok(d) => {
                    l.interior_absorbed = d.absorbed;
                    l.air_gain += d.residual;
                }
                Err(_) => l.air_gain += s.beam + s.diffuse,
            }
        }
        let gain = zone.internal_gain(hour);
        let fraction = zone.internal_gains.as_ref().map_or(0.0, |g| g.radiative_fraction);
        l.air_gain += (1.0 - fraction) * gain;
        l.radiant_gain = fraction * gain;
        loads.push(l);
        solar.push(s);
    }
    Ok((loads, solar))
}

fn flow_source(node: AirNode) -> FlowSource {
    match node {
        AirNode::Zone(j) => FlowSource::Zone(j),
        AirNode::Exterior => FlowSource::Exterior,
    }
}

/// Link flows and the resulting inflows of every zone.
fn airflow(
    inputs: &StepInputs,
    wx: &WeatherRecord,
    hour: u32,
    air_temps: &[f64],
) -> Result<(Vec<f64>, Vec<Vec<Inflow>>)> {
    let n = inputs.models.len();
    let links: Vec<(AirNode, AirNode, LinkFlowResult)> = match inputs.building.models.airflow {
        AirflowModel::FixedRates => {
            fixed_rates(inputs.building, hour).flows.into_iter().map(|(_, a, b, r)| (a, b, r)).collect()
        }
        AirflowModel::PressureNetwork => {
            let sol = solve_pressure_network(
                inputs.network,
                air_temps,
                wx.tdb,
                wx.wind_speed,
                wx.wind_dir,
                &inputs.project.solver.airflow(),
            )?;
            inputs.network.links.iter().zip(sol.flows).map(|(l, r)| (l.from, l.to, r)).collect()
        }
    };
    let mut inflows = vec![vec![]; n];
    for (from, to, r) in &links {
        if let AirNode::Zone(j) = to {
            if r.forward > 0.0 {
                inflows[*j].push(Inflow { mass_flow: r.forward, source: flow_source(*from) });
            }
        }
        if let AirNode::Zone(i) = from {
            if r.backward > 0.0 {
                inflows[*i].push(Inflow { mass_flow: r.backward, source: flow_source(*to) });
            }
        }
    }
    Ok((links.iter().map(|l| l.2.mass_flow).collect(), inflows))
}

fn step(inputs: &StepInputs, state: &mut State, t: NaiveDateTime, verbose: bool) -> Result<StepOutcome> {
    let wx = inputs.weather.at(t).ok_or_else(|| Error::Config(format!("no weather for {t}")))?;
    let hour = t.hour();
    let building = inputs.building;
    let dt = inputs.project.timestep;
    let bc = Boundary {
        outdoor: wx.tdb,
        sky: sky_temperature(wx.tdb, building.models.sky_temperature) - KELVIN,
        exterior_h: building.models.exterior_convection.coefficient(wx.wind_speed),
        ground: inputs.ground,
    };
    let (mut loads, solar) = solar_loads(inputs, &wx, t)?;
    let coupling = inputs.project.solver.coupling();

    let mut air: Vec<f64> = state.temperatures.iter().map(|z| z[AIR]).collect();
    let mut passes = 0;
    let (links, inflows, outcome) = loop {
        let (links, inflows) = airflow(inputs, &wx, hour, &air)?;
        for (l, f) in loads.iter_mut().zip(&inflows) {
            l.inflows = f.clone();
        }
        let outcome = couple_zones(
            inputs.models,
            &bc,
            &loads,
            &state.temperatures,
            state.temperatures.clone(),
            &state.hvac,
            dt,
            hour,
            &coupling,
        )?;
        let new_air: Vec<f64> = outcome.temperatures.iter().map(|z| z[AIR]).collect();
        let moved = new_air.iter().zip(&air).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        passes += 1;
        if building.models.airflow == AirflowModel::FixedRates
            || passes > inputs.project.solver.airflow_outer_iterations
            || moved < coupling.criterion
        {
            break (links, inflows, outcome);
        }
        air = new_air;
    };

    let moisture: Vec<ZoneMoisture> = building
        .zones
        .iter()
        .zip(inputs.models)
        .enumerate()
        .map(|(i, (z, m))| ZoneMoisture {
            air_mass: z.air_mass(),
            w_old: state.humidity[i],
            gain: z.moisture_gain(hour),
            latent_removal: match &m.hvac {
                Some(h) if outcome.hvac[i].total() < 0.0 => h.latent_capacity,
                _ => 0.0,
            },
        })
        .collect();
    let humidity = solve_building_humidity(&moisture, &inflows, wx.w, dt);

    let zones = (0..inputs.models.len())
        .map(|i| ZoneRow {
            tair: outcome.temperatures[i][AIR],
            w: humidity[i].w,
            p_hvac: outcome.hvac[i].total(),
            clamped: outcome.hvac[i].clamped,
            humidity_clamped: humidity[i].clamped,
            iterations: outcome.iterations[i],
            solar: solar[i],
            nodes: if verbose { outcome.temperatures[i].clone() } else { vec![] },
        })
        .collect();
    state.humidity = humidity.iter().map(|h| h.w).collect();
    state.hvac = outcome.hvac.iter().map(|h| h.total()).collect();
    state.temperatures = outcome.temperatures;
    Ok(StepOutcome {
        row: ResultRow { timestamp: t, zones, links, sweeps: outcome.sweeps },
        solve_time: outcome.solve_time,
    })
}

fn link_ids(building: &Building) -> Vec<String> {
    match building.models.airflow {
        AirflowModel::FixedRates => building
            .components()
            .filter_map(|(_, c)| match c {
                Component::FixedFlow(f) => Some(f.name.clone()),
                _ => None,
            })
            .collect(),
        AirflowModel::PressureNetwork => airflow_links(building).links.into_iter().map(|l| l.id).collect(),
    }
}

/// Runs a project over its period, after repeating the first day
/// `warmup_days` times.
pub fn run_simulation(project: &Project, weather: &WeatherSeries, case: &str) -> Result<SimulationOutput> {
    project.check()?;
    let mut building = project.building.clone();
    if project.solver.sizing {
        for iz in &mut building.interzones {
            for c in &mut iz.components {
                if let Component::Hvac(h) = c {
                    h.sizing_mode = true;
                }
            }
        }
    }
    let times = step_times(project, weather)?;
    let models = compile_zones(&building);
    let network = airflow_links(&building);
    let inputs = StepInputs {
        building: &building,
        weather,
        models: &models,
        network: &network,
        project,
        ground: weather.mean_dry_bulb(),
    };
    let mut state = State {
        temperatures: models
            .iter()
            .zip(&building.zones)
            .map(|(m, z)| m.uniform(z.initial_temperature))
            .collect(),
        humidity: building.zones.iter().map(|z| z.initial_humidity).collect(),
        hvac: vec![0.0; models.len()],
    };
    let at = |t: NaiveDateTime| {
        move |e: Error| Error::AtStep { timestamp: format_timestamp(&t), source: Box::new(e) }
    };

    let per_day = (86_400.0 / project.timestep).round() as usize;
    let first_day = &times[..per_day.min(times.len())];
    for _ in 0..project.solver.warmup_days {
        for &t in first_day {
            step(&inputs, &mut state, t, false).map_err(at(t))?;
        }
    }

    let n = models.len();
    let verbose = project.solver.verbose;
    let mut rows = Vec::with_capacity(times.len());
    let mut solve = vec![Duration::ZERO; n];
    let mut iterations: Vec<Vec<u32>> = vec![Vec::with_capacity(times.len()); n];
    let mut sweeps = Vec::with_capacity(times.len());
    let wall = Instant::now();
    for &t in &times {
        let out = step(&inputs, &mut state, t, verbose).map_err(at(t))?;
        for z in 0..n {
            solve[z] += out.solve_time[z];
            iterations[z].push(out.row.zones[z].iterations);
        }
        sweeps.push(out.row.sweeps);
        rows.push(out.row);
    }
    let wall_s = wall.elapsed().as_secs_f64();

    let mut warnings = weather.warnings.clone();
    let clamps: usize = rows.iter().flat_map(|r| &r.zones).filter(|z| z.humidity_clamped).count();
    if clamps > 0 {
        warnings.push(format!("humidity clamped to its bounds in {clamps} zone-steps"));
    }
    if building.models.airflow == AirflowModel::FixedRates {
        let hours: std::collections::BTreeSet<u32> = times.iter().map(|t| t.hour()).collect();
        for h in hours {
            for d in fixed_rates(&building, h).diagnostics {
                warnings.push(d.to_string());
            }
        }
    }

    let timing = TimingReport {
        case: case.to_string(),
        zone_count: n,
        steps: rows.len(),
        wall_s,
        zones: models
            .iter()
            .enumerate()
            .map(|(z, m)| ZoneTiming {
                name: m.name.clone(),
                model: m.convection.label().to_string(),
                solve_s: solve[z].as_secs_f64(),
                iterations: IterationStats::from_counts(&iterations[z]),
            })
            .collect(),
        sweeps: IterationStats::from_counts(&sweeps),
    };
    Ok(SimulationOutput {
        result: SimulationResult {
            zone_names: building.zones.iter().map(|z| z.name.clone()).collect(),
            link_ids: link_ids(&building),
            node_names: if verbose { models.iter().map(|m| m.node_names.to_vec()).collect() } else { vec![] },
            rows,
        },
        timing,
        warnings,
    })
}
