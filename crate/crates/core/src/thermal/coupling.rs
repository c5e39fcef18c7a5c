//! Gauss–Seidel connection of the zone systems.

use std::time::{Duration, Instant};

use super::zone::{Boundary, FlowSource, StepOptions, ZoneLoads, ZoneModel, AIR};
use crate::error::{Error, Result};
use crate::hvac::HvacOutput;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingOptions {
    /// K, on the largest air-temperature change between sweeps.
    pub criterion: f64,
    pub max_sweeps: u32,
    pub convection_criterion: f64,
    pub max_convection_iterations: u32,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        Self { criterion: 1e-3, max_sweeps: 50, convection_criterion: 1e-3, max_convection_iterations: 25 }
    }
}

#[derive(Debug, Clone)]
pub struct CouplingOutcome {
    pub temperatures: Vec<Vec<f64>>,
    pub hvac: Vec<HvacOutput>,
    /// Convection iterations of each zone in the first sweep.
    pub iterations: Vec<u32>,
    pub sweeps: u32,
    /// Time spent assembling and solving each zone.
    pub solve_time: Vec<Duration>,
}

/// True when some zone reads another zone's temperatures.
pub fn zones_interact(models: &[ZoneModel], loads: &[ZoneLoads]) -> bool {
    models.iter().any(|m| !m.connex.is_empty())
        || loads
            .iter()
            .flat_map(|l| &l.inflows)
            .any(|f| matches!(f.source, FlowSource::Zone(_)) && f.mass_flow > 0.0)
}

/// Solves all zones for one step, sweeping in declaration order and feeding
/// each zone the latest temperatures of its neighbours, until no air
/// temperature moves by more than the criterion during a sweep.
///
/// `guess` seeds the neighbour temperatures and the convection
/// linearisation; `hvac_guess` is the HVAC power at that point.
#[allow(clippy::too_many_arguments)]
pub fn couple_zones(
    models: &[ZoneModel],
    bc: &Boundary,
    loads: &[ZoneLoads],
    t_old: &[Vec<f64>],
    guess: Vec<Vec<f64>>,
    hvac_guess: &[f64],
    dt: f64,
    hour: u32,
    opts: &CouplingOptions,
) -> Result<CouplingOutcome> {
    let n = models.len();
    let step_opts = StepOptions {
        dt,
        hour,
        criterion: opts.convection_criterion,
        max_iterations: opts.max_convection_iterations,
    };
    let interact = zones_interact(models, loads);
    let mut current = guess;
    let mut power = hvac_guess.to_vec();
    let mut hvac = vec![HvacOutput::default(); n];
    let mut iterations = vec![0; n];
    let mut solve_time = vec![Duration::ZERO; n];
    let mut history = Vec::new();

    for sweep in 1..=opts.max_sweeps {
        let mut change: f64 = 0.0;
        for z in 0..n {
            let start = Instant::now();
            let step = models[z].iterate_nonlinear_convection(
                bc,
                &loads[z],
                &current,
                &t_old[z],
                &current[z],
                power[z],
                &step_opts,
            )?;
            solve_time[z] += start.elapsed();
            if sweep == 1 {
                iterations[z] = step.iterations;
            }
            change = change.max(
                (step.temperatures[AIR] - current[z][AIR]).abs()
                    + (step.hvac.total() - power[z]).abs() / step.air_conductance,
            );
            current[z] = step.temperatures;
            power[z] = step.hvac.total();
            hvac[z] = step.hvac;
        }
        if !interact || change < opts.criterion {
            return Ok(CouplingOutcome {
                temperatures: current,
                hvac,
                iterations,
                sweeps: sweep,
                solve_time,
            });
        }
        history.push(change);
    }
    Err(Error::Convergence { what: "zone coupling".into(), iterations: opts.max_sweeps as usize, history })
}
