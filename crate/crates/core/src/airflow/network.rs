use super::{link_flow, wind_pressure, AirNode, LinkFlowResult, LinkLaw, LinkSides};
use crate::building::{Building, Component, EXTERIOR};
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct AirLink {
    pub id: String,
    pub from: AirNode,
    pub to: AirNode,
    /// Height of the opening (bottom edge for large openings) above the datum, m.
    pub z: f64,
    pub law: LinkLaw,
    /// Wind acts on the exterior side when set.
    pub facade_azimuth_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AirflowNetwork {
    pub zone_names: Vec<String>,
    pub links: Vec<AirLink>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirflowOptions {
    /// kg/s, on every zone's mass balance.
    pub tolerance: f64,
    pub max_iterations: u32,
    pub max_halvings: u32,
}

impl Default for AirflowOptions {
    fn default() -> Self {
        Self { tolerance: 1e-6, max_iterations: 100, max_halvings: 5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AirflowSolution {
    /// Zone pressures at the datum height, Pa relative to the outdoors.
    pub pressures: Vec<f64>,
    /// One result per link, in link order.
    pub flows: Vec<LinkFlowResult>,
    /// Net mass inflow of each zone, kg/s.
    pub residuals: Vec<f64>,
    pub iterations: u32,
}

/// The opening links of a building, in declaration order.
pub fn airflow_links(building: &Building) -> AirflowNetwork {
    let node = |name: &str| match building.zone_index(name) {
        Some(i) => AirNode::Zone(i),
        None => AirNode::Exterior,
    };
    let base = |name: &str| {
        if name == EXTERIOR {
            0.0
        } else {
            building.zones[building.zone_index(name).expect("validated reference")].reference_height
        }
    };
    let links = building
        .components()
        .filter_map(|(iz, c)| match c {
            Component::Opening(o) => {
                let law = match (o.power_law, o.large_opening) {
                    (Some(p), _) => LinkLaw::PowerLaw(p),
                    (None, Some(l)) => LinkLaw::LargeOpening(l),
                    (None, None) => return None,
                };
                Some(AirLink {
                    id: o.name.clone(),
                    from: node(&iz.side_a),
                    to: node(&iz.side_b),
                    z: base(&iz.side_a) + o.height,
                    law,
                    facade_azimuth_deg: o.facade_azimuth_deg,
                })
            }
            _ => None,
        })
        .collect();
    AirflowNetwork { zone_names: building.zones.iter().map(|z| z.name.clone()).collect(), links }
}

struct Evaluation {
    residuals: Vec<f64>,
    jacobian: Matrix,
    flows: Vec<LinkFlowResult>,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl AirflowNetwork {
    fn evaluate(
        &self,
        pressures: &[f64],
        zone_temps: &[f64],
        outdoor: f64,
        wind_speed: f64,
        wind_dir: f64,
    ) -> Evaluation {
        let n = self.zone_names.len();
        let mut residuals = vec![0.0; n];
        let mut jacobian = Matrix::zeros(n);
        let mut flows = Vec::with_capacity(self.links.len());
        let exterior_p =
            |l: &AirLink| l.facade_azimuth_deg.map_or(0.0, |az| wind_pressure(wind_speed, wind_dir, az));
        let state = |node: AirNode, l: &AirLink| match node {
            AirNode::Zone(i) => (pressures[i], zone_temps[i]),
            AirNode::Exterior => (exterior_p(l), outdoor),
        };
        for l in &self.links {
            let (p_from, t_from) = state(l.from, l);
            let (p_to, t_to) = state(l.to, l);
            let r = link_flow(&l.law, l.z, &LinkSides { p_from, p_to, t_from, t_to });
            let d = r.derivative;
            if let AirNode::Zone(i) = l.from {
                residuals[i] -= r.mass_flow;
                jacobian[(i, i)] -= d;
                if let AirNode::Zone(j) = l.to {
                    jacobian[(i, j)] += d;
                }
            }
            if let AirNode::Zone(j) = l.to {
                residuals[j] += r.mass_flow;
                jacobian[(j, j)] -= d;
                if let AirNode::Zone(i) = l.from {
                    jacobian[(j, i)] += d;
                }
            }
            flows.push(r);
        }
        Evaluation { residuals, jacobian, flows }
    }
}

/// Finds the zone pressures that balance every zone's mass flows, by damped
/// Newton iteration from zero pressures.
pub fn solve_pressure_network(
    net: &AirflowNetwork,
    zone_temps: &[f64],
    outdoor: f64,
    wind_speed: f64,
    wind_dir: f64,
    opts: &AirflowOptions,
) -> Result<AirflowSolution> {
    let n = net.zone_names.len();
    let mut p = vec![0.0; n];
    let mut eval = net.evaluate(&p, zone_temps, outdoor, wind_speed, wind_dir);
    let mut norm = max_abs(&eval.residuals);
    let mut history = Vec::new();
    for iteration in 0..=opts.max_iterations {
        if norm < opts.tolerance {
            return Ok(AirflowSolution {
                pressures: p,
                flows: eval.flows,
                residuals: eval.residuals,
                iterations: iteration,
            });
        }
        if iteration == opts.max_iterations {
            break;
        }
        history.push(norm);
        let lu = Lu::factor(&eval.jacobian).map_err(|c| Error::Singular {
            node: format!("pressure node of zone {}", net.zone_names[c.0]),
        })?;
        let neg: Vec<f64> = eval.residuals.iter().map(|r| -r).collect();
        let delta = lu.solve(&neg);
        let mut step = 1.0;
        let mut halvings = 0;
        loop {
            let trial: Vec<f64> = p.iter().zip(&delta).map(|(x, d)| x + step * d).collect();
            let trial_eval = net.evaluate(&trial, zone_temps, outdoor, wind_speed, wind_dir);
            let trial_norm = max_abs(&trial_eval.residuals);
            if trial_norm < norm || halvings == opts.max_halvings {
                p = trial;
                eval = trial_eval;
                norm = trial_norm;
                break;
            }
            step /= 2.0;
            halvings += 1;
        }
    }
    Err(Error::Convergence {
        what: format!("airflow network (residuals {:?})", eval.residuals),
        iterations: opts.max_iterations as usize,
        history,
    })
}
