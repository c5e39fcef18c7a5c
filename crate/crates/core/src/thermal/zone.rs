//! Compilation of a building into per-zone nodal models, and the per-zone
//! step solve with HVAC control and nonlinear convection iteration.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::convection::{linearized_flux, ConvectionModel, SurfaceFacing};
use super::system::ZoneSystem;
use super::wall::{discretize_glazing, discretize_wall};
use crate::building::{Building, Component, Glazing, AIR_SPECIFIC_HEAT, EXTERIOR};
use crate::error::{Error, Result};
use crate::hvac::{apply_control, required_sensible_power, HvacOutput, HvacSystem};
use crate::solar::SurfaceOrientation;

/// Row of the air node in every zone system.
pub const AIR: usize = 0;

const STEFAN_BOLTZMANN: f64 = 5.670_374_419e-8;
/// Temperature at which longwave exchanges are linearised, K.
pub const LONGWAVE_REFERENCE: f64 = 293.0;

pub fn radiative_coefficient(emissivity: f64) -> f64 {
    4.0 * emissivity * STEFAN_BOLTZMANN * LONGWAVE_REFERENCE.powi(3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeRole {
    Air,
    SurfaceA,
    Internal1,
    Internal2,
    SurfaceB,
}

impl NodeRole {
    fn label(&self) -> &'static str {
        match self {
            NodeRole::Air => "air",
            NodeRole::SurfaceA => "surface_a",
            NodeRole::Internal1 => "internal_1",
            NodeRole::Internal2 => "internal_2",
            NodeRole::SurfaceB => "surface_b",
        }
    }
}

/// A node is identified by its component (building-wide declaration index;
/// `None` for the air node) and its role within the component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeKey {
    pub component: Option<usize>,
    pub role: NodeRole,
}

impl NodeKey {
    pub const AIR: NodeKey = NodeKey { component: None, role: NodeRole::Air };

    fn of(component: usize, role: NodeRole) -> Self {
        Self { component: Some(component), role }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorSurface {
    pub node: usize,
    pub component: usize,
    pub area: f64,
    pub facing: SurfaceFacing,
    pub absorptance: f64,
    pub emissivity: f64,
    pub is_glazing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorFace {
    pub node: usize,
    pub component: usize,
    pub name: String,
    pub area: f64,
    /// Outward normal.
    pub orientation: SurfaceOrientation,
    pub absorptance: f64,
    pub emissivity: f64,
    /// Present when the face is a window transmitting into the zone.
    pub glazing: Option<Glazing>,
}

/// Conductance between a node of this zone and one owned by another zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnexLink {
    pub node: usize,
    pub conductance: f64,
    pub zone: usize,
    pub neighbor_node: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowSource {
    Exterior,
    Zone(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inflow {
    /// kg/s, non-negative.
    pub mass_flow: f64,
    pub source: FlowSource,
}

/// Boundary conditions common to every zone at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary {
    /// Outdoor dry-bulb, °C.
    pub outdoor: f64,
    /// Equivalent sky temperature, °C.
    pub sky: f64,
    /// Exterior convection coefficient, W/m²K.
    pub exterior_h: f64,
    /// Deep-ground temperature, °C.
    pub ground: f64,
}

/// Per-zone sources at one instant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZoneLoads {
    /// W absorbed on each exterior face, in [`ZoneModel::exterior`] order.
    pub exterior_absorbed: Vec<f64>,
    /// W absorbed on each interior surface, in [`ZoneModel::surfaces`] order.
    pub interior_absorbed: Vec<f64>,
    /// W delivered straight to the air node.
    pub air_gain: f64,
    /// W spread over the interior surfaces by area.
    pub radiant_gain: f64,
    pub inflows: Vec<Inflow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    pub dt: f64,
    pub hour: u32,
    /// K, on the air temperature (plus the air-node equivalent of a change in
    /// HVAC power).
    pub criterion: f64,
    pub max_iterations: u32,
}

#[derive(Debug, Clone)]
pub struct ZoneStep {
    pub temperatures: Vec<f64>,
    pub hvac: HvacOutput,
    pub iterations: u32,
    /// Diagonal of the step matrix at the air node, W/K.
    pub air_conductance: f64,
    pub system: ZoneSystem,
}

#[derive(Debug, Clone)]
pub struct ZoneModel {
    pub name: String,
    pub index: usize,
    pub node_index: BTreeMap<NodeKey, usize>,
    pub node_names: Arc<[String]>,
    pub capacity: Vec<f64>,
    pub conduction: Vec<(usize, usize, f64)>,
    /// Conductance from a node to the deep ground.
    pub ground: Vec<(usize, f64)>,
    pub connex: Vec<ConnexLink>,
    pub surfaces: Vec<InteriorSurface>,
    pub exterior: Vec<ExteriorFace>,
    pub longwave: Vec<(usize, usize, f64)>,
    /// Index into `surfaces` of the surface receiving the beam.
    pub floor: Option<usize>,
    pub convection: ConvectionModel,
    pub hvac: Option<HvacSystem>,
    /// Node distribution of one watt of HVAC power.
    pub hvac_injection: Vec<f64>,
}

struct Builder {
    keys: Vec<NodeKey>,
    names: Vec<String>,
    capacity: Vec<f64>,
}

impl Builder {
    fn add(&mut self, key: NodeKey, name: String, capacity: f64) -> usize {
        self.keys.push(key);
        self.names.push(name);
        self.capacity.push(capacity);
        self.keys.len() - 1
    }
}

struct PendingConnex {
    node: usize,
    conductance: f64,
    zone: usize,
    neighbor: NodeKey,
}

/// Lumped conduction element between face A and face B.
struct Chain {
    roles: Vec<NodeRole>,
    capacities: Vec<f64>,
    conductances: Vec<f64>,
}

fn wall_chain(area: f64, layer: &crate::building::Layer) -> Chain {
    let w = discretize_wall(area, layer);
    Chain {
        roles: vec![NodeRole::SurfaceA, NodeRole::Internal1, NodeRole::Internal2, NodeRole::SurfaceB],
        capacities: vec![0.0, w.capacities[0], w.capacities[1], 0.0],
        conductances: w.resistances.iter().map(|r| 1.0 / r).collect(),
    }
}

fn glazing_chain(g: &Glazing) -> Chain {
    let n = discretize_glazing(g);
    Chain {
        roles: vec![NodeRole::SurfaceA, NodeRole::SurfaceB],
        capacities: vec![n.capacity_per_face, n.capacity_per_face],
        conductances: vec![1.0 / n.resistance],
    }
}

/// Compiles every zone of a building. Zone `k` of the result is zone `k` of
/// the building.
pub fn compile_zones(building: &Building) -> Vec<ZoneModel> {
    let zone_of = |name: &str| building.zone_index(name);
    let mut models = Vec::with_capacity(building.zones.len());
    let mut pending_all = Vec::with_capacity(building.zones.len());

    for (zi, zone) in building.zones.iter().enumerate() {
        let mut b = Builder { keys: vec![], names: vec![], capacity: vec![] };
        b.add(NodeKey::AIR, format!("{}/air", zone.name), zone.air_capacity());
        let mut conduction = vec![];
        let mut ground = vec![];
        let mut pending = vec![];
        let mut surfaces = vec![];
        let mut exterior = vec![];
        let mut hvac = None;

        for (ci, (iz, comp)) in building.components().enumerate() {
            let on_a = iz.side_a == zone.name;
            let on_b = iz.side_b == zone.name;
            if !on_a && !on_b {
                continue;
            }
            let other = if on_a { &iz.side_b } else { &iz.side_a };
            let (chain, orientation, absorptance, emissivity, glazing, ground_coupled) = match comp {
                Component::Wall(w) => (
                    wall_chain(w.area, &w.layer),
                    w.orientation.to_surface(),
                    w.absorptance,
                    w.emissivity,
                    None,
                    w.ground_coupled,
                ),
                Component::Glazing(g) => (
                    glazing_chain(g),
                    g.orientation.to_surface(),
                    crate::building::FacePair::both(0.0),
                    crate::building::FacePair::both(g.emissivity),
                    Some(g.clone()),
                    false,
                ),
                Component::Hvac(h) => {
                    if on_a {
                        hvac = Some(h.clone());
                    }
                    continue;
                }
                Component::Opening(_) | Component::FixedFlow(_) => continue,
            };
            let area = match comp {
                Component::Wall(w) => w.area,
                Component::Glazing(g) => g.area,
                _ => unreachable!(),
            };
            let n_nodes = chain.roles.len();
            let split = chain.conductances.len() / 2;

            // Which nodes of the chain this zone owns.
            let owned: Vec<usize> = if *other == EXTERIOR {
                if ground_coupled {
                    (0..n_nodes - 1).collect()
                } else {
                    (0..n_nodes).collect()
                }
            } else if on_a {
                (0..=split).collect()
            } else {
                (split + 1..n_nodes).collect()
            };
            let mut local = BTreeMap::new();
            for &k in &owned {
                let key = NodeKey::of(ci, chain.roles[k]);
                let idx =
                    b.add(key, format!("{}:{}", comp.name(), chain.roles[k].label()), chain.capacities[k]);
                local.insert(k, idx);
            }
            for (l, &g) in chain.conductances.iter().enumerate() {
                match (local.get(&l), local.get(&(l + 1))) {
                    (Some(&i), Some(&j)) => conduction.push((i, j, g)),
                    (Some(&i), None) if *other == EXTERIOR => ground.push((i, g)),
                    (Some(&i), None) => pending.push(PendingConnex {
                        node: i,
                        conductance: g,
                        zone: zone_of(other).expect("validated reference"),
                        neighbor: NodeKey::of(ci, chain.roles[l + 1]),
                    }),
                    (None, Some(&j)) => pending.push(PendingConnex {
                        node: j,
                        conductance: g,
                        zone: zone_of(other).expect("validated reference"),
                        neighbor: NodeKey::of(ci, chain.roles[l]),
                    }),
                    (None, None) => {}
                }
            }

            // Face A's own normal is the reverse of face B's.
            let (inside_k, inside_normal, inside_abs, inside_eps) = if on_a {
                (0, orientation.reversed(), absorptance.a, emissivity.a)
            } else {
                (n_nodes - 1, orientation, absorptance.b, emissivity.b)
            };
            surfaces.push(InteriorSurface {
                node: local[&inside_k],
                component: ci,
                area,
                facing: SurfaceFacing::from_inward_tilt(inside_normal.tilt),
                absorptance: inside_abs,
                emissivity: inside_eps,
                is_glazing: glazing.is_some(),
            });
            if *other == EXTERIOR && !ground_coupled {
                let (out_k, out_normal, out_abs, out_eps) = if on_a {
                    (n_nodes - 1, orientation, absorptance.b, emissivity.b)
                } else {
                    (0, orientation.reversed(), absorptance.a, emissivity.a)
                };
                exterior.push(ExteriorFace {
                    node: local[&out_k],
                    component: ci,
                    name: comp.name().to_string(),
                    area,
                    orientation: out_normal,
                    absorptance: out_abs,
                    emissivity: out_eps,
                    glazing,
                });
            }
        }

        let n = b.keys.len();
        let node_index: BTreeMap<NodeKey, usize> = b.keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();

        let g: Vec<f64> = surfaces.iter().map(|s| radiative_coefficient(s.emissivity) * s.area).collect();
        let g_sum: f64 = g.iter().sum();
        let mut longwave = vec![];
        if g_sum > 0.0 {
            for i in 0..surfaces.len() {
                for j in i + 1..surfaces.len() {
                    let gij = g[i] * g[j] / g_sum;
                    if gij > 0.0 {
                        longwave.push((surfaces[i].node, surfaces[j].node, gij));
                    }
                }
            }
        }

        let floor = surfaces
            .iter()
            .enumerate()
            .filter(|(_, s)| s.facing == SurfaceFacing::Floor && !s.is_glazing)
            .fold(None, |best: Option<(usize, f64)>, (k, s)| match best {
                Some((_, a)) if a >= s.area => best,
                _ => Some((k, s.area)),
            })
            .map(|(k, _)| k);

        let mut hvac_injection = vec![0.0; n];
        if let Some(h) = &hvac {
            let total: f64 = surfaces.iter().map(|s| s.area).sum();
            if total > 0.0 {
                hvac_injection[AIR] = 1.0 - h.radiative_fraction;
                for s in &surfaces {
                    hvac_injection[s.node] += h.radiative_fraction * s.area / total;
                }
            } else {
                hvac_injection[AIR] = 1.0;
            }
        }

        models.push(ZoneModel {
            name: zone.name.clone(),
            index: zi,
            node_index,
            node_names: b.names.into(),
            capacity: b.capacity,
            conduction,
            ground,
            connex: vec![],
            surfaces,
            exterior,
            longwave,
            floor,
            convection: zone.convection,
            hvac,
            hvac_injection,
        });
        pending_all.push(pending);
    }

    for (zi, pending) in pending_all.into_iter().enumerate() {
        let links = pending
            .into_iter()
            .map(|p| ConnexLink {
                node: p.node,
                conductance: p.conductance,
                zone: p.zone,
                neighbor_node: models[p.zone].node_index[&p.neighbor],
            })
            .collect();
        models[zi].connex = links;
    }
    models
}

impl ZoneModel {
    pub fn len(&self) -> usize {
        self.capacity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capacity.is_empty()
    }

    pub fn interior_area(&self) -> f64 {
        self.surfaces.iter().map(|s| s.area).sum()
    }

    /// Every node at the same temperature.
    pub fn uniform(&self, t: f64) -> Vec<f64> {
        vec![t; self.len()]
    }

    /// Fills the elementary matrices and vectors for one step.
    ///
    /// `all` holds the latest temperatures of every zone (this zone's entry is
    /// not read), `linearization` the temperatures at which nonlinear
    /// convection is linearised, `t_old` this zone's temperatures at the
    /// start of the step.
    pub fn assemble(
        &self,
        bc: &Boundary,
        loads: &ZoneLoads,
        all: &[Vec<f64>],
        linearization: &[f64],
        t_old: &[f64],
    ) -> ZoneSystem {
        let mut s = ZoneSystem::new(self.node_names.clone(), self.capacity.clone(), t_old.to_vec());

        for &(i, j, g) in &self.conduction {
            s.a_cond.stamp_link(i, j, g);
        }
        for &(i, g) in &self.ground {
            s.a_cond[(i, i)] -= g;
            s.b_ground[i] += g * bc.ground;
        }
        for c in &self.connex {
            s.a_connex[(c.node, c.node)] -= c.conductance;
            s.b_connex[c.node] += c.conductance * all[c.zone][c.neighbor_node];
        }
        for &(i, j, g) in &self.longwave {
            s.a_lwi.stamp_link(i, j, g);
        }

        for (k, f) in self.exterior.iter().enumerate() {
            let hr = radiative_coefficient(f.emissivity);
            let sky_view = f.orientation.sky_view();
            s.a_cve[(f.node, f.node)] -= (bc.exterior_h + hr) * f.area;
            s.b_cve[f.node] += bc.exterior_h * f.area * bc.outdoor;
            s.b_lwe[f.node] += hr * f.area * (sky_view * bc.sky + (1.0 - sky_view) * bc.outdoor);
            s.b_swe[f.node] += loads.exterior_absorbed.get(k).copied().unwrap_or(0.0);
        }

        let interior_area = self.interior_area();
        for (k, surf) in self.surfaces.iter().enumerate() {
            let delta = linearization[surf.node] - linearization[AIR];
            let (slope, offset) = linearized_flux(&self.convection, surf.facing, delta);
            s.a_cvi_lin.stamp_link(AIR, surf.node, slope * surf.area);
            s.b_cvi_nlin[AIR] += offset * surf.area;
            s.b_cvi_nlin[surf.node] -= offset * surf.area;
            s.b_swi[surf.node] += loads.interior_absorbed.get(k).copied().unwrap_or(0.0);
            s.b_int_load[surf.node] += loads.radiant_gain * surf.area / interior_area;
        }
        s.b_int_load[AIR] += loads.air_gain;
        if self.surfaces.is_empty() {
            s.b_int_load[AIR] += loads.radiant_gain;
        }

        for inflow in &loads.inflows {
            let g = inflow.mass_flow * AIR_SPECIFIC_HEAT;
            s.a_airflow[(AIR, AIR)] -= g;
            match inflow.source {
                FlowSource::Exterior => s.b_airflow[AIR] += g * bc.outdoor,
                FlowSource::Zone(j) => s.b_connex[AIR] += g * all[j][AIR],
            }
        }
        s
    }

    /// Solves an assembled system, adding ideal HVAC power when the free
    /// response leaves the deadband during a scheduled hour. The delivered
    /// power is recorded in `b_hvac`.
    pub fn solve_system(
        &self,
        sys: &mut ZoneSystem,
        dt: f64,
        hour: u32,
    ) -> Result<(Vec<f64>, HvacOutput, f64)> {
        let m = sys.step_matrix(dt);
        let lu = sys.factor(&m)?;
        let mut t = lu.solve(&sys.step_rhs(dt));
        let mut out = HvacOutput::default();
        if let Some(h) = &self.hvac {
            if h.is_on(hour) {
                if let Some(target) = h.target(t[AIR]) {
                    let (required, response) =
                        required_sensible_power(&lu, &t, &self.hvac_injection, AIR, target);
                    out = apply_control(h, required, hour);
                    let p = out.total();
                    for (ti, ri) in t.iter_mut().zip(&response) {
                        *ti += p * ri;
                    }
                    for (b, e) in sys.b_hvac.iter_mut().zip(&self.hvac_injection) {
                        *b = p * e;
                    }
                }
            }
        }
        Ok((t, out, m[(AIR, AIR)]))
    }

    /// Assembles and solves one step. Linear convection models take a single
    /// pass; the nonlinear model re-linearises about each new solution until
    /// the air temperature moves by less than the criterion.
    #[allow(clippy::too_many_arguments)]
    pub fn iterate_nonlinear_convection(
        &self,
        bc: &Boundary,
        loads: &ZoneLoads,
        all: &[Vec<f64>],
        t_old: &[f64],
        linearization: &[f64],
        hvac_power: f64,
        opts: &StepOptions,
    ) -> Result<ZoneStep> {
        let mut lin = linearization.to_vec();
        let mut power = hvac_power;
        let mut history = Vec::new();
        let mut iterations = 0;
        loop {
            iterations += 1;
            let mut sys = self.assemble(bc, loads, all, &lin, t_old);
            let (t, hvac, g_air) = self.solve_system(&mut sys, opts.dt, opts.hour)?;
            let change = (t[AIR] - lin[AIR]).abs() + (hvac.total() - power).abs() / g_air;
            if !self.convection.is_nonlinear() || change < opts.criterion {
                return Ok(ZoneStep {
                    temperatures: t,
                    hvac,
                    iterations,
                    air_conductance: g_air,
                    system: sys,
                });
            }
            history.push(change);
            if iterations >= opts.max_iterations {
                return Err(Error::Convergence {
                    what: format!("convection in zone {}", self.name),
                    iterations: iterations as usize,
                    history,
                });
            }
            lin = t;
            power = hvac.total();
        }
    }
}
