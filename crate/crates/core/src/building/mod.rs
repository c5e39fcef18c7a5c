//! Building description: zones, interzones and their components, plus the
//! building-wide model selections. Read from and written to JSON.
//!
//! Angles are degrees in the document and in these types; the thermal and
//! solar code converts them with [`Orientation::to_surface`].

mod case_study;
mod validate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hvac::HvacSystem;
use crate::solar::{DiffuseModel, SkyModel, SurfaceOrientation};
use crate::thermal::convection::ConvectionModel;

pub use case_study::{case_study_building, case_study_document};
pub use validate::validate_building;

/// Reserved side name for the outdoors.
pub const EXTERIOR: &str = "EXTERIOR";

/// Dry air density used for air capacities and moisture masses, kg/m³.
pub const AIR_DENSITY: f64 = 1.2;
/// Specific heat of air, J/kgK.
pub const AIR_SPECIFIC_HEAT: f64 = 1006.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Building {
    pub site: Site,
    #[serde(default)]
    pub models: BuildingModels,
    pub zones: Vec<Zone>,
    #[serde(default)]
    pub interzones: Vec<Interzone>,
}

fn default_albedo() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Site {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    #[serde(default)]
    pub altitude_m: f64,
    #[serde(default = "default_albedo")]
    pub albedo: f64,
    /// Offset of the weather file's local clock from UTC, hours.
    #[serde(default)]
    pub utc_offset_hours: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ExteriorConvection {
    /// 16.7 W/m²K.
    #[default]
    Constant,
    /// 5.7 + 3.8·V W/m²K.
    WindDriven,
}

impl ExteriorConvection {
    pub fn coefficient(&self, wind_speed: f64) -> f64 {
        match self {
            Self::Constant => 16.7,
            Self::WindDriven => 5.7 + 3.8 * wind_speed.max(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AirflowModel {
    #[default]
    FixedRates,
    PressureNetwork,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BuildingModels {
    #[serde(default)]
    pub exterior_convection: ExteriorConvection,
    #[serde(default)]
    pub diffuse: DiffuseModel,
    #[serde(default)]
    pub sky_temperature: SkyModel,
    #[serde(default)]
    pub airflow: AirflowModel,
}

fn default_initial_temperature() -> f64 {
    20.0
}
fn default_initial_humidity() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Zone {
    pub name: String,
    /// m³
    pub volume: f64,
    /// J/K; derived from the volume when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub air_capacity: Option<f64>,
    #[serde(default)]
    pub convection: ConvectionModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub internal_gains: Option<GainSchedule>,
    /// Hourly moisture production, kg/s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moisture_gains: Option<Vec<f64>>,
    #[serde(default = "default_initial_temperature")]
    pub initial_temperature: f64,
    #[serde(default = "default_initial_humidity")]
    pub initial_humidity: f64,
    /// Height of the zone floor above the building datum, m.
    #[serde(default)]
    pub reference_height: f64,
}

impl Zone {
    pub fn air_capacity(&self) -> f64 {
        self.air_capacity.unwrap_or(AIR_DENSITY * AIR_SPECIFIC_HEAT * self.volume)
    }

    pub fn air_mass(&self) -> f64 {
        AIR_DENSITY * self.volume
    }

    /// Internal sensible gain for an hour of the day, W.
    pub fn internal_gain(&self, hour: u32) -> f64 {
        self.internal_gains.as_ref().and_then(|g| g.hourly.get(hour as usize).copied()).unwrap_or(0.0)
    }

    pub fn moisture_gain(&self, hour: u32) -> f64 {
        self.moisture_gains.as_ref().and_then(|g| g.get(hour as usize).copied()).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainSchedule {
    /// W for each hour of the day.
    pub hourly: Vec<f64>,
    #[serde(default)]
    pub radiative_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interzone {
    pub name: String,
    pub side_a: String,
    pub side_b: String,
    pub components: Vec<Component>,
}

impl Interzone {
    pub fn touches_exterior(&self) -> bool {
        self.side_a == EXTERIOR || self.side_b == EXTERIOR
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Component {
    Wall(Wall),
    Glazing(Glazing),
    Opening(Opening),
    Hvac(HvacSystem),
    FixedFlow(FixedFlow),
}

impl Component {
    pub fn name(&self) -> &str {
        match self {
            Component::Wall(c) => &c.name,
            Component::Glazing(c) => &c.name,
            Component::Opening(c) => &c.name,
            Component::Hvac(c) => &c.name,
            Component::FixedFlow(c) => &c.name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Component::Wall(_) => "wall",
            Component::Glazing(_) => "glazing",
            Component::Opening(_) => "opening",
            Component::Hvac(_) => "hvac",
            Component::FixedFlow(_) => "fixed_flow",
        }
    }
}

/// Orientation of face B's outward normal, in degrees.
///
/// For a wall between a zone (side A) and the exterior (side B) this is the
/// usual "exterior" orientation: a south façade has tilt 90 and azimuth 180,
/// a roof tilt 0, a slab on grade tilt 180.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Orientation {
    pub tilt_deg: f64,
    #[serde(default)]
    pub azimuth_deg: f64,
}

impl Orientation {
    pub fn new(tilt_deg: f64, azimuth_deg: f64) -> Self {
        Self { tilt_deg, azimuth_deg }
    }

    /// Outward normal of face B.
    pub fn to_surface(&self) -> SurfaceOrientation {
        SurfaceOrientation::from_degrees(self.tilt_deg, self.azimuth_deg)
    }
}

/// A property given separately for face A and face B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacePair {
    pub a: f64,
    pub b: f64,
}

impl FacePair {
    pub const fn both(v: f64) -> Self {
        Self { a: v, b: v }
    }
}

fn default_absorptance() -> FacePair {
    FacePair::both(0.6)
}
fn default_emissivity() -> FacePair {
    FacePair::both(0.9)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    /// m
    pub thickness: f64,
    /// W/mK
    pub conductivity: f64,
    /// kg/m³
    pub density: f64,
    /// J/kgK
    pub specific_heat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConductionModel {
    #[default]
    R2c,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wall {
    pub name: String,
    /// m²
    pub area: f64,
    pub layer: Layer,
    #[serde(default)]
    pub conduction_model: ConductionModel,
    pub orientation: Orientation,
    #[serde(default = "default_absorptance")]
    pub absorptance: FacePair,
    #[serde(default = "default_emissivity")]
    pub emissivity: FacePair,
    /// Face B sits on the ground instead of the outdoor air.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ground_coupled: bool,
}

fn default_glass_emissivity() -> f64 {
    0.84
}
/// 6 mm of glass.
fn default_glass_capacity() -> f64 {
    0.006 * 2.1e6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Glazing {
    pub name: String,
    /// m²
    pub area: f64,
    pub beam_transmittance: f64,
    pub diffuse_transmittance: f64,
    /// Air-to-air U-value including standard films, W/m²K.
    pub u_value: f64,
    pub orientation: Orientation,
    #[serde(default = "default_glass_emissivity")]
    pub emissivity: f64,
    /// Pane heat capacity per unit area, J/m²K.
    #[serde(default = "default_glass_capacity")]
    pub capacity_per_area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLaw {
    /// kg/(s·Paⁿ)
    pub coefficient: f64,
    pub exponent: f64,
}

fn default_discharge() -> f64 {
    0.61
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LargeOpening {
    pub height: f64,
    pub width: f64,
    #[serde(default = "default_discharge")]
    pub discharge_coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Opening {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_law: Option<PowerLaw>,
    /// Height of the opening (its bottom edge for large openings) above the
    /// floor of side A, m.
    #[serde(default)]
    pub height: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub large_opening: Option<LargeOpening>,
    /// Façade orientation for wind pressure when one side is the exterior.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facade_azimuth_deg: Option<f64>,
}

fn all_ones() -> Vec<f64> {
    vec![1.0; 24]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedFlow {
    pub name: String,
    /// kg/s from side A to side B.
    pub mass_flow: f64,
    /// Hourly multiplier of `mass_flow`.
    #[serde(default = "all_ones")]
    pub schedule: Vec<f64>,
}

impl FixedFlow {
    pub fn rate(&self, hour: u32) -> f64 {
        self.mass_flow * self.schedule.get(hour as usize).copied().unwrap_or(0.0)
    }
}

impl Building {
    pub fn zone_index(&self, name: &str) -> Option<usize> {
        self.zones.iter().position(|z| z.name == name)
    }

    pub fn component_count(&self) -> usize {
        self.interzones.iter().map(|iz| iz.components.len()).sum()
    }

    /// Components with their interzone, in declaration order.
    pub fn components(&self) -> impl Iterator<Item = (&Interzone, &Component)> {
        self.interzones.iter().flat_map(|iz| iz.components.iter().map(move |c| (iz, c)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("building serialises")
    }
}

/// Parses and validates a building document.
pub fn parse_building(document: &str) -> Result<Building> {
    let building: Building = serde_json::from_str(document).map_err(|e| Error::Parse(format!("{e}")))?;
    let diagnostics = validate_building(&building);
    if diagnostics.is_empty() {
        Ok(building)
    } else {
        Err(Error::Validation(diagnostics))
    }
}
