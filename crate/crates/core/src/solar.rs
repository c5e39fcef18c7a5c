//! Solar geometry and the reconstruction of irradiance on tilted surfaces.
//!
//! Angles are radians. Azimuths are measured from north, clockwise
//! (east = π/2). Surface tilt is the angle between the outward normal and the
//! zenith, so `0` faces up and `π` faces down.

use std::f64::consts::PI;
use std::str::FromStr;

use chrono::{Datelike, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const SOLAR_CONSTANT: f64 = 1367.0;

/// Below this altitude the circumsolar term of the anisotropic model and the
/// beam projection are not evaluated (both divide by `sin h`).
pub const MIN_SUN_ALTITUDE: f64 = 5.0 * PI / 180.0;

/// Global horizontal irradiance under which the anisotropy index is undefined.
pub const MIN_GLOBAL_FOR_ANISOTROPY: f64 = 1.0;

/// Upper bound on projected beam irradiance.
pub const BEAM_CLAMP: f64 = 1.05 * SOLAR_CONSTANT;

pub const KELVIN: f64 = 273.15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SunPosition {
    pub altitude: f64,
    pub azimuth: f64,
    pub declination: f64,
    /// Extraterrestrial irradiance on a horizontal plane, W/m².
    pub extraterrestrial_horizontal: f64,
}

impl SunPosition {
    pub fn is_up(&self) -> bool {
        self.altitude > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceOrientation {
    pub tilt: f64,
    pub azimuth: f64,
}

impl SurfaceOrientation {
    pub fn new(tilt: f64, azimuth: f64) -> Self {
        Self { tilt, azimuth }
    }

    pub fn from_degrees(tilt_deg: f64, azimuth_deg: f64) -> Self {
        Self::new(tilt_deg.to_radians(), azimuth_deg.to_radians())
    }

    pub fn horizontal() -> Self {
        Self::new(0.0, 0.0)
    }

    /// The same plane seen from the other side.
    pub fn reversed(&self) -> Self {
        Self::new(PI - self.tilt, (self.azimuth + PI).rem_euclid(2.0 * PI))
    }

    /// Fraction of the hemisphere in front of the surface occupied by sky.
    pub fn sky_view(&self) -> f64 {
        (1.0 + self.tilt.cos()) / 2.0
    }
}

/// Horizontal irradiance split into diffuse and beam parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrradianceSample {
    pub global_horizontal: f64,
    pub diffuse_horizontal: f64,
    pub beam_horizontal: f64,
}

impl IrradianceSample {
    /// Builds a sample, clipping negative values and `dh` to `gh`.
    pub fn new(global_horizontal: f64, diffuse_horizontal: f64) -> Self {
        let gh = global_horizontal.max(0.0);
        let dh = diffuse_horizontal.clamp(0.0, gh);
        Self { global_horizontal: gh, diffuse_horizontal: dh, beam_horizontal: gh - dh }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TiltedIrradiance {
    pub beam: f64,
    pub sky_diffuse: f64,
    pub ground_reflected: f64,
    pub anisotropy_index: f64,
    pub circumsolar_shape: f64,
}

impl TiltedIrradiance {
    /// Everything that is not beam: sky diffuse plus ground reflection.
    pub fn diffuse(&self) -> f64 {
        self.sky_diffuse + self.ground_reflected
    }

    pub fn total(&self) -> f64 {
        self.beam + self.sky_diffuse + self.ground_reflected
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DiffuseModel {
    #[default]
    Isotropic,
    Willmott,
}

impl FromStr for DiffuseModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "isotropic" => Ok(Self::Isotropic),
            "willmott" => Ok(Self::Willmott),
            other => Err(Error::Config(format!("unknown diffuse model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SkyModel {
    #[default]
    Offset,
    Swinbank,
}

impl FromStr for SkyModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "offset" => Ok(Self::Offset),
            "swinbank" => Ok(Self::Swinbank),
            other => Err(Error::Config(format!("unknown sky temperature model '{other}'"))),
        }
    }
}

/// Day-of-year eccentricity correction of the solar constant.
pub fn eccentricity_factor(day_of_year: u32) -> f64 {
    1.0 + 0.033 * (2.0 * PI * day_of_year as f64 / 365.0).cos()
}

/// Cooper's declination, radians.
pub fn declination(day_of_year: u32) -> f64 {
    23.45_f64.to_radians() * (2.0 * PI * (284.0 + day_of_year as f64) / 365.0).sin()
}

/// Spencer's equation of time, minutes.
pub fn equation_of_time(day_of_year: u32) -> f64 {
    let b = 2.0 * PI * (day_of_year as f64 - 1.0) / 365.0;
    229.18
        * (0.000075 + 0.001868 * b.cos()
            - 0.032077 * b.sin()
            - 0.014615 * (2.0 * b).cos()
            - 0.040849 * (2.0 * b).sin())
}

/// Sun position for a civil (local clock) time at a site.
pub fn solar_position(
    local_time: NaiveDateTime,
    utc_offset_hours: f64,
    latitude: f64,
    longitude: f64,
) -> SunPosition {
    let day = local_time.ordinal();
    let clock =
        local_time.hour() as f64 + local_time.minute() as f64 / 60.0 + local_time.second() as f64 / 3600.0;
    let correction_min = 4.0 * (longitude.to_degrees() - 15.0 * utc_offset_hours) + equation_of_time(day);
    let solar_time = clock + correction_min / 60.0;
    let hour_angle = (15.0 * (solar_time - 12.0)).to_radians();

    let decl = declination(day);
    let sin_h =
        (latitude.sin() * decl.sin() + latitude.cos() * decl.cos() * hour_angle.cos()).clamp(-1.0, 1.0);
    let altitude = sin_h.asin();

    let y = -decl.cos() * hour_angle.sin() * latitude.cos();
    let x = decl.sin() - sin_h * latitude.sin();
    let azimuth = y.atan2(x).rem_euclid(2.0 * PI);

    SunPosition {
        altitude,
        azimuth,
        declination: decl,
        extraterrestrial_horizontal: SOLAR_CONSTANT * eccentricity_factor(day) * sin_h.max(0.0),
    }
}

/// Cosine of the angle between the sun direction and the surface normal.
pub fn incidence_cosine(sun: &SunPosition, surf: &SurfaceOrientation) -> f64 {
    let (h, s) = (sun.altitude, surf.tilt);
    (h.sin() * s.cos() + h.cos() * s.sin() * (sun.azimuth - surf.azimuth).cos()).clamp(-1.0, 1.0)
}

pub fn beam_on_tilted(sample: &IrradianceSample, sun: &SunPosition, surf: &SurfaceOrientation) -> f64 {
    if sample.beam_horizontal <= 0.0 || sun.altitude <= MIN_SUN_ALTITUDE {
        return 0.0;
    }
    let cos_i = incidence_cosine(sun, surf);
    if cos_i <= 0.0 {
        return 0.0;
    }
    (sample.beam_horizontal * cos_i / sun.altitude.sin()).min(BEAM_CLAMP)
}

pub fn diffuse_isotropic(sample: &IrradianceSample, surf: &SurfaceOrientation) -> f64 {
    sample.diffuse_horizontal * (1.0 + surf.tilt.cos()) / 2.0
}

/// Tilt correction of the isotropic part in Willmott's model (tilt in radians).
pub fn willmott_tilt_factor(tilt: f64) -> f64 {
    1.00115 - 3.54e-2 * tilt - 2.46e-6 * tilt * tilt
}

/// Anisotropy index `F = 1 - Gh/Gh_ext·(1 - dh/Gh)`, with the clearness
/// ratio capped at 1 and the result clamped to `[0, 1]`.
pub fn anisotropy_index(global: f64, diffuse: f64, extraterrestrial: f64) -> f64 {
    let clearness = (global / extraterrestrial).min(1.0);
    (1.0 - clearness * (1.0 - diffuse / global)).clamp(0.0, 1.0)
}

/// Willmott's sky diffuse for a given anisotropy index `f`.
pub fn willmott_sky_diffuse(dh: f64, f: f64, tilt: f64, cos_i: f64, sin_h: f64) -> f64 {
    let isotropic = (1.0 + tilt.cos()) / 2.0;
    (f * willmott_tilt_factor(tilt) * isotropic + (1.0 - f) * cos_i.max(0.0) / sin_h) * dh
}

/// Sky diffuse part of a [`TiltedIrradiance`] under Willmott's model.
///
/// Falls back to the isotropic value (with `F = 1`, `C_s = 1`) when the sun
/// is lower than [`MIN_SUN_ALTITUDE`] or the sky is dark.
pub fn diffuse_willmott(
    sample: &IrradianceSample,
    sun: &SunPosition,
    surf: &SurfaceOrientation,
) -> TiltedIrradiance {
    let gh = sample.global_horizontal;
    let dh = sample.diffuse_horizontal;
    let extraterrestrial = sun.extraterrestrial_horizontal;
    if sun.altitude < MIN_SUN_ALTITUDE || gh <= MIN_GLOBAL_FOR_ANISOTROPY || extraterrestrial <= 0.0 {
        return TiltedIrradiance {
            sky_diffuse: diffuse_isotropic(sample, surf),
            anisotropy_index: 1.0,
            circumsolar_shape: 1.0,
            ..Default::default()
        };
    }
    let f = anisotropy_index(gh, dh, extraterrestrial);
    let d = willmott_sky_diffuse(dh, f, surf.tilt, incidence_cosine(sun, surf), sun.altitude.sin());
    TiltedIrradiance {
        sky_diffuse: d.max(0.0),
        anisotropy_index: f,
        circumsolar_shape: willmott_tilt_factor(surf.tilt),
        ..Default::default()
    }
}

pub fn ground_reflected(sample: &IrradianceSample, albedo: f64, surf: &SurfaceOrientation) -> f64 {
    (albedo * sample.global_horizontal * (1.0 - surf.tilt.cos()) / 2.0).max(0.0)
}

/// Equivalent sky temperature in kelvin for a dry-bulb temperature in °C.
pub fn sky_temperature(dry_bulb: f64, model: SkyModel) -> f64 {
    let t_air = dry_bulb + KELVIN;
    match model {
        SkyModel::Offset => t_air - 6.0,
        SkyModel::Swinbank => 0.0552 * t_air.powf(1.5),
    }
}

/// All three components on a surface under the selected diffuse model.
pub fn tilted_irradiance(
    sample: &IrradianceSample,
    sun: &SunPosition,
    surf: &SurfaceOrientation,
    albedo: f64,
    model: DiffuseModel,
) -> TiltedIrradiance {
    let mut out = match model {
        DiffuseModel::Isotropic => TiltedIrradiance {
            sky_diffuse: diffuse_isotropic(sample, surf),
            anisotropy_index: 1.0,
            circumsolar_shape: 1.0,
            ..Default::default()
        },
        DiffuseModel::Willmott => diffuse_willmott(sample, sun, surf),
    };
    out.beam = beam_on_tilted(sample, sun, surf);
    out.ground_reflected = ground_reflected(sample, albedo, surf);
    out
}
