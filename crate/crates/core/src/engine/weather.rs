//! Hourly weather: CSV ingestion and a synthetic two-regime day generator.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::building::Site;
use crate::error::{Error, Result};
use crate::solar::{declination, equation_of_time, solar_position};

pub const WEATHER_COLUMNS: [&str; 7] = ["timestamp", "gh", "dh", "tdb", "w", "wind_speed", "wind_dir"];
const TIME_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeatherRecord {
    pub timestamp: NaiveDateTime,
    /// Global horizontal irradiance, W/m².
    pub gh: f64,
    /// Diffuse horizontal irradiance, W/m².
    pub dh: f64,
    /// Dry-bulb temperature, °C.
    pub tdb: f64,
    /// Specific humidity, kg/kg.
    pub w: f64,
    /// m/s
    pub wind_speed: f64,
    /// Degrees from north, direction the wind comes from.
    pub wind_dir: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeatherSeries {
    pub records: Vec<WeatherRecord>,
    /// Rows that were corrected on load.
    pub warnings: Vec<String>,
}

pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    NaiveDateTime::parse_from_str(s, TIME_FORMAT)
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M"))
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S"))
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M"))
        .ok()
}

pub fn format_timestamp(t: &NaiveDateTime) -> String {
    t.format(TIME_FORMAT).to_string()
}

impl WeatherSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first(&self) -> Option<NaiveDateTime> {
        self.records.first().map(|r| r.timestamp)
    }

    pub fn last(&self) -> Option<NaiveDateTime> {
        self.records.last().map(|r| r.timestamp)
    }

    pub fn covers(&self, start: NaiveDateTime, end: NaiveDateTime) -> bool {
        matches!((self.first(), self.last()), (Some(a), Some(b)) if a <= start && end <= b)
    }

    /// Mean dry-bulb temperature of the whole file.
    pub fn mean_dry_bulb(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().map(|r| r.tdb).sum::<f64>() / self.records.len() as f64
    }

    /// Conditions at `t`, interpolated linearly between hourly rows.
    pub fn at(&self, t: NaiveDateTime) -> Option<WeatherRecord> {
        let first = self.first()?;
        let offset = (t - first).num_seconds();
        if offset < 0 {
            return None;
        }
        let idx = (offset / 3600) as usize;
        let rem = (offset % 3600) as f64 / 3600.0;
        let a = self.records.get(idx)?;
        if rem == 0.0 {
            return Some(WeatherRecord { timestamp: t, ..*a });
        }
        let b = self.records.get(idx + 1)?;
        let lerp = |x: f64, y: f64| x + (y - x) * rem;
        // Wind direction is interpolated along the shorter arc.
        let mut d = b.wind_dir - a.wind_dir;
        if d > 180.0 {
            d -= 360.0;
        } else if d < -180.0 {
            d += 360.0;
        }
        Some(WeatherRecord {
            timestamp: t,
            gh: lerp(a.gh, b.gh),
            dh: lerp(a.dh, b.dh),
            tdb: lerp(a.tdb, b.tdb),
            w: lerp(a.w, b.w),
            wind_speed: lerp(a.wind_speed, b.wind_speed),
            wind_dir: (a.wind_dir + d * rem).rem_euclid(360.0),
        })
    }
}

/// Reads a weather CSV. Rows must be hourly and strictly increasing; a
/// diffuse value above the global one is clipped with a warning.
pub fn read_weather<R: Read>(reader: R) -> Result<WeatherSeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Weather { row: 1, message: e.to_string() })?.clone();
    let mut col = [0usize; 7];
    for (k, name) in WEATHER_COLUMNS.iter().enumerate() {
        col[k] = headers
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| Error::Weather { row: 1, message: format!("missing column \"{name}\"") })?;
    }

    let mut series = WeatherSeries::default();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Weather { row, message: e.to_string() })?;
        let field = |k: usize| rec.get(col[k]).unwrap_or("");
        let timestamp = parse_timestamp(field(0))
            .ok_or_else(|| Error::Weather { row, message: format!("bad timestamp \"{}\"", field(0)) })?;
        let mut num = [0.0; 6];
        for k in 1..7 {
            num[k - 1] = f64::from_str(field(k)).ok().filter(|v| v.is_finite()).ok_or_else(|| {
                Error::Weather { row, message: format!("bad {} value \"{}\"", WEATHER_COLUMNS[k], field(k)) }
            })?;
        }
        let [gh, mut dh, tdb, w, wind_speed, wind_dir] = num;
        if gh < 0.0 || dh < 0.0 || wind_speed < 0.0 {
            return Err(Error::Weather { row, message: "irradiance and wind speed must be >= 0".into() });
        }
        if dh > gh {
            series.warnings.push(format!("row {row}: dh {dh} exceeds gh {gh}; clipped"));
            dh = gh;
        }
        if let Some(prev) = series.records.last() {
            let step = timestamp - prev.timestamp;
            if step <= Duration::zero() {
                return Err(Error::Weather {
                    row,
                    message: format!("timestamp {timestamp} does not follow {}", prev.timestamp),
                });
            }
            if step != Duration::hours(1) {
                return Err(Error::Weather {
                    row,
                    message: format!("gap between {} and {timestamp}", prev.timestamp),
                });
            }
        }
        series.records.push(WeatherRecord { timestamp, gh, dh, tdb, w, wind_speed, wind_dir });
    }
    Ok(series)
}

pub fn load_weather(path: &Path) -> Result<WeatherSeries> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_weather(std::io::BufReader::new(file))
}

pub fn write_weather<W: Write>(out: W, records: &[WeatherRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Config(format!("writing weather: {e}"));
    w.write_record(WEATHER_COLUMNS).map_err(err)?;
    for r in records {
        w.write_record([
            format_timestamp(&r.timestamp),
            format!("{:.2}", r.gh),
            format!("{:.2}", r.dh),
            format!("{:.3}", r.tdb),
            format!("{:.5}", r.w),
            format!("{:.2}", r.wind_speed),
            format!("{:.1}", r.wind_dir),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing weather: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayKind {
    Sunny,
    Cloudy,
}

impl FromStr for DayKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sunny" | "clear" => Ok(DayKind::Sunny),
            "cloudy" | "overcast" => Ok(DayKind::Cloudy),
            other => Err(Error::Config(format!("unknown day kind \"{other}\""))),
        }
    }
}

/// Shape parameters of the synthetic days.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub sunny_peak: f64,
    pub cloudy_peak: f64,
    pub sunny_diffuse_fraction: f64,
    pub cloudy_diffuse_fraction: f64,
    /// Global never exceeds this fraction of the extraterrestrial value.
    pub max_clearness: f64,
    pub mean_temperature: f64,
    pub temperature_amplitude: f64,
    /// Hour of the daily maximum temperature.
    pub warmest_hour: f64,
    pub humidity: f64,
    pub wind_speed: f64,
    pub wind_dir: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            sunny_peak: 950.0,
            cloudy_peak: 250.0,
            sunny_diffuse_fraction: 0.15,
            cloudy_diffuse_fraction: 0.9,
            max_clearness: 0.8,
            mean_temperature: 26.0,
            temperature_amplitude: 4.0,
            warmest_hour: 14.0,
            humidity: 0.015,
            wind_speed: 3.0,
            wind_dir: 110.0,
        }
    }
}

pub fn default_synth_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2001, 1, 15).expect("valid date")
}

/// Local clock hours of sunrise and sunset.
pub fn daylight_window(date: NaiveDate, site: &Site) -> (f64, f64) {
    let day = date.ordinal();
    let lat = site.latitude_deg.to_radians();
    let cos_w0 = (-lat.tan() * declination(day).tan()).clamp(-1.0, 1.0);
    let half_day = cos_w0.acos().to_degrees() / 15.0;
    let noon =
        12.0 - (4.0 * (site.longitude_deg - 15.0 * site.utc_offset_hours) + equation_of_time(day)) / 60.0;
    (noon - half_day, noon + half_day)
}

/// Hourly records for consecutive days starting at midnight of `start`.
pub fn synthesize(days: &[DayKind], start: NaiveDate, site: &Site, p: &SynthParams) -> Vec<WeatherRecord> {
    let mut out = Vec::with_capacity(days.len() * 24);
    for (d, kind) in days.iter().enumerate() {
        let date = start + Duration::days(d as i64);
        let (sunrise, sunset) = daylight_window(date, site);
        let (peak, fraction) = match kind {
            DayKind::Sunny => (p.sunny_peak, p.sunny_diffuse_fraction),
            DayKind::Cloudy => (p.cloudy_peak, p.cloudy_diffuse_fraction),
        };
        for hour in 0..24 {
            let t = date.and_hms_opt(hour, 0, 0).expect("valid hour");
            let clock = t.hour() as f64;
            let sun = solar_position(
                t,
                site.utc_offset_hours,
                site.latitude_deg.to_radians(),
                site.longitude_deg.to_radians(),
            );
            let gh = if clock > sunrise && clock < sunset {
                let shape = (PI * (clock - sunrise) / (sunset - sunrise)).sin();
                (peak * shape).min(p.max_clearness * sun.extraterrestrial_horizontal)
            } else {
                0.0
            }
            .max(0.0);
            out.push(WeatherRecord {
                timestamp: t,
                gh,
                dh: fraction * gh,
                tdb: p.mean_temperature
                    + p.temperature_amplitude * (2.0 * PI * (clock - p.warmest_hour) / 24.0).cos(),
                w: p.humidity,
                wind_speed: p.wind_speed,
                wind_dir: p.wind_dir,
            });
        }
    }
    out
}
