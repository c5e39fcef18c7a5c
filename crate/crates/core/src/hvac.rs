//! Ideal air-conditioning component: deadband thermostat, hourly schedule,
//! finite or unlimited sensible power with a convective/radiative split.

use serde::{Deserialize, Deserializer, Serialize};

use crate::linalg::Lu;

fn all_hours() -> Vec<bool> {
    vec![true; 24]
}

/// Accepts 24 flags written either as booleans or as 0/1 numbers.
fn hourly_flags<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Flag {
        Bool(bool),
        Number(f64),
    }
    let raw = Vec::<Flag>::deserialize(d)?;
    Ok(raw
        .into_iter()
        .map(|f| match f {
            Flag::Bool(b) => b,
            Flag::Number(x) => x != 0.0,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvacSystem {
    pub name: String,
    pub setpoint_low: f64,
    pub setpoint_high: f64,
    /// On/off flag per hour of the day, hour 0 first.
    #[serde(default = "all_hours", deserialize_with = "hourly_flags")]
    pub schedule: Vec<bool>,
    pub heating_power_max: f64,
    pub cooling_power_max: f64,
    #[serde(default)]
    pub radiative_fraction: f64,
    /// Maximum moisture removal while cooling, kg/s.
    #[serde(default)]
    pub latent_capacity: f64,
    #[serde(default)]
    pub sizing_mode: bool,
}

impl HvacSystem {
    pub fn is_on(&self, hour: u32) -> bool {
        self.schedule.get(hour as usize).copied().unwrap_or(false)
    }

    /// The setpoint the free-floating air temperature violates, if any.
    pub fn target(&self, free_air_temperature: f64) -> Option<f64> {
        if free_air_temperature < self.setpoint_low {
            Some(self.setpoint_low)
        } else if free_air_temperature > self.setpoint_high {
            Some(self.setpoint_high)
        } else {
            None
        }
    }

    pub(crate) fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.setpoint_low <= self.setpoint_high) {
            out.push(format!(
                "setpoint_low {} exceeds setpoint_high {}",
                self.setpoint_low, self.setpoint_high
            ));
        }
        if !(self.heating_power_max >= 0.0) {
            out.push("heating_power_max must be >= 0".into());
        }
        if !(self.cooling_power_max >= 0.0) {
            out.push("cooling_power_max must be >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.radiative_fraction) {
            out.push("radiative_fraction must be in [0, 1]".into());
        }
        if !(self.latent_capacity >= 0.0) {
            out.push("latent_capacity must be >= 0".into());
        }
        if self.schedule.len() != 24 {
            out.push(format!("schedule needs 24 hourly flags (got {})", self.schedule.len()));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HvacOutput {
    pub convective: f64,
    pub radiative: f64,
    pub clamped: bool,
}

impl HvacOutput {
    pub fn total(&self) -> f64 {
        self.convective + self.radiative
    }
}

/// Sensible power (heating positive) that brings the air node of a linear
/// zone step to `target`.
///
/// `lu` factors the step matrix `C/dt - A`, `free` is the solution without
/// HVAC and `injection` the node distribution of one watt of delivered
/// power. Returns the power and the temperature response to one watt.
pub fn required_sensible_power(
    lu: &Lu,
    free: &[f64],
    injection: &[f64],
    air: usize,
    target: f64,
) -> (f64, Vec<f64>) {
    let response = lu.solve(injection);
    ((target - free[air]) / response[air], response)
}

/// Applies schedule, power limits and the radiative split to a required power.
pub fn apply_control(sys: &HvacSystem, required: f64, hour: u32) -> HvacOutput {
    if !sys.is_on(hour) || required == 0.0 {
        return HvacOutput::default();
    }
    let (delivered, clamped) = if sys.sizing_mode {
        (required, false)
    } else if required > sys.heating_power_max {
        (sys.heating_power_max, true)
    } else if required < -sys.cooling_power_max {
        (-sys.cooling_power_max, true)
    } else {
        (required, false)
    };
    let radiative = delivered * sys.radiative_fraction;
    HvacOutput { convective: delivered - radiative, radiative, clamped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn unit(sizing: bool) -> HvacSystem {
        HvacSystem {
            name: "ac".into(),
            setpoint_low: 18.0,
            setpoint_high: 20.0,
            schedule: (0..24).map(|h| (7..19).contains(&h)).collect(),
            heating_power_max: 1000.0,
            cooling_power_max: 2000.0,
            radiative_fraction: 0.0,
            latent_capacity: 0.0,
            sizing_mode: sizing,
        }
    }

    #[test]
    fn sizing_mode_delivers_everything() {
        let out = apply_control(&unit(true), -3200.0, 12);
        assert_eq!(out.total(), -3200.0);
        assert!(!out.clamped);
    }

    #[test]
    fn finite_cooling_is_clamped() {
        let out = apply_control(&unit(false), -3000.0, 12);
        assert_eq!(out.total(), -2000.0);
        assert!(out.clamped);
        let out = apply_control(&unit(false), 1500.0, 12);
        assert_eq!(out.total(), 1000.0);
        assert!(out.clamped);
    }

    #[test]
    fn schedule_off_means_nothing() {
        assert_eq!(apply_control(&unit(true), -3000.0, 3), HvacOutput::default());
    }

    #[test]
    fn radiative_split() {
        let mut sys = unit(false);
        assert_eq!(apply_control(&sys, -500.0, 10).radiative, 0.0);
        sys.radiative_fraction = 0.4;
        let out = apply_control(&sys, -500.0, 10);
        assert!((out.radiative + 200.0).abs() < 1e-12);
        assert!((out.convective + 300.0).abs() < 1e-12);
    }

    #[test]
    fn deadband_targets() {
        let sys = unit(false);
        assert_eq!(sys.target(17.0), Some(18.0));
        assert_eq!(sys.target(19.0), None);
        assert_eq!(sys.target(25.0), Some(20.0));
    }

    #[test]
    fn schedule_accepts_numbers() {
        let mut doc = serde_json::json!({
            "name": "ac", "setpoint_low": 18, "setpoint_high": 20,
            "heating_power_max": 0, "cooling_power_max": 2000,
        });
        doc["schedule"] = serde_json::Value::Array((0..24).map(|h| (h % 2).into()).collect());
        let sys: HvacSystem = serde_json::from_value(doc).unwrap();
        assert!(!sys.is_on(0) && sys.is_on(1));
    }

    /// Air node coupled to a wall node and to ambient at 0 °C.
    fn two_node() -> (Matrix, Vec<f64>) {
        let dt = 600.0;
        let mut a = Matrix::zeros(2);
        a.stamp_link(0, 1, 30.0);
        a[(0, 0)] -= 10.0;
        let cap = [5e4, 8e5];
        let mut m = Matrix::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = -a[(i, j)];
            }
            m[(i, i)] += cap[i] / dt;
        }
        let t_old = [24.0, 25.0];
        let rhs: Vec<f64> = (0..2).map(|i| cap[i] / dt * t_old[i] + 300.0 * (i == 0) as u8 as f64).collect();
        (m, rhs)
    }

    #[test]
    fn required_power_matches_pinned_air_residual() {
        let (m, rhs) = two_node();
        let lu = Lu::factor(&m).unwrap();
        let free = lu.solve(&rhs);
        let (p, _) = required_sensible_power(&lu, &free, &[1.0, 0.0], 0, 20.0);

        // Pin the air temperature, solve the wall row, read the air-row residual.
        let t_wall = (rhs[1] - m[(1, 0)] * 20.0) / m[(1, 1)];
        let residual = m[(0, 0)] * 20.0 + m[(0, 1)] * t_wall - rhs[0];
        assert!((p - residual).abs() < 1e-9 * residual.abs().max(1.0));
    }

    #[test]
    fn required_power_is_linear_in_gains() {
        let (m, rhs) = two_node();
        let lu = Lu::factor(&m).unwrap();
        let base_rhs: Vec<f64> =
            rhs.iter().enumerate().map(|(i, v)| v - 300.0 * (i == 0) as u8 as f64).collect();
        let target = 0.0;
        let p = |gain: f64| {
            let mut r = base_rhs.clone();
            r[0] += gain;
            let free = lu.solve(&r);
            required_sensible_power(&lu, &free, &[1.0, 0.0], 0, target).0
        };
        // With the target equal to ambient and old temperatures shifted out,
        // required power is affine in the gain with slope -1.
        let (p0, p1, p2) = (p(0.0), p(300.0), p(600.0));
        assert!(((p2 - p0) - 2.0 * (p1 - p0)).abs() < 1e-9);
        assert!(((p1 - p0) + 300.0).abs() < 1e-9);
    }
}
