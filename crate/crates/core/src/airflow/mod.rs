//! Inter-zone air exchange: prescribed flow rates or a network of pressure
//! nodes joined by nonlinear flow laws.

mod fixed;
mod network;

use crate::building::{LargeOpening, PowerLaw};

pub use fixed::{fixed_rates, FixedRates, FlowMatrix};
pub use network::{
    airflow_links, solve_pressure_network, AirLink, AirflowNetwork, AirflowOptions, AirflowSolution,
};

pub const GRAVITY: f64 = 9.81;
/// Air density used for wind pressure, kg/m³.
pub const WIND_AIR_DENSITY: f64 = 1.2;
/// Below this pressure difference power laws are replaced by their secant.
pub const LINEAR_THRESHOLD: f64 = 0.01;
/// Number of horizontal strips of a large opening.
pub const STRIPS: usize = 10;

/// Pressure node: a zone or the outdoors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AirNode {
    Zone(usize),
    Exterior,
}

/// Dry air density at a temperature in °C, kg/m³.
pub fn air_density(t: f64) -> f64 {
    353.0 / (t + 273.15)
}

/// Pressure coefficient for an incidence angle between wind direction and
/// façade normal, degrees in [0, 180].
pub fn pressure_coefficient(incidence_deg: f64) -> f64 {
    0.75 - 1.05 * incidence_deg.clamp(0.0, 180.0) / 180.0
}

/// Wind pressure on a façade, Pa. Directions and azimuths are degrees from
/// north; the wind direction is where the wind blows from.
pub fn wind_pressure(wind_speed: f64, wind_dir_deg: f64, facade_azimuth_deg: f64) -> f64 {
    let diff = (wind_dir_deg - facade_azimuth_deg).rem_euclid(360.0);
    let incidence = if diff > 180.0 { 360.0 - diff } else { diff };
    0.5 * WIND_AIR_DENSITY * pressure_coefficient(incidence) * wind_speed * wind_speed
}

/// Pressure difference across an opening, from side to side, when each node
/// pressure is referred to its own height and temperature.
pub fn stack_pressure_difference(
    z_from: f64,
    z_to: f64,
    t_from: f64,
    t_to: f64,
    p_from: f64,
    p_to: f64,
) -> f64 {
    (p_from - air_density(t_from) * GRAVITY * z_from) - (p_to - air_density(t_to) * GRAVITY * z_to)
}

/// Signed power law with the linear secant below [`LINEAR_THRESHOLD`].
/// Returns the flow and its derivative.
pub fn power_law_flow(coefficient: f64, exponent: f64, dp: f64) -> (f64, f64) {
    let a = dp.abs();
    if a < LINEAR_THRESHOLD {
        let slope = coefficient * LINEAR_THRESHOLD.powf(exponent - 1.0);
        (slope * dp, slope)
    } else {
        let m = coefficient * a.powf(exponent);
        (dp.signum() * m, exponent * m / a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinkFlowResult {
    /// kg/s, positive from `from` to `to`.
    pub mass_flow: f64,
    /// kg/s moving from `from` to `to` (≥ 0).
    pub forward: f64,
    /// kg/s moving from `to` to `from` (≥ 0).
    pub backward: f64,
    /// Net signed flow through the upper and lower halves of a large opening.
    pub upper: Option<f64>,
    pub lower: Option<f64>,
    /// d(mass_flow)/d(p_from), equal to -d(mass_flow)/d(p_to).
    pub derivative: f64,
}

/// A flow law and where it sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkLaw {
    PowerLaw(PowerLaw),
    LargeOpening(LargeOpening),
}

/// Conditions on either side of a link: node pressures at the datum and air
/// temperatures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSides {
    pub p_from: f64,
    pub p_to: f64,
    pub t_from: f64,
    pub t_to: f64,
}

/// Flow through a link whose (bottom) edge sits at height `z` above the datum.
pub fn link_flow(law: &LinkLaw, z: f64, sides: &LinkSides) -> LinkFlowResult {
    let dp_at = |h: f64| stack_pressure_difference(h, h, sides.t_from, sides.t_to, sides.p_from, sides.p_to);
    match law {
        LinkLaw::PowerLaw(p) => {
            let (m, d) = power_law_flow(p.coefficient, p.exponent, dp_at(z));
            LinkFlowResult {
                mass_flow: m,
                forward: m.max(0.0),
                backward: (-m).max(0.0),
                upper: None,
                lower: None,
                derivative: d,
            }
        }
        LinkLaw::LargeOpening(o) => {
            let strip_h = o.height / STRIPS as f64;
            let area = strip_h * o.width;
            let (rho_from, rho_to) = (air_density(sides.t_from), air_density(sides.t_to));
            let mut out = LinkFlowResult::default();
            let (mut upper, mut lower) = (0.0, 0.0);
            for k in 0..STRIPS {
                let dp = dp_at(z + (k as f64 + 0.5) * strip_h);
                let rho_up = if dp >= 0.0 { rho_from } else { rho_to };
                let c = o.discharge_coefficient * area * (2.0 * rho_up).sqrt();
                let (m, d) = power_law_flow(c, 0.5, dp);
                out.mass_flow += m;
                out.derivative += d;
                if m > 0.0 {
                    out.forward += m;
                } else {
                    out.backward -= m;
                }
                if k < STRIPS / 2 {
                    lower += m;
                } else {
                    upper += m;
                }
            }
            out.upper = Some(upper);
            out.lower = Some(lower);
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn wind_pressure_values() {
        assert_eq!(wind_pressure(0.0, 30.0, 90.0), 0.0);
        assert_relative_eq!(wind_pressure(5.0, 90.0, 90.0), 11.25, max_relative = 1e-14);
        assert_relative_eq!(wind_pressure(5.0, 270.0, 90.0), -4.5, max_relative = 1e-14);
        assert_relative_eq!(wind_pressure(5.0, 350.0, 10.0), wind_pressure(5.0, 30.0, 10.0));
    }

    #[test]
    fn stack_difference() {
        assert_eq!(stack_pressure_difference(2.0, 2.0, 20.0, 20.0, 3.0, 3.0), 0.0);
        let dp = stack_pressure_difference(1.0, 1.0, 30.0, 20.0, 0.0, 0.0);
        assert_relative_eq!(dp, 9.81 * (353.0 / 293.15 - 353.0 / 303.15), max_relative = 1e-12);
        assert!((dp - 0.39).abs() < 0.01);
        assert_relative_eq!(
            stack_pressure_difference(1.5, 1.5, 20.0, 20.0, 5.0, 0.0),
            5.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn power_law_values() {
        assert_eq!(power_law_flow(0.01, 0.5, 0.0).0, 0.0);
        assert_relative_eq!(power_law_flow(0.01, 0.5, 4.0).0, 0.02, max_relative = 1e-14);
        assert_relative_eq!(power_law_flow(0.01, 0.5, -4.0).0, -0.02, max_relative = 1e-14);
        // The secant joins the power law at the threshold.
        let below = power_law_flow(0.01, 0.65, LINEAR_THRESHOLD * (1.0 - 1e-12)).0;
        let at = power_law_flow(0.01, 0.65, LINEAR_THRESHOLD).0;
        assert_relative_eq!(below, at, max_relative = 1e-9);
    }

    /// Two-way flow integrated analytically over the height of an opening
    /// between two still zones with datum pressure difference `dp0`.
    fn two_way_oracle(o: &LargeOpening, z: f64, t_hot: f64, t_cold: f64, dp0: f64) -> (f64, f64) {
        let (rh, rc) = (air_density(t_hot), air_density(t_cold));
        // dp(h) = dp0 + g·(ρc - ρh)·h, hot side is `from`.
        let slope = GRAVITY * (rc - rh);
        let neutral = -dp0 / slope;
        let int = |a: f64, b: f64, rho: f64| {
            // ∫ Cd·w·sqrt(2ρ|dp|) dh for dp linear in h with no sign change.
            let f = |h: f64| (dp0 + slope * h).abs().powf(1.5);
            o.discharge_coefficient * o.width * (2.0 * rho).sqrt() * (f(b) - f(a)).abs() / (1.5 * slope)
        };
        let top = z + o.height;
        let n = neutral.clamp(z, top);
        (int(n, top, rh), int(z, n, rc))
    }

    #[test]
    fn large_opening_exchanges_both_ways() {
        let o = LargeOpening { height: 2.0, width: 1.0, discharge_coefficient: 0.61 };
        // Datum pressures that put the neutral plane at mid-height.
        let dp0 = -GRAVITY * (air_density(20.0) - air_density(30.0)) * 1.0;
        let sides = LinkSides { p_from: dp0, p_to: 0.0, t_from: 30.0, t_to: 20.0 };
        let r = link_flow(&LinkLaw::LargeOpening(o), 0.0, &sides);
        assert!(r.upper.unwrap() > 0.0, "hot air leaves at the top");
        assert!(r.lower.unwrap() < 0.0, "cold air enters at the bottom");
        let (out_top, in_bottom) = two_way_oracle(&o, 0.0, 30.0, 20.0, dp0);
        assert_relative_eq!(r.forward, out_top, max_relative = 0.02);
        assert_relative_eq!(r.backward, in_bottom, max_relative = 0.02);
        assert!(r.mass_flow.abs() < 0.05 * r.forward);
    }

    proptest! {
        #[test]
        fn antisymmetric(c in 1e-4f64..1.0, n in 0.5f64..=1.0, dp in -100.0f64..100.0) {
            prop_assert_eq!(power_law_flow(c, n, dp).0, -power_law_flow(c, n, -dp).0);
        }

        #[test]
        fn strictly_increasing(c in 1e-4f64..1.0, n in 0.5f64..=1.0, a in -60.0f64..60.0, d in 1e-6f64..10.0) {
            prop_assert!(power_law_flow(c, n, a + d).0 > power_law_flow(c, n, a).0);
        }

        #[test]
        fn derivative_matches_differences(c in 1e-4f64..1.0, n in 0.5f64..=1.0, ln in (0.010_001f64).ln()..(50.0f64).ln(), neg in any::<bool>()) {
            let dp = if neg { -ln.exp() } else { ln.exp() };
            let h = 1e-7 * dp.abs();
            let fd = (power_law_flow(c, n, dp + h).0 - power_law_flow(c, n, dp - h).0) / (2.0 * h);
            let an = power_law_flow(c, n, dp).1;
            prop_assert!((fd - an).abs() <= 0.01 * an.abs());
        }
    }
}
