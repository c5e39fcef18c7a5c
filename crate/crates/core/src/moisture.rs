//! Well-mixed specific-humidity balance of the zone air.

use crate::linalg::{Lu, Matrix};
use crate::thermal::{FlowSource, Inflow};

pub const HUMIDITY_MAX: f64 = 0.05;
/// Latent removal never dries a zone below this, kg/kg.
pub const LATENT_FLOOR: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoistureInflow {
    /// kg/s
    pub mass_flow: f64,
    /// Specific humidity of the incoming air, kg/kg.
    pub w_upstream: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HumidityStep {
    pub w: f64,
    /// Latent removal actually applied, kg/s.
    pub latent_removed: f64,
    /// The balance left [0, HUMIDITY_MAX] and was clamped.
    pub clamped: bool,
}

fn clamp(w: f64) -> (f64, bool) {
    let c = w.clamp(0.0, HUMIDITY_MAX);
    (c, c != w)
}

/// Backward-Euler update of one zone's humidity with known upstream states:
/// `M·dw/dt = Σ ṁ·(w_up - w) + gain - removal`.
pub fn step_humidity(
    air_mass: f64,
    w_old: f64,
    inflows: &[MoistureInflow],
    gain: f64,
    latent_removal: f64,
    dt: f64,
) -> HumidityStep {
    let storage = air_mass / dt;
    let den = storage + inflows.iter().map(|f| f.mass_flow).sum::<f64>();
    let num = storage * w_old + inflows.iter().map(|f| f.mass_flow * f.w_upstream).sum::<f64>() + gain;
    let removal = latent_removal.min((num - LATENT_FLOOR * den).max(0.0)).max(0.0);
    let (w, clamped) = clamp((num - removal) / den);
    HumidityStep { w, latent_removed: removal, clamped }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneMoisture {
    /// kg of dry air.
    pub air_mass: f64,
    pub w_old: f64,
    /// kg/s
    pub gain: f64,
    /// Requested latent removal, kg/s.
    pub latent_removal: f64,
}

/// Solves the humidity of all zones at once, so zone-to-zone exchanges are
/// implicit on both sides.
pub fn solve_building_humidity(
    zones: &[ZoneMoisture],
    inflows: &[Vec<Inflow>],
    w_outdoor: f64,
    dt: f64,
) -> Vec<HumidityStep> {
    let n = zones.len();
    if n == 0 {
        return vec![];
    }
    let mut m = Matrix::zeros(n);
    let mut rhs = vec![0.0; n];
    for (i, z) in zones.iter().enumerate() {
        let storage = z.air_mass / dt;
        m[(i, i)] += storage;
        rhs[i] += storage * z.w_old + z.gain;
        for f in &inflows[i] {
            m[(i, i)] += f.mass_flow;
            match f.source {
                FlowSource::Exterior => rhs[i] += f.mass_flow * w_outdoor,
                FlowSource::Zone(j) => m[(i, j)] -= f.mass_flow,
            }
        }
    }
    let lu = Lu::factor(&m).expect("storage terms keep the humidity system regular");
    let free = lu.solve(&rhs);

    // Removal in a zone lowers its humidity by removal·(M⁻¹)_ii; cap it there.
    let mut removed = vec![0.0; n];
    if zones.iter().any(|z| z.latent_removal > 0.0) {
        for (i, z) in zones.iter().enumerate() {
            if z.latent_removal > 0.0 {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                let sensitivity = lu.solve(&e)[i];
                removed[i] = z.latent_removal.min(((free[i] - LATENT_FLOOR) / sensitivity).max(0.0));
            }
        }
    }
    let w = if removed.iter().any(|r| *r > 0.0) {
        let r: Vec<f64> = rhs.iter().zip(&removed).map(|(a, b)| a - b).collect();
        lu.solve(&r)
    } else {
        free
    };
    w.into_iter()
        .zip(removed)
        .map(|(w, latent_removed)| {
            let (w, clamped) = clamp(w);
            HumidityStep { w, latent_removed, clamped }
        })
        .collect()
}
