use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{AirflowModel, Building, Component, EXTERIOR};
use crate::error::Diagnostic;

fn unit_interval(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

/// Checks every invariant of a building and returns the findings ordered by
/// entity path. An empty list means the building is valid.
pub fn validate_building(b: &Building) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |path: String, msg: String| out.push(Diagnostic::new(path, msg));

    if !(-90.0..=90.0).contains(&b.site.latitude_deg) {
        push("site".into(), "latitude_deg must be in [-90, 90]".into());
    }
    if !(-180.0..=180.0).contains(&b.site.longitude_deg) {
        push("site".into(), "longitude_deg must be in [-180, 180]".into());
    }
    if !unit_interval(b.site.albedo) {
        push("site".into(), "albedo must be in [0, 1]".into());
    }
    if !(-14.0..=14.0).contains(&b.site.utc_offset_hours) {
        push("site".into(), "utc_offset_hours must be in [-14, 14]".into());
    }

    if b.zones.is_empty() {
        push("building".into(), "at least one zone is required".into());
    }

    let mut zone_names = BTreeSet::new();
    for z in &b.zones {
        let path = format!("zone/{}", z.name);
        if z.name.is_empty() {
            push(path.clone(), "zone name must not be empty".into());
        }
        if z.name == EXTERIOR {
            push(path.clone(), format!("{EXTERIOR} is reserved"));
        }
        if !zone_names.insert(z.name.as_str()) {
            push(path.clone(), "duplicate zone name".into());
        }
        if !positive(z.volume) {
            push(path.clone(), format!("volume must be > 0 (got {})", z.volume));
        }
        if let Some(c) = z.air_capacity {
            if !positive(c) {
                push(path.clone(), format!("air_capacity must be > 0 (got {c})"));
            }
        }
        for problem in z.convection.check() {
            push(path.clone(), problem);
        }
        if let Some(g) = &z.internal_gains {
            if g.hourly.len() != 24 {
                push(path.clone(), format!("internal_gains needs 24 hourly values (got {})", g.hourly.len()));
            }
            if !unit_interval(g.radiative_fraction) {
                push(path.clone(), "internal_gains.radiative_fraction must be in [0, 1]".into());
            }
        }
        if let Some(g) = &z.moisture_gains {
            if g.len() != 24 {
                push(path.clone(), format!("moisture_gains needs 24 hourly values (got {})", g.len()));
            }
        }
        if !(0.0..=0.05).contains(&z.initial_humidity) {
            push(path.clone(), "initial_humidity must be in [0, 0.05]".into());
        }
        if !z.initial_temperature.is_finite() || !z.reference_height.is_finite() {
            push(path.clone(), "initial_temperature and reference_height must be finite".into());
        }
    }

    let known = |name: &str| name == EXTERIOR || zone_names.contains(name);
    let mut interzone_names = BTreeSet::new();
    let mut component_names = BTreeSet::new();
    let mut hvac_per_zone: BTreeMap<&str, usize> = BTreeMap::new();

    for iz in &b.interzones {
        let path = format!("interzone/{}", iz.name);
        if !interzone_names.insert(iz.name.as_str()) {
            push(path.clone(), "duplicate interzone name".into());
        }
        for side in [&iz.side_a, &iz.side_b] {
            if !known(side) {
                push(path.clone(), format!("references unknown zone \"{side}\""));
            }
        }
        if iz.side_a == iz.side_b {
            push(path.clone(), "side_a and side_b must differ".into());
        }
        if iz.components.is_empty() {
            push(path.clone(), "at least one component is required".into());
        }

        for c in &iz.components {
            let cpath = format!("{path}/{}", c.name());
            if c.name().is_empty() {
                push(cpath.clone(), "component name must not be empty".into());
            }
            if !component_names.insert(c.name()) {
                push(cpath.clone(), "duplicate component name".into());
            }
            match c {
                Component::Wall(w) => {
                    if !positive(w.area) {
                        push(cpath.clone(), format!("area must be > 0 (got {})", w.area));
                    }
                    if !positive(w.layer.thickness) || !positive(w.layer.conductivity) {
                        push(cpath.clone(), "layer thickness and conductivity must be > 0".into());
                    }
                    if !(w.layer.density >= 0.0) || !(w.layer.specific_heat >= 0.0) {
                        push(cpath.clone(), "layer density and specific_heat must be >= 0".into());
                    }
                    for (what, pair) in [("absorptance", w.absorptance), ("emissivity", w.emissivity)] {
                        if !unit_interval(pair.a) || !unit_interval(pair.b) {
                            push(cpath.clone(), format!("{what} must be in [0, 1] on both faces"));
                        }
                    }
                    if !(0.0..=180.0).contains(&w.orientation.tilt_deg) {
                        push(cpath.clone(), "tilt_deg must be in [0, 180]".into());
                    }
                    if w.ground_coupled && iz.side_b != EXTERIOR {
                        push(cpath.clone(), "ground_coupled walls need side_b = EXTERIOR".into());
                    }
                }
                Component::Glazing(g) => {
                    if !positive(g.area) {
                        push(cpath.clone(), format!("area must be > 0 (got {})", g.area));
                    }
                    if !unit_interval(g.beam_transmittance) || !unit_interval(g.diffuse_transmittance) {
                        push(cpath.clone(), "transmittances must be in [0, 1]".into());
                    }
                    if !positive(g.u_value) {
                        push(cpath.clone(), "u_value must be > 0".into());
                    }
                    if !unit_interval(g.emissivity) {
                        push(cpath.clone(), "emissivity must be in [0, 1]".into());
                    }
                    if !(g.capacity_per_area >= 0.0) {
                        push(cpath.clone(), "capacity_per_area must be >= 0".into());
                    }
                    if !(0.0..=180.0).contains(&g.orientation.tilt_deg) {
                        push(cpath.clone(), "tilt_deg must be in [0, 180]".into());
                    }
                }
                Component::Opening(o) => {
                    match (&o.power_law, &o.large_opening) {
                        (None, None) => push(cpath.clone(), "needs power_law or large_opening".into()),
                        (Some(_), Some(_)) => {
                            push(cpath.clone(), "power_law and large_opening are exclusive".into())
                        }
                        _ => {}
                    }
                    if let Some(p) = &o.power_law {
                        if !positive(p.coefficient) {
                            push(cpath.clone(), "power_law.coefficient must be > 0".into());
                        }
                        if !(0.5..=1.0).contains(&p.exponent) {
                            push(
                                cpath.clone(),
                                format!("power_law.exponent must be in [0.5, 1] (got {})", p.exponent),
                            );
                        }
                    }
                    if let Some(l) = &o.large_opening {
                        if !positive(l.height) || !positive(l.width) {
                            push(cpath.clone(), "large_opening height and width must be > 0".into());
                        }
                        if !(l.discharge_coefficient > 0.0 && l.discharge_coefficient <= 1.0) {
                            push(cpath.clone(), "discharge_coefficient must be in (0, 1]".into());
                        }
                    }
                    if !o.height.is_finite() {
                        push(cpath.clone(), "height must be finite".into());
                    }
                }
                Component::Hvac(h) => {
                    for problem in h.check() {
                        push(cpath.clone(), problem);
                    }
                    if iz.side_a == EXTERIOR {
                        push(cpath.clone(), "hvac serves side_a, which must be a zone".into());
                    } else {
                        *hvac_per_zone.entry(iz.side_a.as_str()).or_default() += 1;
                    }
                }
                Component::FixedFlow(f) => {
                    if !(f.mass_flow >= 0.0) || !f.mass_flow.is_finite() {
                        push(cpath.clone(), "mass_flow must be >= 0".into());
                    }
                    if f.schedule.len() != 24 {
                        push(
                            cpath.clone(),
                            format!("schedule needs 24 hourly values (got {})", f.schedule.len()),
                        );
                    }
                    if f.schedule.iter().any(|v| !(*v >= 0.0)) {
                        push(cpath.clone(), "schedule multipliers must be >= 0".into());
                    }
                }
            }
        }
    }

    for (zone, n) in hvac_per_zone {
        if n > 1 {
            push(format!("zone/{zone}"), format!("served by {n} hvac systems; at most one allowed"));
        }
    }

    if b.models.airflow == AirflowModel::PressureNetwork {
        for zone in disconnected_zones(b) {
            push(
                format!("zone/{zone}"),
                format!("no path of openings to {EXTERIOR}; the pressure network needs one"),
            );
        }
    }

    out.sort();
    out
}

/// Zones that no chain of openings links to the exterior.
fn disconnected_zones(b: &Building) -> Vec<&str> {
    let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for iz in &b.interzones {
        if iz.components.iter().any(|c| matches!(c, Component::Opening(_))) {
            adj.entry(&iz.side_a).or_default().push(&iz.side_b);
            adj.entry(&iz.side_b).or_default().push(&iz.side_a);
        }
    }
    let mut seen = BTreeSet::from([EXTERIOR]);
    let mut queue = VecDeque::from([EXTERIOR]);
    while let Some(n) = queue.pop_front() {
        for &m in adj.get(n).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    b.zones.iter().map(|z| z.name.as_str()).filter(|z| !seen.contains(z)).collect()
}
