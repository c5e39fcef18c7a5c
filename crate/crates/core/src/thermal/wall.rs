//! Lumped conduction elements.

use crate::building::{Glazing, Layer};

/// Two-capacitor chain `A –R/4– 1 –R/2– 2 –R/4– B` with `C/2` at nodes 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallNodes {
    /// K/W, face A to node 1, node 1 to node 2, node 2 to face B.
    pub resistances: [f64; 3],
    /// J/K at nodes 1 and 2.
    pub capacities: [f64; 2],
}

impl WallNodes {
    pub fn total_resistance(&self) -> f64 {
        self.resistances.iter().sum()
    }

    pub fn total_capacity(&self) -> f64 {
        self.capacities.iter().sum()
    }

    /// Steady flux from A to B for a face temperature difference, W.
    pub fn steady_flux(&self, t_a_minus_t_b: f64) -> f64 {
        t_a_minus_t_b / self.total_resistance()
    }
}

pub fn discretize_wall(area: f64, layer: &Layer) -> WallNodes {
    let r = layer.thickness / (layer.conductivity * area);
    let c = layer.density * layer.specific_heat * layer.thickness * area;
    WallNodes { resistances: [r / 4.0, r / 2.0, r / 4.0], capacities: [c / 2.0, c / 2.0] }
}

/// Interior and exterior standard film resistances, m²K/W.
pub const INSIDE_FILM: f64 = 0.13;
pub const OUTSIDE_FILM: f64 = 0.04;
const MIN_PANE_RESISTANCE: f64 = 0.005;

/// Glazing as two surface nodes joined by the pane resistance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlazingNodes {
    /// K/W between the two faces.
    pub resistance: f64,
    /// J/K lumped at each face.
    pub capacity_per_face: f64,
}

/// The pane resistance is the U-value's air-to-air resistance less the
/// standard films, since the films are modelled by the convection and
/// radiation exchanges on each face.
pub fn discretize_glazing(g: &Glazing) -> GlazingNodes {
    let r_pane = (1.0 / g.u_value - INSIDE_FILM - OUTSIDE_FILM).max(MIN_PANE_RESISTANCE);
    GlazingNodes { resistance: r_pane / g.area, capacity_per_face: g.capacity_per_area * g.area / 2.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::building::Orientation;
    use approx::assert_relative_eq;

    fn concrete(t: f64) -> Layer {
        Layer { thickness: t, conductivity: 1.75, density: 2300.0, specific_heat: 920.0 }
    }

    #[test]
    fn twelve_cm_concrete_wall() {
        let w = discretize_wall(18.0, &concrete(0.12));
        assert_relative_eq!(w.total_resistance(), 0.12 / (1.75 * 18.0), max_relative = 1e-14);
        assert_relative_eq!(w.total_resistance(), 3.8095238e-3, max_relative = 1e-7);
        assert_relative_eq!(w.total_capacity(), 4_570_560.0, max_relative = 1e-14);
        assert_relative_eq!(w.steady_flux(10.0), 10.0 * 1.75 * 18.0 / 0.12, max_relative = 1e-14);
    }

    #[test]
    fn massless_layer_is_pure_resistance() {
        let mut l = concrete(0.1);
        l.density = 0.0;
        assert_eq!(discretize_wall(5.0, &l).capacities, [0.0, 0.0]);
    }

    #[test]
    fn doubling_area() {
        let a = discretize_wall(7.0, &concrete(0.2));
        let b = discretize_wall(14.0, &concrete(0.2));
        for k in 0..3 {
            assert_relative_eq!(b.resistances[k], a.resistances[k] / 2.0, max_relative = 1e-14);
        }
        for k in 0..2 {
            assert_relative_eq!(b.capacities[k], a.capacities[k] * 2.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn single_glazing_pane() {
        let g = Glazing {
            name: "w".into(),
            area: 4.0,
            beam_transmittance: 0.85,
            diffuse_transmittance: 0.75,
            u_value: 5.8,
            orientation: Orientation::new(90.0, 90.0),
            emissivity: 0.84,
            capacity_per_area: 12_600.0,
        };
        let n = discretize_glazing(&g);
        // The films alone nearly account for 1/U, so the pane floor applies.
        assert_relative_eq!(n.resistance, 0.005 / 4.0, max_relative = 1e-12);
        assert_relative_eq!(n.capacity_per_face, 25_200.0, max_relative = 1e-12);
    }
}
