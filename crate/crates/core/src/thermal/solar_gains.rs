//! Solar radiation through windows and its distribution over the interior.

use crate::building::Glazing;
use crate::error::{Error, Result};

/// Beam transmittance at incidence `cos_i`.
pub fn beam_transmittance(normal: f64, cos_i: f64) -> f64 {
    let c = cos_i.clamp(0.0, 1.0);
    normal * (1.0 - (1.0 - c).powi(4))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransmittedSolar {
    /// W
    pub beam: f64,
    /// W
    pub diffuse: f64,
}

/// Solar power transmitted by a window for irradiances on its outer face.
pub fn window_transmission(
    glazing: &Glazing,
    beam_incident: f64,
    diffuse_incident: f64,
    cos_i: f64,
) -> TransmittedSolar {
    TransmittedSolar {
        beam: (glazing.area * beam_transmittance(glazing.beam_transmittance, cos_i) * beam_incident).max(0.0),
        diffuse: (glazing.area * glazing.diffuse_transmittance * diffuse_incident).max(0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorbingSurface {
    pub area: f64,
    pub absorptance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolarDistribution {
    /// W per surface.
    pub absorbed: Vec<f64>,
    /// Entering minus absorbed, W.
    pub residual: f64,
}

/// Splits solar power entering a zone over its surfaces.
///
/// The beam lands on `floor` (or is spread like diffuse when the zone has no
/// floor), the diffuse by area share. Reflected power is spread again by area
/// share; the infinite series of reflections is summed in closed form.
pub fn distribute_solar_gains(
    surfaces: &[AbsorbingSurface],
    beam: f64,
    diffuse: f64,
    floor: Option<usize>,
) -> Result<SolarDistribution> {
    let total_area: f64 = surfaces.iter().map(|s| s.area).sum();
    let entering = beam + diffuse;
    if surfaces.is_empty() || !(total_area > 0.0) {
        return Err(Error::Config("solar distribution needs at least one surface".into()));
    }
    let share: Vec<f64> = surfaces.iter().map(|s| s.area / total_area).collect();
    let mut first: Vec<f64> = share.iter().map(|f| f * diffuse).collect();
    match floor {
        Some(i) => first[i] += beam,
        None => first.iter_mut().zip(&share).for_each(|(q, f)| *q += f * beam),
    }
    if entering == 0.0 {
        return Ok(SolarDistribution { absorbed: vec![0.0; surfaces.len()], residual: 0.0 });
    }

    let mean_reflectance: f64 = surfaces.iter().zip(&share).map(|(s, f)| (1.0 - s.absorptance) * f).sum();
    if mean_reflectance >= 1.0 {
        return Err(Error::Config("solar distribution does not converge: no surface absorbs".into()));
    }
    let reflected: f64 = surfaces.iter().zip(&first).map(|(s, q)| (1.0 - s.absorptance) * q).sum();
    let diffuse_total = reflected / (1.0 - mean_reflectance);
    let absorbed: Vec<f64> = surfaces
        .iter()
        .zip(first.iter().zip(&share))
        .map(|(s, (q, f))| s.absorptance * (q + f * diffuse_total))
        .collect();
    let residual = entering - absorbed.iter().sum::<f64>();
    Ok(SolarDistribution { absorbed, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::building::Orientation;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn window() -> Glazing {
        Glazing {
            name: "w".into(),
            area: 4.0,
            beam_transmittance: 0.85,
            diffuse_transmittance: 0.75,
            u_value: 5.8,
            orientation: Orientation::new(90.0, 270.0),
            emissivity: 0.84,
            capacity_per_area: 12_600.0,
        }
    }

    /// Reflections followed bounce by bounce.
    fn brute_force(
        s: &[AbsorbingSurface],
        beam: f64,
        diffuse: f64,
        floor: usize,
        bounces: usize,
    ) -> Vec<f64> {
        let total: f64 = s.iter().map(|x| x.area).sum();
        let mut absorbed = vec![0.0; s.len()];
        let mut incident: Vec<f64> = s.iter().map(|x| diffuse * x.area / total).collect();
        incident[floor] += beam;
        for _ in 0..bounces {
            let mut reflected = 0.0;
            for (k, x) in s.iter().enumerate() {
                absorbed[k] += x.absorptance * incident[k];
                reflected += (1.0 - x.absorptance) * incident[k];
            }
            incident = s.iter().map(|x| reflected * x.area / total).collect();
        }
        absorbed
    }

    #[test]
    fn normal_incidence_beam() {
        let t = window_transmission(&window(), 500.0, 0.0, 1.0);
        assert_relative_eq!(t.beam, 1700.0, max_relative = 1e-14);
    }

    #[test]
    fn grazing_beam_is_blocked() {
        assert_eq!(window_transmission(&window(), 800.0, 0.0, 0.0).beam, 0.0);
    }

    #[test]
    fn diffuse_ignores_incidence() {
        for cos_i in [0.0, 0.3, 1.0] {
            assert_relative_eq!(window_transmission(&window(), 0.0, 100.0, cos_i).diffuse, 300.0);
        }
    }

    #[test]
    fn black_enclosure_takes_one_bounce() {
        let s = [
            AbsorbingSurface { area: 10.0, absorptance: 1.0 },
            AbsorbingSurface { area: 30.0, absorptance: 1.0 },
        ];
        let d = distribute_solar_gains(&s, 500.0, 200.0, Some(0)).unwrap();
        assert_eq!(d.absorbed, vec![500.0 + 50.0, 150.0]);
    }

    #[test]
    fn beam_first_hits_the_floor() {
        let s = [
            AbsorbingSurface { area: 10.0, absorptance: 0.7 },
            AbsorbingSurface { area: 30.0, absorptance: 0.4 },
        ];
        let d = distribute_solar_gains(&s, 1000.0, 0.0, Some(0)).unwrap();
        assert!(d.absorbed[0] >= 700.0);
        assert!(d.residual.abs() < 1e-9);
    }

    #[test]
    fn two_grey_surfaces_split_evenly() {
        let s = [
            AbsorbingSurface { area: 5.0, absorptance: 0.5 },
            AbsorbingSurface { area: 5.0, absorptance: 0.5 },
        ];
        let d = distribute_solar_gains(&s, 0.0, 100.0, Some(0)).unwrap();
        let oracle = brute_force(&s, 0.0, 100.0, 0, 50);
        for k in 0..2 {
            assert_relative_eq!(d.absorbed[k], 50.0, max_relative = 1e-12);
            assert_relative_eq!(d.absorbed[k], oracle[k], max_relative = 1e-12);
        }
    }

    #[test]
    fn perfect_mirrors_fail() {
        let s = [AbsorbingSurface { area: 5.0, absorptance: 0.0 }];
        assert!(distribute_solar_gains(&s, 10.0, 10.0, Some(0)).is_err());
    }

    proptest! {
        #[test]
        fn matches_bounce_by_bounce(
            surfaces in prop::collection::vec((0.5f64..40.0, 0.2f64..1.0), 1..8),
            beam in 0.0f64..3000.0,
            diffuse in 0.0f64..1500.0,
        ) {
            let s: Vec<_> = surfaces.iter().map(|&(area, absorptance)| AbsorbingSurface { area, absorptance }).collect();
            let d = distribute_solar_gains(&s, beam, diffuse, Some(0)).unwrap();
            let oracle = brute_force(&s, beam, diffuse, 0, 200);
            for k in 0..s.len() {
                prop_assert!((d.absorbed[k] - oracle[k]).abs() < 1e-6);
            }
            prop_assert!(d.residual.abs() < 0.1);
        }

        #[test]
        fn transmitted_never_negative(cos_i in 0.0f64..=1.0, b in 0.0f64..1200.0, df in 0.0f64..600.0) {
            let t = window_transmission(&window(), b, df, cos_i);
            prop_assert!(t.beam >= 0.0 && t.diffuse >= 0.0);
            prop_assert!(t.beam <= 4.0 * 0.85 * b + 1e-9);
        }
    }
}
