//! Interior convection models, selectable per zone.

use serde::{Deserialize, Serialize};

/// `h = a·|ΔT|^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub a: f64,
    pub p: f64,
}

impl Correlation {
    pub const fn new(a: f64, p: f64) -> Self {
        Self { a, p }
    }

    pub fn h(&self, delta_t: f64) -> f64 {
        self.a * delta_t.abs().powf(self.p)
    }
}

pub const DEFAULT_CONSTANT_H: f64 = 5.0;

fn default_h() -> f64 {
    DEFAULT_CONSTANT_H
}
fn default_floor_up() -> f64 {
    4.04
}
fn default_ceiling_down() -> f64 {
    0.95
}
fn default_vertical() -> f64 {
    3.08
}
fn default_vertical_corr() -> Correlation {
    Correlation::new(1.31, 1.0 / 3.0)
}
fn default_unstable_corr() -> Correlation {
    Correlation::new(1.52, 1.0 / 3.0)
}
fn default_stable_corr() -> Correlation {
    Correlation::new(0.59, 0.25)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ConvectionModel {
    /// One coefficient for every surface of the zone.
    #[serde(rename = "constant")]
    ConstantH {
        #[serde(default = "default_h")]
        h: f64,
    },
    /// Linear, one coefficient per surface type.
    #[serde(rename = "per_surface")]
    PerSurfaceH {
        #[serde(default = "default_floor_up")]
        floor_up: f64,
        #[serde(default = "default_ceiling_down")]
        ceiling_down: f64,
        #[serde(default = "default_vertical")]
        vertical: f64,
    },
    /// Buoyancy-driven correlations `a·|ΔT|^p`. Unstable horizontal covers a
    /// warm floor or a cold ceiling, stable horizontal the opposite cases.
    Nonlinear {
        #[serde(default = "default_vertical_corr")]
        vertical: Correlation,
        #[serde(default = "default_unstable_corr")]
        unstable_horizontal: Correlation,
        #[serde(default = "default_stable_corr")]
        stable_horizontal: Correlation,
    },
}

impl Default for ConvectionModel {
    fn default() -> Self {
        Self::constant()
    }
}

impl ConvectionModel {
    pub fn constant() -> Self {
        Self::ConstantH { h: DEFAULT_CONSTANT_H }
    }

    pub fn per_surface() -> Self {
        Self::PerSurfaceH {
            floor_up: default_floor_up(),
            ceiling_down: default_ceiling_down(),
            vertical: default_vertical(),
        }
    }

    pub fn nonlinear() -> Self {
        Self::Nonlinear {
            vertical: default_vertical_corr(),
            unstable_horizontal: default_unstable_corr(),
            stable_horizontal: default_stable_corr(),
        }
    }

    pub fn is_nonlinear(&self) -> bool {
        matches!(self, Self::Nonlinear { .. })
    }

    /// Short label used on the command line and in reports.
    pub fn label(&self) -> &'static str {
        match self {
            Self::ConstantH { .. } => "constant",
            Self::PerSurfaceH { .. } => "per_surface",
            Self::Nonlinear { .. } => "nonlinear",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "constant" => Some(Self::constant()),
            "per_surface" => Some(Self::per_surface()),
            "nonlinear" => Some(Self::nonlinear()),
            _ => None,
        }
    }

    /// Coefficients that must be positive, and exponents that must lie in (0, 1).
    pub(crate) fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let positive = |problems: &mut Vec<String>, name: &str, v: f64| {
            if !(v > 0.0 && v.is_finite()) {
                problems.push(format!("convection coefficient {name} must be > 0 (got {v})"));
            }
        };
        match *self {
            Self::ConstantH { h } => positive(&mut problems, "h", h),
            Self::PerSurfaceH { floor_up, ceiling_down, vertical } => {
                positive(&mut problems, "floor_up", floor_up);
                positive(&mut problems, "ceiling_down", ceiling_down);
                positive(&mut problems, "vertical", vertical);
            }
            Self::Nonlinear { vertical, unstable_horizontal, stable_horizontal } => {
                for (name, c) in [
                    ("vertical", vertical),
                    ("unstable_horizontal", unstable_horizontal),
                    ("stable_horizontal", stable_horizontal),
                ] {
                    positive(&mut problems, name, c.a);
                    if !(c.p > 0.0 && c.p < 1.0) {
                        problems.push(format!("convection exponent {name}.p must be in (0, 1)"));
                    }
                }
            }
        }
        problems
    }
}

/// Geometric role of an interior surface, from the direction of its normal
/// pointing into the zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurfaceFacing {
    Floor,
    Ceiling,
    Vertical,
}

impl SurfaceFacing {
    /// `inward_tilt` is the tilt of the normal pointing into the zone air.
    pub fn from_inward_tilt(inward_tilt: f64) -> Self {
        let deg = inward_tilt.to_degrees();
        if deg < 45.0 {
            Self::Floor
        } else if deg > 135.0 {
            Self::Ceiling
        } else {
            Self::Vertical
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurfaceClass {
    FloorHeatUp,
    FloorHeatDown,
    CeilingHeatUp,
    CeilingHeatDown,
    Vertical,
}

impl SurfaceClass {
    /// `surface_minus_air` decides the direction of the heat flow.
    pub fn classify(facing: SurfaceFacing, surface_minus_air: f64) -> Self {
        match facing {
            SurfaceFacing::Vertical => Self::Vertical,
            SurfaceFacing::Floor if surface_minus_air >= 0.0 => Self::FloorHeatUp,
            SurfaceFacing::Floor => Self::FloorHeatDown,
            SurfaceFacing::Ceiling if surface_minus_air > 0.0 => Self::CeilingHeatDown,
            SurfaceFacing::Ceiling => Self::CeilingHeatUp,
        }
    }
}

/// Interior film coefficient, W/m²K.
pub fn interior_h(model: &ConvectionModel, class: SurfaceClass, delta_t: f64) -> f64 {
    match *model {
        ConvectionModel::ConstantH { h } => h,
        ConvectionModel::PerSurfaceH { floor_up, ceiling_down, vertical } => match class {
            SurfaceClass::FloorHeatUp | SurfaceClass::FloorHeatDown => floor_up,
            SurfaceClass::CeilingHeatUp | SurfaceClass::CeilingHeatDown => ceiling_down,
            SurfaceClass::Vertical => vertical,
        },
        ConvectionModel::Nonlinear { vertical, unstable_horizontal, stable_horizontal } => match class {
            SurfaceClass::Vertical => vertical.h(delta_t),
            SurfaceClass::FloorHeatUp | SurfaceClass::CeilingHeatUp => unstable_horizontal.h(delta_t),
            SurfaceClass::FloorHeatDown | SurfaceClass::CeilingHeatDown => stable_horizontal.h(delta_t),
        },
    }
}

/// Linearisation of the convective flux density `q(ΔT) = h(ΔT)·ΔT` about
/// `delta_t`: returns `(k, c)` with `q ≈ k·ΔT + c`.
///
/// Linear models give `c = 0`. For the nonlinear model `k` is the tangent
/// `(1 + p)·h` and `c = -p·h·ΔT`, so the linearised flux is exact at the
/// linearisation point.
pub fn linearized_flux(model: &ConvectionModel, facing: SurfaceFacing, delta_t: f64) -> (f64, f64) {
    let class = SurfaceClass::classify(facing, delta_t);
    let h = interior_h(model, class, delta_t);
    match *model {
        ConvectionModel::Nonlinear { vertical, unstable_horizontal, stable_horizontal } => {
            let p = match class {
                SurfaceClass::Vertical => vertical.p,
                SurfaceClass::FloorHeatUp | SurfaceClass::CeilingHeatUp => unstable_horizontal.p,
                SurfaceClass::FloorHeatDown | SurfaceClass::CeilingHeatDown => stable_horizontal.p,
            };
            ((1.0 + p) * h, -p * h * delta_t)
        }
        _ => (h, 0.0),
    }
}
