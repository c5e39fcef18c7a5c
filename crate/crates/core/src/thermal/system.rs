//! The per-zone state equation `C·dT/dt = A·T + B`, kept as a sum of
//! per-phenomenon contributions.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};

#[derive(Debug, Clone)]
pub struct ZoneSystem {
    /// Display name of each node, for diagnostics.
    pub node_names: Arc<[String]>,
    /// J/K, diagonal of `C`.
    pub capacity: Vec<f64>,
    /// Conduction in walls and windows (and to the ground).
    pub a_cond: Matrix,
    /// Interior convection, linearised about the current iterate.
    pub a_cvi_lin: Matrix,
    /// Exterior convection and linearised exterior longwave.
    pub a_cve: Matrix,
    /// Interior longwave exchange between surfaces.
    pub a_lwi: Matrix,
    /// Air renewal by incoming flows.
    pub a_airflow: Matrix,
    /// Conductances to nodes owned by neighbouring zones.
    pub a_connex: Matrix,
    /// Interior shortwave absorbed.
    pub b_swi: Vec<f64>,
    /// Exterior shortwave absorbed.
    pub b_swe: Vec<f64>,
    /// Exterior longwave exchange with sky and surroundings.
    pub b_lwe: Vec<f64>,
    /// Exterior convection from the outdoor air.
    pub b_cve: Vec<f64>,
    /// Deep-ground boundary of slabs on grade.
    pub b_ground: Vec<f64>,
    pub b_int_load: Vec<f64>,
    pub b_hvac: Vec<f64>,
    /// Constant part of the linearised interior convection.
    pub b_cvi_nlin: Vec<f64>,
    /// Enthalpy of air entering from outdoors.
    pub b_airflow: Vec<f64>,
    /// Neighbour temperatures seen through `a_connex` and incoming air from
    /// other zones.
    pub b_connex: Vec<f64>,
    /// Node temperatures at the start of the step, °C.
    pub temperatures: Vec<f64>,
}

impl ZoneSystem {
    pub fn new(node_names: Arc<[String]>, capacity: Vec<f64>, temperatures: Vec<f64>) -> Self {
        let n = capacity.len();
        assert_eq!(node_names.len(), n);
        assert_eq!(temperatures.len(), n);
        let m = || Matrix::zeros(n);
        let v = || vec![0.0; n];
        Self {
            node_names,
            capacity,
            a_cond: m(),
            a_cvi_lin: m(),
            a_cve: m(),
            a_lwi: m(),
            a_airflow: m(),
            a_connex: m(),
            b_swi: v(),
            b_swe: v(),
            b_lwe: v(),
            b_cve: v(),
            b_ground: v(),
            b_int_load: v(),
            b_hvac: v(),
            b_cvi_nlin: v(),
            b_airflow: v(),
            b_connex: v(),
            temperatures,
        }
    }

    pub fn len(&self) -> usize {
        self.capacity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capacity.is_empty()
    }

    pub fn matrices(&self) -> [&Matrix; 6] {
        [&self.a_cond, &self.a_cvi_lin, &self.a_cve, &self.a_lwi, &self.a_airflow, &self.a_connex]
    }

    pub fn vectors(&self) -> [&Vec<f64>; 10] {
        [
            &self.b_swi,
            &self.b_swe,
            &self.b_lwe,
            &self.b_cve,
            &self.b_ground,
            &self.b_int_load,
            &self.b_hvac,
            &self.b_cvi_nlin,
            &self.b_airflow,
            &self.b_connex,
        ]
    }

    pub fn a(&self) -> Matrix {
        let mut a = Matrix::zeros(self.len());
        for m in self.matrices() {
            a += m;
        }
        a
    }

    pub fn b(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.len()];
        for v in self.vectors() {
            b.iter_mut().zip(v).for_each(|(x, y)| *x += y);
        }
        b
    }

    /// `C/dt - A`.
    pub fn step_matrix(&self, dt: f64) -> Matrix {
        let a = self.a();
        let n = self.len();
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = -a[(i, j)];
            }
            m[(i, i)] += self.capacity[i] / dt;
        }
        m
    }

    /// `C/dt·T_old + B`.
    pub fn step_rhs(&self, dt: f64) -> Vec<f64> {
        self.b()
            .iter()
            .zip(self.capacity.iter().zip(&self.temperatures))
            .map(|(b, (c, t))| c / dt * t + b)
            .collect()
    }

    /// Net power into each node for temperatures `t`, `A·t + B`.
    pub fn net_power(&self, t: &[f64]) -> Vec<f64> {
        self.a().mul_vec(t).iter().zip(self.b()).map(|(x, y)| x + y).collect()
    }

    pub fn factor(&self, m: &Matrix) -> Result<Lu> {
        Lu::factor(m).map_err(|col| Error::Singular { node: self.node_names[col.0].clone() })
    }
}

/// One backward-Euler step: solves `(C/dt - A)·T_new = C/dt·T_old + B`.
pub fn step_implicit(sys: &ZoneSystem, dt: f64) -> Result<Vec<f64>> {
    let lu = sys.factor(&sys.step_matrix(dt))?;
    Ok(lu.solve(&sys.step_rhs(dt)))
}
