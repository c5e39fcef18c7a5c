use super::{AirNode, LinkFlowResult};
use crate::building::{Building, Component};
use crate::error::Diagnostic;

/// Antisymmetric matrix of net flows between nodes. Zones take indices
/// `0..n`, the outdoors index `n`; entry `(i, j)` is the net flow from `i`
/// to `j`, kg/s.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMatrix {
    size: usize,
    data: Vec<f64>,
}

impl FlowMatrix {
    pub fn new(zones: usize) -> Self {
        let size = zones + 1;
        Self { size, data: vec![0.0; size * size] }
    }

    pub fn index(&self, node: AirNode) -> usize {
        match node {
            AirNode::Zone(i) => i,
            AirNode::Exterior => self.size - 1,
        }
    }

    pub fn get(&self, from: AirNode, to: AirNode) -> f64 {
        self.data[self.index(from) * self.size + self.index(to)]
    }

    pub fn add(&mut self, from: AirNode, to: AirNode, flow: f64) {
        let (i, j) = (self.index(from), self.index(to));
        self.data[i * self.size + j] += flow;
        self.data[j * self.size + i] -= flow;
    }

    /// Net outflow of a node.
    pub fn net_outflow(&self, node: AirNode) -> f64 {
        let i = self.index(node);
        self.data[i * self.size..(i + 1) * self.size].iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedRates {
    /// One result per fixed-flow component, in declaration order.
    pub flows: Vec<(String, AirNode, AirNode, LinkFlowResult)>,
    pub matrix: FlowMatrix,
    /// Zones whose prescribed flows do not balance.
    pub diagnostics: Vec<Diagnostic>,
}

pub const BALANCE_TOLERANCE: f64 = 1e-6;

/// Prescribed flows for an hour of the day, taken as given.
pub fn fixed_rates(building: &Building, hour: u32) -> FixedRates {
    let node = |name: &str| match building.zone_index(name) {
        Some(i) => AirNode::Zone(i),
        None => AirNode::Exterior,
    };
    let mut matrix = FlowMatrix::new(building.zones.len());
    let mut flows = Vec::new();
    for (iz, c) in building.components() {
        if let Component::FixedFlow(f) = c {
            let (from, to) = (node(&iz.side_a), node(&iz.side_b));
            let m = f.rate(hour);
            matrix.add(from, to, m);
            flows.push((
                f.name.clone(),
                from,
                to,
                LinkFlowResult {
                    mass_flow: m,
                    forward: m.max(0.0),
                    backward: (-m).max(0.0),
                    ..Default::default()
                },
            ));
        }
    }
    let diagnostics = building
        .zones
        .iter()
        .enumerate()
        .filter_map(|(i, z)| {
            let net = matrix.net_outflow(AirNode::Zone(i));
            (net.abs() > BALANCE_TOLERANCE).then(|| {
                Diagnostic::new(
                    format!("zone/{}", z.name),
                    format!("prescribed flows unbalanced by {net:.3e} kg/s at hour {hour}"),
                )
            })
        })
        .collect();
    FixedRates { flows, matrix, diagnostics }
}
