use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use super::{FemError, FieldKind, Result, StructuredMesh};

/// Closed disc membership (boundary included).
fn in_disc(x: f64, y: f64, cx: f64, cy: f64, r2: f64) -> bool {
    (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r2
}

/// B₁: radius 0.2 around (−0.4, −0.3).
pub fn in_b1(x: f64, y: f64) -> bool {
    in_disc(x, y, -0.4, -0.3, 0.04)
}

/// B₂: radius 0.1 around (0.5, 0.5).
pub fn in_b2(x: f64, y: f64) -> bool {
    in_disc(x, y, 0.5, 0.5, 0.01)
}

fn ind(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Built-in coefficient and state functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficient {
    /// 1 + 10·1_{B₁}
    Test1,
    /// 1 − 10·1_{B₁} + 5·1_{B₂}
    Test2,
    /// −10·1_{B₁} − 5·1_{B₂}
    Test3,
    /// cos(πx/2)·sin(πy/2)
    ExactState,
    Constant(f64),
}

impl Coefficient {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::Test1 => 1.0 + 10.0 * ind(in_b1(x, y)),
            Self::Test2 => 1.0 - 10.0 * ind(in_b1(x, y)) + 5.0 * ind(in_b2(x, y)),
            Self::Test3 => -10.0 * ind(in_b1(x, y)) - 5.0 * ind(in_b2(x, y)),
            Self::ExactState => (FRAC_PI_2 * x).cos() * (FRAC_PI_2 * y).sin(),
            Self::Constant(c) => c,
        }
    }

    /// Test coefficient for a test id in 1..=3.
    pub fn for_test(test_id: u8) -> Result<Self> {
        match test_id {
            1 => Ok(Self::Test1),
            2 => Ok(Self::Test2),
            3 => Ok(Self::Test3),
            _ => Err(FemError::UnknownDescriptor(format!("test {test_id}"))),
        }
    }
}

impl FromStr for Coefficient {
    type Err = FemError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "test1" => Ok(Self::Test1),
            "test2" => Ok(Self::Test2),
            "test3" => Ok(Self::Test3),
            "exact_state" | "phi_ex" => Ok(Self::ExactState),
            other => other
                .strip_prefix("const:")
                .and_then(|v| v.parse().ok())
                .map(Self::Constant)
                .ok_or_else(|| FemError::UnknownDescriptor(other.to_string())),
        }
    }
}

/// Samples at triangle centroids (P0) or nodes (P1).
pub fn sample_coefficient(coef: Coefficient, mesh: &StructuredMesh, kind: FieldKind) -> Vec<f64> {
    match kind {
        FieldKind::P0 => (0..mesh.num_cells())
            .map(|t| {
                let [x, y] = mesh.centroid(t);
                coef.eval(x, y)
            })
            .collect(),
        FieldKind::P1 => (0..mesh.num_nodes())
            .map(|v| {
                let [x, y] = mesh.node_coords(v);
                coef.eval(x, y)
            })
            .collect(),
    }
}
