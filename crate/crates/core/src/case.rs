use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Real (symmetric) or complex (Hermitian) two-qubit density matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Real,
    Complex,
}

impl Case {
    /// Number of real Bloore coordinates: six off-diagonal `z_ij`, doubled
    /// in the complex case.
    pub fn dimension(self) -> usize {
        match self {
            Case::Real => 6,
            Case::Complex => 12,
        }
    }

    /// Volume of the sampling cube `[-1, 1]^d`.
    pub fn cube_volume(self) -> f64 {
        (1u64 << self.dimension()) as f64
    }

    /// Factor turning Lebesgue volume in z-space into the normalization of
    /// `F(ν)` used with the closed-form jacobians.
    ///
    /// The Hilbert–Schmidt line element `tr(dρ²)` counts every real
    /// off-diagonal coordinate twice, giving `√2` per coordinate, and the
    /// unit-trace section of the diagonal contributes `√4 = 2`.
    pub fn metric_factor(self) -> f64 {
        match self {
            Case::Real => 16.0,
            Case::Complex => 128.0,
        }
    }

    /// Exact Hilbert–Schmidt volume of all two-qubit states of this kind.
    pub fn total_volume(self) -> f64 {
        match self {
            Case::Real => PI.powi(4) / 60480.0,
            Case::Complex => PI.powi(6) / 851_350_500.0,
        }
    }

    /// Ratio of boundary hyperarea to volume for the full state set.
    pub fn boundary_ratio(self) -> f64 {
        let sqrt3 = 3f64.sqrt();
        match self {
            Case::Real => 18.0 * sqrt3,
            Case::Complex => 30.0 * sqrt3,
        }
    }

    /// Smallest prime not below the dimension, the natural Faure base.
    pub fn faure_base(self) -> u64 {
        match self {
            Case::Real => 7,
            Case::Complex => 13,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Case::Real => "real",
            Case::Complex => "complex",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "real" => Ok(Case::Real),
            "complex" => Ok(Case::Complex),
            other => Err(format!("unknown case `{other}` (expected real or complex)")),
        }
    }
}
