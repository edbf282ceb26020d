//! Serde wire formats for the CLI and file fixtures.
//!
//! Matrices are `{"rows": n, "cols": m, "data": [[re, im], ...]}` row-major;
//! state vectors are `{"dim": n, "data": [[re, im], ...]}`. All numbers are
//! IEEE doubles, so these conversions target the `f64` instantiations.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::channels::{DensityMatrix, Measurement, QuantumOperation};
use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, StateVector};
use crate::reversal::{ReversibilityCertificate, Subspace};
use crate::teleport::{
    SchemeCharacterization, SchemeVerdict, TeleportationScheme, Violation, WeightedVector,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix<f64>> for MatrixJson {
    fn from(m: &ComplexMatrix<f64>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix<f64> {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        ComplexMatrix::new(
            j.rows,
            j.cols,
            j.data.iter().map(|[re, im]| Complex::new(*re, *im)).collect(),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateVectorJson {
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&StateVector<f64>> for StateVectorJson {
    fn from(v: &StateVector<f64>) -> Self {
        Self {
            dim: v.dim(),
            data: v.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<&StateVectorJson> for StateVector<f64> {
    type Error = Error;

    fn try_from(j: &StateVectorJson) -> Result<Self> {
        if j.data.len() != j.dim {
            return Err(Error::Shape(format!(
                "state vector declares dim {} but has {} amplitudes",
                j.dim,
                j.data.len()
            )));
        }
        StateVector::new(j.data.iter().map(|[re, im]| Complex::new(*re, *im)).collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutcomeJson {
    pub label: String,
    pub kraus: Vec<MatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasurementJson {
    pub dim: usize,
    pub outcomes: Vec<OutcomeJson>,
}

impl From<&Measurement<f64>> for MeasurementJson {
    fn from(m: &Measurement<f64>) -> Self {
        Self {
            dim: m.dim(),
            outcomes: m
                .outcomes()
                .iter()
                .map(|(label, op)| OutcomeJson {
                    label: label.clone(),
                    kraus: op.kraus().iter().map(MatrixJson::from).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&MeasurementJson> for Measurement<f64> {
    type Error = Error;

    fn try_from(j: &MeasurementJson) -> Result<Self> {
        let outcomes = j
            .outcomes
            .iter()
            .map(|o| {
                let kraus = o
                    .kraus
                    .iter()
                    .map(ComplexMatrix::try_from)
                    .collect::<Result<Vec<_>>>()?;
                if kraus.iter().any(|k| k.rows() != j.dim) {
                    return Err(Error::Shape(format!(
                        "outcome {} has Kraus operators off the declared dim {}",
                        o.label, j.dim
                    )));
                }
                Ok((o.label.clone(), QuantumOperation::new(kraus)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Measurement::new(outcomes)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub ambient_dim: usize,
    pub basis: Vec<StateVectorJson>,
}

impl From<&Subspace<f64>> for SubspaceJson {
    fn from(s: &Subspace<f64>) -> Self {
        Self {
            ambient_dim: s.ambient_dim(),
            basis: s.basis().iter().map(StateVectorJson::from).collect(),
        }
    }
}

impl TryFrom<&SubspaceJson> for Subspace<f64> {
    type Error = Error;

    fn try_from(j: &SubspaceJson) -> Result<Self> {
        Subspace::new(
            j.ambient_dim,
            j.basis
                .iter()
                .map(StateVector::try_from)
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightedVectorJson {
    pub gamma: f64,
    pub vector: StateVectorJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchemeJson {
    pub d: usize,
    pub resource: StateVectorJson,
    pub measurement: Vec<WeightedVectorJson>,
}

impl From<&TeleportationScheme<f64>> for SchemeJson {
    fn from(s: &TeleportationScheme<f64>) -> Self {
        Self {
            d: s.d(),
            resource: StateVectorJson::from(s.resource()),
            measurement: s
                .measurement()
                .iter()
                .map(|wv| WeightedVectorJson {
                    gamma: wv.gamma,
                    vector: StateVectorJson::from(&wv.vector),
                })
                .collect(),
        }
    }
}

impl TryFrom<&SchemeJson> for TeleportationScheme<f64> {
    type Error = Error;

    fn try_from(j: &SchemeJson) -> Result<Self> {
        TeleportationScheme::new(
            j.d,
            StateVector::try_from(&j.resource)?,
            j.measurement
                .iter()
                .map(|wv| {
                    Ok(WeightedVector {
                        gamma: wv.gamma,
                        vector: StateVector::try_from(&wv.vector)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub mu_squared: f64,
    pub residual: f64,
    pub unitary: MatrixJson,
}

impl From<&ReversibilityCertificate<f64>> for CertificateJson {
    fn from(c: &ReversibilityCertificate<f64>) -> Self {
        Self {
            mu_squared: c.mu_squared,
            residual: c.residual,
            unitary: MatrixJson::from(&c.reversing_unitary),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ViolationJson {
    pub outcome: Option<usize>,
    pub kind: String,
    pub magnitude: f64,
}

impl From<&Violation<f64>> for ViolationJson {
    fn from(v: &Violation<f64>) -> Self {
        Self {
            outcome: v.outcome,
            kind: v.kind.as_str().to_string(),
            magnitude: v.magnitude,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictJson {
    pub valid: bool,
    pub probabilities: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrections: Option<Vec<MatrixJson>>,
    pub violations: Vec<ViolationJson>,
}

impl From<&SchemeVerdict<f64>> for VerdictJson {
    fn from(v: &SchemeVerdict<f64>) -> Self {
        Self {
            valid: v.valid,
            probabilities: v.probabilities.clone(),
            corrections: v
                .corrections
                .as_ref()
                .map(|us| us.iter().map(MatrixJson::from).collect()),
            violations: v.violations.iter().map(ViolationJson::from).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacterizationJson {
    pub valid: bool,
    pub resource_schmidt: Vec<f64>,
    pub measurement_schmidt: Vec<Vec<f64>>,
    pub probabilities: Vec<f64>,
    pub k: f64,
    pub canonical_residuals: Vec<f64>,
    pub violations: Vec<ViolationJson>,
}

impl From<&SchemeCharacterization<f64>> for CharacterizationJson {
    fn from(c: &SchemeCharacterization<f64>) -> Self {
        Self {
            valid: c.valid,
            resource_schmidt: c.resource_schmidt.clone(),
            measurement_schmidt: c.measurement_schmidt.clone(),
            probabilities: c.probabilities.clone(),
            k: c.k,
            canonical_residuals: c.canonical_residuals.clone(),
            violations: c.violations.iter().map(ViolationJson::from).collect(),
        }
    }
}

/// Density matrix wire form (same layout as a matrix), validated on parse.
pub fn density_from_json(j: &MatrixJson) -> Result<DensityMatrix<f64>> {
    DensityMatrix::new(ComplexMatrix::try_from(j)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trips_through_json() {
        let m = ComplexMatrix::<f64>::from_fn(2, 3, |i, j| {
            Complex::new(i as f64 + 0.25, j as f64 - 0.5)
        });
        let dto = MatrixJson::from(&m);
        let text = serde_json::to_string(&dto).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        let m2 = ComplexMatrix::try_from(&back).unwrap();
        assert!(m.max_abs_diff(&m2) == 0.0);
    }

    #[test]
    fn scheme_round_trips_through_json() {
        let scheme = TeleportationScheme::<f64>::bell();
        let dto = SchemeJson::from(&scheme);
        let text = serde_json::to_string(&dto).unwrap();
        let back: SchemeJson = serde_json::from_str(&text).unwrap();
        let scheme2 = TeleportationScheme::try_from(&back).unwrap();
        assert_eq!(scheme2.d(), 2);
        assert_eq!(scheme2.outcome_count(), 4);
    }

    #[test]
    fn invalid_payloads_are_rejected() {
        let bad = MatrixJson {
            rows: 2,
            cols: 2,
            data: vec![[1.0, 0.0]],
        };
        assert!(ComplexMatrix::try_from(&bad).is_err());

        let bad_state = StateVectorJson {
            dim: 2,
            data: vec![[1.0, 0.0], [1.0, 0.0]],
        };
        assert!(StateVector::try_from(&bad_state).is_err());
    }
}
