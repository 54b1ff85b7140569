use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Activation;
use crate::error::{Error, Result};
use crate::graph::FeatureMap;
use crate::linalg::axpy;
use crate::ManifoldKind;

const DEGENERATE_NORM: f64 = 1e-12;

/// Which scalar the tMLP nonlinearity acts on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TmlpNonlinearity {
    /// `σ(⟨X, Y⟩)`: the signed coefficient of `X` along `Y`.
    #[default]
    SignedCoefficient,
    /// `σ(‖X^∥‖)` applied to the length of the parallel part.
    NormLiteral,
}

/// One tangent linear layer with weights `ω, ξ`, both `c_out × c_in` row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct TmlpLayerParams {
    pub c_in: usize,
    pub c_out: usize,
    pub omega: Vec<f64>,
    pub xi: Vec<f64>,
    pub activation: Activation,
    pub nonlinearity: TmlpNonlinearity,
}

impl TmlpLayerParams {
    pub fn new(c_in: usize, c_out: usize, omega: Vec<f64>, xi: Vec<f64>) -> Result<Self> {
        let p = Self {
            c_in,
            c_out,
            omega,
            xi,
            activation: Activation::default(),
            nonlinearity: TmlpNonlinearity::default(),
        };
        p.validate()?;
        Ok(p)
    }

    /// `ω = ξ = I`, for square layers.
    pub fn identity(c: usize, activation: Activation) -> Self {
        let mut eye = vec![0.0; c * c];
        for i in 0..c {
            eye[i * c + i] = 1.0;
        }
        Self {
            c_in: c,
            c_out: c,
            omega: eye.clone(),
            xi: eye,
            activation,
            nonlinearity: TmlpNonlinearity::default(),
        }
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    pub fn with_nonlinearity(mut self, nonlinearity: TmlpNonlinearity) -> Self {
        self.nonlinearity = nonlinearity;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_in == 0 || self.c_out == 0 {
            return Err(Error::InvalidParams(
                "tMLP layer needs c_in, c_out >= 1".into(),
            ));
        }
        for m in [&self.omega, &self.xi] {
            if m.len() != self.c_in * self.c_out {
                return Err(Error::ShapeMismatch {
                    expected: self.c_in * self.c_out,
                    found: m.len(),
                });
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParams("tMLP weights must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Applies one tangent linear layer to `c_in` tangent vectors at `p`.
pub fn tangent_layer(
    kind: ManifoldKind,
    p: &[f64],
    inputs: &[Vec<f64>],
    params: &TmlpLayerParams,
) -> Result<Vec<Vec<f64>>> {
    if inputs.len() != params.c_in {
        return Err(Error::ShapeMismatch {
            expected: params.c_in,
            found: inputs.len(),
        });
    }
    let dim = kind.ambient_dim();
    let mut out = Vec::with_capacity(params.c_out);
    let mut y = vec![0.0; dim];
    for j in 0..params.c_out {
        let mut x = vec![0.0; dim];
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, input) in inputs.iter().enumerate() {
            axpy(params.omega[j * params.c_in + i], input, &mut x);
            axpy(params.xi[j * params.c_in + i], input, &mut y);
        }
        let ny = kind.norm(p, &y);
        if ny >= DEGENERATE_NORM {
            y.iter_mut().for_each(|v| *v /= ny);
            let s = kind.inner(p, &x, &y);
            // Z = X + (σ(·) - s) Y, i.e. the parallel part s·Y is replaced
            let coeff = match params.nonlinearity {
                TmlpNonlinearity::SignedCoefficient => params.activation.apply(s) - s,
                TmlpNonlinearity::NormLiteral => {
                    let a = s.abs();
                    if a > 0.0 {
                        (params.activation.apply(a) / a - 1.0) * s
                    } else {
                        0.0
                    }
                }
            };
            axpy(coeff, &y, &mut x);
        }
        out.push(x);
    }
    Ok(out)
}

fn check_features(features: &[FeatureMap], reference: &FeatureMap) -> Result<()> {
    for f in features {
        if f.kind() != reference.kind() {
            return Err(Error::KindMismatch {
                expected: reference.kind(),
                found: f.kind(),
            });
        }
        if f.len() != reference.len() {
            return Err(Error::ShapeMismatch {
                expected: reference.len(),
                found: f.len(),
            });
        }
    }
    Ok(())
}

fn logs_at(
    kind: ManifoldKind,
    p: &[f64],
    features: &[FeatureMap],
    v: usize,
) -> Result<Vec<Vec<f64>>> {
    features.iter().map(|f| kind.log(p, f.point(v))).collect()
}

fn exp_outputs(
    kind: ManifoldKind,
    reference: &FeatureMap,
    tangents: Vec<Vec<Vec<f64>>>,
    c_out: usize,
) -> Vec<FeatureMap> {
    let n = reference.len();
    let dim = kind.ambient_dim();
    let mut data: Vec<Vec<f64>> = (0..c_out).map(|_| vec![0.0; n * dim]).collect();
    for (v, zs) in tangents.into_iter().enumerate() {
        for (j, z) in zs.iter().enumerate() {
            kind.exp_into(reference.point(v), z, &mut data[j][v * dim..(v + 1) * dim]);
        }
    }
    data.into_iter()
        .map(|d| FeatureMap::new_unchecked(kind, d))
        .collect()
}

/// One tMLP layer using channel `reference_channel` as the per-node reference point.
pub fn tmlp_layer(
    features: &[FeatureMap],
    params: &TmlpLayerParams,
    reference_channel: usize,
) -> Result<Vec<FeatureMap>> {
    let reference = features
        .get(reference_channel)
        .ok_or(Error::ShapeMismatch {
            expected: reference_channel + 1,
            found: features.len(),
        })?;
    tmlp_layer_with_reference(features, reference, params)
}

/// One tMLP layer with explicitly supplied reference points.
pub fn tmlp_layer_with_reference(
    features: &[FeatureMap],
    reference: &FeatureMap,
    params: &TmlpLayerParams,
) -> Result<Vec<FeatureMap>> {
    tmlp_with_reference(features, reference, core::slice::from_ref(params))
}

/// Chain of tMLP layers sharing one reference point per node; the `exp`/`log`
/// pair between consecutive layers cancels, so only tangent vectors are passed on.
pub fn tmlp(
    features: &[FeatureMap],
    layers: &[TmlpLayerParams],
    reference_channel: usize,
) -> Result<Vec<FeatureMap>> {
    let reference = features
        .get(reference_channel)
        .ok_or(Error::ShapeMismatch {
            expected: reference_channel + 1,
            found: features.len(),
        })?;
    tmlp_with_reference(features, reference, layers)
}

pub(crate) fn tmlp_with_reference(
    features: &[FeatureMap],
    reference: &FeatureMap,
    layers: &[TmlpLayerParams],
) -> Result<Vec<FeatureMap>> {
    let last = layers.last().ok_or(Error::Empty("tMLP layer list"))?;
    check_features(features, reference)?;
    let kind = reference.kind();
    let mut per_node = Vec::with_capacity(reference.len());
    for v in 0..reference.len() {
        let p = reference.point(v);
        let mut z = logs_at(kind, p, features, v)?;
        for layer in layers {
            z = tangent_layer(kind, p, &z, layer)?;
        }
        per_node.push(z);
    }
    Ok(exp_outputs(kind, reference, per_node, last.c_out))
}
