use alloc::vec;
use alloc::vec::Vec;

use super::descriptor::{BlockKind, LayerSpec, ModelDescriptor};
use super::params::{diffusion_from, head_from, invariant_from, tmlp_from, ModelParams};
use crate::error::{Error, Result};
use crate::graph::{normalize_weights, FeatureGraph, FeatureMap};
use crate::layers::{
    channel_l_step, cross_entropy, diffuse_channels, head, head_backward, invariant_layer_warm,
    pool, tmlp_with_reference,
};

/// A graph made ready for the network: weights normalized and the input
/// channel replicated to the width of the first layer.
#[derive(Clone, Debug)]
pub struct PreparedGraph {
    graph: FeatureGraph,
    channels: Vec<FeatureMap>,
}

impl PreparedGraph {
    pub fn new(descriptor: &ModelDescriptor, graph: &FeatureGraph) -> Result<Self> {
        let kind = graph
            .kind()
            .ok_or(Error::Empty("graph without feature channels"))?;
        if kind != descriptor.manifold {
            return Err(Error::KindMismatch {
                expected: descriptor.manifold,
                found: kind,
            });
        }
        if graph.covariates.len() != descriptor.covariates {
            return Err(Error::ShapeMismatch {
                expected: descriptor.covariates,
                found: graph.covariates.len(),
            });
        }
        let c = descriptor.input_channels();
        let channels = match graph.channels().len() {
            1 => vec![graph.channel(0).clone(); c],
            k if k == c => graph.channels().to_vec(),
            k => {
                return Err(Error::ShapeMismatch {
                    expected: c,
                    found: k,
                })
            }
        };
        let graph = if descriptor.normalize_weights {
            normalize_weights(graph)
        } else {
            graph.clone()
        };
        Ok(Self { graph, channels })
    }

    pub fn graph(&self) -> &FeatureGraph {
        &self.graph
    }

    pub fn label(&self) -> Option<usize> {
        self.graph.label
    }
}

/// Intermediate values of one forward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    /// `states[i]` is the input of block layer `i`; the last entry feeds the invariant layer.
    pub states: Vec<Vec<FeatureMap>>,
    /// Fréchet means of the invariant layer, used to warm-start re-evaluations.
    pub means: Vec<Vec<f64>>,
    pub scalars: Vec<Vec<f64>>,
    pub pooled: Vec<f64>,
    pub log_probs: Vec<f64>,
}

fn apply_layer(
    d: &ModelDescriptor,
    values: &[f64],
    g: &FeatureGraph,
    i: usize,
    input: &[FeatureMap],
) -> Result<Vec<FeatureMap>> {
    match &d.layers[i] {
        LayerSpec::Diffusion { .. } => {
            let p = diffusion_from(d, values, i).expect("diffusion layer");
            diffuse_channels(g, input, &p)
        }
        LayerSpec::Tmlp { .. } => {
            let layers = tmlp_from(d, values, i).expect("tMLP layer");
            tmlp_with_reference(input, &input[d.reference_channel], &layers)
        }
    }
}

/// Recomputes only output channel `j` of layer `i`, when that is possible
/// (diffusion layers and single tMLP layers act channel-wise on the output).
fn apply_layer_channel(
    d: &ModelDescriptor,
    values: &[f64],
    g: &FeatureGraph,
    i: usize,
    input: &[FeatureMap],
    j: usize,
) -> Option<Result<FeatureMap>> {
    match &d.layers[i] {
        LayerSpec::Diffusion { .. } => {
            let p = diffusion_from(d, values, i)?;
            Some(channel_l_step(
                g,
                &input[j],
                p.times[j].max(0.0),
                p.thresholds[j].max(0.0),
                p.steps,
                j,
            ))
        }
        LayerSpec::Tmlp { widths } if widths.len() == 2 => {
            let mut layer = tmlp_from(d, values, i)?.pop()?;
            let c_in = layer.c_in;
            layer.omega = layer.omega[j * c_in..(j + 1) * c_in].to_vec();
            layer.xi = layer.xi[j * c_in..(j + 1) * c_in].to_vec();
            layer.c_out = 1;
            Some(
                tmlp_with_reference(
                    input,
                    &input[d.reference_channel],
                    core::slice::from_ref(&layer),
                )
                .map(|mut v| v.remove(0)),
            )
        }
        LayerSpec::Tmlp { .. } => None,
    }
}

fn run_tail(
    d: &ModelDescriptor,
    values: &[f64],
    g: &FeatureGraph,
    from: usize,
    mut state: Vec<FeatureMap>,
    warm: Option<&[Vec<f64>]>,
) -> Result<(
    Vec<Vec<FeatureMap>>,
    Vec<Vec<f64>>,
    Vec<Vec<f64>>,
    Vec<f64>,
    Vec<f64>,
)> {
    let mut states = Vec::new();
    for i in from..d.layers.len() {
        let next = apply_layer(d, values, g, i, &state)?;
        states.push(core::mem::replace(&mut state, next));
    }
    let (scalars, means) = invariant_layer_warm(&state, &invariant_from(d, values), warm)?;
    states.push(state);
    let pooled = pool(&scalars)?;
    let log_probs = head(&pooled, &g.covariates, &head_from(d, values))?;
    Ok((states, means, scalars, pooled, log_probs))
}

/// Full forward pass keeping every intermediate state.
pub fn forward_cached(params: &ModelParams, sample: &PreparedGraph) -> Result<ForwardCache> {
    let (states, means, scalars, pooled, log_probs) = run_tail(
        &params.descriptor,
        params.values(),
        &sample.graph,
        0,
        sample.channels.clone(),
        None,
    )?;
    Ok(ForwardCache {
        states,
        means,
        scalars,
        pooled,
        log_probs,
    })
}

/// Class log-probabilities of a graph.
pub fn forward(params: &ModelParams, graph: &FeatureGraph) -> Result<Vec<f64>> {
    let sample = PreparedGraph::new(&params.descriptor, graph)?;
    Ok(forward_cached(params, &sample)?.log_probs)
}

pub fn predict(params: &ModelParams, graph: &FeatureGraph) -> Result<usize> {
    Ok(argmax(&forward(params, graph)?))
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > values[best] { i } else { best })
}

fn sample_label(sample: &PreparedGraph) -> Result<usize> {
    sample
        .label()
        .ok_or(Error::InvalidParams("training sample has no label".into()))
}

/// Cross-entropy loss of a labeled graph.
pub fn sample_loss(params: &ModelParams, sample: &PreparedGraph) -> Result<f64> {
    loss_with_values(&params.descriptor, params.values(), sample)
}

pub(crate) fn loss_with_values(
    d: &ModelDescriptor,
    values: &[f64],
    sample: &PreparedGraph,
) -> Result<f64> {
    let label = sample_label(sample)?;
    let (.., log_probs) = run_tail(d, values, &sample.graph, 0, sample.channels.clone(), None)?;
    finite(cross_entropy(&log_probs, label)?)
}

fn finite(loss: f64) -> Result<f64> {
    if loss.is_finite() {
        Ok(loss)
    } else {
        Err(Error::NonFiniteLoss)
    }
}

/// Central differences `(L(θ + h e_i) − L(θ − h e_i)) / 2h` for every coordinate.
pub fn fd_gradient<F>(mut loss: F, theta: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidParams(
            "finite-difference step must be positive".into(),
        ));
    }
    let mut probe = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        probe[i] = theta[i] + h;
        let up = finite(loss(&probe)?)?;
        probe[i] = theta[i] - h;
        let down = finite(loss(&probe)?)?;
        probe[i] = theta[i];
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

/// Richardson check of second-order accuracy for coordinate `i`: the
/// central-difference errors at steps `h` and `h/2`, measured against the
/// extrapolation `(4 g(h/4) − g(h/2)) / 3`, should have ratio ≈ 4. Returns
/// `(ratio, error at h)`.
pub fn richardson_ratio<F>(mut loss: F, theta: &[f64], i: usize, h: f64) -> Result<(f64, f64)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut probe = theta.to_vec();
    let mut central = |h: f64| -> Result<f64> {
        probe[i] = theta[i] + h;
        let up = finite(loss(&probe)?)?;
        probe[i] = theta[i] - h;
        let down = finite(loss(&probe)?)?;
        probe[i] = theta[i];
        Ok((up - down) / (2.0 * h))
    };
    let (g1, g2, g4) = (central(h)?, central(h / 2.0)?, central(h / 4.0)?);
    let reference = (4.0 * g4 - g2) / 3.0;
    Ok((
        (g1 - reference).abs() / (g2 - reference).abs(),
        (g1 - reference).abs(),
    ))
}

/// Gradient of the sample loss by central differences of the full network.
pub fn full_fd_gradient(params: &ModelParams, sample: &PreparedGraph, h: f64) -> Result<Vec<f64>> {
    let d = &params.descriptor;
    fd_gradient(|v| loss_with_values(d, v, sample), params.values(), h)
}

/// Loss and gradient of one labeled graph. Head parameters get their exact
/// gradient; every other parameter is differenced centrally with step `h`,
/// re-running the network only from the layer the parameter belongs to.
pub fn sample_gradient(
    params: &ModelParams,
    sample: &PreparedGraph,
    h: f64,
) -> Result<(f64, Vec<f64>)> {
    if !(h > 0.0) {
        return Err(Error::InvalidParams(
            "finite-difference step must be positive".into(),
        ));
    }
    let d = &params.descriptor;
    let label = sample_label(sample)?;
    let cache = forward_cached(params, sample)?;
    let g = &sample.graph;
    let head_params = params.head();
    let hg = head_backward(&cache.pooled, &g.covariates, &head_params, label)?;
    let loss = finite(hg.loss)?;

    let mut grad = vec![0.0; params.len()];
    let mut values = params.flatten();
    let head_stage = d.head_stage();
    let inv_stage = d.invariant_stage();
    for block in d.blocks() {
        if block.stage == head_stage {
            let src = match block.name.as_str() {
                "head.w1" => &hg.w1,
                "head.b1" => &hg.b1,
                "head.w2" => &hg.w2,
                _ => &hg.b2,
            };
            grad[block.range].copy_from_slice(src);
            continue;
        }
        for k in block.range.clone() {
            let offset = k - block.range.start;
            let channel = match block.kind {
                BlockKind::DiffusionTime | BlockKind::DiffusionThreshold => Some(offset),
                BlockKind::TmlpOmega | BlockKind::TmlpXi => {
                    let c_in = match &d.layers[block.stage] {
                        LayerSpec::Tmlp { widths } => widths[0],
                        LayerSpec::Diffusion { .. } => 1,
                    };
                    Some(offset / c_in)
                }
                _ => None,
            };
            let theta = values[k];
            let eval = |x: f64, values: &mut Vec<f64>| -> Result<f64> {
                values[k] = x;
                let out = probe_loss(
                    d,
                    values,
                    sample,
                    &cache,
                    block.stage,
                    channel,
                    inv_stage,
                    label,
                );
                values[k] = theta;
                out
            };
            let up = eval(theta + h, &mut values)?;
            let down = eval(theta - h, &mut values)?;
            grad[k] = (up - down) / (2.0 * h);
        }
    }
    Ok((loss, grad))
}

#[allow(clippy::too_many_arguments)]
fn probe_loss(
    d: &ModelDescriptor,
    values: &[f64],
    sample: &PreparedGraph,
    cache: &ForwardCache,
    stage: usize,
    channel: Option<usize>,
    inv_stage: usize,
    label: usize,
) -> Result<f64> {
    let g = &sample.graph;
    let log_probs = if stage == inv_stage {
        let (scalars, _) = invariant_layer_warm(
            &cache.states[inv_stage],
            &invariant_from(d, values),
            Some(&cache.means),
        )?;
        head(&pool(&scalars)?, &g.covariates, &head_from(d, values))?
    } else {
        let input = &cache.states[stage];
        let partial = channel
            .and_then(|j| apply_layer_channel(d, values, g, stage, input, j).map(|r| (j, r)));
        let output = match partial {
            Some((j, updated)) => {
                let mut out = cache.states[stage + 1].clone();
                out[j] = updated?;
                out
            }
            None => apply_layer(d, values, g, stage, input)?,
        };
        run_tail(d, values, g, stage + 1, output, Some(&cache.means))?.4
    };
    finite(cross_entropy(&log_probs, label)?)
}
