//! Continuous-time diffusion approximated by explicit steps, stationary
//! configurations, and containment/contraction diagnostics.

mod stable;

pub use stable::{make_tetrahedron, make_wfm_stable_graph};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{self, FeatureGraph, FeatureMap};
use crate::layers::{l_step_map, step_map};
use crate::ManifoldPoint;
#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;

/// Slack allowed when testing whether a point lies in a closed ball.
pub const CONTAINMENT_TOL: f64 = 1e-8;

/// Snapshots of one channel along an integration.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<FeatureMap>,
    pub dt: f64,
    pub graph_id: Option<alloc::string::String>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &FeatureMap {
        self.snapshots
            .last()
            .expect("trajectory holds the initial snapshot")
    }
}

/// Stepwise integrator of `∂f/∂t = -Δf` with explicit steps of size `dt`; the
/// last step is shortened so that the final time is exactly `t_end`.
pub struct Flow<'a> {
    graph: &'a FeatureGraph,
    state: FeatureMap,
    time: f64,
    dt: f64,
    t_end: f64,
}

impl<'a> Flow<'a> {
    pub fn new(g: &'a FeatureGraph, channel: usize, t_end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(Error::InvalidParams(alloc::format!(
                "need dt > 0 and finite T >= 0, got dt={dt}, T={t_end}"
            )));
        }
        if channel >= g.channels().len() {
            return Err(Error::ShapeMismatch {
                expected: channel + 1,
                found: g.channels().len(),
            });
        }
        Ok(Self {
            graph: g,
            state: g.channel(channel).clone(),
            time: 0.0,
            dt,
            t_end,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn state(&self) -> &FeatureMap {
        &self.state
    }

    pub fn is_finished(&self) -> bool {
        self.t_end - self.time <= 1e-12 * self.dt.max(1.0)
    }

    /// Advances one step; `None` once `t_end` is reached.
    pub fn advance(&mut self) -> Option<Result<f64>> {
        if self.is_finished() {
            return None;
        }
        let h = self.dt.min(self.t_end - self.time);
        match step_map(self.graph, &self.state, h, 0.0) {
            Ok(next) => {
                self.state = next;
                // land exactly on t_end rather than accumulating rounding
                let steps = ((self.time + h) / self.dt).round();
                self.time = if (self.t_end - (self.time + h)).abs() <= 1e-12 * self.dt.max(1.0) {
                    self.t_end
                } else {
                    steps * self.dt
                };
                Some(Ok(self.time))
            }
            Err(Error::EdgeCutLocus { from, to, .. }) => Some(Err(Error::FlowCutLocus {
                from,
                to,
                time: self.time,
            })),
            Err(e) => Some(Err(e)),
        }
    }

    pub fn into_state(self) -> FeatureMap {
        self.state
    }
}

/// Integrates channel `channel` up to time `t_end`, keeping every snapshot.
pub fn integrate(g: &FeatureGraph, channel: usize, t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_every(g, channel, t_end, dt, 1)
}

/// Like [`integrate`] but keeps only every `record_every`-th snapshot (the
/// initial and final states are always kept).
pub fn integrate_every(
    g: &FeatureGraph,
    channel: usize,
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory> {
    let every = record_every.max(1);
    let mut flow = Flow::new(g, channel, t_end, dt)?;
    let mut traj = Trajectory {
        times: alloc::vec![0.0],
        snapshots: alloc::vec![flow.state().clone()],
        dt,
        graph_id: None,
    };
    let mut k = 0usize;
    while let Some(step) = flow.advance() {
        let t = step?;
        k += 1;
        if k % every == 0 || flow.is_finished() {
            traj.times.push(t);
            traj.snapshots.push(flow.state().clone());
        }
    }
    Ok(traj)
}

/// `max_v ‖Δf(v)‖ < tol`; a Laplacian that cannot be evaluated counts as not stationary.
pub fn is_stationary(g: &FeatureGraph, channel: usize, tol: f64) -> bool {
    match graph::laplacian(g, channel) {
        Ok(lap) => lap.max_norm(g.channel(channel)) < tol,
        Err(_) => false,
    }
}

/// Outcome of [`check_containment`] for one time in the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ContainmentSample {
    pub t: f64,
    /// Largest distance of an output feature from the ball centre; `None` if a step failed.
    pub max_distance: Option<f64>,
    pub contained: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContainmentReport {
    pub center: ManifoldPoint,
    pub radius: f64,
    pub samples: Vec<ContainmentSample>,
    /// Largest grid time such that it and every smaller grid time stayed contained.
    pub max_contained_t: Option<f64>,
}

/// Runs the `steps`-step map for every `t` in `t_grid` and checks that every
/// output feature stays in the enclosing ball of the input.
pub fn check_containment(
    g: &FeatureGraph,
    channel: usize,
    t_grid: &[f64],
    steps: usize,
) -> Result<ContainmentReport> {
    let (center, radius) = graph::bounding_ball_estimate(g, channel)?;
    let kind = center.kind();
    let mut grid = t_grid.to_vec();
    grid.sort_by(|a, b| a.total_cmp(b));
    let mut samples = Vec::with_capacity(grid.len());
    let mut max_contained_t = None;
    let mut prefix = true;
    for t in grid {
        let max_distance = l_step_map(g, g.channel(channel), t, 0.0, steps.max(1))
            .ok()
            .map(|out| {
                out.points()
                    .map(|p| kind.dist(center.coords(), p))
                    .fold(0.0, f64::max)
            });
        let contained = max_distance.is_some_and(|d| d <= radius + CONTAINMENT_TOL);
        if contained && prefix {
            max_contained_t = Some(t);
        }
        prefix &= contained;
        samples.push(ContainmentSample {
            t,
            max_distance,
            contained,
        });
    }
    Ok(ContainmentReport {
        center,
        radius,
        samples,
        max_contained_t,
    })
}

/// Graph diameter before and after the `steps`-step map with time `t`.
pub fn check_contraction(
    g: &FeatureGraph,
    channel: usize,
    t: f64,
    steps: usize,
) -> Result<(f64, f64)> {
    let before = graph::graph_diameter(g, channel);
    let out = l_step_map(g, g.channel(channel), t, 0.0, steps.max(1))?;
    Ok((before, graph::map_diameter(&out)))
}
