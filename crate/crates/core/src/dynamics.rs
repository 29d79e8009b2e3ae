//! Bearing-only formation control.
//!
//! Agent `i` moves according to
//! `ṗ_i = -Σ_{j∈N_i} P_{g*_ij} (p_i - p_j)`, which stacks into the linear
//! flow `ṗ = -L_B p` with `L_B` built from the desired bearings `g*`. The
//! flow is integrated with classical fixed-step RK4.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::analysis::{spectrum_classification, SpectrumClass, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::{unit_projection, Configuration, DirectedFormation, SEP_MIN};
use crate::graph::DirectedGraph;
use crate::linalg;
use crate::operators::{laplacian_from_bearings, validate_bearings};

/// Desired bearings `g*`, one unit vector per edge of `graph`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    graph: DirectedGraph,
    dim: usize,
    bearings: Vec<DVector<f64>>,
}

impl TargetSpec {
    pub fn from_bearings(
        graph: DirectedGraph,
        dim: usize,
        bearings: Vec<DVector<f64>>,
    ) -> Result<Self> {
        validate_bearings(&graph, dim, &bearings)?;
        Ok(TargetSpec {
            graph,
            dim,
            bearings,
        })
    }

    /// Freezes the bearings of a target formation.
    pub fn from_formation(target: &DirectedFormation) -> Self {
        TargetSpec {
            graph: target.graph().clone(),
            dim: target.dim(),
            bearings: target.bearings(),
        }
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bearings(&self) -> &[DVector<f64>] {
        &self.bearings
    }

    /// `L_B(g*)`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        laplacian_from_bearings(&self.graph, self.dim, &self.bearings)
            .expect("bearings validated on construction")
    }

    fn check(&self, p: &Configuration) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        if p.len() != self.graph.vertex_count() {
            return Err(Error::VertexCountMismatch {
                vertices: self.graph.vertex_count(),
                points: p.len(),
            });
        }
        Ok(())
    }
}

/// Velocity of agent `i` under the local control law. Leaders (no
/// out-going edges) stay put.
pub fn agent_velocity(i: usize, p: &Configuration, target: &TargetSpec) -> DVector<f64> {
    let mut v = DVector::zeros(target.dim);
    for k in target.graph.out_edge_ids(i) {
        let j = target.graph.edges()[k].target;
        v -= unit_projection(&target.bearings[k]) * (p.point(i) - p.point(j));
    }
    v
}

/// All agent velocities stacked in vertex order.
pub fn stacked_velocity(p: &Configuration, target: &TargetSpec) -> DVector<f64> {
    let d = target.dim;
    let mut out = DVector::zeros(d * p.len());
    for i in 0..p.len() {
        out.rows_mut(i * d, d)
            .copy_from(&agent_velocity(i, p, target));
    }
    out
}

/// `Σ_k |P_{g*_k} g_k(p)|`: zero exactly when every current bearing is
/// parallel to its desired bearing.
pub fn bearing_error(p: &Configuration, target: &TargetSpec) -> Result<f64> {
    target.check(p)?;
    let mut total = 0.0;
    for (k, (e, g_star)) in target
        .graph
        .edges()
        .iter()
        .zip(&target.bearings)
        .enumerate()
    {
        let ev = p.point(e.target) - p.point(e.source);
        let distance = ev.norm();
        if distance <= SEP_MIN {
            return Err(Error::CoincidentPoints {
                edge: Some(k),
                distance,
            });
        }
        total += (unit_projection(g_star) * (ev / distance)).norm();
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    Diverged,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Converged => "converged",
            Verdict::Diverged => "diverged",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Integration and verdict parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Record every `stride`-th step (reduced to a divisor of the step
    /// count so samples stay uniformly spaced).
    pub stride: usize,
    /// Bearing error at or below which the formation counts as converged.
    pub convergence_tol: f64,
    /// Largest `|Δp| / Δt` between the last two samples, relative to
    /// `max(1, |p|)`, for a converged verdict.
    pub stationary_tol: f64,
    /// `|p(t)| / |p(0)|` above which the run counts as diverged.
    pub divergence_ratio: f64,
    /// Integration stops once any coordinate exceeds this magnitude.
    pub overflow: f64,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            dt: 0.01,
            t_end: 50.0,
            stride: 10,
            convergence_tol: 1e-6,
            stationary_tol: 1e-5,
            divergence_ratio: 1e6,
            overflow: 1e12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationTrace {
    pub dim: usize,
    pub times: Vec<f64>,
    /// Stacked configurations, one per sample.
    pub states: Vec<DVector<f64>>,
    pub bearing_errors: Vec<f64>,
    pub verdict: Verdict,
    /// Set when integration stopped early on a coordinate above
    /// [`SimulationOptions::overflow`].
    pub overflowed: bool,
    /// Spectrum location of `L_B(g*)`.
    pub spectral: SpectrumClass,
}

impl SimulationTrace {
    pub fn final_state(&self) -> &DVector<f64> {
        self.states
            .last()
            .expect("traces hold at least two samples")
    }

    pub fn final_bearing_error(&self) -> f64 {
        *self
            .bearing_errors
            .last()
            .expect("traces hold at least two samples")
    }

    /// Distance of each sample from the equilibrium set `Null(L_B(g*))`.
    pub fn equilibrium_distances(&self, target: &TargetSpec, tol_rel: f64) -> Result<Vec<f64>> {
        let null = linalg::null_space_basis(&target.laplacian(), tol_rel)?;
        Ok(self
            .states
            .iter()
            .map(|p| (p - &null * (null.transpose() * p)).norm())
            .collect())
    }

    /// Least-squares slope of `ln(distance to equilibrium)` over the samples
    /// with `t >= from_time`: the growth rate of the dominant unstable mode
    /// (negative when the flow settles).
    pub fn growth_rate(&self, target: &TargetSpec, from_time: f64) -> Result<f64> {
        let dist = self.equilibrium_distances(target, linalg::RANK_TOL)?;
        let points: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(dist)
            .filter(|(t, r)| **t >= from_time && *r > 0.0)
            .map(|(t, r)| (*t, r.ln()))
            .collect();
        if points.len() < 2 {
            return Err(Error::ShapeMismatch(
                "too few samples to fit a growth rate".into(),
            ));
        }
        let n = points.len() as f64;
        let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
        let cov: f64 = points
            .iter()
            .map(|(t, y)| (t - mean_t) * (y - mean_y))
            .sum();
        let var: f64 = points.iter().map(|(t, _)| (t - mean_t).powi(2)).sum();
        Ok(cov / var)
    }
}

/// Classifies a (possibly partial) trace.
///
/// Diverged when the state norm grew by more than the divergence ratio at
/// any sample; converged when the last bearing error is within tolerance
/// and the state has stopped moving; inconclusive otherwise.
pub fn detect_verdict(
    times: &[f64],
    states: &[DVector<f64>],
    bearing_errors: &[f64],
    opts: &SimulationOptions,
) -> Verdict {
    if states.len() < 2 || times.len() != states.len() {
        return Verdict::Inconclusive;
    }
    let initial = states[0].norm().max(f64::MIN_POSITIVE);
    if states
        .iter()
        .any(|p| p.norm() / initial > opts.divergence_ratio || p.amax() > opts.overflow)
    {
        return Verdict::Diverged;
    }
    let k = states.len() - 1;
    let speed = (&states[k] - &states[k - 1]).norm() / (times[k] - times[k - 1]);
    let stationary = speed <= opts.stationary_tol * states[k].norm().max(1.0);
    match bearing_errors.last() {
        Some(&e) if e <= opts.convergence_tol && stationary => Verdict::Converged,
        _ => Verdict::Inconclusive,
    }
}

/// Integrates `ṗ = -L_B(g*) p` from `p0` with RK4 and records a trace.
pub fn simulate(
    target: &TargetSpec,
    p0: &Configuration,
    opts: &SimulationOptions,
) -> Result<SimulationTrace> {
    let SimulationOptions { dt, t_end, .. } = *opts;
    if !(dt.is_finite() && t_end.is_finite() && dt > 0.0 && t_end >= dt) {
        return Err(Error::StepSizeInvalid { dt, t_end });
    }
    target.check(p0)?;
    let d = target.dim;
    let l = target.laplacian();
    let steps = (t_end / dt).round() as usize;
    let stride = (1..=opts.stride.max(1))
        .rev()
        .find(|s| steps.is_multiple_of(*s))
        .unwrap_or(1);

    let mut p = p0.stacked().clone();
    let mut times = vec![0.0];
    let mut states = vec![p.clone()];
    let mut bearing_errors = vec![bearing_error(p0, target)?];
    let mut overflowed = false;

    for step in 1..=steps {
        let k1 = -(&l * &p);
        debug_assert!({
            let agent =
                stacked_velocity(&Configuration::from_stacked(d, p.clone()).unwrap(), target);
            (&agent - &k1).amax() <= 1e-12 * p.amax().max(1.0)
        });
        let k2 = -(&l * (&p + &k1 * (dt / 2.0)));
        let k3 = -(&l * (&p + &k2 * (dt / 2.0)));
        let k4 = -(&l * (&p + &k3 * dt));
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);

        overflowed = !p.iter().all(|x| x.is_finite() && x.abs() <= opts.overflow);
        if step % stride == 0 || overflowed {
            let t = step as f64 * dt;
            times.push(t);
            if overflowed {
                bearing_errors.push(f64::INFINITY);
            } else {
                let config = Configuration::from_stacked(d, p.clone())?;
                bearing_errors.push(bearing_error(&config, target)?);
            }
            states.push(p.clone());
        }
        if overflowed {
            break;
        }
    }

    let verdict = if overflowed {
        Verdict::Diverged
    } else {
        detect_verdict(&times, &states, &bearing_errors, opts)
    };
    let tol = Tolerances::default();
    let spectrum = linalg::eigenvalues_capped(&l, tol.eigen_cap)?;
    let null_dim = l.ncols() - linalg::numerical_rank(&l, tol.rank_rel)?;
    Ok(SimulationTrace {
        dim: d,
        times,
        states,
        bearing_errors,
        verdict,
        overflowed,
        spectral: spectrum_classification(&spectrum, null_dim, &tol),
    })
}
