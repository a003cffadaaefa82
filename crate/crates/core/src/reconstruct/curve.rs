use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom;
use crate::limits::Verdict;
use crate::models::{check_scale_conditions, Claim, Condition, ConditionReport, Model, PointCloud};
use crate::reconstruct::polyline::{first_self_intersection, Polyline};

/// Samples sorted along a closed model curve, one representative per
/// distinct footpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ordering {
    /// Sample index of each representative, in curve order.
    pub indices: Vec<usize>,
    /// Arc-length parameter of each representative's footpoint, strictly increasing.
    pub params: Vec<f64>,
    /// Distance of each representative to its footpoint.
    pub distances: Vec<f64>,
    /// Number of samples dropped because they share a footpoint with a representative.
    pub collapsed: usize,
}

/// Footpoints closer than this (relative to the curve length) count as one.
const SAME_FOOTPOINT: f64 = 1e-12;

/// Sorts samples by the arc parameter of their nearest model point. Samples
/// with the same footpoint collapse to the one nearest to it (lowest index
/// on ties).
pub fn order_by_projection(model: &Model, cloud: &PointCloud) -> Result<Ordering> {
    if !model.is_closed_curve() {
        return Err(Error::InvalidInput("ordering by projection needs a closed curve model".into()));
    }
    if cloud.is_empty() {
        return Err(Error::Empty);
    }
    let projections = cloud
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|x| model.project(x))
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..cloud.len()).collect();
    order.sort_by(|&a, &b| {
        projections[a]
            .param
            .total_cmp(&projections[b].param)
            .then(projections[a].distance.total_cmp(&projections[b].distance))
            .then(a.cmp(&b))
    });
    let tol = SAME_FOOTPOINT * model.length();
    let mut out = Ordering { indices: Vec::new(), params: Vec::new(), distances: Vec::new(), collapsed: 0 };
    for i in order {
        let p = &projections[i];
        let same_as_last = out.params.last().is_some_and(|&s| p.param - s <= tol);
        // The group wraps around when the first and last footpoints coincide.
        let same_as_first = out.params.first().is_some_and(|&s| s + model.length() - p.param <= tol);
        if same_as_last {
            let k = out.indices.len() - 1;
            if p.distance < out.distances[k] {
                out.indices[k] = i;
                out.distances[k] = p.distance;
            }
            out.collapsed += 1;
        } else if same_as_first {
            if p.distance < out.distances[0] || (p.distance == out.distances[0] && i < out.indices[0]) {
                out.indices[0] = i;
                out.distances[0] = p.distance;
            }
            out.collapsed += 1;
        } else {
            out.indices.push(i);
            out.params.push(p.param);
            out.distances.push(p.distance);
        }
    }
    Ok(out)
}

/// Outcome of the curve checks. Every field is computed from the curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveChecks {
    pub simple: bool,
    pub closed: bool,
    pub max_edge: f64,
    pub edges_under_beta: bool,
    pub in_shadow: bool,
    /// Upper bound on the Hausdorff distance between the curve and the model.
    pub hausdorff_to_model: f64,
    /// Discretization error included in `hausdorff_to_model`.
    pub hausdorff_slack: f64,
    /// `tau + zeta` plus the chord sag `beta^2 / (8 r)` for circles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hausdorff_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_crossing: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub beta: f64,
    pub tau: f64,
    pub zeta: f64,
    /// Covering radius of the footpoints along the model.
    pub footpoint_covering: f64,
    pub conditions: ConditionReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<Polyline>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<Ordering>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<CurveChecks>,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

/// Builds the closed polyline through one representative per footpoint, in
/// curve order, and checks it.
pub fn build_curve_k(model: &Model, cloud: &PointCloud, beta: f64, tau: f64, zeta: f64) -> Result<ReconstructionResult> {
    if !(zeta > 0.0) || !zeta.is_finite() {
        return Err(Error::InvalidInput(format!("density radius must be positive, got {zeta}")));
    }
    if cloud.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: cloud.dim() });
    }
    let mut conditions = check_scale_conditions(model, beta, tau, Some(zeta))?.for_claim(Claim::CurveReconstruction);
    let ordering = order_by_projection(model, cloud)?;
    let covering = model.covering_radius(&ordering.params);
    conditions.push(Condition {
        name: "footpoint-density".into(),
        statement: "footpoints are zeta-dense".into(),
        lhs: covering,
        rhs: zeta,
        holds: covering <= zeta,
        note: None,
    });
    let noise = ordering.distances.iter().copied().fold(0.0, f64::max);
    conditions.push(Condition {
        name: "noise-bound".into(),
        statement: "samples lie within tau of the model".into(),
        lhs: noise,
        rhs: tau,
        // Allows for rounding in the sampler's own arithmetic.
        holds: noise <= tau * (1.0 + 1e-9) + 1e-12,
        note: None,
    });
    let mut result = ReconstructionResult {
        beta,
        tau,
        zeta,
        footpoint_covering: covering,
        conditions,
        curve: None,
        ordering: None,
        checks: None,
        verdict: Verdict::OutOfRegime,
        reasons: Vec::new(),
    };
    if !result.conditions.all_hold() {
        result.reasons = result
            .conditions
            .failures()
            .map(|c| format!("{} fails: {} ({} vs {})", c.name, c.statement, c.lhs, c.rhs))
            .collect();
        return Ok(result);
    }
    if ordering.indices.len() < 3 {
        return Err(Error::InvalidInput("a closed curve needs at least three distinct footpoints".into()));
    }
    let points: Vec<Vec<f64>> = ordering.indices.iter().map(|&i| cloud.point(i).to_vec()).collect();
    let curve = Polyline::new(points, true)?;
    let checks = check_curve(model, &curve, &ordering, beta, tau, zeta);
    let mut reasons = Vec::new();
    if !checks.simple {
        reasons.push(format!("edges {:?} intersect", checks.first_crossing));
    }
    if !checks.closed {
        reasons.push("curve does not visit every representative exactly once".into());
    }
    if !checks.edges_under_beta {
        reasons.push(format!("longest edge {} is not below beta {beta}", checks.max_edge));
    }
    if !checks.in_shadow {
        reasons.push("an edge is not a Rips edge at scale beta".into());
    }
    if let Some(bound) = checks.hausdorff_bound {
        if checks.hausdorff_to_model > bound {
            reasons.push(format!("Hausdorff distance {} exceeds the bound {bound}", checks.hausdorff_to_model));
        }
    }
    result.verdict = if reasons.is_empty() { Verdict::Consistent } else { Verdict::Inconsistent };
    result.reasons = reasons;
    result.curve = Some(curve);
    result.ordering = Some(ordering);
    result.checks = Some(checks);
    Ok(result)
}

fn check_curve(model: &Model, curve: &Polyline, ordering: &Ordering, beta: f64, tau: f64, zeta: f64) -> CurveChecks {
    let first_crossing = first_self_intersection(curve);
    let mut seen = ordering.indices.clone();
    seen.sort_unstable();
    seen.dedup();
    let closed = curve.closed && curve.len() >= 3 && seen.len() == ordering.indices.len();
    let lengths = curve.edge_lengths();
    let max_edge = lengths.iter().copied().fold(0.0, f64::max);
    let edges_under_beta = lengths.iter().all(|&l| l < beta);
    // Each edge is the hull of a 1-simplex of the Rips complex at scale beta
    // exactly when its endpoints are closer than beta.
    let in_shadow = curve.edges().iter().all(|&(a, b)| geom::dist(&curve.points[a], &curve.points[b]) < beta);
    let h = zeta / 10.0;
    let model_points = model.discretize(h);
    let curve_points = curve.discretize(h);
    // Model side: exact distance to the polyline, off by at most h/2 along
    // the model. Curve side: distance to the model points bounds the distance
    // to the model from above, off by at most h/2 along the curve.
    let from_model = model_points.par_iter().map(|x| curve.distance_to(x)).reduce(|| 0.0, f64::max);
    let from_curve = curve_points
        .par_iter()
        .map(|x| model_points.iter().map(|y| geom::dist(x, y)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max);
    let slack = h / 2.0;
    let hausdorff_bound = match &model.spec().space {
        crate::models::ModelSpace::Circle { radius, .. } => Some(tau + zeta + beta * beta / (8.0 * radius)),
        _ => None,
    };
    CurveChecks {
        simple: first_crossing.is_none(),
        closed,
        max_edge,
        edges_under_beta,
        in_shadow,
        hausdorff_to_model: from_model.max(from_curve) + slack,
        hausdorff_slack: slack,
        hausdorff_bound,
        first_crossing,
    }
}
