use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom;
use crate::models::Model;

/// Minimum number of hull points examined.
pub const LEMMA_SAMPLES: usize = 10_000;

/// Outcome of projecting points of a convex hull back onto the curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub holds: bool,
    pub samples: usize,
    /// Start parameter and length of the shortest arc containing the points.
    pub arc_start: f64,
    pub arc_length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `i` in base `b`: the `i`-th Halton coordinate.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Barycentric weights spread evenly over the simplex: Halton coordinates
/// mapped through `-ln u` and normalised.
fn simplex_weights(index: u64, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|j| -radical_inverse(index, PRIMES[j]).ln()).collect();
    let total: f64 = e.iter().sum();
    e.iter().map(|v| v / total).collect()
}

/// Checks that every point of the convex hull of `points` (which lie on the
/// closed curve `model`, pairwise closer than `beta`) projects into the
/// shortest arc of the curve containing them. Hull points come from a
/// deterministic low-discrepancy sequence.
pub fn check_intermediate_lemma(model: &Model, points: &[Vec<f64>], beta: f64) -> Result<LemmaCheck> {
    if !model.is_closed_curve() {
        return Err(Error::InvalidInput("the arc check needs a closed curve model".into()));
    }
    if points.is_empty() {
        return Err(Error::Empty);
    }
    if points.len() > PRIMES.len() {
        return Err(Error::InvalidInput(format!("at most {} points are supported", PRIMES.len())));
    }
    let eta = model.constants()?.eta;
    match eta {
        Some(eta) if 3.0 * beta < eta => {}
        _ => return Err(Error::Precondition(format!("3 beta < eta fails at beta = {beta} (eta = {eta:?})"))),
    }
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            if geom::dist(p, q) >= beta {
                return Err(Error::Precondition(format!("points {p:?} and {q:?} are not closer than beta")));
            }
        }
    }
    let len = model.length();
    let mut params = Vec::with_capacity(points.len());
    for p in points {
        let proj = model.project(p)?;
        if proj.distance > 1e-9 * len.max(1.0) {
            return Err(Error::InvalidInput(format!("point {p:?} is not on the model")));
        }
        params.push(proj.param);
    }
    // The shortest arc containing the parameters is the complement of the largest gap.
    let mut sorted = params.clone();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let (mut start, mut gap) = (sorted[0], sorted[0] + len - sorted[k - 1]);
    for w in sorted.windows(2) {
        if w[1] - w[0] > gap {
            gap = w[1] - w[0];
            start = w[1];
        }
    }
    let arc_length = len - gap;
    // Footpoint parameters carry rounding from the projection.
    let tol = 1e-9 * len.max(1.0);
    let on_arc = |s: f64| (s - start).rem_euclid(len) <= arc_length + tol || (start - s).rem_euclid(len) <= tol;
    let samples = if points.len() == 1 { 1 } else { LEMMA_SAMPLES };
    for index in 1..=samples as u64 {
        let w = simplex_weights(index, points.len());
        let mut x = vec![0.0; points[0].len()];
        for (p, wi) in points.iter().zip(&w) {
            for (xj, pj) in x.iter_mut().zip(p) {
                *xj += wi * pj;
            }
        }
        let proj = model.project(&x)?;
        if !on_arc(proj.param) {
            return Ok(LemmaCheck { holds: false, samples, arc_start: start, arc_length, witness: Some(x) });
        }
    }
    Ok(LemmaCheck { holds: true, samples, arc_start: start, arc_length, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelSpace;

    fn circle() -> Model {
        Model::new(ModelSpace::circle(1.0)).unwrap()
    }

    #[test]
    fn halton_weights_lie_on_the_simplex() {
        for i in 1..200 {
            let w = simplex_weights(i, 3);
            assert!(w.iter().all(|&v| v >= 0.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn chord_projects_onto_short_arc() {
        let m = circle();
        let (a, b) = (0.1f64, 0.4f64);
        let pts = vec![vec![a.cos(), a.sin()], vec![b.cos(), b.sin()]];
        let r = check_intermediate_lemma(&m, &pts, 0.5).unwrap();
        assert!(r.holds);
        assert_eq!(r.samples, LEMMA_SAMPLES);
        assert!((r.arc_length - 0.3).abs() < 1e-9);
        // Independent check: a chord point at angle phi projects to angle phi.
        for i in 1..100 {
            let t = i as f64 / 100.0;
            let x = [(1.0 - t) * a.cos() + t * b.cos(), (1.0 - t) * a.sin() + t * b.sin()];
            let phi = x[1].atan2(x[0]);
            assert!(phi > a && phi < b);
        }
    }

    #[test]
    fn arc_across_the_seam() {
        let m = circle();
        let angles = [-0.1f64, 0.05, 0.15];
        let pts: Vec<Vec<f64>> = angles.iter().map(|t| vec![t.cos(), t.sin()]).collect();
        let r = check_intermediate_lemma(&m, &pts, 0.5).unwrap();
        assert!(r.holds);
        assert!((r.arc_length - 0.25).abs() < 1e-9);
    }

    #[test]
    fn single_point_is_trivial() {
        let r = check_intermediate_lemma(&circle(), &[vec![1.0, 0.0]], 0.3).unwrap();
        assert!(r.holds);
        assert_eq!(r.arc_length, 0.0);
    }

    #[test]
    fn preconditions() {
        let m = circle();
        assert!(matches!(check_intermediate_lemma(&m, &[vec![1.0, 0.0]], 0.7), Err(Error::Precondition(_))));
        let far = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        assert!(matches!(check_intermediate_lemma(&m, &far, 0.5), Err(Error::Precondition(_))));
        assert!(check_intermediate_lemma(&m, &[vec![0.5, 0.0]], 0.5).is_err());
    }
}
