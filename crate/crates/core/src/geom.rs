//! Small dense-vector helpers shared by the geometric modules.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add_scaled(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * y).collect()
}

/// `(1 - t) a + t b`
#[inline]
pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

/// Orthonormal basis of the orthogonal complement of the unit vector `t`.
pub fn normal_basis(t: &[f64]) -> Vec<Vec<f64>> {
    let dim = t.len();
    let mut basis: Vec<Vec<f64>> = vec![t.to_vec()];
    for axis in 0..dim {
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        for b in &basis {
            let c = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            basis.push(v.iter().map(|x| x / n).collect());
        }
        if basis.len() == dim {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Squared distance from `p` to the segment `[a, b]`, with the clamped parameter.
pub fn point_segment(p: &[f64], a: &[f64], b: &[f64]) -> (f64, f64) {
    let ab = sub(b, a);
    let len2 = dot(&ab, &ab);
    let t = if len2 == 0.0 {
        0.0
    } else {
        (dot(&sub(p, a), &ab) / len2).clamp(0.0, 1.0)
    };
    let q = add_scaled(a, &ab, t);
    let d = dist(p, &q);
    (d * d, t)
}

/// Euclidean distance between two segments, by sampling-free minimisation
/// over the four endpoint projections and the interior critical point.
pub fn segment_segment_dist(a0: &[f64], a1: &[f64], b0: &[f64], b1: &[f64]) -> f64 {
    let u = sub(a1, a0);
    let v = sub(b1, b0);
    let w = sub(a0, b0);
    let a = dot(&u, &u);
    let b = dot(&u, &v);
    let c = dot(&v, &v);
    let d = dot(&u, &w);
    let e = dot(&v, &w);
    let denom = a * c - b * b;
    let mut best = f64::INFINITY;
    if denom > 1e-14 * a * c {
        let s = (b * e - c * d) / denom;
        let t = (a * e - b * d) / denom;
        if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
            let p = add_scaled(a0, &u, s);
            let q = add_scaled(b0, &v, t);
            best = dist(&p, &q);
        }
    }
    for (p, s0, s1) in [(a0, b0, b1), (a1, b0, b1), (b0, a0, a1), (b1, a0, a1)] {
        best = best.min(point_segment(p, s0, s1).0.sqrt());
    }
    best
}
