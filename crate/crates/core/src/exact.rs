//! Exact rational arithmetic for geometric decisions: float-to-rational
//! conversion and linear feasibility `A x = b, x >= 0` by a Phase-I simplex.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Exact value of a finite binary float.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

pub fn rational_vec(xs: &[f64]) -> Vec<BigRational> {
    xs.iter().map(|&x| rational(x)).collect()
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Returns a nonnegative solution of `A x = b` when one exists.
///
/// Phase I of the simplex method with one artificial variable per row and
/// Bland's rule, so it terminates on degenerate problems. All arithmetic is
/// exact; the decision carries no tolerance.
pub fn feasible_point(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = a.len();
    let nvar = a.first().map_or(0, Vec::len);
    if m == 0 {
        return Some(vec![BigRational::zero(); nvar]);
    }
    // Tableau rows: [x (nvar) | artificial (m) | rhs].
    let width = nvar + m + 1;
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        debug_assert_eq!(ai.len(), nvar);
        let flip = bi.is_negative();
        let mut row = vec![BigRational::zero(); width];
        for (j, v) in ai.iter().enumerate() {
            row[j] = if flip { -v.clone() } else { v.clone() };
        }
        row[nvar + i] = int(1);
        row[width - 1] = if flip { -bi.clone() } else { bi.clone() };
        rows.push(row);
    }
    let mut basis: Vec<usize> = (nvar..nvar + m).collect();
    // Reduced costs of the Phase-I objective (sum of artificials); the last
    // entry holds the negated objective value so one update rule covers all.
    let mut cost = vec![BigRational::zero(); width];
    for row in &rows {
        for j in 0..nvar {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }
    loop {
        let Some(enter) = (0..nvar).find(|&j| cost[j].is_negative()) else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, row) in rows.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*r]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // Phase I is bounded below by zero, so an entering column always has
        // a positive entry.
        let (r, _) = leave.expect("phase-one objective is bounded");
        let pivot = rows[r][enter].clone();
        for v in rows[r].iter_mut() {
            *v /= &pivot;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v -= &f * p;
                    }
                }
            }
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for (v, p) in cost.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        basis[r] = enter;
    }
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![BigRational::zero(); nvar];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nvar {
            x[bv] = rows[i][width - 1].clone();
        }
    }
    Some(x)
}

pub fn is_feasible(a: &[Vec<BigRational>], b: &[BigRational]) -> bool {
    feasible_point(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: f64) -> BigRational {
        rational(v)
    }

    #[test]
    fn conversion_is_exact() {
        assert_eq!(rational(0.5) * int(2), int(1));
        // 0.1 is not representable, and the error survives exact arithmetic.
        assert_ne!(rational(0.1) * int(3), rational(0.3));
    }

    #[test]
    fn simple_systems() {
        // x + y = 1, x - y = 0 -> x = y = 1/2
        let a = vec![vec![r(1.0), r(1.0)], vec![r(1.0), r(-1.0)]];
        let x = feasible_point(&a, &[r(1.0), r(0.0)]).unwrap();
        assert_eq!(x, vec![r(0.5), r(0.5)]);
        // x + y = -1 has no nonnegative solution.
        assert!(!is_feasible(&[vec![r(1.0), r(1.0)]], &[r(-1.0)]));
        // Redundant rows.
        let a = vec![vec![r(1.0), r(2.0)], vec![r(2.0), r(4.0)]];
        assert!(is_feasible(&a, &[r(3.0), r(6.0)]));
        assert!(!is_feasible(&a, &[r(3.0), r(7.0)]));
    }
}
