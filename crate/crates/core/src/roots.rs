//! Polynomial roots by simultaneous Aberth–Ehrlich iteration, with root
//! clustering for multiplicities.

use std::f64::consts::PI;

use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

pub const MAX_ITERATIONS: usize = 500;
/// Low-order coefficients at or below this fraction of the largest one are exact zeros.
pub const ZERO_COEFF_TOL: f64 = 1e-14;
/// Roots closer than `CLUSTER_TOL · max(1, |z|)` belong to one cluster.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Horner evaluation, coefficients lowest degree first.
pub fn eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

pub fn derivative(coeffs: &[C64]) -> Vec<C64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// Value and derivative in one Horner pass.
fn eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `Σ |c_k| |z|^k`, the rounding scale of a Horner evaluation.
fn abs_eval(coeffs: &[C64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// All roots of the polynomial with multiplicity, in no particular order.
///
/// Trailing (highest-degree) zero coefficients are ignored; low-order
/// coefficients that vanish to within [`ZERO_COEFF_TOL`] become exact zero roots.
pub fn aberth_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let Some(top) = coeffs.iter().rposition(|c| *c != ZERO) else {
        return Err(Error::InvalidArgument(
            "zero polynomial has no isolated roots".into(),
        ));
    };
    let coeffs = &coeffs[..=top];
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let zeros = coeffs
        .iter()
        .take_while(|c| c.norm() <= ZERO_COEFF_TOL * max)
        .count();
    let lead = coeffs[top];
    let reduced: Vec<C64> = coeffs[zeros..].iter().map(|c| c / lead).collect();
    let mut roots = vec![ZERO; zeros];
    roots.extend(aberth_nonzero(&reduced)?);
    Ok(roots)
}

fn aberth_nonzero(monic: &[C64]) -> Result<Vec<C64>> {
    let n = monic.len() - 1;
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![-monic[0]]),
        _ => {}
    }
    let radius = monic[0].norm().powf(1.0 / n as f64);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = eval_with_derivative(monic, z[k]);
            let bound = 4.0 * n as f64 * f64::EPSILON * abs_eval(monic, z[k].norm());
            if p.norm() <= bound {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let w = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if !w.is_finite() {
                // z[k] collided with another iterate; nudge it off
                let nudge = f64::EPSILON.sqrt() * z[k].norm().max(1.0);
                z[k] += C64::from_polar(nudge, 1.0 + k as f64);
                continue;
            }
            z[k] -= w;
            if w.norm() <= f64::EPSILON * z[k].norm() {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    Err(Error::RootFindingDiverged {
        iterations: MAX_ITERATIONS,
    })
}

/// A group of numerically coincident roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RootCluster {
    pub center: C64,
    pub multiplicity: usize,
}

/// Groups roots whose distance is below `CLUSTER_TOL · max(1, |z|)`
/// (transitively) and returns centroids with counts.
pub fn cluster_roots(roots: &[C64]) -> Vec<RootCluster> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= CLUSTER_TOL * scale {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut clusters: Vec<(usize, C64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match clusters.iter_mut().find(|c| c.0 == r) {
            Some(c) => {
                c.1 += roots[i];
                c.2 += 1;
            }
            None => clusters.push((r, roots[i], 1)),
        }
    }
    clusters
        .into_iter()
        .map(|(_, sum, m)| RootCluster {
            center: sum / m as f64,
            multiplicity: m,
        })
        .collect()
}

/// Refines a root of multiplicity `m` by Newton's method on `p^{(m−1)}`,
/// for which it is a simple root.
pub fn polish(coeffs: &[C64], start: C64, multiplicity: usize) -> C64 {
    let mut q = coeffs.to_vec();
    for _ in 1..multiplicity {
        q = derivative(&q);
    }
    let mut z = start;
    let limit = CLUSTER_TOL * start.norm().max(1.0);
    for _ in 0..50 {
        let (p, dp) = eval_with_derivative(&q, z);
        if dp == ZERO {
            break;
        }
        let step = p / dp;
        if !step.is_finite() {
            break;
        }
        let next = z - step;
        if (next - start).norm() > limit {
            break;
        }
        z = next;
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn from_roots(roots: &[C64]) -> Vec<C64> {
        let mut p = vec![c(1.0, 0.0)];
        for r in roots {
            let mut next = vec![ZERO; p.len() + 1];
            for (k, &a) in p.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            p = next;
        }
        p
    }

    fn matched_error(found: &[C64], expected: &[C64]) -> f64 {
        let mut left = found.to_vec();
        let mut worst = 0.0f64;
        for e in expected {
            let (i, d) = left
                .iter()
                .enumerate()
                .map(|(i, z)| (i, (z - e).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            worst = worst.max(d);
            left.remove(i);
        }
        worst
    }

    #[test]
    fn quadratic_roots() {
        let roots = aberth_roots(&[c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matched_error(&roots, &[c(1.0, 0.0), c(2.0, 0.0)]) < 1e-14);
    }

    #[test]
    fn zero_roots_are_exact() {
        let p = [ZERO, ZERO, c(0.5, 0.0), c(1.0, 0.0)];
        let roots = aberth_roots(&p).unwrap();
        assert_eq!(roots.iter().filter(|z| **z == ZERO).count(), 2);
        assert!(matched_error(&roots, &[ZERO, ZERO, c(-0.5, 0.0)]) < 1e-15);
    }

    #[test]
    fn double_root_clusters_and_polishes() {
        let p = from_roots(&[c(-0.5, 0.0), c(-0.5, 0.0), c(0.2, 0.3)]);
        let roots = aberth_roots(&p).unwrap();
        let clusters = cluster_roots(&roots);
        assert_eq!(clusters.len(), 2);
        let double = clusters.iter().find(|c| c.multiplicity == 2).unwrap();
        assert!((double.center - c(-0.5, 0.0)).norm() < 1e-7);
        let polished = polish(&p, double.center, 2);
        assert!((polished - c(-0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn polish_triple_root() {
        let r = c(0.3, -0.1);
        let p = from_roots(&[r, r, r, c(0.9, 0.0)]);
        let start = r + c(2e-7, -1e-7);
        assert!((polish(&p, start, 3) - r).norm() < 1e-13);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(aberth_roots(&[ZERO, ZERO]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_random_simple_roots(
            parts in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..9)
        ) {
            let expected: Vec<C64> = parts.iter().map(|&(re, im)| c(re, im)).collect();
            let min_gap = expected
                .iter()
                .enumerate()
                .flat_map(|(i, a)| expected[i + 1..].iter().map(move |b| (a - b).norm()))
                .fold(f64::INFINITY, f64::min);
            prop_assume!(min_gap > 1e-2);
            let roots = aberth_roots(&from_roots(&expected)).unwrap();
            prop_assert_eq!(roots.len(), expected.len());
            prop_assert!(matched_error(&roots, &expected) < 1e-9);
        }
    }
}
