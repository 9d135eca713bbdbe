//! Resonances as roots of the transfer polynomial, their multiplicities, and
//! Jordan chains of generalized resonant states.

use std::f64::consts::PI;

use crate::coins::CoinSequence;
use crate::linalg::{self, CMatrix, CVector, SortedSvd};
use crate::roots::{aberth_roots, cluster_roots, polish};
use crate::states::{Chirality, WaveState};
use crate::transfer::{transfer_polynomial, transfer_product};
use crate::walk::{build_k, KMatrix};
use crate::{Error, Result, C64, I};

/// Roots `μ` at or below this modulus are the trivial zero root.
pub const ZERO_ROOT_TOL: f64 = 1e-13;
/// Agreement required between polynomial roots and dense eigenvalues of `K`.
pub const DENSE_CHECK_TOL: f64 = 1e-8;
pub const CHAIN_TOL: f64 = 1e-8;
/// Number of trapezoid nodes for the winding integral.
pub const WINDING_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    /// `Re ξ ∈ [−π, π)`, `Im ξ < 0`.
    pub xi: C64,
    /// `e^{−iξ}`, a nonzero eigenvalue of `K`.
    pub lambda: C64,
    /// `λ²`, a root of the transfer polynomial.
    pub mu: C64,
    pub alg_multiplicity: usize,
}

impl Resonance {
    /// The resonance with `e^{−2iξ} = μ` and `Re ξ` in `[−π, 0)` (`partner = false`)
    /// or in `[0, π)` (`partner = true`).
    pub fn from_mu(mu: C64, alg_multiplicity: usize, partner: bool) -> Resonance {
        let mut xi = I * mu.ln() / 2.0;
        if xi.re >= 0.0 {
            xi.re -= PI;
        }
        if partner {
            xi.re += PI;
        }
        Resonance {
            xi,
            lambda: (-I * xi).exp(),
            mu,
            alg_multiplicity,
        }
    }
}

/// All resonances, each listed once with its algebraic multiplicity, sorted by
/// `Re ξ` then `Im ξ`.
pub fn find_resonances(cs: &CoinSequence) -> Result<Vec<Resonance>> {
    let p = transfer_polynomial(cs)?;
    let roots = aberth_roots(&p.coeffs)?;
    let mut out = Vec::new();
    for cluster in cluster_roots(&roots) {
        if cluster.center.norm() <= ZERO_ROOT_TOL {
            continue;
        }
        let mu = polish(&p.coeffs, cluster.center, cluster.multiplicity);
        if mu.norm() >= 1.0 {
            return Err(Error::InvariantViolation(format!(
                "transfer polynomial root {mu} lies outside the unit disk"
            )));
        }
        out.push(Resonance::from_mu(mu, cluster.multiplicity, false));
        out.push(Resonance::from_mu(mu, cluster.multiplicity, true));
    }
    sort_resonances(&mut out);
    if cs.n0() >= 1 && !out.is_empty() {
        let k = build_k(cs)?;
        let deviation = dense_deviation(&k, &out);
        if !(deviation <= DENSE_CHECK_TOL) {
            return Err(Error::InvariantViolation(format!(
                "resonances disagree with eigenvalues of K by {deviation:.3e}"
            )));
        }
    }
    Ok(out)
}

pub fn sort_resonances(res: &mut [Resonance]) {
    res.sort_by(|a, b| {
        a.xi.re
            .total_cmp(&b.xi.re)
            .then(a.xi.im.total_cmp(&b.xi.im))
    });
}

/// Largest distance between each `λ` and the centroid of the `m` dense
/// eigenvalues of `K` nearest to it.
pub fn dense_deviation(k: &KMatrix, res: &[Resonance]) -> f64 {
    let eig = linalg::eigenvalues(&k.entries);
    res.iter()
        .map(|r| {
            let mut near: Vec<C64> = eig.clone();
            near.sort_by(|a, b| (a - r.lambda).norm().total_cmp(&(b - r.lambda).norm()));
            let m = r.alg_multiplicity.min(near.len());
            let centroid: C64 = near[..m].iter().sum::<C64>() / m as f64;
            (centroid - r.lambda).norm()
        })
        .fold(0.0, f64::max)
}

/// Distance from `ξ` to the nearest other resonance, including the `2π` translates.
fn isolation(res: &Resonance, all: &[Resonance]) -> f64 {
    all.iter()
        .flat_map(|o| [-2.0 * PI, 0.0, 2.0 * PI].map(|s| o.xi + s))
        .map(|x| (x - res.xi).norm())
        .filter(|&d| d > 1e-9)
        .fold(f64::INFINITY, f64::min)
}

/// `(1/2πi) ∮ 𝕋₂₂′/𝕋₂₂ dζ` over the circle `|ζ − center| = rho`, by the
/// trapezoid rule with a central-difference derivative.
pub fn winding_number(cs: &CoinSequence, center: C64, rho: f64) -> f64 {
    let h = 1e-5 * rho;
    let f = |z: C64| transfer_product(cs, z).get(1, 1);
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..WINDING_NODES {
        let theta = 2.0 * PI * k as f64 / WINDING_NODES as f64;
        let e = C64::from_polar(1.0, theta);
        let z = center + e * rho;
        let df = (f(z + h) - f(z - h)) / (2.0 * h);
        // dζ = iρ e^{iθ} dθ
        acc += df / f(z) * I * e * rho;
    }
    let dtheta = 2.0 * PI / WINDING_NODES as f64;
    (acc * dtheta / (2.0 * PI * I)).re
}

/// Multiplicity of `res` from the argument principle on a circle of radius
/// `min(0.1, dist/4)` with `dist` the distance to the nearest other resonance.
pub fn validate_multiplicity(cs: &CoinSequence, res: &Resonance, all: &[Resonance]) -> Result<i64> {
    let rho = 0.1f64.min(0.25 * isolation(res, all));
    validate_multiplicity_with_radius(cs, res, all, rho)
}

pub fn validate_multiplicity_with_radius(
    cs: &CoinSequence,
    res: &Resonance,
    all: &[Resonance],
    rho: f64,
) -> Result<i64> {
    if !(rho > 0.0) || isolation(res, all) <= 2.0 * rho {
        return Err(Error::CircleTouchesOtherResonance { radius: rho });
    }
    Ok(winding_number(cs, res.xi, rho).round() as i64)
}

/// A Jordan chain `φ¹, …, φ^m` of outgoing generalized resonant states with
/// `(U − λ)φ¹ = 0` and `(U − λ)φ^k = φ^{k−1}`, stored on `[−N, n0 + N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanChainStates {
    pub resonance: Resonance,
    pub radius: usize,
    pub states: Vec<WaveState>,
    /// Restrictions to `[0, n0]` in the canonical layout.
    pub window_vectors: Vec<CVector>,
    /// `gram[(k, l)] = (φ^k|_{[0,n0]}, φ^l|_{[0,n0]})`.
    pub gram: CMatrix,
}

pub fn resonant_chain(
    cs: &CoinSequence,
    res: &Resonance,
    radius: usize,
) -> Result<JordanChainStates> {
    let k = build_k(cs)?;
    let window_vectors = chain_vectors(&k, res.lambda, res.alg_multiplicity)?;
    let states = extend_chain(cs, res.lambda, &window_vectors, radius.max(1));
    let m = window_vectors.len();
    let gram = CMatrix::from_fn(m, m, |r, c| window_vectors[r].dotc(&window_vectors[c]));
    Ok(JordanChainStates {
        resonance: *res,
        radius,
        states,
        window_vectors,
        gram,
    })
}

/// `v¹ ∈ ker(K − λ)` with unit norm and `(K − λ)v^k = v^{k−1}` by minimum-norm solves.
pub fn chain_vectors(k: &KMatrix, lambda: C64, length: usize) -> Result<Vec<CVector>> {
    let dim = k.dim();
    let a = &k.entries - CMatrix::identity(dim, dim) * lambda;
    let svd = SortedSvd::new(&a);
    let sigma = &svd.singular_values;
    let tol = 1e-8 * sigma[0].max(1.0);
    if sigma[dim - 2] <= tol {
        return Err(Error::InvariantViolation(format!(
            "geometric multiplicity of {lambda} exceeds one"
        )));
    }
    let mut chain = vec![linalg::normalize_with_phase(&svd.null_vectors(1)[0])];
    for _ in 1..length {
        let prev = chain.last().expect("chain is nonempty");
        let next = svd.truncated_solve(prev, dim - 1);
        let residual = (&a * &next - prev).norm() / prev.norm().max(1.0);
        if !(residual <= CHAIN_TOL) {
            return Err(Error::ChainSolveFailed { residual });
        }
        chain.push(next);
    }
    Ok(chain)
}

/// Extends window vectors outward so that the chain relations hold on all of `[−N, n0 + N]`:
/// left of the window only `L` survives, right of it only `R`.
pub fn extend_chain(
    cs: &CoinSequence,
    lambda: C64,
    vectors: &[CVector],
    radius: usize,
) -> Vec<WaveState> {
    let n0 = cs.n0() as i64;
    let n = radius as i64;
    let inv = lambda.inv();
    let mut states: Vec<WaveState> = Vec::with_capacity(vectors.len());
    for (idx, v) in vectors.iter().enumerate() {
        let mut psi = WaveState::zeros(-n, n0 + n);
        for site in 0..=n0 {
            psi.set(site, [v[2 * site as usize], v[2 * site as usize + 1]]);
        }
        let prev = idx.checked_sub(1).map(|i| &states[i]);
        let prev_at =
            |site: i64, c: Chirality| prev.map_or(C64::new(0.0, 0.0), |p| p.component(site, c));
        // φ_L(m) = λ⁻¹((U_{m+1}φ(m+1))_L − φ^{prev}_L(m))
        for site in (-n..=-1).rev() {
            let incoming = cs.coin(site + 1).apply(psi.get(site + 1))[0];
            let value = inv * (incoming - prev_at(site, Chirality::L));
            psi.set_component(site, Chirality::L, value);
        }
        // φ_R(m) = λ⁻¹((U_{m−1}φ(m−1))_R − φ^{prev}_R(m))
        for site in n0 + 1..=n0 + n {
            let incoming = cs.coin(site - 1).apply(psi.get(site - 1))[1];
            let value = inv * (incoming - prev_at(site, Chirality::R));
            psi.set_component(site, Chirality::R, value);
        }
        states.push(psi);
    }
    states
}

impl JordanChainStates {
    /// Largest residual of `(U − λ)φ^k − φ^{k−1}` over the interior sites `[−N+1, n0+N−1]`.
    pub fn chain_residual(&self, cs: &CoinSequence) -> f64 {
        let n0 = cs.n0() as i64;
        let n = self.radius.max(1) as i64;
        let mut worst = 0.0f64;
        for (k, phi) in self.states.iter().enumerate() {
            let u_phi = crate::walk::step(phi, cs);
            let mut lhs = u_phi;
            lhs.add_scaled(phi, -self.resonance.lambda);
            if k > 0 {
                lhs.add_scaled(&self.states[k - 1], C64::new(-1.0, 0.0));
            }
            worst = worst.max(lhs.max_abs(-n + 1, n0 + n - 1));
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::Coin;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hadamard_resonances() {
        let res = find_resonances(&CoinSequence::hadamard_double_barrier()).unwrap();
        assert_eq!(res.len(), 2);
        assert!((res[0].xi - c(-PI, -LN_2 / 2.0)).norm() < 1e-14);
        assert!((res[1].xi - c(0.0, -LN_2 / 2.0)).norm() < 1e-14);
        assert!((res[0].lambda - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        assert!((res[1].lambda - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        assert!(res.iter().all(|r| r.alg_multiplicity == 1));
    }

    #[test]
    fn triple_barrier_double_resonances() {
        let cs = CoinSequence::triple_barrier_example();
        let res = find_resonances(&cs).unwrap();
        assert_eq!(res.len(), 2);
        for r in &res {
            assert_eq!(r.alg_multiplicity, 2);
            assert!((r.mu - c(-0.5, 0.0)).norm() < 1e-12);
            assert!((r.lambda.norm() - FRAC_1_SQRT_2).abs() < 1e-12);
            assert!(r.lambda.re.abs() < 1e-12);
        }
        let total: usize = res.iter().map(|r| r.alg_multiplicity).sum();
        assert_eq!(total, 2 * cs.n0());
    }

    #[test]
    fn free_walk_has_no_resonances() {
        assert!(find_resonances(&CoinSequence::free(1)).unwrap().is_empty());
        assert!(find_resonances(&CoinSequence::free(0)).unwrap().is_empty());
    }

    #[test]
    fn partner_shift_and_consistency() {
        let cs = CoinSequence::new(vec![
            Coin::from_angles(0.4, 1.1, -0.3, 2.0).unwrap(),
            Coin::rotation(0.6).unwrap(),
            Coin::from_angles(1.3, -2.5, 0.9, -0.7).unwrap(),
        ])
        .unwrap();
        let res = find_resonances(&cs).unwrap();
        for r in &res {
            assert!((-PI..PI).contains(&r.xi.re) && r.xi.im < 0.0);
            assert!(((-I * r.xi).exp() - r.lambda).norm() < 1e-12);
            assert!((r.lambda * r.lambda - r.mu).norm() < 1e-12);
            assert!(res.iter().any(|o| (o.lambda + r.lambda).norm() < 1e-10));
        }
    }

    #[test]
    fn winding_numbers() {
        let cs = CoinSequence::triple_barrier_example();
        let res = find_resonances(&cs).unwrap();
        for r in &res {
            assert_eq!(validate_multiplicity(&cs, r, &res).unwrap(), 2);
        }
        let h = CoinSequence::hadamard_double_barrier();
        let hres = find_resonances(&h).unwrap();
        assert_eq!(validate_multiplicity(&h, &hres[1], &hres).unwrap(), 1);
        assert!(winding_number(&h, c(0.5, -2.0), 0.2).abs() < 1e-6);
        assert!(matches!(
            validate_multiplicity_with_radius(&h, &hres[1], &hres, 1.6),
            Err(Error::CircleTouchesOtherResonance { .. })
        ));
    }

    #[test]
    fn hadamard_resonant_state() {
        let cs = CoinSequence::hadamard_double_barrier();
        let res = find_resonances(&cs).unwrap();
        let chain = resonant_chain(&cs, &res[1], 6).unwrap();
        let v = &chain.window_vectors[0];
        let expected = [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2];
        for (x, e) in v.iter().zip(expected) {
            assert!((x - c(e, 0.0)).norm() < 1e-14);
        }
        assert!(chain.chain_residual(&cs) < 1e-9);
        assert!((chain.gram[(0, 0)] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn triple_barrier_chain() {
        let cs = CoinSequence::triple_barrier_example();
        let res = find_resonances(&cs).unwrap();
        let k = build_k(&cs).unwrap();
        for r in &res {
            let chain = resonant_chain(&cs, r, 8).unwrap();
            assert_eq!(chain.states.len(), 2);
            assert!(chain.chain_residual(&cs) < 1e-8);
            let a = &k.entries - CMatrix::identity(6, 6) * r.lambda;
            assert_eq!(SortedSvd::new(&(&a * &a)).rank(1e-7), 4);
            for phi in &chain.states {
                for site in -8..0 {
                    assert_eq!(phi.component(site, Chirality::R), c(0.0, 0.0));
                }
                for site in 3..11 {
                    assert_eq!(phi.component(site, Chirality::L), c(0.0, 0.0));
                }
            }
        }
    }
}
