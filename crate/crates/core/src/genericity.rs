//! A one-parameter coin perturbation at site 0 and the experiment measuring how
//! a multiple resonance splits under it.

use std::f64::consts::PI;

use crate::coins::{pqtheta_to_s, s_product, CoinSequence, PQTheta};
use crate::resonances::{find_resonances, Resonance};
use crate::transfer::transfer_polynomial;
use crate::{Error, Result, C64, I};

/// Step used to probe the first-order coefficient of the perturbed polynomial.
pub const PROBE_EPS: f64 = 1e-6;
/// First-order coefficients below this are treated as vanishing.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Number of directions tried by [`choose_direction`].
pub const DIRECTION_SWEEP: usize = 8;

/// `(p, q)` of the perturbing element, with `|p|` rescaled onto `|p|² − |q|² = 1`.
pub fn perturbation_pq(eps: f64, phi: f64) -> (C64, C64) {
    let e = C64::from_polar(1.0, phi);
    let norm = (1.0 + 2.0 * eps * phi.cos()).sqrt();
    let p = (1.0 + e * eps) / norm;
    let q = e * eps * (1.0 + e * eps) / norm;
    let modulus = (1.0 + q.norm_sqr()).sqrt();
    (p * (modulus / p.norm()), q)
}

/// Replaces `U₀` by `S_{p,q,0} * U₀`.
pub fn perturb(cs: &CoinSequence, eps: f64, phi: f64) -> Result<CoinSequence> {
    if !(0.0..0.5).contains(&eps) || !phi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "perturbation needs 0 <= eps < 1/2 and finite phi, got eps={eps}, phi={phi}"
        )));
    }
    if eps == 0.0 {
        return Ok(cs.clone());
    }
    let (p, q) = perturbation_pq(eps, phi);
    let s = pqtheta_to_s(&PQTheta { p, q, theta: 0.0 })?;
    let u0 = s_product(&s, &cs.coin(0)).map_err(|e| match e {
        Error::ProductLeavesS | Error::A2Violated => Error::LeftS,
        other => other,
    })?;
    Ok(cs.with_coin(0, u0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitRow {
    pub eps: f64,
    /// Diameter of the `m` roots `μ` nearest the unperturbed multiple root.
    pub gap: f64,
    /// Those roots.
    pub members: Vec<C64>,
    /// Whether every resonance of the perturbed walk is simple.
    pub all_simple: bool,
    /// Total multiplicity of the perturbed resonance set.
    pub total_multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplittingResult {
    pub phi: f64,
    pub base: Resonance,
    pub multiplicity: usize,
    pub rows: Vec<SplitRow>,
    /// Least-squares slope of `ln gap` against `ln ε` over rows with `ε > 0`.
    pub slope: f64,
}

/// The first multiple resonance of `cs` in sorted order.
pub fn multiple_resonance(cs: &CoinSequence) -> Result<Resonance> {
    find_resonances(cs)?
        .into_iter()
        .find(|r| r.alg_multiplicity >= 2)
        .ok_or_else(|| Error::InvalidArgument("base walk has no multiple resonance".into()))
}

/// `|p_ε(μ₀)| / ε` for the monic perturbed polynomial at a small `ε`.
pub fn first_order_coefficient(cs: &CoinSequence, mu0: C64, phi: f64) -> Result<f64> {
    let p = transfer_polynomial(&perturb(cs, PROBE_EPS, phi)?)?;
    Ok(p.eval(mu0).norm() / PROBE_EPS)
}

pub fn splitting_experiment(
    cs: &CoinSequence,
    phi: f64,
    epsilons: &[f64],
) -> Result<SplittingResult> {
    let base = multiple_resonance(cs)?;
    let m = base.alg_multiplicity;
    if first_order_coefficient(cs, base.mu, phi)? < DEGENERACY_TOL {
        return Err(Error::DegenerateDirection { phi });
    }
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let res = find_resonances(&perturb(cs, eps, phi)?)?;
        // one entry per root μ, repeated by multiplicity; partners share μ
        let mut mus: Vec<(C64, usize)> = Vec::new();
        for r in &res {
            if !mus
                .iter()
                .any(|(mu, _)| (mu - r.mu).norm() < 1e-14 * r.mu.norm().max(1.0))
            {
                mus.push((r.mu, r.alg_multiplicity));
            }
        }
        let mut expanded: Vec<C64> = mus
            .iter()
            .flat_map(|&(mu, k)| std::iter::repeat_n(mu, k))
            .collect();
        expanded.sort_by(|a, b| (a - base.mu).norm().total_cmp(&(b - base.mu).norm()));
        let members: Vec<C64> = expanded.into_iter().take(m).collect();
        let gap = members
            .iter()
            .enumerate()
            .flat_map(|(i, a)| members[i + 1..].iter().map(move |b| (a - b).norm()))
            .fold(0.0, f64::max);
        rows.push(SplitRow {
            eps,
            gap,
            members,
            all_simple: res.iter().all(|r| r.alg_multiplicity == 1),
            total_multiplicity: res.iter().map(|r| r.alg_multiplicity).sum(),
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.eps > 0.0 && r.gap > 0.0)
        .map(|r| (r.eps.ln(), r.gap.ln()))
        .collect();
    let slope = if points.len() >= 2 {
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    Ok(SplittingResult {
        phi,
        base,
        multiplicity: m,
        rows,
        slope,
    })
}

/// The `k`-th of the equispaced sweep directions in `[−π, π)`.
pub fn sweep_direction(k: usize) -> f64 {
    -PI + 2.0 * PI * k as f64 / DIRECTION_SWEEP as f64
}

/// First direction of the sweep whose splitting experiment succeeds with all
/// perturbed resonances simple.
pub fn choose_direction(cs: &CoinSequence, epsilons: &[f64]) -> Result<SplittingResult> {
    let mut last = Error::DegenerateDirection {
        phi: sweep_direction(0),
    };
    for k in 0..DIRECTION_SWEEP {
        match splitting_experiment(cs, sweep_direction(k), epsilons) {
            Ok(r) if r.rows.iter().all(|row| row.eps == 0.0 || row.all_simple) => return Ok(r),
            Ok(_) => {
                last = Error::DegenerateDirection {
                    phi: sweep_direction(k),
                }
            }
            Err(e @ Error::DegenerateDirection { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// `e^{iφ} + b̄₀ e^{−iφ}`, the direction factor in the first-order term.
pub fn alpha(cs: &CoinSequence, phi: f64) -> C64 {
    (I * phi).exp() + cs.coin(0).b().conj() * (-I * phi).exp()
}
