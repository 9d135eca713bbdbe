//! The outgoing resolvent `R(ξ) = (e^{−iξ} − U)^{-1}` on finitely supported
//! states, continued to all `ξ` that are not resonances.

use crate::coins::CoinSequence;
use crate::linalg::{self, CMatrix, SortedSvd};
use crate::states::{Chirality, WaveState};
use crate::walk::{build_k, step};
use crate::{Error, Result, C64, I};

const ZERO: C64 = C64::new(0.0, 0.0);

pub const MAX_CONDITION: f64 = 1e12;
/// Minimum distance between `e^{−iξ}` and the spectrum of `K`.
pub const SPECTRUM_GAP: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventOutput {
    /// `R(ξ)f` on the requested window.
    pub state: WaveState,
    pub condition_number: f64,
    /// Relative residual of `(e^{−iξ} − U)R(ξ)f = f` on the window interior.
    pub residual: f64,
}

/// `R(ξ)f` on `[lo, hi]`, verified against the defining identity.
pub fn apply_resolvent(
    cs: &CoinSequence,
    xi: C64,
    f: &WaveState,
    window: (i64, i64),
) -> Result<ResolventOutput> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::InvalidArgument(format!("empty window [{lo}, {hi}]")));
    }
    let n0 = cs.n0();
    let n0i = n0 as i64;
    let k = build_k(cs)?;
    let lambda = (-I * xi).exp();
    let dim = k.dim();
    let a: CMatrix = CMatrix::identity(dim, dim) * lambda - &k.entries;
    let condition_number = SortedSvd::new(&a).condition_number();
    let gap = linalg::eigenvalues(&k.entries)
        .iter()
        .map(|e| (e - lambda).norm())
        .fold(f64::INFINITY, f64::min);
    if !(condition_number <= MAX_CONDITION) || gap <= SPECTRUM_GAP {
        return Err(Error::AtResonance { xi });
    }

    let e = (I * xi).exp();
    let f = f.trimmed();
    // Σ_{k≥0} e^{i(k+1)ξ} f_R(m − k) and Σ_{k≥0} e^{i(k+1)ξ} f_L(m + k), for the
    // sites of f only; both series terminate.
    let tail_r = |m: i64| -> C64 {
        if f.is_empty() || m < f.lo() {
            return ZERO;
        }
        (f.lo()..=m.min(f.hi()))
            .map(|site| e.powu((m - site + 1) as u32) * f.component(site, Chirality::R))
            .sum()
    };
    let tail_l = |m: i64| -> C64 {
        if f.is_empty() || m > f.hi() {
            return ZERO;
        }
        (m.max(f.lo())..=f.hi())
            .map(|site| e.powu((site - m + 1) as u32) * f.component(site, Chirality::L))
            .sum()
    };

    let mut rhs = f.window_vector(n0);
    rhs[1] += tail_r(-1);
    rhs[2 * n0] += tail_l(n0i + 1);
    let v = linalg::lu_solve(&a, &rhs).ok_or(Error::AtResonance { xi })?;
    let edge_left = cs.coin(0).apply([v[0], v[1]])[0];
    let edge_right = cs.coin(n0i).apply([v[2 * n0], v[2 * n0 + 1]])[1];

    let value = |n: i64| -> [C64; 2] {
        if (0..=n0i).contains(&n) {
            let i = 2 * n as usize;
            return [v[i], v[i + 1]];
        }
        if n < 0 {
            // e^{−inξ}(P₀v(0))_L + Σ_{k=0}^{−n−1} e^{i(k+1)ξ} f_L(n+k)
            let mut l = (-I * xi * n as f64).exp() * edge_left;
            for kk in 0..(-n) {
                l += e.powu(kk as u32 + 1) * f.component(n + kk, Chirality::L);
            }
            [l, tail_r(n)]
        } else {
            let mut r = (I * xi * (n - n0i) as f64).exp() * edge_right;
            for kk in 0..(n - n0i) {
                r += e.powu(kk as u32 + 1) * f.component(n - kk, Chirality::R);
            }
            [tail_l(n), r]
        }
    };
    let state = WaveState::from_window(lo, (lo..=hi).map(value).collect());

    let residual = identity_residual(cs, lambda, &state, &f, lo, hi);
    if !(residual <= IDENTITY_TOL) {
        return Err(Error::InvariantViolation(format!(
            "resolvent identity residual {residual:.3e}"
        )));
    }
    Ok(ResolventOutput {
        state,
        condition_number,
        residual,
    })
}

/// `‖(λ − U)u − f‖_∞ / (‖f‖_∞ + (1 + |λ|)‖u‖_∞)` over `[lo+1, hi−1]`.
pub fn identity_residual(
    cs: &CoinSequence,
    lambda: C64,
    u: &WaveState,
    f: &WaveState,
    lo: i64,
    hi: i64,
) -> f64 {
    if hi - lo < 2 {
        return 0.0;
    }
    let mut lhs = u.scaled(lambda);
    lhs.add_scaled(&step(u, cs), C64::new(-1.0, 0.0));
    let err = lhs.max_abs_diff(f, lo + 1, hi - 1);
    let scale = f.max_abs(lo, hi) + (1.0 + lambda.norm()) * u.max_abs(lo, hi);
    if scale == 0.0 {
        err
    } else {
        err / scale
    }
}

/// `Σ_{k<terms} e^{i(k+1)ξ} U^k f`, convergent for `Im ξ > 0`.
pub fn neumann_resolvent(cs: &CoinSequence, xi: C64, f: &WaveState, terms: usize) -> WaveState {
    let e = (I * xi).exp();
    let mut acc = WaveState::zero();
    let mut term = f.clone();
    let mut w = e;
    for _ in 0..terms {
        acc.add_scaled(&term, w);
        term = step(&term, cs);
        w *= e;
    }
    acc
}
