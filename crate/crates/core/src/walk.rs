//! Time evolution by the walk operator and its compression `K` to `[0, n0]`.

use crate::coins::CoinSequence;
use crate::linalg::{CMatrix, CVector, SortedSvd};
use crate::states::{flat_index, incoming_length, Chirality, WaveState};
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// One step `(Uψ)(n) = P_{n+1}ψ(n+1) + Q_{n−1}ψ(n−1)` where `P_n = |L⟩⟨L|U_n`
/// and `Q_n = |R⟩⟨R|U_n`.
pub fn step(psi: &WaveState, cs: &CoinSequence) -> WaveState {
    if psi.is_empty() {
        return WaveState::zero();
    }
    let lo = psi.lo() - 1;
    let mut amps = vec![[ZERO; 2]; psi.amplitudes().len() + 2];
    for (n, v) in psi.iter() {
        let w = cs.coin(n).apply(v);
        // L moves to n − 1, R moves to n + 1.
        amps[(n - 1 - lo) as usize][0] = w[0];
        amps[(n + 1 - lo) as usize][1] = w[1];
    }
    WaveState::from_window(lo, amps)
}

/// `[ψ_0, …, ψ_T]` with `ψ_{t+1} = Uψ_t`.
pub fn evolve(psi0: &WaveState, cs: &CoinSequence, t_max: usize) -> Vec<WaveState> {
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(psi0.clone());
    for t in 0..t_max {
        let next = step(&out[t], cs);
        out.push(next);
    }
    out
}

/// l² norm of each state restricted to `[0, n0]`.
pub fn survival_norm(trajectory: &[WaveState], n0: usize) -> Vec<f64> {
    trajectory
        .iter()
        .map(|psi| psi.window_norm(0, n0 as i64))
        .collect()
}

/// Survival norms for `t = 0..=T` without keeping the trajectory.
///
/// Outgoing amplitude never returns to the window, so it is dropped after
/// each step and the cost stays bounded by the incoming support.
pub fn survival_norms(psi0: &WaveState, cs: &CoinSequence, t_max: usize) -> Vec<f64> {
    let n0 = cs.n0() as i64;
    let mut psi = drop_outgoing(psi0, n0);
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(psi0.window_norm(0, n0));
    for _ in 0..t_max {
        psi = drop_outgoing(&step(&psi, cs), n0);
        out.push(psi.window_norm(0, n0));
    }
    out
}

fn drop_outgoing(psi: &WaveState, n0: i64) -> WaveState {
    let amps = psi
        .iter()
        .map(|(n, v)| {
            if n < 0 {
                [ZERO, v[1]]
            } else if n > n0 {
                [v[0], ZERO]
            } else {
                v
            }
        })
        .collect();
    WaveState::from_window(psi.lo(), amps).trimmed()
}

/// The compression of the walk to `[0, n0]` in the canonical layout.
#[derive(Debug, Clone, PartialEq)]
pub struct KMatrix {
    pub n0: usize,
    pub entries: CMatrix,
}

impl KMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.entries * v
    }

    pub fn operator_norm(&self) -> f64 {
        SortedSvd::new(&self.entries)
            .singular_values
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    /// The two kernel vectors `δ_0 (d_0, −c_0)` and `δ_{n0} (b_{n0}, −a_{n0})`.
    pub fn boundary_kernel_vectors(&self, cs: &CoinSequence) -> [CVector; 2] {
        let dim = self.dim();
        let (u0, un) = (cs.coin(0), cs.coin(self.n0 as i64));
        let mut v0 = CVector::zeros(dim);
        v0[flat_index(0, Chirality::L)] = u0.d();
        v0[flat_index(0, Chirality::R)] = -u0.c();
        let mut vn = CVector::zeros(dim);
        vn[flat_index(self.n0, Chirality::L)] = un.b();
        vn[flat_index(self.n0, Chirality::R)] = -un.a();
        [v0, vn]
    }

    /// `|‖Kv‖² + |(U₀v(0))_L|² + |(U_{n0}v(n0))_R|² − ‖v‖²| / ‖v‖²`; the two
    /// boundary terms are the amplitude leaving the window in one step.
    pub fn norm_defect(&self, cs: &CoinSequence, v: &CVector) -> f64 {
        let n0 = self.n0;
        let at = |n: usize| {
            [
                v[flat_index(n, Chirality::L)],
                v[flat_index(n, Chirality::R)],
            ]
        };
        let left = cs.coin(0).apply(at(0))[0];
        let right = cs.coin(n0 as i64).apply(at(n0))[1];
        let total = v.norm_squared();
        let lhs = self.apply(v).norm_squared() + left.norm_sqr() + right.norm_sqr();
        if total == 0.0 {
            lhs
        } else {
            (lhs - total).abs() / total
        }
    }
}

pub fn build_k(cs: &CoinSequence) -> Result<KMatrix> {
    let n0 = cs.n0();
    if n0 == 0 {
        return Err(Error::UnsupportedN0);
    }
    let dim = 2 * (n0 + 1);
    let mut k = CMatrix::zeros(dim, dim);
    for n in 0..=n0 {
        // (Kv)(n)_L = ⟨L|U_{n+1} v(n+1)⟩ for n < n0
        if n < n0 {
            let u = cs.coin(n as i64 + 1);
            let row = flat_index(n, Chirality::L);
            k[(row, flat_index(n + 1, Chirality::L))] = u.a();
            k[(row, flat_index(n + 1, Chirality::R))] = u.b();
        }
        // (Kv)(n)_R = ⟨R|U_{n−1} v(n−1)⟩ for n > 0
        if n > 0 {
            let u = cs.coin(n as i64 - 1);
            let row = flat_index(n, Chirality::R);
            k[(row, flat_index(n - 1, Chirality::L))] = u.c();
            k[(row, flat_index(n - 1, Chirality::R))] = u.d();
        }
    }
    Ok(KMatrix { n0, entries: k })
}

/// Checks `χ(ψ_t) = K^{t−ν} χ(ψ_ν)` along a trajectory; returns the largest deviation.
pub fn restriction_residual(trajectory: &[WaveState], k: &KMatrix) -> f64 {
    let Some(first) = trajectory.first() else {
        return 0.0;
    };
    let nu = incoming_length(first, k.n0);
    if nu >= trajectory.len() {
        return 0.0;
    }
    let mut v = trajectory[nu].window_vector(k.n0);
    let mut worst = 0.0f64;
    for psi in &trajectory[nu + 1..] {
        v = k.apply(&v);
        worst = worst.max((psi.window_vector(k.n0) - &v).norm());
    }
    worst
}
