//! Resonance expansion of the time evolution, reconstruction on light-cone
//! windows, survival bounds and decay fits.

use nalgebra::{DMatrix, DVector};

use crate::coins::CoinSequence;
use crate::linalg::{self, CMatrix, CVector, SortedSvd};
use crate::resonances::{chain_vectors, find_resonances, JordanChainStates, Resonance};
use crate::states::{incoming_length, Chirality, WaveState};
use crate::walk::{build_k, evolve, KMatrix};
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Absolute tolerance for deciding that `K^k` vanishes on the zero block.
pub const NILPOTENCY_TOL: f64 = 1e-10;
/// Minimum number of usable points for a decay fit.
pub const MIN_FIT_POINTS: usize = 20;

/// Coefficients of one resonance in the Jordan basis of `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceBlock {
    pub resonance: Resonance,
    /// `c^1, …, c^m` with respect to the chain `v^1, …, v^m`.
    pub coefficients: Vec<C64>,
    /// The chain `v^1, …, v^m` on `[0, n0]`.
    pub chain: Vec<CVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionData {
    pub n0: usize,
    /// Incoming-support length `ν(ψ₀)`.
    pub nu: usize,
    /// Nilpotency index of `K` on its generalized zero eigenspace.
    pub zero_part_index: usize,
    pub blocks: Vec<ResonanceBlock>,
    /// `U^s Z` for `s = 0..=ι₀`, where `Z` is the zero-block part of `χ(ψ_ν)`.
    pub zero_transient: Vec<WaveState>,
}

/// Binomial coefficient as a float (zero when `l > s`).
fn binomial(s: usize, l: usize) -> f64 {
    if l > s {
        return 0.0;
    }
    (0..l).fold(1.0, |acc, i| acc * (s - i) as f64 / (i + 1) as f64)
}

/// Orthonormal basis of the generalized zero eigenspace of `K`: the range of
/// `∏_j (K − λ_j)^{m_j}`, which annihilates every nonzero block.
fn zero_block_basis(k: &KMatrix, res: &[Resonance]) -> CMatrix {
    let dim = k.dim();
    let total: usize = res.iter().map(|r| r.alg_multiplicity).sum();
    let d0 = dim - total;
    let mut q = CMatrix::identity(dim, dim);
    for r in res {
        let shifted = &k.entries - CMatrix::identity(dim, dim) * r.lambda;
        for _ in 0..r.alg_multiplicity {
            q = &shifted * q;
        }
    }
    let svd = SortedSvd::new(&q);
    svd.u.columns(0, d0).into_owned()
}

/// Smallest `k` with `K^k Z = 0` on the zero block basis `Z`.
fn nilpotency_index(k: &KMatrix, basis: &CMatrix) -> usize {
    let mut m = basis.clone();
    let mut idx = 0;
    let largest = |m: &CMatrix| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    while largest(&m) > NILPOTENCY_TOL {
        m = &k.entries * m;
        idx += 1;
        if idx > k.dim() {
            break;
        }
    }
    idx
}

pub fn expand(cs: &CoinSequence, psi0: &WaveState) -> Result<ExpansionData> {
    let n0 = cs.n0();
    let k = build_k(cs)?;
    let res = find_resonances(cs)?;
    let nu = incoming_length(psi0, n0);
    let psi_nu = evolve(psi0, cs, nu).pop().expect("trajectory is nonempty");
    let target = psi_nu.window_vector(n0);

    let chains: Vec<Vec<CVector>> = res
        .iter()
        .map(|r| chain_vectors(&k, r.lambda, r.alg_multiplicity))
        .collect::<Result<_>>()?;
    let zero_basis = zero_block_basis(&k, &res);
    let dim = k.dim();
    let mut columns: Vec<CVector> = chains.iter().flatten().cloned().collect();
    columns.extend(zero_basis.column_iter().map(|c| c.into_owned()));
    let basis = CMatrix::from_columns(&columns);
    debug_assert_eq!(basis.ncols(), dim);
    let coef = linalg::lu_solve(&basis, &target)
        .ok_or_else(|| Error::InvariantViolation("Jordan basis of K is singular".into()))?;

    let mut blocks = Vec::with_capacity(res.len());
    let mut offset = 0;
    for (r, chain) in res.iter().zip(chains) {
        let m = chain.len();
        blocks.push(ResonanceBlock {
            resonance: *r,
            coefficients: coef.rows(offset, m).iter().copied().collect(),
            chain,
        });
        offset += m;
    }
    let zero_coef = coef.rows(offset, dim - offset).into_owned();
    let z = &zero_basis * zero_coef;
    let iota0 = nilpotency_index(&k, &zero_basis);
    let zero_transient = evolve(&WaveState::from_window_vector(&z), cs, iota0);
    Ok(ExpansionData {
        n0,
        nu,
        zero_part_index: iota0,
        blocks,
        zero_transient,
    })
}

impl ExpansionData {
    /// `K^{t−ν} χ(ψ_ν)` restricted to the resonance blocks, as a window vector.
    pub fn resonance_part(&self, t: usize) -> CVector {
        let s = t.saturating_sub(self.nu);
        let mut out = CVector::zeros(2 * (self.n0 + 1));
        for block in &self.blocks {
            let lambda = block.resonance.lambda;
            for (kk, c) in block.coefficients.iter().enumerate() {
                // K^s v^{k} = Σ_l C(s,l) λ^{s−l} v^{k−l}
                for l in 0..=kk.min(s) {
                    let w = *c * binomial(s, l) * lambda.powu((s - l) as u32);
                    out += &block.chain[kk - l] * w;
                }
            }
        }
        out
    }

    /// The zero-block contribution `U^s Z` at `s = t − ν`.
    fn zero_part(&self, s: usize) -> WaveState {
        let iota = self.zero_part_index;
        if s <= iota {
            return self.zero_transient[s].clone();
        }
        // K^s Z = 0 for s ≥ ι₀: only amplitude that already left the window remains,
        // and it moves freely outwards.
        let last = &self.zero_transient[iota];
        let shift = (s - iota) as i64;
        let n0 = self.n0 as i64;
        let mut out = WaveState::zero();
        for (n, v) in last.iter() {
            if n < 0 && v[0] != ZERO {
                out.set_component(n - shift, Chirality::L, v[0]);
            }
            if n > n0 && v[1] != ZERO {
                out.set_component(n + shift, Chirality::R, v[1]);
            }
        }
        out
    }

    /// Decay rate `M`, the largest resonance modulus, and the multiplicity `m`
    /// of the resonances attaining it. `(0, 1)` when there are none.
    pub fn dominant(&self) -> (f64, usize) {
        dominant_of(self.blocks.iter().map(|b| b.resonance))
    }

    /// The constant `C` of the survival bound `‖χψ_t‖ ≤ C t^{m−1} M^t`, valid for `t ≥ ν + ι₀`.
    pub fn decay_constant(&self) -> f64 {
        let (big_m, m) = self.dominant();
        if big_m == 0.0 {
            return 0.0;
        }
        let nu = self.nu as f64;
        let mut total = 0.0;
        for block in &self.blocks {
            let r = block.resonance.lambda.norm() / big_m;
            let norms: Vec<f64> = block.chain.iter().map(|v| v.norm()).collect();
            for (kk, c) in block.coefficients.iter().enumerate() {
                let mut factorial = 1.0;
                for l in 0..=kk {
                    if l > 0 {
                        factorial *= l as f64;
                    }
                    // sup_t t^{l−m+1} (|λ|/M)^{t−ν−l} for the excess powers of t
                    let excess = if l + 1 <= m {
                        1.0
                    } else {
                        let a = (l + 1 - m) as f64;
                        let peak = (a / (std::f64::consts::E * -r.ln())).powf(a);
                        peak * r.powf(-nu - l as f64)
                    };
                    total +=
                        c.norm() * norms[kk - l] / factorial * big_m.powf(-nu - l as f64) * excess;
                }
            }
        }
        total
    }

    /// Largest ratio `‖χψ_t‖ / (C t^{m−1} M^t)` over `t ∈ [ν + ι₀, T]`.
    pub fn bound_ratio(&self, survival: &[f64]) -> f64 {
        let (big_m, m) = self.dominant();
        let c = self.decay_constant();
        let start = (self.nu + self.zero_part_index).max(1);
        (start..survival.len())
            .map(|t| {
                let t_f = t as f64;
                let bound = c * t_f.powi(m as i32 - 1) * big_m.powf(t_f);
                if bound == 0.0 {
                    if survival[t] == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    survival[t] / bound
                }
            })
            .fold(0.0, f64::max)
    }
}

fn dominant_of(res: impl Iterator<Item = Resonance>) -> (f64, usize) {
    let res: Vec<Resonance> = res.collect();
    let big_m = res.iter().map(|r| r.lambda.norm()).fold(0.0, f64::max);
    if big_m == 0.0 {
        return (0.0, 1);
    }
    let m = res
        .iter()
        .filter(|r| r.lambda.norm() >= big_m * (1.0 - 1e-12))
        .map(|r| r.alg_multiplicity)
        .max()
        .unwrap_or(1);
    (big_m, m)
}

/// `ψ_t` on `[lo, hi]` from the expansion and the outgoing chain states.
///
/// The window must lie in the cone `[−(t−ν), n0 + t − ν]` and inside the
/// chain windows. The result is exact for every `t ≥ ν`.
pub fn reconstruct(
    ed: &ExpansionData,
    chains: &[JordanChainStates],
    t: usize,
    window: (i64, i64),
) -> Result<WaveState> {
    let (lo, hi) = window;
    let n0 = ed.n0 as i64;
    let cone_lo = -(t as i64 - ed.nu as i64);
    let cone_hi = n0 + t as i64 - ed.nu as i64;
    if t < ed.nu || lo < cone_lo || hi > cone_hi || lo > hi {
        return Err(Error::WindowOutsideCone {
            lo,
            hi,
            cone_lo,
            cone_hi,
        });
    }
    if chains.len() != ed.blocks.len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} chains, got {}",
            ed.blocks.len(),
            chains.len()
        )));
    }
    for ch in chains {
        let r = ch.radius as i64;
        if lo < -r || hi > n0 + r {
            return Err(Error::InvalidArgument(format!(
                "chain window radius {r} does not cover [{lo}, {hi}]"
            )));
        }
    }
    let s = t - ed.nu;
    let mut out = ed.zero_part(s).restrict(lo, hi);
    for (block, chain) in ed.blocks.iter().zip(chains) {
        let lambda = block.resonance.lambda;
        for (kk, c) in block.coefficients.iter().enumerate() {
            for l in 0..=kk.min(s) {
                let w = *c * binomial(s, l) * lambda.powu((s - l) as u32);
                out.add_scaled(&chain.states[kk - l].restrict(lo, hi), w);
            }
        }
    }
    Ok(out.restrict(lo, hi))
}

/// The same superposition without the zero-block transient: the bare resonance sum.
pub fn resonance_sum(
    ed: &ExpansionData,
    chains: &[JordanChainStates],
    t: usize,
    window: (i64, i64),
) -> WaveState {
    let (lo, hi) = window;
    let s = t.saturating_sub(ed.nu);
    let mut out = WaveState::zeros(lo, hi);
    for (block, chain) in ed.blocks.iter().zip(chains) {
        let lambda = block.resonance.lambda;
        for (kk, c) in block.coefficients.iter().enumerate() {
            for l in 0..=kk.min(s) {
                let w = *c * binomial(s, l) * lambda.powu((s - l) as u32);
                out.add_scaled(&chain.states[kk - l].restrict(lo, hi), w);
            }
        }
    }
    out
}

/// Fitted survival envelope `s_t ≈ prefactor · t^{multiplicity−1} · rate^t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub multiplicity: f64,
    pub prefactor: f64,
    pub points: usize,
}

/// Least-squares fit of `ln s_t = c + (m − 1) ln t + t ln M` over `t ≥ t_min`.
///
/// Uses the contiguous run of positive, finite norms starting at `t_min`.
pub fn decay_fit(survival: &[f64], t_min: usize) -> Result<DecayFit> {
    let start = t_min.max(1);
    let usable: Vec<(f64, f64)> = survival
        .iter()
        .enumerate()
        .skip(start)
        .take_while(|(_, &s)| s.is_finite() && s > 1e-300)
        .map(|(t, &s)| (t as f64, s.ln()))
        .collect();
    if usable.len() < MIN_FIT_POINTS {
        return Err(Error::AllZeroTail {
            usable: usable.len(),
        });
    }
    // centre t to keep the normal equations well conditioned
    let t_mean = usable.iter().map(|p| p.0).sum::<f64>() / usable.len() as f64;
    let a = DMatrix::from_fn(usable.len(), 3, |r, c| match c {
        0 => 1.0,
        1 => usable[r].0.ln(),
        _ => usable[r].0 - t_mean,
    });
    let b = DVector::from_iterator(usable.len(), usable.iter().map(|p| p.1));
    let x = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(DecayFit {
        rate: x[2].exp(),
        multiplicity: 1.0 + x[1],
        prefactor: (x[0] - x[2] * t_mean).exp(),
        points: usable.len(),
    })
}

/// Closed-form resonance data of a double barrier (`n0 = 1`, both coins non-diagonal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleBarrier {
    pub c0: C64,
    pub b1: C64,
    pub d0: C64,
    pub a1: C64,
    /// `√(c₀b₁)`, the branch with positive imaginary part (positive real part if real).
    pub lambda: C64,
}

pub fn double_barrier_closed_form(cs: &CoinSequence) -> Result<DoubleBarrier> {
    if cs.n0() != 1 || cs.coins().iter().any(|c| c.is_diagonal()) {
        return Err(Error::A3Violated);
    }
    let (u0, u1) = (cs.coin(0), cs.coin(1));
    let mut lambda = (u0.c() * u1.b()).sqrt();
    if lambda.im < 0.0 || (lambda.im == 0.0 && lambda.re < 0.0) {
        lambda = -lambda;
    }
    Ok(DoubleBarrier {
        c0: u0.c(),
        b1: u1.b(),
        d0: u0.d(),
        a1: u1.a(),
        lambda,
    })
}

impl DoubleBarrier {
    /// `[λ, −λ]`.
    pub fn eigenvalues(&self) -> [C64; 2] {
        [self.lambda, -self.lambda]
    }

    /// Eigenvectors `(±b₁, 0, 0, λ)` of `K` for `±λ`, in the canonical layout.
    pub fn eigenvectors(&self) -> [CVector; 2] {
        [1.0, -1.0].map(|sign| CVector::from_vec(vec![self.b1 * sign, ZERO, ZERO, self.lambda]))
    }

    /// `γ± = ±λ⁻²⟨R|Q₀ψ(0)⟩/2 + b₁⁻¹λ⁻¹⟨L|P₁ψ(1)⟩/2` for `ψ` supported in `[0, 1]`.
    pub fn gamma(&self, psi: &WaveState) -> [C64; 2] {
        let v0 = psi.get(0);
        let v1 = psi.get(1);
        let r = self.c0 * v0[0] + self.d0 * v0[1];
        let l = self.a1 * v1[0] + self.b1 * v1[1];
        let inv = self.lambda.inv();
        let tail = l / self.b1 * inv / 2.0;
        [inv * inv * r / 2.0 + tail, -inv * inv * r / 2.0 + tail]
    }

    /// `C = √(|b₁|(|b₁| + |c₀|) Σ|γ±|²)`.
    pub fn survival_constant(&self, gamma: &[C64; 2]) -> f64 {
        let b = self.b1.norm();
        (b * (b + self.c0.norm()) * (gamma[0].norm_sqr() + gamma[1].norm_sqr())).sqrt()
    }
}
