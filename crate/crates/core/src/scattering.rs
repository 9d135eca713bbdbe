//! Jost solutions, their Wronskians, and the scattering matrix.
//!
//! `Π_n ψ = (⟨L|ψ(n), ⟨R|ψ(n+1))` is propagated with the local transfer
//! matrices. Values are kept as a mantissa times `e^{scale}` so that complex
//! `ξ` far from the real axis neither overflows nor underflows.

use crate::coins::CoinSequence;
use crate::linalg::Mat2;
use crate::transfer::local_transfer;
use crate::{Error, Result, C64, I};

const ZERO: C64 = C64::new(0.0, 0.0);

/// A pole of the scattering matrix is reported when the two outgoing Jost
/// solutions are collinear at `n` to within this relative tolerance.
pub const POLE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JostKind {
    /// `e^{inξ}|R⟩` for `n ≤ −1`.
    InMinus,
    /// `e^{−inξ}|L⟩` for `n ≥ n0 + 1`.
    InPlus,
    /// `e^{−inξ}|L⟩` for `n ≤ −1`.
    OutMinus,
    /// `e^{inξ}|R⟩` for `n ≥ n0 + 1`.
    OutPlus,
}

/// A complex number `mantissa · e^{scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: C64,
    pub scale: f64,
}

impl Scaled {
    pub fn value(&self) -> C64 {
        self.mantissa * self.scale.exp()
    }

    /// `self / other` evaluated without forming either value.
    pub fn ratio(&self, other: &Scaled) -> C64 {
        (self.mantissa / other.mantissa) * (self.scale - other.scale).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JostSolution {
    pub kind: JostKind,
    pub xi: C64,
    pub n0: usize,
    /// Mantissas of `Π_n` for `n = −1..=n0`, each with max-modulus one (or zero).
    mantissas: Vec<[C64; 2]>,
    scales: Vec<f64>,
}

fn renormalize(v: [C64; 2], scale: f64) -> ([C64; 2], f64) {
    let m = v[0].norm().max(v[1].norm());
    if m == 0.0 || !m.is_finite() {
        return (v, scale);
    }
    ([v[0] / m, v[1] / m], scale + m.ln())
}

/// `e^{w}` as a scaled pair.
fn scaled_exp(w: C64) -> (C64, f64) {
    (C64::from_polar(1.0, w.im), w.re)
}

pub fn jost(cs: &CoinSequence, xi: C64, kind: JostKind) -> JostSolution {
    let n0 = cs.n0();
    let len = n0 + 2;
    let mut mantissas = vec![[ZERO; 2]; len];
    let mut scales = vec![0.0; len];
    match kind {
        JostKind::OutPlus | JostKind::InPlus => {
            let (seed, scale) = if kind == JostKind::OutPlus {
                let (m, s) = scaled_exp(I * xi * (n0 as f64 + 1.0));
                ([ZERO, m], s)
            } else {
                let (m, s) = scaled_exp(-I * xi * n0 as f64);
                ([m, ZERO], s)
            };
            mantissas[len - 1] = seed;
            scales[len - 1] = scale;
            // Π_{n−1} = T_n Π_n; index k holds Π_{k−1}
            for n in (0..=n0).rev() {
                let t = local_transfer(&cs.coin(n as i64), xi).0;
                let k = n + 1;
                let (m, s) = renormalize(t.apply(mantissas[k]), scales[k]);
                mantissas[k - 1] = m;
                scales[k - 1] = s;
            }
        }
        JostKind::OutMinus | JostKind::InMinus => {
            let (seed, scale) = if kind == JostKind::OutMinus {
                let (m, s) = scaled_exp(I * xi);
                ([m, ZERO], s)
            } else {
                ([ZERO, C64::new(1.0, 0.0)], 0.0)
            };
            mantissas[0] = seed;
            scales[0] = scale;
            // Π_n = T_n⁻¹ Π_{n−1}
            for n in 0..=n0 {
                let t_inv = local_transfer(&cs.coin(n as i64), xi).1;
                let (m, s) = renormalize(t_inv.apply(mantissas[n]), scales[n]);
                mantissas[n + 1] = m;
                scales[n + 1] = s;
            }
        }
    }
    JostSolution {
        kind,
        xi,
        n0,
        mantissas,
        scales,
    }
}

impl JostSolution {
    /// `Π_n` as mantissa and log-scale, for any `n` (free propagation outside the window).
    pub fn pi_scaled(&self, n: i64) -> ([C64; 2], f64) {
        let n0 = self.n0 as i64;
        if n < -1 {
            let k = (-1 - n) as f64;
            let (m, s) = (self.mantissas[0], self.scales[0]);
            let (e1, s1) = scaled_exp(I * self.xi * k);
            let (e2, s2) = scaled_exp(-I * self.xi * k);
            // bring both entries to a common scale
            let scale = s + s1.max(s2);
            return (
                [
                    m[0] * e1 * (s1 - s1.max(s2)).exp(),
                    m[1] * e2 * (s2 - s1.max(s2)).exp(),
                ],
                scale,
            );
        }
        if n > n0 {
            let k = (n - n0) as f64;
            let last = self.mantissas.len() - 1;
            let (m, s) = (self.mantissas[last], self.scales[last]);
            let (e1, s1) = scaled_exp(-I * self.xi * k);
            let (e2, s2) = scaled_exp(I * self.xi * k);
            let scale = s + s1.max(s2);
            return (
                [
                    m[0] * e1 * (s1 - s1.max(s2)).exp(),
                    m[1] * e2 * (s2 - s1.max(s2)).exp(),
                ],
                scale,
            );
        }
        let k = (n + 1) as usize;
        (self.mantissas[k], self.scales[k])
    }

    /// `Π_n` as plain values.
    pub fn pi(&self, n: i64) -> [C64; 2] {
        let (m, s) = self.pi_scaled(n);
        let f = s.exp();
        [m[0] * f, m[1] * f]
    }

    /// `ψ(n) = (⟨L|ψ(n), ⟨R|ψ(n))`.
    pub fn value(&self, n: i64) -> [C64; 2] {
        [self.pi(n)[0], self.pi(n - 1)[1]]
    }
}

/// `𝒲_n(ψ₁, ψ₂) = det(Π_n ψ₁, Π_n ψ₂)` in scaled form.
pub fn wronskian(psi1: &JostSolution, psi2: &JostSolution, n: i64) -> Scaled {
    let (m1, s1) = psi1.pi_scaled(n);
    let (m2, s2) = psi2.pi_scaled(n);
    Scaled {
        mantissa: m1[0] * m2[1] - m1[1] * m2[0],
        scale: s1 + s2,
    }
}

/// `Σ(ξ) = [[t₋, r₋], [r₊, t₊]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix {
    pub xi: C64,
    pub t_minus: C64,
    pub t_plus: C64,
    pub r_minus: C64,
    pub r_plus: C64,
}

impl ScatteringMatrix {
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.t_minus, self.r_minus, self.r_plus, self.t_plus)
    }

    pub fn det(&self) -> C64 {
        self.matrix().det()
    }

    /// `‖Σ*Σ − I‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        self.matrix().unitarity_residual()
    }
}

pub fn scattering_matrix(cs: &CoinSequence, xi: C64) -> Result<ScatteringMatrix> {
    scattering_matrix_at(cs, xi, -1)
}

/// The scattering matrix from Wronskians matched at site `n`.
pub fn scattering_matrix_at(cs: &CoinSequence, xi: C64, n: i64) -> Result<ScatteringMatrix> {
    let in_m = jost(cs, xi, JostKind::InMinus);
    let in_p = jost(cs, xi, JostKind::InPlus);
    let out_m = jost(cs, xi, JostKind::OutMinus);
    let out_p = jost(cs, xi, JostKind::OutPlus);
    let denom = wronskian(&out_m, &out_p, n);
    let nums = [
        wronskian(&in_p, &out_p, n),
        wronskian(&in_m, &out_p, n),
        wronskian(&out_m, &in_p, n),
        wronskian(&out_m, &in_m, n),
    ];
    // Mantissas of Π_n have unit max-modulus, so the denominator mantissa
    // measures how close to collinear the two outgoing solutions are.
    if !(denom.mantissa.norm() >= POLE_TOL) {
        return Err(Error::AtResonance { xi });
    }
    let [t_minus, r_minus, r_plus, t_plus] = nums.map(|w| w.ratio(&denom));
    Ok(ScatteringMatrix {
        xi,
        t_minus,
        t_plus,
        r_minus,
        r_plus,
    })
}
