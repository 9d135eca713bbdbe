//! Local transfer matrices `T_n(ξ)`, their product `𝕋(ξ)`, and the transfer
//! polynomial `p` in `μ = e^{−2iξ}`.

use std::ops::{Add, Mul};

use crate::coins::{Coin, CoinSequence};
use crate::linalg::Mat2;
use crate::{Error, Result, C64, I};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Relative tolerance of the polynomial relation check.
pub const RELATION_TOL: f64 = 1e-10;

/// `T(ξ) = [[e^{iξ}/ā, −c̄/ā], [−c/d, e^{−iξ}/d]]` and its inverse
/// `[[e^{−iξ}/a, −b/a], [−b̄/d̄, e^{iξ}/d̄]]`.
pub fn local_transfer(c: &Coin, xi: C64) -> (Mat2, Mat2) {
    let e = (I * xi).exp();
    let e_inv = (-I * xi).exp();
    let (a, b, cc, d) = (c.a(), c.b(), c.c(), c.d());
    let t = Mat2::new(e / a.conj(), -cc.conj() / a.conj(), -cc / d, e_inv / d);
    let t_inv = Mat2::new(e_inv / a, -b / a, -b.conj() / d.conj(), e / d.conj());
    (t, t_inv)
}

/// `𝕋(ξ) = T_0(ξ) T_1(ξ) ⋯ T_{n0}(ξ)`.
pub fn transfer_product(cs: &CoinSequence, xi: C64) -> Mat2 {
    cs.coins()
        .iter()
        .fold(Mat2::IDENTITY, |acc, c| acc * local_transfer(c, xi).0)
}

/// Laurent polynomial `Σ_k c_k z^{lo+k}` with dense coefficients.
#[derive(Debug, Clone, PartialEq)]
struct Laurent {
    lo: i32,
    coeffs: Vec<C64>,
}

impl Laurent {
    fn monomial(coef: C64, exp: i32) -> Laurent {
        Laurent {
            lo: exp,
            coeffs: vec![coef],
        }
    }

    fn zero() -> Laurent {
        Laurent {
            lo: 0,
            coeffs: Vec::new(),
        }
    }

    fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    fn coeff(&self, exp: i32) -> C64 {
        let k = exp - self.lo;
        if k < 0 || k >= self.coeffs.len() as i32 {
            ZERO
        } else {
            self.coeffs[k as usize]
        }
    }
}

impl Add for &Laurent {
    type Output = Laurent;

    fn add(self, rhs: &Laurent) -> Laurent {
        if self.coeffs.is_empty() {
            return rhs.clone();
        }
        if rhs.coeffs.is_empty() {
            return self.clone();
        }
        let lo = self.lo.min(rhs.lo);
        let hi = self.hi().max(rhs.hi());
        let coeffs = (lo..=hi).map(|e| self.coeff(e) + rhs.coeff(e)).collect();
        Laurent { lo, coeffs }
    }
}

impl Mul for &Laurent {
    type Output = Laurent;

    fn mul(self, rhs: &Laurent) -> Laurent {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Laurent::zero();
        }
        let mut coeffs = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            for (j, y) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += x * y;
            }
        }
        Laurent {
            lo: self.lo + rhs.lo,
            coeffs,
        }
    }
}

type LaurentMat = [[Laurent; 2]; 2];

fn laurent_mat_mul(x: &LaurentMat, y: &LaurentMat) -> LaurentMat {
    let entry = |r: usize, c: usize| &(&x[r][0] * &y[0][c]) + &(&x[r][1] * &y[1][c]);
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

/// `T(ξ)` as a Laurent matrix in `z = e^{−iξ}`.
fn local_transfer_laurent(c: &Coin) -> LaurentMat {
    let (a, cc, d) = (c.a(), c.c(), c.d());
    [
        [
            Laurent::monomial(a.conj().inv(), -1),
            Laurent::monomial(-cc.conj() / a.conj(), 0),
        ],
        [Laurent::monomial(-cc / d, 0), Laurent::monomial(d.inv(), 1)],
    ]
}

/// The polynomial `p` of degree `n0` with `e^{−i(n0+1)ξ} 𝕋₂₂(ξ) = μ p(μ)`, `μ = e^{−2iξ}`.
///
/// Stored monic; the leading coefficient of the unnormalized `p` is kept in `leading`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferPolynomial {
    /// Monic coefficients, lowest degree first.
    pub coeffs: Vec<C64>,
    pub leading: C64,
}

impl TransferPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Monic `p(μ)`.
    pub fn eval(&self, mu: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * mu + c)
    }

    /// `p(μ)` with its original normalization.
    pub fn eval_unnormalized(&self, mu: C64) -> C64 {
        self.leading * self.eval(mu)
    }

    /// Unnormalized coefficients, lowest degree first.
    pub fn unnormalized_coeffs(&self) -> Vec<C64> {
        self.coeffs.iter().map(|c| c * self.leading).collect()
    }

    /// Relative residual of the defining relation at `ξ`.
    pub fn relation_residual(&self, cs: &CoinSequence, xi: C64) -> f64 {
        let n0 = cs.n0();
        let z = (-I * xi).exp();
        let mu = z * z;
        let prefactor = z.powu(n0 as u32 + 1);
        let lhs = prefactor * transfer_product(cs, xi).get(1, 1);
        let rhs = mu * self.eval_unnormalized(mu);
        // size of the terms entering either side, to make the residual relative
        let mut scale: f64 = self
            .unnormalized_coeffs()
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm() * mu.norm().powi(j as i32 + 1))
            .sum();
        let product_bound: f64 = cs
            .coins()
            .iter()
            .map(|c| frobenius(&local_transfer(c, xi).0))
            .product();
        scale = scale.max(prefactor.norm() * product_bound);
        (lhs - rhs).norm() / scale
    }
}

fn frobenius(m: &Mat2) -> f64 {
    m.0.iter()
        .flatten()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Deterministic check points for the relation: real and complex `ξ`.
fn check_points() -> impl Iterator<Item = C64> {
    (0..20).map(|k| {
        let re = -3.0 + 0.3137 * k as f64;
        let im = if k % 2 == 0 {
            0.0
        } else {
            0.45 * ((k as f64) * 0.7).sin()
        };
        C64::new(re, im)
    })
}

pub fn transfer_polynomial(cs: &CoinSequence) -> Result<TransferPolynomial> {
    let n0 = cs.n0();
    let product = cs
        .coins()
        .iter()
        .map(local_transfer_laurent)
        .reduce(|acc, t| laurent_mat_mul(&acc, &t))
        .expect("coin sequences are nonempty");
    // z^{n0+1} 𝕋₂₂ = z² p(z²)
    let shift = n0 as i32 + 1;
    let raw: Vec<C64> = (0..=n0)
        .map(|j| product[1][1].coeff(2 * j as i32 + 2 - shift))
        .collect();
    let leading = raw[n0];
    let coeffs = raw.iter().map(|c| c / leading).collect();
    let poly = TransferPolynomial { coeffs, leading };
    let worst = check_points()
        .map(|xi| poly.relation_residual(cs, xi))
        .fold(0.0, f64::max);
    if !(worst <= RELATION_TOL) {
        return Err(Error::RelationCheckFailed { residual: worst });
    }
    Ok(poly)
}
