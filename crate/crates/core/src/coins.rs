//! Quantum coins, coin sequences, and the `(p, q, θ)` parameterization of the
//! coin group together with its group product.

use std::f64::consts::PI;

use crate::linalg::Mat2;
use crate::{Error, Result, C64};

/// Tolerance on `‖U*U − I‖_F` for accepting a coin.
pub const UNITARITY_TOL: f64 = 1e-12;
/// `|a|` at or below this is treated as zero.
pub const A2_TOL: f64 = 1e-14;
/// Accepted deviation of `|p|² − |q|²` from one when building `S` or `T`.
pub const HYPERBOLOID_TOL: f64 = 1e-8;

/// A 2×2 unitary coin `[[a, b], [c, d]]` with `a ≠ 0`.
///
/// Construct through [`validate_coin`] (or the named constructors); the
/// entries are never modified afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coin {
    a: C64,
    b: C64,
    c: C64,
    d: C64,
}

/// Accepts a 2×2 matrix as a coin if it is unitary and its upper-left entry is nonzero.
pub fn validate_coin(m: [[C64; 2]; 2]) -> Result<Coin> {
    let residual = Mat2(m).unitarity_residual();
    if !residual.is_finite() || residual > UNITARITY_TOL {
        return Err(Error::NotUnitary {
            residual: if residual.is_finite() {
                residual
            } else {
                f64::INFINITY
            },
        });
    }
    if m[0][0].norm() <= A2_TOL {
        return Err(Error::A2Violated);
    }
    Ok(Coin {
        a: m[0][0],
        b: m[0][1],
        c: m[1][0],
        d: m[1][1],
    })
}

impl Coin {
    pub const IDENTITY: Coin = Coin {
        a: C64::new(1.0, 0.0),
        b: C64::new(0.0, 0.0),
        c: C64::new(0.0, 0.0),
        d: C64::new(1.0, 0.0),
    };

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Coin> {
        validate_coin([[a, b], [c, d]])
    }

    /// Real rotation with `a = d = √(1 − r²)`, `b = r`, `c = −r`.
    pub fn rotation(r: f64) -> Result<Coin> {
        if !(r.is_finite() && r.abs() < 1.0) {
            return Err(Error::A2Violated);
        }
        let a = (1.0 - r * r).sqrt();
        Coin::new(a.into(), r.into(), (-r).into(), a.into())
    }

    pub fn hadamard() -> Coin {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Coin::new(s.into(), s.into(), s.into(), (-s).into()).expect("Hadamard is a valid coin")
    }

    /// `e^{iδ} [[e^{iα} cos θ, e^{iβ} sin θ], [−e^{−iβ} sin θ, e^{−iα} cos θ]]`.
    pub fn from_angles(theta: f64, alpha: f64, beta: f64, delta: f64) -> Result<Coin> {
        let g = C64::from_polar(1.0, delta);
        let (s, c) = theta.sin_cos();
        Coin::new(
            g * C64::from_polar(c, alpha),
            g * C64::from_polar(s, beta),
            -g * C64::from_polar(s, -beta),
            g * C64::from_polar(c, -alpha),
        )
    }

    #[inline]
    pub fn a(&self) -> C64 {
        self.a
    }
    #[inline]
    pub fn b(&self) -> C64 {
        self.b
    }
    #[inline]
    pub fn c(&self) -> C64 {
        self.c
    }
    #[inline]
    pub fn d(&self) -> C64 {
        self.d
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.a, self.b, self.c, self.d)
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn is_diagonal(&self) -> bool {
        self.b.norm() <= A2_TOL && self.c.norm() <= A2_TOL
    }

    pub fn is_identity(&self) -> bool {
        *self == Coin::IDENTITY
    }
}

/// Coins on the sites `0..=n0`; every other site carries the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinSequence {
    coins: Vec<Coin>,
}

impl CoinSequence {
    pub fn new(coins: Vec<Coin>) -> Result<CoinSequence> {
        if coins.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(CoinSequence { coins })
    }

    /// Two Hadamard coins on sites 0 and 1.
    pub fn hadamard_double_barrier() -> CoinSequence {
        CoinSequence {
            coins: vec![Coin::hadamard(); 2],
        }
    }

    /// Rotations with `r = 3/4, 12/13, 1/3`: a triple barrier with a doubly degenerate resonance pair.
    pub fn triple_barrier_example() -> CoinSequence {
        let coins = [0.75, 12.0 / 13.0, 1.0 / 3.0]
            .iter()
            .map(|&r| Coin::rotation(r).expect("valid rotation"))
            .collect();
        CoinSequence { coins }
    }

    pub fn free(n0: usize) -> CoinSequence {
        CoinSequence {
            coins: vec![Coin::IDENTITY; n0 + 1],
        }
    }

    #[inline]
    pub fn n0(&self) -> usize {
        self.coins.len() - 1
    }

    pub fn coins(&self) -> &[Coin] {
        &self.coins
    }

    /// The coin at site `n` (identity outside `0..=n0`).
    #[inline]
    pub fn coin(&self, n: i64) -> Coin {
        if n < 0 {
            return Coin::IDENTITY;
        }
        self.coins
            .get(n as usize)
            .copied()
            .unwrap_or(Coin::IDENTITY)
    }

    pub fn with_coin(&self, n: usize, coin: Coin) -> CoinSequence {
        let mut coins = self.coins.clone();
        coins[n] = coin;
        CoinSequence { coins }
    }
}

/// Coordinates `(p, q, θ)` on the coin group, `|p|² − |q|² = 1`, `θ ∈ [0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PQTheta {
    pub p: C64,
    pub q: C64,
    pub theta: f64,
}

impl PQTheta {
    pub fn hyperboloid_deviation(&self) -> f64 {
        (self.p.norm_sqr() - self.q.norm_sqr() - 1.0).abs()
    }

    /// Canonical representative of `(p, q, θ) ∼ (−p, −q, θ − π)` with `θ ∈ [0, π)`.
    pub fn canonical(self) -> PQTheta {
        let mut x = self;
        x.theta = x.theta.rem_euclid(2.0 * PI);
        if x.theta >= PI {
            x.theta -= PI;
            x.p = -x.p;
            x.q = -x.q;
        }
        if x.theta >= PI {
            // rem_euclid can round up to exactly 2π - ulp
            x.theta = 0.0;
        }
        x
    }

    fn checked(&self) -> Result<PQTheta> {
        let deviation = self.hyperboloid_deviation();
        if !deviation.is_finite() || deviation > HYPERBOLOID_TOL {
            return Err(Error::ConstraintViolated {
                deviation: if deviation.is_finite() {
                    deviation
                } else {
                    f64::INFINITY
                },
            });
        }
        // Put p exactly on the hyperboloid, keeping its phase.
        let modulus = (1.0 + self.q.norm_sqr()).sqrt();
        let p = if self.p.norm() == 0.0 {
            C64::new(modulus, 0.0)
        } else {
            self.p * (modulus / self.p.norm())
        };
        Ok(PQTheta { p, ..*self })
    }
}

pub fn coin_to_pqtheta(c: &Coin) -> PQTheta {
    let theta = (c.a / c.d).arg() / 2.0;
    // p = e^{−iθ}/ā so that e^{iθ}/p̄ reproduces a exactly in phase.
    let p = C64::from_polar(1.0 / c.a.norm(), c.a.arg() - theta);
    let q = c.b.conj() * p;
    PQTheta { p, q, theta }.canonical()
}

/// `S_{p,q,θ} = p̄⁻¹ [[e^{iθ}, q̄], [−q, e^{−iθ}]]`.
pub fn pqtheta_to_s(x: &PQTheta) -> Result<Coin> {
    let x = x.checked()?;
    let inv = x.p.conj().inv();
    let e = C64::from_polar(1.0, x.theta);
    validate_coin([[inv * e, inv * x.q.conj()], [-inv * x.q, inv * e.conj()]])
}

/// `T_{p,q,θ} = e^{iθ} [[p, q̄], [q, p̄]]`.
pub fn pqtheta_to_t(x: &PQTheta) -> Result<Mat2> {
    let x = x.checked()?;
    let e = C64::from_polar(1.0, x.theta);
    Ok(Mat2::new(e * x.p, e * x.q.conj(), e * x.q, e * x.p.conj()))
}

/// The inverse of the group isomorphism from transfer matrices to coins:
/// `[[1/ā, b/d], [b̄/ā, 1/d]]`.
pub fn coin_to_transfer(c: &Coin) -> Mat2 {
    Mat2::new(
        c.a.conj().inv(),
        c.b / c.d,
        c.b.conj() / c.a.conj(),
        c.d.inv(),
    )
}

/// Reads `(p, q, θ)` off a matrix of the form `e^{iθ} [[p, q̄], [q, p̄]]`.
pub fn transfer_to_pqtheta(t: &Mat2) -> PQTheta {
    // det T = e^{2iθ}(|p|² − |q|²) = e^{2iθ}
    let theta = t.det().arg() / 2.0;
    let phase = C64::from_polar(1.0, -theta);
    PQTheta {
        p: t.get(0, 0) * phase,
        q: t.get(1, 0) * phase,
        theta,
    }
    .canonical()
}

pub fn transfer_to_coin(t: &Mat2) -> Result<Coin> {
    let x = transfer_to_pqtheta(t);
    if !x.p.is_finite() || x.p.norm() == 0.0 || (1.0 / x.p.norm()) <= A2_TOL {
        return Err(Error::ProductLeavesS);
    }
    pqtheta_to_s(&x)
}

/// Group product on coins, transported from the matrix product of transfer matrices.
pub fn s_product(s1: &Coin, s2: &Coin) -> Result<Coin> {
    let t = coin_to_transfer(s1) * coin_to_transfer(s2);
    transfer_to_coin(&t).map_err(|e| match e {
        Error::A2Violated => Error::ProductLeavesS,
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn coin_diff(x: &Coin, y: &Coin) -> f64 {
        x.matrix().max_abs_diff(&y.matrix())
    }

    fn arb_coin() -> impl Strategy<Value = Coin> {
        (0.0..1.5f64, -PI..PI, -PI..PI, -PI..PI)
            .prop_map(|(t, a, b, d)| Coin::from_angles(t, a, b, d).unwrap())
    }

    #[test]
    fn identity_is_accepted_bit_exact() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let coin = validate_coin([[one, zero], [zero, one]]).unwrap();
        assert_eq!(coin, Coin::IDENTITY);
    }

    #[test]
    fn swap_violates_a2() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert_eq!(
            validate_coin([[zero, one], [one, zero]]),
            Err(Error::A2Violated)
        );
    }

    #[test]
    fn non_unitary_rejected() {
        let m = [[c(1.0, 0.0), c(0.1, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(validate_coin(m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn three_quarter_rotation_accepted() {
        let s7 = 7f64.sqrt() / 4.0;
        let m = [[c(s7, 0.0), c(0.75, 0.0)], [c(-0.75, 0.0), c(s7, 0.0)]];
        let coin = validate_coin(m).unwrap();
        assert_eq!(coin.a(), c(s7, 0.0));
        assert_eq!(coin.b(), c(0.75, 0.0));
        assert_eq!(coin, Coin::rotation(0.75).unwrap());
    }

    #[test]
    fn pqtheta_of_identity() {
        let x = coin_to_pqtheta(&Coin::IDENTITY);
        assert_eq!(x.p, c(1.0, 0.0));
        assert_eq!(x.q, c(0.0, 0.0));
        assert_eq!(x.theta, 0.0);
        let s = pqtheta_to_s(&x).unwrap();
        let t = pqtheta_to_t(&x).unwrap();
        assert!(coin_diff(&s, &Coin::IDENTITY) < 1e-15);
        assert!(t.max_abs_diff(&Mat2::IDENTITY) < 1e-15);
    }

    #[test]
    fn pqtheta_of_hadamard() {
        // a/d = −1: θ = π/2, p = √2 e^{−iπ/2}, q = b̄ p
        let x = coin_to_pqtheta(&Coin::hadamard());
        assert!((x.p - c(0.0, -(2f64.sqrt()))).norm() < 1e-15);
        assert!((x.q - c(0.0, -1.0)).norm() < 1e-15);
        assert!((x.theta - PI / 2.0).abs() < 1e-15);
        assert!(x.hyperboloid_deviation() < 1e-14);
    }

    #[test]
    fn pqtheta_of_rotation() {
        for r in [0.1, 0.5, 0.75, 12.0 / 13.0] {
            let x = coin_to_pqtheta(&Coin::rotation(r).unwrap());
            let s = (1.0 - r * r).sqrt();
            assert!((x.p - c(1.0 / s, 0.0)).norm() < 1e-14);
            assert!((x.q - c(r / s, 0.0)).norm() < 1e-14);
            assert_eq!(x.theta, 0.0);
        }
    }

    #[test]
    fn s_from_sqrt2_one_zero() {
        let x = PQTheta {
            p: c(2f64.sqrt(), 0.0),
            q: c(1.0, 0.0),
            theta: 0.0,
        };
        let s = pqtheta_to_s(&x).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = Mat2::new(c(h, 0.0), c(h, 0.0), c(-h, 0.0), c(h, 0.0));
        assert!(s.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn constraint_violation_detected() {
        let x = PQTheta {
            p: c(1.0, 0.0),
            q: c(0.5, 0.0),
            theta: 0.0,
        };
        assert!(matches!(
            pqtheta_to_s(&x),
            Err(Error::ConstraintViolated { .. })
        ));
        assert!(matches!(
            pqtheta_to_t(&x),
            Err(Error::ConstraintViolated { .. })
        ));
    }

    #[test]
    fn rotation_product_is_velocity_addition() {
        // Rotation transfer matrices are [[1, r], [r, 1]]/a, so products add
        // the parameters like tanh: r = (r1 + r2)/(1 + r1 r2).
        for (r1, r2) in [(0.3, 0.5), (0.75, -0.2), (12.0 / 13.0, 1.0 / 3.0)] {
            let prod =
                s_product(&Coin::rotation(r1).unwrap(), &Coin::rotation(r2).unwrap()).unwrap();
            let expected = Coin::rotation((r1 + r2) / (1.0 + r1 * r2)).unwrap();
            assert!(coin_diff(&prod, &expected) < 1e-12, "{r1} {r2}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn coin_entries_have_matching_moduli(coin in arb_coin()) {
            prop_assert!((coin.a().norm() - coin.d().norm()).abs() < 1e-12);
            prop_assert!((coin.b().norm() - coin.c().norm()).abs() < 1e-12);
        }

        #[test]
        fn pqtheta_roundtrip(coin in arb_coin()) {
            let x = coin_to_pqtheta(&coin);
            prop_assert!(x.hyperboloid_deviation() < 1e-10);
            prop_assert!((0.0..PI).contains(&x.theta));
            let back = pqtheta_to_s(&x).unwrap();
            prop_assert!(coin_diff(&back, &coin) < 1e-12);
        }

        #[test]
        fn transfer_map_is_invertible(coin in arb_coin()) {
            let back = transfer_to_coin(&coin_to_transfer(&coin)).unwrap();
            prop_assert!(coin_diff(&back, &coin) < 1e-12);
            let t = pqtheta_to_t(&coin_to_pqtheta(&coin)).unwrap();
            prop_assert!(t.max_abs_diff(&coin_to_transfer(&coin)) < 1e-12);
        }

        #[test]
        fn identity_is_neutral(coin in arb_coin()) {
            let left = s_product(&Coin::IDENTITY, &coin).unwrap();
            let right = s_product(&coin, &Coin::IDENTITY).unwrap();
            prop_assert!(coin_diff(&left, &coin) < 1e-12);
            prop_assert!(coin_diff(&right, &coin) < 1e-12);
        }

        #[test]
        fn product_is_associative(x in arb_coin(), y in arb_coin(), z in arb_coin()) {
            let lhs = s_product(&s_product(&x, &y).unwrap(), &z).unwrap();
            let rhs = s_product(&x, &s_product(&y, &z).unwrap()).unwrap();
            // entries scale with |p| of the product; compare relative to it
            let scale = coin_to_pqtheta(&lhs).p.norm().max(1.0);
            prop_assert!(coin_diff(&lhs, &rhs) < 1e-12 * scale * scale);
        }
    }
}
