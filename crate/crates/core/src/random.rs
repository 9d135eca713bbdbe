//! Seeded random coins, coin sequences and finitely supported states.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coins::{Coin, CoinSequence};
use crate::states::WaveState;
use crate::{Result, C64};

/// Mixing angles stay this far from `0` and `π/2`, keeping coins away from
/// diagonal and anti-diagonal ones.
pub const ANGLE_MARGIN: f64 = 0.05;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_coin<R: Rng + ?Sized>(rng: &mut R) -> Coin {
    let theta = rng.random_range(ANGLE_MARGIN..FRAC_PI_2 - ANGLE_MARGIN);
    let alpha = rng.random_range(-PI..PI);
    let beta = rng.random_range(-PI..PI);
    let delta = rng.random_range(-PI..PI);
    Coin::from_angles(theta, alpha, beta, delta).expect("angles away from pi/2 give a valid coin")
}

/// A sequence with `n0` drawn uniformly from `1..=n0_max`.
pub fn random_coin_sequence<R: Rng + ?Sized>(rng: &mut R, n0_max: usize) -> CoinSequence {
    let n0 = rng.random_range(1..=n0_max.max(1));
    random_coin_sequence_exact(rng, n0)
}

pub fn random_coin_sequence_exact<R: Rng + ?Sized>(rng: &mut R, n0: usize) -> CoinSequence {
    let coins = (0..=n0).map(|_| random_coin(rng)).collect();
    CoinSequence::new(coins).expect("sequence is nonempty")
}

/// A unit-norm state with incoming length at most `nu_max`, random amplitudes
/// on `[0, n0]`, and some outgoing amplitude on either side.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n0: usize, nu_max: usize) -> WaveState {
    let n0 = n0 as i64;
    // incoming length is 0 or at least 2
    let extent = |rng: &mut R| -> i64 {
        if nu_max < 2 {
            0
        } else {
            let nu = rng.random_range(0..=nu_max as i64);
            if nu < 2 {
                0
            } else {
                nu - 1
            }
        }
    };
    let (left, right) = (extent(rng), extent(rng));
    let out_left = rng.random_range(0..=2i64);
    let out_right = rng.random_range(0..=2i64);
    let lo = -(left.max(out_left));
    let hi = n0 + right.max(out_right);
    let mut psi = WaveState::zeros(lo, hi);
    for n in lo..=hi {
        let mut v = [C64::new(0.0, 0.0); 2];
        if (0..=n0).contains(&n) {
            v = [random_complex(rng), random_complex(rng)];
        } else if n < 0 {
            if -n <= out_left {
                v[0] = random_complex(rng);
            }
            if -n <= left {
                v[1] = random_complex(rng);
            }
        } else {
            if n - n0 <= right {
                v[0] = random_complex(rng);
            }
            if n - n0 <= out_right {
                v[1] = random_complex(rng);
            }
        }
        psi.set(n, v);
    }
    let norm = psi.norm();
    if norm > 0.0 {
        psi = psi.scaled(C64::new(1.0 / norm, 0.0));
    }
    psi.trimmed()
}

/// A random flat vector on `[0, n0]`.
pub fn random_window_vector<R: Rng + ?Sized>(rng: &mut R, n0: usize) -> crate::linalg::CVector {
    crate::linalg::CVector::from_fn(2 * (n0 + 1), |_, _| random_complex(rng))
}

/// A random `ξ` with `Re ξ ∈ [−π, π)` and `Im ξ` in the given range.
pub fn random_xi<R: Rng + ?Sized>(rng: &mut R, im: std::ops::Range<f64>) -> C64 {
    C64::new(rng.random_range(-PI..PI), rng.random_range(im))
}

pub fn random_real_xi<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-PI..PI), 0.0)
}

/// Two non-diagonal coins, the setting of the double-barrier closed form.
pub fn random_double_barrier<R: Rng + ?Sized>(rng: &mut R) -> Result<CoinSequence> {
    CoinSequence::new(vec![random_coin(rng), random_coin(rng)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::incoming_length;
    use proptest::prelude::*;

    #[test]
    fn seeds_are_reproducible() {
        let a = random_coin_sequence(&mut rng_from_seed(7), 6);
        let b = random_coin_sequence(&mut rng_from_seed(7), 6);
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn coins_are_valid_and_off_diagonal(seed in any::<u64>()) {
            let coin = random_coin(&mut rng_from_seed(seed));
            prop_assert!(coin.matrix().unitarity_residual() < 1e-12);
            prop_assert!(!coin.is_diagonal());
        }

        #[test]
        fn states_respect_incoming_bound(seed in any::<u64>(), n0 in 1usize..7, nu in 0usize..6) {
            let psi = random_state(&mut rng_from_seed(seed), n0, nu);
            prop_assert!(incoming_length(&psi, n0) <= nu);
            prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }
}
