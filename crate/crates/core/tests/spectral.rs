use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;

use qwres::genericity::{choose_direction, perturb, splitting_experiment};
use qwres::random::{
    random_coin, random_coin_sequence, random_coin_sequence_exact, random_state, rng_from_seed,
};
use qwres::resolvent::apply_resolvent;
use qwres::resonances::find_resonances;
use qwres::scattering::scattering_matrix;
use qwres::transfer::{local_transfer, transfer_polynomial};
use qwres::{CoinSequence, Error, WaveState};

const I: C64 = C64::new(0.0, 1.0);

/// `ξ` approaching `target` along a fixed direction, `dist` apart in `λ = e^{−iξ}`.
fn approach(target: C64, lambda_dist: f64) -> C64 {
    let lambda = (-I * target).exp();
    let shifted = lambda * (1.0 + lambda_dist / lambda.norm());
    I * shifted.ln()
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    (ys[ys.len() - 1].ln() - ys[0].ln()) / (xs[xs.len() - 1].ln() - xs[0].ln())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polynomial_relation_holds_off_the_axis(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let cs = random_coin_sequence(&mut rng, 8);
        let p = transfer_polynomial(&cs).unwrap();
        prop_assert_eq!(p.degree(), cs.n0());
        for _ in 0..10 {
            let xi = C64::new(rng.random_range(-3.0..3.0), rng.random_range(-1.5..1.5));
            prop_assert!(p.relation_residual(&cs, xi) < 1e-10);
        }
    }

    #[test]
    fn local_transfer_determinant_is_constant(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let coin = random_coin(&mut rng);
        let d1 = local_transfer(&coin, C64::new(rng.random_range(-3.0..3.0), 0.0)).0.det();
        let d2 = local_transfer(&coin, C64::new(rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0))).0.det();
        prop_assert!((d1 - d2).norm() < 1e-12);
        prop_assert!((d1.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simple_resonances_stay_simple_under_small_perturbations(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let cs = random_coin_sequence_exact(&mut rng, 3);
        let base = find_resonances(&cs).unwrap();
        let min_gap = base
            .iter()
            .enumerate()
            .flat_map(|(i, a)| base[i + 1..].iter().map(move |b| (a.mu - b.mu).norm()))
            .filter(|d| *d > 1e-12)
            .fold(f64::INFINITY, f64::min);
        prop_assume!(base.iter().all(|r| r.alg_multiplicity == 1) && min_gap > 1e-2);
        let moved = find_resonances(&perturb(&cs, 1e-6, 0.3).unwrap()).unwrap();
        prop_assert_eq!(moved.len(), base.len());
        prop_assert!(moved.iter().all(|r| r.alg_multiplicity == 1));
        for r in &base {
            let shift = moved.iter().map(|m| (m.mu - r.mu).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(shift < 1e-3);
        }
    }
}

#[test]
fn scattering_determinant_blows_up_at_a_resonance() {
    let cs = CoinSequence::new(vec![
        qwres::Coin::from_angles(0.7, 0.4, -1.2, 0.3).unwrap(),
        qwres::Coin::rotation(0.5).unwrap(),
        qwres::Coin::from_angles(1.1, -0.6, 2.2, -0.9).unwrap(),
    ])
    .unwrap();
    let res = find_resonances(&cs).unwrap();
    let target = res[0].xi;
    let dists = [1e-3, 1e-4, 1e-5, 1e-6];
    let dets: Vec<f64> = dists
        .iter()
        .map(|&d| {
            scattering_matrix(&cs, approach(target, d))
                .unwrap()
                .det()
                .norm()
        })
        .collect();
    for w in dets.windows(2) {
        assert!(w[1] > w[0], "{dets:?}");
    }
    let slope = log_slope(&dists, &dets);
    assert!((slope + 1.0).abs() < 0.05, "{slope}");
    assert!(matches!(
        scattering_matrix(&cs, target),
        Err(Error::AtResonance { .. })
    ));
}

#[test]
fn resolvent_condition_grows_like_inverse_distance() {
    let cs = CoinSequence::hadamard_double_barrier();
    let res = find_resonances(&cs).unwrap();
    let f = WaveState::delta_r(0);
    let dists = [1e-3, 1e-4, 1e-5, 1e-6];
    let conds: Vec<f64> = dists
        .iter()
        .map(|&d| {
            apply_resolvent(&cs, approach(res[1].xi, d), &f, (-4, 5))
                .unwrap()
                .condition_number
        })
        .collect();
    for w in conds.windows(2) {
        assert!(w[1] > w[0]);
    }
    let slope = log_slope(&dists, &conds);
    assert!((slope + 1.0).abs() < 0.05, "{slope}");
}

#[test]
fn resolvent_of_random_state_on_the_real_axis() {
    let mut rng = rng_from_seed(21);
    let cs = random_coin_sequence_exact(&mut rng, 4);
    let f = random_state(&mut rng, 4, 3);
    let out = apply_resolvent(&cs, C64::new(0.8, 0.0), &f, (-15, 19)).unwrap();
    assert!(out.residual < 1e-10);
}

#[test]
fn splitting_rows_and_direction_sweep() {
    let cs = CoinSequence::triple_barrier_example();
    let r = splitting_experiment(&cs, 0.0, &[0.0, 1e-3, 1e-4, 1e-5]).unwrap();
    assert_eq!(r.rows[0].gap, 0.0);
    assert!(r.rows[1..]
        .iter()
        .all(|row| row.all_simple && row.total_multiplicity == 4));
    // gaps shrink by √10 per decade
    for w in r.rows[1..].windows(2) {
        let ratio = w[0].gap / w[1].gap;
        assert!((ratio - 10f64.sqrt()).abs() < 0.1, "{ratio}");
    }
    let chosen = choose_direction(&cs, &[1e-3, 1e-4]).unwrap();
    assert!((chosen.slope - 0.5).abs() < 0.05);
}
