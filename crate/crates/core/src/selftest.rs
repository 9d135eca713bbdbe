//! A fast invariant suite over seeded random instances and the worked examples.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::coins::CoinSequence;
use crate::expansion::{double_barrier_closed_form, expand, reconstruct};
use crate::genericity::splitting_experiment;
use crate::random::{
    random_coin_sequence, random_double_barrier, random_real_xi, random_state,
    random_window_vector, random_xi, rng_from_seed,
};
use crate::resolvent::apply_resolvent;
use crate::resonances::{find_resonances, resonant_chain, validate_multiplicity};
use crate::scattering::scattering_matrix;
use crate::states::WaveState;
use crate::transfer::transfer_polynomial;
use crate::walk::{build_k, evolve, survival_norms};
use crate::{Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Set when the check could not be evaluated.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfTestReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SelfTestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &'static str, tolerance: f64, value: Result<f64>) -> Check {
    match value {
        Ok(worst) => Check {
            name,
            worst,
            tolerance,
            passed: worst <= tolerance,
            error: None,
        },
        Err(e) => Check {
            name,
            worst: f64::NAN,
            tolerance,
            passed: false,
            error: Some(e.to_string()),
        },
    }
}

pub fn run_selftest(seed: u64) -> SelfTestReport {
    let checks = vec![
        check("scattering unitarity", 1e-10, scattering_unitarity(seed)),
        check("resonance characterizations", 1e-8, characterizations(seed)),
        check("hadamard double barrier", 1e-12, hadamard()),
        check("triple barrier polynomial", 1e-10, triple_barrier()),
        check("resonance expansion", 1e-9, expansion(seed)),
        check("double barrier closed form", 1e-10, double_barrier(seed)),
        check("resolvent identity", 1e-10, resolvent(seed)),
        check("splitting exponent", 0.05, splitting()),
        check("norm defect", 1e-12, norm_defect(seed)),
    ];
    SelfTestReport { seed, checks }
}

fn scattering_unitarity(seed: u64) -> Result<f64> {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let cs = random_coin_sequence(&mut rng, 8);
        for _ in 0..5 {
            let sm = scattering_matrix(&cs, random_real_xi(&mut rng))?;
            let flux = (sm.t_minus.norm_sqr() + sm.r_minus.norm_sqr() - 1.0)
                .abs()
                .max((sm.t_plus.norm_sqr() + sm.r_plus.norm_sqr() - 1.0).abs());
            worst = worst.max(sm.unitarity_residual()).max(flux);
        }
    }
    Ok(worst)
}

/// Polynomial roots against dense eigenvalues (inside `find_resonances`),
/// winding numbers against multiplicities, and the `λ ↦ −λ` symmetry.
fn characterizations(seed: u64) -> Result<f64> {
    let mut rng = rng_from_seed(seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let cs = random_coin_sequence(&mut rng, 6);
        let res = find_resonances(&cs)?;
        let total: usize = res.iter().map(|r| r.alg_multiplicity).sum();
        if total > 2 * cs.n0() {
            return Ok(f64::INFINITY);
        }
        for r in &res {
            if validate_multiplicity(&cs, r, &res)? != r.alg_multiplicity as i64 {
                return Ok(f64::INFINITY);
            }
            let partner = res
                .iter()
                .map(|o| (o.lambda + r.lambda).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(partner);
        }
    }
    Ok(worst)
}

fn hadamard() -> Result<f64> {
    let cs = CoinSequence::hadamard_double_barrier();
    let res = find_resonances(&cs)?;
    let mut worst = (res[0].lambda + FRAC_1_SQRT_2)
        .norm()
        .max((res[1].lambda - FRAC_1_SQRT_2).norm());
    for (t, s) in survival_norms(&WaveState::delta_l(0), &cs, 60)
        .iter()
        .enumerate()
    {
        worst = worst.max((s - 2f64.powf(-(t as f64) / 2.0)).abs());
    }
    Ok(worst)
}

fn triple_barrier() -> Result<f64> {
    let p = transfer_polynomial(&CoinSequence::triple_barrier_example())?;
    let expected = [C64::new(0.25, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
    if p.coeffs.len() != expected.len() {
        return Ok(f64::INFINITY);
    }
    Ok(p.coeffs
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

fn expansion(seed: u64) -> Result<f64> {
    let mut rng = rng_from_seed(seed.wrapping_add(2));
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let cs = random_coin_sequence(&mut rng, 6);
        let n0 = cs.n0() as i64;
        let psi0 = random_state(&mut rng, cs.n0(), 4);
        let ed = expand(&cs, &psi0)?;
        let t_max = 30;
        let chains = ed
            .blocks
            .iter()
            .map(|b| resonant_chain(&cs, &b.resonance, t_max))
            .collect::<Result<Vec<_>>>()?;
        let traj = evolve(&psi0, &cs, t_max);
        for t in ed.nu + ed.zero_part_index..=t_max {
            let s = (t - ed.nu) as i64;
            let rec = reconstruct(&ed, &chains, t, (-s, n0 + s))?;
            let scale = traj[t].max_abs(-s, n0 + s).max(f64::MIN_POSITIVE);
            worst = worst.max(rec.max_abs_diff(&traj[t], -s, n0 + s) / scale);
        }
    }
    Ok(worst)
}

fn double_barrier(seed: u64) -> Result<f64> {
    let mut rng = rng_from_seed(seed.wrapping_add(3));
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let cs = random_double_barrier(&mut rng)?;
        let psi0 = random_state(&mut rng, 1, 0);
        let db = double_barrier_closed_form(&cs)?;
        let gamma = db.gamma(&psi0);
        let ed = expand(&cs, &psi0)?;
        for block in &ed.blocks {
            let idx = if (block.resonance.lambda - db.lambda).norm() < 1e-8 {
                0
            } else {
                1
            };
            let rescaled = block.coefficients[0] * block.chain[0][3] / db.lambda;
            worst = worst.max((rescaled - gamma[idx]).norm());
        }
    }
    Ok(worst)
}

fn resolvent(seed: u64) -> Result<f64> {
    let mut rng = rng_from_seed(seed.wrapping_add(4));
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 20 {
        let cs = random_coin_sequence(&mut rng, 5);
        let f = random_state(&mut rng, cs.n0(), 3);
        let xi = random_xi(&mut rng, -1.0..1.0);
        let lambda = (-crate::I * xi).exp();
        let k = build_k(&cs)?;
        let gap = crate::linalg::eigenvalues(&k.entries)
            .iter()
            .map(|e| (e - lambda).norm())
            .fold(f64::INFINITY, f64::min);
        if gap <= 1e-3 {
            continue;
        }
        let n0 = cs.n0() as i64;
        let out = apply_resolvent(&cs, xi, &f, (-8, n0 + 8))?;
        worst = worst.max(out.residual);
        done += 1;
    }
    Ok(worst)
}

fn splitting() -> Result<f64> {
    let r = splitting_experiment(
        &CoinSequence::triple_barrier_example(),
        0.0,
        &[1e-3, 1e-4, 1e-5],
    )?;
    if !r.rows.iter().all(|row| row.all_simple) {
        return Ok(f64::INFINITY);
    }
    Ok((r.slope - 0.5).abs())
}

fn norm_defect(seed: u64) -> Result<f64> {
    let mut rng = rng_from_seed(seed.wrapping_add(5));
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let cs = random_coin_sequence(&mut rng, 8);
        let k = build_k(&cs)?;
        let v = random_window_vector(&mut rng, cs.n0());
        worst = worst.max(k.norm_defect(&cs, &v));
    }
    Ok(worst)
}
