use std::fs;
use std::io::Write;
use std::path::Path;

use qwres::config::{parse_config, parse_eps_list, parse_xi_grid, RunConfig};
use qwres::expansion::{decay_fit, expand};
use qwres::genericity::{choose_direction, splitting_experiment};
use qwres::resolvent::apply_resolvent;
use qwres::resonances::find_resonances;
use qwres::scattering::scattering_matrix;
use qwres::selftest::run_selftest;
use qwres::states::incoming_length;
use qwres::transfer::transfer_polynomial;
use qwres::walk::{evolve, survival_norm, survival_norms};
use qwres::{Error, Resonance, WaveState, C64};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::output::{cx, emit, field, num, sibling, to_csv, to_json};
use crate::{CliError, Command, Io};

const DEFAULT_T: usize = 40;
const DEFAULT_WINDOW: usize = 10;
const DEFAULT_EPS: [f64; 3] = [1e-3, 1e-4, 1e-5];
/// Fits start this many steps after the state has entered the compressed regime.
const FIT_OFFSET: usize = 5;

type Raw = Box<RawValue>;

pub(crate) fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Validate(io) => validate(&io, stdout),
        Command::Resonances(io) => resonances(&io, stdout),
        Command::Polynomial(io) => polynomial(&io, stdout),
        Command::Scattering { io, xi_grid } => scattering(&io, xi_grid.as_deref(), stdout),
        Command::Evolve { io, t_max } => evolve_cmd(&io, t_max, stdout),
        Command::Expand(io) => expand_cmd(&io, stdout),
        Command::Survival { io, t_max, fit } => survival(&io, t_max, fit, stdout),
        Command::ResolventCheck {
            io,
            xi_grid,
            window,
        } => resolvent_check(&io, xi_grid.as_deref(), window, stdout),
        Command::Split { io, eps, phi } => split(&io, eps.as_deref(), phi, stdout),
        Command::Selftest { seed, out } => selftest(seed.unwrap_or(0), out.as_deref(), stdout),
    }
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn state_or_default(cfg: &RunConfig) -> WaveState {
    cfg.state.clone().unwrap_or_else(|| WaveState::delta_l(0))
}

fn grid(cfg: &RunConfig, flag: Option<&str>) -> Result<Vec<C64>, CliError> {
    match (flag, &cfg.xi_grid) {
        (Some(text), _) => Ok(parse_xi_grid(text)?),
        (None, Some(g)) => Ok(g.clone()),
        (None, None) => {
            Err(Error::InvalidArgument("no xi grid: pass --xi-grid or set xi_grid".into()).into())
        }
    }
}

/// Thread pool honouring `QWRES_THREADS`.
fn pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("QWRES_THREADS") {
        let n = v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("QWRES_THREADS = `{v}` is not a positive integer"))
            })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")).into())
}

#[derive(Serialize)]
struct ResonanceOut {
    xi: Raw,
    lambda: Raw,
    mu: Raw,
    multiplicity: usize,
}

impl From<&Resonance> for ResonanceOut {
    fn from(r: &Resonance) -> Self {
        ResonanceOut {
            xi: cx(r.xi),
            lambda: cx(r.lambda),
            mu: cx(r.mu),
            multiplicity: r.alg_multiplicity,
        }
    }
}

#[derive(Serialize)]
struct ValidateOut {
    n0: usize,
    polynomial_degree: usize,
    resonance_count: usize,
    total_multiplicity: usize,
    state_norm: Raw,
    incoming_length: usize,
}

fn validate(io: &Io, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(&io.config)?;
    let n0 = cfg.coins.n0();
    let p = transfer_polynomial(&cfg.coins)?;
    let res = find_resonances(&cfg.coins)?;
    let psi = state_or_default(&cfg);
    let out = ValidateOut {
        n0,
        polynomial_degree: p.degree(),
        resonance_count: res.len(),
        total_multiplicity: res.iter().map(|r| r.alg_multiplicity).sum(),
        state_norm: num(psi.norm()),
        incoming_length: incoming_length(&psi, n0),
    };
    emit(io.out.as_deref(), stdout, &to_json(&out))
}

fn resonances(io: &Io, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(&io.config)?;
    let res = find_resonances(&cfg.coins)?;
    let out: Vec<ResonanceOut> = res.iter().map(ResonanceOut::from).collect();
    emit(io.out.as_deref(), stdout, &to_json(&out))
}

fn polynomial(io: &Io, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(&io.config)?;
    let p = transfer_polynomial(&cfg.coins)?;
    let out: Vec<Raw> = p.coeffs.iter().map(|&c| cx(c)).collect();
    emit(io.out.as_deref(), stdout, &to_json(&out))
}

fn scattering(io: &Io, flag: Option<&str>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(&io.config)?;
    let xis = grid(&cfg, flag)?;
    let cs = &cfg.coins;
    let rows: Vec<Vec<String>> = pool()?.install(|| {
        xis.par_iter()
            .map(|&xi| {
                // poles of the continuation are reported as nan rows
                let (t2, r2, unit) = match scattering_matrix(cs, xi) {
                    Ok(s) => (
                        s.t_minus.norm_sqr(),
                        s.r_minus.norm_sqr(),
                        s.unitarity_residual(),
                    ),
                    Err(_) => (f64::NAN, f64::NAN, f64::NAN),
                };
                vec![
                    field(xi.re),
                    field(xi.im),
                    field(t2),
                    field(r2),
                    field(unit),
                ]
            })
            .collect()
    });
    let header = [
        "xi_re",
        "xi_im",
        "t_minus_sq",
        "r_minus_sq",
        "unitarity_residual",
    ];
    emit(io.out.as_deref(), stdout, &to_csv(&header, rows))
}

fn evolve_cmd(io: &Io, t_max: Option<usize>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(&io.config)?;
    let t_max = t_max.or(cfg.t_max).unwrap_or(DEFAULT_T);
    let traj = evolve(&state_or_default(&cfg), &cfg.coins, t_max);
    let mut rows = Vec::new();
    for (t, psi) in traj.iter().enumerate() {
        for (n, v) in psi.trimmed().iter() {
            for (label, a) in [("L", v[0]), ("R", v[1])] {
                rows.push(vec![
                    t.to_string(),
                    n.to_string(),
                    label.to_string(),
                    field(a.re),
                    field(a.im),
                ]);
            }
        }
    }
    let amplitudes = to_csv(&["t", "n", "chirality", "re", "im"], rows);
    emit(io.out.as_deref(), stdout, &amplitudes)?;
    if let Some(out) = &io.out {
        let norms = survival_norm(&traj, cfg.coins.n0());
        let summary = survival_csv(&norms);
        emit(Some(&sibling(out, "summary")), stdout, &summary)?;
    }
    Ok(())
}

fn survival_csv(norms: &[f64]) -> Vec<u8> {
    to_csv(
        &["t", "survival_norm"],
        norms
            .iter()
            .enumerate()
            .map(|(t, &s)| vec![t.to_string(), field(s)]),
    )
}

#[derive(Serialize)]
struct BlockOut {
    #[serde(flatten)]
    resonance: ResonanceOut,
    coefficients: Vec<Raw>,
}

#[derive(Serialize)]
struct ExpandOut {
    nu: usize,
    zero_part_index: usize,
    dominant_modulus: Raw,
    dominant_multiplicity: usize,
    decay_constant: Raw,
    blocks: Vec<BlockOut>,
}

fn expand_cmd(io: &Io, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(&io.config)?;
    let ed = expand(&cfg.coins, &state_or_default(&cfg))?;
    let (big_m, m) = ed.dominant();
    let out = ExpandOut {
        nu: ed.nu,
        zero_part_index: ed.zero_part_index,
        dominant_modulus: num(big_m),
        dominant_multiplicity: m,
        decay_constant: num(ed.decay_constant()),
        blocks: ed
            .blocks
            .iter()
            .map(|b| BlockOut {
                resonance: ResonanceOut::from(&b.resonance),
                coefficients: b.coefficients.iter().map(|&c| cx(c)).collect(),
            })
            .collect(),
    };
    emit(io.out.as_deref(), stdout, &to_json(&out))
}

#[derive(Serialize)]
struct FitOut {
    #[serde(rename = "M_est")]
    rate: Raw,
    m_est: Raw,
    #[serde(rename = "C_est")]
    prefactor: Raw,
    #[serde(rename = "M")]
    dominant_modulus: Raw,
    m: usize,
    #[serde(rename = "C_bound")]
    decay_constant: Raw,
    t_min: usize,
    #[serde(rename = "T")]
    t_max: usize,
    points: usize,
}

fn survival(
    io: &Io,
    t_max: Option<usize>,
    fit: bool,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = load(&io.config)?;
    let t_max = t_max.or(cfg.t_max).unwrap_or(DEFAULT_T);
    let psi0 = state_or_default(&cfg);
    let norms = survival_norms(&psi0, &cfg.coins, t_max);
    if !fit {
        return emit(io.out.as_deref(), stdout, &survival_csv(&norms));
    }
    let ed = expand(&cfg.coins, &psi0)?;
    let t_min = ed.nu + ed.zero_part_index + FIT_OFFSET;
    let f = decay_fit(&norms, t_min)?;
    let (big_m, m) = ed.dominant();
    let out = FitOut {
        rate: num(f.rate),
        m_est: num(f.multiplicity),
        prefactor: num(f.prefactor),
        dominant_modulus: num(big_m),
        m,
        decay_constant: num(ed.decay_constant()),
        t_min,
        t_max,
        points: f.points,
    };
    emit(io.out.as_deref(), stdout, &to_json(&out))?;
    if let Some(out) = &io.out {
        emit(
            Some(&sibling(out, "survival")),
            stdout,
            &survival_csv(&norms),
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ResolventOut {
    xi: Raw,
    residual: Raw,
    condition_number: Raw,
}

fn resolvent_check(
    io: &Io,
    flag: Option<&str>,
    window: Option<usize>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = load(&io.config)?;
    let xis = grid(&cfg, flag)?;
    let w = window.or(cfg.window).unwrap_or(DEFAULT_WINDOW) as i64;
    let bounds = (-w, cfg.coins.n0() as i64 + w);
    let f = state_or_default(&cfg);
    let results: Vec<qwres::Result<ResolventOut>> = pool()?.install(|| {
        xis.par_iter()
            .map(|&xi| {
                apply_resolvent(&cfg.coins, xi, &f, bounds).map(|r| ResolventOut {
                    xi: cx(xi),
                    residual: num(r.residual),
                    condition_number: num(r.condition_number),
                })
            })
            .collect()
    });
    let out = results.into_iter().collect::<qwres::Result<Vec<_>>>()?;
    emit(io.out.as_deref(), stdout, &to_json(&out))
}

fn split(
    io: &Io,
    eps: Option<&str>,
    phi: Option<f64>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = load(&io.config)?;
    let eps = match eps {
        Some(text) => parse_eps_list(text)?,
        None => cfg.eps.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec()),
    };
    let result = match phi.or(cfg.phi) {
        Some(phi) => splitting_experiment(&cfg.coins, phi, &eps)?,
        None => choose_direction(&cfg.coins, &eps)?,
    };
    let rows = result.rows.iter().map(|r| {
        vec![
            field(r.eps),
            field(r.gap),
            r.all_simple.to_string(),
            field(result.slope),
        ]
    });
    let csv = to_csv(&["eps", "gap", "all_simple", "slope_estimate"], rows);
    emit(io.out.as_deref(), stdout, &csv)
}

fn selftest(seed: u64, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let report = run_selftest(seed);
    let mut text = format!("seed {seed}\n");
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!(
            "{verdict} {:<28} worst {:.3e} tolerance {:.1e}",
            c.name, c.worst, c.tolerance
        ));
        if let Some(e) = &c.error {
            text.push_str(&format!(" ({e})"));
        }
        text.push('\n');
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    text.push_str(&format!(
        "{} of {} checks passed\n",
        report.checks.len() - failed,
        report.checks.len()
    ));
    emit(out, stdout, text.as_bytes())?;
    if failed > 0 {
        return Err(CliError::SelftestFailed { failed });
    }
    Ok(())
}
