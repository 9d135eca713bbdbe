//! JSON and flag-string input formats.
//!
//! A coin is `{"a":[re,im],"b":[re,im],"c":[re,im],"d":[re,im]}` or
//! `{"rotation": r}`. A state is an array of `{"n": int, "L": [re,im], "R": [re,im]}`
//! with absent chiralities read as zero. A run configuration is an object with a
//! required `"coins"` array and optional `"state"`, `"T"`, `"xi_grid"`, `"eps"`,
//! `"phi"`, `"seed"` and `"window"` fields. Unknown fields are rejected.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::coins::{Coin, CoinSequence};
use crate::states::WaveState;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub coins: CoinSequence,
    pub state: Option<WaveState>,
    pub t_max: Option<usize>,
    pub xi_grid: Option<Vec<C64>>,
    pub eps: Option<Vec<f64>>,
    pub phi: Option<f64>,
    pub seed: Option<u64>,
    pub window: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoin {
    a: Option<[f64; 2]>,
    b: Option<[f64; 2]>,
    c: Option<[f64; 2]>,
    d: Option<[f64; 2]>,
    rotation: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSite {
    n: i64,
    #[serde(rename = "L")]
    l: Option<[f64; 2]>,
    #[serde(rename = "R")]
    r: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    coins: Vec<RawCoin>,
    state: Option<Vec<RawSite>>,
    #[serde(rename = "T")]
    t_max: Option<usize>,
    xi_grid: Option<String>,
    eps: Option<Vec<f64>>,
    phi: Option<f64>,
    seed: Option<u64>,
    window: Option<usize>,
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::config(
            format!("{path} (line {}, column {})", inner.line(), inner.column()),
            inner.to_string(),
        )
    })?;
    de.end().map_err(|e| {
        Error::config(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    Ok(value)
}

fn complex(x: [f64; 2]) -> C64 {
    C64::new(x[0], x[1])
}

fn finite(location: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::config(location, "non-finite number"))
    }
}

fn build_coin(raw: &RawCoin, location: &str) -> Result<Coin> {
    let entries = [raw.a, raw.b, raw.c, raw.d];
    let coin = match (raw.rotation, entries) {
        (Some(r), [None, None, None, None]) => {
            finite(location, &[r])?;
            Coin::rotation(r)
        }
        (None, [Some(a), Some(b), Some(c), Some(d)]) => {
            finite(location, &[a, b, c, d].concat())?;
            Coin::new(complex(a), complex(b), complex(c), complex(d))
        }
        (Some(_), _) => {
            return Err(Error::config(
                location,
                "`rotation` excludes the entries a, b, c, d",
            ))
        }
        (None, _) => {
            return Err(Error::config(
                location,
                "a coin needs all four entries a, b, c, d or a `rotation`",
            ))
        }
    };
    coin.map_err(|e| Error::config(location, e.to_string()))
}

fn build_state(sites: &[RawSite], prefix: &str) -> Result<WaveState> {
    let mut seen = BTreeSet::new();
    let mut psi = WaveState::zero();
    for (k, site) in sites.iter().enumerate() {
        let location = format!("{prefix}[{k}]");
        if !seen.insert(site.n) {
            return Err(Error::config(
                location,
                format!("site {} listed twice", site.n),
            ));
        }
        let l = site.l.unwrap_or([0.0; 2]);
        let r = site.r.unwrap_or([0.0; 2]);
        finite(&location, &[l, r].concat())?;
        psi.set(site.n, [complex(l), complex(r)]);
    }
    Ok(psi.trimmed())
}

pub fn parse_coin(text: &str) -> Result<Coin> {
    let raw: RawCoin = from_json(text)?;
    build_coin(&raw, ".")
}

pub fn parse_state(text: &str) -> Result<WaveState> {
    let raw: Vec<RawSite> = from_json(text)?;
    build_state(&raw, "")
}

pub fn parse_coin_sequence(text: &str) -> Result<CoinSequence> {
    let raw: Vec<RawCoin> = from_json(text)?;
    coin_sequence(&raw, "")
}

fn coin_sequence(raw: &[RawCoin], prefix: &str) -> Result<CoinSequence> {
    if raw.is_empty() {
        return Err(Error::config(prefix, "at least one coin is required"));
    }
    let coins = raw
        .iter()
        .enumerate()
        .map(|(k, c)| build_coin(c, &format!("{prefix}[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    CoinSequence::new(coins)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = from_json(text)?;
    let coins = coin_sequence(&raw.coins, "coins")?;
    let state = raw
        .state
        .as_deref()
        .map(|s| build_state(s, "state"))
        .transpose()?;
    let xi_grid = raw
        .xi_grid
        .as_deref()
        .map(|g| parse_xi_grid(g).map_err(|e| relocate(e, "xi_grid")))
        .transpose()?;
    let eps = raw
        .eps
        .map(|list| {
            list.iter()
                .enumerate()
                .map(|(k, &e)| check_eps(e, &format!("eps[{k}]")))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    if let Some(phi) = raw.phi {
        finite("phi", &[phi])?;
    }
    Ok(RunConfig {
        coins,
        state,
        t_max: raw.t_max,
        xi_grid,
        eps,
        phi: raw.phi,
        seed: raw.seed,
        window: raw.window,
    })
}

fn relocate(e: Error, location: &str) -> Error {
    match e {
        Error::ConfigParse {
            location: inner,
            message,
        } => Error::config(format!("{location}: {inner}"), message),
        other => other,
    }
}

/// `re0:re1:n,im`: `n` equispaced real parts from `re0` to `re1` inclusive,
/// all with imaginary part `im`.
pub fn parse_xi_grid(text: &str) -> Result<Vec<C64>> {
    let bad = |m: &str| {
        Error::config(
            "xi-grid",
            format!("{m} in `{text}` (expected re0:re1:n,im)"),
        )
    };
    let (range, im) = text
        .trim()
        .split_once(',')
        .ok_or_else(|| bad("missing `,im`"))?;
    let parts: Vec<&str> = range.split(':').collect();
    let [re0, re1, n] = parts[..] else {
        return Err(bad("expected three `:`-separated fields"));
    };
    let number = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| bad(&format!("`{}` is not a number", s.trim())))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad("non-finite number"))
        }
    };
    let (re0, re1, im) = (number(re0)?, number(re1)?, number(im)?);
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| bad("point count is not a nonnegative integer"))?;
    match n {
        0 => Err(bad("point count must be positive")),
        1 => Ok(vec![C64::new(re0, im)]),
        _ => Ok((0..n)
            .map(|k| C64::new(re0 + (re1 - re0) * k as f64 / (n - 1) as f64, im))
            .collect()),
    }
}

fn check_eps(e: f64, location: &str) -> Result<f64> {
    if (0.0..0.5).contains(&e) {
        Ok(e)
    } else {
        Err(Error::config(
            location,
            format!("eps = {e} outside [0, 1/2)"),
        ))
    }
}

/// A nonempty comma-separated list of perturbation strengths in `[0, 1/2)`.
pub fn parse_eps_list(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::config("eps", "empty list"));
    }
    text.split(',')
        .enumerate()
        .map(|(k, s)| {
            let location = format!("eps[{k}]");
            let e: f64 = s
                .trim()
                .parse()
                .map_err(|_| Error::config(&location, format!("`{}` is not a number", s.trim())))?;
            check_eps(e, &location)
        })
        .collect()
}

/// 17 significant digits, which round-trips every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_complex(z: C64) -> String {
    format!("[{},{}]", fmt_f64(z.re), fmt_f64(z.im))
}

pub fn coin_to_json(c: &Coin) -> String {
    format!(
        "{{\"a\":{},\"b\":{},\"c\":{},\"d\":{}}}",
        fmt_complex(c.a()),
        fmt_complex(c.b()),
        fmt_complex(c.c()),
        fmt_complex(c.d())
    )
}

/// Nonzero sites in increasing order; zero chiralities are omitted.
pub fn state_to_json(psi: &WaveState) -> String {
    let zero = C64::new(0.0, 0.0);
    let mut out = String::from("[");
    let mut first = true;
    for (n, v) in psi.iter() {
        if v == [zero; 2] {
            continue;
        }
        if !first {
            out.push(',');
        }
        first = false;
        write!(out, "{{\"n\":{n}").unwrap();
        if v[0] != zero {
            write!(out, ",\"L\":{}", fmt_complex(v[0])).unwrap();
        }
        if v[1] != zero {
            write!(out, ",\"R\":{}", fmt_complex(v[1])).unwrap();
        }
        out.push('}');
    }
    out.push(']');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_coin, random_state, rng_from_seed};
    use crate::states::Chirality;
    use proptest::prelude::*;

    fn location(e: Error) -> String {
        match e {
            Error::ConfigParse { location, .. } => location,
            other => panic!("expected ConfigParse, got {other:?}"),
        }
    }

    #[test]
    fn triple_barrier_config() {
        let cfg = parse_config(
            r#"{"coins":[{"rotation":0.75},{"rotation":0.9230769230769231},{"rotation":0.3333333333333333}],"T":40}"#,
        )
        .unwrap();
        assert_eq!(cfg.coins.n0(), 2);
        assert_eq!(cfg.t_max, Some(40));
        assert!(cfg.state.is_none());
    }

    #[test]
    fn explicit_coin_entries() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(r#"{{"a":[{s},0],"b":[{s},0],"c":[{s},0],"d":[-{s},0]}}"#);
        let coin = parse_coin(&text).unwrap();
        assert!(coin.matrix().max_abs_diff(&Coin::hadamard().matrix()) < 1e-16);
    }

    #[test]
    fn unknown_field_reports_path_and_line() {
        let e = parse_config("{\"coins\":[\n{\"rotation\":0.5,\"spin\":1}]}").unwrap_err();
        let loc = location(e);
        assert!(loc.starts_with("coins[0]"), "{loc}");
        assert!(loc.contains("line 2"), "{loc}");
    }

    #[test]
    fn invalid_coin_reports_index() {
        let e = parse_config(
            r#"{"coins":[{"rotation":0.5},{"a":[1,0],"b":[1,0],"c":[0,0],"d":[1,0]}]}"#,
        )
        .unwrap_err();
        assert_eq!(location(e), "coins[1]");
        let e = parse_config(r#"{"coins":[{"rotation":1.0}]}"#).unwrap_err();
        assert_eq!(location(e), "coins[0]");
        let e = parse_config(r#"{"coins":[{"rotation":0.5,"a":[1,0]}]}"#).unwrap_err();
        assert_eq!(location(e), "coins[0]");
        let e = parse_config(r#"{"coins":[]}"#).unwrap_err();
        assert_eq!(location(e), "coins");
    }

    #[test]
    fn state_entries() {
        let psi = parse_state(r#"[{"n":0,"L":[1,0]},{"n":-2,"R":[0,0.5]}]"#).unwrap();
        assert_eq!(psi.component(0, Chirality::L), C64::new(1.0, 0.0));
        assert_eq!(psi.component(-2, Chirality::R), C64::new(0.0, 0.5));
        assert_eq!(psi.component(-1, Chirality::L), C64::new(0.0, 0.0));
        let e = parse_state(r#"[{"n":1},{"n":1}]"#).unwrap_err();
        assert_eq!(location(e), "[1]");
    }

    #[test]
    fn trailing_garbage_rejected() {
        assert!(matches!(
            parse_coin(r#"{"rotation":0.1} x"#),
            Err(Error::ConfigParse { .. })
        ));
    }

    #[test]
    fn xi_grids() {
        let g = parse_xi_grid("-1:1:5,-0.25").unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], C64::new(-1.0, -0.25));
        assert_eq!(g[4], C64::new(1.0, -0.25));
        assert_eq!(g[2], C64::new(0.0, -0.25));
        assert_eq!(
            parse_xi_grid("0.5:9:1,0").unwrap(),
            vec![C64::new(0.5, 0.0)]
        );
        for bad in [
            "",
            "1:2,0",
            "1:2:0,0",
            "1:2:3",
            "a:1:2,0",
            "0:1:2,inf",
            "0:1:-2,0",
        ] {
            assert!(
                matches!(parse_xi_grid(bad), Err(Error::ConfigParse { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn eps_lists() {
        assert_eq!(
            parse_eps_list("1e-3, 1e-4,0").unwrap(),
            vec![1e-3, 1e-4, 0.0]
        );
        assert_eq!(location(parse_eps_list("1e-3,0.5").unwrap_err()), "eps[1]");
        assert_eq!(location(parse_eps_list("1e-3,,").unwrap_err()), "eps[1]");
        assert!(parse_eps_list("").is_err());
        assert!(parse_eps_list("NaN").is_err());
    }

    #[test]
    fn complex_format_has_17_digits() {
        assert_eq!(
            fmt_complex(C64::new(0.1, -2.0)),
            "[1.0000000000000001e-1,-2.0000000000000000e0]"
        );
    }

    proptest! {
        #[test]
        fn state_round_trip(seed in any::<u64>(), n0 in 1usize..6, nu in 0usize..5) {
            let psi = random_state(&mut rng_from_seed(seed), n0, nu);
            let back = parse_state(&state_to_json(&psi)).unwrap();
            prop_assert_eq!(back, psi);
        }

        #[test]
        fn coin_round_trip(seed in any::<u64>()) {
            let coin = random_coin(&mut rng_from_seed(seed));
            prop_assert_eq!(parse_coin(&coin_to_json(&coin)).unwrap(), coin);
        }

        #[test]
        fn parsers_never_panic(text in ".{0,64}") {
            let _ = parse_config(&text);
            let _ = parse_state(&text);
            let _ = parse_coin(&text);
            let _ = parse_xi_grid(&text);
            let _ = parse_eps_list(&text);
        }
    }
}
