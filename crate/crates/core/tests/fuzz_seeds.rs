use std::fs;
use std::path::PathBuf;

use qwres::config;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn config_seeds() {
    for (name, text) in seeds("parse_config") {
        let parsed = config::parse_config(&text);
        assert_eq!(
            parsed.is_ok(),
            !name.contains("invalid"),
            "{name}: {parsed:?}"
        );
    }
}

#[test]
fn state_seeds() {
    for (name, text) in seeds("parse_state") {
        assert!(config::parse_state(&text).is_ok(), "{name}");
    }
}

#[test]
fn coin_seeds() {
    for (name, text) in seeds("parse_coin") {
        let parsed = config::parse_coin(&text);
        // an anti-diagonal coin is unitary but has no transfer matrix
        assert_eq!(parsed.is_ok(), !name.contains("flip"), "{name}: {parsed:?}");
    }
}

#[test]
fn grid_and_eps_seeds() {
    for (name, text) in seeds("parse_xi_grid") {
        assert!(config::parse_xi_grid(&text).is_ok(), "{name}");
    }
    for (name, text) in seeds("parse_eps_list") {
        assert!(config::parse_eps_list(&text).is_ok(), "{name}");
    }
}
