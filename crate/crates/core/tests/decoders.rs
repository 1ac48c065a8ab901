//! Replays the fuzz corpus through the decoder properties the fuzz targets
//! assert, and throws arbitrary text at every decoder.

use std::path::PathBuf;

use localadaseg::experiment::{
    parse_config, parse_trajectory_csv, parse_vary, write_trajectory_csv, Sidecar,
};
use localadaseg::problems::BilinearProblem;
use proptest::prelude::*;

fn corpus(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds in {}", dir.display());
    files
        .into_iter()
        .map(|p| (p.clone(), std::fs::read_to_string(&p).unwrap()))
        .collect()
}

#[test]
fn config_seeds() {
    let mut valid = 0;
    for (path, text) in corpus("fuzz_config") {
        if let Ok(c) = parse_config(&text) {
            valid += 1;
            assert_eq!(parse_config(&c.to_toml()).unwrap(), c, "{}", path.display());
        }
    }
    assert!(valid >= 4);
}

#[test]
fn problem_seeds() {
    for (path, text) in corpus("fuzz_problem_json") {
        let p =
            BilinearProblem::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(BilinearProblem::from_json(&p.to_json()).unwrap(), p);
    }
}

#[test]
fn trajectory_seeds() {
    for (path, text) in corpus("fuzz_trajectory_csv") {
        let rows =
            parse_trajectory_csv(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let mut out = Vec::new();
        write_trajectory_csv(&mut out, &rows).unwrap();
        assert_eq!(
            parse_trajectory_csv(std::str::from_utf8(&out).unwrap())
                .unwrap()
                .len(),
            rows.len()
        );
    }
}

#[test]
fn sidecar_seeds() {
    for (path, text) in corpus("fuzz_sidecar") {
        let s = Sidecar::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        s.config().unwrap();
    }
}

#[test]
fn vary_seeds() {
    for (_, text) in corpus("fuzz_vary") {
        let axis = parse_vary(&text).unwrap();
        assert!(!axis.values.is_empty());
    }
}

proptest! {
    #[test]
    fn decoders_never_panic(text in "\\PC{0,200}") {
        let _ = parse_config(&text);
        let _ = BilinearProblem::from_json(&text);
        let _ = parse_trajectory_csv(&text);
        let _ = Sidecar::from_json(&text);
        let _ = parse_vary(&text);
    }

    #[test]
    fn config_like_text_never_panics(
        section in prop::sample::select(vec!["problem", "solver", "topology", "output", "x"]),
        key in "[a-zA-Z_]{1,12}",
        value in prop::sample::select(vec!["0", "-1", "1e308", "nan", "inf", "\"s\"", "[1, 2]", "true", "0.5"]),
    ) {
        let text = format!("[{section}]\n{key} = {value}\n");
        if let Ok(c) = parse_config(&text) {
            prop_assert_eq!(parse_config(&c.to_toml()).unwrap(), c);
        }
    }
}
