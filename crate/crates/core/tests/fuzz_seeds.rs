//! Replays the checked-in fuzz corpus through the decoders so the seeds stay
//! meaningful without a nightly toolchain.

use std::path::PathBuf;
use std::sync::Arc;

use fsing_core::input::{parse_input, parse_matroid};
use fsing_core::poly::VarCtx;
use fsing_core::report::{certificate_from_json, split_witness_from_json};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn poly_seeds() {
    let outcomes: Vec<bool> = seeds("parse_poly")
        .iter()
        .map(|(_, t)| parse_input(t).is_ok())
        .collect();
    assert!(outcomes.contains(&true) && outcomes.contains(&false));
}

#[test]
fn matroid_seeds() {
    let outcomes: Vec<bool> = seeds("parse_matroid")
        .iter()
        .map(|(_, t)| parse_matroid(t).is_ok())
        .collect();
    assert!(outcomes.contains(&true) && outcomes.contains(&false));
}

#[test]
fn certificate_seeds() {
    let vars = Arc::new(VarCtx::new(["x", "y", "z", "w"]).unwrap());
    for (path, text) in seeds("certificate_json") {
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let decoded = certificate_from_json(&value, &vars).is_ok() || split_witness_from_json(&value, &vars).is_ok();
        assert!(decoded, "{}", path.display());
    }
}
