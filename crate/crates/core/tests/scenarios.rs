use std::path::Path;

use azpp_core::config::parse_scenario;
use azpp_core::Model;

#[test]
fn shipped_scenarios_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            let scenario =
                parse_scenario(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            for arm in scenario.runs() {
                Model::new(arm.config).unwrap();
            }
            seen += 1;
        }
    }
    assert!(seen >= 8);
}

#[test]
fn key_reference_doc_covers_every_key() {
    let doc = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/scenario-keys.md"),
    )
    .unwrap();
    let defaults: toml::Table = azpp_core::SimConfig::default().to_toml().parse().unwrap();
    let mut keys = Vec::new();
    for (k, v) in &defaults {
        match v {
            toml::Value::Table(t) => keys.extend(t.keys().cloned()),
            _ => keys.push(k.clone()),
        }
    }
    for k in ["from_tick", "to_tick", "id", "age", "position"] {
        keys.push(k.into());
    }
    for k in keys {
        assert!(doc.contains(&format!("`{k}`")), "docs miss `{k}`");
    }
}
