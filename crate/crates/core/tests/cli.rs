use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn azpp(args: &[&str], out_root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_azpp"))
        .args(args)
        .env("AZPP_OUT", out_root)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_version_succeed() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(azpp(&["--help"], tmp.path()).status.code(), Some(0));
    assert_eq!(azpp(&["--version"], tmp.path()).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(azpp(&["frobnicate"], tmp.path()).status.code(), Some(1));
    assert_eq!(
        azpp(&["sweep", "x.cfg", "--seeds", "9..2"], tmp.path())
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn missing_file_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = azpp(&["run", s(&tmp.path().join("nope.cfg"))], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_value_names_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.cfg", "[environment]\nattack_rate = 1.5\n");
    let out = azpp(&["run", s(&cfg)], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("environment.attack_rate"));

    let cfg = write(tmp.path(), "unknown.cfg", "[agents]\ncolour = 3\n");
    let out = azpp(&["run", s(&cfg)], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn empty_config_runs_the_default_baseline() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "empty.cfg", "");
    let out = azpp(&["run", s(&cfg), "--seed", "5"], tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dir = tmp.path().join("empty").join("seed-5");
    let agents = std::fs::read_to_string(dir.join("agents.csv")).unwrap();
    assert_eq!(agents.lines().count(), 1 + 3 * 1000);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    for f in manifest["files"].as_array().unwrap() {
        assert!(dir.join(f.as_str().unwrap()).exists(), "{f}");
    }
    // the written config reproduces the run
    let replay = tmp.path().join("replay");
    let out = azpp(
        &["run", s(&dir.join("config.toml")), "--out", s(&replay)],
        tmp.path(),
    );
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(replay.join("agents.csv")).unwrap(),
        agents.as_bytes()
    );
}

#[test]
fn arms_get_their_own_directories() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "two.cfg",
        "n_ticks = 20\n[[arms]]\nname = \"a\"\n[[arms]]\nname = \"b\"\nset = { \"agents.count\" = 4 }\n",
    );
    let out = azpp(
        &["run", s(&cfg), "--out", s(&tmp.path().join("o"))],
        tmp.path(),
    );
    assert!(out.status.success());
    let rows = |arm: &str| {
        std::fs::read_to_string(tmp.path().join("o").join(arm).join("agents.csv"))
            .unwrap()
            .lines()
            .count()
    };
    assert_eq!(rows("a"), 1 + 3 * 20);
    assert_eq!(rows("b"), 1 + 4 * 20);

    let cmp = tmp.path().join("cmp");
    let out = azpp(
        &["compare", s(&cfg), "--seeds", "1..3", "--out", s(&cmp)],
        tmp.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(cmp.join("compare.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn compare_with_one_single_arm_file_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "one.cfg", "n_ticks = 5\n");
    assert_eq!(
        azpp(&["compare", s(&cfg), "--seeds", "1..2"], tmp.path())
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn network_dump_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "n.cfg", "n_ticks = 10\n");
    let dir = tmp.path().join("n");
    assert!(azpp(
        &["run", s(&cfg), "--out", s(&dir), "--network-dump"],
        tmp.path()
    )
    .status
    .success());
    let text = std::fs::read_to_string(dir.join("network.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 10 * 6);
    assert!(dir.join("network.svg").exists());
}

#[test]
fn plot_rerenders_and_rejects_empty_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "p.cfg", "n_ticks = 30\n");
    let dir = tmp.path().join("p");
    assert!(azpp(&["run", s(&cfg), "--out", s(&dir)], tmp.path())
        .status
        .success());
    let before = std::fs::read(dir.join("affect.svg")).unwrap();
    std::fs::remove_file(dir.join("affect.svg")).unwrap();
    assert!(azpp(&["plot", s(&dir)], tmp.path()).status.success());
    assert_eq!(std::fs::read(dir.join("affect.svg")).unwrap(), before);

    std::fs::write(
        dir.join("agents.csv"),
        "tick,agent_id,affect,probability,contagion,disposition,mode,x,y,radius,damage\n",
    )
    .unwrap();
    let out = azpp(&["plot", s(&dir)], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("agents.csv:2:"), "{err}");
}

#[test]
fn surface_command_writes_csv_and_heatmap() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "s.cfg", "[output]\nsurface_resolution = 11\n");
    let dir = tmp.path().join("surf");
    assert!(azpp(&["surface", s(&cfg), "--out", s(&dir)], tmp.path())
        .status
        .success());
    assert_eq!(
        std::fs::read_to_string(dir.join("surface.csv"))
            .unwrap()
            .lines()
            .count(),
        1 + 121
    );
    assert!(std::fs::read_to_string(dir.join("surface.svg"))
        .unwrap()
        .contains("<svg"));
}

#[test]
fn sweep_parallel_matches_serial() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "w.cfg", "n_ticks = 200\n[agents]\ncount = 5\n");
    let run = |k: &str| {
        let dir = tmp.path().join(format!("w{k}"));
        assert!(azpp(
            &[
                "sweep",
                s(&cfg),
                "--seeds",
                "1..6",
                "--parallel",
                k,
                "--out",
                s(&dir)
            ],
            tmp.path()
        )
        .status
        .success());
        std::fs::read_to_string(dir.join("sweep.csv")).unwrap()
    };
    let serial = run("1");
    assert_eq!(serial, run("3"));
    assert_eq!(serial.lines().count(), 7);
}
