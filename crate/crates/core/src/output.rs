//! File outputs of a run: time-series CSVs, attack log, grid snapshots,
//! the optional tie dump, the disposition surface and the run manifest.
//!
//! Every float is printed with six decimals and every line ends in LF, so
//! identical runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::cognition::disposition_surface;
use crate::config::SimConfig;
use crate::conflict::AttackEvent;
use crate::engine::{MetricsFrame, RunResult, TieSnapshot};
use crate::error::{Error, Result};
use crate::plot;

pub const AGENTS_CSV: &str = "agents.csv";
pub const GLOBAL_CSV: &str = "global.csv";
pub const ATTACKS_CSV: &str = "attacks.csv";
pub const NETWORK_CSV: &str = "network.csv";
pub const SURFACE_CSV: &str = "surface.csv";
pub const SNAPSHOT_TXT: &str = "snapshot.txt";
pub const SNAPSHOT_PPM: &str = "snapshot.ppm";
pub const CONFIG_TOML: &str = "config.toml";
pub const MANIFEST_JSON: &str = "manifest.json";

pub const AGENTS_HEADER: &str =
    "tick,agent_id,affect,probability,contagion,disposition,mode,x,y,radius,damage";
pub const GLOBAL_HEADER: &str =
    "tick,destroyed_count,active_count,avg_tie_strength,tie_strength_dispersion,mean_contagion";
pub const ATTACKS_HEADER: &str = "tick,attacker,x,y,radius,patches_destroyed,n_harmed";

/// Six-decimal fixed format; negative zero prints as zero.
pub fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// `fmt6`, or an empty field for an absent value.
pub fn fmt6_opt(v: Option<f64>) -> String {
    v.map(fmt6).unwrap_or_default()
}

fn require_frames(frames: &[MetricsFrame]) -> Result<()> {
    if frames.is_empty() {
        return Err(Error::Data {
            path: PathBuf::from(AGENTS_CSV),
            line: 0,
            message: "no frames to export".into(),
        });
    }
    Ok(())
}

pub fn agents_csv(frames: &[MetricsFrame]) -> String {
    let mut out =
        String::with_capacity(frames.len() * frames.first().map_or(0, |f| f.agents.len()) * 80);
    out.push_str(AGENTS_HEADER);
    out.push('\n');
    for f in frames {
        for a in &f.agents {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                f.tick,
                a.agent_id,
                fmt6(a.affect),
                fmt6(a.probability),
                fmt6(a.contagion),
                fmt6(a.disposition),
                a.mode.as_str(),
                a.x,
                a.y,
                a.radius,
                fmt6(a.damage)
            );
        }
    }
    out
}

pub fn global_csv(frames: &[MetricsFrame]) -> String {
    let mut out = String::with_capacity(frames.len() * 64);
    out.push_str(GLOBAL_HEADER);
    out.push('\n');
    for f in frames {
        let g = &f.global;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            f.tick,
            g.destroyed_count,
            g.active_count,
            fmt6_opt(g.avg_tie_strength),
            fmt6_opt(g.tie_strength_dispersion),
            fmt6(g.mean_contagion)
        );
    }
    out
}

pub fn attacks_csv(events: &[AttackEvent]) -> String {
    let mut out = String::from(ATTACKS_HEADER);
    out.push('\n');
    for e in events {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            e.tick,
            e.attacker,
            e.center.x,
            e.center.y,
            e.radius,
            e.patches_destroyed,
            e.harmed.len()
        );
    }
    out
}

pub fn network_csv(snapshots: &[TieSnapshot]) -> String {
    let mut out = String::from("tick,i,j,w\n");
    for s in snapshots {
        let n = s.ties.n();
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let _ = writeln!(out, "{},{},{},{}", s.tick, i, j, fmt6(s.ties.weight(i, j)));
            }
        }
    }
    out
}

/// Evenly spaced points from `lo` to `hi`, both included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// The affect × contagion disposition grid of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub affects: Vec<f64>,
    pub contagions: Vec<f64>,
    pub p_fixed: f64,
    pub theta: f64,
    /// `values[a][c]`
    pub values: Vec<Vec<f64>>,
}

impl Surface {
    pub fn from_config(config: &SimConfig) -> Self {
        let res = config.output.surface_resolution;
        let affects = linspace(0.0, 1.0, res);
        let contagions = linspace(0.0, config.output.surface_c_max, res);
        let p_fixed = config.output.surface_p_fixed;
        let theta = config.agents.theta_base;
        let values = disposition_surface(&affects, &contagions, p_fixed, theta);
        Self {
            affects,
            contagions,
            p_fixed,
            theta,
            values,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("affect,contagion,disposition\n");
        for (a, row) in self.affects.iter().zip(&self.values) {
            for (c, d) in self.contagions.iter().zip(row) {
                let _ = writeln!(out, "{},{},{}", fmt6(*a), fmt6(*c), fmt6(*d));
            }
        }
        out
    }
}

/// Metadata written next to every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub seed: u64,
    pub engine_version: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub files: Vec<String>,
}

pub fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

pub fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Write every artifact of `result` into `dir` (created if needed) and
/// return the manifest, which is itself written last.
pub fn write_run(result: &RunResult, dir: &Path, started_unix_ms: u128) -> Result<RunManifest> {
    require_frames(&result.frames)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    let mut put = |name: &str, bytes: Vec<u8>| -> Result<()> {
        write_file(&dir.join(name), bytes)?;
        files.push(name.to_string());
        Ok(())
    };

    put(CONFIG_TOML, result.config.to_toml().into_bytes())?;
    put(AGENTS_CSV, agents_csv(&result.frames).into_bytes())?;
    put(GLOBAL_CSV, global_csv(&result.frames).into_bytes())?;
    put(ATTACKS_CSV, attacks_csv(&result.attacks).into_bytes())?;
    let last_tick = result.frames.last().map_or(0, |f| f.tick);
    put(
        SNAPSHOT_TXT,
        result.final_grid.snapshot_text(last_tick).into_bytes(),
    )?;
    let mut ppm = Vec::new();
    result
        .final_grid
        .write_ppm(&mut ppm)
        .map_err(|e| Error::io(dir.join(SNAPSHOT_PPM), e))?;
    put(SNAPSHOT_PPM, ppm)?;
    if result.config.output.network_dump {
        put(NETWORK_CSV, network_csv(&result.ties).into_bytes())?;
    }
    if result.config.extensions.coupling_surface_output {
        put(
            SURFACE_CSV,
            Surface::from_config(&result.config).to_csv().into_bytes(),
        )?;
    }
    for path in plot::render_run_plots(dir)? {
        if let Some(name) = path.file_name() {
            files.push(name.to_string_lossy().into_owned());
        }
    }

    files.push(MANIFEST_JSON.to_string());
    let manifest = RunManifest {
        config_hash: result.config.hash(),
        seed: result.config.seed,
        engine_version: crate::VERSION.to_string(),
        started_unix_ms,
        finished_unix_ms: unix_ms(),
        files,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&dir.join(MANIFEST_JSON), json + "\n")?;
    Ok(manifest)
}

/// Write the disposition surface of `config` (CSV and heatmap) into `dir`.
pub fn write_surface(config: &SimConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(SURFACE_CSV);
    write_file(&csv_path, Surface::from_config(config).to_csv())?;
    let svg = plot::render_surface(
        &csv_path,
        config.agents.theta_base,
        config.output.surface_p_fixed,
    )?;
    let svg_path = dir.join("surface.svg");
    write_file(&svg_path, svg)?;
    Ok(vec![csv_path, svg_path])
}
