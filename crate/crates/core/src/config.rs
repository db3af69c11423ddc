//! Scenario files.
//!
//! A scenario is a TOML document. Every model parameter has exactly one key,
//! absent keys take their defaults, and unknown keys are rejected. A file may
//! also declare `[[arms]]`: named variants of the base configuration, each a
//! set of dotted-path overrides, for paired experiments.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cognition::RwParams;
use crate::conflict::ConflictParams;
use crate::environment::EnvParams;
use crate::error::{ConfigError, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub seed: u64,
    pub n_ticks: u64,
    pub environment: EnvironmentConfig,
    pub agents: AgentsConfig,
    pub learning: LearningConfig,
    pub network: NetworkConfig,
    pub conflict: ConflictConfig,
    pub extensions: Extensions,
    pub shocks: ShockConfig,
    pub output: OutputConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_ticks: 1000,
            environment: EnvironmentConfig::default(),
            agents: AgentsConfig::default(),
            learning: LearningConfig::default(),
            network: NetworkConfig::default(),
            conflict: ConflictConfig::default(),
            extensions: Extensions::default(),
            shocks: ShockConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentConfig {
    pub width: usize,
    pub height: usize,
    pub attack_rate: f64,
    pub extinction_rate: f64,
    /// Scripted threats: rectangles held Active over a tick range.
    pub forced_active: Vec<ForcedBlock>,
}

impl Default for EnvironmentConfig {
    fn default() -> Self {
        Self {
            width: 50,
            height: 50,
            attack_rate: 0.01,
            extinction_rate: 0.05,
            forced_active: Vec::new(),
        }
    }
}

/// Cells `[x, x+width) × [y, y+height)` (wrapping) are set Active after the
/// environment update on every tick in `from_tick..=to_tick`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcedBlock {
    pub from_tick: u64,
    pub to_tick: u64,
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentsConfig {
    pub count: usize,
    pub age_mean: f64,
    pub age_sd: f64,
    pub mobile: bool,
    pub memory_length: usize,
    pub sampling_radius: usize,
    pub theta_base: f64,
    pub p_flight: f64,
    /// Destructive radius when the endogenous-radius extension is off.
    pub fixed_radius: usize,
    pub profiles: Vec<AgentOverride>,
}

impl Default for AgentsConfig {
    fn default() -> Self {
        Self {
            count: 3,
            age_mean: 35.0,
            age_sd: 12.0,
            mobile: true,
            memory_length: 5,
            sampling_radius: 1,
            theta_base: 0.6,
            p_flight: 0.05,
            fixed_radius: 1,
            profiles: vec![AgentOverride {
                id: 0,
                mobile: Some(false),
                ..AgentOverride::default()
            }],
        }
    }
}

/// Per-agent overrides of the population defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentOverride {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mobile: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub age: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearningConfig {
    pub alpha_rw: f64,
    pub beta_rw: f64,
}

impl Default for LearningConfig {
    fn default() -> Self {
        let rw = RwParams::default();
        Self {
            alpha_rw: rw.alpha_rw,
            beta_rw: rw.beta_rw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkConfig {
    pub alpha_hom: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self { alpha_hom: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConflictConfig {
    pub alpha_aggr: f64,
    pub beta_ret: f64,
    pub damage_decay: f64,
    pub flight_radius: usize,
    /// Weight of accumulated damage in the disposition.
    pub damage_penalty: f64,
}

impl Default for ConflictConfig {
    fn default() -> Self {
        let c = ConflictParams::default();
        Self {
            alpha_aggr: c.alpha_aggr,
            beta_ret: c.beta_ret,
            damage_decay: c.damage_decay,
            flight_radius: c.flight_radius,
            damage_penalty: 0.1,
        }
    }
}

/// The eight behavioral extensions. Each flag is independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Extensions {
    pub age_impulse: bool,
    pub endogenous_radius: bool,
    pub flight: bool,
    pub memory: bool,
    pub retaliation: bool,
    pub coupling_surface_output: bool,
    pub homophily: bool,
    pub shocks: bool,
}

impl Default for Extensions {
    fn default() -> Self {
        Self {
            age_impulse: true,
            endogenous_radius: true,
            flight: true,
            memory: true,
            retaliation: true,
            coupling_surface_output: true,
            homophily: true,
            shocks: false,
        }
    }
}

impl Extensions {
    pub const NAMES: [&'static str; 8] = [
        "age_impulse",
        "endogenous_radius",
        "flight",
        "memory",
        "retaliation",
        "coupling_surface_output",
        "homophily",
        "shocks",
    ];

    pub fn none() -> Self {
        Self {
            age_impulse: false,
            endogenous_radius: false,
            flight: false,
            memory: false,
            retaliation: false,
            coupling_surface_output: false,
            homophily: false,
            shocks: false,
        }
    }

    pub fn flag_mut(&mut self, name: &str) -> Option<&mut bool> {
        Some(match name {
            "age_impulse" => &mut self.age_impulse,
            "endogenous_radius" => &mut self.endogenous_radius,
            "flight" => &mut self.flight,
            "memory" => &mut self.memory,
            "retaliation" => &mut self.retaliation,
            "coupling_surface_output" => &mut self.coupling_surface_output,
            "homophily" => &mut self.homophily,
            "shocks" => &mut self.shocks,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShockMode {
    /// Every agent's affect rises by the full magnitude.
    Uniform,
    /// Each agent draws its own increment from `U[0, magnitude]`.
    PerAgentRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShockConfig {
    pub period: u64,
    pub magnitude: f64,
    pub mode: ShockMode,
}

impl Default for ShockConfig {
    fn default() -> Self {
        Self {
            period: 200,
            magnitude: 0.5,
            mode: ShockMode::PerAgentRandom,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Emit the per-tick tie matrix (`network.csv`).
    pub network_dump: bool,
    /// Points per axis of the disposition surface.
    pub surface_resolution: usize,
    pub surface_p_fixed: f64,
    /// Upper end of the contagion axis of the surface.
    pub surface_c_max: f64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            network_dump: false,
            surface_resolution: 50,
            surface_p_fixed: 0.2,
            surface_c_max: 1.0,
        }
    }
}

fn check_prob(key: &str, v: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("must be in [0,1] (got {v})")))
    }
}

fn check_nonneg(key: &str, v: f64) -> Result<(), ConfigError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(
            key,
            format!("must be a finite value >= 0 (got {v})"),
        ))
    }
}

fn check_unit_open(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("must be in (0,1] (got {v})")))
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.seed > i64::MAX as u64 {
            return Err(ConfigError::new("seed", format!("must be <= {}", i64::MAX)));
        }
        if self.n_ticks < 1 {
            return Err(ConfigError::new("n_ticks", "must be >= 1"));
        }
        let env = &self.environment;
        if env.width < 1 {
            return Err(ConfigError::new("environment.width", "must be >= 1"));
        }
        if env.height < 1 {
            return Err(ConfigError::new("environment.height", "must be >= 1"));
        }
        check_prob("environment.attack_rate", env.attack_rate)?;
        check_prob("environment.extinction_rate", env.extinction_rate)?;
        for (k, b) in env.forced_active.iter().enumerate() {
            let key = |f: &str| format!("environment.forced_active.{k}.{f}");
            if b.from_tick > b.to_tick {
                return Err(ConfigError::new(key("to_tick"), "must be >= from_tick"));
            }
            if b.x >= env.width {
                return Err(ConfigError::new(
                    key("x"),
                    format!("must be < environment.width ({})", env.width),
                ));
            }
            if b.y >= env.height {
                return Err(ConfigError::new(
                    key("y"),
                    format!("must be < environment.height ({})", env.height),
                ));
            }
            if b.width < 1 || b.width > env.width {
                return Err(ConfigError::new(
                    key("width"),
                    format!("must be in [1,{}]", env.width),
                ));
            }
            if b.height < 1 || b.height > env.height {
                return Err(ConfigError::new(
                    key("height"),
                    format!("must be in [1,{}]", env.height),
                ));
            }
        }

        let agents = &self.agents;
        if agents.count < 1 {
            return Err(ConfigError::new("agents.count", "must be >= 1"));
        }
        check_nonneg("agents.age_sd", agents.age_sd)?;
        if !(agents.age_mean.is_finite()) {
            return Err(ConfigError::new("agents.age_mean", "must be finite"));
        }
        if agents.memory_length < 1 {
            return Err(ConfigError::new("agents.memory_length", "must be >= 1"));
        }
        check_nonneg("agents.theta_base", agents.theta_base)?;
        check_prob("agents.p_flight", agents.p_flight)?;
        if agents.fixed_radius < 1 {
            return Err(ConfigError::new("agents.fixed_radius", "must be >= 1"));
        }
        let side = env.width.min(env.height);
        let fits = |key: &str, r: usize| {
            if 2 * r < side {
                Ok(())
            } else {
                Err(ConfigError::new(
                    key,
                    format!(
                        "radius {r} does not fit the {}x{} grid (need 2r+1 <= {side})",
                        env.width, env.height
                    ),
                ))
            }
        };
        fits("agents.sampling_radius", agents.sampling_radius)?;
        if self.extensions.endogenous_radius {
            fits("extensions.endogenous_radius", 5)?;
        } else {
            fits("agents.fixed_radius", agents.fixed_radius)?;
        }
        fits("conflict.flight_radius", self.conflict.flight_radius)?;

        let mut seen = vec![false; agents.count];
        for (k, p) in agents.profiles.iter().enumerate() {
            let key = |f: &str| format!("agents.profiles.{k}.{f}");
            if p.id >= agents.count {
                return Err(ConfigError::new(
                    key("id"),
                    format!("must be < agents.count ({})", agents.count),
                ));
            }
            if std::mem::replace(&mut seen[p.id], true) {
                return Err(ConfigError::new(
                    key("id"),
                    format!("duplicate profile for agent {}", p.id),
                ));
            }
            if let Some(age) = p.age {
                if !age.is_finite() || age < 18.0 {
                    return Err(ConfigError::new(
                        key("age"),
                        format!("must be >= 18 (got {age})"),
                    ));
                }
            }
            if p.memory_length == Some(0) {
                return Err(ConfigError::new(key("memory_length"), "must be >= 1"));
            }
            if let Some([x, y]) = p.position {
                if x >= env.width || y >= env.height {
                    return Err(ConfigError::new(
                        key("position"),
                        format!("must lie inside the {}x{} grid", env.width, env.height),
                    ));
                }
            }
        }

        check_unit_open("learning.alpha_rw", self.learning.alpha_rw)?;
        check_unit_open("learning.beta_rw", self.learning.beta_rw)?;
        if !(self.network.alpha_hom > 0.0 && self.network.alpha_hom.is_finite()) {
            return Err(ConfigError::new(
                "network.alpha_hom",
                format!("must be > 0 (got {})", self.network.alpha_hom),
            ));
        }
        let c = &self.conflict;
        check_nonneg("conflict.alpha_aggr", c.alpha_aggr)?;
        check_nonneg("conflict.beta_ret", c.beta_ret)?;
        check_prob("conflict.damage_decay", c.damage_decay)?;
        check_nonneg("conflict.damage_penalty", c.damage_penalty)?;
        if self.shocks.period < 1 {
            return Err(ConfigError::new("shocks.period", "must be >= 1"));
        }
        check_nonneg("shocks.magnitude", self.shocks.magnitude)?;
        if self.output.surface_resolution < 2 {
            return Err(ConfigError::new(
                "output.surface_resolution",
                "must be >= 2",
            ));
        }
        check_prob("output.surface_p_fixed", self.output.surface_p_fixed)?;
        if !(self.output.surface_c_max > 0.0 && self.output.surface_c_max.is_finite()) {
            return Err(ConfigError::new("output.surface_c_max", "must be > 0"));
        }
        Ok(())
    }

    pub fn env_params(&self) -> EnvParams {
        EnvParams {
            attack_rate: self.environment.attack_rate,
            extinction_rate: self.environment.extinction_rate,
        }
    }

    pub fn rw_params(&self) -> RwParams {
        RwParams {
            alpha_rw: self.learning.alpha_rw,
            beta_rw: self.learning.beta_rw,
        }
    }

    pub fn conflict_params(&self) -> ConflictParams {
        ConflictParams {
            alpha_aggr: self.conflict.alpha_aggr,
            beta_ret: self.conflict.beta_ret,
            damage_decay: self.conflict.damage_decay,
            flight_radius: self.conflict.flight_radius,
        }
    }

    /// Profile override for `id`, if any.
    pub fn profile_override(&self, id: usize) -> Option<&AgentOverride> {
        self.agents.profiles.iter().find(|p| p.id == id)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("SimConfig always serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}

/// A named variant of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    pub name: String,
    pub config: SimConfig,
}

/// A parsed scenario file: the base configuration plus any arms.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub base: SimConfig,
    pub arms: Vec<Arm>,
}

impl Scenario {
    /// The configurations to run: the arms if any, else the base as `"base"`.
    pub fn runs(&self) -> Vec<Arm> {
        if self.arms.is_empty() {
            vec![Arm {
                name: "base".into(),
                config: self.base.clone(),
            }]
        } else {
            self.arms.clone()
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArmSpec {
    name: String,
    #[serde(default)]
    set: toml::Table,
}

fn set_path(root: &mut toml::Table, path: &str, value: toml::Value) -> Result<(), String> {
    let parts: Vec<&str> = path.split('.').collect();
    let mut cur = root;
    let mut i = 0;
    // walk tables, stepping into arrays of tables on numeric segments
    loop {
        let part = parts[i];
        let last = i + 1 == parts.len();
        if last {
            cur.insert(part.to_string(), value);
            return Ok(());
        }
        let next = parts[i + 1];
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        match entry {
            toml::Value::Table(t) => {
                cur = t;
                i += 1;
            }
            toml::Value::Array(items) => {
                let idx: usize = next.parse().map_err(|_| {
                    format!("`{path}`: `{part}` is a list, expected an index after it")
                })?;
                let len = items.len();
                let item = items
                    .get_mut(idx)
                    .ok_or_else(|| format!("`{path}`: index {idx} out of range ({len} entries)"))?;
                if i + 2 == parts.len() {
                    *item = value;
                    return Ok(());
                }
                cur = item
                    .as_table_mut()
                    .ok_or_else(|| format!("`{path}`: entry {idx} of `{part}` is not a table"))?;
                i += 2;
            }
            _ => return Err(format!("`{path}`: `{part}` is not a table")),
        }
    }
}

/// Parse a scenario document.
pub fn parse_scenario_str(text: &str) -> Result<Scenario, String> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| e.to_string())?;
    let arm_specs: Vec<ArmSpec> = match table.remove("arms") {
        Some(v) => v
            .try_into()
            .map_err(|e: toml::de::Error| format!("arms: {e}"))?,
        None => Vec::new(),
    };
    let base: SimConfig = toml::Value::Table(table.clone())
        .try_into()
        .map_err(|e: toml::de::Error| e.to_string())?;
    let mut arms = Vec::with_capacity(arm_specs.len());
    for spec in arm_specs {
        if arms.iter().any(|a: &Arm| a.name == spec.name) {
            return Err(format!("arms: duplicate arm name `{}`", spec.name));
        }
        let mut t = table.clone();
        for (path, value) in spec.set {
            set_path(&mut t, &path, value).map_err(|e| format!("arm `{}`: {e}", spec.name))?;
        }
        let config: SimConfig = toml::Value::Table(t)
            .try_into()
            .map_err(|e: toml::de::Error| format!("arm `{}`: {e}", spec.name))?;
        arms.push(Arm {
            name: spec.name,
            config,
        });
    }
    Ok(Scenario { base, arms })
}

/// Read, parse and validate a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let scenario = parse_scenario_str(&text).map_err(|message| Error::Parse {
        path: path.to_path_buf(),
        message,
    })?;
    scenario.base.validate()?;
    for arm in &scenario.arms {
        arm.config.validate().map_err(|e| ConfigError {
            key: e.key,
            constraint: format!("{} (arm `{}`)", e.constraint, arm.name),
        })?;
    }
    Ok(scenario)
}

/// The validated base configuration of a scenario file.
pub fn parse_config(path: &Path) -> Result<SimConfig> {
    Ok(parse_scenario(path)?.base)
}

/// Human-readable key reference, generated from the defaults.
pub fn key_reference() -> String {
    let mut out = String::from("# Scenario keys and their defaults\n\n");
    let _ = writeln!(out, "{}", SimConfig::default().to_toml());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_document_is_baseline() {
        let s = parse_scenario_str("").unwrap();
        assert_eq!(s.base, SimConfig::default());
        assert_eq!(s.base.agents.count, 3);
        assert_eq!(s.base.n_ticks, 1000);
        assert!(s.arms.is_empty());
        s.base.validate().unwrap();
    }

    #[test]
    fn attack_rate_out_of_range() {
        let cfg = parse_scenario_str("[environment]\nattack_rate = 1.5\n")
            .unwrap()
            .base;
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.key, "environment.attack_rate");
        assert!(err.to_string().contains("[0,1]"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_scenario_str("[environment]\natack_rate = 0.1\n").unwrap_err();
        assert!(err.contains("atack_rate"), "{err}");
        assert!(parse_scenario_str("bogus = 1\n").is_err());
        assert!(parse_scenario_str("[extensions]\nteleport = true\n").is_err());
    }

    #[test]
    fn zero_ticks_rejected() {
        let cfg = parse_scenario_str("n_ticks = 0\n").unwrap().base;
        assert_eq!(cfg.validate().unwrap_err().key, "n_ticks");
    }

    #[test]
    fn radius_must_fit_grid() {
        let cfg = parse_scenario_str("[environment]\nwidth = 10\nheight = 10\n")
            .unwrap()
            .base;
        assert_eq!(
            cfg.validate().unwrap_err().key,
            "extensions.endogenous_radius"
        );
    }

    #[test]
    fn profile_validation() {
        let bad_id = "[agents]\ncount = 2\nprofiles = [{ id = 2 }]\n";
        assert_eq!(
            parse_scenario_str(bad_id)
                .unwrap()
                .base
                .validate()
                .unwrap_err()
                .key,
            "agents.profiles.0.id"
        );
        let young = "[[agents.profiles]]\nid = 1\nage = 12.0\n";
        assert_eq!(
            parse_scenario_str(young)
                .unwrap()
                .base
                .validate()
                .unwrap_err()
                .key,
            "agents.profiles.0.age"
        );
    }

    #[test]
    fn arms_override_paths() {
        let text = r#"
[agents]
count = 2
profiles = [{ id = 0, memory_length = 5 }]

[[arms]]
name = "short"
set = { "agents.profiles.0.memory_length" = 3 }

[[arms]]
name = "long"
set = { "agents.profiles.0.memory_length" = 12, "shocks.period" = 50 }
"#;
        let s = parse_scenario_str(text).unwrap();
        assert_eq!(s.arms.len(), 2);
        assert_eq!(s.arms[0].config.agents.profiles[0].memory_length, Some(3));
        assert_eq!(s.arms[1].config.agents.profiles[0].memory_length, Some(12));
        assert_eq!(s.arms[1].config.shocks.period, 50);
        assert_eq!(s.base.agents.profiles[0].memory_length, Some(5));
    }

    #[test]
    fn arm_with_unknown_key_rejected() {
        let text = "[[arms]]\nname = \"x\"\nset = { \"agents.colour\" = 1 }\n";
        assert!(parse_scenario_str(text).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = SimConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 7;
        assert_ne!(a.hash(), b.hash());
    }

    fn arb_config() -> impl Strategy<Value = SimConfig> {
        (
            0u64..=i64::MAX as u64,
            1u64..5000,
            (0.0f64..=1.0, 0.0f64..=1.0, 11usize..80),
            (
                1usize..25,
                1usize..30,
                0usize..4,
                0.0f64..3.0,
                any::<bool>(),
            ),
            proptest::collection::vec(any::<bool>(), 8),
            (
                0.0f64..1.0,
                prop_oneof![Just(ShockMode::Uniform), Just(ShockMode::PerAgentRandom)],
            ),
        )
            .prop_map(
                |(
                    seed,
                    n_ticks,
                    (ar, er, side),
                    (count, mem, sr, theta, mobile),
                    flags,
                    (mag, mode),
                )| {
                    let mut c = SimConfig {
                        seed,
                        n_ticks,
                        ..SimConfig::default()
                    };
                    c.environment.attack_rate = ar;
                    c.environment.extinction_rate = er;
                    c.environment.width = side;
                    c.environment.height = side + 1;
                    c.agents.count = count;
                    c.agents.memory_length = mem;
                    c.agents.sampling_radius = sr;
                    c.agents.theta_base = theta;
                    c.agents.profiles = vec![AgentOverride {
                        id: count - 1,
                        mobile: Some(mobile),
                        age: Some(20.5),
                        memory_length: None,
                        position: Some([0, 1]),
                    }];
                    for (name, on) in Extensions::NAMES.iter().zip(flags) {
                        *c.extensions.flag_mut(name).unwrap() = on;
                    }
                    c.shocks.magnitude = mag;
                    c.shocks.mode = mode;
                    c.environment.forced_active.push(ForcedBlock {
                        from_tick: 1,
                        to_tick: 3,
                        x: 0,
                        y: 0,
                        width: 2,
                        height: 2,
                    });
                    c
                },
            )
    }

    proptest! {
        #[test]
        fn serialize_parse_round_trip(cfg in arb_config()) {
            let text = cfg.to_toml();
            let back = parse_scenario_str(&text).unwrap().base;
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(back.to_toml(), text);
        }
    }
}
