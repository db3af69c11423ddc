//! Per-agent cognition: affect learning, memory-based risk, impulse control,
//! thresholds, destructive radius and disposition.

use std::collections::VecDeque;

use crate::environment::Coord;
use crate::error::ConfigError;

/// Lower bound on impulse control; keeps thresholds finite.
pub const GAMMA_MIN: f64 = 0.05;

/// Behavioral mode chosen each tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[repr(u8)]
pub enum Mode {
    #[default]
    Quiet = 0,
    Fight = 1,
    Flight = 2,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Quiet => "QUIET",
            Mode::Fight => "FIGHT",
            Mode::Flight => "FLIGHT",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "QUIET" => Some(Mode::Quiet),
            "FIGHT" => Some(Mode::Fight),
            "FLIGHT" => Some(Mode::Flight),
            _ => None,
        }
    }
}

/// Static per-agent traits.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentProfile {
    pub agent_id: u32,
    pub mobile: bool,
    pub age: f64,
    pub gamma: f64,
    pub memory_length: usize,
    pub sampling_radius: usize,
    pub flight_threshold: f64,
    pub theta_base: f64,
}

/// Rescorla-Wagner constants; the update step is `alpha_rw * beta_rw`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwParams {
    pub alpha_rw: f64,
    pub beta_rw: f64,
}

impl RwParams {
    pub fn rate(&self) -> f64 {
        self.alpha_rw * self.beta_rw
    }
}

impl Default for RwParams {
    fn default() -> Self {
        Self {
            alpha_rw: 0.5,
            beta_rw: 0.6,
        }
    }
}

/// Fixed-capacity window of recent local activation fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct Memory {
    capacity: usize,
    entries: VecDeque<f64>,
}

impl Memory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "memory length must be at least 1");
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().copied()
    }

    pub fn push(&mut self, observation: f64) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(observation);
    }

    /// Mean of the retained entries; 0 when empty.
    pub fn mean(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        self.entries.iter().sum::<f64>() / self.entries.len() as f64
    }
}

/// Dynamic per-agent state.
#[derive(Debug, Clone, PartialEq)]
pub struct CognitiveState {
    pub affect: f64,
    pub memory: Memory,
    pub probability: f64,
    pub contagion_in: f64,
    pub disposition: f64,
    pub mode: Mode,
    pub damage: f64,
    pub position: Coord,
    /// Local activation fraction perceived this tick.
    pub observation: f64,
}

impl CognitiveState {
    pub fn new(memory_length: usize, position: Coord) -> Self {
        Self {
            affect: 0.0,
            memory: Memory::new(memory_length),
            probability: 0.0,
            contagion_in: 0.0,
            disposition: 0.0,
            mode: Mode::Quiet,
            damage: 0.0,
            position,
            observation: 0.0,
        }
    }

    /// Affect plus probability: what this agent transmits to its peers.
    pub fn solo_disposition(&self) -> f64 {
        self.affect + self.probability
    }
}

/// `γ = 1 − (age − 18)/100`, clamped to `[GAMMA_MIN, 1]`.
pub fn impulse_control_from_age(age: f64) -> Result<f64, ConfigError> {
    if age.is_nan() || age < 18.0 {
        return Err(ConfigError::new(
            "age",
            format!("must be >= 18 (got {age})"),
        ));
    }
    Ok((1.0 - (age - 18.0) / 100.0).clamp(GAMMA_MIN, 1.0))
}

/// One Rescorla-Wagner step toward `stimulus` (1 on threat exposure, 0 otherwise).
pub fn rescorla_wagner_update(affect: f64, stimulus: f64, params: RwParams) -> f64 {
    affect + params.rate() * (stimulus - affect)
}

/// Push `observation` into the window and return the new risk estimate.
pub fn update_probability(memory: &mut Memory, observation: f64) -> f64 {
    memory.push(observation);
    memory.mean()
}

/// `⌊1 + 4·affect⌋` when endogenous, otherwise the fixed radius.
pub fn destructive_radius(affect: f64, endogenous: bool, fixed_radius: usize) -> usize {
    if endogenous {
        (1.0 + 4.0 * affect).floor() as usize
    } else {
        fixed_radius
    }
}

/// Activation threshold: `theta_base / gamma` with the age extension on,
/// `theta_base` otherwise.
pub fn activation_threshold(profile: &AgentProfile, age_impulse: bool) -> f64 {
    if age_impulse {
        profile.theta_base / profile.gamma
    } else {
        profile.theta_base
    }
}

/// `D = A + P + C − θ − k·R`.
pub fn compute_disposition(
    affect: f64,
    probability: f64,
    contagion: f64,
    theta: f64,
    damage: f64,
    damage_penalty_coeff: f64,
) -> f64 {
    affect + probability + contagion - theta - damage_penalty_coeff * damage
}

/// Fight when disposition is positive; otherwise flee if allowed and risk
/// is at or above the flight threshold; otherwise stay quiet.
pub fn choose_mode(
    disposition: f64,
    probability: f64,
    p_flight: f64,
    flight_enabled: bool,
) -> Mode {
    if disposition > 0.0 {
        Mode::Fight
    } else if flight_enabled && probability >= p_flight {
        Mode::Flight
    } else {
        Mode::Quiet
    }
}

/// Disposition over an affect × contagion grid at fixed probability and
/// threshold; indexed `[affect][contagion]`.
pub fn disposition_surface(
    affects: &[f64],
    contagions: &[f64],
    p_fixed: f64,
    theta_fixed: f64,
) -> Vec<Vec<f64>> {
    affects
        .iter()
        .map(|&a| {
            contagions
                .iter()
                .map(|&c| compute_disposition(a, p_fixed, c, theta_fixed, 0.0, 0.0))
                .collect()
        })
        .collect()
}
