//! Model state and the per-tick phase loop.
//!
//! Each tick runs, in order:
//!
//! 1. attack seeding and 2. extinction on the grid (plus any scripted blocks),
//! 3. perception of the post-environment grid,
//! 4. affect learning and 5. memory/probability update,
//! 6. contagion from the previous tick's solo dispositions and tie weights,
//! 7. disposition and mode,
//! 8. actions in agent-id order against a phase-start position snapshot,
//! 9. retaliation bookkeeping and damage decay,
//! 10. homophily update of the ties,
//! 11. scheduled shock,
//! 12. metrics.
//!
//! Every random draw comes from a stream owned by one role (see [`crate::rng`]),
//! so the whole trajectory is a pure function of the configuration.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::cognition::{
    activation_threshold, choose_mode, compute_disposition, destructive_radius,
    impulse_control_from_age, rescorla_wagner_update, update_probability, AgentProfile,
    CognitiveState, Mode,
};
use crate::config::{ShockMode, SimConfig};
use crate::conflict::{
    accumulate_retaliation, decay_damage, execute_fight, execute_flight, random_walk, AttackEvent,
};
use crate::environment::{Coord, Grid};
use crate::error::ConfigError;
use crate::network::TieMatrix;
use crate::rng::{derive_stream, SimRng, StreamRole};

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub profile: AgentProfile,
    pub state: CognitiveState,
    /// Destructive radius at the latest decision.
    pub radius: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentMetrics {
    pub agent_id: u32,
    pub affect: f64,
    pub probability: f64,
    pub contagion: f64,
    pub disposition: f64,
    pub mode: Mode,
    pub x: usize,
    pub y: usize,
    pub radius: usize,
    pub damage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalMetrics {
    pub destroyed_count: usize,
    pub active_count: usize,
    pub avg_tie_strength: Option<f64>,
    pub tie_strength_dispersion: Option<f64>,
    pub mean_contagion: f64,
}

/// Observables of one committed tick.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsFrame {
    pub tick: u64,
    pub agents: Vec<AgentMetrics>,
    pub global: GlobalMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickOutput {
    pub frame: MetricsFrame,
    pub attacks: Vec<AttackEvent>,
}

/// Full simulation state. Cloning yields an independent replica that
/// continues identically.
#[derive(Debug, Clone)]
pub struct Model {
    config: SimConfig,
    tick: u64,
    grid: Grid,
    agents: Vec<Agent>,
    ties: TieMatrix,
    env_rng: SimRng,
    shock_rng: SimRng,
    walk_rngs: Vec<SimRng>,
    flight_rngs: Vec<SimRng>,
}

impl Model {
    /// Build the tick-0 state: all-Calm grid, zero affect, empty memories,
    /// uniform ties.
    pub fn new(config: SimConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let seed = config.seed;
        let n = config.agents.count;
        let (w, h) = (config.environment.width, config.environment.height);
        let age_dist = Normal::new(config.agents.age_mean, config.agents.age_sd)
            .map_err(|e| ConfigError::new("agents.age_sd", e.to_string()))?;

        let mut agents = Vec::with_capacity(n);
        for id in 0..n {
            let ov = config.profile_override(id);
            let mut profile_rng = derive_stream(seed, StreamRole::Profile, id as u32);
            let drawn_age: f64 = age_dist.sample(&mut profile_rng).clamp(18.0, 100.0);
            let age = ov.and_then(|o| o.age).unwrap_or(drawn_age);
            let gamma = impulse_control_from_age(age)
                .map_err(|e| ConfigError::new(format!("agents.profiles.{id}.age"), e.constraint))?;
            let memory_length = if config.extensions.memory {
                ov.and_then(|o| o.memory_length)
                    .unwrap_or(config.agents.memory_length)
            } else {
                1
            };
            let mut place_rng = derive_stream(seed, StreamRole::Placement, id as u32);
            let drawn = Coord::new(place_rng.random_range(0..w), place_rng.random_range(0..h));
            let position = ov
                .and_then(|o| o.position)
                .map(|[x, y]| Coord::new(x, y))
                .unwrap_or(drawn);
            let profile = AgentProfile {
                agent_id: id as u32,
                mobile: ov.and_then(|o| o.mobile).unwrap_or(config.agents.mobile),
                age,
                gamma,
                memory_length,
                sampling_radius: config.agents.sampling_radius,
                flight_threshold: config.agents.p_flight,
                theta_base: config.agents.theta_base,
            };
            agents.push(Agent {
                radius: destructive_radius(
                    0.0,
                    config.extensions.endogenous_radius,
                    config.agents.fixed_radius,
                ),
                profile,
                state: CognitiveState::new(memory_length, position),
            });
        }

        Ok(Self {
            tick: 0,
            grid: Grid::new(w, h),
            ties: TieMatrix::uniform(n),
            env_rng: derive_stream(seed, StreamRole::Environment, 0),
            shock_rng: derive_stream(seed, StreamRole::Shock, 0),
            walk_rngs: (0..n)
                .map(|i| derive_stream(seed, StreamRole::Walk, i as u32))
                .collect(),
            flight_rngs: (0..n)
                .map(|i| derive_stream(seed, StreamRole::Flight, i as u32))
                .collect(),
            agents,
            config,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Number of ticks executed so far.
    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.config.n_ticks
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn ties(&self) -> &TieMatrix {
        &self.ties
    }

    /// Mutable grid access for scripted experiments and tests.
    pub fn grid_mut(&mut self) -> &mut Grid {
        &mut self.grid
    }

    /// The grid as perception will see it on the next tick (after the
    /// environment phases), without advancing the model.
    pub fn peek_environment(&self) -> Grid {
        let mut grid = self.grid.clone();
        let mut rng = self.env_rng.clone();
        apply_environment(&self.config, self.tick, &mut grid, &mut rng);
        grid
    }

    /// Execute one tick.
    pub fn step(&mut self) -> TickOutput {
        let t = self.tick;
        let cfg = &self.config;
        let ext = cfg.extensions;
        let n = self.agents.len();

        // previous tick's committed solo dispositions
        let solo_prev: Vec<f64> = self
            .agents
            .iter()
            .map(|a| a.state.solo_disposition())
            .collect();

        // 1-2
        apply_environment(cfg, t, &mut self.grid, &mut self.env_rng);

        // 3-7
        let rw = cfg.rw_params();
        let penalty = if ext.retaliation {
            cfg.conflict.damage_penalty
        } else {
            0.0
        };
        for (i, agent) in self.agents.iter_mut().enumerate() {
            let s = &mut agent.state;
            let (active, total) = self
                .grid
                .active_in_disc(s.position, agent.profile.sampling_radius);
            s.observation = active as f64 / total as f64;
            let stimulus = if active > 0 { 1.0 } else { 0.0 };
            s.affect = rescorla_wagner_update(s.affect, stimulus, rw);
            s.probability = update_probability(&mut s.memory, s.observation);
            s.contagion_in = self.ties.contagion_input(i, &solo_prev);
            let theta = activation_threshold(&agent.profile, ext.age_impulse);
            s.disposition = compute_disposition(
                s.affect,
                s.probability,
                s.contagion_in,
                theta,
                s.damage,
                penalty,
            );
            s.mode = choose_mode(
                s.disposition,
                s.probability,
                agent.profile.flight_threshold,
                ext.flight && agent.profile.mobile,
            );
            agent.radius =
                destructive_radius(s.affect, ext.endogenous_radius, cfg.agents.fixed_radius);
        }

        // 8
        let positions: Vec<Coord> = self.agents.iter().map(|a| a.state.position).collect();
        let (w, h) = (self.grid.width(), self.grid.height());
        let mut attacks = Vec::new();
        for i in 0..n {
            let agent = &mut self.agents[i];
            match agent.state.mode {
                Mode::Fight => {
                    attacks.push(execute_fight(
                        t,
                        i as u32,
                        agent.radius,
                        &mut self.grid,
                        &positions,
                    ));
                }
                Mode::Flight if agent.profile.mobile => {
                    agent.state.position = execute_flight(
                        agent.state.position,
                        agent.profile.sampling_radius,
                        cfg.conflict.flight_radius,
                        &self.grid,
                        &mut self.flight_rngs[i],
                    );
                }
                Mode::Quiet if agent.profile.mobile => {
                    agent.state.position =
                        random_walk(agent.state.position, w, h, &mut self.walk_rngs[i]);
                }
                _ => {}
            }
        }

        // 9
        if ext.retaliation {
            let params = cfg.conflict_params();
            let gammas: Vec<f64> = self.agents.iter().map(|a| a.profile.gamma).collect();
            let mut damage: Vec<f64> = self.agents.iter().map(|a| a.state.damage).collect();
            for event in &attacks {
                accumulate_retaliation(event, &gammas, &mut damage, &params);
            }
            for (agent, mut d) in self.agents.iter_mut().zip(damage) {
                decay_damage(&mut d, params.damage_decay);
                agent.state.damage = d;
            }
        }

        // 10
        if ext.homophily {
            let affects: Vec<f64> = self.agents.iter().map(|a| a.state.affect).collect();
            self.ties.homophily_update(&affects, cfg.network.alpha_hom);
        }

        // 11
        if ext.shocks && t > 0 && t.is_multiple_of(cfg.shocks.period) {
            apply_shock(
                &mut self.agents,
                cfg.shocks.magnitude,
                cfg.shocks.mode,
                &mut self.shock_rng,
            );
        }

        // 12
        let frame = self.frame(t);
        self.tick += 1;
        TickOutput { frame, attacks }
    }

    fn frame(&self, tick: u64) -> MetricsFrame {
        let agents: Vec<AgentMetrics> = self
            .agents
            .iter()
            .map(|a| AgentMetrics {
                agent_id: a.profile.agent_id,
                affect: a.state.affect,
                probability: a.state.probability,
                contagion: a.state.contagion_in,
                disposition: a.state.disposition,
                mode: a.state.mode,
                x: a.state.position.x,
                y: a.state.position.y,
                radius: a.radius,
                damage: a.state.damage,
            })
            .collect();
        let mean_contagion = agents.iter().map(|a| a.contagion).sum::<f64>() / agents.len() as f64;
        let [_, active, destroyed] = self.grid.counts();
        MetricsFrame {
            tick,
            agents,
            global: GlobalMetrics {
                destroyed_count: destroyed,
                active_count: active,
                avg_tie_strength: self.ties.average_tie_strength(),
                tie_strength_dispersion: self.ties.tie_strength_dispersion(),
                mean_contagion,
            },
        }
    }
}

fn apply_environment(cfg: &SimConfig, tick: u64, grid: &mut Grid, rng: &mut SimRng) {
    grid.seed_attacks(cfg.environment.attack_rate, rng);
    grid.extinguish(cfg.environment.extinction_rate, rng);
    for b in &cfg.environment.forced_active {
        if (b.from_tick..=b.to_tick).contains(&tick) {
            grid.force_active(Coord::new(b.x, b.y), b.width, b.height);
        }
    }
}

/// Raise affects by a shock: the full `magnitude` for everyone, or an
/// independent `U[0, magnitude]` draw per agent. Affects are capped at 1.
pub fn apply_shock<R: Rng + ?Sized>(
    agents: &mut [Agent],
    magnitude: f64,
    mode: ShockMode,
    rng: &mut R,
) {
    for agent in agents {
        let bump = match mode {
            ShockMode::Uniform => magnitude,
            ShockMode::PerAgentRandom => rng.random::<f64>() * magnitude,
        };
        agent.state.affect = (agent.state.affect + bump).min(1.0);
    }
}

/// Per-tick tie matrix, recorded when a network dump is requested.
#[derive(Debug, Clone, PartialEq)]
pub struct TieSnapshot {
    pub tick: u64,
    pub ties: TieMatrix,
}

/// Everything a complete run produces.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: SimConfig,
    pub frames: Vec<MetricsFrame>,
    pub attacks: Vec<AttackEvent>,
    pub final_grid: Grid,
    pub ties: Vec<TieSnapshot>,
}

impl Model {
    /// Step until `n_ticks`, handing each tick to `observe`.
    pub fn run_with(&mut self, mut observe: impl FnMut(&Model, &TickOutput)) {
        while !self.is_finished() {
            let out = self.step();
            observe(self, &out);
        }
    }
}

/// Run a configuration to completion.
pub fn run(config: &SimConfig) -> Result<RunResult, ConfigError> {
    let mut model = Model::new(config.clone())?;
    let dump = config.output.network_dump;
    let mut frames = Vec::with_capacity(config.n_ticks as usize);
    let mut attacks = Vec::new();
    let mut ties = Vec::new();
    model.run_with(|m, out| {
        frames.push(out.frame.clone());
        attacks.extend(out.attacks.iter().cloned());
        if dump {
            ties.push(TieSnapshot {
                tick: out.frame.tick,
                ties: m.ties().clone(),
            });
        }
    });
    Ok(RunResult {
        config: config.clone(),
        frames,
        attacks,
        final_grid: model.grid().clone(),
        ties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::AgentOverride;
    use crate::environment::{torus_distance, PatchState};

    fn small(n: usize) -> SimConfig {
        let mut c = SimConfig::default();
        c.agents.count = n;
        c.n_ticks = 200;
        c
    }

    #[test]
    fn baseline_init() {
        let m = Model::new(SimConfig::default()).unwrap();
        assert_eq!(m.agents().len(), 3);
        assert!(!m.agents()[0].profile.mobile);
        assert!(m.agents()[1].profile.mobile && m.agents()[2].profile.mobile);
        assert_eq!(m.grid().counts(), [2500, 0, 0]);
        assert!(m
            .agents()
            .iter()
            .all(|a| a.state.affect == 0.0 && a.state.memory.is_empty()));
        assert_eq!(m.ties(), &TieMatrix::uniform(3));
        assert_eq!(m.tick(), 0);
        for a in m.agents() {
            assert!((18.0..=100.0).contains(&a.profile.age));
        }
    }

    #[test]
    fn twenty_agents() {
        let mut c = SimConfig::default();
        c.agents.count = 20;
        let m = Model::new(c).unwrap();
        assert_eq!(m.agents().len(), 20);
        assert!(!m.agents()[0].profile.mobile);
        assert!(m.agents()[1..].iter().all(|a| a.profile.mobile));
    }

    #[test]
    fn init_is_deterministic() {
        let a = Model::new(SimConfig::default()).unwrap();
        let b = Model::new(SimConfig::default()).unwrap();
        assert_eq!(a.agents(), b.agents());
        assert_eq!(a.grid(), b.grid());
    }

    #[test]
    fn invalid_config_names_key() {
        let mut c = SimConfig::default();
        c.environment.extinction_rate = -0.1;
        assert_eq!(
            Model::new(c).unwrap_err().key,
            "environment.extinction_rate"
        );
    }

    #[test]
    fn threat_free_world_stays_quiet() {
        let mut c = small(4);
        c.environment.attack_rate = 0.0;
        let r = run(&c).unwrap();
        assert!(r.attacks.is_empty());
        for f in &r.frames {
            assert_eq!(f.global.active_count, 0);
            for a in &f.agents {
                assert_eq!(a.affect, 0.0);
                assert_ne!(a.mode, Mode::Fight);
            }
        }
    }

    #[test]
    fn same_seed_same_frames() {
        let c = small(5);
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert_eq!(a.frames, b.frames);
        assert_eq!(a.attacks, b.attacks);
    }

    #[test]
    fn perception_precedes_destruction() {
        // The observation on tick t is taken on the post-environment,
        // pre-action grid, so attacks on tick t never change it.
        let mut c = small(6);
        c.environment.attack_rate = 0.05;
        c.agents.theta_base = 0.1;
        let mut m = Model::new(c).unwrap();
        let mut fights = 0;
        while !m.is_finished() {
            let seen = m.peek_environment();
            let before: Vec<Coord> = m.agents().iter().map(|a| a.state.position).collect();
            let out = m.step();
            fights += out.attacks.len();
            for (a, &p) in m.agents().iter().zip(&before) {
                let expected = seen.local_activation_fraction(p, a.profile.sampling_radius);
                assert_eq!(a.state.observation, expected);
            }
        }
        assert!(fights > 0);
    }

    #[test]
    fn fight_discs_are_destroyed() {
        let c = SimConfig {
            n_ticks: 300,
            ..SimConfig::default()
        };
        let mut m = Model::new(c).unwrap();
        let mut total = 0;
        while !m.is_finished() {
            let out = m.step();
            for e in &out.attacks {
                total += 1;
                for dy in -(e.radius as isize)..=(e.radius as isize) {
                    for dx in -(e.radius as isize)..=(e.radius as isize) {
                        let cell = Coord::new(
                            crate::environment::wrap(e.center.x, dx, 50),
                            crate::environment::wrap(e.center.y, dy, 50),
                        );
                        assert_eq!(m.grid().get(cell), PatchState::Destroyed);
                    }
                }
            }
        }
        assert!(total > 0);
    }

    #[test]
    fn immobile_agent_never_moves() {
        let r = run(&SimConfig::default()).unwrap();
        let start = (r.frames[0].agents[0].x, r.frames[0].agents[0].y);
        assert!(r
            .frames
            .iter()
            .all(|f| (f.agents[0].x, f.agents[0].y) == start));
    }

    #[test]
    fn uniform_shock() {
        let mut m = Model::new(small(3)).unwrap();
        for a in &mut m.agents {
            a.state.affect = 0.5;
        }
        let mut rng = derive_stream(1, StreamRole::Shock, 0);
        apply_shock(&mut m.agents, 0.3, ShockMode::Uniform, &mut rng);
        assert!(m
            .agents
            .iter()
            .all(|a| (a.state.affect - 0.8).abs() < 1e-15));
        apply_shock(&mut m.agents, 0.0, ShockMode::PerAgentRandom, &mut rng);
        assert!(m
            .agents
            .iter()
            .all(|a| (a.state.affect - 0.8).abs() < 1e-15));
        apply_shock(&mut m.agents, 0.5, ShockMode::Uniform, &mut rng);
        assert!(m.agents.iter().all(|a| a.state.affect == 1.0));
    }

    #[test]
    fn random_shock_spreads_affects() {
        // Var of U[0, m] increments is m²/12 > 0: dispersion rises on average.
        let mut rng = derive_stream(3, StreamRole::Shock, 0);
        let mut m = Model::new(small(8)).unwrap();
        let mut rises = 0;
        let trials = 200;
        for _ in 0..trials {
            for a in &mut m.agents {
                a.state.affect = 0.2;
            }
            apply_shock(&mut m.agents, 0.5, ShockMode::PerAgentRandom, &mut rng);
            let mean = m.agents.iter().map(|a| a.state.affect).sum::<f64>() / 8.0;
            let var = m
                .agents
                .iter()
                .map(|a| (a.state.affect - mean).powi(2))
                .sum::<f64>()
                / 8.0;
            if var > 0.0 {
                rises += 1;
            }
        }
        assert_eq!(rises, trials);
    }

    #[test]
    fn harmed_sets_use_phase_start_positions() {
        let mut c = small(2);
        c.agents.profiles = vec![
            AgentOverride {
                id: 0,
                mobile: Some(false),
                position: Some([10, 10]),
                ..Default::default()
            },
            AgentOverride {
                id: 1,
                mobile: Some(true),
                position: Some([11, 10]),
                ..Default::default()
            },
        ];
        c.agents.theta_base = 0.0;
        c.extensions.age_impulse = false;
        c.environment.attack_rate = 0.5;
        let mut m = Model::new(c).unwrap();
        let before: Vec<Coord> = m.agents().iter().map(|a| a.state.position).collect();
        let out = m.step();
        for e in &out.attacks {
            for (j, &p) in before.iter().enumerate() {
                let inside =
                    j as u32 != e.attacker && torus_distance(e.center, p, 50, 50) <= e.radius;
                assert_eq!(e.harmed.contains(&(j as u32)), inside);
            }
        }
    }
}
