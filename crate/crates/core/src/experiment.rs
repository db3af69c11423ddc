//! Batch experiments: per-run summaries, multi-seed sweeps and paired-seed
//! comparisons between two configurations.
//!
//! Arms of a comparison share the master seed for each pair, so their
//! environment streams are identical and differences come from the model
//! changes alone.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cognition::Mode;
use crate::config::SimConfig;
use crate::engine::{run, RunResult};
use crate::error::{ConfigError, Result};
use crate::output::fmt6_opt;

/// Inclusive seed range written `A..B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedRange {
    pub first: u64,
    pub last: u64,
}

impl SeedRange {
    pub fn iter(&self) -> RangeInclusive<u64> {
        self.first..=self.last
    }

    pub fn len(&self) -> usize {
        (self.last - self.first + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl FromStr for SeedRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected A..B, got `{s}`"))?;
        let first: u64 = a.trim().parse().map_err(|_| format!("bad seed `{a}`"))?;
        let last: u64 = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| format!("bad seed `{b}`"))?;
        if last < first {
            return Err(format!("empty seed range `{s}`"));
        }
        Ok(Self { first, last })
    }
}

/// Named scalar statistics of one run, in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub stats: Vec<(String, Option<f64>)>,
}

impl Summary {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.stats
            .iter()
            .find(|(n, _)| n == name)
            .and_then(|(_, v)| *v)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.stats.iter().map(|(n, _)| n.as_str())
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Summarize a finished run.
pub fn summarize(result: &RunResult) -> Summary {
    let frames = &result.frames;
    let last = frames.last();
    let n = last.map_or(0, |f| f.agents.len());
    let all = || frames.iter().flat_map(|f| f.agents.iter());
    let count_mode = |m: Mode| all().filter(|a| a.mode == m).count() as f64;
    let first_fight = |id: Option<usize>| {
        frames
            .iter()
            .find(|f| {
                f.agents
                    .iter()
                    .enumerate()
                    .any(|(i, a)| a.mode == Mode::Fight && id.is_none_or(|id| id == i))
            })
            .map(|f| f.tick as f64)
    };
    let mut stats: Vec<(String, Option<f64>)> = vec![
        ("ticks".into(), Some(frames.len() as f64)),
        (
            "destroyed_count".into(),
            last.map(|f| f.global.destroyed_count as f64),
        ),
        (
            "active_count".into(),
            last.map(|f| f.global.active_count as f64),
        ),
        ("fight_count".into(), Some(count_mode(Mode::Fight))),
        ("flight_count".into(), Some(count_mode(Mode::Flight))),
        ("first_fight_tick".into(), first_fight(None)),
        ("mean_affect".into(), mean(all().map(|a| a.affect))),
        (
            "mean_probability".into(),
            mean(all().map(|a| a.probability)),
        ),
        (
            "mean_disposition".into(),
            mean(all().map(|a| a.disposition)),
        ),
        (
            "max_disposition".into(),
            all().map(|a| a.disposition).reduce(f64::max),
        ),
        (
            "mean_contagion".into(),
            mean(frames.iter().map(|f| f.global.mean_contagion)),
        ),
        (
            "avg_tie_strength".into(),
            last.and_then(|f| f.global.avg_tie_strength),
        ),
        (
            "tie_strength_dispersion".into(),
            last.and_then(|f| f.global.tie_strength_dispersion),
        ),
        (
            "total_damage".into(),
            last.map(|f| f.agents.iter().map(|a| a.damage).sum()),
        ),
    ];
    for i in 0..n {
        let agent = || frames.iter().map(move |f| &f.agents[i]);
        stats.push((
            format!("agent{i}_fights"),
            Some(agent().filter(|a| a.mode == Mode::Fight).count() as f64),
        ));
        stats.push((
            format!("agent{i}_flights"),
            Some(agent().filter(|a| a.mode == Mode::Flight).count() as f64),
        ));
        stats.push((format!("agent{i}_first_fight"), first_fight(Some(i))));
        stats.push((
            format!("agent{i}_mean_affect"),
            mean(agent().map(|a| a.affect)),
        ));
        stats.push((
            format!("agent{i}_mean_probability"),
            mean(agent().map(|a| a.probability)),
        ));
        stats.push((
            format!("agent{i}_mean_disposition"),
            mean(agent().map(|a| a.disposition)),
        ));
    }
    Summary { stats }
}

fn with_seed(config: &SimConfig, seed: u64) -> SimConfig {
    let mut c = config.clone();
    c.seed = seed;
    c
}

fn pool(parallel: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallel.max(1))
        .build()
        .expect("thread pool")
}

/// Run `config` once per seed, `parallel` runs at a time. Results come
/// back in seed order whatever the parallelism.
pub fn sweep(
    config: &SimConfig,
    seeds: SeedRange,
    parallel: usize,
) -> Result<Vec<(u64, Summary)>, ConfigError> {
    let seeds: Vec<u64> = seeds.iter().collect();
    for &s in &seeds {
        with_seed(config, s).validate()?;
    }
    let results: Vec<(u64, Summary)> = pool(parallel).install(|| {
        seeds
            .par_iter()
            .map(|&s| {
                let r = run(&with_seed(config, s)).expect("validated above");
                (s, summarize(&r))
            })
            .collect()
    });
    Ok(results)
}

pub fn sweep_csv(rows: &[(u64, Summary)]) -> String {
    let mut out = String::from("seed");
    if let Some((_, first)) = rows.first() {
        for name in first.names() {
            out.push(',');
            out.push_str(name);
        }
    }
    out.push('\n');
    for (seed, s) in rows {
        let _ = write!(out, "{seed}");
        for (_, v) in &s.stats {
            out.push(',');
            out.push_str(&fmt6_opt(*v));
        }
        out.push('\n');
    }
    out
}

/// One seed of a paired comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Pair {
    pub seed: u64,
    pub a: Summary,
    pub b: Summary,
}

/// Run both configurations on every seed.
pub fn compare(
    a: &SimConfig,
    b: &SimConfig,
    seeds: SeedRange,
    parallel: usize,
) -> Result<Vec<Pair>, ConfigError> {
    let seeds: Vec<u64> = seeds.iter().collect();
    for &s in &seeds {
        with_seed(a, s).validate()?;
        with_seed(b, s).validate()?;
    }
    Ok(pool(parallel).install(|| {
        seeds
            .par_iter()
            .map(|&s| {
                let ra = run(&with_seed(a, s)).expect("validated above");
                let rb = run(&with_seed(b, s)).expect("validated above");
                Pair {
                    seed: s,
                    a: summarize(&ra),
                    b: summarize(&rb),
                }
            })
            .collect()
    }))
}

/// Wide CSV: per shared statistic, the A value, the B value and `B − A`.
pub fn compare_csv(pairs: &[Pair]) -> String {
    let names: Vec<String> = match pairs.first() {
        Some(p) => {
            p.a.names()
                .filter(|n| p.b.names().any(|m| m == *n))
                .map(str::to_string)
                .collect()
        }
        None => Vec::new(),
    };
    let mut out = String::from("seed");
    for n in &names {
        let _ = write!(out, ",{n}_a,{n}_b,{n}_delta");
    }
    out.push('\n');
    for p in pairs {
        let _ = write!(out, "{}", p.seed);
        for n in &names {
            let (va, vb) = (p.a.get(n), p.b.get(n));
            let delta = va.zip(vb).map(|(x, y)| y - x);
            let _ = write!(
                out,
                ",{},{},{}",
                fmt6_opt(va),
                fmt6_opt(vb),
                fmt6_opt(delta)
            );
        }
        out.push('\n');
    }
    out
}
