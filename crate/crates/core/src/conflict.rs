//! Agent actions: destructive fights, flight to safer ground, random walks,
//! and the retaliatory damage ledger.

use rand::Rng;

use crate::environment::{torus_distance, wrap, Coord, Grid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConflictParams {
    /// Aggression scaling: damage dealt per harmed agent is `alpha_aggr·(1 − γ_attacker)`.
    pub alpha_aggr: f64,
    /// Retaliation sensitivity: attacker accrues `beta_ret·(1 − γ_j)` per harmed `j`.
    pub beta_ret: f64,
    pub damage_decay: f64,
    pub flight_radius: usize,
}

impl Default for ConflictParams {
    fn default() -> Self {
        Self {
            alpha_aggr: 0.5,
            beta_ret: 0.5,
            damage_decay: 0.98,
            flight_radius: 5,
        }
    }
}

/// One destructive action.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackEvent {
    pub tick: u64,
    pub attacker: u32,
    pub center: Coord,
    pub radius: usize,
    pub patches_destroyed: usize,
    /// Other agents inside the attack disc, ascending id.
    pub harmed: Vec<u32>,
}

/// Agents other than `attacker` within Chebyshev distance `radius` of `center`.
pub fn harmed_set(
    attacker: u32,
    center: Coord,
    radius: usize,
    positions: &[Coord],
    width: usize,
    height: usize,
) -> Vec<u32> {
    positions
        .iter()
        .enumerate()
        .filter(|&(j, &p)| {
            j as u32 != attacker && torus_distance(center, p, width, height) <= radius
        })
        .map(|(j, _)| j as u32)
        .collect()
}

/// Destroy the disc around the attacker and record who was caught in it.
/// `positions` is the phase-start snapshot of every agent's position.
pub fn execute_fight(
    tick: u64,
    attacker: u32,
    radius: usize,
    grid: &mut Grid,
    positions: &[Coord],
) -> AttackEvent {
    let center = positions[attacker as usize];
    let patches_destroyed = grid.destroy_disc(center, radius);
    let harmed = harmed_set(
        attacker,
        center,
        radius,
        positions,
        grid.width(),
        grid.height(),
    );
    AttackEvent {
        tick,
        attacker,
        center,
        radius,
        patches_destroyed,
        harmed,
    }
}

pub fn inflicted_damage(alpha_aggr: f64, ic_attacker: f64) -> f64 {
    alpha_aggr * (1.0 - ic_attacker)
}

/// Retaliation owed by an attacker for harming agents with impulse
/// controls `harmed_gammas`.
pub fn retaliation_increment(beta_ret: f64, harmed_gammas: impl IntoIterator<Item = f64>) -> f64 {
    harmed_gammas
        .into_iter()
        .map(|g| beta_ret * (1.0 - g))
        .sum()
}

/// Book an attack: the attacker accrues retaliation, each harmed agent
/// takes inflicted damage. Returns the attacker's increment.
pub fn accumulate_retaliation(
    event: &AttackEvent,
    gammas: &[f64],
    damage: &mut [f64],
    params: &ConflictParams,
) -> f64 {
    let attacker = event.attacker as usize;
    let r = retaliation_increment(
        params.beta_ret,
        event.harmed.iter().map(|&j| gammas[j as usize]),
    );
    damage[attacker] += r;
    let dealt = inflicted_damage(params.alpha_aggr, gammas[attacker]);
    for &j in &event.harmed {
        damage[j as usize] += dealt;
    }
    r
}

pub fn decay_damage(damage: &mut f64, damage_decay: f64) {
    *damage *= damage_decay;
}

/// Move to the cell within `flight_radius` whose sampling disc has the
/// fewest Active patches. Ties are broken uniformly over the tied cells,
/// enumerated row-major by offset.
pub fn execute_flight<R: Rng + ?Sized>(
    position: Coord,
    sampling_radius: usize,
    flight_radius: usize,
    grid: &Grid,
    rng: &mut R,
) -> Coord {
    let (w, h) = (grid.width(), grid.height());
    let span_y = (2 * flight_radius + 1).min(h) as isize;
    let span_x = (2 * flight_radius + 1).min(w) as isize;
    let start = -(flight_radius as isize);
    let mut best = usize::MAX;
    let mut tied: Vec<Coord> = Vec::new();
    for dy in start..start + span_y {
        for dx in start..start + span_x {
            let c = Coord::new(wrap(position.x, dx, w), wrap(position.y, dy, h));
            let (active, _) = grid.active_in_disc(c, sampling_radius);
            if active < best {
                best = active;
                tied.clear();
            }
            if active == best {
                tied.push(c);
            }
        }
    }
    if tied.len() == 1 {
        tied[0]
    } else {
        tied[rng.random_range(0..tied.len())]
    }
}

/// The eight Moore steps, row-major.
pub const MOORE_STEPS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// One uniformly chosen Moore step on the torus.
pub fn random_walk<R: Rng + ?Sized>(
    position: Coord,
    width: usize,
    height: usize,
    rng: &mut R,
) -> Coord {
    let (dx, dy) = MOORE_STEPS[rng.random_range(0..MOORE_STEPS.len())];
    Coord::new(wrap(position.x, dx, width), wrap(position.y, dy, height))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::PatchState;
    use crate::rng::{derive_stream, StreamRole};

    fn rng() -> crate::rng::SimRng {
        derive_stream(11, StreamRole::Flight, 0)
    }

    #[test]
    fn lone_fighter_harms_nobody() {
        let mut g = Grid::new(20, 20);
        let e = execute_fight(0, 0, 1, &mut g, &[Coord::new(5, 5), Coord::new(15, 15)]);
        assert_eq!(e.patches_destroyed, 9);
        assert!(e.harmed.is_empty());
    }

    #[test]
    fn harmed_at_exact_radius() {
        let mut g = Grid::new(20, 20);
        let pos = [Coord::new(5, 5), Coord::new(7, 3), Coord::new(8, 5)];
        let e = execute_fight(0, 0, 2, &mut g, &pos);
        assert_eq!(e.patches_destroyed, 25);
        assert_eq!(e.harmed, vec![1]);
    }

    #[test]
    fn overlapping_fights_do_not_double_count() {
        let mut g = Grid::new(20, 20);
        let pos = [Coord::new(5, 5), Coord::new(6, 5)];
        let a = execute_fight(0, 0, 1, &mut g, &pos);
        let b = execute_fight(0, 1, 1, &mut g, &pos);
        assert_eq!(a.patches_destroyed, 9);
        assert_eq!(b.patches_destroyed, 3);
        assert_eq!(g.count(PatchState::Destroyed), 12);
        assert_eq!(a.harmed, vec![1]);
        assert_eq!(b.harmed, vec![0]);
    }

    #[test]
    fn inflicted_values() {
        assert_eq!(inflicted_damage(0.5, 1.0), 0.0);
        assert_eq!(inflicted_damage(1.0, 0.0), 1.0);
        assert!((inflicted_damage(0.8, 0.5) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn retaliation_values() {
        assert_eq!(retaliation_increment(0.4, []), 0.0);
        assert!((retaliation_increment(0.4, [0.5, 0.5]) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn booking_an_attack() {
        let params = ConflictParams {
            alpha_aggr: 0.8,
            beta_ret: 0.4,
            ..ConflictParams::default()
        };
        let event = AttackEvent {
            tick: 0,
            attacker: 0,
            center: Coord::new(0, 0),
            radius: 1,
            patches_destroyed: 9,
            harmed: vec![1, 2],
        };
        let mut damage = vec![0.0; 3];
        let r = accumulate_retaliation(&event, &[0.5, 0.5, 0.5], &mut damage, &params);
        assert!((r - 0.4).abs() < 1e-15);
        assert!((damage[0] - 0.4).abs() < 1e-15);
        assert!((damage[1] - 0.4).abs() < 1e-15);
        assert!((damage[2] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn decay_values() {
        let mut d = 1.0;
        decay_damage(&mut d, 0.9);
        assert_eq!(d, 0.9);
        decay_damage(&mut d, 1.0);
        assert_eq!(d, 0.9);
        decay_damage(&mut d, 0.0);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn flight_picks_unique_safe_cell() {
        // Everything Active except (12,10); sampling radius 0 leaves one safe cell.
        let mut g = Grid::from_cells(20, 20, vec![PatchState::Active; 400]);
        g.set(Coord::new(12, 10), PatchState::Calm);
        let mut r = rng();
        for _ in 0..20 {
            assert_eq!(
                execute_flight(Coord::new(10, 10), 0, 3, &g, &mut r),
                Coord::new(12, 10)
            );
        }
    }

    #[test]
    fn flight_radius_zero_stays() {
        let g = Grid::new(20, 20);
        assert_eq!(
            execute_flight(Coord::new(3, 4), 1, 0, &g, &mut rng()),
            Coord::new(3, 4)
        );
    }

    #[test]
    fn flight_destination_is_the_minimum() {
        let mut g = Grid::new(21, 21);
        let mut r = derive_stream(3, StreamRole::Environment, 0);
        g.seed_attacks(0.4, &mut r);
        let mut fr = rng();
        for y in 0..21 {
            for x in 0..21 {
                let here = Coord::new(x, y);
                let dest = execute_flight(here, 1, 2, &g, &mut fr);
                let best = crate::environment::toroidal_neighborhood(here, 2, 21, 21)
                    .unwrap()
                    .into_iter()
                    .map(|c| g.local_activation_fraction(c, 1))
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(g.local_activation_fraction(dest, 1), best);
                assert!(torus_distance(here, dest, 21, 21) <= 2);
            }
        }
    }

    #[test]
    fn flight_ties_are_uniform() {
        // All 25 candidates equally safe; chi-square with 24 dof, the 0.999
        // quantile is 51.18.
        let g = Grid::new(30, 30);
        let mut r = rng();
        let center = Coord::new(0, 0);
        let cells = crate::environment::toroidal_neighborhood(center, 2, 30, 30).unwrap();
        let mut counts = vec![0usize; cells.len()];
        let draws = 25_000;
        for _ in 0..draws {
            let d = execute_flight(center, 1, 2, &g, &mut r);
            counts[cells.iter().position(|&c| c == d).unwrap()] += 1;
        }
        let expected = draws as f64 / cells.len() as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 51.18, "chi2 {chi2}");
    }

    #[test]
    fn walk_directions_uniform() {
        let mut r = derive_stream(9, StreamRole::Walk, 0);
        let mut counts = [0usize; 8];
        let start = Coord::new(10, 10);
        for _ in 0..80_000 {
            let next = random_walk(start, 50, 50, &mut r);
            let dx = next.x as isize - 10;
            let dy = next.y as isize - 10;
            counts[MOORE_STEPS.iter().position(|&s| s == (dx, dy)).unwrap()] += 1;
        }
        // binomial(80000, 1/8): sd = sqrt(80000·(1/8)·(7/8)) ≈ 93.5
        let sd = (80_000.0f64 * 0.125 * 0.875).sqrt();
        for c in counts {
            assert!((c as f64 - 10_000.0).abs() < 3.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn walk_wraps_at_origin() {
        // keep drawing until the up-left step comes out
        let mut r = derive_stream(1, StreamRole::Walk, 0);
        let seen = (0..200)
            .map(|_| random_walk(Coord::new(0, 0), 50, 50, &mut r))
            .any(|c| c == Coord::new(49, 49));
        assert!(seen);
    }
}
