//! Toroidal patch grid and its threat dynamics.
//!
//! Patches are Calm, Active (a local threat) or Destroyed. Calm patches are
//! attacked at a per-tick rate, Active patches go extinct at another rate,
//! and Destroyed is absorbing. All neighborhoods are Chebyshev (Moore) discs
//! of side `2r + 1` that wrap at the edges.

use std::io::Write;

use rand::Rng;

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[repr(u8)]
pub enum PatchState {
    #[default]
    Calm = 0,
    Active = 1,
    Destroyed = 2,
}

impl PatchState {
    pub fn as_char(self) -> char {
        match self {
            PatchState::Calm => '.',
            PatchState::Active => 'o',
            PatchState::Destroyed => 'X',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '.' => Some(PatchState::Calm),
            'o' => Some(PatchState::Active),
            'X' => Some(PatchState::Destroyed),
            _ => None,
        }
    }

    pub fn rgb(self) -> [u8; 3] {
        match self {
            PatchState::Calm => [255, 255, 0],
            PatchState::Active => [255, 165, 0],
            PatchState::Destroyed => [139, 0, 0],
        }
    }
}

/// A grid coordinate; `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Coord {
    pub x: usize,
    pub y: usize,
}

impl Coord {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// Per-tick transition probabilities of the environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvParams {
    pub attack_rate: f64,
    pub extinction_rate: f64,
}

/// Wrap `base + offset` onto `0..len`.
#[inline]
pub fn wrap(base: usize, offset: isize, len: usize) -> usize {
    (base as isize + offset).rem_euclid(len as isize) as usize
}

/// Toroidal Chebyshev distance between two cells.
pub fn torus_distance(a: Coord, b: Coord, width: usize, height: usize) -> usize {
    let dx = a.x.abs_diff(b.x);
    let dy = a.y.abs_diff(b.y);
    dx.min(width - dx).max(dy.min(height - dy))
}

/// Offsets of a disc of `radius` along an axis of `len` cells, clipped so a
/// disc wider than the axis never visits a cell twice.
fn axis_offsets(radius: usize, len: usize) -> impl Iterator<Item = isize> + Clone {
    let span = (2 * radius + 1).min(len) as isize;
    let start = -(radius as isize);
    start..start + span
}

/// Distinct cells within Chebyshev distance `radius` of `center`, row-major
/// by offset.
fn disc_cells(
    center: Coord,
    radius: usize,
    width: usize,
    height: usize,
) -> impl Iterator<Item = Coord> {
    let xs = axis_offsets(radius, width);
    axis_offsets(radius, height).flat_map(move |dy| {
        let y = wrap(center.y, dy, height);
        xs.clone()
            .map(move |dx| Coord::new(wrap(center.x, dx, width), y))
    })
}

/// The `(2r+1)²` wrapped coordinates around `center`.
///
/// Fails when the disc would wrap onto itself, i.e. when `2r + 1` exceeds
/// either grid dimension.
pub fn toroidal_neighborhood(
    center: Coord,
    radius: usize,
    width: usize,
    height: usize,
) -> Result<Vec<Coord>, ConfigError> {
    if 2 * radius + 1 > width.min(height) {
        return Err(ConfigError::new(
            "radius",
            format!(
                "radius {radius} does not fit a {width}x{height} torus (need 2r+1 <= {})",
                width.min(height)
            ),
        ));
    }
    Ok(disc_cells(center, radius, width, height).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    width: usize,
    height: usize,
    cells: Vec<PatchState>,
}

impl Grid {
    /// An all-Calm grid.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        Self {
            width,
            height,
            cells: vec![PatchState::Calm; width * height],
        }
    }

    pub fn from_cells(width: usize, height: usize, cells: Vec<PatchState>) -> Self {
        assert_eq!(
            cells.len(),
            width * height,
            "cell count must be width*height"
        );
        Self {
            width,
            height,
            cells,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> &[PatchState] {
        &self.cells
    }

    #[inline]
    fn index(&self, c: Coord) -> usize {
        c.y * self.width + c.x
    }

    pub fn get(&self, c: Coord) -> PatchState {
        self.cells[self.index(c)]
    }

    pub fn set(&mut self, c: Coord, state: PatchState) {
        let i = self.index(c);
        self.cells[i] = state;
    }

    /// `[calm, active, destroyed]`.
    pub fn counts(&self) -> [usize; 3] {
        let mut counts = [0usize; 3];
        for &s in &self.cells {
            counts[s as usize] += 1;
        }
        counts
    }

    pub fn count(&self, state: PatchState) -> usize {
        self.cells.iter().filter(|&&s| s == state).count()
    }

    /// Each Calm patch becomes Active with probability `attack_rate`.
    ///
    /// One uniform is drawn for every patch in row-major order, whatever its
    /// state, so the stream stays aligned cell-by-cell across runs whose
    /// grids have diverged. Returns the number of patches flipped.
    pub fn seed_attacks<R: Rng + ?Sized>(&mut self, attack_rate: f64, rng: &mut R) -> usize {
        self.transition(PatchState::Calm, PatchState::Active, attack_rate, rng)
    }

    /// Each Active patch reverts to Calm with probability `extinction_rate`.
    pub fn extinguish<R: Rng + ?Sized>(&mut self, extinction_rate: f64, rng: &mut R) -> usize {
        self.transition(PatchState::Active, PatchState::Calm, extinction_rate, rng)
    }

    fn transition<R: Rng + ?Sized>(
        &mut self,
        from: PatchState,
        to: PatchState,
        p: f64,
        rng: &mut R,
    ) -> usize {
        let mut flipped = 0;
        for cell in &mut self.cells {
            let u: f64 = rng.random();
            if *cell == from && u < p {
                *cell = to;
                flipped += 1;
            }
        }
        flipped
    }

    /// Number of Active patches within the disc, and the disc's cell count.
    pub fn active_in_disc(&self, center: Coord, radius: usize) -> (usize, usize) {
        let mut active = 0;
        let mut total = 0;
        for c in disc_cells(center, radius, self.width, self.height) {
            total += 1;
            if self.get(c) == PatchState::Active {
                active += 1;
            }
        }
        (active, total)
    }

    /// Fraction of Active patches in the disc around `center` (center included).
    pub fn local_activation_fraction(&self, center: Coord, radius: usize) -> f64 {
        let (active, total) = self.active_in_disc(center, radius);
        active as f64 / total as f64
    }

    /// Destroy every non-Destroyed patch in the disc; returns the number changed.
    pub fn destroy_disc(&mut self, center: Coord, radius: usize) -> usize {
        let mut changed = 0;
        for c in disc_cells(center, radius, self.width, self.height) {
            let i = self.index(c);
            if self.cells[i] != PatchState::Destroyed {
                self.cells[i] = PatchState::Destroyed;
                changed += 1;
            }
        }
        changed
    }

    /// Force the non-Destroyed patches of a rectangle (wrapping) to Active.
    pub fn force_active(&mut self, origin: Coord, w: usize, h: usize) -> usize {
        let mut changed = 0;
        for dy in 0..h.min(self.height) {
            for dx in 0..w.min(self.width) {
                let c = Coord::new(
                    wrap(origin.x, dx as isize, self.width),
                    wrap(origin.y, dy as isize, self.height),
                );
                let i = self.index(c);
                if self.cells[i] == PatchState::Calm {
                    self.cells[i] = PatchState::Active;
                    changed += 1;
                }
            }
        }
        changed
    }

    /// Plain-text snapshot: header `tick=<t> w=<w> h=<h>` then one line per row.
    pub fn snapshot_text(&self, tick: u64) -> String {
        let mut out = String::with_capacity((self.width + 1) * (self.height + 1) + 32);
        out.push_str(&format!("tick={tick} w={} h={}\n", self.width, self.height));
        for row in self.cells.chunks(self.width) {
            out.extend(row.iter().map(|s| s.as_char()));
            out.push('\n');
        }
        out
    }

    /// Parse a snapshot produced by [`Grid::snapshot_text`]; returns the tick too.
    pub fn parse_snapshot(text: &str) -> Option<(u64, Grid)> {
        let mut lines = text.lines();
        let header = lines.next()?;
        let mut tick = None;
        let mut w = None;
        let mut h = None;
        for field in header.split_whitespace() {
            let (k, v) = field.split_once('=')?;
            match k {
                "tick" => tick = v.parse().ok(),
                "w" => w = v.parse().ok(),
                "h" => h = v.parse().ok(),
                _ => return None,
            }
        }
        let (tick, w, h): (u64, usize, usize) = (tick?, w?, h?);
        let mut cells = Vec::with_capacity(w * h);
        for line in lines.by_ref().take(h) {
            if line.chars().count() != w {
                return None;
            }
            for ch in line.chars() {
                cells.push(PatchState::from_char(ch)?);
            }
        }
        (cells.len() == w * h).then(|| (tick, Grid::from_cells(w, h, cells)))
    }

    /// Binary PPM (P6), one pixel per patch.
    pub fn write_ppm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        let mut pixels = Vec::with_capacity(self.cells.len() * 3);
        for s in &self.cells {
            pixels.extend_from_slice(&s.rgb());
        }
        out.write_all(&pixels)
    }
}
