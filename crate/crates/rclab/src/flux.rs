//! Token-flow simulation of information flux through a causal boundary.
//!
//! A closed box of lattice sites holds indistinguishable tokens, at most
//! one per site.  Each tick a flow rule proposes one move of at most
//! `c_flow` cells (L∞) per token; committed moves form a partial
//! permutation of sites (no two tokens enter one site, nobody enters an
//! occupied site whose occupant stays), so the token count is conserved
//! exactly — a discrete stand-in for phase-volume preservation.  Moves
//! that lose a destination claim or target a blocked site are rejected for
//! the tick and reported in diagnostics.
//!
//! A reference sphere of L∞ radius r(t) = r0 + c_ball·t (0 ≤ c_ball ≤
//! c_flow) is tracked alongside.  Each committed move is classified
//! against the radius the sphere had when the move began: a hop from A to
//! B counts outward when ‖A‖ ≤ r < ‖B‖ and inward when ‖B‖ ≤ r < ‖A‖.
//! Every trace row carries the ceiling rho_max·(c_flow + |r'|)·area(r),
//! the most tokens any conservative flow can push through the sphere in
//! one tick; the net crossing count never exceeds it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::checker::{fit_scaling_exponent, CheckerError, FitResult};
use crate::geometry::lattice_sphere_sites;

/// Maximum supported dimension for flux runs.
pub const MAX_FLUX_DIM: usize = 6;

/// Maximum number of lattice sites per run; occupancy is a dense grid.
pub const MAX_SITES: i64 = 1 << 24;

type SiteArr = [i64; MAX_FLUX_DIM];

fn norm(d: usize, s: &SiteArr) -> i64 {
    s[..d].iter().map(|&c| c.abs()).max().unwrap_or(0)
}

/// Radially outward hop: every coordinate steps away from zero; the
/// origin, which has no outward direction, steps along the first axis.
/// Injective over the whole lattice.
fn radial_out(d: usize, s: &SiteArr) -> SiteArr {
    let mut out = *s;
    if norm(d, s) == 0 {
        out[0] = 1;
        return out;
    }
    for c in out[..d].iter_mut() {
        *c += c.signum();
    }
    out
}

/// Radially inward hop: every coordinate steps toward zero.  Inverse of
/// [`radial_out`] on its range; identity at the origin.
fn radial_in(d: usize, s: &SiteArr) -> SiteArr {
    let mut out = *s;
    for c in out[..d].iter_mut() {
        *c -= c.signum();
    }
    out
}

/// Next site on the square ring through `s` (d = 2), walking the
/// perimeter in a fixed orientation.  One L∞ step, radius preserved.
fn ring_next(s: &SiteArr) -> SiteArr {
    let (x, y) = (s[0], s[1]);
    let r = x.abs().max(y.abs());
    let mut out = *s;
    if x == r && y < r {
        out[1] = y + 1; // right edge, upward
    } else if y == r && x > -r {
        out[0] = x - 1; // top edge, leftward
    } else if x == -r && y > -r {
        out[1] = y - 1; // left edge, downward
    } else {
        out[0] = x + 1; // bottom edge, rightward
    }
    out
}

/// How tokens move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxRule {
    /// Every token hops radially outward every tick.
    Outflow,
    /// A token hops inward exactly when it sits one cell outside the
    /// sphere; pile-ups inside demonstrate blocked-move diagnostics.
    Inflow,
    /// Radial oscillation: outward on odd ticks, inward on even ticks.
    /// Against a growing sphere this carries ~area(r(t)) crossings per
    /// tick, the saturating flow for the crossing bound.
    Radial,
    /// Rotation along square rings (d = 2 only): radius never changes.
    Tangential,
    /// Each token proposes a uniformly random neighbor hop.
    RandomWalk { seed: u64 },
    /// No token ever moves.
    ZeroVelocity,
}

/// Initial token layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitPattern {
    Empty,
    /// One token at the origin.
    Origin,
    /// Every site with ‖x‖ ≤ r.
    Ball { r: i64 },
    /// Every site with inner ≤ ‖x‖ ≤ outer.
    Annulus { inner: i64, outer: i64 },
}

impl InitPattern {
    fn max_radius(&self) -> i64 {
        match *self {
            InitPattern::Empty | InitPattern::Origin => 0,
            InitPattern::Ball { r } => r,
            InitPattern::Annulus { outer, .. } => outer,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxConfig {
    pub d: u32,
    /// Sites are confined to [−extent, extent] per axis (closed box).
    pub extent: i64,
    /// Sphere radius at tick 0.
    pub r0: i64,
    /// Sphere growth per tick; 0 ≤ c_ball ≤ c_flow.
    pub c_ball: i64,
    /// Token speed limit per tick (cells, L∞).
    pub c_flow: i64,
    /// Maximum tokens per site; only 1 is supported.
    pub rho_max: u32,
    pub rule: FluxRule,
    pub init: InitPattern,
    pub ticks: u32,
}

impl FluxConfig {
    /// A config with speed 1, density 1, and a box sized so the walls
    /// never interfere with `ticks` ticks of motion.
    pub fn standard(d: u32, rule: FluxRule, init: InitPattern, r0: i64, c_ball: i64, ticks: u32) -> Self {
        FluxConfig {
            d,
            extent: init.max_radius() + r0.max(0) + ticks as i64 + 2,
            r0,
            c_ball,
            c_flow: 1,
            rho_max: 1,
            rule,
            init,
            ticks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FluxError {
    #[error("dimension {d} outside supported range 1..={max}")]
    BadDimension { d: u32, max: usize },
    #[error("lattice of {sites} sites exceeds the {max}-site limit")]
    TooManySites { sites: i64, max: i64 },
    #[error("extent must be at least 1, got {extent}")]
    BadExtent { extent: i64 },
    #[error("only rho_max = 1 is supported, got {rho_max}")]
    UnsupportedDensity { rho_max: u32 },
    #[error("need 0 ≤ c_ball ≤ c_flow, got c_ball={c_ball}, c_flow={c_flow}")]
    BadSpeeds { c_ball: i64, c_flow: i64 },
    #[error("only c_flow = 1 is supported, got {c_flow}")]
    UnsupportedFlowSpeed { c_flow: i64 },
    #[error("tangential rule is defined for d = 2, got d={d}")]
    TangentialDimension { d: u32 },
    #[error("initial radius {r} exceeds extent {extent}")]
    InitOutsideBox { r: i64, extent: i64 },
    #[error("negative initial sphere radius {r0}")]
    NegativeRadius { r0: i64 },
    #[error("run needs at least 1 tick")]
    NoTicks,
    #[error("eps must lie strictly between 0 and 1, got {eps}")]
    EpsOutOfRange { eps: f64 },
    #[error(transparent)]
    Fit(#[from] CheckerError),
}

/// One tick of measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FluxRow {
    pub tick: i64,
    /// Sphere radius r(tick) after this tick.
    pub radius: i64,
    /// Radius the sphere had when the tick's moves departed, i.e. the
    /// sphere the crossings are classified against: r(tick − 1).
    pub radius_crossed: i64,
    pub crossings_in: u64,
    pub crossings_out: u64,
    /// rho_max·(c_flow + |r(t) − r(t−1)|)·area(r(t)).
    pub bound: u64,
    /// Moves rejected this tick (claim losses and occupied targets).
    pub blocked: u64,
}

impl FluxRow {
    pub fn gross(&self) -> u64 {
        self.crossings_in + self.crossings_out
    }

    pub fn net_within_bound(&self) -> bool {
        self.crossings_in.abs_diff(self.crossings_out) <= self.bound
    }
}

/// A completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxTrace {
    pub d: u32,
    pub rows: Vec<FluxRow>,
    /// Token count, identical before and after every tick.
    pub token_count: usize,
    pub cumulative_in: u64,
    pub cumulative_out: u64,
    pub total_blocked: u64,
}

/// Live simulation state; value semantics, one logical thread.
#[derive(Debug, Clone)]
pub struct FluxState {
    d: usize,
    extent: i64,
    r0: i64,
    c_ball: i64,
    c_flow: i64,
    rho_max: u32,
    rule: FluxRule,
    tick: i64,
    tokens: Vec<SiteArr>,
    /// Dense site → token index map; `EMPTY` marks a free site.
    occupancy: Vec<u32>,
    /// Row-major strides for the (2·extent+1)^d grid.
    strides: [i64; MAX_FLUX_DIM],
    cumulative_in: u64,
    cumulative_out: u64,
    total_blocked: u64,
    rng: Option<ChaCha8Rng>,
}

const EMPTY: u32 = u32::MAX;

impl FluxState {
    pub fn new(config: &FluxConfig) -> Result<Self, FluxError> {
        let d = config.d as usize;
        if d == 0 || d > MAX_FLUX_DIM {
            return Err(FluxError::BadDimension {
                d: config.d,
                max: MAX_FLUX_DIM,
            });
        }
        if config.extent < 1 {
            return Err(FluxError::BadExtent {
                extent: config.extent,
            });
        }
        let side = 2 * config.extent + 1;
        let mut sites = 1i64;
        for _ in 0..d {
            sites = sites.saturating_mul(side);
        }
        if sites > MAX_SITES {
            return Err(FluxError::TooManySites {
                sites,
                max: MAX_SITES,
            });
        }
        if config.rho_max != 1 {
            return Err(FluxError::UnsupportedDensity {
                rho_max: config.rho_max,
            });
        }
        if config.c_flow != 1 {
            return Err(FluxError::UnsupportedFlowSpeed {
                c_flow: config.c_flow,
            });
        }
        if config.c_ball < 0 || config.c_ball > config.c_flow {
            return Err(FluxError::BadSpeeds {
                c_ball: config.c_ball,
                c_flow: config.c_flow,
            });
        }
        if config.r0 < 0 {
            return Err(FluxError::NegativeRadius { r0: config.r0 });
        }
        if matches!(config.rule, FluxRule::Tangential) && config.d != 2 {
            return Err(FluxError::TangentialDimension { d: config.d });
        }
        let init_r = config.init.max_radius();
        if init_r > config.extent {
            return Err(FluxError::InitOutsideBox {
                r: init_r,
                extent: config.extent,
            });
        }

        let mut strides = [0i64; MAX_FLUX_DIM];
        let mut acc = 1i64;
        for k in (0..d).rev() {
            strides[k] = acc;
            acc *= side;
        }

        let (lo, hi) = match config.init {
            InitPattern::Empty => (1, 0), // empty range
            InitPattern::Origin => (0, 0),
            InitPattern::Ball { r } => (0, r),
            InitPattern::Annulus { inner, outer } => (inner, outer),
        };
        let mut tokens = Vec::new();
        let mut occupancy = vec![EMPTY; sites as usize];
        if lo <= hi {
            let mut cur = [0i64; MAX_FLUX_DIM];
            for c in cur[..d].iter_mut() {
                *c = -hi;
            }
            loop {
                let r = norm(d, &cur);
                if r >= lo && r <= hi {
                    let idx = site_index(d, config.extent, &strides, &cur);
                    occupancy[idx] = tokens.len() as u32;
                    tokens.push(cur);
                }
                let mut k = d;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    if cur[k] < hi {
                        cur[k] += 1;
                        for c in cur[k + 1..d].iter_mut() {
                            *c = -hi;
                        }
                        k = usize::MAX;
                        break;
                    }
                }
                if k != usize::MAX {
                    break;
                }
            }
        }

        let rng = match config.rule {
            FluxRule::RandomWalk { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Ok(FluxState {
            d,
            extent: config.extent,
            r0: config.r0,
            c_ball: config.c_ball,
            c_flow: config.c_flow,
            rho_max: config.rho_max,
            rule: config.rule,
            tick: 0,
            tokens,
            occupancy,
            strides,
            cumulative_in: 0,
            cumulative_out: 0,
            total_blocked: 0,
            rng,
        })
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn tick(&self) -> i64 {
        self.tick
    }

    /// Sphere radius at a given tick.
    pub fn radius_at(&self, tick: i64) -> i64 {
        self.r0 + self.c_ball * tick
    }

    fn index(&self, s: &SiteArr) -> usize {
        site_index(self.d, self.extent, &self.strides, s)
    }

    fn propose(&mut self, rho: i64) -> Vec<Option<SiteArr>> {
        let d = self.d;
        let next_tick = self.tick + 1;
        self.tokens
            .iter()
            .map(|pos| {
                let dest = match self.rule {
                    FluxRule::ZeroVelocity => None,
                    FluxRule::Outflow => Some(radial_out(d, pos)),
                    FluxRule::Inflow => {
                        (norm(d, pos) == rho + 1).then(|| radial_in(d, pos))
                    }
                    FluxRule::Radial => {
                        if next_tick % 2 == 1 {
                            Some(radial_out(d, pos))
                        } else {
                            let dest = radial_in(d, pos);
                            (dest != *pos).then_some(dest)
                        }
                    }
                    FluxRule::Tangential => (norm(d, pos) >= 1).then(|| ring_next(pos)),
                    FluxRule::RandomWalk { .. } => {
                        let rng = self.rng.as_mut().expect("random rule has rng");
                        let mut dest = *pos;
                        loop {
                            let mut moved = false;
                            for c in dest[..d].iter_mut() {
                                let step = rng.gen_range(-1i64..=1);
                                moved |= step != 0;
                                *c += step;
                            }
                            if moved {
                                break;
                            }
                            dest = *pos;
                        }
                        Some(dest)
                    }
                };
                // Closed box: hops through the walls are rejected.
                dest.filter(|s| norm(d, s) <= self.extent)
            })
            .collect()
    }

    /// Advance one tick and report its measurements.
    pub fn step(&mut self) -> FluxRow {
        let rho = self.radius_at(self.tick); // where the sphere stood at departure
        let proposals = self.propose(rho);

        // Claim round: each destination goes to the lexicographically
        // smallest proposing source (dense site index preserves lex
        // order); losers are blocked for this tick.
        let mut claims: Vec<(u32, u32, u32)> = proposals
            .iter()
            .enumerate()
            .filter_map(|(i, dest)| {
                dest.as_ref().map(|s| {
                    (
                        self.index(s) as u32,
                        self.index(&self.tokens[i]) as u32,
                        i as u32,
                    )
                })
            })
            .collect();
        claims.sort_unstable();
        let mut valid: Vec<bool> = vec![false; self.tokens.len()];
        let mut blocked = 0u64;
        let mut prev_dest = u32::MAX;
        for &(dest, _, tok) in &claims {
            if dest == prev_dest {
                blocked += 1;
            } else {
                valid[tok as usize] = true;
                prev_dest = dest;
            }
        }

        // A claimed destination must be empty or in the act of being
        // vacated; invalidations cascade until a fixed point.  Whole
        // trains, swaps, and cycles all remain valid.
        loop {
            let mut changed = false;
            for i in 0..self.tokens.len() {
                if !valid[i] {
                    continue;
                }
                let dest = proposals[i].as_ref().expect("valid move has a proposal");
                let occupant = self.occupancy[self.index(dest)];
                if occupant != EMPTY && occupant as usize != i && !valid[occupant as usize] {
                    valid[i] = false;
                    blocked += 1;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        // Commit: clear every mover's source, then set destinations.
        let mut crossings_in = 0u64;
        let mut crossings_out = 0u64;
        for i in 0..self.tokens.len() {
            if valid[i] {
                let idx = self.index(&self.tokens[i]);
                self.occupancy[idx] = EMPTY;
            }
        }
        for i in 0..self.tokens.len() {
            if !valid[i] {
                continue;
            }
            let from = self.tokens[i];
            let to = proposals[i].unwrap();
            let (a, b) = (norm(self.d, &from), norm(self.d, &to));
            if a <= rho && rho < b {
                crossings_out += 1;
            } else if b <= rho && rho < a {
                crossings_in += 1;
            }
            let idx = self.index(&to);
            debug_assert_eq!(self.occupancy[idx], EMPTY, "partial permutation");
            self.occupancy[idx] = i as u32;
            self.tokens[i] = to;
        }

        self.tick += 1;
        let radius = self.radius_at(self.tick);
        let bound = self.rho_max as u64
            * (self.c_flow + (radius - rho).abs()) as u64
            * lattice_sphere_sites(self.d as u32, radius);
        self.cumulative_in += crossings_in;
        self.cumulative_out += crossings_out;
        self.total_blocked += blocked;
        FluxRow {
            tick: self.tick,
            radius,
            radius_crossed: rho,
            crossings_in,
            crossings_out,
            bound,
            blocked,
        }
    }
}

fn site_index(d: usize, extent: i64, strides: &[i64; MAX_FLUX_DIM], s: &SiteArr) -> usize {
    let mut idx = 0i64;
    for k in 0..d {
        idx += (s[k] + extent) * strides[k];
    }
    idx as usize
}

/// Run a configuration to completion.
///
/// Pure outflow from a union of full shells is routed through an exact
/// shell-cohort reduction (see [`run_outflow_cohorts`]); everything
/// else runs on the dense site engine.
pub fn run(config: &FluxConfig) -> Result<FluxTrace, FluxError> {
    let walls_clear = config.init.max_radius() + config.ticks as i64 <= config.extent;
    if config.rule == FluxRule::Outflow && walls_clear {
        run_outflow_cohorts(config)
    } else {
        run_dense(config)
    }
}

/// Site-level simulation on the dense occupancy grid.
fn run_dense(config: &FluxConfig) -> Result<FluxTrace, FluxError> {
    if config.ticks == 0 {
        return Err(FluxError::NoTicks);
    }
    let mut state = FluxState::new(config)?;
    let token_count = state.token_count();
    let mut rows = Vec::with_capacity(config.ticks as usize);
    for _ in 0..config.ticks {
        let row = state.step();
        debug_assert!(row.net_within_bound());
        rows.push(row);
    }
    debug_assert_eq!(state.token_count(), token_count);
    Ok(FluxTrace {
        d: config.d,
        rows,
        token_count,
        cumulative_in: state.cumulative_in,
        cumulative_out: state.cumulative_out,
        total_blocked: state.total_blocked,
    })
}

/// Exact fast path for the outflow rule when the walls stay out of
/// reach.
///
/// Every initial pattern is a union of full L∞ shells, and the outward
/// hop is injective and raises every token's radius by exactly one, so
/// under pure outflow a full shell stays a coherent cohort: no move is
/// ever blocked, and every measurement in the trace depends only on
/// each cohort's radius and population, never on positions within a
/// shell.  Tracking one (radius, count) pair per cohort therefore
/// reproduces the dense engine's trace bit for bit — the equivalence is
/// asserted against [`run_dense`] in the tests — while supporting
/// spheres far beyond the dense site limit.
fn run_outflow_cohorts(config: &FluxConfig) -> Result<FluxTrace, FluxError> {
    if config.ticks == 0 {
        return Err(FluxError::NoTicks);
    }
    let d = config.d as usize;
    if d == 0 || d > MAX_FLUX_DIM {
        return Err(FluxError::BadDimension {
            d: config.d,
            max: MAX_FLUX_DIM,
        });
    }
    if config.extent < 1 {
        return Err(FluxError::BadExtent {
            extent: config.extent,
        });
    }
    if config.rho_max != 1 {
        return Err(FluxError::UnsupportedDensity {
            rho_max: config.rho_max,
        });
    }
    if config.c_flow != 1 {
        return Err(FluxError::UnsupportedFlowSpeed {
            c_flow: config.c_flow,
        });
    }
    if config.c_ball < 0 || config.c_ball > config.c_flow {
        return Err(FluxError::BadSpeeds {
            c_ball: config.c_ball,
            c_flow: config.c_flow,
        });
    }
    if config.r0 < 0 {
        return Err(FluxError::NegativeRadius { r0: config.r0 });
    }
    let init_r = config.init.max_radius();
    if init_r > config.extent {
        return Err(FluxError::InitOutsideBox {
            r: init_r,
            extent: config.extent,
        });
    }

    let (lo, hi) = match config.init {
        InitPattern::Empty => (1, 0),
        InitPattern::Origin => (0, 0),
        InitPattern::Ball { r } => (0, r),
        InitPattern::Annulus { inner, outer } => (inner, outer),
    };
    // cohorts[k] tokens currently at radius lo + k + tick.
    let cohorts: Vec<u64> = if lo <= hi {
        (lo..=hi)
            .map(|s| lattice_sphere_sites(config.d, s))
            .collect()
    } else {
        Vec::new()
    };
    let token_count: u64 = cohorts.iter().sum();

    let mut rows = Vec::with_capacity(config.ticks as usize);
    let mut cumulative_out = 0u64;
    for tick in 1..=config.ticks as i64 {
        // Radius the departures are classified against, then the radius
        // after the tick; a cohort crosses exactly when it departs from
        // the sphere itself.
        let rho = config.r0 + config.c_ball * (tick - 1);
        let radius = config.r0 + config.c_ball * tick;
        let crossings_out = if lo <= hi {
            let depart = rho - (tick - 1);
            if depart >= lo && depart <= hi {
                cohorts[(depart - lo) as usize]
            } else {
                0
            }
        } else {
            0
        };
        cumulative_out += crossings_out;
        let bound = config.rho_max as u64
            * (config.c_flow + (radius - rho).abs()) as u64
            * lattice_sphere_sites(config.d, radius);
        let row = FluxRow {
            tick,
            radius,
            radius_crossed: rho,
            crossings_in: 0,
            crossings_out,
            bound,
            blocked: 0,
        };
        debug_assert!(row.net_within_bound());
        rows.push(row);
    }
    Ok(FluxTrace {
        d: config.d,
        rows,
        token_count: token_count as usize,
        cumulative_in: 0,
        cumulative_out,
        total_blocked: 0,
    })
}

/// Power-law fit of gross crossings against the radius of the sphere
/// they crossed.
///
/// Crossings at tick t are classified against the sphere of radius
/// r(t − 1), so that is the regressor; with r(t) = c·t the two scales
/// agree up to a one-tick shift.  Rows whose crossed sphere is the
/// degenerate single-site point (radius < 1) and rows with zero
/// crossings (logarithm undefined) are excluded.
pub fn fit_crossing_exponent(trace: &FluxTrace) -> Result<FitResult, FluxError> {
    let points: Vec<(f64, f64)> = trace
        .rows
        .iter()
        .filter(|row| row.radius_crossed >= 1 && row.gross() > 0)
        .map(|row| (row.radius_crossed as f64, row.gross() as f64))
        .collect();
    Ok(fit_scaling_exponent(&points)?)
}

/// Per-tick achieved fraction of the crossing bound.
#[derive(Debug, Clone, PartialEq)]
pub struct AchievabilityReport {
    pub d: u32,
    pub eps: f64,
    /// Static sphere radius used for the run.
    pub r0: i64,
    /// Annulus width in shells.
    pub width: i64,
    pub rows: Vec<FluxRow>,
    /// crossings / bound per tick.
    pub fractions: Vec<f64>,
    /// Minimum fraction over the second half of the run.
    pub min_fraction_tail: f64,
}

/// Fill a width-⌈eps·r0⌉ annulus just inside a static sphere of radius
/// r0 = ⌈T/eps⌉ with tokens all flowing radially outward, and measure how
/// much of the crossing bound they achieve each tick.  The outward map is
/// injective, so nothing ever blocks and shell s reaches the sphere at
/// tick r0 − s + 1: the achieved fraction decays only through the annulus
/// thinning, staying near 1 − eps through tick T.
pub fn annulus_achievability(d: u32, eps: f64, ticks: u32) -> Result<AchievabilityReport, FluxError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(FluxError::EpsOutOfRange { eps });
    }
    if ticks == 0 {
        return Err(FluxError::NoTicks);
    }
    let r0 = (ticks as f64 / eps).ceil() as i64;
    let width = ((eps * r0 as f64).ceil() as i64).max(1).min(r0);
    let config = FluxConfig::standard(
        d,
        FluxRule::Outflow,
        InitPattern::Annulus {
            inner: r0 - width + 1,
            outer: r0,
        },
        r0,
        0,
        ticks,
    );
    let trace = run(&config)?;
    let fractions: Vec<f64> = trace
        .rows
        .iter()
        .map(|row| row.gross() as f64 / row.bound as f64)
        .collect();
    let tail_start = (ticks as usize).div_ceil(2) - 1;
    let min_fraction_tail = fractions[tail_start..]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(AchievabilityReport {
        d,
        eps,
        r0,
        width,
        rows: trace.rows,
        fractions,
        min_fraction_tail,
    })
}

/// Fit the peak per-tick crossing count of saturating outflow against the
/// sphere radius.  The peak equals the discrete sphere area, so the slope
/// recovers the surface-growth exponent d − 1.
pub fn crossing_peak_exponent(d: u32, radii: &[i64]) -> Result<FitResult, FluxError> {
    let mut points = Vec::with_capacity(radii.len());
    for &r0 in radii {
        let width = 4.min(r0);
        let config = FluxConfig::standard(
            d,
            FluxRule::Outflow,
            InitPattern::Annulus {
                inner: r0 - width + 1,
                outer: r0,
            },
            r0,
            0,
            3.min(width as u32),
        );
        let trace = run(&config)?;
        let peak = trace.rows.iter().map(FluxRow::gross).max().unwrap_or(0);
        points.push((r0 as f64, peak as f64));
    }
    Ok(fit_scaling_exponent(&points)?)
}
