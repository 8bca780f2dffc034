//! Placement and routing of circuits into the Z^d lattice under causal
//! constraints.
//!
//! Model: signals move at most `c` = 1 cell per tick in the L∞ metric (one
//! hop may change every coordinate by ±1), every gate occupies its own
//! lattice site, a gate fires no earlier than one tick after its latest
//! input, and at most `congestion_cap` routed signals may occupy a site on
//! a given tick.  A signal departs its source gate at some tick ≥ the
//! source's firing time, advances one hop per tick along its recorded path,
//! and is absorbed by the destination gate on arrival; route endpoints are
//! gate-internal and exempt from congestion, as are sites hosting input or
//! output ports, so strict path interiors are what contend for space.
//!
//! Two placers are provided.  [`embed_layered_shells`] levels the circuit
//! (inserting pass-through buffers so every wire spans adjacent levels) and
//! places level `i` on the lattice sphere of radius `r0 + i`, sized so each
//! shell has spare capacity; each level's signals are dispatched as one
//! burst, with per-wire departure slots delayed until the space-time
//! reservation table shows no conflict.  [`embed_greedy`] is the baseline:
//! gates are placed at the nearest free site to the centroid of their
//! predecessors and wires routed with the same slot-delay backoff.  Both
//! are fully deterministic; [`verify_embedding`] replays every constraint
//! independently of how the embedding was built.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateId, GateKind};
use crate::geometry::{lattice_sphere_sites, linf_dist, linf_norm};
use crate::uniform::{parity_member, FamilyId};

/// A lattice site; length = dimension.
pub type Site = Vec<i64>;

/// One routed wire: the signal sits at `path[k]` on tick `depart + k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub depart: i64,
    /// Adjacent-site sequence from the source gate's site to the
    /// destination gate's site, inclusive.
    pub path: Vec<Site>,
}

impl Route {
    /// Number of hops.
    pub fn len(&self) -> i64 {
        self.path.len() as i64 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.path.len() <= 1
    }

    pub fn arrival(&self) -> i64 {
        self.depart + self.len()
    }
}

/// A timed embedding of a circuit into Z^d, centered at the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub d: u32,
    /// Signal speed in cells per tick.
    pub c: i64,
    /// Maximum routed signals per site per tick (interior path cells).
    pub congestion_cap: u32,
    pub placement: BTreeMap<GateId, Site>,
    /// Keyed by wire: (source gate, destination gate, input port index).
    pub routes: BTreeMap<(GateId, GateId, usize), Route>,
    pub firing_time: BTreeMap<GateId, i64>,
}

/// Headline measurements of an embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbeddingStats {
    /// Latest firing tick of any gate.
    pub makespan: i64,
    /// Largest L∞ distance of any placed site from the center.
    pub radius: i64,
    /// Number of placed gates (buffers inserted by leveling included).
    pub size: usize,
    /// Largest per-tick count of routed-signal moves crossing the causal
    /// sphere of radius c·t.
    pub maxcut: u64,
}

/// Why an embedding could not be built.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("circuit has feedback edges; embedders require acyclic circuits")]
    HasFeedback,
    #[error("circuit has a combinational cycle through gate {gate}")]
    Cyclic { gate: GateId },
    #[error("circuit is malformed ({violations} violation(s))")]
    Invalid { violations: usize },
    #[error("embedding requires dimension ≥ 2, got {d}")]
    DimensionTooLow { d: u32 },
    #[error(
        "routing gave up after {retries} delay retries for wire \
         ({src}->{dst} port {port}); congested site {site:?} at tick {tick}"
    )]
    Unroutable {
        src: GateId,
        dst: GateId,
        port: usize,
        retries: u32,
        site: Site,
        tick: i64,
    },
}

/// A constraint broken by an embedding, found by [`verify_embedding`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedViolation {
    #[error("gates {a} and {b} share site {site:?}")]
    Separation { a: GateId, b: GateId, site: Site },
    #[error("gate {gate} has no placement")]
    Unplaced { gate: GateId },
    #[error("gate {gate} has no firing time")]
    Unfired { gate: GateId },
    #[error("wire ({src}->{dst} port {port}) has no route")]
    MissingRoute { src: GateId, dst: GateId, port: usize },
    #[error("route ({src}->{dst} port {port}) is not an adjacent path between its endpoints")]
    BrokenPath { src: GateId, dst: GateId, port: usize },
    #[error(
        "route ({src}->{dst} port {port}) length {len} exceeds c·Δt = {budget}"
    )]
    Speed {
        src: GateId,
        dst: GateId,
        port: usize,
        len: i64,
        budget: i64,
    },
    #[error("route ({src}->{dst} port {port}) departs at {depart} before source fires at {fires}")]
    EarlyDeparture {
        src: GateId,
        dst: GateId,
        port: usize,
        depart: i64,
        fires: i64,
    },
    #[error("route ({src}->{dst} port {port}) arrives at {arrival} after destination fires at {fires}")]
    LateArrival {
        src: GateId,
        dst: GateId,
        port: usize,
        arrival: i64,
        fires: i64,
    },
    #[error("gate {gate} fires at {fires}, before 1 + its latest input at {latest_input}")]
    GateDelay {
        gate: GateId,
        fires: i64,
        latest_input: i64,
    },
    #[error("site {site:?} holds {count} routed signals at tick {tick} (cap {cap})")]
    Congestion {
        site: Site,
        tick: i64,
        count: u32,
        cap: u32,
    },
    #[error("gate {gate} at {site:?} (radius {radius}) fires at {fires}, outside the causal horizon")]
    Causality {
        gate: GateId,
        site: Site,
        radius: i64,
        fires: i64,
    },
}

/// A circuit whose wires all span adjacent levels, with its level map.
#[derive(Debug, Clone)]
pub struct LeveledCircuit {
    pub circuit: Circuit,
    /// Level per gate id: inputs and constants at 0, each other gate one
    /// past its latest input; output ports occupy their own level.
    pub levels: Vec<u32>,
    pub depth: u32,
}

fn check_embeddable(circuit: &Circuit) -> Result<(), EmbedError> {
    if !circuit.feedback.is_empty() {
        return Err(EmbedError::HasFeedback);
    }
    let violations = circuit.validate();
    if !violations.is_empty() {
        if let Some(crate::circuit::Violation::Cycle { gate }) = violations
            .iter()
            .find(|v| matches!(v, crate::circuit::Violation::Cycle { .. }))
        {
            return Err(EmbedError::Cyclic { gate: *gate });
        }
        return Err(EmbedError::Invalid {
            violations: violations.len(),
        });
    }
    Ok(())
}

/// Scheduling levels for placement: every gate fires strictly after all of
/// its inputs, including output ports (which occupy sites of their own).
fn embed_levels(circuit: &Circuit) -> Result<Vec<u32>, EmbedError> {
    let order = circuit
        .topo_order()
        .map_err(|gate| EmbedError::Cyclic { gate })?;
    let mut level = vec![0u32; circuit.gates.len()];
    for &id in &order {
        let gate = &circuit.gates[id as usize];
        level[id as usize] = match gate.kind {
            GateKind::Input | GateKind::Const0 | GateKind::Const1 => 0,
            _ => {
                1 + gate
                    .inputs
                    .iter()
                    .map(|&s| level[s as usize])
                    .max()
                    .unwrap_or(0)
            }
        };
    }
    Ok(level)
}

/// Insert pass-through buffers so that every wire spans exactly one level.
/// Buffer chains are shared per source, so a gate feeding several levels
/// grows one chain, not one per reader; original gate ids are preserved.
pub fn level_circuit(circuit: &Circuit) -> Result<LeveledCircuit, EmbedError> {
    check_embeddable(circuit)?;
    let base_levels = embed_levels(circuit)?;

    let mut gates = circuit.gates.clone();
    let mut levels = base_levels.clone();
    // chain[src] lazily holds the buffered copies of src at increasing
    // levels: entry k carries src's value at level base(src) + k + 1.
    let mut chain: HashMap<GateId, Vec<GateId>> = HashMap::new();

    let ids: Vec<GateId> = (0..circuit.gates.len() as GateId).collect();
    for &dst in &ids {
        let dst_level = base_levels[dst as usize];
        let n_ports = circuit.gates[dst as usize].inputs.len();
        for port in 0..n_ports {
            let src = circuit.gates[dst as usize].inputs[port];
            let gap = dst_level - base_levels[src as usize];
            if gap <= 1 {
                continue;
            }
            let need = (gap - 1) as usize; // buffers between src and dst
            let entry = chain.entry(src).or_default();
            while entry.len() < need {
                let prev = *entry.last().unwrap_or(&src);
                let id = gates.len() as GateId;
                gates.push(Gate {
                    kind: GateKind::Buf,
                    inputs: vec![prev],
                });
                levels.push(base_levels[src as usize] + entry.len() as u32 + 1);
                entry.push(id);
            }
            gates[dst as usize].inputs[port] = entry[need - 1];
        }
    }

    let leveled = Circuit {
        gates,
        feedback: circuit.feedback.clone(),
        n_inputs: circuit.n_inputs,
        n_outputs: circuit.n_outputs,
        fanout_bound: circuit.fanout_bound,
    };
    let depth = levels.iter().copied().max().unwrap_or(0);
    debug_assert!(leveled.validate().is_empty());
    Ok(LeveledCircuit {
        circuit: leveled,
        levels,
        depth,
    })
}

/// All sites at L∞ radius exactly `r`, in lexicographic order.
pub fn shell_sites(d: u32, r: i64) -> Vec<Site> {
    assert!(d >= 1 && r >= 0);
    if r == 0 {
        return vec![vec![0; d as usize]];
    }
    let mut out = Vec::with_capacity(lattice_sphere_sites(d, r) as usize);
    let mut cur = vec![-r; d as usize];
    loop {
        if cur.iter().map(|&c| c.abs()).max().unwrap() == r {
            out.push(cur.clone());
        }
        // Odometer increment in lexicographic order.
        let mut k = d as usize;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < r {
                cur[k] += 1;
                for c in cur.iter_mut().skip(k + 1) {
                    *c = -r;
                }
                break;
            }
        }
    }
}

/// The L∞ geodesic from `a` to `b`: one hop per tick, every coordinate
/// stepping its sign toward the target.  Length = L∞ distance.
pub fn geodesic(a: &[i64], b: &[i64]) -> Vec<Site> {
    let mut path = vec![a.to_vec()];
    let mut cur = a.to_vec();
    while cur != b {
        for (c, &t) in cur.iter_mut().zip(b) {
            *c += (t - *c).signum();
        }
        path.push(cur.clone());
    }
    path
}

/// Space-time reservation table for the strict interiors of routed paths.
#[derive(Default)]
struct Reservations {
    used: HashMap<(Site, i64), u32>,
}

impl Reservations {
    /// First conflicting (site, tick) if the path departing at `depart`
    /// would exceed `cap` on any interior cell; exempt sites are skipped.
    fn conflict(
        &self,
        path: &[Site],
        depart: i64,
        cap: u32,
        exempt: &HashSet<Site>,
    ) -> Option<(Site, i64)> {
        for (k, site) in path.iter().enumerate().skip(1) {
            if k + 1 == path.len() {
                break; // arrival cell is gate-internal
            }
            if exempt.contains(site) {
                continue;
            }
            let tick = depart + k as i64;
            if self.used.get(&(site.clone(), tick)).copied().unwrap_or(0) >= cap {
                return Some((site.clone(), tick));
            }
        }
        None
    }

    fn commit(&mut self, path: &[Site], depart: i64, exempt: &HashSet<Site>) {
        for (k, site) in path.iter().enumerate().skip(1) {
            if k + 1 == path.len() {
                break;
            }
            if exempt.contains(site) {
                continue;
            }
            *self.used.entry((site.clone(), depart + k as i64)).or_insert(0) += 1;
        }
    }
}

const MAX_SLOT_RETRIES: u32 = 64;

/// Sites exempt from congestion accounting: hosts of input/output ports.
fn exempt_sites(circuit: &Circuit, placement: &BTreeMap<GateId, Site>) -> HashSet<Site> {
    circuit
        .gates
        .iter()
        .enumerate()
        .filter(|(_, g)| matches!(g.kind, GateKind::Input | GateKind::Output))
        .filter_map(|(id, _)| placement.get(&(id as GateId)).cloned())
        .collect()
}

/// Place and route a leveled circuit on concentric lattice shells: level
/// `i` occupies the sphere of radius `r0 + i`, with `r0` chosen so every
/// shell has at least [`SHELL_SPACING`]× the sites its level needs.  Each
/// level's wires are dispatched as one burst; a wire whose path would
/// collide with an earlier reservation is delayed one tick at its source
/// (bounded retries), and the next level fires once every burst wire has
/// landed.  Returns the embedding together with the leveled circuit that
/// was actually placed.
pub fn embed_layered_shells(
    circuit: &Circuit,
    d: u32,
) -> Result<(Embedding, LeveledCircuit), EmbedError> {
    if d < 2 {
        return Err(EmbedError::DimensionTooLow { d });
    }
    let leveled = level_circuit(circuit)?;
    let n_gates = leveled.circuit.gates.len();

    // Gate lists per level, id-sorted for determinism.
    let mut by_level: Vec<Vec<GateId>> = vec![Vec::new(); leveled.depth as usize + 1];
    for (id, &lv) in leveled.levels.iter().enumerate() {
        by_level[lv as usize].push(id as GateId);
    }

    // Base radius: smallest r0 ≥ 0 such that shell r0+i can hold level i
    // with spacing to spare.  Single-gate levels may sit at radius 0.
    let required = |width: usize| -> i64 {
        if width <= 1 {
            return 0;
        }
        let mut r = 1i64;
        while lattice_sphere_sites(d, r) < (SHELL_SPACING * width) as u64 {
            r += 1;
        }
        r
    };
    let r0 = by_level
        .iter()
        .enumerate()
        .map(|(i, gates)| required(gates.len()) - i as i64)
        .max()
        .unwrap_or(0)
        .max(0);

    // Spread each level evenly over its shell's site list, ordering gates
    // by the fractional position of their primary source so children sit
    // near their parents and routes stay short and co-directional.
    let mut placement: BTreeMap<GateId, Site> = BTreeMap::new();
    let mut frac: HashMap<GateId, f64> = HashMap::new();
    for (i, gates) in by_level.iter().enumerate() {
        let sites = shell_sites(d, r0 + i as i64);
        let w = gates.len();
        let mut ordered = gates.clone();
        let mut phase = 0.0f64;
        if i > 0 {
            let pref = |g: GateId| frac[&leveled.circuit.gates[g as usize].inputs[0]];
            ordered.sort_by(|&a, &b| pref(a).total_cmp(&pref(b)).then(a.cmp(&b)));
            phase = pref(ordered[0]);
        }
        let offset = (phase * sites.len() as f64) as usize;
        for (k, &gate) in ordered.iter().enumerate() {
            let idx = (offset + k * sites.len() / w) % sites.len();
            placement.insert(gate, sites[idx].clone());
            frac.insert(gate, idx as f64 / sites.len() as f64);
        }
    }

    let exempt = exempt_sites(&leveled.circuit, &placement);
    let mut reservations = Reservations::default();
    let mut routes = BTreeMap::new();
    let mut level_fire = vec![0i64; leveled.depth as usize + 1];
    level_fire[0] = r0;

    for lv in 1..=leveled.depth as usize {
        // Wires arriving at this level, ordered by (destination, port).
        let mut burst_span = 1i64;
        for &dst in &by_level[lv] {
            let inputs = leveled.circuit.gates[dst as usize].inputs.clone();
            for (port, &src) in inputs.iter().enumerate() {
                let path = geodesic(&placement[&src], &placement[&dst]);
                let base = level_fire[lv - 1];
                let mut slot = 0u32;
                loop {
                    match reservations.conflict(&path, base + slot as i64, 1, &exempt) {
                        None => break,
                        Some((site, tick)) => {
                            slot += 1;
                            if slot > MAX_SLOT_RETRIES {
                                return Err(EmbedError::Unroutable {
                                    src,
                                    dst,
                                    port,
                                    retries: MAX_SLOT_RETRIES,
                                    site,
                                    tick,
                                });
                            }
                        }
                    }
                }
                let depart = base + slot as i64;
                reservations.commit(&path, depart, &exempt);
                let route = Route { depart, path };
                burst_span = burst_span.max(route.arrival() - base);
                routes.insert((src, dst, port), route);
            }
        }
        level_fire[lv] = level_fire[lv - 1] + burst_span;
    }

    let firing_time: BTreeMap<GateId, i64> = (0..n_gates as GateId)
        .map(|id| (id, level_fire[leveled.levels[id as usize] as usize]))
        .collect();

    let embedding = Embedding {
        d,
        c: 1,
        congestion_cap: 1,
        placement,
        routes,
        firing_time,
    };
    Ok((embedding, leveled))
}

/// Shell capacity margin: a level of width w is placed on a shell with at
/// least this many sites per gate, leaving room for signals to route past.
pub const SHELL_SPACING: usize = 4;

/// Baseline placer: gates in dependency order, each at the nearest free
/// site to the rounded centroid of its placed predecessors (origin for
/// sources), wires routed along L∞ geodesics with the same slot-delay
/// congestion backoff as the shell placer.  Fires each gate as soon as its
/// causal horizon and latest input arrival allow.
pub fn embed_greedy(circuit: &Circuit, d: u32) -> Result<Embedding, EmbedError> {
    if d < 2 {
        return Err(EmbedError::DimensionTooLow { d });
    }
    check_embeddable(circuit)?;
    let order = circuit
        .topo_order()
        .map_err(|gate| EmbedError::Cyclic { gate })?;

    let mut placement: BTreeMap<GateId, Site> = BTreeMap::new();
    let mut occupied: HashSet<Site> = HashSet::new();
    for &id in &order {
        let preds = &circuit.gates[id as usize].inputs;
        let target: Site = if preds.is_empty() {
            vec![0; d as usize]
        } else {
            (0..d as usize)
                .map(|axis| {
                    let sum: i64 = preds.iter().map(|&p| placement[&p][axis]).sum();
                    // Round to nearest, halves toward +∞; deterministic.
                    div_round(sum, preds.len() as i64)
                })
                .collect()
        };
        let site = nearest_free(&target, &occupied, d);
        occupied.insert(site.clone());
        placement.insert(id, site);
    }

    let exempt = exempt_sites(circuit, &placement);
    let mut reservations = Reservations::default();
    let mut routes = BTreeMap::new();
    let mut firing_time: BTreeMap<GateId, i64> = BTreeMap::new();

    for &id in &order {
        let site_radius = linf_norm(&placement[&id]);
        let mut fires = site_radius; // causal horizon
        let inputs = circuit.gates[id as usize].inputs.clone();
        for (port, &src) in inputs.iter().enumerate() {
            let path = geodesic(&placement[&src], &placement[&id]);
            let base = firing_time[&src];
            let mut slot = 0u32;
            loop {
                match reservations.conflict(&path, base + slot as i64, 1, &exempt) {
                    None => break,
                    Some((site, tick)) => {
                        slot += 1;
                        if slot > MAX_SLOT_RETRIES {
                            return Err(EmbedError::Unroutable {
                                src,
                                dst: id,
                                port,
                                retries: MAX_SLOT_RETRIES,
                                site,
                                tick,
                            });
                        }
                    }
                }
            }
            let depart = base + slot as i64;
            reservations.commit(&path, depart, &exempt);
            let route = Route { depart, path };
            fires = fires.max(route.arrival());
            routes.insert((src, id, port), route);
        }
        firing_time.insert(id, fires);
    }

    Ok(Embedding {
        d,
        c: 1,
        congestion_cap: 1,
        placement,
        routes,
        firing_time,
    })
}

fn div_round(num: i64, den: i64) -> i64 {
    // Round-half-up division for positive denominators.
    let twice = 2 * num + den;
    twice.div_euclid(2 * den)
}

/// Nearest unoccupied site to `target` (L∞ distance, lexicographic
/// tie-break), scanning outward ring by ring.
fn nearest_free(target: &Site, occupied: &HashSet<Site>, d: u32) -> Site {
    for r in 0.. {
        for offset in shell_sites(d, r) {
            let site: Site = target.iter().zip(&offset).map(|(&a, &b)| a + b).collect();
            if !occupied.contains(&site) {
                return site;
            }
        }
    }
    unreachable!()
}

/// Re-check every embedding constraint from scratch: separation, route
/// integrity, speed, gate delay, congestion, and causal containment.
pub fn verify_embedding(e: &Embedding, circuit: &Circuit) -> Vec<EmbedViolation> {
    let mut out = Vec::new();

    // Placement and firing coverage; separation.
    let mut site_owner: BTreeMap<Site, GateId> = BTreeMap::new();
    for id in 0..circuit.gates.len() as GateId {
        match e.placement.get(&id) {
            None => out.push(EmbedViolation::Unplaced { gate: id }),
            Some(site) => {
                if let Some(&other) = site_owner.get(site) {
                    out.push(EmbedViolation::Separation {
                        a: other,
                        b: id,
                        site: site.clone(),
                    });
                } else {
                    site_owner.insert(site.clone(), id);
                }
            }
        }
        if !e.firing_time.contains_key(&id) {
            out.push(EmbedViolation::Unfired { gate: id });
        }
    }
    if !out.is_empty() {
        // Structural gaps make the remaining checks ill-posed.
        return out;
    }

    let exempt = exempt_sites(circuit, &e.placement);
    let mut occupancy: HashMap<(Site, i64), u32> = HashMap::new();

    for (dst, gate) in circuit.gates.iter().enumerate() {
        let dst = dst as GateId;
        let fires = e.firing_time[&dst];
        let mut latest_input = i64::MIN;
        for (port, &src) in gate.inputs.iter().enumerate() {
            latest_input = latest_input.max(e.firing_time[&src]);
            let Some(route) = e.routes.get(&(src, dst, port)) else {
                out.push(EmbedViolation::MissingRoute { src, dst, port });
                continue;
            };
            let endpoints_ok = route.path.first() == Some(&e.placement[&src])
                && route.path.last() == Some(&e.placement[&dst]);
            let steps_ok = route
                .path
                .windows(2)
                .all(|w| (1..=e.c).contains(&linf_dist(&w[0], &w[1])));
            if !endpoints_ok || !steps_ok || route.path.is_empty() {
                out.push(EmbedViolation::BrokenPath { src, dst, port });
                continue;
            }
            let budget = e.c * (fires - e.firing_time[&src]);
            if route.len() > budget {
                out.push(EmbedViolation::Speed {
                    src,
                    dst,
                    port,
                    len: route.len(),
                    budget,
                });
            }
            if route.depart < e.firing_time[&src] {
                out.push(EmbedViolation::EarlyDeparture {
                    src,
                    dst,
                    port,
                    depart: route.depart,
                    fires: e.firing_time[&src],
                });
            }
            if route.arrival() > fires {
                out.push(EmbedViolation::LateArrival {
                    src,
                    dst,
                    port,
                    arrival: route.arrival(),
                    fires,
                });
            }
            for (k, site) in route.path.iter().enumerate().skip(1) {
                if k + 1 == route.path.len() || exempt.contains(site) {
                    continue;
                }
                *occupancy
                    .entry((site.clone(), route.depart + k as i64))
                    .or_insert(0) += 1;
            }
        }
        if !gate.inputs.is_empty() && fires < 1 + latest_input {
            out.push(EmbedViolation::GateDelay {
                gate: dst,
                fires,
                latest_input,
            });
        }
        let radius = linf_norm(&e.placement[&dst]);
        if radius > e.c * fires {
            out.push(EmbedViolation::Causality {
                gate: dst,
                site: e.placement[&dst].clone(),
                radius,
                fires,
            });
        }
    }

    let mut congested: Vec<_> = occupancy
        .into_iter()
        .filter(|&(_, count)| count > e.congestion_cap)
        .collect();
    congested.sort();
    for ((site, tick), count) in congested {
        out.push(EmbedViolation::Congestion {
            site,
            tick,
            count,
            cap: e.congestion_cap,
        });
    }

    out
}

/// Measurements of an embedding; `maxcut` comes from the per-tick boundary
/// crossing profile.
pub fn embedding_stats(e: &Embedding) -> EmbeddingStats {
    let makespan = e.firing_time.values().copied().max().unwrap_or(0);
    let radius = e
        .placement
        .values()
        .map(|s| linf_norm(s))
        .max()
        .unwrap_or(0);
    let maxcut = crate::width::boundary_cut_profile(e)
        .into_iter()
        .map(|(_, crossings)| crossings)
        .max()
        .unwrap_or(0);
    EmbeddingStats {
        makespan,
        radius,
        size: e.placement.len(),
        maxcut,
    }
}

/// Which placer a sweep should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placer {
    Shell,
    Greedy,
}

/// One sweep row: the family size and either its measurements or the
/// error that size produced (sweeps continue past failures).
#[derive(Debug, Clone)]
pub struct SeriesPoint {
    pub n: u32,
    pub result: Result<EmbeddingStats, String>,
}

/// Embed each family member and measure it.  Deterministic; failures are
/// recorded per-size and the sweep continues.
pub fn makespan_series(
    family: FamilyId,
    sizes: &[u32],
    d: u32,
    placer: Placer,
) -> Vec<SeriesPoint> {
    sizes
        .iter()
        .map(|&n| {
            let result = (|| {
                let member = match family {
                    FamilyId::Parity => parity_member(n).map_err(|e| e.to_string())?,
                };
                let embedding = match placer {
                    Placer::Shell => embed_layered_shells(&member, d)
                        .map(|(e, _)| e)
                        .map_err(|e| e.to_string())?,
                    Placer::Greedy => embed_greedy(&member, d).map_err(|e| e.to_string())?,
                };
                Ok(embedding_stats(&embedding))
            })();
            SeriesPoint { n, result }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::uniform::build_parity_tree;

    fn wire_through() -> Circuit {
        let mut b = CircuitBuilder::new(4);
        let x = b.input();
        b.output(x);
        b.finish()
    }

    #[test]
    fn leveling_makes_every_wire_adjacent() {
        let c = build_parity_tree(8).unwrap();
        let leveled = level_circuit(&c).unwrap();
        assert!(leveled.circuit.validate().is_empty());
        for (dst, gate) in leveled.circuit.gates.iter().enumerate() {
            for &src in &gate.inputs {
                assert_eq!(
                    leveled.levels[dst] - leveled.levels[src as usize],
                    1,
                    "wire {src}->{dst} spans more than one level"
                );
            }
        }
        // Buffers count toward size; parity gains two per XOR block.
        assert_eq!(
            leveled.circuit.gates.len(),
            c.gates.len() + 2 * (c.nand_count() / 4)
        );
        // Leveling preserves semantics.
        for mask in 0u32..256 {
            let bits: Vec<bool> = (0..8).map(|i| mask >> i & 1 == 1).collect();
            assert_eq!(
                leveled.circuit.evaluate(&bits).unwrap(),
                c.evaluate(&bits).unwrap()
            );
        }
    }

    #[test]
    fn single_hop_embedding() {
        let c = wire_through();
        let (e, _) = embed_layered_shells(&c, 2).unwrap();
        let stats = embedding_stats(&e);
        assert_eq!(stats.makespan, 1);
        assert_eq!(stats.radius, 1);
        assert_eq!(verify_embedding(&e, &c), Vec::new());
    }

    #[test]
    fn shell_embeds_parity_trees_validly() {
        for (n, d) in [(4u32, 2u32), (8, 2), (8, 3), (16, 3)] {
            let c = build_parity_tree(n).unwrap();
            let (e, leveled) = embed_layered_shells(&c, d).unwrap();
            assert_eq!(
                verify_embedding(&e, &leveled.circuit),
                Vec::new(),
                "n={n} d={d}"
            );
            let stats = embedding_stats(&e);
            assert!(stats.makespan >= c.depth().unwrap() as i64);
            assert_eq!(stats.size, leveled.circuit.gates.len());
        }
    }

    #[test]
    fn greedy_embeds_parity_trees_validly() {
        for (n, d) in [(4u32, 2u32), (16, 2), (8, 3)] {
            let c = build_parity_tree(n).unwrap();
            let e = embed_greedy(&c, d).unwrap();
            assert_eq!(verify_embedding(&e, &c), Vec::new(), "n={n} d={d}");
        }
    }

    #[test]
    fn greedy_single_gate_at_center() {
        let mut b = CircuitBuilder::new(4);
        b.const1();
        let c = b.finish();
        let e = embed_greedy(&c, 2).unwrap();
        assert_eq!(e.placement[&0], vec![0, 0]);
        assert_eq!(e.firing_time[&0], 0);
    }

    #[test]
    fn greedy_is_deterministic() {
        let c = build_parity_tree(16).unwrap();
        assert_eq!(embed_greedy(&c, 2).unwrap(), embed_greedy(&c, 2).unwrap());
        let (s1, _) = embed_layered_shells(&c, 3).unwrap();
        let (s2, _) = embed_layered_shells(&c, 3).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn verifier_catches_speed_violation() {
        let c = wire_through();
        let (mut e, _) = embed_layered_shells(&c, 2).unwrap();
        // Replace the route with a 5-hop zigzag while leaving Δt = 1.
        let key = (0, 1, 0);
        let src = e.placement[&0].clone();
        let dst = e.placement[&1].clone();
        let path = vec![
            src.clone(),
            dst.clone(),
            src.clone(),
            dst.clone(),
            src,
            dst,
        ];
        e.routes.insert(key, Route { depart: 0, path });
        let violations = verify_embedding(&e, &c);
        assert!(
            violations
                .iter()
                .any(|v| matches!(v, EmbedViolation::Speed { len: 5, .. })),
            "{violations:?}"
        );
    }

    #[test]
    fn verifier_catches_shared_site() {
        let c = wire_through();
        let (mut e, _) = embed_layered_shells(&c, 2).unwrap();
        let site = e.placement[&0].clone();
        e.placement.insert(1, site);
        assert!(verify_embedding(&e, &c)
            .iter()
            .any(|v| matches!(v, EmbedViolation::Separation { .. })));
    }

    #[test]
    fn verifier_catches_causality_violation() {
        let c = wire_through();
        let (mut e, _) = embed_layered_shells(&c, 2).unwrap();
        // Pretend the output fires before a signal could reach its site.
        e.firing_time.insert(1, 0);
        let violations = verify_embedding(&e, &c);
        assert!(violations
            .iter()
            .any(|v| matches!(v, EmbedViolation::Causality { gate: 1, .. })));
    }

    #[test]
    fn dimension_one_is_rejected() {
        let c = wire_through();
        assert!(matches!(
            embed_layered_shells(&c, 1),
            Err(EmbedError::DimensionTooLow { d: 1 })
        ));
        assert!(matches!(
            embed_greedy(&c, 1),
            Err(EmbedError::DimensionTooLow { d: 1 })
        ));
    }

    #[test]
    fn feedback_is_rejected() {
        let mut b = CircuitBuilder::new(4);
        let x = b.input();
        let n = b.nand(x, x);
        b.output(n);
        let mut c = b.finish();
        c.gates[1].inputs[1] = 1;
        c.feedback.insert((1, 1));
        assert!(matches!(
            embed_layered_shells(&c, 2),
            Err(EmbedError::HasFeedback)
        ));
    }

    #[test]
    fn series_monotone_and_gap_marking() {
        let series = makespan_series(FamilyId::Parity, &[8, 16, 32], 2, Placer::Shell);
        let spans: Vec<i64> = series
            .iter()
            .map(|p| p.result.as_ref().unwrap().makespan)
            .collect();
        assert!(spans.windows(2).all(|w| w[0] <= w[1]), "{spans:?}");
    }

    #[test]
    fn shell_sites_are_complete_and_distinct() {
        for d in 2..=3u32 {
            for r in 0..4i64 {
                let sites = shell_sites(d, r);
                assert_eq!(sites.len() as u64, lattice_sphere_sites(d, r));
                let set: HashSet<_> = sites.iter().cloned().collect();
                assert_eq!(set.len(), sites.len());
                assert!(sites.iter().all(|s| linf_norm(s) == r));
            }
        }
    }

    #[test]
    fn geodesic_is_shortest() {
        let a = vec![0, 0, 0];
        let b = vec![3, -2, 1];
        let path = geodesic(&a, &b);
        assert_eq!(path.len() as i64 - 1, linf_dist(&a, &b));
        assert_eq!(path.first().unwrap(), &a);
        assert_eq!(path.last().unwrap(), &b);
        for w in path.windows(2) {
            assert_eq!(linf_dist(&w[0], &w[1]), 1);
        }
    }
}
