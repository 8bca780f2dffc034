//! Information-flow width of circuits and embeddings.
//!
//! The width of a circuit between a set of source gates and a set of sink
//! gates is the minimum number of wires whose removal disconnects every
//! directed path from a source to a sink — equivalently, by max-flow /
//! min-cut with unit capacity per wire, the maximum number of wire-disjoint
//! paths.  [`cut_width`] computes it with Dinic's algorithm and returns a
//! witness cut; [`brute_force_cut`] checks small circuits by exhaustive
//! subset search.  For embeddings, [`boundary_cut_profile`] counts how many
//! routed signals cross the causal sphere each tick.

use std::collections::VecDeque;

use thiserror::Error;

use crate::circuit::{Circuit, GateId};
use crate::embed::Embedding;
use crate::geometry::linf_norm;

/// A wire, identified by source gate, destination gate, and which input
/// port of the destination it feeds.
pub type WireId = (GateId, GateId, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutMethod {
    MaxFlow,
    BruteForce,
}

/// A minimum wire cut between sources and sinks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutReport {
    /// Number of wires in the cut = maximum wire-disjoint path count.
    pub value: u32,
    /// The cut wires themselves; removing them disconnects sources from
    /// sinks, and no smaller set does.
    pub witness: Vec<WireId>,
    pub method: CutMethod,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WidthError {
    #[error("source/sink sets must be non-empty")]
    EmptyTerminals,
    #[error("gate {gate} is out of range")]
    UnknownGate { gate: GateId },
    #[error("gate {gate} appears as both source and sink")]
    OverlappingTerminals { gate: GateId },
    #[error("brute force is limited to {limit} gates, circuit has {got}")]
    TooLargeForBruteForce { limit: usize, got: usize },
}

/// All wires of a circuit in deterministic order: (src, dst, port) sorted
/// by destination id, then port.
pub fn wire_list(circuit: &Circuit) -> Vec<WireId> {
    let mut wires = Vec::new();
    for (dst, gate) in circuit.gates.iter().enumerate() {
        for (port, &src) in gate.inputs.iter().enumerate() {
            wires.push((src, dst as GateId, port));
        }
    }
    wires
}

fn check_terminals(
    circuit: &Circuit,
    sources: &[GateId],
    sinks: &[GateId],
) -> Result<(), WidthError> {
    if sources.is_empty() || sinks.is_empty() {
        return Err(WidthError::EmptyTerminals);
    }
    for &g in sources.iter().chain(sinks) {
        if g as usize >= circuit.gates.len() {
            return Err(WidthError::UnknownGate { gate: g });
        }
    }
    for &g in sources {
        if sinks.contains(&g) {
            return Err(WidthError::OverlappingTerminals { gate: g });
        }
    }
    Ok(())
}

/// Dinic max-flow on a unit-capacity wire network.
struct FlowNet {
    /// (to, capacity, index of reverse edge in `adj[to]`).
    edges: Vec<(usize, i64, usize)>,
    adj: Vec<Vec<usize>>,
}

impl FlowNet {
    fn new(nodes: usize) -> Self {
        FlowNet {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let fwd = self.edges.len();
        self.edges.push((to, cap, 0));
        self.adj[from].push(fwd);
        let rev = self.edges.len();
        self.edges.push((from, 0, 0));
        self.adj[to].push(rev);
        self.edges[fwd].2 = rev;
        self.edges[rev].2 = fwd;
        fwd
    }

    fn bfs_levels(&self, s: usize, t: usize) -> Option<Vec<i32>> {
        let mut level = vec![-1i32; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &ei in &self.adj[u] {
                let (to, cap, _) = self.edges[ei];
                if cap > 0 && level[to] < 0 {
                    level[to] = level[u] + 1;
                    queue.push_back(to);
                }
            }
        }
        (level[t] >= 0).then_some(level)
    }

    fn dfs_push(
        &mut self,
        u: usize,
        t: usize,
        pushed: i64,
        level: &[i32],
        iter: &mut [usize],
    ) -> i64 {
        if u == t {
            return pushed;
        }
        while iter[u] < self.adj[u].len() {
            let ei = self.adj[u][iter[u]];
            let (to, cap, rev) = self.edges[ei];
            if cap > 0 && level[to] == level[u] + 1 {
                let flow = self.dfs_push(to, t, pushed.min(cap), level, iter);
                if flow > 0 {
                    self.edges[ei].1 -= flow;
                    self.edges[rev].1 += flow;
                    return flow;
                }
            }
            iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        while let Some(level) = self.bfs_levels(s, t) {
            let mut iter = vec![0usize; self.adj.len()];
            loop {
                let pushed = self.dfs_push(s, t, i64::MAX, &level, &mut iter);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Nodes reachable from `s` through edges with residual capacity.
    fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &ei in &self.adj[u] {
                let (to, cap, _) = self.edges[ei];
                if cap > 0 && !seen[to] {
                    seen[to] = true;
                    queue.push_back(to);
                }
            }
        }
        seen
    }
}

/// Minimum wire cut separating `sources` from `sinks`, by max-flow.
///
/// Each wire carries unit capacity (a fan-out of k gives k parallel
/// edges); terminals attach to a super-source and super-sink through
/// uncuttable edges.  The witness is read off the residual graph:
/// saturated wires from the source side to the sink side.
pub fn cut_width(
    circuit: &Circuit,
    sources: &[GateId],
    sinks: &[GateId],
) -> Result<CutReport, WidthError> {
    check_terminals(circuit, sources, sinks)?;
    let wires = wire_list(circuit);
    let n = circuit.gates.len();
    let s = n;
    let t = n + 1;
    let uncuttable = wires.len() as i64 + 1;

    let mut net = FlowNet::new(n + 2);
    let wire_edges: Vec<usize> = wires
        .iter()
        .map(|&(src, dst, _)| net.add_edge(src as usize, dst as usize, 1))
        .collect();
    for &g in sources {
        net.add_edge(s, g as usize, uncuttable);
    }
    for &g in sinks {
        net.add_edge(g as usize, t, uncuttable);
    }

    let value = net.max_flow(s, t);
    let reachable = net.residual_reachable(s);
    let mut witness = Vec::new();
    for (wire_idx, &ei) in wire_edges.iter().enumerate() {
        let (src, dst, _) = wires[wire_idx];
        if reachable[src as usize] && !reachable[dst as usize] {
            debug_assert_eq!(net.edges[ei].1, 0, "cut wire must be saturated");
            witness.push(wires[wire_idx]);
            let _ = (src, dst);
        }
    }
    debug_assert_eq!(witness.len() as i64, value);
    Ok(CutReport {
        value: value as u32,
        witness,
        method: CutMethod::MaxFlow,
    })
}

/// Gate-count ceiling for [`brute_force_cut`].
pub const BRUTE_FORCE_LIMIT: usize = 14;

/// Minimum wire cut found by trying every wire subset in order of size,
/// then lexicographic order; only for circuits of at most
/// [`BRUTE_FORCE_LIMIT`] gates.
pub fn brute_force_cut(
    circuit: &Circuit,
    sources: &[GateId],
    sinks: &[GateId],
) -> Result<CutReport, WidthError> {
    check_terminals(circuit, sources, sinks)?;
    if circuit.gates.len() > BRUTE_FORCE_LIMIT {
        return Err(WidthError::TooLargeForBruteForce {
            limit: BRUTE_FORCE_LIMIT,
            got: circuit.gates.len(),
        });
    }
    let wires = wire_list(circuit);
    let disconnects = |removed: &[usize]| -> bool {
        let mut reach = vec![false; circuit.gates.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &g in sources {
            reach[g as usize] = true;
            queue.push_back(g as usize);
        }
        while let Some(u) = queue.pop_front() {
            for (i, &(src, dst, _)) in wires.iter().enumerate() {
                if src as usize == u && !removed.contains(&i) && !reach[dst as usize] {
                    reach[dst as usize] = true;
                    queue.push_back(dst as usize);
                }
            }
        }
        sinks.iter().all(|&g| !reach[g as usize])
    };

    for size in 0..=wires.len() {
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            if disconnects(&subset) {
                return Ok(CutReport {
                    value: size as u32,
                    witness: subset.iter().map(|&i| wires[i]).collect(),
                    method: CutMethod::BruteForce,
                });
            }
            // Next lexicographic size-combination of wire indices.
            let mut k = size;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if subset[k] < wires.len() - (size - k) {
                    subset[k] += 1;
                    for j in k + 1..size {
                        subset[j] = subset[j - 1] + 1;
                    }
                    break;
                }
                if k == 0 {
                    k = usize::MAX;
                    break;
                }
            }
            if k == usize::MAX {
                break;
            }
            if size == 0 {
                break;
            }
        }
    }
    unreachable!("removing every wire always disconnects");
}

/// Per-tick count of routed-signal moves crossing the causal sphere.
///
/// At tick t the sphere has radius c·(t−1) — where it stood when the moves
/// began.  A hop from A to B counts outward when ‖A‖ ≤ r < ‖B‖ and inward
/// when ‖B‖ ≤ r < ‖A‖ (L∞ norms about the center).  Returns one row per
/// tick from 1 to the makespan, zeros included.
pub fn boundary_cut_profile(e: &Embedding) -> Vec<(i64, u64)> {
    let makespan = e.firing_time.values().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; makespan.max(0) as usize + 1];
    for route in e.routes.values() {
        for (k, pair) in route.path.windows(2).enumerate() {
            let tick = route.depart + k as i64 + 1;
            if tick < 1 || tick > makespan {
                continue;
            }
            let r = e.c * (tick - 1);
            let a = linf_norm(&pair[0]);
            let b = linf_norm(&pair[1]);
            let crosses = (a <= r && r < b) || (b <= r && r < a);
            if crosses {
                counts[tick as usize] += 1;
            }
        }
    }
    (1..=makespan).map(|t| (t, counts[t as usize])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::embed::embed_layered_shells;
    use crate::uniform::build_parity_tree;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// x -> buf -> buf -> output: a chain has width 1.
    #[test]
    fn chain_has_width_one() {
        let mut b = CircuitBuilder::new(4);
        let x = b.input();
        let b1 = b.buf(x);
        let b2 = b.buf(b1);
        let out = b.output(b2);
        let c = b.finish();
        let report = cut_width(&c, &[x], &[out]).unwrap();
        assert_eq!(report.value, 1);
        assert_eq!(report.witness.len(), 1);
        assert_eq!(report.method, CutMethod::MaxFlow);
    }

    #[test]
    fn parity_tree_narrows_to_one_at_the_root() {
        let c = build_parity_tree(4).unwrap();
        let report = cut_width(&c, &c.input_ids(), &c.output_ids()).unwrap();
        assert_eq!(report.value, 1);
    }

    #[test]
    fn parallel_chains_have_width_two() {
        let mut b = CircuitBuilder::new(4);
        let x = b.input();
        let y = b.input();
        let bx = b.buf(x);
        let by = b.buf(y);
        let ox = b.output(bx);
        let oy = b.output(by);
        let c = b.finish();
        let report = cut_width(&c, &[x, y], &[ox, oy]).unwrap();
        assert_eq!(report.value, 2);
    }

    #[test]
    fn crossbar_needs_all_wires() {
        // Two inputs each feeding both of two NANDs: cut must take 4 wires
        // or isolate the gates (2+2 outgoing) — min is 2 via gate outputs.
        let mut b = CircuitBuilder::new(4);
        let x = b.input();
        let y = b.input();
        let g = b.nand(x, y);
        let h = b.nand(y, x);
        let og = b.output(g);
        let oh = b.output(h);
        let c = b.finish();
        let report = cut_width(&c, &[x, y], &[og, oh]).unwrap();
        assert_eq!(report.value, 2);
        let brute = brute_force_cut(&c, &[x, y], &[og, oh]).unwrap();
        assert_eq!(brute.value, 2);
    }

    #[test]
    fn disconnected_terminals_have_width_zero() {
        let mut b = CircuitBuilder::new(4);
        let x = b.input();
        let y = b.input();
        let bx = b.buf(x);
        b.output(bx);
        let by = b.buf(y);
        let oy = b.output(by);
        let c = b.finish();
        // x's component never reaches oy.
        let report = cut_width(&c, &[x], &[oy]).unwrap();
        assert_eq!(report.value, 0);
        assert!(report.witness.is_empty());
    }

    #[test]
    fn witness_disconnects_when_removed() {
        let c = build_parity_tree(8).unwrap();
        let sources = c.input_ids();
        let sinks = c.output_ids();
        let report = cut_width(&c, &sources, &sinks).unwrap();
        // Remove witness wires and re-run: width must drop to zero.
        let mut pruned = c.clone();
        for &(src, dst, port) in &report.witness {
            // Redirect the port to a fresh constant to sever the wire.
            assert_eq!(pruned.gates[dst as usize].inputs[port], src);
            let stub = pruned.gates.len() as GateId;
            pruned.gates.push(crate::circuit::Gate {
                kind: crate::circuit::GateKind::Const0,
                inputs: vec![],
            });
            pruned.gates[dst as usize].inputs[port] = stub;
        }
        let after = cut_width(&pruned, &sources, &sinks).unwrap();
        assert_eq!(after.value, 0);
    }

    #[test]
    fn terminal_errors_are_reported() {
        let c = build_parity_tree(4).unwrap();
        assert!(matches!(
            cut_width(&c, &[], &c.output_ids()),
            Err(WidthError::EmptyTerminals)
        ));
        assert!(matches!(
            cut_width(&c, &[999], &c.output_ids()),
            Err(WidthError::UnknownGate { gate: 999 })
        ));
        assert!(matches!(
            cut_width(&c, &[0], &[0]),
            Err(WidthError::OverlappingTerminals { gate: 0 })
        ));
    }

    #[test]
    fn brute_force_rejects_large_circuits() {
        let c = build_parity_tree(8).unwrap();
        assert!(matches!(
            brute_force_cut(&c, &c.input_ids(), &c.output_ids()),
            Err(WidthError::TooLargeForBruteForce { limit: 14, .. })
        ));
    }

    /// Random DAG: some inputs, a pile of NAND/Buf gates wired backward,
    /// outputs on the last few gates.
    fn random_dag(rng: &mut ChaCha8Rng) -> Circuit {
        let n_inputs = rng.gen_range(1..=3usize);
        let n_mid = rng.gen_range(1..=8usize);
        let mut b = CircuitBuilder::new(u32::MAX);
        let mut pool: Vec<GateId> = (0..n_inputs).map(|_| b.input()).collect();
        for _ in 0..n_mid {
            let a = pool[rng.gen_range(0..pool.len())];
            let id = if rng.gen_bool(0.7) {
                let c = pool[rng.gen_range(0..pool.len())];
                b.nand(a, c)
            } else {
                b.buf(a)
            };
            pool.push(id);
        }
        let n_outputs = rng.gen_range(1..=2usize);
        for k in 0..n_outputs {
            let src = pool[pool.len() - 1 - k];
            b.output(src);
        }
        b.finish()
    }

    #[test]
    fn maxflow_matches_brute_force_on_random_dags() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x71D7);
        for trial in 0..200 {
            let c = random_dag(&mut rng);
            if c.gates.len() > BRUTE_FORCE_LIMIT {
                continue;
            }
            let sources = c.input_ids();
            let sinks = c.output_ids();
            let fast = cut_width(&c, &sources, &sinks).unwrap();
            let slow = brute_force_cut(&c, &sources, &sinks).unwrap();
            assert_eq!(fast.value, slow.value, "trial {trial}: {}", c.encode());
        }
    }

    #[test]
    fn single_hop_profile_is_one_crossing() {
        let mut b = CircuitBuilder::new(4);
        let x = b.input();
        b.output(x);
        let c = b.finish();
        let (e, _) = embed_layered_shells(&c, 2).unwrap();
        assert_eq!(boundary_cut_profile(&e), vec![(1, 1)]);
    }

    #[test]
    fn profile_covers_every_tick() {
        let c = build_parity_tree(8).unwrap();
        let (e, _) = embed_layered_shells(&c, 2).unwrap();
        let profile = boundary_cut_profile(&e);
        let makespan = e.firing_time.values().max().copied().unwrap();
        assert_eq!(profile.len() as i64, makespan);
        assert_eq!(profile.first().unwrap().0, 1);
        assert!(profile.iter().any(|&(_, n)| n > 0));
    }
}
