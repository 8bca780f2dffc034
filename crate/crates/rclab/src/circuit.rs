//! NAND-basis circuits: representation, validation, evaluation, and a
//! canonical line-oriented text encoding.
//!
//! Gates are stored in a dense id-indexed array.  The allowed kinds are
//! primary inputs, output ports, two-input NAND, single-input buffers
//! (identity gates used to level wires for lattice placement), and the two
//! constants.  A circuit may additionally carry *feedback* edges: a feedback
//! edge `(src, dst)` marks every read of `src` by `dst` as latched, meaning
//! `dst` sees the value `src` produced on the previous tick.  Combinational
//! evaluation rejects circuits with feedback; the recurrent runner in
//! [`crate::recurrent`] handles them.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Dense gate identifier; also the gate's index in [`Circuit::gates`].
pub type GateId = u32;

/// The kinds of gate a circuit may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// Primary input; carries the input bit with matching ordinal.
    Input,
    /// Output port; forwards its single source wire.
    Output,
    /// Two-input NAND, the universal basis gate.
    Nand,
    /// Single-input identity gate, used to make wires span one level each.
    Buf,
    /// Constant false.
    Const0,
    /// Constant true.
    Const1,
}

impl GateKind {
    /// Number of input wires a gate of this kind must have.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Input | GateKind::Const0 | GateKind::Const1 => 0,
            GateKind::Output | GateKind::Buf => 1,
            GateKind::Nand => 2,
        }
    }

    /// Whether the gate performs computation (occupies a firing tick when
    /// scheduled), as opposed to being a port or a constant source.
    pub fn is_compute(self) -> bool {
        matches!(self, GateKind::Nand | GateKind::Buf)
    }
}

/// A single gate: its kind and the ids of the gates feeding it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<GateId>,
}

/// A circuit over the NAND basis with bounded fan-in and fan-out.
///
/// Invariants enforced by [`Circuit::validate`] rather than by construction,
/// so that malformed circuits can be represented, diagnosed, and reported:
/// arities match kinds, references stay in range, fan-out respects the
/// declared bound, the combinational part is acyclic, and the declared
/// input/output counts match the gates present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub gates: Vec<Gate>,
    /// Latched edges `(src, dst)`: every read of `src` by `dst` observes the
    /// previous tick's value.  Kept sorted and deduplicated.
    pub feedback: BTreeSet<(GateId, GateId)>,
    pub n_inputs: u32,
    pub n_outputs: u32,
    /// Maximum number of reads of any single gate's output.
    pub fanout_bound: u32,
}

/// A structural problem found by [`Circuit::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("gate {gate}: kind {kind:?} takes {expected} input(s), has {got}")]
    Arity {
        gate: GateId,
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("gate {gate}: reference to nonexistent gate {reference}")]
    DanglingRef { gate: GateId, reference: GateId },
    #[error("gate {gate}: fan-out {fanout} exceeds bound {bound}")]
    FanoutExceeded {
        gate: GateId,
        fanout: u32,
        bound: u32,
    },
    #[error("gate {gate} lies on a combinational cycle")]
    Cycle { gate: GateId },
    #[error("declared {declared} input(s) but found {found} input gate(s)")]
    InputCount { declared: u32, found: u32 },
    #[error("declared {declared} output(s) but found {found} output gate(s)")]
    OutputCount { declared: u32, found: u32 },
    #[error("feedback edge ({src}, {dst}) does not match a wire of the circuit")]
    FeedbackRef { src: GateId, dst: GateId },
}

/// Why combinational evaluation could not run.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("input vector has length {got}, circuit takes {expected}")]
    InputLen { expected: usize, got: usize },
    #[error("circuit has feedback edges; use the recurrent runner")]
    HasFeedback,
    #[error("circuit has a combinational cycle through gate {gate}")]
    Cyclic { gate: GateId },
    #[error("circuit is malformed: {0}")]
    Invalid(Violation),
}

impl Circuit {
    /// Ids of the primary input gates, in gate-id order.  The `k`-th entry
    /// carries input bit `k`.
    pub fn input_ids(&self) -> Vec<GateId> {
        self.ids_of_kind(GateKind::Input)
    }

    /// Ids of the output port gates, in gate-id order.  The `k`-th entry is
    /// output bit `k`.
    pub fn output_ids(&self) -> Vec<GateId> {
        self.ids_of_kind(GateKind::Output)
    }

    fn ids_of_kind(&self, kind: GateKind) -> Vec<GateId> {
        self.gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.kind == kind)
            .map(|(i, _)| i as GateId)
            .collect()
    }

    /// Number of NAND gates.
    pub fn nand_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::Nand).count()
    }

    /// All wires `(src, dst)`, one per input reference, in destination order.
    /// A gate reading the same source twice yields two wires.
    pub fn wires(&self) -> Vec<(GateId, GateId)> {
        let mut out = Vec::new();
        for (dst, gate) in self.gates.iter().enumerate() {
            for &src in &gate.inputs {
                out.push((src, dst as GateId));
            }
        }
        out
    }

    /// Fan-out of every gate: uses as an input across all gates, plus
    /// feedback out-edges (a latched wire needs both its combinational read
    /// and its latch tap).
    pub fn fanout_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.gates.len()];
        for gate in &self.gates {
            for &src in &gate.inputs {
                if (src as usize) < counts.len() {
                    counts[src as usize] += 1;
                }
            }
        }
        for &(src, _) in &self.feedback {
            if (src as usize) < counts.len() {
                counts[src as usize] += 1;
            }
        }
        counts
    }

    /// Whether the wire `(src, dst)` is latched by a feedback edge.
    pub fn is_latched(&self, src: GateId, dst: GateId) -> bool {
        self.feedback.contains(&(src, dst))
    }

    /// Check every structural invariant and return all violations found.
    /// An empty vector means the circuit is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.gates.len();

        for (id, gate) in self.gates.iter().enumerate() {
            let expected = gate.kind.arity();
            if gate.inputs.len() != expected {
                out.push(Violation::Arity {
                    gate: id as GateId,
                    kind: gate.kind,
                    expected,
                    got: gate.inputs.len(),
                });
            }
            for &src in &gate.inputs {
                if src as usize >= n {
                    out.push(Violation::DanglingRef {
                        gate: id as GateId,
                        reference: src,
                    });
                }
            }
        }

        for (id, &fanout) in self.fanout_counts().iter().enumerate() {
            if fanout > self.fanout_bound {
                out.push(Violation::FanoutExceeded {
                    gate: id as GateId,
                    fanout,
                    bound: self.fanout_bound,
                });
            }
        }

        let found_in = self.input_ids().len() as u32;
        if found_in != self.n_inputs {
            out.push(Violation::InputCount {
                declared: self.n_inputs,
                found: found_in,
            });
        }
        let found_out = self.output_ids().len() as u32;
        if found_out != self.n_outputs {
            out.push(Violation::OutputCount {
                declared: self.n_outputs,
                found: found_out,
            });
        }

        for &(src, dst) in &self.feedback {
            let matches_wire = (dst as usize) < n
                && (src as usize) < n
                && self.gates[dst as usize].inputs.contains(&src);
            if !matches_wire {
                out.push(Violation::FeedbackRef { src, dst });
            }
        }

        if let Err(gate) = self.topo_order() {
            out.push(Violation::Cycle { gate });
        }

        out
    }

    /// Topological order of all gates over the live (non-latched) wires,
    /// smallest id first among ready gates, or the id of a gate on a
    /// combinational cycle.
    pub fn topo_order(&self) -> Result<Vec<GateId>, GateId> {
        let n = self.gates.len();
        let mut indegree = vec![0u32; n];
        let mut succs: Vec<Vec<GateId>> = vec![Vec::new(); n];
        for (dst, gate) in self.gates.iter().enumerate() {
            for &src in &gate.inputs {
                if (src as usize) < n && !self.is_latched(src, dst as GateId) {
                    indegree[dst] += 1;
                    succs[src as usize].push(dst as GateId);
                }
            }
        }
        let mut ready: BTreeSet<GateId> = (0..n as GateId)
            .filter(|&id| indegree[id as usize] == 0)
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&id) = ready.iter().next() {
            ready.remove(&id);
            order.push(id);
            for &succ in &succs[id as usize] {
                indegree[succ as usize] -= 1;
                if indegree[succ as usize] == 0 {
                    ready.insert(succ);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap_or(0);
            Err(stuck as GateId)
        }
    }

    /// Combinational level of every gate: inputs and constants sit at level
    /// 0, a compute gate fires one level after the latest of its live
    /// inputs, and an output port reports the level of its source.
    pub fn levels(&self) -> Result<Vec<u32>, GateId> {
        let order = self.topo_order()?;
        let mut level = vec![0u32; self.gates.len()];
        for &id in &order {
            let gate = &self.gates[id as usize];
            let live_max = gate
                .inputs
                .iter()
                .filter(|&&src| !self.is_latched(src, id))
                .map(|&src| level[src as usize])
                .max();
            level[id as usize] = match gate.kind {
                GateKind::Input | GateKind::Const0 | GateKind::Const1 => 0,
                GateKind::Output => live_max.unwrap_or(0),
                GateKind::Nand | GateKind::Buf => live_max.map_or(1, |m| m + 1),
            };
        }
        Ok(level)
    }

    /// Depth: the largest number of compute gates on any input-to-output
    /// path.  A bare input-to-output wire has depth 0.
    pub fn depth(&self) -> Result<u32, GateId> {
        let levels = self.levels()?;
        Ok(self
            .gates
            .iter()
            .zip(&levels)
            .filter(|(g, _)| g.kind.is_compute())
            .map(|(_, &l)| l)
            .max()
            .unwrap_or(0))
    }

    /// Evaluate the circuit combinationally on one input vector.  Fails on
    /// feedback edges, cycles, arity or reference violations, or an input
    /// vector of the wrong length.  Output bits come back in output-port id
    /// order.
    pub fn evaluate(&self, inputs: &[bool]) -> Result<Vec<bool>, EvalError> {
        if !self.feedback.is_empty() {
            return Err(EvalError::HasFeedback);
        }
        if inputs.len() != self.n_inputs as usize {
            return Err(EvalError::InputLen {
                expected: self.n_inputs as usize,
                got: inputs.len(),
            });
        }
        let n = self.gates.len();
        for (id, gate) in self.gates.iter().enumerate() {
            if gate.inputs.len() != gate.kind.arity() {
                return Err(EvalError::Invalid(Violation::Arity {
                    gate: id as GateId,
                    kind: gate.kind,
                    expected: gate.kind.arity(),
                    got: gate.inputs.len(),
                }));
            }
            for &src in &gate.inputs {
                if src as usize >= n {
                    return Err(EvalError::Invalid(Violation::DanglingRef {
                        gate: id as GateId,
                        reference: src,
                    }));
                }
            }
        }
        let order = self.topo_order().map_err(|gate| EvalError::Cyclic { gate })?;

        let mut value = vec![false; n];
        let mut next_input = 0usize;
        // Input ordinals follow gate-id order; the topological order visits
        // zero-indegree gates smallest id first, so inputs are numbered
        // consistently with `input_ids()`.
        for &id in &order {
            let gate = &self.gates[id as usize];
            let arg = |k: usize| value[gate.inputs[k] as usize];
            value[id as usize] = match gate.kind {
                GateKind::Input => {
                    let v = inputs[next_input];
                    next_input += 1;
                    v
                }
                GateKind::Const0 => false,
                GateKind::Const1 => true,
                GateKind::Buf | GateKind::Output => arg(0),
                GateKind::Nand => !(arg(0) && arg(1)),
            };
        }
        Ok(self
            .output_ids()
            .into_iter()
            .map(|id| value[id as usize])
            .collect())
    }

    /// Serialize to the canonical text encoding.  The encoding is total: it
    /// round-trips every representable circuit, well formed or not, and two
    /// circuits encode to the same bytes iff they are identical structures.
    pub fn encode(&self) -> String {
        let mut out = String::new();
        out.push_str("rclab-circuit v1\n");
        out.push_str(&format!("n_inputs {}\n", self.n_inputs));
        out.push_str(&format!("n_outputs {}\n", self.n_outputs));
        out.push_str(&format!("fanout_bound {}\n", self.fanout_bound));
        out.push_str(&format!("gates {}\n", self.gates.len()));
        for (id, gate) in self.gates.iter().enumerate() {
            out.push_str(&gate_line(id as GateId, gate));
            out.push('\n');
        }
        out.push_str(&format!("feedback {}\n", self.feedback.len()));
        for &(src, dst) in &self.feedback {
            out.push_str(&format!("fb {src} {dst}\n"));
        }
        out
    }

    /// Parse the canonical text encoding.  Strict: every count must match,
    /// gate ids must be dense and ascending, feedback edges sorted and
    /// unique, and no trailing garbage is allowed.
    pub fn decode(text: &str) -> Result<Circuit, DecodeError> {
        let mut lines = text.lines().enumerate();
        let mut next = |what: &'static str| {
            lines
                .next()
                .ok_or(DecodeError::Truncated { expected: what })
        };

        let (_, header) = next("header")?;
        if header != "rclab-circuit v1" {
            return Err(DecodeError::Header);
        }
        let n_inputs = parse_count_line(next("n_inputs")?, "n_inputs")?;
        let n_outputs = parse_count_line(next("n_outputs")?, "n_outputs")?;
        let fanout_bound = parse_count_line(next("fanout_bound")?, "fanout_bound")?;
        let n_gates = parse_count_line(next("gates")?, "gates")?;

        let mut gates = Vec::with_capacity(n_gates as usize);
        for expect_id in 0..n_gates {
            let (lineno, line) = next("gate line")?;
            gates.push(parse_gate_line(lineno, line, expect_id)?);
        }

        let n_feedback = parse_count_line(next("feedback")?, "feedback")?;
        let mut feedback = BTreeSet::new();
        let mut prev: Option<(GateId, GateId)> = None;
        for _ in 0..n_feedback {
            let (lineno, line) = next("feedback edge")?;
            let edge = parse_fb_line(lineno, line)?;
            if prev.is_some_and(|p| p >= edge) {
                return Err(DecodeError::FeedbackOrder { line: lineno + 1 });
            }
            prev = Some(edge);
            feedback.insert(edge);
        }

        if let Some((lineno, line)) = lines.next() {
            if !line.is_empty() || lines.next().is_some() {
                return Err(DecodeError::Trailing { line: lineno + 1 });
            }
        }

        Ok(Circuit {
            gates,
            feedback,
            n_inputs,
            n_outputs,
            fanout_bound,
        })
    }
}

/// The canonical line for one gate, without the trailing newline.  Exposed
/// so that edit scripts can rewrite single lines and account their cost in
/// bytes.
pub fn gate_line(id: GateId, gate: &Gate) -> String {
    let mut s = format!("g {id} {}", kind_token(gate.kind));
    for &src in &gate.inputs {
        s.push_str(&format!(" {src}"));
    }
    s
}

fn kind_token(kind: GateKind) -> &'static str {
    match kind {
        GateKind::Input => "in",
        GateKind::Output => "out",
        GateKind::Nand => "nand",
        GateKind::Buf => "buf",
        GateKind::Const0 => "c0",
        GateKind::Const1 => "c1",
    }
}

fn kind_from_token(tok: &str) -> Option<GateKind> {
    Some(match tok {
        "in" => GateKind::Input,
        "out" => GateKind::Output,
        "nand" => GateKind::Nand,
        "buf" => GateKind::Buf,
        "c0" => GateKind::Const0,
        "c1" => GateKind::Const1,
        _ => return None,
    })
}

/// Failure modes of [`Circuit::decode`].  Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("missing or unrecognized header line")]
    Header,
    #[error("truncated input: expected {expected}")]
    Truncated { expected: &'static str },
    #[error("line {line}: expected `{field} <count>`")]
    CountLine { line: usize, field: &'static str },
    #[error("line {line}: malformed gate line")]
    GateLine { line: usize },
    #[error("line {line}: gate id out of order (expected {expected})")]
    IdOrder { line: usize, expected: GateId },
    #[error("line {line}: malformed feedback edge")]
    FbLine { line: usize },
    #[error("line {line}: feedback edges out of order or duplicated")]
    FeedbackOrder { line: usize },
    #[error("line {line}: trailing content after circuit")]
    Trailing { line: usize },
}

fn parse_count_line(
    (lineno, line): (usize, &str),
    field: &'static str,
) -> Result<u32, DecodeError> {
    let err = DecodeError::CountLine {
        line: lineno + 1,
        field,
    };
    let rest = line.strip_prefix(field).ok_or(err.clone())?;
    let rest = rest.strip_prefix(' ').ok_or(err.clone())?;
    rest.parse::<u32>().map_err(|_| err)
}

fn parse_gate_line(lineno: usize, line: &str, expect_id: u32) -> Result<Gate, DecodeError> {
    let malformed = DecodeError::GateLine { line: lineno + 1 };
    let mut toks = line.split(' ');
    if toks.next() != Some("g") {
        return Err(malformed);
    }
    let id: GateId = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(malformed.clone())?;
    if id != expect_id {
        return Err(DecodeError::IdOrder {
            line: lineno + 1,
            expected: expect_id,
        });
    }
    let kind = toks
        .next()
        .and_then(kind_from_token)
        .ok_or(malformed.clone())?;
    let mut inputs = Vec::new();
    for tok in toks {
        inputs.push(tok.parse().map_err(|_| malformed.clone())?);
    }
    if inputs.len() != kind.arity() {
        return Err(malformed);
    }
    Ok(Gate { kind, inputs })
}

fn parse_fb_line(lineno: usize, line: &str) -> Result<(GateId, GateId), DecodeError> {
    let malformed = DecodeError::FbLine { line: lineno + 1 };
    let mut toks = line.split(' ');
    if toks.next() != Some("fb") {
        return Err(malformed);
    }
    let src = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(malformed.clone())?;
    let dst = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(malformed.clone())?;
    if toks.next().is_some() {
        return Err(malformed);
    }
    Ok((src, dst))
}

/// Incremental circuit constructor.  Gates receive dense ids in creation
/// order, which is therefore also a topological order for circuits built
/// bottom-up.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    feedback: BTreeSet<(GateId, GateId)>,
    n_inputs: u32,
    n_outputs: u32,
    fanout_bound: u32,
}

impl CircuitBuilder {
    pub fn new(fanout_bound: u32) -> Self {
        CircuitBuilder {
            gates: Vec::new(),
            feedback: BTreeSet::new(),
            n_inputs: 0,
            n_outputs: 0,
            fanout_bound,
        }
    }

    fn push(&mut self, kind: GateKind, inputs: Vec<GateId>) -> GateId {
        let id = self.gates.len() as GateId;
        self.gates.push(Gate { kind, inputs });
        id
    }

    /// Add the next primary input.
    pub fn input(&mut self) -> GateId {
        self.n_inputs += 1;
        self.push(GateKind::Input, Vec::new())
    }

    /// Add an output port forwarding `src`.
    pub fn output(&mut self, src: GateId) -> GateId {
        self.n_outputs += 1;
        self.push(GateKind::Output, vec![src])
    }

    pub fn nand(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(GateKind::Nand, vec![a, b])
    }

    pub fn buf(&mut self, src: GateId) -> GateId {
        self.push(GateKind::Buf, vec![src])
    }

    pub fn const0(&mut self) -> GateId {
        self.push(GateKind::Const0, Vec::new())
    }

    pub fn const1(&mut self) -> GateId {
        self.push(GateKind::Const1, Vec::new())
    }

    /// XOR of two wires out of four NANDs (depth 3): the standard
    /// share-the-first-gate construction.
    pub fn xor(&mut self, a: GateId, b: GateId) -> GateId {
        let t = self.nand(a, b);
        let u = self.nand(a, t);
        let v = self.nand(b, t);
        self.nand(u, v)
    }

    /// Mark every read of `src` by `dst` as latched across ticks.
    pub fn feedback(&mut self, src: GateId, dst: GateId) {
        self.feedback.insert((src, dst));
    }

    pub fn finish(self) -> Circuit {
        Circuit {
            gates: self.gates,
            feedback: self.feedback,
            n_inputs: self.n_inputs,
            n_outputs: self.n_outputs,
            fanout_bound: self.fanout_bound,
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wire_through() -> Circuit {
        let mut b = CircuitBuilder::new(4);
        let x = b.input();
        b.output(x);
        b.finish()
    }

    #[test]
    fn bare_wire_validates_clean() {
        let c = wire_through();
        assert_eq!(c.validate(), Vec::new());
        assert_eq!(c.depth().unwrap(), 0);
        assert_eq!(c.evaluate(&[true]).unwrap(), vec![true]);
        assert_eq!(c.evaluate(&[false]).unwrap(), vec![false]);
    }

    #[test]
    fn nand_arity_is_checked() {
        let mut c = wire_through();
        c.gates.push(Gate {
            kind: GateKind::Nand,
            inputs: vec![0],
        });
        let v = c.validate();
        assert!(v.contains(&Violation::Arity {
            gate: 2,
            kind: GateKind::Nand,
            expected: 2,
            got: 1,
        }));
    }

    #[test]
    fn fanout_bound_is_checked() {
        let mut b = CircuitBuilder::new(4);
        let x = b.input();
        // Five reads of `x` against a bound of four: two self-NANDs read it
        // twice each, the buffer once.
        b.nand(x, x);
        b.nand(x, x);
        let f = b.buf(x);
        b.output(f);
        let c = b.finish();
        let v = c.validate();
        assert!(v.contains(&Violation::FanoutExceeded {
            gate: 0,
            fanout: 5,
            bound: 4,
        }));
    }

    #[test]
    fn dangling_reference_is_checked() {
        let mut c = wire_through();
        c.gates[1].inputs[0] = 99;
        let v = c.validate();
        assert!(v.contains(&Violation::DanglingRef {
            gate: 1,
            reference: 99,
        }));
    }

    #[test]
    fn combinational_cycle_is_checked() {
        let mut b = CircuitBuilder::new(4);
        let x = b.input();
        let a = b.nand(x, x);
        b.output(a);
        let mut c = b.finish();
        // Rewire the NAND to read itself.
        c.gates[1].inputs[1] = 1;
        assert!(c
            .validate()
            .iter()
            .any(|v| matches!(v, Violation::Cycle { .. })));
        assert!(matches!(
            c.evaluate(&[false]),
            Err(EvalError::Cyclic { .. })
        ));
    }

    #[test]
    fn latched_self_loop_is_not_a_cycle() {
        let mut b = CircuitBuilder::new(4);
        let x = b.input();
        let a = b.nand(x, x);
        b.output(a);
        let mut c = b.finish();
        c.gates[1].inputs[1] = 1;
        c.feedback.insert((1, 1));
        assert_eq!(c.validate(), Vec::new());
        assert_eq!(c.evaluate(&[false]), Err(EvalError::HasFeedback));
    }

    #[test]
    fn declared_counts_are_checked() {
        let mut c = wire_through();
        c.n_inputs = 3;
        c.n_outputs = 0;
        let v = c.validate();
        assert!(v.contains(&Violation::InputCount {
            declared: 3,
            found: 1,
        }));
        assert!(v.contains(&Violation::OutputCount {
            declared: 0,
            found: 1,
        }));
    }

    #[test]
    fn feedback_must_match_a_wire() {
        let mut c = wire_through();
        c.feedback.insert((1, 0));
        let v = c.validate();
        assert!(v.contains(&Violation::FeedbackRef { src: 1, dst: 0 }));
    }

    fn xor_circuit() -> Circuit {
        let mut b = CircuitBuilder::new(4);
        let a = b.input();
        let bb = b.input();
        let w = b.xor(a, bb);
        b.output(w);
        b.finish()
    }

    #[test]
    fn xor_truth_table() {
        let c = xor_circuit();
        assert_eq!(c.validate(), Vec::new());
        assert_eq!(c.nand_count(), 4);
        assert_eq!(c.depth().unwrap(), 3);
        for (a, b, want) in [
            (false, false, false),
            (false, true, true),
            (true, false, true),
            (true, true, false),
        ] {
            assert_eq!(c.evaluate(&[a, b]).unwrap(), vec![want], "{a} {b}");
        }
    }

    #[test]
    fn encode_then_decode_round_trips() {
        let mut c = xor_circuit();
        c.feedback.insert((2, 3));
        // Keep it structurally consistent: gate 3 must actually read gate 2.
        assert!(c.gates[3].inputs.contains(&2));
        let text = c.encode();
        let back = Circuit::decode(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.encode(), text);
    }

    #[test]
    fn encoding_is_byte_stable() {
        let c = xor_circuit();
        let expected = "rclab-circuit v1\n\
                        n_inputs 2\n\
                        n_outputs 1\n\
                        fanout_bound 4\n\
                        gates 7\n\
                        g 0 in\n\
                        g 1 in\n\
                        g 2 nand 0 1\n\
                        g 3 nand 0 2\n\
                        g 4 nand 1 2\n\
                        g 5 nand 3 4\n\
                        g 6 out 5\n\
                        feedback 0\n";
        assert_eq!(c.encode(), expected);
    }

    #[test]
    fn decode_rejects_malformed_input() {
        assert_eq!(Circuit::decode("nope"), Err(DecodeError::Header));
        let mut text = xor_circuit().encode();
        text.push_str("extra\n");
        assert!(matches!(
            Circuit::decode(&text),
            Err(DecodeError::Trailing { .. })
        ));
        let missing = "rclab-circuit v1\nn_inputs 1\n";
        assert!(matches!(
            Circuit::decode(missing),
            Err(DecodeError::Truncated { .. })
        ));
        let bad_id = xor_circuit().encode().replace("g 3 nand", "g 9 nand");
        assert!(matches!(
            Circuit::decode(&bad_id),
            Err(DecodeError::IdOrder { .. })
        ));
    }

    #[test]
    fn buffers_forward_their_input() {
        let mut b = CircuitBuilder::new(4);
        let x = b.input();
        let f = b.buf(x);
        let g = b.buf(f);
        b.output(g);
        let c = b.finish();
        assert_eq!(c.validate(), Vec::new());
        assert_eq!(c.depth().unwrap(), 2);
        assert_eq!(c.evaluate(&[true]).unwrap(), vec![true]);
        assert_eq!(c.evaluate(&[false]).unwrap(), vec![false]);
    }

    #[test]
    fn constants_evaluate() {
        let mut b = CircuitBuilder::new(4);
        let zero = b.const0();
        let one = b.const1();
        let n = b.nand(zero, one);
        b.output(n);
        let c = b.finish();
        assert_eq!(c.evaluate(&[]).unwrap(), vec![true]);
    }
}
