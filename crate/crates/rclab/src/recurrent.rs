//! One-dimensional recurrent realizations: Turing machines compiled to
//! local lattice automata, plus iteration of feedback circuits.
//!
//! A deterministic single-tape Turing machine compiles to a
//! one-dimensional automaton whose cells hold (symbol, optional head
//! state) and whose update rule reads only the three-cell neighborhood.
//! One automaton tick simulates exactly one machine step, and the head
//! marker moves at most one cell per tick, so the construction respects
//! unit signal speed.  `run_lockstep` executes machine and automaton side
//! by side and reports the first divergence, if any.
//!
//! `run_recurrent` iterates a feedback circuit: wires marked as feedback
//! edges read their source's previous-tick value, and the state vector
//! advances once per tick.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::circuit::{Circuit, GateId, GateKind};

/// Index into a machine's state list.
pub type StateId = u16;
/// Index into a machine's symbol list.
pub type SymbolId = u8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Move {
    L,
    R,
}

impl Move {
    fn offset(self) -> i64 {
        match self {
            Move::L => -1,
            Move::R => 1,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::L => "L",
            Move::R => "R",
        })
    }
}

/// A deterministic single-tape Turing machine.
///
/// The transition table must cover every (state, symbol) pair for
/// non-halting states; halting states have no transitions and freeze the
/// configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    pub states: Vec<String>,
    pub symbols: Vec<String>,
    pub blank: SymbolId,
    pub start: StateId,
    pub halting: BTreeSet<StateId>,
    pub table: BTreeMap<(StateId, SymbolId), (StateId, SymbolId, Move)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecurrentError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate transition for ({state}, {symbol}): table is nondeterministic")]
    DuplicateTransition { state: String, symbol: String },
    #[error("missing transition for non-halting ({state}, {symbol})")]
    MissingTransition { state: String, symbol: String },
    #[error("unknown state name {0:?}")]
    UnknownState(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("machine refers to state index {0} outside its state list")]
    StateIndex(StateId),
    #[error("machine refers to symbol index {0} outside its alphabet")]
    SymbolIndex(SymbolId),
    #[error("tape character {0:?} is not a single-character alphabet symbol")]
    TapeChar(char),
    #[error("lattice of {lattice} cells overflowed; {required} cells cannot overflow in this run")]
    TapeOverflow { lattice: usize, required: usize },
    #[error("state vector has {got} bits but the circuit has {expected} feedback edges")]
    StateWidth { expected: usize, got: usize },
    #[error("recurrent runs are autonomous; circuit declares {0} input ports")]
    HasInputs(u32),
    #[error("circuit fails validation with {0} violation(s)")]
    CircuitInvalid(usize),
}

impl TuringMachine {
    /// Check determinism, totality on non-halting states, and index
    /// bounds.
    pub fn validate(&self) -> Result<(), RecurrentError> {
        let ns = self.states.len() as usize;
        let nk = self.symbols.len() as usize;
        if self.start as usize >= ns {
            return Err(RecurrentError::StateIndex(self.start));
        }
        if self.blank as usize >= nk {
            return Err(RecurrentError::SymbolIndex(self.blank));
        }
        for &q in &self.halting {
            if q as usize >= ns {
                return Err(RecurrentError::StateIndex(q));
            }
        }
        for (&(q, s), &(q2, s2, _)) in &self.table {
            for state in [q, q2] {
                if state as usize >= ns {
                    return Err(RecurrentError::StateIndex(state));
                }
            }
            for sym in [s, s2] {
                if sym as usize >= nk {
                    return Err(RecurrentError::SymbolIndex(sym));
                }
            }
        }
        for q in 0..ns as StateId {
            if self.halting.contains(&q) {
                continue;
            }
            for s in 0..nk as SymbolId {
                if !self.table.contains_key(&(q, s)) {
                    return Err(RecurrentError::MissingTransition {
                        state: self.states[q as usize].clone(),
                        symbol: self.symbols[s as usize].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn state_id(&self, name: &str) -> Result<StateId, RecurrentError> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| i as StateId)
            .ok_or_else(|| RecurrentError::UnknownState(name.to_string()))
    }

    fn symbol_id(&self, name: &str) -> Result<SymbolId, RecurrentError> {
        self.symbols
            .iter()
            .position(|s| s == name)
            .map(|i| i as SymbolId)
            .ok_or_else(|| RecurrentError::UnknownSymbol(name.to_string()))
    }

    /// Parse the structured-text description.  Format:
    ///
    /// ```text
    /// tm v1
    /// states: A B C H
    /// alphabet: 0 1
    /// blank: 0
    /// start: A
    /// halt: H
    /// A 0 -> B 1 R
    /// ...
    /// ```
    ///
    /// Blank lines and `#` comments are skipped; a repeated (state,
    /// symbol) left-hand side is rejected as nondeterministic.
    pub fn parse(text: &str) -> Result<TuringMachine, RecurrentError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line: usize, message: &str| RecurrentError::Parse {
            line,
            message: message.to_string(),
        };
        let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty description"))?;
        if header != "tm v1" {
            return Err(parse_err(line, "expected header `tm v1`"));
        }
        let mut field = |key: &str| -> Result<(usize, Vec<String>), RecurrentError> {
            let (line, l) = lines
                .next()
                .ok_or_else(|| parse_err(0, &format!("missing `{key}:` line")))?;
            let rest = l
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix(':'))
                .ok_or_else(|| parse_err(line, &format!("expected `{key}:` line")))?;
            Ok((line, rest.split_whitespace().map(str::to_string).collect()))
        };
        let (line, states) = field("states")?;
        if states.is_empty() {
            return Err(parse_err(line, "machine needs at least one state"));
        }
        let (line, symbols) = field("alphabet")?;
        if symbols.is_empty() {
            return Err(parse_err(line, "alphabet needs at least one symbol"));
        }
        let (line, blank_names) = field("blank")?;
        if blank_names.len() != 1 {
            return Err(parse_err(line, "blank takes exactly one symbol"));
        }
        let (line, start_names) = field("start")?;
        if start_names.len() != 1 {
            return Err(parse_err(line, "start takes exactly one state"));
        }
        let (_, halt_names) = field("halt")?;

        let mut tm = TuringMachine {
            states,
            symbols,
            blank: 0,
            start: 0,
            halting: BTreeSet::new(),
            table: BTreeMap::new(),
        };
        tm.blank = tm.symbol_id(&blank_names[0])?;
        tm.start = tm.state_id(&start_names[0])?;
        for name in &halt_names {
            let q = tm.state_id(name)?;
            tm.halting.insert(q);
        }
        for (line, l) in lines {
            let tokens: Vec<&str> = l.split_whitespace().collect();
            if tokens.len() != 6 || tokens[2] != "->" {
                return Err(parse_err(line, "expected `state symbol -> state symbol move`"));
            }
            let q = tm.state_id(tokens[0])?;
            let s = tm.symbol_id(tokens[1])?;
            let q2 = tm.state_id(tokens[3])?;
            let s2 = tm.symbol_id(tokens[4])?;
            let mv = match tokens[5] {
                "L" => Move::L,
                "R" => Move::R,
                _ => return Err(parse_err(line, "move must be L or R")),
            };
            if tm.table.insert((q, s), (q2, s2, mv)).is_some() {
                return Err(RecurrentError::DuplicateTransition {
                    state: tm.states[q as usize].clone(),
                    symbol: tm.symbols[s as usize].clone(),
                });
            }
        }
        tm.validate()?;
        Ok(tm)
    }

    /// Serialize back to the structured-text description.
    pub fn to_text(&self) -> String {
        let mut out = String::from("tm v1\n");
        out.push_str(&format!("states: {}\n", self.states.join(" ")));
        out.push_str(&format!("alphabet: {}\n", self.symbols.join(" ")));
        out.push_str(&format!("blank: {}\n", self.symbols[self.blank as usize]));
        out.push_str(&format!("start: {}\n", self.states[self.start as usize]));
        let halts: Vec<&str> = self
            .halting
            .iter()
            .map(|&q| self.states[q as usize].as_str())
            .collect();
        out.push_str(&format!("halt: {}\n", halts.join(" ")));
        for (&(q, s), &(q2, s2, mv)) in &self.table {
            out.push_str(&format!(
                "{} {} -> {} {} {}\n",
                self.states[q as usize],
                self.symbols[s as usize],
                self.states[q2 as usize],
                self.symbols[s2 as usize],
                mv,
            ));
        }
        out
    }

    /// Convert a string of single-character symbols into tape contents.
    pub fn tape_from_str(&self, tape: &str) -> Result<Vec<SymbolId>, RecurrentError> {
        tape.chars()
            .map(|ch| {
                self.symbols
                    .iter()
                    .position(|s| s.len() == 1 && s.chars().next() == Some(ch))
                    .map(|i| i as SymbolId)
                    .ok_or(RecurrentError::TapeChar(ch))
            })
            .collect()
    }

    /// Scan right over 1s and append a single 1 at the first blank.
    pub fn unary_increment() -> TuringMachine {
        TuringMachine::parse(
            "tm v1\n\
             states: S H\n\
             alphabet: 0 1\n\
             blank: 0\n\
             start: S\n\
             halt: H\n\
             S 1 -> S 1 R\n\
             S 0 -> H 1 R\n",
        )
        .expect("built-in machine parses")
    }

    /// Starts in its halting state; every configuration is a fixed point.
    pub fn immediate_halt() -> TuringMachine {
        TuringMachine::parse(
            "tm v1\n\
             states: H\n\
             alphabet: 0 1\n\
             blank: 0\n\
             start: H\n\
             halt: H\n",
        )
        .expect("built-in machine parses")
    }

    /// The three-state two-symbol champion for most 1s written: halts
    /// after 13 steps on a blank tape leaving six 1s.
    pub fn busy_beaver_3_2() -> TuringMachine {
        TuringMachine::parse(
            "tm v1\n\
             states: A B C H\n\
             alphabet: 0 1\n\
             blank: 0\n\
             start: A\n\
             halt: H\n\
             A 0 -> B 1 R\n\
             A 1 -> C 1 L\n\
             B 0 -> A 1 L\n\
             B 1 -> B 1 R\n\
             C 0 -> B 1 L\n\
             C 1 -> H 1 R\n",
        )
        .expect("built-in machine parses")
    }

    /// Never halts: bounces between two cells, flipping each on every
    /// visit.  Exercises long lockstep runs.
    pub fn two_cell_flipper() -> TuringMachine {
        TuringMachine::parse(
            "tm v1\n\
             states: P Q\n\
             alphabet: 0 1\n\
             blank: 0\n\
             start: P\n\
             halt:\n\
             P 0 -> Q 1 R\n\
             P 1 -> Q 0 R\n\
             Q 0 -> P 1 L\n\
             Q 1 -> P 0 L\n",
        )
        .expect("built-in machine parses")
    }
}

/// Direct Turing machine execution on an unbounded sparse tape; the
/// reference oracle the automaton is verified against.
#[derive(Debug, Clone)]
pub struct TmExecution {
    tm: TuringMachine,
    tape: BTreeMap<i64, SymbolId>,
    head: i64,
    state: StateId,
    steps: u32,
}

impl TmExecution {
    /// Start on `tape` laid out from position 0, head at 0.
    pub fn new(tm: &TuringMachine, tape: &[SymbolId]) -> TmExecution {
        let cells = tape
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s != tm.blank)
            .map(|(i, &s)| (i as i64, s))
            .collect();
        TmExecution {
            tm: tm.clone(),
            tape: cells,
            head: 0,
            state: tm.start,
            steps: 0,
        }
    }

    pub fn halted(&self) -> bool {
        self.tm.halting.contains(&self.state)
    }

    pub fn head(&self) -> i64 {
        self.head
    }

    pub fn state(&self) -> StateId {
        self.state
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn read(&self, pos: i64) -> SymbolId {
        self.tape.get(&pos).copied().unwrap_or(self.tm.blank)
    }

    /// Number of tape cells holding `symbol` (must be non-blank).
    pub fn count_symbol(&self, symbol: SymbolId) -> usize {
        self.tape.values().filter(|&&s| s == symbol).count()
    }

    /// Apply one transition; false if already halted.
    pub fn step(&mut self) -> bool {
        if self.halted() {
            return false;
        }
        let read = self.read(self.head);
        let &(q2, write, mv) = self
            .tm
            .table
            .get(&(self.state, read))
            .expect("validated table is total on non-halting states");
        if write == self.tm.blank {
            self.tape.remove(&self.head);
        } else {
            self.tape.insert(self.head, write);
        }
        self.head += mv.offset();
        self.state = q2;
        self.steps += 1;
        true
    }
}

/// One lattice cell: a tape symbol plus, for at most one cell in the
/// whole lattice, the head marker carrying the machine state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub symbol: SymbolId,
    pub head: Option<StateId>,
}

/// The local update table compiled from a machine: what each cell does
/// based on its three-cell neighborhood.
#[derive(Debug, Clone)]
pub struct CompiledRule {
    table: BTreeMap<(StateId, SymbolId), (StateId, SymbolId, Move)>,
    halting: BTreeSet<StateId>,
    blank: SymbolId,
    start: StateId,
}

/// Derive the local rule simulating one machine step per tick.
pub fn compile_tm(tm: &TuringMachine) -> Result<CompiledRule, RecurrentError> {
    tm.validate()?;
    Ok(CompiledRule {
        table: tm.table.clone(),
        halting: tm.halting.clone(),
        blank: tm.blank,
        start: tm.start,
    })
}

/// A fixed-size row of cells evolving under a compiled rule.
///
/// The lattice never grows: the head walking past either wall simply
/// drops its marker, which is why lockstep runs size the margin first and
/// treat overflow as an error.
#[derive(Debug, Clone)]
pub struct LatticeAutomaton1D {
    rule: CompiledRule,
    cells: Vec<Cell>,
    tick: u32,
}

impl LatticeAutomaton1D {
    /// Lay out `tape` with `margin` blank cells on both sides and the
    /// head marker on the first tape cell.
    pub fn new(rule: &CompiledRule, tape: &[SymbolId], margin: usize) -> LatticeAutomaton1D {
        let body = tape.len().max(1);
        let mut cells = vec![
            Cell {
                symbol: rule.blank,
                head: None,
            };
            2 * margin + body
        ];
        for (i, &s) in tape.iter().enumerate() {
            cells[margin + i].symbol = s;
        }
        cells[margin].head = Some(rule.start);
        LatticeAutomaton1D {
            rule: rule.clone(),
            cells,
            tick: 0,
        }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn tick(&self) -> u32 {
        self.tick
    }

    pub fn head_count(&self) -> usize {
        self.cells.iter().filter(|c| c.head.is_some()).count()
    }

    /// The new value of a cell from exactly its three-cell neighborhood;
    /// locality is structural in this signature.
    fn update_cell(rule: &CompiledRule, left: &Cell, center: &Cell, right: &Cell) -> Cell {
        if let Some(q) = center.head {
            if rule.halting.contains(&q) {
                return *center;
            }
            let &(_, write, _) = rule
                .table
                .get(&(q, center.symbol))
                .expect("total on non-halting states");
            // The head always departs; one of the neighbors picks it up.
            return Cell {
                symbol: write,
                head: None,
            };
        }
        if let Some(q) = left.head {
            if !rule.halting.contains(&q) {
                let &(q2, _, mv) = rule.table.get(&(q, left.symbol)).expect("total table");
                if mv == Move::R {
                    return Cell {
                        symbol: center.symbol,
                        head: Some(q2),
                    };
                }
            }
        }
        if let Some(q) = right.head {
            if !rule.halting.contains(&q) {
                let &(q2, _, mv) = rule.table.get(&(q, right.symbol)).expect("total table");
                if mv == Move::L {
                    return Cell {
                        symbol: center.symbol,
                        head: Some(q2),
                    };
                }
            }
        }
        *center
    }

    /// Advance one tick.  Cells beyond the walls read as blank and
    /// headless.
    pub fn step(&mut self) {
        let edge = Cell {
            symbol: self.rule.blank,
            head: None,
        };
        let next: Vec<Cell> = (0..self.cells.len())
            .map(|i| {
                let left = if i == 0 { &edge } else { &self.cells[i - 1] };
                let right = self.cells.get(i + 1).unwrap_or(&edge);
                Self::update_cell(&self.rule, left, &self.cells[i], right)
            })
            .collect();
        self.cells = next;
        self.tick += 1;
        debug_assert!(self.head_count() <= 1, "head marker must stay unique");
    }

    /// The tape contents as a string of single-character symbols, outer
    /// blanks trimmed.
    pub fn tape_string(&self, symbols: &[String]) -> String {
        let non_blank = |c: &&Cell| c.symbol != self.rule.blank;
        let first = self.cells.iter().position(|c| non_blank(&c));
        let last = self.cells.iter().rposition(|c| non_blank(&c));
        match (first, last) {
            (Some(a), Some(b)) => self.cells[a..=b]
                .iter()
                .map(|c| symbols[c.symbol as usize].as_str())
                .collect(),
            _ => String::new(),
        }
    }
}

/// Where machine and automaton first disagreed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Divergence {
    pub tick: u32,
    /// Tape position (0 = first input cell).
    pub position: i64,
    pub expected: Cell,
    pub found: Cell,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LockstepReport {
    /// Machine steps actually executed.
    pub ticks: u32,
    pub halted: bool,
    pub divergence: Option<Divergence>,
    /// Automaton fixed point verified after halting.
    pub stable_after_halt: bool,
    /// Final tape, trimmed of blanks.
    pub final_tape: String,
}

/// Run machine and automaton side by side for at most `max_ticks` steps
/// with `margin` spare cells on each side of the tape, comparing the full
/// configuration every tick.
pub fn run_lockstep(
    tm: &TuringMachine,
    tape: &[SymbolId],
    max_ticks: u32,
    margin: usize,
) -> Result<LockstepReport, RecurrentError> {
    let rule = compile_tm(tm)?;
    run_lockstep_with(tm, &rule, tape, max_ticks, margin)
}

/// Lockstep with an explicit rule, which may deliberately differ from
/// `compile_tm(tm)` to exercise divergence reporting.
pub fn run_lockstep_with(
    tm: &TuringMachine,
    rule: &CompiledRule,
    tape: &[SymbolId],
    max_ticks: u32,
    margin: usize,
) -> Result<LockstepReport, RecurrentError> {
    tm.validate()?;
    let mut exec = TmExecution::new(tm, tape);
    let mut automaton = LatticeAutomaton1D::new(rule, tape, margin);
    let body = tape.len().max(1) as i64;
    let lattice = automaton.len();
    let required = tape.len().max(1) + 2 * (max_ticks as usize + 1);

    let compare = |exec: &TmExecution, automaton: &LatticeAutomaton1D| -> Option<Divergence> {
        for (i, &found) in automaton.cells().iter().enumerate() {
            let pos = i as i64 - margin as i64;
            let expected = Cell {
                symbol: exec.read(pos),
                head: (exec.head() == pos).then_some(exec.state()),
            };
            if expected != found {
                return Some(Divergence {
                    tick: exec.steps(),
                    position: pos,
                    expected,
                    found,
                });
            }
        }
        None
    };

    let mut divergence = compare(&exec, &automaton);
    while divergence.is_none() && !exec.halted() && exec.steps() < max_ticks {
        exec.step();
        if exec.head() < -(margin as i64) || exec.head() >= body + margin as i64 {
            return Err(RecurrentError::TapeOverflow { lattice, required });
        }
        automaton.step();
        divergence = compare(&exec, &automaton);
    }

    let mut stable_after_halt = false;
    if divergence.is_none() && exec.halted() {
        let frozen = automaton.cells().to_vec();
        automaton.step();
        automaton.step();
        stable_after_halt = automaton.cells() == frozen.as_slice();
    }

    Ok(LockstepReport {
        ticks: exec.steps(),
        halted: exec.halted(),
        divergence,
        stable_after_halt,
        final_tape: automaton.tape_string(&tm.symbols),
    })
}

/// Number of state bits a feedback circuit carries: one per feedback
/// edge, ordered by (source, destination).
pub fn state_width(circuit: &Circuit) -> usize {
    circuit.feedback.len()
}

/// Iterate a feedback circuit for `ticks` ticks from `state`.
///
/// Latched wires read their source's previous-tick value; all other
/// wires are combinational.  The trace holds the state before each tick
/// and after the last: `ticks + 1` rows of w(0), w(1), …, w(ticks).
/// Circuits must be autonomous (no input ports).
pub fn run_recurrent(
    circuit: &Circuit,
    state: &[bool],
    ticks: u32,
) -> Result<Vec<Vec<bool>>, RecurrentError> {
    let violations = circuit.validate();
    if !violations.is_empty() {
        return Err(RecurrentError::CircuitInvalid(violations.len()));
    }
    if circuit.n_inputs > 0 {
        return Err(RecurrentError::HasInputs(circuit.n_inputs));
    }
    let width = state_width(circuit);
    if state.len() != width {
        return Err(RecurrentError::StateWidth {
            expected: width,
            got: state.len(),
        });
    }
    let edge_index: BTreeMap<(GateId, GateId), usize> = circuit
        .feedback
        .iter()
        .enumerate()
        .map(|(k, &e)| (e, k))
        .collect();
    let order = circuit
        .topo_order()
        .expect("validated circuit has no combinational cycle");

    let mut current = state.to_vec();
    let mut trace = vec![current.clone()];
    for _ in 0..ticks {
        let mut values = vec![false; circuit.gates.len()];
        for &id in &order {
            let gate = &circuit.gates[id as usize];
            let read = |port: usize| {
                let src = gate.inputs[port];
                match edge_index.get(&(src, id)) {
                    Some(&k) => current[k],
                    None => values[src as usize],
                }
            };
            values[id as usize] = match gate.kind {
                GateKind::Const0 => false,
                GateKind::Const1 => true,
                GateKind::Input => unreachable!("autonomous circuit"),
                GateKind::Buf | GateKind::Output => read(0),
                GateKind::Nand => !(read(0) && read(1)),
            };
        }
        let next: Vec<bool> = circuit
            .feedback
            .iter()
            .map(|&(src, _)| values[src as usize])
            .collect();
        current = next;
        trace.push(current.clone());
    }
    Ok(trace)
}
