//! Entropy accounting: joint and marginal Gibbs entropies, the
//! subadditivity (triangle) inequality, per-tick erasure ledgers for
//! circuit firings, and dissipation budgets tied to boundary area.
//!
//! Units are normalized so one erased bit costs k_B·T_env·ln 2 = 1 for
//! T_env = 1: entropies and erasure counts are in bits, budgets in bits
//! per tick.  To convert an erasure count to joules at temperature T
//! kelvin, multiply by [`KB_LN2_JOULES_PER_KELVIN`] · T.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuit::{Circuit, GateId, GateKind};

/// k_B·ln 2 in joules per kelvin: the heat released per erased bit per
/// kelvin of environment temperature.
pub const KB_LN2_JOULES_PER_KELVIN: f64 = 1.380649e-23 * core::f64::consts::LN_2;

/// Probabilities must sum to 1 within this tolerance.
pub const PROB_SUM_TOLERANCE: f64 = 1e-12;

/// Slack for the subadditivity comparison and its equality flag.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("probabilities must be ≥ 0, got {p} at index {index}")]
    NegativeProbability { index: usize, p: f64 },
    #[error("probabilities sum to {sum}, not 1")]
    BadSum { sum: f64 },
    #[error("{got} probabilities supplied for {expected} outcome tuples")]
    WrongLength { expected: usize, got: usize },
    #[error("outcome tuple {tuple:?} does not fit {n_vars} variables over alphabet {alphabet}")]
    BadOutcome {
        tuple: Vec<usize>,
        n_vars: usize,
        alphabet: usize,
    },
    #[error("distribution needs at least 1 variable and alphabet size ≥ 1")]
    EmptyShape,
    #[error("environment temperature must be positive, got {t_env}")]
    TEnvNotPositive { t_env: f64 },
    #[error("budgets need t ≥ 1, got {t}")]
    BadTime { t: f64 },
    #[error("budgets need dimension ≥ 1, got {d}")]
    BadDimension { d: u32 },
    #[error("circuit fails validation with {0} violation(s)")]
    CircuitInvalid(usize),
    #[error("erasure ledgers need combinational circuits; {0} latched edge(s) present")]
    HasFeedback(usize),
    #[error("exhaustive ensembles support at most {max} inputs, circuit has {got}")]
    TooManyInputs { got: u32, max: u32 },
    #[error("input ensemble is empty")]
    EmptyEnsemble,
    #[error("sample has {got} bits for a circuit with {expected} inputs")]
    SampleWidth { expected: usize, got: usize },
}

/// A joint probability distribution over `n_vars` variables sharing one
/// alphabet, stored densely in mixed-radix outcome order (last variable
/// fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    n_vars: usize,
    alphabet: usize,
    probs: Vec<f64>,
}

impl FiniteDistribution {
    /// Validate and wrap a dense probability table.
    pub fn new(n_vars: usize, alphabet: usize, probs: Vec<f64>) -> Result<Self, ThermoError> {
        if n_vars == 0 || alphabet == 0 {
            return Err(ThermoError::EmptyShape);
        }
        let expected = alphabet.pow(n_vars as u32);
        if probs.len() != expected {
            return Err(ThermoError::WrongLength {
                expected,
                got: probs.len(),
            });
        }
        for (index, &p) in probs.iter().enumerate() {
            if p < 0.0 {
                return Err(ThermoError::NegativeProbability { index, p });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(ThermoError::BadSum { sum });
        }
        Ok(FiniteDistribution {
            n_vars,
            alphabet,
            probs,
        })
    }

    /// The uniform distribution.
    pub fn uniform(n_vars: usize, alphabet: usize) -> Result<Self, ThermoError> {
        if n_vars == 0 || alphabet == 0 {
            return Err(ThermoError::EmptyShape);
        }
        let len = alphabet.pow(n_vars as u32);
        FiniteDistribution::new(n_vars, alphabet, vec![1.0 / len as f64; len])
    }

    /// All mass on one outcome tuple.
    pub fn point_mass(n_vars: usize, alphabet: usize, outcome: &[usize]) -> Result<Self, ThermoError> {
        if n_vars == 0 || alphabet == 0 {
            return Err(ThermoError::EmptyShape);
        }
        if outcome.len() != n_vars || outcome.iter().any(|&v| v >= alphabet) {
            return Err(ThermoError::BadOutcome {
                tuple: outcome.to_vec(),
                n_vars,
                alphabet,
            });
        }
        let mut idx = 0usize;
        for &v in outcome {
            idx = idx * alphabet + v;
        }
        let mut probs = vec![0.0; alphabet.pow(n_vars as u32)];
        probs[idx] = 1.0;
        FiniteDistribution::new(n_vars, alphabet, probs)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Marginal distribution of one variable.
    pub fn marginal(&self, var: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.alphabet];
        // Stride of `var` in the mixed-radix index (last variable is 1).
        let stride = self.alphabet.pow((self.n_vars - 1 - var) as u32);
        for (idx, &p) in self.probs.iter().enumerate() {
            out[(idx / stride) % self.alphabet] += p;
        }
        out
    }
}

/// Shannon entropy in bits of a probability slice; zero entries are
/// skipped (0·log 0 = 0).
fn entropy_bits<'a>(probs: impl IntoIterator<Item = &'a f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Joint Gibbs entropy −Σ p·log₂ p in bits (k_B = 1, base-2 logarithm;
/// invalid tables are rejected at [`FiniteDistribution`] construction).
pub fn joint_entropy(dist: &FiniteDistribution) -> f64 {
    entropy_bits(dist.probs())
}

/// Entropy of each variable's marginal, in variable order.
pub fn marginal_entropies(dist: &FiniteDistribution) -> Vec<f64> {
    (0..dist.n_vars())
        .map(|v| entropy_bits(&dist.marginal(v)))
        .collect()
}

/// Outcome of the subadditivity comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleReport {
    pub joint: f64,
    pub marginal_sum: f64,
    /// joint ≤ Σ marginals within tolerance.
    pub holds: bool,
    /// |joint − Σ marginals| within tolerance: the independence case.
    pub equality: bool,
}

/// Check H(X₁…Xₙ) ≤ Σ H(Xᵢ), with equality exactly for independent
/// variables.
pub fn triangle_check(dist: &FiniteDistribution) -> TriangleReport {
    let joint = joint_entropy(dist);
    let marginal_sum: f64 = marginal_entropies(dist).iter().sum();
    TriangleReport {
        joint,
        marginal_sum,
        holds: joint <= marginal_sum + TRIANGLE_TOLERANCE,
        equality: (joint - marginal_sum).abs() <= TRIANGLE_TOLERANCE,
    }
}

/// How much a gate firing erases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErasureRule {
    /// Structural: max(0, fan-in − distinct output signals) bits per
    /// firing — 1 for a NAND, 0 for a buffer — independent of inputs.
    Conservative,
    /// H(input tuple) − H(output) under the supplied input ensemble.
    InformationTheoretic,
}

/// Which input vectors drive the information-theoretic rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputEnsemble {
    /// All 2^n input vectors, equally weighted.
    Exhaustive,
    /// An explicit equally-weighted sample list.
    Samples(Vec<Vec<bool>>),
}

/// Exhaustive ensembles are capped at this input count.
pub const MAX_EXHAUSTIVE_INPUTS: u32 = 16;

/// Normalization parameters for the budget column of a ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetParams {
    pub d: u32,
    pub eta: f64,
    /// Environment temperature in units where k_B·ln 2 = 1.
    pub t_env: f64,
}

/// One tick of the erasure ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRow {
    pub tick: u32,
    pub erased: f64,
    pub cumulative: f64,
    pub budget: f64,
}

/// Per-tick erasure counts for one circuit under one counting rule,
/// with the matching per-tick budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ErasureLedger {
    pub rows: Vec<LedgerRow>,
    /// Erasure attributed to each compute gate, for introspection.
    pub per_gate: Vec<(GateId, f64)>,
    pub params: BudgetParams,
}

impl ErasureLedger {
    /// Total bits erased across the run.
    pub fn total(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cumulative)
    }

    /// CSV rendering: `tick,erased,cumulative,budget` with six decimals.
    pub fn csv(&self) -> String {
        let mut out = String::from("tick,erased,cumulative,budget\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.6}\n",
                row.tick, row.erased, row.cumulative, row.budget
            ));
        }
        out
    }
}

/// Count the bits erased by every gate firing of an acyclic circuit.
///
/// Gates fire at their combinational level, so tick t aggregates the
/// gates at level t.  The conservative rule charges each firing its
/// structural loss (fan-in minus the one output signal); the
/// information-theoretic rule charges H(inputs) − H(output) with the
/// gate's input tuple distributed as induced by `ensemble`.
pub fn erasures_from_trace(
    circuit: &Circuit,
    rule: ErasureRule,
    ensemble: &InputEnsemble,
    params: BudgetParams,
) -> Result<ErasureLedger, ThermoError> {
    let violations = circuit.validate();
    if !violations.is_empty() {
        return Err(ThermoError::CircuitInvalid(violations.len()));
    }
    if !circuit.feedback.is_empty() {
        return Err(ThermoError::HasFeedback(circuit.feedback.len()));
    }
    if params.t_env <= 0.0 {
        return Err(ThermoError::TEnvNotPositive {
            t_env: params.t_env,
        });
    }
    if params.d < 1 {
        return Err(ThermoError::BadDimension { d: params.d });
    }
    let levels = circuit
        .levels()
        .expect("validated circuit is acyclic");

    let per_gate: Vec<(GateId, f64)> = match rule {
        ErasureRule::Conservative => circuit
            .gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.kind.is_compute())
            .map(|(id, g)| {
                (
                    id as GateId,
                    (g.inputs.len() as f64 - 1.0).max(0.0),
                )
            })
            .collect(),
        ErasureRule::InformationTheoretic => {
            let vectors: Vec<Vec<bool>> = match ensemble {
                InputEnsemble::Exhaustive => {
                    if circuit.n_inputs > MAX_EXHAUSTIVE_INPUTS {
                        return Err(ThermoError::TooManyInputs {
                            got: circuit.n_inputs,
                            max: MAX_EXHAUSTIVE_INPUTS,
                        });
                    }
                    let n = circuit.n_inputs as usize;
                    (0..1usize << n)
                        .map(|mask| (0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect())
                        .collect()
                }
                InputEnsemble::Samples(samples) => {
                    if samples.is_empty() {
                        return Err(ThermoError::EmptyEnsemble);
                    }
                    for s in samples {
                        if s.len() != circuit.n_inputs as usize {
                            return Err(ThermoError::SampleWidth {
                                expected: circuit.n_inputs as usize,
                                got: s.len(),
                            });
                        }
                    }
                    samples.clone()
                }
            };

            // Tally each compute gate's input-tuple and output pattern
            // frequencies over the ensemble.
            let mut in_counts: Vec<BTreeMap<Vec<bool>, u64>> =
                vec![BTreeMap::new(); circuit.gates.len()];
            let mut out_counts: Vec<[u64; 2]> = vec![[0, 0]; circuit.gates.len()];
            let order = circuit.topo_order().expect("acyclic");
            for vector in &vectors {
                let mut values = vec![false; circuit.gates.len()];
                let mut next_input = 0usize;
                for &id in &order {
                    let gate = &circuit.gates[id as usize];
                    let read: Vec<bool> = gate
                        .inputs
                        .iter()
                        .map(|&src| values[src as usize])
                        .collect();
                    let v = match gate.kind {
                        GateKind::Input => {
                            let v = vector[next_input];
                            next_input += 1;
                            v
                        }
                        GateKind::Const0 => false,
                        GateKind::Const1 => true,
                        GateKind::Buf | GateKind::Output => read[0],
                        GateKind::Nand => !(read[0] && read[1]),
                    };
                    if gate.kind.is_compute() {
                        *in_counts[id as usize].entry(read).or_insert(0) += 1;
                        out_counts[id as usize][v as usize] += 1;
                    }
                    values[id as usize] = v;
                }
            }
            let total = vectors.len() as f64;
            circuit
                .gates
                .iter()
                .enumerate()
                .filter(|(_, g)| g.kind.is_compute())
                .map(|(id, g)| {
                    let h_in = entropy_bits(
                        in_counts[id]
                            .values()
                            .map(|&c| c as f64 / total)
                            .collect::<Vec<f64>>()
                            .iter(),
                    );
                    let h_out = entropy_bits(
                        out_counts[id]
                            .iter()
                            .map(|&c| c as f64 / total)
                            .collect::<Vec<f64>>()
                            .iter(),
                    );
                    let erased = (h_in - h_out).max(0.0);
                    debug_assert!(
                        erased <= g.inputs.len() as f64 + 1e-9,
                        "erasure cannot exceed fan-in"
                    );
                    (id as GateId, erased)
                })
                .collect()
        }
    };

    let depth = circuit.depth().expect("acyclic");
    let mut by_tick = vec![0.0f64; depth as usize + 1];
    for &(id, erased) in &per_gate {
        by_tick[levels[id as usize] as usize] += erased;
    }
    let mut rows = Vec::with_capacity(depth as usize);
    let mut cumulative = 0.0;
    for tick in 1..=depth {
        cumulative += by_tick[tick as usize];
        rows.push(LedgerRow {
            tick,
            erased: by_tick[tick as usize],
            cumulative,
            budget: erasure_rate_budget(tick as f64, params.d, params.eta, params.t_env)?,
        });
    }
    Ok(ErasureLedger {
        rows,
        per_gate,
        params,
    })
}

/// Dissipation-limited erasure rate at tick t: η·t^{d−1}/T_env bits per
/// tick (T_env in units with k_B·ln 2 = 1; pass T_env = 1 for the
/// normalized form η·t^{d−1}).
pub fn erasure_rate_budget(t: f64, d: u32, eta: f64, t_env: f64) -> Result<f64, ThermoError> {
    if t < 1.0 {
        return Err(ThermoError::BadTime { t });
    }
    if d < 1 {
        return Err(ThermoError::BadDimension { d });
    }
    if t_env <= 0.0 {
        return Err(ThermoError::TEnvNotPositive { t_env });
    }
    Ok(eta * t.powi(d as i32 - 1) / t_env)
}

/// Integral of the rate budget over [0, T]: η·T^d/(d·T_env) bits.
pub fn erasure_cumulative_budget(t: f64, d: u32, eta: f64, t_env: f64) -> Result<f64, ThermoError> {
    if t < 1.0 {
        return Err(ThermoError::BadTime { t });
    }
    if d < 1 {
        return Err(ThermoError::BadDimension { d });
    }
    if t_env <= 0.0 {
        return Err(ThermoError::TEnvNotPositive { t_env });
    }
    Ok(eta * t.powi(d as i32) / (d as f64 * t_env))
}
