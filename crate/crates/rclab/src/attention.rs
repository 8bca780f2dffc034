//! Capacity and lower-bound calculators for attention-style workloads on
//! causal lattices: cut capacity through a causal surface, minimal
//! feasible time under throughput and dissipation limits, communication
//! demands for set disjointness and pointer chasing, threshold-pruning
//! erasure costs, and head-scaling curves.
//!
//! All information quantities are in bits (base-2 logarithms throughout;
//! divide by ln 2 to convert a natural-log figure).  Energy uses the same
//! normalization as the entropy module: k_B·ln 2 = 1, so `t_env = 1`
//! makes one bit of erasure cost one unit.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitBuilder, GateId};

/// Relative slack when deciding that two time bounds tie.
pub const BINDING_TOLERANCE: f64 = 1e-9;

/// Exhaustive verification of the disjointness harness is 4^m cases;
/// this cap keeps it comfortably enumerable.
pub const MAX_DISJ_BLOCK: u64 = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttentionError {
    #[error("parameter {name} must be {requirement}, got {value}")]
    BadParam {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("{name} must be non-negative, got {value}")]
    NegativeInput { name: &'static str, value: f64 },
    #[error("block length must be in 1..={max}, got {m}")]
    BadBlockLength { m: u64, max: u64 },
    #[error("round count must be ≥ 1, got {rounds}")]
    BadRounds { rounds: u64 },
    #[error("index space must have ≥ 2 entries, got {size}")]
    BadIndexSpace { size: u64 },
    #[error("prune threshold must satisfy 0 < eps < 0.5, got {eps}")]
    EpsOutOfRange { eps: f64 },
    #[error("head list must be non-empty with every entry ≥ 1")]
    BadHeadList,
    #[error("parameter file line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Physical and architectural constants for one capacity analysis.
///
/// `k_d` (geometry), `c_head` (bits per head per use), and `eta_d`
/// (dissipation flux) are existential constants reported by fits or
/// chosen by the caller; they default to 1 so results read as pure
/// scaling laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttentionParams {
    /// Lattice dimension, ≥ 1.
    pub d: u32,
    /// Head count, ≥ 1 (fractional values allowed for curve sweeps).
    pub heads: f64,
    /// Independent channels per boundary site, ≥ 1.
    pub kappa: f64,
    /// Reliable bits one head moves across the cut per use, > 0.
    pub c_head: f64,
    /// Geometric constant in the cut-area law, > 0.
    pub k_d: f64,
    /// Dissipation flux constant, > 0.
    pub eta_d: f64,
    /// Environment temperature in units with k_B·ln 2 = 1, > 0.
    pub t_env: f64,
}

impl AttentionParams {
    /// All constants 1 in dimension `d`: results are pure scaling laws.
    pub fn normalized(d: u32) -> Self {
        AttentionParams {
            d,
            heads: 1.0,
            kappa: 1.0,
            c_head: 1.0,
            k_d: 1.0,
            eta_d: 1.0,
            t_env: 1.0,
        }
    }

    /// Check every field against its invariant.
    pub fn validate(&self) -> Result<(), AttentionError> {
        let checks: [(&'static str, f64, f64, &'static str); 6] = [
            ("heads", self.heads, 1.0, "≥ 1"),
            ("kappa", self.kappa, 1.0, "≥ 1"),
            ("c_head", self.c_head, f64::MIN_POSITIVE, "> 0"),
            ("k_d", self.k_d, f64::MIN_POSITIVE, "> 0"),
            ("eta_d", self.eta_d, f64::MIN_POSITIVE, "> 0"),
            ("t_env", self.t_env, f64::MIN_POSITIVE, "> 0"),
        ];
        if self.d < 1 {
            return Err(AttentionError::BadParam {
                name: "d",
                requirement: "≥ 1",
                value: self.d as f64,
            });
        }
        for (name, value, floor, requirement) in checks {
            if !(value >= floor) {
                return Err(AttentionError::BadParam {
                    name,
                    requirement,
                    value,
                });
            }
        }
        Ok(())
    }

    /// Parse the `attn v1` parameter file format: a header line, then
    /// `key: value` lines for any of d, heads, kappa, c_head, k_d,
    /// eta_d, t_env.  `d` is mandatory; the rest default to 1.  `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<Self, AttentionError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, "attn v1")) => {}
            Some((line, other)) => {
                return Err(AttentionError::Parse {
                    line,
                    message: format!("expected header `attn v1`, found `{other}`"),
                })
            }
            None => {
                return Err(AttentionError::Parse {
                    line: 1,
                    message: "empty parameter file".into(),
                })
            }
        }
        let mut seen: BTreeMap<String, f64> = BTreeMap::new();
        for (line, text) in lines {
            let Some((key, value)) = text.split_once(':') else {
                return Err(AttentionError::Parse {
                    line,
                    message: format!("expected `key: value`, found `{text}`"),
                });
            };
            let key = key.trim();
            if !matches!(key, "d" | "heads" | "kappa" | "c_head" | "k_d" | "eta_d" | "t_env") {
                return Err(AttentionError::Parse {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            }
            let value: f64 = value.trim().parse().map_err(|_| AttentionError::Parse {
                line,
                message: format!("`{}` is not a number", value.trim()),
            })?;
            if seen.insert(key.to_string(), value).is_some() {
                return Err(AttentionError::Parse {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        let Some(&d) = seen.get("d") else {
            return Err(AttentionError::Parse {
                line: 1,
                message: "missing mandatory key `d`".into(),
            });
        };
        if d.fract() != 0.0 || !(1.0..=64.0).contains(&d) {
            return Err(AttentionError::Parse {
                line: 1,
                message: format!("d must be an integer in 1..=64, got {d}"),
            });
        }
        let get = |key: &str| seen.get(key).copied().unwrap_or(1.0);
        let params = AttentionParams {
            d: d as u32,
            heads: get("heads"),
            kappa: get("kappa"),
            c_head: get("c_head"),
            k_d: get("k_d"),
            eta_d: get("eta_d"),
            t_env: get("t_env"),
        };
        params.validate()?;
        Ok(params)
    }

    /// Serialize in the format [`AttentionParams::parse`] accepts.
    pub fn to_text(&self) -> String {
        format!(
            "attn v1\nd: {}\nheads: {}\nkappa: {}\nc_head: {}\nk_d: {}\neta_d: {}\nt_env: {}\n",
            self.d, self.heads, self.kappa, self.c_head, self.k_d, self.eta_d, self.t_env
        )
    }
}

/// Which of the two time bounds decides [`BoundResult::t_joint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    Throughput,
    Landauer,
    /// The bounds tie within [`BINDING_TOLERANCE`] (relative).
    Both,
}

impl Binding {
    pub fn as_str(self) -> &'static str {
        match self {
            Binding::Throughput => "throughput",
            Binding::Landauer => "landauer",
            Binding::Both => "both",
        }
    }
}

/// Joint feasibility result: the two time bounds, their maximum, which
/// one binds, and the inputs echoed back.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub t_throughput: f64,
    pub t_landauer: f64,
    pub t_joint: f64,
    pub binding: Binding,
    pub i_star: f64,
    pub e_req: f64,
    pub params: AttentionParams,
}

/// Total reliable bits that can cross the causal surface in time `t`:
/// k_d·c_head·κ·H·t^d.
pub fn cut_capacity(t: f64, p: &AttentionParams) -> Result<f64, AttentionError> {
    p.validate()?;
    if t < 0.0 {
        return Err(AttentionError::NegativeInput { name: "t", value: t });
    }
    Ok(p.k_d * p.c_head * p.kappa * p.heads * t.powi(p.d as i32))
}

/// Least time at which the cut capacity reaches `i_star` bits:
/// (i_star/(k_d·c_head·κ·H))^{1/d}.  Inverse of [`cut_capacity`].
pub fn min_time_throughput(i_star: f64, p: &AttentionParams) -> Result<f64, AttentionError> {
    p.validate()?;
    if i_star < 0.0 {
        return Err(AttentionError::NegativeInput {
            name: "i_star",
            value: i_star,
        });
    }
    Ok((i_star / (p.k_d * p.c_head * p.kappa * p.heads)).powf(1.0 / p.d as f64))
}

/// Least time at which the dissipation budget admits `e_req` bits of
/// erasure: (t_env·e_req/eta_d)^{1/d} in normalized units.
pub fn min_time_landauer(e_req: f64, p: &AttentionParams) -> Result<f64, AttentionError> {
    p.validate()?;
    if e_req < 0.0 {
        return Err(AttentionError::NegativeInput {
            name: "e_req",
            value: e_req,
        });
    }
    Ok((p.t_env * e_req / p.eta_d).powf(1.0 / p.d as f64))
}

/// Minimal feasible time meeting both the information-throughput demand
/// `i_star` and the erasure demand `e_req`: the max of the two bounds,
/// tagged with the binding constraint.
pub fn joint_min_time(
    i_star: f64,
    e_req: f64,
    p: &AttentionParams,
) -> Result<BoundResult, AttentionError> {
    let t_throughput = min_time_throughput(i_star, p)?;
    let t_landauer = min_time_landauer(e_req, p)?;
    let t_joint = t_throughput.max(t_landauer);
    let scale = t_joint.max(f64::MIN_POSITIVE);
    let binding = if (t_throughput - t_landauer).abs() <= BINDING_TOLERANCE * scale {
        Binding::Both
    } else if t_throughput > t_landauer {
        Binding::Throughput
    } else {
        Binding::Landauer
    };
    Ok(BoundResult {
        t_throughput,
        t_landauer,
        t_joint,
        binding,
        i_star,
        e_req,
        params: *p,
    })
}

/// Communication demand of m-bit set disjointness: c0·m bits must cross
/// any cut separating the two operand blocks.
pub fn disj_demand(m: u64, c0: f64) -> Result<f64, AttentionError> {
    if m < 1 {
        return Err(AttentionError::BadBlockLength { m, max: u64::MAX });
    }
    if !(c0 > 0.0) {
        return Err(AttentionError::BadParam {
            name: "c0",
            requirement: "> 0",
            value: c0,
        });
    }
    Ok(c0 * m as f64)
}

/// Communication demand of R-round pointer chasing over an index space
/// of `index_space` entries: c1·R·log₂|I| bits.
pub fn pointer_demand(rounds: u64, index_space: u64, c1: f64) -> Result<f64, AttentionError> {
    if rounds < 1 {
        return Err(AttentionError::BadRounds { rounds });
    }
    if index_space < 2 {
        return Err(AttentionError::BadIndexSpace { size: index_space });
    }
    if !(c1 > 0.0) {
        return Err(AttentionError::BadParam {
            name: "c1",
            requirement: "> 0",
            value: c1,
        });
    }
    Ok(c1 * rounds as f64 * (index_space as f64).log2())
}

/// Accessible information erased by pruning attention weights below
/// `eps` across `layers` layers of `n` tokens: c1·L·n·log₂(1/eps) bits.
/// Requires 0 < eps < 0.5 strictly — at eps ≥ 0.5 pruning keeps nothing
/// distinguishable, at eps ≤ 0 it erases nothing.
pub fn threshold_erasure(n: u64, layers: u64, eps: f64, c1: f64) -> Result<f64, AttentionError> {
    if n < 1 {
        return Err(AttentionError::BadParam {
            name: "n",
            requirement: "≥ 1",
            value: n as f64,
        });
    }
    if layers < 1 {
        return Err(AttentionError::BadParam {
            name: "layers",
            requirement: "≥ 1",
            value: layers as f64,
        });
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(AttentionError::EpsOutOfRange { eps });
    }
    if !(c1 > 0.0) {
        return Err(AttentionError::BadParam {
            name: "c1",
            requirement: "> 0",
            value: c1,
        });
    }
    Ok(c1 * layers as f64 * n as f64 * (1.0 / eps).log2())
}

/// One sample of a head-scaling sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadScalingPoint {
    pub heads: f64,
    pub t: f64,
    /// t at this head count over t at one head: exactly heads^{−1/d}.
    pub ratio: f64,
}

/// Throughput-bound time at each head count, normalized by the one-head
/// time: adding heads buys at most the constant factor H^{−1/d}.
pub fn head_scaling_curve(
    h_values: &[f64],
    i_star: f64,
    p: &AttentionParams,
) -> Result<Vec<HeadScalingPoint>, AttentionError> {
    if h_values.is_empty() || h_values.iter().any(|&h| !(h >= 1.0)) {
        return Err(AttentionError::BadHeadList);
    }
    let t_one = min_time_throughput(i_star, &AttentionParams { heads: 1.0, ..*p })?;
    h_values
        .iter()
        .map(|&heads| {
            let t = min_time_throughput(i_star, &AttentionParams { heads, ..*p })?;
            let ratio = if t_one > 0.0 { t / t_one } else { 1.0 };
            Ok(HeadScalingPoint { heads, t, ratio })
        })
        .collect()
}

/// CSV rendering of a head-scaling sweep: `heads,t,ratio` rows.
pub fn head_scaling_csv(points: &[HeadScalingPoint]) -> String {
    let mut out = String::from("heads,t,ratio\n");
    for p in points {
        out.push_str(&format!("{},{:.6},{:.6}\n", p.heads, p.t, p.ratio));
    }
    out
}

/// The m-bit set-disjointness circuit together with its operand blocks:
/// output = 1 iff no index i has x_i = y_i = 1.
#[derive(Debug, Clone)]
pub struct DisjCircuit {
    pub circuit: Circuit,
    pub x_inputs: Vec<GateId>,
    pub y_inputs: Vec<GateId>,
    pub output: GateId,
}

/// Build DISJ_m in the NAND basis: one NAND per index computes
/// ¬(x_i ∧ y_i), and an AND tree (two NANDs per merge) conjoins them —
/// 3m − 2 NANDs total.  Capped at m ≤ [`MAX_DISJ_BLOCK`] so the result
/// stays exhaustively checkable.
pub fn build_disj_circuit(m: u64) -> Result<DisjCircuit, AttentionError> {
    if !(1..=MAX_DISJ_BLOCK).contains(&m) {
        return Err(AttentionError::BadBlockLength {
            m,
            max: MAX_DISJ_BLOCK,
        });
    }
    let mut b = CircuitBuilder::new(4);
    let x_inputs: Vec<GateId> = (0..m).map(|_| b.input()).collect();
    let y_inputs: Vec<GateId> = (0..m).map(|_| b.input()).collect();
    let mut layer: Vec<GateId> = x_inputs
        .iter()
        .zip(&y_inputs)
        .map(|(&x, &y)| b.nand(x, y))
        .collect();
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len().div_ceil(2));
        for pair in layer.chunks(2) {
            if let [a, c] = *pair {
                let t = b.nand(a, c);
                next.push(b.nand(t, t));
            } else {
                next.push(pair[0]);
            }
        }
        layer = next;
    }
    let output = b.output(layer[0]);
    Ok(DisjCircuit {
        circuit: b.finish(),
        x_inputs,
        y_inputs,
        output,
    })
}

/// Reference semantics: disjoint iff the bit masks share no set bit.
pub fn reference_disj(x_mask: u64, y_mask: u64) -> bool {
    x_mask & y_mask == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::fit_scaling_exponent;
    use crate::circuit::GateKind;
    use crate::embed::{geodesic, verify_embedding, Embedding, Route, Site};
    use crate::geometry::linf_norm;
    use crate::width::cut_width;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn random_params(rng: &mut ChaCha8Rng) -> AttentionParams {
        AttentionParams {
            d: rng.gen_range(1..=4),
            heads: rng.gen_range(1.0..64.0),
            kappa: rng.gen_range(1.0..4.0),
            c_head: rng.gen_range(0.5..4.0),
            k_d: rng.gen_range(0.5..4.0),
            eta_d: rng.gen_range(0.5..4.0),
            t_env: rng.gen_range(0.5..4.0),
        }
    }

    #[test]
    fn capacity_examples() {
        let p = AttentionParams::normalized(3);
        assert_eq!(cut_capacity(10.0, &p).unwrap(), 1000.0);
        assert_eq!(cut_capacity(0.0, &p).unwrap(), 0.0);
        let doubled = AttentionParams { heads: 2.0, ..p };
        assert_eq!(
            cut_capacity(7.0, &doubled).unwrap(),
            2.0 * cut_capacity(7.0, &p).unwrap()
        );
        assert!(cut_capacity(-1.0, &p).is_err());
    }

    #[test]
    fn throughput_examples() {
        let p = AttentionParams::normalized(3);
        assert!((min_time_throughput(1e6, &p).unwrap() - 100.0).abs() < 1e-9);
        let eight = AttentionParams { heads: 8.0, ..p };
        assert!((min_time_throughput(1e6, &eight).unwrap() - 50.0).abs() < 1e-9);
        assert_eq!(min_time_throughput(0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn landauer_examples() {
        let p = AttentionParams::normalized(3);
        assert!((min_time_landauer(8.0, &p).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(min_time_landauer(0.0, &p).unwrap(), 0.0);
        let hot = AttentionParams {
            eta_d: 8.0,
            ..AttentionParams::normalized(3)
        };
        assert!((min_time_landauer(8.0, &hot).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_binding_tags() {
        let p = AttentionParams::normalized(3);
        let r = joint_min_time(1e6, 8.0, &p).unwrap();
        assert!((r.t_joint - 100.0).abs() < 1e-9);
        assert_eq!(r.binding, Binding::Throughput);
        assert_eq!(r.t_joint, r.t_throughput.max(r.t_landauer));

        let r = joint_min_time(8.0, 1e6, &p).unwrap();
        assert!((r.t_joint - 100.0).abs() < 1e-9);
        assert_eq!(r.binding, Binding::Landauer);

        let r = joint_min_time(64.0, 64.0, &p).unwrap();
        assert_eq!(r.binding, Binding::Both);
        assert_eq!(r.binding.as_str(), "both");
    }

    #[test]
    fn disj_demand_examples() {
        assert_eq!(disj_demand(100, 1.0).unwrap(), 100.0);
        assert_eq!(disj_demand(1, 2.5).unwrap(), 2.5);
        assert!(disj_demand(0, 1.0).is_err());
        // Chained through the throughput bound: 10⁶ bits across the cut
        // need T ≥ 100 at d = 3.
        let p = AttentionParams::normalized(3);
        let demand = disj_demand(1_000_000, 1.0).unwrap();
        assert!((min_time_throughput(demand, &p).unwrap() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn pointer_demand_examples() {
        assert_eq!(pointer_demand(4, 256, 1.0).unwrap(), 32.0);
        assert_eq!(pointer_demand(1, 2, 1.0).unwrap(), 1.0);
        assert!(pointer_demand(0, 2, 1.0).is_err());
        assert!(pointer_demand(1, 1, 1.0).is_err());
        // Doubling the rounds scales the d = 3 time bound by 2^{1/3}.
        let p = AttentionParams::normalized(3);
        let t1 = min_time_throughput(pointer_demand(5, 1024, 1.0).unwrap(), &p).unwrap();
        let t2 = min_time_throughput(pointer_demand(10, 1024, 1.0).unwrap(), &p).unwrap();
        assert!((t2 / t1 - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn threshold_erasure_examples() {
        assert_eq!(threshold_erasure(1024, 1, 0.25, 1.0).unwrap(), 2048.0);
        assert_eq!(threshold_erasure(1024, 2, 0.25, 1.0).unwrap(), 4096.0);
        for eps in [0.5, 0.0, -0.1, 0.7] {
            assert!(matches!(
                threshold_erasure(1024, 1, eps, 1.0),
                Err(AttentionError::EpsOutOfRange { .. })
            ));
        }
        // Composed with the dissipation bound at d = 3, η = 1.
        let p = AttentionParams::normalized(3);
        let t = min_time_landauer(2048.0, &p).unwrap();
        assert!((t - 2048f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!((t - 12.70).abs() < 0.005);
    }

    #[test]
    fn head_scaling_examples() {
        let p = AttentionParams::normalized(3);
        let curve = head_scaling_curve(&[1.0, 8.0, 64.0], 1e6, &p).unwrap();
        let ratios: Vec<f64> = curve.iter().map(|pt| pt.ratio).collect();
        for (got, want) in ratios.iter().zip([1.0, 0.5, 0.25]) {
            assert!((got - want).abs() < 1e-12);
        }
        let d2 = head_scaling_curve(&[4.0], 1e6, &AttentionParams::normalized(2)).unwrap();
        assert!((d2[0].ratio - 0.5).abs() < 1e-12);
        let d1 = head_scaling_curve(&[4.0], 1e6, &AttentionParams::normalized(1)).unwrap();
        assert!((d1[0].ratio - 0.25).abs() < 1e-12);

        let csv = head_scaling_csv(&curve);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("heads,t,ratio"));
        assert_eq!(lines.next(), Some("1,100.000000,1.000000"));
        assert_eq!(csv.lines().count(), 4);

        assert!(head_scaling_curve(&[], 1e6, &p).is_err());
        assert!(head_scaling_curve(&[0.5], 1e6, &p).is_err());
    }

    #[test]
    fn inversion_identity_on_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xA77E);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let t: f64 = rng.gen_range(0.5..100.0);
            let back = min_time_throughput(cut_capacity(t, &p).unwrap(), &p).unwrap();
            assert!((back - t).abs() / t < 1e-9, "t={t} back={back} p={p:?}");
        }
    }

    #[test]
    fn bounds_monotone_in_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0B57);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let i_star: f64 = rng.gen_range(1.0..1e6);
            let e_req: f64 = rng.gen_range(1.0..1e6);
            let grow = rng.gen_range(1.1..3.0);
            let t_thr = min_time_throughput(i_star, &p).unwrap();
            let t_lan = min_time_landauer(e_req, &p).unwrap();

            // More capacity on any axis never slows the bound down.
            for scaled in [
                AttentionParams { heads: p.heads * grow, ..p },
                AttentionParams { kappa: p.kappa * grow, ..p },
                AttentionParams { c_head: p.c_head * grow, ..p },
                AttentionParams { k_d: p.k_d * grow, ..p },
            ] {
                assert!(min_time_throughput(i_star, &scaled).unwrap() <= t_thr + 1e-12);
            }
            let cooler = AttentionParams { eta_d: p.eta_d * grow, ..p };
            assert!(min_time_landauer(e_req, &cooler).unwrap() <= t_lan + 1e-12);

            // More demand never speeds it up.
            assert!(min_time_throughput(i_star * grow, &p).unwrap() >= t_thr - 1e-12);
            assert!(min_time_landauer(e_req * grow, &p).unwrap() >= t_lan - 1e-12);
            let hotter = AttentionParams { t_env: p.t_env * grow, ..p };
            assert!(min_time_landauer(e_req, &hotter).unwrap() >= t_lan - 1e-12);
        }
    }

    #[test]
    fn time_scales_as_inverse_dimension_power() {
        for d in [1u32, 2, 3] {
            let p = AttentionParams::normalized(d);
            let points: Vec<(f64, f64)> = (1..=6)
                .map(|k| {
                    let i_star = 10f64.powi(k);
                    (i_star, min_time_throughput(i_star, &p).unwrap())
                })
                .collect();
            let fit = fit_scaling_exponent(&points).unwrap();
            assert!((fit.slope - 1.0 / d as f64).abs() < 1e-9, "d={d} {fit:?}");
            assert!(fit.r_squared > 1.0 - 1e-9);
        }
    }

    #[test]
    fn params_file_round_trips() {
        let p = AttentionParams {
            d: 2,
            heads: 8.0,
            kappa: 2.0,
            c_head: 0.5,
            k_d: 1.5,
            eta_d: 3.0,
            t_env: 1.0,
        };
        assert_eq!(AttentionParams::parse(&p.to_text()).unwrap(), p);

        let minimal = AttentionParams::parse("attn v1\nd: 3 # comment\n").unwrap();
        assert_eq!(minimal, AttentionParams::normalized(3));

        for bad in [
            "",
            "attn v2\nd: 3\n",
            "attn v1\n",
            "attn v1\nd: 2.5\n",
            "attn v1\nd: 3\nwings: 2\n",
            "attn v1\nd: 3\nheads: many\n",
            "attn v1\nd: 3\nheads: 2\nheads: 3\n",
            "attn v1\nd: 3\nheads: 0.5\n",
        ] {
            assert!(AttentionParams::parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn invalid_params_are_rejected() {
        let good = AttentionParams::normalized(3);
        assert!(good.validate().is_ok());
        for bad in [
            AttentionParams { d: 0, ..good },
            AttentionParams { heads: 0.5, ..good },
            AttentionParams { kappa: 0.0, ..good },
            AttentionParams { c_head: 0.0, ..good },
            AttentionParams { k_d: -1.0, ..good },
            AttentionParams { eta_d: 0.0, ..good },
            AttentionParams { t_env: 0.0, ..good },
            AttentionParams { heads: f64::NAN, ..good },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
            assert!(cut_capacity(1.0, &bad).is_err());
        }
    }

    fn eval_disj(disj: &DisjCircuit, m: u64, x_mask: u64, y_mask: u64) -> bool {
        let mut inputs = Vec::with_capacity(2 * m as usize);
        for i in 0..m {
            inputs.push(x_mask >> i & 1 == 1);
        }
        for i in 0..m {
            inputs.push(y_mask >> i & 1 == 1);
        }
        disj.circuit.evaluate(&inputs).unwrap()[0]
    }

    #[test]
    fn disj_circuit_matches_set_intersection_exhaustively() {
        for m in 1..=MAX_DISJ_BLOCK {
            let disj = build_disj_circuit(m).unwrap();
            assert!(disj.circuit.validate().is_empty());
            let nands = disj
                .circuit
                .gates
                .iter()
                .filter(|g| g.kind == GateKind::Nand)
                .count() as u64;
            assert_eq!(nands, 3 * m - 2);
            for x_mask in 0..1u64 << m {
                for y_mask in 0..1u64 << m {
                    assert_eq!(
                        eval_disj(&disj, m, x_mask, y_mask),
                        reference_disj(x_mask, y_mask),
                        "m={m} x={x_mask:b} y={y_mask:b}"
                    );
                }
            }
        }
        assert!(build_disj_circuit(9).is_err());
        assert!(build_disj_circuit(0).is_err());
    }

    #[test]
    fn disj_output_depends_on_every_bit() {
        let m = MAX_DISJ_BLOCK;
        let disj = build_disj_circuit(m).unwrap();
        for i in 0..m {
            let e_i = 1u64 << i;
            // Flipping x_i alone flips the output, and likewise y_i.
            assert!(!eval_disj(&disj, m, e_i, e_i));
            assert!(eval_disj(&disj, m, 0, e_i));
            assert!(eval_disj(&disj, m, e_i, 0));
        }
    }

    /// Lay DISJ out with the x block strictly left of the hyperplane
    /// axis0 = −1/2 and everything else on the right, scheduling every
    /// wire in its own time window so no two signals ever share a site
    /// and tick.
    fn embed_disj_bipartite(disj: &DisjCircuit) -> Embedding {
        let circuit = &disj.circuit;
        let mut placement: BTreeMap<GateId, Site> = BTreeMap::new();
        let mut column = 1i64;
        for (id, gate) in circuit.gates.iter().enumerate() {
            let id = id as GateId;
            let site = if let Some(i) = disj.x_inputs.iter().position(|&x| x == id) {
                vec![-1, i as i64]
            } else if let Some(i) = disj.y_inputs.iter().position(|&y| y == id) {
                vec![0, 1 + i as i64]
            } else {
                let _ = gate;
                column += 1;
                vec![column, 0]
            };
            placement.insert(id, site);
        }

        let mut firing_time: BTreeMap<GateId, i64> = BTreeMap::new();
        let mut routes: BTreeMap<(GateId, GateId, usize), Route> = BTreeMap::new();
        let mut clock: i64 = 1 + placement.values().map(|s| linf_norm(s)).max().unwrap();
        for &dst in &circuit.topo_order().unwrap() {
            let gate = &circuit.gates[dst as usize];
            if gate.kind == GateKind::Input {
                firing_time.insert(dst, linf_norm(&placement[&dst]));
                continue;
            }
            let mut latest = 0i64;
            for (port, &src) in gate.inputs.iter().enumerate() {
                let path = geodesic(&placement[&src], &placement[&dst]);
                let depart = clock.max(firing_time[&src]);
                let arrival = depart + path.len() as i64 - 1;
                routes.insert((src, dst, port), Route { depart, path });
                clock = arrival + 1;
                latest = latest.max(firing_time[&src]);
            }
            let fires = clock.max(1 + latest).max(linf_norm(&placement[&dst]));
            firing_time.insert(dst, fires);
            clock = fires + 1;
        }
        Embedding {
            d: 2,
            c: 1,
            congestion_cap: 1,
            placement,
            routes,
            firing_time,
        }
    }

    #[test]
    fn disj_embedding_moves_m_bits_across_the_cut() {
        let m = MAX_DISJ_BLOCK;
        let disj = build_disj_circuit(m).unwrap();
        let e = embed_disj_bipartite(&disj);
        assert_eq!(verify_embedding(&e, &disj.circuit), vec![]);

        // Wire cut between the x block and the output is a real cut.
        let report = cut_width(&disj.circuit, &disj.x_inputs, &[disj.output]).unwrap();
        assert!(report.value >= 1);

        // Count signal hops across the plane axis0 = −1/2.
        let mut crossings = 0u64;
        for route in e.routes.values() {
            for hop in route.path.windows(2) {
                if (hop[0][0] <= -1) != (hop[1][0] <= -1) {
                    crossings += 1;
                }
            }
        }
        assert!(crossings >= m);
        // The layout is tight: each x bit crosses exactly once.
        assert_eq!(crossings, m);
    }
}
