//! Parametric circuit families and constructive family extension.
//!
//! A circuit family is *locally uniform* when the member at size n+1 can be
//! produced from the member at size n by a bounded number of local edits to
//! its canonical encoding, instead of a from-scratch rebuild.  This module
//! provides the parity family (XOR of n inputs) in a canonical shape for
//! every n ≥ 1, plus [`extend_family`], which performs the n → n+1 step as
//! recorded line edits and reports their byte cost.
//!
//! Canonical parity shape.  Write n = 2^{k_1} + … + 2^{k_m} with
//! k_1 > … > k_m.  Consecutive runs of inputs form balanced XOR trees
//! ("blocks") of those sizes, left to right, and a left-leaning spine folds
//! the block roots together: S_1 = X(B_1, B_2), S_i = X(S_{i−1}, B_{i+1}).
//! At powers of two this is exactly the balanced tree.  The shape is chosen
//! so that incrementing n is carry propagation in binary: appending one leaf
//! merges the trailing blocks of sizes 2^{j−1}, …, 2, 1 plus the new leaf
//! into a single block of size 2^j.  The spine gates that folded those
//! trailing blocks become exactly the gates the merged block needs, so the
//! edit reuses them by rewiring three gate lines each — O(log n) lines per
//! step, O(1) amortized.

use crate::circuit::{
    gate_line, Circuit, CircuitBuilder, DecodeError, Gate, GateId, GateKind,
};
use thiserror::Error;

/// Default fan-out bound for family members: enough for the 4-NAND XOR
/// block (each operand is read twice) with room for an extra latch tap.
pub const DEFAULT_FANOUT_BOUND: u32 = 4;

/// Families known to the extension engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyId {
    Parity,
}

/// Errors from family construction and extension.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("parity tree requires a power of two ≥ 2, got {n}")]
    NotPowerOfTwo { n: u32 },
    #[error("family member size must be ≥ 1, got {n}")]
    TooSmall { n: u32 },
    #[error("encoding does not parse: {0}")]
    Decode(#[from] DecodeError),
    #[error("decoded circuit is malformed ({violations} violation(s))")]
    InvalidCircuit { violations: usize },
    #[error("circuit is not a recognized member of the family")]
    NotFamilyMember,
}

/// The four gates of one XOR-from-NAND block computing a ⊕ b:
/// t = N(a,b), u = N(a,t), v = N(b,t), w = N(u,v); w is the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XorBlock {
    pub t: GateId,
    pub u: GateId,
    pub v: GateId,
    pub w: GateId,
}

/// A parity member together with the ids playing each structural role.
#[derive(Debug, Clone)]
pub struct ParityShape {
    pub circuit: Circuit,
    /// Root wire of each balanced block, widest first.  A size-1 block's
    /// root is its input gate.
    pub block_roots: Vec<GateId>,
    /// Spine fold blocks S_1 … S_{m−1}.
    pub spine: Vec<XorBlock>,
    pub output_id: GateId,
}

fn xor4(b: &mut CircuitBuilder, a: GateId, bb: GateId) -> XorBlock {
    let t = b.nand(a, bb);
    let u = b.nand(a, t);
    let v = b.nand(bb, t);
    let w = b.nand(u, v);
    XorBlock { t, u, v, w }
}

fn balanced_tree(b: &mut CircuitBuilder, leaves: &[GateId]) -> GateId {
    if leaves.len() == 1 {
        return leaves[0];
    }
    let mid = leaves.len() / 2;
    let left = balanced_tree(b, &leaves[..mid]);
    let right = balanced_tree(b, &leaves[mid..]);
    xor4(b, left, right).w
}

/// Canonical parity member at size `n` with role annotations.
pub fn parity_shape(n: u32) -> Result<ParityShape, FamilyError> {
    if n < 1 {
        return Err(FamilyError::TooSmall { n });
    }
    let mut b = CircuitBuilder::new(DEFAULT_FANOUT_BOUND);
    let inputs: Vec<GateId> = (0..n).map(|_| b.input()).collect();

    let mut block_roots = Vec::new();
    let mut at = 0usize;
    for bit in (0..32).rev() {
        let size = 1usize << bit;
        if n as usize & size != 0 {
            block_roots.push(balanced_tree(&mut b, &inputs[at..at + size]));
            at += size;
        }
    }

    let mut spine = Vec::new();
    let mut acc = block_roots[0];
    for &root in &block_roots[1..] {
        let fold = xor4(&mut b, acc, root);
        spine.push(fold);
        acc = fold.w;
    }
    let output_id = b.output(acc);

    Ok(ParityShape {
        circuit: b.finish(),
        block_roots,
        spine,
        output_id,
    })
}

/// Canonical parity circuit at size `n ≥ 1`.
pub fn parity_member(n: u32) -> Result<Circuit, FamilyError> {
    Ok(parity_shape(n)?.circuit)
}

/// Balanced XOR tree over `n` inputs; `n` must be a power of two ≥ 2.
pub fn build_parity_tree(n: u32) -> Result<Circuit, FamilyError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(FamilyError::NotPowerOfTwo { n });
    }
    parity_member(n)
}

/// A single recorded edit to an encoding's line vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EditOp {
    /// Replace the content of an existing line (0-based index).
    Rewrite { line: usize, text: String },
    /// Insert a new line so that it ends up at the given 0-based index.
    Insert { line: usize, text: String },
}

impl EditOp {
    pub fn text(&self) -> &str {
        match self {
            EditOp::Rewrite { text, .. } | EditOp::Insert { text, .. } => text,
        }
    }
}

/// The edit script of one extension step, with its byte cost.
#[derive(Debug, Clone, Default)]
pub struct EditLog {
    pub ops: Vec<EditOp>,
}

impl EditLog {
    /// Total bytes written: the length of every rewritten or inserted line
    /// plus its newline.
    pub fn bytes_written(&self) -> usize {
        self.ops.iter().map(|op| op.text().len() + 1).sum()
    }

    fn rewrite(&mut self, line: usize, text: String) {
        self.ops.push(EditOp::Rewrite { line, text });
    }

    fn insert(&mut self, line: usize, text: String) {
        self.ops.push(EditOp::Insert { line, text });
    }

    /// Apply the script to an encoding split into lines.  Rewrites must
    /// precede inserts at or after the same index (the planner emits ops in
    /// that order); indices are positions in the final line vector.
    fn apply(&self, lines: &mut Vec<String>) {
        for op in &self.ops {
            match op {
                EditOp::Rewrite { line, text } => lines[*line] = text.clone(),
                EditOp::Insert { line, text } => lines.insert(*line, text.clone()),
            }
        }
    }
}

/// Result of one family-extension step.
#[derive(Debug, Clone)]
pub struct Extended {
    pub encoding: String,
    /// Size of the returned member (input size + 1).
    pub n: u32,
    pub edit: EditLog,
}

/// Structural pairing from gates of `a` to gates of `b`: a bisimulation
/// seeded at the output ports, matching gate kinds, positional operands,
/// input ordinals, and feedback edges.  Returns the id map when the two
/// circuits are identical up to renaming, with every gate paired.
pub fn structural_map(a: &Circuit, b: &Circuit) -> Option<Vec<GateId>> {
    if a.n_inputs != b.n_inputs
        || a.n_outputs != b.n_outputs
        || a.gates.len() != b.gates.len()
        || a.feedback.len() != b.feedback.len()
        || a.fanout_bound != b.fanout_bound
    {
        return None;
    }
    let ordinal = |c: &Circuit| {
        let mut ord = vec![usize::MAX; c.gates.len()];
        for (k, id) in c.input_ids().into_iter().enumerate() {
            ord[id as usize] = k;
        }
        ord
    };
    let ord_a = ordinal(a);
    let ord_b = ordinal(b);

    let mut fwd: Vec<Option<GateId>> = vec![None; a.gates.len()];
    let mut bwd: Vec<Option<GateId>> = vec![None; b.gates.len()];
    let mut work: Vec<(GateId, GateId)> = a
        .output_ids()
        .into_iter()
        .zip(b.output_ids())
        .collect();

    while let Some((x, y)) = work.pop() {
        match (fwd[x as usize], bwd[y as usize]) {
            (Some(py), Some(px)) if py == y && px == x => continue,
            (None, None) => {}
            _ => return None,
        }
        fwd[x as usize] = Some(y);
        bwd[y as usize] = Some(x);

        let gx = &a.gates[x as usize];
        let gy = &b.gates[y as usize];
        if gx.kind != gy.kind || gx.inputs.len() != gy.inputs.len() {
            return None;
        }
        if gx.kind == GateKind::Input && ord_a[x as usize] != ord_b[y as usize] {
            return None;
        }
        for (&ix, &iy) in gx.inputs.iter().zip(&gy.inputs) {
            work.push((ix, iy));
        }
    }

    if fwd.iter().any(Option::is_none) || bwd.iter().any(Option::is_none) {
        return None;
    }
    let map: Vec<GateId> = fwd.into_iter().map(Option::unwrap).collect();
    for &(s, d) in &a.feedback {
        if !b
            .feedback
            .contains(&(map[s as usize], map[d as usize]))
        {
            return None;
        }
    }
    Some(map)
}

/// Whether two circuits are identical up to gate renaming.
pub fn structurally_equal(a: &Circuit, b: &Circuit) -> bool {
    structural_map(a, b).is_some()
}

/// Grow a family member from size n to n+1 by local edits to its canonical
/// encoding.  The returned [`EditLog`] records every touched line; the new
/// encoding is produced by applying that script, never by re-encoding the
/// whole circuit.
pub fn extend_family(enc: &str, family: FamilyId) -> Result<Extended, FamilyError> {
    match family {
        FamilyId::Parity => extend_parity(enc),
    }
}

fn extend_parity(enc: &str) -> Result<Extended, FamilyError> {
    let circuit = Circuit::decode(enc)?;
    let violations = circuit.validate();
    if !violations.is_empty() {
        return Err(FamilyError::InvalidCircuit {
            violations: violations.len(),
        });
    }
    let n = circuit.n_inputs;
    if n < 1 {
        return Err(FamilyError::TooSmall { n });
    }

    // Recognize the member and recover which of its gates play which role,
    // even if its ids were permuted by earlier extension steps.
    let fresh = parity_shape(n)?;
    let map = structural_map(&fresh.circuit, &circuit).ok_or(FamilyError::NotFamilyMember)?;
    let block_roots: Vec<GateId> = fresh
        .block_roots
        .iter()
        .map(|&id| map[id as usize])
        .collect();
    let spine: Vec<XorBlock> = fresh
        .spine
        .iter()
        .map(|blk| XorBlock {
            t: map[blk.t as usize],
            u: map[blk.u as usize],
            v: map[blk.v as usize],
            w: map[blk.w as usize],
        })
        .collect();
    let output_id = map[fresh.output_id as usize];

    let m = block_roots.len();
    let j = (n.trailing_ones()) as usize;
    let gate_count = circuit.gates.len() as GateId;
    let x_new = gate_count;
    let new_block = XorBlock {
        t: gate_count + 1,
        u: gate_count + 2,
        v: gate_count + 3,
        w: gate_count + 4,
    };

    let mut log = EditLog::default();
    log.rewrite(1, format!("n_inputs {}", n + 1));
    log.rewrite(4, format!("gates {}", gate_count + 5));

    // Merge chain M_1 … : M_1 = X(B_m, x_new), M_i = X(B_{m−i+1}, M_{i−1}).
    // The last j spine folds are exactly the gates freed by the carry, so
    // they become M_1 … (reversed); each reuse rewires operands (a, b) by
    // rewriting the three gate lines that mention them.
    let reuse_count = if n % 2 == 0 {
        0
    } else if m > j {
        j
    } else {
        j - 1
    };
    let mut chain_end = x_new; // result wire of the chain built so far
    for i in 1..=reuse_count {
        let blk = spine[m - 1 - i];
        let a = block_roots[m - i];
        let b = chain_end;
        log.rewrite(5 + blk.t as usize, gate_line(blk.t, &nand(a, b)));
        log.rewrite(5 + blk.u as usize, gate_line(blk.u, &nand(a, blk.t)));
        log.rewrite(5 + blk.v as usize, gate_line(blk.v, &nand(b, blk.t)));
        chain_end = blk.w;
    }

    // One genuinely new block completes the step: either the next merge
    // element (when the carry consumed every block) or the new spine fold.
    let (new_a, new_b) = if n % 2 == 0 {
        let old_root = if m >= 2 {
            spine[m - 2].w
        } else {
            block_roots[0]
        };
        (old_root, x_new)
    } else if m > j {
        let prefix_root = if m - j >= 2 {
            spine[m - j - 2].w
        } else {
            block_roots[0]
        };
        (prefix_root, chain_end)
    } else {
        (block_roots[0], chain_end)
    };

    let insert_at = 5 + gate_count as usize;
    log.insert(insert_at, format!("g {x_new} in"));
    log.insert(
        insert_at + 1,
        gate_line(new_block.t, &nand(new_a, new_b)),
    );
    log.insert(
        insert_at + 2,
        gate_line(new_block.u, &nand(new_a, new_block.t)),
    );
    log.insert(
        insert_at + 3,
        gate_line(new_block.v, &nand(new_b, new_block.t)),
    );
    log.insert(
        insert_at + 4,
        gate_line(new_block.w, &nand(new_block.u, new_block.v)),
    );
    log.rewrite(
        5 + output_id as usize,
        gate_line(
            output_id,
            &Gate {
                kind: GateKind::Output,
                inputs: vec![new_block.w],
            },
        ),
    );

    let mut lines: Vec<String> = enc.lines().map(str::to_owned).collect();
    log.apply(&mut lines);
    let mut encoding = lines.join("\n");
    encoding.push('\n');

    debug_assert!(Circuit::decode(&encoding)
        .map(|c| c.validate().is_empty())
        .unwrap_or(false));

    Ok(Extended {
        encoding,
        n: n + 1,
        edit: log,
    })
}

fn nand(a: GateId, b: GateId) -> Gate {
    Gate {
        kind: GateKind::Nand,
        inputs: vec![a, b],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn xor_fold(bits: &[bool]) -> bool {
        bits.iter().fold(false, |acc, &b| acc ^ b)
    }

    #[test]
    fn parity_tree_sizes_and_depths() {
        let c2 = build_parity_tree(2).unwrap();
        assert_eq!(c2.nand_count(), 4);
        assert_eq!(c2.depth().unwrap(), 3);
        let c4 = build_parity_tree(4).unwrap();
        assert_eq!(c4.nand_count(), 12);
        assert_eq!(c4.depth().unwrap(), 6);
        let c8 = build_parity_tree(8).unwrap();
        assert_eq!(c8.nand_count(), 28);
        assert_eq!(c8.depth().unwrap(), 9);
        assert!(matches!(
            build_parity_tree(6),
            Err(FamilyError::NotPowerOfTwo { n: 6 })
        ));
        assert!(matches!(
            build_parity_tree(1),
            Err(FamilyError::NotPowerOfTwo { n: 1 })
        ));
    }

    #[test]
    fn parity_tree_spot_values() {
        let c4 = build_parity_tree(4).unwrap();
        assert_eq!(
            c4.evaluate(&[true, false, true, true]).unwrap(),
            vec![true]
        );
        let c8 = build_parity_tree(8).unwrap();
        assert_eq!(c8.evaluate(&[false; 8]).unwrap(), vec![false]);
        let c2 = build_parity_tree(2).unwrap();
        assert_eq!(c2.evaluate(&[false, true]).unwrap(), vec![true]);
    }

    #[test]
    fn parity_members_compute_parity_exhaustively() {
        // Every member up to 8 inputs, every input vector.
        for n in 1u32..=8 {
            let c = parity_member(n).unwrap();
            assert_eq!(c.validate(), Vec::new(), "n={n}");
            for mask in 0u32..(1 << n) {
                let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                assert_eq!(
                    c.evaluate(&bits).unwrap(),
                    vec![xor_fold(&bits)],
                    "n={n} mask={mask:b}"
                );
            }
        }
    }

    #[test]
    fn parity_member_16_sampled() {
        let c = parity_member(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let bits: Vec<bool> = (0..16).map(|_| rng.gen()).collect();
            assert_eq!(c.evaluate(&bits).unwrap(), vec![xor_fold(&bits)]);
        }
    }

    #[test]
    fn member_at_power_of_two_is_the_balanced_tree() {
        for n in [2u32, 4, 8, 16, 32] {
            assert!(structurally_equal(
                &parity_member(n).unwrap(),
                &build_parity_tree(n).unwrap()
            ));
        }
    }

    #[test]
    fn structural_map_is_id_permutation_aware() {
        let a = parity_member(5).unwrap();
        // Identical circuit maps to itself.
        let map = structural_map(&a, &a).unwrap();
        for (i, &m) in map.iter().enumerate() {
            assert_eq!(i as GateId, m);
        }
        // Different sizes never match.
        assert!(!structurally_equal(&a, &parity_member(6).unwrap()));
        // Same size, different wiring: swap the two operand roles of the
        // root fold's first gate — positional matching must notice.
        let mut tweaked = a.clone();
        let out_src = tweaked.gates[tweaked.output_ids()[0] as usize].inputs[0];
        let t_id = tweaked.gates[out_src as usize].inputs[0];
        let t = &mut tweaked.gates[t_id as usize];
        t.inputs.swap(0, 1);
        assert!(!structurally_equal(&a, &tweaked));
    }

    #[test]
    fn single_extension_matches_fresh_build() {
        for n in 1u32..=33 {
            let enc = parity_member(n).unwrap().encode();
            let ext = extend_family(&enc, FamilyId::Parity).unwrap();
            assert_eq!(ext.n, n + 1);
            let got = Circuit::decode(&ext.encoding).unwrap();
            assert_eq!(got.validate(), Vec::new(), "n={n}");
            assert!(
                structurally_equal(&got, &parity_member(n + 1).unwrap()),
                "extension {n}→{} is not the canonical member",
                n + 1
            );
        }
    }

    #[test]
    fn extension_preserves_parity_semantics() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut enc = parity_member(1).unwrap().encode();
        for n in 2u32..=24 {
            enc = extend_family(&enc, FamilyId::Parity).unwrap().encoding;
            let c = Circuit::decode(&enc).unwrap();
            for _ in 0..64 {
                let bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                assert_eq!(c.evaluate(&bits).unwrap(), vec![xor_fold(&bits)], "n={n}");
            }
        }
    }

    #[test]
    fn repeated_extension_equals_direct_build() {
        let mut enc = parity_member(2).unwrap().encode();
        for k in 1u32..=30 {
            enc = extend_family(&enc, FamilyId::Parity).unwrap().encoding;
            let got = Circuit::decode(&enc).unwrap();
            assert!(
                structurally_equal(&got, &parity_member(2 + k).unwrap()),
                "Φ^{k} from n=2"
            );
        }
    }

    #[test]
    fn rejects_non_members() {
        // Wrong shape: two XORs wired as AND-ish chain.
        let mut b = CircuitBuilder::new(DEFAULT_FANOUT_BOUND);
        let x = b.input();
        let y = b.input();
        let g = b.nand(x, y);
        b.output(g);
        let enc = b.finish().encode();
        assert!(matches!(
            extend_family(&enc, FamilyId::Parity),
            Err(FamilyError::NotFamilyMember)
        ));
        assert!(matches!(
            extend_family("garbage", FamilyId::Parity),
            Err(FamilyError::Decode(_))
        ));
    }

    #[test]
    fn edit_cost_is_logarithmic_not_linear() {
        // Walk the family to n=1024, recording per-step byte costs.
        let mut enc = parity_member(1).unwrap().encode();
        let mut step_bytes = Vec::new();
        for _ in 1u32..1024 {
            let ext = extend_family(&enc, FamilyId::Parity).unwrap();
            step_bytes.push(ext.edit.bytes_written());
            enc = ext.encoding;
        }
        let max_step = *step_bytes.iter().max().unwrap();
        let total: usize = step_bytes.iter().sum();
        let final_size = enc.len();

        // Worst single step touches O(log n) lines; the whole encoding is
        // ~75 kB at n=1024, so a linear rewrite would cost tens of
        // kilobytes. Generous frozen ceiling: one step never exceeds 1 kB.
        assert!(
            max_step <= 1024,
            "max step cost {max_step} B suggests non-local edits"
        );
        // Sub-linearity in encoding size: the mean step cost over the last
        // quarter of the walk is far below the final encoding size.
        let tail = &step_bytes[step_bytes.len() * 3 / 4..];
        let tail_mean = tail.iter().sum::<usize>() as f64 / tail.len() as f64;
        assert!(
            tail_mean < final_size as f64 * 0.01,
            "mean tail step {tail_mean} B vs encoding {final_size} B"
        );
        // Amortized bound: total cost of the walk ≤ 1.5 · n · max-step.
        assert!((total as f64) <= 1.5 * 1024.0 * max_step as f64);
    }

    #[test]
    fn extension_chain_checkpoints_match_direct_builds() {
        let checkpoints = [3u32, 4, 7, 8, 16, 17, 31, 32, 33, 63, 64, 100, 128];
        let mut enc = parity_member(2).unwrap().encode();
        let mut n = 2u32;
        for &stop in &checkpoints {
            while n < stop {
                enc = extend_family(&enc, FamilyId::Parity).unwrap().encoding;
                n += 1;
            }
            let got = Circuit::decode(&enc).unwrap();
            assert_eq!(got.validate(), Vec::new(), "n={n}");
            assert!(
                structurally_equal(&got, &parity_member(n).unwrap()),
                "checkpoint n={n}"
            );
        }
    }
}
