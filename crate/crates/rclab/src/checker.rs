//! Scaling-law verification for circuit families embedded in the lattice.
//!
//! For a family swept over sizes n with measured makespans T, this module
//! fits power-law exponents by least squares in log-log space and checks
//! the realizability laws:
//!
//! - (S) circuit size grows no faster than T^d (slope ≤ d + tolerance),
//! - (W) the peak per-tick boundary cut grows no faster than T^(d−1),
//! - (G) members stay in the NAND basis: fan-in ≤ 2, fan-out ≤ the bound,
//! - (T) every member's makespan respects the lattice lower bound
//!   T ≥ ceil((n/K)^(1/(d−1))) with K fitted from the sweep itself.
//!
//! [`strictness_witness`] locates where polylogarithmic width separates
//! from linear size: the first n beyond which (log₂ n)^(k(d−1)) < n holds
//! for every larger n as well.

use thiserror::Error;

use crate::circuit::Circuit;
use crate::embed::{makespan_series, Placer, SeriesPoint};
use crate::geometry::min_time_lower_bound;
use crate::uniform::{parity_member, FamilyId};

/// Slack added to ideal exponents before a slope is called a violation.
pub const SCALING_TOLERANCE: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    /// Exponent: d ln y / d ln x.
    pub slope: f64,
    /// ln y at ln x = 0.
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckerError {
    #[error("power-law fit needs at least 3 points, got {got}")]
    TooFewPoints { got: usize },
    #[error("power-law fit requires positive coordinates, got ({x}, {y})")]
    NonPositivePoint { x: f64, y: f64 },
    #[error("strictness witness power k(d-1) = {power} is too large (max {max})")]
    PowerTooLarge { power: u32, max: u32 },
    #[error("family member n={n} failed: {message}")]
    MemberFailed { n: u32, message: String },
}

/// Least-squares power-law fit: regress ln y on ln x.
pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<FitResult, CheckerError> {
    if points.len() < 3 {
        return Err(CheckerError::TooFewPoints { got: points.len() });
    }
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(CheckerError::NonPositivePoint { x, y });
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
    })
}

/// One measured sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepPoint {
    pub n: u32,
    pub makespan: i64,
    pub size: usize,
    pub maxcut: u64,
}

/// A fitted exponent compared against its ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawCheck {
    pub slope: f64,
    pub limit: f64,
    pub pass: bool,
}

/// NAND-basis discipline over all swept members.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateCheck {
    pub max_fan_in: usize,
    pub max_fan_out: u32,
    pub fanout_bound: u32,
    pub pass: bool,
}

/// Makespans versus the lattice minimum-time bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinTimeCheck {
    /// Fitted packing constant: max over the sweep of n / T^(d−1).
    pub k_fit: f64,
    /// Smallest slack T − ceil((n/K)^(1/(d−1))) over the sweep.
    pub worst_margin: i64,
    pub pass: bool,
}

/// Everything the law checker measured and concluded for one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizabilityReport {
    pub family: FamilyId,
    pub d: u32,
    pub placer: Placer,
    pub points: Vec<SweepPoint>,
    /// Sizes that failed to embed, with their errors.
    pub gaps: Vec<(u32, String)>,
    pub size_law: LawCheck,
    pub width_law: LawCheck,
    pub gate_law: GateCheck,
    pub min_time: MinTimeCheck,
    pub pass: bool,
}

fn gate_discipline(members: &[(u32, Circuit)]) -> GateCheck {
    let mut max_fan_in = 0usize;
    let mut max_fan_out = 0u32;
    let mut bound = 0u32;
    let mut pass = true;
    for (_, c) in members {
        bound = bound.max(c.fanout_bound);
        for g in &c.gates {
            max_fan_in = max_fan_in.max(g.inputs.len());
        }
        let fan_out = c.fanout_counts().into_iter().max().unwrap_or(0);
        max_fan_out = max_fan_out.max(fan_out);
        if !c.validate().is_empty() {
            pass = false;
        }
    }
    pass = pass && max_fan_in <= 2 && max_fan_out <= bound;
    GateCheck {
        max_fan_in,
        max_fan_out,
        fanout_bound: bound,
        pass,
    }
}

/// Sweep a family, fit the scaling laws, and judge each one.
pub fn check_rc(
    family: FamilyId,
    sizes: &[u32],
    d: u32,
    placer: Placer,
) -> Result<RealizabilityReport, CheckerError> {
    let series = makespan_series(family, sizes, d, placer);
    let mut points = Vec::new();
    let mut gaps = Vec::new();
    for SeriesPoint { n, result } in series {
        match result {
            Ok(stats) => points.push(SweepPoint {
                n,
                makespan: stats.makespan,
                size: stats.size,
                maxcut: stats.maxcut,
            }),
            Err(message) => gaps.push((n, message)),
        }
    }

    let t_size: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.makespan as f64, p.size as f64))
        .collect();
    let t_cut: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.makespan as f64, p.maxcut as f64))
        .collect();
    let size_fit = fit_scaling_exponent(&t_size)?;
    let cut_fit = fit_scaling_exponent(&t_cut)?;
    let size_law = LawCheck {
        slope: size_fit.slope,
        limit: d as f64 + SCALING_TOLERANCE,
        pass: size_fit.slope <= d as f64 + SCALING_TOLERANCE,
    };
    let width_law = LawCheck {
        slope: cut_fit.slope,
        limit: (d - 1) as f64 + SCALING_TOLERANCE,
        pass: cut_fit.slope <= (d - 1) as f64 + SCALING_TOLERANCE,
    };

    let members: Vec<(u32, Circuit)> = points
        .iter()
        .map(|p| {
            let c = match family {
                FamilyId::Parity => parity_member(p.n).map_err(|e| CheckerError::MemberFailed {
                    n: p.n,
                    message: e.to_string(),
                })?,
            };
            Ok((p.n, c))
        })
        .collect::<Result<_, CheckerError>>()?;
    let gate_law = gate_discipline(&members);

    let k_fit = points
        .iter()
        .map(|p| p.n as f64 / (p.makespan as f64).powi(d as i32 - 1))
        .fold(f64::MIN, f64::max);
    let mut worst_margin = i64::MAX;
    let mut min_time_ok = true;
    for p in &points {
        let bound = min_time_lower_bound(p.n as u64, d, k_fit).unwrap_or(0);
        let margin = p.makespan - bound as i64;
        worst_margin = worst_margin.min(margin);
        if margin < 0 {
            min_time_ok = false;
        }
    }
    let min_time = MinTimeCheck {
        k_fit,
        worst_margin,
        pass: min_time_ok,
    };

    let pass = gaps.is_empty()
        && size_law.pass
        && width_law.pass
        && gate_law.pass
        && min_time.pass;
    Ok(RealizabilityReport {
        family,
        d,
        placer,
        points,
        gaps,
        size_law,
        width_law,
        gate_law,
        min_time,
        pass,
    })
}

/// First size beyond which polylog width stays strictly below linear size:
/// the smallest n ≥ n0 such that (log₂ m)^(k(d−1)) < m for every m ≥ n.
pub fn strictness_witness(d: u32, k: u32, n0: u64) -> Result<u64, CheckerError> {
    const MAX_POWER: u32 = 32;
    let power = k * (d.saturating_sub(1));
    if power > MAX_POWER {
        return Err(CheckerError::PowerTooLarge {
            power,
            max: MAX_POWER,
        });
    }
    let floor = n0.max(2);
    if power <= 1 {
        // log₂ m ≤ m − 1 < m for every m ≥ 2: no failures anywhere.
        return Ok(floor);
    }
    let holds = |m: u64| -> bool {
        let lhs = (m as f64).log2().powi(power as i32);
        lhs < m as f64 - 1e-9
    };
    // m / (log₂ m)^p is strictly increasing for m > e^p, so beyond that
    // point there is a single crossing; below it, failures exist (m = 4
    // fails for p = 2, m = 2^p fails for p ≥ 3), so the last failure sits
    // in the increasing region and binary search finds the boundary.
    let start = (std::f64::consts::E.powi(power as i32).ceil() as u64).max(2);
    let mut lo = start; // holds(lo) is false: g(e^p) < 1 for p ≥ 2
    debug_assert!(!holds(lo));
    let mut hi = start.max(2);
    while !holds(hi) {
        hi = hi.saturating_mul(2);
    }
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.max(floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fit_recovers_exact_power_laws() {
        let points: Vec<(f64, f64)> = (1..=6).map(|k| (k as f64, 3.0 * (k as f64).powi(2))).collect();
        let fit = fit_scaling_exponent(&points).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        assert!(matches!(
            fit_scaling_exponent(&[(1.0, 1.0), (2.0, 2.0)]),
            Err(CheckerError::TooFewPoints { got: 2 })
        ));
        assert!(matches!(
            fit_scaling_exponent(&[(1.0, 1.0), (2.0, 2.0), (0.0, 3.0)]),
            Err(CheckerError::NonPositivePoint { .. })
        ));
        assert!(matches!(
            fit_scaling_exponent(&[(1.0, 1.0), (2.0, -2.0), (3.0, 3.0)]),
            Err(CheckerError::NonPositivePoint { .. })
        ));
    }

    #[test]
    fn strictness_witness_frozen_values() {
        // Linear case: log₂ n < n everywhere.
        assert_eq!(strictness_witness(2, 1, 2).unwrap(), 2);
        // Quadratic polylog: (log₂ n)² ≥ n up to n = 16, strict from 17 on.
        assert_eq!(strictness_witness(3, 1, 2).unwrap(), 17);
        assert_eq!(strictness_witness(2, 2, 2).unwrap(), 17);
        // The floor is respected.
        assert_eq!(strictness_witness(3, 1, 100).unwrap(), 100);
        assert_eq!(strictness_witness(2, 1, 50).unwrap(), 50);
    }

    #[test]
    fn strictness_witness_boundary_is_sharp() {
        // At the reported witness the inequality holds; just below, not.
        let w = strictness_witness(3, 1, 2).unwrap();
        let p = 2i32;
        let holds = |m: u64| ((m as f64).log2().powi(p)) < m as f64;
        assert!(holds(w));
        assert!(!holds(w - 1));
    }

    #[test]
    fn strictness_witness_rejects_huge_powers() {
        assert!(matches!(
            strictness_witness(34, 1, 2),
            Err(CheckerError::PowerTooLarge { power: 33, .. })
        ));
    }

    #[test]
    fn parity_sweep_d2_passes_all_laws() {
        let report = check_rc(FamilyId::Parity, &[8, 16, 32], 2, Placer::Shell).unwrap();
        assert!(report.gaps.is_empty(), "{:?}", report.gaps);
        assert!(report.pass, "{report:#?}");
        assert!(report.gate_law.max_fan_in <= 2);
        assert!(report.gate_law.max_fan_out <= report.gate_law.fanout_bound);
    }

    #[test]
    fn parity_sweep_d3_passes_all_laws() {
        let report = check_rc(FamilyId::Parity, &[8, 16, 32], 3, Placer::Shell).unwrap();
        assert!(report.pass, "{report:#?}");
    }

    proptest! {
        #[test]
        fn fit_slope_matches_generating_exponent(
            slope in -3.0..3.0f64,
            scale in 0.1..10.0f64,
        ) {
            let points: Vec<(f64, f64)> = (1..=8)
                .map(|k| {
                    let x = 2.0f64.powi(k);
                    (x, scale * x.powf(slope))
                })
                .collect();
            let fit = fit_scaling_exponent(&points).unwrap();
            prop_assert!((fit.slope - slope).abs() < 1e-9);
            prop_assert!((fit.intercept - scale.ln()).abs() < 1e-6);
        }
    }

    /// Diagnostic: prints full sweep measurements for both dimensions.
    /// Run with `cargo test -p rclab --lib sweep_diagnostic -- --ignored --nocapture`.
    #[test]
    #[ignore]
    fn sweep_diagnostic() {
        for d in [2u32, 3] {
            let report =
                check_rc(FamilyId::Parity, &[8, 16, 32, 64, 128, 256], d, Placer::Shell).unwrap();
            println!("shell d={d}:");
            for p in &report.points {
                println!(
                    "  n={:4} T={:6} size={:5} maxcut={:4}",
                    p.n, p.makespan, p.size, p.maxcut
                );
            }
            for (n, err) in &report.gaps {
                println!("  n={n:4} GAP: {err}");
            }
            println!(
                "  S slope {:.3} (≤{:.2}) W slope {:.3} (≤{:.2}) K_fit {:.4} margin {}",
                report.size_law.slope,
                report.size_law.limit,
                report.width_law.slope,
                report.width_law.limit,
                report.min_time.k_fit,
                report.min_time.worst_margin,
            );
            let greedy =
                check_rc(FamilyId::Parity, &[8, 16, 32, 64, 128, 256], d, Placer::Greedy);
            match greedy {
                Ok(g) => {
                    let nt: Vec<(f64, f64)> = g
                        .points
                        .iter()
                        .map(|p| (p.n as f64, p.makespan as f64))
                        .collect();
                    let fit = fit_scaling_exponent(&nt).unwrap();
                    println!(
                        "greedy d={d}: T(n) slope {:.3}, spans {:?}",
                        fit.slope,
                        g.points.iter().map(|p| p.makespan).collect::<Vec<_>>()
                    );
                }
                Err(e) => println!("greedy d={d} failed: {e}"),
            }
        }
    }
}
