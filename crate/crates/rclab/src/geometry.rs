//! Euclidean and lattice geometry in `d` dimensions: ball volumes, sphere
//! areas, packing capacities, causal regions, and the minimum-completion-time
//! law that follows from boundary-limited information delivery.
//!
//! Continuum quantities use the exact unit-ball coefficients ω_d; lattice
//! quantities count sites under the L∞ (Chebyshev) metric, where one tick
//! moves a signal to any of the 3^d − 1 neighboring sites.  Euclidean space
//! is the worst case for these bounds: positively curved geometries only
//! shrink boundary areas, so no curved-metric code is needed.

use thiserror::Error;

/// Errors from geometry computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error(
        "the width law degenerates at d=1 (boundary is two points); \
         use the recurrent module for one-dimensional realizations"
    )]
    DimensionTooLow,
    #[error("dimension must be ≥ 1")]
    ZeroDimension,
}

/// Volume coefficient ω_d of the unit ball in `d` dimensions, via the
/// two-step recurrence ω_d = ω_{d−2}·2π/d grounded at ω_1 = 2, ω_2 = π.
pub fn unit_ball_coefficient(d: u32) -> f64 {
    assert!(d >= 1, "dimension must be ≥ 1");
    let mut older = 2.0; // ω_1
    let mut newer = std::f64::consts::PI; // ω_2
    match d {
        1 => return older,
        2 => return newer,
        _ => {}
    }
    for k in 3..=d {
        let next = older * 2.0 * std::f64::consts::PI / k as f64;
        older = newer;
        newer = next;
    }
    newer
}

/// Euclidean volume ω_d·r^d of the radius-`r` ball.
pub fn ball_volume(d: u32, r: f64) -> f64 {
    assert!(d >= 1 && r >= 0.0);
    unit_ball_coefficient(d) * r.powi(d as i32)
}

/// Euclidean surface area d·ω_d·r^{d−1} of the radius-`r` sphere.  For
/// d = 1 the "sphere" is two endpoints; by convention this returns 2.
pub fn sphere_area(d: u32, r: f64) -> f64 {
    assert!(d >= 1 && r >= 0.0);
    if d == 1 {
        return 2.0;
    }
    d as f64 * unit_ball_coefficient(d) * r.powi(d as i32 - 1)
}

/// Upper bound on the number of points with pairwise distance ≥ `ell`
/// inside the radius-`r` ball: every such point owns a disjoint ball of
/// radius ell/2 contained in the radius r+ell/2 ball, so the count is at
/// most floor(vol(r+ell/2)/vol(ell/2)).
pub fn packing_capacity(d: u32, r: f64, ell: f64) -> u64 {
    assert!(r >= 0.0 && ell > 0.0);
    let ratio = ball_volume(d, r + ell / 2.0) / ball_volume(d, ell / 2.0);
    floor_guarded(ratio)
}

/// Minimum completion time in ticks for a computation that must absorb `n`
/// input bits through a boundary whose per-tick capacity is K·t^{d−2}·…
/// — integrated, T must satisfy K·T^{d−1} ≥ n, i.e. T ≥ (n/K)^{1/(d−1)}.
/// Rejects d = 1, where the boundary is two points and no such law holds.
pub fn min_time_lower_bound(n: u64, d: u32, k: f64) -> Result<u64, GeometryError> {
    if d == 0 {
        return Err(GeometryError::ZeroDimension);
    }
    if d == 1 {
        return Err(GeometryError::DimensionTooLow);
    }
    assert!(n >= 1 && k > 0.0);
    let t = (n as f64 / k).powf(1.0 / (d - 1) as f64);
    Ok(ceil_guarded(t))
}

/// floor with protection against values sitting a rounding error below an
/// integer (e.g. 49 computed as 48.999999999999996).
fn floor_guarded(x: f64) -> u64 {
    let nearest = x.round();
    if (x - nearest).abs() < 1e-9 {
        nearest as u64
    } else {
        x.floor() as u64
    }
}

/// ceil with the same protection in the other direction (1000^{1/3}
/// computes as 9.999999999999998 and must ceil to 10, not 10 then 10 —
/// but 9.0000000001 from noise must not become 10).
fn ceil_guarded(x: f64) -> u64 {
    let nearest = x.round();
    if (x - nearest).abs() < 1e-9 {
        nearest as u64
    } else {
        x.ceil() as u64
    }
}

/// L∞ (Chebyshev) norm of a lattice vector.
pub fn linf_norm(v: &[i64]) -> i64 {
    v.iter().map(|&c| c.abs()).max().unwrap_or(0)
}

/// L∞ distance between two lattice sites of equal dimension.
pub fn linf_dist(a: &[i64], b: &[i64]) -> i64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs())
        .max()
        .unwrap_or(0)
}

/// Number of lattice sites in the closed L∞ ball of radius `r`: (2r+1)^d.
pub fn lattice_ball_sites(d: u32, r: i64) -> u64 {
    assert!(r >= 0);
    (2 * r as u64 + 1).pow(d)
}

/// Number of lattice sites at L∞ radius exactly `r`: the discrete sphere
/// area (2r+1)^d − (2r−1)^d for r ≥ 1, and 1 for r = 0.
pub fn lattice_sphere_sites(d: u32, r: i64) -> u64 {
    assert!(r >= 0);
    if r == 0 {
        1
    } else {
        (2 * r as u64 + 1).pow(d) - (2 * r as u64 - 1).pow(d)
    }
}

/// The set of lattice sites reachable from a center within the causal
/// horizon: radius c·(t−t0) in the L∞ metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalRegion {
    pub center: Vec<i64>,
    pub t0: i64,
    /// Signal speed in cells per tick; c ≥ 1.
    pub c: i64,
    pub d: u32,
}

impl CausalRegion {
    pub fn new(center: Vec<i64>, t0: i64, c: i64) -> Self {
        assert!(c >= 1);
        let d = center.len() as u32;
        assert!(d >= 1);
        CausalRegion { center, t0, c, d }
    }

    /// Horizon radius at tick `t` (0 before the region starts).
    pub fn radius(&self, t: i64) -> i64 {
        (self.c * (t - self.t0)).max(0)
    }

    /// Whether `site` is inside the horizon at tick `t`.
    pub fn contains(&self, site: &[i64], t: i64) -> bool {
        linf_dist(site, &self.center) <= self.radius(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn assert_rel(got: f64, want: f64, tol: f64) {
        let denom = want.abs().max(1e-300);
        assert!(
            ((got - want) / denom).abs() <= tol,
            "got {got}, want {want} (rel tol {tol})"
        );
    }

    #[test]
    fn unit_ball_coefficients_match_closed_forms() {
        // ω_d = π^{d/2}/Γ(d/2+1); the first eight have elementary forms.
        let closed = [
            2.0,
            PI,
            4.0 * PI / 3.0,
            PI * PI / 2.0,
            8.0 * PI * PI / 15.0,
            PI.powi(3) / 6.0,
            16.0 * PI.powi(3) / 105.0,
            PI.powi(4) / 24.0,
        ];
        for (i, &want) in closed.iter().enumerate() {
            assert_rel(unit_ball_coefficient(i as u32 + 1), want, 1e-12);
        }
    }

    #[test]
    fn ball_volume_examples() {
        assert_rel(ball_volume(2, 3.0), 9.0 * PI, 1e-12);
        assert_rel(ball_volume(3, 1.0), 4.0 * PI / 3.0, 1e-12);
        assert_rel(ball_volume(1, 5.0), 10.0, 1e-12);
    }

    #[test]
    fn sphere_area_examples() {
        assert_rel(sphere_area(3, 2.0), 16.0 * PI, 1e-12);
        assert_rel(sphere_area(2, 1.0), 2.0 * PI, 1e-12);
        assert_eq!(sphere_area(1, 7.0), 2.0);
    }

    #[test]
    fn sphere_area_is_volume_derivative() {
        // Central finite difference of the volume at r=10, d=3.
        let h = 1e-4;
        let fd = (ball_volume(3, 10.0 + h) - ball_volume(3, 10.0 - h)) / (2.0 * h);
        assert_rel(fd, sphere_area(3, 10.0), 1e-6);
    }

    #[test]
    fn area_integrates_to_volume() {
        // Midpoint Riemann sum of the area over [0, R] vs the ball volume.
        let steps = 10_000;
        let r_max = 2.0;
        let dr = r_max / steps as f64;
        for d in 1..=5 {
            let sum: f64 = (0..steps)
                .map(|i| sphere_area(d, (i as f64 + 0.5) * dr) * dr)
                .sum();
            let want = if d == 1 {
                // d=1 convention: area ≡ 2, integral 2R = interval length.
                ball_volume(1, r_max)
            } else {
                ball_volume(d, r_max)
            };
            assert_rel(sum, want, 1e-4);
        }
    }

    #[test]
    fn packing_capacity_examples() {
        assert_eq!(packing_capacity(1, 5.0, 1.0), 11);
        assert_eq!(packing_capacity(2, 0.0, 1.0), 1);
    }

    #[test]
    fn packing_capacity_dominates_lattice_count() {
        // Integer points of Z² inside the Euclidean disk of radius 3 are
        // unit-separated, so their exhaustive count cannot exceed the bound.
        let r = 3.0;
        let mut lattice_points = 0u64;
        for x in -3i64..=3 {
            for y in -3i64..=3 {
                if ((x * x + y * y) as f64).sqrt() <= r {
                    lattice_points += 1;
                }
            }
        }
        assert_eq!(lattice_points, 29);
        let cap = packing_capacity(2, r, 1.0);
        assert_eq!(cap, 49);
        assert!(cap >= lattice_points);
    }

    #[test]
    fn min_time_examples() {
        assert_eq!(min_time_lower_bound(1024, 3, 1.0).unwrap(), 32);
        assert_eq!(min_time_lower_bound(1024, 2, 1.0).unwrap(), 1024);
        assert_eq!(min_time_lower_bound(1000, 4, 1.0).unwrap(), 10);
        assert_eq!(
            min_time_lower_bound(7, 1, 1.0),
            Err(GeometryError::DimensionTooLow)
        );
    }

    #[test]
    fn min_time_monotone_in_dimension() {
        for n in [1u64, 10, 1000, 1_000_000] {
            for d in 2..8 {
                let lo = min_time_lower_bound(n, d + 1, 1.0).unwrap();
                let hi = min_time_lower_bound(n, d, 1.0).unwrap();
                assert!(lo <= hi, "n={n} d={d}: {lo} > {hi}");
            }
        }
        // Strict separation once n is large.
        let n = 1_000_000;
        assert!(
            min_time_lower_bound(n, 3, 1.0).unwrap() < min_time_lower_bound(n, 2, 1.0).unwrap()
        );
    }

    #[test]
    fn min_time_speedup_identity() {
        // With K=1 the bound is exactly ceil(T₁^{1/(d−1)}) for T₁ = n.
        for n in [1u64, 2, 10, 100, 1024, 4096, 1_000_000] {
            for d in 2..6 {
                let want = ceil_guarded((n as f64).powf(1.0 / (d - 1) as f64));
                assert_eq!(min_time_lower_bound(n, d, 1.0).unwrap(), want);
            }
        }
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(lattice_ball_sites(2, 3), 49);
        assert_eq!(lattice_sphere_sites(2, 3), 49 - 25);
        assert_eq!(lattice_sphere_sites(3, 1), 26);
        assert_eq!(lattice_sphere_sites(1, 4), 2);
        assert_eq!(lattice_sphere_sites(3, 0), 1);
        // Shells partition the ball.
        for d in 1..=4 {
            let total: u64 = (0..=5).map(|r| lattice_sphere_sites(d, r)).sum();
            assert_eq!(total, lattice_ball_sites(d, 5));
        }
    }

    #[test]
    fn causal_region_membership() {
        let region = CausalRegion::new(vec![0, 0], 0, 1);
        assert!(region.contains(&[0, 0], 0));
        assert!(!region.contains(&[1, 0], 0));
        assert!(region.contains(&[3, -3], 3));
        assert!(!region.contains(&[4, 0], 3));
        let offset = CausalRegion::new(vec![5, 5], 2, 2);
        assert_eq!(offset.radius(4), 4);
        assert!(offset.contains(&[9, 5], 4));
        assert!(!offset.contains(&[10, 5], 4));
    }

    proptest! {
        #[test]
        fn higher_dimension_never_needs_more_time(
            n in 1u64..10_000_000,
            d in 2u32..7,
        ) {
            let hi = min_time_lower_bound(n, d, 1.0).unwrap();
            let lo = min_time_lower_bound(n, d + 1, 1.0).unwrap();
            prop_assert!(lo <= hi);
        }

        #[test]
        fn packing_capacity_monotone_in_radius(
            d in 1u32..5,
            r in 0.0f64..50.0,
            extra in 0.0f64..10.0,
        ) {
            prop_assert!(
                packing_capacity(d, r + extra, 1.0) >= packing_capacity(d, r, 1.0)
            );
        }

        #[test]
        fn lattice_shells_partition_ball(d in 1u32..5, r in 0i64..12) {
            let total: u64 = (0..=r).map(|s| lattice_sphere_sites(d, s)).sum();
            prop_assert_eq!(total, lattice_ball_sites(d, r));
        }
    }
}
