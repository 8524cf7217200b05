mod common;

use std::f64::consts::PI;

use guided_bands::floquet::{
    bridge_fiber, full_fiber, modified_truncated_fiber, perp_fiber, truncated_fiber, FiberKind,
    Window,
};
use guided_bands::graph::{betti_and_stats, GuidedPotential};
use guided_bands::numerics::{eigvalsh, TorusGrid};
use guided_bands::spectra::{guided_eigenvalues, h0_spectrum, ConvergencePolicy};
use guided_bands::theorems::{delta_jj, delta_profile};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{load, CONFIGS};

fn random_angles(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(-PI..PI)).collect()
}

#[test]
fn decomposition_is_bit_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in CONFIGS {
        let (_, cyl, q) = load(name);
        for _ in 0..16 {
            let theta = random_angles(&mut rng, cyl.dim_guided);
            let r = q.max_shift_norm() + rng.random_range(0..6usize);
            let w = Window::new(&cyl, r);
            let full = truncated_fiber(&cyl, &q, &theta, &w, true).unwrap();
            let parts = modified_truncated_fiber(&cyl, &q, &w, true)
                .unwrap()
                .sum(&bridge_fiber(&cyl, &theta, &w));
            assert_eq!(full, parts, "{name}");
        }
    }
}

#[test]
fn bridge_fiber_spectrum_within_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for name in CONFIGS {
        let (_, cyl, _) = load(name);
        let top = 2.0 * cyl.beta_plus as f64;
        for _ in 0..8 {
            let theta = random_angles(&mut rng, cyl.dim_guided);
            let ev = eigvalsh(&bridge_fiber(&cyl, &theta, &Window::new(&cyl, 4))).unwrap();
            assert!(
                ev[0] >= -1e-10 && *ev.last().unwrap() <= top + 1e-10,
                "{name}"
            );
        }
    }
}

#[test]
fn bridge_fiber_kernel_at_zero() {
    // all bridges of the square lattice have zero perpendicular index
    let (_, cyl, _) = load("square.json");
    let ev = eigvalsh(&bridge_fiber(&cyl, &[0.0], &Window::new(&cyl, 5))).unwrap();
    assert!(ev[0].abs() < 1e-14);
}

#[test]
fn two_floquet_levels_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for name in CONFIGS {
        let (_, cyl, _) = load(name);
        for _ in 0..16 {
            let theta = random_angles(&mut rng, cyl.dim_guided);
            let phi = random_angles(&mut rng, cyl.dim_perp());
            let joined: Vec<f64> = theta.iter().chain(&phi).copied().collect();
            let a = eigvalsh(&perp_fiber(&cyl, FiberKind::Cylinder, &theta, &phi, true)).unwrap();
            let b = eigvalsh(&full_fiber(&cyl, &joined, true)).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-12, "{name}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn laplacian_fibers_are_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for name in CONFIGS {
        let (_, cyl, _) = load(name);
        let mut lap = cyl.clone();
        lap.potential.iter_mut().for_each(|w| *w = 0.0);
        let empty = GuidedPotential::empty();
        for _ in 0..4 {
            let theta = random_angles(&mut rng, cyl.dim_guided);
            let phi = random_angles(&mut rng, cyl.dim_perp());
            let joined: Vec<f64> = theta.iter().chain(&phi).copied().collect();
            let w = Window::new(&lap, 3);
            let mats = [
                full_fiber(&lap, &joined, true),
                truncated_fiber(&lap, &empty, &theta, &w, false).unwrap(),
                modified_truncated_fiber(&lap, &empty, &w, false).unwrap(),
                bridge_fiber(&lap, &theta, &w),
            ];
            for m in &mats {
                assert_eq!(m.hermiticity_defect(), 0.0);
                assert!(eigvalsh(m).unwrap()[0] >= -1e-10, "{name}");
            }
        }
    }
}

#[test]
fn orientation_closure_and_degree_identity() {
    for name in CONFIGS {
        let (_, cyl, _) = load(name);
        let half = cyl.oriented_edges.len() / 2;
        for (f, r) in cyl.oriented_edges[..half]
            .iter()
            .zip(&cyl.oriented_edges[half..])
        {
            assert_eq!((f.tail, f.head), (r.head, r.tail));
            let neg: Vec<i64> = f.full_index().iter().map(|c| -c).collect();
            assert_eq!(r.full_index(), neg);
        }
        let total: usize = cyl.degrees.iter().sum();
        assert_eq!(total, cyl.oriented_edges.len());
        for v in 0..cyl.nu() {
            assert_eq!(
                cyl.degrees[v],
                cyl.modified_degree(v) + cyl.bridge_counts[v]
            );
        }
    }
}

#[test]
fn statistics_are_shift_invariant() {
    for name in CONFIGS {
        let (_, cyl, _) = load(name);
        for v in 0..cyl.nu() {
            let base = cyl.local_stats(v, &vec![0; cyl.dim_perp()]);
            assert_eq!(base.bridges, cyl.bridge_counts[v]);
            assert_eq!(base.bridge_loops, cyl.loop_stats[v].bridge_loop_count());
            for shift in [vec![3i64; cyl.dim_perp()], vec![-7i64; cyl.dim_perp()]] {
                assert_eq!(cyl.local_stats(v, &shift), base);
            }
        }
        let stats = betti_and_stats(&cyl);
        assert!(stats.betti >= 0);
    }
}

#[test]
fn flat_band_persists_under_guided_potential() {
    let (_, cyl, q) = load("pendant_flatband.json");
    let grid = TorusGrid::new(1, 16);
    for i in 0..grid.len() {
        let theta = grid.point(i);
        for r in [10, 20] {
            let ev =
                eigvalsh(&truncated_fiber(&cyl, &q, &theta, &Window::new(&cyl, r), true).unwrap())
                    .unwrap();
            let nearest = ev
                .iter()
                .map(|x| (x - 1.0).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-9, "theta {theta:?}, R {r}: {nearest}");
        }
    }
}

#[test]
fn flat_band_detected_in_h0() {
    let (_, cyl, _) = load("pendant_flatband.json");
    let bs = h0_spectrum(&cyl, &TorusGrid::new(2, 32), true).unwrap();
    assert_eq!(bs.flat_values().len(), 1);
    assert!((bs.flat_values()[0] - 1.0).abs() < 1e-9);
}

#[test]
fn guided_curves_are_even() {
    for name in [
        "square_q3.json",
        "chain_no_bridge_loops.json",
        "big_measure.json",
        "pendant_flatband.json",
    ] {
        let (_, cyl, q) = load(name);
        let policy = ConvergencePolicy::for_model(&cyl, &q, 8.0);
        for &t in &[0.3, 1.1, 2.7] {
            let a = guided_eigenvalues(&cyl, &q, &[t], &policy).unwrap();
            let b = guided_eigenvalues(&cyl, &q, &[-t], &policy).unwrap();
            assert_eq!(a.values.len(), b.values.len(), "{name}");
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).abs() <= 1e-10, "{name}");
            }
            assert!(a.values.len() <= q.support_size());
        }
    }
}

#[test]
fn window_convergence_is_monotone() {
    for name in [
        "square.json",
        "square_q3.json",
        "chain_no_bridge_loops.json",
        "big_measure.json",
    ] {
        let (_, cyl, q) = load(name);
        let theta = [0.9];
        let r0 = q.max_shift_norm() + 2;
        let radii: Vec<usize> = (0..5).map(|k| r0 << k).collect();
        let lowest: Vec<Vec<f64>> = radii
            .iter()
            .map(|&r| {
                let ev = eigvalsh(
                    &truncated_fiber(&cyl, &q, &theta, &Window::new(&cyl, r), true).unwrap(),
                )
                .unwrap();
                ev[..q.support_size()].to_vec()
            })
            .collect();
        for j in 0..q.support_size() {
            for (k, pair) in lowest.windows(2).enumerate() {
                assert!(
                    pair[1][j] <= pair[0][j] + 1e-12,
                    "{name}: j {j}, R {}",
                    radii[k + 1]
                );
            }
        }
        // geometric convergence of the deepest state
        let d1 = (lowest[1][0] - lowest[2][0]).abs();
        let d2 = (lowest[2][0] - lowest[3][0]).abs();
        assert!(d2 <= d1 / 10.0 || d2 < 1e-13, "{name}: {d1} {d2}");
    }
}

#[test]
fn delta_extrema_match_fine_grid() {
    for name in CONFIGS {
        let (_, cyl, q) = load(name);
        let grid = TorusGrid::new(cyl.dim_guided, if cyl.dim_guided == 1 { 64 } else { 16 });
        let fine = TorusGrid::new(cyl.dim_guided, grid.points_per_dim() * 10);
        let profile = delta_profile(&cyl, &q, &grid);
        for e in &profile.entries {
            let v = cyl.ids.iter().position(|id| *id == e.vertex).unwrap();
            let values: Vec<f64> = fine.points().iter().map(|t| delta_jj(&cyl, v, t)).collect();
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!((e.minus - lo).abs() < 1e-8, "{name}");
            assert!((e.plus - hi).abs() < 1e-8, "{name}");
            let b = e.beta_jj as f64;
            assert!(e.delta >= b - 1e-10 && e.delta <= 2.0 * b + 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decomposition_bit_exact_on_random_potentials(
        qa in 0.1f64..20.0, qb in 0.1f64..20.0, wa in -3.0f64..3.0, theta in -PI..PI, r in 0usize..8
    ) {
        let (mut spec, _, _) = load("chain_no_bridge_loops.json");
        spec.vertices[0].potential = wa;
        spec.guided_potential[0].value = qa;
        let mut extra = spec.guided_potential[0].clone();
        extra.vertex = "b".into();
        extra.value = qb;
        spec.guided_potential.push(extra);
        let cyl = guided_bands::graph::build_cylinder(&spec);
        let q = GuidedPotential::from_spec(&spec);
        let w = Window::new(&cyl, r);
        let full = truncated_fiber(&cyl, &q, &[theta], &w, true).unwrap();
        let parts = modified_truncated_fiber(&cyl, &q, &w, true).unwrap().sum(&bridge_fiber(&cyl, &[theta], &w));
        prop_assert_eq!(full, parts);
    }

    #[test]
    fn guided_eigenvalues_lie_below_floor_and_count_bounded(q in 0.5f64..12.0, theta in -PI..PI) {
        let (mut spec, _, _) = load("square.json");
        spec.guided_potential[0].value = q;
        let cyl = guided_bands::graph::build_cylinder(&spec);
        let gq = GuidedPotential::from_spec(&spec);
        let policy = ConvergencePolicy::for_model(&cyl, &gq, 8.0);
        let at = guided_eigenvalues(&cyl, &gq, &[theta], &policy).unwrap();
        prop_assert!(at.values.len() <= 1);
        let mu = 2.0 - (4.0 + q * q).sqrt();
        prop_assert!((at.values[0] - (mu + 2.0 - 2.0 * theta.cos())).abs() < 1e-8);
        prop_assert!(at.values[0] < at.m_minus);
    }
}
