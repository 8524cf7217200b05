use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::floquet::full_fiber;
use crate::graph::CylinderModel;
use crate::numerics::{eigvalsh, extrema_from_samples, Interval, IntervalSet, TorusGrid};

/// Band structure of `H₀` sampled on a grid over the full torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    pub grid: TorusGrid,
    /// Ascending fiber eigenvalues at each grid point, after the shift.
    pub branches: Vec<Vec<f64>>,
    /// Range of each branch (grid extrema, refined).
    pub bands: Vec<Interval>,
    pub flat_flags: Vec<bool>,
    pub rho: f64,
    pub inf0: f64,
    /// Constant subtracted from `W` (zero without normalization).
    pub shift: f64,
    pub tol_flat: f64,
}

impl BandStructure {
    pub fn spectrum(&self) -> IntervalSet {
        IntervalSet::from_intervals(&self.bands).expect("bands are well formed")
    }

    /// `Σ |σ_n|`, flat bands counted as zero.
    pub fn total_band_length(&self) -> f64 {
        self.bands
            .iter()
            .zip(&self.flat_flags)
            .filter(|(_, &flat)| !flat)
            .map(|(b, _)| b.len())
            .sum()
    }

    pub fn flat_values(&self) -> Vec<f64> {
        self.bands
            .iter()
            .zip(&self.flat_flags)
            .filter(|(_, &flat)| flat)
            .map(|(b, _)| 0.5 * (b.lo + b.hi))
            .collect()
    }
}

fn branch_ranges(
    grid: &TorusGrid,
    samples: &[Vec<f64>],
    nu: usize,
    eval: &(dyn Fn(&[f64]) -> Option<Vec<f64>> + Sync),
) -> Vec<Interval> {
    (0..nu)
        .map(|n| {
            let column: Vec<Option<f64>> = samples.iter().map(|s| Some(s[n])).collect();
            let refine = |t: &[f64]| eval(t).map(|v| v[n]);
            let e = extrema_from_samples(&column, grid, Some(&refine)).expect("grid is nonempty");
            Interval {
                lo: e.min_value,
                hi: e.max_value,
            }
        })
        .collect()
}

/// Eigensolves the full fiber at every grid point. With `normalize`, all
/// values are shifted so that `inf σ(H₀) = 0`; the same shift must then be
/// applied to `W` (see [`CylinderModel::with_potential_shift`]).
pub fn h0_spectrum(
    cyl: &CylinderModel,
    grid: &TorusGrid,
    normalize: bool,
) -> Result<BandStructure> {
    assert_eq!(grid.dim(), cyl.dim_total);
    if !crate::graph::connectivity_check(cyl).connected {
        log::warn!("periodic graph is not connected; band structure covers all components");
    }
    let raw: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|i| eigvalsh(&full_fiber(cyl, &grid.point(i), true)))
        .collect::<Result<_>>()?;
    let eval = |t: &[f64]| eigvalsh(&full_fiber(cyl, t, true)).ok();
    let raw_bands = branch_ranges(grid, &raw, cyl.nu(), &eval);

    let raw_inf = raw_bands.iter().map(|b| b.lo).fold(f64::INFINITY, f64::min);
    let shift = if normalize { raw_inf } else { 0.0 };
    let bands: Vec<Interval> = raw_bands
        .iter()
        .map(|b| Interval {
            lo: b.lo - shift,
            hi: b.hi - shift,
        })
        .collect();
    let branches = raw
        .into_iter()
        .map(|v| v.into_iter().map(|x| x - shift).collect())
        .collect();
    let rho = bands.iter().map(|b| b.hi).fold(f64::NEG_INFINITY, f64::max);
    let tol_flat = 1e-10 * rho.abs().max(1.0);
    let flat_flags = bands.iter().map(|b| b.len() < tol_flat).collect();
    Ok(BandStructure {
        grid: *grid,
        branches,
        bands,
        flat_flags,
        rho,
        inf0: raw_inf - shift,
        shift,
        tol_flat,
    })
}

/// Ranges of the `ν` branches of `H₀(θ)` over a grid of perpendicular
/// quasimomenta.
pub fn fiber_band_ranges(
    cyl: &CylinderModel,
    theta: &[f64],
    grid_perp: &TorusGrid,
) -> Result<Vec<Interval>> {
    assert_eq!(theta.len(), cyl.dim_guided);
    assert_eq!(grid_perp.dim(), cyl.dim_perp());
    let join = |phi: &[f64]| -> Vec<f64> { theta.iter().chain(phi).copied().collect() };
    let samples: Vec<Vec<f64>> = (0..grid_perp.len())
        .into_par_iter()
        .map(|i| eigvalsh(&full_fiber(cyl, &join(&grid_perp.point(i)), true)))
        .collect::<Result<_>>()?;
    let eval = |phi: &[f64]| eigvalsh(&full_fiber(cyl, &join(phi), true)).ok();
    Ok(branch_ranges(grid_perp, &samples, cyl.nu(), &eval))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssentialFloor {
    pub m_minus: f64,
    pub m_plus: f64,
}

/// Endpoints `m_±(θ)` of `σ(H₀(θ))`.
pub fn essential_floor(
    cyl: &CylinderModel,
    theta: &[f64],
    grid_perp: &TorusGrid,
) -> Result<EssentialFloor> {
    let ranges = fiber_band_ranges(cyl, theta, grid_perp)?;
    Ok(EssentialFloor {
        m_minus: ranges.iter().map(|b| b.lo).fold(f64::INFINITY, f64::min),
        m_plus: ranges
            .iter()
            .map(|b| b.hi)
            .fold(f64::NEG_INFINITY, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cylinder, load_and_validate};
    use std::f64::consts::PI;

    fn cyl(text: &str) -> CylinderModel {
        build_cylinder(&load_and_validate(text).unwrap().spec)
    }

    const SQUARE: &str = r#"{"dim_total": 2, "dim_guided": 1,
        "vertices": [{"id": "v", "W": 0.0}],
        "edges": [{"from": "v", "to": "v", "index": [1, 0]},
                  {"from": "v", "to": "v", "index": [0, 1]}]}"#;

    const PENDANT: &str = r#"{"dim_total": 2, "dim_guided": 1,
        "vertices": [{"id": "u", "W": 0.0}, {"id": "p1", "W": 0.0}, {"id": "p2", "W": 0.0}],
        "edges": [{"from": "u", "to": "u", "index": [1, 0]},
                  {"from": "u", "to": "u", "index": [0, 1]},
                  {"from": "u", "to": "p1", "index": [0, 0]},
                  {"from": "u", "to": "p2", "index": [0, 0]}]}"#;

    #[test]
    fn square_lattice_band() {
        let c = cyl(SQUARE);
        let bs = h0_spectrum(&c, &TorusGrid::new(2, 64), true).unwrap();
        assert_eq!(bs.bands.len(), 1);
        assert!(bs.bands[0].lo.abs() < 1e-12);
        assert!((bs.bands[0].hi - 8.0).abs() < 1e-12);
        assert!((bs.rho - 8.0).abs() < 1e-12);
        assert_eq!(bs.flat_flags, vec![false]);
        assert!((bs.total_band_length() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn pendant_flat_band() {
        let c = cyl(PENDANT);
        let bs = h0_spectrum(&c, &TorusGrid::new(2, 32), true).unwrap();
        assert_eq!(bs.flat_flags.iter().filter(|&&f| f).count(), 1);
        let flat = bs.flat_values();
        assert!((flat[0] - 1.0).abs() < 1e-9);
        assert!(bs.inf0.abs() < 1e-12);
    }

    #[test]
    fn normalization_removes_constant_shift() {
        let c = cyl(SQUARE).with_potential_shift(-2.5);
        let grid = TorusGrid::new(2, 16);
        let raw = h0_spectrum(&c, &grid, false).unwrap();
        assert!((raw.bands[0].lo - 2.5).abs() < 1e-12);
        let bs = h0_spectrum(&c, &grid, true).unwrap();
        assert!((bs.shift - 2.5).abs() < 1e-12);
        assert_eq!(bs.inf0, 0.0);
        assert!((bs.bands[0].hi - 8.0).abs() < 1e-12);
    }

    #[test]
    fn square_essential_floor() {
        let c = cyl(SQUARE);
        let g = TorusGrid::new(1, 64);
        for &t in &[0.0, 0.4, -2.2, PI] {
            let f = essential_floor(&c, &[t], &g).unwrap();
            assert!((f.m_minus - (2.0 - 2.0 * t.cos())).abs() < 1e-12);
            assert!((f.m_plus - (6.0 - 2.0 * t.cos())).abs() < 1e-12);
        }
        assert!((essential_floor(&c, &[PI], &g).unwrap().m_minus - 4.0).abs() < 1e-12);
    }
}
