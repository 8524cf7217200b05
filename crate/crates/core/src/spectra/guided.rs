use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::floquet::{modified_truncated_fiber, perp_fiber, truncated_fiber, FiberKind, Window};
use crate::graph::{CylinderModel, GuidedPotential};
use crate::numerics::{
    eigvalsh, extrema_from_samples, HermitianMatrix, Interval, IntervalSet, TorusGrid,
};

use super::h0::essential_floor;

/// Window-doubling control for discrete eigenvalues below a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePolicy {
    pub r0: usize,
    pub r_max: usize,
    pub tol_window: f64,
    pub delta_margin: f64,
    /// Largest window matrix ever built.
    pub max_dim: usize,
    /// Grid points per axis for perpendicular quasimomentum sweeps.
    pub perp_points: usize,
}

impl ConvergencePolicy {
    pub fn for_model(cyl: &CylinderModel, q: &GuidedPotential, rho: f64) -> Self {
        ConvergencePolicy {
            r0: q.max_shift_norm() + 10,
            r_max: match cyl.dim_perp() {
                1 => 2048,
                2 => 64,
                _ => 16,
            },
            tol_window: 1e-9,
            delta_margin: (1e-6 * rho).max(1e-8),
            max_dim: 1600,
            perp_points: 64,
        }
    }

    fn perp_grid(&self, cyl: &CylinderModel) -> TorusGrid {
        TorusGrid::new(cyl.dim_perp(), self.perp_points)
    }
}

/// Eigenvalues below `threshold` of a window family, certified by doubling.
struct Certified {
    values: Vec<f64>,
    changes: Vec<f64>,
    unresolved: Vec<f64>,
    radius: usize,
}

fn certify(
    cyl: &CylinderModel,
    policy: &ConvergencePolicy,
    threshold: f64,
    build: impl Fn(&Window) -> Result<HermitianMatrix>,
) -> Result<Certified> {
    let below = |r: usize| -> Result<Vec<f64>> {
        let ev = eigvalsh(&build(&Window::new(cyl, r))?)?;
        Ok(ev.into_iter().take_while(|&x| x < threshold).collect())
    };
    let fits = |r: usize| r <= policy.r_max && Window::new(cyl, r).size() <= policy.max_dim;

    let mut r = policy.r0;
    let mut prev = below(r)?;
    let mut best = Certified {
        values: Vec::new(),
        changes: Vec::new(),
        unresolved: prev.clone(),
        radius: r,
    };
    while fits(2 * r) {
        let cur = below(2 * r)?;
        let mut values = Vec::new();
        let mut changes = Vec::new();
        for (j, &x) in cur.iter().enumerate() {
            match prev.get(j) {
                Some(&p) if (p - x).abs() < policy.tol_window && values.len() == j => {
                    values.push(x);
                    changes.push((p - x).abs());
                }
                _ => break,
            }
        }
        let unresolved = cur[values.len()..].to_vec();
        best = Certified {
            values,
            changes,
            unresolved,
            radius: 2 * r,
        };
        if best.unresolved.is_empty() {
            break;
        }
        prev = cur;
        r *= 2;
    }
    Ok(best)
}

/// Certified discrete eigenvalues of `H(θ)` below `m_−(θ) − δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidedSpectrumAt {
    pub theta: Vec<f64>,
    pub m_minus: f64,
    pub m_plus: f64,
    pub values: Vec<f64>,
    /// `|λ^(R) − λ^(2R)|` for each certified value.
    pub changes: Vec<f64>,
    /// Candidates that never stabilized.
    pub unresolved: Vec<f64>,
    pub radius: usize,
}

impl GuidedSpectrumAt {
    pub fn exhausted(&self) -> bool {
        !self.unresolved.is_empty()
    }
}

pub fn guided_eigenvalues(
    cyl: &CylinderModel,
    q: &GuidedPotential,
    theta: &[f64],
    policy: &ConvergencePolicy,
) -> Result<GuidedSpectrumAt> {
    let floor = essential_floor(cyl, theta, &policy.perp_grid(cyl))?;
    let mut out = GuidedSpectrumAt {
        theta: theta.to_vec(),
        m_minus: floor.m_minus,
        m_plus: floor.m_plus,
        values: Vec::new(),
        changes: Vec::new(),
        unresolved: Vec::new(),
        radius: 0,
    };
    if q.is_empty() {
        return Ok(out);
    }
    let c = certify(cyl, policy, floor.m_minus - policy.delta_margin, |w| {
        truncated_fiber(cyl, q, theta, w, true)
    })?;
    out.values = c.values;
    out.changes = c.changes;
    out.unresolved = c.unresolved;
    out.radius = c.radius;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidedBand {
    /// 1-based band index.
    pub j: usize,
    pub interval: Interval,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
    /// The `j`-th curve exists at every grid point.
    pub complete: bool,
    /// Part of the band in `(−∞, 0]`.
    pub sigma_o: Option<Interval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidedBandSet {
    pub grid: TorusGrid,
    pub curves: Vec<GuidedSpectrumAt>,
    pub bands: Vec<GuidedBand>,
}

impl GuidedBandSet {
    pub fn complete_flags(&self) -> Vec<bool> {
        self.bands.iter().map(|b| b.complete).collect()
    }

    /// Number of guided bands reaching `(−∞, 0]`.
    pub fn n_g(&self) -> usize {
        self.bands.iter().filter(|b| b.sigma_o.is_some()).count()
    }

    pub fn exhausted_points(&self) -> usize {
        self.curves.iter().filter(|c| c.exhausted()).count()
    }

    /// Lebesgue measure of the union of all guided bands.
    pub fn measure(&self) -> f64 {
        let list: Vec<Interval> = self.bands.iter().map(|b| b.interval).collect();
        IntervalSet::from_intervals(&list).map_or(0.0, |s| s.measure())
    }
}

/// Recomputes certified values at an off-grid point.
pub type Reevaluator<'a> = &'a (dyn Fn(&[f64]) -> Option<Vec<f64>> + Sync);

/// Pairs curves by ascending index and takes their ranges. `reevaluate`
/// recomputes certified values off the grid for endpoint refinement.
pub fn assemble_guided_bands(
    grid: &TorusGrid,
    curves: Vec<GuidedSpectrumAt>,
    reevaluate: Option<Reevaluator>,
) -> GuidedBandSet {
    let count = curves.iter().map(|c| c.values.len()).max().unwrap_or(0);
    let bands = (0..count)
        .map(|j| {
            let samples: Vec<Option<f64>> =
                curves.iter().map(|c| c.values.get(j).copied()).collect();
            let refine = |t: &[f64]| {
                reevaluate
                    .and_then(|f| f(t))
                    .and_then(|v| v.get(j).copied())
            };
            let e = extrema_from_samples(
                &samples,
                grid,
                reevaluate
                    .is_some()
                    .then_some(&refine as &(dyn Fn(&[f64]) -> Option<f64> + Sync)),
            )
            .expect("curve j exists somewhere");
            let interval = Interval {
                lo: e.min_value,
                hi: e.max_value,
            };
            GuidedBand {
                j: j + 1,
                interval,
                argmin: e.argmin,
                argmax: e.argmax,
                complete: samples.iter().all(Option::is_some),
                sigma_o: interval.capped(0.0),
            }
        })
        .collect();
    GuidedBandSet {
        grid: *grid,
        curves,
        bands,
    }
}

/// Guided bands of `H = H₀ − Q` over a grid on `T^d`.
pub fn compute_guided_bands(
    cyl: &CylinderModel,
    q: &GuidedPotential,
    grid: &TorusGrid,
    policy: &ConvergencePolicy,
) -> Result<GuidedBandSet> {
    assert_eq!(grid.dim(), cyl.dim_guided);
    let curves: Vec<GuidedSpectrumAt> = (0..grid.len())
        .into_par_iter()
        .map(|i| guided_eigenvalues(cyl, q, &grid.point(i), policy))
        .collect::<Result<_>>()?;
    let reevaluate = |t: &[f64]| guided_eigenvalues(cyl, q, t, policy).ok().map(|c| c.values);
    Ok(assemble_guided_bands(grid, curves, Some(&reevaluate)))
}

/// Discrete spectrum of the modified cylinder operator `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuSpectrum {
    pub mu_tilde: Vec<f64>,
    pub ess_inf_h: f64,
    /// `μ_j = min(μ̃_j, inf σ_ess(h))`, padded to `p` entries.
    pub mu: Vec<f64>,
    pub unresolved: Vec<f64>,
    pub radius: usize,
}

impl MuSpectrum {
    pub fn exhausted(&self) -> bool {
        !self.unresolved.is_empty()
    }
}

pub fn mu_spectrum(
    cyl: &CylinderModel,
    q: &GuidedPotential,
    policy: &ConvergencePolicy,
) -> Result<MuSpectrum> {
    let theta = vec![0.0; cyl.dim_guided];
    let grid = policy.perp_grid(cyl);
    let lowest: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let m = perp_fiber(cyl, FiberKind::Modified, &theta, &grid.point(i), true);
            eigvalsh(&m).map(|v| v[0])
        })
        .collect::<Result<_>>()?;
    let samples: Vec<Option<f64>> = lowest.into_iter().map(Some).collect();
    let refine = |phi: &[f64]| {
        eigvalsh(&perp_fiber(cyl, FiberKind::Modified, &theta, phi, true))
            .ok()
            .map(|v| v[0])
    };
    let ess_inf_h = extrema_from_samples(&samples, &grid, Some(&refine))
        .expect("grid is nonempty")
        .min_value;

    let p = q.support_size();
    let c = if q.is_empty() {
        Certified {
            values: Vec::new(),
            changes: Vec::new(),
            unresolved: Vec::new(),
            radius: 0,
        }
    } else {
        certify(cyl, policy, ess_inf_h - policy.delta_margin, |w| {
            modified_truncated_fiber(cyl, q, w, true)
        })?
    };
    let mu = (0..p)
        .map(|j| c.values.get(j).map_or(ess_inf_h, |&x| x.min(ess_inf_h)))
        .collect();
    Ok(MuSpectrum {
        mu_tilde: c.values,
        ess_inf_h,
        mu,
        unresolved: c.unresolved,
        radius: c.radius,
    })
}
