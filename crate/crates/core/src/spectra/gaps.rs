use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::floquet::{truncated_fiber, Window};
use crate::graph::{CylinderModel, GuidedPotential};
use crate::numerics::{eigh, eigvalsh, Interval, IntervalSet, TorusGrid};

use super::guided::ConvergencePolicy;
use super::h0::fiber_band_ranges;

/// Eigenvalue of a truncated `H(θ)` inside a gap of `σ(H₀(θ))`. Detection
/// is heuristic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapState {
    pub theta: Vec<f64>,
    pub value: f64,
    pub change: f64,
    pub gap: Interval,
    /// Eigenvector weight on the inner half of the larger window.
    pub inner_weight: f64,
}

const MIN_INNER_WEIGHT: f64 = 0.99;

/// Keeps eigenvalues that sit strictly inside a gap, agree between windows
/// `R₀` and `2R₀`, and are concentrated away from the window edge (edge
/// states of the truncation are stable too, so stability alone is not enough).
pub fn gap_states(
    cyl: &CylinderModel,
    q: &GuidedPotential,
    theta: &[f64],
    policy: &ConvergencePolicy,
) -> Result<Vec<GapState>> {
    if q.is_empty() {
        return Ok(Vec::new());
    }
    let grid = TorusGrid::new(cyl.dim_perp(), policy.perp_points);
    let ranges = fiber_band_ranges(cyl, theta, &grid)?;
    let gaps: Vec<Interval> = IntervalSet::from_intervals(&ranges)?
        .gaps()
        .into_iter()
        .map(|(lo, hi)| Interval { lo, hi })
        .filter(|g| g.len() > 2.0 * policy.delta_margin)
        .collect();
    if gaps.is_empty() {
        return Ok(Vec::new());
    }

    let r = policy.r0;
    let small = eigvalsh(&truncated_fiber(cyl, q, theta, &Window::new(cyl, r), true)?)?;
    let big_window = Window::new(cyl, 2 * r);
    let big = eigh(&truncated_fiber(cyl, q, theta, &big_window, true)?, true)?;
    let vectors = big.vectors.expect("vectors requested");

    let mut out = Vec::new();
    for (k, &x) in big.values.iter().enumerate() {
        let Some(gap) = gaps
            .iter()
            .find(|g| x > g.lo + policy.delta_margin && x < g.hi - policy.delta_margin)
        else {
            continue;
        };
        let change = small
            .iter()
            .map(|y| (y - x).abs())
            .fold(f64::INFINITY, f64::min);
        if change >= policy.tol_window {
            continue;
        }
        let inner_weight: f64 = big_window
            .sites()
            .zip(&vectors[k])
            .filter(|((_, n), _)| n.iter().all(|c| c.unsigned_abs() as usize <= r))
            .map(|(_, z)| z.norm_sqr())
            .sum();
        if inner_weight < MIN_INNER_WEIGHT {
            continue;
        }
        out.push(GapState {
            theta: theta.to_vec(),
            value: x,
            change,
            gap: *gap,
            inner_weight,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cylinder, load_and_validate};

    fn load(text: &str) -> (CylinderModel, GuidedPotential) {
        let spec = load_and_validate(text).unwrap().spec;
        (build_cylinder(&spec), GuidedPotential::from_spec(&spec))
    }

    #[test]
    fn square_lattice_has_no_gaps() {
        let (cyl, q) = load(
            r#"{"dim_total": 2, "dim_guided": 1,
                "vertices": [{"id": "v", "W": 0.0}],
                "edges": [{"from": "v", "to": "v", "index": [1, 0]},
                          {"from": "v", "to": "v", "index": [0, 1]}],
                "guided_potential": [{"vertex": "v", "shift": [0], "Q": 3.0}]}"#,
        );
        let policy = ConvergencePolicy::for_model(&cyl, &q, 8.0);
        assert!(gap_states(&cyl, &q, &[0.0], &policy).unwrap().is_empty());
        assert!(gap_states(&cyl, &GuidedPotential::empty(), &[0.0], &policy)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn gapped_chain_pulls_state_into_gap() {
        let (cyl, q) = load(
            r#"{"dim_total": 2, "dim_guided": 1,
                "vertices": [{"id": "a", "W": 0.0}, {"id": "b", "W": 12.0}],
                "edges": [{"from": "a", "to": "b", "index": [0, 0]},
                          {"from": "b", "to": "a", "index": [1, 0]},
                          {"from": "a", "to": "a", "index": [0, 1]},
                          {"from": "b", "to": "b", "index": [0, 1]}],
                "guided_potential": [{"vertex": "b", "shift": [0], "Q": 5.0}]}"#,
        );
        let policy = ConvergencePolicy::for_model(&cyl, &q, 20.0);
        let states = gap_states(&cyl, &q, &[0.0], &policy).unwrap();
        assert_eq!(states.len(), 1);
        let s = &states[0];
        assert!(s.value > s.gap.lo && s.value < s.gap.hi);
        assert!(s.change < 1e-8);
    }
}
