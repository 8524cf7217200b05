//! Fiber operators of `H = Δ + W − Q`.
//!
//! Floquet–Bloch reduction in the guided directions turns `H` into a family
//! of operators `H(θ)` on the cylinder. These are realized here on finite
//! windows of the cylinder with Dirichlet truncation: out-of-window couplings
//! are dropped but every diagonal keeps the full infinite-graph degree, so
//! the window matrix is a compression of `H(θ)`.
//!
//! `H(θ)` splits exactly as `h + Δ_b(θ)`: `h` lives on the bridge-deleted
//! cylinder and carries `W − Q`, `Δ_b(θ)` is the magnetic Laplacian of the
//! bridges alone. [`truncated_fiber`] is assembled as that sum so that the
//! splitting holds bit for bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CylinderModel, GuidedPotential, OrientedEdge};
use crate::numerics::HermitianMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiberKind {
    /// Quotient by the full period lattice, `ν × ν`.
    Full,
    /// Fiber `H(θ)` of the cylinder operator.
    Cylinder,
    /// Bridge-deleted cylinder with its own degrees; no `θ` dependence.
    Modified,
    /// Bridges only, degrees `β_v`.
    Bridge,
}

/// Box `‖n‖_∞ ≤ R` of perpendicular shifts. Sites are ordered shift-major
/// (lexicographic in `n`), then by fundamental vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub radius: usize,
    pub dim_perp: usize,
    pub nu: usize,
}

impl Window {
    pub fn new(cyl: &CylinderModel, radius: usize) -> Self {
        Window {
            radius,
            dim_perp: cyl.dim_perp(),
            nu: cyl.nu(),
        }
    }

    fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn shift_count(&self) -> usize {
        self.side().pow(self.dim_perp as u32)
    }

    pub fn size(&self) -> usize {
        self.nu * self.shift_count()
    }

    pub fn contains(&self, shift: &[i64]) -> bool {
        shift
            .iter()
            .all(|c| c.unsigned_abs() as usize <= self.radius)
    }

    pub fn shift(&self, mut block: usize) -> Vec<i64> {
        let side = self.side();
        let mut out = vec![0i64; self.dim_perp];
        for slot in out.iter_mut().rev() {
            *slot = (block % side) as i64 - self.radius as i64;
            block /= side;
        }
        out
    }

    fn block(&self, shift: &[i64]) -> Option<usize> {
        if !self.contains(shift) {
            return None;
        }
        let side = self.side() as i64;
        Some(
            shift
                .iter()
                .fold(0i64, |acc, &c| acc * side + c + self.radius as i64) as usize,
        )
    }

    pub fn index_of(&self, vertex: usize, shift: &[i64]) -> Option<usize> {
        self.block(shift).map(|b| b * self.nu + vertex)
    }

    /// `(vertex, shift)` for every site, in matrix order.
    pub fn sites(&self) -> impl Iterator<Item = (usize, Vec<i64>)> + '_ {
        (0..self.shift_count()).flat_map(move |b| (0..self.nu).map(move |v| (v, self.shift(b))))
    }
}

fn phase(tau: &[i64], theta: &[f64]) -> Complex64 {
    let arg: f64 = tau.iter().zip(theta).map(|(&t, &x)| t as f64 * x).sum();
    Complex64::from_polar(1.0, arg)
}

/// Forward orientations only; reversed partners enter through the
/// Hermitian update in [`HermitianMatrix::add_coupling`].
fn forward_edges(cyl: &CylinderModel) -> &[OrientedEdge] {
    &cyl.oriented_edges[..cyl.oriented_edges.len() / 2]
}

/// `H₀` fiber at a point `θ̃` of the full torus `T^d̃` (`ν × ν`).
pub fn full_fiber(cyl: &CylinderModel, theta_full: &[f64], include_w: bool) -> HermitianMatrix {
    assert_eq!(theta_full.len(), cyl.dim_total);
    let mut m = HermitianMatrix::zeros(cyl.nu());
    for v in 0..cyl.nu() {
        let w = if include_w { cyl.potential[v] } else { 0.0 };
        m.add_diagonal(v, cyl.degrees[v] as f64 + w);
    }
    for e in forward_edges(cyl) {
        m.add_coupling(e.tail, e.head, -phase(&e.full_index(), theta_full));
    }
    m
}

/// Floquet fiber of a cylinder operator at guided quasimomentum `θ` and
/// perpendicular quasimomentum `φ` (`ν × ν`). Phases are formed as the
/// product of the guided and perpendicular factors.
pub fn perp_fiber(
    cyl: &CylinderModel,
    kind: FiberKind,
    theta: &[f64],
    phi: &[f64],
    include_w: bool,
) -> HermitianMatrix {
    assert_eq!(phi.len(), cyl.dim_perp());
    let mut m = HermitianMatrix::zeros(cyl.nu());
    for v in 0..cyl.nu() {
        let w = if include_w { cyl.potential[v] } else { 0.0 };
        let degree = match kind {
            FiberKind::Full | FiberKind::Cylinder => cyl.degrees[v],
            FiberKind::Modified => cyl.modified_degree(v),
            FiberKind::Bridge => cyl.bridge_counts[v],
        };
        m.add_diagonal(v, degree as f64 + w);
    }
    for e in forward_edges(cyl) {
        let keep = match kind {
            FiberKind::Full | FiberKind::Cylinder => true,
            FiberKind::Modified => !e.is_bridge,
            FiberKind::Bridge => e.is_bridge,
        };
        if !keep {
            continue;
        }
        let guided = if e.is_bridge {
            phase(&e.tau_par, theta)
        } else {
            Complex64::new(1.0, 0.0)
        };
        m.add_coupling(e.tail, e.head, -(guided * phase(&e.tau_perp, phi)));
    }
    m
}

fn check_support(q: &GuidedPotential, window: &Window) -> Result<()> {
    match q.sites().iter().find(|s| !window.contains(&s.shift)) {
        Some(s) => Err(Error::SupportOutsideWindow {
            shift: s.shift.clone(),
            radius: window.radius,
        }),
        None => Ok(()),
    }
}

/// Couples `(tail, n)` to `(head, n + τ_⊥)` for every window shift `n`
/// where both ends fit.
fn add_windowed_edges<'a>(
    m: &mut HermitianMatrix,
    window: &Window,
    edges: impl Iterator<Item = &'a OrientedEdge>,
    theta: &[f64],
) {
    for e in edges {
        let z = if e.is_bridge {
            -phase(&e.tau_par, theta)
        } else {
            Complex64::new(-1.0, 0.0)
        };
        for b in 0..window.shift_count() {
            let n = window.shift(b);
            let target: Vec<i64> = n.iter().zip(&e.tau_perp).map(|(a, t)| a + t).collect();
            if let Some(j) = window.index_of(e.head, &target) {
                m.add_coupling(b * window.nu + e.tail, j, z);
            }
        }
    }
}

/// Windowed `h = Δ_m + W − Q[include_q]` on the bridge-deleted cylinder.
pub fn modified_truncated_fiber(
    cyl: &CylinderModel,
    q: &GuidedPotential,
    window: &Window,
    include_q: bool,
) -> Result<HermitianMatrix> {
    if include_q {
        check_support(q, window)?;
    }
    let mut m = HermitianMatrix::zeros(window.size());
    for (i, (v, n)) in window.sites().enumerate() {
        let qv = if include_q { q.value_at(v, &n) } else { 0.0 };
        m.add_diagonal(i, cyl.modified_degree(v) as f64 + cyl.potential[v] - qv);
    }
    add_windowed_edges(
        &mut m,
        window,
        forward_edges(cyl).iter().filter(|e| !e.is_bridge),
        &[],
    );
    Ok(m)
}

/// Windowed bridge Laplacian `Δ_b(θ)`.
pub fn bridge_fiber(cyl: &CylinderModel, theta: &[f64], window: &Window) -> HermitianMatrix {
    assert_eq!(theta.len(), cyl.dim_guided);
    let mut m = HermitianMatrix::zeros(window.size());
    for (i, (v, _)) in window.sites().enumerate() {
        m.add_diagonal(i, cyl.bridge_counts[v] as f64);
    }
    add_windowed_edges(
        &mut m,
        window,
        forward_edges(cyl).iter().filter(|e| e.is_bridge),
        theta,
    );
    m
}

/// Windowed `H(θ) = h + Δ_b(θ)`.
pub fn truncated_fiber(
    cyl: &CylinderModel,
    q: &GuidedPotential,
    theta: &[f64],
    window: &Window,
    include_q: bool,
) -> Result<HermitianMatrix> {
    let h = modified_truncated_fiber(cyl, q, window, include_q)?;
    Ok(h.sum(&bridge_fiber(cyl, theta, window)))
}
