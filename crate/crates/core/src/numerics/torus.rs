use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Uniform grid on the torus `(−π, π]^k`.
///
/// Points are ordered lexicographically by coordinate (first coordinate
/// slowest). Zero is always a grid point; for even `N` so is `π` (as `−π`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    points_per_dim: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, points_per_dim: usize) -> Self {
        assert!(
            points_per_dim >= 1,
            "grid needs at least one point per axis"
        );
        TorusGrid {
            dim,
            points_per_dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points_per_dim as f64
    }

    pub fn coordinate(&self, m: usize) -> f64 {
        let n = self.points_per_dim;
        // for odd N the grid is shifted by half a step so zero stays on it
        2.0 * PI * (m as f64 - (n / 2) as f64) / n as f64
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let n = self.points_per_dim;
        let mut out = vec![0; self.dim];
        for slot in out.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .fold(0, |acc, &m| acc * self.points_per_dim + m)
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .into_iter()
            .map(|m| self.coordinate(m))
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Neighbor along `axis`, wrapping around the torus.
    pub fn neighbor(&self, idx: usize, axis: usize, step: isize) -> usize {
        let n = self.points_per_dim as isize;
        let mut multi = self.multi_index(idx);
        multi[axis] = (multi[axis] as isize + step).rem_euclid(n) as usize;
        self.flat_index(&multi)
    }

    pub fn zero_index(&self) -> usize {
        self.flat_index(&vec![self.points_per_dim / 2; self.dim])
    }
}

/// Maps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusExtrema {
    pub min_value: f64,
    pub argmin: Vec<f64>,
    pub max_value: f64,
    pub argmax: Vec<f64>,
}

/// Off-grid evaluation used to polish a grid extremum.
pub type Refiner<'a> = &'a (dyn Fn(&[f64]) -> Option<f64> + Sync);

/// Extrema of `f` over the grid, optionally polished by one pass of
/// per-axis parabolic interpolation around each grid extremum.
pub fn minimize_on_torus<F>(f: F, grid: &TorusGrid, refine: bool) -> TorusExtrema
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let samples: Vec<Option<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|i| Some(f(&grid.point(i))))
        .collect();
    let eval = |t: &[f64]| Some(f(t));
    let refiner: Option<Refiner> = if refine { Some(&eval) } else { None };
    extrema_from_samples(&samples, grid, refiner).expect("grid is nonempty")
}

/// Extrema over precomputed samples (`None` marks points where the
/// function does not exist). Ties go to the lexicographically first point.
pub fn extrema_from_samples(
    samples: &[Option<f64>],
    grid: &TorusGrid,
    refine: Option<Refiner>,
) -> Option<TorusExtrema> {
    assert_eq!(samples.len(), grid.len());
    let mut imin: Option<usize> = None;
    let mut imax: Option<usize> = None;
    for (i, s) in samples.iter().enumerate() {
        let Some(v) = *s else { continue };
        if imin.is_none_or(|j| v < samples[j].unwrap()) {
            imin = Some(i);
        }
        if imax.is_none_or(|j| v > samples[j].unwrap()) {
            imax = Some(i);
        }
    }
    let (imin, imax) = (imin?, imax?);
    let mut out = TorusExtrema {
        min_value: samples[imin].unwrap(),
        argmin: grid.point(imin),
        max_value: samples[imax].unwrap(),
        argmax: grid.point(imax),
    };

    if let Some(f) = refine {
        if let Some((t, v)) = parabolic_step(samples, grid, imin, 1.0, f) {
            if v < out.min_value {
                out.min_value = v;
                out.argmin = t;
            }
        }
        if let Some((t, v)) = parabolic_step(samples, grid, imax, -1.0, f) {
            if v > out.max_value {
                out.max_value = v;
                out.argmax = t;
            }
        }
    }
    Some(out)
}

/// One parabola per axis through the grid extremum and its two neighbors;
/// `sign = 1` looks for a minimum, `-1` for a maximum.
fn parabolic_step(
    samples: &[Option<f64>],
    grid: &TorusGrid,
    center: usize,
    sign: f64,
    f: &(dyn Fn(&[f64]) -> Option<f64> + Sync),
) -> Option<(Vec<f64>, f64)> {
    if grid.points_per_dim() < 3 {
        return None;
    }
    let h = grid.spacing();
    let f0 = samples[center]?;
    let mut theta = grid.point(center);
    let mut moved = false;
    for (axis, coord) in theta.iter_mut().enumerate() {
        let (Some(fm), Some(fp)) = (
            samples[grid.neighbor(center, axis, -1)],
            samples[grid.neighbor(center, axis, 1)],
        ) else {
            continue;
        };
        let curvature = sign * (fm - 2.0 * f0 + fp);
        if curvature <= 0.0 {
            continue;
        }
        let s = 0.5 * h * sign * (fm - fp) / curvature;
        if s != 0.0 && s.is_finite() {
            *coord = wrap_angle(*coord + s.clamp(-h, h));
            moved = true;
        }
    }
    if !moved {
        return None;
    }
    let v = f(&theta)?;
    v.is_finite().then_some((theta, v))
}
