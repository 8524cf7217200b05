//! Brute-force strip operator built straight from the graph document,
//! without the crate's assembly code or eigensolver.

use std::collections::HashMap;

use guided_bands::graph::PeriodicGraphSpec;
use nalgebra::DMatrix;

/// Real symmetric operator on a strip of the periodic graph: `period`
/// cells along each guided axis with periodic wrap, perpendicular shifts in
/// `[−radius, radius]` with couplings leaving the box dropped and the full
/// degree kept on the diagonal.
pub fn supercell(spec: &PeriodicGraphSpec, period: i64, radius: i64) -> DMatrix<f64> {
    let d = spec.dim_guided;
    let ids: HashMap<&str, usize> = spec
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.as_str(), i))
        .collect();

    let mut cells: Vec<Vec<i64>> = vec![vec![]];
    for axis in 0..spec.dim_total {
        let range: Vec<i64> = if axis < d {
            (0..period).collect()
        } else {
            (-radius..=radius).collect()
        };
        cells = cells
            .into_iter()
            .flat_map(|c| range.iter().map(move |&x| [c.clone(), vec![x]].concat()))
            .collect();
    }
    let mut index = HashMap::new();
    for (ci, c) in cells.iter().enumerate() {
        for v in 0..spec.vertices.len() {
            index.insert((v, c.clone()), ci * spec.vertices.len() + v);
        }
    }
    let n = index.len();
    let mut a = DMatrix::<f64>::zeros(n, n);

    let mut degree = vec![0.0; spec.vertices.len()];
    for e in &spec.edges {
        degree[ids[e.from.as_str()]] += 1.0;
        degree[ids[e.to.as_str()]] += 1.0;
    }
    for ((v, c), &i) in &index {
        let q: f64 = spec
            .guided_potential
            .iter()
            .filter(|g| ids[g.vertex.as_str()] == *v && g.shift[..] == c[d..])
            .map(|g| g.value)
            .sum();
        a[(i, i)] += degree[*v] + spec.vertices[*v].potential - q;
    }
    for e in &spec.edges {
        let (u, v) = (ids[e.from.as_str()], ids[e.to.as_str()]);
        for c in &cells {
            let target: Vec<i64> = c
                .iter()
                .zip(&e.index)
                .enumerate()
                .map(|(axis, (x, t))| {
                    if axis < d {
                        (x + t).rem_euclid(period)
                    } else {
                        x + t
                    }
                })
                .collect();
            if target[d..].iter().any(|x| x.abs() > radius) {
                continue;
            }
            let i = index[&(u, c.clone())];
            let j = index[&(v, target)];
            a[(i, j)] -= 1.0;
            a[(j, i)] -= 1.0;
        }
    }
    a
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}
