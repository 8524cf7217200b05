//! Periodic graph descriptions and the cylinder quotient.
//!
//! A periodic graph is described abstractly: a finite set of fundamental
//! vertices, one representative per unoriented edge with an integer index
//! vector `τ ∈ Z^d̃`, and an optional guided potential. The first `d`
//! coordinates of every index are the guided (periodic) directions; the
//! remaining `d̃ − d` coordinates run along the cylinder.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub id: String,
    #[serde(rename = "W")]
    pub potential: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    pub index: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuidedEntrySpec {
    pub vertex: String,
    pub shift: Vec<i64>,
    #[serde(rename = "Q")]
    pub value: f64,
}

/// Declarative periodic graph, exactly as read from a graph document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicGraphSpec {
    pub dim_total: usize,
    pub dim_guided: usize,
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub guided_potential: Vec<GuidedEntrySpec>,
}

/// A validated spec together with the non-fatal diagnostics found on the way.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub spec: PeriodicGraphSpec,
    pub warnings: Vec<String>,
}

/// Parses a graph document and checks every structural invariant.
pub fn load_and_validate(text: &str) -> Result<LoadedGraph> {
    let spec: PeriodicGraphSpec =
        serde_json::from_str(text).map_err(|e| Error::MalformedDocument {
            path: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
    let warnings = spec.validate()?;
    for w in &warnings {
        warn!("{w}");
    }
    Ok(LoadedGraph { spec, warnings })
}

impl PeriodicGraphSpec {
    pub fn dim_perp(&self) -> usize {
        self.dim_total - self.dim_guided
    }

    /// Checks all invariants; returns warnings for legal but suspicious input.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if self.dim_total < 2 || self.dim_guided < 1 || self.dim_guided >= self.dim_total {
            return Err(Error::BadDimensions {
                dim_total: self.dim_total,
                dim_guided: self.dim_guided,
            });
        }
        if self.vertices.is_empty() {
            return Err(Error::MalformedDocument {
                path: "vertices".into(),
                message: "at least one vertex is required".into(),
            });
        }

        let mut ids = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if ids.insert(v.id.as_str(), i).is_some() {
                return Err(Error::DuplicateVertexId(v.id.clone()));
            }
            if !v.potential.is_finite() {
                return Err(Error::MalformedDocument {
                    path: format!("vertices[{i}].W"),
                    message: "potential must be finite".into(),
                });
            }
        }

        for (i, e) in self.edges.iter().enumerate() {
            if e.index.len() != self.dim_total {
                return Err(Error::MalformedDocument {
                    path: format!("edges[{i}].index"),
                    message: format!(
                        "expected {} components, found {}",
                        self.dim_total,
                        e.index.len()
                    ),
                });
            }
            for end in [&e.from, &e.to] {
                if !ids.contains_key(end.as_str()) {
                    return Err(Error::DanglingEdgeEndpoint {
                        edge: i,
                        vertex: end.clone(),
                    });
                }
            }
            if e.from == e.to && e.index.iter().all(|&c| c == 0) {
                warnings.push(format!(
                    "edges[{i}] is a loop at `{}` with zero index; it raises the degree but \
                     contributes nothing to any fiber operator",
                    e.from
                ));
            }
        }

        let mut seen = BTreeSet::new();
        for (i, q) in self.guided_potential.iter().enumerate() {
            if !ids.contains_key(q.vertex.as_str()) {
                return Err(Error::MalformedDocument {
                    path: format!("guided_potential[{i}].vertex"),
                    message: format!("unknown vertex `{}`", q.vertex),
                });
            }
            if q.shift.len() != self.dim_perp() {
                return Err(Error::MalformedDocument {
                    path: format!("guided_potential[{i}].shift"),
                    message: format!(
                        "expected {} components, found {}",
                        self.dim_perp(),
                        q.shift.len()
                    ),
                });
            }
            if q.value.is_nan() || q.value <= 0.0 || !q.value.is_finite() {
                return Err(Error::NonPositiveQ {
                    entry: i,
                    value: q.value,
                });
            }
            if !seen.insert((q.vertex.as_str(), q.shift.clone())) {
                return Err(Error::DuplicateQEntry {
                    entry: i,
                    vertex: q.vertex.clone(),
                    shift: q.shift.clone(),
                });
            }
        }
        Ok(warnings)
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }
}

/// One orientation of a quotient edge, with its index split into the guided
/// part `tau_par` and the cylinder part `tau_perp`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientedEdge {
    pub tail: usize,
    pub head: usize,
    pub tau_par: Vec<i64>,
    pub tau_perp: Vec<i64>,
    pub is_bridge: bool,
}

impl OrientedEdge {
    /// Loop on the cylinder: same fundamental vertex, no perpendicular shift.
    pub fn is_cylinder_loop(&self) -> bool {
        self.tail == self.head && self.tau_perp.iter().all(|&c| c == 0)
    }

    pub fn full_index(&self) -> Vec<i64> {
        self.tau_par
            .iter()
            .chain(self.tau_perp.iter())
            .copied()
            .collect()
    }
}

/// Oriented cylinder loops at one fundamental vertex.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LoopStats {
    /// `tau_par` of every oriented bridge-loop (count is `β_jj`).
    pub bridge_loops: Vec<Vec<i64>>,
    /// Number of oriented loops with zero index (`κ_jj`).
    pub zero_loops: usize,
}

impl LoopStats {
    pub fn bridge_loop_count(&self) -> usize {
        self.bridge_loops.len()
    }
}

/// The cylinder `Γ / Z^d` with all combinatorial statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderModel {
    pub dim_total: usize,
    pub dim_guided: usize,
    pub ids: Vec<String>,
    /// Periodic potential `W` per fundamental vertex.
    pub potential: Vec<f64>,
    /// All forward orientations in input order, then all reversed ones.
    pub oriented_edges: Vec<OrientedEdge>,
    pub degrees: Vec<usize>,
    pub bridge_counts: Vec<usize>,
    pub beta_plus: usize,
    pub loop_stats: Vec<LoopStats>,
    /// Number of unoriented quotient edges `#E_*`.
    pub edge_count: usize,
    /// Quotient loops (`from == to`, any index), each counted once.
    pub quotient_loop_count: usize,
}

pub fn build_cylinder(spec: &PeriodicGraphSpec) -> CylinderModel {
    let d = spec.dim_guided;
    let nu = spec.vertices.len();
    let ids: Vec<String> = spec.vertices.iter().map(|v| v.id.clone()).collect();
    let lookup: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();

    let split = |tail: usize, head: usize, tau: &[i64]| {
        let tau_par = tau[..d].to_vec();
        let is_bridge = tau_par.iter().any(|&c| c != 0);
        OrientedEdge {
            tail,
            head,
            tau_par,
            tau_perp: tau[d..].to_vec(),
            is_bridge,
        }
    };

    let mut forward = Vec::with_capacity(spec.edges.len());
    let mut reversed = Vec::with_capacity(spec.edges.len());
    for e in &spec.edges {
        let u = lookup[e.from.as_str()];
        let v = lookup[e.to.as_str()];
        let neg: Vec<i64> = e.index.iter().map(|c| -c).collect();
        forward.push(split(u, v, &e.index));
        reversed.push(split(v, u, &neg));
    }
    let mut oriented_edges = forward;
    oriented_edges.extend(reversed);

    let mut degrees = vec![0; nu];
    let mut bridge_counts = vec![0; nu];
    let mut loop_stats = vec![LoopStats::default(); nu];
    for e in &oriented_edges {
        degrees[e.tail] += 1;
        if e.is_bridge {
            bridge_counts[e.tail] += 1;
        }
        if e.is_cylinder_loop() {
            if e.is_bridge {
                loop_stats[e.tail].bridge_loops.push(e.tau_par.clone());
            } else {
                loop_stats[e.tail].zero_loops += 1;
            }
        }
    }

    CylinderModel {
        dim_total: spec.dim_total,
        dim_guided: d,
        ids,
        potential: spec.vertices.iter().map(|v| v.potential).collect(),
        oriented_edges,
        beta_plus: bridge_counts.iter().copied().max().unwrap_or(0),
        degrees,
        bridge_counts,
        loop_stats,
        edge_count: spec.edges.len(),
        quotient_loop_count: spec.edges.iter().filter(|e| e.from == e.to).count(),
    }
}

/// Degree, bridge count and loop statistics seen from one cylinder vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalStats {
    pub degree: usize,
    pub bridges: usize,
    pub bridge_loops: usize,
    pub zero_loops: usize,
}

impl CylinderModel {
    pub fn nu(&self) -> usize {
        self.ids.len()
    }

    pub fn dim_perp(&self) -> usize {
        self.dim_total - self.dim_guided
    }

    /// Degree in the bridge-deleted cylinder, `κ_v − β_v`.
    pub fn modified_degree(&self, v: usize) -> usize {
        self.degrees[v] - self.bridge_counts[v]
    }

    /// Copy with `W` replaced by `W − shift`.
    pub fn with_potential_shift(&self, shift: f64) -> CylinderModel {
        let mut out = self.clone();
        for w in &mut out.potential {
            *w -= shift;
        }
        out
    }

    /// Walks the cylinder edges leaving `(vertex, shift)` and counts them.
    pub fn local_stats(&self, vertex: usize, shift: &[i64]) -> LocalStats {
        let mut stats = LocalStats {
            degree: 0,
            bridges: 0,
            bridge_loops: 0,
            zero_loops: 0,
        };
        for e in self.oriented_edges.iter().filter(|e| e.tail == vertex) {
            stats.degree += 1;
            if e.is_bridge {
                stats.bridges += 1;
            }
            let target: Vec<i64> = shift.iter().zip(&e.tau_perp).map(|(a, b)| a + b).collect();
            if e.head == vertex && target == shift {
                if e.is_bridge {
                    stats.bridge_loops += 1;
                } else {
                    stats.zero_loops += 1;
                }
            }
        }
        stats
    }
}

/// A cylinder vertex carrying a positive value of the guided potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidedSite {
    pub vertex: usize,
    pub shift: Vec<i64>,
    pub value: f64,
}

/// Guided potential sites ordered as `Q_1• ≥ Q_2• ≥ … ≥ Q_p• > 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GuidedPotential {
    sites: Vec<GuidedSite>,
    lookup: BTreeMap<(usize, Vec<i64>), f64>,
}

impl GuidedPotential {
    pub fn from_sites(mut sites: Vec<GuidedSite>) -> Self {
        sites.sort_by(|a, b| {
            b.value
                .total_cmp(&a.value)
                .then_with(|| a.vertex.cmp(&b.vertex))
                .then_with(|| a.shift.cmp(&b.shift))
        });
        let lookup = sites
            .iter()
            .map(|s| ((s.vertex, s.shift.clone()), s.value))
            .collect();
        GuidedPotential { sites, lookup }
    }

    pub fn from_spec(spec: &PeriodicGraphSpec) -> Self {
        let sites = spec
            .guided_potential
            .iter()
            .map(|q| GuidedSite {
                vertex: spec.vertex_index(&q.vertex).expect("validated vertex"),
                shift: q.shift.clone(),
                value: q.value,
            })
            .collect();
        Self::from_sites(sites)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Support size `p`.
    pub fn support_size(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[GuidedSite] {
        &self.sites
    }

    pub fn ordered_values(&self) -> Vec<f64> {
        self.sites.iter().map(|s| s.value).collect()
    }

    pub fn value_at(&self, vertex: usize, shift: &[i64]) -> f64 {
        self.lookup
            .get(&(vertex, shift.to_vec()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self::from_sites(
            self.sites
                .iter()
                .map(|s| GuidedSite {
                    value: s.value * t,
                    ..s.clone()
                })
                .collect(),
        )
    }

    /// Largest `‖n‖_∞` over the support shifts.
    pub fn max_shift_norm(&self) -> usize {
        self.sites
            .iter()
            .flat_map(|s| s.shift.iter())
            .map(|c| c.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// True when all values are pairwise distinct.
    pub fn is_generic(&self) -> bool {
        self.sites.windows(2).all(|w| w[0].value != w[1].value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connectivity {
    pub connected: bool,
    pub quotient_connected: bool,
    pub index_lattice_rank: usize,
    pub elementary_divisors: Vec<i64>,
}

/// The periodic graph is connected iff its quotient is connected and the
/// cycle indices generate all of `Z^d̃`.
pub fn connectivity_check(cyl: &CylinderModel) -> Connectivity {
    let nu = cyl.nu();
    let dim = cyl.dim_total;
    let mut potential: Vec<Option<Vec<i64>>> = vec![None; nu];
    let mut tree_edge = vec![false; cyl.oriented_edges.len()];
    let half = cyl.oriented_edges.len() / 2;
    let partner = |i: usize| if i < half { i + half } else { i - half };

    let mut components = 0;
    for root in 0..nu {
        if potential[root].is_some() {
            continue;
        }
        components += 1;
        potential[root] = Some(vec![0; dim]);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for (i, e) in cyl.oriented_edges.iter().enumerate() {
                if e.tail != u || potential[e.head].is_some() {
                    continue;
                }
                let base = potential[u].as_ref().unwrap();
                let p = base
                    .iter()
                    .zip(e.full_index())
                    .map(|(a, b)| a + b)
                    .collect();
                potential[e.head] = Some(p);
                tree_edge[i] = true;
                tree_edge[partner(i)] = true;
                queue.push_back(e.head);
            }
        }
    }

    // One cycle vector per unoriented non-tree edge.
    let mut cycles: Vec<Vec<i64>> = Vec::new();
    for (i, e) in cyl.oriented_edges.iter().enumerate().take(half) {
        if tree_edge[i] {
            continue;
        }
        let pu = potential[e.tail].as_ref().unwrap();
        let pv = potential[e.head].as_ref().unwrap();
        let c: Vec<i64> = e
            .full_index()
            .iter()
            .enumerate()
            .map(|(k, t)| t + pu[k] - pv[k])
            .collect();
        if c.iter().any(|&x| x != 0) {
            cycles.push(c);
        }
    }

    // Rows are lattice coordinates, columns are cycle vectors.
    let matrix: Vec<Vec<i64>> = (0..dim)
        .map(|k| cycles.iter().map(|c| c[k]).collect())
        .collect();
    let divisors = lattice::elementary_divisors(&matrix);
    let rank = divisors.len();
    let quotient_connected = components == 1;
    Connectivity {
        connected: quotient_connected && rank == dim && divisors.iter().all(|&x| x == 1),
        quotient_connected,
        index_lattice_rank: rank,
        elementary_divisors: divisors,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientStats {
    /// `#E_* − ν + 1` with loops counted once.
    pub betti: i64,
    /// Same count with every quotient loop counted twice.
    pub betti_loops_twice: i64,
    pub edge_count: usize,
    pub loop_count: usize,
    pub kappa: Vec<usize>,
    pub beta_v: Vec<usize>,
    pub beta_plus: usize,
    pub loop_stats: Vec<LoopStats>,
}

pub fn betti_and_stats(cyl: &CylinderModel) -> QuotientStats {
    let nu = cyl.nu() as i64;
    let e = cyl.edge_count as i64;
    let loops = cyl.quotient_loop_count as i64;
    QuotientStats {
        betti: e - nu + 1,
        betti_loops_twice: e + loops - nu + 1,
        edge_count: cyl.edge_count,
        loop_count: cyl.quotient_loop_count,
        kappa: cyl.degrees.clone(),
        beta_v: cyl.bridge_counts.clone(),
        beta_plus: cyl.beta_plus,
        loop_stats: cyl.loop_stats.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = r#"{
        "dim_total": 2, "dim_guided": 1,
        "vertices": [{"id": "v", "W": 0.0}],
        "edges": [
            {"from": "v", "to": "v", "index": [1, 0]},
            {"from": "v", "to": "v", "index": [0, 1]}
        ],
        "guided_potential": [{"vertex": "v", "shift": [0], "Q": 3.0}]
    }"#;

    const CHAIN: &str = r#"{
        "dim_total": 2, "dim_guided": 1,
        "vertices": [{"id": "a", "W": 0.0}, {"id": "b", "W": 0.0}],
        "edges": [
            {"from": "a", "to": "b", "index": [0, 0]},
            {"from": "b", "to": "a", "index": [1, 0]},
            {"from": "a", "to": "a", "index": [0, 1]},
            {"from": "b", "to": "b", "index": [0, 1]}
        ]
    }"#;

    fn square() -> PeriodicGraphSpec {
        load_and_validate(SQUARE).unwrap().spec
    }

    #[test]
    fn square_lattice_loads() {
        let spec = square();
        assert_eq!(spec.dim_total, 2);
        assert_eq!(spec.guided_potential.len(), 1);
    }

    #[test]
    fn rejects_bad_dimensions() {
        let text = SQUARE.replace("\"dim_guided\": 1", "\"dim_guided\": 2");
        assert!(matches!(
            load_and_validate(&text),
            Err(Error::BadDimensions { .. })
        ));
        let mut spec = square();
        spec.dim_total = 1;
        spec.dim_guided = 0;
        assert!(matches!(spec.validate(), Err(Error::BadDimensions { .. })));
    }

    #[test]
    fn rejects_zero_q() {
        let text = SQUARE.replace("\"Q\": 3.0", "\"Q\": 0");
        assert!(matches!(
            load_and_validate(&text),
            Err(Error::NonPositiveQ { entry: 0, .. })
        ));
    }

    #[test]
    fn rejects_duplicates_and_dangling() {
        let mut spec = square();
        spec.vertices.push(VertexSpec {
            id: "v".into(),
            potential: 1.0,
        });
        assert!(matches!(spec.validate(), Err(Error::DuplicateVertexId(_))));

        let mut spec = square();
        spec.edges[1].to = "w".into();
        assert!(matches!(
            spec.validate(),
            Err(Error::DanglingEdgeEndpoint { edge: 1, .. })
        ));

        let mut spec = square();
        let q = spec.guided_potential[0].clone();
        spec.guided_potential.push(q);
        assert!(matches!(
            spec.validate(),
            Err(Error::DuplicateQEntry { entry: 1, .. })
        ));
    }

    #[test]
    fn malformed_document_carries_location() {
        let err = load_and_validate("{\n \"dim_total\": 2,\n \"oops\" }").unwrap_err();
        match err {
            Error::MalformedDocument { path, .. } => assert!(path.contains("line 3")),
            other => panic!("unexpected {other:?}"),
        }
        let text = SQUARE.replace("[1, 0]", "[1, 0, 0]");
        match load_and_validate(&text).unwrap_err() {
            Error::MalformedDocument { path, .. } => assert_eq!(path, "edges[0].index"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_index_loop_warns() {
        let mut spec = square();
        spec.edges.push(EdgeSpec {
            from: "v".into(),
            to: "v".into(),
            index: vec![0, 0],
        });
        let warnings = spec.validate().unwrap();
        assert_eq!(warnings.len(), 1);
        let cyl = build_cylinder(&spec);
        assert_eq!(cyl.degrees[0], 6);
        assert_eq!(cyl.bridge_counts[0], 2);
        assert_eq!(cyl.loop_stats[0].zero_loops, 2);
    }

    #[test]
    fn square_cylinder_statistics() {
        let cyl = build_cylinder(&square());
        assert_eq!(cyl.nu(), 1);
        assert_eq!(cyl.degrees, vec![4]);
        assert_eq!(cyl.bridge_counts, vec![2]);
        assert_eq!(cyl.beta_plus, 2);
        let mut loops = cyl.loop_stats[0].bridge_loops.clone();
        loops.sort();
        assert_eq!(loops, vec![vec![-1], vec![1]]);
        assert_eq!(cyl.loop_stats[0].zero_loops, 0);
    }

    #[test]
    fn orientation_closure_and_degree_identity() {
        for text in [SQUARE, CHAIN] {
            let spec = load_and_validate(text).unwrap().spec;
            let cyl = build_cylinder(&spec);
            assert_eq!(cyl.oriented_edges.len(), 2 * spec.edges.len());
            for e in &cyl.oriented_edges {
                let neg_par: Vec<i64> = e.tau_par.iter().map(|c| -c).collect();
                let neg_perp: Vec<i64> = e.tau_perp.iter().map(|c| -c).collect();
                assert!(cyl.oriented_edges.iter().any(|r| r.tail == e.head
                    && r.head == e.tail
                    && r.tau_par == neg_par
                    && r.tau_perp == neg_perp));
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
    fn chain_has_no_bridge_loops() {
        let cyl = build_cylinder(&load_and_validate(CHAIN).unwrap().spec);
        assert_eq!(cyl.degrees, vec![4, 4]);
        assert_eq!(cyl.bridge_counts, vec![1, 1]);
        for s in &cyl.loop_stats {
            assert_eq!(s.bridge_loop_count(), 0);
            assert_eq!(s.zero_loops, 0);
        }
        let stats = betti_and_stats(&cyl);
        assert_eq!(stats.betti, 3);
    }

    #[test]
    fn local_stats_are_shift_invariant() {
        for text in [SQUARE, CHAIN] {
            let cyl = build_cylinder(&load_and_validate(text).unwrap().spec);
            for v in 0..cyl.nu() {
                let a = cyl.local_stats(v, &[0]);
                let b = cyl.local_stats(v, &[7]);
                let c = cyl.local_stats(v, &[-3]);
                assert_eq!(a, b);
                assert_eq!(a, c);
                assert_eq!(a.degree, cyl.degrees[v]);
                assert_eq!(a.bridges, cyl.bridge_counts[v]);
                assert_eq!(a.bridge_loops, cyl.loop_stats[v].bridge_loop_count());
                assert_eq!(a.zero_loops, cyl.loop_stats[v].zero_loops);
            }
        }
    }

    #[test]
    fn betti_counts() {
        let cyl = build_cylinder(&square());
        let stats = betti_and_stats(&cyl);
        assert_eq!(stats.betti, 2);
        assert_eq!(stats.betti_loops_twice, 4);

        // path quotient: two vertices, one edge, a tree
        let spec = PeriodicGraphSpec {
            dim_total: 2,
            dim_guided: 1,
            vertices: vec![
                VertexSpec {
                    id: "a".into(),
                    potential: 0.0,
                },
                VertexSpec {
                    id: "b".into(),
                    potential: 0.0,
                },
            ],
            edges: vec![EdgeSpec {
                from: "a".into(),
                to: "b".into(),
                index: vec![0, 0],
            }],
            guided_potential: vec![],
        };
        let stats = betti_and_stats(&build_cylinder(&spec));
        assert_eq!(stats.betti, 0);
    }

    #[test]
    fn connectivity() {
        let cyl = build_cylinder(&square());
        let c = connectivity_check(&cyl);
        assert!(c.connected);
        assert_eq!(c.index_lattice_rank, 2);

        let text = SQUARE.replace("[1, 0]", "[2, 0]");
        let cyl = build_cylinder(&load_and_validate(&text).unwrap().spec);
        let c = connectivity_check(&cyl);
        assert!(!c.connected);
        assert!(c.quotient_connected);
        assert_eq!(c.index_lattice_rank, 2);
        assert_eq!(c.elementary_divisors, vec![1, 2]);

        let cyl = build_cylinder(&load_and_validate(CHAIN).unwrap().spec);
        assert!(connectivity_check(&cyl).connected);

        let mut spec = square();
        spec.vertices.push(VertexSpec {
            id: "w".into(),
            potential: 0.0,
        });
        spec.edges.push(EdgeSpec {
            from: "w".into(),
            to: "w".into(),
            index: vec![1, 0],
        });
        spec.edges.push(EdgeSpec {
            from: "w".into(),
            to: "w".into(),
            index: vec![0, 1],
        });
        let c = connectivity_check(&build_cylinder(&spec));
        assert!(!c.quotient_connected);
        assert!(!c.connected);
    }

    #[test]
    fn guided_potential_ordering() {
        let q = GuidedPotential::from_sites(vec![
            GuidedSite {
                vertex: 0,
                shift: vec![1],
                value: 1.0,
            },
            GuidedSite {
                vertex: 0,
                shift: vec![0],
                value: 3.0,
            },
            GuidedSite {
                vertex: 0,
                shift: vec![2],
                value: 2.0,
            },
        ]);
        assert_eq!(q.ordered_values(), vec![3.0, 2.0, 1.0]);
        assert_eq!(q.support_size(), 3);
        assert_eq!(q.value_at(0, &[2]), 2.0);
        assert_eq!(q.value_at(0, &[5]), 0.0);
        assert_eq!(q.max_shift_norm(), 2);
        assert!(q.is_generic());
        assert_eq!(q.scaled(2.0).ordered_values(), vec![6.0, 4.0, 2.0]);
    }
}
