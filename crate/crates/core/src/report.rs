//! Result bundle and its on-disk forms: `report.json`, `bands.csv`,
//! `checks.txt`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{Connectivity, QuotientStats};
use crate::spectra::{BandStructure, ConvergencePolicy, GapState, GuidedBandSet, MuSpectrum};
use crate::theorems::{AsymptoticsProbe, DeltaProfile, TheoremReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub input: String,
    pub grid_full: usize,
    pub grid_guided: usize,
    pub grid_perp: usize,
    pub r0: Option<usize>,
    pub r_max: Option<usize>,
    pub tol_window: f64,
    pub delta_margin: Option<f64>,
    pub max_dim: usize,
    pub t_values: Vec<f64>,
    pub out_dir: String,
    pub formats: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub tool_version: String,
    /// The only field that changes between identical runs.
    pub generated_at_unix: u64,
    pub input_sha256: String,
    pub config: RunConfig,
    pub warnings: Vec<String>,
    pub connectivity: Connectivity,
    pub quotient: QuotientStats,
    pub policy: Option<ConvergencePolicy>,
    pub h0: Option<BandStructure>,
    pub guided: Option<GuidedBandSet>,
    pub mu: Option<MuSpectrum>,
    pub gap_states: Vec<GapState>,
    pub delta: Option<DeltaProfile>,
    pub asymptotics: Option<AsymptoticsProbe>,
    pub reports: Vec<TheoremReport>,
}

impl ResultBundle {
    pub fn exhausted(&self) -> bool {
        self.guided
            .as_ref()
            .is_some_and(|g| g.exhausted_points() > 0)
            || self.mu.as_ref().is_some_and(MuSpectrum::exhausted)
            || self
                .asymptotics
                .as_ref()
                .is_some_and(|a| !a.skipped.is_empty())
    }

    /// All non-informational reports pass.
    pub fn checks_pass(&self) -> bool {
        self.reports.iter().all(|r| r.informational || r.pass)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Rows `kind, theta_1.., j, value` for `H₀` branches, guided curves,
/// unresolved candidates, `μ_j` and gap states.
pub fn bands_csv(bundle: &ResultBundle) -> Result<String> {
    let width = bundle
        .h0
        .as_ref()
        .map_or(0, |h| h.grid.dim())
        .max(bundle.guided.as_ref().map_or(0, |g| g.grid.dim()));
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::io("bands.csv", e.into());
    let mut header = vec!["kind".to_string()];
    header.extend((1..=width).map(|k| format!("theta_{k}")));
    header.extend(["j".to_string(), "value".to_string()]);
    w.write_record(&header).map_err(csv_err)?;

    let mut row = |kind: &str, theta: &[f64], j: usize, value: f64| {
        let mut r = vec![kind.to_string()];
        r.extend((0..width).map(|k| theta.get(k).map_or(String::new(), |&t| num(t))));
        r.push(j.to_string());
        r.push(num(value));
        w.write_record(&r)
    };
    if let Some(h0) = &bundle.h0 {
        for (i, branch) in h0.branches.iter().enumerate() {
            let theta = h0.grid.point(i);
            for (n, &x) in branch.iter().enumerate() {
                row("h0", &theta, n + 1, x).map_err(csv_err)?;
            }
        }
    }
    if let Some(g) = &bundle.guided {
        for c in &g.curves {
            for (j, &x) in c.values.iter().enumerate() {
                row("guided", &c.theta, j + 1, x).map_err(csv_err)?;
            }
            for (k, &x) in c.unresolved.iter().enumerate() {
                row("unresolved", &c.theta, c.values.len() + k + 1, x).map_err(csv_err)?;
            }
        }
    }
    if let Some(mu) = &bundle.mu {
        for (j, &x) in mu.mu.iter().enumerate() {
            row("mu", &[], j + 1, x).map_err(csv_err)?;
        }
    }
    for (k, s) in bundle.gap_states.iter().enumerate() {
        row("gap", &s.theta, k + 1, s.value).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io("bands.csv", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn checks_text(bundle: &ResultBundle) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "input sha256 {}", bundle.input_sha256);
    let _ = writeln!(
        s,
        "connected {} (rank {}, divisors {:?})",
        bundle.connectivity.connected,
        bundle.connectivity.index_lattice_rank,
        bundle.connectivity.elementary_divisors
    );
    for w in &bundle.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    if let Some(h0) = &bundle.h0 {
        let _ = writeln!(
            s,
            "rho {}  normalization shift {}",
            num(h0.rho),
            num(h0.shift)
        );
    }
    if let Some(g) = &bundle.guided {
        for b in &g.bands {
            let _ = writeln!(
                s,
                "guided band {}: [{}, {}]{}",
                b.j,
                num(b.interval.lo),
                num(b.interval.hi),
                if b.complete { "" } else { " (incomplete)" }
            );
        }
        if g.exhausted_points() > 0 {
            let _ = writeln!(
                s,
                "window exhausted at {} grid point(s)",
                g.exhausted_points()
            );
        }
    }
    if !bundle.gap_states.is_empty() {
        let _ = writeln!(
            s,
            "{} gap state(s) found (heuristic)",
            bundle.gap_states.len()
        );
    }
    for r in &bundle.reports {
        let verdict = match (r.pass, r.informational) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (true, true) => "PASS (informational)",
            (false, true) => "FAIL (informational)",
        };
        let _ = writeln!(s, "\n[{}] {verdict}", r.id);
        for rec in &r.records {
            let _ = write!(s, "  {}", rec.label);
            if let Some(j) = rec.j {
                let _ = write!(s, " j={j}");
            }
            if let (Some(c), Some(k)) = (rec.computed, rec.claimed) {
                let _ = write!(
                    s,
                    " computed [{}, {}] within [{}, {}]",
                    num(c.lo),
                    num(c.hi),
                    num(k.lo),
                    num(k.hi)
                );
            }
            if let Some(v) = rec.value {
                let _ = write!(s, " value {}", num(v));
            }
            if let Some(b) = rec.bound {
                let _ = write!(s, " bound {}", num(b));
            }
            let _ = write!(
                s,
                " margin {} {}",
                num(rec.margin),
                if rec.pass { "ok" } else { "FAILED" }
            );
            if let Some(sat) = rec.saturation {
                let _ = write!(s, " saturation {sat:?}");
            }
            if let Some(n) = &rec.note {
                let _ = write!(s, " ({n})");
            }
            let _ = writeln!(s);
        }
        for n in &r.notes {
            let _ = writeln!(s, "  note: {n}");
        }
    }
    s
}

/// Writes the requested formats (`json`, `csv`, `txt`) into `dir`.
pub fn write_report(bundle: &ResultBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let wants = |f: &str| bundle.config.formats.iter().any(|x| x == f);
    let mut written = Vec::new();
    if wants("json") {
        let path = dir.join("report.json");
        let text = serde_json::to_string_pretty(bundle).expect("bundle serializes");
        write_file(&path, text.as_bytes())?;
        written.push(path);
    }
    if wants("csv") {
        let path = dir.join("bands.csv");
        write_file(&path, bands_csv(bundle)?.as_bytes())?;
        written.push(path);
    }
    if wants("txt") {
        let path = dir.join("checks.txt");
        write_file(&path, checks_text(bundle).as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

pub fn read_report(path: &Path) -> Result<ResultBundle> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedDocument {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
