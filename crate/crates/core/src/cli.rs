//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid or unreadable input (or unwritable
//! output), 2 a theorem check failed, 3 window certification exhausted
//! somewhere (takes precedence over 2), 64 usage error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::graph::{
    betti_and_stats, build_cylinder, connectivity_check, load_and_validate, GuidedPotential,
};
use crate::numerics::TorusGrid;
use crate::report::{checks_text, sha256_hex, write_report, ResultBundle, RunConfig};
use crate::spectra::{
    compute_guided_bands, gap_states, h0_spectrum, mu_spectrum, ConvergencePolicy,
};
use crate::svg::render_svg;
use crate::theorems::{
    asymptotics_probe, bandwidth_sum_check, check_bridge_bound, check_delta_profile,
    check_envelope, TheoremReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CHECK: i32 = 2;
pub const EXIT_WINDOW: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

pub const THREADS_ENV: &str = "GUIDED_BANDS_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "guided-bands",
    version,
    about = "Guided spectral bands of periodic graph operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a graph document and print its statistics.
    Validate {
        /// Graph document (JSON).
        file: PathBuf,
    },
    /// Band structure of the unperturbed operator.
    H0Bands(Common),
    /// Guided bands, modified-cylinder eigenvalues and gap states.
    Guided(Common),
    /// Envelope, bridge-bound and bandwidth checks.
    Check(Common),
    /// Large-coupling asymptotics.
    Asymptotics(Common),
    /// Band diagram.
    Plot(Common),
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

#[derive(Debug, Args)]
struct Common {
    /// Graph document (JSON).
    file: PathBuf,
    /// Grid points per torus axis (all tori).
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(4..))]
    grid: u32,
    /// Override for the full torus grid.
    #[arg(long, value_parser = clap::value_parser!(u32).range(4..))]
    grid_full: Option<u32>,
    /// Override for the perpendicular torus grid.
    #[arg(long, value_parser = clap::value_parser!(u32).range(4..))]
    grid_perp: Option<u32>,
    /// Window convergence tolerance.
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    window_tol: f64,
    /// Initial window radius.
    #[arg(long)]
    r0: Option<usize>,
    /// Largest window radius.
    #[arg(long)]
    rmax: Option<usize>,
    /// Essential-floor safety margin.
    #[arg(long, value_parser = positive)]
    margin: Option<f64>,
    /// Largest window matrix dimension.
    #[arg(long, default_value_t = 1600)]
    max_dim: usize,
    /// Coupling constants, ascending, comma separated.
    #[arg(long = "t", default_value = "50,100,200", value_delimiter = ',', value_parser = positive)]
    t: Vec<f64>,
    /// Output directory.
    #[arg(long, default_value = "guided-bands-out")]
    out: PathBuf,
    /// Comma-separated subset of json,csv,txt,svg.
    #[arg(long, default_value = "json,csv,txt,svg", value_delimiter = ',')]
    formats: Vec<String>,
}

fn init_threads() {
    let n = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(0);
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
}

fn run_config(command: &str, c: &Common) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        input: c.file.display().to_string(),
        grid_full: c.grid_full.unwrap_or(c.grid) as usize,
        grid_guided: c.grid as usize,
        grid_perp: c.grid_perp.unwrap_or(c.grid) as usize,
        r0: c.r0,
        r_max: c.rmax,
        tol_window: c.window_tol,
        delta_margin: c.margin,
        max_dim: c.max_dim,
        t_values: if command == "asymptotics" {
            c.t.clone()
        } else {
            Vec::new()
        },
        out_dir: c.out.display().to_string(),
        formats: c.formats.clone(),
    }
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn validate(path: &Path) -> Result<()> {
    let text = read_input(path)?;
    let loaded = load_and_validate(&text)?;
    let spec = &loaded.spec;
    let cyl = build_cylinder(spec);
    let conn = connectivity_check(&cyl);
    let stats = betti_and_stats(&cyl);
    for w in &loaded.warnings {
        println!("warning: {w}");
    }
    println!(
        "valid: dim_total {} dim_guided {} vertices {} edges {} guided sites {}",
        spec.dim_total,
        spec.dim_guided,
        cyl.nu(),
        cyl.edge_count,
        spec.guided_potential.len()
    );
    println!(
        "degrees {:?} bridges {:?} beta_plus {} betti {} (loops twice {})",
        stats.kappa, stats.beta_v, stats.beta_plus, stats.betti, stats.betti_loops_twice
    );
    if !conn.connected {
        println!(
            "warning: periodic graph not connected (quotient connected {}, index rank {}, divisors {:?})",
            conn.quotient_connected, conn.index_lattice_rank, conn.elementary_divisors
        );
    }
    Ok(())
}

/// Runs a computing command and returns the bundle (reports not yet written).
pub fn compute(config: RunConfig) -> Result<ResultBundle> {
    let text = read_input(Path::new(&config.input))?;
    let loaded = load_and_validate(&text)?;
    let spec = &loaded.spec;
    let raw = build_cylinder(spec);
    let connectivity = connectivity_check(&raw);
    let mut warnings = loaded.warnings.clone();
    if !connectivity.connected {
        warnings.push("periodic graph is not connected".into());
    }
    let q = GuidedPotential::from_spec(spec);

    let h0 = h0_spectrum(
        &raw,
        &TorusGrid::new(spec.dim_total, config.grid_full),
        true,
    )?;
    let cyl = raw.with_potential_shift(h0.shift);
    let mut policy = ConvergencePolicy::for_model(&cyl, &q, h0.rho);
    policy.tol_window = config.tol_window;
    policy.max_dim = config.max_dim;
    policy.perp_points = config.grid_perp;
    if let Some(r0) = config.r0 {
        policy.r0 = r0.max(q.max_shift_norm());
    }
    if let Some(r) = config.r_max {
        policy.r_max = r;
    }
    if let Some(m) = config.delta_margin {
        policy.delta_margin = m;
    }
    let guided_grid = TorusGrid::new(spec.dim_guided, config.grid_guided);

    let mut bundle = ResultBundle {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        generated_at_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        input_sha256: sha256_hex(text.as_bytes()),
        warnings,
        connectivity,
        quotient: betti_and_stats(&cyl),
        policy: None,
        h0: None,
        guided: None,
        mu: None,
        gap_states: Vec::new(),
        delta: None,
        asymptotics: None,
        reports: Vec::new(),
        config,
    };
    let command = bundle.config.command.clone();
    if command != "h0-bands" {
        bundle.policy = Some(policy);
    }

    match command.as_str() {
        "h0-bands" => {
            bundle
                .reports
                .push(bandwidth_sum_check(&h0, &bundle.quotient));
        }
        "guided" | "plot" | "check" => {
            let bands = compute_guided_bands(&cyl, &q, &guided_grid, &policy)?;
            let mu = mu_spectrum(&cyl, &q, &policy)?;
            if command == "check" {
                if !bundle.connectivity.connected {
                    bundle.reports.push(TheoremReport::failing(
                        "connectivity",
                        "theorem checks need a connected graph",
                    ));
                }
                bundle.reports.push(check_envelope(&bands, &q, h0.rho));
                bundle
                    .reports
                    .push(check_bridge_bound(&bands, &mu, cyl.beta_plus));
                bundle
                    .reports
                    .push(bandwidth_sum_check(&h0, &bundle.quotient));
            } else {
                for i in 0..guided_grid.len() {
                    bundle
                        .gap_states
                        .extend(gap_states(&cyl, &q, &guided_grid.point(i), &policy)?);
                }
            }
            bundle.guided = Some(bands);
            bundle.mu = Some(mu);
        }
        "asymptotics" => {
            let probe =
                asymptotics_probe(&cyl, &q, &bundle.config.t_values, &guided_grid, &policy)?;
            if !bundle.connectivity.connected {
                bundle.reports.push(TheoremReport::failing(
                    "connectivity",
                    "theorem checks need a connected graph",
                ));
            }
            bundle.reports.push(check_delta_profile(&cyl, &probe.delta));
            bundle.reports.push(probe.report.clone());
            bundle.delta = Some(probe.delta.clone());
            bundle.asymptotics = Some(probe);
        }
        other => unreachable!("unknown command {other}"),
    }
    bundle.h0 = Some(h0);
    Ok(bundle)
}

fn exit_code(bundle: &ResultBundle) -> i32 {
    if bundle.exhausted() {
        EXIT_WINDOW
    } else if !bundle.checks_pass() {
        EXIT_CHECK
    } else {
        EXIT_OK
    }
}

fn execute(command: &str, common: &Common) -> Result<i32> {
    let config = run_config(command, common);
    let dir = PathBuf::from(&config.out_dir);
    let bundle = compute(config)?;
    let written = write_report(&bundle, &dir)?;
    if command == "plot" || bundle.config.formats.iter().any(|f| f == "svg") {
        render_svg(&bundle, &dir)?;
    }
    print!("{}", checks_text(&bundle));
    for p in written {
        log::info!("wrote {}", p.display());
    }
    Ok(exit_code(&bundle))
}

/// Parses `argv` (program name first), runs the command, and returns the
/// process exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Command::Asymptotics(c) = &cli.command {
        if c.t.windows(2).any(|w| w[0] >= w[1]) {
            eprintln!("error: coupling values given to --t must be strictly ascending");
            return EXIT_USAGE;
        }
    }
    init_threads();
    let outcome = match &cli.command {
        Command::Validate { file } => validate(file).map(|_| EXIT_OK),
        Command::H0Bands(c) => execute("h0-bands", c),
        Command::Guided(c) => execute("guided", c),
        Command::Check(c) => execute("check", c),
        Command::Asymptotics(c) => execute("asymptotics", c),
        Command::Plot(c) => execute("plot", c),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT
    })
}
