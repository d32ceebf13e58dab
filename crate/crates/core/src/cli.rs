//! Command-line front end. The `nilflow` binary parses [`Cli`] and hands it to
//! [`run`]; everything here is usable from tests without spawning a process.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::{load_algebra, orthogonal_split, AlgebraDocument, ScalarProduct, Splitting, StepTwoAlgebra};
use crate::cartan::{cartan_matrix, compare_at, cross_check, predicted_type, CartanParams, Comparison, Family};
use crate::constructors::{builtin, hr, names};
use crate::dynamics::{
    equilibria, flow_exact, generic_rank, reconstruct_group, ClosedFormFlow, GroupElement,
    MetricBlocks, Trajectory,
};
use crate::error::{Error, Result};
use crate::jmap::{check_pseudo_h, classify_algebra, j_operator};
use crate::linalg;
use crate::spectrum::{williamson_on_orbit, SpectrumReport, Verdict};
use crate::tol::Tolerances;
use crate::AlgebraVector;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "nilflow", version, about = "Stability of geodesic flows on step-two nilpotent Lie groups")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "NILFLOW_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub tol_alg: Option<f64>,
    #[arg(long, global = true)]
    pub tol_rank: Option<f64>,
    #[arg(long, global = true)]
    pub tol_num: Option<f64>,
    #[arg(long, global = true)]
    pub tol_spec: Option<f64>,
    #[arg(long, global = true)]
    pub tol_cluster: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate an algebra and report its class (Carnot, Métivier, H-type).
    Check {
        /// Path to an algebra JSON file, or `builtin:NAME`.
        algebra: String,
        /// Random directions tried when Métivier cannot be certified directly.
        #[arg(long, default_value_t = 64)]
        probes: usize,
    },
    /// Spectrum, Williamson type and stability verdict at `0 + Z` or at `Y`.
    Analyze {
        algebra: String,
        /// Centre element: a basis label or centre/ambient coordinates.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "y", required_unless_present = "y")]
        z: Option<String>,
        /// Ambient coordinates of `Y`; its centre part is analysed.
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
    },
    /// Closed-form Lie-Poisson flow as CSV, optionally with the group curve.
    Simulate {
        algebra: String,
        #[arg(long, allow_hyphen_values = true)]
        y0: String,
        /// Final time; negative values run the flow backwards.
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Reconstruct `q(t)` with this many midpoint steps.
        #[arg(long)]
        group: Option<usize>,
        /// JSON file with metric blocks `g11, g12, g21, g22`.
        #[arg(long)]
        blocks: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Canonical Cartan matrix of so(p, q) and its Williamson type.
    Cartan {
        family: String,
        p: usize,
        q: usize,
        #[arg(long, default_value_t = 0)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Comma-separated parameters; otherwise random generic draws are used.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        h: Option<Vec<f64>>,
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
    /// Indefinite SVD of a matrix CSV and the Heisenberg-Reiter Williamson type.
    Hr {
        phi: PathBuf,
        /// Signature of the target space as `p,q`.
        sig1: String,
        /// Signature of the source space as `p,q`.
        sig2: String,
    },
    /// Built-in example algebras.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    /// Print an entry in the algebra JSON format.
    Emit { name: String },
}

impl Cli {
    pub fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            alg: self.tol_alg.unwrap_or(d.alg),
            rank: self.tol_rank.unwrap_or(d.rank),
            num: self.tol_num.unwrap_or(d.num),
            spec: self.tol_spec.unwrap_or(d.spec),
            cluster: self.tol_cluster.unwrap_or(d.cluster),
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Load `builtin:NAME` or a JSON file.
pub fn resolve_algebra(arg: &str, tol: &Tolerances) -> Result<(StepTwoAlgebra, ScalarProduct)> {
    match arg.strip_prefix("builtin:") {
        Some(name) => builtin(name),
        None => load_algebra(&read_file(Path::new(arg))?, tol),
    }
}

/// Numbers separated by commas, `|` or whitespace, with optional brackets.
pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    s.trim_matches(|c| matches!(c, '(' | ')' | '[' | ']'))
        .split(|c: char| c == ',' || c == '|' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Schema(format!("cannot parse '{t}' as a number")))
        })
        .collect()
}

pub fn parse_signature(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.trim_matches(|c| c == '(' || c == ')').split(',').collect();
    match parts.as_slice() {
        [p, q] => match (p.trim().parse(), q.trim().parse()) {
            (Ok(p), Ok(q)) => Ok((p, q)),
            _ => Err(Error::Schema(format!("bad signature '{s}', expected p,q"))),
        },
        _ => Err(Error::Schema(format!("bad signature '{s}', expected p,q"))),
    }
}

/// Row-major matrix CSV: one row per line, comma-separated columns.
pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_vector)
        .collect::<Result<_>>()?;
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Schema("matrix CSV rows must be non-empty and of equal length".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.6}")
}

fn fmt_matrix(out: &mut String, m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        let cells: Vec<String> = m.row(i).iter().map(|x| format!("{:>10}", fmt_num(*x))).collect();
        let _ = writeln!(out, "  [{}]", cells.join(" "));
    }
}

fn fmt_type(t: (usize, usize, usize)) -> String {
    format!("({},{},{})", t.0, t.1, t.2)
}

fn fmt_eigenvalues(r: &SpectrumReport) -> String {
    r.clusters
        .iter()
        .map(|c| {
            let sign = if c.im < 0.0 { '-' } else { '+' };
            format!("{}{}{}i (x{})", fmt_num(c.re), sign, fmt_num(c.im.abs()), c.multiplicity)
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn header(cli: &Cli, tol: &Tolerances) -> String {
    format!(
        "# nilflow {VERSION} seed={} tol_alg={:e} tol_rank={:e} tol_num={:e} tol_spec={:e} tol_cluster={:e}",
        cli.seed, tol.alg, tol.rank, tol.num, tol.spec, tol.cluster
    )
}

fn envelope(cli: &Cli, tol: &Tolerances, command: &str, report: serde_json::Value) -> String {
    let v = json!({
        "version": VERSION,
        "command": command,
        "seed": cli.seed,
        "tolerances": tol,
        "report": report,
    });
    serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
}

/// Execute one command, writing the report to `out` (or to `--output`).
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let tol = cli.tolerances();
    let text = match &cli.command {
        Command::Check { algebra, probes } => cmd_check(cli, &tol, algebra, *probes)?,
        Command::Analyze { algebra, z, y } => cmd_analyze(cli, &tol, algebra, z.as_deref(), y.as_deref())?,
        Command::Simulate {
            algebra,
            y0,
            t,
            samples,
            group,
            blocks,
            output,
        } => {
            let report = cmd_simulate(cli, &tol, algebra, y0, *t, *samples, *group, blocks.as_deref())?;
            if let Some(path) = output {
                std::fs::write(path, report).map_err(io_err)?;
                return Ok(());
            }
            report
        }
        Command::Cartan {
            family,
            p,
            q,
            l,
            k,
            h,
            trials,
        } => cmd_cartan(cli, &tol, family, *p, *q, *l, *k, h.as_deref(), *trials)?,
        Command::Hr { phi, sig1, sig2 } => cmd_hr(cli, &tol, phi, sig1, sig2)?,
        Command::Catalog { action } => match action {
            CatalogAction::List => names().join("\n") + "\n",
            CatalogAction::Emit { name } => {
                let (alg, product) = builtin(name)?;
                AlgebraDocument::from_parts(&alg, &product).to_json() + "\n"
            }
        },
    };
    out.write_all(text.as_bytes()).map_err(io_err)
}

fn load_split(arg: &str, tol: &Tolerances) -> Result<Splitting> {
    let (alg, product) = resolve_algebra(arg, tol)?;
    orthogonal_split(&alg, &product, tol)
}

fn cmd_check(cli: &Cli, tol: &Tolerances, arg: &str, probes: usize) -> Result<String> {
    let split = load_split(arg, tol)?;
    let class = classify_algebra(&split, probes, cli.seed)?;
    if cli.format == Format::Json {
        return Ok(envelope(
            cli,
            tol,
            "check",
            json!({
                "dim": split.dim(),
                "dim_center": split.dim_z(),
                "signature_v": split.signature_v(),
                "signature_z": split.signature_z(),
                "class": class,
            }),
        ));
    }
    let mut s = header(cli, tol) + "\n";
    let _ = writeln!(s, "algebra: {arg} (dim {})", split.dim());
    let _ = writeln!(
        s,
        "center: dim {}, signature {:?}; complement: dim {}, signature {:?}",
        split.dim_z(),
        split.signature_z(),
        split.dim_v(),
        split.signature_v()
    );
    let _ = writeln!(
        s,
        "carnot: {}, metivier: {}, h_type: {}",
        class.carnot, class.metivier, class.h_type
    );
    let _ = writeln!(
        s,
        "pseudo_h_type: {} (residual {:e})",
        class.pseudo_h_type, class.pseudo_h_residual
    );
    if let Some(w) = &class.witness {
        let name = class
            .witness_label
            .clone()
            .unwrap_or_else(|| format!("{w:?}"));
        let _ = writeln!(s, "metivier: false (witness {name})");
    }
    let _ = writeln!(s, "evidence: {}", class.evidence);
    Ok(s)
}

/// Centre element from a label, centre coordinates, or ambient coordinates.
fn parse_center(split: &Splitting, s: &str) -> Result<DVector<f64>> {
    let labels = split.algebra().labels();
    if let Some(i) = labels.iter().position(|l| l == s.trim()) {
        let mut e = DVector::zeros(split.dim());
        e[i] = 1.0;
        return Ok(e);
    }
    let v = DVector::from_vec(parse_vector(s)?);
    if v.len() == split.dim_z() {
        Ok(split.from_z_coords(&v))
    } else if v.len() == split.dim() {
        Ok(v)
    } else {
        Err(Error::Dim {
            expected: split.dim_z(),
            got: v.len(),
        })
    }
}

#[derive(Debug, Serialize)]
struct AnalyzeReport {
    z: Vec<f64>,
    z_norm: f64,
    j: Vec<Vec<f64>>,
    full: SpectrumReport,
    orbit: SpectrumReport,
    verdict: Verdict,
    orbit_verdict: Verdict,
    pseudo_h_verdict: Option<Verdict>,
    equilibrium_kernel: Vec<Vec<f64>>,
    orbit_dim: usize,
    generic_rank: usize,
    non_generic_kernel: usize,
    generic: bool,
    equilibrium_residual: Option<f64>,
}

/// Verdict from the sign of `<Z, Z>` on pseudo-H-type algebras; null `Z`
/// gives `Indeterminate`.
pub fn pseudo_h_verdict(split: &Splitting, z: &DVector<f64>) -> Verdict {
    let zz = split.product().inner(z, z);
    let scale = z.norm_squared() * split.scale();
    if zz.abs() <= split.tol().num * scale.max(f64::MIN_POSITIVE) {
        Verdict::Indeterminate
    } else if zz > 0.0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    }
}

fn cmd_analyze(cli: &Cli, tol: &Tolerances, arg: &str, z: Option<&str>, y: Option<&str>) -> Result<String> {
    let split = load_split(arg, tol)?;
    let (zvec, yvec) = match (z, y) {
        (Some(z), _) => (parse_center(&split, z)?, None),
        (None, Some(y)) => {
            let y = DVector::from_vec(parse_vector(y)?);
            split.algebra().check_dim(&AlgebraVector::new(y.clone()))?;
            (split.z_part(&y), Some(y))
        }
        (None, None) => return Err(Error::Schema("analyze needs --z or --y".into())),
    };
    let zav = AlgebraVector::new(zvec.clone());
    let j = j_operator(&split, &zav)?;
    let (full, orbit) = williamson_on_orbit(&j, tol)?;
    let kernel = equilibria(&split, &zav)?;
    let rank = linalg::rank(j.matrix(), tol.rank);
    let grank = generic_rank(&split, 16, cli.seed)?;
    let non_generic = kernel.ncols().saturating_sub(split.dim_v() - grank);
    let pseudo = check_pseudo_h(&split)?;
    let report = AnalyzeReport {
        z: zvec.iter().copied().collect(),
        z_norm: split.product().inner(&zvec, &zvec),
        j: rows(j.matrix()),
        verdict: full.verdict,
        orbit_verdict: orbit.verdict,
        full,
        orbit,
        pseudo_h_verdict: pseudo.holds.then(|| pseudo_h_verdict(&split, &zvec)),
        equilibrium_kernel: (0..kernel.ncols())
            .map(|c| kernel.column(c).iter().copied().collect())
            .collect(),
        orbit_dim: rank,
        generic_rank: grank,
        non_generic_kernel: non_generic,
        generic: rank == grank,
        equilibrium_residual: yvec.map(|y| (
            j.matrix() * split.v_coords(&y)).norm()),
    };
    if cli.format == Format::Json {
        return Ok(envelope(cli, tol, "analyze", serde_json::to_value(&report).expect("serializes")));
    }
    let mut s = header(cli, tol) + "\n";
    let zs: Vec<String> = report.z.iter().map(|x| fmt_num(*x)).collect();
    let _ = writeln!(s, "Z = ({}), <Z,Z> = {}", zs.join(", "), fmt_num(report.z_norm));
    let _ = writeln!(s, "j(Z) =");
    fmt_matrix(&mut s, j.matrix());
    let _ = writeln!(s, "eigenvalues: {}", fmt_eigenvalues(&report.full));
    let c = report.full.counts;
    let _ = writeln!(
        s,
        "type {}, verdict {}",
        fmt_type(c.williamson_type()),
        report.verdict
    );
    let _ = writeln!(s, "counts (k_e,k_h,k_f,k_0) = ({},{},{},{}), semisimple: {}", c.k_e, c.k_h, c.k_f, c.k_0, report.full.semisimple);
    let _ = writeln!(
        s,
        "orbit type {}; non-generic kernel directions: {}",
        fmt_type(report.orbit.counts.williamson_type()),
        report.non_generic_kernel
    );
    let _ = writeln!(s, "orbit verdict: {}", report.orbit_verdict);
    if let Some(v) = report.pseudo_h_verdict {
        let _ = writeln!(s, "pseudo-H verdict from <Z,Z>: {v}");
    }
    let _ = writeln!(s, "orbit dimension: {} (generic rank {}, generic: {})", report.orbit_dim, report.generic_rank, report.generic);
    let _ = writeln!(s, "equilibrium kernel: dim {}", kernel.ncols());
    if kernel.ncols() > 0 {
        fmt_matrix(&mut s, &kernel.transpose());
    }
    if let Some(r) = report.equilibrium_residual {
        let _ = writeln!(s, "equilibrium residual |j(Y_z) Y_v| = {r:e}");
    }
    Ok(s)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlocksFile {
    g11: Vec<Vec<f64>>,
    g12: Vec<Vec<f64>>,
    g21: Vec<Vec<f64>>,
    g22: Vec<Vec<f64>>,
}

fn from_rows(r: &[Vec<f64>], shape: (usize, usize), name: &str) -> Result<DMatrix<f64>> {
    if r.len() != shape.0 || r.iter().any(|row| row.len() != shape.1) {
        return Err(Error::Blocks(format!("{name} must be {}x{}", shape.0, shape.1)));
    }
    Ok(DMatrix::from_fn(shape.0, shape.1, |i, j| r[i][j]))
}

pub fn load_blocks(split: &Splitting, text: &str) -> Result<MetricBlocks> {
    let f: BlocksFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let (m, n) = (split.dim_v(), split.dim_z());
    MetricBlocks::new(
        split,
        from_rows(&f.g11, (m, m), "g11")?,
        from_rows(&f.g12, (m, n), "g12")?,
        from_rows(&f.g21, (n, m), "g21")?,
        from_rows(&f.g22, (n, n), "g22")?,
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    cli: &Cli,
    tol: &Tolerances,
    arg: &str,
    y0: &str,
    t_end: f64,
    samples: usize,
    group: Option<usize>,
    blocks: Option<&Path>,
) -> Result<String> {
    let split = load_split(arg, tol)?;
    let y0 = AlgebraVector::from(parse_vector(y0)?);
    split.algebra().check_dim(&y0)?;
    let blocks = match blocks {
        Some(p) => Some(load_blocks(&split, &read_file(p)?)?),
        None => None,
    };
    if samples < 2 {
        return Err(Error::Times);
    }
    let traj: Trajectory = match group {
        None => {
            let times: Vec<f64> = (0..samples)
                .map(|k| t_end * k as f64 / (samples - 1) as f64)
                .collect();
            flow_exact(&split, blocks.as_ref(), &y0, &times)?
        }
        Some(steps) => {
            if t_end == 0.0 {
                return Err(Error::Times);
            }
            let flow = ClosedFormFlow::new(&split, blocks.as_ref(), &y0)?;
            let full = reconstruct_group(&split, &flow, &GroupElement::identity(split.dim()), t_end, steps)?;
            subsample(full, samples)
        }
    };
    if cli.format == Format::Json {
        let report = json!({
            "times": traj.times,
            "states": traj.states.iter().map(|s| s.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
            "group": traj.group_states.as_ref().map(|g| g.iter().map(|q| q.expcoord.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>()),
            "diagnostics": traj.diagnostics,
            "max_energy_drift": traj.max_energy_drift(),
            "max_momentum_drift": traj.max_momentum_drift(),
        });
        return Ok(envelope(cli, tol, "simulate", report));
    }
    let mut buf = header(cli, tol).into_bytes();
    buf.push(b'\n');
    traj.write_csv(&mut buf).map_err(io_err)?;
    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
}

/// Keep `samples` roughly evenly spaced rows, always including both ends.
fn subsample(t: Trajectory, samples: usize) -> Trajectory {
    let n = t.len();
    if samples >= n {
        return t;
    }
    let idx: Vec<usize> = (0..samples)
        .map(|i| ((i * (n - 1)) as f64 / (samples - 1) as f64).round() as usize)
        .collect();
    let pick = |v: &Vec<f64>| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let d = &t.diagnostics;
    Trajectory {
        times: pick(&t.times),
        states: idx.iter().map(|&i| t.states[i].clone()).collect(),
        group_states: t
            .group_states
            .as_ref()
            .map(|g| idx.iter().map(|&i| g[i].clone()).collect()),
        diagnostics: crate::dynamics::Diagnostics {
            hamiltonian: pick(&d.hamiltonian),
            energy_drift: pick(&d.energy_drift),
            momentum_drift: d.momentum_drift.as_ref().map(pick),
            center_drift: pick(&d.center_drift),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_cartan(
    cli: &Cli,
    tol: &Tolerances,
    family: &str,
    p: usize,
    q: usize,
    l: usize,
    k: usize,
    h: Option<&[f64]>,
    trials: usize,
) -> Result<String> {
    let family: Family = family.parse()?;
    let shape = CartanParams::shape(family, p, q, l, k).map_err(|e| match e {
        Error::Params(msg) => Error::Params(format!(
            "{msg}; usage: cartan <D|Dprime|B> P Q --l L --k K [--h h1,h2,.. | --trials N --seed S]"
        )),
        other => other,
    })?;
    let predicted = predicted_type(&shape);
    let mut s = header(cli, tol) + "\n";
    let _ = writeln!(
        s,
        "family {} so({p},{q}) l={l} k={k}, rank {}",
        family.name(),
        shape.rank()
    );
    match h {
        Some(h) => {
            let params = shape.with_h(h.to_vec())?;
            let m = cartan_matrix(&params)?;
            let (cmp, residual) = compare_at(&params, tol)?;
            let computed = match &cmp {
                Comparison::Mismatch { computed } => Some(computed.williamson_type()),
                Comparison::Match => Some(predicted),
                Comparison::Skipped => None,
            };
            if cli.format == Format::Json {
                return Ok(envelope(
                    cli,
                    tol,
                    "cartan",
                    json!({
                        "params": params,
                        "matrix": rows(&m.matrix),
                        "predicted": predicted,
                        "comparison": cmp,
                        "membership_residual": residual,
                    }),
                ));
            }
            let _ = writeln!(s, "matrix ({}x{}):", m.matrix.nrows(), m.matrix.ncols());
            fmt_matrix(&mut s, &m.matrix);
            let _ = writeln!(s, "membership residual {residual:e}");
            match computed {
                Some(c) => {
                    let verdict = if matches!(cmp, Comparison::Match) { "match" } else { "mismatch" };
                    let _ = writeln!(s, "predicted {}; computed {}: {verdict}", fmt_type(predicted), fmt_type(c));
                }
                None => {
                    let _ = writeln!(s, "predicted {}; matrix is rank deficient at this h, comparison skipped", fmt_type(predicted));
                }
            }
        }
        None => {
            let report = cross_check(&shape, trials, cli.seed, tol)?;
            if cli.format == Format::Json {
                return Ok(envelope(cli, tol, "cartan", serde_json::to_value(&report).expect("serializes")));
            }
            let _ = writeln!(
                s,
                "predicted {}; {}/{} match",
                fmt_type(predicted),
                report.matches,
                report.trials
            );
            if report.skipped > 0 {
                let _ = writeln!(s, "skipped (rank deficient): {}", report.skipped);
            }
            for (h, c) in &report.mismatches {
                let _ = writeln!(s, "mismatch at h = {h:?}: computed {}", fmt_type(c.williamson_type()));
            }
            let _ = writeln!(s, "max membership residual {:e}", report.max_membership_residual);
        }
    }
    Ok(s)
}

fn cmd_hr(cli: &Cli, tol: &Tolerances, phi: &Path, sig1: &str, sig2: &str) -> Result<String> {
    let phi = parse_matrix_csv(&read_file(phi)?)?;
    let (sig1, sig2) = (parse_signature(sig1)?, parse_signature(sig2)?);
    let r = hr::indefinite_svd(&phi, sig1, sig2, tol)?;
    let (m1, m2) = phi.shape();
    let w = hr::hr_williamson(&r, m1, m2);
    if cli.format == Format::Json {
        return Ok(envelope(
            cli,
            tol,
            "hr",
            json!({
                "svd": r,
                "basis_a": rows(&r.basis_a),
                "basis_b": rows(&r.basis_b),
                "williamson": w,
            }),
        ));
    }
    let [d1, d2, d3, d4] = r.counts;
    let mut s = header(cli, tol) + "\n";
    let _ = writeln!(s, "(d)= ({d1},{d2},{d3},{d4}), type {}", fmt_type(w.williamson_type));
    let _ = writeln!(s, "rank {}, zero pairs {}", r.rank, w.zero_pairs);
    let _ = writeln!(
        s,
        "residuals: gram A {:e}, gram B {:e}, reconstruction {:e}",
        r.gram_residual_a, r.gram_residual_b, r.reconstruction_residual
    );
    let _ = writeln!(s, "basis A (columns):");
    fmt_matrix(&mut s, &r.basis_a);
    let _ = writeln!(s, "basis B (columns):");
    fmt_matrix(&mut s, &r.basis_b);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("nilflow").chain(args.iter().copied()))
            .map_err(|e| Error::Schema(e.to_string()))?;
        let mut out = Vec::new();
        run(&cli, &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn vectors_and_signatures_parse() {
        assert_eq!(parse_vector("(1,0|1)").unwrap(), vec![1.0, 0.0, 1.0]);
        assert_eq!(parse_vector("1 -2.5").unwrap(), vec![1.0, -2.5]);
        assert!(parse_vector("1,x").is_err());
        assert_eq!(parse_signature("2,1").unwrap(), (2, 1));
        assert!(parse_signature("2").is_err());
    }

    #[test]
    fn matrix_csv_round_trip() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, -0.1, 3.0, 1e-300, 0.0, 2.0]);
        assert_eq!(parse_matrix_csv(&matrix_to_csv(&m)).unwrap(), m);
        assert!(parse_matrix_csv("1,2\n3").is_err());
    }

    #[test]
    fn check_metivier() {
        let s = run_args(&["check", "builtin:metivier5"]).unwrap();
        assert!(s.contains("carnot: true, metivier: true, h_type: false"), "{s}");
    }

    #[test]
    fn check_h3_plus_h3() {
        let s = run_args(&["check", "builtin:h3_plus_h3"]).unwrap();
        assert!(s.contains("metivier: false (witness Z1)"), "{s}");
    }

    #[test]
    fn analyze_examples() {
        let s = run_args(&["analyze", "builtin:metivier5", "--z", "1"]).unwrap();
        assert!(s.contains("type (2,0,0), verdict Stable"), "{s}");
        let s = run_args(&["analyze", "builtin:pseudoH_1_1", "--z", "1"]).unwrap();
        assert!(s.contains("type (0,1,0), verdict Unstable"), "{s}");
        let s = run_args(&["analyze", "builtin:h3_plus_h3", "--z", "Z1"]).unwrap();
        assert!(s.contains("orbit type (1,0,0); non-generic kernel directions: 2"), "{s}");
    }

    #[test]
    fn cartan_examples() {
        let s = run_args(&["cartan", "D", "2", "2", "--l", "1", "--k", "0", "--trials", "8", "--seed", "1"]).unwrap();
        assert!(s.contains("predicted (2,0,0); 8/8 match"), "{s}");
        let s = run_args(&["cartan", "B", "2", "3", "--h", "0.7,1.1"]).unwrap();
        assert!(s.contains("(5x5)") && s.contains("computed (1,1,0): match"), "{s}");
        let e = run_args(&["cartan", "D", "3", "3", "--l", "2", "--k", "0"]).unwrap_err();
        assert_eq!(e.code(), "E_PARAMS");
    }

    #[test]
    fn reports_are_reproducible_and_tagged() {
        let a = run_args(&["--format", "json", "check", "builtin:h3_plus_h3", "--seed", "5"]).unwrap();
        let b = run_args(&["--format", "json", "check", "builtin:h3_plus_h3", "--seed", "5"]).unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["seed"], 5);
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["tolerances"]["spec"], 1e-8);
    }

    #[test]
    fn catalog_emit_reloads() {
        for name in names() {
            let s = run_args(&["catalog", "emit", name]).unwrap();
            let (alg, _) = load_algebra(&s, &Tolerances::default()).unwrap();
            assert_eq!(alg, builtin(name).unwrap().0);
        }
    }
}
