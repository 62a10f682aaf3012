use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cr_flatness::job::{self, Check, Input, InputFile, JobSpec, PointMap, Report};

const DEFAULT_ORDER: u32 = 6;

#[derive(Parser, Debug)]
#[command(
    name = "crflat",
    version,
    about = "Finite-order pseudosphericality checker for real hypersurfaces in C^{n+1}"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reality, Levi form, signature, integrability, tensor and cross-check.
    Check(Common),
    /// Reality identities of the defining function.
    Reality(Common),
    /// Levi nondegeneracy and signature.
    Levi(Common),
    /// Second-order system whose solutions are the Segre varieties.
    DerivePde(Common),
    /// Compatibility of a derived or user-supplied system.
    Integrability(Common),
    /// Hachtroudi tensor of a user-supplied system.
    Curvature(Common),
    /// Apply `z -> zmap`, `w -> wmap` and print the new defining function.
    Transform(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// CR dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Truncation order of every series.
    #[arg(long)]
    order: Option<u32>,
    /// Complex defining function in z1..zn, z1b..znb, wb.
    #[arg(long, conflicts_with = "graph", allow_hyphen_values = true)]
    theta: Option<String>,
    /// Graphing function of `u = phi(x, y, v)`.
    #[arg(long, allow_hyphen_values = true)]
    graph: Option<String>,
    /// System entry `k1,k2=expr` in x1..xn, y, yx1..yxn; repeatable.
    #[arg(long = "f", value_name = "K1,K2=EXPR", allow_hyphen_values = true)]
    f: Vec<String>,
    /// Key-value input file; flags take precedence.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated checks or `all` (`check` only).
    #[arg(long)]
    checks: Option<String>,
    /// Image of z_k as `k=expr`; repeatable.
    #[arg(long = "zmap", value_name = "K=EXPR", allow_hyphen_values = true)]
    zmap: Vec<String>,
    /// Image of w.
    #[arg(long, allow_hyphen_values = true)]
    wmap: Option<String>,
    /// Emit the JSON report.
    #[arg(long)]
    json: bool,
    /// Include the witness in the text report.
    #[arg(long)]
    witness: bool,
    /// Record per-stage wall-clock times.
    #[arg(long)]
    timings: bool,
}

struct Rejection {
    code: &'static str,
    message: String,
}

fn reject(code: &'static str, message: impl Into<String>) -> Rejection {
    Rejection {
        code,
        message: message.into(),
    }
}

fn default_checks(command: &Command) -> BTreeSet<Check> {
    let list: &[Check] = match command {
        Command::Check(_) => &Check::FULL,
        Command::Reality(_) => &[Check::Reality],
        Command::Levi(_) => &[Check::Levi, Check::Signature],
        Command::DerivePde(_) => &[Check::DerivePde],
        Command::Integrability(_) => &[Check::Integrability],
        Command::Curvature(_) => &[Check::Curvature],
        Command::Transform(_) => &[],
    };
    list.iter().copied().collect()
}

fn build_job(command: &Command, args: &Common) -> Result<JobSpec, Rejection> {
    let file = match &args.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| reject("missing_input", format!("{}: {e}", path.display())))?;
            InputFile::parse(&text)
                .map_err(|e| reject("parse_error", format!("{}: {e}", path.display())))?
        }
        None => InputFile::default(),
    };
    let n = args
        .n
        .or(file.n)
        .ok_or_else(|| reject("missing_input", "the dimension --n is required"))?;
    let order = args.order.or(file.order).unwrap_or(DEFAULT_ORDER);

    let mut system = file.system.clone();
    for entry in &args.f {
        let (pair, expr) = entry.split_once('=').ok_or_else(|| {
            reject(
                "parse_error",
                format!("expected `k1,k2=expr`, found `{entry}`"),
            )
        })?;
        let pair = job::parse_index_pair(pair)
            .ok_or_else(|| reject("parse_error", format!("bad index pair in `{entry}`")))?;
        system.insert(pair, expr.trim().to_string());
    }
    let theta = args.theta.clone().or(if args.graph.is_some() {
        None
    } else {
        file.theta.clone()
    });
    let graph = args.graph.clone().or(if args.theta.is_some() {
        None
    } else {
        file.graph.clone()
    });
    let input = match (theta, graph, system.is_empty()) {
        (Some(t), None, true) => Input::Theta(t),
        (None, Some(g), true) => Input::Graph(g),
        (None, None, false) => Input::System(system),
        (None, None, true) => {
            return Err(reject(
                "missing_input",
                "one of --theta, --graph or --f is required",
            ))
        }
        _ => {
            return Err(reject(
                "invalid_job",
                "give exactly one of a defining function, a graph or a system",
            ))
        }
    };
    if matches!(command, Command::Curvature(_)) && !matches!(input, Input::System(_)) {
        return Err(reject(
            "invalid_job",
            "curvature needs a system given by --f",
        ));
    }

    let checks = match (command, args.checks.as_deref()) {
        (Command::Check(_), Some(list)) => {
            job::parse_checks(list).map_err(|e| reject("invalid_job", e))?
        }
        (Command::Check(_), None) => file
            .checks
            .clone()
            .unwrap_or_else(|| default_checks(command)),
        (_, Some(_)) => return Err(reject("invalid_job", "--checks applies to `check` only")),
        _ => default_checks(command),
    };
    let checks = match &input {
        Input::System(_) if matches!(command, Command::Check(_)) => {
            [Check::Integrability, Check::Curvature]
                .into_iter()
                .collect()
        }
        _ => checks,
    };

    let mut zmap_entries = file.zmap.clone();
    for entry in &args.zmap {
        let (k, expr) = entry
            .split_once('=')
            .ok_or_else(|| reject("parse_error", format!("expected `k=expr`, found `{entry}`")))?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| reject("parse_error", format!("bad index in `{entry}`")))?;
        zmap_entries.insert(k, expr.trim().to_string());
    }
    let wmap = args.wmap.clone().or(file.wmap.clone());
    let transform = if zmap_entries.is_empty() && wmap.is_none() {
        None
    } else {
        Some(point_map(n, zmap_entries, wmap)?)
    };
    if matches!(command, Command::Transform(_)) && transform.is_none() {
        return Err(reject("missing_input", "transform needs --zmap or --wmap"));
    }

    Ok(JobSpec {
        n,
        order,
        input,
        checks,
        transform,
        timings: args.timings,
    })
}

/// Unspecified components default to the identity.
fn point_map(
    n: usize,
    zmap: BTreeMap<usize, String>,
    wmap: Option<String>,
) -> Result<PointMap, Rejection> {
    if let Some(k) = zmap.keys().find(|&&k| k == 0 || k > n) {
        return Err(reject(
            "invalid_map",
            format!("zmap index {k} outside 1..={n}"),
        ));
    }
    Ok(PointMap {
        zmap: (1..=n)
            .map(|k| zmap.get(&k).cloned().unwrap_or_else(|| format!("z{k}")))
            .collect(),
        wmap: wmap.unwrap_or_else(|| "w".into()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Check(a)
        | Command::Reality(a)
        | Command::Levi(a)
        | Command::DerivePde(a)
        | Command::Integrability(a)
        | Command::Curvature(a)
        | Command::Transform(a) => a,
    };
    let report = match build_job(&cli.command, args) {
        Ok(spec) => job::run(&spec),
        Err(r) => Report::rejected(
            args.n.unwrap_or(0),
            args.order.unwrap_or(DEFAULT_ORDER),
            r.code,
            r.message,
        ),
    };
    if let Some(e) = &report.error {
        eprintln!("crflat: {}: {}", e.code, e.message);
    }
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_text(args.witness));
    }
    ExitCode::from(report.exit_code() as u8)
}
