mod verify;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hypchroma::bounds::BoundsReport;
use hypchroma::collar::{color_collar, cylinder_budget};
use hypchroma::formulas::{convexity_threshold, solve_t};
use hypchroma::graph::Ordering;
use hypchroma::net::{run_experiment, NetConfig};
use hypchroma::rotation::{
    face_report, search_triangular_embedding, RotationSystem, SearchOutcome,
};
use hypchroma::surfaces::{
    build_ideal_surface, build_infinite_chain, build_triangle_surface, build_truncated_surface,
    certify_clique, close_surface, CertificateStatus, ChainBlock, CliqueCertificate, GluedSurface,
    SurfaceDescriptor, TriangleMode,
};
use hypchroma::svg;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "hypchroma",
    version,
    about = "Distance colorings of hyperbolic surfaces"
)]
struct Cli {
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true, env = "HYPCHROMA_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Upper and lower bounds for a distance or a genus.
    Bounds(BoundsArgs),
    /// Build a glued surface and emit its descriptor.
    Construct(ConstructArgs),
    /// Re-load an emitted descriptor and audit it.
    Audit(AuditArgs),
    /// Net coloring experiment in a disk of the hyperbolic plane.
    Net(NetArgs),
    /// Run the oracle cross-checks.
    Verify(VerifyArgs),
    /// Trace the faces of a rotation system, or search for a triangular one.
    Faces(FacesArgs),
    /// Slice and color the collar around a short geodesic.
    Collar(CollarArgs),
}

#[derive(Args)]
struct Output {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    genus: Option<i64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ideal,
    Truncated,
    Triangle,
    Closed,
    Chain,
}

#[derive(Args)]
struct ConstructArgs {
    kind: Kind,
    #[arg(long)]
    n: Option<usize>,
    /// Short side length of the semi-regular polygons, or hole length.
    #[arg(long)]
    t: Option<f64>,
    /// Target clique distance; `t` is solved from it.
    #[arg(long)]
    d: Option<f64>,
    /// Rotation system file for triangle and closed surfaces.
    #[arg(long)]
    rotation: Option<PathBuf>,
    /// Equilateral triangles instead of one-holed ones.
    #[arg(long)]
    equilateral: bool,
    #[arg(long, default_value_t = 0)]
    extra_genus: i64,
    /// Chain blocks as `k<N+1>:<file>`, comma separated.
    #[arg(long, value_delimiter = ',')]
    blocks: Vec<String>,
    /// Number of chain blocks to assemble (default: all).
    #[arg(long)]
    prefix: Option<usize>,
    /// Polygons per developed path in the clique certificate.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct AuditArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 4)]
    depth: usize,
}

#[derive(Args)]
struct NetArgs {
    #[arg(long)]
    d: f64,
    #[arg(long, default_value_t = 6.0)]
    radius: f64,
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value = "dsatur")]
    ordering: Ordering,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Record wall time (makes the output non-reproducible).
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Formulas,
    Surfaces,
    Rotations,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    suite: Suite,
    /// Directory holding k4.rot, k7.rot and k12.rot.
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

#[derive(Args)]
struct FacesArgs {
    file: Option<PathBuf>,
    /// Search for a triangular embedding of K_n instead of reading a file.
    #[arg(long, conflicts_with = "file")]
    search: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CollarArgs {
    /// Length of the core geodesic.
    #[arg(long)]
    length: f64,
    #[arg(long)]
    d: f64,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    r0: Option<f64>,
    /// Also report the cylinder color budget for this genus.
    #[arg(long)]
    genus: Option<i64>,
    #[command(flatten)]
    output: Output,
}

/// Usage errors exit with 2, everything else with 1.
enum Failure {
    Usage(String),
    Domain(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.into())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Net(a) => cmd_net(a),
        Command::Verify(a) => verify::run(a.suite, a.data_dir.as_deref()),
        Command::Faces(a) => cmd_faces(a),
        Command::Collar(a) => cmd_collar(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn emit<T: Serialize>(value: &T, output: &Output) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match &output.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn finite_positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!(
            "--{name} must be a positive number, got {x}"
        )))
    }
}

fn cmd_bounds(a: BoundsArgs) -> CmdResult {
    let report = match (a.d, a.genus) {
        (Some(d), None) => BoundsReport::for_distance(finite_positive("d", d)?)?,
        (d, Some(g)) => {
            if g < 2 {
                return Err(usage(format!("--genus must be at least 2, got {g}")));
            }
            let d = d.map(|d| finite_positive("d", d)).transpose()?;
            BoundsReport::for_genus(g, d)?
        }
        (None, None) => return Err(usage("give --d or --genus")),
    };
    emit(&report, &a.output)
}

fn read_rotation(path: &Path) -> anyhow::Result<RotationSystem> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    RotationSystem::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Serialize, Deserialize)]
struct Constructed {
    descriptor: SurfaceDescriptor,
    certificate: Option<CliqueCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chain: Option<serde_json::Value>,
}

/// The fresh audit every emitted surface passes: the descriptor re-parses to
/// the same topology and the clique certificate holds.
fn audit(s: &GluedSurface, depth: usize) -> anyhow::Result<CliqueCertificate> {
    let reparsed = GluedSurface::from_descriptor(&s.descriptor())?;
    anyhow::ensure!(
        reparsed.euler() == s.euler(),
        "descriptor round trip changed the topology"
    );
    let e = s.euler();
    anyhow::ensure!(
        e.connected && e.orientable,
        "surface is not a connected orientable surface"
    );
    let cert = certify_clique(s, depth);
    anyhow::ensure!(
        cert.status == CertificateStatus::Certified,
        "clique certificate {:?} (margin {:?})",
        cert.status,
        cert.margin
    );
    Ok(cert)
}

fn cmd_construct(a: ConstructArgs) -> CmdResult {
    if a.depth < 2 {
        return Err(usage("--depth must be at least 2"));
    }
    let need_n = || a.n.ok_or_else(|| usage("this construction needs --n"));
    let hole = || -> Result<TriangleMode, Failure> {
        Ok(match a.t {
            _ if a.equilateral => TriangleMode::Equilateral,
            Some(t) => TriangleMode::Holed {
                t: finite_positive("t", t)?,
            },
            None => TriangleMode::holed_default(),
        })
    };
    let rotation = || -> Result<RotationSystem, Failure> {
        let path = a
            .rotation
            .as_ref()
            .ok_or_else(|| usage("this construction needs --rotation"))?;
        Ok(read_rotation(path)?)
    };
    let mut chain = None;
    let surface = match a.kind {
        Kind::Ideal => {
            let n = need_n()?;
            build_ideal_surface(n, None)?
        }
        Kind::Truncated => {
            let n = need_n()?;
            let t = match (a.t, a.d) {
                (Some(t), None) => finite_positive("t", t)?,
                (None, Some(d)) => solve_t(n, finite_positive("d", d)?)?,
                _ => return Err(usage("truncated needs exactly one of --t and --d")),
            };
            build_truncated_surface(n, t, None)?
        }
        Kind::Triangle => build_triangle_surface(&rotation()?, hole()?)?,
        Kind::Closed => {
            if a.equilateral {
                return Err(usage("closed surfaces are built from one-holed triangles"));
            }
            if a.extra_genus < 0 {
                return Err(usage("--extra-genus must be non-negative"));
            }
            let block = build_triangle_surface(&rotation()?, hole()?)?;
            close_surface(&block, a.extra_genus)?
        }
        Kind::Chain => {
            let t = match a.t {
                Some(t) => finite_positive("t", t)?,
                None => hypchroma::formulas::default_hole_length(),
            };
            let blocks = parse_blocks(&a.blocks)?;
            let c = build_infinite_chain(&blocks, a.prefix.unwrap_or(blocks.len()), t)?;
            let mut certs = Vec::new();
            for b in blocks.iter().take(c.blocks.len()) {
                let rs = b.system.as_ref().expect("parsed blocks carry a system");
                certs.push(
                    match build_triangle_surface(rs, TriangleMode::Holed { t }) {
                        Ok(s) => Some(audit(&s, a.depth)?),
                        Err(_) => None,
                    },
                );
            }
            chain = Some(serde_json::json!({
                "blocks": c.blocks,
                "prefix_bounds": c.prefix_bounds,
                "lower_bound": c.lower_bound,
                "block_certificates": certs,
            }));
            c.surface.ok_or_else(|| usage("--blocks is empty"))?
        }
    };
    let certificate = match a.kind {
        Kind::Chain => {
            let reparsed = GluedSurface::from_descriptor(&surface.descriptor())?;
            if reparsed.euler() != surface.euler() {
                return Err(anyhow::anyhow!("descriptor round trip changed the topology").into());
            }
            None
        }
        _ => Some(audit(&surface, a.depth)?),
    };
    if let Some(path) = &a.svg {
        std::fs::write(path, svg::render_patch(&surface))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    emit(
        &Constructed {
            descriptor: surface.descriptor(),
            certificate,
            chain,
        },
        &a.output,
    )
}

fn parse_blocks(specs: &[String]) -> Result<Vec<ChainBlock>, Failure> {
    specs
        .iter()
        .map(|spec| {
            let (k, file) = spec
                .split_once(':')
                .ok_or_else(|| usage(format!("block `{spec}` is not of the form k<n>:<file>")))?;
            let n: usize = k
                .strip_prefix('k')
                .and_then(|n| n.parse().ok())
                .filter(|&n| n >= 4)
                .ok_or_else(|| usage(format!("bad block size `{k}`")))?;
            let system = read_rotation(Path::new(file))?;
            Ok(ChainBlock {
                n: n - 1,
                system: Some(system),
            })
        })
        .collect()
}

fn cmd_audit(a: AuditArgs) -> CmdResult {
    let text = std::fs::read_to_string(&a.file)
        .with_context(|| format!("reading {}", a.file.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let descriptor: SurfaceDescriptor = match value.get("descriptor") {
        Some(d) => serde_json::from_value(d.clone())?,
        None => serde_json::from_value(value)?,
    };
    let surface = GluedSurface::from_descriptor(&descriptor)?;
    let certificate = if surface.edge_length().is_finite() {
        Some(audit(&surface, a.depth)?)
    } else {
        None
    };
    emit(
        &serde_json::json!({ "derived": surface.euler(), "certificate": certificate }),
        &Output { out: None },
    )
}

fn cmd_net(a: NetArgs) -> CmdResult {
    let d = finite_positive("d", a.d)?;
    let radius = finite_positive("radius", a.radius)?;
    if let Some(r0) = a.r0 {
        if !(r0 > 0.0 && r0 <= 2.0 * d / 5.0) {
            return Err(usage(format!(
                "--r0 must lie in (0, 2d/5 = {}], got {r0}",
                2.0 * d / 5.0
            )));
        }
    }
    let cfg = NetConfig {
        d,
        radius,
        r0: a.r0,
        seed: a.seed,
        trials: a.trials,
        ordering: a.ordering,
    };
    let start = Instant::now();
    let (mut report, net, coloring) = run_experiment(&cfg)?;
    if a.timing {
        report.wall_time = Some(start.elapsed().as_secs_f64());
    }
    if let Some(path) = &a.svg {
        std::fs::write(path, svg::render_net(&net, &coloring))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    emit(&report, &a.output)?;
    if report.violations > 0 || report.uncovered > 0 {
        return Err(anyhow::anyhow!(
            "{} violations, {} uncovered samples",
            report.violations,
            report.uncovered
        )
        .into());
    }
    Ok(())
}

fn cmd_faces(a: FacesArgs) -> CmdResult {
    let system = match (&a.file, a.search) {
        (Some(path), None) => read_rotation(path)?,
        (None, Some(n)) => match search_triangular_embedding(n, a.seed, a.budget)? {
            SearchOutcome::Found { system, nodes } => {
                eprintln!("found after {nodes} nodes");
                system
            }
            SearchOutcome::NotFound { nodes } => {
                return Err(anyhow::anyhow!(
                    "no triangular embedding of K_{n} within {nodes} nodes"
                )
                .into())
            }
        },
        _ => return Err(usage("give a rotation file or --search n")),
    };
    let report = face_report(&system)?;
    emit(
        &serde_json::json!({ "report": report, "rotation": system.to_string() }),
        &a.output,
    )
}

fn cmd_collar(a: CollarArgs) -> CmdResult {
    let d = finite_positive("d", a.d)?;
    let length = finite_positive("length", a.length)?;
    let eps = a.eps.unwrap_or_else(convexity_threshold);
    let r0 = a.r0.unwrap_or(d / 2.0);
    let coloring = color_collar(length, eps, d, r0)?;
    let budget = a.genus.map(cylinder_budget).transpose()?;
    emit(
        &serde_json::json!({ "cylinder": coloring, "genus_budget": budget }),
        &a.output,
    )
}
