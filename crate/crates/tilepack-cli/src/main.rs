//! Command line driver: inspect substitution rules, subdivide patches,
//! circle-pack buffered complexes, extract aggregate shapes, and tabulate
//! shape convergence.

use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tilepack::affine::{rule_kappa, TriangulationScheme};
use tilepack::complex::{check_intersection_condition, weld};
use tilepack::io::{
    atomic_write, complex_doc, kappa_csv, packing_doc, series_csv, to_json_pretty, ShapeDoc,
};
use tilepack::packing::PackMode;
use tilepack::patch::expand_prototile;
use tilepack::render::{render_complex, render_packing, render_shapes};
use tilepack::rules::{
    find_special_configuration, incidence_with_exponent, load_rule_source, validate_rule,
    SubstitutionRule, BUILTIN_NAMES,
};
use tilepack::series::{packed_aggregate, shape_convergence, SeriesParams};

#[derive(Parser)]
#[command(
    name = "tilepack",
    about = "Substitution tilings, circle packings, and aggregate shape convergence",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect and check substitution rules.
    Rules {
        #[command(subcommand)]
        command: RulesCommand,
    },
    /// Subdivide a prototile and write the welded complex.
    Subdivide(SubdivideArgs),
    /// Circle-pack a buffered subdivision patch.
    Pack(PackArgs),
    /// Extract the packed aggregate shape and its distance to the
    /// euclidean prototile.
    Shape(ShapeArgs),
    /// Tabulate shape convergence across subdivision levels.
    Converge(ConvergeArgs),
    /// Draw a euclidean subdivision patch as SVG.
    Render(RenderArgs),
}

#[derive(Subcommand)]
enum RulesCommand {
    /// List built-in rules.
    List,
    /// Check a rule's geometric consistency.
    Validate {
        #[arg(long)]
        rule: String,
        /// Geometric tolerance for the checks.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Compute the piecewise-affine dilatation bound kappa.
    Kappa {
        #[arg(long)]
        rule: String,
        /// Write the per-triangle table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check incidence primitivity and search for a special
    /// configuration (two same-type children related by a rotation that
    /// is not 0 or pi).
    CheckAssumption {
        #[arg(long)]
        rule: String,
        /// Deepest subdivision level searched.
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
    },
}

#[derive(Args)]
struct SubdivideArgs {
    #[arg(long)]
    rule: String,
    #[arg(long)]
    depth: usize,
    /// Prototile to subdivide.
    #[arg(long, default_value_t = 0)]
    prototile: usize,
    /// Write the welded complex as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write an SVG drawing.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Lineage path (comma-separated child indices) whose descendants are
    /// highlighted in the SVG.
    #[arg(long)]
    highlight: Option<String>,
    /// Also run the pairwise tile intersection check.
    #[arg(long, default_value_t = false)]
    check: bool,
}

#[derive(Args, Clone, Copy)]
struct PackingFlags {
    /// Buffer levels around the aggregate.
    #[arg(long, default_value_t = 2)]
    buffer: usize,
    /// Refinement passes applied to the fan triangulation.
    #[arg(long, default_value_t = 1)]
    hex_depth: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Euclid)]
    mode: ModeArg,
    /// Max allowed interior angle-sum error.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Host prototile whose subdivisions are packed.
    #[arg(long, default_value_t = 0)]
    prototile: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Maximal packing of the hyperbolic disc. Shapes read from disc
    /// coordinates carry the ambient metric distortion, so prefer euclid
    /// when measuring convergence.
    Disc,
    /// Euclidean packing with prescribed boundary radii; the default, and
    /// the right frame for comparing aggregate shapes to prototiles.
    Euclid,
}

impl ModeArg {
    fn mode(self) -> PackMode {
        match self {
            ModeArg::Disc => PackMode::DiscMaximal,
            ModeArg::Euclid => PackMode::EuclideanBoundary { boundary_radius: None },
        }
    }
}

impl PackingFlags {
    fn params(&self) -> SeriesParams {
        SeriesParams {
            host_prototile: self.prototile,
            buffer: self.buffer,
            hex_depth: self.hex_depth,
            mode: self.mode.mode(),
            tol: self.tol,
            ..SeriesParams::default()
        }
    }
}

#[derive(Args)]
struct PackArgs {
    #[arg(long)]
    rule: String,
    /// Subdivision level of the aggregate.
    #[arg(long)]
    depth: usize,
    #[command(flatten)]
    flags: PackingFlags,
    /// Write the packing as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write an SVG drawing of the packed complex.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Draw the circles themselves, not just tile outlines.
    #[arg(long, default_value_t = false)]
    circles: bool,
}

#[derive(Args)]
struct ShapeArgs {
    #[arg(long)]
    rule: String,
    #[arg(long)]
    depth: usize,
    #[command(flatten)]
    flags: PackingFlags,
    /// Write the normalized shape and target as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a side-by-side SVG of target and aggregate.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long)]
    rule: String,
    /// Deepest subdivision level in the series.
    #[arg(long)]
    n_max: usize,
    #[command(flatten)]
    flags: PackingFlags,
    /// Write the series as CSV (also printed to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    rule: String,
    #[arg(long)]
    depth: usize,
    #[arg(long, default_value_t = 0)]
    prototile: usize,
    #[arg(long)]
    highlight: Option<String>,
    #[arg(long)]
    svg: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Rules { command } => rules_command(command),
        Command::Subdivide(args) => subdivide_command(args),
        Command::Pack(args) => pack_command(args),
        Command::Shape(args) => shape_command(args),
        Command::Converge(args) => converge_command(args),
        Command::Render(args) => render_command(args),
    }
}

fn load(rule: &str) -> Result<SubstitutionRule> {
    load_rule_source(rule).context("stage rules::load_rule")
}

fn parse_highlight(
    arg: Option<&str>,
    complex: &tilepack::complex::TileComplex,
) -> Result<BTreeSet<usize>> {
    let Some(arg) = arg else {
        return Ok(BTreeSet::new());
    };
    let path: Vec<usize> = arg
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .context("stage cli::parse_highlight")?;
    Ok(complex
        .tiles
        .iter()
        .enumerate()
        .filter(|(_, t)| t.lineage.len() >= path.len() && t.lineage[..path.len()] == path[..])
        .map(|(i, _)| i)
        .collect())
}

fn rules_command(command: RulesCommand) -> Result<()> {
    match command {
        RulesCommand::List => {
            for name in BUILTIN_NAMES {
                let rule = load(name)?;
                let corners: Vec<String> = rule
                    .prototiles
                    .iter()
                    .map(|p| p.combinatorial_corners.len().to_string())
                    .collect();
                println!(
                    "{name}: {} prototiles (corners {}), {} children of prototile 0",
                    rule.prototiles.len(),
                    corners.join("/"),
                    rule.children[0].len()
                );
            }
            Ok(())
        }
        RulesCommand::Validate { rule, tol } => {
            let r = load(&rule)?;
            let report = validate_rule(&r, tol);
            for (p, rep) in report.per_prototile.iter().enumerate() {
                let issues = rep.shape_violations.len()
                    + rep.containment_violations.len()
                    + rep.overlap_violations.len()
                    + rep.corner_violations.len();
                println!(
                    "prototile {p} ({}): area residual {:.3e}, {issues} issues",
                    r.prototiles[p].label, rep.area_residual
                );
                for v in rep
                    .shape_violations
                    .iter()
                    .chain(&rep.containment_violations)
                    .chain(&rep.overlap_violations)
                    .chain(&rep.corner_violations)
                {
                    println!("  - {v}");
                }
            }
            if !report.passed() {
                bail!("stage rules::validate_rule: rule {rule} failed validation");
            }
            println!("rule {rule} is consistent at tolerance {tol:e}");
            Ok(())
        }
        RulesCommand::Kappa { rule, out } => {
            let r = load(&rule)?;
            let report =
                rule_kappa(&r, TriangulationScheme::CentroidFan).context("stage affine::rule_kappa")?;
            for p in &report.per_prototile {
                println!(
                    "prototile {} ({}): kappa {:.9}, tutte residual {:.3e}",
                    p.prototile, p.label, p.kappa, p.tutte_residual
                );
            }
            println!("kappa({rule}) = {:.9}", report.kappa);
            if let Some(path) = out {
                atomic_write(&path, kappa_csv(&report).as_bytes())
                    .context("stage io::atomic_write")?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        RulesCommand::CheckAssumption { rule, max_depth } => {
            let r = load(&rule)?;
            let (matrix, exponent) = incidence_with_exponent(&r);
            for (i, row) in matrix.iter().enumerate() {
                println!("incidence[{i}] = {row:?}");
            }
            match exponent {
                Some(k) => println!("incidence matrix is primitive (positive at power {k})"),
                None => println!("incidence matrix is NOT primitive"),
            }
            let config = find_special_configuration(&r, max_depth);
            match &config {
                Some(c) => {
                    let angle = c.relating_map.factor.arg();
                    println!(
                        "special configuration: prototile {} at depth {}, paths {:?} vs {:?}, rotation {:.6} rad",
                        c.host_prototile, c.depth, c.path_p, c.path_q, angle
                    );
                }
                None => println!("no special configuration up to depth {max_depth}"),
            }
            if exponent.is_none() || config.is_none() {
                bail!("stage rules::check_assumption: standing assumption not verified for {rule}");
            }
            println!("standing assumption verified for {rule}");
            Ok(())
        }
    }
}

fn subdivide_command(args: SubdivideArgs) -> Result<()> {
    let rule = load(&args.rule)?;
    let patch = expand_prototile(&rule, args.prototile, args.depth)
        .context("stage patch::subdivide_patch")?;
    let complex = weld(&rule, &patch, None).context("stage complex::weld")?;
    println!(
        "{}: depth {} -> {} tiles, {} vertices, {} edges, euler {}",
        args.rule,
        args.depth,
        complex.tiles.len(),
        complex.vertex_count(),
        complex.edge_count(),
        complex.euler_characteristic()
    );
    if args.check {
        let report = check_intersection_condition(&complex)
            .context("stage complex::check_intersection_condition")?;
        println!(
            "intersection condition: {} pairs checked, {} violations",
            report.pairs_checked,
            report.violations.len()
        );
        for v in report.violations.iter().take(20) {
            println!("  - {v}");
        }
        if !report.passed() {
            bail!("stage complex::check_intersection_condition: violations found");
        }
    }
    if let Some(path) = &args.out {
        let doc = complex_doc(&complex);
        atomic_write(path, to_json_pretty(&doc)?.as_bytes()).context("stage io::atomic_write")?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.svg {
        let highlight = parse_highlight(args.highlight.as_deref(), &complex)?;
        atomic_write(path, render_complex(&complex, &highlight).as_bytes())
            .context("stage io::atomic_write")?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn pack_command(args: PackArgs) -> Result<()> {
    let rule = load(&args.rule)?;
    let params = args.flags.params();
    let pa = packed_aggregate(&rule, args.depth, &params).context("stage series::packed_aggregate")?;
    println!(
        "{}: depth {} buffer {} -> {} tiles packed ({} in aggregate), residual {:.3e}, {} sweep-equivalents",
        args.rule,
        args.depth,
        params.buffer,
        pa.complex.tiles.len(),
        pa.aggregate_tiles,
        pa.packing.residual,
        pa.packing.sweeps
    );
    if let Some(path) = &args.out {
        let doc = packing_doc(
            &pa.pc,
            &pa.packing,
            &rule.name,
            args.depth,
            params.buffer,
            params.mode,
        )
        .context("stage io::packing_doc")?;
        atomic_write(path, to_json_pretty(&doc)?.as_bytes()).context("stage io::atomic_write")?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.svg {
        let highlight: BTreeSet<usize> = pa.boundary.tiles.iter().copied().collect();
        let svg = render_packing(&pa.pc, &pa.packing, &pa.complex, &highlight, args.circles)
            .context("stage render::render_packing")?;
        atomic_write(path, svg.as_bytes()).context("stage io::atomic_write")?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn shape_command(args: ShapeArgs) -> Result<()> {
    let rule = load(&args.rule)?;
    let params = args.flags.params();
    let pa = packed_aggregate(&rule, args.depth, &params).context("stage series::packed_aggregate")?;
    println!(
        "{}: depth {} -> d = {:.6e}, c = {:.6e} (residual {:.3e})",
        args.rule, args.depth, pa.d, pa.c, pa.packing.residual
    );
    if let Some(path) = &args.out {
        let doc = ShapeDoc::new(&rule.name, args.depth, &params, &pa);
        atomic_write(path, to_json_pretty(&doc)?.as_bytes()).context("stage io::atomic_write")?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.svg {
        let svg = render_shapes(&[&pa.target, &pa.normalized], true);
        atomic_write(path, svg.as_bytes()).context("stage io::atomic_write")?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn converge_command(args: ConvergeArgs) -> Result<()> {
    let rule = load(&args.rule)?;
    let params = args.flags.params();
    let series = shape_convergence(&rule, args.n_max, &params);
    let csv = series_csv(&series.rows);
    print!("{csv}");
    if let Some(path) = &args.out {
        atomic_write(path, csv.as_bytes()).context("stage io::atomic_write")?;
        println!("wrote {}", path.display());
    }
    if let Some(note) = &series.failure {
        bail!("stage series::shape_convergence: {note}");
    }
    Ok(())
}

fn render_command(args: RenderArgs) -> Result<()> {
    let rule = load(&args.rule)?;
    let patch = expand_prototile(&rule, args.prototile, args.depth)
        .context("stage patch::subdivide_patch")?;
    let complex = weld(&rule, &patch, None).context("stage complex::weld")?;
    let highlight = parse_highlight(args.highlight.as_deref(), &complex)?;
    atomic_write(&args.svg, render_complex(&complex, &highlight).as_bytes())
        .context("stage io::atomic_write")?;
    println!("wrote {}", args.svg.display());
    Ok(())
}
