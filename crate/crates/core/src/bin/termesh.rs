use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use termesh::io_formats::{generate_random_delaunay, write_triangulation, BoundingBox, TriangleFileSet};
use termesh::pipeline::{bench, InputSource, OutputPaths, PipelineConfig};
use termesh::{BackendKind, PhaseBackends};

#[derive(Parser)]
#[command(name = "termesh", version, about = "Polygonal meshes from terminal-edge regions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a polygon mesh from a triangulation.
    Run(RunArgs),
    /// Write a random Delaunay triangulation as a Triangle file set.
    Generate(GenerateArgs),
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["node", "random"]))]
struct RunArgs {
    #[arg(long, requires_all = ["ele", "neigh"])]
    node: Option<PathBuf>,
    #[arg(long, requires = "node")]
    ele: Option<PathBuf>,
    #[arg(long, requires = "node")]
    neigh: Option<PathBuf>,
    #[arg(long, requires = "node")]
    trivertex: Option<PathBuf>,

    /// Number of random points.
    #[arg(long, value_name = "N")]
    random: Option<usize>,
    #[arg(long, default_value_t = BoundingBox::default(), value_name = "X0,Y0,X1,Y1")]
    bbox: BoundingBox,
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// seq, par, or mixed (parallel label and traversal, sequential reparation).
    #[arg(long, default_value = "seq")]
    backend: BackendKind,
    #[arg(long, default_value_t = default_workers())]
    workers: usize,

    /// Polygon mesh output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Fill SVG polygons by vertex count.
    #[arg(long)]
    fill: bool,
    /// JSON stats output.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_name = "N")]
    random: usize,
    #[arg(long, default_value_t = BoundingBox::default(), value_name = "X0,Y0,X1,Y1")]
    bbox: BoundingBox,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes PREFIX.node, .ele, .neigh and .trivertex.
    #[arg(long)]
    prefix: PathBuf,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run(args: RunArgs) -> termesh::Result<()> {
    let input = match (args.node, args.random) {
        (Some(node), _) => InputSource::Files(TriangleFileSet {
            node,
            ele: args.ele.expect("required by clap"),
            neigh: args.neigh.expect("required by clap"),
            trivertex: args.trivertex,
        }),
        (None, Some(n)) => InputSource::Random {
            n,
            bbox: args.bbox,
            seed: args.seed,
        },
        (None, None) => unreachable!("clap requires an input source"),
    };
    if args.workers == 0 {
        return Err(termesh::Error::InvalidInput("--workers must be at least 1".into()));
    }
    let mut config = PipelineConfig::new(input).with_backends(PhaseBackends::new(args.backend, args.workers));
    config.outputs = OutputPaths {
        polymesh: args.out,
        svg: args.svg,
        stats: args.stats,
    };
    config.svg.fill_by_size = args.fill;
    config.repetitions = args.reps as usize;

    let s = bench(&config)?;
    println!(
        "{} vertices, {} triangles -> {} polygons ({} non-simple after traversal, {} reparation rounds)",
        s.input_vertices, s.input_triangles, s.polygons, s.non_simple_after_traversal, s.reparation_rounds
    );
    println!("output: {} vertices, {} edges", s.vertices, s.edges);
    let mean = if s.repetitions > 1 { " (mean)" } else { "" };
    for (name, t) in s.phase_rows().into_iter().chain(s.kernel_rows()) {
        println!("{name:>15}: {t:.6} s{mean}");
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> termesh::Result<()> {
    let tri = generate_random_delaunay(args.random, args.bbox, args.seed)?;
    write_triangulation(&tri, &TriangleFileSet::from_prefix(&args.prefix))?;
    println!("{} vertices, {} triangles", tri.num_vertices(), tri.num_triangles());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Generate(args) => generate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
