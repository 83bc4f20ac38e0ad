//! End-to-end driver: label, traverse, repair, with per-phase timing.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Backend;
use crate::io_formats::{
    generate_random_delaunay, read_triangulation, write_polymesh, write_svg, BoundingBox, SvgOptions,
    TriangleFileSet,
};
use crate::label_phase::{label_kernels, EdgeLabels};
use crate::oracle_ref::canonicalize;
use crate::mesh_core::Triangulation;
use crate::reparation_phase::{repair_all, SplitRecord};
use crate::traversal_phase::{build_polygon_mesh, PolygonMesh};

pub const STATS_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum InputSource {
    Files(TriangleFileSet),
    Random { n: usize, bbox: BoundingBox, seed: u64 },
}

impl InputSource {
    pub fn load(&self) -> Result<Triangulation> {
        match self {
            InputSource::Files(files) => read_triangulation(files),
            InputSource::Random { n, bbox, seed } => generate_random_delaunay(*n, *bbox, *seed),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BackendKind {
    #[default]
    Seq,
    Par,
    /// Parallel labelling and traversal, sequential reparation.
    Mixed,
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seq" => Ok(BackendKind::Seq),
            "par" => Ok(BackendKind::Par),
            "mixed" => Ok(BackendKind::Mixed),
            _ => Err(Error::InvalidInput(format!(
                "unknown backend {s:?} (expected seq, par or mixed)"
            ))),
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Seq => "seq",
            BackendKind::Par => "par",
            BackendKind::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseBackends {
    pub label: Backend,
    pub traversal: Backend,
    pub reparation: Backend,
}

impl PhaseBackends {
    pub fn new(kind: BackendKind, workers: usize) -> Self {
        let par = Backend::parallel(workers);
        match kind {
            BackendKind::Seq => PhaseBackends::default(),
            BackendKind::Par => PhaseBackends {
                label: par,
                traversal: par,
                reparation: par,
            },
            BackendKind::Mixed => PhaseBackends {
                label: par,
                traversal: par,
                reparation: Backend::Sequential,
            },
        }
    }
}

impl fmt::Display for PhaseBackends {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.label, self.traversal, self.reparation)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputPaths {
    pub polymesh: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub stats: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub input: InputSource,
    pub backends: PhaseBackends,
    pub outputs: OutputPaths,
    pub svg: SvgOptions,
    pub repetitions: usize,
}

impl PipelineConfig {
    pub fn new(input: InputSource) -> Self {
        PipelineConfig {
            input,
            backends: PhaseBackends::default(),
            outputs: OutputPaths::default(),
            svg: SvgOptions::default(),
            repetitions: 1,
        }
    }

    pub fn with_backends(mut self, backends: PhaseBackends) -> Self {
        self.backends = backends;
        self
    }
}

/// One flat stats record. Times are seconds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub schema_version: u32,
    pub backends: String,
    pub repetitions: usize,
    pub input_vertices: usize,
    pub input_triangles: usize,
    pub label_time: f64,
    pub traversal_time: f64,
    pub reparation_time: f64,
    /// Sum of the three phase times.
    pub total_time: f64,
    pub label_max_time: f64,
    pub label_seed_time: f64,
    pub label_frontier_time: f64,
    pub seeds: usize,
    pub polygons_after_traversal: usize,
    pub simple_after_traversal: usize,
    pub non_simple_after_traversal: usize,
    pub initial_tips: usize,
    pub initial_repeats: usize,
    /// Includes the final round that found nothing to split.
    pub reparation_rounds: usize,
    pub polygons: usize,
    pub vertices: usize,
    pub edges: usize,
}

impl PhaseStats {
    /// `(name, seconds)` for the three phases followed by the total.
    pub fn phase_rows(&self) -> [(&'static str, f64); 4] {
        [
            ("label", self.label_time),
            ("traversal", self.traversal_time),
            ("reparation", self.reparation_time),
            ("total", self.total_time),
        ]
    }

    pub fn kernel_rows(&self) -> [(&'static str, f64); 3] {
        [
            ("label_max", self.label_max_time),
            ("label_seed", self.label_seed_time),
            ("label_frontier", self.label_frontier_time),
        ]
    }
}

/// Everything one pipeline execution produced.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    /// Final mesh, canonicalized.
    pub mesh: PolygonMesh,
    /// Mesh as produced by the traversal phase, in append order.
    pub traversal_mesh: PolygonMesh,
    /// Labels after reparation, including promoted edges.
    pub labels: EdgeLabels,
    pub splits: Vec<SplitRecord>,
    pub stats: PhaseStats,
}

fn has_repeated_vertex(polygon: &[u32]) -> bool {
    let mut s = polygon.to_vec();
    s.sort_unstable();
    s.windows(2).any(|w| w[0] == w[1])
}

/// Runs the three phases on a triangulation. Validation is not timed.
pub fn run_phases(tri: &Triangulation, backends: PhaseBackends) -> Result<PipelineRun> {
    tri.validate().into_result().map_err(|e| e.in_phase("validate"))?;

    let start = Instant::now();
    let (mut labels, kernels) = label_kernels(tri, backends.label).map_err(|e| e.in_phase("label"))?;
    let label_time = start.elapsed();

    let start = Instant::now();
    let traversal_mesh =
        build_polygon_mesh(tri, &labels, backends.traversal).map_err(|e| e.in_phase("traversal"))?;
    let traversal_time = start.elapsed();

    let start = Instant::now();
    let repaired = repair_all(tri, &mut labels, traversal_mesh.clone(), backends.reparation)
        .map_err(|e| e.in_phase("reparation"))?;
    let reparation_time = start.elapsed();

    let non_simple = traversal_mesh
        .iter()
        .filter(|p| has_repeated_vertex(p))
        .count();
    let mesh = canonicalize(&repaired.mesh);
    let stats = PhaseStats {
        schema_version: STATS_SCHEMA_VERSION,
        backends: backends.to_string(),
        repetitions: 1,
        input_vertices: tri.num_vertices(),
        input_triangles: tri.num_triangles(),
        label_time: label_time.as_secs_f64(),
        traversal_time: traversal_time.as_secs_f64(),
        reparation_time: reparation_time.as_secs_f64(),
        total_time: label_time.as_secs_f64() + traversal_time.as_secs_f64() + reparation_time.as_secs_f64(),
        label_max_time: kernels.label_max.as_secs_f64(),
        label_seed_time: kernels.label_seed.as_secs_f64(),
        label_frontier_time: kernels.label_frontier.as_secs_f64(),
        seeds: labels.seed_count(),
        polygons_after_traversal: traversal_mesh.count(),
        simple_after_traversal: traversal_mesh.count() - non_simple,
        non_simple_after_traversal: non_simple,
        initial_tips: repaired.initial_tips,
        initial_repeats: repaired.initial_repeats,
        reparation_rounds: repaired.rounds,
        polygons: mesh.count(),
        vertices: mesh.vertex_set().len(),
        edges: mesh.edge_count(),
    };
    Ok(PipelineRun {
        mesh,
        traversal_mesh,
        labels,
        splits: repaired.splits,
        stats,
    })
}

fn write_outputs(config: &PipelineConfig, tri: &Triangulation, mesh: &PolygonMesh, stats: &PhaseStats) -> Result<()> {
    let out = &config.outputs;
    if let Some(p) = &out.polymesh {
        write_polymesh(mesh, &tri.vertices, p)?;
    }
    if let Some(p) = &out.svg {
        write_svg(mesh, &tri.vertices, p, &config.svg)?;
    }
    if let Some(p) = &out.stats {
        let mut body = serde_json::to_string_pretty(stats)
            .map_err(|e| Error::InvalidInput(format!("stats serialization: {e}")))?;
        body.push('\n');
        fs::write(p, body).map_err(|e| Error::io(p, e))?;
    }
    Ok(())
}

/// Loads the input, runs the phases once and writes the requested outputs.
pub fn run_pipeline(config: &PipelineConfig) -> Result<(PolygonMesh, PhaseStats)> {
    let tri = config.input.load()?;
    let run = run_phases(&tri, config.backends)?;
    write_outputs(config, &tri, &run.mesh, &run.stats)?;
    Ok((run.mesh, run.stats))
}

fn mean(xs: impl Iterator<Item = f64>, n: usize) -> f64 {
    xs.sum::<f64>() / n as f64
}

/// Runs the phases `config.repetitions` times on one loaded input and
/// reports mean times. Counts come from the last run; they do not vary.
pub fn bench(config: &PipelineConfig) -> Result<PhaseStats> {
    if config.repetitions == 0 {
        return Err(Error::InvalidInput("repetitions must be at least 1".into()));
    }
    let tri = config.input.load()?;
    let mut runs = Vec::with_capacity(config.repetitions);
    let mut last = None;
    for _ in 0..config.repetitions {
        let run = run_phases(&tri, config.backends)?;
        runs.push(run.stats.clone());
        last = Some(run);
    }
    let last = last.expect("at least one repetition");
    let n = runs.len();
    let stats = PhaseStats {
        repetitions: n,
        label_time: mean(runs.iter().map(|s| s.label_time), n),
        traversal_time: mean(runs.iter().map(|s| s.traversal_time), n),
        reparation_time: mean(runs.iter().map(|s| s.reparation_time), n),
        total_time: mean(runs.iter().map(|s| s.total_time), n),
        label_max_time: mean(runs.iter().map(|s| s.label_max_time), n),
        label_seed_time: mean(runs.iter().map(|s| s.label_seed_time), n),
        label_frontier_time: mean(runs.iter().map(|s| s.label_frontier_time), n),
        ..last.stats.clone()
    };
    write_outputs(config, &tri, &last.mesh, &stats)?;
    Ok(stats)
}
