//! Polygonal meshes from triangulations by joining terminal-edge regions.
//!
//! The pipeline labels each triangle's longest edge, walks the frontier
//! boundary of every region into a polygon, then splits polygons that
//! contain barrier-edge tips until all are simple.
//!
//! ```
//! use termesh::{generate_random_delaunay, run_phases, BoundingBox, PhaseBackends};
//!
//! let tri = generate_random_delaunay(200, BoundingBox::default(), 7).unwrap();
//! let run = run_phases(&tri, PhaseBackends::default()).unwrap();
//! assert_eq!(run.mesh.vertex_set().len(), 200);
//! ```

pub mod error;
pub mod exec;
pub mod io_formats;
pub mod label_phase;
pub mod mesh_core;
pub mod oracle_ref;
pub mod pipeline;
pub mod reparation_phase;
pub mod traversal_phase;

pub use error::{Error, Result};
pub use exec::Backend;
pub use io_formats::{generate_random_delaunay, BoundingBox, TriangleFileSet};
pub use label_phase::{label_all, EdgeLabels};
pub use mesh_core::{HalfEdge, Triangulation, BORDER};
pub use pipeline::{run_phases, run_pipeline, BackendKind, PhaseBackends, PhaseStats, PipelineConfig};
pub use reparation_phase::repair_all;
pub use traversal_phase::{build_polygon_mesh, PolygonMesh};
