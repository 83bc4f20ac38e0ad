//! File formats and the random input generator.

mod delaunay;
mod polymesh;
mod svg;
mod triangle;

pub use delaunay::{delaunay_triangulation, generate_random_delaunay, BoundingBox};
pub use polymesh::{format_polymesh, parse_polymesh, read_polymesh, write_polymesh};
pub use svg::{render_svg, write_svg, SvgOptions};
pub use triangle::{
    format_ele, format_neigh, format_node, format_trivertex, parse_triangulation, read_triangulation,
    write_triangulation, TriangleFileSet,
};
