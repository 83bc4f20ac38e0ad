mod common;

use std::path::Path;

use common::{mutate, random};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use termesh::io_formats::*;
use termesh::oracle_ref::canonicalize;
use termesh::*;

fn texts(tri: &Triangulation) -> [String; 4] {
    [
        format_node(tri),
        format_ele(tri),
        format_neigh(tri),
        format_trivertex(tri.trivertex.as_deref().unwrap()),
    ]
}

fn parse_texts(t: &[String; 4]) -> Result<Triangulation> {
    parse_triangulation(
        (Path::new("m.node"), &t[0]),
        (Path::new("m.ele"), &t[1]),
        (Path::new("m.neigh"), &t[2]),
        Some((Path::new("m.trivertex"), &t[3])),
    )
}

/// Shifts every index column to one-based.
fn one_based(t: &[String; 4]) -> [String; 4] {
    let shift = |text: &str, cols: &[usize], skip_neg: bool| -> String {
        let mut lines = text.lines();
        let mut out = format!("{}\n", lines.next().unwrap());
        for l in lines {
            let toks: Vec<String> = l
                .split_whitespace()
                .enumerate()
                .map(|(i, tok)| {
                    if cols.contains(&i) && !(skip_neg && tok == "-1") {
                        (tok.parse::<i64>().unwrap() + 1).to_string()
                    } else {
                        tok.to_owned()
                    }
                })
                .collect();
            out.push_str(&toks.join(" "));
            out.push('\n');
        }
        out
    };
    [
        shift(&t[0], &[0], false),
        shift(&t[1], &[0, 1, 2, 3], false),
        shift(&t[2], &[0, 1, 2, 3], true),
        t[3].clone(),
    ]
}

#[test]
fn triangulation_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..5 {
        let tri = random(500, seed);
        let files = TriangleFileSet::from_prefix(dir.path().join(format!("r{seed}")));
        write_triangulation(&tri, &files).unwrap();
        let back = read_triangulation(&files).unwrap();
        assert_eq!(back, tri);
        let again = dir.path().join("again");
        let files2 = TriangleFileSet::from_prefix(&again);
        write_triangulation(&back, &files2).unwrap();
        for (a, b) in [(&files.node, &files2.node), (&files.ele, &files2.ele), (&files.neigh, &files2.neigh)] {
            assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
        }
    }
}

#[test]
fn missing_trivertex_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let tri = random(100, 1);
    let mut files = TriangleFileSet::from_prefix(dir.path().join("m"));
    files.trivertex = None;
    write_triangulation(&tri, &files).unwrap();
    let found = TriangleFileSet::discover(dir.path().join("m"));
    assert_eq!(found.trivertex, None);
    assert_eq!(read_triangulation(&found).unwrap(), tri);
}

#[test]
fn one_based_files_normalize() {
    for seed in 0..5 {
        let tri = random(200, seed);
        let t = texts(&tri);
        assert_eq!(parse_texts(&one_based(&t)).unwrap(), tri);
    }
}

#[test]
fn clockwise_file_is_reoriented() {
    let node = "4 2 0 0\n0 0 0\n1 1 0\n2 1 1\n3 0 1\n";
    // Triangle 0 is listed clockwise; its neighbor slots are listed to match.
    let ele = "2 3 0\n0 0 2 1\n1 0 2 3\n";
    let neigh = "2 3\n0 -1 -1 1\n1 -1 -1 0\n";
    let t = parse_triangulation(
        (Path::new("n"), node),
        (Path::new("e"), ele),
        (Path::new("g"), neigh),
        None,
    )
    .unwrap();
    assert!(t.validate().ok());
    assert_eq!(&t.triangles[..3], &[0, 1, 2]);
}

#[test]
fn polymesh_round_trips_byte_stably() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..5 {
        let tri = random(400, seed);
        let run = run_phases(&tri, PhaseBackends::default()).unwrap();
        let path = dir.path().join("m.polymesh");
        write_polymesh(&run.traversal_mesh, &tri.vertices, &path).unwrap();
        let (v, m) = read_polymesh(&path).unwrap();
        assert_eq!(v, tri.vertices);
        assert_eq!(m, canonicalize(&run.traversal_mesh));
        assert_eq!(format_polymesh(&m, &v), std::fs::read_to_string(&path).unwrap());
    }
}

#[test]
fn square_polymesh() {
    let tri = Triangulation::from_triangles(vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0], vec![0, 1, 2, 0, 2, 3]).unwrap();
    let run = run_phases(&tri, PhaseBackends::default()).unwrap();
    let s = format_polymesh(&run.mesh, &tri.vertices);
    assert_eq!(s.lines().last().unwrap(), "4 0 1 2 3");
    assert!(s.starts_with("4 1\n"));
}

#[test]
fn svg_has_one_path_per_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let tri = random(1000, 9);
    let run = run_phases(&tri, PhaseBackends::default()).unwrap();
    let path = dir.path().join("m.svg");
    write_svg(&run.mesh, &tri.vertices, &path, &SvgOptions { fill_by_size: true, ..Default::default() }).unwrap();
    let svg = std::fs::read_to_string(path).unwrap();
    assert_eq!(svg.matches("<path ").count(), run.mesh.count());
    assert_eq!(svg.matches(" Z\"").count(), run.mesh.count());
}

#[test]
fn generator_is_delaunay() {
    let tri = random(200, 77);
    let p = |v: u32| {
        let [x, y] = tri.point(v as usize);
        robust::Coord { x, y }
    };
    for t in tri.triangles.chunks_exact(3) {
        for v in 0..tri.num_vertices() as u32 {
            if t.contains(&v) {
                continue;
            }
            assert!(robust::incircle(p(t[0]), p(t[1]), p(t[2]), p(v)) <= 0.0, "{t:?} contains {v}");
        }
    }
}

#[test]
fn generator_small_cases() {
    let t = delaunay_triangulation(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
    assert_eq!(t.num_triangles(), 1);
    let t = delaunay_triangulation(&[[0.0, 0.0], [4.0, 0.0], [5.0, 3.0], [0.0, 2.0]]).unwrap();
    assert_eq!(t.num_triangles(), 2);
    assert_eq!(t.neighbors.iter().filter(|&&n| n != BORDER).count(), 2);
    assert!(generate_random_delaunay(2, BoundingBox::default(), 0).is_err());
    assert_eq!(random(300, 5), random(300, 5));
    assert_ne!(random(300, 5), random(300, 6));
    let bb: BoundingBox = "-1,-1,1,1".parse().unwrap();
    let t = generate_random_delaunay(50, bb, 3).unwrap();
    assert!(t.vertices.iter().all(|c| (-1.0..1.0).contains(c)));
}

fn check_mutation_outcome(r: Result<Triangulation>, files: &[String; 4]) -> std::result::Result<(), String> {
    match r {
        Ok(t) => t.validate().into_result().map_err(|e| format!("accepted invalid input: {e}")),
        Err(Error::Parse { path, line, .. }) => {
            let idx = ["m.node", "m.ele", "m.neigh", "m.trivertex"]
                .iter()
                .position(|p| Path::new(p) == path)
                .ok_or(format!("unknown path {path:?}"))?;
            let max = files[idx].lines().count().max(1);
            if line == 0 || line > max {
                return Err(format!("line {line} outside {path:?} ({max} lines)"));
            }
            Ok(())
        }
        Err(e) => Err(format!("error without line: {e}")),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn corrupted_triangle_files_fail_with_lines(seed in any::<u64>(), which in 0usize..4, n in 3usize..40) {
        let tri = random(n, seed % 1000);
        let mut t = texts(&tri);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        t[which] = mutate(&t[which], &mut rng);
        let r = std::panic::catch_unwind(|| parse_texts(&t));
        prop_assert!(r.is_ok(), "reader panicked");
        let outcome = check_mutation_outcome(r.unwrap(), &t);
        prop_assert!(outcome.is_ok(), "{:?}", outcome);
    }

    #[test]
    fn corrupted_polymesh_fails_with_lines(seed in any::<u64>(), n in 3usize..60) {
        let tri = random(n, seed % 1000);
        let run = run_phases(&tri, PhaseBackends::default()).unwrap();
        let text = format_polymesh(&run.mesh, &tri.vertices);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bad = mutate(&text, &mut rng);
        match parse_polymesh(Path::new("m"), &bad) {
            Ok(_) => {}
            Err(Error::Parse { line, .. }) => prop_assert!(line >= 1 && line <= bad.lines().count().max(1)),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}
