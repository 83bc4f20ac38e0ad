#![allow(dead_code)]

use termesh::mesh_core::Triangulation;
use termesh::oracle_ref::{check_simple, count_terminal_edges, brute_force_classes, regions_by_union_find};
use termesh::pipeline::PipelineRun;
use termesh::{generate_random_delaunay, label_all, Backend, BoundingBox};

pub fn random(n: usize, seed: u64) -> Triangulation {
    generate_random_delaunay(n, BoundingBox::default(), seed).unwrap()
}

/// Fan of six triangles around vertex 0 whose spoke to vertex 1 is short:
/// one region, with 0 as a barrier-edge tip and spoke 0-4 terminal.
pub fn tip_fan() -> Triangulation {
    let radii = [10.0, 11.0, 12.0, 11.5, 10.5];
    let mut v = vec![0.0, 0.0, 1.0, 0.0];
    for (k, r) in radii.iter().enumerate() {
        let a = std::f64::consts::FRAC_PI_3 * (k + 1) as f64;
        v.extend_from_slice(&[r * a.cos(), r * a.sin()]);
    }
    let t = vec![0, 1, 2, 0, 2, 3, 0, 3, 4, 0, 4, 5, 0, 5, 6, 0, 6, 1];
    Triangulation::from_triangles(v, t).unwrap()
}

/// Relative difference of two areas.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Failures of the per-input pipeline properties, as messages.
pub fn property_failures(tri: &Triangulation, run: &PipelineRun) -> Vec<String> {
    let mut out = Vec::new();
    let labels = label_all(tri, Backend::Sequential).unwrap();
    let part = regions_by_union_find(tri, &labels);
    let seeds = labels.seed_count();
    let terminals = count_terminal_edges(&brute_force_classes(tri));
    let before = run.traversal_mesh.count();
    if !(before == seeds && seeds == terminals && terminals == part.count) {
        out.push(format!(
            "polygons {before}, seeds {seeds}, terminal edges {terminals}, regions {}",
            part.count
        ));
    }
    let all: Vec<u32> = (0..tri.num_vertices() as u32).collect();
    if run.mesh.vertex_set() != all || run.traversal_mesh.vertex_set() != all {
        out.push("vertex set differs from input".into());
    }
    let area = tri.total_area();
    for (name, m) in [("before", &run.traversal_mesh), ("after", &run.mesh)] {
        let r = rel(m.total_area(&tri.vertices), area);
        if r > 1e-9 {
            out.push(format!("area {name} reparation off by {r:e}"));
        }
    }
    if let Some(p) = run.mesh.iter().find(|p| !check_simple(p, &tri.vertices)) {
        out.push(format!("non-simple polygon {p:?}"));
    }
    if run.stats.reparation_rounds - 1 > run.stats.initial_tips {
        out.push(format!(
            "{} splitting rounds for {} initial tips",
            run.stats.reparation_rounds - 1,
            run.stats.initial_tips
        ));
    }
    if let Some(s) = run.splits.iter().find(|s| s.left_len + s.right_len != s.parent_len + 2) {
        out.push(format!("split law broken: {s:?}"));
    }
    out
}

use rand::Rng;

const JUNK: [&str; 9] = ["x", "-3", "1e999", "nan", "4294967296", "99999", "-1", "0.5", "#"];

/// Applies one random corruption to `text`.
pub fn mutate(text: &str, rng: &mut impl Rng) -> String {
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    if lines.is_empty() {
        lines.push(String::new());
    }
    let li = rng.gen_range(0..lines.len());
    match rng.gen_range(0..9) {
        0 => {
            let mut cut = rng.gen_range(0..text.len().max(1));
            while !text.is_char_boundary(cut) {
                cut -= 1;
            }
            return text[..cut].to_owned();
        }
        1 => {
            lines.remove(li);
        }
        2 => {
            let l = lines[li].clone();
            lines.insert(li, l);
        }
        3 | 4 | 7 | 8 => {
            let mut toks: Vec<String> = lines[li].split_whitespace().map(str::to_owned).collect();
            if toks.is_empty() {
                toks.push("0".into());
            }
            let ti = rng.gen_range(0..toks.len());
            match rng.gen_range(0..4) {
                0 => toks[ti] = JUNK[rng.gen_range(0..JUNK.len())].into(),
                1 => {
                    if let Ok(v) = toks[ti].parse::<i64>() {
                        toks[ti] = (v + if rng.gen() { 1 } else { -1 }).to_string();
                    } else {
                        toks[ti].push('1');
                    }
                }
                2 => {
                    toks.remove(ti);
                }
                _ => toks.push(rng.gen_range(0..50).to_string()),
            }
            lines[li] = toks.join(" ");
        }
        5 => {
            let lj = rng.gen_range(0..lines.len());
            lines.swap(li, lj);
        }
        _ => {
            let junk = JUNK[rng.gen_range(0..JUNK.len())];
            lines.insert(li, format!("{} {junk}", rng.gen_range(0..9)));
        }
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}
