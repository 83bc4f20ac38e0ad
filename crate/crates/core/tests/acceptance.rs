//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use common::{mutate, random, rel, tip_fan};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use termesh::io_formats::*;
use termesh::oracle_ref::*;
use termesh::pipeline::{bench, InputSource, PipelineConfig, PipelineRun};
use termesh::*;

struct Case {
    name: String,
    tri: Triangulation,
    run: PipelineRun,
}

fn case(name: String, tri: Triangulation) -> Case {
    let run = run_phases(&tri, PhaseBackends::default()).unwrap();
    Case { name, tri, run }
}

fn grid(nx: usize, ny: usize, dx: f64, dy: f64) -> Triangulation {
    let pts: Vec<[f64; 2]> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| [i as f64 * dx, j as f64 * dy]))
        .collect();
    delaunay_triangulation(&pts).unwrap()
}

/// Every input of criteria 2 to 5: the 100 oracle inputs plus tie grids and
/// the hand-picked reparation instances.
fn extra_cases() -> Vec<Case> {
    let mut out = vec![case("tip fan".into(), tip_fan())];
    for (nx, ny, dx, dy) in [(10, 10, 1.0, 1.0), (31, 17, 2.0, 1.0), (25, 25, 3.0, 4.0)] {
        out.push(case(format!("grid {nx}x{ny}"), grid(nx, ny, dx, dy)));
    }
    for (n, seed) in [(20, 129), (40, 21), (819, 2023), (1000, 50)] {
        out.push(case(format!("random n={n} seed={seed}"), random(n, seed)));
    }
    out
}

type Outcome = Result<String, String>;

fn criterion_1(inputs: &mut Vec<Case>) -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for seed in 0..100u64 {
        let c = case(format!("seed {seed}"), random(1000, seed));
        let labels = label_all(&c.tri, Backend::Sequential).unwrap();
        let oracle = oracle_polygons(&c.tri, &labels).map_err(|e| format!("seed {seed}: {e}"))?;
        if canonicalize(&oracle) != canonicalize(&c.run.traversal_mesh) {
            bad.push(seed);
        }
        inputs.push(c);
    }
    let secs = start.elapsed().as_secs_f64();
    if !bad.is_empty() {
        return Err(format!("traversal differs from oracle on seeds {bad:?}"));
    }
    if secs >= 60.0 {
        return Err(format!("took {secs:.1} s"));
    }
    Ok(format!("100 inputs of 1000 points identical to oracle, {secs:.1} s"))
}

fn criterion_2(cases: &[Case]) -> Outcome {
    for c in cases {
        let labels = label_all(&c.tri, Backend::Sequential).unwrap();
        let part = regions_by_union_find(&c.tri, &labels);
        let seeds = labels.seed_count();
        let terminals = count_terminal_edges(&brute_force_classes(&c.tri));
        let polygons = c.run.traversal_mesh.count();
        if polygons != seeds || seeds != terminals || terminals != part.count {
            return Err(format!(
                "{}: polygons {polygons}, seeds {seeds}, terminal edges {terminals}, regions {}",
                c.name, part.count
            ));
        }
        let mut seeds_per_region = vec![0usize; part.count];
        for (t, &r) in part.region.iter().enumerate() {
            if r as usize >= part.count {
                return Err(format!("{}: triangle {t} has region {r}", c.name));
            }
            if labels.seed[t] {
                seeds_per_region[r as usize] += 1;
            }
        }
        if part.region.len() != c.tri.num_triangles() || seeds_per_region.iter().any(|&k| k != 1) {
            return Err(format!("{}: regions do not each hold one seed", c.name));
        }
    }
    Ok(format!("{} inputs", cases.len()))
}

fn criterion_3(cases: &[Case]) -> Outcome {
    for c in cases {
        let all: Vec<u32> = (0..c.tri.num_vertices() as u32).collect();
        if c.run.mesh.vertex_set() != all {
            return Err(format!("{}: output vertex set differs", c.name));
        }
    }
    let c819 = cases.iter().find(|c| c.tri.num_vertices() == 819).unwrap();
    Ok(format!(
        "{} inputs; 819-vertex input gives {} output vertices",
        cases.len(),
        c819.run.mesh.vertex_set().len()
    ))
}

fn criterion_4(cases: &[Case]) -> Outcome {
    let mut worst = 0.0f64;
    for c in cases {
        let area = c.tri.total_area();
        for m in [&c.run.traversal_mesh, &c.run.mesh] {
            let r = rel(m.total_area(&c.tri.vertices), area);
            worst = worst.max(r);
            if r > 1e-9 {
                return Err(format!("{}: relative area error {r:e}", c.name));
            }
        }
    }
    Ok(format!("{} inputs, worst relative error {worst:.1e}", cases.len()))
}

fn criterion_5(cases: &[Case]) -> Outcome {
    let (mut splits, mut polygons) = (0, 0);
    for c in cases {
        if let Some(p) = c.run.mesh.iter().find(|p| !check_simple(p, &c.tri.vertices)) {
            return Err(format!("{}: non-simple polygon {p:?}", c.name));
        }
        let s = &c.run.stats;
        if s.reparation_rounds - 1 > s.initial_tips {
            return Err(format!(
                "{}: {} splitting rounds for {} initial tips",
                c.name,
                s.reparation_rounds - 1,
                s.initial_tips
            ));
        }
        if let Some(s) = c.run.splits.iter().find(|s| s.left_len + s.right_len != s.parent_len + 2) {
            return Err(format!("{}: split {s:?}", c.name));
        }
        splits += c.run.splits.len();
        polygons += c.run.mesh.count();
    }
    Ok(format!("{polygons} polygons simple, {splits} splits obey the length law"))
}

fn criterion_6() -> Outcome {
    let mut configs = vec![PhaseBackends::default()];
    for w in [1, 2, 4, 8] {
        configs.push(PhaseBackends::new(BackendKind::Par, w));
    }
    configs.push(PhaseBackends::new(BackendKind::Mixed, 4));
    for seed in 0..20u64 {
        let tri = random(3000, 1000 + seed);
        let mut reference = None;
        for b in &configs {
            let run = run_phases(&tri, *b).unwrap();
            let bytes = format_polymesh(&run.mesh, &tri.vertices);
            match &reference {
                None => reference = Some(bytes),
                Some(r) if *r != bytes => return Err(format!("seed {seed}: {b} differs from sequential")),
                Some(_) => {}
            }
        }
    }
    Ok(format!("20 inputs x {} configurations byte-identical", configs.len()))
}

fn criterion_7() -> Outcome {
    let mut inputs: Vec<(String, Triangulation)> = vec![
        ("grid 40x40".into(), grid(40, 40, 1.0, 1.0)),
        ("grid 30x20".into(), grid(30, 20, 2.0, 1.0)),
        ("grid 20x20".into(), grid(20, 20, 3.0, 4.0)),
        ("tip fan".into(), tip_fan()),
    ];
    let mut seed = 0;
    while inputs.iter().map(|(_, t)| t.num_triangles()).sum::<usize>() < 20_000 {
        inputs.push((format!("seed {seed}"), random(2000, 5000 + seed)));
        seed += 1;
    }
    let (mut tris, mut edges) = (0, 0);
    for (name, tri) in &inputs {
        let labels = label_all(tri, Backend::parallel(4)).unwrap();
        let ours = classes_from_labels(tri, &labels).unwrap();
        let brute = brute_force_classes(tri);
        if let Some(i) = (0..ours.len()).find(|&i| ours[i] != brute[i]) {
            return Err(format!("{name}: half-edge {i} is {:?}, brute force says {:?}", ours[i], brute[i]));
        }
        tris += tri.num_triangles();
        edges += ours.len();
    }
    Ok(format!("{tris} triangles, {edges} half-edges match, tie grids included"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let tri = generate_random_delaunay(1_000_000, BoundingBox::default(), 8).unwrap();
    let run = run_phases(&tri, PhaseBackends::default()).unwrap();
    let full = start.elapsed().as_secs_f64();
    drop((tri, run));

    let workers = 4;
    let timed = |backends: PhaseBackends| {
        let mut c = PipelineConfig::new(InputSource::Random {
            n: 1_000_000,
            bbox: BoundingBox::default(),
            seed: 8,
        })
        .with_backends(backends);
        c.repetitions = 5;
        let s = bench(&c).unwrap();
        s.label_time + s.traversal_time
    };
    let seq = timed(PhaseBackends::default());
    let par = timed(PhaseBackends::new(BackendKind::Mixed, workers));
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let detail = format!(
        "1e6 points in {full:.1} s; label+traversal mean seq {seq:.3} s, par({workers}) {par:.3} s on {cores} available core(s)"
    );
    if full < 120.0 && par < seq {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn check_parse(r: Result<Triangulation>, files: &[String; 4]) -> Result<(), String> {
    match r {
        Ok(t) => t.validate().into_result().map_err(|e| format!("accepted invalid input: {e}")),
        Err(Error::Parse { path, line, .. }) => {
            let idx = ["m.node", "m.ele", "m.neigh", "m.trivertex"]
                .iter()
                .position(|p| Path::new(p) == path)
                .ok_or(format!("unknown path {path:?}"))?;
            let max = files[idx].lines().count().max(1);
            if line == 0 || line > max {
                return Err(format!("line {line} outside {}", path.display()));
            }
            Ok(())
        }
        Err(e) => Err(format!("error without a line number: {e}")),
    }
}

fn parse4(t: &[String; 4]) -> Result<Triangulation> {
    parse_triangulation(
        (Path::new("m.node"), &t[0]),
        (Path::new("m.ele"), &t[1]),
        (Path::new("m.neigh"), &t[2]),
        Some((Path::new("m.trivertex"), &t[3])),
    )
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for seed in 0..5 {
        let tri = random(2000, 900 + seed);
        let files = TriangleFileSet::from_prefix(dir.path().join("a"));
        write_triangulation(&tri, &files).map_err(|e| e.to_string())?;
        let back = read_triangulation(&files).map_err(|e| e.to_string())?;
        if back != tri {
            return Err(format!("seed {seed}: triangulation changed on round trip"));
        }
        let again = TriangleFileSet::from_prefix(dir.path().join("b"));
        write_triangulation(&back, &again).map_err(|e| e.to_string())?;
        for (a, b) in [(&files.node, &again.node), (&files.ele, &again.ele), (&files.neigh, &again.neigh)] {
            if std::fs::read(a).ok() != std::fs::read(b).ok() {
                return Err(format!("seed {seed}: {} not byte-stable", a.display()));
            }
        }
        let run = run_phases(&tri, PhaseBackends::default()).unwrap();
        let text = format_polymesh(&run.mesh, &tri.vertices);
        let (v, m) = parse_polymesh(Path::new("m"), &text).map_err(|e| e.to_string())?;
        if format_polymesh(&m, &v) != text {
            return Err(format!("seed {seed}: polymesh not byte-stable"));
        }
    }

    let one_node = "3 2 0 1\n1 0 0 0\n2 1 0 0\n3 0 1 0\n";
    let zero_node = "3 2 0 0\n0 0 0\n1 1 0\n2 0 1\n";
    let parse3 = |node: &str, ele: &str, neigh: &str| {
        parse_triangulation((Path::new("n"), node), (Path::new("e"), ele), (Path::new("g"), neigh), None)
    };
    let a = parse3(one_node, "1 3 0\n1 1 2 3\n", "1 3\n1 -1 -1 -1\n").map_err(|e| e.to_string())?;
    let b = parse3(zero_node, "1 3 0\n0 0 1 2\n", "1 3\n0 -1 -1 -1\n").map_err(|e| e.to_string())?;
    if a != b {
        return Err("one-based file set differs from zero-based".into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut errors, mut accepted) = (0, 0);
    for k in 0..1000u64 {
        if k % 4 == 3 {
            let tri = random(30, k);
            let run = run_phases(&tri, PhaseBackends::default()).unwrap();
            let bad = mutate(&format_polymesh(&run.mesh, &tri.vertices), &mut rng);
            match std::panic::catch_unwind(|| parse_polymesh(Path::new("m"), &bad)) {
                Err(_) => return Err(format!("polymesh reader panicked on mutation {k}")),
                Ok(Ok(_)) => accepted += 1,
                Ok(Err(Error::Parse { line, .. })) if line >= 1 => errors += 1,
                Ok(Err(e)) => return Err(format!("mutation {k}: {e}")),
            }
            continue;
        }
        let tri = random(3 + (k as usize % 40), k);
        let mut t = [
            format_node(&tri),
            format_ele(&tri),
            format_neigh(&tri),
            format_trivertex(tri.trivertex.as_deref().unwrap()),
        ];
        let which = (k as usize / 4) % 4;
        t[which] = mutate(&t[which], &mut rng);
        let r = std::panic::catch_unwind(|| parse4(&t)).map_err(|_| format!("reader panicked on mutation {k}"))?;
        let failed = r.is_err();
        check_parse(r, &t).map_err(|e| format!("mutation {k}: {e}"))?;
        if failed {
            errors += 1;
        } else {
            accepted += 1;
        }
    }
    Ok(format!(
        "byte-stable round trips, one-based normalized, 1000 mutations: {errors} line-numbered errors, {accepted} still valid, 0 crashes"
    ))
}

fn report(n: usize, name: &str, outcome: &Outcome) -> bool {
    match outcome {
        Ok(detail) => println!("criterion {n} ({name}): PASS: {detail}"),
        Err(detail) => println!("criterion {n} ({name}): FAIL: {detail}"),
    }
    outcome.is_ok()
}

fn main() -> ExitCode {
    let mut cases = Vec::new();
    let mut ok = report(1, "oracle equivalence", &criterion_1(&mut cases));
    cases.extend(extra_cases());
    ok &= report(2, "partition and count", &criterion_2(&cases));
    ok &= report(3, "vertex preservation", &criterion_3(&cases));
    ok &= report(4, "area conservation", &criterion_4(&cases));
    ok &= report(5, "simplicity", &criterion_5(&cases));
    drop(cases);
    ok &= report(6, "backend determinism", &criterion_6());
    ok &= report(7, "edge trichotomy", &criterion_7());
    ok &= report(8, "scalability", &criterion_8());
    ok &= report(9, "I/O round trips", &criterion_9());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
